mod common;

use common::*;
use integrable::catalog::{apply_transformation, parse_record, Family};
use integrable::funceq::*;
use integrable::rational::rat;
use integrable::{Error, ExpSum};

#[test]
fn untransformed_families_report_themselves() {
    for f in rank_two_families() {
        let c = classify_b2(&b2_tuple(f, &PARAM_SETS[1], 32), 16).unwrap();
        assert_eq!(c.tag, f);
        assert!(c.transform.is_empty(), "{f}: {:?}", c.transform);
        assert_eq!(c.params, params(&PARAM_SETS[1][..f.param_count()]));
    }
}

#[test]
fn record_reproduces_input() {
    let t = b2_tuple(Family::TodaC21, &PARAM_SETS[0], 48);
    let y = apply_transformation(&parse_record("translate:2:-1/3,dual,reflect-y").unwrap(), &t).unwrap();
    let c = classify_b2(&y, 16).unwrap();
    assert_eq!(c.tag, Family::TodaC21);
    let inst = integrable::catalog::instantiate_b2(&c.instance()).unwrap();
    let back = apply_transformation(&c.transform, &B2Tuple::from_potential(&inst, 96).unwrap()).unwrap();
    assert!(back.agrees_with(&y));
}

#[test]
fn trivial_and_non_solutions() {
    let z = ExpSum::zero(1, 16);
    let u = ExpSum::from_coeffs1(16, [(2, rat(1)), (5, rat(3))]);
    let trivial = B2Tuple::new(u.clone(), u.clone(), z.clone(), z);
    assert_eq!(classify_b2(&trivial, 16).unwrap().tag, Family::A1Any);

    let mut bad = b2_tuple(Family::TrigB2, &PARAM_SETS[0], 32);
    bad.w = bad.w.add(&ExpSum::from_coeffs1(32, [(2, rat(1))])).unwrap();
    assert_eq!(classify_b2(&bad, 16), Err(Error::NotASolution));
}

#[test]
fn scaled_instances_fold_into_lambda() {
    let t = b2_tuple(Family::TrigB2S, &PARAM_SETS[1], 32);
    let y = apply_transformation(&parse_record("scale:3").unwrap(), &t).unwrap();
    let c = classify_b2(&y, 16).unwrap();
    assert_eq!((c.tag, c.scale), (Family::TrigB2S, 3));
    assert!(c.transform.is_empty());
}

#[test]
fn higher_rank_components() {
    let sol = bn_solution(Family::TodaBCm, 3, &PARAM_SETS[1], 64);
    let comps = classify_bn(&sol, 24).unwrap();
    assert_eq!(comps.len(), 1);
    assert_eq!(comps[0].tag, Family::TodaBCm);
    assert!(comps[0].weyl.is_identity());

    let mut split = BnSolution::new(3);
    split.insert(vec![1, -1, 0], ExpSum::from_coeffs1(16, [(2, rat(1))]));
    split.insert(vec![0, 0, 1], ExpSum::from_coeffs1(16, [(2, rat(2)), (4, rat(5))]));
    let comps = classify_bn(&split, 16).unwrap();
    assert_eq!(comps.len(), 2);
    assert!(comps.iter().all(|c| c.tag == Family::A1Any));
}
