use integrable::catalog::{instantiate_b2, Family, FamilyInstance};
use integrable::funceq::{b2_decomposition, b2_residual, B2Tuple};
use integrable::operator::{build_pq_b2, compat_residual_b2};
use integrable::rational::rat;
use integrable::Rational;

const SETS: [[i64; 5]; 2] = [[1, 1, 2, 3, 5], [2, 3, 5, 7, 11]];

fn instances() -> Vec<FamilyInstance> {
    let mut out = Vec::new();
    for f in Family::B2_LIST {
        for set in SETS {
            let p: Vec<Rational> = set.iter().map(|&x| rat(x)).collect();
            out.push(FamilyInstance::truncated(f, 2, &p, 1));
        }
    }
    out
}

#[test]
fn commute_and_symmetric() {
    for inst in instances() {
        let pot = instantiate_b2(&inst).unwrap();
        let data = pot.data(32).unwrap();
        let (p, q) = build_pq_b2(&data).unwrap();
        assert!(p.commutator(&q).unwrap().is_zero(), "{:?}", inst);
        assert!(q.adjoint().agrees_with(&q), "{:?}", inst);
    }
}

#[test]
fn residuals_vanish() {
    for inst in instances() {
        let pot = instantiate_b2(&inst).unwrap();
        let data = pot.data(32).unwrap();
        assert!(compat_residual_b2(&data).unwrap().is_zero(), "{:?}", inst);
        let t = B2Tuple::from_potential(&pot, 32).unwrap();
        assert!(b2_residual(&t, 16).unwrap().ok, "{:?}", inst);
        assert!(b2_decomposition(&t, 16).unwrap().is_some(), "{:?}", inst);
    }
}
