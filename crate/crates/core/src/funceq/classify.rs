//! Recognition of catalog families up to standard transformations (rank two) or
//! Weyl group elements (higher rank), within a finite window.
//!
//! Rank-two search: for each of the sixteen discrete normal forms generated by
//! `Dual`, `ReflectY` and `ReflectXY` modulo scaling, the input is brought back by
//! that word and then fitted as `Scale(r) ∘ Translate(a,b)` of a family instance.
//! The translation multipliers come from ratios of coefficients, the parameters from
//! an exact linear solve, and every candidate is verified by re-applying the full
//! record to a fresh instance. Families are tried from fewest to most parameters.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::b2::{b2_residual, B2Tuple};
use super::bn::{bn_residual_all, is_pos, BnSolution};
use crate::catalog::{
    apply_transformation, format_record, instantiate, instantiate_b2, inverse_record, Atom, Family, FamilyInstance,
    TransformationRecord,
};
use crate::linalg;
use crate::ratfn::reflect_series;
use crate::rational::{nth_root, pow_half, ratio, Rational};
use crate::roots::{component_type, irreducible_components, span_rank, Letter, Root, WeylElement};
use crate::potentials::expand_var;
use crate::series::ExpSum;
use crate::{Error, Result};

/// Classification window in half-units.
pub const DEFAULT_WINDOW: i64 = 32;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct B2Classification {
    pub tag: Family,
    /// Applied in order to the instance, reproduces the input.
    pub transform: TransformationRecord,
    pub params: Vec<Rational>,
    pub scale: i64,
}

impl B2Classification {
    pub fn instance(&self) -> FamilyInstance {
        FamilyInstance::new(self.tag, 2, self.params.clone(), self.scale)
    }
}

impl Serialize for B2Classification {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("B2Classification", 4)?;
        st.serialize_field("tag", &self.tag)?;
        st.serialize_field("transform", &format_record(&self.transform))?;
        st.serialize_field("params", &self.params.iter().map(crate::rational::format_rational).collect::<Vec<_>>())?;
        st.serialize_field("scale", &self.scale)?;
        st.end()
    }
}

// ---------------------------------------------------------------------------
// discrete words

type SlotMap = [(usize, bool); 4];

const GENERATORS: [SlotMap; 3] = [
    [(2, false), (3, false), (0, false), (1, false)],
    [(1, false), (0, false), (2, false), (3, true)],
    [(0, false), (1, true), (3, false), (2, false)],
];

fn generator_atom(i: usize) -> Atom {
    [Atom::Dual, Atom::ReflectY, Atom::ReflectXY][i].clone()
}

/// Shortest words for the sixteen elements of the group generated by the three
/// discrete moves modulo scaling, identity first.
fn discrete_words() -> Vec<Vec<Atom>> {
    let id: SlotMap = [(0, false), (1, false), (2, false), (3, false)];
    let mut seen = BTreeSet::from([id]);
    let mut frontier = vec![(id, Vec::new())];
    let mut out = vec![Vec::new()];
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for (state, word) in frontier {
            for (g, gen) in GENERATORS.iter().enumerate() {
                let mut s = state;
                for i in 0..4 {
                    let (src, flag) = gen[i];
                    s[i] = (state[src].0, state[src].1 ^ flag);
                }
                if seen.insert(s) {
                    let mut w: Vec<Atom> = word.clone();
                    w.push(generator_atom(g));
                    out.push(w.clone());
                    next.push((s, w));
                }
            }
        }
        frontier = next;
    }
    out
}

// ---------------------------------------------------------------------------
// helpers

/// All rational `x` with `x^{k/2} = val`.
fn roots_half(val: &Rational, k: i64) -> Vec<Rational> {
    if val.is_zero() || k == 0 {
        return Vec::new();
    }
    let sq = val * val;
    let base = if k > 0 { sq } else { sq.recip() };
    let Some(c) = nth_root(&base, k.unsigned_abs() as u32) else { return Vec::new() };
    [c.clone(), -c].into_iter().filter(|x| pow_half(x, k).as_ref() == Some(val)).collect()
}

fn nonzero_exponents(s: &ExpSum, hi: i64) -> Vec<i64> {
    s.terms().map(|(k, _)| k[0]).filter(|&k| k <= hi).collect()
}

fn gcd_of(tuple: &[&ExpSum]) -> i64 {
    tuple.iter().flat_map(|s| s.terms().map(|(k, _)| k[0])).fold(0i64, |g, k| g.gcd(&k))
}

/// Least-squares-free exact fit: `targets[i] = Σ_c p_c bases[c][i]` on every exponent
/// up to the smaller ceiling, within `window`.
fn fit_linear(targets: &[&ExpSum], bases: &[Vec<ExpSum>], window: i64) -> Option<Vec<Rational>> {
    let cols = bases.len();
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for (i, t) in targets.iter().enumerate() {
        let hi = bases.iter().map(|b| b[i].ceiling()).chain([t.ceiling(), window]).min().unwrap();
        let lo = bases.iter().map(|b| b[i].floor()).chain([t.floor()]).min().unwrap();
        for k in lo..=hi {
            let row: Vec<Rational> = bases.iter().map(|b| b[i].coeff1(k).unwrap_or_else(|_| Rational::zero())).collect();
            let v = t.coeff1(k).unwrap_or_else(|_| Rational::zero());
            if row.iter().all(Zero::is_zero) {
                if !v.is_zero() {
                    return None;
                }
                continue;
            }
            rows.push(row);
            rhs.push(v);
        }
    }
    if rows.is_empty() {
        return Some(vec![Rational::zero(); cols]);
    }
    linalg::solve(&rows, &rhs)
}

fn translate_multipliers(a: &Rational, b: &Rational) -> [Rational; 4] {
    [a * a * b, b.clone(), a * b, a.clone()]
}

// ---------------------------------------------------------------------------
// rank two

struct B2Template {
    family: Family,
    /// Unit-parameter instances at `λ = 1`.
    basis: Vec<B2Tuple>,
}

fn b2_templates(ceiling: i64) -> Result<Vec<B2Template>> {
    let mut fams: Vec<Family> = Family::REGULAR_2.into_iter().chain(Family::B2_LIST).collect();
    fams.sort_by_key(|f| f.param_count());
    fams.into_iter()
        .map(|family| {
            let n = family.param_count();
            let basis = (0..n)
                .map(|k| {
                    let params = (0..n).map(|j| if j == k { Rational::one() } else { Rational::zero() }).collect();
                    let p = instantiate_b2(&FamilyInstance::new(family, 2, params, 1))?;
                    B2Tuple::from_potential(&p, ceiling)
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(B2Template { family, basis })
        })
        .collect()
}

fn template_basis(t: &B2Template) -> Vec<Vec<ExpSum>> {
    t.basis.iter().map(|b| b.components().into_iter().cloned().collect()).collect()
}

/// `t ↦ t^{1/r}` in every component, when the exponents allow it.
fn unscale(y: &B2Tuple, r: &Rational) -> Option<B2Tuple> {
    let inv = r.recip();
    let one = Rational::one();
    let go = |s: &ExpSum| -> Option<ExpSum> {
        if s.is_zero() {
            let c = (inv.abs() * Rational::from_integer(s.ceiling().into())).floor().to_integer();
            return Some(ExpSum::zero(1, i64::try_from(c).ok()?));
        }
        s.substitute(&one, &inv).ok()
    };
    Some(B2Tuple::new(go(&y.uplus)?, go(&y.uminus)?, go(&y.v)?, go(&y.w)?))
}

fn support_ok(y: &B2Tuple, basis: &[Vec<ExpSum>], window: i64) -> bool {
    for (i, yi) in y.components().iter().enumerate() {
        let hi = basis.iter().map(|b| b[i].ceiling()).min().unwrap_or(window).min(window);
        let allowed: BTreeSet<i64> = basis.iter().flat_map(|b| b[i].terms().map(|(k, _)| k[0])).collect();
        if nonzero_exponents(yi, hi).iter().any(|k| !allowed.contains(k)) {
            return false;
        }
    }
    true
}

fn comp_fits(y: &ExpSum, basis: &[Vec<ExpSum>], i: usize, m: &Rational, window: i64) -> bool {
    let Ok(z) = y.substitute(&m.recip(), &Rational::one()) else { return false };
    let b: Vec<Vec<ExpSum>> = basis.iter().map(|b| vec![b[i].clone()]).collect();
    fit_linear(&[&z], &b, window).is_some()
}

/// `None` when every multiplier fits (the component absorbs translations).
fn valid_multipliers(y: &ExpSum, basis: &[Vec<ExpSum>], i: usize, window: i64) -> Option<BTreeSet<Rational>> {
    let probe = ratio(4, 9);
    if comp_fits(y, basis, i, &probe, window) && comp_fits(y, basis, i, &Rational::one(), window) {
        return None;
    }
    let ks: Vec<i64> = nonzero_exponents(y, window).into_iter().take(10).collect();
    let mut cands = BTreeSet::new();
    for (x, &k1) in ks.iter().enumerate() {
        for &k2 in &ks[x + 1..] {
            let val = y.coeff1(k2).unwrap() / y.coeff1(k1).unwrap();
            for b in basis {
                let (Some(b1), Some(b2)) = (b[i].try_coeff1(k1), b[i].try_coeff1(k2)) else { continue };
                if b1.is_zero() || b2.is_zero() {
                    continue;
                }
                let v = &val * &b1 / &b2;
                cands.extend(roots_half(&v, k2 - k1));
                cands.extend(roots_half(&-v, k2 - k1));
            }
        }
    }
    cands.insert(Rational::one());
    cands.insert(-Rational::one());
    Some(cands.into_iter().filter(|m| comp_fits(y, basis, i, m, window)).collect())
}

fn ratio_candidates(a: &ExpSum, b: &ExpSum, window: i64) -> Vec<Rational> {
    let ea: BTreeSet<i64> = nonzero_exponents(a, window).into_iter().collect();
    let Some(k) = nonzero_exponents(b, window).into_iter().find(|k| ea.contains(k)) else { return Vec::new() };
    let val = a.coeff1(k).unwrap() / b.coeff1(k).unwrap();
    let mut out = roots_half(&val, k);
    out.extend(roots_half(&-val, k));
    out
}

fn fit_b2(y: &B2Tuple, basis: &[Vec<ExpSum>], window: i64) -> Option<(Rational, Rational, Vec<Rational>)> {
    if !support_ok(y, basis, window) {
        return None;
    }
    let comps = y.components();
    let valid: Vec<Option<BTreeSet<Rational>>> =
        (0..4).map(|i| valid_multipliers(comps[i], basis, i, window)).collect();
    if valid.iter().any(|v| v.as_ref().is_some_and(BTreeSet::is_empty)) {
        return None;
    }
    let set = |i: usize| valid[i].clone().unwrap_or_default();
    let one = Rational::one();
    let mut a_c: BTreeSet<Rational> = BTreeSet::from([one.clone(), -one.clone()]);
    let mut b_c: BTreeSet<Rational> = BTreeSet::from([one.clone(), -one.clone()]);
    a_c.extend(set(3));
    b_c.extend(set(1));
    for v in set(2) {
        for u in set(1) {
            a_c.insert(&v / &u);
        }
        for w in set(3) {
            b_c.insert(&v / &w);
        }
        for p in set(0) {
            a_c.insert(&p / &v);
        }
    }
    for p in set(0) {
        for u in set(1) {
            a_c.extend(roots_half(&(&p / &u), 4));
        }
    }
    let [up, um, v, w] = comps;
    for x in ratio_candidates(up, um, window) {
        a_c.extend(roots_half(&x, 4));
    }
    a_c.extend(ratio_candidates(up, v, window));
    a_c.extend(ratio_candidates(v, um, window));
    b_c.extend(ratio_candidates(v, w, window));
    let ab_c = ratio_candidates(up, w, window);
    let a0 = a_c.clone();
    let b0 = b_c.clone();
    for a in &a0 {
        for v in set(2) {
            b_c.insert(&v / a);
        }
        for p in set(0) {
            b_c.insert(&p / (a * a));
        }
        for x in &ab_c {
            b_c.insert(x / a);
        }
    }
    for b in &b0 {
        for v in set(2) {
            a_c.insert(&v / b);
        }
        for w in set(3) {
            a_c.insert(w.clone());
        }
    }
    let mut pairs: Vec<(&Rational, &Rational)> = a_c.iter().flat_map(|a| b_c.iter().map(move |b| (a, b))).collect();
    pairs.sort_by_key(|(a, b)| (!a.is_one(), !b.is_one()));
    for (a, b) in pairs {
        {
            let ms = translate_multipliers(a, b);
            if (0..4).any(|i| valid[i].as_ref().is_some_and(|s| !s.contains(&ms[i]))) {
                continue;
            }
            let Ok(z) = comps
                .iter()
                .zip(&ms)
                .map(|(c, m)| c.substitute(&m.recip(), &one))
                .collect::<Result<Vec<_>>>()
            else {
                continue;
            };
            let targets: Vec<&ExpSum> = z.iter().collect();
            if let Some(params) = fit_linear(&targets, basis, window) {
                return Some((a.clone(), b.clone(), params));
            }
        }
    }
    None
}

/// Recognizes a rank-two solution as a standard transformation of a catalog family.
///
/// The returned record maps the returned instance onto the input within the window.
/// Trivial solutions are reported as `A1-any`.
pub fn classify_b2(sol: &B2Tuple, window: i64) -> Result<B2Classification> {
    let sol = B2Tuple::new(sol.uplus.clone(), sol.uminus.clone(), sol.v.clone(), sol.w.clone());
    let live: Vec<i64> = sol.components().iter().filter(|s| !s.is_zero()).map(|s| s.ceiling()).collect();
    let window = live.iter().copied().chain([window]).min().unwrap();
    if !b2_residual(&sol, window)?.ok {
        return Err(Error::NotASolution);
    }
    if sol.is_trivial() {
        return Ok(B2Classification { tag: Family::A1Any, transform: Vec::new(), params: Vec::new(), scale: 1 });
    }
    let top = sol.components().iter().map(|s| s.ceiling()).max().unwrap().max(window);
    let templates = b2_templates(4 * top)?;
    let mut words: Vec<(Vec<Atom>, B2Tuple)> = Vec::new();
    for word in discrete_words() {
        if let Ok(y) = apply_transformation(&word, &sol) {
            words.push((word, y));
        }
    }
    let mut start = 0;
    while start < templates.len() {
        let count = templates[start].family.param_count();
        let end = templates[start..].iter().position(|t| t.family.param_count() != count).map_or(templates.len(), |i| start + i);
        for (word, y) in &words {
            let g_y = gcd_of(&y.components());
            for tpl in &templates[start..end] {
                let g_t = gcd_of(&tpl.basis.iter().flat_map(|b| b.components()).collect::<Vec<_>>());
                if g_y == 0 || g_t == 0 {
                    continue;
                }
                for d in [1, 2, 4] {
                    let r = Rational::new(g_y.abs().into(), (g_t.abs() * d).into());
                    let Some(z) = unscale(y, &r) else { continue };
                    let basis = template_basis(tpl);
                    let span = live_ceiling(&z).unwrap_or(window);
                    let Some((a, b, params)) = fit_b2(&z, &basis, span) else { continue };
                    if let Some(found) = assemble(tpl.family, &r, &a, &b, params, word, &sol, top) {
                        return Ok(found);
                    }
                }
            }
        }
        start = end;
    }
    Err(Error::Unrecognized(format!("no rank-two family fits within window {window}")))
}

fn live_ceiling(y: &B2Tuple) -> Option<i64> {
    y.components().iter().filter(|s| !s.is_zero()).map(|s| s.ceiling()).min()
}

/// Builds the record, moves an integral scale into `λ`, and verifies against the input.
fn assemble(
    family: Family,
    r: &Rational,
    a: &Rational,
    b: &Rational,
    params: Vec<Rational>,
    word: &[Atom],
    input: &B2Tuple,
    top: i64,
) -> Option<B2Classification> {
    let plain = a.is_one() && b.is_one();
    let (scale, params, mut record) = if plain && r.is_integer() && r.is_positive() {
        let l64 = i64::try_from(r.to_integer()).ok()?;
        (l64, params.iter().map(|p| p * r).collect::<Vec<_>>(), Vec::new())
    } else {
        (1, params, Vec::new())
    };
    if !plain {
        record.push(Atom::Translate(a.clone(), b.clone()));
    }
    if scale == 1 && !r.is_one() {
        record.push(Atom::Scale(r.clone()));
    }
    record.extend(inverse_record(word).ok()?);
    let out = B2Classification { tag: family, transform: record, params, scale };
    let p = instantiate_b2(&out.instance()).ok()?;
    let inst = B2Tuple::from_potential(&p, 4 * top).ok()?;
    let image = apply_transformation(&out.transform, &inst).ok()?;
    image.agrees_with(input).then_some(out)
}

// ---------------------------------------------------------------------------
// higher rank

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BnComponent {
    pub roots: Vec<Root>,
    pub tag: Family,
    /// The input component equals this element applied to the instance.
    pub weyl: WeylElement,
    pub transform: TransformationRecord,
    pub params: Vec<Rational>,
    pub scale: i64,
}

impl Serialize for BnComponent {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("BnComponent", 6)?;
        st.serialize_field("roots", &self.roots)?;
        st.serialize_field("tag", &self.tag)?;
        st.serialize_field("weyl", &self.weyl)?;
        st.serialize_field("transform", &format_record(&self.transform))?;
        st.serialize_field("params", &self.params.iter().map(crate::rational::format_rational).collect::<Vec<_>>())?;
        st.serialize_field("scale", &self.scale)?;
        st.end()
    }
}

struct BnTemplate {
    family: Family,
    /// Per unit parameter, root functions at `λ = 1`.
    basis: Vec<BTreeMap<Root, Vec<crate::potentials::VarTerm>>>,
    support: BTreeSet<Root>,
    gcd: i64,
}

fn bn_templates(n: usize) -> Result<Vec<BnTemplate>> {
    let mut fams: Vec<Family> = Family::BN_LIST.into_iter().chain(Family::SPECIALIZATIONS).collect();
    fams.sort_by_key(|f| f.param_count());
    let mut out = Vec::new();
    for family in fams {
        let k = family.param_count();
        let mut basis = Vec::new();
        let mut support = BTreeSet::new();
        let mut gcd = 0i64;
        for j in 0..k {
            let params = (0..k).map(|i| if i == j { Rational::one() } else { Rational::zero() }).collect();
            let spec = instantiate(&FamilyInstance::new(family, n, params, 1))?;
            let mut by_root = spec.split_by_root()?;
            by_root.retain(|r, _| r.iter().any(|&x| x != 0));
            for (r, terms) in &by_root {
                support.insert(r.clone());
                let s = expand_var(terms, 16)?;
                gcd = s.terms().fold(gcd, |g, (e, _)| g.gcd(&e[0]));
            }
            basis.push(by_root);
        }
        out.push(BnTemplate { family, basis, support, gcd });
    }
    Ok(out)
}

fn fit_bn(data: &BTreeMap<Root, ExpSum>, tpl: &BnTemplate, lambda: i64) -> Result<Option<Vec<Rational>>> {
    let roots: Vec<&Root> = tpl.support.iter().collect();
    let floor_c = data.values().map(ExpSum::ceiling).min().unwrap_or(0);
    let targets: Vec<ExpSum> =
        roots.iter().map(|r| data.get(*r).cloned().unwrap_or_else(|| ExpSum::zero(1, floor_c))).collect();
    let mut bases = Vec::new();
    for b in &tpl.basis {
        let mut per_root = Vec::new();
        for (r, t) in roots.iter().zip(&targets) {
            let terms: Vec<_> = b
                .get(*r)
                .map(|ts| ts.iter().map(|v| crate::potentials::VarTerm::new(v.coeff.clone(), v.kind.rescale_argument(&Rational::from_integer(lambda.into())))).collect())
                .unwrap_or_default();
            per_root.push(expand_var(&terms, t.ceiling())?);
        }
        bases.push(per_root);
    }
    let refs: Vec<&ExpSum> = targets.iter().collect();
    Ok(fit_linear(&refs, &bases, i64::MAX))
}

fn classify_component(sol: &BnSolution, comp: &[Root], templates: &[BnTemplate]) -> Result<BnComponent> {
    let n = sol.rank;
    let mut fwd: BTreeMap<Root, ExpSum> = BTreeMap::new();
    let mut back: HashMap<Root, Option<ExpSum>> = HashMap::new();
    for r in comp {
        let u = sol.get(r).unwrap().clone();
        back.insert(r.clone(), reflect_series(&u).ok().map(|s| s.strip_constant()));
        fwd.insert(r.clone(), u);
    }
    let g_d = fwd.values().flat_map(|s| s.terms().map(|(k, _)| k[0])).fold(0i64, |g, k| g.gcd(&k));
    for tpl in templates {
        for w in WeylElement::all(n) {
            let winv = w.inverse();
            let mut moved: BTreeMap<Root, ExpSum> = BTreeMap::new();
            let mut ok = true;
            for r in comp {
                let img = winv.apply(r);
                if is_pos(&img) {
                    moved.insert(img, fwd[r].clone());
                } else {
                    match &back[r] {
                        Some(s) => {
                            moved.insert(img.iter().map(|x| -x).collect(), s.clone());
                        }
                        None => ok = false,
                    }
                }
            }
            if !ok || !moved.keys().all(|r| tpl.support.contains(r)) {
                continue;
            }
            for d in [1, 2, 4] {
                if tpl.gcd == 0 || g_d % (tpl.gcd * d) != 0 {
                    continue;
                }
                let lambda = (g_d / (tpl.gcd * d)).abs();
                if lambda == 0 {
                    continue;
                }
                if let Some(params) = fit_bn(&moved, tpl, lambda)? {
                    return Ok(BnComponent {
                        roots: comp.to_vec(),
                        tag: tpl.family,
                        weyl: w,
                        transform: Vec::new(),
                        params,
                        scale: lambda,
                    });
                }
            }
        }
    }
    Err(Error::Unrecognized(format!("component {comp:?}")))
}

/// Splits the support into irreducible components and recognizes each one.
pub fn classify_bn(sol: &BnSolution, ceiling: i64) -> Result<Vec<BnComponent>> {
    if !bn_residual_all(sol, ceiling)?.ok {
        return Err(Error::NotASolution);
    }
    let n = sol.rank;
    let delta = sol.support();
    let mut templates = None;
    let mut out = Vec::new();
    for comp in irreducible_components(&delta) {
        if span_rank(&comp) == 1 {
            out.push(BnComponent {
                roots: comp,
                tag: Family::A1Any,
                weyl: WeylElement::identity(n),
                transform: Vec::new(),
                params: Vec::new(),
                scale: 1,
            });
            continue;
        }
        let (letter, rank) = component_type(&comp)?;
        if letter == Letter::B && rank == 2 {
            let idx: Vec<usize> = (0..n).filter(|&i| comp.iter().any(|r| r[i] != 0)).collect();
            let [p, m, v, w] = sol.restrict_pair(idx[0], idx[1]);
            let c = comp.iter().map(|r| sol.get(r).unwrap().ceiling()).min().unwrap();
            let big = |s: Option<&ExpSum>| s.map(ExpSum::euler_antiderivative).unwrap_or_else(|| ExpSum::zero(1, c));
            let tuple = B2Tuple::new(big(p), big(m), big(v), big(w));
            let found = classify_b2(&tuple, DEFAULT_WINDOW)?;
            out.push(BnComponent {
                roots: comp,
                tag: found.tag,
                weyl: WeylElement::identity(n),
                transform: found.transform,
                params: found.params,
                scale: found.scale,
            });
            continue;
        }
        if templates.is_none() {
            templates = Some(bn_templates(n)?);
        }
        out.push(classify_component(sol, &comp, templates.as_ref().unwrap())?);
    }
    Ok(out)
}
