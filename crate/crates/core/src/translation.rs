//! Translation between the presheaf and the j-sheaf theories, and the
//! equivalent presheaf theory on the selected contexts alone.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::context::{ContextId, ContextPoset, Selector};
use crate::error::{Error, Result};
use crate::operator::{trace_pairing, DensityMatrix, Projection};
use crate::semantics::{
    daseinize, daseinize_j, daseinize_presheaf, enumerate_j_clopens, enumerate_presheaf_clopens,
    valuate_j, valuate_presheaf, ClopenSub, TruthObject, TruthObjectKind,
};
use crate::sheaf::{
    enumerate_global_elements, is_in_omega_j, pullback_selector, r_factor, unit_zeta, Presheaf,
    Sieve, TruthValue,
};
use crate::tolerance::epsilon;
use crate::verify::CheckOutcome;

/// Same map as [`r_factor`].
pub fn translate_truth_value(
    poset: &ContextPoset,
    flat: &Selector,
    nu: &TruthValue,
) -> Result<TruthValue> {
    r_factor(poset, flat, nu)
}

/// `𝒰^♭(V) = {W | V ⊆ ♭W}`.
pub fn u_flat(poset: &ContextPoset, flat: &Selector, v: ContextId) -> Vec<ContextId> {
    poset
        .ids()
        .filter(|&w| poset.leq(v, flat.apply(w)))
        .collect()
}

/// Lower and upper presheaf truth values translated to `ν_j`.
pub fn gamma_range(
    poset: &ContextPoset,
    flat: &Selector,
    nu_j: &TruthValue,
) -> Result<(TruthValue, TruthValue)> {
    nu_j.check_naturality(poset)
        .map_err(|e| Error::NotGlobalElement(e.to_string()))?;
    if !nu_j.is_in_omega_j(poset, flat) {
        return Err(Error::NotGlobalElement(
            "components not closed under the selector".into(),
        ));
    }
    let lower = poset
        .ids()
        .map(|v| {
            let comp = nu_j.at(v);
            let members = poset
                .down_set(v)
                .iter()
                .copied()
                .filter(|&w| u_flat(poset, flat, w).iter().any(|&u| comp.contains(u)));
            Sieve::new(poset, v, members)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((TruthValue::new(poset, lower)?, nu_j.clone()))
}

/// Lower and upper clopen presheaf propositions whose selector pullback is
/// `P_j`.
pub fn imath_range(
    poset: &ContextPoset,
    flat: &Selector,
    p_j: &ClopenSub,
) -> Result<(ClopenSub, ClopenSub)> {
    p_j.check_j_sheaf(poset, flat).map_err(Error::NotJSheaf)?;
    let upper: BTreeMap<_, _> = p_j.values().clone();
    let mut lower = BTreeMap::new();
    for v in poset.ids() {
        let ctx = poset.context(v);
        let mut acc = Projection::zero(poset.dim());
        for w in u_flat(poset, flat, v) {
            acc = acc.join(&daseinize(p_j.at(w), ctx)?)?;
        }
        lower.insert(v, acc);
    }
    Ok((
        ClopenSub::presheaf(poset, lower)?,
        ClopenSub::presheaf(poset, upper)?,
    ))
}

/// `♭*S` for `S` given over `↓♭W` (or larger), as a j-sheaf clopen over `↓W`.
fn pull_to(poset: &ContextPoset, flat: &Selector, s: &ClopenSub, w: ContextId) -> ClopenSub {
    ClopenSub::from_values_unchecked(
        poset
            .down_set(w)
            .iter()
            .map(|&v| (v, s.at(flat.apply(v)).clone()))
            .collect(),
    )
}

/// `ϱ⁻¹(𝕋_j)(V)` membership: `S` over `↓♭V` with `♭*S ∈ 𝕋_j(V)`.
fn pulled_member(
    poset: &ContextPoset,
    flat: &Selector,
    t_j: &TruthObject,
    v: ContextId,
    s: &ClopenSub,
) -> bool {
    t_j.contains(poset, v, &pull_to(poset, flat, s, v))
}

/// Lower and upper presheaf truth objects translated to `𝕋_j`. The lower
/// one stores, per context, the meet-closure of its generators.
#[derive(Clone, Debug)]
pub struct JmathRange {
    pub lower: TruthObject,
    pub upper: TruthObject,
    generators: Arc<BTreeMap<ContextId, Vec<ClopenSub>>>,
}

impl JmathRange {
    /// Meet-closed generators of the lower bound at `V`; `None` when
    /// `𝒰^♭(V)` is empty.
    pub fn generators(&self, v: ContextId) -> Option<&[ClopenSub]> {
        self.generators.get(&v).map(Vec::as_slice)
    }
}

pub fn jmath_range(
    poset: &ContextPoset,
    flat: &Selector,
    t_j: &TruthObject,
    bound: usize,
) -> Result<JmathRange> {
    let mut gens = BTreeMap::new();
    for v in poset.ids() {
        let us = u_flat(poset, flat, v);
        if us.is_empty() {
            continue;
        }
        let mut r_v: Vec<ClopenSub> = Vec::new();
        for w in us {
            for s in enumerate_presheaf_clopens(poset, Some(flat.apply(w)), bound)? {
                if pulled_member(poset, flat, t_j, w, &s) {
                    let cut = s.restrict_to(poset, v);
                    if !r_v.contains(&cut) {
                        r_v.push(cut);
                    }
                }
            }
        }
        let mut i = 0;
        while i < r_v.len() {
            for k in 0..=i {
                let m = r_v[i].meet(&r_v[k])?;
                if !r_v.contains(&m) {
                    r_v.push(m);
                }
            }
            i += 1;
        }
        gens.insert(v, r_v);
    }
    let gens = Arc::new(gens);
    let g = gens.clone();
    let lower = TruthObject::new(
        format!("lower({})", t_j.name()),
        TruthObjectKind::Custom,
        move |poset, v, s| match g.get(&v) {
            Some(list) => list.iter().any(|x| x.leq(s)),
            None => {
                s.values().iter().all(|(_, p)| p.is_identity())
                    && s.domain().count() == poset.down_set(v).len()
            }
        },
    );
    let t = t_j.clone();
    let f = flat.clone();
    let upper = TruthObject::new(
        format!("upper({})", t_j.name()),
        TruthObjectKind::Custom,
        move |poset, v, s| t.contains(poset, v, &s.restrict_to(poset, v).pullback(&f)),
    );
    Ok(JmathRange {
        lower,
        upper,
        generators: gens,
    })
}

/// Violations of `♭*𝕋 = ϱ⁻¹(𝕋_j)` for a presheaf truth object `𝕋`.
pub fn truth_translation_violations(
    poset: &ContextPoset,
    flat: &Selector,
    t: &TruthObject,
    t_j: &TruthObject,
    bound: usize,
) -> Result<Vec<String>> {
    let mut out = Vec::new();
    for v in poset.ids() {
        let fv = flat.apply(v);
        for s in enumerate_presheaf_clopens(poset, Some(fv), bound)? {
            let lhs = t.contains(poset, fv, &s);
            let rhs = pulled_member(poset, flat, t_j, v, &s);
            if lhs != rhs {
                out.push(format!(
                    "at {v}: {s:?} is {lhs} on the left, {rhs} on the right"
                ));
            }
        }
    }
    Ok(out)
}

/// Exhaustive check, over every global element `ν` of `Ω` and every global
/// element `ν_j` of `Ω_j`, that `r∘ν = ν_j` iff `γ^∧(ν_j) ≤ ν ≤ γ^∨(ν_j)`.
pub fn gamma_sandwich_violations(
    poset: &ContextPoset,
    flat: &Selector,
    bound: usize,
) -> Result<Vec<String>> {
    let all = enumerate_global_elements(poset, bound)?;
    let sheaf: Vec<&TruthValue> = all
        .iter()
        .filter(|nu| nu.is_in_omega_j(poset, flat))
        .collect();
    let images: Vec<TruthValue> = all
        .iter()
        .map(|nu| r_factor(poset, flat, nu))
        .collect::<Result<_>>()?;
    let mut out = Vec::new();
    for nu_j in sheaf {
        let (lo, hi) = gamma_range(poset, flat, nu_j)?;
        if !lo.leq(&hi) {
            out.push(format!("lower above upper for {nu_j:?}"));
        }
        if r_factor(poset, flat, &lo)? != *nu_j || r_factor(poset, flat, &hi)? != *nu_j {
            out.push(format!("a bound does not translate back to {nu_j:?}"));
        }
        for (nu, img) in all.iter().zip(&images) {
            let inside = lo.leq(nu) && nu.leq(&hi);
            if inside != (img == nu_j) {
                out.push(format!("{nu:?} vs {nu_j:?}: sandwich {inside}"));
            }
        }
    }
    Ok(out)
}

/// Exhaustive check that `♭*P = P_j` iff `ı^∧(P_j) ⊆ P ⊆ ı^∨(P_j)`.
pub fn imath_sandwich_violations(
    poset: &ContextPoset,
    flat: &Selector,
    bound: usize,
) -> Result<Vec<String>> {
    let props = enumerate_presheaf_clopens(poset, None, bound)?;
    let mut out = Vec::new();
    for p_j in enumerate_j_clopens(poset, flat, None, bound)? {
        let (lo, hi) = imath_range(poset, flat, &p_j)?;
        if !lo.leq(&hi) {
            out.push(format!("lower above upper for {p_j:?}"));
        }
        if lo.pullback(flat) != p_j || hi.pullback(flat) != p_j {
            out.push(format!("a bound does not pull back to {p_j:?}"));
        }
        for p in &props {
            let inside = lo.leq(p) && p.leq(&hi);
            if inside != (p.pullback(flat) == p_j) {
                out.push(format!("{p:?} vs {p_j:?}: sandwich {inside}"));
            }
        }
    }
    Ok(out)
}

/// Checks of the truth-object range of `𝕋_j`: both bounds translate to
/// `𝕋_j`, the lower lies inside the upper, both are filters at every
/// context, and the bounds coincide on selected contexts.
pub fn jmath_violations(
    poset: &ContextPoset,
    flat: &Selector,
    t_j: &TruthObject,
    bound: usize,
) -> Result<Vec<String>> {
    let range = jmath_range(poset, flat, t_j, bound)?;
    let mut out = Vec::new();
    for (name, t) in [("lower", &range.lower), ("upper", &range.upper)] {
        for m in truth_translation_violations(poset, flat, t, t_j, bound)? {
            out.push(format!("{name} translation: {m}"));
        }
    }
    for v in poset.ids() {
        let lattice = enumerate_presheaf_clopens(poset, Some(v), bound)?;
        for s in &lattice {
            let (a, b) = (
                range.lower.contains(poset, v, s),
                range.upper.contains(poset, v, s),
            );
            if a && !b {
                out.push(format!("at {v}: lower not inside upper"));
            }
            if flat.is_fixpoint(v) && a != b {
                out.push(format!("at selected {v}: bounds differ"));
            }
        }
        for (name, t) in [("lower", &range.lower), ("upper", &range.upper)] {
            for m in crate::semantics::filter_violations_on(poset, t, v, &lattice) {
                out.push(format!("{name} filter: {m}"));
            }
        }
    }
    out.dedup();
    Ok(out)
}

/// Presheaf on the selected contexts only.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedPresheaf {
    sizes: BTreeMap<ContextId, usize>,
    maps: BTreeMap<(ContextId, ContextId), Vec<usize>>,
}

impl ReducedPresheaf {
    pub fn contexts(&self) -> impl Iterator<Item = ContextId> + '_ {
        self.sizes.keys().copied()
    }

    pub fn size(&self, v: ContextId) -> usize {
        self.sizes[&v]
    }

    /// Image of `x ∈ X(sup)` in `X(sub)`.
    pub fn restrict(&self, sub: ContextId, sup: ContextId, x: usize) -> usize {
        if sub == sup {
            return x;
        }
        self.maps[&(sub, sup)][x]
    }

    /// Functoriality along chains of selected contexts.
    pub fn check_functorial(&self, poset: &ContextPoset) -> Result<()> {
        for &(a, b) in self.maps.keys() {
            for &(c, d) in self.maps.keys() {
                if d == a && poset.leq(c, b) {
                    for x in 0..self.size(b) {
                        if self.restrict(c, a, self.restrict(a, b, x)) != self.restrict(c, b, x) {
                            return Err(Error::NotFunctorial(format!("{c} ⊆ {a} ⊆ {b}")));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// `♭̃_*Q = Q` restricted to the selected contexts.
pub fn reduced_restrict(poset: &ContextPoset, flat: &Selector, q: &Presheaf) -> ReducedPresheaf {
    let fix = flat.fixpoints();
    let sizes = fix.iter().map(|&v| (v, q.size(v))).collect();
    let mut maps = BTreeMap::new();
    for &sup in &fix {
        for &sub in &fix {
            if sub != sup && poset.leq(sub, sup) {
                maps.insert((sub, sup), q.map(sub, sup).expect("comparable").to_vec());
            }
        }
    }
    ReducedPresheaf { sizes, maps }
}

/// `(♭̃*X)(V) = X(♭V)`.
pub fn reduced_pullback(
    poset: &ContextPoset,
    flat: &Selector,
    x: &ReducedPresheaf,
) -> Result<Presheaf> {
    let sizes = poset.ids().map(|v| x.size(flat.apply(v))).collect();
    Presheaf::from_fn(poset, sizes, |sub, sup, i| {
        x.restrict(flat.apply(sub), flat.apply(sup), i)
    })
}

/// Sieve on a selected context within the selected sub-poset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReducedSieve {
    pub base: ContextId,
    pub members: BTreeSet<ContextId>,
}

/// `ξ(ω) = ω ∩ ♭(𝐕)`.
pub fn xi(poset: &ContextPoset, flat: &Selector, omega: &Sieve) -> Result<ReducedSieve> {
    if !flat.is_fixpoint(omega.base()) || !is_in_omega_j(poset, flat, omega) {
        return Err(Error::NotInOmegaJ(format!("{omega:?}")));
    }
    Ok(ReducedSieve {
        base: omega.base(),
        members: omega
            .members()
            .iter()
            .copied()
            .filter(|&v| flat.is_fixpoint(v))
            .collect(),
    })
}

/// `ξ⁻¹(ω_♭) = {V′ ⊆ base | ♭V′ ∈ ω_♭}`.
pub fn xi_inv(poset: &ContextPoset, flat: &Selector, omega: &ReducedSieve) -> Result<Sieve> {
    Sieve::new(
        poset,
        omega.base,
        poset
            .down_set(omega.base)
            .iter()
            .copied()
            .filter(|&v| omega.members.contains(&flat.apply(v))),
    )
}

/// All sieves of the reduced site on a selected context.
pub fn enumerate_reduced_sieves(
    poset: &ContextPoset,
    flat: &Selector,
    base: ContextId,
) -> Vec<ReducedSieve> {
    let elems: Vec<ContextId> = poset
        .down_set(base)
        .iter()
        .copied()
        .filter(|&v| flat.is_fixpoint(v))
        .collect();
    (0..1u64 << elems.len())
        .map(|m| {
            elems
                .iter()
                .enumerate()
                .filter(|(i, _)| m >> i & 1 == 1)
                .map(|(_, &v)| v)
                .collect()
        })
        .filter(|s: &BTreeSet<ContextId>| {
            s.iter()
                .all(|&v| elems.iter().all(|&w| !poset.leq(w, v) || s.contains(&w)))
        })
        .map(|members| ReducedSieve { base, members })
        .collect()
}

/// `ϑ(Z) = ♭̃*Z` over `↓V` for `Z` given on selected contexts.
pub fn theta(
    poset: &ContextPoset,
    flat: &Selector,
    z: &BTreeMap<ContextId, Projection>,
    v: ContextId,
) -> ClopenSub {
    ClopenSub::from_values_unchecked(
        poset
            .down_set(v)
            .iter()
            .map(|&w| (w, z[&flat.apply(w)].clone()))
            .collect(),
    )
}

pub type XiFn = dyn Fn(&ContextPoset, &Selector, &Sieve) -> Result<ReducedSieve>;

/// Checks of the reduced theory for the proposition `Ê` and `𝕋^{ρ,r}`:
/// (a) `ϑ` round trips, (b) reduced daseinization, (c) reduced truth
/// object, (d) valuations through `ξ`, (e) presheaf/j-sheaf consistency.
/// `xi_map` replaces `ξ` in (d) when given.
pub fn reduced_theory_suite(
    poset: &ContextPoset,
    flat: &Selector,
    rho: &DensityMatrix,
    r: f64,
    e: &Projection,
    bound: usize,
    xi_map: Option<&XiFn>,
) -> Result<Vec<CheckOutcome>> {
    let fix = flat.fixpoints();
    let t_j = TruthObject::rho_r(rho, r)?;
    let mut out = Vec::new();

    let mut bad = Vec::new();
    for &v in &fix {
        for s in enumerate_j_clopens(poset, flat, Some(v), bound)? {
            let z = s.on_fixpoints(flat);
            if theta(poset, flat, &z, v) != s {
                bad.push(format!("ϑ(♭̃_*S) ≠ S at {v}"));
            }
            if theta(poset, flat, &z, v).on_fixpoints(flat) != z {
                bad.push(format!("♭̃_*ϑ(Z) ≠ Z at {v}"));
            }
        }
        for omega in enumerate_reduced_sieves(poset, flat, v) {
            if xi(poset, flat, &xi_inv(poset, flat, &omega)?)? != omega {
                bad.push(format!("ξ(ξ⁻¹(ω)) ≠ ω at {v}"));
            }
        }
        for omega in crate::sheaf::omega_j(poset, flat, v, bound)? {
            if xi_inv(poset, flat, &xi(poset, flat, &omega)?)? != omega {
                bad.push(format!("ξ⁻¹(ξ(ω)) ≠ ω at {v}"));
            }
        }
    }
    out.push(CheckOutcome::new("reduced.theta_xi_round_trip", bad));

    let dj = daseinize_j(e, flat, poset)?;
    let mut bad = Vec::new();
    for &v in &fix {
        let direct = daseinize(e, poset.context(v))?;
        if direct != *dj.at(v) {
            bad.push(format!("δ_♭ at {v} differs"));
        }
    }
    out.push(CheckOutcome::new("reduced.daseinization", bad));

    let mut bad = Vec::new();
    for &v in &fix {
        for s in enumerate_j_clopens(poset, flat, Some(v), bound)? {
            let z = s.on_fixpoints(flat);
            let direct = trace_pairing(rho, &z[&v])? >= r - epsilon();
            if direct != t_j.contains(poset, v, &theta(poset, flat, &z, v)) {
                bad.push(format!("reduced truth object differs at {v}"));
            }
        }
    }
    out.push(CheckOutcome::new("reduced.truth_object", bad));

    let mut bad = Vec::new();
    match valuate_j(&dj, &t_j, flat, poset) {
        Ok(nu_j) => {
            for &v in &fix {
                let members = poset
                    .down_set(v)
                    .iter()
                    .copied()
                    .filter(|&w| flat.is_fixpoint(w))
                    .filter(|&w| {
                        trace_pairing(rho, &daseinize(e, poset.context(w)).unwrap()).unwrap()
                            >= r - epsilon()
                    })
                    .collect();
                let direct = ReducedSieve { base: v, members };
                let via = match xi_map {
                    Some(f) => f(poset, flat, nu_j.at(v))?,
                    None => xi(poset, flat, nu_j.at(v))?,
                };
                if direct != via {
                    bad.push(format!("at {v}: reduced {direct:?} vs through ξ {via:?}"));
                }
            }
        }
        Err(err) => bad.push(format!("j-sheaf valuation failed: {err}")),
    }
    out.push(CheckOutcome::new("reduced.valuation", bad));

    let mut bad = Vec::new();
    let p = daseinize_presheaf(e, poset)?;
    if p.pullback(flat) != dj {
        bad.push("♭*δ(Ê) ≠ δ_j(Ê)".into());
    }
    let t = TruthObject::rho_r(rho, r)?;
    bad.extend(truth_translation_violations(poset, flat, &t, &t_j, bound)?);
    match (
        valuate_presheaf(&p, &t, poset),
        valuate_j(&dj, &t_j, flat, poset),
    ) {
        (Ok(nu), Ok(nu_j)) => {
            if r_factor(poset, flat, &nu)? != nu_j {
                bad.push(format!(
                    "r∘ν = {:?} but ν_j = {:?}",
                    r_factor(poset, flat, &nu)?,
                    nu_j
                ));
            }
        }
        (a, b) => bad.push(format!("valuation failed: {:?} / {:?}", a.err(), b.err())),
    }
    out.push(CheckOutcome::new("reduced.consistency", bad));

    let mut bad = Vec::new();
    let sigma = crate::semantics::spectral_presheaf(poset);
    let red = reduced_restrict(poset, flat, &sigma);
    red.check_functorial(poset)?;
    let back = reduced_pullback(poset, flat, &red)?;
    if back != pullback_selector(poset, flat, &sigma) {
        bad.push("♭̃*♭̃_*Σ ≠ ♭*Σ".into());
    }
    let sheaf = pullback_selector(poset, flat, &sigma);
    let round = reduced_pullback(poset, flat, &reduced_restrict(poset, flat, &sheaf))?;
    if !unit_zeta(poset, flat, &sheaf).is_iso(&sheaf) || round != sheaf {
        bad.push("round trip on ♭*Σ is not an isomorphism".into());
    }
    out.push(CheckOutcome::new("reduced.adjunction", bad));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::QubitFixture;
    use crate::measure::{canonical_truth_object, measure_from_state, MeasureKind};
    use crate::tolerance::DEFAULT_MAX_ENUM;

    #[test]
    fn u_flat_on_fixture() {
        let f = QubitFixture::new();
        let p = &f.poset;
        assert!(u_flat(p, &f.flat, f.vx).is_empty());
        assert_eq!(u_flat(p, &f.flat, f.vz), vec![f.vz]);
        assert_eq!(u_flat(p, &f.flat, p.bottom()).len(), 3);
    }

    #[test]
    fn gamma_examples() {
        let f = QubitFixture::new();
        let p = &f.poset;
        let (lo, hi) = gamma_range(p, &f.flat, &TruthValue::top(p)).unwrap();
        assert_eq!(hi, TruthValue::top(p));
        // nothing selected lies above Vx, so the lower bound only keeps the bottom
        assert_eq!(
            lo.at(f.vx).members().iter().copied().collect::<Vec<_>>(),
            vec![p.bottom()]
        );
        assert_eq!(lo.at(f.vz), TruthValue::top(p).at(f.vz));
        let (lo, hi) = gamma_range(p, &f.flat, &TruthValue::bottom(p)).unwrap();
        assert_eq!(lo, TruthValue::bottom(p));
        assert_eq!(hi, TruthValue::bottom(p));
        let (lo, hi) = gamma_range(&f.poset, &f.identity_selector(), &TruthValue::top(p)).unwrap();
        assert_eq!(lo, hi);
        assert!(gamma_sandwich_violations(p, &f.flat, DEFAULT_MAX_ENUM)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn imath_examples() {
        let f = QubitFixture::new();
        let p = &f.poset;
        let id = f.identity_selector();
        let pj = daseinize_j(&f.p_x, &id, p).unwrap();
        let (lo, hi) = imath_range(p, &id, &pj).unwrap();
        assert_eq!(lo, pj);
        assert_eq!(hi, pj);
        let pj = daseinize_j(&f.p_z, &f.flat, p).unwrap();
        let (lo, hi) = imath_range(p, &f.flat, &pj).unwrap();
        assert!(hi.at(f.vx).is_identity());
        assert!(lo.at(f.vx).is_zero());
        assert_eq!(lo.pullback(&f.flat), pj);
        assert_eq!(hi.pullback(&f.flat), pj);
        assert!(imath_sandwich_violations(p, &f.flat, DEFAULT_MAX_ENUM)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn jmath_examples() {
        let f = QubitFixture::new();
        let p = &f.poset;
        let t = TruthObject::rho_r(&f.rho0, 1.0).unwrap();
        let range = jmath_range(p, &f.flat, &t, DEFAULT_MAX_ENUM).unwrap();
        assert!(range.generators(f.vx).is_none());
        let top_x = ClopenSub::top(p).restrict_to(p, f.vx);
        assert!(range.lower.contains(p, f.vx, &top_x));
        let px = daseinize_presheaf(&f.p_x, p).unwrap().restrict_to(p, f.vx);
        assert!(!range.lower.contains(p, f.vx, &px));
        assert!(range.upper.contains(p, f.vx, &px));
        assert!(jmath_violations(p, &f.flat, &t, DEFAULT_MAX_ENUM)
            .unwrap()
            .is_empty());
        let mu = measure_from_state(&f.rho_x, MeasureKind::JSheaf, Some(&f.flat));
        let canon = canonical_truth_object(&mu);
        assert!(jmath_violations(p, &f.flat, &canon, DEFAULT_MAX_ENUM)
            .unwrap()
            .is_empty());
        let id = f.identity_selector();
        let range = jmath_range(p, &id, &t, DEFAULT_MAX_ENUM).unwrap();
        for v in p.ids() {
            for s in enumerate_presheaf_clopens(p, Some(v), DEFAULT_MAX_ENUM).unwrap() {
                let x = t.contains(p, v, &s);
                assert_eq!(range.lower.contains(p, v, &s), x);
                assert_eq!(range.upper.contains(p, v, &s), x);
            }
        }
    }

    #[test]
    fn reduced_presheaf_examples() {
        let f = QubitFixture::new();
        let p = &f.poset;
        let sigma = crate::semantics::spectral_presheaf(p);
        let id = f.identity_selector();
        assert_eq!(
            reduced_pullback(p, &id, &reduced_restrict(p, &id, &sigma)).unwrap(),
            sigma
        );
        let red = reduced_restrict(p, &f.flat, &pullback_selector(p, &f.flat, &sigma));
        assert_eq!(red.contexts().collect::<Vec<_>>(), vec![p.bottom(), f.vz]);
        assert_eq!(red.size(f.vz), 2);
    }

    #[test]
    fn xi_examples() {
        let f = QubitFixture::new();
        let p = &f.poset;
        let top = Sieve::top(p, f.vz);
        assert_eq!(xi(p, &f.flat, &top).unwrap().members.len(), 2);
        assert!(xi(p, &f.flat, &Sieve::empty(f.vz))
            .unwrap()
            .members
            .is_empty());
        assert!(xi(p, &f.flat, &Sieve::top(p, f.vx)).is_err());
    }

    #[test]
    fn suite_on_fixture() {
        let f = QubitFixture::new();
        let p = &f.poset;
        for (flat, rho, r) in [
            (&f.flat, &f.rho0, 1.0),
            (&f.identity_selector(), &f.rho_x, 0.5),
        ] {
            let rep =
                reduced_theory_suite(p, flat, rho, r, &f.p_z, DEFAULT_MAX_ENUM, None).unwrap();
            assert!(rep.iter().all(|c| c.passed), "{rep:?}");
        }
        let broken: &XiFn = &|_, _, s| {
            Ok(ReducedSieve {
                base: s.base(),
                members: BTreeSet::new(),
            })
        };
        let rep = reduced_theory_suite(
            p,
            &f.flat,
            &f.rho0,
            1.0,
            &f.p_z,
            DEFAULT_MAX_ENUM,
            Some(broken),
        )
        .unwrap();
        assert!(
            !rep.iter()
                .find(|c| c.name == "reduced.valuation")
                .unwrap()
                .passed
        );
    }
}
