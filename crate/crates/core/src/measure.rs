//! Measures on the spectral presheaf and sheaf, Born probabilities, the
//! internalized measure morphism, thresholds and canonical truth objects.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::context::{ContextId, ContextPoset, Selector};
use crate::error::{Error, Result};
use crate::operator::{
    spectral_projection, trace_pairing, BorelSelection, ComplexMatrix, DensityMatrix, Projection,
};
use crate::semantics::{daseinize, enumerate_j_clopens, ClopenSub, TruthObject, TruthObjectKind};
use crate::sheaf::{is_in_omega_j, Sieve};
use crate::tolerance::epsilon;

/// Map from contexts of a down-closed domain to `[0,1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct OrderReversingSection {
    values: BTreeMap<ContextId, f64>,
}

impl OrderReversingSection {
    pub fn new(values: BTreeMap<ContextId, f64>) -> Self {
        Self { values }
    }

    pub fn at(&self, v: ContextId) -> f64 {
        self.values[&v]
    }

    pub fn get(&self, v: ContextId) -> Option<f64> {
        self.values.get(&v).copied()
    }

    pub fn values(&self) -> &BTreeMap<ContextId, f64> {
        &self.values
    }

    /// `V″ ⊆ V′ ⇒ f(V″) ≥ f(V′)` within epsilon.
    pub fn is_order_reversing(&self, poset: &ContextPoset) -> bool {
        self.values.iter().all(|(&v, &x)| {
            poset
                .down_set(v)
                .iter()
                .all(|w| self.values.get(w).is_none_or(|&y| y >= x - epsilon()))
        })
    }

    /// `f(♭V) = f(V)` wherever both are defined.
    pub fn is_flat_constant(&self, flat: &Selector) -> bool {
        self.values.iter().all(|(&v, &x)| {
            self.values
                .get(&flat.apply(v))
                .is_none_or(|&y| (x - y).abs() <= epsilon())
        })
    }

    pub fn restrict_to(&self, poset: &ContextPoset, v: ContextId) -> Self {
        Self {
            values: poset
                .down_set(v)
                .iter()
                .map(|w| (*w, self.at(*w)))
                .collect(),
        }
    }

    pub fn approx_eq(&self, other: &Self) -> bool {
        self.values.len() == other.values.len()
            && self
                .values
                .iter()
                .all(|(v, x)| other.get(*v).is_some_and(|y| (x - y).abs() <= epsilon()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MeasureKind {
    /// Value at `V` depends on `S(V)` only.
    Presheaf,
    /// Value at `V` depends on `S(♭V)` only and is `♭`-constant.
    JSheaf,
    /// Presheaf measure obtained from a j-measure by evaluating at `♭V`.
    Lifted,
}

type EvalFn = dyn Fn(&ContextPoset, ContextId, &ClopenSub) -> f64 + Send + Sync;

/// Evaluator-backed measure: `eval(V, S)` is the value of the section
/// `μ(S)` at `V`.
#[derive(Clone)]
pub struct Measure {
    name: String,
    kind: MeasureKind,
    selector: Option<Selector>,
    source: Option<DensityMatrix>,
    eval: Arc<EvalFn>,
}

impl fmt::Debug for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Measure({}, {:?})", self.name, self.kind)
    }
}

impl Measure {
    pub fn new(
        name: impl Into<String>,
        kind: MeasureKind,
        selector: Option<Selector>,
        eval: impl Fn(&ContextPoset, ContextId, &ClopenSub) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            kind,
            selector,
            source: None,
            eval: Arc::new(eval),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> MeasureKind {
        self.kind
    }

    pub fn selector(&self) -> Option<&Selector> {
        self.selector.as_ref()
    }

    pub fn source(&self) -> Option<&DensityMatrix> {
        self.source.as_ref()
    }

    pub fn value(&self, poset: &ContextPoset, v: ContextId, s: &ClopenSub) -> f64 {
        (self.eval)(poset, v, s)
    }

    /// `μ(S)` over the domain of `S`.
    pub fn section(&self, poset: &ContextPoset, s: &ClopenSub) -> OrderReversingSection {
        OrderReversingSection {
            values: s.domain().map(|v| (v, self.value(poset, v, s))).collect(),
        }
    }
}

/// `μ^ρ(S)_V = tr(ρ P_{S(V)})`, or for the j-sheaf kind `tr(ρ P_{S(♭V)})`.
pub fn measure_from_state(
    rho: &DensityMatrix,
    kind: MeasureKind,
    flat: Option<&Selector>,
) -> Measure {
    let state = rho.clone();
    let mut m = match (kind, flat) {
        (MeasureKind::Presheaf, _) | (_, None) => {
            Measure::new("mu^rho", MeasureKind::Presheaf, None, move |_, v, s| {
                trace_pairing(&state, s.at(v)).unwrap_or(f64::NAN)
            })
        }
        (_, Some(flat)) => {
            let f = flat.clone();
            Measure::new(
                "mu^rho_j",
                MeasureKind::JSheaf,
                Some(flat.clone()),
                move |_, v, s| trace_pairing(&state, s.at(f.apply(v))).unwrap_or(f64::NAN),
            )
        }
    };
    m.source = Some(rho.clone());
    m
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct MeasureReport {
    pub normalization: bool,
    pub modularity: bool,
    pub order_reversal: bool,
    pub locality: bool,
    pub flat_constancy: Option<bool>,
    pub violations: Vec<String>,
}

impl MeasureReport {
    pub fn passed(&self) -> bool {
        self.normalization
            && self.modularity
            && self.order_reversal
            && self.locality
            && self.flat_constancy.unwrap_or(true)
    }
}

/// Axiom checks on sample clopens: normalization, modularity within `4ε`
/// (all pairs up to 16 samples, a fixed spread of pairs beyond), order
/// reversal, locality (`S(V)` for presheaf measures, `S(♭V)` otherwise) and
/// `♭`-constancy for j-measures.
pub fn validate_measure(
    mu: &Measure,
    poset: &ContextPoset,
    samples: &[ClopenSub],
) -> MeasureReport {
    let mut rep = MeasureReport {
        normalization: true,
        modularity: true,
        order_reversal: true,
        locality: true,
        flat_constancy: None,
        violations: Vec::new(),
    };
    let top = mu.section(poset, &ClopenSub::top(poset));
    for v in poset.ids() {
        if (top.at(v) - 1.0).abs() > epsilon() {
            rep.normalization = false;
            rep.violations.push(format!("μ(Σ) = {} at {v}", top.at(v)));
        }
    }
    let sections: Vec<OrderReversingSection> =
        samples.iter().map(|s| mu.section(poset, s)).collect();

    let n = samples.len();
    let pairs: Vec<(usize, usize)> = if n <= 16 {
        (0..n).flat_map(|i| (i..n).map(move |k| (i, k))).collect()
    } else {
        (0..n)
            .flat_map(|i| [(i, (i * 7 + 3) % n), (i, (i * 13 + 5) % n)])
            .collect()
    };
    for (i, k) in pairs {
        let (Ok(join), Ok(meet)) = (samples[i].join(&samples[k]), samples[i].meet(&samples[k]))
        else {
            continue;
        };
        let (sj, sm) = (mu.section(poset, &join), mu.section(poset, &meet));
        for v in samples[i].domain() {
            let lhs = sj.at(v) + sm.at(v);
            let rhs = sections[i].at(v) + sections[k].at(v);
            if (lhs - rhs).abs() > 4.0 * epsilon() {
                rep.modularity = false;
                rep.violations
                    .push(format!("modularity fails at {v} for samples {i},{k}"));
            }
        }
    }

    for (i, s) in sections.iter().enumerate() {
        if !s.is_order_reversing(poset) {
            rep.order_reversal = false;
            rep.violations
                .push(format!("sample {i} is not order reversing"));
        }
    }

    let flat = mu
        .selector
        .clone()
        .unwrap_or_else(|| Selector::identity(poset));
    let local_at = |v: ContextId| match mu.kind {
        MeasureKind::Presheaf => v,
        MeasureKind::JSheaf | MeasureKind::Lifted => flat.apply(v),
    };
    for i in 0..n {
        for k in i + 1..n {
            for v in samples[i].domain() {
                let w = local_at(v);
                if samples[k].get(w).is_some()
                    && samples[i].at(w) == samples[k].at(w)
                    && (sections[i].at(v) - sections[k].at(v)).abs() > epsilon()
                {
                    rep.locality = false;
                    rep.violations
                        .push(format!("value at {v} not determined by S({w})"));
                }
            }
        }
    }

    if mu.kind == MeasureKind::JSheaf {
        let ok = sections.iter().all(|s| s.is_flat_constant(&flat));
        rep.flat_constancy = Some(ok);
        if !ok {
            rep.violations
                .push("j-measure section not ♭-constant".into());
        }
    }
    rep.violations.sort();
    rep.violations.dedup();
    rep
}

/// `min_V tr(ρ δ(Ê[A ∈ Δ])_V)` over the poset.
pub fn born_probability_presheaf(
    a: &ComplexMatrix,
    delta: &BorelSelection,
    rho: &DensityMatrix,
    poset: &ContextPoset,
) -> Result<f64> {
    let e = spectral_projection(a, delta)?;
    poset.ids().try_fold(1.0f64, |m, v| {
        Ok(m.min(trace_pairing(rho, &daseinize(&e, poset.context(v))?)?))
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct BornJ {
    /// `min_V tr(ρ δ_j(Ê)_V)`.
    pub value: f64,
    /// `Ê` lies in some selected context, so `value` is the Born probability.
    pub exact: bool,
    /// `tr(ρÊ)`, for comparison.
    pub born: f64,
}

/// Born probability through the j-sheaf: exact for selected projections, an
/// upper bound otherwise.
pub fn born_probability_j(
    a: &ComplexMatrix,
    delta: &BorelSelection,
    rho: &DensityMatrix,
    flat: &Selector,
    poset: &ContextPoset,
) -> Result<BornJ> {
    let e = spectral_projection(a, delta)?;
    born_j_for_projection(&e, rho, flat, poset)
}

pub fn born_j_for_projection(
    e: &Projection,
    rho: &DensityMatrix,
    flat: &Selector,
    poset: &ContextPoset,
) -> Result<BornJ> {
    let value = poset.ids().try_fold(1.0f64, |m, v| {
        Ok::<f64, Error>(m.min(trace_pairing(
            rho,
            &daseinize(e, poset.context(flat.apply(v)))?,
        )?))
    })?;
    let exact = flat
        .fixpoints()
        .iter()
        .any(|&w| poset.context(w).mask_of(e).is_some());
    Ok(BornJ {
        value,
        exact,
        born: trace_pairing(rho, e)?,
    })
}

/// `μ̃_j`: at `V`, a j-clopen over `↓V` goes to its measure section.
#[derive(Clone, Debug)]
pub struct MeasureMorphism {
    measure: Measure,
}

pub fn internalize_measure(mu: &Measure) -> MeasureMorphism {
    MeasureMorphism {
        measure: mu.clone(),
    }
}

impl MeasureMorphism {
    pub fn apply(
        &self,
        poset: &ContextPoset,
        v: ContextId,
        s: &ClopenSub,
    ) -> OrderReversingSection {
        self.measure.section(poset, &s.restrict_to(poset, v))
    }

    /// Restrict-then-evaluate against evaluate-then-restrict on every edge.
    pub fn check_naturality(&self, poset: &ContextPoset, samples: &[ClopenSub]) -> Result<()> {
        for s in samples {
            for v in s.domain() {
                let here = self.apply(poset, v, s);
                for &w in poset.down_set(v) {
                    if !here
                        .restrict_to(poset, w)
                        .approx_eq(&self.apply(poset, w, s))
                    {
                        return Err(Error::NaturalityViolation(format!(
                            "{} at {v} restricted to {w}",
                            self.measure.name
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// `λ^r : h ↦ {V′ | h(V′) ≥ r − ε}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThresholdMorphism {
    pub r: f64,
}

impl ThresholdMorphism {
    pub fn new(r: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&r) {
            return Err(Error::InvalidLevel(r));
        }
        Ok(Self { r })
    }

    /// Threshold without range validation, for negative controls.
    pub fn unchecked(r: f64) -> Self {
        Self { r }
    }

    pub fn apply(
        &self,
        poset: &ContextPoset,
        flat: &Selector,
        v: ContextId,
        h: &OrderReversingSection,
    ) -> Result<Sieve> {
        let members = poset
            .down_set(v)
            .iter()
            .copied()
            .filter(|w| h.at(*w) >= self.r - epsilon());
        let sieve = Sieve::new(poset, v, members)
            .map_err(|e| Error::NotInOmegaJ(format!("threshold image: {e}")))?;
        if !is_in_omega_j(poset, flat, &sieve) {
            return Err(Error::NotInOmegaJ(format!("threshold image at {v}")));
        }
        Ok(sieve)
    }
}

/// `𝕋^{μ_j}(V) = {S | μ_j(S)(V′) ≥ 1 − ε for all V′ ⊆ V}`.
pub fn canonical_truth_object(mu: &Measure) -> TruthObject {
    let m = mu.clone();
    TruthObject::new(
        format!("T^({})", mu.name()),
        TruthObjectKind::CanonicalMeasure,
        move |poset, v, s| {
            poset
                .down_set(v)
                .iter()
                .all(|&w| m.value(poset, w, s) >= 1.0 - epsilon())
        },
    )
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct FactorizationReport {
    /// `τ^{ρ,r}_j = λ^r ∘ μ̃^ρ_j`.
    pub rho_r_triangle: bool,
    /// `τ^{μ_j} = λ^1 ∘ μ̃_j`.
    pub canonical_triangle: bool,
    pub checked: usize,
    pub mismatches: Vec<String>,
}

impl FactorizationReport {
    pub fn passed(&self) -> bool {
        self.rho_r_triangle && self.canonical_triangle
    }
}

/// Compares characteristic sieves with threshold-after-measure sieves for
/// every j-clopen over every `↓V`.
pub fn check_factorizations(
    rho: &DensityMatrix,
    r: f64,
    mu: &Measure,
    flat: &Selector,
    poset: &ContextPoset,
    bound: usize,
) -> Result<FactorizationReport> {
    check_factorizations_with(rho, r, mu, ThresholdMorphism::new(r)?, flat, poset, bound)
}

/// As [`check_factorizations`] but with the `ρ,r` triangle using the given
/// threshold morphism instead of `λ^r`.
pub fn check_factorizations_with(
    rho: &DensityMatrix,
    r: f64,
    mu: &Measure,
    lambda: ThresholdMorphism,
    flat: &Selector,
    poset: &ContextPoset,
    bound: usize,
) -> Result<FactorizationReport> {
    let mu_rho = measure_from_state(rho, MeasureKind::JSheaf, Some(flat));
    let t_rho = TruthObject::rho_r(rho, r)?;
    let t_mu = canonical_truth_object(mu);
    let (m_rho, m_mu) = (internalize_measure(&mu_rho), internalize_measure(mu));
    let one = ThresholdMorphism::new(1.0)?;
    let mut rep = FactorizationReport {
        rho_r_triangle: true,
        canonical_triangle: true,
        ..Default::default()
    };
    for v in poset.ids() {
        for s in enumerate_j_clopens(poset, flat, Some(v), bound)? {
            rep.checked += 1;
            let chi = |t: &TruthObject| {
                Sieve::new(
                    poset,
                    v,
                    poset
                        .down_set(v)
                        .iter()
                        .copied()
                        .filter(|&w| t.contains(poset, w, &s.restrict_to(poset, w))),
                )
            };
            let lhs = chi(&t_rho)?;
            let rhs = lambda.apply(poset, flat, v, &m_rho.apply(poset, v, &s))?;
            if lhs != rhs {
                rep.rho_r_triangle = false;
                rep.mismatches
                    .push(format!("ρ,r triangle at {v}: {lhs:?} vs {rhs:?}"));
            }
            let lhs = chi(&t_mu)?;
            let rhs = one.apply(poset, flat, v, &m_mu.apply(poset, v, &s))?;
            if lhs != rhs {
                rep.canonical_triangle = false;
                rep.mismatches
                    .push(format!("canonical triangle at {v}: {lhs:?} vs {rhs:?}"));
            }
        }
    }
    Ok(rep)
}

/// Largest presheaf lift of a j-measure: `μ(S)_V = μ_j(♭*S)(♭V)`.
pub fn lift_measure_max(mu: &Measure, flat: &Selector) -> Measure {
    let (m, f) = (mu.clone(), flat.clone());
    let mut lifted = Measure::new(
        format!("max-lift({})", mu.name()),
        MeasureKind::Lifted,
        Some(flat.clone()),
        move |poset, v, s| m.value(poset, f.apply(v), s),
    );
    lifted.source = mu.source.clone();
    lifted
}

/// `h_γ(W) = γ_W(W)` on selected contexts, from a family of sections
/// `γ_V` over `↓V`.
pub fn h_from_gamma(
    gamma: &[OrderReversingSection],
    flat: &Selector,
    poset: &ContextPoset,
) -> Result<OrderReversingSection> {
    check_gamma(gamma, flat, poset)?;
    Ok(OrderReversingSection {
        values: flat
            .fixpoints()
            .into_iter()
            .map(|w| (w, gamma[w.0].at(w)))
            .collect(),
    })
}

/// `γ_V(V′) = h(♭V′)`.
pub fn gamma_from_h(
    h: &OrderReversingSection,
    flat: &Selector,
    poset: &ContextPoset,
) -> Result<Vec<OrderReversingSection>> {
    if !h.is_order_reversing(poset) {
        return Err(Error::NotGlobalElement("h is not order reversing".into()));
    }
    poset
        .ids()
        .map(|v| {
            poset
                .down_set(v)
                .iter()
                .map(|&w| {
                    h.get(flat.apply(w))
                        .map(|x| (w, x))
                        .ok_or_else(|| Error::NotGlobalElement(format!("h undefined at ♭{w}")))
                })
                .collect::<Result<BTreeMap<_, _>>>()
                .map(OrderReversingSection::new)
        })
        .collect()
}

/// Naturality, order reversal and `♭`-constancy of a global element of
/// `[0,1]^⪰_j`.
pub fn check_gamma(
    gamma: &[OrderReversingSection],
    flat: &Selector,
    poset: &ContextPoset,
) -> Result<()> {
    if gamma.len() != poset.len() {
        return Err(Error::NotGlobalElement(
            "one section per context required".into(),
        ));
    }
    for v in poset.ids() {
        let g = &gamma[v.0];
        if !g.is_order_reversing(poset) || !g.is_flat_constant(flat) {
            return Err(Error::NotGlobalElement(format!("section at {v}")));
        }
        for &w in poset.down_set(v) {
            if !g.restrict_to(poset, w).approx_eq(&gamma[w.0]) {
                return Err(Error::NotGlobalElement(format!(
                    "section at {v} restricted to {w}"
                )));
            }
        }
    }
    Ok(())
}

/// Diagnostic only: least-squares Hermitian `X` with `tr(XP) ≈ value` over
/// the given pairs. Says nothing about uniqueness of a state behind a
/// measure.
pub fn fit_density_diagnostic(data: &[(Projection, f64)]) -> Result<ComplexMatrix> {
    let Some((first, _)) = data.first() else {
        return Err(Error::MalformedMatrix);
    };
    let n = first.dim();
    // X = Σ x_k B_k over the real basis of Hermitian matrices
    let mut basis = Vec::new();
    for i in 0..n {
        for j in i..n {
            let mut re = DMatrix::<Complex64>::zeros(n, n);
            re[(i, j)] = Complex64::new(1.0, 0.0);
            re[(j, i)] = Complex64::new(1.0, 0.0);
            basis.push(re);
            if i != j {
                let mut im = DMatrix::<Complex64>::zeros(n, n);
                im[(i, j)] = Complex64::new(0.0, -1.0);
                im[(j, i)] = Complex64::new(0.0, 1.0);
                basis.push(im);
            }
        }
    }
    let a = DMatrix::<f64>::from_fn(data.len(), basis.len(), |r, k| {
        (&basis[k] * data[r].0.matrix().inner()).trace().re
    });
    let b = DVector::<f64>::from_iterator(data.len(), data.iter().map(|(_, y)| *y));
    let x = a
        .svd(true, true)
        .solve(&b, 1e-12)
        .map_err(|_| Error::MalformedMatrix)?;
    let m = basis
        .iter()
        .zip(x.iter())
        .fold(DMatrix::<Complex64>::zeros(n, n), |acc, (bk, &xk)| {
            acc + bk * Complex64::new(xk, 0.0)
        });
    ComplexMatrix::from_dmatrix(m)
}

/// Samples of j-clopens for the whole poset, for validation.
pub fn j_clopen_samples(
    poset: &ContextPoset,
    flat: &Selector,
    bound: usize,
) -> Result<Vec<ClopenSub>> {
    enumerate_j_clopens(poset, flat, None, bound)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{pauli_x, pauli_z, QubitFixture};
    use crate::semantics::{daseinize_j, enumerate_presheaf_clopens};
    use crate::tolerance::DEFAULT_MAX_ENUM;

    #[test]
    fn measure_from_state_examples() {
        let f = QubitFixture::new();
        let p = &f.poset;
        let mu = measure_from_state(&f.rho_x, MeasureKind::Presheaf, None);
        let top = mu.section(p, &ClopenSub::top(p));
        assert!(p.ids().all(|v| top.at(v) == 1.0));
        let mix = measure_from_state(&f.rho_mix, MeasureKind::Presheaf, None);
        for s in enumerate_presheaf_clopens(p, None, DEFAULT_MAX_ENUM).unwrap() {
            for v in p.ids() {
                if s.at(v).rank() == 1 {
                    assert!((mix.value(p, v, &s) - 0.5).abs() < 1e-12);
                }
            }
        }
        let muj = measure_from_state(&f.rho0, MeasureKind::JSheaf, Some(&f.flat));
        let dj = daseinize_j(&f.p_z, &f.flat, p).unwrap();
        assert!(p.ids().all(|v| muj.value(p, v, &dj) == 1.0));
    }

    #[test]
    fn validation_examples() {
        let f = QubitFixture::new();
        let p = &f.poset;
        let samples = enumerate_presheaf_clopens(p, None, DEFAULT_MAX_ENUM).unwrap();
        let mu = measure_from_state(&f.rho_x, MeasureKind::Presheaf, None);
        assert!(validate_measure(&mu, p, &samples).passed());
        let zero = Measure::new("zero", MeasureKind::Presheaf, None, |_, _, _| 0.0);
        assert!(!validate_measure(&zero, p, &samples).normalization);
        let bottom = p.bottom();
        let inverted = Measure::new("inverted", MeasureKind::Presheaf, None, move |_, v, s| {
            let t = s.at(v).rank() as f64 / 2.0;
            if v == bottom {
                t / 2.0
            } else {
                t
            }
        });
        assert!(!validate_measure(&inverted, p, &samples).order_reversal);
    }

    #[test]
    fn born_examples() {
        let f = QubitFixture::new();
        let p = &f.poset;
        let up = BorelSelection::Values(vec![1.0]);
        let all = BorelSelection::interval(-1.0, 1.0).unwrap();
        assert_eq!(
            born_probability_presheaf(&pauli_z(), &up, &f.rho0, p).unwrap(),
            1.0
        );
        assert!(
            (born_probability_presheaf(&pauli_z(), &up, &f.rho_mix, p).unwrap() - 0.5).abs()
                < 1e-12
        );
        assert_eq!(
            born_probability_presheaf(&pauli_z(), &all, &f.rho_x, p).unwrap(),
            1.0
        );

        let b = born_probability_j(&pauli_z(), &up, &f.rho_mix, &f.flat, p).unwrap();
        assert!(b.exact && (b.value - 0.5).abs() < 1e-12);
        let b = born_probability_j(&pauli_x(), &up, &f.rho_mix, &f.flat, p).unwrap();
        assert!(!b.exact && b.value == 1.0 && (b.born - 0.5).abs() < 1e-12);
        let id = f.identity_selector();
        for rho in [&f.rho0, &f.rho_x, &f.rho_mix] {
            let bj = born_probability_j(&pauli_x(), &up, rho, &id, p).unwrap();
            let bp = born_probability_presheaf(&pauli_x(), &up, rho, p).unwrap();
            assert_eq!(bj.value, bp);
        }
    }

    #[test]
    fn threshold_examples() {
        let f = QubitFixture::new();
        let p = &f.poset;
        let muj = measure_from_state(&f.rho_mix, MeasureKind::JSheaf, Some(&f.flat));
        let dj = daseinize_j(&f.p_z, &f.flat, p).unwrap();
        let m = internalize_measure(&muj);
        let h = m.apply(p, f.vz, &dj);
        let zero = ThresholdMorphism::new(0.0).unwrap();
        assert!(zero.apply(p, &f.flat, f.vz, &h).unwrap().is_top(p));
        let one = ThresholdMorphism::new(1.0).unwrap();
        let s = one.apply(p, &f.flat, f.vz, &h).unwrap();
        assert_eq!(
            s.members().iter().copied().collect::<Vec<_>>(),
            vec![p.bottom()]
        );
        let hx = m.apply(p, f.vx, &dj);
        assert!(one.apply(p, &f.flat, f.vx, &hx).unwrap().is_top(p));
    }

    #[test]
    fn canonical_truth_object_examples() {
        let f = QubitFixture::new();
        let p = &f.poset;
        let muj = measure_from_state(&f.rho0, MeasureKind::JSheaf, Some(&f.flat));
        let t = canonical_truth_object(&muj);
        let t1 = TruthObject::rho_r(&f.rho0, 1.0).unwrap();
        for v in p.ids() {
            assert!(t.contains(p, v, &ClopenSub::top(p).restrict_to(p, v)));
            for s in enumerate_j_clopens(p, &f.flat, Some(v), DEFAULT_MAX_ENUM).unwrap() {
                // T^{ρ,1} as a sheaf: membership at every V′ ⊆ V
                let expected = p
                    .down_set(v)
                    .iter()
                    .all(|&w| t1.contains(p, w, &s.restrict_to(p, w)));
                assert_eq!(t.contains(p, v, &s), expected);
                if v == f.vz {
                    let direct = f.p_z.leq(s.at(f.vz)).unwrap() && s.at(p.bottom()).is_identity();
                    assert_eq!(t.contains(p, v, &s), direct);
                }
            }
        }
    }

    #[test]
    fn factorization_examples() {
        let f = QubitFixture::new();
        let p = &f.poset;
        for (rho, r) in [(&f.rho0, 1.0), (&f.rho_mix, 0.5), (&f.rho_mix, 1.0)] {
            let muj = measure_from_state(rho, MeasureKind::JSheaf, Some(&f.flat));
            assert!(
                check_factorizations(rho, r, &muj, &f.flat, p, DEFAULT_MAX_ENUM)
                    .unwrap()
                    .passed()
            );
        }
        let muj = measure_from_state(&f.rho_mix, MeasureKind::JSheaf, Some(&f.flat));
        let bad = check_factorizations_with(
            &f.rho_mix,
            0.5,
            &muj,
            ThresholdMorphism::unchecked(0.6),
            &f.flat,
            p,
            DEFAULT_MAX_ENUM,
        )
        .unwrap();
        assert!(!bad.rho_r_triangle);
    }

    #[test]
    fn lift_examples() {
        let f = QubitFixture::new();
        let p = &f.poset;
        let id = f.identity_selector();
        let mu_id = measure_from_state(&f.rho_x, MeasureKind::JSheaf, Some(&id));
        let lifted_id = lift_measure_max(&mu_id, &id);
        let samples = enumerate_presheaf_clopens(p, None, DEFAULT_MAX_ENUM).unwrap();
        for s in &samples {
            assert!(mu_id.section(p, s).approx_eq(&lifted_id.section(p, s)));
        }
        let muj = measure_from_state(&f.rho_x, MeasureKind::JSheaf, Some(&f.flat));
        let lifted = lift_measure_max(&muj, &f.flat);
        assert!(validate_measure(&lifted, p, &samples).passed());
        let s = samples
            .iter()
            .find(|s| s.at(p.bottom()).is_identity())
            .unwrap();
        assert_eq!(lifted.value(p, f.vx, s), 1.0);
        let plain = measure_from_state(&f.rho_x, MeasureKind::Presheaf, None);
        for s in &samples {
            for v in p.ids() {
                assert!(lifted.value(p, v, s) >= plain.value(p, v, s) - 1e-12);
            }
        }
        for s in enumerate_j_clopens(p, &f.flat, None, DEFAULT_MAX_ENUM).unwrap() {
            assert!(lifted.section(p, &s).approx_eq(&muj.section(p, &s)));
        }
    }

    #[test]
    fn gamma_h_round_trip() {
        let f = QubitFixture::new();
        let p = &f.poset;
        let h = OrderReversingSection::new([(p.bottom(), 0.9), (f.vz, 0.4)].into_iter().collect());
        let gamma = gamma_from_h(&h, &f.flat, p).unwrap();
        assert_eq!(gamma[f.vx.0].at(f.vx), 0.9);
        assert_eq!(h_from_gamma(&gamma, &f.flat, p).unwrap(), h);
    }

    #[test]
    fn naturality_of_internalized_measure() {
        let f = QubitFixture::new();
        let p = &f.poset;
        let samples = enumerate_j_clopens(p, &f.flat, None, DEFAULT_MAX_ENUM).unwrap();
        let muj = measure_from_state(&f.rho_x, MeasureKind::JSheaf, Some(&f.flat));
        internalize_measure(&muj)
            .check_naturality(p, &samples)
            .unwrap();
        // value depends on the size of the domain, not on S(♭V)
        let global = Measure::new("domain-size", MeasureKind::JSheaf, None, |_, _, s| {
            1.0 / s.domain().count() as f64
        });
        assert!(matches!(
            internalize_measure(&global).check_naturality(p, &samples),
            Err(Error::NaturalityViolation(_))
        ));
    }

    #[test]
    fn diagnostic_fit_recovers_state() {
        let f = QubitFixture::new();
        let p = &f.poset;
        let data: Vec<(Projection, f64)> = p
            .ids()
            .flat_map(|v| p.context(v).atoms().to_vec())
            .map(|a| {
                let t = trace_pairing(&f.rho_x, &a).unwrap();
                (a, t)
            })
            .chain(std::iter::once((Projection::identity(2), 1.0)))
            .collect();
        let x = fit_density_diagnostic(&data).unwrap();
        for (a, t) in &data {
            assert!(((&x * a.matrix()).trace().re - t).abs() < 1e-9);
        }
    }
}
