//! The product site of contexts and probability levels.
//!
//! A sieve on `(V, r)` is stored as one level down-set per context below
//! `V`; since every down-set of `[0, r]` is empty, `[0,t]` or `[0,t)`, this is
//! exact. Clopen subsheaves are per-context step functions of the level.

use std::collections::BTreeMap;
use std::fmt;

use crate::context::{ContextId, ContextPoset, Selector};
use crate::error::{Error, Result};
use crate::interval::{DownSet, Piece, StepFn};
use crate::measure::{measure_from_state, MeasureKind, OrderReversingSection};
use crate::operator::{trace_pairing, DensityMatrix, Projection};
use crate::semantics::{enumerate_j_clopens, ClopenSub, TruthObject};
use crate::tolerance::epsilon;

/// An object `(V, r)` of the product site.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProductPoint {
    pub context: ContextId,
    pub level: f64,
}

impl fmt::Display for ProductPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.context, self.level)
    }
}

impl ProductPoint {
    pub fn new(context: ContextId, level: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&level) {
            return Err(Error::InvalidLevel(level));
        }
        Ok(Self { context, level })
    }

    pub fn leq(&self, poset: &ContextPoset, other: &Self) -> bool {
        poset.leq(self.context, other.context) && self.level <= other.level
    }
}

/// Sieve on a product point.
#[derive(Clone, PartialEq)]
pub struct BoldSieve {
    base: ProductPoint,
    fibers: BTreeMap<ContextId, DownSet>,
}

impl fmt::Debug for BoldSieve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ", self.base)?;
        f.debug_map().entries(self.fibers.iter()).finish()
    }
}

impl BoldSieve {
    /// Contexts of `↓V` missing from `fibers` get the empty fiber.
    pub fn new(
        poset: &ContextPoset,
        base: ProductPoint,
        mut fibers: BTreeMap<ContextId, DownSet>,
    ) -> Result<Self> {
        let below = poset.down_set(base.context);
        if let Some(&w) = fibers.keys().find(|w| !below.contains(w)) {
            return Err(Error::NotASieve(
                base.context,
                format!("{w} is not below the base"),
            ));
        }
        for &w in below {
            let d = *fibers.entry(w).or_insert(DownSet::Empty);
            if !d.leq(&DownSet::Closed(base.level)) {
                return Err(Error::NotASieve(
                    base.context,
                    format!("fiber {d} at {w} exceeds the base level"),
                ));
            }
        }
        for &w in below {
            for &u in poset.down_set(w) {
                if !fibers[&w].leq(&fibers[&u]) {
                    return Err(Error::NotASieve(
                        base.context,
                        format!("fiber at {u} smaller than at {w}"),
                    ));
                }
            }
        }
        Ok(Self { base, fibers })
    }

    pub fn top(poset: &ContextPoset, base: ProductPoint) -> Self {
        let fibers = poset
            .down_set(base.context)
            .iter()
            .map(|&w| (w, DownSet::Closed(base.level)))
            .collect();
        Self { base, fibers }
    }

    pub fn empty(poset: &ContextPoset, base: ProductPoint) -> Self {
        let fibers = poset
            .down_set(base.context)
            .iter()
            .map(|&w| (w, DownSet::Empty))
            .collect();
        Self { base, fibers }
    }

    pub fn base(&self) -> ProductPoint {
        self.base
    }

    pub fn fiber(&self, w: ContextId) -> DownSet {
        self.fibers.get(&w).copied().unwrap_or(DownSet::Empty)
    }

    pub fn fibers(&self) -> &BTreeMap<ContextId, DownSet> {
        &self.fibers
    }

    pub fn contains(&self, pt: ProductPoint) -> bool {
        self.fibers
            .get(&pt.context)
            .is_some_and(|d| d.contains(pt.level))
    }

    pub fn leq(&self, other: &Self) -> bool {
        self.base == other.base && self.fibers.iter().all(|(w, d)| d.leq(&other.fiber(*w)))
    }

    pub fn meet(&self, other: &Self) -> Result<Self> {
        self.combine(other, DownSet::meet)
    }

    pub fn join(&self, other: &Self) -> Result<Self> {
        self.combine(other, DownSet::join)
    }

    fn combine(&self, other: &Self, f: impl Fn(&DownSet, &DownSet) -> DownSet) -> Result<Self> {
        if self.base != other.base {
            return Err(Error::BaseMismatch(self.base.context, other.base.context));
        }
        let fibers = self
            .fibers
            .iter()
            .map(|(&w, d)| (w, f(d, &other.fiber(w))))
            .collect();
        Ok(Self {
            base: self.base,
            fibers,
        })
    }

    /// `ω ∩ ↓(V′, r′)`.
    pub fn restrict(&self, poset: &ContextPoset, pt: ProductPoint) -> Result<Self> {
        if !pt.leq(poset, &self.base) {
            return Err(Error::NotIncluded {
                sub: pt.context,
                sup: self.base.context,
            });
        }
        let fibers = poset
            .down_set(pt.context)
            .iter()
            .map(|&w| (w, self.fiber(w).restrict(pt.level)))
            .collect();
        Ok(Self { base: pt, fibers })
    }
}

/// `ω` covers `(V, r)` iff it contains `(W, s)` for all `W ⊆ ♭V`, `s < r`.
pub fn covering_jbold(
    poset: &ContextPoset,
    flat: &Selector,
    pt: ProductPoint,
    sieve: &BoldSieve,
) -> Result<bool> {
    if sieve.base != pt {
        return Err(Error::BaseMismatch(pt.context, sieve.base.context));
    }
    let below = DownSet::open(pt.level)?;
    Ok(poset
        .down_set(flat.apply(pt.context))
        .iter()
        .all(|&w| below.leq(&sieve.fiber(w))))
}

/// Closure of `ω`: `(V′, r′)` is kept iff `ω` contains `(W, s)` for every
/// `W ⊆ ♭V′` and `s < r′`. The admissible `r′` form `[0, min_W sup ω(W)]`.
pub fn lt_jbold(poset: &ContextPoset, flat: &Selector, sieve: &BoldSieve) -> BoldSieve {
    let r = sieve.base.level;
    let fibers = poset
        .down_set(sieve.base.context)
        .iter()
        .map(|&v| {
            let t = poset
                .down_set(flat.apply(v))
                .iter()
                .map(|&w| sieve.fiber(w).sup())
                .fold(f64::INFINITY, f64::min);
            (v, DownSet::Closed(t.min(r)))
        })
        .collect();
    BoldSieve {
        base: sieve.base,
        fibers,
    }
}

pub fn is_in_omega_jbold(poset: &ContextPoset, flat: &Selector, sieve: &BoldSieve) -> bool {
    lt_jbold(poset, flat, sieve) == *sieve
}

/// Every sieve on `base` whose fibers are `∅` or `[0,t]`, `[0,t)` with `t`
/// drawn from `levels` (capped at the base level).
pub fn enumerate_bold_sieves(
    poset: &ContextPoset,
    base: ProductPoint,
    levels: &[f64],
    bound: usize,
) -> Result<Vec<BoldSieve>> {
    let below = poset.down_set(base.context);
    if below.len() > bound {
        return Err(Error::EnumerationTooLarge {
            size: below.len(),
            bound,
        });
    }
    let mut cands = vec![DownSet::Empty];
    for &t in levels.iter().filter(|&&t| (0.0..=base.level).contains(&t)) {
        cands.push(DownSet::Closed(t));
        cands.push(DownSet::open(t)?);
    }
    cands.push(DownSet::Closed(base.level));
    cands.push(DownSet::open(base.level)?);
    cands.sort_by(DownSet::cmp_total);
    cands.dedup();

    let mut ordered = below.to_vec();
    ordered.sort_by_key(|&v| (poset.down_set(v).len(), v));
    let mut out = Vec::new();
    fn go(
        poset: &ContextPoset,
        ordered: &[ContextId],
        cands: &[DownSet],
        k: usize,
        cur: &mut BTreeMap<ContextId, DownSet>,
        base: ProductPoint,
        out: &mut Vec<BoldSieve>,
    ) {
        let Some(&v) = ordered.get(k) else {
            out.push(BoldSieve {
                base,
                fibers: cur.clone(),
            });
            return;
        };
        for d in cands {
            if cur.iter().all(|(&w, e)| !poset.leq(w, v) || d.leq(e)) {
                cur.insert(v, *d);
                go(poset, ordered, cands, k + 1, cur, base, out);
                cur.remove(&v);
            }
        }
    }
    go(
        poset,
        &ordered,
        &cands,
        0,
        &mut BTreeMap::new(),
        base,
        &mut out,
    );
    Ok(out)
}

/// Clopen subobject of the spectral sheaf on the product site: for each
/// context of a down-closed domain, a step function of the level on
/// `[0, end]` with values in `𝒫(♭V)`.
#[derive(Clone, PartialEq)]
pub struct StepClopen {
    end: f64,
    steps: BTreeMap<ContextId, StepFn<Projection>>,
}

impl fmt::Debug for StepClopen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ranks: BTreeMap<_, _> = self
            .steps
            .iter()
            .map(|(v, s)| (*v, s.map(|p| p.rank())))
            .collect();
        f.debug_map().entries(ranks.iter()).finish()
    }
}

impl StepClopen {
    /// Checked against every structural and sheaf invariant.
    pub fn new(
        poset: &ContextPoset,
        flat: &Selector,
        steps: BTreeMap<ContextId, StepFn<Projection>>,
    ) -> Result<Self> {
        let s = Self::from_steps_unchecked(steps)?;
        s.check_structure(poset, flat)
            .map_err(Error::NotASubpresheaf)?;
        if !s.is_jbold_sheaf(poset, flat) {
            return Err(Error::NotJSheaf(
                "step data is not a sheaf on the product site".into(),
            ));
        }
        Ok(s)
    }

    /// Only requires a common level range.
    pub fn from_steps_unchecked(steps: BTreeMap<ContextId, StepFn<Projection>>) -> Result<Self> {
        let end = steps.values().next().map_or(1.0, StepFn::end);
        if steps.values().any(|s| s.end() != end) {
            return Err(Error::MalformedStep(
                "contexts disagree on the level range".into(),
            ));
        }
        Ok(Self { end, steps })
    }

    /// The full subobject on `↓(V, r)` (or the whole site for `None`).
    pub fn top(poset: &ContextPoset, base: Option<ProductPoint>) -> Self {
        let (ctxs, end) = match base {
            Some(pt) => (poset.down_set(pt.context).to_vec(), pt.level),
            None => (poset.ids().collect(), 1.0),
        };
        let one = Projection::identity(poset.dim());
        let steps = ctxs
            .into_iter()
            .map(|v| (v, StepFn::constant(one.clone(), end).unwrap()))
            .collect();
        Self { end, steps }
    }

    pub fn end(&self) -> f64 {
        self.end
    }

    pub fn steps(&self) -> &BTreeMap<ContextId, StepFn<Projection>> {
        &self.steps
    }

    pub fn step(&self, v: ContextId) -> &StepFn<Projection> {
        &self.steps[&v]
    }

    pub fn value(&self, v: ContextId, r: f64) -> Result<&Projection> {
        self.steps
            .get(&v)
            .ok_or_else(|| Error::UnknownContext(v.to_string()))?
            .value_at(r)
    }

    /// Every breakpoint used by some context.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut b: Vec<f64> = self
            .steps
            .values()
            .flat_map(|s| s.breaks().iter().copied())
            .collect();
        b.sort_by(f64::total_cmp);
        b.dedup();
        b
    }

    /// One level inside every piece of the common refinement.
    fn sample_levels(&self) -> Vec<f64> {
        let b = self.breakpoints();
        let mut out = b.clone();
        out.extend(b.windows(2).map(|w| 0.5 * (w[0] + w[1])));
        out.sort_by(f64::total_cmp);
        out
    }

    /// Domain down-closed, values in `𝒫(♭V)`, antitone in the level, full
    /// at level 0, and a subpresheaf across inclusions at each level.
    pub fn check_structure(
        &self,
        poset: &ContextPoset,
        flat: &Selector,
    ) -> std::result::Result<(), String> {
        for &v in self.steps.keys() {
            if let Some(w) = poset
                .down_set(v)
                .iter()
                .find(|w| !self.steps.contains_key(w))
            {
                return Err(format!("domain not down-closed: {w} below {v} missing"));
            }
            let fv = poset.context(flat.apply(v));
            let step = &self.steps[&v];
            for (_, p) in step.pieces() {
                if fv.mask_of(p).is_none() {
                    return Err(format!("value at {v} outside the selected context"));
                }
            }
            if !step.point_values()[0].is_identity() {
                return Err(format!("value at ({v}, 0) is not full"));
            }
            let pieces = step.pieces();
            for w in pieces.windows(2) {
                if !w[1].1.leq(w[0].1).unwrap_or(false) {
                    return Err(format!("value at {v} increases with the level"));
                }
            }
        }
        for r in self.sample_levels() {
            for (&v, step) in &self.steps {
                let p = step.value_at(r).expect("in range");
                for &w in poset.down_set(v) {
                    let q = self.steps[&w].value_at(r).expect("in range");
                    if !p.leq(q).unwrap_or(false) {
                        return Err(format!(
                            "not a subpresheaf between {w} and {v} at level {r}"
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    /// Each level slice is a j-sheaf (equal values at `V` and `♭V`) and each
    /// context slice is a left-limit sheaf.
    pub fn is_jbold_sheaf(&self, _poset: &ContextPoset, flat: &Selector) -> bool {
        let one = Projection::identity(self.dim());
        self.steps.iter().all(|(&v, step)| {
            let fv = flat.apply(v);
            self.steps.get(&fv).is_some_and(|g| step.same_as(g)) && step.is_left_regular(&one)
        })
    }

    /// The unit `Q → 𝐚Q` is an isomorphism. On subobjects of the selected
    /// spectral sheaf its components are identities on atoms, so this asks
    /// that `Q` and `𝐚Q` pick the same atoms everywhere.
    pub fn unit_is_iso(&self, poset: &ContextPoset, flat: &Selector) -> bool {
        let a = self.sheafify(flat);
        let levels = self.sample_levels();
        self.steps.keys().all(|&v| {
            let ctx = poset.context(flat.apply(v));
            levels.iter().filter(|&&r| r > 0.0).all(|&r| {
                let q = ctx.mask_of(self.value(v, r).unwrap());
                let aq = ctx.mask_of(a.value(v, r).unwrap());
                q.is_some() && q == aq
            })
        })
    }

    fn dim(&self) -> usize {
        self.steps
            .values()
            .next()
            .map_or(0, |s| s.point_values()[0].dim())
    }

    /// Left-limit regularization per context.
    pub fn a_prob(&self) -> Self {
        let one = Projection::identity(self.dim());
        Self {
            end: self.end,
            steps: self
                .steps
                .iter()
                .map(|(&v, s)| (v, s.a_prob(&one)))
                .collect(),
        }
    }

    /// `(♭*Q)(V, r) = Q(♭V, r)`.
    pub fn flat_pullback(&self, flat: &Selector) -> Self {
        let steps = self
            .steps
            .keys()
            .map(|&v| (v, self.steps[&flat.apply(v)].clone()))
            .collect();
        Self {
            end: self.end,
            steps,
        }
    }

    /// `𝐚 = ♭* ∘ a_prob`.
    pub fn sheafify(&self, flat: &Selector) -> Self {
        self.a_prob().flat_pullback(flat)
    }

    /// `𝐚` computed in the other order, `a_prob ∘ ♭*`.
    pub fn sheafify_swapped(&self, flat: &Selector) -> Self {
        self.flat_pullback(flat).a_prob()
    }

    /// Restriction to `↓(V, r)`.
    pub fn restrict_to(&self, poset: &ContextPoset, pt: ProductPoint) -> Result<Self> {
        let steps = poset
            .down_set(pt.context)
            .iter()
            .map(|&w| {
                let s = self
                    .steps
                    .get(&w)
                    .ok_or_else(|| Error::UnknownContext(w.to_string()))?;
                Ok((w, s.truncate(pt.level)?))
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            end: pt.level,
            steps,
        })
    }

    pub fn same_as(&self, other: &Self) -> bool {
        self.end == other.end
            && self.steps.len() == other.steps.len()
            && self
                .steps
                .iter()
                .all(|(v, s)| other.steps.get(v).is_some_and(|o| s.same_as(o)))
    }

    pub fn leq(&self, other: &Self) -> bool {
        self.steps.iter().all(|(v, s)| {
            other.steps.get(v).is_some_and(|o| {
                s.zip_with(o, |a, b| a.leq(b).unwrap_or(false))
                    .is_ok_and(|z| z.point_values().iter().chain(z.open_values()).all(|&x| x))
            })
        })
    }

    pub fn meet(&self, other: &Self) -> Result<Self> {
        let mut steps = BTreeMap::new();
        for (&v, s) in &self.steps {
            let o = other
                .steps
                .get(&v)
                .ok_or_else(|| Error::UnknownContext(v.to_string()))?;
            let z = s.zip_with(o, |a, b| a.meet(b).expect("commuting"))?;
            steps.insert(v, z.normalize());
        }
        Ok(Self {
            end: self.end,
            steps,
        })
    }
}

/// `S ↦ π₁*S`: constant in the level, full at level 0.
pub fn inject_pi1(poset: &ContextPoset, flat: &Selector, s: &ClopenSub) -> Result<StepClopen> {
    s.check_j_sheaf(poset, flat).map_err(Error::NotJSheaf)?;
    let one = Projection::identity(poset.dim());
    let steps = s
        .values()
        .iter()
        .map(|(&v, p)| {
            let step = StepFn::left_closed_steps(vec![0.0, 1.0], one.clone(), vec![p.clone()])?;
            Ok((v, step.normalize()))
        })
        .collect::<Result<_>>()?;
    Ok(StepClopen { end: 1.0, steps })
}

/// Truth object of a state on the product site: `S ∈ 𝕋(V, r)` iff
/// `tr(ρ P_{S(V,r)}) ≥ r`.
#[derive(Clone, Debug)]
pub struct BoldTruthObject {
    rho: DensityMatrix,
}

pub fn truth_object_bold(rho: &DensityMatrix) -> BoldTruthObject {
    BoldTruthObject { rho: rho.clone() }
}

impl BoldTruthObject {
    pub fn state(&self) -> &DensityMatrix {
        &self.rho
    }

    pub fn contains(&self, pt: ProductPoint, s: &StepClopen) -> bool {
        s.value(pt.context, pt.level)
            .and_then(|p| trace_pairing(&self.rho, p))
            .is_ok_and(|t| t >= pt.level - epsilon())
    }
}

/// Global element of `Ω_𝐣`, stored as the fiber of `(V′, 1)` at `V′`; the
/// component at `(V, r)` cuts these down to `↓V` and `[0, r]`.
#[derive(Clone, Debug, PartialEq)]
pub struct BoldTruthValue {
    fibers: BTreeMap<ContextId, DownSet>,
}

impl BoldTruthValue {
    pub fn fibers(&self) -> &BTreeMap<ContextId, DownSet> {
        &self.fibers
    }

    pub fn at(&self, poset: &ContextPoset, pt: ProductPoint) -> Result<BoldSieve> {
        let fibers = poset
            .down_set(pt.context)
            .iter()
            .map(|&w| {
                let d = self
                    .fibers
                    .get(&w)
                    .ok_or_else(|| Error::UnknownContext(w.to_string()))?;
                Ok((w, d.restrict(pt.level)))
            })
            .collect::<Result<_>>()?;
        BoldSieve::new(poset, pt, fibers)
    }
}

/// Levels `r′` of one context slice with `tr(ρ P_{S(V′,r′)}) ≥ r′`. The
/// trace is antitone in `r′`, so the solution set is a down-set; on an open
/// piece where the trace `t` falls below the right end it ends at `[0,t]`.
fn solve_levels(step: &StepFn<Projection>, rho: &DensityMatrix) -> Result<DownSet> {
    let eps = epsilon();
    let mut acc = DownSet::Empty;
    for (piece, p) in step.pieces() {
        let t = trace_pairing(rho, p)?;
        match piece {
            Piece::Point(b) => {
                if t >= b - eps {
                    acc = DownSet::Closed(b);
                } else {
                    break;
                }
            }
            Piece::Between(a, b) => {
                if t >= b - eps {
                    acc = DownSet::Open(b);
                } else {
                    if t > a {
                        acc = DownSet::Closed(t);
                    }
                    break;
                }
            }
        }
    }
    Ok(acc)
}

/// `ν(S)_{(V,r)} = {(V′, r′) ≤ (V, r) | tr(ρ P_{S(V′,r′)}) ≥ r′}`.
pub fn valuate_bold(s: &StepClopen, rho: &DensityMatrix) -> Result<BoldTruthValue> {
    let fibers = s
        .steps
        .iter()
        .map(|(&v, step)| Ok((v, solve_levels(step, rho)?)))
        .collect::<Result<_>>()?;
    Ok(BoldTruthValue { fibers })
}

/// `ℓ′(γ)_{(V,r)} = {(V′, r′) ≤ (V, r) | h_γ(♭V′) ≥ r′}`.
pub fn ell_prime_bold(
    poset: &ContextPoset,
    flat: &Selector,
    gamma: &OrderReversingSection,
) -> Result<BoldTruthValue> {
    let fibers = poset
        .ids()
        .filter(|&v| gamma.get(flat.apply(v)).is_some())
        .map(|v| Ok((v, DownSet::closed(gamma.at(flat.apply(v)))?)))
        .collect::<Result<_>>()?;
    Ok(BoldTruthValue { fibers })
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct KeyDiagramReport {
    pub checked: usize,
    pub levels: Vec<f64>,
    pub mismatches: Vec<String>,
}

impl KeyDiagramReport {
    pub fn passed(&self) -> bool {
        self.checked > 0 && self.mismatches.is_empty()
    }
}

/// Levels `{0, ¼, ½, ¾, 1}` plus every value of `extra` in `[0,1]`.
pub fn diagram_levels(extra: impl IntoIterator<Item = f64>) -> Vec<f64> {
    let mut levels = vec![0.0, 0.25, 0.5, 0.75, 1.0];
    levels.extend(extra.into_iter().filter(|t| (0.0..=1.0).contains(t)));
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    levels
}

/// Compares `ℓ′(μ_j^ρ(S))` with `ν^ρ(π₁*S)` at every context and at the
/// sampled levels, including every trace the instance produces.
pub fn check_key_diagram(
    rho: &DensityMatrix,
    s: &ClopenSub,
    flat: &Selector,
    poset: &ContextPoset,
) -> Result<KeyDiagramReport> {
    let gamma = measure_from_state(rho, MeasureKind::JSheaf, Some(flat)).section(poset, s);
    check_key_diagram_with(&gamma, rho, s, flat, poset)
}

/// As [`check_key_diagram`] with the upper path's section supplied.
pub fn check_key_diagram_with(
    gamma: &OrderReversingSection,
    rho: &DensityMatrix,
    s: &ClopenSub,
    flat: &Selector,
    poset: &ContextPoset,
) -> Result<KeyDiagramReport> {
    let upper = ell_prime_bold(poset, flat, gamma)?;
    let lower = valuate_bold(&inject_pi1(poset, flat, s)?, rho)?;
    let mut traces: Vec<f64> = gamma.values().values().copied().collect();
    for v in s.domain() {
        traces.push(trace_pairing(rho, s.at(v))?);
    }
    let levels = diagram_levels(traces);
    let mut report = KeyDiagramReport {
        levels: levels.clone(),
        ..Default::default()
    };
    for v in s.domain() {
        for &r in &levels {
            let pt = ProductPoint::new(v, r)?;
            let (a, b) = (upper.at(poset, pt)?, lower.at(poset, pt)?);
            report.checked += 1;
            if a != b {
                report
                    .mismatches
                    .push(format!("at {pt}: upper {a:?} vs lower {b:?}"));
            }
            if !is_in_omega_jbold(poset, flat, &b) {
                report
                    .mismatches
                    .push(format!("at {pt}: valuation {b:?} not closed"));
            }
        }
    }
    Ok(report)
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct BoldFilterReport {
    pub lattice_size: usize,
    pub members: usize,
    pub filter_violations: Vec<String>,
    pub least_filter_mismatches: Vec<String>,
    pub restriction_violations: Vec<String>,
}

impl BoldFilterReport {
    pub fn passed(&self) -> bool {
        self.filter_violations.is_empty()
            && self.least_filter_mismatches.is_empty()
            && self.restriction_violations.is_empty()
    }
}

/// Clopens on `↓(V, r)` with one breakpoint at `r/2`: `A` on `(0, r/2]`
/// and `B ⊆ A` on `(r/2, r]` for j-sheaf clopens `A`, `B` over `↓V`. The
/// family is closed under meets.
pub fn two_step_lattice(
    poset: &ContextPoset,
    flat: &Selector,
    pt: ProductPoint,
    bound: usize,
) -> Result<Vec<StepClopen>> {
    if pt.level == 0.0 {
        return Ok(vec![StepClopen::top(poset, Some(pt))]);
    }
    let base = enumerate_j_clopens(poset, flat, Some(pt.context), bound)?;
    let one = Projection::identity(poset.dim());
    let mut out = Vec::new();
    for a in &base {
        for b in base.iter().filter(|b| b.leq(a)) {
            let steps = a
                .values()
                .iter()
                .map(|(&v, p)| {
                    let step = StepFn::left_closed_steps(
                        vec![0.0, pt.level / 2.0, pt.level],
                        one.clone(),
                        vec![p.clone(), b.at(v).clone()],
                    )?;
                    Ok((v, step.normalize()))
                })
                .collect::<Result<_>>()?;
            out.push(StepClopen {
                end: pt.level,
                steps,
            });
        }
    }
    Ok(out)
}

/// Filter checks for the state's truth object at `(V, r)` over
/// [`two_step_lattice`]: top, upward and meet closure; agreement with the
/// least filter generated by the injected members of `𝕋^{ρ,r}_j(V)`; and
/// stability of membership under restriction to the sampled points below.
pub fn bold_filter_report(
    poset: &ContextPoset,
    flat: &Selector,
    rho: &DensityMatrix,
    pt: ProductPoint,
    bound: usize,
) -> Result<BoldFilterReport> {
    let t = truth_object_bold(rho);
    let lattice = two_step_lattice(poset, flat, pt, bound)?;
    let member: Vec<bool> = lattice.iter().map(|s| t.contains(pt, s)).collect();
    let mut rep = BoldFilterReport {
        lattice_size: lattice.len(),
        members: member.iter().filter(|&&m| m).count(),
        ..Default::default()
    };

    if !t.contains(pt, &StepClopen::top(poset, Some(pt))) {
        rep.filter_violations
            .push(format!("at {pt}: top not a member"));
    }
    for (i, a) in lattice.iter().enumerate().filter(|(i, _)| member[*i]) {
        for (k, b) in lattice.iter().enumerate() {
            if !member[k] && a.leq(b) {
                rep.filter_violations
                    .push(format!("at {pt}: not upward closed ({i} ≤ {k})"));
            }
            if member[k] && k > i && !t.contains(pt, &a.meet(b)?) {
                rep.filter_violations.push(format!(
                    "at {pt}: meet of members {i} and {k} has trace {} < {}",
                    trace_pairing(rho, a.meet(b)?.value(pt.context, pt.level)?)?,
                    pt.level
                ));
            }
        }
    }

    // least filter containing the injected members of 𝕋^{ρ,r}_j(V)
    let small = TruthObject::rho_r(rho, pt.level)?;
    let mut gens: Vec<StepClopen> = Vec::new();
    for s in enumerate_j_clopens(poset, flat, Some(pt.context), bound)? {
        if small.contains(poset, pt.context, &s) {
            gens.push(inject_pi1(poset, flat, &s)?.restrict_to(poset, pt)?);
        }
    }
    let mut closed = gens.clone();
    loop {
        let mut added = false;
        for i in 0..closed.len() {
            for k in 0..closed.len() {
                let m = closed[i].meet(&closed[k])?;
                if !closed.iter().any(|c| c.same_as(&m)) {
                    closed.push(m);
                    added = true;
                }
            }
        }
        if !added {
            break;
        }
    }
    for (i, s) in lattice.iter().enumerate() {
        let generated = closed.iter().any(|g| g.leq(s));
        if generated != member[i] {
            rep.least_filter_mismatches.push(format!(
                "at {pt}: element {i} is {} the generated filter but {} the truth object",
                if generated { "in" } else { "outside" },
                if member[i] { "in" } else { "outside" },
            ));
        }
    }

    let mut levels = diagram_levels([pt.level / 2.0]);
    levels.retain(|&l| l <= pt.level);
    for (i, s) in lattice.iter().enumerate().filter(|(i, _)| member[*i]) {
        for &w in poset.down_set(pt.context) {
            for &l in &levels {
                let sub = ProductPoint {
                    context: w,
                    level: l,
                };
                let restricted = s.restrict_to(poset, sub)?.sheafify(flat);
                if !t.contains(sub, &restricted) {
                    rep.restriction_violations
                        .push(format!("element {i} at {pt} restricted to {sub}"));
                }
            }
        }
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::QubitFixture;
    use crate::semantics::daseinize_j;
    use crate::tolerance::DEFAULT_MAX_ENUM;

    fn pt(v: ContextId, r: f64) -> ProductPoint {
        ProductPoint::new(v, r).unwrap()
    }

    #[test]
    fn covering_examples() {
        let f = QubitFixture::new();
        let p = &f.poset;
        let b = pt(f.vx, 0.5);
        assert!(covering_jbold(p, &f.flat, b, &BoldSieve::top(p, b)).unwrap());
        let w = BoldSieve::new(p, b, [(p.bottom(), DownSet::Open(0.5))].into()).unwrap();
        assert!(covering_jbold(p, &f.flat, b, &w).unwrap());
        let w = BoldSieve::new(p, b, [(p.bottom(), DownSet::Closed(0.4))].into()).unwrap();
        assert!(!covering_jbold(p, &f.flat, b, &w).unwrap());
        assert!(covering_jbold(p, &f.flat, pt(f.vx, 0.4), &w).is_err());
    }

    #[test]
    fn lt_examples() {
        let f = QubitFixture::new();
        let p = &f.poset;
        let b = pt(f.vx, 1.0);
        let top = BoldSieve::top(p, b);
        assert_eq!(lt_jbold(p, &f.flat, &top), top);
        let w = BoldSieve::new(p, b, [(p.bottom(), DownSet::Open(1.0))].into()).unwrap();
        let j = lt_jbold(p, &f.flat, &w);
        assert_eq!(j.fiber(p.bottom()), DownSet::Closed(1.0));
        assert_eq!(j.fiber(f.vx), DownSet::Closed(1.0));
    }

    #[test]
    fn bold_sieve_rejects_bad_fibers() {
        let f = QubitFixture::new();
        let p = &f.poset;
        let b = pt(f.vz, 0.5);
        assert!(BoldSieve::new(p, b, [(f.vz, DownSet::Closed(0.7))].into()).is_err());
        assert!(BoldSieve::new(p, b, [(f.vz, DownSet::Closed(0.3))].into()).is_err());
        assert!(BoldSieve::new(p, b, [(f.vx, DownSet::Closed(0.3))].into()).is_err());
    }

    #[test]
    fn inject_examples() {
        let f = QubitFixture::new();
        let p = &f.poset;
        let top = inject_pi1(p, &f.flat, &ClopenSub::top(p)).unwrap();
        assert!(top.same_as(&StepClopen::top(p, None)));
        let s = inject_pi1(p, &f.flat, &daseinize_j(&f.p_z, &f.flat, p).unwrap()).unwrap();
        assert_eq!(s.value(f.vz, 0.3).unwrap(), &f.p_z);
        assert!(s.value(f.vz, 0.0).unwrap().is_identity());
        assert!(s.value(f.vx, 0.9).unwrap().is_identity());
        assert!(s.value(p.bottom(), 1.0).unwrap().is_identity());
        assert!(s.is_jbold_sheaf(p, &f.flat));
        assert!(s.unit_is_iso(p, &f.flat));
        s.check_structure(p, &f.flat).unwrap();
        let not_sheaf = daseinize_j(&f.p_x, &f.identity_selector(), p).unwrap();
        assert!(inject_pi1(p, &f.flat, &not_sheaf).is_err());
    }

    #[test]
    fn right_continuous_jump_is_not_a_sheaf() {
        let f = QubitFixture::new();
        let p = &f.poset;
        let one = Projection::identity(2);
        let jump = StepFn::new(
            vec![0.0, 0.5, 1.0],
            vec![one.clone(), f.p_z.clone(), f.p_z.clone()],
            vec![one.clone(), f.p_z.clone()],
        )
        .unwrap();
        let mut steps = StepClopen::top(p, None).steps;
        steps.insert(f.vz, jump);
        let s = StepClopen::from_steps_unchecked(steps).unwrap();
        s.check_structure(p, &f.flat).unwrap();
        assert!(!s.is_jbold_sheaf(p, &f.flat));
        assert!(!s.unit_is_iso(p, &f.flat));
        assert!(s.sheafify(&f.flat).is_jbold_sheaf(p, &f.flat));
    }

    #[test]
    fn truth_object_examples() {
        let f = QubitFixture::new();
        let p = &f.poset;
        let t = truth_object_bold(&f.rho_mix);
        let s = inject_pi1(p, &f.flat, &daseinize_j(&f.p_z, &f.flat, p).unwrap()).unwrap();
        assert!(t.contains(pt(f.vz, 0.0), &StepClopen::top(p, None)));
        assert!(t.contains(
            pt(f.vz, 0.0),
            &inject_pi1(p, &f.flat, &ClopenSub::bottom(p)).unwrap()
        ));
        assert!(t.contains(pt(f.vz, 0.5), &s));
        assert!(!t.contains(pt(f.vz, 0.6), &s));
    }

    #[test]
    fn valuation_examples() {
        let f = QubitFixture::new();
        let p = &f.poset;
        let s = inject_pi1(p, &f.flat, &daseinize_j(&f.p_z, &f.flat, p).unwrap()).unwrap();
        let b = pt(f.vz, 1.0);
        let v0 = valuate_bold(&s, &f.rho0).unwrap().at(p, b).unwrap();
        assert_eq!(v0.fiber(f.vz), DownSet::Closed(1.0));
        assert_eq!(v0.fiber(p.bottom()), DownSet::Closed(1.0));
        let vm = valuate_bold(&s, &f.rho_mix).unwrap().at(p, b).unwrap();
        assert_eq!(vm.fiber(f.vz), DownSet::Closed(0.5));
        assert_eq!(vm.fiber(p.bottom()), DownSet::Closed(1.0));
        assert!(is_in_omega_jbold(p, &f.flat, &vm));
        let top = valuate_bold(&StepClopen::top(p, None), &f.rho_x).unwrap();
        assert_eq!(top.at(p, b).unwrap(), BoldSieve::top(p, b));
    }

    #[test]
    fn ell_prime_examples() {
        let f = QubitFixture::new();
        let p = &f.poset;
        let b = pt(f.vz, 1.0);
        let ones = OrderReversingSection::new(p.ids().map(|v| (v, 1.0)).collect());
        assert_eq!(
            ell_prime_bold(p, &f.flat, &ones).unwrap().at(p, b).unwrap(),
            BoldSieve::top(p, b)
        );
        let h = OrderReversingSection::new([(p.bottom(), 1.0), (f.vz, 0.5), (f.vx, 1.0)].into());
        let l = ell_prime_bold(p, &f.flat, &h).unwrap().at(p, b).unwrap();
        assert_eq!(l.fiber(f.vz), DownSet::Closed(0.5));
        assert_eq!(l.fiber(p.bottom()), DownSet::Closed(1.0));
        assert!(l.leq(&BoldSieve::top(p, b)));
    }

    #[test]
    fn key_diagram_examples() {
        let f = QubitFixture::new();
        let p = &f.poset;
        let s = daseinize_j(&f.p_z, &f.flat, p).unwrap();
        for rho in [&f.rho0, &f.rho_mix, &f.rho1, &f.rho_x] {
            let rep = check_key_diagram(rho, &s, &f.flat, p).unwrap();
            assert!(rep.passed(), "{:?}", rep.mismatches);
        }
        let mut gamma =
            measure_from_state(&f.rho_mix, MeasureKind::JSheaf, Some(&f.flat)).section(p, &s);
        gamma = OrderReversingSection::new(
            gamma.values().iter().map(|(&v, &x)| (v, x * 0.9)).collect(),
        );
        assert!(!check_key_diagram_with(&gamma, &f.rho_mix, &s, &f.flat, p)
            .unwrap()
            .passed());
    }

    #[test]
    fn sheafification_orders_agree() {
        let f = QubitFixture::new();
        let p = &f.poset;
        let one = Projection::identity(2);
        let jump = StepFn::new(
            vec![0.0, 0.5, 1.0],
            vec![f.p_z.clone(), f.p_z.clone(), f.p_z.clone()],
            vec![one.clone(), f.p_z.clone()],
        )
        .unwrap();
        let mut steps = StepClopen::top(p, None).steps;
        steps.insert(p.bottom(), jump.map(|_| one.clone()));
        steps.insert(f.vx, jump.map(|q| q.clone()));
        let s = StepClopen::from_steps_unchecked(steps).unwrap();
        assert!(s.sheafify(&f.flat).same_as(&s.sheafify_swapped(&f.flat)));
    }

    #[test]
    fn filter_on_pure_state_holds() {
        let f = QubitFixture::new();
        let p = &f.poset;
        for v in p.ids() {
            for r in [0.0, 0.5, 1.0] {
                let rep =
                    bold_filter_report(p, &f.flat, &f.rho0, pt(v, r), DEFAULT_MAX_ENUM).unwrap();
                assert!(rep.passed(), "{rep:?}");
            }
        }
    }

    #[test]
    fn filter_on_mixed_state_fails_between_levels() {
        let f = QubitFixture::new();
        let rep = bold_filter_report(
            &f.poset,
            &f.flat,
            &f.rho_mix,
            pt(f.vz, 0.5),
            DEFAULT_MAX_ENUM,
        )
        .unwrap();
        assert!(!rep.filter_violations.is_empty());
        assert!(!rep.least_filter_mismatches.is_empty());
    }
}
