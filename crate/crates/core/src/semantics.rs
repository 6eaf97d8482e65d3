//! The spectral presheaf, clopen subobjects, daseinization, truth objects
//! and truth-value valuations.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::context::{AtomMask, Context, ContextId, ContextPoset, Selector};
use crate::error::{Error, Result};
use crate::operator::{trace_pairing, DensityMatrix, Projection};
use crate::sheaf::{is_in_omega_j, Presheaf, Sieve, TruthValue};
use crate::tolerance::epsilon;

/// `Σ`: atoms at each context, restricted to dominating atoms.
pub fn spectral_presheaf(poset: &ContextPoset) -> Presheaf {
    let sizes = poset.ids().map(|v| poset.context(v).len()).collect();
    Presheaf::from_fn(poset, sizes, |sub, sup, x| {
        poset.restriction_map(sub, sup).expect("inclusion")[x]
    })
    .expect("spectral restriction is functorial")
}

/// `δ(Ê)_V`: the smallest projection of `V` above `Ê`.
pub fn daseinize(e: &Projection, v: &Context) -> Result<Projection> {
    if e.dim() != v.dim() {
        return Err(Error::DimMismatch {
            expected: v.dim(),
            found: e.dim(),
        });
    }
    Ok(v.projection_of(v.outer_mask(e)))
}

/// Clopen subobject given by one projection per context of a down-closed
/// domain (the whole poset, or `↓V`).
#[derive(Clone, PartialEq)]
pub struct ClopenSub {
    values: BTreeMap<ContextId, Projection>,
}

impl fmt::Debug for ClopenSub {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map()
            .entries(self.values.iter().map(|(k, p)| (k, p.rank())))
            .finish()
    }
}

impl ClopenSub {
    /// Clopen subpresheaf of `Σ`: `P(V) ∈ 𝒫(V)` and the image of `P(V)` in
    /// every `V′ ⊆ V` lies below `P(V′)`.
    pub fn presheaf(poset: &ContextPoset, values: BTreeMap<ContextId, Projection>) -> Result<Self> {
        let s = Self { values };
        s.check_presheaf(poset).map_err(Error::NotASubpresheaf)?;
        Ok(s)
    }

    /// Clopen subsheaf of `♭*Σ`: additionally `P(V) = P(♭V)`.
    pub fn j_sheaf(
        poset: &ContextPoset,
        flat: &Selector,
        values: BTreeMap<ContextId, Projection>,
    ) -> Result<Self> {
        let s = Self { values };
        s.check_j_sheaf(poset, flat).map_err(Error::NotJSheaf)?;
        Ok(s)
    }

    pub fn from_values_unchecked(values: BTreeMap<ContextId, Projection>) -> Self {
        Self { values }
    }

    pub fn top(poset: &ContextPoset) -> Self {
        Self {
            values: poset
                .ids()
                .map(|v| (v, Projection::identity(poset.dim())))
                .collect(),
        }
    }

    pub fn bottom(poset: &ContextPoset) -> Self {
        Self {
            values: poset
                .ids()
                .map(|v| (v, Projection::zero(poset.dim())))
                .collect(),
        }
    }

    pub fn at(&self, v: ContextId) -> &Projection {
        &self.values[&v]
    }

    pub fn get(&self, v: ContextId) -> Option<&Projection> {
        self.values.get(&v)
    }

    pub fn domain(&self) -> impl Iterator<Item = ContextId> + '_ {
        self.values.keys().copied()
    }

    pub fn values(&self) -> &BTreeMap<ContextId, Projection> {
        &self.values
    }

    pub fn mask_at(&self, poset: &ContextPoset, v: ContextId) -> AtomMask {
        poset
            .context(v)
            .mask_of(self.at(v))
            .expect("value lies in 𝒫(V)")
    }

    fn check_domain(&self, poset: &ContextPoset) -> std::result::Result<(), String> {
        for v in self.domain() {
            if let Some(w) = poset
                .down_set(v)
                .iter()
                .find(|w| !self.values.contains_key(w))
            {
                return Err(format!("domain not down-closed: {w} ⊆ {v} missing"));
            }
        }
        Ok(())
    }

    pub fn check_presheaf(&self, poset: &ContextPoset) -> std::result::Result<(), String> {
        self.check_domain(poset)?;
        for (&v, p) in &self.values {
            let Some(mask) = poset.context(v).mask_of(p) else {
                return Err(format!("value at {v} is not a projection of the context"));
            };
            for &w in poset.down_set(v) {
                let img = poset.restrict_mask(mask, w, v).expect("inclusion");
                let below = poset.context(w).mask_of(self.at(w)).unwrap_or(0);
                if img & !below != 0 {
                    return Err(format!("image of {v} not inside the value at {w}"));
                }
            }
        }
        Ok(())
    }

    pub fn check_j_sheaf(
        &self,
        poset: &ContextPoset,
        flat: &Selector,
    ) -> std::result::Result<(), String> {
        self.check_domain(poset)?;
        for (&v, p) in &self.values {
            let fv = flat.apply(v);
            if poset.context(fv).mask_of(p).is_none() {
                return Err(format!("value at {v} is not a projection of ♭{v}"));
            }
            if self.at(fv) != p {
                return Err(format!(
                    "value at {v} differs from the value at ♭{v} = {fv}"
                ));
            }
        }
        let fixed: BTreeMap<ContextId, Projection> = self
            .values
            .iter()
            .filter(|(v, _)| flat.is_fixpoint(**v))
            .map(|(v, p)| (*v, p.clone()))
            .collect();
        for (&v, p) in &fixed {
            let mask = poset.context(v).mask_of(p).expect("checked above");
            for &w in poset.down_set(v).iter().filter(|w| flat.is_fixpoint(**w)) {
                let img = poset.restrict_mask(mask, w, v).expect("inclusion");
                let below = poset.context(w).mask_of(&fixed[&w]).unwrap_or(0);
                if img & !below != 0 {
                    return Err(format!("image of {v} not inside the value at {w}"));
                }
            }
        }
        Ok(())
    }

    pub fn is_j_sheaf(&self, poset: &ContextPoset, flat: &Selector) -> bool {
        self.check_j_sheaf(poset, flat).is_ok()
    }

    /// `P_{↓V}`.
    pub fn restrict_to(&self, poset: &ContextPoset, v: ContextId) -> Self {
        Self {
            values: poset
                .down_set(v)
                .iter()
                .map(|w| (*w, self.at(*w).clone()))
                .collect(),
        }
    }

    /// `♭*P`: `V ↦ P(♭V)` on the same domain.
    pub fn pullback(&self, flat: &Selector) -> Self {
        Self {
            values: self
                .domain()
                .map(|v| (v, self.at(flat.apply(v)).clone()))
                .collect(),
        }
    }

    /// Values on the selected contexts only.
    pub fn on_fixpoints(&self, flat: &Selector) -> BTreeMap<ContextId, Projection> {
        self.values
            .iter()
            .filter(|(v, _)| flat.is_fixpoint(**v))
            .map(|(v, p)| (*v, p.clone()))
            .collect()
    }

    pub fn leq(&self, other: &Self) -> bool {
        self.values
            .iter()
            .all(|(v, p)| other.get(*v).is_some_and(|q| p.leq(q).unwrap_or(false)))
    }

    pub fn meet(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a.meet(b))
    }

    pub fn join(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a.join(b))
    }

    fn zip_with(
        &self,
        other: &Self,
        f: impl Fn(&Projection, &Projection) -> Result<Projection>,
    ) -> Result<Self> {
        let values = self
            .values
            .iter()
            .map(|(v, p)| {
                let q = other
                    .get(*v)
                    .ok_or_else(|| Error::UnknownContext(v.to_string()))?;
                Ok((*v, f(p, q)?))
            })
            .collect::<Result<_>>()?;
        Ok(Self { values })
    }
}

/// `δ(Ê)` as a clopen subpresheaf of `Σ`.
pub fn daseinize_presheaf(e: &Projection, poset: &ContextPoset) -> Result<ClopenSub> {
    let values = poset
        .ids()
        .map(|v| Ok((v, daseinize(e, poset.context(v))?)))
        .collect::<Result<_>>()?;
    Ok(ClopenSub { values })
}

/// `δ_j(Ê)_V = δ(Ê)_{♭V}` as a clopen subsheaf of `♭*Σ`.
pub fn daseinize_j(e: &Projection, flat: &Selector, poset: &ContextPoset) -> Result<ClopenSub> {
    let values = poset
        .ids()
        .map(|v| Ok((v, daseinize(e, poset.context(flat.apply(v)))?)))
        .collect::<Result<_>>()?;
    Ok(ClopenSub { values })
}

/// `⌈P⌉`: for every context, the restriction of `P` to its down-set.
#[derive(Clone, Debug, PartialEq)]
pub struct PropositionName {
    components: Vec<ClopenSub>,
}

impl PropositionName {
    pub fn at(&self, v: ContextId) -> &ClopenSub {
        &self.components[v.0]
    }

    pub fn check_naturality(&self, poset: &ContextPoset) -> Result<()> {
        for sup in poset.ids() {
            for &sub in poset.down_set(sup) {
                if self.components[sup.0].restrict_to(poset, sub) != self.components[sub.0] {
                    return Err(Error::NaturalityViolation(format!(
                        "name at {sup} vs {sub}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// `⌈P⌉_V = ♭*(P_{↓V})`; a j-sheaf clopen is already `♭`-constant, so this
/// is the plain restriction.
pub fn name_of(p: &ClopenSub, flat: &Selector, poset: &ContextPoset) -> Result<PropositionName> {
    p.check_j_sheaf(poset, flat).map_err(Error::NotJSheaf)?;
    Ok(PropositionName {
        components: poset
            .ids()
            .map(|v| p.restrict_to(poset, v).pullback(flat))
            .collect(),
    })
}

type MemberFn = dyn Fn(&ContextPoset, ContextId, &ClopenSub) -> bool + Send + Sync;

#[derive(Clone, Debug)]
pub enum TruthObjectKind {
    /// Clopens whose projection at `V` has `ρ`-probability at least `r`.
    RhoR {
        rho: DensityMatrix,
        r: f64,
    },
    /// Clopens that a measure sends to 1 everywhere below `V`.
    CanonicalMeasure,
    Custom,
}

/// Intensional truth object: a membership predicate on pairs `(V, S)` with
/// `S` a clopen subobject over `↓V`.
#[derive(Clone)]
pub struct TruthObject {
    name: String,
    kind: TruthObjectKind,
    member: Arc<MemberFn>,
}

impl fmt::Debug for TruthObject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TruthObject({})", self.name)
    }
}

impl TruthObject {
    pub fn new(
        name: impl Into<String>,
        kind: TruthObjectKind,
        member: impl Fn(&ContextPoset, ContextId, &ClopenSub) -> bool + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            kind,
            member: Arc::new(member),
        }
    }

    pub fn custom(
        name: impl Into<String>,
        member: impl Fn(&ContextPoset, ContextId, &ClopenSub) -> bool + Send + Sync + 'static,
    ) -> Self {
        Self::new(name, TruthObjectKind::Custom, member)
    }

    /// `𝕋^{ρ,r}`: `S ∈ 𝕋(V)` iff `tr(ρ P_{S(V)}) ≥ r − ε`. The same predicate
    /// serves the presheaf and the j-sheaf theory.
    pub fn rho_r(rho: &DensityMatrix, r: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&r) {
            return Err(Error::InvalidLevel(r));
        }
        let state = rho.clone();
        Ok(Self::new(
            format!("T^(rho,{r})"),
            TruthObjectKind::RhoR {
                rho: rho.clone(),
                r,
            },
            move |_, v, s| trace_pairing(&state, s.at(v)).is_ok_and(|t| t >= r - epsilon()),
        ))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> &TruthObjectKind {
        &self.kind
    }

    pub fn contains(&self, poset: &ContextPoset, v: ContextId, s: &ClopenSub) -> bool {
        (self.member)(poset, v, s)
    }
}

fn down_domain(poset: &ContextPoset, top: Option<ContextId>) -> Vec<ContextId> {
    match top {
        Some(v) => poset.down_set(v).to_vec(),
        None => poset.ids().collect(),
    }
}

/// All consistent mask assignments on `ctxs` (sorted so that every context
/// comes after the contexts below it).
fn assign_masks(
    poset: &ContextPoset,
    ctxs: &[ContextId],
    bound: usize,
) -> Result<Vec<BTreeMap<ContextId, AtomMask>>> {
    let size = poset.atom_count(ctxs);
    if size > bound {
        return Err(Error::EnumerationTooLarge { size, bound });
    }
    let mut ordered = ctxs.to_vec();
    ordered.sort_by_key(|&v| (poset.down_set(v).len(), v));
    let mut out = Vec::new();
    let mut current = BTreeMap::new();
    fn go(
        poset: &ContextPoset,
        ordered: &[ContextId],
        k: usize,
        current: &mut BTreeMap<ContextId, AtomMask>,
        out: &mut Vec<BTreeMap<ContextId, AtomMask>>,
    ) {
        let Some(&v) = ordered.get(k) else {
            out.push(current.clone());
            return;
        };
        let full = poset.context(v).full_mask();
        for m in 0..=full {
            let ok = current.iter().all(|(&w, &wm)| {
                !poset.leq(w, v) || poset.restrict_mask(m, w, v).expect("inclusion") & !wm == 0
            });
            if ok {
                current.insert(v, m);
                go(poset, ordered, k + 1, current, out);
                current.remove(&v);
            }
        }
    }
    go(poset, &ordered, 0, &mut current, &mut out);
    Ok(out)
}

/// Every clopen subpresheaf of `Σ` over `↓top` (or the whole poset).
pub fn enumerate_presheaf_clopens(
    poset: &ContextPoset,
    top: Option<ContextId>,
    bound: usize,
) -> Result<Vec<ClopenSub>> {
    let ctxs = down_domain(poset, top);
    Ok(assign_masks(poset, &ctxs, bound)?
        .into_iter()
        .map(|a| ClopenSub {
            values: a
                .into_iter()
                .map(|(v, m)| (v, poset.context(v).projection_of(m)))
                .collect(),
        })
        .collect())
}

/// Every clopen subsheaf of `♭*Σ` over `↓top` (or the whole poset): free
/// choices on the selected contexts, copied to the rest.
pub fn enumerate_j_clopens(
    poset: &ContextPoset,
    flat: &Selector,
    top: Option<ContextId>,
    bound: usize,
) -> Result<Vec<ClopenSub>> {
    let ctxs = down_domain(poset, top);
    let fixed: Vec<ContextId> = ctxs
        .iter()
        .copied()
        .filter(|&v| flat.is_fixpoint(v))
        .collect();
    Ok(assign_masks(poset, &fixed, bound)?
        .into_iter()
        .map(|a| ClopenSub {
            values: ctxs
                .iter()
                .map(|&v| {
                    let fv = flat.apply(v);
                    (v, poset.context(fv).projection_of(a[&fv]))
                })
                .collect(),
        })
        .collect())
}

/// Violations of the filter postulate for `T` at `V` on the lattice of
/// j-sheaf clopens over `↓V`: top membership, upward closure, meet closure.
pub fn filter_violations(
    poset: &ContextPoset,
    flat: &Selector,
    t: &TruthObject,
    v: ContextId,
    bound: usize,
) -> Result<Vec<String>> {
    let lattice = enumerate_j_clopens(poset, flat, Some(v), bound)?;
    Ok(filter_violations_on(poset, t, v, &lattice))
}

/// Filter check of `T` at `V` over an explicit lattice of clopens.
pub fn filter_violations_on(
    poset: &ContextPoset,
    t: &TruthObject,
    v: ContextId,
    lattice: &[ClopenSub],
) -> Vec<String> {
    let member: Vec<bool> = lattice.iter().map(|s| t.contains(poset, v, s)).collect();
    let mut out = Vec::new();
    let top = ClopenSub::top(poset).restrict_to(poset, v);
    if !t.contains(poset, v, &top) {
        out.push(format!("{} at {v}: top not a member", t.name()));
    }
    for (i, a) in lattice.iter().enumerate() {
        if !member[i] {
            continue;
        }
        for (k, b) in lattice.iter().enumerate() {
            if !member[k] && a.leq(b) {
                out.push(format!("{} at {v}: not upward closed", t.name()));
            }
            if member[k] {
                let m = a.meet(b).expect("same domain");
                if !t.contains(poset, v, &m) {
                    out.push(format!("{} at {v}: not closed under meets", t.name()));
                }
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

/// `ν_j(P; 𝕋)_V = {V′ ⊆ V | ⌈P⌉_{V′} ∈ 𝕋(V′)}`, checked to be a global
/// element of `Ω_j`.
pub fn valuate_j(
    p: &ClopenSub,
    t: &TruthObject,
    flat: &Selector,
    poset: &ContextPoset,
) -> Result<TruthValue> {
    let name = name_of(p, flat, poset)?;
    let inside: Vec<bool> = poset
        .ids()
        .map(|v| t.contains(poset, v, name.at(v)))
        .collect();
    let mut comps = Vec::with_capacity(poset.len());
    for v in poset.ids() {
        let members = poset.down_set(v).iter().copied().filter(|w| inside[w.0]);
        let sieve = Sieve::new(poset, v, members).map_err(|_| Error::ResultNotInOmegaJ(v))?;
        if !is_in_omega_j(poset, flat, &sieve) {
            return Err(Error::ResultNotInOmegaJ(v));
        }
        comps.push(sieve);
    }
    TruthValue::new(poset, comps)
}

/// `ν(P; 𝕋)_V = {V′ ⊆ V | P_{↓V′} ∈ 𝕋(V′)}` in the presheaf theory.
pub fn valuate_presheaf(
    p: &ClopenSub,
    t: &TruthObject,
    poset: &ContextPoset,
) -> Result<TruthValue> {
    p.check_presheaf(poset).map_err(Error::NotASubpresheaf)?;
    let inside: Vec<bool> = poset
        .ids()
        .map(|v| t.contains(poset, v, &p.restrict_to(poset, v)))
        .collect();
    let comps = poset
        .ids()
        .map(|v| {
            Sieve::new(
                poset,
                v,
                poset.down_set(v).iter().copied().filter(|w| inside[w.0]),
            )
            .map_err(|e| Error::NotGlobalElement(e.to_string()))
        })
        .collect::<Result<Vec<_>>>()?;
    TruthValue::new(poset, comps)
}

#[derive(Clone, Debug)]
pub enum Discrimination {
    Equal,
    /// A vector state certain of one proposition and excluding the other at
    /// `context`.
    Witness {
        state: DensityMatrix,
        context: ContextId,
    },
}

/// Constructive witness that two distinct j-sheaf clopens have different
/// valuations under `𝕋^{ρ,1}` for some pure `ρ`.
pub fn discriminate_witness(
    p1: &ClopenSub,
    p2: &ClopenSub,
    flat: &Selector,
    poset: &ContextPoset,
) -> Result<Discrimination> {
    p1.check_j_sheaf(poset, flat).map_err(Error::NotJSheaf)?;
    p2.check_j_sheaf(poset, flat).map_err(Error::NotJSheaf)?;
    let mut order = flat.fixpoints();
    order.sort_by_key(|&v| std::cmp::Reverse((poset.down_set(v).len(), v)));
    order.extend(poset.ids().filter(|v| !flat.is_fixpoint(*v)));
    let Some(v) = order.into_iter().find(|&v| p1.at(v) != p2.at(v)) else {
        return Ok(Discrimination::Equal);
    };
    let (a, b) = (p1.at(v), p2.at(v));
    // the larger side minus the other is a nonzero projection
    let diff = if !b.leq(a)? {
        b.meet(&a.complement())?
    } else {
        a.meet(&b.complement())?
    };
    let phi = diff
        .range_vector()
        .expect("distinct commuting projections differ somewhere");
    Ok(Discrimination::Witness {
        state: DensityMatrix::pure(&phi)?,
        context: v,
    })
}
