//! Finite presheaves over a context poset, sieves, and the topologies a
//! selector induces: the Grothendieck topology `J`, the Lawvere-Tierney
//! operator `j`, closure, the pullback `♭*`, and the classifier `Ω_j`.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::context::{ContextId, ContextPoset, Selector};
use crate::error::{Error, Result};

/// Down-closed set of contexts below `base`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sieve {
    base: ContextId,
    members: BTreeSet<ContextId>,
}

impl fmt::Debug for Sieve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Sieve@{}{{", self.base)?;
        for (i, m) in self.members.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{m}")?;
        }
        write!(f, "}}")
    }
}

impl Sieve {
    pub fn new(
        poset: &ContextPoset,
        base: ContextId,
        members: impl IntoIterator<Item = ContextId>,
    ) -> Result<Self> {
        let members: BTreeSet<ContextId> = members.into_iter().collect();
        for &m in &members {
            if !poset.leq(m, base) {
                return Err(Error::NotASieve(base, format!("{m} is not below the base")));
            }
            for &w in poset.down_set(m) {
                if !members.contains(&w) {
                    return Err(Error::NotASieve(base, format!("{w} ⊆ {m} missing")));
                }
            }
        }
        Ok(Self { base, members })
    }

    /// The maximal sieve `𝔱_V = ↓V`.
    pub fn top(poset: &ContextPoset, base: ContextId) -> Self {
        Self {
            base,
            members: poset.down_set(base).iter().copied().collect(),
        }
    }

    pub fn empty(base: ContextId) -> Self {
        Self {
            base,
            members: BTreeSet::new(),
        }
    }

    /// `↓v` as a sieve on `base`.
    pub fn principal(poset: &ContextPoset, base: ContextId, v: ContextId) -> Result<Self> {
        if !poset.leq(v, base) {
            return Err(Error::NotIncluded { sub: v, sup: base });
        }
        Ok(Self {
            base,
            members: poset.down_set(v).iter().copied().collect(),
        })
    }

    pub fn base(&self) -> ContextId {
        self.base
    }

    pub fn members(&self) -> &BTreeSet<ContextId> {
        &self.members
    }

    pub fn contains(&self, v: ContextId) -> bool {
        self.members.contains(&v)
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn is_top(&self, poset: &ContextPoset) -> bool {
        self.members.len() == poset.down_set(self.base).len()
    }

    fn same_base(&self, other: &Self) -> Result<()> {
        if self.base != other.base {
            return Err(Error::BaseMismatch(self.base, other.base));
        }
        Ok(())
    }

    pub fn meet(&self, other: &Self) -> Result<Self> {
        self.same_base(other)?;
        Ok(Self {
            base: self.base,
            members: &self.members & &other.members,
        })
    }

    pub fn join(&self, other: &Self) -> Result<Self> {
        self.same_base(other)?;
        Ok(Self {
            base: self.base,
            members: &self.members | &other.members,
        })
    }

    pub fn leq(&self, other: &Self) -> Result<bool> {
        self.same_base(other)?;
        Ok(self.members.is_subset(&other.members))
    }

    /// Heyting implication: the largest sieve whose meet with `self` lies in
    /// `other`.
    pub fn implies(&self, other: &Self, poset: &ContextPoset) -> Result<Self> {
        self.same_base(other)?;
        let members = poset
            .down_set(self.base)
            .iter()
            .copied()
            .filter(|&v| {
                poset
                    .down_set(v)
                    .iter()
                    .all(|w| !self.contains(*w) || other.contains(*w))
            })
            .collect();
        Ok(Self {
            base: self.base,
            members,
        })
    }

    /// `ω ∩ ↓V′` as a sieve on `V′`.
    pub fn restrict(&self, poset: &ContextPoset, sub: ContextId) -> Result<Self> {
        if !poset.leq(sub, self.base) {
            return Err(Error::NotIncluded {
                sub,
                sup: self.base,
            });
        }
        let members = self
            .members
            .iter()
            .copied()
            .filter(|&m| poset.leq(m, sub))
            .collect();
        Ok(Self { base: sub, members })
    }
}

/// `ω ∈ J(V)` iff `♭V ∈ ω`.
pub fn covering_j(flat: &Selector, sieve: &Sieve) -> bool {
    sieve.contains(flat.apply(sieve.base))
}

/// `j_V(ω) = {V′ ⊆ V | ♭V′ ∈ ω}`.
pub fn lt_topology_j(poset: &ContextPoset, flat: &Selector, sieve: &Sieve) -> Sieve {
    let members = poset
        .down_set(sieve.base)
        .iter()
        .copied()
        .filter(|&v| sieve.contains(flat.apply(v)))
        .collect();
    Sieve {
        base: sieve.base,
        members,
    }
}

/// `ω ∈ Ω_j(V)`: whenever `♭V′ ∈ ω` then `V′ ∈ ω`.
pub fn is_in_omega_j(poset: &ContextPoset, flat: &Selector, sieve: &Sieve) -> bool {
    poset
        .down_set(sieve.base)
        .iter()
        .all(|&v| !sieve.contains(flat.apply(v)) || sieve.contains(v))
}

/// Down-closed subsets of a down-closed list of contexts, as bit masks over
/// that list.
fn down_closed_masks(poset: &ContextPoset, elems: &[ContextId], bound: usize) -> Result<Vec<u64>> {
    if elems.len() > bound || elems.len() > 63 {
        return Err(Error::EnumerationTooLarge {
            size: elems.len(),
            bound,
        });
    }
    let below: Vec<u64> = elems
        .iter()
        .map(|&e| {
            elems
                .iter()
                .enumerate()
                .filter(|(_, &w)| poset.leq(w, e))
                .fold(0u64, |m, (i, _)| m | 1 << i)
        })
        .collect();
    Ok((0..1u64 << elems.len())
        .filter(|&m| (0..elems.len()).all(|i| m >> i & 1 == 0 || below[i] & !m == 0))
        .collect())
}

/// All sieves on `base`; refuses when `|↓base|` exceeds `bound`.
pub fn enumerate_sieves(poset: &ContextPoset, base: ContextId, bound: usize) -> Result<Vec<Sieve>> {
    let elems = poset.down_set(base);
    Ok(down_closed_masks(poset, elems, bound)?
        .into_iter()
        .map(|m| Sieve {
            base,
            members: elems
                .iter()
                .enumerate()
                .filter(|(i, _)| m >> i & 1 == 1)
                .map(|(_, &v)| v)
                .collect(),
        })
        .collect())
}

/// `Ω_j(V)` by filtering the enumeration of `Ω(V)`.
pub fn omega_j(
    poset: &ContextPoset,
    flat: &Selector,
    base: ContextId,
    bound: usize,
) -> Result<Vec<Sieve>> {
    Ok(enumerate_sieves(poset, base, bound)?
        .into_iter()
        .filter(|s| is_in_omega_j(poset, flat, s))
        .collect())
}

/// A finite presheaf of sets: element counts per context and restriction
/// maps for every inclusion.
#[derive(Clone, Debug, PartialEq)]
pub struct Presheaf {
    sizes: Vec<usize>,
    maps: HashMap<(ContextId, ContextId), Vec<usize>>,
}

impl Presheaf {
    /// Builds from maps on Hasse edges `(sub, sup)`; composites along chains
    /// are computed here and every pair of paths must agree.
    pub fn from_edges(
        poset: &ContextPoset,
        sizes: Vec<usize>,
        edges: &HashMap<(ContextId, ContextId), Vec<usize>>,
    ) -> Result<Self> {
        if sizes.len() != poset.len() {
            return Err(Error::NotFunctorial(
                "one value set per context required".into(),
            ));
        }
        let mut order: Vec<ContextId> = poset.ids().collect();
        order.sort_by_key(|&v| poset.down_set(v).len());
        let mut maps: HashMap<(ContextId, ContextId), Vec<usize>> = HashMap::new();
        for &sup in &order {
            maps.insert((sup, sup), (0..sizes[sup.0]).collect());
            for &cover in poset.lower_covers(sup) {
                let edge = edges.get(&(cover, sup)).ok_or_else(|| {
                    Error::NotFunctorial(format!("missing edge map {cover} → {sup}"))
                })?;
                if edge.len() != sizes[sup.0] || edge.iter().any(|&x| x >= sizes[cover.0]) {
                    return Err(Error::NotFunctorial(format!(
                        "edge {cover} → {sup} ill-typed"
                    )));
                }
                for &sub in poset.down_set(cover) {
                    let inner = &maps[&(sub, cover)];
                    let composed: Vec<usize> = edge.iter().map(|&x| inner[x]).collect();
                    match maps.get(&(sub, sup)) {
                        Some(existing) if *existing != composed => {
                            return Err(Error::NotFunctorial(format!(
                                "paths {sub} → {sup} disagree"
                            )))
                        }
                        _ => {
                            maps.insert((sub, sup), composed);
                        }
                    }
                }
            }
        }
        Ok(Self { sizes, maps })
    }

    /// Builds from a restriction function defined on every inclusion and
    /// checks identities and composition.
    pub fn from_fn(
        poset: &ContextPoset,
        sizes: Vec<usize>,
        f: impl Fn(ContextId, ContextId, usize) -> usize,
    ) -> Result<Self> {
        if sizes.len() != poset.len() {
            return Err(Error::NotFunctorial(
                "one value set per context required".into(),
            ));
        }
        let mut maps = HashMap::new();
        for sup in poset.ids() {
            for &sub in poset.down_set(sup) {
                let m: Vec<usize> = (0..sizes[sup.0]).map(|x| f(sub, sup, x)).collect();
                if m.iter().any(|&y| y >= sizes[sub.0]) {
                    return Err(Error::NotFunctorial(format!("map {sub} → {sup} ill-typed")));
                }
                maps.insert((sub, sup), m);
            }
        }
        let q = Self { sizes, maps };
        q.check_functorial(poset)?;
        Ok(q)
    }

    pub fn check_functorial(&self, poset: &ContextPoset) -> Result<()> {
        for v in poset.ids() {
            if self.maps[&(v, v)] != (0..self.sizes[v.0]).collect::<Vec<_>>() {
                return Err(Error::NotFunctorial(format!(
                    "restriction {v} → {v} is not identity"
                )));
            }
        }
        for c in poset.ids() {
            for &b in poset.down_set(c) {
                for &a in poset.down_set(b) {
                    let direct = &self.maps[&(a, c)];
                    let (ab, bc) = (&self.maps[&(a, b)], &self.maps[&(b, c)]);
                    if (0..self.sizes[c.0]).any(|x| direct[x] != ab[bc[x]]) {
                        return Err(Error::NotFunctorial(format!("{a} ⊆ {b} ⊆ {c}")));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn size(&self, v: ContextId) -> usize {
        self.sizes[v.0]
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    /// `Q(sub ↪ sup)(x)`.
    pub fn restrict(&self, sub: ContextId, sup: ContextId, x: usize) -> usize {
        self.maps[&(sub, sup)][x]
    }

    pub fn map(&self, sub: ContextId, sup: ContextId) -> Option<&[usize]> {
        self.maps.get(&(sub, sup)).map(|m| m.as_slice())
    }

    /// Presheaf whose value at `V` is `U/≈_V`, where `≈_V` identifies points
    /// on which every labeling of `↓V` agrees. Smaller contexts see fewer
    /// labelings, so restrictions are the quotient maps.
    pub fn quotient(poset: &ContextPoset, labelings: &[Vec<usize>]) -> Result<Self> {
        if labelings.len() != poset.len() {
            return Err(Error::NotFunctorial(
                "one labeling per context required".into(),
            ));
        }
        let universe = labelings.first().map_or(0, |l| l.len());
        let signature = |v: ContextId, u: usize| -> Vec<usize> {
            poset
                .down_set(v)
                .iter()
                .map(|w| labelings[w.0][u])
                .collect()
        };
        let mut classes: Vec<Vec<Vec<usize>>> = Vec::new();
        for v in poset.ids() {
            let mut sigs: Vec<Vec<usize>> = (0..universe).map(|u| signature(v, u)).collect();
            sigs.sort();
            sigs.dedup();
            classes.push(sigs);
        }
        let class_of = |v: ContextId, u: usize| -> usize {
            classes[v.0]
                .binary_search(&signature(v, u))
                .expect("signature present")
        };
        let representative: Vec<Vec<usize>> = poset
            .ids()
            .map(|v| {
                (0..classes[v.0].len())
                    .map(|k| (0..universe).find(|&u| class_of(v, u) == k).unwrap())
                    .collect()
            })
            .collect();
        let sizes = classes.iter().map(|c| c.len()).collect();
        Self::from_fn(poset, sizes, |sub, sup, x| {
            class_of(sub, representative[sup.0][x])
        })
    }

    /// Componentwise product `Q₁ × Q₂`, elements encoded as `a·|Q₂(V)| + b`.
    pub fn product(&self, other: &Self, poset: &ContextPoset) -> Result<Self> {
        Self::from_fn(
            poset,
            self.sizes
                .iter()
                .zip(&other.sizes)
                .map(|(a, b)| a * b)
                .collect(),
            |sub, sup, x| {
                let (a, b) = (x / other.sizes[sup.0], x % other.sizes[sup.0]);
                self.restrict(sub, sup, a) * other.sizes[sub.0] + other.restrict(sub, sup, b)
            },
        )
    }
}

/// `(♭*Q)(V) = Q(♭V)`.
pub fn pullback_selector(poset: &ContextPoset, flat: &Selector, q: &Presheaf) -> Presheaf {
    let sizes = poset.ids().map(|v| q.size(flat.apply(v))).collect();
    let mut maps = HashMap::new();
    for sup in poset.ids() {
        for &sub in poset.down_set(sup) {
            let m = q.maps[&(flat.apply(sub), flat.apply(sup))].clone();
            maps.insert((sub, sup), m);
        }
    }
    Presheaf { sizes, maps }
}

/// Subpresheaf as per-context element sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subpresheaf {
    sets: Vec<BTreeSet<usize>>,
}

impl Subpresheaf {
    pub fn new(poset: &ContextPoset, q: &Presheaf, sets: Vec<BTreeSet<usize>>) -> Result<Self> {
        if sets.len() != poset.len() {
            return Err(Error::NotASubpresheaf(
                "one set per context required".into(),
            ));
        }
        for v in poset.ids() {
            if sets[v.0].iter().any(|&x| x >= q.size(v)) {
                return Err(Error::NotASubpresheaf(format!("element outside Q({v})")));
            }
            for &w in poset.down_set(v) {
                if sets[v.0]
                    .iter()
                    .any(|&x| !sets[w.0].contains(&q.restrict(w, v, x)))
                {
                    return Err(Error::NotASubpresheaf(format!(
                        "not closed under {w} ⊆ {v}"
                    )));
                }
            }
        }
        Ok(Self { sets })
    }

    pub fn full(q: &Presheaf) -> Self {
        Self {
            sets: q.sizes.iter().map(|&n| (0..n).collect()).collect(),
        }
    }

    pub fn empty(poset: &ContextPoset) -> Self {
        Self {
            sets: vec![BTreeSet::new(); poset.len()],
        }
    }

    pub fn at(&self, v: ContextId) -> &BTreeSet<usize> {
        &self.sets[v.0]
    }

    pub fn leq(&self, other: &Self) -> bool {
        self.sets
            .iter()
            .zip(&other.sets)
            .all(|(a, b)| a.is_subset(b))
    }

    pub fn meet(&self, other: &Self) -> Self {
        Self {
            sets: self
                .sets
                .iter()
                .zip(&other.sets)
                .map(|(a, b)| a & b)
                .collect(),
        }
    }
}

/// `S̄(V) = {q ∈ Q(V) | Q(♭V ↪ V)(q) ∈ S(♭V)}`.
pub fn closure(
    poset: &ContextPoset,
    flat: &Selector,
    q: &Presheaf,
    s: &Subpresheaf,
) -> Subpresheaf {
    let sets = poset
        .ids()
        .map(|v| {
            let fv = flat.apply(v);
            (0..q.size(v))
                .filter(|&x| s.sets[fv.0].contains(&q.restrict(fv, v, x)))
                .collect()
        })
        .collect();
    Subpresheaf { sets }
}

/// Natural transformation between finite presheaves.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NatTrans {
    components: Vec<Vec<usize>>,
}

impl NatTrans {
    pub fn new(
        poset: &ContextPoset,
        source: &Presheaf,
        target: &Presheaf,
        components: Vec<Vec<usize>>,
    ) -> Result<Self> {
        let t = Self { components };
        t.check_naturality(poset, source, target)?;
        Ok(t)
    }

    pub fn component(&self, v: ContextId) -> &[usize] {
        &self.components[v.0]
    }

    pub fn check_naturality(
        &self,
        poset: &ContextPoset,
        source: &Presheaf,
        target: &Presheaf,
    ) -> Result<()> {
        for sup in poset.ids() {
            if self.components[sup.0].len() != source.size(sup) {
                return Err(Error::NaturalityViolation(format!(
                    "component at {sup} ill-typed"
                )));
            }
            for &sub in poset.down_set(sup) {
                for x in 0..source.size(sup) {
                    let a = target.restrict(sub, sup, self.components[sup.0][x]);
                    let b = self.components[sub.0][source.restrict(sub, sup, x)];
                    if a != b {
                        return Err(Error::NaturalityViolation(format!(
                            "square {sub} ⊆ {sup} fails at element {x}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Componentwise bijective, given the target sizes.
    pub fn is_iso(&self, target: &Presheaf) -> bool {
        self.components.iter().enumerate().all(|(v, c)| {
            let image: BTreeSet<usize> = c.iter().copied().collect();
            image.len() == c.len() && c.len() == target.sizes[v]
        })
    }
}

/// `ζ_Q : Q → ♭*Q`, componentwise `Q(♭V ↪ V)`.
pub fn unit_zeta(poset: &ContextPoset, flat: &Selector, q: &Presheaf) -> NatTrans {
    NatTrans {
        components: poset
            .ids()
            .map(|v| {
                (0..q.size(v))
                    .map(|x| q.restrict(flat.apply(v), v, x))
                    .collect()
            })
            .collect(),
    }
}

/// `Q` is a j-sheaf iff `ζ_Q` is an isomorphism.
pub fn is_j_sheaf(poset: &ContextPoset, flat: &Selector, q: &Presheaf) -> bool {
    unit_zeta(poset, flat, q).is_iso(&pullback_selector(poset, flat, q))
}

/// Global element of `Ω` (or `Ω_j`): one sieve per context, natural under
/// restriction.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TruthValue {
    components: Vec<Sieve>,
}

impl TruthValue {
    pub fn new(poset: &ContextPoset, components: Vec<Sieve>) -> Result<Self> {
        if components.len() != poset.len() {
            return Err(Error::NotGlobalElement(
                "one sieve per context required".into(),
            ));
        }
        for (i, s) in components.iter().enumerate() {
            if s.base != ContextId(i) {
                return Err(Error::NotGlobalElement(format!(
                    "component {i} has base {}",
                    s.base
                )));
            }
        }
        let tv = Self { components };
        tv.check_naturality(poset)?;
        Ok(tv)
    }

    /// Components `D ∩ ↓V` of a down-closed set `D` of the whole poset.
    pub fn from_down_set(poset: &ContextPoset, d: &BTreeSet<ContextId>) -> Result<Self> {
        let comps = poset
            .ids()
            .map(|v| Sieve::new(poset, v, d.iter().copied().filter(|&w| poset.leq(w, v))))
            .collect::<Result<Vec<_>>>()?;
        Self::new(poset, comps)
    }

    pub fn top(poset: &ContextPoset) -> Self {
        Self {
            components: poset.ids().map(|v| Sieve::top(poset, v)).collect(),
        }
    }

    pub fn bottom(poset: &ContextPoset) -> Self {
        Self {
            components: poset.ids().map(Sieve::empty).collect(),
        }
    }

    pub fn at(&self, v: ContextId) -> &Sieve {
        &self.components[v.0]
    }

    pub fn components(&self) -> &[Sieve] {
        &self.components
    }

    pub fn check_naturality(&self, poset: &ContextPoset) -> Result<()> {
        for sup in poset.ids() {
            for &sub in poset.down_set(sup) {
                if self.components[sup.0].restrict(poset, sub)? != self.components[sub.0] {
                    return Err(Error::NotGlobalElement(format!(
                        "component at {sup} restricted to {sub} differs"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn is_in_omega_j(&self, poset: &ContextPoset, flat: &Selector) -> bool {
        self.components
            .iter()
            .all(|s| is_in_omega_j(poset, flat, s))
    }

    pub fn leq(&self, other: &Self) -> bool {
        self.components
            .iter()
            .zip(&other.components)
            .all(|(a, b)| a.members.is_subset(&b.members))
    }

    pub fn meet(&self, other: &Self) -> Self {
        Self {
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a.meet(b).expect("same bases"))
                .collect(),
        }
    }

    pub fn join(&self, other: &Self) -> Self {
        Self {
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a.join(b).expect("same bases"))
                .collect(),
        }
    }

    /// Builds without any check, for probing validators.
    pub fn from_components_unchecked(components: Vec<Sieve>) -> Self {
        Self { components }
    }
}

/// `r : Ω ↠ Ω_j` applied to a global element: `j` on every component.
pub fn r_factor(poset: &ContextPoset, flat: &Selector, nu: &TruthValue) -> Result<TruthValue> {
    nu.check_naturality(poset)?;
    let out = TruthValue {
        components: nu
            .components
            .iter()
            .map(|s| lt_topology_j(poset, flat, s))
            .collect(),
    };
    out.check_naturality(poset)?;
    if let Some(s) = out
        .components
        .iter()
        .find(|s| !is_in_omega_j(poset, flat, s))
    {
        return Err(Error::NotGlobalElement(format!(
            "j-image at {} not in Ω_j",
            s.base
        )));
    }
    Ok(out)
}

/// Every global element of `Ω`: one per down-closed subset of the poset.
pub fn enumerate_global_elements(poset: &ContextPoset, bound: usize) -> Result<Vec<TruthValue>> {
    let all: Vec<ContextId> = poset.ids().collect();
    down_closed_masks(poset, &all, bound)?
        .into_iter()
        .map(|m| {
            let d: BTreeSet<ContextId> = all
                .iter()
                .enumerate()
                .filter(|(i, _)| m >> i & 1 == 1)
                .map(|(_, &v)| v)
                .collect();
            TruthValue::from_down_set(poset, &d)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::QubitFixture;
    use crate::semantics::spectral_presheaf;
    use crate::tolerance::DEFAULT_MAX_ENUM;

    #[test]
    fn sieve_examples() {
        let f = QubitFixture::new();
        let p = &f.poset;
        let top = Sieve::top(p, f.vz);
        let w = Sieve::new(p, f.vz, [p.bottom()]).unwrap();
        assert_eq!(top.meet(&w).unwrap(), w);
        assert_eq!(Sieve::empty(f.vz).implies(&w, p).unwrap(), top);
        let r = Sieve::new(p, f.vz, [p.bottom(), f.vz])
            .unwrap()
            .restrict(p, p.bottom())
            .unwrap();
        assert_eq!(
            r.members().iter().copied().collect::<Vec<_>>(),
            vec![p.bottom()]
        );
        assert!(matches!(
            top.meet(&Sieve::top(p, f.vx)),
            Err(Error::BaseMismatch(..))
        ));
        assert!(Sieve::new(p, f.vz, [f.vz]).is_err());
    }

    #[test]
    fn covering_examples() {
        let f = QubitFixture::new();
        let p = &f.poset;
        for v in p.ids() {
            assert!(covering_j(&f.flat, &Sieve::top(p, v)));
            assert!(!covering_j(&f.flat, &Sieve::empty(v)));
        }
        assert!(covering_j(
            &f.flat,
            &Sieve::new(p, f.vx, [p.bottom()]).unwrap()
        ));
        assert!(!covering_j(
            &f.flat,
            &Sieve::new(p, f.vz, [p.bottom()]).unwrap()
        ));
    }

    #[test]
    fn lt_examples() {
        let f = QubitFixture::new();
        let p = &f.poset;
        for v in p.ids() {
            assert_eq!(
                lt_topology_j(p, &f.flat, &Sieve::top(p, v)),
                Sieve::top(p, v)
            );
        }
        let w = Sieve::new(p, f.vx, [p.bottom()]).unwrap();
        assert_eq!(lt_topology_j(p, &f.flat, &w), Sieve::top(p, f.vx));
        assert!(!is_in_omega_j(p, &f.flat, &w));
    }

    #[test]
    fn omega_j_examples() {
        let f = QubitFixture::new();
        let p = &f.poset;
        let id = f.identity_selector();
        for v in p.ids() {
            let all = enumerate_sieves(p, v, DEFAULT_MAX_ENUM).unwrap();
            assert_eq!(omega_j(p, &id, v, DEFAULT_MAX_ENUM).unwrap(), all);
            assert!(omega_j(p, &f.flat, v, DEFAULT_MAX_ENUM)
                .unwrap()
                .contains(&Sieve::top(p, v)));
        }
        assert_eq!(
            omega_j(p, &f.flat, f.vx, DEFAULT_MAX_ENUM).unwrap().len(),
            2
        );
        assert!(matches!(
            enumerate_sieves(p, f.vx, 1),
            Err(Error::EnumerationTooLarge { size: 2, bound: 1 })
        ));
    }

    #[test]
    fn closure_and_pullback_examples() {
        let f = QubitFixture::new();
        let p = &f.poset;
        let sigma = spectral_presheaf(p);
        let full = Subpresheaf::full(&sigma);
        assert_eq!(closure(p, &f.flat, &sigma, &full), full);
        let id = f.identity_selector();
        let empty = Subpresheaf::empty(p);
        assert_eq!(closure(p, &id, &sigma, &empty), empty);
        let mut sets = vec![BTreeSet::new(); p.len()];
        sets[p.bottom().0].insert(0);
        let s = Subpresheaf::new(p, &sigma, sets).unwrap();
        assert_eq!(closure(p, &f.flat, &sigma, &s).at(f.vx).len(), 2);

        assert_eq!(pullback_selector(p, &id, &sigma), sigma);
        let pulled = pullback_selector(p, &f.flat, &sigma);
        assert_eq!(pulled.size(f.vx), 1);
        assert_eq!(pullback_selector(p, &f.flat, &pulled), pulled);
        assert!(is_j_sheaf(p, &f.flat, &pulled));
        assert!(!is_j_sheaf(p, &f.flat, &sigma));
        assert!(is_j_sheaf(p, &id, &sigma));
        let zeta = unit_zeta(p, &f.flat, &sigma);
        zeta.check_naturality(p, &sigma, &pulled).unwrap();
        assert_eq!(zeta.component(f.vx), &[0, 0]);
    }

    #[test]
    fn r_factor_examples() {
        let f = QubitFixture::new();
        let p = &f.poset;
        assert_eq!(
            r_factor(p, &f.flat, &TruthValue::top(p)).unwrap(),
            TruthValue::top(p)
        );
        let bot = TruthValue::bottom(p);
        assert_eq!(r_factor(p, &f.flat, &bot).unwrap(), bot);
        let nu = TruthValue::from_down_set(p, &[p.bottom()].into_iter().collect()).unwrap();
        assert_eq!(
            r_factor(p, &f.flat, &nu).unwrap().at(f.vx),
            &Sieve::top(p, f.vx)
        );
    }

    #[test]
    fn quotient_presheaf_is_functorial() {
        let f = QubitFixture::new();
        let labelings = vec![vec![0, 0, 1, 1], vec![0, 1, 0, 1], vec![0, 1, 1, 0]];
        let q = Presheaf::quotient(&f.poset, &labelings).unwrap();
        assert_eq!(q.size(f.poset.bottom()), 2);
        assert_eq!(q.size(f.vz), 4);
        let edges: HashMap<_, _> = f
            .poset
            .ids()
            .flat_map(|v| {
                let q = &q;
                f.poset
                    .lower_covers(v)
                    .iter()
                    .map(move |&w| ((w, v), q.map(w, v).unwrap().to_vec()))
            })
            .collect();
        assert_eq!(
            Presheaf::from_edges(&f.poset, q.sizes().to_vec(), &edges).unwrap(),
            q
        );
    }
}
