//! Commutative contexts as partitions of unity, the finite context poset and
//! context selectors.
//!
//! In finite dimension a commutative von Neumann algebra is the linear span
//! of its minimal projections, so a context is stored as that list of atoms.
//! Subsets of atoms (bit masks) are both the projections of the context and
//! the clopen subsets of its Gel'fand spectrum.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::operator::{spectral_decompose, ComplexMatrix, Projection};
use crate::tolerance::epsilon;

/// Subset of the atoms of a context, bit `i` standing for atom `i`.
pub type AtomMask = u64;

/// Largest number of atoms a context may have (the width of [`AtomMask`]).
pub const MAX_ATOMS: usize = 64;

#[derive(Clone, Debug)]
pub struct Context {
    atoms: Vec<Projection>,
}

impl Context {
    /// Validates and canonically orders a list of atoms.
    pub fn from_atoms(mut atoms: Vec<Projection>) -> Result<Self> {
        let Some(first) = atoms.first() else {
            return Err(Error::NotAPartition("no atoms".into()));
        };
        let dim = first.dim();
        if atoms.len() > MAX_ATOMS {
            return Err(Error::NotAPartition(format!("more than {MAX_ATOMS} atoms")));
        }
        for a in &atoms {
            if a.dim() != dim {
                return Err(Error::DimMismatch {
                    expected: dim,
                    found: a.dim(),
                });
            }
            if a.is_zero() {
                return Err(Error::NotAPartition("zero atom".into()));
            }
        }
        for i in 0..atoms.len() {
            for j in i + 1..atoms.len() {
                if atoms[i].overlap(&atoms[j]) > epsilon() {
                    return Err(Error::NotAPartition(format!("atoms {i} and {j} overlap")));
                }
            }
        }
        let sum = Projection::orthogonal_sum(dim, &atoms);
        if !sum.matrix().approx_eq(&ComplexMatrix::identity(dim)) {
            return Err(Error::NotAPartition(
                "atoms do not sum to the identity".into(),
            ));
        }
        atoms.sort_by_key(|a| a.canonical_key());
        Ok(Self { atoms })
    }

    /// The scalar context `ℂ·I`.
    pub fn trivial(dim: usize) -> Self {
        Self {
            atoms: vec![Projection::identity(dim)],
        }
    }

    /// Context generated by a commuting family of Hermitian operators: the
    /// common refinement of their spectral partitions.
    pub fn generate(dim: usize, ops: &[ComplexMatrix]) -> Result<Self> {
        for op in ops {
            if op.dim() != dim {
                return Err(Error::DimMismatch {
                    expected: dim,
                    found: op.dim(),
                });
            }
        }
        for (i, a) in ops.iter().enumerate() {
            for b in &ops[i + 1..] {
                if !a.commutes_with(b) {
                    return Err(Error::NonCommutingGenerators);
                }
            }
        }
        let mut atoms = vec![Projection::identity(dim)];
        for op in ops {
            let sd = spectral_decompose(op)?;
            let mut refined = Vec::new();
            for a in &atoms {
                for p in &sd.projections {
                    let prod = Projection::nearest(&(a.matrix() * p.matrix()));
                    if !prod.is_zero() {
                        refined.push(prod);
                    }
                }
            }
            atoms = refined;
        }
        Self::from_atoms(atoms)
    }

    pub fn atoms(&self) -> &[Projection] {
        &self.atoms
    }

    pub fn atom(&self, i: usize) -> &Projection {
        &self.atoms[i]
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.atoms[0].dim()
    }

    pub fn is_trivial(&self) -> bool {
        self.atoms.len() == 1
    }

    /// Mask of all atoms, i.e. the identity projection.
    pub fn full_mask(&self) -> AtomMask {
        if self.atoms.len() == 64 {
            u64::MAX
        } else {
            (1u64 << self.atoms.len()) - 1
        }
    }

    /// Same partition, compared as sets of atoms.
    pub fn same_as(&self, other: &Self) -> bool {
        self.dim() == other.dim()
            && self.len() == other.len()
            && self
                .atoms
                .iter()
                .all(|a| other.atoms.iter().any(|b| a == b))
    }

    /// Index of the atom dominating `p`, if any.
    pub fn dominating_atom(&self, p: &Projection) -> Option<usize> {
        self.atoms.iter().position(|a| p.leq(a).unwrap_or(false))
    }

    /// Whether `self ⊆ sup`: every atom of `self` is the sum of the atoms of
    /// `sup` it dominates.
    pub fn is_included_in(&self, sup: &Self) -> Result<bool> {
        if self.dim() != sup.dim() {
            return Err(Error::DimMismatch {
                expected: sup.dim(),
                found: self.dim(),
            });
        }
        Ok(self.atoms.iter().all(|a| {
            let below = sup.atoms.iter().filter(|b| b.leq(a).unwrap_or(false));
            Projection::orthogonal_sum(self.dim(), below) == *a
        }))
    }

    pub fn projection_of(&self, mask: AtomMask) -> Projection {
        let parts = self
            .atoms
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1);
        Projection::orthogonal_sum(self.dim(), parts.map(|(_, a)| a))
    }

    /// Inverse of [`Context::projection_of`]; `None` if `p ∉ 𝒫(V)`.
    pub fn mask_of(&self, p: &Projection) -> Option<AtomMask> {
        let mask = self
            .atoms
            .iter()
            .enumerate()
            .filter(|(_, a)| a.leq(p).unwrap_or(false))
            .fold(0u64, |m, (i, _)| m | 1 << i);
        (self.projection_of(mask) == *p).then_some(mask)
    }

    /// Smallest projection of the context dominating `e`: the atoms that are
    /// not orthogonal to it.
    pub fn outer_mask(&self, e: &Projection) -> AtomMask {
        let eps = epsilon();
        self.atoms
            .iter()
            .enumerate()
            .filter(|(_, a)| a.overlap(e) > eps)
            .fold(0u64, |m, (i, _)| m | 1 << i)
    }

    /// Whether `A` lies in the algebra: `A = Σ (tr(A a)/rank a)·a` within ε.
    pub fn contains_operator(&self, op: &ComplexMatrix) -> bool {
        if op.dim() != self.dim() {
            return false;
        }
        let mut acc = ComplexMatrix::zeros(self.dim());
        for a in &self.atoms {
            let coeff = (op * a.matrix()).trace() / Complex64::new(a.rank() as f64, 0.0);
            acc = &acc + &a.matrix().scale(coeff);
        }
        acc.distance(op) <= epsilon()
    }

    /// Largest context contained in both: merge atoms of `self` until every
    /// atom of `other` overlaps a single group.
    pub fn meet(&self, other: &Self) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        let n = self.len();
        let mut group: Vec<usize> = (0..n).collect();
        let eps = epsilon();
        loop {
            let mut changed = false;
            for b in &other.atoms {
                let touching: Vec<usize> = (0..n)
                    .filter(|&i| self.atoms[i].overlap(b) > eps)
                    .map(|i| group[i])
                    .collect();
                if let Some(&target) = touching.iter().min() {
                    for g in group.iter_mut() {
                        if touching.contains(g) && *g != target {
                            *g = target;
                            changed = true;
                        }
                    }
                }
            }
            if !changed {
                break;
            }
        }
        let mut buckets: BTreeMap<usize, Vec<&Projection>> = BTreeMap::new();
        for (i, g) in group.iter().enumerate() {
            buckets.entry(*g).or_default().push(&self.atoms[i]);
        }
        let atoms = buckets
            .into_values()
            .map(|ps| Projection::orthogonal_sum(self.dim(), ps))
            .collect();
        Self::from_atoms(atoms)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ContextId(pub usize);

impl fmt::Display for ContextId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// How a selector is declared before the poset exists.
#[derive(Clone, Debug)]
pub enum SelectorSpec {
    Identity,
    /// `♭_S` for the given operator set `S`.
    Operators(Vec<ComplexMatrix>),
    /// Label-to-label map; unlisted contexts are fixed.
    Explicit(Vec<(String, String)>),
}

/// Finite poset of contexts ordered by inclusion, with the scalar context as
/// bottom.
#[derive(Clone, Debug)]
pub struct ContextPoset {
    dim: usize,
    contexts: Vec<Context>,
    labels: Vec<String>,
    aliases: BTreeMap<String, ContextId>,
    leq: Vec<Vec<bool>>,
    down: Vec<Vec<ContextId>>,
    lower_covers: Vec<Vec<ContextId>>,
    restriction: HashMap<(usize, usize), Vec<usize>>,
}

impl ContextPoset {
    /// Poset of the trivial context, the generated contexts, their iterated
    /// pairwise meets, closed under every operator selector.
    pub fn build(
        dim: usize,
        generator_sets: &[(String, Vec<ComplexMatrix>)],
        selectors: &[SelectorSpec],
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::MalformedMatrix);
        }
        let mut contexts = vec![Context::trivial(dim)];
        let mut labels = vec!["bottom".to_string()];
        let mut aliases = BTreeMap::new();
        aliases.insert("bottom".to_string(), ContextId(0));

        fn insert(
            contexts: &mut Vec<Context>,
            labels: &mut Vec<String>,
            ctx: Context,
            label: String,
        ) -> (usize, bool) {
            if let Some(i) = contexts.iter().position(|c| c.same_as(&ctx)) {
                return (i, false);
            }
            contexts.push(ctx);
            labels.push(label);
            (contexts.len() - 1, true)
        }

        for (label, ops) in generator_sets {
            let ctx = Context::generate(dim, ops)?;
            let (i, _) = insert(&mut contexts, &mut labels, ctx, label.clone());
            aliases.entry(label.clone()).or_insert(ContextId(i));
        }

        let op_sets: Vec<&Vec<ComplexMatrix>> = selectors
            .iter()
            .filter_map(|s| match s {
                SelectorSpec::Operators(ops) => Some(ops),
                _ => None,
            })
            .collect();
        for ops in &op_sets {
            for op in ops.iter() {
                if op.dim() != dim {
                    return Err(Error::DimMismatch {
                        expected: dim,
                        found: op.dim(),
                    });
                }
            }
        }

        loop {
            let mut grew = false;
            let n = contexts.len();
            for i in 0..n {
                for j in i + 1..n {
                    let m = contexts[i].meet(&contexts[j])?;
                    let label = format!("meet({},{})", labels[i], labels[j]);
                    grew |= insert(&mut contexts, &mut labels, m, label).1;
                }
            }
            for ops in &op_sets {
                for i in 0..contexts.len() {
                    let img = flat_by_operators(ops, &contexts[i])?;
                    let label = format!("flat({})", labels[i]);
                    grew |= insert(&mut contexts, &mut labels, img, label).1;
                }
            }
            if !grew {
                break;
            }
        }
        for (i, l) in labels.iter().enumerate() {
            aliases.entry(l.clone()).or_insert(ContextId(i));
        }
        Self::from_parts(dim, contexts, labels, aliases)
    }

    /// Poset over an explicit list of labeled contexts; the trivial context
    /// is added if absent. No meet or selector closure is performed.
    pub fn from_contexts(dim: usize, labeled: Vec<(String, Context)>) -> Result<Self> {
        let mut contexts = vec![Context::trivial(dim)];
        let mut labels = vec!["bottom".to_string()];
        let mut aliases = BTreeMap::new();
        aliases.insert("bottom".to_string(), ContextId(0));
        for (label, ctx) in labeled {
            if ctx.dim() != dim {
                return Err(Error::DimMismatch {
                    expected: dim,
                    found: ctx.dim(),
                });
            }
            let id = match contexts.iter().position(|c| c.same_as(&ctx)) {
                Some(i) => i,
                None => {
                    contexts.push(ctx);
                    labels.push(label.clone());
                    contexts.len() - 1
                }
            };
            aliases.entry(label).or_insert(ContextId(id));
        }
        Self::from_parts(dim, contexts, labels, aliases)
    }

    fn from_parts(
        dim: usize,
        contexts: Vec<Context>,
        labels: Vec<String>,
        aliases: BTreeMap<String, ContextId>,
    ) -> Result<Self> {
        let n = contexts.len();
        let mut leq = vec![vec![false; n]; n];
        for a in 0..n {
            for b in 0..n {
                leq[a][b] = a == b || contexts[a].is_included_in(&contexts[b])?;
            }
        }
        let down: Vec<Vec<ContextId>> = (0..n)
            .map(|v| (0..n).filter(|&w| leq[w][v]).map(ContextId).collect())
            .collect();
        let lower_covers = (0..n)
            .map(|v| {
                (0..n)
                    .filter(|&w| w != v && leq[w][v])
                    .filter(|&w| !(0..n).any(|u| u != v && u != w && leq[w][u] && leq[u][v]))
                    .map(ContextId)
                    .collect()
            })
            .collect();
        let mut restriction = HashMap::new();
        for sup in 0..n {
            for sub in 0..n {
                if leq[sub][sup] {
                    let map = contexts[sup]
                        .atoms()
                        .iter()
                        .map(|a| {
                            contexts[sub]
                                .dominating_atom(a)
                                .ok_or(Error::NoDominatingAtom)
                        })
                        .collect::<Result<Vec<_>>>()?;
                    restriction.insert((sub, sup), map);
                }
            }
        }
        Ok(Self {
            dim,
            contexts,
            labels,
            aliases,
            leq,
            down,
            lower_covers,
            restriction,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.contexts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.contexts.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = ContextId> + '_ {
        (0..self.contexts.len()).map(ContextId)
    }

    pub fn bottom(&self) -> ContextId {
        ContextId(0)
    }

    pub fn context(&self, id: ContextId) -> &Context {
        &self.contexts[id.0]
    }

    pub fn label(&self, id: ContextId) -> &str {
        &self.labels[id.0]
    }

    /// Resolves a declared label, an internal label or `#n`.
    pub fn id_of(&self, label: &str) -> Result<ContextId> {
        if let Some(id) = self.aliases.get(label) {
            return Ok(*id);
        }
        if let Some(n) = label
            .strip_prefix('#')
            .and_then(|s| s.parse::<usize>().ok())
        {
            if n < self.len() {
                return Ok(ContextId(n));
            }
        }
        Err(Error::UnknownContext(label.to_string()))
    }

    pub fn find(&self, ctx: &Context) -> Option<ContextId> {
        self.contexts
            .iter()
            .position(|c| c.same_as(ctx))
            .map(ContextId)
    }

    /// `sub ⊆ sup`.
    pub fn leq(&self, sub: ContextId, sup: ContextId) -> bool {
        self.leq[sub.0][sup.0]
    }

    /// `↓V`, in ascending id order.
    pub fn down_set(&self, v: ContextId) -> &[ContextId] {
        &self.down[v.0]
    }

    /// Immediate predecessors of `v` (Hasse edges).
    pub fn lower_covers(&self, v: ContextId) -> &[ContextId] {
        &self.lower_covers[v.0]
    }

    /// For each atom of `sup`, the index of the atom of `sub` dominating it.
    pub fn restriction_map(&self, sub: ContextId, sup: ContextId) -> Result<&[usize]> {
        self.restriction
            .get(&(sub.0, sup.0))
            .map(|v| v.as_slice())
            .ok_or(Error::NotIncluded { sub, sup })
    }

    /// Image of an atom set of `sup` in `sub` under spectral restriction.
    pub fn restrict_mask(
        &self,
        mask: AtomMask,
        sub: ContextId,
        sup: ContextId,
    ) -> Result<AtomMask> {
        let map = self.restriction_map(sub, sup)?;
        Ok(map
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .fold(0, |m, (_, &j)| m | 1 << j))
    }

    /// Total number of spectrum points over the given contexts.
    pub fn atom_count(&self, ids: &[ContextId]) -> usize {
        ids.iter().map(|&v| self.context(v).len()).sum()
    }
}

/// `♭_S(V)`: context generated by the Hermitian and skew parts of those
/// members of `S ∪ S*` lying in `V`.
pub fn flat_by_operators(ops: &[ComplexMatrix], v: &Context) -> Result<Context> {
    let mut gens = Vec::new();
    for op in ops {
        if v.contains_operator(op) {
            gens.push(op.hermitian_part());
            gens.push(op.skew_part());
        }
    }
    Context::generate(v.dim(), &gens)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SelectorViolation {
    NotDecreasing(ContextId),
    NotIdempotent(ContextId),
    NotMonotone { sub: ContextId, sup: ContextId },
}

impl fmt::Display for SelectorViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::NotDecreasing(v) => write!(f, "♭({v}) is not contained in {v}"),
            Self::NotIdempotent(v) => write!(f, "♭♭({v}) ≠ ♭({v})"),
            Self::NotMonotone { sub, sup } => {
                write!(f, "{sub} ⊆ {sup} but ♭({sub}) ⊄ ♭({sup})")
            }
        }
    }
}

/// Context-selection endomap `♭` on a poset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Selector {
    map: Vec<ContextId>,
}

impl Selector {
    pub fn identity(poset: &ContextPoset) -> Self {
        Self {
            map: poset.ids().collect(),
        }
    }

    pub fn constant_bottom(poset: &ContextPoset) -> Self {
        Self {
            map: vec![poset.bottom(); poset.len()],
        }
    }

    /// Map without any validation, for probing the validator.
    pub fn from_map_unchecked(map: Vec<ContextId>) -> Self {
        Self { map }
    }

    /// Checks a map against the selector axioms.
    pub fn from_map(map: Vec<ContextId>, poset: &ContextPoset) -> Result<Self> {
        if map.len() != poset.len() || map.iter().any(|v| v.0 >= poset.len()) {
            return Err(Error::InvalidSelector(
                "map is not total on the poset".into(),
            ));
        }
        Self { map }.validated(poset)
    }

    pub fn explicit(pairs: &[(String, String)], poset: &ContextPoset) -> Result<Self> {
        let mut map: Vec<ContextId> = poset.ids().collect();
        for (from, to) in pairs {
            map[poset.id_of(from)?.0] = poset.id_of(to)?;
        }
        Self::from_map(map, poset)
    }

    /// `♭_S`, rejected if an image falls outside the poset or an axiom fails.
    pub fn from_operators(ops: &[ComplexMatrix], poset: &ContextPoset) -> Result<Self> {
        let mut map = Vec::with_capacity(poset.len());
        for v in poset.ids() {
            let img = flat_by_operators(ops, poset.context(v))?;
            map.push(
                poset
                    .find(&img)
                    .ok_or(Error::SelectorImageOutsidePoset(v))?,
            );
        }
        Self { map }.validated(poset)
    }

    pub fn from_spec(spec: &SelectorSpec, poset: &ContextPoset) -> Result<Self> {
        match spec {
            SelectorSpec::Identity => Ok(Self::identity(poset)),
            SelectorSpec::Operators(ops) => Self::from_operators(ops, poset),
            SelectorSpec::Explicit(pairs) => Self::explicit(pairs, poset),
        }
    }

    fn validated(self, poset: &ContextPoset) -> Result<Self> {
        match self.validate(poset).into_iter().next() {
            None => Ok(self),
            Some(SelectorViolation::NotIdempotent(v)) => Err(Error::SelectorNotIdempotent(v)),
            Some(other) => Err(Error::InvalidSelector(other.to_string())),
        }
    }

    pub fn apply(&self, v: ContextId) -> ContextId {
        self.map[v.0]
    }

    pub fn map(&self) -> &[ContextId] {
        &self.map
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(i, v)| v.0 == i)
    }

    pub fn is_fixpoint(&self, v: ContextId) -> bool {
        self.apply(v) == v
    }

    /// The ♭-selected contexts.
    pub fn fixpoints(&self) -> Vec<ContextId> {
        (0..self.map.len())
            .map(ContextId)
            .filter(|&v| self.is_fixpoint(v))
            .collect()
    }

    /// All violations of decrease, idempotence and monotonicity.
    pub fn validate(&self, poset: &ContextPoset) -> Vec<SelectorViolation> {
        let mut out = Vec::new();
        if self.map.len() != poset.len() {
            return vec![SelectorViolation::NotDecreasing(ContextId(self.map.len()))];
        }
        for v in poset.ids() {
            if !poset.leq(self.apply(v), v) {
                out.push(SelectorViolation::NotDecreasing(v));
            }
            if self.apply(self.apply(v)) != self.apply(v) {
                out.push(SelectorViolation::NotIdempotent(v));
            }
        }
        for sup in poset.ids() {
            for &sub in poset.down_set(sup) {
                if !poset.leq(self.apply(sub), self.apply(sup)) {
                    out.push(SelectorViolation::NotMonotone { sub, sup });
                }
            }
        }
        out
    }
}

/// A point of the Gel'fand spectrum: an atom of a context.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SpectrumElement {
    pub context: ContextId,
    pub atom: usize,
}

/// Restriction of a spectrum point to a smaller context: the unique atom
/// there dominating it.
pub fn gelfand_restrict(
    poset: &ContextPoset,
    sigma: SpectrumElement,
    target: ContextId,
) -> Result<SpectrumElement> {
    if !poset.leq(target, sigma.context) {
        return Err(Error::NotIncluded {
            sub: target,
            sup: sigma.context,
        });
    }
    let atom = poset
        .context(target)
        .dominating_atom(poset.context(sigma.context).atom(sigma.atom))
        .ok_or(Error::NoDominatingAtom)?;
    Ok(SpectrumElement {
        context: target,
        atom,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{pauli_x, pauli_z};

    fn qubit() -> ContextPoset {
        ContextPoset::build(
            2,
            &[
                ("Vz".into(), vec![pauli_z()]),
                ("Vx".into(), vec![pauli_x()]),
            ],
            &[],
        )
        .unwrap()
    }

    #[test]
    fn generate_examples() {
        let vz = Context::generate(2, &[pauli_z()]).unwrap();
        assert_eq!(vz.len(), 2);
        assert!(vz.atoms().iter().all(|a| a.rank() == 1));
        assert!(Context::generate(2, &[]).unwrap().is_trivial());
        let zi = pauli_z().kron(&ComplexMatrix::identity(2));
        let iz = ComplexMatrix::identity(2).kron(&pauli_z());
        let v4 = Context::generate(4, &[zi, iz]).unwrap();
        assert_eq!(v4.len(), 4);
        assert!(v4.atoms().iter().all(|a| a.rank() == 1));
        assert_eq!(
            Context::generate(2, &[pauli_z(), pauli_x()]).unwrap_err(),
            Error::NonCommutingGenerators
        );
    }

    #[test]
    fn inclusion_examples() {
        let vz = Context::generate(2, &[pauli_z()]).unwrap();
        let vx = Context::generate(2, &[pauli_x()]).unwrap();
        assert!(Context::trivial(2).is_included_in(&vz).unwrap());
        assert!(!vz.is_included_in(&vx).unwrap());
        assert!(vz.is_included_in(&vz).unwrap());
        assert!(matches!(
            vz.is_included_in(&Context::trivial(3)),
            Err(Error::DimMismatch { .. })
        ));
    }

    #[test]
    fn build_examples() {
        let p = qubit();
        assert_eq!(p.len(), 3);
        let (vz, vx) = (p.id_of("Vz").unwrap(), p.id_of("Vx").unwrap());
        assert!(p.leq(p.bottom(), vz) && p.leq(p.bottom(), vx));
        assert!(!p.leq(vz, vx) && !p.leq(vx, vz));
        assert_eq!(ContextPoset::build(2, &[], &[]).unwrap().len(), 1);
        let dup = ContextPoset::build(
            2,
            &[("a".into(), vec![pauli_z()]), ("b".into(), vec![pauli_z()])],
            &[],
        )
        .unwrap();
        assert_eq!(dup.len(), 2);
        assert_eq!(dup.id_of("a").unwrap(), dup.id_of("b").unwrap());
    }

    #[test]
    fn operator_selector_examples() {
        let p = qubit();
        let (vz, vx) = (p.id_of("Vz").unwrap(), p.id_of("Vx").unwrap());
        let flat = Selector::from_operators(&[pauli_z()], &p).unwrap();
        assert_eq!(flat.apply(vz), vz);
        assert_eq!(flat.apply(vx), p.bottom());
        assert_eq!(flat.apply(p.bottom()), p.bottom());
        assert_eq!(
            Selector::from_operators(&[], &p).unwrap(),
            Selector::constant_bottom(&p)
        );
        assert_eq!(
            Selector::from_operators(&[ComplexMatrix::identity(2)], &p).unwrap(),
            Selector::constant_bottom(&p)
        );
    }

    #[test]
    fn validation_examples() {
        let p = qubit();
        assert!(Selector::identity(&p).validate(&p).is_empty());
        assert!(Selector::constant_bottom(&p).validate(&p).is_empty());
        let (vz, vx) = (p.id_of("Vz").unwrap(), p.id_of("Vx").unwrap());
        let mut map: Vec<ContextId> = p.ids().collect();
        map[vz.0] = vx;
        let bad = Selector::from_map_unchecked(map.clone());
        assert!(bad
            .validate(&p)
            .contains(&SelectorViolation::NotDecreasing(vz)));
        assert!(Selector::from_map(map, &p).is_err());
    }

    #[test]
    fn restriction_examples() {
        let p = qubit();
        let vz = p.id_of("Vz").unwrap();
        for atom in 0..2 {
            let s = SpectrumElement { context: vz, atom };
            assert_eq!(gelfand_restrict(&p, s, p.bottom()).unwrap().atom, 0);
            assert_eq!(gelfand_restrict(&p, s, vz).unwrap(), s);
        }
        let vx = p.id_of("Vx").unwrap();
        assert!(matches!(
            gelfand_restrict(
                &p,
                SpectrumElement {
                    context: vz,
                    atom: 0
                },
                vx
            ),
            Err(Error::NotIncluded { .. })
        ));
    }

    #[test]
    fn two_qubit_restriction() {
        let zi = pauli_z().kron(&ComplexMatrix::identity(2));
        let iz = ComplexMatrix::identity(2).kron(&pauli_z());
        let p = ContextPoset::build(
            4,
            &[
                ("full".into(), vec![zi.clone(), iz]),
                ("zi".into(), vec![zi]),
            ],
            &[],
        )
        .unwrap();
        let (full, zi_ctx) = (p.id_of("full").unwrap(), p.id_of("zi").unwrap());
        let e1 = Projection::new(ComplexMatrix::diag(&[1.0, 0.0, 0.0, 0.0])).unwrap();
        let atom = p.context(full).mask_of(&e1).unwrap().trailing_zeros() as usize;
        let img = gelfand_restrict(
            &p,
            SpectrumElement {
                context: full,
                atom,
            },
            zi_ctx,
        )
        .unwrap();
        // brute force: the atom of the σ_z⊗I context that contains e₁ is span(e₁, e₂)
        let expected = ComplexMatrix::diag(&[1.0, 1.0, 0.0, 0.0]);
        assert!(p
            .context(zi_ctx)
            .atom(img.atom)
            .matrix()
            .approx_eq(&expected));
    }

    #[test]
    fn meet_is_common_coarsening() {
        let zi = pauli_z().kron(&ComplexMatrix::identity(2));
        let iz = ComplexMatrix::identity(2).kron(&pauli_z());
        let xi = pauli_x().kron(&ComplexMatrix::identity(2));
        let a = Context::generate(4, &[zi.clone(), iz.clone()]).unwrap();
        let b = Context::generate(4, &[xi, iz.clone()]).unwrap();
        let m = a.meet(&b).unwrap();
        assert!(m.same_as(&Context::generate(4, &[iz]).unwrap()));
        assert!(m.is_included_in(&a).unwrap() && m.is_included_in(&b).unwrap());
    }

    #[test]
    fn clopen_bijection_round_trip() {
        let vz = Context::generate(2, &[pauli_z()]).unwrap();
        for mask in 0..4u64 {
            let p = vz.projection_of(mask);
            assert_eq!(vz.mask_of(&p), Some(mask));
        }
        let px =
            Projection::new(ComplexMatrix::from_real_rows(&[&[0.5, 0.5], &[0.5, 0.5]]).unwrap())
                .unwrap();
        assert_eq!(vz.mask_of(&px), None);
        assert_eq!(vz.outer_mask(&px), 3);
    }
}
