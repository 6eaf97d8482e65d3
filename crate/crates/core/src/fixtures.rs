//! Small reference systems: a qubit with the `σ_z` selector and a spin-1
//! system with three maximal contexts, plus seeded random states.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use std::collections::BTreeMap;

use crate::context::{ContextId, ContextPoset, Selector, SelectorSpec};
use crate::error::Result;
use crate::interval::StepFn;
use crate::operator::{
    spectral_projection, BorelSelection, ComplexMatrix, DensityMatrix, Projection,
};
use crate::product::StepClopen;
use crate::semantics::enumerate_j_clopens;
use crate::sheaf::Presheaf;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap()
}

pub fn pauli_y() -> ComplexMatrix {
    ComplexMatrix::from_rows(&[
        vec![c(0.0, 0.0), c(0.0, -1.0)],
        vec![c(0.0, 1.0), c(0.0, 0.0)],
    ])
    .unwrap()
}

pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::diag(&[1.0, -1.0])
}

pub fn spin1_z() -> ComplexMatrix {
    ComplexMatrix::diag(&[1.0, 0.0, -1.0])
}

pub fn spin1_x() -> ComplexMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    ComplexMatrix::from_real_rows(&[&[0.0, s, 0.0], &[s, 0.0, s], &[0.0, s, 0.0]]).unwrap()
}

pub fn spin1_y() -> ComplexMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let z = c(0.0, 0.0);
    ComplexMatrix::from_rows(&[
        vec![z, c(0.0, -s), z],
        vec![c(0.0, s), z, c(0.0, -s)],
        vec![z, c(0.0, s), z],
    ])
    .unwrap()
}

/// Qubit contexts `{ℂI, V_z, V_x}` with `♭ = ♭_{σ_z}`.
pub struct QubitFixture {
    pub poset: ContextPoset,
    pub flat: Selector,
    pub vz: ContextId,
    pub vx: ContextId,
    pub p_z: Projection,
    pub p_x: Projection,
    pub rho0: DensityMatrix,
    pub rho1: DensityMatrix,
    pub rho_x: DensityMatrix,
    pub rho_mix: DensityMatrix,
}

impl QubitFixture {
    pub fn new() -> Self {
        let poset = ContextPoset::build(
            2,
            &[
                ("Vz".into(), vec![pauli_z()]),
                ("Vx".into(), vec![pauli_x()]),
            ],
            &[SelectorSpec::Operators(vec![pauli_z()])],
        )
        .expect("qubit poset");
        let flat = Selector::from_operators(&[pauli_z()], &poset).expect("σ_z selector");
        let vz = poset.id_of("Vz").unwrap();
        let vx = poset.id_of("Vx").unwrap();
        let up = BorelSelection::Values(vec![1.0]);
        let p_z = spectral_projection(&pauli_z(), &up).unwrap();
        let p_x = spectral_projection(&pauli_x(), &up).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            rho0: DensityMatrix::pure(&[c(1.0, 0.0), c(0.0, 0.0)]).unwrap(),
            rho1: DensityMatrix::pure(&[c(0.0, 0.0), c(1.0, 0.0)]).unwrap(),
            rho_x: DensityMatrix::pure(&[c(h, 0.0), c(h, 0.0)]).unwrap(),
            rho_mix: DensityMatrix::maximally_mixed(2),
            poset,
            flat,
            vz,
            vx,
            p_z,
            p_x,
        }
    }

    pub fn identity_selector(&self) -> Selector {
        Selector::identity(&self.poset)
    }
}

impl Default for QubitFixture {
    fn default() -> Self {
        Self::new()
    }
}

/// Spin-1 contexts of `S_x`, `S_y`, `S_z` plus bottom, with `♭ = ♭_{S_z}`.
pub struct Spin1Fixture {
    pub poset: ContextPoset,
    pub flat: Selector,
    pub vx: ContextId,
    pub vy: ContextId,
    pub vz: ContextId,
    /// `|m = +1⟩⟨m = +1|` for `S_z`.
    pub rho_up: DensityMatrix,
    pub rho_mix: DensityMatrix,
}

impl Spin1Fixture {
    pub fn new() -> Self {
        let poset = ContextPoset::build(
            3,
            &[
                ("Vx".into(), vec![spin1_x()]),
                ("Vy".into(), vec![spin1_y()]),
                ("Vz".into(), vec![spin1_z()]),
            ],
            &[SelectorSpec::Operators(vec![spin1_z()])],
        )
        .expect("spin-1 poset");
        let flat = Selector::from_operators(&[spin1_z()], &poset).expect("S_z selector");
        Self {
            vx: poset.id_of("Vx").unwrap(),
            vy: poset.id_of("Vy").unwrap(),
            vz: poset.id_of("Vz").unwrap(),
            rho_up: DensityMatrix::pure(&[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]).unwrap(),
            rho_mix: DensityMatrix::maximally_mixed(3),
            poset,
            flat,
        }
    }
}

impl Default for Spin1Fixture {
    fn default() -> Self {
        Self::new()
    }
}

/// `ρ = GG†/tr(GG†)` for a matrix `G` with uniform entries in the unit square.
pub fn random_density<R: Rng>(dim: usize, rng: &mut R) -> DensityMatrix {
    let rows: Vec<Vec<Complex64>> = (0..dim)
        .map(|_| {
            (0..dim)
                .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect()
        })
        .collect();
    let g = ComplexMatrix::from_rows(&rows).unwrap();
    let gg = &g * &g.adjoint();
    let tr = gg.trace().re;
    let m = gg.scale(c(1.0 / tr, 0.0)).hermitian_part();
    DensityMatrix::new(m).expect("GG† is a density matrix after normalization")
}

/// `count` random densities from a fixed seed.
pub fn random_densities(dim: usize, count: usize, seed: u64) -> Vec<DensityMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_density(dim, &mut rng)).collect()
}

/// Random unit vector with entries drawn from the unit square.
pub fn random_unit_vector<R: Rng>(dim: usize, rng: &mut R) -> Vec<Complex64> {
    loop {
        let v: Vec<Complex64> = (0..dim)
            .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if n > 1e-3 {
            return v.into_iter().map(|z| z / n).collect();
        }
    }
}

/// Contexts generated by every operator of `ops`, one per operator.
pub fn generator_sets(ops: &[(&str, ComplexMatrix)]) -> Vec<(String, Vec<ComplexMatrix>)> {
    ops.iter()
        .map(|(l, m)| (l.to_string(), vec![m.clone()]))
        .collect()
}

/// Builds a poset and its operator selector in one step.
pub fn poset_with_selector(
    dim: usize,
    generators: &[(String, Vec<ComplexMatrix>)],
    selected: &[ComplexMatrix],
) -> Result<(ContextPoset, Selector)> {
    let poset = ContextPoset::build(
        dim,
        generators,
        &[SelectorSpec::Operators(selected.to_vec())],
    )?;
    let flat = Selector::from_operators(selected, &poset)?;
    Ok((poset, flat))
}

/// Random presheaf built as a quotient of a small universe, one random
/// two-valued labeling per context.
pub fn random_presheaf<R: Rng>(poset: &ContextPoset, rng: &mut R) -> Presheaf {
    let universe = rng.gen_range(2..=6);
    let labelings: Vec<Vec<usize>> = poset
        .ids()
        .map(|_| (0..universe).map(|_| rng.gen_range(0..2)).collect())
        .collect();
    Presheaf::quotient(poset, &labelings).expect("one labeling per context")
}

/// Random clopen subsheaf on the product site: a decreasing chain of j-sheaf
/// clopens placed on left-closed pieces between breakpoints that are
/// multiples of 1/8.
pub fn random_step_clopen<R: Rng>(
    poset: &ContextPoset,
    flat: &Selector,
    rng: &mut R,
    bound: usize,
) -> Result<StepClopen> {
    let clopens = enumerate_j_clopens(poset, flat, None, bound)?;
    let pieces = rng.gen_range(1..=3);
    let mut cuts: Vec<u32> = (1..8).collect();
    for i in (1..cuts.len()).rev() {
        cuts.swap(i, rng.gen_range(0..=i));
    }
    let mut cuts: Vec<u32> = cuts.into_iter().take(pieces - 1).collect();
    cuts.sort_unstable();
    let mut breaks = vec![0.0];
    breaks.extend(cuts.iter().map(|&k| f64::from(k) / 8.0));
    breaks.push(1.0);

    let mut chain = vec![clopens[rng.gen_range(0..clopens.len())].clone()];
    for _ in 1..pieces {
        let next = chain
            .last()
            .unwrap()
            .meet(&clopens[rng.gen_range(0..clopens.len())])?;
        chain.push(next);
    }
    let one = Projection::identity(poset.dim());
    let steps = poset
        .ids()
        .map(|v| {
            let values = chain.iter().map(|c| c.at(v).clone()).collect();
            Ok((
                v,
                StepFn::left_closed_steps(breaks.clone(), one.clone(), values)?.normalize(),
            ))
        })
        .collect::<Result<BTreeMap<_, _>>>()?;
    StepClopen::new(poset, flat, steps)
}

/// How [`broken_step_clopen`] damages its input.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepDefect {
    /// Some jump is taken at the breakpoint instead of just after it.
    RightContinuous,
    /// A non-selected context disagrees with its selected context.
    FlatMismatch,
}

/// Damages a sheaf on the product site so that it stops being one.
pub fn broken_step_clopen(
    poset: &ContextPoset,
    flat: &Selector,
    s: &StepClopen,
    defect: StepDefect,
) -> Result<StepClopen> {
    let one = Projection::identity(poset.dim());
    let zero = Projection::zero(poset.dim());
    let mut steps = s.steps().clone();
    match defect {
        StepDefect::RightContinuous => {
            let jump = steps.iter().find_map(|(&v, st)| {
                (1..st.breaks().len() - 1)
                    .find(|&i| st.open_values()[i - 1] != st.open_values()[i])
                    .map(|i| (v, i))
            });
            match jump {
                Some((v, i)) => {
                    let st = &steps[&v];
                    let mut points = st.point_values().to_vec();
                    points[i] = st.open_values()[i].clone();
                    let fixed =
                        StepFn::new(st.breaks().to_vec(), points, st.open_values().to_vec())?;
                    for (&w, t) in steps.iter_mut() {
                        if flat.apply(w) == flat.apply(v) {
                            *t = fixed.clone();
                        }
                    }
                }
                None => {
                    // no jump to move: use a full/empty step with the jump taken at 1/2
                    let st = StepFn::new(
                        vec![0.0, 0.5, 1.0],
                        vec![one.clone(), zero.clone(), zero.clone()],
                        vec![one.clone(), zero.clone()],
                    )?;
                    for t in steps.values_mut() {
                        *t = st.clone();
                    }
                }
            }
        }
        StepDefect::FlatMismatch => {
            let v = poset.ids().find(|&v| !flat.is_fixpoint(v)).ok_or_else(|| {
                crate::error::Error::InvalidSelector("every context is selected".into())
            })?;
            let st = &steps[&v];
            let open = st
                .open_values()
                .iter()
                .map(|p| {
                    if p.is_identity() {
                        zero.clone()
                    } else {
                        one.clone()
                    }
                })
                .collect();
            let repl = StepFn::new(st.breaks().to_vec(), st.point_values().to_vec(), open)?;
            steps.insert(v, repl);
        }
    }
    StepClopen::from_steps_unchecked(steps)
}
