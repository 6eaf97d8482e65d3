//! The four commands and the report they produce.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use reduced_topos::measure::{born_probability_j, born_probability_presheaf};
use reduced_topos::product::{inject_pi1, valuate_bold, ProductPoint};
use reduced_topos::semantics::{
    daseinize_j, daseinize_presheaf, valuate_j, valuate_presheaf, TruthObject,
};
use reduced_topos::sheaf::TruthValue;
use reduced_topos::translation::xi;
use reduced_topos::verify::{self, CheckOutcome, Instance};
use reduced_topos::{ContextId, ContextPoset, Error, Result};

use crate::config::{System, VerifyToggles};

/// Counterexamples kept per failed check.
const DETAIL_LIMIT: usize = 5;

#[derive(Debug, Default, Serialize)]
pub struct Report {
    pub command: String,
    pub epsilon: f64,
    pub max_enum: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub build: Option<BuildSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub valuations: Option<Vec<ValuationRow>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub probabilities: Option<Vec<ProbabilityRow>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verification: Option<VerifySection>,
}

#[derive(Debug, Serialize)]
pub struct BuildSection {
    pub hilbert_dim: usize,
    pub contexts: Vec<ContextRow>,
    pub selector_valid: bool,
    pub selector_violations: Vec<String>,
    /// Total number of spectrum points over all contexts.
    pub spectrum_points: usize,
}

#[derive(Debug, Serialize)]
pub struct ContextRow {
    pub label: String,
    pub atoms: usize,
    pub below: Vec<String>,
    pub selected_image: String,
    pub selected: bool,
}

/// Truth values of one proposition in one state at one level. Sieves are
/// listed by context label; product-site sieves give the level down-set of
/// each context below.
#[derive(Debug, Serialize)]
pub struct ValuationRow {
    pub proposition: String,
    pub state: String,
    pub level: f64,
    pub presheaf: BTreeMap<String, Vec<String>>,
    pub j_sheaf: BTreeMap<String, Vec<String>>,
    pub reduced: BTreeMap<String, Vec<String>>,
    pub product: BTreeMap<String, BTreeMap<String, String>>,
}

#[derive(Debug, Serialize)]
pub struct ProbabilityRow {
    pub proposition: String,
    pub state: String,
    pub born: f64,
    pub presheaf_min: f64,
    pub j_sheaf_min: f64,
    /// The proposition is selected, so `j_sheaf_min` equals `born`;
    /// otherwise it is an upper bound.
    pub exact: bool,
}

#[derive(Debug, Serialize)]
pub struct VerifySection {
    pub passed: bool,
    pub checks: Vec<CheckRow>,
}

#[derive(Debug, Serialize)]
pub struct CheckRow {
    pub name: String,
    pub passed: bool,
    pub violations: usize,
    pub detail: Vec<String>,
}

impl From<CheckOutcome> for CheckRow {
    fn from(c: CheckOutcome) -> Self {
        let violations = c.detail.len();
        Self {
            name: c.name,
            passed: c.passed,
            violations,
            detail: c.detail.into_iter().take(DETAIL_LIMIT).collect(),
        }
    }
}

fn labels(poset: &ContextPoset, ids: impl IntoIterator<Item = ContextId>) -> Vec<String> {
    ids.into_iter()
        .map(|v| poset.label(v).to_string())
        .collect()
}

fn sieve_table(poset: &ContextPoset, nu: &TruthValue) -> BTreeMap<String, Vec<String>> {
    poset
        .ids()
        .map(|v| {
            (
                poset.label(v).to_string(),
                labels(poset, nu.at(v).members().iter().copied()),
            )
        })
        .collect()
}

pub fn build(sys: &System) -> BuildSection {
    let p = &sys.poset;
    let violations: Vec<String> = match &sys.selector_error {
        Some(e) => vec![e.clone()],
        None => sys.flat.validate(p).iter().map(|v| v.to_string()).collect(),
    };
    BuildSection {
        hilbert_dim: p.dim(),
        contexts: p
            .ids()
            .map(|v| ContextRow {
                label: p.label(v).to_string(),
                atoms: p.context(v).len(),
                below: labels(p, p.down_set(v).iter().copied().filter(|&w| w != v)),
                selected_image: p.label(sys.flat.apply(v)).to_string(),
                selected: sys.flat.is_fixpoint(v),
            })
            .collect(),
        selector_valid: violations.is_empty(),
        selector_violations: violations,
        spectrum_points: p.ids().map(|v| p.context(v).len()).sum(),
    }
}

fn require_valid_selector(sys: &System) -> Result<()> {
    match &sys.selector_error {
        Some(e) => Err(Error::InvalidSelector(e.clone())),
        None => Ok(()),
    }
}

fn valuation_row(sys: &System, prop: usize, state: usize, level: f64) -> Result<ValuationRow> {
    let (p, f) = (&sys.poset, &sys.flat);
    let pr = &sys.propositions[prop];
    let (sn, rho) = &sys.states[state];
    let t = TruthObject::rho_r(rho, level)?;
    let nu = valuate_presheaf(&daseinize_presheaf(&pr.projection, p)?, &t, p)?;
    let dj = daseinize_j(&pr.projection, f, p)?;
    let nu_j = valuate_j(&dj, &t, f, p)?;
    let mut reduced = BTreeMap::new();
    for v in f.fixpoints() {
        reduced.insert(
            p.label(v).to_string(),
            labels(p, xi(p, f, nu_j.at(v))?.members),
        );
    }
    let bold = valuate_bold(&inject_pi1(p, f, &dj)?, rho)?;
    let mut product = BTreeMap::new();
    for v in p.ids() {
        let s = bold.at(p, ProductPoint::new(v, level)?)?;
        let fibers = s
            .fibers()
            .iter()
            .map(|(&w, d)| (p.label(w).to_string(), d.to_string()))
            .collect();
        product.insert(p.label(v).to_string(), fibers);
    }
    Ok(ValuationRow {
        proposition: pr.name.clone(),
        state: sn.clone(),
        level,
        presheaf: sieve_table(p, &nu),
        j_sheaf: sieve_table(p, &nu_j),
        reduced,
        product,
    })
}

/// Proposition-major, then state, then level.
pub fn valuate(sys: &System, parallel: bool) -> Result<Vec<ValuationRow>> {
    require_valid_selector(sys)?;
    let jobs: Vec<(usize, usize, f64)> = (0..sys.propositions.len())
        .flat_map(|i| {
            (0..sys.states.len()).flat_map(move |k| sys.levels.iter().map(move |&r| (i, k, r)))
        })
        .collect();
    if parallel {
        jobs.par_iter()
            .map(|&(i, k, r)| valuation_row(sys, i, k, r))
            .collect()
    } else {
        jobs.iter()
            .map(|&(i, k, r)| valuation_row(sys, i, k, r))
            .collect()
    }
}

fn probability_row(sys: &System, prop: usize, state: usize) -> Result<ProbabilityRow> {
    let pr = &sys.propositions[prop];
    let (sn, rho) = &sys.states[state];
    let j = born_probability_j(&pr.operator, &pr.selection, rho, &sys.flat, &sys.poset)?;
    Ok(ProbabilityRow {
        proposition: pr.name.clone(),
        state: sn.clone(),
        born: j.born,
        presheaf_min: born_probability_presheaf(&pr.operator, &pr.selection, rho, &sys.poset)?,
        j_sheaf_min: j.value,
        exact: j.exact,
    })
}

pub fn probability(sys: &System, parallel: bool) -> Result<Vec<ProbabilityRow>> {
    require_valid_selector(sys)?;
    let jobs: Vec<(usize, usize)> = (0..sys.propositions.len())
        .flat_map(|i| (0..sys.states.len()).map(move |k| (i, k)))
        .collect();
    if parallel {
        jobs.par_iter()
            .map(|&(i, k)| probability_row(sys, i, k))
            .collect()
    } else {
        jobs.iter()
            .map(|&(i, k)| probability_row(sys, i, k))
            .collect()
    }
}

type Suite<'a> = Box<dyn Fn() -> Vec<CheckOutcome> + Send + Sync + 'a>;

/// Runs the enabled suites. An invalid selector fails the selector check and
/// stops there, since every other suite presupposes one.
pub fn verify(
    sys: &System,
    toggles: &VerifyToggles,
    bound: usize,
    parallel: bool,
) -> VerifySection {
    let inst = Instance {
        poset: sys.poset.clone(),
        flat: sys.flat.clone(),
        states: sys.states.clone(),
        propositions: sys
            .propositions
            .iter()
            .map(|p| (p.name.clone(), p.projection.clone()))
            .collect(),
        levels: sys.levels.clone(),
        bound,
        seed: sys.seed,
    };
    let selector = {
        let mut c = verify::selector_suite(&inst.poset, &inst.flat);
        if let Some(e) = &sys.selector_error {
            c.passed = false;
            c.detail.insert(0, e.clone());
        }
        c
    };
    let mut checks = Vec::new();
    let selector_ok = selector.passed;
    if toggles.selector || !selector_ok {
        checks.push(selector);
    }
    if selector_ok {
        let (p, f, i) = (&inst.poset, &inst.flat, &inst);
        let mut suites: Vec<Suite> = Vec::new();
        if toggles.topologies {
            suites.push(Box::new(move || verify::j_topology_suite(p, f, bound)));
        }
        if toggles.probability_topology {
            suites.push(Box::new(move || verify::jprob_suite(&i.levels)));
        }
        if toggles.product_topology {
            suites.push(Box::new(move || {
                verify::jbold_suite(p, f, &i.levels, bound)
            }));
        }
        if toggles.sheafification {
            suites.push(Box::new(move || verify::sheaf_samples_suite(i)));
        }
        if toggles.measures {
            suites.push(Box::new(move || {
                verify::measure_suite(p, f, &i.states, bound)
            }));
        }
        if toggles.born {
            suites.push(Box::new(move || {
                verify::born_suite(p, f, &i.states, &i.propositions)
            }));
        }
        if toggles.filters {
            suites.push(Box::new(move || {
                verify::filter_suite(p, f, &i.states, &i.levels, bound)
            }));
        }
        if toggles.factorization {
            suites.push(Box::new(move || {
                vec![verify::factorization_suite(
                    p,
                    f,
                    &i.state_level_cases(),
                    bound,
                )]
            }));
        }
        if toggles.key_diagram {
            suites.push(Box::new(move || {
                vec![verify::key_diagram_suite(p, f, &i.states, &i.propositions)]
            }));
        }
        if toggles.translation {
            suites.push(Box::new(move || {
                verify::translation_suite(p, f, &i.states, &i.propositions, &i.levels, bound)
            }));
        }
        let results: Vec<Vec<CheckOutcome>> = if parallel {
            suites.par_iter().map(|s| s()).collect()
        } else {
            suites.iter().map(|s| s()).collect()
        };
        checks.extend(results.into_iter().flatten());
    }
    VerifySection {
        passed: checks.iter().all(|c| c.passed),
        checks: checks.into_iter().map(CheckRow::from).collect(),
    }
}
