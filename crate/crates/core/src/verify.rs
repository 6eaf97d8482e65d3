//! Named pass/fail checks shared by the CLI and the acceptance tests.

use std::collections::BTreeMap;
use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::context::{ContextPoset, Selector};
use crate::error::Result;
use crate::fixtures::{broken_step_clopen, random_presheaf, random_step_clopen, StepDefect};
use crate::interval::{covering_j_prob, j_prob, omega_prob_member, DownSet};
use crate::measure::{
    born_j_for_projection, canonical_truth_object, check_factorizations, internalize_measure,
    j_clopen_samples, measure_from_state, validate_measure, MeasureKind,
};
use crate::operator::{DensityMatrix, Projection};
use crate::product::{
    bold_filter_report, check_key_diagram, covering_jbold, enumerate_bold_sieves,
    is_in_omega_jbold, lt_jbold, BoldSieve, ProductPoint, StepClopen,
};
use crate::semantics::{
    daseinize_j, daseinize_presheaf, enumerate_presheaf_clopens, filter_violations, valuate_j,
    valuate_presheaf, TruthObject,
};
use crate::sheaf::{
    covering_j, enumerate_sieves, is_in_omega_j, is_j_sheaf, lt_topology_j, omega_j,
    pullback_selector, r_factor, unit_zeta, Presheaf, Sieve,
};
use crate::translation::{
    gamma_sandwich_violations, imath_sandwich_violations, jmath_violations, reduced_theory_suite,
};

/// Outcome of one named check, with the first few counterexamples.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: Vec<String>,
}

impl CheckOutcome {
    /// Passes iff `violations` is empty.
    pub fn new(name: impl Into<String>, violations: Vec<String>) -> Self {
        Self {
            name: name.into(),
            passed: violations.is_empty(),
            detail: violations,
        }
    }
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name
        )?;
        if let Some(first) = self.detail.first() {
            write!(f, ": {first}")?;
            if self.detail.len() > 1 {
                write!(f, " (+{} more)", self.detail.len() - 1)?;
            }
        }
        Ok(())
    }
}

impl CheckOutcome {
    /// A check that could not run counts as failed, with the error as detail.
    pub fn from_result(name: impl Into<String>, r: Result<Vec<String>>) -> Self {
        match r {
            Ok(v) => Self::new(name, v),
            Err(e) => Self {
                name: name.into(),
                passed: false,
                detail: vec![format!("error: {e}")],
            },
        }
    }
}

/// Everything a full verification run needs.
#[derive(Clone, Debug)]
pub struct Instance {
    pub poset: ContextPoset,
    pub flat: Selector,
    pub states: Vec<(String, DensityMatrix)>,
    pub propositions: Vec<(String, Projection)>,
    pub levels: Vec<f64>,
    pub bound: usize,
    pub seed: u64,
}

/// Levels plus midpoints of consecutive levels, sorted and deduplicated.
pub fn with_midpoints(levels: &[f64]) -> Vec<f64> {
    let mut l: Vec<f64> = levels
        .iter()
        .copied()
        .filter(|t| (0.0..=1.0).contains(t))
        .collect();
    l.extend([0.0, 1.0]);
    l.sort_by(f64::total_cmp);
    l.dedup();
    let mids: Vec<f64> = l.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    l.extend(mids);
    l.sort_by(f64::total_cmp);
    l
}

pub fn selector_suite(poset: &ContextPoset, flat: &Selector) -> CheckOutcome {
    CheckOutcome::new(
        "selector.valid",
        flat.validate(poset).iter().map(|v| v.to_string()).collect(),
    )
}

/// Grothendieck and Lawvere–Tierney axioms for the selector topology, and
/// `Ω_j` as the fixed points of `j`, exhaustively over all sieves.
pub fn j_topology_suite(poset: &ContextPoset, flat: &Selector, bound: usize) -> Vec<CheckOutcome> {
    let mut bad: BTreeMap<&str, Vec<String>> = BTreeMap::new();
    let names = [
        "J.maximality",
        "J.stability",
        "J.transitivity",
        "j.preserves_top",
        "j.idempotent",
        "j.preserves_meets",
        "j.natural",
        "j.covers_iff_closure_is_top",
        "omega_j.equalizer",
    ];
    for n in names {
        bad.insert(n, Vec::new());
    }
    let mut err = None;
    for v in poset.ids() {
        let sieves = match enumerate_sieves(poset, v, bound) {
            Ok(s) => s,
            Err(e) => {
                err = Some(e.to_string());
                break;
            }
        };
        let top = Sieve::top(poset, v);
        if !covering_j(flat, &top) {
            bad.get_mut("J.maximality")
                .unwrap()
                .push(format!("top sieve on {v} does not cover"));
        }
        if lt_topology_j(poset, flat, &top) != top {
            bad.get_mut("j.preserves_top")
                .unwrap()
                .push(format!("j(top) ≠ top at {v}"));
        }
        let closed: Vec<Sieve> = sieves
            .iter()
            .map(|s| lt_topology_j(poset, flat, s))
            .collect();
        let omega: Vec<Sieve> = omega_j(poset, flat, v, bound).unwrap_or_default();
        for (s, js) in sieves.iter().zip(&closed) {
            let covers = covering_j(flat, s);
            if lt_topology_j(poset, flat, js) != *js {
                bad.get_mut("j.idempotent").unwrap().push(format!("{s:?}"));
            }
            if covers != js.is_top(poset) {
                bad.get_mut("j.covers_iff_closure_is_top")
                    .unwrap()
                    .push(format!("{s:?}"));
            }
            let fixed = js == s;
            if fixed != is_in_omega_j(poset, flat, s) || fixed != omega.contains(s) {
                bad.get_mut("omega_j.equalizer")
                    .unwrap()
                    .push(format!("{s:?}"));
            }
            for &w in poset.down_set(v) {
                let r = s.restrict(poset, w).expect("w below v");
                if covers && !covering_j(flat, &r) {
                    bad.get_mut("J.stability")
                        .unwrap()
                        .push(format!("{s:?} to {w}"));
                }
                if js.restrict(poset, w).expect("w below v") != lt_topology_j(poset, flat, &r) {
                    bad.get_mut("j.natural")
                        .unwrap()
                        .push(format!("{s:?} to {w}"));
                }
            }
            for (t, jt) in sieves.iter().zip(&closed) {
                if lt_topology_j(poset, flat, &s.meet(t).unwrap()) != js.meet(jt).unwrap() {
                    bad.get_mut("j.preserves_meets")
                        .unwrap()
                        .push(format!("{s:?} ∧ {t:?}"));
                }
                // transitivity: s covers and t covers on every member of s
                if covers
                    && s.members()
                        .iter()
                        .all(|&w| covering_j(flat, &t.restrict(poset, w).unwrap()))
                    && !covering_j(flat, t)
                {
                    bad.get_mut("J.transitivity")
                        .unwrap()
                        .push(format!("{s:?}, {t:?}"));
                }
            }
        }
    }
    names
        .iter()
        .map(|n| match &err {
            Some(e) => CheckOutcome {
                name: n.to_string(),
                passed: false,
                detail: vec![format!("error: {e}")],
            },
            None => CheckOutcome::new(*n, std::mem::take(bad.get_mut(n).unwrap())),
        })
        .collect()
}

/// Every down-set of `[0, r]` with endpoints in `pts`, including `∅`.
pub fn downsets_upto(r: f64, pts: &[f64]) -> Vec<DownSet> {
    let mut out = vec![DownSet::Empty];
    for &t in pts.iter().chain([&r]).filter(|&&t| (0.0..=r).contains(&t)) {
        out.push(DownSet::Closed(t));
        if t > 0.0 {
            out.push(DownSet::Open(t));
        }
    }
    out.sort_by(DownSet::cmp_total);
    out.dedup();
    out
}

/// Topology axioms on the probability interval, over every down-set with
/// endpoints at the levels, their midpoints and the base level.
pub fn jprob_suite(levels: &[f64]) -> Vec<CheckOutcome> {
    let pts = with_midpoints(levels);
    // strictly between any two endpoints, so open ends are probed from inside
    let fine = with_midpoints(&pts);
    let mut bad: BTreeMap<&str, Vec<String>> = BTreeMap::new();
    let names = [
        "J_prob.maximality",
        "J_prob.stability",
        "J_prob.transitivity",
        "j_prob.preserves_top",
        "j_prob.idempotent",
        "j_prob.preserves_meets",
        "j_prob.natural",
        "omega_prob.equalizer",
    ];
    for n in names {
        bad.insert(n, Vec::new());
    }
    for &r in &pts {
        let fam = downsets_upto(r, &pts);
        let top = DownSet::Closed(r);
        if !covering_j_prob(r, &top) {
            bad.get_mut("J_prob.maximality")
                .unwrap()
                .push(format!("r = {r}"));
        }
        if j_prob(&top) != top {
            bad.get_mut("j_prob.preserves_top")
                .unwrap()
                .push(format!("r = {r}"));
        }
        for d in &fam {
            let jd = j_prob(d);
            if j_prob(&jd) != jd {
                bad.get_mut("j_prob.idempotent")
                    .unwrap()
                    .push(format!("{d} at {r}"));
            }
            // closed iff every level it covers belongs to it
            let closed = pts
                .iter()
                .filter(|&&s| s <= r)
                .all(|&s| !covering_j_prob(s, &d.restrict(s)) || d.contains(s));
            if closed != omega_prob_member(r, d) || closed != (jd == *d) {
                bad.get_mut("omega_prob.equalizer")
                    .unwrap()
                    .push(format!("{d} at {r}"));
            }
            for &s in pts.iter().filter(|&&s| s <= r) {
                if covering_j_prob(r, d) && !covering_j_prob(s, &d.restrict(s)) {
                    bad.get_mut("J_prob.stability")
                        .unwrap()
                        .push(format!("{d} at {r} to {s}"));
                }
                if jd.restrict(s) != j_prob(&d.restrict(s)) {
                    bad.get_mut("j_prob.natural")
                        .unwrap()
                        .push(format!("{d} at {r} to {s}"));
                }
            }
            for e in &fam {
                if j_prob(&d.meet(e)) != jd.meet(&j_prob(e)) {
                    bad.get_mut("j_prob.preserves_meets")
                        .unwrap()
                        .push(format!("{d} ∧ {e} at {r}"));
                }
                let premise = covering_j_prob(r, d)
                    && fine
                        .iter()
                        .filter(|&&s| d.contains(s))
                        .all(|&s| covering_j_prob(s, &e.restrict(s)));
                if premise && !covering_j_prob(r, e) {
                    bad.get_mut("J_prob.transitivity")
                        .unwrap()
                        .push(format!("{d}, {e} at {r}"));
                }
            }
        }
    }
    names
        .iter()
        .map(|n| CheckOutcome::new(*n, std::mem::take(bad.get_mut(n).unwrap())))
        .collect()
}

/// Points `(W, s)` below `pt` with `s` drawn from `pts`.
fn points_below(poset: &ContextPoset, pt: ProductPoint, pts: &[f64]) -> Vec<ProductPoint> {
    let mut out = Vec::new();
    for &w in poset.down_set(pt.context) {
        for &s in pts.iter().filter(|&&s| s <= pt.level) {
            out.push(ProductPoint {
                context: w,
                level: s,
            });
        }
    }
    out
}

/// Topology axioms on the product site over every sieve whose fibers end at
/// the given levels, with base points at every context and level.
pub fn jbold_suite(
    poset: &ContextPoset,
    flat: &Selector,
    levels: &[f64],
    bound: usize,
) -> Vec<CheckOutcome> {
    let names = [
        "Jbold.maximality",
        "Jbold.stability",
        "Jbold.transitivity",
        "jbold.preserves_top",
        "jbold.idempotent",
        "jbold.preserves_meets",
        "jbold.natural",
        "jbold.covers_iff_closure_is_top",
        "omega_jbold.equalizer",
    ];
    let mut bad: BTreeMap<&str, Vec<String>> = names.iter().map(|&n| (n, Vec::new())).collect();
    let mut levels: Vec<f64> = levels.to_vec();
    levels.extend([0.0, 1.0]);
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    let pts = with_midpoints(&levels);
    let run = |bad: &mut BTreeMap<&str, Vec<String>>| -> Result<()> {
        for v in poset.ids() {
            for &r in &levels {
                let pt = ProductPoint::new(v, r)?;
                let sieves = enumerate_bold_sieves(poset, pt, &levels, bound)?;
                let below = points_below(poset, pt, &pts);
                let top = BoldSieve::top(poset, pt);
                if !covering_jbold(poset, flat, pt, &top)? {
                    bad.get_mut("Jbold.maximality")
                        .unwrap()
                        .push(format!("at {pt}"));
                }
                if lt_jbold(poset, flat, &top) != top {
                    bad.get_mut("jbold.preserves_top")
                        .unwrap()
                        .push(format!("at {pt}"));
                }
                let closed: Vec<BoldSieve> =
                    sieves.iter().map(|s| lt_jbold(poset, flat, s)).collect();
                let covers: Vec<bool> = sieves
                    .iter()
                    .map(|s| covering_jbold(poset, flat, pt, s))
                    .collect::<Result<_>>()?;
                for (i, (s, js)) in sieves.iter().zip(&closed).enumerate() {
                    if lt_jbold(poset, flat, js) != *js {
                        bad.get_mut("jbold.idempotent")
                            .unwrap()
                            .push(format!("{s:?}"));
                    }
                    if covers[i] != (*js == top) {
                        bad.get_mut("jbold.covers_iff_closure_is_top")
                            .unwrap()
                            .push(format!("{s:?}"));
                    }
                    let mut by_definition = true;
                    for &q in &below {
                        let rs = s.restrict(poset, q)?;
                        let c = covering_jbold(poset, flat, q, &rs)?;
                        if c && !s.contains(q) {
                            by_definition = false;
                        }
                        if covers[i] && !c {
                            bad.get_mut("Jbold.stability")
                                .unwrap()
                                .push(format!("{s:?} to {q}"));
                        }
                        if js.restrict(poset, q)? != lt_jbold(poset, flat, &rs) {
                            bad.get_mut("jbold.natural")
                                .unwrap()
                                .push(format!("{s:?} to {q}"));
                        }
                    }
                    if by_definition != is_in_omega_jbold(poset, flat, s) {
                        bad.get_mut("omega_jbold.equalizer")
                            .unwrap()
                            .push(format!("{s:?}"));
                    }
                    for (k, (t, jt)) in sieves.iter().zip(&closed).enumerate() {
                        if lt_jbold(poset, flat, &s.meet(t)?) != js.meet(jt)? {
                            bad.get_mut("jbold.preserves_meets")
                                .unwrap()
                                .push(format!("{s:?} ∧ {t:?}"));
                        }
                        if covers[i] && !covers[k] {
                            let mut premise = true;
                            for &q in below.iter().filter(|&&q| s.contains(q)) {
                                if !covering_jbold(poset, flat, q, &t.restrict(poset, q)?)? {
                                    premise = false;
                                    break;
                                }
                            }
                            if premise {
                                bad.get_mut("Jbold.transitivity")
                                    .unwrap()
                                    .push(format!("{s:?}, {t:?}"));
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    };
    match run(&mut bad) {
        Ok(()) => names
            .iter()
            .map(|n| CheckOutcome::new(*n, std::mem::take(bad.get_mut(n).unwrap())))
            .collect(),
        Err(e) => names
            .iter()
            .map(|n| CheckOutcome {
                name: n.to_string(),
                passed: false,
                detail: vec![format!("error: {e}")],
            })
            .collect(),
    }
}

/// `ζ_{♭*Q}` is an isomorphism, `♭*Q` is a j-sheaf, and `♭*` is idempotent.
pub fn sheafification_suite(
    poset: &ContextPoset,
    flat: &Selector,
    presheaves: &[Presheaf],
) -> Vec<CheckOutcome> {
    let (mut iso, mut idem) = (Vec::new(), Vec::new());
    for (i, q) in presheaves.iter().enumerate() {
        let a = pullback_selector(poset, flat, q);
        let aa = pullback_selector(poset, flat, &a);
        if !unit_zeta(poset, flat, &a).is_iso(&aa) || !is_j_sheaf(poset, flat, &a) {
            iso.push(format!(
                "presheaf {i}: unit of the pullback is not an isomorphism"
            ));
        }
        if aa != a {
            idem.push(format!(
                "presheaf {i}: pulling back twice changes the result"
            ));
        }
    }
    vec![
        CheckOutcome::new("sheafification.unit_iso", iso),
        CheckOutcome::new("sheafification.idempotent", idem),
    ]
}

/// On the product site: the sheaf criterion agrees with the unit being an
/// isomorphism, both orders of sheafification agree, sheafification yields
/// sheaves and the unit lands inside it.
pub fn step_sheaf_suite(
    poset: &ContextPoset,
    flat: &Selector,
    instances: &[StepClopen],
) -> Vec<CheckOutcome> {
    let (mut agree, mut orders, mut sheaf, mut unit) =
        (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for (i, s) in instances.iter().enumerate() {
        let (a, b) = (s.is_jbold_sheaf(poset, flat), s.unit_is_iso(poset, flat));
        if a != b {
            agree.push(format!("instance {i}: criterion {a}, unit iso {b}"));
        }
        let x = s.sheafify(flat);
        if !x.same_as(&s.sheafify_swapped(flat)) {
            orders.push(format!("instance {i}"));
        }
        if !x.is_jbold_sheaf(poset, flat) {
            sheaf.push(format!("instance {i}"));
        }
        if s.check_structure(poset, flat).is_ok() && !s.leq(&x) {
            unit.push(format!("instance {i}"));
        }
    }
    vec![
        CheckOutcome::new("jbold_sheaf.criteria_agree", agree),
        CheckOutcome::new("abold.orders_agree", orders),
        CheckOutcome::new("abold.is_sheaf", sheaf),
        CheckOutcome::new("abold.unit_inside", unit),
    ]
}

/// Measure axioms and naturality of the internalized measure for the
/// presheaf and j-sheaf measures of each state.
pub fn measure_suite(
    poset: &ContextPoset,
    flat: &Selector,
    states: &[(String, DensityMatrix)],
    bound: usize,
) -> Vec<CheckOutcome> {
    let run = || -> Result<(Vec<String>, Vec<String>)> {
        let j_samples = j_clopen_samples(poset, flat, bound)?;
        let p_samples = enumerate_presheaf_clopens(poset, None, bound)?;
        let (mut axioms, mut natural) = (Vec::new(), Vec::new());
        for (name, rho) in states {
            for (kind, samples) in [
                (MeasureKind::Presheaf, &p_samples),
                (MeasureKind::JSheaf, &j_samples),
            ] {
                let mu = measure_from_state(rho, kind, Some(flat));
                let rep = validate_measure(&mu, poset, samples);
                if !rep.passed() {
                    axioms.extend(
                        rep.violations
                            .iter()
                            .map(|v| format!("{name} {kind:?}: {v}")),
                    );
                    if rep.violations.is_empty() {
                        axioms.push(format!("{name} {kind:?}: failed"));
                    }
                }
                if let Err(e) = internalize_measure(&mu).check_naturality(poset, samples) {
                    natural.push(format!("{name} {kind:?}: {e}"));
                }
            }
        }
        Ok((axioms, natural))
    };
    match run() {
        Ok((a, n)) => vec![
            CheckOutcome::new("measure.axioms", a),
            CheckOutcome::new("measure.naturality", n),
        ],
        Err(e) => vec![
            CheckOutcome::from_result("measure.axioms", Err(e.clone())),
            CheckOutcome::from_result("measure.naturality", Err(e)),
        ],
    }
}

/// Born rule through the j-sheaf: equality for selected propositions, an
/// upper bound otherwise.
pub fn born_suite(
    poset: &ContextPoset,
    flat: &Selector,
    states: &[(String, DensityMatrix)],
    props: &[(String, Projection)],
) -> Vec<CheckOutcome> {
    let (mut exact, mut upper) = (Vec::new(), Vec::new());
    for (sn, rho) in states {
        for (pn, e) in props {
            match born_j_for_projection(e, rho, flat, poset) {
                Ok(b) if b.exact => {
                    if (b.value - b.born).abs() > 1e-9 {
                        exact.push(format!("{pn} in {sn}: {} vs tr(ρE) = {}", b.value, b.born));
                    }
                }
                Ok(b) => {
                    if b.value < b.born - 1e-9 {
                        upper.push(format!(
                            "{pn} in {sn}: {} below tr(ρE) = {}",
                            b.value, b.born
                        ));
                    }
                }
                Err(err) => exact.push(format!("{pn} in {sn}: {err}")),
            }
        }
    }
    vec![
        CheckOutcome::new("born.selected_exact", exact),
        CheckOutcome::new("born.upper_bound", upper),
    ]
}

/// Filter property of `𝕋^{ρ,r}` (j-sheaf clopens), of the canonical
/// measure truth object, and of the product-site truth object, with the
/// least-filter comparison for the latter.
pub fn filter_suite(
    poset: &ContextPoset,
    flat: &Selector,
    states: &[(String, DensityMatrix)],
    levels: &[f64],
    bound: usize,
) -> Vec<CheckOutcome> {
    let run = || -> Result<[Vec<String>; 4]> {
        let mut out: [Vec<String>; 4] = Default::default();
        for (name, rho) in states {
            let mu = measure_from_state(rho, MeasureKind::JSheaf, Some(flat));
            let canonical = canonical_truth_object(&mu);
            for v in poset.ids() {
                out[1].extend(
                    filter_violations(poset, flat, &canonical, v, bound)?
                        .into_iter()
                        .map(|m| format!("{name}: {m}")),
                );
                for &r in levels {
                    let t = TruthObject::rho_r(rho, r)?;
                    out[0].extend(
                        filter_violations(poset, flat, &t, v, bound)?
                            .into_iter()
                            .map(|m| format!("{name}, r = {r}: {m}")),
                    );
                    let rep =
                        bold_filter_report(poset, flat, rho, ProductPoint::new(v, r)?, bound)?;
                    out[2].extend(
                        rep.filter_violations
                            .iter()
                            .chain(&rep.restriction_violations)
                            .map(|m| format!("{name}: {m}")),
                    );
                    out[3].extend(
                        rep.least_filter_mismatches
                            .iter()
                            .map(|m| format!("{name}: {m}")),
                    );
                }
            }
        }
        for o in &mut out {
            o.dedup();
        }
        Ok(out)
    };
    let names = [
        "filter.rho_r",
        "filter.canonical",
        "filter.product",
        "filter.product_least",
    ];
    match run() {
        Ok(out) => names
            .iter()
            .zip(out)
            .map(|(n, v)| CheckOutcome::new(*n, v))
            .collect(),
        Err(e) => names
            .iter()
            .map(|n| CheckOutcome::from_result(*n, Err(e.clone())))
            .collect(),
    }
}

/// Both measure triangles for each `(state, level)` case.
pub fn factorization_suite(
    poset: &ContextPoset,
    flat: &Selector,
    cases: &[(String, DensityMatrix, f64)],
    bound: usize,
) -> CheckOutcome {
    let run = || -> Result<Vec<String>> {
        let mut bad = Vec::new();
        for (name, rho, r) in cases {
            let mu = measure_from_state(rho, MeasureKind::JSheaf, Some(flat));
            let rep = check_factorizations(rho, *r, &mu, flat, poset, bound)?;
            if !rep.passed() {
                bad.extend(
                    rep.mismatches
                        .iter()
                        .map(|m| format!("{name}, r = {r}: {m}")),
                );
            }
        }
        Ok(bad)
    };
    CheckOutcome::from_result("measure.factorization", run())
}

/// The product-site diagram for every proposition and state.
pub fn key_diagram_suite(
    poset: &ContextPoset,
    flat: &Selector,
    states: &[(String, DensityMatrix)],
    props: &[(String, Projection)],
) -> CheckOutcome {
    let run = || -> Result<Vec<String>> {
        let mut bad = Vec::new();
        for (pn, e) in props {
            let s = daseinize_j(e, flat, poset)?;
            for (sn, rho) in states {
                let rep = check_key_diagram(rho, &s, flat, poset)?;
                if !rep.passed() {
                    bad.extend(rep.mismatches.iter().map(|m| format!("{pn} in {sn}: {m}")));
                    if rep.mismatches.is_empty() {
                        bad.push(format!("{pn} in {sn}: nothing checked"));
                    }
                }
            }
        }
        Ok(bad)
    };
    CheckOutcome::from_result("product.key_diagram", run())
}

/// `r∘ν(P; 𝕋) = ν_j(♭*P; 𝕋)` for every proposition, state and level, the
/// three range checks, and the reduced-theory suite.
pub fn translation_suite(
    poset: &ContextPoset,
    flat: &Selector,
    states: &[(String, DensityMatrix)],
    props: &[(String, Projection)],
    levels: &[f64],
    bound: usize,
) -> Vec<CheckOutcome> {
    let consistency = || -> Result<Vec<String>> {
        let mut bad = Vec::new();
        for (pn, e) in props {
            let p = daseinize_presheaf(e, poset)?;
            for (sn, rho) in states {
                for &r in levels {
                    let t = TruthObject::rho_r(rho, r)?;
                    let nu = valuate_presheaf(&p, &t, poset)?;
                    match valuate_j(&p.pullback(flat), &t, flat, poset) {
                        Ok(nu_j) if r_factor(poset, flat, &nu)? == nu_j => {}
                        Ok(nu_j) => bad.push(format!(
                            "{pn} in {sn}, r = {r}: {nu:?} translates away from {nu_j:?}"
                        )),
                        Err(err) => bad.push(format!("{pn} in {sn}, r = {r}: {err}")),
                    }
                }
            }
        }
        Ok(bad)
    };
    let jmath = || -> Result<Vec<String>> {
        let mut bad = Vec::new();
        for (sn, rho) in states {
            let mu = measure_from_state(rho, MeasureKind::JSheaf, Some(flat));
            for t in [TruthObject::rho_r(rho, 1.0)?, canonical_truth_object(&mu)] {
                bad.extend(
                    jmath_violations(poset, flat, &t, bound)?
                        .into_iter()
                        .map(|m| format!("{sn} {}: {m}", t.name())),
                );
            }
        }
        Ok(bad)
    };
    let mut out = vec![
        CheckOutcome::from_result("translation.consistency", consistency()),
        CheckOutcome::from_result(
            "translation.gamma_sandwich",
            gamma_sandwich_violations(poset, flat, bound),
        ),
        CheckOutcome::from_result(
            "translation.imath_sandwich",
            imath_sandwich_violations(poset, flat, bound),
        ),
        CheckOutcome::from_result("translation.jmath_range", jmath()),
    ];
    let mut reduced: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for (sn, rho) in states {
        for (pn, e) in props {
            for &r in levels {
                match reduced_theory_suite(poset, flat, rho, r, e, bound, None) {
                    Ok(checks) => {
                        for c in checks {
                            reduced.entry(c.name).or_default().extend(
                                c.detail
                                    .into_iter()
                                    .map(|d| format!("{pn} in {sn}, r = {r}: {d}")),
                            );
                        }
                    }
                    Err(err) => reduced
                        .entry("reduced.suite".into())
                        .or_default()
                        .push(err.to_string()),
                }
            }
        }
    }
    out.extend(reduced.into_iter().map(|(n, d)| CheckOutcome::new(n, d)));
    out
}

impl Instance {
    /// Every `(state, level)` pair.
    pub fn state_level_cases(&self) -> Vec<(String, DensityMatrix, f64)> {
        self.states
            .iter()
            .flat_map(|(n, rho)| {
                self.levels
                    .iter()
                    .map(move |&r| (n.clone(), rho.clone(), r))
            })
            .collect()
    }
}

/// Sheafification checks on 20 seeded random presheaves and on 20 seeded
/// product-site clopens, half of them deliberately broken.
pub fn sheaf_samples_suite(inst: &Instance) -> Vec<CheckOutcome> {
    let (p, f) = (&inst.poset, &inst.flat);
    let mut rng = ChaCha8Rng::seed_from_u64(inst.seed);
    let presheaves: Vec<Presheaf> = (0..20).map(|_| random_presheaf(p, &mut rng)).collect();
    let mut out = sheafification_suite(p, f, &presheaves);
    let mut steps = Vec::new();
    for i in 0..10 {
        let s = match random_step_clopen(p, f, &mut rng, inst.bound) {
            Ok(s) => s,
            Err(e) => {
                out.push(CheckOutcome::from_result(
                    "jbold_sheaf.criteria_agree",
                    Err(e),
                ));
                return out;
            }
        };
        let defect = if i % 2 == 0 {
            StepDefect::RightContinuous
        } else {
            StepDefect::FlatMismatch
        };
        // an all-selected poset has nothing to mismatch
        if let Ok(broken) = broken_step_clopen(p, f, &s, defect) {
            steps.push(broken);
        }
        steps.push(s);
    }
    out.extend(step_sheaf_suite(p, f, &steps));
    out
}

/// Every suite on one instance, in a fixed order.
pub fn run_all(inst: &Instance) -> Vec<CheckOutcome> {
    let (p, f, b) = (&inst.poset, &inst.flat, inst.bound);
    let mut out = vec![selector_suite(p, f)];
    if !out[0].passed {
        return out;
    }
    out.extend(j_topology_suite(p, f, b));
    out.extend(jprob_suite(&inst.levels));
    out.extend(jbold_suite(p, f, &inst.levels, b));
    out.extend(sheaf_samples_suite(inst));
    out.extend(measure_suite(p, f, &inst.states, b));
    out.extend(born_suite(p, f, &inst.states, &inst.propositions));
    out.extend(filter_suite(p, f, &inst.states, &inst.levels, b));
    out.push(factorization_suite(p, f, &inst.state_level_cases(), b));
    out.push(key_diagram_suite(p, f, &inst.states, &inst.propositions));
    out.extend(translation_suite(
        p,
        f,
        &inst.states,
        &inst.propositions,
        &inst.levels,
        b,
    ));
    out
}
