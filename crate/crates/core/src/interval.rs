//! Sieves on the probability poset `[0,1]` kept symbolic: every down-set
//! that arises is `∅`, `[0,t]` or `[0,t)`, so endpoints are carried exactly
//! instead of discretizing the interval.
//!
//! Also holds step functions of the level, the finite data on which the
//! left-limit sheafification acts.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

fn check_level(t: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidLevel(t));
    }
    Ok(t)
}

/// Down-set of `[0,1]`.
#[derive(Clone, Copy, PartialEq)]
pub enum DownSet {
    Empty,
    /// `[0,t]`
    Closed(f64),
    /// `[0,t)`, with `t > 0`
    Open(f64),
}

impl fmt::Debug for DownSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Empty => write!(f, "∅"),
            Self::Closed(t) => write!(f, "[0,{t}]"),
            Self::Open(t) => write!(f, "[0,{t})"),
        }
    }
}

impl fmt::Display for DownSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl DownSet {
    pub fn closed(t: f64) -> Result<Self> {
        Ok(Self::Closed(check_level(t)?))
    }

    /// `[0,t)`; `[0,0)` is the empty set.
    pub fn open(t: f64) -> Result<Self> {
        let t = check_level(t)?;
        Ok(if t == 0.0 { Self::Empty } else { Self::Open(t) })
    }

    /// Position in the total order `∅ < [0,0] < … < [0,t) < [0,t] < …`.
    fn key(&self) -> (f64, u8) {
        match *self {
            Self::Empty => (0.0, 0),
            Self::Open(t) => (t, 0),
            Self::Closed(t) => (t, 1),
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        match *self {
            Self::Empty => false,
            Self::Closed(t) => x >= 0.0 && x <= t,
            Self::Open(t) => x >= 0.0 && x < t,
        }
    }

    pub fn leq(&self, other: &Self) -> bool {
        self.cmp_total(other) != Ordering::Greater
    }

    pub fn cmp_total(&self, other: &Self) -> Ordering {
        let (a, b) = (self.key(), other.key());
        a.0.total_cmp(&b.0).then(a.1.cmp(&b.1))
    }

    pub fn meet(&self, other: &Self) -> Self {
        if self.leq(other) {
            *self
        } else {
            *other
        }
    }

    pub fn join(&self, other: &Self) -> Self {
        if self.leq(other) {
            *other
        } else {
            *self
        }
    }

    /// Supremum, with `sup ∅ = 0`.
    pub fn sup(&self) -> f64 {
        match *self {
            Self::Empty => 0.0,
            Self::Closed(t) | Self::Open(t) => t,
        }
    }

    /// `d ∩ [0,r]`.
    pub fn restrict(&self, r: f64) -> Self {
        self.meet(&Self::Closed(r))
    }

    /// Heyting implication among down-sets below `[0,r]`.
    pub fn implies(&self, other: &Self, r: f64) -> Self {
        if self.restrict(r).leq(other) {
            Self::Closed(r)
        } else {
            other.restrict(r)
        }
    }
}

/// `j_prob(d) = [0, sup d]`.
pub fn j_prob(d: &DownSet) -> DownSet {
    DownSet::Closed(d.sup())
}

/// `d` covers `r` iff `d ∈ {[0,r], [0,r)}`.
pub fn covering_j_prob(r: f64, d: &DownSet) -> bool {
    match *d {
        DownSet::Closed(t) => t == r,
        DownSet::Open(t) => t == r,
        DownSet::Empty => r == 0.0,
    }
}

/// `d ∈ Ω_prob(r)` iff `d = [0,r′]` with `r′ ≤ r`.
pub fn omega_prob_member(r: f64, d: &DownSet) -> bool {
    matches!(*d, DownSet::Closed(t) if t <= r)
}

/// Global element `ℓ′(p)` of `Ω_prob`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProbTruth {
    p: f64,
}

impl ProbTruth {
    pub fn p(&self) -> f64 {
        self.p
    }

    /// `ℓ′(p)_r = [0, min(p,r)]`.
    pub fn component(&self, r: f64) -> DownSet {
        DownSet::Closed(self.p.min(r))
    }

    pub fn leq(&self, other: &Self) -> bool {
        self.p <= other.p
    }
}

pub fn ell_prime(p: f64) -> Result<ProbTruth> {
    Ok(ProbTruth { p: check_level(p)? })
}

/// Piecewise-constant function of the level on `[0, end]`: a value at each
/// breakpoint and a value on each open interval between breakpoints.
#[derive(Clone, PartialEq)]
pub struct StepFn<T> {
    breaks: Vec<f64>,
    points: Vec<T>,
    open: Vec<T>,
}

impl<T: fmt::Debug> fmt::Debug for StepFn<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Step[")?;
        for (i, b) in self.breaks.iter().enumerate() {
            write!(f, "{b}:{:?}", self.points[i])?;
            if let Some(o) = self.open.get(i) {
                write!(f, " ({:?}) ", o)?;
            }
        }
        write!(f, "]")
    }
}

/// One piece of a step function.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Piece {
    Point(f64),
    /// Open interval `(a, b)`.
    Between(f64, f64),
}

impl<T: Clone + PartialEq> StepFn<T> {
    pub fn new(breaks: Vec<f64>, points: Vec<T>, open: Vec<T>) -> Result<Self> {
        if breaks.first() != Some(&0.0) {
            return Err(Error::MalformedStep("first breakpoint must be 0".into()));
        }
        if breaks
            .windows(2)
            .any(|w| w[0].partial_cmp(&w[1]) != Some(std::cmp::Ordering::Less))
        {
            return Err(Error::MalformedStep(
                "breakpoints must increase strictly".into(),
            ));
        }
        if breaks.iter().any(|b| !(0.0..=1.0).contains(b)) {
            return Err(Error::MalformedStep("breakpoints must lie in [0,1]".into()));
        }
        if points.len() != breaks.len() || open.len() + 1 != breaks.len() {
            return Err(Error::MalformedStep(
                "one value per breakpoint and per gap".into(),
            ));
        }
        Ok(Self {
            breaks,
            points,
            open,
        })
    }

    /// `value` everywhere on `[0, end]`.
    pub fn constant(value: T, end: f64) -> Result<Self> {
        if end == 0.0 {
            return Self::new(vec![0.0], vec![value], vec![]);
        }
        Self::new(
            vec![0.0, end],
            vec![value.clone(), value.clone()],
            vec![value],
        )
    }

    /// Left-open right-closed form: `at_zero` at 0 and `values[i]` on
    /// `(breaks[i], breaks[i+1]]`.
    pub fn left_closed_steps(breaks: Vec<f64>, at_zero: T, values: Vec<T>) -> Result<Self> {
        if values.len() + 1 != breaks.len() {
            return Err(Error::MalformedStep("one value per interval".into()));
        }
        let mut points = vec![at_zero];
        points.extend(values.iter().cloned());
        Self::new(breaks, points, values)
    }

    pub fn end(&self) -> f64 {
        *self.breaks.last().expect("nonempty")
    }

    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }

    pub fn point_values(&self) -> &[T] {
        &self.points
    }

    pub fn open_values(&self) -> &[T] {
        &self.open
    }

    pub fn value_at(&self, r: f64) -> Result<&T> {
        if !(0.0..=self.end()).contains(&r) {
            return Err(Error::InvalidLevel(r));
        }
        match self.breaks.binary_search_by(|b| b.total_cmp(&r)) {
            Ok(i) => Ok(&self.points[i]),
            Err(i) => Ok(&self.open[i - 1]),
        }
    }

    /// Every piece with its value, in increasing order.
    pub fn pieces(&self) -> Vec<(Piece, &T)> {
        let mut out = Vec::with_capacity(2 * self.breaks.len());
        for (i, &b) in self.breaks.iter().enumerate() {
            out.push((Piece::Point(b), &self.points[i]));
            if let Some(o) = self.open.get(i) {
                out.push((Piece::Between(b, self.breaks[i + 1]), o));
            }
        }
        out
    }

    /// Removes breakpoints across which nothing changes.
    pub fn normalize(&self) -> Self {
        let mut breaks = vec![self.breaks[0]];
        let mut points = vec![self.points[0].clone()];
        let mut open: Vec<T> = Vec::new();
        for i in 1..self.breaks.len() {
            let left = &self.open[i - 1];
            let interior = i + 1 < self.breaks.len();
            let redundant = interior
                && self.points[i] == *left
                && self.open[i] == *left
                && open.last() == Some(left);
            if redundant {
                continue;
            }
            if open.len() < breaks.len() {
                open.push(left.clone());
            }
            breaks.push(self.breaks[i]);
            points.push(self.points[i].clone());
        }
        Self {
            breaks,
            points,
            open,
        }
    }

    /// Left-limit regularization: each breakpoint above 0 takes the value
    /// approaching it from below; level 0 takes `top`, the value of the
    /// empty limit.
    pub fn a_prob(&self, top: &T) -> Self {
        let mut points = self.points.clone();
        points[0] = top.clone();
        let n = points.len();
        points[1..].clone_from_slice(&self.open[..n - 1]);
        Self {
            breaks: self.breaks.clone(),
            points,
            open: self.open.clone(),
        }
        .normalize()
    }

    pub fn is_left_regular(&self, top: &T) -> bool {
        self.points[0] == *top && (1..self.points.len()).all(|i| self.points[i] == self.open[i - 1])
    }

    pub fn map<U: Clone + PartialEq>(&self, f: impl Fn(&T) -> U) -> StepFn<U> {
        StepFn {
            breaks: self.breaks.clone(),
            points: self.points.iter().map(&f).collect(),
            open: self.open.iter().map(&f).collect(),
        }
    }

    /// Pointwise combination over the union of both breakpoint sets.
    pub fn zip_with<U: Clone + PartialEq, W: Clone + PartialEq>(
        &self,
        other: &StepFn<U>,
        f: impl Fn(&T, &U) -> W,
    ) -> Result<StepFn<W>> {
        if self.end() != other.end() {
            return Err(Error::MalformedStep("domains differ".into()));
        }
        let mut breaks: Vec<f64> = self.breaks.iter().chain(&other.breaks).copied().collect();
        breaks.sort_by(f64::total_cmp);
        breaks.dedup();
        let points = breaks
            .iter()
            .map(|&b| f(self.value_at(b).unwrap(), other.value_at(b).unwrap()))
            .collect();
        let open = breaks
            .windows(2)
            .map(|w| {
                let m = 0.5 * (w[0] + w[1]);
                f(self.value_at(m).unwrap(), other.value_at(m).unwrap())
            })
            .collect();
        Ok(StepFn {
            breaks,
            points,
            open,
        })
    }

    /// Restriction to `[0, end]`.
    pub fn truncate(&self, end: f64) -> Result<Self> {
        if !(0.0..=self.end()).contains(&end) {
            return Err(Error::InvalidLevel(end));
        }
        let mut breaks: Vec<f64> = self.breaks.iter().copied().filter(|&b| b < end).collect();
        breaks.push(end);
        let points = breaks
            .iter()
            .map(|&b| self.value_at(b).unwrap().clone())
            .collect();
        let open = breaks
            .windows(2)
            .map(|w| self.value_at(0.5 * (w[0] + w[1])).unwrap().clone())
            .collect();
        Ok(Self {
            breaks,
            points,
            open,
        })
    }

    /// Same function on the same domain, irrespective of redundant breaks.
    pub fn same_as(&self, other: &Self) -> bool {
        self.zip_with(other, |a, b| a == b)
            .is_ok_and(|z| z.points.iter().chain(&z.open).all(|&x| x))
    }
}
