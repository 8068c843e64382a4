//! Lower envelopes of lines `y = intercept + slope * x`.
//!
//! Used by the parametric searches (breakpoints) and by the discounted APSP
//! query structure (evaluation at ascending query points).

use std::cmp::Ordering;

use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct Line<S> {
    pub slope: S,
    pub intercept: S,
    /// Caller data carried through, e.g. an edge id or walk length.
    pub tag: usize,
}

impl<S: Scalar> Line<S> {
    pub fn eval(&self, x: &S) -> S {
        self.intercept.add(&self.slope.mul(x))
    }
}

/// x-coordinate where two lines of different slope meet.
fn crossing<S: Scalar>(a: &Line<S>, b: &Line<S>) -> S {
    b.intercept.sub(&a.intercept).div(&a.slope.sub(&b.slope))
}

/// The lower envelope, left to right: `lines[i]` is minimal on
/// `[breaks[i-1], breaks[i]]`, so slopes strictly decrease along `lines`.
#[derive(Debug, Clone)]
pub struct Envelope<S> {
    pub lines: Vec<Line<S>>,
    pub breaks: Vec<S>,
}

/// Builds the envelope. Among lines of equal slope the smallest intercept
/// survives, with the smallest tag on exact ties.
pub fn lower_envelope<S: Scalar>(mut lines: Vec<Line<S>>) -> Envelope<S> {
    lines.sort_by(|a, b| {
        b.slope
            .total_cmp(&a.slope)
            .then_with(|| a.intercept.total_cmp(&b.intercept))
            .then_with(|| a.tag.cmp(&b.tag))
    });
    lines.dedup_by(|later, kept| later.slope.total_cmp(&kept.slope) == Ordering::Equal);
    let mut hull: Vec<Line<S>> = Vec::with_capacity(lines.len());
    let mut breaks: Vec<S> = Vec::with_capacity(lines.len());
    for line in lines {
        while let Some(top) = hull.last() {
            let x = crossing(top, &line);
            // `top` is hidden when the new line overtakes it no later than
            // `top` itself took over from its predecessor.
            match breaks.last() {
                Some(prev) if x.total_cmp(prev) != Ordering::Greater => {
                    hull.pop();
                    breaks.pop();
                }
                _ => break,
            }
        }
        if let Some(top) = hull.last() {
            breaks.push(crossing(top, &line));
        }
        hull.push(line);
    }
    Envelope { lines: hull, breaks }
}

impl<S: Scalar> Envelope<S> {
    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }

    /// Index of a line minimal at `x`.
    pub fn locate(&self, x: &S) -> usize {
        self.breaks.partition_point(|b| b.lt(x))
    }

    pub fn eval(&self, x: &S) -> Option<S> {
        if self.lines.is_empty() {
            return None;
        }
        Some(self.lines[self.locate(x)].eval(x))
    }

    /// Evaluates at non-decreasing query points in one forward pass.
    pub fn sweep(&self) -> Sweep<'_, S> {
        Sweep { env: self, at: 0 }
    }
}

pub struct Sweep<'a, S> {
    env: &'a Envelope<S>,
    at: usize,
}

impl<S: Scalar> Sweep<'_, S> {
    /// Queries must be non-decreasing between calls.
    pub fn eval(&mut self, x: &S) -> Option<S> {
        if self.env.lines.is_empty() {
            return None;
        }
        while self.at < self.env.breaks.len() && self.env.breaks[self.at].lt(x) {
            self.at += 1;
        }
        Some(self.env.lines[self.at].eval(x))
    }
}
