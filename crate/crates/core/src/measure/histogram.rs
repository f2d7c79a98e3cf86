use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::geometry::Measure;

/// Largest exponent accepted by [`exp_integral`] before it reports overflow.
pub const EXP_LIMIT: f64 = 700.0;

/// Measure of a region at each exact depth `k`, including depth 0.
///
/// The measures are the exact integer coefficients of every exponential
/// integral taken over the region, so `Σ_k m_k e^{ck}` can be re-evaluated at
/// any `c` without re-measuring.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct DepthHistogram {
    measures: Vec<Measure>,
    reference: Measure,
}

impl DepthHistogram {
    /// Histogram from dense per-depth measures and the region measure.
    pub fn new(mut measures: Vec<Measure>, reference: Measure) -> Self {
        while measures.last() == Some(&0) {
            measures.pop();
        }
        DepthHistogram {
            measures,
            reference,
        }
    }

    pub(crate) fn add(&mut self, depth: usize, m: Measure) {
        if m == 0 {
            return;
        }
        if self.measures.len() <= depth {
            self.measures.resize(depth + 1, 0);
        }
        self.measures[depth] += m;
    }

    pub(crate) fn sub(&mut self, depth: usize, m: Measure) {
        if m == 0 {
            return;
        }
        self.measures[depth] -= m;
        while self.measures.last() == Some(&0) {
            self.measures.pop();
        }
    }

    pub(crate) fn set_reference(&mut self, reference: Measure) {
        self.reference = reference;
    }

    pub fn get(&self, depth: usize) -> Measure {
        self.measures.get(depth).copied().unwrap_or(0)
    }

    /// Dense measures indexed by depth; trailing zeros are trimmed.
    pub fn measures(&self) -> &[Measure] {
        &self.measures
    }

    /// Measure of the region the histogram was taken over.
    pub fn reference(&self) -> Measure {
        self.reference
    }

    pub fn total(&self) -> Measure {
        self.measures.iter().sum()
    }

    /// Largest depth with positive measure.
    pub fn max_depth(&self) -> Option<usize> {
        self.measures.len().checked_sub(1)
    }

    /// Measure at depth ≥ 1.
    pub fn covered(&self) -> Measure {
        self.measures.iter().skip(1).sum()
    }

    /// `m_k / m(region)` as an exact fraction.
    pub fn proportion(&self, depth: usize) -> Ratio<Measure> {
        Ratio::new(self.get(depth), self.reference.max(1))
    }

    /// Nonzero `(k, m_k)` entries.
    pub fn entries(&self) -> impl Iterator<Item = (usize, Measure)> + '_ {
        self.measures
            .iter()
            .enumerate()
            .filter(|(_, &m)| m > 0)
            .map(|(k, &m)| (k, m))
    }

    /// Pointwise dominance `self.m_k ≤ other.m_k` for every `k`.
    pub fn dominated_by(&self, other: &DepthHistogram) -> bool {
        self.measures
            .iter()
            .enumerate()
            .all(|(k, &m)| m <= other.get(k))
    }

    pub fn exp_integral(&self, c: f64) -> Result<f64> {
        exp_integral(self, c)
    }

    /// `exp_integral / reference`.
    pub fn exp_average(&self, c: f64) -> Result<f64> {
        Ok(self.exp_integral(c)? / self.reference as f64)
    }

    /// Rows `k,measure`, depth 0 first, zero rows omitted.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,measure\n");
        for (k, m) in self.entries() {
            let _ = writeln!(out, "{k},{m}");
        }
        out
    }
}

/// `Σ_k m_k e^{c k}`.
pub fn exp_integral(h: &DepthHistogram, c: f64) -> Result<f64> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::Parameter(format!("exponent scale c = {c} must be positive")));
    }
    if let Some(depth) = h.max_depth() {
        if c * depth as f64 > EXP_LIMIT {
            return Err(Error::ExpOverflow { depth, c });
        }
    }
    Ok(h
        .measures
        .iter()
        .enumerate()
        .filter(|(_, &m)| m > 0)
        .map(|(k, &m)| m as f64 * (c * k as f64).exp())
        .sum())
}

/// Measure of a region at each realized pair of class depths `(r, s)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct JointDepthHistogram {
    measures: BTreeMap<(usize, usize), Measure>,
    reference: Measure,
}

impl JointDepthHistogram {
    pub(crate) fn new(reference: Measure) -> Self {
        JointDepthHistogram {
            measures: BTreeMap::new(),
            reference,
        }
    }

    pub(crate) fn add(&mut self, r: usize, s: usize, m: Measure) {
        if m > 0 {
            *self.measures.entry((r, s)).or_insert(0) += m;
        }
    }

    pub fn get(&self, r: usize, s: usize) -> Measure {
        self.measures.get(&(r, s)).copied().unwrap_or(0)
    }

    pub fn reference(&self) -> Measure {
        self.reference
    }

    pub fn entries(&self) -> impl Iterator<Item = ((usize, usize), Measure)> + '_ {
        self.measures.iter().map(|(&k, &v)| (k, v))
    }

    /// Histogram of the first class, summed over `s`.
    pub fn first_marginal(&self) -> DepthHistogram {
        let mut h = DepthHistogram::new(Vec::new(), self.reference);
        for (&(r, _), &m) in &self.measures {
            h.add(r, m);
        }
        h
    }

    /// Histogram of the second class, summed over `r`.
    pub fn second_marginal(&self) -> DepthHistogram {
        let mut h = DepthHistogram::new(Vec::new(), self.reference);
        for (&(_, s), &m) in &self.measures {
            h.add(s, m);
        }
        h
    }

    /// Rows `r,s,measure`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("r,s,measure\n");
        for (&(r, s), &m) in &self.measures {
            let _ = writeln!(out, "{r},{s},{m}");
        }
        out
    }
}
