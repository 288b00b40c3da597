//! Readout confusion model, linear inversion and constrained least-squares repair
//! of inverted counts.
//!
//! Convention: `M[(i, j)] = P(assigned i | prepared j)`, so columns sum to one and
//! measured = M · true.

use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::ProbDist;

/// Inversion is refused above this condition number.
pub const MAX_CONDITION: f64 = 1e6;

#[derive(Debug, Clone, PartialEq)]
pub struct ConfusionMatrix {
    m: DMatrix<f64>,
}

impl ConfusionMatrix {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return Err(Error::DimensionMismatch { expected: m.nrows(), found: m.ncols() });
        }
        if m.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::InvalidArgument("confusion entries must lie in [0, 1]".into()));
        }
        for (j, col) in m.column_iter().enumerate() {
            let s: f64 = col.iter().sum();
            if (s - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidArgument(format!("column {j} sums to {s}")));
            }
        }
        Ok(Self { m })
    }

    pub fn identity(dim: usize) -> Self {
        Self { m: DMatrix::identity(dim, dim) }
    }

    /// `fidelity` on the diagonal, the rest spread evenly over wrong outcomes.
    pub fn synthetic(dim: usize, fidelity: f64) -> Result<Self> {
        if dim < 2 || !(0.0..=1.0).contains(&fidelity) {
            return Err(Error::InvalidArgument(format!("synthetic confusion dim {dim}, fidelity {fidelity}")));
        }
        let off = (1.0 - fidelity) / (dim - 1) as f64;
        Self::new(DMatrix::from_fn(dim, dim, |i, j| if i == j { fidelity } else { off }))
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    /// Ratio of extreme singular values (∞ when singular).
    pub fn condition_number(&self) -> f64 {
        let sv = self.m.singular_values();
        let max = sv.max();
        let min = sv.min();
        if min <= 0.0 {
            f64::INFINITY
        } else {
            max / min
        }
    }

    /// Whitespace-separated rows; `#` starts a comment.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for (k, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let row = line
                .split_whitespace()
                .map(|t| t.parse::<f64>().map_err(|_| Error::Parse { line: k + 1, message: format!("`{t}` is not a number") }))
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        let n = rows.len();
        if n == 0 {
            return Err(Error::Parse { line: 0, message: "empty confusion matrix".into() });
        }
        if let Some(bad) = rows.iter().position(|r| r.len() != n) {
            return Err(Error::Parse { line: 0, message: format!("row {} has {} entries, expected {n}", bad + 1, rows[bad].len()) });
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from("# M[i][j] = P(assigned i | prepared j); rows: assigned, columns: prepared\n");
        for i in 0..self.dim() {
            let row: Vec<String> = (0..self.dim()).map(|j| self.m[(i, j)].to_string()).collect();
            let _ = writeln!(out, "{}", row.join(" "));
        }
        out
    }
}

/// Measured distribution M·p.
pub fn apply_confusion(true_probs: &ProbDist, m: &ConfusionMatrix) -> Result<ProbDist> {
    if true_probs.len() != m.dim() {
        return Err(Error::DimensionMismatch { expected: m.dim(), found: true_probs.len() });
    }
    let p = m.matrix() * DVector::from_column_slice(true_probs.probs());
    ProbDist::new(p.iter().map(|v| v.max(0.0)).collect())
}

/// Inverted counts; entries may be negative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignedCounts {
    pub q: Vec<f64>,
    pub shots: f64,
}

/// M⁻¹·counts.
pub fn invert_confusion(counts: &[f64], m: &ConfusionMatrix) -> Result<SignedCounts> {
    if counts.len() != m.dim() {
        return Err(Error::DimensionMismatch { expected: m.dim(), found: counts.len() });
    }
    let cond = m.condition_number();
    if !(cond <= MAX_CONDITION) {
        return Err(Error::IllConditioned(cond));
    }
    let q = m
        .matrix()
        .clone()
        .lu()
        .solve(&DVector::from_column_slice(counts))
        .ok_or(Error::IllConditioned(f64::INFINITY))?;
    Ok(SignedCounts { q: q.iter().copied().collect(), shots: counts.iter().sum() })
}

fn weights(q: &[f64], shots: f64) -> Vec<f64> {
    let guard = shots.sqrt();
    q.iter().map(|v| if v.abs() < guard { guard } else { v.abs() }).collect()
}

/// Σ((p_i − q_i)/w_i)² with w_i = |q_i|, or √N where |q_i| < √N.
pub fn mle_cost(p: &[f64], q: &SignedCounts) -> f64 {
    weights(&q.q, q.shots)
        .iter()
        .zip(p.iter().zip(&q.q))
        .map(|(w, (pi, qi))| ((pi - qi) / w).powi(2))
        .sum()
}

/// Minimizes [`mle_cost`] subject to p_i ≥ `floor` (default √N) and Σp = N.
///
/// The optimum has the form p_i = max(floor, q_i + λ·w_i²) for the unique λ
/// that restores the total; λ is found exactly on the piecewise-linear sum.
pub fn mle_correct(q: &SignedCounts, floor: Option<f64>) -> Result<Vec<f64>> {
    let n = q.shots;
    if !(n > 0.0) || q.q.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument(format!("shots {n} must be positive and counts finite")));
    }
    if (q.q.iter().sum::<f64>() - n).abs() > 1e-6 * n.max(1.0) {
        return Err(Error::InvalidArgument("signed counts do not sum to the shot total".into()));
    }
    let f = floor.unwrap_or_else(|| n.sqrt());
    let d = q.q.len();
    if f * d as f64 > n {
        return Err(Error::Infeasible(format!("{d} outcomes with floor {f} exceed {n} shots")));
    }
    let w2: Vec<f64> = weights(&q.q, n).iter().map(|w| w * w).collect();
    let total = |lam: f64| -> f64 { q.q.iter().zip(&w2).map(|(qi, w)| f.max(qi + lam * w)).sum() };
    // breakpoints where coordinate i leaves the floor
    let mut bps: Vec<f64> = q.q.iter().zip(&w2).map(|(qi, w)| (f - qi) / w).collect();
    bps.sort_by(f64::total_cmp);
    // g is nondecreasing; find the first breakpoint with g ≥ n
    let hi_idx = bps.iter().position(|&b| total(b) >= n);
    let (lo, hi) = match hi_idx {
        Some(0) => (bps[0], bps[0]),
        Some(k) => (bps[k - 1], bps[k]),
        None => (bps[d - 1], f64::INFINITY),
    };
    let lam = if lo == hi {
        lo
    } else {
        // on (lo, hi) the free set is fixed: g(λ) = g(lo) + (λ − lo)·Σ_free w²
        let slope: f64 = q.q.iter().zip(&w2).filter(|(qi, w)| *qi + lo * *w >= f - 1e-12 * w.max(1.0)).map(|(_, w)| *w).sum();
        if slope <= 0.0 {
            return Err(Error::Infeasible("no free coordinates".into()));
        }
        lo + (n - total(lo)) / slope
    };
    let mut p: Vec<f64> = q.q.iter().zip(&w2).map(|(qi, w)| f.max(qi + lam * w)).collect();
    // remove rounding drift from the free coordinates
    let drift = p.iter().sum::<f64>() - n;
    if drift != 0.0 {
        let free: Vec<usize> = (0..d).filter(|&i| p[i] > f).collect();
        let wsum: f64 = free.iter().map(|&i| w2[i]).sum();
        for &i in &free {
            p[i] = (p[i] - drift * w2[i] / wsum).max(f);
        }
    }
    Ok(p)
}

/// Inverts the confusion matrix and repairs the result; returns corrected counts.
pub fn mitigate_counts(counts: &[u64], m: &ConfusionMatrix, floor: Option<f64>) -> Result<Vec<f64>> {
    let raw: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
    mle_correct(&invert_confusion(&raw, m)?, floor)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::BasisLabel;

    #[test]
    fn identity_confusion_is_transparent() {
        let p = ProbDist::new(vec![0.2, 0.3, 0.5]).unwrap();
        assert_eq!(apply_confusion(&p, &ConfusionMatrix::identity(3)).unwrap(), p);
        let c = invert_confusion(&[10.0, 20.0, 70.0], &ConfusionMatrix::identity(3)).unwrap();
        assert_eq!(c.q, vec![10.0, 20.0, 70.0]);
    }

    #[test]
    fn synthetic_forward_on_delta() {
        let m = ConfusionMatrix::synthetic(9, 0.85).unwrap();
        let out = apply_confusion(&ProbDist::delta(&BasisLabel::pair(0, 0).unwrap()), &m).unwrap();
        assert!((out.probs()[0] - 0.85).abs() < 1e-12);
        assert!((out.probs().iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn forward_inverse_round_trip() {
        let m = ConfusionMatrix::synthetic(9, 0.8).unwrap();
        let p = ProbDist::new((1..=9).map(|k| k as f64 / 45.0).collect()).unwrap();
        let measured = apply_confusion(&p, &m).unwrap();
        let back = invert_confusion(measured.probs(), &m).unwrap();
        for (a, b) in back.q.iter().zip(p.probs()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn validation_and_conditioning() {
        assert!(ConfusionMatrix::new(DMatrix::from_row_slice(2, 2, &[0.9, 0.2, 0.2, 0.8])).is_err());
        assert!(ConfusionMatrix::new(DMatrix::from_row_slice(2, 3, &[1.0; 6])).is_err());
        let singular = ConfusionMatrix::new(DMatrix::from_element(2, 2, 0.5)).unwrap();
        assert!(matches!(invert_confusion(&[1.0, 1.0], &singular), Err(Error::IllConditioned(_))));
    }

    #[test]
    fn text_round_trip() {
        let m = ConfusionMatrix::synthetic(9, 0.83).unwrap();
        assert_eq!(ConfusionMatrix::from_text(&m.to_text()).unwrap(), m);
        assert!(ConfusionMatrix::from_text("1 0\n0").is_err());
        assert!(ConfusionMatrix::from_text("# nothing").is_err());
        assert!(matches!(ConfusionMatrix::from_text("1 x\n0 1"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn interior_point_unchanged() {
        let q = SignedCounts { q: vec![5000.0, 3000.0, 2000.0, 1000.0, 1000.0, 2000.0, 2000.0, 2000.0, 2000.0], shots: 20000.0 };
        let p = mle_correct(&q, None).unwrap();
        for (a, b) in p.iter().zip(&q.q) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn negative_entry_floored() {
        let mut q = vec![-50.0, 20050.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0];
        // filler keeps the total at 20000 while staying feasible elsewhere
        q[1] = 20050.0 - 7.0 * 300.0;
        for v in q.iter_mut().skip(2) {
            *v = 300.0;
        }
        let sc = SignedCounts { q, shots: 20000.0 };
        let p = mle_correct(&sc, None).unwrap();
        assert!((p[0] - 20000f64.sqrt()).abs() < 1e-9, "{p:?}");
        assert!((p.iter().sum::<f64>() - 20000.0).abs() < 1e-6);
    }

    #[test]
    fn infeasible_small_totals() {
        let sc = SignedCounts { q: vec![10.0; 8].into_iter().chain([-5.0]).collect(), shots: 75.0 };
        assert!(matches!(mle_correct(&sc, None), Err(Error::Infeasible(_))));
    }
}
