//! Generalized singular value functions as right-continuous step profiles.

use serde::{Deserialize, Serialize};

/// Decreasing step function on (0, 1]: value `values[k-1]` on ((k-1)/n, k/n].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SingularValueProfile {
    values: Vec<f64>,
}

impl SingularValueProfile {
    /// Builds from descending nonnegative values; panics on violations since
    /// every producer sorts first.
    pub fn from_descending(values: Vec<f64>) -> Self {
        debug_assert!(values.windows(2).all(|w| w[0] >= w[1]));
        debug_assert!(values.iter().all(|&v| v >= 0.0));
        SingularValueProfile { values }
    }

    pub fn steps(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn breakpoints(&self) -> Vec<f64> {
        let n = self.values.len() as f64;
        (0..=self.values.len()).map(|k| k as f64 / n).collect()
    }

    /// mu(t) for t in (0, 1], right-continuous: the value on ((k-1)/n, k/n].
    pub fn value_at(&self, t: f64) -> f64 {
        let n = self.values.len();
        assert!(t > 0.0 && t <= 1.0, "profile evaluated outside (0,1]");
        let k = (t * n as f64).ceil() as usize;
        self.values[k.clamp(1, n) - 1]
    }

    /// The dilation (sigma_2 p)(t) = p(t/2), truncated to (0, 1].
    pub fn dilate2(&self) -> Self {
        let n = self.values.len();
        let values = (1..=n)
            .map(|k| self.values[(k + 1) / 2 - 1])
            .collect();
        SingularValueProfile { values }
    }

    pub fn scale(&self, factor: f64) -> Self {
        assert!(factor >= 0.0);
        SingularValueProfile {
            values: self.values.iter().map(|v| v * factor).collect(),
        }
    }

    /// Partial integral of log over (0, k/n]: (1/n) sum of log of the first k
    /// values, with -inf when a zero value enters.
    pub fn log_integral(&self, k: usize) -> f64 {
        let n = self.values.len() as f64;
        let mut acc = 0.0f64;
        for &v in &self.values[..k] {
            if v == 0.0 {
                return f64::NEG_INFINITY;
            }
            acc += v.ln();
        }
        acc / n
    }

    /// Full integral of log(1 + mu(t)) over (0, 1].
    pub fn log1p_integral(&self) -> f64 {
        let n = self.values.len() as f64;
        self.values.iter().map(|&v| v.ln_1p()).sum::<f64>() / n
    }
}

/// Outcome of a log-submajorization comparison B <<_log A.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SubmajorizationReport {
    pub holds: bool,
    /// Per-breakpoint margin: integral(log A) - integral(log B) at t = k/n.
    /// +inf when only the B side diverges to -inf; -inf when only the A side
    /// does (a violation).
    pub margins: Vec<f64>,
    pub slack: f64,
}

/// Checks B <<_log A at every breakpoint t = k/n with additive slack.
///
/// -inf bookkeeping: -inf <= -inf counts as holding, as does a -inf on the
/// B side alone; a -inf on the A side alone is a violation.
pub fn log_submajorizes_profiles(
    a: &SingularValueProfile,
    b: &SingularValueProfile,
    slack: f64,
) -> SubmajorizationReport {
    assert_eq!(a.steps(), b.steps(), "profiles must share their grid");
    let n = a.steps();
    let mut holds = true;
    let mut margins = Vec::with_capacity(n);
    for k in 1..=n {
        let ia = a.log_integral(k);
        let ib = b.log_integral(k);
        let margin = if ia == f64::NEG_INFINITY && ib == f64::NEG_INFINITY {
            0.0
        } else {
            ia - ib
        };
        if margin < -slack {
            holds = false;
        }
        margins.push(margin);
    }
    SubmajorizationReport {
        holds,
        margins,
        slack,
    }
}
