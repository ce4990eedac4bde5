//! Threshold calculus for both phase transitions.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::ModelParams;

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Same as [`ModelParams::new`].
pub fn derive_params(p: f64, q: f64) -> Result<ModelParams> {
    ModelParams::new(p, q)
}

/// `max(tau_{1,2}, tau_{2,1}) < tau^{3/2}`; the boundary is excluded.
pub fn in_admissible_region(p: f64, q: f64) -> Result<bool> {
    Ok(ModelParams::new(p, q)?.in_admissible_region())
}

/// Corner of the admissible region with `p < q`, found by bisection on
/// the anti-diagonal `q = 1 - p`. There `tau_{1,2} = tau_{2,1} = tau/2`,
/// so the boundary is where `tau/2 = tau^{3/2}`.
pub fn region_corner() -> (f64, f64) {
    let excess = |p: f64| {
        let mp = ModelParams::new(p, 1.0 - p).expect("interior point");
        mp.tau_jk(1, 2) - mp.tau.powf(1.5)
    };
    // excess > 0 near p = 0 and < 0 at p = 1/2.
    let (mut lo, mut hi) = (1e-9, 0.5);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if excess(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let p = 0.5 * (lo + hi);
    (p, 1.0 - p)
}

/// `W(x) = x + 2 lambda ln x + (lambda / x) ln(2 pi x)` and its first two
/// derivatives.
pub fn w_eval(x: f64, lambda: f64, order: u8) -> Result<f64> {
    match order {
        0 if x >= 1.0 => Ok(x + 2.0 * lambda * x.ln() + lambda / x * (TWO_PI * x).ln()),
        1 if x > 0.0 => Ok(1.0 + 2.0 * lambda / x + lambda * (1.0 - (TWO_PI * x).ln()) / (x * x)),
        2 if x > 0.0 => Ok(2.0 * lambda / x.powi(3) * (x.ln() - x + TWO_PI.ln() - 1.5)),
        0..=2 => Err(Error::Domain(format!("W^({order}) is not defined at x = {x}"))),
        _ => Err(Error::Domain(format!("derivative order {order} not supported"))),
    }
}

/// `R(n) = 4 lambda ln n + 2 lambda + 1`.
pub fn r_of_n(n: f64, lambda: f64) -> f64 {
    4.0 * lambda * n.ln() + 2.0 * lambda + 1.0
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MStar {
    pub m_star: f64,
    pub r_n: f64,
    pub residual: f64,
}

/// Root of `W(x) = R(n)`. `W` is increasing with `x < W(x)`, so the root
/// lies in `[1, R(n)]` whenever `W(1) <= R(n)`.
pub fn m_star(n: f64, params: &ModelParams, tol: f64) -> Result<MStar> {
    let lambda = params.lambda;
    let w = |x: f64| w_eval(x, lambda, 0).expect("x >= 1 inside the bracket");
    if !(n >= 1.0) {
        return Err(Error::NTooSmall(n));
    }
    let r_n = r_of_n(n, lambda);
    if w(1.0) > r_n {
        return Err(Error::NTooSmall(n));
    }
    let (mut lo, mut hi) = (1.0, r_n);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        let v = w(mid) - r_n;
        if v.abs() <= tol * 1e-3 {
            lo = mid;
            hi = mid;
            break;
        }
        if v < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let root = 0.5 * (lo + hi);
    Ok(MStar { m_star: root, r_n, residual: (w(root) - r_n).abs() })
}

/// `m~ = R(n) - 2 lambda ln R(n)`.
pub fn m_star_approx(n: f64, params: &ModelParams) -> Result<f64> {
    if !(n >= 1.0) {
        return Err(Error::NTooSmall(n));
    }
    let r = r_of_n(n, params.lambda);
    Ok(r - 2.0 * params.lambda * r.ln())
}

fn slack(n: u64, cn: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::Parameter(format!("n = {n} must be at least 2")));
    }
    if !(cn > 0.0) {
        return Err(Error::Parameter(format!("C_n = {cn} must be positive")));
    }
    Ok(cn / (n as f64).ln())
}

/// `(floor(2 log2 n + 1 - C_n/ln n), ceil(2 log2 n + 1 + C_n/ln n))`.
pub fn embed_thresholds(n: u64, cn: f64) -> Result<(i64, i64)> {
    let s = slack(n, cn)?;
    let center = 2.0 * (n as f64).log2() + 1.0;
    Ok(((center - s).floor() as i64, (center + s).ceil() as i64))
}

/// Thresholds around `m_star` without the region check; the flag reports
/// whether `(p, q)` is admissible.
pub fn common_thresholds_unchecked(n: u64, params: &ModelParams, cn: f64) -> Result<(i64, i64, bool)> {
    let s = slack(n, cn)?;
    let ms = m_star(n as f64, params, 1e-10)?.m_star;
    Ok(((ms - s).floor() as i64, (ms + s).ceil() as i64, params.in_admissible_region()))
}

/// `(floor(m_star - C_n/ln n), ceil(m_star + C_n/ln n))` for admissible `(p, q)`.
pub fn common_thresholds(n: u64, params: &ModelParams, cn: f64) -> Result<(i64, i64)> {
    let (lo, hi, inside) = common_thresholds_unchecked(n, params, cn)?;
    if !inside {
        return Err(Error::Region { p: params.p, q: params.q });
    }
    Ok((lo, hi))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ThresholdConfig {
    pub n: u64,
    pub cn: f64,
}

impl ThresholdConfig {
    /// Default slack `C_n = ln ln n` for `n >= 16`, else 1.
    pub fn new(n: u64) -> Result<Self> {
        let cn = if n >= 16 { (n as f64).ln().ln() } else { 1.0 };
        Self::with_cn(n, cn)
    }

    pub fn with_cn(n: u64, cn: f64) -> Result<Self> {
        slack(n, cn)?;
        Ok(ThresholdConfig { n, cn })
    }

    /// `C_n / ln n`.
    pub fn slack(&self) -> f64 {
        self.cn / (self.n as f64).ln()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThresholdReport {
    pub n: u64,
    pub cn: f64,
    pub slack: f64,
    /// `C_n / ln n >= 1`: the window is wider than the theory intends.
    pub slack_warning: bool,
    pub m_minus: i64,
    pub m_plus: i64,
    pub m_star: f64,
    pub m_tilde: f64,
    pub r_n: f64,
    pub residual: f64,
    pub m_low: i64,
    pub m_high: i64,
    pub in_region: bool,
    pub params: ModelParams,
}

pub fn threshold_report(config: &ThresholdConfig, params: &ModelParams) -> Result<ThresholdReport> {
    let (m_minus, m_plus) = embed_thresholds(config.n, config.cn)?;
    let ms = m_star(config.n as f64, params, 1e-10)?;
    let (m_low, m_high, in_region) = common_thresholds_unchecked(config.n, params, config.cn)?;
    Ok(ThresholdReport {
        n: config.n,
        cn: config.cn,
        slack: config.slack(),
        slack_warning: config.slack() >= 1.0,
        m_minus,
        m_plus,
        m_star: ms.m_star,
        m_tilde: m_star_approx(config.n as f64, params)?,
        r_n: ms.r_n,
        residual: ms.residual,
        m_low,
        m_high,
        in_region,
        params: *params,
    })
}
