use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which of the two search problems a quantity refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Problem {
    /// Induced embedding of `G(m, p)` into `G(n, 1/2)`.
    Embed,
    /// Common induced subgraph of size `m` in `G(n, p)` and `G(n, q)`.
    Common,
}

impl std::str::FromStr for Problem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "embed" => Ok(Problem::Embed),
            "common" => Ok(Problem::Common),
            other => Err(Error::Parameter(format!("unknown problem `{other}`"))),
        }
    }
}

impl std::fmt::Display for Problem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Problem::Embed => "embed",
            Problem::Common => "common",
        })
    }
}

/// Edge probabilities `(p, q)` of the two random graphs and the constants
/// derived from them.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ModelParams {
    pub p: f64,
    pub q: f64,
    /// `tau_{1,1} = pq + (1-p)(1-q)`, the probability that one pair agrees.
    pub tau: f64,
    /// `1 / ln(1/tau)`.
    pub lambda: f64,
    pub omega: f64,
    pub beta: f64,
    pub gamma: f64,
    /// `max(p, 1-p)`.
    pub phat: f64,
}

/// `p^j q^k + (1-p)^j (1-q)^k`: probability that `j` independent
/// Bernoulli(p) and `k` independent Bernoulli(q) variables all agree.
pub fn tau_jk(p: f64, q: f64, j: u32, k: u32) -> f64 {
    p.powi(j as i32) * q.powi(k as i32) + (1.0 - p).powi(j as i32) * (1.0 - q).powi(k as i32)
}

fn check_open_unit(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x < 1.0 {
        Ok(())
    } else {
        Err(Error::Parameter(format!("{name} = {x} must lie strictly between 0 and 1")))
    }
}

impl ModelParams {
    pub fn new(p: f64, q: f64) -> Result<Self> {
        check_open_unit("p", p)?;
        check_open_unit("q", q)?;
        let tau = tau_jk(p, q, 1, 1);
        let tau12 = tau_jk(p, q, 1, 2);
        let tau21 = tau_jk(p, q, 2, 1);
        let lambda = 1.0 / (1.0 / tau).ln();
        let omega = (p * q).max((1.0 - p) * (1.0 - q)) / tau;
        let beta = omega.max(tau12 * tau21 / tau.powi(3)).sqrt();
        let gamma = lambda * (tau / tau12).ln();
        Ok(ModelParams { p, q, tau, lambda, omega, beta, gamma, phat: p.max(1.0 - p) })
    }

    /// Parameters of the embedding problem, where the host has `q = 1/2`.
    pub fn embedding(p: f64) -> Result<Self> {
        Self::new(p, 0.5)
    }

    pub fn tau_jk(&self, j: u32, k: u32) -> f64 {
        tau_jk(self.p, self.q, j, k)
    }

    /// Roles of the two graphs exchanged.
    pub fn mirrored(&self) -> Self {
        Self::new(self.q, self.p).expect("already validated")
    }

    /// `max(tau_{1,2}, tau_{2,1}) < tau^{3/2}`, strictly.
    pub fn in_admissible_region(&self) -> bool {
        self.tau_jk(1, 2).max(self.tau_jk(2, 1)) < self.tau.powf(1.5)
    }
}
