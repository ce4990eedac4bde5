use crate::error::{Error, Result};
use crate::graphs::Graph;

fn check_distinct(image: &[usize], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    for &v in image {
        if v >= n {
            return Err(Error::InvalidMap(format!("image value {v} out of range 0..{n}")));
        }
        if seen[v] {
            return Err(Error::InvalidMap(format!("image value {v} repeated")));
        }
        seen[v] = true;
    }
    Ok(())
}

/// Total injection `{0..m} -> {0..n}`, `image[u] = f(u)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Injection {
    n: usize,
    image: Vec<usize>,
}

impl Injection {
    pub fn new(n: usize, image: Vec<usize>) -> Result<Self> {
        if image.len() > n {
            return Err(Error::InvalidMap(format!("domain size {} exceeds codomain size {n}", image.len())));
        }
        check_distinct(&image, n)?;
        Ok(Injection { n, image })
    }

    pub fn identity(m: usize, n: usize) -> Result<Self> {
        Self::new(n, (0..m).collect())
    }

    pub fn m(&self) -> usize {
        self.image.len()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    #[inline]
    pub fn apply(&self, u: usize) -> usize {
        self.image[u]
    }

    /// Sorted range `R f`.
    pub fn range(&self) -> Vec<usize> {
        let mut r = self.image.clone();
        r.sort_unstable();
        r
    }

    /// Checks `f(x) = y` restricted to the range, i.e. `f` embeds `x` into `y`.
    pub fn embeds(&self, x: &Graph, y: &Graph) -> Result<bool> {
        if x.n() != self.m() || y.n() != self.n {
            return Err(Error::InvalidMap(format!(
                "injection {}->{} does not fit graphs on {} and {} vertices",
                self.m(),
                self.n,
                x.n(),
                y.n()
            )));
        }
        let m = self.m();
        for a in 0..m {
            for b in a + 1..m {
                if x.has_edge(a, b) != y.has_edge(self.image[a], self.image[b]) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// Injection defined on a size-`m` subset of `0..n_domain` with values in
/// `0..n_codomain`. `domain` is strictly increasing and `image[i]` is the
/// value at `domain[i]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PartialInjection {
    n_domain: usize,
    n_codomain: usize,
    domain: Vec<usize>,
    image: Vec<usize>,
}

impl PartialInjection {
    /// Both ground sets equal to `0..n`.
    pub fn new(n: usize, domain: Vec<usize>, image: Vec<usize>) -> Result<Self> {
        Self::between(n, n, domain, image)
    }

    pub fn between(n_domain: usize, n_codomain: usize, domain: Vec<usize>, image: Vec<usize>) -> Result<Self> {
        if domain.len() != image.len() {
            return Err(Error::InvalidMap(format!("domain has {} points but image has {}", domain.len(), image.len())));
        }
        for (k, &u) in domain.iter().enumerate() {
            if u >= n_domain {
                return Err(Error::InvalidMap(format!("domain point {u} out of range 0..{n_domain}")));
            }
            if k > 0 && domain[k - 1] >= u {
                return Err(Error::InvalidMap("domain must be strictly increasing".into()));
            }
        }
        check_distinct(&image, n_codomain)?;
        Ok(PartialInjection { n_domain, n_codomain, domain, image })
    }

    /// Builds from unordered `(u, f(u))` pairs.
    pub fn from_pairs(n_domain: usize, n_codomain: usize, mut pairs: Vec<(usize, usize)>) -> Result<Self> {
        pairs.sort_unstable();
        let (domain, image) = pairs.into_iter().unzip();
        Self::between(n_domain, n_codomain, domain, image)
    }

    pub fn m(&self) -> usize {
        self.domain.len()
    }

    pub fn n_domain(&self) -> usize {
        self.n_domain
    }

    pub fn n_codomain(&self) -> usize {
        self.n_codomain
    }

    pub fn domain(&self) -> &[usize] {
        &self.domain
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    /// Sorted range `R f`.
    pub fn range(&self) -> Vec<usize> {
        let mut r = self.image.clone();
        r.sort_unstable();
        r
    }

    /// `f(u)` if `u` is in the domain.
    pub fn get(&self, u: usize) -> Option<usize> {
        self.domain.binary_search(&u).ok().map(|i| self.image[i])
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.domain.iter().copied().zip(self.image.iter().copied())
    }
}

/// Indicator `J_f`: every pair inside `D f` is an edge of `x` exactly when
/// its image is an edge of `y`.
pub fn is_partial_isomorphism(x: &Graph, y: &Graph, f: &PartialInjection) -> Result<bool> {
    if f.n_domain != x.n() || f.n_codomain != y.n() {
        return Err(Error::InvalidMap(format!(
            "partial injection over {}x{} does not fit graphs on {} and {} vertices",
            f.n_domain,
            f.n_codomain,
            x.n(),
            y.n()
        )));
    }
    let m = f.m();
    for a in 0..m {
        for b in a + 1..m {
            if x.has_edge(f.domain[a], f.domain[b]) != y.has_edge(f.image[a], f.image[b]) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
