//! Analytically defined test matrices and seeded random generators.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::engine::DirectionSet;
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, ZERO};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GalleryMatrix {
    Lesp,
    Jordbloc,
    Grcar,
    Kms,
    Minij,
    Parter,
}

impl GalleryMatrix {
    pub const ALL: [GalleryMatrix; 6] = [
        GalleryMatrix::Lesp,
        GalleryMatrix::Jordbloc,
        GalleryMatrix::Grcar,
        GalleryMatrix::Kms,
        GalleryMatrix::Minij,
        GalleryMatrix::Parter,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GalleryMatrix::Lesp => "lesp",
            GalleryMatrix::Jordbloc => "jordbloc",
            GalleryMatrix::Grcar => "grcar",
            GalleryMatrix::Kms => "kms",
            GalleryMatrix::Minij => "minij",
            GalleryMatrix::Parter => "parter",
        }
    }
}

impl fmt::Display for GalleryMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GalleryMatrix {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        GalleryMatrix::ALL
            .into_iter()
            .find(|g| g.name() == s)
            .ok_or_else(|| Error::BadParams(format!("unknown gallery matrix `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GalleryParams {
    /// jordbloc eigenvalue
    pub lambda: f64,
    /// kms parameter in (0, 1)
    pub rho: f64,
}

impl Default for GalleryParams {
    fn default() -> Self {
        Self { lambda: 1.0, rho: 0.5 }
    }
}

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

pub fn generate(name: GalleryMatrix, n: usize, params: GalleryParams) -> Result<ComplexMatrix> {
    if n == 0 {
        return Err(Error::BadParams("gallery matrices need n >= 1".into()));
    }
    let m = match name {
        GalleryMatrix::Lesp => lesp(n),
        GalleryMatrix::Jordbloc => jordbloc(n, params.lambda),
        GalleryMatrix::Grcar => ComplexMatrix::from_fn(n, n, |i, j| {
            if i == j + 1 {
                real(-1.0)
            } else if j >= i && j <= i + 3 {
                real(1.0)
            } else {
                ZERO
            }
        }),
        GalleryMatrix::Kms => {
            if !(params.rho > 0.0 && params.rho < 1.0) {
                return Err(Error::BadParams(format!("kms needs rho in (0, 1), got {}", params.rho)));
            }
            ComplexMatrix::from_fn(n, n, |i, j| real(params.rho.powi(i.abs_diff(j) as i32)))
        }
        GalleryMatrix::Minij => ComplexMatrix::from_fn(n, n, |i, j| real((i.min(j) + 1) as f64)),
        GalleryMatrix::Parter => ComplexMatrix::from_fn(n, n, |i, j| real(1.0 / (i as f64 - j as f64 + 0.5))),
    };
    Ok(m)
}

/// Tridiagonal with diagonal `−(2i+3)`, superdiagonal `i+1` in row `i` and
/// subdiagonal `1/(i+1)` in row `i+1` (one-based `i`). The diagonal similarity
/// that symmetrizes it leaves unit off-diagonals.
pub fn lesp(n: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |r, c| {
        let i = r as f64 + 1.0;
        if r == c {
            real(-(2.0 * i + 3.0))
        } else if c == r + 1 {
            real(i + 1.0)
        } else if r == c + 1 {
            real(1.0 / i)
        } else {
            ZERO
        }
    })
}

pub fn jordbloc(n: usize, lambda: f64) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |i, j| {
        if i == j {
            real(lambda)
        } else if j == i + 1 {
            real(1.0)
        } else {
            ZERO
        }
    })
}

fn gaussian(n: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    (0..n).map(|_| (0..n).map(|_| rng.sample(StandardNormal)).collect()).collect()
}

/// Orthogonal factor of the QR factorization of a seeded Gaussian matrix,
/// signs normalized so that `R` has a positive diagonal.
pub fn random_orthogonal(n: usize, seed: u64) -> ComplexMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // columns of the Gaussian matrix
    let mut q = gaussian(n, &mut rng);
    // modified Gram-Schmidt, applied twice for orthogonality to working precision
    for j in 0..n {
        for _ in 0..2 {
            for i in 0..j {
                let (head, tail) = q.split_at_mut(j);
                let p: f64 = head[i].iter().zip(&tail[0]).map(|(a, b)| a * b).sum();
                for (x, y) in tail[0].iter_mut().zip(&head[i]) {
                    *x -= p * y;
                }
            }
        }
        let nrm = q[j].iter().map(|x| x * x).sum::<f64>().sqrt();
        q[j].iter_mut().for_each(|x| *x /= nrm);
    }
    ComplexMatrix::from_fn(n, n, |i, j| real(q[j][i]))
}

/// `Q A Qᵀ` with `Q` from [`random_orthogonal`].
pub fn random_similarity(a: &ComplexMatrix, seed: u64) -> ComplexMatrix {
    let q = random_orthogonal(a.nrows(), seed);
    q.matmul(a).matmul(&q.transpose())
}

/// `Q diag(λ) Qᵀ` with eigenvalues drawn uniformly from `[lo, hi]`.
pub fn random_hpd(n: usize, seed: u64, lo: f64, hi: f64) -> ComplexMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let lambda: Vec<f64> = (0..n).map(|_| rng.random_range(lo..=hi)).collect();
    random_similarity(&ComplexMatrix::from_real_diag(&lambda), seed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DirectionKind {
    /// standard normal entries
    Dense,
    /// `e_α e_βᵀ` with uniform indices
    UnitPairs,
}

impl FromStr for DirectionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dense" => Ok(DirectionKind::Dense),
            "unit-pairs" => Ok(DirectionKind::UnitPairs),
            _ => Err(Error::BadParams(format!("unknown direction kind `{s}`"))),
        }
    }
}

pub fn random_directions(kind: DirectionKind, n: usize, k: usize, seed: u64) -> DirectionSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match kind {
        DirectionKind::Dense => DirectionSet::Dense(
            (0..k)
                .map(|_| ComplexMatrix::from_fn(n, n, |_, _| real(rng.sample(StandardNormal))))
                .collect(),
        ),
        DirectionKind::UnitPairs => {
            let pairs: Vec<(usize, usize)> = (0..k).map(|_| (rng.random_range(0..n), rng.random_range(0..n))).collect();
            DirectionSet::unit_pairs(n, &pairs).expect("indices drawn in range")
        }
    }
}
