use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{vec_norm, ComplexMatrix, ONE, ZERO};

/// Direction matrices `E_1, …, E_k`, either dense or as rank-one factors `E_i = u_i v_iᴴ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum DirectionSet {
    Dense(Vec<ComplexMatrix>),
    RankOne(Vec<(Vec<Complex64>, Vec<Complex64>)>),
}

fn unit_vector(n: usize, i: usize) -> Vec<Complex64> {
    let mut e = vec![ZERO; n];
    e[i] = ONE;
    e
}

impl DirectionSet {
    /// `E_i = e_{α_i} e_{β_i}ᵀ` (zero-based indices).
    pub fn unit_pairs(n: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        if let Some(&(a, b)) = pairs.iter().find(|&&(a, b)| a >= n || b >= n) {
            return Err(Error::BadParams(format!("unit index ({a}, {b}) out of range for n = {n}")));
        }
        Ok(DirectionSet::RankOne(
            pairs.iter().map(|&(a, b)| (unit_vector(n, a), unit_vector(n, b))).collect(),
        ))
    }

    pub fn k(&self) -> usize {
        match self {
            DirectionSet::Dense(e) => e.len(),
            DirectionSet::RankOne(p) => p.len(),
        }
    }

    /// Common dimension of the payload, if any.
    pub fn dim(&self) -> Option<usize> {
        match self {
            DirectionSet::Dense(e) => e.first().map(|m| m.nrows()),
            DirectionSet::RankOne(p) => p.first().map(|(u, _)| u.len()),
        }
    }

    /// Checks that every direction is `n×n` (or a pair of length-`n` vectors) and finite.
    pub fn validate(&self, n: usize) -> Result<()> {
        let bad = |what: String| Err(Error::DimensionMismatch { expected: format!("{n}x{n} directions"), actual: what });
        match self {
            DirectionSet::Dense(e) => {
                for m in e {
                    if m.nrows() != n || m.ncols() != n {
                        return bad(format!("{}x{}", m.nrows(), m.ncols()));
                    }
                    if !m.is_finite() {
                        return Err(Error::BadParams("direction has non-finite entries".into()));
                    }
                }
            }
            DirectionSet::RankOne(p) => {
                for (u, v) in p {
                    if u.len() != n || v.len() != n {
                        return bad(format!("vectors of length {} and {}", u.len(), v.len()));
                    }
                    if !u.iter().chain(v).all(|z| z.is_finite()) {
                        return Err(Error::BadParams("direction has non-finite entries".into()));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn is_real(&self) -> bool {
        match self {
            DirectionSet::Dense(e) => e.iter().all(|m| m.is_real()),
            DirectionSet::RankOne(p) => p.iter().all(|(u, v)| u.iter().chain(v).all(|z| z.im == 0.0)),
        }
    }

    pub fn is_rank_one(&self) -> bool {
        matches!(self, DirectionSet::RankOne(_))
    }

    /// Expands rank-one factors; dense payloads are cloned.
    pub fn to_dense(&self) -> Vec<ComplexMatrix> {
        match self {
            DirectionSet::Dense(e) => e.clone(),
            DirectionSet::RankOne(p) => p.iter().map(|(u, v)| ComplexMatrix::outer(u, v)).collect(),
        }
    }

    pub fn dense_matrix(&self, i: usize) -> ComplexMatrix {
        match self {
            DirectionSet::Dense(e) => e[i].clone(),
            DirectionSet::RankOne(p) => ComplexMatrix::outer(&p[i].0, &p[i].1),
        }
    }

    /// Frobenius norm of each direction.
    pub fn norms(&self) -> Vec<f64> {
        match self {
            DirectionSet::Dense(e) => e.iter().map(|m| m.frobenius()).collect(),
            DirectionSet::RankOne(p) => p.iter().map(|(u, v)| vec_norm(u) * vec_norm(v)).collect(),
        }
    }

    /// Directions reordered so that slot `i` holds the old slot `order[i]`.
    pub fn permuted(&self, order: &[usize]) -> Self {
        match self {
            DirectionSet::Dense(e) => DirectionSet::Dense(order.iter().map(|&i| e[i].clone()).collect()),
            DirectionSet::RankOne(p) => DirectionSet::RankOne(order.iter().map(|&i| p[i].clone()).collect()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_pairs_have_unit_norm() {
        let d = DirectionSet::unit_pairs(4, &[(0, 3), (2, 2)]).unwrap();
        assert_eq!(d.k(), 2);
        assert_eq!(d.dim(), Some(4));
        assert_eq!(d.norms(), vec![1.0, 1.0]);
        let e = d.to_dense();
        assert_eq!(e[0][(0, 3)], ONE);
        assert_eq!(e[0].frobenius(), 1.0);
        assert!(DirectionSet::unit_pairs(2, &[(2, 0)]).is_err());
    }

    #[test]
    fn validation() {
        let d = DirectionSet::Dense(vec![ComplexMatrix::zeros(2, 2), ComplexMatrix::zeros(3, 3)]);
        assert!(matches!(d.validate(2), Err(Error::DimensionMismatch { .. })));
        let d = DirectionSet::RankOne(vec![(vec![ONE; 3], vec![ONE; 3])]);
        assert!(d.validate(3).is_ok());
        assert!(d.is_real());
    }
}
