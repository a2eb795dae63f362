//! Shannon quantities over dense probability tensors.
//!
//! All logarithms are base 2 and `0 log 0 = 0`. Summation runs in flat index
//! order so results are reproducible bit-for-bit.

use crate::error::{Error, Result};

/// Entropy in bits of a (not necessarily normalized) weight vector.
///
/// Non-positive entries contribute nothing.
pub fn entropy(p: &[f64]) -> f64 {
    let mut h = 0.0;
    for &q in p {
        if q > 0.0 {
            h -= q * q.log2();
        }
    }
    h.max(0.0)
}

pub fn binary_entropy(q: f64) -> f64 {
    entropy(&[q, 1.0 - q])
}

/// `I(A:B)` of a row-major `na x nb` matrix.
pub fn mutual_information_matrix(na: usize, nb: usize, p: &[f64]) -> f64 {
    conditional_mutual_information_tensor(na, nb, 1, p)
}

/// `I(A:B|C)` of a row-major `na x nb x nc` tensor, computed as
/// `sum p(a,b,c) log[p(a,b,c) p(c) / (p(a,c) p(b,c))]`.
pub fn conditional_mutual_information_tensor(na: usize, nb: usize, nc: usize, p: &[f64]) -> f64 {
    debug_assert_eq!(p.len(), na * nb * nc);
    let mut pac = vec![0.0; na * nc];
    let mut pbc = vec![0.0; nb * nc];
    let mut pc = vec![0.0; nc];
    for a in 0..na {
        for b in 0..nb {
            for c in 0..nc {
                let v = p[(a * nb + b) * nc + c];
                pac[a * nc + c] += v;
                pbc[b * nc + c] += v;
                pc[c] += v;
            }
        }
    }
    let mut total = 0.0;
    for a in 0..na {
        for b in 0..nb {
            for c in 0..nc {
                let v = p[(a * nb + b) * nc + c];
                if v > 0.0 {
                    total += v * (v * pc[c] / (pac[a * nc + c] * pbc[b * nc + c])).log2();
                }
            }
        }
    }
    total.max(0.0)
}

/// A dense joint pmf of arbitrary rank, used for quantities over more than
/// three variables (auxiliary systems, four-variable joints).
#[derive(Debug, Clone, PartialEq)]
pub struct JointPmf {
    shape: Vec<usize>,
    p: Vec<f64>,
}

impl JointPmf {
    pub fn new(shape: Vec<usize>, p: Vec<f64>) -> Result<Self> {
        let expected: usize = shape.iter().product();
        if expected != p.len() {
            return Err(Error::ShapeMismatch {
                expected,
                found: p.len(),
            });
        }
        Ok(Self { shape, p })
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn probs(&self) -> &[f64] {
        &self.p
    }

    pub fn rank(&self) -> usize {
        self.shape.len()
    }

    /// Sums out every axis not listed; the result keeps the listed order.
    pub fn marginal(&self, axes: &[usize]) -> JointPmf {
        let shape: Vec<usize> = axes.iter().map(|&a| self.shape[a]).collect();
        let mut out = vec![0.0; shape.iter().product()];
        let mut idx = vec![0usize; self.rank()];
        for &v in &self.p {
            let mut flat = 0;
            for &a in axes {
                flat = flat * self.shape[a] + idx[a];
            }
            out[flat] += v;
            self.advance(&mut idx);
        }
        JointPmf { shape, p: out }
    }

    pub fn entropy_of(&self, axes: &[usize]) -> f64 {
        entropy(&self.marginal(axes).p)
    }

    /// `H(A|C)`.
    pub fn conditional_entropy(&self, a: &[usize], c: &[usize]) -> f64 {
        let mut ac: Vec<usize> = a.to_vec();
        ac.extend_from_slice(c);
        (self.entropy_of(&ac) - self.entropy_of(c)).max(0.0)
    }

    pub fn mutual_information(&self, a: &[usize], b: &[usize]) -> f64 {
        self.conditional_mutual_information(a, b, &[])
    }

    /// `I(A:B|C)` for disjoint axis groups.
    pub fn conditional_mutual_information(&self, a: &[usize], b: &[usize], c: &[usize]) -> f64 {
        let (na, nb, nc, t) = self.grouped(a, b, c);
        conditional_mutual_information_tensor(na, nb, nc, &t)
    }

    /// Collapses the three axis groups into a rank-3 tensor, summing out the rest.
    pub fn grouped(&self, a: &[usize], b: &[usize], c: &[usize]) -> (usize, usize, usize, Vec<f64>) {
        let size = |g: &[usize]| g.iter().map(|&i| self.shape[i]).product::<usize>();
        let (na, nb, nc) = (size(a), size(b), size(c));
        let mut out = vec![0.0; na * nb * nc];
        let mut idx = vec![0usize; self.rank()];
        let flat = |g: &[usize], idx: &[usize]| g.iter().fold(0, |acc, &i| acc * self.shape[i] + idx[i]);
        for &v in &self.p {
            let (ia, ib, ic) = (flat(a, &idx), flat(b, &idx), flat(c, &idx));
            out[(ia * nb + ib) * nc + ic] += v;
            self.advance(&mut idx);
        }
        (na, nb, nc, out)
    }

    fn advance(&self, idx: &mut [usize]) {
        for axis in (0..idx.len()).rev() {
            idx[axis] += 1;
            if idx[axis] < self.shape[axis] {
                return;
            }
            idx[axis] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_entropy_is_log_n() {
        for n in 1..=10 {
            let p = vec![1.0 / n as f64; n];
            assert!((entropy(&p) - (n as f64).log2()).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_mass_contributes_nothing() {
        assert_eq!(entropy(&[1.0, 0.0, 0.0]), 0.0);
        assert!((binary_entropy(0.5) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn perfect_bit_has_one_bit_of_information() {
        let p = [0.5, 0.0, 0.0, 0.5];
        assert!((mutual_information_matrix(2, 2, &p) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn grouped_axes_match_direct_cmi() {
        // X = Y uniform bit, W an independent fair coin.
        let mut p = vec![0.0; 8];
        for x in 0..2 {
            for w in 0..2 {
                p[(x * 2 + x) * 2 + w] = 0.25;
            }
        }
        let j = JointPmf::new(vec![2, 2, 2], p).unwrap();
        assert!((j.mutual_information(&[0], &[1]) - 1.0).abs() < 1e-12);
        assert!(j.conditional_mutual_information(&[0], &[2], &[1]).abs() < 1e-12);
        assert!((j.conditional_mutual_information(&[0, 2], &[1], &[]) - 1.0).abs() < 1e-12);
        assert!((j.conditional_entropy(&[0, 2], &[1]) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn marginal_keeps_requested_axis_order() {
        let p: Vec<f64> = (0..6).map(|i| i as f64 / 15.0).collect();
        let j = JointPmf::new(vec![2, 3], p).unwrap();
        let t = j.marginal(&[1, 0]);
        assert_eq!(t.shape(), &[3, 2]);
        assert!((t.probs()[1] - 3.0 / 15.0).abs() < 1e-15);
    }

    #[test]
    fn shape_mismatch_is_rejected() {
        assert!(JointPmf::new(vec![2, 2], vec![0.25; 3]).is_err());
    }
}
