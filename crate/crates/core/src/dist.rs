//! Exact finite distributions over labelled alphabets.
//!
//! Probabilities are `f64` with a normalization tolerance of
//! [`NORMALIZATION_TOL`]; an outcome is in the support when its mass exceeds
//! [`SUPPORT_TOL`].

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::info::{self, JointPmf};

pub const NORMALIZATION_TOL: f64 = 1e-9;
pub const SUPPORT_TOL: f64 = 1e-12;

/// An ordered set of distinct symbol labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct Alphabet {
    labels: Vec<String>,
    #[serde(skip)]
    index: HashMap<String, usize>,
}

impl Alphabet {
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(Error::EmptyAlphabet);
        }
        let mut index = HashMap::with_capacity(labels.len());
        for (i, l) in labels.iter().enumerate() {
            if index.insert(l.clone(), i).is_some() {
                return Err(Error::DuplicateLabel(l.clone()));
            }
        }
        Ok(Self { labels, index })
    }

    /// The alphabet `{"0", "1", ..., "n-1"}`.
    pub fn range(n: usize) -> Self {
        Self::new((0..n).map(|i| i.to_string())).expect("n must be positive")
    }

    /// Labels of the form `a,b` in row-major order.
    pub fn product(&self, other: &Alphabet) -> Result<Self> {
        Self::new(
            self.labels
                .iter()
                .flat_map(|a| other.labels.iter().map(move |b| format!("{a},{b}"))),
        )
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn lookup(&self, label: &str) -> Result<usize> {
        self.index_of(label)
            .ok_or_else(|| Error::UnknownSymbol(label.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Var {
    X,
    Y,
    Z,
}

impl Var {
    fn axis(self) -> usize {
        self as usize
    }
}

/// Outcome of [`validate_tensor`].
#[derive(Debug, Clone, PartialEq)]
pub struct Validation {
    pub total: f64,
    pub support: Vec<[usize; 3]>,
}

/// Checks non-negativity and normalization of a row-major `x * y * z` tensor.
pub fn validate_tensor(shape: [usize; 3], p: &[f64]) -> Result<Validation> {
    let expected = shape.iter().product();
    if p.len() != expected {
        return Err(Error::ShapeMismatch {
            expected,
            found: p.len(),
        });
    }
    let unflatten = |i: usize| [i / (shape[1] * shape[2]), (i / shape[2]) % shape[1], i % shape[2]];
    let mut total = 0.0;
    let mut support = Vec::new();
    for (i, &v) in p.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::NonFinite {
                index: unflatten(i).to_vec(),
            });
        }
        if v < 0.0 {
            return Err(Error::NegativeEntry {
                index: unflatten(i).to_vec(),
                value: v,
            });
        }
        if v > SUPPORT_TOL {
            support.push(unflatten(i));
        }
        total += v;
    }
    let deviation = (total - 1.0).abs();
    if deviation > NORMALIZATION_TOL {
        return Err(Error::Normalization { total, deviation });
    }
    Ok(Validation { total, support })
}

/// A marginal over some subset of `{X, Y, Z}`, axes in the requested order.
#[derive(Debug, Clone, PartialEq)]
pub struct Marginal {
    pub vars: Vec<Var>,
    pub shape: Vec<usize>,
    pub p: Vec<f64>,
}

/// The joint pmf `p(x, y, z)`, stored densely with `z` fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct TripartiteDistribution {
    x: Alphabet,
    y: Alphabet,
    z: Alphabet,
    p: Vec<f64>,
}

impl TripartiteDistribution {
    pub fn new(x: Alphabet, y: Alphabet, z: Alphabet, p: Vec<f64>) -> Result<Self> {
        validate_tensor([x.len(), y.len(), z.len()], &p)?;
        Ok(Self { x, y, z, p })
    }

    pub fn from_fn(
        x: Alphabet,
        y: Alphabet,
        z: Alphabet,
        mut f: impl FnMut(usize, usize, usize) -> f64,
    ) -> Result<Self> {
        let mut p = Vec::with_capacity(x.len() * y.len() * z.len());
        for i in 0..x.len() {
            for j in 0..y.len() {
                for k in 0..z.len() {
                    p.push(f(i, j, k));
                }
            }
        }
        Self::new(x, y, z, p)
    }

    /// Builds a distribution with a single-symbol `Z` alphabet.
    pub fn from_bipartite(b: &BipartiteDistribution) -> Self {
        Self {
            x: b.x.clone(),
            y: b.y.clone(),
            z: Alphabet::range(1),
            p: b.p.clone(),
        }
    }

    pub fn x(&self) -> &Alphabet {
        &self.x
    }

    pub fn y(&self) -> &Alphabet {
        &self.y
    }

    pub fn z(&self) -> &Alphabet {
        &self.z
    }

    pub fn shape(&self) -> [usize; 3] {
        [self.x.len(), self.y.len(), self.z.len()]
    }

    pub fn probs(&self) -> &[f64] {
        &self.p
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize, z: usize) -> f64 {
        self.p[(x * self.y.len() + y) * self.z.len() + z]
    }

    pub fn validate(&self) -> Result<Validation> {
        validate_tensor(self.shape(), &self.p)
    }

    pub fn support(&self) -> Vec<[usize; 3]> {
        self.validate().map(|v| v.support).unwrap_or_default()
    }

    pub fn to_joint(&self) -> JointPmf {
        JointPmf::new(self.shape().to_vec(), self.p.clone()).expect("shape is consistent")
    }

    /// Sums out the unlisted variables one axis at a time, `Z` first, each in
    /// index order, so that marginalizing in stages gives bit-identical results.
    pub fn marginal(&self, vars: &[Var]) -> Marginal {
        let mut shape = self.shape().to_vec();
        let mut kept: Vec<usize> = vec![0, 1, 2];
        let mut p = self.p.clone();
        for axis in (0..3).rev() {
            if vars.iter().any(|v| v.axis() == axis) {
                continue;
            }
            let pos = kept.iter().position(|&a| a == axis).expect("axis kept so far");
            let outer: usize = shape[..pos].iter().product();
            let inner: usize = shape[pos + 1..].iter().product();
            let n = shape[pos];
            let mut out = vec![0.0; outer * inner];
            for o in 0..outer {
                for k in 0..n {
                    for i in 0..inner {
                        out[o * inner + i] += p[(o * n + k) * inner + i];
                    }
                }
            }
            p = out;
            shape.remove(pos);
            kept.remove(pos);
        }
        let axes: Vec<usize> = vars.iter().map(|v| v.axis()).collect();
        let local: Vec<usize> = axes
            .iter()
            .map(|a| kept.iter().position(|k| k == a).expect("listed axes are kept"))
            .collect();
        let m = JointPmf::new(shape, p).expect("shape is consistent").marginal(&local);
        Marginal {
            vars: vars.to_vec(),
            shape: m.shape().to_vec(),
            p: m.probs().to_vec(),
        }
    }

    pub fn marginal_x(&self) -> Vec<f64> {
        self.marginal(&[Var::X]).p
    }

    pub fn marginal_y(&self) -> Vec<f64> {
        self.marginal(&[Var::Y]).p
    }

    pub fn marginal_z(&self) -> Vec<f64> {
        self.marginal(&[Var::Z]).p
    }

    pub fn marginal_xy(&self) -> BipartiteDistribution {
        BipartiteDistribution {
            x: self.x.clone(),
            y: self.y.clone(),
            p: self.marginal(&[Var::X, Var::Y]).p,
        }
    }

    /// `p_{XY|Z=z}` together with the weight `p_Z(z)`.
    pub fn condition_on_z(&self, z: usize) -> Result<(BipartiteDistribution, f64)> {
        let nz = self.z.len();
        let weight: f64 = (0..self.x.len() * self.y.len())
            .map(|xy| self.p[xy * nz + z])
            .sum();
        if weight <= SUPPORT_TOL {
            return Err(Error::ZeroWeight(self.z.label(z).to_string()));
        }
        let p = (0..self.x.len() * self.y.len())
            .map(|xy| self.p[xy * nz + z] / weight)
            .collect();
        Ok((
            BipartiteDistribution {
                x: self.x.clone(),
                y: self.y.clone(),
                p,
            },
            weight,
        ))
    }

    pub fn condition_on_label(&self, z: &str) -> Result<(BipartiteDistribution, f64)> {
        self.condition_on_z(self.z.lookup(z)?)
    }

    /// All conditional slices with positive weight, in `Z` order.
    pub fn slices(&self) -> Vec<Slice> {
        (0..self.z.len())
            .filter_map(|z| {
                self.condition_on_z(z)
                    .ok()
                    .map(|(dist, weight)| Slice { z, weight, dist })
            })
            .collect()
    }

    /// The same distribution with the roles of `X` and `Y` exchanged.
    pub fn swap_xy(&self) -> Self {
        let [nx, ny, nz] = self.shape();
        let mut p = vec![0.0; self.p.len()];
        for x in 0..nx {
            for y in 0..ny {
                for z in 0..nz {
                    p[(y * nx + x) * nz + z] = self.get(x, y, z);
                }
            }
        }
        Self {
            x: self.y.clone(),
            y: self.x.clone(),
            z: self.z.clone(),
            p,
        }
    }

    /// `p(x, y, zbar) = sum_z p(x, y, z) t[z][zbar]`.
    pub fn apply_channel_to_z(&self, c: &Channel) -> Result<Self> {
        if c.input.len() != self.z.len() {
            return Err(Error::AlphabetMismatch {
                expected: self.z.len(),
                found: c.input.len(),
            });
        }
        let nxy = self.x.len() * self.y.len();
        let (nz, nzb) = (self.z.len(), c.output.len());
        let mut p = vec![0.0; nxy * nzb];
        for xy in 0..nxy {
            for z in 0..nz {
                let v = self.p[xy * nz + z];
                if v == 0.0 {
                    continue;
                }
                for zb in 0..nzb {
                    p[xy * nzb + zb] += v * c.get(z, zb);
                }
            }
        }
        Self::new(self.x.clone(), self.y.clone(), c.output.clone(), p)
    }

    pub fn entropy(&self, vars: &[Var]) -> f64 {
        info::entropy(&self.marginal(vars).p)
    }

    pub fn conditional_entropy(&self, a: &[Var], given: &[Var]) -> f64 {
        self.to_joint().conditional_entropy(&axes(a), &axes(given))
    }

    pub fn mutual_information(&self, a: &[Var], b: &[Var]) -> f64 {
        self.to_joint().mutual_information(&axes(a), &axes(b))
    }

    pub fn cmi(&self, a: &[Var], b: &[Var], given: &[Var]) -> f64 {
        self.to_joint()
            .conditional_mutual_information(&axes(a), &axes(b), &axes(given))
    }

    /// `I(X:Y|Z)`.
    pub fn conditional_mutual_information(&self) -> f64 {
        let [nx, ny, nz] = self.shape();
        info::conditional_mutual_information_tensor(nx, ny, nz, &self.p)
    }
}

fn axes(vars: &[Var]) -> Vec<usize> {
    vars.iter().map(|v| v.axis()).collect()
}

/// A positive-weight conditional slice `p_{XY|Z=z}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Slice {
    pub z: usize,
    pub weight: f64,
    pub dist: BipartiteDistribution,
}

/// A joint pmf `p(x, y)` stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteDistribution {
    x: Alphabet,
    y: Alphabet,
    p: Vec<f64>,
}

impl BipartiteDistribution {
    pub fn new(x: Alphabet, y: Alphabet, p: Vec<f64>) -> Result<Self> {
        validate_tensor([x.len(), y.len(), 1], &p)?;
        Ok(Self { x, y, p })
    }

    /// Convenience constructor over `{0..nx-1} x {0..ny-1}`.
    pub fn from_matrix(rows: &[&[f64]]) -> Result<Self> {
        let ny = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != ny) {
            return Err(Error::ShapeMismatch {
                expected: ny,
                found: rows.iter().map(|r| r.len()).find(|&l| l != ny).unwrap_or(0),
            });
        }
        if ny == 0 {
            return Err(Error::EmptyAlphabet);
        }
        Self::new(
            Alphabet::range(rows.len()),
            Alphabet::range(ny),
            rows.concat(),
        )
    }

    pub fn x(&self) -> &Alphabet {
        &self.x
    }

    pub fn y(&self) -> &Alphabet {
        &self.y
    }

    pub fn nx(&self) -> usize {
        self.x.len()
    }

    pub fn ny(&self) -> usize {
        self.y.len()
    }

    pub fn probs(&self) -> &[f64] {
        &self.p
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.p[x * self.y.len() + y]
    }

    pub fn marginal_x(&self) -> Vec<f64> {
        self.p.chunks(self.ny()).map(|r| r.iter().sum()).collect()
    }

    pub fn marginal_y(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.ny()];
        for row in self.p.chunks(self.ny()) {
            for (o, v) in out.iter_mut().zip(row) {
                *o += v;
            }
        }
        out
    }

    pub fn support_x(&self) -> Vec<bool> {
        self.marginal_x().iter().map(|&v| v > SUPPORT_TOL).collect()
    }

    pub fn support_y(&self) -> Vec<bool> {
        self.marginal_y().iter().map(|&v| v > SUPPORT_TOL).collect()
    }

    pub fn transpose(&self) -> Self {
        let (nx, ny) = (self.nx(), self.ny());
        let mut p = vec![0.0; nx * ny];
        for x in 0..nx {
            for y in 0..ny {
                p[y * nx + x] = self.get(x, y);
            }
        }
        Self {
            x: self.y.clone(),
            y: self.x.clone(),
            p,
        }
    }

    /// `(1 - t) self + t other` over the same alphabets.
    pub fn mix(&self, other: &Self, t: f64) -> Self {
        debug_assert_eq!(self.p.len(), other.p.len());
        let p = self
            .p
            .iter()
            .zip(&other.p)
            .map(|(a, b)| (1.0 - t) * a + t * b)
            .collect();
        Self {
            x: self.x.clone(),
            y: self.y.clone(),
            p,
        }
    }

    pub fn mutual_information(&self) -> f64 {
        info::mutual_information_matrix(self.nx(), self.ny(), &self.p)
    }
}

/// A row-stochastic map from one alphabet to another.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Channel {
    input: Alphabet,
    output: Alphabet,
    t: Vec<f64>,
}

impl Channel {
    pub fn new(input: Alphabet, output: Alphabet, t: Vec<f64>) -> Result<Self> {
        let (ni, no) = (input.len(), output.len());
        if t.len() != ni * no {
            return Err(Error::ShapeMismatch {
                expected: ni * no,
                found: t.len(),
            });
        }
        for (row, r) in t.chunks(no).enumerate() {
            if let Some(col) = r.iter().position(|v| !v.is_finite() || *v < 0.0) {
                return Err(Error::NegativeEntry {
                    index: vec![row, col],
                    value: r[col],
                });
            }
            let sum: f64 = r.iter().sum();
            if (sum - 1.0).abs() > NORMALIZATION_TOL {
                return Err(Error::NotRowStochastic { row, sum });
            }
        }
        Ok(Self { input, output, t })
    }

    pub fn identity(alphabet: &Alphabet) -> Self {
        Self::deterministic(alphabet, alphabet, &(0..alphabet.len()).collect::<Vec<_>>())
            .expect("identity map is valid")
    }

    /// Maps every input to `target`.
    pub fn constant(input: &Alphabet, output: &Alphabet, target: usize) -> Result<Self> {
        Self::deterministic(input, output, &vec![target; input.len()])
    }

    /// The channel induced by a function `map[i]` on indices.
    pub fn deterministic(input: &Alphabet, output: &Alphabet, map: &[usize]) -> Result<Self> {
        if map.len() != input.len() {
            return Err(Error::AlphabetMismatch {
                expected: input.len(),
                found: map.len(),
            });
        }
        let no = output.len();
        let mut t = vec![0.0; input.len() * no];
        for (i, &o) in map.iter().enumerate() {
            if o >= no {
                return Err(Error::AlphabetMismatch {
                    expected: no,
                    found: o + 1,
                });
            }
            t[i * no + o] = 1.0;
        }
        Ok(Self {
            input: input.clone(),
            output: output.clone(),
            t,
        })
    }

    pub fn input(&self) -> &Alphabet {
        &self.input
    }

    pub fn output(&self) -> &Alphabet {
        &self.output
    }

    pub fn matrix(&self) -> &[f64] {
        &self.t
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let no = self.output.len();
        &self.t[i * no..(i + 1) * no]
    }

    #[inline]
    pub fn get(&self, i: usize, o: usize) -> f64 {
        self.t[i * self.output.len() + o]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits() -> Alphabet {
        Alphabet::range(2)
    }

    fn uniform_cube() -> TripartiteDistribution {
        TripartiteDistribution::new(bits(), bits(), bits(), vec![0.125; 8]).unwrap()
    }

    fn perfect_bit() -> TripartiteDistribution {
        TripartiteDistribution::from_fn(bits(), bits(), Alphabet::range(1), |x, y, _| {
            if x == y {
                0.5
            } else {
                0.0
            }
        })
        .unwrap()
    }

    #[test]
    fn alphabet_rejects_duplicates_and_empty() {
        assert_eq!(
            Alphabet::new(["a", "b", "a"]),
            Err(Error::DuplicateLabel("a".into()))
        );
        assert_eq!(Alphabet::new(Vec::<String>::new()), Err(Error::EmptyAlphabet));
        let a = Alphabet::new(["u", "v"]).unwrap();
        assert_eq!(a.index_of("v"), Some(1));
        assert_eq!(a.label(0), "u");
    }

    #[test]
    fn uniform_cube_is_valid_with_full_support() {
        assert_eq!(uniform_cube().validate().unwrap().support.len(), 8);
    }

    #[test]
    fn half_mass_reports_deviation() {
        let err = validate_tensor([2, 2, 2], &[0.0625; 8]).unwrap_err();
        match err {
            Error::Normalization { deviation, .. } => assert!((deviation - 0.5).abs() < 1e-15),
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn negative_entry_reports_index() {
        let mut p = vec![0.0; 8];
        p[0] = 1.1;
        p[5] = -0.1;
        let err = validate_tensor([2, 2, 2], &p).unwrap_err();
        assert_eq!(
            err,
            Error::NegativeEntry {
                index: vec![1, 0, 1],
                value: -0.1
            }
        );
    }

    #[test]
    fn marginals_of_simple_cases() {
        assert_eq!(perfect_bit().marginal_x(), vec![0.5, 0.5]);
        let xy = uniform_cube().marginal(&[Var::X, Var::Y]);
        assert_eq!(xy.p, vec![0.25; 4]);
        assert_eq!(xy.shape, vec![2, 2]);
    }

    #[test]
    fn marginalization_commutes_exactly() {
        let d = TripartiteDistribution::from_fn(
            Alphabet::range(3),
            Alphabet::range(2),
            Alphabet::range(2),
            |x, y, z| (1 + x + 2 * y + 3 * z) as f64 / 54.0,
        )
        .unwrap();
        assert_eq!(d.marginal_xy().marginal_x(), d.marginal_x());
        assert_eq!(d.marginal_xy().marginal_y(), d.marginal_y());
    }

    #[test]
    fn conditioning_on_zero_weight_fails() {
        let d = TripartiteDistribution::from_fn(bits(), bits(), bits(), |x, y, z| {
            if z == 0 && x == y {
                0.5
            } else {
                0.0
            }
        })
        .unwrap();
        assert_eq!(d.condition_on_z(1), Err(Error::ZeroWeight("1".into())));
        let (slice, w) = d.condition_on_z(0).unwrap();
        assert_eq!(w, 1.0);
        assert_eq!(slice.probs(), &[0.5, 0.0, 0.0, 0.5]);
    }

    #[test]
    fn information_of_closed_forms() {
        assert!((perfect_bit().conditional_mutual_information() - 1.0).abs() < 1e-12);
        assert!(uniform_cube().conditional_mutual_information().abs() < 1e-12);
        assert!((uniform_cube().entropy(&[Var::X, Var::Y, Var::Z]) - 3.0).abs() < 1e-12);
        assert!(perfect_bit().conditional_entropy(&[Var::X], &[Var::Y]).abs() < 1e-12);
    }

    #[test]
    fn identity_and_constant_channels() {
        let d = perfect_bit();
        let same = d.apply_channel_to_z(&Channel::identity(d.z())).unwrap();
        assert_eq!(same, d);

        let cube = uniform_cube();
        let erase = Channel::constant(cube.z(), cube.z(), 0).unwrap();
        let e = cube.apply_channel_to_z(&erase).unwrap();
        let ixy = cube.mutual_information(&[Var::X], &[Var::Y]);
        assert!((e.conditional_mutual_information() - ixy).abs() < 1e-12);
    }

    #[test]
    fn channel_alphabet_mismatch() {
        let d = perfect_bit();
        let c = Channel::identity(&bits());
        assert!(matches!(
            d.apply_channel_to_z(&c),
            Err(Error::AlphabetMismatch { .. })
        ));
    }

    #[test]
    fn channel_rows_must_be_stochastic() {
        assert!(matches!(
            Channel::new(bits(), bits(), vec![0.5, 0.4, 0.0, 1.0]),
            Err(Error::NotRowStochastic { row: 0, .. })
        ));
    }

    #[test]
    fn swap_transposes_xy() {
        let d = TripartiteDistribution::from_fn(Alphabet::range(2), Alphabet::range(3), bits(), |x, y, z| {
            (1 + x + 2 * y + 5 * z) as f64 / 72.0
        })
        .unwrap();
        let s = d.swap_xy();
        assert_eq!(s.shape(), [3, 2, 2]);
        assert_eq!(s.get(2, 1, 1), d.get(1, 2, 1));
        assert_eq!(s.swap_xy(), d);
    }
}
