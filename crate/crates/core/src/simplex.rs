//! Exact integration over signed unions of rational simplices.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::mpoly::MPoly;
use crate::rational::{to_f64, Rat};

/// An affine `n`-simplex with an orientation weight.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplexDomain {
    vertices: Vec<Vec<Rat>>,
    sign: i8,
}

impl SimplexDomain {
    pub fn new(vertices: Vec<Vec<Rat>>, sign: i8) -> Result<Self> {
        if sign != 1 && sign != -1 {
            return Err(Error::InvalidDomain(alloc::format!("sign must be ±1, got {sign}")));
        }
        let n = vertices.len().checked_sub(1).filter(|&n| n >= 1).ok_or_else(|| {
            Error::InvalidDomain("a simplex needs at least two vertices".into())
        })?;
        if vertices.iter().any(|v| v.len() != n) {
            return Err(Error::InvalidDomain(alloc::format!(
                "an {n}-simplex needs {} vertices with {n} coordinates each",
                n + 1
            )));
        }
        Ok(SimplexDomain { vertices, sign })
    }

    /// `{x_i >= 0, Σ x_i <= 1}`.
    pub fn standard(n: usize) -> Self {
        let mut vertices = vec![vec![Rat::zero(); n]];
        for i in 0..n {
            let mut v = vec![Rat::zero(); n];
            v[i] = Rat::one();
            vertices.push(v);
        }
        SimplexDomain { vertices, sign: 1 }
    }

    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn vertices(&self) -> &[Vec<Rat>] {
        &self.vertices
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    pub fn is_standard(&self) -> bool {
        *self == Self::standard(self.dim())
    }

    /// `x = v0 + A y` mapping the standard simplex onto this one.
    pub fn affine_map(&self) -> (Vec<Rat>, Vec<Vec<Rat>>) {
        let n = self.dim();
        let v0 = self.vertices[0].clone();
        let a = (0..n)
            .map(|i| (1..=n).map(|k| &self.vertices[k][i] - &v0[i]).collect())
            .collect();
        (v0, a)
    }

    /// Determinant of the affine map.
    pub fn jacobian(&self) -> Rat {
        let (_, a) = self.affine_map();
        Matrix::from_rows(a).det()
    }

    /// `sign · |det|`: the constant that multiplies a pulled-back integral.
    pub fn weight(&self, piece: usize) -> Result<Rat> {
        let det = self.jacobian();
        if det.is_zero() {
            return Err(Error::DegenerateSimplex { piece });
        }
        let w = det.abs();
        Ok(if self.sign < 0 { -w } else { w })
    }

    /// Replaces each vertex in turn by `point`, giving `n+1` simplices that
    /// tile this one when `point` is interior.
    pub fn barycentric_split(&self, point: &[Rat]) -> Vec<SimplexDomain> {
        (0..self.vertices.len())
            .map(|i| {
                let mut v = self.vertices.clone();
                v[i] = point.to_vec();
                SimplexDomain { vertices: v, sign: self.sign }
            })
            .collect()
    }

    pub fn barycenter(&self) -> Vec<Rat> {
        let k = Rat::from_integer(BigInt::from(self.vertices.len()));
        (0..self.dim())
            .map(|i| self.vertices.iter().map(|v| v[i].clone()).sum::<Rat>() / &k)
            .collect()
    }

    fn float_map(&self) -> (Vec<f64>, Vec<Vec<f64>>) {
        let (v0, a) = self.affine_map();
        (
            v0.iter().map(to_f64).collect(),
            a.iter().map(|r| r.iter().map(to_f64).collect()).collect(),
        )
    }

    /// Image of a standard-simplex point under the affine map.
    pub fn map_point(&self, y: &[f64]) -> Vec<f64> {
        let (v0, a) = self.float_map();
        apply_affine(&v0, &a, y)
    }

    /// Barycentric coordinates of `x` (float).
    fn barycentric(&self, x: &[f64]) -> Option<Vec<f64>> {
        let (v0, a) = self.float_map();
        let n = self.dim();
        // solve A y = x - v0 by Gaussian elimination with partial pivoting
        let mut m: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let mut row = a[i].clone();
                row.push(x[i] - v0[i]);
                row
            })
            .collect();
        for c in 0..n {
            let p = (c..n).max_by(|&i, &j| libm::fabs(m[i][c]).total_cmp(&libm::fabs(m[j][c])))?;
            if m[p][c] == 0.0 {
                return None;
            }
            m.swap(c, p);
            for r in 0..n {
                if r != c {
                    let f = m[r][c] / m[c][c];
                    for k in c..=n {
                        m[r][k] -= f * m[c][k];
                    }
                }
            }
        }
        let y: Vec<f64> = (0..n).map(|i| m[i][n] / m[i][i]).collect();
        let mut b = vec![1.0 - y.iter().sum::<f64>()];
        b.extend(y);
        Some(b)
    }
}

pub(crate) fn apply_affine(v0: &[f64], a: &[Vec<f64>], y: &[f64]) -> Vec<f64> {
    v0.iter()
        .zip(a)
        .map(|(o, row)| o + row.iter().zip(y).map(|(p, q)| p * q).sum::<f64>())
        .collect()
}

/// A finite signed union of simplices sharing one dimension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Domain {
    nvars: usize,
    pieces: Vec<SimplexDomain>,
}

impl Domain {
    pub fn new(nvars: usize, pieces: Vec<SimplexDomain>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::InvalidDomain("a domain needs at least one piece".into()));
        }
        if let Some(bad) = pieces.iter().position(|p| p.dim() != nvars) {
            return Err(Error::InvalidDomain(alloc::format!(
                "piece {bad} has dimension {}, expected {nvars}",
                pieces[bad].dim()
            )));
        }
        Ok(Domain { nvars, pieces })
    }

    pub fn standard(n: usize) -> Self {
        Domain { nvars: n, pieces: vec![SimplexDomain::standard(n)] }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn pieces(&self) -> &[SimplexDomain] {
        &self.pieces
    }

    /// Signed volume.
    pub fn volume(&self) -> Result<Rat> {
        integrate_poly(&MPoly::one(self.nvars), self)
    }

    /// Quasi-random points, `per_piece` in each piece.
    pub fn sample_points(&self, per_piece: usize) -> Vec<Vec<f64>> {
        let mut out = Vec::new();
        for piece in &self.pieces {
            let (v0, a) = piece.float_map();
            for k in 0..per_piece {
                let u = halton(k + 1, self.nvars);
                out.push(apply_affine(&v0, &a, &duffy(&u)));
            }
        }
        out
    }

    /// Whether sampled interior points of one piece fall strictly inside
    /// another piece.
    pub fn interiors_overlap(&self, per_piece: usize) -> bool {
        const MARGIN: f64 = 1e-9;
        for (i, p) in self.pieces.iter().enumerate() {
            let (v0, a) = p.float_map();
            for k in 0..per_piece {
                let x = apply_affine(&v0, &a, &duffy(&halton(k + 1, self.nvars)));
                for (j, q) in self.pieces.iter().enumerate() {
                    if i != j && q.barycentric(&x).is_some_and(|b| b.iter().all(|&c| c > MARGIN)) {
                        return true;
                    }
                }
            }
        }
        false
    }

    /// Canonical text used for digests.
    pub fn canonical_string(&self) -> String {
        use core::fmt::Write;
        let mut s = alloc::format!("n={};", self.nvars);
        for p in &self.pieces {
            let _ = write!(s, "{}:", p.sign);
            for v in &p.vertices {
                s.push('(');
                for (k, c) in v.iter().enumerate() {
                    if k > 0 {
                        s.push(',');
                    }
                    let _ = write!(s, "{c}");
                }
                s.push(')');
            }
            s.push(';');
        }
        s
    }
}

/// Maps the unit cube onto the standard simplex:
/// `x_k = u_k · Π_{j<k} (1 - u_j)`.
pub fn duffy(u: &[f64]) -> Vec<f64> {
    let mut rest = 1.0;
    u.iter()
        .map(|&uk| {
            let x = uk * rest;
            rest *= 1.0 - uk;
            x
        })
        .collect()
}

const PRIMES: [usize; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

/// Point `index` of the Halton sequence in `[0,1)^dim`.
pub fn halton(index: usize, dim: usize) -> Vec<f64> {
    (0..dim)
        .map(|d| {
            let base = PRIMES[d % PRIMES.len()];
            let mut f = 1.0;
            let mut r = 0.0;
            let mut i = index;
            while i > 0 {
                f /= base as f64;
                r += f * (i % base) as f64;
                i /= base;
            }
            r
        })
        .collect()
}

/// `∫ Π x_i^{a_i}` over the standard simplex: `Π a_i! / (n + Σ a_i)!`.
pub fn integrate_monomial(exponents: &[u32]) -> Rat {
    let table = FactorialTable::new(exponents.len() as u64 + exponents.iter().map(|&a| a as u64).sum::<u64>());
    table.monomial(exponents)
}

struct FactorialTable(Vec<BigUint>);

impl FactorialTable {
    fn new(max: u64) -> Self {
        let mut t = vec![BigUint::one()];
        for k in 1..=max {
            let next = t.last().unwrap() * k;
            t.push(next);
        }
        FactorialTable(t)
    }

    fn monomial(&self, exponents: &[u32]) -> Rat {
        let n = exponents.len();
        let total = n + exponents.iter().map(|&a| a as usize).sum::<usize>();
        let num: BigUint = exponents.iter().map(|&a| &self.0[a as usize]).product();
        Rat::new(BigInt::from(num), BigInt::from(self.0[total].clone()))
    }
}

/// `∫` of a polynomial over the standard simplex.
fn integrate_standard(p: &MPoly) -> Rat {
    let max = p.nvars() as u64 + p.degree().unwrap_or(0) as u64;
    let table = FactorialTable::new(max);
    p.terms().map(|(e, c)| c * table.monomial(e)).sum()
}

fn pull_back(f: &MPoly, piece: &SimplexDomain) -> MPoly {
    if piece.is_standard() {
        f.clone()
    } else {
        let (v0, a) = piece.affine_map();
        f.compose_affine(&v0, &a)
    }
}

fn check_nvars(f: &MPoly, d: &Domain) -> Result<()> {
    if f.nvars() != d.nvars() {
        return Err(Error::DimensionMismatch { expected: d.nvars(), got: f.nvars() });
    }
    Ok(())
}

pub fn integrate_poly(f: &MPoly, d: &Domain) -> Result<Rat> {
    check_nvars(f, d)?;
    let mut total = Rat::zero();
    for (i, piece) in d.pieces().iter().enumerate() {
        let w = piece.weight(i)?;
        total += integrate_standard(&pull_back(f, piece)) * w;
    }
    Ok(total)
}

/// `I(k) = ∫_C f^k` for `k = 0..=N`, with content digests of the inputs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MomentSequence {
    pub values: Vec<Rat>,
    pub f_digest: String,
    pub domain_digest: String,
}

impl MomentSequence {
    /// A bare sequence (e.g. a series handed in directly), without provenance.
    pub fn from_values(values: Vec<Rat>) -> Self {
        MomentSequence { values, f_digest: String::new(), domain_digest: String::new() }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

pub fn moments(f: &MPoly, d: &Domain, n: usize) -> Result<MomentSequence> {
    check_nvars(f, d)?;
    let mut values = vec![Rat::zero(); n + 1];
    for (i, piece) in d.pieces().iter().enumerate() {
        let w = piece.weight(i)?;
        let g = pull_back(f, piece);
        let mut powers = Vec::with_capacity(n + 1);
        powers.push(MPoly::one(d.nvars()));
        for k in 1..=n {
            let next = powers[k - 1].mul(&g);
            powers.push(next);
        }
        let integrals = integrate_all(&powers);
        for (v, x) in values.iter_mut().zip(integrals) {
            *v += x * &w;
        }
    }
    Ok(MomentSequence {
        values,
        f_digest: digest(&alloc::format!("n={};{}", f.nvars(), f)),
        domain_digest: digest(&d.canonical_string()),
    })
}

#[cfg(feature = "parallel")]
fn integrate_all(powers: &[MPoly]) -> Vec<Rat> {
    use rayon::prelude::*;
    powers.par_iter().map(integrate_standard).collect()
}

#[cfg(not(feature = "parallel"))]
fn integrate_all(powers: &[MPoly]) -> Vec<Rat> {
    powers.iter().map(integrate_standard).collect()
}

fn digest(text: &str) -> String {
    use core::fmt::Write;
    use sha2::{Digest, Sha256};
    let hash = Sha256::digest(text.as_bytes());
    let mut out = String::with_capacity(64);
    for b in hash.iter() {
        let _ = write!(out, "{b:02x}");
    }
    out
}

/// Sign strings `(a_1..a_n, b_1..b_m)` with all `a = +1` or all `b = +1`,
/// lexicographic with `+1` before `-1`.
pub fn decompose_union(n_count: usize, m_count: usize) -> Vec<Vec<i8>> {
    let len = n_count + m_count;
    assert!(len < 32, "too many sign positions");
    (0u32..(1 << len))
        .map(|bits| {
            (0..len)
                .map(|pos| if bits >> (len - 1 - pos) & 1 == 0 { 1 } else { -1 })
                .collect::<Vec<i8>>()
        })
        .filter(|e| e[..n_count].iter().all(|&a| a == 1) || e[n_count..].iter().all(|&b| b == 1))
        .collect()
}

/// Inflated sampled bound `R̂` on `|f|` over the domain.
pub fn sup_estimate(f: &MPoly, d: &Domain, samples: usize) -> f64 {
    let fp = f.to_float();
    let mut best = 0.0f64;
    for piece in d.pieces() {
        for v in piece.vertices() {
            let x: Vec<f64> = v.iter().map(to_f64).collect();
            best = best.max(libm::fabs(fp.eval(&x)));
        }
        let c: Vec<f64> = piece.barycenter().iter().map(to_f64).collect();
        best = best.max(libm::fabs(fp.eval(&c)));
    }
    for x in d.sample_points(samples) {
        best = best.max(libm::fabs(fp.eval(&x)));
    }
    1.1 * best
}

/// Smallest sampled value of `f` (used for the nonnegativity warning).
pub fn sampled_minimum(f: &MPoly, d: &Domain, samples: usize) -> f64 {
    let fp = f.to_float();
    let mut points = d.sample_points(samples);
    for piece in d.pieces() {
        points.extend(piece.vertices().iter().map(|v| v.iter().map(to_f64).collect::<Vec<f64>>()));
    }
    points.iter().map(|x| fp.eval(x)).fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mpoly::parse_poly;
    use crate::rational::{rat, ratio};

    fn segment(a: Rat, b: Rat) -> SimplexDomain {
        SimplexDomain::new(vec![vec![a], vec![b]], 1).unwrap()
    }

    #[test]
    fn monomial_closed_form() {
        assert_eq!(integrate_monomial(&[0, 0]), ratio(1, 2));
        assert_eq!(integrate_monomial(&[1, 1]), ratio(1, 24));
        assert_eq!(integrate_monomial(&[3]), ratio(1, 4));
    }

    #[test]
    fn additivity_on_a_split_segment() {
        let f = parse_poly("x1", &["x1"]).unwrap();
        let d = Domain::new(1, vec![segment(rat(0), ratio(1, 2)), segment(ratio(1, 2), rat(1))]).unwrap();
        assert_eq!(integrate_poly(&f, &d).unwrap(), ratio(1, 2));
    }

    #[test]
    fn orientation_of_vertices_does_not_matter_sign_does() {
        let f = parse_poly("x1", &["x1"]).unwrap();
        let rev = Domain::new(1, vec![segment(rat(1), rat(0))]).unwrap();
        assert_eq!(integrate_poly(&f, &rev).unwrap(), ratio(1, 2));
        let neg = Domain::new(1, vec![SimplexDomain::new(vec![vec![rat(0)], vec![rat(1)]], -1).unwrap()]).unwrap();
        assert_eq!(integrate_poly(&f, &neg).unwrap(), ratio(-1, 2));
    }

    #[test]
    fn degenerate_piece_is_rejected() {
        let s = SimplexDomain::new(vec![vec![rat(0), rat(0)], vec![rat(1), rat(1)], vec![rat(2), rat(2)]], 1).unwrap();
        let d = Domain::new(2, vec![SimplexDomain::standard(2), s]).unwrap();
        let f = MPoly::one(2);
        assert_eq!(integrate_poly(&f, &d), Err(Error::DegenerateSimplex { piece: 1 }));
        assert!(SimplexDomain::new(vec![vec![rat(0)], vec![rat(1)]], 2).is_err());
        assert!(Domain::new(2, vec![]).is_err());
    }

    #[test]
    fn moment_sequences() {
        let d = Domain::standard(1);
        let x = parse_poly("x1", &["x1"]).unwrap();
        let m = moments(&x, &d, 3).unwrap();
        assert_eq!(m.values, vec![rat(1), ratio(1, 2), ratio(1, 3), ratio(1, 4)]);
        assert_eq!(m.f_digest.len(), 64);
        let b = parse_poly("x1 - x1^2", &["x1"]).unwrap();
        assert_eq!(moments(&b, &d, 2).unwrap().values[2], ratio(1, 30));
        let two = parse_poly("2", &["x1"]).unwrap();
        assert_eq!(moments(&two, &d, 2).unwrap().values, vec![rat(1), rat(2), rat(4)]);
    }

    #[test]
    fn sign_strings() {
        assert_eq!(decompose_union(1, 1), vec![vec![1, 1], vec![1, -1], vec![-1, 1]]);
        assert_eq!(decompose_union(2, 1).len(), 5);
        assert_eq!(decompose_union(1, 2).len(), 5);
        assert_eq!(decompose_union(3, 2).len(), 8 + 4 - 1);
    }

    #[test]
    fn sup_estimates() {
        let d = Domain::standard(1);
        let x = parse_poly("x1", &["x1"]).unwrap();
        assert!((sup_estimate(&x, &d, 64) - 1.1).abs() < 1e-15);
        assert!((sup_estimate(&MPoly::one(1), &d, 64) - 1.1).abs() < 1e-15);
        let b = parse_poly("x1 - x1^2", &["x1"]).unwrap();
        assert!(sup_estimate(&b, &d, 64) >= 0.25);
    }

    #[test]
    fn overlap_detection() {
        let d = Domain::new(1, vec![segment(rat(0), rat(1)), segment(ratio(1, 2), rat(2))]).unwrap();
        assert!(d.interiors_overlap(32));
        let d = Domain::new(1, vec![segment(rat(0), rat(1)), segment(rat(1), rat(2))]).unwrap();
        assert!(!d.interiors_overlap(32));
    }

    #[test]
    fn duffy_lands_in_simplex() {
        for k in 1..200 {
            let x = duffy(&halton(k, 3));
            assert!(x.iter().all(|&c| c >= 0.0));
            assert!(x.iter().sum::<f64>() <= 1.0);
        }
    }
}
