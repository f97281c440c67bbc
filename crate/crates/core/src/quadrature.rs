//! Adaptive tensor Gauss–Legendre quadrature over simplices.
//!
//! Each simplex is pulled back to the unit cube through the Duffy map
//! `x_k = u_k Π_{j<k}(1 - u_j)` and integrated cell by cell. The cell with the
//! largest two-level error is halved next, along the axis where halving
//! changes the estimate most, so refinement concentrates on the faces where
//! `f` vanishes and `f^σ log^l f` is singular.

use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::{Error, Result};
use crate::mpoly::{FloatPoly, MPoly};
use crate::rational::to_f64;
use crate::simplex::{apply_affine, duffy, sup_estimate, Domain};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadConfig {
    /// Absolute tolerance on each integral.
    pub tol: f64,
    /// Maximum number of halvings along any one axis.
    pub max_depth: u32,
    /// Gauss points per axis.
    pub base_rule: usize,
    /// Hard cap on the number of leaf cells per simplex.
    pub max_cells: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig { tol: 1e-11, max_depth: 40, base_rule: 10, max_cells: 60_000 }
    }
}

impl QuadConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::InvalidArgument("quadrature tolerance must be positive".into()));
        }
        if self.base_rule < 2 {
            return Err(Error::InvalidArgument("quadrature rule needs at least 2 points".into()));
        }
        if self.max_cells == 0 {
            return Err(Error::InvalidArgument("max_cells must be positive".into()));
        }
        Ok(())
    }

    pub fn with_tol(self, tol: f64) -> Self {
        QuadConfig { tol, ..self }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub err_estimate: f64,
    pub cells_used: usize,
    pub converged: bool,
}

impl QuadResult {
    /// Turns a non-converged result into `NotConverged`.
    pub fn require_converged(self, tol: f64) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::NotConverged { value: self.value, err_estimate: self.err_estimate, tol })
        }
    }
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[0, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = libm::cos(core::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5));
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p0 = 1.0;
                p1 = z;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if libm::fabs(dz) < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        nodes[i] = 0.5 * (1.0 - z);
        nodes[n - 1 - i] = 0.5 * (1.0 + z);
        weights[i] = 0.5 * w;
        weights[n - 1 - i] = 0.5 * w;
    }
    (nodes, weights)
}

/// `log v` through `∫_0^1 (v-1)/((v-1)t+1) dt` with an `points`-point rule.
pub fn log_via_t_integral(v: f64, points: usize) -> f64 {
    let (t, w) = gauss_legendre(points);
    let a = v - 1.0;
    t.iter().zip(&w).map(|(&t, &w)| w * a / (a * t + 1.0)).sum()
}

/// Tensor rule on the reference cube: (node, weight) pairs.
struct TensorRule {
    dim: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl TensorRule {
    fn new(dim: usize, p: usize) -> Self {
        let (x, w) = gauss_legendre(p);
        let count = p.pow(dim as u32);
        let mut nodes = Vec::with_capacity(count * dim);
        let mut weights = Vec::with_capacity(count);
        let mut idx = vec![0usize; dim];
        for _ in 0..count {
            let mut wt = 1.0;
            for &k in &idx {
                nodes.push(x[k]);
                wt *= w[k];
            }
            weights.push(wt);
            for d in (0..dim).rev() {
                idx[d] += 1;
                if idx[d] < p {
                    break;
                }
                idx[d] = 0;
            }
        }
        TensorRule { dim, nodes, weights }
    }
}

/// Integrand on the unit cube: writes component values and returns the local
/// value of the function whose zeros cause singularities.
trait CubeIntegrand {
    fn dim(&self) -> usize;
    fn components(&self) -> usize;
    fn eval(&self, u: &[f64], out: &mut [f64]) -> Result<f64>;
}

struct CellEstimate {
    values: Vec<f64>,
    fmin: f64,
}

/// A cell `Π [lo_d, lo_d + 2^{-levels_d}]` with its two-level estimate along
/// the axis whose halving changed the result most.
struct Leaf {
    lo: Vec<f64>,
    levels: Vec<u32>,
    fine: Vec<f64>,
    err: Vec<f64>,
    axis: usize,
    children: [CellEstimate; 2],
    key: f64,
    /// Every axis is at `max_depth`.
    frozen: bool,
}

impl Leaf {
    fn depth(&self) -> u32 {
        self.levels.iter().sum()
    }
}

impl PartialEq for Leaf {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Leaf {}
impl PartialOrd for Leaf {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Leaf {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key
            .total_cmp(&other.key)
            .then_with(|| other.depth().cmp(&self.depth()))
            .then_with(|| cmp_points(&other.lo, &self.lo))
            .then_with(|| other.levels.cmp(&self.levels))
    }
}

fn cmp_points(a: &[f64], b: &[f64]) -> Ordering {
    a.iter().zip(b).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(Ordering::Equal)
}

struct CubeOutcome {
    values: Vec<f64>,
    errs: Vec<f64>,
    cells: usize,
}

struct Integrator<'a, I: CubeIntegrand> {
    integrand: &'a I,
    rule: TensorRule,
    cfg: QuadConfig,
    zero_level: f64,
}

/// Multiplier on the two-level difference. At algebraic endpoint
/// singularities the finer rule's error is about as large as the difference
/// itself.
const ERR_SAFETY: f64 = 2.0;

fn widths(levels: &[u32]) -> Vec<f64> {
    levels.iter().map(|&l| libm::ldexp(1.0, -(l as i32))).collect()
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(libm::fabs(*x)))
}

impl<I: CubeIntegrand> Integrator<'_, I> {
    fn cell(&self, lo: &[f64], h: &[f64]) -> Result<CellEstimate> {
        let dim = self.rule.dim;
        let nc = self.integrand.components();
        let scale: f64 = h.iter().product();
        let mut values = vec![0.0; nc];
        let mut buf = vec![0.0; nc];
        let mut u = vec![0.0; dim];
        let mut fmin = f64::INFINITY;
        for (k, w) in self.rule.weights.iter().enumerate() {
            for d in 0..dim {
                u[d] = lo[d] + h[d] * self.rule.nodes[k * dim + d];
            }
            let fv = self.integrand.eval(&u, &mut buf)?;
            fmin = fmin.min(libm::fabs(fv));
            for (v, b) in values.iter_mut().zip(&buf) {
                *v += w * scale * b;
            }
        }
        Ok(CellEstimate { values, fmin })
    }

    fn halves(&self, lo: &[f64], levels: &[u32], axis: usize) -> Result<[CellEstimate; 2]> {
        let mut h = widths(levels);
        h[axis] *= 0.5;
        let left = self.cell(lo, &h)?;
        let mut hi = lo.to_vec();
        hi[axis] += h[axis];
        let right = self.cell(&hi, &h)?;
        Ok([left, right])
    }

    fn leaf(&self, lo: Vec<f64>, levels: Vec<u32>, coarse: CellEstimate) -> Result<Leaf> {
        let open: Vec<usize> = (0..self.rule.dim).filter(|&a| levels[a] < self.cfg.max_depth).collect();
        let frozen = open.is_empty();
        let axes: Vec<usize> = if frozen { (0..self.rule.dim).collect() } else { open };
        let mut best: Option<(f64, usize, [CellEstimate; 2], Vec<f64>, Vec<f64>)> = None;
        let mut fmin = coarse.fmin;
        for axis in axes {
            let halves = self.halves(&lo, &levels, axis)?;
            fmin = fmin.min(halves[0].fmin).min(halves[1].fmin);
            let fine: Vec<f64> = halves[0].values.iter().zip(&halves[1].values).map(|(a, b)| a + b).collect();
            let err: Vec<f64> =
                fine.iter().zip(&coarse.values).map(|(f, c)| ERR_SAFETY * libm::fabs(f - c)).collect();
            let size = max_abs(&err);
            if best.as_ref().is_none_or(|b| size > b.0) {
                best = Some((size, axis, halves, fine, err));
            }
        }
        let (size, axis, children, fine, err) = best.expect("at least one axis");
        let key = if frozen {
            f64::NEG_INFINITY
        } else if fmin < self.zero_level {
            f64::INFINITY
        } else {
            size
        };
        Ok(Leaf { lo, levels, fine, err, axis, children, key, frozen })
    }

    fn run(&self) -> Result<CubeOutcome> {
        let dim = self.rule.dim;
        let nc = self.integrand.components();
        let root_lo = vec![0.0; dim];
        let root_levels = vec![0u32; dim];
        let root = self.cell(&root_lo, &widths(&root_levels))?;
        let mut heap = BinaryHeap::new();
        let mut done: Vec<Leaf> = Vec::new();
        let first = self.leaf(root_lo, root_levels, root)?;
        let mut total_err = max_abs(&first.err);
        heap.push(first);
        while let Some(top) = heap.peek() {
            if top.key.is_finite() && total_err <= self.cfg.tol {
                break;
            }
            if heap.len() + done.len() + 1 > self.cfg.max_cells {
                break;
            }
            let top = heap.pop().expect("peeked");
            if top.frozen {
                done.push(top);
                continue;
            }
            total_err -= max_abs(&top.err);
            let mut levels = top.levels.clone();
            levels[top.axis] += 1;
            let step = widths(&levels)[top.axis];
            for (k, child) in top.children.into_iter().enumerate() {
                let mut lo = top.lo.clone();
                lo[top.axis] += k as f64 * step;
                let leaf = self.leaf(lo, levels.clone(), child)?;
                total_err += max_abs(&leaf.err);
                heap.push(leaf);
            }
        }
        let mut leaves: Vec<Leaf> = heap.into_vec();
        leaves.extend(done);
        leaves.sort_by(|a, b| a.levels.cmp(&b.levels).then_with(|| cmp_points(&a.lo, &b.lo)));
        let mut values = vec![0.0; nc];
        let mut errs = vec![0.0; nc];
        for c in 0..nc {
            values[c] = neumaier(leaves.iter().map(|l| l.fine[c]));
            errs[c] = leaves.iter().map(|l| l.err[c]).sum();
        }
        Ok(CubeOutcome { values, errs, cells: leaves.len() })
    }
}

/// Compensated summation.
fn neumaier(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for v in values {
        let t = sum + v;
        if libm::fabs(sum) >= libm::fabs(v) {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// The pieces' affine maps in float form, plus weights `sign·|det|`.
struct FloatPiece {
    v0: Vec<f64>,
    a: Vec<Vec<f64>>,
    weight: f64,
}

fn float_pieces(d: &Domain) -> Result<Vec<FloatPiece>> {
    d.pieces()
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let (v0, a) = p.affine_map();
            Ok(FloatPiece {
                v0: v0.iter().map(to_f64).collect(),
                a: a.iter().map(|r| r.iter().map(to_f64).collect()).collect(),
                weight: to_f64(&p.weight(i)?),
            })
        })
        .collect()
}

/// Point in the piece and Jacobian of the Duffy map at cube point `u`.
fn simplex_point(piece: &FloatPiece, u: &[f64]) -> (Vec<f64>, f64) {
    let n = u.len();
    let jac = u
        .iter()
        .take(n.saturating_sub(1))
        .enumerate()
        .fold(1.0, |acc, (j, &uj)| acc * libm::pow(1.0 - uj, (n - 1 - j) as f64));
    (apply_affine(&piece.v0, &piece.a, &duffy(u)), jac)
}

fn check_nvars(f: &MPoly, d: &Domain) -> Result<()> {
    if f.nvars() != d.nvars() {
        return Err(Error::DimensionMismatch { expected: d.nvars(), got: f.nvars() });
    }
    Ok(())
}

/// `f` at a node, with the negativity check.
fn nonnegative(fp: &FloatPoly, x: &[f64], tol: f64) -> Result<f64> {
    let v = fp.eval(x);
    if v < -tol {
        return Err(Error::NegativeIntegrand { value: v });
    }
    Ok(v.max(0.0))
}

struct PowerLog<'a> {
    fp: &'a FloatPoly,
    piece: &'a FloatPiece,
    sigma: f64,
    lmax: usize,
    neg_tol: f64,
    taylor: bool,
}

impl CubeIntegrand for PowerLog<'_> {
    fn dim(&self) -> usize {
        self.fp.nvars()
    }
    fn components(&self) -> usize {
        self.lmax + 1
    }
    fn eval(&self, u: &[f64], out: &mut [f64]) -> Result<f64> {
        let (x, jac) = simplex_point(self.piece, u);
        let f = nonnegative(self.fp, &x, self.neg_tol)?;
        if f == 0.0 {
            out.iter_mut().for_each(|o| *o = 0.0);
            return Ok(0.0);
        }
        let lg = libm::log(f);
        let mut term = libm::pow(f, self.sigma) * jac;
        for (k, o) in out.iter_mut().enumerate() {
            *o = term;
            term *= lg;
            if self.taylor {
                term /= (k + 1) as f64;
            }
        }
        Ok(f)
    }
}

struct BoxRep<'a> {
    fp: &'a FloatPoly,
    piece: &'a FloatPiece,
    power: i32,
    l: usize,
    neg_tol: f64,
}

impl CubeIntegrand for BoxRep<'_> {
    fn dim(&self) -> usize {
        self.fp.nvars() + self.l
    }
    fn components(&self) -> usize {
        1
    }
    fn eval(&self, u: &[f64], out: &mut [f64]) -> Result<f64> {
        let n = self.fp.nvars();
        let (x, jac) = simplex_point(self.piece, &u[..n]);
        let f = nonnegative(self.fp, &x, self.neg_tol)?;
        let a = f - 1.0;
        let mut v = libm::pow(f, self.power as f64) * jac;
        if v != 0.0 {
            for &t in &u[n..] {
                v *= a / (a * t + 1.0);
            }
        }
        out[0] = v;
        Ok(f)
    }
}

struct Resolvent<'a> {
    fp: &'a FloatPoly,
    piece: &'a FloatPiece,
    t: f64,
}

impl CubeIntegrand for Resolvent<'_> {
    fn dim(&self) -> usize {
        self.fp.nvars()
    }
    fn components(&self) -> usize {
        1
    }
    fn eval(&self, u: &[f64], out: &mut [f64]) -> Result<f64> {
        let (x, jac) = simplex_point(self.piece, u);
        out[0] = jac / (1.0 - self.t * self.fp.eval(&x));
        Ok(f64::INFINITY)
    }
}

/// Integrates over every piece (tolerance split evenly) and sums with weights.
fn integrate_pieces<'p, I: CubeIntegrand>(
    pieces: &'p [FloatPiece],
    cfg: &QuadConfig,
    zero_level: f64,
    make: impl Fn(&'p FloatPiece) -> I,
) -> Result<Vec<QuadResult>> {
    cfg.validate()?;
    let mut piece_cfg = *cfg;
    piece_cfg.tol = cfg.tol / pieces.len() as f64;
    let mut out: Option<Vec<QuadResult>> = None;
    for piece in pieces {
        let integrand = make(piece);
        let rule = TensorRule::new(integrand.dim(), cfg.base_rule);
        let outcome = Integrator { integrand: &integrand, rule, cfg: piece_cfg, zero_level }.run()?;
        let w = libm::fabs(piece.weight);
        let results = outcome.values.iter().zip(&outcome.errs).map(|(&v, &e)| QuadResult {
            value: piece.weight * v,
            err_estimate: w * e,
            cells_used: outcome.cells,
            converged: e <= piece_cfg.tol,
        });
        out = Some(match out {
            None => results.collect(),
            Some(acc) => acc
                .into_iter()
                .zip(results)
                .map(|(a, b)| QuadResult {
                    value: a.value + b.value,
                    err_estimate: a.err_estimate + b.err_estimate,
                    cells_used: a.cells_used + b.cells_used,
                    converged: a.converged && b.converged,
                })
                .collect(),
        });
    }
    Ok(out.expect("domains have at least one piece"))
}

fn zero_level(sigma: f64) -> f64 {
    libm::pow(10.0 * f64::EPSILON, 1.0 / sigma)
}

/// `∫_d f^σ log^l f` for all `l = 0..=lmax` in one adaptive pass.
pub fn integrate_power_log_all(
    f: &MPoly,
    sigma: f64,
    lmax: usize,
    d: &Domain,
    cfg: &QuadConfig,
) -> Result<Vec<QuadResult>> {
    power_log(f, sigma, lmax, d, cfg, false)
}

/// Taylor coefficients `∫_d f^σ log^l f / l!` of `I` at `σ`, `l = 0..=lmax`,
/// each to the absolute tolerance of `cfg`.
pub fn power_log_taylor(
    f: &MPoly,
    sigma: f64,
    lmax: usize,
    d: &Domain,
    cfg: &QuadConfig,
) -> Result<Vec<QuadResult>> {
    power_log(f, sigma, lmax, d, cfg, true)
}

fn power_log(
    f: &MPoly,
    sigma: f64,
    lmax: usize,
    d: &Domain,
    cfg: &QuadConfig,
    taylor: bool,
) -> Result<Vec<QuadResult>> {
    check_nvars(f, d)?;
    if !(sigma > 0.0) {
        return Err(Error::InvalidArgument(alloc::format!("exponent must be positive, got {sigma}")));
    }
    let fp = f.to_float();
    let pieces = float_pieces(d)?;
    integrate_pieces(&pieces, cfg, zero_level(sigma), |piece| PowerLog {
        fp: &fp,
        piece,
        sigma,
        lmax,
        neg_tol: cfg.tol,
        taylor,
    })
}

/// `∫_d f^σ log^l f`.
pub fn integrate_power_log(
    f: &MPoly,
    sigma: f64,
    l: usize,
    d: &Domain,
    cfg: &QuadConfig,
) -> Result<QuadResult> {
    check_nvars(f, d)?;
    if !(sigma > 0.0) {
        return Err(Error::InvalidArgument(alloc::format!("exponent must be positive, got {sigma}")));
    }
    Ok(integrate_power_log_all(f, sigma, l, d, cfg)?[l])
}

/// `∫_{d × [0,1]^l} f^{s0} Π_j (f-1)/((f-1)t_j+1)`, which equals
/// `∫_d f^{s0} log^l f`.
pub fn integrate_box_rep(
    f: &MPoly,
    s0: u32,
    l: usize,
    d: &Domain,
    cfg: &QuadConfig,
) -> Result<QuadResult> {
    check_nvars(f, d)?;
    if s0 < 1 {
        return Err(Error::InvalidArgument("box representation needs s0 >= 1".into()));
    }
    let fp = f.to_float();
    let pieces = float_pieces(d)?;
    let res = integrate_pieces(&pieces, cfg, zero_level(s0 as f64), |piece| BoxRep {
        fp: &fp,
        piece,
        power: s0 as i32,
        l,
        neg_tol: cfg.tol,
    })?;
    Ok(res[0])
}

/// Number of samples behind the `R̂` used to guard `j_value`.
pub const SUP_SAMPLES: usize = 256;

/// `J(t) = ∫_d 1/(1 - t f)` for `|t| R̂ < 1`.
pub fn j_value(f: &MPoly, t: f64, d: &Domain, cfg: &QuadConfig) -> Result<QuadResult> {
    check_nvars(f, d)?;
    let r = sup_estimate(f, d, SUP_SAMPLES);
    let product = libm::fabs(t) * r;
    if product >= 1.0 {
        return Err(Error::RadiusExceeded { product });
    }
    let fp = f.to_float();
    let pieces = float_pieces(d)?;
    let res = integrate_pieces(&pieces, cfg, 0.0, |piece| Resolvent { fp: &fp, piece, t })?;
    Ok(res[0])
}
