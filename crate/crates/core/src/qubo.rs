//! QUBO matrices for the squared-error and cardinality terms.
//!
//! A [`QuboProblem`] stores a symmetric matrix `W` and a constant `h`, with
//! `energy(q) = qᵀ W q + h`. The coefficient `c` of a product `q_a q_b` (`a ≠ b`) is
//! stored as `c/2` at both `(a, b)` and `(b, a)`; linear terms sit on the diagonal since
//! `q_a² = q_a`. Constants that do not affect the minimizer are still tracked in `h`, so
//! energies equal the true objective `||A x − b||² + λ ||x||_0`.
//!
//! Spin layout follows [`crate::codec`]: bit `p` of coordinate `i` is spin `P*i + p`
//! (both 0-based). For `P ≥ 3` the cardinality term adds one ancilla per coordinate;
//! ancilla `i` is spin `N*P + i`.

use alloc::format;
use alloc::vec::Vec;

use crate::codec::FixedPointFormat;
use crate::error::{Error, Result};
use crate::linalg::Matrix;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct QuboProblem {
    w: Matrix,
    offset: f64,
    n_ancilla: usize,
    format: FixedPointFormat,
}

impl QuboProblem {
    /// Wraps an arbitrary symmetric matrix. `format` describes the data spins; any
    /// remaining spins are counted as ancillas.
    pub fn new(w: Matrix, offset: f64, format: FixedPointFormat) -> Result<Self> {
        let dim = w.rows();
        Error::check_len("QUBO matrix columns", dim, w.cols())?;
        if dim < format.data_spins() {
            return Err(Error::DimensionMismatch {
                what: "QUBO dimension",
                expected: format.data_spins(),
                found: dim,
            });
        }
        let scale = w.max_abs();
        for a in 0..dim {
            for b in 0..a {
                if (w[(a, b)] - w[(b, a)]).abs() > 1e-12 * scale {
                    return Err(Error::invalid(format!(
                        "QUBO matrix is not symmetric at ({a}, {b})"
                    )));
                }
            }
        }
        if !w.as_slice().iter().all(|v| v.is_finite()) || !offset.is_finite() {
            return Err(Error::invalid("QUBO coefficients must be finite"));
        }
        Ok(QuboProblem {
            n_ancilla: dim - format.data_spins(),
            w,
            offset,
            format,
        })
    }

    /// Plain QUBO with no signal interpretation (data spins are 1-bit coordinates).
    pub fn from_matrix(w: Matrix, offset: f64) -> Result<Self> {
        let n = w.rows();
        Self::new(w, offset, FixedPointFormat::binary(n))
    }

    /// Total spin count `D`.
    #[inline]
    pub fn dim(&self) -> usize {
        self.w.rows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.w
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn n_ancilla(&self) -> usize {
        self.n_ancilla
    }

    pub fn format(&self) -> &FixedPointFormat {
        &self.format
    }

    /// `qᵀ W q + h`. `q` must have length [`dim`](Self::dim).
    pub fn energy(&self, q: &[u8]) -> f64 {
        debug_assert_eq!(q.len(), self.dim());
        let active: Vec<usize> = (0..q.len()).filter(|&a| q[a] != 0).collect();
        let mut e = 0.0;
        for &a in &active {
            let row = self.w.row(a);
            e += active.iter().map(|&b| row[b]).sum::<f64>();
        }
        e + self.offset
    }

    pub fn energy_checked(&self, q: &[u8]) -> Result<f64> {
        Error::check_len("spin vector", self.dim(), q.len())?;
        Ok(self.energy(q))
    }

    /// Decoded signal for a (possibly ancilla-extended) spin vector.
    pub fn decode(&self, q: &[u8]) -> Result<Vec<f64>> {
        Error::check_len("spin vector", self.dim(), q.len())?;
        self.format.decode_vector(&q[..self.format.data_spins()])
    }

    /// Upper-triangle coefficients `(a, b, c)` with `a ≤ b`, meaning the energy is
    /// `Σ c q_a q_b + h`: off-diagonal values are `W_ab + W_ba`. Zeros are skipped.
    pub fn upper_triangular(&self) -> Vec<(usize, usize, f64)> {
        let d = self.dim();
        let mut out = Vec::new();
        for a in 0..d {
            let diag = self.w[(a, a)];
            if diag != 0.0 {
                out.push((a, a, diag));
            }
            for b in a + 1..d {
                let c = self.w[(a, b)] + self.w[(b, a)];
                if c != 0.0 {
                    out.push((a, b, c));
                }
            }
        }
        out
    }

    /// Completes data spins with the ancilla bits that minimize the energy.
    ///
    /// Ancillas produced by this module couple only to their own coordinate block, so
    /// each is set independently: `s_i = 1` only when that strictly lowers the energy.
    pub fn with_optimal_ancillas(&self, data: &[u8]) -> Result<Vec<u8>> {
        let n_data = self.format.data_spins();
        Error::check_len("data spins", n_data, data.len())?;
        let mut q = data.to_vec();
        q.resize(self.dim(), 0);
        for s in n_data..self.dim() {
            let row = self.w.row(s);
            let coupling: f64 = (0..n_data).filter(|&b| q[b] != 0).map(|b| row[b]).sum();
            if row[s] + 2.0 * coupling < 0.0 {
                q[s] = 1;
            }
        }
        Ok(q)
    }
}

/// Terms of `||A x − b||² = xᵀ G x + Σ_i l_i x_i + h` in signal space.
#[derive(Debug, Clone, PartialEq)]
pub struct BaseTerms {
    /// `G = AᵀA`
    pub gram: Matrix,
    /// `l_i = −2 Σ_m A_{m,i} b_m`
    pub linear: Vec<f64>,
    /// `h = Σ_m b_m²`
    pub offset: f64,
}

impl BaseTerms {
    pub fn evaluate(&self, x: &[f64]) -> f64 {
        let gx = self.gram.mul_vec(x);
        crate::linalg::dot(x, &gx) + crate::linalg::dot(&self.linear, x) + self.offset
    }
}

pub fn build_base_terms(a: &Matrix, b: &[f64]) -> Result<BaseTerms> {
    Error::check_len("measurement vector", a.rows(), b.len())?;
    let linear = a.tr_mul_vec(b).into_iter().map(|v| -2.0 * v).collect();
    Ok(BaseTerms {
        gram: a.gram(),
        linear,
        offset: crate::linalg::sq_norm(b),
    })
}

/// QUBO whose energy on `N*P` data spins is `||A decode(q) − b||²`.
pub fn build_l2_qubo(a: &Matrix, b: &[f64], format: &FixedPointFormat) -> Result<QuboProblem> {
    Error::check_len("format coordinates", a.cols(), format.len())?;
    let base = build_base_terms(a, b)?;
    let n = format.len();
    let bits = format.bits();
    let (c, d) = (format.c_min(), format.scale());
    let weight = |p: usize| (1u64 << p) as f64;

    let mut w = Matrix::zeros(n * bits, n * bits);
    for i in 0..n {
        for j in 0..n {
            // ordered product keeps W exactly symmetric
            let g = base.gram[(i, j)] * (d[i.min(j)] * d[i.max(j)]);
            for s in 0..bits {
                let row = format.spin_index(i, s);
                for p in 0..bits {
                    w[(row, format.spin_index(j, p))] = weight(s + p) * g;
                }
            }
        }
    }
    let gc = base.gram.mul_vec(c);
    for i in 0..n {
        let lin = d[i] * (base.linear[i] + 2.0 * gc[i]);
        for p in 0..bits {
            let a = format.spin_index(i, p);
            w[(a, a)] += weight(p) * lin;
        }
    }
    let offset = crate::linalg::dot(c, &gc) + crate::linalg::dot(&base.linear, c) + base.offset;
    QuboProblem::new(w, offset, format.clone())
}

/// QUBO for `||decode(q)||_0`.
///
/// With transformed bits `y_p = q_p` where the zero code has a 1 and `y_p = 1 − q_p`
/// where it has a 0, coordinate `i` is zero iff all its `y_p` are 1.
///
/// * `P ≤ 2`: `1 − Π_p y_p` is at most quadratic and is expanded directly; energy is
///   exactly the cardinality.
/// * `P ≥ 3`: one ancilla `s_i` per coordinate replaces the product by
///   `1 − s_i (Σ_p y_p − (P − 1))`, whose minimum over `s_i` is `1 − Π_p y_p`. The ancilla
///   couples with `−1` to bits whose zero-code bit is 1 and `+1` to bits whose zero-code
///   bit is 0. The minimizing `s_i` is 1 when the block equals its zero code and 0 when the
///   block is two or more bit flips away; at exactly one flip both values are optimal.
pub fn build_l0_qubo(format: &FixedPointFormat) -> Result<QuboProblem> {
    let n = format.len();
    let bits = format.bits();
    let n_ancilla = if bits >= 3 { n } else { 0 };
    let dim = n * bits + n_ancilla;
    let mut terms = Terms::new(dim);

    for i in 0..n {
        let zero = format.zero_code(i);
        // y_p = affine[p].0 + affine[p].1 * q_p
        let affine: Vec<(f64, f64)> = zero
            .iter()
            .map(|&c| if c == 1 { (0.0, 1.0) } else { (1.0, -1.0) })
            .collect();
        terms.add(&[], 1.0);
        if bits <= 2 {
            for subset in 0u32..(1 << bits) {
                let mut coef = 1.0;
                let mut vars = Vec::with_capacity(2);
                for (p, &(a, b)) in affine.iter().enumerate() {
                    if subset & (1 << p) != 0 {
                        coef *= b;
                        vars.push(format.spin_index(i, p));
                    } else {
                        coef *= a;
                    }
                }
                terms.add(&vars, -coef);
            }
        } else {
            let s = n * bits + i;
            let constant_y: f64 = affine.iter().map(|(a, _)| a).sum();
            terms.add(&[s], (bits - 1) as f64 - constant_y);
            for (p, &(_, b)) in affine.iter().enumerate() {
                terms.add(&[s, format.spin_index(i, p)], -b);
            }
        }
    }
    let (w, offset) = terms.finish();
    QuboProblem::new(w, offset, format.clone())
}

/// `pad(l2) + λ·l0`, offsets combined the same way.
pub fn assemble_total(l2: &QuboProblem, l0: &QuboProblem, lambda: f64) -> Result<QuboProblem> {
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(Error::invalid(format!(
            "lambda must be non-negative, got {lambda}"
        )));
    }
    if l2.format != l0.format {
        return Err(Error::invalid(
            "squared-error and cardinality terms use different formats",
        ));
    }
    if l2.n_ancilla != 0 {
        return Err(Error::invalid("squared-error term must not carry ancillas"));
    }
    let dim = l0.dim();
    let data = l2.dim();
    let mut w = l0.w.clone();
    for v in w.as_mut_slice() {
        *v *= lambda;
    }
    for a in 0..data {
        for b in 0..data {
            w[(a, b)] += l2.w[(a, b)];
        }
    }
    debug_assert_eq!(w.rows(), dim);
    QuboProblem::new(w, l2.offset + lambda * l0.offset, l2.format.clone())
}

/// `||A x − b||² + λ ||x||_0` over the spins of `format`.
pub fn build_sparse_coding_qubo(
    a: &Matrix,
    b: &[f64],
    format: &FixedPointFormat,
    lambda: f64,
) -> Result<QuboProblem> {
    let l2 = build_l2_qubo(a, b, format)?;
    let l0 = build_l0_qubo(format)?;
    assemble_total(&l2, &l0, lambda)
}

/// Accumulates multilinear monomials of degree ≤ 2 into symmetric storage.
struct Terms {
    w: Matrix,
    offset: f64,
}

impl Terms {
    fn new(dim: usize) -> Self {
        Terms {
            w: Matrix::zeros(dim, dim),
            offset: 0.0,
        }
    }

    fn add(&mut self, vars: &[usize], coef: f64) {
        if coef == 0.0 {
            return;
        }
        match *vars {
            [] => self.offset += coef,
            [a] => self.w[(a, a)] += coef,
            [a, b] if a == b => self.w[(a, a)] += coef,
            [a, b] => {
                self.w[(a, b)] += 0.5 * coef;
                self.w[(b, a)] += 0.5 * coef;
            }
            _ => unreachable!("monomials above degree two are never emitted"),
        }
    }

    fn finish(self) -> (Matrix, f64) {
        (self.w, self.offset)
    }
}
