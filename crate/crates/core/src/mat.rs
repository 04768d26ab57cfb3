//! Dense square/symmetric matrix primitives: symmetric eigendecomposition,
//! definiteness tests, matrix exponential and spectral radius. Everything
//! here is sized for control problems with a handful of states, so the
//! kernels favor robustness over asymptotic speed.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Relative tolerance used when validating symmetry of constructor input.
pub const SYM_TOL: f64 = 1e-12;

/// Scale-aware positive-definiteness margin: `is_pd` holds when the smallest
/// eigenvalue exceeds `PD_EPS * max(1, maxabs)`.
pub const PD_EPS: f64 = 1e-9;

/// Dense real n-by-n matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SquareMatrix {
    pub fn new(n: usize, data: Vec<f64>) -> Result<Self> {
        if n == 0 || data.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                got: data.len(),
            });
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(SquareMatrix { n, data })
    }

    pub fn from_rows(rows: &[&[f64]]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for r in rows {
            if r.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Self::new(n, data)
    }

    pub fn zeros(n: usize) -> Self {
        SquareMatrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn transpose(&self) -> SquareMatrix {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.data[j * n + i] = self.data[i * n + j];
            }
        }
        out
    }

    pub fn mul(&self, rhs: &SquareMatrix) -> SquareMatrix {
        debug_assert_eq!(self.n, rhs.n);
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(self.n, x.len());
        let n = self.n;
        let mut out = vec![0.0; n];
        for i in 0..n {
            let mut acc = 0.0;
            for j in 0..n {
                acc += self.data[i * n + j] * x[j];
            }
            out[i] = acc;
        }
        out
    }

    pub fn add(&self, rhs: &SquareMatrix) -> SquareMatrix {
        self.add_scaled(rhs, 1.0)
    }

    pub fn sub(&self, rhs: &SquareMatrix) -> SquareMatrix {
        self.add_scaled(rhs, -1.0)
    }

    /// self + c * rhs
    pub fn add_scaled(&self, rhs: &SquareMatrix, c: f64) -> SquareMatrix {
        debug_assert_eq!(self.n, rhs.n);
        let mut out = self.clone();
        for (o, r) in out.data.iter_mut().zip(rhs.data.iter()) {
            *o += c * r;
        }
        out
    }

    pub fn scale(&self, c: f64) -> SquareMatrix {
        let mut out = self.clone();
        for o in out.data.iter_mut() {
            *o *= c;
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Maximum absolute column sum.
    pub fn one_norm(&self) -> f64 {
        let n = self.n;
        let mut best = 0.0f64;
        for j in 0..n {
            let mut s = 0.0;
            for i in 0..n {
                s += self.data[i * n + j].abs();
            }
            best = best.max(s);
        }
        best
    }

    pub fn frobenius_norm(&self) -> f64 {
        libm::sqrt(self.data.iter().map(|x| x * x).sum::<f64>())
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }
}

/// Symmetric n-by-n matrix. Constructors symmetrize via (S + S')/2 after
/// checking the input is symmetric to within `SYM_TOL` relative.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    m: SquareMatrix,
}

impl SymMatrix {
    pub fn new(m: SquareMatrix) -> Result<Self> {
        let n = m.dim();
        let tol = SYM_TOL * m.max_abs().max(1.0);
        for i in 0..n {
            for j in (i + 1)..n {
                if (m.get(i, j) - m.get(j, i)).abs() > tol {
                    return Err(Error::ShapeMismatch(alloc::format!(
                        "matrix not symmetric at ({i},{j})"
                    )));
                }
            }
        }
        Ok(Self::symmetrize(m))
    }

    /// Force symmetry via (S + S')/2 without the tolerance check.
    pub fn symmetrize(m: SquareMatrix) -> Self {
        let n = m.dim();
        let mut s = m;
        for i in 0..n {
            for j in (i + 1)..n {
                let avg = 0.5 * (s.get(i, j) + s.get(j, i));
                s.set(i, j, avg);
                s.set(j, i, avg);
            }
        }
        SymMatrix { m: s }
    }

    pub fn from_rows(rows: &[&[f64]]) -> Result<Self> {
        Self::new(SquareMatrix::from_rows(rows)?)
    }

    pub fn zeros(n: usize) -> Self {
        SymMatrix {
            m: SquareMatrix::zeros(n),
        }
    }

    pub fn identity(n: usize) -> Self {
        SymMatrix {
            m: SquareMatrix::identity(n),
        }
    }

    pub fn diag(d: &[f64]) -> Self {
        let n = d.len();
        let mut m = SquareMatrix::zeros(n);
        for (i, v) in d.iter().enumerate() {
            m.set(i, i, *v);
        }
        SymMatrix { m }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.m.dim()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.m.get(i, j)
    }

    pub fn set_sym(&mut self, i: usize, j: usize, v: f64) {
        self.m.set(i, j, v);
        self.m.set(j, i, v);
    }

    pub fn as_square(&self) -> &SquareMatrix {
        &self.m
    }

    pub fn into_square(self) -> SquareMatrix {
        self.m
    }

    pub fn max_abs(&self) -> f64 {
        self.m.max_abs()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.m.frobenius_norm()
    }

    pub fn add_scaled(&self, rhs: &SymMatrix, c: f64) -> SymMatrix {
        SymMatrix {
            m: self.m.add_scaled(&rhs.m, c),
        }
    }

    pub fn scale(&self, c: f64) -> SymMatrix {
        SymMatrix { m: self.m.scale(c) }
    }

    /// x' S x
    pub fn quad_form(&self, x: &[f64]) -> f64 {
        let n = self.dim();
        debug_assert_eq!(n, x.len());
        let mut acc = 0.0;
        for i in 0..n {
            let mut row = 0.0;
            for j in 0..n {
                row += self.m.data[i * n + j] * x[j];
            }
            acc += x[i] * row;
        }
        acc
    }

    /// A' S + S A, the Lyapunov derivative form.
    pub fn lyap_derivative(&self, a: &SquareMatrix) -> SymMatrix {
        let at_s = a.transpose().mul(&self.m);
        let s_a = self.m.mul(a);
        SymMatrix::symmetrize(at_s.add(&s_a))
    }

    /// E' S E for a congruence transform E.
    pub fn congruence(&self, e: &SquareMatrix) -> SymMatrix {
        SymMatrix::symmetrize(e.transpose().mul(&self.m).mul(e))
    }
}

/// Eigendecomposition of a symmetric matrix: ascending eigenvalues with
/// orthonormal eigenvectors as columns of `vectors`.
#[derive(Debug, Clone)]
pub struct EigenResult {
    pub values: Vec<f64>,
    pub vectors: SquareMatrix,
}

/// Symmetric eigendecomposition: closed form for n <= 2, cyclic Jacobi
/// otherwise. Budget is 100 sweeps before giving up.
pub fn sym_eig(s: &SymMatrix) -> Result<EigenResult> {
    if !s.as_square().is_finite() {
        return Err(Error::NonFinite);
    }
    let n = s.dim();
    if n == 1 {
        return Ok(EigenResult {
            values: vec![s.get(0, 0)],
            vectors: SquareMatrix::identity(1),
        });
    }
    if n == 2 {
        return Ok(sym_eig_2x2(s));
    }
    jacobi_eig(s)
}

fn sym_eig_2x2(s: &SymMatrix) -> EigenResult {
    let a = s.get(0, 0);
    let b = s.get(0, 1);
    let c = s.get(1, 1);
    if b == 0.0 {
        // already diagonal; order ascending
        return if a <= c {
            EigenResult {
                values: vec![a, c],
                vectors: SquareMatrix::identity(2),
            }
        } else {
            EigenResult {
                values: vec![c, a],
                vectors: SquareMatrix::from_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap(),
            }
        };
    }
    let tr = a + c;
    let diff = a - c;
    let disc = libm::sqrt(diff * diff + 4.0 * b * b);
    let lo = 0.5 * (tr - disc);
    let hi = 0.5 * (tr + disc);
    // eigenvector for lo: (b, lo - a) or (lo - c, b), pick the better-conditioned
    let (v0, v1) = if diff <= 0.0 {
        (lo - c, b)
    } else {
        (b, lo - a)
    };
    let norm = libm::sqrt(v0 * v0 + v1 * v1);
    let (v0, v1) = (v0 / norm, v1 / norm);
    // second vector is the orthogonal complement
    let vectors = SquareMatrix::from_rows(&[&[v0, -v1], &[v1, v0]]).unwrap();
    EigenResult {
        values: vec![lo, hi],
        vectors,
    }
}

fn jacobi_eig(s: &SymMatrix) -> Result<EigenResult> {
    let n = s.dim();
    let mut a = s.as_square().clone();
    let mut v = SquareMatrix::identity(n);
    let scale = s.max_abs().max(1.0);
    let tol = 1e-15 * scale;
    let max_sweeps = 100 * n;

    for _ in 0..max_sweeps {
        let mut off = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                off = off.max(a.get(i, j).abs());
            }
        }
        if off <= tol {
            return Ok(sort_eigen(a, v));
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a.get(p, q);
                if apq.abs() <= tol * 1e-2 {
                    continue;
                }
                let app = a.get(p, p);
                let aqq = a.get(q, q);
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + libm::sqrt(1.0 + theta * theta))
                } else {
                    -1.0 / (-theta + libm::sqrt(1.0 + theta * theta))
                };
                let c = 1.0 / libm::sqrt(1.0 + t * t);
                let sgn = t * c;
                // rotate rows/columns p,q of a
                for k in 0..n {
                    let akp = a.get(k, p);
                    let akq = a.get(k, q);
                    a.set(k, p, c * akp - sgn * akq);
                    a.set(k, q, sgn * akp + c * akq);
                }
                for k in 0..n {
                    let apk = a.get(p, k);
                    let aqk = a.get(q, k);
                    a.set(p, k, c * apk - sgn * aqk);
                    a.set(q, k, sgn * apk + c * aqk);
                }
                for k in 0..n {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, c * vkp - sgn * vkq);
                    v.set(k, q, sgn * vkp + c * vkq);
                }
            }
        }
    }
    Err(Error::NoConvergence)
}

fn sort_eigen(a: SquareMatrix, v: SquareMatrix) -> EigenResult {
    let n = a.dim();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| a.get(i, i).partial_cmp(&a.get(j, j)).unwrap());
    let mut values = Vec::with_capacity(n);
    let mut vectors = SquareMatrix::zeros(n);
    for (col, &k) in idx.iter().enumerate() {
        values.push(a.get(k, k));
        for row in 0..n {
            vectors.set(row, col, v.get(row, k));
        }
    }
    EigenResult { values, vectors }
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn min_eigenvalue(s: &SymMatrix) -> Result<f64> {
    Ok(sym_eig(s)?.values[0])
}

/// Strict positive definiteness with a scale-aware margin.
pub fn is_pd(s: &SymMatrix) -> Result<bool> {
    let eps = PD_EPS * s.max_abs().max(1.0);
    Ok(min_eigenvalue(s)? > eps)
}

// Pade coefficients for expm, degrees 3..13 (Higham 2005).
const PADE3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const PADE5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const PADE7: [f64; 8] = [
    17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0,
];
const PADE9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

const THETA3: f64 = 1.495585217958292e-2;
const THETA5: f64 = 2.539398330063230e-1;
const THETA7: f64 = 9.504178996162932e-1;
const THETA9: f64 = 2.097847961257068;
const THETA13: f64 = 5.371920351148152;

/// exp(A * t) by scaling-and-squaring with Pade approximants.
pub fn expm(a: &SquareMatrix, t: f64) -> Result<SquareMatrix> {
    if !a.is_finite() || !t.is_finite() {
        return Err(Error::NonFinite);
    }
    let n = a.dim();
    let m = a.scale(t);
    let norm = m.one_norm();
    if norm == 0.0 {
        return Ok(SquareMatrix::identity(n));
    }

    let ((u, v), squarings) = if norm <= THETA3 {
        (pade_uv(&m, &PADE3), 0u32)
    } else if norm <= THETA5 {
        (pade_uv(&m, &PADE5), 0)
    } else if norm <= THETA7 {
        (pade_uv(&m, &PADE7), 0)
    } else if norm <= THETA9 {
        (pade_uv(&m, &PADE9), 0)
    } else {
        let s = if norm > THETA13 {
            libm::ceil(libm::log2(norm / THETA13)) as u32
        } else {
            0
        };
        let scaled = m.scale(libm::exp2(-(s as f64)));
        (pade13_uv(&scaled), s)
    };

    // Pade approximant is (V + U) / (V - U)
    let numer = v.add(&u);
    let denom = v.sub(&u);
    let mut result = lu_solve(&denom, &numer)?;
    for _ in 0..squarings {
        result = result.mul(&result);
    }
    Ok(result)
}

fn pade_uv(m: &SquareMatrix, coeffs: &[f64]) -> (SquareMatrix, SquareMatrix) {
    let n = m.dim();
    let m2 = m.mul(m);
    // odd coefficients build U = M * poly_odd(M^2), even build V = poly_even(M^2)
    let mut u_poly = SquareMatrix::identity(n).scale(coeffs[1]);
    let mut v_poly = SquareMatrix::identity(n).scale(coeffs[0]);
    let mut pow = SquareMatrix::identity(n);
    for k in 1..=(coeffs.len() - 1) / 2 {
        pow = pow.mul(&m2);
        u_poly = u_poly.add_scaled(&pow, coeffs[2 * k + 1]);
        if 2 * k < coeffs.len() {
            v_poly = v_poly.add_scaled(&pow, coeffs[2 * k]);
        }
    }
    (m.mul(&u_poly), v_poly)
}

fn pade13_uv(m: &SquareMatrix) -> (SquareMatrix, SquareMatrix) {
    let n = m.dim();
    let c = &PADE13;
    let m2 = m.mul(m);
    let m4 = m2.mul(&m2);
    let m6 = m4.mul(&m2);
    let u_hi = m6
        .scale(c[13])
        .add_scaled(&m4, c[11])
        .add_scaled(&m2, c[9]);
    let u_lo = m6
        .scale(c[7])
        .add_scaled(&m4, c[5])
        .add_scaled(&m2, c[3])
        .add_scaled(&SquareMatrix::identity(n), c[1]);
    let u = m.mul(&m6.mul(&u_hi).add(&u_lo));
    let v_hi = m6
        .scale(c[12])
        .add_scaled(&m4, c[10])
        .add_scaled(&m2, c[8]);
    let v = m6
        .mul(&v_hi)
        .add(&m6.scale(c[6]))
        .add_scaled(&m4, c[4])
        .add_scaled(&m2, c[2])
        .add_scaled(&SquareMatrix::identity(n), c[0]);
    (u, v)
}

/// Solve A X = B with partial-pivoted LU.
pub fn lu_solve(a: &SquareMatrix, b: &SquareMatrix) -> Result<SquareMatrix> {
    let n = a.dim();
    if b.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: b.dim(),
        });
    }
    let mut lu = a.clone();
    let mut x = b.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    for k in 0..n {
        let mut pivot = k;
        let mut best = lu.get(k, k).abs();
        for i in (k + 1)..n {
            let v = lu.get(i, k).abs();
            if v > best {
                best = v;
                pivot = i;
            }
        }
        if best == 0.0 || !best.is_finite() {
            return Err(Error::SolverFailure(alloc::format!(
                "singular matrix in LU at column {k}"
            )));
        }
        if pivot != k {
            for j in 0..n {
                let tmp = lu.get(k, j);
                lu.set(k, j, lu.get(pivot, j));
                lu.set(pivot, j, tmp);
                let tmp = x.get(k, j);
                x.set(k, j, x.get(pivot, j));
                x.set(pivot, j, tmp);
            }
            perm.swap(k, pivot);
        }
        let pk = lu.get(k, k);
        for i in (k + 1)..n {
            let f = lu.get(i, k) / pk;
            lu.set(i, k, f);
            for j in (k + 1)..n {
                lu.set(i, j, lu.get(i, j) - f * lu.get(k, j));
            }
            for j in 0..n {
                x.set(i, j, x.get(i, j) - f * x.get(k, j));
            }
        }
    }
    // back substitution
    for col in 0..n {
        for i in (0..n).rev() {
            let mut acc = x.get(i, col);
            for j in (i + 1)..n {
                acc -= lu.get(i, j) * x.get(j, col);
            }
            x.set(i, col, acc / lu.get(i, i));
        }
    }
    Ok(x)
}

/// Solve the general linear system M y = rhs (dense, partial pivoting).
pub fn solve_linear(m: &mut Vec<Vec<f64>>, rhs: &mut Vec<f64>) -> Result<()> {
    let n = rhs.len();
    for k in 0..n {
        let mut pivot = k;
        let mut best = m[k][k].abs();
        for i in (k + 1)..n {
            if m[i][k].abs() > best {
                best = m[i][k].abs();
                pivot = i;
            }
        }
        if best == 0.0 || !best.is_finite() {
            return Err(Error::SolverFailure(alloc::format!(
                "singular linear system at column {k}"
            )));
        }
        m.swap(k, pivot);
        rhs.swap(k, pivot);
        let pk = m[k][k];
        for i in (k + 1)..n {
            let f = m[i][k] / pk;
            if f == 0.0 {
                continue;
            }
            m[i][k] = 0.0;
            for j in (k + 1)..n {
                m[i][j] -= f * m[k][j];
            }
            rhs[i] -= f * rhs[k];
        }
    }
    for i in (0..n).rev() {
        let mut acc = rhs[i];
        for j in (i + 1)..n {
            acc -= m[i][j] * rhs[j];
        }
        rhs[i] = acc / m[i][i];
    }
    Ok(())
}

/// Largest eigenvalue modulus of a (possibly nonsymmetric) matrix.
/// Closed form for n = 2; repeated squaring with normalization otherwise.
pub fn spectral_radius(m: &SquareMatrix) -> Result<f64> {
    if !m.is_finite() {
        return Err(Error::NonFinite);
    }
    let n = m.dim();
    if n == 1 {
        return Ok(m.get(0, 0).abs());
    }
    if n == 2 {
        let a = m.get(0, 0);
        let b = m.get(0, 1);
        let c = m.get(1, 0);
        let d = m.get(1, 1);
        let tr = a + d;
        let det = a * d - b * c;
        let disc = tr * tr - 4.0 * det;
        if disc >= 0.0 {
            let sq = libm::sqrt(disc);
            return Ok((0.5 * (tr + sq)).abs().max((0.5 * (tr - sq)).abs()));
        }
        // complex pair: modulus is sqrt(det)
        return Ok(libm::sqrt(det.abs()));
    }
    // rho(M) = lim ||M^(2^k)||^(1/2^k); normalize each squaring and
    // accumulate the log of the scale factors.
    let mut cur = m.clone();
    let mut log_acc = 0.0f64;
    let mut weight = 1.0f64;
    let mut prev = f64::INFINITY;
    for _ in 0..64 {
        let norm = cur.frobenius_norm();
        if norm == 0.0 {
            return Ok(0.0);
        }
        log_acc += weight * libm::log(norm);
        let est = libm::exp(log_acc);
        if (est - prev).abs() <= 1e-10 * est.max(1.0) {
            return Ok(est);
        }
        prev = est;
        cur = cur.scale(1.0 / norm);
        cur = cur.mul(&cur);
        if !cur.is_finite() {
            return Err(Error::NoConvergence);
        }
        weight *= 0.5;
    }
    Ok(prev)
}

/// Solve the continuous Lyapunov equation A' P + P A = -Q for symmetric Q.
pub fn lyap_solve(a: &SquareMatrix, q: &SymMatrix) -> Result<SymMatrix> {
    let n = a.dim();
    if q.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: q.dim(),
        });
    }
    // unknowns: upper triangle of P
    let mut index = vec![vec![0usize; n]; n];
    let mut count = 0;
    for i in 0..n {
        for j in i..n {
            index[i][j] = count;
            index[j][i] = count;
            count += 1;
        }
    }
    let mut sys = vec![vec![0.0f64; count]; count];
    let mut rhs = vec![0.0f64; count];
    // equation (i,j): sum_k A[k][i] P[k][j] + P[i][k] A[k][j] = -Q[i][j]
    for i in 0..n {
        for j in i..n {
            let row = index[i][j];
            for k in 0..n {
                sys[row][index[k][j]] += a.get(k, i);
                sys[row][index[i][k]] += a.get(k, j);
            }
            rhs[row] = -q.get(i, j);
        }
    }
    solve_linear(&mut sys, &mut rhs)?;
    let mut p = SymMatrix::zeros(n);
    for i in 0..n {
        for j in i..n {
            p.set_sym(i, j, rhs[index[i][j]]);
        }
    }
    Ok(p)
}

/// Hurwitz test: A is Hurwitz iff A'P + PA = -I has a positive definite
/// solution. Reports an eigenvalue-flavored diagnostic on failure.
pub fn is_hurwitz(a: &SquareMatrix) -> Result<bool> {
    if !a.is_finite() {
        return Err(Error::NonFinite);
    }
    let n = a.dim();
    let p = match lyap_solve(a, &SymMatrix::identity(n)) {
        Ok(p) => p,
        // singular Lyapunov operator means eigenvalues on the imaginary axis
        Err(Error::SolverFailure(_)) => return Ok(false),
        Err(e) => return Err(e),
    };
    // validate the residual before trusting the definiteness test
    let resid = p
        .lyap_derivative(a)
        .add_scaled(&SymMatrix::identity(n), 1.0);
    if resid.max_abs() > 1e-6 * p.max_abs().max(1.0) {
        return Ok(false);
    }
    is_pd(&p)
}

/// Max real part of eigenvalues, used only for diagnostics on 2x2 modes.
pub fn max_real_part_2x2(a: &SquareMatrix) -> Option<f64> {
    if a.dim() != 2 {
        return None;
    }
    let tr = a.get(0, 0) + a.get(1, 1);
    let det = a.get(0, 0) * a.get(1, 1) - a.get(0, 1) * a.get(1, 0);
    let disc = tr * tr - 4.0 * det;
    if disc >= 0.0 {
        let sq = libm::sqrt(disc);
        Some((0.5 * (tr + sq)).max(0.5 * (tr - sq)))
    } else {
        Some(0.5 * tr)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    #[test]
    fn sym_eig_identity() {
        let e = sym_eig(&SymMatrix::identity(2)).unwrap();
        assert_close(e.values[0], 1.0, 1e-14);
        assert_close(e.values[1], 1.0, 1e-14);
    }

    #[test]
    fn sym_eig_offdiag() {
        let s = SymMatrix::from_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        let e = sym_eig(&s).unwrap();
        assert_close(e.values[0], -1.0, 1e-14);
        assert_close(e.values[1], 1.0, 1e-14);
    }

    #[test]
    fn sym_eig_paper_p11_positive() {
        let p11 = SymMatrix::from_rows(&[&[196.665, 17.322], &[17.322, 25.408]]).unwrap();
        let e = sym_eig(&p11).unwrap();
        assert!(e.values[0] > 0.0 && e.values[1] > 0.0);
    }

    #[test]
    fn min_eig_trivial() {
        assert_close(min_eigenvalue(&SymMatrix::identity(2)).unwrap(), 1.0, 1e-14);
        assert_close(
            min_eigenvalue(&SymMatrix::diag(&[3.0, -2.0])).unwrap(),
            -2.0,
            1e-14,
        );
    }

    // closed-form quadratic characteristic-root oracle for 2x2 symmetric
    fn eig2_oracle(s: &SymMatrix) -> (f64, f64) {
        let (a, b, c) = (s.get(0, 0), s.get(0, 1), s.get(1, 1));
        let tr = a + c;
        let disc = libm::sqrt((a - c) * (a - c) + 4.0 * b * b);
        (0.5 * (tr - disc), 0.5 * (tr + disc))
    }

    #[test]
    fn min_eig_lyap_derivative_vs_oracle() {
        let a1 = SquareMatrix::from_rows(&[&[0.0, 1.0], &[-10.0, -1.0]]).unwrap();
        let p11 = SymMatrix::from_rows(&[&[196.665, 17.322], &[17.322, 25.408]]).unwrap();
        let d = p11.lyap_derivative(&a1).scale(-1.0);
        let (lo, _) = eig2_oracle(&d);
        assert_close(min_eigenvalue(&d).unwrap(), lo, 1e-9 * d.max_abs());
    }

    #[test]
    fn expm_zero_time_is_identity() {
        let a = SquareMatrix::from_rows(&[&[0.0, 1.0], &[-10.0, -1.0]]).unwrap();
        let e = expm(&a, 0.0).unwrap();
        assert!(e.sub(&SquareMatrix::identity(2)).max_abs() < 1e-15);
    }

    #[test]
    fn expm_diagonal() {
        let a = SquareMatrix::from_rows(&[&[0.5, 0.0], &[0.0, -1.5]]).unwrap();
        let e = expm(&a, 2.0).unwrap();
        assert_close(e.get(0, 0), libm::exp(1.0), 1e-12 * libm::exp(1.0));
        assert_close(e.get(1, 1), libm::exp(-3.0), 1e-12);
        assert_close(e.get(0, 1), 0.0, 1e-15);
    }

    // scaled Taylor-series oracle with compensated summation
    fn expm_taylor(a: &SquareMatrix, t: f64) -> SquareMatrix {
        let n = a.dim();
        // scale so the series converges fast, then square back
        let norm = a.scale(t).one_norm();
        let s = if norm > 0.5 {
            libm::ceil(libm::log2(norm / 0.5)) as u32
        } else {
            0
        };
        let m = a.scale(t * libm::exp2(-(s as f64)));
        let mut sum = SquareMatrix::identity(n);
        let mut term = SquareMatrix::identity(n);
        for k in 1..60 {
            term = term.mul(&m).scale(1.0 / k as f64);
            sum = sum.add(&term);
            if term.max_abs() < 1e-20 * sum.max_abs().max(1.0) {
                break;
            }
        }
        let mut out = sum;
        for _ in 0..s {
            out = out.mul(&out);
        }
        out
    }

    #[test]
    fn expm_vs_taylor_oracle() {
        let a1 = SquareMatrix::from_rows(&[&[0.0, 1.0], &[-10.0, -1.0]]).unwrap();
        let e = expm(&a1, 1.0).unwrap();
        let oracle = expm_taylor(&a1, 1.0);
        assert!(e.sub(&oracle).max_abs() <= 1e-10 * oracle.max_abs().max(1.0));
    }

    #[test]
    fn spectral_radius_trivial() {
        assert_close(
            spectral_radius(&SquareMatrix::identity(2)).unwrap(),
            1.0,
            1e-14,
        );
        let nilp = SquareMatrix::from_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        assert_close(spectral_radius(&nilp).unwrap(), 0.0, 1e-14);
    }

    #[test]
    fn spectral_radius_squaring_matches_closed_form() {
        // embed a 2x2 with complex pair into a 3x3 block diagonal
        let m = SquareMatrix::from_rows(&[
            &[0.3, -0.8, 0.0],
            &[0.8, 0.3, 0.0],
            &[0.0, 0.0, 0.5],
        ])
        .unwrap();
        let expected = libm::sqrt(0.3f64 * 0.3 + 0.8 * 0.8);
        assert_close(spectral_radius(&m).unwrap(), expected, 1e-8);
    }

    #[test]
    fn lyap_solve_roundtrip() {
        let a = SquareMatrix::from_rows(&[&[0.0, 1.0], &[-10.0, -1.0]]).unwrap();
        let p = lyap_solve(&a, &SymMatrix::identity(2)).unwrap();
        let resid = p
            .lyap_derivative(&a)
            .add_scaled(&SymMatrix::identity(2), 1.0);
        assert!(resid.max_abs() < 1e-12 * p.max_abs());
        assert!(is_pd(&p).unwrap());
    }

    #[test]
    fn hurwitz_classification() {
        let a1 = SquareMatrix::from_rows(&[&[0.0, 1.0], &[-10.0, -1.0]]).unwrap();
        assert!(is_hurwitz(&a1).unwrap());
        let unstable = SquareMatrix::from_rows(&[&[1.0, 0.0], &[0.0, -1.0]]).unwrap();
        assert!(!is_hurwitz(&unstable).unwrap());
        let marginal = SquareMatrix::from_rows(&[&[0.0, 1.0], &[-1.0, 0.0]]).unwrap();
        assert!(!is_hurwitz(&marginal).unwrap());
    }

    #[test]
    fn nonfinite_rejected() {
        assert_eq!(
            SquareMatrix::new(2, vec![0.0, f64::NAN, 1.0, 2.0]).unwrap_err(),
            Error::NonFinite
        );
    }
}
