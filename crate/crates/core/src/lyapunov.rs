//! Piecewise-quadratic Lyapunov function machinery: evaluation of the
//! pointwise max of quadratic forms, the active set, the one-sided
//! directional derivative along a mode, and level-set geometry.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::mat::{self, SquareMatrix, SymMatrix};

/// Default relative tolerance for active-set ties.
pub const TIE_TOL: f64 = 1e-9;

/// Pointwise maximum of `m` quadratic forms `x' P_r x` with every
/// `P_r` positive definite.
#[derive(Debug, Clone)]
pub struct PiecewiseQuadratic {
    n: usize,
    pieces: Vec<SymMatrix>,
}

impl PiecewiseQuadratic {
    pub fn new(pieces: Vec<SymMatrix>) -> Result<Self> {
        let n = match pieces.first() {
            Some(p) => p.dim(),
            None => return Err(Error::ShapeMismatch("empty piece list".into())),
        };
        for (r, p) in pieces.iter().enumerate() {
            if p.dim() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: p.dim(),
                });
            }
            if !mat::is_pd(p)? {
                return Err(Error::FamilyNotPD { mode: 0, piece: r });
            }
        }
        Ok(PiecewiseQuadratic { n, pieces })
    }

    /// Skips the definiteness check; for internal iterates that may be
    /// temporarily indefinite during synthesis.
    pub fn new_unchecked(pieces: Vec<SymMatrix>) -> Self {
        let n = pieces.first().map(|p| p.dim()).unwrap_or(0);
        PiecewiseQuadratic { n, pieces }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn num_pieces(&self) -> usize {
        self.pieces.len()
    }

    pub fn pieces(&self) -> &[SymMatrix] {
        &self.pieces
    }

    pub fn piece(&self, r: usize) -> &SymMatrix {
        &self.pieces[r]
    }
}

/// One piecewise-quadratic function per mode, all with the same state
/// dimension and piece count.
#[derive(Debug, Clone)]
pub struct LyapunovFamily {
    modes: Vec<PiecewiseQuadratic>,
}

impl LyapunovFamily {
    pub fn new(modes: Vec<PiecewiseQuadratic>) -> Result<Self> {
        let first = modes
            .first()
            .ok_or_else(|| Error::ShapeMismatch("empty mode list".into()))?;
        let (n, m) = (first.dim(), first.num_pieces());
        for v in &modes {
            if v.dim() != n || v.num_pieces() != m {
                return Err(Error::ShapeMismatch(
                    "modes disagree on dimension or piece count".into(),
                ));
            }
        }
        Ok(LyapunovFamily { modes })
    }

    pub fn num_modes(&self) -> usize {
        self.modes.len()
    }

    pub fn dim(&self) -> usize {
        self.modes[0].dim()
    }

    pub fn pieces_per_mode(&self) -> usize {
        self.modes[0].num_pieces()
    }

    pub fn mode(&self, i: usize) -> &PiecewiseQuadratic {
        &self.modes[i]
    }

    pub fn modes(&self) -> &[PiecewiseQuadratic] {
        &self.modes
    }
}

fn check_dim(v: &PiecewiseQuadratic, x: &[f64]) -> Result<()> {
    if x.len() != v.dim() {
        return Err(Error::DimensionMismatch {
            expected: v.dim(),
            got: x.len(),
        });
    }
    Ok(())
}

/// max_r x' P_r x
pub fn eval_vmax(v: &PiecewiseQuadratic, x: &[f64]) -> Result<f64> {
    check_dim(v, x)?;
    Ok(v.pieces
        .iter()
        .map(|p| p.quad_form(x))
        .fold(f64::NEG_INFINITY, f64::max))
}

/// Indices r with x' P_r x within `tie_tol * max(1, V_max)` of the max.
pub fn active_set(v: &PiecewiseQuadratic, x: &[f64], tie_tol: f64) -> Result<Vec<usize>> {
    check_dim(v, x)?;
    let vals: Vec<f64> = v.pieces.iter().map(|p| p.quad_form(x)).collect();
    let vmax = vals.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
    let slack = tie_tol * vmax.abs().max(1.0);
    Ok(vals
        .iter()
        .enumerate()
        .filter(|(_, &val)| val >= vmax - slack)
        .map(|(r, _)| r)
        .collect())
}

/// One-sided directional derivative of V_max along the flow of `a`:
/// max over the active set of x'(A'P_s + P_s A)x.
pub fn directional_derivative(
    v: &PiecewiseQuadratic,
    a: &SquareMatrix,
    x: &[f64],
) -> Result<f64> {
    check_dim(v, x)?;
    if a.dim() != v.dim() {
        return Err(Error::DimensionMismatch {
            expected: v.dim(),
            got: a.dim(),
        });
    }
    let active = active_set(v, x, TIE_TOL)?;
    let mut best = f64::NEG_INFINITY;
    for s in active {
        let d = v.pieces[s].lyap_derivative(a).quad_form(x);
        best = best.max(d);
    }
    Ok(best)
}

/// Radial samples of the 1-level set of V_max for planar systems. Valid
/// because V_max is positively homogeneous of degree 2: the boundary point
/// along unit direction u is u / sqrt(V_max(u)).
pub fn level_set_boundary(v: &PiecewiseQuadratic, num_dirs: usize) -> Result<Vec<[f64; 2]>> {
    if v.dim() != 2 {
        return Err(Error::UnsupportedDimension { got: v.dim() });
    }
    let num_dirs = num_dirs.max(8);
    let mut pts = Vec::with_capacity(num_dirs);
    for k in 0..num_dirs {
        let theta = 2.0 * core::f64::consts::PI * k as f64 / num_dirs as f64;
        let u = [libm::cos(theta), libm::sin(theta)];
        let val = eval_vmax(v, &u)?;
        let r = 1.0 / libm::sqrt(val);
        pts.push([r * u[0], r * u[1]]);
    }
    Ok(pts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;

    fn pwq(mats: &[&[&[f64]]]) -> PiecewiseQuadratic {
        PiecewiseQuadratic::new(mats.iter().map(|m| SymMatrix::from_rows(m).unwrap()).collect())
            .unwrap()
    }

    #[test]
    fn eval_single_identity() {
        let v = pwq(&[&[&[1.0, 0.0], &[0.0, 1.0]]]);
        assert_eq!(eval_vmax(&v, &[3.0, 4.0]).unwrap(), 25.0);
    }

    #[test]
    fn eval_coordinate_max() {
        let v = pwq(&[
            &[&[1.0, 0.0], &[0.0, 1.0]],
            &[&[4.0, 0.0], &[0.0, 0.25]],
        ]);
        assert_eq!(eval_vmax(&v, &[1.0, 0.0]).unwrap(), 4.0);
    }

    #[test]
    fn eval_paper_family_matches_per_piece_forms() {
        // mode-1 pieces from the worked example, 3-decimal print precision
        let ps = [
            [[196.665, 17.322], [17.322, 25.408]],
            [[196.502, 38.442], [38.442, 12.137]],
            [[187.555, 4.997], [4.997, 19.280]],
            [[196.502, 38.455], [38.455, 11.973]],
        ];
        let x = [0.0689f64, 0.0119f64];
        let v = PiecewiseQuadratic::new(
            ps.iter()
                .map(|p| SymMatrix::from_rows(&[&p[0], &p[1]]).unwrap())
                .collect(),
        )
        .unwrap();
        // hand-expanded quadratic forms a*x0^2 + 2b*x0*x1 + c*x1^2
        let mut expect = f64::NEG_INFINITY;
        for p in &ps {
            let q = p[0][0] * x[0] * x[0] + 2.0 * p[0][1] * x[0] * x[1] + p[1][1] * x[1] * x[1];
            expect = expect.max(q);
        }
        let got = eval_vmax(&v, &x).unwrap();
        assert!((got - expect).abs() <= 1e-12 * expect);
    }

    #[test]
    fn active_set_cases() {
        let single = pwq(&[&[&[1.0, 0.0], &[0.0, 1.0]]]);
        assert_eq!(active_set(&single, &[0.3, -2.0], TIE_TOL).unwrap(), [0]);

        let dup = pwq(&[
            &[&[1.0, 0.0], &[0.0, 1.0]],
            &[&[1.0, 0.0], &[0.0, 1.0]],
        ]);
        assert_eq!(active_set(&dup, &[1.0, 2.0], TIE_TOL).unwrap(), [0, 1]);

        let symm = pwq(&[
            &[&[2.0, 0.0], &[0.0, 1.0]],
            &[&[1.0, 0.0], &[0.0, 2.0]],
        ]);
        assert_eq!(active_set(&symm, &[1.0, 1.0], TIE_TOL).unwrap(), [0, 1]);
    }

    #[test]
    fn derivative_single_piece_reduces_to_quadratic() {
        let v = pwq(&[&[&[1.0, 0.0], &[0.0, 1.0]]]);
        let a = SquareMatrix::from_rows(&[&[-1.0, 0.0], &[0.0, -1.0]]).unwrap();
        assert!((directional_derivative(&v, &a, &[1.0, 0.0]).unwrap() + 2.0).abs() < 1e-14);

        let a2 = SquareMatrix::from_rows(&[&[0.5, 1.5], &[-2.0, -0.25]]).unwrap();
        let x = [0.7, -1.3];
        let expect = SymMatrix::symmetrize(a2.transpose().add(&a2)).quad_form(&x);
        assert!((directional_derivative(&v, &a2, &x).unwrap() - expect).abs() < 1e-12);
    }

    #[test]
    fn derivative_matches_finite_differences() {
        // one-sided difference quotient oracle, error O(h)
        let mut rng = Rng::new(1234);
        for _ in 0..100 {
            let mut p1 = SymMatrix::identity(2);
            let mut p2 = SymMatrix::identity(2);
            p1.set_sym(0, 0, 1.0 + rng.next_f64() * 3.0);
            p1.set_sym(0, 1, rng.next_signed() * 0.5);
            p1.set_sym(1, 1, 1.0 + rng.next_f64() * 3.0);
            p2.set_sym(0, 0, 1.0 + rng.next_f64() * 3.0);
            p2.set_sym(0, 1, rng.next_signed() * 0.5);
            p2.set_sym(1, 1, 1.0 + rng.next_f64() * 3.0);
            let v = PiecewiseQuadratic::new(vec![p1, p2]).unwrap();
            let a = SquareMatrix::from_rows(&[
                &[rng.next_signed(), rng.next_signed()],
                &[rng.next_signed(), rng.next_signed()],
            ])
            .unwrap();
            let x = rng.unit_vector(2);
            let d = directional_derivative(&v, &a, &x).unwrap();
            for h in [1e-4, 1e-5, 1e-6] {
                let ax = a.mul_vec(&x);
                let xh = [x[0] + h * ax[0], x[1] + h * ax[1]];
                let fd = (eval_vmax(&v, &xh).unwrap() - eval_vmax(&v, &x).unwrap()) / h;
                // O(h) with a generous constant for the quadratic curvature
                assert!(
                    (fd - d).abs() <= 100.0 * h + 1e-9,
                    "fd {fd} vs d {d} at h {h}"
                );
            }
        }
    }

    #[test]
    fn level_set_circle_and_ellipse() {
        let circle = pwq(&[&[&[1.0, 0.0], &[0.0, 1.0]]]);
        for p in level_set_boundary(&circle, 32).unwrap() {
            let r = libm::sqrt(p[0] * p[0] + p[1] * p[1]);
            assert!((r - 1.0).abs() < 1e-12);
        }
        let ell = pwq(&[&[&[4.0, 0.0], &[0.0, 1.0]]]);
        let pts = level_set_boundary(&ell, 4 * 90).unwrap();
        assert!((pts[0][0] - 0.5).abs() < 1e-12); // theta = 0
        assert!((pts[90][1] - 1.0).abs() < 1e-12); // theta = pi/2
        for p in &pts {
            assert!((eval_vmax(&ell, p).unwrap() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn level_set_rejects_3d() {
        let v = PiecewiseQuadratic::new(vec![SymMatrix::identity(3)]).unwrap();
        assert!(matches!(
            level_set_boundary(&v, 16),
            Err(Error::UnsupportedDimension { got: 3 })
        ));
    }

    #[test]
    fn homogeneity_and_positivity() {
        let mut rng = Rng::new(99);
        let v = pwq(&[
            &[&[2.0, 0.3], &[0.3, 1.0]],
            &[&[1.0, -0.2], &[-0.2, 3.0]],
        ]);
        for _ in 0..1000 {
            let x = [rng.next_signed() * 5.0, rng.next_signed() * 5.0];
            if x[0] == 0.0 && x[1] == 0.0 {
                continue;
            }
            let val = eval_vmax(&v, &x).unwrap();
            assert!(val > 0.0);
            let c = 0.1 + rng.next_f64() * 10.0;
            let scaled = eval_vmax(&v, &[c * x[0], c * x[1]]).unwrap();
            assert!((scaled - c * c * val).abs() <= 1e-10 * (c * c * val).abs());
        }
    }

    #[test]
    fn monotone_refinement() {
        let mut rng = Rng::new(5);
        let base = pwq(&[&[&[2.0, 0.3], &[0.3, 1.0]]]);
        let refined = pwq(&[
            &[&[2.0, 0.3], &[0.3, 1.0]],
            &[&[1.0, -0.2], &[-0.2, 3.0]],
        ]);
        for _ in 0..200 {
            let x = rng.unit_vector(2);
            assert!(eval_vmax(&refined, &x).unwrap() >= eval_vmax(&base, &x).unwrap() - 1e-15);
        }
    }
}
