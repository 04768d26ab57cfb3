//! Feasibility oracle for assembled matrix-inequality problems.
//!
//! Solves `min t  s.t.  B_k(y) + t I > 0` for every block, with hard box
//! bounds on the scalars, by a log-det barrier path-following method with
//! damped Newton steps. Every result labeled feasible is re-validated by
//! direct eigenvalue computation before it is returned, so a buggy or
//! inaccurate inner solve can never silently report feasibility.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::lmi::LmiProblem;
use crate::mat::{self, SymMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Feasible,
    Infeasible,
    Inconclusive,
}

/// Outcome of a feasibility solve. `objective` is the achieved worst
/// eigenvalue slack `t` (negative when all blocks hold strictly), computed
/// by the independent eigenvalue re-check rather than the inner solver.
#[derive(Debug, Clone)]
pub struct Feasibility {
    pub status: Status,
    pub assignment: Vec<f64>,
    pub objective: f64,
    pub iterations: u64,
}

/// Hard floor on the slack variable; keeps the objective bounded when a
/// problem leaves it otherwise unbounded below.
const T_CAP: f64 = 1e8;

const MAX_INNER: usize = 80;
const MAX_OUTER: usize = 60;

pub fn solve_feasibility(prob: &LmiProblem, eps: f64) -> Result<Feasibility> {
    solve_feasibility_from(prob, eps, None)
}

/// Variant with a warm-start assignment (projected into the box interior).
pub fn solve_feasibility_from(
    prob: &LmiProblem,
    eps: f64,
    warm: Option<&[f64]>,
) -> Result<Feasibility> {
    let nv = prob.num_scalars;
    let mut y = vec![0.0f64; nv];
    if let Some(w) = warm {
        if w.len() != nv {
            return Err(Error::DimensionMismatch {
                expected: nv,
                got: w.len(),
            });
        }
        y.copy_from_slice(w);
    }
    // project into the interior of the box
    for j in 0..nv {
        let (lo, hi) = (prob.lower[j], prob.upper[j]);
        if lo.is_finite() && hi.is_finite() {
            let w = hi - lo;
            y[j] = y[j].clamp(lo + 0.01 * w, hi - 0.01 * w);
        } else if lo.is_finite() {
            y[j] = y[j].max(lo + 1e-3 * lo.abs().max(1.0));
        } else if hi.is_finite() {
            y[j] = y[j].min(hi - 1e-3 * hi.abs().max(1.0));
        }
    }

    match barrier_minimize(prob, &mut y, eps) {
        Ok(iterations) => finish(prob, y, eps, iterations),
        Err(_) => Ok(Feasibility {
            status: Status::Inconclusive,
            assignment: y,
            objective: f64::INFINITY,
            iterations: 0,
        }),
    }
}

fn finish(prob: &LmiProblem, y: Vec<f64>, eps: f64, iterations: u64) -> Result<Feasibility> {
    // independent eigenvalue re-check; this, not the inner solve, decides
    let worst = prob.worst_margin(&y)?;
    let objective = -worst;
    let status = if !objective.is_finite() && prob.blocks.is_empty() {
        Status::Feasible
    } else if objective <= -eps {
        Status::Feasible
    } else {
        Status::Infeasible
    };
    Ok(Feasibility {
        status,
        assignment: y,
        objective,
        iterations,
    })
}

/// Minimizes t along the central path; `y` is updated in place.
fn barrier_minimize(prob: &LmiProblem, y: &mut [f64], eps: f64) -> Result<u64> {
    let nv = prob.num_scalars;
    if prob.blocks.is_empty() {
        return Ok(0);
    }

    // initial slack: strictly inside every block
    let mut max_viol = 0.0f64;
    for b in &prob.blocks {
        max_viol = max_viol.max(-b.min_eig(y)?);
    }
    let mut t = max_viol + 1.0;

    // total barrier complexity: block dims + finite bounds + the t floor
    let mut nu = prob.blocks.iter().map(|b| b.dim as f64).sum::<f64>() + 1.0;
    for j in 0..nv {
        if prob.lower[j].is_finite() {
            nu += 1.0;
        }
        if prob.upper[j].is_finite() {
            nu += 1.0;
        }
    }

    let gap_tol = (0.05 * eps).clamp(1e-10, 1e-6);
    let mut eta = 1.0f64;
    let mut iterations = 0u64;

    for _outer in 0..MAX_OUTER {
        newton_stage(prob, y, &mut t, eta, &mut iterations)?;
        if nu / eta <= gap_tol {
            break;
        }
        eta *= 5.0;
    }
    Ok(iterations)
}

struct BlockEval {
    inv: SymMatrix,
    logdet: f64,
}

fn eval_block(b: &crate::lmi::Block, y: &[f64], t: f64) -> Result<Option<BlockEval>> {
    let mut s = b.value(y);
    let dim = s.dim();
    for d in 0..dim {
        s.set_sym(d, d, s.get(d, d) + t);
    }
    let eig = mat::sym_eig(&s)?;
    if eig.values[0] <= 0.0 {
        return Ok(None);
    }
    let mut logdet = 0.0;
    let mut inv = SymMatrix::zeros(dim);
    for (k, &lam) in eig.values.iter().enumerate() {
        logdet += libm::log(lam);
        // inv += v_k v_k' / lam
        for a in 0..dim {
            for c in a..dim {
                let add = eig.vectors.get(a, k) * eig.vectors.get(c, k) / lam;
                inv.set_sym(a, c, inv.get(a, c) + add);
            }
        }
    }
    Ok(Some(BlockEval { inv, logdet }))
}

/// Barrier objective; None when (y, t) is outside the domain.
fn objective(prob: &LmiProblem, y: &[f64], t: f64, eta: f64) -> Result<Option<f64>> {
    if t <= -T_CAP {
        return Ok(None);
    }
    let mut f = eta * t - libm::log(t + T_CAP);
    for j in 0..prob.num_scalars {
        let (lo, hi) = (prob.lower[j], prob.upper[j]);
        if lo.is_finite() {
            if y[j] <= lo {
                return Ok(None);
            }
            f -= libm::log(y[j] - lo);
        }
        if hi.is_finite() {
            if y[j] >= hi {
                return Ok(None);
            }
            f -= libm::log(hi - y[j]);
        }
    }
    for b in &prob.blocks {
        match eval_block(b, y, t)? {
            Some(ev) => f -= ev.logdet,
            None => return Ok(None),
        }
    }
    Ok(Some(f))
}

fn newton_stage(
    prob: &LmiProblem,
    y: &mut [f64],
    t: &mut f64,
    eta: f64,
    iterations: &mut u64,
) -> Result<()> {
    let nv = prob.num_scalars;
    let nz = nv + 1; // unknowns: y then t

    for _inner in 0..MAX_INNER {
        *iterations += 1;
        let mut g = vec![0.0f64; nz];
        let mut h = vec![vec![0.0f64; nz]; nz];
        g[nv] = eta;
        // t floor barrier
        let tf = *t + T_CAP;
        g[nv] += -1.0 / tf;
        h[nv][nv] += 1.0 / (tf * tf);
        // box barriers
        for j in 0..nv {
            let (lo, hi) = (prob.lower[j], prob.upper[j]);
            if lo.is_finite() {
                let d = y[j] - lo;
                g[j] += -1.0 / d;
                h[j][j] += 1.0 / (d * d);
            }
            if hi.is_finite() {
                let d = hi - y[j];
                g[j] += 1.0 / d;
                h[j][j] += 1.0 / (d * d);
            }
        }
        // block barriers
        for b in &prob.blocks {
            let ev = eval_block(b, y, *t)?
                .ok_or_else(|| Error::SolverFailure("iterate left the cone".into()))?;
            let w = &ev.inv;
            let dim = b.dim;
            // products W * C_j for every term, plus W itself for the t slot
            let mut prods: Vec<(usize, crate::mat::SquareMatrix)> =
                Vec::with_capacity(b.terms.len() + 1);
            for (idx, c) in &b.terms {
                prods.push((*idx, w.as_square().mul(c.as_square())));
            }
            prods.push((nv, w.as_square().clone()));
            for (idx, p) in &prods {
                let mut tr = 0.0;
                for d in 0..dim {
                    tr += p.get(d, d);
                }
                g[*idx] -= tr;
            }
            for a in 0..prods.len() {
                let (ia, pa) = &prods[a];
                for bb in a..prods.len() {
                    let (ib, pb) = &prods[bb];
                    let mut tr = 0.0;
                    for r in 0..dim {
                        for c in 0..dim {
                            tr += pa.get(r, c) * pb.get(c, r);
                        }
                    }
                    h[*ia][*ib] += tr;
                    if ia != ib {
                        h[*ib][*ia] += tr;
                    }
                }
            }
        }

        // solve H d = -g with escalating regularization
        let mut d = None;
        let mut reg = 0.0f64;
        for attempt in 0..6 {
            let mut hh = h.clone();
            if attempt > 0 {
                reg = if reg == 0.0 { 1e-10 } else { reg * 1e3 };
                let scale: f64 = (0..nz).map(|k| h[k][k].abs()).fold(0.0, f64::max).max(1.0);
                for k in 0..nz {
                    hh[k][k] += reg * scale;
                }
            }
            let mut rhs: Vec<f64> = g.iter().map(|v| -v).collect();
            if mat::solve_linear(&mut hh, &mut rhs).is_ok()
                && rhs.iter().all(|v| v.is_finite())
            {
                d = Some(rhs);
                break;
            }
        }
        let d = d.ok_or_else(|| Error::SolverFailure("Newton system unsolvable".into()))?;

        let decrement: f64 = -g.iter().zip(d.iter()).map(|(a, b)| a * b).sum::<f64>();
        if decrement <= 2e-10 {
            return Ok(());
        }

        let f0 = objective(prob, y, *t, eta)?
            .ok_or_else(|| Error::SolverFailure("iterate left the domain".into()))?;
        let mut step = 1.0f64;
        let mut accepted = false;
        for _ in 0..60 {
            let mut y_new: Vec<f64> = y.to_vec();
            for j in 0..nv {
                y_new[j] += step * d[j];
            }
            let t_new = *t + step * d[nv];
            if let Some(f_new) = objective(prob, &y_new, t_new, eta)? {
                if f_new <= f0 - 0.25 * step * decrement {
                    y.copy_from_slice(&y_new);
                    *t = t_new;
                    accepted = true;
                    break;
                }
            }
            step *= 0.5;
        }
        if !accepted {
            // cannot improve further at this barrier weight
            return Ok(());
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lmi::{Block, BlockLabel, LmiProblem, VarDecl, VarKind};
    use crate::mat::SymMatrix;

    fn single_var_problem(blocks: Vec<Block>) -> LmiProblem {
        LmiProblem {
            vars: vec![VarDecl {
                name: "P".into(),
                kind: VarKind::Sym { dim: 2 },
                offset: 0,
            }],
            num_scalars: 3,
            lower: vec![f64::NEG_INFINITY; 3],
            upper: vec![f64::INFINITY; 3],
            blocks,
        }
    }

    fn basis(i: usize, j: usize) -> SymMatrix {
        let mut b = SymMatrix::zeros(2);
        b.set_sym(i, j, 1.0);
        b
    }

    fn p_terms() -> Vec<(usize, SymMatrix)> {
        vec![(0, basis(0, 0)), (1, basis(0, 1)), (2, basis(1, 1))]
    }

    #[test]
    fn free_p_above_identity_is_feasible() {
        // P - I >= 0 with P free, capped below by the t floor
        let prob = single_var_problem(vec![Block {
            label: BlockLabel::Pd { mode: 0, piece: 0 },
            dim: 2,
            constant: SymMatrix::identity(2).scale(-1.0),
            terms: p_terms(),
        }]);
        let f = solve_feasibility(&prob, 1e-7).unwrap();
        assert_eq!(f.status, Status::Feasible);
        assert!(f.objective <= -1.0, "objective {}", f.objective);
    }

    #[test]
    fn contradictory_blocks_are_infeasible() {
        // P - 2I >= 0 and I - P >= 0 cannot both hold
        let prob = single_var_problem(vec![
            Block {
                label: BlockLabel::Pd { mode: 0, piece: 0 },
                dim: 2,
                constant: SymMatrix::identity(2).scale(-2.0),
                terms: p_terms(),
            },
            Block {
                label: BlockLabel::NormCap { mode: 0, piece: 0 },
                dim: 2,
                constant: SymMatrix::identity(2),
                terms: p_terms().into_iter().map(|(i, c)| (i, c.scale(-1.0))).collect(),
            },
        ]);
        let f = solve_feasibility(&prob, 1e-7).unwrap();
        assert_eq!(f.status, Status::Infeasible);
        // best slack is attained at P = 1.5 I with margin -0.5 on both sides
        assert!((f.objective - 0.5).abs() < 1e-3, "objective {}", f.objective);
    }

    #[test]
    fn feasible_results_pass_eigen_recheck() {
        let prob = single_var_problem(vec![Block {
            label: BlockLabel::Pd { mode: 0, piece: 0 },
            dim: 2,
            constant: SymMatrix::from_rows(&[&[-3.0, 0.5], &[0.5, -1.0]]).unwrap(),
            terms: p_terms(),
        }]);
        let f = solve_feasibility(&prob, 1e-7).unwrap();
        assert_eq!(f.status, Status::Feasible);
        let worst = prob.worst_margin(&f.assignment).unwrap();
        assert!(worst >= 1e-7);
        assert!((worst + f.objective).abs() < 1e-12);
    }

    #[test]
    fn box_bounds_are_respected() {
        // scalar a in [0, 1], block [a - 2 + t] can only reach t = 1 + margin
        let prob = LmiProblem {
            vars: vec![VarDecl {
                name: "a".into(),
                kind: VarKind::Scalar,
                offset: 0,
            }],
            num_scalars: 1,
            lower: vec![0.0],
            upper: vec![1.0],
            blocks: vec![Block {
                label: BlockLabel::GammaSum {
                    to: 0,
                    target_piece: 0,
                    from: 0,
                    piece: 0,
                },
                dim: 1,
                constant: SymMatrix::diag(&[-2.0]),
                terms: vec![(0, SymMatrix::diag(&[1.0]))],
            }],
        };
        let f = solve_feasibility(&prob, 1e-7).unwrap();
        assert_eq!(f.status, Status::Infeasible);
        assert!(f.assignment[0] <= 1.0 && f.assignment[0] >= 0.0);
        assert!((f.objective - 1.0).abs() < 1e-3, "objective {}", f.objective);
    }
}
