//! Matrix-inequality assembly and certificate verification.
//!
//! The stability conditions couple the Lyapunov pieces `P_{i,r}` with
//! nonnegative S-procedure multipliers `alpha` (decay coupling) and
//! `gamma` (switch-jump coupling). Fixing either side makes the system
//! affine, and this module assembles all three flavors used by the
//! synthesis loop:
//!
//! * fixed scalars, variables `P_{i,r}` (the LMI re-solve step),
//! * fixed pieces, variables `alpha`/`gamma`,
//! * the first-order delta step in all variables inside a trust region.
//!
//! Certificates are re-verified here by direct eigenvalue computation,
//! independent of whatever the feasibility oracle reported.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::lyapunov::{self, LyapunovFamily, PiecewiseQuadratic};
use crate::mat::{self, SquareMatrix, SymMatrix};
use crate::rng::Rng;

/// Switched linear system: mode matrices validated Hurwitz at load.
#[derive(Debug, Clone)]
pub struct SwitchedSystem {
    n: usize,
    modes: Vec<SquareMatrix>,
    labels: Vec<String>,
}

impl SwitchedSystem {
    pub fn new(modes: Vec<SquareMatrix>, labels: Option<Vec<String>>) -> Result<Self> {
        let first = modes
            .first()
            .ok_or_else(|| Error::ShapeMismatch("no modes".into()))?;
        let n = first.dim();
        for (i, a) in modes.iter().enumerate() {
            if a.dim() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: a.dim(),
                });
            }
            if !mat::is_hurwitz(a)? {
                let max_re = mat::max_real_part_2x2(a).unwrap_or(f64::NAN);
                return Err(Error::NonHurwitz {
                    mode: i,
                    max_real_part: max_re,
                });
            }
        }
        let labels = match labels {
            Some(l) if l.len() == modes.len() => l,
            Some(_) => {
                return Err(Error::ShapeMismatch("label count != mode count".into()));
            }
            None => (1..=modes.len()).map(|i| format!("{i}")).collect(),
        };
        Ok(SwitchedSystem { n, modes, labels })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn num_modes(&self) -> usize {
        self.modes.len()
    }

    pub fn mode(&self, i: usize) -> &SquareMatrix {
        &self.modes[i]
    }

    pub fn modes(&self) -> &[SquareMatrix] {
        &self.modes
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }
}

/// Cache of `exp(A_i * tau)` keyed by (mode, exact tau bit pattern).
/// Bisection revisits the same tau many times per assembly round.
#[derive(Debug, Clone, Default)]
pub struct ExpmCache {
    map: BTreeMap<(usize, u64), SquareMatrix>,
}

impl ExpmCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn phi(&mut self, sys: &SwitchedSystem, i: usize, tau: f64) -> Result<SquareMatrix> {
        let key = (i, tau.to_bits());
        if let Some(m) = self.map.get(&key) {
            return Ok(m.clone());
        }
        let m = mat::expm(sys.mode(i), tau)?;
        self.map.insert(key, m.clone());
        Ok(m)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

/// S-procedure multipliers. `alpha[i][r][s]` couples pieces of one mode in
/// the decay condition; `gamma[j][q][i][r][s]` couples pieces across a
/// switch from mode i to mode j. Entries with s = r (and i = j for gamma)
/// are structurally zero.
#[derive(Debug, Clone)]
pub struct ScalarMultipliers {
    num_modes: usize,
    m: usize,
    alpha: Vec<f64>,
    gamma: Vec<f64>,
}

/// Row-sum headroom for the gamma constraint `sum_s gamma < 1`.
pub const DELTA_GAMMA: f64 = 1e-6;

impl ScalarMultipliers {
    pub fn zeros(num_modes: usize, m: usize) -> Self {
        ScalarMultipliers {
            num_modes,
            m,
            alpha: vec![0.0; num_modes * m * m],
            gamma: vec![0.0; num_modes * m * num_modes * m * m],
        }
    }

    pub fn num_modes(&self) -> usize {
        self.num_modes
    }

    pub fn pieces(&self) -> usize {
        self.m
    }

    #[inline]
    fn a_idx(&self, i: usize, r: usize, s: usize) -> usize {
        (i * self.m + r) * self.m + s
    }

    #[inline]
    fn g_idx(&self, j: usize, q: usize, i: usize, r: usize, s: usize) -> usize {
        (((j * self.m + q) * self.num_modes + i) * self.m + r) * self.m + s
    }

    pub fn alpha(&self, i: usize, r: usize, s: usize) -> f64 {
        self.alpha[self.a_idx(i, r, s)]
    }

    pub fn set_alpha(&mut self, i: usize, r: usize, s: usize, v: f64) {
        let k = self.a_idx(i, r, s);
        self.alpha[k] = v;
    }

    pub fn gamma(&self, j: usize, q: usize, i: usize, r: usize, s: usize) -> f64 {
        self.gamma[self.g_idx(j, q, i, r, s)]
    }

    pub fn set_gamma(&mut self, j: usize, q: usize, i: usize, r: usize, s: usize, v: f64) {
        let k = self.g_idx(j, q, i, r, s);
        self.gamma[k] = v;
    }

    pub fn gamma_row_sum(&self, j: usize, q: usize, i: usize, r: usize) -> f64 {
        (0..self.m)
            .filter(|&s| s != r)
            .map(|s| self.gamma(j, q, i, r, s))
            .sum()
    }

    /// Nonnegativity plus the per-row sum bound.
    pub fn validate(&self) -> bool {
        if self.alpha.iter().any(|&a| a < 0.0) || self.gamma.iter().any(|&g| g < 0.0) {
            return false;
        }
        for j in 0..self.num_modes {
            for q in 0..self.m {
                for i in 0..self.num_modes {
                    if i == j {
                        continue;
                    }
                    for r in 0..self.m {
                        if self.gamma_row_sum(j, q, i, r) > 1.0 - DELTA_GAMMA {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    /// Extend to m+1 pieces with zero couplings for the new piece.
    pub fn zero_extended(&self) -> ScalarMultipliers {
        let mut out = ScalarMultipliers::zeros(self.num_modes, self.m + 1);
        for i in 0..self.num_modes {
            for r in 0..self.m {
                for s in 0..self.m {
                    out.set_alpha(i, r, s, self.alpha(i, r, s));
                }
            }
        }
        for j in 0..self.num_modes {
            for q in 0..self.m {
                for i in 0..self.num_modes {
                    for r in 0..self.m {
                        for s in 0..self.m {
                            out.set_gamma(j, q, i, r, s, self.gamma(j, q, i, r, s));
                        }
                    }
                }
            }
        }
        out
    }
}

/// Assembly tolerances and normalization box. The stability conditions are
/// homogeneous in P, so the box `eps_norm I <= P <= kappa I` pins the scale.
#[derive(Debug, Clone)]
pub struct LmiOptions {
    pub eps_norm: f64,
    pub kappa: f64,
    /// Strict inequalities become margins `strict_rel * max(1, |const|)`.
    pub strict_rel: f64,
}

impl Default for LmiOptions {
    fn default() -> Self {
        LmiOptions {
            eps_norm: 1.0,
            kappa: 1e7,
            strict_rel: 1e-7,
        }
    }
}

/// Which stability condition a block encodes, with its indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BlockLabel {
    /// P_{i,r} bounded below (positivity).
    Pd { mode: usize, piece: usize },
    /// P_{i,r} bounded above (normalization cap).
    NormCap { mode: usize, piece: usize },
    /// Decay condition for (i, r).
    Decay { mode: usize, piece: usize },
    /// Jump condition for switch i -> j, target piece q, source piece r.
    Jump {
        from: usize,
        to: usize,
        piece: usize,
        target_piece: usize,
    },
    /// gamma row-sum headroom (1x1).
    GammaSum {
        to: usize,
        target_piece: usize,
        from: usize,
        piece: usize,
    },
}

impl BlockLabel {
    pub fn condition_class(&self) -> &'static str {
        match self {
            BlockLabel::Pd { .. } | BlockLabel::NormCap { .. } => "7",
            BlockLabel::Decay { .. } => "8",
            BlockLabel::Jump { .. } => "9",
            BlockLabel::GammaSum { .. } => "gamma-sum",
        }
    }
}

/// One affine PSD constraint: `constant + sum_k y[var[k]] * coeff[k] >= 0`,
/// with the strictness margin already folded into `constant`.
#[derive(Debug, Clone)]
pub struct Block {
    pub label: BlockLabel,
    pub dim: usize,
    pub constant: SymMatrix,
    pub terms: Vec<(usize, SymMatrix)>,
}

impl Block {
    pub fn value(&self, y: &[f64]) -> SymMatrix {
        let mut v = self.constant.clone();
        for (idx, coeff) in &self.terms {
            v = v.add_scaled(coeff, y[*idx]);
        }
        v
    }

    pub fn min_eig(&self, y: &[f64]) -> Result<f64> {
        mat::min_eigenvalue(&self.value(y))
    }
}

/// Declared decision variable: either a symmetric matrix (expanded into its
/// upper-triangle scalars) or a bounded scalar.
#[derive(Debug, Clone)]
pub enum VarKind {
    Sym { dim: usize },
    Scalar,
}

#[derive(Debug, Clone)]
pub struct VarDecl {
    pub name: String,
    pub kind: VarKind,
    /// Flat index of the first scalar backing this variable.
    pub offset: usize,
}

/// Affine feasibility problem over named variables with per-scalar box
/// bounds (infinite where free) and PSD blocks.
#[derive(Debug, Clone)]
pub struct LmiProblem {
    pub vars: Vec<VarDecl>,
    pub num_scalars: usize,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub blocks: Vec<Block>,
}

impl LmiProblem {
    fn new() -> Self {
        LmiProblem {
            vars: Vec::new(),
            num_scalars: 0,
            lower: Vec::new(),
            upper: Vec::new(),
            blocks: Vec::new(),
        }
    }

    fn add_sym_var(&mut self, name: String, dim: usize, bound: Option<f64>) -> usize {
        let offset = self.num_scalars;
        let count = dim * (dim + 1) / 2;
        self.vars.push(VarDecl {
            name,
            kind: VarKind::Sym { dim },
            offset,
        });
        self.num_scalars += count;
        let (lo, hi) = match bound {
            Some(b) => (-b, b),
            None => (f64::NEG_INFINITY, f64::INFINITY),
        };
        self.lower.extend(core::iter::repeat(lo).take(count));
        self.upper.extend(core::iter::repeat(hi).take(count));
        self.vars.len() - 1
    }

    fn add_scalar_var(&mut self, name: String, lo: f64, hi: f64) -> usize {
        let offset = self.num_scalars;
        self.vars.push(VarDecl {
            name,
            kind: VarKind::Scalar,
            offset,
        });
        self.num_scalars += 1;
        self.lower.push(lo);
        self.upper.push(hi);
        self.vars.len() - 1
    }

    /// Flat scalar index of entry (i, j), i <= j, of a symmetric variable.
    pub fn sym_entry(&self, var: usize, i: usize, j: usize) -> usize {
        let VarKind::Sym { dim } = self.vars[var].kind else {
            panic!("not a matrix variable");
        };
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        // row-major upper triangle
        self.vars[var].offset + i * dim - i * (i + 1) / 2 + j
    }

    pub fn scalar_entry(&self, var: usize) -> usize {
        self.vars[var].offset
    }

    /// Materialize a symmetric matrix variable from a flat assignment.
    pub fn sym_value(&self, var: usize, y: &[f64]) -> SymMatrix {
        let VarKind::Sym { dim } = self.vars[var].kind else {
            panic!("not a matrix variable");
        };
        let mut s = SymMatrix::zeros(dim);
        for i in 0..dim {
            for j in i..dim {
                s.set_sym(i, j, y[self.sym_entry(var, i, j)]);
            }
        }
        s
    }

    /// Worst block eigenvalue at an assignment (positive when all hold).
    pub fn worst_margin(&self, y: &[f64]) -> Result<f64> {
        let mut worst = f64::INFINITY;
        for b in &self.blocks {
            worst = worst.min(b.min_eig(y)?);
        }
        Ok(worst)
    }
}

/// Basis matrix for upper-triangle entry (i, j) of a dim-sized symmetric
/// variable: e_i e_i' on the diagonal, e_i e_j' + e_j e_i' off it.
fn sym_basis(dim: usize, i: usize, j: usize) -> SymMatrix {
    let mut b = SymMatrix::zeros(dim);
    b.set_sym(i, j, 1.0);
    b
}

fn strict_margin(opts: &LmiOptions, constant: &SymMatrix) -> f64 {
    opts.strict_rel * constant.max_abs().max(1.0)
}

/// Fold the strictness margin into the constant term of a strict block.
fn with_margin(opts: &LmiOptions, constant: SymMatrix) -> SymMatrix {
    let eps = strict_margin(opts, &constant);
    let n = constant.dim();
    constant.add_scaled(&SymMatrix::identity(n), -eps)
}

fn check_mult_shape(sys: &SwitchedSystem, m: usize, mult: &ScalarMultipliers) -> Result<()> {
    if mult.num_modes() != sys.num_modes() || mult.pieces() != m {
        return Err(Error::IndexMismatch(format!(
            "multipliers sized for ({}, {}), system needs ({}, {m})",
            mult.num_modes(),
            mult.pieces(),
            sys.num_modes()
        )));
    }
    Ok(())
}

/// Variable handles for an assembled problem, so callers can extract the
/// solution without re-deriving the layout.
#[derive(Debug, Clone, Default)]
pub struct VarMap {
    /// [i][r] -> matrix variable index (P or delta-P).
    pub p: Vec<Vec<usize>>,
    /// (i, r, s) -> scalar variable index.
    pub alpha: BTreeMap<(usize, usize, usize), usize>,
    /// (j, q, i, r, s) -> scalar variable index.
    pub gamma: BTreeMap<(usize, usize, usize, usize, usize), usize>,
}

#[derive(Debug, Clone)]
pub struct Assembled {
    pub problem: LmiProblem,
    pub vars: VarMap,
}

/// Conditions with the scalars fixed: affine in the `P_{i,r}`.
pub fn assemble_fixed_scalars(
    sys: &SwitchedSystem,
    tau: f64,
    m: usize,
    mult: &ScalarMultipliers,
    opts: &LmiOptions,
    cache: &mut ExpmCache,
) -> Result<Assembled> {
    if tau < 0.0 || m == 0 {
        return Err(Error::IndexMismatch("need tau >= 0 and m >= 1".into()));
    }
    check_mult_shape(sys, m, mult)?;
    let n = sys.dim();
    let nm = sys.num_modes();
    let mut prob = LmiProblem::new();
    let mut vars = VarMap::default();

    for i in 0..nm {
        let mut row = Vec::with_capacity(m);
        for r in 0..m {
            row.push(prob.add_sym_var(format!("P[{i}][{r}]"), n, None));
        }
        vars.p.push(row);
    }

    let entries = |v: usize, prob: &LmiProblem| -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for i in 0..n {
            for j in i..n {
                out.push((prob.sym_entry(v, i, j), i, j));
            }
        }
        out
    };

    for i in 0..nm {
        for r in 0..m {
            let pv = vars.p[i][r];
            // (7) lower: P - eps_norm I >= margin
            let c7 = SymMatrix::identity(n).scale(-opts.eps_norm);
            let mut terms = Vec::new();
            for (idx, a, b) in entries(pv, &prob) {
                terms.push((idx, sym_basis(n, a, b)));
            }
            prob.blocks.push(Block {
                label: BlockLabel::Pd { mode: i, piece: r },
                dim: n,
                constant: with_margin(opts, c7),
                terms,
            });
            // normalization cap: kappa I - P >= margin
            let cap = SymMatrix::identity(n).scale(opts.kappa);
            let mut terms = Vec::new();
            for (idx, a, b) in entries(pv, &prob) {
                terms.push((idx, sym_basis(n, a, b).scale(-1.0)));
            }
            prob.blocks.push(Block {
                label: BlockLabel::NormCap { mode: i, piece: r },
                dim: n,
                constant: with_margin(opts, cap),
                terms,
            });
        }
    }

    // (8): sum_{s != r} alpha (P_{i,s} - P_{i,r}) - A'P_{i,r} - P_{i,r}A > 0
    for i in 0..nm {
        let a_i = sys.mode(i);
        for r in 0..m {
            let alpha_sum: f64 = (0..m).filter(|&s| s != r).map(|s| mult.alpha(i, r, s)).sum();
            let mut terms: Vec<(usize, SymMatrix)> = Vec::new();
            for (idx, a, b) in entries(vars.p[i][r], &prob) {
                let e = sym_basis(n, a, b);
                let coeff = e
                    .lyap_derivative(a_i)
                    .scale(-1.0)
                    .add_scaled(&e, -alpha_sum);
                terms.push((idx, coeff));
            }
            for s in 0..m {
                if s == r {
                    continue;
                }
                let al = mult.alpha(i, r, s);
                if al == 0.0 {
                    continue;
                }
                for (idx, a, b) in entries(vars.p[i][s], &prob) {
                    terms.push((idx, sym_basis(n, a, b).scale(al)));
                }
            }
            prob.blocks.push(Block {
                label: BlockLabel::Decay { mode: i, piece: r },
                dim: n,
                constant: with_margin(opts, SymMatrix::zeros(n)),
                terms,
            });
        }
    }

    // (9): P_{i,r} + sum_{s != r} gamma (P_{i,s} - P_{i,r}) - Phi' P_{j,q} Phi > 0
    for i in 0..nm {
        let phi = cache.phi(sys, i, tau)?;
        for j in 0..nm {
            if j == i {
                continue;
            }
            for r in 0..m {
                for q in 0..m {
                    let gamma_sum = mult.gamma_row_sum(j, q, i, r);
                    let mut terms: Vec<(usize, SymMatrix)> = Vec::new();
                    for (idx, a, b) in entries(vars.p[i][r], &prob) {
                        terms.push((idx, sym_basis(n, a, b).scale(1.0 - gamma_sum)));
                    }
                    for s in 0..m {
                        if s == r {
                            continue;
                        }
                        let g = mult.gamma(j, q, i, r, s);
                        if g == 0.0 {
                            continue;
                        }
                        for (idx, a, b) in entries(vars.p[i][s], &prob) {
                            terms.push((idx, sym_basis(n, a, b).scale(g)));
                        }
                    }
                    for (idx, a, b) in entries(vars.p[j][q], &prob) {
                        terms.push((idx, sym_basis(n, a, b).congruence(&phi).scale(-1.0)));
                    }
                    prob.blocks.push(Block {
                        label: BlockLabel::Jump {
                            from: i,
                            to: j,
                            piece: r,
                            target_piece: q,
                        },
                        dim: n,
                        constant: with_margin(opts, SymMatrix::zeros(n)),
                        terms,
                    });
                }
            }
        }
    }

    Ok(Assembled {
        problem: prob,
        vars,
    })
}

/// Upper box bound for the alpha multipliers; keeps the scalar feasibility
/// domain compact for the barrier solver.
pub const ALPHA_MAX: f64 = 1e5;

/// Conditions with the pieces fixed: affine in alpha and gamma. The
/// positivity condition is checked directly on the fixed family rather
/// than emitted as a block.
pub fn assemble_fixed_p(
    sys: &SwitchedSystem,
    tau: f64,
    m: usize,
    family: &LyapunovFamily,
    opts: &LmiOptions,
    cache: &mut ExpmCache,
) -> Result<Assembled> {
    check_family_shape(sys, m, family)?;
    for (i, v) in family.modes().iter().enumerate() {
        for (r, p) in v.pieces().iter().enumerate() {
            if !mat::is_pd(p)? {
                return Err(Error::FamilyNotPD { mode: i, piece: r });
            }
        }
    }
    let n = sys.dim();
    let nm = sys.num_modes();
    let mut prob = LmiProblem::new();
    let mut vars = VarMap::default();

    for i in 0..nm {
        for r in 0..m {
            for s in 0..m {
                if s == r {
                    continue;
                }
                let v = prob.add_scalar_var(format!("alpha[{i}][{r}][{s}]"), 0.0, ALPHA_MAX);
                vars.alpha.insert((i, r, s), v);
            }
        }
    }
    for j in 0..nm {
        for q in 0..m {
            for i in 0..nm {
                if i == j {
                    continue;
                }
                for r in 0..m {
                    for s in 0..m {
                        if s == r {
                            continue;
                        }
                        let v = prob.add_scalar_var(
                            format!("gamma[{j}][{q}][{i}][{r}][{s}]"),
                            0.0,
                            1.0 - DELTA_GAMMA,
                        );
                        vars.gamma.insert((j, q, i, r, s), v);
                    }
                }
            }
        }
    }

    for i in 0..nm {
        let a_i = sys.mode(i);
        for r in 0..m {
            let p_r = family.mode(i).piece(r);
            let base = p_r.lyap_derivative(a_i).scale(-1.0);
            let mut terms = Vec::new();
            for s in 0..m {
                if s == r {
                    continue;
                }
                let diff = family.mode(i).piece(s).add_scaled(p_r, -1.0);
                terms.push((prob.scalar_entry(vars.alpha[&(i, r, s)]), diff));
            }
            prob.blocks.push(Block {
                label: BlockLabel::Decay { mode: i, piece: r },
                dim: n,
                constant: with_margin(opts, base),
                terms,
            });
        }
    }

    for i in 0..nm {
        let phi = cache.phi(sys, i, tau)?;
        for j in 0..nm {
            if j == i {
                continue;
            }
            for r in 0..m {
                let p_r = family.mode(i).piece(r);
                for q in 0..m {
                    let base = p_r.add_scaled(&family.mode(j).piece(q).congruence(&phi), -1.0);
                    let mut terms = Vec::new();
                    let mut sum_terms = Vec::new();
                    for s in 0..m {
                        if s == r {
                            continue;
                        }
                        let diff = family.mode(i).piece(s).add_scaled(p_r, -1.0);
                        let idx = prob.scalar_entry(vars.gamma[&(j, q, i, r, s)]);
                        terms.push((idx, diff));
                        sum_terms.push((idx, SymMatrix::diag(&[-1.0])));
                    }
                    prob.blocks.push(Block {
                        label: BlockLabel::Jump {
                            from: i,
                            to: j,
                            piece: r,
                            target_piece: q,
                        },
                        dim: n,
                        constant: with_margin(opts, base),
                        terms,
                    });
                    if !sum_terms.is_empty() {
                        prob.blocks.push(Block {
                            label: BlockLabel::GammaSum {
                                to: j,
                                target_piece: q,
                                from: i,
                                piece: r,
                            },
                            dim: 1,
                            constant: SymMatrix::diag(&[1.0 - DELTA_GAMMA]),
                            terms: sum_terms,
                        });
                    }
                }
            }
        }
    }

    Ok(Assembled {
        problem: prob,
        vars,
    })
}

/// First-order perturbation of the conditions around the iterate
/// `(family, mult)`: variables are delta-P (entrywise trust-region box),
/// delta-alpha and delta-gamma (boxed, and kept inside the multiplier
/// bounds). Products of deltas are dropped.
#[allow(clippy::too_many_arguments)]
pub fn assemble_delta(
    sys: &SwitchedSystem,
    tau: f64,
    m: usize,
    family: &LyapunovFamily,
    mult: &ScalarMultipliers,
    opts: &LmiOptions,
    cache: &mut ExpmCache,
    rho: f64,
    rho_s: f64,
) -> Result<Assembled> {
    check_family_shape(sys, m, family)?;
    check_mult_shape(sys, m, mult)?;
    let n = sys.dim();
    let nm = sys.num_modes();
    let mut prob = LmiProblem::new();
    let mut vars = VarMap::default();

    for i in 0..nm {
        let mut row = Vec::with_capacity(m);
        for r in 0..m {
            // entrywise box of radius rho * ||P||_F / n keeps the Frobenius
            // norm of the step within rho * ||P||_F
            let radius = rho * family.mode(i).piece(r).frobenius_norm() / n as f64;
            row.push(prob.add_sym_var(format!("dP[{i}][{r}]"), n, Some(radius.max(1e-12))));
        }
        vars.p.push(row);
    }
    for i in 0..nm {
        for r in 0..m {
            for s in 0..m {
                if s == r {
                    continue;
                }
                let lo = (-mult.alpha(i, r, s)).max(-rho_s);
                let v = prob.add_scalar_var(format!("dAlpha[{i}][{r}][{s}]"), lo, rho_s);
                vars.alpha.insert((i, r, s), v);
            }
        }
    }
    for j in 0..nm {
        for q in 0..m {
            for i in 0..nm {
                if i == j {
                    continue;
                }
                for r in 0..m {
                    for s in 0..m {
                        if s == r {
                            continue;
                        }
                        let lo = (-mult.gamma(j, q, i, r, s)).max(-rho_s);
                        let v =
                            prob.add_scalar_var(format!("dGamma[{j}][{q}][{i}][{r}][{s}]"), lo, rho_s);
                        vars.gamma.insert((j, q, i, r, s), v);
                    }
                }
            }
        }
    }

    let entries = |v: usize, prob: &LmiProblem| -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for i in 0..n {
            for j in i..n {
                out.push((prob.sym_entry(v, i, j), i, j));
            }
        }
        out
    };

    for i in 0..nm {
        for r in 0..m {
            let p_r = family.mode(i).piece(r);
            // (7): P + dP - eps_norm I
            let c7 = p_r.add_scaled(&SymMatrix::identity(n), -opts.eps_norm);
            let mut terms = Vec::new();
            for (idx, a, b) in entries(vars.p[i][r], &prob) {
                terms.push((idx, sym_basis(n, a, b)));
            }
            prob.blocks.push(Block {
                label: BlockLabel::Pd { mode: i, piece: r },
                dim: n,
                constant: with_margin(opts, c7),
                terms,
            });
            // cap: kappa I - P - dP
            let cap = SymMatrix::identity(n).scale(opts.kappa).add_scaled(p_r, -1.0);
            let mut terms = Vec::new();
            for (idx, a, b) in entries(vars.p[i][r], &prob) {
                terms.push((idx, sym_basis(n, a, b).scale(-1.0)));
            }
            prob.blocks.push(Block {
                label: BlockLabel::NormCap { mode: i, piece: r },
                dim: n,
                constant: with_margin(opts, cap),
                terms,
            });
        }
    }

    // (8) linearized
    for i in 0..nm {
        let a_i = sys.mode(i);
        for r in 0..m {
            let p_r = family.mode(i).piece(r);
            let alpha_sum: f64 = (0..m).filter(|&s| s != r).map(|s| mult.alpha(i, r, s)).sum();
            let mut base = p_r.lyap_derivative(a_i).scale(-1.0);
            for s in 0..m {
                if s == r {
                    continue;
                }
                let diff = family.mode(i).piece(s).add_scaled(p_r, -1.0);
                base = base.add_scaled(&diff, mult.alpha(i, r, s));
            }
            let mut terms: Vec<(usize, SymMatrix)> = Vec::new();
            for (idx, a, b) in entries(vars.p[i][r], &prob) {
                let e = sym_basis(n, a, b);
                terms.push((idx, e.lyap_derivative(a_i).scale(-1.0).add_scaled(&e, -alpha_sum)));
            }
            for s in 0..m {
                if s == r {
                    continue;
                }
                let al = mult.alpha(i, r, s);
                if al != 0.0 {
                    for (idx, a, b) in entries(vars.p[i][s], &prob) {
                        terms.push((idx, sym_basis(n, a, b).scale(al)));
                    }
                }
                let diff = family.mode(i).piece(s).add_scaled(p_r, -1.0);
                terms.push((prob.scalar_entry(vars.alpha[&(i, r, s)]), diff));
            }
            prob.blocks.push(Block {
                label: BlockLabel::Decay { mode: i, piece: r },
                dim: n,
                constant: with_margin(opts, base),
                terms,
            });
        }
    }

    // (9) linearized
    for i in 0..nm {
        let phi = cache.phi(sys, i, tau)?;
        for j in 0..nm {
            if j == i {
                continue;
            }
            for r in 0..m {
                let p_r = family.mode(i).piece(r);
                for q in 0..m {
                    let gamma_sum = mult.gamma_row_sum(j, q, i, r);
                    let mut base =
                        p_r.add_scaled(&family.mode(j).piece(q).congruence(&phi), -1.0);
                    for s in 0..m {
                        if s == r {
                            continue;
                        }
                        let diff = family.mode(i).piece(s).add_scaled(p_r, -1.0);
                        base = base.add_scaled(&diff, mult.gamma(j, q, i, r, s));
                    }
                    let mut terms: Vec<(usize, SymMatrix)> = Vec::new();
                    let mut sum_terms = Vec::new();
                    for (idx, a, b) in entries(vars.p[i][r], &prob) {
                        terms.push((idx, sym_basis(n, a, b).scale(1.0 - gamma_sum)));
                    }
                    for s in 0..m {
                        if s == r {
                            continue;
                        }
                        let g = mult.gamma(j, q, i, r, s);
                        if g != 0.0 {
                            for (idx, a, b) in entries(vars.p[i][s], &prob) {
                                terms.push((idx, sym_basis(n, a, b).scale(g)));
                            }
                        }
                        let diff = family.mode(i).piece(s).add_scaled(p_r, -1.0);
                        let gv = prob.scalar_entry(vars.gamma[&(j, q, i, r, s)]);
                        terms.push((gv, diff));
                        sum_terms.push((gv, SymMatrix::diag(&[-1.0])));
                    }
                    for (idx, a, b) in entries(vars.p[j][q], &prob) {
                        terms.push((idx, sym_basis(n, a, b).congruence(&phi).scale(-1.0)));
                    }
                    prob.blocks.push(Block {
                        label: BlockLabel::Jump {
                            from: i,
                            to: j,
                            piece: r,
                            target_piece: q,
                        },
                        dim: n,
                        constant: with_margin(opts, base),
                        terms,
                    });
                    if !sum_terms.is_empty() {
                        prob.blocks.push(Block {
                            label: BlockLabel::GammaSum {
                                to: j,
                                target_piece: q,
                                from: i,
                                piece: r,
                            },
                            dim: 1,
                            constant: SymMatrix::diag(&[1.0 - DELTA_GAMMA - gamma_sum]),
                            terms: sum_terms,
                        });
                    }
                }
            }
        }
    }

    Ok(Assembled {
        problem: prob,
        vars,
    })
}

fn check_family_shape(sys: &SwitchedSystem, m: usize, family: &LyapunovFamily) -> Result<()> {
    if family.num_modes() != sys.num_modes()
        || family.dim() != sys.dim()
        || family.pieces_per_mode() != m
    {
        return Err(Error::ShapeMismatch(format!(
            "family is ({} modes, {} pieces, n={}), system needs ({}, {m}, n={})",
            family.num_modes(),
            family.pieces_per_mode(),
            family.dim(),
            sys.num_modes(),
            sys.dim()
        )));
    }
    Ok(())
}

/// Solver provenance carried inside a certificate.
#[derive(Debug, Clone, Default)]
pub struct Provenance {
    pub solver_iterations: u64,
    pub wall_ms: u64,
    pub eps: f64,
    pub tau_tol: f64,
}

/// Worst eigenvalue slack per condition class.
#[derive(Debug, Clone, Copy, Default)]
pub struct Margins {
    pub pd: f64,
    pub decay: f64,
    pub jump: f64,
}

impl Margins {
    pub fn worst(&self) -> f64 {
        self.pd.min(self.decay).min(self.jump)
    }
}

/// Checkable stability witness: dwell time, pieces, multipliers and the
/// verification margins they achieve.
#[derive(Debug, Clone)]
pub struct Certificate {
    pub tau: f64,
    pub m: usize,
    pub family: LyapunovFamily,
    pub multipliers: ScalarMultipliers,
    pub margins: Margins,
    pub provenance: Provenance,
}

impl Certificate {
    /// Lemma-style piece duplication: append a copy of the last piece of
    /// every mode and zero-extend the multipliers.
    pub fn duplicated_last_piece(&self) -> Result<Certificate> {
        let mut modes = Vec::new();
        for v in self.family.modes() {
            let mut pieces = v.pieces().to_vec();
            pieces.push(pieces[pieces.len() - 1].clone());
            modes.push(PiecewiseQuadratic::new_unchecked(pieces));
        }
        Ok(Certificate {
            tau: self.tau,
            m: self.m + 1,
            family: LyapunovFamily::new(modes)?,
            multipliers: self.multipliers.zero_extended(),
            margins: self.margins,
            provenance: self.provenance.clone(),
        })
    }
}

/// Report from solver-independent certificate verification.
#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub margins: Margins,
    pub multipliers_ok: bool,
    pub mc_samples: usize,
    pub mc_failures: usize,
    /// Condition class of the worst margin ("7", "8" or "9").
    pub worst_condition: String,
    pub pass: bool,
}

/// Number of unit-sphere samples for the Monte-Carlo spot check.
pub const MC_SAMPLES: usize = 10_000;

/// Re-checks the certificate by direct eigenvalue computation and a
/// Monte-Carlo spot check of the pointwise stability conditions. Never
/// consults the feasibility oracle. The Monte-Carlo strictness check is
/// only meaningful for eps > 0; with a relaxed (non-positive) eps, the
/// eigenvalue margins alone decide.
pub fn verify_certificate(
    sys: &SwitchedSystem,
    cert: &Certificate,
    eps: f64,
) -> Result<VerificationReport> {
    let n = sys.dim();
    let nm = sys.num_modes();
    let m = cert.m;
    if cert.family.num_modes() != nm || cert.family.dim() != n || cert.family.pieces_per_mode() != m
    {
        return Err(Error::ShapeMismatch("certificate does not match system".into()));
    }
    check_mult_shape(sys, m, &cert.multipliers)?;

    let mut margins = Margins {
        pd: f64::INFINITY,
        decay: f64::INFINITY,
        jump: f64::INFINITY,
    };
    let mut cache = ExpmCache::new();

    for i in 0..nm {
        let a_i = sys.mode(i);
        for r in 0..m {
            let p_r = cert.family.mode(i).piece(r);
            margins.pd = margins.pd.min(mat::min_eigenvalue(p_r)?);
            let mut decay = p_r.lyap_derivative(a_i).scale(-1.0);
            for s in 0..m {
                if s == r {
                    continue;
                }
                let diff = cert.family.mode(i).piece(s).add_scaled(p_r, -1.0);
                decay = decay.add_scaled(&diff, cert.multipliers.alpha(i, r, s));
            }
            margins.decay = margins.decay.min(mat::min_eigenvalue(&decay)?);
        }
    }
    if nm == 1 {
        margins.jump = f64::INFINITY;
    }
    for i in 0..nm {
        let phi = cache.phi(sys, i, cert.tau)?;
        for j in 0..nm {
            if j == i {
                continue;
            }
            for r in 0..m {
                let p_r = cert.family.mode(i).piece(r);
                for q in 0..m {
                    let mut jump =
                        p_r.add_scaled(&cert.family.mode(j).piece(q).congruence(&phi), -1.0);
                    for s in 0..m {
                        if s == r {
                            continue;
                        }
                        let diff = cert.family.mode(i).piece(s).add_scaled(p_r, -1.0);
                        jump = jump.add_scaled(&diff, cert.multipliers.gamma(j, q, i, r, s));
                    }
                    margins.jump = margins.jump.min(mat::min_eigenvalue(&jump)?);
                }
            }
        }
    }

    let multipliers_ok = cert.multipliers.validate();

    // Monte-Carlo spot check of the pointwise conditions on the unit sphere.
    let mut mc_failures = 0usize;
    let mut mc_samples = 0usize;
    if eps > 0.0 {
        let mut rng = Rng::new(0x5eed_cafe);
        for _ in 0..MC_SAMPLES {
            let x = rng.unit_vector(n);
            mc_samples += 1;
            let mut ok = true;
            for i in 0..nm {
                let vi = cert.family.mode(i);
                let val = lyapunov::eval_vmax(vi, &x)?;
                if val <= 0.0 {
                    ok = false;
                    break;
                }
                if lyapunov::directional_derivative(vi, sys.mode(i), &x)? >= 0.0 {
                    ok = false;
                    break;
                }
                let phi = cache.phi(sys, i, cert.tau)?;
                let mapped = phi.mul_vec(&x);
                for j in 0..nm {
                    if j == i {
                        continue;
                    }
                    if lyapunov::eval_vmax(cert.family.mode(j), &mapped)? >= val {
                        ok = false;
                        break;
                    }
                }
                if !ok {
                    break;
                }
            }
            if !ok {
                mc_failures += 1;
            }
        }
    }

    let worst_condition = if margins.pd <= margins.decay && margins.pd <= margins.jump {
        "7"
    } else if margins.decay <= margins.jump {
        "8"
    } else {
        "9"
    };

    let pass = margins.worst() >= eps && multipliers_ok && mc_failures == 0;
    Ok(VerificationReport {
        margins,
        multipliers_ok,
        mc_samples,
        mc_failures,
        worst_condition: worst_condition.into(),
        pass,
    })
}
