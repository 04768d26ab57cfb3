//! Top-level synthesis loop: LMI baseline with one quadratic per mode,
//! path-following refinement at fixed dwell time, bisection on the dwell
//! time, and escalation of the piece count with warm starts.
//!
//! "Infeasible" below a given dwell time always means "the heuristic found
//! no certificate", never a proof of infeasibility; the conditions are
//! sufficient only.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::lmi::{
    self, assemble_delta, assemble_fixed_scalars, Assembled, Certificate, ExpmCache, LmiOptions,
    Margins, Provenance, ScalarMultipliers, SwitchedSystem,
};
use crate::lyapunov::{LyapunovFamily, PiecewiseQuadratic};
use crate::mat::{self, SymMatrix};
use crate::rng::Rng;
use crate::solver::{self, Feasibility, Status};

/// Wall-clock source injected by the caller; the library itself has no
/// notion of time.
pub trait Clock {
    fn now_ms(&self) -> u64;
}

/// Clock that always reads zero, for callers that do not track time.
impl Clock for () {
    fn now_ms(&self) -> u64 {
        0
    }
}

#[derive(Debug, Clone)]
pub struct CertifierConfig {
    /// Bisection width target on the dwell time.
    pub tau_tol: f64,
    /// Escalation cap on the piece count.
    pub m_max: usize,
    /// Path-following iteration cap per dwell-time probe.
    pub pf_max_iters: usize,
    /// Minimum relative margin improvement to keep iterating.
    pub pf_stall: f64,
    /// Trust-region radius for the matrix step, relative to each piece.
    pub trust_region: f64,
    /// Trust-region radius for the scalar steps.
    pub trust_region_scalar: f64,
    pub rng_seed: u64,
    /// Feasibility margin demanded from the oracle and verification.
    pub eps: f64,
    pub lmi: LmiOptions,
}

impl Default for CertifierConfig {
    fn default() -> Self {
        CertifierConfig {
            tau_tol: 1e-4,
            m_max: 8,
            pf_max_iters: 50,
            pf_stall: 1e-4,
            trust_region: 0.2,
            trust_region_scalar: 0.5,
            rng_seed: 1,
            eps: 1e-7,
            lmi: LmiOptions::default(),
        }
    }
}

/// Cap on the doubling search for an initial feasible dwell time.
pub const TAU_DOUBLING_CAP: f64 = 1024.0;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StopReason {
    /// Successive bounds agreed to within `tau_tol`.
    Converged,
    /// Piece-count cap reached.
    MMaxReached,
    /// No feasible dwell time at or below the doubling cap.
    NoUpperBound,
}

#[derive(Debug, Clone)]
pub struct EscalationEntry {
    pub m: usize,
    /// Reported bound: the best (smallest) certified dwell time over all
    /// piece counts up to `m`, so the sequence is non-increasing.
    pub tau: f64,
    /// Raw outcome of the bisection at exactly this piece count.
    pub raw_tau: f64,
    pub certificate: Certificate,
    pub solver_iterations: u64,
    pub wall_ms: u64,
}

#[derive(Debug, Clone)]
pub struct EscalationReport {
    pub entries: Vec<EscalationEntry>,
    pub stop: StopReason,
    /// Final bound estimate (last reported tau).
    pub final_tau: f64,
    /// Independent lower bound on the minimum dwell time from the
    /// cycle-product spectral-radius oracle.
    pub lower_bound: f64,
}

/// Outcome of a bisection run at a fixed piece count.
#[derive(Debug, Clone)]
pub enum BisectOutcome {
    Found { tau: f64, certificate: Certificate },
    NoUpperBound,
}

/// Pure LMI feasibility with one quadratic per mode (no scalars, no
/// path-following): the baseline the refinement starts from.
pub fn solve_m1(sys: &SwitchedSystem, tau: f64, cfg: &CertifierConfig) -> Result<Feasibility> {
    let mut cache = ExpmCache::new();
    solve_m1_cached(sys, tau, cfg, &mut cache, None)
}

fn solve_m1_cached(
    sys: &SwitchedSystem,
    tau: f64,
    cfg: &CertifierConfig,
    cache: &mut ExpmCache,
    warm: Option<&[f64]>,
) -> Result<Feasibility> {
    let mult = ScalarMultipliers::zeros(sys.num_modes(), 1);
    let asm = assemble_fixed_scalars(sys, tau, 1, &mult, &cfg.lmi, cache)?;
    solver::solve_feasibility_from(&asm.problem, cfg.eps, warm)
}

fn flatten_family(asm: &Assembled, family: &LyapunovFamily) -> Vec<f64> {
    let mut y = alloc::vec![0.0f64; asm.problem.num_scalars];
    for (i, row) in asm.vars.p.iter().enumerate() {
        for (r, &var) in row.iter().enumerate() {
            let p = family.mode(i).piece(r);
            for a in 0..p.dim() {
                for b in a..p.dim() {
                    y[asm.problem.sym_entry(var, a, b)] = p.get(a, b);
                }
            }
        }
    }
    y
}

fn extract_family(asm: &Assembled, y: &[f64]) -> Result<LyapunovFamily> {
    let mut modes = Vec::new();
    for row in &asm.vars.p {
        let pieces: Vec<SymMatrix> = row.iter().map(|&v| asm.problem.sym_value(v, y)).collect();
        modes.push(PiecewiseQuadratic::new_unchecked(pieces));
    }
    LyapunovFamily::new(modes)
}

/// Duplicate pieces of `cert` until every mode has `m`, applying seeded
/// multiplicative perturbations so the copies are not exact duplicates
/// (exact copies make the delta step degenerate).
fn inflate_to_m(cert: &Certificate, m: usize, rng: &mut Rng) -> Result<(LyapunovFamily, ScalarMultipliers)> {
    let mut cur = cert.clone();
    while cur.m < m {
        cur = cur.duplicated_last_piece()?;
    }
    let mut modes = Vec::new();
    for v in cur.family.modes() {
        let mut pieces = Vec::new();
        for (r, p) in v.pieces().iter().enumerate() {
            let mut pp = p.clone();
            if r >= cert.m {
                // perturb only the duplicated copies
                let n = pp.dim();
                for a in 0..n {
                    for b in a..n {
                        let v = pp.get(a, b) * (1.0 + 1e-3 * rng.next_signed());
                        pp.set_sym(a, b, v);
                    }
                }
            }
            pieces.push(pp);
        }
        modes.push(PiecewiseQuadratic::new_unchecked(pieces));
    }
    Ok((LyapunovFamily::new(modes)?, cur.multipliers))
}

fn build_certificate(
    sys: &SwitchedSystem,
    tau: f64,
    m: usize,
    family: LyapunovFamily,
    multipliers: ScalarMultipliers,
    cfg: &CertifierConfig,
    iterations: u64,
) -> Result<Option<Certificate>> {
    let mut cert = Certificate {
        tau,
        m,
        family,
        multipliers,
        margins: Margins::default(),
        provenance: Provenance {
            solver_iterations: iterations,
            wall_ms: 0,
            eps: cfg.eps,
            tau_tol: cfg.tau_tol,
        },
    };
    let report = lmi::verify_certificate(sys, &cert, cfg.eps)?;
    if !report.pass {
        return Ok(None);
    }
    cert.margins = report.margins;
    Ok(Some(cert))
}

/// Clamp updated multipliers back into their bounds, rescaling gamma rows
/// whose sum would exceed the headroom.
fn project_multipliers(mult: &mut ScalarMultipliers) {
    let nm = mult.num_modes();
    let m = mult.pieces();
    for i in 0..nm {
        for r in 0..m {
            for s in 0..m {
                if s != r {
                    let v = mult.alpha(i, r, s).clamp(0.0, lmi::ALPHA_MAX);
                    mult.set_alpha(i, r, s, v);
                }
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
                        if s != r {
                            let v = mult.gamma(j, q, i, r, s).max(0.0);
                            mult.set_gamma(j, q, i, r, s, v);
                        }
                    }
                    let sum = mult.gamma_row_sum(j, q, i, r);
                    let cap = 1.0 - lmi::DELTA_GAMMA;
                    if sum > cap {
                        let scale = cap / sum;
                        for s in 0..m {
                            if s != r {
                                let v = mult.gamma(j, q, i, r, s) * scale;
                                mult.set_gamma(j, q, i, r, s, v);
                            }
                        }
                    }
                }
            }
        }
    }
}

/// Path-following probe: does a certificate with `m` pieces exist at `tau`?
/// Alternates a first-order delta step in all variables (updating only the
/// scalars) with a fixed-scalar LMI re-solve for fresh pieces. A `None`
/// result is a legitimate heuristic failure, not a proof of infeasibility.
pub fn check_tau_feasible(
    sys: &SwitchedSystem,
    tau: f64,
    m: usize,
    warm: Option<&Certificate>,
    cfg: &CertifierConfig,
) -> Result<Option<Certificate>> {
    let mut cache = ExpmCache::new();
    let mut iters = 0u64;
    check_tau_feasible_cached(sys, tau, m, warm, cfg, &mut cache, &mut iters)
}

fn check_tau_feasible_cached(
    sys: &SwitchedSystem,
    tau: f64,
    m: usize,
    warm: Option<&Certificate>,
    cfg: &CertifierConfig,
    cache: &mut ExpmCache,
    iterations: &mut u64,
) -> Result<Option<Certificate>> {
    if m == 1 {
        let warm_y = warm.and_then(|c| {
            if c.m == 1 {
                let mult = ScalarMultipliers::zeros(sys.num_modes(), 1);
                let asm = assemble_fixed_scalars(sys, tau, 1, &mult, &cfg.lmi, cache).ok()?;
                Some(flatten_family(&asm, &c.family))
            } else {
                None
            }
        });
        let mult = ScalarMultipliers::zeros(sys.num_modes(), 1);
        let asm = assemble_fixed_scalars(sys, tau, 1, &mult, &cfg.lmi, cache)?;
        let f = solver::solve_feasibility_from(&asm.problem, cfg.eps, warm_y.as_deref())?;
        *iterations += f.iterations;
        if f.status != Status::Feasible {
            return Ok(None);
        }
        let family = extract_family(&asm, &f.assignment)?;
        return build_certificate(sys, tau, m, family, mult, cfg, *iterations);
    }

    let mut rng = Rng::new(cfg.rng_seed ^ (tau.to_bits().rotate_left(17)) ^ (m as u64));

    // initial iterate: warm certificate inflated to m pieces, or the m = 1
    // baseline at an inflated dwell time
    let (mut family, mut mult) = match warm {
        Some(c) if c.m <= m => inflate_to_m(c, m, &mut rng)?,
        _ => {
            let mut base = None;
            let mut tau_try = (tau * 1.5).max(tau + 0.5);
            while tau_try <= TAU_DOUBLING_CAP {
                if let Some(c) =
                    check_tau_feasible_cached(sys, tau_try, 1, None, cfg, cache, iterations)?
                {
                    base = Some(c);
                    break;
                }
                tau_try *= 2.0;
            }
            match base {
                Some(c) => inflate_to_m(&c, m, &mut rng)?,
                None => return Ok(None),
            }
        }
    };
    if mult.pieces() != m {
        mult = ScalarMultipliers::zeros(sys.num_modes(), m);
    }

    // margin of the current scalars: fixed-scalar LMI re-solve
    let resolve = |mult: &ScalarMultipliers,
                   family: &LyapunovFamily,
                   cache: &mut ExpmCache,
                   iterations: &mut u64|
     -> Result<(LyapunovFamily, f64)> {
        let asm = assemble_fixed_scalars(sys, tau, m, mult, &cfg.lmi, cache)?;
        let warm_y = flatten_family(&asm, family);
        let f = solver::solve_feasibility_from(&asm.problem, cfg.eps, Some(&warm_y))?;
        *iterations += f.iterations;
        if f.status == Status::Inconclusive {
            return Err(Error::SolverFailure("inconclusive LMI re-solve".into()));
        }
        Ok((extract_family(&asm, &f.assignment)?, f.objective))
    };

    let (fam0, mut t_cur) = resolve(&mult, &family, cache, iterations)?;
    family = fam0;
    if t_cur <= -cfg.eps {
        if let Some(c) =
            build_certificate(sys, tau, m, family.clone(), mult.clone(), cfg, *iterations)?
        {
            return Ok(Some(c));
        }
    }

    let mut stall_count = 0usize;
    for _iter in 0..cfg.pf_max_iters {
        let mut rho = cfg.trust_region;
        let mut rho_s = cfg.trust_region_scalar;
        let mut accepted = false;
        for _attempt in 0..5 {
            let asm = assemble_delta(sys, tau, m, &family, &mult, &cfg.lmi, cache, rho, rho_s)?;
            let f = solver::solve_feasibility_from(&asm.problem, cfg.eps, None)?;
            *iterations += f.iterations;
            if f.status == Status::Inconclusive {
                rho *= 0.5;
                rho_s *= 0.5;
                continue;
            }
            // take only the scalar part of the step; pieces come fresh
            // from the LMI re-solve below
            let mut mult_new = mult.clone();
            for (&(i, r, s), &var) in &asm.vars.alpha {
                let d = f.assignment[asm.problem.scalar_entry(var)];
                mult_new.set_alpha(i, r, s, mult.alpha(i, r, s) + d);
            }
            for (&(j, q, i, r, s), &var) in &asm.vars.gamma {
                let d = f.assignment[asm.problem.scalar_entry(var)];
                mult_new.set_gamma(j, q, i, r, s, mult.gamma(j, q, i, r, s) + d);
            }
            project_multipliers(&mut mult_new);

            let (fam_new, t_new) = resolve(&mult_new, &family, cache, iterations)?;
            if -t_new >= -t_cur - cfg.pf_stall * t_cur.abs().max(1.0) {
                let improvement = t_cur - t_new;
                if improvement < cfg.pf_stall * t_cur.abs().max(1.0) {
                    stall_count += 1;
                } else {
                    stall_count = 0;
                }
                mult = mult_new;
                family = fam_new;
                t_cur = t_new;
                accepted = true;
                break;
            }
            rho *= 0.5;
            rho_s *= 0.5;
        }
        if t_cur <= -cfg.eps {
            if let Some(c) =
                build_certificate(sys, tau, m, family.clone(), mult.clone(), cfg, *iterations)?
            {
                return Ok(Some(c));
            }
        }
        if !accepted || stall_count >= 3 {
            return Ok(None);
        }
    }
    Ok(None)
}

/// Bisection on the dwell time at a fixed piece count. Maintains the
/// bracket invariant: the upper end always carries a verified certificate.
pub fn bisect_tau(
    sys: &SwitchedSystem,
    m: usize,
    cfg: &CertifierConfig,
    warm_chain: bool,
) -> Result<BisectOutcome> {
    let mut cache = ExpmCache::new();
    let mut iters = 0u64;
    bisect_tau_inner(sys, m, cfg, warm_chain, None, 0.0, &mut cache, &mut iters)
}

#[allow(clippy::too_many_arguments)]
fn bisect_tau_inner(
    sys: &SwitchedSystem,
    m: usize,
    cfg: &CertifierConfig,
    warm_chain: bool,
    warm: Option<&Certificate>,
    tau_lo_hint: f64,
    cache: &mut ExpmCache,
    iterations: &mut u64,
) -> Result<BisectOutcome> {
    // establish a feasible upper end
    let (mut tau_hi, mut best) = match warm {
        Some(c) => (c.tau, c.clone()),
        None => {
            let mut found = None;
            let mut tau = 1.0f64;
            while tau <= TAU_DOUBLING_CAP {
                if let Some(c) =
                    check_tau_feasible_cached(sys, tau, m, None, cfg, cache, iterations)?
                {
                    found = Some((tau, c));
                    break;
                }
                tau *= 2.0;
            }
            match found {
                Some(x) => x,
                None => return Ok(BisectOutcome::NoUpperBound),
            }
        }
    };

    let mut tau_lo = tau_lo_hint.clamp(0.0, tau_hi);
    while tau_hi - tau_lo > cfg.tau_tol {
        let mid = 0.5 * (tau_lo + tau_hi);
        let warm_cert: Option<&Certificate> = if warm_chain { Some(&best) } else { None };
        match check_tau_feasible_cached(sys, mid, m, warm_cert, cfg, cache, iterations)?
        {
            Some(c) => {
                tau_hi = mid;
                best = c;
            }
            None => tau_lo = mid,
        }
    }
    Ok(BisectOutcome::Found {
        tau: tau_hi,
        certificate: best,
    })
}

/// Full escalation: bisect at m = 1, 2, ..., warm-starting each round from
/// the best certificate so far, until the bound stops improving or the cap
/// is reached.
pub fn escalate_m(
    sys: &SwitchedSystem,
    cfg: &CertifierConfig,
    clock: &dyn Clock,
) -> Result<EscalationReport> {
    let lower_bound = dwell_lower_bound(sys, cfg.tau_tol)?;
    let mut cache = ExpmCache::new();
    let mut entries: Vec<EscalationEntry> = Vec::new();
    let mut best: Option<Certificate> = None;
    let mut stop = StopReason::MMaxReached;

    for m in 1..=cfg.m_max {
        let started = clock.now_ms();
        let mut iterations = 0u64;
        let tau_lo_hint = (lower_bound - cfg.tau_tol).max(0.0);
        let outcome = bisect_tau_inner(
            sys,
            m,
            cfg,
            true,
            best.as_ref().filter(|c| c.m <= m),
            tau_lo_hint,
            &mut cache,
            &mut iterations,
        )?;
        let (raw_tau, cert) = match outcome {
            BisectOutcome::Found { tau, certificate } => (tau, certificate),
            BisectOutcome::NoUpperBound => {
                stop = StopReason::NoUpperBound;
                break;
            }
        };
        let prev_reported = entries.last().map(|e| e.tau);
        let reported = match prev_reported {
            Some(p) => p.min(raw_tau),
            None => raw_tau,
        };
        // carry the certificate matching the reported bound
        let reported_cert = if raw_tau <= reported {
            cert.clone()
        } else {
            entries.last().unwrap().certificate.clone()
        };
        if best.as_ref().map(|b| raw_tau < b.tau).unwrap_or(true) {
            best = Some(cert);
        }
        entries.push(EscalationEntry {
            m,
            tau: reported,
            raw_tau,
            certificate: reported_cert,
            solver_iterations: iterations,
            wall_ms: clock.now_ms().saturating_sub(started),
        });
        if reported <= cfg.tau_tol {
            stop = StopReason::Converged;
            break;
        }
        if let Some(p) = prev_reported {
            if (p - reported).abs() <= cfg.tau_tol {
                stop = StopReason::Converged;
                break;
            }
        }
    }

    let final_tau = entries.last().map(|e| e.tau).unwrap_or(f64::INFINITY);
    Ok(EscalationReport {
        entries,
        stop,
        final_tau,
        lower_bound,
    })
}

/// Independent lower bound on the minimum dwell time. A periodic schedule
/// that dwells t_k >= tau in each mode is admissible, and the system
/// cannot be asymptotically stable while the cycle product
/// prod_k expm(A_k, t_k) has spectral radius >= 1. For each cyclic mode
/// order the per-mode dwell times are maximized by coordinate ascent
/// (equal dwell alone is not tight: the worst schedule often lingers in a
/// slowly decaying mode), then the largest tau with an unstable cycle is
/// located by scan plus bisection.
///
/// The returned value always sits on the "radius >= 1" side of a bracket
/// of width at most `tau_tol`, so it is a valid lower bound even if the
/// worst radius crosses 1 more than once.
pub fn dwell_lower_bound(sys: &SwitchedSystem, tau_tol: f64) -> Result<f64> {
    let nm = sys.num_modes();
    if nm < 2 {
        return Ok(0.0);
    }
    let mut best = 0.0f64;
    let mut cache = ExpmCache::new();
    for order in cyclic_orders(nm) {
        // extra-dwell horizon per mode: long enough that further dwell
        // only shrinks the product
        let mut dmax = Vec::with_capacity(order.len());
        for &i in &order {
            let mut d = 1.0f64;
            while d < TAU_DOUBLING_CAP && mat::expm(sys.mode(i), d)?.one_norm() > 1e-2 {
                d *= 2.0;
            }
            dmax.push(d);
        }

        let unstable = |tau: f64, cache: &mut ExpmCache| -> Result<bool> {
            Ok(cycle_rho_max(sys, &order, tau, &dmax, cache)? >= 1.0)
        };

        // window: past this point even the worst cycle decays safely
        let mut tau_hi = 1.0f64;
        let mut found = false;
        while tau_hi <= TAU_DOUBLING_CAP {
            if cycle_rho_max(sys, &order, tau_hi, &dmax, &mut cache)? < 0.5 {
                found = true;
                break;
            }
            tau_hi *= 2.0;
        }
        if !found {
            continue;
        }
        // scan for the last unstable point, then bisect
        let mut tau_lo = 0.0f64;
        let grid = 256;
        for k in (0..grid).rev() {
            let tau = tau_hi * k as f64 / grid as f64;
            if unstable(tau, &mut cache)? {
                tau_lo = tau;
                tau_hi = tau_hi * (k + 1) as f64 / grid as f64;
                break;
            }
        }
        while tau_hi - tau_lo > tau_tol.min(1e-4) {
            let mid = 0.5 * (tau_lo + tau_hi);
            if unstable(mid, &mut cache)? {
                tau_lo = mid;
            } else {
                tau_hi = mid;
            }
        }
        best = best.max(tau_lo);
    }
    Ok(best)
}

/// Worst-case spectral radius of one cycle at base dwell `tau`: maximizes
/// over per-mode extra dwell d_k in [0, dmax_k] by coordinate ascent with
/// a coarse grid and a local ternary refinement. Deterministic.
fn cycle_rho_max(
    sys: &SwitchedSystem,
    order: &[usize],
    tau: f64,
    dmax: &[f64],
    cache: &mut ExpmCache,
) -> Result<f64> {
    let k = order.len();
    let rho_at = |d: &[f64], cache: &mut ExpmCache| -> Result<f64> {
        let mut prod = cache.phi(sys, order[0], tau + d[0])?;
        for (idx, &i) in order.iter().enumerate().skip(1) {
            prod = cache.phi(sys, i, tau + d[idx])?.mul(&prod);
        }
        mat::spectral_radius(&prod)
    };
    let mut d = alloc::vec![0.0f64; k];
    let mut best = rho_at(&d, cache)?;
    for _pass in 0..3 {
        for idx in 0..k {
            const GRID: usize = 48;
            let cell = dmax[idx] / GRID as f64;
            let mut arg = d[idx];
            for g in 0..=GRID {
                let cand = cell * g as f64;
                d[idx] = cand;
                let r = rho_at(&d, cache)?;
                if r > best {
                    best = r;
                    arg = cand;
                }
            }
            // ternary refinement around the best coarse point
            let mut lo = (arg - cell).max(0.0);
            let mut hi = (arg + cell).min(dmax[idx]);
            for _ in 0..40 {
                let m1 = lo + (hi - lo) / 3.0;
                let m2 = hi - (hi - lo) / 3.0;
                d[idx] = m1;
                let r1 = rho_at(&d, cache)?;
                d[idx] = m2;
                let r2 = rho_at(&d, cache)?;
                if r1 > r2 {
                    hi = m2;
                } else {
                    lo = m1;
                }
                let r = r1.max(r2);
                if r > best {
                    best = r;
                    arg = if r1 > r2 { m1 } else { m2 };
                }
            }
            d[idx] = arg;
        }
    }
    Ok(best)
}

/// All cyclic orders of every subset of size >= 2, canonicalized so the
/// smallest index comes first.
fn cyclic_orders(nm: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    // subsets by bitmask
    for mask in 0u32..(1u32 << nm) {
        let members: Vec<usize> = (0..nm).filter(|&i| mask & (1 << i) != 0).collect();
        if members.len() < 2 {
            continue;
        }
        // permutations of members[1..] appended after the fixed first member
        let head = members[0];
        let rest: Vec<usize> = members[1..].to_vec();
        permute(&rest, &mut Vec::new(), &mut |perm| {
            let mut order = Vec::with_capacity(members.len());
            order.push(head);
            order.extend_from_slice(perm);
            out.push(order);
        });
    }
    out
}

fn permute(rest: &[usize], acc: &mut Vec<usize>, visit: &mut dyn FnMut(&[usize])) {
    if rest.is_empty() {
        visit(acc);
        return;
    }
    for (k, &v) in rest.iter().enumerate() {
        let mut next: Vec<usize> = rest.to_vec();
        next.remove(k);
        acc.push(v);
        permute(&next, acc, visit);
        acc.pop();
    }
}

/// Human-readable stop reason for reports.
pub fn stop_reason_str(stop: &StopReason) -> String {
    match stop {
        StopReason::Converged => "converged".into(),
        StopReason::MMaxReached => "m_max".into(),
        StopReason::NoUpperBound => "no_upper_bound".into(),
    }
}
