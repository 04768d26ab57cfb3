use dwellcert_core::certifier::{self, CertifierConfig};
use dwellcert_core::lmi::{self, ExpmCache, ScalarMultipliers, SwitchedSystem};
use dwellcert_core::lyapunov::{LyapunovFamily, PiecewiseQuadratic};
use dwellcert_core::mat::SquareMatrix;
use dwellcert_core::solver::{self, Status};

fn paper_system() -> SwitchedSystem {
    let a1 = SquareMatrix::from_rows(&[&[0.0, 1.0], &[-10.0, -1.0]]).unwrap();
    let a2 = SquareMatrix::from_rows(&[&[0.0, 1.0], &[-0.1, -0.5]]).unwrap();
    SwitchedSystem::new(vec![a1, a2], None).unwrap()
}

#[test]
fn probe_pf_m2() {
    let sys = paper_system();
    let cfg = CertifierConfig::default();
    let tau = 2.712;
    let m = 2;
    let mut cache = ExpmCache::new();

    // base m=1 cert at inflated tau
    let base = certifier::check_tau_feasible(&sys, tau * 1.5, 1, None, &cfg).unwrap().unwrap();
    // duplicate + perturb
    let mut rng = dwellcert_core::rng::Rng::new(1);
    let mut modes = Vec::new();
    for v in base.family.modes() {
        let p = v.piece(0).clone();
        let mut p2 = p.clone();
        for a in 0..2 { for b in a..2 {
            let val = p2.get(a,b) * (1.0 + 1e-3 * rng.next_signed());
            p2.set_sym(a,b,val);
        }}
        modes.push(PiecewiseQuadratic::new_unchecked(vec![p, p2]));
    }
    let mut family = LyapunovFamily::new(modes).unwrap();
    let mut mult = ScalarMultipliers::zeros(2, m);

    let resolve = |mult: &ScalarMultipliers, family: &LyapunovFamily, cache: &mut ExpmCache| {
        let asm = lmi::assemble_fixed_scalars(&sys, tau, m, mult, &cfg.lmi, cache).unwrap();
        let f = solver::solve_feasibility(&asm.problem, cfg.eps).unwrap();
        let mut fam = Vec::new();
        for row in &asm.vars.p {
            let pieces: Vec<_> = row.iter().map(|&v| asm.problem.sym_value(v, &f.assignment)).collect();
            fam.push(PiecewiseQuadratic::new_unchecked(pieces));
        }
        (LyapunovFamily::new(fam).unwrap(), f.objective, f.status)
    };

    let (f0, t0, s0) = resolve(&mult, &family, &mut cache);
    family = f0;
    println!("iter 0: t={:.6} status={:?}", t0, s0);
    let mut t_cur = t0;
    for it in 1..=20 {
        let asm = lmi::assemble_delta(&sys, tau, m, &family, &mult, &cfg.lmi, &mut cache, 0.2, 0.5).unwrap();
        let f = solver::solve_feasibility(&asm.problem, cfg.eps).unwrap();
        let mut mult_new = mult.clone();
        for (&(i, r, s), &var) in &asm.vars.alpha {
            let d = f.assignment[asm.problem.scalar_entry(var)];
            mult_new.set_alpha(i, r, s, mult.alpha(i, r, s) + d);
        }
        for (&(j, q, i, r, s), &var) in &asm.vars.gamma {
            let d = f.assignment[asm.problem.scalar_entry(var)];
            mult_new.set_gamma(j, q, i, r, s, mult.gamma(j, q, i, r, s) + d);
        }
        let (fam_new, t_new, st) = resolve(&mult_new, &family, &mut cache);
        println!("iter {}: delta_status={:?} delta_obj={:.6} -> t={:.6} ({:?})", it, f.status, f.objective, t_new, st);
        println!("   alpha: {:?}", (0..2).map(|i| mult_new.alpha(i,0,1)).collect::<Vec<_>>());
        mult = mult_new; family = fam_new; t_cur = t_new;
        if t_cur <= -cfg.eps { println!("FEASIBLE"); break; }
    }
}
