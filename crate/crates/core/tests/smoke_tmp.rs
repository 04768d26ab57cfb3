use dwellcert_core::certifier::{self, CertifierConfig};
use dwellcert_core::lmi::SwitchedSystem;
use dwellcert_core::mat::SquareMatrix;
use dwellcert_core::solver::Status;

fn paper_system() -> SwitchedSystem {
    let a1 = SquareMatrix::from_rows(&[&[0.0, 1.0], &[-10.0, -1.0]]).unwrap();
    let a2 = SquareMatrix::from_rows(&[&[0.0, 1.0], &[-0.1, -0.5]]).unwrap();
    SwitchedSystem::new(vec![a1, a2], None).unwrap()
}

#[test]
fn smoke_m1() {
    let sys = paper_system();
    let cfg = CertifierConfig::default();
    let t0 = std::time::Instant::now();
    let f_hi = certifier::solve_m1(&sys, 2.76, &cfg).unwrap();
    println!("tau=2.76: {:?} obj={} iters={} in {:?}", f_hi.status, f_hi.objective, f_hi.iterations, t0.elapsed());
    let t0 = std::time::Instant::now();
    let f_lo = certifier::solve_m1(&sys, 2.70, &cfg).unwrap();
    println!("tau=2.70: {:?} obj={} iters={} in {:?}", f_lo.status, f_lo.objective, f_lo.iterations, t0.elapsed());
    assert_eq!(f_hi.status, Status::Feasible);
    assert_eq!(f_lo.status, Status::Infeasible);
}

#[test]
fn smoke_lower_bound() {
    let sys = paper_system();
    let t0 = std::time::Instant::now();
    let lb = certifier::dwell_lower_bound(&sys, 1e-4).unwrap();
    println!("lower bound = {} in {:?}", lb, t0.elapsed());
    assert!((lb - 2.7078).abs() < 1e-3, "lb = {}", lb);
}
