use sureloss::lp::{build_d4_phase1, build_p4prime, select_omega0, start_point_p4prime, StartPoint};
use sureloss::solvers::{primal_dual, SolverOptions};
use sureloss_cli::{instance, Truth};

fn main() {
    let d = instance(123, 6, 2, Truth::NotAsl, 30).unwrap();
    let omega0 = select_omega0(&d);
    let (lp, primal) = build_d4_phase1(&d, omega0).unwrap();
    let pairing = build_p4prime(&lp).unwrap();
    let dual = start_point_p4prime(&pairing).unwrap();
    let start = StartPoint::merged(&primal, &dual);
    let opts = SolverOptions { max_iters: Some(2000), ..SolverOptions::default() };
    let mut buf: Vec<u8> = Vec::new();
    let out = primal_dual(&lp, &start, &opts, Some(&mut buf)).unwrap();
    println!("status={:?} obj={:?} iters={} rp={:.2e} rd={:.2e} gap={:.2e}",
        out.status, out.objective, out.iterations, out.primal_residual_inf, out.dual_residual_inf, out.duality_gap);
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    for l in lines.iter().take(3) { println!("  {l}"); }
    println!("  ...");
    for l in lines.iter().rev().take(10).collect::<Vec<_>>().iter().rev() { println!("  {l}"); }
}
