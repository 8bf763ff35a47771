use sureloss::lp::{build_d4_phase1, select_omega0};
use sureloss::solvers::{affine_scaling, SolverOptions};
use sureloss_cli::{instance, Truth};

fn main() {
    let d = instance(123, 6, 2, Truth::NotAsl, 21).unwrap();
    let omega0 = select_omega0(&d);
    let (lp, start) = build_d4_phase1(&d, omega0).unwrap();
    let opts = SolverOptions { step_fraction: 2.0/3.0, max_iters: Some(2000), ..SolverOptions::default() };
    let mut buf: Vec<u8> = Vec::new();
    let out = affine_scaling(&lp, &start, &opts, Some(&mut buf)).unwrap();
    let text = String::from_utf8(buf).unwrap();
    println!("status={:?} obj={:?} iters={} gap={:.3e} rd={:.3e}", out.status, out.objective, out.iterations, out.duality_gap, out.dual_residual_inf);
    let lines: Vec<&str> = text.lines().collect();
    for l in lines.iter().skip(20).take(8) { println!("  {l}"); }
    println!("  ...");
    for l in lines.iter().rev().take(8).collect::<Vec<_>>().iter().rev() { println!("  {l}"); }
}
