use sureloss::lp::{build_d4_phase1, select_omega0};
use sureloss::solvers::{affine_scaling, SolverOptions};
use sureloss_cli::{instance, Truth};

fn main() {
    let d = instance(123, 6, 2, Truth::NotAsl, 7).unwrap();
    let omega0 = select_omega0(&d);
    let (lp, start) = build_d4_phase1(&d, omega0).unwrap();
    let opts = SolverOptions { step_fraction: 0.9, ..SolverOptions::default() };
    let mut buf: Vec<u8> = Vec::new();
    let out = affine_scaling(&lp, &start, &opts, Some(&mut buf)).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    println!("n rows={} cols={}", lp.n_rows(), lp.n_cols());
    for l in lines.iter().take(5) { println!("{l}"); }
    println!("...");
    for l in lines.iter().rev().take(15).rev() { println!("{l}"); }
    println!("status={:?} obj={:?} iters={} rp={:.3e} rd={:.3e} gap={:.3e}",
        out.status, out.objective, out.iterations, out.primal_residual_inf, out.dual_residual_inf, out.duality_gap);
    let x = out.x.as_ref().unwrap();
    println!("min x = {:.3e}, residual check = {:.3e}", x.min(), lp.residual_inf(x));
}
