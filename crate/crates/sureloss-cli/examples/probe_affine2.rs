use sureloss::lp::{build_d4_phase1, select_omega0};
use sureloss::solvers::{affine_scaling, SolverOptions};
use sureloss_cli::{instance, Truth};

fn main() {
    let d = instance(123, 6, 2, Truth::NotAsl, 17).unwrap();
    let omega0 = select_omega0(&d);
    let (lp, start) = build_d4_phase1(&d, omega0).unwrap();
    for sf in [0.9, 2.0/3.0, 0.5] {
        let opts = SolverOptions { step_fraction: sf, ..SolverOptions::default() };
        let mut buf: Vec<u8> = Vec::new();
        let out = affine_scaling(&lp, &start, &opts, Some(&mut buf)).unwrap();
        let text = String::from_utf8(buf).unwrap();
        println!("== step_fraction {sf}: status={:?} obj={:?} iters={}", out.status, out.objective, out.iterations);
        for l in text.lines().rev().take(6).collect::<Vec<_>>().iter().rev() { println!("  {l}"); }
    }
}
