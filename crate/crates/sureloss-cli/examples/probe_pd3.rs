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
    let opts = SolverOptions { max_iters: Some(100), ..SolverOptions::default() };
    let mut buf: Vec<u8> = Vec::new();
    let res = primal_dual(&lp, &start, &opts, Some(&mut buf));
    println!("result: {res:?}");
    let text = String::from_utf8(buf).unwrap();
    for l in text.lines() { println!("  {l}"); }
}
