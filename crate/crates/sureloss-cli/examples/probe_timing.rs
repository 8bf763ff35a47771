use sureloss::{avoids_sure_loss, exact_oracle_asl, MethodChoice};
use sureloss_cli::{instance, Truth};

fn main() {
    'outer: for (i, j) in [(6u32, 2u32), (4, 4), (2, 6), (3, 3)] {
        for truth in [Truth::NotAsl, Truth::Asl] {
            for rep in 0..50 {
                let d = instance(123, i, j, truth, rep).unwrap();
                let oracle = if d.len() <= 16 && d.n_outcomes() <= 16 {
                    Some(exact_oracle_asl(&sureloss::snap_to_rationals(&d)).unwrap())
                } else {
                    None
                };
                for choice in MethodChoice::all() {
                    match avoids_sure_loss(&d, &choice) {
                        Ok(v) => {
                            let expect = matches!(truth, Truth::Asl);
                            if v.avoids != expect {
                                println!(
                                    "WRONG VERDICT i={i} j={j} truth={truth:?} rep={rep} {}: got {} oracle={oracle:?}",
                                    choice.label(),
                                    v.avoids
                                );
                                break 'outer;
                            }
                        }
                        Err(e) => {
                            println!(
                                "ERROR i={i} j={j} truth={truth:?} rep={rep} {}: {e} oracle={oracle:?}",
                                choice.label()
                            );
                            println!("instance: {}", serde_json::to_string(&d).unwrap());
                            break 'outer;
                        }
                    }
                }
            }
        }
    }
    println!("probe done");
}
