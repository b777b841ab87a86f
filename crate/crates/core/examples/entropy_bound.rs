//! The OR-MAC entropy bound: how many active users a J-bit slot can carry at a
//! given outer rate before the sum rate exceeds the output entropy.

use ura_core::tree::{entropy_bound, sumrate_feasible};

fn main() {
    let j = 12;
    println!("{:>5} {:>10} {:>10} {:>10} {:>10}", "Ka", "bound", "R=0.25", "R=0.5", "R=0.75");
    for ka in [50u64, 100, 200, 300, 400, 600, 1000, 2000] {
        let bound = entropy_bound(j, ka);
        let cell = |r: f64| format!("{:.0}{}", ka as f64 * f64::from(j) * r, if sumrate_feasible(j, ka, r) { "" } else { "!" });
        println!("{ka:>5} {bound:>10.1} {:>10} {:>10} {:>10}", cell(0.25), cell(0.5), cell(0.75));
    }
    println!("(sum rate in bits; ! marks infeasible)");

    // largest Ka the reference outer rate supports
    let max = (1..20_000u64).take_while(|&ka| sumrate_feasible(j, ka, 0.25)).last().unwrap_or(0);
    println!("J = {j}, R_out = 0.25: feasible up to Ka = {max}");
}
