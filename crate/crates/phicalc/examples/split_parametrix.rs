//! Replays the split parametrix construction for a Gauss–Bonnet type operator.
use phicalc::split::{split_parametrix, SplitOperator};

fn main() -> phicalc::Result<()> {
    let alpha: f64 = std::env::args().nth(1).map(|s| s.parse().expect("alpha")).unwrap_or(0.5);
    let op = SplitOperator::differential(1, 1, 1, (-6..=6).map(f64::from).collect());
    let report = split_parametrix(&op, alpha)?;
    for s in report.steps() {
        println!("[{}] step {} {:<28} {}", if s.pass { "PASS" } else { "FAIL" }, s.step, s.name, s.asserted);
        for e in s.entries.iter().filter(|e| e.note.is_some() || !e.pass) {
            println!("      ({},{}) {} ⊂ {}  {:?}", e.row, e.col, e.computed, e.asserted, e.note);
        }
    }
    println!("Q_r = {}", report.right.q_display);
    println!("R_r = {}", report.right.r_display);
    println!("Q_l = {}", report.left.q_display);
    println!("R_l = {}", report.left.r_display);
    println!("overall: {}", if report.pass { "PASS" } else { "FAIL" });
    Ok(())
}
