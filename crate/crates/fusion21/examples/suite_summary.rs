use fusion21::config::SuiteConfig;
use fusion21::identity_suite::run_suite;

fn main() {
    let t = std::time::Instant::now();
    let rep = run_suite(&SuiteConfig::default()).expect("suite runs");
    for (id, n, fails, worst, gating) in rep.summary() {
        println!("{id:40} n={n:4} fail={fails:4} worst={worst:.3e} gating={gating}");
    }
    println!("all gating pass: {} in {:?}", rep.all_gating_pass, t.elapsed());
}
