use hypaf::flow;
use std::time::Instant;

fn main() {
    let n: usize = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(6);
    let t0 = Instant::now();
    let mut cfg = flow::FlowConfig::parametric(n, 2.0, 0.1, 2);
    cfg.t_max = 8.0;
    cfg.nodes = 400;
    let out = flow::run(&cfg).expect("run");
    let secs = t0.elapsed().as_secs_f64();
    let v = flow::evaluate(&out).expect("verdicts");
    println!("n = {n}, wall = {secs:.1} s, rows = {}", out.trace.rows.len());
    println!("breakdown: {:?}", out.breakdown);
    println!("q_monotone = {}, max_uptick = {:.3e}", v.q_monotone, v.q_max_uptick);
    println!("q_initial = {:.10}", v.q_initial);
    println!("q_final   = {:.10}", v.q_final);
    println!("q_bound   = {:.10}", v.q_bound);
    println!("final rel above bound = {:.6e}", v.q_final_above_bound);
    println!("horo_margin_min = {:.6e}", v.horo_margin_min);
    println!("area_growth_min = {:.6e}", v.area_growth_min);
    println!("umb decreasing after 1: {}", v.umbilic_decreasing_after_1);
    if let Some(d) = v.decay {
        println!("decay fit over [3,8]: rate = {:.6}, samples = {}", d.rate, d.samples);
    }
    println!("r1_final = {:.8}, r2_final = {:.8}", v.r1_final, v.r2_final);
    println!("ratios improving after 2: {}", v.ratios_improving_after_2);
    // ratio values at t ~ 6 and l2 conservation for n = 5
    for row in &out.trace.rows {
        if (row.t - 6.0).abs() < 5e-3 {
            println!("t = {:.3}: r1 = {:.8}, r2 = {:.8}, deficit = {:.3e}", row.t, row.r1, row.r2, row.umbilic_deficit);
        }
    }
    let l2_first = out.trace.rows[0].int_l2;
    let l2_minmax = out.trace.rows.iter().fold((f64::MAX, f64::MIN), |(lo, hi), r| {
        (lo.min(r.int_l2), hi.max(r.int_l2))
    });
    println!("int_l2 first = {l2_first:.8}, min = {:.8}, max = {:.8}", l2_minmax.0, l2_minmax.1);
    let deficits: Vec<(f64, f64)> = out
        .trace
        .rows
        .iter()
        .filter(|r| (r.t - r.t.round()).abs() < 5e-3)
        .map(|r| (r.t, r.umbilic_deficit))
        .collect();
    println!("deficit at integer t: {deficits:?}");
}
