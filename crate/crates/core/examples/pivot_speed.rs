use saw_dilation::chain::{Chain, ChainConfig};
use saw_dilation::walk::Constraint;
use std::time::Instant;

fn main() {
    let n: usize = std::env::args().nth(1).map(|s| s.parse().unwrap()).unwrap_or(4000);
    let attempts: u64 = std::env::args().nth(2).map(|s| s.parse().unwrap()).unwrap_or(2_000_000);
    for constraint in [Constraint::FullPlane, Constraint::HalfPlane] {
        let cfg = ChainConfig::new(n, constraint, 1).with_equilibration(0);
        let mut chain = Chain::new(cfg).unwrap();
        chain.advance_to(200_000, |_, _| {});
        let t = Instant::now();
        chain.advance_to(200_000 + attempts, |_, _| {});
        let dt = t.elapsed().as_secs_f64();
        let s = chain.stats();
        println!("{constraint:?} N={n}: {:.3} us/attempt, acceptance {:.3}", dt / attempts as f64 * 1e6, s.acceptance_fraction());
    }
}
