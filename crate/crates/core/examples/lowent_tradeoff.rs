// Cost points of low-entanglement RSP, the time-sharing envelope and one
// simulated run of the rotation-table protocol.

use std::f64::consts::PI;

use rsp::lowent::{cap_params, simulate_lowent, theta_grid, tradeoff_curve, CostSource};
use rsp::qmath::haar_state;
use rsp::RngStream;

pub fn run_example() -> rsp::Result<()> {
    for p in tradeoff_curve(&theta_grid(8), true)? {
        if !matches!(p.source, CostSource::Convex { .. }) {
            println!("{:<18} e = {:.6}  b = {:.6}", p.source.label(), p.e, p.b);
        }
    }

    let theta = 2.0 * PI / 3.0;
    let cap = cap_params(theta)?;
    let mut rng = RngStream::new(9);
    let targets: Vec<_> = (0..64).map(|_| haar_state(2, &mut rng)).collect();
    let run = simulate_lowent(64, 4, theta, &targets, &mut rng)?;
    println!(
        "simulated: {:.3} bits/state ({} of them prerotations), {:.3} ebits/state, subblock success {:.2}; asymptotic b = {:.3}",
        run.bits_per_state(),
        run.prerotation_bits / 64.0,
        run.ebits_per_state(),
        run.success_rate(),
        cap.s_prime + 2.0 * cap.s
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> rsp::Result<()> {
    run_example()
}
