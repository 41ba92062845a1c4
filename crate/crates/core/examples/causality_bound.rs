// Guessing channels, the entangled-fraction relation and the causality
// bound on protocols that use too few bits.

use rsp::bounds::{avg_fidelity, causality_check, entangled_fraction, horodecki_f, QuantumChannel};
use rsp::runner::weyl_guess;
use rsp::RngStream;

pub fn run_example() -> rsp::Result<()> {
    let mut rng = RngStream::new(6);
    let channel = QuantumChannel::depolarizing(2, 0.6)?;
    let f_mc = avg_fidelity(&channel, 20_000, &mut rng);
    let f = horodecki_f(entangled_fraction(&channel)?, 2)?;
    println!("depolarizing(0.6): MC {:.5} ± {:.1e}, relation {:.5}", f_mc.mean, f_mc.stderr, f);

    for k in [1, 2, 4] {
        let v = causality_check(k, 2, &weyl_guess(k, 2)?)?;
        println!(
            "k = {k}: f = {:.4}, ceiling 1/d = {:.4}, contradiction = {}",
            v.f, v.ceiling, v.contradiction
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> rsp::Result<()> {
    run_example()
}
