// Exact remote preparation of equatorial qubits: one singlet and one bit.

use std::f64::consts::PI;

use rsp::highent::equatorial_rsp;
use rsp::RngStream;

pub fn run_example() -> rsp::Result<()> {
    let mut rng = RngStream::new(7);
    for k in 0..4 {
        let phi = k as f64 * PI / 3.0;
        let run = equatorial_rsp(phi, &mut rng)?;
        println!(
            "phi = {phi:.3}: bits = {}, ebits = {}, fidelity = {:.12}, sigma_z applied = {}",
            run.transcript.bits_forward, run.transcript.ebits_consumed, run.transcript.output_fidelity, run.corrected
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> rsp::Result<()> {
    run_example()
}
