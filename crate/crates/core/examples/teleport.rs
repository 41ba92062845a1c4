// Teleportation of qudits through the generalized Bell basis.

use rsp::highent::{teleport, teleport_qudit};
use rsp::qmath::haar_state;
use rsp::RngStream;

pub fn run_example() -> rsp::Result<()> {
    let mut rng = RngStream::new(3);
    for d in [2, 3, 5] {
        let psi = haar_state(d, &mut rng);
        let run = teleport_qudit(&psi, &mut rng)?;
        println!(
            "d = {d}: outcome {:?}, {:.3} bits, {} ebit, fidelity {:.12}",
            run.outcomes, run.transcript.bits_forward, run.transcript.ebits_consumed, run.transcript.output_fidelity
        );
    }
    let two_qubits = haar_state(4, &mut rng);
    let run = teleport(&two_qubits, &mut rng)?;
    println!(
        "two qubits: {} bits, {} ebits, fidelity {:.12}",
        run.transcript.bits_forward, run.transcript.ebits_consumed, run.transcript.output_fidelity
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> rsp::Result<()> {
    run_example()
}
