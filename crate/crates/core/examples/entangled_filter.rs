// Remote preparation of a partially entangled pair by local filtering.

use rsp::entprep::{expected_bits, filter_trials, prepare_entangled, schmidt_diagonal_state};
use rsp::RngStream;

pub fn run_example() -> rsp::Result<()> {
    let mut rng = RngStream::new(4);
    for lambda in [[1.0, 0.0], [0.75, 0.25], [0.5, 0.5]] {
        let psi = schmidt_diagonal_state(&lambda)?;
        let stats = filter_trials(&psi, 2000, &mut rng)?;
        println!(
            "lambda = {lambda:?}: success {:.4} (analytic {:.4}), {:.3} bits/prep, log2(Λd) = {:.3}",
            stats.empirical_prob,
            stats.analytic_prob,
            stats.bits.mean,
            expected_bits(std::slice::from_ref(&psi))?
        );
    }
    let one = prepare_entangled(&schmidt_diagonal_state(&[0.9, 0.1])?, &mut rng)?;
    println!("single run: {} attempt(s), fidelity {:.12}", one.attempts, one.transcript.output_fidelity);
    Ok(())
}

#[allow(dead_code)]
fn main() -> rsp::Result<()> {
    run_example()
}
