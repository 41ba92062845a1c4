// Measuring half of a maximally entangled qudit pair in a basis containing
// ψ* prepares ψ on the other side with probability 1/d.

use rsp::highent::conjugate_basis_measure;
use rsp::qmath::haar_state;
use rsp::RngStream;

pub fn run_example() -> rsp::Result<()> {
    let mut rng = RngStream::new(5);
    for d in 2..=5 {
        let trials = 2000;
        let mut hits = 0;
        for _ in 0..trials {
            let psi = haar_state(d, &mut rng);
            let (ok, bob) = conjugate_basis_measure(d, &psi, &mut rng)?;
            if ok {
                hits += 1;
                assert!((bob.overlap(&psi) - 1.0).abs() < 1e-9);
            }
        }
        println!("d = {d}: success rate {:.4}, expected {:.4}", hits as f64 / trials as f64, 1.0 / d as f64);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> rsp::Result<()> {
    run_example()
}
