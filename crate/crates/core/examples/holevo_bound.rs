// Holevo lower bound on the classical cost of preparing an ensemble.

use rsp::entprep::{holevo_lower_bound, EnsembleSpec};
use rsp::qmath::{haar_state, phi_plus};
use rsp::{RngStream, StateVector};

pub fn run_example() -> rsp::Result<()> {
    let zero = StateVector::basis(2, 0);
    let one = StateVector::basis(2, 1);
    let computational = EnsembleSpec::uniform(vec![zero.clone(), one])?;
    println!("{{|0>, |1>}}: {:.6} bits", holevo_lower_bound(&computational)?);
    println!("singleton: {:.6} bits", holevo_lower_bound(&EnsembleSpec::uniform(vec![zero])?)?);

    let mut rng = RngStream::new(8);
    let mut states = vec![phi_plus(2)];
    states.extend((0..3).map(|_| haar_state(4, &mut rng).with_dims(vec![2, 2]).unwrap()));
    println!("mixed pair ensemble: {:.6} bits", holevo_lower_bound(&EnsembleSpec::uniform(states)?)?);
    Ok(())
}

#[allow(dead_code)]
fn main() -> rsp::Result<()> {
    run_example()
}
