// Success-table RSP of n Haar-random qubits, compared with the cost model.

use rsp::highent::{expected_cost_model, table_rsp};
use rsp::qmath::haar_state;
use rsp::RngStream;

pub fn run_example() -> rsp::Result<()> {
    let mut rng = RngStream::new(11);
    for n in [4, 8] {
        let model = expected_cost_model(n, 2)?;
        let runs = 50;
        let mut bits = 0.0;
        let mut fallbacks = 0;
        for _ in 0..runs {
            let targets: Vec<_> = (0..n).map(|_| haar_state(2, &mut rng)).collect();
            let run = table_rsp(n, 2, &targets, None, &mut rng)?;
            bits += run.transcript.bits_forward / n as f64;
            fallbacks += run.transcript.fallback_used as usize;
        }
        println!(
            "n = {n}: m = {}, bits/state = {:.4} (model {:.4}), fallbacks {fallbacks}/{runs} (model p = {:.5})",
            model.columns,
            bits / runs as f64,
            model.bits_per_state,
            model.p_fail
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> rsp::Result<()> {
    run_example()
}
