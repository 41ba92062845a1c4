// Statistics of the failed subblock measurement and the recycling ledger.

use rsp::recycle::{
    default_s_prime, entropy_asymptotic, eq1_value, recycle_accounting, rho0_bell_diagonal_mc, twirled_entropy_exact,
    EntropySource,
};
use rsp::RngStream;

pub fn run_example() -> rsp::Result<()> {
    let mut rng = RngStream::new(2);
    let s = 2;
    let est = rho0_bell_diagonal_mc(s, 5000, &mut rng)?;
    for (r, e) in est.classes.iter().enumerate() {
        println!("s = {s}, r = {r}: MC {:.6} vs closed form {:.6}", e.mean, eq1_value(s, r));
    }

    for s in [6, 10, 14] {
        let exact = twirled_entropy_exact(s)?;
        println!("s = {s}: exact/asymptotic entropy = {:.4}", exact / entropy_asymptotic(s));
    }

    let ledger = recycle_accounting(10, default_s_prime(10), EntropySource::Asymptotic)?;
    println!(
        "copies = {}, distilled = {:.1} ebits, e0 = {:.6} ebits/state at {} bit/state",
        ledger.copies, ledger.distilled, ledger.e0, ledger.bits_forward_per_state
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> rsp::Result<()> {
    run_example()
}
