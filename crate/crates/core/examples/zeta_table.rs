//! Closed-point counts and truncated 1/zeta for P^n over small fields.

use bertini_lab::scheme::PointCensus;
use bertini_lab::zeta::{inverse_zeta_projective, zeta_truncated};

fn main() -> bertini_lab::Result<()> {
    for (q, n) in [(2u64, 1usize), (2, 2), (3, 2), (4, 3)] {
        let census = PointCensus::projective_space(q, n, 20)?;
        let s = n as u32 + 1;
        let (inv, err) = zeta_truncated(&census, s, 20)?.inverse();
        println!(
            "q={q} n={n}: b = {:?}  1/zeta({s}) ~ {inv:.9} (+- {err:.1e}), exact {}",
            &census.b[..5],
            inverse_zeta_projective(q, n, s)?
        );
    }
    Ok(())
}
