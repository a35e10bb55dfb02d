//! Density of smooth plane curves over F_2 against 1/zeta_{P^2}(3) = 21/64.

use bertini_lab::density::{run_census, CensusPredicate, Experiment};
use bertini_lab::ideal::SubschemeSpec;
use bertini_lab::zeta::{Region, Shape, Stratum};
use bertini_lab::make_field;

fn main() -> bertini_lab::Result<()> {
    let k = make_field(2, 1)?;
    let d_hi = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(4);
    let shape = Shape::Smooth {
        q: 2,
        strata: vec![Stratum {
            m: 2,
            u_minus_v: Region::ProjectiveSpace { n: 2, removed: vec![] },
            v_points: vec![],
        }],
        taylor: None,
        truncation: 12,
    };
    let e = Experiment::new("smooth_plane_curves", &k, 2, CensusPredicate::Smooth(SubschemeSpec::whole(&k, 2)), 1, d_hi)
        .with_prediction(shape)
        .with_width(rayon::current_num_threads());
    let report = run_census(&e)?;
    print!("{}", report.summary());
    Ok(())
}
