//! Sections vanishing at a rational point Y and smooth away from it. The
//! census runs over I^Y_d and reports densities in all of S_d.

use bertini_lab::density::{run_census, CensusPredicate, Experiment, Normalization};
use bertini_lab::ideal::{ClosedPoint, SubschemeSpec};
use bertini_lab::make_field;
use bertini_lab::zeta::{Region, Shape, Stratum, TaylorFactor};

fn main() -> bertini_lab::Result<()> {
    let k = make_field(2, 1)?;
    let d_hi = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(4);
    let y = ClosedPoint::parse(&k, "[0:0:1]")?;
    let shape = Shape::Smooth {
        q: 2,
        strata: vec![Stratum {
            m: 2,
            u_minus_v: Region::ProjectiveSpace { n: 2, removed: vec![1] },
            v_points: vec![],
        }],
        taylor: Some(TaylorFactor { t_size: 1, h0_size: 2 }),
        truncation: 12,
    };
    let e = Experiment::new("taylor", &k, 2, CensusPredicate::SmoothAwayFrom(vec![y.clone()]), 2, d_hi)
        .with_z(SubschemeSpec::from_points(&k, 2, vec![y])?)
        .with_normalization(Normalization::Ambient)
        .with_prediction(shape);
    print!("{}", run_census(&e)?.summary());
    Ok(())
}
