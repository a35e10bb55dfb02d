//! Forms containing the line V(x0): density q^-(d+1), tending to 0.

use bertini_lab::density::{run_census, CensusPredicate, Experiment};
use bertini_lab::homog::text::parse_poly;
use bertini_lab::ideal::SubschemeSpec;
use bertini_lab::make_field;
use bertini_lab::zeta::Shape;

fn main() -> bertini_lab::Result<()> {
    let k = make_field(3, 1)?;
    let line = SubschemeSpec::from_ideal(&k, 2, vec![parse_poly(&k, 2, "x0", None)?])?;
    let e = Experiment::new("containment", &k, 2, CensusPredicate::Contains(line), 1, 3)
        .with_prediction(Shape::Containment { w_dim: 1 });
    print!("{}", run_census(&e)?.summary());
    Ok(())
}
