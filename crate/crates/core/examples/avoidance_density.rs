//! Forms missing a finite set of closed points: exact densities at every
//! degree past the number of conditions.

use bertini_lab::density::{run_census, CensusPredicate, Experiment};
use bertini_lab::ideal::ClosedPoint;
use bertini_lab::make_field;
use bertini_lab::zeta::Shape;

fn main() -> bertini_lab::Result<()> {
    let k = make_field(2, 1)?;
    let w = vec![ClosedPoint::parse(&k, "[1:0:0]")?, ClosedPoint::parse(&k, "[1:g:0]@2")?];
    let degrees = w.iter().map(ClosedPoint::degree).collect();
    let e = Experiment::new("avoidance", &k, 2, CensusPredicate::Avoids(w), 1, 5)
        .with_prediction(Shape::Avoidance { q: 2, degrees });
    print!("{}", run_census(&e)?.summary());
    Ok(())
}
