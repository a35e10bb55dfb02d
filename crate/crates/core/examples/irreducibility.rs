//! Irreducible, geometrically irreducible and conjugate-split plane curves
//! through a fixed rational point.

use bertini_lab::density::{run_census, CensusPredicate, Experiment};
use bertini_lab::ideal::{ClosedPoint, SubschemeSpec};
use bertini_lab::make_field;

fn main() -> bertini_lab::Result<()> {
    let k = make_field(2, 1)?;
    let z = SubschemeSpec::from_points(&k, 2, vec![ClosedPoint::parse(&k, "[0:0:1]")?])?;
    let split = CensusPredicate::And(vec![
        CensusPredicate::Irreducible,
        CensusPredicate::Not(Box::new(CensusPredicate::GeometricallyIrreducible)),
    ]);
    for p in [CensusPredicate::Irreducible, CensusPredicate::GeometricallyIrreducible, split] {
        let e = Experiment::new("irreducibility", &k, 2, p, 2, 5).with_z(z.clone());
        print!("{}", run_census(&e)?.summary());
    }
    Ok(())
}
