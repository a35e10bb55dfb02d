//! Projective emptiness by the Macaulay test, against a point search.

use bertini_lab::homog::text::parse_poly;
use bertini_lab::ideal::{find_point, is_empty_projective};
use bertini_lab::make_field;

fn main() -> bertini_lab::Result<()> {
    let k = make_field(2, 1)?;
    let systems: [&[&str]; 4] = [
        &["x0^2 + x0*x1 + x1^2", "x2"],
        &["x0", "x1", "x2"],
        &["x0*x1 + x2^2", "x0^2 + x1*x2", "x1^2 + x0*x2 + x2^2"],
        &["x0^3 + x1^3 + x2^3", "x0 + x1 + x2"],
    ];
    for gens in systems {
        let polys = gens.iter().map(|s| parse_poly(&k, 2, s, None)).collect::<Result<Vec<_>, _>>()?;
        let verdict = is_empty_projective(&k, 2, &polys, 4);
        let point = find_point(&k, 2, &polys, 4)?.map(|w| w.render(&k));
        println!("{gens:?}: empty = {:?}, first point = {point:?}", verdict.is_empty());
    }
    Ok(())
}
