//! Flatness of I_d over A = F_2[t]_(t): horizontal sections pass, a
//! vertical component shows up as a nonzero elementary divisor.

use bertini_lab::dvr::{check_flat_restriction, RatField};
use bertini_lab::homog::text::parse_poly;
use bertini_lab::make_field;

fn main() -> bertini_lab::Result<()> {
    let k = RatField::new(&make_field(2, 1)?);
    let cases: [&[&str]; 3] = [&["x1", "x2"], &["x1 + t*x0", "x2 + (1 + t^2)*x0"], &["t*x1", "x1 + t*x0"]];
    for gens in cases {
        let polys = gens.iter().map(|s| parse_poly(&k, 2, s, None)).collect::<Result<Vec<_>, _>>()?;
        let r = check_flat_restriction(&k, 2, &polys, 1..=3)?;
        println!("{gens:?}: flat = {}", r.passed);
        for d in &r.degrees {
            println!("  d={} rank {} elementary divisors {:?}", d.d, d.rank, d.elementary_divisors);
        }
    }
    Ok(())
}
