//! Conics meeting the coordinate lines V(x0), V(x1) as a strict normal
//! crossings divisor, with witnesses for the failures.

use bertini_lab::homog::text::{format_poly, parse_poly};
use bertini_lab::homog::FormSpace;
use bertini_lab::ideal::SubschemeSpec;
use bertini_lab::make_field;
use bertini_lab::scheme::is_snc_section;

fn main() -> bertini_lab::Result<()> {
    let k = make_field(2, 1)?;
    let u = SubschemeSpec::whole(&k, 2);
    let comps = ["x0", "x1"]
        .iter()
        .map(|s| SubschemeSpec::from_ideal(&k, 2, vec![parse_poly(&k, 2, s, None)?]))
        .collect::<Result<Vec<_>, _>>()?;
    let mut good = 0;
    for f in FormSpace::full(&k, 2, 2).iter()? {
        let v = is_snc_section(&u, &comps, &f)?;
        if v.is_true() {
            good += 1;
            println!("snc: {}", format_poly(&k, &f));
        }
    }
    println!("{good} of 64 conics");
    for s in ["x0*x2", "x2^2", "x0^2 + x1*x2"] {
        let v = is_snc_section(&u, &comps, &parse_poly(&k, 2, s, None)?)?;
        println!("{s}: {:?} {}", v.flag, v.witness.unwrap_or_default());
    }
    Ok(())
}
