//! Lifting good special fibers over F_2[t]_(t): plane cubics and hyperplane
//! sections of a quadric surface, each with a re-checked certificate.

use bertini_lab::dvr::{lift_search, verify_certificate, LiftPredicate, LiftProblem, RatField};
use bertini_lab::homog::text::parse_poly;
use bertini_lab::make_field;

fn main() -> bertini_lab::Result<()> {
    let base = make_field(2, 1)?;
    let k = RatField::new(&base);
    let cubic = LiftProblem::new(&base, 2, 3).with_count(3);
    let quadric = LiftProblem::new(&base, 3, 1)
        .with_x(vec![parse_poly(&k, 3, "x0*x3 - x1*x2", None)?])
        .with_predicates(&[LiftPredicate::Flat, LiftPredicate::SpecialSmooth, LiftPredicate::GenericSmooth, LiftPredicate::GenericIntegral])
        .with_count(3);
    for problem in [cubic, quadric] {
        let out = lift_search(&problem)?;
        print!("{}", out.summary());
        for c in &out.certificates {
            println!("  {} -> verified {}", c.lift, verify_certificate(&problem, c)?);
        }
    }
    Ok(())
}
