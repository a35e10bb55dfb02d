use bertini_lab::density::{run_census, CensusPredicate, Experiment};
use bertini_lab::dvr::{psi_x, DvrElem, RatField, UPoly};
use bertini_lab::homog::{dim_s, FormSpace};
use bertini_lab::ideal::{projective_points, ClosedPoint, SubschemeSpec};
use bertini_lab::scheme::{is_irreducible_section, is_smooth_section, SmoothMode};
use bertini_lab::{make_field, Fe, Field, HomogPoly, ProjPoint};
use proptest::prelude::*;

fn box_elems(k: &RatField) -> Vec<DvrElem> {
    (0..8u32)
        .map(|i| DvrElem::new(k.poly(UPoly::new((0..3).map(|b| Fe(i >> b & 1)).collect()))).unwrap())
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    // A nonzero form over F_2(t) cannot vanish on all of psi_x(box).
    #[test]
    fn avoidance_lifts_through_psi(
        raw in prop::collection::vec((0u32..8, 0u32..4), 6),
        x_index in 0usize..7,
        d in 1usize..=2,
    ) {
        let base = make_field(2, 1).unwrap();
        let k = RatField::new(&base);
        let len = dim_s(2, d);
        let coeffs: Vec<_> = raw
            .iter()
            .cycle()
            .take(len)
            .map(|&(num, den)| {
                let n = UPoly::new((0..3).map(|b| Fe(num >> b & 1)).collect());
                // denominators 1, 1 + t, 1 + t^2, 1 + t + t^2 are units of A
                let dd = UPoly::new(vec![Fe(1), Fe(den & 1), Fe(den >> 1 & 1)]);
                k.frac(n, dd).unwrap()
            })
            .collect();
        let h = HomogPoly::from_coeffs(2, d, coeffs).unwrap();
        prop_assume!(!h.is_zero(&k));
        let x: ProjPoint<Fe> = projective_points(&base, 2).unwrap().nth(x_index).unwrap();
        let elems = box_elems(&k);
        let hit = elems.iter().any(|a| {
            elems.iter().any(|b| {
                let p = psi_x(&k, &x, &[a.clone(), b.clone()]).unwrap();
                !k.is_zero(&h.eval(&k, &p.rat_coords()))
            })
        });
        prop_assert!(hit);
    }

    // #(P ∪ Q) + #(P ∩ Q) = #P + #Q in every degree.
    #[test]
    fn census_counts_satisfy_inclusion_exclusion(a in 0usize..7, b in 0usize..7, d in 1usize..=3) {
        let k = make_field(2, 1).unwrap();
        let pts: Vec<_> = projective_points(&k, 2).unwrap().collect();
        let avoid = |i: usize| CensusPredicate::Avoids(vec![ClosedPoint::rational(&k, pts[i].coords().to_vec()).unwrap()]);
        let smooth = CensusPredicate::Smooth(SubschemeSpec::whole(&k, 2));
        let count = |p: CensusPredicate| run_census(&Experiment::new("ie", &k, 2, p, d, d)).unwrap().rows[0].hits;
        for (p, q) in [(avoid(a), avoid(b)), (avoid(a), smooth.clone())] {
            let union = count(CensusPredicate::Or(vec![p.clone(), q.clone()]));
            let inter = count(CensusPredicate::And(vec![p.clone(), q.clone()]));
            prop_assert_eq!(union + inter, count(p) + count(q));
        }
    }

    // I^Z_d is exactly the set of forms of S_d vanishing at the points of Z.
    #[test]
    fn vanishing_piece_matches_filtered_forms(mask in 1u32..128, d in 1usize..=3, q in prop::sample::select(vec![2u64, 3])) {
        let k = make_field(q, 1).unwrap();
        let all: Vec<_> = projective_points(&k, 2).unwrap().collect();
        let pts: Vec<ClosedPoint> = all
            .iter()
            .enumerate()
            .filter(|(i, _)| *i < 7 && mask >> i & 1 == 1)
            .map(|(_, p)| ClosedPoint::rational(&k, p.coords().to_vec()).unwrap())
            .collect();
        let z = SubschemeSpec::from_points(&k, 2, pts.clone()).unwrap();
        let piece = z.vanishing_piece(d).unwrap();
        let mut filtered = 0u128;
        for f in FormSpace::full(&k, 2, d).iter().unwrap() {
            let vanishes = pts.iter().all(|p| p.value(&f).unwrap() == Fe::ZERO);
            prop_assert_eq!(vanishes, piece.contains(&k, &f));
            filtered += vanishes as u128;
        }
        prop_assert_eq!(filtered, piece.space(&k).size());
    }

    // Smoothness and irreducibility do not see a renaming of the variables.
    #[test]
    fn predicates_are_permutation_invariant(index in any::<u64>(), d in 2usize..=3, perm in Just(vec![0usize, 1, 2]).prop_shuffle()) {
        let k = make_field(2, 1).unwrap();
        let space = FormSpace::full(&k, 2, d);
        let f = space.member_at(index as u128 % space.size());
        let g = f.permute_vars(&k, &perm).unwrap();
        let p2 = SubschemeSpec::whole(&k, 2);
        prop_assert_eq!(
            is_smooth_section(&p2, &f, SmoothMode::Exact).unwrap().flag,
            is_smooth_section(&p2, &g, SmoothMode::Exact).unwrap().flag
        );
        prop_assert_eq!(
            is_irreducible_section(&k, &f, false).unwrap().flag,
            is_irreducible_section(&k, &g, false).unwrap().flag
        );
    }
}
