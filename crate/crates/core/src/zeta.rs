//! Truncated zeta Euler products and closed-form density predictions.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scheme::PointCensus;

/// A truncated Euler product together with a bound on the truncation error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZetaValue {
    /// `prod_{r <= B} (1 - q^{-s r})^{-b_r}`.
    pub value: f64,
    /// The true value lies in `[value, value * exp(log_error)]`.
    pub log_error: f64,
    pub depth: usize,
}

impl ZetaValue {
    /// `1/zeta` with an absolute error bound.
    pub fn inverse(&self) -> (f64, f64) {
        let inv = 1.0 / self.value;
        (inv, inv * (1.0 - (-self.log_error).exp()))
    }
}

/// `zeta_X(s)` truncated at closed points of degree `<= B`.
///
/// With `b_r <= a_r <= 2 delta q^{r m}` and `-log(1 - x) <= 2x` for
/// `x <= 1/2`, the omitted factors contribute at most
/// `4 delta q^{-(B+1)(s-m)} / (1 - q^{-(s-m)})` to `log zeta`.
pub fn zeta_truncated(census: &PointCensus, s: u32, depth: usize) -> Result<ZetaValue> {
    if census.dim >= 0 && s as i64 <= census.dim {
        return Err(Error::Divergence { s, dim: census.dim });
    }
    if depth > census.depth() {
        return Err(Error::InvalidArgument(format!(
            "truncation {depth} exceeds census depth {}",
            census.depth()
        )));
    }
    let q = census.q as f64;
    let mut log = 0.0f64;
    for (i, &b) in census.b[..depth].iter().enumerate() {
        let x = q.powf(-(s as f64) * (i + 1) as f64);
        log -= b as f64 * (-x).ln_1p();
    }
    let log_error = if census.dim < 0 {
        0.0
    } else {
        let gap = s as f64 - census.dim as f64;
        4.0 * census.degree_bound as f64 * q.powf(-((depth + 1) as f64) * gap) / (1.0 - q.powf(-gap))
    };
    Ok(ZetaValue {
        value: log.exp(),
        log_error,
        depth,
    })
}

fn rational_pow(q: u64, e: i64) -> BigRational {
    let base = BigInt::from(q).pow(e.unsigned_abs() as u32);
    if e >= 0 {
        BigRational::from_integer(base)
    } else {
        BigRational::new(BigInt::one(), base)
    }
}

/// `1/zeta_{P^n}(s) = prod_{i=0}^{n} (1 - q^{i-s})`, exactly.
pub fn inverse_zeta_projective(q: u64, n: usize, s: u32) -> Result<BigRational> {
    if s as usize <= n {
        return Err(Error::Divergence { s, dim: n as i64 });
    }
    let mut acc = BigRational::one();
    for i in 0..=n as i64 {
        acc *= BigRational::one() - rational_pow(q, i - s as i64);
    }
    Ok(acc)
}

/// `1/zeta` of a finite set of closed points with the given degrees.
pub fn inverse_zeta_points(q: u64, degrees: &[u32], s: u32) -> BigRational {
    let mut acc = BigRational::one();
    for &d in degrees {
        acc *= BigRational::one() - rational_pow(q, -((s * d) as i64));
    }
    acc
}

/// A locally closed piece whose zeta function enters a prediction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Region {
    /// `P^n` minus finitely many closed points (listed by degree).
    ProjectiveSpace { n: usize, removed: Vec<u32> },
    /// Finitely many closed points (listed by degree).
    Points { degrees: Vec<u32> },
    /// Anything else, known through a point census.
    Census { census: PointCensus },
}

/// `1/zeta` of a region: exact when possible, else a float with error.
#[derive(Clone, Debug)]
enum InverseZeta {
    Exact(BigRational),
    Approx { value: f64, error: f64 },
}

fn inverse_zeta(q: u64, region: &Region, s: u32, depth: usize) -> Result<InverseZeta> {
    Ok(match region {
        Region::ProjectiveSpace { n, removed } => {
            let whole = inverse_zeta_projective(q, *n, s)?;
            InverseZeta::Exact(whole / inverse_zeta_points(q, removed, s))
        }
        Region::Points { degrees } => InverseZeta::Exact(inverse_zeta_points(q, degrees, s)),
        Region::Census { census } => {
            let z = zeta_truncated(census, s, depth.min(census.depth()))?;
            let (value, error) = z.inverse();
            InverseZeta::Approx { value, error }
        }
    })
}

/// One stratum `U_i` of the smooth-section product: the region `U ∖ V`,
/// the closed points of `V = U ∩ Z` with their embedding dimensions, and
/// the pure dimension `m`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Stratum {
    pub m: usize,
    pub u_minus_v: Region,
    /// `(degree, edim)` for every closed point of `V`.
    pub v_points: Vec<(u32, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaylorFactor {
    /// `#T`
    pub t_size: u128,
    /// `#H^0(Y, O_Y)`
    pub h0_size: u128,
}

/// The supported problem shapes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "shape")]
pub enum Shape {
    /// `H_f` avoids a finite set `W` disjoint from `Z`.
    Avoidance { q: u64, degrees: Vec<u32> },
    /// Smooth sections, optionally with a Taylor condition.
    Smooth {
        q: u64,
        strata: Vec<Stratum>,
        taylor: Option<TaylorFactor>,
        truncation: usize,
    },
    /// `H_f` contains a subscheme `W` of positive dimension not in `Z`.
    Containment { w_dim: i64 },
    /// Irreducibility of sections of an irreducible `X` with
    /// `codim(Z ∩ X) >= 2`.
    Irreducibility { x_dim: i64, z_codim: i64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FormulaTag {
    Avoidance,
    PoonenProduct,
    TaylorScaled,
    Zero,
    One,
}

mod rational_text {
    use num_rational::BigRational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<BigRational>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(r) => s.serialize_str(&r.to_string()),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<BigRational>, D::Error> {
        let text: Option<String> = Option::deserialize(d)?;
        text.map(|t| t.parse::<BigRational>().map_err(serde::de::Error::custom)).transpose()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityPrediction {
    pub formula: FormulaTag,
    /// Exact value, present when every factor has a closed form.
    #[serde(with = "rational_text")]
    pub exact: Option<BigRational>,
    pub value: f64,
    /// Absolute truncation error (zero when exact).
    pub error_bound: f64,
    pub truncation: Option<usize>,
    pub inputs: Shape,
}

impl DensityPrediction {
    fn exact(formula: FormulaTag, r: BigRational, inputs: Shape) -> Self {
        DensityPrediction {
            formula,
            value: r.to_f64().unwrap_or(f64::NAN),
            exact: Some(r),
            error_bound: 0.0,
            truncation: None,
            inputs,
        }
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }
}

/// Evaluates the density formula for a supported shape.
pub fn predict_density(shape: &Shape) -> Result<DensityPrediction> {
    match shape {
        Shape::Avoidance { q, degrees } => Ok(DensityPrediction::exact(
            FormulaTag::Avoidance,
            inverse_zeta_points(*q, degrees, 1),
            shape.clone(),
        )),
        Shape::Containment { w_dim } => {
            if *w_dim < 1 {
                return Err(Error::Unsupported("containment prediction needs dim W >= 1".into()));
            }
            Ok(DensityPrediction::exact(FormulaTag::Zero, BigRational::zero(), shape.clone()))
        }
        Shape::Irreducibility { x_dim, z_codim } => {
            if *x_dim < 2 || *z_codim < 2 {
                return Err(Error::Unsupported("irreducibility prediction needs dim X >= 2 and codim Z >= 2".into()));
            }
            Ok(DensityPrediction::exact(FormulaTag::One, BigRational::one(), shape.clone()))
        }
        Shape::Smooth {
            q,
            strata,
            taylor,
            truncation,
        } => {
            let mut exact = BigRational::one();
            let mut approx = 1.0f64;
            let mut rel_error = 0.0f64;
            let mut is_exact = true;
            let mut push = |f: InverseZeta| match f {
                InverseZeta::Exact(r) => exact *= r,
                InverseZeta::Approx { value, error } => {
                    is_exact = false;
                    approx *= value;
                    rel_error += error / value;
                }
            };
            for st in strata {
                push(inverse_zeta(*q, &st.u_minus_v, st.m as u32 + 1, *truncation)?);
                let max_e = st.v_points.iter().map(|&(_, e)| e).max();
                if let Some(e) = max_e.filter(|&e| e >= st.m) {
                    return Err(Error::Unsupported(format!(
                        "imposed subscheme has embedding dimension {e} >= {} at some point",
                        st.m
                    )));
                }
                for e in 0..st.m {
                    let degs: Vec<u32> = st.v_points.iter().filter(|&&(_, pe)| pe == e).map(|&(d, _)| d).collect();
                    push(InverseZeta::Exact(inverse_zeta_points(*q, &degs, (st.m - e) as u32)));
                }
            }
            let formula = if let Some(t) = taylor {
                if t.h0_size == 0 || t.t_size > t.h0_size {
                    return Err(Error::InvalidArgument("Taylor set must be a subset of H^0(Y, O_Y)".into()));
                }
                exact *= BigRational::new(BigInt::from(t.t_size), BigInt::from(t.h0_size));
                FormulaTag::TaylorScaled
            } else {
                FormulaTag::PoonenProduct
            };
            if is_exact {
                return Ok(DensityPrediction::exact(formula, exact, shape.clone()));
            }
            let value = exact.to_f64().unwrap_or(f64::NAN) * approx;
            // each truncated inverse factor overestimates by a relative
            // amount rel_i, and 1 - prod(1 - rel_i) <= sum rel_i
            let error_bound = value * rel_error;
            Ok(DensityPrediction {
                formula,
                exact: None,
                value,
                error_bound,
                truncation: Some(*truncation),
                inputs: shape.clone(),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn truncated_products_match_closed_forms() {
        let p1 = PointCensus::projective_space(2, 1, 20).unwrap();
        let (v, err) = zeta_truncated(&p1, 2, 20).unwrap().inverse();
        assert!((v - 0.375).abs() < 1e-6 && err < 1e-5);
        let p2 = PointCensus::projective_space(2, 2, 20).unwrap();
        let (v, _) = zeta_truncated(&p2, 3, 20).unwrap().inverse();
        assert!((v - 0.328125).abs() < 1e-6);
        assert_eq!(inverse_zeta_projective(2, 2, 3).unwrap(), r(21, 64));
        assert_eq!(inverse_zeta_projective(2, 1, 2).unwrap(), r(3, 8));
    }

    #[test]
    fn error_bound_covers_the_true_value() {
        let p2 = PointCensus::projective_space(2, 2, 20).unwrap();
        let truth = 21.0 / 64.0;
        for b in 1..=20 {
            let (v, err) = zeta_truncated(&p2, 3, b).unwrap().inverse();
            assert!(v >= truth - 1e-12, "depth {b}");
            assert!(v - truth <= err + 1e-12, "depth {b}: {v} vs {truth} with bound {err}");
        }
    }

    #[test]
    fn empty_scheme_has_zeta_one() {
        let z = zeta_truncated(&PointCensus::empty(2, 5), 1, 5).unwrap();
        assert_eq!((z.value, z.log_error), (1.0, 0.0));
    }

    #[test]
    fn divergence_is_an_error() {
        let p2 = PointCensus::projective_space(2, 2, 5).unwrap();
        assert!(matches!(zeta_truncated(&p2, 2, 5), Err(Error::Divergence { .. })));
        assert!(zeta_truncated(&p2, 3, 6).is_err());
    }

    #[test]
    fn avoidance_predictions() {
        let one = predict_density(&Shape::Avoidance { q: 2, degrees: vec![1] }).unwrap();
        assert_eq!(one.exact, Some(r(1, 2)));
        let two = predict_density(&Shape::Avoidance { q: 2, degrees: vec![1, 2] }).unwrap();
        assert_eq!(two.exact, Some(r(3, 8)));
        assert_eq!(two.formula, FormulaTag::Avoidance);
    }

    fn plane(removed: Vec<u32>) -> Shape {
        Shape::Smooth {
            q: 2,
            strata: vec![Stratum {
                m: 2,
                u_minus_v: Region::ProjectiveSpace { n: 2, removed },
                v_points: vec![],
            }],
            taylor: None,
            truncation: 12,
        }
    }

    #[test]
    fn smooth_plane_curves() {
        let p = predict_density(&plane(vec![])).unwrap();
        assert_eq!(p.exact, Some(r(21, 64)));
        assert_eq!(p.formula, FormulaTag::PoonenProduct);
    }

    #[test]
    fn census_regions_give_bounded_approximations() {
        let shape = Shape::Smooth {
            q: 2,
            strata: vec![Stratum {
                m: 2,
                u_minus_v: Region::Census {
                    census: PointCensus::projective_space(2, 2, 12).unwrap(),
                },
                v_points: vec![],
            }],
            taylor: None,
            truncation: 12,
        };
        let p = predict_density(&shape).unwrap();
        assert!(p.exact.is_none());
        assert!((p.value - 21.0 / 64.0).abs() <= p.error_bound + 1e-12);
        assert!(p.error_bound < 2e-3);
    }

    #[test]
    fn taylor_factor_scales_the_prediction() {
        let mut shape = plane(vec![1]);
        if let Shape::Smooth { taylor, .. } = &mut shape {
            *taylor = Some(TaylorFactor { t_size: 1, h0_size: 2 });
        }
        let p = predict_density(&shape).unwrap();
        // (1/2) * (21/64) / (1 - 1/8)
        assert_eq!(p.exact, Some(r(3, 16)));
        assert_eq!(p.formula, FormulaTag::TaylorScaled);
        if let Shape::Smooth { taylor, .. } = &mut shape {
            *taylor = Some(TaylorFactor { t_size: 2, h0_size: 2 });
        }
        let full = predict_density(&shape).unwrap();
        assert_eq!(full.exact, predict_density(&plane(vec![1])).unwrap().exact);
    }

    #[test]
    fn imposed_point() {
        let shape = Shape::Smooth {
            q: 2,
            strata: vec![Stratum {
                m: 2,
                u_minus_v: Region::ProjectiveSpace { n: 2, removed: vec![1] },
                v_points: vec![(1, 0)],
            }],
            taylor: None,
            truncation: 12,
        };
        assert_eq!(predict_density(&shape).unwrap().exact, Some(r(9, 32)));
    }

    #[test]
    fn zero_and_one() {
        assert_eq!(predict_density(&Shape::Containment { w_dim: 1 }).unwrap().exact, Some(r(0, 1)));
        assert!(predict_density(&Shape::Containment { w_dim: 0 }).is_err());
        let one = predict_density(&Shape::Irreducibility { x_dim: 2, z_codim: 2 }).unwrap();
        assert_eq!(one.exact, Some(r(1, 1)));
        assert!(predict_density(&Shape::Irreducibility { x_dim: 2, z_codim: 1 }).is_err());
    }

    #[test]
    fn prediction_json_round_trip() {
        let p = predict_density(&plane(vec![])).unwrap();
        let json = serde_json::to_string(&p).unwrap();
        assert!(json.contains("\"21/64\""));
        let back: DensityPrediction = serde_json::from_str(&json).unwrap();
        assert_eq!(back, p);
    }

    proptest! {
        #[test]
        fn inverse_is_monotone_in_depth(q in prop::sample::select(vec![2u64, 3, 4, 5]), n in 1usize..3, extra in 1u32..3) {
            let census = PointCensus::projective_space(q, n, 10).unwrap();
            let s = n as u32 + extra;
            let mut prev = f64::INFINITY;
            let mut prev_err = f64::INFINITY;
            for b in 1..=10 {
                let (v, err) = zeta_truncated(&census, s, b).unwrap().inverse();
                prop_assert!(v <= prev + 1e-15);
                prop_assert!(err <= prev_err);
                prev = v;
                prev_err = err;
            }
            let exact = inverse_zeta_projective(q, n, s).unwrap().to_f64().unwrap();
            prop_assert!((prev - exact).abs() <= prev_err + 1e-12);
        }
    }
}
