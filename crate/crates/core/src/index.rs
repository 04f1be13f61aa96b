//! Equivariant Lefschetz numbers, the Kawasaki orbifold index, localized (g)-indices
//! and the identity `Σ_(g) ind_(g) = ind`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::charclass::{integrand, orbifold_integrate, ComponentCurvature, Convention};
use crate::error::{Error, Result};
use crate::rational::{frac, int, Rat};
use crate::scalar::Scalar;
use crate::sector::{
    build_cutoff, enumerate_sectors, fixed_set_cutoff, ClassHandle, Element, FixedLocus, FixedPoint, FixedSetWeights,
    OperatorKind, QuotientModel, SectionChoice,
};

/// Normalization route fixed by the operator kind.
pub fn convention_for(model: &QuotientModel) -> Convention {
    match model.bundle.operator {
        OperatorKind::Dolbeault => Convention::Todd,
        OperatorKind::SpincDirac => Convention::AHat,
    }
}

fn point_curvature(p: &FixedPoint, weight: Rat) -> ComponentCurvature {
    ComponentCurvature {
        dimension: 0,
        tangent_total: int(0),
        bundle_total: int(0),
        area: 0.0,
        normal_turn: Some(frac(-p.tangent_turn)),
        tangent_turn: p.tangent_turn,
        fiber_turn: p.fiber_turn,
        weight,
    }
}

fn full_curvature(model: &QuotientModel, weight: Rat) -> ComponentCurvature {
    ComponentCurvature {
        dimension: 2,
        tangent_total: int(model.euler_characteristic()),
        bundle_total: int(model.bundle.twist_degree),
        area: model.area(),
        normal_turn: None,
        tangent_turn: int(0),
        fiber_turn: int(0),
        weight,
    }
}

/// Pointwise Lefschetz term `e^{2πiβ}/det_ℂ(1 − dγ⁻¹)`-type value in the given route.
pub fn point_term<S: Scalar>(p: &FixedPoint, convention: Convention) -> Result<S> {
    Ok(integrand::<S>(&point_curvature(p, int(1)), convention)?.constant_term())
}

/// `∫_M` of the untwisted-sector integrand over the covering surface (one cell for the plane).
pub fn full_term<S: Scalar>(model: &QuotientModel, convention: Convention) -> Result<S> {
    let curv = full_curvature(model, int(1));
    Ok(orbifold_integrate(&integrand::<S>(&curv, convention)?, int(1)))
}

pub fn lefschetz_with<S: Scalar>(model: &QuotientModel, g: &Element, convention: Convention) -> Result<S> {
    if !model.is_finite() {
        return Err(Error::Domain("Lefschetz numbers need a finite group acting on a compact model".into()));
    }
    match model.fixed_points(g)? {
        FixedLocus::Empty => Ok(S::zero()),
        FixedLocus::Full => full_term(model, convention),
        FixedLocus::Points(points) => {
            points.iter().try_fold(S::zero(), |acc, p| Ok(acc + point_term::<S>(p, convention)?))
        }
    }
}

/// `L(γ) = Tr(γ|ker D⁺) − Tr(γ|ker D⁻)` by the fixed-point formula.
pub fn equivariant_lefschetz<S: Scalar>(model: &QuotientModel, g: &Element) -> Result<S> {
    lefschetz_with(model, g, convention_for(model))
}

/// Index of the quotient as an orbifold: sectors for finite models, orbifold points for the plane.
pub fn kawasaki_index<S: Scalar>(model: &QuotientModel) -> Result<S> {
    let conv = convention_for(model);
    match model.cryst() {
        None => {
            let mut total = S::zero();
            for c in enumerate_sectors(model)? {
                let curv = ComponentCurvature::from_component(&c);
                total = total + orbifold_integrate(&integrand::<S>(&curv, conv)?, curv.weight);
            }
            Ok(total)
        }
        Some(group) => {
            let mut total = full_term::<S>(model, conv)? * S::from_rat(Rat::new(1, group.point_group_order() as i64));
            for (_, stabilizer) in group.orbifold_points() {
                let w = S::from_rat(Rat::new(1, stabilizer.len() as i64));
                for h in stabilizer.iter().filter(|h| !h.is_identity()) {
                    match model.fixed_points(&Element::Affine(h.clone()))? {
                        FixedLocus::Points(p) => total = total + point_term::<S>(&p[0], conv)? * w.clone(),
                        _ => return Err(Error::Structural("stabilizer element without an isolated fixed point".into())),
                    }
                }
            }
            Ok(total)
        }
    }
}

/// `(1/|H|)Σ_γ L(γ)` and `Σ_(γ) L(γ)/|Z(γ)|`.
pub fn finite_assembly<S: Scalar>(model: &QuotientModel) -> Result<(S, S)> {
    let t = model.finite_table().ok_or_else(|| Error::Domain("assembly needs a finite group".into()))?;
    let n = t.order();
    let values: Vec<S> = (0..n).map(|g| equivariant_lefschetz::<S>(model, &Element::Finite(g))).collect::<Result<_>>()?;
    let by_element = values.iter().cloned().fold(S::zero(), |a, b| a + b) * S::from_rat(Rat::new(1, n as i64));
    let by_class = t
        .classes()
        .iter()
        .map(|c| values[c[0]].clone() * S::from_rat(Rat::new(1, t.centralizer(c[0]).len() as i64)))
        .fold(S::zero(), |a, b| a + b);
    Ok((by_element, by_class))
}

pub fn localized_index_with<S: Scalar>(
    model: &QuotientModel,
    class: &ClassHandle,
    section: &SectionChoice,
    convention: Convention,
) -> Result<S> {
    if matches!(model.fixed_points(&class.rep)?, FixedLocus::Empty) {
        return Ok(S::zero());
    }
    let cutoff = build_cutoff(model)?;
    match fixed_set_cutoff(model, &cutoff, class, section)? {
        FixedSetWeights::Full { integral } => Ok(integral.to_scalar::<S>()? * full_term::<S>(model, convention)?),
        FixedSetWeights::Points(points) => points.iter().try_fold(S::zero(), |acc, (p, w)| {
            Ok(acc + w.to_scalar::<S>()? * point_term::<S>(p, convention)?)
        }),
    }
}

/// `ind_(g) = ∫_{M^g} c^(g)·(localized integrand)`.
pub fn localized_index<S: Scalar>(model: &QuotientModel, class: &ClassHandle, section: &SectionChoice) -> Result<S> {
    localized_index_with(model, class, section, convention_for(model))
}

fn residual<S: Scalar>(a: &S, b: &S) -> f64 {
    (a.to_c64() - b.to_c64()).norm()
}

fn near_integer(z: Complex64, tol: f64) -> bool {
    z.im.abs() < tol && (z.re - z.re.round()).abs() < tol
}

#[derive(Clone, Debug, Serialize)]
pub struct IndexReport<S> {
    pub model: String,
    pub per_class: BTreeMap<String, S>,
    pub kawasaki_total: S,
    /// `Σ_(g) ind_(g)`
    pub assembly_total: S,
    /// both groupings of the finite assembly, when the group is finite
    pub finite_assembly: Option<(S, S)>,
    pub oracle_value: Option<S>,
    pub residuals: BTreeMap<String, f64>,
    pub psc_obstruction: Option<bool>,
    pub notes: Vec<String>,
    pub integrality_verdict: bool,
    /// `ind_(g) + ind_(g⁻¹) ∈ ℝ` for every class
    pub paired_reality: bool,
}

impl<S: Scalar> IndexReport<S> {
    /// Every residual below the tolerance and an integral total.
    pub fn passes(&self, tol: f64) -> bool {
        self.integrality_verdict && self.paired_reality && self.residuals.values().all(|r| *r < tol)
    }
}

/// Per-class localized indices, their sum, and every cross-check available for the model.
pub fn sum_identity<S: Scalar>(model: &QuotientModel, section: &SectionChoice) -> Result<IndexReport<S>> {
    let tol = model.options.tolerance;
    let conv = convention_for(model);
    let classes = model.classes();
    let values: Vec<(String, S, S)> = classes
        .par_iter()
        .map(|c| {
            let main = localized_index_with::<S>(model, c, section, conv)?;
            let other = localized_index_with::<S>(model, c, section, other_route(conv))?;
            Ok((c.label.clone(), main, other))
        })
        .collect::<Result<_>>()?;
    let mut per_class = BTreeMap::new();
    let mut residuals = BTreeMap::new();
    let mut route_gap: f64 = 0.0;
    for (label, main, other) in &values {
        route_gap = route_gap.max(residual(main, other));
        per_class.insert(label.clone(), main.clone());
    }
    let assembly_total = per_class.values().cloned().fold(S::zero(), |a, b| a + b);
    let kawasaki_total = kawasaki_index::<S>(model)?;
    residuals.insert("sum_identity".into(), residual(&assembly_total, &kawasaki_total));
    residuals.insert("route_agreement".into(), route_gap);

    let finite = if model.is_finite() {
        let (a, b) = finite_assembly::<S>(model)?;
        residuals.insert("assembly_groupings".into(), residual(&a, &b));
        residuals.insert("assembly_vs_kawasaki".into(), residual(&a, &kawasaki_total));
        Some((a, b))
    } else {
        None
    };

    let mut paired_reality = true;
    for (c, (_, v, _)) in classes.iter().zip(&values) {
        let inv = model.class_of(&model.inverse(&c.rep));
        let w = &per_class[&inv.label];
        if (v.clone() + w.clone()).to_c64().im.abs() >= tol {
            paired_reality = false;
        }
    }

    let integrality_verdict = near_integer(kawasaki_total.to_c64(), tol);
    let mut report = IndexReport {
        model: model.name.clone(),
        per_class,
        kawasaki_total,
        assembly_total,
        finite_assembly: finite,
        oracle_value: None,
        residuals,
        psc_obstruction: None,
        notes: Vec::new(),
        integrality_verdict,
        paired_reality,
    };
    let (flag, note) = psc_flag(&report, model);
    report.psc_obstruction = flag;
    report.notes.extend(note);
    if !model.is_finite() {
        report.notes.push("translation classes have empty fixed sets and contribute 0".into());
    }
    Ok(report)
}

fn other_route(c: Convention) -> Convention {
    match c {
        Convention::Todd => Convention::AHat,
        Convention::AHat => Convention::Todd,
    }
}

/// Obstruction to positive scalar curvature: some localized index is nonzero (spin^c kind only).
pub fn psc_flag<S: Scalar>(report: &IndexReport<S>, model: &QuotientModel) -> (Option<bool>, Option<String>) {
    match model.bundle.operator {
        OperatorKind::SpincDirac => {
            let tol = model.options.tolerance;
            (Some(report.per_class.values().any(|v| v.to_c64().norm() >= tol)), None)
        }
        OperatorKind::Dolbeault => {
            (None, Some("scalar-curvature obstruction flag is only defined for spin^c Dirac operators".into()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclotomic::Cyclotomic;
    use crate::rational::rat;
    use crate::sector::tests::{e_z4, p4, sphere};
    use crate::sector::{CutoffKind, Geometry, Mode, ModelOptions};
    use crate::AffineIsometry;

    type C = Cyclotomic;

    fn c(r: Rat) -> C {
        C::from_rat(r)
    }

    #[test]
    fn lefschetz_on_square_torus() {
        let m = e_z4();
        let t = m.finite_table().unwrap();
        let by_name = |n: &str| Element::Finite((0..t.order()).find(|&g| t.name(g) == n).unwrap());
        let values: Vec<C> = ["e", "rot1_2", "rot1_4", "rot3_4"]
            .iter()
            .map(|n| equivariant_lefschetz::<C>(&m, &by_name(n)).unwrap())
            .collect();
        assert_eq!(values[0], C::zero());
        assert_eq!(values[1], c(int(2)));
        assert_eq!(values[2], C::one() + C::i());
        assert_eq!(values[3], C::one() - C::i());
    }

    #[test]
    fn kawasaki_and_assembly_on_finite_models() {
        let m = e_z4();
        assert_eq!(kawasaki_index::<C>(&m).unwrap(), C::one());
        let (a, b) = finite_assembly::<C>(&m).unwrap();
        assert_eq!(a, C::one());
        assert_eq!(b, C::one());
        let s = sphere(3, 7);
        assert_eq!(kawasaki_index::<C>(&s).unwrap(), c(int(3)));
        for k in 0..6 {
            assert_eq!(kawasaki_index::<C>(&sphere(1, k)).unwrap(), c(int(k + 1)));
        }
    }

    #[test]
    fn sphere_lefschetz_is_a_geometric_sum() {
        for n in 2..=6usize {
            for k in 0..=5i64 {
                let m = sphere(n, k);
                for j in 1..n {
                    let expected = (0..=k).fold(C::zero(), |acc, mm| acc + C::root_of_unity(rat(j as i64 * mm, n as i64)));
                    assert_eq!(equivariant_lefschetz::<C>(&m, &Element::Finite(j)).unwrap(), expected, "n={n} k={k} j={j}");
                }
            }
        }
    }

    #[test]
    fn p4_localized_values() {
        let m = p4(ModelOptions::default());
        let s = SectionChoice::Canonical;
        let get = |l: &str| localized_index::<C>(&m, &m.resolve(l).unwrap(), &s).unwrap();
        assert_eq!(get("e"), C::zero());
        assert_eq!(get("t10"), C::zero());
        assert_eq!(get("r2_edge"), c(rat(1, 4)));
        assert_eq!(get("r_origin"), (C::one() + C::i()) * c(rat(1, 8)));
        assert_eq!(get("rot3_4@0,0"), (C::one() - C::i()) * c(rat(1, 8)));
        assert_eq!(get("rot1_2@0,0"), c(rat(1, 8)));
        let report = sum_identity::<C>(&m, &s).unwrap();
        assert_eq!(report.assembly_total, C::one());
        assert_eq!(report.kawasaki_total, C::one());
        assert!(report.passes(1e-12), "{report:?}");
        assert_eq!(report.psc_obstruction, None);
        assert_eq!(report.per_class.len(), 8);
    }

    #[test]
    fn localized_index_is_section_and_representative_independent() {
        let shifted = ModelOptions { cutoff: CutoffKind::Indicator { shift: [rat(-2, 7), rat(3, 5)] }, ..ModelOptions::default() };
        let m = p4(shifted);
        let base = p4(ModelOptions::default());
        let h = Element::Affine(AffineIsometry::new([[0, 1], [-1, 0]], [int(1), int(3)]));
        for class in m.classes() {
            let v = localized_index::<C>(&base, &base.resolve(&class.label).unwrap(), &SectionChoice::Canonical).unwrap();
            for s in [SectionChoice::Canonical, SectionChoice::Scrambled(11), SectionChoice::LeftTranslated(h.clone())] {
                assert_eq!(localized_index::<C>(&m, &class, &s).unwrap(), v, "{} {s:?}", class.label);
            }
            // another representative of the same class
            if let Element::Affine(g) = &class.rep {
                let k = AffineIsometry::new([[0, -1], [1, 0]], [int(5), int(-2)]);
                let other = m.class_of(&Element::Affine(g.conjugate_by(&k)));
                assert_eq!(other.label, class.label);
            }
        }
    }

    #[test]
    fn smooth_cutoff_matches_indicator_in_float_mode() {
        let m = p4(ModelOptions { mode: Mode::Float, tolerance: 1e-10, cutoff: CutoffKind::Smooth });
        let r = sum_identity::<Complex64>(&m, &SectionChoice::Canonical).unwrap();
        assert!((r.assembly_total - Complex64::new(1.0, 0.0)).norm() < 1e-8);
        assert!(matches!(
            localized_index::<C>(&m, &m.resolve("r_origin").unwrap(), &SectionChoice::Canonical),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn float_and_exact_agree() {
        let m = e_z4();
        let exact = sum_identity::<C>(&m, &SectionChoice::Canonical).unwrap();
        let float = sum_identity::<Complex64>(&m, &SectionChoice::Canonical).unwrap();
        for (k, v) in &exact.per_class {
            assert!((v.to_c64() - float.per_class[k]).norm() < 1e-14);
        }
    }

    #[test]
    fn lattice_only_group_has_zero_total() {
        let g = crate::CrystGroup::new(crate::sector::tests::square(), vec![AffineIsometry::translation_by([int(1), int(0)])]).unwrap();
        let m = QuotientModel::new(
            "z2",
            Geometry::Plane { group: g },
            crate::sector::tests::bundle(OperatorKind::Dolbeault, 0),
            ModelOptions::default(),
            BTreeMap::new(),
        )
        .unwrap();
        let r = sum_identity::<C>(&m, &SectionChoice::Canonical).unwrap();
        assert_eq!(r.assembly_total, C::zero());
        assert_eq!(r.kawasaki_total, C::zero());
        assert_eq!(r.per_class.len(), 1);
    }

    #[test]
    fn psc_flag_gating() {
        let mut m = p4(ModelOptions::default());
        m.bundle.operator = OperatorKind::SpincDirac;
        let r = sum_identity::<C>(&m, &SectionChoice::Canonical).unwrap();
        assert_eq!(r.psc_obstruction, Some(true));
        assert_eq!(r.kawasaki_total, C::one());
        let g = crate::CrystGroup::new(crate::sector::tests::square(), vec![]).unwrap();
        let b = crate::sector::tests::bundle(OperatorKind::SpincDirac, 0);
        let flat = QuotientModel::new("flat", Geometry::Plane { group: g }, b, ModelOptions::default(), BTreeMap::new()).unwrap();
        assert_eq!(sum_identity::<C>(&flat, &SectionChoice::Canonical).unwrap().psc_obstruction, Some(false));
    }
}
