//! Quotient models, twisted-sector enumeration and fiber eigen-data.

pub mod cutoff;

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::affine::{fixed_set_torus, point_label, validate_point_part};
use crate::group::lattice::{vfrac, RMat2, Vec2, IDENTITY};
use crate::group::{AffineIsometry, CrystGroup, FiniteGroupTable, FixedSet};
use crate::rational::{fmt_rat, frac, int, to_f64, Rat};

pub use cutoff::{build_cutoff, fixed_set_cutoff, Cutoff, CutoffKind, FixedSetWeights, SectionChoice, Weight};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorKind {
    Dolbeault,
    SpincDirac,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Exact,
    Float,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BundleSpec {
    pub operator: OperatorKind,
    pub twist_degree: i64,
    /// Flat character on the trivial line bundle: one turn per generator.
    pub character: Option<Vec<Rat>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModelOptions {
    pub mode: Mode,
    pub tolerance: f64,
    pub cutoff: CutoffKind,
}

impl Default for ModelOptions {
    fn default() -> Self {
        ModelOptions { mode: Mode::Exact, tolerance: 1e-10, cutoff: CutoffKind::Indicator { shift: [int(0), int(0)] } }
    }
}

#[derive(Clone, Debug)]
pub enum Geometry {
    /// Crystallographic group acting on the Euclidean plane.
    Plane { group: CrystGroup },
    /// Finite group of affine isometries of ℝ²/ℤ², elements stored modulo ℤ².
    Torus { gram: RMat2, generators: Vec<AffineIsometry>, elements: Vec<AffineIsometry>, table: FiniteGroupTable },
    /// ℤ/n rotating the round sphere about the polar axis; element j turns by j/n.
    Sphere { radius: Rat, table: FiniteGroupTable },
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Element {
    Finite(usize),
    Affine(AffineIsometry),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassKind {
    FiniteClass,
    InfiniteClass,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassHandle {
    pub label: String,
    pub rep: Element,
    pub kind: ClassKind,
    /// Point-part class label (`e`, `rot1_4`, `refl`, ...).
    pub point_label: String,
    /// Rotation center in `[0,1)²` for plane rotation classes.
    pub center: Option<Vec2>,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Location {
    Lattice(Vec2),
    NorthPole,
    SouthPole,
}

impl Location {
    pub fn describe(&self) -> String {
        match self {
            Location::Lattice(v) => format!("({}, {})", fmt_rat(&v[0]), fmt_rat(&v[1])),
            Location::NorthPole => "north pole".into(),
            Location::SouthPole => "south pole".into(),
        }
    }
}

/// An isolated fixed point with the rotation turn θ of `dg` on `T^{1,0}` and the turn β of
/// the pulled-back fiber of the twisting line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixedPoint {
    pub location: Location,
    pub tangent_turn: Rat,
    pub fiber_turn: Rat,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FixedLocus {
    Empty,
    Full,
    Points(Vec<FixedPoint>),
}

/// Fiber eigen-turns of the class representative, split by grading.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FiberEigenData {
    #[serde(serialize_with = "ser_turns")]
    pub even: Vec<Rat>,
    #[serde(serialize_with = "ser_turns")]
    pub odd: Vec<Rat>,
}

fn ser_turns<S: serde::Serializer>(v: &[Rat], s: S) -> std::result::Result<S::Ok, S::Error> {
    v.iter().map(fmt_rat).collect::<Vec<_>>().serialize(s)
}

#[derive(Clone, Debug, PartialEq)]
pub enum ComponentGeometry {
    /// One centralizer orbit of isolated fixed points.
    Isolated { point: FixedPoint, orbit_size: usize },
    /// Whole covering surface (or one lattice cell of the plane).
    Full { dimension: u32, euler: i64, twist: i64, area: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct SectorComponent {
    pub class: ClassHandle,
    pub geometry: ComponentGeometry,
    /// Turn φ of the normal action Φ = dg⁻¹, in `(0,1)`; absent for full components.
    pub normal_turn: Option<Rat>,
    pub local_group_order: usize,
    pub fiber: FiberEigenData,
}

impl SectorComponent {
    pub fn dimension(&self) -> u32 {
        match self.geometry {
            ComponentGeometry::Isolated { .. } => 0,
            ComponentGeometry::Full { dimension, .. } => dimension,
        }
    }

    /// Orbifold integration weight `1/|local group|`.
    pub fn weight(&self) -> Rat {
        Rat::new(1, self.local_group_order as i64)
    }
}

#[derive(Clone, Debug)]
pub struct QuotientModel {
    pub name: String,
    pub geometry: Geometry,
    pub bundle: BundleSpec,
    pub options: ModelOptions,
    /// alias → canonical class label
    pub aliases: BTreeMap<String, String>,
    /// fiber turn of the flat character, per finite element
    character: Vec<Rat>,
}

/// Name of an affine map of the torus, unique modulo ℤ².
pub fn torus_element_name(g: &AffineIsometry) -> String {
    let t = g.frac();
    let zero = *t == [int(0), int(0)];
    let base = if *g.point_part() == IDENTITY {
        if zero {
            return "e".into();
        }
        return format!("t{},{}", fmt_rat(&t[0]), fmt_rat(&t[1]));
    } else if g.orientation_preserving() {
        point_label(g.point_part())
    } else {
        let m = g.point_part();
        format!("refl[{},{};{},{}]", m[0][0], m[0][1], m[1][0], m[1][1])
    };
    if zero {
        base
    } else {
        format!("{base}+{},{}", fmt_rat(&t[0]), fmt_rat(&t[1]))
    }
}

fn sphere_element_name(j: usize, n: usize) -> String {
    if j == 0 {
        "e".into()
    } else {
        let t = Rat::new(j as i64, n as i64);
        format!("rot{}_{}", t.numer(), t.denom())
    }
}

impl QuotientModel {
    pub fn new(
        name: impl Into<String>,
        geometry: Geometry,
        bundle: BundleSpec,
        options: ModelOptions,
        aliases: BTreeMap<String, String>,
    ) -> Result<Self> {
        match &geometry {
            Geometry::Plane { .. } | Geometry::Torus { .. } if bundle.twist_degree != 0 => {
                return Err(Error::Domain(
                    "nonzero twist degree is only supported on the sphere; flat models take a flat character instead".into(),
                ))
            }
            Geometry::Plane { .. } | Geometry::Sphere { .. } if bundle.character.is_some() => {
                return Err(Error::Domain("flat characters are only supported on torus models".into()))
            }
            _ => {}
        }
        if options.mode == Mode::Exact && matches!(options.cutoff, CutoffKind::Smooth) {
            return Err(Error::Domain("the smooth cut-off is float-valued; use mode float".into()));
        }
        let character = match (&geometry, &bundle.character) {
            (Geometry::Torus { generators, elements, table, .. }, Some(turns)) => {
                character_values(generators, elements, table, turns)?
            }
            (Geometry::Torus { table, .. }, None) | (Geometry::Sphere { table, .. }, None) => {
                vec![int(0); table.order()]
            }
            _ => Vec::new(),
        };
        let model = QuotientModel { name: name.into(), geometry, bundle, options, aliases, character };
        let labels: Vec<String> = model.classes().into_iter().map(|c| c.label).collect();
        for (alias, target) in &model.aliases {
            if !labels.contains(target) && model.resolve_canonical(target).is_none() {
                return Err(Error::Schema(vec![format!("alias `{alias}` points at unknown class label `{target}`")]));
            }
        }
        Ok(model)
    }

    /// Torus model with a finite group generated by affine maps.
    pub fn torus(gram: RMat2, generators: Vec<AffineIsometry>) -> Result<Geometry> {
        for g in &generators {
            validate_point_part(g.point_part(), &gram)?;
        }
        let gens: Vec<AffineIsometry> = generators.iter().map(|g| g.mod_lattice()).collect();
        let (table, elements) = FiniteGroupTable::generate(
            AffineIsometry::identity(),
            &gens,
            |a, b| a.compose(b).mod_lattice(),
            torus_element_name,
            48,
        )?;
        Ok(Geometry::Torus { gram, generators: gens, elements, table })
    }

    pub fn sphere(radius: Rat, order: usize) -> Result<Geometry> {
        if order == 0 || order > 24 {
            return Err(Error::Domain(format!("sphere rotation order {order} outside 1..=24")));
        }
        if radius <= int(0) {
            return Err(Error::Domain("sphere radius must be positive".into()));
        }
        let product = (0..order).map(|a| (0..order).map(|b| (a + b) % order).collect()).collect();
        let names = (0..order).map(|j| sphere_element_name(j, order)).collect();
        Ok(Geometry::Sphere { radius, table: FiniteGroupTable::new(product, Some(names))? })
    }

    pub fn finite_table(&self) -> Option<&FiniteGroupTable> {
        match &self.geometry {
            Geometry::Plane { .. } => None,
            Geometry::Torus { table, .. } | Geometry::Sphere { table, .. } => Some(table),
        }
    }

    pub fn cryst(&self) -> Option<&CrystGroup> {
        match &self.geometry {
            Geometry::Plane { group } => Some(group),
            _ => None,
        }
    }

    pub fn group_order(&self) -> Option<usize> {
        self.finite_table().map(|t| t.order())
    }

    pub fn is_finite(&self) -> bool {
        self.finite_table().is_some()
    }

    pub fn gram(&self) -> Option<&RMat2> {
        match &self.geometry {
            Geometry::Plane { group } => Some(group.gram()),
            Geometry::Torus { gram, .. } => Some(gram),
            Geometry::Sphere { .. } => None,
        }
    }

    /// Euler characteristic of the covering surface (one lattice cell for the plane).
    pub fn euler_characteristic(&self) -> i64 {
        match self.geometry {
            Geometry::Sphere { .. } => 2,
            _ => 0,
        }
    }

    /// Area of the covering surface (one lattice cell for the plane).
    pub fn area(&self) -> f64 {
        match &self.geometry {
            Geometry::Sphere { radius, .. } => 4.0 * std::f64::consts::PI * to_f64(radius).powi(2),
            _ => {
                let g = self.gram().expect("flat model");
                to_f64(&(g[0][0] * g[1][1] - g[0][1] * g[1][0])).sqrt()
            }
        }
    }

    pub fn element_name(&self, e: &Element) -> String {
        match (&self.geometry, e) {
            (Geometry::Plane { .. }, Element::Affine(g)) => format!("{g:?}"),
            (_, Element::Finite(i)) => self.finite_table().expect("finite model").name(*i).to_string(),
            _ => format!("{e:?}"),
        }
    }

    pub fn class_of(&self, e: &Element) -> ClassHandle {
        match (&self.geometry, e) {
            (Geometry::Plane { group }, Element::Affine(g)) => {
                let rep = group.canonical(g);
                let center = if rep.orientation_preserving() && !rep.is_identity() && *rep.point_part() != IDENTITY {
                    CrystGroup::rotation_center(&rep).map(|c| vfrac(&c))
                } else {
                    None
                };
                ClassHandle {
                    label: group.label(&rep),
                    point_label: point_label(rep.point_part()),
                    rep: Element::Affine(rep),
                    kind: ClassKind::InfiniteClass,
                    center,
                }
            }
            (_, Element::Finite(i)) => {
                let t = self.finite_table().expect("finite model");
                let min = *t.class_of(*i).iter().next().expect("nonempty class");
                let point = match &self.geometry {
                    Geometry::Torus { elements, .. } => point_label(elements[min].point_part()),
                    _ => t.name(min).to_string(),
                };
                ClassHandle {
                    label: t.name(min).to_string(),
                    rep: Element::Finite(min),
                    kind: ClassKind::FiniteClass,
                    point_label: point,
                    center: None,
                }
            }
            _ => panic!("element kind does not match the model geometry"),
        }
    }

    /// Finite models: every conjugacy class. Plane models: every class with a fixed point.
    /// Sorted by label.
    pub fn classes(&self) -> Vec<ClassHandle> {
        let mut out: Vec<ClassHandle> = match &self.geometry {
            Geometry::Plane { group } => {
                group.fixed_point_classes().into_iter().map(|g| self.class_of(&Element::Affine(g))).collect()
            }
            _ => {
                let t = self.finite_table().expect("finite model");
                t.classes().into_iter().map(|c| self.class_of(&Element::Finite(c[0]))).collect()
            }
        };
        out.sort_by(|a, b| a.label.cmp(&b.label));
        out
    }

    fn resolve_canonical(&self, label: &str) -> Option<ClassHandle> {
        if let Some(c) = self.classes().into_iter().find(|c| c.label == label) {
            return Some(c);
        }
        // translation classes of the plane are addressed by `t{x},{y}`
        if let (Geometry::Plane { group }, Some(rest)) = (&self.geometry, label.strip_prefix('t')) {
            let (x, y) = rest.split_once(',')?;
            let v = [crate::rational::parse_rat(x).ok()?, crate::rational::parse_rat(y).ok()?];
            let g = AffineIsometry::translation_by(v);
            if group.contains(&g) {
                let h = self.class_of(&Element::Affine(g));
                if h.label == label {
                    return Some(h);
                }
            }
        }
        None
    }

    /// Aliases first, then canonical labels.
    pub fn resolve(&self, label: &str) -> Result<ClassHandle> {
        let target = self.aliases.get(label).map(String::as_str).unwrap_or(label);
        self.resolve_canonical(target).ok_or_else(|| {
            Error::Domain(format!("unknown class label `{label}`; valid labels: {}", self.valid_labels().join(", ")))
        })
    }

    pub fn valid_labels(&self) -> Vec<String> {
        let mut v: Vec<String> = self.aliases.keys().cloned().collect();
        v.extend(self.classes().into_iter().map(|c| c.label));
        v
    }

    pub fn inverse(&self, e: &Element) -> Element {
        match e {
            Element::Finite(i) => Element::Finite(self.finite_table().expect("finite model").inv(*i)),
            Element::Affine(g) => Element::Affine(g.inverse()),
        }
    }

    pub fn compose(&self, a: &Element, b: &Element) -> Element {
        match (a, b) {
            (Element::Finite(x), Element::Finite(y)) => Element::Finite(self.finite_table().expect("finite model").mul(*x, *y)),
            (Element::Affine(x), Element::Affine(y)) => Element::Affine(x.compose(y)),
            _ => panic!("mixed element kinds"),
        }
    }

    /// Finite centralizer elements; `None` when the centralizer is infinite.
    pub fn centralizer(&self, e: &Element) -> Option<Vec<Element>> {
        match (&self.geometry, e) {
            (Geometry::Plane { group }, Element::Affine(g)) => {
                let z = group.centralizer(g);
                z.order().map(|_| z.finite.into_iter().map(Element::Affine).collect())
            }
            (_, Element::Finite(i)) => {
                Some(self.finite_table().expect("finite").centralizer(*i).into_iter().map(Element::Finite).collect())
            }
            _ => None,
        }
    }

    pub fn fiber_character(&self, e: &Element) -> Rat {
        match e {
            Element::Finite(i) if !self.character.is_empty() => self.character[*i],
            _ => int(0),
        }
    }

    /// Action of a group element on a fixed-point location.
    pub fn act(&self, z: &Element, loc: &Location) -> Location {
        match (&self.geometry, z, loc) {
            (Geometry::Torus { elements, .. }, Element::Finite(i), Location::Lattice(x)) => {
                Location::Lattice(vfrac(&elements[*i].apply(x)))
            }
            (Geometry::Plane { .. }, Element::Affine(g), Location::Lattice(x)) => Location::Lattice(g.apply(x)),
            (Geometry::Sphere { .. }, _, pole) => pole.clone(),
            _ => panic!("location does not match the model geometry"),
        }
    }

    /// Fixed locus of one group element with its tangent and fiber turns.
    pub fn fixed_points(&self, e: &Element) -> Result<FixedLocus> {
        match (&self.geometry, e) {
            (Geometry::Plane { group }, Element::Affine(g)) => {
                if !group.contains(g) {
                    return Err(Error::Structural(format!("{g:?} is not in the group")));
                }
                if g.is_identity() {
                    return Ok(FixedLocus::Full);
                }
                if *g.point_part() == IDENTITY {
                    return Ok(FixedLocus::Empty);
                }
                if !g.orientation_preserving() {
                    return Err(orientation_error());
                }
                let c = CrystGroup::rotation_center(g).expect("rotation has a center");
                let turn = g.turn().expect("rotation");
                Ok(FixedLocus::Points(vec![FixedPoint { location: Location::Lattice(c), tangent_turn: turn, fiber_turn: int(0) }]))
            }
            (Geometry::Torus { elements, .. }, Element::Finite(i)) => {
                let g = &elements[*i];
                let beta = self.fiber_character(e);
                match fixed_set_torus(g) {
                    FixedSet::Empty => Ok(FixedLocus::Empty),
                    FixedSet::Full => Ok(FixedLocus::Full),
                    FixedSet::Lines(_) => Err(orientation_error()),
                    FixedSet::Points(pts) => {
                        if !g.orientation_preserving() {
                            return Err(orientation_error());
                        }
                        let turn = g.turn().expect("rotation");
                        Ok(FixedLocus::Points(
                            pts.into_iter()
                                .map(|p| FixedPoint { location: Location::Lattice(p), tangent_turn: turn, fiber_turn: beta })
                                .collect(),
                        ))
                    }
                }
            }
            (Geometry::Sphere { table, .. }, Element::Finite(j)) => {
                if *j == 0 {
                    return Ok(FixedLocus::Full);
                }
                let t = Rat::new(*j as i64, table.order() as i64);
                let k = self.bundle.twist_degree;
                Ok(FixedLocus::Points(vec![
                    FixedPoint { location: Location::NorthPole, tangent_turn: t, fiber_turn: int(0) },
                    FixedPoint { location: Location::SouthPole, tangent_turn: frac(-t), fiber_turn: frac(t * int(k)) },
                ]))
            }
            _ => Err(Error::Structural("element kind does not match the model geometry".into())),
        }
    }

    /// Canonical element for a class-label-addressed heat/localized computation.
    pub fn rep_affine(&self, e: &Element) -> Option<AffineIsometry> {
        match (&self.geometry, e) {
            (Geometry::Plane { .. }, Element::Affine(g)) => Some(g.clone()),
            (Geometry::Torus { elements, .. }, Element::Finite(i)) => Some(elements[*i].clone()),
            _ => None,
        }
    }

    /// All members of a finite class (finite models only).
    pub fn class_members(&self, class: &ClassHandle) -> Option<Vec<Element>> {
        match &class.rep {
            Element::Finite(i) => {
                Some(self.finite_table()?.class_of(*i).into_iter().map(Element::Finite).collect())
            }
            Element::Affine(_) => None,
        }
    }

    pub fn torus_elements(&self) -> Option<&[AffineIsometry]> {
        match &self.geometry {
            Geometry::Torus { elements, .. } => Some(elements),
            _ => None,
        }
    }
}

fn orientation_error() -> Error {
    Error::Structural("orientation-reversing elements (mirror fixed lines) are outside the sector model".into())
}

fn character_values(
    generators: &[AffineIsometry],
    elements: &[AffineIsometry],
    table: &FiniteGroupTable,
    turns: &[Rat],
) -> Result<Vec<Rat>> {
    if turns.len() != generators.len() {
        return Err(Error::Schema(vec![format!(
            "bundle.character has {} entries but the group has {} generators",
            turns.len(),
            generators.len()
        )]));
    }
    let index: HashMap<&AffineIsometry, usize> = elements.iter().enumerate().map(|(i, e)| (e, i)).collect();
    let mut value: Vec<Option<Rat>> = vec![None; elements.len()];
    value[table.identity()] = Some(int(0));
    let mut frontier = vec![table.identity()];
    while let Some(x) = frontier.pop() {
        for (g, t) in generators.iter().zip(turns) {
            let y = index[&elements[x].compose(g).mod_lattice()];
            let v = frac(value[x].expect("visited") + *t);
            if value[y].is_none() {
                value[y] = Some(v);
                frontier.push(y);
            }
        }
    }
    let value: Vec<Rat> = value.into_iter().map(|v| v.expect("generated")).collect();
    for a in 0..elements.len() {
        for b in 0..elements.len() {
            if frac(value[a] + value[b]) != value[table.mul(a, b)] {
                return Err(Error::Schema(vec!["bundle.character is not a homomorphism".into()]));
            }
        }
    }
    Ok(value)
}

/// Eigen-turns on the fiber over a fixed point: `Λ^{0,0}⊗L` carries β, `Λ^{0,1}⊗L` carries β − θ.
pub fn fiber_eigendata(point: &FixedPoint) -> FiberEigenData {
    FiberEigenData { even: vec![frac(point.fiber_turn)], odd: vec![frac(point.fiber_turn - point.tangent_turn)] }
}

/// One component per centralizer orbit of fixed points, plus the full (e)-component;
/// ordered by class label.
pub fn enumerate_sectors(model: &QuotientModel) -> Result<Vec<SectorComponent>> {
    if let Some(g) = model.cryst() {
        if !g.orientation_preserving() {
            return Err(orientation_error());
        }
    }
    let mut out = Vec::new();
    for class in model.classes() {
        match model.fixed_points(&class.rep)? {
            FixedLocus::Empty => {}
            FixedLocus::Full => {
                let order = match model.cryst() {
                    Some(g) => g.point_group_order(),
                    None => model.group_order().expect("finite"),
                };
                out.push(SectorComponent {
                    class: class.clone(),
                    geometry: ComponentGeometry::Full {
                        dimension: 2,
                        euler: model.euler_characteristic(),
                        twist: model.bundle.twist_degree,
                        area: model.area(),
                    },
                    normal_turn: None,
                    local_group_order: order,
                    fiber: FiberEigenData { even: vec![int(0)], odd: vec![int(0)] },
                });
            }
            FixedLocus::Points(points) => {
                let z = model.centralizer(&class.rep).ok_or_else(|| {
                    Error::Structural(format!("class {} has an infinite centralizer and isolated fixed points", class.label))
                })?;
                let mut seen: Vec<Location> = Vec::new();
                for p in &points {
                    if seen.contains(&p.location) {
                        continue;
                    }
                    let mut orbit: Vec<Location> = z.iter().map(|l| model.act(l, &p.location)).collect();
                    orbit.sort();
                    orbit.dedup();
                    seen.extend(orbit.iter().cloned());
                    out.push(SectorComponent {
                        class: class.clone(),
                        geometry: ComponentGeometry::Isolated { point: p.clone(), orbit_size: orbit.len() },
                        normal_turn: Some(frac(-p.tangent_turn)),
                        local_group_order: z.len() / orbit.len(),
                        fiber: fiber_eigendata(p),
                    });
                }
            }
        }
    }
    Ok(out)
}
