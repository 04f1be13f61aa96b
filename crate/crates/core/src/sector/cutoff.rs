//! Cut-off functions `c` with `Σ_γ c(γ⁻¹x) = 1`, and their restrictions `c^(g)` to fixed sets.

use num_traits::ToPrimitive;

use super::{ClassHandle, Element, FixedLocus, FixedPoint, Geometry, Location, QuotientModel};
use crate::error::{Error, Result};
use crate::group::lattice::{sup_norm, vadd, Vec2};
use crate::group::{AffineIsometry, CrystGroup};
use crate::rational::{int, rat, to_f64, Rat};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub enum CutoffKind {
    /// `(1/|P|)·1_{[s, s+1)²}` in lattice coordinates.
    Indicator { shift: Vec2 },
    /// Bump `h` around the cell center normalized by `Σ_γ h(γx)`.
    Smooth,
}

/// An exact value when available, always a float value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Weight {
    pub exact: Option<Rat>,
    pub approx: f64,
}

impl Weight {
    pub fn exact(r: Rat) -> Self {
        Weight { exact: Some(r), approx: to_f64(&r) }
    }

    pub fn float(x: f64) -> Self {
        Weight { exact: None, approx: x }
    }

    pub fn to_scalar<S: Scalar>(&self) -> Result<S> {
        match (self.exact, S::EXACT) {
            (Some(r), _) => Ok(S::from_rat(r)),
            (None, false) => Ok(S::from_f64(self.approx).expect("float scalar")),
            (None, true) => Err(Error::Domain("a float-valued cut-off cannot feed exact arithmetic".into())),
        }
    }

    fn add(self, other: Weight) -> Weight {
        Weight {
            exact: match (self.exact, other.exact) {
                (Some(a), Some(b)) => Some(a + b),
                _ => None,
            },
            approx: self.approx + other.approx,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SmoothBump {
    center: [f64; 2],
    gram: [[f64; 2]; 2],
    rho: f64,
    /// sup-norm radius (lattice coordinates) of a box containing the support
    box_radius: f64,
    reps: Vec<([[f64; 2]; 2], [f64; 2])>,
}

impl SmoothBump {
    fn h(&self, x: [f64; 2]) -> f64 {
        let d = [x[0] - self.center[0], x[1] - self.center[1]];
        let r2 = d[0] * d[0] * self.gram[0][0] + 2.0 * d[0] * d[1] * self.gram[0][1] + d[1] * d[1] * self.gram[1][1];
        let u = r2 / (self.rho * self.rho);
        if u >= 1.0 {
            0.0
        } else {
            (-1.0 / (1.0 - u)).exp()
        }
    }

    /// `Σ_γ h(γx)` over the elements moving `x` into the support box.
    fn normalizer(&self, x: [f64; 2]) -> f64 {
        let mut s = 0.0;
        for (a, t) in &self.reps {
            let y = [a[0][0] * x[0] + a[0][1] * x[1] + t[0], a[1][0] * x[0] + a[1][1] * x[1] + t[1]];
            let lo0 = (self.center[0] - y[0] - self.box_radius).ceil() as i64;
            let hi0 = (self.center[0] - y[0] + self.box_radius).floor() as i64;
            let lo1 = (self.center[1] - y[1] - self.box_radius).ceil() as i64;
            let hi1 = (self.center[1] - y[1] + self.box_radius).floor() as i64;
            for i in lo0..=hi0 {
                for j in lo1..=hi1 {
                    s += self.h([y[0] + i as f64, y[1] + j as f64]);
                }
            }
        }
        s
    }
}

#[derive(Clone, Debug)]
pub enum Cutoff {
    /// Finite group of order n: `c ≡ 1/n`.
    Constant(Rat),
    Indicator { shift: Vec2, height: Rat },
    Smooth(SmoothBump),
}

pub fn build_cutoff(model: &QuotientModel) -> Result<Cutoff> {
    match &model.geometry {
        Geometry::Torus { table, .. } | Geometry::Sphere { table, .. } => Ok(Cutoff::Constant(rat(1, table.order() as i64))),
        Geometry::Plane { group } => match &model.options.cutoff {
            CutoffKind::Indicator { shift } => {
                Ok(Cutoff::Indicator { shift: *shift, height: rat(1, group.point_group_order() as i64) })
            }
            CutoffKind::Smooth => Ok(Cutoff::Smooth(smooth_bump(group))),
        },
    }
}

fn smooth_bump(group: &CrystGroup) -> SmoothBump {
    let g = group.gram();
    let gram = [[to_f64(&g[0][0]), to_f64(&g[0][1])], [to_f64(&g[1][0]), to_f64(&g[1][1])]];
    let norm = |v: [f64; 2]| (v[0] * v[0] * gram[0][0] + 2.0 * v[0] * v[1] * gram[0][1] + v[1] * v[1] * gram[1][1]).sqrt();
    let circumradius = [[0.5, 0.5], [0.5, -0.5]].into_iter().map(norm).fold(0.0, f64::max);
    let rho = 1.1 * circumradius;
    let tr = gram[0][0] + gram[1][1];
    let det = gram[0][0] * gram[1][1] - gram[0][1] * gram[1][0];
    let lambda_min = 0.5 * (tr - (tr * tr - 4.0 * det).max(0.0).sqrt());
    let reps = group
        .coset_representatives()
        .iter()
        .map(|r| {
            let a = r.point_part();
            let t = r.translation();
            (
                [[a[0][0] as f64, a[0][1] as f64], [a[1][0] as f64, a[1][1] as f64]],
                [to_f64(&t[0]), to_f64(&t[1])],
            )
        })
        .collect();
    SmoothBump { center: [0.5, 0.5], gram, rho, box_radius: rho / lambda_min.sqrt(), reps }
}

impl Cutoff {
    pub fn kind_name(&self) -> &'static str {
        match self {
            Cutoff::Constant(_) => "constant",
            Cutoff::Indicator { .. } => "indicator",
            Cutoff::Smooth(_) => "smooth",
        }
    }

    pub fn eval_exact(&self, x: &Vec2) -> Option<Rat> {
        match self {
            Cutoff::Constant(c) => Some(*c),
            Cutoff::Indicator { shift, height } => {
                let inside = (0..2).all(|i| x[i] >= shift[i] && x[i] < shift[i] + int(1));
                Some(if inside { *height } else { int(0) })
            }
            Cutoff::Smooth(_) => None,
        }
    }

    pub fn eval(&self, x: [f64; 2]) -> f64 {
        match self {
            Cutoff::Constant(c) => to_f64(c),
            Cutoff::Indicator { shift, height } => {
                let s = [to_f64(&shift[0]), to_f64(&shift[1])];
                let inside = (0..2).all(|i| x[i] >= s[i] && x[i] < s[i] + 1.0);
                if inside {
                    to_f64(height)
                } else {
                    0.0
                }
            }
            Cutoff::Smooth(b) => {
                let h = b.h(x);
                if h == 0.0 {
                    0.0
                } else {
                    h / b.normalizer(x)
                }
            }
        }
    }

    pub fn weight_at(&self, x: &Vec2) -> Weight {
        match self.eval_exact(x) {
            Some(r) => Weight::exact(r),
            None => Weight::float(self.eval([to_f64(&x[0]), to_f64(&x[1])])),
        }
    }

    /// Center and sup-norm radius of a box containing the support (plane cut-offs).
    pub fn support_box(&self) -> Option<(Vec2, Rat)> {
        match self {
            Cutoff::Constant(_) => None,
            Cutoff::Indicator { shift, .. } => Some((vadd(shift, &[rat(1, 2), rat(1, 2)]), rat(1, 2))),
            Cutoff::Smooth(b) => {
                let r = Rat::new((b.box_radius * 1024.0).ceil() as i64, 1024);
                Some(([rat(1, 2), rat(1, 2)], r))
            }
        }
    }

    /// `Σ_γ c(γx)` over the plane group, exact for the indicator kind.
    pub fn partition_sum(&self, group: &CrystGroup, x: &Vec2) -> Weight {
        let Some((center, radius)) = self.support_box() else {
            return Weight::exact(int(0));
        };
        let mut total = Weight::exact(int(0));
        for r in group.coset_representatives() {
            let y = r.apply(x);
            let lo = |i: usize| (center[i] - y[i] - radius).ceil().to_integer();
            let hi = |i: usize| (center[i] - y[i] + radius).floor().to_integer();
            for i in lo(0)..=hi(0) {
                for j in lo(1)..=hi(1) {
                    total = total.add(self.weight_at(&vadd(&y, &[int(i), int(j)])));
                }
            }
        }
        total
    }

    /// Float partition sum at a float point.
    pub fn partition_sum_f64(&self, group: &CrystGroup, x: [f64; 2]) -> f64 {
        let Some((center, radius)) = self.support_box() else {
            return 0.0;
        };
        let (c, r) = ([to_f64(&center[0]), to_f64(&center[1])], to_f64(&radius));
        let mut total = 0.0;
        for rep in group.coset_representatives() {
            let a = rep.point_part();
            let t = rep.translation();
            let y = [
                a[0][0] as f64 * x[0] + a[0][1] as f64 * x[1] + to_f64(&t[0]),
                a[1][0] as f64 * x[0] + a[1][1] as f64 * x[1] + to_f64(&t[1]),
            ];
            for i in (c[0] - y[0] - r).ceil() as i64..=(c[0] - y[0] + r).floor() as i64 {
                for j in (c[1] - y[1] - r).ceil() as i64..=(c[1] - y[1] + r).floor() as i64 {
                    total += self.eval([y[0] + i as f64, y[1] + j as f64]);
                }
            }
        }
        total
    }

    /// `∫ c` in lattice coordinates (plane) or `c·|M|/|M|` normalized to the covering space.
    pub fn integral(&self) -> Weight {
        match self {
            Cutoff::Constant(c) => Weight::exact(*c),
            Cutoff::Indicator { height, .. } => Weight::exact(*height),
            Cutoff::Smooth(b) => {
                // the bump is flat to all orders at the edge of its support, so the midpoint
                // rule converges faster than any power
                let n = 240usize;
                let r = b.box_radius;
                let step = 2.0 * r / n as f64;
                let mut s = 0.0;
                for i in 0..n {
                    for j in 0..n {
                        let x = [b.center[0] - r + (i as f64 + 0.5) * step, b.center[1] - r + (j as f64 + 0.5) * step];
                        s += self.eval(x);
                    }
                }
                Weight::float(s * step * step)
            }
        }
    }
}

/// Choice of coset section `K` for the class (any set with `{kgk⁻¹} = (g)` without repeats).
#[derive(Clone, Debug, PartialEq)]
pub enum SectionChoice {
    Canonical,
    /// `hK` for a fixed group element `h`.
    LeftTranslated(Element),
    /// `k ↦ k·z_k` with `z_k` drawn from the centralizer by a deterministic seed.
    Scrambled(u64),
}

/// Restriction of a cut-off to the fixed set of a class representative.
#[derive(Clone, Debug, PartialEq)]
pub enum FixedSetWeights {
    /// `g = e`: `c^(e) = c`, reported through `∫ c`.
    Full { integral: Weight },
    Points(Vec<(FixedPoint, Weight)>),
}

fn scramble_index(seed: u64, i: usize, n: usize) -> usize {
    let x = seed.wrapping_mul(6364136223846793005).wrapping_add((i as u64).wrapping_mul(1442695040888963407));
    ((x >> 29) % n as u64) as usize
}

/// Section elements relevant at the point `y`: every `k` whose `k·y` can meet the support.
fn section_elements(model: &QuotientModel, cutoff: &Cutoff, class: &ClassHandle, choice: &SectionChoice, y: &Location) -> Result<Vec<Element>> {
    let centralizer = model.centralizer(&class.rep);
    let scramble = |ks: Vec<Element>, seed: u64| -> Result<Vec<Element>> {
        let z = centralizer.clone().ok_or_else(|| Error::Domain("scrambling needs a finite centralizer".into()))?;
        Ok(ks.into_iter().enumerate().map(|(i, k)| model.compose(&k, &z[scramble_index(seed, i, z.len())])).collect())
    };
    match (&model.geometry, &class.rep) {
        (Geometry::Plane { group }, Element::Affine(g)) => {
            let (center, radius) = cutoff.support_box().expect("plane cut-off");
            let y = match y {
                Location::Lattice(v) => *v,
                _ => return Err(Error::Structural("pole location on a plane model".into())),
            };
            let m = int(group.max_point_norm());
            let shift = match choice {
                SectionChoice::LeftTranslated(Element::Affine(h)) => sup_norm(&h.translation()),
                _ => int(0),
            };
            let bound = m * (sup_norm(&center) + radius + shift) + m * sup_norm(&y) + int(1);
            let base: Vec<Element> = group.section_within(g, bound).into_iter().map(Element::Affine).collect();
            match choice {
                SectionChoice::Canonical => Ok(base),
                SectionChoice::LeftTranslated(h) => Ok(base.iter().map(|k| model.compose(h, k)).collect()),
                SectionChoice::Scrambled(seed) => scramble(base, *seed),
            }
        }
        (_, Element::Finite(i)) => {
            let t = model.finite_table().expect("finite model");
            let base: Vec<Element> = t.coset_section(*i).into_iter().map(Element::Finite).collect();
            match choice {
                SectionChoice::Canonical => Ok(base),
                SectionChoice::LeftTranslated(h) => Ok(base.iter().map(|k| model.compose(h, k)).collect()),
                SectionChoice::Scrambled(seed) => scramble(base, *seed),
            }
        }
        _ => Err(Error::Structural("element kind does not match the model geometry".into())),
    }
}

/// `c^(g)(y) = Σ_{k∈K} c(k·y)`.
fn restricted_value(model: &QuotientModel, cutoff: &Cutoff, ks: &[Element], y: &Location) -> Weight {
    ks.iter().fold(Weight::exact(int(0)), |acc, k| {
        let w = match model.act(k, y) {
            Location::Lattice(v) => match model.geometry {
                Geometry::Plane { .. } => cutoff.weight_at(&v),
                _ => cutoff.weight_at(&[int(0), int(0)]),
            },
            _ => cutoff.weight_at(&[int(0), int(0)]),
        };
        acc.add(w)
    })
}

/// Weights of `c^(g)` on the fixed set of the class representative.
pub fn fixed_set_cutoff(model: &QuotientModel, cutoff: &Cutoff, class: &ClassHandle, section: &SectionChoice) -> Result<FixedSetWeights> {
    match model.fixed_points(&class.rep)? {
        FixedLocus::Empty => Err(Error::Domain(format!("class {} has an empty fixed set", class.label))),
        FixedLocus::Full => Ok(FixedSetWeights::Full { integral: cutoff.integral() }),
        FixedLocus::Points(points) => {
            let mut out = Vec::new();
            for p in points {
                let ks = section_elements(model, cutoff, class, section, &p.location)?;
                let w = restricted_value(model, cutoff, &ks, &p.location);
                out.push((p, w));
            }
            Ok(FixedSetWeights::Points(out))
        }
    }
}

/// `Σ_{l∈Z(g)} c^(g)(l⁻¹y)` at every isolated fixed point `y` (must equal 1).
pub fn centralizer_partition(model: &QuotientModel, cutoff: &Cutoff, class: &ClassHandle, section: &SectionChoice) -> Result<Vec<Weight>> {
    let points = match model.fixed_points(&class.rep)? {
        FixedLocus::Points(p) => p,
        _ => return Err(Error::Domain(format!("class {} has no isolated fixed points", class.label))),
    };
    let z = model
        .centralizer(&class.rep)
        .ok_or_else(|| Error::Domain("infinite centralizer".into()))?;
    let mut out = Vec::new();
    for p in points {
        let mut total = Weight::exact(int(0));
        for l in &z {
            let y = model.act(&model.inverse(l), &p.location);
            let ks = section_elements(model, cutoff, class, section, &y)?;
            total = total.add(restricted_value(model, cutoff, &ks, &y));
        }
        out.push(total);
    }
    Ok(out)
}

/// Numerical sanity value: the smooth kind's support radius in lattice units.
pub fn support_radius_f64(cutoff: &Cutoff) -> Option<f64> {
    cutoff.support_box().map(|(_, r)| r.to_f64().unwrap_or(f64::NAN))
}

/// Plane cut-off evaluated through an explicit group element (used by the heat layer).
pub fn eval_translated(cutoff: &Cutoff, k: &AffineIsometry, x: [f64; 2]) -> f64 {
    let a = k.point_part();
    let t = k.translation();
    cutoff.eval([
        a[0][0] as f64 * x[0] + a[0][1] as f64 * x[1] + to_f64(&t[0]),
        a[1][0] as f64 * x[0] + a[1][1] as f64 * x[1] + to_f64(&t[1]),
    ])
}
