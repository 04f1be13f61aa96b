//! Heat-kernel verification on flat models: `(g)`-supertraces of `e^{−tD²}` by quadrature.
//!
//! On `Λ^{0,*}` of a flat surface the kernel is `(4πt)^{−1}e^{−d²/4t}` times the identity
//! transport, and `Tr_s[h⁻¹ on the fiber] = e^{2πiβ} − e^{2πi(β−θ)}` for `h` of turn θ.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::group::AffineIsometry;
use crate::index::localized_index;
use crate::rational::{to_f64, Rat};
use crate::sector::{build_cutoff, ClassHandle, Cutoff, Element, Geometry, QuotientModel, SectionChoice};

const FOUR_PI: f64 = 4.0 * std::f64::consts::PI;

/// Scalar flat heat kernel in lattice coordinates with metric `gram`.
#[derive(Clone, Copy, Debug)]
pub struct FlatKernel {
    gram: [[f64; 2]; 2],
    /// `√λ_min(gram)`: `|v|_G ≥ μ|v|_∞`
    mu: f64,
    /// area of one lattice cell
    cell_area: f64,
}

impl FlatKernel {
    pub fn new(gram: [[f64; 2]; 2]) -> Self {
        let tr = gram[0][0] + gram[1][1];
        let det = gram[0][0] * gram[1][1] - gram[0][1] * gram[1][0];
        let lambda_min = 0.5 * (tr - (tr * tr - 4.0 * det).max(0.0).sqrt());
        FlatKernel { gram, mu: lambda_min.sqrt(), cell_area: det.sqrt() }
    }

    pub fn from_model(model: &QuotientModel) -> Result<Self> {
        let g = model.gram().ok_or_else(|| Error::Domain("heat verification covers flat models only".into()))?;
        Ok(Self::new([[to_f64(&g[0][0]), to_f64(&g[0][1])], [to_f64(&g[1][0]), to_f64(&g[1][1])]]))
    }

    pub fn dist_sq(&self, v: [f64; 2]) -> f64 {
        v[0] * v[0] * self.gram[0][0] + 2.0 * v[0] * v[1] * self.gram[0][1] + v[1] * v[1] * self.gram[1][1]
    }

    pub fn cell_area(&self) -> f64 {
        self.cell_area
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// `(4πt)^{−1}e^{−d(x,y)²/4t}`.
    pub fn eval(&self, x: [f64; 2], y: [f64; 2], t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(Error::Domain(format!("heat time must be positive, got {t}")));
        }
        Ok(self.eval_unchecked([x[0] - y[0], x[1] - y[1]], t))
    }

    fn eval_unchecked(&self, d: [f64; 2], t: f64) -> f64 {
        (-self.dist_sq(d) / (4.0 * t)).exp() / (FOUR_PI * t)
    }

    /// `L ≥ Σ_{γ} K_t(x, γx)` for every `x`, for a group with `n_points` point-group elements.
    pub fn uniform_sum_bound(&self, n_points: usize, t: f64) -> f64 {
        // Σ_{n∈ℤ} e^{−a(u+n)²} ≤ 2(1 + √(π/4a)) with a = μ²/4t, per axis and per point-group coset
        let per_axis = 2.0 * (1.0 + (std::f64::consts::PI * t).sqrt() / self.mu);
        n_points as f64 * per_axis * per_axis / (FOUR_PI * t)
    }
}

/// Quadrature and truncation settings.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureSpec {
    /// initial midpoints per axis
    pub grid: usize,
    pub max_grid: usize,
    /// forces the class-sum truncation radius (lattice units) instead of deriving it
    pub truncation: Option<u32>,
    pub tolerance: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec { grid: 32, max_grid: 1024, truncation: None, tolerance: 1e-6 }
    }
}

/// `x ↦ Ax + b` with the fiber supertrace of `h⁻¹`.
#[derive(Clone, Debug)]
struct Member {
    a: [[f64; 2]; 2],
    b: [f64; 2],
    factor: Complex64,
    /// `|factor|·(4πt)^{-1}`-scaled tail data: `2 sin(πθ)`
    contraction: f64,
}

impl Member {
    fn new(h: &AffineIsometry, beta: Rat) -> Self {
        let m = h.point_part();
        let t = h.translation();
        let theta = h.turn().map(|r| to_f64(&r)).unwrap_or(0.0);
        let tau = std::f64::consts::TAU;
        let beta = to_f64(&beta);
        let factor = Complex64::from_polar(1.0, tau * beta) - Complex64::from_polar(1.0, tau * (beta - theta));
        Member {
            a: [[m[0][0] as f64, m[0][1] as f64], [m[1][0] as f64, m[1][1] as f64]],
            b: [to_f64(&t[0]), to_f64(&t[1])],
            factor,
            contraction: 2.0 * (std::f64::consts::PI * theta).sin().abs(),
        }
    }

    fn displacement(&self, x: [f64; 2]) -> [f64; 2] {
        [
            self.a[0][0] * x[0] + self.a[0][1] * x[1] + self.b[0] - x[0],
            self.a[1][0] * x[0] + self.a[1][1] * x[1] + self.b[1] - x[1],
        ]
    }
}

/// Square integration domain in lattice coordinates.
#[derive(Clone, Copy, Debug)]
struct Domain {
    lo: [f64; 2],
    side: f64,
}

/// Class-sum integrand `x ↦ (Σ_h factor_h K_t(hx, x), Σ_h K_t(hx, x))`, already truncated.
struct ClassSum {
    members: Vec<Member>,
    /// lattice translates summed per member (torus models); `[0]` on the plane
    translates: Vec<[f64; 2]>,
    kernel: FlatKernel,
}

impl ClassSum {
    fn eval(&self, x: [f64; 2], t: f64) -> (Complex64, f64) {
        let mut signed = Complex64::new(0.0, 0.0);
        let mut mass = 0.0;
        for m in &self.members {
            let d = m.displacement(x);
            let shift = if self.translates.len() > 1 { [d[0].round(), d[1].round()] } else { [0.0, 0.0] };
            for l in &self.translates {
                let k = self.kernel.eval_unchecked([d[0] - shift[0] + l[0], d[1] - shift[1] + l[1]], t);
                signed += m.factor * k;
                mass += k;
            }
        }
        (signed, mass)
    }
}

/// Result of one quadrature.
#[derive(Clone, Debug, PartialEq)]
pub struct HeatSample {
    pub t: f64,
    pub value: Complex64,
    /// `Σ_h ∫ c·K_t(hx,x)` without the fiber supertrace
    pub kernel_mass: f64,
    /// dominates the discarded part of the class sum
    pub truncation_bound: f64,
    pub truncation_radius: u32,
    pub members: usize,
    pub grid: usize,
    /// `|M(2N) − M(N)|` of the last refinement
    pub quadrature_estimate: f64,
}

fn midpoint(domain: Domain, n: usize, f: &(dyn Fn([f64; 2]) -> (Complex64, f64) + Sync)) -> (Complex64, f64) {
    let h = domain.side / n as f64;
    // one tile per row, reduced in row order
    let rows: Vec<(Complex64, f64)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let y = domain.lo[1] + (i as f64 + 0.5) * h;
            let mut acc = (Complex64::new(0.0, 0.0), 0.0);
            for j in 0..n {
                let x = domain.lo[0] + (j as f64 + 0.5) * h;
                let (a, b) = f([x, y]);
                acc.0 += a;
                acc.1 += b;
            }
            acc
        })
        .collect();
    let (s, m) = rows.iter().fold((Complex64::new(0.0, 0.0), 0.0), |acc, r| (acc.0 + r.0, acc.1 + r.1));
    (s * h * h, m * h * h)
}

/// Midpoint rule with one Richardson step, refined until the step is below `tolerance/10`.
fn refine(domain: Domain, quad: &QuadratureSpec, f: &(dyn Fn([f64; 2]) -> (Complex64, f64) + Sync)) -> Result<(Complex64, f64, usize, f64)> {
    let mut n = quad.grid.max(2);
    let mut coarse = midpoint(domain, n, f);
    loop {
        let fine = midpoint(domain, 2 * n, f);
        let estimate = (fine.0 - coarse.0).norm();
        if estimate < quad.tolerance / 10.0 {
            let value = fine.0 + (fine.0 - coarse.0) / 3.0;
            let mass = fine.1 + (fine.1 - coarse.1) / 3.0;
            return Ok((value, mass, 2 * n, estimate));
        }
        if 4 * n > quad.max_grid {
            return Err(Error::Resolution { estimate, grid: 2 * n, suggested: 4 * n });
        }
        n *= 2;
        coarse = fine;
    }
}

fn cutoff_domain(cutoff: &Cutoff) -> Domain {
    match cutoff.support_box() {
        None => Domain { lo: [0.0, 0.0], side: 1.0 },
        Some((c, r)) => {
            let (c, r) = ([to_f64(&c[0]), to_f64(&c[1])], to_f64(&r));
            Domain { lo: [c[0] - r, c[1] - r], side: 2.0 * r }
        }
    }
}

/// Sum over shells `n ≥ start` of `count(n)·amp·e^{−κn²}`.
fn gaussian_shell_tail(start: f64, kappa: f64, amp: f64, count: impl Fn(f64) -> f64) -> f64 {
    let mut total = 0.0;
    let mut n = start.max(0.0);
    loop {
        let term = count(n) * amp * (-kappa * n * n).exp();
        total += term;
        if term < 1e-300 || (n > start + 4.0 && term < total * 1e-17) {
            return total;
        }
        n += 1.0;
    }
}

struct Truncated {
    sum: ClassSum,
    bound: f64,
    radius: u32,
}

fn plane_class_sum(model: &QuotientModel, class: &ClassHandle, domain: Domain, t: f64, quad: &QuadratureSpec) -> Result<Truncated> {
    let group = model.cryst().expect("plane model");
    let kernel = FlatKernel::from_model(model)?;
    let g = match &class.rep {
        Element::Affine(g) => g.clone(),
        _ => return Err(Error::Structural("plane class with a finite representative".into())),
    };
    let weight = kernel.cell_area / group.point_group_order() as f64;
    if *g.point_part() == crate::group::lattice::IDENTITY {
        // translation classes are finite: {t_{Av} : A ∈ P}
        let mut members: Vec<AffineIsometry> = group
            .coset_representatives()
            .iter()
            .map(|k| g.conjugate_by(&AffineIsometry::new(*k.point_part(), [Rat::from_integer(0), Rat::from_integer(0)])))
            .collect();
        members.sort();
        members.dedup();
        let members = members.iter().map(|h| Member::new(h, Rat::from_integer(0))).collect();
        return Ok(Truncated { sum: ClassSum { members, translates: vec![[0.0, 0.0]], kernel }, bound: 0.0, radius: 0 });
    }
    let y0 = crate::group::CrystGroup::rotation_center(&g).expect("rotation");
    let y0f = [to_f64(&y0[0]), to_f64(&y0[1])];
    let probe = Member::new(&g, Rat::from_integer(0));
    let amp = probe.factor.norm() / (FOUR_PI * t) * weight;
    let kappa = (probe.contraction * kernel.mu).powi(2) / (4.0 * t);
    // centers per unit cell
    let m_norm = group.max_point_norm() as f64;
    let cell_reach = Rat::from_integer((m_norm * (2.0 + y0f[0].abs().max(y0f[1].abs()))).ceil() as i64 + 2);
    let per_cell = group
        .section_within(&g, cell_reach)
        .iter()
        .filter_map(|k| crate::group::CrystGroup::rotation_center(&g.conjugate_by(k)))
        .filter(|c| (0..2).all(|i| c[i] >= Rat::from_integer(0) && c[i] < Rat::from_integer(1)))
        .count()
        .max(1) as f64;
    let count = |n: f64| per_cell * 8.0 * (domain.side + 2.0 * n + 3.0);
    let radius = match quad.truncation {
        Some(r) => r,
        None => {
            let mut r = 1u32;
            while gaussian_shell_tail(r as f64, kappa, amp, count) >= quad.tolerance / 10.0 {
                r += 1;
            }
            r
        }
    };
    let bound = gaussian_shell_tail(radius as f64, kappa, amp, count);
    let reach = domain.lo[0].abs().max(domain.lo[1].abs()) + domain.side + radius as f64;
    let search = Rat::from_integer((m_norm * reach + m_norm * y0f[0].abs().max(y0f[1].abs())).ceil() as i64 + 2);
    let members: Vec<Member> = group
        .section_within(&g, search)
        .iter()
        .map(|k| g.conjugate_by(k))
        .filter(|h| {
            let c = crate::group::CrystGroup::rotation_center(h).expect("conjugate of a rotation");
            let c = [to_f64(&c[0]), to_f64(&c[1])];
            (0..2).all(|i| c[i] >= domain.lo[i] - radius as f64 && c[i] <= domain.lo[i] + domain.side + radius as f64)
        })
        .map(|h| Member::new(&h, Rat::from_integer(0)))
        .collect();
    Ok(Truncated { sum: ClassSum { members, translates: vec![[0.0, 0.0]], kernel }, bound, radius })
}

fn torus_class_sum(model: &QuotientModel, class: &ClassHandle, t: f64, quad: &QuadratureSpec) -> Result<Truncated> {
    let kernel = FlatKernel::from_model(model)?;
    let elements = model.torus_elements().expect("torus model");
    let members: Vec<Member> = model
        .class_members(class)
        .expect("finite class")
        .iter()
        .map(|e| match e {
            Element::Finite(i) => Member::new(&elements[*i], model.fiber_character(e)),
            _ => unreachable!("finite class member"),
        })
        .collect();
    let weight = kernel.cell_area / model.group_order().expect("finite") as f64;
    let amp = members.iter().map(|m| m.factor.norm()).sum::<f64>() / (FOUR_PI * t) * weight;
    let kappa = kernel.mu * kernel.mu / (4.0 * t);
    // after centering, every excluded translate has |·|_∞ ≥ n − 1/2 on shell n
    let shifted_tail = |r: u32| {
        let mut s = 0.0;
        let mut n = r as f64 + 1.0;
        loop {
            let term = 8.0 * (n + 1.0) * amp * (-kappa * (n - 0.5) * (n - 0.5)).exp();
            s += term;
            if term < 1e-300 || term < s * 1e-17 {
                return s;
            }
            n += 1.0;
        }
    };
    let radius = match quad.truncation {
        Some(r) => r,
        None => {
            let mut r = 1u32;
            while shifted_tail(r) >= quad.tolerance / 10.0 {
                r += 1;
            }
            r
        }
    };
    let r = radius as i64;
    let translates = (-r..=r).flat_map(|i| (-r..=r).map(move |j| [i as f64, j as f64])).collect();
    Ok(Truncated { sum: ClassSum { members, translates, kernel }, bound: shifted_tail(radius), radius })
}

/// `Σ_{h∈(g)} ∫ c(x) Tr_s[h⁻¹K_t(hx, x)] dx`, truncated with an explicit tail bound.
pub fn g_heat_trace(model: &QuotientModel, class: &ClassHandle, t: f64, quad: &QuadratureSpec) -> Result<HeatSample> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("heat time must be positive, got {t}")));
    }
    let cutoff = build_cutoff(model)?;
    let domain = cutoff_domain(&cutoff);
    let truncated = match &model.geometry {
        Geometry::Plane { .. } => plane_class_sum(model, class, domain, t, quad)?,
        Geometry::Torus { .. } => torus_class_sum(model, class, t, quad)?,
        Geometry::Sphere { .. } => {
            return Err(Error::Domain("heat verification covers flat models only; the sphere uses the spectral oracle".into()))
        }
    };
    let area = truncated.sum.kernel.cell_area;
    let f = |x: [f64; 2]| {
        let c = cutoff.eval(x);
        if c == 0.0 {
            return (Complex64::new(0.0, 0.0), 0.0);
        }
        let (s, m) = truncated.sum.eval(x, t);
        (s * c * area, m * c * area)
    };
    let (value, kernel_mass, grid, estimate) = refine(domain, quad, &f)?;
    Ok(HeatSample {
        t,
        value,
        kernel_mass,
        truncation_bound: truncated.bound,
        truncation_radius: truncated.radius,
        members: truncated.sum.members.len(),
        grid,
        quadrature_estimate: estimate,
    })
}

/// Max pairwise deviation of the heat trace over `ts`.
pub fn t_independence(model: &QuotientModel, class: &ClassHandle, ts: &[f64], quad: &QuadratureSpec) -> Result<f64> {
    let values: Vec<Complex64> = ts.iter().map(|&t| g_heat_trace(model, class, t, quad).map(|s| s.value)).collect::<Result<_>>()?;
    Ok(max_deviation(&values))
}

fn max_deviation(values: &[Complex64]) -> f64 {
    let mut d: f64 = 0.0;
    for (i, a) in values.iter().enumerate() {
        for b in &values[i + 1..] {
            d = d.max((a - b).norm());
        }
    }
    d
}

/// `|heat trace − localized index|`.
pub fn mckean_singer_compare(model: &QuotientModel, class: &ClassHandle, t: f64, quad: &QuadratureSpec) -> Result<f64> {
    let heat = g_heat_trace(model, class, t, quad)?.value;
    let index: Complex64 = localized_index(model, class, &SectionChoice::Canonical)?;
    Ok((heat - index).norm())
}

/// Euclidean orbital integral `vol(Z_G(γ)/Z_Γ(γ))·∫_{G/Z_G(γ)} Tr_s k_t(x⁻¹γx) dx`, Haar measure = Lebesgue × counting.
pub fn orbital_integral_euclidean(model: &QuotientModel, class: &ClassHandle, t: f64, quad: &QuadratureSpec) -> Result<Complex64> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("heat time must be positive, got {t}")));
    }
    let group = model.cryst().ok_or_else(|| Error::Domain("orbital integrals need a crystallographic plane model".into()))?;
    let kernel = FlatKernel::from_model(model)?;
    let g = match &class.rep {
        Element::Affine(g) => g.clone(),
        _ => return Err(Error::Structural("plane class with a finite representative".into())),
    };
    let member = Member::new(&g, Rat::from_integer(0));
    if *g.point_part() == crate::group::lattice::IDENTITY {
        // G/Z_G(t_v) = SO(2); Z_Γ(t_v) = lattice ⋊ (point stabilizer of v)
        let v = [to_f64(&g.translation()[0]), to_f64(&g.translation()[1])];
        let stab = group.point_matrices().filter(|a| {
            let w = crate::group::lattice::apply(a, &g.translation());
            w == g.translation()
        });
        let vol = kernel.cell_area / stab.count() as f64;
        return Ok(member.factor * kernel.eval_unchecked(v, t) * vol);
    }
    // G/Z_G(γ) = ℝ² (translates of the center), Z_G(γ)/Z_Γ(γ) = SO(2)/Z_Γ(γ) of volume 1/|Z_Γ(γ)|
    let z = group
        .centralizer(&g)
        .order()
        .ok_or_else(|| Error::Structural("rotation with an infinite centralizer".into()))?;
    let y0 = crate::group::CrystGroup::rotation_center(&g).expect("rotation");
    let y0 = [to_f64(&y0[0]), to_f64(&y0[1])];
    let reach = (4.0 * t * 40.0).sqrt() / (member.contraction * kernel.mu);
    let domain = Domain { lo: [y0[0] - reach, y0[1] - reach], side: 2.0 * reach };
    let area = kernel.cell_area;
    let f = |x: [f64; 2]| {
        let k = kernel.eval_unchecked(member.displacement(x), t) * area;
        (member.factor * k, k)
    };
    let (value, _, _, _) = refine(domain, quad, &f)?;
    Ok(value / z as f64)
}

/// Everything the `heat` command reports for one class.
#[derive(Clone, Debug, PartialEq)]
pub struct HeatTraceReport {
    pub class: String,
    pub cutoff: &'static str,
    pub samples: Vec<HeatSample>,
    pub orbital: Vec<Option<Complex64>>,
    pub localized_index: Complex64,
    pub max_t_variation: f64,
    pub mckean_singer_residual: f64,
    pub orbital_residual: Option<f64>,
    pub tolerance: f64,
}

impl HeatTraceReport {
    pub fn passes(&self) -> bool {
        let tol = self.tolerance;
        self.max_t_variation < tol
            && self.mckean_singer_residual < tol
            && self.orbital_residual.is_none_or(|r| r < tol)
            && self.samples.iter().all(|s| s.truncation_bound < tol)
    }
}

pub fn heat_report(model: &QuotientModel, class: &ClassHandle, ts: &[f64], quad: &QuadratureSpec) -> Result<HeatTraceReport> {
    if ts.is_empty() {
        return Err(Error::Domain("at least one heat time is required".into()));
    }
    let cutoff = build_cutoff(model)?;
    let samples: Vec<HeatSample> = ts.iter().map(|&t| g_heat_trace(model, class, t, quad)).collect::<Result<_>>()?;
    let index: Complex64 = localized_index(model, class, &SectionChoice::Canonical)?;
    let orbital: Vec<Option<Complex64>> = if model.cryst().is_some() {
        ts.iter().map(|&t| orbital_integral_euclidean(model, class, t, quad).map(Some)).collect::<Result<_>>()?
    } else {
        vec![None; ts.len()]
    };
    let values: Vec<Complex64> = samples.iter().map(|s| s.value).collect();
    let ms = values.iter().map(|v| (v - index).norm()).fold(0.0, f64::max);
    let orbital_residual = if model.cryst().is_some() {
        Some(samples.iter().zip(&orbital).map(|(s, o)| (s.value - o.expect("plane")).norm()).fold(0.0, f64::max))
    } else {
        None
    };
    Ok(HeatTraceReport {
        class: class.label.clone(),
        cutoff: cutoff.kind_name(),
        max_t_variation: max_deviation(&values),
        samples,
        orbital,
        localized_index: index,
        mckean_singer_residual: ms,
        orbital_residual,
        tolerance: quad.tolerance,
    })
}
