//! Wallpaper groups Γ = {(A, a_A + λ) : A ∈ P, λ ∈ ℤ²} in lattice coordinates.

use std::collections::BTreeMap;

use super::affine::{
    fixed_set_plane, point_label, rotation_turn, validate_point_part, AffineIsometry, FixedSet,
};
use super::lattice::{
    apply, from_int, iinv, imul, is_integral, one_minus, rapply, rinv, smith, sup_norm, vadd,
    vfrac, vsub, IMat2, RMat2, Vec2, IDENTITY,
};
use super::table::FiniteGroupTable;
use crate::error::{Error, Result};
use crate::rational::{fmt_rat, int, Rat};

/// Largest point group of a wallpaper group (p6m).
const MAX_POINT_GROUP: usize = 12;

#[derive(Clone, Debug, PartialEq, Eq)]
struct PointEntry {
    matrix: IMat2,
    /// `a_A ∈ [0,1)²`.
    offset: Vec2,
}

/// Complete conjugacy invariant: minimal point part over the point-group class and the
/// translation reduced modulo `(I − B)ℤ²`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClassKey {
    pub matrix: IMat2,
    pub residue: Vec2,
}

/// `Z_Γ(g)` = finite part (one element per commuting point part) + translations in `ker(I − B)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Centralizer {
    pub finite: Vec<AffineIsometry>,
    pub lattice: Vec<[i64; 2]>,
}

impl Centralizer {
    /// Order when finite.
    pub fn order(&self) -> Option<usize> {
        self.lattice.is_empty().then_some(self.finite.len())
    }

    pub fn contains(&self, h: &AffineIsometry) -> bool {
        self.finite.iter().any(|z| {
            if z.point_part() != h.point_part() {
                return false;
            }
            let d = vsub(&h.translation(), &z.translation());
            in_span(&self.lattice, &d)
        })
    }
}

fn in_span(basis: &[[i64; 2]], d: &Vec2) -> bool {
    match basis.len() {
        0 => d[0] == int(0) && d[1] == int(0),
        1 => {
            let b = basis[0];
            // d = s·b with s ∈ ℤ
            let s = if b[0] != 0 { d[0] / int(b[0]) } else { d[1] / int(b[1]) };
            s.is_integer() && d[0] == s * int(b[0]) && d[1] == s * int(b[1])
        }
        _ => is_integral(d),
    }
}

#[derive(Clone, Debug)]
pub struct CrystGroup {
    gram: RMat2,
    generators: Vec<AffineIsometry>,
    points: Vec<PointEntry>,
    table: FiniteGroupTable,
}

impl CrystGroup {
    /// Closes the generators modulo ℤ²; fails if a point part repeats with two different
    /// offsets (the translation subgroup would then be strictly larger than ℤ²).
    pub fn new(gram: RMat2, generators: Vec<AffineIsometry>) -> Result<Self> {
        if gram[0][1] != gram[1][0] {
            return Err(Error::Structural("lattice metric is not symmetric".into()));
        }
        if gram[0][0] <= int(0) || gram[0][0] * gram[1][1] - gram[0][1] * gram[1][0] <= int(0) {
            return Err(Error::Structural("lattice metric is not positive definite".into()));
        }
        for g in &generators {
            validate_point_part(g.point_part(), &gram)?;
        }
        let mut found: BTreeMap<IMat2, Vec2> = BTreeMap::new();
        found.insert(IDENTITY, [int(0), int(0)]);
        let mut frontier = vec![AffineIsometry::identity()];
        while let Some(x) = frontier.pop() {
            for g in &generators {
                let y = x.compose(g).mod_lattice();
                match found.get(y.point_part()) {
                    Some(off) if off == y.frac() => {}
                    Some(_) => {
                        return Err(Error::Structural(format!(
                            "point part {:?} occurs with two translation classes: the translation subgroup exceeds the lattice",
                            y.point_part()
                        )))
                    }
                    None => {
                        found.insert(*y.point_part(), *y.frac());
                        if found.len() > MAX_POINT_GROUP {
                            return Err(Error::Structural("point group exceeds 12 elements".into()));
                        }
                        frontier.push(y);
                    }
                }
            }
        }
        let mut points: Vec<PointEntry> = found
            .into_iter()
            .filter(|(m, _)| *m != IDENTITY)
            .map(|(matrix, offset)| PointEntry { matrix, offset })
            .collect();
        points.insert(0, PointEntry { matrix: IDENTITY, offset: [int(0), int(0)] });
        let index: BTreeMap<IMat2, usize> = points.iter().enumerate().map(|(i, p)| (p.matrix, i)).collect();
        let product = points
            .iter()
            .map(|a| {
                points
                    .iter()
                    .map(|b| {
                        index
                            .get(&imul(&a.matrix, &b.matrix))
                            .copied()
                            .ok_or_else(|| Error::Structural("point parts are not closed".into()))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let names = points.iter().map(|p| point_label(&p.matrix)).collect();
        let table = FiniteGroupTable::new(product, Some(names))?;
        Ok(CrystGroup { gram, generators, points, table })
    }

    pub fn gram(&self) -> &RMat2 {
        &self.gram
    }

    pub fn generators(&self) -> &[AffineIsometry] {
        &self.generators
    }

    pub fn point_group(&self) -> &FiniteGroupTable {
        &self.table
    }

    pub fn point_group_order(&self) -> usize {
        self.points.len()
    }

    pub fn point_matrices(&self) -> impl Iterator<Item = &IMat2> {
        self.points.iter().map(|p| &p.matrix)
    }

    /// `(A, a_A)` for every point part.
    pub fn coset_representatives(&self) -> Vec<AffineIsometry> {
        self.points.iter().map(|p| AffineIsometry::new(p.matrix, p.offset)).collect()
    }

    pub fn offset_of(&self, a: &IMat2) -> Option<Vec2> {
        self.points.iter().find(|p| p.matrix == *a).map(|p| p.offset)
    }

    pub fn orientation_preserving(&self) -> bool {
        self.points.iter().all(|p| super::lattice::idet(&p.matrix) == 1)
    }

    pub fn contains(&self, g: &AffineIsometry) -> bool {
        self.offset_of(g.point_part()).is_some_and(|o| o == *g.frac())
    }

    /// Largest row-sum norm over the point parts (bounds `‖A·v‖_∞ / ‖v‖_∞`).
    pub fn max_point_norm(&self) -> i64 {
        self.points
            .iter()
            .map(|p| p.matrix.iter().map(|r| r[0].abs() + r[1].abs()).max().unwrap_or(0))
            .max()
            .unwrap_or(1)
    }

    /// Squared metric length `vᵀ G v`.
    pub fn norm_sq(&self, v: &Vec2) -> Rat {
        let g = &self.gram;
        v[0] * g[0][0] * v[0] + int(2) * v[0] * g[0][1] * v[1] + v[1] * g[1][1] * v[1]
    }

    pub fn class_key(&self, g: &AffineIsometry) -> ClassKey {
        let b = g.translation();
        self.points
            .iter()
            .map(|c| {
                let cinv = iinv(&c.matrix);
                let bp = imul(&imul(&c.matrix, g.point_part()), &cinv);
                let m = one_minus(&bp);
                let bprime = vadd(&apply(&c.matrix, &b), &apply(&m, &c.offset));
                ClassKey { matrix: bp, residue: smith(&m).reduce_mod_image(&bprime) }
            })
            .min()
            .expect("point group is nonempty")
    }

    /// Canonical representative of the class of `g`.
    pub fn canonical(&self, g: &AffineIsometry) -> AffineIsometry {
        let k = self.class_key(g);
        AffineIsometry::new(k.matrix, k.residue)
    }

    /// Some `k ∈ Γ` with `k·g·k⁻¹ = h`, found by solving `(I − B)λ = b' − C·b − (I − B)a_C` over ℤ².
    pub fn conjugator(&self, g: &AffineIsometry, h: &AffineIsometry) -> Option<AffineIsometry> {
        let b = g.translation();
        let bh = h.translation();
        for c in &self.points {
            let bp = imul(&imul(&c.matrix, g.point_part()), &iinv(&c.matrix));
            if bp != *h.point_part() {
                continue;
            }
            let m = one_minus(&bp);
            let w = vsub(&vsub(&bh, &apply(&c.matrix, &b)), &apply(&m, &c.offset));
            if let Some(lambda) = smith(&m).solve_integer(&w) {
                return Some(AffineIsometry::new(c.matrix, vadd(&c.offset, &from_int(lambda))));
            }
        }
        None
    }

    pub fn conjugate_test(&self, g: &AffineIsometry, h: &AffineIsometry) -> bool {
        self.conjugator(g, h).is_some()
    }

    /// Rotation center of a rotation element on the plane.
    pub fn rotation_center(g: &AffineIsometry) -> Option<Vec2> {
        match fixed_set_plane(g) {
            FixedSet::Points(p) if g.orientation_preserving() => Some(p[0]),
            _ => None,
        }
    }

    /// `e`, `t{x},{y}`, `rot{p}_{q}@{x},{y}` (center in `[0,1)²`) or `refl[..]+{x},{y}`.
    pub fn label(&self, g: &AffineIsometry) -> String {
        let key = self.class_key(g);
        if key.matrix == IDENTITY {
            if key.residue == [int(0), int(0)] {
                return "e".into();
            }
            // the lexicographically largest vector in the orbit reads best (t1,0 rather than t-1,0)
            let t = self
                .points
                .iter()
                .map(|c| apply(&c.matrix, &g.translation()))
                .max()
                .expect("nonempty");
            return format!("t{},{}", fmt_rat(&t[0]), fmt_rat(&t[1]));
        }
        if rotation_turn(&key.matrix).is_some() {
            let center = vfrac(&rapply(&rinv(&one_minus(&key.matrix)), &key.residue));
            return format!(
                "{}@{},{}",
                point_label(&key.matrix),
                fmt_rat(&center[0]),
                fmt_rat(&center[1])
            );
        }
        let m = key.matrix;
        format!(
            "refl[{},{};{},{}]+{},{}",
            m[0][0],
            m[0][1],
            m[1][0],
            m[1][1],
            fmt_rat(&key.residue[0]),
            fmt_rat(&key.residue[1])
        )
    }

    pub fn centralizer(&self, g: &AffineIsometry) -> Centralizer {
        let b = g.translation();
        let m = one_minus(g.point_part());
        let s = smith(&m);
        let mut finite = Vec::new();
        for c in &self.points {
            if imul(&c.matrix, g.point_part()) != imul(g.point_part(), &c.matrix) {
                continue;
            }
            // (C, a_C + λ) commutes with g iff (I − B)λ = b − C·b − (I − B)·a_C
            let w = vsub(&vsub(&b, &apply(&c.matrix, &b)), &apply(&m, &c.offset));
            if let Some(lambda) = s.solve_integer(&w) {
                finite.push(AffineIsometry::new(c.matrix, vadd(&c.offset, &from_int(lambda))));
            }
        }
        Centralizer { finite, lattice: s.kernel_basis() }
    }

    /// All group elements with translation sup-norm `≤ radius`, ordered by
    /// (sup-norm, translation, point part).
    pub fn elements_within(&self, radius: Rat) -> Vec<AffineIsometry> {
        let r = radius.ceil().to_integer() + 1;
        let mut out: Vec<(Rat, Vec2, IMat2, AffineIsometry)> = Vec::new();
        for p in &self.points {
            for i in -r..=r {
                for j in -r..=r {
                    let t = vadd(&p.offset, &from_int([i, j]));
                    let n = sup_norm(&t);
                    if n <= radius {
                        out.push((n, t, p.matrix, AffineIsometry::new(p.matrix, t)));
                    }
                }
            }
        }
        out.sort_by_key(|a| (a.0, a.1, a.2));
        out.into_iter().map(|x| x.3).collect()
    }

    /// Coset section of the class of `g`, enumerated lazily in shells of translation sup-norm.
    pub fn coset_section<'a>(&'a self, g: &AffineIsometry) -> CosetSection<'a> {
        CosetSection { group: self, rep: g.clone(), shell: 0, emitted: 0, buffer: Vec::new(), cursor: 0 }
    }

    /// The canonical section restricted to translation sup-norm `≤ radius`.
    pub fn section_within(&self, g: &AffineIsometry, radius: Rat) -> Vec<AffineIsometry> {
        let mut seen = std::collections::BTreeSet::new();
        self.elements_within(radius)
            .into_iter()
            .filter(|k| seen.insert(g.conjugate_by(k)))
            .collect()
    }

    /// Representatives (canonical form) of every class whose fixed set in the plane is nonempty,
    /// sorted by label.
    pub fn fixed_point_classes(&self) -> Vec<AffineIsometry> {
        let mut keys: BTreeMap<String, AffineIsometry> = BTreeMap::new();
        keys.insert("e".into(), AffineIsometry::identity());
        for p in self.points.iter().skip(1) {
            let m = one_minus(&p.matrix);
            let s = smith(&m);
            let lambdas: Vec<[i64; 2]> = if s.rank() == 2 {
                s.cokernel_reps()
            } else {
                (-3..=3).flat_map(|i| (-3..=3).map(move |j| [i, j])).collect()
            };
            for l in lambdas {
                let g = AffineIsometry::new(p.matrix, vadd(&p.offset, &from_int(l)));
                if fixed_set_plane(&g).is_empty() {
                    continue;
                }
                keys.entry(self.label(&g)).or_insert_with(|| self.canonical(&g));
            }
        }
        keys.into_values().collect()
    }

    /// Rotation centers modulo Γ: `(center in [0,1)², stabilizer as point-group indices)`.
    pub fn orbifold_points(&self) -> Vec<(Vec2, Vec<AffineIsometry>)> {
        let mut centers: Vec<Vec2> = Vec::new();
        for p in self.points.iter().skip(1) {
            let m = one_minus(&p.matrix);
            let s = smith(&m);
            if s.rank() < 2 {
                continue;
            }
            let inv = rinv(&m);
            for l in s.cokernel_reps() {
                let c = vfrac(&rapply(&inv, &vadd(&p.offset, &from_int(l))));
                if !centers.contains(&c) {
                    centers.push(c);
                }
            }
        }
        centers.sort();
        let mut out: Vec<(Vec2, Vec<AffineIsometry>)> = Vec::new();
        let mut covered: Vec<Vec2> = Vec::new();
        for c in centers {
            if covered.contains(&c) {
                continue;
            }
            for q in &self.points {
                let img = vfrac(&vadd(&apply(&q.matrix, &c), &q.offset));
                if !covered.contains(&img) {
                    covered.push(img);
                }
            }
            let stabilizer = self
                .points
                .iter()
                .filter_map(|q| {
                    // λ = c − A·c − a_A must be integral
                    let lambda = vsub(&vsub(&c, &apply(&q.matrix, &c)), &q.offset);
                    is_integral(&lambda).then(|| AffineIsometry::new(q.matrix, vadd(&q.offset, &lambda)))
                })
                .collect();
            out.push((c, stabilizer));
        }
        out
    }
}

/// Lazily enumerated coset section; shells grow by one unit of translation sup-norm.
pub struct CosetSection<'a> {
    group: &'a CrystGroup,
    rep: AffineIsometry,
    shell: i64,
    emitted: usize,
    buffer: Vec<AffineIsometry>,
    cursor: usize,
}

impl Iterator for CosetSection<'_> {
    type Item = AffineIsometry;

    fn next(&mut self) -> Option<AffineIsometry> {
        // the canonical order is global, so each larger shell extends the previous prefix
        while self.cursor >= self.buffer.len() {
            self.shell += 1;
            if self.shell > 64 {
                return None;
            }
            let all = self.group.section_within(&self.rep, int(self.shell));
            self.buffer = all[self.emitted..].to_vec();
            self.cursor = 0;
        }
        let k = self.buffer[self.cursor].clone();
        self.cursor += 1;
        self.emitted += 1;
        Some(k)
    }
}
