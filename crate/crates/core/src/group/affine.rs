//! Affine isometries of the plane in lattice coordinates, and their fixed-point sets.

use std::fmt;

use num_traits::Zero;
use serde::Serialize;

use super::lattice::{
    apply, from_int, iinv, idet, imul, itrace, one_minus, rapply, rinv, smith, vadd, vfloor, vfrac,
    vneg, vsub, IMat2, RMat2, Vec2, IDENTITY,
};
use crate::error::{Error, Result};
use crate::rational::{fmt_rat, int, Rat};

/// `x ↦ A·x + t` with `A` integral in lattice coordinates and `t = frac + offset`,
/// `frac ∈ [0,1)²`, `offset ∈ ℤ²`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AffineIsometry {
    point_part: IMat2,
    frac: Vec2,
    offset: [i64; 2],
}

impl AffineIsometry {
    pub fn new(point_part: IMat2, translation: Vec2) -> Self {
        AffineIsometry { point_part, frac: vfrac(&translation), offset: vfloor(&translation) }
    }

    pub fn identity() -> Self {
        Self::new(IDENTITY, [int(0), int(0)])
    }

    pub fn translation_by(t: Vec2) -> Self {
        Self::new(IDENTITY, t)
    }

    pub fn point_part(&self) -> &IMat2 {
        &self.point_part
    }

    pub fn translation(&self) -> Vec2 {
        vadd(&self.frac, &from_int(self.offset))
    }

    /// Translation normal form in `[0,1)²`.
    pub fn frac(&self) -> &Vec2 {
        &self.frac
    }

    pub fn offset(&self) -> [i64; 2] {
        self.offset
    }

    /// The same map modulo lattice translations (offset dropped).
    pub fn mod_lattice(&self) -> Self {
        AffineIsometry { point_part: self.point_part, frac: self.frac, offset: [0, 0] }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        let a = imul(&self.point_part, &other.point_part);
        let t = vadd(&apply(&self.point_part, &other.translation()), &self.translation());
        Self::new(a, t)
    }

    pub fn inverse(&self) -> Self {
        let ainv = iinv(&self.point_part);
        Self::new(ainv, vneg(&apply(&ainv, &self.translation())))
    }

    pub fn conjugate_by(&self, k: &Self) -> Self {
        k.compose(self).compose(&k.inverse())
    }

    pub fn apply(&self, x: &Vec2) -> Vec2 {
        vadd(&apply(&self.point_part, x), &self.translation())
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity()
    }

    pub fn det(&self) -> i64 {
        idet(&self.point_part)
    }

    pub fn orientation_preserving(&self) -> bool {
        self.det() == 1
    }

    pub fn point_order(&self) -> Option<u32> {
        point_order(&self.point_part)
    }

    /// Rotation turn of the point part, in `[0, 1)`.
    pub fn turn(&self) -> Option<Rat> {
        rotation_turn(&self.point_part)
    }

    /// Sup-norm of the exact translation vector.
    pub fn translation_norm(&self) -> Rat {
        super::lattice::sup_norm(&self.translation())
    }
}

impl fmt::Debug for AffineIsometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t = self.translation();
        write!(
            f,
            "({:?} | {}, {})",
            self.point_part,
            fmt_rat(&t[0]),
            fmt_rat(&t[1])
        )
    }
}

/// Order of an integer matrix, restricted to the crystallographic orders {1, 2, 3, 4, 6}.
pub fn point_order(a: &IMat2) -> Option<u32> {
    let mut p = *a;
    for k in 1..=6u32 {
        if p == IDENTITY {
            return matches!(k, 1 | 2 | 3 | 4 | 6).then_some(k);
        }
        p = imul(&p, a);
    }
    None
}

/// Turn of a lattice rotation (det 1) in a positively oriented basis.
pub fn rotation_turn(a: &IMat2) -> Option<Rat> {
    if idet(a) != 1 {
        return None;
    }
    let positive = a[1][0] > 0;
    let half = |p: i64, q: i64| {
        if positive {
            Rat::new(p, q)
        } else {
            int(1) - Rat::new(p, q)
        }
    };
    match itrace(a) {
        2 if *a == IDENTITY => Some(int(0)),
        -2 => Some(Rat::new(1, 2)),
        1 => Some(half(1, 6)),
        0 => Some(half(1, 4)),
        -1 => Some(half(1, 3)),
        _ => None,
    }
}

/// Label of a point part: `e`, `rot{p}_{q}` or `refl`.
pub fn point_label(a: &IMat2) -> String {
    if *a == IDENTITY {
        return "e".into();
    }
    match rotation_turn(a) {
        Some(t) => format!("rot{}_{}", t.numer(), t.denom()),
        None => "refl".into(),
    }
}

/// Checks `Aᵀ·G·A = G`.
pub fn preserves_gram(a: &IMat2, gram: &RMat2) -> bool {
    let mut out = [[int(0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            let mut s = int(0);
            for k in 0..2 {
                for l in 0..2 {
                    s += int(a[k][i]) * gram[k][l] * int(a[l][j]);
                }
            }
            out[i][j] = s;
        }
    }
    out == *gram
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AffineLine {
    pub point: Vec2Str,
    pub direction: [i64; 2],
}

/// Rational 2-vector kept exact; serialized as `["p/q", "p/q"]`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Vec2Str(pub Vec2);

impl Serialize for Vec2Str {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [fmt_rat(&self.0[0]), fmt_rat(&self.0[1])].serialize(s)
    }
}

/// Fixed-point set of an isometry acting on the plane or on the torus ℝ²/ℤ².
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FixedSet {
    Empty,
    /// Isolated points; on the torus normalized to `[0,1)²` and sorted.
    Points(Vec<Vec2>),
    Lines(Vec<AffineLine>),
    Full,
}

impl FixedSet {
    pub fn is_empty(&self) -> bool {
        matches!(self, FixedSet::Empty)
    }

    pub fn summary(&self) -> String {
        match self {
            FixedSet::Empty => "empty".into(),
            FixedSet::Points(p) => format!("{} isolated point(s)", p.len()),
            FixedSet::Lines(l) => format!("{} line(s)", l.len()),
            FixedSet::Full => "full".into(),
        }
    }
}

/// Fixed set of `x ↦ A x + t` on the plane.
pub fn fixed_set_plane(g: &AffineIsometry) -> FixedSet {
    let a = g.point_part();
    let t = g.translation();
    if *a == IDENTITY {
        return if t == [int(0), int(0)] { FixedSet::Full } else { FixedSet::Empty };
    }
    let m = one_minus(a);
    if idet(&m) != 0 {
        return FixedSet::Points(vec![rapply(&rinv(&m), &t)]);
    }
    // rank one: D·z = U·t with z = V⁻¹x
    let s = smith(&m);
    let ut = apply(&s.u, &t);
    if !ut[1].is_zero() {
        return FixedSet::Empty;
    }
    let z = [ut[0] / int(s.d[0]), int(0)];
    let point = apply(&s.v, &z);
    let direction = [s.v[0][1], s.v[1][1]];
    FixedSet::Lines(vec![AffineLine { point: Vec2Str(point), direction }])
}

/// Fixed set of `x ↦ A x + t` on the torus ℝ²/ℤ² (solutions of `(I−A)x ≡ t mod ℤ²`).
pub fn fixed_set_torus(g: &AffineIsometry) -> FixedSet {
    let a = g.point_part();
    let t = g.translation();
    if *a == IDENTITY {
        return if vfrac(&t) == [int(0), int(0)] { FixedSet::Full } else { FixedSet::Empty };
    }
    let m = one_minus(a);
    let s = smith(&m);
    if idet(&m) != 0 {
        let inv = rinv(&m);
        let mut pts: Vec<Vec2> = s
            .cokernel_reps()
            .into_iter()
            .map(|y| vfrac(&rapply(&inv, &vadd(&t, &from_int(y)))))
            .collect();
        pts.sort();
        pts.dedup();
        return FixedSet::Points(pts);
    }
    // rank one: second Smith coordinate of U·t must be integral, then d0 parallel circles
    let ut = apply(&s.u, &t);
    if !ut[1].is_integer() {
        return FixedSet::Empty;
    }
    let direction = [s.v[0][1], s.v[1][1]];
    let lines = (0..s.d[0])
        .map(|n| {
            let z = [(ut[0] + int(n)) / int(s.d[0]), int(0)];
            AffineLine { point: Vec2Str(vfrac(&apply(&s.v, &z))), direction }
        })
        .collect();
    FixedSet::Lines(lines)
}

/// Parses and validates a point part: integer entries, order in {1,2,3,4,6}, Gram-preserving.
pub fn validate_point_part(a: &IMat2, gram: &RMat2) -> Result<()> {
    if idet(a).abs() != 1 {
        return Err(Error::Structural(format!("point part {a:?} is not unimodular")));
    }
    if point_order(a).is_none() {
        return Err(Error::Structural(format!(
            "point part {a:?} violates the crystallographic restriction (order not in {{1,2,3,4,6}})"
        )));
    }
    if !preserves_gram(a, gram) {
        return Err(Error::Structural(format!("point part {a:?} does not preserve the lattice metric")));
    }
    Ok(())
}

pub fn torus_point_eq(x: &Vec2, y: &Vec2) -> bool {
    vfrac(&vsub(x, y)) == [int(0), int(0)]
}
