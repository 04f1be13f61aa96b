//! Brute-force equivariant indices from explicit section bases.
//!
//! Characters are kept as signed multisets of eigen-turns read off the action of a group
//! element on basis vectors; nothing here evaluates fixed-point data or characteristic series.

use std::collections::BTreeMap;

use num_complex::Complex64;
use num_traits::Zero;

use crate::cyclotomic::Cyclotomic;
use crate::error::{Error, Result};
use crate::group::AffineIsometry;
use crate::rational::{frac, rat, Rat};
use crate::sector::{Element, Geometry, OperatorKind, QuotientModel};

pub const MAX_DEGREE: i64 = 100;
pub const MAX_ORDER: usize = 24;

/// `Σ_turn mult·e^{2πi·turn}` with integer multiplicities (negative on odd degree).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EigenCharacter {
    multiplicity: BTreeMap<Rat, i64>,
}

impl EigenCharacter {
    fn push(&mut self, turn: Rat, m: i64) {
        let e = self.multiplicity.entry(frac(turn)).or_insert(0);
        *e += m;
        if *e == 0 {
            self.multiplicity.remove(&frac(turn));
        }
    }

    pub fn multiplicities(&self) -> &BTreeMap<Rat, i64> {
        &self.multiplicity
    }

    /// Signed count of invariant basis vectors.
    pub fn invariant_count(&self) -> i64 {
        self.multiplicity.get(&Rat::zero()).copied().unwrap_or(0)
    }

    pub fn to_cyclotomic(&self) -> Cyclotomic {
        self.multiplicity
            .iter()
            .fold(Cyclotomic::zero(), |acc, (t, m)| acc + Cyclotomic::root_of_unity(*t) * Cyclotomic::from_int(*m))
    }

    pub fn to_c64(&self) -> Complex64 {
        self.multiplicity
            .iter()
            .map(|(t, m)| Complex64::from_polar(*m as f64, std::f64::consts::TAU * crate::rational::to_f64(t)))
            .sum()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleResult {
    pub character: EigenCharacter,
    pub method: &'static str,
    pub basis: String,
}

impl OracleResult {
    pub fn value(&self) -> Cyclotomic {
        self.character.to_cyclotomic()
    }
}

/// Trace of `z ↦ ζ^j z`, `ζ = e^{2πi/n}`, on the monomial basis `z^m`, `0 ≤ m ≤ k`, of `H⁰(O(k))`.
pub fn sphere_equivariant_character(k: i64, n: usize, j: usize) -> Result<OracleResult> {
    if k < 0 {
        return Err(Error::Domain("negative degree needs the dual basis of H¹, which is not implemented".into()));
    }
    if k > MAX_DEGREE || n == 0 || n > MAX_ORDER || j >= n {
        return Err(Error::Domain(format!("sphere oracle needs 0 ≤ k ≤ {MAX_DEGREE}, 1 ≤ n ≤ {MAX_ORDER}, 0 ≤ j < n")));
    }
    let mut ch = EigenCharacter::default();
    for m in 0..=k {
        // (ζ^j z)^m = ζ^{jm} z^m
        ch.push(rat(j as i64 * m, n as i64), 1);
    }
    Ok(OracleResult { character: ch, method: "monomial basis of H⁰(O(k)); H¹ = 0", basis: format!("z^0 .. z^{k}") })
}

/// Number of monomials `z^m` fixed by every rotation of order `n`.
pub fn sphere_invariant_count(k: i64, n: usize) -> Result<i64> {
    sphere_equivariant_character(k, n, 0)?;
    Ok((0..=k).filter(|&m| (0..n as i64).all(|j| frac(rat(j * m, n as i64)).is_zero())).count() as i64)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EllipticLattice {
    /// `ℤ[i]`
    Gaussian,
    /// `ℤ[ω]`, `ω = e^{2πi/3}`
    Eisenstein,
}

/// Rotation `z ↦ e^{2πi·turn}z` of `ℂ/Λ`: trace on `H⁰ = ⟨1⟩` minus trace on `H^{0,1} = ⟨dz̄⟩`.
pub fn elliptic_pullback_character(lattice: EllipticLattice, turn: Rat) -> Result<OracleResult> {
    let unit_orders: &[i64] = match lattice {
        EllipticLattice::Gaussian => &[1, 2, 4],
        EllipticLattice::Eisenstein => &[1, 2, 3, 6],
    };
    let t = frac(turn);
    if !unit_orders.contains(t.denom()) {
        return Err(Error::Domain(format!("rotation by turn {t} does not preserve the lattice {lattice:?}")));
    }
    let mut ch = EigenCharacter::default();
    ch.push(Rat::zero(), 1);
    // pullback of dz̄ is conj(e^{2πi·turn})dz̄
    ch.push(-t, -1);
    Ok(OracleResult { character: ch, method: "pullback on {1} and {dz̄}", basis: "1 | dz̄".into() })
}

/// Turn of the complex-linear part of an integer matrix preserving the Gram form, read off
/// `trace A = 2cos 2πθ` and the sign of `Im(A·ω₁)/ω₁ ∝ A₁₀` in the basis `ω₁ = √g₀₀`.
fn linear_turn(a: &[[i64; 2]; 2]) -> Result<Rat> {
    if a[0][0] * a[1][1] - a[0][1] * a[1][0] != 1 {
        return Err(Error::Domain("orientation-reversing maps are not holomorphic".into()));
    }
    let magnitude = match a[0][0] + a[1][1] {
        2 => return Ok(Rat::zero()),
        -2 => return Ok(rat(1, 2)),
        0 => rat(1, 4),
        1 => rat(1, 6),
        -1 => rat(1, 3),
        tr => return Err(Error::Domain(format!("trace {tr} is not a crystallographic rotation"))),
    };
    Ok(if a[1][0] > 0 { magnitude } else { -magnitude })
}

/// Eigen-turns of one torus element on the constant section and on `dz̄`, with flat character `β`.
fn torus_basis_turns(g: &AffineIsometry, beta: Rat) -> Result<(Rat, Rat)> {
    let theta = linear_turn(g.point_part())?;
    Ok((frac(beta), frac(beta - theta)))
}

/// Character of one element of a finite group acting on `T²` with a flat character `β`.
pub fn torus_pullback_character(g: &AffineIsometry, beta: Rat) -> Result<OracleResult> {
    let (even, odd) = torus_basis_turns(g, beta)?;
    let mut ch = EigenCharacter::default();
    ch.push(even, 1);
    ch.push(odd, -1);
    Ok(OracleResult { character: ch, method: "pullback on constant sections and dz̄", basis: "1 | dz̄".into() })
}

/// `dim H⁰(T², L)^H − dim H^{0,1}(T², L)^H` for a flat `L` and dolbeault kind.
pub fn torus_invariant_index(model: &QuotientModel) -> Result<i64> {
    let elements = match &model.geometry {
        Geometry::Torus { elements, .. } => elements,
        _ => return Err(Error::Domain("torus oracle needs a finite group acting on T²".into())),
    };
    if model.bundle.operator != OperatorKind::Dolbeault || model.bundle.twist_degree != 0 {
        return Err(Error::Domain("torus oracle supports untwisted dolbeault kind with flat characters only".into()));
    }
    let mut even_invariant = true;
    let mut odd_invariant = true;
    for (i, g) in elements.iter().enumerate() {
        let (even, odd) = torus_basis_turns(g, model.fiber_character(&Element::Finite(i)))?;
        even_invariant &= even.is_zero();
        odd_invariant &= odd.is_zero();
    }
    Ok(even_invariant as i64 - odd_invariant as i64)
}
