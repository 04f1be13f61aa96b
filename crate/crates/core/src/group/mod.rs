//! Finite and crystallographic groups.

pub mod affine;
pub mod cryst;
pub mod lattice;
pub mod table;

use std::fmt::Debug;
use std::hash::Hash;

pub use affine::{AffineIsometry, FixedSet};
pub use cryst::{Centralizer, ClassKey, CosetSection, CrystGroup};
pub use table::FiniteGroupTable;

/// What the group algebra needs from a group.
pub trait Group {
    type Elem: Clone + Ord + Hash + Debug;

    /// Identifies the group; elements of algebras over different groups never mix.
    fn fingerprint(&self) -> String;
    fn identity(&self) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Self::Elem;
    fn conjugate_test(&self, g: &Self::Elem, h: &Self::Elem) -> bool;
}

impl Group for FiniteGroupTable {
    type Elem = usize;

    fn fingerprint(&self) -> String {
        let table: Vec<usize> = (0..self.order()).flat_map(|a| (0..self.order()).map(move |b| (a, b))).map(|(a, b)| self.mul(a, b)).collect();
        format!("table{:?}", table)
    }
    fn identity(&self) -> usize {
        FiniteGroupTable::identity(self)
    }
    fn mul(&self, a: &usize, b: &usize) -> usize {
        FiniteGroupTable::mul(self, *a, *b)
    }
    fn inv(&self, a: &usize) -> usize {
        FiniteGroupTable::inv(self, *a)
    }
    fn conjugate_test(&self, g: &usize, h: &usize) -> bool {
        self.are_conjugate(*g, *h)
    }
}

impl Group for CrystGroup {
    type Elem = AffineIsometry;

    fn fingerprint(&self) -> String {
        format!("cryst{:?}{:?}", self.gram(), self.coset_representatives())
    }
    fn identity(&self) -> AffineIsometry {
        AffineIsometry::identity()
    }
    fn mul(&self, a: &AffineIsometry, b: &AffineIsometry) -> AffineIsometry {
        a.compose(b)
    }
    fn inv(&self, a: &AffineIsometry) -> AffineIsometry {
        a.inverse()
    }
    fn conjugate_test(&self, g: &AffineIsometry, h: &AffineIsometry) -> bool {
        CrystGroup::conjugate_test(self, g, h)
    }
}
