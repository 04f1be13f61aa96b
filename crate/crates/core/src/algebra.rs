//! Finitely supported elements of the group algebra ℂG and the localized traces τ^(g), ρ.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::group::Group;
use crate::scalar::Scalar;

/// `Σ α_h h` with no zero coefficient stored.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupAlgebraElement<E: Ord, S> {
    group: String,
    coeffs: BTreeMap<E, S>,
}

impl<E: Clone + Ord, S: Scalar> GroupAlgebraElement<E, S> {
    pub fn zero<G: Group<Elem = E>>(group: &G) -> Self {
        GroupAlgebraElement { group: group.fingerprint(), coeffs: BTreeMap::new() }
    }

    pub fn delta<G: Group<Elem = E>>(group: &G, g: E) -> Self {
        Self::from_terms(group, [(g, S::one())])
    }

    pub fn from_terms<G: Group<Elem = E>>(group: &G, terms: impl IntoIterator<Item = (E, S)>) -> Self {
        let mut a = Self::zero(group);
        for (g, c) in terms {
            a.add_term(g, c);
        }
        a
    }

    fn add_term(&mut self, g: E, c: S) {
        let v = match self.coeffs.remove(&g) {
            Some(old) => old + c,
            None => c,
        };
        if !v.is_zero() {
            self.coeffs.insert(g, v);
        }
    }

    pub fn coefficient(&self, g: &E) -> S {
        self.coeffs.get(g).cloned().unwrap_or_else(S::zero)
    }

    pub fn support(&self) -> impl Iterator<Item = &E> {
        self.coeffs.keys()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&E, &S)> {
        self.coeffs.iter()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn check<G: Group<Elem = E>>(&self, group: &G) -> Result<()> {
        if self.group != group.fingerprint() {
            return Err(Error::Structural("group algebra elements belong to different groups".into()));
        }
        Ok(())
    }

    pub fn add<G: Group<Elem = E>>(&self, other: &Self, group: &G) -> Result<Self> {
        self.check(group)?;
        other.check(group)?;
        let mut out = self.clone();
        for (g, c) in &other.coeffs {
            out.add_term(g.clone(), c.clone());
        }
        Ok(out)
    }

    /// `(a∗b)(k) = Σ_h a(k h⁻¹) b(h)`.
    pub fn convolve<G: Group<Elem = E>>(&self, other: &Self, group: &G) -> Result<Self> {
        self.check(group)?;
        other.check(group)?;
        let mut out = Self { group: self.group.clone(), coeffs: BTreeMap::new() };
        for (g, a) in &self.coeffs {
            for (h, b) in &other.coeffs {
                out.add_term(group.mul(g, h), a.clone() * b.clone());
            }
        }
        Ok(out)
    }

    /// `τ^(g)(a) = Σ_{h ∈ supp a ∩ (g)} α_h`.
    pub fn localized_trace<G: Group<Elem = E>>(&self, class_rep: &E, group: &G) -> Result<S> {
        self.check(group)?;
        Ok(self
            .coeffs
            .iter()
            .filter(|(h, _)| group.conjugate_test(class_rep, h))
            .fold(S::zero(), |acc, (_, c)| acc + c.clone()))
    }

    /// `ρ(a) = Σ_h α_h`.
    pub fn rho(&self) -> S {
        self.coeffs.values().fold(S::zero(), |acc, c| acc + c.clone())
    }

    pub fn l1_norm(&self) -> f64 {
        self.coeffs.values().map(|c| c.to_c64().norm()).sum()
    }

    /// One representative per conjugacy class meeting the support.
    pub fn classes_met<G: Group<Elem = E>>(&self, group: &G) -> Vec<E> {
        let mut reps: Vec<E> = Vec::new();
        for h in self.coeffs.keys() {
            if !reps.iter().any(|r| group.conjugate_test(r, h)) {
                reps.push(h.clone());
            }
        }
        reps
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclotomic::Cyclotomic;
    use crate::group::FiniteGroupTable;
    use crate::rational::{int, rat};

    type A = GroupAlgebraElement<usize, Cyclotomic>;

    fn s3() -> FiniteGroupTable {
        let perms: Vec<[usize; 3]> = vec![[0, 1, 2], [1, 0, 2], [0, 2, 1], [2, 1, 0], [1, 2, 0], [2, 0, 1]];
        let idx = |p: [usize; 3]| perms.iter().position(|q| *q == p).unwrap();
        let product = perms
            .iter()
            .map(|a| perms.iter().map(|b| idx([a[b[0]], a[b[1]], a[b[2]]])).collect())
            .collect();
        FiniteGroupTable::new(product, None).unwrap()
    }

    fn c(n: i64) -> Cyclotomic {
        Cyclotomic::from_int(n)
    }

    #[test]
    fn convolution_identities() {
        let g = s3();
        let a = A::from_terms(&g, [(1, c(2)), (4, Cyclotomic::i())]);
        assert_eq!(A::delta(&g, 0).convolve(&a, &g).unwrap(), a);
        assert_eq!(A::delta(&g, 1).convolve(&A::delta(&g, 4), &g).unwrap(), A::delta(&g, g.mul(1, 4)));
        // (δ_g + δ_h) ∗ δ_{g⁻¹} = δ_e + δ_{hg⁻¹}
        let (x, y) = (4, 2);
        let lhs = A::from_terms(&g, [(x, c(1)), (y, c(1))]).convolve(&A::delta(&g, g.inv(x)), &g).unwrap();
        let rhs = A::from_terms(&g, [(0, c(1)), (g.mul(y, g.inv(x)), c(1))]);
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn group_mismatch_is_structural() {
        let a = A::delta(&s3(), 1);
        let b = A::delta(&FiniteGroupTable::cyclic(6), 1);
        assert!(matches!(a.convolve(&b, &s3()), Err(Error::Structural(_))));
    }

    #[test]
    fn trace_examples() {
        let g = s3();
        let a = A::from_terms(&g, [(0, c(3)), (1, c(2))]);
        assert_eq!(a.localized_trace(&0, &g).unwrap(), c(3));
        let all = A::from_terms(&g, (0..6).map(|h| (h, c(1))));
        assert_eq!(all.localized_trace(&1, &g).unwrap(), c(3));
        for k in 0..6 {
            assert_eq!(A::delta(&g, g.conjugate(1, k)).localized_trace(&1, &g).unwrap(), c(1));
        }
        // representative independence
        assert_eq!(all.localized_trace(&2, &g).unwrap(), all.localized_trace(&3, &g).unwrap());
    }

    #[test]
    fn rho_and_norm_examples() {
        let g = FiniteGroupTable::cyclic(4);
        assert_eq!(A::delta(&g, 0).rho(), c(1));
        assert!(A::from_terms(&g, [(1, c(2)), (2, c(-2))]).rho().is_zero());
        assert_eq!(A::delta(&g, 3).l1_norm(), 1.0);
        let a = A::from_terms(&g, [(0, c(3)), (1, Cyclotomic::i() * c(-4))]);
        assert_eq!(a.l1_norm(), 7.0);
    }

    #[test]
    fn zero_coefficients_dropped() {
        let g = FiniteGroupTable::cyclic(3);
        let a = A::from_terms(&g, [(1, Cyclotomic::from_rat(rat(1, 2))), (1, Cyclotomic::from_rat(rat(-1, 2)))]);
        assert!(a.is_empty());
        assert_eq!(a.coefficient(&1), Cyclotomic::from_rat(int(0)));
    }
}
