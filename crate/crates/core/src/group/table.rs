//! Finite groups given by multiplication tables.

use std::collections::{BTreeSet, HashMap};
use std::hash::Hash;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroupTable {
    product: Vec<Vec<usize>>,
    inverse: Vec<usize>,
    identity: usize,
    names: Vec<String>,
}

impl FiniteGroupTable {
    /// Validates closure, identity, inverses and associativity (exhaustive up to order 64,
    /// 10⁴ pseudo-random triples beyond).
    pub fn new(product: Vec<Vec<usize>>, names: Option<Vec<String>>) -> Result<Self> {
        let n = product.len();
        if n == 0 {
            return Err(Error::Structural("empty group table".into()));
        }
        if product.iter().any(|row| row.len() != n) {
            return Err(Error::Structural("group table is not square".into()));
        }
        if product.iter().flatten().any(|&x| x >= n) {
            return Err(Error::Structural("group table entry out of range".into()));
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|x| product[e][x] == x && product[x][e] == x))
            .ok_or_else(|| Error::Structural("no identity element".into()))?;
        let mut inverse = vec![0; n];
        for x in 0..n {
            inverse[x] = (0..n)
                .find(|&y| product[x][y] == identity && product[y][x] == identity)
                .ok_or_else(|| Error::Structural(format!("element {x} has no inverse")))?;
        }
        let assoc = |a: usize, b: usize, c: usize| product[product[a][b]][c] == product[a][product[b][c]];
        if n <= 64 {
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        if !assoc(a, b, c) {
                            return Err(Error::Structural(format!("associativity fails at ({a},{b},{c})")));
                        }
                    }
                }
            }
        } else {
            // deterministic LCG sampling
            let mut state: u64 = 0x9E37_79B9_7F4A_7C15;
            let mut next = || {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                (state >> 33) as usize % n
            };
            for _ in 0..10_000 {
                let (a, b, c) = (next(), next(), next());
                if !assoc(a, b, c) {
                    return Err(Error::Structural(format!("associativity fails at ({a},{b},{c})")));
                }
            }
        }
        let names = names.unwrap_or_else(|| (0..n).map(|i| format!("g{i}")).collect());
        if names.len() != n {
            return Err(Error::Structural("name list length differs from group order".into()));
        }
        Ok(FiniteGroupTable { product, inverse, identity, names })
    }

    /// Closes a set of generators under a multiplication; elements are sorted with the
    /// identity first so that indices are deterministic.
    pub fn generate<E, F>(identity: E, generators: &[E], mul: F, name: impl Fn(&E) -> String, cap: usize) -> Result<(Self, Vec<E>)>
    where
        E: Clone + Ord + Hash,
        F: Fn(&E, &E) -> E,
    {
        let mut seen: BTreeSet<E> = BTreeSet::new();
        seen.insert(identity.clone());
        let mut frontier = vec![identity.clone()];
        while let Some(x) = frontier.pop() {
            for g in generators {
                let y = mul(&x, g);
                if seen.insert(y.clone()) {
                    if seen.len() > cap {
                        return Err(Error::Structural(format!("generated group exceeds {cap} elements")));
                    }
                    frontier.push(y);
                }
            }
        }
        let mut elems: Vec<E> = seen.into_iter().filter(|e| *e != identity).collect();
        elems.insert(0, identity);
        let index: HashMap<E, usize> = elems.iter().cloned().enumerate().map(|(i, e)| (e, i)).collect();
        let product = elems
            .iter()
            .map(|a| elems.iter().map(|b| index[&mul(a, b)]).collect())
            .collect();
        let names = elems.iter().map(name).collect();
        Ok((Self::new(product, Some(names))?, elems))
    }

    /// Cyclic group ℤ/n with element k ↦ k.
    pub fn cyclic(n: usize) -> Self {
        let product = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        Self::new(product, None).expect("cyclic table is valid")
    }

    pub fn order(&self) -> usize {
        self.product.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.product[a][b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn name(&self, a: usize) -> &str {
        &self.names[a]
    }

    pub fn conjugate(&self, g: usize, k: usize) -> usize {
        self.mul(self.mul(k, g), self.inv(k))
    }

    pub fn class_of(&self, g: usize) -> BTreeSet<usize> {
        (0..self.order()).map(|k| self.conjugate(g, k)).collect()
    }

    /// Conjugacy classes ordered by their minimal-index representative.
    pub fn classes(&self) -> Vec<Vec<usize>> {
        let mut assigned = vec![false; self.order()];
        let mut out = Vec::new();
        for g in 0..self.order() {
            if assigned[g] {
                continue;
            }
            let class: Vec<usize> = self.class_of(g).into_iter().collect();
            for &h in &class {
                assigned[h] = true;
            }
            out.push(class);
        }
        out
    }

    pub fn are_conjugate(&self, g: usize, h: usize) -> bool {
        (0..self.order()).any(|k| self.conjugate(g, k) == h)
    }

    pub fn centralizer(&self, g: usize) -> Vec<usize> {
        (0..self.order()).filter(|&h| self.mul(h, g) == self.mul(g, h)).collect()
    }

    /// Section K: for each class member, the minimal-index k conjugating `g` onto it.
    pub fn coset_section(&self, g: usize) -> Vec<usize> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for k in 0..self.order() {
            if seen.insert(self.conjugate(g, k)) {
                out.push(k);
            }
        }
        out
    }

    pub fn element_order(&self, g: usize) -> usize {
        let mut x = g;
        let mut k = 1;
        while x != self.identity {
            x = self.mul(x, g);
            k += 1;
        }
        k
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn s3() -> FiniteGroupTable {
        let perms: Vec<[usize; 3]> = vec![[0, 1, 2], [1, 0, 2], [0, 2, 1], [2, 1, 0], [1, 2, 0], [2, 0, 1]];
        let idx = |p: [usize; 3]| perms.iter().position(|q| *q == p).unwrap();
        let product = perms
            .iter()
            .map(|a| perms.iter().map(|b| idx([a[b[0]], a[b[1]], a[b[2]]])).collect())
            .collect();
        FiniteGroupTable::new(product, None).unwrap()
    }

    #[test]
    fn cyclic_four_has_singleton_classes() {
        let z4 = FiniteGroupTable::cyclic(4);
        let classes = z4.classes();
        assert_eq!(classes.len(), 4);
        assert!(classes.iter().all(|c| c.len() == 1));
        assert_eq!(z4.centralizer(1).len(), 4);
        assert_eq!(z4.coset_section(3), vec![0]);
    }

    #[test]
    fn s3_classes_and_centralizers() {
        let g = s3();
        let sizes: Vec<usize> = g.classes().iter().map(|c| c.len()).collect();
        assert_eq!(sizes, vec![1, 3, 2]);
        assert_eq!(g.centralizer(1).len(), 2);
        assert_eq!(g.coset_section(1).len(), 3);
    }

    #[test]
    fn trivial_group() {
        let t = FiniteGroupTable::cyclic(1);
        assert_eq!(t.classes(), vec![vec![0]]);
    }

    #[test]
    fn rejects_malformed_tables() {
        assert!(FiniteGroupTable::new(vec![vec![0, 1], vec![1]], None).is_err());
        assert!(FiniteGroupTable::new(vec![vec![0, 2], vec![1, 0]], None).is_err());
        // no identity
        assert!(FiniteGroupTable::new(vec![vec![1, 0], vec![0, 0]], None).is_err());
        // x*x = x for all but not a group (left zero semigroup on 2 elements)
        assert!(FiniteGroupTable::new(vec![vec![0, 0], vec![1, 1]], None).is_err());
    }

    #[test]
    fn nonassociative_loop_rejected() {
        // a 5-element loop with identity and inverses that is not associative
        let t = vec![
            vec![0, 1, 2, 3, 4],
            vec![1, 0, 3, 4, 2],
            vec![2, 4, 0, 1, 3],
            vec![3, 2, 4, 0, 1],
            vec![4, 3, 1, 2, 0],
        ];
        assert!(FiniteGroupTable::new(t, None).is_err());
    }

    #[test]
    fn section_times_centralizer_is_the_group() {
        let g = s3();
        for x in 0..6 {
            let k = g.coset_section(x);
            let z = g.centralizer(x);
            let mut prods: Vec<usize> = k.iter().flat_map(|&a| z.iter().map(move |&b| (a, b))).map(|(a, b)| g.mul(a, b)).collect();
            prods.sort();
            let len = prods.len();
            prods.dedup();
            assert_eq!(prods.len(), len, "K x Z -> G injective");
            assert_eq!(prods, (0..6).collect::<Vec<_>>());
        }
    }
}
