//! 2×2 integer matrices, rational 2-vectors, and Smith normal form solving over ℤ².

use num_traits::{Signed, Zero};

use crate::rational::{frac, int, Rat};

/// Row-major 2×2 integer matrix in lattice coordinates.
pub type IMat2 = [[i64; 2]; 2];
pub type Vec2 = [Rat; 2];
pub type RMat2 = [[Rat; 2]; 2];

pub const IDENTITY: IMat2 = [[1, 0], [0, 1]];

pub fn zero_vec() -> Vec2 {
    [int(0), int(0)]
}

pub fn imul(a: &IMat2, b: &IMat2) -> IMat2 {
    let mut c = [[0i64; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    c
}

pub fn idet(a: &IMat2) -> i64 {
    a[0][0] * a[1][1] - a[0][1] * a[1][0]
}

pub fn itrace(a: &IMat2) -> i64 {
    a[0][0] + a[1][1]
}

/// Inverse of a unimodular matrix.
pub fn iinv(a: &IMat2) -> IMat2 {
    let d = idet(a);
    assert!(d == 1 || d == -1, "matrix is not unimodular");
    [[a[1][1] * d, -a[0][1] * d], [-a[1][0] * d, a[0][0] * d]]
}

pub fn isub(a: &IMat2, b: &IMat2) -> IMat2 {
    [[a[0][0] - b[0][0], a[0][1] - b[0][1]], [a[1][0] - b[1][0], a[1][1] - b[1][1]]]
}

/// I − A.
pub fn one_minus(a: &IMat2) -> IMat2 {
    isub(&IDENTITY, a)
}

pub fn apply(a: &IMat2, v: &Vec2) -> Vec2 {
    [
        int(a[0][0]) * v[0] + int(a[0][1]) * v[1],
        int(a[1][0]) * v[0] + int(a[1][1]) * v[1],
    ]
}

pub fn apply_int(a: &IMat2, v: &[i64; 2]) -> [i64; 2] {
    [a[0][0] * v[0] + a[0][1] * v[1], a[1][0] * v[0] + a[1][1] * v[1]]
}

pub fn vadd(a: &Vec2, b: &Vec2) -> Vec2 {
    [a[0] + b[0], a[1] + b[1]]
}

pub fn vsub(a: &Vec2, b: &Vec2) -> Vec2 {
    [a[0] - b[0], a[1] - b[1]]
}

pub fn vneg(a: &Vec2) -> Vec2 {
    [-a[0], -a[1]]
}

pub fn from_int(v: [i64; 2]) -> Vec2 {
    [int(v[0]), int(v[1])]
}

pub fn vfrac(v: &Vec2) -> Vec2 {
    [frac(v[0]), frac(v[1])]
}

pub fn vfloor(v: &Vec2) -> [i64; 2] {
    [v[0].floor().to_integer(), v[1].floor().to_integer()]
}

pub fn is_integral(v: &Vec2) -> bool {
    v[0].is_integer() && v[1].is_integer()
}

pub fn sup_norm(v: &Vec2) -> Rat {
    v[0].abs().max(v[1].abs())
}

/// Rational inverse of an integer matrix with nonzero determinant.
pub fn rinv(a: &IMat2) -> RMat2 {
    let d = idet(a);
    assert!(d != 0);
    let d = int(d);
    [[int(a[1][1]) / d, int(-a[0][1]) / d], [int(-a[1][0]) / d, int(a[0][0]) / d]]
}

pub fn rapply(a: &RMat2, v: &Vec2) -> Vec2 {
    [a[0][0] * v[0] + a[0][1] * v[1], a[1][0] * v[0] + a[1][1] * v[1]]
}

/// Smith normal form `U·M·V = diag(d0, d1)` with `U`, `V` unimodular, `d0 | d1`, `d_i >= 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Smith {
    pub u: IMat2,
    pub v: IMat2,
    pub d: [i64; 2],
}

pub fn smith(m: &IMat2) -> Smith {
    let mut a = *m;
    let mut u = IDENTITY;
    let mut v = IDENTITY;

    // row op on (a, u): row i -= q * row j
    fn row_sub(a: &mut IMat2, u: &mut IMat2, i: usize, j: usize, q: i64) {
        for c in 0..2 {
            a[i][c] -= q * a[j][c];
            u[i][c] -= q * u[j][c];
        }
    }
    fn col_sub(a: &mut IMat2, v: &mut IMat2, i: usize, j: usize, q: i64) {
        for r in 0..2 {
            a[r][i] -= q * a[r][j];
            v[r][i] -= q * v[r][j];
        }
    }

    loop {
        // pivot: smallest nonzero |entry| moved to (0, 0)
        let mut best: Option<(usize, usize)> = None;
        for r in 0..2 {
            for c in 0..2 {
                if a[r][c] != 0 && best.is_none_or(|(br, bc)| a[r][c].abs() < a[br][bc].abs()) {
                    best = Some((r, c));
                }
            }
        }
        let Some((pr, pc)) = best else {
            return Smith { u, v, d: [0, 0] };
        };
        if pr == 1 {
            a.swap(0, 1);
            u.swap(0, 1);
        }
        if pc == 1 {
            for r in 0..2 {
                a[r].swap(0, 1);
                v[r].swap(0, 1);
            }
        }
        let p = a[0][0];
        let q_row = a[1][0].div_euclid(p);
        row_sub(&mut a, &mut u, 1, 0, q_row);
        let q_col = a[0][1].div_euclid(p);
        col_sub(&mut a, &mut v, 1, 0, q_col);
        if a[1][0] != 0 || a[0][1] != 0 {
            continue;
        }
        if a[1][1] % p != 0 {
            // fold row 1 into row 0 and retry to force divisibility
            for c in 0..2 {
                a[0][c] += a[1][c];
                u[0][c] += u[1][c];
            }
            continue;
        }
        if a[0][0] < 0 {
            for c in 0..2 {
                a[0][c] = -a[0][c];
                u[0][c] = -u[0][c];
            }
        }
        if a[1][1] < 0 {
            for c in 0..2 {
                a[1][c] = -a[1][c];
                u[1][c] = -u[1][c];
            }
        }
        return Smith { u, v, d: [a[0][0], a[1][1]] };
    }
}

impl Smith {
    pub fn rank(&self) -> usize {
        self.d.iter().filter(|&&x| x != 0).count()
    }

    /// An integer `y` with `M·y = w`, if one exists.
    pub fn solve_integer(&self, w: &Vec2) -> Option<[i64; 2]> {
        let uw = apply(&self.u, w);
        let mut z = [0i64; 2];
        for i in 0..2 {
            if self.d[i] == 0 {
                if !uw[i].is_zero() {
                    return None;
                }
            } else {
                let q = uw[i] / int(self.d[i]);
                if !q.is_integer() {
                    return None;
                }
                z[i] = q.to_integer();
            }
        }
        Some(apply_int(&self.v, &z))
    }

    /// Basis of the integer kernel {y ∈ ℤ² : M·y = 0}.
    pub fn kernel_basis(&self) -> Vec<[i64; 2]> {
        (0..2)
            .filter(|&i| self.d[i] == 0)
            .map(|i| [self.v[0][i], self.v[1][i]])
            .collect()
    }

    /// Coset representatives of ℤ² / M·ℤ² (M of full rank).
    pub fn cokernel_reps(&self) -> Vec<[i64; 2]> {
        assert_eq!(self.rank(), 2, "cokernel is infinite");
        let uinv = iinv(&self.u);
        let mut out = Vec::new();
        for i in 0..self.d[0] {
            for j in 0..self.d[1] {
                out.push(apply_int(&uinv, &[i, j]));
            }
        }
        out
    }

    /// Canonical representative of `w` modulo the lattice M·ℤ² (coordinates reduced in
    /// the Smith basis; directions with `d_i = 0` are left untouched).
    pub fn reduce_mod_image(&self, w: &Vec2) -> Vec2 {
        let mut uw = apply(&self.u, w);
        for i in 0..2 {
            if self.d[i] != 0 {
                let d = int(self.d[i]);
                let q = (uw[i] / d).floor();
                uw[i] -= q * d;
            }
        }
        apply(&iinv(&self.u), &uw)
    }
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use proptest::prelude::*;

    fn check(m: IMat2) {
        let s = smith(&m);
        let prod = imul(&imul(&s.u, &m), &s.v);
        assert_eq!(prod, [[s.d[0], 0], [0, s.d[1]]], "m = {m:?}");
        assert!(idet(&s.u).abs() == 1 && idet(&s.v).abs() == 1);
        if s.d[0] != 0 {
            assert_eq!(s.d[1] % s.d[0], 0);
        }
    }

    #[test]
    fn smith_examples() {
        check([[1, 1], [-1, 1]]);
        check([[2, 0], [0, 2]]);
        check([[0, 0], [0, 0]]);
        check([[2, 0], [0, 0]]);
        check([[2, 4], [6, 8]]);
        check([[0, 3], [0, 0]]);
    }

    proptest! {
        #[test]
        fn smith_is_a_valid_factorization(a in -9i64..9, b in -9i64..9, c in -9i64..9, d in -9i64..9) {
            check([[a, b], [c, d]]);
        }

        #[test]
        fn solve_integer_round_trips(a in -6i64..6, b in -6i64..6, c in -6i64..6, d in -6i64..6,
                                     y0 in -5i64..5, y1 in -5i64..5) {
            let m = [[a, b], [c, d]];
            let w = from_int(apply_int(&m, &[y0, y1]));
            let s = smith(&m);
            let y = s.solve_integer(&w).expect("w is in the image by construction");
            prop_assert_eq!(from_int(apply_int(&m, &y)), w);
        }
    }

    #[test]
    fn image_membership() {
        // I - R for the quarter turn has index-2 image
        let m = one_minus(&[[0, -1], [1, 0]]);
        let s = smith(&m);
        assert_eq!(s.d, [1, 2]);
        assert!(s.solve_integer(&[int(1), int(1)]).is_some());
        assert!(s.solve_integer(&[int(1), int(0)]).is_none());
        assert!(s.solve_integer(&[rat(1, 2), int(0)]).is_none());
        assert_eq!(s.cokernel_reps().len(), 2);
    }

    #[test]
    fn kernel_of_reflection_part() {
        let refl = [[1, 0], [0, -1]];
        let s = smith(&one_minus(&refl));
        assert_eq!(s.kernel_basis().len(), 1);
        let k = s.kernel_basis()[0];
        assert_eq!(apply_int(&one_minus(&refl), &k), [0, 0]);
    }
}
