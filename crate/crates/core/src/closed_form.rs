//! Closed-form entries of the inverse Kasteleyn matrix.
//!
//! Every contour integral of the original formulas is evaluated as a finite
//! sum: a pure pole against `(1+r)^b` gives a binomial, an extra `1/(1-r)`
//! gives a partial binomial sum, and the double `s`-integral collapses to
//! [`s_kernel`]. The `series` module checks these reductions independently.

use std::sync::OnceLock;

use num_traits::{One, Zero};

use crate::combinatorics::{binom, catalan, factorial, partial_binom_sum};
use crate::error::{invalid, Error, Result};
use crate::graph::{b_vertex, VertexCoord};
use crate::rational::{sign_pow, BigRational};

pub use crate::combinatorics::{asm_number, catalan as catalan_number};

/// `p(n, k, l)` for `0 <= l <= k <= n`.
pub fn p_coeff(n: usize, k: usize, l: usize) -> Result<BigRational> {
    if l > k || k > n {
        return Err(invalid(format!("p({n},{k},{l}) needs l <= k <= n")));
    }
    Ok(p_unchecked(n as i64, k as i64, l as i64))
}

fn p_unchecked(n: i64, k: i64, l: i64) -> BigRational {
    let num = factorial((n + k - 2 * l + 1) as u64) * factorial((2 * n - k - l + 1) as u64);
    let den = factorial((k - l) as u64) * factorial((3 * n - k + 2 - 2 * l) as u64);
    let tail = catalan(n - k).expect("k <= n") * (3 * n - 3 * k + 2);
    sign_pow(k) * BigRational::new(num * tail, den)
}

/// Value of the double `s`-residue: `+1` if `l2 = l1 + 1`, `-1` if
/// `l1 = l2 + 1`, and `0` otherwise.
pub fn s_kernel(l1: usize, l2: usize) -> i64 {
    if l2 == l1 + 1 {
        1
    } else if l1 == l2 + 1 {
        -1
    } else {
        0
    }
}

pub fn h1b(n: usize, i: usize) -> BigRational {
    let ni = n as i64;
    (0..=ni)
        .map(|k| p_unchecked(ni, k, 0) * BigRational::from_integer(binom(ni - k, i as i64 - 2 * k)))
        .sum()
}

pub fn h0b(n: usize, i: usize) -> BigRational {
    let ni = n as i64;
    let sum: BigRational = (0..=ni)
        .map(|k| {
            let s = partial_binom_sum(ni - k, i as i64 - 2 * k - 1);
            p_unchecked(ni, k, 0) * BigRational::from_integer(s)
        })
        .sum();
    sum - BigRational::from_integer(((i + 1) % 2).into())
}

/// `t^{ea eb}_n(i, j)`; convenience wrapper that builds a [`ClosedForm`].
pub fn t_fn(n: usize, ea: u8, eb: u8, i: usize, j: usize) -> Result<BigRational> {
    ClosedForm::new(n)?.t(ea, eb, i, j)
}

pub fn kinv_b(n: usize, x: VertexCoord) -> Result<BigRational> {
    ClosedForm::new(n)?.kinv_b(x)
}

pub fn kinv(n: usize, x: VertexCoord, y: VertexCoord) -> Result<BigRational> {
    ClosedForm::new(n)?.kinv(x, y)
}

/// Decomposition of a vertex as `(i1, i1 + 2 i2 + eps)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Decomposed {
    pub i1: i64,
    pub i2: i64,
    pub eps: i64,
}

impl Decomposed {
    pub fn of(v: VertexCoord) -> Self {
        let d = v.x2 - v.x1;
        Self { i1: v.x1, i2: d / 2, eps: d % 2 }
    }

    /// Whether the vertex sits in the index range covered by the general
    /// inverse formulas.
    pub fn in_range(&self, n: i64) -> bool {
        self.i1 < 2 * n && self.i2 <= n - (self.i1 + self.eps) / 2
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct InverseEntryQuery {
    pub n: usize,
    pub x: VertexCoord,
    pub y: VertexCoord,
    pub dx: Decomposed,
    pub dy: Decomposed,
}

impl InverseEntryQuery {
    pub fn new(n: usize, x: VertexCoord, y: VertexCoord) -> Result<Self> {
        check_vertex(n, x)?;
        check_vertex(n, y)?;
        Ok(Self { n, x, y, dx: Decomposed::of(x), dy: Decomposed::of(y) })
    }

    pub fn in_range(&self) -> bool {
        let n = self.n as i64;
        self.dx.in_range(n) && self.dy.in_range(n)
    }
}

fn check_vertex(n: usize, v: VertexCoord) -> Result<()> {
    let ni = n as i64;
    let inside = v.x1 >= 0
        && v.x1 <= 2 * ni
        && v.x2 >= v.x1
        && v.x2 <= 2 * ni + 1
        && !(ni % 2 == 1 && v.x1 == 2 * ni && v.x2 == 2 * ni + 1);
    if inside {
        Ok(())
    } else {
        Err(Error::UnknownVertex(v))
    }
}

/// Precomputed tables for one `n`.
#[derive(Debug)]
pub struct ClosedForm {
    n: usize,
    /// `p(n, k, 0)`.
    p0: Vec<BigRational>,
    /// `W(k1, k2) = sum_{l1, l2} p(n,k1,l1) p(n,k2,l2) s_kernel(l1, l2)`.
    w: Vec<Vec<BigRational>>,
    /// `binom(n-k, i-2k)` and the partial sums `sum_{j < i-2k} binom(n-k, j)`,
    /// indexed `[k][i]` for `0 <= i <= 2n`.
    r1: Vec<Vec<BigRational>>,
    r0: Vec<Vec<BigRational>>,
    h0: Vec<BigRational>,
    h1: Vec<BigRational>,
    t: OnceLock<[Vec<BigRational>; 4]>,
}

impl ClosedForm {
    pub fn new(n: usize) -> Result<Self> {
        if n < 1 {
            return Err(invalid("n must be at least 1"));
        }
        let ni = n as i64;
        let m = 2 * n + 1;
        let p: Vec<Vec<BigRational>> = (0..=ni)
            .map(|k| (0..=k).map(|l| p_unchecked(ni, k, l)).collect())
            .collect();
        let p0: Vec<BigRational> = p.iter().map(|row| row[0].clone()).collect();
        let mut w = vec![vec![BigRational::zero(); n + 1]; n + 1];
        for k1 in 0..=n {
            for k2 in 0..=n {
                let mut acc = BigRational::zero();
                for l1 in 0..=k1 {
                    if l1 < k2 {
                        acc += &p[k1][l1] * &p[k2][l1 + 1];
                    }
                    if l1 >= 1 && l1 - 1 <= k2 {
                        acc -= &p[k1][l1] * &p[k2][l1 - 1];
                    }
                }
                w[k1][k2] = acc;
            }
        }
        let r1: Vec<Vec<BigRational>> = (0..=ni)
            .map(|k| {
                (0..m as i64)
                    .map(|i| BigRational::from_integer(binom(ni - k, i - 2 * k)))
                    .collect()
            })
            .collect();
        let r0: Vec<Vec<BigRational>> = (0..=ni)
            .map(|k| {
                (0..m as i64)
                    .map(|i| BigRational::from_integer(partial_binom_sum(ni - k, i - 2 * k - 1)))
                    .collect()
            })
            .collect();
        let h1 = (0..m)
            .map(|i| (0..=n).map(|k| &p0[k] * &r1[k][i]).sum())
            .collect();
        let h0 = (0..m)
            .map(|i| {
                let s: BigRational = (0..=n).map(|k| &p0[k] * &r0[k][i]).sum();
                s - BigRational::from_integer(((i + 1) % 2).into())
            })
            .collect();
        Ok(Self { n, p0, w, r1, r0, h0, h1, t: OnceLock::new() })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p0(&self, k: usize) -> &BigRational {
        &self.p0[k]
    }

    /// `h^b_0(i)` for `0 <= i <= 2n`.
    pub fn h0(&self, i: usize) -> Result<&BigRational> {
        self.h0.get(i).ok_or_else(|| invalid(format!("h index {i} exceeds 2n")))
    }

    pub fn h1(&self, i: usize) -> Result<&BigRational> {
        self.h1.get(i).ok_or_else(|| invalid(format!("h index {i} exceeds 2n")))
    }

    fn t_tables(&self) -> &[Vec<BigRational>; 4] {
        self.t.get_or_init(|| {
            let m = 2 * self.n + 1;
            let mk = |ra: &Vec<Vec<BigRational>>, rb: &Vec<Vec<BigRational>>| {
                // core(i, j) = sum_{k1,k2} ra[k1][i] W[k1][k2] rb[k2][j]
                let mut wr = vec![vec![BigRational::zero(); m]; self.n + 1];
                for k1 in 0..=self.n {
                    for k2 in 0..=self.n {
                        if self.w[k1][k2].is_zero() {
                            continue;
                        }
                        for j in 0..m {
                            if !rb[k2][j].is_zero() {
                                wr[k1][j] += &self.w[k1][k2] * &rb[k2][j];
                            }
                        }
                    }
                }
                let mut core = vec![BigRational::zero(); m * m];
                for k1 in 0..=self.n {
                    for i in 0..m {
                        if ra[k1][i].is_zero() {
                            continue;
                        }
                        for j in 0..m {
                            if !wr[k1][j].is_zero() {
                                core[i * m + j] += &ra[k1][i] * &wr[k1][j];
                            }
                        }
                    }
                }
                core
            };
            let mut t00 = mk(&self.r0, &self.r0);
            let mut t10 = mk(&self.r1, &self.r0);
            let mut t01 = mk(&self.r0, &self.r1);
            let t11 = mk(&self.r1, &self.r1);
            let ind = |b: bool| BigRational::from_integer((b as i64).into());
            for i in 0..m {
                for j in 0..m {
                    let (ie, je) = (i % 2 == 0, j % 2 == 0);
                    let extra = ind(i < j && ie && !je) - ind(i > j && !ie && je)
                        + ind(je) * &self.h0[i]
                        - ind(ie) * &self.h0[j];
                    t00[i * m + j] += extra;
                    t10[i * m + j] += ind(je) * &self.h1[i];
                    t01[i * m + j] -= ind(ie) * &self.h1[j];
                }
            }
            [t00, t01, t10, t11]
        })
    }

    /// `t^{ea eb}_n(i, j)` for `0 <= i, j <= 2n`.
    pub fn t(&self, ea: u8, eb: u8, i: usize, j: usize) -> Result<BigRational> {
        if ea > 1 || eb > 1 {
            return Err(invalid("t superscripts must be 0 or 1"));
        }
        let m = 2 * self.n + 1;
        if i >= m || j >= m {
            return Err(invalid(format!("t arguments ({i},{j}) exceed 2n")));
        }
        Ok(self.t_tables()[(2 * ea + eb) as usize][i * m + j].clone())
    }

    fn t_raw(&self, ea: u8, eb: u8, i: i64, j: i64) -> &BigRational {
        let m = 2 * self.n + 1;
        &self.t_tables()[(2 * ea + eb) as usize][i as usize * m + j as usize]
    }

    /// `K^{-1}_n(x, b)`.
    pub fn kinv_b(&self, x: VertexCoord) -> Result<BigRational> {
        let n = self.n as i64;
        check_vertex(self.n, x)?;
        if x == b_vertex(self.n) {
            return Ok(BigRational::zero());
        }
        if n % 2 == 0 && x == VertexCoord::new(2 * n, 2 * n) {
            return Ok(-BigRational::one());
        }
        let Decomposed { i1, i2, eps } = Decomposed::of(x);
        let mut acc = BigRational::zero();
        if eps == 1 {
            for l in 0..=i1 {
                let c = binom(i2 - 1 + l, l);
                if c.is_zero() {
                    continue;
                }
                acc += sign_pow(i2 + l) * BigRational::from_integer(c) * &self.h1[(i1 - l) as usize];
            }
        } else {
            for l in 0..=i2 {
                acc += BigRational::from_integer(binom(i2, l)) * &self.h0[(i1 + l) as usize];
            }
            acc *= sign_pow(i2);
        }
        Ok(acc)
    }

    /// `K^{-1}_n(x, y)` for any pair of vertices of `G_n`.
    pub fn kinv(&self, x: VertexCoord, y: VertexCoord) -> Result<BigRational> {
        let q = InverseEntryQuery::new(self.n, x, y)?;
        self.kinv_query(&q)
    }

    pub fn kinv_query(&self, q: &InverseEntryQuery) -> Result<BigRational> {
        let n = self.n as i64;
        let b = b_vertex(self.n);
        let (x, y) = (q.x, q.y);
        if x == y {
            return Ok(BigRational::zero());
        }
        if y == b {
            return self.kinv_b(x);
        }
        if x == b {
            return Ok(-self.kinv_b(y)?);
        }
        // For even n the vertex b is a leaf hanging off (2n, 2n), so the row
        // of K at b forces K^{-1}((2n,2n), y) = 0 for y != b.
        let corner = VertexCoord::new(2 * n, 2 * n);
        if n % 2 == 0 && (x == corner || y == corner) {
            return Ok(BigRational::zero());
        }
        let (dx, dy) = (q.dx, q.dy);
        match (dx.eps, dy.eps) {
            (1, 1) => Ok(self.kinv11(dx, dy)),
            (0, 0) => Ok(self.kinv00(dx, dy)),
            (1, 0) => Ok(self.kinv10(x, y, dx, dy)),
            _ => Ok(-self.kinv10(y, x, dy, dx)),
        }
    }

    fn kinv11(&self, dx: Decomposed, dy: Decomposed) -> BigRational {
        let mut acc = BigRational::zero();
        for l1 in 0..=dx.i1 {
            let c1 = binom(dx.i2 - 1 + l1, l1);
            if c1.is_zero() {
                continue;
            }
            for l2 in 0..=dy.i1 {
                let c2 = binom(dy.i2 - 1 + l2, l2);
                if c2.is_zero() {
                    continue;
                }
                let t = self.t_raw(1, 1, dx.i1 - l1, dy.i1 - l2);
                acc += sign_pow(l1 + l2) * BigRational::from_integer(&c1 * c2) * t;
            }
        }
        sign_pow(dx.i2 + dy.i2) * acc
    }

    fn kinv00(&self, dx: Decomposed, dy: Decomposed) -> BigRational {
        let mut acc = BigRational::zero();
        for l1 in 0..=dx.i2 {
            let c1 = binom(dx.i2, l1);
            for l2 in 0..=dy.i2 {
                let c2 = binom(dy.i2, l2);
                let t = self.t_raw(0, 0, dx.i1 + l1, dy.i1 + l2);
                acc += BigRational::from_integer(&c1 * c2) * t;
            }
        }
        sign_pow(dx.i2 + dy.i2) * acc
    }

    fn kinv10(&self, x: VertexCoord, y: VertexCoord, dx: Decomposed, dy: Decomposed) -> BigRational {
        let mut acc = BigRational::zero();
        for l1 in 0..=dx.i1 {
            let c1 = binom(dx.i2 - 1 + l1, l1);
            if c1.is_zero() {
                continue;
            }
            for l2 in 0..=dy.i2 {
                let c2 = binom(dy.i2, l2);
                let t = self.t_raw(1, 0, dx.i1 - l1, dy.i1 + l2);
                acc += sign_pow(l1) * BigRational::from_integer(&c1 * c2) * t;
            }
        }
        let sign = sign_pow(dx.i2 + dy.i2);
        let mut out = &sign * acc;
        if x.x1 >= y.x1 && x.x1 + x.x2 < y.x1 + y.x2 {
            out -= sign * BigRational::from_integer(binom(dy.i2 - dx.i2 - 1, dx.i1 - dy.i1));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::TsscppGraph;
    use crate::linalg::{invert, kasteleyn_matrix};
    use crate::rational::{frac, int};

    fn v(a: i64, b: i64) -> VertexCoord {
        VertexCoord::new(a, b)
    }

    #[test]
    fn p_values() {
        for n in 1..=8 {
            assert_eq!(p_coeff(n, n, 0).unwrap(), sign_pow(n as i64));
            for i in 0..=n {
                let s = p_coeff(n, i, 0).unwrap();
                assert_eq!(s > BigRational::zero(), i % 2 == 0);
            }
        }
        assert_eq!(p_coeff(2, 0, 0).unwrap(), frac(2, 7));
        assert!(p_coeff(2, 1, 2).is_err());
        assert!(p_coeff(2, 3, 0).is_err());
    }

    #[test]
    fn h_values() {
        for n in 1..=5 {
            assert_eq!(h0b(n, 0), int(-1));
        }
        assert_eq!(h1b(1, 0), frac(1, 2));
        let cf = ClosedForm::new(3).unwrap();
        for i in 0..=6 {
            assert_eq!(*cf.h0(i).unwrap(), h0b(3, i));
            assert_eq!(*cf.h1(i).unwrap(), h1b(3, i));
        }
    }

    #[test]
    fn kernel_antisymmetry() {
        assert_eq!(s_kernel(0, 1), 1);
        assert_eq!(s_kernel(1, 0), -1);
        assert_eq!(s_kernel(0, 0), 0);
        let cf = ClosedForm::new(3).unwrap();
        for i in 0..=6 {
            assert_eq!(cf.t(0, 0, i, i).unwrap(), int(0));
            for j in 0..=6 {
                assert_eq!(cf.t(1, 1, i, j).unwrap(), -cf.t(1, 1, j, i).unwrap());
            }
        }
    }

    #[test]
    fn g2_boundary_vector() {
        let cf = ClosedForm::new(2).unwrap();
        let got: Vec<BigRational> = (0..=4)
            .map(|j| crate::rational::abs(&cf.kinv_b(v(j, j)).unwrap()))
            .collect();
        assert_eq!(got, vec![int(1), frac(2, 7), frac(1, 7), frac(4, 7), int(1)]);
        assert_eq!(cf.kinv_b(v(4, 4)).unwrap(), int(-1));
        assert_eq!(cf.kinv_b(b_vertex(2)).unwrap(), int(0));
    }

    #[test]
    fn agrees_with_exact_inverse() {
        for n in 1..=3 {
            let g = TsscppGraph::new(n).unwrap();
            let inv = invert(&kasteleyn_matrix(&g)).unwrap();
            let cf = ClosedForm::new(n).unwrap();
            for (a, &x) in g.vertices().iter().enumerate() {
                for (b, &y) in g.vertices().iter().enumerate() {
                    assert_eq!(cf.kinv(x, y).unwrap(), *inv.get(a, b), "n={n} {x} {y}");
                }
            }
        }
    }

    #[test]
    fn t11_example_matches_inverse() {
        let g = TsscppGraph::new(2).unwrap();
        let inv = invert(&kasteleyn_matrix(&g)).unwrap();
        let a = g.vertex_index(v(0, 1)).unwrap();
        let b = g.vertex_index(v(1, 2)).unwrap();
        assert_eq!(t_fn(2, 1, 1, 0, 1).unwrap(), *inv.get(a, b));
    }

    #[test]
    fn top_boundary_sign() {
        for n in 1..=6usize {
            let cf = ClosedForm::new(n).unwrap();
            for i in 0..n as i64 {
                let val = cf.kinv_b(v(2 * i, 2 * n as i64 + 1)).unwrap();
                let expected = sign_pow(n as i64 - i) * p_coeff(n, i as usize, 0).unwrap();
                assert_eq!(val, expected);
            }
        }
    }

    #[test]
    fn unknown_vertices_rejected() {
        assert!(matches!(kinv(3, v(6, 7), v(0, 0)), Err(Error::UnknownVertex(_))));
        assert!(matches!(kinv_b(2, v(3, 1)), Err(Error::UnknownVertex(_))));
        assert!(ClosedForm::new(0).is_err());
    }

    #[test]
    fn decomposition_range() {
        let q = InverseEntryQuery::new(2, v(1, 4), v(4, 4)).unwrap();
        assert_eq!(q.dx, Decomposed { i1: 1, i2: 1, eps: 1 });
        assert_eq!(q.dy, Decomposed { i1: 4, i2: 0, eps: 0 });
        assert!(!q.in_range());
    }
}
