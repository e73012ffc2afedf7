//! Dense exact matrices, the Kasteleyn matrix of `G_n`, Pfaffians and inverses.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::graph::TsscppGraph;
use crate::rational::{format_pq, BigRational};

/// Square matrix over the rationals, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    dim: usize,
    data: Vec<BigRational>,
}

impl Matrix {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![BigRational::zero(); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = BigRational::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<BigRational>>) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for r in rows {
            if r.len() != dim {
                return Err(Error::InvalidShape("rows must form a square matrix".into()));
            }
            data.extend(r);
        }
        Ok(Self { dim, data })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.data[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigRational) {
        self.data[i * self.dim + j] = v;
    }

    pub fn rows(&self) -> impl Iterator<Item = &[BigRational]> {
        self.data.chunks(self.dim.max(1)).take(self.dim)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn is_skew(&self) -> bool {
        (0..self.dim).all(|i| {
            (i..self.dim).all(|j| *self.get(i, j) == -self.get(j, i).clone())
        })
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        if self.dim != other.dim {
            return Err(Error::InvalidShape("dimension mismatch".into()));
        }
        let d = self.dim;
        let mut out = Matrix::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..d {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let cell = &mut out.data[i * d + j];
                        *cell += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    /// The principal submatrix on the given indices, in the order given.
    pub fn submatrix(&self, keep: &[usize]) -> Result<Matrix> {
        if keep.iter().any(|&k| k >= self.dim) {
            return Err(invalid("submatrix index out of range"));
        }
        let mut m = Matrix::zeros(keep.len());
        for (a, &i) in keep.iter().enumerate() {
            for (b, &j) in keep.iter().enumerate() {
                m.set(a, b, self.get(i, j).clone());
            }
        }
        Ok(m)
    }

    /// Removes the listed rows and the matching columns.
    pub fn delete_vertices(&self, removed: &[usize]) -> Result<Matrix> {
        if removed.iter().any(|&k| k >= self.dim) {
            return Err(invalid("deleted index out of range"));
        }
        let keep: Vec<usize> = (0..self.dim).filter(|i| !removed.contains(i)).collect();
        self.submatrix(&keep)
    }

    fn integer_entries(&self) -> Option<Vec<BigInt>> {
        self.data
            .iter()
            .map(|q| q.is_integer().then(|| q.numer().clone()))
            .collect()
    }

    pub fn to_json(&self) -> MatrixJson {
        MatrixJson {
            dim: self.dim,
            entries: self.rows().map(|r| r.iter().map(format_pq).collect()).collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MatrixJson {
    pub dim: usize,
    pub entries: Vec<Vec<String>>,
}

/// Kasteleyn weighting: `K(x, y) = k(x, y) - k(y, x)` where `k(x, y) = 1` for
/// an even `x` with `y` one step left or one step up or down, and for a
/// diagonal `x` with `y` the previous diagonal vertex.
pub fn kasteleyn_matrix(graph: &TsscppGraph) -> Matrix {
    let d = graph.num_vertices();
    let mut m = Matrix::zeros(d);
    for &(a, b) in graph.edges() {
        let s = kasteleyn_sign(graph, a, b);
        m.set(a, b, BigRational::from_integer(s.into()));
        m.set(b, a, BigRational::from_integer((-s).into()));
    }
    m
}

fn k_arrow(graph: &TsscppGraph, x: usize, y: usize) -> bool {
    let (p, q) = (graph.vertex(x), graph.vertex(y));
    let even = p.parity() == 0;
    (even && p.x2 == q.x2 && p.x1 - q.x1 == 1)
        || (even && p.x1 == q.x1 && (p.x2 - q.x2).abs() == 1)
        || (p.is_diagonal() && q.is_diagonal() && q.x1 == p.x1 - 1)
}

/// Sign of `K(a, b)` on an edge.
pub fn kasteleyn_sign(graph: &TsscppGraph, a: usize, b: usize) -> i64 {
    k_arrow(graph, a, b) as i64 - k_arrow(graph, b, a) as i64
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrientationReport {
    pub faces_checked: usize,
    /// Indices into `graph.faces()` whose boundary has an even number of
    /// arrows pointing counter-clockwise.
    pub bad_faces: Vec<usize>,
    /// Edges carrying no orientation (zero in `K`).
    pub unoriented_edges: usize,
}

impl OrientationReport {
    pub fn is_pfaffian(&self) -> bool {
        self.bad_faces.is_empty() && self.unoriented_edges == 0
    }
}

pub fn check_orientation(graph: &TsscppGraph, k: &Matrix) -> OrientationReport {
    let unoriented_edges = graph
        .edges()
        .iter()
        .filter(|&&(a, b)| k.get(a, b).abs() != BigRational::one())
        .count();
    let bad_faces = graph
        .faces()
        .iter()
        .enumerate()
        .filter(|(_, f)| {
            let ccw = f.boundary().filter(|&(a, b)| k.get(a, b).is_positive()).count();
            ccw % 2 == 0
        })
        .map(|(i, _)| i)
        .collect();
    OrientationReport { faces_checked: graph.faces().len(), bad_faces, unoriented_edges }
}

/// Pfaffian by skew-symmetric elimination with pivoting.
pub fn pfaffian(m: &Matrix) -> Result<BigRational> {
    if !m.is_skew() {
        return Err(Error::InvalidShape("pfaffian needs a skew-symmetric matrix".into()));
    }
    let d = m.dim();
    if d % 2 == 1 {
        return Err(Error::InvalidShape("pfaffian needs an even dimension".into()));
    }
    let mut a = m.clone();
    let mut result = BigRational::one();
    let mut k = 0;
    while k + 1 < d {
        let Some(p) = (k + 1..d).find(|&j| !a.get(k, j).is_zero()) else {
            return Ok(BigRational::zero());
        };
        if p != k + 1 {
            swap_sym(&mut a, k + 1, p);
            result = -result;
        }
        let piv = a.get(k, k + 1).clone();
        result *= &piv;
        for i in k + 2..d {
            let ik = a.get(i, k).clone();
            let ik1 = a.get(i, k + 1).clone();
            if ik.is_zero() && ik1.is_zero() {
                continue;
            }
            for j in k + 2..d {
                let kj = a.get(k, j);
                let k1j = a.get(k + 1, j);
                if kj.is_zero() && k1j.is_zero() {
                    continue;
                }
                let delta = (&ik1 * kj - &ik * k1j) / &piv;
                let cell = &mut a.data[i * d + j];
                *cell -= delta;
            }
        }
        k += 2;
    }
    Ok(result)
}

fn swap_sym(a: &mut Matrix, r: usize, s: usize) {
    let d = a.dim;
    for j in 0..d {
        a.data.swap(r * d + j, s * d + j);
    }
    for i in 0..d {
        a.data.swap(i * d + r, i * d + s);
    }
}

pub fn determinant(m: &Matrix) -> BigRational {
    if let Some(ints) = m.integer_entries() {
        return BigRational::from_integer(bareiss_det(ints, m.dim));
    }
    let d = m.dim;
    let mut a = m.data.clone();
    let mut det = BigRational::one();
    for k in 0..d {
        let Some(p) = (k..d).find(|&i| !a[i * d + k].is_zero()) else {
            return BigRational::zero();
        };
        if p != k {
            for j in 0..d {
                a.swap(k * d + j, p * d + j);
            }
            det = -det;
        }
        let piv = a[k * d + k].clone();
        det *= &piv;
        for i in k + 1..d {
            if a[i * d + k].is_zero() {
                continue;
            }
            let f = &a[i * d + k] / &piv;
            for j in k..d {
                let t = &f * &a[k * d + j];
                a[i * d + j] -= t;
            }
        }
    }
    det
}

fn bareiss_det(mut a: Vec<BigInt>, d: usize) -> BigInt {
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..d {
        let Some(p) = (k..d).find(|&i| !a[i * d + k].is_zero()) else {
            return BigInt::zero();
        };
        if p != k {
            for j in 0..d {
                a.swap(k * d + j, p * d + j);
            }
            sign = -sign;
        }
        for i in k + 1..d {
            for j in k + 1..d {
                let v = &a[k * d + k] * &a[i * d + j] - &a[i * d + k] * &a[k * d + j];
                a[i * d + j] = v.div_floor(&prev);
            }
        }
        prev = a[k * d + k].clone();
    }
    if d == 0 {
        return BigInt::one();
    }
    sign * prev
}

/// Exact inverse. Integer matrices go through fraction-free Gauss-Jordan.
pub fn invert(m: &Matrix) -> Result<Matrix> {
    let d = m.dim;
    if let Some(ints) = m.integer_entries() {
        return invert_integer(ints, d);
    }
    let w = 2 * d;
    let mut a: Vec<BigRational> = vec![BigRational::zero(); d * w];
    for i in 0..d {
        for j in 0..d {
            a[i * w + j] = m.get(i, j).clone();
        }
        a[i * w + d + i] = BigRational::one();
    }
    for k in 0..d {
        let p = (k..d).find(|&i| !a[i * w + k].is_zero()).ok_or(Error::SingularMatrix)?;
        if p != k {
            for j in 0..w {
                a.swap(k * w + j, p * w + j);
            }
        }
        let piv = a[k * w + k].clone();
        for j in 0..w {
            a[k * w + j] /= &piv;
        }
        for i in 0..d {
            if i == k || a[i * w + k].is_zero() {
                continue;
            }
            let f = a[i * w + k].clone();
            for j in 0..w {
                if !a[k * w + j].is_zero() {
                    let t = &f * &a[k * w + j];
                    a[i * w + j] -= t;
                }
            }
        }
    }
    let mut out = Matrix::zeros(d);
    for i in 0..d {
        for j in 0..d {
            out.set(i, j, a[i * w + d + j].clone());
        }
    }
    Ok(out)
}

fn invert_integer(ints: Vec<BigInt>, d: usize) -> Result<Matrix> {
    let w = 2 * d;
    let mut a: Vec<BigInt> = vec![BigInt::zero(); d * w];
    for i in 0..d {
        for j in 0..d {
            a[i * w + j] = ints[i * d + j].clone();
        }
        a[i * w + d + i] = BigInt::one();
    }
    let mut prev = BigInt::one();
    for k in 0..d {
        let p = (k..d).find(|&i| !a[i * w + k].is_zero()).ok_or(Error::SingularMatrix)?;
        if p != k {
            for j in 0..w {
                a.swap(k * w + j, p * w + j);
            }
        }
        let pivot = a[k * w + k].clone();
        for i in 0..d {
            if i == k {
                continue;
            }
            let f = a[i * w + k].clone();
            for j in 0..w {
                if j == k {
                    continue;
                }
                let v = &pivot * &a[i * w + j] - &f * &a[k * w + j];
                a[i * w + j] = if prev.is_one() { v } else { v.div_floor(&prev) };
            }
            a[i * w + k] = BigInt::zero();
        }
        prev = pivot;
    }
    // The left block is now `prev` times the identity.
    let mut out = Matrix::zeros(d);
    for i in 0..d {
        for j in 0..d {
            let q = BigRational::new(a[i * w + d + j].clone(), prev.clone());
            out.set(i, j, q);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed_form::asm_number;
    use crate::graph::{enumerate_matchings, TsscppGraph};
    use crate::rational::int;
    use proptest::prelude::*;

    fn skew_from(n: usize, vals: &[i64]) -> Matrix {
        let mut m = Matrix::zeros(n);
        let mut it = vals.iter().cycle();
        for i in 0..n {
            for j in i + 1..n {
                let v = *it.next().unwrap();
                m.set(i, j, int(v));
                m.set(j, i, int(-v));
            }
        }
        m
    }

    #[test]
    fn pfaffian_small() {
        let m = skew_from(2, &[5]);
        assert_eq!(pfaffian(&m).unwrap(), int(5));
        // a12 a34 - a13 a24 + a14 a23
        let m = skew_from(4, &[1, 2, 3, 4, 5, 6]);
        assert_eq!(pfaffian(&m).unwrap(), int(6 - 2 * 5 + 3 * 4));
        assert!(matches!(pfaffian(&skew_from(3, &[1, 2, 3])), Err(Error::InvalidShape(_))));
        assert_eq!(pfaffian(&Matrix::zeros(0)).unwrap(), int(1));
    }

    #[test]
    fn pfaffian_rejects_non_skew() {
        let m = Matrix::identity(2);
        assert!(matches!(pfaffian(&m), Err(Error::InvalidShape(_))));
    }

    #[test]
    fn kasteleyn_counts_tsscpp() {
        for n in 1..=5 {
            let g = TsscppGraph::new(n).unwrap();
            let k = kasteleyn_matrix(&g);
            assert!(k.is_skew());
            let pf = pfaffian(&k).unwrap();
            assert_eq!(pf.abs(), BigRational::from_integer(asm_number(n as i64 + 1).unwrap()), "n={n}");
        }
    }

    #[test]
    fn orientation_is_pfaffian() {
        for n in 1..=7 {
            let g = TsscppGraph::new(n).unwrap();
            let k = kasteleyn_matrix(&g);
            let r = check_orientation(&g, &k);
            assert!(r.is_pfaffian(), "n={n}: {r:?}");
        }
    }

    #[test]
    fn flipped_edge_breaks_orientation() {
        let g = TsscppGraph::new(2).unwrap();
        let mut k = kasteleyn_matrix(&g);
        let (a, b) = g.edges()[3];
        let v = k.get(a, b).clone();
        k.set(a, b, -v.clone());
        k.set(b, a, v);
        assert!(!check_orientation(&g, &k).is_pfaffian());
    }

    #[test]
    fn pfaffian_matches_signed_enumeration() {
        // Each matching contributes the sign of its permutation times the
        // product of weights; a Pfaffian orientation makes all signs agree.
        let g = TsscppGraph::new(3).unwrap();
        let k = kasteleyn_matrix(&g);
        let all = enumerate_matchings(&g, 4).unwrap();
        let pf = pfaffian(&k).unwrap();
        assert_eq!(pf.abs(), int(all.len() as i64));
    }

    #[test]
    fn inverse_round_trip() {
        for n in 1..=4 {
            let g = TsscppGraph::new(n).unwrap();
            let k = kasteleyn_matrix(&g);
            let inv = invert(&k).unwrap();
            assert!(inv.is_skew());
            assert_eq!(k.mul(&inv).unwrap(), Matrix::identity(k.dim()));
        }
    }

    #[test]
    fn rational_and_integer_paths_agree() {
        let g = TsscppGraph::new(2).unwrap();
        let k = kasteleyn_matrix(&g);
        let mut scaled = k.clone();
        for i in 0..k.dim() {
            for j in 0..k.dim() {
                scaled.set(i, j, k.get(i, j) * BigRational::new(1.into(), 2.into()));
            }
        }
        let a = invert(&k).unwrap();
        let b = invert(&scaled).unwrap();
        for i in 0..k.dim() {
            for j in 0..k.dim() {
                assert_eq!(a.get(i, j) * BigRational::from_integer(2.into()), *b.get(i, j));
            }
        }
    }

    #[test]
    fn singular_inverse() {
        let m = Matrix::zeros(3);
        assert!(matches!(invert(&m), Err(Error::SingularMatrix)));
    }

    #[test]
    fn deletion_drops_rows_and_columns() {
        let m = skew_from(4, &[1, 2, 3, 4, 5, 6]);
        let s = m.delete_vertices(&[1, 2]).unwrap();
        assert_eq!(s.dim(), 2);
        assert_eq!(*s.get(0, 1), int(3));
        assert!(m.delete_vertices(&[9]).is_err());
    }

    proptest! {
        #[test]
        fn pfaffian_squared_is_determinant(
            half in 1usize..4,
            vals in proptest::collection::vec(-3i64..=3, 1..30),
        ) {
            let m = skew_from(2 * half, &vals);
            let pf = pfaffian(&m).unwrap();
            prop_assert_eq!(&pf * &pf, determinant(&m));
        }

        #[test]
        fn rational_determinant_matches_bareiss(
            vals in proptest::collection::vec(-4i64..=4, 16),
        ) {
            let rows: Vec<Vec<BigRational>> =
                vals.chunks(4).map(|r| r.iter().map(|&v| int(v)).collect()).collect();
            let m = Matrix::from_rows(rows).unwrap();
            let half = BigRational::new(1.into(), 2.into());
            let mut h = m.clone();
            for i in 0..4 {
                for j in 0..4 {
                    h.set(i, j, m.get(i, j) * &half);
                }
            }
            prop_assert_eq!(determinant(&h) * int(16), determinant(&m));
        }
    }
}
