//! Boundary objects built by recurrence in `n`, graphical condensation and
//! the partition-function recurrence, each checkable against closed forms
//! and Pfaffians.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::closed_form::{p_coeff, ClosedForm};
use crate::combinatorics::{asm_number, binom};
use crate::error::{invalid, Result};
use crate::graph::{b_vertex, TsscppGraph, VertexCoord};
use crate::linalg::{kasteleyn_matrix, pfaffian, Matrix};
use crate::rational::{format_pq, sign_pow, BigRational};

/// `Z_{n-1} / Z_n = A_n / A_{n+1}`.
pub fn z_ratio(n: usize) -> BigRational {
    let n = n as i64;
    BigRational::new(asm_number(n).expect("n >= 1"), asm_number(n + 1).expect("n >= 1"))
}

/// Matching counts of `G_n` with vertex sets removed, from one Kasteleyn
/// matrix.
pub struct PartitionFunctions {
    graph: TsscppGraph,
    k: Matrix,
}

impl PartitionFunctions {
    pub fn new(n: usize) -> Result<Self> {
        let graph = TsscppGraph::new(n)?;
        let k = kasteleyn_matrix(&graph);
        Ok(Self { graph, k })
    }

    pub fn graph(&self) -> &TsscppGraph {
        &self.graph
    }

    /// `Z` of `G_n` minus the given vertices; repeated vertices give zero.
    pub fn z_without(&self, removed: &[VertexCoord]) -> Result<BigInt> {
        let mut idx = removed
            .iter()
            .map(|&v| self.graph.vertex_index(v))
            .collect::<Result<Vec<_>>>()?;
        idx.sort_unstable();
        if idx.windows(2).any(|w| w[0] == w[1]) {
            return Ok(BigInt::zero());
        }
        self.z_without_indices(&idx)
    }

    pub fn z_without_indices(&self, removed: &[usize]) -> Result<BigInt> {
        if removed.len() % 2 == 1 {
            return Ok(BigInt::zero());
        }
        let sub = self.k.delete_vertices(removed)?;
        Ok(pfaffian(&sub)?.abs().to_integer())
    }

    pub fn z(&self) -> Result<BigInt> {
        self.z_without_indices(&[])
    }

    /// `Z^{{u, v}} / Z`.
    pub fn ratio(&self, u: VertexCoord, v: VertexCoord) -> Result<BigRational> {
        Ok(BigRational::new(self.z_without(&[u, v])?, self.z()?))
    }
}

/// `T_n(i) = (-1)^i p(n, i, 0)` for `0 <= i <= n - 1`.
pub fn t_table(n: usize) -> Vec<BigRational> {
    (0..n)
        .map(|i| sign_pow(i as i64) * p_coeff(n, i, 0).expect("i < n"))
        .collect()
}

/// `T_n(i)` as the Pfaffian ratio `Z^{{(2i, 2n+1), b}} / Z`.
pub fn t_table_pfaffian(n: usize) -> Result<Vec<BigRational>> {
    let pf = PartitionFunctions::new(n)?;
    let top = 2 * n as i64 + 1;
    (0..n)
        .map(|i| pf.ratio(VertexCoord::new(2 * i as i64, top), b_vertex(n)))
        .collect()
}

pub type Table2 = Vec<Vec<BigRational>>;

/// `R_n(i, j) = K^{-1}_n((2i, 2n+1), (2j, 2n+1))` for `0 <= i, j <= n - 1`,
/// built from `R_1 = 0` by
/// `R_n(i, j) = R_{n-1}(i-1, j-1) + T_{n-1}(j-1) T_n(i) - T_{n-1}(i-1) T_n(j)`
/// with `R_n(0, j) = (Z_{n-1}/Z_n) T_{n-1}(j-1)` and antisymmetry.
pub fn r_table(n: usize) -> Result<Table2> {
    if n < 1 {
        return Err(invalid("n must be at least 1"));
    }
    let mut prev: Table2 = vec![vec![BigRational::zero()]];
    let mut t_prev = t_table(1);
    for m in 2..=n {
        let t_cur = t_table(m);
        let z = z_ratio(m);
        let mut r = vec![vec![BigRational::zero(); m]; m];
        for j in 1..m {
            let v = &z * &t_prev[j - 1];
            r[0][j] = v.clone();
            r[j][0] = -v;
        }
        // Anti-diagonal order: (i, j) only needs (i-1, j-1) from the
        // previous order.
        for i in 1..m {
            for j in 1..m {
                if i == j {
                    continue;
                }
                r[i][j] = &prev[i - 1][j - 1] + &t_prev[j - 1] * &t_cur[i] - &t_prev[i - 1] * &t_cur[j];
            }
        }
        prev = r;
        t_prev = t_cur;
    }
    Ok(prev)
}

pub fn r_table_closed_form(cf: &ClosedForm) -> Result<Table2> {
    let n = cf.n();
    let top = 2 * n as i64 + 1;
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    cf.kinv(VertexCoord::new(2 * i as i64, top), VertexCoord::new(2 * j as i64, top))
                })
                .collect()
        })
        .collect()
}

/// `g^b_n(j) = (-1)^{j+1} K^{-1}_n((j, j), b)` for `0 <= j <= 2n`.
pub fn gb_closed_form(cf: &ClosedForm) -> Result<Vec<BigRational>> {
    (0..=2 * cf.n() as i64)
        .map(|j| Ok(sign_pow(j + 1) * cf.kinv_b(VertexCoord::new(j, j))?))
        .collect()
}

/// `g_n(i, j) = |K^{-1}_n((i, i), (j, j))|` for `i < j`, antisymmetric, over
/// `0 <= i, j <= 2n - 1`.
pub fn gdiag_closed_form(cf: &ClosedForm) -> Result<Table2> {
    let m = 2 * cf.n();
    let mut g = vec![vec![BigRational::zero(); m]; m];
    for i in 0..m {
        for j in i + 1..m {
            let d = |k: usize| VertexCoord::new(k as i64, k as i64);
            let v = cf.kinv(d(i), d(j))?.abs();
            g[j][i] = -v.clone();
            g[i][j] = v;
        }
    }
    Ok(g)
}

/// Value of `g^b_n(2n)`: the edge `((2n, 2n), b)` is forced for even `n`,
/// while for odd `n` the vertex `(2n, 2n)` is `b` itself.
fn gb_last(n: usize) -> BigRational {
    if n.is_multiple_of(2) {
        BigRational::one()
    } else {
        BigRational::zero()
    }
}

fn gb_gdiag_base() -> Result<(Vec<BigRational>, Table2)> {
    let pf = PartitionFunctions::new(1)?;
    let b = b_vertex(1);
    let d = |k: i64| VertexCoord::new(k, k);
    let gb = (0..=2)
        .map(|j| if d(j) == b { Ok(BigRational::zero()) } else { pf.ratio(d(j), b) })
        .collect::<Result<Vec<_>>>()?;
    let v = pf.ratio(d(0), d(1))?;
    let gd = vec![vec![BigRational::zero(), v.clone()], vec![-v, BigRational::zero()]];
    Ok((gb, gd))
}

/// `g^b_n` and `g_n` by the boundary recurrences in `n`, starting from
/// Pfaffian ratios on `G_1`.
pub fn gb_gdiag_recurrence(n: usize) -> Result<(Vec<BigRational>, Table2)> {
    if n < 1 {
        return Err(invalid("n must be at least 1"));
    }
    let (mut gbp, mut gdp) = gb_gdiag_base()?;
    for m in 2..=n {
        let z = z_ratio(m);
        let mut gb = vec![BigRational::zero(); 2 * m + 1];
        gb[0] = BigRational::one();
        gb[1] = z.clone();
        for j in 2..2 * m {
            let mut acc = BigRational::one() - &gbp[j - 2];
            for r in 0..m {
                let g = gdp.get(r).and_then(|row| row.get(j - 2));
                if let Some(g) = g {
                    acc += sign_pow(r as i64)
                        * BigRational::from_integer(binom(m as i64 + 1, r as i64 + 2))
                        * g;
                }
            }
            gb[j] = &z * acc;
        }
        gb[2 * m] = gb_last(m);
        let size = 2 * m;
        let mut gd = vec![vec![BigRational::zero(); size]; size];
        for i in 0..size {
            for j in i + 1..size {
                let v = match i {
                    0 => BigRational::one() - &gb[j],
                    1 => &z * &gbp[j - 2],
                    _ => &gdp[i - 2][j - 2] - &gb[j] * &gbp[i - 2] + &gb[i] * &gbp[j - 2],
                };
                gd[j][i] = -v.clone();
                gd[i][j] = v;
            }
        }
        gbp = gb;
        gdp = gd;
    }
    Ok((gbp, gdp))
}

/// `sum_{j=0}^{2n} g^b_n(j)`.
pub fn sum_rule(n: usize) -> Result<BigRational> {
    let cf = ClosedForm::new(n)?;
    Ok(gb_closed_form(&cf)?.into_iter().sum())
}

/// `n + 1` for even `n`, `n + 1/2` for odd `n`.
pub fn sum_rule_expected(n: usize) -> BigRational {
    let base = BigRational::from_integer((n as i64 + 1).into());
    if n.is_multiple_of(2) {
        base
    } else {
        base - BigRational::new(1.into(), 2.into())
    }
}

/// Checks the condensation identity
/// `Z Z^{abcd} + Z^{ac} Z^{bd} = Z^{ab} Z^{cd} + Z^{ad} Z^{bc}` for four
/// vertices met in this cyclic order around a single face.
pub fn check_condensation(pf: &PartitionFunctions, quad: [VertexCoord; 4]) -> Result<bool> {
    let g = pf.graph();
    let idx = quad.iter().map(|&v| g.vertex_index(v)).collect::<Result<Vec<_>>>()?;
    for a in 0..4 {
        for b in a + 1..4 {
            if idx[a] == idx[b] {
                return Err(invalid("condensation needs four distinct vertices"));
            }
        }
    }
    if !on_common_face_in_order(g, &idx) {
        return Err(invalid("vertices are not in cyclic order on a common face"));
    }
    let [a, b, c, d] = quad;
    let z = |s: &[VertexCoord]| pf.z_without(s);
    let lhs = z(&[])? * z(&[a, b, c, d])? + z(&[a, c])? * z(&[b, d])?;
    let rhs = z(&[a, b])? * z(&[c, d])? + z(&[a, d])? * z(&[b, c])?;
    Ok(lhs == rhs)
}

fn on_common_face_in_order(g: &TsscppGraph, idx: &[usize]) -> bool {
    let cycles = g
        .faces()
        .iter()
        .map(|f| f.vertices.as_slice())
        .chain(std::iter::once(g.outer_face()));
    cycles.into_iter().any(|cyc| {
        let pos: Option<Vec<usize>> =
            idx.iter().map(|v| cyc.iter().position(|w| w == v)).collect();
        let Some(pos) = pos else { return false };
        let k = cyc.len();
        let forward = (0..4).all(|t| {
            let (p, q, r) = (pos[t], pos[(t + 1) % 4], pos[(t + 2) % 4]);
            (q + k - p) % k < (r + k - p) % k
        });
        let mut rev = pos.clone();
        rev.reverse();
        let backward = (0..4).all(|t| {
            let (p, q, r) = (rev[t], rev[(t + 1) % 4], rev[(t + 2) % 4]);
            (q + k - p) % k < (r + k - p) % k
        });
        forward || backward
    })
}

/// Distinct vertices of the outer face in walk order.
pub fn outer_face_vertices(g: &TsscppGraph) -> Vec<VertexCoord> {
    let mut seen = std::collections::HashSet::new();
    g.outer_face()
        .iter()
        .filter(|&&v| seen.insert(v))
        .map(|&v| g.vertex(v))
        .collect()
}

/// `Z_n = Z_{n-1} + sum_{k=0}^{n-1} (n - k) Z_{n-1}^{{b_{n-1}, (0, 2k)}}`,
/// all counts from Pfaffians.
pub fn check_partition_recurrence(n: usize) -> Result<bool> {
    if n < 2 {
        return Err(invalid("the partition recurrence needs n >= 2"));
    }
    let cur = PartitionFunctions::new(n)?;
    let prev = PartitionFunctions::new(n - 1)?;
    let b = b_vertex(n - 1);
    let mut rhs = prev.z()?;
    for k in 0..n {
        let v = VertexCoord::new(0, 2 * k as i64);
        rhs += BigInt::from(n - k) * prev.z_without(&[b, v])?;
    }
    Ok(cur.z()? == rhs)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableMethod {
    ClosedForm,
    Recurrence,
}

impl TableMethod {
    pub fn label(&self) -> &'static str {
        match self {
            TableMethod::ClosedForm => "closed-form",
            TableMethod::Recurrence => "recurrence",
        }
    }
}

#[derive(Clone, Debug)]
pub struct BoundaryTables {
    pub n: usize,
    pub method: TableMethod,
    pub t: Vec<BigRational>,
    pub r: Table2,
    pub gb: Vec<BigRational>,
    pub gdiag: Table2,
    pub z_ratio: BigRational,
}

impl BoundaryTables {
    pub fn build(n: usize, method: TableMethod) -> Result<Self> {
        let (r, gb, gdiag) = match method {
            TableMethod::ClosedForm => {
                let cf = ClosedForm::new(n)?;
                (r_table_closed_form(&cf)?, gb_closed_form(&cf)?, gdiag_closed_form(&cf)?)
            }
            TableMethod::Recurrence => {
                let (gb, gd) = gb_gdiag_recurrence(n)?;
                (r_table(n)?, gb, gd)
            }
        };
        Ok(Self { n, method, t: t_table(n), r, gb, gdiag, z_ratio: z_ratio(n) })
    }

    /// Rows `table,i,j,value,method`; `j` is empty for one-index tables.
    pub fn to_csv(&self) -> String {
        let mut rows: BTreeMap<(u8, usize, usize), String> = BTreeMap::new();
        let m = self.method.label();
        for (i, v) in self.t.iter().enumerate() {
            rows.insert((0, i, 0), format!("T,{i},,{},{m}", format_pq(v)));
        }
        for (i, row) in self.r.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                rows.insert((1, i, j), format!("R,{i},{j},{},{m}", format_pq(v)));
            }
        }
        for (j, v) in self.gb.iter().enumerate() {
            rows.insert((2, j, 0), format!("gb,{j},,{},{m}", format_pq(v)));
        }
        for (i, row) in self.gdiag.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                rows.insert((3, i, j), format!("gdiag,{i},{j},{},{m}", format_pq(v)));
            }
        }
        let mut out = String::from("table,i,j,value,method\n");
        for line in rows.values() {
            out.push_str(line);
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    fn v(a: i64, b: i64) -> VertexCoord {
        VertexCoord::new(a, b)
    }

    #[test]
    fn t_values() {
        assert_eq!(t_table(2)[0], frac(2, 7));
        for n in 1..=5 {
            let t = t_table(n);
            assert!(t.iter().all(|x| x.is_positive()));
            assert_eq!(t, t_table_pfaffian(n).unwrap());
        }
    }

    #[test]
    fn r_recurrence_matches_inverse() {
        for n in 1..=5 {
            let cf = ClosedForm::new(n).unwrap();
            assert_eq!(r_table(n).unwrap(), r_table_closed_form(&cf).unwrap(), "n={n}");
        }
        let r3 = r_table(3).unwrap();
        assert!(r3[1][2].is_positive());
        assert_eq!(r3[0][2], z_ratio(3) * &t_table(2)[1]);
    }

    #[test]
    fn g_vectors() {
        let gb2 = gb_closed_form(&ClosedForm::new(2).unwrap()).unwrap();
        assert_eq!(gb2, vec![int(1), frac(2, 7), frac(1, 7), frac(4, 7), int(1)]);
        let gb3 = gb_closed_form(&ClosedForm::new(3).unwrap()).unwrap();
        assert_eq!(
            gb3,
            vec![int(1), frac(1, 6), frac(1, 3), frac(11, 14), frac(17, 21), frac(17, 42), int(0)]
        );
    }

    #[test]
    fn recurrences_match_closed_form() {
        for n in 1..=5 {
            let a = BoundaryTables::build(n, TableMethod::ClosedForm).unwrap();
            let b = BoundaryTables::build(n, TableMethod::Recurrence).unwrap();
            assert_eq!(a.gb, b.gb, "gb n={n}");
            assert_eq!(a.gdiag, b.gdiag, "gdiag n={n}");
            assert_eq!(a.r, b.r, "R n={n}");
            for x in a.gb.iter().chain(a.gdiag.iter().flatten()) {
                assert!(x.abs() <= int(1));
            }
        }
    }

    #[test]
    fn lemma_values() {
        for n in 2..=5 {
            let cf = ClosedForm::new(n).unwrap();
            let gb = gb_closed_form(&cf).unwrap();
            assert_eq!(gb[0], int(1));
            assert_eq!(gb[1], z_ratio(n));
            let pf = PartitionFunctions::new(n).unwrap();
            assert_eq!(z_ratio(n), BigRational::new(
                PartitionFunctions::new(n - 1).unwrap().z().unwrap(),
                pf.z().unwrap()
            ));
        }
    }

    #[test]
    fn sum_rule_values() {
        assert_eq!(sum_rule(2).unwrap(), int(3));
        assert_eq!(sum_rule(3).unwrap(), frac(7, 2));
        for n in 1..=6 {
            assert_eq!(sum_rule(n).unwrap(), sum_rule_expected(n));
        }
    }

    #[test]
    fn condensation() {
        let pf = PartitionFunctions::new(2).unwrap();
        let outer = outer_face_vertices(pf.graph());
        let q = [outer[0], outer[3], outer[7], outer[11]];
        assert!(check_condensation(&pf, q).unwrap());
        assert!(check_condensation(&pf, [outer[0], outer[0], outer[3], outer[5]]).is_err());
        // Opposite corners of different faces.
        assert!(check_condensation(&pf, [v(0, 0), v(1, 1), v(4, 4), v(2, 3)]).is_err());
    }

    #[test]
    fn partition_recurrence() {
        for n in 2..=4 {
            assert!(check_partition_recurrence(n).unwrap(), "n={n}");
        }
    }

    #[test]
    fn csv_shape() {
        let t = BoundaryTables::build(2, TableMethod::Recurrence).unwrap();
        let csv = t.to_csv();
        assert!(csv.starts_with("table,i,j,value,method\n"));
        assert!(csv.contains("gb,1,,2/7,recurrence"));
    }
}
