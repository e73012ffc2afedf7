use num_traits::{One, Zero};
use proptest::prelude::*;
use tsscpp::closed_form::{p_coeff, ClosedForm};
use tsscpp::rational::{abs, format_pq, frac, int, parse_pq, BigRational};
use tsscpp::recurrence::{t_table, t_table_pfaffian, PartitionFunctions};
use tsscpp::registry::{counters, inverse_sources};
use tsscpp::statistics::{edge_probability, EdgeQuery, ExactInverse};
use tsscpp::{b_vertex, kasteleyn_matrix, TsscppGraph, VertexCoord};

fn v(x1: i64, x2: i64) -> VertexCoord {
    VertexCoord::new(x1, x2)
}

#[test]
fn deletion_ratio_at_n2() {
    let pf = PartitionFunctions::new(2).unwrap();
    let r = BigRational::new(pf.z_without(&[v(1, 1), v(4, 5)]).unwrap(), pf.z().unwrap());
    assert_eq!(r, frac(2, 7));
}

#[test]
fn diagonal_edge_sign() {
    for n in 1..=5 {
        let g = TsscppGraph::new(n).unwrap();
        let k = kasteleyn_matrix(&g);
        let (a, o) = (g.vertex_index(v(1, 1)).unwrap(), g.vertex_index(v(0, 0)).unwrap());
        assert_eq!(k.get(a, o), &int(1));
        assert_eq!(k.get(o, a), &int(-1));
    }
}

#[test]
fn kasteleyn_support_is_the_edge_set() {
    for n in 1..=5 {
        let g = TsscppGraph::new(n).unwrap();
        let k = kasteleyn_matrix(&g);
        let nonzero = k.rows().flatten().filter(|x| !x.is_zero()).count();
        assert_eq!(nonzero, 2 * g.edges().len());
        assert!(k.is_skew());
    }
}

#[test]
fn counting_strategies_agree() {
    let reg = counters();
    for n in 1..=4 {
        let values: Vec<_> = reg.iter().map(|c| c.count(n, 4).unwrap()).collect();
        assert!(values.windows(2).all(|w| w[0] == w[1]), "n={n}: {values:?}");
    }
}

#[test]
fn inverse_sources_agree_on_every_pair() {
    let g = TsscppGraph::new(3).unwrap();
    let reg = inverse_sources();
    let a = reg.get("closed-form").unwrap().prepare(&g).unwrap();
    let b = reg.get("exact-inverse").unwrap().prepare(&g).unwrap();
    for &x in g.vertices() {
        for &y in g.vertices() {
            assert_eq!(a.entry(x, y).unwrap(), b.entry(x, y).unwrap(), "{x} {y}");
        }
    }
}

#[test]
fn boundary_column_is_a_right_inverse() {
    for n in 1..=6 {
        let g = TsscppGraph::new(n).unwrap();
        let k = kasteleyn_matrix(&g);
        let cf = ClosedForm::new(n).unwrap();
        let col: Vec<_> = g.vertices().iter().map(|&z| cf.kinv_b(z).unwrap()).collect();
        let bi = g.vertex_index(b_vertex(n)).unwrap();
        for xi in 0..g.num_vertices() {
            let s: BigRational = g.neighbors(xi).iter().map(|&z| k.get(xi, z) * &col[z]).sum();
            let expect = if xi == bi { BigRational::one() } else { BigRational::zero() };
            assert_eq!(s, expect, "n={n} x={}", g.vertex(xi));
        }
    }
}

#[test]
fn top_boundary_against_b() {
    for n in 1..=6 {
        let cf = ClosedForm::new(n).unwrap();
        for i in 0..n as i64 {
            let e = cf.kinv_b(v(2 * i, 2 * n as i64 + 1)).unwrap();
            assert_eq!(abs(&e), abs(&p_coeff(n, i as usize, 0).unwrap()), "n={n} i={i}");
        }
    }
}

#[test]
fn t_table_paths_agree() {
    for n in 1..=5 {
        assert_eq!(t_table(n), t_table_pfaffian(n).unwrap());
    }
    assert_eq!(t_table(2)[0], frac(2, 7));
}

#[test]
fn rational_format_round_trip() {
    for r in [frac(-8, 21), int(0), int(-1), frac(17, 42)] {
        let s = format_pq(&r);
        assert_eq!(parse_pq(&s).unwrap(), r);
        assert!(s.contains('/'));
    }
    assert_eq!(format_pq(&int(-1)), "-1/1");
}

fn coordinate_edges(n: usize) -> Vec<(VertexCoord, VertexCoord)> {
    let g = TsscppGraph::new(n).unwrap();
    g.edges().iter().map(|&(a, b)| (g.vertex(a), g.vertex(b))).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn probability_ignores_edge_order(picks in proptest::collection::vec(0usize..64, 1..4), flip in any::<bool>()) {
        let g = TsscppGraph::new(3).unwrap();
        let all = coordinate_edges(3);
        let mut chosen: Vec<(VertexCoord, VertexCoord)> = Vec::new();
        for p in picks {
            let e = all[p % all.len()];
            if chosen.iter().all(|c| c.0 != e.0 && c.0 != e.1 && c.1 != e.0 && c.1 != e.1) {
                chosen.push(e);
            }
        }
        let kernel = ExactInverse::new(&g).unwrap();
        let p1 = edge_probability(&g, &kernel, &EdgeQuery::new(&g, chosen.clone()).unwrap()).unwrap();
        let mut other: Vec<_> = chosen.into_iter().rev().collect();
        if flip {
            other = other.into_iter().map(|(a, b)| (b, a)).collect();
        }
        let p2 = edge_probability(&g, &kernel, &EdgeQuery::new(&g, other).unwrap()).unwrap();
        prop_assert_eq!(p1, p2);
    }
}
