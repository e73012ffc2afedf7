//! Verification suites, one [`VerifySuite`] per family of invariants.

use std::collections::HashMap;
use std::fmt;
use std::ops::RangeInclusive;

use num_traits::{One, Zero};

use crate::closed_form::ClosedForm;
use crate::error::Result;
use crate::graph::TsscppGraph;
use crate::identities::run_identity_suite;
use crate::linalg::{check_orientation, invert, kasteleyn_matrix};
use crate::rational::BigRational;
use crate::recurrence::{
    check_partition_recurrence, outer_face_vertices, sum_rule, sum_rule_expected, t_table,
    t_table_pfaffian, BoundaryTables, PartitionFunctions, TableMethod,
};
use crate::registry::{Registry, Strategy};
use crate::sampler::{certify_ergodicity, Chain, MoveSet};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct CheckOutcome {
    pub suite: &'static str,
    pub n: i64,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckOutcome {
    fn new(suite: &'static str, n: i64, name: &str, passed: bool, detail: impl Into<String>) -> Self {
        Self { suite, n, name: name.to_string(), passed, detail: detail.into() }
    }

    fn from_result(suite: &'static str, n: i64, name: &str, r: Result<(bool, String)>) -> Self {
        match r {
            Ok((ok, detail)) => Self::new(suite, n, name, ok, detail),
            Err(e) => Self::new(suite, n, name, false, format!("error: {e}")),
        }
    }
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{verdict} {} n={} {}", self.suite, self.n, self.name)?;
        if !self.detail.is_empty() {
            write!(f, ": {}", self.detail)?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug)]
pub struct VerifyContext {
    pub enumeration_cap: usize,
}

impl Default for VerifyContext {
    fn default() -> Self {
        Self { enumeration_cap: crate::graph::DEFAULT_ENUMERATION_CAP }
    }
}

pub trait VerifySuite: Strategy {
    fn run(&self, ns: RangeInclusive<i64>, ctx: &VerifyContext) -> Vec<CheckOutcome>;
}

fn positive(ns: RangeInclusive<i64>) -> impl Iterator<Item = usize> {
    ns.filter(|&n| n >= 1).map(|n| n as usize)
}

pub struct InverseSuite;
pub struct IdentitySuite;
pub struct RecurrenceSuite;
pub struct SumRuleSuite;
pub struct OrientationSuite;
pub struct CondensationSuite;
pub struct SamplerSuite;
pub struct AllSuites;

impl Strategy for InverseSuite {
    fn name(&self) -> &'static str {
        "inverse"
    }
    fn description(&self) -> &'static str {
        "closed-form inverse against exact elimination"
    }
}

/// Compares every entry of the closed form with the exact inverse.
pub fn check_inverse(n: usize) -> Result<(bool, String)> {
    let g = TsscppGraph::new(n)?;
    let k = kasteleyn_matrix(&g);
    let inv = invert(&k)?;
    let cf = ClosedForm::new(n)?;
    let mut mismatches = 0usize;
    for (a, &x) in g.vertices().iter().enumerate() {
        for (b, &y) in g.vertices().iter().enumerate() {
            if cf.kinv(x, y)? != *inv.get(a, b) {
                mismatches += 1;
            }
        }
    }
    let pairs = g.num_vertices() * g.num_vertices();
    Ok((mismatches == 0, format!("{} of {pairs} entries differ", mismatches)))
}

/// `sum_z K(x, z) K^{-1}(z, b) = [x = b]` with the closed form.
pub fn check_boundary_column(n: usize) -> Result<(bool, String)> {
    let g = TsscppGraph::new(n)?;
    let k = kasteleyn_matrix(&g);
    let cf = ClosedForm::new(n)?;
    let col: Vec<BigRational> = g.vertices().iter().map(|&z| cf.kinv_b(z)).collect::<Result<_>>()?;
    let b = g.vertex_index(g.b())?;
    let mut bad = 0;
    for x in 0..g.num_vertices() {
        let s: BigRational = g.neighbors(x).iter().map(|&z| k.get(x, z) * &col[z]).sum();
        let want = if x == b { BigRational::one() } else { BigRational::zero() };
        if s != want {
            bad += 1;
        }
    }
    Ok((bad == 0, format!("{bad} rows differ")))
}

impl VerifySuite for InverseSuite {
    fn run(&self, ns: RangeInclusive<i64>, _ctx: &VerifyContext) -> Vec<CheckOutcome> {
        positive(ns)
            .flat_map(|n| {
                let ni = n as i64;
                [
                    CheckOutcome::from_result("inverse", ni, "entrywise", check_inverse(n)),
                    CheckOutcome::from_result("inverse", ni, "boundary-column", check_boundary_column(n)),
                ]
            })
            .collect()
    }
}

impl Strategy for IdentitySuite {
    fn name(&self) -> &'static str {
        "identities"
    }
    fn description(&self) -> &'static str {
        "summation identities and their certificates"
    }
}

impl VerifySuite for IdentitySuite {
    fn run(&self, ns: RangeInclusive<i64>, _ctx: &VerifyContext) -> Vec<CheckOutcome> {
        ns.filter(|&n| n >= 0)
            .map(|n| {
                let fails = run_identity_suite(n..=n);
                CheckOutcome::new("identities", n, "sum_f sum_g sum_f' certificates", fails.is_empty(), fails.join("; "))
            })
            .collect()
    }
}

impl Strategy for RecurrenceSuite {
    fn name(&self) -> &'static str {
        "recurrences"
    }
    fn description(&self) -> &'static str {
        "boundary recurrences and the partition recurrence"
    }
}

fn check_tables(n: usize) -> Result<(bool, String)> {
    let a = BoundaryTables::build(n, TableMethod::ClosedForm)?;
    let b = BoundaryTables::build(n, TableMethod::Recurrence)?;
    let mut diffs = Vec::new();
    if a.r != b.r {
        diffs.push("R");
    }
    if a.gb != b.gb {
        diffs.push("g^b");
    }
    if a.gdiag != b.gdiag {
        diffs.push("g");
    }
    if t_table(n) != t_table_pfaffian(n)? {
        diffs.push("T");
    }
    Ok((diffs.is_empty(), if diffs.is_empty() { String::new() } else { format!("differ: {}", diffs.join(", ")) }))
}

impl VerifySuite for RecurrenceSuite {
    fn run(&self, ns: RangeInclusive<i64>, _ctx: &VerifyContext) -> Vec<CheckOutcome> {
        let mut out = Vec::new();
        for n in positive(ns) {
            let ni = n as i64;
            out.push(CheckOutcome::from_result("recurrences", ni, "tables", check_tables(n)));
            if n >= 2 {
                let r = check_partition_recurrence(n).map(|ok| (ok, String::new()));
                out.push(CheckOutcome::from_result("recurrences", ni, "partition", r));
            }
        }
        out
    }
}

impl Strategy for SumRuleSuite {
    fn name(&self) -> &'static str {
        "sumrule"
    }
    fn description(&self) -> &'static str {
        "sum of g^b_n over the diagonal"
    }
}

impl VerifySuite for SumRuleSuite {
    fn run(&self, ns: RangeInclusive<i64>, _ctx: &VerifyContext) -> Vec<CheckOutcome> {
        positive(ns)
            .map(|n| {
                let r = sum_rule(n).map(|s| {
                    let want = sum_rule_expected(n);
                    (s == want, format!("sum {} expected {}", crate::rational::format_pq(&s), crate::rational::format_pq(&want)))
                });
                CheckOutcome::from_result("sumrule", n as i64, "sum", r)
            })
            .collect()
    }
}

impl Strategy for OrientationSuite {
    fn name(&self) -> &'static str {
        "orientation"
    }
    fn description(&self) -> &'static str {
        "odd counter-clockwise arrows around every face"
    }
}

impl VerifySuite for OrientationSuite {
    fn run(&self, ns: RangeInclusive<i64>, _ctx: &VerifyContext) -> Vec<CheckOutcome> {
        positive(ns)
            .map(|n| {
                let r = TsscppGraph::new(n).map(|g| {
                    let rep = check_orientation(&g, &kasteleyn_matrix(&g));
                    (rep.is_pfaffian(), format!("{} faces, {} bad", rep.faces_checked, rep.bad_faces.len()))
                });
                CheckOutcome::from_result("orientation", n as i64, "faces", r)
            })
            .collect()
    }
}

impl Strategy for CondensationSuite {
    fn name(&self) -> &'static str {
        "condensation"
    }
    fn description(&self) -> &'static str {
        "condensation identity on outer-face quadruples"
    }
}

/// Every quadruple of outer-face vertices, taken in walk order.
pub fn check_outer_condensation(n: usize) -> Result<(bool, String)> {
    let pf = PartitionFunctions::new(n)?;
    let g = pf.graph();
    let outer = outer_face_vertices(g);
    let idx: Vec<usize> = outer.iter().map(|&v| g.vertex_index(v)).collect::<Result<_>>()?;
    let z = pf.z()?;
    let mut pairs = HashMap::new();
    for a in 0..idx.len() {
        for b in a + 1..idx.len() {
            let mut del = [idx[a], idx[b]];
            del.sort_unstable();
            pairs.insert((a, b), pf.z_without_indices(&del)?);
        }
    }
    let (mut total, mut bad) = (0usize, 0usize);
    let k = idx.len();
    for a in 0..k {
        for b in a + 1..k {
            for c in b + 1..k {
                for d in c + 1..k {
                    let mut del = [idx[a], idx[b], idx[c], idx[d]];
                    del.sort_unstable();
                    let z4 = pf.z_without_indices(&del)?;
                    let lhs = &z * z4 + &pairs[&(a, c)] * &pairs[&(b, d)];
                    let rhs = &pairs[&(a, b)] * &pairs[&(c, d)] + &pairs[&(a, d)] * &pairs[&(b, c)];
                    total += 1;
                    if lhs != rhs {
                        bad += 1;
                    }
                }
            }
        }
    }
    Ok((bad == 0, format!("{total} quadruples, {bad} fail")))
}

impl VerifySuite for CondensationSuite {
    fn run(&self, ns: RangeInclusive<i64>, _ctx: &VerifyContext) -> Vec<CheckOutcome> {
        positive(ns)
            .map(|n| CheckOutcome::from_result("condensation", n as i64, "outer quadruples", check_outer_condensation(n)))
            .collect()
    }
}

impl Strategy for SamplerSuite {
    fn name(&self) -> &'static str {
        "sampler"
    }
    fn description(&self) -> &'static str {
        "move-set ergodicity and flip validity"
    }
}

impl VerifySuite for SamplerSuite {
    fn run(&self, ns: RangeInclusive<i64>, ctx: &VerifyContext) -> Vec<CheckOutcome> {
        let mut out = Vec::new();
        for n in positive(ns) {
            let ni = n as i64;
            let g = match TsscppGraph::new(n) {
                Ok(g) => g,
                Err(e) => {
                    out.push(CheckOutcome::new("sampler", ni, "graph", false, e.to_string()));
                    continue;
                }
            };
            let moves = MoveSet::build(&g);
            if n <= ctx.enumeration_cap {
                let r = certify_ergodicity(&g, &moves, ctx.enumeration_cap)
                    .map(|rep| (rep.passed(), format!("reached {} of {}", rep.reachable, rep.total)));
                out.push(CheckOutcome::from_result("sampler", ni, "ergodicity", r));
            }
            let r = Chain::new(&g, &moves, 1).map(|mut chain| {
                for _ in 0..10 {
                    chain.sweep();
                }
                (chain.state().validate(&g).is_ok(), format!("{} moves", moves.len()))
            });
            out.push(CheckOutcome::from_result("sampler", ni, "flips", r));
        }
        out
    }
}

impl Strategy for AllSuites {
    fn name(&self) -> &'static str {
        "all"
    }
    fn description(&self) -> &'static str {
        "every suite"
    }
}

impl VerifySuite for AllSuites {
    fn run(&self, ns: RangeInclusive<i64>, ctx: &VerifyContext) -> Vec<CheckOutcome> {
        let reg = suites();
        let mut out = Vec::new();
        for s in reg.iter().filter(|s| s.name() != "all") {
            out.extend(s.run(ns.clone(), ctx));
        }
        out
    }
}

pub fn suites() -> Registry<dyn VerifySuite> {
    let mut r: Registry<dyn VerifySuite> = Registry::new("verify suite");
    r.register(Box::new(AllSuites));
    r.register(Box::new(InverseSuite));
    r.register(Box::new(IdentitySuite));
    r.register(Box::new(RecurrenceSuite));
    r.register(Box::new(SumRuleSuite));
    r.register(Box::new(OrientationSuite));
    r.register(Box::new(CondensationSuite));
    r.register(Box::new(SamplerSuite));
    r
}

/// Runs a suite and sorts the outcomes for stable output.
pub fn run_suite(name: &str, ns: RangeInclusive<i64>, ctx: &VerifyContext) -> Result<Vec<CheckOutcome>> {
    let reg = suites();
    let mut out = reg.get(name)?.run(ns, ctx);
    out.sort();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_ranges_pass() {
        let ctx = VerifyContext::default();
        for name in ["inverse", "recurrences", "sumrule", "orientation", "sampler"] {
            let out = run_suite(name, 1..=3, &ctx).unwrap();
            assert!(!out.is_empty());
            assert!(out.iter().all(|c| c.passed), "{name}: {out:?}");
        }
        let out = run_suite("condensation", 2..=2, &ctx).unwrap();
        assert!(out.iter().all(|c| c.passed), "{out:?}");
    }

    #[test]
    fn unknown_suite() {
        assert!(run_suite("nope", 1..=1, &VerifyContext::default()).is_err());
    }

    #[test]
    fn display_line() {
        let c = CheckOutcome::new("sumrule", 2, "sum", true, "ok");
        assert_eq!(c.to_string(), "PASS sumrule n=2 sum: ok");
    }
}
