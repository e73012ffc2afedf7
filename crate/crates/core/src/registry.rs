//! Named strategies behind trait objects, looked up by the CLI and the
//! verification driver.

use num_bigint::BigInt;
use num_traits::Signed;

use crate::closed_form::ClosedForm;
use crate::combinatorics::asm_number;
use crate::error::{Error, Result};
use crate::graph::{enumerate_matchings, TsscppGraph};
use crate::linalg::{kasteleyn_matrix, pfaffian};
use crate::recurrence::{BoundaryTables, TableMethod};
use crate::statistics::{ExactInverse, InverseKernel};

pub trait Strategy: Send + Sync {
    fn name(&self) -> &'static str;
    fn description(&self) -> &'static str;
}

pub struct Registry<T: ?Sized + Strategy> {
    kind: &'static str,
    entries: Vec<Box<T>>,
}

impl<T: ?Sized + Strategy> Registry<T> {
    pub fn new(kind: &'static str) -> Self {
        Self { kind, entries: Vec::new() }
    }

    pub fn register(&mut self, s: Box<T>) {
        self.entries.retain(|e| e.name() != s.name());
        self.entries.push(s);
    }

    pub fn get(&self, name: &str) -> Result<&T> {
        self.entries
            .iter()
            .find(|e| e.name() == name)
            .map(|e| e.as_ref())
            .ok_or_else(|| Error::UnknownStrategy {
                kind: self.kind,
                name: name.to_string(),
                available: self.names().join(", "),
            })
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|e| e.name()).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = &T> {
        self.entries.iter().map(|e| e.as_ref())
    }
}

/// Counts perfect matchings of `G_n`.
pub trait MatchingCounter: Strategy {
    fn count(&self, n: usize, cap: usize) -> Result<BigInt>;
}

pub struct PfaffianCounter;
pub struct EnumerationCounter;
pub struct FormulaCounter;

impl Strategy for PfaffianCounter {
    fn name(&self) -> &'static str {
        "pfaffian"
    }
    fn description(&self) -> &'static str {
        "|Pf K_n| by exact elimination"
    }
}

impl MatchingCounter for PfaffianCounter {
    fn count(&self, n: usize, _cap: usize) -> Result<BigInt> {
        let g = TsscppGraph::new(n)?;
        Ok(pfaffian(&kasteleyn_matrix(&g))?.abs().to_integer())
    }
}

impl Strategy for EnumerationCounter {
    fn name(&self) -> &'static str {
        "enumerate"
    }
    fn description(&self) -> &'static str {
        "exhaustive backtracking, capped"
    }
}

impl MatchingCounter for EnumerationCounter {
    fn count(&self, n: usize, cap: usize) -> Result<BigInt> {
        let g = TsscppGraph::new(n)?;
        Ok(enumerate_matchings(&g, cap)?.len().into())
    }
}

impl Strategy for FormulaCounter {
    fn name(&self) -> &'static str {
        "formula"
    }
    fn description(&self) -> &'static str {
        "product formula A_{n+1}"
    }
}

impl MatchingCounter for FormulaCounter {
    fn count(&self, n: usize, _cap: usize) -> Result<BigInt> {
        if n < 1 {
            return Err(crate::error::invalid("n must be at least 1"));
        }
        asm_number(n as i64 + 1)
    }
}

/// Produces an [`InverseKernel`] for a graph.
pub trait InverseSource: Strategy {
    fn prepare(&self, graph: &TsscppGraph) -> Result<Box<dyn InverseKernel>>;
}

pub struct ClosedFormSource;
pub struct ExactInverseSource;

impl Strategy for ClosedFormSource {
    fn name(&self) -> &'static str {
        "closed-form"
    }
    fn description(&self) -> &'static str {
        "explicit formulas for K_n^{-1}"
    }
}

impl InverseSource for ClosedFormSource {
    fn prepare(&self, graph: &TsscppGraph) -> Result<Box<dyn InverseKernel>> {
        Ok(Box::new(ClosedForm::new(graph.n())?))
    }
}

impl Strategy for ExactInverseSource {
    fn name(&self) -> &'static str {
        "exact-inverse"
    }
    fn description(&self) -> &'static str {
        "exact Gauss-Jordan inverse of K_n"
    }
}

impl InverseSource for ExactInverseSource {
    fn prepare(&self, graph: &TsscppGraph) -> Result<Box<dyn InverseKernel>> {
        Ok(Box::new(ExactInverse::new(graph)?))
    }
}

/// Builds the boundary tables `T`, `R`, `g^b`, `g`.
pub trait BoundaryMethod: Strategy {
    fn tables(&self, n: usize) -> Result<BoundaryTables>;
}

pub struct ClosedFormTables;
pub struct RecurrenceTables;

impl Strategy for ClosedFormTables {
    fn name(&self) -> &'static str {
        "closed-form"
    }
    fn description(&self) -> &'static str {
        "entries read off the closed-form inverse"
    }
}

impl BoundaryMethod for ClosedFormTables {
    fn tables(&self, n: usize) -> Result<BoundaryTables> {
        BoundaryTables::build(n, TableMethod::ClosedForm)
    }
}

impl Strategy for RecurrenceTables {
    fn name(&self) -> &'static str {
        "recurrence"
    }
    fn description(&self) -> &'static str {
        "recurrences in n from G_1"
    }
}

impl BoundaryMethod for RecurrenceTables {
    fn tables(&self, n: usize) -> Result<BoundaryTables> {
        BoundaryTables::build(n, TableMethod::Recurrence)
    }
}

pub fn counters() -> Registry<dyn MatchingCounter> {
    let mut r: Registry<dyn MatchingCounter> = Registry::new("count method");
    r.register(Box::new(PfaffianCounter));
    r.register(Box::new(EnumerationCounter));
    r.register(Box::new(FormulaCounter));
    r
}

pub fn inverse_sources() -> Registry<dyn InverseSource> {
    let mut r: Registry<dyn InverseSource> = Registry::new("inverse source");
    r.register(Box::new(ClosedFormSource));
    r.register(Box::new(ExactInverseSource));
    r
}

pub fn boundary_methods() -> Registry<dyn BoundaryMethod> {
    let mut r: Registry<dyn BoundaryMethod> = Registry::new("table method");
    r.register(Box::new(ClosedFormTables));
    r.register(Box::new(RecurrenceTables));
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::VertexCoord;

    #[test]
    fn counters_agree() {
        let reg = counters();
        assert_eq!(reg.names(), vec!["pfaffian", "enumerate", "formula"]);
        for n in 1..=3 {
            let vals: Vec<BigInt> = reg.iter().map(|c| c.count(n, 4).unwrap()).collect();
            assert!(vals.windows(2).all(|w| w[0] == w[1]));
        }
        assert!(matches!(reg.get("enumerate").unwrap().count(5, 4), Err(Error::ResourceLimit(_))));
    }

    #[test]
    fn unknown_name() {
        let err = inverse_sources().get("magic").err().unwrap();
        assert!(err.to_string().contains("closed-form, exact-inverse"));
    }

    #[test]
    fn sources_agree() {
        let g = TsscppGraph::new(2).unwrap();
        let reg = inverse_sources();
        let a = reg.get("closed-form").unwrap().prepare(&g).unwrap();
        let b = reg.get("exact-inverse").unwrap().prepare(&g).unwrap();
        let (x, y) = (VertexCoord::new(0, 0), VertexCoord::new(4, 5));
        assert_eq!(a.entry(x, y).unwrap(), b.entry(x, y).unwrap());
    }

    #[test]
    fn replacing_keeps_one_entry() {
        let mut reg = boundary_methods();
        reg.register(Box::new(RecurrenceTables));
        assert_eq!(reg.names(), vec!["closed-form", "recurrence"]);
        assert_eq!(reg.get("recurrence").unwrap().tables(2).unwrap().gb.len(), 5);
    }
}
