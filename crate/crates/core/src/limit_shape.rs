//! Rescaled coordinates, saddle-point roots, the conjectured arctic circle and
//! frozen-region profiles from sampled matchings. Floating point throughout.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::graph::{EdgeKind, MatchingConfig, TsscppGraph};

const SQRT3: f64 = 1.732_050_807_568_877_2;

/// Threshold on the largest orientation density for a frozen window.
pub const FROZEN_THRESHOLD: f64 = 0.95;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RescaledPoint {
    pub x: f64,
    pub y: f64,
}

impl RescaledPoint {
    /// `X = x1/n - 2`, `Y = (x2/n - 2)/sqrt(3)`.
    pub fn from_lattice(n: usize, x1: f64, x2: f64) -> Self {
        let n = n as f64;
        Self { x: x1 / n - 2.0, y: (x2 / n - 2.0) / SQRT3 }
    }

    /// Nearest lattice point `(round((X+2)n), round((sqrt(3) Y + 2)n))`.
    pub fn to_lattice(&self, n: usize) -> (i64, i64) {
        let n = n as f64;
        (((self.x + 2.0) * n).round() as i64, ((SQRT3 * self.y + 2.0) * n).round() as i64)
    }

    pub fn radius_sq(&self) -> f64 {
        self.x * self.x + self.y * self.y
    }
}

/// `Y^2 (X^2 + Y^2 - 4)`: negative strictly inside the circle (away from
/// `Y = 0`), positive outside.
pub fn discriminant(x: f64, y: f64) -> f64 {
    y * y * (x * x + y * y - 4.0)
}

/// `(2X - Y^2 + 4 ± sqrt(Y^2 (X^2 + Y^2 - 4))) / (4 - Y^2)`.
pub fn saddle_roots(x: f64, y: f64) -> Result<(Complex64, Complex64)> {
    let den = 4.0 - y * y;
    if den.abs() < 1e-12 {
        return Err(Error::SingularParameter(format!("Y^2 = 4 at Y = {y}")));
    }
    let root = Complex64::new(discriminant(x, y), 0.0).sqrt();
    let base = Complex64::new(2.0 * x - y * y + 4.0, 0.0);
    Ok(((base + root) / den, (base - root) / den))
}

/// Lower branch `Y = -sqrt(4 - X^2)` of the circle `X^2 + Y^2 = 4`.
pub fn conjectured_boundary(x: f64) -> Result<f64> {
    if !(-2.0..=0.0).contains(&x) {
        return Err(invalid(format!("X = {x} is outside [-2, 0]")));
    }
    Ok(-(4.0 - x * x).max(0.0).sqrt())
}

/// Dimer class used for densities.
pub fn orientation_class(kind: EdgeKind) -> usize {
    match kind {
        EdgeKind::Horizontal => 0,
        EdgeKind::Vertical => 1,
        EdgeKind::Diagonal => 2,
    }
}

/// Counts of dimer orientations per square window of the lattice, keyed by
/// the window containing the dimer's midpoint.
#[derive(Clone, Debug)]
pub struct WindowCounts {
    n: usize,
    window: usize,
    samples: u64,
    counts: BTreeMap<(i64, i64), [u64; 3]>,
}

impl WindowCounts {
    pub fn new(n: usize, window: usize) -> Result<Self> {
        if window == 0 {
            return Err(invalid("window side must be positive"));
        }
        Ok(Self { n, window, samples: 0, counts: BTreeMap::new() })
    }

    pub fn record(&mut self, graph: &TsscppGraph, m: &MatchingConfig) {
        self.samples += 1;
        let w = 2 * self.window as i64;
        for (a, b) in m.edges() {
            let (p, q) = (graph.vertex(a), graph.vertex(b));
            let kind = EdgeKind::of(p, q).expect("matched pairs are edges");
            // Doubled midpoint coordinates keep the binning integral.
            let key = ((p.x1 + q.x1).div_euclid(w), (p.x2 + q.x2).div_euclid(w));
            self.counts.entry(key).or_insert([0; 3])[orientation_class(kind)] += 1;
        }
    }

    pub fn merge(&mut self, other: &WindowCounts) {
        self.samples += other.samples;
        for (k, c) in &other.counts {
            let e = self.counts.entry(*k).or_insert([0; 3]);
            for i in 0..3 {
                e[i] += c[i];
            }
        }
    }

    pub fn samples(&self) -> u64 {
        self.samples
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WindowDensity {
    pub point: RescaledPoint,
    /// Horizontal, vertical and diagonal densities; they sum to 1.
    pub density: [f64; 3],
    /// Mean number of dimers per sample in the window.
    pub occupancy: f64,
    /// Whether the window lies inside the domain, strictly above the diagonal.
    pub interior: bool,
}

impl WindowDensity {
    pub fn frozen(&self) -> bool {
        self.density.iter().cloned().fold(0.0, f64::max) > FROZEN_THRESHOLD
    }
}

/// Orientation densities per window, located at the window centre.
pub fn frozen_profile(counts: &WindowCounts) -> Result<Vec<WindowDensity>> {
    if counts.samples == 0 {
        return Err(invalid("frozen profile needs at least one sample"));
    }
    let w = counts.window as f64;
    let side = counts.window as i64;
    let n = counts.n as i64;
    let interior = |i: i64, j: i64| {
        i >= 0 && (i + 1) * side <= 2 * n && j * side >= (i + 1) * side && (j + 1) * side <= 2 * n + 1
    };
    Ok(counts
        .counts
        .iter()
        .map(|(&(i, j), c)| {
            let total = (c[0] + c[1] + c[2]) as f64;
            let centre = |k: i64| (k as f64 + 0.5) * w;
            WindowDensity {
                point: RescaledPoint::from_lattice(counts.n, centre(i), centre(j)),
                density: [c[0] as f64 / total, c[1] as f64 / total, c[2] as f64 / total],
                occupancy: total / counts.samples as f64,
                interior: interior(i, j),
            }
        })
        .collect())
}

/// Fractions of frozen windows beyond the outer radius and of unfrozen
/// windows inside the inner radius (squared radii), over interior windows.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrozenSummary {
    pub outer_windows: usize,
    pub outer_frozen_fraction: f64,
    pub inner_windows: usize,
    pub inner_liquid_fraction: f64,
}

pub fn summarize(profile: &[WindowDensity], outer_sq: f64, inner_sq: f64) -> FrozenSummary {
    let interior = profile.iter().filter(|w| w.interior);
    let outer: Vec<_> = interior.clone().filter(|w| w.point.radius_sq() > outer_sq).collect();
    let inner: Vec<_> = interior.filter(|w| w.point.radius_sq() < inner_sq).collect();
    let frac = |xs: &[&WindowDensity], want_frozen: bool| {
        if xs.is_empty() {
            return 0.0;
        }
        xs.iter().filter(|w| w.frozen() == want_frozen).count() as f64 / xs.len() as f64
    };
    FrozenSummary {
        outer_windows: outer.len(),
        outer_frozen_fraction: frac(&outer, true),
        inner_windows: inner.len(),
        inner_liquid_fraction: frac(&inner, false),
    }
}

pub fn profile_csv(profile: &[WindowDensity]) -> String {
    let mut out = String::from("X,Y,d_h,d_v,d_d,frozen,interior\n");
    for w in profile {
        let [h, v, d] = w.density;
        out.push_str(&format!(
            "{:.6},{:.6},{:.6},{:.6},{:.6},{},{}\n",
            w.point.x,
            w.point.y,
            h,
            v,
            d,
            w.frozen() as u8,
            w.interior as u8
        ));
    }
    out
}

/// Whether the sign of the discriminant agrees with the circle classification
/// at every point of a grid over `[-2, 2]^2`, skipping `Y = 0` and `Y^2 = 4`.
pub fn discriminant_matches_circle(step: f64, tol: f64) -> bool {
    let k = (4.0 / step).round() as i64;
    for a in 0..=k {
        for b in 0..=k {
            let (x, y) = (-2.0 + a as f64 * step, -2.0 + b as f64 * step);
            if y.abs() < tol || (y * y - 4.0).abs() < tol {
                continue;
            }
            let r = x * x + y * y - 4.0;
            let d = discriminant(x, y);
            let ok = if r.abs() <= tol {
                d.abs() <= tol * 4.0 * y * y
            } else {
                (d > 0.0) == (r > 0.0)
            };
            let roots = saddle_roots(x, y).expect("Y^2 != 4");
            let complex = roots.0.im.abs() > tol;
            if !ok || (r < -tol && !complex) || (r > tol && complex) {
                return false;
            }
        }
    }
    true
}
