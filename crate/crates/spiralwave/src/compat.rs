//! Competition setup, boundary traces, and the compatibility linear system
//! that fixes the trace scaling vector.
//!
//! For K = 2n species with arcs φ_1, ..., φ_{2n} covering the circle, the
//! combined trace Φ = Σ c_m φ_m supports a solution with a single interior
//! singular point iff its weighted Fourier coefficients
//! `φ_k = (1/2π) ∫ e^{-(ik+α)x} Φ(x) dx` vanish for |k| < n with φ_n ≠ 0.
//! Stacking these conditions row-wise over k = -n+1..n yields a complex
//! 2n × 2n system with a Vandermonde-factorable matrix; its solution is real
//! and sign-alternating after a phase rotation, and s̄_m = (-1)^{m+1} c_m l_m
//! is the positive scaling vector.

use crate::quad;
use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CompatError {
    #[error("competition matrix must be square with K ≥ 3, got {0} rows")]
    BadDimension(usize),
    #[error("off-diagonal competition entries must be positive: a[{i}][{j}] = {value}")]
    InvalidMatrix { i: usize, j: usize, value: f64 },
    #[error("trace nodes must start at 0, end at 2π and increase strictly")]
    BadNodes,
    #[error("need exactly one arc per species: {arcs} arcs for K = {k}")]
    ArcCount { arcs: usize, k: usize },
    #[error("piecewise-linear arc knots must lie strictly inside (0,1) and increase")]
    BadKnots,
    #[error("compatibility system needs an even number of species, got K = {0}; fold odd K through double_cover first")]
    OddSpecies(usize),
    #[error("singular compatibility system: |det A| = {det:.3e} below {tol:.3e}")]
    SingularSystem { det: f64, tol: f64 },
    #[error("solution phase could not be rotated real: residual {0:.3e}")]
    PhaseNotReal(f64),
    #[error("solution is not sign-alternating at component {0}")]
    SignPattern(usize),
}

/// Competition matrix together with its derived asymmetry data.
#[derive(Debug, Clone)]
pub struct CompetitionSetup {
    /// Number of species K ≥ 3.
    pub species: usize,
    /// K×K positive interaction matrix (diagonal unused).
    pub a: Vec<Vec<f64>>,
    /// α = (1/2π) ln Π a_{i,i+1}/a_{i+1,i} over the cycle.
    pub alpha: f64,
    /// Weights l_1 = 1, l_i = (a_{i,i-1}/a_{i-1,i}) l_{i-1}.
    pub l: Vec<f64>,
    /// σ = (-1)^K Π a_{(i-1)i}/a_{i(i-1)} = (-1)^K e^{2πα}; the multiplier
    /// picked up by the lifted solution over one period.
    pub sigma: f64,
}

/// Builds the derived quantities from a positive interaction matrix.
pub fn setup_of(a: Vec<Vec<f64>>) -> Result<CompetitionSetup, CompatError> {
    let k = a.len();
    if k < 3 || a.iter().any(|row| row.len() != k) {
        return Err(CompatError::BadDimension(k));
    }
    for (i, row) in a.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            if i != j && !(v > 0.0 && v.is_finite()) {
                return Err(CompatError::InvalidMatrix { i, j, value: v });
            }
        }
    }
    let mut log_ratio = 0.0;
    for i in 0..k {
        let j = (i + 1) % k;
        log_ratio += (a[i][j] / a[j][i]).ln();
    }
    let alpha = log_ratio / (2.0 * std::f64::consts::PI);

    let mut l = vec![1.0; k];
    for i in 1..k {
        l[i] = a[i][i - 1] / a[i - 1][i] * l[i - 1];
    }

    // Π a_{(i-1)i}/a_{i(i-1)} with indices mod K equals e^{2πα}; keep the
    // product form so the identity is validated through the code path.
    let mut prod = 1.0;
    for i in 0..k {
        let prev = (i + k - 1) % k;
        prod *= a[prev][i] / a[i][prev];
    }
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    let sigma = sign * prod;
    debug_assert!(
        (prod - (2.0 * std::f64::consts::PI * alpha).exp()).abs()
            <= 1e-10 * prod.max(1.0),
        "σ-relation violated"
    );

    Ok(CompetitionSetup {
        species: k,
        a,
        alpha,
        l,
        sigma,
    })
}

/// Convenience constructor: cyclic ring with prescribed forward/backward
/// ratios a_{i,i+1}/a_{i+1,i} = ratios[i]; all other entries are 1.
pub fn cyclic_matrix(k: usize, ratios: &[f64]) -> Vec<Vec<f64>> {
    assert_eq!(ratios.len(), k);
    let mut a = vec![vec![1.0; k]; k];
    for i in 0..k {
        let j = (i + 1) % k;
        a[i][j] = ratios[i];
        a[j][i] = 1.0;
    }
    a
}

/// Closed-form arc profiles; every shape vanishes at both arc endpoints.
#[derive(Debug, Clone, PartialEq)]
pub enum ArcShape {
    /// sin(π u) on the normalized arc coordinate u ∈ [0, 1].
    Sine,
    /// C^∞ bump exp(1 - 1/(4u(1-u))) normalized to peak 1 at u = 1/2.
    Bump,
    /// Piecewise-linear through interior knots (u_j, value_j), 0 < u_j < 1.
    PiecewiseLinear(Vec<(f64, f64)>),
}

impl ArcShape {
    fn eval(&self, u: f64) -> f64 {
        if !(0.0..=1.0).contains(&u) {
            return 0.0;
        }
        match self {
            ArcShape::Sine => (std::f64::consts::PI * u).sin(),
            ArcShape::Bump => {
                let q = 4.0 * u * (1.0 - u);
                if q <= 0.0 {
                    0.0
                } else {
                    (1.0 - 1.0 / q).exp()
                }
            }
            ArcShape::PiecewiseLinear(knots) => {
                let mut prev = (0.0, 0.0);
                for &(t, v) in knots {
                    if u <= t {
                        let w = (u - prev.0) / (t - prev.0);
                        return prev.1 + w * (v - prev.1);
                    }
                    prev = (t, v);
                }
                let w = (u - prev.0) / (1.0 - prev.0);
                prev.1 * (1.0 - w)
            }
        }
    }

    /// Interior kink positions (normalized), where quadrature panels split.
    fn interior_breaks(&self) -> Vec<f64> {
        match self {
            ArcShape::PiecewiseLinear(knots) => knots.iter().map(|&(t, _)| t).collect(),
            _ => vec![],
        }
    }
}

/// One boundary arc: a shape scaled by a positive amplitude.
#[derive(Debug, Clone, PartialEq)]
pub struct Arc {
    pub shape: ArcShape,
    pub amplitude: f64,
}

/// K non-negative traces on consecutive arcs covering [0, 2π].
#[derive(Debug, Clone)]
pub struct BoundaryTraces {
    /// x_1 = 0 < x_2 < ... < x_{K+1} = 2π.
    pub nodes: Vec<f64>,
    pub arcs: Vec<Arc>,
}

impl BoundaryTraces {
    pub fn new(nodes: Vec<f64>, arcs: Vec<Arc>) -> Result<Self, CompatError> {
        let two_pi = 2.0 * std::f64::consts::PI;
        // two arcs is the smallest compatibility system (n = 1)
        if nodes.len() < 3
            || nodes[0].abs() > 1e-12
            || (nodes[nodes.len() - 1] - two_pi).abs() > 1e-9
            || nodes.windows(2).any(|w| w[1] <= w[0])
        {
            return Err(CompatError::BadNodes);
        }
        if arcs.len() + 1 != nodes.len() {
            return Err(CompatError::ArcCount {
                arcs: arcs.len(),
                k: nodes.len() - 1,
            });
        }
        for arc in &arcs {
            if let ArcShape::PiecewiseLinear(knots) = &arc.shape {
                let mut prev = 0.0;
                for &(t, _) in knots {
                    if t <= prev || t >= 1.0 {
                        return Err(CompatError::BadKnots);
                    }
                    prev = t;
                }
            }
        }
        Ok(Self { nodes, arcs })
    }

    pub fn species(&self) -> usize {
        self.arcs.len()
    }

    /// Equal arcs of the given shape: arc i on [2π(i-1)/K, 2πi/K].
    pub fn symmetric(k: usize, shape: ArcShape) -> Self {
        let two_pi = 2.0 * std::f64::consts::PI;
        let nodes = (0..=k).map(|i| two_pi * i as f64 / k as f64).collect();
        let arcs = (0..k)
            .map(|_| Arc {
                shape: shape.clone(),
                amplitude: 1.0,
            })
            .collect();
        Self::new(nodes, arcs).expect("symmetric traces are valid")
    }

    /// φ_i(x): supported exactly on [x_i, x_{i+1}].
    pub fn eval_arc(&self, i: usize, x: f64) -> f64 {
        let (a, b) = (self.nodes[i], self.nodes[i + 1]);
        if x < a || x > b {
            return 0.0;
        }
        self.arcs[i].amplitude * self.arcs[i].shape.eval((x - a) / (b - a))
    }

    /// Arc index whose closed support contains x (ties to the left arc).
    pub fn arc_of(&self, x: f64) -> usize {
        let x = x.rem_euclid(2.0 * std::f64::consts::PI);
        match self
            .nodes
            .binary_search_by(|n| n.partial_cmp(&x).unwrap())
        {
            Ok(i) => i.min(self.arcs.len() - 1),
            Err(i) => i.saturating_sub(1).min(self.arcs.len() - 1),
        }
    }

    fn arc_breakpoints(&self, i: usize) -> Vec<f64> {
        let (a, b) = (self.nodes[i], self.nodes[i + 1]);
        let mut pts = vec![a];
        for t in self.arcs[i].shape.interior_breaks() {
            pts.push(a + t * (b - a));
        }
        pts.push(b);
        pts
    }
}

/// Linear combination Φ = Σ c_m φ_m of the arcs.
#[derive(Debug, Clone)]
pub struct TraceCombination {
    pub traces: BoundaryTraces,
    pub c: Vec<f64>,
}

impl TraceCombination {
    pub fn eval(&self, x: f64) -> f64 {
        let i = self.traces.arc_of(x);
        self.c[i] * self.traces.eval_arc(i, x.rem_euclid(2.0 * std::f64::consts::PI))
    }

    pub fn sup_norm(&self, samples: usize) -> f64 {
        (0..samples)
            .map(|i| {
                self.eval(2.0 * std::f64::consts::PI * i as f64 / samples as f64)
                    .abs()
            })
            .fold(0.0, f64::max)
    }
}

const QUAD_TOL: f64 = 1e-10;

/// Weighted Fourier coefficient of a trace combination at integer index k:
/// `φ_k = (1/2π) ∫_0^{2π} e^{-(ik+α)x} Φ(x) dx`.
pub fn fourier_coefficient(phi: &TraceCombination, alpha: f64, k: i32) -> Complex64 {
    fourier_mode(phi, alpha, k as f64)
}

/// Same weighted coefficient at an arbitrary real frequency (half-integers
/// arise on the double cover of an odd-K problem).
pub fn fourier_mode(phi: &TraceCombination, alpha: f64, m: f64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (i, &c) in phi.c.iter().enumerate() {
        if c == 0.0 {
            continue;
        }
        acc += c * arc_mode_integral(&phi.traces, i, alpha, m);
    }
    acc / (2.0 * std::f64::consts::PI)
}

/// ∫ e^{-(im+α)x} φ_arc(x) dx over the arc's support, split at kinks.
fn arc_mode_integral(traces: &BoundaryTraces, i: usize, alpha: f64, m: f64) -> Complex64 {
    let breaks = traces.arc_breakpoints(i);
    // absolute accuracy floor: coefficients get compared against the overall
    // coefficient scale, so chasing relative digits of a cancelling integral
    // below this is wasted work
    let width = traces.nodes[i + 1] - traces.nodes[i];
    let weight = (-alpha * traces.nodes[i]).exp().max((-alpha * traces.nodes[i + 1]).exp());
    let floor = 1e-13 * traces.arcs[i].amplitude.abs() * width * weight;
    quad::adaptive_complex_split(
        |x| Complex64::new(-alpha * x, -m * x).exp() * traces.eval_arc(i, x),
        &breaks,
        QUAD_TOL,
        floor,
    )
}

/// Output of the compatibility solve.
#[derive(Debug, Clone)]
pub struct CompatResult {
    /// Half the number of species: K = 2n.
    pub n: usize,
    /// Real sign-alternating combination coefficients, max |c_m l_m| = 1.
    pub c: Vec<f64>,
    /// Positive scaling vector s̄_m = (-1)^{m+1} c_m l_m.
    pub sbar: Vec<f64>,
    /// First nonzero weighted coefficient of the combined trace.
    pub phi_n: Complex64,
    /// Determinant of the compatibility matrix.
    pub det_a: Complex64,
}

impl CompatResult {
    pub fn combination(&self, traces: &BoundaryTraces) -> TraceCombination {
        TraceCombination {
            traces: traces.clone(),
            c: self.c.clone(),
        }
    }
}

/// Solves the 2n × 2n compatibility system for even K.
///
/// The system is solved with unit last entry, then the solution is rotated by
/// the phase of its largest component; the result must come out real (the
/// admissible problem has a real sign-alternating solution for the right
/// phase of φ_n) and alternating, and is normalized by max |c_m l_m| = 1.
pub fn compat_solve(
    setup: &CompetitionSetup,
    traces: &BoundaryTraces,
) -> Result<CompatResult, CompatError> {
    compat_solve_weighted(setup.alpha, &setup.l, traces)
}

/// Compatibility solve from the asymmetry rate and the l-weights directly;
/// admits the minimal two-arc case that has no K ≥ 3 competition matrix.
pub fn compat_solve_weighted(
    alpha: f64,
    l: &[f64],
    traces: &BoundaryTraces,
) -> Result<CompatResult, CompatError> {
    let k_species = l.len();
    if k_species % 2 != 0 {
        return Err(CompatError::OddSpecies(k_species));
    }
    if traces.species() != k_species {
        return Err(CompatError::ArcCount {
            arcs: traces.species(),
            k: k_species,
        });
    }
    let n = k_species / 2;
    let dim = 2 * n;

    // a_{km} = (1/2π) ∫ e^{-(ik+α)x} φ_m(x) dx, rows k = -n+1..n.
    let mut a = DMatrix::<Complex64>::zeros(dim, dim);
    for (row, k) in (1 - (n as i32)..=(n as i32)).enumerate() {
        for m in 0..dim {
            a[(row, m)] =
                arc_mode_integral(traces, m, alpha, k as f64) / (2.0 * std::f64::consts::PI);
        }
    }

    // The e^{-αx} weight makes column magnitudes differ by factors up to
    // e^{2πα}; equilibrate columns to unit norm before factorizing so the
    // singularity test and the solve both see a balanced matrix.
    let col_norms: Vec<f64> = (0..dim)
        .map(|m| {
            (0..dim)
                .map(|r| a[(r, m)].norm_sqr())
                .sum::<f64>()
                .sqrt()
                .max(1e-300)
        })
        .collect();
    let mut scaled = a.clone();
    for m in 0..dim {
        for r in 0..dim {
            scaled[(r, m)] /= col_norms[m];
        }
    }
    let lu = scaled.lu();
    let det_scaled = lu.determinant();
    let det_a = det_scaled * col_norms.iter().product::<f64>();
    // Hadamard-relative test: |det| / Π column norms is at most 1 and
    // collapses only for genuinely dependent columns.
    let tol = 1e-12;
    if det_scaled.norm() < tol {
        return Err(CompatError::SingularSystem {
            det: det_scaled.norm(),
            tol,
        });
    }

    let mut rhs = DMatrix::<Complex64>::zeros(dim, 1);
    rhs[(dim - 1, 0)] = Complex64::new(1.0, 0.0);
    let mut sol = lu.solve(&rhs).ok_or(CompatError::SingularSystem {
        det: det_scaled.norm(),
        tol,
    })?;
    for m in 0..dim {
        sol[(m, 0)] /= col_norms[m];
    }

    // The exact solution is a complex scalar times a real alternating vector;
    // rotate by the phase of the largest component.
    let (imax, _) = (0..dim)
        .map(|i| (i, sol[(i, 0)].norm()))
        .max_by(|x, y| x.1.partial_cmp(&y.1).unwrap())
        .unwrap();
    let mut phase = -sol[(imax, 0)].arg();
    // orient so that c_1 > 0
    let rotated0 = (Complex64::new(0.0, phase).exp() * sol[(0, 0)]).re;
    if rotated0 < 0.0 {
        phase += std::f64::consts::PI;
    }
    let rot = Complex64::new(0.0, phase).exp();

    let mut c = vec![0.0; dim];
    let mut imag_peak = 0.0f64;
    let mut abs_peak = 0.0f64;
    for i in 0..dim {
        let v = rot * sol[(i, 0)];
        c[i] = v.re;
        imag_peak = imag_peak.max(v.im.abs());
        abs_peak = abs_peak.max(v.norm());
    }
    if imag_peak > 1e-8 * abs_peak {
        return Err(CompatError::PhaseNotReal(imag_peak / abs_peak));
    }
    for (i, &ci) in c.iter().enumerate() {
        let expected_sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        if ci * expected_sign <= 0.0 {
            return Err(CompatError::SignPattern(i + 1));
        }
    }

    // Normalize max |c_m l_m| = 1; the same scaling applies to φ_n through
    // the right-hand side.
    let peak = c
        .iter()
        .zip(l)
        .map(|(ci, li)| (ci * li).abs())
        .fold(0.0, f64::max);
    let scale = 1.0 / peak;
    for ci in &mut c {
        *ci *= scale;
    }
    let phi_n = rot * scale;

    let sbar: Vec<f64> = c
        .iter()
        .zip(l)
        .enumerate()
        .map(|(i, (ci, li))| if i % 2 == 0 { ci * li } else { -ci * li })
        .collect();

    Ok(CompatResult {
        n,
        c,
        sbar,
        phi_n,
        det_a,
    })
}

/// Unfolds an odd-K problem onto its orientation double cover.
///
/// The K-ring is traversed twice, giving 2K species whose cyclic ratio
/// product is the square of the original (so α' = 2α), and the arcs are
/// copied to [0, π] and [π, 2π] with nodes x ↦ x/2 and x ↦ x/2 + π. The
/// e^{2πα} weight of the second sheet is carried by the doubled l-ladder
/// (l_{K+m} = e^{-2πα} l_m), so the arc data itself is copied verbatim.
pub fn double_cover(
    setup: &CompetitionSetup,
    traces: &BoundaryTraces,
) -> (CompetitionSetup, BoundaryTraces) {
    let k = setup.species;
    let idx = |i: usize| i % k;
    // Doubled antagonists inherit the interaction of their originals; the
    // antipodal copy of a species never borders itself for K ≥ 3, so the
    // consecutive-edge ratios wrap the original ring twice.
    let mut a2 = vec![vec![1.0; 2 * k]; 2 * k];
    for i in 0..2 * k {
        for j in 0..2 * k {
            if idx(i) != idx(j) {
                a2[i][j] = setup.a[idx(i)][idx(j)];
            }
        }
    }
    let doubled_setup = setup_of(a2).expect("doubling preserves positivity");

    let mut nodes = Vec::with_capacity(2 * k + 1);
    for &x in &traces.nodes {
        nodes.push(x / 2.0);
    }
    for &x in &traces.nodes[1..] {
        nodes.push(x / 2.0 + std::f64::consts::PI);
    }
    let mut arcs = traces.arcs.clone();
    arcs.extend(traces.arcs.iter().cloned());
    let doubled_traces = BoundaryTraces::new(nodes, arcs).expect("doubled traces are valid");

    (doubled_setup, doubled_traces)
}

/// Folds the doubled solution back: checks the two sheets agree and returns
/// the K-component scaling vector.
pub fn fold_sbar(doubled: &CompatResult, k_original: usize) -> Result<Vec<f64>, CompatError> {
    let s = &doubled.sbar;
    assert_eq!(s.len(), 2 * k_original);
    for m in 0..k_original {
        let rel = (s[m] - s[m + k_original]).abs() / s[m].abs().max(s[m + k_original].abs());
        if rel > 1e-6 {
            return Err(CompatError::SignPattern(m + 1));
        }
    }
    let mut folded: Vec<f64> = (0..k_original)
        .map(|m| 0.5 * (s[m] + s[m + k_original]))
        .collect();
    let peak = folded.iter().cloned().fold(0.0, f64::max);
    for v in &mut folded {
        *v /= peak;
    }
    Ok(folded)
}
