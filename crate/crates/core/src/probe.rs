//! Floating-point holonomy probes: Christoffel symbols of a quadratic metric,
//! RK4 parallel transport around small square loops, and the span of the
//! resulting near-identity generators against an exact `g_L` basis.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::ProbeError;
use crate::exactla::{rational_to_f64, RatMatrix};
use crate::liealg::SubspaceBasis;
use crate::realize::QuadraticMetric;

pub const MIN_STEPS: usize = 16;

/// `f64` copy of a [`QuadraticMetric`], converted once.
#[derive(Clone, Debug)]
pub struct FloatMetric {
    n: usize,
    g0: DMatrix<f64>,
    lowered: Vec<f64>,
}

impl FloatMetric {
    pub fn new(qm: &QuadraticMetric) -> Self {
        let n = qm.dim();
        FloatMetric { n, g0: to_dmatrix(&qm.g0), lowered: qm.lowered().iter().map(rational_to_f64).collect() }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    fn coeff(&self, i: usize, j: usize, p: usize, q: usize) -> f64 {
        let n = self.n;
        self.lowered[((i * n + j) * n + p) * n + q]
    }

    pub fn metric(&self, x: &[f64]) -> DMatrix<f64> {
        let n = self.n;
        let mut g = self.g0.clone();
        for i in 0..n {
            for j in 0..n {
                let mut acc = 0.0;
                for p in 0..n {
                    if x[p] == 0.0 {
                        continue;
                    }
                    for q in 0..n {
                        acc += self.coeff(i, j, p, q) * x[p] * x[q];
                    }
                }
                g[(i, j)] += acc;
            }
        }
        g
    }

    /// `∂_a g` at `x`, i.e. `2 Σ_q 𝓑_{ij,aq} x^q`, indexed by `a`.
    pub fn metric_derivatives(&self, x: &[f64]) -> Vec<DMatrix<f64>> {
        let n = self.n;
        (0..n)
            .map(|a| DMatrix::from_fn(n, n, |i, j| 2.0 * (0..n).map(|q| self.coeff(i, j, a, q) * x[q]).sum::<f64>()))
            .collect()
    }
}

pub fn to_dmatrix(m: &RatMatrix) -> DMatrix<f64> {
    DMatrix::from_fn(m.rows(), m.cols(), |r, c| rational_to_f64(&m[(r, c)]))
}

/// `Γ^k_{ij}` stored densely.
#[derive(Clone, Debug, PartialEq)]
pub struct Christoffel {
    n: usize,
    data: Vec<f64>,
}

impl Christoffel {
    #[inline]
    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        self.data[(k * self.n + i) * self.n + j]
    }

    /// `(Γ[v])^k_j = Γ^k_{ij} v^i`.
    pub fn contract(&self, v: &[f64]) -> DMatrix<f64> {
        let n = self.n;
        DMatrix::from_fn(n, n, |k, j| (0..n).map(|i| self.get(k, i, j) * v[i]).sum())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Levi-Civita symbols `Γ^k_{ij} = ½ g^{kl}(∂_i g_{lj} + ∂_j g_{li} − ∂_l g_{ij})`.
pub fn christoffel(metric: &FloatMetric, x: &[f64]) -> Result<Christoffel, ProbeError> {
    let n = metric.dim();
    let ginv = metric.metric(x).try_inverse().ok_or_else(|| ProbeError::SingularMetric(x.to_vec()))?;
    let dg = metric.metric_derivatives(x);
    let mut data = vec![0.0; n * n * n];
    for i in 0..n {
        for j in 0..n {
            let lowered: Vec<f64> = (0..n).map(|l| dg[i][(l, j)] + dg[j][(l, i)] - dg[l][(i, j)]).collect();
            for k in 0..n {
                data[(k * n + i) * n + j] = 0.5 * (0..n).map(|l| ginv[(k, l)] * lowered[l]).sum::<f64>();
            }
        }
    }
    if data.iter().any(|v| !v.is_finite()) {
        return Err(ProbeError::NonFinite);
    }
    Ok(Christoffel { n, data })
}

/// Max-norm of `(∇_k L)^i_j = Γ^i_{kl} L^l_j − Γ^l_{kj} L^i_l` at `x`.
pub fn nabla_l_residual(metric: &FloatMetric, l: &DMatrix<f64>, x: &[f64]) -> Result<f64, ProbeError> {
    let n = metric.dim();
    let gamma = christoffel(metric, x)?;
    let mut worst = 0.0f64;
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let v: f64 = (0..n).map(|m| gamma.get(i, k, m) * l[(m, j)] - gamma.get(m, k, j) * l[(i, m)]).sum();
                worst = worst.max(v.abs());
            }
        }
    }
    Ok(worst)
}

/// Axis-aligned square `b → b + h e_α → b + h(e_α + e_β) → b + h e_β → b`.
/// A nonzero basepoint is reached by a straight tether from the origin, so
/// every loop is based at `x = 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LoopSpec {
    pub basepoint: Vec<f64>,
    pub plane: [usize; 2],
    pub side: f64,
    pub steps: usize,
}

impl LoopSpec {
    pub fn at_origin(n: usize, plane: [usize; 2], side: f64, steps: usize) -> Self {
        LoopSpec { basepoint: vec![0.0; n], plane, side, steps }
    }

    pub fn validate(&self, n: usize) -> Result<(), ProbeError> {
        let [a, b] = self.plane;
        if a == b || a >= n || b >= n || self.basepoint.len() != n {
            return Err(ProbeError::BadPlane(a, b));
        }
        if !(self.side > 0.0 && self.side.is_finite()) {
            return Err(ProbeError::BadSide(self.side));
        }
        if self.steps < MIN_STEPS {
            return Err(ProbeError::TooFewSteps { min: MIN_STEPS, got: self.steps });
        }
        Ok(())
    }

    /// Corners in traversal order, closing back at the origin, with steps per leg.
    fn legs(&self) -> Vec<(Vec<f64>, usize)> {
        let [a, b] = self.plane;
        let base = &self.basepoint;
        let shifted = |da: f64, db: f64| {
            let mut p = base.clone();
            p[a] += da;
            p[b] += db;
            p
        };
        let h = self.side;
        let square = [shifted(h, 0.0), shifted(h, h), shifted(0.0, h), base.clone()];
        let tether = base.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let tether_steps = ((tether / (h / self.steps as f64)).ceil() as usize).max(self.steps);
        let mut legs = Vec::new();
        if tether > 0.0 {
            legs.push((base.clone(), tether_steps));
        }
        legs.extend(square.into_iter().map(|p| (p, self.steps)));
        if tether > 0.0 {
            legs.push((vec![0.0; base.len()], tether_steps));
        }
        legs
    }
}

#[derive(Clone, Debug)]
pub struct HolonomySample {
    pub loop_spec: LoopSpec,
    /// Transport operator `A` around the loop.
    pub transport: DMatrix<f64>,
    /// `Ψ = (A − I) − ½(A − I)²`.
    pub log_approx: DMatrix<f64>,
    /// Frobenius distance of `Ψ` to the reference span, relative to `‖Ψ‖`.
    pub membership_residual: f64,
    /// `‖g(0) − Aᵀ g(0) A‖_F`.
    pub metric_defect: f64,
}

/// Transports the identity frame around `loop_spec` with classical RK4 on
/// `dP/dt = −Γ(γ)[γ′] P`.
pub fn transport_operator(metric: &FloatMetric, loop_spec: &LoopSpec) -> Result<DMatrix<f64>, ProbeError> {
    let n = metric.dim();
    loop_spec.validate(n)?;
    let mut p = DMatrix::<f64>::identity(n, n);
    let mut start = vec![0.0; n];
    for (end, steps) in loop_spec.legs() {
        let velocity: Vec<f64> = end.iter().zip(&start).map(|(e, s)| e - s).collect();
        let dt = 1.0 / steps as f64;
        let point = |t: f64| -> Vec<f64> { start.iter().zip(&velocity).map(|(s, v)| s + t * v).collect() };
        let field =
            |t: f64| -> Result<DMatrix<f64>, ProbeError> { Ok(-christoffel(metric, &point(t))?.contract(&velocity)) };
        for step in 0..steps {
            let t = step as f64 * dt;
            let (f0, fm, f1) = (field(t)?, field(t + 0.5 * dt)?, field(t + dt)?);
            let k1 = &f0 * &p;
            let k2 = &fm * (&p + &k1 * (0.5 * dt));
            let k3 = &fm * (&p + &k2 * (0.5 * dt));
            let k4 = &f1 * (&p + &k3 * dt);
            p += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
        }
        start = end;
    }
    if p.iter().any(|v| !v.is_finite()) {
        return Err(ProbeError::NonFinite);
    }
    Ok(p)
}

/// Orthonormal frame (Frobenius inner product) for the span of a basis.
#[derive(Clone, Debug)]
pub struct SpanProjector {
    q: DMatrix<f64>,
}

impl SpanProjector {
    pub fn new(basis: &SubspaceBasis) -> Self {
        let n = basis.ambient_dim();
        if basis.is_empty() {
            return SpanProjector { q: DMatrix::zeros(n * n, 0) };
        }
        let columns: Vec<DVector<f64>> = basis
            .elements()
            .iter()
            .map(|m| DVector::from_iterator(n * n, to_dmatrix(m).transpose().iter().copied()))
            .collect();
        let q = DMatrix::from_columns(&columns).qr().q();
        SpanProjector { q }
    }

    /// `‖ψ − P ψ‖_F`.
    pub fn distance(&self, m: &DMatrix<f64>) -> f64 {
        let v = DVector::from_iterator(m.len(), m.transpose().iter().copied());
        let proj = &self.q * (self.q.transpose() * &v);
        (v - proj).norm()
    }
}

pub fn log_approx(a: &DMatrix<f64>) -> DMatrix<f64> {
    let y = a - DMatrix::identity(a.nrows(), a.ncols());
    &y - (&y * &y) * 0.5
}

pub fn parallel_transport(
    metric: &FloatMetric,
    projector: &SpanProjector,
    loop_spec: &LoopSpec,
) -> Result<HolonomySample, ProbeError> {
    let a = transport_operator(metric, loop_spec)?;
    let psi = log_approx(&a);
    let g = metric.metric(&vec![0.0; metric.dim()]);
    let metric_defect = (&g - a.transpose() * &g * &a).norm();
    let membership_residual = projector.distance(&psi) / psi.norm().max(RESIDUAL_FLOOR);
    Ok(HolonomySample {
        loop_spec: loop_spec.clone(),
        transport: a,
        log_approx: psi,
        membership_residual,
        metric_defect,
    })
}

/// Smallest norm used as the denominator of a relative residual.
pub const RESIDUAL_FLOOR: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeTolerances {
    pub membership_tol: f64,
    pub rank_threshold: f64,
}

impl Default for ProbeTolerances {
    fn default() -> Self {
        ProbeTolerances { membership_tol: 1e-6, rank_threshold: 1e-8 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleSummary {
    pub plane: [usize; 2],
    pub side: f64,
    pub basepoint: Vec<f64>,
    pub residual: f64,
}

/// Probe report; serializes to the published JSON shape.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpanReport {
    pub span_rank: usize,
    #[serde(rename = "dim_gL")]
    pub dim_gl: usize,
    pub max_membership_residual: f64,
    pub samples: Vec<SampleSummary>,
    #[serde(skip)]
    pub singular_values: Vec<f64>,
    /// `σ_r / σ_{r+1}`; `None` when nothing was discarded or the discarded value is zero.
    #[serde(skip)]
    pub gap: Option<f64>,
    #[serde(skip)]
    pub max_metric_defect: f64,
    #[serde(skip)]
    pub passed: bool,
}

/// Numerical rank of `Ψ` samples stacked as columns, with the singular values
/// sorted descending and the ratio across the cut. Values count when they
/// exceed `threshold · max(σ_max, scale)`; `scale` keeps pure roundoff from a
/// flat metric from registering as rank.
pub fn numerical_rank(samples: &[DMatrix<f64>], threshold: f64, scale: f64) -> (usize, Vec<f64>, Option<f64>) {
    if samples.is_empty() {
        return (0, Vec::new(), None);
    }
    let columns: Vec<DVector<f64>> =
        samples.iter().map(|m| DVector::from_iterator(m.len(), m.iter().copied())).collect();
    let mut sv: Vec<f64> = DMatrix::from_columns(&columns).singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    let top = sv.first().copied().unwrap_or(0.0).max(scale);
    let rank = if top == 0.0 { 0 } else { sv.iter().take_while(|&&s| s > threshold * top).count() };
    let gap = match (rank.checked_sub(1).map(|r| sv[r]), sv.get(rank)) {
        (Some(kept), Some(&dropped)) if dropped > 0.0 => Some(kept / dropped),
        _ => None,
    };
    (rank, sv, gap)
}

/// Transports around every loop in parallel and compares the generated span
/// with the exact `g_L` basis.
pub fn holonomy_span(
    qm: &QuadraticMetric,
    gl: &SubspaceBasis,
    loops: &[LoopSpec],
    tolerances: &ProbeTolerances,
) -> Result<SpanReport, ProbeError> {
    let metric = FloatMetric::new(qm);
    let projector = SpanProjector::new(gl);
    let samples: Vec<HolonomySample> =
        loops.par_iter().map(|l| parallel_transport(&metric, &projector, l)).collect::<Result<_, _>>()?;
    let psis: Vec<DMatrix<f64>> = samples.iter().map(|s| s.log_approx.clone()).collect();
    // Ψ ≈ side² · R, so loop area is the natural unit
    let area = loops.iter().fold(0.0f64, |m, l| m.max(l.side * l.side));
    let (span_rank, singular_values, gap) = numerical_rank(&psis, tolerances.rank_threshold, area);
    let max_membership_residual = samples.iter().fold(0.0f64, |m, s| m.max(s.membership_residual));
    let max_metric_defect = samples.iter().fold(0.0f64, |m, s| m.max(s.metric_defect));
    let passed = span_rank == gl.len() && max_membership_residual < tolerances.membership_tol;
    Ok(SpanReport {
        span_rank,
        dim_gl: gl.len(),
        max_membership_residual,
        samples: samples
            .iter()
            .map(|s| SampleSummary {
                plane: s.loop_spec.plane,
                side: s.loop_spec.side,
                basepoint: s.loop_spec.basepoint.clone(),
                residual: s.membership_residual,
            })
            .collect(),
        singular_values,
        gap,
        max_metric_defect,
        passed,
    })
}

pub const DEFAULT_SIDE: f64 = 1e-2;
pub const DEFAULT_STEPS: usize = 100;
pub const BASEPOINT_RADIUS: f64 = 0.05;

/// Coordinate-plane squares at the origin and at two seeded random basepoints
/// with `‖x‖∞ ≤ 0.05`.
pub fn standard_loop_family(n: usize, seed: u64) -> Vec<LoopSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bases = vec![vec![0.0; n]];
    for _ in 0..2 {
        bases.push((0..n).map(|_| rng.random_range(-BASEPOINT_RADIUS..=BASEPOINT_RADIUS)).collect());
    }
    let mut loops = Vec::new();
    for base in &bases {
        for a in 0..n {
            for b in a + 1..n {
                loops.push(LoopSpec {
                    basepoint: base.clone(),
                    plane: [a, b],
                    side: DEFAULT_SIDE,
                    steps: DEFAULT_STEPS,
                });
            }
        }
    }
    loops
}

/// Central-difference derivative of the metric, `(g(x + h e_a) − g(x − h e_a)) / 2h`.
pub fn metric_derivative_fd(metric: &FloatMetric, x: &[f64], a: usize, h: f64) -> DMatrix<f64> {
    let mut plus = x.to_vec();
    let mut minus = x.to_vec();
    plus[a] += h;
    minus[a] -= h;
    (metric.metric(&plus) - metric.metric(&minus)) / (2.0 * h)
}

/// Christoffel symbols from central differences of the metric.
pub fn christoffel_fd(metric: &FloatMetric, x: &[f64], h: f64) -> Result<Christoffel, ProbeError> {
    let n = metric.dim();
    let ginv = metric.metric(x).try_inverse().ok_or_else(|| ProbeError::SingularMetric(x.to_vec()))?;
    let dg: Vec<DMatrix<f64>> = (0..n).map(|a| metric_derivative_fd(metric, x, a, h)).collect();
    let mut data = vec![0.0; n * n * n];
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                data[(k * n + i) * n + j] =
                    0.5 * (0..n).map(|l| ginv[(k, l)] * (dg[i][(l, j)] + dg[j][(l, i)] - dg[l][(i, j)])).sum::<f64>();
            }
        }
    }
    Ok(Christoffel { n, data })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::berger::r_formal;
    use crate::canonical::{build_canonical, CanonicalPair, PencilSpec};
    use crate::exactla::rat;
    use crate::liealg::centralizer_basis;
    use crate::realize::realize;

    fn pair(blocks: &[(usize, i64)]) -> CanonicalPair {
        build_canonical(&PencilSpec::nilpotent(blocks).unwrap())
    }

    #[test]
    fn christoffel_vanishes_at_origin_and_for_flat() {
        let p = pair(&[(1, 1), (2, -1)]);
        let (_, qm) = realize(&p);
        let m = FloatMetric::new(&qm);
        assert!(christoffel(&m, &[0.0; 3]).unwrap().max_abs() < 1e-15);
        let flat = FloatMetric::new(&QuadraticMetric::flat(p.g.clone()));
        assert_eq!(christoffel(&flat, &[0.3, -0.2, 0.1]).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn christoffel_matches_finite_differences() {
        let (_, qm) = realize(&pair(&[(1, 1), (1, 1)]));
        let m = FloatMetric::new(&qm);
        let x = [0.1, 0.0];
        let (exact, fd) = (christoffel(&m, &x).unwrap(), christoffel_fd(&m, &x, 1e-5).unwrap());
        for (a, b) in exact.data.iter().zip(&fd.data) {
            assert!((a - b).abs() < 1e-7);
        }
        for k in 0..2 {
            for i in 0..2 {
                for j in 0..2 {
                    assert_eq!(exact.get(k, i, j), exact.get(k, j, i));
                }
            }
        }
    }

    #[test]
    fn flat_realization_has_rank_zero() {
        let p = pair(&[(3, 1)]);
        let (_, qm) = realize(&p);
        let report =
            holonomy_span(&qm, &centralizer_basis(&p), &standard_loop_family(3, 1), &ProbeTolerances::default())
                .unwrap();
        assert_eq!(report.span_rank, 0);
        assert!(report.passed);
    }

    #[test]
    fn flat_transport_is_identity() {
        let flat = FloatMetric::new(&QuadraticMetric::flat(pair(&[(3, 1)]).g));
        let a = transport_operator(&flat, &LoopSpec::at_origin(3, [0, 2], 1e-2, 32)).unwrap();
        assert!((a - DMatrix::identity(3, 3)).norm() < 1e-12);
    }

    #[test]
    fn loop_validation() {
        let m = FloatMetric::new(&QuadraticMetric::flat(pair(&[(2, 1)]).g));
        let bad = [
            LoopSpec::at_origin(2, [0, 0], 1e-2, 32),
            LoopSpec::at_origin(2, [0, 1], -1.0, 32),
            LoopSpec::at_origin(2, [0, 1], 1e-2, 8),
        ];
        for l in &bad {
            assert!(transport_operator(&m, l).is_err());
        }
    }

    #[test]
    fn rotation_angle_matches_curvature() {
        let (_, qm) = realize(&pair(&[(1, 1), (1, 1)]));
        let m = FloatMetric::new(&qm);
        let side = 1e-2;
        let a = transport_operator(&m, &LoopSpec::at_origin(2, [0, 1], side, 100)).unwrap();
        let angle = a[(1, 0)].atan2(a[(0, 0)]);
        // oracle: R^0_{101} = ∂_0 Γ^0_{11} − ∂_1 Γ^0_{01} from differenced Christoffels
        let h = 1e-4;
        let d = |a: usize, k: usize, i: usize, j: usize| {
            let mut xp = [0.0; 2];
            let mut xm = [0.0; 2];
            xp[a] += h;
            xm[a] -= h;
            (christoffel(&m, &xp).unwrap().get(k, i, j) - christoffel(&m, &xm).unwrap().get(k, i, j)) / (2.0 * h)
        };
        let sectional = d(0, 0, 1, 1) - d(1, 0, 0, 1);
        let ratio = angle.abs() / (side * side);
        assert!((ratio - sectional.abs()).abs() < 0.01 * sectional.abs(), "{ratio} vs {sectional}");
    }

    #[test]
    fn two_block_samples_lie_in_gl() {
        for signs in [1, -1] {
            let p = pair(&[(1, 1), (2, signs)]);
            let (_, qm) = realize(&p);
            let gl = centralizer_basis(&p);
            let report = holonomy_span(&qm, &gl, &standard_loop_family(3, 7), &ProbeTolerances::default()).unwrap();
            assert!(report.passed, "{report:?}");
            assert_eq!(report.span_rank, 1);
            assert!(report.max_metric_defect < 1e-8);
        }
    }

    #[test]
    fn shrinking_loops_converge_to_curvature() {
        let p = pair(&[(1, 1), (1, -1), (2, 1)]);
        let (_, qm) = realize(&p);
        let formal = r_formal(&p);
        let m = FloatMetric::new(&qm);
        for (k, &(a, b)) in formal.base.tags().iter().enumerate() {
            let target = to_dmatrix(&formal.values[k]);
            let scaled = |h: f64| {
                log_approx(&transport_operator(&m, &LoopSpec::at_origin(4, [a, b], h, 100)).unwrap()) / (h * h)
            };
            let (coarse, fine) = (scaled(2e-2), scaled(1e-2));
            if target.norm() == 0.0 {
                assert!(fine.norm() < 1e-3);
                continue;
            }
            assert!((coarse.norm() / fine.norm() - 1.0).abs() < 0.05);
            let aligned = (&fine - &target).norm().min((&fine + &target).norm());
            assert!(aligned < 1e-3 * target.norm(), "plane ({a},{b}): {aligned}");
        }
    }

    #[test]
    fn nabla_l_residual_detects_corruption() {
        let p = pair(&[(1, 1), (2, 1), (2, -1)]);
        let (_, qm) = realize(&p);
        let l = to_dmatrix(&p.l);
        let m = FloatMetric::new(&qm);
        assert!(nabla_l_residual(&m, &l, &[0.0; 5]).unwrap() < 1e-15);
        assert!(nabla_l_residual(&m, &l, &[0.05, -0.03, 0.02, 0.05, -0.01]).unwrap() < 1e-9);
        let bad = FloatMetric::new(&qm.with_raw_coeff(1, 2, 3, 4, rat(1, 1)));
        assert!(nabla_l_residual(&bad, &l, &[0.1; 5]).unwrap() > 1e-3);
    }

    #[test]
    fn numerical_rank_reports_gap() {
        let a = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]);
        let tiny = DMatrix::from_row_slice(2, 2, &[1e-12, 0.0, 0.0, 0.0]);
        let (rank, sv, gap) = numerical_rank(&[a.clone(), &a * 2.0 + &tiny], 1e-8, 0.0);
        assert_eq!(rank, 1);
        assert_eq!(sv.len(), 2);
        assert!(gap.unwrap() > 1e3);
        assert_eq!(numerical_rank(&[], 1e-8, 0.0).0, 0);
        let noise = DMatrix::from_row_slice(2, 2, &[1e-17, 0.0, 0.0, -3e-17]);
        assert_eq!(numerical_rank(&[noise.clone(), noise * 0.5], 1e-8, 0.0).0, 1);
        assert_eq!(numerical_rank(&[tiny], 1e-8, 1e-4).0, 0);
    }

    #[test]
    fn loop_family_is_seeded() {
        assert_eq!(standard_loop_family(4, 3), standard_loop_family(4, 3));
        assert_ne!(standard_loop_family(4, 3), standard_loop_family(4, 4));
        let family = standard_loop_family(4, 3);
        assert_eq!(family.len(), 18);
        assert!(family.iter().all(|l| l.basepoint.iter().all(|v| v.abs() <= BASEPOINT_RADIUS)));
    }
}
