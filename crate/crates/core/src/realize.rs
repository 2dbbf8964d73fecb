//! Quadratic metric `g(x) = g⁰ + 𝓑(x, x)` whose Levi-Civita connection keeps
//! `L` parallel and whose curvature at the origin is `R_formal`.
//!
//! The (2,2)-tensor is `B = −½ Σ_{i<j} Σ_s (L_i^{n_ij−1−s} ⊗ L_j^s + L_j^{n_ij−1−s} ⊗ L_i^s)`,
//! i.e. `−½ R_formal(⊗)`, and is lowered with `g⁰` on both upper indices.

use num::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::berger::{r_formal, CurvatureMap};
use crate::canonical::CanonicalPair;
use crate::error::RealizeError;
use crate::exactla::{format_rational, int, parse_rational, rat, RatMatrix, Rational};
use crate::liealg::so_basis;

#[inline]
fn idx4(n: usize, a: usize, b: usize, c: usize, d: usize) -> usize {
    ((a * n + b) * n + c) * n + d
}

/// One `coeff · C ⊗ D` summand; `C ⊗ D` acts on `X` as `C X D`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BTerm {
    pub coeff: Rational,
    pub c: RatMatrix,
    pub d: RatMatrix,
}

/// The summands contributed by one block pair `(i, j)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockPairContribution {
    pub i: usize,
    pub j: usize,
    pub terms: Vec<BTerm>,
}

/// Components `B^{αβ}_{jq}` with `(C ⊗ D)^{αβ}_{jq} = C^α_j D^β_q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BTensor {
    n: usize,
    components: Vec<Rational>,
    pub contributions: Vec<BlockPairContribution>,
}

impl BTensor {
    pub fn zero(n: usize) -> Self {
        BTensor { n, components: vec![Rational::zero(); n.pow(4)], contributions: Vec::new() }
    }

    pub fn from_contributions(n: usize, contributions: Vec<BlockPairContribution>) -> Self {
        let mut components = vec![Rational::zero(); n.pow(4)];
        for term in contributions.iter().flat_map(|c| &c.terms) {
            for (alpha, j, cv) in term.c.nonzeros() {
                let cv = &term.coeff * cv;
                for (beta, q, dv) in term.d.nonzeros() {
                    components[idx4(n, alpha, beta, j, q)] += &cv * dv;
                }
            }
        }
        BTensor { n, components, contributions }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// `B^{αβ}_{jq}`.
    pub fn component(&self, alpha: usize, beta: usize, j: usize, q: usize) -> &Rational {
        &self.components[idx4(self.n, alpha, beta, j, q)]
    }

    /// `B(X)^α_q = Σ_{j,β} B^{αβ}_{jq} X^j_β`, read off the components.
    pub fn apply(&self, x: &RatMatrix) -> RatMatrix {
        let n = self.n;
        let mut out = RatMatrix::zeros(n, n);
        for (j, beta, xv) in x.nonzeros() {
            for alpha in 0..n {
                for q in 0..n {
                    let b = &self.components[idx4(n, alpha, beta, j, q)];
                    if !b.is_zero() {
                        out[(alpha, q)] += b * xv;
                    }
                }
            }
        }
        out
    }

    /// `Σ coeff · C X D` over the stored summands.
    pub fn apply_terms(&self, x: &RatMatrix) -> RatMatrix {
        let n = self.n;
        self.contributions
            .iter()
            .flat_map(|c| &c.terms)
            .fold(RatMatrix::zeros(n, n), |acc, t| &acc + &(&(&t.c * x) * &t.d).scale(&t.coeff))
    }

    /// Every `C` and `D` factor, for the operator-form checks.
    pub fn factors(&self) -> impl Iterator<Item = &RatMatrix> {
        self.contributions.iter().flat_map(|c| &c.terms).flat_map(|t| [&t.c, &t.d])
    }
}

/// Blockwise `B = Σ_{i,j} B̂_ij` over ordered block pairs of one eigenvalue,
/// diagonal pairs included, with
/// `B̂_ij = −½ Σ_{s<n_ij} Ľ_i^{n_ij−1−s} ⊗ Ľ_j^s` built from nilpotent parts
/// (`Ľ_i^0` is the projection onto block `i`).
pub fn build_b(pair: &CanonicalPair) -> BTensor {
    let n = pair.dim();
    let half = rat(-1, 2);
    let blocks = pair.blocks();
    let top = blocks.iter().map(|b| b.size).max().unwrap_or(0);
    let nil_powers = crate::exactla::matrix_powers(&pair.nilpotent_part(), top);
    let padded = |k: usize, power: usize| -> RatMatrix {
        let b = &blocks[k];
        let mut m = RatMatrix::zeros(n, n);
        m.set_block(b.offset, b.offset, &nil_powers[power].block(b.offset, b.offset, b.size, b.size));
        m
    };
    let mut contributions = Vec::new();
    for i in 0..blocks.len() {
        for j in 0..blocks.len() {
            if blocks[i].eigen != blocks[j].eigen {
                continue;
            }
            let n_ij = blocks[i].size.max(blocks[j].size);
            let terms: Vec<BTerm> = (0..n_ij)
                .filter(|&s| n_ij - 1 - s < blocks[i].size && s < blocks[j].size)
                .map(|s| BTerm { coeff: half.clone(), c: padded(i, n_ij - 1 - s), d: padded(j, s) })
                .collect();
            contributions.push(BlockPairContribution { i, j, terms });
        }
    }
    BTensor::from_contributions(n, contributions)
}

/// `g(x) = g⁰ + Σ 𝓑_{ij,pq} x^p x^q` with constant `g⁰` and `𝓑`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticMetric {
    pub g0: RatMatrix,
    lowered: Vec<Rational>,
    /// Whether enforcing the `(i,j)` and `(p,q)` symmetries left `𝓑` unchanged.
    pub symmetrization_noop: bool,
}

impl QuadraticMetric {
    /// Wraps raw coefficients, symmetrizing in `(i,j)` and `(p,q)`.
    pub fn new(g0: RatMatrix, lowered: Vec<Rational>) -> Self {
        let n = g0.rows();
        assert_eq!(lowered.len(), n.pow(4));
        let mut sym = lowered.clone();
        let quarter = rat(1, 4);
        for i in 0..n {
            for j in 0..n {
                for p in 0..n {
                    for q in 0..n {
                        let total = &(&lowered[idx4(n, i, j, p, q)] + &lowered[idx4(n, j, i, p, q)])
                            + &(&lowered[idx4(n, i, j, q, p)] + &lowered[idx4(n, j, i, q, p)]);
                        sym[idx4(n, i, j, p, q)] = total * &quarter;
                    }
                }
            }
        }
        let symmetrization_noop = sym == lowered;
        QuadraticMetric { g0, lowered: sym, symmetrization_noop }
    }

    pub fn flat(g0: RatMatrix) -> Self {
        let n = g0.rows();
        QuadraticMetric { g0, lowered: vec![Rational::zero(); n.pow(4)], symmetrization_noop: true }
    }

    pub fn dim(&self) -> usize {
        self.g0.rows()
    }

    /// `𝓑_{ij,pq}`.
    pub fn coeff(&self, i: usize, j: usize, p: usize, q: usize) -> &Rational {
        &self.lowered[idx4(self.dim(), i, j, p, q)]
    }

    pub fn lowered(&self) -> &[Rational] {
        &self.lowered
    }

    /// Same `g⁰`, coefficients added entrywise.
    pub fn plus(&self, other: &QuadraticMetric) -> QuadraticMetric {
        assert_eq!(self.g0, other.g0);
        let lowered = self.lowered.iter().zip(&other.lowered).map(|(a, b)| a + b).collect();
        QuadraticMetric::new(self.g0.clone(), lowered)
    }

    /// A copy with one coefficient replaced, symmetry partners untouched.
    pub fn with_raw_coeff(&self, i: usize, j: usize, p: usize, q: usize, value: Rational) -> QuadraticMetric {
        let mut out = self.clone();
        let n = self.dim();
        out.lowered[idx4(n, i, j, p, q)] = value;
        out
    }

    /// Radius `ρ` of the sup-norm ball in which `g(x)` is guaranteed invertible:
    /// `‖g⁰⁻¹‖∞ · ρ² · max_i Σ_{j,p,q} |𝓑_{ij,pq}| < 1`.
    pub fn validity_radius(&self) -> f64 {
        let n = self.dim();
        let Some(inv) = self.g0.inverse() else { return 0.0 };
        let row_sum = |m: &RatMatrix, r: usize| m.row(r).iter().map(|v| v.abs()).fold(Rational::zero(), |a, b| a + b);
        let inv_norm = (0..n).map(|r| row_sum(&inv, r)).max().unwrap_or_else(Rational::zero);
        let beta = (0..n)
            .map(|i| {
                self.lowered[i * n * n * n..(i + 1) * n * n * n]
                    .iter()
                    .map(|v| v.abs())
                    .fold(Rational::zero(), |a, b| a + b)
            })
            .max()
            .unwrap_or_else(Rational::zero);
        let product = (inv_norm * beta).to_f64().unwrap_or(f64::INFINITY);
        if product == 0.0 {
            f64::INFINITY
        } else {
            1.0 / product.sqrt()
        }
    }

    pub fn to_export(&self) -> MetricExport {
        let n = self.dim();
        let b_lowered = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        (0..n).map(|p| (0..n).map(|q| format_rational(self.coeff(i, j, p, q))).collect()).collect()
                    })
                    .collect()
            })
            .collect();
        MetricExport { g0: self.g0.clone(), b_lowered }
    }

    pub fn from_export(export: &MetricExport) -> Result<Self, RealizeError> {
        let n = export.g0.rows();
        if !export.g0.is_square() {
            return Err(RealizeError::Malformed("g0 is not square".into()));
        }
        let mut lowered = Vec::with_capacity(n.pow(4));
        let shape_ok = export.b_lowered.len() == n
            && export
                .b_lowered
                .iter()
                .all(|a| a.len() == n && a.iter().all(|b| b.len() == n && b.iter().all(|c| c.len() == n)));
        if !shape_ok {
            return Err(RealizeError::Malformed(format!("B_lowered must have shape {n}x{n}x{n}x{n}")));
        }
        for s in export.b_lowered.iter().flatten().flatten().flatten() {
            lowered.push(parse_rational(s).map_err(|e| RealizeError::Malformed(e.to_string()))?);
        }
        Ok(QuadraticMetric::new(export.g0.clone(), lowered))
    }
}

/// JSON shape of an exported metric.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetricExport {
    pub g0: RatMatrix,
    #[serde(rename = "B_lowered")]
    pub b_lowered: Vec<Vec<Vec<Vec<String>>>>,
}

/// `𝓑_{ij,pq} = g_{iα} g_{pβ} B^{αβ}_{jq}`.
pub fn lower_b(b: &BTensor, g0: &RatMatrix) -> QuadraticMetric {
    let n = b.dim();
    assert_eq!(g0.rows(), n);
    // column α of g0 as (i, g_iα) pairs
    let columns: Vec<Vec<(usize, Rational)>> =
        (0..n).map(|a| (0..n).filter(|&i| !g0[(i, a)].is_zero()).map(|i| (i, g0[(i, a)].clone())).collect()).collect();
    let mut lowered = vec![Rational::zero(); n.pow(4)];
    for alpha in 0..n {
        for beta in 0..n {
            for j in 0..n {
                for q in 0..n {
                    let v = b.component(alpha, beta, j, q);
                    if v.is_zero() {
                        continue;
                    }
                    for (i, gi) in &columns[alpha] {
                        let giv = gi * v;
                        for (p, gp) in &columns[beta] {
                            lowered[idx4(n, *i, j, *p, q)] += &giv * gp;
                        }
                    }
                }
            }
        }
    }
    QuadraticMetric::new(g0.clone(), lowered)
}

/// Value of [`metric_at`]: the matrix and whether `x` lies inside the
/// guaranteed-invertible radius.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MetricAt {
    pub g: RatMatrix,
    pub within_radius: bool,
}

/// `g(x)` exactly; errors only if the value is actually singular.
pub fn metric_at(qm: &QuadraticMetric, x: &[Rational]) -> Result<MetricAt, RealizeError> {
    let g = metric_value(qm, x);
    if g.rank() < qm.dim() {
        return Err(RealizeError::SingularMetric);
    }
    let sup = x.iter().map(|v| v.abs()).max().unwrap_or_else(Rational::zero);
    let within_radius = sup.to_f64().unwrap_or(f64::INFINITY) < qm.validity_radius();
    Ok(MetricAt { g, within_radius })
}

fn metric_value(qm: &QuadraticMetric, x: &[Rational]) -> RatMatrix {
    let n = qm.dim();
    assert_eq!(x.len(), n);
    let support: Vec<usize> = (0..n).filter(|&k| !x[k].is_zero()).collect();
    let mut g = qm.g0.clone();
    for i in 0..n {
        for j in 0..n {
            for &p in &support {
                for &q in &support {
                    let b = qm.coeff(i, j, p, q);
                    if !b.is_zero() {
                        g[(i, j)] += &(b * &x[p]) * &x[q];
                    }
                }
            }
        }
    }
    g
}

/// Exact check result with the first failing index tuple, if any.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TensorCheck {
    pub ok: bool,
    pub witness: Option<[usize; 4]>,
}

impl TensorCheck {
    fn from_failures(mut failures: impl Iterator<Item = [usize; 4]>) -> Self {
        let witness = failures.next();
        TensorCheck { ok: witness.is_none(), witness }
    }
}

/// `(𝓑_{ip,βq} − 𝓑_{iβ,pq}) L^β_k = (𝓑_{βi,kq} − 𝓑_{ik,βq}) L^β_p` for all `(i, p, q, k)`.
pub fn check_nabla_l(qm: &QuadraticMetric, l: &RatMatrix) -> TensorCheck {
    let n = qm.dim();
    let l_col: Vec<Vec<(usize, &Rational)>> =
        (0..n).map(|k| (0..n).filter(|&b| !l[(b, k)].is_zero()).map(|b| (b, &l[(b, k)])).collect()).collect();
    let failures: Vec<[usize; 4]> = (0..n)
        .into_par_iter()
        .flat_map_iter(|i| {
            let l_col = &l_col;
            (0..n).flat_map(move |p| {
                (0..n).flat_map(move |q| {
                    (0..n).filter_map(move |k| {
                        let lhs = l_col[k].iter().fold(Rational::zero(), |acc, &(beta, lv)| {
                            acc + (qm.coeff(i, p, beta, q) - qm.coeff(i, beta, p, q)) * lv
                        });
                        let rhs = l_col[p].iter().fold(Rational::zero(), |acc, &(beta, lv)| {
                            acc + (qm.coeff(beta, i, k, q) - qm.coeff(i, k, beta, q)) * lv
                        });
                        (lhs != rhs).then_some([i, p, q, k])
                    })
                })
            })
        })
        .collect();
    TensorCheck::from_failures(failures.into_iter())
}

/// `∇L = 0` through lowered Christoffel symbols, which are linear in `x` for a
/// quadratic metric: `Γ_{s,am} L^m_j = L^t_s Γ_{t,aj}` coefficientwise in `x^q`.
/// Valid when `L` stays g(x)-symmetric, i.e. together with [`check_gsym`].
pub fn check_nabla_l_christoffel(qm: &QuadraticMetric, l: &RatMatrix) -> TensorCheck {
    let n = qm.dim();
    // coefficient of x^q in Γ_{s,am}
    let gamma = |s: usize, a: usize, m: usize, q: usize| -> Rational {
        &(qm.coeff(s, m, a, q) + qm.coeff(s, a, m, q)) - qm.coeff(a, m, s, q)
    };
    let failures: Vec<[usize; 4]> = (0..n)
        .into_par_iter()
        .flat_map_iter(|s| {
            (0..n).flat_map(move |a| {
                (0..n).flat_map(move |j| {
                    (0..n).filter_map(move |q| {
                        let lhs = (0..n)
                            .filter(|&m| !l[(m, j)].is_zero())
                            .fold(Rational::zero(), |acc, m| acc + gamma(s, a, m, q) * &l[(m, j)]);
                        let rhs = (0..n)
                            .filter(|&t| !l[(t, s)].is_zero())
                            .fold(Rational::zero(), |acc, t| acc + gamma(t, a, j, q) * &l[(t, s)]);
                        (lhs != rhs).then_some([s, a, j, q])
                    })
                })
            })
        })
        .collect();
    TensorCheck::from_failures(failures.into_iter())
}

/// `𝓑_{ij,pq} L^i_l = 𝓑_{il,pq} L^i_j` for all `(j, l, p, q)`.
pub fn check_gsym(qm: &QuadraticMetric, l: &RatMatrix) -> TensorCheck {
    let n = qm.dim();
    let failures = (0..n).flat_map(|j| {
        (0..n).flat_map(move |lo| {
            (0..n).flat_map(move |p| {
                (0..n).filter_map(move |q| {
                    let (mut lhs, mut rhs) = (Rational::zero(), Rational::zero());
                    for i in 0..n {
                        if !l[(i, lo)].is_zero() {
                            lhs += qm.coeff(i, j, p, q) * &l[(i, lo)];
                        }
                        if !l[(i, j)].is_zero() {
                            rhs += qm.coeff(i, lo, p, q) * &l[(i, j)];
                        }
                    }
                    (lhs != rhs).then_some([j, lo, p, q])
                })
            })
        })
    });
    TensorCheck::from_failures(failures)
}

/// Curvature at the origin from the closed formula
/// `R^i_{kαβ} = g^{is}(𝓑_{βs,αk} + 𝓑_{αk,βs} − 𝓑_{βk,αs} − 𝓑_{αs,βk})`,
/// stored as `R(e_α ∧ e_β)^i_k = R^i_{kαβ}`.
pub fn riemann_closed_form(qm: &QuadraticMetric) -> Result<CurvatureMap, RealizeError> {
    let n = qm.dim();
    let ginv = qm.g0.inverse().ok_or(RealizeError::SingularMetric)?;
    let wedge_value = |alpha: usize, beta: usize| -> RatMatrix {
        // lowered R_{s k αβ}
        let mut low = RatMatrix::zeros(n, n);
        for s in 0..n {
            for k in 0..n {
                low[(s, k)] = &(qm.coeff(beta, s, alpha, k) + qm.coeff(alpha, k, beta, s))
                    - &(qm.coeff(beta, k, alpha, s) + qm.coeff(alpha, s, beta, k));
            }
        }
        &ginv * &low
    };
    tabulate(qm, wedge_value)
}

/// Curvature at the origin from Christoffel derivatives, using only exact
/// evaluations of `g(x)`: second differences recover the Hessian of a
/// quadratic exactly, and `Γ(0) = 0` drops the `ΓΓ` terms.
#[allow(clippy::needless_range_loop)]
pub fn riemann_via_christoffel(qm: &QuadraticMetric) -> Result<CurvatureMap, RealizeError> {
    let n = qm.dim();
    let ginv = qm.g0.inverse().ok_or(RealizeError::SingularMetric)?;
    let point = |terms: &[(usize, i64)]| -> RatMatrix {
        let mut x = vec![Rational::zero(); n];
        for &(k, v) in terms {
            x[k] += int(v);
        }
        metric_value(qm, &x)
    };
    let g_zero = point(&[]);
    for a in 0..n {
        if point(&[(a, 1)]) != point(&[(a, -1)]) {
            // a linear term would make Γ(0) nonzero; quadratic metrics never have one
            return Err(RealizeError::Malformed("metric has a linear term".into()));
        }
    }
    // hessian[a][b] = ∂_a ∂_b g(0)
    let mut hessian = vec![vec![RatMatrix::zeros(n, n); n]; n];
    for a in 0..n {
        for b in a..n {
            let h = if a == b {
                &(&point(&[(a, 1)]) + &point(&[(a, -1)])) - &g_zero.scale(&int(2))
            } else {
                let plus = &point(&[(a, 1), (b, 1)]) + &point(&[(a, -1), (b, -1)]);
                let minus = &point(&[(a, 1), (b, -1)]) + &point(&[(a, -1), (b, 1)]);
                (&plus - &minus).scale(&rat(1, 4))
            };
            hessian[a][b] = h.clone();
            hessian[b][a] = h;
        }
    }
    let half = rat(1, 2);
    // ∂_a Γ^i_{bk}(0) = ½ g^{is} (∂_a∂_b g_{sk} + ∂_a∂_k g_{sb} − ∂_a∂_s g_{bk})
    let d_gamma = |a: usize, b: usize| -> RatMatrix {
        let mut low = RatMatrix::zeros(n, n);
        for s in 0..n {
            for k in 0..n {
                low[(s, k)] = &(&hessian[a][b][(s, k)] + &hessian[a][k][(s, b)]) - &hessian[a][s][(b, k)];
            }
        }
        (&ginv * &low).scale(&half)
    };
    tabulate(qm, |alpha, beta| &d_gamma(alpha, beta) - &d_gamma(beta, alpha))
}

fn tabulate<F>(qm: &QuadraticMetric, value: F) -> Result<CurvatureMap, RealizeError>
where
    F: Fn(usize, usize) -> RatMatrix + Sync,
{
    let n = qm.dim();
    let base = so_basis(&qm.g0)?;
    let values = base.tags().par_iter().map(|&(a, b)| value(a, b)).collect();
    Ok(CurvatureMap { base, values, g: qm.g0.clone(), l: RatMatrix::zeros(n, n) })
}

/// Curvature at the origin; both routes are computed and must agree exactly.
pub fn riemann_at_origin(qm: &QuadraticMetric) -> Result<CurvatureMap, RealizeError> {
    let closed = riemann_closed_form(qm)?;
    let derived = riemann_via_christoffel(qm)?;
    if let Some(k) = (0..closed.values.len()).find(|&k| closed.values[k] != derived.values[k]) {
        let (a, b) = closed.base.tags()[k];
        return Err(RealizeError::RouteMismatch(a, b));
    }
    Ok(closed)
}

/// The metric built for a pair: `B`, then `𝓑` lowered with the pair's `g`.
pub fn realize(pair: &CanonicalPair) -> (BTensor, QuadraticMetric) {
    let b = build_b(pair);
    let qm = lower_b(&b, &pair.g);
    (b, qm)
}

/// Per-stage outcome of [`verify_realization`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RealizationReport {
    pub b_terms: usize,
    pub symmetrization_noop: bool,
    pub nabla_l_ok: bool,
    pub nabla_l_christoffel_ok: bool,
    pub gsym_ok: bool,
    pub routes_agree: bool,
    pub matches_r_formal: bool,
    pub curvature_rank: usize,
}

impl RealizationReport {
    pub fn passed(&self) -> bool {
        self.nabla_l_ok && self.nabla_l_christoffel_ok && self.gsym_ok && self.routes_agree && self.matches_r_formal
    }
}

pub fn verify_realization(pair: &CanonicalPair) -> RealizationReport {
    let (b, qm) = realize(pair);
    verify_metric(pair, &b, &qm, &r_formal(pair))
}

/// Checks an already built metric against a precomputed `R_formal`.
pub fn verify_metric(
    pair: &CanonicalPair,
    b: &BTensor,
    qm: &QuadraticMetric,
    formal: &CurvatureMap,
) -> RealizationReport {
    let nabla = check_nabla_l(qm, &pair.l);
    let nabla_gamma = check_nabla_l_christoffel(qm, &pair.l);
    let gsym = check_gsym(qm, &pair.l);
    let (routes_agree, matches, rank) = match riemann_at_origin(qm) {
        Ok(r) => (true, r.values == formal.values, r.image_rank()),
        Err(_) => (false, false, 0),
    };
    RealizationReport {
        b_terms: b.contributions.iter().map(|c| c.terms.len()).sum(),
        symmetrization_noop: qm.symmetrization_noop,
        nabla_l_ok: nabla.ok,
        nabla_l_christoffel_ok: nabla_gamma.ok,
        gsym_ok: gsym.ok,
        routes_agree,
        matches_r_formal: matches,
        curvature_rank: rank,
    }
}

/// `g`-adjoint `A* = g⁻¹ Aᵀ g`.
pub fn g_adjoint(g: &RatMatrix, a: &RatMatrix) -> RatMatrix {
    let ginv = g.inverse().expect("nondegenerate g");
    &(&ginv * &a.transpose()) * g
}
