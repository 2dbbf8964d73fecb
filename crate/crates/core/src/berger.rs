//! The formal curvature tensor built from the minimal polynomial of `L`, its
//! blockwise variant, and the exact checks that certify `g_L` as a Berger
//! algebra: Bianchi identity, containment in `g_L`, and `Im R = g_L`.

use num::{Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::canonical::CanonicalPair;
use crate::error::AlgebraError;
use crate::exactla::{matrix_powers, minimal_polynomial, RatMatrix, Rational};
use crate::liealg::{centralizer_basis, is_g_skew, member_coords, so_basis, span_rank, SubspaceBasis, WedgeTag};

/// A linear map `so(g) → gl(V)` stored by its values on the wedge basis of `so(g)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurvatureMap {
    pub base: SubspaceBasis,
    pub values: Vec<RatMatrix>,
    pub g: RatMatrix,
    pub l: RatMatrix,
}

impl CurvatureMap {
    /// Evaluates `f` on every element of `so_basis(g)`.
    pub fn from_fn<F>(g: &RatMatrix, l: &RatMatrix, f: F) -> Result<Self, AlgebraError>
    where
        F: Fn(&RatMatrix) -> RatMatrix + Sync,
    {
        let base = so_basis(g)?;
        let values = base.elements().par_iter().map(&f).collect();
        Ok(CurvatureMap { base, values, g: g.clone(), l: l.clone() })
    }

    pub fn dim(&self) -> usize {
        self.g.rows()
    }

    /// `R(e_a ∧ e_b)` for any ordered pair of coordinate indices.
    pub fn on_wedge(&self, a: usize, b: usize) -> RatMatrix {
        let n = self.dim();
        if a == b {
            return RatMatrix::zeros(n, n);
        }
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let k = self.base.tags().iter().position(|&t| t == (lo, hi)).expect("wedge basis is complete");
        if a < b {
            self.values[k].clone()
        } else {
            -&self.values[k]
        }
    }

    /// Extends linearly to an arbitrary element of `so(g)`.
    pub fn apply(&self, x: &RatMatrix) -> Option<RatMatrix> {
        let coords = member_coords(x, &self.base)?;
        let n = self.dim();
        Some(coords.iter().zip(&self.values).fold(RatMatrix::zeros(n, n), |acc, (c, v)| {
            if c.is_zero() {
                acc
            } else {
                &acc + &v.scale(c)
            }
        }))
    }

    pub fn image_rank(&self) -> usize {
        span_rank(self.dim(), &self.values)
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(RatMatrix::is_zero)
    }
}

/// `d/dt|₀ p_min(L + tX) = Σ_m a_m Σ_{j<m} L^{m−1−j} X L^j`.
pub fn r_minpoly(pair: &CanonicalPair, x: &RatMatrix) -> RatMatrix {
    let p = minimal_polynomial(&pair.l);
    let degree = p.degree().unwrap_or(0);
    let powers = matrix_powers(&pair.l, degree);
    let n = pair.dim();
    let mut out = RatMatrix::zeros(n, n);
    for (m, a) in p.coeffs().iter().enumerate().skip(1) {
        if a.is_zero() {
            continue;
        }
        for j in 0..m {
            let term = &(&powers[m - 1 - j] * x) * &powers[j];
            out = &out + &term.scale(a);
        }
    }
    out
}

/// Block data shared by [`r_hat`] and the realization tensor: the nilpotent
/// Jordan blocks `L_i`, `L_j` and `n_ij = max(n_i, n_j)`.
#[derive(Clone, Debug)]
pub struct BlockPairData {
    pub i_offset: usize,
    pub i_size: usize,
    pub j_offset: usize,
    pub j_size: usize,
    pub li_powers: Vec<RatMatrix>,
    pub lj_powers: Vec<RatMatrix>,
}

impl BlockPairData {
    pub fn new(pair: &CanonicalPair, i: usize, j: usize) -> Result<Self, AlgebraError> {
        let blocks = pair.blocks();
        if i >= j || j >= blocks.len() || blocks[i].eigen != blocks[j].eigen {
            return Err(AlgebraError::BlockIndex { i, j });
        }
        let (bi, bj) = (blocks[i], blocks[j]);
        let nil = pair.nilpotent_part();
        let top = bi.size.max(bj.size);
        let li = nil.block(bi.offset, bi.offset, bi.size, bi.size);
        let lj = nil.block(bj.offset, bj.offset, bj.size, bj.size);
        Ok(BlockPairData {
            i_offset: bi.offset,
            i_size: bi.size,
            j_offset: bj.offset,
            j_size: bj.size,
            li_powers: matrix_powers(&li, top - 1),
            lj_powers: matrix_powers(&lj, top - 1),
        })
    }

    pub fn n_ij(&self) -> usize {
        self.i_size.max(self.j_size)
    }

    /// `R_ij(X_ij) = Σ_{s<n_ij} L_i^{n_ij−1−s} X_ij L_j^s` for an `n_i × n_j` block.
    pub fn r_block(&self, x_ij: &RatMatrix) -> RatMatrix {
        let top = self.n_ij();
        let mut out = RatMatrix::zeros(self.i_size, self.j_size);
        for s in 0..top {
            out = &out + &(&(&self.li_powers[top - 1 - s] * x_ij) * &self.lj_powers[s]);
        }
        out
    }

    /// Same sum for the mirrored `n_j × n_i` block.
    pub fn r_block_mirror(&self, x_ji: &RatMatrix) -> RatMatrix {
        let top = self.n_ij();
        let mut out = RatMatrix::zeros(self.j_size, self.i_size);
        for s in 0..top {
            out = &out + &(&(&self.lj_powers[top - 1 - s] * x_ji) * &self.li_powers[s]);
        }
        out
    }

    /// Embeds `L_i^a` (or `L_j^a`) into an `n × n` zero matrix.
    pub fn padded(&self, n: usize, on_i: bool, power: usize) -> RatMatrix {
        let (offset, m) =
            if on_i { (self.i_offset, &self.li_powers[power]) } else { (self.j_offset, &self.lj_powers[power]) };
        let mut out = RatMatrix::zeros(n, n);
        out.set_block(offset, offset, m);
        out
    }
}

/// `R̂_ij(X)`: acts on the `(i, j)` and `(j, i)` blocks of `X` only, using the
/// nilpotent part of `L`; every other block of the result is zero.
pub fn r_hat(pair: &CanonicalPair, i: usize, j: usize, x: &RatMatrix) -> Result<RatMatrix, AlgebraError> {
    let data = BlockPairData::new(pair, i, j)?;
    Ok(r_hat_with(&data, pair.dim(), x))
}

fn r_hat_with(data: &BlockPairData, n: usize, x: &RatMatrix) -> RatMatrix {
    let x_ij = x.block(data.i_offset, data.j_offset, data.i_size, data.j_size);
    let x_ji = x.block(data.j_offset, data.i_offset, data.j_size, data.i_size);
    let mut out = RatMatrix::zeros(n, n);
    out.set_block(data.i_offset, data.j_offset, &data.r_block(&x_ij));
    out.set_block(data.j_offset, data.i_offset, &data.r_block_mirror(&x_ji));
    out
}

/// `R_formal = Σ_{i<j} R̂_ij`, pairs taken inside each eigenvalue.
pub fn r_formal(pair: &CanonicalPair) -> CurvatureMap {
    let data: Vec<BlockPairData> = pair
        .block_pairs()
        .into_iter()
        .map(|(i, j)| BlockPairData::new(pair, i, j).expect("block_pairs yields valid pairs"))
        .collect();
    let n = pair.dim();
    CurvatureMap::from_fn(&pair.g, &pair.l, |x| {
        data.iter().fold(RatMatrix::zeros(n, n), |acc, d| &acc + &r_hat_with(d, n, x))
    })
    .expect("canonical g is nondegenerate")
}

/// `r_minpoly` tabulated on the wedge basis.
pub fn r_minpoly_map(pair: &CanonicalPair) -> CurvatureMap {
    CurvatureMap::from_fn(&pair.g, &pair.l, |x| r_minpoly(pair, x)).expect("canonical g is nondegenerate")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BianchiOutcome {
    pub ok: bool,
    /// Triple `(a, b, c)` with the largest cyclic-sum violation.
    pub witness: Option<[usize; 3]>,
    pub violating_triples: usize,
}

/// Exhaustive check of `R(u∧v)w + R(v∧w)u + R(w∧u)v = 0` on coordinate vectors.
/// The cyclic sum is alternating, so sorted distinct triples cover everything.
pub fn check_bianchi(r: &CurvatureMap) -> BianchiOutcome {
    let n = r.dim();
    let mut worst: Option<([usize; 3], Rational)> = None;
    let mut violating = 0;
    for a in 0..n {
        for b in a + 1..n {
            let rab = r.on_wedge(a, b);
            for c in b + 1..n {
                let rbc = r.on_wedge(b, c);
                let rca = r.on_wedge(c, a);
                let size = (0..n)
                    .map(|k| (&(&rab[(k, c)] + &rbc[(k, a)]) + &rca[(k, b)]).abs())
                    .max()
                    .unwrap_or_else(Rational::zero);
                if !size.is_zero() {
                    violating += 1;
                    if worst.as_ref().is_none_or(|(_, w)| size > *w) {
                        worst = Some(([a, b, c], size));
                    }
                }
            }
        }
    }
    BianchiOutcome { ok: violating == 0, witness: worst.map(|(t, _)| t), violating_triples: violating }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SectionalOutcome {
    pub ok: bool,
    pub commutes_with_l: bool,
    pub g_skew: bool,
    pub first_failure: Option<WedgeTag>,
}

/// `[R(X), L] = 0` and `R(X) ∈ so(g)` on every basis element.
pub fn check_sectional(r: &CurvatureMap) -> SectionalOutcome {
    let mut commutes = true;
    let mut skew = true;
    let mut first_failure = None;
    for (k, v) in r.values.iter().enumerate() {
        let c = v.bracket(&r.l).is_zero();
        let s = is_g_skew(&r.g, v);
        if (!c || !s) && first_failure.is_none() {
            let (i, j) = r.base.tags()[k];
            first_failure = Some(WedgeTag { i, j });
        }
        commutes &= c;
        skew &= s;
    }
    SectionalOutcome { ok: commutes && skew, commutes_with_l: commutes, g_skew: skew, first_failure }
}

/// Exact evidence that `Im R_formal = g_L`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BergerCertificate {
    #[serde(rename = "dim_gL")]
    pub dim_gl: usize,
    pub image_rank: usize,
    pub bianchi_ok: bool,
    pub containment_ok: bool,
    pub witnesses: Vec<[usize; 2]>,
}

impl BergerCertificate {
    pub fn passed(&self) -> bool {
        self.bianchi_ok && self.containment_ok && self.image_rank == self.dim_gl
    }
}

/// Wedges, in lexicographic order, whose images raise the span rank.
pub fn greedy_witnesses(r: &CurvatureMap) -> Vec<[usize; 2]> {
    let n = r.dim();
    let mut chosen: Vec<RatMatrix> = Vec::new();
    let mut tags = Vec::new();
    let mut rank = 0;
    for (k, v) in r.values.iter().enumerate() {
        if v.is_zero() {
            continue;
        }
        chosen.push(v.clone());
        let next = span_rank(n, &chosen);
        if next > rank {
            rank = next;
            let (i, j) = r.base.tags()[k];
            tags.push([i, j]);
        } else {
            chosen.pop();
        }
    }
    tags
}

pub fn berger_certificate(pair: &CanonicalPair) -> BergerCertificate {
    let r = r_formal(pair);
    certificate_for(pair, &r, &centralizer_basis(pair))
}

/// Certificate for an already computed map and centralizer basis.
pub fn certificate_for(pair: &CanonicalPair, r: &CurvatureMap, gl_basis: &SubspaceBasis) -> BergerCertificate {
    let bianchi = check_bianchi(r);
    let sectional = check_sectional(r);
    let in_span = r.values.iter().all(|v| gl_basis.contains(v));
    let witnesses = greedy_witnesses(r);
    debug_assert_eq!(pair.dim(), r.dim());
    BergerCertificate {
        dim_gl: gl_basis.len(),
        image_rank: witnesses.len(),
        bianchi_ok: bianchi.ok,
        containment_ok: sectional.ok && in_span,
        witnesses,
    }
}

/// The `μ_s` parameters predicted for a two-block `R_12(X_12)` with `X_12` of
/// size `m × n`, `m ≤ n`: `μ_s = Σ_{d=1}^{s} x_{m−s+d, d}` (1-based).
pub fn predicted_mu(x12: &RatMatrix) -> Vec<Rational> {
    let m = x12.rows();
    (1..=m).map(|s| (1..=s).fold(Rational::zero(), |acc, d| acc + &x12[(m - s + d - 1, d - 1)])).collect()
}

/// Upper-Toeplitz `m × n` block with the given `μ` on its right-aligned square part.
pub fn toeplitz_block(m: usize, n: usize, mu: &[Rational]) -> RatMatrix {
    let shift = n - m;
    let mut out = RatMatrix::zeros(m, n);
    for r in 0..m {
        for (s, value) in mu.iter().enumerate() {
            let c = shift + r + s;
            if c < n {
                out[(r, c)] = value.clone();
            }
        }
    }
    out
}
