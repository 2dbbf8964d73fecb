//! Bivectors as g-skew operators, bases of `so(g)` and of the centralizer
//! `g_L = { X ∈ so(g) : XL = LX }`, and its splitting into the abelian pieces
//! `m_ij` supported on a pair of Jordan blocks.

use num::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::canonical::CanonicalPair;
use crate::error::AlgebraError;
use crate::exactla::{int, RatMatrix, RatVector, Rational};

/// Basis bivector `e_i ∧ e_j` with `i < j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct WedgeTag {
    pub i: usize,
    pub j: usize,
}

/// Linearly independent `n × n` matrices spanning a subspace of `gl(V)`.
///
/// `tags` is either empty or parallel to `elements`; its meaning depends on the
/// producer (wedge indices for `so(g)`, block indices for `m_ij`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubspaceBasis {
    n: usize,
    elements: Vec<RatMatrix>,
    tags: Vec<(usize, usize)>,
}

impl SubspaceBasis {
    pub fn new(n: usize, elements: Vec<RatMatrix>) -> Self {
        SubspaceBasis { n, elements, tags: Vec::new() }
    }

    pub fn with_tags(n: usize, elements: Vec<RatMatrix>, tags: Vec<(usize, usize)>) -> Self {
        assert_eq!(elements.len(), tags.len());
        SubspaceBasis { n, elements, tags }
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[RatMatrix] {
        &self.elements
    }

    pub fn tags(&self) -> &[(usize, usize)] {
        &self.tags
    }

    /// `n² × len` matrix whose columns are the vectorized elements.
    pub fn span_matrix(&self) -> RatMatrix {
        let columns: Vec<RatVector> = self.elements.iter().map(RatMatrix::to_vector).collect();
        RatMatrix::from_columns(self.n * self.n, &columns)
    }

    pub fn rank(&self) -> usize {
        span_rank(self.n, &self.elements)
    }

    pub fn contains(&self, x: &RatMatrix) -> bool {
        member_coords(x, self).is_some()
    }

    /// Concatenation; the caller is responsible for independence.
    pub fn union(&self, other: &SubspaceBasis) -> SubspaceBasis {
        assert_eq!(self.n, other.n);
        let mut elements = self.elements.clone();
        elements.extend(other.elements.iter().cloned());
        SubspaceBasis::new(self.n, elements)
    }

    /// JSON-friendly export, tags included when present.
    pub fn export(&self) -> Vec<BasisElementExport> {
        self.elements
            .iter()
            .enumerate()
            .map(|(k, m)| BasisElementExport { tag: self.tags.get(k).map(|&(i, j)| [i, j]), matrix: m.clone() })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisElementExport {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub tag: Option<[usize; 2]>,
    pub matrix: RatMatrix,
}

/// Rank of a family of equally sized matrices viewed as vectors.
pub fn span_rank(n: usize, elements: &[RatMatrix]) -> usize {
    if elements.is_empty() {
        return 0;
    }
    let rows: Vec<RatVector> = elements.iter().map(RatMatrix::to_vector).collect();
    RatMatrix::from_rows(rows).rank().min(n * n)
}

pub fn unit(n: usize, k: usize) -> RatVector {
    let mut v = vec![Rational::zero(); n];
    v[k] = Rational::one();
    v
}

/// `u ⊗ g(v) − v ⊗ g(u)`, a g-skew operator; `w ↦ u·g(v,w) − v·g(u,w)`.
pub fn wedge(u: &[Rational], v: &[Rational], g: &RatMatrix) -> RatMatrix {
    let gu = g.mul_vec(u);
    let gv = g.mul_vec(v);
    &RatMatrix::outer(u, &gv) - &RatMatrix::outer(v, &gu)
}

/// `gX + Xᵀg`; zero exactly when `X ∈ so(g)`.
pub fn skew_defect(g: &RatMatrix, x: &RatMatrix) -> RatMatrix {
    &(g * x) + &(&x.transpose() * g)
}

pub fn is_g_skew(g: &RatMatrix, x: &RatMatrix) -> bool {
    skew_defect(g, x).is_zero()
}

/// `{ wedge(e_i, e_j) : i < j }` in lexicographic order, tagged `(i, j)`.
pub fn so_basis(g: &RatMatrix) -> Result<SubspaceBasis, AlgebraError> {
    let n = g.rows();
    if !g.is_square() {
        return Err(AlgebraError::DimensionMismatch { expected: n, rows: g.rows(), cols: g.cols() });
    }
    if g.rank() < n {
        return Err(AlgebraError::DegenerateForm);
    }
    let mut elements = Vec::with_capacity(n * (n.saturating_sub(1)) / 2);
    let mut tags = Vec::with_capacity(elements.capacity());
    for i in 0..n {
        for j in i + 1..n {
            elements.push(wedge(&unit(n, i), &unit(n, j), g));
            tags.push((i, j));
        }
    }
    Ok(SubspaceBasis::with_tags(n, elements, tags))
}

/// Kernel of `X ↦ (gX + Xᵀg, XL − LX)` restricted to the entries in `support`.
fn centralizer_on_support(pair: &CanonicalPair, support: &[(usize, usize)]) -> Vec<RatMatrix> {
    let n = pair.dim();
    let (g, l) = (&pair.g, &pair.l);
    let mut system = RatMatrix::zeros(2 * n * n, support.len());
    for (k, &(r, c)) in support.iter().enumerate() {
        for a in 0..n {
            // gX: entry (a, c) gets g[a][r]; Xᵀg: entry (c, b) gets g[r][b]
            let ga = &g[(a, r)];
            if !ga.is_zero() {
                system[(a * n + c, k)] += ga;
            }
            let gb = &g[(r, a)];
            if !gb.is_zero() {
                system[(c * n + a, k)] += gb;
            }
            // XL: entry (r, b) gets L[c][b]; −LX: entry (a, c) gets −L[a][r]
            let lb = &l[(c, a)];
            if !lb.is_zero() {
                system[(n * n + r * n + a, k)] += lb;
            }
            let la = &l[(a, r)];
            if !la.is_zero() {
                system[(n * n + a * n + c, k)] -= la;
            }
        }
    }
    system
        .kernel_basis()
        .into_iter()
        .map(|v| {
            let mut x = RatMatrix::zeros(n, n);
            for (k, &(r, c)) in support.iter().enumerate() {
                x[(r, c)] = v[k].clone();
            }
            x
        })
        .collect()
}

/// Basis of `g_L` obtained by solving the linear system on all `n²` entries.
pub fn centralizer_basis(pair: &CanonicalPair) -> SubspaceBasis {
    let n = pair.dim();
    let support: Vec<(usize, usize)> = (0..n).flat_map(|r| (0..n).map(move |c| (r, c))).collect();
    SubspaceBasis::new(n, centralizer_on_support(pair, &support))
}

/// `Σ_e Σ_i (k_e − i) n_i` over eigenvalues, blocks sorted ascending, `i` from 1.
pub fn centralizer_dim_formula(pair: &CanonicalPair) -> usize {
    pair.layout
        .iter()
        .map(|e| {
            let k = e.blocks.len();
            e.blocks.iter().enumerate().map(|(idx, b)| (k - (idx + 1)) * b.size).sum::<usize>()
        })
        .sum()
}

fn check_block_pair(pair: &CanonicalPair, i: usize, j: usize) -> Result<(), AlgebraError> {
    let blocks = pair.blocks();
    if i >= j || j >= blocks.len() || blocks[i].eigen != blocks[j].eigen {
        return Err(AlgebraError::BlockIndex { i, j });
    }
    Ok(())
}

/// Basis of `m_ij`: centralizer elements supported on blocks `(i, j)` and `(j, i)`.
/// Indices are global block positions, see [`CanonicalPair::blocks`].
pub fn m_ij_basis(pair: &CanonicalPair, i: usize, j: usize) -> Result<SubspaceBasis, AlgebraError> {
    check_block_pair(pair, i, j)?;
    let blocks = pair.blocks();
    let (bi, bj) = (blocks[i], blocks[j]);
    let mut support = Vec::with_capacity(2 * bi.size * bj.size);
    for r in 0..bi.size {
        for c in 0..bj.size {
            support.push((bi.offset + r, bj.offset + c));
        }
    }
    for r in 0..bj.size {
        for c in 0..bi.size {
            support.push((bj.offset + r, bi.offset + c));
        }
    }
    let elements = centralizer_on_support(pair, &support);
    let tags = vec![(i, j); elements.len()];
    Ok(SubspaceBasis::with_tags(pair.dim(), elements, tags))
}

/// The explicit generators of `m_ij`: for `s = 1..=n_i` the `n_i × n_j` block
/// with `μ_s = 1` on the `(s−1)`-th superdiagonal of its right-aligned square part,
/// and the mirror block `−g_j M_ijᵀ g_i`.
pub fn m_ij_pattern(pair: &CanonicalPair, i: usize, j: usize) -> Result<SubspaceBasis, AlgebraError> {
    check_block_pair(pair, i, j)?;
    let blocks = pair.blocks();
    let (bi, bj) = (blocks[i], blocks[j]);
    let (ni, nj) = (bi.size, bj.size);
    let gi = pair.g.block(bi.offset, bi.offset, ni, ni);
    let gj = pair.g.block(bj.offset, bj.offset, nj, nj);
    let shift = nj.saturating_sub(ni);
    let generators = (0..ni.min(nj))
        .map(|s| {
            let mut m = RatMatrix::zeros(ni, nj);
            for r in 0..ni {
                let c = shift + r + s;
                if c < nj {
                    m[(r, c)] = int(1);
                }
            }
            let mirror = -&(&(&gj * &m.transpose()) * &gi);
            let mut x = RatMatrix::zeros(pair.dim(), pair.dim());
            x.set_block(bi.offset, bj.offset, &m);
            x.set_block(bj.offset, bi.offset, &mirror);
            x
        })
        .collect::<Vec<_>>();
    let tags = vec![(i, j); generators.len()];
    Ok(SubspaceBasis::with_tags(pair.dim(), generators, tags))
}

/// Coordinates of `x` in `basis`, or `None` if `x` is not in the span.
pub fn member_coords(x: &RatMatrix, basis: &SubspaceBasis) -> Option<Vec<Rational>> {
    assert_eq!((x.rows(), x.cols()), (basis.n, basis.n), "dimension mismatch");
    if basis.is_empty() {
        return x.is_zero().then(Vec::new);
    }
    basis.span_matrix().solve(&x.to_vector())
}

/// True when every entry of `x` linking two different eigenvalues vanishes.
pub fn cross_eigen_blocks_vanish(pair: &CanonicalPair, x: &RatMatrix) -> bool {
    let owner: Vec<usize> =
        pair.layout.iter().enumerate().flat_map(|(e, layout)| std::iter::repeat_n(e, layout.dim())).collect();
    x.nonzeros().all(|(r, c, _)| owner[r] == owner[c])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical::{build_canonical, PencilSpec};
    use crate::exactla::rat;

    fn pair(blocks: &[(usize, i64)]) -> CanonicalPair {
        build_canonical(&PencilSpec::nilpotent(blocks).unwrap())
    }

    #[test]
    fn wedge_examples() {
        let g = RatMatrix::from_i64_rows(&[&[0, 1], &[1, 0]]);
        let (e1, e2) = (unit(2, 0), unit(2, 1));
        assert!(wedge(&e1, &e1, &g).is_zero());
        assert_eq!(wedge(&e1, &e2, &g), RatMatrix::from_i64_rows(&[&[1, 0], &[0, -1]]));
        let u = vec![rat(1, 2), int(3)];
        let v = vec![int(-2), rat(5, 7)];
        let two_u: Vec<_> = u.iter().map(|x| x * int(2)).collect();
        assert_eq!(wedge(&two_u, &v, &g), wedge(&u, &v, &g).scale(&int(2)));
        assert!(is_g_skew(&g, &wedge(&u, &v, &g)));
    }

    #[test]
    fn so_basis_examples() {
        assert_eq!(so_basis(&RatMatrix::identity(2)).unwrap().len(), 1);
        let p = pair(&[(1, 1), (3, -1)]);
        let b = so_basis(&p.g).unwrap();
        assert_eq!(b.len(), 6);
        assert!(b.elements().iter().all(|x| is_g_skew(&p.g, x)));
        assert_eq!(b.rank(), 6);

        // Euclidean n = 3: spans all antisymmetric matrices
        let b = so_basis(&RatMatrix::identity(3)).unwrap();
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            let mut a = RatMatrix::zeros(3, 3);
            a[(i, j)] = int(1);
            a[(j, i)] = int(-1);
            assert!(b.contains(&a));
        }
        let mut sym = RatMatrix::zeros(3, 3);
        sym[(0, 1)] = int(1);
        sym[(1, 0)] = int(1);
        assert!(!b.contains(&sym));

        let degenerate = RatMatrix::from_i64_rows(&[&[1, 0], &[0, 0]]);
        assert_eq!(so_basis(&degenerate), Err(AlgebraError::DegenerateForm));
    }

    #[test]
    fn centralizer_examples() {
        for n in 1..=5 {
            assert!(centralizer_basis(&pair(&[(n, 1)])).is_empty());
        }
        let p = pair(&[(1, 1), (2, 1)]);
        let c = centralizer_basis(&p);
        assert_eq!(c.len(), 1);
        let mut z = RatMatrix::zeros(3, 3);
        z[(0, 2)] = int(1);
        z[(1, 0)] = int(-1);
        assert!(c.contains(&z));

        let p = pair(&[(1, 1), (2, -1), (3, 1)]);
        assert_eq!(centralizer_basis(&p).len(), 4);
        assert_eq!(centralizer_dim_formula(&p), 4);
    }

    #[test]
    fn m_ij_examples() {
        let p = pair(&[(1, 1), (2, 1)]);
        let m = m_ij_basis(&p, 0, 1).unwrap();
        assert_eq!(m.len(), 1);
        assert_eq!(m.rank(), span_rank(3, &[m.elements()[0].clone(), centralizer_basis(&p).elements()[0].clone()]));

        let p = pair(&[(2, 1), (2, -1)]);
        let m = m_ij_basis(&p, 0, 1).unwrap();
        assert_eq!(m.len(), 2);
        for a in m.elements() {
            for b in m.elements() {
                assert!(a.bracket(b).is_zero());
            }
        }
        assert_eq!(m_ij_basis(&p, 1, 0), Err(AlgebraError::BlockIndex { i: 1, j: 0 }));
        assert_eq!(m_ij_basis(&p, 0, 2), Err(AlgebraError::BlockIndex { i: 0, j: 2 }));
    }

    #[test]
    fn pattern_matches_kernel() {
        for blocks in
            [vec![(1, 1), (2, 1)], vec![(2, 1), (3, -1)], vec![(1, -1), (1, 1), (3, 1)], vec![(2, 1), (2, 1), (4, -1)]]
        {
            let p = pair(&blocks);
            for (i, j) in p.block_pairs() {
                let solved = m_ij_basis(&p, i, j).unwrap();
                let pattern = m_ij_pattern(&p, i, j).unwrap();
                assert_eq!(solved.len(), pattern.len());
                assert_eq!(solved.union(&pattern).rank(), solved.len(), "{blocks:?} ({i},{j})");
            }
        }
    }

    #[test]
    fn member_coords_examples() {
        let p = pair(&[(1, 1), (1, 1), (2, 1)]);
        let c = centralizer_basis(&p);
        let mut expected = vec![Rational::zero(); c.len()];
        expected[0] = Rational::one();
        assert_eq!(member_coords(&c.elements()[0], &c), Some(expected));
        assert_eq!(member_coords(&RatMatrix::zeros(4, 4), &c), Some(vec![Rational::zero(); c.len()]));
        assert_eq!(member_coords(&p.l, &c), None);
        let empty = SubspaceBasis::new(4, Vec::new());
        assert_eq!(member_coords(&p.l, &empty), None);
    }
}
