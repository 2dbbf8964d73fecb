//! Canonical matrices `(g, L)` for a g-symmetric operator given by its
//! Jordan data: per real eigenvalue a list of Jordan block sizes, each with the
//! sign in front of its antidiagonal block of `g`.

use std::collections::BTreeMap;
use std::fmt;

use num::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{AlgebraError, SpecError};
use crate::exactla::{format_rational, int, parse_rational, RatMatrix, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn from_i64(v: i64) -> Result<Self, SpecError> {
        match v {
            1 => Ok(Sign::Plus),
            -1 => Ok(Sign::Minus),
            other => Err(SpecError::BadSign(other)),
        }
    }

    pub fn as_i64(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BlockSpec {
    pub size: usize,
    pub sign: Sign,
}

impl BlockSpec {
    pub fn new(size: usize, sign: Sign) -> Self {
        BlockSpec { size, sign }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EigenSpec {
    lambda: Rational,
    blocks: Vec<BlockSpec>,
}

impl EigenSpec {
    /// Blocks are reordered by size, `+` before `-` on ties.
    pub fn new(lambda: Rational, mut blocks: Vec<BlockSpec>) -> Result<Self, SpecError> {
        if blocks.is_empty() {
            return Err(SpecError::NoBlocks(format_rational(&lambda)));
        }
        if blocks.iter().any(|b| b.size == 0) {
            return Err(SpecError::ZeroBlockSize);
        }
        blocks.sort();
        Ok(EigenSpec { lambda, blocks })
    }

    pub fn lambda(&self) -> &Rational {
        &self.lambda
    }

    pub fn blocks(&self) -> &[BlockSpec] {
        &self.blocks
    }

    pub fn dim(&self) -> usize {
        self.blocks.iter().map(|b| b.size).sum()
    }
}

/// Jordan data for `L`: distinct real eigenvalues, each with its blocks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PencilSpec {
    eigens: Vec<EigenSpec>,
}

impl PencilSpec {
    pub fn new(eigens: Vec<EigenSpec>) -> Result<Self, SpecError> {
        if eigens.is_empty() {
            return Err(SpecError::NoEigenvalues);
        }
        for (k, e) in eigens.iter().enumerate() {
            if eigens[..k].iter().any(|o| o.lambda == e.lambda) {
                return Err(SpecError::DuplicateEigenvalue(format_rational(&e.lambda)));
            }
        }
        Ok(PencilSpec { eigens })
    }

    /// Single nilpotent eigenvalue with the given blocks.
    pub fn nilpotent(blocks: &[(usize, i64)]) -> Result<Self, SpecError> {
        let blocks = blocks
            .iter()
            .map(|&(size, sign)| Ok(BlockSpec::new(size, Sign::from_i64(sign)?)))
            .collect::<Result<Vec<_>, SpecError>>()?;
        PencilSpec::new(vec![EigenSpec::new(Rational::zero(), blocks)?])
    }

    pub fn eigens(&self) -> &[EigenSpec] {
        &self.eigens
    }

    pub fn dim(&self) -> usize {
        self.eigens.iter().map(EigenSpec::dim).sum()
    }

    pub fn from_json(text: &str) -> Result<Self, SpecError> {
        let file: SpecFile = serde_json::from_str(text).map_err(|e| SpecError::Json(e.to_string()))?;
        file.try_into()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&SpecFile::from(self)).expect("spec serializes")
    }
}

/// On-disk JSON shape of a [`PencilSpec`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    pub eigenvalues: Vec<EigenFile>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EigenFile {
    pub lambda: String,
    pub blocks: Vec<BlockFile>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockFile {
    pub size: usize,
    pub sign: i64,
}

impl TryFrom<SpecFile> for PencilSpec {
    type Error = SpecError;

    fn try_from(file: SpecFile) -> Result<Self, SpecError> {
        let eigens = file
            .eigenvalues
            .into_iter()
            .map(|e| {
                if e.lambda.contains(['i', 'I', 'j']) {
                    return Err(SpecError::ComplexBlock(e.lambda));
                }
                let lambda = parse_rational(&e.lambda)?;
                let blocks = e
                    .blocks
                    .iter()
                    .map(|b| Ok(BlockSpec::new(b.size, Sign::from_i64(b.sign)?)))
                    .collect::<Result<Vec<_>, SpecError>>()?;
                EigenSpec::new(lambda, blocks)
            })
            .collect::<Result<Vec<_>, _>>()?;
        PencilSpec::new(eigens)
    }
}

impl From<&PencilSpec> for SpecFile {
    fn from(spec: &PencilSpec) -> Self {
        SpecFile {
            eigenvalues: spec
                .eigens
                .iter()
                .map(|e| EigenFile {
                    lambda: format_rational(&e.lambda),
                    blocks: e.blocks.iter().map(|b| BlockFile { size: b.size, sign: b.sign.as_i64() }).collect(),
                })
                .collect(),
        }
    }
}

impl fmt::Display for PencilSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .eigens
            .iter()
            .map(|e| {
                let blocks: Vec<String> =
                    e.blocks.iter().map(|b| format!("({},{})", b.size, b.sign.symbol())).collect();
                format!("{}:[{}]", format_rational(&e.lambda), blocks.join(","))
            })
            .collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockLayout {
    pub offset: usize,
    pub size: usize,
    pub sign: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EigenLayout {
    #[serde(with = "crate::exactla::rational_string")]
    pub lambda: Rational,
    pub blocks: Vec<BlockLayout>,
}

impl EigenLayout {
    pub fn offset(&self) -> usize {
        self.blocks.first().map_or(0, |b| b.offset)
    }

    pub fn dim(&self) -> usize {
        self.blocks.iter().map(|b| b.size).sum()
    }
}

/// Matrices `(g, L)` in the canonical basis together with the block layout.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalPair {
    pub g: RatMatrix,
    pub l: RatMatrix,
    pub layout: Vec<EigenLayout>,
}

/// A Jordan block located in the global index range, tagged with its eigenvalue.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LocatedBlock {
    pub eigen: usize,
    pub offset: usize,
    pub size: usize,
    pub sign: i64,
}

impl CanonicalPair {
    pub fn dim(&self) -> usize {
        self.g.rows()
    }

    /// All blocks in layout order; the position in this list is the global block index.
    pub fn blocks(&self) -> Vec<LocatedBlock> {
        self.layout
            .iter()
            .enumerate()
            .flat_map(|(eigen, e)| {
                e.blocks.iter().map(move |b| LocatedBlock { eigen, offset: b.offset, size: b.size, sign: b.sign })
            })
            .collect()
    }

    /// Global block index pairs `(i, j)`, `i < j`, lying in the same eigenvalue.
    pub fn block_pairs(&self) -> Vec<(usize, usize)> {
        let blocks = self.blocks();
        let mut pairs = Vec::new();
        for i in 0..blocks.len() {
            for j in i + 1..blocks.len() {
                if blocks[i].eigen == blocks[j].eigen {
                    pairs.push((i, j));
                }
            }
        }
        pairs
    }

    /// `L` with each eigenvalue subtracted on its own index range; nilpotent.
    pub fn nilpotent_part(&self) -> RatMatrix {
        let mut shifted = self.l.clone();
        for e in &self.layout {
            let start = e.offset();
            for k in start..start + e.dim() {
                shifted[(k, k)] -= &e.lambda;
            }
        }
        shifted
    }

    /// `(g, L)` restricted to one eigenvalue's index range.
    pub fn restrict(&self, eigen: usize) -> CanonicalPair {
        let e = &self.layout[eigen];
        let (start, dim) = (e.offset(), e.dim());
        CanonicalPair {
            g: self.g.block(start, start, dim, dim),
            l: self.l.block(start, start, dim, dim),
            layout: vec![EigenLayout {
                lambda: e.lambda.clone(),
                blocks: e.blocks.iter().map(|b| BlockLayout { offset: b.offset - start, ..b.clone() }).collect(),
            }],
        }
    }
}

fn jordan_block(size: usize, lambda: &Rational) -> RatMatrix {
    let mut m = RatMatrix::identity(size).scale(lambda);
    for k in 0..size - 1 {
        m[(k, k + 1)] = Rational::one();
    }
    m
}

fn antidiagonal(size: usize, sign: i64) -> RatMatrix {
    let mut m = RatMatrix::zeros(size, size);
    for k in 0..size {
        m[(k, size - 1 - k)] = int(sign);
    }
    m
}

/// Assembles the block-diagonal canonical pair: per block `λI + shift` and
/// `±antidiag(1, …, 1)`, concatenated over all eigenvalues in spec order.
pub fn build_canonical(spec: &PencilSpec) -> CanonicalPair {
    let mut g_parts = Vec::new();
    let mut l_parts = Vec::new();
    let mut layout = Vec::new();
    let mut offset = 0;
    for e in spec.eigens() {
        let mut blocks = Vec::new();
        for b in e.blocks() {
            g_parts.push(antidiagonal(b.size, b.sign.as_i64()));
            l_parts.push(jordan_block(b.size, e.lambda()));
            blocks.push(BlockLayout { offset, size: b.size, sign: b.sign.as_i64() });
            offset += b.size;
        }
        layout.push(EigenLayout { lambda: e.lambda().clone(), blocks });
    }
    CanonicalPair { g: RatMatrix::direct_sum(&g_parts), l: RatMatrix::direct_sum(&l_parts), layout }
}

/// Outcome of [`validate_pair`]; each flag is one of the defining conditions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairValidation {
    pub g_symmetric: bool,
    pub g_nondegenerate: bool,
    pub l_g_symmetric: bool,
}

impl PairValidation {
    pub fn passed(&self) -> bool {
        self.g_symmetric && self.g_nondegenerate && self.l_g_symmetric
    }

    pub fn failures(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if !self.g_symmetric {
            out.push("g is not symmetric");
        }
        if !self.g_nondegenerate {
            out.push("g is degenerate");
        }
        if !self.l_g_symmetric {
            out.push("gL is not symmetric");
        }
        out
    }
}

fn check_square(m: &RatMatrix, n: usize) -> Result<(), AlgebraError> {
    if m.rows() != n || m.cols() != n {
        return Err(AlgebraError::DimensionMismatch { expected: n, rows: m.rows(), cols: m.cols() });
    }
    Ok(())
}

pub fn validate_pair(g: &RatMatrix, l: &RatMatrix) -> Result<PairValidation, AlgebraError> {
    let n = g.rows();
    check_square(g, n)?;
    check_square(l, n)?;
    let gl = g * l;
    Ok(PairValidation {
        g_symmetric: g.transpose() == *g,
        g_nondegenerate: g.rank() == n,
        l_g_symmetric: gl.transpose() == gl,
    })
}

/// Replaces `L` by `L - λI` for a pair carrying a single eigenvalue.
pub fn shift_to_nilpotent(pair: &CanonicalPair) -> Result<CanonicalPair, AlgebraError> {
    if pair.layout.len() != 1 {
        return Err(AlgebraError::MultipleEigenvalues(pair.layout.len()));
    }
    let mut shifted = pair.clone();
    shifted.l = pair.nilpotent_part();
    shifted.layout[0].lambda = Rational::zero();
    Ok(shifted)
}

/// One restricted pair per eigenvalue, in layout order.
pub fn eigen_split(pair: &CanonicalPair) -> Vec<CanonicalPair> {
    (0..pair.layout.len()).map(|k| pair.restrict(k)).collect()
}

/// Inverse of [`eigen_split`]: block-diagonal direct sum with offsets restored.
pub fn reassemble(parts: &[CanonicalPair]) -> CanonicalPair {
    let g = RatMatrix::direct_sum(&parts.iter().map(|p| p.g.clone()).collect::<Vec<_>>());
    let l = RatMatrix::direct_sum(&parts.iter().map(|p| p.l.clone()).collect::<Vec<_>>());
    let mut layout = Vec::new();
    let mut base = 0;
    for p in parts {
        for e in &p.layout {
            layout.push(EigenLayout {
                lambda: e.lambda.clone(),
                blocks: e.blocks.iter().map(|b| BlockLayout { offset: b.offset + base, ..b.clone() }).collect(),
            });
        }
        base += p.dim();
    }
    CanonicalPair { g, l, layout }
}

/// A named member of the nilpotent corpus.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorpusEntry {
    pub name: String,
    pub spec: PencilSpec,
}

/// Nondecreasing integer partitions of `n`.
pub fn partitions(n: usize) -> Vec<Vec<usize>> {
    fn rec(remaining: usize, min: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if remaining == 0 {
            out.push(prefix.clone());
            return;
        }
        for part in min..=remaining {
            prefix.push(part);
            rec(remaining - part, part, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n > 0 {
        rec(n, 1, &mut Vec::new(), &mut out);
    }
    out
}

fn sign_string(signs: &[Sign]) -> String {
    signs.iter().map(|s| s.symbol()).collect()
}

/// Sign patterns for a sorted partition, canonical within equal sizes
/// (`+` first) and deduplicated up to a global sign flip.
pub fn sign_classes(partition: &[usize]) -> Vec<Vec<Sign>> {
    // Group sizes: (size, multiplicity) in order.
    let mut groups: Vec<(usize, usize)> = Vec::new();
    for &s in partition {
        match groups.last_mut() {
            Some((size, count)) if *size == s => *count += 1,
            _ => groups.push((s, 1)),
        }
    }
    let mut patterns: Vec<Vec<usize>> = vec![Vec::new()];
    for &(_, count) in &groups {
        patterns = patterns
            .into_iter()
            .flat_map(|p| {
                (0..=count).map(move |minus| {
                    let mut q = p.clone();
                    q.push(minus);
                    q
                })
            })
            .collect();
    }
    let expand = |minus_counts: &[usize]| -> Vec<Sign> {
        groups
            .iter()
            .zip(minus_counts)
            .flat_map(|(&(_, count), &minus)| {
                std::iter::repeat_n(Sign::Plus, count - minus).chain(std::iter::repeat_n(Sign::Minus, minus))
            })
            .collect()
    };
    let mut out = Vec::new();
    for minus_counts in patterns {
        let flipped: Vec<usize> = groups.iter().zip(&minus_counts).map(|(&(_, c), &m)| c - m).collect();
        let signs = expand(&minus_counts);
        if sign_string(&signs) <= sign_string(&expand(&flipped)) {
            out.push(signs);
        }
    }
    out
}

/// Every single-eigenvalue nilpotent spec with `min_n <= n <= max_n`.
pub fn nilpotent_corpus(min_n: usize, max_n: usize) -> Vec<CorpusEntry> {
    let mut out = Vec::new();
    for n in min_n.max(1)..=max_n {
        for partition in partitions(n) {
            for signs in sign_classes(&partition) {
                let blocks = partition.iter().zip(&signs).map(|(&size, &sign)| BlockSpec::new(size, sign)).collect();
                let spec = PencilSpec::new(vec![EigenSpec::new(Rational::zero(), blocks).expect("valid blocks")])
                    .expect("single eigenvalue");
                let part: String = partition.iter().map(ToString::to_string).collect();
                out.push(CorpusEntry { name: format!("n{n}_p{part}_s{}", sign_string(&signs)), spec });
            }
        }
    }
    out
}

/// Counts of corpus entries per dimension, handy for summaries.
pub fn corpus_histogram(entries: &[CorpusEntry]) -> BTreeMap<usize, usize> {
    let mut hist = BTreeMap::new();
    for e in entries {
        *hist.entry(e.spec.dim()).or_default() += 1;
    }
    hist
}
