//! The six almost-Clifford structure tensors on `R^{8n}`.
//!
//! Coordinates are grouped into eight blocks of `n`: block `b` holds
//! `x_{bn+1} .. x_{bn+n}` (zero-based indices `b*n .. b*n + n`). Every
//! structure maps each block onto another block with a sign and keeps the
//! intra-block index, so it is stored exactly as a signed permutation of the
//! eight blocks. Dense `8n × 8n` matrices are only built on request.

use std::fmt;

use thiserror::Error;

use crate::linalg::Matrix;

/// Number of coordinate blocks.
pub const BLOCKS: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructureError {
    #[error("structure id {0} is out of range (expected 1..=6)")]
    InvalidId(i64),
    #[error("vector length {0} is not a positive multiple of 8")]
    BadLength(usize),
    #[error("block targets {0:?} are not a permutation of 0..8")]
    NotBijective([u8; BLOCKS]),
    #[error("block {block} has sign {sign}, expected +1 or -1")]
    BadSign { block: usize, sign: i8 },
}

/// Selects one of `J1..J6`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StructureId(u8);

impl StructureId {
    pub fn new(k: i64) -> Result<Self, StructureError> {
        if (1..=6).contains(&k) {
            Ok(Self(k as u8))
        } else {
            Err(StructureError::InvalidId(k))
        }
    }

    pub fn get(self) -> u8 {
        self.0
    }

    pub fn all() -> impl Iterator<Item = StructureId> {
        (1..=6u8).map(StructureId)
    }
}

impl TryFrom<i64> for StructureId {
    type Error = StructureError;

    fn try_from(k: i64) -> Result<Self, Self::Error> {
        Self::new(k)
    }
}

impl fmt::Display for StructureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "J{}", self.0)
    }
}

/// `J e_(b,i) = sign[b] · e_(target[b], i)` for every block `b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SignedBlockPermutation {
    target: [u8; BLOCKS],
    sign: [i8; BLOCKS],
}

// (target, sign) per block, read row by row off the basis-action tables.
const TABLES: [[(u8, i8); BLOCKS]; 6] = [
    // J1
    [(1, 1), (0, -1), (4, 1), (5, 1), (2, -1), (3, -1), (7, 1), (6, -1)],
    // J2
    [(2, 1), (4, -1), (0, -1), (6, 1), (1, 1), (7, -1), (3, -1), (5, 1)],
    // J3
    [(3, 1), (5, -1), (6, -1), (0, -1), (7, 1), (1, 1), (2, 1), (4, -1)],
    // J4
    [(4, 1), (2, -1), (1, 1), (7, -1), (0, -1), (6, 1), (5, -1), (3, 1)],
    // J5
    [(5, 1), (3, -1), (7, -1), (1, 1), (6, 1), (0, -1), (4, -1), (2, 1)],
    // J6
    [(6, 1), (7, -1), (3, -1), (2, 1), (5, 1), (4, -1), (0, -1), (1, 1)],
];

impl SignedBlockPermutation {
    /// Validated constructor: `target` must be a permutation and every sign ±1.
    pub fn new(target: [u8; BLOCKS], sign: [i8; BLOCKS]) -> Result<Self, StructureError> {
        for (block, &s) in sign.iter().enumerate() {
            if s != 1 && s != -1 {
                return Err(StructureError::BadSign { block, sign: s });
            }
        }
        let p = Self { target, sign };
        if !p.is_bijection() {
            return Err(StructureError::NotBijective(target));
        }
        Ok(p)
    }

    /// Skips the bijection check. Only useful for exercising the verifiers
    /// on malformed tables; targets must still be `< 8`.
    pub fn from_raw_unchecked(target: [u8; BLOCKS], sign: [i8; BLOCKS]) -> Self {
        assert!(target.iter().all(|&t| (t as usize) < BLOCKS));
        Self { target, sign }
    }

    pub fn identity() -> Self {
        Self {
            target: [0, 1, 2, 3, 4, 5, 6, 7],
            sign: [1; BLOCKS],
        }
    }

    pub fn negated_identity() -> Self {
        Self::identity().negate()
    }

    pub fn builtin(id: StructureId) -> Self {
        let table = &TABLES[id.get() as usize - 1];
        let mut target = [0u8; BLOCKS];
        let mut sign = [0i8; BLOCKS];
        for (b, &(t, s)) in table.iter().enumerate() {
            target[b] = t;
            sign[b] = s;
        }
        Self { target, sign }
    }

    pub fn target(&self, block: usize) -> usize {
        self.target[block] as usize
    }

    pub fn sign(&self, block: usize) -> i8 {
        self.sign[block]
    }

    pub fn targets(&self) -> [u8; BLOCKS] {
        self.target
    }

    pub fn signs(&self) -> [i8; BLOCKS] {
        self.sign
    }

    /// `(sign, target block)` of the image of block `b`.
    pub fn act_on_block(&self, block: usize) -> (i8, usize) {
        (self.sign[block], self.target[block] as usize)
    }

    /// Image of coordinate `a` for block size `n`: `J e_a = s · e_{σ(a)}`.
    pub fn coordinate_image(&self, a: usize, n: usize) -> (usize, f64) {
        let (b, i) = (a / n, a % n);
        (self.target[b] as usize * n + i, f64::from(self.sign[b]))
    }

    pub fn is_bijection(&self) -> bool {
        let mut seen = [false; BLOCKS];
        for &t in &self.target {
            if seen[t as usize] {
                return false;
            }
            seen[t as usize] = true;
        }
        true
    }

    pub fn negate(&self) -> Self {
        let mut sign = self.sign;
        sign.iter_mut().for_each(|s| *s = -*s);
        Self {
            target: self.target,
            sign,
        }
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Self) -> Self {
        let mut target = [0u8; BLOCKS];
        let mut sign = [0i8; BLOCKS];
        for b in 0..BLOCKS {
            let mid = other.target[b] as usize;
            target[b] = self.target[mid];
            sign[b] = other.sign[b] * self.sign[mid];
        }
        Self { target, sign }
    }

    /// The transpose, which is also the inverse for a valid permutation.
    pub fn transpose(&self) -> Self {
        let mut target = [0u8; BLOCKS];
        let mut sign = [0i8; BLOCKS];
        for b in 0..BLOCKS {
            let t = self.target[b] as usize;
            target[t] = b as u8;
            sign[t] = self.sign[b];
        }
        Self { target, sign }
    }

    /// `J v`. Only relocates entries and flips signs, so the result is exact.
    pub fn apply(&self, v: &[f64]) -> Result<Vec<f64>, StructureError> {
        let n = block_size(v.len())?;
        let mut out = vec![0.0; v.len()];
        self.apply_into(v, n, &mut out);
        Ok(out)
    }

    pub(crate) fn apply_into(&self, v: &[f64], n: usize, out: &mut [f64]) {
        for b in 0..BLOCKS {
            let src = &v[b * n..(b + 1) * n];
            let t = self.target[b] as usize;
            let dst = &mut out[t * n..(t + 1) * n];
            if self.sign[b] > 0 {
                dst.copy_from_slice(src);
            } else {
                dst.iter_mut().zip(src).for_each(|(d, s)| *d = -s);
            }
        }
    }

    /// `Jᵀ v`: `(Jᵀv)_a = s(a) · v_{σ(a)}`.
    pub fn apply_transpose(&self, v: &[f64]) -> Result<Vec<f64>, StructureError> {
        let n = block_size(v.len())?;
        let mut out = vec![0.0; v.len()];
        for b in 0..BLOCKS {
            let t = self.target[b] as usize;
            let src = &v[t * n..(t + 1) * n];
            let dst = &mut out[b * n..(b + 1) * n];
            let s = f64::from(self.sign[b]);
            dst.iter_mut().zip(src).for_each(|(d, x)| *d = s * x);
        }
        Ok(out)
    }

    /// Dense `8n × 8n` matrix with `M[target(a)][a] = sign`.
    pub fn to_dense(&self, n: usize) -> Matrix {
        let mut m = Matrix::zeros(BLOCKS * n);
        for a in 0..BLOCKS * n {
            let (r, s) = self.coordinate_image(a, n);
            m[(r, a)] += s;
        }
        m
    }

    /// `JᵀJ` at block level, in exact integer arithmetic.
    pub fn gram(&self) -> [[i32; BLOCKS]; BLOCKS] {
        let mut g = [[0i32; BLOCKS]; BLOCKS];
        for (b, row) in g.iter_mut().enumerate() {
            for (c, entry) in row.iter_mut().enumerate() {
                if self.target[b] == self.target[c] {
                    *entry = i32::from(self.sign[b]) * i32::from(self.sign[c]);
                }
            }
        }
        g
    }
}

impl fmt::Display for SignedBlockPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in 0..BLOCKS {
            if b > 0 {
                f.write_str(" ")?;
            }
            let s = if self.sign[b] > 0 { '+' } else { '-' };
            write!(f, "{b}->{s}{}", self.target[b])?;
        }
        Ok(())
    }
}

/// Block size `n` for a vector of length `8n`.
pub fn block_size(len: usize) -> Result<usize, StructureError> {
    if len == 0 || !len.is_multiple_of(BLOCKS) {
        Err(StructureError::BadLength(len))
    } else {
        Ok(len / BLOCKS)
    }
}

pub fn builtin_structure(id: StructureId) -> SignedBlockPermutation {
    SignedBlockPermutation::builtin(id)
}

pub fn apply(j: &SignedBlockPermutation, v: &[f64]) -> Result<Vec<f64>, StructureError> {
    j.apply(v)
}

pub fn compose(a: &SignedBlockPermutation, b: &SignedBlockPermutation) -> SignedBlockPermutation {
    a.compose(b)
}

/// How a product `J_a ∘ J_b` relates to the named elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProductClass {
    /// `sign · Id`.
    Identity(i8),
    /// `sign · J_k`.
    Structure(i8, StructureId),
    /// None of `±Id`, `±J1..±J6`.
    Other,
}

impl ProductClass {
    pub fn classify(p: &SignedBlockPermutation) -> Self {
        if *p == SignedBlockPermutation::identity() {
            return Self::Identity(1);
        }
        if *p == SignedBlockPermutation::negated_identity() {
            return Self::Identity(-1);
        }
        for id in StructureId::all() {
            let j = SignedBlockPermutation::builtin(id);
            if *p == j {
                return Self::Structure(1, id);
            }
            if *p == j.negate() {
                return Self::Structure(-1, id);
            }
        }
        Self::Other
    }
}

impl fmt::Display for ProductClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = |s: i8| if s > 0 { "+" } else { "-" };
        match self {
            Self::Identity(s) => write!(f, "{}Id", sign(*s)),
            Self::Structure(s, id) => write!(f, "{}{id}", sign(*s)),
            Self::Other => f.write_str("not +-Id, not +-J1..J6"),
        }
    }
}

/// All 36 products `J_a ∘ J_b`.
#[derive(Debug, Clone)]
pub struct CompositionTable {
    entries: [[SignedBlockPermutation; 6]; 6],
}

impl CompositionTable {
    pub fn get(&self, a: StructureId, b: StructureId) -> &SignedBlockPermutation {
        &self.entries[a.get() as usize - 1][b.get() as usize - 1]
    }

    pub fn iter(&self) -> impl Iterator<Item = (StructureId, StructureId, &SignedBlockPermutation)> {
        StructureId::all()
            .flat_map(|a| StructureId::all().map(move |b| (a, b)))
            .map(|(a, b)| (a, b, self.get(a, b)))
    }

    /// Every entry is a valid signed block permutation.
    pub fn is_closed(&self) -> bool {
        self.iter().all(|(_, _, p)| p.is_bijection())
    }

    pub fn diagonal_is_negated_identity(&self) -> bool {
        StructureId::all().all(|k| *self.get(k, k) == SignedBlockPermutation::negated_identity())
    }
}

pub fn composition_table() -> CompositionTable {
    let mut entries = [[SignedBlockPermutation::identity(); 6]; 6];
    for a in StructureId::all() {
        for b in StructureId::all() {
            entries[a.get() as usize - 1][b.get() as usize - 1] =
                SignedBlockPermutation::builtin(a).compose(&SignedBlockPermutation::builtin(b));
        }
    }
    CompositionTable { entries }
}

/// Matrix of the fundamental 2-form `Φ(X, Y) = g(JX, Y)`, laid out as
/// `A[r][c] = g(J e_c, e_r)` (so `A` coincides with the dense matrix of `J`).
/// The Gram matrix `Φ(e_r, e_c)` is `Aᵀ = -A`.
pub fn fundamental_two_form(id: StructureId, n: usize) -> Matrix {
    let j = SignedBlockPermutation::builtin(id);
    let dim = BLOCKS * n;
    let mut a = Matrix::zeros(dim);
    let mut e = vec![0.0; dim];
    for c in 0..dim {
        e.iter_mut().for_each(|v| *v = 0.0);
        e[c] = 1.0;
        let je = j.apply(&e).expect("length is 8n");
        for (r, v) in je.into_iter().enumerate() {
            // g(J e_c, e_r) with the Euclidean metric
            a[(r, c)] = v;
        }
    }
    a
}

/// `Φ_J(X, Y) = g(JX, Y)`.
pub fn fundamental_form_value(
    j: &SignedBlockPermutation,
    x: &[f64],
    y: &[f64],
) -> Result<f64, StructureError> {
    if x.len() != y.len() {
        return Err(StructureError::BadLength(y.len()));
    }
    let jx = j.apply(x)?;
    Ok(jx.iter().zip(y).map(|(a, b)| a * b).sum())
}

/// Outcome of checking `g(JX, JY) = g(X, Y)` for one table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MetricReport {
    pub bijective: bool,
    pub orthogonal: bool,
}

impl MetricReport {
    pub fn passed(&self) -> bool {
        self.bijective && self.orthogonal
    }
}

/// Computes `JᵀJ` over blocks and compares with the identity.
pub fn check_metric_compatibility(j: &SignedBlockPermutation) -> MetricReport {
    let gram = j.gram();
    let orthogonal = gram
        .iter()
        .enumerate()
        .all(|(b, row)| row.iter().enumerate().all(|(c, &v)| v == i32::from(b == c)));
    MetricReport {
        bijective: j.is_bijection(),
        orthogonal,
    }
}

/// Per-structure results of the exact algebra checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StructureReport {
    pub id: StructureId,
    pub squares_to_minus_identity: bool,
    pub metric: MetricReport,
    pub two_form_antisymmetric: bool,
}

impl StructureReport {
    pub fn passed(&self) -> bool {
        self.squares_to_minus_identity && self.metric.passed() && self.two_form_antisymmetric
    }
}

pub fn verify_structure(id: StructureId) -> StructureReport {
    let j = SignedBlockPermutation::builtin(id);
    // n = 1 suffices: the block action is independent of the intra-block index.
    let phi = fundamental_two_form(id, 1);
    StructureReport {
        id,
        squares_to_minus_identity: j.compose(&j) == SignedBlockPermutation::negated_identity(),
        metric: check_metric_compatibility(&j),
        two_form_antisymmetric: phi.antisymmetry_defect() == 0.0,
    }
}
