//! Protograph base matrices for coupled ensembles, precoding, protograph
//! density evolution, and lifting to parity-check matrices.

use std::collections::BTreeSet;
use std::fmt;
use std::io::{BufRead, Write};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use thiserror::Error;

use crate::density_evolution::{DeOutcome, DeSettings, ThresholdResult};
use crate::scalar::Real;

/// Errors from protograph construction, analysis, and lifting.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProtographError {
    #[error("protograph: invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("protograph: precode rejected: punctured columns contain a stopping set")]
    InvalidPrecode,
    #[error("protograph: lifting infeasible: z={z} is smaller than the largest entry {max_entry}")]
    LiftingInfeasible { z: usize, max_entry: u32 },
    #[error("protograph: could not sample disjoint permutations within the retry budget")]
    RetryBudgetExceeded,
    #[error("protograph: malformed base matrix text: {0}")]
    MalformedText(String),
}

fn invalid(msg: impl Into<String>) -> ProtographError {
    ProtographError::InvalidParameters(msg.into())
}

// ---------------------------------------------------------------------------
// Base matrices
// ---------------------------------------------------------------------------

/// Integer protograph base matrix with an optional punctured-column set.
///
/// Entry `(i, j)` counts the edges between check `i` and variable `j` of the
/// protograph. Indices are 0-based in the API; the text form and error
/// messages use 1-based columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaseMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<u32>,
    punctured: BTreeSet<usize>,
    component_dims: Option<(usize, usize)>,
}

impl BaseMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<u32>) -> Result<Self, ProtographError> {
        if rows == 0 || cols == 0 || entries.len() != rows * cols {
            return Err(invalid(format!(
                "entry count {} does not match {rows}x{cols}",
                entries.len()
            )));
        }
        let m = BaseMatrix {
            rows,
            cols,
            entries,
            punctured: BTreeSet::new(),
            component_dims: None,
        };
        m.validate()?;
        Ok(m)
    }

    fn validate(&self) -> Result<(), ProtographError> {
        for i in 0..self.rows {
            if self.row_sum(i) == 0 {
                return Err(invalid(format!("all-zero row {}", i + 1)));
            }
        }
        for j in 0..self.cols {
            if self.col_sum(j) == 0 {
                return Err(invalid(format!("all-zero column {}", j + 1)));
            }
        }
        for &j in &self.punctured {
            if j >= self.cols {
                return Err(invalid(format!("punctured column {} out of range", j + 1)));
            }
        }
        Ok(())
    }

    /// Marks columns (0-based) as punctured.
    pub fn with_punctured(mut self, columns: impl IntoIterator<Item = usize>) -> Result<Self, ProtographError> {
        self.punctured = columns.into_iter().collect();
        self.validate()?;
        Ok(self)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.entries[i * self.cols + j]
    }

    fn set(&mut self, i: usize, j: usize, v: u32) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn row_sum(&self, i: usize) -> u32 {
        (0..self.cols).map(|j| self.get(i, j)).sum()
    }

    pub fn col_sum(&self, j: usize) -> u32 {
        (0..self.rows).map(|i| self.get(i, j)).sum()
    }

    pub fn max_entry(&self) -> u32 {
        self.entries.iter().copied().max().unwrap_or(0)
    }

    /// Punctured column indices, 0-based.
    pub fn punctured(&self) -> &BTreeSet<usize> {
        &self.punctured
    }

    /// Dimensions (b, c) of the component matrices this base was built from.
    pub fn component_dims(&self) -> Option<(usize, usize)> {
        self.component_dims
    }

    /// Design rate `(N_p - M_p) / (N_p - #punctured)`.
    pub fn design_rate<R: Real>(&self) -> R {
        let n = self.cols as f64;
        let m = self.rows as f64;
        let p = self.punctured.len() as f64;
        R::from_f64_lossy((n - m) / (n - p))
    }

    /// Writes the plain-text form: a dimensions line, the entry rows, then a
    /// `punctured:` line of 1-based column indices.
    pub fn write_text<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{} {}", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.get(i, j).to_string()).collect();
            writeln!(w, "{}", row.join(" "))?;
        }
        let punct: Vec<String> = self.punctured.iter().map(|j| (j + 1).to_string()).collect();
        writeln!(w, "punctured: {}", punct.join(" "))?;
        Ok(())
    }

    /// Parses the plain-text form written by [`write_text`](Self::write_text).
    pub fn read_text<Rd: BufRead>(reader: Rd) -> Result<Self, ProtographError> {
        let mut lines = reader
            .lines()
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| ProtographError::MalformedText(e.to_string()))?
            .into_iter()
            .filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| ProtographError::MalformedText("empty file".into()))?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| ProtographError::MalformedText(format!("bad dimension {t}"))))
            .collect::<Result<_, _>>()?;
        let [rows, cols] = dims[..] else {
            return Err(ProtographError::MalformedText("dimensions line must hold two integers".into()));
        };
        let mut entries = Vec::with_capacity(rows * cols);
        for _ in 0..rows {
            let line = lines
                .next()
                .ok_or_else(|| ProtographError::MalformedText("missing entry row".into()))?;
            let row: Vec<u32> = line
                .split_whitespace()
                .map(|t| t.parse().map_err(|_| ProtographError::MalformedText(format!("bad entry {t}"))))
                .collect::<Result<_, _>>()?;
            if row.len() != cols {
                return Err(ProtographError::MalformedText(format!(
                    "expected {cols} entries per row, got {}",
                    row.len()
                )));
            }
            entries.extend(row);
        }
        let mut punctured = BTreeSet::new();
        if let Some(line) = lines.next() {
            let rest = line
                .strip_prefix("punctured:")
                .ok_or_else(|| ProtographError::MalformedText("expected 'punctured:' line".into()))?;
            for tok in rest.split_whitespace() {
                let j: usize = tok
                    .parse()
                    .map_err(|_| ProtographError::MalformedText(format!("bad punctured index {tok}")))?;
                if j == 0 || j > cols {
                    return Err(ProtographError::MalformedText(format!("punctured index {j} out of range")));
                }
                punctured.insert(j - 1);
            }
        }
        let base = BaseMatrix::new(rows, cols, entries)?;
        base.with_punctured(punctured)
    }
}

impl fmt::Display for BaseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut buf = Vec::new();
        self.write_text(&mut buf).map_err(|_| fmt::Error)?;
        f.write_str(&String::from_utf8_lossy(&buf))
    }
}

/// Ordered component matrices `B_1..B_w` of an edge spreading.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeSpreading {
    b: usize,
    c: usize,
    components: Vec<Vec<u32>>,
}

impl EdgeSpreading {
    /// Components given row-major with shared dimensions `b x c`.
    pub fn new(b: usize, c: usize, components: Vec<Vec<u32>>) -> Result<Self, ProtographError> {
        if b == 0 || c == 0 {
            return Err(invalid("component dimensions must be positive"));
        }
        if components.len() < 2 {
            return Err(invalid("an edge spreading needs at least two components"));
        }
        for comp in &components {
            if comp.len() != b * c {
                return Err(invalid(format!(
                    "component entry count {} does not match {b}x{c}",
                    comp.len()
                )));
            }
        }
        Ok(EdgeSpreading { b, c, components })
    }

    /// The same component repeated `w` times.
    pub fn repeated(b: usize, c: usize, component: Vec<u32>, w: usize) -> Result<Self, ProtographError> {
        Self::new(b, c, vec![component; w])
    }

    pub fn coupling(&self) -> usize {
        self.components.len()
    }

    pub fn component_rows(&self) -> usize {
        self.b
    }

    pub fn component_cols(&self) -> usize {
        self.c
    }

    fn entry(&self, k: usize, r: usize, s: usize) -> u32 {
        self.components[k][r * self.c + s]
    }

    /// Sum of the components, the protograph of the uncoupled ensemble.
    pub fn total(&self) -> Vec<u32> {
        let mut acc = vec![0u32; self.b * self.c];
        for comp in &self.components {
            for (a, &v) in acc.iter_mut().zip(comp.iter()) {
                *a += v;
            }
        }
        acc
    }
}

/// Precoding block: `p` added degree-1 variables wired through `P`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrecodeBlock {
    p: usize,
    cols: usize,
    matrix: Vec<u32>,
}

impl PrecodeBlock {
    /// `matrix` is `p x cols` row-major where `cols` must equal the number of
    /// overlapped base columns `c*(w-1)`. Exactly `p` columns must be
    /// nonzero so puncturing preserves the design rate.
    pub fn new(p: usize, cols: usize, matrix: Vec<u32>) -> Result<Self, ProtographError> {
        if matrix.len() != p * cols {
            return Err(invalid(format!(
                "precode entry count {} does not match {p}x{cols}",
                matrix.len()
            )));
        }
        let nonzero_cols = (0..cols)
            .filter(|&j| (0..p).any(|i| matrix[i * cols + j] > 0))
            .count();
        if nonzero_cols != p {
            return Err(invalid(format!(
                "precode must have exactly p={p} nonzero columns, found {nonzero_cols}"
            )));
        }
        Ok(PrecodeBlock { p, cols, matrix })
    }

    pub fn empty(cols: usize) -> Self {
        PrecodeBlock {
            p: 0,
            cols,
            matrix: Vec::new(),
        }
    }

    pub fn p(&self) -> usize {
        self.p
    }

    fn entry(&self, i: usize, j: usize) -> u32 {
        self.matrix[i * self.cols + j]
    }

    fn nonzero_cols(&self) -> Vec<usize> {
        (0..self.cols)
            .filter(|&j| (0..self.p).any(|i| self.entry(i, j) > 0))
            .collect()
    }
}

// ---------------------------------------------------------------------------
// Constructors
// ---------------------------------------------------------------------------

fn zero_base(rows: usize, cols: usize) -> BaseMatrix {
    BaseMatrix {
        rows,
        cols,
        entries: vec![0; rows * cols],
        punctured: BTreeSet::new(),
        component_dims: None,
    }
}

fn add_component(base: &mut BaseMatrix, spreading: &EdgeSpreading, block_row: usize, block_col: usize, k: usize) {
    let (b, c) = (spreading.b, spreading.c);
    for r in 0..b {
        for s in 0..c {
            let i = block_row * b + r;
            let j = block_col * c + s;
            let v = base.get(i, j) + spreading.entry(k, r, s);
            base.set(i, j, v);
        }
    }
}

/// Banded base matrix of the coupled chain: column block `v` stacks
/// `B_1..B_w` at row blocks `v..v+w-1`.
pub fn base_sc(spreading: &EdgeSpreading, chain_len: usize) -> Result<BaseMatrix, ProtographError> {
    let w = spreading.coupling();
    if chain_len < w {
        return Err(invalid(format!("need L >= w, got L={chain_len}, w={w}")));
    }
    let mut base = zero_base(spreading.b * (chain_len + w - 1), spreading.c * chain_len);
    for v in 0..chain_len {
        for k in 0..w {
            add_component(&mut base, spreading, v + k, v, k);
        }
    }
    base.component_dims = Some((spreading.b, spreading.c));
    base.validate()?;
    Ok(base)
}

/// Tail-biting base matrix: the band wrapped onto a ring of
/// `L + w - 1` positions.
pub fn base_circular(spreading: &EdgeSpreading, chain_len: usize) -> Result<BaseMatrix, ProtographError> {
    let w = spreading.coupling();
    if chain_len < w {
        return Err(invalid(format!("need L >= w, got L={chain_len}, w={w}")));
    }
    let n = chain_len + w - 1;
    let mut base = zero_base(spreading.b * n, spreading.c * n);
    for v in 0..n {
        for k in 0..w {
            add_component(&mut base, spreading, (v + k) % n, v, k);
        }
    }
    base.component_dims = Some((spreading.b, spreading.c));
    base.validate()?;
    Ok(base)
}

/// Overlapped base matrix: two half-length tail-biting bases sharing their
/// wrap column blocks.
pub fn base_oc(spreading: &EdgeSpreading, chain_len: usize) -> Result<BaseMatrix, ProtographError> {
    let w = spreading.coupling();
    let span = chain_len + 1 - w;
    if chain_len < w || span % 2 != 0 || span < 2 {
        return Err(invalid(format!(
            "OC base requires L = 2*Ls + w - 1 with Ls >= 1, got L={chain_len}, w={w}"
        )));
    }
    let ls = span / 2;
    let n = ls + w - 1;
    let (b, c) = (spreading.b, spreading.c);
    let circ = base_circular(spreading, ls)?;
    let mut base = zero_base(2 * b * n, c * chain_len);
    for i in 0..b * n {
        for j in 0..c * n {
            let v = circ.get(i, j);
            if v == 0 {
                continue;
            }
            if j < c * ls {
                base.set(i, j, v);
                base.set(b * n + i, c * n + j, v);
            } else {
                base.set(i, j, v);
                base.set(b * n + i, j, v);
            }
        }
    }
    base.component_dims = Some((b, c));
    base.validate()?;
    Ok(base)
}

/// Precoded overlapped base: appends `p` check rows wired by `P` into the
/// overlapped column blocks and `p` degree-1 variable columns, puncturing
/// the columns `P` touches. Rejects precodes whose punctured columns contain
/// a stopping set.
pub fn base_ocp(
    spreading: &EdgeSpreading,
    chain_len: usize,
    precode: &PrecodeBlock,
) -> Result<BaseMatrix, ProtographError> {
    let w = spreading.coupling();
    let c = spreading.c;
    let overlap_cols = c * (w - 1);
    if precode.cols != overlap_cols {
        return Err(invalid(format!(
            "precode width {} does not match the {overlap_cols} overlapped columns",
            precode.cols
        )));
    }
    let oc = base_oc(spreading, chain_len)?;
    if precode.p == 0 {
        return Ok(oc);
    }
    let ls = (chain_len + 1 - w) / 2;
    let p = precode.p;
    let (rows0, cols0) = (oc.rows, oc.cols);
    let mut base = zero_base(rows0 + p, cols0 + p);
    for i in 0..rows0 {
        for j in 0..cols0 {
            base.set(i, j, oc.get(i, j));
        }
    }
    for i in 0..p {
        for j in 0..overlap_cols {
            base.set(rows0 + i, c * ls + j, precode.entry(i, j));
        }
        base.set(rows0 + i, cols0 + i, 1);
    }
    base.component_dims = Some((spreading.b, c));
    let punctured: BTreeSet<usize> = precode.nonzero_cols().iter().map(|&j| c * ls + j).collect();
    base.punctured = punctured;
    base.validate()?;
    if punctured_stopping_set_exists(&base) {
        return Err(ProtographError::InvalidPrecode);
    }
    Ok(base)
}

// ---------------------------------------------------------------------------
// Punctured stopping sets
// ---------------------------------------------------------------------------

/// Whether a nonempty subset of the punctured columns exists whose every
/// neighboring check row carries at least two edges into the subset.
///
/// Peeling-style pruning: repeatedly drop any surviving column that is the
/// sole edge of some row into the surviving set; the survivors form the
/// maximal qualifying subset.
pub fn punctured_stopping_set_exists(base: &BaseMatrix) -> bool {
    let mut alive: Vec<usize> = base.punctured.iter().copied().collect();
    loop {
        let mut removed = false;
        'cols: for idx in 0..alive.len() {
            let j = alive[idx];
            for i in 0..base.rows {
                if base.get(i, j) == 0 {
                    continue;
                }
                let total: u32 = alive.iter().map(|&jj| base.get(i, jj)).sum();
                if total == 1 {
                    alive.swap_remove(idx);
                    removed = true;
                    break 'cols;
                }
            }
        }
        if !removed {
            return !alive.is_empty();
        }
    }
}

// ---------------------------------------------------------------------------
// Protograph density evolution (edge-wise)
// ---------------------------------------------------------------------------

struct ProtoDe {
    num_cols: usize,
    mult: Vec<i32>,
    col_edges: Vec<Vec<u32>>,
    row_edges: Vec<Vec<u32>>,
    col_of: Vec<u32>,
    punctured: Vec<bool>,
}

impl ProtoDe {
    fn new(base: &BaseMatrix) -> Self {
        let mut mult = Vec::new();
        let mut col_of = Vec::new();
        let mut col_edges = vec![Vec::new(); base.cols];
        let mut row_edges = vec![Vec::new(); base.rows];
        for i in 0..base.rows {
            for j in 0..base.cols {
                let m = base.get(i, j);
                if m > 0 {
                    let e = mult.len() as u32;
                    mult.push(m as i32);
                    col_of.push(j as u32);
                    col_edges[j].push(e);
                    row_edges[i].push(e);
                }
            }
        }
        let punctured = (0..base.cols).map(|j| base.punctured.contains(&j)).collect();
        ProtoDe {
            num_cols: base.cols,
            mult,
            col_edges,
            row_edges,
            col_of,
            punctured,
        }
    }

    fn channel<R: Real>(&self, eps: R) -> Vec<R> {
        self.punctured
            .iter()
            .map(|&p| if p { R::one() } else { eps })
            .collect()
    }

    /// One iteration: variable update from `u`, then check update, then the
    /// posterior bit erasures. Returns the posterior max.
    fn iterate<R: Real>(&self, ch: &[R], u: &mut [R], v: &mut [R], post: &mut [R]) -> R {
        for (j, edges) in self.col_edges.iter().enumerate() {
            for &e in edges {
                let mut prod = R::one();
                for &e2 in edges {
                    let exp = self.mult[e2 as usize] - i32::from(e2 == e);
                    if exp > 0 {
                        prod = prod * u[e2 as usize].powi(exp);
                    }
                }
                v[e as usize] = ch[j] * prod;
            }
        }
        for edges in &self.row_edges {
            // leave-one-out over the row, with multiplicity
            for idx in 0..edges.len() {
                let e = edges[idx];
                let mut prod = R::one();
                for &e2 in edges {
                    let exp = self.mult[e2 as usize] - i32::from(e2 == e);
                    if exp > 0 {
                        prod = prod * (R::one() - v[e2 as usize]).powi(exp);
                    }
                }
                u[e as usize] = R::one() - prod;
            }
        }
        for p in post.iter_mut() {
            *p = R::one();
        }
        for (e, &j) in self.col_of.iter().enumerate() {
            post[j as usize] = post[j as usize] * u[e].powi(self.mult[e]);
        }
        let mut max = R::zero();
        for (j, p) in post.iter_mut().enumerate() {
            *p = *p * ch[j];
            max = max.max(*p);
        }
        max
    }
}

/// Edge-wise density evolution of a protograph over the erasure channel.
///
/// Punctured columns carry no channel observation; convergence is judged on
/// the posterior bit erasures.
pub fn protograph_de<R: Real>(base: &BaseMatrix, eps: R, settings: &DeSettings<R>) -> DeOutcome<R> {
    protograph_de_run(base, eps, settings, false)
}

/// As [`protograph_de`], recording the posterior erasures per iteration.
pub fn protograph_de_traced<R: Real>(base: &BaseMatrix, eps: R, settings: &DeSettings<R>) -> DeOutcome<R> {
    protograph_de_run(base, eps, settings, true)
}

fn protograph_de_run<R: Real>(
    base: &BaseMatrix,
    eps: R,
    settings: &DeSettings<R>,
    record: bool,
) -> DeOutcome<R> {
    let system = ProtoDe::new(base);
    let ch = system.channel(eps);
    let num_edges = system.mult.len();
    let mut u = vec![R::one(); num_edges];
    let mut u_prev = vec![R::one(); num_edges];
    let mut v = vec![R::zero(); num_edges];
    let mut post = vec![R::one(); system.num_cols];
    let mut trajectory = record.then(Vec::new);
    let mut max = R::one();
    for l in 1..=settings.max_iter {
        u_prev.copy_from_slice(&u);
        max = system.iterate(&ch, &mut u, &mut v, &mut post);
        if let Some(t) = trajectory.as_mut() {
            t.push(post.clone());
        }
        if max <= settings.decode_tol {
            return DeOutcome {
                converged: true,
                iterations: l,
                final_max_erasure: max,
                trajectory,
            };
        }
        let change = u
            .iter()
            .zip(u_prev.iter())
            .map(|(&a, &b)| (a - b).abs())
            .fold(R::zero(), R::max);
        let peak = u.iter().cloned().fold(R::zero(), R::max);
        if l > 1 && change < settings.stall_tol * peak.max(R::min_positive_value()) {
            return DeOutcome {
                converged: false,
                iterations: l,
                final_max_erasure: max,
                trajectory,
            };
        }
    }
    DeOutcome {
        converged: false,
        iterations: settings.max_iter,
        final_max_erasure: max,
        trajectory,
    }
}

/// BP threshold of a protograph ensemble by bisection.
pub fn protograph_bp_threshold<R: Real>(base: &BaseMatrix, eps_tol: R) -> ThresholdResult<R> {
    let settings = DeSettings::default();
    let mut lo = R::zero();
    let mut hi = R::one();
    let half = R::from_f64_lossy(0.5);
    while hi - lo > eps_tol {
        let mid = (lo + hi) * half;
        if protograph_de(base, mid, &settings).converged {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    ThresholdResult {
        threshold: (lo + hi) * half,
        bracket_width: hi - lo,
        settings,
    }
}

// ---------------------------------------------------------------------------
// Lifting
// ---------------------------------------------------------------------------

/// Sparse binary parity-check matrix lifted from a base matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParityCheck {
    rows: usize,
    cols: usize,
    row_adj: Vec<Vec<u32>>,
    punctured: Vec<bool>,
    z: usize,
    seed: u64,
}

impl ParityCheck {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Lifting factor; 1 for matrices not produced by lifting.
    pub fn z(&self) -> usize {
        self.z
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Columns of the ones in row `i`, sorted ascending.
    pub fn row(&self, i: usize) -> &[u32] {
        &self.row_adj[i]
    }

    pub fn punctured(&self) -> &[bool] {
        &self.punctured
    }

    pub fn num_transmitted(&self) -> usize {
        self.punctured.iter().filter(|&&p| !p).count()
    }

    /// Column adjacency derived from the row lists.
    pub fn col_adj(&self) -> Vec<Vec<u32>> {
        let mut cols = vec![Vec::new(); self.cols];
        for (i, row) in self.row_adj.iter().enumerate() {
            for &j in row {
                cols[j as usize].push(i as u32);
            }
        }
        cols
    }

    /// Exports the matrix in alist format. Punctured flags, the lifting
    /// factor, and the seed are not part of alist and are dropped.
    pub fn write_alist<W: Write>(&self, w: W) -> std::io::Result<()> {
        crate::alist::write_alist(w, self.cols, &self.row_adj)
    }

    /// Reads an alist matrix; the result carries no puncturing and `z = 1`.
    pub fn read_alist<Rd: BufRead>(reader: Rd) -> Result<Self, crate::alist::AlistError> {
        let m = crate::alist::read_alist(reader)?;
        Ok(ParityCheck {
            rows: m.rows,
            cols: m.cols,
            row_adj: m.row_adj,
            punctured: vec![false; m.cols],
            z: 1,
            seed: 0,
        })
    }

    /// Builds a parity check directly from row adjacency lists.
    pub fn from_rows(cols: usize, row_adj: Vec<Vec<u32>>) -> Result<Self, ProtographError> {
        let mut row_adj = row_adj;
        for row in &mut row_adj {
            row.sort_unstable();
            if row.windows(2).any(|w| w[0] == w[1]) {
                return Err(invalid("duplicate edge in row adjacency"));
            }
            if row.iter().any(|&j| j as usize >= cols) {
                return Err(invalid("column index out of range"));
            }
        }
        Ok(ParityCheck {
            rows: row_adj.len(),
            cols,
            row_adj,
            punctured: vec![false; cols],
            z: 1,
            seed: 0,
        })
    }
}

const LIFT_RETRY_BUDGET: usize = 100;

/// Lifts a base matrix by `z`: each entry `m` becomes the sum of `m`
/// pairwise-disjoint uniformly sampled `z x z` permutation matrices.
/// Deterministic in `(base, z, seed)`.
pub fn lift(base: &BaseMatrix, z: usize, seed: u64) -> Result<ParityCheck, ProtographError> {
    if z == 0 {
        return Err(invalid("lifting factor must be positive"));
    }
    let max_entry = base.max_entry();
    if (z as u64) < max_entry as u64 {
        return Err(ProtographError::LiftingInfeasible { z, max_entry });
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let rows = base.rows * z;
    let cols = base.cols * z;
    let mut row_adj: Vec<Vec<u32>> = vec![Vec::new(); rows];
    let mut perm: Vec<u32> = (0..z as u32).collect();
    for i in 0..base.rows {
        for j in 0..base.cols {
            let m = base.get(i, j) as usize;
            if m == 0 {
                continue;
            }
            // chosen[a] holds the images already used at replica a
            let mut chosen: Vec<Vec<u32>> = vec![Vec::new(); z];
            for _ in 0..m {
                let mut tries = 0;
                loop {
                    perm.shuffle(&mut rng);
                    let disjoint = perm
                        .iter()
                        .enumerate()
                        .all(|(a, &b)| !chosen[a].contains(&b));
                    if disjoint {
                        break;
                    }
                    tries += 1;
                    if tries > LIFT_RETRY_BUDGET {
                        return Err(ProtographError::RetryBudgetExceeded);
                    }
                }
                for (a, &b) in perm.iter().enumerate() {
                    chosen[a].push(b);
                    row_adj[i * z + a].push((j * z) as u32 + b);
                }
            }
        }
    }
    for row in &mut row_adj {
        row.sort_unstable();
    }
    let mut punctured = vec![false; cols];
    for &j in &base.punctured {
        for r in 0..z {
            punctured[j * z + r] = true;
        }
    }
    Ok(ParityCheck {
        rows,
        cols,
        row_adj,
        punctured,
        z,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn ones_spreading(w: usize) -> EdgeSpreading {
        EdgeSpreading::repeated(1, 2, vec![1, 1], w).unwrap()
    }

    fn example4_precode() -> PrecodeBlock {
        PrecodeBlock::new(2, 4, vec![0, 1, 1, 0, 0, 1, 1, 0]).unwrap()
    }

    #[test]
    fn base_sc_shape_and_rate() {
        let base = base_sc(&ones_spreading(3), 12).unwrap();
        assert_eq!((base.rows(), base.cols()), (14, 24));
        let rate: f64 = base.design_rate();
        assert_abs_diff_eq!(rate, 0.5 - 0.5 * 2.0 / 12.0, epsilon = 1e-12);
    }

    #[test]
    fn base_sc_first_column_block_stacks_components() {
        let sp = EdgeSpreading::new(1, 2, vec![vec![1, 0], vec![0, 1], vec![1, 1]]).unwrap();
        let base = base_sc(&sp, 3).unwrap();
        assert_eq!((base.rows(), base.cols()), (5, 6));
        let first: Vec<u32> = (0..3).flat_map(|i| (0..2).map(move |j| (i, j))).map(|(i, j)| base.get(i, j)).collect();
        assert_eq!(first, vec![1, 0, 0, 1, 1, 1]);
        assert_eq!(base.get(3, 0), 0);
    }

    #[test]
    fn base_circular_wraps_top_right() {
        let sp = EdgeSpreading::new(1, 2, vec![vec![1, 0], vec![0, 1], vec![1, 1]]).unwrap();
        let base = base_circular(&sp, 3).unwrap();
        assert_eq!((base.rows(), base.cols()), (5, 10));
        // column block 4 (0-based 3) wraps: B_3 at row 1, B_1 at row 4, B_2 at row 5
        assert_eq!([base.get(0, 6), base.get(0, 7)], [1, 1]);
        assert_eq!([base.get(3, 6), base.get(3, 7)], [1, 0]);
        assert_eq!([base.get(4, 6), base.get(4, 7)], [0, 1]);
        // every column receives all components
        let total = sp.total();
        for jb in 0..5 {
            for s in 0..2 {
                let col_sum: u32 = (0..5).map(|i| base.get(i, jb * 2 + s)).sum();
                let expect: u32 = (0..1).map(|r| total[r * 2 + s]).sum();
                assert_eq!(col_sum, expect);
            }
        }
    }

    #[test]
    fn base_circular_equals_folded_band() {
        for (l, w, b, c, comps) in [
            (3usize, 3usize, 1usize, 2usize, vec![vec![1, 1], vec![1, 1], vec![1, 1]]),
            (4, 2, 2, 1, vec![vec![1, 2], vec![2, 1]]),
        ] {
            let sp = EdgeSpreading::new(b, c, comps).unwrap();
            let circ = base_circular(&sp, l).unwrap();
            let band = base_sc(&sp, l + w - 1).unwrap();
            let n = l + w - 1;
            for i in 0..b * n {
                for j in 0..c * n {
                    let folded = band.get(i, j)
                        + if i < b * (w - 1) {
                            band.get(b * n + i, j)
                        } else {
                            0
                        };
                    assert_eq!(circ.get(i, j), folded, "({i},{j})");
                }
            }
        }
    }

    #[test]
    fn base_oc_rate_matches_band_rate() {
        let sp = ones_spreading(3);
        let oc = base_oc(&sp, 12).unwrap();
        let sc = base_sc(&sp, 12).unwrap();
        let (roc, rsc): (f64, f64) = (oc.design_rate(), sc.design_rate());
        assert_abs_diff_eq!(roc, rsc, epsilon = 1e-12);
        assert_abs_diff_eq!(roc, 0.4167, epsilon = 5e-5);
    }

    #[test]
    fn base_oc_overlapped_columns_doubled() {
        let sp = ones_spreading(3);
        let oc = base_oc(&sp, 12).unwrap();
        let total = sp.total();
        // per-column sums of B = B_1 + B_2 + B_3
        let b_colsum = |s: usize| (0..sp.component_rows()).map(|r| total[r * 2 + s]).sum::<u32>();
        for j in 0..oc.cols() {
            let base_sum = b_colsum(j % 2);
            let expect = if (10..14).contains(&j) { 2 * base_sum } else { base_sum };
            assert_eq!(oc.col_sum(j), expect, "column {j}");
        }
    }

    #[test]
    fn base_ocp_accepts_example_precode() {
        let base = base_ocp(&ones_spreading(3), 12, &example4_precode()).unwrap();
        assert_eq!((base.rows(), base.cols()), (16, 26));
        let punct: Vec<usize> = base.punctured().iter().copied().collect();
        assert_eq!(punct, vec![11, 12]); // middle two overlapped columns
        // appended variables have degree one
        assert_eq!(base.col_sum(24), 1);
        assert_eq!(base.col_sum(25), 1);
    }

    #[test]
    fn base_ocp_rejects_full_puncturing() {
        let p4 = PrecodeBlock::new(4, 4, vec![
            1, 1, 1, 1,
            1, 1, 1, 1,
            1, 1, 1, 1,
            1, 1, 1, 1,
        ])
        .unwrap();
        assert_eq!(
            base_ocp(&ones_spreading(3), 12, &p4),
            Err(ProtographError::InvalidPrecode)
        );
    }

    #[test]
    fn base_ocp_empty_precode_is_base_oc() {
        let sp = ones_spreading(3);
        let via_ocp = base_ocp(&sp, 12, &PrecodeBlock::empty(4)).unwrap();
        assert_eq!(via_ocp, base_oc(&sp, 12).unwrap());
    }

    #[test]
    fn ocp_rate_is_preserved() {
        let base = base_ocp(&ones_spreading(3), 12, &example4_precode()).unwrap();
        let oc = base_oc(&ones_spreading(3), 12).unwrap();
        let (a, b): (f64, f64) = (base.design_rate(), oc.design_rate());
        assert_abs_diff_eq!(a, b, epsilon = 1e-12);
    }

    #[test]
    fn stopping_set_detection() {
        // no punctured columns
        let base = BaseMatrix::new(1, 2, vec![1, 1]).unwrap();
        assert!(!punctured_stopping_set_exists(&base));
        // a double edge alone is a stopping set
        let base = BaseMatrix::new(1, 1, vec![2]).unwrap().with_punctured([0]).unwrap();
        assert!(punctured_stopping_set_exists(&base));
        // two punctured columns meeting every shared row twice
        let base = BaseMatrix::new(2, 2, vec![1, 1, 1, 1])
            .unwrap()
            .with_punctured([0, 1])
            .unwrap();
        assert!(punctured_stopping_set_exists(&base));
        // a pendant row of weight one prunes the set away
        let base = BaseMatrix::new(2, 2, vec![1, 1, 1, 0])
            .unwrap()
            .with_punctured([0, 1])
            .unwrap();
        assert!(!punctured_stopping_set_exists(&base));
    }

    #[test]
    fn proto_de_zero_eps_converges_immediately() {
        let base = base_sc(&ones_spreading(3), 6).unwrap();
        let out: DeOutcome<f64> = protograph_de(&base, 0.0, &DeSettings::default());
        assert!(out.converged);
        assert_eq!(out.iterations, 1);
    }

    #[test]
    fn proto_de_single_entry_matches_scalar_recursion() {
        // one variable, one check, three parallel edges: the (3,3)-regular DE
        let base = BaseMatrix::new(1, 1, vec![3]).unwrap();
        let thr: f64 = protograph_bp_threshold(&base, 1e-5).threshold;
        let scalar = crate::density_evolution::regular_bp_threshold(3, 3, 1e-5).unwrap();
        assert_abs_diff_eq!(thr, scalar, epsilon = 3e-5);
    }

    #[test]
    fn proto_de_stacked_entries_match_scalar_oracle() {
        // two checks with triple edges to one variable: dl=6, dr=3
        let base = BaseMatrix::new(2, 1, vec![3, 3]).unwrap();
        let thr: f64 = protograph_bp_threshold(&base, 1e-5).threshold;
        // independent scalar bisection for the (6,3) recursion
        let mut lo = 0.0f64;
        let mut hi = 1.0;
        while hi - lo > 1e-5 {
            let eps = 0.5 * (lo + hi);
            let mut x = 1.0f64;
            let mut ok = false;
            for _ in 0..200_000 {
                let next = eps * (1.0 - (1.0 - x) * (1.0 - x)).powi(5);
                if next <= 1e-8 {
                    ok = true;
                    break;
                }
                if (x - next).abs() < 1e-12 * next {
                    break;
                }
                x = next;
            }
            if ok {
                lo = eps;
            } else {
                hi = eps;
            }
        }
        assert_abs_diff_eq!(thr, 0.5 * (lo + hi), epsilon = 3e-5);
    }

    #[test]
    fn lift_z1_reproduces_binary_base() {
        let base = base_sc(&ones_spreading(3), 5).unwrap();
        let h = lift(&base, 1, 7).unwrap();
        assert_eq!((h.rows(), h.cols()), (base.rows(), base.cols()));
        for i in 0..base.rows() {
            let cols: Vec<u32> = (0..base.cols() as u32).filter(|&j| base.get(i, j as usize) == 1).collect();
            assert_eq!(h.row(i), cols.as_slice());
        }
    }

    #[test]
    fn lift_z1_rejects_multi_edges() {
        let base = BaseMatrix::new(1, 1, vec![2]).unwrap();
        assert_eq!(
            lift(&base, 1, 0),
            Err(ProtographError::LiftingInfeasible { z: 1, max_entry: 2 })
        );
    }

    #[test]
    fn lift_preserves_degrees_and_is_deterministic() {
        let base = base_ocp(&ones_spreading(3), 12, &example4_precode()).unwrap();
        let h1 = lift(&base, 16, 42).unwrap();
        let h2 = lift(&base, 16, 42).unwrap();
        assert_eq!(h1, h2);
        let h3 = lift(&base, 16, 43).unwrap();
        assert_ne!(h1, h3);
        for i in 0..h1.rows() {
            assert_eq!(h1.row(i).len() as u32, base.row_sum(i / 16));
        }
        let cols = h1.col_adj();
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len() as u32, base.col_sum(j / 16));
        }
        // punctured flags expand to whole replica blocks
        let punct: Vec<usize> = (0..h1.cols()).filter(|&j| h1.punctured()[j]).collect();
        assert_eq!(punct.len(), 32);
        assert!(punct.iter().all(|&j| (11 * 16..13 * 16).contains(&j)));
    }

    #[test]
    fn lift_multi_edge_entries_stay_disjoint() {
        let base = BaseMatrix::new(1, 2, vec![3, 1]).unwrap();
        let h = lift(&base, 8, 5).unwrap();
        for i in 0..h.rows() {
            let row = h.row(i);
            assert_eq!(row.len(), 4);
            let unique: std::collections::BTreeSet<u32> = row.iter().copied().collect();
            assert_eq!(unique.len(), 4, "duplicate edge in row {i}");
        }
    }

    #[test]
    fn base_text_round_trip() {
        let base = base_ocp(&ones_spreading(3), 12, &example4_precode()).unwrap();
        let mut buf = Vec::new();
        base.write_text(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("16 26\n"));
        assert!(text.contains("punctured: 12 13"));
        let back = BaseMatrix::read_text(&buf[..]).unwrap();
        assert_eq!(back.rows(), base.rows());
        assert_eq!(back.cols(), base.cols());
        assert_eq!(back.punctured(), base.punctured());
        for i in 0..base.rows() {
            for j in 0..base.cols() {
                assert_eq!(back.get(i, j), base.get(i, j));
            }
        }
    }
}
