//! Position-level construction of coupled LDPC ensembles.
//!
//! A coupled ensemble is described by a binary connectivity matrix between
//! check and variable node positions together with a per-position variable
//! degree profile. Four families are supported: spatially-coupled chains,
//! circular (tail-biting) chains, loop ensembles (two chains joined by six
//! cross edges), and overlapped-circular ensembles built from two circular
//! chains sharing their last `w - 1` variable positions.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Real;

/// Errors from ensemble construction and validation.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnsembleError {
    #[error("ensembles: invalid parameters: {0}")]
    InvalidParameters(String),
}

fn invalid(msg: impl Into<String>) -> EnsembleError {
    EnsembleError::InvalidParameters(msg.into())
}

// ---------------------------------------------------------------------------
// Connectivity matrix
// ---------------------------------------------------------------------------

/// Binary adjacency between check node positions (rows) and variable node
/// positions (columns).
///
/// Indices are 0-based in the API; the JSON form uses 1-based index pairs:
/// `{"rows":P,"cols":Q,"ones":[[u,v],...]}`.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "ConnectivityRepr", try_from = "ConnectivityRepr")]
pub struct ConnectivityMatrix {
    rows: usize,
    cols: usize,
    data: Vec<bool>,
}

#[derive(Serialize, Deserialize)]
struct ConnectivityRepr {
    rows: usize,
    cols: usize,
    ones: Vec<(usize, usize)>,
}

impl From<ConnectivityMatrix> for ConnectivityRepr {
    fn from(m: ConnectivityMatrix) -> Self {
        let ones = m.ones().map(|(u, v)| (u + 1, v + 1)).collect();
        ConnectivityRepr {
            rows: m.rows,
            cols: m.cols,
            ones,
        }
    }
}

impl TryFrom<ConnectivityRepr> for ConnectivityMatrix {
    type Error = EnsembleError;

    fn try_from(repr: ConnectivityRepr) -> Result<Self, EnsembleError> {
        let mut m = ConnectivityMatrix::zeros(repr.rows, repr.cols)?;
        for (u, v) in repr.ones {
            if u == 0 || v == 0 || u > repr.rows || v > repr.cols {
                return Err(invalid(format!("one ({u},{v}) out of range")));
            }
            m.set(u - 1, v - 1);
        }
        m.validate()?;
        Ok(m)
    }
}

impl ConnectivityMatrix {
    fn zeros(rows: usize, cols: usize) -> Result<Self, EnsembleError> {
        if rows == 0 || cols == 0 {
            return Err(invalid("connectivity matrix must be non-empty"));
        }
        Ok(ConnectivityMatrix {
            rows,
            cols,
            data: vec![false; rows * cols],
        })
    }

    fn set(&mut self, u: usize, v: usize) {
        self.data[u * self.cols + v] = true;
    }

    fn validate(&self) -> Result<(), EnsembleError> {
        for v in 0..self.cols {
            if self.col_sum(v) == 0 {
                return Err(invalid(format!("variable position {} has no checks", v + 1)));
            }
        }
        Ok(())
    }

    /// Number of check node positions.
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Number of variable node positions.
    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Entry at check position `u`, variable position `v` (0-based).
    pub fn get(&self, u: usize, v: usize) -> bool {
        self.data[u * self.cols + v]
    }

    pub fn row_sum(&self, u: usize) -> usize {
        (0..self.cols).filter(|&v| self.get(u, v)).count()
    }

    pub fn col_sum(&self, v: usize) -> usize {
        (0..self.rows).filter(|&u| self.get(u, v)).count()
    }

    /// Largest row sum; this is the coupling width `w` for all families here.
    pub fn max_row_sum(&self) -> usize {
        (0..self.rows).map(|u| self.row_sum(u)).max().unwrap_or(0)
    }

    /// All (check, variable) position pairs with an edge, row-major order.
    pub fn ones(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.rows)
            .flat_map(move |u| (0..self.cols).map(move |v| (u, v)))
            .filter(|&(u, v)| self.get(u, v))
    }

    /// Variable positions connected to check position `u`.
    pub fn row_neighbors(&self, u: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.cols).filter(move |&v| self.get(u, v))
    }

    /// Check positions connected to variable position `v`.
    pub fn col_neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.rows).filter(move |&u| self.get(u, v))
    }
}

impl fmt::Debug for ConnectivityMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ConnectivityMatrix {}x{}", self.rows, self.cols)?;
        for u in 0..self.rows {
            for v in 0..self.cols {
                write!(f, "{}", if self.get(u, v) { '1' } else { '0' })?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Degree laws and profiles
// ---------------------------------------------------------------------------

/// Node-perspective variable degree distribution: pairs of
/// (degree, fraction of nodes).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeLaw {
    entries: Vec<(u32, f64)>,
}

impl DegreeLaw {
    const FRACTION_TOL: f64 = 1e-12;

    pub fn new(entries: Vec<(u32, f64)>) -> Result<Self, EnsembleError> {
        if entries.is_empty() {
            return Err(invalid("degree law must have at least one entry"));
        }
        let mut seen = BTreeSet::new();
        for &(d, p) in &entries {
            if d < 2 {
                return Err(invalid(format!("variable degree {d} < 2")));
            }
            if !(p > 0.0 && p <= 1.0) {
                return Err(invalid(format!("fraction {p} outside (0,1]")));
            }
            if !seen.insert(d) {
                return Err(invalid(format!("duplicate degree {d}")));
            }
        }
        let total: f64 = entries.iter().map(|&(_, p)| p).sum();
        if (total - 1.0).abs() > Self::FRACTION_TOL {
            return Err(invalid(format!("fractions sum to {total}, not 1")));
        }
        let mut entries = entries;
        entries.sort_by_key(|&(d, _)| d);
        Ok(DegreeLaw { entries })
    }

    pub fn regular(degree: u32) -> Self {
        DegreeLaw {
            entries: vec![(degree, 1.0)],
        }
    }

    pub fn entries(&self) -> &[(u32, f64)] {
        &self.entries
    }

    pub fn is_regular(&self) -> bool {
        self.entries.len() == 1
    }

    /// Average node degree.
    pub fn mean_degree(&self) -> f64 {
        self.entries.iter().map(|&(d, p)| d as f64 * p).sum()
    }

    /// Edge-perspective fractions `d*pi_d / sum(d'*pi_d')`.
    pub fn edge_fractions(&self) -> Vec<(u32, f64)> {
        let mean = self.mean_degree();
        self.entries
            .iter()
            .map(|&(d, p)| (d, d as f64 * p / mean))
            .collect()
    }

    /// Law after overlapping every node with an equal-degree partner.
    pub fn doubled(&self) -> Self {
        DegreeLaw {
            entries: self.entries.iter().map(|&(d, p)| (2 * d, p)).collect(),
        }
    }

    /// Law of the sum of two independent draws; this is the degree law of a
    /// position where nodes of two independent ensembles are overlapped
    /// pairwise by node index.
    pub fn overlapped_with(&self, other: &Self) -> Self {
        let mut acc: Vec<(u32, f64)> = Vec::new();
        for &(d1, p1) in &self.entries {
            for &(d2, p2) in &other.entries {
                let d = d1 + d2;
                match acc.iter_mut().find(|(dd, _)| *dd == d) {
                    Some((_, p)) => *p += p1 * p2,
                    None => acc.push((d, p1 * p2)),
                }
            }
        }
        acc.sort_by_key(|&(d, _)| d);
        DegreeLaw { entries: acc }
    }
}

/// Per-position variable node degree distribution of an ensemble.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeProfile {
    positions: Vec<Vec<(u32, f64)>>,
}

impl DegreeProfile {
    pub fn new(positions: Vec<DegreeLaw>) -> Self {
        DegreeProfile {
            positions: positions.into_iter().map(|l| l.entries).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Degree law entries at position `i` (0-based).
    pub fn at(&self, i: usize) -> &[(u32, f64)] {
        &self.positions[i]
    }

    /// Node degree at a regular position; `None` when the position is mixed.
    pub fn regular_degree_at(&self, i: usize) -> Option<u32> {
        match self.positions[i].as_slice() {
            [(d, _)] => Some(*d),
            _ => None,
        }
    }

    /// Average node degree at position `i`.
    pub fn mean_degree_at(&self, i: usize) -> f64 {
        self.positions[i].iter().map(|&(d, p)| d as f64 * p).sum()
    }
}

// ---------------------------------------------------------------------------
// Ensemble specification
// ---------------------------------------------------------------------------

/// The four coupled families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Sc,
    Circular,
    Loop,
    Oc,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Family::Sc => "sc",
            Family::Circular => "circular",
            Family::Loop => "loop",
            Family::Oc => "oc",
        };
        f.write_str(s)
    }
}

/// A fully determined random-based coupled ensemble.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    family: Family,
    dl: u32,
    dr: u32,
    chain_len: usize,
    coupling: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    law: Option<DegreeLaw>,
}

impl EnsembleSpec {
    fn validate_common(dl: u32, dr: u32, chain_len: usize, coupling: usize) -> Result<(), EnsembleError> {
        if dl < 2 || dr < dl {
            return Err(invalid(format!("need dr >= dl >= 2, got dl={dl}, dr={dr}")));
        }
        if coupling < 2 {
            return Err(invalid(format!("coupling length w={coupling} < 2")));
        }
        if chain_len < coupling {
            return Err(invalid(format!("chain length L={chain_len} < w={coupling}")));
        }
        Ok(())
    }

    pub fn sc(dl: u32, dr: u32, chain_len: usize, coupling: usize) -> Result<Self, EnsembleError> {
        Self::validate_common(dl, dr, chain_len, coupling)?;
        Ok(EnsembleSpec {
            family: Family::Sc,
            dl,
            dr,
            chain_len,
            coupling,
            law: None,
        })
    }

    pub fn circular(dl: u32, dr: u32, chain_len: usize, coupling: usize) -> Result<Self, EnsembleError> {
        Self::validate_common(dl, dr, chain_len, coupling)?;
        Ok(EnsembleSpec {
            family: Family::Circular,
            dl,
            dr,
            chain_len,
            coupling,
            law: None,
        })
    }

    /// Loop ensemble; only the (3,6,L,3) case is defined.
    pub fn loop_ensemble(dl: u32, dr: u32, chain_len: usize) -> Result<Self, EnsembleError> {
        if (dl, dr) != (3, 6) {
            return Err(invalid(format!(
                "loop ensemble is defined only for (dl,dr)=(3,6), got ({dl},{dr})"
            )));
        }
        loop_regions(chain_len)?;
        Ok(EnsembleSpec {
            family: Family::Loop,
            dl,
            dr,
            chain_len,
            coupling: 3,
            law: None,
        })
    }

    pub fn oc(dl: u32, dr: u32, chain_len: usize, coupling: usize) -> Result<Self, EnsembleError> {
        Self::validate_common(dl, dr, chain_len, coupling)?;
        oc_half_len(chain_len, coupling)?;
        Ok(EnsembleSpec {
            family: Family::Oc,
            dl,
            dr,
            chain_len,
            coupling,
            law: None,
        })
    }

    /// Spatially-coupled chain built from an irregular node-degree law.
    pub fn sc_irregular(law: DegreeLaw, dr: u32, chain_len: usize, coupling: usize) -> Result<Self, EnsembleError> {
        Self::validate_common(2, dr, chain_len, coupling)?;
        Ok(EnsembleSpec {
            family: Family::Sc,
            dl: 0,
            dr,
            chain_len,
            coupling,
            law: Some(law),
        })
    }

    /// Overlapped-circular ensemble built from an irregular node-degree law.
    pub fn oc_irregular(law: DegreeLaw, dr: u32, chain_len: usize, coupling: usize) -> Result<Self, EnsembleError> {
        Self::validate_common(2, dr, chain_len, coupling)?;
        oc_half_len(chain_len, coupling)?;
        Ok(EnsembleSpec {
            family: Family::Oc,
            dl: 0,
            dr,
            chain_len,
            coupling,
            law: Some(law),
        })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    /// Regular variable degree; `None` for irregular specs.
    pub fn dl(&self) -> Option<u32> {
        if self.law.is_some() {
            None
        } else {
            Some(self.dl)
        }
    }

    pub fn dr(&self) -> u32 {
        self.dr
    }

    pub fn chain_len(&self) -> usize {
        self.chain_len
    }

    pub fn coupling(&self) -> usize {
        self.coupling
    }

    pub fn irregular_law(&self) -> Option<&DegreeLaw> {
        self.law.as_ref()
    }

    /// Base node-degree law (regular d_l or the irregular law).
    pub fn base_law(&self) -> DegreeLaw {
        match &self.law {
            Some(law) => law.clone(),
            None => DegreeLaw::regular(self.dl),
        }
    }

    /// Half-chain length L_s of an OC spec.
    pub fn oc_half_len(&self) -> Option<usize> {
        match self.family {
            Family::Oc => Some(oc_half_len(self.chain_len, self.coupling).expect("validated")),
            _ => None,
        }
    }

    /// Overlapped (protected) variable positions of an OC spec, 0-based.
    pub fn overlapped_positions(&self) -> Option<std::ops::Range<usize>> {
        self.oc_half_len().map(|ls| ls..ls + self.coupling - 1)
    }

    pub fn connectivity(&self) -> ConnectivityMatrix {
        match self.family {
            Family::Sc => connectivity_sc(self.chain_len, self.coupling),
            Family::Circular => connectivity_circular(self.chain_len, self.coupling),
            Family::Loop => connectivity_loop(self.chain_len),
            Family::Oc => connectivity_oc(self.chain_len, self.coupling),
        }
        .expect("spec was validated at construction")
    }

    pub fn degree_profile(&self) -> DegreeProfile {
        degree_profile(self).expect("spec was validated at construction")
    }

    pub fn design_rate<R: Real>(&self) -> R {
        design_rate(self)
    }
}

impl fmt::Display for EnsembleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.law, self.family) {
            (None, Family::Loop) => write!(f, "loop({},{},{})", self.dl, self.dr, self.chain_len),
            (None, fam) => write!(
                f,
                "{}({},{},{},{})",
                fam, self.dl, self.dr, self.chain_len, self.coupling
            ),
            (Some(_), fam) => write!(
                f,
                "{}(irregular,{},{},{})",
                fam, self.dr, self.chain_len, self.coupling
            ),
        }
    }
}

fn oc_half_len(chain_len: usize, coupling: usize) -> Result<usize, EnsembleError> {
    let span = chain_len + 1 - coupling;
    if span % 2 != 0 || span < 2 {
        return Err(invalid(format!(
            "OC requires L = 2*Ls + w - 1 with Ls >= 1, got L={chain_len}, w={coupling}"
        )));
    }
    Ok(span / 2)
}

/// Cross-edge variable regions of the loop ensemble, 0-based global indices.
///
/// Returns `(region_1, region_2)` where region 1 lives on the first chain and
/// region 2 on the second. Rejects chain lengths whose cross-edge indices
/// fall out of range or touch the outermost chain positions.
pub fn loop_regions(chain_len: usize) -> Result<([usize; 3], [usize; 3]), EnsembleError> {
    let l = chain_len;
    let a = l.div_ceil(3); // ceil(L/3)
    let b = 2 * l / 3; // floor(2L/3)
    if a < 2 || b + 2 > l {
        return Err(invalid(format!("loop cross edges out of range for L={l}")));
    }
    // keep the high-degree regions off the chain ends
    if a - 1 < 2 || a + 1 > l - 1 || b < 2 || b + 2 > l - 1 {
        return Err(invalid(format!(
            "loop cross-edge region touches a chain boundary for L={l}"
        )));
    }
    let r1 = [a - 2, a - 1, a]; // 1-based {a-1, a, a+1}
    let r2 = [l + b - 1, l + b, l + b + 1]; // 1-based {L+b, L+b+1, L+b+2}
    Ok((r1, r2))
}

// ---------------------------------------------------------------------------
// Connectivity constructors
// ---------------------------------------------------------------------------

/// Connectivity of the spatially-coupled chain: (L+w-1) x L band matrix with
/// ones at rows v..v+w-1 in column v.
pub fn connectivity_sc(chain_len: usize, coupling: usize) -> Result<ConnectivityMatrix, EnsembleError> {
    let (l, w) = (chain_len, coupling);
    if w < 2 || l < w {
        return Err(invalid(format!("need L >= w >= 2, got L={l}, w={w}")));
    }
    let mut m = ConnectivityMatrix::zeros(l + w - 1, l)?;
    for v in 0..l {
        for u in v..v + w {
            m.set(u, v);
        }
    }
    Ok(m)
}

/// Connectivity of the circular (tail-biting) chain: square circulant of size
/// L+w-1 whose first L columns equal the spatially-coupled band.
pub fn connectivity_circular(chain_len: usize, coupling: usize) -> Result<ConnectivityMatrix, EnsembleError> {
    let (l, w) = (chain_len, coupling);
    if w < 2 || l < w {
        return Err(invalid(format!("need L >= w >= 2, got L={l}, w={w}")));
    }
    let n = l + w - 1;
    let mut m = ConnectivityMatrix::zeros(n, n)?;
    for v in 0..n {
        for j in 0..w {
            m.set((v + j) % n, v);
        }
    }
    Ok(m)
}

/// Connectivity of the loop ensemble: two spatially-coupled chains with
/// three cross edges near each chain's interior third.
pub fn connectivity_loop(chain_len: usize) -> Result<ConnectivityMatrix, EnsembleError> {
    let l = chain_len;
    let (r1, r2) = loop_regions(l)?;
    let sc = connectivity_sc(l, 3)?;
    let n = l + 2;
    let mut m = ConnectivityMatrix::zeros(2 * n, 2 * l)?;
    for (u, v) in sc.ones() {
        m.set(u, v);
        m.set(n + u, l + v);
    }
    // cross block from second-chain checks into first-chain variables:
    // rows 1,1,2 against the three region-1 positions
    m.set(n, r1[0]);
    m.set(n, r1[1]);
    m.set(n + 1, r1[2]);
    // cross block from first-chain checks into second-chain variables:
    // rows L+1,L+2,L+2 against the three region-2 positions
    m.set(l, l + (r2[0] - l));
    m.set(l + 1, l + (r2[1] - l));
    m.set(l + 1, l + (r2[2] - l));
    Ok(m)
}

/// Connectivity of the overlapped-circular ensemble: two circular chains of
/// half length sharing their wrap columns.
pub fn connectivity_oc(chain_len: usize, coupling: usize) -> Result<ConnectivityMatrix, EnsembleError> {
    let (l, w) = (chain_len, coupling);
    if w < 2 {
        return Err(invalid(format!("coupling length w={w} < 2")));
    }
    if l < w {
        return Err(invalid(format!("chain length L={l} < w={w}")));
    }
    let ls = oc_half_len(l, w)?;
    let circ = connectivity_circular(ls, w)?;
    let n = ls + w - 1;
    let mut m = ConnectivityMatrix::zeros(2 * n, l)?;
    for (u, v) in circ.ones() {
        if v < ls {
            // band part of each chain
            m.set(u, v);
            m.set(n + u, (ls + w - 1) + v);
        } else {
            // wrap part lands on the shared overlapped columns
            m.set(u, v);
            m.set(n + u, v);
        }
    }
    Ok(m)
}

// ---------------------------------------------------------------------------
// Degree profiles and design rates
// ---------------------------------------------------------------------------

/// Per-position degree distribution of an ensemble.
///
/// Overlapped OC positions carry the law of the sum of two independent node
/// draws; for regular ensembles this is plain degree doubling.
pub fn degree_profile(spec: &EnsembleSpec) -> Result<DegreeProfile, EnsembleError> {
    let base = spec.base_law();
    let positions = match spec.family() {
        Family::Sc | Family::Circular => {
            let q = spec.connectivity().cols();
            vec![base; q]
        }
        Family::Loop => {
            let l = spec.chain_len();
            let (r1, r2) = loop_regions(l)?;
            let high: BTreeSet<usize> = r1.iter().chain(r2.iter()).copied().collect();
            (0..2 * l)
                .map(|i| {
                    if high.contains(&i) {
                        DegreeLaw::regular(4)
                    } else {
                        DegreeLaw::regular(3)
                    }
                })
                .collect()
        }
        Family::Oc => {
            let overlap = spec.overlapped_positions().expect("oc spec");
            let merged = base.overlapped_with(&base);
            (0..spec.chain_len())
                .map(|i| {
                    if overlap.contains(&i) {
                        merged.clone()
                    } else {
                        base.clone()
                    }
                })
                .collect()
        }
    };
    Ok(DegreeProfile::new(positions))
}

/// Design rate of an ensemble.
///
/// The spatially-coupled chain includes the rate gain from boundary check
/// positions whose sockets can stay unconnected; the circular chain has no
/// boundary, the loop and OC families keep every check connected.
pub fn design_rate<R: Real>(spec: &EnsembleSpec) -> R {
    let ratio = spec.base_law().mean_degree() / spec.dr() as f64;
    let l = spec.chain_len() as f64;
    let w = spec.coupling() as f64;
    let rate = match spec.family() {
        Family::Sc => {
            let unconnected: f64 = (0..spec.coupling())
                .map(|i| (i as f64 / w).powi(spec.dr() as i32))
                .sum();
            (1.0 - ratio) - ratio * (w - 1.0) / l + ratio * 2.0 * unconnected / l
        }
        Family::Circular => 1.0 - ratio,
        Family::Loop => 0.5 - 1.0 / l,
        Family::Oc => (1.0 - ratio) - ratio * (w - 1.0) / l,
    };
    R::from_f64_lossy(rate)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn sc_band_shape() {
        let t = connectivity_sc(8, 3).unwrap();
        assert_eq!((t.rows(), t.cols()), (10, 8));
        for v in 0..8 {
            assert_eq!(t.col_sum(v), 3);
        }
        assert!(t.get(0, 0));
        assert!(!t.get(3, 0));
        let row_sums: Vec<usize> = (0..10).map(|u| t.row_sum(u)).collect();
        assert_eq!(row_sums, vec![1, 2, 3, 3, 3, 3, 3, 3, 2, 1]);
    }

    #[test]
    fn sc_smallest_legal_case() {
        let t = connectivity_sc(2, 2).unwrap();
        assert_eq!((t.rows(), t.cols()), (3, 2));
        for v in 0..2 {
            let rows: Vec<usize> = t.col_neighbors(v).collect();
            assert_eq!(rows, vec![v, v + 1]);
        }
    }

    #[test]
    fn sc_rejects_bad_parameters() {
        assert!(connectivity_sc(2, 3).is_err());
        assert!(connectivity_sc(5, 1).is_err());
    }

    #[test]
    fn circular_band_plus_wrap() {
        let t = connectivity_circular(3, 3).unwrap();
        assert_eq!((t.rows(), t.cols()), (5, 5));
        let sc = connectivity_sc(3, 3).unwrap();
        for v in 0..3 {
            for u in 0..5 {
                assert_eq!(t.get(u, v), sc.get(u, v));
            }
        }
        for v in 3..5 {
            assert_eq!(t.col_sum(v), 3);
        }
        for u in 0..5 {
            assert_eq!(t.row_sum(u), 3);
        }
    }

    #[test]
    fn circular_is_circulant() {
        for (l, w) in [(3usize, 3usize), (5, 2), (8, 4)] {
            let t = connectivity_circular(l, w).unwrap();
            let n = l + w - 1;
            for u in 0..n {
                for v in 0..n {
                    assert_eq!(t.get(u, v), t.get((u + 1) % n, (v + 1) % n));
                }
            }
        }
    }

    #[test]
    fn loop_column_sums() {
        let t = connectivity_loop(9).unwrap();
        assert_eq!((t.rows(), t.cols()), (22, 18));
        assert_eq!(t.col_sum(1), 4); // position 2, 1-based
        assert_eq!(t.col_sum(0), 3);
    }

    #[test]
    fn loop_cross_edge_count() {
        let t = connectivity_loop(12).unwrap();
        let sc = connectivity_sc(12, 3).unwrap();
        let total: usize = (0..t.rows()).map(|u| t.row_sum(u)).sum();
        let sc_total: usize = (0..sc.rows()).map(|u| sc.row_sum(u)).sum();
        assert_eq!(total, 2 * sc_total + 6);
    }

    #[test]
    fn loop_high_degree_positions_l18() {
        let t = connectivity_loop(18).unwrap();
        let heavy: Vec<usize> = (0..t.cols()).filter(|&v| t.col_sum(v) == 4).collect();
        // 1-based {5,6,7,30,31,32}
        assert_eq!(heavy, vec![4, 5, 6, 29, 30, 31]);
    }

    #[test]
    fn loop_rejects_out_of_range() {
        assert!(connectivity_loop(5).is_err());
        assert!(connectivity_loop(6).is_err());
        assert!(connectivity_loop(8).is_ok());
    }

    #[test]
    fn oc_matches_printed_matrix() {
        let t = connectivity_oc(8, 3).unwrap();
        assert_eq!((t.rows(), t.cols()), (10, 8));
        let expected = [
            "10011000", "11001000", "11100000", "01110000", "00111000", "00011100", "00001110",
            "00000111", "00010011", "00011001",
        ];
        for (u, row) in expected.iter().enumerate() {
            for (v, ch) in row.chars().enumerate() {
                assert_eq!(t.get(u, v), ch == '1', "entry ({},{})", u + 1, v + 1);
            }
        }
    }

    #[test]
    fn oc_column_sums() {
        let t = connectivity_oc(8, 3).unwrap();
        for v in 0..8 {
            let expected = if v == 3 || v == 4 { 6 } else { 3 };
            assert_eq!(t.col_sum(v), expected, "column {}", v + 1);
        }
    }

    #[test]
    fn oc_embeds_half_chain() {
        // deleting overlapped columns and the lower row block leaves the
        // half-length band matrix
        let t = connectivity_oc(12, 3).unwrap();
        assert_eq!((t.rows(), t.cols()), (14, 12));
        let sc = connectivity_sc(5, 3).unwrap();
        for u in 0..7 {
            for v in 0..5 {
                assert_eq!(t.get(u, v), sc.get(u, v));
            }
        }
    }

    #[test]
    fn oc_and_sc_have_equal_dimensions() {
        for (l, w) in [(8usize, 3usize), (12, 3), (13, 4), (10, 5)] {
            let oc = connectivity_oc(l, w);
            let sc = connectivity_sc(l, w).unwrap();
            if let Ok(oc) = oc {
                assert_eq!((oc.rows(), oc.cols()), (sc.rows(), sc.cols()));
            }
        }
    }

    #[test]
    fn oc_rejects_odd_span() {
        assert!(connectivity_oc(9, 3).is_err());
        assert!(connectivity_oc(3, 3).is_err());
    }

    #[test]
    fn oc_reversal_symmetry() {
        // [T_SC]_{i,j} = [T_SC]_{Ls+w-i, Ls+1-j}, [T_CR]_{i,j} = [T_CR]_{Ls+w-i, w-j}
        for (l, w) in [(8usize, 3usize), (12, 3), (13, 4)] {
            let ls = (l + 1 - w) / 2;
            let t = connectivity_oc(l, w).unwrap();
            let n = ls + w - 1;
            for i in 1..=n {
                for j in 1..=ls {
                    assert_eq!(t.get(i - 1, j - 1), t.get(n - i, ls - j));
                }
                for j in 1..=w - 1 {
                    let (a, b) = (ls + j, ls + (w - 1 - j));
                    assert_eq!(t.get(i - 1, a - 1), t.get(n - i, b + 1 - 1));
                }
            }
        }
    }

    #[test]
    fn degree_profile_oc_regular() {
        let spec = EnsembleSpec::oc(3, 6, 8, 3).unwrap();
        let prof = spec.degree_profile();
        let degrees: Vec<u32> = (0..8).map(|i| prof.regular_degree_at(i).unwrap()).collect();
        assert_eq!(degrees, vec![3, 3, 3, 6, 6, 3, 3, 3]);
    }

    #[test]
    fn degree_profile_loop_l9() {
        let spec = EnsembleSpec::loop_ensemble(3, 6, 9).unwrap();
        let prof = spec.degree_profile();
        let heavy: Vec<usize> = (0..prof.len())
            .filter(|&i| prof.regular_degree_at(i) == Some(4))
            .collect();
        // 1-based {2,3,4,15,16,17}
        assert_eq!(heavy, vec![1, 2, 3, 14, 15, 16]);
    }

    #[test]
    fn degree_profile_oc_irregular_overlap_law() {
        let law = DegreeLaw::new(vec![(3, 19.0 / 20.0), (23, 1.0 / 20.0)]).unwrap();
        let spec = EnsembleSpec::oc_irregular(law, 8, 22, 3).unwrap();
        let prof = spec.degree_profile();
        let overlap = prof.at(10);
        assert_eq!(overlap.len(), 3);
        assert_eq!(overlap[0].0, 6);
        assert_abs_diff_eq!(overlap[0].1, 0.9025, epsilon = 1e-15);
        assert_eq!(overlap[1].0, 26);
        assert_abs_diff_eq!(overlap[1].1, 0.095, epsilon = 1e-15);
        assert_eq!(overlap[2].0, 46);
        assert_abs_diff_eq!(overlap[2].1, 0.0025, epsilon = 1e-15);
        assert_eq!(prof.at(0), spec.base_law().entries());
    }

    #[test]
    fn design_rates_match_published_values() {
        let r: f64 = EnsembleSpec::sc(3, 6, 8, 3).unwrap().design_rate();
        assert_abs_diff_eq!(r, 0.3861, epsilon = 5e-5);
        let r: f64 = EnsembleSpec::oc(3, 6, 8, 3).unwrap().design_rate();
        assert_abs_diff_eq!(r, 0.3750, epsilon = 5e-5);
        let r: f64 = EnsembleSpec::loop_ensemble(3, 6, 8).unwrap().design_rate();
        assert_abs_diff_eq!(r, 0.3750, epsilon = 5e-5);
        let r: f64 = EnsembleSpec::oc(4, 8, 50, 3).unwrap().design_rate();
        assert_abs_diff_eq!(r, 0.4800, epsilon = 5e-5);
    }

    #[test]
    fn sc_rate_exceeds_oc_rate_by_correction_term() {
        for l in [8usize, 10, 12, 20] {
            let sc: f64 = EnsembleSpec::sc(3, 6, l, 3).unwrap().design_rate();
            let oc: f64 = EnsembleSpec::oc(3, 6, l, 3).unwrap().design_rate();
            let correction = 0.5 * 2.0 * ((1f64 / 3.0).powi(6) + (2f64 / 3.0).powi(6)) / l as f64;
            assert!(sc >= oc);
            assert_abs_diff_eq!(sc - oc, correction, epsilon = 1e-12);
        }
    }

    #[test]
    fn oc_overlap_preserves_edge_count() {
        // total degree mass equals that of the two circular half chains
        let spec = EnsembleSpec::oc(3, 6, 12, 3).unwrap();
        let prof = spec.degree_profile();
        let total: f64 = (0..prof.len()).map(|i| prof.mean_degree_at(i)).sum();
        let circ_positions = spec.oc_half_len().unwrap() + spec.coupling() - 1;
        assert_abs_diff_eq!(total, (2 * circ_positions * 3) as f64, epsilon = 1e-9);
    }

    #[test]
    fn connectivity_json_round_trip() {
        let t = connectivity_oc(8, 3).unwrap();
        let json = serde_json::to_string(&t).unwrap();
        assert!(json.contains("\"rows\":10"));
        assert!(json.contains("[1,1]"));
        let back: ConnectivityMatrix = serde_json::from_str(&json).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn degree_profile_json_shape() {
        let spec = EnsembleSpec::oc(3, 6, 8, 3).unwrap();
        let json = serde_json::to_string(&spec.degree_profile()).unwrap();
        assert!(json.starts_with("{\"positions\":[[[3,1.0]"));
    }

    #[test]
    fn degree_law_validation() {
        assert!(DegreeLaw::new(vec![(3, 0.5), (4, 0.4)]).is_err());
        assert!(DegreeLaw::new(vec![(1, 1.0)]).is_err());
        assert!(DegreeLaw::new(vec![(3, 0.5), (3, 0.5)]).is_err());
        let law = DegreeLaw::new(vec![(23, 0.05), (3, 0.95)]).unwrap();
        assert_eq!(law.entries()[0].0, 3);
        assert_abs_diff_eq!(law.mean_degree(), 4.0, epsilon = 1e-12);
        let ef = law.edge_fractions();
        assert_abs_diff_eq!(ef[0].1, 0.7125, epsilon = 1e-12);
        assert_abs_diff_eq!(ef[1].1, 0.2875, epsilon = 1e-12);
    }
}
