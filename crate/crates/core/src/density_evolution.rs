//! Density evolution over the binary erasure channel for coupled ensembles.
//!
//! The recursion tracks one average erasure probability per variable node
//! position. Each iteration averages incoming erasures over the coupling
//! width on the check side (positions outside the chain count as known),
//! applies the check nonlinearity, averages back over each variable
//! position's connected check positions, and applies the variable-side
//! power law weighted by edge fractions.

use serde::Serialize;
use thiserror::Error;

use crate::ensembles::{ConnectivityMatrix, DegreeProfile, EnsembleError, EnsembleSpec};
use crate::scalar::Real;

/// Cited MAP threshold of the (3,6)-regular ensemble; reference constant,
/// never computed here.
pub const MAP_THRESHOLD_REF_3_6: f64 = 0.4881;
/// Cited MAP threshold of the (4,8)-regular ensemble; reference constant.
pub const MAP_THRESHOLD_REF_4_8: f64 = 0.497;

/// Errors from density evolution entry points.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum DeError {
    #[error("density_evolution: dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("density_evolution: erasure probability {0} outside [0,1]")]
    EpsOutOfRange(f64),
    #[error("density_evolution: erasure vector entry {0} outside [0,1]")]
    StateOutOfRange(f64),
    #[error("density_evolution: {0}")]
    InvalidParameters(String),
    #[error(transparent)]
    Ensemble(#[from] EnsembleError),
}

/// Stopping rules for the fixed-point iteration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeSettings<R> {
    /// Hard iteration cap.
    pub max_iter: usize,
    /// Success once every position erasure is at or below this.
    pub decode_tol: R,
    /// Declared failure once the largest per-position change falls below
    /// `stall_tol` relative to the current peak erasure.
    pub stall_tol: R,
}

impl<R: Real> Default for DeSettings<R> {
    fn default() -> Self {
        DeSettings {
            max_iter: 200_000,
            decode_tol: R::from_f64_lossy(1e-8),
            stall_tol: R::from_f64_lossy(1e-12),
        }
    }
}

impl<R: Real> DeSettings<R> {
    /// Settings for counting required iterations; the looser decode
    /// tolerance matches the published iteration tables.
    pub fn for_iteration_counts(decode_tol: R) -> Self {
        DeSettings {
            decode_tol,
            ..Self::default()
        }
    }
}

/// Result of one density evolution run.
#[derive(Debug, Clone, Serialize)]
pub struct DeOutcome<R> {
    /// Whether every position reached the decode tolerance.
    pub converged: bool,
    /// Iterations executed when the run stopped.
    pub iterations: usize,
    /// Largest per-position erasure at the final iteration.
    pub final_max_erasure: R,
    /// Optional per-iteration snapshots, starting with the initial state.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trajectory: Option<Vec<Vec<R>>>,
}

/// Result of a threshold bisection.
#[derive(Debug, Clone, Serialize)]
pub struct ThresholdResult<R> {
    /// Midpoint of the final bracket.
    pub threshold: R,
    /// Width of the final bracket.
    pub bracket_width: R,
    /// Stopping rules the inner runs used.
    pub settings: DeSettings<R>,
}

// ---------------------------------------------------------------------------
// Compiled recursion
// ---------------------------------------------------------------------------

/// A connectivity matrix and degree profile compiled for iteration.
#[derive(Debug, Clone)]
pub struct DeSystem<R> {
    check_neighbors: Vec<Vec<u32>>,
    var_neighbors: Vec<Vec<u32>>,
    inv_coupling: R,
    inv_col: Vec<R>,
    check_exp: i32,
    var_terms: Vec<Vec<(i32, R)>>,
    clamped: Vec<u32>,
}

impl<R: Real> DeSystem<R> {
    /// Compiles the recursion for an ensemble spec.
    pub fn for_spec(spec: &EnsembleSpec) -> Self {
        Self::from_parts(&spec.connectivity(), &spec.degree_profile(), spec.dr())
            .expect("spec connectivity and profile are consistent")
    }

    /// Compiles the recursion from explicit parts.
    pub fn from_parts(
        t: &ConnectivityMatrix,
        profile: &DegreeProfile,
        dr: u32,
    ) -> Result<Self, DeError> {
        if profile.len() != t.cols() {
            return Err(DeError::DimensionMismatch {
                expected: t.cols(),
                got: profile.len(),
            });
        }
        if dr < 2 {
            return Err(DeError::InvalidParameters(format!("check degree {dr} < 2")));
        }
        let check_neighbors: Vec<Vec<u32>> = (0..t.rows())
            .map(|u| t.row_neighbors(u).map(|v| v as u32).collect())
            .collect();
        let var_neighbors: Vec<Vec<u32>> = (0..t.cols())
            .map(|v| t.col_neighbors(v).map(|u| u as u32).collect())
            .collect();
        let coupling = t.max_row_sum();
        let inv_col = (0..t.cols())
            .map(|v| R::one() / R::from_f64_lossy(t.col_sum(v) as f64))
            .collect();
        let var_terms = (0..profile.len())
            .map(|i| {
                let mean: f64 = profile.at(i).iter().map(|&(d, p)| d as f64 * p).sum();
                profile
                    .at(i)
                    .iter()
                    .map(|&(d, p)| (d as i32 - 1, R::from_f64_lossy(d as f64 * p / mean)))
                    .collect()
            })
            .collect();
        Ok(DeSystem {
            check_neighbors,
            var_neighbors,
            inv_coupling: R::one() / R::from_f64_lossy(coupling as f64),
            inv_col,
            check_exp: dr as i32 - 1,
            var_terms,
            clamped: Vec::new(),
        })
    }

    /// Forces the given variable positions to zero erasure at every
    /// iteration, modeling perfectly known positions.
    pub fn with_clamped(mut self, positions: &[usize]) -> Self {
        self.clamped = positions.iter().map(|&p| p as u32).collect();
        self
    }

    /// Number of variable node positions.
    pub fn num_positions(&self) -> usize {
        self.var_neighbors.len()
    }

    fn step_into(&self, eps: R, x: &[R], check_buf: &mut [R], out: &mut [R]) {
        for (u, nb) in self.check_neighbors.iter().enumerate() {
            let mut s = R::zero();
            for &v in nb {
                s = s + x[v as usize];
            }
            let avg = s * self.inv_coupling;
            check_buf[u] = R::one() - (R::one() - avg).powi(self.check_exp);
        }
        for (i, nb) in self.var_neighbors.iter().enumerate() {
            let mut s = R::zero();
            for &u in nb {
                s = s + check_buf[u as usize];
            }
            let avg = s * self.inv_col[i];
            let mut acc = R::zero();
            for &(e, wt) in &self.var_terms[i] {
                acc = acc + wt * avg.powi(e);
            }
            out[i] = eps * acc;
        }
        for &i in &self.clamped {
            out[i as usize] = R::zero();
        }
    }

    /// One synchronous update of the erasure vector.
    pub fn step(&self, eps: R, x: &[R]) -> Vec<R> {
        let mut check_buf = vec![R::zero(); self.check_neighbors.len()];
        let mut out = vec![R::zero(); x.len()];
        self.step_into(eps, x, &mut check_buf, &mut out);
        out
    }

    fn initial_state(&self) -> Vec<R> {
        let mut x = vec![R::one(); self.num_positions()];
        for &i in &self.clamped {
            x[i as usize] = R::zero();
        }
        x
    }

    /// Runs the recursion from the all-ones state.
    pub fn evolve(&self, eps: R, settings: &DeSettings<R>) -> DeOutcome<R> {
        self.run(eps, settings, false)
    }

    /// As [`evolve`](Self::evolve), recording every iterate.
    pub fn evolve_traced(&self, eps: R, settings: &DeSettings<R>) -> DeOutcome<R> {
        self.run(eps, settings, true)
    }

    fn run(&self, eps: R, settings: &DeSettings<R>, record: bool) -> DeOutcome<R> {
        let mut x = self.initial_state();
        let mut next = vec![R::zero(); x.len()];
        let mut check_buf = vec![R::zero(); self.check_neighbors.len()];
        let mut trajectory = record.then(|| vec![x.clone()]);
        let mut max = R::one();
        for l in 1..=settings.max_iter {
            self.step_into(eps, &x, &mut check_buf, &mut next);
            max = next.iter().cloned().fold(R::zero(), R::max);
            let change = x
                .iter()
                .zip(next.iter())
                .map(|(&a, &b)| (a - b).abs())
                .fold(R::zero(), R::max);
            std::mem::swap(&mut x, &mut next);
            if let Some(t) = trajectory.as_mut() {
                t.push(x.clone());
            }
            if max <= settings.decode_tol {
                return DeOutcome {
                    converged: true,
                    iterations: l,
                    final_max_erasure: max,
                    trajectory,
                };
            }
            if change < settings.stall_tol * max.max(R::min_positive_value()) {
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
}

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

fn check_eps<R: Real>(eps: R) -> Result<(), DeError> {
    if eps < R::zero() || eps > R::one() {
        return Err(DeError::EpsOutOfRange(eps.to_f64().unwrap_or(f64::NAN)));
    }
    Ok(())
}

/// One synchronous density evolution update.
pub fn de_step<R: Real>(
    t: &ConnectivityMatrix,
    profile: &DegreeProfile,
    dr: u32,
    eps: R,
    x: &[R],
) -> Result<Vec<R>, DeError> {
    check_eps(eps)?;
    if x.len() != t.cols() {
        return Err(DeError::DimensionMismatch {
            expected: t.cols(),
            got: x.len(),
        });
    }
    for &xi in x {
        if xi < R::zero() || xi > R::one() {
            return Err(DeError::StateOutOfRange(xi.to_f64().unwrap_or(f64::NAN)));
        }
    }
    let system = DeSystem::from_parts(t, profile, dr)?;
    Ok(system.step(eps, x))
}

/// Runs density evolution for a spec from the all-ones initial state.
pub fn evolve<R: Real>(
    spec: &EnsembleSpec,
    eps: R,
    settings: &DeSettings<R>,
) -> Result<DeOutcome<R>, DeError> {
    check_eps(eps)?;
    Ok(DeSystem::for_spec(spec).evolve(eps, settings))
}

/// As [`evolve`], recording the whole trajectory.
pub fn evolve_traced<R: Real>(
    spec: &EnsembleSpec,
    eps: R,
    settings: &DeSettings<R>,
) -> Result<DeOutcome<R>, DeError> {
    check_eps(eps)?;
    Ok(DeSystem::for_spec(spec).evolve_traced(eps, settings))
}

fn bisect<R: Real>(eps_tol: R, mut decodes: impl FnMut(R) -> bool) -> (R, R) {
    let mut lo = R::zero();
    let mut hi = R::one();
    let half = R::from_f64_lossy(0.5);
    while hi - lo > eps_tol {
        let mid = (lo + hi) * half;
        if decodes(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    ((lo + hi) * half, hi - lo)
}

/// BP threshold of a coupled ensemble by bisection on the channel erasure
/// probability.
pub fn bp_threshold<R: Real>(spec: &EnsembleSpec, eps_tol: R) -> Result<ThresholdResult<R>, DeError> {
    if eps_tol <= R::zero() {
        return Err(DeError::InvalidParameters("eps_tol must be positive".into()));
    }
    let settings = DeSettings::default();
    let system = DeSystem::for_spec(spec);
    let (threshold, bracket_width) = bisect(eps_tol, |eps| system.evolve(eps, &settings).converged);
    Ok(ThresholdResult {
        threshold,
        bracket_width,
        settings,
    })
}

/// Minimum iteration count at which every position erasure reaches
/// `decode_tol`, or `None` when the run fails to decode.
pub fn required_iterations<R: Real>(
    spec: &EnsembleSpec,
    eps_r: R,
    decode_tol: R,
) -> Result<Option<usize>, DeError> {
    check_eps(eps_r)?;
    let settings = DeSettings::for_iteration_counts(decode_tol);
    let outcome = DeSystem::for_spec(spec).evolve(eps_r, &settings);
    Ok(outcome.converged.then_some(outcome.iterations))
}

/// BP threshold of the uncoupled (dl, dr)-regular ensemble via the scalar
/// recursion.
pub fn regular_bp_threshold<R: Real>(dl: u32, dr: u32, eps_tol: R) -> Result<R, DeError> {
    if dl < 2 || dr < dl {
        return Err(DeError::InvalidParameters(format!(
            "need dr >= dl >= 2, got dl={dl}, dr={dr}"
        )));
    }
    if eps_tol <= R::zero() {
        return Err(DeError::InvalidParameters("eps_tol must be positive".into()));
    }
    let settings: DeSettings<R> = DeSettings::default();
    let ve = dl as i32 - 1;
    let ce = dr as i32 - 1;
    let decodes = |eps: R| {
        let mut x = R::one();
        for _ in 0..settings.max_iter {
            let next = eps * (R::one() - (R::one() - x).powi(ce)).powi(ve);
            if next <= settings.decode_tol {
                return true;
            }
            if (x - next).abs() < settings.stall_tol * next {
                return false;
            }
            x = next;
        }
        false
    };
    Ok(bisect(eps_tol, decodes).0)
}

/// Whether the OC ensemble's threshold coincides (within `delta_s`) with the
/// half-length chain's threshold.
pub fn splitting_occurs<R: Real>(
    dl: u32,
    dr: u32,
    chain_len: usize,
    coupling: usize,
    delta_s: R,
) -> Result<bool, DeError> {
    let oc = EnsembleSpec::oc(dl, dr, chain_len, coupling)?;
    let ls = oc.oc_half_len().expect("oc spec");
    let sc = EnsembleSpec::sc(dl, dr, ls, coupling)?;
    let eps_tol = delta_s / R::from_f64_lossy(10.0);
    let thr_sc = bp_threshold(&sc, eps_tol)?.threshold;
    let thr_oc = bp_threshold(&oc, eps_tol)?.threshold;
    Ok(thr_sc - thr_oc < delta_s)
}

/// Necessary condition for splitting: the half chain's threshold must not
/// exceed the uncoupled (2*dl, dr) threshold by more than `delta_s`.
pub fn splitting_necessary_condition<R: Real>(
    dl: u32,
    dr: u32,
    half_len: usize,
    coupling: usize,
    delta_s: R,
) -> Result<bool, DeError> {
    let sc = EnsembleSpec::sc(dl, dr, half_len, coupling)?;
    let eps_tol = delta_s / R::from_f64_lossy(10.0);
    let thr_sc = bp_threshold(&sc, eps_tol)?.threshold;
    let protected = regular_bp_threshold(2 * dl, dr, eps_tol)?;
    Ok(thr_sc < protected + delta_s)
}

/// Per-point outcome of a bound check between the OC ensemble and its half
/// chain.
#[derive(Debug, Clone, Serialize)]
pub struct BoundCheckPoint<R> {
    pub eps: R,
    pub iterations_oc: Option<usize>,
    pub iterations_sc: Option<usize>,
    /// Where both decode, the OC ensemble needs at least as many iterations.
    pub iteration_bound_holds: bool,
}

/// Report of the threshold and iteration bounds between OC and half chain.
#[derive(Debug, Clone, Serialize)]
pub struct BoundsReport<R> {
    pub threshold_oc: R,
    pub threshold_sc: R,
    pub threshold_bound_holds: bool,
    pub points: Vec<BoundCheckPoint<R>>,
}

impl<R> BoundsReport<R> {
    pub fn all_hold(&self) -> bool {
        self.threshold_bound_holds && self.points.iter().all(|p| p.iteration_bound_holds)
    }
}

/// Checks the two bounds relating the OC ensemble to its half chain: the OC
/// threshold never exceeds the half chain's, and wherever both decode the OC
/// ensemble needs at least as many iterations.
pub fn theorem1_bounds_check<R: Real>(
    dl: u32,
    dr: u32,
    half_len: usize,
    coupling: usize,
    eps_grid: &[R],
) -> Result<BoundsReport<R>, DeError> {
    let chain_len = 2 * half_len + coupling - 1;
    let oc = EnsembleSpec::oc(dl, dr, chain_len, coupling)?;
    let sc = EnsembleSpec::sc(dl, dr, half_len, coupling)?;
    let eps_tol = R::from_f64_lossy(1e-5);
    let thr_oc = bp_threshold(&oc, eps_tol)?.threshold;
    let thr_sc = bp_threshold(&sc, eps_tol)?.threshold;
    let decode_tol = R::from_f64_lossy(1e-6);
    let mut points = Vec::with_capacity(eps_grid.len());
    for &eps in eps_grid {
        let i_oc = required_iterations(&oc, eps, decode_tol)?;
        let i_sc = required_iterations(&sc, eps, decode_tol)?;
        let holds = match (i_oc, i_sc) {
            (Some(a), Some(b)) => a >= b,
            _ => true,
        };
        points.push(BoundCheckPoint {
            eps,
            iterations_oc: i_oc,
            iterations_sc: i_sc,
            iteration_bound_holds: holds,
        });
    }
    Ok(BoundsReport {
        threshold_oc: thr_oc,
        threshold_sc: thr_sc,
        threshold_bound_holds: thr_oc <= thr_sc + eps_tol,
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::{connectivity_sc, DegreeLaw};
    use approx::assert_abs_diff_eq;

    fn single_position_system() -> (ConnectivityMatrix, DegreeProfile) {
        let json = r#"{"rows":1,"cols":1,"ones":[[1,1]]}"#;
        let t: ConnectivityMatrix = serde_json::from_str(json).unwrap();
        let profile = DegreeProfile::new(vec![DegreeLaw::regular(3)]);
        (t, profile)
    }

    #[test]
    fn degenerate_case_matches_scalar_recursion() {
        let (t, profile) = single_position_system();
        for x0 in [0.1f64, 0.5, 0.9, 1.0] {
            let out = de_step(&t, &profile, 6, 0.45, &[x0]).unwrap();
            let expected = 0.45 * (1.0 - (1.0 - x0).powi(5)).powi(2);
            assert_abs_diff_eq!(out[0], expected, epsilon = 1e-15);
        }
    }

    #[test]
    fn zero_eps_zeroes_everything() {
        let spec = EnsembleSpec::oc(3, 6, 8, 3).unwrap();
        let t = spec.connectivity();
        let out = de_step(&t, &spec.degree_profile(), 6, 0.0, &vec![1.0; 8]).unwrap();
        assert!(out.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn de_step_validates_inputs() {
        let (t, profile) = single_position_system();
        assert!(matches!(
            de_step(&t, &profile, 6, 0.4, &[0.3, 0.4]),
            Err(DeError::DimensionMismatch { .. })
        ));
        assert!(matches!(
            de_step(&t, &profile, 6, 1.5, &[0.3]),
            Err(DeError::EpsOutOfRange(_))
        ));
    }

    #[test]
    fn oc_overlap_positions_are_joint_minimum_after_one_step() {
        let spec = EnsembleSpec::oc(3, 6, 8, 3).unwrap();
        let out = de_step(&spec.connectivity(), &spec.degree_profile(), 6, 0.48, &vec![1.0; 8]).unwrap();
        assert_abs_diff_eq!(out[3], out[4], epsilon = 1e-15);
        let others_min = out
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != 3 && i != 4)
            .map(|(_, &v)| v)
            .fold(f64::INFINITY, f64::min);
        assert!(out[3] <= others_min);
    }

    #[test]
    fn evolve_below_uncoupled_threshold_succeeds() {
        let spec = EnsembleSpec::sc(3, 6, 8, 3).unwrap();
        let outcome = evolve(&spec, 0.40, &DeSettings::default()).unwrap();
        assert!(outcome.converged);
        assert!(outcome.final_max_erasure <= 1e-8);
    }

    #[test]
    fn evolve_at_eps_one_stays_at_ones() {
        let spec = EnsembleSpec::sc(3, 6, 8, 3).unwrap();
        let outcome = evolve(&spec, 1.0, &DeSettings::default()).unwrap();
        assert!(!outcome.converged);
        assert_abs_diff_eq!(outcome.final_max_erasure, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn oc50_overlap_decodes_first() {
        let spec = EnsembleSpec::oc(3, 6, 50, 3).unwrap();
        let outcome = evolve_traced(&spec, 0.48, &DeSettings::default()).unwrap();
        assert!(outcome.converged);
        let trajectory = outcome.trajectory.unwrap();
        let first_decoded = trajectory
            .iter()
            .find(|x| x.iter().any(|&v| v <= 1e-8))
            .expect("some position decodes");
        let decoded: Vec<usize> = first_decoded
            .iter()
            .enumerate()
            .filter(|&(_, &v)| v <= 1e-8)
            .map(|(i, _)| i)
            .collect();
        // 1-based positions {25, 26}
        assert_eq!(decoded, vec![24, 25]);
    }

    #[test]
    fn trajectory_is_coordinatewise_non_increasing() {
        let spec = EnsembleSpec::oc(3, 6, 12, 3).unwrap();
        let outcome = evolve_traced(&spec, 0.52, &DeSettings::default()).unwrap();
        let trajectory = outcome.trajectory.unwrap();
        for pair in trajectory.windows(2) {
            for (a, b) in pair[0].iter().zip(pair[1].iter()) {
                assert!(b <= a, "erasures must not increase");
            }
        }
    }

    #[test]
    fn required_iterations_at_zero_eps_is_one() {
        let spec = EnsembleSpec::sc(3, 6, 8, 3).unwrap();
        assert_eq!(required_iterations(&spec, 0.0, 1e-6).unwrap(), Some(1));
    }

    #[test]
    fn regular_thresholds_match_published_values() {
        let t: f64 = regular_bp_threshold(3, 6, 1e-5).unwrap();
        assert_abs_diff_eq!(t, 0.4294, epsilon = 5e-4);
        let t: f64 = regular_bp_threshold(6, 6, 1e-5).unwrap();
        assert_abs_diff_eq!(t, 0.5819, epsilon = 5e-4);
        let t: f64 = regular_bp_threshold(8, 8, 1e-5).unwrap();
        assert_abs_diff_eq!(t, 0.4876, epsilon = 5e-4);
    }

    #[test]
    fn threshold_result_brackets_the_transition() {
        let spec = EnsembleSpec::sc(3, 6, 8, 3).unwrap();
        let result: ThresholdResult<f64> = bp_threshold(&spec, 1e-4).unwrap();
        assert!(result.bracket_width <= 1e-4);
        let settings = DeSettings::default();
        let below = evolve(&spec, result.threshold - result.bracket_width, &settings).unwrap();
        let above = evolve(&spec, result.threshold + result.bracket_width, &settings).unwrap();
        assert!(below.converged);
        assert!(!above.converged);
    }

    #[test]
    fn monotone_in_eps() {
        let spec = EnsembleSpec::oc(3, 6, 8, 3).unwrap();
        let settings = DeSettings::default();
        let mut decoded_above = false;
        for eps in [0.60, 0.55, 0.52, 0.48, 0.40, 0.20] {
            let ok = evolve(&spec, eps, &settings).unwrap().converged;
            assert!(!decoded_above || ok, "decoding region must be downward closed");
            decoded_above |= ok;
        }
        assert!(decoded_above);
    }

    #[test]
    fn clamped_positions_stay_zero() {
        let spec = EnsembleSpec::sc(3, 6, 8, 3).unwrap();
        let system: DeSystem<f64> =
            DeSystem::from_parts(&spec.connectivity(), &spec.degree_profile(), 6)
                .unwrap()
                .with_clamped(&[0, 7]);
        let outcome = system.evolve_traced(0.45, &DeSettings::default());
        for x in outcome.trajectory.unwrap() {
            assert_eq!(x[0], 0.0);
            assert_eq!(x[7], 0.0);
        }
    }

    #[test]
    fn works_in_f32() {
        let spec = EnsembleSpec::sc(3, 6, 8, 3).unwrap();
        let result: ThresholdResult<f32> = bp_threshold(&spec, 1e-3).unwrap();
        assert!((result.threshold - 0.5019).abs() < 0.01);
    }

    #[test]
    fn sc_connectivity_drives_profile_mismatch_error() {
        let t = connectivity_sc(8, 3).unwrap();
        let profile = DegreeProfile::new(vec![DegreeLaw::regular(3); 7]);
        assert!(matches!(
            DeSystem::<f64>::from_parts(&t, &profile, 6),
            Err(DeError::DimensionMismatch { .. })
        ));
    }
}
