//! Gridded spectra, isolation maps, and spectral feature extraction.
//!
//! The right-incidence columns and the isolation maps use the swapped-sites
//! convention ([`crate::solver::solve_right_swapped`]), which is what the
//! published isolation figures refer to; the mirrored first-principles
//! solution is available through the solver and oracle APIs. Grid cells are
//! evaluated independently and assembled in index order, so output is
//! bit-identical between serial and parallel runs.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::analytic::{self, isolation_from_rates, AnalyticError, ISOLATION_SATURATION_DB};
use crate::model::GeneralizedCouplings;
use crate::solver::{solve_right_swapped, solve_scattering, Direction, SolveError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SweepError {
    #[error("grid must be strictly ascending and non-empty")]
    BadGrid,
    #[error("analytic engine requires degenerate resonant lossless parameters with plain couplings")]
    EngineMismatch,
    #[error(transparent)]
    Analytic(#[from] AnalyticError),
    #[error(transparent)]
    Solve(#[from] SolveError),
}

/// Which machinery evaluates the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Engine {
    /// Closed forms; restricted to degenerate lossless parameters with
    /// `theta_f = theta_g = 0` (reflection comes from flux conservation,
    /// which needs hermiticity).
    Analytic,
    /// Boundary-condition solver; handles detuning, decay and coupling
    /// phases.
    Solver,
}

/// One spectrum grid point. `lr` columns are left incidence; `rl` columns
/// are the swapped-sites right incidence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectrumRow {
    pub delta: f64,
    pub e: f64,
    pub t_lr: f64,
    pub r_lr: f64,
    pub t_rl: f64,
    pub r_rl: f64,
    pub loss_lr: f64,
    pub loss_rl: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumTable {
    pub rows: Vec<SpectrumRow>,
}

fn check_ascending(grid: &[f64]) -> Result<(), SweepError> {
    if grid.is_empty() || grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(SweepError::BadGrid);
    }
    Ok(())
}

/// Uniform grid helper: `steps` points from `min` to `max` inclusive.
pub fn linear_grid(min: f64, max: f64, steps: usize) -> Vec<f64> {
    assert!(steps >= 2 && max > min);
    let h = (max - min) / (steps - 1) as f64;
    (0..steps).map(|i| min + i as f64 * h).collect()
}

/// Evaluate both incidence directions over a detuning grid; `E = omega + delta`.
pub fn spectrum(
    gp: &GeneralizedCouplings,
    delta_grid: &[f64],
    engine: Engine,
) -> Result<SpectrumTable, SweepError> {
    check_ascending(delta_grid)?;
    let p = &gp.base;
    if engine == Engine::Analytic {
        let plain = gp.theta_f == 0.0 && gp.theta_g == 0.0;
        if !(p.is_degenerate() && p.is_lossless() && plain) {
            return Err(SweepError::EngineMismatch);
        }
    }
    let omega = p.omega();
    let rows: Result<Vec<SpectrumRow>, SweepError> = delta_grid
        .par_iter()
        .map(|&delta| {
            let e = omega + delta;
            match engine {
                Engine::Analytic => {
                    let t_lr = analytic::t_left(p, e)?.norm_sqr();
                    let t_rl = analytic::t_right(p, e)?.norm_sqr();
                    Ok(SpectrumRow {
                        delta,
                        e,
                        t_lr,
                        r_lr: 1.0 - t_lr,
                        t_rl,
                        r_rl: 1.0 - t_rl,
                        loss_lr: 0.0,
                        loss_rl: 0.0,
                    })
                }
                Engine::Solver => {
                    let l = solve_scattering(gp, e, Direction::LeftIncidence)?;
                    let r = solve_right_swapped(gp, e)?;
                    Ok(SpectrumRow {
                        delta,
                        e,
                        t_lr: l.transmission,
                        r_lr: l.reflection,
                        t_rl: r.transmission,
                        r_rl: r.reflection,
                        loss_lr: l.loss,
                        loss_rl: r.loss,
                    })
                }
            }
        })
        .collect();
    Ok(SpectrumTable { rows: rows? })
}

/// Saturation marker for isolation cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CellFlag {
    Normal,
    /// One of the two rates was an exact zero; the value is the saturation
    /// sentinel `+-310 dB`.
    SaturatedZero,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IsolationMap {
    pub delta_axis: Vec<f64>,
    pub phi_axis: Vec<f64>,
    /// `values_db[i][j]` is the isolation at `(phi_axis[i], delta_axis[j])`.
    pub values_db: Vec<Vec<f64>>,
    pub flags: Vec<Vec<CellFlag>>,
}

impl IsolationMap {
    pub fn value_at(&self, delta: f64, phi: f64) -> Option<(f64, CellFlag)> {
        let j = self.delta_axis.iter().position(|&d| (d - delta).abs() < 1e-12)?;
        let i = self.phi_axis.iter().position(|&p| (p - phi).abs() < 1e-12)?;
        Some((self.values_db[i][j], self.flags[i][j]))
    }

    /// Largest finite |I| over the whole map (saturated cells excluded).
    pub fn max_abs_finite(&self) -> f64 {
        self.values_db
            .iter()
            .zip(&self.flags)
            .flat_map(|(row, frow)| {
                row.iter().zip(frow).filter_map(|(&v, &f)| {
                    (f == CellFlag::Normal && v.abs() < ISOLATION_SATURATION_DB).then_some(v.abs())
                })
            })
            .fold(0.0, f64::max)
    }
}

/// Isolation ratio `I(delta, phi)` over a rectangular grid, via the solver
/// engine in the swapped-sites convention.
pub fn isolation_map(
    gp: &GeneralizedCouplings,
    delta_grid: &[f64],
    phi_grid: &[f64],
) -> Result<IsolationMap, SweepError> {
    check_ascending(delta_grid)?;
    check_ascending(phi_grid)?;
    let omega = gp.base.omega();
    let cells: Result<Vec<Vec<(f64, CellFlag)>>, SweepError> = phi_grid
        .par_iter()
        .map(|&phi| {
            let mut gp_phi = *gp;
            gp_phi.base.phi = phi;
            delta_grid
                .iter()
                .map(|&delta| {
                    let e = omega + delta;
                    let t_lr = solve_scattering(&gp_phi, e, Direction::LeftIncidence)?.transmission;
                    let t_rl = solve_right_swapped(&gp_phi, e)?.transmission;
                    let iv = isolation_from_rates(t_lr, t_rl);
                    let flag = if iv.exact_zero { CellFlag::SaturatedZero } else { CellFlag::Normal };
                    Ok((iv.db, flag))
                })
                .collect()
        })
        .collect();
    let cells = cells?;
    Ok(IsolationMap {
        delta_axis: delta_grid.to_vec(),
        phi_axis: phi_grid.to_vec(),
        values_db: cells.iter().map(|row| row.iter().map(|c| c.0).collect()).collect(),
        flags: cells.iter().map(|row| row.iter().map(|c| c.1).collect()).collect(),
    })
}

/// A refined transmission zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransmissionZero {
    pub e: f64,
    pub direction: Direction,
    /// Transmission at the refined point.
    pub residual: f64,
}

/// A refined unit-transmission peak (left incidence).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UnitPeak {
    pub e: f64,
    /// `1 - T` at the refined point.
    pub residual: f64,
}

/// A refined local extremum of the isolation ratio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IsolationExtremum {
    pub e: f64,
    pub phi: f64,
    pub i_db: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Default)]
pub struct FeatureSet {
    pub zeros: Vec<TransmissionZero>,
    pub unit_peaks: Vec<UnitPeak>,
    pub isolation_extrema: Vec<IsolationExtremum>,
}

/// Residual below which a refined minimum counts as an exact zero (and a
/// refined maximum as a unit peak).
pub const FEATURE_RESIDUAL: f64 = 1e-8;
/// Energy resolution of the refinement.
pub const REFINE_TOL_E: f64 = 1e-10;
const REFINE_MAX_ITER: usize = 200;

/// Golden-section polish of a bracketed interior extremum.
fn refine_min(mut lo: f64, mut hi: f64, eval: &dyn Fn(f64) -> f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = eval(x1);
    let mut f2 = eval(x2);
    for _ in 0..REFINE_MAX_ITER {
        if hi - lo < REFINE_TOL_E {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = eval(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = eval(x2);
        }
    }
    0.5 * (lo + hi)
}

/// Indices of strict interior minima of `v`.
fn interior_minima(v: &[f64]) -> Vec<usize> {
    (1..v.len().saturating_sub(1))
        .filter(|&i| v[i] < v[i - 1] && v[i] < v[i + 1])
        .collect()
}

/// Locate transmission zeros, unit peaks, and isolation extrema in a
/// spectrum, polishing each candidate against the solver engine. Flat
/// spectra (everything at the same rate) report no features.
pub fn find_features(table: &SpectrumTable, gp: &GeneralizedCouplings) -> FeatureSet {
    let mut out = FeatureSet::default();
    if table.rows.len() < 3 {
        return out;
    }
    let es: Vec<f64> = table.rows.iter().map(|r| r.e).collect();

    let eval_t = |dir: Direction| {
        let gp = *gp;
        move |e: f64| -> f64 {
            match dir {
                Direction::LeftIncidence => solve_scattering(&gp, e, dir)
                    .map(|s| s.transmission)
                    .unwrap_or(f64::NAN),
                Direction::RightIncidence => solve_right_swapped(&gp, e)
                    .map(|s| s.transmission)
                    .unwrap_or(f64::NAN),
            }
        }
    };

    // transmission zeros, per direction
    for (dir, col) in [
        (Direction::LeftIncidence, table.rows.iter().map(|r| r.t_lr).collect::<Vec<_>>()),
        (Direction::RightIncidence, table.rows.iter().map(|r| r.t_rl).collect::<Vec<_>>()),
    ] {
        let eval = eval_t(dir);
        for i in interior_minima(&col) {
            let e = refine_min(es[i - 1], es[i + 1], &|x| eval(x));
            let residual = eval(e);
            if residual < FEATURE_RESIDUAL {
                out.zeros.push(TransmissionZero { e, direction: dir, residual });
            }
        }
    }

    // unit peaks on the left transmission
    {
        let eval = eval_t(Direction::LeftIncidence);
        let deficit: Vec<f64> = table.rows.iter().map(|r| 1.0 - r.t_lr).collect();
        for i in interior_minima(&deficit) {
            let e = refine_min(es[i - 1], es[i + 1], &|x| 1.0 - eval(x));
            let residual = 1.0 - eval(e);
            if residual < FEATURE_RESIDUAL {
                out.unit_peaks.push(UnitPeak { e, residual });
            }
        }
    }

    // isolation extrema (both signs), skipping saturated cells
    {
        let iso_of = |t_lr: f64, t_rl: f64| isolation_from_rates(t_lr, t_rl).db;
        let iso: Vec<f64> = table.rows.iter().map(|r| iso_of(r.t_lr, r.t_rl)).collect();
        let eval_l = eval_t(Direction::LeftIncidence);
        let eval_r = eval_t(Direction::RightIncidence);
        let eval_iso = |e: f64| iso_of(eval_l(e), eval_r(e));
        for sign in [1.0f64, -1.0] {
            let signed: Vec<f64> = iso.iter().map(|&v| sign * v).collect();
            for i in interior_minima(&signed) {
                if signed[i] <= -ISOLATION_SATURATION_DB {
                    continue;
                }
                let e = refine_min(es[i - 1], es[i + 1], &|x| sign * eval_iso(x));
                let i_db = eval_iso(e);
                if i_db.abs() > 1e-9 {
                    out.isolation_extrema.push(IsolationExtremum { e, phi: gp.base.phi, i_db });
                }
            }
        }
        out.isolation_extrema
            .sort_by(|a, b| a.e.total_cmp(&b.e).then(a.i_db.total_cmp(&b.i_db)));
        out.isolation_extrema.dedup_by(|a, b| (a.e - b.e).abs() < 10.0 * REFINE_TOL_E);
    }

    out.zeros.sort_by(|a, b| a.e.total_cmp(&b.e));
    out.unit_peaks.sort_by(|a, b| a.e.total_cmp(&b.e));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic;
    use crate::model::SystemParams;
    use std::f64::consts::PI;

    fn colocated(phi: f64) -> GeneralizedCouplings {
        GeneralizedCouplings::plain(SystemParams { phi, ..Default::default() })
    }

    #[test]
    fn colocated_spectrum_has_rabi_zeros_and_quasidark_peak() {
        for phi in [0.0, PI / 2.0, PI] {
            let gp = colocated(phi);
            let grid = linear_grid(-0.4, 0.4, 801);
            let table = spectrum(&gp, &grid, Engine::Analytic).unwrap();
            let features = find_features(&table, &gp);
            let zero_es: Vec<f64> = features.zeros.iter().map(|z| z.e).collect();
            assert!(
                zero_es.iter().any(|&e| (e - 0.9).abs() < 1e-6),
                "phi={phi}: zeros {zero_es:?}"
            );
            assert!(zero_es.iter().any(|&e| (e - 1.1).abs() < 1e-6));
            let expected_peak = analytic::quasidark_energy(&gp.base).unwrap();
            assert!(
                features.unit_peaks.iter().any(|p| (p.e - expected_peak).abs() < 1e-6),
                "phi={phi}: peaks {:?} vs {expected_peak}",
                features.unit_peaks
            );
        }
    }

    #[test]
    fn engines_agree_on_the_shared_domain() {
        let gp = GeneralizedCouplings::plain(SystemParams {
            x0: 2.0,
            phi: PI / 2.0,
            ..Default::default()
        });
        let grid = linear_grid(-0.4, 0.4, 401);
        let a = spectrum(&gp, &grid, Engine::Analytic).unwrap();
        let s = spectrum(&gp, &grid, Engine::Solver).unwrap();
        let mut worst = 0.0f64;
        for (ra, rs) in a.rows.iter().zip(&s.rows) {
            worst = worst
                .max((ra.t_lr - rs.t_lr).abs())
                .max((ra.t_rl - rs.t_rl).abs())
                .max((ra.r_lr - rs.r_lr).abs())
                .max((ra.r_rl - rs.r_rl).abs());
        }
        assert!(worst < 1e-11, "worst = {worst:.3e}");
    }

    #[test]
    fn analytic_engine_rejects_decay_and_detuning() {
        let lossy = GeneralizedCouplings::plain(SystemParams {
            gamma_a: 0.05,
            gamma_e: 0.05,
            ..Default::default()
        });
        let grid = linear_grid(-0.1, 0.1, 11);
        assert!(matches!(
            spectrum(&lossy, &grid, Engine::Analytic),
            Err(SweepError::EngineMismatch)
        ));
        assert!(spectrum(&lossy, &grid, Engine::Solver).is_ok());
    }

    #[test]
    fn separated_nodes_give_asymmetric_columns() {
        let gp = GeneralizedCouplings::plain(SystemParams {
            x0: 2.0,
            phi: PI / 2.0,
            ..Default::default()
        });
        let table = spectrum(&gp, &linear_grid(-0.4, 0.4, 81), Engine::Solver).unwrap();
        let max_gap = table
            .rows
            .iter()
            .map(|r| (r.t_lr - r.t_rl).abs())
            .fold(0.0, f64::max);
        assert!(max_gap > 0.1, "max gap = {max_gap}");
    }

    #[test]
    fn decay_broadens_and_lifts_the_rabi_valleys() {
        let gp = GeneralizedCouplings::plain(SystemParams {
            gamma_a: 0.05,
            gamma_e: 0.05,
            ..Default::default()
        });
        let table = spectrum(&gp, &linear_grid(-0.4, 0.4, 801), Engine::Solver).unwrap();
        let min_t = table.rows.iter().map(|r| r.t_lr).fold(1.0, f64::min);
        assert!(min_t > 0.01, "min T = {min_t}");
        let loss_max = table.rows.iter().map(|r| r.loss_lr).fold(0.0, f64::max);
        assert!(loss_max > 0.1);
    }

    #[test]
    fn rates_stay_in_range() {
        let gp = GeneralizedCouplings::plain(SystemParams {
            x0: 2.0,
            phi: 0.3,
            gamma_a: 0.02,
            gamma_e: 0.02,
            ..Default::default()
        });
        let table = spectrum(&gp, &linear_grid(-0.4, 0.4, 201), Engine::Solver).unwrap();
        for r in &table.rows {
            for v in [r.t_lr, r.r_lr, r.t_rl, r.r_rl] {
                assert!((-1e-9..=1.0 + 1e-9).contains(&v), "rate {v} out of range");
            }
            assert!(r.loss_lr >= -1e-10 && r.loss_rl >= -1e-10);
        }
    }

    #[test]
    fn benchmark_isolation_map_cells() {
        let gp = GeneralizedCouplings::plain(SystemParams { x0: 2.0, ..Default::default() });
        let delta = linear_grid(-0.4, 0.4, 801);
        let phi = linear_grid(0.0, PI, 601);
        let map = isolation_map(&gp, &delta, &phi).unwrap();
        // frozen closed-form values at the quoted benchmark cells
        let (v1, f1) = map.value_at(-0.15, 0.05 * PI).unwrap();
        assert_eq!(f1, CellFlag::Normal);
        assert!((v1 - 20.404669355618).abs() < 1e-6, "I = {v1}");
        let (v2, _) = map.value_at(-0.15, 0.95 * PI).unwrap();
        assert!((v2 - -18.731539884977).abs() < 1e-6, "I = {v2}");
        // row at delta = 0: maximum magnitude sits at phi = 0, 13.136 dB
        let j0 = map.delta_axis.iter().position(|&d| d.abs() < 1e-12).unwrap();
        let row_max = map
            .values_db
            .iter()
            .map(|row| row[j0].abs())
            .fold(0.0, f64::max);
        assert!((row_max - 13.136358).abs() < 1e-3, "row max = {row_max}");
    }

    #[test]
    fn map_is_deterministic_across_thread_counts() {
        let gp = GeneralizedCouplings::plain(SystemParams { x0: 2.0, ..Default::default() });
        let delta = linear_grid(-0.2, 0.2, 41);
        let phi = linear_grid(0.0, PI, 21);
        let parallel = isolation_map(&gp, &delta, &phi).unwrap();
        let serial_pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let serial = serial_pool.install(|| isolation_map(&gp, &delta, &phi).unwrap());
        assert_eq!(parallel, serial);
    }

    #[test]
    fn numerator_root_found_with_tiny_residual() {
        // independent oracle: bisect the left-numerator zero of
        // d^2 - l^2 - 2 f g l sin((omega + d) x0) at phi = 0
        let p = SystemParams { x0: 2.0, ..Default::default() };
        let num = |d: f64| d * d - 0.01 - 0.012 * ((1.0 + d) * 2.0).sin();
        let (mut lo, mut hi) = (-0.16, -0.13);
        assert!(num(lo) * num(hi) < 0.0);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if num(lo) * num(mid) <= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let root_delta = 0.5 * (lo + hi);
        assert!((root_delta - -0.1479648127758355).abs() < 1e-10);

        let gp = GeneralizedCouplings::plain(p);
        let table = spectrum(&gp, &linear_grid(-0.4, 0.4, 801), Engine::Solver).unwrap();
        let features = find_features(&table, &gp);
        let hit = features
            .zeros
            .iter()
            .find(|z| z.direction == Direction::LeftIncidence && (z.e - (1.0 + root_delta)).abs() < 1e-6)
            .expect("numerator root not located");
        assert!(hit.residual < 1e-10, "residual {}", hit.residual);
    }

    #[test]
    fn flat_spectrum_reports_no_features() {
        let gp = GeneralizedCouplings::plain(SystemParams {
            f: 0.0,
            g: 0.0,
            ..Default::default()
        });
        let table = spectrum(&gp, &linear_grid(-0.2, 0.2, 51), Engine::Analytic).unwrap();
        let features = find_features(&table, &gp);
        assert!(features.zeros.is_empty());
        assert!(features.unit_peaks.is_empty());
        assert!(features.isolation_extrema.is_empty());
    }

    #[test]
    fn refined_features_satisfy_their_defining_residuals() {
        let gp = GeneralizedCouplings::plain(SystemParams {
            x0: 2.0,
            phi: PI / 8.0,
            ..Default::default()
        });
        let table = spectrum(&gp, &linear_grid(-0.4, 0.4, 801), Engine::Solver).unwrap();
        let features = find_features(&table, &gp);
        for z in &features.zeros {
            assert!(z.residual < FEATURE_RESIDUAL);
        }
        for pk in &features.unit_peaks {
            assert!(pk.residual < FEATURE_RESIDUAL);
        }
    }

    #[test]
    fn non_positive_energies_propagate() {
        // delta <= -omega pushes E out of the linear-dispersion regime
        let gp = GeneralizedCouplings::plain(SystemParams::default());
        let err = spectrum(&gp, &linear_grid(-1.2, 0.0, 7), Engine::Solver).unwrap_err();
        assert!(matches!(err, SweepError::Solve(_)), "{err:?}");
    }

    #[test]
    fn bad_grids_are_rejected() {
        let gp = GeneralizedCouplings::plain(SystemParams::default());
        assert!(matches!(spectrum(&gp, &[], Engine::Solver), Err(SweepError::BadGrid)));
        assert!(matches!(
            spectrum(&gp, &[0.1, 0.1], Engine::Solver),
            Err(SweepError::BadGrid)
        ));
        assert!(matches!(
            isolation_map(&gp, &[0.0, 0.1], &[0.2, 0.1]),
            Err(SweepError::BadGrid)
        ));
    }
}
