//! Bisection of the minimizer threshold between `c_g / 2` and `c_g`, and
//! sweeps over `p`.
//!
//! `c_g` itself is taken as a minimizer without a run: the seed there has
//! negative energy and the flow only lowers it. The bracket invariant is
//! that `c_hi` carries a minimizer and `c_lo` does not.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::energy::ProblemParams;
use crate::error::{Error, Result};
use crate::flow::{run_flow, FlowConfig, FlowReport, Outcome};
use crate::gaussian::{ScanPolicy, SeedRule};

/// One classified mass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrailEntry {
    pub c: f64,
    pub outcome: Outcome,
    pub final_energy: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub diagnostic: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BifurcationRecord {
    pub p: f64,
    pub c_g: f64,
    pub sigma_bar: f64,
    /// Masses with a negative-energy minimizer.
    pub c_m: Vec<f64>,
    /// Masses ending in a positive-energy steady state.
    pub c_p: Vec<f64>,
    /// Masses whose flow spread out of the box.
    pub c_v: Vec<f64>,
    /// Masses whose flow ended without a classification.
    pub c_i: Vec<f64>,
    pub bracket: (f64, f64),
    pub trail: Vec<TrailEntry>,
    pub iterations: usize,
    /// Set when the pipeline for this `p` failed.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
}

impl BifurcationRecord {
    fn empty(p: f64, c_g: f64, sigma_bar: f64) -> Self {
        Self {
            p,
            c_g,
            sigma_bar,
            c_m: Vec::new(),
            c_p: Vec::new(),
            c_v: Vec::new(),
            c_i: Vec::new(),
            bracket: (c_g, c_g),
            trail: Vec::new(),
            iterations: 0,
            error: None,
        }
    }

    fn push(&mut self, entry: TrailEntry) {
        match entry.outcome {
            Outcome::Minimizer => self.c_m.push(entry.c),
            Outcome::PositiveSteadyState => self.c_p.push(entry.c),
            Outcome::Vanishing => self.c_v.push(entry.c),
            Outcome::Inconclusive => self.c_i.push(entry.c),
        }
        self.trail.push(entry);
    }

    /// Smallest confirmed minimizer mass, else `c_g`.
    pub fn best_upper_bound(&self) -> f64 {
        self.c_m.iter().copied().fold(self.c_g, f64::min)
    }

    pub fn largest_positive(&self) -> Option<f64> {
        self.c_p.iter().copied().reduce(f64::max)
    }
}

/// Settings shared by every run of a scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanSettings {
    pub theta: f64,
    pub policy: ScanPolicy,
    /// Lower end of the bracket as a fraction of `c_g`.
    pub floor_fraction: f64,
    /// Stop once `(c_hi − c_lo) / c_hi` is at most this.
    pub rel_width: f64,
    pub max_iters: usize,
}

impl Default for ScanSettings {
    fn default() -> Self {
        Self {
            theta: 1.0,
            policy: ScanPolicy::default(),
            floor_fraction: 0.5,
            rel_width: 5e-3,
            max_iters: 12,
        }
    }
}

impl FlowConfig {
    /// This configuration with the seed `σ = σ̄ c / c_g` of `rule` at mass `c`.
    pub fn for_mass(&self, rule: &SeedRule, c: f64) -> Result<FlowConfig> {
        let params = ProblemParams::new(rule.p, c, rule.theta, rule.sigma_for(c))?;
        Ok(FlowConfig {
            params,
            sigma_bar: rule.sigma_bar,
            ..*self
        })
    }
}

/// Runs the flow at mass `c` seeded by `rule`.
pub fn classify_c(rule: &SeedRule, c: f64, base: &FlowConfig) -> Result<(TrailEntry, FlowReport)> {
    if !(c > 0.0 && c <= rule.c_g * (1.0 + 1e-12)) {
        return Err(Error::InvalidParameter(format!(
            "c = {c} must lie in (0, c_g = {}]",
            rule.c_g
        )));
    }
    let report = run_flow(&base.for_mass(rule, c)?)?;
    let entry = TrailEntry {
        c,
        outcome: report.outcome,
        final_energy: report.final_energy,
        diagnostic: report.diagnostic.clone(),
    };
    Ok((entry, report))
}

/// Result of [`bisect`].
#[derive(Debug, Clone, PartialEq)]
pub struct Bisection {
    pub bracket: (f64, f64),
    pub trail: Vec<TrailEntry>,
    pub iterations: usize,
}

/// Bisects `[lo, hi]` with an arbitrary classifier. `hi` is taken as a
/// minimizer; `lo` is probed first and must not be one. Anything other
/// than [`Outcome::Minimizer`] counts as below the threshold.
pub fn bisect<F>(p: f64, lo: f64, hi: f64, rel_width: f64, max_iters: usize, mut classify: F) -> Result<Bisection>
where
    F: FnMut(f64) -> Result<TrailEntry>,
{
    if max_iters == 0 {
        return Err(Error::InvalidParameter("max_iters must be at least 1".into()));
    }
    let mut out = Bisection {
        bracket: (lo, hi),
        trail: Vec::new(),
        iterations: 0,
    };
    if lo >= hi {
        out.bracket = (hi, hi);
        return Ok(out);
    }
    let floor = classify(lo)?;
    let floor_is_minimizer = floor.outcome == Outcome::Minimizer;
    out.trail.push(floor);
    if floor_is_minimizer {
        return Err(Error::BracketFailure { p, c: lo });
    }
    let (mut lo, mut hi) = (lo, hi);
    while out.iterations < max_iters && (hi - lo) > rel_width * hi {
        let mid = 0.5 * (lo + hi);
        let entry = classify(mid)?;
        if entry.outcome == Outcome::Minimizer {
            hi = mid;
        } else {
            lo = mid;
        }
        log::info!("p = {p}: c = {mid} -> {:?}, bracket [{lo}, {hi}]", entry.outcome);
        out.trail.push(entry);
        out.iterations += 1;
    }
    out.bracket = (lo, hi);
    Ok(out)
}

/// Brackets the numerical threshold for one `p` between
/// `floor_fraction · c_g` and `c_g`.
pub fn bisect_threshold(p: f64, base: &FlowConfig, settings: &ScanSettings) -> Result<BifurcationRecord> {
    let rule = SeedRule::from_threshold(p, settings.theta, &settings.policy)?;
    let mut record = BifurcationRecord::empty(p, rule.c_g, rule.sigma_bar);
    let result = bisect(
        p,
        settings.floor_fraction * rule.c_g,
        rule.c_g,
        settings.rel_width,
        settings.max_iters,
        |c| classify_c(&rule, c, base).map(|(entry, _)| entry),
    )?;
    record.bracket = result.bracket;
    record.iterations = result.iterations;
    for entry in result.trail {
        record.push(entry);
    }
    Ok(record)
}

/// Runs [`bisect_threshold`] for every `p` in parallel. A failing `p`
/// yields a record with `error` set; the others are unaffected.
pub fn sweep_p(p_list: &[f64], base: &FlowConfig, settings: &ScanSettings) -> Vec<BifurcationRecord> {
    p_list
        .par_iter()
        .map(|&p| {
            bisect_threshold(p, base, settings).unwrap_or_else(|e| {
                log::warn!("p = {p}: {e}");
                let rule = SeedRule::from_threshold(p, settings.theta, &settings.policy).ok();
                let mut record = BifurcationRecord::empty(
                    p,
                    rule.map_or(f64::NAN, |r| r.c_g),
                    rule.map_or(f64::NAN, |r| r.sigma_bar),
                );
                record.error = Some(e.to_string());
                record
            })
        })
        .collect()
}

/// `p` with the largest `c_g` among the records.
pub fn profile_peak(records: &[BifurcationRecord]) -> Option<f64> {
    records
        .iter()
        .filter(|r| r.c_g.is_finite())
        .max_by(|a, b| a.c_g.total_cmp(&b.c_g))
        .map(|r| r.p)
}

/// Semilinear and quasi-linear minimizers at the same `(p, c)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaComparison {
    pub p: f64,
    pub c: f64,
    pub semilinear: FlowReport,
    pub quasilinear: FlowReport,
    /// `σ` used for the `θ = 0` and `θ = 1` runs.
    pub sigma: (f64, f64),
    /// `|u(x, 0, 0)|²` against physical `x`.
    pub section_semilinear: Vec<(f64, f64)>,
    pub section_quasilinear: Vec<(f64, f64)>,
    /// Peak of `|u|²` for `θ = 0` strictly above the one for `θ = 1`.
    pub squeezing: bool,
}

/// Runs the flow for `θ = 0` and `θ = 1` at the same `(p, c)` and compares
/// the peaks of `|u|²`. Each run is seeded at its own `σ̄(c)`, which needs
/// a negative Gaussian minimum at `c` (always the case for `p < 7/3`).
pub fn compare_theta(p: f64, c: f64, base: &FlowConfig) -> Result<ThetaComparison> {
    let run = |theta: f64| -> Result<(FlowReport, f64)> {
        let rule = SeedRule::at_mass(c, p, theta)?;
        let cfg = base.for_mass(&rule, c)?;
        Ok((run_flow(&cfg)?, cfg.params.sigma))
    };
    let (semi, quasi) = rayon::join(|| run(0.0), || run(1.0));
    let ((semi, s0), (quasi, s1)) = (semi?, quasi?);
    for (theta, r) in [(0, &semi), (1, &quasi)] {
        if r.outcome != Outcome::Minimizer {
            return Err(Error::Inconclusive(format!(
                "theta = {theta} ended as {:?} with E = {:.6e}{}",
                r.outcome,
                r.final_energy,
                r.diagnostic.as_deref().map(|d| format!(" ({d})")).unwrap_or_default()
            )));
        }
    }
    let section = |r: &FlowReport, sigma: f64, theta: f64| -> Result<Vec<(f64, f64)>> {
        let params = ProblemParams::new(p, c, theta, sigma)?;
        let v = r.snapshot.as_ref().ok_or_else(|| Error::Inconclusive("missing snapshot".into()))?;
        Ok(crate::flow::axis_section(v, &params))
    };
    Ok(ThetaComparison {
        p,
        c,
        section_semilinear: section(&semi, s0, 0.0)?,
        section_quasilinear: section(&quasi, s1, 1.0)?,
        squeezing: semi.peak_density > quasi.peak_density,
        sigma: (s0, s1),
        semilinear: semi,
        quasilinear: quasi,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn planted(threshold: f64) -> impl FnMut(f64) -> Result<TrailEntry> {
        move |c| {
            let outcome = if c >= threshold {
                Outcome::Minimizer
            } else {
                Outcome::PositiveSteadyState
            };
            Ok(TrailEntry {
                c,
                outcome,
                final_energy: if c >= threshold { -1.0 } else { 1.0 },
                diagnostic: None,
            })
        }
    }

    #[test]
    fn synthetic_threshold() {
        let b = bisect(3.0, 100.0, 300.0, 5e-3, 12, planted(200.0)).unwrap();
        let (lo, hi) = b.bracket;
        assert!(lo < 200.0 && 200.0 <= hi);
        assert!((hi - lo) / hi <= 5e-3);
        assert!(b.iterations <= 10);
    }

    #[test]
    fn degenerate_bracket() {
        let b = bisect(3.0, 150.0, 150.0, 5e-3, 12, |_| unreachable!()).unwrap();
        assert_eq!(b.bracket, (150.0, 150.0));
        assert!(b.trail.is_empty());
    }

    #[test]
    fn floor_minimizer_is_bracket_failure() {
        let r = bisect(3.0, 100.0, 300.0, 5e-3, 12, planted(50.0));
        assert!(matches!(r, Err(Error::BracketFailure { .. })));
    }

    #[test]
    fn iteration_cap() {
        let b = bisect(3.0, 100.0, 300.0, 1e-12, 3, planted(200.0)).unwrap();
        assert_eq!(b.iterations, 3);
        assert_eq!(b.bracket, (175.0, 200.0));
    }

    #[test]
    fn record_sorting() {
        let mut r = BifurcationRecord::empty(3.0, 212.0, 0.33);
        for (c, o) in [
            (106.0, Outcome::Vanishing),
            (159.0, Outcome::PositiveSteadyState),
            (185.0, Outcome::Minimizer),
            (170.0, Outcome::Inconclusive),
        ] {
            r.push(TrailEntry {
                c,
                outcome: o,
                final_energy: 0.0,
                diagnostic: None,
            });
        }
        assert_eq!(r.c_m, vec![185.0]);
        assert_eq!(r.c_p, vec![159.0]);
        assert_eq!(r.c_v, vec![106.0]);
        assert_eq!(r.c_i, vec![170.0]);
        assert_eq!(r.best_upper_bound(), 185.0);
        assert_eq!(r.largest_positive(), Some(159.0));
    }
}
