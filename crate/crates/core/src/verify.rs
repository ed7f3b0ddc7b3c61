//! Self-checks comparing the fast implementations against independent
//! references: the quadratic relabeling diagram, the Euler characteristic
//! identity, geometry additivity, and the analytic toy walkthrough. The CLI
//! exposes this as `geotop verify`; the same checks back several tests.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::field::ScalarField;
use crate::lkc::raw_lkc_curves;
use crate::persistence::{betti_profile, brute_force_diagram, superlevel_diagram};
use crate::synth::gaussian_square_field;
use crate::tracking::track_components;

/// Outcome of one family of checks.
#[derive(Debug)]
pub struct CheckGroup {
    pub name: &'static str,
    pub comparisons: usize,
    pub failed: usize,
    /// First few failure descriptions, for diagnostics.
    pub examples: Vec<String>,
}

impl CheckGroup {
    pub fn new(name: &'static str) -> Self {
        Self {
            name,
            comparisons: 0,
            failed: 0,
            examples: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.comparisons += 1;
        if !ok {
            self.failed += 1;
            if self.examples.len() < 8 {
                self.examples.push(describe());
            }
        }
    }
}

/// All check groups of one verification run.
#[derive(Debug)]
pub struct VerifySummary {
    pub groups: Vec<CheckGroup>,
}

impl VerifySummary {
    pub fn comparisons(&self) -> usize {
        self.groups.iter().map(|g| g.comparisons).sum()
    }

    pub fn failures(&self) -> usize {
        self.groups.iter().map(|g| g.failed).sum()
    }

    pub fn passed(&self) -> bool {
        self.failures() == 0
    }
}

fn random_level_field(rng: &mut ChaCha8Rng, side: usize, levels: u32) -> ScalarField<f64> {
    let values: Vec<f64> = (0..side * side)
        .map(|_| rng.random_range(0..levels) as f64)
        .collect();
    ScalarField::new(side, side, values).expect("valid shape")
}

fn random_smooth_field(rng: &mut ChaCha8Rng, side: usize) -> ScalarField<f64> {
    let values: Vec<f64> = (0..side * side).map(|_| rng.random::<f64>()).collect();
    ScalarField::new(side, side, values).expect("valid shape")
}

/// Sweep diagram against the quadratic relabeling reference on random
/// quantized fields. Exact multiset equality, one comparison per field.
pub fn check_diagram_oracle(seed: u64, fields: usize, group: &mut CheckGroup) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(0);
    for case in 0..fields {
        let field = random_level_field(&mut rng, 8, 8);
        let fast = superlevel_diagram(&field).canonical_bars();
        let reference = brute_force_diagram(&field)?.canonical_bars();
        group.check(fast == reference, || {
            format!(
                "case {case}: sweep found {} bars, reference {}",
                fast.len(),
                reference.len()
            )
        });
    }
    Ok(())
}

/// On every threshold of every random field, the Euler count of the
/// excursion set must equal beta0 - beta1 from the diagram.
pub fn check_euler_bridge(seed: u64, fields: usize, group: &mut CheckGroup) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    for case in 0..fields {
        let field = random_smooth_field(&mut rng, 16);
        let raw = raw_lkc_curves(&field, 200)?;
        let diagram = superlevel_diagram(&field);
        let profile = betti_profile(&diagram, &raw.thresholds);
        for k in 0..raw.thresholds.len() {
            let chi = profile.beta0[k] as i64 - profile.beta1[k] as i64;
            group.check(raw.euler[k] == chi, || {
                format!(
                    "case {case} threshold {k}: euler {} vs beta0-beta1 {}",
                    raw.euler[k], chi
                )
            });
        }
    }
    Ok(())
}

/// Live track samples must add up to the whole excursion set's area and
/// perimeter at every grid threshold, and the track bars must equal the
/// degree-0 diagram.
pub fn check_additivity(seed: u64, fields: usize, group: &mut CheckGroup) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(2);
    for case in 0..fields {
        let field = if case % 2 == 0 {
            random_level_field(&mut rng, 12, 6)
        } else {
            random_smooth_field(&mut rng, 12)
        };
        let n_thresholds = 16;
        let tracking = track_components(&field, n_thresholds)?;
        let raw = raw_lkc_curves(&field, n_thresholds)?;
        for k in 0..n_thresholds {
            let (area, perimeter) = tracking.totals_at(k);
            group.check(area == raw.area[k] && perimeter == raw.perimeter[k], || {
                format!(
                    "case {case} threshold {k}: tracks {area}/{perimeter}, global {}/{}",
                    raw.area[k], raw.perimeter[k]
                )
            });
        }
        let track_bars = tracking.diagram().only_dim(0).canonical_bars();
        let diagram_bars = superlevel_diagram(&field).only_dim(0).canonical_bars();
        group.check(track_bars == diagram_bars, || {
            format!(
                "case {case}: {} track bars vs {} diagram bars",
                track_bars.len(),
                diagram_bars.len()
            )
        });
    }
    Ok(())
}

/// The Gaussian-plus-square field has a fully predictable tracking result.
pub fn check_toy(group: &mut CheckGroup) -> Result<()> {
    let field: ScalarField<f64> = gaussian_square_field(200, 10, 0, 0.0)?;
    let tracking = track_components(&field, 200)?;

    group.check(tracking.tracks.len() == 2, || {
        format!("expected 2 tracks, found {}", tracking.tracks.len())
    });
    if tracking.tracks.len() != 2 {
        return Ok(());
    }

    // Track 0 is the Gaussian (smaller birth pixel index), track 1 the square.
    let gaussian = &tracking.tracks[0];
    let square = &tracking.tracks[1];
    group.check(gaussian.essential && !square.essential, || {
        "elder/essential roles are swapped".to_string()
    });
    group.check(square.absorbed_into == Some(gaussian.id), || {
        format!("square absorbed into {:?}", square.absorbed_into)
    });

    group.check(
        square.area.iter().all(|&a| a == 100) && !square.area.is_empty(),
        || "square area drifts from 100 while alive".to_string(),
    );
    group.check(square.perimeter.iter().all(|&p| p == 40), || {
        "square perimeter drifts from 40 while alive".to_string()
    });

    let p_gaussian = gaussian.persistence();
    let p_square = square.persistence();
    let ratio = (p_gaussian - p_square).abs() / p_gaussian.max(p_square);
    group.check(ratio < 0.1, || {
        format!("persistences {p_gaussian} and {p_square} differ by {ratio}")
    });
    // Both structures live through essentially the whole value range.
    group.check(square.death / square.birth < 1e-6, || {
        format!(
            "square dies too early: {} of {}",
            square.death, square.birth
        )
    });
    Ok(())
}

/// Runs every check group. Roughly 22,000 comparisons; a few seconds in an
/// optimized build.
pub fn run_verification(seed: u64) -> Result<VerifySummary> {
    let mut groups = Vec::new();

    let mut g = CheckGroup::new("diagram_oracle");
    check_diagram_oracle(seed, 200, &mut g)?;
    groups.push(g);

    let mut g = CheckGroup::new("euler_bridge");
    check_euler_bridge(seed, 100, &mut g)?;
    groups.push(g);

    let mut g = CheckGroup::new("geometry_additivity");
    check_additivity(seed, 100, &mut g)?;
    groups.push(g);

    let mut g = CheckGroup::new("toy_walkthrough");
    check_toy(&mut g)?;
    groups.push(g);

    Ok(VerifySummary { groups })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verification_passes_and_counts_enough_comparisons() {
        let summary = run_verification(417).unwrap();
        assert!(summary.comparisons() >= 500, "{}", summary.comparisons());
        for group in &summary.groups {
            assert_eq!(
                group.failed, 0,
                "{} failed: {:?}",
                group.name, group.examples
            );
        }
        assert!(summary.passed());
    }
}
