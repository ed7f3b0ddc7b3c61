//! Lipschitz-Killing curvature curves and the geometric feature vector.
//!
//! Each excursion set is read as a union of closed unit squares. Its three
//! intrinsic volumes on that polyconvex set are the Euler characteristic
//! `V - E + F` of the induced cubical complex, the boundary length, and the
//! covered area. Curves sample the three quantities on an equidistant
//! threshold grid between the field minimum and maximum and divide by the
//! pixel count, so values are comparable across image sizes.
//!
//! The sweep is incremental: pixels activate in descending value order and
//! each activation updates vertex/edge/face counts, boundary length, and
//! area in O(1), with snapshots taken as the sweep crosses each grid
//! threshold. Per-activation deltas match a from-scratch recount, which the
//! tests check on random fields.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{BinaryImage, Channel, MultiChannelImage, ScalarField};
use crate::persistence::descending_order;
use crate::scalar::{cast, Real};
use crate::tda::{tda_feature_vector, AmplitudeConfig, TdaFeatureVector};

/// Number of active pixels.
pub fn area_raw<F: Real>(bin: &BinaryImage<F>) -> u64 {
    bin.active_count() as u64
}

/// Total boundary length of the active region, in edge units.
///
/// Every active pixel contributes its four sides minus two per 4-adjacent
/// active neighbor (the shared side leaves the boundary for both pixels).
pub fn perimeter_raw<F: Real>(bin: &BinaryImage<F>) -> u64 {
    let w = bin.width();
    let h = bin.height();
    let mut perimeter = 0i64;
    for row in 0..h {
        for col in 0..w {
            if !bin.at(row, col) {
                continue;
            }
            perimeter += 4;
            if row > 0 && bin.at(row - 1, col) {
                perimeter -= 2;
            }
            if col > 0 && bin.at(row, col - 1) {
                perimeter -= 2;
            }
        }
    }
    perimeter as u64
}

/// Euler characteristic of the active region as a union of closed unit
/// squares: vertices minus edges plus faces of the induced complex.
pub fn euler_raw<F: Real>(bin: &BinaryImage<F>) -> i64 {
    let w = bin.width();
    let h = bin.height();
    let pixel = |row: isize, col: isize| -> bool {
        row >= 0
            && col >= 0
            && (row as usize) < h
            && (col as usize) < w
            && bin.at(row as usize, col as usize)
    };

    let mut faces = 0i64;
    for row in 0..h {
        for col in 0..w {
            if bin.at(row, col) {
                faces += 1;
            }
        }
    }

    let mut edges = 0i64;
    // Horizontal edges at lattice row r touch pixel rows r-1 and r.
    for r in 0..=h as isize {
        for col in 0..w as isize {
            if pixel(r - 1, col) || pixel(r, col) {
                edges += 1;
            }
        }
    }
    // Vertical edges at lattice column c touch pixel columns c-1 and c.
    for row in 0..h as isize {
        for c in 0..=w as isize {
            if pixel(row, c - 1) || pixel(row, c) {
                edges += 1;
            }
        }
    }

    let mut vertices = 0i64;
    for r in 0..=h as isize {
        for c in 0..=w as isize {
            if pixel(r - 1, c - 1) || pixel(r - 1, c) || pixel(r, c - 1) || pixel(r, c) {
                vertices += 1;
            }
        }
    }

    vertices - edges + faces
}

/// `n` equidistant thresholds from `lo` to `hi`, endpoints exact.
pub fn threshold_grid<F: Real>(lo: F, hi: F, n: usize) -> Result<Vec<F>> {
    if n < 2 {
        return Err(Error::TooFewThresholds(n));
    }
    let last: F = cast(n - 1);
    Ok((0..n)
        .map(|k| {
            let s = cast::<F, usize>(k) / last;
            lo * (F::one() - s) + hi * s
        })
        .collect())
}

/// Raw curve samples over a threshold grid, before any scaling.
#[derive(Debug, Clone, PartialEq)]
pub struct RawLkcCurves<F> {
    pub thresholds: Vec<F>,
    pub area: Vec<u64>,
    pub perimeter: Vec<u64>,
    pub euler: Vec<i64>,
}

/// Samples area, perimeter, and Euler characteristic of the excursion sets
/// over `n` equidistant thresholds in one descending sweep.
pub fn raw_lkc_curves<F: Real>(
    field: &ScalarField<F>,
    n_thresholds: usize,
) -> Result<RawLkcCurves<F>> {
    let (lo, hi) = field.min_max();
    let thresholds = threshold_grid(lo, hi, n_thresholds)?;
    let w = field.width();
    let h = field.height();
    let order = descending_order(field);
    let mut active = vec![false; field.len()];

    let mut area = 0u64;
    let mut perimeter = 0i64;
    let mut euler = 0i64;

    let mut area_curve = vec![0u64; n_thresholds];
    let mut perimeter_curve = vec![0u64; n_thresholds];
    let mut euler_curve = vec![0i64; n_thresholds];

    let mut next = 0usize;
    for k in (0..n_thresholds).rev() {
        let t = thresholds[k];
        while next < order.len() && field.value_at(order[next] as usize) >= t {
            let p = order[next] as usize;
            next += 1;
            let (row, col) = field.row_col(p);

            let mut active_side = 0i64;
            for q in field.neighbors4(p) {
                if active[q] {
                    active_side += 1;
                }
            }
            // A corner of the new square is already in the complex if any of
            // the up-to-three other pixels meeting it is active.
            let pix = |r: isize, c: isize| -> bool {
                r >= 0
                    && c >= 0
                    && (r as usize) < h
                    && (c as usize) < w
                    && active[r as usize * w + c as usize]
            };
            let r = row as isize;
            let c = col as isize;
            let mut new_vertices = 0i64;
            for (dr, dc) in [(-1isize, -1isize), (-1, 1), (1, -1), (1, 1)] {
                let seen = pix(r + dr, c + dc) || pix(r + dr, c) || pix(r, c + dc);
                if !seen {
                    new_vertices += 1;
                }
            }

            area += 1;
            perimeter += 4 - 2 * active_side;
            euler += new_vertices - (4 - active_side) + 1;
            active[p] = true;
        }
        area_curve[k] = area;
        perimeter_curve[k] = perimeter as u64;
        euler_curve[k] = euler;
    }

    Ok(RawLkcCurves {
        thresholds,
        area: area_curve,
        perimeter: perimeter_curve,
        euler: euler_curve,
    })
}

/// Knobs for the geometric curves and summaries.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LkcConfig<F> {
    /// Number of grid thresholds, at least 2.
    pub n_thresholds: usize,
    /// Multiplicative correction applied to the scaled perimeter curve.
    ///
    /// Lattice boundary length overestimates smooth boundary length; this
    /// hook lets callers compensate. The default 1 reports raw lattice
    /// length.
    pub perimeter_scale: F,
}

impl<F: Real> Default for LkcConfig<F> {
    fn default() -> Self {
        Self {
            n_thresholds: 200,
            perimeter_scale: F::one(),
        }
    }
}

impl<F: Real> LkcConfig<F> {
    // Negated comparisons so NaN fails validation too.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> Result<()> {
        if self.n_thresholds < 2 {
            return Err(Error::TooFewThresholds(self.n_thresholds));
        }
        if !(self.perimeter_scale > F::zero()) {
            return Err(Error::Config(format!(
                "perimeter scale must be > 0, got {}",
                self.perimeter_scale
            )));
        }
        Ok(())
    }
}

/// Curvature curves scaled by the pixel count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LkcCurves<F> {
    pub thresholds: Vec<F>,
    pub euler: Vec<F>,
    pub perimeter: Vec<F>,
    pub area: Vec<F>,
}

pub fn lkc_curves<F: Real>(field: &ScalarField<F>, config: &LkcConfig<F>) -> Result<LkcCurves<F>> {
    config.validate()?;
    let raw = raw_lkc_curves(field, config.n_thresholds)?;
    let scale = cast::<F, usize>(field.len()).recip();
    Ok(LkcCurves {
        thresholds: raw.thresholds,
        euler: raw
            .euler
            .iter()
            .map(|&v| cast::<F, i64>(v) * scale)
            .collect(),
        perimeter: raw
            .perimeter
            .iter()
            .map(|&v| cast::<F, u64>(v) * scale * config.perimeter_scale)
            .collect(),
        area: raw
            .area
            .iter()
            .map(|&v| cast::<F, u64>(v) * scale)
            .collect(),
    })
}

/// Consecutive differences; one entry shorter than the input.
pub fn derivative<F: Real>(values: &[F]) -> Vec<F> {
    values.windows(2).map(|w| w[1] - w[0]).collect()
}

fn l2<F: Real>(values: &[F]) -> F {
    values.iter().map(|&v| v * v).sum::<F>().sqrt()
}

fn trapezoid<F: Real>(values: &[F], x: &[F]) -> F {
    debug_assert_eq!(values.len(), x.len());
    let half: F = cast(0.5);
    values
        .windows(2)
        .zip(x.windows(2))
        .map(|(v, t)| (t[1] - t[0]) * (v[0] + v[1]) * half)
        .sum()
}

/// Shannon entropy of the absolute values, normalized to a distribution.
fn entropy_abs<F: Real>(values: &[F]) -> F {
    let total: F = values.iter().map(|v| v.abs()).sum();
    if total <= F::zero() {
        return F::zero();
    }
    -values
        .iter()
        .map(|v| v.abs())
        .filter(|&a| a > F::zero())
        .map(|a| {
            let p = a / total;
            p * p.ln()
        })
        .sum::<F>()
}

fn l0<F: Real>(values: &[F]) -> F {
    cast(values.iter().filter(|&&v| v != F::zero()).count())
}

/// The ten scalar summaries of a curve and its derivative, in schema order.
pub fn curve_summaries<F: Real>(curve: &[F], thresholds: &[F]) -> [F; 10] {
    debug_assert_eq!(curve.len(), thresholds.len());
    let diff = derivative(curve);
    let diff_x = &thresholds[..thresholds.len() - 1];
    [
        l2(curve),
        l2(&diff),
        trapezoid(curve, thresholds),
        trapezoid(&diff, diff_x),
        curve.iter().copied().sum(),
        entropy_abs(curve),
        entropy_abs(&diff),
        l0(curve),
        l0(&diff),
        diff.iter().copied().sum(),
    ]
}

const SUMMARY_NAMES: [&str; 10] = [
    "l2",
    "d_l2",
    "trapz",
    "d_trapz",
    "sum",
    "entropy",
    "d_entropy",
    "l0",
    "d_l0",
    "d_sum",
];

const CURVE_NAMES: [&str; 3] = ["euler", "perimeter", "area"];

/// Geometric feature vector: 4 channels x 3 curves x 10 summaries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LkcFeatureVector<F> {
    pub values: Vec<F>,
}

/// Column names of [`lkc_feature_vector`], in order.
pub fn lkc_schema() -> Vec<String> {
    let mut names = Vec::with_capacity(120);
    for channel in Channel::ALL {
        for curve in CURVE_NAMES {
            for summary in SUMMARY_NAMES {
                names.push(format!("{}_{}_{}", channel.name(), curve, summary));
            }
        }
    }
    names
}

/// Extracts the 120 geometric features of an image.
pub fn lkc_feature_vector<F: Real>(
    img: &MultiChannelImage<F>,
    config: &LkcConfig<F>,
) -> Result<LkcFeatureVector<F>> {
    config.validate()?;
    let mut values = Vec::with_capacity(120);
    for channel in Channel::ALL {
        let curves = lkc_curves(img.channel(channel), config)?;
        for curve in [&curves.euler, &curves.perimeter, &curves.area] {
            values.extend(curve_summaries(curve, &curves.thresholds));
        }
    }
    debug_assert_eq!(values.len(), 120);
    Ok(LkcFeatureVector { values })
}

/// Combined feature vector: the 64 topological features followed by the 120
/// geometric ones, both exactly as their standalone extractors produce them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeoTopFeatureVector<F> {
    pub values: Vec<F>,
}

/// Column names of [`geotop_feature_vector`], in order.
pub fn geotop_schema() -> Vec<String> {
    let mut names = crate::tda::tda_schema();
    names.extend(lkc_schema());
    names
}

pub fn geotop_feature_vector<F: Real>(
    img: &MultiChannelImage<F>,
    amplitude_config: &AmplitudeConfig<F>,
    lkc_config: &LkcConfig<F>,
) -> Result<GeoTopFeatureVector<F>> {
    let TdaFeatureVector { mut values } = tda_feature_vector(img, amplitude_config)?;
    values.extend(lkc_feature_vector(img, lkc_config)?.values);
    debug_assert_eq!(values.len(), 184);
    Ok(GeoTopFeatureVector { values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::excursion_set;
    use approx::assert_abs_diff_eq;

    fn bin(values: Vec<f64>, w: usize, h: usize, t: f64) -> BinaryImage<f64> {
        excursion_set(&ScalarField::new(w, h, values).unwrap(), t)
    }

    #[test]
    fn counts_on_a_single_square() {
        let b = bin(vec![1.0], 1, 1, 1.0);
        assert_eq!(area_raw(&b), 1);
        assert_eq!(perimeter_raw(&b), 4);
        assert_eq!(euler_raw(&b), 1);
    }

    #[test]
    fn counts_on_a_two_by_two_block() {
        let b = bin(vec![1.0; 4], 2, 2, 1.0);
        assert_eq!(area_raw(&b), 4);
        assert_eq!(perimeter_raw(&b), 8);
        assert_eq!(euler_raw(&b), 1);
    }

    #[test]
    fn diagonal_pair_is_one_component() {
        // Closed squares sharing a corner: chi = 1, perimeter 8.
        let b = bin(vec![1.0, 0.0, 0.0, 1.0], 2, 2, 1.0);
        assert_eq!(area_raw(&b), 2);
        assert_eq!(perimeter_raw(&b), 8);
        assert_eq!(euler_raw(&b), 1);
    }

    #[test]
    fn ring_has_euler_zero() {
        let f = ScalarField::from_fn(3, 3, |r, c| if r == 1 && c == 1 { 0.0 } else { 1.0 });
        let b = excursion_set(&f, 1.0);
        assert_eq!(area_raw(&b), 8);
        assert_eq!(euler_raw(&b), 0);
        assert_eq!(perimeter_raw(&b), 16);
    }

    #[test]
    fn empty_mask_is_all_zero() {
        let b = bin(vec![0.0; 6], 3, 2, 1.0);
        assert_eq!(area_raw(&b), 0);
        assert_eq!(perimeter_raw(&b), 0);
        assert_eq!(euler_raw(&b), 0);
    }

    #[test]
    fn threshold_grid_endpoints_are_exact() {
        let ts = threshold_grid(-3.7, 12.9, 200).unwrap();
        assert_eq!(ts.len(), 200);
        assert_eq!(ts[0], -3.7);
        assert_eq!(ts[199], 12.9);
        for w in ts.windows(2) {
            assert!(w[1] > w[0]);
        }
        assert!(matches!(
            threshold_grid(0.0, 1.0, 1),
            Err(Error::TooFewThresholds(1))
        ));
    }

    #[test]
    fn sweep_matches_recount_on_a_random_field() {
        let f = ScalarField::from_fn(17, 13, |r, c| ((r * 89 + c * 55) % 23) as f64);
        let raw = raw_lkc_curves(&f, 50).unwrap();
        for (k, &t) in raw.thresholds.iter().enumerate() {
            let b = excursion_set(&f, t);
            assert_eq!(raw.area[k], area_raw(&b), "area at threshold {t}");
            assert_eq!(raw.perimeter[k], perimeter_raw(&b), "perimeter at {t}");
            assert_eq!(raw.euler[k], euler_raw(&b), "euler at {t}");
        }
    }

    #[test]
    fn max_threshold_keeps_the_peak_active() {
        let f = ScalarField::from_fn(4, 4, |r, c| (r * 4 + c) as f64);
        let raw = raw_lkc_curves(&f, 200).unwrap();
        assert_eq!(raw.area[199], 1);
        assert_eq!(raw.area[0], 16);
    }

    #[test]
    fn scaled_curves_divide_by_pixel_count() {
        let f = ScalarField::from_fn(5, 4, |r, c| (r + c) as f64);
        let cfg = LkcConfig {
            n_thresholds: 10,
            ..LkcConfig::default()
        };
        let raw = raw_lkc_curves(&f, 10).unwrap();
        let scaled = lkc_curves(&f, &cfg).unwrap();
        for k in 0..10 {
            assert_abs_diff_eq!(scaled.area[k], raw.area[k] as f64 / 20.0, epsilon = 1e-15);
            assert_abs_diff_eq!(
                scaled.perimeter[k],
                raw.perimeter[k] as f64 / 20.0,
                epsilon = 1e-15
            );
            assert_abs_diff_eq!(scaled.euler[k], raw.euler[k] as f64 / 20.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn perimeter_scale_hook_multiplies_only_perimeter() {
        let f = ScalarField::from_fn(6, 6, |r, c| ((r * 3 + c) % 5) as f64);
        let base = lkc_curves(&f, &LkcConfig::default()).unwrap();
        let scaled = lkc_curves(
            &f,
            &LkcConfig {
                perimeter_scale: 0.25,
                ..LkcConfig::default()
            },
        )
        .unwrap();
        for k in 0..200 {
            assert_abs_diff_eq!(
                scaled.perimeter[k],
                base.perimeter[k] * 0.25,
                epsilon = 1e-15
            );
            assert_eq!(scaled.area[k], base.area[k]);
            assert_eq!(scaled.euler[k], base.euler[k]);
        }
    }

    #[test]
    fn derivative_shrinks_by_one() {
        let d = derivative(&[1.0, 4.0, 9.0, 16.0]);
        assert_eq!(d, vec![3.0, 5.0, 7.0]);
    }

    #[test]
    fn summaries_on_a_known_curve() {
        // curve [3, 4] over thresholds [0, 2]: diff = [1].
        let s = curve_summaries(&[3.0, 4.0], &[0.0, 2.0]);
        assert_abs_diff_eq!(s[0], 5.0, epsilon = 1e-15); // l2 of (3,4)
        assert_abs_diff_eq!(s[1], 1.0, epsilon = 1e-15); // l2 of (1)
        assert_abs_diff_eq!(s[2], 7.0, epsilon = 1e-15); // trapz: 2*(3+4)/2
        assert_abs_diff_eq!(s[3], 0.0, epsilon = 1e-15); // single point
        assert_abs_diff_eq!(s[4], 7.0, epsilon = 1e-15); // sum
        let p = (3.0f64 / 7.0, 4.0f64 / 7.0);
        assert_abs_diff_eq!(s[5], -(p.0 * p.0.ln() + p.1 * p.1.ln()), epsilon = 1e-12);
        assert_abs_diff_eq!(s[6], 0.0, epsilon = 1e-15); // one-point distribution
        assert_eq!(s[7], 2.0);
        assert_eq!(s[8], 1.0);
        assert_eq!(s[9], 1.0);
    }

    #[test]
    fn entropy_of_all_zero_curve_is_zero() {
        assert_eq!(entropy_abs::<f64>(&[0.0, 0.0, 0.0]), 0.0);
    }

    #[test]
    fn schema_has_120_unique_names() {
        let schema = lkc_schema();
        assert_eq!(schema.len(), 120);
        let mut sorted = schema.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), 120);
        assert_eq!(schema[0], "gray_euler_l2");
        assert_eq!(schema[119], "blue_area_d_sum");
    }

    #[test]
    fn geotop_is_the_exact_concatenation() {
        let f = ScalarField::from_fn(12, 12, |r, c| ((r * 7 + c * 5) % 11) as f64);
        let img = MultiChannelImage::from_gray(f, "t");
        let acfg = AmplitudeConfig::default();
        let lcfg = LkcConfig {
            n_thresholds: 40,
            ..LkcConfig::default()
        };
        let tda = tda_feature_vector(&img, &acfg).unwrap();
        let lkc = lkc_feature_vector(&img, &lcfg).unwrap();
        let geo = geotop_feature_vector(&img, &acfg, &lcfg).unwrap();
        assert_eq!(geo.values.len(), 184);
        assert_eq!(&geo.values[..64], &tda.values[..]);
        assert_eq!(&geo.values[64..], &lkc.values[..]);
    }
}
