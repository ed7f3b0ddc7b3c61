//! Amplitude features of persistence diagrams.
//!
//! An amplitude maps a diagram to one non-negative scalar: the norm of some
//! functional representation of the bars. Before any metric is evaluated the
//! bars are normalized to the sublevel convention (`birth <= death`), so a
//! superlevel bar `(b, d)` enters as `(-b, -d)`; zero-persistence bars are
//! dropped, and the empty diagram has amplitude 0 under every metric.
//!
//! Curve-type metrics (Betti, landscape, silhouette) are sampled at `n_bins`
//! midpoints of the bar span and scaled by the bin width so they approximate
//! the corresponding L^p integral norm. Raster-type metrics (heat,
//! persistence image) accumulate normalized Gaussians on an `n_bins^2` grid
//! with bandwidth `sigma` expressed as a fraction of the rastered extent;
//! kernels are truncated four bandwidths out, which is far below the
//! resolution of the grids involved.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Channel, MultiChannelImage};
use crate::persistence::{superlevel_diagram, Direction, PersistenceDiagram};
use crate::scalar::{cast, Real};

/// The seven amplitude metrics, in schema order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AmplitudeMetric {
    Bottleneck,
    Wasserstein,
    Betti,
    Landscape,
    Silhouette,
    Heat,
    PersistenceImage,
}

impl AmplitudeMetric {
    pub const ALL: [AmplitudeMetric; 7] = [
        AmplitudeMetric::Bottleneck,
        AmplitudeMetric::Wasserstein,
        AmplitudeMetric::Betti,
        AmplitudeMetric::Landscape,
        AmplitudeMetric::Silhouette,
        AmplitudeMetric::Heat,
        AmplitudeMetric::PersistenceImage,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AmplitudeMetric::Bottleneck => "bottleneck",
            AmplitudeMetric::Wasserstein => "wasserstein",
            AmplitudeMetric::Betti => "betti",
            AmplitudeMetric::Landscape => "landscape",
            AmplitudeMetric::Silhouette => "silhouette",
            AmplitudeMetric::Heat => "heat",
            AmplitudeMetric::PersistenceImage => "persistence_image",
        }
    }
}

/// Shared knobs for the amplitude metrics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeConfig<F> {
    /// Norm exponent, at least 1.
    pub p: F,
    /// Samples per axis for curve and raster metrics, at least 2.
    pub n_bins: usize,
    /// Gaussian bandwidth as a fraction of the rastered extent, positive.
    pub sigma: F,
    /// Landscape layers entering the landscape amplitude, at least 1.
    pub n_layers: usize,
    /// Silhouette weight exponent, non-negative.
    pub power: F,
}

impl<F: Real> Default for AmplitudeConfig<F> {
    fn default() -> Self {
        Self {
            p: cast(2.0),
            n_bins: 100,
            sigma: cast(0.1),
            n_layers: 1,
            power: cast(1.0),
        }
    }
}

impl<F: Real> AmplitudeConfig<F> {
    // Negated comparisons so NaN fails validation too.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> Result<()> {
        if !(self.p >= F::one()) {
            return Err(Error::Config(format!(
                "amplitude p must be >= 1, got {}",
                self.p
            )));
        }
        if self.n_bins < 2 {
            return Err(Error::Config(format!(
                "amplitude n_bins must be >= 2, got {}",
                self.n_bins
            )));
        }
        if !(self.sigma > F::zero()) {
            return Err(Error::Config(format!(
                "amplitude sigma must be > 0, got {}",
                self.sigma
            )));
        }
        if self.n_layers < 1 {
            return Err(Error::Config("amplitude n_layers must be >= 1".into()));
        }
        if !(self.power >= F::zero()) {
            return Err(Error::Config(format!(
                "silhouette power must be >= 0, got {}",
                self.power
            )));
        }
        Ok(())
    }
}

/// Bars in sublevel orientation with positive persistence, as `(birth, death)`
/// pairs with `birth < death`.
fn normalized_bars<F: Real>(diagram: &PersistenceDiagram<F>) -> Vec<(F, F)> {
    diagram
        .bars
        .iter()
        .filter_map(|bar| {
            let (b, d) = match diagram.direction {
                Direction::Sublevel => (bar.birth, bar.death),
                Direction::Superlevel => (-bar.birth, -bar.death),
            };
            (d > b).then_some((b, d))
        })
        .collect()
}

fn lp_norm_of_samples<F: Real>(samples: &[F], cell: F, p: F) -> F {
    let total: F = samples.iter().map(|&s| s.abs().powf(p)).sum();
    (total * cell).powf(F::one() / p)
}

/// Midpoint sample locations of `[lo, hi)` split into `n` bins.
fn midpoints<F: Real>(lo: F, hi: F, n: usize) -> (Vec<F>, F) {
    let step = (hi - lo) / cast(n);
    let half = cast::<F, f64>(0.5);
    let points = (0..n)
        .map(|j| lo + (cast::<F, usize>(j) + half) * step)
        .collect();
    (points, step)
}

fn tent<F: Real>(bar: (F, F), t: F) -> F {
    (t - bar.0).min(bar.1 - t).max(F::zero())
}

/// Regular grid accumulating truncated normalized Gaussians.
struct Raster<F> {
    x0: F,
    y0: F,
    dx: F,
    dy: F,
    nx: usize,
    ny: usize,
    values: Vec<F>,
}

impl<F: Real> Raster<F> {
    fn new(x0: F, x1: F, y0: F, y1: F, nx: usize, ny: usize) -> Self {
        Self {
            x0,
            y0,
            dx: (x1 - x0) / cast(nx),
            dy: (y1 - y0) / cast(ny),
            nx,
            ny,
            values: vec![F::zero(); nx * ny],
        }
    }

    fn axis_weights(c: F, sigma: F, a0: F, da: F, n: usize) -> (usize, Vec<F>) {
        // Cell centers a_i = a0 + (i + 0.5) da; keep |a_i - c| <= 4 sigma.
        let reach = cast::<F, f64>(4.0) * sigma;
        let half: F = cast(0.5);
        let lo_f = ((c - reach - a0) / da - half).ceil().max(F::zero());
        let hi_f = ((c + reach - a0) / da - half).floor().min(cast(n - 1));
        if hi_f < lo_f {
            return (0, Vec::new());
        }
        let lo = lo_f.to_usize().expect("clamped to grid");
        let hi = hi_f.to_usize().expect("clamped to grid");
        let norm = (sigma * cast::<F, f64>((2.0 * std::f64::consts::PI).sqrt())).recip();
        let weights = (lo..=hi)
            .map(|i| {
                let a = a0 + (cast::<F, usize>(i) + half) * da;
                let z = (a - c) / sigma;
                norm * (-z * z / cast::<F, f64>(2.0)).exp()
            })
            .collect();
        (lo, weights)
    }

    fn add_gaussian(&mut self, cx: F, cy: F, sigma: F, weight: F) {
        let (ix0, wx) = Self::axis_weights(cx, sigma, self.x0, self.dx, self.nx);
        let (iy0, wy) = Self::axis_weights(cy, sigma, self.y0, self.dy, self.ny);
        for (j, &gy) in wy.iter().enumerate() {
            let row = (iy0 + j) * self.nx;
            let wgy = weight * gy;
            for (i, &gx) in wx.iter().enumerate() {
                self.values[row + ix0 + i] += wgy * gx;
            }
        }
    }
}

/// Amplitude of a diagram under one metric.
pub fn amplitude<F: Real>(
    diagram: &PersistenceDiagram<F>,
    metric: AmplitudeMetric,
    config: &AmplitudeConfig<F>,
) -> Result<F> {
    config.validate()?;
    let bars = normalized_bars(diagram);
    if bars.is_empty() {
        return Ok(F::zero());
    }
    let p = config.p;
    let value = match metric {
        AmplitudeMetric::Bottleneck => {
            let half = cast::<F, f64>(0.5);
            bars.iter()
                .map(|&(b, d)| (d - b) * half)
                .fold(F::zero(), F::max)
        }
        AmplitudeMetric::Wasserstein => {
            let sqrt2 = cast::<F, f64>(std::f64::consts::SQRT_2);
            let total: F = bars.iter().map(|&(b, d)| ((d - b) / sqrt2).powf(p)).sum();
            total.powf(F::one() / p)
        }
        AmplitudeMetric::Betti => {
            let lo = bars.iter().map(|b| b.0).fold(F::infinity(), F::min);
            let hi = bars.iter().map(|b| b.1).fold(F::neg_infinity(), F::max);
            let (points, step) = midpoints(lo, hi, config.n_bins);
            let samples: Vec<F> = points
                .iter()
                .map(|&t| {
                    let count = bars.iter().filter(|&&(b, d)| b <= t && t <= d).count();
                    cast(count)
                })
                .collect();
            lp_norm_of_samples(&samples, step, p)
        }
        AmplitudeMetric::Landscape => {
            let lo = bars.iter().map(|b| b.0).fold(F::infinity(), F::min);
            let hi = bars.iter().map(|b| b.1).fold(F::neg_infinity(), F::max);
            let (points, step) = midpoints(lo, hi, config.n_bins);
            let mut samples = Vec::with_capacity(points.len() * config.n_layers);
            let mut tents = Vec::with_capacity(bars.len());
            for &t in &points {
                tents.clear();
                tents.extend(bars.iter().map(|&bar| tent(bar, t)));
                tents.sort_by(|a, b| b.partial_cmp(a).expect("finite"));
                for k in 0..config.n_layers {
                    samples.push(tents.get(k).copied().unwrap_or(F::zero()));
                }
            }
            lp_norm_of_samples(&samples, step, p)
        }
        AmplitudeMetric::Silhouette => {
            let lo = bars.iter().map(|b| b.0).fold(F::infinity(), F::min);
            let hi = bars.iter().map(|b| b.1).fold(F::neg_infinity(), F::max);
            let weights: Vec<F> = bars
                .iter()
                .map(|&(b, d)| (d - b).powf(config.power))
                .collect();
            let total_weight: F = weights.iter().copied().sum();
            if total_weight <= F::zero() {
                return Ok(F::zero());
            }
            let (points, step) = midpoints(lo, hi, config.n_bins);
            let samples: Vec<F> = points
                .iter()
                .map(|&t| {
                    let acc: F = bars
                        .iter()
                        .zip(&weights)
                        .map(|(&bar, &w)| w * tent(bar, t))
                        .sum();
                    acc / total_weight
                })
                .collect();
            lp_norm_of_samples(&samples, step, p)
        }
        AmplitudeMetric::Heat => {
            let lo = bars.iter().map(|b| b.0).fold(F::infinity(), F::min);
            let hi = bars.iter().map(|b| b.1).fold(F::neg_infinity(), F::max);
            let sigma = config.sigma * (hi - lo);
            let mut raster = Raster::new(lo, hi, lo, hi, config.n_bins, config.n_bins);
            for &(b, d) in &bars {
                raster.add_gaussian(b, d, sigma, F::one());
                raster.add_gaussian(d, b, sigma, -F::one());
            }
            lp_norm_of_samples(&raster.values, raster.dx * raster.dy, p)
        }
        AmplitudeMetric::PersistenceImage => {
            let mut x0 = bars.iter().map(|b| b.0).fold(F::infinity(), F::min);
            let mut x1 = bars.iter().map(|b| b.0).fold(F::neg_infinity(), F::max);
            let max_pers = bars
                .iter()
                .map(|&(b, d)| d - b)
                .fold(F::neg_infinity(), F::max);
            let (y0, y1) = (F::zero(), max_pers);
            if x1 <= x0 {
                // All bars share one birth: give the axis the span of the
                // persistence axis, centered on that birth.
                let half = (y1 - y0) * cast::<F, f64>(0.5);
                let c = x0;
                x0 = c - half;
                x1 = c + half;
            }
            let sigma = config.sigma * (x1 - x0).max(y1 - y0);
            let mut raster = Raster::new(x0, x1, y0, y1, config.n_bins, config.n_bins);
            for &(b, d) in &bars {
                raster.add_gaussian(b, d - b, sigma, d - b);
            }
            lp_norm_of_samples(&raster.values, raster.dx * raster.dy, p)
        }
    };
    Ok(value)
}

/// Shannon entropy of the normalized bar lengths, in nats.
///
/// Empty diagrams (after dropping zero-persistence bars) have entropy 0.
pub fn persistence_entropy<F: Real>(diagram: &PersistenceDiagram<F>) -> F {
    let lengths: Vec<F> = normalized_bars(diagram)
        .iter()
        .map(|&(b, d)| d - b)
        .collect();
    let total: F = lengths.iter().copied().sum();
    if total <= F::zero() {
        return F::zero();
    }
    -lengths
        .iter()
        .filter(|&&l| l > F::zero())
        .map(|&l| {
            let r = l / total;
            r * r.ln()
        })
        .sum::<F>()
}

/// TDA feature vector: 4 channels x 2 homology degrees x (7 amplitudes + entropy).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TdaFeatureVector<F> {
    pub values: Vec<F>,
}

/// Column names of [`tda_feature_vector`], in order.
pub fn tda_schema() -> Vec<String> {
    let mut names = Vec::with_capacity(64);
    for channel in Channel::ALL {
        for dim in 0..2u8 {
            for metric in AmplitudeMetric::ALL {
                names.push(format!("{}_dim{}_{}", channel.name(), dim, metric.name()));
            }
            names.push(format!("{}_dim{}_entropy", channel.name(), dim));
        }
    }
    names
}

/// Extracts the 64 topological features of an image.
///
/// Each channel is swept as a superlevel filtration; the diagram is split by
/// homology degree and every degree contributes the seven amplitudes and the
/// persistence entropy. The essential component enters with its death capped
/// at the channel minimum.
pub fn tda_feature_vector<F: Real>(
    img: &MultiChannelImage<F>,
    config: &AmplitudeConfig<F>,
) -> Result<TdaFeatureVector<F>> {
    config.validate()?;
    let mut values = Vec::with_capacity(64);
    for channel in Channel::ALL {
        let diagram = superlevel_diagram(img.channel(channel));
        for dim in 0..2u8 {
            let part = diagram.only_dim(dim);
            for metric in AmplitudeMetric::ALL {
                values.push(amplitude(&part, metric, config)?);
            }
            values.push(persistence_entropy(&part));
        }
    }
    debug_assert_eq!(values.len(), 64);
    Ok(TdaFeatureVector { values })
}
