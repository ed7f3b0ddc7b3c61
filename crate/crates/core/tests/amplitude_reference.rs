//! Checks every amplitude against an independent naive reimplementation and
//! against closed-form values on small diagrams.

use geotop::persistence::{Bar, Direction, PersistenceDiagram};
use geotop::tda::{amplitude, persistence_entropy, AmplitudeConfig, AmplitudeMetric};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn sublevel(bars: &[(f64, f64)]) -> PersistenceDiagram<f64> {
    PersistenceDiagram {
        bars: bars
            .iter()
            .map(|&(birth, death)| Bar {
                birth,
                death,
                dim: 0,
                essential: false,
            })
            .collect(),
        direction: Direction::Sublevel,
    }
}

fn relative_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

// Naive versions below share no helpers with the library: plain loops only.

fn naive_bottleneck(bars: &[(f64, f64)]) -> f64 {
    let mut best = 0.0f64;
    for &(b, d) in bars {
        best = best.max((d - b) / 2.0);
    }
    best
}

fn naive_wasserstein(bars: &[(f64, f64)], p: f64) -> f64 {
    let mut total = 0.0;
    for &(b, d) in bars {
        total += ((d - b) / 2.0f64.sqrt()).powf(p);
    }
    total.powf(1.0 / p)
}

fn span(bars: &[(f64, f64)]) -> (f64, f64) {
    let lo = bars.iter().map(|b| b.0).fold(f64::INFINITY, f64::min);
    let hi = bars.iter().map(|b| b.1).fold(f64::NEG_INFINITY, f64::max);
    (lo, hi)
}

fn naive_betti(bars: &[(f64, f64)], cfg: &AmplitudeConfig<f64>) -> f64 {
    let (lo, hi) = span(bars);
    let step = (hi - lo) / cfg.n_bins as f64;
    let mut total = 0.0;
    for j in 0..cfg.n_bins {
        let t = lo + step * (j as f64 + 0.5);
        let mut count = 0usize;
        for &(b, d) in bars {
            if b <= t && t <= d {
                count += 1;
            }
        }
        total += (count as f64).powf(cfg.p);
    }
    (total * step).powf(1.0 / cfg.p)
}

fn naive_landscape(bars: &[(f64, f64)], cfg: &AmplitudeConfig<f64>) -> f64 {
    let (lo, hi) = span(bars);
    let step = (hi - lo) / cfg.n_bins as f64;
    let mut total = 0.0;
    for j in 0..cfg.n_bins {
        let t = lo + step * (j as f64 + 0.5);
        let mut heights: Vec<f64> = bars
            .iter()
            .map(|&(b, d)| (t - b).min(d - t).max(0.0))
            .collect();
        heights.sort_by(|a, b| b.total_cmp(a));
        for k in 0..cfg.n_layers {
            let h = heights.get(k).copied().unwrap_or(0.0);
            total += h.powf(cfg.p);
        }
    }
    (total * step).powf(1.0 / cfg.p)
}

fn naive_silhouette(bars: &[(f64, f64)], cfg: &AmplitudeConfig<f64>) -> f64 {
    let (lo, hi) = span(bars);
    let step = (hi - lo) / cfg.n_bins as f64;
    let mut weight_sum = 0.0;
    for &(b, d) in bars {
        weight_sum += (d - b).powf(cfg.power);
    }
    let mut total = 0.0;
    for j in 0..cfg.n_bins {
        let t = lo + step * (j as f64 + 0.5);
        let mut acc = 0.0;
        for &(b, d) in bars {
            acc += (d - b).powf(cfg.power) * (t - b).min(d - t).max(0.0);
        }
        total += (acc / weight_sum).abs().powf(cfg.p);
    }
    (total * step).powf(1.0 / cfg.p)
}

/// Full-grid Gaussian sums with no truncation window.
fn naive_heat(bars: &[(f64, f64)], cfg: &AmplitudeConfig<f64>) -> f64 {
    let (lo, hi) = span(bars);
    let sigma = cfg.sigma * (hi - lo);
    let n = cfg.n_bins;
    let step = (hi - lo) / n as f64;
    let norm = 1.0 / (2.0 * std::f64::consts::PI * sigma * sigma);
    let mut total = 0.0;
    for jy in 0..n {
        let y = lo + step * (jy as f64 + 0.5);
        for jx in 0..n {
            let x = lo + step * (jx as f64 + 0.5);
            let mut v = 0.0;
            for &(b, d) in bars {
                let q1 = ((x - b).powi(2) + (y - d).powi(2)) / (2.0 * sigma * sigma);
                let q2 = ((x - d).powi(2) + (y - b).powi(2)) / (2.0 * sigma * sigma);
                v += norm * ((-q1).exp() - (-q2).exp());
            }
            total += v.abs().powf(cfg.p);
        }
    }
    (total * step * step).powf(1.0 / cfg.p)
}

/// Full-grid persistence image with no truncation window.
fn naive_persistence_image(bars: &[(f64, f64)], cfg: &AmplitudeConfig<f64>) -> f64 {
    let mut x0 = bars.iter().map(|b| b.0).fold(f64::INFINITY, f64::min);
    let mut x1 = bars.iter().map(|b| b.0).fold(f64::NEG_INFINITY, f64::max);
    let y0 = 0.0;
    let y1 = bars
        .iter()
        .map(|&(b, d)| d - b)
        .fold(f64::NEG_INFINITY, f64::max);
    if x1 <= x0 {
        let half = (y1 - y0) / 2.0;
        x1 = x0 + half;
        x0 -= half;
    }
    let sigma = cfg.sigma * (x1 - x0).max(y1 - y0);
    let n = cfg.n_bins;
    let dx = (x1 - x0) / n as f64;
    let dy = (y1 - y0) / n as f64;
    let norm = 1.0 / (2.0 * std::f64::consts::PI * sigma * sigma);
    let mut total = 0.0;
    for jy in 0..n {
        let y = y0 + dy * (jy as f64 + 0.5);
        for jx in 0..n {
            let x = x0 + dx * (jx as f64 + 0.5);
            let mut v = 0.0;
            for &(b, d) in bars {
                let q = ((x - b).powi(2) + (y - (d - b)).powi(2)) / (2.0 * sigma * sigma);
                v += (d - b) * norm * (-q).exp();
            }
            total += v.abs().powf(cfg.p);
        }
    }
    (total * dx * dy).powf(1.0 / cfg.p)
}

fn naive_entropy(bars: &[(f64, f64)]) -> f64 {
    let total: f64 = bars.iter().map(|&(b, d)| d - b).sum();
    let mut h = 0.0;
    for &(b, d) in bars {
        let r = (d - b) / total;
        h -= r * r.ln();
    }
    h
}

fn random_bars(rng: &mut ChaCha8Rng) -> Vec<(f64, f64)> {
    let n = rng.random_range(1..=8);
    (0..n)
        .map(|_| {
            let b = rng.random_range(-1.0..2.0);
            let pers = rng.random_range(0.05..1.5);
            (b, b + pers)
        })
        .collect()
}

#[test]
fn amplitudes_match_naive_reimplementation() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let cfg = AmplitudeConfig::default();
    for case in 0..60 {
        let bars = random_bars(&mut rng);
        let diagram = sublevel(&bars);

        let exact: &[(AmplitudeMetric, f64)] = &[
            (AmplitudeMetric::Bottleneck, naive_bottleneck(&bars)),
            (
                AmplitudeMetric::Wasserstein,
                naive_wasserstein(&bars, cfg.p),
            ),
            (AmplitudeMetric::Betti, naive_betti(&bars, &cfg)),
            (AmplitudeMetric::Landscape, naive_landscape(&bars, &cfg)),
            (AmplitudeMetric::Silhouette, naive_silhouette(&bars, &cfg)),
        ];
        for &(metric, want) in exact {
            let got = amplitude(&diagram, metric, &cfg).unwrap();
            assert!(
                relative_close(got, want, 1e-9),
                "case {case} {}: got {got}, naive {want}",
                metric.name()
            );
        }

        // The library truncates Gaussians at four sigma; the naive grids do
        // not, so these two agree only up to that tail mass.
        let rastered: &[(AmplitudeMetric, f64)] = &[
            (AmplitudeMetric::Heat, naive_heat(&bars, &cfg)),
            (
                AmplitudeMetric::PersistenceImage,
                naive_persistence_image(&bars, &cfg),
            ),
        ];
        for &(metric, want) in rastered {
            let got = amplitude(&diagram, metric, &cfg).unwrap();
            assert!(
                relative_close(got, want, 2e-2),
                "case {case} {}: got {got}, naive {want}",
                metric.name()
            );
        }

        let got = persistence_entropy(&diagram);
        let want = naive_entropy(&bars);
        assert!(
            relative_close(got, want, 1e-12),
            "case {case} entropy: got {got}, naive {want}"
        );
    }
}

#[test]
fn superlevel_diagrams_score_like_their_negated_sublevel_twin() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let cfg = AmplitudeConfig::default();
    for _ in 0..20 {
        let bars = random_bars(&mut rng);
        let sup = PersistenceDiagram {
            bars: bars
                .iter()
                .map(|&(b, d)| Bar {
                    birth: d,
                    death: b,
                    dim: 1,
                    essential: false,
                })
                .collect(),
            direction: Direction::Superlevel,
        };
        let negated: Vec<(f64, f64)> = bars.iter().map(|&(b, d)| (-d, -b)).collect();
        let sub = PersistenceDiagram {
            bars: negated
                .iter()
                .map(|&(b, d)| Bar {
                    birth: b,
                    death: d,
                    dim: 1,
                    essential: false,
                })
                .collect(),
            direction: Direction::Sublevel,
        };
        for metric in AmplitudeMetric::ALL {
            let a = amplitude(&sup, metric, &cfg).unwrap();
            let b = amplitude(&sub, metric, &cfg).unwrap();
            assert!(relative_close(a, b, 1e-12), "{}: {a} vs {b}", metric.name());
        }
        assert!(relative_close(
            persistence_entropy(&sup),
            persistence_entropy(&sub),
            1e-12
        ));
    }
}

#[test]
fn closed_form_anchors() {
    let cfg = AmplitudeConfig::default();
    let two = sublevel(&[(0.0, 2.0), (1.0, 3.0)]);

    // Largest half-persistence and the l2 sum of bar-to-diagonal distances.
    let b = amplitude(&two, AmplitudeMetric::Bottleneck, &cfg).unwrap();
    assert!((b - 1.0).abs() < 1e-12, "bottleneck {b}");
    let w = amplitude(&two, AmplitudeMetric::Wasserstein, &cfg).unwrap();
    assert!((w - 2.0).abs() < 1e-12, "wasserstein {w}");

    // Betti curve is 1 on [0,1), 2 on [1,2], 1 on (2,3]: integral of the
    // square is 6. Midpoint sampling at 100 bins lands within one bin width.
    let betti = amplitude(&two, AmplitudeMetric::Betti, &cfg).unwrap();
    assert!(
        relative_close(betti, 6.0f64.sqrt(), 2e-2),
        "betti {betti} vs sqrt(6)"
    );

    // One bar (0,2): the first landscape layer is the unit tent with squared
    // l2 norm 2/3, and the uniform-weight silhouette is the same tent.
    let one = sublevel(&[(0.0, 2.0)]);
    let want = (2.0f64 / 3.0).sqrt();
    let land = amplitude(&one, AmplitudeMetric::Landscape, &cfg).unwrap();
    assert!(relative_close(land, want, 2e-2), "landscape {land}");
    let sil = amplitude(&one, AmplitudeMetric::Silhouette, &cfg).unwrap();
    assert!(relative_close(sil, want, 2e-2), "silhouette {sil}");

    // Two equal-length bars split mass evenly: ln 2 nats.
    let equal = sublevel(&[(0.0, 1.0), (4.0, 5.0)]);
    assert!((persistence_entropy(&equal) - 2.0f64.ln()).abs() < 1e-12);
}
