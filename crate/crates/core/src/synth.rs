//! Synthetic inputs with known structure.
//!
//! Two generators: a single Gaussian peak with a constant bright square for
//! the tracking walkthrough, and a two-class blob dataset for exercising the
//! evaluation harness. Both are fully determined by their seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dataset::LabeledImage;
use crate::error::{Error, Result};
use crate::field::{MultiChannelImage, ScalarField};
use crate::scalar::{cast, Real};

/// Gaussian peak with a bright square near the southeast corner.
///
/// The field is an `n x n` isotropic Gaussian density centered on the grid
/// (bandwidth `n / 10`); the square's `square_side^2` pixels are then set to
/// the maximum sampled value. The two structures are born together at the
/// top of a superlevel sweep and stay separate until the sweep reaches the
/// far tail of the Gaussian, so their bar persistences nearly coincide while
/// the square's area stays exactly `square_side^2` for its entire life.
///
/// `noise_amplitude` adds uniform noise in `[0, amplitude)` per pixel; zero
/// (the default for [`synth_gaussian_square`]) keeps the values exact.
pub fn gaussian_square_field<F: Real>(
    n: usize,
    square_side: usize,
    seed: u64,
    noise_amplitude: f64,
) -> Result<ScalarField<F>> {
    let margin = (n / 40).max(2);
    if square_side == 0 || square_side + margin >= n / 2 {
        return Err(Error::SquareTooLarge {
            side: square_side,
            n,
        });
    }
    let center = (n as f64 - 1.0) / 2.0;
    let sigma = n as f64 / 10.0;
    let two_sigma_sq = 2.0 * sigma * sigma;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut values = Vec::with_capacity(n * n);
    for row in 0..n {
        for col in 0..n {
            let dr = row as f64 - center;
            let dc = col as f64 - center;
            let mut v = (-(dr * dr + dc * dc) / two_sigma_sq).exp();
            if noise_amplitude > 0.0 {
                v += rng.random::<f64>() * noise_amplitude;
            }
            values.push(v);
        }
    }
    let peak = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);

    let row0 = n - square_side - margin;
    let col0 = n - square_side - margin;
    for row in row0..row0 + square_side {
        for col in col0..col0 + square_side {
            values[row * n + col] = peak;
        }
    }

    ScalarField::new(n, n, values.into_iter().map(cast).collect())
}

/// Noise-free Gaussian-plus-square image, gray replicated into all channels.
pub fn synth_gaussian_square<F: Real>(
    n: usize,
    square_side: usize,
    seed: u64,
) -> Result<MultiChannelImage<F>> {
    Ok(MultiChannelImage::from_gray(
        gaussian_square_field(n, square_side, seed, 0.0)?,
        "gaussian_square",
    ))
}

/// Side length of the synthetic dataset images.
pub const SYNTH_IMAGE_SIDE: usize = 64;

/// Directory names used when the synthetic dataset is written to disk;
/// lexicographic order fixes the label assignment.
pub const SYNTH_CLASS_NAMES: [&str; 2] = ["class_0", "class_1"];

fn blob(field: &mut [f64], n: usize, center: (f64, f64), bandwidth: f64, amplitude: f64) {
    let two_bw_sq = 2.0 * bandwidth * bandwidth;
    for row in 0..n {
        for col in 0..n {
            let dr = row as f64 - center.0;
            let dc = col as f64 - center.1;
            let v = amplitude * (-(dr * dr + dc * dc) / two_bw_sq).exp();
            let cell = &mut field[row * n + col];
            if v > *cell {
                *cell = v;
            }
        }
    }
}

/// Two-class synthetic dataset: even indices are single smooth blobs
/// (label 0), odd indices are clusters of 3 to 5 lobes (label 1). Images are
/// 64x64, quantized to 8-bit levels, with the gray field replicated into all
/// channels. Image `i` depends only on `(seed, i)`.
pub fn synth_dataset<F: Real>(n_images: usize, seed: u64) -> Result<Vec<LabeledImage<F>>> {
    let n = SYNTH_IMAGE_SIDE;
    let mut out = Vec::with_capacity(n_images);
    for i in 0..n_images {
        let label = (i % 2) as u8;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64);
        let mut raw = vec![0.0f64; n * n];
        let mid = (n as f64 - 1.0) / 2.0;

        if label == 0 {
            let center = (
                mid + rng.random_range(-4.0..4.0),
                mid + rng.random_range(-4.0..4.0),
            );
            let bandwidth = rng.random_range(8.5..11.5);
            blob(&mut raw, n, center, bandwidth, 1.0);
        } else {
            let lobes = rng.random_range(3..=5);
            for j in 0..lobes {
                let angle =
                    std::f64::consts::TAU * (j as f64 + rng.random_range(0.0..0.5)) / lobes as f64;
                let radius = rng.random_range(9.0..15.0);
                let center = (mid + radius * angle.sin(), mid + radius * angle.cos());
                let bandwidth = rng.random_range(4.0..6.0);
                let amplitude = rng.random_range(0.7..1.0);
                blob(&mut raw, n, center, bandwidth, amplitude);
            }
        }
        for v in &mut raw {
            *v += rng.random::<f64>() * 0.03;
        }

        let peak = raw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let gray = ScalarField::from_fn(n, n, |row, col| {
            cast(
                (raw[row * n + col] / peak * 255.0)
                    .round()
                    .clamp(0.0, 255.0),
            )
        });
        let source_id = format!("{}/img_{:05}", SYNTH_CLASS_NAMES[label as usize], i);
        out.push(LabeledImage {
            image: MultiChannelImage::from_gray(gray, source_id),
            label,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Channel;

    #[test]
    fn gaussian_square_peak_is_shared_exactly() {
        let f: ScalarField<f64> = gaussian_square_field(60, 6, 0, 0.0).unwrap();
        let (_, hi) = f.min_max();
        // All 36 square pixels hold the global maximum. Margin for n = 60
        // is the floor of 2.
        let margin = 2;
        let r0 = 60 - 6 - margin;
        let mut square_peaks = 0;
        for row in r0..r0 + 6 {
            for col in r0..r0 + 6 {
                assert_eq!(f.value(row, col), hi);
                square_peaks += 1;
            }
        }
        assert_eq!(square_peaks, 36);
        // The center pixels also sit at the maximum.
        assert_eq!(f.value(30, 30), hi);
    }

    #[test]
    fn gaussian_square_is_deterministic() {
        let a: ScalarField<f64> = gaussian_square_field(40, 4, 7, 0.001).unwrap();
        let b: ScalarField<f64> = gaussian_square_field(40, 4, 7, 0.001).unwrap();
        assert_eq!(a, b);
        let c: ScalarField<f64> = gaussian_square_field(40, 4, 8, 0.001).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn oversized_square_is_rejected() {
        assert!(matches!(
            gaussian_square_field::<f64>(20, 10, 0, 0.0),
            Err(Error::SquareTooLarge { .. })
        ));
    }

    #[test]
    fn dataset_labels_alternate_and_images_are_quantized() {
        let data = synth_dataset::<f64>(6, 42).unwrap();
        assert_eq!(data.len(), 6);
        for (i, li) in data.iter().enumerate() {
            assert_eq!(li.label, (i % 2) as u8);
            assert_eq!(li.image.width(), SYNTH_IMAGE_SIDE);
            let g = li.image.channel(Channel::Gray);
            assert!(g
                .values()
                .iter()
                .all(|v| v.fract() == 0.0 && *v >= 0.0 && *v <= 255.0));
            let (_, hi) = g.min_max();
            assert_eq!(hi, 255.0);
        }
        assert_eq!(data[0].image.source_id, "class_0/img_00000");
        assert_eq!(data[1].image.source_id, "class_1/img_00001");
    }

    #[test]
    fn dataset_images_depend_only_on_seed_and_index() {
        let a = synth_dataset::<f64>(4, 9).unwrap();
        let b = synth_dataset::<f64>(8, 9).unwrap();
        for i in 0..4 {
            assert_eq!(a[i].image, b[i].image);
        }
        let c = synth_dataset::<f64>(4, 10).unwrap();
        assert_ne!(a[0].image, c[0].image);
    }
}
