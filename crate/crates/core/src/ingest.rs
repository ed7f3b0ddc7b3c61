//! Reading images from disk and writing PGM files.
//!
//! Decoding accepts 8- and 16-bit grayscale and RGB images (PNG, PGM, PPM,
//! JPEG, wherever the decoder recognizes the format); alpha channels are
//! dropped. Pixel values enter the pipeline as raw integer intensities; any
//! rescaling is left to preprocessing.

use std::path::Path;

use image::{DynamicImage, ImageBuffer, Luma};

use crate::error::{Error, Result};
use crate::field::{MultiChannelImage, ScalarField};
use crate::scalar::{cast, Real};

fn field_from_samples<F: Real, T: Copy + num_traits::ToPrimitive>(
    width: u32,
    height: u32,
    samples: &[T],
    stride: usize,
    offset: usize,
) -> ScalarField<F> {
    ScalarField::from_fn(width as usize, height as usize, |row, col| {
        cast(samples[(row * width as usize + col) * stride + offset])
    })
}

/// Decodes an image file into the four analysis channels.
pub fn load_image<F: Real>(path: impl AsRef<Path>) -> Result<MultiChannelImage<F>> {
    let path = path.as_ref();
    let decoded = image::ImageReader::open(path)
        .map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?
        .decode()
        .map_err(|e| Error::Decode {
            path: path.to_path_buf(),
            reason: e.to_string(),
        })?;

    let source_id = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.to_string_lossy().into_owned());

    let (w, h) = (decoded.width(), decoded.height());
    if w == 0 || h == 0 {
        return Err(Error::EmptyGrid);
    }
    let img = match &decoded {
        DynamicImage::ImageLuma8(b) => MultiChannelImage::from_gray(
            field_from_samples::<F, u8>(w, h, b.as_raw(), 1, 0),
            source_id,
        ),
        DynamicImage::ImageLumaA8(b) => MultiChannelImage::from_gray(
            field_from_samples::<F, u8>(w, h, b.as_raw(), 2, 0),
            source_id,
        ),
        DynamicImage::ImageLuma16(b) => MultiChannelImage::from_gray(
            field_from_samples::<F, u16>(w, h, b.as_raw(), 1, 0),
            source_id,
        ),
        DynamicImage::ImageLumaA16(b) => MultiChannelImage::from_gray(
            field_from_samples::<F, u16>(w, h, b.as_raw(), 2, 0),
            source_id,
        ),
        DynamicImage::ImageRgb8(b) => rgb_image(w, h, b.as_raw(), 3, source_id)?,
        DynamicImage::ImageRgba8(b) => rgb_image(w, h, b.as_raw(), 4, source_id)?,
        DynamicImage::ImageRgb16(b) => rgb_image(w, h, b.as_raw(), 3, source_id)?,
        DynamicImage::ImageRgba16(b) => rgb_image(w, h, b.as_raw(), 4, source_id)?,
        other => {
            return Err(Error::UnsupportedFormat {
                path: path.to_path_buf(),
                found: format!("{:?}", other.color()),
            })
        }
    };
    Ok(img)
}

fn rgb_image<F: Real, T: Copy + num_traits::ToPrimitive>(
    w: u32,
    h: u32,
    samples: &[T],
    stride: usize,
    source_id: String,
) -> Result<MultiChannelImage<F>> {
    MultiChannelImage::from_rgb(
        field_from_samples(w, h, samples, stride, 0),
        field_from_samples(w, h, samples, stride, 1),
        field_from_samples(w, h, samples, stride, 2),
        source_id,
    )
}

/// Bit depth for PGM output.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PgmDepth {
    Eight,
    Sixteen,
}

impl PgmDepth {
    fn max_value(self) -> f64 {
        match self {
            PgmDepth::Eight => 255.0,
            PgmDepth::Sixteen => 65535.0,
        }
    }
}

/// Affinely maps a field onto the integer range `0..=max_level` with
/// round-to-nearest. A constant field maps to all zeros.
pub fn quantize<F: Real>(field: &ScalarField<F>, max_level: u32) -> ScalarField<F> {
    let (lo, hi) = field.min_max();
    if hi == lo {
        return field.map(|_| F::zero());
    }
    let span = hi - lo;
    let levels: F = cast(max_level);
    field.map(|v| ((v - lo) / span * levels).round())
}

/// Writes a field holding integral values in range as a binary PGM.
pub fn save_pgm<F: Real>(
    field: &ScalarField<F>,
    path: impl AsRef<Path>,
    depth: PgmDepth,
) -> Result<()> {
    let path = path.as_ref();
    let max = depth.max_value();
    for (index, &v) in field.values().iter().enumerate() {
        let f = v.to_f64().expect("finite");
        if f < 0.0 || f > max || f.fract() != 0.0 {
            return Err(Error::Encode {
                path: path.to_path_buf(),
                reason: format!("value {f} at index {index} is not an integer in 0..={max}"),
            });
        }
    }
    let w = field.width() as u32;
    let h = field.height() as u32;
    let save_err = |e: image::ImageError| Error::Encode {
        path: path.to_path_buf(),
        reason: e.to_string(),
    };
    match depth {
        PgmDepth::Eight => {
            let buf: ImageBuffer<Luma<u8>, Vec<u8>> = ImageBuffer::from_fn(w, h, |x, y| {
                Luma([field
                    .value(y as usize, x as usize)
                    .to_u8()
                    .expect("checked")])
            });
            buf.save(path).map_err(save_err)
        }
        PgmDepth::Sixteen => {
            let buf: ImageBuffer<Luma<u16>, Vec<u16>> = ImageBuffer::from_fn(w, h, |x, y| {
                Luma([field
                    .value(y as usize, x as usize)
                    .to_u16()
                    .expect("checked")])
            });
            buf.save(path).map_err(save_err)
        }
    }
}
