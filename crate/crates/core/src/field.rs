//! Scalar fields on a pixel grid and the image types built from them.
//!
//! A [`ScalarField`] is a `height x width` grid of finite scalar values in
//! row-major order. Pixel `(row, col)` sits at index `row * width + col`.
//! A [`MultiChannelImage`] bundles the four analysis channels (gray plus
//! RGB); grayscale sources replicate the gray field so downstream code can
//! treat every image identically.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{cast, Real};

/// Dense row-major grid of finite scalar values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalarField<F> {
    width: usize,
    height: usize,
    values: Vec<F>,
}

impl<F: Real> ScalarField<F> {
    /// Builds a field after checking shape and finiteness.
    pub fn new(width: usize, height: usize, values: Vec<F>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::EmptyGrid);
        }
        let expected = width * height;
        if values.len() != expected {
            return Err(Error::ShapeMismatch {
                width,
                height,
                expected,
                got: values.len(),
            });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self {
            width,
            height,
            values,
        })
    }

    /// Builds a field from a per-pixel closure `(row, col) -> value`.
    ///
    /// Panics on an empty grid; debug builds also check finiteness.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> F) -> Self {
        assert!(width > 0 && height > 0, "grid must be non-empty");
        let mut values = Vec::with_capacity(width * height);
        for row in 0..height {
            for col in 0..width {
                values.push(f(row, col));
            }
        }
        debug_assert!(values.iter().all(|v| v.is_finite()));
        Self {
            width,
            height,
            values,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[F] {
        &self.values
    }

    #[inline]
    pub fn index_of(&self, row: usize, col: usize) -> usize {
        debug_assert!(row < self.height && col < self.width);
        row * self.width + col
    }

    #[inline]
    pub fn row_col(&self, index: usize) -> (usize, usize) {
        (index / self.width, index % self.width)
    }

    #[inline]
    pub fn value(&self, row: usize, col: usize) -> F {
        self.values[self.index_of(row, col)]
    }

    #[inline]
    pub fn value_at(&self, index: usize) -> F {
        self.values[index]
    }

    /// Smallest and largest value in the field.
    pub fn min_max(&self) -> (F, F) {
        let mut lo = self.values[0];
        let mut hi = self.values[0];
        for &v in &self.values[1..] {
            if v < lo {
                lo = v;
            }
            if v > hi {
                hi = v;
            }
        }
        (lo, hi)
    }

    /// 4-neighbors (edge-sharing) of a pixel, as row-major indices.
    #[inline]
    pub fn neighbors4(&self, index: usize) -> impl Iterator<Item = usize> + '_ {
        let (row, col) = self.row_col(index);
        const OFFSETS: [(i64, i64); 4] = [(-1, 0), (0, -1), (0, 1), (1, 0)];
        OFFSETS.iter().filter_map(move |&(dr, dc)| {
            let r = row as i64 + dr;
            let c = col as i64 + dc;
            (r >= 0 && r < self.height as i64 && c >= 0 && c < self.width as i64)
                .then(|| r as usize * self.width + c as usize)
        })
    }

    /// 8-neighbors (edge- or corner-sharing) of a pixel, as row-major indices.
    #[inline]
    pub fn neighbors8(&self, index: usize) -> impl Iterator<Item = usize> + '_ {
        let (row, col) = self.row_col(index);
        const OFFSETS: [(i64, i64); 8] = [
            (-1, -1),
            (-1, 0),
            (-1, 1),
            (0, -1),
            (0, 1),
            (1, -1),
            (1, 0),
            (1, 1),
        ];
        OFFSETS.iter().filter_map(move |&(dr, dc)| {
            let r = row as i64 + dr;
            let c = col as i64 + dc;
            (r >= 0 && r < self.height as i64 && c >= 0 && c < self.width as i64)
                .then(|| r as usize * self.width + c as usize)
        })
    }

    /// Applies `f` to every value.
    pub fn map(&self, f: impl Fn(F) -> F) -> Self {
        Self {
            width: self.width,
            height: self.height,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }
}

/// Binary excursion mask at a fixed threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryImage<F> {
    width: usize,
    height: usize,
    mask: Vec<bool>,
    pub threshold: F,
}

impl<F: Real> BinaryImage<F> {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    #[inline]
    pub fn is_active(&self, index: usize) -> bool {
        self.mask[index]
    }

    #[inline]
    pub fn at(&self, row: usize, col: usize) -> bool {
        self.mask[row * self.width + col]
    }

    pub fn active_count(&self) -> usize {
        self.mask.iter().filter(|&&b| b).count()
    }
}

/// Pixels with value at or above `t`.
///
/// The mask is monotone in `t`: lowering the threshold only adds pixels.
pub fn excursion_set<F: Real>(field: &ScalarField<F>, t: F) -> BinaryImage<F> {
    BinaryImage {
        width: field.width(),
        height: field.height(),
        mask: field.values().iter().map(|&v| v >= t).collect(),
        threshold: t,
    }
}

/// Analysis channels, in schema order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Channel {
    Gray,
    Red,
    Green,
    Blue,
}

impl Channel {
    pub const ALL: [Channel; 4] = [Channel::Gray, Channel::Red, Channel::Green, Channel::Blue];

    pub fn name(self) -> &'static str {
        match self {
            Channel::Gray => "gray",
            Channel::Red => "red",
            Channel::Green => "green",
            Channel::Blue => "blue",
        }
    }
}

/// Image with the four analysis channels and a stable source identifier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiChannelImage<F> {
    gray: ScalarField<F>,
    red: ScalarField<F>,
    green: ScalarField<F>,
    blue: ScalarField<F>,
    pub source_id: String,
}

impl<F: Real> MultiChannelImage<F> {
    /// Grayscale source: the gray field is replicated into R, G and B.
    pub fn from_gray(gray: ScalarField<F>, source_id: impl Into<String>) -> Self {
        Self {
            red: gray.clone(),
            green: gray.clone(),
            blue: gray.clone(),
            gray,
            source_id: source_id.into(),
        }
    }

    /// Color source: gray is the Rec. 601 luma 0.299 R + 0.587 G + 0.114 B.
    pub fn from_rgb(
        red: ScalarField<F>,
        green: ScalarField<F>,
        blue: ScalarField<F>,
        source_id: impl Into<String>,
    ) -> Result<Self> {
        if red.width() != green.width()
            || red.width() != blue.width()
            || red.height() != green.height()
            || red.height() != blue.height()
        {
            return Err(Error::ChannelMismatch(format!(
                "{}x{}, {}x{}, {}x{}",
                red.width(),
                red.height(),
                green.width(),
                green.height(),
                blue.width(),
                blue.height()
            )));
        }
        let gray = ScalarField::from_fn(red.width(), red.height(), |row, col| {
            let r = red.value(row, col).to_f64().expect("finite");
            let g = green.value(row, col).to_f64().expect("finite");
            let b = blue.value(row, col).to_f64().expect("finite");
            cast(0.299 * r + 0.587 * g + 0.114 * b)
        });
        Ok(Self {
            gray,
            red,
            green,
            blue,
            source_id: source_id.into(),
        })
    }

    pub fn channel(&self, channel: Channel) -> &ScalarField<F> {
        match channel {
            Channel::Gray => &self.gray,
            Channel::Red => &self.red,
            Channel::Green => &self.green,
            Channel::Blue => &self.blue,
        }
    }

    pub fn width(&self) -> usize {
        self.gray.width()
    }

    pub fn height(&self) -> usize {
        self.gray.height()
    }
}

/// Whether the gray channel is brighter along the border frame than in the
/// central window, i.e. the object of interest sits in the LOW values and
/// the field's polarity must be flipped before superlevel analysis.
///
/// The frame is the outermost rows/columns with thickness
/// `max(1, round(0.1 * dim))` per dimension; the window is the central half
/// of the rows crossed with the central half of the columns.
pub fn polarity_flip_needed<F: Real>(gray: &ScalarField<F>) -> bool {
    let h = gray.height();
    let w = gray.width();
    let frame_rows = ((h as f64) * 0.1).round().max(1.0) as usize;
    let frame_cols = ((w as f64) * 0.1).round().max(1.0) as usize;

    let mut border_sum = 0.0f64;
    let mut border_n = 0u64;
    let mut center_sum = 0.0f64;
    let mut center_n = 0u64;

    let (r0, r1) = (h / 4, h - h / 4);
    let (c0, c1) = (w / 4, w - w / 4);

    for row in 0..h {
        for col in 0..w {
            let v = gray.value(row, col).to_f64().expect("finite");
            let in_frame = row < frame_rows
                || row >= h.saturating_sub(frame_rows)
                || col < frame_cols
                || col >= w.saturating_sub(frame_cols);
            if in_frame {
                border_sum += v;
                border_n += 1;
            }
            if row >= r0 && row < r1 && col >= c0 && col < c1 {
                center_sum += v;
                center_n += 1;
            }
        }
    }
    if border_n == 0 || center_n == 0 {
        return false;
    }
    border_sum / border_n as f64 > center_sum / center_n as f64
}

/// Shifts and scales a field to mean 0 and population standard deviation 1.
///
/// A constant field maps to all zeros.
pub fn standardize<F: Real>(field: &ScalarField<F>) -> ScalarField<F> {
    let n: F = cast(field.len());
    let mean = field.values().iter().copied().sum::<F>() / n;
    let var = field
        .values()
        .iter()
        .map(|&v| (v - mean) * (v - mean))
        .sum::<F>()
        / n;
    let sd = var.sqrt();
    if sd == F::zero() {
        field.map(|_| F::zero())
    } else {
        field.map(|v| (v - mean) / sd)
    }
}

/// Polarity correction followed by per-channel standardization.
///
/// Polarity is decided once, on the raw gray channel, and the flip (if any)
/// negates every channel so they stay aligned. Standardization is invariant
/// to that affine history, which makes the whole transform idempotent.
pub fn preprocess<F: Real>(img: &MultiChannelImage<F>) -> MultiChannelImage<F> {
    let flip = polarity_flip_needed(img.channel(Channel::Gray));
    let oriented = |field: &ScalarField<F>| {
        if flip {
            field.map(|v| -v)
        } else {
            field.clone()
        }
    };
    MultiChannelImage {
        gray: standardize(&oriented(img.channel(Channel::Gray))),
        red: standardize(&oriented(img.channel(Channel::Red))),
        green: standardize(&oriented(img.channel(Channel::Green))),
        blue: standardize(&oriented(img.channel(Channel::Blue))),
        source_id: img.source_id.clone(),
    }
}
