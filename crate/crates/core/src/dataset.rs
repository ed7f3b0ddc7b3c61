//! Two-class image datasets laid out as `<root>/<class_name>/<image>`.
//!
//! Class directories are sorted lexicographically and mapped to labels 0 and
//! 1 in that order; files within a class are visited in lexicographic order,
//! so a dataset reads back identically on every run. Unreadable files are
//! skipped and reported rather than aborting the whole read.

use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::field::MultiChannelImage;
use crate::ingest::{load_image, save_pgm, PgmDepth};
use crate::scalar::Real;
use crate::synth::synth_dataset;

/// An image with its class label.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledImage<F> {
    pub image: MultiChannelImage<F>,
    pub label: u8,
}

/// A loaded dataset: images ordered class 0 first, then class 1.
#[derive(Debug, Clone)]
pub struct Dataset<F> {
    pub images: Vec<LabeledImage<F>>,
    pub class_names: [String; 2],
}

/// A file the reader could not decode, with the reason.
#[derive(Debug)]
pub struct SkippedFile {
    pub path: PathBuf,
    pub reason: String,
}

fn sorted_entries(dir: &Path, keep_dirs: bool) -> Result<Vec<PathBuf>> {
    let read = std::fs::read_dir(dir).map_err(|source| Error::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut entries = Vec::new();
    for entry in read {
        let entry = entry.map_err(|source| Error::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        let path = entry.path();
        if path.is_dir() == keep_dirs {
            entries.push(path);
        }
    }
    entries.sort();
    Ok(entries)
}

/// Reads a two-class dataset from disk.
///
/// The image `source_id` becomes `<class_name>/<file_stem>`. Returns the
/// dataset together with any skipped files.
pub fn read_dataset<F: Real>(root: impl AsRef<Path>) -> Result<(Dataset<F>, Vec<SkippedFile>)> {
    let root = root.as_ref();
    let class_dirs = sorted_entries(root, true)?;
    if class_dirs.len() != 2 {
        return Err(Error::ClassLayout {
            path: root.to_path_buf(),
            found: class_dirs.len(),
        });
    }
    let name_of = |dir: &Path| {
        dir.file_name()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default()
    };
    let class_names = [name_of(&class_dirs[0]), name_of(&class_dirs[1])];

    let mut images = Vec::new();
    let mut skipped = Vec::new();
    for (label, dir) in class_dirs.iter().enumerate() {
        for file in sorted_entries(dir, false)? {
            match load_image::<F>(&file) {
                Ok(mut image) => {
                    image.source_id = format!("{}/{}", class_names[label], image.source_id);
                    images.push(LabeledImage {
                        image,
                        label: label as u8,
                    });
                }
                Err(e) => skipped.push(SkippedFile {
                    path: file,
                    reason: e.to_string(),
                }),
            }
        }
    }
    if images.is_empty() {
        return Err(Error::EmptyDataset {
            path: root.to_path_buf(),
        });
    }
    Ok((
        Dataset {
            images,
            class_names,
        },
        skipped,
    ))
}

/// Generates the synthetic dataset and writes it under `root` in the
/// standard layout, as 8-bit PGM files.
pub fn write_synth_dataset(root: impl AsRef<Path>, n_images: usize, seed: u64) -> Result<()> {
    let root = root.as_ref();
    let data = synth_dataset::<f64>(n_images, seed)?;
    for item in &data {
        let rel: &str = &item.image.source_id;
        let path = root.join(format!("{rel}.pgm"));
        let dir = path.parent().expect("class directory");
        std::fs::create_dir_all(dir).map_err(|source| Error::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        save_pgm(
            item.image.channel(crate::field::Channel::Gray),
            &path,
            PgmDepth::Eight,
        )?;
    }
    Ok(())
}
