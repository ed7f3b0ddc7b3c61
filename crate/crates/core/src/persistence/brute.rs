//! Exhaustive superlevel diagram for small fields.
//!
//! Deliberately independent of the union-find sweeps: the excursion set is
//! relabeled from scratch by breadth-first search at every distinct pixel
//! value, and components are matched across consecutive thresholds by pixel
//! containment. The same elder rule applies (higher birth survives a merge,
//! ties to the smaller row-major birth index; for complement components the
//! older class is the one holding the smaller minimum). Guarded to stay
//! cheap: at most 32x32 pixels and 64 distinct values.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::scalar::Real;

use super::{Bar, Direction, PersistenceDiagram};

const MAX_SIDE: usize = 32;
const MAX_DISTINCT: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum BgTag {
    /// Part of the complement class that touches the image border.
    Outer,
    Hole(u32),
}

struct FgRecord<F> {
    birth_val: F,
    birth_idx: u32,
}

struct HoleRecord<F> {
    birth: F,
    alive: bool,
}

/// Labels the pixels satisfying `pred` into connected components.
///
/// Returns per-pixel labels (`u32::MAX` when inactive) and the pixel lists of
/// each component in first-seen order.
fn label_components<F: Real>(
    field: &ScalarField<F>,
    pred: impl Fn(usize) -> bool,
    eight_connected: bool,
) -> (Vec<u32>, Vec<Vec<u32>>) {
    let n = field.len();
    let mut label = vec![u32::MAX; n];
    let mut comps: Vec<Vec<u32>> = Vec::new();
    let mut queue = VecDeque::new();
    for start in 0..n {
        if !pred(start) || label[start] != u32::MAX {
            continue;
        }
        let id = comps.len() as u32;
        let mut pixels = Vec::new();
        label[start] = id;
        queue.push_back(start);
        while let Some(p) = queue.pop_front() {
            pixels.push(p as u32);
            let mut visit = |q: usize| {
                if pred(q) && label[q] == u32::MAX {
                    label[q] = id;
                    queue.push_back(q);
                }
            };
            if eight_connected {
                for q in field.neighbors8(p) {
                    visit(q);
                }
            } else {
                for q in field.neighbors4(p) {
                    visit(q);
                }
            }
        }
        comps.push(pixels);
    }
    (label, comps)
}

/// Superlevel persistence of a small field by exhaustive thresholding.
pub fn brute_force_diagram<F: Real>(field: &ScalarField<F>) -> Result<PersistenceDiagram<F>> {
    if field.width() > MAX_SIDE || field.height() > MAX_SIDE {
        return Err(Error::OracleGuard(format!(
            "grid {}x{} exceeds the {}x{} limit",
            field.width(),
            field.height(),
            MAX_SIDE,
            MAX_SIDE
        )));
    }
    let mut thresholds: Vec<F> = field.values().to_vec();
    thresholds.sort_by(|a, b| b.partial_cmp(a).expect("finite"));
    thresholds.dedup();
    if thresholds.len() > MAX_DISTINCT {
        return Err(Error::OracleGuard(format!(
            "{} distinct values exceed the limit of {}",
            thresholds.len(),
            MAX_DISTINCT
        )));
    }

    let n = field.len();
    let h = field.height();
    let w = field.width();
    let on_border = |p: u32| {
        let (row, col) = field.row_col(p as usize);
        row == 0 || row + 1 == h || col == 0 || col + 1 == w
    };

    let mut bars: Vec<Bar<F>> = Vec::new();
    let mut fg_records: Vec<FgRecord<F>> = Vec::new();
    let mut fg_identity: Vec<Option<u32>> = vec![None; n];
    let mut hole_records: Vec<HoleRecord<F>> = Vec::new();
    let mut bg_tag: Vec<BgTag> = vec![BgTag::Outer; n];

    for &t in &thresholds {
        // Foreground: 8-connected components of {value >= t}.
        let (_, fg_comps) = label_components(field, |p| field.value_at(p) >= t, true);
        for pixels in &fg_comps {
            let mut prior: Vec<u32> = pixels
                .iter()
                .filter_map(|&p| fg_identity[p as usize])
                .collect();
            prior.sort_unstable();
            prior.dedup();
            let identity = if prior.is_empty() {
                let birth_idx = *pixels.iter().min().expect("non-empty component");
                fg_records.push(FgRecord {
                    birth_val: t,
                    birth_idx,
                });
                (fg_records.len() - 1) as u32
            } else {
                let survivor = *prior
                    .iter()
                    .max_by(|&&a, &&b| {
                        let ra = &fg_records[a as usize];
                        let rb = &fg_records[b as usize];
                        ra.birth_val
                            .partial_cmp(&rb.birth_val)
                            .expect("finite")
                            .then(rb.birth_idx.cmp(&ra.birth_idx))
                    })
                    .expect("non-empty");
                for &victim in prior.iter().filter(|&&id| id != survivor) {
                    bars.push(Bar {
                        birth: fg_records[victim as usize].birth_val,
                        death: t,
                        dim: 0,
                        essential: false,
                    });
                }
                survivor
            };
            for &p in pixels {
                fg_identity[p as usize] = Some(identity);
            }
        }

        // Background: 4-connected components of {value < t}, matched to the
        // previous threshold's components by containment.
        let (_, bg_comps) = label_components(field, |p| field.value_at(p) < t, false);
        let mut children_of_hole: Vec<Vec<usize>> = vec![Vec::new(); hole_records.len()];
        let mut outer_children: Vec<usize> = Vec::new();
        for (ci, pixels) in bg_comps.iter().enumerate() {
            let parent = bg_tag[pixels[0] as usize];
            debug_assert!(pixels.iter().all(|&p| bg_tag[p as usize] == parent));
            match parent {
                BgTag::Outer => outer_children.push(ci),
                BgTag::Hole(hid) => children_of_hole[hid as usize].push(ci),
            }
        }

        let bounded = |ci: usize| !bg_comps[ci].iter().any(|&p| on_border(p));
        let min_key = |ci: usize| {
            bg_comps[ci]
                .iter()
                .map(|&p| (field.value_at(p as usize), p))
                .min_by(|a, b| a.0.partial_cmp(&b.0).expect("finite").then(a.1.cmp(&b.1)))
                .expect("non-empty component")
        };

        let new_hole =
            |ci: usize, hole_records: &mut Vec<HoleRecord<F>>, bg_tag: &mut Vec<BgTag>| {
                let hid = hole_records.len() as u32;
                hole_records.push(HoleRecord {
                    birth: t,
                    alive: true,
                });
                for &p in &bg_comps[ci] {
                    bg_tag[p as usize] = BgTag::Hole(hid);
                }
            };

        // A bounded piece splitting off the outer class is a newborn hole.
        for ci in outer_children {
            if bounded(ci) {
                new_hole(ci, &mut hole_records, &mut bg_tag);
            }
        }
        for hid in 0..children_of_hole.len() {
            if !hole_records[hid].alive {
                debug_assert!(children_of_hole[hid].is_empty());
                continue;
            }
            let children = std::mem::take(&mut children_of_hole[hid]);
            if children.is_empty() {
                // Every pixel of the hole reached the threshold: it fills in.
                bars.push(Bar {
                    birth: hole_records[hid].birth,
                    death: t,
                    dim: 1,
                    essential: false,
                });
                hole_records[hid].alive = false;
                continue;
            }
            debug_assert!(children.iter().all(|&ci| bounded(ci)));
            let survivor = *children
                .iter()
                .min_by(|&&a, &&b| {
                    let ka = min_key(a);
                    let kb = min_key(b);
                    ka.0.partial_cmp(&kb.0)
                        .expect("finite")
                        .then(ka.1.cmp(&kb.1))
                })
                .expect("non-empty");
            for &ci in children.iter().filter(|&&ci| ci != survivor) {
                new_hole(ci, &mut hole_records, &mut bg_tag);
            }
        }
    }

    let global_min = *thresholds.last().expect("non-empty field");
    let essential_id = fg_identity[0].expect("grid is fully active at the minimum");
    debug_assert!(fg_identity.iter().all(|&id| id == Some(essential_id)));
    bars.push(Bar {
        birth: fg_records[essential_id as usize].birth_val,
        death: global_min,
        dim: 0,
        essential: true,
    });
    debug_assert!(hole_records.iter().all(|h| !h.alive));

    Ok(PersistenceDiagram {
        bars,
        direction: Direction::Superlevel,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::persistence::superlevel_diagram;

    #[test]
    fn guards_reject_large_inputs() {
        let wide = ScalarField::from_fn(33, 4, |r, c| (r + c) as f64);
        assert!(matches!(
            brute_force_diagram(&wide),
            Err(Error::OracleGuard(_))
        ));
        let busy = ScalarField::from_fn(32, 32, |r, c| (r * 32 + c) as f64);
        assert!(matches!(
            brute_force_diagram(&busy),
            Err(Error::OracleGuard(_))
        ));
    }

    #[test]
    fn matches_sweep_on_a_ring() {
        let f = ScalarField::from_fn(5, 5, |r, c| {
            let d = r.abs_diff(2).max(c.abs_diff(2));
            match d {
                0 => 0.0,
                1 => 2.0,
                _ => 1.0,
            }
        });
        let brute = brute_force_diagram(&f).unwrap();
        let swept = superlevel_diagram(&f);
        assert_eq!(brute.canonical_bars(), swept.canonical_bars());
    }

    #[test]
    fn matches_sweep_on_plateaus() {
        let f = ScalarField::new(4, 2, vec![3.0, 3.0, 1.0, 3.0, 1.0, 1.0, 3.0, 3.0]).unwrap();
        let brute = brute_force_diagram(&f).unwrap();
        let swept = superlevel_diagram(&f);
        assert_eq!(brute.canonical_bars(), swept.canonical_bars());
    }
}
