//! Per-component geometry along the superlevel sweep.
//!
//! Components carry the same identity rules as the H0 persistence sweep
//! (elder rule, ties to the smaller row-major birth pixel), and additionally
//! accumulate their raw pixel area and boundary length. At every threshold of
//! the sampling grid each live component records one (area, perimeter)
//! sample, so the samples of all live tracks sum exactly to the whole
//! excursion set's raw area and perimeter: components are pairwise disjoint
//! and never share boundary edges.
//!
//! Zero-persistence components (born and absorbed at the same value) are
//! dropped; their lifetime cannot contain a grid threshold, so no sample is
//! lost. The final surviving component closes at the global minimum and is
//! flagged essential. Track bars therefore reproduce the H0 diagram exactly.

use crate::error::Result;
use crate::field::ScalarField;
use crate::persistence::{descending_order, Bar, Direction, PersistenceDiagram};
use crate::scalar::{cast, Real};

/// One component's life along the sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentTrack<F> {
    pub id: usize,
    /// Value at which the component appeared.
    pub birth: F,
    /// Value at which it merged into an older component (or the global
    /// minimum for the essential track).
    pub death: F,
    pub essential: bool,
    /// Track that absorbed this one; `None` for the essential track.
    pub absorbed_into: Option<usize>,
    /// Grid index (into the ascending threshold grid) of the first sample.
    /// Samples run downward from it: sample `j` was taken at grid index
    /// `first_grid - j`.
    pub first_grid: usize,
    pub area: Vec<u64>,
    pub perimeter: Vec<u64>,
}

impl<F: Real> ComponentTrack<F> {
    pub fn persistence(&self) -> F {
        self.birth - self.death
    }

    /// Threshold of sample `j`, given the grid the tracking ran on.
    pub fn sample_threshold(&self, thresholds: &[F], j: usize) -> F {
        thresholds[self.first_grid - j]
    }
}

/// Tracking result: the grid and every positive-persistence track.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentTracking<F> {
    pub thresholds: Vec<F>,
    pub tracks: Vec<ComponentTrack<F>>,
}

impl<F: Real> ComponentTracking<F> {
    /// The tracks' bars as a degree-0 superlevel diagram.
    pub fn diagram(&self) -> PersistenceDiagram<F> {
        PersistenceDiagram {
            bars: self
                .tracks
                .iter()
                .map(|t| Bar {
                    birth: t.birth,
                    death: t.death,
                    dim: 0,
                    essential: t.essential,
                })
                .collect(),
            direction: Direction::Superlevel,
        }
    }

    /// Sum of live-track samples at a grid index, as (area, perimeter).
    pub fn totals_at(&self, grid_index: usize) -> (u64, u64) {
        let mut area = 0u64;
        let mut perimeter = 0u64;
        for t in &self.tracks {
            if grid_index <= t.first_grid {
                let j = t.first_grid - grid_index;
                if j < t.area.len() {
                    area += t.area[j];
                    perimeter += t.perimeter[j];
                }
            }
        }
        (area, perimeter)
    }
}

const NO_TRACK: u32 = u32::MAX;

struct TrackBuild {
    birth_rank: usize,
    root: u32,
    first_grid: Option<usize>,
    area: Vec<u64>,
    perimeter: Vec<u64>,
    closed: Option<TrackClose>,
    discard: bool,
    live_pos: usize,
}

struct TrackClose {
    death_order: usize,
    absorbed_into: Option<u32>,
    essential: bool,
}

/// Follows every component of the superlevel sweep over an `n_thresholds`
/// grid between the field minimum and maximum.
pub fn track_components<F: Real>(
    field: &ScalarField<F>,
    n_thresholds: usize,
) -> Result<ComponentTracking<F>> {
    let (lo, hi) = field.min_max();
    let thresholds = crate::lkc::threshold_grid(lo, hi, n_thresholds)?;
    let n = field.len();
    let order = descending_order(field);
    // Rank of each pixel in the sweep; birth/death values are looked up
    // through it so ties keep exact pixel values.
    let mut rank_of = vec![0u32; n];
    for (rank, &p) in order.iter().enumerate() {
        rank_of[p as usize] = rank as u32;
    }
    let value_of_rank = |rank: usize| field.value_at(order[rank] as usize);

    let mut parent: Vec<u32> = (0..n as u32).collect();
    let mut size: Vec<u32> = vec![1; n];
    // The sweep rank (value descending, index ascending) is exactly the elder
    // order: smaller rank means older.
    let mut birth_rank: Vec<u32> = vec![0; n];
    let mut area: Vec<u64> = vec![0; n];
    let mut perim: Vec<i64> = vec![0; n];
    let mut track_of: Vec<u32> = vec![NO_TRACK; n];
    let mut active = vec![false; n];

    let mut tracks: Vec<TrackBuild> = Vec::new();
    let mut live: Vec<u32> = Vec::new();

    fn find(parent: &mut [u32], mut x: u32) -> u32 {
        while parent[x as usize] != x {
            let grand = parent[parent[x as usize] as usize];
            parent[x as usize] = grand;
            x = grand;
        }
        x
    }

    let mut next = 0usize;
    for k in (0..n_thresholds).rev() {
        let t = thresholds[k];
        while next < order.len() && field.value_at(order[next] as usize) >= t {
            let p = order[next];
            let pi = p as usize;
            next += 1;

            let mut active_side = 0i64;
            for q in field.neighbors4(pi) {
                if active[q] {
                    active_side += 1;
                }
            }

            birth_rank[pi] = rank_of[pi];
            active[pi] = true;

            let mut neighbor_roots: Vec<u32> = Vec::with_capacity(8);
            for q in field.neighbors8(pi) {
                if active[q] && q != pi {
                    let r = find(&mut parent, q as u32);
                    if r != p && !neighbor_roots.contains(&r) {
                        neighbor_roots.push(r);
                    }
                }
            }

            if neighbor_roots.is_empty() {
                // Local maximum: a component is born here.
                let id = tracks.len() as u32;
                track_of[pi] = id;
                tracks.push(TrackBuild {
                    birth_rank: rank_of[pi] as usize,
                    root: p,
                    first_grid: None,
                    area: Vec::new(),
                    perimeter: Vec::new(),
                    closed: None,
                    discard: false,
                    live_pos: live.len(),
                });
                live.push(id);
            } else {
                for r in neighbor_roots {
                    let rp = find(&mut parent, p);
                    let rq = find(&mut parent, r);
                    if rp == rq {
                        continue;
                    }
                    let (rp_u, rq_u) = (rp as usize, rq as usize);
                    let p_is_elder = birth_rank[rp_u] < birth_rank[rq_u];
                    let (elder, victim) = if p_is_elder {
                        (rp_u, rq_u)
                    } else {
                        (rq_u, rp_u)
                    };

                    let victim_track = track_of[victim];
                    if victim_track != NO_TRACK {
                        let elder_track = track_of[elder];
                        debug_assert_ne!(elder_track, NO_TRACK);
                        let tb = &mut tracks[victim_track as usize];
                        if value_of_rank(tb.birth_rank) > field.value_at(pi) {
                            tb.closed = Some(TrackClose {
                                death_order: rank_of[pi] as usize,
                                absorbed_into: Some(elder_track),
                                essential: false,
                            });
                        } else {
                            debug_assert!(tb.area.is_empty());
                            tb.discard = true;
                        }
                        // Remove from the live list by swap.
                        let pos = tb.live_pos;
                        live.swap_remove(pos);
                        if pos < live.len() {
                            let moved = live[pos];
                            tracks[moved as usize].live_pos = pos;
                        }
                    }

                    // Physical union by size; the logical payload follows the
                    // elder.
                    let (big, small) = if size[rp_u] >= size[rq_u] {
                        (rp, rq)
                    } else {
                        (rq, rp)
                    };
                    parent[small as usize] = big;
                    size[big as usize] += size[small as usize];
                    let root = big as usize;
                    let merged_area = area[rp_u] + area[rq_u];
                    let merged_perim = perim[rp_u] + perim[rq_u];
                    birth_rank[root] = birth_rank[elder];
                    area[root] = merged_area;
                    perim[root] = merged_perim;
                    let elder_track = track_of[elder];
                    track_of[root] = elder_track;
                    if elder_track != NO_TRACK {
                        tracks[elder_track as usize].root = big;
                    }
                }
            }

            let root = find(&mut parent, p) as usize;
            area[root] += 1;
            perim[root] += 4 - 2 * active_side;
            debug_assert_ne!(track_of[root], NO_TRACK);
        }

        for &id in &live {
            let tb = &mut tracks[id as usize];
            if tb.first_grid.is_none() {
                tb.first_grid = Some(k);
            }
            tb.area.push(area[tb.root as usize]);
            tb.perimeter.push(perim[tb.root as usize] as u64);
        }
    }

    debug_assert_eq!(live.len(), 1, "the rank-0 grid is connected");
    let essential_id = live[0];
    let global_min_rank = order.len() - 1;
    tracks[essential_id as usize].closed = Some(TrackClose {
        death_order: global_min_rank,
        absorbed_into: None,
        essential: true,
    });

    // Renumber surviving tracks; absorbers always have positive persistence,
    // so the remap never dangles.
    let mut new_id = vec![usize::MAX; tracks.len()];
    let mut kept = 0usize;
    for (i, tb) in tracks.iter().enumerate() {
        if !tb.discard {
            new_id[i] = kept;
            kept += 1;
        }
    }
    let out = tracks
        .iter()
        .filter(|tb| !tb.discard)
        .enumerate()
        .map(|(id, tb)| {
            let closed = tb.closed.as_ref().expect("every kept track closes");
            ComponentTrack {
                id,
                birth: value_of_rank(tb.birth_rank),
                death: value_of_rank(closed.death_order),
                essential: closed.essential,
                absorbed_into: closed.absorbed_into.map(|t| {
                    let mapped = new_id[t as usize];
                    debug_assert_ne!(mapped, usize::MAX);
                    mapped
                }),
                first_grid: tb.first_grid.unwrap_or(0),
                area: tb.area.clone(),
                perimeter: tb.perimeter.clone(),
            }
        })
        .collect();

    Ok(ComponentTracking {
        thresholds,
        tracks: out,
    })
}

/// One row of the track report.
#[derive(Debug, Clone, PartialEq)]
pub struct TrackSummary<F> {
    pub id: usize,
    pub birth: F,
    pub death: F,
    pub persistence: F,
    pub essential: bool,
    pub absorbed_into: Option<usize>,
    pub max_area: u64,
    pub max_perimeter: u64,
    /// Largest sampled area times the bar length; large for components that
    /// are both big and long-lived.
    pub area_persistence: F,
}

/// Summarizes tracks, most persistent first (ties by id).
pub fn component_report<F: Real>(tracking: &ComponentTracking<F>) -> Vec<TrackSummary<F>> {
    let mut rows: Vec<TrackSummary<F>> = tracking
        .tracks
        .iter()
        .map(|t| {
            let max_area = t.area.iter().copied().max().unwrap_or(0);
            let max_perimeter = t.perimeter.iter().copied().max().unwrap_or(0);
            TrackSummary {
                id: t.id,
                birth: t.birth,
                death: t.death,
                persistence: t.persistence(),
                essential: t.essential,
                absorbed_into: t.absorbed_into,
                max_area,
                max_perimeter,
                area_persistence: cast::<F, u64>(max_area) * t.persistence(),
            }
        })
        .collect();
    rows.sort_by(|a, b| {
        b.persistence
            .partial_cmp(&a.persistence)
            .expect("finite")
            .then(a.id.cmp(&b.id))
    });
    rows
}
