//! Cubical persistent homology of 2-D scalar fields.
//!
//! Images are read as cubical sets under the T-construction: each pixel is a
//! top-dimensional cell and every lower cell takes the minimum over its
//! incident pixels. For a superlevel sweep this makes foreground components
//! 8-connected and background components 4-connected, so both homology
//! degrees reduce to union-find passes over the pixels:
//!
//! * H0: add pixels from the maximum down; a component is born at its highest
//!   pixel and dies when it merges into an older component.
//! * H1: holes are bounded components of the 4-connected complement. Running
//!   the complement sweep upward (with a virtual node for everything beyond
//!   the image border) turns each hole into a union-find class whose merge
//!   events are exactly the hole births and deaths.
//!
//! The elder rule breaks merge ties deterministically: the component with the
//! higher birth value survives, and on equal birth values the one whose birth
//! pixel has the smaller row-major index.

mod brute;

pub use brute::brute_force_diagram;

use serde::{Deserialize, Serialize};

use crate::field::ScalarField;
use crate::scalar::Real;

/// Sweep direction of a filtration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    /// Excursion sets `{f >= t}`, swept from the maximum down.
    Superlevel,
    /// Sublevel sets `{f <= t}`; equivalent to a superlevel sweep of `-f`.
    Sublevel,
}

/// A field together with a normalized sweep orientation.
///
/// The stored field is already negated for sublevel filtrations, so every
/// algorithm in this module only ever runs the superlevel sweep.
#[derive(Debug, Clone)]
pub struct Filtration<F> {
    oriented: ScalarField<F>,
    direction: Direction,
}

/// Orients `field` for the requested sweep direction.
pub fn build_filtration<F: Real>(field: &ScalarField<F>, direction: Direction) -> Filtration<F> {
    let oriented = match direction {
        Direction::Superlevel => field.clone(),
        Direction::Sublevel => field.map(|v| -v),
    };
    Filtration {
        oriented,
        direction,
    }
}

impl<F: Real> Filtration<F> {
    pub fn direction(&self) -> Direction {
        self.direction
    }

    /// The field as swept: negated when the caller asked for sublevel.
    pub fn oriented_field(&self) -> &ScalarField<F> {
        &self.oriented
    }

    /// Cell value on the cubical grid of the oriented field.
    ///
    /// The grid is `(2*height + 1) x (2*width + 1)`: pixel `(r, c)` is the
    /// square cell `(2r + 1, 2c + 1)` and every vertex/edge takes the minimum
    /// over the pixels it touches.
    pub fn cell_value(&self, cell_row: usize, cell_col: usize) -> F {
        let h = self.oriented.height();
        let w = self.oriented.width();
        assert!(
            cell_row < 2 * h + 1 && cell_col < 2 * w + 1,
            "cell out of range"
        );
        let rows = incident_pixel_range(cell_row, h);
        let cols = incident_pixel_range(cell_col, w);
        let mut best: Option<F> = None;
        for r in rows.clone() {
            for c in cols.clone() {
                let v = self.oriented.value(r, c);
                best = Some(match best {
                    Some(b) if b <= v => b,
                    _ => v,
                });
            }
        }
        best.expect("every cell touches at least one pixel")
    }
}

fn incident_pixel_range(cell_coord: usize, pixels: usize) -> std::ops::Range<usize> {
    if cell_coord % 2 == 1 {
        let p = (cell_coord - 1) / 2;
        p..p + 1
    } else {
        let lo = (cell_coord / 2).saturating_sub(1);
        let hi = (cell_coord / 2).min(pixels - 1);
        lo..hi + 1
    }
}

/// One persistence interval.
///
/// For superlevel diagrams `birth >= death`; the single essential component
/// of each field is kept with its death capped at the global minimum and
/// flagged so it is never mistaken for an ordinary finite bar.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bar<F> {
    pub birth: F,
    pub death: F,
    pub dim: u8,
    pub essential: bool,
}

impl<F: Real> Bar<F> {
    pub fn persistence(&self) -> F {
        (self.birth - self.death).abs()
    }
}

/// All bars of one filtration.
#[derive(Debug, Clone, PartialEq)]
pub struct PersistenceDiagram<F> {
    pub bars: Vec<Bar<F>>,
    pub direction: Direction,
}

impl<F: Real> PersistenceDiagram<F> {
    /// Bars of one homology degree, as a new diagram.
    pub fn only_dim(&self, dim: u8) -> Self {
        Self {
            bars: self.bars.iter().copied().filter(|b| b.dim == dim).collect(),
            direction: self.direction,
        }
    }

    /// Bars sorted by (dim, birth, death, essential); useful for multiset
    /// comparison between independent implementations.
    pub fn canonical_bars(&self) -> Vec<Bar<F>> {
        let mut bars = self.bars.clone();
        bars.sort_by(|a, b| {
            a.dim
                .cmp(&b.dim)
                .then(a.birth.partial_cmp(&b.birth).expect("finite"))
                .then(a.death.partial_cmp(&b.death).expect("finite"))
                .then(a.essential.cmp(&b.essential))
        });
        bars
    }
}

/// Betti numbers `(beta_0, beta_1)` of the filtration at parameter `t`.
///
/// A finite superlevel bar `(b, d]` counts while `b >= t > d`; the essential
/// component counts whenever `b >= t`. Sublevel diagrams mirror the
/// comparisons.
pub fn betti_at<F: Real>(diagram: &PersistenceDiagram<F>, t: F) -> (usize, usize) {
    let mut beta = [0usize; 2];
    for bar in &diagram.bars {
        let alive = match diagram.direction {
            Direction::Superlevel => bar.birth >= t && (bar.essential || t > bar.death),
            Direction::Sublevel => bar.birth <= t && (bar.essential || t < bar.death),
        };
        if alive {
            beta[bar.dim as usize] += 1;
        }
    }
    (beta[0], beta[1])
}

/// Betti numbers sampled over a threshold grid.
#[derive(Debug, Clone, PartialEq)]
pub struct BettiProfile<F> {
    pub thresholds: Vec<F>,
    pub beta0: Vec<usize>,
    pub beta1: Vec<usize>,
}

pub fn betti_profile<F: Real>(
    diagram: &PersistenceDiagram<F>,
    thresholds: &[F],
) -> BettiProfile<F> {
    let mut beta0 = Vec::with_capacity(thresholds.len());
    let mut beta1 = Vec::with_capacity(thresholds.len());
    for &t in thresholds {
        let (b0, b1) = betti_at(diagram, t);
        beta0.push(b0);
        beta1.push(b1);
    }
    BettiProfile {
        thresholds: thresholds.to_vec(),
        beta0,
        beta1,
    }
}

/// Union-find over pixel indices with union by size and path halving.
struct DisjointSet {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl DisjointSet {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n as u32).collect(),
            size: vec![1; n],
        }
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let grand = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = grand;
            x = grand;
        }
        x
    }

    /// Unions two distinct roots and returns the new physical root.
    fn union_roots(&mut self, a: u32, b: u32) -> u32 {
        debug_assert_ne!(a, b);
        let (big, small) = if self.size[a as usize] >= self.size[b as usize] {
            (a, b)
        } else {
            (b, a)
        };
        self.parent[small as usize] = big;
        self.size[big as usize] += self.size[small as usize];
        big
    }
}

/// Persistent homology of the filtration in degrees 0 and 1.
///
/// Zero-persistence bars are dropped. Bar values are copies of pixel values,
/// never arithmetic on them, so diagrams from independent implementations
/// can be compared exactly.
pub fn compute_persistence<F: Real>(filtration: &Filtration<F>) -> PersistenceDiagram<F> {
    let field = &filtration.oriented;
    let mut bars = h0_bars(field);
    bars.extend(h1_bars(field));
    if filtration.direction == Direction::Sublevel {
        for bar in &mut bars {
            bar.birth = -bar.birth;
            bar.death = -bar.death;
        }
    }
    PersistenceDiagram {
        bars,
        direction: filtration.direction,
    }
}

/// Superlevel diagram of a field; shorthand used throughout the crate.
pub fn superlevel_diagram<F: Real>(field: &ScalarField<F>) -> PersistenceDiagram<F> {
    compute_persistence(&build_filtration(field, Direction::Superlevel))
}

/// Pixel order for the descending (foreground) sweep: value descending,
/// row-major index ascending on ties.
pub(crate) fn descending_order<F: Real>(field: &ScalarField<F>) -> Vec<u32> {
    let mut order: Vec<u32> = (0..field.len() as u32).collect();
    order.sort_unstable_by(|&a, &b| {
        field
            .value_at(b as usize)
            .partial_cmp(&field.value_at(a as usize))
            .expect("finite")
            .then(a.cmp(&b))
    });
    order
}

fn h0_bars<F: Real>(field: &ScalarField<F>) -> Vec<Bar<F>> {
    let n = field.len();
    let order = descending_order(field);
    let mut ds = DisjointSet::new(n);
    let mut birth_val: Vec<F> = vec![F::zero(); n];
    let mut birth_idx: Vec<u32> = vec![0; n];
    let mut active = vec![false; n];
    let mut bars = Vec::new();

    for &p in &order {
        let pi = p as usize;
        let v = field.value_at(pi);
        birth_val[pi] = v;
        birth_idx[pi] = p;
        active[pi] = true;
        for q in field.neighbors8(pi) {
            if !active[q] {
                continue;
            }
            let rp = ds.find(p);
            let rq = ds.find(q as u32);
            if rp == rq {
                continue;
            }
            let (rp_u, rq_u) = (rp as usize, rq as usize);
            let p_is_elder = birth_val[rp_u] > birth_val[rq_u]
                || (birth_val[rp_u] == birth_val[rq_u] && birth_idx[rp_u] < birth_idx[rq_u]);
            let (elder, victim) = if p_is_elder {
                (rp_u, rq_u)
            } else {
                (rq_u, rp_u)
            };
            if birth_val[victim] > v {
                bars.push(Bar {
                    birth: birth_val[victim],
                    death: v,
                    dim: 0,
                    essential: false,
                });
            }
            let root = ds.union_roots(rp, rq) as usize;
            birth_val[root] = birth_val[elder];
            birth_idx[root] = birth_idx[elder];
        }
    }

    let global_min = field.value_at(*order.last().expect("non-empty") as usize);
    let root = ds.find(0) as usize;
    bars.push(Bar {
        birth: birth_val[root],
        death: global_min,
        dim: 0,
        essential: true,
    });
    bars
}

fn h1_bars<F: Real>(field: &ScalarField<F>) -> Vec<Bar<F>> {
    let n = field.len();
    let h = field.height();
    let w = field.width();
    let border = n as u32;

    let mut order: Vec<u32> = (0..n as u32).collect();
    order.sort_unstable_by(|&a, &b| {
        field
            .value_at(a as usize)
            .partial_cmp(&field.value_at(b as usize))
            .expect("finite")
            .then(a.cmp(&b))
    });

    let mut ds = DisjointSet::new(n + 1);
    let mut birth_val: Vec<F> = vec![F::zero(); n + 1];
    let mut birth_idx: Vec<u32> = vec![0; n + 1];
    // The class containing the virtual border node is eldest by fiat: the
    // unbounded complement exists at every threshold and never dies.
    let mut holds_border: Vec<bool> = vec![false; n + 1];
    holds_border[n] = true;
    let mut active = vec![false; n + 1];
    active[n] = true;
    let mut bars = Vec::new();

    for &p in &order {
        let pi = p as usize;
        let v = field.value_at(pi);
        birth_val[pi] = v;
        birth_idx[pi] = p;
        active[pi] = true;

        let (row, col) = field.row_col(pi);
        let mut links: Vec<u32> = field
            .neighbors4(pi)
            .filter(|&q| active[q])
            .map(|q| q as u32)
            .collect();
        if row == 0 || row + 1 == h || col == 0 || col + 1 == w {
            links.push(border);
        }

        for q in links {
            let rp = ds.find(p);
            let rq = ds.find(q);
            if rp == rq {
                continue;
            }
            let (rp_u, rq_u) = (rp as usize, rq as usize);
            let p_is_elder = if holds_border[rp_u] {
                true
            } else if holds_border[rq_u] {
                false
            } else {
                birth_val[rp_u] < birth_val[rq_u]
                    || (birth_val[rp_u] == birth_val[rq_u] && birth_idx[rp_u] < birth_idx[rq_u])
            };
            let (elder, victim) = if p_is_elder {
                (rp_u, rq_u)
            } else {
                (rq_u, rp_u)
            };
            debug_assert!(!holds_border[victim]);
            if birth_val[victim] < v {
                bars.push(Bar {
                    birth: v,
                    death: birth_val[victim],
                    dim: 1,
                    essential: false,
                });
            }
            let root = ds.union_roots(rp, rq) as usize;
            birth_val[root] = birth_val[elder];
            birth_idx[root] = birth_idx[elder];
            holds_border[root] = holds_border[elder] || holds_border[victim];
        }
    }
    bars
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diagram(values: Vec<f64>, w: usize, h: usize) -> PersistenceDiagram<f64> {
        superlevel_diagram(&ScalarField::new(w, h, values).unwrap())
    }

    #[test]
    fn single_pixel_has_one_essential_bar() {
        let d = diagram(vec![3.0], 1, 1);
        assert_eq!(d.bars.len(), 1);
        let bar = d.bars[0];
        assert_eq!(
            (bar.birth, bar.death, bar.dim, bar.essential),
            (3.0, 3.0, 0, true)
        );
        assert_eq!(betti_at(&d, 3.0), (1, 0));
        assert_eq!(betti_at(&d, 3.5), (0, 0));
    }

    #[test]
    fn two_peaks_merge_by_elder_rule() {
        // 5, 1, 4 in a row: peak 4 is born at 4 and merges into the elder
        // peak 5 when the bridge value 1 activates.
        let d = diagram(vec![5.0, 1.0, 4.0], 3, 1);
        let finite: Vec<_> = d.bars.iter().filter(|b| !b.essential).collect();
        assert_eq!(finite.len(), 1);
        assert_eq!(
            (finite[0].birth, finite[0].death, finite[0].dim),
            (4.0, 1.0, 0)
        );
        let essential: Vec<_> = d.bars.iter().filter(|b| b.essential).collect();
        assert_eq!((essential[0].birth, essential[0].death), (5.0, 1.0));
        assert_eq!(betti_at(&d, 4.0), (2, 0));
        assert_eq!(betti_at(&d, 1.0), (1, 0));
    }

    #[test]
    fn equal_births_resolve_by_pixel_index() {
        // Two pixels of value 2 separated by a 1: the left one (smaller
        // row-major index) is the elder, so the finite bar is born at 2 and
        // the essential bar's birth pixel is index 0.
        let d = diagram(vec![2.0, 1.0, 2.0], 3, 1);
        let finite: Vec<_> = d.bars.iter().filter(|b| !b.essential).collect();
        assert_eq!(finite.len(), 1);
        assert_eq!((finite[0].birth, finite[0].death), (2.0, 1.0));
    }

    #[test]
    fn plateau_produces_no_zero_persistence_bars() {
        let d = diagram(vec![7.0; 12], 4, 3);
        assert_eq!(d.bars.len(), 1);
        assert!(d.bars[0].essential);
        assert_eq!((d.bars[0].birth, d.bars[0].death), (7.0, 7.0));
    }

    #[test]
    fn ring_opens_one_hole() {
        // 5x5: outer border 1, a 3x3 ring of 2 around the center, center 0.
        let f = ScalarField::from_fn(5, 5, |r, c| {
            let dr = r.abs_diff(2);
            let dc = c.abs_diff(2);
            match dr.max(dc) {
                0 => 0.0,
                1 => 2.0,
                _ => 1.0,
            }
        });
        let d = superlevel_diagram(&f);
        let h1: Vec<_> = d.bars.iter().filter(|b| b.dim == 1).collect();
        assert_eq!(h1.len(), 1);
        assert_eq!((h1[0].birth, h1[0].death), (2.0, 0.0));
        assert_eq!(betti_at(&d, 2.0), (1, 1));
        assert_eq!(betti_at(&d, 1.0), (1, 1));
        assert_eq!(betti_at(&d, 0.0), (1, 0));
    }

    #[test]
    fn diagonal_foreground_does_not_open_a_hole() {
        // A diagonal pair of bright pixels is 8-connected foreground, and the
        // complement stays 4-connected to the border: no H1 bar.
        let d = diagram(vec![2.0, 1.0, 1.0, 2.0], 2, 2);
        assert!(d.bars.iter().all(|b| b.dim == 0));
        assert_eq!(betti_at(&d, 2.0), (1, 0));
    }

    #[test]
    fn sublevel_is_superlevel_of_negation() {
        let f = ScalarField::from_fn(6, 6, |r, c| ((r * 5 + c * 3) % 7) as f64);
        let sub = compute_persistence(&build_filtration(&f, Direction::Sublevel));
        let neg = superlevel_diagram(&f.map(|v| -v));
        // Negation reverses the canonical order, so sort both multisets the
        // same way before comparing.
        let sort = |mut bars: Vec<(u8, f64, f64, bool)>| {
            bars.sort_by(|a, b| {
                a.0.cmp(&b.0)
                    .then(a.1.total_cmp(&b.1))
                    .then(a.2.total_cmp(&b.2))
            });
            bars
        };
        let mapped = sort(
            neg.canonical_bars()
                .iter()
                .map(|b| (b.dim, -b.birth, -b.death, b.essential))
                .collect(),
        );
        let got = sort(
            sub.canonical_bars()
                .iter()
                .map(|b| (b.dim, b.birth, b.death, b.essential))
                .collect(),
        );
        assert_eq!(got, mapped);
    }

    #[test]
    fn cell_values_take_the_minimum_over_incident_pixels() {
        let f = ScalarField::new(2, 2, vec![4.0, 7.0, 2.0, 9.0]).unwrap();
        let filt = build_filtration(&f, Direction::Superlevel);
        // Top cells keep their pixel value.
        assert_eq!(filt.cell_value(1, 1), 4.0);
        assert_eq!(filt.cell_value(3, 3), 9.0);
        // The central vertex touches all four pixels.
        assert_eq!(filt.cell_value(2, 2), 2.0);
        // The edge between the top two pixels.
        assert_eq!(filt.cell_value(1, 2), 4.0);
        // A corner vertex touches one pixel.
        assert_eq!(filt.cell_value(0, 0), 4.0);
    }

    #[test]
    fn betti_profile_matches_pointwise_queries() {
        let f = ScalarField::from_fn(8, 8, |r, c| ((r * 13 + c * 7) % 5) as f64);
        let d = superlevel_diagram(&f);
        let ts = vec![-1.0, 0.0, 1.5, 2.0, 4.0, 5.0];
        let profile = betti_profile(&d, &ts);
        for (i, &t) in ts.iter().enumerate() {
            assert_eq!((profile.beta0[i], profile.beta1[i]), betti_at(&d, t));
        }
        assert!(profile.beta0.iter().take(5).all(|&b| b >= 1));
    }
}
