use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::angles::{ray_groups, tagged};
use super::{check_finite, smallest_enclosing_circle, sweep, Chirality, Circle, Point, Tolerance};
use crate::error::{usage, Result};

/// `(angle, |O p_i| / ρ, |O p_{i+1}| / ρ)`; distances are relative to the pattern's SEC radius.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Triple {
    pub angle: f64,
    pub first: f64,
    pub second: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PatternSequence {
    pub triples: Vec<Triple>,
    pub direction: Chirality,
    pub start_index: usize,
    /// Pattern indices in traversal order, starting at `start_index`.
    pub order: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct PatternSequences {
    pub all: Vec<PatternSequence>,
    pub minimum: PatternSequence,
    /// Positions in `all` whose sequence equals the minimum within eps.
    pub achieving: Vec<usize>,
}

impl PatternSequences {
    pub fn achieving_sequences(&self) -> impl Iterator<Item = &PatternSequence> {
        self.achieving.iter().map(|&i| &self.all[i])
    }
}

pub(crate) fn compare_triples(a: &Triple, b: &Triple, tol: Tolerance) -> Ordering {
    tol.cmp(a.angle, b.angle)
        .then_with(|| tol.cmp(a.first, b.first))
        .then_with(|| tol.cmp(a.second, b.second))
}

pub(crate) fn compare_sequences(a: &[Triple], b: &[Triple], tol: Tolerance) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        let o = compare_triples(x, y, tol);
        if o != Ordering::Equal {
            return o;
        }
    }
    a.len().cmp(&b.len())
}

/// Every clockwise and counterclockwise pattern sequence and their minimum.
///
/// Points sharing a ray are visited innermost first in both directions. A
/// pattern point at the center belongs to every ray; each placement is
/// enumerated, so such patterns yield more than `2k` sequences.
pub fn pattern_sequences(pattern: &[Point], tol: Tolerance) -> Result<PatternSequences> {
    if pattern.len() < 3 {
        return Err(usage("pattern sequences need at least three points"));
    }
    check_finite(pattern)?;
    let sec = smallest_enclosing_circle(pattern, tol)?;
    let norm: Vec<Point> = pattern.iter().map(|&p| (p - sec.center) * (1.0 / sec.radius)).collect();
    let radius: Vec<f64> = norm.iter().map(|p| p.norm()).collect();
    let groups = ray_groups(&tagged(&norm, None), Point::ORIGIN, tol);
    let center = (0..norm.len()).find(|&i| radius[i] <= tol.eps);

    // Cyclic lists of (pattern index, group index), one per center placement.
    let mut variants: Vec<Vec<Vec<(usize, usize)>>> = Vec::new();
    let slots: Vec<Option<usize>> = match center {
        Some(_) => (0..groups.len()).map(Some).collect(),
        None => vec![None],
    };
    for slot in slots {
        let per_group: Vec<Vec<(usize, usize)>> = groups
            .iter()
            .enumerate()
            .map(|(gi, g)| {
                let mut v = Vec::new();
                if slot == Some(gi) {
                    v.push((center.expect("slot implies center"), gi));
                }
                v.extend(g.members.iter().map(|m| (m.source, gi)));
                v
            })
            .collect();
        variants.push(per_group);
    }

    let mut all = Vec::new();
    for direction in [Chirality::Clockwise, Chirality::Counterclockwise] {
        for per_group in &variants {
            let mut cyclic: Vec<(usize, usize)> = Vec::new();
            let group_order: Vec<usize> = match direction {
                Chirality::Counterclockwise => (0..groups.len()).collect(),
                Chirality::Clockwise => (0..groups.len()).rev().collect(),
            };
            for gi in group_order {
                cyclic.extend(per_group[gi].iter().copied());
            }
            let k = cyclic.len();
            for s in 0..k {
                let order: Vec<(usize, usize)> = (0..k).map(|m| cyclic[(s + m) % k]).collect();
                let triples = (0..k)
                    .map(|m| {
                        let (a, ga) = order[m];
                        let (b, gb) = order[(m + 1) % k];
                        let angle = if ga == gb {
                            0.0
                        } else {
                            sweep(groups[ga].angle, groups[gb].angle, direction)
                        };
                        Triple { angle, first: radius[a], second: radius[b] }
                    })
                    .collect();
                all.push(PatternSequence {
                    triples,
                    direction,
                    start_index: order[0].0,
                    order: order.iter().map(|x| x.0).collect(),
                });
            }
        }
    }

    let mut best = 0;
    for i in 1..all.len() {
        if compare_sequences(&all[i].triples, &all[best].triples, tol) == Ordering::Less {
            best = i;
        }
    }
    let minimum = all[best].clone();
    let achieving = (0..all.len())
        .filter(|&i| compare_sequences(&all[i].triples, &minimum.triples, tol) == Ordering::Equal)
        .collect();
    Ok(PatternSequences { all, minimum, achieving })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircularDecomposition {
    /// Concentric circles, largest first.
    pub circles: Vec<Circle>,
    /// Circle index of every input point.
    pub assignment: Vec<usize>,
}

impl CircularDecomposition {
    pub fn sigma(&self) -> usize {
        self.circles.len()
    }
}

/// Concentric circles about the pattern's SEC center carrying the pattern points.
pub fn circular_decomposition(pattern: &[Point], tol: Tolerance) -> Result<CircularDecomposition> {
    let sec = smallest_enclosing_circle(pattern, tol)?;
    Ok(decompose_about(pattern, &sec, tol))
}

pub(crate) fn decompose_about(pattern: &[Point], sec: &Circle, tol: Tolerance) -> CircularDecomposition {
    let scale = if sec.radius > 0.0 { sec.radius } else { 1.0 };
    let dist: Vec<f64> = pattern.iter().map(|p| p.dist(sec.center)).collect();
    let mut idx: Vec<usize> = (0..pattern.len()).collect();
    idx.sort_by(|&a, &b| dist[b].total_cmp(&dist[a]));
    let mut circles: Vec<Circle> = Vec::new();
    let mut assignment = vec![0; pattern.len()];
    for i in idx {
        let fits = circles
            .last()
            .is_some_and(|c| (c.radius - dist[i]) / scale <= tol.eps);
        if !fits {
            let r = if circles.is_empty() { sec.radius } else { dist[i] };
            circles.push(Circle::new(sec.center, r));
        }
        assignment[i] = circles.len() - 1;
    }
    CircularDecomposition { circles, assignment }
}
