//! Anisotropic Carleson-type boxes `Q_delta(a)` and the greedy covering
//! of the shell `Omega_r`, with distortion bounds and bounded-overlap
//! diagnostics as executable checks.
//!
//! `Q_delta(a) = { z : |P_a(z) - a| < delta, |P_a_perp(z)| < sqrt(delta) }`
//! where `P_a` projects onto the complex line through `a`. A box is the
//! product of a disk along the line and a ball transversally, hence
//! convex with a closed-form metric projection — which makes pairwise
//! intersection decidable by alternating projections.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{CoreError, Result};
use crate::scalar::C64;

pub type Point = Vec<C64>;

pub fn norm(z: &[C64]) -> f64 {
    z.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

/// Hermitian inner product `<x, y> = sum x_i conj(y_i)`.
pub fn inner(x: &[C64], y: &[C64]) -> C64 {
    x.iter().zip(y).map(|(a, b)| a * b.conj()).sum()
}

fn axpy(y: &mut [C64], scale: C64, x: &[C64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += scale * xi;
    }
}

fn dist(x: &[C64], y: &[C64]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(a, b)| (a - b).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Anisotropic neighborhood of a nonzero center.
#[derive(Clone, Debug)]
pub struct CarlesonBox {
    pub center: Point,
    pub delta: f64,
}

impl CarlesonBox {
    pub fn new(center: Point, delta: f64) -> Result<Self> {
        if norm(&center) == 0.0 {
            return Err(CoreError::invalid("center", "box center must be nonzero"));
        }
        if !(delta > 0.0) {
            return Err(CoreError::invalid("delta", "box scale must be positive"));
        }
        Ok(CarlesonBox { center, delta })
    }

    pub fn scaled(&self, factor: f64) -> CarlesonBox {
        CarlesonBox {
            center: self.center.clone(),
            delta: self.delta * factor,
        }
    }

    /// Split `z` into the component along the center line and the rest:
    /// returns `(u, perp)` with `P_a(z) = u * a`.
    fn decompose(&self, z: &[C64]) -> (C64, Point) {
        let a = &self.center;
        let u = inner(z, a) / inner(a, a);
        let mut perp = z.to_vec();
        axpy(&mut perp, -u, a);
        (u, perp)
    }

    /// Exact evaluation of the two membership inequalities.
    pub fn contains(&self, z: &[C64]) -> bool {
        let a = &self.center;
        let (u, perp) = self.decompose(z);
        let along = (u - C64::new(1.0, 0.0)).norm() * norm(a);
        along < self.delta && norm(&perp) < self.delta.sqrt()
    }

    /// Metric projection onto the closed box: clamp the along-disk and
    /// the transversal ball independently.
    pub fn project(&self, z: &[C64]) -> Point {
        let a = &self.center;
        let a_norm = norm(a);
        let (u, mut perp) = self.decompose(z);
        let shift = u - C64::new(1.0, 0.0);
        let along_dist = shift.norm() * a_norm;
        let u_clamped = if along_dist > self.delta {
            C64::new(1.0, 0.0) + shift * (self.delta / along_dist)
        } else {
            u
        };
        let perp_norm = norm(&perp);
        let perp_cap = self.delta.sqrt();
        if perp_norm > perp_cap {
            let scale = perp_cap / perp_norm;
            for v in perp.iter_mut() {
                *v *= scale;
            }
        }
        let mut out = perp;
        axpy(&mut out, u_clamped, a);
        out
    }

    /// Radius of a ball around the center guaranteed to contain the box.
    pub fn bounding_radius(&self) -> f64 {
        (self.delta * self.delta + self.delta).sqrt()
    }

    /// Draw a point of the box. With `boundary_bias` the radial factors
    /// concentrate near the boundary, which is where containment checks
    /// can fail first.
    pub fn sample(&self, rng: &mut ChaCha8Rng, boundary_bias: bool) -> Point {
        let a = &self.center;
        let n = a.len();
        let a_norm = norm(a);
        let radial = |rng: &mut ChaCha8Rng, dims: u32| -> f64 {
            let u: f64 = rng.gen_range(0.0f64..1.0);
            if boundary_bias {
                // concentrate near 1 while keeping full support
                1.0 - 0.02 * u
            } else {
                u.powf(1.0 / dims as f64)
            }
        };
        // along-disk component
        let theta = rng.gen_range(0.0..std::f64::consts::TAU);
        let rho = self.delta * radial(rng, 2) * 0.999_999;
        let zeta = C64::from_polar(rho / a_norm, theta);
        let mut out = a.clone();
        axpy(&mut out, zeta, a);
        // transversal component
        if n > 1 {
            let mut g: Point = (0..n)
                .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let u = inner(&g, a) / inner(a, a);
            axpy(&mut g, -u, a);
            let g_norm = norm(&g);
            if g_norm > 0.0 {
                let target = self.delta.sqrt() * radial(rng, 2 * (n as u32 - 1)) * 0.999_999;
                let scale = target / g_norm;
                for v in g.iter_mut() {
                    *v *= scale;
                }
                for (o, gi) in out.iter_mut().zip(&g) {
                    *o += gi;
                }
            }
        }
        out
    }
}

/// Decision of the convex intersection test.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct IntersectDecision {
    pub intersects: bool,
    /// False when the iteration cap was hit before the gap resolved; the
    /// answer is then the conservative `intersects = true`.
    pub decided: bool,
}

pub const INTERSECT_TOL: f64 = 1e-10;
pub const INTERSECT_CAP: usize = 500;

/// Alternating projections between the two convex boxes. The iterates
/// converge to a pair realizing the minimal gap; a gap below `tol` means
/// the (open) boxes are taken to intersect.
pub fn boxes_intersect(b1: &CarlesonBox, b2: &CarlesonBox, tol: f64) -> IntersectDecision {
    // cheap reject via bounding balls
    let center_gap = dist(&b1.center, &b2.center);
    if center_gap > b1.bounding_radius() + b2.bounding_radius() + tol {
        return IntersectDecision {
            intersects: false,
            decided: true,
        };
    }
    let mut x: Point = b1
        .center
        .iter()
        .zip(&b2.center)
        .map(|(a, b)| (a + b) / 2.0)
        .collect();
    let mut prev_gap = f64::INFINITY;
    for _ in 0..INTERSECT_CAP {
        let y = b2.project(&x);
        let x_next = b1.project(&y);
        let gap = dist(&x_next, &y);
        if gap < tol {
            return IntersectDecision {
                intersects: true,
                decided: true,
            };
        }
        if prev_gap - gap < 1e-16 * gap.max(1.0) {
            // stalled at a positive gap: the closed sets are separated
            return IntersectDecision {
                intersects: false,
                decided: true,
            };
        }
        prev_gap = gap;
        x = x_next;
    }
    IntersectDecision {
        intersects: true,
        decided: false,
    }
}

/// Configuration of the shell covering: `delta(z) = c (1 - |z|)` on
/// `Omega_r`, greedy selection at the `shrink` scale, coverage at scale 1
/// and overlap statistics at the `dilate` scale.
#[derive(Clone, Debug, Serialize)]
pub struct CoverConfig {
    pub r: f64,
    pub c: f64,
    pub shrink: f64,
    pub dilate: f64,
    /// Mutual-containment constant of the box distortion bounds.
    pub containment: f64,
}

impl CoverConfig {
    pub fn new(r: f64, c: f64) -> Result<Self> {
        if !(0.25 < r && r < 1.0) {
            return Err(CoreError::invalid("r", "shell radius must lie in (1/4, 1)"));
        }
        let cap = ((r - 0.25) / 4.0).min(0.1);
        if !(0.0 < c && c < cap) {
            return Err(CoreError::invalid(
                "c",
                format!("box scale must lie in (0, {cap})"),
            ));
        }
        Ok(CoverConfig {
            r,
            c,
            shrink: 1.0 / (200.0 * 200.0),
            dilate: 200.0 * 200.0,
            containment: 200.0,
        })
    }

    pub fn delta(&self, z: &[C64]) -> f64 {
        self.c * (1.0 - norm(z))
    }

    pub fn box_at(&self, z: &[C64], scale: f64) -> Result<CarlesonBox> {
        CarlesonBox::new(z.to_vec(), self.delta(z) * scale)
    }
}

/// Uniform samples of `Omega_r` (Lebesgue), by rejection from the cube.
pub fn sample_shell(n: usize, r: f64, count: usize, seed: u64) -> Vec<Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let z: Point = (0..n)
            .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let nz = norm(&z);
        if nz > r && nz < 1.0 {
            out.push(z);
        }
    }
    out
}

/// Grid over flattened `R^{2n}` coordinates for near-neighbor queries.
struct PointGrid {
    cell: f64,
    map: HashMap<Vec<i32>, Vec<usize>>,
    points: Vec<Vec<f64>>,
}

fn flatten(z: &[C64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(2 * z.len());
    for v in z {
        out.push(v.re);
        out.push(v.im);
    }
    out
}

impl PointGrid {
    fn build(points: &[Point], cell: f64) -> Self {
        let mut grid = PointGrid {
            cell: cell.max(1e-12),
            map: HashMap::new(),
            points: points.iter().map(|p| flatten(p)).collect(),
        };
        for idx in 0..grid.points.len() {
            let key = grid.key(&grid.points[idx]);
            grid.map.entry(key).or_default().push(idx);
        }
        grid
    }

    fn key(&self, flat: &[f64]) -> Vec<i32> {
        flat.iter().map(|&x| (x / self.cell).floor() as i32).collect()
    }

    /// Indices within `radius` of `flat` (by cell walk).
    fn neighbors(&self, flat: &[f64], radius: f64) -> Vec<usize> {
        let reach = (radius / self.cell).ceil() as i32;
        let base = self.key(flat);
        let dims = base.len();
        let mut out = Vec::new();
        let mut offsets = vec![-reach; dims];
        loop {
            let key: Vec<i32> = base.iter().zip(&offsets).map(|(b, o)| b + o).collect();
            if let Some(bucket) = self.map.get(&key) {
                for &idx in bucket {
                    let d2: f64 = self.points[idx]
                        .iter()
                        .zip(flat)
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum();
                    if d2 <= radius * radius {
                        out.push(idx);
                    }
                }
            }
            // advance the offset counter
            let mut pos = 0;
            loop {
                if pos == dims {
                    return out;
                }
                offsets[pos] += 1;
                if offsets[pos] <= reach {
                    break;
                }
                offsets[pos] = -reach;
                pos += 1;
            }
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SelectedCenter {
    pub sample_index: usize,
    pub delta: f64,
    pub order: usize,
}

#[derive(Debug, Serialize)]
pub struct CoverResult {
    pub selected: Vec<SelectedCenter>,
    /// For each input sample, the position in `selected` of the box that
    /// kept or absorbed it.
    pub assignment: Vec<usize>,
    /// Samples not contained in any selected full-scale box.
    pub uncovered: Vec<usize>,
    /// Pairs of selected shrunk boxes that still intersect (should be empty).
    pub disjointness_violations: Vec<(usize, usize)>,
    /// Intersection tests that hit the iteration cap.
    pub undecided_tests: usize,
}

/// Greedy shell cover: repeatedly select the remaining sample with the
/// largest shrunk radius and discard every sample whose shrunk box meets
/// the selected one. Checks afterwards that the selected shrunk boxes are
/// pairwise disjoint and that every sample lies in a selected full box.
pub fn greedy_cover(samples: &[Point], config: &CoverConfig) -> Result<CoverResult> {
    if samples.is_empty() {
        return Err(CoreError::invalid("samples", "need at least one sample"));
    }
    for (i, z) in samples.iter().enumerate() {
        let nz = norm(z);
        if !(nz > config.r && nz < 1.0) {
            return Err(CoreError::invalid(
                "samples",
                format!("sample {i} lies outside the shell"),
            ));
        }
    }
    let shrunk: Vec<CarlesonBox> = samples
        .iter()
        .map(|z| config.box_at(z, config.shrink))
        .collect::<Result<_>>()?;
    let bounding: Vec<f64> = shrunk.iter().map(|b| b.bounding_radius()).collect();
    let max_bound = bounding.iter().cloned().fold(0.0f64, f64::max);
    let grid = PointGrid::build(samples, (2.0 * max_bound).max(1e-9));

    // radius-descending order; ties by index for determinism
    let mut order: Vec<usize> = (0..samples.len()).collect();
    order.sort_by(|&a, &b| shrunk[b].delta.total_cmp(&shrunk[a].delta).then(a.cmp(&b)));

    let mut owner: Vec<Option<usize>> = vec![None; samples.len()];
    let mut selected: Vec<SelectedCenter> = Vec::new();
    let mut selected_of_sample: HashMap<usize, usize> = HashMap::new();
    let mut undecided = 0usize;
    for &idx in &order {
        if owner[idx].is_some() {
            continue;
        }
        let slot = selected.len();
        owner[idx] = Some(idx);
        selected_of_sample.insert(idx, slot);
        selected.push(SelectedCenter {
            sample_index: idx,
            delta: config.delta(&samples[idx]),
            order: slot,
        });
        let flat = flatten(&samples[idx]);
        for j in grid.neighbors(&flat, bounding[idx] + max_bound) {
            if j == idx || owner[j].is_some() {
                continue;
            }
            let dec = boxes_intersect(&shrunk[idx], &shrunk[j], INTERSECT_TOL);
            if !dec.decided {
                undecided += 1;
            }
            if dec.intersects {
                owner[j] = Some(idx);
            }
        }
    }

    // coverage at full scale: the owner's box must contain the sample
    let full_boxes: HashMap<usize, CarlesonBox> = selected
        .iter()
        .map(|s| {
            (
                s.sample_index,
                config.box_at(&samples[s.sample_index], 1.0).unwrap(),
            )
        })
        .collect();
    let mut assignment = vec![usize::MAX; samples.len()];
    let mut uncovered = Vec::new();
    for (i, z) in samples.iter().enumerate() {
        let own = owner[i].expect("every sample processed");
        if full_boxes[&own].contains(z) {
            assignment[i] = selected_of_sample[&own];
        } else {
            // fall back to any selected box covering the sample
            let found = selected
                .iter()
                .find(|s| full_boxes[&s.sample_index].contains(z));
            match found {
                Some(s) => assignment[i] = s.order,
                None => uncovered.push(i),
            }
        }
    }

    // pairwise disjointness of the selected shrunk boxes
    let mut violations = Vec::new();
    for s in &selected {
        let i = s.sample_index;
        let flat = flatten(&samples[i]);
        for j in grid.neighbors(&flat, bounding[i] + max_bound) {
            if j <= i || !selected_of_sample.contains_key(&j) {
                continue;
            }
            let dec = boxes_intersect(&shrunk[i], &shrunk[j], INTERSECT_TOL);
            if dec.intersects {
                violations.push((selected_of_sample[&i], selected_of_sample[&j]));
            }
        }
    }

    Ok(CoverResult {
        selected,
        assignment,
        uncovered,
        disjointness_violations: violations,
        undecided_tests: undecided,
    })
}

/// Count for each probe how many dilated boxes contain it.
#[derive(Debug, Serialize)]
pub struct OverlapHistogram {
    pub max_multiplicity: usize,
    /// multiplicity -> number of probes with that count
    pub histogram: std::collections::BTreeMap<usize, usize>,
}

pub fn overlap_histogram(
    centers: &[Point],
    deltas: &[f64],
    dilation: f64,
    probes: &[Point],
) -> OverlapHistogram {
    assert_eq!(centers.len(), deltas.len());
    let boxes: Vec<CarlesonBox> = centers
        .iter()
        .zip(deltas)
        .map(|(z, &d)| CarlesonBox::new(z.clone(), d * dilation).unwrap())
        .collect();
    let mut histogram = std::collections::BTreeMap::new();
    let mut max_multiplicity = 0;
    for p in probes {
        let count = boxes.iter().filter(|b| b.contains(p)).count();
        max_multiplicity = max_multiplicity.max(count);
        *histogram.entry(count).or_insert(0) += 1;
    }
    OverlapHistogram {
        max_multiplicity,
        histogram,
    }
}

/// Numeric distortion bounds for `z' in Q_{delta(z)}(z)`: the two-sided
/// `(1-|z'|^2)/(1-|z|^2)` bounds, the `(1-|z'|)/(1-|z|)` bounds, the
/// radial lower bound and the shifted-shell containment.
#[derive(Clone, Debug, Serialize)]
pub struct DistortionCheck {
    pub ratio_sq: f64,
    pub ratio_linear: f64,
    pub radial_ratio: f64,
    pub in_shifted_shell: bool,
    pub bounds_hold: bool,
}

pub fn check_distortion(
    z: &[C64],
    zprime: &[C64],
    config: &CoverConfig,
) -> Result<DistortionCheck> {
    let bx = config.box_at(z, 1.0)?;
    if !bx.contains(zprime) {
        return Err(CoreError::invalid(
            "zprime",
            "probe point must lie in the box of z",
        ));
    }
    let c = config.c;
    let nz = norm(z);
    let nzp = norm(zprime);
    let ratio_sq = (1.0 - nzp * nzp) / (1.0 - nz * nz);
    let ratio_linear = (1.0 - nzp) / (1.0 - nz);
    let radial_ratio = nzp / nz;
    let in_shifted_shell = nzp > config.r - 4.0 * c;
    let bounds_hold = ratio_sq > 1.0 - 3.0 * c
        && ratio_sq < 1.0 + 2.0 * c
        && ratio_linear > 1.0 / 3.0
        && ratio_linear < 3.0
        && radial_ratio > 1.0 - 4.0 * c
        && in_shifted_shell;
    Ok(DistortionCheck {
        ratio_sq,
        ratio_linear,
        radial_ratio,
        in_shifted_shell,
        bounds_hold,
    })
}

/// Probe-based check of the mutual containments at the constant `C`:
/// `Q_{delta(z')}(z') subset Q_{C delta(z)}(z)` and
/// `Q_{delta(z)}(z) subset Q_{C delta(z')}(z')`.
/// Returns the number of violating probes (0 expected).
pub fn check_containment(
    z: &[C64],
    zprime: &[C64],
    config: &CoverConfig,
    probes: usize,
    seed: u64,
) -> Result<usize> {
    let box_z = config.box_at(z, 1.0)?;
    if !box_z.contains(zprime) {
        return Err(CoreError::invalid(
            "zprime",
            "probe point must lie in the box of z",
        ));
    }
    let box_zp = config.box_at(zprime, 1.0)?;
    let big_z = box_z.scaled(config.containment);
    let big_zp = box_zp.scaled(config.containment);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut violations = 0;
    for k in 0..probes {
        let biased = k % 2 == 0;
        let w = box_zp.sample(&mut rng, biased);
        if !big_z.contains(&w) {
            violations += 1;
        }
        let w = box_z.sample(&mut rng, biased);
        if !big_zp.contains(&w) {
            violations += 1;
        }
    }
    Ok(violations)
}

/// Draw `z'` uniformly (or boundary-biased) from `Q_{delta(z)}(z)`.
pub fn sample_in_box(
    z: &[C64],
    config: &CoverConfig,
    rng: &mut ChaCha8Rng,
    biased: bool,
) -> Result<Point> {
    Ok(config.box_at(z, 1.0)?.sample(rng, biased))
}
