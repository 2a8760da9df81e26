//! Team-specific partitioning of the pitch.
//!
//! Every pass contributes its start and end point, each carrying the field
//! value it had in the previous iteration, as a 3-feature point `(x, y, f)`.
//! The points are min-max scaled and clustered with mini-batch k-means, once
//! for the team's own passes and once for its opponents' passes. Nearest
//! centroid assignment maps passes, shots and mirrored turnover locations onto
//! those clusterings.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::event::{Point, TeamEventSet};
use crate::field_value::FieldValues;

/// `(x, y, field value)`.
pub type Feature = [f64; 3];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalerParams {
    pub min: Feature,
    pub max: Feature,
}

impl ScalerParams {
    pub fn fit(points: &[Feature]) -> Result<Self> {
        let first = points.first().ok_or(Error::EmptyInput("min-max scaling"))?;
        let mut min = *first;
        let mut max = *first;
        for p in points {
            for i in 0..3 {
                min[i] = min[i].min(p[i]);
                max[i] = max[i].max(p[i]);
            }
        }
        Ok(Self { min, max })
    }

    /// Identity on the unit cube.
    pub fn unit() -> Self {
        Self {
            min: [0.0; 3],
            max: [1.0; 3],
        }
    }

    #[inline]
    fn scale_one(&self, i: usize, v: f64) -> f64 {
        let range = self.max[i] - self.min[i];
        if range > 0.0 {
            (v - self.min[i]) / range
        } else {
            0.0
        }
    }

    pub fn transform(&self, p: &Feature) -> Feature {
        [
            self.scale_one(0, p[0]),
            self.scale_one(1, p[1]),
            self.scale_one(2, p[2]),
        ]
    }

    pub fn transform_spatial(&self, p: Point) -> [f64; 2] {
        [self.scale_one(0, p.x), self.scale_one(1, p.y)]
    }

    pub fn inverse(&self, s: &Feature) -> Feature {
        let mut out = [0.0; 3];
        for i in 0..3 {
            out[i] = self.min[i] + s[i] * (self.max[i] - self.min[i]);
        }
        out
    }
}

/// Scales every feature onto `[0, 1]`; constant features map to 0.
pub fn min_max_scale(points: &[Feature]) -> Result<(Vec<Feature>, ScalerParams)> {
    let scaler = ScalerParams::fit(points)?;
    Ok((points.iter().map(|p| scaler.transform(p)).collect(), scaler))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PartitionConfig {
    pub c_max: usize,
    pub c_min: usize,
    pub c_step: usize,
    pub batch_size: usize,
    pub max_iterations: usize,
    /// Stop once no centroid moves further than this in scaled space.
    pub tolerance: f64,
    pub seed: u64,
}

impl Default for PartitionConfig {
    fn default() -> Self {
        Self {
            c_max: 1000,
            c_min: 100,
            c_step: 50,
            batch_size: 1024,
            max_iterations: 300,
            tolerance: 1e-4,
            seed: 0,
        }
    }
}

impl PartitionConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: alloc::string::String| Err(Error::InvalidConfig(msg));
        if self.c_min == 0 {
            return fail("c_min must be positive".into());
        }
        if self.c_min > self.c_max {
            return fail(format!("c_min {} exceeds c_max {}", self.c_min, self.c_max));
        }
        if self.c_step == 0 {
            return fail("c_step must be positive".into());
        }
        if !(self.c_max - self.c_min).is_multiple_of(self.c_step) {
            return fail(format!(
                "c_max - c_min = {} is not a multiple of c_step {}",
                self.c_max - self.c_min,
                self.c_step
            ));
        }
        if self.batch_size == 0 {
            return fail("batch_size must be positive".into());
        }
        if !(self.tolerance >= 0.0) {
            return fail("tolerance must be non-negative".into());
        }
        Ok(())
    }

    /// Cluster counts visited by the coarsening loop, largest first.
    pub fn cluster_counts(&self) -> Vec<usize> {
        (0..=(self.c_max - self.c_min) / self.c_step)
            .map(|k| self.c_max - k * self.c_step)
            .collect()
    }
}

#[inline]
fn dist2(a: &Feature, b: &Feature) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    let df = a[2] - b[2];
    dx * dx + dy * dy + df * df
}

/// Index and squared distance of the nearest centroid; ties go to the lowest
/// index.
#[inline]
fn nearest(centroids: &[Feature], p: &Feature) -> (usize, f64) {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (k, c) in centroids.iter().enumerate() {
        let d = dist2(c, p);
        if d < best_d {
            best_d = d;
            best = k;
        }
    }
    (best, best_d)
}

fn assign_all(points: &[Feature], centroids: &[Feature]) -> (Vec<usize>, f64) {
    let mut inertia = 0.0;
    let labels = points
        .iter()
        .map(|p| {
            let (k, d) = nearest(centroids, p);
            inertia += d;
            k
        })
        .collect();
    (labels, inertia)
}

fn distinct_count(points: &[Feature]) -> usize {
    let mut sorted: Vec<Feature> = points.to_vec();
    sorted.sort_by(|a, b| {
        a[0].total_cmp(&b[0])
            .then(a[1].total_cmp(&b[1]))
            .then(a[2].total_cmp(&b[2]))
    });
    sorted.dedup();
    sorted.len()
}

/// k-means++ seeding. Returns `None` when the points hold fewer than `c`
/// distinct locations.
fn kmeans_plus_plus(points: &[Feature], c: usize, rng: &mut ChaCha8Rng) -> Option<Vec<Feature>> {
    let first = points[rng.random_range(0..points.len())];
    let mut centroids = Vec::with_capacity(c);
    centroids.push(first);
    let mut weights: Vec<f64> = points.iter().map(|p| dist2(p, &first)).collect();
    while centroids.len() < c {
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) {
            return None;
        }
        let target = rng.random::<f64>() * total;
        let mut acc = 0.0;
        let mut chosen = None;
        for (i, &w) in weights.iter().enumerate() {
            if w > 0.0 {
                acc += w;
                chosen = Some(i);
                if acc > target {
                    break;
                }
            }
        }
        let next = points[chosen?];
        for (w, p) in weights.iter_mut().zip(points) {
            let d = dist2(p, &next);
            if d < *w {
                *w = d;
            }
        }
        centroids.push(next);
    }
    Some(centroids)
}

/// Mini-batch k-means with k-means++ seeding on scaled points.
///
/// Seeding runs on a uniform subsample of `max(3 * batch_size, 3 * c)`
/// points. After the mini-batch phase one full Lloyd step refines the
/// centroids; if the result is worse than the seeding the seeding is kept.
/// Returns the centroids and the label of every input point.
pub fn mini_batch_kmeans(
    points: &[Feature],
    c: usize,
    cfg: &PartitionConfig,
    seed: u64,
) -> Result<(Vec<Feature>, Vec<usize>)> {
    let n = points.len();
    if c == 0 {
        return Err(Error::InvalidConfig("cluster count must be positive".into()));
    }
    if n < c {
        return Err(Error::TooFewPoints {
            points: n,
            clusters: c,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let sample_size = (3 * cfg.batch_size).max(3 * c).min(n);
    let init = if sample_size < n {
        let mut idx: Vec<usize> = (0..n).collect();
        for i in 0..sample_size {
            let j = rng.random_range(i..n);
            idx.swap(i, j);
        }
        let sample: Vec<Feature> = idx[..sample_size].iter().map(|&i| points[i]).collect();
        kmeans_plus_plus(&sample, c, &mut rng)
    } else {
        None
    };
    let init = match init {
        Some(init) => init,
        None => kmeans_plus_plus(points, c, &mut rng).ok_or(Error::TooFewPoints {
            points: distinct_count(points),
            clusters: c,
        })?,
    };

    let mut centroids = init.clone();
    let mut counts = vec![0.0f64; c];
    let mut sums = vec![[0.0f64; 3]; c];
    let mut hits = vec![0.0f64; c];
    let batch = cfg.batch_size.min(n);
    let tol2 = cfg.tolerance * cfg.tolerance;
    for _ in 0..cfg.max_iterations {
        for _ in 0..batch {
            let p = &points[rng.random_range(0..n)];
            let (k, _) = nearest(&centroids, p);
            hits[k] += 1.0;
            for i in 0..3 {
                sums[k][i] += p[i];
            }
        }
        let mut max_shift = 0.0f64;
        for k in 0..c {
            if hits[k] == 0.0 {
                continue;
            }
            let total = counts[k] + hits[k];
            let old = centroids[k];
            let mut new = [0.0; 3];
            for i in 0..3 {
                new[i] = (old[i] * counts[k] + sums[k][i]) / total;
            }
            max_shift = max_shift.max(dist2(&old, &new));
            centroids[k] = new;
            counts[k] = total;
            hits[k] = 0.0;
            sums[k] = [0.0; 3];
        }
        if max_shift < tol2 {
            break;
        }
    }

    let (labels, _) = assign_all(points, &centroids);
    let mut refined = centroids;
    let mut members = vec![0usize; c];
    let mut acc = vec![[0.0f64; 3]; c];
    for (p, &k) in points.iter().zip(&labels) {
        members[k] += 1;
        for i in 0..3 {
            acc[k][i] += p[i];
        }
    }
    for k in 0..c {
        if members[k] > 0 {
            let m = members[k] as f64;
            refined[k] = [acc[k][0] / m, acc[k][1] / m, acc[k][2] / m];
        }
    }
    let (refined_labels, refined_inertia) = assign_all(points, &refined);
    let (init_labels, init_inertia) = assign_all(points, &init);
    if refined_inertia <= init_inertia {
        Ok((refined, refined_labels))
    } else {
        Ok((init, init_labels))
    }
}

/// Sum of squared distances from each point to its nearest centroid.
pub fn inertia(points: &[Feature], centroids: &[Feature]) -> f64 {
    assign_all(points, centroids).1
}

/// Centroids in scaled feature space plus the scaler that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct Clustering {
    pub centroids: Vec<Feature>,
    pub scaler: ScalerParams,
    pub seed: u64,
}

impl Clustering {
    /// Scales `raw` and clusters it. Also returns the label of every point.
    pub fn fit(
        raw: &[Feature],
        c: usize,
        cfg: &PartitionConfig,
        seed: u64,
    ) -> Result<(Self, Vec<usize>)> {
        let (scaled, scaler) = min_max_scale(raw)?;
        let (centroids, labels) = mini_batch_kmeans(&scaled, c, cfg, seed)?;
        Ok((
            Self {
                centroids,
                scaler,
                seed,
            },
            labels,
        ))
    }

    pub fn c(&self) -> usize {
        self.centroids.len()
    }

    /// Nearest centroid of a raw `(x, y, f)` point.
    pub fn assign_full(&self, point: &Feature) -> usize {
        nearest(&self.centroids, &self.scaler.transform(point)).0
    }

    /// Nearest centroid by the spatial features only.
    pub fn assign_spatial(&self, point: Point) -> usize {
        let [x, y] = self.scaler.transform_spatial(point);
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (k, c) in self.centroids.iter().enumerate() {
            let dx = c[0] - x;
            let dy = c[1] - y;
            let d = dx * dx + dy * dy;
            if d < best_d {
                best_d = d;
                best = k;
            }
        }
        best
    }

    /// Centroid `k` in raw units.
    pub fn centroid_raw(&self, k: usize) -> Feature {
        self.scaler.inverse(&self.centroids[k])
    }
}

/// The two clusterings of one team: `own` over the team's passes and `opp`
/// over its opponents' passes. Both have the same cluster count.
#[derive(Debug, Clone, PartialEq)]
pub struct TeamPartition {
    pub own: Clustering,
    pub opp: Clustering,
}

impl TeamPartition {
    pub fn c(&self) -> usize {
        self.own.c()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClusterAssignment {
    pub c_s: usize,
    pub c_e: usize,
    /// Cluster of the mirrored end point in the other team's clustering; set
    /// only for passes that hand the ball over.
    pub l_e: Option<usize>,
    /// Field values the endpoints carried into this clustering.
    pub f_s: f64,
    pub f_e: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PartitionAssignments {
    pub own_passes: Vec<ClusterAssignment>,
    pub opponent_passes: Vec<ClusterAssignment>,
    pub own_shots: Vec<usize>,
    pub opponent_shots: Vec<usize>,
}

/// Field values and assignments of the previous coarsening iteration.
#[derive(Debug, Clone, Copy)]
pub struct PreviousIteration<'a> {
    pub values: &'a FieldValues,
    pub assignments: &'a PartitionAssignments,
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

/// SplitMix64 finaliser over the combined inputs.
pub(crate) fn mix_seed(base: u64, parts: &[u64]) -> u64 {
    let mut z = base;
    for &p in parts {
        z = z.wrapping_add(0x9e37_79b9_7f4a_7c15).wrapping_add(p);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^= z >> 31;
    }
    z
}

fn endpoint_features(
    passes: &[crate::event::PassRecord],
    values: &[(f64, f64)],
) -> Vec<Feature> {
    let mut points = Vec::with_capacity(2 * passes.len());
    points.extend(
        passes
            .iter()
            .zip(values)
            .map(|(p, v)| [p.start.x, p.start.y, v.0]),
    );
    points.extend(passes.iter().zip(values).map(|(p, v)| [p.end.x, p.end.y, v.1]));
    points
}

/// Builds both clusterings of a team with `c` clusters and assigns every pass
/// and shot.
pub fn build_partition(
    events: &TeamEventSet,
    prev: Option<PreviousIteration<'_>>,
    c: usize,
    cfg: &PartitionConfig,
) -> Result<(TeamPartition, PartitionAssignments)> {
    if events.own_passes.is_empty() {
        return Err(Error::EmptyInput("team has no passes"));
    }
    if events.opponent_passes.is_empty() {
        return Err(Error::EmptyInput("opponents have no passes"));
    }
    let (own_f, opp_f): (Vec<(f64, f64)>, Vec<(f64, f64)>) = match prev {
        None => (
            vec![(0.0, 0.0); events.own_passes.len()],
            vec![(0.0, 0.0); events.opponent_passes.len()],
        ),
        Some(prev) => {
            let fv = prev.values;
            let a = prev.assignments;
            if a.own_passes.len() != events.own_passes.len()
                || a.opponent_passes.len() != events.opponent_passes.len()
            {
                return Err(Error::MissingAssignment {
                    what: "previous pass",
                    index: a.own_passes.len().min(a.opponent_passes.len()),
                });
            }
            (
                a.own_passes
                    .iter()
                    .map(|a| (fv.own(a.c_s), fv.own(a.c_e)))
                    .collect(),
                a.opponent_passes
                    .iter()
                    .map(|a| (fv.opp(a.c_s), fv.opp(a.c_e)))
                    .collect(),
            )
        }
    };

    let team = fnv1a(events.team_id.as_bytes());
    let own_points = endpoint_features(&events.own_passes, &own_f);
    let opp_points = endpoint_features(&events.opponent_passes, &opp_f);
    let (own, own_labels) =
        Clustering::fit(&own_points, c, cfg, mix_seed(cfg.seed, &[team, c as u64, 0]))?;
    let (opp, opp_labels) =
        Clustering::fit(&opp_points, c, cfg, mix_seed(cfg.seed, &[team, c as u64, 1]))?;

    let label_passes = |passes: &[crate::event::PassRecord],
                        labels: &[usize],
                        f: &[(f64, f64)],
                        other: &Clustering| {
        let n = passes.len();
        passes
            .iter()
            .enumerate()
            .map(|(j, p)| ClusterAssignment {
                c_s: labels[j],
                c_e: labels[n + j],
                l_e: p
                    .changes_possession()
                    .then(|| other.assign_spatial(p.end.mirror())),
                f_s: f[j].0,
                f_e: f[j].1,
            })
            .collect::<Vec<_>>()
    };
    let assignments = PartitionAssignments {
        own_passes: label_passes(&events.own_passes, &own_labels, &own_f, &opp),
        opponent_passes: label_passes(&events.opponent_passes, &opp_labels, &opp_f, &own),
        own_shots: events
            .own_shots
            .iter()
            .map(|s| own.assign_spatial(s.location))
            .collect(),
        opponent_shots: events
            .opponent_shots
            .iter()
            .map(|s| opp.assign_spatial(s.location))
            .collect(),
    };
    Ok((TeamPartition { own, opp }, assignments))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::event::PassRecord;

    fn cfg() -> PartitionConfig {
        PartitionConfig {
            c_max: 4,
            c_min: 4,
            c_step: 1,
            batch_size: 64,
            max_iterations: 200,
            tolerance: 1e-6,
            seed: 7,
        }
    }

    #[test]
    fn scaling_examples() {
        let pts = [[0.0, 7.0, 0.0], [5.0, 7.0, 0.0], [10.0, 7.0, 0.0]];
        let (scaled, scaler) = min_max_scale(&pts).unwrap();
        assert_eq!(
            scaled.iter().map(|p| p[0]).collect::<Vec<_>>(),
            vec![0.0, 0.5, 1.0]
        );
        assert!(scaled.iter().all(|p| p[1] == 0.0 && p[2] == 0.0));
        assert_eq!(scaler.min, [0.0, 7.0, 0.0]);
        assert!(matches!(min_max_scale(&[]), Err(Error::EmptyInput(_))));
    }

    #[test]
    fn default_schedule_has_nineteen_counts() {
        let cfg = PartitionConfig::default();
        cfg.validate().unwrap();
        let counts = cfg.cluster_counts();
        assert_eq!(counts.len(), 19);
        assert_eq!(counts.first(), Some(&1000));
        assert_eq!(counts.last(), Some(&100));
        assert!(counts.windows(2).all(|w| w[0] - w[1] == 50));
    }

    #[test]
    fn invalid_configs() {
        let mut c = PartitionConfig::default();
        c.c_step = 70;
        assert!(c.validate().is_err());
        c.c_step = 0;
        assert!(c.validate().is_err());
        let c = PartitionConfig {
            c_min: 2000,
            ..PartitionConfig::default()
        };
        assert!(c.validate().is_err());
    }

    #[test]
    fn single_cluster_is_the_mean() {
        let pts: Vec<Feature> = (0..50)
            .map(|i| {
                let t = i as f64 / 49.0;
                [t, (t * 7.0) % 1.0, t * t]
            })
            .collect();
        let (centroids, labels) = mini_batch_kmeans(&pts, 1, &cfg(), 1).unwrap();
        let mean: Vec<f64> = (0..3)
            .map(|i| pts.iter().map(|p| p[i]).sum::<f64>() / pts.len() as f64)
            .collect();
        for i in 0..3 {
            assert!((centroids[0][i] - mean[i]).abs() < 1e-12);
        }
        assert!(labels.iter().all(|&l| l == 0));
    }

    #[test]
    fn exact_cover_has_zero_inertia() {
        let pts: Vec<Feature> = (0..12)
            .map(|i| [(i % 4) as f64 / 3.0, (i / 4) as f64 / 2.0, 0.0])
            .collect();
        let (centroids, _) = mini_batch_kmeans(&pts, 12, &cfg(), 3).unwrap();
        assert_eq!(inertia(&pts, &centroids), 0.0);
        let mut sorted = centroids.clone();
        sorted.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
        sorted.dedup();
        assert_eq!(sorted.len(), 12);
    }

    #[test]
    fn too_few_points() {
        let pts = [[0.0; 3], [1.0, 0.0, 0.0]];
        assert_eq!(
            mini_batch_kmeans(&pts, 3, &cfg(), 0),
            Err(Error::TooFewPoints {
                points: 2,
                clusters: 3
            })
        );
        let dup = [[0.5; 3]; 5];
        assert!(matches!(
            mini_batch_kmeans(&dup, 2, &cfg(), 0),
            Err(Error::TooFewPoints { points: 1, .. })
        ));
    }

    fn manual(centroids: Vec<Feature>) -> Clustering {
        Clustering {
            centroids,
            scaler: ScalerParams::unit(),
            seed: 0,
        }
    }

    #[test]
    fn assign_full_examples() {
        let cl = manual(vec![
            [0.0, 0.0, 0.0],
            [0.4, 0.5, 0.5],
            [1.0, 1.0, 1.0],
            [0.2, 0.8, 0.3],
            [0.6, 0.5, 0.5],
        ]);
        assert_eq!(cl.assign_full(&[0.2, 0.8, 0.3]), 3);
        // equidistant from 1 and 4
        assert_eq!(cl.assign_full(&[0.5, 0.5, 0.5]), 1);
        for p in [[0.9, 0.1, 0.0], [0.3, 0.3, 0.9], [0.0, 1.0, 0.5]] {
            assert!(cl.assign_full(&p) < cl.c());
        }
    }

    #[test]
    fn assign_spatial_examples() {
        let cl = manual(vec![
            [0.25, 0.25, 0.9],
            [0.75, 0.25, 0.0],
            [0.25, 0.75, 0.1],
            [0.75, 0.75, 0.5],
        ]);
        // raw units on the unit scaler coincide with scaled units
        assert_eq!(cl.assign_spatial(Point::new(0.75, 0.25)), 1);
        for i in 0..=20 {
            for j in 0..=20 {
                let q = Point::new(i as f64 / 20.0, j as f64 / 20.0);
                let brute = (0..4)
                    .min_by(|&a, &b| {
                        let da = (cl.centroids[a][0] - q.x).powi(2) + (cl.centroids[a][1] - q.y).powi(2);
                        let db = (cl.centroids[b][0] - q.x).powi(2) + (cl.centroids[b][1] - q.y).powi(2);
                        da.total_cmp(&db)
                    })
                    .unwrap();
                assert_eq!(cl.assign_spatial(q), brute);
            }
        }
        let one = manual(vec![[0.3, 0.3, 0.3]]);
        assert_eq!(one.assign_spatial(Point::new(0.9, 0.1)), 0);
    }

    fn pass(team: &str, start: (f64, f64), end: (f64, f64), ok: bool, last: bool) -> PassRecord {
        PassRecord {
            match_id: "M".into(),
            seq: 1,
            source_seq: Some(1),
            team_id: team.into(),
            player_id: "P".into(),
            start: Point::new(start.0, start.1),
            end: Point::new(end.0, end.1),
            successful: ok,
            is_virtual: false,
            possession_id: 0,
            is_last_of_possession: last,
            possession_ends_in_shot: false,
            assist_for_shot: None,
        }
    }

    fn grid_events() -> TeamEventSet {
        let mut own = Vec::new();
        let mut opp = Vec::new();
        for i in 0..10 {
            for j in 0..10 {
                let x = 5.0 + 10.0 * i as f64;
                let y = 5.0 + 10.0 * j as f64;
                own.push(pass("A", (x, y), (100.0 - y, x), true, false));
                opp.push(pass("B", (y, x), (x, 100.0 - y), true, false));
            }
        }
        own[3] = pass("A", (40.0, 40.0), (80.0, 30.0), false, true);
        own[4] = pass("A", (40.0, 40.0), (60.0, 30.0), true, true);
        TeamEventSet {
            team_id: "A".into(),
            own_passes: own,
            opponent_passes: opp,
            ..TeamEventSet::default()
        }
    }

    #[test]
    fn first_iteration_partition() {
        let events = grid_events();
        let cfg = PartitionConfig {
            batch_size: 32,
            ..cfg()
        };
        let (partition, a) = build_partition(&events, None, 6, &cfg).unwrap();
        assert_eq!(partition.own.c(), 6);
        assert_eq!(partition.opp.c(), 6);
        assert!(a.own_passes.iter().all(|x| x.f_s == 0.0 && x.f_e == 0.0));
        assert!(partition.own.centroids.iter().all(|c| c[2] == 0.0));
        let lost = a.own_passes[3];
        assert_eq!(lost.l_e, Some(partition.opp.assign_spatial(Point::new(20.0, 70.0))));
        assert!(a.own_passes[4].l_e.is_some());
        assert!(a.own_passes[5].l_e.is_none());
        // every training point is labelled with its true nearest centroid
        for (p, x) in events.own_passes.iter().zip(&a.own_passes) {
            assert_eq!(partition.own.assign_full(&[p.start.x, p.start.y, 0.0]), x.c_s);
            assert_eq!(partition.own.assign_full(&[p.end.x, p.end.y, 0.0]), x.c_e);
        }
        let again = build_partition(&events, None, 6, &cfg).unwrap();
        assert_eq!(again.0, partition);
        assert_eq!(again.1, a);
    }

    #[test]
    fn partition_needs_both_sides() {
        let mut events = grid_events();
        events.opponent_passes.clear();
        assert!(matches!(
            build_partition(&events, None, 4, &cfg()),
            Err(Error::EmptyInput(_))
        ));
    }
}
