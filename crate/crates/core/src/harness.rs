//! Numerical checks of the construction's quantitative bounds.
//!
//! Every check returns a [`CheckReport`] that serializes to one JSON object
//! `{"check", "pass", "constants", "worst", "seed"}`. Sampling checks use a
//! ChaCha stream per sample index, so reports do not depend on the number
//! of worker threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::construction::{self, scale_fns, Cluster, Truncation};
use crate::error::Result;
use crate::metrics::{self, PlanarIndex, Point, PointSet1};
use crate::profile::Direction;
use crate::scalar::{self, Scalar};
use crate::tangents::{reference_set, ReferenceKind};

pub const DEFAULT_SEED: u64 = 0;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckReport {
    pub check: String,
    pub pass: bool,
    pub constants: Map<String, Value>,
    pub worst: Value,
    pub seed: Option<u64>,
}

impl CheckReport {
    fn new(check: &str, pass: bool, seed: Option<u64>) -> Self {
        Self {
            check: check.to_string(),
            pass,
            constants: Map::new(),
            worst: Value::Null,
            seed,
        }
    }

    fn constant(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.constants.insert(key.to_string(), value.into());
        self
    }

    fn worst(mut self, worst: Value) -> Self {
        self.worst = worst;
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

fn dec(x: &Scalar) -> Value {
    Value::String(scalar::to_decimal(x, 30))
}

fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Index and ratio `y_i / (3^-i + 4^-i)` of the worst entry of a
/// descending list, and whether every ratio is at most 1.
pub fn yydecay_worst(descending: &[Scalar]) -> (bool, usize, Scalar) {
    let prec = descending.first().map_or(scalar::MIN_PRECISION, Scalar::prec);
    let mut worst = (0, Scalar::with_val(prec, 0));
    for (i, y) in descending.iter().enumerate() {
        let e = -(i as i32 + 1);
        let bound = scalar::int_pow(3, e, prec) + scalar::int_pow(4, e, prec);
        let ratio = Scalar::with_val(prec, y / &bound);
        if ratio > worst.1 {
            worst = (i + 1, ratio);
        }
    }
    (worst.1 <= 1, worst.0, worst.1)
}

/// `y_i <= 3^-i + 4^-i` over `y_set(c, n)` in descending order.
pub fn check_yydecay(c: &Scalar, n: u64) -> Result<CheckReport> {
    let mut ys = construction::y_set(c, n)?;
    ys.reverse();
    let (pass, index, ratio) = yydecay_worst(&ys);
    Ok(CheckReport::new("yydecay", pass, None)
        .constant("c", dec(c))
        .constant("n", n)
        .worst(json!({ "index": index, "ratio": dec(&ratio) })))
}

/// For points ranked `i < j` from the top along the cluster's
/// perpendicular: perpendicular gap `>= v(g) / 2^(i+1)` and parallel gap
/// `<= 2 v(g) / 3^i`. Clusters with `c = 0` are reported as skipped.
pub fn check_bilipschitz(cl: &Cluster) -> CheckReport {
    let prec = cl.prec();
    let base = CheckReport::new("bilipschitz", true, None)
        .constant("k", cl.k)
        .constant("n", cl.n)
        .constant("g", cl.g);
    if cl.c.is_zero() || cl.points.len() < 2 {
        return base.constant("skipped", true);
    }
    let (sin, cos) = cl.theta.theta().clone().sin_cos(Scalar::new(prec));
    let mut coords: Vec<(Scalar, Scalar, usize)> = cl
        .points
        .iter()
        .enumerate()
        .map(|(idx, p)| {
            let along = Scalar::with_val(prec, &p.x * &cos) + Scalar::with_val(prec, &p.y * &sin);
            let perp = Scalar::with_val(prec, &p.y * &cos) - Scalar::with_val(prec, &p.x * &sin);
            (perp, along, idx)
        })
        .collect();
    coords.sort_by(|a, b| scalar::cmp(&b.0, &a.0));
    let (v, _) = scale_fns(cl.g, prec);
    let tol = scalar::pow2(-(prec as i32) / 2, prec);
    let lower_slack = Scalar::with_val(prec, 1) - &tol;
    let upper_slack = Scalar::with_val(prec, 1) + &tol;
    let len = coords.len();

    // Suffix extremes of the parallel coordinate give the largest parallel
    // gap from rank i to any lower rank in one pass.
    let mut suffix_min = vec![coords[len - 1].1.clone(); len];
    let mut suffix_max = suffix_min.clone();
    for i in (0..len - 1).rev() {
        suffix_min[i] = if coords[i].1 < suffix_min[i + 1] { coords[i].1.clone() } else { suffix_min[i + 1].clone() };
        suffix_max[i] = if coords[i].1 > suffix_max[i + 1] { coords[i].1.clone() } else { suffix_max[i + 1].clone() };
    }

    let mut worst: Option<(Scalar, Value)> = None;
    let mut pass = true;
    for i in 0..len - 1 {
        let rank = i as i32 + 1;
        let perp_gap = Scalar::with_val(prec, &coords[i].0 - &coords[i + 1].0);
        let perp_need = Scalar::with_val(prec, &v * &scalar::pow2(-(rank + 1), prec));
        let perp_ratio = Scalar::with_val(prec, &perp_gap / &perp_need);
        let hi = Scalar::with_val(prec, &suffix_max[i + 1] - &coords[i].1).abs();
        let lo = Scalar::with_val(prec, &coords[i].1 - &suffix_min[i + 1]).abs();
        let par_gap = if hi > lo { hi } else { lo };
        let par_allow = scalar::int_pow(3, -rank, prec) * &v * 2u32;
        let par_ratio = Scalar::with_val(prec, &par_gap / &par_allow);
        let ok = perp_ratio >= lower_slack && par_ratio <= upper_slack;
        pass &= ok;
        // margin: how close the pair comes to either bound
        let margin = {
            let a = Scalar::with_val(prec, &perp_ratio - 1u32);
            let b = Scalar::with_val(prec, 1u32 - &par_ratio);
            if a < b { a } else { b }
        };
        if worst.as_ref().is_none_or(|(m, _)| margin < *m) {
            let pair = json!({
                "rank": rank,
                "points": [coords[i].2, coords[i + 1].2],
                "perp_ratio": dec(&perp_ratio),
                "parallel_ratio": dec(&par_ratio),
            });
            worst = Some((margin, pair));
        }
    }
    let mut report = base.worst(worst.map(|w| w.1).unwrap_or(Value::Null));
    report.pass = pass;
    report
}

#[derive(Clone, Debug, PartialEq)]
pub struct SeparationRow {
    pub g_a: u64,
    pub g_b: u64,
    pub g_small: u64,
    pub gap: Scalar,
    pub overlapping: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SeparationReport {
    pub theta: Direction,
    /// Pairs whose smaller schedule index is at least `k` are separated.
    pub k: u64,
    /// `min gap * 4^g_small` over those pairs.
    pub c: Option<Scalar>,
    pub rows: Vec<SeparationRow>,
}

impl SeparationReport {
    pub fn pass(&self) -> bool {
        self.c.as_ref().is_some_and(|c| *c > 0)
    }

    pub fn to_check(&self) -> CheckReport {
        let worst = self
            .rows
            .iter()
            .filter(|r| r.g_small >= self.k)
            .min_by(|a, b| scalar::cmp(&scaled_gap(a), &scaled_gap(b)))
            .map(|r| json!({ "g": [r.g_a, r.g_b], "gap": dec(&r.gap) }))
            .unwrap_or(Value::Null);
        CheckReport::new("separation", self.pass(), None)
            .constant("theta", dec(self.theta.theta()))
            .constant("K", self.k)
            .constant("C", self.c.as_ref().map_or(Value::Null, dec))
            .worst(worst)
    }
}

fn scaled_gap(r: &SeparationRow) -> Scalar {
    let prec = r.gap.prec();
    Scalar::with_val(prec, &r.gap * &scalar::pow2(2 * r.g_small as i32, prec))
}

fn min_gap(a: &[Scalar], b: &[Scalar]) -> Scalar {
    let prec = a[0].prec();
    let mut best: Option<Scalar> = None;
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        let d = Scalar::with_val(prec, &a[i] - &b[j]).abs();
        if best.as_ref().is_none_or(|m| d < *m) {
            best = Some(d);
        }
        if a[i] < b[j] {
            i += 1;
        } else {
            j += 1;
        }
    }
    best.expect("non-empty projections")
}

/// Separation of schedule-indexed projected clusters.
pub fn separation_of(theta: &Direction, projected: &[(u64, PointSet1)]) -> SeparationReport {
    let mut rows = Vec::new();
    for (ia, (ga, pa)) in projected.iter().enumerate() {
        for (gb, pb) in &projected[ia + 1..] {
            let overlapping = pa.min() <= pb.max() && pb.min() <= pa.max();
            rows.push(SeparationRow {
                g_a: *ga,
                g_b: *gb,
                g_small: (*ga).min(*gb),
                gap: min_gap(pa.values(), pb.values()),
                overlapping,
            });
        }
    }
    let k = rows
        .iter()
        .filter(|r| r.overlapping)
        .map(|r| r.g_small + 1)
        .max()
        .unwrap_or(1);
    let c = rows
        .iter()
        .filter(|r| r.g_small >= k)
        .map(scaled_gap)
        .min_by(scalar::cmp);
    SeparationReport {
        theta: theta.clone(),
        k,
        c,
        rows,
    }
}

/// Gaps between the projections of every cluster pair, with the smallest
/// `K` from which no projected hulls overlap and the largest `C` with
/// `gap >= C 4^-g_small` for every pair beyond it.
pub fn check_separation(trunc: &Truncation, theta: &Direction) -> SeparationReport {
    let theta = Direction::wrapped(Scalar::with_val(trunc.prec, theta.theta()));
    let projected: Vec<(u64, PointSet1)> = trunc
        .clusters
        .par_iter()
        .map(|cl| (cl.g, metrics::project(&cl.points, &theta)))
        .collect();
    separation_of(&theta, &projected)
}

struct ClusterBox {
    g: u64,
    lo: Point,
    hi: Point,
}

fn cluster_boxes(trunc: &Truncation) -> Vec<ClusterBox> {
    trunc
        .clusters
        .iter()
        .map(|cl| {
            let min = |f: fn(&Point) -> &Scalar| cl.points.iter().map(f).min_by(|a, b| scalar::cmp(a, b)).expect("points").clone();
            let max = |f: fn(&Point) -> &Scalar| cl.points.iter().map(f).max_by(|a, b| scalar::cmp(a, b)).expect("points").clone();
            ClusterBox {
                g: cl.g,
                lo: Point::new(min(|p| &p.x), min(|p| &p.y)),
                hi: Point::new(max(|p| &p.x), max(|p| &p.y)),
            }
        })
        .collect()
}

/// Schedule indices of the clusters meeting the closed ball `B(x, R)`.
fn clusters_hit(trunc: &Truncation, boxes: &[ClusterBox], x: &Point, radius: &Scalar) -> Vec<u64> {
    let prec = trunc.prec;
    let clamp = |v: &Scalar, lo: &Scalar, hi: &Scalar| -> Scalar {
        if v < lo {
            Scalar::with_val(prec, lo - v)
        } else if v > hi {
            Scalar::with_val(prec, v - hi)
        } else {
            Scalar::with_val(prec, 0)
        }
    };
    trunc
        .clusters
        .iter()
        .zip(boxes)
        .filter(|(cl, b)| {
            let dx = clamp(&x.x, &b.lo.x, &b.hi.x);
            let dy = clamp(&x.y, &b.lo.y, &b.hi.y);
            if dx.hypot(&dy) > *radius {
                return false;
            }
            cl.points.iter().any(|p| metrics::in_ball(p, x, radius))
        })
        .map(|(_, b)| b.g)
        .collect()
}

/// `m` is the smallest schedule index among the clusters a ball meets.
/// Checks `-log2 R - 3 <= m` for every ball meeting two or more clusters,
/// and `m <= -log2 R + 2` for those with `R <= 1`.
pub fn bracket_holds(a: i64, m: u64) -> bool {
    let m = m as i64;
    a - 3 <= m && (a < 0 || m <= a + 2)
}

/// Samples balls `B(x, 2^-a)` with `x` drawn from the truncation, plus the
/// origin at `R = 2^-3` and `R = 4`.
pub fn check_radius_bracket(trunc: &Truncation, samples: usize, seed: u64) -> CheckReport {
    let prec = trunc.prec;
    let points = trunc.all_points();
    let boxes = cluster_boxes(trunc);
    let a_max = trunc.g_max as i64 + 4;
    let mut balls: Vec<(Point, i64)> = vec![(trunc.origin(), 3), (trunc.origin(), -2)];
    balls.extend((0..samples as u64).map(|i| {
        let mut rng = sample_rng(seed, i);
        let x = points[rng.gen_range(0..points.len())].clone();
        (x, rng.gen_range(-2..=a_max))
    }));
    let results: Vec<Option<(i64, u64, bool)>> = balls
        .par_iter()
        .map(|(x, a)| {
            let radius = scalar::pow2(-(*a as i32), prec);
            let hit = clusters_hit(trunc, &boxes, x, &radius);
            if hit.len() < 2 {
                return None;
            }
            let m = *hit.iter().min().expect("non-empty");
            Some((*a, m, bracket_holds(*a, m)))
        })
        .collect();
    let checked = results.iter().flatten().count();
    let failures: Vec<(usize, i64, u64)> = results
        .iter()
        .enumerate()
        .filter_map(|(i, r)| r.filter(|r| !r.2).map(|r| (i, r.0, r.1)))
        .collect();
    let worst = failures
        .first()
        .map(|(i, a, m)| json!({ "ball": i, "a": a, "m": m }))
        .unwrap_or(Value::Null);
    CheckReport::new("radius_bracket", failures.is_empty(), Some(seed))
        .constant("balls", balls.len())
        .constant("checked", checked)
        .constant("failures", failures.len())
        .worst(worst)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoveringReport {
    pub epsilon: Scalar,
    /// Smallest `C` with `N_r(B(x,R) cap F) <= C (R/r)^eps` over the samples.
    pub c_measured: Scalar,
    /// The same constant with each ball restricted to the cluster of its center.
    pub c_cluster: Scalar,
    /// Constant for the reference `Z` set.
    pub c_z: Scalar,
    /// `c_cluster / (eps e ln 2)`, so that `c_cluster log2 x <= c_tilde x^eps`.
    pub c_tilde: Scalar,
    /// Largest ratio of planar to perpendicular-projection covering numbers.
    pub c_zero: Scalar,
    pub samples: usize,
    pub worst: (Point, Scalar, Scalar, u64),
    pub seed: u64,
}

impl CoveringReport {
    /// Passes when `c_measured` does not exceed `bound`, if one is given.
    pub fn to_check(&self, bound: Option<&Scalar>) -> CheckReport {
        let pass = self.c_measured.is_finite() && bound.is_none_or(|b| self.c_measured <= *b);
        let (x, big_r, r, n) = &self.worst;
        CheckReport::new("global_covering", pass, Some(self.seed))
            .constant("epsilon", dec(&self.epsilon))
            .constant("C_epsilon", dec(&self.c_measured))
            .constant("C_epsilon_cluster", dec(&self.c_cluster))
            .constant("C_prime_epsilon", dec(&self.c_z))
            .constant("C_tilde_epsilon", dec(&self.c_tilde))
            .constant("C_0", dec(&self.c_zero))
            .constant("samples", self.samples)
            .worst(json!({
                "x": [dec(&x.x), dec(&x.y)],
                "R": dec(big_r),
                "r": dec(r),
                "count": n,
            }))
    }
}

/// Largest ratio exponent sampled by the covering check.
pub const MAX_RATIO_EXPONENT: i64 = 40;

fn z_constant(epsilon: &Scalar) -> Result<Scalar> {
    let prec = epsilon.prec();
    let z = reference_set(ReferenceKind::Z, &Scalar::with_val(prec, 0), 64, false)?.points;
    let mut best = Scalar::with_val(prec, 0);
    for center in z.values() {
        for a in 0..=20 {
            let radius = scalar::pow2(-a, prec);
            for j in 1..=24 {
                let r = scalar::pow2(-a - j, prec);
                let n = metrics::cover_count_1d(&z, &r, Some((center, &radius)));
                let c = Scalar::with_val(prec, n) / ratio_power(j as i64, epsilon);
                if c > best {
                    best = c;
                }
            }
        }
    }
    Ok(best)
}

fn ratio_power(j: i64, epsilon: &Scalar) -> Scalar {
    let prec = epsilon.prec();
    Scalar::with_val(prec, epsilon * j).exp2()
}

fn c_zero(trunc: &Truncation) -> Scalar {
    let prec = trunc.prec;
    trunc
        .clusters
        .par_iter()
        .map(|cl| {
            let (v, _) = scale_fns(cl.g, prec);
            let perp = Direction::wrapped(Scalar::with_val(prec, cl.theta.theta() + scalar::pi(prec) / 2u32));
            let projected = metrics::project(&cl.points, &perp);
            let mut best = Scalar::with_val(prec, 1);
            for j in 0..=20 {
                let r = Scalar::with_val(prec, &v * &scalar::pow2(-j, prec));
                let planar = metrics::cover_count_2d(&cl.points, &r, None);
                let line = metrics::cover_count_1d(&projected, &r, None);
                let ratio = Scalar::with_val(prec, planar) / line;
                if ratio > best {
                    best = ratio;
                }
            }
            best
        })
        .collect::<Vec<_>>()
        .into_iter()
        .max_by(scalar::cmp)
        .unwrap_or_else(|| Scalar::with_val(prec, 1))
}

/// Samples `(x, R = 2^-a, r = 2^-(a+j))` with `x` drawn from the truncation,
/// `a` in `[-1, g_max + 4]`, `j` in `[1, 40]` and `r` above the finest
/// generated feature, and measures the covering constant at exponent
/// `epsilon` with the planar grid count.
pub fn check_global_covering(
    trunc: &Truncation,
    epsilon: &Scalar,
    samples: usize,
    seed: u64,
) -> Result<CoveringReport> {
    let prec = trunc.prec;
    let epsilon = Scalar::with_val(prec, epsilon);
    let points = trunc.all_points();
    let owner: Vec<Option<usize>> = std::iter::once(None)
        .chain(
            trunc
                .clusters
                .iter()
                .enumerate()
                .flat_map(|(i, cl)| std::iter::repeat_n(Some(i), cl.points.len())),
        )
        .collect();
    let index = PlanarIndex::new(points.clone());
    let cluster_index: Vec<PlanarIndex> = trunc
        .clusters
        .iter()
        .map(|cl| PlanarIndex::new(cl.points.clone()))
        .collect();
    let floor = trunc
        .finest_feature()
        .unwrap_or_else(|| Scalar::with_val(prec, 0));
    let a_max = trunc.g_max as i64 + 4;

    let measured: Vec<(Scalar, Scalar, usize, i64, i64, u64)> = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = sample_rng(seed, i);
            let xi = rng.gen_range(0..points.len());
            let a = rng.gen_range(-1..=a_max);
            let mut j = rng.gen_range(1..=MAX_RATIO_EXPONENT);
            while j > 1 && scalar::pow2(-(a + j) as i32, prec) < floor {
                j -= 1;
            }
            let radius = scalar::pow2(-a as i32, prec);
            let r = scalar::pow2(-(a + j) as i32, prec);
            let x = &points[xi];
            let n = index.cover_count(&r, Some((x, &radius)));
            let scale = ratio_power(j, &epsilon);
            let c = Scalar::with_val(prec, n) / &scale;
            let own = match owner[xi] {
                Some(ci) => cluster_index[ci].cover_count(&r, Some((x, &radius))),
                None => 1,
            };
            let c_own = Scalar::with_val(prec, own) / scale;
            (c, c_own, xi, a, j, n)
        })
        .collect();

    let mut worst = 0;
    let mut c_cluster = Scalar::with_val(prec, 0);
    for (i, m) in measured.iter().enumerate() {
        if m.0 > measured[worst].0 {
            worst = i;
        }
        if m.1 > c_cluster {
            c_cluster = m.1.clone();
        }
    }
    let (c_measured, wx, wa, wj, wn) = match measured.get(worst) {
        Some(m) => (m.0.clone(), points[m.2].clone(), m.3, m.4, m.5),
        None => (Scalar::with_val(prec, 0), trunc.origin(), 0, 1, 0),
    };
    let e = Scalar::with_val(prec, 1).exp();
    let c_tilde = Scalar::with_val(prec, &c_cluster / &epsilon) / e / scalar::ln2(prec);
    Ok(CoveringReport {
        c_measured,
        c_cluster,
        c_z: z_constant(&epsilon)?,
        c_tilde,
        c_zero: c_zero(trunc),
        samples,
        worst: (
            wx,
            scalar::pow2(-wa as i32, prec),
            scalar::pow2(-(wa + wj) as i32, prec),
            wn,
        ),
        seed,
        epsilon,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::{build_f, cluster, Selection};
    use crate::profile::Profile;
    use crate::scheduler::{pair_index, DirectionSequence, DEFAULT_SUBSAMPLE};

    const P: u32 = 512;

    fn q(num: i64, den: i64) -> Scalar {
        Scalar::with_val(P, num) / Scalar::with_val(P, den)
    }

    fn small_truncation(g_max: u64) -> Truncation {
        let profile = Profile::linear(P);
        let seq = DirectionSequence::through_block(&profile, 3, DEFAULT_SUBSAMPLE);
        build_f(&profile, &seq, &Selection::Schedule { g_max, depth_cap: Some(4) }, "").unwrap()
    }

    #[test]
    fn yydecay_examples() {
        assert!(check_yydecay(&q(1, 2), 6).unwrap().pass);
        let r = check_yydecay(&q(1, 2), 1).unwrap();
        assert!(r.pass);
        assert!(check_yydecay(&q(0, 1), 3).unwrap().pass);
        // negative control: a list that breaks the bound at index 2
        let (pass, index, _) = yydecay_worst(&[q(1, 2), q(1, 2)]);
        assert!(!pass);
        assert_eq!(index, 2);
    }

    #[test]
    fn bilipschitz_passes_and_detects_corruption() {
        let theta = Direction::new(q(6, 5)).unwrap();
        for n in 1..=4 {
            let cl = cluster(&theta, 2, n, pair_index(2, n), &q(1, 2)).unwrap();
            let r = check_bilipschitz(&cl);
            assert!(r.pass, "{}", r.to_json());
        }
        let mut cl = cluster(&theta, 2, 3, pair_index(2, 3), &q(1, 2)).unwrap();
        cl.points[5].x += q(1, 1000);
        cl.points[5].y += q(1, 1000);
        assert!(!check_bilipschitz(&cl).pass);
    }

    #[test]
    fn separation_two_clusters() {
        let t = small_truncation(2);
        let rep = check_separation(&t, &Direction::new(q(1, 1)).unwrap());
        assert_eq!(rep.rows.len(), 1);
        assert!(rep.pass());
        let c = rep.c.clone().unwrap();
        assert!(rep.rows[0].gap >= Scalar::with_val(P, &c / 4u32));
    }

    #[test]
    fn separation_negative_control() {
        let theta = Direction::new(q(1, 1)).unwrap();
        let a = PointSet1::new(vec![q(0, 1), q(1, 1)]);
        let b = PointSet1::new(vec![q(1, 2)]);
        let rep = separation_of(&theta, &[(1, a), (2, b)]);
        assert_eq!(rep.k, 2);
        assert!(!rep.pass());
    }

    #[test]
    fn bracket_examples() {
        let t = small_truncation(12);
        let r = check_radius_bracket(&t, 200, DEFAULT_SEED);
        assert!(r.pass, "{}", r.to_json());
        assert!(bracket_holds(-2, 1));
        assert!(!bracket_holds(3, 9));
        assert!(!bracket_holds(8, 4));
    }

    #[test]
    fn covering_monotone_in_epsilon() {
        let t = small_truncation(6);
        let lo = check_global_covering(&t, &q(35, 100), 200, 7).unwrap();
        let hi = check_global_covering(&t, &q(1, 1), 200, 7).unwrap();
        assert!(hi.c_measured <= lo.c_measured);
        assert!(lo.to_check(Some(&lo.c_measured)).pass);
        let tighter = Scalar::with_val(P, &lo.c_measured / 2u32);
        assert!(!lo.to_check(Some(&tighter)).pass);
    }
}
