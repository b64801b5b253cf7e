//! Projections, covering numbers and the Hausdorff distance for finite sets.

use std::collections::BTreeSet;

use rug::Integer;

use crate::error::{Error, Result};
use crate::profile::Direction;
use crate::scalar::{self, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub struct Point {
    pub x: Scalar,
    pub y: Scalar,
}

impl Point {
    pub fn new(x: Scalar, y: Scalar) -> Self {
        Self { x, y }
    }

    pub fn origin(prec: u32) -> Self {
        Self::new(Scalar::with_val(prec, 0), Scalar::with_val(prec, 0))
    }

    pub fn distance(&self, other: &Point) -> Scalar {
        let prec = self.x.prec().max(other.x.prec());
        let dx = Scalar::with_val(prec, &self.x - &other.x);
        let dy = Scalar::with_val(prec, &self.y - &other.y);
        dx.hypot(&dy)
    }
}

/// Strictly ascending list of scalars.
#[derive(Clone, Debug, PartialEq)]
pub struct PointSet1 {
    values: Vec<Scalar>,
}

impl PointSet1 {
    /// Sorts and merges exact duplicates.
    pub fn new(mut values: Vec<Scalar>) -> Self {
        scalar::sort_dedup(&mut values);
        Self { values }
    }

    pub fn values(&self) -> &[Scalar] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Scalar> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn min(&self) -> Option<&Scalar> {
        self.values.first()
    }

    pub fn max(&self) -> Option<&Scalar> {
        self.values.last()
    }

    pub fn diameter(&self) -> Option<Scalar> {
        let (lo, hi) = (self.min()?, self.max()?);
        Some(Scalar::with_val(hi.prec(), hi - lo))
    }

    /// Index range of the values in the closed interval `[x - radius, x + radius]`.
    pub fn window_range(&self, x: &Scalar, radius: &Scalar) -> std::ops::Range<usize> {
        let prec = x.prec().max(radius.prec());
        let lo = Scalar::with_val(prec, x - radius);
        let hi = Scalar::with_val(prec, x + radius);
        let start = self.values.partition_point(|v| *v < lo);
        let end = self.values.partition_point(|v| *v <= hi);
        start..end.max(start)
    }

    pub fn contains(&self, v: &Scalar) -> bool {
        self.values.binary_search_by(|p| scalar::cmp(p, v)).is_ok()
    }
}

/// Orthogonal projection onto the line at angle `theta`, as the coordinate
/// `x cos(theta) + y sin(theta)`.
pub fn project(points: &[Point], theta: &Direction) -> PointSet1 {
    let prec = theta.prec();
    let (sin, cos) = theta.theta().clone().sin_cos(Scalar::new(prec));
    let values = points
        .iter()
        .map(|p| {
            let mut v = Scalar::with_val(prec, &p.x * &cos);
            v += Scalar::with_val(prec, &p.y * &sin);
            v
        })
        .collect();
    PointSet1::new(values)
}

/// Greedy cover of a sorted slice by sets of diameter at most `r`.
///
/// A set of diameter at most `r` that is open in the line lies inside an
/// open interval of length `r`, so one set covers a run of points spanning
/// strictly less than `r`. Each group starts at the leftmost uncovered point
/// and absorbs everything below `start + r`.
pub fn greedy_count(values: &[Scalar], r: &Scalar) -> u64 {
    let mut count = 0;
    let mut i = 0;
    while i < values.len() {
        count += 1;
        let reach = Scalar::with_val(values[i].prec().max(r.prec()), &values[i] + r);
        i += values[i..].partition_point(|v| *v < reach);
    }
    count
}

/// Minimal number of diameter-`r` sets covering `p`, optionally restricted
/// to the closed ball `B(x, R)`.
pub fn cover_count_1d(p: &PointSet1, r: &Scalar, window: Option<(&Scalar, &Scalar)>) -> u64 {
    match window {
        None => greedy_count(p.values(), r),
        Some((x, radius)) => greedy_count(&p.values()[p.window_range(x, radius)], r),
    }
}

/// Occupied grid boxes of side `r / sqrt 2` anchored at the origin, after
/// restricting to the closed ball `B(center, R)`. Within a factor 9 of the
/// minimal cover by sets of diameter `r`.
pub fn cover_count_2d(points: &[Point], r: &Scalar, window: Option<(&Point, &Scalar)>) -> u64 {
    match window {
        None => grid_count(points.iter(), r),
        Some((c, radius)) => grid_count(points.iter().filter(|p| in_ball(p, c, radius)), r),
    }
}

/// Closed-ball membership, `|p - center| <= radius`.
pub fn in_ball(p: &Point, center: &Point, radius: &Scalar) -> bool {
    let prec = center.x.prec().max(radius.prec());
    let dx = Scalar::with_val(prec, &p.x - &center.x);
    let dy = Scalar::with_val(prec, &p.y - &center.y);
    dx.square() + dy.square() <= Scalar::with_val(prec, radius.square_ref())
}

/// Planar points sorted by `x` for fast closed-ball queries.
#[derive(Clone, Debug)]
pub struct PlanarIndex {
    points: Vec<Point>,
}

impl PlanarIndex {
    pub fn new(mut points: Vec<Point>) -> Self {
        points.sort_by(|p, q| scalar::cmp(&p.x, &q.x).then_with(|| scalar::cmp(&p.y, &q.y)));
        Self { points }
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Points of the closed ball `B(center, radius)`, in index order.
    pub fn ball(&self, center: &Point, radius: &Scalar) -> Vec<&Point> {
        let prec = center.x.prec().max(radius.prec());
        let lo = Scalar::with_val(prec, &center.x - radius);
        let hi = Scalar::with_val(prec, &center.x + radius);
        let start = self.points.partition_point(|p| p.x < lo);
        let end = self.points.partition_point(|p| p.x <= hi);
        self.points[start..end.max(start)]
            .iter()
            .filter(|p| in_ball(p, center, radius))
            .collect()
    }

    /// [`cover_count_2d`] using the index for the window restriction.
    pub fn cover_count(&self, r: &Scalar, window: Option<(&Point, &Scalar)>) -> u64 {
        match window {
            None => grid_count(self.points.iter(), r),
            Some((c, radius)) => grid_count(self.ball(c, radius).into_iter(), r),
        }
    }
}

fn grid_count<'a>(points: impl Iterator<Item = &'a Point>, r: &Scalar) -> u64 {
    let prec = r.prec();
    let side = Scalar::with_val(prec, r / Scalar::with_val(prec, 2).sqrt());
    points
        .map(|p| (box_index(&p.x, &side), box_index(&p.y, &side)))
        .collect::<BTreeSet<_>>()
        .len() as u64
}

fn box_index(v: &Scalar, side: &Scalar) -> Integer {
    let q = Scalar::with_val(v.prec().max(side.prec()), v / side).floor();
    q.to_integer().expect("finite coordinate")
}

/// Largest distance from a point of `a` to its nearest point of `b`.
fn directed(a: &[Scalar], b: &[Scalar]) -> Scalar {
    let prec = a[0].prec().max(b[0].prec());
    let mut worst = Scalar::with_val(prec, 0);
    let mut j = 0;
    for x in a {
        while j + 1 < b.len() && b[j + 1] <= *x {
            j += 1;
        }
        let mut best = Scalar::with_val(prec, x - &b[j]).abs();
        if j + 1 < b.len() {
            let right = Scalar::with_val(prec, &b[j + 1] - x).abs();
            if right < best {
                best = right;
            }
        }
        if best > worst {
            worst = best;
        }
    }
    worst
}

pub fn hausdorff(a: &PointSet1, b: &PointSet1) -> Result<Scalar> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySet("hausdorff operands"));
    }
    let ab = directed(a.values(), b.values());
    let ba = directed(b.values(), a.values());
    Ok(if ab > ba { ab } else { ba })
}

/// `x -> scale * x + offset`.
#[derive(Clone, Debug, PartialEq)]
pub struct SimilarityMap1 {
    pub scale: Scalar,
    pub offset: Scalar,
}

impl SimilarityMap1 {
    pub fn new(scale: Scalar, offset: Scalar) -> Result<Self> {
        if scale <= 0 {
            return Err(Error::Domain("similarity scale must be positive".into()));
        }
        Ok(Self { scale, offset })
    }

    pub fn apply_one(&self, x: &Scalar) -> Scalar {
        let mut v = Scalar::with_val(self.scale.prec(), x * &self.scale);
        v += &self.offset;
        v
    }

    pub fn apply(&self, p: &PointSet1) -> PointSet1 {
        PointSet1::new(p.values().iter().map(|x| self.apply_one(x)).collect())
    }

    pub fn inverse(&self) -> SimilarityMap1 {
        let prec = self.scale.prec();
        let scale = Scalar::with_val(prec, 1) / &self.scale;
        let offset = -Scalar::with_val(prec, &self.offset * &scale);
        SimilarityMap1 { scale, offset }
    }
}

pub fn apply_similarity(t: &SimilarityMap1, p: &PointSet1) -> PointSet1 {
    t.apply(p)
}

/// The map `x -> (x - min P) / diam P` and the image of `P`, which has
/// minimum exactly 0 and maximum exactly 1.
pub fn normalize(p: &PointSet1) -> Result<(SimilarityMap1, PointSet1)> {
    let diam = p.diameter().ok_or(Error::EmptySet("normalize"))?;
    if diam.is_zero() {
        return Err(Error::ZeroDiameter);
    }
    let prec = diam.prec();
    let lo = p.min().expect("non-empty");
    let scale = Scalar::with_val(prec, 1) / &diam;
    let offset = -Scalar::with_val(prec, lo / &diam);
    let values: Vec<Scalar> = p
        .values()
        .iter()
        .map(|x| Scalar::with_val(prec, x - lo) / &diam)
        .collect();
    Ok((SimilarityMap1 { scale, offset }, PointSet1::new(values)))
}
