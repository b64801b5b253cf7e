//! Reference sets and finite weak-tangent studies.
//!
//! A projected cluster, rescaled by the similarity that maps its convex
//! hull onto `[0, 1]`, is compared in the Hausdorff metric with the
//! normalized Cantor-like set `Y_n(c)` it was built from.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::construction::{self, Cluster, Truncation};
use crate::error::{Error, Result};
use crate::metrics::{self, PointSet1};
use crate::profile::{self, Direction, Profile};
use crate::scalar::{self, Scalar};
use crate::scheduler::{pair_index, DirectionSequence};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReferenceKind {
    Y,
    Z,
    E,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReferenceSet {
    pub kind: ReferenceKind,
    pub c: Scalar,
    pub depth: u64,
    pub normalized: bool,
    pub points: PointSet1,
}

/// `Y`: `y_set(c, depth)`; `Z`: `{0} u {2^-i : i <= depth}`; `E`: `e_set(c, depth)`.
/// With `normalized` the set is mapped affinely onto `[0, 1]`.
pub fn reference_set(kind: ReferenceKind, c: &Scalar, depth: u64, normalized: bool) -> Result<ReferenceSet> {
    if depth == 0 {
        return Err(Error::Domain("reference depth must be >= 1".into()));
    }
    let prec = c.prec();
    let raw = match kind {
        ReferenceKind::Y => construction::y_set(c, depth)?,
        ReferenceKind::E => construction::e_set(c, depth)?,
        ReferenceKind::Z => {
            let depth = i32::try_from(depth).map_err(|_| Error::Domain("Z depth too large".into()))?;
            let mut v: Vec<Scalar> = (1..=depth).map(|i| scalar::pow2(-i, prec)).collect();
            v.push(Scalar::with_val(prec, 0));
            v
        }
    };
    let mut points = PointSet1::new(raw);
    if normalized {
        points = metrics::normalize(&points)?.1;
    }
    Ok(ReferenceSet {
        kind,
        c: c.clone(),
        depth,
        normalized,
        points,
    })
}

/// Normalized projection of one cluster onto `theta`.
pub fn cluster_image(cl: &Cluster, theta: &Direction) -> Result<PointSet1> {
    let projected = metrics::project(&cl.points, theta);
    Ok(metrics::normalize(&projected)?.1)
}

/// Normalized projection of cluster `(k, n)` of `trunc` onto `theta`.
pub fn tangent_image(trunc: &Truncation, k: u64, n: u64, theta: &Direction) -> Result<PointSet1> {
    cluster_image(trunc.find(k, n)?, theta)
}

/// `1 + 2 ln(n) / n^(1/4)`.
pub fn ratio_bound(n: u64, prec: u32) -> Scalar {
    let n = Scalar::with_val(prec, n);
    let quarter = Scalar::with_val(prec, n.sqrt_ref()).sqrt();
    Scalar::with_val(prec, n.ln_ref()) * 2u32 / quarter + 1u32
}

fn diameter_ratio(cl: &Cluster, theta: &Direction) -> Result<Scalar> {
    let num = metrics::project(&cl.points, theta)
        .diameter()
        .ok_or(Error::EmptySet("cluster"))?;
    let den = metrics::project(&cl.points, &cl.theta)
        .diameter()
        .ok_or(Error::EmptySet("cluster"))?;
    if den.is_zero() {
        return Err(Error::ZeroDiameter);
    }
    Ok(num / den)
}

#[derive(Clone, Debug, PartialEq)]
pub struct StudyRow {
    pub k: u64,
    pub n_k: u64,
    pub g: u64,
    pub d_h: Option<Scalar>,
    pub ratio: Option<Scalar>,
    pub ratio_bound: Scalar,
    pub flags: Vec<String>,
}

/// For each `k` in `ks`, builds `F_k`, the depth-`k` cluster on the
/// approximating direction `theta_{n_k}`, and measures how far its
/// normalized projection onto `theta` is from the normalized `Y_k(c)`,
/// `c = contraction_of(phi(theta))`, and the diameter ratio
/// `|pi F_k| / |pi_{n_k} F_k|` against `1 + 2 ln(n_k) / n_k^(1/4)`.
/// Rows whose schedule index exceeds `g_cap` are flagged `skipped`.
pub fn convergence_study(
    profile: &Profile,
    seq: &DirectionSequence,
    theta: &Direction,
    ks: &[u64],
    g_cap: u64,
) -> Result<Vec<StudyRow>> {
    let prec = profile.prec();
    let max_k = ks.iter().copied().max().unwrap_or(0);
    let max_k = u32::try_from(max_k).map_err(|_| Error::Domain("k too large".into()))?;
    let approx = seq.approximants(profile, theta, max_k)?;
    let c = profile::contraction_of(&profile.eval(theta))?;

    let mut ks = ks.to_vec();
    ks.sort_unstable();
    ks.dedup();
    ks.par_iter()
        .map(|&k| {
            let Some(a) = approx.rows.get(k as usize - 1) else {
                return Ok(StudyRow {
                    k,
                    n_k: 0,
                    g: 0,
                    d_h: None,
                    ratio: None,
                    ratio_bound: Scalar::with_val(prec, 0),
                    flags: vec!["truncated".into()],
                });
            };
            let n_k = a.index as u64;
            let g = pair_index(n_k, k);
            let bound = ratio_bound(n_k, prec);
            if g > g_cap {
                return Ok(StudyRow {
                    k,
                    n_k,
                    g,
                    d_h: None,
                    ratio: None,
                    ratio_bound: bound,
                    flags: vec!["skipped".into()],
                });
            }
            let c_k = profile::contraction_of(&a.value)?;
            let cl = construction::cluster(&a.theta, n_k, k, g, &c_k)?;
            let image = cluster_image(&cl, theta)?;
            let reference = reference_set(ReferenceKind::Y, &c, k, true)?;
            let d_h = metrics::hausdorff(&image, &reference.points)?;
            let ratio = diameter_ratio(&cl, theta)?;
            let mut flags = Vec::new();
            if ratio < 1 || ratio > bound {
                flags.push("ratio-bound".into());
            }
            Ok(StudyRow {
                k,
                n_k,
                g,
                d_h: Some(d_h),
                ratio: Some(ratio),
                ratio_bound: bound,
                flags,
            })
        })
        .collect()
}

pub const STUDY_HEADER: &str = "k,n_k,g,dH,ratio,ratio_bound,flags";

pub fn study_csv(rows: &[StudyRow]) -> String {
    let d = |x: &Option<Scalar>| x.as_ref().map(|v| scalar::to_decimal(v, 30)).unwrap_or_default();
    let mut out = format!("{STUDY_HEADER}\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.k,
            r.n_k,
            r.g,
            d(&r.d_h),
            d(&r.ratio),
            scalar::to_decimal(&r.ratio_bound, 30),
            r.flags.join(";")
        );
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct OffsetRow {
    pub delta: Scalar,
    pub d_h: Scalar,
    /// `2 sin(delta) ln(g+1) / diam Y_n(c)`.
    pub d_h_bound: Scalar,
    pub ratio: Scalar,
    pub ratio_bound: Scalar,
    pub flags: Vec<String>,
}

/// Projects one cluster onto `theta_cluster + delta` for each offset and
/// compares the normalized image with the normalized `Y_n(c)`.
pub fn offset_study(cl: &Cluster, deltas: &[Scalar]) -> Result<Vec<OffsetRow>> {
    let prec = cl.prec();
    let raw = reference_set(ReferenceKind::Y, &cl.c, cl.n, false)?;
    let diam_y = raw.points.diameter().expect("non-empty");
    let reference = metrics::normalize(&raw.points)?.1;
    let log = Scalar::with_val(prec, cl.g + 1).ln();
    let bound = ratio_bound(cl.k, prec);
    deltas
        .par_iter()
        .map(|delta| {
            let delta = Scalar::with_val(prec, delta);
            let theta = Direction::wrapped(Scalar::with_val(prec, cl.theta.theta() + &delta));
            let image = cluster_image(cl, &theta)?;
            let d_h = metrics::hausdorff(&image, &reference)?;
            let sin = Scalar::with_val(prec, delta.sin_ref()).abs();
            let d_h_bound = sin * &log * 2u32 / &diam_y;
            let ratio = diameter_ratio(cl, &theta)?;
            let mut flags = Vec::new();
            if d_h > d_h_bound {
                flags.push("dH-bound".into());
            }
            if ratio < 1 || ratio > bound {
                flags.push("ratio-bound".into());
            }
            Ok(OffsetRow {
                delta,
                d_h,
                d_h_bound,
                ratio,
                ratio_bound: bound.clone(),
                flags,
            })
        })
        .collect()
}
