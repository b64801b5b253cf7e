//! Windowed Assouad-type and box-counting estimates with deterministic
//! witnesses, and the per-direction sweep over a truncation.

use std::collections::HashMap;
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::construction::{scale_fns, Cluster, Truncation};
use crate::error::{Error, Result};
use crate::metrics::{self, PlanarIndex, Point, PointSet1};
use crate::profile::Direction;
use crate::scalar::{self, Scalar};

/// Above this many points the default center policy subsamples.
pub const MAX_CENTERS: usize = 1 << 14;

const CHUNK: usize = 256;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CenterPolicy {
    /// Every point is a center.
    All,
    /// Every `stride`-th point, starting with the first.
    Stride(usize),
    /// `All` up to [`MAX_CENTERS`] points, otherwise the stride that brings
    /// the count under it.
    Auto,
}

impl CenterPolicy {
    pub fn stride(&self, len: usize) -> usize {
        match *self {
            CenterPolicy::All => 1,
            CenterPolicy::Stride(s) => s.max(1),
            CenterPolicy::Auto => len.div_ceil(MAX_CENTERS).max(1),
        }
    }
}

/// Scale pairs `R = R0 b^-a`, `r = R b^-j` over anchors `R0`, radius
/// exponents `a` and ratio exponents `j >= 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct WindowSpec {
    pub base: Scalar,
    pub anchors: Vec<Scalar>,
    pub radius_exponents: Vec<i64>,
    pub ratio_exponents: Vec<u32>,
    pub centers: CenterPolicy,
    /// Windows with `r` below this are skipped and flagged.
    pub floor: Option<Scalar>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct WindowScale {
    pub anchor: usize,
    pub a: i64,
    pub j: u32,
    pub radius: Scalar,
    pub r: Scalar,
}

impl WindowSpec {
    pub fn with_base(base: Scalar, jmin: u32, jmax: u32) -> Result<Self> {
        let prec = base.prec();
        let spec = Self {
            base,
            anchors: vec![Scalar::with_val(prec, 1)],
            radius_exponents: vec![0],
            ratio_exponents: (jmin..=jmax).collect(),
            centers: CenterPolicy::Auto,
            floor: None,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn dyadic(jmin: u32, jmax: u32, prec: u32) -> Result<Self> {
        Self::with_base(Scalar::with_val(prec, 2), jmin, jmax)
    }

    /// `dyadic:<jmin>..<jmax>` or `base:<b>:<jmin>..<jmax>`, optionally
    /// followed by `@<amin>..<amax>` for the radius exponents.
    pub fn parse(text: &str, prec: u32) -> Result<Self> {
        let bad = || Error::Parse(format!("bad window {text:?}"));
        let (body, radii) = match text.split_once('@') {
            Some((b, r)) => (b, Some(r)),
            None => (text, None),
        };
        let range = |s: &str| -> Result<(i64, i64)> {
            let (lo, hi) = s.split_once("..").ok_or_else(bad)?;
            let lo = lo.trim().parse().map_err(|_| bad())?;
            let hi = hi.trim().parse().map_err(|_| bad())?;
            if lo > hi {
                return Err(bad());
            }
            Ok((lo, hi))
        };
        let (base, js) = if let Some(rest) = body.strip_prefix("dyadic:") {
            (Scalar::with_val(prec, 2), rest)
        } else if let Some(rest) = body.strip_prefix("base:") {
            let (b, js) = rest.split_once(':').ok_or_else(bad)?;
            (scalar::parse_decimal(b, prec)?, js)
        } else {
            return Err(bad());
        };
        let (jmin, jmax) = range(js)?;
        if jmin < 1 || jmax > i64::from(u32::MAX) {
            return Err(Error::Parse(format!("ratio exponents in {text:?} must be >= 1")));
        }
        let mut spec = Self::with_base(base, jmin as u32, jmax as u32)?;
        if let Some(r) = radii {
            let (amin, amax) = range(r)?;
            spec.radius_exponents = (amin..=amax).collect();
        }
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.base <= 1 {
            return Err(Error::Domain("window base must exceed 1".into()));
        }
        if self.anchors.is_empty() || self.radius_exponents.is_empty() || self.ratio_exponents.is_empty() {
            return Err(Error::EmptyWindow("window lists must be non-empty".into()));
        }
        if self.anchors.iter().any(|a| *a <= 0) {
            return Err(Error::Domain("window anchors must be positive".into()));
        }
        if self.ratio_exponents.contains(&0) {
            return Err(Error::Domain("ratio exponents must be >= 1".into()));
        }
        Ok(())
    }

    /// Every scale pair in `(anchor, a, j)` order.
    pub fn scales(&self) -> Vec<WindowScale> {
        let prec = self.base.prec();
        let mut out = Vec::new();
        for (anchor, r0) in self.anchors.iter().enumerate() {
            for &a in &self.radius_exponents {
                let shrink = scalar::powi(&self.base, -a as i32);
                let radius = Scalar::with_val(prec, r0 * &shrink);
                for &j in &self.ratio_exponents {
                    let ratio = scalar::powi(&self.base, -(j as i32));
                    let r = Scalar::with_val(prec, &radius * &ratio);
                    out.push(WindowScale {
                        anchor,
                        a,
                        j,
                        radius: radius.clone(),
                        r,
                    });
                }
            }
        }
        out
    }

    /// `ln N / (j ln b)`.
    pub fn exponent(&self, count: u64, j: u32) -> Scalar {
        let prec = self.base.prec();
        let num = Scalar::with_val(prec, count).ln();
        let den = Scalar::with_val(prec, self.base.ln_ref()) * j;
        num / den
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RowStatus {
    Counted,
    /// Every center saw at most one covering set.
    Trivial,
    BelowFloor,
}

#[derive(Clone, Debug, PartialEq)]
pub struct WindowRow {
    pub scale: WindowScale,
    pub count: u64,
    pub center_index: usize,
    pub exponent: Option<Scalar>,
    pub status: RowStatus,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Witness<C> {
    pub center: C,
    pub center_index: usize,
    pub radius: Scalar,
    pub r: Scalar,
    pub count: u64,
    pub j: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EstimateReport<C> {
    pub value: Scalar,
    pub witness: Option<Witness<C>>,
    pub table: Vec<WindowRow>,
    pub stride: usize,
    pub flags: Vec<String>,
}

/// Maximum count over the selected centers for one window, with the
/// smallest center index among maximizers.
fn best_center<F>(centers: &[usize], count: F) -> (u64, usize)
where
    F: Fn(usize, &mut HashMap<(usize, usize), u64>) -> u64 + Sync,
{
    centers
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut cache = HashMap::new();
            let mut best = (0u64, usize::MAX);
            for &c in chunk {
                let n = count(c, &mut cache);
                if n > best.0 {
                    best = (n, c);
                }
            }
            best
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold((0, usize::MAX), |acc, b| if b.0 > acc.0 { b } else { acc })
}

fn estimate_with<C: Clone, F>(
    len: usize,
    center: impl Fn(usize) -> C,
    w: &WindowSpec,
    count: F,
) -> Result<EstimateReport<C>>
where
    F: Fn(usize, &WindowScale, &mut HashMap<(usize, usize), u64>) -> u64 + Sync,
{
    w.validate()?;
    if len == 0 {
        return Err(Error::EmptySet("estimate input"));
    }
    let stride = w.centers.stride(len);
    let centers: Vec<usize> = (0..len).step_by(stride).collect();
    let scales = w.scales();

    let table: Vec<WindowRow> = scales
        .into_par_iter()
        .map(|scale| {
            if w.floor.as_ref().is_some_and(|f| scale.r < *f) {
                return WindowRow {
                    scale,
                    count: 0,
                    center_index: 0,
                    exponent: None,
                    status: RowStatus::BelowFloor,
                };
            }
            let (n, idx) = best_center(&centers, |c, cache| count(c, &scale, cache));
            let (exponent, status) = if n <= 1 {
                (None, RowStatus::Trivial)
            } else {
                (Some(w.exponent(n, scale.j)), RowStatus::Counted)
            };
            WindowRow {
                scale,
                count: n,
                center_index: if idx == usize::MAX { 0 } else { idx },
                exponent,
                status,
            }
        })
        .collect();

    let mut best: Option<&WindowRow> = None;
    for row in &table {
        if let Some(e) = &row.exponent {
            if best.is_none_or(|b| e > b.exponent.as_ref().expect("counted row")) {
                best = Some(row);
            }
        }
    }
    let prec = w.base.prec();
    let mut flags = Vec::new();
    if table.iter().any(|r| r.status == RowStatus::BelowFloor) {
        flags.push("below-floor".to_string());
    }
    if best.is_none_or(|b| b.count <= 2) {
        flags.push("degenerate-count".to_string());
    }
    if stride > 1 {
        flags.push(format!("stride={stride}"));
    }
    let (value, witness) = match best {
        None => (Scalar::with_val(prec, 0), None),
        Some(row) => (
            row.exponent.clone().expect("counted row"),
            Some(Witness {
                center: center(row.center_index),
                center_index: row.center_index,
                radius: row.scale.radius.clone(),
                r: row.scale.r.clone(),
                count: row.count,
                j: row.scale.j,
            }),
        ),
    };
    Ok(EstimateReport {
        value,
        witness,
        table,
        stride,
        flags,
    })
}

/// Max over centers and windows of `ln N_r(B(x,R) cap P) / (j ln b)`,
/// with exact 1-D covering numbers.
pub fn assouad_estimate_1d(p: &PointSet1, w: &WindowSpec) -> Result<EstimateReport<Scalar>> {
    let values = p.values();
    estimate_with(
        values.len(),
        |i| values[i].clone(),
        w,
        |i, scale, cache| {
            let range = p.window_range(&values[i], &scale.radius);
            *cache
                .entry((range.start, range.end))
                .or_insert_with(|| metrics::greedy_count(&values[range], &scale.r))
        },
    )
}

/// As [`assouad_estimate_1d`] with the grid surrogate for planar sets.
pub fn assouad_estimate_2d(p: &[Point], w: &WindowSpec) -> Result<EstimateReport<Point>> {
    let index = PlanarIndex::new(p.to_vec());
    let pts = index.points();
    estimate_with(
        pts.len(),
        |i| pts[i].clone(),
        w,
        |i, scale, _| index.cover_count(&scale.r, Some((&pts[i], &scale.radius))),
    )
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoxReport {
    pub slope: Scalar,
    pub counts: Vec<(Scalar, u64)>,
    /// All counts equal; the slope is reported as 0.
    pub degenerate: bool,
}

/// Least-squares slope of `ln N_r` against `ln(1/r)`.
pub fn box_slope(counts: Vec<(Scalar, u64)>) -> Result<BoxReport> {
    if counts.len() < 2 {
        return Err(Error::Domain("box estimate needs at least two scales".into()));
    }
    let prec = counts[0].0.prec();
    if counts.iter().all(|c| c.1 == counts[0].1) {
        return Ok(BoxReport {
            slope: Scalar::with_val(prec, 0),
            counts,
            degenerate: true,
        });
    }
    let xs: Vec<Scalar> = counts.iter().map(|(r, _)| -Scalar::with_val(prec, r.ln_ref())).collect();
    let ys: Vec<Scalar> = counts.iter().map(|(_, n)| Scalar::with_val(prec, *n).ln()).collect();
    let len = Scalar::with_val(prec, xs.len());
    let mean = |v: &[Scalar]| Scalar::with_val(prec, Scalar::sum(v.iter())) / &len;
    let (mx, my) = (mean(&xs), mean(&ys));
    let mut sxy = Scalar::with_val(prec, 0);
    let mut sxx = Scalar::with_val(prec, 0);
    for (x, y) in xs.iter().zip(&ys) {
        let dx = Scalar::with_val(prec, x - &mx);
        sxy += Scalar::with_val(prec, &dx * &Scalar::with_val(prec, y - &my));
        sxx += dx.square();
    }
    if sxx.is_zero() {
        return Err(Error::Degenerate("box estimate needs distinct scales".into()));
    }
    Ok(BoxReport {
        slope: sxy / sxx,
        counts,
        degenerate: false,
    })
}

pub fn box_estimate_1d(p: &PointSet1, scales: &[Scalar]) -> Result<BoxReport> {
    if p.is_empty() {
        return Err(Error::EmptySet("box estimate input"));
    }
    box_slope(
        scales
            .iter()
            .map(|r| (r.clone(), metrics::cover_count_1d(p, r, None)))
            .collect(),
    )
}

pub fn box_estimate_2d(p: &[Point], scales: &[Scalar]) -> Result<BoxReport> {
    if p.is_empty() {
        return Err(Error::EmptySet("box estimate input"));
    }
    box_slope(
        scales
            .iter()
            .map(|r| (r.clone(), metrics::cover_count_2d(p, r, None)))
            .collect(),
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scope {
    Cluster,
    Full,
}

impl Scope {
    pub fn as_str(&self) -> &'static str {
        match self {
            Scope::Cluster => "cluster",
            Scope::Full => "full",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub theta: Direction,
    pub scope: Scope,
    pub estimate: Scalar,
    /// Cluster rows only: `(k, n, g, c)` of the cluster probed.
    pub cluster: Option<(u64, u64, u64, Scalar)>,
    pub witness: Option<Witness<Scalar>>,
    pub flags: Vec<String>,
}

/// Generated cluster whose direction is nearest `theta`; ties go to the
/// deeper cluster, then the smaller schedule index.
pub fn nearest_cluster<'a>(trunc: &'a Truncation, theta: &Direction) -> Option<&'a Cluster> {
    trunc.clusters.iter().min_by(|a, b| {
        scalar::cmp(&a.theta.distance(theta), &b.theta.distance(theta))
            .then_with(|| b.n.cmp(&a.n))
            .then_with(|| a.g.cmp(&b.g))
    })
}

/// Window for probing one cluster's normalized projection of diameter
/// `diam`: base `1/c`, and one anchor per Cantor piece
/// `16^(-2^m) h(g) / diam` so that each piece fills its own windows. Both
/// anchors and floor are shrunk by `1 - c^n / 2`, which keeps every ratio
/// strictly between a cylinder's span and its distance to the next one.
pub fn cluster_window(cl: &Cluster, diam: &Scalar, w: &WindowSpec) -> WindowSpec {
    let prec = cl.prec();
    let mut spec = w.clone();
    if cl.c.is_zero() {
        spec.base = Scalar::with_val(prec, 2);
        spec.anchors = vec![Scalar::with_val(prec, 1)];
        spec.floor = None;
        return spec;
    }
    let (_, h) = scale_fns(cl.g, prec);
    let margin = Scalar::with_val(prec, 1) - scalar::powi(&cl.c, cl.n as i32) / 2u32;
    let unit = Scalar::with_val(prec, &h * &margin) / diam;
    spec.base = Scalar::with_val(prec, 1) / &cl.c;
    spec.anchors = (1..=cl.n)
        .map(|m| Scalar::with_val(prec, &unit * &scalar::pow2(-(1i32 << (m + 2)), prec)))
        .collect();
    let slack = Scalar::with_val(prec, 1) - scalar::pow2(-32, prec);
    let floor = cl.finest_feature() * margin / diam * slack;
    spec.floor = Some(floor);
    spec
}

/// For each direction, the cluster-scope estimate on the nearest cluster's
/// normalized projection and the full-scope estimate on the normalized
/// projection of the whole truncation.
pub fn sweep(trunc: &Truncation, thetas: &[Direction], w: &WindowSpec) -> Result<Vec<SweepRow>> {
    if trunc.clusters.is_empty() {
        return Err(Error::EmptySet("truncation"));
    }
    w.validate()?;
    let all = trunc.all_points();
    let features: Vec<Scalar> = trunc.clusters.iter().map(Cluster::finest_feature).collect();
    let finest = features.into_iter().min_by(scalar::cmp).expect("non-empty");
    let mut rows = Vec::with_capacity(2 * thetas.len());
    for theta in thetas {
        let theta = Direction::wrapped(Scalar::with_val(trunc.prec, theta.theta()));
        let cl = nearest_cluster(trunc, &theta).expect("non-empty");
        let projected = metrics::project(&cl.points, &theta);
        let diam = projected.diameter().expect("cluster has points");
        let mut flags = Vec::new();
        let estimate = if diam.is_zero() {
            flags.push("zero-diameter".to_string());
            None
        } else {
            let (_, image) = metrics::normalize(&projected)?;
            let spec = cluster_window(cl, &diam, w);
            Some(assouad_estimate_1d(&image, &spec)?)
        };
        rows.push(row_from(&theta, Scope::Cluster, Some(cl), estimate, flags, trunc.prec));

        let projected = metrics::project(&all, &theta);
        let diam = projected.diameter().expect("origin present");
        let mut flags = Vec::new();
        let estimate = if diam.is_zero() {
            flags.push("zero-diameter".to_string());
            None
        } else {
            let (_, image) = metrics::normalize(&projected)?;
            let mut spec = w.clone();
            spec.anchors = vec![Scalar::with_val(trunc.prec, 1)];
            spec.floor = Some(Scalar::with_val(trunc.prec, &finest / &diam));
            Some(assouad_estimate_1d(&image, &spec)?)
        };
        rows.push(row_from(&theta, Scope::Full, None, estimate, flags, trunc.prec));
    }
    Ok(rows)
}

fn row_from(
    theta: &Direction,
    scope: Scope,
    cl: Option<&Cluster>,
    report: Option<EstimateReport<Scalar>>,
    mut flags: Vec<String>,
    prec: u32,
) -> SweepRow {
    let (estimate, witness) = match report {
        Some(r) => {
            flags.extend(r.flags);
            (r.value, r.witness)
        }
        None => (Scalar::with_val(prec, 0), None),
    };
    SweepRow {
        theta: theta.clone(),
        scope,
        estimate,
        cluster: cl.map(|c| (c.k, c.n, c.g, c.c.clone())),
        witness,
        flags,
    }
}

pub const SWEEP_HEADER: &str =
    "theta,scope,estimate,k,n,g,c,witness_x,witness_R,witness_r,witness_count,flags";

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let d = |x: &Scalar| scalar::to_decimal(x, 30);
    let mut out = format!("{SWEEP_HEADER}\n");
    for row in rows {
        let (k, n, g, c) = match &row.cluster {
            Some((k, n, g, c)) => (k.to_string(), n.to_string(), g.to_string(), d(c)),
            None => Default::default(),
        };
        let (wx, wr_big, wr, wc) = match &row.witness {
            Some(w) => (d(&w.center), d(&w.radius), d(&w.r), w.count.to_string()),
            None => Default::default(),
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            d(row.theta.theta()),
            row.scope.as_str(),
            d(&row.estimate),
            k,
            n,
            g,
            c,
            wx,
            wr_big,
            wr,
            wc,
            row.flags.join(";")
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::e_set;

    const P: u32 = 128;

    fn q(num: i64, den: i64) -> Scalar {
        Scalar::with_val(P, num) / Scalar::with_val(P, den)
    }

    fn close(a: &Scalar, b: &Scalar, tol: f64) -> bool {
        Scalar::with_val(P, a - b).abs() < tol
    }

    #[test]
    fn window_parsing() {
        let w = WindowSpec::parse("dyadic:1..16", P).unwrap();
        assert_eq!(w.ratio_exponents.len(), 16);
        assert_eq!(w.base, 2);
        let w = WindowSpec::parse("base:3:2..5@0..2", P).unwrap();
        assert_eq!(w.base, 3);
        assert_eq!(w.ratio_exponents, vec![2, 3, 4, 5]);
        assert_eq!(w.radius_exponents, vec![0, 1, 2]);
        for bad in ["dyadic:0..3", "dyadic:3..1", "base:1:1..2", "cube:1..2", "dyadic:1-2"] {
            assert!(WindowSpec::parse(bad, P).is_err(), "{bad}");
        }
    }

    #[test]
    fn ternary_cantor_exact() {
        let third = q(1, 3);
        let p = PointSet1::new(e_set(&third, 10).unwrap());
        let w = WindowSpec::with_base(Scalar::with_val(P, 3), 1, 10).unwrap();
        let rep = assouad_estimate_1d(&p, &w).unwrap();
        let want = scalar::ln2(P) / Scalar::with_val(P, 3).ln();
        assert!(close(&rep.value, &want, 1e-30));
        for row in &rep.table {
            assert_eq!(row.count, 1 << row.scale.j);
        }
    }

    #[test]
    fn two_points() {
        let p = PointSet1::new(vec![q(0, 1), q(1, 1)]);
        let w = WindowSpec::dyadic(1, 6, P).unwrap();
        let rep = assouad_estimate_1d(&p, &w).unwrap();
        assert_eq!(rep.value, 1);
        assert_eq!(rep.witness.as_ref().unwrap().j, 1);
        assert!(rep.flags.contains(&"degenerate-count".to_string()));
    }

    #[test]
    fn witness_reproduces_count() {
        let p = PointSet1::new(e_set(&q(1, 4), 6).unwrap());
        let w = WindowSpec::parse("dyadic:1..8@0..2", P).unwrap();
        let rep = assouad_estimate_1d(&p, &w).unwrap();
        let wit = rep.witness.unwrap();
        assert_eq!(
            metrics::cover_count_1d(&p, &wit.r, Some((&wit.center, &wit.radius))),
            wit.count
        );
    }

    #[test]
    fn single_point_is_degenerate() {
        let p = PointSet1::new(vec![q(1, 3)]);
        let rep = assouad_estimate_1d(&p, &WindowSpec::dyadic(1, 4, P).unwrap()).unwrap();
        assert_eq!(rep.value, 0);
        assert!(rep.witness.is_none());
        let b = box_estimate_1d(&p, &[q(1, 2), q(1, 4)]).unwrap();
        assert!(b.degenerate);
        assert_eq!(b.slope, 0);
    }

    #[test]
    fn box_dyadic_and_ternary() {
        let p = PointSet1::new(e_set(&q(1, 2), 8).unwrap());
        let scales: Vec<Scalar> = (1..=8).map(|j| scalar::pow2(-j, P)).collect();
        let b = box_estimate_1d(&p, &scales).unwrap();
        assert!(close(&b.slope, &q(1, 1), 1e-9));
        let p = PointSet1::new(e_set(&q(1, 3), 8).unwrap());
        let scales: Vec<Scalar> = (1..=8).map(|j| scalar::int_pow(3, -j, P)).collect();
        let b = box_estimate_1d(&p, &scales).unwrap();
        let want = scalar::ln2(P) / Scalar::with_val(P, 3).ln();
        assert!(close(&b.slope, &want, 1e-9));
    }

    #[test]
    fn planar_estimate_on_segment_grid() {
        let pts: Vec<Point> = (0..64).map(|i| Point::new(q(i, 64), q(0, 1))).collect();
        let w = WindowSpec::dyadic(1, 4, P).unwrap();
        let rep = assouad_estimate_2d(&pts, &w).unwrap();
        assert!(rep.value > 0.5 && rep.value <= 1.6);
    }
}
