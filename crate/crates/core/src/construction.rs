//! Finite truncations of the planar set.
//!
//! Each cluster is a coupling of a Cantor-like set `Y_n(c)` (horizontal)
//! with the geometric sequence `Z_n` (vertical), stretched to an
//! `h(g) x v(g)` rectangle, rotated to its direction and placed on the
//! parabola at `(2^-g, 4^-g)`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::metrics::Point;
use crate::profile::{self, Direction, Profile};
use crate::scalar::{self, Scalar};
use crate::scheduler::{pair_index, unpair, DirectionSequence};

/// Deepest cluster this crate will generate; `2^(n+1)` points per cluster.
pub const MAX_DEPTH: u64 = 24;

/// Schedule tag written to point-set headers.
pub const SCHEDULE: &str = "v=20^-i h=v/ln(i+1)";

/// `2^n` points `sum b_j (1-c) c^(j-1)`, ascending.
pub fn e_set(c: &Scalar, n: u64) -> Result<Vec<Scalar>> {
    if c.is_zero() {
        return Err(Error::Degenerate("e_set needs c > 0".into()));
    }
    if *c < 0 || *c > 0.5 {
        return Err(Error::Domain(format!(
            "contraction {} outside (0, 1/2]",
            scalar::to_decimal(c, 12)
        )));
    }
    check_depth(n)?;
    let prec = c.prec();
    let one_minus = Scalar::with_val(prec, 1 - c);
    // Build from the last digit outwards so the first digit is the most
    // significant; each step doubles the list and keeps it sorted.
    let mut out = vec![Scalar::with_val(prec, 0)];
    for j in (1..=n).rev() {
        let step = scalar::powi(c, (j - 1) as i32) * &one_minus;
        let upper: Vec<Scalar> = out.iter().map(|x| Scalar::with_val(prec, &step + x)).collect();
        out.extend(upper);
    }
    if !scalar::is_strictly_ascending(&out) {
        return Err(Error::Precision {
            context: format!("e_set depth {n}"),
            bits: prec,
        });
    }
    Ok(out)
}

/// `{2^-i : i = 1..2^(n+1)-2}` ascending for `c > 0`; `{0, 1}` for `c = 0`.
pub fn z_set(n: u64, c: &Scalar) -> Result<Vec<Scalar>> {
    check_depth(n)?;
    let prec = c.prec();
    if c.is_zero() {
        return Ok(vec![Scalar::with_val(prec, 0), Scalar::with_val(prec, 1)]);
    }
    let len = (1i64 << (n + 1)) - 2;
    Ok((1..=len).rev().map(|i| scalar::pow2(-(i as i32), prec)).collect())
}

/// `Union_{m=1..n} 9^(-2^m) + 16^(-2^m) E_m(c)` ascending; `{0, 1/2}` for `c = 0`.
pub fn y_set(c: &Scalar, n: u64) -> Result<Vec<Scalar>> {
    check_depth(n)?;
    let prec = c.prec();
    if c.is_zero() {
        return Ok(vec![Scalar::with_val(prec, 0), scalar::pow2(-1, prec)]);
    }
    let mut out = Vec::with_capacity((1usize << (n + 1)) - 2);
    for m in (1..=n).rev() {
        let shift = scalar::int_pow(9, -(1i32 << m), prec);
        let scale = scalar::pow2(-(1i32 << (m + 2)), prec);
        for e in e_set(c, m)? {
            out.push(Scalar::with_val(prec, &e * &scale) + &shift);
        }
    }
    if !scalar::is_strictly_ascending(&out) {
        return Err(Error::Precision {
            context: format!("y_set depth {n}"),
            bits: prec,
        });
    }
    Ok(out)
}

/// Rank coupling of `y_set(c, n)` with `z_set(n, c)`.
pub fn f_prime(c: &Scalar, n: u64) -> Result<Vec<Point>> {
    let ys = y_set(c, n)?;
    let zs = z_set(n, c)?;
    debug_assert_eq!(ys.len(), zs.len());
    Ok(ys.into_iter().zip(zs).map(|(y, z)| Point::new(y, z)).collect())
}

/// `(v(i), h(i)) = (20^-i, 20^-i / ln(i+1))`.
pub fn scale_fns(i: u64, prec: u32) -> (Scalar, Scalar) {
    assert!(i >= 1, "scale index starts at 1");
    let v = scalar::int_pow(20, -(i as i32), prec);
    let log = Scalar::with_val(prec, i + 1).ln();
    let h = Scalar::with_val(prec, &v / &log);
    (v, h)
}

/// `(2^-g, 4^-g)`.
pub fn translation(g: u64, prec: u32) -> Point {
    Point::new(
        scalar::pow2(-(g as i32), prec),
        scalar::pow2(-2 * (g as i32), prec),
    )
}

fn check_depth(n: u64) -> Result<()> {
    if n == 0 || n > MAX_DEPTH {
        return Err(Error::Domain(format!("depth {n} outside 1..={MAX_DEPTH}")));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct Cluster {
    pub k: u64,
    pub n: u64,
    pub g: u64,
    pub c: Scalar,
    pub theta: Direction,
    pub points: Vec<Point>,
}

impl Cluster {
    pub fn prec(&self) -> u32 {
        self.theta.prec()
    }

    /// Smallest feature of the projected cluster along its own direction:
    /// `16^(-2^n) c^n h(g)` for `c > 0` and `h(g)/2` otherwise.
    pub fn finest_feature(&self) -> Scalar {
        let prec = self.prec();
        let (_, h) = scale_fns(self.g, prec);
        if self.c.is_zero() {
            return h / 2u32;
        }
        let mut f = scalar::pow2(-(1i32 << (self.n + 2)), prec);
        f *= scalar::powi(&self.c, self.n as i32);
        f * h
    }
}

/// `R_theta (h(g) y, v(g) z) + (2^-g, 4^-g)` over the coupling `F'_n`.
pub fn cluster(theta: &Direction, k: u64, n: u64, g: u64, c: &Scalar) -> Result<Cluster> {
    let prec = theta.prec();
    let c = Scalar::with_val(prec, c);
    let (v, h) = scale_fns(g, prec);
    let t = translation(g, prec);
    let (sin, cos) = theta.theta().clone().sin_cos(Scalar::new(prec));
    let points: Vec<Point> = f_prime(&c, n)?
        .into_iter()
        .map(|p| {
            let a = Scalar::with_val(prec, &p.x * &h);
            let b = Scalar::with_val(prec, &p.y * &v);
            let mut x = Scalar::with_val(prec, &a * &cos);
            x -= Scalar::with_val(prec, &b * &sin);
            x += &t.x;
            let mut y = Scalar::with_val(prec, &a * &sin);
            y += Scalar::with_val(prec, &b * &cos);
            y += &t.y;
            Point::new(x, y)
        })
        .collect();
    let mut sorted: Vec<&Point> = points.iter().collect();
    sorted.sort_by(|p, q| scalar::cmp(&p.x, &q.x).then_with(|| scalar::cmp(&p.y, &q.y)));
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Precision {
            context: format!("cluster k={k} n={n} g={g}"),
            bits: prec,
        });
    }
    Ok(Cluster {
        k,
        n,
        g,
        c,
        theta: theta.clone(),
        points,
    })
}

/// Which clusters a truncation holds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Selection {
    /// Every pair with schedule index `g <= g_max`, optionally dropping
    /// pairs deeper than `depth_cap`.
    Schedule { g_max: u64, depth_cap: Option<u64> },
    /// Exactly these `(k, n)` pairs.
    Pairs(Vec<(u64, u64)>),
}

impl Selection {
    /// `(k, n)` pairs in schedule order.
    pub fn pairs(&self) -> Vec<(u64, u64)> {
        let mut pairs = match self {
            Selection::Schedule { g_max, depth_cap } => (1..=*g_max)
                .map(unpair)
                .filter(|&(_, n)| depth_cap.is_none_or(|cap| n <= cap))
                .collect(),
            Selection::Pairs(pairs) => pairs.clone(),
        };
        pairs.sort_by_key(|&(k, n)| pair_index(k, n));
        pairs.dedup();
        pairs
    }

    pub fn max_direction(&self) -> u64 {
        self.pairs().iter().map(|p| p.0).max().unwrap_or(0)
    }

    pub fn max_depth(&self) -> u64 {
        self.pairs().iter().map(|p| p.1).max().unwrap_or(0)
    }
}

/// The origin together with a finite family of clusters.
#[derive(Clone, Debug, PartialEq)]
pub struct Truncation {
    pub clusters: Vec<Cluster>,
    pub prec: u32,
    pub g_max: u64,
    pub profile_digest: String,
}

impl Truncation {
    pub fn origin(&self) -> Point {
        Point::origin(self.prec)
    }

    pub fn depth(&self) -> u64 {
        self.clusters.iter().map(|c| c.n).max().unwrap_or(0)
    }

    pub fn point_count(&self) -> usize {
        1 + self.clusters.iter().map(|c| c.points.len()).sum::<usize>()
    }

    /// Origin first, then clusters in schedule order.
    pub fn all_points(&self) -> Vec<Point> {
        let mut out = Vec::with_capacity(self.point_count());
        out.push(self.origin());
        for c in &self.clusters {
            out.extend(c.points.iter().cloned());
        }
        out
    }

    pub fn find(&self, k: u64, n: u64) -> Result<&Cluster> {
        self.clusters
            .iter()
            .find(|c| c.k == k && c.n == n)
            .ok_or(Error::MissingCluster { k, n })
    }

    /// Smallest feature over every cluster, before projection.
    pub fn finest_feature(&self) -> Option<Scalar> {
        self.clusters
            .iter()
            .map(Cluster::finest_feature)
            .min_by(scalar::cmp)
    }
}

/// Builds the clusters chosen by `selection`, each using direction
/// `theta_k` from `seq` and contraction `contraction_of(phi(theta_k))`.
/// Clusters are generated in parallel and merged in schedule order.
pub fn build_f(
    profile: &Profile,
    seq: &DirectionSequence,
    selection: &Selection,
    digest: &str,
) -> Result<Truncation> {
    let prec = profile.prec();
    let pairs = selection.pairs();
    if pairs.is_empty() {
        return Err(Error::Domain("selection holds no clusters".into()));
    }
    for &(k, n) in &pairs {
        if k == 0 || n == 0 {
            return Err(Error::Domain(format!("pair ({k}, {n}) must be positive")));
        }
        check_depth(n)?;
        if seq.get(k as usize).is_none() {
            return Err(Error::Domain(format!(
                "direction sequence has {} entries, cluster needs k={k}",
                seq.len()
            )));
        }
    }
    let clusters = pairs
        .par_iter()
        .map(|&(k, n)| {
            let entry = seq.get(k as usize).expect("checked above");
            let theta = Direction::wrapped(Scalar::with_val(prec, entry.theta.theta()));
            let value = profile.eval(&theta);
            let c = profile::contraction_of(&value)?;
            cluster(&theta, k, n, pair_index(k, n), &c)
        })
        .collect::<Result<Vec<_>>>()?;
    let g_max = match selection {
        Selection::Schedule { g_max, .. } => *g_max,
        Selection::Pairs(_) => clusters.iter().map(|c| c.g).max().unwrap_or(0),
    };
    Ok(Truncation {
        clusters,
        prec,
        g_max,
        profile_digest: digest.to_string(),
    })
}
