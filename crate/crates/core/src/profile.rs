//! Dimension profiles on the space of lines through the origin.
//!
//! A line is stored as its angle `theta` in `(0, pi]`; the space is a circle
//! of circumference `pi` with the wrapped arc-length metric. Profiles are
//! upper semi-continuous functions into `[0, 1]`, built from four
//! constructive kinds so that usc is guaranteed by construction.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::scalar::{self, Scalar};

/// A line through the origin, identified with its angle in `(0, pi]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Direction(Scalar);

impl Direction {
    pub fn new(theta: Scalar) -> Result<Self> {
        let pi = scalar::pi(theta.prec());
        if theta <= 0 || theta > pi {
            return Err(Error::Domain(format!(
                "direction {} outside (0, pi]",
                scalar::to_decimal(&theta, 20)
            )));
        }
        Ok(Self(theta))
    }

    /// Maps any finite angle onto its representative in `(0, pi]`.
    pub fn wrapped(theta: Scalar) -> Self {
        let pi = scalar::pi(theta.prec());
        let mut t = theta;
        if t > pi || t <= 0 {
            let turns = Scalar::with_val(t.prec(), &t / &pi).floor();
            t -= turns * &pi;
            if t <= 0 {
                t += &pi;
            }
        }
        Self(t)
    }

    pub fn theta(&self) -> &Scalar {
        &self.0
    }

    pub fn into_inner(self) -> Scalar {
        self.0
    }

    pub fn prec(&self) -> u32 {
        self.0.prec()
    }

    /// Arc-length distance, `min(|a-b|, pi-|a-b|)`.
    pub fn distance(&self, other: &Direction) -> Scalar {
        let prec = self.prec().max(other.prec());
        let d = Scalar::with_val(prec, &self.0 - &other.0).abs();
        let pi = scalar::pi(prec);
        let wrap = Scalar::with_val(prec, &pi - &d);
        if wrap < d {
            wrap
        } else {
            d
        }
    }

    pub fn cmp_angle(&self, other: &Direction) -> Ordering {
        scalar::cmp(&self.0, &other.0)
    }
}

#[derive(Clone, Debug)]
pub struct Arc {
    pub lo: Scalar,
    pub hi: Scalar,
    pub value: Scalar,
}

impl Arc {
    fn contains(&self, theta: &Scalar) -> bool {
        &self.lo <= theta && theta <= &self.hi
    }
}

#[derive(Clone, Debug)]
pub struct Bump {
    pub center: Direction,
    pub value: Scalar,
}

#[derive(Clone, Debug)]
pub enum ProfileKind {
    Constant(Scalar),
    /// Closed arcs; overlaps resolve by maximum, `default` off every arc.
    Staircase { pieces: Vec<Arc>, default: Scalar },
    /// `theta / pi`.
    Linear,
    /// Upper envelope of closed balls of common `radius` around samples.
    Sampled {
        points: Vec<Bump>,
        radius: Scalar,
        default: Scalar,
    },
}

#[derive(Clone, Debug)]
pub struct Profile {
    kind: ProfileKind,
    prec: u32,
}

impl Profile {
    pub fn constant(value: Scalar) -> Result<Self> {
        check_unit(&value)?;
        let prec = value.prec();
        Ok(Self {
            kind: ProfileKind::Constant(value),
            prec,
        })
    }

    pub fn linear(prec: u32) -> Self {
        Self {
            kind: ProfileKind::Linear,
            prec,
        }
    }

    pub fn staircase(pieces: Vec<Arc>, default: Scalar) -> Result<Self> {
        check_unit(&default)?;
        let prec = default.prec();
        let pi = scalar::pi(prec);
        for arc in &pieces {
            check_unit(&arc.value)?;
            if arc.lo <= 0 || arc.hi > pi || arc.lo > arc.hi {
                return Err(Error::Domain(format!(
                    "arc [{}, {}] not inside (0, pi]",
                    scalar::to_decimal(&arc.lo, 12),
                    scalar::to_decimal(&arc.hi, 12)
                )));
            }
        }
        Ok(Self {
            kind: ProfileKind::Staircase { pieces, default },
            prec,
        })
    }

    pub fn sampled(points: Vec<Bump>, radius: Scalar, default: Scalar) -> Result<Self> {
        check_unit(&default)?;
        if radius < 0 {
            return Err(Error::Domain("sampled radius must be non-negative".into()));
        }
        for p in &points {
            check_unit(&p.value)?;
        }
        let prec = default.prec();
        Ok(Self {
            kind: ProfileKind::Sampled {
                points,
                radius,
                default,
            },
            prec,
        })
    }

    pub fn kind(&self) -> &ProfileKind {
        &self.kind
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn eval(&self, theta: &Direction) -> Scalar {
        let prec = self.prec;
        match &self.kind {
            ProfileKind::Constant(v) => v.clone(),
            ProfileKind::Linear => {
                let pi = scalar::pi(prec);
                Scalar::with_val(prec, theta.theta() / &pi)
            }
            ProfileKind::Staircase { pieces, default } => pieces
                .iter()
                .filter(|arc| arc.contains(theta.theta()))
                .map(|arc| &arc.value)
                .max_by(|a, b| scalar::cmp(a, b))
                .unwrap_or(default)
                .clone(),
            ProfileKind::Sampled {
                points,
                radius,
                default,
            } => points
                .iter()
                .filter(|b| &b.center.distance(theta) <= radius)
                .map(|b| &b.value)
                .max_by(|a, b| scalar::cmp(a, b))
                .unwrap_or(default)
                .clone(),
        }
    }

    /// Angles where the profile may change value or cross one of the
    /// `rows` equal value bands of `[0, 1]`. Sampling these alongside a
    /// regular grid makes band detection exact for every built-in kind.
    pub fn critical_points(&self, rows: u32) -> Vec<Scalar> {
        let prec = self.prec;
        let mut out = Vec::new();
        match &self.kind {
            ProfileKind::Constant(_) => {}
            ProfileKind::Linear => {
                let pi = scalar::pi(prec);
                for j in 1..=rows {
                    out.push(Scalar::with_val(prec, &pi * j) / rows);
                }
            }
            ProfileKind::Staircase { pieces, .. } => {
                for arc in pieces {
                    out.push(arc.lo.clone());
                    out.push(arc.hi.clone());
                }
            }
            ProfileKind::Sampled { points, radius, .. } => {
                for b in points {
                    out.push(ball_end(&b.center, radius, false));
                    out.push(ball_end(&b.center, radius, true));
                }
            }
        }
        scalar::sort_dedup(&mut out);
        out
    }
}

/// End of the closed ball around `center`, moved inwards by whole ulps
/// until rounding leaves it inside the ball.
fn ball_end(center: &Direction, radius: &Scalar, upper: bool) -> Scalar {
    let prec = center.prec();
    let mut raw = if upper {
        Scalar::with_val(prec, center.theta() + radius)
    } else {
        Scalar::with_val(prec, center.theta() - radius)
    };
    for _ in 0..64 {
        let end = Direction::wrapped(raw.clone());
        if &center.distance(&end) <= radius {
            return end.into_inner();
        }
        if upper {
            raw.next_down();
        } else {
            raw.next_up();
        }
    }
    Direction::wrapped(center.theta().clone()).into_inner()
}

fn check_unit(v: &Scalar) -> Result<()> {
    if *v < 0 || *v > 1 {
        return Err(Error::Domain(format!(
            "profile value {} outside [0, 1]",
            scalar::to_decimal(v, 12)
        )));
    }
    Ok(())
}

/// Contraction ratio whose two-map self-similar set has dimension `s`:
/// `c = 2^(-1/s)` for `s > 0`, and `c = 0` for `s = 0`.
pub fn contraction_of(s: &Scalar) -> Result<Scalar> {
    check_unit(s).map_err(|_| {
        Error::Domain(format!(
            "dimension {} outside [0, 1]",
            scalar::to_decimal(s, 12)
        ))
    })?;
    let prec = s.prec();
    if s.is_zero() {
        return Ok(Scalar::with_val(prec, 0));
    }
    let exponent = -Scalar::with_val(prec, 1) / s;
    Ok(exponent.exp2())
}

/// Inverse of [`contraction_of`]: `log 2 / log(1/c)`, and 0 for `c = 0`.
pub fn dimension_of(c: &Scalar) -> Result<Scalar> {
    let prec = c.prec();
    if c.is_zero() {
        return Ok(Scalar::with_val(prec, 0));
    }
    if *c < 0 || *c > 0.5 {
        return Err(Error::Domain(format!(
            "contraction {} outside (0, 1/2]",
            scalar::to_decimal(c, 12)
        )));
    }
    let log_inv = -Scalar::with_val(prec, c.ln_ref());
    Ok(scalar::ln2(prec) / log_inv)
}

/// Numerical upper semi-continuity audit.
///
/// Probes the grid `{i * grid_step}` together with the profile's critical
/// points. A probe `theta` is a violation when `eval(theta)` falls more than
/// `tol` below the value at `theta +- grid_step/1024`. Grid probes that close
/// to a critical point are dropped in favour of the critical point.
pub fn usc_audit(profile: &Profile, grid_step: &Scalar, tol: &Scalar) -> Vec<Scalar> {
    let prec = profile.prec();
    let pi = scalar::pi(prec);
    let step = Scalar::with_val(prec, grid_step);
    let eta = Scalar::with_val(prec, &step / 1024u32);

    let mut probes = Vec::new();
    let mut i: u64 = 1;
    loop {
        let t = Scalar::with_val(prec, &step * i);
        if t > pi {
            break;
        }
        probes.push(t);
        i += 1;
    }
    // Grid probes closer than eta to a critical point only see the
    // rounding of that boundary, so the critical point stands in for them.
    let critical = profile.critical_points(1);
    probes.retain(|t| {
        critical
            .iter()
            .all(|c| Scalar::with_val(prec, t - c).abs() > eta)
    });
    probes.extend(critical);
    scalar::sort_dedup(&mut probes);

    let mut violations: Vec<Scalar> = Vec::new();
    for t in probes {
        let here = profile.eval(&Direction::wrapped(t.clone()));
        let left = profile.eval(&Direction::wrapped(Scalar::with_val(prec, &t - &eta)));
        let right = profile.eval(&Direction::wrapped(Scalar::with_val(prec, &t + &eta)));
        let nearby = if left > right { left } else { right };
        let floor = Scalar::with_val(prec, &nearby - tol);
        if here < floor {
            let merged = violations
                .last()
                .is_some_and(|prev| Scalar::with_val(prec, &t - prev) <= eta);
            if !merged {
                violations.push(t);
            }
        }
    }
    violations
}

/// JSON profile configuration. Every number is a decimal string.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum ProfileSpec {
    Constant {
        value: String,
    },
    Staircase {
        default: String,
        pieces: Vec<PieceSpec>,
    },
    Linear,
    Sampled {
        default: String,
        radius: String,
        points: Vec<SampleSpec>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceSpec {
    pub lo: String,
    pub hi: String,
    pub value: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleSpec {
    pub theta: String,
    pub value: String,
}

impl ProfileSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("profile spec serializes")
    }

    /// SHA-256 of the canonical JSON form, lowercase hex.
    pub fn digest(&self) -> String {
        let hash = Sha256::digest(self.to_json().as_bytes());
        hash.iter().map(|b| format!("{b:02x}")).collect()
    }
}

pub fn make_profile(spec: &ProfileSpec, prec: u32) -> Result<Profile> {
    let num = |s: &str| scalar::parse_decimal(s, prec);
    match spec {
        ProfileSpec::Constant { value } => Profile::constant(num(value)?),
        ProfileSpec::Linear => Ok(Profile::linear(prec)),
        ProfileSpec::Staircase { default, pieces } => {
            let pieces = pieces
                .iter()
                .map(|p| {
                    Ok(Arc {
                        lo: num(&p.lo)?,
                        hi: num(&p.hi)?,
                        value: num(&p.value)?,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Profile::staircase(pieces, num(default)?)
        }
        ProfileSpec::Sampled {
            default,
            radius,
            points,
        } => {
            let points = points
                .iter()
                .map(|p| {
                    Ok(Bump {
                        center: Direction::new(num(&p.theta)?)?,
                        value: num(&p.value)?,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Profile::sampled(points, num(radius)?, num(default)?)
        }
    }
}
