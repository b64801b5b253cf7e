//! Text formats for truncations and 1-D point sets.
//!
//! Every coordinate is a lowercase hex-float, so a write/read cycle is
//! bit-exact. Lines starting with `#` carry metadata.
//!
//! ```text
//! # assouad-forge point set
//! # profile_sha256 <hex>
//! # g_max 4
//! # mantissa_bits 192
//! # depth 2
//! # schedule v=20^-i h=v/ln(i+1)
//! # origin
//! 0x0p+0 0x0p+0
//! # cluster k=1 n=1 g=1 c=0x1p-1 theta=0x1.9p+1 count=2
//! 0x1.2p-1 0x1.0p-2
//! ...
//! ```

use std::fmt::Write as _;

use crate::construction::{Cluster, Truncation, SCHEDULE};
use crate::error::{Error, Result};
use crate::metrics::{Point, PointSet1};
use crate::profile::Direction;
use crate::scalar::{self, Scalar};

pub const MAGIC: &str = "# assouad-forge point set";

pub fn write_truncation(t: &Truncation) -> String {
    let mut out = String::new();
    let digest = if t.profile_digest.is_empty() {
        "-"
    } else {
        &t.profile_digest
    };
    let _ = writeln!(out, "{MAGIC}");
    let _ = writeln!(out, "# profile_sha256 {digest}");
    let _ = writeln!(out, "# g_max {}", t.g_max);
    let _ = writeln!(out, "# mantissa_bits {}", t.prec);
    let _ = writeln!(out, "# depth {}", t.depth());
    let _ = writeln!(out, "# schedule {SCHEDULE}");
    let _ = writeln!(out, "# origin");
    let o = t.origin();
    let _ = writeln!(out, "{} {}", scalar::to_hex(&o.x), scalar::to_hex(&o.y));
    for c in &t.clusters {
        let _ = writeln!(
            out,
            "# cluster k={} n={} g={} c={} theta={} count={}",
            c.k,
            c.n,
            c.g,
            scalar::to_hex(&c.c),
            scalar::to_hex(c.theta.theta()),
            c.points.len()
        );
        for p in &c.points {
            let _ = writeln!(out, "{} {}", scalar::to_hex(&p.x), scalar::to_hex(&p.y));
        }
    }
    out
}

fn header_value<'a>(line: &'a str, key: &str) -> Option<&'a str> {
    line.strip_prefix('#')?
        .trim()
        .strip_prefix(key)?
        .strip_prefix(' ')
        .map(str::trim)
}

fn field<'a>(fields: &'a [&str], key: &str) -> Result<&'a str> {
    fields
        .iter()
        .find_map(|f| f.strip_prefix(key)?.strip_prefix('='))
        .ok_or_else(|| Error::Parse(format!("cluster header lacks {key}=")))
}

fn int_field(fields: &[&str], key: &str) -> Result<u64> {
    field(fields, key)?
        .parse()
        .map_err(|_| Error::Parse(format!("bad integer for {key}")))
}

fn parse_point(line: &str, prec: u32, lineno: usize) -> Result<Point> {
    let mut parts = line.split_whitespace();
    let (Some(x), Some(y), None) = (parts.next(), parts.next(), parts.next()) else {
        return Err(Error::Parse(format!("line {lineno}: expected `x y`")));
    };
    Ok(Point::new(scalar::parse_hex(x, prec)?, scalar::parse_hex(y, prec)?))
}

pub fn read_truncation(text: &str) -> Result<Truncation> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    match lines.next() {
        Some((_, MAGIC)) => {}
        _ => return Err(Error::Parse("missing point-set header".into())),
    }
    let mut prec = None;
    let mut g_max = None;
    let mut digest = String::new();
    let mut clusters: Vec<Cluster> = Vec::new();
    let mut expected: Vec<usize> = Vec::new();
    let mut saw_origin = false;
    let mut in_origin = false;

    for (lineno, line) in lines {
        if line.is_empty() {
            continue;
        }
        if let Some(v) = header_value(line, "profile_sha256") {
            digest = if v == "-" { String::new() } else { v.to_string() };
        } else if let Some(v) = header_value(line, "g_max") {
            g_max = Some(v.parse().map_err(|_| Error::Parse("bad g_max".into()))?);
        } else if let Some(v) = header_value(line, "mantissa_bits") {
            prec = Some(
                v.parse::<u32>()
                    .map_err(|_| Error::Parse("bad mantissa_bits".into()))?,
            );
        } else if line == "# origin" {
            in_origin = true;
        } else if let Some(rest) = line.strip_prefix("# cluster ") {
            in_origin = false;
            let prec = prec.ok_or_else(|| Error::Parse("mantissa_bits must precede data".into()))?;
            let fields: Vec<&str> = rest.split_whitespace().collect();
            let theta = scalar::parse_hex(field(&fields, "theta")?, prec)?;
            clusters.push(Cluster {
                k: int_field(&fields, "k")?,
                n: int_field(&fields, "n")?,
                g: int_field(&fields, "g")?,
                c: scalar::parse_hex(field(&fields, "c")?, prec)?,
                theta: Direction::new(theta)?,
                points: Vec::new(),
            });
            expected.push(int_field(&fields, "count")? as usize);
        } else if line.starts_with('#') {
            continue;
        } else {
            let prec = prec.ok_or_else(|| Error::Parse("mantissa_bits must precede data".into()))?;
            let p = parse_point(line, prec, lineno)?;
            if in_origin {
                if !p.x.is_zero() || !p.y.is_zero() || saw_origin {
                    return Err(Error::Parse(format!("line {lineno}: bad origin record")));
                }
                saw_origin = true;
            } else {
                clusters
                    .last_mut()
                    .ok_or_else(|| Error::Parse(format!("line {lineno}: point outside a cluster")))?
                    .points
                    .push(p);
            }
        }
    }
    if !saw_origin {
        return Err(Error::Parse("point set lacks the origin".into()));
    }
    for (c, want) in clusters.iter().zip(&expected) {
        if c.points.len() != *want {
            return Err(Error::Parse(format!(
                "cluster g={} declares {} points, holds {}",
                c.g,
                want,
                c.points.len()
            )));
        }
    }
    Ok(Truncation {
        clusters,
        prec: prec.ok_or_else(|| Error::Parse("missing mantissa_bits".into()))?,
        g_max: g_max.ok_or_else(|| Error::Parse("missing g_max".into()))?,
        profile_digest: digest,
    })
}

/// One hex-float per line under a `# mantissa_bits` header.
pub fn write_points1(p: &PointSet1, prec: u32) -> String {
    let mut out = format!("# mantissa_bits {prec}\n");
    for v in p.values() {
        let _ = writeln!(out, "{}", scalar::to_hex(v));
    }
    out
}

/// Reads a 1-D set. Without a `mantissa_bits` header the precision is the
/// smallest that holds every literal exactly.
pub fn read_points1(text: &str) -> Result<(PointSet1, u32)> {
    let mut prec = None;
    let mut literals = Vec::new();
    for line in text.lines().map(str::trim) {
        if line.is_empty() {
            continue;
        }
        if let Some(v) = header_value(line, "mantissa_bits") {
            prec = Some(
                v.parse::<u32>()
                    .map_err(|_| Error::Parse("bad mantissa_bits".into()))?,
            );
        } else if !line.starts_with('#') {
            literals.push(line);
        }
    }
    let prec = prec.unwrap_or_else(|| {
        let widest = literals.iter().map(|l| l.len()).max().unwrap_or(0) as u32;
        (4 * widest + 8).max(scalar::MIN_PRECISION)
    });
    let values = literals
        .into_iter()
        .map(|l| scalar::parse_hex(l, prec))
        .collect::<Result<Vec<Scalar>>>()?;
    Ok((PointSet1::new(values), prec))
}
