//! Oracles and property bodies shared by the integration targets.
#![allow(dead_code)]

use assouad_forge::metrics::{self, Point, PointSet1};
use assouad_forge::profile::Direction;
use assouad_forge::scalar::{self, Scalar};
use assouad_forge::scheduler::{pair_index, unpair};

pub const P: u32 = 128;

/// `v * 2^-shift` at precision `P`.
pub fn dy(v: i64, shift: i32) -> Scalar {
    Scalar::with_val(P, v) * scalar::pow2(-shift, P)
}

pub fn set_of(values: &[i64]) -> PointSet1 {
    PointSet1::new(values.iter().map(|&v| Scalar::with_val(P, v)).collect())
}

/// Minimal number of groups of span `< r` covering the integers `values`,
/// by trying every way of cutting the sorted list into runs.
pub fn exhaustive_cover_1d(values: &[i64], r: i64) -> u64 {
    let mut v = values.to_vec();
    v.sort_unstable();
    v.dedup();
    if v.is_empty() {
        return 0;
    }
    let cuts = v.len() - 1;
    let mut best = u64::MAX;
    for mask in 0u32..(1 << cuts) {
        let mut groups = 1;
        let mut start = v[0];
        let mut ok = true;
        for (i, &x) in v.iter().enumerate().skip(1) {
            if mask & (1 << (i - 1)) != 0 {
                groups += 1;
                start = x;
            } else if x - start >= r {
                ok = false;
                break;
            }
        }
        if ok {
            best = best.min(groups);
        }
    }
    best
}

/// Minimal number of sets with all pairwise squared distances `< r2`
/// covering `points`, by enumerating set partitions.
pub fn exhaustive_cover_2d(points: &[(i64, i64)], r2: i64) -> u64 {
    fn d2(a: (i64, i64), b: (i64, i64)) -> i64 {
        (a.0 - b.0).pow(2) + (a.1 - b.1).pow(2)
    }
    fn go(points: &[(i64, i64)], r2: i64, i: usize, groups: &mut Vec<Vec<usize>>, best: &mut u64) {
        if groups.len() as u64 >= *best {
            return;
        }
        if i == points.len() {
            *best = groups.len() as u64;
            return;
        }
        for g in 0..groups.len() {
            if groups[g].iter().all(|&j| d2(points[i], points[j]) < r2) {
                groups[g].push(i);
                go(points, r2, i + 1, groups, best);
                groups[g].pop();
            }
        }
        groups.push(vec![i]);
        go(points, r2, i + 1, groups, best);
        groups.pop();
    }
    let mut pts = points.to_vec();
    pts.sort_unstable();
    pts.dedup();
    let mut best = u64::MAX;
    go(&pts, r2, 0, &mut Vec::new(), &mut best);
    if pts.is_empty() {
        0
    } else {
        best
    }
}

/// Hausdorff distance of two non-empty integer sets by direct search.
pub fn brute_hausdorff(a: &[i64], b: &[i64]) -> i64 {
    let directed = |a: &[i64], b: &[i64]| {
        a.iter()
            .map(|x| b.iter().map(|y| (x - y).abs()).min().unwrap())
            .max()
            .unwrap()
    };
    directed(a, b).max(directed(b, a))
}

pub fn greedy_matches_exhaustive(values: &[i64], r: i64) -> Result<(), String> {
    let set = set_of(values);
    let got = metrics::cover_count_1d(&set, &Scalar::with_val(P, r), None);
    let want = exhaustive_cover_1d(values, r);
    if got == want {
        Ok(())
    } else {
        Err(format!("{values:?} r={r}: greedy {got}, exhaustive {want}"))
    }
}

pub fn cover_monotone(values: &[i64], r1: i64, r2: i64) -> Result<(), String> {
    let (small, large) = (r1.min(r2), r1.max(r2));
    let set = set_of(values);
    let n_small = metrics::cover_count_1d(&set, &Scalar::with_val(P, small), None);
    let n_large = metrics::cover_count_1d(&set, &Scalar::with_val(P, large), None);
    if n_small >= n_large {
        Ok(())
    } else {
        Err(format!("{values:?}: N({small})={n_small} < N({large})={n_large}"))
    }
}

pub fn hausdorff_axioms(a: &[i64], b: &[i64], c: &[i64]) -> Result<(), String> {
    let d = |x: &[i64], y: &[i64]| metrics::hausdorff(&set_of(x), &set_of(y)).unwrap();
    let (ab, ba, bc, ac) = (d(a, b), d(b, a), d(b, c), d(a, c));
    if d(a, a) != 0 {
        return Err("d(A, A) != 0".into());
    }
    if ab != ba {
        return Err("not symmetric".into());
    }
    if ac > Scalar::with_val(P, &ab + &bc) {
        return Err("triangle inequality fails".into());
    }
    if ab != brute_hausdorff(a, b) {
        return Err(format!("{a:?} {b:?}: differs from direct search"));
    }
    let mut sa = a.to_vec();
    sa.sort_unstable();
    sa.dedup();
    let mut sb = b.to_vec();
    sb.sort_unstable();
    sb.dedup();
    if (ab == 0) != (sa == sb) {
        return Err("zero distance between distinct sets".into());
    }
    Ok(())
}

pub fn hex_round_trip(mantissa: i64, exp: i32, prec: u32) -> Result<(), String> {
    let x = Scalar::with_val(prec, mantissa) * scalar::pow2(exp, prec);
    let text = scalar::to_hex(&x);
    let back = scalar::parse_hex(&text, prec).map_err(|e| e.to_string())?;
    if back == x && back.is_sign_negative() == x.is_sign_negative() {
        Ok(())
    } else {
        Err(format!("{text} did not round-trip"))
    }
}

pub fn pairing_round_trip(k: u64, n: u64) -> Result<(), String> {
    let g = pair_index(k, n);
    if unpair(g) != (k, n) {
        return Err(format!("unpair(pair_index({k}, {n})) != ({k}, {n})"));
    }
    let m = k.max(n);
    if g < n || g > m * m {
        return Err(format!("g = {g} outside [{n}, {}]", m * m));
    }
    Ok(())
}

/// `|pi p - pi q| <= |p - q|` for every pair.
pub fn projection_lipschitz(points: &[(i64, i64)], theta_milli: u32) -> Result<(), String> {
    let theta = Direction::new(Scalar::with_val(P, theta_milli) / 1000u32).map_err(|e| e.to_string())?;
    let pts: Vec<Point> = points
        .iter()
        .map(|&(x, y)| Point::new(Scalar::with_val(P, x), Scalar::with_val(P, y)))
        .collect();
    let slack = scalar::pow2(-(P as i32) + 16, P);
    let along = |a: &Point| metrics::project(std::slice::from_ref(a), &theta).values()[0].clone();
    for p in &pts {
        for q in &pts {
            let gap = Scalar::with_val(P, along(p) - along(q)).abs();
            let dist = p.distance(q);
            if gap > Scalar::with_val(P, &dist * (Scalar::with_val(P, 1) + &slack)) + &slack {
                return Err(format!("projection stretches {p:?} {q:?}"));
            }
        }
    }
    Ok(())
}

/// Grid count is at least the minimal cover and at most nine times it.
pub fn grid_cover_within_nine(points: &[(i64, i64)], r: i64) -> Result<(), String> {
    let pts: Vec<Point> = points
        .iter()
        .map(|&(x, y)| Point::new(Scalar::with_val(P, x), Scalar::with_val(P, y)))
        .collect();
    let grid = metrics::cover_count_2d(&pts, &Scalar::with_val(P, r), None);
    let exact = exhaustive_cover_2d(points, r * r);
    if exact <= grid && grid <= 9 * exact {
        Ok(())
    } else {
        Err(format!("{points:?} r={r}: grid {grid}, minimal {exact}"))
    }
}
