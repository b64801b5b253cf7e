//! Countable dense direction sequence with a convergence-rate guarantee,
//! and the pairing bijection that schedules clusters.
//!
//! Block `k` of the sequence is a cover of the graph of the profile by
//! sup-metric cells of side at most `1/k`: the angle range `(0, pi]` is cut
//! into `ceil(pi k)` equal columns and `[0, 1]` into `k` value bands. Each
//! occupied cell contributes one graph point, so any `theta` has an entry
//! of block `k` within `1/k` in both angle and value. Because the first
//! `k` blocks hold at most about `k^4` entries, the entry's index `n_k`
//! satisfies `distance <= n_k^(-1/4)`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::ops::Range;

use crate::error::{Error, Result};
use crate::profile::{Direction, Profile};
use crate::scalar::{self, Scalar};

pub const DEFAULT_SUBSAMPLE: u32 = 16;

#[derive(Clone, Debug)]
pub struct GraphCenter {
    pub theta: Direction,
    pub value: Scalar,
    pub column: u32,
    pub row: u32,
}

struct BlockGrid {
    columns: u32,
    width: Scalar,
    rows: u32,
}

impl BlockGrid {
    fn new(k: u32, prec: u32) -> Self {
        let pi = scalar::pi(prec);
        let columns = Scalar::with_val(prec, &pi * k)
            .ceil()
            .to_u32_saturating()
            .unwrap_or(1)
            .max(1);
        let width = pi / columns;
        Self {
            columns,
            width,
            rows: k,
        }
    }

    /// Columns are `(i w, (i+1) w]`.
    fn column_of(&self, theta: &Scalar) -> u32 {
        let q = Scalar::with_val(theta.prec(), theta / &self.width).ceil();
        let i = q.to_u32_saturating().unwrap_or(1).max(1) - 1;
        i.min(self.columns - 1)
    }

    /// Bands are `[j/k, (j+1)/k)`, the top band closed.
    fn row_of(&self, value: &Scalar) -> u32 {
        let q = Scalar::with_val(value.prec(), value * self.rows).floor();
        q.to_u32_saturating().unwrap_or(0).min(self.rows - 1)
    }
}

/// One graph point per occupied cell of the side-`1/k` grid.
///
/// Occupancy is detected from `subsample` equispaced angles per column plus
/// the column's right end and every critical point of the profile inside
/// it. Within a cell the representative is the detected angle nearest the
/// column center. Output is sorted by angle, then value.
pub fn graph_cover(profile: &Profile, k: u32, subsample: u32) -> Vec<GraphCenter> {
    assert!(k >= 1, "block index starts at 1");
    let prec = profile.prec();
    let grid = BlockGrid::new(k, prec);
    let critical = profile.critical_points(k);
    let subsample = subsample.max(1);

    let mut out = Vec::new();
    for col in 0..grid.columns {
        let lo = Scalar::with_val(prec, &grid.width * col);
        let hi = if col + 1 == grid.columns {
            scalar::pi(prec)
        } else {
            Scalar::with_val(prec, &grid.width * (col + 1))
        };
        let mid = Scalar::with_val(prec, &lo + &hi) / 2u32;

        let mut samples: Vec<Scalar> = (0..subsample)
            .map(|s| {
                let offset = Scalar::with_val(prec, &grid.width * (2 * s + 1)) / (2 * subsample);
                Scalar::with_val(prec, &lo + &offset)
            })
            .collect();
        samples.push(hi.clone());
        samples.extend(critical.iter().filter(|t| **t > lo && **t <= hi).cloned());
        scalar::sort_dedup(&mut samples);

        let mut best: BTreeMap<u32, (Scalar, Scalar, Scalar)> = BTreeMap::new();
        for t in samples {
            let dir = Direction::wrapped(t);
            let value = profile.eval(&dir);
            let row = grid.row_of(&value);
            let off_center = Scalar::with_val(prec, dir.theta() - &mid).abs();
            let better = match best.get(&row) {
                None => true,
                Some((d, _, _)) => off_center < *d,
            };
            if better {
                best.insert(row, (off_center, dir.into_inner(), value));
            }
        }
        let mut cells: Vec<GraphCenter> = best
            .into_iter()
            .map(|(row, (_, theta, value))| GraphCenter {
                theta: Direction::wrapped(theta),
                value,
                column: col,
                row,
            })
            .collect();
        cells.sort_by(|a, b| {
            a.theta
                .cmp_angle(&b.theta)
                .then_with(|| scalar::cmp(&a.value, &b.value))
        });
        out.extend(cells);
    }
    out
}

#[derive(Clone, Debug)]
pub struct SequenceEntry {
    /// 1-based position in the sequence.
    pub index: usize,
    pub theta: Direction,
    pub value: Scalar,
    pub block: u32,
    pub column: u32,
    pub row: u32,
}

#[derive(Clone, Debug)]
pub struct DirectionSequence {
    entries: Vec<SequenceEntry>,
    blocks: Vec<Range<usize>>,
    complete_blocks: u32,
    subsample: u32,
}

impl DirectionSequence {
    /// All entries of blocks `1..=blocks`.
    pub fn through_block(profile: &Profile, blocks: u32, subsample: u32) -> Self {
        let mut seq = Self {
            entries: Vec::new(),
            blocks: Vec::new(),
            complete_blocks: 0,
            subsample,
        };
        for k in 1..=blocks {
            seq.push_block(profile, k);
        }
        seq
    }

    fn push_block(&mut self, profile: &Profile, k: u32) {
        let start = self.entries.len();
        for c in graph_cover(profile, k, self.subsample) {
            self.entries.push(SequenceEntry {
                index: self.entries.len() + 1,
                theta: c.theta,
                value: c.value,
                block: k,
                column: c.column,
                row: c.row,
            });
        }
        self.blocks.push(start..self.entries.len());
        self.complete_blocks = k;
    }

    pub fn entries(&self) -> &[SequenceEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entry with 1-based index `n`.
    pub fn get(&self, n: usize) -> Option<&SequenceEntry> {
        n.checked_sub(1).and_then(|i| self.entries.get(i))
    }

    /// 0-based entry range of block `k`.
    pub fn block(&self, k: u32) -> Option<Range<usize>> {
        k.checked_sub(1)
            .and_then(|i| self.blocks.get(i as usize))
            .cloned()
    }

    pub fn block_count(&self) -> u32 {
        self.blocks.len() as u32
    }

    pub fn complete_blocks(&self) -> u32 {
        self.complete_blocks
    }

    pub fn subsample(&self) -> u32 {
        self.subsample
    }

    /// For each `k = 1..=max_k`, an entry within sup-distance `1/k` of the
    /// graph point over `theta`. An exact angular match among the first `k`
    /// blocks is preferred; otherwise the representative of the block-`k`
    /// cell containing `(theta, phi(theta))` is used.
    pub fn approximants(
        &self,
        profile: &Profile,
        theta: &Direction,
        max_k: u32,
    ) -> Result<Approximants> {
        let target = profile.eval(theta);
        let mut rows = Vec::new();
        let mut truncated = false;
        for k in 1..=max_k {
            if k > self.complete_blocks {
                truncated = true;
                break;
            }
            let block = self.block(k).expect("complete block has a range");
            let exact = self.entries[..block.end]
                .iter()
                .find(|e| e.theta.theta() == theta.theta());
            let entry = match exact {
                Some(e) => e,
                None => {
                    let grid = BlockGrid::new(k, profile.prec());
                    let column = grid.column_of(theta.theta());
                    let row = grid.row_of(&target);
                    self.entries[block]
                        .iter()
                        .find(|e| e.column == column && e.row == row)
                        .ok_or_else(|| Error::ApproximationFailure {
                            theta: scalar::to_decimal(theta.theta(), 20),
                            block: k,
                        })?
                }
            };
            let prec = profile.prec();
            rows.push(Approximant {
                k,
                index: entry.index,
                theta: entry.theta.clone(),
                value: entry.value.clone(),
                distance: entry.theta.distance(theta),
                value_error: Scalar::with_val(prec, &entry.value - &target).abs(),
            });
        }
        Ok(Approximants { rows, truncated })
    }

    /// `n,theta,value,block` with 30-digit decimals.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,theta,value,block\n");
        for e in &self.entries {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                e.index,
                scalar::to_decimal(e.theta.theta(), 30),
                scalar::to_decimal(&e.value, 30),
                e.block
            );
        }
        out
    }
}

/// First `count` entries of the concatenated graph covers.
pub fn enumerate_directions(profile: &Profile, count: usize, subsample: u32) -> DirectionSequence {
    let mut seq = DirectionSequence {
        entries: Vec::new(),
        blocks: Vec::new(),
        complete_blocks: 0,
        subsample,
    };
    let mut k = 1;
    while seq.entries.len() < count.max(1) {
        seq.push_block(profile, k);
        k += 1;
    }
    if seq.entries.len() > count.max(1) {
        seq.entries.truncate(count.max(1));
        let last = seq.blocks.last_mut().expect("at least one block");
        last.end = seq.entries.len();
        seq.complete_blocks -= 1;
    }
    seq
}

#[derive(Clone, Debug)]
pub struct Approximant {
    pub k: u32,
    pub index: usize,
    pub theta: Direction,
    pub value: Scalar,
    pub distance: Scalar,
    pub value_error: Scalar,
}

impl Approximant {
    /// `index^(-1/4)`, the admissible angular distance at this index.
    pub fn rate_bound(&self) -> Scalar {
        let prec = self.distance.prec();
        Scalar::with_val(prec, self.index).sqrt().sqrt().recip()
    }
}

#[derive(Clone, Debug)]
pub struct Approximants {
    pub rows: Vec<Approximant>,
    /// Set when the sequence ran out of complete blocks before `max_k`.
    pub truncated: bool,
}

/// Schedule index of the pair `(k, n)`.
///
/// Pairs with `max(k, n) = m` fill `((m-1)^2, m^2]` in lexicographic order,
/// so `n <= g <= max(k, n)^2`.
pub fn pair_index(k: u64, n: u64) -> u64 {
    assert!(k >= 1 && n >= 1, "pair components start at 1");
    let m = k.max(n);
    let base = (m - 1) * (m - 1);
    if k < m {
        base + k
    } else {
        base + (m - 1) + n
    }
}

/// Inverse of [`pair_index`].
pub fn unpair(g: u64) -> (u64, u64) {
    assert!(g >= 1, "schedule index starts at 1");
    let mut m = (g as f64).sqrt() as u64;
    while m * m < g {
        m += 1;
    }
    while m > 1 && (m - 1) * (m - 1) >= g {
        m -= 1;
    }
    let offset = g - (m - 1) * (m - 1);
    if offset < m {
        (offset, m)
    } else {
        (m, offset - (m - 1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::{make_profile, ProfileSpec};

    const P: u32 = 128;

    fn constant(v: f64) -> Profile {
        Profile::constant(Scalar::with_val(P, v)).unwrap()
    }

    #[test]
    fn pairing_examples() {
        assert_eq!(pair_index(1, 1), 1);
        assert_eq!(pair_index(1, 2), 2);
        assert_eq!(pair_index(2, 1), 3);
        assert_eq!(pair_index(2, 2), 4);
        let block3: Vec<u64> = [(1, 3), (2, 3), (3, 1), (3, 2), (3, 3)]
            .iter()
            .map(|&(k, n)| pair_index(k, n))
            .collect();
        assert_eq!(block3, vec![5, 6, 7, 8, 9]);
        assert_eq!(unpair(7), (3, 1));
    }

    #[test]
    fn pairing_block_enumeration_oracle() {
        // Independent oracle: list every pair with max = m in lexicographic
        // order and number them consecutively.
        let mut g = 0;
        for m in 1..=30u64 {
            let mut pairs = Vec::new();
            for k in 1..=m {
                for n in 1..=m {
                    if k.max(n) == m {
                        pairs.push((k, n));
                    }
                }
            }
            pairs.sort();
            for (k, n) in pairs {
                g += 1;
                assert_eq!(pair_index(k, n), g);
                assert_eq!(unpair(g), (k, n));
            }
        }
    }

    #[test]
    fn cover_constant_block_one() {
        let cover = graph_cover(&constant(0.5), 1, DEFAULT_SUBSAMPLE);
        // ceil(pi) = 4 columns, one occupied row each
        assert_eq!(cover.len(), 4);
        assert!(cover.iter().all(|c| c.value == 0.5));
    }

    #[test]
    fn cover_constant_block_two_spacing() {
        let cover = graph_cover(&constant(0.5), 2, DEFAULT_SUBSAMPLE);
        assert!(cover.iter().all(|c| c.value == 0.5));
        let width = scalar::pi(P) / 7u32;
        let min_gap = Scalar::with_val(P, &width / DEFAULT_SUBSAMPLE);
        for w in cover.windows(2) {
            assert!(w[0].theta.distance(&w[1].theta) >= min_gap);
        }
    }

    #[test]
    fn cover_staircase_finds_both_rows() {
        let spec = ProfileSpec::from_json(
            r#"{"type":"staircase","default":"0","pieces":[{"lo":"1","hi":"2","value":"0.9"}]}"#,
        )
        .unwrap();
        let p = make_profile(&spec, P).unwrap();
        let cover = graph_cover(&p, 2, 16);
        let high = scalar::parse_decimal("0.9", P).unwrap();
        assert!(cover.iter().any(|c| c.value == high));
        assert!(cover.iter().any(|c| c.value == 0));
        // exhaustive scan oracle: which rows meet each column
        let grid = BlockGrid::new(2, P);
        for c in &cover {
            assert_eq!(grid.column_of(c.theta.theta()), c.column);
            assert_eq!(grid.row_of(&c.value), c.row);
            assert_eq!(p.eval(&c.theta), c.value);
        }
    }

    #[test]
    fn enumerate_smallest_case() {
        let seq = enumerate_directions(&constant(0.0), 1, DEFAULT_SUBSAMPLE);
        assert_eq!(seq.len(), 1);
        let full = graph_cover(&constant(0.0), 1, DEFAULT_SUBSAMPLE);
        assert_eq!(seq.entries()[0].theta, full[0].theta);
        assert_eq!(seq.complete_blocks(), 0);
    }

    #[test]
    fn linear_sequence_counts_and_density() {
        let p = Profile::linear(P);
        let seq = enumerate_directions(&p, 100, DEFAULT_SUBSAMPLE);
        assert_eq!(seq.len(), 100);
        for k in 3..=seq.block_count() {
            let end = seq.block(k).unwrap().end as u64;
            assert!(end <= u64::from(k).pow(4), "block {k} ends at {end}");
        }
        let seq = DirectionSequence::through_block(&p, 7, DEFAULT_SUBSAMPLE);
        for k in 4..=7 {
            let len = seq.block(k).unwrap().len() as u64;
            assert!(len <= u64::from(k).pow(3), "block {k} holds {len}");
        }
        // every theta within 1 of some entry: scan a fine grid
        let pi = scalar::pi(P);
        for i in 1..=400u32 {
            let t = Direction::new(Scalar::with_val(P, &pi * i) / 400u32).unwrap();
            let nearest = seq
                .entries()
                .iter()
                .map(|e| e.theta.distance(&t))
                .min_by(scalar::cmp)
                .unwrap();
            assert!(nearest <= 1);
        }
    }

    #[test]
    fn approximant_exact_membership() {
        let p = Profile::linear(P);
        let seq = DirectionSequence::through_block(&p, 5, DEFAULT_SUBSAMPLE);
        let target = seq.entries()[7].theta.clone();
        let block = seq.entries()[7].block;
        let approx = seq.approximants(&p, &target, 5).unwrap();
        for row in approx.rows.iter().filter(|r| r.k >= block) {
            assert_eq!(row.index, 8);
            assert_eq!(row.distance, 0);
        }
    }

    #[test]
    fn approximant_constant_block_three() {
        let p = constant(0.4);
        let seq = DirectionSequence::through_block(&p, 3, DEFAULT_SUBSAMPLE);
        let theta = Direction::new(Scalar::with_val(P, 2.0)).unwrap();
        let approx = seq.approximants(&p, &theta, 3).unwrap();
        let row = &approx.rows[2];
        assert!(row.distance <= Scalar::with_val(P, 1) / 3u32);
        assert_eq!(row.value, 0.4);
        // nearest-entry scan in block 3 is at least as close
        let nearest = seq.entries()[seq.block(3).unwrap()]
            .iter()
            .map(|e| e.theta.distance(&theta))
            .min_by(scalar::cmp)
            .unwrap();
        assert!(nearest <= row.distance);
    }

    #[test]
    fn approximant_linear_rates() {
        let p = Profile::linear(P);
        let seq = DirectionSequence::through_block(&p, 5, DEFAULT_SUBSAMPLE);
        let theta = Direction::new(Scalar::with_val(P, 2.0)).unwrap();
        let approx = seq.approximants(&p, &theta, 5).unwrap();
        assert_eq!(approx.rows.len(), 5);
        assert!(!approx.truncated);
        for row in &approx.rows {
            assert!(row.distance <= row.rate_bound(), "k={}", row.k);
            assert!(row.value_error <= Scalar::with_val(P, 1) / row.k);
        }
    }

    #[test]
    fn approximants_report_truncation() {
        let p = Profile::linear(P);
        let seq = DirectionSequence::through_block(&p, 2, DEFAULT_SUBSAMPLE);
        let theta = Direction::new(Scalar::with_val(P, 1.0)).unwrap();
        let approx = seq.approximants(&p, &theta, 4).unwrap();
        assert_eq!(approx.rows.len(), 2);
        assert!(approx.truncated);
    }

    #[test]
    fn spiky_profile_reports_failure() {
        // A zero-radius bump is a usc spike the sampler cannot see unless it
        // is a critical point; drop it from the sequence to force a miss.
        let spec = ProfileSpec::from_json(
            r#"{"type":"sampled","default":"0","radius":"0","points":[{"theta":"1.0","value":"1"}]}"#,
        )
        .unwrap();
        let p = make_profile(&spec, P).unwrap();
        let flat = constant(0.0);
        let seq = DirectionSequence::through_block(&flat, 2, DEFAULT_SUBSAMPLE);
        let theta = Direction::new(Scalar::with_val(P, 1.0)).unwrap();
        let err = seq.approximants(&p, &theta, 2).unwrap_err();
        assert!(matches!(err, Error::ApproximationFailure { block: 2, .. }));
    }

    #[test]
    fn csv_export() {
        let seq = enumerate_directions(&Profile::linear(P), 5, DEFAULT_SUBSAMPLE);
        let csv = seq.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "n,theta,value,block");
        assert_eq!(lines.len(), 6);
        assert!(lines[1].starts_with("1,"));
    }
}
