//! Groups of mutually compatible atom movements.
//!
//! A movement is described by two mappings: discretized source row → target row
//! and discretized source column → target column. A group stores these mappings
//! in two ordered maps. A new mapping `k → v` fits a map if `k` is already present
//! with value `v`, or if `k` is absent and `v` lies strictly between the values of
//! the predecessor and successor keys. Together this keeps every map strictly
//! increasing, which is exactly the non-crossing and preservation constraint on
//! AOD rows and columns.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use serde::Serialize;

use crate::arch::Point;

pub type AtomId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Movement {
    pub atom: AtomId,
    /// Dense (row, col) rank of the source among all moving atoms.
    pub src: (u32, u32),
    /// Target (row, col) in the transition's target grid frame.
    pub dst: (i64, i64),
    /// Travel distance in µm.
    pub dist: f64,
}

/// Strictly increasing map from discretized source coordinate to target coordinate,
/// kept as a sorted vector.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct MonotoneMap {
    entries: Vec<(u32, i64)>,
}

impl MonotoneMap {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, key: u32) -> Option<i64> {
        self.entries
            .binary_search_by_key(&key, |&(k, _)| k)
            .ok()
            .map(|i| self.entries[i].1)
    }

    /// Nearest entry with a key below `key`.
    pub fn predecessor(&self, key: u32) -> Option<(u32, i64)> {
        let i = self.entries.partition_point(|&(k, _)| k < key);
        i.checked_sub(1).map(|i| self.entries[i])
    }

    /// Nearest entry with a key above `key`.
    pub fn successor(&self, key: u32) -> Option<(u32, i64)> {
        let i = self.entries.partition_point(|&(k, _)| k <= key);
        self.entries.get(i).copied()
    }

    pub fn accepts(&self, key: u32, value: i64) -> bool {
        match self.entries.binary_search_by_key(&key, |&(k, _)| k) {
            Ok(i) => self.entries[i].1 == value,
            Err(i) => {
                let lower_ok = i == 0 || self.entries[i - 1].1 < value;
                let upper_ok = i == self.entries.len() || value < self.entries[i].1;
                lower_ok && upper_ok
            }
        }
    }

    /// Inserts a compatible mapping. Returns false (and leaves the map unchanged)
    /// if the mapping would break monotonicity.
    pub fn insert(&mut self, key: u32, value: i64) -> bool {
        match self.entries.binary_search_by_key(&key, |&(k, _)| k) {
            Ok(i) => self.entries[i].1 == value,
            Err(i) => {
                if !self.accepts(key, value) {
                    return false;
                }
                self.entries.insert(i, (key, value));
                true
            }
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, i64)> + '_ {
        self.entries.iter().copied()
    }

    /// Population standard deviation of `value − scale·key` over all entries.
    pub fn scaled_difference_sd(&self, scale: f64) -> f64 {
        let n = self.entries.len();
        if n < 2 {
            return 0.0;
        }
        let diffs = self.entries.iter().map(|&(k, v)| v as f64 - scale * f64::from(k));
        let mean = diffs.clone().sum::<f64>() / n as f64;
        let var = diffs.map(|d| (d - mean) * (d - mean)).sum::<f64>() / n as f64;
        var.sqrt()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct MovementGroup {
    pub rows: MonotoneMap,
    pub cols: MonotoneMap,
    pub members: Vec<Movement>,
    d_max: f64,
}

impl MovementGroup {
    pub fn is_compatible(&self, m: &Movement) -> bool {
        self.rows.accepts(m.src.0, m.dst.0) && self.cols.accepts(m.src.1, m.dst.1)
    }

    /// Adds `m` without checking compatibility.
    fn push(&mut self, m: Movement) {
        let ok = self.rows.insert(m.src.0, m.dst.0) & self.cols.insert(m.src.1, m.dst.1);
        debug_assert!(ok, "incompatible movement pushed into group");
        self.d_max = self.d_max.max(m.dist);
        self.members.push(m);
    }

    /// Maximum travel distance of any member; 0 for an empty group.
    pub fn d_max(&self) -> f64 {
        self.d_max
    }

    /// Standard deviation of the scaled key/value differences of the row and the
    /// column map, `(sd_row, sd_col)`.
    pub fn sd(&self, scale: (f64, f64)) -> (f64, f64) {
        (
            self.rows.scaled_difference_sd(scale.0),
            self.cols.scaled_difference_sd(scale.1),
        )
    }
}

/// Ordered groups, first-fit insertion. Groups are shared between clones until
/// modified, so cloning a set is cheap.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GroupSet {
    groups: Vec<Arc<MovementGroup>>,
}

impl GroupSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    pub fn groups(&self) -> impl Iterator<Item = &MovementGroup> {
        self.groups.iter().map(|g| g.as_ref())
    }

    pub fn group(&self, i: usize) -> &MovementGroup {
        &self.groups[i]
    }

    /// Inserts into the first compatible group, or opens a new one. Returns the
    /// index of the receiving group.
    pub fn insert(&mut self, m: Movement) -> usize {
        let idx = self
            .groups
            .iter()
            .position(|g| g.is_compatible(&m))
            .unwrap_or_else(|| {
                self.groups.push(Arc::new(MovementGroup::default()));
                self.groups.len() - 1
            });
        Arc::make_mut(&mut self.groups[idx]).push(m);
        idx
    }

    /// Routing cost proxy: sum over groups of √d_max (d_max in µm).
    pub fn cost(&self) -> f64 {
        self.groups().map(|g| g.d_max().sqrt()).sum()
    }

    pub fn max_sqrt_d_max(&self) -> f64 {
        self.groups().map(|g| g.d_max().sqrt()).fold(0.0, f64::max)
    }

    /// Σ over groups of `sd_row + sd_col`.
    pub fn sd_sum(&self, scale: (f64, f64)) -> f64 {
        self.groups()
            .map(|g| {
                let (r, c) = g.sd(scale);
                r + c
            })
            .sum()
    }

    pub fn into_groups(self) -> Vec<MovementGroup> {
        self.groups
            .into_iter()
            .map(|g| Arc::try_unwrap(g).unwrap_or_else(|g| (*g).clone()))
            .collect()
    }
}

impl Serialize for GroupSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.groups())
    }
}

/// Dense ranks of the source coordinates of the moving atoms. Equal coordinates
/// share a rank.
pub fn discretize(moving: &[(AtomId, Point)]) -> HashMap<AtomId, (u32, u32)> {
    let rank = |coord: fn(&Point) -> f64| -> BTreeMap<i64, u32> {
        let mut keys: Vec<i64> = moving
            .iter()
            .map(|(_, p)| crate::arch::quantize(coord(p)))
            .collect();
        keys.sort_unstable();
        keys.dedup();
        keys.into_iter().zip(0..).collect()
    };
    let rows = rank(|p| p.y);
    let cols = rank(|p| p.x);
    moving
        .iter()
        .map(|&(a, p)| {
            (
                a,
                (
                    rows[&crate::arch::quantize(p.y)],
                    cols[&crate::arch::quantize(p.x)],
                ),
            )
        })
        .collect()
}
