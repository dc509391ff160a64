//! Zoned architecture geometry.
//!
//! An architecture is a set of axis-aligned trap grids in a continuous µm plane.
//! Storage zones hold one trap per grid site. Entanglement zones hold a pair of
//! traps per site, split by `pair_offset` along the column (x) axis; the two atoms
//! of a pair interact under the global Rydberg pulse.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_ACCELERATION: f64 = 2750.0;
pub const DEFAULT_TRAP_TRANSFER_TIME_US: f64 = 15.0;

/// Positions are compared at nanometre resolution.
const POSITION_QUANTUM_UM: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn midpoint(self, other: Point) -> Point {
        Point::new((self.x + other.x) / 2.0, (self.y + other.y) / 2.0)
    }

    /// Integer key for exact comparisons and hashing.
    pub fn key(self) -> PosKey {
        PosKey(quantize(self.x), quantize(self.y))
    }
}

impl From<[f64; 2]> for Point {
    fn from([x, y]: [f64; 2]) -> Self {
        Point::new(x, y)
    }
}

impl From<Point> for [f64; 2] {
    fn from(p: Point) -> Self {
        [p.x, p.y]
    }
}

/// A position quantized to nanometres: `(x, y)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PosKey(pub i64, pub i64);

pub(crate) fn quantize(v: f64) -> i64 {
    (v / POSITION_QUANTUM_UM).round() as i64
}

pub type ZoneId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZoneKind {
    Storage,
    Entanglement,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Slot {
    Single,
    PairLeft,
    PairRight,
}

impl Slot {
    /// The other trap of an entanglement pair.
    pub fn partner(self) -> Option<Slot> {
        match self {
            Slot::Single => None,
            Slot::PairLeft => Some(Slot::PairRight),
            Slot::PairRight => Some(Slot::PairLeft),
        }
    }

    fn index(self) -> usize {
        match self {
            Slot::Single | Slot::PairLeft => 0,
            Slot::PairRight => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Zone {
    pub id: String,
    pub kind: ZoneKind,
    pub origin: Point,
    pub rows: u32,
    pub cols: u32,
    pub row_pitch: f64,
    pub col_pitch: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pair_offset: Option<f64>,
}

impl Zone {
    pub fn slots_per_site(&self) -> usize {
        match self.kind {
            ZoneKind::Storage => 1,
            ZoneKind::Entanglement => 2,
        }
    }

    pub fn site_count(&self) -> usize {
        self.rows as usize * self.cols as usize
    }

    pub fn trap_count(&self) -> usize {
        self.site_count() * self.slots_per_site()
    }

    /// Number of distinct trap columns (pair slots count separately).
    pub fn trap_columns(&self) -> u32 {
        self.cols * self.slots_per_site() as u32
    }

    /// Centre of a grid site; for entanglement zones the midpoint of the pair.
    pub fn site_center(&self, row: u32, col: u32) -> Point {
        Point::new(
            self.origin.x + f64::from(col) * self.col_pitch,
            self.origin.y + f64::from(row) * self.row_pitch,
        )
    }

    pub fn slot_position(&self, row: u32, col: u32, slot: Slot) -> Point {
        let c = self.site_center(row, col);
        let half = self.pair_offset.unwrap_or(0.0) / 2.0;
        match slot {
            Slot::Single => c,
            Slot::PairLeft => Point::new(c.x - half, c.y),
            Slot::PairRight => Point::new(c.x + half, c.y),
        }
    }

    /// Grid site closest to `p`.
    pub fn nearest_site(&self, p: Point) -> (u32, u32) {
        let clamp = |v: f64, n: u32| -> u32 { v.round().clamp(0.0, f64::from(n - 1)) as u32 };
        (
            clamp((p.y - self.origin.y) / self.row_pitch, self.rows),
            clamp((p.x - self.origin.x) / self.col_pitch, self.cols),
        )
    }

    fn bounds(&self) -> (Point, Point) {
        let half = self.pair_offset.unwrap_or(0.0) / 2.0;
        let lo = Point::new(self.origin.x - half, self.origin.y);
        let hi = Point::new(
            self.origin.x + f64::from(self.cols - 1) * self.col_pitch + half,
            self.origin.y + f64::from(self.rows - 1) * self.row_pitch,
        );
        (lo, hi)
    }

    fn slots(&self) -> &'static [Slot] {
        match self.kind {
            ZoneKind::Storage => &[Slot::Single],
            ZoneKind::Entanglement => &[Slot::PairLeft, Slot::PairRight],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TrapAddress {
    pub zone: ZoneId,
    pub row: u32,
    pub col: u32,
    pub slot: Slot,
}

impl TrapAddress {
    pub const fn new(zone: ZoneId, row: u32, col: u32, slot: Slot) -> Self {
        Self {
            zone,
            row,
            col,
            slot,
        }
    }

    /// The other trap of the same entanglement pair.
    pub fn pair_partner(self) -> Option<TrapAddress> {
        self.slot.partner().map(|slot| TrapAddress { slot, ..self })
    }

    pub fn site(self) -> (ZoneId, u32, u32) {
        (self.zone, self.row, self.col)
    }
}

impl fmt::Display for TrapAddress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "zone {} ({}, {}, {:?})", self.zone, self.row, self.col, self.slot)
    }
}

/// Full extents (rows, cols) of the candidate window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub rows: u32,
    pub cols: u32,
}

impl Window {
    pub const fn new(rows: u32, cols: u32) -> Self {
        Self { rows, cols }
    }
}

impl Default for Window {
    fn default() -> Self {
        Window::new(6, 6)
    }
}

/// The JSON document form of an architecture.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArchitectureSpec {
    pub zones: Vec<Zone>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub acceleration: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trap_transfer_time_us: Option<f64>,
    pub interaction_radius: f64,
    pub window: Window,
}

/// A validated, immutable zoned architecture.
#[derive(Debug, Clone, PartialEq)]
pub struct Architecture {
    zones: Vec<Zone>,
    /// m/s²
    pub acceleration: f64,
    /// µs per trap transfer (pickup or drop)
    pub trap_transfer_time_us: f64,
    /// µm
    pub interaction_radius: f64,
    pub window: Window,
    trap_base: Vec<usize>,
}

/// JSON of the built-in architecture: a 7×20 entanglement zone above a 100×40
/// storage zone whose rows each hold one entanglement row's worth of atoms.
pub const DEFAULT_ARCHITECTURE_JSON: &str = include_str!("../archs/default.json");

impl Architecture {
    /// The built-in architecture used when none is given.
    pub fn builtin() -> Self {
        Self::from_json(DEFAULT_ARCHITECTURE_JSON).expect("built-in architecture is valid")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: ArchitectureSpec = serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        Self::from_spec(spec)
    }

    pub fn from_spec(spec: ArchitectureSpec) -> Result<Self> {
        let acceleration = spec.acceleration.unwrap_or(DEFAULT_ACCELERATION);
        let trap_transfer_time_us = spec
            .trap_transfer_time_us
            .unwrap_or(DEFAULT_TRAP_TRANSFER_TIME_US);
        if !(acceleration > 0.0 && acceleration.is_finite()) {
            return Err(Error::validation("acceleration", "must be positive"));
        }
        if !(trap_transfer_time_us >= 0.0 && trap_transfer_time_us.is_finite()) {
            return Err(Error::validation("trap_transfer_time_us", "must be non-negative"));
        }
        if !(spec.interaction_radius >= 0.0 && spec.interaction_radius.is_finite()) {
            return Err(Error::validation("interaction_radius", "must be non-negative"));
        }
        if spec.window.rows == 0 || spec.window.cols == 0 {
            return Err(Error::validation("window", "extents must be at least 1"));
        }
        for (i, zone) in spec.zones.iter().enumerate() {
            validate_zone(zone)?;
            if spec.zones[..i].iter().any(|z| z.id == zone.id) {
                return Err(Error::validation(
                    "zones.id",
                    format!("duplicate zone id `{}`", zone.id),
                ));
            }
        }
        for kind in [ZoneKind::Storage, ZoneKind::Entanglement] {
            if !spec.zones.iter().any(|z| z.kind == kind) {
                return Err(Error::validation(
                    "zones",
                    format!("at least one {kind:?} zone is required").to_lowercase(),
                ));
            }
        }
        for (i, a) in spec.zones.iter().enumerate() {
            for b in &spec.zones[i + 1..] {
                let (alo, ahi) = a.bounds();
                let (blo, bhi) = b.bounds();
                if alo.x <= bhi.x && blo.x <= ahi.x && alo.y <= bhi.y && blo.y <= ahi.y {
                    return Err(Error::validation(
                        "zones",
                        format!("zones `{}` and `{}` overlap", a.id, b.id),
                    ));
                }
            }
        }
        let mut trap_base = Vec::with_capacity(spec.zones.len() + 1);
        let mut total = 0;
        for z in &spec.zones {
            trap_base.push(total);
            total += z.trap_count();
        }
        trap_base.push(total);
        Ok(Self {
            zones: spec.zones,
            acceleration,
            trap_transfer_time_us,
            interaction_radius: spec.interaction_radius,
            window: spec.window,
            trap_base,
        })
    }

    pub fn to_spec(&self) -> ArchitectureSpec {
        ArchitectureSpec {
            zones: self.zones.clone(),
            acceleration: Some(self.acceleration),
            trap_transfer_time_us: Some(self.trap_transfer_time_us),
            interaction_radius: self.interaction_radius,
            window: self.window,
        }
    }

    pub fn zones(&self) -> &[Zone] {
        &self.zones
    }

    pub fn zone(&self, id: ZoneId) -> &Zone {
        &self.zones[id]
    }

    pub fn zone_index(&self, id: &str) -> Option<ZoneId> {
        self.zones.iter().position(|z| z.id == id)
    }

    pub fn zones_of(&self, kind: ZoneKind) -> impl Iterator<Item = ZoneId> + '_ {
        self.zones
            .iter()
            .enumerate()
            .filter(move |(_, z)| z.kind == kind)
            .map(|(i, _)| i)
    }

    pub fn storage_capacity(&self) -> usize {
        self.zones_of(ZoneKind::Storage)
            .map(|z| self.zones[z].trap_count())
            .sum()
    }

    /// Total number of traps; dense trap indices range over `0..trap_count()`.
    pub fn trap_count(&self) -> usize {
        *self.trap_base.last().unwrap_or(&0)
    }

    pub fn validate(&self, addr: TrapAddress) -> Result<()> {
        let zone = self
            .zones
            .get(addr.zone)
            .ok_or_else(|| Error::InvalidAddress(format!("no zone with index {}", addr.zone)))?;
        if addr.row >= zone.rows || addr.col >= zone.cols {
            return Err(Error::InvalidAddress(format!(
                "{addr} outside {}x{} zone `{}`",
                zone.rows, zone.cols, zone.id
            )));
        }
        let paired = addr.slot != Slot::Single;
        if paired != (zone.kind == ZoneKind::Entanglement) {
            return Err(Error::InvalidAddress(format!(
                "slot {:?} not valid in {:?} zone `{}`",
                addr.slot, zone.kind, zone.id
            )));
        }
        Ok(())
    }

    pub fn trap_position(&self, addr: TrapAddress) -> Result<Point> {
        self.validate(addr)?;
        Ok(self.position(addr))
    }

    /// Unchecked variant of [`trap_position`](Self::trap_position) for addresses
    /// known to be valid.
    pub fn position(&self, addr: TrapAddress) -> Point {
        self.zones[addr.zone].slot_position(addr.row, addr.col, addr.slot)
    }

    pub fn distance(&self, a: TrapAddress, b: TrapAddress) -> Result<f64> {
        Ok(self.trap_position(a)?.distance(self.trap_position(b)?))
    }

    /// Dense index of a valid trap address.
    pub fn trap_index(&self, addr: TrapAddress) -> usize {
        let zone = &self.zones[addr.zone];
        let site = addr.row as usize * zone.cols as usize + addr.col as usize;
        self.trap_base[addr.zone] + site * zone.slots_per_site() + addr.slot.index()
    }

    pub fn trap_at(&self, index: usize) -> TrapAddress {
        let zone = self.trap_base.partition_point(|&b| b <= index) - 1;
        let z = &self.zones[zone];
        let local = index - self.trap_base[zone];
        let site = local / z.slots_per_site();
        let slot = z.slots()[local % z.slots_per_site()];
        TrapAddress::new(zone, (site / z.cols as usize) as u32, (site % z.cols as usize) as u32, slot)
    }

    pub fn traps(&self, zone: ZoneId) -> impl Iterator<Item = TrapAddress> + '_ {
        let z = &self.zones[zone];
        (0..z.rows).flat_map(move |r| {
            (0..z.cols).flat_map(move |c| z.slots().iter().map(move |&s| TrapAddress::new(zone, r, c, s)))
        })
    }

    /// Target-frame grid coordinates of a trap: zone-local row and trap column,
    /// where the two slots of an entanglement site occupy adjacent columns.
    pub fn grid_coords(&self, addr: TrapAddress) -> (i64, i64) {
        let zone = &self.zones[addr.zone];
        let col = addr.col as usize * zone.slots_per_site() + addr.slot.index();
        (i64::from(addr.row), col as i64)
    }

    /// Free sites of `zone` in a window centred on the site nearest to `around`.
    ///
    /// Window extents grow by one in both directions until at least `min_free`
    /// free sites are inside or the window covers the whole zone. Sites come back
    /// sorted by distance of the site centre to `around`, ties by `(row, col)`.
    pub fn candidate_sites(
        &self,
        zone: ZoneId,
        around: Point,
        window: Window,
        min_free: usize,
        mut is_free: impl FnMut(u32, u32) -> bool,
    ) -> Result<Vec<(u32, u32)>> {
        let z = &self.zones[zone];
        let (center_row, center_col) = z.nearest_site(around);
        let mut extent = (window.rows.max(1).min(z.rows), window.cols.max(1).min(z.cols));
        loop {
            let row_range = window_range(center_row, extent.0, z.rows);
            let col_range = window_range(center_col, extent.1, z.cols);
            let mut free: Vec<(u32, u32)> = row_range
                .flat_map(|r| col_range.clone().map(move |c| (r, c)))
                .filter(|&(r, c)| is_free(r, c))
                .collect();
            let whole = extent == (z.rows, z.cols);
            if free.len() >= min_free.max(1) || whole {
                if free.is_empty() {
                    return Err(Error::Capacity {
                        zone: z.id.clone(),
                        message: "no free traps".into(),
                    });
                }
                free.sort_by(|&(ra, ca), &(rb, cb)| {
                    let da = z.site_center(ra, ca).distance(around);
                    let db = z.site_center(rb, cb).distance(around);
                    da.total_cmp(&db).then((ra, ca).cmp(&(rb, cb)))
                });
                return Ok(free);
            }
            extent = ((extent.0 + 1).min(z.rows), (extent.1 + 1).min(z.cols));
        }
    }

    /// Free traps near `around` in `zone`, see [`candidate_sites`](Self::candidate_sites).
    ///
    /// In entanglement zones a site counts as free only if both of its traps are
    /// free; the site is reported through its `PairLeft` address.
    pub fn candidate_traps(
        &self,
        around: Point,
        zone: ZoneId,
        occupied: &HashSet<TrapAddress>,
        window: Window,
        min_free: usize,
    ) -> Result<Vec<TrapAddress>> {
        if zone >= self.zones.len() {
            return Err(Error::InvalidAddress(format!("no zone with index {zone}")));
        }
        let z = &self.zones[zone];
        let sites = self.candidate_sites(zone, around, window, min_free, |r, c| {
            z.slots()
                .iter()
                .all(|&s| !occupied.contains(&TrapAddress::new(zone, r, c, s)))
        })?;
        let slot = z.slots()[0];
        Ok(sites
            .into_iter()
            .map(|(r, c)| TrapAddress::new(zone, r, c, slot))
            .collect())
    }
}

fn validate_zone(zone: &Zone) -> Result<()> {
    let field = |name: &str| format!("zones[{}].{name}", zone.id);
    if zone.rows == 0 {
        return Err(Error::validation(field("rows"), "must be at least 1"));
    }
    if zone.cols == 0 {
        return Err(Error::validation(field("cols"), "must be at least 1"));
    }
    if !(zone.row_pitch > 0.0 && zone.row_pitch.is_finite()) {
        return Err(Error::validation(field("row_pitch"), "must be positive"));
    }
    if !(zone.col_pitch > 0.0 && zone.col_pitch.is_finite()) {
        return Err(Error::validation(field("col_pitch"), "must be positive"));
    }
    match (zone.kind, zone.pair_offset) {
        (ZoneKind::Entanglement, None) => Err(Error::validation(
            field("pair_offset"),
            "required for entanglement zones",
        )),
        (ZoneKind::Entanglement, Some(off)) if !(off > 0.0 && off < zone.col_pitch) => Err(
            Error::validation(field("pair_offset"), "must be in (0, col_pitch)"),
        ),
        (ZoneKind::Storage, Some(_)) => Err(Error::validation(
            field("pair_offset"),
            "only allowed on entanglement zones",
        )),
        _ => Ok(()),
    }
}

/// Window of `extent` indices centred on `center`, shifted to lie inside `0..n`.
fn window_range(center: u32, extent: u32, n: u32) -> std::ops::Range<u32> {
    let extent = extent.min(n);
    let start = center
        .saturating_sub((extent - 1) / 2)
        .min(n - extent);
    start..start + extent
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zone(id: &str, kind: ZoneKind, origin: (f64, f64), rows: u32, cols: u32, pitch: f64) -> Zone {
        Zone {
            id: id.into(),
            kind,
            origin: Point::new(origin.0, origin.1),
            rows,
            cols,
            row_pitch: pitch,
            col_pitch: pitch,
            pair_offset: (kind == ZoneKind::Entanglement).then_some(pitch / 5.0),
        }
    }

    fn arch(zones: Vec<Zone>) -> Result<Architecture> {
        Architecture::from_spec(ArchitectureSpec {
            zones,
            acceleration: None,
            trap_transfer_time_us: None,
            interaction_radius: 2.0,
            window: Window::new(3, 3),
        })
    }

    fn two_zone() -> Architecture {
        arch(vec![
            zone("storage", ZoneKind::Storage, (0.0, 0.0), 10, 10, 5.0),
            zone("entangle", ZoneKind::Entanglement, (0.0, 100.0), 2, 10, 20.0),
        ])
        .unwrap()
    }

    #[test]
    fn builtin_architecture() {
        let a = Architecture::builtin();
        assert_eq!(a.storage_capacity(), 4000);
        assert_eq!(a.acceleration, DEFAULT_ACCELERATION);
        assert_eq!(a.window, Window::new(1, 20));
    }

    #[test]
    fn minimal_json_loads_with_defaults() {
        let text = r#"{
            "zones": [
                {"id": "s", "kind": "storage", "origin": [0, 0], "rows": 10, "cols": 10, "row_pitch": 5, "col_pitch": 5},
                {"id": "e", "kind": "entanglement", "origin": [0, 100], "rows": 2, "cols": 10,
                 "row_pitch": 20, "col_pitch": 20, "pair_offset": 4}
            ],
            "interaction_radius": 2,
            "window": {"rows": 3, "cols": 3}
        }"#;
        let a = Architecture::from_json(text).unwrap();
        assert_eq!(a.zones().len(), 2);
        assert_eq!(a.acceleration, 2750.0);
        assert_eq!(a.trap_transfer_time_us, 15.0);
        assert_eq!(a.trap_count(), 100 + 40);
    }

    #[test]
    fn malformed_json_is_a_parse_error() {
        let err = Architecture::from_json("{\"zones\": [").unwrap_err();
        assert!(matches!(err, Error::Parse { .. }), "{err}");
    }

    #[test]
    fn overlapping_zones_name_both_ids() {
        let err = arch(vec![
            zone("alpha", ZoneKind::Storage, (0.0, 0.0), 10, 10, 5.0),
            zone("beta", ZoneKind::Entanglement, (20.0, 20.0), 2, 2, 20.0),
        ])
        .unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("alpha") && msg.contains("beta"), "{msg}");
    }

    #[test]
    fn non_positive_pitch_names_field() {
        let mut z = zone("s", ZoneKind::Storage, (0.0, 0.0), 2, 2, 5.0);
        z.row_pitch = 0.0;
        let err = arch(vec![z, zone("e", ZoneKind::Entanglement, (0.0, 100.0), 1, 1, 10.0)]).unwrap_err();
        assert!(err.to_string().contains("row_pitch"), "{err}");
    }

    #[test]
    fn pair_offset_must_be_below_pitch() {
        let mut e = zone("e", ZoneKind::Entanglement, (0.0, 100.0), 1, 2, 10.0);
        e.pair_offset = Some(10.0);
        let err = arch(vec![zone("s", ZoneKind::Storage, (0.0, 0.0), 2, 2, 5.0), e]).unwrap_err();
        assert!(err.to_string().contains("pair_offset"), "{err}");
    }

    #[test]
    fn requires_both_zone_kinds() {
        assert!(arch(vec![zone("s", ZoneKind::Storage, (0.0, 0.0), 2, 2, 5.0)]).is_err());
    }

    #[test]
    fn trap_positions() {
        let a = two_zone();
        assert_eq!(a.trap_position(TrapAddress::new(0, 0, 0, Slot::Single)).unwrap(), Point::new(0.0, 0.0));
        assert_eq!(a.trap_position(TrapAddress::new(0, 2, 3, Slot::Single)).unwrap(), Point::new(15.0, 10.0));
        assert_eq!(
            a.trap_position(TrapAddress::new(1, 0, 1, Slot::PairRight)).unwrap(),
            Point::new(22.0, 100.0)
        );
        assert_eq!(
            a.trap_position(TrapAddress::new(1, 0, 1, Slot::PairLeft)).unwrap(),
            Point::new(18.0, 100.0)
        );
    }

    #[test]
    fn invalid_addresses_are_rejected() {
        let a = two_zone();
        assert!(a.trap_position(TrapAddress::new(0, 10, 0, Slot::Single)).is_err());
        assert!(a.trap_position(TrapAddress::new(0, 0, 0, Slot::PairLeft)).is_err());
        assert!(a.trap_position(TrapAddress::new(1, 0, 0, Slot::Single)).is_err());
        assert!(a.trap_position(TrapAddress::new(7, 0, 0, Slot::Single)).is_err());
    }

    #[test]
    fn distances() {
        let a = two_zone();
        let t = |r, c| TrapAddress::new(0, r, c, Slot::Single);
        assert_eq!(a.distance(t(1, 1), t(1, 1)).unwrap(), 0.0);
        assert_eq!(a.distance(t(0, 0), t(0, 1)).unwrap(), 5.0);
        // (30, 40) offset
        assert_eq!(a.distance(t(0, 0), t(8, 6)).unwrap(), 50.0);
    }

    #[test]
    fn dense_indices_round_trip() {
        let a = two_zone();
        for i in 0..a.trap_count() {
            assert_eq!(a.trap_index(a.trap_at(i)), i);
        }
    }

    #[test]
    fn window_range_is_shifted_into_zone() {
        assert_eq!(window_range(0, 3, 10), 0..3);
        assert_eq!(window_range(5, 3, 10), 4..7);
        assert_eq!(window_range(9, 3, 10), 7..10);
        assert_eq!(window_range(4, 6, 10), 2..8);
        assert_eq!(window_range(4, 20, 10), 0..10);
    }

    #[test]
    fn candidates_in_empty_zone() {
        let a = two_zone();
        let around = Point::new(22.0, 22.0);
        let c = a.candidate_traps(around, 0, &HashSet::new(), Window::new(3, 3), 1).unwrap();
        assert_eq!(c.len(), 9);
        assert_eq!((c[0].row, c[0].col), (4, 4));
        let d: Vec<f64> = c.iter().map(|&t| a.position(t).distance(around)).collect();
        assert!(d.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn candidates_expand_until_a_free_trap_appears() {
        // 8x8 zone, everything occupied except the far corner (7, 7).
        let a = arch(vec![
            zone("s", ZoneKind::Storage, (0.0, 0.0), 8, 8, 1.0),
            zone("e", ZoneKind::Entanglement, (0.0, 50.0), 1, 1, 10.0),
        ])
        .unwrap();
        let occupied: HashSet<_> = a.traps(0).filter(|t| (t.row, t.col) != (7, 7)).collect();
        let c = a
            .candidate_traps(Point::new(0.0, 0.0), 0, &occupied, Window::new(3, 3), 1)
            .unwrap();
        assert_eq!(c, vec![TrapAddress::new(0, 7, 7, Slot::Single)]);
    }

    #[test]
    fn fully_occupied_zone_is_a_capacity_error() {
        let a = two_zone();
        let occupied: HashSet<_> = a.traps(0).collect();
        let err = a
            .candidate_traps(Point::new(0.0, 0.0), 0, &occupied, Window::new(3, 3), 1)
            .unwrap_err();
        assert!(matches!(err, Error::Capacity { .. }));
    }

    #[test]
    fn entanglement_sites_need_both_slots_free() {
        let a = two_zone();
        let occupied: HashSet<_> = [TrapAddress::new(1, 0, 0, Slot::PairRight)].into();
        let c = a
            .candidate_traps(Point::new(0.0, 100.0), 1, &occupied, Window::new(1, 2), 1)
            .unwrap();
        assert_eq!(c, vec![TrapAddress::new(1, 0, 1, Slot::PairLeft)]);
    }
}
