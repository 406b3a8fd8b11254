//! Dyadic intervals, tiles, tri-tiles and the combinatorics built on them.
//!
//! Space intervals live in torus units (`j ≥ 0`, length `2^{-j}`); frequency intervals
//! are measured in integer frequency units and use `j ≤ 0`. A tile has `j_space = -j_freq`,
//! i.e. area one. Endpoint comparisons are exact: every endpoint is an integer multiple
//! of `2^{-SCALE_EXP}/3`.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridSpec;

const SCALE_EXP: i32 = 40;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Shift {
    MinusThird,
    Zero,
    PlusThird,
}

impl Shift {
    fn thirds(self) -> i128 {
        match self {
            Shift::MinusThird => -1,
            Shift::Zero => 0,
            Shift::PlusThird => 1,
        }
    }

    pub fn as_f64(self) -> f64 {
        self.thirds() as f64 / 3.0
    }
}

impl From<Shift> for String {
    fn from(s: Shift) -> String {
        match s {
            Shift::MinusThird => "-1/3".into(),
            Shift::Zero => "0".into(),
            Shift::PlusThird => "1/3".into(),
        }
    }
}

impl TryFrom<String> for Shift {
    type Error = String;
    fn try_from(s: String) -> std::result::Result<Self, String> {
        match s.trim() {
            "0" => Ok(Shift::Zero),
            "1/3" => Ok(Shift::PlusThird),
            "-1/3" => Ok(Shift::MinusThird),
            other => Err(format!("shift must be 0, 1/3 or -1/3, got {other:?}")),
        }
    }
}

/// `[(m + shift) 2^{-j}, (m + 1 + shift) 2^{-j})`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DyadicInterval {
    pub j: i32,
    pub m: i64,
    pub shift: Shift,
}

/// Half-open interval with exact scaled endpoints.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Span {
    pub lo: i128,
    pub hi: i128,
}

impl Span {
    pub fn contains(&self, o: &Span) -> bool {
        self.lo <= o.lo && o.hi <= self.hi
    }

    pub fn intersects(&self, o: &Span) -> bool {
        self.lo < o.hi && o.lo < self.hi
    }

    pub fn len(&self) -> i128 {
        self.hi - self.lo
    }

    pub fn is_empty(&self) -> bool {
        self.hi <= self.lo
    }
}

impl DyadicInterval {
    pub fn new(j: i32, m: i64) -> Self {
        Self { j, m, shift: Shift::Zero }
    }

    pub fn shifted(j: i32, m: i64, shift: Shift) -> Self {
        Self { j, m, shift }
    }

    /// The whole torus `[0, 1)`.
    pub fn torus() -> Self {
        Self::new(0, 0)
    }

    pub fn length(&self) -> f64 {
        2f64.powi(-self.j)
    }

    pub fn start(&self) -> f64 {
        (self.m as f64 + self.shift.as_f64()) * self.length()
    }

    pub fn end(&self) -> f64 {
        self.start() + self.length()
    }

    pub fn center(&self) -> f64 {
        self.start() + 0.5 * self.length()
    }

    pub fn span(&self) -> Span {
        assert!(self.j.abs() < SCALE_EXP, "scale {} outside exact range", self.j);
        let unit: i128 = 1i128 << (SCALE_EXP - self.j);
        let lo = (3 * self.m as i128 + self.shift.thirds()) * unit;
        Span { lo, hi: lo + 3 * unit }
    }

    /// Same center, `factor` times the length.
    pub fn dilate(&self, factor: i128) -> Span {
        let s = self.span();
        // 2 * center and the length are both even, so this stays exact
        let half_extra = (factor - 1) * s.len() / 2;
        Span { lo: s.lo - half_extra, hi: s.hi + half_extra }
    }

    pub fn contains(&self, other: &DyadicInterval) -> bool {
        self.span().contains(&other.span())
    }

    pub fn intersects(&self, other: &DyadicInterval) -> bool {
        self.span().intersects(&other.span())
    }

    pub fn parent(&self) -> Option<DyadicInterval> {
        (self.shift == Shift::Zero).then(|| Self::new(self.j - 1, self.m.div_euclid(2)))
    }

    pub fn children(&self) -> Option<[DyadicInterval; 2]> {
        (self.shift == Shift::Zero)
            .then(|| [Self::new(self.j + 1, 2 * self.m), Self::new(self.j + 1, 2 * self.m + 1)])
    }

    /// Unshifted, non-wrapping subinterval of the torus.
    pub fn is_space_interval(&self) -> bool {
        self.shift == Shift::Zero && self.j >= 0 && self.m >= 0 && self.m < (1i64 << self.j)
    }

    /// Grid points `n` with `n/N ∈ I`, as the index range `lo..hi`.
    pub fn grid_range(&self, n: usize) -> (usize, usize) {
        let lo = (self.start() * n as f64).ceil().max(0.0) as usize;
        let hi = (self.end() * n as f64).ceil().min(n as f64) as usize;
        (lo, hi.max(lo))
    }

    /// Integer frequencies `k` with `k ∈ ω`, as `lo..hi`.
    pub fn integer_range(&self) -> (i64, i64) {
        (self.start().ceil() as i64, self.end().ceil() as i64)
    }

    /// Torus distance from `x` to this (space) interval.
    pub fn torus_dist(&self, x: f64) -> f64 {
        let (a, b) = (self.start(), self.end());
        if b - a >= 1.0 {
            return 0.0;
        }
        let x = x.rem_euclid(1.0);
        if a <= x && x < b {
            return 0.0;
        }
        let right = (a - x).rem_euclid(1.0);
        let left = (x - b).rem_euclid(1.0);
        right.min(left)
    }

    /// All space intervals of the grid, coarsest first then left to right.
    pub fn all_space(grid: GridSpec) -> Vec<DyadicInterval> {
        (0..=grid.log_size() as i32)
            .flat_map(|j| (0..(1i64 << j)).map(move |m| DyadicInterval::new(j, m)))
            .collect()
    }
}

impl fmt::Display for DyadicInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {})", self.start(), self.end())
    }
}

/// Coarser first, then leftmost.
pub fn space_order(a: &DyadicInterval, b: &DyadicInterval) -> Ordering {
    a.j.cmp(&b.j).then(a.span().lo.cmp(&b.span().lo))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Tile {
    pub space: DyadicInterval,
    pub freq: DyadicInterval,
}

impl Tile {
    pub fn new(space: DyadicInterval, freq: DyadicInterval) -> Result<Self> {
        if space.j != -freq.j {
            return Err(Error::Domain(format!(
                "tile area is 2^{}, not 1",
                -(space.j + freq.j)
            )));
        }
        Ok(Self { space, freq })
    }
}

/// `P′ < P`: `I_{P′} ⊊ I_P` and `ω_P ⊆ 3ω_{P′}`.
pub fn tile_lt(pp: &Tile, p: &Tile) -> bool {
    let (a, b) = (pp.space.span(), p.space.span());
    b.contains(&a) && a != b && pp.freq.dilate(3).contains(&p.freq.span())
}

pub fn tile_le(pp: &Tile, p: &Tile) -> bool {
    pp == p || tile_lt(pp, p)
}

/// `P′ ≲ P`: `I_{P′} ⊆ I_P` and `ω_P ⊆ 100ω_{P′}`.
pub fn tile_lesssim(pp: &Tile, p: &Tile) -> bool {
    p.space.contains(&pp.space) && pp.freq.dilate(100).contains(&p.freq.span())
}

/// `P′ ≲ P` but not `P′ ≤ P`.
pub fn tile_lesssim_prime(pp: &Tile, p: &Tile) -> bool {
    tile_lesssim(pp, p) && !tile_le(pp, p)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TriTile {
    pub space: DyadicInterval,
    pub freqs: [DyadicInterval; 3],
}

impl TriTile {
    pub fn new(space: DyadicInterval, freqs: [DyadicInterval; 3]) -> Result<Self> {
        for w in &freqs {
            Tile::new(space, *w)?;
        }
        Ok(Self { space, freqs })
    }

    /// Component tile, `i ∈ {0, 1, 2}`.
    pub fn tile(&self, i: usize) -> Tile {
        Tile { space: self.space, freq: self.freqs[i] }
    }
}

/// Separation `|I′| ≤ |I| / 2^RANK_ONE_GAP` standing in for `|I′| ≪ |I|`.
pub const RANK_ONE_GAP: i32 = 2;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankOneViolation {
    pub first: usize,
    pub second: usize,
    pub bullet: u8,
}

impl fmt::Display for RankOneViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "tiles {} and {} violate rank-one condition {}", self.first, self.second, self.bullet)
    }
}

fn rank_one_pair(p: &TriTile, pp: &TriTile) -> Option<u8> {
    if p != pp && (0..3).any(|j| p.tile(j) == pp.tile(j)) {
        return Some(1);
    }
    for j0 in 0..3 {
        if p.freqs[j0] == pp.freqs[j0] && p.freqs != pp.freqs {
            return Some(2);
        }
    }
    for j0 in 0..3 {
        if tile_le(&pp.tile(j0), &p.tile(j0)) {
            if !(0..3).all(|j| tile_lesssim(&pp.tile(j), &p.tile(j))) {
                return Some(3);
            }
            if pp.space.j - p.space.j >= RANK_ONE_GAP
                && !(0..3).filter(|&j| j != j0).all(|j| tile_lesssim_prime(&pp.tile(j), &p.tile(j)))
            {
                return Some(4);
            }
        }
    }
    None
}

/// Checks the four rank-one conditions over all ordered pairs.
pub fn check_rank_one(tiles: &[TriTile]) -> std::result::Result<(), RankOneViolation> {
    for (a, p) in tiles.iter().enumerate() {
        for (b, pp) in tiles.iter().enumerate() {
            if let Some(bullet) = rank_one_pair(p, pp) {
                return Err(RankOneViolation { first: a, second: b, bullet });
            }
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TileSet {
    tiles: Vec<TriTile>,
    rank1_certified: bool,
}

impl TileSet {
    pub fn uncertified(tiles: Vec<TriTile>) -> Self {
        Self { tiles, rank1_certified: false }
    }

    pub fn certify(tiles: Vec<TriTile>) -> std::result::Result<Self, RankOneViolation> {
        check_rank_one(&tiles)?;
        Ok(Self { tiles, rank1_certified: true })
    }

    pub fn empty() -> Self {
        Self { tiles: Vec::new(), rank1_certified: true }
    }

    pub fn tiles(&self) -> &[TriTile] {
        &self.tiles
    }

    pub fn len(&self) -> usize {
        self.tiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tiles.is_empty()
    }

    pub fn is_certified(&self) -> bool {
        self.rank1_certified
    }

    /// Subfamily by index; certification is inherited since rank one is hereditary.
    pub fn subset(&self, idx: &[usize]) -> TileSet {
        TileSet {
            tiles: idx.iter().map(|&i| self.tiles[i]).collect(),
            rank1_certified: self.rank1_certified,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&self.tiles)?)
    }

    /// Parses the tile-list JSON; the result is certified if it passes the rank-one check.
    pub fn from_json(s: &str) -> Result<TileSet> {
        let tiles: Vec<TriTile> = serde_json::from_str(s)?;
        for t in &tiles {
            TriTile::new(t.space, t.freqs)?;
        }
        Ok(match TileSet::certify(tiles.clone()) {
            Ok(ts) => ts,
            Err(_) => TileSet::uncertified(tiles),
        })
    }
}

/// `{P : I_P ⊆ I₀}` as indices.
pub fn restrict_indices(set: &TileSet, i0: &DyadicInterval) -> Vec<usize> {
    (0..set.len()).filter(|&k| i0.contains(&set.tiles[k].space)).collect()
}

pub fn restrict(set: &TileSet, i0: &DyadicInterval) -> TileSet {
    set.subset(&restrict_indices(set, i0))
}

/// An `index`-tree: every member satisfies `P_index ≤ P_{T,index}` (0-based index).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tree {
    pub top: TriTile,
    pub members: Vec<usize>,
    pub index: usize,
}

impl Tree {
    pub fn is_valid(&self, set: &TileSet) -> bool {
        let top = self.top.tile(self.index);
        self.members.iter().all(|&k| tile_le(&set.tiles()[k].tile(self.index), &top))
    }

    pub fn top_space(&self) -> DyadicInterval {
        self.top.space
    }
}

/// Candidate order: larger `|I|`, then leftmost, then lowest frequency in component `i`.
pub fn top_order(set: &TileSet, i: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..set.len()).collect();
    order.sort_by(|&a, &b| {
        let (p, q) = (&set.tiles()[a], &set.tiles()[b]);
        space_order(&p.space, &q.space)
            .then(p.freqs[i].span().lo.cmp(&q.freqs[i].span().lo))
            .then(a.cmp(&b))
    });
    order
}

/// Greedy partition of the set (restricted to `pool`) into `i`-trees.
pub fn extract_trees_from(set: &TileSet, pool: &[usize], i: usize) -> Vec<Tree> {
    let mut alive = vec![false; set.len()];
    for &k in pool {
        alive[k] = true;
    }
    let mut trees = Vec::new();
    for t in top_order(set, i) {
        if !alive[t] {
            continue;
        }
        let top = set.tiles()[t];
        let tt = top.tile(i);
        let members: Vec<usize> = (0..set.len())
            .filter(|&k| alive[k] && tile_le(&set.tiles()[k].tile(i), &tt))
            .collect();
        for &k in &members {
            alive[k] = false;
        }
        trees.push(Tree { top, members, index: i });
    }
    trees
}

/// Greedy maximal `i`-tree cover of the whole set, for use with size in component `j ≠ i`.
pub fn extract_trees(set: &TileSet, j: usize, i: usize) -> Result<Vec<Tree>> {
    if i == j || i > 2 || j > 2 {
        return Err(Error::Domain(format!("need distinct tree and size components, got i={i}, j={j}")));
    }
    let all: Vec<usize> = (0..set.len()).collect();
    Ok(extract_trees_from(set, &all, i))
}

/// Conditions (i) to (iii) between two trees of a chain, `earlier` preceding `later`.
pub fn strongly_disjoint_pair(set: &TileSet, earlier: &Tree, later: &Tree, i: usize) -> bool {
    let tiles = set.tiles();
    let ordered = [(earlier, later, true), (later, earlier, false)];
    for (t1, t2, first_earlier) in ordered {
        for &a in &t1.members {
            for &b in &t2.members {
                let (p, q) = (tiles[a].tile(i), tiles[b].tile(i));
                if p == q {
                    return false;
                }
                if !p.freq.dilate(2).intersects(&q.freq.dilate(2)) {
                    continue;
                }
                let (wp, wq) = (p.freq.span().len(), q.freq.span().len());
                if wp < wq && q.space.intersects(&t1.top.space) {
                    return false;
                }
                if wq < wp && p.space.intersects(&t2.top.space) {
                    return false;
                }
                if first_earlier && wp == wq && q.space.intersects(&t1.top.space) {
                    return false;
                }
            }
        }
    }
    true
}

/// Conditions (i) to (iii) for a chain of strongly `i`-disjoint trees.
pub fn strongly_disjoint_check(set: &TileSet, trees: &[Tree], i: usize) -> bool {
    for (l1, t1) in trees.iter().enumerate() {
        for t2 in &trees[l1 + 1..] {
            if !strongly_disjoint_pair(set, t1, t2, i) {
                return false;
            }
        }
    }
    true
}

/// Gap between the first two frequency components, in units of the component width.
pub const CANONICAL_GAP: i64 = 6;

/// Whitney-style tri-tiles for the multiplier `1_{ξ<η}`.
///
/// At space scale `j` (frequency width `W = 2^j`) and diagonal position `m`:
/// `ω₁ = [m, m+1)W`, `ω₂ = ω₁ + GAP·W`, `ω₃ = [2m+GAP+2/3, 2m+GAP+5/3)W` near the sum of the
/// first two centers. Every diagonal position whose three intervals sit inside the band
/// `(-N/2, N/2]` is used, at every spatial position.
pub fn canonical_tritiles(grid: GridSpec, scales: &[u32]) -> Result<Vec<TriTile>> {
    let n = grid.size() as i64;
    let mut out = Vec::new();
    for &j in scales {
        let w = 1i64 << j;
        if w < 4 {
            return Err(Error::Resolution { bins: w });
        }
        let mut positions = Vec::new();
        for m in (-n / w - 1)..=(n / w + 1) {
            let f1 = DyadicInterval::new(-(j as i32), m);
            let f2 = DyadicInterval::new(-(j as i32), m + CANONICAL_GAP);
            let f3 = DyadicInterval::shifted(-(j as i32), 2 * m + CANONICAL_GAP + 1, Shift::MinusThird);
            let inside = [f1, f2, f3].iter().all(|f| f.start() > -(n as f64) / 2.0 && f.end() <= (n / 2 + 1) as f64);
            if inside {
                positions.push([f1, f2, f3]);
            }
        }
        for s in 0..(1i64 << j) {
            for fr in &positions {
                out.push(TriTile::new(DyadicInterval::new(j as i32, s), *fr)?);
            }
        }
    }
    Ok(out)
}

/// Space scales `j ≥ 2` at which the canonical generator has at least one diagonal position.
pub fn canonical_scales(grid: GridSpec) -> Vec<u32> {
    (2..grid.log_size())
        .filter(|&j| canonical_tritiles_at(grid, j).map(|v| !v.is_empty()).unwrap_or(false))
        .collect()
}

fn canonical_tritiles_at(grid: GridSpec, j: u32) -> Result<Vec<TriTile>> {
    // one spatial position is enough to decide emptiness
    let mut v = canonical_tritiles(GridSpec::new(grid.log_size(), 1)?, &[j])?;
    v.truncate(1);
    Ok(v)
}

/// Canonical family certified by the rank-one check.
pub fn canonical_family(grid: GridSpec, scales: &[u32]) -> Result<TileSet> {
    TileSet::certify(canonical_tritiles(grid, scales)?)
        .map_err(|v| Error::Precondition(format!("canonical family not rank one: {v}")))
}
