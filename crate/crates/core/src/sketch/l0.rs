//! ℓ0-sampler built from one-sparse recovery cells.
//!
//! Each repetition hashes the universe with its own polynomial hash. An item
//! whose hash falls below P / 2^l is present at levels 0..=l, so levels are
//! nested and level 0 sees everything. A cell keeps the signed count, the
//! index-weighted sum and a fingerprint sum(delta * z^index) mod P. A query
//! takes the deepest nonzero level of some repetition and accepts it when
//! the three statistics agree on a single index; that index is the minimum
//! hash element of the support, which makes the answer near uniform.

use std::sync::Arc;

use super::hash::{self, PolyHash, P};
use crate::error::{Error, Result};
use crate::rng::derive;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Cell {
    pub count: i64,
    pub sum: i128,
    pub fp: u64,
}

impl Cell {
    pub(crate) fn merge(&mut self, other: &Cell) {
        self.count += other.count;
        self.sum += other.sum;
        self.fp = hash::add(self.fp, other.fp);
    }

    pub fn is_zero(&self) -> bool {
        self.count == 0 && self.sum == 0 && self.fp == 0
    }
}

/// Hash functions and shape shared by every sketch that may be merged.
#[derive(Debug)]
pub struct L0Params {
    universe: u64,
    seed: u64,
    reps: usize,
    levels: usize,
    hashes: Vec<PolyHash>,
    z: Vec<u64>,
}

/// Repetitions needed for per-query failure around n^-2. A repetition
/// fails with probability about 0.4, so 2*log2(n)/log2(2.5) suffice.
pub fn default_reps(n: usize) -> usize {
    let lg = (n.max(2) as f64).log2();
    ((2.0 * lg / 2.5f64.log2()).ceil() as usize).clamp(4, 24)
}

pub fn ceil_log2(x: u64) -> usize {
    if x <= 1 {
        0
    } else {
        64 - (x - 1).leading_zeros() as usize
    }
}

impl L0Params {
    pub fn new(universe: u64, seed: u64, reps: usize) -> Arc<L0Params> {
        let universe = universe.max(1);
        let levels = ceil_log2(universe) + 2;
        let k = ceil_log2(universe).max(4);
        let hashes = (0..reps).map(|r| PolyHash::new(derive(seed, "l0-hash", r as u64), k)).collect();
        let z = (0..reps)
            .map(|r| 2 + derive(seed, "l0-fp", r as u64) % (P - 3))
            .collect();
        Arc::new(L0Params { universe, seed, reps: reps.max(1), levels, hashes, z })
    }

    pub fn universe(&self) -> u64 {
        self.universe
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn reps(&self) -> usize {
        self.reps
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn cells(&self) -> usize {
        self.reps * self.levels
    }

    /// Per repetition, the deepest level holding `item` and z^item.
    pub(crate) fn footprint(&self, item: u64, out: &mut Vec<(usize, u64)>) {
        out.clear();
        out.extend((0..self.reps).map(|r| (self.level_of(r, item), hash::pow(self.z[r], item))));
    }

    /// Adds `delta` copies of `item` to a row-major block of cells.
    pub(crate) fn apply_footprint(&self, cells: &mut [Cell], item: u64, delta: i64, fp: &[(usize, u64)]) {
        let d = hash::from_i64(delta);
        for (r, &(top, zi)) in fp.iter().enumerate() {
            let f = hash::mul(d, zi);
            for cell in &mut cells[r * self.levels..=r * self.levels + top] {
                cell.count += delta;
                cell.sum += item as i128 * delta as i128;
                cell.fp = hash::add(cell.fp, f);
            }
        }
    }

    pub(crate) fn apply(&self, cells: &mut [Cell], item: u64, delta: i64) {
        let mut fp = Vec::with_capacity(self.reps);
        self.footprint(item, &mut fp);
        self.apply_footprint(cells, item, delta, &fp);
    }

    fn one_sparse(&self, rep: usize, level: usize, cell: &Cell) -> Option<u64> {
        if cell.count == 0 || cell.sum % cell.count as i128 != 0 {
            return None;
        }
        let idx = cell.sum / cell.count as i128;
        if idx < 0 || idx >= self.universe as i128 {
            return None;
        }
        let idx = idx as u64;
        if self.level_of(rep, idx) < level {
            return None;
        }
        let expect = hash::mul(hash::from_i64(cell.count), hash::pow(self.z[rep], idx));
        (expect == cell.fp).then_some(idx)
    }

    pub(crate) fn query_cells(&self, cells: &[Cell]) -> L0Query {
        let l = self.levels;
        if (0..self.reps).all(|r| cells[r * l].is_zero()) {
            return L0Query::Empty;
        }
        for r in 0..self.reps {
            let row = &cells[r * l..(r + 1) * l];
            if let Some(level) = row.iter().rposition(|c| !c.is_zero()) {
                if let Some(idx) = self.one_sparse(r, level, &row[level]) {
                    return L0Query::Index(idx);
                }
            }
        }
        L0Query::Fail
    }

    #[inline]
    fn level_of(&self, rep: usize, item: u64) -> usize {
        let h = self.hashes[rep].eval(item);
        // h < 2^(61 - l)  <=>  bit length of h <= 61 - l
        let bits = 64 - h.leading_zeros() as usize;
        (61 - bits.min(61)).min(self.levels - 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum L0Query {
    Index(u64),
    Empty,
    Fail,
}

#[derive(Debug, Clone)]
pub struct L0Sketch {
    params: Arc<L0Params>,
    cells: Vec<Cell>,
}

impl L0Sketch {
    pub fn new(params: Arc<L0Params>) -> Self {
        let cells = vec![Cell::default(); params.cells()];
        L0Sketch { params, cells }
    }

    /// Standalone sampler with its own parameters.
    pub fn with_seed(universe: u64, seed: u64) -> Self {
        let reps = default_reps(universe.min(1 << 40) as usize);
        L0Sketch::new(L0Params::new(universe, seed, reps))
    }

    pub fn params(&self) -> &Arc<L0Params> {
        &self.params
    }

    pub fn words(&self) -> usize {
        // count, sum (two words) and fingerprint
        self.cells.len() * 4
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn update(&mut self, item: u64, delta: i64) {
        debug_assert!(item < self.params.universe, "item {item} outside the universe");
        self.params.apply(&mut self.cells, item, delta);
    }

    fn combine(&mut self, other: &L0Sketch, sign: i64) -> Result<()> {
        if self.params.seed != other.params.seed || self.params.universe != other.params.universe || self.params.reps != other.params.reps {
            return Err(Error::Contract("merging sketches with different parameters".into()));
        }
        for (a, b) in self.cells.iter_mut().zip(&other.cells) {
            a.count += sign * b.count;
            a.sum += sign as i128 * b.sum;
            a.fp = if sign > 0 { hash::add(a.fp, b.fp) } else { hash::sub(a.fp, b.fp) };
        }
        Ok(())
    }

    pub fn add(&mut self, other: &L0Sketch) -> Result<()> {
        self.combine(other, 1)
    }

    pub fn sub(&mut self, other: &L0Sketch) -> Result<()> {
        self.combine(other, -1)
    }

    pub fn is_zero(&self) -> bool {
        self.cells.iter().all(Cell::is_zero)
    }

    pub fn query(&self) -> L0Query {
        self.params.query_cells(&self.cells)
    }

    /// Versioned little-endian blob: "L0S1", universe, seed, reps, then cells.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(28 + self.cells.len() * 32);
        out.extend_from_slice(b"L0S1");
        out.extend_from_slice(&self.params.universe.to_le_bytes());
        out.extend_from_slice(&self.params.seed.to_le_bytes());
        out.extend_from_slice(&(self.params.reps as u32).to_le_bytes());
        write_cells(&mut out, &self.cells);
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut rd = Reader::new(bytes);
        rd.magic(b"L0S1")?;
        let universe = rd.u64()?;
        let seed = rd.u64()?;
        let reps = rd.u32()? as usize;
        if reps == 0 || reps > 1024 {
            return Err(Error::MalformedStream("sketch blob has a bad repetition count".into()));
        }
        let params = L0Params::new(universe, seed, reps);
        let cells = rd.cells(params.cells())?;
        rd.finish()?;
        Ok(L0Sketch { params, cells })
    }

}

pub(crate) fn write_cells(out: &mut Vec<u8>, cells: &[Cell]) {
    for c in cells {
        out.extend_from_slice(&c.count.to_le_bytes());
        out.extend_from_slice(&c.sum.to_le_bytes());
        out.extend_from_slice(&c.fp.to_le_bytes());
    }
}

pub(crate) struct Reader<'a> {
    bytes: &'a [u8],
    at: usize,
}

impl<'a> Reader<'a> {
    pub fn new(bytes: &'a [u8]) -> Self {
        Reader { bytes, at: 0 }
    }

    fn take(&mut self, k: usize) -> Result<&'a [u8]> {
        let end = self.at.checked_add(k).filter(|&e| e <= self.bytes.len());
        let end = end.ok_or_else(|| Error::MalformedStream("sketch blob is truncated".into()))?;
        let s = &self.bytes[self.at..end];
        self.at = end;
        Ok(s)
    }

    pub fn magic(&mut self, m: &[u8; 4]) -> Result<()> {
        if self.take(4)? != m {
            return Err(Error::MalformedStream(format!("bad sketch magic, expected {}", String::from_utf8_lossy(m))));
        }
        Ok(())
    }

    pub fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    pub fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    pub fn cells(&mut self, k: usize) -> Result<Vec<Cell>> {
        let mut cells = Vec::with_capacity(k);
        for _ in 0..k {
            let count = i64::from_le_bytes(self.take(8)?.try_into().unwrap());
            let sum = i128::from_le_bytes(self.take(16)?.try_into().unwrap());
            let fp = u64::from_le_bytes(self.take(8)?.try_into().unwrap());
            if fp >= P {
                return Err(Error::MalformedStream("sketch fingerprint out of range".into()));
            }
            cells.push(Cell { count, sum, fp });
        }
        Ok(cells)
    }

    pub fn finish(&self) -> Result<()> {
        if self.at != self.bytes.len() {
            return Err(Error::MalformedStream("trailing bytes after sketch blob".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn insert_delete_restores_fresh_state() {
        let mut s = L0Sketch::with_seed(100, 4);
        s.update(5, 1);
        s.update(5, -1);
        assert!(s.is_zero());
        assert_eq!(s.query(), L0Query::Empty);
    }

    #[test]
    fn singleton_and_negative_values() {
        let mut s = L0Sketch::with_seed(100, 4);
        s.update(7, 1);
        assert_eq!(s.query(), L0Query::Index(7));
        let mut t = L0Sketch::with_seed(100, 4);
        t.update(9, -1);
        assert_eq!(t.query(), L0Query::Index(9));
    }

    #[test]
    fn blob_roundtrip() {
        let mut s = L0Sketch::with_seed(1000, 11);
        for i in [3, 77, 512] {
            s.update(i, 1);
        }
        let back = L0Sketch::from_bytes(&s.to_bytes()).unwrap();
        assert_eq!(back.cells(), s.cells());
        assert!(L0Sketch::from_bytes(&s.to_bytes()[..20]).is_err());
    }
}
