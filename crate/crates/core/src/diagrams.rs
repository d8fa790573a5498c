//! Cauchon diagrams: subsets of the `n × n` grid that are unions of truncated
//! rows `L_(l,γ) = {(l,1..γ)}` and truncated columns `C_(l,γ) = {(1..l,γ)}`.
//!
//! A set is such a union exactly when each of its cells is *row-coverable*
//! (its whole row prefix lies in the set) or *column-coverable* (its whole
//! column prefix lies in the set): a covering piece forces the prefix, and a
//! prefix is itself a truncated piece. Membership is therefore an `O(n²)`
//! test, and since coverability of a cell only looks at cells earlier in
//! row-major order, the diagrams can be enumerated by a pruned depth-first
//! search in which every leaf is valid.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::Deref;
use std::str::FromStr;

use itertools::Itertools;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::qtorus::{Position, TorusPresentation};
use crate::restoration::{restore, QuantumMatrix};
use crate::{MAX_GRID, MAX_SYMBOLIC_GRID};

/// An arbitrary `n × n` bit grid.
///
/// Cell `k` (row-major, 0-based) is stored at bit `n² − 1 − k`, so the derived
/// ordering on grids of equal size is the lexicographic order of their
/// row-major bit strings.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Grid {
    n: usize,
    bits: u64,
}

impl Grid {
    pub fn empty(n: usize) -> Self {
        assert!((1..=MAX_GRID).contains(&n), "grid size {n} out of range");
        Self { n, bits: 0 }
    }

    pub fn full(n: usize) -> Self {
        let nn = n * n;
        Self { n, bits: if nn == 64 { u64::MAX } else { (1u64 << nn) - 1 } }
    }

    pub fn from_cells(n: usize, cells: impl IntoIterator<Item = Position>) -> Self {
        let mut g = Self::empty(n);
        for c in cells {
            g.insert(c);
        }
        g
    }

    /// Builds a grid from 0/1 rows, e.g. the JSON form `[[0,1,1],[0,1,1],[0,0,1]]`.
    pub fn from_rows(rows: &[Vec<u8>]) -> Result<Self> {
        let n = rows.len();
        if !(1..=MAX_GRID).contains(&n) {
            return Err(Error::SizeTooLarge { n, max: MAX_GRID });
        }
        let mut g = Self::empty(n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: row.len() });
            }
            for (a, &v) in row.iter().enumerate() {
                match v {
                    0 => {}
                    1 => g.insert(Position::new(i + 1, a + 1)),
                    _ => return Err(Error::Parse(format!("grid entry {v} is not 0 or 1"))),
                }
            }
        }
        Ok(g)
    }

    /// Parses the rows/slash format, e.g. `"011/011/001"`.
    pub fn parse(s: &str) -> Result<Self> {
        let rows: Vec<&str> = s.trim().split('/').collect();
        let n = rows.len();
        let mut parsed = Vec::with_capacity(n);
        for row in rows {
            let bits = row
                .chars()
                .map(|c| match c {
                    '0' => Ok(0u8),
                    '1' => Ok(1u8),
                    other => Err(Error::Parse(format!("invalid grid character {other:?} in {s:?}"))),
                })
                .collect::<Result<Vec<u8>>>()?;
            parsed.push(bits);
        }
        Self::from_rows(&parsed)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Raw row-major bit pattern, cell `(1,1)` most significant.
    pub fn bits(&self) -> u64 {
        self.bits
    }

    fn mask(&self, pos: Position) -> u64 {
        debug_assert!(pos.row >= 1 && pos.row <= self.n && pos.col >= 1 && pos.col <= self.n);
        1u64 << (self.n * self.n - 1 - pos.index(self.n))
    }

    pub fn contains(&self, pos: Position) -> bool {
        self.bits & self.mask(pos) != 0
    }

    pub fn insert(&mut self, pos: Position) {
        self.bits |= self.mask(pos);
    }

    pub fn remove(&mut self, pos: Position) {
        self.bits &= !self.mask(pos);
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }

    pub fn cells(&self) -> impl Iterator<Item = Position> + '_ {
        Position::all(self.n).filter(move |&p| self.contains(p))
    }

    pub fn is_subset(&self, other: &Grid) -> bool {
        self.n == other.n && self.bits & !other.bits == 0
    }

    pub fn union(&self, other: &Grid) -> Grid {
        assert_eq!(self.n, other.n);
        Grid { n: self.n, bits: self.bits | other.bits }
    }

    pub fn to_rows(&self) -> Vec<Vec<u8>> {
        (1..=self.n).map(|i| (1..=self.n).map(|a| self.contains(Position::new(i, a)) as u8).collect()).collect()
    }

    fn row_coverable(&self, pos: Position) -> bool {
        (1..=pos.col).all(|a| self.contains(Position::new(pos.row, a)))
    }

    fn column_coverable(&self, pos: Position) -> bool {
        (1..=pos.row).all(|i| self.contains(Position::new(i, pos.col)))
    }

    /// The first cell (row-major) that is in the grid but neither row- nor
    /// column-coverable; `None` iff the grid is a diagram.
    pub fn first_uncoverable(&self) -> Option<Position> {
        self.cells().find(|&p| !self.row_coverable(p) && !self.column_coverable(p))
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 1..=self.n {
            if i > 1 {
                f.write_str("/")?;
            }
            for a in 1..=self.n {
                f.write_str(if self.contains(Position::new(i, a)) { "1" } else { "0" })?;
            }
        }
        Ok(())
    }
}

/// True iff `g` is a union of truncated rows and columns.
pub fn is_diagram(g: &Grid) -> bool {
    g.first_uncoverable().is_none()
}

/// A grid known to be a union of truncated rows and columns.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Diagram(Grid);

impl Diagram {
    pub fn new(g: Grid) -> Result<Self> {
        match g.first_uncoverable() {
            None => Ok(Self(g)),
            Some(cell) => Err(Error::NotADiagram { grid: g.to_string(), cell }),
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::new(Grid::parse(s)?)
    }

    pub fn empty(n: usize) -> Self {
        Self(Grid::empty(n))
    }

    pub fn full(n: usize) -> Self {
        Self(Grid::full(n))
    }

    pub fn grid(&self) -> &Grid {
        &self.0
    }
}

impl Deref for Diagram {
    type Target = Grid;
    fn deref(&self) -> &Grid {
        &self.0
    }
}

impl fmt::Display for Diagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl FromStr for Diagram {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

impl Serialize for Diagram {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Diagram {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Diagram::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// Streams every diagram of the `n × n` grid in increasing bit-string order.
pub fn enumerate_w(n: usize) -> Result<DiagramIter> {
    if !(1..=MAX_GRID).contains(&n) {
        return Err(Error::SizeTooLarge { n, max: MAX_GRID });
    }
    Ok(DiagramIter { current: Grid::empty(n), started: false, done: false })
}

/// Lexicographic successor search over row-major bit strings. Clearing a cell
/// never breaks coverability of earlier cells, and coverability of cell `k`
/// depends only on cells before `k`, so "set the last settable zero, clear
/// everything after it" walks exactly the diagrams in order.
#[derive(Clone, Debug)]
pub struct DiagramIter {
    current: Grid,
    started: bool,
    done: bool,
}

impl Iterator for DiagramIter {
    type Item = Diagram;

    fn next(&mut self) -> Option<Diagram> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(Diagram(self.current));
        }
        let n = self.current.n;
        for k in (0..n * n).rev() {
            let pos = Position::from_index(k, n);
            if self.current.contains(pos) {
                self.current.remove(pos);
            } else if self.current.row_coverable_if_set(pos) || self.current.column_coverable_if_set(pos) {
                self.current.insert(pos);
                return Some(Diagram(self.current));
            }
        }
        self.done = true;
        None
    }
}

impl Grid {
    fn row_coverable_if_set(&self, pos: Position) -> bool {
        (1..pos.col).all(|a| self.contains(Position::new(pos.row, a)))
    }

    fn column_coverable_if_set(&self, pos: Position) -> bool {
        (1..pos.row).all(|i| self.contains(Position::new(i, pos.col)))
    }
}

/// A strictly increasing sequence `1 ≤ r_1 < ⋯ < r_t ≤ n`; `t = 0` is the
/// empty sequence.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RVector {
    n: usize,
    r: Vec<usize>,
}

impl RVector {
    pub fn new(n: usize, r: Vec<usize>) -> Result<Self> {
        let increasing = r.windows(2).all(|w| w[0] < w[1]);
        let in_range = r.iter().all(|&x| (1..=n).contains(&x));
        if !increasing || !in_range || n == 0 {
            return Err(Error::BadRVector { n, r });
        }
        Ok(Self { n, r })
    }

    /// Parses a comma-separated list; the empty string is the `t = 0` vector.
    pub fn parse(n: usize, s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Self::new(n, Vec::new());
        }
        let r = s
            .split(',')
            .map(|x| x.trim().parse::<usize>().map_err(|e| Error::Parse(format!("bad r entry {x:?}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, r)
    }

    /// All vectors of length `t`, in lexicographic order.
    pub fn all(n: usize, t: usize) -> Vec<RVector> {
        (1..=n).combinations(t).map(|r| RVector { n, r }).collect()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn t(&self) -> usize {
        self.r.len()
    }

    pub fn entries(&self) -> &[usize] {
        &self.r
    }

    /// `r_l` with the conventions `r_0 = 0`, `r_{t+1} = n`.
    fn boundary(&self, l: usize) -> usize {
        match l {
            0 => 0,
            l if l == self.t() + 1 => self.n,
            l => self.r[l - 1],
        }
    }

    /// `bounds[k-1] = l` for `r_l < k ≤ r_{l+1}`: the largest allowed `γ_k`.
    pub fn gamma_bounds(&self) -> Vec<usize> {
        let mut bounds = vec![0; self.n];
        for l in 0..=self.t() {
            for k in self.boundary(l) + 1..=self.boundary(l + 1) {
                bounds[k - 1] = l;
            }
        }
        bounds
    }
}

impl fmt::Display for RVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.r.iter().join(","))
    }
}

/// A row-extension vector `(γ_1, …, γ_n)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GammaVector(pub Vec<usize>);

impl GammaVector {
    pub fn entries(&self) -> &[usize] {
        &self.0
    }

    pub fn is_in(&self, r: &RVector) -> bool {
        self.0.len() == r.n() && self.0.iter().zip(r.gamma_bounds()).all(|(&g, b)| g <= b)
    }
}

impl fmt::Display for GammaVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.0.iter().join(","))
    }
}

/// `w_r = [⋃_{α≤t} [1, r_α − 1] × {α}] ∪ [1,n] × [t+1, n]`.
pub fn build_w_r(r: &RVector) -> Diagram {
    let n = r.n();
    let t = r.t();
    let mut g = Grid::empty(n);
    for (alpha, &ra) in r.entries().iter().enumerate() {
        for i in 1..ra {
            g.insert(Position::new(i, alpha + 1));
        }
    }
    for i in 1..=n {
        for a in t + 1..=n {
            g.insert(Position::new(i, a));
        }
    }
    Diagram::new(g).expect("w_r is a union of truncated columns")
}

/// True iff every cell's row suffix `(i, α..n)` lies in the grid.
pub fn column_convexity_holds(g: &Grid) -> bool {
    g.cells().all(|p| (p.col..=g.n()).all(|b| g.contains(Position::new(p.row, b))))
}

/// All of `Γ_r` in lexicographic order.
pub fn enumerate_gamma(r: &RVector) -> Vec<GammaVector> {
    r.gamma_bounds().into_iter().map(|b| 0..=b).multi_cartesian_product().map(GammaVector).collect()
}

/// `w_{r,γ} = w_r ∪ ⋃_k {k} × [1, γ_k]`.
pub fn build_w_r_gamma(r: &RVector, gamma: &GammaVector) -> Result<Diagram> {
    if !gamma.is_in(r) {
        return Err(Error::GammaOutOfRange { r: r.entries().to_vec(), gamma: gamma.0.clone() });
    }
    let mut g = *build_w_r(r).grid();
    for (k, &len) in gamma.entries().iter().enumerate() {
        for a in 1..=len {
            g.insert(Position::new(k + 1, a));
        }
    }
    Diagram::new(g)
}

/// Whether a restored matrix vanishes on `w_r` and is nonzero at every `(r_k, k)`.
pub fn survives(r: &RVector, m: &QuantumMatrix) -> bool {
    let w_r = build_w_r(r);
    w_r.cells().all(|p| m.get(p.row, p.col).is_zero())
        && r.entries().iter().enumerate().all(|(k, &rk)| !m.get(rk, k + 1).is_zero())
}

/// `{ w ∈ W : y = 0 on w_r and y_{r_k,k} ≠ 0 for all k }`, computed by
/// restoring every diagram.
pub fn surviving_diagrams(p: &TorusPresentation, r: &RVector) -> Result<BTreeSet<Diagram>> {
    let n = r.n();
    if n > MAX_SYMBOLIC_GRID {
        return Err(Error::SizeTooLarge { n, max: MAX_SYMBOLIC_GRID });
    }
    let mut out = BTreeSet::new();
    for w in enumerate_w(n)? {
        if survives(r, &restore(p, &w)?) {
            out.insert(w);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn pieces(n: usize) -> Vec<Grid> {
        let mut out = Vec::new();
        for v in Position::all(n) {
            out.push(Grid::from_cells(n, (1..=v.row).map(|i| Position::new(i, v.col))));
            out.push(Grid::from_cells(n, (1..=v.col).map(|a| Position::new(v.row, a))));
        }
        out
    }

    /// Every union of truncated rows and columns, by exhaustive subset search.
    fn brute_force_w(n: usize) -> HashSet<Grid> {
        let pieces = pieces(n);
        let mut out = HashSet::new();
        for mask in 0u64..(1 << pieces.len()) {
            let mut g = Grid::empty(n);
            for (k, piece) in pieces.iter().enumerate() {
                if mask >> k & 1 == 1 {
                    g = g.union(piece);
                }
            }
            out.insert(g);
        }
        out
    }

    #[test]
    fn membership_matches_brute_force() {
        for n in 1..=3 {
            let w = brute_force_w(n);
            for bits in 0u64..(1 << (n * n)) {
                let g = Grid { n, bits };
                assert_eq!(is_diagram(&g), w.contains(&g), "n={n} grid={g}");
            }
        }
    }

    #[test]
    fn membership_examples() {
        assert!(!is_diagram(&Grid::parse("00/01").unwrap()));
        assert!(is_diagram(&Grid::parse("01/01").unwrap()));
        assert!(is_diagram(&Grid::empty(3)));
        assert!(is_diagram(&Grid::full(3)));
        let err = Diagram::parse("00/01").unwrap_err();
        assert_eq!(err, Error::NotADiagram { grid: "00/01".into(), cell: Position::new(2, 2) });
    }

    #[test]
    fn grid_formats() {
        let g = Grid::parse("011/011/001").unwrap();
        assert_eq!(g.to_string(), "011/011/001");
        assert_eq!(g.to_rows(), vec![vec![0, 1, 1], vec![0, 1, 1], vec![0, 0, 1]]);
        assert_eq!(Grid::from_rows(&g.to_rows()).unwrap(), g);
        assert!(Grid::parse("01/0").is_err());
        assert!(Grid::parse("0a/00").is_err());
        assert!(Grid::parse("0000000/0000000/0000000/0000000/0000000/0000000/0000000").is_err());
        let d: Diagram = serde_json::from_str("\"011/011/001\"").unwrap();
        assert_eq!(serde_json::to_string(&d).unwrap(), "\"011/011/001\"");
        assert!(serde_json::from_str::<Diagram>("\"00/01\"").is_err());
    }

    #[test]
    fn enumeration_small() {
        let one: Vec<String> = enumerate_w(1).unwrap().map(|d| d.to_string()).collect();
        assert_eq!(one, vec!["0", "1"]);
        for n in 2..=3 {
            let listed: Vec<Grid> = enumerate_w(n).unwrap().map(|d| *d.grid()).collect();
            let mut expected: Vec<Grid> = brute_force_w(n).into_iter().collect();
            expected.sort();
            assert_eq!(listed, expected);
        }
        assert_eq!(enumerate_w(2).unwrap().count(), 14);
        assert_eq!(enumerate_w(3).unwrap().count(), 230);
        assert!(matches!(enumerate_w(7), Err(Error::SizeTooLarge { .. })));
        assert!(enumerate_w(0).is_err());
    }

    #[test]
    fn enumeration_is_sorted_by_bit_string() {
        let strings: Vec<String> = enumerate_w(4).unwrap().map(|d| d.to_string()).collect();
        assert!(strings.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn w_r_examples() {
        let r13 = RVector::new(3, vec![1, 3]).unwrap();
        let w = build_w_r(&r13);
        assert_eq!(w.to_string(), "011/011/001");
        assert_eq!(build_w_r(&RVector::new(3, vec![]).unwrap()), Diagram::full(3));
        assert_eq!(build_w_r(&RVector::new(3, vec![1, 2, 3]).unwrap()).to_string(), "011/001/000");
        assert!(column_convexity_holds(&w));
        assert!(column_convexity_holds(&Grid::full(3)));
        assert!(!column_convexity_holds(&Grid::parse("010/010/000").unwrap()));
    }

    #[test]
    fn w_r_is_convex_for_all_r() {
        for n in 1..=5 {
            for t in 0..=n {
                for r in RVector::all(n, t) {
                    assert!(column_convexity_holds(&build_w_r(&r)), "r={r}");
                }
            }
        }
    }

    #[test]
    fn rvector_validation() {
        assert!(RVector::new(3, vec![2, 2]).is_err());
        assert!(RVector::new(3, vec![3, 1]).is_err());
        assert!(RVector::new(3, vec![0]).is_err());
        assert!(RVector::new(3, vec![4]).is_err());
        assert_eq!(RVector::parse(3, "1, 3").unwrap().entries(), &[1, 3]);
        assert_eq!(RVector::parse(2, "").unwrap().t(), 0);
        assert!(RVector::parse(3, "1,x").is_err());
    }

    #[test]
    fn gamma_examples() {
        let r13 = RVector::new(3, vec![1, 3]).unwrap();
        let set: BTreeSet<Vec<usize>> = enumerate_gamma(&r13).into_iter().map(|g| g.0).collect();
        let expected: BTreeSet<Vec<usize>> =
            [vec![0, 0, 0], vec![0, 1, 0], vec![0, 0, 1], vec![0, 1, 1]].into_iter().collect();
        assert_eq!(set, expected);
        assert_eq!(enumerate_gamma(&RVector::new(4, vec![]).unwrap()), vec![GammaVector(vec![0; 4])]);
        assert_eq!(enumerate_gamma(&RVector::new(3, vec![1, 2]).unwrap()).len(), 6);
    }

    #[test]
    fn w_r_gamma_examples() {
        let r13 = RVector::new(3, vec![1, 3]).unwrap();
        let build = |g: Vec<usize>| build_w_r_gamma(&r13, &GammaVector(g)).unwrap().to_string();
        assert_eq!(build(vec![0, 0, 0]), "011/011/001");
        assert_eq!(build(vec![0, 1, 0]), "011/111/001");
        assert_eq!(build(vec![0, 0, 1]), "011/011/101");
        assert_eq!(build(vec![0, 1, 1]), "011/111/101");
        assert!(matches!(build_w_r_gamma(&r13, &GammaVector(vec![1, 0, 0])), Err(Error::GammaOutOfRange { .. })));
        assert!(build_w_r_gamma(&r13, &GammaVector(vec![0, 0])).is_err());
    }

    #[test]
    fn w_r_gamma_structure() {
        for n in 1..=4 {
            let mut seen = HashSet::new();
            for t in 0..=n {
                for r in RVector::all(n, t) {
                    let w_r = build_w_r(&r);
                    for gamma in enumerate_gamma(&r) {
                        let w = build_w_r_gamma(&r, &gamma).unwrap();
                        assert!(is_diagram(w.grid()));
                        assert!(w_r.is_subset(w.grid()));
                        for (k, &rk) in r.entries().iter().enumerate() {
                            assert!(!w.contains(Position::new(rk, k + 1)));
                        }
                        assert!(seen.insert(w), "duplicate diagram {w} at n={n}");
                    }
                }
            }
        }
    }

    #[test]
    fn surviving_examples() {
        let p = TorusPresentation::new(3);
        let r13 = RVector::new(3, vec![1, 3]).unwrap();
        let survivors = surviving_diagrams(&p, &r13).unwrap();
        let constructed: BTreeSet<Diagram> =
            enumerate_gamma(&r13).iter().map(|g| build_w_r_gamma(&r13, g).unwrap()).collect();
        assert_eq!(survivors, constructed);
        assert_eq!(survivors.len(), 4);

        let empty = RVector::new(3, vec![]).unwrap();
        assert_eq!(surviving_diagrams(&p, &empty).unwrap().into_iter().collect::<Vec<_>>(), vec![Diagram::full(3)]);

        let p2 = TorusPresentation::new(2);
        assert_eq!(surviving_diagrams(&p2, &RVector::new(2, vec![1, 2]).unwrap()).unwrap().len(), 2);
        let p5 = TorusPresentation::new(5);
        assert!(surviving_diagrams(&p5, &RVector::new(5, vec![1]).unwrap()).is_err());
    }
}
