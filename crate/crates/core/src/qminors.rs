//! Quantum minors of restored matrices and the rank classification of each
//! diagram.

use std::collections::BTreeMap;

use itertools::Itertools;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diagrams::{enumerate_w, Diagram};
use crate::error::{Error, Result};
use crate::qtorus::{TorusElement, TorusPresentation};
use crate::restoration::{restore, QuantumMatrix};
use crate::MAX_SYMBOLIC_GRID;

/// A square selection of rows and columns, both strictly increasing and 1-based.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawMinorIndex")]
pub struct MinorIndex {
    rows: Vec<usize>,
    cols: Vec<usize>,
}

#[derive(Deserialize)]
struct RawMinorIndex {
    rows: Vec<usize>,
    cols: Vec<usize>,
}

impl TryFrom<RawMinorIndex> for MinorIndex {
    type Error = Error;

    fn try_from(raw: RawMinorIndex) -> Result<Self> {
        Self::new(raw.rows, raw.cols)
    }
}

impl MinorIndex {
    pub fn new(rows: Vec<usize>, cols: Vec<usize>) -> Result<Self> {
        let increasing = |v: &[usize]| v.first().is_some_and(|&x| x >= 1) && v.windows(2).all(|w| w[0] < w[1]);
        if !increasing(&rows) || !increasing(&cols) || rows.len() != cols.len() {
            return Err(Error::Parse(format!("invalid minor rows={rows:?} cols={cols:?}")));
        }
        Ok(Self { rows, cols })
    }

    /// Every `m × m` selection of an `n × n` matrix, rows first, in
    /// lexicographic order.
    pub fn all(n: usize, m: usize) -> Vec<MinorIndex> {
        if m == 0 || m > n {
            return Vec::new();
        }
        let subsets: Vec<Vec<usize>> = (1..=n).combinations(m).collect();
        subsets
            .iter()
            .cartesian_product(subsets.iter())
            .map(|(r, c)| MinorIndex { rows: r.clone(), cols: c.clone() })
            .collect()
    }

    pub fn size(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[usize] {
        &self.rows
    }

    pub fn cols(&self) -> &[usize] {
        &self.cols
    }

    fn fits(&self, n: usize) -> bool {
        self.rows.last().is_some_and(|&r| r <= n) && self.cols.last().is_some_and(|&c| c <= n)
    }

    fn masks(&self) -> (usize, usize) {
        let mask = |v: &[usize]| v.iter().fold(0usize, |acc, &x| acc | 1 << (x - 1));
        (mask(&self.rows), mask(&self.cols))
    }
}

fn inversions(perm: &[usize]) -> u32 {
    perm.iter().enumerate().map(|(i, &a)| perm[i + 1..].iter().filter(|&&b| b < a).count() as u32).sum()
}

/// `Σ_σ (−q)^{inv(σ)} x_{r_1,c_σ(1)} ⋯ x_{r_m,c_σ(m)}`, expanded term by term
/// with the factors multiplied in increasing row order.
pub fn det_q(p: &TorusPresentation, m: &QuantumMatrix, idx: &MinorIndex) -> Result<TorusElement> {
    if !idx.fits(m.n()) {
        return Err(Error::DimensionMismatch { expected: m.n(), found: idx.rows.len().max(idx.cols.len()) });
    }
    let size = idx.size();
    if size == 1 {
        return Ok(m.get(idx.rows[0], idx.cols[0]).clone());
    }
    let mut total = TorusElement::zero();
    for perm in (0..size).permutations(size) {
        let factors: Vec<&TorusElement> =
            perm.iter().enumerate().map(|(k, &s)| m.get(idx.rows[k], idx.cols[s])).collect();
        if factors.iter().any(|f| f.is_zero()) {
            continue;
        }
        let mut product = factors[0].clone();
        for f in &factors[1..size - 1] {
            product = p.mul(&product, f);
        }
        let inv = inversions(&perm);
        let sign = if inv.is_multiple_of(2) { 1 } else { -1 };
        p.mul_acc(&mut total, &product, factors[size - 1], sign, inv as i32);
    }
    Ok(total)
}

/// Every quantum minor of a matrix, built by expanding along the last row:
///
/// ```text
/// D(R ∪ {i}, S) = Σ_{c ∈ S} D(R, S∖{c}) · (−q)^{#{s ∈ S : s > c}} · x_{i,c},   i > max R.
/// ```
///
/// This is the permutation sum regrouped by the image of the last row.
#[derive(Clone, Debug)]
pub struct MinorTable {
    n: usize,
    values: Vec<TorusElement>,
}

impl MinorTable {
    pub fn compute(p: &TorusPresentation, m: &QuantumMatrix) -> Result<Self> {
        let n = m.n();
        if p.n() != n {
            return Err(Error::DimensionMismatch { expected: p.n(), found: n });
        }
        let side = 1usize << n;
        let mut values = vec![TorusElement::zero(); side * side];
        values[0] = p.one();
        let mut row_masks: Vec<usize> = (1..side).collect();
        row_masks.sort_by_key(|r| r.count_ones());
        for rows in row_masks {
            let i = usize::BITS - 1 - rows.leading_zeros();
            let rest = rows & !(1 << i);
            let size = rows.count_ones();
            for cols in (1..side).filter(|c| c.count_ones() == size) {
                let mut acc = TorusElement::zero();
                for c in (0..n).filter(|&c| cols >> c & 1 == 1) {
                    let prev = &values[rest * side + (cols & !(1 << c))];
                    let entry = m.get(i as usize + 1, c + 1);
                    if prev.is_zero() || entry.is_zero() {
                        continue;
                    }
                    let above = (cols >> (c + 1)).count_ones();
                    let sign = if above % 2 == 0 { 1 } else { -1 };
                    p.mul_acc(&mut acc, prev, entry, sign, above as i32);
                }
                values[rows * side + cols] = acc;
            }
        }
        Ok(Self { n, values })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, idx: &MinorIndex) -> &TorusElement {
        let (r, c) = idx.masks();
        &self.values[r * (1 << self.n) + c]
    }

    /// Whether every `size × size` minor is zero.
    pub fn all_vanish(&self, size: usize) -> bool {
        MinorIndex::all(self.n, size).iter().all(|idx| self.get(idx).is_zero())
    }

    /// The lexicographically least nonzero minor of the given size.
    pub fn first_nonvanishing(&self, size: usize) -> Option<MinorIndex> {
        MinorIndex::all(self.n, size).into_iter().find(|idx| !self.get(idx).is_zero())
    }
}

/// Whether every `size × size` quantum minor of `m` is zero.
pub fn all_minors_vanish(p: &TorusPresentation, m: &QuantumMatrix, size: usize) -> Result<bool> {
    for idx in MinorIndex::all(m.n(), size) {
        if !det_q(p, m, &idx)?.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The rank of a diagram's quotient, with a witnessing minor.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassificationRecord {
    pub diagram: Diagram,
    pub rank: usize,
    pub witness: Option<MinorIndex>,
    /// Every size up to `rank` has a nonvanishing minor, so vanishing is
    /// monotone in size and the rank is unambiguous.
    pub gap_free: bool,
}

fn classify_with_table(p: &TorusPresentation, w: &Diagram) -> Result<(ClassificationRecord, MinorTable)> {
    let n = w.n();
    if n > MAX_SYMBOLIC_GRID {
        return Err(Error::SizeTooLarge { n, max: MAX_SYMBOLIC_GRID });
    }
    let table = MinorTable::compute(p, &restore(p, w)?)?;
    let witness = (1..=n).rev().find_map(|m| table.first_nonvanishing(m));
    let rank = witness.as_ref().map_or(0, MinorIndex::size);
    let gap_free = (1..rank).all(|m| !table.all_vanish(m));
    Ok((ClassificationRecord { diagram: *w, rank, witness, gap_free }, table))
}

/// Classifies `w` without failing on a gap.
pub fn classification_record(p: &TorusPresentation, w: &Diagram) -> Result<ClassificationRecord> {
    Ok(classify_with_table(p, w)?.0)
}

/// Classifies `w`, failing with [`Error::GapViolation`] if some size below the
/// rank has only vanishing minors.
pub fn classify_rank(p: &TorusPresentation, w: &Diagram) -> Result<ClassificationRecord> {
    let (rec, table) = classify_with_table(p, w)?;
    if let Some(size) = (1..rec.rank).find(|&m| table.all_vanish(m)) {
        return Err(Error::GapViolation { diagram: w.to_string(), size });
    }
    Ok(rec)
}

/// Classifies every diagram of size `n` in parallel, in enumeration order.
pub fn classify_all(n: usize) -> Result<Vec<ClassificationRecord>> {
    if n > MAX_SYMBOLIC_GRID {
        return Err(Error::SizeTooLarge { n, max: MAX_SYMBOLIC_GRID });
    }
    let p = TorusPresentation::new(n);
    let diagrams: Vec<Diagram> = enumerate_w(n)?.collect();
    diagrams.par_iter().map(|w| classify_rank(&p, w)).collect()
}

/// Number of diagrams of each rank.
pub fn rank_census(n: usize) -> Result<BTreeMap<usize, u64>> {
    Ok(census_of(&classify_all(n)?))
}

pub fn census_of(records: &[ClassificationRecord]) -> BTreeMap<usize, u64> {
    let mut census: BTreeMap<usize, u64> = (0..=records.first().map_or(0, |r| r.diagram.n())).map(|t| (t, 0)).collect();
    for rec in records {
        *census.entry(rec.rank).or_default() += 1;
    }
    census
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcoeff::QLaurent;
    use crate::qtorus::{Monomial, Position};

    fn gen(p: &TorusPresentation, i: usize, a: usize) -> TorusElement {
        p.generator(Position::new(i, a))
    }

    #[test]
    fn minor_index_validation() {
        assert!(MinorIndex::new(vec![1, 2], vec![2, 3]).is_ok());
        assert!(MinorIndex::new(vec![2, 1], vec![1, 2]).is_err());
        assert!(MinorIndex::new(vec![1], vec![1, 2]).is_err());
        assert!(MinorIndex::new(vec![], vec![]).is_err());
        assert!(MinorIndex::new(vec![0], vec![1]).is_err());
        assert_eq!(MinorIndex::all(3, 2).len(), 9);
        assert_eq!(MinorIndex::all(3, 2)[1], MinorIndex::new(vec![1, 2], vec![1, 3]).unwrap());
        let json = serde_json::to_string(&MinorIndex::new(vec![1, 2], vec![1, 2]).unwrap()).unwrap();
        assert_eq!(json, r#"{"rows":[1,2],"cols":[1,2]}"#);
        assert!(serde_json::from_str::<MinorIndex>(r#"{"rows":[2,1],"cols":[1,2]}"#).is_err());
    }

    #[test]
    fn generic_2x2() {
        let p = TorusPresentation::new(2);
        let m = QuantumMatrix::generators(&p);
        let full = MinorIndex::new(vec![1, 2], vec![1, 2]).unwrap();
        let expected = p
            .mul(&gen(&p, 1, 1), &gen(&p, 2, 2))
            .sub(&p.mul(&gen(&p, 1, 2), &gen(&p, 2, 1)).scale(&QLaurent::q_pow(1)));
        assert_eq!(det_q(&p, &m, &full).unwrap(), expected);
        assert_eq!(MinorTable::compute(&p, &m).unwrap().get(&full), &expected);
        assert_eq!(expected.to_string(), "T[1,1]*T[2,2] - q*T[1,2]*T[2,1]");
    }

    #[test]
    fn restored_2x2() {
        let p = TorusPresentation::new(2);
        let full = MinorIndex::new(vec![1, 2], vec![1, 2]).unwrap();
        let m = restore(&p, &Diagram::empty(2)).unwrap();
        let mut e = vec![0; 4];
        e[0] = 1;
        e[3] = 1;
        let expected = TorusElement::monomial(Monomial::from_exponents(e), QLaurent::one());
        assert_eq!(det_q(&p, &m, &full).unwrap(), expected);
        assert!(!all_minors_vanish(&p, &m, 2).unwrap());
        let m11 = restore(&p, &Diagram::parse("10/00").unwrap()).unwrap();
        assert!(det_q(&p, &m11, &full).unwrap().is_zero());
        assert!(all_minors_vanish(&p, &m11, 2).unwrap());
        assert!(all_minors_vanish(&p, &restore(&p, &Diagram::full(2)).unwrap(), 1).unwrap());
    }

    #[test]
    fn one_by_one_minors_are_entries() {
        let p = TorusPresentation::new(3);
        let m = restore(&p, &Diagram::parse("001/001/000").unwrap()).unwrap();
        for pos in Position::all(3) {
            let idx = MinorIndex::new(vec![pos.row], vec![pos.col]).unwrap();
            assert_eq!(&det_q(&p, &m, &idx).unwrap(), m.get(pos.row, pos.col));
        }
    }

    #[test]
    fn generic_minors_have_factorial_terms() {
        let p = TorusPresentation::new(3);
        let m = QuantumMatrix::generators(&p);
        let table = MinorTable::compute(&p, &m).unwrap();
        for size in 1..=3usize {
            let fact: usize = (1..=size).product();
            for idx in MinorIndex::all(3, size) {
                assert_eq!(table.get(&idx).len(), fact);
            }
        }
    }

    #[test]
    fn table_matches_permutation_sum() {
        for n in 1..=3 {
            let p = TorusPresentation::new(n);
            for w in enumerate_w(n).unwrap() {
                let m = restore(&p, &w).unwrap();
                let table = MinorTable::compute(&p, &m).unwrap();
                for size in 1..=n {
                    for idx in MinorIndex::all(n, size) {
                        assert_eq!(table.get(&idx), &det_q(&p, &m, &idx).unwrap(), "w={w} idx={idx:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn classification_examples() {
        let p = TorusPresentation::new(2);
        assert_eq!(classify_rank(&p, &Diagram::full(2)).unwrap().rank, 0);
        assert_eq!(classify_rank(&p, &Diagram::full(2)).unwrap().witness, None);
        assert_eq!(classify_rank(&p, &Diagram::empty(2)).unwrap().rank, 2);
        let rec = classify_rank(&p, &Diagram::parse("10/00").unwrap()).unwrap();
        assert_eq!(rec.rank, 1);
        assert_eq!(rec.witness, Some(MinorIndex::new(vec![1], vec![1]).unwrap()));
        let p3 = TorusPresentation::new(3);
        let rec = classify_rank(&p3, &Diagram::parse("011/011/001").unwrap()).unwrap();
        assert_eq!(
            serde_json::to_string(&rec).unwrap(),
            r#"{"diagram":"011/011/001","rank":2,"witness":{"rows":[1,3],"cols":[1,2]},"gap_free":true}"#
        );
        let full = serde_json::to_string(&classify_rank(&p3, &Diagram::full(3)).unwrap()).unwrap();
        assert_eq!(full, r#"{"diagram":"111/111/111","rank":0,"witness":null,"gap_free":true}"#);
        let back: ClassificationRecord = serde_json::from_str(&full).unwrap();
        assert_eq!(back.diagram, Diagram::full(3));
    }

    #[test]
    fn small_censuses() {
        assert_eq!(rank_census(1).unwrap(), BTreeMap::from([(0, 1), (1, 1)]));
        assert_eq!(rank_census(2).unwrap(), BTreeMap::from([(0, 1), (1, 9), (2, 4)]));
        assert!(matches!(rank_census(5), Err(Error::SizeTooLarge { .. })));
    }
}
