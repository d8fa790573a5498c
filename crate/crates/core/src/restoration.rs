//! The standard deleting-derivations algorithm and its inverse, the
//! restoration algorithm, run inside the quantum torus.
//!
//! For a diagram `w` the restoration starts from `t_{i,α} = 0` on `w` and
//! `t_{i,α} = T_{i,α}` elsewhere, then for every step `(j,β)` of `E_s` in
//! increasing order replaces, when the pivot `x_{j,β}` is nonzero,
//!
//! ```text
//! x_{i,α} ← x_{i,α} + x_{i,β}·x_{j,β}⁻¹·x_{j,α}      (i < j, α < β).
//! ```
//!
//! Entry `(j,β)` is only touched by steps `(j',β')` with `j < j'`, and every
//! step processed before `(j,β)` has `j' ≤ j`, so each pivot is still the
//! initial `t_{j,β}`: zero or a bare generator. This is what makes the torus
//! (rather than a skew field of fractions) sufficient; it is checked at every
//! step and a failure aborts with [`Error::PivotNotMonomial`].

use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};

use crate::diagrams::{Diagram, Grid};
use crate::error::{Error, Result};
use crate::qtorus::{Position, TorusElement, TorusPresentation};

static PIVOT_CHECKS: AtomicU64 = AtomicU64::new(0);

/// Number of pivot assertions evaluated by this process so far.
pub fn pivot_checks_performed() -> u64 {
    PIVOT_CHECKS.load(Ordering::Relaxed)
}

/// An element of `E_s = ([1,n]² ∪ {(n,n+1)}) \ {(1,1)}`; the derived order is
/// the standard (lexicographic) order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Step {
    pub row: usize,
    pub col: usize,
}

impl Step {
    pub const fn new(row: usize, col: usize) -> Self {
        Self { row, col }
    }

    /// The terminal step `(n, n+1)`.
    pub const fn end(n: usize) -> Self {
        Self { row: n, col: n + 1 }
    }

    pub fn position(self) -> Position {
        Position::new(self.row, self.col)
    }
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.row, self.col)
    }
}

/// `E_s` materialized in increasing order, with successors.
#[derive(Clone, Debug)]
pub struct StepIndex {
    steps: Vec<Step>,
}

impl StepIndex {
    pub fn new(n: usize) -> Self {
        let mut steps: Vec<Step> =
            Position::all(n).filter(|p| (p.row, p.col) != (1, 1)).map(|p| Step::new(p.row, p.col)).collect();
        steps.push(Step::end(n));
        Self { steps }
    }

    /// All of `E_s`, including `(n, n+1)`.
    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    /// The steps at which the algorithms act, i.e. `E_s \ {(n,n+1)}`.
    pub fn active(&self) -> &[Step] {
        &self.steps[..self.steps.len() - 1]
    }

    pub fn contains(&self, s: Step) -> bool {
        self.steps.binary_search(&s).is_ok()
    }

    /// `(j,β)⁺`; `None` for `(n,n+1)` or a step outside `E_s`.
    pub fn successor(&self, s: Step) -> Option<Step> {
        let i = self.steps.binary_search(&s).ok()?;
        self.steps.get(i + 1).copied()
    }
}

/// An `n × n` matrix of torus elements over a common presentation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuantumMatrix {
    n: usize,
    entries: Vec<TorusElement>,
}

impl QuantumMatrix {
    pub fn zero(n: usize) -> Self {
        Self { n, entries: vec![TorusElement::zero(); n * n] }
    }

    /// The matrix of generators `T_{i,α}`.
    pub fn generators(p: &TorusPresentation) -> Self {
        let n = p.n();
        Self { n, entries: Position::all(n).map(|pos| p.generator(pos)).collect() }
    }

    /// Generators with the cells of `w` set to zero: the `t`-matrix of `w`.
    pub fn initial(p: &TorusPresentation, w: &Grid) -> Self {
        let mut m = Self::generators(p);
        for pos in w.cells() {
            m.set(pos.row, pos.col, TorusElement::zero());
        }
        m
    }

    pub fn from_entries(n: usize, entries: Vec<TorusElement>) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, found: entries.len() });
        }
        Ok(Self { n, entries })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Entry `(i, α)`, 1-based.
    pub fn get(&self, i: usize, a: usize) -> &TorusElement {
        &self.entries[(i - 1) * self.n + (a - 1)]
    }

    pub fn set(&mut self, i: usize, a: usize, value: TorusElement) {
        self.entries[(i - 1) * self.n + (a - 1)] = value;
    }

    /// Entries in row-major order.
    pub fn entries(&self) -> &[TorusElement] {
        &self.entries
    }
}

fn check_size(p: &TorusPresentation, n: usize) -> Result<()> {
    if p.n() != n {
        return Err(Error::DimensionMismatch { expected: p.n(), found: n });
    }
    Ok(())
}

/// `M_w`: the images of the canonical generators in the quotient by `J_w`.
pub fn restore(p: &TorusPresentation, w: &Diagram) -> Result<QuantumMatrix> {
    restore_through(p, w, Step::end(w.n()))
}

/// The intermediate matrix `M^{(target)}` of the restoration of `w`
/// (`target = (1,2)` gives the `t`-matrix, `(n,n+1)` gives `M_w`).
pub fn restore_through(p: &TorusPresentation, w: &Diagram, target: Step) -> Result<QuantumMatrix> {
    check_size(p, w.n())?;
    let initial = QuantumMatrix::initial(p, w.grid());
    let mut m = initial.clone();
    for &step in StepIndex::new(w.n()).active().iter().take_while(|&&s| s < target) {
        PIVOT_CHECKS.fetch_add(1, Ordering::Relaxed);
        let (j, b) = (step.row, step.col);
        if m.get(j, b) != initial.get(j, b) {
            return Err(Error::PivotNotMonomial { step, position: step.position(), value: m.get(j, b).to_string() });
        }
        apply_step(p, &mut m, step, 1)?;
    }
    Ok(m)
}

/// One step of either algorithm at `(j,β)`: `sign = +1` restores, `−1` deletes.
fn apply_step(p: &TorusPresentation, m: &mut QuantumMatrix, step: Step, sign: i8) -> Result<()> {
    let (j, b) = (step.row, step.col);
    let pivot = m.get(j, b);
    if pivot.is_zero() {
        return Ok(());
    }
    let inv = p.invert_monomial(pivot).map_err(|_| Error::PivotNotMonomial {
        step,
        position: step.position(),
        value: pivot.to_string(),
    })?;
    // Row j and column β are not modified by this step.
    for i in 1..j {
        let left = p.mul(m.get(i, b), &inv);
        if left.is_zero() {
            continue;
        }
        for a in 1..b {
            let mut updated = m.get(i, a).clone();
            p.mul_acc(&mut updated, &left, m.get(j, a), sign, 0);
            m.set(i, a, updated);
        }
    }
    Ok(())
}

/// Runs the deleting-derivations algorithm from `(n,n+1)` down to `(1,2)`,
/// returning `M^{(1,2)}`.
pub fn delete_derivations(p: &TorusPresentation, m: &QuantumMatrix) -> Result<QuantumMatrix> {
    delete_derivations_through(p, m, Step::new(1, 2))
}

/// Runs the deleting-derivations algorithm down to `M^{(target)}`.
pub fn delete_derivations_through(p: &TorusPresentation, m: &QuantumMatrix, target: Step) -> Result<QuantumMatrix> {
    check_size(p, m.n())?;
    let mut out = m.clone();
    for &step in StepIndex::new(m.n()).active().iter().rev().take_while(|&&s| s >= target) {
        apply_step(p, &mut out, step, -1)?;
    }
    Ok(out)
}

/// Is-zero flags of the entries.
pub fn zero_pattern(m: &QuantumMatrix) -> Grid {
    Grid::from_cells(m.n(), Position::all(m.n()).filter(|pos| m.get(pos.row, pos.col).is_zero()))
}
