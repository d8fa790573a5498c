//! The quantum torus on the `n²` generators `T_{i,α}`.
//!
//! Generators are ordered row-major. For positions `u` before `v`,
//! `T_v·T_u = q^{λ(u,v)}·T_u·T_v`, where `λ(u,v) = −1` when `u` and `v` share
//! a row or a column and `0` otherwise. Every element has a unique normal
//! form `Σ c_e·T^e` with `T^e = T_{1,1}^{e_1} ⋯ T_{n,n}^{e_{n²}}`, and
//!
//! ```text
//! T^e · T^f = q^{c(e,f)} · T^{e+f},   c(e,f) = Σ_{a<b} λ(a,b)·e_b·f_a.
//! ```

use std::cmp::Ordering;
use std::fmt;

use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::qcoeff::QLaurent;
use crate::restoration::{QuantumMatrix, Step};

/// A grid cell `(i, α)`, 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Position {
    pub row: usize,
    pub col: usize,
}

impl Position {
    pub const fn new(row: usize, col: usize) -> Self {
        Self { row, col }
    }

    /// Row-major index in `0..n²`.
    pub fn index(self, n: usize) -> usize {
        (self.row - 1) * n + (self.col - 1)
    }

    pub fn from_index(k: usize, n: usize) -> Self {
        Self { row: k / n + 1, col: k % n + 1 }
    }

    /// All cells of the `n × n` grid in row-major (standard) order.
    pub fn all(n: usize) -> impl Iterator<Item = Position> {
        (1..=n).flat_map(move |row| (1..=n).map(move |col| Position { row, col }))
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.row, self.col)
    }
}

/// Exponent vector of a normal-ordered monomial, indexed row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(Vec<i32>);

impl Monomial {
    pub fn identity(n: usize) -> Self {
        Self(vec![0; n * n])
    }

    pub fn generator(n: usize, pos: Position) -> Self {
        let mut e = vec![0; n * n];
        e[pos.index(n)] = 1;
        Self(e)
    }

    pub fn from_exponents(exponents: Vec<i32>) -> Self {
        Self(exponents)
    }

    pub fn exponents(&self) -> &[i32] {
        &self.0
    }

    pub fn exponent(&self, n: usize, pos: Position) -> i32 {
        self.0[pos.index(n)]
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn inverse(&self) -> Self {
        Self(self.0.iter().map(|e| -e).collect())
    }

    fn product(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Grid size implied by the vector length.
    fn grid(&self) -> usize {
        let n = (self.0.len() as f64).sqrt().round() as usize;
        debug_assert_eq!(n * n, self.0.len());
        n
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.grid();
        let mut first = true;
        for (k, &e) in self.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                f.write_str("*")?;
            }
            first = false;
            let p = Position::from_index(k, n);
            write!(f, "T[{},{}]", p.row, p.col)?;
            if e != 1 {
                write!(f, "^{e}")?;
            }
        }
        if first {
            f.write_str("1")?;
        }
        Ok(())
    }
}

/// The commutation data of the torus.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorusPresentation {
    n: usize,
    /// `λ(a, b)` for `a < b` row-major, stored densely at `a * n² + b`.
    lambda: Vec<i32>,
}

impl TorusPresentation {
    /// The quantum affine space relations satisfied by `T_{i,α}`: same row or
    /// same column q-commute with exponent −1, all other pairs commute.
    pub fn new(n: usize) -> Self {
        let nn = n * n;
        let mut lambda = vec![0; nn * nn];
        for u in Position::all(n) {
            for v in Position::all(n) {
                if u.index(n) < v.index(n) && (u.row == v.row || u.col == v.col) {
                    lambda[u.index(n) * nn + v.index(n)] = -1;
                }
            }
        }
        Self { n, lambda }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// The `d` with `T_v·T_u = q^d·T_u·T_v`. Antisymmetric; zero on the diagonal.
    pub fn lambda(&self, u: Position, v: Position) -> i32 {
        let (a, b) = (u.index(self.n), v.index(self.n));
        let nn = self.n * self.n;
        match a.cmp(&b) {
            Ordering::Less => self.lambda[a * nn + b],
            Ordering::Greater => -self.lambda[b * nn + a],
            Ordering::Equal => 0,
        }
    }

    /// `g_f[b] = Σ_{a<b} λ(a,b)·f_a`, so that `c(e,f) = e·g_f`.
    fn twist_vector(&self, f: &Monomial) -> Vec<i32> {
        let nn = self.n * self.n;
        (0..nn).map(|b| (0..b).map(|a| self.lambda[a * nn + b] * f.0[a]).sum()).collect()
    }

    /// The exponent `c(e,f)` in `T^e·T^f = q^{c(e,f)}·T^{e+f}`.
    pub fn twist(&self, e: &Monomial, f: &Monomial) -> i32 {
        dot(&e.0, &self.twist_vector(f))
    }

    pub fn generator(&self, pos: Position) -> TorusElement {
        TorusElement::monomial(Monomial::generator(self.n, pos), QLaurent::one())
    }

    pub fn one(&self) -> TorusElement {
        TorusElement::monomial(Monomial::identity(self.n), QLaurent::one())
    }

    /// The normal-ordered product `a·b`.
    pub fn mul(&self, a: &TorusElement, b: &TorusElement) -> TorusElement {
        let mut out = TorusElement::zero();
        self.mul_acc(&mut out, a, b, 1, 0);
        out
    }

    /// `acc += sign·q^k·a·b`.
    pub fn mul_acc(&self, acc: &mut TorusElement, a: &TorusElement, b: &TorusElement, sign: i8, k: i32) {
        if a.is_zero() || b.is_zero() {
            return;
        }
        let twisted: Vec<(&Monomial, &QLaurent, Vec<i32>)> =
            b.terms.iter().map(|(f, cf)| (f, cf, self.twist_vector(f))).collect();
        for (e, ce) in &a.terms {
            for (f, cf, g) in &twisted {
                let c = dot(&e.0, g) + k;
                let coeff = (ce * *cf).mul_unit(sign, c);
                acc.add_term(e.product(f), &coeff);
            }
        }
        acc.prune();
    }

    /// Two-sided inverse of a single-term element `±q^k·T^e`.
    pub fn invert_monomial(&self, a: &TorusElement) -> Result<TorusElement> {
        let (e, c) = a.single_term().ok_or_else(|| Error::NotInvertible(a.to_string()))?;
        let c_inv = c.invert_unit().map_err(|_| Error::NotInvertible(a.to_string()))?;
        let inv = e.inverse();
        // T^e·T^{-e} = q^{c(e,-e)}
        let shift = -self.twist(e, &inv);
        Ok(TorusElement::monomial(inv, c_inv.mul_unit(1, shift)))
    }
}

fn dot(a: &[i32], b: &[i32]) -> i32 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// An element of the quantum torus in normal form.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TorusElement {
    terms: FxHashMap<Monomial, QLaurent>,
}

impl TorusElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn monomial(m: Monomial, c: QLaurent) -> Self {
        let mut terms = FxHashMap::default();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Self { terms }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, QLaurent)>) -> Self {
        let mut out = Self::zero();
        for (m, c) in terms {
            out.add_term(m, &c);
        }
        out.prune();
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms sorted by descending exponent vector (the rendering order).
    pub fn sorted_terms(&self) -> Vec<(&Monomial, &QLaurent)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| b.0.cmp(a.0));
        v
    }

    pub fn coeff(&self, m: &Monomial) -> QLaurent {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    pub fn single_term(&self) -> Option<(&Monomial, &QLaurent)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    fn add_term(&mut self, m: Monomial, c: &QLaurent) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(existing) => *existing += c,
            None => {
                self.terms.insert(m, c.clone());
            }
        }
    }

    fn prune(&mut self) {
        self.terms.retain(|_, c| !c.is_zero());
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn add_assign(&mut self, other: &Self) {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c);
        }
        self.prune();
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale_unit(-1, 0)
    }

    /// Multiplies every coefficient by the central scalar `s`.
    pub fn scale(&self, s: &QLaurent) -> Self {
        if s.is_zero() {
            return Self::zero();
        }
        Self { terms: self.terms.iter().map(|(m, c)| (m.clone(), c * s)).collect() }
    }

    /// Multiplies by `sign·q^k`.
    pub fn scale_unit(&self, sign: i8, k: i32) -> Self {
        Self { terms: self.terms.iter().map(|(m, c)| (m.clone(), c.mul_unit(sign, k))).collect() }
    }
}

impl fmt::Display for TorusElement {
    /// `T[1,1] + q*T[1,2]*T[2,1]*T[2,2]^-1`; terms by descending exponent
    /// vector, factors in normal order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let terms = self.sorted_terms();
        let lone = terms.len() == 1;
        for (idx, (m, c)) in terms.into_iter().enumerate() {
            let (negative, body) = match c.as_single() {
                Some((e, coeff)) => {
                    let abs = QLaurent::term(num_traits::Signed::abs(coeff), e);
                    let body = if m.is_identity() {
                        abs.to_string()
                    } else if abs.is_one() {
                        m.to_string()
                    } else {
                        format!("{abs}*{m}")
                    };
                    (num_traits::Signed::is_negative(coeff), body)
                }
                None if m.is_identity() && lone => (false, c.to_string()),
                None if m.is_identity() => (false, format!("({c})")),
                None => (false, format!("({c})*{m}")),
            };
            match (idx, negative) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            f.write_str(&body)?;
        }
        Ok(())
    }
}

/// One of the six defining relations on a 2×2 submatrix `(x y; z t)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Relation {
    /// `yx = q⁻¹xy`
    YX,
    /// `zx = q⁻¹xz`
    ZX,
    /// `zy = yz`
    ZY,
    /// `ty = q⁻¹yt`
    TY,
    /// `tz = q⁻¹zt`
    TZ,
    /// `tx = xt − (q − q⁻¹)yz`, or `tx = xt` where the case split asks for it.
    TX,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::YX => "yx=q^-1*xy",
            Relation::ZX => "zx=q^-1*xz",
            Relation::ZY => "zy=yz",
            Relation::TY => "ty=q^-1*yt",
            Relation::TZ => "tz=q^-1*zt",
            Relation::TX => "tx=xt-(q-q^-1)*yz",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub rows: (usize, usize),
    pub cols: (usize, usize),
    pub relation: Relation,
    /// True when the expected form was the commuting `tx = xt`.
    pub commuting_case: bool,
}

/// Every violated relation of a matrix; empty means the matrix satisfies the
/// checked relation family.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RelationReport {
    pub violations: Vec<Violation>,
}

impl RelationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn relations(&self) -> impl Iterator<Item = Relation> + '_ {
        self.violations.iter().map(|v| v.relation)
    }
}

/// Checks that `m` is q-quantum: all six relations on every 2×2 submatrix.
pub fn check_q_quantum(p: &TorusPresentation, m: &QuantumMatrix) -> RelationReport {
    let n = m.n();
    check_relations(p, m, Step::end(n))
}

/// Checks that `m` is `(j,β)`-q-quantum: the diagonal relation degenerates to
/// `tx = xt` when the bottom-right entry sits at or after `step`.
pub fn check_jbeta_quantum(p: &TorusPresentation, m: &QuantumMatrix, step: Step) -> RelationReport {
    check_relations(p, m, step)
}

fn check_relations(p: &TorusPresentation, m: &QuantumMatrix, step: Step) -> RelationReport {
    let n = m.n();
    let q_minus_qinv = QLaurent::from_terms([(1, 1), (-1, -1)]);
    let mut report = RelationReport::default();
    // uv - q^k vu
    let q_commutator = |u: &TorusElement, v: &TorusElement, k: i32| {
        let mut acc = p.mul(u, v);
        p.mul_acc(&mut acc, v, u, -1, k);
        acc
    };
    for i in 1..=n {
        for j in i + 1..=n {
            for a in 1..=n {
                for b in a + 1..=n {
                    let x = m.get(i, a);
                    let y = m.get(i, b);
                    let z = m.get(j, a);
                    let t = m.get(j, b);
                    let commuting = Step::new(j, b) >= step;
                    let checks = [
                        (Relation::YX, q_commutator(y, x, -1).is_zero()),
                        (Relation::ZX, q_commutator(z, x, -1).is_zero()),
                        (Relation::ZY, q_commutator(z, y, 0).is_zero()),
                        (Relation::TY, q_commutator(t, y, -1).is_zero()),
                        (Relation::TZ, q_commutator(t, z, -1).is_zero()),
                        (Relation::TX, {
                            let mut diff = q_commutator(t, x, 0);
                            if !commuting {
                                diff.add_assign(&p.mul(y, z).scale(&q_minus_qinv));
                            }
                            diff.is_zero()
                        }),
                    ];
                    for (relation, ok) in checks {
                        if !ok {
                            report.violations.push(Violation {
                                rows: (i, j),
                                cols: (a, b),
                                relation,
                                commuting_case: relation == Relation::TX && commuting,
                            });
                        }
                    }
                }
            }
        }
    }
    report
}
