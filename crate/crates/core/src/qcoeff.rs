//! The Laurent polynomial ring `ℤ[q, q⁻¹]`.
//!
//! Every value produced by the restoration pipeline lies in this ring: only
//! units `±q^k` are ever inverted, so integer coefficients suffice and
//! equality stays exact.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// An element of `ℤ[q, q⁻¹]`, stored as exponent-sorted `(exponent, coefficient)`
/// pairs with no zero coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct QLaurent {
    terms: Vec<(i32, BigInt)>,
}

impl QLaurent {
    pub fn zero() -> Self {
        Self { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self::q_pow(0)
    }

    /// `q^k`.
    pub fn q_pow(k: i32) -> Self {
        Self::term(1, k)
    }

    /// `c·q^k`.
    pub fn term(c: impl Into<BigInt>, k: i32) -> Self {
        let c = c.into();
        if c.is_zero() {
            Self::zero()
        } else {
            Self { terms: vec![(k, c)] }
        }
    }

    /// `(−q)^k` for `k ≥ 0`.
    pub fn neg_q_pow(k: u32) -> Self {
        let sign = if k.is_multiple_of(2) { 1 } else { -1 };
        Self::term(sign, k as i32)
    }

    /// Builds the canonical form of an arbitrary list of terms; repeated
    /// exponents are summed.
    pub fn from_terms<I, C>(terms: I) -> Self
    where
        I: IntoIterator<Item = (i32, C)>,
        C: Into<BigInt>,
    {
        let mut raw: Vec<(i32, BigInt)> = terms.into_iter().map(|(e, c)| (e, c.into())).collect();
        raw.sort_by_key(|(e, _)| *e);
        Self { terms: combine_sorted(raw) }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        matches!(self.terms.as_slice(), [(0, c)] if c.is_one())
    }

    /// Terms in increasing exponent order.
    pub fn terms(&self) -> &[(i32, BigInt)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of `q^k`.
    pub fn coeff(&self, k: i32) -> BigInt {
        match self.terms.binary_search_by_key(&k, |(e, _)| *e) {
            Ok(i) => self.terms[i].1.clone(),
            Err(_) => BigInt::zero(),
        }
    }

    /// If `self = ±q^k`, returns `(sign, k)`.
    pub fn as_unit(&self) -> Option<(i8, i32)> {
        match self.terms.as_slice() {
            [(k, c)] if c.is_one() => Some((1, *k)),
            [(k, c)] if (-c).is_one() => Some((-1, *k)),
            _ => None,
        }
    }

    /// Inverse of a unit `±q^k`.
    pub fn invert_unit(&self) -> Result<Self> {
        match self.as_unit() {
            Some((sign, k)) => Ok(Self::term(sign, -k)),
            None => Err(Error::NotAUnit(self.to_string())),
        }
    }

    /// Multiplies by `sign·q^k`; cheaper than a general product.
    pub fn mul_unit(&self, sign: i8, k: i32) -> Self {
        let terms = self.terms.iter().map(|(e, c)| (e + k, if sign < 0 { -c } else { c.clone() })).collect();
        Self { terms }
    }

    fn add_signed(&self, other: &Self, negate_other: bool) -> Self {
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut a, mut b) = (self.terms.iter().peekable(), other.terms.iter().peekable());
        loop {
            let next = match (a.peek(), b.peek()) {
                (None, None) => break,
                (Some(_), None) => a.next().map(|(e, c)| (*e, c.clone())),
                (None, Some(_)) => b.next().map(|(e, c)| (*e, signed(c, negate_other))),
                (Some((ea, _)), Some((eb, _))) => {
                    if ea < eb {
                        a.next().map(|(e, c)| (*e, c.clone()))
                    } else if eb < ea {
                        b.next().map(|(e, c)| (*e, signed(c, negate_other)))
                    } else {
                        let (e, ca) = a.next().unwrap();
                        let (_, cb) = b.next().unwrap();
                        let c = if negate_other { ca - cb } else { ca + cb };
                        Some((*e, c))
                    }
                }
            };
            if let Some((e, c)) = next {
                if !c.is_zero() {
                    out.push((e, c));
                }
            }
        }
        Self { terms: out }
    }

    fn mul_ref(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        if let Some((s, k)) = other.as_unit() {
            return self.mul_unit(s, k);
        }
        if let Some((s, k)) = self.as_unit() {
            return other.mul_unit(s, k);
        }
        let mut raw = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                raw.push((ea + eb, ca * cb));
            }
        }
        raw.sort_by_key(|(e, _)| *e);
        Self { terms: combine_sorted(raw) }
    }
}

fn signed(c: &BigInt, negate: bool) -> BigInt {
    if negate {
        -c
    } else {
        c.clone()
    }
}

/// Sums adjacent equal exponents and drops zeros. Input must be sorted.
fn combine_sorted(raw: Vec<(i32, BigInt)>) -> Vec<(i32, BigInt)> {
    let mut out: Vec<(i32, BigInt)> = Vec::with_capacity(raw.len());
    for (e, c) in raw {
        match out.last_mut() {
            Some((le, lc)) if *le == e => *lc += c,
            _ => out.push((e, c)),
        }
    }
    out.retain(|(_, c)| !c.is_zero());
    out
}

impl QLaurent {
    /// The `(exponent, coefficient)` pair of a single-term element.
    pub(crate) fn as_single(&self) -> Option<(i32, &BigInt)> {
        match self.terms() {
            [(e, c)] => Some((*e, c)),
            _ => None,
        }
    }
}

impl From<i64> for QLaurent {
    fn from(c: i64) -> Self {
        Self::term(c, 0)
    }
}

impl Add<&QLaurent> for &QLaurent {
    type Output = QLaurent;
    fn add(self, rhs: &QLaurent) -> QLaurent {
        self.add_signed(rhs, false)
    }
}

impl Add for QLaurent {
    type Output = QLaurent;
    fn add(self, rhs: QLaurent) -> QLaurent {
        self.add_signed(&rhs, false)
    }
}

impl AddAssign<&QLaurent> for QLaurent {
    fn add_assign(&mut self, rhs: &QLaurent) {
        *self = self.add_signed(rhs, false);
    }
}

impl Sub<&QLaurent> for &QLaurent {
    type Output = QLaurent;
    fn sub(self, rhs: &QLaurent) -> QLaurent {
        self.add_signed(rhs, true)
    }
}

impl Sub for QLaurent {
    type Output = QLaurent;
    fn sub(self, rhs: QLaurent) -> QLaurent {
        self.add_signed(&rhs, true)
    }
}

impl SubAssign<&QLaurent> for QLaurent {
    fn sub_assign(&mut self, rhs: &QLaurent) {
        *self = self.add_signed(rhs, true);
    }
}

impl Mul<&QLaurent> for &QLaurent {
    type Output = QLaurent;
    fn mul(self, rhs: &QLaurent) -> QLaurent {
        self.mul_ref(rhs)
    }
}

impl Mul for QLaurent {
    type Output = QLaurent;
    fn mul(self, rhs: QLaurent) -> QLaurent {
        self.mul_ref(&rhs)
    }
}

impl Neg for &QLaurent {
    type Output = QLaurent;
    fn neg(self) -> QLaurent {
        self.mul_unit(-1, 0)
    }
}

impl Neg for QLaurent {
    type Output = QLaurent;
    fn neg(self) -> QLaurent {
        self.mul_unit(-1, 0)
    }
}

impl fmt::Display for QLaurent {
    /// Renders as e.g. `3*q^-2 + 1 - q^4`, terms in increasing exponent order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (idx, (e, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            match (idx, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let abs = c.abs();
            if *e == 0 {
                write!(f, "{abs}")?;
                continue;
            }
            if !abs.is_one() {
                write!(f, "{abs}*")?;
            }
            if *e == 1 {
                f.write_str("q")?;
            } else {
                write!(f, "q^{e}")?;
            }
        }
        Ok(())
    }
}

impl FromStr for QLaurent {
    type Err = Error;

    /// Parses the rendering grammar: a `+`/`-` separated sum of terms, each
    /// `c`, `q`, `q^k`, `c*q` or `c*q^k`. Whitespace is ignored.
    fn from_str(s: &str) -> Result<Self> {
        let chars: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
        if chars.is_empty() {
            return Err(Error::Parse("empty Laurent polynomial".into()));
        }
        let mut p = Parser { chars: &chars, pos: 0, src: s };
        let mut terms = Vec::new();
        let mut first = true;
        while p.pos < chars.len() {
            let mut sign = BigInt::one();
            match p.peek() {
                Some('+') if !first => p.pos += 1,
                Some('-') => {
                    sign = -sign;
                    p.pos += 1;
                }
                Some(_) if first => {}
                _ => return Err(p.error("expected '+' or '-'")),
            }
            first = false;
            let (c, e) = p.term()?;
            terms.push((e, sign * c));
        }
        Ok(Self::from_terms(terms))
    }
}

struct Parser<'a> {
    chars: &'a [char],
    pos: usize,
    src: &'a str,
}

impl Parser<'_> {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn error(&self, what: &str) -> Error {
        Error::Parse(format!("{what} at offset {} in {:?}", self.pos, self.src))
    }

    fn integer(&mut self) -> Option<BigInt> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return None;
        }
        let digits: String = self.chars[start..self.pos].iter().collect();
        digits.parse().ok()
    }

    fn term(&mut self) -> Result<(BigInt, i32)> {
        let coeff = self.integer();
        if let Some(c) = &coeff {
            if self.peek() != Some('*') {
                return Ok((c.clone(), 0));
            }
            self.pos += 1;
        }
        if self.peek() != Some('q') {
            return Err(self.error("expected 'q'"));
        }
        self.pos += 1;
        let mut exp = 1i32;
        if self.peek() == Some('^') {
            self.pos += 1;
            let neg = self.peek() == Some('-');
            if neg {
                self.pos += 1;
            }
            let k = self.integer().ok_or_else(|| self.error("expected exponent"))?;
            let k: i32 = k.try_into().map_err(|_| self.error("exponent out of range"))?;
            exp = if neg { -k } else { k };
        }
        Ok((coeff.unwrap_or_else(BigInt::one), exp))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q() -> QLaurent {
        QLaurent::q_pow(1)
    }

    fn qinv() -> QLaurent {
        QLaurent::q_pow(-1)
    }

    #[test]
    fn addition_examples() {
        assert!((&q() + &(-q())).is_zero());
        assert_eq!(&(&q() + &qinv()) + &(&q() - &qinv()), QLaurent::term(2, 1));
        assert_eq!(&QLaurent::zero() + &QLaurent::term(3, 2), QLaurent::term(3, 2));
    }

    #[test]
    fn multiplication_examples() {
        let lhs = &(&q() - &qinv()) * &(&q() + &qinv());
        assert_eq!(lhs, &QLaurent::q_pow(2) - &QLaurent::q_pow(-2));
        assert_eq!(&QLaurent::term(2, 1) * &QLaurent::term(3, -1), QLaurent::from(6));
        assert!((&lhs * &QLaurent::zero()).is_zero());
    }

    #[test]
    fn unit_inversion() {
        assert_eq!(QLaurent::q_pow(3).invert_unit().unwrap(), QLaurent::q_pow(-3));
        assert_eq!(QLaurent::term(-1, -1).invert_unit().unwrap(), QLaurent::term(-1, 1));
        let q_plus_one = &q() + &QLaurent::one();
        assert!(matches!(q_plus_one.invert_unit(), Err(Error::NotAUnit(_))));
        assert!(QLaurent::term(2, 0).invert_unit().is_err());
        assert!(QLaurent::zero().invert_unit().is_err());
    }

    #[test]
    fn rendering() {
        let x = QLaurent::from_terms([(-2, 3), (0, 1), (4, -1)]);
        assert_eq!(x.to_string(), "3*q^-2 + 1 - q^4");
        assert_eq!(QLaurent::zero().to_string(), "0");
        assert_eq!(QLaurent::term(-1, 1).to_string(), "-q");
        assert_eq!(QLaurent::term(-5, 0).to_string(), "-5");
        assert_eq!("3*q^-2 + 1 - q^4".parse::<QLaurent>().unwrap(), x);
        assert_eq!("q - q".parse::<QLaurent>().unwrap(), QLaurent::zero());
        assert!("2q".parse::<QLaurent>().is_err());
        assert_eq!("-q^-1+2*q".parse::<QLaurent>().unwrap(), QLaurent::from_terms([(-1, -1), (1, 2)]));
        assert!("".parse::<QLaurent>().is_err());
        assert!("q^".parse::<QLaurent>().is_err());
        assert!("1 +".parse::<QLaurent>().is_err());
    }

    fn arb_laurent() -> impl Strategy<Value = QLaurent> {
        prop::collection::vec((-16i32..=16, -50i64..=50), 0..=8).prop_map(QLaurent::from_terms)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(2000))]

        #[test]
        fn ring_axioms(a in arb_laurent(), b in arb_laurent(), c in arb_laurent()) {
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert!((&a - &a).is_zero());
            prop_assert_eq!(&a * &QLaurent::one(), a.clone());
        }

        #[test]
        fn canonical_form(a in arb_laurent()) {
            prop_assert!(a.terms().iter().all(|(_, c)| !c.is_zero()));
            prop_assert!(a.terms().windows(2).all(|w| w[0].0 < w[1].0));
        }

        #[test]
        fn render_parse_round_trip(a in arb_laurent()) {
            prop_assert_eq!(a.to_string().parse::<QLaurent>().unwrap(), a);
        }

        #[test]
        fn unit_inverse(sign in prop::bool::ANY, k in -20i32..=20, other in arb_laurent()) {
            let u = QLaurent::term(if sign { 1 } else { -1 }, k);
            prop_assert!((&u * &u.invert_unit().unwrap()).is_one());
            let is_unit = other.as_unit().is_some();
            prop_assert_eq!(other.invert_unit().is_ok(), is_unit);
        }
    }
}
