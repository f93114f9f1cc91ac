//! The valued field (Q, v_p): primes, dense rational polynomials, p-adic
//! valuations, residues and phi-expansions.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Rat;

/// A rational prime, checked at construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct Prime(u64);

impl Prime {
    pub fn new(p: u64) -> Result<Self> {
        if is_prime_u64(p) {
            Ok(Prime(p))
        } else {
            Err(Error::NotPrime(p))
        }
    }

    pub fn get(self) -> u64 {
        self.0
    }

    pub fn big(self) -> BigInt {
        BigInt::from(self.0)
    }
}

impl TryFrom<u64> for Prime {
    type Error = Error;
    fn try_from(p: u64) -> Result<Self> {
        Prime::new(p)
    }
}

impl From<Prime> for u64 {
    fn from(p: Prime) -> u64 {
        p.0
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub(crate) fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn add_mod(a: u64, b: u64, m: u64) -> u64 {
    if a >= m - b {
        a - (m - b)
    } else {
        a + b
    }
}

pub(crate) fn sub_mod(a: u64, b: u64, m: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + (m - b)
    }
}

pub(crate) fn pow_mod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, m);
        }
        a = mul_mod(a, a, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller-Rabin; these bases are exact for all 64-bit inputs.
pub fn is_prime_u64(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &b in &BASES {
        if n.is_multiple_of(b) {
            return n == b;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'outer: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

/// ord_p of a nonzero integer.
fn ord_int(n: &BigInt, p: &BigInt) -> i64 {
    let mut n = n.abs();
    let mut k = 0;
    loop {
        let (q, r) = n.div_rem(p);
        if !r.is_zero() {
            return k;
        }
        n = q;
        k += 1;
    }
}

/// p-adic valuation; `None` stands for +infinity.
pub fn vp(a: &Rat, p: Prime) -> Option<i64> {
    if a.is_zero() {
        return None;
    }
    let pb = p.big();
    Some(ord_int(a.numer(), &pb) - ord_int(a.denom(), &pb))
}

/// Least nonnegative representative of an integer mod p.
pub(crate) fn reduce_int(n: &BigInt, p: Prime) -> u64 {
    n.mod_floor(&p.big()).to_u64().expect("residue below p")
}

/// Image in F_p of a rational of valuation zero.
pub fn residue(a: &Rat, p: Prime) -> Result<u64> {
    match vp(a, p) {
        Some(0) => {}
        Some(k) => return Err(Error::NotAUnit(k)),
        None => return Err(Error::NotAUnit(i64::MAX)),
    }
    let num = reduce_int(a.numer(), p);
    let den = reduce_int(a.denom(), p);
    Ok(mul_mod(num, pow_mod(den, p.get() - 2, p.get()), p.get()))
}

/// Integer power of a rational, negative exponents allowed (base nonzero).
pub fn rat_pow(a: &Rat, n: i64) -> Rat {
    let r = num_traits::pow(a.clone(), n.unsigned_abs() as usize);
    if n < 0 {
        r.recip()
    } else {
        r
    }
}

/// Dense polynomial over Q; `coeffs[i]` multiplies x^i and there is never a
/// trailing zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct PolyK {
    coeffs: Vec<Rat>,
}

impl PolyK {
    pub fn new(mut coeffs: Vec<Rat>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        PolyK { coeffs }
    }

    pub fn from_ints(c: &[i64]) -> Self {
        PolyK::new(c.iter().map(|&x| Rat::from_integer(x.into())).collect())
    }

    pub fn zero() -> Self {
        PolyK { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        PolyK::constant(Rat::one())
    }

    pub fn x() -> Self {
        PolyK::from_ints(&[0, 1])
    }

    pub fn constant(c: Rat) -> Self {
        PolyK::new(vec![c])
    }

    /// x^n.
    pub fn monomial(n: usize) -> Self {
        let mut c = vec![Rat::zero(); n + 1];
        c[n] = Rat::one();
        PolyK { coeffs: c }
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Rat {
        self.coeffs.get(i).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with the zero polynomial mapped to 0.
    pub fn deg(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn leading(&self) -> Option<&Rat> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_some_and(One::is_one)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn scale(&self, c: &Rat) -> PolyK {
        PolyK::new(self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn make_monic(&self) -> PolyK {
        match self.leading() {
            Some(l) => self.scale(&l.recip()),
            None => PolyK::zero(),
        }
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        self.coeffs.iter().rev().fold(Rat::zero(), |acc, c| acc * x + c)
    }

    pub fn derivative(&self) -> PolyK {
        PolyK::new(self.coeffs.iter().enumerate().skip(1).map(|(i, c)| c * Rat::from_integer(i.into())).collect())
    }

    pub fn pow(&self, n: usize) -> PolyK {
        let mut acc = PolyK::one();
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                acc = &acc * &base;
            }
            n >>= 1;
            if n > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Euclidean division by a nonzero divisor.
    pub fn div_rem(&self, d: &PolyK) -> Result<(PolyK, PolyK)> {
        let dd = d.degree().ok_or(Error::DivisionByZero)?;
        let Some(n) = self.degree() else {
            return Ok((PolyK::zero(), PolyK::zero()));
        };
        if n < dd {
            return Ok((PolyK::zero(), self.clone()));
        }
        let inv = d.coeffs[dd].recip();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![Rat::zero(); n - dd + 1];
        for i in (0..=n - dd).rev() {
            let c = &rem[i + dd] * &inv;
            if c.is_zero() {
                continue;
            }
            for (j, dc) in d.coeffs.iter().enumerate() {
                let t = &c * dc;
                rem[i + j] -= t;
            }
            quot[i] = c;
        }
        rem.truncate(dd);
        Ok((PolyK::new(quot), PolyK::new(rem)))
    }

    /// Monic gcd over Q.
    pub fn gcd(&self, other: &PolyK) -> PolyK {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).expect("nonzero divisor").1;
            a = b;
            b = r;
        }
        a.make_monic()
    }

    /// Squarefree over Q (no repeated irreducible factor).
    pub fn is_squarefree(&self) -> bool {
        !self.is_zero() && self.gcd(&self.derivative()).is_constant()
    }

    /// Minimum p-adic valuation of the coefficients.
    pub fn gauss_value(&self, p: Prime) -> Option<i64> {
        self.coeffs.iter().filter_map(|c| vp(c, p)).min()
    }

    /// Evaluate at another polynomial (composition f(g)).
    pub fn compose(&self, g: &PolyK) -> PolyK {
        self.coeffs.iter().rev().fold(PolyK::zero(), |acc, c| &(&acc * g) + &PolyK::constant(c.clone()))
    }

    /// Parse the textual form, e.g. `x^4+2*x^2+4` or `1/3*x-2`.
    pub fn parse(s: &str) -> Result<PolyK> {
        Parser::new(s).parse_all()
    }

    /// JSON form: coefficient strings indexed by degree.
    pub fn to_json_coeffs(&self) -> Vec<String> {
        self.coeffs.iter().map(|c| c.to_string()).collect()
    }
}

impl From<Vec<Rat>> for PolyK {
    fn from(v: Vec<Rat>) -> Self {
        PolyK::new(v)
    }
}

impl Add for &PolyK {
    type Output = PolyK;
    fn add(self, rhs: &PolyK) -> PolyK {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        PolyK::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &PolyK {
    type Output = PolyK;
    fn sub(self, rhs: &PolyK) -> PolyK {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        PolyK::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Neg for &PolyK {
    type Output = PolyK;
    fn neg(self) -> PolyK {
        PolyK { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl Mul for &PolyK {
    type Output = PolyK;
    fn mul(self, rhs: &PolyK) -> PolyK {
        if self.is_zero() || rhs.is_zero() {
            return PolyK::zero();
        }
        let mut out = vec![Rat::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        PolyK::new(out)
    }
}

impl fmt::Display for PolyK {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { "-" } else { "+" })?;
            }
            first = false;
            match (i, a.is_one()) {
                (0, _) => write!(f, "{a}")?,
                (_, true) => {}
                (_, false) => write!(f, "{a}*")?,
            }
            match i {
                0 => {}
                1 => write!(f, "x")?,
                _ => write!(f, "x^{i}")?,
            }
        }
        Ok(())
    }
}

/// Canonical phi-expansion f = sum a_s phi^s with deg a_s < deg phi.
pub fn phi_expand(f: &PolyK, phi: &PolyK) -> Result<Vec<PolyK>> {
    if !phi.is_monic() {
        return Err(Error::NonMonic);
    }
    if phi.deg() == 0 {
        return Err(Error::ConstantBase);
    }
    let mut out = Vec::new();
    let mut cur = f.clone();
    while !cur.is_zero() {
        let (q, r) = cur.div_rem(phi)?;
        out.push(r);
        cur = q;
    }
    Ok(out)
}

/// Parse an exact rational such as `-3/4` or `7`.
pub fn parse_rational(s: &str) -> Result<Rat> {
    let bad = || Error::Parse { col: 1, msg: format!("bad rational {s:?}") };
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Rat::new(n, d))
        }
        None => Ok(Rat::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(s: &'a str) -> Self {
        Parser { src: s.as_bytes(), pos: 0 }
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse { col: self.pos + 1, msg: msg.into() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn parse_all(mut self) -> Result<PolyK> {
        if self.peek().is_none() {
            return self.err("empty input");
        }
        let p = self.expr()?;
        match self.peek() {
            None => Ok(p),
            Some(c) => self.err(format!("unexpected {:?}", c as char)),
        }
    }

    fn expr(&mut self) -> Result<PolyK> {
        let mut acc = self.term()?;
        while let Some(c @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let t = self.term()?;
            acc = if c == b'+' { &acc + &t } else { &acc - &t };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<PolyK> {
        let mut acc = self.unary()?;
        while let Some(c @ (b'*' | b'/')) = self.peek() {
            self.pos += 1;
            let start = self.pos;
            let t = self.unary()?;
            if c == b'*' {
                acc = &acc * &t;
            } else {
                if !t.is_constant() || t.is_zero() {
                    self.pos = start;
                    return self.err("divisor must be a nonzero constant");
                }
                acc = acc.scale(&t.coeff(0).recip());
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<PolyK> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(-&self.unary()?)
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<PolyK> {
        let base = self.primary()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let n = self.integer()?;
            let n = n.to_usize().filter(|&n| n <= 100_000);
            return match n {
                Some(n) => Ok(base.pow(n)),
                None => self.err("exponent out of range"),
            };
        }
        Ok(base)
    }

    fn integer(&mut self) -> Result<BigInt> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected digits");
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        Ok(s.parse().expect("digits parse"))
    }

    fn primary(&mut self) -> Result<PolyK> {
        match self.peek() {
            Some(b'x') => {
                self.pos += 1;
                Ok(PolyK::x())
            }
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return self.err("expected ')'");
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => Ok(PolyK::constant(Rat::from_integer(self.integer()?))),
            Some(c) => self.err(format!("unexpected {:?}", c as char)),
            None => self.err("unexpected end of input"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rat {
        Rat::new(n.into(), d.into())
    }

    fn p(n: u64) -> Prime {
        Prime::new(n).unwrap()
    }

    #[test]
    fn primes() {
        assert!(Prime::new(2).is_ok());
        assert!(Prime::new(1).is_err());
        assert!(Prime::new(91).is_err());
        assert!(Prime::new(1_000_000_007).is_ok());
        assert!(is_prime_u64(18_446_744_073_709_551_557));
        assert!(!is_prime_u64(3_215_031_751));
    }

    #[test]
    fn valuations() {
        assert_eq!(vp(&r(8, 1), p(2)), Some(3));
        assert_eq!(vp(&r(3, 4), p(2)), Some(-2));
        assert_eq!(vp(&r(0, 1), p(5)), None);
    }

    #[test]
    fn residues() {
        assert_eq!(residue(&r(-1, 1), p(2)).unwrap(), 1);
        assert_eq!(residue(&r(3, 5), p(7)).unwrap(), 2);
        assert_eq!(residue(&r(7, 1), p(7)), Err(Error::NotAUnit(1)));
    }

    #[test]
    fn expansions() {
        let f = PolyK::from_ints(&[-2, 0, 1]);
        assert_eq!(phi_expand(&f, &PolyK::x()).unwrap(), vec![PolyK::from_ints(&[-2]), PolyK::zero(), PolyK::one()]);
        let f = PolyK::from_ints(&[1, 3, 1]);
        let phi = PolyK::from_ints(&[1, 1]);
        assert_eq!(phi_expand(&f, &phi).unwrap(), vec![PolyK::from_ints(&[-1]), PolyK::one(), PolyK::one()]);
        let phi = PolyK::from_ints(&[1, 1, 1]);
        assert_eq!(phi_expand(&phi, &phi).unwrap(), vec![PolyK::zero(), PolyK::one()]);
        assert_eq!(phi_expand(&f, &PolyK::from_ints(&[1, 2])), Err(Error::NonMonic));
        assert_eq!(phi_expand(&f, &PolyK::one()), Err(Error::ConstantBase));
    }

    #[test]
    fn parse_and_print() {
        for s in ["x^4+2*x^2+4", "1/3*x-2", "-x^3+x", "x", "0", "-7/2", "5*x^2-1/4*x+3"] {
            assert_eq!(PolyK::parse(s).unwrap().to_string(), s);
        }
        assert_eq!(PolyK::parse("(x+1)^2 - 2*(x+1) + 2").unwrap(), PolyK::from_ints(&[1, 0, 1]));
        assert_eq!(PolyK::parse("x^2/4").unwrap(), PolyK::new(vec![r(0, 1), r(0, 1), r(1, 4)]));
        match PolyK::parse("x^2 + * 3") {
            Err(Error::Parse { col, .. }) => assert_eq!(col, 7),
            other => panic!("{other:?}"),
        }
        assert!(PolyK::parse("x/(x+1)").is_err());
        assert!(PolyK::parse("").is_err());
        assert!(PolyK::parse("y+1").is_err());
    }

    #[test]
    fn arithmetic() {
        let a = PolyK::from_ints(&[1, 1]);
        let b = PolyK::from_ints(&[-1, 1]);
        assert_eq!(&a * &b, PolyK::from_ints(&[-1, 0, 1]));
        let (q, rm) = PolyK::from_ints(&[-1, 0, 1]).div_rem(&a).unwrap();
        assert_eq!((q, rm), (b.clone(), PolyK::zero()));
        assert_eq!((&a * &a).gcd(&(&a * &b)), a);
        assert!(!PolyK::from_ints(&[0, 0, 1]).is_squarefree());
        assert!(PolyK::from_ints(&[1, 0, 1]).is_squarefree());
        assert_eq!(a.compose(&b), PolyK::x());
    }
}
