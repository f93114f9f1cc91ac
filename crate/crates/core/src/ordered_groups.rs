//! Lex-ordered rational vector groups, bases of finitely generated subgroups,
//! and the per-level Bezout ledger.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::Rat;

/// Element of Q^k, ordered lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupVec {
    pub coords: Vec<Rat>,
}

impl GroupVec {
    pub fn new(coords: Vec<Rat>) -> Self {
        GroupVec { coords }
    }

    pub fn zero(k: usize) -> Self {
        GroupVec { coords: vec![Rat::zero(); k] }
    }

    /// Rank-one vector.
    pub fn scalar(r: Rat) -> Self {
        GroupVec { coords: vec![r] }
    }

    pub fn from_ints(v: &[i64]) -> Self {
        GroupVec { coords: v.iter().map(|&x| Rat::from_integer(x.into())).collect() }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    pub fn scale(&self, c: &Rat) -> GroupVec {
        GroupVec { coords: self.coords.iter().map(|x| x * c).collect() }
    }

    pub fn scale_int(&self, n: i64) -> GroupVec {
        self.scale(&Rat::from_integer(n.into()))
    }

    /// Coordinates as exact rational strings, the JSON form.
    pub fn to_strings(&self) -> Vec<String> {
        self.coords.iter().map(|c| c.to_string()).collect()
    }

    pub fn from_strings(v: &[String]) -> Result<Self> {
        let coords = v.iter().map(|s| crate::base_field::parse_rational(s)).collect::<Result<Vec<_>>>()?;
        Ok(GroupVec { coords })
    }
}

/// Lexicographic comparison, erroring on a dimension mismatch.
pub fn lex_cmp(a: &GroupVec, b: &GroupVec) -> Result<Ordering> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(a.dim(), b.dim()));
    }
    Ok(a.cmp(b))
}

impl Ord for GroupVec {
    fn cmp(&self, other: &Self) -> Ordering {
        for (x, y) in self.coords.iter().zip(&other.coords) {
            match x.cmp(y) {
                Ordering::Equal => continue,
                o => return o,
            }
        }
        self.dim().cmp(&other.dim())
    }
}

impl PartialOrd for GroupVec {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for &GroupVec {
    type Output = GroupVec;
    fn add(self, rhs: &GroupVec) -> GroupVec {
        assert_eq!(self.dim(), rhs.dim(), "group vector dimension mismatch");
        GroupVec { coords: self.coords.iter().zip(&rhs.coords).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &GroupVec {
    type Output = GroupVec;
    fn sub(self, rhs: &GroupVec) -> GroupVec {
        assert_eq!(self.dim(), rhs.dim(), "group vector dimension mismatch");
        GroupVec { coords: self.coords.iter().zip(&rhs.coords).map(|(a, b)| a - b).collect() }
    }
}

impl Neg for &GroupVec {
    type Output = GroupVec;
    fn neg(self) -> GroupVec {
        GroupVec { coords: self.coords.iter().map(|a| -a).collect() }
    }
}

impl fmt::Display for GroupVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.dim() == 1 {
            return write!(f, "{}", self.coords[0]);
        }
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// A basis of a finitely generated subgroup of Q^k. `level` is the index of the
/// group it spans, starting at -1 for the base group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Basis {
    pub vecs: Vec<GroupVec>,
    pub level: i64,
}

impl Basis {
    pub fn new(vecs: Vec<GroupVec>, level: i64) -> Result<Self> {
        let k = vecs.len();
        for v in &vecs {
            if v.dim() != k {
                return Err(Error::DimensionMismatch(k, v.dim()));
            }
        }
        let b = Basis { vecs, level };
        if b.det().is_zero() {
            return Err(Error::SingularBasis);
        }
        Ok(b)
    }

    /// Standard basis of Z^k.
    pub fn standard(k: usize) -> Self {
        let vecs = (0..k)
            .map(|j| {
                let mut v = GroupVec::zero(k);
                v.coords[j] = Rat::one();
                v
            })
            .collect();
        Basis { vecs, level: -1 }
    }

    pub fn dim(&self) -> usize {
        self.vecs.len()
    }

    /// Column matrix: entry (row i, col j) is coordinate i of vector j.
    fn matrix(&self) -> Vec<Vec<Rat>> {
        let k = self.dim();
        (0..k).map(|i| (0..k).map(|j| self.vecs[j].coords[i].clone()).collect()).collect()
    }

    /// Determinant of the coordinate matrix.
    pub fn det(&self) -> Rat {
        determinant(self.matrix())
    }
}

pub(crate) fn determinant(mut m: Vec<Vec<Rat>>) -> Rat {
    let k = m.len();
    let mut det = Rat::one();
    for col in 0..k {
        let Some(piv) = (col..k).find(|&r| !m[r][col].is_zero()) else {
            return Rat::zero();
        };
        if piv != col {
            m.swap(piv, col);
            det = -det;
        }
        let pv = m[col][col].clone();
        det *= &pv;
        for r in col + 1..k {
            if m[r][col].is_zero() {
                continue;
            }
            let factor = &m[r][col] / &pv;
            for c in col..k {
                let t = &factor * &m[col][c];
                m[r][c] -= t;
            }
        }
    }
    det
}

/// Solve `M u = b` for square nonsingular `M`.
fn solve(mut m: Vec<Vec<Rat>>, mut b: Vec<Rat>) -> Result<Vec<Rat>> {
    let k = m.len();
    for col in 0..k {
        let piv = (col..k).find(|&r| !m[r][col].is_zero()).ok_or(Error::SingularBasis)?;
        m.swap(piv, col);
        b.swap(piv, col);
        let pv = m[col][col].clone();
        for c in col..k {
            m[col][c] /= &pv;
        }
        b[col] /= &pv;
        for r in 0..k {
            if r == col || m[r][col].is_zero() {
                continue;
            }
            let factor = m[r][col].clone();
            for c in col..k {
                let t = &factor * &m[col][c];
                m[r][c] -= t;
            }
            let t = &factor * &b[col];
            b[r] -= t;
        }
    }
    Ok(b)
}

/// Coordinates of `g` in the basis `b`.
pub fn coords_in_basis(g: &GroupVec, b: &Basis) -> Result<Vec<Rat>> {
    if g.dim() != b.dim() {
        return Err(Error::DimensionMismatch(g.dim(), b.dim()));
    }
    solve(b.matrix(), g.coords.clone())
}

/// Whether `g` lies in the Z-span of `b`.
pub fn membership(b: &Basis, g: &GroupVec) -> Result<bool> {
    Ok(coords_in_basis(g, b)?.iter().all(|c| c.is_integer()))
}

/// Bezout and L-operator data of a single augmentation level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelLedger {
    pub h: Vec<BigInt>,
    pub e: Vec<BigInt>,
    pub d: Vec<BigInt>,
    pub eprime: Vec<BigInt>,
    pub ell: Vec<BigInt>,
    pub ellprime: Vec<BigInt>,
    pub e_level: BigInt,
    pub lprime: BigInt,
    pub l: Vec<BigInt>,
    pub gamma_coords: Vec<Rat>,
}

impl LevelLedger {
    pub fn dim(&self) -> usize {
        self.e.len()
    }

    /// The level's ramification index as a machine integer.
    pub fn e_usize(&self) -> usize {
        usize::try_from(&self.e_level).expect("ramification index fits in usize")
    }

    /// Recheck every invariant exactly.
    pub fn check(&self) -> bool {
        let k = self.dim();
        let mut lcm = BigInt::one();
        let mut prod_e = BigInt::one();
        let mut prod_d = BigInt::one();
        for j in 0..k {
            if !self.e[j].is_positive() || !self.h[j].gcd(&self.e[j]).is_one() {
                return false;
            }
            let lhs = &self.ell[j] * &self.h[j] * &self.eprime[j] + &self.ellprime[j] * &self.e[j];
            if lhs != self.d[j] || self.ell[j].is_negative() || self.ell[j] >= &self.e[j] / &self.d[j] {
                return false;
            }
            lcm = lcm.lcm(&self.e[j]);
            prod_e *= &self.e[j];
            prod_d *= &self.d[j];
        }
        if lcm != self.e_level || &prod_e / &prod_d != self.e_level || &prod_e % &prod_d != BigInt::zero() {
            return false;
        }
        let lg = l_value(self, &self.gamma_coords).expect("same dimension");
        Rat::from_integer(self.lprime.clone()) + lg == Rat::new(BigInt::one(), self.e_level.clone())
    }

    /// The lower-triangular change-of-basis matrix Q, indexed `[m][j]`.
    pub fn q_matrix(&self) -> Vec<Vec<Rat>> {
        let k = self.dim();
        let mut q = vec![vec![Rat::zero(); k]; k];
        for j in 0..k {
            q[j][j] = Rat::new(self.d[j].clone(), self.e[j].clone());
            for (m, row) in q.iter_mut().enumerate().skip(j + 1) {
                row[j] = Rat::new(&self.ell[j] * &self.eprime[j] * &self.h[m], self.e[m].clone());
            }
        }
        q
    }
}

/// Build the ledger for gamma with coordinates `u` in the incoming basis.
///
/// The zero vector is accepted: it yields e = 1, l = 0, l' = 1, the data of an
/// integral value such as the Gauss valuation's.
pub fn bezout_ledger(u: &[Rat]) -> Result<LevelLedger> {
    let k = u.len();
    if k == 0 {
        return Err(Error::DimensionMismatch(0, 1));
    }
    let h: Vec<BigInt> = u.iter().map(|x| x.numer().clone()).collect();
    let e: Vec<BigInt> = u.iter().map(|x| x.denom().clone()).collect();
    let mut d = Vec::with_capacity(k);
    let mut eprime = Vec::with_capacity(k);
    let mut ell = Vec::with_capacity(k);
    let mut ellprime = Vec::with_capacity(k);
    let mut run_e = BigInt::one();
    let mut run_d = BigInt::one();
    for j in 0..k {
        let ep = &run_e / &run_d;
        let dj = if j == 0 { BigInt::one() } else { e[j].gcd(&ep) };
        // l*(h*e') + l'*e = d, with 0 <= l < e/d.
        let a = &h[j] * &ep;
        let g = a.extended_gcd(&e[j]);
        debug_assert_eq!(g.gcd.abs(), dj);
        let sign = if g.gcd.is_negative() { -BigInt::one() } else { BigInt::one() };
        let window = &e[j] / &dj;
        let l = (g.x * &sign).mod_floor(&window);
        let lp = (&dj - &l * &a) / &e[j];
        run_e *= &e[j];
        run_d *= &dj;
        d.push(dj);
        eprime.push(ep);
        ell.push(l);
        ellprime.push(lp);
    }
    let e_level = &run_e / &run_d;
    let lprime = ellprime.iter().fold(BigInt::one(), |acc, x| acc * x);
    let l = (0..k).map(|j| ellprime[j + 1..].iter().fold(ell[j].clone(), |acc, x| acc * x)).collect();
    let ledger = LevelLedger { h, e, d, eprime, ell, ellprime, e_level, lprime, l, gamma_coords: u.to_vec() };
    debug_assert!(ledger.check());
    Ok(ledger)
}

/// The outgoing basis: incoming basis times Q.
pub fn augment_basis(b: &Basis, ledger: &LevelLedger) -> Result<Basis> {
    let k = b.dim();
    if ledger.dim() != k {
        return Err(Error::DimensionMismatch(k, ledger.dim()));
    }
    let q = ledger.q_matrix();
    let vecs = (0..k)
        .map(|j| {
            let mut acc = GroupVec::zero(k);
            for (m, row) in q.iter().enumerate() {
                if !row[j].is_zero() {
                    acc = &acc + &b.vecs[m].scale(&row[j]);
                }
            }
            acc
        })
        .collect();
    Ok(Basis { vecs, level: b.level + 1 })
}

/// L applied to a vector given by its incoming-basis coordinates.
pub fn l_value(ledger: &LevelLedger, beta_coords: &[Rat]) -> Result<Rat> {
    if beta_coords.len() != ledger.dim() {
        return Err(Error::DimensionMismatch(ledger.dim(), beta_coords.len()));
    }
    Ok(ledger.l.iter().zip(beta_coords).fold(Rat::zero(), |acc, (l, v)| acc + Rat::from_integer(l.clone()) * v))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rat {
        Rat::new(n.into(), d.into())
    }

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| x.into()).collect()
    }

    #[test]
    fn lex_order() {
        let a = GroupVec::new(vec![r(1, 2), r(0, 1)]);
        let b = GroupVec::new(vec![r(1, 2), r(1, 3)]);
        assert_eq!(lex_cmp(&a, &b).unwrap(), Ordering::Less);
        let c = GroupVec::from_ints(&[1, -5]);
        let d = GroupVec::from_ints(&[0, 100]);
        assert_eq!(lex_cmp(&c, &d).unwrap(), Ordering::Greater);
        let e = GroupVec::scalar(r(2, 3));
        assert_eq!(lex_cmp(&e, &e.clone()).unwrap(), Ordering::Equal);
        assert!(lex_cmp(&a, &e).is_err());
    }

    #[test]
    fn coordinates() {
        let g = GroupVec::new(vec![r(1, 2), r(1, 3)]);
        let b =
            Basis::new(vec![GroupVec::new(vec![r(1, 2), r(1, 3)]), GroupVec::new(vec![r(0, 1), r(1, 3)])], 0).unwrap();
        assert_eq!(coords_in_basis(&g, &b).unwrap(), vec![r(1, 1), r(0, 1)]);
        assert_eq!(coords_in_basis(&g, &Basis::standard(2)).unwrap(), vec![r(1, 2), r(1, 3)]);
        assert!(membership(&b, &GroupVec::from_ints(&[1, 0])).unwrap());
        assert_eq!(coords_in_basis(&GroupVec::from_ints(&[1, 0]), &b).unwrap(), vec![r(2, 1), r(-2, 1)]);
        let half = Basis::new(vec![GroupVec::scalar(r(1, 2))], 0).unwrap();
        assert!(membership(&half, &GroupVec::scalar(r(3, 2))).unwrap());
        assert!(!membership(&half, &GroupVec::scalar(r(1, 3))).unwrap());
    }

    #[test]
    fn singular_basis_rejected() {
        let v = GroupVec::from_ints(&[1, 2]);
        assert_eq!(Basis::new(vec![v.clone(), v], 0), Err(Error::SingularBasis));
    }

    #[test]
    fn ledgers() {
        let l = bezout_ledger(&[r(1, 2)]).unwrap();
        assert_eq!(l.h, ints(&[1]));
        assert_eq!(l.e, ints(&[2]));
        assert_eq!(l.ell, ints(&[1]));
        assert_eq!(l.ellprime, ints(&[0]));
        assert_eq!(l.e_level, 2.into());
        assert_eq!(l.lprime, 0.into());
        assert_eq!(l.l, ints(&[1]));

        let l = bezout_ledger(&[r(1, 2), r(1, 3)]).unwrap();
        assert_eq!(l.d, ints(&[1, 1]));
        assert_eq!(l.eprime, ints(&[1, 2]));
        assert_eq!(l.ell, ints(&[1, 2]));
        assert_eq!(l.ellprime, ints(&[0, -1]));
        assert_eq!(l.e_level, 6.into());
        assert_eq!(l.lprime, 0.into());
        assert_eq!(l.l, ints(&[-1, 2]));
        assert_eq!(l_value(&l, &[r(1, 1), r(0, 1)]).unwrap(), r(-1, 1));
        assert!(l.check());

        let l = bezout_ledger(&[r(3, 1)]).unwrap();
        assert_eq!((l.ell.clone(), l.ellprime.clone()), (ints(&[0]), ints(&[1])));
        assert_eq!((l.e_level.clone(), l.lprime.clone()), (1.into(), 1.into()));

        let l = bezout_ledger(&[r(0, 1)]).unwrap();
        assert_eq!((l.e_level.clone(), l.lprime.clone()), (1.into(), 1.into()));
        assert_eq!(l_value(&l, &[r(0, 1)]).unwrap(), r(0, 1));
    }

    #[test]
    fn augmented_bases() {
        let b = Basis::standard(1);
        let nb = augment_basis(&b, &bezout_ledger(&[r(1, 2)]).unwrap()).unwrap();
        assert_eq!(nb.vecs, vec![GroupVec::scalar(r(1, 2))]);
        let nb = augment_basis(&b, &bezout_ledger(&[r(3, 1)]).unwrap()).unwrap();
        assert_eq!(nb.vecs, vec![GroupVec::scalar(r(1, 1))]);

        let b = Basis::standard(2);
        let nb = augment_basis(&b, &bezout_ledger(&[r(1, 2), r(1, 3)]).unwrap()).unwrap();
        assert_eq!(nb.vecs[0], GroupVec::new(vec![r(1, 2), r(1, 3)]));
        assert_eq!(nb.vecs[1], GroupVec::new(vec![r(0, 1), r(1, 3)]));
        assert_eq!(nb.level, 0);
    }
}
