//! Finite-field towers F_p = k_0 c k_1 c ... c k_r with k_{i+1} = k_i[y]/(m_i),
//! polynomials over any level, and factorization over any level.

mod factor;

use std::fmt::Write as _;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use rand::Rng;

use crate::base_field::{add_mod, mul_mod, pow_mod, sub_mod, Prime};
use crate::error::{Error, Result};

/// Element of level `level` of a tower.
///
/// The representation is nested and stored flat: an element of k_{i+1} is a
/// polynomial of degree < f_i in z_i whose coefficients are elements of k_i,
/// laid out as consecutive blocks of length [k_i : F_p].
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TowerElem {
    pub level: usize,
    pub coeffs: Vec<u64>,
}

impl TowerElem {
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0] == 1 && self.coeffs[1..].iter().all(|&c| c == 0)
    }
}

/// Polynomial in y over one tower level, with no trailing zero coefficient.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TowerPoly {
    pub level: usize,
    pub coeffs: Vec<TowerElem>,
}

impl TowerPoly {
    pub fn new(level: usize, mut coeffs: Vec<TowerElem>) -> Self {
        debug_assert!(coeffs.iter().all(|c| c.level == level));
        while coeffs.last().is_some_and(TowerElem::is_zero) {
            coeffs.pop();
        }
        TowerPoly { level, coeffs }
    }

    pub fn zero(level: usize) -> Self {
        TowerPoly { level, coeffs: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn deg(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn leading(&self) -> Option<&TowerElem> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_some_and(TowerElem::is_one)
    }

    /// Key used to order factors: degree, then coefficients from the
    /// constant term upward.
    pub fn sort_key(&self) -> (usize, Vec<&[u64]>) {
        (self.coeffs.len(), self.coeffs.iter().map(|c| c.coeffs.as_slice()).collect())
    }
}

/// An immutable finite-field tower.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tower {
    p: Prime,
    minpolys: Vec<TowerPoly>,
    degrees: Vec<usize>,
    sizes: Vec<usize>,
}

impl Tower {
    /// The prime field alone.
    pub fn base(p: Prime) -> Self {
        Tower { p, minpolys: Vec::new(), degrees: Vec::new(), sizes: vec![1] }
    }

    pub fn prime(&self) -> Prime {
        self.p
    }

    /// Number of extensions r; levels are 0..=r.
    pub fn height(&self) -> usize {
        self.minpolys.len()
    }

    pub fn minpolys(&self) -> &[TowerPoly] {
        &self.minpolys
    }

    /// Relative degrees f_0, ..., f_{r-1}.
    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    /// [k_level : F_p].
    pub fn abs_degree(&self, level: usize) -> usize {
        self.sizes[level]
    }

    /// q_level = |k_level|.
    pub fn card(&self, level: usize) -> BigUint {
        num_traits::pow(BigUint::from(self.p.get()), self.sizes[level])
    }

    /// Adjoin a root of `m`, which must be monic and irreducible over the top level.
    pub fn extend(&self, m: &TowerPoly) -> Result<Tower> {
        let top = self.height();
        if m.level != top {
            return Err(Error::LevelMismatch(m.level, top));
        }
        if !m.is_monic() {
            return Err(Error::NonMonic);
        }
        if m.deg() == 0 {
            return Err(Error::ConstantBase);
        }
        let fac = self.factor(m, 0)?;
        if fac.len() != 1 || fac[0].1 != 1 {
            return Err(Error::Reducible(self.fmt_poly(&fac[0].0, "y")));
        }
        let mut t = self.clone();
        t.degrees.push(m.deg());
        t.sizes.push(self.sizes[top] * m.deg());
        t.minpolys.push(m.clone());
        Ok(t)
    }

    /// Drop every level above `level`.
    pub fn truncate(&self, level: usize) -> Tower {
        let mut t = self.clone();
        t.minpolys.truncate(level);
        t.degrees.truncate(level);
        t.sizes.truncate(level + 1);
        t
    }

    fn check_level(&self, level: usize) -> Result<()> {
        if level > self.height() {
            Err(Error::LevelMismatch(level, self.height()))
        } else {
            Ok(())
        }
    }

    pub fn zero(&self, level: usize) -> TowerElem {
        TowerElem { level, coeffs: vec![0; self.sizes[level]] }
    }

    pub fn one(&self, level: usize) -> TowerElem {
        self.from_u64(level, 1)
    }

    pub fn from_u64(&self, level: usize, c: u64) -> TowerElem {
        let mut e = self.zero(level);
        e.coeffs[0] = c % self.p.get();
        e
    }

    pub fn from_i64(&self, level: usize, c: i64) -> TowerElem {
        self.from_u64(level, c.rem_euclid(self.p.get() as i64) as u64)
    }

    /// The generator z_i, an element of level i+1.
    pub fn gen(&self, i: usize) -> TowerElem {
        let m = &self.minpolys[i];
        if m.deg() == 1 {
            let root = self.neg(&m.coeffs[0]);
            return self.embed_up(&root, i + 1).expect("upward embedding");
        }
        let mut e = self.zero(i + 1);
        e.coeffs[self.sizes[i]] = 1;
        e
    }

    /// Element of level `level` given by its flat coordinates.
    pub fn elem(&self, level: usize, coeffs: Vec<u64>) -> Result<TowerElem> {
        self.check_level(level)?;
        if coeffs.len() != self.sizes[level] {
            return Err(Error::DimensionMismatch(self.sizes[level], coeffs.len()));
        }
        let p = self.p.get();
        Ok(TowerElem { level, coeffs: coeffs.into_iter().map(|c| c % p).collect() })
    }

    pub fn random(&self, level: usize, rng: &mut impl Rng) -> TowerElem {
        let p = self.p.get();
        TowerElem { level, coeffs: (0..self.sizes[level]).map(|_| rng.gen_range(0..p)).collect() }
    }

    /// Canonical inclusion into a higher level.
    pub fn embed_up(&self, a: &TowerElem, to: usize) -> Result<TowerElem> {
        self.check_level(to)?;
        if to < a.level {
            return Err(Error::LevelMismatch(a.level, to));
        }
        let mut c = a.coeffs.clone();
        c.resize(self.sizes[to], 0);
        Ok(TowerElem { level: to, coeffs: c })
    }

    /// View an element of a higher level inside a sublevel, if it lies there.
    pub fn norm_down(&self, a: &TowerElem, to: usize) -> Result<TowerElem> {
        if to > a.level {
            return Err(Error::LevelMismatch(a.level, to));
        }
        let n = self.sizes[to];
        if a.coeffs[n..].iter().any(|&c| c != 0) {
            return Err(Error::NotInSublevel(to));
        }
        Ok(TowerElem { level: to, coeffs: a.coeffs[..n].to_vec() })
    }

    fn same(&self, a: &TowerElem, b: &TowerElem) {
        assert_eq!(a.level, b.level, "tower elements at different levels");
    }

    pub fn add(&self, a: &TowerElem, b: &TowerElem) -> TowerElem {
        self.same(a, b);
        let p = self.p.get();
        let coeffs = a.coeffs.iter().zip(&b.coeffs).map(|(&x, &y)| add_mod(x, y, p)).collect();
        TowerElem { level: a.level, coeffs }
    }

    pub fn sub(&self, a: &TowerElem, b: &TowerElem) -> TowerElem {
        self.same(a, b);
        let p = self.p.get();
        let coeffs = a.coeffs.iter().zip(&b.coeffs).map(|(&x, &y)| sub_mod(x, y, p)).collect();
        TowerElem { level: a.level, coeffs }
    }

    pub fn neg(&self, a: &TowerElem) -> TowerElem {
        let p = self.p.get();
        TowerElem { level: a.level, coeffs: a.coeffs.iter().map(|&x| sub_mod(0, x, p)).collect() }
    }

    pub fn scale_u64(&self, a: &TowerElem, c: u64) -> TowerElem {
        let p = self.p.get();
        TowerElem { level: a.level, coeffs: a.coeffs.iter().map(|&x| mul_mod(x, c % p, p)).collect() }
    }

    pub fn mul(&self, a: &TowerElem, b: &TowerElem) -> TowerElem {
        self.same(a, b);
        TowerElem { level: a.level, coeffs: self.mul_flat(a.level, &a.coeffs, &b.coeffs) }
    }

    fn mul_flat(&self, level: usize, a: &[u64], b: &[u64]) -> Vec<u64> {
        let p = self.p.get();
        if level == 0 {
            return vec![mul_mod(a[0], b[0], p)];
        }
        let n = self.sizes[level - 1];
        let f = self.degrees[level - 1];
        let nz = |blk: &[u64]| blk.iter().any(|&c| c != 0);
        let mut prod = vec![vec![0u64; n]; 2 * f - 1];
        for i in 0..f {
            let ai = &a[i * n..(i + 1) * n];
            if !nz(ai) {
                continue;
            }
            for j in 0..f {
                let bj = &b[j * n..(j + 1) * n];
                if !nz(bj) {
                    continue;
                }
                let t = self.mul_flat(level - 1, ai, bj);
                for (x, y) in prod[i + j].iter_mut().zip(t) {
                    *x = add_mod(*x, y, p);
                }
            }
        }
        let m = &self.minpolys[level - 1];
        for k in (f..2 * f - 1).rev() {
            if !nz(&prod[k]) {
                continue;
            }
            let c = std::mem::replace(&mut prod[k], vec![0; n]);
            for t in 0..f {
                let mt = &m.coeffs[t].coeffs;
                if !nz(mt) {
                    continue;
                }
                let s = self.mul_flat(level - 1, &c, mt);
                for (x, y) in prod[k - f + t].iter_mut().zip(s) {
                    *x = sub_mod(*x, y, p);
                }
            }
        }
        prod.truncate(f);
        prod.concat()
    }

    pub fn pow_big(&self, a: &TowerElem, e: &BigUint) -> TowerElem {
        let mut acc = self.one(a.level);
        let bits = e.bits();
        for i in (0..bits).rev() {
            acc = self.mul(&acc, &acc);
            if e.bit(i) {
                acc = self.mul(&acc, a);
            }
        }
        acc
    }

    /// a^n for any integer n; negative powers need a nonzero base and the
    /// exponent is reduced mod q - 1 first.
    pub fn pow(&self, a: &TowerElem, n: &BigInt) -> Result<TowerElem> {
        if a.is_zero() {
            return match n.sign() {
                num_bigint::Sign::Minus => Err(Error::DivisionByZero),
                num_bigint::Sign::NoSign => Ok(self.one(a.level)),
                num_bigint::Sign::Plus => Ok(self.zero(a.level)),
            };
        }
        let order = BigInt::from(self.card(a.level)) - 1;
        let e = n.mod_floor(&order);
        Ok(self.pow_big(a, &e.to_biguint().expect("nonnegative after reduction")))
    }

    pub fn pow_i64(&self, a: &TowerElem, n: i64) -> Result<TowerElem> {
        self.pow(a, &BigInt::from(n))
    }

    pub fn inv(&self, a: &TowerElem) -> Result<TowerElem> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if a.level == 0 {
            let p = self.p.get();
            return Ok(TowerElem { level: 0, coeffs: vec![pow_mod(a.coeffs[0], p - 2, p)] });
        }
        let e = self.card(a.level) - 2u32;
        Ok(self.pow_big(a, &e))
    }

    pub fn div(&self, a: &TowerElem, b: &TowerElem) -> Result<TowerElem> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    /// The level-`level` coordinates of `a` (level `level+1`) in powers of z_level.
    pub fn split(&self, a: &TowerElem) -> Vec<TowerElem> {
        assert!(a.level > 0, "level-0 elements have no sublevel");
        let n = self.sizes[a.level - 1];
        a.coeffs.chunks(n).map(|c| TowerElem { level: a.level - 1, coeffs: c.to_vec() }).collect()
    }

    /// Inverse of `split`.
    pub fn join(&self, parts: &[TowerElem]) -> TowerElem {
        let level = parts[0].level + 1;
        assert_eq!(parts.len(), self.degrees[level - 1]);
        TowerElem { level, coeffs: parts.iter().flat_map(|c| c.coeffs.iter().copied()).collect() }
    }

    /// Text form, a polynomial in z0, z1, ...
    pub fn fmt_elem(&self, a: &TowerElem) -> String {
        if a.level == 0 {
            return a.coeffs[0].to_string();
        }
        let parts = self.split(a);
        let var = format!("z{}", a.level - 1);
        self.fmt_terms(&parts, &var)
    }

    fn fmt_terms(&self, parts: &[TowerElem], var: &str) -> String {
        let mut out = String::new();
        for (i, c) in parts.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !out.is_empty() {
                out.push('+');
            }
            let cs = self.fmt_elem(c);
            let pw = match i {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{i}"),
            };
            if i == 0 {
                out.push_str(&cs);
            } else if c.is_one() {
                out.push_str(&pw);
            } else if cs.contains('+') {
                let _ = write!(out, "({cs})*{pw}");
            } else {
                let _ = write!(out, "{cs}*{pw}");
            }
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }

    pub fn fmt_poly(&self, f: &TowerPoly, var: &str) -> String {
        self.fmt_terms(&f.coeffs, var)
    }

    // Polynomials over a level.

    pub fn poly_from_u64(&self, level: usize, c: &[u64]) -> TowerPoly {
        TowerPoly::new(level, c.iter().map(|&x| self.from_u64(level, x)).collect())
    }

    pub fn poly_const(&self, c: TowerElem) -> TowerPoly {
        TowerPoly::new(c.level, vec![c])
    }

    pub fn poly_one(&self, level: usize) -> TowerPoly {
        self.poly_const(self.one(level))
    }

    /// y^n.
    pub fn poly_monomial(&self, level: usize, n: usize) -> TowerPoly {
        let mut c = vec![self.zero(level); n + 1];
        c[n] = self.one(level);
        TowerPoly { level, coeffs: c }
    }

    fn coeff_or_zero(&self, f: &TowerPoly, i: usize) -> TowerElem {
        f.coeffs.get(i).cloned().unwrap_or_else(|| self.zero(f.level))
    }

    pub fn poly_add(&self, a: &TowerPoly, b: &TowerPoly) -> TowerPoly {
        let n = a.coeffs.len().max(b.coeffs.len());
        let c = (0..n).map(|i| self.add(&self.coeff_or_zero(a, i), &self.coeff_or_zero(b, i))).collect();
        TowerPoly::new(a.level, c)
    }

    pub fn poly_sub(&self, a: &TowerPoly, b: &TowerPoly) -> TowerPoly {
        let n = a.coeffs.len().max(b.coeffs.len());
        let c = (0..n).map(|i| self.sub(&self.coeff_or_zero(a, i), &self.coeff_or_zero(b, i))).collect();
        TowerPoly::new(a.level, c)
    }

    pub fn poly_scale(&self, a: &TowerPoly, c: &TowerElem) -> TowerPoly {
        TowerPoly::new(a.level, a.coeffs.iter().map(|x| self.mul(x, c)).collect())
    }

    /// Multiply by y^n.
    pub fn poly_shift(&self, a: &TowerPoly, n: usize) -> TowerPoly {
        if a.is_zero() {
            return a.clone();
        }
        let mut c = vec![self.zero(a.level); n];
        c.extend(a.coeffs.iter().cloned());
        TowerPoly { level: a.level, coeffs: c }
    }

    pub fn poly_mul(&self, a: &TowerPoly, b: &TowerPoly) -> TowerPoly {
        if a.is_zero() || b.is_zero() {
            return TowerPoly::zero(a.level);
        }
        let mut out = vec![self.zero(a.level); a.coeffs.len() + b.coeffs.len() - 1];
        for (i, x) in a.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                out[i + j] = self.add(&out[i + j], &self.mul(x, y));
            }
        }
        TowerPoly::new(a.level, out)
    }

    pub fn poly_pow(&self, a: &TowerPoly, n: usize) -> TowerPoly {
        (0..n).fold(self.poly_one(a.level), |acc, _| self.poly_mul(&acc, a))
    }

    pub fn poly_div_rem(&self, a: &TowerPoly, d: &TowerPoly) -> Result<(TowerPoly, TowerPoly)> {
        let dd = d.degree().ok_or(Error::DivisionByZero)?;
        let Some(n) = a.degree() else {
            return Ok((TowerPoly::zero(a.level), TowerPoly::zero(a.level)));
        };
        if n < dd {
            return Ok((TowerPoly::zero(a.level), a.clone()));
        }
        let inv = self.inv(&d.coeffs[dd])?;
        let mut rem = a.coeffs.clone();
        let mut quot = vec![self.zero(a.level); n - dd + 1];
        for i in (0..=n - dd).rev() {
            let c = self.mul(&rem[i + dd], &inv);
            if c.is_zero() {
                continue;
            }
            for (j, dc) in d.coeffs.iter().enumerate() {
                rem[i + j] = self.sub(&rem[i + j], &self.mul(&c, dc));
            }
            quot[i] = c;
        }
        rem.truncate(dd);
        Ok((TowerPoly::new(a.level, quot), TowerPoly::new(a.level, rem)))
    }

    pub fn poly_rem(&self, a: &TowerPoly, d: &TowerPoly) -> TowerPoly {
        self.poly_div_rem(a, d).expect("nonzero modulus").1
    }

    pub fn poly_monic(&self, a: &TowerPoly) -> TowerPoly {
        match a.leading() {
            Some(l) => self.poly_scale(a, &self.inv(l).expect("nonzero leading coefficient")),
            None => a.clone(),
        }
    }

    /// Monic gcd.
    pub fn poly_gcd(&self, a: &TowerPoly, b: &TowerPoly) -> TowerPoly {
        let (mut a, mut b) = (a.clone(), b.clone());
        while !b.is_zero() {
            let r = self.poly_rem(&a, &b);
            a = b;
            b = r;
        }
        self.poly_monic(&a)
    }

    pub fn poly_deriv(&self, a: &TowerPoly) -> TowerPoly {
        let c = a.coeffs.iter().enumerate().skip(1).map(|(i, c)| self.scale_u64(c, i as u64)).collect();
        TowerPoly::new(a.level, c)
    }

    /// base^e mod m.
    pub fn poly_pow_mod(&self, base: &TowerPoly, e: &BigUint, m: &TowerPoly) -> TowerPoly {
        let mut acc = self.poly_rem(&self.poly_one(base.level), m);
        let b = self.poly_rem(base, m);
        for i in (0..e.bits()).rev() {
            acc = self.poly_rem(&self.poly_mul(&acc, &acc), m);
            if e.bit(i) {
                acc = self.poly_rem(&self.poly_mul(&acc, &b), m);
            }
        }
        acc
    }

    /// Evaluate at `x`, whose level may be higher than the polynomial's.
    pub fn poly_eval(&self, f: &TowerPoly, x: &TowerElem) -> TowerElem {
        let mut acc = self.zero(x.level);
        for c in f.coeffs.iter().rev() {
            let c = self.embed_up(c, x.level).expect("evaluation point above coefficients");
            acc = self.add(&self.mul(&acc, x), &c);
        }
        acc
    }

    /// f(y + c).
    pub fn poly_taylor_shift(&self, f: &TowerPoly, c: &TowerElem) -> TowerPoly {
        let lin = TowerPoly::new(f.level, vec![c.clone(), self.one(f.level)]);
        let mut acc = TowerPoly::zero(f.level);
        for a in f.coeffs.iter().rev() {
            acc = self.poly_add(&self.poly_mul(&acc, &lin), &self.poly_const(a.clone()));
        }
        acc
    }

    /// Embed every coefficient into a higher level.
    pub fn poly_embed(&self, f: &TowerPoly, to: usize) -> Result<TowerPoly> {
        let c = f.coeffs.iter().map(|c| self.embed_up(c, to)).collect::<Result<Vec<_>>>()?;
        Ok(TowerPoly::new(to, c))
    }

    pub fn random_poly(&self, level: usize, deg: usize, rng: &mut impl Rng) -> TowerPoly {
        TowerPoly::new(level, (0..=deg).map(|_| self.random(level, rng)).collect())
    }

    /// Frobenius-fixed test: a^{q_sub} = a iff a lies in level `sub`.
    pub fn frobenius(&self, a: &TowerElem, sub: usize) -> TowerElem {
        self.pow_big(a, &self.card(sub))
    }
}
