//! Squarefree, distinct-degree and equal-degree factorization over a tower level.

use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{Tower, TowerElem, TowerPoly};
use crate::error::{Error, Result};

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

fn fnv(mut h: u64, word: u64) -> u64 {
    for b in word.to_le_bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(FNV_PRIME);
    }
    h
}

fn fnv_poly(mut h: u64, f: &TowerPoly) -> u64 {
    h = fnv(h, f.coeffs.len() as u64);
    for c in &f.coeffs {
        for &x in &c.coeffs {
            h = fnv(h, x);
        }
    }
    h
}

impl Tower {
    /// Fingerprint of the tower and a polynomial, the PRNG seed base.
    pub fn fingerprint(&self, f: &TowerPoly) -> u64 {
        let mut h = fnv(FNV_OFFSET, self.p.get());
        for m in &self.minpolys {
            h = fnv_poly(h, m);
        }
        fnv_poly(h, f)
    }

    /// Factor into monic irreducibles with multiplicities.
    ///
    /// The leading coefficient times the product of the factors is `f`.
    /// Factors are sorted by degree and then by coefficients, constant term
    /// first. The result does not depend on `seed`; only the random choices
    /// made along the way do.
    pub fn factor(&self, f: &TowerPoly, seed: u64) -> Result<Vec<(TowerPoly, usize)>> {
        if f.deg() == 0 {
            return Err(Error::Invalid("factorization needs degree at least 1".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.fingerprint(f) ^ seed);
        let f = self.poly_monic(f);
        let mut out = Vec::new();
        for (g, m) in self.squarefree(&f) {
            for (h, d) in self.distinct_degree(&g) {
                for k in self.equal_degree(&h, d, &mut rng) {
                    out.push((k, m));
                }
            }
        }
        out.sort_by(|a, b| a.0.sort_key().cmp(&b.0.sort_key()));
        Ok(out)
    }

    pub fn is_irreducible(&self, f: &TowerPoly) -> Result<bool> {
        let fac = self.factor(f, 0)?;
        Ok(fac.len() == 1 && fac[0].1 == 1)
    }

    fn pth_root_elem(&self, a: &TowerElem) -> TowerElem {
        let e = num_traits::pow(BigUint::from(self.p.get()), self.sizes[a.level] - 1);
        self.pow_big(a, &e)
    }

    /// g with g^p = f, for f whose exponents are all multiples of p.
    fn pth_root(&self, f: &TowerPoly) -> TowerPoly {
        let p = self.p.get() as usize;
        let c = f.coeffs.iter().step_by(p).map(|c| self.pth_root_elem(c)).collect();
        TowerPoly::new(f.level, c)
    }

    /// Squarefree decomposition of a monic polynomial.
    fn squarefree(&self, f: &TowerPoly) -> Vec<(TowerPoly, usize)> {
        let mut out = Vec::new();
        let d = self.poly_deriv(f);
        let mut c = self.poly_gcd(f, &d);
        let mut w = self.poly_div_rem(f, &c).expect("nonzero gcd").0;
        let mut i = 1;
        while w.deg() > 0 {
            let y = self.poly_gcd(&w, &c);
            let fac = self.poly_div_rem(&w, &y).expect("nonzero gcd").0;
            if fac.deg() > 0 {
                out.push((fac, i));
            }
            w = y;
            c = self.poly_div_rem(&c, &w).expect("nonzero gcd").0;
            i += 1;
        }
        if c.deg() > 0 {
            let p = self.p.get() as usize;
            for (g, m) in self.squarefree(&self.pth_root(&c)) {
                out.push((g, m * p));
            }
        }
        out
    }

    /// Split a squarefree monic polynomial by the degrees of its factors.
    fn distinct_degree(&self, f: &TowerPoly) -> Vec<(TowerPoly, usize)> {
        let q = self.card(f.level);
        let x = self.poly_monomial(f.level, 1);
        let mut out = Vec::new();
        let mut g = f.clone();
        let mut h = self.poly_rem(&x, &g);
        let mut d = 1;
        while 2 * d <= g.deg() {
            h = self.poly_pow_mod(&h, &q, &g);
            let t = self.poly_gcd(&self.poly_sub(&h, &x), &g);
            if t.deg() > 0 {
                g = self.poly_div_rem(&g, &t).expect("nonzero gcd").0;
                h = self.poly_rem(&h, &g);
                out.push((t, d));
            }
            d += 1;
        }
        if g.deg() > 0 {
            let n = g.deg();
            out.push((g, n));
        }
        out
    }

    /// Split a product of distinct irreducibles of degree `d`.
    fn equal_degree(&self, f: &TowerPoly, d: usize, rng: &mut ChaCha8Rng) -> Vec<TowerPoly> {
        let n = f.deg();
        if n == d {
            return vec![f.clone()];
        }
        let level = f.level;
        let qd = num_traits::pow(self.card(level), d);
        let odd = self.p.get() != 2;
        let half = (&qd - 1u32) / 2u32;
        let trace_len = self.sizes[level] * d;
        loop {
            let a = self.random_poly(level, n - 1, rng);
            if a.deg() == 0 {
                continue;
            }
            let b = if odd {
                let t = self.poly_pow_mod(&a, &half, f);
                self.poly_sub(&t, &self.poly_one(level))
            } else {
                let mut t = self.poly_rem(&a, f);
                let mut s = t.clone();
                for _ in 1..trace_len {
                    t = self.poly_rem(&self.poly_mul(&t, &t), f);
                    s = self.poly_add(&s, &t);
                }
                s
            };
            let g = self.poly_gcd(&b, f);
            if g.deg() > 0 && g.deg() < n {
                let h = self.poly_div_rem(f, &g).expect("nonzero gcd").0;
                let mut out = self.equal_degree(&g, d, rng);
                out.extend(self.equal_degree(&h, d, rng));
                return out;
            }
        }
    }
}
