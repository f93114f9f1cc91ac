//! Shared generators and independent oracles for the integration tests.
#![allow(dead_code)]

use std::cmp::Ordering;

use maclane::base_field::{PolyK, Prime};
use maclane::maclane_chain::Chain;
use maclane::ordered_groups::GroupVec;
use maclane::residue_tower::{Tower, TowerElem, TowerPoly};
use maclane::Rat;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn q(n: i64, d: i64) -> Rat {
    Rat::new(n.into(), d.into())
}

pub fn prime(p: u64) -> Prime {
    Prime::new(p).unwrap()
}

pub fn poly(s: &str) -> PolyK {
    PolyK::parse(s).unwrap()
}

pub fn p_rat(p: Prime) -> Rat {
    Rat::from_integer(p.big())
}

pub fn p_pow(p: Prime, n: i64) -> Rat {
    let base = p_rat(p);
    if n >= 0 {
        num_traits::pow(base, n as usize)
    } else {
        num_traits::pow(base.recip(), (-n) as usize)
    }
}

// Chains.

/// The four base configurations: Gauss p=2, (x, 1/2) p=2, depth one through
/// x^2+x+1 at p=2, Gauss p=5.
pub fn configs() -> Vec<(&'static str, Chain)> {
    vec![
        ("gauss2", Chain::gauss(prime(2))),
        ("x-half", Chain::depth_zero(prime(2), q(0, 1), q(1, 2))),
        ("x2x1", Chain::gauss(prime(2)).augment(&poly("x^2+x+1"), &q(1, 1)).unwrap()),
        ("gauss5", Chain::gauss(prime(5))),
    ]
}

/// A monic irreducible polynomial of the given degree over level `level`,
/// with nonzero constant term.
pub fn random_irreducible(t: &Tower, level: usize, deg: usize, rng: &mut ChaCha8Rng) -> TowerPoly {
    loop {
        let mut c: Vec<TowerElem> = (0..deg).map(|_| t.random(level, rng)).collect();
        c.push(t.one(level));
        let f = TowerPoly::new(level, c);
        if !f.coeffs[0].is_zero() && t.is_irreducible(&f).unwrap() {
            return f;
        }
    }
}

/// Augment by lift_key of a residual irreducible of degree `deg`, with slope
/// mu(phi) + extra.
pub fn grow(c: &Chain, deg: usize, extra: Rat, rng: &mut ChaCha8Rng) -> Chain {
    let r = c.depth();
    loop {
        let psi = random_irreducible(c.tower(), r, deg, rng);
        let phi = c.lift_key(&psi).unwrap();
        if phi.deg() == c.top().m {
            continue;
        }
        let mu = c.mu_value(&phi).unwrap();
        return c.augment(&phi, &(mu + &extra)).unwrap();
    }
}

/// Depth one and two chains with ramification and nontrivial residue fields.
pub fn deep_chains() -> Vec<(&'static str, Chain)> {
    let mut g = rng(77);
    let d1 = Chain::gauss(prime(2)).augment(&poly("x^2+x+1"), &q(1, 2)).unwrap();
    let d2 = grow(&d1, 2, q(1, 3), &mut g);
    let t1 = Chain::gauss(prime(3)).augment(&poly("x^2+1"), &q(2, 3)).unwrap();
    let t2 = grow(&t1, 1, q(1, 2), &mut g);
    let f1 = grow(&Chain::depth_zero(prime(5), q(0, 1), q(1, 2)), 2, q(1, 3), &mut g);
    let f2 = grow(&f1, 1, q(1, 1), &mut g);
    vec![("d1", d1), ("d2", d2), ("t1", t1), ("t2", t2), ("f1", f1), ("f2", f2)]
}

// Random polynomials.

/// Integer coefficients of the form k p^t, nonzero leading coefficient.
pub fn rand_int_poly(g: &mut ChaCha8Rng, p: Prime, deg: usize) -> PolyK {
    loop {
        let c: Vec<Rat> = (0..=deg)
            .map(|i| {
                if i < deg && g.gen_ratio(1, 5) {
                    return Rat::zero();
                }
                let k: i64 = g.gen_range(-6..=6);
                Rat::from_integer(k.into()) * p_pow(p, g.gen_range(0..3))
            })
            .collect();
        let f = PolyK::new(c);
        if f.degree() == Some(deg) {
            return f;
        }
    }
}

/// Sum of a_s phi_r^s with small random coefficients of degree < m_r.
pub fn rand_phi_adic(g: &mut ChaCha8Rng, c: &Chain, max_deg: usize) -> PolyK {
    let top = c.top();
    let m = top.m;
    let n = max_deg / m;
    loop {
        let len = g.gen_range(1..=n + 1);
        let mut acc = PolyK::zero();
        let mut pw = PolyK::one();
        for _ in 0..len {
            if !g.gen_ratio(1, 4) {
                let d = g.gen_range(0..m);
                let a = rand_int_poly(g, c.prime(), d).scale(&p_pow(c.prime(), g.gen_range(-1..3)));
                acc = &acc + &(&a * &pw);
            }
            pw = &pw * &top.phi;
        }
        if !acc.is_zero() && acc.deg() <= max_deg {
            return acc;
        }
    }
}

/// Either generator, with equal odds.
pub fn rand_poly(g: &mut ChaCha8Rng, c: &Chain, max_deg: usize) -> PolyK {
    if g.gen_bool(0.5) {
        rand_phi_adic(g, c, max_deg)
    } else {
        let d = g.gen_range(0..=max_deg);
        rand_int_poly(g, c.prime(), d)
    }
}

pub fn rand_monic(g: &mut ChaCha8Rng, p: Prime, deg: usize) -> PolyK {
    let mut c: Vec<Rat> =
        (0..deg).map(|_| Rat::from_integer(g.gen_range(-9i64..=9).into()) * p_pow(p, g.gen_range(0..3))).collect();
    c.push(Rat::one());
    PolyK::new(c)
}

// Hull oracle.

/// Vertices of the lower hull by brute force: a point is a vertex when it is
/// an endpoint or lies strictly below every chord joining a point on its left
/// to a point on its right.
pub fn brute_hull(pts: &[(usize, GroupVec)]) -> Vec<(usize, GroupVec)> {
    let n = pts.len();
    let mut out = Vec::new();
    for j in 0..n {
        let (sj, uj) = &pts[j];
        let mut vertex = true;
        'outer: for i in 0..j {
            for k in j + 1..n {
                let (si, ui) = &pts[i];
                let (sk, uk) = &pts[k];
                let lhs = (uj - ui).scale_int((sk - si) as i64);
                let rhs = (uk - ui).scale_int((sj - si) as i64);
                if lhs.cmp(&rhs) != Ordering::Less {
                    vertex = false;
                    break 'outer;
                }
            }
        }
        if vertex {
            out.push((*sj, uj.clone()));
        }
    }
    out
}

// Valuation oracle.

pub fn vp(a: &Rat, p: Prime) -> Option<i64> {
    if a.is_zero() {
        return None;
    }
    let pb = p.big();
    let count = |mut n: BigInt| {
        let mut k = 0;
        while (&n % &pb).is_zero() {
            n /= &pb;
            k += 1;
        }
        k
    };
    Some(count(a.numer().abs()) - count(a.denom().clone()))
}

pub fn residue_mod(a: &Rat, p: Prime) -> u64 {
    let pb = p.big();
    let n = a.numer().mod_floor(&pb);
    let d = a.denom().mod_floor(&pb);
    let inv = d.modpow(&(&pb - 2u32), &pb);
    (n * inv).mod_floor(&pb).to_u64().unwrap()
}

/// phi-adic expansion by repeated division.
pub fn expand(f: &PolyK, phi: &PolyK) -> Vec<PolyK> {
    let mut out = Vec::new();
    let mut cur = f.clone();
    while !cur.is_zero() {
        let (q, r) = cur.div_rem(phi).unwrap();
        out.push(r);
        cur = q;
    }
    out
}

/// mu_i by the defining recursion, independently of the chain's memo.
pub fn val(c: &Chain, i: usize, f: &PolyK) -> Option<Rat> {
    let lvl = c.level(i);
    expand(f, &lvl.phi)
        .iter()
        .enumerate()
        .filter_map(|(s, a)| val_below(c, i, a).map(|w| w + &lvl.gamma * Rat::from_integer(s.into())))
        .min()
}

pub fn val_below(c: &Chain, i: usize, a: &PolyK) -> Option<Rat> {
    if a.is_zero() {
        return None;
    }
    if i == 0 {
        return vp(&a.coeff(0), c.prime()).map(|v| Rat::from_integer(v.into()));
    }
    val(c, i - 1, a)
}

/// (iota_i, e_i) for every level: iota_0 = 1, e_i = denominator of
/// gamma_i / iota_i and iota_{i+1} = iota_i / e_i.
pub fn ramification(c: &Chain) -> Vec<(Rat, i64)> {
    let mut iota = Rat::one();
    let mut out = Vec::new();
    for l in c.levels() {
        let e = (&l.gamma / &iota).denom().to_i64().unwrap();
        out.push((iota.clone(), e));
        iota /= Rat::from_integer(e.into());
    }
    out
}

// Residual oracle.
//
// A monomial phi_0^n_0 ... phi_r^n_r p^n_c is stored as the integer vector
// (n_0, ..., n_r, n_c). The residual coefficient of a at level i is the
// image of a * pi_i^(-u) in kappa_i, where pi_0 = p and
// pi_{i+1} = phi_i^l_i pi_i^l'_i with l_i h_i + l'_i e_i = 1, h_i = e_i gamma_i / iota_i.
// A degree-zero monomial reduces through phi_i^(e_i n) = Y_i^n pi_i^(h_i n),
// with Y_i mapping to the generator z_i.

pub struct Oracle<'a> {
    pub c: &'a Chain,
    ram: Vec<(Rat, i64)>,
    pi: Vec<Vec<BigInt>>,
}

pub struct OracleResidual {
    pub s: usize,
    pub sprime: usize,
    pub u: Rat,
    pub poly: TowerPoly,
}

fn bezout_small(h: &BigInt, e: &BigInt) -> (BigInt, BigInt) {
    // l h + l' e = 1 with 0 <= l < e, by search.
    let mut l = BigInt::zero();
    while &l < e {
        let rest = BigInt::one() - &l * h;
        if (&rest % e).is_zero() {
            return (l, rest / e);
        }
        l += 1;
    }
    panic!("h and e not coprime");
}

impl<'a> Oracle<'a> {
    pub fn new(c: &'a Chain) -> Self {
        let ram = ramification(c);
        let width = c.levels().len() + 1;
        let mut cur = vec![BigInt::zero(); width];
        cur[width - 1] = BigInt::one();
        let mut pi = vec![cur.clone()];
        for (i, (io, e)) in ram.iter().enumerate() {
            let e_big = BigInt::from(*e);
            let h = (&c.level(i).gamma * Rat::from_integer(e_big.clone()) / io).to_integer();
            let (l, lp) = bezout_small(&h, &e_big);
            let mut next: Vec<BigInt> = cur.iter().map(|x| x * &lp).collect();
            next[i] += l;
            pi.push(next.clone());
            cur = next;
        }
        Oracle { c, ram, pi }
    }

    fn value(&self, m: &[BigInt]) -> Rat {
        let k = m.len() - 1;
        let mut v = Rat::from_integer(m[k].clone());
        for (t, n) in m[..k].iter().enumerate() {
            v += &self.c.level(t).gamma * Rat::from_integer(n.clone());
        }
        v
    }

    fn axpy(acc: &mut [BigInt], a: &BigInt, x: &[BigInt]) {
        for (y, x) in acc.iter_mut().zip(x) {
            *y += a * x;
        }
    }

    /// Image in kappa_{i+1} of a degree-zero monomial in phi_0..phi_i and p.
    fn reduce(&self, i: isize, m: &[BigInt]) -> TowerElem {
        let t = self.c.tower();
        assert!(self.value(m).is_zero(), "monomial of nonzero value");
        if i < 0 {
            assert!(m.iter().all(|x| x.is_zero()));
            return t.one(0);
        }
        let iu = i as usize;
        assert!(m[iu + 1..m.len() - 1].iter().all(|x| x.is_zero()));
        let (io, e) = &self.ram[iu];
        let e_big = BigInt::from(*e);
        let n = m[iu].clone();
        assert!((&n % &e_big).is_zero(), "phi exponent not divisible by e");
        let j = &n / &e_big;
        let h = (&self.c.level(iu).gamma * Rat::from_integer(e_big) / io).to_integer();
        let mut rest = m.to_vec();
        rest[iu] = BigInt::zero();
        Self::axpy(&mut rest, &(&h * &j), &self.pi[iu]);
        let below = t.embed_up(&self.reduce(i - 1, &rest), iu + 1).unwrap();
        t.mul(&below, &t.pow(&t.gen(iu), &j).unwrap())
    }

    /// The coefficient attached to a nonzero a of degree < m_i with
    /// mu_{i-1}(a) = u.
    pub fn unit(&self, i: usize, a: &PolyK, u: &Rat) -> TowerElem {
        let t = self.c.tower();
        if i == 0 {
            let c = a.coeff(0) / p_pow(self.c.prime(), u.to_integer().to_i64().unwrap());
            return t.from_u64(0, residue_mod(&c, self.c.prime()));
        }
        let r = self.residual(i - 1, a);
        let head = t.poly_eval(&r.poly, &t.gen(i - 1));
        let width = self.pi[0].len();
        let mut m = vec![BigInt::zero(); width];
        m[i - 1] += BigInt::from(r.s);
        let (io_prev, _) = &self.ram[i - 1];
        Self::axpy(&mut m, &(&r.u / io_prev).to_integer(), &self.pi[i - 1]);
        let io = &self.ram[i].0;
        let k = u / io;
        assert!(k.is_integer());
        Self::axpy(&mut m, &-k.to_integer(), &self.pi[i]);
        t.mul(&head, &self.reduce(i as isize - 1, &m))
    }

    pub fn residual(&self, i: usize, f: &PolyK) -> OracleResidual {
        let lvl = self.c.level(i);
        let ex = expand(f, &lvl.phi);
        let pts: Vec<(usize, Rat)> =
            ex.iter().enumerate().filter_map(|(s, a)| val_below(self.c, i, a).map(|w| (s, w))).collect();
        let at = |s: usize| &lvl.gamma * Rat::from_integer(s.into());
        let mu = pts.iter().map(|(s, w)| w + at(*s)).min().unwrap();
        let on: Vec<usize> = pts.iter().filter(|(s, w)| w + at(*s) == mu).map(|(s, _)| *s).collect();
        let (s0, s1) = (on[0], *on.last().unwrap());
        let u0 = pts.iter().find(|(s, _)| *s == s0).unwrap().1.clone();
        let e = self.ram[i].1 as usize;
        assert_eq!((s1 - s0) % e, 0);
        let t = self.c.tower();
        let coeffs = (0..=(s1 - s0) / e)
            .map(|j| {
                let sj = s0 + j * e;
                if on.contains(&sj) {
                    let w = &mu - at(sj);
                    self.unit(i, &ex[sj], &w)
                } else {
                    t.zero(i)
                }
            })
            .collect();
        OracleResidual { s: s0, sprime: s1, u: u0, poly: TowerPoly::new(i, coeffs) }
    }
}
