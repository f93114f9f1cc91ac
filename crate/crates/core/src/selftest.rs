//! A quick embedded run of the main invariants on seeded random data.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::base_field::{PolyK, Prime};
use crate::maclane_chain::Chain;
use crate::newton_polygon::{lower_hull, polygon_add, principal_part, Cloud};
use crate::om_factorizer::om_factor;
use crate::ordered_groups::{bezout_ledger, GroupVec};
use crate::residue_tower::TowerPoly;
use crate::{Error, Rat, Result};

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub seed: u64,
    pub checks: Vec<Check>,
    pub ok: bool,
}

fn fail(msg: impl Into<String>) -> Result<()> {
    Err(Error::Invalid(msg.into()))
}

fn rat(g: &mut ChaCha8Rng, num: i64, den: i64) -> Rat {
    Rat::new(g.gen_range(-num..=num).into(), g.gen_range(1..=den).into())
}

fn rand_poly(g: &mut ChaCha8Rng, p: Prime, deg: usize) -> PolyK {
    let p = Rat::from_integer(p.big());
    let c: Vec<Rat> = (0..=deg)
        .map(|_| {
            let k = Rat::from_integer(g.gen_range(-5i64..=5).into());
            (0..g.gen_range(0..3)).fold(k, |acc, _| acc * &p)
        })
        .collect();
    let f = PolyK::new(c);
    if f.is_zero() {
        PolyK::one()
    } else {
        f
    }
}

fn sample_chains() -> Result<Vec<Chain>> {
    let two = Prime::new(2)?;
    let three = Prime::new(3)?;
    Ok(vec![
        Chain::gauss(two),
        Chain::gauss(two).augment(&PolyK::parse("x^2+x+1")?, &Rat::from_integer(1.into()))?,
        Chain::gauss(three).augment(&PolyK::parse("x^2+1")?, &Rat::new(2.into(), 3.into()))?,
    ])
}

fn ledgers(g: &mut ChaCha8Rng) -> Result<()> {
    for _ in 0..200 {
        let k = g.gen_range(1..=3);
        let u: Vec<Rat> = (0..k).map(|_| rat(g, 40, 12)).collect();
        if !bezout_ledger(&u)?.check() {
            return fail(format!("ledger identities fail for {u:?}"));
        }
    }
    Ok(())
}

fn hulls(g: &mut ChaCha8Rng) -> Result<()> {
    for _ in 0..200 {
        let n = g.gen_range(1..=10);
        let vals: Vec<Option<GroupVec>> =
            (0..n).map(|_| g.gen_bool(0.85).then(|| GroupVec::scalar(rat(g, 20, 4)))).collect();
        let Ok(h) = lower_hull(&Cloud::from_values(vals.clone())) else { continue };
        // Every finite point lies on or above every side line.
        for side in h.sides() {
            let (s0, u0) = &side.left;
            let len = Rat::from_integer(side.length().into());
            for (s, u) in vals.iter().enumerate().filter_map(|(s, u)| u.as_ref().map(|u| (s, u))) {
                let rise = (&side.right.1 - u0).scale(&(Rat::from_integer((s as i64 - *s0 as i64).into()) / &len));
                if u < &(u0 + &rise) {
                    return fail("a point lies below the hull");
                }
            }
        }
        let sum = polygon_add(&h, &h);
        if sum.length() != 2 * h.length() {
            return fail("polygon sum has the wrong length");
        }
    }
    Ok(())
}

fn products(g: &mut ChaCha8Rng) -> Result<()> {
    for c in sample_chains()? {
        // At depth zero the whole polygon is principal.
        let bound = match c.depth() {
            0 => None,
            r => Some(GroupVec::scalar(c.value_at(r - 1, &c.level(r).phi).expect("nonzero"))),
        };
        let pp = |n| match &bound {
            Some(b) => principal_part(&n, b),
            None => n,
        };
        for _ in 0..30 {
            let (da, db) = (g.gen_range(0..7), g.gen_range(0..7));
            let a = rand_poly(g, c.prime(), da);
            let b = rand_poly(g, c.prime(), db);
            let ab = &a * &b;
            let lhs = pp(c.newton(&ab)?);
            let rhs = polygon_add(&pp(c.newton(&a)?), &pp(c.newton(&b)?));
            if lhs != rhs {
                return fail(format!("product theorem fails for ({a}) * ({b})"));
            }
            let (ra, rb, rab) = (c.residual(&a)?, c.residual(&b)?, c.residual(&ab)?);
            if rab.poly != c.tower().poly_mul(&ra.poly, &rb.poly) || rab.u != &ra.u + &rb.u {
                return fail(format!("residual is not multiplicative on ({a}) * ({b})"));
            }
        }
    }
    Ok(())
}

fn keys(g: &mut ChaCha8Rng) -> Result<()> {
    for c in sample_chains()? {
        let t = c.tower();
        let r = c.depth();
        for _ in 0..10 {
            let deg = g.gen_range(1..=2);
            let psi = loop {
                let mut cs: Vec<_> = (0..deg).map(|_| t.random(r, g)).collect();
                cs.push(t.one(r));
                let psi = TowerPoly::new(r, cs);
                if !psi.coeffs[0].is_zero() && t.is_irreducible(&psi)? {
                    break psi;
                }
            };
            let phi = c.lift_key(&psi)?;
            if !c.is_key(&phi)?.is_key || c.residual(&phi)?.poly != psi {
                return fail(format!("lifted key {phi} does not reproduce its residual"));
            }
        }
    }
    Ok(())
}

fn factorizations(g: &mut ChaCha8Rng) -> Result<()> {
    let known = [("x^4+1", 2, vec![(4, 1)]), ("x^4+1", 3, vec![(1, 2), (1, 2)]), ("x^3-10", 3, vec![(1, 1), (2, 1)])];
    for (f, p, want) in known {
        let tree = om_factor(&PolyK::parse(f)?, Prime::new(p)?, 32)?;
        let mut got: Vec<_> = tree.leaves.iter().map(|l| (l.e, l.fdeg)).collect();
        got.sort();
        if got != want {
            return fail(format!("{f} at {p}: got {got:?}"));
        }
    }
    for i in 0..20 {
        let p = Prime::new([2, 3, 5, 7][i % 4])?;
        let d = g.gen_range(1..=6);
        let mut c = rand_poly(g, p, d).coeffs().to_vec();
        c.truncate(c.len().saturating_sub(1));
        c.push(Rat::from_integer(1.into()));
        let f = PolyK::new(c);
        if f.deg() == 0 || !f.is_squarefree() {
            continue;
        }
        if !om_factor(&f, p, 32)?.certify() {
            return fail(format!("degrees of the leaves of {f} at {p} do not add up"));
        }
    }
    Ok(())
}

pub fn run(seed: u64) -> Report {
    type Body = fn(&mut ChaCha8Rng) -> Result<()>;
    let list: [(&'static str, Body); 5] = [
        ("bezout_ledgers", ledgers),
        ("lower_hulls", hulls),
        ("product_laws", products),
        ("key_lifting", keys),
        ("factorization", factorizations),
    ];
    let checks: Vec<Check> = list
        .iter()
        .map(|(name, body)| {
            let res = body(&mut ChaCha8Rng::seed_from_u64(seed));
            Check { name, ok: res.is_ok(), detail: res.err().map(|e| e.to_string()) }
        })
        .collect();
    let ok = checks.iter().all(|c| c.ok);
    Report { seed, checks, ok }
}
