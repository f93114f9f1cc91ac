//! Residual polynomials R_i(f) over the residue tower, computed by the
//! recursion c_j = eps_{i-1}(a) * R_{i-1}(a)(z_{i-1}), and the inverse
//! direction: lifting residual data back to Q[x].

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::base_field::{rat_pow, residue, vp, PolyK};
use crate::error::{Error, Result};
use crate::maclane_chain::Chain;
use crate::residue_tower::{Tower, TowerElem, TowerPoly};
use crate::Rat;

/// s_i(f), s'_i(f), u_i(f) and R_i(f).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidualResult {
    pub s: usize,
    pub sprime: usize,
    pub u: Rat,
    pub poly: TowerPoly,
    /// (s' - s) / e_i, the degree of `poly`.
    pub d: usize,
}

impl ResidualResult {
    pub fn to_json(&self, tower: &Tower) -> Value {
        json!({
            "s": self.s,
            "sprime": self.sprime,
            "u": [self.u.to_string()],
            "R": tower.fmt_poly(&self.poly, "y"),
        })
    }
}

fn to_index(x: &Rat) -> Result<BigInt> {
    if x.is_integer() {
        Ok(x.to_integer())
    } else {
        Err(Error::FractionalExponent(x.to_string()))
    }
}

impl Chain {
    /// R_i(f) together with the endpoints of the gamma_i-component.
    pub fn residual_at(&self, i: usize, f: &PolyK) -> Result<ResidualResult> {
        if f.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let comp = self.component_at(i, f)?;
        let lvl = self.level(i);
        let e = lvl.e();
        let ex = self.expansion(i, f)?;
        let at = |s: usize| &lvl.gamma * Rat::from_integer(s.into());
        let mu = &comp.u + at(comp.s);
        let span = comp.sprime - comp.s;
        if span % e != 0 {
            return Err(Error::Invalid(format!("component length {span} is not a multiple of e = {e}")));
        }
        let d = span / e;
        let mut coeffs = Vec::with_capacity(d + 1);
        for j in 0..=d {
            let sj = comp.s + j * e;
            let c = &ex[sj];
            let on_line = c.value.as_ref().is_some_and(|w| w + at(sj) == mu);
            coeffs.push(if on_line { self.unit(i, &c.a)? } else { self.tower().zero(i) });
        }
        let poly = TowerPoly::new(i, coeffs);
        debug_assert_eq!(poly.deg(), d);
        Ok(ResidualResult { s: comp.s, sprime: comp.sprime, u: comp.u, poly, d })
    }

    /// R_r(f).
    pub fn residual(&self, f: &PolyK) -> Result<ResidualResult> {
        self.residual_at(self.depth(), f)
    }

    /// z_i^(L'_i s - L_i(u)), an element of level i+1.
    fn twist(&self, i: usize, s: usize, u: &Rat) -> Result<TowerElem> {
        let lvl = self.level(i);
        let l_u = to_index(&(u / lvl.iota_in()))? * lvl.ell();
        let exp = lvl.lprime() * BigInt::from(s) - l_u;
        self.tower().pow(&self.tower().gen(i), &exp)
    }

    /// eps_i(a) for deg a < m_{i+1} and i < r.
    pub fn epsilon(&self, i: usize, a: &PolyK) -> Result<TowerElem> {
        if i >= self.depth() {
            return Err(Error::LevelMismatch(i, self.depth()));
        }
        let c = self.component_at(i, a)?;
        self.twist(i, c.s, &c.u)
    }

    /// The residual coefficient attached to a polynomial of degree < m_i:
    /// the normalized residue at level 0, eps_{i-1}(a) R_{i-1}(a)(z_{i-1}) above.
    pub fn unit(&self, i: usize, a: &PolyK) -> Result<TowerElem> {
        if a.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        debug_assert!(a.deg() < self.level(i).m);
        if i == 0 {
            let c = a.coeff(0);
            let v = vp(&c, self.prime()).expect("nonzero");
            let r = residue(&(c / rat_pow(self.uniformizer(), v)), self.prime())?;
            return Ok(self.tower().from_u64(0, r));
        }
        let r = self.residual_at(i - 1, a)?;
        let eps = self.twist(i - 1, r.s, &r.u)?;
        let t = self.tower();
        Ok(t.mul(&eps, &t.poly_eval(&r.poly, &t.gen(i - 1))))
    }

    /// R_r(a) for a nonzero constant.
    pub fn residual_const(&self, a: &Rat) -> Result<TowerElem> {
        if a.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        self.unit(self.depth(), &PolyK::constant(a.clone()))
    }

    /// A polynomial a of degree < m_i with mu_{i-1}(a) = u and unit(i, a) = xi.
    pub fn lift_element_at(&self, i: usize, xi: &TowerElem, u: &Rat) -> Result<PolyK> {
        if xi.level != i {
            return Err(Error::LevelMismatch(xi.level, i));
        }
        if xi.is_zero() {
            return Err(Error::Invalid("cannot lift the zero residue".into()));
        }
        if i == 0 {
            let n = u.to_integer().to_i64().filter(|_| u.is_integer());
            let n = n.ok_or_else(|| Error::OutsideSpan(u.to_string()))?;
            let rep = Rat::from_integer(xi.coeffs[0].into());
            return Ok(PolyK::constant(rep * rat_pow(self.uniformizer(), n)));
        }
        let lvl = self.level(i - 1);
        if !(u / lvl.iota_out()).is_integer() {
            return Err(Error::OutsideSpan(u.to_string()));
        }
        let iota = lvl.iota_in();
        let e = lvl.e();
        let at = |s: usize| &lvl.gamma * Rat::from_integer(s.into());
        let s =
            (0..e).find(|&s| ((u - at(s)) / &iota).is_integer()).ok_or_else(|| Error::OutsideSpan(u.to_string()))?;
        let u1 = u - at(s);
        let base = lvl.lprime() * BigInt::from(s) - to_index(&(&u1 / &iota))? * lvl.ell();
        let t = self.tower();
        let eta = t.mul(xi, &t.pow(&t.gen(i - 1), &-base)?);
        let parts = t.split(&eta);
        let tau = parts.iter().position(|c| !c.is_zero()).expect("nonzero element");
        let psi = TowerPoly::new(i - 1, parts[tau..].to_vec());
        let u2 = u1 - lvl.h() * Rat::from_integer(tau.into());
        self.lift_poly_at(i - 1, &psi, s + tau * e, &u2)
    }

    pub fn lift_element(&self, xi: &TowerElem, u: &Rat) -> Result<PolyK> {
        self.lift_element_at(self.depth(), xi, u)
    }

    /// f = sum_j lift(c_j, u - j h_i) phi_i^(s + j e_i), so that
    /// residual_at(i, f) = (s, u, psi).
    pub fn lift_poly_at(&self, i: usize, psi: &TowerPoly, s: usize, u: &Rat) -> Result<PolyK> {
        if psi.is_zero() || psi.coeffs[0].is_zero() {
            return Err(Error::Invalid("residual data must have a nonzero constant term".into()));
        }
        let lvl = self.level(i);
        let step = lvl.phi.pow(lvl.e());
        let mut pw = lvl.phi.pow(s);
        let mut acc = PolyK::zero();
        for (j, c) in psi.coeffs.iter().enumerate() {
            if j > 0 {
                pw = &pw * &step;
            }
            if c.is_zero() {
                continue;
            }
            let a = self.lift_element_at(i, c, &(u - lvl.h() * Rat::from_integer(j.into())))?;
            acc = &acc + &(&a * &pw);
        }
        Ok(acc)
    }

    pub fn lift_poly(&self, psi: &TowerPoly, s: usize, u: &Rat) -> Result<PolyK> {
        self.lift_poly_at(self.depth(), psi, s, u)
    }

    /// A monic key polynomial phi over mu_r with R_r(phi) = psi.
    pub fn lift_key(&self, psi: &TowerPoly) -> Result<PolyK> {
        let r = self.depth();
        if psi.level != r {
            return Err(Error::LevelMismatch(psi.level, r));
        }
        if !psi.is_monic() {
            return Err(Error::NonMonic);
        }
        if psi.deg() == 0 || psi.coeffs[0].is_zero() {
            return Err(Error::NotKey("residual factor must be irreducible and prime to y".into()));
        }
        if !self.tower().is_irreducible(psi)? {
            return Err(Error::Reducible(self.tower().fmt_poly(psi, "y")));
        }
        let u = self.top().h() * Rat::from_integer(psi.deg().into());
        self.lift_poly_at(r, psi, 0, &u)
    }
}
