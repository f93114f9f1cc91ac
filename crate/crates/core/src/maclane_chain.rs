//! Inductive valuations mu_r = [mu_{r-1}; phi_r, gamma_r] on Q[x] over v_p.
//!
//! Values are rank one and stored as exact rationals; level i keeps its key
//! polynomial, its value, the Bezout ledger of gamma_i in the incoming basis
//! and, once a level above it exists, the residual minimal polynomial of the
//! next key polynomial.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, RwLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::base_field::{parse_rational, phi_expand, vp, PolyK, Prime};
use crate::error::{Error, Result};
use crate::newton_polygon::{is_one_sided, lambda_component, lower_hull, Cloud, Polygon};
use crate::ordered_groups::{augment_basis, bezout_ledger, coords_in_basis, Basis, GroupVec, LevelLedger};
use crate::residual::ResidualResult;
use crate::residue_tower::{Tower, TowerPoly};
use crate::Rat;

const MEMO_LIMIT: usize = 20_000;

/// One augmentation level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Level {
    pub phi: PolyK,
    pub gamma: Rat,
    pub m: usize,
    pub ledger: LevelLedger,
    pub basis_in: Basis,
    pub basis_out: Basis,
    pub resminpoly: Option<TowerPoly>,
    pub f: Option<usize>,
}

impl Level {
    fn new(phi: PolyK, gamma: Rat, basis_in: Basis) -> Result<Level> {
        let coords = coords_in_basis(&GroupVec::scalar(gamma.clone()), &basis_in)?;
        let ledger = bezout_ledger(&coords)?;
        let basis_out = augment_basis(&basis_in, &ledger)?;
        let m = phi.deg();
        Ok(Level { phi, gamma, m, ledger, basis_in, basis_out, resminpoly: None, f: None })
    }

    /// e_i.
    pub fn e(&self) -> usize {
        self.ledger.e_usize()
    }

    /// h_i = e_i * gamma_i as a value.
    pub fn h(&self) -> Rat {
        &self.gamma * Rat::from_integer(self.ledger.e_level.clone())
    }

    /// Generator of the value group of mu_{i-1}.
    pub fn iota_in(&self) -> Rat {
        self.basis_in.vecs[0].coords[0].clone()
    }

    /// Generator of the value group of mu_i.
    pub fn iota_out(&self) -> Rat {
        self.basis_out.vecs[0].coords[0].clone()
    }

    pub fn lprime(&self) -> &BigInt {
        &self.ledger.lprime
    }

    pub fn ell(&self) -> &BigInt {
        &self.ledger.l[0]
    }
}

/// A phi-expansion coefficient and its value one level down.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coef {
    pub a: PolyK,
    pub value: Option<Rat>,
}

/// Endpoints of the gamma-component of a Newton polygon.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    pub s: usize,
    pub sprime: usize,
    pub u: Rat,
}

/// Outcome of the key polynomial test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KeyTest {
    pub is_key: bool,
    pub case: Option<u8>,
    pub reason: String,
    pub one_sided: bool,
    pub residual: Option<ResidualResult>,
}

/// Ramification and residue degree data.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Invariants {
    pub e_list: Vec<usize>,
    pub f_list: Vec<usize>,
    /// e(phi_r) = e_0 ... e_{r-1}.
    pub e_phi: usize,
    /// f(phi_r) = f_0 ... f_{r-1}.
    pub f_phi: usize,
    /// e_0 ... e_r, the ramification of a key polynomial over mu_r.
    pub e_next: usize,
}

type Memo = HashMap<(usize, PolyK), Arc<Vec<Coef>>>;

/// A MacLane chain. Immutable; every operation returns a new chain sharing
/// the untouched levels.
pub struct Chain {
    prime: Prime,
    uniformizer: Rat,
    levels: Vec<Arc<Level>>,
    tower: Arc<Tower>,
    memo: RwLock<Memo>,
}

impl Clone for Chain {
    fn clone(&self) -> Self {
        let memo = self.memo.read().map(|m| m.clone()).unwrap_or_default();
        Chain {
            prime: self.prime,
            uniformizer: self.uniformizer.clone(),
            levels: self.levels.clone(),
            tower: self.tower.clone(),
            memo: RwLock::new(memo),
        }
    }
}

impl fmt::Debug for Chain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lv: Vec<String> = self.levels.iter().map(|l| format!("({}, {})", l.phi, l.gamma)).collect();
        write!(f, "Chain(p={}, [{}])", self.prime, lv.join(", "))
    }
}

fn ge_inf(v: &Option<Rat>, g: &Rat) -> bool {
    v.as_ref().is_none_or(|v| v >= g)
}

fn gt_inf(v: &Option<Rat>, g: &Rat) -> bool {
    v.as_ref().is_none_or(|v| v > g)
}

impl Chain {
    /// The depth-zero valuation mu_{x+a, gamma}.
    pub fn depth_zero(p: Prime, a: Rat, gamma: Rat) -> Chain {
        Chain::depth_zero_with_uniformizer(p, Rat::from_integer(p.big()), a, gamma).expect("p is a uniformizer")
    }

    /// Same, with residues normalized by another uniformizer of v_p.
    pub fn depth_zero_with_uniformizer(p: Prime, pi: Rat, a: Rat, gamma: Rat) -> Result<Chain> {
        if vp(&pi, p) != Some(1) {
            return Err(Error::Invalid(format!("{pi} is not a uniformizer at {p}")));
        }
        let phi = PolyK::new(vec![a, Rat::one()]);
        let level = Level::new(phi, gamma, Basis::standard(1))?;
        Ok(Chain {
            prime: p,
            uniformizer: pi,
            levels: vec![Arc::new(level)],
            tower: Arc::new(Tower::base(p)),
            memo: RwLock::new(HashMap::new()),
        })
    }

    /// Gauss' valuation.
    pub fn gauss(p: Prime) -> Chain {
        Chain::depth_zero(p, Rat::zero(), Rat::zero())
    }

    fn with_parts(&self, levels: Vec<Arc<Level>>, tower: Tower) -> Chain {
        Chain {
            prime: self.prime,
            uniformizer: self.uniformizer.clone(),
            levels,
            tower: Arc::new(tower),
            memo: RwLock::new(HashMap::new()),
        }
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn uniformizer(&self) -> &Rat {
        &self.uniformizer
    }

    /// r, the index of the top level.
    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn levels(&self) -> &[Arc<Level>] {
        &self.levels
    }

    pub fn level(&self, i: usize) -> &Level {
        &self.levels[i]
    }

    pub fn top(&self) -> &Level {
        self.levels.last().expect("chains are nonempty")
    }

    pub fn tower(&self) -> &Tower {
        &self.tower
    }

    /// Key polynomial degrees strictly increase.
    pub fn is_optimal(&self) -> bool {
        self.levels.windows(2).all(|w| w[0].m < w[1].m)
    }

    /// Chain made of levels 0..=i.
    pub fn prefix(&self, i: usize) -> Chain {
        assert!(i <= self.depth(), "prefix beyond the top level");
        if i == self.depth() {
            return self.clone();
        }
        let mut levels = self.levels[..=i].to_vec();
        let mut top = (*levels[i]).clone();
        top.resminpoly = None;
        top.f = None;
        levels[i] = Arc::new(top);
        self.with_parts(levels, self.tower.truncate(i))
    }

    /// Same chain with residues normalized by another uniformizer.
    pub fn with_uniformizer(&self, pi: Rat) -> Result<Chain> {
        let l0 = self.level(0);
        let mut c = Chain::depth_zero_with_uniformizer(self.prime, pi, l0.phi.coeff(0), l0.gamma.clone())?;
        for l in &self.levels[1..] {
            c = c.augment(&l.phi, &l.gamma)?;
        }
        Ok(c)
    }

    // Evaluation.

    /// phi_i-expansion of f with the value of each coefficient one level down.
    pub fn expansion(&self, i: usize, f: &PolyK) -> Result<Arc<Vec<Coef>>> {
        let key = (i, f.clone());
        if let Some(hit) = self.memo.read().ok().and_then(|m| m.get(&key).cloned()) {
            return Ok(hit);
        }
        let coeffs = phi_expand(f, &self.levels[i].phi)?;
        let out: Vec<Coef> = coeffs
            .into_iter()
            .map(|a| {
                let value = self.value_below(i, &a);
                Coef { a, value }
            })
            .collect();
        let out = Arc::new(out);
        if let Ok(mut m) = self.memo.write() {
            if m.len() > MEMO_LIMIT {
                m.clear();
            }
            m.insert(key, out.clone());
        }
        Ok(out)
    }

    /// Value of a polynomial of degree < m_i under mu_{i-1}; v_p below level 0.
    pub fn value_below(&self, i: usize, a: &PolyK) -> Option<Rat> {
        if i == 0 {
            debug_assert!(a.is_constant());
            vp(&a.coeff(0), self.prime).map(|v| Rat::from_integer(v.into()))
        } else {
            self.value_at(i - 1, a)
        }
    }

    /// mu_i(f); `None` is +infinity.
    pub fn value_at(&self, i: usize, f: &PolyK) -> Option<Rat> {
        if f.is_zero() {
            return None;
        }
        let ex = self.expansion(i, f).expect("key polynomials are monic");
        let g = &self.levels[i].gamma;
        ex.iter().enumerate().filter_map(|(s, c)| c.value.as_ref().map(|v| v + g * Rat::from_integer(s.into()))).min()
    }

    /// mu_r(f).
    pub fn mu_value(&self, f: &PolyK) -> Option<Rat> {
        self.value_at(self.depth(), f)
    }

    fn hull(values: impl IntoIterator<Item = Option<Rat>>) -> Result<Polygon> {
        let pts = values.into_iter().map(|v| v.map(GroupVec::scalar)).collect();
        lower_hull(&Cloud::from_values(pts))
    }

    /// N_i(f), the polygon of the phi_i-expansion with values under mu_{i-1}.
    pub fn newton_at(&self, i: usize, f: &PolyK) -> Result<Polygon> {
        if f.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let ex = self.expansion(i, f)?;
        Chain::hull(ex.iter().map(|c| c.value.clone()))
    }

    /// N_r(f).
    pub fn newton(&self, f: &PolyK) -> Result<Polygon> {
        self.newton_at(self.depth(), f)
    }

    /// Polygon of the phi-expansion of f with coefficient values under mu_r.
    pub fn newton_wrt(&self, phi: &PolyK, f: &PolyK) -> Result<Polygon> {
        if f.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let r = self.depth();
        let ex = phi_expand(f, phi)?;
        Chain::hull(ex.iter().map(|a| self.value_at(r, a)))
    }

    /// Polygon of the phi-expansion of f with coefficient values under
    /// mu_{r-1} (v_p at depth zero), for phi of degree m_r.
    pub fn newton_below(&self, phi: &PolyK, f: &PolyK) -> Result<Polygon> {
        if f.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let r = self.depth();
        if phi.deg() != self.top().m {
            return Err(Error::DegreeMismatch { expected: self.top().m, got: phi.deg() });
        }
        let ex = phi_expand(f, phi)?;
        Chain::hull(ex.iter().map(|a| self.value_below(r, a)))
    }

    /// The gamma_i-component of N_i(f).
    pub fn component_at(&self, i: usize, f: &PolyK) -> Result<Component> {
        let n = self.newton_at(i, f)?;
        let c = lambda_component(&n, &GroupVec::scalar(self.levels[i].gamma.clone()));
        Ok(Component { s: c.left.0, sprime: c.right.0, u: c.left.1.coords[0].clone() })
    }

    // Key polynomials and chain surgery.

    /// Key polynomial test for mu_r.
    pub fn is_key(&self, phi: &PolyK) -> Result<KeyTest> {
        if !phi.is_monic() {
            return Err(Error::NonMonic);
        }
        let r = self.depth();
        let top = self.top();
        let no = |reason: String, residual| KeyTest { is_key: false, case: None, reason, one_sided: false, residual };
        if phi.deg() == top.m {
            let v = self.value_at(r, &(phi - &top.phi));
            if gt_inf(&v, &top.gamma) {
                return Ok(KeyTest {
                    is_key: true,
                    case: Some(1),
                    reason: "equivalent to the top key polynomial".into(),
                    one_sided: false,
                    residual: None,
                });
            }
        }
        if phi.deg() == 0 {
            return Ok(no("constant".into(), None));
        }
        let res = self.residual(phi)?;
        if res.s != 0 {
            return Ok(no(format!("s = {} is positive", res.s), Some(res)));
        }
        let want = top.e() * top.m * res.d;
        if phi.deg() != want || res.d == 0 {
            return Ok(no(format!("degree {} differs from e*m*deg R = {want}", phi.deg()), Some(res)));
        }
        if !self.tower.is_irreducible(&res.poly)? {
            return Ok(no(format!("residual {} is reducible", self.tower.fmt_poly(&res.poly, "y")), Some(res)));
        }
        let one_sided = is_one_sided(&self.newton(phi)?, &GroupVec::scalar(top.gamma.clone()));
        Ok(KeyTest {
            is_key: true,
            case: Some(2),
            reason: "irreducible residual".into(),
            one_sided,
            residual: Some(res),
        })
    }

    /// [mu_r; phi, gamma].
    pub fn augment(&self, phi: &PolyK, gamma: &Rat) -> Result<Chain> {
        if !phi.is_monic() {
            return Err(Error::NonMonic);
        }
        let r = self.depth();
        let top = self.top();
        if phi.deg() == top.m && ge_inf(&self.value_at(r, &(phi - &top.phi)), &top.gamma) {
            return Err(Error::MacLaneViolation);
        }
        let kt = self.is_key(phi)?;
        if !kt.is_key {
            return Err(Error::NotKey(kt.reason));
        }
        let mu = self.value_at(r, phi).expect("key polynomials are nonzero");
        if gamma <= &mu {
            return Err(Error::NotStrict(mu.to_string()));
        }
        let res = kt.residual.ok_or_else(|| Error::NotKey("no residual polynomial".into()))?;
        let tower = self.tower.extend(&res.poly)?;
        let next = Level::new(phi.clone(), gamma.clone(), top.basis_out.clone())?;
        let mut old = top.clone();
        old.f = Some(res.poly.deg());
        old.resminpoly = Some(res.poly);
        let mut levels = self.levels[..r].to_vec();
        levels.push(Arc::new(old));
        levels.push(Arc::new(next));
        Ok(self.with_parts(levels, tower))
    }

    fn check_top_replacement(&self, phi: &PolyK) -> Result<()> {
        let top = self.top();
        if phi.deg() != top.m {
            return Err(Error::DegreeMismatch { expected: top.m, got: phi.deg() });
        }
        if !phi.is_monic() {
            return Err(Error::NonMonic);
        }
        if !ge_inf(&self.value_below(self.depth(), &(phi - &top.phi)), &top.gamma) {
            return Err(Error::NotEquivalent);
        }
        Ok(())
    }

    fn rebuild_top(&self, phi: &PolyK, gamma: &Rat) -> Result<Chain> {
        let r = self.depth();
        if r == 0 {
            Chain::depth_zero_with_uniformizer(self.prime, self.uniformizer.clone(), phi.coeff(0), gamma.clone())
        } else {
            self.prefix(r - 1).augment(phi, gamma)
        }
    }

    /// Replace the top level (phi_r, gamma_r) by (phi*, gamma*) with gamma* > gamma_r.
    pub fn refine(&self, phi: &PolyK, gamma: &Rat) -> Result<Chain> {
        self.check_top_replacement(phi)?;
        if gamma <= &self.top().gamma {
            return Err(Error::NotStrict(self.top().gamma.to_string()));
        }
        self.rebuild_top(phi, gamma)
    }

    /// Replace phi_r by another key polynomial of the same valuation.
    pub fn replace_top_key(&self, phi: &PolyK) -> Result<Chain> {
        self.check_top_replacement(phi)?;
        self.rebuild_top(phi, &self.top().gamma.clone())
    }

    /// Whether two optimal chains define the same valuation.
    pub fn chains_equal(&self, other: &Chain) -> Result<bool> {
        if !self.is_optimal() || !other.is_optimal() {
            return Err(Error::NonOptimal);
        }
        if self.prime != other.prime || self.levels.len() != other.levels.len() {
            return Ok(false);
        }
        for (i, (a, b)) in self.levels.iter().zip(&other.levels).enumerate() {
            if a.m != b.m || a.gamma != b.gamma {
                return Ok(false);
            }
            if !ge_inf(&self.value_below(i, &(&a.phi - &b.phi)), &a.gamma) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn invariants(&self) -> Invariants {
        let e_list: Vec<usize> = self.levels.iter().map(|l| l.e()).collect();
        let f_list: Vec<usize> = self.levels.iter().filter_map(|l| l.f).collect();
        let r = self.depth();
        Invariants {
            e_phi: e_list[..r].iter().product(),
            f_phi: f_list.iter().product(),
            e_next: e_list.iter().product(),
            e_list,
            f_list,
        }
    }

    // Serialization.

    pub fn to_json_value(&self) -> ChainJson {
        let pi = Rat::from_integer(self.prime.big());
        let r = self.depth();
        ChainJson {
            p: self.prime,
            uniformizer: (self.uniformizer != pi).then(|| self.uniformizer.to_string()),
            levels: self
                .levels
                .iter()
                .enumerate()
                .map(|(i, l)| LevelJson {
                    phi: l.phi.to_string(),
                    gamma: vec![l.gamma.to_string()],
                    e: l.e(),
                    f: if i < r { l.f } else { None },
                    h: vec![l.h().to_string()],
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_json_value()).expect("chain JSON serializes")
    }

    pub fn from_json(s: &str) -> Result<Chain> {
        let cj: ChainJson = serde_json::from_str(s).map_err(|e| Error::Invalid(format!("chain JSON: {e}")))?;
        Chain::from_json_value(&cj)
    }

    pub fn from_json_value(cj: &ChainJson) -> Result<Chain> {
        let one = |v: &[String], what: &str| -> Result<Rat> {
            match v {
                [x] => parse_rational(x),
                _ => Err(Error::Invalid(format!("{what} must have exactly one coordinate"))),
            }
        };
        let Some(first) = cj.levels.first() else {
            return Err(Error::Invalid("chain has no levels".into()));
        };
        let pi = match &cj.uniformizer {
            Some(u) => parse_rational(u)?,
            None => Rat::from_integer(cj.p.big()),
        };
        let phi0 = PolyK::parse(&first.phi)?;
        if phi0.deg() != 1 || !phi0.is_monic() {
            return Err(Error::Invalid("the first key polynomial must be monic of degree 1".into()));
        }
        let mut c = Chain::depth_zero_with_uniformizer(cj.p, pi, phi0.coeff(0), one(&first.gamma, "gamma")?)?;
        for l in &cj.levels[1..] {
            c = c.augment(&PolyK::parse(&l.phi)?, &one(&l.gamma, "gamma")?)?;
        }
        let r = c.depth();
        for (i, (l, got)) in cj.levels.iter().zip(c.levels.iter()).enumerate() {
            let f_ok = if i < r { l.f == got.f } else { l.f.is_none() };
            if l.e != got.e() || one(&l.h, "h")? != got.h() || !f_ok {
                return Err(Error::Invalid(format!("level {i}: recorded e, f or h disagree with the chain")));
            }
        }
        Ok(c)
    }
}

/// Serialized chain.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainJson {
    pub p: Prime,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub uniformizer: Option<String>,
    pub levels: Vec<LevelJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelJson {
    pub phi: String,
    pub gamma: Vec<String>,
    pub e: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<usize>,
    pub h: Vec<String>,
}
