//! The OM driver: a tree of optimal MacLane chains whose leaves correspond to
//! the irreducible factors over Q_p of a monic separable polynomial.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::base_field::{vp, PolyK, Prime};
use crate::error::{Error, Result};
use crate::maclane_chain::Chain;
use crate::newton_polygon::Polygon;
use crate::residue_tower::TowerPoly;
use crate::Rat;

/// Refinements allowed in a row on one branch before giving up.
const MAX_REFINEMENTS: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OmOptions {
    /// Longest chain allowed, counted in levels.
    pub max_depth: usize,
    pub seed: u64,
}

impl Default for OmOptions {
    fn default() -> Self {
        OmOptions { max_depth: 32, seed: 0 }
    }
}

/// One p-adic factor.
#[derive(Clone, Debug)]
pub struct OMLeaf {
    pub chain: Chain,
    /// gamma of the side that produced the leaf, the top gamma of `chain`.
    pub side_gamma: Rat,
    pub psi: TowerPoly,
    pub e: usize,
    pub fdeg: usize,
    /// Monic approximation to the factor; the factor itself when `exact`.
    pub approx: PolyK,
    pub exact: bool,
}

impl OMLeaf {
    pub fn report(&self) -> LeafReport {
        LeafReport {
            e: self.e,
            f: self.fdeg,
            depth: self.chain.depth(),
            gammas: self.chain.levels().iter().map(|l| l.gamma.to_string()).collect(),
            psi: self.chain.tower().fmt_poly(&self.psi, "y"),
            phi_chain: self.chain.levels().iter().map(|l| l.phi.to_string()).collect(),
            approx: self.approx.to_string(),
        }
    }
}

/// Branch events, in exploration order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum TraceEvent {
    Polygon { depth: usize, phi: String, vertices: Vec<(usize, String)> },
    Side { depth: usize, gamma: String },
    Residual { depth: usize, r: String, factors: Vec<(String, usize)> },
    Augment { depth: usize, phi: String, gamma: String },
    Refine { depth: usize, phi: String, gamma: String },
    Leaf { depth: usize, e: usize, f: usize, exact: bool },
}

#[derive(Clone, Debug)]
pub struct OMTree {
    pub input: PolyK,
    pub p: Prime,
    pub leaves: Vec<OMLeaf>,
    pub trace: Vec<TraceEvent>,
}

impl OMTree {
    /// Sum of e * f over the leaves equals the input degree.
    pub fn certify(&self) -> bool {
        certify_leaves(self.input.deg(), self.leaves.iter().map(|l| (l.e, l.fdeg)))
    }

    pub fn report(&self) -> TreeReport {
        TreeReport {
            p: self.p,
            f: self.input.to_string(),
            leaves: self.leaves.iter().map(OMLeaf::report).collect(),
            certified: self.certify(),
        }
    }
}

pub fn certify_leaves(degree: usize, leaves: impl IntoIterator<Item = (usize, usize)>) -> bool {
    leaves.into_iter().map(|(e, f)| e * f).sum::<usize>() == degree
}

/// Serializable leaf summary.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LeafReport {
    pub e: usize,
    pub f: usize,
    pub depth: usize,
    pub gammas: Vec<String>,
    pub psi: String,
    pub phi_chain: Vec<String>,
    pub approx: String,
}

/// Serializable tree summary.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeReport {
    pub p: Prime,
    pub f: String,
    pub leaves: Vec<LeafReport>,
    pub certified: bool,
}

impl TreeReport {
    pub fn certify(&self) -> bool {
        match PolyK::parse(&self.f) {
            Ok(f) => certify_leaves(f.deg(), self.leaves.iter().map(|l| (l.e, l.f))),
            Err(_) => false,
        }
    }
}

/// Check the driver's input contract.
pub fn check_input(f: &PolyK, p: Prime) -> Result<()> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if !f.is_monic() {
        return Err(Error::NonMonic);
    }
    if f.deg() == 0 {
        return Err(Error::Invalid("input must have degree at least 1".into()));
    }
    if let Some(c) = f.coeffs().iter().find(|c| vp(c, p).is_some_and(|v| v < 0)) {
        return Err(Error::NonIntegral(c.to_string()));
    }
    if !f.is_squarefree() {
        return Err(Error::NotSquarefree);
    }
    Ok(())
}

pub fn om_factor(f: &PolyK, p: Prime, max_depth: usize) -> Result<OMTree> {
    om_factor_with(f, p, OmOptions { max_depth, ..OmOptions::default() })
}

pub fn om_factor_with(f: &PolyK, p: Prime, opts: OmOptions) -> Result<OMTree> {
    check_input(f, p)?;
    let mut d = Driver { f, opts, leaves: Vec::new(), trace: Vec::new() };
    d.root(p)?;
    Ok(OMTree { input: f.clone(), p, leaves: d.leaves, trace: d.trace })
}

struct Driver<'a> {
    f: &'a PolyK,
    opts: OmOptions,
    leaves: Vec<OMLeaf>,
    trace: Vec<TraceEvent>,
}

fn side_gammas(n: &Polygon, bound: &Rat) -> Vec<Rat> {
    n.sides()
        .iter()
        .map(|s| -s.slope().expect("sides have positive length").coords[0].clone())
        .filter(|g| g > bound)
        .collect()
}

impl Driver<'_> {
    fn polygon_event(&mut self, depth: usize, phi: &PolyK, n: &Polygon) {
        let vertices = n.vertices.iter().map(|(s, u)| (*s, u.coords[0].to_string())).collect();
        self.trace.push(TraceEvent::Polygon { depth, phi: phi.to_string(), vertices });
    }

    fn root(&mut self, p: Prime) -> Result<()> {
        let g = Chain::gauss(p);
        let x = PolyK::x();
        let n = g.newton_below(&x, self.f)?;
        self.polygon_event(0, &x, &n);
        if n.left().0 > 0 {
            let chain = Chain::depth_zero(p, Rat::zero(), Rat::one());
            self.exact_leaf(chain);
        }
        for gamma in side_gammas(&n, &-Rat::one()) {
            self.trace.push(TraceEvent::Side { depth: 0, gamma: gamma.to_string() });
            self.node(Chain::depth_zero(p, Rat::zero(), gamma), 0)?;
        }
        Ok(())
    }

    fn exact_leaf(&mut self, chain: Chain) {
        let inv = chain.invariants();
        let t = chain.tower();
        let psi = TowerPoly::new(chain.depth(), vec![t.zero(chain.depth()), t.one(chain.depth())]);
        self.trace.push(TraceEvent::Leaf { depth: chain.depth(), e: inv.e_phi, f: inv.f_phi, exact: true });
        self.leaves.push(OMLeaf {
            side_gamma: chain.top().gamma.clone(),
            psi,
            e: inv.e_phi,
            fdeg: inv.f_phi,
            approx: chain.top().phi.clone(),
            exact: true,
            chain,
        });
    }

    fn node(&mut self, c: Chain, refinements: usize) -> Result<()> {
        let r = c.depth();
        if r + 1 > self.opts.max_depth {
            return Err(Error::DepthExceeded(self.opts.max_depth));
        }
        if refinements > MAX_REFINEMENTS {
            return Err(Error::DepthExceeded(refinements));
        }
        let res = c.residual(self.f)?;
        let fac = c.tower().factor(&res.poly, self.opts.seed)?;
        self.trace.push(TraceEvent::Residual {
            depth: r,
            r: c.tower().fmt_poly(&res.poly, "y"),
            factors: fac.iter().map(|(g, m)| (c.tower().fmt_poly(g, "y"), *m)).collect(),
        });
        for (psi, mult) in fac {
            if mult == 1 {
                let inv = c.invariants();
                let (e, fdeg) = (inv.e_next, psi.deg() * inv.f_phi);
                self.trace.push(TraceEvent::Leaf { depth: r, e, f: fdeg, exact: false });
                self.leaves.push(OMLeaf {
                    chain: c.clone(),
                    side_gamma: c.top().gamma.clone(),
                    approx: c.lift_key(&psi)?,
                    psi,
                    e,
                    fdeg,
                    exact: false,
                });
                continue;
            }
            let phi = c.lift_key(&psi)?;
            if phi.deg() == c.top().m {
                let n = c.newton_below(&phi, self.f)?;
                self.polygon_event(r, &phi, &n);
                let gamma_r = c.top().gamma.clone();
                if n.left().0 > 0 {
                    self.exact_leaf(c.refine(&phi, &(&gamma_r + Rat::one()))?);
                }
                for gamma in side_gammas(&n, &gamma_r) {
                    self.trace.push(TraceEvent::Refine { depth: r, phi: phi.to_string(), gamma: gamma.to_string() });
                    self.node(c.refine(&phi, &gamma)?, refinements + 1)?;
                }
            } else {
                let n = c.newton_wrt(&phi, self.f)?;
                self.polygon_event(r + 1, &phi, &n);
                let mu = c.mu_value(&phi).expect("key polynomials are nonzero");
                if n.left().0 > 0 {
                    self.exact_leaf(c.augment(&phi, &(&mu + Rat::one()))?);
                }
                for gamma in side_gammas(&n, &mu) {
                    self.trace.push(TraceEvent::Augment {
                        depth: r + 1,
                        phi: phi.to_string(),
                        gamma: gamma.to_string(),
                    });
                    self.node(c.augment(&phi, &gamma)?, 0)?;
                }
            }
        }
        Ok(())
    }
}
