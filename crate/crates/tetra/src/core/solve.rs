//! Exact branching elimination for the small polynomial systems that arise
//! when the core relations are restricted to a zero pattern.
//!
//! Unknowns are [`Var::Param`]s. The solver repeatedly picks
//!
//! - a univariate equation, branching on its rational roots, or
//! - an equation a·v + b linear in some unknown v, branching into
//!   v = −b/a (with a ≠ 0 recorded) and a = b = 0.
//!
//! Values are kept projectively per face, so substituting v = −b/a
//! multiplies a face by a power of a instead of introducing denominators.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::algebra::{Rat, SparsePoly, UniPoly, Var};
use crate::combinatorics::{face_pairs, NUM_FACES};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SolveError {
    #[error("equation {0} has roots outside the rationals")]
    IrrationalRoots(String),
    #[error("no univariate or linear equation among {0} remaining equations")]
    Stuck(usize),
    #[error("branching depth exceeded")]
    DepthExceeded,
}

/// Equations, nonvanishing conditions and the 72 core values, all
/// polynomials in the unknowns.
#[derive(Clone, Debug)]
pub struct System {
    pub eqs: Vec<SparsePoly>,
    pub nonzero: Vec<SparsePoly>,
    pub values: Vec<SparsePoly>,
}

/// A solution family: core values in the remaining free unknowns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    pub values: Vec<SparsePoly>,
    pub nonzero: Vec<SparsePoly>,
}

impl Component {
    /// Unknowns the values still depend on.
    pub fn params(&self) -> BTreeSet<Var> {
        self.values.iter().flat_map(|v| v.variables()).collect()
    }

    pub fn dimension(&self) -> usize {
        self.params().len()
    }
}

const MAX_DEPTH: usize = 96;

fn single_var(p: &SparsePoly) -> Option<Var> {
    let vs = p.variables();
    (vs.len() == 1).then(|| *vs.iter().next().unwrap())
}

/// p(v ↦ num/den)·den^d with d ≥ deg_v p.
fn subst_ratio(p: &SparsePoly, v: Var, num: &SparsePoly, den: &SparsePoly, d: u32) -> SparsePoly {
    let cs = p.coeffs_in(v);
    let mut out = SparsePoly::zero();
    for (i, c) in cs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        out = out.add(&c.mul(&num.pow(i as u32)).mul(&den.pow(d - i as u32)));
    }
    out
}

impl System {
    fn substitute(&self, v: Var, num: &SparsePoly, den: &SparsePoly) -> System {
        let one = |p: &SparsePoly| subst_ratio(p, v, num, den, p.degree_in(v));
        let mut values = self.values.clone();
        for f in 0..NUM_FACES {
            let ps = face_pairs(f);
            let d = ps.iter().map(|&p| self.values[p].degree_in(v)).max().unwrap_or(0);
            for p in ps {
                values[p] = subst_ratio(&self.values[p], v, num, den, d);
            }
        }
        System { eqs: self.eqs.iter().map(one).collect(), nonzero: self.nonzero.iter().map(one).collect(), values }
    }

    /// Drops trivial equations and conditions; None if inconsistent.
    fn simplify(mut self) -> Option<System> {
        let mut eqs = BTreeSet::new();
        for e in self.eqs {
            if e.is_zero() {
                continue;
            }
            if e.as_constant().is_some() {
                return None;
            }
            eqs.insert(e.monic());
        }
        let mut nz = BTreeSet::new();
        for n in self.nonzero {
            if n.is_zero() {
                return None;
            }
            if n.as_constant().is_none() {
                nz.insert(n.monic());
            }
        }
        self.eqs = eqs.into_iter().collect();
        self.nonzero = nz.into_iter().collect();
        Some(self)
    }
}

fn to_uni(p: &SparsePoly, v: Var) -> UniPoly {
    UniPoly::new(p.coeffs_in(v).iter().map(|c| c.as_constant().unwrap_or_else(Rat::zero)).collect())
}

/// All solution families of the system.
pub fn solve(sys: System) -> Result<Vec<Component>, SolveError> {
    let mut out = Vec::new();
    solve_rec(sys, 0, &mut out)?;
    let mut uniq: Vec<Component> = Vec::new();
    for c in out {
        if !uniq.contains(&c) {
            uniq.push(c);
        }
    }
    Ok(uniq)
}

fn solve_rec(sys: System, depth: usize, out: &mut Vec<Component>) -> Result<(), SolveError> {
    if depth > MAX_DEPTH {
        return Err(SolveError::DepthExceeded);
    }
    let Some(sys) = sys.simplify() else { return Ok(()) };
    if sys.eqs.is_empty() {
        out.push(Component { values: sys.values, nonzero: sys.nonzero });
        return Ok(());
    }
    // Univariate: branch on rational roots.
    if let Some((e, v)) = sys.eqs.iter().find_map(|e| single_var(e).map(|v| (e, v))) {
        let mut u = to_uni(e, v);
        let roots = u.rational_roots();
        for r in &roots {
            let lin = UniPoly::new(vec![-r.clone(), Rat::one()]);
            while u.div_rem(&lin).1.is_zero() && u.degree().unwrap_or(0) > 0 {
                u = u.div_rem(&lin).0;
            }
        }
        if u.degree().unwrap_or(0) > 0 {
            return Err(SolveError::IrrationalRoots(e.to_string()));
        }
        for r in roots {
            let s = sys.substitute(v, &SparsePoly::constant(r), &SparsePoly::constant(Rat::one()));
            solve_rec(s, depth + 1, out)?;
        }
        return Ok(());
    }
    // Linear in some unknown; prefer constant leading coefficients, then
    // the sparsest one.
    let mut best: Option<(usize, Var, SparsePoly, SparsePoly)> = None;
    for e in &sys.eqs {
        for v in e.variables() {
            if e.degree_in(v) != 1 {
                continue;
            }
            let cs = e.coeffs_in(v);
            let (b, a) = (cs[0].clone(), cs[1].clone());
            let cost = if a.as_constant().is_some() { 0 } else { a.num_terms() * 100 + a.total_degree() as usize };
            if best.as_ref().is_none_or(|(c, ..)| cost < *c) {
                best = Some((cost, v, a, b));
            }
        }
    }
    let Some((_, v, a, b)) = best else { return Err(SolveError::Stuck(sys.eqs.len())) };
    let mut s1 = sys.substitute(v, &b.neg(), &a);
    if a.as_constant().is_none() {
        s1.nonzero.push(a.clone());
    }
    solve_rec(s1, depth + 1, out)?;
    if a.as_constant().is_none() {
        let mut s2 = sys.clone();
        s2.eqs.push(a);
        s2.eqs.push(b);
        solve_rec(s2, depth + 1, out)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::qi;
    use crate::combinatorics::NUM_PAIRS;

    fn w(i: u16) -> SparsePoly {
        SparsePoly::var(Var::Param(i))
    }

    fn sys(eqs: Vec<SparsePoly>, v0: SparsePoly) -> System {
        let mut values = vec![SparsePoly::constant(qi(1)); NUM_PAIRS];
        values[0] = v0;
        System { eqs, nonzero: vec![], values }
    }

    #[test]
    fn quadratic_with_rational_roots() {
        // w² − 3w + 2 = 0
        let e = w(0).mul(&w(0)).sub(&w(0).scale(&qi(3))).add(&SparsePoly::constant(qi(2)));
        let cs = solve(sys(vec![e], w(0))).unwrap();
        assert_eq!(cs.len(), 2);
        assert!(cs.iter().all(|c| c.dimension() == 0));
    }

    #[test]
    fn irrational_roots_reported() {
        let e = w(0).mul(&w(0)).sub(&SparsePoly::constant(qi(2)));
        assert!(matches!(solve(sys(vec![e], w(0))), Err(SolveError::IrrationalRoots(_))));
    }

    #[test]
    fn linear_with_symbolic_coefficient_branches() {
        // w0·w1 − w0 = 0: either w1 = 1 or w0 = 0.
        let e = w(0).mul(&w(1)).sub(&w(0));
        let mut s = sys(vec![e], w(0));
        s.values[1] = w(1);
        let cs = solve(s).unwrap();
        assert_eq!(cs.len(), 2);
        assert!(cs.iter().all(|c| c.dimension() == 1));
    }

    #[test]
    fn inconsistent_and_nonzero_pruning() {
        let e = w(0).sub(&SparsePoly::constant(qi(1)));
        let mut s = sys(vec![e.clone()], w(0));
        s.nonzero.push(e);
        assert!(solve(s).unwrap().is_empty());
        let s = sys(vec![SparsePoly::constant(qi(1))], w(0));
        assert!(solve(s).unwrap().is_empty());
    }
}
