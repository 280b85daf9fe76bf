//! Sparse multivariate polynomials over ℚ.
//!
//! Variables come from a small closed registry ([`Var`]) that covers every
//! coordinate this crate needs: edge coordinates, core coordinates, flag
//! coordinates, symbolic matrix entries and free solver parameters.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::rat::Rat;
use super::unirat::UniRat;
use crate::combinatorics::{edge, pair, FLAG_NAMES};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Var {
    /// Edge coordinate x_α, by edge index.
    Edge(u8),
    /// Core coordinate y_{α,β}, by (α,β)-pair index.
    Core(u8),
    /// One of the six flag coordinates.
    Flag(u8),
    /// Entry (row, col) of a symbolic 4×4 matrix, zero-based.
    Matrix(u8, u8),
    /// Free parameter introduced by a solver.
    Param(u16),
}

impl Var {
    /// Identifier usable in external computer-algebra systems.
    pub fn name(&self) -> String {
        match *self {
            Var::Edge(e) => {
                let e = edge(e as usize);
                format!("x_{}_{}", e.lo, e.hi)
            }
            Var::Core(p) => {
                let (e, f) = pair(p as usize);
                let e = edge(e);
                format!("y_{}_{}_{}", e.lo, e.hi, crate::combinatorics::face(f).id())
            }
            Var::Flag(i) => FLAG_NAMES[i as usize].to_string(),
            Var::Matrix(r, c) => format!("g_{}_{}", r + 1, c + 1),
            Var::Param(i) => format!("w{i}"),
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// Sorted list of (variable, exponent) with positive exponents.
pub type Monomial = Vec<(Var, u32)>;

fn mono_mul(a: &Monomial, b: &Monomial) -> Monomial {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                out.push((a[i].0, a[i].1 + b[j].1));
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Minimal commutative-ring interface used for evaluating polynomials in
/// other rings (numbers, rational functions, polynomials).
pub trait Ring: Clone {
    fn zero() -> Self;
    fn from_rat(c: &Rat) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
}

impl Ring for Rat {
    fn zero() -> Rat {
        Rat::zero()
    }
    fn from_rat(c: &Rat) -> Rat {
        c.clone()
    }
    fn add(&self, o: &Rat) -> Rat {
        self + o
    }
    fn mul(&self, o: &Rat) -> Rat {
        self * o
    }
}

impl Ring for UniRat {
    fn zero() -> UniRat {
        UniRat::zero()
    }
    fn from_rat(c: &Rat) -> UniRat {
        UniRat::constant(c.clone())
    }
    fn add(&self, o: &UniRat) -> UniRat {
        UniRat::add(self, o)
    }
    fn mul(&self, o: &UniRat) -> UniRat {
        UniRat::mul(self, o)
    }
}

impl Ring for SparsePoly {
    fn zero() -> SparsePoly {
        SparsePoly::zero()
    }
    fn from_rat(c: &Rat) -> SparsePoly {
        SparsePoly::constant(c.clone())
    }
    fn add(&self, o: &SparsePoly) -> SparsePoly {
        SparsePoly::add(self, o)
    }
    fn mul(&self, o: &SparsePoly) -> SparsePoly {
        SparsePoly::mul(self, o)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("no value for variable {0}")]
pub struct MissingVar(pub Var);

#[derive(Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct SparsePoly {
    terms: BTreeMap<Monomial, Rat>,
}

impl SparsePoly {
    pub fn zero() -> SparsePoly {
        SparsePoly::default()
    }

    pub fn constant(c: Rat) -> SparsePoly {
        let mut p = SparsePoly::zero();
        p.add_term(Vec::new(), c);
        p
    }

    pub fn var(v: Var) -> SparsePoly {
        SparsePoly::term(Rat::one(), &[(v, 1)])
    }

    /// c · Π v^e. Repeated variables are merged.
    pub fn term(c: Rat, vars: &[(Var, u32)]) -> SparsePoly {
        let mut m: Monomial = Vec::new();
        for &(v, e) in vars {
            if e > 0 {
                m = mono_mul(&m, &vec![(v, e)]);
            }
        }
        let mut p = SparsePoly::zero();
        p.add_term(m, c);
        p
    }

    /// c · product of the listed variables (with repetition).
    pub fn product(c: Rat, vars: &[Var]) -> SparsePoly {
        let v: Vec<(Var, u32)> = vars.iter().map(|&v| (v, 1)).collect();
        SparsePoly::term(c, &v)
    }

    pub fn add_term(&mut self, m: Monomial, c: Rat) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rat)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The value if the polynomial is constant (including zero).
    pub fn as_constant(&self) -> Option<Rat> {
        match self.terms.len() {
            0 => Some(Rat::zero()),
            1 => self.terms.get(&Vec::new()).cloned(),
            _ => None,
        }
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.iter().map(|&(_, e)| e).sum()).max().unwrap_or(0)
    }

    pub fn degree_in(&self, v: Var) -> u32 {
        self.terms.keys().map(|m| m.iter().find(|&&(w, _)| w == v).map_or(0, |&(_, e)| e)).max().unwrap_or(0)
    }

    pub fn variables(&self) -> BTreeSet<Var> {
        self.terms.keys().flat_map(|m| m.iter().map(|&(v, _)| v)).collect()
    }

    pub fn add(&self, o: &SparsePoly) -> SparsePoly {
        let mut r = self.clone();
        for (m, c) in &o.terms {
            r.add_term(m.clone(), c.clone());
        }
        r
    }

    pub fn neg(&self) -> SparsePoly {
        SparsePoly { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }

    pub fn sub(&self, o: &SparsePoly) -> SparsePoly {
        let mut r = self.clone();
        for (m, c) in &o.terms {
            r.add_term(m.clone(), -c);
        }
        r
    }

    pub fn mul(&self, o: &SparsePoly) -> SparsePoly {
        let mut r = SparsePoly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &o.terms {
                r.add_term(mono_mul(ma, mb), ca * cb);
            }
        }
        r
    }

    pub fn scale(&self, c: &Rat) -> SparsePoly {
        if c.is_zero() {
            return SparsePoly::zero();
        }
        SparsePoly { terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect() }
    }

    pub fn pow(&self, e: u32) -> SparsePoly {
        let mut acc = SparsePoly::constant(Rat::one());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Evaluates in any ring given values for the variables.
    pub fn eval_in<R: Ring>(&self, val: &dyn Fn(Var) -> Option<R>) -> Result<R, MissingVar> {
        let mut cache: HashMap<(Var, u32), R> = HashMap::new();
        let mut acc = R::zero();
        for (m, c) in &self.terms {
            let mut t = R::from_rat(c);
            for &(v, e) in m {
                let p = match cache.get(&(v, e)) {
                    Some(p) => p.clone(),
                    None => {
                        let base = val(v).ok_or(MissingVar(v))?;
                        let mut p = base.clone();
                        for _ in 1..e {
                            p = p.mul(&base);
                        }
                        cache.insert((v, e), p.clone());
                        p
                    }
                };
                t = t.mul(&p);
            }
            acc = acc.add(&t);
        }
        Ok(acc)
    }

    pub fn evaluate(&self, val: &dyn Fn(Var) -> Option<Rat>) -> Result<Rat, MissingVar> {
        // Direct loop: faster than the generic path and this is the hot one.
        let mut acc = Rat::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for &(v, e) in m {
                let x = val(v).ok_or(MissingVar(v))?;
                if x.is_zero() {
                    t = Rat::zero();
                    break;
                }
                t *= x.pow(e);
            }
            acc += t;
        }
        Ok(acc)
    }

    pub fn evaluate_map(&self, point: &HashMap<Var, Rat>) -> Result<Rat, MissingVar> {
        self.evaluate(&|v| point.get(&v).cloned())
    }

    /// Formal partial derivative.
    pub fn derivative(&self, v: Var) -> SparsePoly {
        let mut r = SparsePoly::zero();
        for (m, c) in &self.terms {
            if let Some(pos) = m.iter().position(|&(w, _)| w == v) {
                let e = m[pos].1;
                let mut nm = m.clone();
                if e == 1 {
                    nm.remove(pos);
                } else {
                    nm[pos].1 = e - 1;
                }
                r.add_term(nm, c * Rat::from(e as i64));
            }
        }
        r
    }

    /// All first partial derivatives evaluated at a point, as (variable,
    /// value) with zero values omitted.
    pub fn gradient_at(&self, val: &dyn Fn(Var) -> Option<Rat>) -> Result<Vec<(Var, Rat)>, MissingVar> {
        let mut out: BTreeMap<Var, Rat> = BTreeMap::new();
        for (m, c) in &self.terms {
            let vals: Vec<Rat> = m.iter().map(|&(v, _)| val(v).ok_or(MissingVar(v))).collect::<Result<_, _>>()?;
            for (i, &(v, e)) in m.iter().enumerate() {
                let mut t = c * Rat::from(e as i64) * vals[i].pow(e - 1);
                for (j, &(_, ej)) in m.iter().enumerate() {
                    if j != i && !t.is_zero() {
                        t *= vals[j].pow(ej);
                    }
                }
                if !t.is_zero() {
                    *out.entry(v).or_insert_with(Rat::zero) += t;
                }
            }
        }
        Ok(out.into_iter().filter(|(_, c)| !c.is_zero()).collect())
    }

    /// Replaces every variable for which `val` returns a value; the others are
    /// kept symbolic.
    pub fn partial_eval(&self, val: &dyn Fn(Var) -> Option<Rat>) -> SparsePoly {
        let mut r = SparsePoly::zero();
        for (m, c) in &self.terms {
            let mut coef = c.clone();
            let mut rest: Monomial = Vec::new();
            for &(v, e) in m {
                match val(v) {
                    Some(x) => coef *= x.pow(e),
                    None => rest.push((v, e)),
                }
                if coef.is_zero() {
                    break;
                }
            }
            r.add_term(rest, coef);
        }
        r
    }

    /// Substitutes polynomials for variables (those not mapped are kept).
    pub fn substitute(&self, map: &dyn Fn(Var) -> Option<SparsePoly>) -> SparsePoly {
        self.eval_in(&|v| Some(map(v).unwrap_or_else(|| SparsePoly::var(v)))).expect("total substitution")
    }

    /// Coefficients as a polynomial in `v`: result[i] multiplies v^i.
    pub fn coeffs_in(&self, v: Var) -> Vec<SparsePoly> {
        let d = self.degree_in(v) as usize;
        let mut out = vec![SparsePoly::zero(); d + 1];
        for (m, c) in &self.terms {
            let mut e = 0;
            let rest: Monomial = m
                .iter()
                .filter(|&&(w, ew)| {
                    if w == v {
                        e = ew as usize;
                        false
                    } else {
                        true
                    }
                })
                .cloned()
                .collect();
            out[e].add_term(rest, c.clone());
        }
        out
    }

    /// Multiplies by -1 if needed so that the first term (in monomial order)
    /// has a positive coefficient. Used to deduplicate up to global sign.
    pub fn sign_normalized(&self) -> SparsePoly {
        match self.terms.values().next() {
            Some(c) if c.is_negative() => self.neg(),
            _ => self.clone(),
        }
    }

    /// Divides by the coefficient of the first term.
    pub fn monic(&self) -> SparsePoly {
        match self.terms.values().next() {
            Some(c) => self.scale(&c.recip()),
            None => self.clone(),
        }
    }
}

impl fmt::Display for SparsePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let mut parts: Vec<String> = Vec::new();
            if !a.is_one() || m.is_empty() {
                parts.push(if a.is_integer() { a.to_string() } else { format!("({a})") });
            }
            for &(v, e) in m {
                parts.push(if e == 1 { v.name() } else { format!("{}^{e}", v.name()) });
            }
            write!(f, "{}", parts.join("*"))?;
        }
        Ok(())
    }
}

impl fmt::Debug for SparsePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat::qi;

    fn x(i: u16) -> SparsePoly {
        SparsePoly::var(Var::Param(i))
    }

    #[test]
    fn arithmetic_and_eval() {
        let p = x(0).mul(&x(0)).sub(&x(1).scale(&qi(3)));
        let v = p.evaluate(&|v| match v {
            Var::Param(0) => Some(qi(3)),
            Var::Param(1) => Some(qi(2)),
            _ => None,
        });
        assert_eq!(v, Ok(qi(3)));
        assert_eq!(p.evaluate(&|_| None), Err(MissingVar(Var::Param(0))));
        assert!(x(0).sub(&x(0)).is_zero());
    }

    #[test]
    fn derivative_of_square() {
        let p = x(0).mul(&x(0));
        let d = p.derivative(Var::Param(0));
        assert_eq!(d.evaluate(&|_| Some(qi(3))), Ok(qi(6)));
    }

    #[test]
    fn coefficients_and_substitution() {
        // (w0 + 2) w1^2 + w0
        let p = x(0).add(&SparsePoly::constant(qi(2))).mul(&x(1).pow(2)).add(&x(0));
        let c = p.coeffs_in(Var::Param(1));
        assert_eq!(c.len(), 3);
        assert!(c[1].is_zero());
        assert_eq!(c[0], x(0));
        let s = p.substitute(&|v| (v == Var::Param(0)).then(|| x(1)));
        assert_eq!(s.degree_in(Var::Param(1)), 3);
        assert_eq!(s.total_degree(), 3);
    }

    #[test]
    fn gradient_matches_derivatives() {
        let p = x(0).pow(2).mul(&x(1)).add(&x(1).scale(&qi(5)));
        let val = |v: Var| match v {
            Var::Param(0) => Some(qi(2)),
            Var::Param(1) => Some(qi(-1)),
            _ => None,
        };
        let g = p.gradient_at(&val).unwrap();
        assert_eq!(g, vec![(Var::Param(0), qi(-4)), (Var::Param(1), qi(9))]);
    }
}
