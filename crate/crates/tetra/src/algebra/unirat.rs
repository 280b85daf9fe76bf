//! Univariate polynomials and rational functions in a parameter `t`.
//!
//! The "leading" data here is always taken at `t = 0`: `ord` is the
//! `t`-adic valuation and the leading coefficient is the coefficient of the
//! lowest power. That is what limits along a one-parameter degeneration need.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::rat::Rat;

/// Coefficients from the constant term upwards; no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct UniPoly {
    coeffs: Vec<Rat>,
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<Rat>) -> UniPoly {
        while coeffs.last().is_some_and(Rat::is_zero) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn zero() -> UniPoly {
        UniPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: Rat) -> UniPoly {
        UniPoly::new(vec![c])
    }

    /// c·t^e
    pub fn monomial(c: Rat, e: usize) -> UniPoly {
        let mut v = vec![Rat::zero(); e + 1];
        v[e] = c;
        UniPoly::new(v)
    }

    pub fn t() -> UniPoly {
        UniPoly::monomial(Rat::one(), 1)
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or None for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// t-adic valuation, None for zero.
    pub fn ord(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    /// Coefficient of the lowest power of t.
    pub fn low_coeff(&self) -> Option<&Rat> {
        self.ord().map(|o| &self.coeffs[o])
    }

    pub fn top_coeff(&self) -> Option<&Rat> {
        self.coeffs.last()
    }

    pub fn eval(&self, t: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * t + c;
        }
        acc
    }

    pub fn add(&self, o: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        let z = Rat::zero();
        UniPoly::new((0..n).map(|i| self.coeffs.get(i).unwrap_or(&z) + o.coeffs.get(i).unwrap_or(&z)).collect())
    }

    pub fn neg(&self) -> UniPoly {
        UniPoly { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn sub(&self, o: &UniPoly) -> UniPoly {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &UniPoly) -> UniPoly {
        if self.is_zero() || o.is_zero() {
            return UniPoly::zero();
        }
        let mut v = vec![Rat::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    v[i + j] += a * b;
                }
            }
        }
        UniPoly::new(v)
    }

    pub fn scale(&self, c: &Rat) -> UniPoly {
        UniPoly::new(self.coeffs.iter().map(|v| v * c).collect())
    }

    /// Multiplies by t^e.
    pub fn shift_up(&self, e: usize) -> UniPoly {
        if self.is_zero() {
            return UniPoly::zero();
        }
        let mut v = vec![Rat::zero(); e];
        v.extend(self.coeffs.iter().cloned());
        UniPoly::new(v)
    }

    /// Divides by t^e; the low coefficients must vanish.
    pub fn shift_down(&self, e: usize) -> UniPoly {
        assert!(self.coeffs.iter().take(e).all(Rat::is_zero), "shift_down would drop nonzero terms");
        UniPoly::new(self.coeffs.iter().skip(e).cloned().collect())
    }

    /// p(t + t0).
    pub fn taylor_shift(&self, t0: &Rat) -> UniPoly {
        // Horner in the polynomial ring.
        let lin = UniPoly::new(vec![t0.clone(), Rat::one()]);
        let mut acc = UniPoly::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(&lin).add(&UniPoly::constant(c.clone()));
        }
        acc
    }

    /// t^n · p(1/t) for n ≥ degree.
    pub fn reversed(&self, n: usize) -> UniPoly {
        let mut v = vec![Rat::zero(); n + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            v[n - i] = c.clone();
        }
        UniPoly::new(v)
    }

    pub fn div_rem(&self, d: &UniPoly) -> (UniPoly, UniPoly) {
        let dd = d.degree().expect("division by zero polynomial");
        let lead = d.top_coeff().unwrap().clone();
        let mut r = self.coeffs.clone();
        let mut qv = vec![Rat::zero(); self.coeffs.len().saturating_sub(dd)];
        while r.len() > dd && !r.is_empty() {
            let k = r.len() - 1 - dd;
            let f = r.last().unwrap() / &lead;
            if !f.is_zero() {
                for (i, c) in d.coeffs.iter().enumerate() {
                    r[k + i] -= &f * c;
                }
                qv[k] = f;
            }
            r.pop();
        }
        (UniPoly::new(qv), UniPoly::new(r))
    }

    pub fn monic(&self) -> UniPoly {
        match self.top_coeff() {
            Some(c) => self.scale(&c.recip()),
            None => UniPoly::zero(),
        }
    }

    pub fn gcd(&self, o: &UniPoly) -> UniPoly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    /// All rational roots, without multiplicity, in increasing order.
    pub fn rational_roots(&self) -> Vec<Rat> {
        let Some(ord) = self.ord() else {
            return Vec::new();
        };
        let mut roots = Vec::new();
        if ord > 0 {
            roots.push(Rat::zero());
        }
        let p = self.shift_down(ord);
        if p.degree().unwrap_or(0) == 0 {
            return roots;
        }
        // Integer coefficients, then the rational root theorem.
        let l = p.coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = p.coeffs.iter().map(|c| c.numer() * (&l / c.denom())).collect();
        let a0 = ints[0].abs();
        let an = ints.last().unwrap().abs();
        for num in divisors(&a0) {
            for den in divisors(&an) {
                for sign in [1i64, -1] {
                    let r = Rat::from_bigints(&num * BigInt::from(sign), den.clone());
                    if !roots.contains(&r) && p.eval(&r).is_zero() {
                        roots.push(r);
                    }
                }
            }
        }
        roots.sort();
        roots
    }
}

/// Positive divisors by trial division. The integers met here are small.
fn divisors(n: &BigInt) -> Vec<BigInt> {
    assert!(!n.is_zero());
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = BigInt::one();
    while &d * &d <= *n {
        if (n % &d).is_zero() {
            let other = n / &d;
            if other != d {
                large.push(other);
            }
            small.push(d.clone());
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

impl fmt::Debug for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| match i {
                0 => format!("{c}"),
                1 => format!("{c}*t"),
                _ => format!("{c}*t^{i}"),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

/// Rational function num/den in t.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UniRat {
    pub num: UniPoly,
    pub den: UniPoly,
}

impl UniRat {
    pub fn new(num: UniPoly, den: UniPoly) -> UniRat {
        assert!(!den.is_zero(), "zero denominator");
        UniRat { num, den }.reduced()
    }

    pub fn from_poly(p: UniPoly) -> UniRat {
        UniRat { num: p, den: UniPoly::constant(Rat::one()) }
    }

    pub fn constant(c: Rat) -> UniRat {
        UniRat::from_poly(UniPoly::constant(c))
    }

    pub fn zero() -> UniRat {
        UniRat::from_poly(UniPoly::zero())
    }

    /// c·t^e for any integer e.
    pub fn monomial(c: Rat, e: i64) -> UniRat {
        if e >= 0 {
            UniRat::from_poly(UniPoly::monomial(c, e as usize))
        } else {
            UniRat { num: UniPoly::constant(c), den: UniPoly::monomial(Rat::one(), (-e) as usize) }
        }
    }

    pub fn t() -> UniRat {
        UniRat::from_poly(UniPoly::t())
    }

    fn reduced(self) -> UniRat {
        if self.num.is_zero() {
            return UniRat::zero();
        }
        let g = self.num.gcd(&self.den);
        let (mut n, mut d) =
            if g.degree() == Some(0) { (self.num, self.den) } else { (self.num.div_rem(&g).0, self.den.div_rem(&g).0) };
        let c = d.top_coeff().unwrap().recip();
        n = n.scale(&c);
        d = d.scale(&c);
        UniRat { num: n, den: d }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn add(&self, o: &UniRat) -> UniRat {
        if self.den == o.den {
            return UniRat::new(self.num.add(&o.num), self.den.clone());
        }
        UniRat::new(self.num.mul(&o.den).add(&o.num.mul(&self.den)), self.den.mul(&o.den))
    }

    pub fn neg(&self) -> UniRat {
        UniRat { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn sub(&self, o: &UniRat) -> UniRat {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &UniRat) -> UniRat {
        UniRat::new(self.num.mul(&o.num), self.den.mul(&o.den))
    }

    pub fn div(&self, o: &UniRat) -> UniRat {
        assert!(!o.is_zero(), "division by zero rational function");
        UniRat::new(self.num.mul(&o.den), self.den.mul(&o.num))
    }

    pub fn scale(&self, c: &Rat) -> UniRat {
        UniRat::new(self.num.scale(c), self.den.clone())
    }

    /// t-adic order; None for zero.
    pub fn ord(&self) -> Option<i64> {
        Some(self.num.ord()? as i64 - self.den.ord().unwrap() as i64)
    }

    /// Coefficient of t^ord.
    pub fn leading_coeff(&self) -> Option<Rat> {
        Some(self.num.low_coeff()? / self.den.low_coeff().unwrap())
    }

    /// Value at t, or None at a pole.
    pub fn eval(&self, t: &Rat) -> Option<Rat> {
        let d = self.den.eval(t);
        if d.is_zero() {
            return None;
        }
        Some(self.num.eval(t) / d)
    }

    /// The same function re-expanded around t0: f(t0 + s) as a function of s.
    pub fn recentered(&self, t0: &Rat) -> UniRat {
        UniRat::new(self.num.taylor_shift(t0), self.den.taylor_shift(t0))
    }

    /// f(1/s) as a function of s, for limits at infinity.
    pub fn inverted(&self) -> UniRat {
        let n = self.num.degree().unwrap_or(0);
        let d = self.den.degree().unwrap();
        let m = n.max(d);
        UniRat::new(self.num.reversed(m), self.den.reversed(m))
    }
}

impl fmt::Debug for UniRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?})/({:?})", self.num, self.den)
    }
}

/// Rescales a vector of rational functions by t^(−min ord) and evaluates at
/// t = 0: the limit point in projective space. None if every entry is zero.
pub fn leading_at_order(v: &[UniRat]) -> Option<Vec<Rat>> {
    let m = v.iter().filter_map(UniRat::ord).min()?;
    Some(
        v.iter()
            .map(|f| match f.ord() {
                Some(o) if o == m => f.leading_coeff().unwrap(),
                _ => Rat::zero(),
            })
            .collect(),
    )
}

/// Limit of the projective point v(t) as t → t0 (None = t → ∞).
pub fn projective_limit(v: &[UniRat], t0: Option<&Rat>) -> Option<Vec<Rat>> {
    let moved: Vec<UniRat> = match t0 {
        Some(t0) => v.iter().map(|f| f.recentered(t0)).collect(),
        None => v.iter().map(UniRat::inverted).collect(),
    };
    leading_at_order(&moved)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat::{q, qi};

    fn p(c: &[i64]) -> UniPoly {
        UniPoly::new(c.iter().map(|&v| qi(v)).collect())
    }

    #[test]
    fn order_and_leading() {
        let f = UniRat::new(p(&[0, 0, 3, 1]), p(&[0, 2]));
        assert_eq!(f.ord(), Some(1));
        assert_eq!(f.leading_coeff(), Some(q(3, 2)));
        assert_eq!(UniRat::monomial(qi(5), -2).ord(), Some(-2));
    }

    #[test]
    fn leading_vector() {
        let v = vec![UniRat::monomial(qi(2), 1), UniRat::from_poly(p(&[0, 7, 1])), UniRat::monomial(qi(4), 3)];
        assert_eq!(leading_at_order(&v), Some(vec![qi(2), qi(7), qi(0)]));
        assert_eq!(leading_at_order(&[UniRat::zero()]), None);
    }

    #[test]
    fn roots_and_gcd() {
        // (t - 1/2)(t + 3) t
        let f = p(&[0, -3, 5, 2]).scale(&q(1, 2));
        assert_eq!(f.rational_roots(), vec![qi(-3), qi(0), q(1, 2)]);
        assert!(p(&[2, 0, 1]).rational_roots().is_empty());
        let g = p(&[-1, 0, 1]).gcd(&p(&[1, 1]));
        assert_eq!(g, p(&[1, 1]));
    }

    #[test]
    fn shifts_and_limits() {
        let f = p(&[1, 2, 1]); // (t+1)^2
        assert_eq!(f.taylor_shift(&qi(-1)), p(&[0, 0, 1]));
        let v = vec![UniRat::from_poly(p(&[1, 1])), UniRat::from_poly(p(&[0, 2]))];
        assert_eq!(projective_limit(&v, None), Some(vec![qi(1), qi(2)]));
        assert_eq!(projective_limit(&v, Some(&qi(-1))), Some(vec![qi(0), qi(-2)]));
    }

    #[test]
    fn reduce_cancels() {
        let f = UniRat::new(p(&[-1, 0, 1]), p(&[1, 1]));
        assert_eq!(f.num, p(&[-1, 1]));
        assert_eq!(f.den, p(&[1]));
    }
}
