//! Identity checking of U-level generators in terms of a 4×4 matrix g.
//!
//! For the configuration g·p₀ the Plücker coordinate p_{I,K} of π_I is the
//! minor of g with rows K and columns I, so
//!
//!   x_{I,J} = (p_{J,K} p_{I,B} − p_{I,K} p_{J,B}) / (p_{I,B} p_{J,B})
//!
//! with B the base subset of the rank. Each generator becomes a rational
//! function of the 16 entries; its numerator over the least common
//! denominator must be the zero polynomial.

use std::collections::{BTreeMap, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Level, Relation};
use crate::algebra::{QMatrix, Rat, SparsePoly, Var};
use crate::combinatorics::{edge, SubsetLabel};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum IdentityMode {
    Exact,
    Probabilistic { trials: usize, seed: u64 },
}

impl IdentityMode {
    pub fn probabilistic_default() -> IdentityMode {
        IdentityMode::Probabilistic { trials: 50, seed: 0 }
    }
}

/// Entries of random matrices are drawn from [−BOUND, BOUND].
pub const PROBABILISTIC_BOUND: i64 = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub zero: bool,
    pub mode: IdentityMode,
    /// Total degree of the cleared numerator in the matrix entries.
    pub degree_bound: u32,
    /// Both monomials (or all three linear terms) have the same denominator.
    pub common_denominator: bool,
    /// Number of terms of the expanded numerator (exact mode only).
    pub numerator_terms: Option<usize>,
    pub trials: usize,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum IdentityError {
    #[error("symbolic identity check applies to U-level relations only")]
    NotULevel,
    #[error("relation contains a non-edge variable {0}")]
    NonEdgeVariable(Var),
}

/// Denominator atom multiset: subset mask → multiplicity.
type Atoms = BTreeMap<u8, u32>;

fn rows_of(k: usize, lex: usize) -> Vec<u8> {
    SubsetLabel::of_rank(k).find(|s| s.lex_index() == lex).expect("rank").members()
}

/// K for the normalization of edge coordinates of rank k.
fn key_rows(k: usize) -> Vec<u8> {
    crate::config::key_subset(k).members()
}

fn term_atoms(mono: &[(Var, u32)]) -> Result<Atoms, IdentityError> {
    let mut a = Atoms::new();
    for &(v, e) in mono {
        let Var::Edge(i) = v else { return Err(IdentityError::NonEdgeVariable(v)) };
        let ed = edge(i as usize);
        *a.entry(ed.lo.mask()).or_insert(0) += e;
        *a.entry(ed.hi.mask()).or_insert(0) += e;
    }
    Ok(a)
}

fn lcm_atoms(all: &[Atoms]) -> Atoms {
    let mut l = Atoms::new();
    for a in all {
        for (&m, &e) in a {
            let v = l.entry(m).or_insert(0);
            *v = (*v).max(e);
        }
    }
    l
}

/// Symbolic minors of g with memoization.
struct Minors {
    cache: HashMap<(Vec<u8>, Vec<u8>), SparsePoly>,
}

impl Minors {
    fn get(&mut self, rows: &[u8], cols: &[u8]) -> SparsePoly {
        let key = (rows.to_vec(), cols.to_vec());
        if let Some(p) = self.cache.get(&key) {
            return p.clone();
        }
        let p = if rows.len() == 1 {
            SparsePoly::var(Var::Matrix(rows[0] - 1, cols[0] - 1))
        } else {
            // Expansion along the first column.
            let mut acc = SparsePoly::zero();
            for (r, &row) in rows.iter().enumerate() {
                let rest: Vec<u8> = rows.iter().copied().filter(|&x| x != row).collect();
                let sub = self.get(&rest, &cols[1..]);
                let t = sub.mul(&SparsePoly::var(Var::Matrix(row - 1, cols[0] - 1)));
                acc = if r % 2 == 0 { acc.add(&t) } else { acc.sub(&t) };
            }
            acc
        };
        self.cache.insert(key, p.clone());
        p
    }

    fn base(&mut self, s: SubsetLabel) -> SparsePoly {
        self.get(&rows_of(s.rank(), 0), &s.members())
    }

    fn edge_numerator(&mut self, e: usize) -> SparsePoly {
        let ed = edge(e);
        let k = key_rows(ed.rank());
        let pjk = self.get(&k, &ed.hi.members());
        let pik = self.get(&k, &ed.lo.members());
        pjk.mul(&self.base(ed.lo)).sub(&pik.mul(&self.base(ed.hi)))
    }
}

fn numeric_minor(g: &QMatrix, rows: &[u8], cols: &[u8]) -> Rat {
    let r: Vec<usize> = rows.iter().map(|&x| x as usize - 1).collect();
    let c: Vec<usize> = cols.iter().map(|&x| x as usize - 1).collect();
    g.select(&r, &c).det()
}

/// Edge coordinates of g·p₀ straight from the minor formula, or None when
/// some base minor vanishes.
pub fn edge_values_from_matrix(g: &QMatrix) -> Option<Vec<Rat>> {
    let mut out = Vec::with_capacity(crate::combinatorics::NUM_EDGES);
    for ed in crate::combinatorics::all_edges() {
        let k = key_rows(ed.rank());
        let b = rows_of(ed.rank(), 0);
        let (pib, pjb) = (numeric_minor(g, &b, &ed.lo.members()), numeric_minor(g, &b, &ed.hi.members()));
        if pib.is_zero() || pjb.is_zero() {
            return None;
        }
        let (pik, pjk) = (numeric_minor(g, &k, &ed.lo.members()), numeric_minor(g, &k, &ed.hi.members()));
        out.push((pjk * &pib - pik * &pjb) / (pib * pjb));
    }
    Some(out)
}

/// Checks that a U-level generator vanishes on the whole orbit of p₀.
pub fn symbolic_identity_check(rel: &Relation, mode: IdentityMode) -> Result<IdentityReport, IdentityError> {
    if rel.level != Level::U {
        return Err(IdentityError::NotULevel);
    }
    let terms: Vec<(Vec<(Var, u32)>, Rat)> = rel.poly.terms().map(|(m, c)| (m.clone(), c.clone())).collect();
    let atoms = terms.iter().map(|(m, _)| term_atoms(m)).collect::<Result<Vec<_>, _>>()?;
    let lcm = lcm_atoms(&atoms);
    let common_denominator = atoms.windows(2).all(|w| w[0] == w[1]);
    // Each edge numerator has degree 2·rank; each atom has degree rank.
    let degree_bound = terms
        .iter()
        .zip(&atoms)
        .map(|((m, _), a)| {
            let num: u32 = m
                .iter()
                .map(|&(v, e)| if let Var::Edge(i) = v { 2 * edge(i as usize).rank() as u32 * e } else { 0 })
                .sum();
            let extra: u32 = lcm.iter().map(|(&s, &e)| (e - a.get(&s).copied().unwrap_or(0)) * s.count_ones()).sum();
            num + extra
        })
        .max()
        .unwrap_or(0);

    match mode {
        IdentityMode::Exact => {
            let mut minors = Minors { cache: HashMap::new() };
            let mut total = SparsePoly::zero();
            for ((m, c), a) in terms.iter().zip(&atoms) {
                let mut p = SparsePoly::constant(c.clone());
                for &(v, e) in m {
                    let Var::Edge(i) = v else { unreachable!() };
                    p = p.mul(&minors.edge_numerator(i as usize).pow(e));
                }
                for (&s, &e) in &lcm {
                    let missing = e - a.get(&s).copied().unwrap_or(0);
                    if missing > 0 {
                        let lbl = SubsetLabel::from_mask(s).expect("mask");
                        p = p.mul(&minors.base(lbl).pow(missing));
                    }
                }
                total = total.add(&p);
            }
            Ok(IdentityReport {
                zero: total.is_zero(),
                mode,
                degree_bound,
                common_denominator,
                numerator_terms: Some(total.num_terms()),
                trials: 0,
            })
        }
        IdentityMode::Probabilistic { trials, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut done = 0;
            let mut zero = true;
            while done < trials {
                let rows: Vec<Vec<Rat>> = (0..4)
                    .map(|_| {
                        (0..4).map(|_| Rat::from(rng.gen_range(-PROBABILISTIC_BOUND..=PROBABILISTIC_BOUND))).collect()
                    })
                    .collect();
                let g = QMatrix::from_rows(4, rows);
                let Some(x) = edge_values_from_matrix(&g) else { continue };
                done += 1;
                let v = rel
                    .poly
                    .evaluate(&|v| match v {
                        Var::Edge(i) => Some(x[i as usize].clone()),
                        _ => None,
                    })
                    .expect("edge variables only");
                if !v.is_zero() {
                    zero = false;
                    break;
                }
            }
            Ok(IdentityReport { zero, mode, degree_bound, common_denominator, numerator_terms: None, trials: done })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relations::{u_relations, Family};

    fn first(f: Family) -> &'static Relation {
        u_relations().iter().find(|r| r.family == f).unwrap()
    }

    #[test]
    fn minor_formula_agrees_with_normalize() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        loop {
            let g = crate::config::random_matrix(&mut rng, -9, 9);
            let Ok(c) = crate::config::config_from_matrix(&g) else { continue };
            if !crate::config::is_general_position(&c) {
                continue;
            }
            let ch = crate::config::normalize(&c).unwrap();
            assert_eq!(edge_values_from_matrix(&g).unwrap(), ch.x);
            break;
        }
    }

    #[test]
    fn linear_and_quadric_exact() {
        for f in [Family::Linear, Family::QuadricRotated] {
            let r = symbolic_identity_check(first(f), IdentityMode::Exact).unwrap();
            assert!(r.zero, "{f:?}");
        }
    }

    #[test]
    fn cubic_and_quartic_share_denominators() {
        for r in u_relations().iter().filter(|r| matches!(r.family, Family::Cubic | Family::Quartic)) {
            let rep = symbolic_identity_check(r, IdentityMode::Probabilistic { trials: 2, seed: 1 }).unwrap();
            assert!(rep.common_denominator && rep.zero);
            assert!(rep.degree_bound <= 24);
        }
    }

    #[test]
    fn sign_flipped_quartic_detected() {
        let q = first(Family::Quartic);
        let mut bad = q.clone();
        let ts: Vec<_> = q.poly.terms().map(|(m, c)| (m.clone(), c.clone())).collect();
        bad.poly = SparsePoly::zero();
        bad.poly.add_term(ts[0].0.clone(), ts[0].1.clone());
        bad.poly.add_term(ts[1].0.clone(), -ts[1].1.clone());
        let rep = symbolic_identity_check(&bad, IdentityMode::probabilistic_default()).unwrap();
        assert!(!rep.zero);
        assert!(rep.trials >= 1);
    }

    #[test]
    fn rejects_z_level() {
        let z = &crate::relations::z_relations()[0];
        assert_eq!(symbolic_identity_check(z, IdentityMode::Exact), Err(IdentityError::NotULevel));
    }
}
