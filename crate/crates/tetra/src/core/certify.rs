//! Smoothness certificates for core points.
//!
//! In the chart where one nonzero coordinate per face is set to 1 the core
//! lives in a 53-dimensional affine space, and Z is smooth at z of
//! dimension 3 iff the Jacobian of the relations has corank 3 there.
//!
//! The propagation oracle bounds the same corank from the combinatorial
//! side: it only uses linear relations and quadrics whose differential has
//! at most two nonzero entries (forcing a differential to vanish, or
//! identifying two differentials up to a factor). Along the one-parameter
//! families these rules stop at 4; adding the remaining quadric and the
//! quartic differentials (the shape relations of the family) closes them.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{CoreError, CorePoint};
use crate::algebra::{QMatrix, Rat, Var};
use crate::combinatorics::{edge, face, pair, NUM_FACES, NUM_PAIRS};
use crate::relations::{z_relations, Family};

pub const CHART_DIM: usize = NUM_PAIRS - NUM_FACES;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Smooth,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropagationOutcome {
    /// Corank of linear and at-most-two-term quadric differentials.
    pub rules_only: usize,
    /// Corank after adding all quadric and quartic differentials.
    pub with_shape: usize,
    /// The bound on dim Ω¹ when the rules close to 3.
    pub bound: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SmoothnessCertificate {
    pub point: CorePoint,
    /// Face id → edge id of the coordinate set to 1.
    pub chart: BTreeMap<String, String>,
    pub jacobian_rank: usize,
    pub corank: usize,
    pub propagation: PropagationOutcome,
    pub verdict: Verdict,
}

/// Rows of the Jacobian (sparse, by chart column) with their families.
fn jacobian_rows(z: &CorePoint, chart: &[usize]) -> Vec<(Family, BTreeMap<usize, Rat>)> {
    // Rescale so the chart coordinates are 1.
    let mut y = z.values().to_vec();
    for (f, &c) in chart.iter().enumerate() {
        let s = y[c].clone();
        for p in crate::combinatorics::face_pairs(f) {
            y[p] = &y[p] / &s;
        }
    }
    let mut col = vec![usize::MAX; NUM_PAIRS];
    let mut n = 0;
    for (p, c) in col.iter_mut().enumerate() {
        if !chart.contains(&p) {
            *c = n;
            n += 1;
        }
    }
    let val = |v: Var| match v {
        Var::Core(p) => Some(y[p as usize].clone()),
        _ => None,
    };
    z_relations()
        .iter()
        .map(|r| {
            let mut row = BTreeMap::new();
            for (v, c) in r.poly.gradient_at(&val).expect("core variables") {
                if let Var::Core(p) = v {
                    if col[p as usize] != usize::MAX && !c.is_zero() {
                        row.insert(col[p as usize], c);
                    }
                }
            }
            (r.family, row)
        })
        .collect()
}

/// Jacobian (rank, corank) in the chart given by one pair per face.
pub fn jacobian_corank_in_chart(z: &CorePoint, chart: &[usize]) -> (usize, usize) {
    let rows: Vec<Vec<Rat>> = jacobian_rows(z, chart)
        .into_iter()
        .map(|(_, r)| {
            let mut d = vec![Rat::zero(); CHART_DIM];
            for (c, v) in r {
                d[c] = v;
            }
            d
        })
        .collect();
    let rank = QMatrix::from_rows(CHART_DIM, rows).rank();
    (rank, CHART_DIM - rank)
}

pub fn jacobian_certificate(z: &CorePoint) -> Result<SmoothnessCertificate, CoreError> {
    let bad = z.violated_relations();
    if !bad.is_empty() {
        return Err(CoreError::RelationsViolated(bad.len()));
    }
    let chart = z.chart();
    let (rank, corank) = jacobian_corank_in_chart(z, &chart);
    let names = chart
        .iter()
        .enumerate()
        .map(|(f, &p)| {
            let e = edge(pair(p).0);
            (face(f).id(), format!("{}-{}", e.lo, e.hi))
        })
        .collect();
    Ok(SmoothnessCertificate {
        point: z.clone(),
        chart: names,
        jacobian_rank: rank,
        corank,
        propagation: propagation_bound(z),
        verdict: if corank == 3 { Verdict::Smooth } else { Verdict::Inconclusive },
    })
}

/// Incremental row reduction on sparse rows: each pivot row is stored with
/// leading entry 1, and new rows are reduced against the pivots in order of
/// their leading column.
#[derive(Default)]
struct SparseSpan {
    pivots: BTreeMap<usize, BTreeMap<usize, Rat>>,
}

impl SparseSpan {
    fn insert(&mut self, mut row: BTreeMap<usize, Rat>) {
        while let Some((&lead, c)) = row.iter().next() {
            let c = c.clone();
            match self.pivots.get(&lead) {
                Some(p) => {
                    for (&k, v) in p {
                        let nv = row.get(&k).cloned().unwrap_or_else(Rat::zero) - &c * v;
                        if nv.is_zero() {
                            row.remove(&k);
                        } else {
                            row.insert(k, nv);
                        }
                    }
                }
                None => {
                    let inv = c.recip();
                    let norm = row.into_iter().map(|(k, v)| (k, v * &inv)).collect();
                    self.pivots.insert(lead, norm);
                    return;
                }
            }
        }
    }

    fn rank(&self) -> usize {
        self.pivots.len()
    }
}

/// Upper bound for dim Ω¹ at z from the differential rules.
pub fn propagation_bound(z: &CorePoint) -> PropagationOutcome {
    let rows = jacobian_rows(z, &z.chart());
    let mut span = SparseSpan::default();
    let mut rest = Vec::new();
    for (fam, r) in rows {
        let rule = match fam {
            Family::Linear => true,
            Family::QuadricShared | Family::QuadricRotated => r.len() <= 2,
            _ => false,
        };
        if rule {
            span.insert(r);
        } else if matches!(fam, Family::QuadricShared | Family::QuadricRotated | Family::Quartic) {
            rest.push(r);
        }
    }
    let rules_only = CHART_DIM - span.rank();
    for r in rest {
        span.insert(r);
    }
    let with_shape = CHART_DIM - span.rank();
    PropagationOutcome { rules_only, with_shape, bound: (with_shape <= 3).then_some(with_shape) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::sample_charts;
    use crate::core::core_from_chart;

    #[test]
    fn generic_lift_has_corank_three() {
        for ch in sample_charts(41, 3) {
            let z = core_from_chart(&ch).unwrap();
            let c = jacobian_certificate(&z).unwrap();
            assert_eq!(c.corank, 3);
            assert_eq!(c.verdict, Verdict::Smooth);
            // A different chart gives the same rank.
            let alt: Vec<usize> =
                (0..NUM_FACES).map(|f| *crate::combinatorics::face_pairs(f).last().unwrap()).collect();
            assert_eq!(jacobian_corank_in_chart(&z, &alt).1, 3);
        }
    }

    #[test]
    fn sparse_span_matches_dense_rank() {
        let z = core_from_chart(&sample_charts(42, 1)[0]).unwrap();
        let rows = jacobian_rows(&z, &z.chart());
        let mut span = SparseSpan::default();
        for (_, r) in rows {
            span.insert(r);
        }
        assert_eq!(span.rank(), jacobian_corank_in_chart(&z, &z.chart()).0);
    }

    #[test]
    fn violated_point_has_no_certificate() {
        let z = core_from_chart(&sample_charts(43, 1)[0]).unwrap();
        let mut y = z.values().to_vec();
        y[30] = &y[30] + &Rat::one();
        let bad = CorePoint::from_values(y).unwrap();
        assert!(matches!(jacobian_certificate(&bad), Err(CoreError::RelationsViolated(_))));
    }
}
