//! The core Z as labelings of the graph Γ.
//!
//! A [`CorePoint`] stores the 72 values y_{α,β}, one projective vector per
//! face β, normalized so that the first nonzero entry of every face is 1.
//! With this normalization projective equality is plain equality.

mod certify;
mod solve;
mod special;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::algebra::{Rat, Var};
use crate::combinatorics::{
    all_edges, all_faces, edge, face, face_pairs, pair, related_pairs, triangles_in_faces, EdgeLabel, SymmetryElement,
    NUM_EDGES, NUM_FACES, NUM_PAIRS,
};
use crate::config::NormalizedChart;
use crate::relations::{z_relations, Assignment};

pub use certify::{
    jacobian_certificate, jacobian_corank_in_chart, propagation_bound, PropagationOutcome, SmoothnessCertificate,
    Verdict, CHART_DIM,
};
pub use solve::{Component, SolveError, System};
pub use special::{
    ambient_dimension, certify_catalog, curve_contains, enumerate_special, enumerate_special_with_stats,
    match_against_catalog, verify_catalog, CatalogMatch, CoreCurve, EnumerationStats, PartitionTriple, ShapeRelation,
    SpecialError, SpecialPointRecord, TypeLabel, CURVE_SAMPLES,
};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CoreError {
    #[error("face {0} has all coordinates zero")]
    ZeroFace(String),
    #[error("edge coordinate x_{0} vanishes; the canonical lift needs a nondegenerate tetrahedron")]
    ZeroEdge(EdgeLabel),
    #[error("expected {NUM_PAIRS} core coordinates, got {0}")]
    BadLength(usize),
    #[error("{0} core relations do not vanish")]
    RelationsViolated(usize),
    #[error("unknown key {0}")]
    UnknownKey(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CorePoint {
    y: Vec<Rat>,
}

impl CorePoint {
    /// Normalizes each face at its first nonzero entry.
    pub fn from_values(mut y: Vec<Rat>) -> Result<CorePoint, CoreError> {
        if y.len() != NUM_PAIRS {
            return Err(CoreError::BadLength(y.len()));
        }
        for f in 0..NUM_FACES {
            let ps = face_pairs(f);
            let Some(lead) = ps.iter().map(|&p| y[p].clone()).find(|v| !v.is_zero()) else {
                return Err(CoreError::ZeroFace(face(f).id()));
            };
            for &p in &ps {
                y[p] = &y[p] / &lead;
            }
        }
        Ok(CorePoint { y })
    }

    pub fn values(&self) -> &[Rat] {
        &self.y
    }

    /// Value at a pair index.
    pub fn get(&self, p: usize) -> &Rat {
        &self.y[p]
    }

    pub fn face_values(&self, f: usize) -> Vec<Rat> {
        face_pairs(f).into_iter().map(|p| self.y[p].clone()).collect()
    }

    /// Pair indices with nonzero value.
    pub fn support(&self) -> BTreeSet<usize> {
        (0..NUM_PAIRS).filter(|&p| !self.y[p].is_zero()).collect()
    }

    pub fn zero_pattern(&self) -> ZeroPattern {
        ZeroPattern::of_values(&self.y)
    }

    /// Image under a symmetry: y'_{g(α),g(β)} = ±y_{α,β} with the sign of
    /// the edge reorientation.
    pub fn permuted(&self, g: &SymmetryElement) -> CorePoint {
        let mut y = vec![Rat::zero(); NUM_PAIRS];
        for p in 0..NUM_PAIRS {
            let (q, s) = g.pair_index(p);
            y[q] = if s < 0 { -self.y[p].clone() } else { self.y[p].clone() };
        }
        CorePoint::from_values(y).expect("symmetries permute faces")
    }

    pub fn assignment(&self) -> Assignment {
        (0..NUM_PAIRS).map(|p| (Var::Core(p as u8), self.y[p].clone())).collect()
    }

    /// Indices (into `z_relations()`) of relations that do not vanish.
    pub fn violated_relations(&self) -> Vec<usize> {
        let val = |v: Var| match v {
            Var::Core(p) => Some(self.y[p as usize].clone()),
            _ => None,
        };
        z_relations()
            .iter()
            .enumerate()
            .filter(|(_, r)| !r.poly.evaluate(&val).expect("core variables").is_zero())
            .map(|(i, _)| i)
            .collect()
    }

    pub fn satisfies_relations(&self) -> bool {
        self.violated_relations().is_empty()
    }

    /// Per face, the canonically least pair with a nonzero value.
    pub fn chart(&self) -> Vec<usize> {
        (0..NUM_FACES)
            .map(|f| face_pairs(f).into_iter().find(|&p| !self.y[p].is_zero()).expect("normalized faces are nonzero"))
            .collect()
    }

    /// Related triangle pairs whose value triples are not proportional or
    /// whose zero patterns are not among the allowed cases.
    pub fn related_pattern_violations(&self) -> Vec<String> {
        let allowed = allowed_related_patterns();
        let mut bad = Vec::new();
        for t in triangles_in_faces() {
            let v: Vec<Rat> = t.pairs().iter().map(|&p| self.y[p].clone()).collect();
            for rp in related_pairs(&t) {
                let o = rp.other.pairs();
                let w: Vec<Rat> = (0..3)
                    .map(|i| {
                        let (q, s) = rp.map[i];
                        if s < 0 {
                            -self.y[o[q]].clone()
                        } else {
                            self.y[o[q]].clone()
                        }
                    })
                    .collect();
                let prop = (0..3).all(|i| (0..3).all(|j| (&v[i] * &w[j] - &v[j] * &w[i]).is_zero()));
                let case = RelatedPatternCase::classify(TrianglePattern::of(&v), TrianglePattern::of(&w));
                if !prop || !case.is_some_and(|c| allowed.contains(&c)) {
                    bad.push(format!(
                        "{} in {} vs {} in {}",
                        face(t.tri.face).id(),
                        face(t.host).id(),
                        face(rp.other.tri.face).id(),
                        face(rp.other.host).id()
                    ));
                }
            }
        }
        bad
    }
}

fn edge_id(e: EdgeLabel) -> String {
    format!("{}-{}", e.lo, e.hi)
}

impl Serialize for CorePoint {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut m: BTreeMap<String, BTreeMap<String, &Rat>> = BTreeMap::new();
        for p in 0..NUM_PAIRS {
            let (e, f) = pair(p);
            m.entry(face(f).id()).or_default().insert(edge_id(edge(e)), &self.y[p]);
        }
        #[derive(Serialize)]
        struct Out<'a> {
            y: BTreeMap<String, BTreeMap<String, &'a Rat>>,
        }
        Out { y: m }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for CorePoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct In {
            y: BTreeMap<String, BTreeMap<String, Rat>>,
        }
        let raw = In::deserialize(d)?;
        let mut y = vec![None; NUM_PAIRS];
        for (fid, vals) in raw.y {
            let f = all_faces()
                .iter()
                .position(|f| f.id() == fid)
                .ok_or_else(|| serde::de::Error::custom(CoreError::UnknownKey(fid.clone())))?;
            for (eid, v) in vals {
                let e = all_edges()
                    .iter()
                    .position(|&e| edge_id(e) == eid)
                    .ok_or_else(|| serde::de::Error::custom(CoreError::UnknownKey(eid.clone())))?;
                let p = crate::combinatorics::pair_index(e, f)
                    .ok_or_else(|| serde::de::Error::custom(CoreError::UnknownKey(format!("{fid}/{eid}"))))?;
                y[p] = Some(v);
            }
        }
        let y: Option<Vec<Rat>> = y.into_iter().collect();
        let y = y.ok_or_else(|| serde::de::Error::custom("missing core coordinates"))?;
        CorePoint::from_values(y).map_err(serde::de::Error::custom)
    }
}

/// Canonical lift y_{α,β} = x_α of a nondegenerate chart.
pub fn core_from_chart(c: &NormalizedChart) -> Result<CorePoint, CoreError> {
    if let Some(e) = (0..NUM_EDGES).find(|&e| c.x[e].is_zero()) {
        return Err(CoreError::ZeroEdge(edge(e)));
    }
    CorePoint::from_values((0..NUM_PAIRS).map(|p| c.x[pair(p).0].clone()).collect())
}

/// Zero pattern of an ordered value triple (a, b, c) with a − b + c = 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TrianglePattern {
    NoneZero,
    OneZero(u8),
    /// Only the given position is nonzero; impossible under a − b + c = 0.
    TwoZero(u8),
    AllZero,
}

impl TrianglePattern {
    pub fn of(v: &[Rat]) -> TrianglePattern {
        let zeros: Vec<u8> = (0..3).filter(|&i| v[i as usize].is_zero()).collect();
        match zeros.len() {
            0 => TrianglePattern::NoneZero,
            1 => TrianglePattern::OneZero(zeros[0]),
            2 => TrianglePattern::TwoZero(3 - zeros[0] - zeros[1]),
            _ => TrianglePattern::AllZero,
        }
    }

    fn zero_set(self) -> u8 {
        match self {
            TrianglePattern::NoneZero => 0,
            TrianglePattern::OneZero(i) => 1 << i,
            TrianglePattern::TwoZero(i) => 0b111 & !(1 << i),
            TrianglePattern::AllZero => 0b111,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ZeroPattern {
    /// One entry per triangle-in-face, in the order of `triangles_in_faces`.
    pub triangles: Vec<TrianglePattern>,
    /// Per maximal-face pair (the first 24 pair indices): whether y = 0.
    pub maximal: Vec<bool>,
}

impl ZeroPattern {
    pub fn of_values(y: &[Rat]) -> ZeroPattern {
        let triangles =
            triangles_in_faces().iter().map(|t| TrianglePattern::of(&t.pairs().map(|p| y[p].clone()))).collect();
        let maximal = (0..NUM_PAIRS).filter(|&p| pair(p).1 < 3).map(|p| y[p].is_zero()).collect();
        ZeroPattern { triangles, maximal }
    }

    /// No triangle has exactly two zeros.
    pub fn is_closed(&self) -> bool {
        !self.triangles.iter().any(|t| matches!(t, TrianglePattern::TwoZero(_)))
    }
}

/// The possible zero-pattern combinations of a related triangle pair, with
/// positions aligned through the pair's edge correspondence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RelatedPatternCase {
    NoneNone,
    /// One zero on each side, at corresponding positions.
    OneOneMatching,
    AllAll,
    AllNone,
    AllOne,
}

impl RelatedPatternCase {
    /// Unordered classification; None for combinations outside the five.
    pub fn classify(a: TrianglePattern, b: TrianglePattern) -> Option<RelatedPatternCase> {
        use TrianglePattern::*;
        match (a, b) {
            (NoneZero, NoneZero) => Some(RelatedPatternCase::NoneNone),
            (OneZero(i), OneZero(j)) if i == j => Some(RelatedPatternCase::OneOneMatching),
            (AllZero, AllZero) => Some(RelatedPatternCase::AllAll),
            (AllZero, NoneZero) | (NoneZero, AllZero) => Some(RelatedPatternCase::AllNone),
            (AllZero, OneZero(_)) | (OneZero(_), AllZero) => Some(RelatedPatternCase::AllOne),
            _ => None,
        }
    }
}

/// All integer triples in [−2, 2]³ with a − b + c = 0, grouped by zero set.
fn witnesses() -> BTreeMap<u8, Vec<[i64; 3]>> {
    let mut m: BTreeMap<u8, Vec<[i64; 3]>> = BTreeMap::new();
    for a in -2..=2i64 {
        for c in -2..=2i64 {
            let v = [a, a + c, c];
            if v[1].abs() > 2 {
                continue;
            }
            let zs = (0..3).filter(|&i| v[i] == 0).fold(0u8, |acc, i| acc | 1 << i);
            m.entry(zs).or_default().push(v);
        }
    }
    m
}

/// Whether two triangles with zero sets `za`, `zb` (bitmasks over the three
/// positions) can carry proportional triples satisfying a − b + c = 0.
pub fn related_pattern_feasible(za: u8, zb: u8) -> bool {
    let w = witnesses();
    let (Some(va), Some(vb)) = (w.get(&za), w.get(&zb)) else { return false };
    va.iter().any(|a| vb.iter().any(|b| (0..3).all(|i| (0..3).all(|j| a[i] * b[j] == a[j] * b[i]))))
}

/// Derives the allowed combinations by exhausting all pairs of zero sets.
pub fn allowed_related_patterns() -> Vec<RelatedPatternCase> {
    let mut out = BTreeSet::new();
    let pats: Vec<TrianglePattern> = (0u8..8)
        .map(|z| {
            let bits: Vec<Rat> = (0..3).map(|i| if z >> i & 1 == 1 { Rat::zero() } else { Rat::one() }).collect();
            TrianglePattern::of(&bits)
        })
        .collect();
    for &a in &pats {
        for &b in &pats {
            if related_pattern_feasible(a.zero_set(), b.zero_set()) {
                out.insert(RelatedPatternCase::classify(a, b).expect("feasible combinations are classified"));
            }
        }
    }
    out.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::qi;
    use crate::config::{normalize, sample_charts, sample_config};

    #[test]
    fn lift_satisfies_relations() {
        for ch in sample_charts(31, 5) {
            let z = core_from_chart(&ch).unwrap();
            assert!(z.satisfies_relations());
            assert!(z.zero_pattern().triangles.iter().all(|t| *t == TrianglePattern::NoneZero));
            assert!(z.related_pattern_violations().is_empty());
        }
    }

    #[test]
    fn rank_rescaling_leaves_lift_unchanged() {
        let ch = sample_charts(32, 1).remove(0);
        let mut scaled = ch.clone();
        let c = [qi(3), qi(-2), qi(5)];
        for e in 0..NUM_EDGES {
            scaled.x[e] = &scaled.x[e] * &c[edge(e).rank() - 1];
        }
        assert_eq!(core_from_chart(&ch).unwrap(), core_from_chart(&scaled).unwrap());
    }

    #[test]
    fn zero_edge_rejected() {
        let mut ch = normalize(&sample_config(33, 1).unwrap().configs[0]).unwrap();
        ch.x[5] = Rat::zero();
        assert!(matches!(core_from_chart(&ch), Err(CoreError::ZeroEdge(_))));
    }

    #[test]
    fn five_related_patterns() {
        let a = allowed_related_patterns();
        assert_eq!(a.len(), 5);
        // Two zeros in a triangle force the third.
        assert!(!related_pattern_feasible(0b011, 0b011));
        assert!(!related_pattern_feasible(0b011, 0b111));
        // One zero each, but at different positions.
        assert!(!related_pattern_feasible(0b001, 0b010));
        assert!(related_pattern_feasible(0b010, 0b010));
        assert!(related_pattern_feasible(0b111, 0b000));
    }

    #[test]
    fn symmetry_round_trip_and_json() {
        let z = core_from_chart(&sample_charts(34, 1)[0]).unwrap();
        for g in SymmetryElement::all() {
            assert_eq!(z.permuted(&g).permuted(&g.inverse()), z);
        }
        let s = serde_json::to_string(&z).unwrap();
        assert!(s.contains("\"D2\""));
        let back: CorePoint = serde_json::from_str(&s).unwrap();
        assert_eq!(back, z);
    }

    #[test]
    fn zero_face_rejected() {
        let y = vec![Rat::zero(); NUM_PAIRS];
        assert_eq!(CorePoint::from_values(y), Err(CoreError::ZeroFace("D1".into())));
    }
}
