//! Enumeration and classification of the special locus: core points of
//! minimally split configurations.
//!
//! A minimally split point splits the lines, planes and 3-spaces into two
//! blocks each. On a maximal face Δ_k the core values then form a potential
//! difference that vanishes exactly inside blocks. Triangles copy their
//! values from the maximal face when those are not all zero; otherwise they
//! are unknown, written in one of the two charts (1, 1 + w, w) or (0, 1, 1).
//! The core relations then become a small system in the unknowns.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::certify::{jacobian_certificate, SmoothnessCertificate};
use super::solve::{solve, Component, SolveError, System};
use super::{CorePoint, ZeroPattern};
use crate::algebra::{projective_limit, QMatrix, Rat, SparsePoly, UniPoly, UniRat, Var};
use crate::combinatorics::{
    face, face_pairs, maximal_face, ordered_triangle, pair, pair_index, related_pairs, EdgeLabel, SubsetLabel,
    SymmetryElement, TriangleInFace, NUM_EDGES, NUM_FACES, NUM_PAIRS,
};
use crate::config::{config_from_sections, n_k, SplitType};
use crate::relations::{z_relations, Family};

/// Parameter values at which curve representatives are taken, in order of
/// preference; values where a face degenerates are skipped.
pub const CURVE_SAMPLES: [(i64, i64); 10] =
    [(-1, 1), (1, 3), (2, 1), (3, 1), (-2, 1), (1, 2), (5, 1), (-1, 3), (7, 1), (-3, 2)];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TypeLabel {
    #[serde(rename = "DDE")]
    Dde,
    #[serde(rename = "CDE")]
    Cde,
    #[serde(rename = "CC*E")]
    CcStarE,
    #[serde(rename = "CC*_nopD")]
    CcStarNopD,
    #[serde(rename = "CC*_opD")]
    CcStarOpD,
}

impl TypeLabel {
    pub const ALL: [TypeLabel; 5] =
        [TypeLabel::Dde, TypeLabel::Cde, TypeLabel::CcStarE, TypeLabel::CcStarNopD, TypeLabel::CcStarOpD];

    pub fn name(self) -> &'static str {
        match self {
            TypeLabel::Dde => "DDE",
            TypeLabel::Cde => "CDE",
            TypeLabel::CcStarE => "CC*E",
            TypeLabel::CcStarNopD => "CC*_nopD",
            TypeLabel::CcStarOpD => "CC*_opD",
        }
    }

    /// Expected class size (points for dimension 0, curves for dimension 1).
    pub fn expected_size(self) -> usize {
        match self {
            TypeLabel::Dde => 6,
            TypeLabel::Cde | TypeLabel::CcStarE => 24,
            TypeLabel::CcStarNopD => 12,
            TypeLabel::CcStarOpD => 4,
        }
    }
}

impl fmt::Display for TypeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TypeLabel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.replace("star", "*");
        TypeLabel::ALL
            .into_iter()
            .find(|t| t.name().eq_ignore_ascii_case(&norm))
            .ok_or_else(|| format!("unknown type {s:?}; expected one of DDE, CDE, CC*E, CC*_nopD, CC*_opD"))
    }
}

/// Two-block partitions of the lines, planes and 3-spaces. `a[k−1]` is the
/// block not containing the last subset of rank k, as a bitmask over
/// `SubsetLabel::of_rank(k)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PartitionTriple {
    pub a: [u16; 3],
}

impl PartitionTriple {
    pub fn all() -> Vec<PartitionTriple> {
        let mut out = Vec::new();
        for a1 in 1..(1u16 << 3) {
            for a2 in 1..(1u16 << 5) {
                for a3 in 1..(1u16 << 3) {
                    out.push(PartitionTriple { a: [a1, a2, a3] });
                }
            }
        }
        out
    }

    pub fn in_a(&self, s: SubsetLabel) -> bool {
        let pos = SubsetLabel::of_rank(s.rank()).position(|t| t == s).unwrap();
        self.a[s.rank() - 1] >> pos & 1 == 1
    }

    pub fn blocks(&self, k: usize) -> [Vec<SubsetLabel>; 2] {
        let (a, b): (Vec<_>, Vec<_>) = SubsetLabel::of_rank(k).partition(|&s| self.in_a(s));
        [a, b]
    }

    /// Whether an edge of rank k joins the two blocks.
    pub fn crosses(&self, e: EdgeLabel) -> bool {
        self.in_a(e.lo) != self.in_a(e.hi)
    }
}

impl fmt::Display for PartitionTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = (1..=3)
            .map(|k| {
                let [a, b] = self.blocks(k);
                let j = |v: &[SubsetLabel]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(" ");
                format!("{{{}}}|{{{}}}", j(&a), j(&b))
            })
            .collect();
        write!(f, "{}", parts.join(" / "))
    }
}

/// A one-parameter family: values (per face, up to scale) polynomial in t.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoreCurve {
    pub values: Vec<UniPoly>,
    /// Polynomials that must not vanish at valid parameters.
    pub nonzero: Vec<UniPoly>,
}

impl CoreCurve {
    /// The point at parameter t, if t is admissible.
    pub fn eval(&self, t: &Rat) -> Option<CorePoint> {
        if self.nonzero.iter().any(|p| p.eval(t).is_zero()) {
            return None;
        }
        CorePoint::from_values(self.values.iter().map(|p| p.eval(t)).collect()).ok()
    }

    fn face_funcs(&self, f: usize) -> Vec<UniRat> {
        face_pairs(f).into_iter().map(|p| UniRat::from_poly(self.values[p].clone())).collect()
    }

    /// Limit point as t → t0 (None = ∞).
    pub fn limit(&self, t0: Option<&Rat>) -> Option<CorePoint> {
        let mut y = vec![Rat::zero(); NUM_PAIRS];
        for f in 0..NUM_FACES {
            let lim = projective_limit(&self.face_funcs(f), t0)?;
            for (p, v) in face_pairs(f).into_iter().zip(lim) {
                y[p] = v;
            }
        }
        CorePoint::from_values(y).ok()
    }

    /// Pairs whose value is not identically zero along the curve.
    pub fn support(&self) -> BTreeSet<usize> {
        (0..NUM_PAIRS).filter(|&p| !self.values[p].is_zero()).collect()
    }

    /// The first three sample parameters at which the point is admissible
    /// and has the generic support.
    pub fn samples(&self) -> Vec<Rat> {
        let generic = self.support();
        CURVE_SAMPLES
            .iter()
            .map(|&(n, d)| Rat::new(n, d))
            .filter(|t| self.eval(t).is_some_and(|z| z.support() == generic))
            .take(3)
            .collect()
    }
}

/// Parameter (None = ∞) at which the closure of the curve passes through z.
pub fn curve_contains(curve: &CoreCurve, z: &CorePoint) -> Option<Option<Rat>> {
    let mut candidates: Vec<Option<Rat>> = vec![None];
    'faces: for f in 0..NUM_FACES {
        let ps = face_pairs(f);
        for i in 0..ps.len() {
            for j in i + 1..ps.len() {
                let m = curve.values[ps[i]].scale(z.get(ps[j])).sub(&curve.values[ps[j]].scale(z.get(ps[i])));
                if !m.is_zero() {
                    candidates.extend(m.rational_roots().into_iter().map(Some));
                    break 'faces;
                }
            }
        }
    }
    candidates.into_iter().find(|t0| curve.limit(t0.as_ref()).as_ref() == Some(z))
}

/// The linear relation α·u + β·v + γ = 0 between the shape parameters
/// u = (c − a)/(2b) of the two clusters of moving triangles of a family.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShapeRelation {
    /// Triangle faces carrying u and v.
    pub u_triangle: String,
    pub v_triangle: String,
    /// (α, β, γ), scaled so that the first nonzero entry is 1.
    pub coeffs: [Rat; 3],
}

impl ShapeRelation {
    pub fn is_diagonal(&self) -> bool {
        self.coeffs == [Rat::one(), -Rat::one(), Rat::zero()]
    }
}

impl fmt::Display for ShapeRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c] = &self.coeffs;
        write!(f, "({a})·u + ({b})·v + ({c}) = 0")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpecialPointRecord {
    #[serde(rename = "type")]
    pub type_label: TypeLabel,
    pub dimension: usize,
    /// Size of the orbit of the zero pattern under S₄ × duality.
    pub orbit_size: usize,
    /// Sizes of the S₄-orbits the symmetry class splits into.
    pub s4_orbits: Vec<usize>,
    pub triple: PartitionTriple,
    pub split_type: String,
    /// Chart choice (bit i: i-th unknown triangle in chart (1, 1 + w, w)).
    pub chart_case: u64,
    pub pattern: ZeroPattern,
    pub representatives: Vec<CorePoint>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub curve: Option<CoreCurve>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sample_params: Vec<Rat>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shape_relation: Option<ShapeRelation>,
    #[serde(default)]
    pub certificates: Vec<SmoothnessCertificate>,
}

impl SpecialPointRecord {
    pub fn support(&self) -> BTreeSet<usize> {
        self.representatives[0].support()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumerationStats {
    pub triples: usize,
    pub cases: usize,
    pub components: usize,
    /// Solutions whose reconstructed configuration is not minimally split.
    pub not_minimally_split: usize,
    /// Solution families of dimension ≥ 2 (none expected).
    pub higher_dimensional: usize,
    /// Isolated solutions lying in the closure of a curve of the same triple.
    pub closure_points: usize,
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum SpecialError {
    #[error("solving pattern {triple}: {err}")]
    Solve { triple: String, err: String },
    #[error("unexpected symmetry class: dimension {dimension}, orbit size {size}")]
    UnexpectedOrbit { dimension: usize, size: usize },
    #[error("symmetry class of {size} patterns (dimension {dimension}, from {triple}) has only {found} members in the enumeration")]
    OrbitNotClosed { size: usize, found: usize, dimension: usize, triple: String },
}

fn param(i: usize) -> Var {
    Var::Param(i as u16)
}

/// Core values on the maximal faces, nonvanishing conditions on crossing
/// edges, copied triangles, and the list of undetermined triangle faces.
fn base_values(t: &PartitionTriple) -> (Vec<SparsePoly>, Vec<SparsePoly>, Vec<usize>) {
    let mut y = vec![SparsePoly::zero(); NUM_PAIRS];
    let mut nonzero = Vec::new();
    for k in 1..=3 {
        let f = maximal_face(k);
        let verts: Vec<SubsetLabel> = SubsetLabel::of_rank(k).collect();
        // Components of the graph of within-block edges.
        let mut comp: Vec<usize> = (0..verts.len()).collect();
        let find = |c: &Vec<usize>, mut i: usize| {
            while c[i] != i {
                i = c[i];
            }
            i
        };
        for &e in face(f).edges() {
            let ed = crate::combinatorics::edge(e);
            if !t.crosses(ed) {
                let i = verts.iter().position(|&s| s == ed.lo).unwrap();
                let j = verts.iter().position(|&s| s == ed.hi).unwrap();
                let (ri, rj) = (find(&comp, i), find(&comp, j));
                comp[ri.max(rj)] = ri.min(rj);
            }
        }
        let roots: Vec<usize> = (0..verts.len()).map(|i| find(&comp, i)).collect();
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (i, r) in roots.iter().enumerate() {
            groups.entry(*r).or_default().push(i);
        }
        let mut pot = vec![SparsePoly::zero(); verts.len()];
        if groups.len() == 2 {
            for (i, s) in verts.iter().enumerate() {
                if t.in_a(*s) {
                    pot[i] = SparsePoly::constant(Rat::one());
                }
            }
        } else {
            // Antipodal blocks: the largest component at 0, the next at 1,
            // the rest free.
            let mut gs: Vec<Vec<usize>> = groups.into_values().collect();
            gs.sort_by_key(|g| std::cmp::Reverse(g.len()));
            for (n, g) in gs.iter().enumerate().skip(1) {
                let v =
                    if n == 1 { SparsePoly::constant(Rat::one()) } else { SparsePoly::var(param(100 + 10 * k + n)) };
                for &i in g {
                    pot[i] = v.clone();
                }
            }
        }
        for &e in face(f).edges() {
            let ed = crate::combinatorics::edge(e);
            let i = verts.iter().position(|&s| s == ed.lo).unwrap();
            let j = verts.iter().position(|&s| s == ed.hi).unwrap();
            let v = pot[j].sub(&pot[i]);
            if t.crosses(ed) {
                nonzero.push(v.clone());
            }
            y[pair_index(e, f).unwrap()] = v;
        }
    }
    let mut free = Vec::new();
    for f in 3..NUM_FACES {
        let tri = ordered_triangle(f).unwrap();
        let m = maximal_face(face(f).rank());
        let vals: Vec<SparsePoly> = tri.edges.iter().map(|&e| y[pair_index(e, m).unwrap()].clone()).collect();
        if vals.iter().all(SparsePoly::is_zero) {
            free.push(f);
        } else {
            for (&e, v) in tri.edges.iter().zip(vals) {
                y[pair_index(e, f).unwrap()] = v;
            }
        }
    }
    (y, nonzero, free)
}

fn case_system(t: &PartitionTriple, case: u64, families: &[Family]) -> System {
    let (mut y, nonzero, free) = base_values(t);
    for (i, &f) in free.iter().enumerate() {
        let [a1, a2, a3] = ordered_triangle(f).unwrap().edges;
        let (a, c) = if case >> i & 1 == 1 {
            (SparsePoly::constant(Rat::one()), SparsePoly::var(param(f)))
        } else {
            (SparsePoly::zero(), SparsePoly::constant(Rat::one()))
        };
        y[pair_index(a1, f).unwrap()] = a.clone();
        y[pair_index(a2, f).unwrap()] = a.add(&c);
        y[pair_index(a3, f).unwrap()] = c;
    }
    let val = |v: Var| match v {
        Var::Core(p) => Some(y[p as usize].clone()),
        _ => None,
    };
    let eqs = z_relations()
        .iter()
        .filter(|r| families.contains(&r.family))
        .map(|r| r.poly.eval_in(&val).expect("core variables"))
        .collect();
    System { eqs, nonzero, values: y }
}

const ALL_FAMILIES: [Family; 5] =
    [Family::Linear, Family::QuadricShared, Family::QuadricRotated, Family::Cubic, Family::Quartic];

fn const_of(p: &SparsePoly) -> Rat {
    p.as_constant().unwrap_or_else(Rat::zero)
}

fn to_uni(p: &SparsePoly, v: Var) -> UniPoly {
    UniPoly::new(p.coeffs_in(v).iter().map(const_of).collect())
}

/// Line/plane/3-space blocks of the configuration rebuilt from the
/// maximal-face values (flag coordinates 0, x_α = y_{α,Δ_k}).
fn reconstructed_split(z: &CorePoint) -> (Option<[usize; 3]>, SplitType) {
    let x: Vec<Rat> = (0..NUM_EDGES)
        .map(|e| z.get(pair_index(e, maximal_face(crate::combinatorics::edge(e).rank())).unwrap()).clone())
        .collect();
    let c = config_from_sections(&[Rat::zero(), Rat::zero(), Rat::zero(), Rat::zero(), Rat::zero(), Rat::zero()], &x);
    let n = [n_k(&c, 1), n_k(&c, 2), n_k(&c, 3)];
    (Some(n), SplitType::of(&c))
}

fn is_minimal(z: &CorePoint) -> bool {
    reconstructed_split(z).0 == Some([2, 2, 2])
}

struct Found {
    triple: PartitionTriple,
    case: u64,
    point: Option<CorePoint>,
    curve: Option<CoreCurve>,
}

fn process_triple(t: PartitionTriple) -> Result<(Vec<Found>, EnumerationStats), SpecialError> {
    let mut st = EnumerationStats { triples: 1, ..Default::default() };
    let (_, _, free) = base_values(&t);
    let mut points: Vec<(u64, CorePoint)> = Vec::new();
    let mut curves: Vec<(u64, CoreCurve)> = Vec::new();
    for case in 0..(1u64 << free.len()) {
        st.cases += 1;
        let comps = solve(case_system(&t, case, &ALL_FAMILIES))
            .map_err(|e| SpecialError::Solve { triple: t.to_string(), err: e.to_string() })?;
        for c in comps {
            st.components += 1;
            match classify_component(&c) {
                Classified::Point(z) => {
                    if is_minimal(&z) {
                        if !points.iter().any(|(_, p)| *p == z) {
                            points.push((case, z));
                        }
                    } else {
                        st.not_minimally_split += 1;
                    }
                }
                Classified::Curve(cv) => {
                    let samples = cv.samples();
                    if samples.len() == 3 && samples.iter().all(|s| is_minimal(&cv.eval(s).unwrap())) {
                        let dup = curves
                            .iter()
                            .any(|(_, o)| samples.iter().all(|s| curve_contains(o, &cv.eval(s).unwrap()).is_some()));
                        if !dup {
                            curves.push((case, cv));
                        }
                    } else {
                        st.not_minimally_split += 1;
                    }
                }
                Classified::Higher => st.higher_dimensional += 1,
            }
        }
    }
    let mut out = Vec::new();
    for (case, z) in points {
        if curves.iter().any(|(_, cv)| curve_contains(cv, &z).is_some()) {
            st.closure_points += 1;
        } else {
            out.push(Found { triple: t, case, point: Some(z), curve: None });
        }
    }
    out.extend(curves.into_iter().map(|(case, cv)| Found { triple: t, case, point: None, curve: Some(cv) }));
    Ok((out, st))
}

enum Classified {
    Point(CorePoint),
    Curve(CoreCurve),
    Higher,
}

fn classify_component(c: &Component) -> Classified {
    let ps = c.params();
    match ps.len() {
        0 => Classified::Point(CorePoint::from_values(c.values.iter().map(const_of).collect()).expect("faces nonzero")),
        1 => {
            let v = *ps.iter().next().unwrap();
            let nonzero =
                c.nonzero.iter().filter(|p| p.variables().iter().all(|&w| w == v)).map(|p| to_uni(p, v)).collect();
            Classified::Curve(CoreCurve { values: c.values.iter().map(|p| to_uni(p, v)).collect(), nonzero })
        }
        _ => Classified::Higher,
    }
}

fn support_image(g: &SymmetryElement, s: &BTreeSet<usize>) -> BTreeSet<usize> {
    s.iter().map(|&p| g.pair_index(p).0).collect()
}

/// Shape parameters of the moving triangles of a curve and their relation.
fn shape_relation(cv: &CoreCurve) -> Option<ShapeRelation> {
    // Triangle faces whose normalized values differ between samples.
    let pts: Vec<CorePoint> = cv.samples().iter().filter_map(|t| cv.eval(t)).collect();
    let moving: Vec<usize> =
        (3..NUM_FACES).filter(|&f| pts.windows(2).any(|w| w[0].face_values(f) != w[1].face_values(f))).collect();
    // Clusters of moving triangles linked by related pairs.
    let mut cl: Vec<usize> = (0..moving.len()).collect();
    for (i, &f) in moving.iter().enumerate() {
        let t = TriangleInFace { tri: ordered_triangle(f).unwrap(), host: f };
        for rp in related_pairs(&t) {
            if rp.other.host == rp.other.tri.face {
                if let Some(j) = moving.iter().position(|&g| g == rp.other.host) {
                    let (a, b) = (cl[i].min(cl[j]), cl[i].max(cl[j]));
                    for c in cl.iter_mut() {
                        if *c == b {
                            *c = a;
                        }
                    }
                }
            }
        }
    }
    let mut reps: BTreeMap<usize, usize> = BTreeMap::new();
    for (i, &f) in moving.iter().enumerate() {
        let e = reps.entry(cl[i]).or_insert(f);
        if (face(f).rank(), f) < (face(*e).rank(), *e) {
            *e = f;
        }
    }
    let mut reps: Vec<usize> = reps.into_values().collect();
    reps.sort_by_key(|&f| (face(f).rank(), f));
    if reps.len() != 2 {
        return None;
    }
    let shape = |f: usize| {
        let ps = face_pairs(f);
        let tri = ordered_triangle(f).unwrap();
        let v = |e: usize| UniRat::from_poly(cv.values[ps.iter().copied().find(|&p| pair(p).0 == e).unwrap()].clone());
        let (a, b, c) = (v(tri.edges[0]), v(tri.edges[1]), v(tri.edges[2]));
        c.sub(&a).div(&b.scale(&Rat::from(2)))
    };
    let (u, v) = (shape(reps[0]), shape(reps[1]));
    let rows: Vec<Vec<Rat>> = CURVE_SAMPLES
        .iter()
        .map(|&(n, d)| Rat::new(n, d))
        .filter_map(|t| Some(vec![u.eval(&t)?, v.eval(&t)?, Rat::one()]))
        .take(5)
        .collect();
    let (_, ker) = QMatrix::from_rows(3, rows).rank_and_kernel();
    if ker.len() != 1 {
        return None;
    }
    let k = &ker[0];
    let lead = k.iter().find(|x| !x.is_zero())?.clone();
    let coeffs = [&k[0] / &lead, &k[1] / &lead, &k[2] / &lead];
    let ident = u.scale(&coeffs[0]).add(&v.scale(&coeffs[1])).add(&UniRat::constant(coeffs[2].clone()));
    ident.is_zero().then(|| ShapeRelation { u_triangle: face(reps[0]).id(), v_triangle: face(reps[1]).id(), coeffs })
}

fn compute() -> Result<(Vec<SpecialPointRecord>, EnumerationStats), SpecialError> {
    let per: Vec<Result<(Vec<Found>, EnumerationStats), SpecialError>> =
        PartitionTriple::all().into_par_iter().map(process_triple).collect();
    let mut found = Vec::new();
    let mut st = EnumerationStats::default();
    for r in per {
        let (f, s) = r?;
        found.extend(f);
        st.triples += s.triples;
        st.cases += s.cases;
        st.components += s.components;
        st.not_minimally_split += s.not_minimally_split;
        st.higher_dimensional += s.higher_dimensional;
        st.closure_points += s.closure_points;
    }
    // Representatives and supports.
    let mut recs: Vec<SpecialPointRecord> = found
        .into_iter()
        .map(|fd| {
            let (reps, sample_params, shape, dim) = match (&fd.point, &fd.curve) {
                (Some(z), _) => (vec![z.clone()], vec![], None, 0),
                (None, Some(cv)) => {
                    let s = cv.samples();
                    (s.iter().map(|t| cv.eval(t).unwrap()).collect(), s, shape_relation(cv), 1)
                }
                _ => unreachable!(),
            };
            let split = reconstructed_split(&reps[0]).1.to_string();
            SpecialPointRecord {
                type_label: TypeLabel::Dde,
                dimension: dim,
                orbit_size: 0,
                s4_orbits: vec![],
                triple: fd.triple,
                split_type: split,
                chart_case: fd.case,
                pattern: reps[0].zero_pattern(),
                representatives: reps,
                curve: fd.curve,
                sample_params,
                shape_relation: shape,
                certificates: vec![],
            }
        })
        .collect();
    // Symmetry classes of supports.
    let group = SymmetryElement::all();
    let supports: Vec<(usize, BTreeSet<usize>)> = recs.iter().map(|r| (r.dimension, r.support())).collect();
    for i in 0..recs.len() {
        let (dim, s) = &supports[i];
        let orbit: BTreeSet<BTreeSet<usize>> = group.iter().map(|g| support_image(g, s)).collect();
        let members: Vec<&BTreeSet<usize>> =
            supports.iter().filter(|(d, t)| d == dim && orbit.contains(t)).map(|(_, t)| t).collect();
        if members.len() != orbit.len() {
            return Err(SpecialError::OrbitNotClosed {
                size: orbit.len(),
                found: members.len(),
                dimension: *dim,
                triple: recs[i].triple.to_string(),
            });
        }
        let mut seen: BTreeSet<BTreeSet<usize>> = BTreeSet::new();
        let mut s4 = Vec::new();
        for m in members {
            if seen.contains(m) {
                continue;
            }
            let o: BTreeSet<BTreeSet<usize>> =
                group.iter().filter(|g| !g.dualize).map(|g| support_image(g, m)).collect();
            s4.push(o.len());
            seen.extend(o);
        }
        s4.sort_unstable_by(|a, b| b.cmp(a));
        let label = match (*dim, orbit.len(), s4.len()) {
            (1, 4, _) => TypeLabel::CcStarOpD,
            (0, 6, _) => TypeLabel::Dde,
            (0, 12, _) => TypeLabel::CcStarNopD,
            (0, 24, 1) => TypeLabel::CcStarE,
            (0, 24, 2) => TypeLabel::Cde,
            (d, n, _) => return Err(SpecialError::UnexpectedOrbit { dimension: d, size: n }),
        };
        recs[i].orbit_size = orbit.len();
        recs[i].s4_orbits = s4;
        recs[i].type_label = label;
    }
    recs.sort_by(|a, b| {
        (a.dimension, a.type_label, a.triple, &a.representatives[0]).cmp(&(
            b.dimension,
            b.type_label,
            b.triple,
            &b.representatives[0],
        ))
    });
    Ok((recs, st))
}

static CACHE: OnceLock<Result<(Vec<SpecialPointRecord>, EnumerationStats), SpecialError>> = OnceLock::new();

/// The special locus as a list of isolated points and curves.
pub fn enumerate_special() -> Result<Vec<SpecialPointRecord>, SpecialError> {
    enumerate_special_with_stats().map(|(r, _)| r)
}

pub fn enumerate_special_with_stats() -> Result<(Vec<SpecialPointRecord>, EnumerationStats), SpecialError> {
    CACHE.get_or_init(compute).clone()
}

/// Largest dimension of the solution set for the record's pattern when
/// only the given relation families are imposed.
pub fn ambient_dimension(rec: &SpecialPointRecord, families: &[Family]) -> Result<usize, SolveError> {
    let comps = solve(case_system(&rec.triple, rec.chart_case, families))?;
    Ok(comps.iter().map(Component::dimension).max().unwrap_or(0))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogMatch {
    pub index: usize,
    pub type_label: TypeLabel,
    /// Symmetry g with g·z equal to the catalogued point.
    pub symmetry: SymmetryElement,
    /// Curve parameter for family matches (None = the point at ∞).
    pub parameter: Option<Option<Rat>>,
}

/// Looks for z in the catalog up to per-face scale and S₄ × duality.
pub fn match_against_catalog(z: &CorePoint, catalog: &[SpecialPointRecord]) -> Option<CatalogMatch> {
    let group = SymmetryElement::all();
    let zs: Vec<(SymmetryElement, CorePoint)> = group.iter().map(|g| (*g, z.permuted(g))).collect();
    for (i, r) in catalog.iter().enumerate() {
        for (g, zg) in &zs {
            match &r.curve {
                None if r.representatives[0] == *zg => {
                    return Some(CatalogMatch { index: i, type_label: r.type_label, symmetry: *g, parameter: None });
                }
                Some(cv) => {
                    if let Some(t) = curve_contains(cv, zg) {
                        return Some(CatalogMatch {
                            index: i,
                            type_label: r.type_label,
                            symmetry: *g,
                            parameter: Some(t),
                        });
                    }
                }
                _ => {}
            }
        }
    }
    None
}

/// Attaches a smoothness certificate to every representative, replacing
/// any stored ones. Certification runs in parallel over records.
pub fn certify_catalog(catalog: &mut [SpecialPointRecord]) -> Result<(), super::CoreError> {
    catalog.par_iter_mut().try_for_each(|r| {
        r.certificates = r.representatives.iter().map(jacobian_certificate).collect::<Result<_, _>>()?;
        Ok(())
    })
}

/// Re-verifies a catalog: representatives satisfy the core relations and
/// the five-pattern rule, patterns and curve samples are consistent, and
/// stored certificates reproduce. Returns a list of problems.
pub fn verify_catalog(catalog: &[SpecialPointRecord]) -> Vec<String> {
    let probs: Vec<Vec<String>> = catalog
        .par_iter()
        .enumerate()
        .map(|(i, r)| {
            let mut p = Vec::new();
            let tag = format!("record {i} ({})", r.type_label);
            if r.representatives.is_empty() {
                p.push(format!("{tag}: no representatives"));
                return p;
            }
            for (j, z) in r.representatives.iter().enumerate() {
                let v = z.violated_relations();
                if !v.is_empty() {
                    p.push(format!("{tag}: representative {j} violates {} relations", v.len()));
                }
                if !z.related_pattern_violations().is_empty() {
                    p.push(format!("{tag}: representative {j} breaks the related-triangle patterns"));
                }
            }
            if r.representatives[0].zero_pattern() != r.pattern {
                p.push(format!("{tag}: stored zero pattern differs from representative"));
            }
            if let Some(cv) = &r.curve {
                for (t, z) in r.sample_params.iter().zip(&r.representatives) {
                    if cv.eval(t).as_ref() != Some(z) {
                        p.push(format!("{tag}: curve at t = {t} differs from stored representative"));
                    }
                }
            }
            for (j, c) in r.certificates.iter().enumerate() {
                match jacobian_certificate(&c.point) {
                    Ok(fresh) if fresh == *c => {}
                    Ok(_) => p.push(format!("{tag}: certificate {j} does not reproduce")),
                    Err(e) => p.push(format!("{tag}: certificate {j}: {e}")),
                }
                if !r.representatives.contains(&c.point) {
                    p.push(format!("{tag}: certificate {j} is for a point outside the record"));
                }
            }
            p
        })
        .collect();
    probs.into_iter().flatten().collect()
}
