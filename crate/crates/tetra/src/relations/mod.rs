//! Defining polynomials of the chart U (in edge coordinates x_α) and of the
//! core Z (in core coordinates y_{α,β}).
//!
//! Index patterns are written with symbolic i, j, k, l and instantiated over
//! all 24 orderings. An oriented edge (I, J) contributes sign·x_e where e is
//! the canonical edge and sign = −1 when I > J. Generators are deduplicated
//! up to global sign, keeping the first origin.
//!
//! For Z the cubic and quartic are generated in face-distributed form: the
//! factors of the two monomials are matched in pairs sharing a face, and
//! each matched pair may be hosted in any face containing both edges. The
//! versions with every factor in a maximal face are among them. Without the
//! distributed versions the one-dimensional special families come out
//! two-dimensional, since factors in maximal faces are constant there.

pub mod symbolic;

use std::collections::{BTreeMap, HashSet};
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{QMatrix, Rat, SparsePoly, Var};
use crate::combinatorics::{
    edge, face, faces_containing, maximal_face, ordered_triangles, pair_index, EdgeLabel, SubsetLabel, NUM_EDGES,
    NUM_FACES,
};
use crate::config::NormalizedChart;

pub use symbolic::{symbolic_identity_check, IdentityMode, IdentityReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    Linear,
    QuadricShared,
    QuadricRotated,
    Cubic,
    Quartic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Level {
    U,
    Z,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Origin {
    /// The instantiated (i, j, k[, l]); empty for linear relations and
    /// shared-vertex quadrics.
    pub indices: Vec<u8>,
    /// Face ids involved (host faces for Z).
    pub faces: Vec<String>,
    /// Which pattern produced the generator.
    pub pattern: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    pub poly: SparsePoly,
    pub family: Family,
    pub level: Level,
    pub origin: Origin,
}

impl Relation {
    /// Whether every factor lives in a maximal face (Z level); for U-level
    /// relations always true.
    pub fn uses_only_maximal_faces(&self) -> bool {
        self.poly.variables().iter().all(|v| match v {
            Var::Core(p) => crate::combinatorics::pair(*p as usize).1 < 3,
            _ => true,
        })
    }
}

fn subset(ids: &[u8]) -> SubsetLabel {
    SubsetLabel::from_members(ids).expect("valid subset")
}

/// Canonical edge index and sign for the oriented pair (a, b).
fn sedge(a: &[u8], b: &[u8]) -> (usize, i32) {
    let (e, s) = EdgeLabel::oriented(subset(a), subset(b)).expect("pattern edge");
    (e.index(), s)
}

fn permutations4() -> Vec<[u8; 4]> {
    crate::combinatorics::SymmetryElement::all().into_iter().filter(|g| !g.dualize).map(|g| g.perm).collect()
}

struct Collector {
    seen: HashSet<SparsePoly>,
    out: Vec<Relation>,
    level: Level,
}

impl Collector {
    fn new(level: Level) -> Collector {
        Collector { seen: HashSet::new(), out: Vec::new(), level }
    }

    fn add(&mut self, poly: SparsePoly, family: Family, origin: Origin) {
        if poly.is_zero() {
            return;
        }
        let key = poly.sign_normalized();
        if self.seen.insert(key.clone()) {
            self.out.push(Relation { poly: key, family, level: self.level, origin });
        }
    }
}

/// c₁·Πa − c₂·Πb.
fn binomial(c1: i32, a: &[Var], c2: i32, b: &[Var]) -> SparsePoly {
    SparsePoly::product(Rat::from(c1 as i64), a).sub(&SparsePoly::product(Rat::from(c2 as i64), b))
}

/// Signed edges of the two quadric patterns for (i, j, k, l):
/// α₁, α₂, α₁*, α₂* with x_{α₁}x_{α₂*} − x_{α₂}x_{α₁*}.
fn quadric_patterns(p: [u8; 4]) -> [([(usize, i32); 4], &'static str); 2] {
    let [i, j, k, l] = p;
    [
        ([sedge(&[i], &[j]), sedge(&[j], &[k]), sedge(&[i, k], &[j, k]), sedge(&[i, j], &[i, k])], "delta1-delta2"),
        (
            [
                sedge(&[i, l], &[j, l]),
                sedge(&[j, l], &[k, l]),
                sedge(&[i, k, l], &[j, k, l]),
                sedge(&[i, j, l], &[i, k, l]),
            ],
            "delta2-delta3",
        ),
    ]
}

/// Signed edges (index, ±1) of the two monomials of a binomial relation.
type Sides = (Vec<(usize, i32)>, Vec<(usize, i32)>);

/// Factors (left, right) of the cubic for (i, j, k, l); all edges in Δ₂.
fn cubic_pattern(p: [u8; 4]) -> Sides {
    let [i, j, k, l] = p;
    (
        vec![sedge(&[i, j], &[i, l]), sedge(&[i, k], &[k, l]), sedge(&[j, k], &[j, l])],
        vec![sedge(&[j, k], &[k, l]), sedge(&[i, j], &[j, l]), sedge(&[i, k], &[i, l])],
    )
}

/// Factors (left, right) of the quartic for (i, j, k, l): two Δ₁ and two Δ₃
/// edges on each side.
fn quartic_pattern(p: [u8; 4]) -> Sides {
    let [i, j, k, l] = p;
    (
        vec![sedge(&[i], &[j]), sedge(&[k], &[l]), sedge(&[i, j, l], &[i, k, l]), sedge(&[j, k, l], &[i, j, k])],
        vec![sedge(&[j], &[k]), sedge(&[l], &[i]), sedge(&[i, k, l], &[j, k, l]), sedge(&[i, j, k], &[i, j, l])],
    )
}

fn sign_of(v: &[(usize, i32)]) -> i32 {
    v.iter().map(|&(_, s)| s).product()
}

fn generate_u() -> Vec<Relation> {
    let mut c = Collector::new(Level::U);
    let xv = |e: usize| Var::Edge(e as u8);
    for t in ordered_triangles() {
        let [a1, a2, a3] = t.edges;
        let p = SparsePoly::var(xv(a1)).sub(&SparsePoly::var(xv(a2))).add(&SparsePoly::var(xv(a3)));
        c.add(
            p,
            Family::Linear,
            Origin { indices: vec![], faces: vec![face(t.face).id()], pattern: "triangle".into() },
        );
    }
    for perm in permutations4() {
        for (pat, name) in quadric_patterns(perm) {
            let [(a1, s1), (a2, s2), (b1, t1), (b2, t2)] = pat;
            let (ia, ib) = if name == "delta1-delta2" { (1, 2) } else { (2, 3) };
            c.add(
                binomial(s1 * t2, &[xv(a1), xv(b2)], s2 * t1, &[xv(a2), xv(b1)]),
                Family::QuadricRotated,
                Origin {
                    indices: perm[..3].iter().copied().chain((ib == 3).then_some(perm[3])).collect(),
                    faces: vec![format!("D{ia}"), format!("D{ib}")],
                    pattern: name.into(),
                },
            );
        }
        let (l, r) = cubic_pattern(perm);
        c.add(
            binomial(
                sign_of(&l),
                &l.iter().map(|&(e, _)| xv(e)).collect::<Vec<_>>(),
                sign_of(&r),
                &r.iter().map(|&(e, _)| xv(e)).collect::<Vec<_>>(),
            ),
            Family::Cubic,
            Origin { indices: perm.to_vec(), faces: vec!["D2".into()], pattern: "cubic".into() },
        );
        let (l, r) = quartic_pattern(perm);
        c.add(
            binomial(
                sign_of(&l),
                &l.iter().map(|&(e, _)| xv(e)).collect::<Vec<_>>(),
                sign_of(&r),
                &r.iter().map(|&(e, _)| xv(e)).collect::<Vec<_>>(),
            ),
            Family::Quartic,
            Origin { indices: perm.to_vec(), faces: vec!["D1".into(), "D3".into()], pattern: "quartic".into() },
        );
    }
    c.out
}

fn yv(e: usize, f: usize) -> Var {
    Var::Core(pair_index(e, f).expect("edge in face") as u8)
}

/// All perfect matchings between left and right factors whose matched edges
/// share a face, with every choice of host face per matched pair.
fn distributed(c: &mut Collector, l: &[(usize, i32)], r: &[(usize, i32)], family: Family, perm: [u8; 4]) {
    let n = l.len();
    let sl = sign_of(l);
    let sr = sign_of(r);
    let mut idx: Vec<usize> = (0..n).collect();
    let mut matchings = Vec::new();
    permute(&mut idx, 0, &mut matchings);
    for m in matchings {
        let opts: Vec<Vec<usize>> = (0..n).map(|i| faces_containing(&[l[i].0, r[m[i]].0])).collect();
        if opts.iter().any(Vec::is_empty) {
            continue;
        }
        let mut choice = vec![0usize; n];
        loop {
            let hosts: Vec<usize> = (0..n).map(|i| opts[i][choice[i]]).collect();
            let left: Vec<Var> = (0..n).map(|i| yv(l[i].0, hosts[i])).collect();
            let right: Vec<Var> = (0..n).map(|i| yv(r[m[i]].0, hosts[i])).collect();
            let mut faces: Vec<String> = hosts.iter().map(|&h| face(h).id()).collect();
            faces.dedup();
            c.add(
                binomial(sl, &left, sr, &right),
                family,
                Origin {
                    indices: perm.to_vec(),
                    faces,
                    pattern: if family == Family::Cubic { "cubic" } else { "quartic" }.into(),
                },
            );
            // Odometer over the host choices.
            let mut pos = 0;
            loop {
                if pos == n {
                    break;
                }
                choice[pos] += 1;
                if choice[pos] < opts[pos].len() {
                    break;
                }
                choice[pos] = 0;
                pos += 1;
            }
            if pos == n {
                break;
            }
        }
    }
}

fn permute(v: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k == v.len() {
        out.push(v.clone());
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permute(v, k + 1, out);
        v.swap(k, i);
    }
}

fn generate_z() -> Vec<Relation> {
    let mut c = Collector::new(Level::Z);
    for f in 0..NUM_FACES {
        for t in ordered_triangles() {
            if t.edges.iter().all(|e| face(f).edges().contains(e)) {
                let [a1, a2, a3] = t.edges;
                let p = SparsePoly::var(yv(a1, f)).sub(&SparsePoly::var(yv(a2, f))).add(&SparsePoly::var(yv(a3, f)));
                c.add(
                    p,
                    Family::Linear,
                    Origin {
                        indices: vec![],
                        faces: vec![face(f).id()],
                        pattern: format!("triangle {}", face(t.face).id()),
                    },
                );
            }
        }
    }
    for b1 in 0..NUM_FACES {
        for b2 in 0..NUM_FACES {
            if b1 == b2 {
                continue;
            }
            let common: Vec<usize> =
                face(b1).edges().iter().copied().filter(|e| face(b2).edges().contains(e)).collect();
            for (i, &a1) in common.iter().enumerate() {
                for &a2 in &common[i + 1..] {
                    if edge(a1).shares_vertex(edge(a2)) {
                        c.add(
                            binomial(1, &[yv(a1, b1), yv(a2, b2)], 1, &[yv(a2, b1), yv(a1, b2)]),
                            Family::QuadricShared,
                            Origin {
                                indices: vec![],
                                faces: vec![face(b1).id(), face(b2).id()],
                                pattern: "shared-vertex".into(),
                            },
                        );
                    }
                }
            }
        }
    }
    let perms = permutations4();
    for &perm in &perms {
        for (pat, name) in quadric_patterns(perm) {
            let [(a1, s1), (a2, s2), (b1, t1), (b2, t2)] = pat;
            for b in faces_containing(&[a1, a2]) {
                for bs in faces_containing(&[b1, b2]) {
                    c.add(
                        binomial(s1 * t2, &[yv(a1, b), yv(b2, bs)], s2 * t1, &[yv(a2, b), yv(b1, bs)]),
                        Family::QuadricRotated,
                        Origin {
                            indices: perm.to_vec(),
                            faces: vec![face(b).id(), face(bs).id()],
                            pattern: name.into(),
                        },
                    );
                }
            }
        }
    }
    // Listed forms first so that they keep their origin.
    let d2 = maximal_face(2);
    let (d1, d3) = (maximal_face(1), maximal_face(3));
    for &perm in &perms {
        let (l, r) = cubic_pattern(perm);
        c.add(
            binomial(
                sign_of(&l),
                &l.iter().map(|&(e, _)| yv(e, d2)).collect::<Vec<_>>(),
                sign_of(&r),
                &r.iter().map(|&(e, _)| yv(e, d2)).collect::<Vec<_>>(),
            ),
            Family::Cubic,
            Origin { indices: perm.to_vec(), faces: vec!["D2".into()], pattern: "cubic".into() },
        );
        let (l, r) = quartic_pattern(perm);
        let host = |i: usize| if i < 2 { d1 } else { d3 };
        c.add(
            binomial(
                sign_of(&l),
                &l.iter().enumerate().map(|(i, &(e, _))| yv(e, host(i))).collect::<Vec<_>>(),
                sign_of(&r),
                &r.iter().enumerate().map(|(i, &(e, _))| yv(e, host(i))).collect::<Vec<_>>(),
            ),
            Family::Quartic,
            Origin { indices: perm.to_vec(), faces: vec!["D1".into(), "D3".into()], pattern: "quartic".into() },
        );
    }
    for &perm in &perms {
        let (l, r) = cubic_pattern(perm);
        distributed(&mut c, &l, &r, Family::Cubic, perm);
        let (l, r) = quartic_pattern(perm);
        distributed(&mut c, &l, &r, Family::Quartic, perm);
    }
    c.out
}

/// Generators of the chart U in the 24 edge coordinates.
pub fn u_relations() -> &'static [Relation] {
    static U: OnceLock<Vec<Relation>> = OnceLock::new();
    U.get_or_init(generate_u)
}

/// Generators of the core Z in the 72 core coordinates.
pub fn z_relations() -> &'static [Relation] {
    static Z: OnceLock<Vec<Relation>> = OnceLock::new();
    Z.get_or_init(generate_z)
}

/// Generates afresh, bypassing the cache (for idempotence checks).
pub fn generate(level: Level) -> Vec<Relation> {
    match level {
        Level::U => generate_u(),
        Level::Z => generate_z(),
    }
}

pub fn family_counts(rels: &[Relation]) -> BTreeMap<Family, usize> {
    let mut m = BTreeMap::new();
    for r in rels {
        *m.entry(r.family).or_insert(0) += 1;
    }
    m
}

/// A point as a map from variables to values.
pub type Assignment = std::collections::HashMap<Var, Rat>;

/// Edge and flag coordinates of a chart.
pub fn chart_assignment(c: &NormalizedChart) -> Assignment {
    let mut a: Assignment = c.x.iter().enumerate().map(|(i, v)| (Var::Edge(i as u8), v.clone())).collect();
    a.extend(c.flag.iter().enumerate().map(|(i, v)| (Var::Flag(i as u8), v.clone())));
    a
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Failure {
    pub relation: usize,
    pub point: usize,
    pub value: Rat,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VanishingReport {
    pub relations: usize,
    pub points: usize,
    pub failures: Vec<Failure>,
    /// Relations that could not be evaluated for lack of a variable value.
    pub missing: Vec<(usize, usize)>,
}

impl VanishingReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty() && self.missing.is_empty()
    }
}

/// Evaluates every relation at every point.
pub fn verify_vanishing(rels: &[Relation], points: &[Assignment]) -> VanishingReport {
    #[allow(clippy::type_complexity)]
    let per_point: Vec<(Vec<Failure>, Vec<(usize, usize)>)> = points
        .par_iter()
        .enumerate()
        .map(|(pi, pt)| {
            let mut fails = Vec::new();
            let mut missing = Vec::new();
            for (ri, r) in rels.iter().enumerate() {
                match r.poly.evaluate_map(pt) {
                    Ok(v) if v.is_zero() => {}
                    Ok(v) => fails.push(Failure { relation: ri, point: pi, value: v }),
                    Err(_) => missing.push((ri, pi)),
                }
            }
            (fails, missing)
        })
        .collect();
    let mut rep = VanishingReport { relations: rels.len(), points: points.len(), ..Default::default() };
    for (f, m) in per_point {
        rep.failures.extend(f);
        rep.missing.extend(m);
    }
    rep
}

/// Jacobian of the U relations with respect to the 24 edge variables.
pub fn u_jacobian(x: &[Rat]) -> QMatrix {
    let val = |v: Var| match v {
        Var::Edge(e) => Some(x[e as usize].clone()),
        _ => None,
    };
    let rows = u_relations()
        .iter()
        .map(|r| {
            let mut row = vec![Rat::zero(); NUM_EDGES];
            for (v, c) in r.poly.gradient_at(&val).expect("edge variables") {
                if let Var::Edge(e) = v {
                    row[e as usize] = c;
                }
            }
            row
        })
        .collect();
    QMatrix::from_rows(NUM_EDGES, rows)
}

/// Substitutes y_{α,β} ↦ x_α.
pub fn lift_to_edges(p: &SparsePoly) -> SparsePoly {
    p.substitute(&|v| match v {
        Var::Core(pi) => Some(SparsePoly::var(Var::Edge(crate::combinatorics::pair(pi as usize).0 as u8))),
        _ => None,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentCheck {
    /// Ranks k whose edge coordinates are set to zero.
    pub zeroed_ranks: Vec<usize>,
    pub quadrics: usize,
    pub quadrics_killed: usize,
    pub linear: usize,
    pub linear_killed: usize,
    /// Linear generators left untouched, supported on the free variables.
    pub linear_surviving: usize,
    /// Cubic and quartic generators that do not reduce to zero.
    pub higher_surviving: usize,
}

impl ComponentCheck {
    /// Every linear or quadric generator reduces to 0 or to a linear
    /// generator in the free variables, so {x_S = 0} intersected with the
    /// surviving linear relations lies in the incidence variety.
    pub fn ok(&self) -> bool {
        self.quadrics_killed == self.quadrics && self.linear_killed + self.linear_surviving == self.linear
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IncidenceReport {
    pub middle_zero: ComponentCheck,
    pub outer_zero: ComponentCheck,
}

impl IncidenceReport {
    pub fn ok(&self) -> bool {
        self.middle_zero.ok() && self.outer_zero.ok()
    }
}

fn component_check(zeroed_ranks: &[usize]) -> ComponentCheck {
    let zero = |v: Var| match v {
        Var::Edge(e) if zeroed_ranks.contains(&edge(e as usize).rank()) => Some(Rat::zero()),
        _ => None,
    };
    let mut rep = ComponentCheck {
        zeroed_ranks: zeroed_ranks.to_vec(),
        quadrics: 0,
        quadrics_killed: 0,
        linear: 0,
        linear_killed: 0,
        linear_surviving: 0,
        higher_surviving: 0,
    };
    for r in u_relations() {
        let red = r.poly.partial_eval(&zero);
        match r.family {
            Family::Linear => {
                rep.linear += 1;
                if red.is_zero() {
                    rep.linear_killed += 1;
                } else if red == r.poly {
                    rep.linear_surviving += 1;
                }
            }
            Family::QuadricShared | Family::QuadricRotated => {
                rep.quadrics += 1;
                if red.is_zero() {
                    rep.quadrics_killed += 1;
                }
            }
            Family::Cubic | Family::Quartic => {
                if !red.is_zero() {
                    rep.higher_surviving += 1;
                }
            }
        }
    }
    rep
}

/// Checks the two extra components of the incidence variety: x = 0 on ℰ₂,
/// and x = 0 on ℰ₁ ∪ ℰ₃.
pub fn incidence_component_check() -> IncidenceReport {
    IncidenceReport { middle_zero: component_check(&[2]), outer_zero: component_check(&[1, 3]) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::sample_charts;

    #[test]
    fn u_counts_and_shapes() {
        let u = u_relations();
        let counts = family_counts(u);
        assert_eq!(counts[&Family::Linear], 16);
        for r in u {
            let n = r.poly.num_terms();
            assert_eq!(n, if r.family == Family::Linear { 3 } else { 2 }, "{}", r.poly);
        }
    }

    #[test]
    fn z_counts_and_shapes() {
        let z = z_relations();
        let counts = family_counts(z);
        assert_eq!(counts[&Family::Linear], 32);
        assert_eq!(counts[&Family::QuadricShared], 48);
        assert_eq!(counts[&Family::QuadricRotated], 96);
        assert_eq!(counts[&Family::Cubic], 72);
        assert_eq!(counts[&Family::Quartic], 147);
        let listed_cubic = z.iter().filter(|r| r.family == Family::Cubic && r.uses_only_maximal_faces()).count();
        let listed_quartic = z.iter().filter(|r| r.family == Family::Quartic && r.uses_only_maximal_faces()).count();
        assert_eq!((listed_cubic, listed_quartic), (4, 3));
        let set: HashSet<&SparsePoly> = z.iter().map(|r| &r.poly).collect();
        assert!(z.iter().all(|r| !set.contains(&r.poly.neg())));
        for r in z {
            assert_eq!(r.poly.num_terms(), if r.family == Family::Linear { 3 } else { 2 });
        }
    }

    #[test]
    fn quartic_uses_printed_edges() {
        let q = u_relations().iter().find(|r| r.family == Family::Quartic && r.origin.indices == [1, 2, 3, 4]).unwrap();
        let names: Vec<String> = q.poly.variables().iter().map(|v| v.name()).collect();
        for e in ["x_1_2", "x_2_3", "x_3_4", "x_1_4", "x_124_134", "x_123_234", "x_134_234", "x_123_124"] {
            assert!(names.contains(&e.to_string()), "{e} missing from {names:?}");
        }
    }

    #[test]
    fn u_relations_vanish_on_samples() {
        let pts: Vec<Assignment> = sample_charts(11, 10).iter().map(chart_assignment).collect();
        let rep = verify_vanishing(u_relations(), &pts);
        assert!(rep.ok(), "{:?}", rep.failures.first());
    }

    #[test]
    fn corrupted_sample_detected() {
        let mut ch = sample_charts(12, 1).remove(0);
        ch.x[3] += Rat::one();
        let rep = verify_vanishing(u_relations(), &[chart_assignment(&ch)]);
        assert!(!rep.failures.is_empty());
        let zero: Assignment = (0..NUM_EDGES).map(|e| (Var::Edge(e as u8), Rat::zero())).collect();
        assert!(verify_vanishing(u_relations(), &[zero]).ok());
    }

    #[test]
    fn u_jacobian_rank_is_18() {
        for ch in sample_charts(13, 3) {
            assert_eq!(u_jacobian(&ch.x).rank(), 18);
        }
    }

    #[test]
    fn z_families_lift_to_u_generators() {
        let u: HashSet<SparsePoly> = u_relations().iter().map(|r| r.poly.sign_normalized()).collect();
        for r in z_relations() {
            let l = lift_to_edges(&r.poly);
            assert!(l.is_zero() || u.contains(&l.sign_normalized()), "{} lifts to {}", r.poly, l);
        }
    }

    #[test]
    fn incidence_components() {
        let rep = incidence_component_check();
        assert!(rep.ok(), "{rep:?}");
        assert_eq!(rep.middle_zero.linear_surviving, 8);
        assert_eq!(rep.outer_zero.linear_surviving, 8);
        assert!(rep.middle_zero.higher_surviving > 0);
        assert!(rep.outer_zero.higher_surviving > 0);
    }

    #[test]
    fn generation_is_idempotent() {
        assert_eq!(generate(Level::U), u_relations());
        assert_eq!(generate(Level::Z), z_relations());
    }
}
