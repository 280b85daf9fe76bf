//! Combinatorics of the hypersimplices Δ₁, Δ₂, Δ₃ in ℝ⁴.
//!
//! Vertices of Δ_k are the k-element subsets of {1,2,3,4}. All tables are
//! built once and indexed by small integers: 14 subsets, 24 edges, 19 faces
//! (3 maximal plus 16 triangles) and 72 (edge, face) incidences.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

/// Subset masks in the total order 1 < 2 < 3 < 4 < 12 < 13 < ... < 234.
/// Bit i stands for the element i + 1.
const ORDER: [u8; 14] = [
    0b0001, 0b0010, 0b0100, 0b1000, // 1 2 3 4
    0b0011, 0b0101, 0b1001, 0b0110, 0b1010, 0b1100, // 12 13 14 23 24 34
    0b0111, 0b1011, 0b1101, 0b1110, // 123 124 134 234
];

pub const FULL_MASK: u8 = 0b1111;

pub const NUM_SUBSETS: usize = 14;
pub const NUM_EDGES: usize = 24;
pub const NUM_FACES: usize = 19;
pub const NUM_PAIRS: usize = 72;

/// The six flag coordinates f_{1,2}, f_{1,3}, f_{1,4}, f_{12,13}, f_{12,14}, f_{123,124}.
pub const FLAG_NAMES: [&str; 6] = ["f_1_2", "f_1_3", "f_1_4", "f_12_13", "f_12_14", "f_123_124"];

/// A proper nonempty subset of {1,2,3,4}.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct SubsetLabel(u8);

impl SubsetLabel {
    pub fn from_mask(mask: u8) -> Option<SubsetLabel> {
        (mask != 0 && mask < FULL_MASK).then_some(SubsetLabel(mask))
    }

    pub fn from_members(members: &[u8]) -> Option<SubsetLabel> {
        let mut m = 0u8;
        for &i in members {
            if !(1..=4).contains(&i) {
                return None;
            }
            m |= 1 << (i - 1);
        }
        SubsetLabel::from_mask(m)
    }

    /// Shorthand for literals such as `s("134")`. Panics on bad input.
    pub fn parse_lit(s: &str) -> SubsetLabel {
        s.parse().unwrap_or_else(|_| panic!("bad subset literal {s:?}"))
    }

    pub fn mask(self) -> u8 {
        self.0
    }

    pub fn members(self) -> Vec<u8> {
        (1..=4).filter(|i| self.0 & (1 << (i - 1)) != 0).collect()
    }

    pub fn contains(self, i: u8) -> bool {
        self.0 & (1 << (i - 1)) != 0
    }

    pub fn rank(self) -> usize {
        self.0.count_ones() as usize
    }

    /// The base vertex I₀: 1, 12 or 123 by rank.
    pub fn base(self) -> SubsetLabel {
        SubsetLabel(match self.rank() {
            1 => 0b0001,
            2 => 0b0011,
            _ => 0b0111,
        })
    }

    /// Position in the total order, 0..14.
    pub fn index(self) -> usize {
        ORDER.iter().position(|&m| m == self.0).unwrap()
    }

    pub fn from_index(i: usize) -> SubsetLabel {
        SubsetLabel(ORDER[i])
    }

    pub fn all() -> impl Iterator<Item = SubsetLabel> {
        ORDER.iter().map(|&m| SubsetLabel(m))
    }

    pub fn of_rank(k: usize) -> impl Iterator<Item = SubsetLabel> {
        SubsetLabel::all().filter(move |s| s.rank() == k)
    }

    pub fn complement(self) -> SubsetLabel {
        SubsetLabel(FULL_MASK & !self.0)
    }

    /// Index among the subsets of the same rank, in lexicographic order of the
    /// members. This is also the Plücker coordinate index of E_I.
    pub fn lex_index(self) -> usize {
        SubsetLabel::of_rank(self.rank()).position(|s| s == self).unwrap()
    }
}

impl PartialOrd for SubsetLabel {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for SubsetLabel {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        self.index().cmp(&o.index())
    }
}

impl fmt::Display for SubsetLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in self.members() {
            write!(f, "{i}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for SubsetLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("not a proper nonempty subset of 1234: {0:?}")]
pub struct ParseSubsetError(pub String);

impl FromStr for SubsetLabel {
    type Err = ParseSubsetError;

    fn from_str(s: &str) -> Result<SubsetLabel, ParseSubsetError> {
        let err = || ParseSubsetError(s.to_string());
        let mut members = Vec::new();
        for ch in s.trim().chars() {
            let d = ch.to_digit(10).ok_or_else(err)? as u8;
            if members.contains(&d) {
                return Err(err());
            }
            members.push(d);
        }
        SubsetLabel::from_members(&members).ok_or_else(err)
    }
}

impl Serialize for SubsetLabel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for SubsetLabel {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<SubsetLabel, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// An edge {lo, hi} of a hypersimplex, stored with lo < hi.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeLabel {
    pub lo: SubsetLabel,
    pub hi: SubsetLabel,
}

impl EdgeLabel {
    /// Canonical edge for the ordered pair (a, b) and the sign relating the
    /// oriented value x_(a,b) = f_b − f_a to the stored one. None if {a, b} is
    /// not an edge.
    pub fn oriented(a: SubsetLabel, b: SubsetLabel) -> Option<(EdgeLabel, i32)> {
        if a.rank() != b.rank() || a == b {
            return None;
        }
        if a.rank() == 2 && (a.0 & b.0).count_ones() != 1 {
            return None;
        }
        Some(if a < b { (EdgeLabel { lo: a, hi: b }, 1) } else { (EdgeLabel { lo: b, hi: a }, -1) })
    }

    pub fn new(a: SubsetLabel, b: SubsetLabel) -> Option<EdgeLabel> {
        EdgeLabel::oriented(a, b).map(|(e, _)| e)
    }

    pub fn rank(self) -> usize {
        self.lo.rank()
    }

    pub fn index(self) -> usize {
        tables().edge_index[&self]
    }

    /// I ∪ J, which has rank k + 1 (the full set for k = 3).
    pub fn union_mask(self) -> u8 {
        self.lo.0 | self.hi.0
    }

    pub fn shares_vertex(self, o: EdgeLabel) -> bool {
        self.lo == o.lo || self.lo == o.hi || self.hi == o.lo || self.hi == o.hi
    }
}

impl fmt::Display for EdgeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.lo, self.hi)
    }
}

impl fmt::Debug for EdgeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{},{}}}", self.lo, self.hi)
    }
}

/// A face of dimension ≥ 2 of one of the hypersimplices.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum FaceLabel {
    /// The whole hypersimplex Δ_k.
    Maximal(usize),
    /// A triangle, vertices in increasing order.
    Triangle([SubsetLabel; 3]),
}

impl FaceLabel {
    pub fn triangle(a: SubsetLabel, b: SubsetLabel, c: SubsetLabel) -> FaceLabel {
        let mut v = [a, b, c];
        v.sort();
        FaceLabel::Triangle(v)
    }

    pub fn rank(&self) -> usize {
        match self {
            FaceLabel::Maximal(k) => *k,
            FaceLabel::Triangle(v) => v[0].rank(),
        }
    }

    pub fn vertices(&self) -> Vec<SubsetLabel> {
        match self {
            FaceLabel::Maximal(k) => SubsetLabel::of_rank(*k).collect(),
            FaceLabel::Triangle(v) => v.to_vec(),
        }
    }

    pub fn is_triangle(&self) -> bool {
        matches!(self, FaceLabel::Triangle(_))
    }

    /// Short identifier: "D2" or "T12_13_23".
    pub fn id(&self) -> String {
        match self {
            FaceLabel::Maximal(k) => format!("D{k}"),
            FaceLabel::Triangle(v) => format!("T{}_{}_{}", v[0], v[1], v[2]),
        }
    }

    pub fn index(&self) -> usize {
        tables().face_index[self]
    }

    /// Indices of ℰ(β), in increasing edge order.
    pub fn edges(&self) -> &'static [usize] {
        &tables().face_edges[self.index()]
    }
}

impl fmt::Display for FaceLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id())
    }
}

struct Tables {
    edges: Vec<EdgeLabel>,
    edge_index: HashMap<EdgeLabel, usize>,
    faces: Vec<FaceLabel>,
    face_index: HashMap<FaceLabel, usize>,
    face_edges: Vec<Vec<usize>>,
    pairs: Vec<(usize, usize)>,
    pair_index: HashMap<(usize, usize), usize>,
}

fn tables() -> &'static Tables {
    static T: OnceLock<Tables> = OnceLock::new();
    T.get_or_init(|| {
        let mut edges = Vec::new();
        for k in 1..=3 {
            let vs: Vec<SubsetLabel> = SubsetLabel::of_rank(k).collect();
            for (i, &a) in vs.iter().enumerate() {
                for &b in &vs[i + 1..] {
                    if let Some(e) = EdgeLabel::new(a, b) {
                        edges.push(e);
                    }
                }
            }
        }
        let edge_index: HashMap<EdgeLabel, usize> = edges.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        let mut faces: Vec<FaceLabel> = (1..=3).map(FaceLabel::Maximal).collect();
        for k in 1..=3 {
            let vs: Vec<SubsetLabel> = SubsetLabel::of_rank(k).collect();
            for i in 0..vs.len() {
                for j in i + 1..vs.len() {
                    for l in j + 1..vs.len() {
                        let (a, b, c) = (vs[i], vs[j], vs[l]);
                        if EdgeLabel::new(a, b).is_some()
                            && EdgeLabel::new(a, c).is_some()
                            && EdgeLabel::new(b, c).is_some()
                        {
                            faces.push(FaceLabel::triangle(a, b, c));
                        }
                    }
                }
            }
        }
        let face_index = faces.iter().enumerate().map(|(i, &f)| (f, i)).collect();
        let face_edges: Vec<Vec<usize>> = faces
            .iter()
            .map(|f| {
                let vs = f.vertices();
                (0..edges.len()).filter(|&e| vs.contains(&edges[e].lo) && vs.contains(&edges[e].hi)).collect()
            })
            .collect();
        let mut pairs = Vec::new();
        for (fi, es) in face_edges.iter().enumerate() {
            for &e in es {
                pairs.push((e, fi));
            }
        }
        let pair_index = pairs.iter().enumerate().map(|(i, &p)| (p, i)).collect();
        Tables { edges, edge_index, faces, face_index, face_edges, pairs, pair_index }
    })
}

/// The 24 canonical edges sorted by (rank, lo, hi).
pub fn all_edges() -> &'static [EdgeLabel] {
    &tables().edges
}

/// Δ₁, Δ₂, Δ₃ followed by the 16 triangles (by rank, then lexicographically).
pub fn all_faces() -> &'static [FaceLabel] {
    &tables().faces
}

pub fn edge(i: usize) -> EdgeLabel {
    tables().edges[i]
}

pub fn face(i: usize) -> FaceLabel {
    tables().faces[i]
}

/// Index of the maximal face Δ_k.
pub fn maximal_face(k: usize) -> usize {
    k - 1
}

/// The (α, β) incidence pairs, grouped by face: index → (edge, face).
pub fn pair(i: usize) -> (usize, usize) {
    tables().pairs[i]
}

pub fn all_pairs() -> &'static [(usize, usize)] {
    &tables().pairs
}

pub fn pair_index(edge: usize, face: usize) -> Option<usize> {
    tables().pair_index.get(&(edge, face)).copied()
}

/// Faces whose edge set contains all the given edges.
pub fn faces_containing(edges: &[usize]) -> Vec<usize> {
    (0..NUM_FACES).filter(|&f| edges.iter().all(|e| tables().face_edges[f].contains(e))).collect()
}

/// Pair indices belonging to face f.
pub fn face_pairs(f: usize) -> Vec<usize> {
    face(f).edges().iter().map(|&e| pair_index(e, f).unwrap()).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CombError {
    #[error("face {0} is not a triangle")]
    NotATriangle(String),
}

/// A triangle I < J < K with its edges in the order (JK, IK, IJ).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct OrderedTriangle {
    pub face: usize,
    pub vertices: [SubsetLabel; 3],
    pub edges: [usize; 3],
}

pub fn ordered_triangle(face_idx: usize) -> Result<OrderedTriangle, CombError> {
    let f = face(face_idx);
    let FaceLabel::Triangle([i, j, k]) = f else {
        return Err(CombError::NotATriangle(f.id()));
    };
    let e = |a, b| EdgeLabel::new(a, b).unwrap().index();
    Ok(OrderedTriangle { face: face_idx, vertices: [i, j, k], edges: [e(j, k), e(i, k), e(i, j)] })
}

/// All 16 ordered triangles.
pub fn ordered_triangles() -> Vec<OrderedTriangle> {
    (0..NUM_FACES).filter_map(|f| ordered_triangle(f).ok()).collect()
}

/// An ordered triangle viewed inside a face β that contains its edges: a
/// triangular subgraph of Γ.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TriangleInFace {
    pub tri: OrderedTriangle,
    pub host: usize,
}

impl TriangleInFace {
    /// Pair indices of the three (edge, host) coordinates, in triangle order.
    pub fn pairs(&self) -> [usize; 3] {
        self.tri.edges.map(|e| pair_index(e, self.host).unwrap())
    }
}

/// The 32 triangular subgraphs: each triangle in its own face and in the
/// maximal face of its rank.
pub fn triangles_in_faces() -> Vec<TriangleInFace> {
    let mut out = Vec::new();
    for tri in ordered_triangles() {
        for host in faces_containing(&tri.edges) {
            out.push(TriangleInFace { tri, host });
        }
    }
    out
}

/// A triangle related to a given one, with the edge correspondence:
/// position p of the given triangle corresponds to position `map[p].0` of
/// `other`, and the value triples satisfy y[p] ∝ map[p].1 · y_other[map[p].0].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RelatedPair {
    pub other: TriangleInFace,
    pub map: [(usize, i32); 3],
    pub rotated: bool,
}

/// The 180°-rotated partner of a triangle in the adjacent hypersimplex.
///
/// An oriented edge (A, B) with third vertex C goes to (A ∪ C, B ∪ C) when
/// moving up a rank and to (A ∩ C, B ∩ C) when moving down. Triangles of Δ₂
/// whose vertices share an element pair with Δ₃, the others with Δ₁.
fn rotated_partner(tri: &OrderedTriangle) -> (OrderedTriangle, [(usize, i32); 3]) {
    let [a, b, c] = tri.vertices;
    let common = a.0 & b.0 & c.0;
    let up = tri.vertices[0].rank() == 1 || (tri.vertices[0].rank() == 2 && common != 0);
    let mv = |x: SubsetLabel, third: SubsetLabel| SubsetLabel(if up { x.0 | third.0 } else { x.0 & third.0 });
    let mut images = [(SubsetLabel(1), SubsetLabel(1)); 3];
    // Edge positions: 0 = JK (third I), 1 = IK (third J), 2 = IJ (third K).
    let pos = [(b, c, a), (a, c, b), (a, b, c)];
    for (p, &(x, y, z)) in pos.iter().enumerate() {
        images[p] = (mv(x, z), mv(y, z));
    }
    let mut verts: Vec<SubsetLabel> = images.iter().flat_map(|&(x, y)| [x, y]).collect();
    verts.sort();
    verts.dedup();
    let f = FaceLabel::triangle(verts[0], verts[1], verts[2]);
    let other = ordered_triangle(f.index()).unwrap();
    let mut map = [(0, 1); 3];
    for (p, &(x, y)) in images.iter().enumerate() {
        let (e, s) = EdgeLabel::oriented(x, y).unwrap();
        let q = other.edges.iter().position(|&oe| oe == e.index()).unwrap();
        map[p] = (q, s);
    }
    (other, map)
}

/// All triangles related to `t`: the same ordered triangle in its other host
/// face, and the rotated triangle in each of its hosts.
pub fn related_pairs(t: &TriangleInFace) -> Vec<RelatedPair> {
    let mut out = Vec::new();
    for host in faces_containing(&t.tri.edges) {
        if host != t.host {
            out.push(RelatedPair {
                other: TriangleInFace { tri: t.tri, host },
                map: [(0, 1), (1, 1), (2, 1)],
                rotated: false,
            });
        }
    }
    let (rot, map) = rotated_partner(&t.tri);
    for host in faces_containing(&rot.edges) {
        out.push(RelatedPair { other: TriangleInFace { tri: rot, host }, map, rotated: true });
    }
    out
}

/// An element of S₄ × {1, duality}. `perm[i]` is the image of i + 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SymmetryElement {
    pub perm: [u8; 4],
    pub dualize: bool,
}

impl SymmetryElement {
    pub fn identity() -> SymmetryElement {
        SymmetryElement { perm: [1, 2, 3, 4], dualize: false }
    }

    pub fn permutation(perm: [u8; 4]) -> SymmetryElement {
        SymmetryElement { perm, dualize: false }
    }

    pub fn duality() -> SymmetryElement {
        SymmetryElement { perm: [1, 2, 3, 4], dualize: true }
    }

    /// All 48 elements; the first 24 are the permutations.
    pub fn all() -> Vec<SymmetryElement> {
        let mut perms = Vec::new();
        for a in 1..=4u8 {
            for b in 1..=4u8 {
                for c in 1..=4u8 {
                    for d in 1..=4u8 {
                        let p = [a, b, c, d];
                        if (1..=4).all(|v| p.contains(&v)) {
                            perms.push(p);
                        }
                    }
                }
            }
        }
        let mut out: Vec<SymmetryElement> = perms.iter().map(|&p| SymmetryElement::permutation(p)).collect();
        out.extend(perms.iter().map(|&p| SymmetryElement { perm: p, dualize: true }));
        out
    }

    /// self ∘ other (apply other first). Permutations commute with duality.
    pub fn compose(&self, other: &SymmetryElement) -> SymmetryElement {
        let perm = other.perm.map(|o| self.perm[(o - 1) as usize]);
        SymmetryElement { perm, dualize: self.dualize ^ other.dualize }
    }

    pub fn inverse(&self) -> SymmetryElement {
        let mut perm = [0u8; 4];
        for i in 0..4 {
            perm[(self.perm[i] - 1) as usize] = i as u8 + 1;
        }
        SymmetryElement { perm, dualize: self.dualize }
    }

    pub fn subset(&self, s: SubsetLabel) -> SubsetLabel {
        let mut m = 0u8;
        for i in s.members() {
            m |= 1 << (self.perm[(i - 1) as usize] - 1);
        }
        let r = SubsetLabel(m);
        if self.dualize {
            r.complement()
        } else {
            r
        }
    }

    /// Image of an edge and the orientation sign picked up.
    pub fn edge(&self, e: EdgeLabel) -> (EdgeLabel, i32) {
        EdgeLabel::oriented(self.subset(e.lo), self.subset(e.hi)).expect("symmetries preserve edges")
    }

    pub fn face(&self, f: FaceLabel) -> FaceLabel {
        match f {
            FaceLabel::Maximal(k) => FaceLabel::Maximal(if self.dualize { 4 - k } else { k }),
            FaceLabel::Triangle([a, b, c]) => FaceLabel::triangle(self.subset(a), self.subset(b), self.subset(c)),
        }
    }

    pub fn edge_index(&self, e: usize) -> (usize, i32) {
        let (img, s) = self.edge(edge(e));
        (img.index(), s)
    }

    pub fn face_index(&self, f: usize) -> usize {
        self.face(face(f)).index()
    }

    /// Image of an (edge, face) pair index with its sign.
    pub fn pair_index(&self, p: usize) -> (usize, i32) {
        let (e, f) = pair(p);
        let (e2, s) = self.edge_index(e);
        (pair_index(e2, self.face_index(f)).expect("symmetries preserve incidence"), s)
    }
}

impl fmt::Display for SymmetryElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}{}{}{}]", self.perm[0], self.perm[1], self.perm[2], self.perm[3])?;
        if self.dualize {
            write!(f, "*")?;
        }
        Ok(())
    }
}

/// Γ in DOT format: one cluster per face, nodes "<face>:<vertex>", edges
/// labelled "<face>:<lo>-<hi>".
pub fn gamma_dot() -> String {
    let mut s = String::from("graph Gamma {\n");
    for (fi, f) in all_faces().iter().enumerate() {
        let id = f.id();
        s.push_str(&format!("  subgraph cluster_{id} {{\n    label=\"{id}\";\n"));
        for v in f.vertices() {
            s.push_str(&format!("    \"{id}:{v}\";\n"));
        }
        for &e in face(fi).edges() {
            let e = edge(e);
            s.push_str(&format!("    \"{id}:{}\" -- \"{id}:{}\" [label=\"{id}:{}-{}\"];\n", e.lo, e.hi, e.lo, e.hi));
        }
        s.push_str("  }\n");
    }
    s.push_str("}\n");
    s
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct GammaFace {
    pub id: String,
    pub vertices: Vec<String>,
    pub edges: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct GammaJson {
    pub components: usize,
    pub nodes: usize,
    pub edges: usize,
    pub faces: Vec<GammaFace>,
}

pub fn gamma_json() -> GammaJson {
    let faces: Vec<GammaFace> = all_faces()
        .iter()
        .map(|f| GammaFace {
            id: f.id(),
            vertices: f.vertices().iter().map(|v| v.to_string()).collect(),
            edges: f.edges().iter().map(|&e| edge(e).to_string()).collect(),
        })
        .collect();
    GammaJson {
        components: gamma_components(),
        nodes: faces.iter().map(|f| f.vertices.len()).sum(),
        edges: faces.iter().map(|f| f.edges.len()).sum(),
        faces,
    }
}

/// Number of connected components of Γ, computed by union-find over the
/// (face, vertex) nodes.
pub fn gamma_components() -> usize {
    let mut nodes: HashMap<(usize, SubsetLabel), usize> = HashMap::new();
    for (fi, f) in all_faces().iter().enumerate() {
        for v in f.vertices() {
            let n = nodes.len();
            nodes.insert((fi, v), n);
        }
    }
    let mut parent: Vec<usize> = (0..nodes.len()).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    for &(e, f) in all_pairs() {
        let e = edge(e);
        let a = find(&mut parent, nodes[&(f, e.lo)]);
        let b = find(&mut parent, nodes[&(f, e.hi)]);
        parent[a] = b;
    }
    let n = parent.len();
    (0..n).filter(|&x| find(&mut parent, x) == x).count()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(x: &str) -> SubsetLabel {
        SubsetLabel::parse_lit(x)
    }

    #[test]
    fn total_order_matches_printed_list() {
        let names: Vec<String> = SubsetLabel::all().map(|s| s.to_string()).collect();
        assert_eq!(names, ["1", "2", "3", "4", "12", "13", "14", "23", "24", "34", "123", "124", "134", "234"]);
        assert!(s("4") < s("12"));
        assert!(s("34") < s("123"));
        assert_eq!(s("24").base(), s("12"));
    }

    #[test]
    fn edge_census() {
        let es = all_edges();
        assert_eq!(es.len(), 24);
        let by_rank: Vec<usize> = (1..=3).map(|k| es.iter().filter(|e| e.rank() == k).count()).collect();
        assert_eq!(by_rank, [6, 12, 6]);
        assert!(EdgeLabel::new(s("12"), s("34")).is_none());
        assert!(es.contains(&EdgeLabel::new(s("12"), s("13")).unwrap()));
        let mut sorted = es.to_vec();
        sorted.sort_by_key(|e| (e.rank(), e.lo, e.hi));
        assert_eq!(sorted, es);
    }

    #[test]
    fn face_census() {
        let fs = all_faces();
        assert_eq!(fs.len(), 19);
        assert_eq!(fs.iter().filter(|f| f.is_triangle()).count(), 16);
        let tri_by_rank: Vec<usize> =
            (1..=3).map(|k| fs.iter().filter(|f| f.is_triangle() && f.rank() == k).count()).collect();
        assert_eq!(tri_by_rank, [4, 8, 4]);
        let max_sizes: Vec<usize> = (0..3).map(|i| face(i).edges().len()).collect();
        assert_eq!(max_sizes, [6, 12, 6]);
        assert_eq!(all_pairs().len(), 72);
        assert_eq!(gamma_components(), 19);
        let t = FaceLabel::triangle(s("12"), s("13"), s("23"));
        let es: Vec<String> = t.edges().iter().map(|&e| format!("{:?}", edge(e))).collect();
        assert_eq!(es, ["{12,13}", "{12,23}", "{13,23}"]);
    }

    #[test]
    fn ordered_triangles_follow_total_order() {
        let t = ordered_triangle(FaceLabel::triangle(s("12"), s("13"), s("23")).index()).unwrap();
        let es: Vec<String> = t.edges.iter().map(|&e| format!("{:?}", edge(e))).collect();
        assert_eq!(es, ["{13,23}", "{12,23}", "{12,13}"]);
        let t = ordered_triangle(FaceLabel::triangle(s("123"), s("124"), s("134")).index()).unwrap();
        let es: Vec<String> = t.edges.iter().map(|&e| format!("{:?}", edge(e))).collect();
        assert_eq!(es, ["{124,134}", "{123,134}", "{123,124}"]);
        assert!(ordered_triangle(0).is_err());
    }

    #[test]
    fn related_pairs_are_symmetric() {
        let tifs = triangles_in_faces();
        assert_eq!(tifs.len(), 32);
        for t in &tifs {
            let rel = related_pairs(t);
            assert_eq!(rel.len(), 3);
            for r in &rel {
                let back = related_pairs(&r.other);
                let b = back.iter().find(|b| b.other == *t).expect("symmetric");
                for p in 0..3 {
                    let (q, s1) = r.map[p];
                    assert_eq!(b.map[q], (p, s1));
                }
            }
        }
    }

    #[test]
    fn rotated_partner_of_lower_triangle() {
        let t = TriangleInFace {
            tri: ordered_triangle(FaceLabel::triangle(s("1"), s("2"), s("3")).index()).unwrap(),
            host: 0,
        };
        let rel = related_pairs(&t);
        let rot: Vec<_> = rel.iter().filter(|r| r.rotated).collect();
        assert_eq!(rot.len(), 2);
        assert_eq!(rot[0].other.tri.vertices, [s("12"), s("13"), s("23")]);
        // {1,2} goes to {13,23}, {2,3} to {12,13}: the quadric pattern.
        let e12 = EdgeLabel::new(s("1"), s("2")).unwrap().index();
        let p12 = t.tri.edges.iter().position(|&e| e == e12).unwrap();
        let (q, sign) = rot[0].map[p12];
        assert_eq!(edge(rot[0].other.tri.edges[q]), EdgeLabel::new(s("13"), s("23")).unwrap());
        assert_eq!(sign, 1);
    }

    #[test]
    fn symmetry_action() {
        let id = SymmetryElement::identity();
        let e13 = EdgeLabel::new(s("1"), s("3")).unwrap();
        assert_eq!(id.edge(e13), (e13, 1));
        let swap = SymmetryElement::permutation([2, 1, 3, 4]);
        assert_eq!(swap.edge(e13).0, EdgeLabel::new(s("2"), s("3")).unwrap());
        assert_eq!(SymmetryElement::duality().face(FaceLabel::Maximal(1)), FaceLabel::Maximal(3));
        let all = SymmetryElement::all();
        assert_eq!(all.len(), 48);
        for g in &all {
            for h in &all {
                for x in SubsetLabel::all() {
                    assert_eq!(g.compose(h).subset(x), g.subset(h.subset(x)));
                }
            }
            for x in SubsetLabel::all() {
                assert_eq!(g.inverse().subset(g.subset(x)), x);
            }
        }
    }

    #[test]
    fn related_pairs_closed_under_symmetry() {
        let tifs = triangles_in_faces();
        for g in SymmetryElement::all() {
            for t in &tifs {
                for r in related_pairs(t) {
                    let img = |x: &TriangleInFace| {
                        let f = g.face_index(x.tri.face);
                        (f, g.face_index(x.host))
                    };
                    let (tf, th) = img(t);
                    let (of, oh) = img(&r.other);
                    let t2 = tifs.iter().find(|x| x.tri.face == tf && x.host == th).unwrap();
                    assert!(related_pairs(t2).iter().any(|r2| r2.other.tri.face == of && r2.other.host == oh));
                }
            }
        }
    }

    #[test]
    fn dot_export_is_stable() {
        let d = gamma_dot();
        assert_eq!(d.matches("subgraph").count(), 19);
        assert_eq!(d.matches(" -- ").count(), 72);
        assert_eq!(d, gamma_dot());
        let j = gamma_json();
        assert_eq!((j.components, j.edges, j.nodes), (19, 72, 62));
    }
}
