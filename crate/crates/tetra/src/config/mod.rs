//! Configurations of 14 subspaces near the flag at infinity.
//!
//! A point of the space of tetrahedra is stored as raw Plücker vectors, one
//! per proper subset I of {1,2,3,4}. Rank-k vectors use the natural basis of
//! ⋀^k ℚ⁴ indexed by k-subsets of rows in lexicographic order, so entry
//! `J.lex_index()` is the k×k minor on rows J.
//!
//! The chart of the flag E₄ ⊂ E₃₄ ⊂ E₂₃₄ is the set of configurations in which
//! every π_I meets the flag subspace of complementary dimension trivially.
//! For a line that means p₁ ≠ 0, for a plane p₁₂ ≠ 0 and for a 3-space
//! p₁₂₃ ≠ 0: exactly then π_I has a basis in the row-reduced forms
//! (1,*,*,*), (0,1,*,*), (0,0,1,*) from which the sections s_I are read off.

pub mod degenerate;

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{QMatrix, Rat};
use crate::combinatorics::{all_edges, EdgeLabel, SubsetLabel, SymmetryElement, FULL_MASK, NUM_EDGES, NUM_SUBSETS};

pub use degenerate::{
    degenerate_and_limit, degenerate_framed, search_target_split, ConfigCurve, Degeneration, FoundDegeneration,
    OneParamWeights, SplitType,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConfigError {
    #[error("matrix is singular")]
    Singular,
    #[error("not in general position: normalization coordinate of {0} vanishes")]
    NotGeneralPosition(SubsetLabel),
    #[error("Plücker vector of {0} has wrong length or is zero")]
    BadVector(SubsetLabel),
    #[error("Plücker vector of {0} is not decomposable")]
    NotDecomposable(SubsetLabel),
    #[error("incidence fails: {0} not contained in {1}")]
    Incidence(SubsetLabel, SubsetLabel),
    #[error("section identity fails on edge {0}")]
    SectionIdentity(EdgeLabel),
    #[error("edge coordinates violate {0} chart relations")]
    Inconsistent(usize),
    #[error("sampling aborted after {0} rejections")]
    TooManyRejections(u64),
}

/// Length of a rank-k Plücker vector in ℚ⁴.
pub fn plucker_len(k: usize) -> usize {
    [1, 4, 6, 4, 1][k]
}

/// Lexicographic k-subsets of {0,1,2,3}.
fn row_subsets(k: usize) -> Vec<Vec<usize>> {
    SubsetLabel::of_rank(k).map(|s| s.members().iter().map(|&i| (i - 1) as usize).collect()).collect()
}

fn det_small(m: &[Vec<Rat>]) -> Rat {
    match m.len() {
        1 => m[0][0].clone(),
        2 => &m[0][0] * &m[1][1] - &m[0][1] * &m[1][0],
        3 => {
            let mut acc = Rat::zero();
            for c in 0..3 {
                let minor: Vec<Vec<Rat>> = m[1..]
                    .iter()
                    .map(|row| row.iter().enumerate().filter(|&(j, _)| j != c).map(|(_, v)| v.clone()).collect())
                    .collect();
                let t = &m[0][c] * det_small(&minor);
                if c % 2 == 0 {
                    acc += t;
                } else {
                    acc -= t;
                }
            }
            acc
        }
        _ => QMatrix::from_rows(m.len(), m.to_vec()).det(),
    }
}

/// Plücker vector of the span of the given column vectors.
pub fn plucker_of_columns(cols: &[Vec<Rat>]) -> Vec<Rat> {
    let k = cols.len();
    row_subsets(k)
        .iter()
        .map(|rows| {
            let m: Vec<Vec<Rat>> = rows.iter().map(|&r| cols.iter().map(|c| c[r].clone()).collect()).collect();
            det_small(&m)
        })
        .collect()
}

/// The k-th compound matrix: entry (K, J) is the minor of `a` on rows K and
/// columns J. It maps Plücker vectors of π to Plücker vectors of a·π.
pub fn compound(a: &QMatrix, k: usize) -> QMatrix {
    let subs = row_subsets(k);
    QMatrix::from_rows(
        subs.len(),
        subs.iter()
            .map(|rows| {
                subs.iter()
                    .map(|cols| {
                        let m: Vec<Vec<Rat>> =
                            rows.iter().map(|&r| cols.iter().map(|&c| a.get(r, c).clone()).collect()).collect();
                        det_small(&m)
                    })
                    .collect()
            })
            .collect(),
    )
}

/// Matrix of v ↦ v ∧ p for a rank-k Plücker vector p; its kernel is the
/// subspace when p is decomposable.
fn wedge_matrix(p: &[Rat], k: usize) -> QMatrix {
    let lower = row_subsets(k);
    let upper = if k == 3 { vec![vec![0, 1, 2, 3]] } else { row_subsets(k + 1) };
    let rows: Vec<Vec<Rat>> = upper
        .iter()
        .map(|s| {
            let mut row = vec![Rat::zero(); 4];
            for (m, &sm) in s.iter().enumerate() {
                let rest: Vec<usize> = s.iter().copied().filter(|&x| x != sm).collect();
                let idx = lower.iter().position(|l| *l == rest).unwrap();
                let v = p[idx].clone();
                row[sm] = if m % 2 == 0 { v } else { -v };
            }
            row
        })
        .collect();
    QMatrix::from_rows(4, rows)
}

/// A basis of the subspace with Plücker vector p.
pub fn subspace_basis(p: &[Rat], k: usize) -> Vec<Vec<Rat>> {
    if k == 4 {
        return (0..4).map(|i| (0..4).map(|j| if i == j { Rat::one() } else { Rat::zero() }).collect()).collect();
    }
    wedge_matrix(p, k).rank_and_kernel().1
}

/// Projective equality of two vectors: all 2×2 minors vanish.
pub fn proj_eq(a: &[Rat], b: &[Rat]) -> bool {
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            if &a[i] * &b[j] != &a[j] * &b[i] {
                return false;
            }
        }
    }
    true
}

/// A point of the space of tetrahedra as 14 raw Plücker vectors, indexed by
/// subset position in the total order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TetraConfig {
    pub plueckers: Vec<Vec<Rat>>,
}

#[derive(Serialize, Deserialize)]
struct ConfigJson {
    plueckers: BTreeMap<String, Vec<Rat>>,
}

impl Serialize for TetraConfig {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let plueckers = SubsetLabel::all().map(|i| (i.to_string(), self.plueckers[i.index()].clone())).collect();
        ConfigJson { plueckers }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for TetraConfig {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<TetraConfig, D::Error> {
        use serde::de::Error;
        let j = ConfigJson::deserialize(d)?;
        let mut pl = vec![Vec::new(); NUM_SUBSETS];
        for (k, v) in j.plueckers {
            let s: SubsetLabel = k.parse().map_err(D::Error::custom)?;
            pl[s.index()] = v;
        }
        let c = TetraConfig { plueckers: pl };
        c.check_shape().map_err(D::Error::custom)?;
        Ok(c)
    }
}

impl TetraConfig {
    pub fn pl(&self, s: SubsetLabel) -> &[Rat] {
        &self.plueckers[s.index()]
    }

    fn check_shape(&self) -> Result<(), ConfigError> {
        for s in SubsetLabel::all() {
            let v = self.pl(s);
            if v.len() != plucker_len(s.rank()) || v.iter().all(Rat::is_zero) {
                return Err(ConfigError::BadVector(s));
            }
        }
        Ok(())
    }

    /// Shape, decomposability and incidence π_I ⊆ π_J for I ⊂ J.
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.check_shape()?;
        let bases: Vec<Vec<Vec<Rat>>> = SubsetLabel::all().map(|s| subspace_basis(self.pl(s), s.rank())).collect();
        for s in SubsetLabel::all() {
            if bases[s.index()].len() != s.rank() {
                return Err(ConfigError::NotDecomposable(s));
            }
        }
        for a in SubsetLabel::all() {
            for b in SubsetLabel::all() {
                if a.rank() < b.rank() && a.mask() & b.mask() == a.mask() {
                    let mut rows = bases[b.index()].clone();
                    rows.extend(bases[a.index()].iter().cloned());
                    if QMatrix::from_rows(4, rows).rank() != b.rank() {
                        return Err(ConfigError::Incidence(a, b));
                    }
                }
            }
        }
        Ok(())
    }

    /// Basis of π_I.
    pub fn basis(&self, s: SubsetLabel) -> Vec<Vec<Rat>> {
        subspace_basis(self.pl(s), s.rank())
    }

    /// Relabeling by σ: π_I(σ·p) = π_{σ⁻¹(I)}(p). Duality is not a relabeling
    /// and is rejected.
    pub fn relabel(&self, g: &SymmetryElement) -> TetraConfig {
        assert!(!g.dualize, "relabel takes a permutation");
        let inv = g.inverse();
        TetraConfig { plueckers: SubsetLabel::all().map(|s| self.pl(inv.subset(s)).to_vec()).collect() }
    }

    /// Pushes every subspace forward by the matrix a.
    pub fn transform(&self, a: &QMatrix) -> TetraConfig {
        let comp: Vec<QMatrix> = (1..=3).map(|k| compound(a, k)).collect();
        TetraConfig { plueckers: SubsetLabel::all().map(|s| comp[s.rank() - 1].mul_vec(self.pl(s))).collect() }
    }

    /// Multiplies the Plücker vector of one subspace by a nonzero scalar.
    pub fn rescaled(&self, s: SubsetLabel, c: &Rat) -> TetraConfig {
        let mut out = self.clone();
        for v in out.plueckers[s.index()].iter_mut() {
            *v *= c;
        }
        out
    }
}

/// π_I = span{g·e_i : i ∈ I}.
pub fn config_from_matrix(g: &QMatrix) -> Result<TetraConfig, ConfigError> {
    assert_eq!((g.rows(), g.cols()), (4, 4));
    if g.det().is_zero() {
        return Err(ConfigError::Singular);
    }
    let cols: Vec<Vec<Rat>> = (0..4).map(|c| g.column(c)).collect();
    let plueckers = SubsetLabel::all()
        .map(|s| {
            let cs: Vec<Vec<Rat>> = s.members().iter().map(|&i| cols[(i - 1) as usize].clone()).collect();
            plucker_of_columns(&cs)
        })
        .collect();
    Ok(TetraConfig { plueckers })
}

/// The base configuration p₀ of coordinate subspaces.
pub fn base_config() -> TetraConfig {
    config_from_matrix(&QMatrix::identity(4)).unwrap()
}

/// First subset whose normalization coordinate (index of I₀ = first in lex
/// order) vanishes.
pub fn general_position_failure(c: &TetraConfig) -> Option<SubsetLabel> {
    SubsetLabel::all().find(|&s| c.pl(s)[0].is_zero())
}

pub fn is_general_position(c: &TetraConfig) -> bool {
    general_position_failure(c).is_none()
}

/// The edge-coordinate key subset K: 2, 13 or 124 by rank.
pub fn key_subset(k: usize) -> SubsetLabel {
    SubsetLabel::parse_lit(["2", "13", "124"][k - 1])
}

/// Normalized chart data of a general-position configuration.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalizedChart {
    /// f[I][J.lex_index()] = f_{I,J} for |J| = |I|.
    pub f: Vec<Vec<Rat>>,
    /// f_{1,2}, f_{1,3}, f_{1,4}, f_{12,13}, f_{12,14}, f_{123,124}.
    pub flag: Vec<Rat>,
    /// Edge coordinates in edge order.
    pub x: Vec<Rat>,
}

impl NormalizedChart {
    pub fn f(&self, i: SubsetLabel, j: SubsetLabel) -> &Rat {
        assert_eq!(i.rank(), j.rank());
        &self.f[i.index()][j.lex_index()]
    }

    /// Section s_I in the row-reduced form read off from f; s_1234 = e₄.
    pub fn section(&self, mask: u8) -> Vec<Rat> {
        if mask == FULL_MASK {
            return vec![Rat::zero(), Rat::zero(), Rat::zero(), Rat::one()];
        }
        let s = SubsetLabel::from_mask(mask).unwrap();
        let f = |j: &str| self.f(s, SubsetLabel::parse_lit(j)).clone();
        match s.rank() {
            1 => vec![Rat::one(), f("2"), f("3"), f("4")],
            2 => vec![Rat::zero(), Rat::one(), f("13"), f("14")],
            _ => vec![Rat::zero(), Rat::zero(), Rat::one(), f("124")],
        }
    }

    /// s_J − s_I − x_α s_{I∪J} for each edge.
    pub fn section_residuals(&self) -> Vec<Vec<Rat>> {
        all_edges()
            .iter()
            .enumerate()
            .map(|(a, e)| {
                let si = self.section(e.lo.mask());
                let sj = self.section(e.hi.mask());
                let su = self.section(e.union_mask());
                (0..4).map(|r| &sj[r] - &si[r] - &self.x[a] * &su[r]).collect()
            })
            .collect()
    }
}

fn chart_from_f(f: Vec<Vec<Rat>>) -> NormalizedChart {
    let get = |i: &str, j: &str| {
        let (i, j) = (SubsetLabel::parse_lit(i), SubsetLabel::parse_lit(j));
        f[i.index()][j.lex_index()].clone()
    };
    let flag = vec![get("1", "2"), get("1", "3"), get("1", "4"), get("12", "13"), get("12", "14"), get("123", "124")];
    let x = all_edges()
        .iter()
        .map(|e| {
            let k = key_subset(e.rank()).lex_index();
            &f[e.hi.index()][k] - &f[e.lo.index()][k]
        })
        .collect();
    NormalizedChart { f, flag, x }
}

/// f_{I,J} = p_J / p_{J₀}, flag and edge coordinates; checks the section
/// identity s_J − s_I = x_α s_{I∪J} on every edge.
pub fn normalize(c: &TetraConfig) -> Result<NormalizedChart, ConfigError> {
    if let Some(s) = general_position_failure(c) {
        return Err(ConfigError::NotGeneralPosition(s));
    }
    let f: Vec<Vec<Rat>> = SubsetLabel::all()
        .map(|s| {
            let p = c.pl(s);
            let inv = p[0].recip();
            p.iter().map(|v| v * &inv).collect()
        })
        .collect();
    let chart = chart_from_f(f);
    for (a, r) in chart.section_residuals().iter().enumerate() {
        if r.iter().any(|v| !v.is_zero()) {
            return Err(ConfigError::SectionIdentity(all_edges()[a]));
        }
    }
    Ok(chart)
}

/// Order in which reconstruction introduces new sections.
pub const RECONSTRUCTION_ORDER: [&str; 14] =
    ["1", "12", "123", "2", "13", "3", "23", "124", "14", "4", "24", "134", "34", "234"];

/// Rebuilds the chart from flag and edge coordinates.
///
/// Starting from s₁, s₁₂, s₁₂₃ (given by the flag) and s₁₂₃₄ = e₄, each new
/// s_J in the reconstruction order is s_I + x_{I,J} s_{I∪J} for the first
/// already known I adjacent to J with s_{I∪J} known. Each π_I is then the
/// span of the sections along the chain of prefixes of I.
pub fn reconstruct_chart(flag: &[Rat], x: &[Rat]) -> Result<NormalizedChart, ConfigError> {
    assert_eq!(flag.len(), 6);
    assert_eq!(x.len(), NUM_EDGES);
    let bad = crate::relations::u_relations()
        .iter()
        .filter(|r| {
            !r.poly
                .evaluate(&|v| match v {
                    crate::algebra::Var::Edge(e) => Some(x[e as usize].clone()),
                    _ => None,
                })
                .expect("U relations only use edge variables")
                .is_zero()
        })
        .count();
    if bad > 0 {
        return Err(ConfigError::Inconsistent(bad));
    }
    let sections = reconstruct_sections(flag, x);
    let f = SubsetLabel::all()
        .map(|s| {
            let p = plucker_of_columns(&prefix_chain(s).iter().map(|&m| sections[&m].clone()).collect::<Vec<_>>());
            let inv = p[0].recip();
            p.iter().map(|v| v * &inv).collect()
        })
        .collect();
    Ok(chart_from_f(f))
}

/// Masks of the prefixes i₁, i₁i₂, ... of I (members in increasing order).
fn prefix_chain(s: SubsetLabel) -> Vec<u8> {
    let mut m = 0u8;
    s.members()
        .iter()
        .map(|&i| {
            m |= 1 << (i - 1);
            m
        })
        .collect()
}

/// Sections s_I for all I (plus the full set) from flag and edge data.
pub fn reconstruct_sections(flag: &[Rat], x: &[Rat]) -> BTreeMap<u8, Vec<Rat>> {
    let z = Rat::zero;
    let o = Rat::one;
    let mut s: BTreeMap<u8, Vec<Rat>> = BTreeMap::new();
    s.insert(0b0001, vec![o(), flag[0].clone(), flag[1].clone(), flag[2].clone()]);
    s.insert(0b0011, vec![z(), o(), flag[3].clone(), flag[4].clone()]);
    s.insert(0b0111, vec![z(), z(), o(), flag[5].clone()]);
    s.insert(FULL_MASK, vec![z(), z(), z(), o()]);
    for name in &RECONSTRUCTION_ORDER[3..] {
        let j = SubsetLabel::parse_lit(name);
        let known: Vec<SubsetLabel> = SubsetLabel::of_rank(j.rank()).filter(|i| s.contains_key(&i.mask())).collect();
        let (i, (e, sign)) = known
            .iter()
            .find_map(|&i| {
                let ie = EdgeLabel::oriented(i, j)?;
                s.contains_key(&(i.mask() | j.mask())).then_some((i, ie))
            })
            .expect("reconstruction order always has a predecessor");
        let xv = Rat::from(sign as i64) * &x[e.index()];
        let si = &s[&i.mask()];
        let su = &s[&(i.mask() | j.mask())];
        let sj: Vec<Rat> = (0..4).map(|r| &si[r] + &xv * &su[r]).collect();
        s.insert(j.mask(), sj);
    }
    s
}

/// Configuration spanned by the reconstructed sections; used to turn core
/// data (flag = 0, x = maximal-face values) into subspaces.
pub fn config_from_sections(flag: &[Rat], x: &[Rat]) -> TetraConfig {
    let sections = reconstruct_sections(flag, x);
    TetraConfig {
        plueckers: SubsetLabel::all()
            .map(|s| plucker_of_columns(&prefix_chain(s).iter().map(|&m| sections[&m].clone()).collect::<Vec<_>>()))
            .collect(),
    }
}

/// Blocks of equal subspaces among those of rank k, in order of first
/// appearance.
pub fn split_blocks(c: &TetraConfig, k: usize) -> Vec<Vec<SubsetLabel>> {
    let mut blocks: Vec<Vec<SubsetLabel>> = Vec::new();
    for s in SubsetLabel::of_rank(k) {
        match blocks.iter_mut().find(|b| proj_eq(c.pl(b[0]), c.pl(s))) {
            Some(b) => b.push(s),
            None => blocks.push(vec![s]),
        }
    }
    blocks
}

/// Number of distinct k-planes.
pub fn n_k(c: &TetraConfig, k: usize) -> usize {
    split_blocks(c, k).len()
}

/// Result of seeded sampling.
#[derive(Clone, Debug)]
pub struct Sample {
    pub configs: Vec<TetraConfig>,
    /// Draws rejected as singular or not in general position.
    pub rejections: u64,
    /// Draws rejected because some edge coordinate vanished.
    pub zero_edge_rejections: u64,
}

pub const MAX_REJECTIONS: u64 = 1_000_000;

/// Draws a 4×4 integer matrix with entries uniform in [lo, hi], row-major.
pub fn random_matrix(rng: &mut ChaCha8Rng, lo: i64, hi: i64) -> QMatrix {
    QMatrix::from_i64(&(0..4).map(|_| (0..4).map(|_| rng.gen_range(lo..=hi)).collect()).collect::<Vec<_>>())
}

/// Deterministic general-position configurations with nonzero edge
/// coordinates.
///
/// PRNG: ChaCha8 seeded with `seed_from_u64(seed)`; each draw is a 4×4
/// matrix with entries `gen_range(-9..=9)` in row-major order. Draws that are
/// singular, not in general position, or have a zero edge coordinate are
/// rejected and counted.
pub fn sample_config(seed: u64, count: usize) -> Result<Sample, ConfigError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Sample { configs: Vec::with_capacity(count), rejections: 0, zero_edge_rejections: 0 };
    while out.configs.len() < count {
        if out.rejections + out.zero_edge_rejections >= MAX_REJECTIONS {
            return Err(ConfigError::TooManyRejections(out.rejections + out.zero_edge_rejections));
        }
        let g = random_matrix(&mut rng, -9, 9);
        let Ok(c) = config_from_matrix(&g) else {
            out.rejections += 1;
            continue;
        };
        let Ok(chart) = normalize(&c) else {
            out.rejections += 1;
            continue;
        };
        if chart.x.iter().any(Rat::is_zero) {
            out.zero_edge_rejections += 1;
            continue;
        }
        out.configs.push(c);
    }
    Ok(out)
}

/// Convenience: sampled configurations with their charts.
pub fn sample_charts(seed: u64, count: usize) -> Vec<NormalizedChart> {
    sample_config(seed, count).expect("sampling").configs.iter().map(|c| normalize(c).unwrap()).collect()
}
