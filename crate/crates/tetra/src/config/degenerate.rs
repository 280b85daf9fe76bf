//! One-parameter degenerations and their limits.
//!
//! The subgroup is μ(t) = A·diag(t^a₁, …, t^a₄)·A⁻¹ for a frame A; with
//! A = identity this is the plain diagonal subgroup, which multiplies the
//! Plücker coordinate of e_J by t^{Σ_{j∈J} a_j}.
//!
//! A diagonal subgroup alone never reaches a minimally split configuration
//! from inside the chart: the limit subspaces are then spanned by coordinate
//! vectors of the leading weights and always hit the flag at infinity. A
//! generic frame moves the limit back into the chart.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{
    compound, config_from_matrix, general_position_failure, key_subset, random_matrix, split_blocks, ConfigError,
    TetraConfig,
};
use crate::algebra::{leading_at_order, QMatrix, Rat, UniRat};
use crate::combinatorics::{all_edges, face, SubsetLabel, NUM_FACES, NUM_PAIRS};
use crate::core::CorePoint;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OneParamWeights(pub [i64; 4]);

impl OneParamWeights {
    /// Weight of the basis vector e_J of ⋀^k: the sum of a_j over j ∈ J.
    pub fn weight(&self, s: SubsetLabel) -> i64 {
        s.members().iter().map(|&j| self.0[(j - 1) as usize]).sum()
    }
}

impl FromStr for OneParamWeights {
    type Err = String;

    fn from_str(s: &str) -> Result<OneParamWeights, String> {
        let v: Vec<i64> = s
            .split(',')
            .map(|p| p.trim().parse::<i64>().map_err(|e| format!("bad weight {p:?}: {e}")))
            .collect::<Result<_, _>>()?;
        let a: [i64; 4] = v.try_into().map_err(|_| "expected four comma-separated weights".to_string())?;
        Ok(OneParamWeights(a))
    }
}

/// Plücker vectors depending on t.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigCurve {
    pub plueckers_t: Vec<Vec<UniRat>>,
}

impl ConfigCurve {
    /// The configuration at a nonzero parameter value, if no coordinate has a
    /// pole there.
    pub fn eval(&self, t: &Rat) -> Option<TetraConfig> {
        let plueckers = self
            .plueckers_t
            .iter()
            .map(|v| v.iter().map(|f| f.eval(t)).collect::<Option<Vec<Rat>>>())
            .collect::<Option<Vec<_>>>()?;
        Some(TetraConfig { plueckers })
    }

    /// Limit at t = 0, subspace by subspace.
    pub fn limit(&self) -> TetraConfig {
        TetraConfig {
            plueckers: self.plueckers_t.iter().map(|v| leading_at_order(v).expect("nonzero Plücker vector")).collect(),
        }
    }

    /// f_{I,J}(t) for all I and J of equal rank.
    pub fn f_t(&self) -> Vec<Vec<UniRat>> {
        self.plueckers_t
            .iter()
            .map(|v| {
                let base = &v[0];
                v.iter().map(|f| f.div(base)).collect()
            })
            .collect()
    }

    /// Edge coordinates x_α(t) in edge order.
    pub fn edge_coordinates(&self) -> Vec<UniRat> {
        let f = self.f_t();
        all_edges()
            .iter()
            .map(|e| {
                let k = key_subset(e.rank()).lex_index();
                f[e.hi.index()][k].sub(&f[e.lo.index()][k])
            })
            .collect()
    }
}

/// The curve t ↦ μ(t)·c in the given frame.
pub fn curve_through(c: &TetraConfig, w: &OneParamWeights, frame: &QMatrix) -> ConfigCurve {
    let inv = frame.inverse().expect("frame must be invertible");
    let plueckers_t = SubsetLabel::all()
        .map(|s| {
            let k = s.rank();
            let a = compound(frame, k);
            let q = compound(&inv, k).mul_vec(c.pl(s));
            let weighted: Vec<UniRat> =
                SubsetLabel::of_rank(k).zip(&q).map(|(j, v)| UniRat::monomial(v.clone(), w.weight(j))).collect();
            (0..a.rows())
                .map(|r| {
                    let mut acc = UniRat::zero();
                    for (cidx, f) in weighted.iter().enumerate() {
                        let m = a.get(r, cidx);
                        if !m.is_zero() && !f.is_zero() {
                            acc = acc.add(&f.scale(m));
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect();
    ConfigCurve { plueckers_t }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DegenError {
    #[error("seed configuration: {0}")]
    Seed(ConfigError),
    #[error("limit leaves the chart: normalization coordinate of {0} vanishes")]
    LimitNotGeneral(SubsetLabel),
    #[error("core coordinates of face {0} vanish identically along the curve")]
    ZeroFace(String),
    #[error("no weights found for split type {0} after {1} trials")]
    TargetNotFound(SplitType, usize),
}

/// A degeneration with its limit configuration and the limit of the core
/// coordinates.
#[derive(Clone, Debug)]
pub struct Degeneration {
    pub weights: OneParamWeights,
    pub frame: QMatrix,
    pub curve: ConfigCurve,
    pub limit: TetraConfig,
    pub core_limit: CorePoint,
}

impl Degeneration {
    pub fn n_k(&self) -> [usize; 3] {
        [1, 2, 3].map(|k| split_blocks(&self.limit, k).len())
    }

    /// Split in the sense n_k ≥ 2 for every k.
    pub fn is_split(&self) -> bool {
        self.n_k().iter().all(|&n| n >= 2)
    }

    pub fn is_minimally_split(&self) -> bool {
        self.n_k() == [2, 2, 2]
    }

    pub fn split_type(&self) -> SplitType {
        SplitType::of(&self.limit)
    }
}

pub fn degenerate_and_limit(c: &TetraConfig, w: &OneParamWeights) -> Result<Degeneration, DegenError> {
    degenerate_framed(c, w, &QMatrix::identity(4))
}

pub fn degenerate_framed(c: &TetraConfig, w: &OneParamWeights, frame: &QMatrix) -> Result<Degeneration, DegenError> {
    if let Some(s) = general_position_failure(c) {
        return Err(DegenError::Seed(ConfigError::NotGeneralPosition(s)));
    }
    let curve = curve_through(c, w, frame);
    let limit = curve.limit();
    if let Some(s) = general_position_failure(&limit) {
        return Err(DegenError::LimitNotGeneral(s));
    }
    let x = curve.edge_coordinates();
    let mut y = vec![Rat::zero(); NUM_PAIRS];
    for f in 0..NUM_FACES {
        let es = face(f).edges();
        let vals: Vec<UniRat> = es.iter().map(|&e| x[e].clone()).collect();
        let lead = leading_at_order(&vals).ok_or_else(|| DegenError::ZeroFace(face(f).id()))?;
        for (&e, v) in es.iter().zip(lead) {
            y[crate::combinatorics::pair_index(e, f).unwrap()] = v;
        }
    }
    let core_limit = CorePoint::from_values(y).expect("faces checked nonzero");
    Ok(Degeneration { weights: *w, frame: frame.clone(), curve, limit, core_limit })
}

/// Block sizes of the line, plane and 3-space splits, each sorted
/// decreasingly; written like "31,51,22".
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SplitType(pub [Vec<usize>; 3]);

impl SplitType {
    pub fn of(c: &TetraConfig) -> SplitType {
        SplitType([1, 2, 3].map(|k| {
            let mut v: Vec<usize> = split_blocks(c, k).iter().map(Vec::len).collect();
            v.sort_by(|a, b| b.cmp(a));
            v
        }))
    }

    /// Whether this is one of the six types realized by minimally split
    /// points: a (5,1) plane split with any line and 3-space splits, or a
    /// (4,2) or (3,3) plane split with (3,1) lines and 3-spaces. The special
    /// locus census finds nothing else (e.g. 22,42,22 would need n₂ = 3).
    pub fn is_realizable(&self) -> bool {
        let [l, p, h] = &self.0;
        let ok = |v: &Vec<usize>, opts: &[[usize; 2]]| opts.iter().any(|o| v.as_slice() == o);
        ok(l, &[[3, 1], [2, 2]])
            && ok(p, &[[5, 1], [4, 2], [3, 3]])
            && ok(h, &[[3, 1], [2, 2]])
            && (p.as_slice() == [5, 1] || (l.as_slice() == [3, 1] && h.as_slice() == [3, 1]))
    }
}

impl fmt::Display for SplitType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|v| v.iter().map(|n| n.to_string()).collect::<String>()).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl FromStr for SplitType {
    type Err = String;

    fn from_str(s: &str) -> Result<SplitType, String> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(format!("expected three split codes like 31,51,22, got {s:?}"));
        }
        let mut out: [Vec<usize>; 3] = Default::default();
        for (i, p) in parts.iter().enumerate() {
            let mut v: Vec<usize> = p
                .chars()
                .map(|c| c.to_digit(10).map(|d| d as usize).ok_or(format!("bad split code {p:?}")))
                .collect::<Result<_, _>>()?;
            v.sort_by(|a, b| b.cmp(a));
            let total: usize = v.iter().sum();
            if total != [4, 6, 4][i] || v.len() != 2 || v.contains(&0) {
                return Err(format!("split code {p:?} is not a two-block split of {}", [4, 6, 4][i]));
            }
            out[i] = v;
        }
        Ok(SplitType(out))
    }
}

/// A successful target-split search.
#[derive(Clone, Debug)]
pub struct FoundDegeneration {
    pub frame: QMatrix,
    /// Inner matrix B; the seed configuration is (frame·B)·p₀.
    pub inner: QMatrix,
    pub seed_config: TetraConfig,
    pub trials: usize,
    pub degeneration: Degeneration,
}

/// Fast limit of diag(t^a)·(B·p₀): per subspace, the coordinates of minimal
/// weight among the nonzero ones.
fn diagonal_limit(inner: &TetraConfig, w: &OneParamWeights) -> TetraConfig {
    TetraConfig {
        plueckers: SubsetLabel::all()
            .map(|s| {
                let p = inner.pl(s);
                let ws: Vec<i64> = SubsetLabel::of_rank(s.rank()).map(|j| w.weight(j)).collect();
                let m = p.iter().zip(&ws).filter(|(v, _)| !v.is_zero()).map(|(_, &wt)| wt).min().unwrap();
                p.iter().zip(&ws).map(|(v, &wt)| if wt == m { v.clone() } else { Rat::zero() }).collect()
            })
            .collect(),
    }
}

/// Searches seeded random (B, weights) for a degeneration whose limit has the
/// requested split type.
///
/// PRNG: ChaCha8 seeded with `seed`. The frame A is the first invertible draw
/// with entries in [−9, 9]; each trial then draws B with entries chosen from
/// {−1, 0, 0, 1, 1, 2} (row-major) and weights in [−3, 3]⁴.
pub fn search_target_split(seed: u64, target: &SplitType, max_trials: usize) -> Result<FoundDegeneration, DegenError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let frame = loop {
        let a = random_matrix(&mut rng, -9, 9);
        if !a.det().is_zero() {
            break a;
        }
    };
    let frame_c: Vec<QMatrix> = (1..=3).map(|k| compound(&frame, k)).collect();
    let choices: [i64; 6] = [-1, 0, 0, 1, 1, 2];
    for trial in 1..=max_trials {
        let b = QMatrix::from_i64(
            &(0..4).map(|_| (0..4).map(|_| *choices.choose(&mut rng).unwrap()).collect()).collect::<Vec<_>>(),
        );
        let w = OneParamWeights([0; 4].map(|_| rng.gen_range(-3..=3)));
        let Ok(inner) = config_from_matrix(&b) else {
            continue;
        };
        let lim = diagonal_limit(&inner, &w);
        let lim =
            TetraConfig { plueckers: SubsetLabel::all().map(|s| frame_c[s.rank() - 1].mul_vec(lim.pl(s))).collect() };
        if SplitType::of(&lim) != *target || general_position_failure(&lim).is_some() {
            continue;
        }
        let seed_config = inner.transform(&frame);
        if general_position_failure(&seed_config).is_some() {
            continue;
        }
        let degeneration = degenerate_framed(&seed_config, &w, &frame)?;
        debug_assert!(SubsetLabel::all().all(|s| super::proj_eq(degeneration.limit.pl(s), lim.pl(s))));
        return Ok(FoundDegeneration { frame, inner: b, seed_config, trials: trial, degeneration });
    }
    Err(DegenError::TargetNotFound(target.clone(), max_trials))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::qi;
    use crate::config::{normalize, sample_config};

    #[test]
    fn zero_weights_give_constant_curve() {
        let c = sample_config(1, 1).unwrap().configs.remove(0);
        let d = degenerate_and_limit(&c, &OneParamWeights([0; 4])).unwrap();
        for s in SubsetLabel::all() {
            assert!(crate::config::proj_eq(d.limit.pl(s), c.pl(s)));
        }
        let lift = crate::core::core_from_chart(&normalize(&c).unwrap()).unwrap();
        assert_eq!(d.core_limit, lift);
    }

    #[test]
    fn curve_evaluates_into_orbit() {
        let c = sample_config(2, 1).unwrap().configs.remove(0);
        let frame = QMatrix::from_i64(&[vec![2, 1, 0, 1], vec![0, 1, 3, -1], vec![1, 0, 1, 0], vec![-2, 1, 0, 1]]);
        let curve = curve_through(&c, &OneParamWeights([1, -2, 0, 3]), &frame);
        let x_t = curve.edge_coordinates();
        for t in [qi(2), qi(-3)] {
            let ct = curve.eval(&t).unwrap();
            ct.validate().unwrap();
            let ch = normalize(&ct).unwrap();
            for (a, f) in x_t.iter().enumerate() {
                assert_eq!(f.eval(&t).unwrap(), ch.x[a]);
            }
        }
        assert_eq!(curve.eval(&qi(1)).map(|c1| normalize(&c1).unwrap()), Some(normalize(&c).unwrap()));
    }

    #[test]
    fn collapsing_all_lines_is_not_split() {
        let c = sample_config(3, 1).unwrap().configs.remove(0);
        let d = degenerate_and_limit(&c, &OneParamWeights([0, 1, 1, 1])).unwrap();
        assert_eq!(d.n_k()[0], 1);
        assert!(!d.is_split());
    }

    #[test]
    fn split_type_parsing() {
        let t: SplitType = "13,51,22".parse().unwrap();
        assert_eq!(t.to_string(), "31,51,22");
        assert!(t.is_realizable());
        assert!(!"22,42,22".parse::<SplitType>().unwrap().is_realizable());
        assert!("31,42,31".parse::<SplitType>().unwrap().is_realizable());
        assert!("4,51,22".parse::<SplitType>().is_err());
        assert!("31,51".parse::<SplitType>().is_err());
    }
}
