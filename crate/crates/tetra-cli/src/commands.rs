use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::Serialize;

use tetra::algebra::{Rat, Var};
use tetra::combinatorics::{
    all_edges, all_faces, all_pairs, gamma_components, gamma_dot, gamma_json, SubsetLabel, NUM_EDGES, NUM_FACES,
    NUM_PAIRS,
};
use tetra::config::{
    degenerate_and_limit, proj_eq, sample_charts, sample_config, search_target_split, Degeneration, TetraConfig,
};
use tetra::core::{
    certify_catalog, core_from_chart, enumerate_special_with_stats, jacobian_certificate, match_against_catalog,
    verify_catalog, SpecialPointRecord, TypeLabel, Verdict,
};
use tetra::relations::{
    chart_assignment, family_counts, symbolic_identity_check, u_jacobian, u_relations, verify_vanishing, z_relations,
    Family, IdentityMode, Relation,
};

use crate::report::{write_atomic, write_json, RunReport};
use crate::{Command, GammaFormat, LevelArg, RelationsFormat};

/// Errors that stop a command before it can report (exit status 2).
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(PathBuf, std::io::Error),
    Parse(PathBuf, String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Io(p, e) => write!(f, "{}: {e}", p.display()),
            CliError::Parse(p, e) => write!(f, "{}: {e}", p.display()),
        }
    }
}

fn io(p: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |e| CliError::Io(p.to_path_buf(), e)
}

pub fn run(cmd: &Command) -> Result<RunReport, CliError> {
    match cmd {
        Command::Sample { seed, count, out } => sample(*seed, *count as usize, out),
        Command::Verify { level, seed, samples, spot_checks, symbolic, inject_fault } => {
            verify(*level, *seed, *samples as usize, *spot_checks, *symbolic, *inject_fault)
        }
        Command::Certify { out, only_type } => certify(out.as_deref(), *only_type),
        Command::Check { catalog } => check(catalog),
        Command::Degenerate { seed, weights, target_split, catalog, max_trials, out } => {
            let cat = match catalog {
                Some(p) => Some(load_catalog(p)?),
                None => None,
            };
            degenerate(*seed, weights.as_ref(), target_split.as_ref(), cat, *max_trials, out.as_deref())
        }
        Command::Export { gamma, relations, level, out_dir } => export(*gamma, *relations, *level, out_dir),
    }
}

#[derive(Serialize)]
struct SampleFile<'a> {
    seed: u64,
    prng: &'static str,
    rejections: u64,
    zero_edge_rejections: u64,
    configs: &'a [TetraConfig],
}

fn sample(seed: u64, count: usize, out: &Path) -> Result<RunReport, CliError> {
    let mut rep = RunReport::new("sample", Some(seed));
    let s = match rep.timed("sample", || sample_config(seed, count)) {
        Ok(s) => s,
        Err(e) => {
            rep.fail(format!("sampling: {e}"));
            return Ok(rep);
        }
    };
    rep.expect("configs", s.configs.len(), count);
    rep.observe("rejections", s.rejections);
    rep.observe("zero_edge_rejections", s.zero_edge_rejections);
    let file = SampleFile {
        seed,
        prng: "ChaCha8 seed_from_u64, 4x4 entries gen_range(-9..=9) row-major",
        rejections: s.rejections,
        zero_edge_rejections: s.zero_edge_rejections,
        configs: &s.configs,
    };
    write_json(out, &file).map_err(io(out))?;
    rep.artifact(out);
    Ok(rep)
}

fn family_name(f: Family) -> &'static str {
    match f {
        Family::Linear => "linear",
        Family::QuadricShared => "quadric_shared",
        Family::QuadricRotated => "quadric_rotated",
        Family::Cubic => "cubic",
        Family::Quartic => "quartic",
    }
}

fn expected_families(level: LevelArg) -> BTreeMap<&'static str, usize> {
    let v: &[(&str, usize)] = match level {
        LevelArg::U => &[("linear", 16), ("quadric_rotated", 24), ("cubic", 4), ("quartic", 3)],
        LevelArg::Z => {
            &[("linear", 32), ("quadric_shared", 48), ("quadric_rotated", 96), ("cubic", 72), ("quartic", 147)]
        }
    };
    v.iter().copied().collect()
}

fn verify(
    level: LevelArg,
    seed: u64,
    samples: usize,
    spot_checks: usize,
    symbolic: bool,
    inject_fault: bool,
) -> Result<RunReport, CliError> {
    let mut rep = RunReport::new("verify", Some(seed));
    let rels: &[Relation] = match level {
        LevelArg::U => u_relations(),
        LevelArg::Z => z_relations(),
    };
    let fams: BTreeMap<&str, usize> = family_counts(rels).into_iter().map(|(f, n)| (family_name(f), n)).collect();
    rep.expect("relations_by_family", fams, expected_families(level));

    let charts = rep.timed("sample", || sample_charts(seed, samples));
    let lifts = match level {
        LevelArg::U => Vec::new(),
        LevelArg::Z => {
            let r: Result<Vec<_>, _> = rep.timed("lift", || charts.iter().map(core_from_chart).collect());
            match r {
                Ok(l) => l,
                Err(e) => {
                    rep.fail(format!("lifting a sampled chart: {e}"));
                    return Ok(rep);
                }
            }
        }
    };
    let mut points: Vec<_> = match level {
        LevelArg::U => charts.iter().map(chart_assignment).collect(),
        LevelArg::Z => lifts.iter().map(|z| z.assignment()).collect(),
    };
    if inject_fault {
        let v = match level {
            LevelArg::U => Var::Edge(0),
            LevelArg::Z => Var::Core(NUM_FACES as u8),
        };
        let x = points[0].get_mut(&v).expect("coordinate present");
        *x = &*x + &Rat::one();
    }
    let vr = rep.timed("vanishing", || verify_vanishing(rels, &points));
    rep.observe("points", vr.points);
    rep.record("nonzero_evaluations", vr.failures.len(), 0);
    rep.expect("unevaluated", vr.missing.len(), 0);
    for f in &vr.failures {
        rep.fail(format!(
            "relation {} ({}) at point {}: value {}",
            f.relation, rels[f.relation].poly, f.point, f.value
        ));
    }

    let n_spot = spot_checks.min(samples);
    let mut good = 0;
    let mut bad = Vec::new();
    rep.timed("jacobian", || {
        for i in 0..n_spot {
            let (what, got, want) = match level {
                LevelArg::U => {
                    let x: Vec<Rat> = (0..NUM_EDGES).map(|e| points[i][&Var::Edge(e as u8)].clone()).collect();
                    ("rank", u_jacobian(&x).rank(), 18)
                }
                LevelArg::Z => match jacobian_certificate(&lifts[i]) {
                    Ok(c) => ("corank", c.corank, 3),
                    Err(e) => {
                        bad.push(format!("point {i}: {e}"));
                        continue;
                    }
                },
            };
            if got == want {
                good += 1;
            } else {
                bad.push(format!("point {i}: Jacobian {what} {got}, expected {want}"));
            }
        }
    });
    let key = if level == LevelArg::U { "jacobian_rank_18" } else { "jacobian_corank_3" };
    rep.record(key, good, n_spot);
    bad.into_iter().for_each(|b| rep.fail(b));

    if symbolic {
        let u = u_relations();
        let checks = rep.timed("symbolic", || {
            u.iter().map(|r| symbolic_identity_check(r, IdentityMode::Exact)).collect::<Vec<_>>()
        });
        let mut zero = 0;
        for (i, (r, c)) in u.iter().zip(checks).enumerate() {
            match c {
                Ok(s) if s.zero => zero += 1,
                Ok(s) => rep.fail(format!("U generator {i} ({}): numerator has {:?} terms", r.poly, s.numerator_terms)),
                Err(e) => rep.fail(format!("U generator {i}: {e}")),
            }
        }
        rep.record("symbolic_identities", zero, u.len());
    }
    Ok(rep)
}

fn type_counts(cat: &[SpecialPointRecord]) -> BTreeMap<String, usize> {
    let mut m = BTreeMap::new();
    for r in cat {
        *m.entry(r.type_label.name().to_string()).or_insert(0) += 1;
    }
    m
}

/// Checks every stored certificate: smooth verdict, and a propagation bound
/// (when the rules close) equal to the corank.
fn check_certificates(rep: &mut RunReport, cat: &[SpecialPointRecord]) {
    let (mut smooth, mut agree, mut no_bound, mut total) = (0, 0, 0, 0);
    for (i, r) in cat.iter().enumerate() {
        for (j, c) in r.certificates.iter().enumerate() {
            total += 1;
            if c.verdict == Verdict::Smooth {
                smooth += 1;
            } else {
                rep.fail(format!("record {i} ({}) representative {j}: corank {}", r.type_label, c.corank));
            }
            match c.propagation.bound {
                Some(b) if b == c.corank => agree += 1,
                Some(b) => rep.fail(format!(
                    "record {i} ({}) representative {j}: propagation bound {b} vs corank {}",
                    r.type_label, c.corank
                )),
                None => no_bound += 1,
            }
        }
    }
    rep.observe("certificates", total);
    rep.record("smooth", smooth, total);
    rep.observe("propagation_agrees", agree);
    rep.observe("propagation_no_bound", no_bound);
}

fn certify(out: Option<&Path>, only: Option<TypeLabel>) -> Result<RunReport, CliError> {
    let mut rep = RunReport::new("certify", None);
    let (mut cat, stats) = match rep.timed("enumerate", enumerate_special_with_stats) {
        Ok(r) => r,
        Err(e) => {
            rep.fail(format!("enumeration: {e}"));
            return Ok(rep);
        }
    };
    rep.observe("enumeration", &stats);
    match only {
        None => {
            rep.expect("isolated", cat.iter().filter(|r| r.dimension == 0).count(), 66);
            rep.expect("families", cat.iter().filter(|r| r.dimension == 1).count(), 4);
            let want = TypeLabel::ALL.iter().map(|t| (t.name().to_string(), t.expected_size())).collect();
            rep.expect("class_sizes", type_counts(&cat), want);
        }
        Some(t) => {
            cat.retain(|r| r.type_label == t);
            rep.expect("class_sizes", type_counts(&cat), BTreeMap::from([(t.name().to_string(), t.expected_size())]));
        }
    }
    let curves: Vec<String> = cat.iter().filter_map(|r| r.shape_relation.as_ref().map(|s| s.to_string())).collect();
    if !curves.is_empty() {
        rep.observe("shape_relations", &curves);
    }
    if let Err(e) = rep.timed("certify", || certify_catalog(&mut cat)) {
        rep.fail(format!("certification: {e}"));
        return Ok(rep);
    }
    check_certificates(&mut rep, &cat);
    for p in rep.timed("replay", || verify_catalog(&cat)) {
        rep.fail(p);
    }
    if let Some(out) = out {
        write_json(out, &cat).map_err(io(out))?;
        rep.artifact(out);
    }
    let iso = cat.iter().filter(|r| r.dimension == 0).count();
    let fam = cat.len() - iso;
    let verdict = if rep.ok() { "all smooth" } else { "NOT all smooth" };
    eprintln!("{iso} isolated, {fam} families, {verdict}");
    Ok(rep)
}

fn load_catalog(p: &Path) -> Result<Vec<SpecialPointRecord>, CliError> {
    let s = std::fs::read_to_string(p).map_err(io(p))?;
    serde_json::from_str(&s).map_err(|e| CliError::Parse(p.to_path_buf(), e.to_string()))
}

fn check(path: &Path) -> Result<RunReport, CliError> {
    let cat = load_catalog(path)?;
    let mut rep = RunReport::new("check", None);
    rep.observe("records", cat.len());
    rep.observe("class_sizes", type_counts(&cat));
    check_certificates(&mut rep, &cat);
    for p in rep.timed("replay", || verify_catalog(&cat)) {
        rep.fail(p);
    }
    Ok(rep)
}

#[derive(Serialize)]
struct DegenerationFile<'a> {
    weights: [i64; 4],
    frame: Vec<Vec<Rat>>,
    seed_config: &'a TetraConfig,
    limit: &'a TetraConfig,
    n_k: [usize; 3],
    split_type: String,
    core_limit: &'a tetra::core::CorePoint,
    catalog_match: &'a Option<tetra::core::CatalogMatch>,
}

fn degenerate(
    seed: u64,
    weights: Option<&tetra::config::OneParamWeights>,
    target: Option<&tetra::config::SplitType>,
    catalog: Option<Vec<SpecialPointRecord>>,
    max_trials: usize,
    out: Option<&Path>,
) -> Result<RunReport, CliError> {
    let mut rep = RunReport::new("degenerate", Some(seed));
    let (seed_config, deg): (TetraConfig, Degeneration) = if let Some(w) = weights {
        rep.observe("weights", w.0);
        let c = match sample_config(seed, 1) {
            Ok(s) => s.configs.into_iter().next().expect("one config"),
            Err(e) => {
                rep.fail(format!("sampling: {e}"));
                return Ok(rep);
            }
        };
        match rep.timed("degenerate", || degenerate_and_limit(&c, w)) {
            Ok(d) => {
                let same = SubsetLabel::all().all(|s| proj_eq(d.limit.pl(s), c.pl(s)));
                rep.observe("limit_equals_seed", same);
                (c, d)
            }
            Err(e) => {
                rep.fail(e.to_string());
                return Ok(rep);
            }
        }
    } else {
        let t = target.expect("clap requires weights or a target");
        rep.observe("target_split", t.to_string());
        match rep.timed("search", || search_target_split(seed, t, max_trials)) {
            Ok(f) => {
                rep.observe("trials", f.trials);
                rep.observe("weights", f.degeneration.weights.0);
                (f.seed_config, f.degeneration)
            }
            Err(e) => {
                let why = if t.is_realizable() { "" } else { " (no minimally split point has this split type)" };
                rep.fail(format!("{e}{why}"));
                return Ok(rep);
            }
        }
    };
    rep.observe("n_k", deg.n_k());
    rep.observe("split_type", deg.split_type().to_string());
    rep.observe("split", deg.is_split());
    rep.observe("minimally_split", deg.is_minimally_split());
    let sat = deg.core_limit.satisfies_relations();
    rep.expect("core_limit_satisfies_relations", sat, true);
    if target.is_some() {
        rep.expect("n_k_target", deg.n_k(), [2, 2, 2]);
    }

    let cat = match catalog {
        Some(c) => c,
        None => match rep.timed("enumerate", enumerate_special_with_stats) {
            Ok((c, _)) => c,
            Err(e) => {
                rep.fail(format!("enumeration: {e}"));
                return Ok(rep);
            }
        },
    };
    let m = rep.timed("match", || match_against_catalog(&deg.core_limit, &cat));
    rep.observe(
        "catalog_match",
        m.as_ref().map(|m| {
            serde_json::json!({
                "index": m.index,
                "type": m.type_label,
                "symmetry": m.symmetry.to_string(),
                "curve_parameter": m.parameter,
            })
        }),
    );
    if deg.is_minimally_split() && m.is_none() {
        rep.fail("minimally split limit has no catalog match");
    }
    if let Some(out) = out {
        let frame = (0..deg.frame.rows()).map(|r| deg.frame.row(r).to_vec()).collect();
        let file = DegenerationFile {
            weights: deg.weights.0,
            frame,
            seed_config: &seed_config,
            limit: &deg.limit,
            n_k: deg.n_k(),
            split_type: deg.split_type().to_string(),
            core_limit: &deg.core_limit,
            catalog_match: &m,
        };
        write_json(out, &file).map_err(io(out))?;
        rep.artifact(out);
    }
    Ok(rep)
}

#[derive(Serialize)]
struct RelationJson<'a> {
    family: &'static str,
    poly: String,
    pattern: &'a str,
    indices: &'a [u8],
    faces: &'a [String],
}

fn export(
    gamma: Option<GammaFormat>,
    relations: Option<RelationsFormat>,
    level: LevelArg,
    dir: &Path,
) -> Result<RunReport, CliError> {
    let mut rep = RunReport::new("export", None);
    if !dir.is_dir() {
        return Err(CliError::Usage(format!("output directory {} does not exist", dir.display())));
    }
    match gamma {
        Some(GammaFormat::Dot) => {
            let s = gamma_dot();
            rep.expect("subgraphs", s.matches("subgraph cluster_").count(), 19);
            rep.expect("edges", s.matches(" -- ").count(), 72);
            let p = dir.join("gamma.dot");
            write_atomic(&p, s.as_bytes()).map_err(io(&p))?;
            rep.artifact(&p);
        }
        Some(GammaFormat::Json) => {
            let g = gamma_json();
            rep.expect("components", g.components, 19);
            rep.expect("edges", g.edges, 72);
            rep.observe("nodes", g.nodes);
            let p = dir.join("gamma.json");
            write_json(&p, &g).map_err(io(&p))?;
            rep.artifact(&p);
        }
        None => {}
    }
    if gamma.is_some() {
        rep.expect("gamma_components", gamma_components(), NUM_FACES);
        rep.observe("edges_by_rank", [1, 2, 3].map(|k| all_edges().iter().filter(|e| e.rank() == k).count()));
        rep.observe("faces", all_faces().len());
        rep.expect("pairs", all_pairs().len(), NUM_PAIRS);
    }
    if let Some(fmt) = relations {
        let (rels, tag) = match level {
            LevelArg::U => (u_relations(), "u"),
            LevelArg::Z => (z_relations(), "z"),
        };
        rep.expect("relations", rels.len(), expected_families(level).values().sum());
        let p = match fmt {
            RelationsFormat::Txt => {
                let p = dir.join(format!("relations_{tag}.txt"));
                let s: String = rels.iter().map(|r| format!("{}\n", r.poly)).collect();
                write_atomic(&p, s.as_bytes()).map_err(io(&p))?;
                p
            }
            RelationsFormat::Json => {
                let p = dir.join(format!("relations_{tag}.json"));
                let v: Vec<RelationJson> = rels
                    .iter()
                    .map(|r| RelationJson {
                        family: family_name(r.family),
                        poly: r.poly.to_string(),
                        pattern: &r.origin.pattern,
                        indices: &r.origin.indices,
                        faces: &r.origin.faces,
                    })
                    .collect();
                write_json(&p, &v).map_err(io(&p))?;
                p
            }
        };
        rep.artifact(&p);
    }
    Ok(rep)
}
