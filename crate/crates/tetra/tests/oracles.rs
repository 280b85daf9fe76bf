//! Independent recomputations of quantities the library derives another way.

use std::collections::{BTreeSet, HashMap, VecDeque};

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use tetra::algebra::{Rat, Var};
use tetra::combinatorics::{all_edges, all_faces, gamma_json, SubsetLabel};
use tetra::config::{config_from_matrix, is_general_position, normalize, random_matrix};
use tetra::core::{core_from_chart, enumerate_special, jacobian_certificate, CorePoint, CHART_DIM};
use tetra::relations::symbolic::edge_values_from_matrix;
use tetra::relations::{symbolic_identity_check, u_relations, z_relations, IdentityMode};

const P: i64 = 2_147_483_647;

fn modp(r: &Rat) -> Option<i64> {
    let m = |b: &BigInt| (b % BigInt::from(P)).to_i64().map(|v| v.rem_euclid(P));
    let (n, d) = (m(r.numer())?, m(r.denom())?);
    (d != 0).then(|| n * pow_mod(d, P - 2) % P)
}

fn pow_mod(mut b: i64, mut e: i64) -> i64 {
    let mut acc = 1;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % P;
        }
        b = b * b % P;
        e >>= 1;
    }
    acc
}

fn rank_mod_p(mut rows: Vec<Vec<i64>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..rows.len()).find(|&r| rows[r][c] != 0) else { continue };
        rows.swap(rank, piv);
        let inv = pow_mod(rows[rank][c], P - 2);
        let pivot = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && row[c] != 0 {
                let f = row[c] * inv % P;
                for (x, p) in row[c..].iter_mut().zip(&pivot[c..]) {
                    *x = (*x - f * p).rem_euclid(P);
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Jacobian corank mod p in the chart with the last nonzero coordinate of
/// each face set to 1 (the library picks the first). None if a value has a
/// denominator divisible by p.
fn corank_mod_p(z: &CorePoint) -> Option<usize> {
    let mut y = z.values().to_vec();
    let mut chart = Vec::new();
    for f in 0..all_faces().len() {
        let ps = tetra::combinatorics::face_pairs(f);
        let c = *ps.iter().rev().find(|&&p| !y[p].is_zero()).unwrap();
        let s = y[c].clone();
        for p in ps {
            y[p] = &y[p] / &s;
        }
        chart.push(c);
    }
    let free: Vec<usize> = (0..y.len()).filter(|p| !chart.contains(p)).collect();
    assert_eq!(free.len(), CHART_DIM);
    let val = |v: Var| match v {
        Var::Core(p) => Some(y[p as usize].clone()),
        _ => None,
    };
    let mut rows = Vec::new();
    for r in z_relations() {
        let g: HashMap<Var, Rat> = r.poly.gradient_at(&val).unwrap().into_iter().collect();
        let row: Option<Vec<i64>> = free.iter().map(|&p| g.get(&Var::Core(p as u8)).map_or(Some(0), modp)).collect();
        rows.push(row?);
    }
    Some(CHART_DIM - rank_mod_p(rows))
}

#[test]
fn edges_from_the_definition() {
    // Two k-subsets span an edge of the hypersimplex iff they differ in
    // exactly one element.
    let mut expected = BTreeSet::new();
    for a in SubsetLabel::all() {
        for b in SubsetLabel::all() {
            if a.rank() == b.rank()
                && a.index() < b.index()
                && (a.mask() & b.mask()).count_ones() as usize == a.rank() - 1
            {
                expected.insert((a.mask().min(b.mask()), a.mask().max(b.mask())));
            }
        }
    }
    let got: BTreeSet<(u8, u8)> =
        all_edges().iter().map(|e| (e.lo.mask().min(e.hi.mask()), e.lo.mask().max(e.hi.mask()))).collect();
    assert_eq!(got, expected);
    assert_eq!(expected.len(), 24);
}

#[test]
fn triangles_by_brute_force() {
    let adj = |a: SubsetLabel, b: SubsetLabel| (a.mask() & b.mask()).count_ones() as usize == a.rank() - 1;
    let mut n = 0;
    for k in 1..=3 {
        let vs: Vec<SubsetLabel> = SubsetLabel::of_rank(k).collect();
        for i in 0..vs.len() {
            for j in i + 1..vs.len() {
                for l in j + 1..vs.len() {
                    let (a, b, c) = (vs[i], vs[j], vs[l]);
                    if adj(a, b) && adj(a, c) && adj(b, c) {
                        n += 1;
                    }
                }
            }
        }
    }
    // 4 + 8 + 4: antipodal octahedron vertices are not adjacent.
    assert_eq!(n, 16);
    assert_eq!(all_faces().iter().filter(|f| f.is_triangle()).count(), n);
}

#[test]
fn gamma_components_by_search() {
    let g = gamma_json();
    let mut adj: HashMap<String, Vec<String>> = HashMap::new();
    for f in &g.faces {
        for v in &f.vertices {
            adj.entry(format!("{}:{v}", f.id)).or_default();
        }
        for e in &f.edges {
            let (a, b) = e.split_once('-').unwrap();
            let (a, b) = (format!("{}:{a}", f.id), format!("{}:{b}", f.id));
            adj.get_mut(&a).unwrap().push(b.clone());
            adj.get_mut(&b).unwrap().push(a);
        }
    }
    let mut seen = BTreeSet::new();
    let mut comps = 0;
    let mut keys: Vec<&String> = adj.keys().collect();
    keys.sort();
    for s in keys {
        if !seen.insert(s.clone()) {
            continue;
        }
        comps += 1;
        let mut q = VecDeque::from([s.clone()]);
        while let Some(v) = q.pop_front() {
            for w in &adj[&v] {
                if seen.insert(w.clone()) {
                    q.push_back(w.clone());
                }
            }
        }
    }
    assert_eq!(comps, 19);
    assert_eq!(g.edges, 72);
}

#[test]
fn chart_from_minors_matches_normalization() {
    let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(5);
    let mut checked = 0;
    while checked < 20 {
        let g = random_matrix(&mut rng, -9, 9);
        let Ok(c) = config_from_matrix(&g) else { continue };
        if !is_general_position(&c) {
            continue;
        }
        assert_eq!(edge_values_from_matrix(&g).unwrap(), normalize(&c).unwrap().x);
        checked += 1;
    }
}

#[test]
fn exact_and_random_identity_checks_agree() {
    for r in u_relations() {
        let exact = symbolic_identity_check(r, IdentityMode::Exact).unwrap();
        let random = symbolic_identity_check(r, IdentityMode::probabilistic_default()).unwrap();
        assert!(exact.zero && random.zero, "{}", r.poly);
        assert_eq!(exact.degree_bound, random.degree_bound);
    }
}

#[test]
fn modular_corank_matches_exact_corank() {
    let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(9);
    let mut generic = 0;
    while generic < 5 {
        let Ok(c) = config_from_matrix(&random_matrix(&mut rng, -9, 9)) else { continue };
        let Ok(ch) = normalize(&c) else { continue };
        let Ok(z) = core_from_chart(&ch) else { continue };
        assert_eq!(corank_mod_p(&z), Some(3));
        generic += 1;
    }
    let cat = enumerate_special().unwrap();
    for r in &cat {
        for z in &r.representatives {
            let exact = jacobian_certificate(z).unwrap().corank;
            assert_eq!(corank_mod_p(z), Some(exact), "{} at {}", r.type_label, r.triple);
            assert_eq!(exact, 3);
        }
    }
}
