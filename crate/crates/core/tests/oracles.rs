//! Independent oracles for derived values: each check recomputes the answer
//! with code that shares nothing with the library route it is compared to.

mod common;

use std::collections::{BTreeSet, VecDeque};
use std::path::Path;

use common::{chain, load, named, network_path};
use crn_siphons::arith::{conservation_basis, in_row_space, int, ratio, Rational};
use crn_siphons::cas::{export_cas_script, ideal_generators, variable_names, CasFlavor, CasOptions};
use crn_siphons::cli::load_symmetries;
use crn_siphons::geometry::{
    chamber_signature, face_dimension, face_nonempty, network_cone, vertex_supports, InvariantPolytope,
};
use crn_siphons::network::{parse_network, ReactionNetwork};
use crn_siphons::relevance::RelevanceContext;
use crn_siphons::set::IndexSet;
use crn_siphons::siphons::{
    is_siphon, minimal_siphons, minimal_transversals, EnumConfig, Hypergraph, SiphonViolation,
};
use num_traits::{Signed, Zero};

fn mask_of(z: &IndexSet) -> u64 {
    z.iter().fold(0, |m, i| m | 1 << i)
}

fn set_of(mask: u64) -> IndexSet {
    (0..64).filter(|i| mask >> i & 1 == 1).collect()
}

/// Rank of an integer matrix by fraction-free elimination in i128.
fn rank_i128(mut rows: Vec<Vec<i128>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&r| rows[r][c] != 0) else {
            continue;
        };
        rows.swap(rank, p);
        for r in 0..rows.len() {
            if r != rank && rows[r][c] != 0 {
                let (a, b) = (rows[rank][c], rows[r][c]);
                let pivot = rows[rank].clone();
                for (x, p) in rows[r].iter_mut().zip(&pivot) {
                    *x = *x * a - p * b;
                }
                let g = rows[r].iter().fold(0i128, |g, &x| gcd(g, x.abs()));
                if g > 1 {
                    rows[r].iter_mut().for_each(|x| *x /= g);
                }
            }
        }
        rank += 1;
    }
    rank
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn stoichiometric_rank(net: &ReactionNetwork) -> usize {
    rank_i128(
        net.stoichiometric_generators()
            .into_iter()
            .map(|g| g.into_iter().map(i128::from).collect())
            .collect(),
    )
}

#[test]
fn stoichiometric_ranks_by_integer_elimination() {
    let receptor_ligand = load("receptor_ligand.crn");
    assert_eq!(stoichiometric_rank(&receptor_ligand), 3);
    assert_eq!(conservation_basis(&receptor_ligand).dim(), 2);
    let futile = load("futile_cycle.crn");
    assert_eq!(futile.stoichiometric_generators().len(), 6);
    assert_eq!(stoichiometric_rank(&futile), 3);
    assert_eq!(conservation_basis(&futile).dim(), 3);
    let minors = load("minors5x5.crn");
    assert_eq!(stoichiometric_rank(&minors), 16);
    assert_eq!(conservation_basis(&minors).dim(), 9);
}

#[test]
fn receptor_ligand_laws_match_the_printed_matrix() {
    let net = load("receptor_ligand.crn");
    let basis = conservation_basis(&net);
    for row in [[0, 0, 1, 1, 1], [1, 2, 0, 1, 2]] {
        let v: Vec<Rational> = row.iter().map(|&x| int(x)).collect();
        assert!(in_row_space(&basis, &v).unwrap());
    }
}

#[test]
fn grid_conservation_laws_are_row_and_column_sums() {
    let net = load("minors5x5.crn");
    let basis = conservation_basis(&net);
    for k in 0..5 {
        let row: Vec<Rational> = (0..25).map(|i| int(i64::from(i / 5 == k))).collect();
        let col: Vec<Rational> = (0..25).map(|i| int(i64::from(i % 5 == k))).collect();
        assert!(in_row_space(&basis, &row).unwrap());
        assert!(in_row_space(&basis, &col).unwrap());
    }
}

#[test]
fn one_dimensional_cone_has_the_origin_as_facet() {
    let net = parse_network("X <-> Y").unwrap();
    let cone = network_cone(&net);
    let facets = cone.facets().unwrap();
    assert_eq!(facets.len(), 1);
    assert!(facets[0].generators.is_empty());
    assert_eq!(facets[0].complement(2), IndexSet::full(2));
    // definition check: the normal vanishes on no generator and is positive on both
    assert!(facets[0].normal.iter().all(|x| x.is_positive()));
}

#[test]
fn violation_is_reported_at_the_unprotected_reaction() {
    let net = load("receptor_ligand.crn");
    let e = named(&net, "E");
    match is_siphon(&net, &e) {
        Err(SiphonViolation::Unprotected { reaction, species }) => {
            let rx = &net.reactions()[reaction];
            assert_eq!(net.format_complex(rx.source), "A + D");
            assert_eq!(net.format_complex(rx.target), "E");
            assert_eq!(net.species().name(species), "E");
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn chain_transversals_by_brute_force() {
    let edges: Vec<IndexSet> = (0..4).map(|k| [k, k + 1].into_iter().collect()).collect();
    let h = Hypergraph::new(5, edges.clone());
    let got = minimal_transversals(&h, &EnumConfig::default()).unwrap();
    let hits = |m: u64| edges.iter().all(|e| mask_of(e) & m != 0);
    let brute: Vec<u64> = (1u64..32)
        .filter(|&m| hits(m) && (0..5).all(|i| m >> i & 1 == 0 || !hits(m & !(1 << i))))
        .collect();
    let want: BTreeSet<IndexSet> = brute.into_iter().map(set_of).collect();
    assert_eq!(got.into_iter().collect::<BTreeSet<_>>(), want);
    let named: BTreeSet<Vec<usize>> = want.iter().map(IndexSet::to_vec).collect();
    assert_eq!(
        named,
        BTreeSet::from([vec![1, 3], vec![0, 2, 4], vec![1, 2, 4], vec![0, 2, 3]])
    );
}

/// Every minimal siphon of the 25-species grid from a full bitmap over all
/// 2^25 subsets: siphon test per reversible pair, then a subset-OR transform
/// to drop non-minimal ones.
#[test]
fn minors_grid_minimal_siphons_by_bitmap() {
    let net = load("minors5x5.crn");
    let s = net.num_species();
    assert_eq!(s, 25);
    let pairs: Vec<(u64, u64)> = net
        .reactions()
        .iter()
        .map(|r| (mask_of(net.support(r.source)), mask_of(net.support(r.target))))
        .collect();
    let n = 1usize << s;
    let mut siphon = vec![0u64; n / 64];
    for (w, word) in siphon.iter_mut().enumerate() {
        for b in 0..64 {
            let m = (w * 64 + b) as u64;
            if m != 0 && pairs.iter().all(|&(src, dst)| m & dst == 0 || m & src != 0) {
                *word |= 1 << b;
            }
        }
    }
    // contains[m]: some subset of m is a siphon
    let mut contains = siphon.clone();
    for i in 0..s {
        let snapshot = contains.clone();
        or_from_lower(&mut contains, &snapshot, i);
    }
    // proper[m]: some m \ {i} contains a siphon
    let mut proper = vec![0u64; n / 64];
    for i in 0..s {
        or_from_lower(&mut proper, &contains, i);
    }
    let mut oracle = BTreeSet::new();
    for (w, (&sw, &pw)) in siphon.iter().zip(&proper).enumerate() {
        let mut bits = sw & !pw;
        while bits != 0 {
            let b = bits.trailing_zeros() as u64;
            oracle.insert(set_of(w as u64 * 64 + b));
            bits &= bits - 1;
        }
    }
    let got: BTreeSet<IndexSet> = minimal_siphons(&net, &EnumConfig::default())
        .unwrap()
        .into_iter()
        .map(|z| z.members().clone())
        .collect();
    assert_eq!(oracle.len(), 28);
    assert_eq!(got, oracle);
}

/// For every mask `m` with bit `i` set, `dst[m] |= src[m ^ 1<<i]`.
fn or_from_lower(dst: &mut [u64], src: &[u64], i: usize) {
    if i < 6 {
        let lo: u64 = (0..64u64).filter(|b| b >> i & 1 == 0).fold(0, |m, b| m | 1 << b);
        for (d, w) in dst.iter_mut().zip(src) {
            *d |= (w & lo) << (1u32 << i);
        }
    } else {
        let stride = 1usize << (i - 6);
        for j in 0..dst.len() {
            if j & stride != 0 {
                dst[j] |= src[j ^ stride];
            }
        }
    }
}

/// The live cells of a transportation face and its dimension, from integer
/// max-flow on margins scaled to integers.
struct Transport {
    rows: Vec<i64>,
    cols: Vec<i64>,
}

impl Transport {
    /// Max flow from rows to columns through the allowed cells.
    fn max_flow(&self, allowed: &[bool]) -> i64 {
        let (r, c) = (self.rows.len(), self.cols.len());
        let n = r + c + 2;
        let (src, snk) = (r + c, r + c + 1);
        let mut cap = vec![vec![0i64; n]; n];
        for i in 0..r {
            cap[src][i] = self.rows[i];
            for j in 0..c {
                if allowed[i * c + j] {
                    cap[i][r + j] = i64::MAX / 4;
                }
            }
        }
        for j in 0..c {
            cap[r + j][snk] = self.cols[j];
        }
        let mut flow = 0;
        loop {
            let mut prev = vec![usize::MAX; n];
            prev[src] = src;
            let mut queue = VecDeque::from([src]);
            while let Some(u) = queue.pop_front() {
                for v in 0..n {
                    if prev[v] == usize::MAX && cap[u][v] > 0 {
                        prev[v] = u;
                        queue.push_back(v);
                    }
                }
            }
            if prev[snk] == usize::MAX {
                return flow;
            }
            let mut push = i64::MAX;
            let mut v = snk;
            while v != src {
                push = push.min(cap[prev[v]][v]);
                v = prev[v];
            }
            let mut v = snk;
            while v != src {
                cap[prev[v]][v] -= push;
                cap[v][prev[v]] += push;
                v = prev[v];
            }
            flow += push;
        }
    }

    fn feasible(&self, allowed: &[bool]) -> bool {
        let total: i64 = self.rows.iter().sum();
        total == self.cols.iter().sum::<i64>() && self.max_flow(allowed) == total
    }

    /// `None` when the face is empty, else its dimension:
    /// live cells minus (touched rows and columns minus components).
    fn face_dim(&self, z: &IndexSet) -> Option<usize> {
        let (r, c) = (self.rows.len(), self.cols.len());
        let allowed: Vec<bool> = (0..r * c).map(|k| !z.contains(k)).collect();
        if !self.feasible(&allowed) {
            return None;
        }
        // margins are integers, so a live cell carries at least 1 at some vertex
        let live: Vec<usize> = (0..r * c)
            .filter(|&k| allowed[k])
            .filter(|&k| {
                let (i, j) = (k / c, k % c);
                let mut t = Transport {
                    rows: self.rows.clone(),
                    cols: self.cols.clone(),
                };
                t.rows[i] -= 1;
                t.cols[j] -= 1;
                t.rows[i] >= 0 && t.cols[j] >= 0 && t.feasible(&allowed)
            })
            .collect();
        let mut parent: Vec<usize> = (0..r + c).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            if p[x] != x {
                let root = find(p, p[x]);
                p[x] = root;
            }
            p[x]
        }
        let mut touched = BTreeSet::new();
        for &k in &live {
            let (a, b) = (k / c, r + k % c);
            touched.insert(a);
            touched.insert(b);
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            parent[ra] = rb;
        }
        let comps: BTreeSet<usize> = touched.iter().map(|&x| find(&mut parent, x)).collect();
        Some(live.len() + comps.len() - touched.len())
    }
}

fn minors_reps(net: &ReactionNetwork) -> Vec<IndexSet> {
    [
        "c14 c21 c22 c23 c24 c32 c34 c42 c43 c44 c45 c52",
        "c14 c21 c22 c23 c24 c33 c34 c35 c41 c42 c43 c53",
        "c14 c24 c31 c32 c33 c34 c42 c43 c44 c45 c52",
        "c14 c24 c31 c32 c33 c34 c43 c44 c45 c53",
    ]
    .iter()
    .map(|z| named(net, z))
    .collect()
}

/// Margins, times four, of the all-ones matrix with centre entry `centre`.
fn scaled_margins(centre: Rational) -> Transport {
    let four = int(4);
    let mut c = vec![int(1); 25];
    c[12] = centre;
    let to_int = |x: Rational| {
        let y = x * &four;
        assert!(y.is_integer());
        i64::try_from(y.to_integer()).unwrap()
    };
    Transport {
        rows: (0..5).map(|i| to_int((0..5).map(|j| c[i * 5 + j].clone()).sum())).collect(),
        cols: (0..5).map(|j| to_int((0..5).map(|i| c[i * 5 + j].clone()).sum())).collect(),
    }
}

fn grid(net: &ReactionNetwork, centre: Rational) -> InvariantPolytope {
    let mut c = vec![int(1); 25];
    c[12] = centre;
    InvariantPolytope::for_network(net, c).unwrap()
}

#[test]
fn minors_face_dimensions_by_transportation_flow() {
    let net = load("minors5x5.crn");
    let reps = minors_reps(&net);
    let family: Vec<IndexSet> = minimal_siphons(&net, &EnumConfig::default())
        .unwrap()
        .into_iter()
        .map(|z| z.members().clone())
        .chain(reps.iter().cloned())
        .collect();
    let mut rep_dims = Vec::new();
    for centre in [int(1), ratio(1, 2), ratio(3, 2), ratio(3, 4), ratio(5, 4)] {
        let t = scaled_margins(centre.clone());
        let p = grid(&net, centre);
        for z in &family {
            assert_eq!(face_dimension(&p, z), t.face_dim(z), "{}", net.species().format_set(z));
        }
        rep_dims.push(reps.iter().map(|z| t.face_dim(z)).collect::<Vec<_>>());
    }
    let some = |v: [usize; 4]| v.map(Some).to_vec();
    assert_eq!(rep_dims[0], some([0, 1, 1, 3]));
    assert_eq!(rep_dims[1], some([0, 2, 2, 4]));
    assert_eq!(rep_dims[2], vec![Some(0), None, None, None]);
    // the same chamber at a smaller perturbation
    assert_eq!(rep_dims[3], rep_dims[1]);
    assert_eq!(rep_dims[4], rep_dims[2]);
}

#[test]
fn minors_symmetries_are_the_dihedral_group() {
    let net = load("minors5x5.crn");
    let perms = load_symmetries(&net, Path::new(&network_path("minors5x5.sym"))).unwrap();
    let mut group = BTreeSet::from([(0..25).collect::<Vec<usize>>()]);
    let mut frontier: Vec<Vec<usize>> = group.iter().cloned().collect();
    while let Some(g) = frontier.pop() {
        for p in &perms {
            let h: Vec<usize> = g.iter().map(|&i| p[i]).collect();
            if group.insert(h.clone()) {
                frontier.push(h);
            }
        }
    }
    assert_eq!(group.len(), 8);
}

/// Vertices of `{x >= 0 : A x = b}` for a 2-row `A` by Cramer's rule over
/// every column pair and single column.
fn vertices_by_cramer(a: &[[i64; 5]; 2], b: [Rational; 2]) -> BTreeSet<IndexSet> {
    let mut out = BTreeSet::new();
    let mut consider = |x: Vec<Rational>| {
        if x.iter().all(|v| !v.is_negative()) {
            let ax: Vec<Rational> = (0..2)
                .map(|r| (0..5).map(|j| int(a[r][j]) * &x[j]).sum())
                .collect();
            if ax == b {
                out.insert((0..5).filter(|&j| !x[j].is_zero()).collect::<IndexSet>());
            }
        }
    };
    for i in 0..5 {
        for j in i + 1..5 {
            let det = a[0][i] * a[1][j] - a[0][j] * a[1][i];
            if det == 0 {
                continue;
            }
            let d = int(det);
            let xi = (&b[0] * int(a[1][j]) - &b[1] * int(a[0][j])) / &d;
            let xj = (&b[1] * int(a[0][i]) - &b[0] * int(a[1][i])) / &d;
            let mut x = vec![int(0); 5];
            x[i] = xi;
            x[j] = xj;
            consider(x);
        }
        for r in 0..2 {
            if a[r][i] != 0 {
                let mut x = vec![int(0); 5];
                x[i] = &b[r] / int(a[r][i]);
                consider(x);
            }
        }
    }
    // a vertex support is a support whose columns are independent
    out.retain(|v| {
        let cols: Vec<usize> = v.iter().collect();
        rank_i128((0..2).map(|r| cols.iter().map(|&j| i128::from(a[r][j])).collect()).collect())
            == cols.len()
    });
    out
}

#[test]
fn receptor_ligand_vertices_and_face_duality() {
    let net = load("receptor_ligand.crn");
    let a = [[0, 0, 1, 1, 1], [1, 2, 0, 1, 2]];
    let tenth = || ratio(1, 10);
    let samples = [
        vec![tenth(), tenth(), int(1), tenth(), tenth()],
        vec![ratio(1, 5), tenth(), int(2), tenth(), tenth()],
        vec![tenth(), tenth(), ratio(2, 5), int(1), tenth()],
        vec![ratio(1, 2), ratio(1, 2), int(1), int(1), int(1)],
        vec![int(1); 5],
        vec![int(2), int(2), int(1), int(1), int(1)],
    ];
    let mut sigs = Vec::new();
    for c0 in &samples {
        let b = [0, 1].map(|r| (0..5).map(|j| int(a[r][j]) * &c0[j]).sum::<Rational>());
        let oracle = vertices_by_cramer(&a, b);
        let p = InvariantPolytope::for_network(&net, c0.clone()).unwrap();
        let got: BTreeSet<IndexSet> = vertex_supports(&p).into_iter().collect();
        assert_eq!(got, oracle);
        for m in 0u64..32 {
            let z = set_of(m);
            let nonempty = face_nonempty(&p, &z).is_some();
            let dual = oracle.iter().any(|v| !v.intersects(&z));
            assert_eq!(nonempty, dual, "Z = {:?}", z.to_vec());
        }
        sigs.push(chamber_signature(&net, c0.clone()).unwrap());
    }
    assert_eq!(sigs[0], sigs[1]);
    assert_ne!(sigs[0], sigs[4]);
    assert_ne!(sigs[3], sigs[4]);
}

#[test]
fn monotone_relevance_on_the_grid() {
    let net = load("minors5x5.crn");
    let ctx = RelevanceContext::new(&net);
    let p = grid(&net, int(1));
    for z in minors_reps(&net) {
        let v = ctx.c0(&p, &z).unwrap();
        assert!(v.relevant);
        for i in z.iter() {
            let smaller = z.without(i);
            if is_siphon(&net, &smaller).is_ok() {
                assert!(ctx.c0(&p, &smaller).unwrap().relevant);
            }
        }
    }
}

/// A binomial or monomial as a sorted multiset of factors per side.
fn normal_form(expr: &str) -> BTreeSet<Vec<String>> {
    expr.split('-')
        .map(|side| {
            let mut f: Vec<String> = side.split('*').map(|t| t.trim().to_string()).collect();
            f.sort();
            f
        })
        .collect()
}

#[test]
fn binomial_export_of_the_enzyme_network() {
    let net = load("enzyme_inhibitor.crn");
    let vars = variable_names(&net, true);
    let got: BTreeSet<_> = ideal_generators(&net, CasFlavor::Jg, &vars)
        .iter()
        .map(|g| normal_form(g))
        .collect();
    let want: BTreeSet<_> = ["s*e-q", "q-p*e", "q*i-r"].iter().map(|g| normal_form(g)).collect();
    assert_eq!(got, want);
    let script = export_cas_script(
        &net,
        &CasOptions {
            flavor: CasFlavor::Jg,
            lowercase: true,
        },
    );
    assert!(script.contains("ringG = QQ["));
    assert!(script.contains("decompose(idealG + ideal product gens ringG)"));
}

#[test]
fn monomial_export_of_the_receptor_network() {
    let net = load("receptor_ligand.crn");
    let script = export_cas_script(
        &net,
        &CasOptions {
            flavor: CasFlavor::Mg,
            lowercase: false,
        },
    );
    assert!(script.contains("idealG = ideal(A^2*C, A*D, E, B*C);"));
    let line = script.lines().find(|l| l.starts_with("boundaryB")).unwrap();
    let primes: BTreeSet<&str> = line
        .trim_start_matches("boundaryB = intersect(")
        .trim_end_matches(");")
        .split(", ")
        .collect();
    assert_eq!(primes, BTreeSet::from(["ideal(C,D,E)", "ideal(A,B,D,E)"]));
}

#[test]
fn chain_of_three_is_a_path_cover() {
    let net = chain(3);
    let got: Vec<Vec<usize>> = minimal_siphons(&net, &EnumConfig::default())
        .unwrap()
        .iter()
        .map(|z| z.members().to_vec())
        .collect();
    assert_eq!(got, vec![vec![1], vec![0, 2]]);
}
