//! Fixture generators shared by the integration tests and the acceptance harness.
#![allow(dead_code)]

use dwork_zeta::cone::Mode;
use dwork_zeta::input::{FqPolynomial, Problem};
use dwork_zeta::oracle;
use dwork_zeta::padic::FieldSpec;
use dwork_zeta::pipeline::{prepare, Options};
use dwork_zeta::polytope::{confine, hull_and_triangulate};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Terms = Vec<(Vec<i64>, Vec<i64>)>;

pub struct Fixture {
    pub name: String,
    pub problem: Problem,
}

pub fn problem(p: u64, a: usize, mode: Mode, n: usize, terms: &[(Vec<i64>, Vec<i64>)]) -> Problem {
    let field = FieldSpec::new(p, a, None, 1).expect("valid field");
    let poly = FqPolynomial::new(n, p, a, terms).expect("valid polynomial");
    poly.check_mode(mode, p).expect("valid for mode");
    Problem { field, mode, poly, precision: None, confine: false }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// y^2 = x^3 + c x + d as the affine polynomial x^3 + c x + d - y^2.
pub fn elliptic_affine(p: u64, c: i64, d: i64) -> Problem {
    problem(p, 1, Mode::Affine, 2, &[(vec![3, 0], vec![1]), (vec![1, 0], vec![c]), (vec![0, 0], vec![d]), (vec![0, 2], vec![-1])])
}

/// The projective closure x^3 + c x z^2 + d z^3 - y^2 z.
pub fn elliptic_projective(p: u64, c: i64, d: i64) -> Problem {
    problem(
        p,
        1,
        Mode::Projective,
        3,
        &[(vec![3, 0, 0], vec![1]), (vec![1, 0, 2], vec![c]), (vec![0, 0, 3], vec![d]), (vec![0, 2, 1], vec![-1])],
    )
}

/// `count` coefficient pairs (c, d) with c d != 0 and 4 c^3 + 27 d^2 != 0 modulo p.
pub fn elliptic_parameters(p: u64, count: usize, seed: u64) -> Vec<(i64, i64)> {
    let mut all = Vec::new();
    let pi = p as i64;
    for c in 1..pi {
        for d in 1..pi {
            if (4 * c * c * c + 27 * d * d).rem_euclid(pi) != 0 {
                all.push((c, d));
            }
        }
    }
    all.shuffle(&mut rng(seed ^ p));
    all.truncate(count);
    all
}

/// a1 x^m1 + a2 y^m2 + b in affine mode.
pub fn fermat(p: u64, m1: i64, m2: i64, a1: i64, a2: i64, b: i64) -> Problem {
    problem(p, 1, Mode::Affine, 2, &[(vec![m1, 0], vec![a1]), (vec![0, m2], vec![a2]), (vec![0, 0], vec![b])])
}

pub fn fermat_fixtures() -> Vec<(Fixture, i64, i64)> {
    let mut out = Vec::new();
    let mut r = rng(3);
    for p in [5u64, 7] {
        for m1 in 2..=4i64 {
            for m2 in m1..=4i64 {
                if (m1 * m2) % p as i64 == 0 {
                    continue;
                }
                let (a1, a2, b) = (r.gen_range(1..p as i64), r.gen_range(1..p as i64), r.gen_range(1..p as i64));
                out.push((
                    Fixture { name: format!("fermat p={p} {a1}x^{m1}+{a2}y^{m2}+{b}"), problem: fermat(p, m1, m2, a1, a2, b) },
                    m1,
                    m2,
                ));
            }
        }
    }
    out
}

fn random_coeff(r: &mut ChaCha8Rng, p: u64, a: usize) -> Vec<i64> {
    loop {
        let c: Vec<i64> = (0..a).map(|_| r.gen_range(0..p as i64)).collect();
        if c.iter().any(|&x| x != 0) {
            return c;
        }
    }
}

/// (n, p, a) combinations whose point counts up to r = 4 fit the enumeration budget.
pub const TORIC_COMBOS: [(usize, u64, usize); 10] =
    [(1, 3, 1), (1, 5, 1), (1, 7, 1), (1, 3, 2), (1, 5, 2), (1, 7, 2), (2, 3, 1), (2, 5, 1), (2, 7, 1), (2, 3, 2)];

fn random_support(r: &mut ChaCha8Rng, n: usize, max_v: u64) -> Option<Vec<Vec<i64>>> {
    let s = r.gen_range((n + 1)..=6);
    let mut pts: Vec<Vec<i64>> = Vec::new();
    let w = if n == 1 { 4 } else { 2 };
    while pts.len() < s {
        let pt: Vec<i64> = (0..n).map(|_| r.gen_range(-w..=w)).collect();
        if !pts.contains(&pt) {
            pts.push(pt);
        }
    }
    let (poly, _) = hull_and_triangulate(&pts).ok()?;
    if poly.nvol > max_v || poly.nvol < 2 {
        return None;
    }
    let c = confine(&pts).ok()?;
    c.confined.then_some(c.points)
}

/// Random nondegenerate confined Laurent polynomials with v <= max_v and s <= 6.
pub fn random_toric(count: usize, seed: u64, max_v: u64) -> Vec<Fixture> {
    let mut r = rng(seed);
    let mut out = Vec::new();
    let mut k = 0;
    while out.len() < count {
        let (n, p, a) = TORIC_COMBOS[k % TORIC_COMBOS.len()];
        let Some(support) = random_support(&mut r, n, max_v) else { continue };
        let terms: Terms = support.iter().map(|e| (e.clone(), random_coeff(&mut r, p, a))).collect();
        let pr = problem(p, a, Mode::Toric, n, &terms);
        if oracle::find_degeneracy_witness(&pr.field, &pr.poly, 2, oracle::DEFAULT_BUDGET).ok().flatten().is_some() {
            continue;
        }
        if prepare(&pr, &Options::default()).is_err() {
            continue;
        }
        out.push(Fixture { name: format!("toric#{} n={n} p={p} a={a} s={}", out.len(), terms.len()), problem: pr });
        k += 1;
    }
    out
}

pub fn oracle_counts(pr: &Problem, r: usize) -> Vec<i128> {
    (1..=r)
        .map(|k| oracle::count_points(&pr.field, &pr.poly, pr.mode, k, oracle::DEFAULT_BUDGET).expect("in budget") as i128)
        .collect()
}
