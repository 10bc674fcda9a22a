//! Newton polytope combinatorics in exact integer arithmetic.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use std::collections::{BTreeSet, HashSet};

use crate::error::{Error, Result};

pub type Point = Vec<i64>;

/// The half-space `<normal, x> <= offset`, with a primitive normal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Facet {
    pub normal: Vec<i64>,
    pub offset: i64,
}

impl Facet {
    pub fn eval(&self, x: &[i64]) -> i64 {
        self.normal.iter().zip(x).map(|(a, b)| a * b).sum()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LatticePolytope {
    pub n: usize,
    /// Distinct points of the generating set, sorted lexicographically.
    pub points: Vec<Point>,
    pub vertices: Vec<Point>,
    pub facets: Vec<Facet>,
    pub dim: usize,
    /// n! times the Euclidean volume.
    pub nvol: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Triangulation {
    /// Each simplex lists n + 1 indices into `LatticePolytope::points`.
    pub simplices: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Face {
    /// Indices of the facets tight on the face; empty for the polytope itself.
    pub inequalities: Vec<usize>,
    /// Indices into the support set of the points lying on the face.
    pub points: Vec<usize>,
    pub dim: usize,
}

fn big(x: i64) -> BigInt {
    BigInt::from(x)
}

/// Determinant by fraction-free Gaussian elimination.
pub fn det(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a: Vec<Vec<BigInt>> = m.to_vec();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(k, i);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

pub fn det_i64(m: &[Vec<i64>]) -> BigInt {
    let b: Vec<Vec<BigInt>> = m.iter().map(|r| r.iter().map(|&x| big(x)).collect()).collect();
    det(&b)
}

/// Rank of a list of integer vectors.
pub fn rank(rows: &[Vec<BigInt>]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let mut a: Vec<Vec<BigInt>> = rows.to_vec();
    let cols = a[0].len();
    let mut r = 0;
    for c in 0..cols {
        let Some(piv) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, piv);
        for i in 0..a.len() {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                let g = a[r][c].clone();
                for j in 0..cols {
                    a[i][j] = &a[i][j] * &g - &a[r][j] * &f;
                }
            }
        }
        r += 1;
        if r == a.len() {
            break;
        }
    }
    r
}

fn affine_rank(points: &[Vec<BigInt>]) -> usize {
    if points.len() <= 1 {
        return 0;
    }
    let diffs: Vec<Vec<BigInt>> = points[1..]
        .iter()
        .map(|p| p.iter().zip(&points[0]).map(|(a, b)| a - b).collect())
        .collect();
    rank(&diffs)
}

/// Normal vector orthogonal to the k-1 difference vectors of k points in R^k.
fn hyperplane_normal(pts: &[&Vec<BigInt>]) -> Vec<BigInt> {
    let k = pts[0].len();
    let diffs: Vec<Vec<BigInt>> = pts[1..]
        .iter()
        .map(|p| p.iter().zip(pts[0].iter()).map(|(a, b)| a - b).collect())
        .collect();
    (0..k)
        .map(|j| {
            let minor: Vec<Vec<BigInt>> = diffs
                .iter()
                .map(|r| r.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, x)| x.clone()).collect())
                .collect();
            let d = det(&minor);
            if j % 2 == 0 {
                d
            } else {
                -d
            }
        })
        .collect()
}

fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

struct RawFacet {
    normal: Vec<BigInt>,
    offset: BigInt,
    tight: Vec<usize>,
}

fn for_each_subset(n: usize, k: usize, f: &mut dyn FnMut(&[usize])) {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, f);
            cur.pop();
        }
    }
    rec(0, n, k, &mut Vec::with_capacity(k), f);
}

/// Facets of the convex hull of a full-dimensional point set in R^k, by testing every
/// k-subset of points as a candidate supporting hyperplane.
fn hull_facets(points: &[Vec<BigInt>]) -> Vec<RawFacet> {
    let k = points[0].len();
    let mut seen: HashSet<Vec<BigInt>> = HashSet::new();
    let mut out = Vec::new();
    for_each_subset(points.len(), k, &mut |idx| {
        let pts: Vec<&Vec<BigInt>> = idx.iter().map(|&i| &points[i]).collect();
        let mut normal = hyperplane_normal(&pts);
        if normal.iter().all(|x| x.is_zero()) {
            return;
        }
        let g = normal.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
        for x in normal.iter_mut() {
            *x = &*x / &g;
        }
        let mut offset = dot(&normal, pts[0]);
        let vals: Vec<BigInt> = points.iter().map(|p| dot(&normal, p)).collect();
        let le = vals.iter().all(|v| *v <= offset);
        let ge = vals.iter().all(|v| *v >= offset);
        if !le && !ge {
            return;
        }
        if !le {
            for x in normal.iter_mut() {
                *x = -&*x;
            }
            offset = -offset;
        }
        if !seen.insert(normal.clone()) {
            return;
        }
        let tight = points
            .iter()
            .enumerate()
            .filter(|(_, p)| dot(&normal, p) == offset)
            .map(|(i, _)| i)
            .collect();
        out.push(RawFacet { normal, offset, tight });
    });
    out
}

fn orientation(simplex: &[&Vec<BigInt>]) -> BigInt {
    let rows: Vec<Vec<BigInt>> = simplex[1..]
        .iter()
        .map(|p| p.iter().zip(simplex[0].iter()).map(|(a, b)| a - b).collect())
        .collect();
    det(&rows)
}

/// Placing triangulation of a full-dimensional point set, inserting points in index order.
fn placing_triangulation(points: &[Vec<BigInt>], idx: &[usize]) -> Vec<Vec<usize>> {
    let n = points[idx[0]].len();
    let mut initial = vec![idx[0]];
    for &i in &idx[1..] {
        if initial.len() == n + 1 {
            break;
        }
        let mut cand: Vec<Vec<BigInt>> = initial.iter().map(|&j| points[j].clone()).collect();
        cand.push(points[i].clone());
        if affine_rank(&cand) == initial.len() {
            initial.push(i);
        }
    }
    let mut simplices: Vec<Vec<usize>> = vec![initial.clone()];
    for &x in idx {
        if initial.contains(&x) {
            continue;
        }
        // Boundary ridges of the current triangulation with their opposite vertex.
        let mut count: std::collections::HashMap<Vec<usize>, (usize, usize)> = Default::default();
        for s in &simplices {
            for (omit, &o) in s.iter().enumerate() {
                let mut ridge: Vec<usize> = s.iter().enumerate().filter(|&(j, _)| j != omit).map(|(_, &v)| v).collect();
                ridge.sort_unstable();
                let e = count.entry(ridge).or_insert((0, o));
                e.0 += 1;
            }
        }
        let mut added = Vec::new();
        for (ridge, (c, o)) in count {
            if c != 1 {
                continue;
            }
            let mut with_o: Vec<&Vec<BigInt>> = ridge.iter().map(|&j| &points[j]).collect();
            with_o.push(&points[o]);
            let so = orientation(&with_o).signum();
            with_o.pop();
            with_o.push(&points[x]);
            let sx = orientation(&with_o).signum();
            if !sx.is_zero() && sx != so {
                let mut s = ridge.clone();
                s.push(x);
                s.sort_unstable();
                added.push(s);
            }
        }
        added.sort();
        simplices.extend(added);
    }
    for s in simplices.iter_mut() {
        s.sort_unstable();
    }
    simplices
}

fn to_i64(x: &BigInt) -> Result<i64> {
    x.to_i64()
        .ok_or_else(|| Error::InvalidInput("polytope coordinates too large".into()))
}

/// Convex hull and Delaunay-style triangulation of a finite point set.
pub fn hull_and_triangulate(s: &[Point]) -> Result<(LatticePolytope, Triangulation)> {
    let mut points: Vec<Point> = s.to_vec();
    points.sort();
    points.dedup();
    if points.is_empty() {
        return Err(Error::EmptySupport);
    }
    let n = points[0].len();
    if points.iter().any(|p| p.len() != n) {
        return Err(Error::InvalidInput("points of mixed dimension".into()));
    }
    let bp: Vec<Vec<BigInt>> = points.iter().map(|p| p.iter().map(|&x| big(x)).collect()).collect();
    let dim = affine_rank(&bp);
    if dim < n || n == 0 {
        return Err(Error::NotFullDimensional { dim, n });
    }
    let raw = hull_facets(&bp);
    let mut facets = Vec::with_capacity(raw.len());
    for f in &raw {
        facets.push(Facet {
            normal: f.normal.iter().map(to_i64).collect::<Result<_>>()?,
            offset: to_i64(&f.offset)?,
        });
    }
    let vertex_idx: Vec<usize> = (0..points.len())
        .filter(|&i| {
            let normals: Vec<Vec<BigInt>> =
                raw.iter().filter(|f| f.tight.contains(&i)).map(|f| f.normal.clone()).collect();
            rank(&normals) == n
        })
        .collect();
    let vertices: Vec<Point> = vertex_idx.iter().map(|&i| points[i].clone()).collect();

    // Lower hull of the lifted points (x, |x|^2) gives the Delaunay cells.
    let mut lifted: Vec<Vec<BigInt>> = bp
        .iter()
        .map(|p| {
            let mut q = p.clone();
            q.push(p.iter().map(|x| x * x).sum());
            q
        })
        .collect();
    // A point straight above the first one keeps the lifted set full dimensional even when
    // all points are cospherical; it never lies on a lower facet.
    let top = lifted.iter().map(|q| q[n].clone()).max().unwrap() + 1;
    let mut apex = bp[0].clone();
    apex.push(top);
    lifted.push(apex);
    let mut simplices = Vec::new();
    for f in hull_facets(&lifted) {
        if !f.normal[n].is_negative() {
            continue;
        }
        if f.tight.len() == n + 1 {
            simplices.push(f.tight.clone());
        } else {
            simplices.extend(placing_triangulation(&bp, &f.tight));
        }
    }
    simplices.sort();
    simplices.dedup();
    let mut nvol = BigInt::zero();
    for s in &simplices {
        let pts: Vec<&Vec<BigInt>> = s.iter().map(|&i| &bp[i]).collect();
        nvol += orientation(&pts).abs();
    }
    let nvol = nvol
        .to_u64()
        .ok_or_else(|| Error::InvalidInput("polytope volume too large".into()))?;
    Ok((
        LatticePolytope { n, points, vertices, facets, dim, nvol },
        Triangulation { simplices },
    ))
}

/// Integer matrix as rows of BigInt.
pub type BigMatrix = Vec<Vec<BigInt>>;

pub fn to_big_matrix(m: &[Vec<i64>]) -> BigMatrix {
    m.iter().map(|r| r.iter().map(|&x| big(x)).collect()).collect()
}

pub fn to_i64_matrix(m: &[Vec<BigInt>]) -> Result<Vec<Vec<i64>>> {
    m.iter().map(|r| r.iter().map(to_i64).collect()).collect()
}

/// Hermite normal form by unimodular row operations: returns (U, H) with U·B = H, H lower
/// triangular, positive diagonal where B is nonsingular, and 0 <= h_ji < h_ii for j > i.
/// A zero diagonal entry marks a column without pivot when B is singular.
pub fn hermite_normal_form(b: &[Vec<i64>]) -> (BigMatrix, BigMatrix) {
    let n = b.len();
    let mut h = to_big_matrix(b);
    let mut u: BigMatrix = (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect();
    let combine = |m: &mut BigMatrix, i: usize, k: usize, x: &BigInt, y: &BigInt, z: &BigInt, w: &BigInt| {
        // row_i <- x row_i + y row_k, row_k <- z row_i + w row_k
        for c in 0..m[i].len() {
            let ri = m[i][c].clone();
            let rk = m[k][c].clone();
            m[i][c] = x * &ri + y * &rk;
            m[k][c] = z * &ri + w * &rk;
        }
    };
    for i in (0..n).rev() {
        for k in 0..i {
            if h[k][i].is_zero() {
                continue;
            }
            let a = h[i][i].clone();
            let bb = h[k][i].clone();
            let e = a.extended_gcd(&bb);
            let g = e.gcd;
            let (x, y) = (e.x, e.y);
            let z = -(&bb / &g);
            let w = &a / &g;
            combine(&mut h, i, k, &x, &y, &z, &w);
            combine(&mut u, i, k, &x, &y, &z, &w);
        }
        if h[i][i].is_negative() {
            for c in 0..n {
                h[i][c] = -&h[i][c];
                u[i][c] = -&u[i][c];
            }
        }
    }
    for j in 0..n {
        for i in (0..j).rev() {
            if h[i][i].is_zero() {
                continue;
            }
            let f = h[j][i].div_floor(&h[i][i]);
            if f.is_zero() {
                continue;
            }
            for c in 0..n {
                let hv = &h[i][c] * &f;
                h[j][c] -= hv;
                let uv = &u[i][c] * &f;
                u[j][c] -= uv;
            }
        }
    }
    (u, h)
}

fn adjugate(b: &[Vec<BigInt>]) -> BigMatrix {
    let n = b.len();
    let mut adj = vec![vec![BigInt::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            let minor: BigMatrix = b
                .iter()
                .enumerate()
                .filter(|&(r, _)| r != i)
                .map(|(_, row)| row.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, x)| x.clone()).collect())
                .collect();
            let d = det(&minor);
            // adj = transpose of the cofactor matrix
            adj[j][i] = if (i + j) % 2 == 0 { d } else { -d };
        }
    }
    adj
}

/// Lattice points of the lattice simplex with the given vertices, via coset
/// representatives of the lattice spanned by its edges.
pub fn simplex_lattice_points(vertices: &[Point]) -> Vec<Point> {
    let n = vertices[0].len();
    let v0 = &vertices[0];
    let edges: Vec<Vec<i64>> =
        vertices[1..].iter().map(|v| v.iter().zip(v0).map(|(a, b)| a - b).collect()).collect();
    let bm = to_big_matrix(&edges);
    let d = det(&bm);
    let dabs = d.abs();
    let adj = adjugate(&bm);
    let (_, h) = hermite_normal_form(&edges);
    let diag: Vec<i64> = (0..n).map(|i| h[i][i].to_i64().expect("small diagonal")).collect();
    let mut out: Vec<Point> = vertices.to_vec();
    let mut r = vec![0i64; n];
    loop {
        // lambda = r B^{-1} = r adj / det
        let lam: Vec<BigInt> = (0..n)
            .map(|j| {
                let s: BigInt = (0..n).map(|i| big(r[i]) * &adj[i][j]).sum();
                let s = if d.is_negative() { -s } else { s };
                s.mod_floor(&dabs)
            })
            .collect();
        let total: BigInt = lam.iter().sum();
        if total <= dabs {
            let pt: Point = (0..n)
                .map(|c| {
                    let s: BigInt = (0..n).map(|i| &lam[i] * big(edges[i][c])).sum();
                    v0[c] + (s / &dabs).to_i64().expect("point fits")
                })
                .collect();
            out.push(pt);
        }
        let mut k = 0;
        loop {
            if k == n {
                out.sort();
                out.dedup();
                return out;
            }
            r[k] += 1;
            if r[k] < diag[k] {
                break;
            }
            r[k] = 0;
            k += 1;
        }
    }
}

impl LatticePolytope {
    /// Whether `mu` lies in the dilation `d·Δ`.
    pub fn contains(&self, d: i64, mu: &[i64]) -> bool {
        self.facets.iter().all(|f| f.eval(mu) <= d * f.offset)
    }

    /// Integer points of `d·Δ`, sorted lexicographically.
    pub fn lattice_points(&self, tri: &Triangulation, d: u32) -> Vec<Point> {
        if d == 0 {
            return vec![vec![0; self.n]];
        }
        let d = d as i64;
        let mut out = BTreeSet::new();
        for s in &tri.simplices {
            let verts: Vec<Point> = s
                .iter()
                .map(|&i| self.points[i].iter().map(|&x| x * d).collect())
                .collect();
            out.extend(simplex_lattice_points(&verts));
        }
        out.into_iter().collect()
    }

    /// Integer points of `d·Δ` by scanning the bounding box.
    pub fn lattice_points_by_box(&self, d: u32) -> Vec<Point> {
        let d = d as i64;
        let lo: Vec<i64> = (0..self.n).map(|i| self.vertices.iter().map(|v| v[i]).min().unwrap() * d).collect();
        let hi: Vec<i64> = (0..self.n).map(|i| self.vertices.iter().map(|v| v[i]).max().unwrap() * d).collect();
        let mut out = Vec::new();
        let mut x = lo.clone();
        loop {
            if self.contains(d, &x) {
                out.push(x.clone());
            }
            let mut k = self.n;
            loop {
                if k == 0 {
                    out.sort();
                    return out;
                }
                k -= 1;
                x[k] += 1;
                if x[k] <= hi[k] {
                    break;
                }
                x[k] = lo[k];
            }
        }
    }

    /// All nonempty faces with their restriction to `support`, the polytope itself included.
    pub fn faces(&self, support: &[Point]) -> Vec<Face> {
        let mut sets: BTreeSet<Vec<usize>> = BTreeSet::new();
        let all: Vec<usize> = (0..support.len()).collect();
        let facet_sets: Vec<Vec<usize>> = self
            .facets
            .iter()
            .map(|f| all.iter().copied().filter(|&i| f.eval(&support[i]) == f.offset).collect())
            .collect();
        let mut frontier: Vec<Vec<usize>> = facet_sets.iter().filter(|s| !s.is_empty()).cloned().collect();
        sets.insert(all.clone());
        for s in &frontier {
            sets.insert(s.clone());
        }
        while let Some(s) = frontier.pop() {
            for f in &facet_sets {
                let inter: Vec<usize> = s.iter().copied().filter(|i| f.contains(i)).collect();
                if !inter.is_empty() && sets.insert(inter.clone()) {
                    frontier.push(inter);
                }
            }
        }
        self.faces_from_sets(support, sets)
    }

    fn faces_from_sets(&self, support: &[Point], sets: BTreeSet<Vec<usize>>) -> Vec<Face> {
        sets.into_iter()
            .map(|pts| {
                let inequalities = if pts.len() == support.len() {
                    Vec::new()
                } else {
                    (0..self.facets.len())
                        .filter(|&j| pts.iter().all(|&i| self.facets[j].eval(&support[i]) == self.facets[j].offset))
                        .collect()
                };
                let bp: Vec<Vec<BigInt>> = pts.iter().map(|&i| support[i].iter().map(|&x| big(x)).collect()).collect();
                Face { inequalities, dim: affine_rank(&bp), points: pts }
            })
            .collect()
    }

    /// Faces by enumerating every subset of facet inequalities; exponential, for testing.
    pub fn faces_by_inequality_subsets(&self, support: &[Point]) -> Vec<Face> {
        let m = self.facets.len();
        let mut sets = BTreeSet::new();
        for mask in 0u64..(1u64 << m) {
            let pts: Vec<usize> = (0..support.len())
                .filter(|&i| (0..m).all(|j| mask >> j & 1 == 0 || self.facets[j].eval(&support[i]) == self.facets[j].offset))
                .collect();
            if !pts.is_empty() {
                sets.insert(pts);
            }
        }
        self.faces_from_sets(support, sets)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Confinement {
    /// Unimodular matrix acting on exponent column vectors.
    pub u: Vec<Vec<i64>>,
    pub translation: Vec<i64>,
    pub points: Vec<Point>,
    pub confined: bool,
}

fn gram_det(base: &Point, pts: &[&Point]) -> BigInt {
    let vecs: Vec<Vec<BigInt>> =
        pts.iter().map(|p| p.iter().zip(base).map(|(a, b)| big(a - b)).collect()).collect();
    let g: BigMatrix = vecs.iter().map(|x| vecs.iter().map(|y| dot(x, y)).collect()).collect();
    det(&g)
}

/// Unimodular change of exponent coordinates shrinking the bounding box of the support.
pub fn confine(s: &[Point]) -> Result<Confinement> {
    let (poly, _) = hull_and_triangulate(s)?;
    let n = poly.n;
    let pts = &poly.points;
    // Greedy simplex growth by Gram determinant.
    let mut chosen: Vec<usize> = vec![0];
    while chosen.len() < n + 1 {
        let base = &pts[chosen[0]];
        let mut best: Option<(BigInt, usize)> = None;
        for i in 0..pts.len() {
            if chosen.contains(&i) {
                continue;
            }
            let mut cand: Vec<&Point> = chosen[1..].iter().map(|&j| &pts[j]).collect();
            cand.push(&pts[i]);
            let g = gram_det(base, &cand);
            if best.as_ref().is_none_or(|(bg, _)| g > *bg) {
                best = Some((g, i));
            }
        }
        chosen.push(best.expect("full dimensional").1);
    }
    // Local exchange: swap a vertex for any point that increases |det|.
    let simplex_det = |c: &[usize]| -> BigInt {
        let rows: Vec<Vec<i64>> =
            c[1..].iter().map(|&j| pts[j].iter().zip(&pts[c[0]]).map(|(a, b)| a - b).collect()).collect();
        det_i64(&rows).abs()
    };
    let mut cur = simplex_det(&chosen);
    let mut improved = true;
    while improved {
        improved = false;
        for slot in 0..=n {
            for i in 0..pts.len() {
                if chosen.contains(&i) {
                    continue;
                }
                let mut c = chosen.clone();
                c[slot] = i;
                let d = simplex_det(&c);
                if d > cur {
                    cur = d;
                    chosen = c;
                    improved = true;
                }
            }
        }
    }
    // Columns of the edge matrix are the simplex edges; row operations transform coordinates.
    let edge_cols: Vec<Vec<i64>> = (0..n)
        .map(|r| (1..=n).map(|k| pts[chosen[k]][r] - pts[chosen[0]][r]).collect())
        .collect();
    let (u, _) = hermite_normal_form(&edge_cols);
    let u = to_i64_matrix(&u)?;
    let apply = |p: &Point| -> Point { (0..n).map(|r| (0..n).map(|c| u[r][c] * p[c]).sum()).collect() };
    let moved: Vec<Point> = s.iter().map(apply).collect();
    let translation: Vec<i64> = (0..n).map(|i| -moved.iter().map(|p| p[i]).min().unwrap()).collect();
    let points: Vec<Point> =
        moved.iter().map(|p| p.iter().zip(&translation).map(|(a, b)| a + b).collect()).collect();
    let box_product: BigInt = (0..n)
        .map(|i| big(points.iter().map(|p| p[i]).max().unwrap()))
        .product();
    let bound = big(n as i64).pow(n as u32) * big(poly.nvol as i64);
    Ok(Confinement { u, translation, points, confined: box_product <= bound })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pts(v: &[&[i64]]) -> Vec<Point> {
        v.iter().map(|p| p.to_vec()).collect()
    }

    #[test]
    fn triangles() {
        let (p, t) = hull_and_triangulate(&pts(&[&[0, 0], &[1, 0], &[0, 1]])).unwrap();
        assert_eq!(p.nvol, 1);
        assert_eq!(t.simplices.len(), 1);
        let (p, _) = hull_and_triangulate(&pts(&[&[0, 0], &[3, 0], &[0, 2]])).unwrap();
        assert_eq!(p.nvol, 6);
        assert_eq!(p.facets.len(), 3);
    }

    #[test]
    fn cospherical_square() {
        let (p, t) = hull_and_triangulate(&pts(&[&[0, 0], &[1, 0], &[0, 1], &[1, 1]])).unwrap();
        assert_eq!(p.nvol, 2);
        assert_eq!(t.simplices.len(), 2);
        let (p, t) = hull_and_triangulate(&pts(&[
            &[0, 0, 0], &[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[1, 1, 0], &[1, 0, 1], &[0, 1, 1], &[1, 1, 1],
        ]))
        .unwrap();
        assert_eq!(p.nvol, 6);
        assert_eq!(t.simplices.len(), 6);
    }

    #[test]
    fn not_full_dimensional() {
        assert_eq!(
            hull_and_triangulate(&pts(&[&[0, 0], &[1, 1], &[2, 2]])).unwrap_err(),
            Error::NotFullDimensional { dim: 1, n: 2 }
        );
    }

    #[test]
    fn lattice_points_unit_simplex() {
        let (p, t) = hull_and_triangulate(&pts(&[&[0, 0], &[1, 0], &[0, 1]])).unwrap();
        assert_eq!(p.lattice_points(&t, 0), vec![vec![0, 0]]);
        assert_eq!(p.lattice_points(&t, 1).len(), 3);
        assert_eq!(p.lattice_points(&t, 2).len(), 6);
    }

    #[test]
    fn hnf_examples() {
        let (u, h) = hermite_normal_form(&[vec![1, 0], vec![0, 1]]);
        assert_eq!(to_i64_matrix(&u).unwrap(), vec![vec![1, 0], vec![0, 1]]);
        assert_eq!(to_i64_matrix(&h).unwrap(), vec![vec![1, 0], vec![0, 1]]);
        let b = vec![vec![2, 0], vec![1, 3]];
        let (u, h) = hermite_normal_form(&b);
        check_hnf(&b, &u, &h);
        assert_eq!(&h[0][0] * &h[1][1], big(6));
    }

    fn check_hnf(b: &[Vec<i64>], u: &BigMatrix, h: &BigMatrix) {
        let n = b.len();
        let bb = to_big_matrix(b);
        for i in 0..n {
            for j in 0..n {
                let s: BigInt = (0..n).map(|k| &u[i][k] * &bb[k][j]).sum();
                assert_eq!(s, h[i][j]);
                if j > i {
                    assert!(h[i][j].is_zero());
                }
            }
        }
        assert_eq!(det(u).abs(), BigInt::one());
        for i in 0..n {
            if !h[i][i].is_zero() {
                assert!(h[i][i].is_positive());
                for j in i + 1..n {
                    assert!(!h[j][i].is_negative() && h[j][i] < h[i][i]);
                }
            }
        }
    }

    #[test]
    fn hnf_random_preserves_determinant() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut done = 0;
        while done < 50 {
            let n = rng.gen_range(1..=4);
            let b: Vec<Vec<i64>> = (0..n).map(|_| (0..n).map(|_| rng.gen_range(-9..=9)).collect()).collect();
            let d = det_i64(&b);
            if d.is_zero() {
                continue;
            }
            let (u, h) = hermite_normal_form(&b);
            check_hnf(&b, &u, &h);
            assert_eq!(det(&h).abs(), d.abs());
            done += 1;
        }
    }

    #[test]
    fn hnf_singular() {
        let b = vec![vec![1, 2], vec![2, 4]];
        let (u, h) = hermite_normal_form(&b);
        check_hnf(&b, &u, &h);
        assert!(h[0][0].is_zero() || h[1][1].is_zero());
    }

    #[test]
    fn faces_of_segment_and_triangle() {
        let s = pts(&[&[0], &[1]]);
        let (p, _) = hull_and_triangulate(&s).unwrap();
        assert_eq!(p.faces(&s).len(), 3);
        let s = pts(&[&[0, 0], &[1, 0], &[0, 1]]);
        let (p, _) = hull_and_triangulate(&s).unwrap();
        let f = p.faces(&s);
        assert_eq!(f.len(), 7);
        assert_eq!(f.iter().filter(|x| x.dim == 0).count(), 3);
        assert_eq!(f.iter().filter(|x| x.dim == 1).count(), 3);
        assert_eq!(f.iter().filter(|x| x.inequalities.is_empty()).count(), 1);
    }

    #[test]
    fn sliver_is_confined() {
        let s = pts(&[&[0, 0], &[100, 1], &[99, 1]]);
        let c = confine(&s).unwrap();
        assert!(c.confined);
        let (p, _) = hull_and_triangulate(&s).unwrap();
        let (q, _) = hull_and_triangulate(&c.points).unwrap();
        assert_eq!(p.nvol, q.nvol);
        let prod: i64 = (0..2).map(|i| c.points.iter().map(|x| x[i]).max().unwrap()).product();
        assert!(prod <= 4 * p.nvol as i64);
    }

    fn random_points(rng: &mut ChaCha8Rng, n: usize, delta: i64, k: usize) -> Vec<Point> {
        (0..k).map(|_| (0..n).map(|_| rng.gen_range(0..=delta)).collect()).collect()
    }

    #[test]
    fn random_polytopes_triangulation_and_lattice_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut done = 0;
        while done < 40 {
            let n = rng.gen_range(1..=3);
            let k = rng.gen_range(n + 1..=n + 4);
            let s = random_points(&mut rng, n, 5, k);
            let Ok((p, t)) = hull_and_triangulate(&s) else { continue };
            let mut vol = 0u64;
            for simplex in &t.simplices {
                let rows: Vec<Vec<i64>> = simplex[1..]
                    .iter()
                    .map(|&i| p.points[i].iter().zip(&p.points[simplex[0]]).map(|(a, b)| a - b).collect())
                    .collect();
                let d = det_i64(&rows).abs().to_u64().unwrap();
                assert!(d > 0);
                vol += d;
            }
            assert_eq!(vol, p.nvol);
            for v in &p.vertices {
                assert!(p.contains(1, v));
            }
            for d in 0..=(n as u32 + 2).min(3) {
                assert_eq!(p.lattice_points(&t, d), p.lattice_points_by_box(d));
            }
            let f1 = p.faces(&p.points);
            let f2 = p.faces_by_inequality_subsets(&p.points);
            assert_eq!(f1, f2);
            done += 1;
        }
    }

    proptest! {
        #[test]
        fn confinement_preserves_volume_and_lattice_count(
            raw in proptest::collection::vec(proptest::collection::vec(-6i64..=6, 2), 3..7)
        ) {
            if let Ok((p, t)) = hull_and_triangulate(&raw) {
                let c = confine(&raw).unwrap();
                let (q, tq) = hull_and_triangulate(&c.points).unwrap();
                prop_assert_eq!(p.nvol, q.nvol);
                prop_assert_eq!(p.lattice_points(&t, 1).len(), q.lattice_points(&tq, 1).len());
                prop_assert_eq!(det_i64(&c.u).abs(), BigInt::one());
            }
        }
    }
}
