//! Vertex data `w -> wt(Xi_w(delta))`, the GGMS conditions, and exact
//! polytopes with both a vertex and an inequality description.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::affine_weyl::rat_string;
use crate::error::{Error, Result};
use crate::gallery::{Gallery, GalleryModel};
use crate::root_system::{Coweight, Point, Rat, RootSystem, WeylElement};

/// `mu_w` for every `w`, indexed by the Weyl element index.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VertexDatum {
    pub mu: Vec<Coweight>,
}

impl VertexDatum {
    pub fn get(&self, w: WeylElement) -> &Coweight {
        &self.mu[w.index()]
    }
}

/// A failed GGMS condition `mu_v >=_w mu_w`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GgmsViolation {
    pub v: WeylElement,
    pub w: WeylElement,
    /// Fundamental weight index for a failed pairing inequality, `None` when
    /// the coroot-span condition failed.
    pub i: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Facet {
    pub w: WeylElement,
    pub i: usize,
    /// Linear functional `p -> <p, w Lambda_i>` in fundamental-coweight coordinates.
    pub normal: Vec<Rat>,
    pub offset: Rat,
}

impl Facet {
    pub fn eval(&self, p: &[Rat]) -> Rat {
        self.normal.iter().zip(p).map(|(a, b)| *a * *b).sum()
    }
}

/// `conv{mu_w}` with its inequality description `<p, w Lambda_i> <= <mu_w, w Lambda_i>`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalPolytope {
    pub vertices: Vec<Point>,
    pub facets: Vec<Facet>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct FacetJson {
    /// Reduced word, simple reflections numbered from 1.
    pub w: Vec<usize>,
    /// Fundamental weight index, from 1.
    pub i: usize,
    pub offset: String,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct PolytopeJson {
    pub vertices: Vec<Vec<String>>,
    pub facets: Vec<FacetJson>,
    pub weight: Vec<String>,
    pub lambda: Vec<String>,
}

/// Functional `p -> <p, w Lambda_i>`.
pub fn fundamental_weight_functional(rs: &RootSystem, w: WeylElement, i: usize) -> Vec<Rat> {
    let r = rs.rank();
    (0..r)
        .map(|j| {
            let mut e = vec![Rat::zero(); r];
            e[j] = Rat::one();
            rs.pair_fundamental_weight(&e, w, i)
        })
        .collect()
}

impl GalleryModel {
    pub fn vertex_data(&self, g: &Gallery) -> VertexDatum {
        let rs = self.root_system();
        VertexDatum {
            mu: rs
                .weyl_elements()
                .map(|w| self.weight(&self.xi(g, w)))
                .collect(),
        }
    }

    /// LS galleries of weight `nu` with their polytopes.
    pub fn polytope_collection(
        &self,
        nu: &Coweight,
    ) -> Result<Vec<(Gallery, VertexDatum, RationalPolytope)>> {
        let rs = self.root_system();
        self.ls_galleries()
            .into_iter()
            .filter(|g| &self.weight(g) == nu)
            .map(|g| {
                let d = self.vertex_data(&g);
                let p = polytope(rs, &d)?;
                Ok((g, d, p))
            })
            .collect()
    }

    /// Edge law `mu_{w s_i} - mu_w = -phi_i(e_w^max g) w alpha_i^vee` for
    /// every ascent `w < w s_i`.
    pub fn check_edge_law(&self, g: &Gallery, d: &VertexDatum) -> Result<()> {
        let rs = self.root_system();
        for w in rs.weyl_elements() {
            for i in 0..rs.rank() {
                let c = edge_length(rs, d, w, i)?;
                let ws = rs.mul(w, rs.simple_reflection(i));
                if rs.length(ws) > rs.length(w) {
                    let phi = self.phi(&self.e_max_w(g, w), i) as i64;
                    if c != phi {
                        return Err(Error::Invariant(format!(
                            "edge length {c} != phi {phi} at w={:?}, i={}",
                            rs.word(w),
                            i + 1
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn polytope_json(&self, d: &VertexDatum, p: &RationalPolytope) -> PolytopeJson {
        let rs = self.root_system();
        let coords =
            |x: &[Rat]| -> Vec<String> { rs.to_coroot_coords(x).iter().map(rat_string).collect() };
        PolytopeJson {
            vertices: p.vertices.iter().map(|v| coords(v)).collect(),
            facets: p
                .facets
                .iter()
                .map(|f| FacetJson {
                    w: rs.word(f.w).iter().map(|i| i + 1).collect(),
                    i: f.i + 1,
                    offset: rat_string(&f.offset),
                })
                .collect(),
            weight: coords(&d.get(rs.identity()).to_point()),
            lambda: coords(&self.lambda().to_point()),
        }
    }
}

/// Both readings of `mu_v >=_w mu_w`: the pairing inequalities against the
/// transported fundamental weights, and membership of `w^{-1}(mu_w - mu_v)`
/// in the nonnegative integer span of the simple coroots.
pub fn ggms_check(rs: &RootSystem, d: &VertexDatum) -> std::result::Result<(), GgmsViolation> {
    let n = d.mu.len();
    for w in rs.weyl_elements() {
        for vi in 0..n {
            let v = WeylElement(vi);
            let diff = d.get(v).sub(d.get(w)).to_point();
            for i in 0..rs.rank() {
                if rs.pair_fundamental_weight(&diff, w, i).is_positive() {
                    return Err(GgmsViolation { v, w, i: Some(i) });
                }
            }
            let back = rs.act_point(rs.inverse(w), &d.get(w).sub(d.get(v)).to_point());
            if rs
                .to_coroot_coords(&back)
                .iter()
                .any(|c| !c.is_integer() || c.is_negative())
            {
                return Err(GgmsViolation { v, w, i: None });
            }
        }
    }
    Ok(())
}

/// `c >= 0` with `mu_{w s_i} - mu_w = -c w alpha_i^vee`.
pub fn edge_length(rs: &RootSystem, d: &VertexDatum, w: WeylElement, i: usize) -> Result<i64> {
    let ws = rs.mul(w, rs.simple_reflection(i));
    let diff = d.get(ws).sub(d.get(w));
    let dir = rs.act_coweight(w, &rs.coroot(rs.simple_root(i)));
    let k = dir
        .0
        .iter()
        .position(|&x| x != 0)
        .expect("coroots are nonzero");
    let c = Rat::new(-diff.0[k], dir.0[k]);
    let parallel = diff
        .0
        .iter()
        .zip(&dir.0)
        .all(|(&a, &b)| Rat::from_integer(a) == -c * Rat::from_integer(b));
    if !parallel || !c.is_integer() || c.is_negative() {
        return Err(Error::Invariant(format!(
            "mu_(w s_{}) - mu_w = {diff} is not a nonpositive multiple of w alpha^vee = {dir}",
            i + 1
        )));
    }
    Ok(c.to_integer())
}

/// Builds the polytope and checks that its two descriptions agree.
pub fn polytope(rs: &RootSystem, d: &VertexDatum) -> Result<RationalPolytope> {
    let mut pts: Vec<Point> = d.mu.iter().map(|m| m.to_point()).collect();
    pts.sort();
    pts.dedup();
    let probes: Vec<Vec<Rat>> = rs
        .weyl_elements()
        .map(|w| {
            (0..rs.rank()).fold(vec![Rat::zero(); rs.rank()], |acc, i| {
                let f = fundamental_weight_functional(rs, w, i);
                acc.iter().zip(&f).map(|(a, b)| *a + *b).collect()
            })
        })
        .collect();
    let vertices = extreme_points_with(&pts, &probes);
    let mut facets = Vec::new();
    for w in rs.weyl_elements() {
        for i in 0..rs.rank() {
            let normal = fundamental_weight_functional(rs, w, i);
            let mut f = Facet {
                w,
                i,
                normal,
                offset: Rat::zero(),
            };
            f.offset = f.eval(&d.get(w).to_point());
            facets.push(f);
        }
    }
    let poly = RationalPolytope { vertices, facets };
    poly.verify(rs.rank())?;
    Ok(poly)
}

impl RationalPolytope {
    /// V-in-H, facet support, and (for rank at most 3) equality of the
    /// vertex set with the vertices of the inequality system.
    pub fn verify(&self, rank: usize) -> Result<()> {
        for v in &self.vertices {
            if let Some(f) = self.facets.iter().find(|f| f.eval(v) > f.offset) {
                return Err(Error::Invariant(format!(
                    "vertex violates the inequality for (w{}, {})",
                    f.w.index(),
                    f.i
                )));
            }
        }
        for f in &self.facets {
            if !self.vertices.iter().any(|v| f.eval(v) == f.offset) {
                return Err(Error::Invariant(format!(
                    "inequality (w{}, {}) touches no vertex",
                    f.w.index(),
                    f.i
                )));
            }
        }
        if rank <= 3 {
            let h = self.h_vertices(rank);
            let v: BTreeSet<Point> = self.vertices.iter().cloned().collect();
            if h != v {
                return Err(Error::Invariant(format!(
                    "vertex description has {} points, inequality description {}",
                    v.len(),
                    h.len()
                )));
            }
        }
        Ok(())
    }

    /// Vertices of the inequality system, by solving every `rank`-subset of
    /// distinct tight constraints.
    pub fn h_vertices(&self, rank: usize) -> BTreeSet<Point> {
        let mut cons: Vec<(Vec<Rat>, Rat)> = Vec::new();
        for f in &self.facets {
            match cons.iter_mut().find(|(n, _)| *n == f.normal) {
                Some((_, b)) => {
                    if f.offset < *b {
                        *b = f.offset;
                    }
                }
                None => cons.push((f.normal.clone(), f.offset)),
            }
        }
        let mut out = BTreeSet::new();
        let mut idx: Vec<usize> = (0..rank).collect();
        if cons.len() < rank {
            return out;
        }
        loop {
            let rows: Vec<Vec<Rat>> = idx
                .iter()
                .map(|&k| {
                    let mut r = cons[k].0.clone();
                    r.push(cons[k].1);
                    r
                })
                .collect();
            if let Some(x) = solve_square(rows) {
                if cons.iter().all(|(n, b)| dot(n, &x) <= *b) {
                    out.insert(x);
                }
            }
            // Next combination.
            let mut k = rank;
            loop {
                if k == 0 {
                    return out;
                }
                k -= 1;
                if idx[k] < cons.len() - rank + k {
                    idx[k] += 1;
                    for m in k + 1..rank {
                        idx[m] = idx[m - 1] + 1;
                    }
                    break;
                }
            }
        }
    }

    /// OFF export; faces are listed only for full-dimensional polytopes in
    /// rank 3.
    pub fn to_off(&self, rs: &RootSystem) -> String {
        let rank = rs.rank();
        let coords: Vec<Vec<f64>> = self
            .vertices
            .iter()
            .map(|v| {
                rs.to_coroot_coords(v)
                    .iter()
                    .map(|c| *c.numer() as f64 / *c.denom() as f64)
                    .collect()
            })
            .collect();
        let faces = if rank == 3 {
            self.two_faces()
        } else {
            Vec::new()
        };
        let mut out = String::from("OFF\n");
        writeln!(out, "{} {} 0", coords.len(), faces.len()).unwrap();
        for c in &coords {
            let mut c = c.clone();
            c.resize(3, 0.0);
            writeln!(out, "{} {} {}", c[0], c[1], c[2]).unwrap();
        }
        for f in &faces {
            let ids: Vec<String> = f.iter().map(|i| i.to_string()).collect();
            writeln!(out, "{} {}", f.len(), ids.join(" ")).unwrap();
        }
        out
    }

    fn two_faces(&self) -> Vec<Vec<usize>> {
        let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
        let mut faces = Vec::new();
        for f in &self.facets {
            let tight: Vec<usize> = (0..self.vertices.len())
                .filter(|&k| f.eval(&self.vertices[k]) == f.offset)
                .collect();
            if tight.len() < 3 || !seen.insert(tight.clone()) {
                continue;
            }
            if let Some(order) = cyclic_order(&self.vertices, &tight, &f.normal) {
                faces.push(order);
            }
        }
        faces
    }
}

/// Orders coplanar points of a 3-dimensional polygon cyclically.
fn cyclic_order(pts: &[Point], ids: &[usize], normal: &[Rat]) -> Option<Vec<usize>> {
    let n = Rat::from_integer(ids.len() as i64);
    let c: Point = (0..3)
        .map(|k| ids.iter().map(|&i| pts[i][k]).sum::<Rat>() / n)
        .collect();
    let rel = |i: usize| -> Point { (0..3).map(|k| pts[i][k] - c[k]).collect() };
    let u = rel(ids[0]);
    let v = cross(normal, &u);
    let coords: Vec<(Rat, Rat, usize)> = ids
        .iter()
        .map(|&i| (dot(&rel(i), &u), dot(&rel(i), &v), i))
        .collect();
    if coords.iter().all(|(_, b, _)| b.is_zero()) {
        return None;
    }
    let mut sorted = coords;
    sorted.sort_by(|a, b| {
        let ha = half(a.0, a.1);
        let hb = half(b.0, b.1);
        ha.cmp(&hb).then_with(|| {
            let cr = a.0 * b.1 - a.1 * b.0;
            Rat::zero().cmp(&cr)
        })
    });
    Some(sorted.into_iter().map(|x| x.2).collect())
}

fn half(x: Rat, y: Rat) -> u8 {
    if y.is_positive() || (y.is_zero() && !x.is_negative()) {
        0
    } else {
        1
    }
}

fn cross(a: &[Rat], b: &[Rat]) -> Point {
    vec![
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    a.iter().zip(b).map(|(x, y)| *x * *y).sum()
}

/// Solves the square system given as augmented rows; `None` if singular.
fn solve_square(mut m: Vec<Vec<Rat>>) -> Option<Point> {
    let n = m.len();
    for col in 0..n {
        let piv = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, piv);
        let p = m[col][col];
        for x in m[col].iter_mut() {
            *x /= p;
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col];
                let pr = m[col].clone();
                for (x, y) in m[r].iter_mut().zip(pr) {
                    *x -= f * y;
                }
            }
        }
    }
    Some(m.into_iter().map(|r| r[n]).collect())
}

/// Whether `q` is a convex combination of `pts`, by Caratheodory over
/// affinely independent subsets.
fn in_hull(q: &[Rat], pts: &[&Point]) -> bool {
    let d = q.len();
    let max = (d + 1).min(pts.len());
    for size in 1..=max {
        let mut idx: Vec<usize> = (0..size).collect();
        loop {
            if let Some(lam) = barycentric(q, &idx.iter().map(|&i| pts[i]).collect::<Vec<_>>()) {
                if lam.iter().all(|l| !l.is_negative()) {
                    return true;
                }
            }
            let mut k = size;
            let mut done = true;
            while k > 0 {
                k -= 1;
                if idx[k] < pts.len() - size + k {
                    idx[k] += 1;
                    for m in k + 1..size {
                        idx[m] = idx[m - 1] + 1;
                    }
                    done = false;
                    break;
                }
            }
            if done {
                break;
            }
        }
    }
    false
}

/// Barycentric coordinates of `q` for affinely independent `pts`, if `q`
/// lies in their affine span.
fn barycentric(q: &[Rat], pts: &[&Point]) -> Option<Vec<Rat>> {
    let d = q.len();
    let s = pts.len();
    // Rows: coordinates, then the affine constraint; columns: lambdas | rhs.
    let mut m: Vec<Vec<Rat>> = (0..d)
        .map(|k| {
            let mut row: Vec<Rat> = pts.iter().map(|p| p[k]).collect();
            row.push(q[k]);
            row
        })
        .collect();
    let mut aff = vec![Rat::one(); s];
    aff.push(Rat::one());
    m.push(aff);
    let rows = m.len();
    let mut r = 0;
    for col in 0..s {
        let piv = (r..rows).find(|&x| !m[x][col].is_zero())?;
        m.swap(r, piv);
        let p = m[r][col];
        for x in m[r].iter_mut() {
            *x /= p;
        }
        for x in 0..rows {
            if x != r && !m[x][col].is_zero() {
                let f = m[x][col];
                let pr = m[r].clone();
                for (a, b) in m[x].iter_mut().zip(pr) {
                    *a -= f * b;
                }
            }
        }
        r += 1;
    }
    if (r..rows).any(|x| !m[x][s].is_zero()) {
        return None;
    }
    Some((0..s).map(|k| m[k][s]).collect())
}

/// Extreme points of a finite set of distinct points.
pub fn extreme_points(pts: &[Point]) -> Vec<Point> {
    extreme_points_with(pts, &[])
}

/// As [`extreme_points`], accepting a point early when it is the unique
/// maximizer of one of `probes`.
pub fn extreme_points_with(pts: &[Point], probes: &[Vec<Rat>]) -> Vec<Point> {
    let unique_max = |k: usize| {
        probes.iter().any(|f| {
            let v = dot(f, &pts[k]);
            (0..pts.len()).all(|j| j == k || dot(f, &pts[j]) < v)
        })
    };
    (0..pts.len())
        .filter(|&k| {
            if unique_max(k) {
                return true;
            }
            let others: Vec<&Point> = (0..pts.len())
                .filter(|&j| j != k)
                .map(|j| &pts[j])
                .collect();
            !in_hull(&pts[k], &others)
        })
        .map(|k| pts[k].clone())
        .collect()
}
