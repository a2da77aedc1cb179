//! The fundamental apartment: affine roots, the affine Weyl group acting on
//! points and hyperplanes, alcoves, faces and minimal galleries.

use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::root_system::{Coweight, Point, Rat, RootSystem, WeylElement};

/// The affine root `(beta, n)`, identified with the hyperplane
/// `H_{beta,n} = { x : <x, beta> = n }` and the affine function
/// `x -> <x, beta> - n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AffineRoot {
    /// Index of the classical part in the root list of the root system.
    pub root: usize,
    pub level: i64,
}

impl AffineRoot {
    pub fn new(root: usize, level: i64) -> Self {
        AffineRoot { root, level }
    }

    pub fn neg(self, rs: &RootSystem) -> Self {
        AffineRoot {
            root: rs.negate_root(self.root),
            level: -self.level,
        }
    }

    /// Same hyperplane, with positive classical part.
    pub fn normalized(self, rs: &RootSystem) -> Self {
        if rs.is_positive(self.root) {
            self
        } else {
            self.neg(rs)
        }
    }

    /// `<x, beta> - n`.
    pub fn eval(self, rs: &RootSystem, x: &[Rat]) -> Rat {
        rs.pair(x, self.root) - Rat::from_integer(self.level)
    }

    pub fn display(self, rs: &RootSystem) -> String {
        format!("({:?}, {})", rs.root(self.root), self.level)
    }
}

/// Element `x -> w x + t` of `W x| X^vee`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AffineWeylElement {
    pub w: WeylElement,
    pub t: Coweight,
}

impl AffineWeylElement {
    pub fn identity(rs: &RootSystem) -> Self {
        AffineWeylElement {
            w: rs.identity(),
            t: Coweight::zero(rs.rank()),
        }
    }

    pub fn linear(rs: &RootSystem, w: WeylElement) -> Self {
        AffineWeylElement {
            w,
            t: Coweight::zero(rs.rank()),
        }
    }

    pub fn translation(rs: &RootSystem, t: Coweight) -> Self {
        AffineWeylElement {
            w: rs.identity(),
            t,
        }
    }

    /// The affine reflection in `H_{beta,n}`: `x -> x - (<x,beta> - n) beta^vee`.
    pub fn reflection(rs: &RootSystem, h: AffineRoot) -> Self {
        AffineWeylElement {
            w: rs.reflection(h.root),
            t: rs.coroot(h.root).scale(h.level),
        }
    }

    /// `self o other`.
    pub fn compose(&self, rs: &RootSystem, other: &Self) -> Self {
        AffineWeylElement {
            w: rs.mul(self.w, other.w),
            t: rs.act_coweight(self.w, &other.t).add(&self.t),
        }
    }

    pub fn inverse(&self, rs: &RootSystem) -> Self {
        let wi = rs.inverse(self.w);
        AffineWeylElement {
            w: wi,
            t: rs.act_coweight(wi, &self.t).scale(-1),
        }
    }

    pub fn act_point(&self, rs: &RootSystem, x: &[Rat]) -> Point {
        let mut y = rs.act_point(self.w, x);
        for (yi, &ti) in y.iter_mut().zip(&self.t.0) {
            *yi += Rat::from_integer(ti);
        }
        y
    }

    pub fn act_coweight(&self, rs: &RootSystem, x: &Coweight) -> Coweight {
        rs.act_coweight(self.w, x).add(&self.t)
    }

    /// Image of an affine root, compatible with the action on points:
    /// the hyperplane of `x.(beta,n)` is `x(H_{beta,n})`.
    pub fn act_root(&self, rs: &RootSystem, h: AffineRoot) -> AffineRoot {
        let root = rs.act_root(self.w, h.root);
        AffineRoot {
            root,
            level: h.level + rs.pair_int(&self.t, root),
        }
    }

    pub fn is_linear(&self) -> bool {
        self.t.0.iter().all(|&c| c == 0)
    }
}

/// Generators of the affine Weyl group. Index `0` is the affine reflection
/// `s_0 = s_{theta,1}`; index `i >= 1` is the simple reflection of
/// `alpha_{i-1}`.
#[derive(Clone, Debug)]
pub struct Apartment {
    rs: RootSystem,
    generators: Vec<AffineWeylElement>,
    walls: Vec<AffineRoot>,
    vertices: Vec<Point>,
}

impl Apartment {
    pub fn new(rs: RootSystem) -> Self {
        let r = rs.rank();
        let theta = rs.highest_root();
        let c = rs.highest_root_coefficients().to_vec();
        let mut walls = vec![AffineRoot::new(theta, 1)];
        walls.extend((0..r).map(|i| AffineRoot::new(rs.simple_root(i), 0)));
        let generators = walls
            .iter()
            .map(|&h| AffineWeylElement::reflection(&rs, h))
            .collect();
        // Vertex k of the fundamental alcove is the one not on wall k.
        let mut vertices = vec![vec![Rat::zero(); r]];
        for i in 0..r {
            let mut v = vec![Rat::zero(); r];
            v[i] = Rat::new(1, c[i]);
            vertices.push(v);
        }
        Apartment {
            rs,
            generators,
            walls,
            vertices,
        }
    }

    pub fn from_label(label: &str) -> Result<Self> {
        Ok(Self::new(RootSystem::from_label(label)?))
    }

    pub fn root_system(&self) -> &RootSystem {
        &self.rs
    }

    /// Number of affine generators, `rank + 1`.
    pub fn num_generators(&self) -> usize {
        self.generators.len()
    }

    pub fn generator(&self, k: usize) -> &AffineWeylElement {
        &self.generators[k]
    }

    /// Wall of the fundamental alcove of type `k`, as a positive affine root.
    pub fn wall(&self, k: usize) -> AffineRoot {
        self.walls[k]
    }

    /// The simple affine root `alpha_k`, positive on the fundamental alcove.
    /// `alpha_0 = (-theta, -1)`.
    pub fn simple_affine_root(&self, k: usize) -> AffineRoot {
        if k == 0 {
            self.walls[0].neg(&self.rs)
        } else {
            self.walls[k]
        }
    }

    /// Vertex of the fundamental alcove opposite to wall `k`.
    pub fn vertex(&self, k: usize) -> &Point {
        &self.vertices[k]
    }

    pub fn fundamental_barycenter(&self) -> Point {
        barycenter(&self.vertices.iter().collect::<Vec<_>>())
    }

    /// Barycenter of the face of the fundamental alcove fixed by `type_set`.
    pub fn face_barycenter(&self, type_set: &[usize]) -> Point {
        let pts: Vec<&Point> = (0..self.vertices.len())
            .filter(|k| !type_set.contains(k))
            .map(|k| &self.vertices[k])
            .collect();
        barycenter(&pts)
    }

    /// Affine generator index `k` whose wall is mapped by `x` onto `h`.
    pub fn wall_type(&self, x: &AffineWeylElement, h: AffineRoot) -> Option<usize> {
        let h = h.normalized(&self.rs);
        (0..self.walls.len())
            .find(|&k| x.act_root(&self.rs, self.walls[k]).normalized(&self.rs) == h)
    }

    pub fn alcove(&self, x: AffineWeylElement) -> Alcove {
        Alcove(x)
    }

    /// All positive affine roots whose hyperplane contains the face.
    pub fn hyperplanes_through(&self, face: &Face) -> Vec<AffineRoot> {
        let b = face.barycenter(self);
        hyperplanes_through_point(&self.rs, &b)
    }

    /// Whether `H_{beta,n}` separates the alcove from the chamber at
    /// infinity `w C_{-f}` (in the sense of translates).
    pub fn separates(
        &self,
        h: AffineRoot,
        alcove: &Alcove,
        direction: WeylElement,
    ) -> Result<bool> {
        let rs = &self.rs;
        let h = h.normalized(rs);
        let b = alcove.barycenter(self);
        let v = rs.pair(&b, h.root);
        let n = Rat::from_integer(h.level);
        if v == n {
            return Err(Error::OnHyperplane(h.display(rs)));
        }
        let up = rs.is_positive(rs.act_root(rs.inverse(direction), h.root));
        Ok(if up { v > n } else { v < n })
    }

    /// A minimal gallery from the fundamental alcove to the vertex `lambda`.
    pub fn minimal_gallery(&self, lambda: &Coweight) -> Result<GalleryType> {
        let rs = &self.rs;
        if !lambda.is_dominant() {
            return Err(Error::NotDominant(lambda.to_string()));
        }
        if lambda.0.iter().all(|&c| c == 0) {
            return Err(Error::ZeroCoweight);
        }
        let r = rs.rank();
        let c = rs.highest_root_coefficients().to_vec();
        let stab: Vec<usize> = (0..r).filter(|&j| lambda.0[j] == 0).collect();
        let w0j = rs.parabolic_longest(&stab);
        let eps = Rat::new(1, 1000);

        for attempt in 0..16i64 {
            // Generic interior point of the fundamental alcove.
            let generic = |shift: i64| -> Point {
                (0..r)
                    .map(|i| {
                        let q = Rat::one() - Rat::new(1, 7 + 4 * i as i64 + 13 * attempt + shift)
                            + Rat::new(i as i64 + 1, 1009 + 31 * attempt + 17 * shift);
                        q / Rat::from_integer((r as i64 + 1) * c[i] + 1)
                    })
                    .collect()
            };
            // Two unrelated interior points, so the segment is not symmetric
            // about lambda / 2.
            let x0 = generic(0);
            let x1: Point = generic(5).iter().map(|v| -*v).collect();
            let start: Point = x0.iter().map(|v| *v * eps).collect();
            let y = rs.act_point(w0j, &x1);
            let end: Point = lambda
                .to_point()
                .iter()
                .zip(&y)
                .map(|(l, v)| *l + *v * eps)
                .collect();
            let mut crossings: Vec<(Rat, AffineRoot)> = Vec::new();
            for k in 0..rs.num_positive_roots() {
                let a = rs.pair(&start, k);
                let b = rs.pair(&end, k);
                let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                let mut m = lo.floor().to_integer() + 1;
                while Rat::from_integer(m) < hi {
                    let t = (Rat::from_integer(m) - a) / (b - a);
                    crossings.push((t, AffineRoot::new(k, m)));
                    m += 1;
                }
            }
            crossings.sort();
            if crossings.windows(2).any(|w| w[0].0 == w[1].0) {
                continue;
            }
            let mut x = AffineWeylElement::identity(rs);
            let mut types = Vec::with_capacity(crossings.len());
            let mut alcoves = vec![x.clone()];
            for (_, h) in &crossings {
                let k = self.wall_type(&x, *h).ok_or_else(|| {
                    Error::Invariant(format!(
                        "crossed hyperplane {} is not a wall",
                        h.display(rs)
                    ))
                })?;
                x = x.compose(rs, &self.generators[k]);
                types.push(k);
                alcoves.push(x.clone());
            }
            let end_vertex_point = x.inverse(rs).act_point(rs, &lambda.to_point());
            let end_vertex = (0..self.vertices.len())
                .find(|&k| self.vertices[k] == end_vertex_point)
                .ok_or_else(|| {
                    Error::Invariant("lambda is not a vertex of the last alcove".into())
                })?;
            let walls = alcoves
                .iter()
                .zip(&types)
                .map(|(a, &k)| a.act_root(rs, self.walls[k]).normalized(rs))
                .collect();
            return Ok(GalleryType {
                lambda: lambda.clone(),
                types,
                end_vertex,
                alcoves,
                walls,
            });
        }
        Err(Error::Invariant("no generic segment found".into()))
    }
}

fn barycenter(points: &[&Point]) -> Point {
    let n = Rat::from_integer(points.len() as i64);
    let dim = points[0].len();
    (0..dim)
        .map(|i| points.iter().map(|p| p[i]).sum::<Rat>() / n)
        .collect()
}

/// All positive affine roots vanishing at `x`.
pub fn hyperplanes_through_point(rs: &RootSystem, x: &[Rat]) -> Vec<AffineRoot> {
    (0..rs.num_positive_roots())
        .filter_map(|k| {
            let v = rs.pair(x, k);
            v.is_integer().then(|| AffineRoot::new(k, v.to_integer()))
        })
        .collect()
}

/// The alcove `x . Delta_f`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Alcove(pub AffineWeylElement);

impl Alcove {
    pub fn element(&self) -> &AffineWeylElement {
        &self.0
    }

    pub fn barycenter(&self, ap: &Apartment) -> Point {
        self.0
            .act_point(ap.root_system(), &ap.fundamental_barycenter())
    }
}

/// The face `x . F_T` where `F_T` is the face of the fundamental alcove
/// lying on the walls of the types in `T`.
#[derive(Clone, Debug)]
pub struct Face {
    pub carrier: AffineWeylElement,
    pub type_set: Vec<usize>,
}

impl Face {
    pub fn barycenter(&self, ap: &Apartment) -> Point {
        self.carrier
            .act_point(ap.root_system(), &ap.face_barycenter(&self.type_set))
    }

    /// A vertex face at the point `x . v_k`.
    pub fn vertex(ap: &Apartment, carrier: AffineWeylElement, k: usize) -> Face {
        Face {
            carrier,
            type_set: (0..ap.num_generators()).filter(|&j| j != k).collect(),
        }
    }
}

/// Type of a minimal gallery joining the origin to `lambda`, together with
/// the dominant gallery realizing it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GalleryType {
    pub lambda: Coweight,
    /// Affine generator index of the wall crossed at each step.
    pub types: Vec<usize>,
    /// Index of the vertex of the fundamental alcove that is the type of the
    /// final vertex face.
    pub end_vertex: usize,
    /// Alcoves of the dominant minimal gallery.
    pub alcoves: Vec<AffineWeylElement>,
    /// Walls crossed by the dominant minimal gallery.
    pub walls: Vec<AffineRoot>,
}

impl GalleryType {
    pub fn len(&self) -> usize {
        self.types.len()
    }

    pub fn is_empty(&self) -> bool {
        self.types.is_empty()
    }

    pub fn to_json(&self, rs: &RootSystem) -> GalleryTypeJson {
        GalleryTypeJson {
            lambda: rs
                .to_coroot_coords(&self.lambda.to_point())
                .iter()
                .map(rat_string)
                .collect(),
            walls: self.walls.iter().map(|h| (h.root, h.level)).collect(),
            types: self.types.clone(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct GalleryTypeJson {
    pub lambda: Vec<String>,
    pub walls: Vec<(usize, i64)>,
    pub types: Vec<usize>,
}

pub fn rat_string(r: &Rat) -> String {
    if r.is_integer() {
        r.to_integer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for AffineWeylElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(w{}, {})", self.w.index(), self.t)
    }
}

/// Number of hyperplanes `H_{beta,m}` strictly between `0` and `lambda`.
pub fn interior_wall_count(rs: &RootSystem, lambda: &Coweight) -> usize {
    (0..rs.num_positive_roots())
        .map(|k| (rs.pair_int(lambda, k) - 1).max(0) as usize)
        .sum()
}

/// Whether the point is in the open fundamental alcove.
pub fn in_fundamental_alcove(rs: &RootSystem, x: &[Rat]) -> bool {
    let theta = rs.highest_root();
    x.iter().all(|v| v.is_positive()) && rs.pair(x, theta) < Rat::one()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ap(label: &str) -> Apartment {
        Apartment::from_label(label).unwrap()
    }

    fn pt(v: &[(i64, i64)]) -> Point {
        v.iter().map(|&(a, b)| Rat::new(a, b)).collect()
    }

    #[test]
    fn a1_walls_and_vertices() {
        let a = ap("A1");
        let rs = a.root_system();
        assert_eq!(a.wall(0), AffineRoot::new(0, 1));
        assert_eq!(a.wall(1), AffineRoot::new(0, 0));
        assert_eq!(
            a.simple_affine_root(0),
            AffineRoot::new(rs.negate_root(0), -1)
        );
        // alpha^vee has Dynkin label 2; the alcove is [0, alpha^vee / 2].
        assert_eq!(a.vertex(1), &pt(&[(1, 1)]));
    }

    #[test]
    fn hyperplanes_through_examples() {
        let a = ap("A1");
        let rs = a.root_system();
        let id = AffineWeylElement::identity(rs);
        let origin = Face::vertex(&a, id.clone(), 0);
        assert_eq!(a.hyperplanes_through(&origin), vec![AffineRoot::new(0, 0)]);
        let half = Face::vertex(&a, id, 1);
        assert_eq!(a.hyperplanes_through(&half), vec![AffineRoot::new(0, 1)]);

        let a2 = ap("A2");
        let rs = a2.root_system();
        let mu = Coweight(vec![1, 1]);
        let got = hyperplanes_through_point(rs, &mu.to_point());
        let want: Vec<AffineRoot> = (0..3)
            .map(|k| AffineRoot::new(k, rs.pair_int(&mu, k)))
            .collect();
        assert_eq!(got, want);
        let levels: Vec<(Vec<i64>, i64)> = got
            .iter()
            .map(|h| (rs.root(h.root).to_vec(), h.level))
            .collect();
        assert!(levels.contains(&(vec![1, 1], 2)));
        assert!(levels.contains(&(vec![1, 0], 1)));
        assert!(levels.contains(&(vec![0, 1], 1)));
    }

    #[test]
    fn separation_examples() {
        let a = ap("A1");
        let rs = a.root_system();
        let h = AffineRoot::new(0, 0);
        let fund = Alcove(AffineWeylElement::identity(rs));
        let below = Alcove(AffineWeylElement::linear(rs, rs.simple_reflection(0)));
        let e = rs.identity();
        let s = rs.simple_reflection(0);
        assert!(a.separates(h, &fund, e).unwrap());
        assert!(!a.separates(h, &below, e).unwrap());
        assert!(a.separates(h, &below, s).unwrap());
    }

    #[test]
    fn affine_root_action_compatible_with_points() {
        let a = ap("B2");
        let rs = a.root_system();
        let x = AffineWeylElement {
            w: rs.from_word(&[0, 1]),
            t: Coweight(vec![1, -2]),
        };
        let p = pt(&[(1, 3), (-2, 7)]);
        for k in 0..rs.num_roots() {
            for n in -2..3 {
                let h = AffineRoot::new(k, n);
                let img = x.act_root(rs, h);
                // <x p, w beta> - (n + <t, w beta>) == <p, beta> - n
                assert_eq!(img.eval(rs, &x.act_point(rs, &p)), h.eval(rs, &p));
            }
        }
    }

    #[test]
    fn reflections_are_involutions_fixing_their_hyperplane() {
        let a = ap("G2");
        let rs = a.root_system();
        let p = pt(&[(5, 11), (-3, 13)]);
        for k in 0..rs.num_positive_roots() {
            for n in -1..2 {
                let h = AffineRoot::new(k, n);
                let s = AffineWeylElement::reflection(rs, h);
                assert_eq!(s.compose(rs, &s), AffineWeylElement::identity(rs));
                let q = s.act_point(rs, &p);
                let coroot = rs.coroot(k).to_point();
                let shift = h.eval(rs, &p);
                let expect: Point = p
                    .iter()
                    .zip(&coroot)
                    .map(|(x, c)| *x - shift * *c)
                    .collect();
                assert_eq!(q, expect);
                // A point of H is fixed.
                let mut on = vec![Rat::zero(); 2];
                let j = (0..2).find(|&j| rs.root(k)[j] != 0).unwrap();
                on[j] = Rat::new(n, rs.root(k)[j]);
                assert_eq!(s.act_point(rs, &on), on);
            }
        }
    }

    #[test]
    fn group_law_matches_point_action() {
        let a = ap("A2");
        let rs = a.root_system();
        let x = AffineWeylElement {
            w: rs.from_word(&[0]),
            t: Coweight(vec![2, -1]),
        };
        let y = AffineWeylElement {
            w: rs.from_word(&[1, 0]),
            t: Coweight(vec![0, 3]),
        };
        let p = pt(&[(1, 5), (2, 9)]);
        assert_eq!(
            x.compose(rs, &y).act_point(rs, &p),
            x.act_point(rs, &y.act_point(rs, &p))
        );
        assert_eq!(
            x.compose(rs, &x.inverse(rs)),
            AffineWeylElement::identity(rs)
        );
    }

    #[test]
    fn minimal_gallery_a1() {
        let a = ap("A1");
        let rs = a.root_system();
        let g = a.minimal_gallery(&Coweight(vec![2])).unwrap();
        assert_eq!(g.types, vec![0]);
        assert_eq!(g.alcoves.len(), 2);
        assert_eq!(g.alcoves[1], *a.generator(0));
        assert_eq!(g.walls, vec![AffineRoot::new(0, 1)]);
        let g2 = a.minimal_gallery(&Coweight(vec![4])).unwrap();
        assert_eq!(g2.len(), 3);
        assert!(a.minimal_gallery(&Coweight(vec![0])).is_err());
        assert!(a.minimal_gallery(&Coweight(vec![-2])).is_err());
        // The final alcove of the odd-label gallery ends at the vertex alpha^vee/2.
        let g3 = a.minimal_gallery(&Coweight(vec![1])).unwrap();
        assert_eq!(g3.len(), 0);
        assert_eq!(g3.end_vertex, 1);
        let _ = rs;
    }

    #[test]
    fn minimal_gallery_crosses_each_interior_wall_once() {
        for (label, lam) in [
            ("A2", vec![1, 1]),
            ("A2", vec![2, 1]),
            ("B2", vec![1, 1]),
            ("C2", vec![0, 2]),
            ("G2", vec![1, 0]),
            ("G2", vec![0, 1]),
            ("A3", vec![1, 0, 1]),
        ] {
            let a = ap(label);
            let rs = a.root_system();
            let lam = Coweight(lam);
            let g = a.minimal_gallery(&lam).unwrap();
            assert_eq!(g.len(), interior_wall_count(rs, &lam), "{label}");
            let mut walls = g.walls.clone();
            walls.sort();
            walls.dedup();
            assert_eq!(walls.len(), g.len(), "{label}: a wall is crossed twice");
            for h in &g.walls {
                let n = rs.pair_int(&lam, h.root);
                assert!(h.level > 0 && h.level < n, "{label}");
            }
            // Consecutive alcoves differ by one generator.
            for (j, &k) in g.types.iter().enumerate() {
                assert_eq!(g.alcoves[j].compose(rs, a.generator(k)), g.alcoves[j + 1]);
            }
            let last = g.alcoves.last().unwrap();
            assert_eq!(
                Coweight::from_point(&last.act_point(rs, a.vertex(g.end_vertex))).unwrap(),
                lam
            );
        }
    }
}
