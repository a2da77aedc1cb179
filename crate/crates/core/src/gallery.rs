//! Combinatorial galleries of a fixed type: alcove sequences, step
//! classification, load-bearing walls, dimension and the LS condition.

use std::cmp::Ordering;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

use crate::affine_weyl::{
    rat_string, AffineRoot, AffineWeylElement, Alcove, Apartment, GalleryType,
};
use crate::error::{Error, Result};
use crate::root_system::{Coweight, Rat, RootSystem, WeylElement};

/// A gallery `[delta_0, ..., delta_p]` of the type of its model. The alcove
/// `Gamma_j` is `delta_0 delta_1 ... delta_j . Delta_f` where `delta_j` is
/// either the type generator `t_j` (a crossing) or the identity (a folding).
#[derive(Clone, Debug)]
pub struct Gallery {
    head: WeylElement,
    steps: Vec<bool>,
    alcoves: Vec<AffineWeylElement>,
}

impl Gallery {
    pub fn head(&self) -> WeylElement {
        self.head
    }

    /// `steps[j-1]` is true when step `j` is a crossing.
    pub fn steps(&self) -> &[bool] {
        &self.steps
    }

    pub fn alcoves(&self) -> &[AffineWeylElement] {
        &self.alcoves
    }

    pub fn alcove(&self, j: usize) -> Alcove {
        Alcove(self.alcoves[j].clone())
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Steps as a bitmask, bit `j-1` set for a crossing at step `j`.
    pub fn step_mask(&self) -> u64 {
        self.steps
            .iter()
            .enumerate()
            .filter(|(_, &c)| c)
            .fold(0u64, |m, (j, _)| m | (1 << j))
    }
}

impl PartialEq for Gallery {
    fn eq(&self, other: &Self) -> bool {
        self.head == other.head && self.steps == other.steps
    }
}

impl Eq for Gallery {}

impl Hash for Gallery {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.head.hash(state);
        self.steps.hash(state);
    }
}

impl PartialOrd for Gallery {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Gallery {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.head, &self.steps).cmp(&(other.head, &other.steps))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StepKind {
    PositiveCrossing,
    NegativeCrossing,
    PositiveFolding,
    NegativeFolding,
}

impl StepKind {
    pub fn is_folding(self) -> bool {
        matches!(self, StepKind::PositiveFolding | StepKind::NegativeFolding)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct StepClass {
    pub kind: StepKind,
    pub wall: AffineRoot,
}

/// Load-bearing data of a gallery with respect to a chamber at infinity.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LoadBearing {
    /// Classical hyperplanes through the origin separating `Gamma_0`.
    pub origin_walls: Vec<AffineRoot>,
    /// Load-bearing crossings.
    pub plus: Vec<usize>,
    /// Load-bearing foldings.
    pub minus: Vec<usize>,
}

impl LoadBearing {
    pub fn total(&self) -> usize {
        self.origin_walls.len() + self.plus.len() + self.minus.len()
    }

    pub fn contains_step(&self, j: usize) -> bool {
        self.plus.contains(&j) || self.minus.contains(&j)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct GalleryJson {
    pub type_id: String,
    /// Reduced word of the head, simple reflections numbered from 1.
    pub head: Vec<usize>,
    /// Bit `j-1` set when step `j` is a crossing.
    pub steps: u64,
    /// Weight in simple-coroot coordinates.
    pub weight: Vec<String>,
}

/// A root system with a fixed gallery type; every gallery operation goes
/// through it.
#[derive(Clone, Debug)]
pub struct GalleryModel {
    ap: Apartment,
    gtype: GalleryType,
}

impl GalleryModel {
    pub fn new(ap: Apartment, lambda: &Coweight) -> Result<Self> {
        let gtype = ap.minimal_gallery(lambda)?;
        Ok(GalleryModel { ap, gtype })
    }

    pub fn from_label(label: &str, lambda: &Coweight) -> Result<Self> {
        Self::new(Apartment::from_label(label)?, lambda)
    }

    pub fn apartment(&self) -> &Apartment {
        &self.ap
    }

    pub fn root_system(&self) -> &RootSystem {
        self.ap.root_system()
    }

    pub fn gallery_type(&self) -> &GalleryType {
        &self.gtype
    }

    pub fn lambda(&self) -> &Coweight {
        &self.gtype.lambda
    }

    /// Number of steps `p`.
    pub fn p(&self) -> usize {
        self.gtype.len()
    }

    /// Generator index `t_j` of step `j` (1-based).
    pub fn step_type(&self, j: usize) -> usize {
        self.gtype.types[j - 1]
    }

    pub fn type_id(&self) -> String {
        let rs = self.root_system();
        let coords: Vec<String> = rs
            .to_coroot_coords(&self.lambda().to_point())
            .iter()
            .map(rat_string)
            .collect();
        format!("{}:{}", rs.label(), coords.join(","))
    }

    pub fn gallery(&self, head: WeylElement, steps: Vec<bool>) -> Result<Gallery> {
        if steps.len() != self.p() {
            return Err(Error::InvalidGallery(format!(
                "expected {} steps, got {}",
                self.p(),
                steps.len()
            )));
        }
        let rs = self.root_system();
        let mut x = AffineWeylElement::linear(rs, head);
        let mut alcoves = Vec::with_capacity(steps.len() + 1);
        alcoves.push(x.clone());
        for (j, &cross) in steps.iter().enumerate() {
            if cross {
                x = x.compose(rs, self.ap.generator(self.gtype.types[j]));
            }
            alcoves.push(x.clone());
        }
        Ok(Gallery {
            head,
            steps,
            alcoves,
        })
    }

    pub fn from_mask(&self, head: WeylElement, mask: u64) -> Result<Gallery> {
        self.gallery(head, (0..self.p()).map(|j| mask >> j & 1 == 1).collect())
    }

    /// Recovers the word form from an alcove sequence.
    pub fn from_alcoves(&self, alcoves: Vec<AffineWeylElement>) -> Result<Gallery> {
        let rs = self.root_system();
        if alcoves.len() != self.p() + 1 {
            return Err(Error::InvalidGallery("wrong number of alcoves".into()));
        }
        if !alcoves[0].is_linear() {
            return Err(Error::InvalidGallery(
                "first alcove does not contain the origin".into(),
            ));
        }
        let mut steps = Vec::with_capacity(self.p());
        for j in 1..alcoves.len() {
            let d = alcoves[j - 1].inverse(rs).compose(rs, &alcoves[j]);
            if d == AffineWeylElement::identity(rs) {
                steps.push(false);
            } else if &d == self.ap.generator(self.step_type(j)) {
                steps.push(true);
            } else {
                return Err(Error::InvalidGallery(format!(
                    "alcoves {} and {} are not adjacent along the type",
                    j - 1,
                    j
                )));
            }
        }
        Ok(Gallery {
            head: alcoves[0].w,
            steps,
            alcoves,
        })
    }

    /// The dominant minimal gallery.
    pub fn dominant(&self) -> Gallery {
        self.gallery(self.root_system().identity(), vec![true; self.p()])
            .expect("type length")
    }

    /// All `|W| 2^p` galleries of the type, ordered by head then step mask.
    pub fn enumerate(&self) -> impl Iterator<Item = Gallery> + '_ {
        let p = self.p();
        assert!(p < 64, "gallery type too long to enumerate");
        self.root_system().weyl_elements().flat_map(move |w| {
            (0..1u64 << p).map(move |mask| self.from_mask(w, mask).expect("valid mask"))
        })
    }

    /// Galleries of the type that are LS for the anti-dominant chamber.
    pub fn ls_galleries(&self) -> Vec<Gallery> {
        let e = self.root_system().identity();
        self.enumerate().filter(|g| self.is_ls(g, e)).collect()
    }

    pub fn weight(&self, g: &Gallery) -> Coweight {
        let rs = self.root_system();
        let last = g.alcoves.last().unwrap();
        Coweight::from_point(&last.act_point(rs, self.ap.vertex(self.gtype.end_vertex)))
            .expect("gallery ends at a lattice point")
    }

    /// Wall containing the face `Gamma'_j`, `1 <= j <= p`, with positive
    /// classical part.
    pub fn wall(&self, g: &Gallery, j: usize) -> AffineRoot {
        let rs = self.root_system();
        g.alcoves[j - 1]
            .act_root(rs, self.ap.wall(self.step_type(j)))
            .normalized(rs)
    }

    /// Level `m` with `Gamma'_j` in `H_{alpha_i, m}`, for faces `0..=p+1`.
    pub fn face_level(&self, g: &Gallery, j: usize, i: usize) -> Option<i64> {
        let rs = self.root_system();
        let p = self.p();
        if j == 0 {
            Some(0)
        } else if j == p + 1 {
            Some(rs.pair_int(&self.weight(g), rs.simple_root(i)))
        } else {
            let h = self.wall(g, j);
            (h.root == rs.simple_root(i)).then_some(h.level)
        }
    }

    pub fn face_levels(&self, g: &Gallery, i: usize) -> Vec<Option<i64>> {
        (0..=self.p() + 1)
            .map(|j| self.face_level(g, j, i))
            .collect()
    }

    pub fn classify_steps(&self, g: &Gallery, direction: WeylElement) -> Vec<StepClass> {
        (1..=self.p())
            .map(|j| {
                let wall = self.wall(g, j);
                let positive = self
                    .ap
                    .separates(wall, &g.alcove(j), direction)
                    .expect("alcove is never on a hyperplane");
                let kind = match (g.steps[j - 1], positive) {
                    (true, true) => StepKind::PositiveCrossing,
                    (true, false) => StepKind::NegativeCrossing,
                    (false, true) => StepKind::PositiveFolding,
                    (false, false) => StepKind::NegativeFolding,
                };
                StepClass { kind, wall }
            })
            .collect()
    }

    pub fn is_positively_folded(&self, g: &Gallery, direction: WeylElement) -> bool {
        self.classify_steps(g, direction)
            .iter()
            .all(|s| s.kind != StepKind::NegativeFolding)
    }

    pub fn load_bearing(&self, g: &Gallery, direction: WeylElement) -> LoadBearing {
        let rs = self.root_system();
        let mut lb = LoadBearing::default();
        let g0 = g.alcove(0);
        for k in 0..rs.num_positive_roots() {
            let h = AffineRoot::new(k, 0);
            if self.ap.separates(h, &g0, direction).expect("generic") {
                lb.origin_walls.push(h);
            }
        }
        for j in 1..=self.p() {
            let wall = self.wall(g, j);
            if !self
                .ap
                .separates(wall, &g.alcove(j), direction)
                .expect("generic")
            {
                continue;
            }
            if self
                .ap
                .separates(wall, &g.alcove(j - 1), direction)
                .expect("generic")
            {
                lb.minus.push(j);
            } else {
                lb.plus.push(j);
            }
        }
        lb
    }

    pub fn dimension(&self, g: &Gallery, direction: WeylElement) -> usize {
        self.load_bearing(g, direction).total()
    }

    /// `<lambda + w^{-1} nu, rho> + dim(P_lambda / B)`, the dimension of an
    /// LS gallery of weight `nu` for the chamber `w C_{-f}`.
    pub fn ls_dimension(&self, nu: &Coweight, direction: WeylElement) -> usize {
        let rs = self.root_system();
        let lambda = self.lambda();
        let nu = rs.act_coweight(rs.inverse(direction), nu);
        let two = rs.pair_two_rho(lambda) + rs.pair_two_rho(&nu);
        debug_assert!(two % 2 == 0);
        let parabolic = (0..rs.num_positive_roots())
            .filter(|&k| rs.pair_int(lambda, k) == 0)
            .count() as i64;
        (two / 2 + parabolic) as usize
    }

    pub fn is_ls(&self, g: &Gallery, direction: WeylElement) -> bool {
        self.is_positively_folded(g, direction)
            && self.dimension(g, direction) == self.ls_dimension(&self.weight(g), direction)
    }

    /// The affine root `delta_0 ... delta_{j-1} (-delta_j alpha_{t_j})`.
    pub fn affine_root_at_step(&self, g: &Gallery, j: usize) -> Result<AffineRoot> {
        if j == 0 || j > self.p() {
            return Err(Error::StepOutOfRange { j, p: self.p() });
        }
        let rs = self.root_system();
        let a = self.ap.simple_affine_root(self.step_type(j));
        let a = if g.steps[j - 1] { a } else { a.neg(rs) };
        Ok(g.alcoves[j - 1].act_root(rs, a))
    }

    /// Checks [`Self::affine_root_at_step`] against the wall of `Gamma'_j`:
    /// it is the negated wall function at load-bearing steps (direction
    /// `e`) and the wall function itself otherwise.
    pub fn check_affine_root_contract(&self, g: &Gallery, j: usize) -> Result<()> {
        let rs = self.root_system();
        let h = self.affine_root_at_step(g, j)?;
        let wall = self.wall(g, j);
        let lb = self.load_bearing(g, rs.identity()).contains_step(j);
        let want = if lb { wall.neg(rs) } else { wall };
        if h != want {
            return Err(Error::Invariant(format!(
                "step {j}: affine root {} but wall {} (load-bearing: {lb})",
                h.display(rs),
                wall.display(rs)
            )));
        }
        Ok(())
    }

    /// The W-action on galleries through the linear action on the apartment.
    pub fn act(&self, w: WeylElement, g: &Gallery) -> Gallery {
        let rs = self.root_system();
        let lin = AffineWeylElement::linear(rs, w);
        Gallery {
            head: rs.mul(w, g.head),
            steps: g.steps.clone(),
            alcoves: g.alcoves.iter().map(|x| lin.compose(rs, x)).collect(),
        }
    }

    pub fn to_json(&self, g: &Gallery) -> GalleryJson {
        let rs = self.root_system();
        GalleryJson {
            type_id: self.type_id(),
            head: rs.word(g.head).iter().map(|i| i + 1).collect(),
            steps: g.step_mask(),
            weight: rs
                .to_coroot_coords(&self.weight(g).to_point())
                .iter()
                .map(rat_string)
                .collect(),
        }
    }

    pub fn from_json(&self, j: &GalleryJson) -> Result<Gallery> {
        if j.type_id != self.type_id() {
            return Err(Error::InvalidGallery(format!(
                "type {} does not match {}",
                j.type_id,
                self.type_id()
            )));
        }
        let rs = self.root_system();
        if j.head.iter().any(|&i| i == 0 || i > rs.rank()) {
            return Err(Error::InvalidGallery(
                "head word uses an unknown generator".into(),
            ));
        }
        let word: Vec<usize> = j.head.iter().map(|i| i - 1).collect();
        if j.steps >> self.p() != 0 {
            return Err(Error::InvalidGallery(
                "step mask longer than the type".into(),
            ));
        }
        self.from_mask(rs.from_word(&word), j.steps)
    }

    /// Weight in simple-coroot coordinates.
    pub fn coroot_coords(&self, v: &Coweight) -> Vec<Rat> {
        self.root_system().to_coroot_coords(&v.to_point())
    }
}
