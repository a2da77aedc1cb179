//! Finite root systems, their Weyl groups, and two representation-theoretic
//! oracles (Weyl dimension formula, Freudenthal multiplicities) for the
//! Langlands dual group.
//!
//! Conventions used throughout the crate:
//!
//! * roots are integer vectors in the basis of simple roots;
//! * coweights and points of the apartment are given by their values on
//!   the simple roots, i.e. in the basis of fundamental coweights. The
//!   pairing `<x, beta>` is then the plain dot product of the two vectors;
//! * the Cartan matrix is `a[i][j] = <alpha_i^vee, alpha_j>`, so row `i` is
//!   the coroot `alpha_i^vee` written in fundamental-coweight coordinates.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;

use num_rational::Rational64;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rat = Rational64;

/// A point of the apartment in fundamental-coweight coordinates.
pub type Point = Vec<Rat>;

const MAX_RANK: usize = 4;

/// Cartan matrix together with its type designator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CartanDatum {
    label: String,
    matrix: Vec<Vec<i64>>,
}

impl CartanDatum {
    /// Builds the datum for a designator such as `"A2"`, `"B2"`, `"G2"`.
    ///
    /// Bourbaki numbering; in `B_n` the last simple root is short, in `C_n`
    /// it is long, in `G_2` the first simple root is short.
    pub fn from_label(label: &str) -> Result<Self> {
        let label = label.trim();
        let mut chars = label.chars();
        let family = chars
            .next()
            .ok_or_else(|| Error::Config("empty type designator".into()))?
            .to_ascii_uppercase();
        let rank: usize = chars
            .as_str()
            .parse()
            .map_err(|_| Error::Config(format!("bad type designator `{label}`")))?;
        if rank == 0 || rank > MAX_RANK {
            return Err(Error::Config(format!(
                "rank {rank} outside the supported range 1..={MAX_RANK}"
            )));
        }
        let mut a = vec![vec![0i64; rank]; rank];
        for (i, row) in a.iter_mut().enumerate() {
            row[i] = 2;
        }
        let chain = |a: &mut Vec<Vec<i64>>| {
            for i in 0..rank.saturating_sub(1) {
                a[i][i + 1] = -1;
                a[i + 1][i] = -1;
            }
        };
        match family {
            'A' => chain(&mut a),
            'B' if rank >= 2 => {
                chain(&mut a);
                a[rank - 1][rank - 2] = -2;
            }
            'C' if rank >= 2 => {
                chain(&mut a);
                a[rank - 2][rank - 1] = -2;
            }
            'D' if rank == 4 => {
                a[0][1] = -1;
                a[1][0] = -1;
                a[1][2] = -1;
                a[2][1] = -1;
                a[1][3] = -1;
                a[3][1] = -1;
            }
            'G' if rank == 2 => {
                a[0][1] = -3;
                a[1][0] = -1;
            }
            _ => {
                return Err(Error::Config(format!(
                    "unsupported type designator `{label}`"
                )))
            }
        }
        Self::new(format!("{family}{rank}"), a)
    }

    /// Validates an arbitrary Cartan matrix.
    pub fn new(label: impl Into<String>, matrix: Vec<Vec<i64>>) -> Result<Self> {
        let label = label.into();
        let n = matrix.len();
        if n == 0 || n > MAX_RANK || matrix.iter().any(|r| r.len() != n) {
            return Err(Error::NotFiniteType(format!(
                "{label}: matrix must be square of size 1..={MAX_RANK}"
            )));
        }
        for i in 0..n {
            if matrix[i][i] != 2 {
                return Err(Error::NotFiniteType(format!("{label}: a[{i}][{i}] != 2")));
            }
            for j in 0..n {
                if i != j {
                    if matrix[i][j] > 0 {
                        return Err(Error::NotFiniteType(format!(
                            "{label}: positive off-diagonal entry a[{i}][{j}]"
                        )));
                    }
                    if (matrix[i][j] == 0) != (matrix[j][i] == 0) {
                        return Err(Error::NotFiniteType(format!(
                            "{label}: a[{i}][{j}] and a[{j}][{i}] disagree on vanishing"
                        )));
                    }
                }
            }
        }
        let datum = Self { label, matrix };
        let norms = datum
            .coroot_norms()
            .ok_or_else(|| Error::NotFiniteType(format!("{}: not symmetrizable", datum.label)))?;
        let form = bilinear_form(&datum.matrix, &norms);
        if !positive_definite(&form) {
            return Err(Error::NotFiniteType(format!(
                "{}: symmetrized Cartan matrix is not positive definite",
                datum.label
            )));
        }
        Ok(datum)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn rank(&self) -> usize {
        self.matrix.len()
    }

    pub fn matrix(&self) -> &[Vec<i64>] {
        &self.matrix
    }

    pub fn is_type_a(&self) -> bool {
        self.label.starts_with('A')
    }

    /// Squared lengths `(alpha_i^vee, alpha_i^vee)` making `a[i][j] * n[j]`
    /// symmetric, normalized so that the first entry of each component is 2.
    fn coroot_norms(&self) -> Option<Vec<Rat>> {
        let n = self.rank();
        let mut norms: Vec<Option<Rat>> = vec![None; n];
        for start in 0..n {
            if norms[start].is_some() {
                continue;
            }
            norms[start] = Some(Rat::from_integer(2));
            let mut queue = VecDeque::from([start]);
            while let Some(i) = queue.pop_front() {
                let ni = norms[i].unwrap();
                for j in 0..n {
                    if i == j || self.matrix[i][j] == 0 {
                        continue;
                    }
                    // a[i][j] n[j] = a[j][i] n[i]
                    let nj = ni * Rat::from_integer(self.matrix[j][i])
                        / Rat::from_integer(self.matrix[i][j]);
                    match norms[j] {
                        None => {
                            norms[j] = Some(nj);
                            queue.push_back(j);
                        }
                        Some(existing) if existing != nj => return None,
                        _ => {}
                    }
                }
            }
        }
        norms.into_iter().collect()
    }
}

fn bilinear_form(a: &[Vec<i64>], norms: &[Rat]) -> Vec<Vec<Rat>> {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| Rat::from_integer(a[i][j]) * norms[j] / Rat::from_integer(2))
                .collect()
        })
        .collect()
}

fn positive_definite(form: &[Vec<Rat>]) -> bool {
    let mut m = form.to_vec();
    let n = m.len();
    for k in 0..n {
        if m[k][k] <= Rat::zero() {
            return false;
        }
        for i in k + 1..n {
            let f = m[i][k] / m[k][k];
            for j in k..n {
                let v = m[k][j];
                m[i][j] -= f * v;
            }
        }
    }
    true
}

/// Handle to an element of the finite Weyl group of a [`RootSystem`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WeylElement(pub(crate) usize);

impl WeylElement {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Clone, Debug)]
struct WeylData {
    word: Vec<usize>,
    coweight_matrix: Vec<i64>,
    root_matrix: Vec<i64>,
    length: usize,
}

/// An integral coweight in fundamental-coweight coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coweight(pub Vec<i64>);

impl Coweight {
    pub fn zero(rank: usize) -> Self {
        Coweight(vec![0; rank])
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn to_point(&self) -> Point {
        self.0.iter().map(|&c| Rat::from_integer(c)).collect()
    }

    /// Inverse of [`Coweight::to_point`]; fails if a coordinate is not integral.
    pub fn from_point(p: &[Rat]) -> Option<Self> {
        p.iter()
            .map(|c| c.is_integer().then(|| c.to_integer()))
            .collect::<Option<Vec<_>>>()
            .map(Coweight)
    }

    pub fn add(&self, other: &Coweight) -> Coweight {
        Coweight(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Coweight) -> Coweight {
        Coweight(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, k: i64) -> Coweight {
        Coweight(self.0.iter().map(|a| a * k).collect())
    }

    pub fn is_dominant(&self) -> bool {
        self.0.iter().all(|&c| c >= 0)
    }
}

impl fmt::Display for Coweight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

/// Roots, coroots and the Weyl group of a finite-type Cartan datum.
#[derive(Clone, Debug)]
pub struct RootSystem {
    datum: CartanDatum,
    roots: Vec<Vec<i64>>,
    coroots: Vec<Vec<i64>>,
    root_index: HashMap<Vec<i64>, usize>,
    n_positive: usize,
    highest: usize,
    norms: Vec<Rat>,
    cartan_t_inverse: Vec<Vec<Rat>>,
    weyl: Vec<WeylData>,
    weyl_index: HashMap<Vec<i64>, usize>,
    mult: Vec<usize>,
    inverse: Vec<usize>,
    longest: usize,
    reflection_of_root: Vec<usize>,
}

impl RootSystem {
    pub fn from_label(label: &str) -> Result<Self> {
        Self::build(CartanDatum::from_label(label)?)
    }

    pub fn build(datum: CartanDatum) -> Result<Self> {
        let r = datum.rank();
        let a = datum.matrix.clone();
        let norms = datum
            .coroot_norms()
            .ok_or_else(|| Error::NotFiniteType(datum.label.clone()))?;

        // Reflection closure of the simple roots, carrying coroots along.
        let mut roots: Vec<Vec<i64>> = Vec::new();
        let mut coroots: Vec<Vec<i64>> = Vec::new();
        let mut seen: HashMap<Vec<i64>, usize> = HashMap::new();
        let mut queue = VecDeque::new();
        for i in 0..r {
            let mut e = vec![0; r];
            e[i] = 1;
            seen.insert(e.clone(), roots.len());
            roots.push(e);
            coroots.push(a[i].clone());
            queue.push_back(i);
        }
        while let Some(k) = queue.pop_front() {
            for i in 0..r {
                let beta = simple_reflect_root(&a, i, &roots[k]);
                if seen.contains_key(&beta) {
                    continue;
                }
                let cobeta = simple_reflect_coweight(&a, i, &coroots[k]);
                seen.insert(beta.clone(), roots.len());
                roots.push(beta);
                coroots.push(cobeta);
                queue.push_back(roots.len() - 1);
                if roots.len() > 1000 {
                    return Err(Error::NotFiniteType(format!(
                        "{}: reflection closure does not terminate",
                        datum.label
                    )));
                }
            }
        }
        // Positive roots by height then lexicographically, negatives mirrored.
        let mut pos: Vec<(Vec<i64>, Vec<i64>)> = roots
            .iter()
            .zip(&coroots)
            .filter(|(b, _)| b.iter().all(|&c| c >= 0))
            .map(|(b, c)| (b.clone(), c.clone()))
            .collect();
        pos.sort_by(|(x, _), (y, _)| {
            let hx: i64 = x.iter().sum();
            let hy: i64 = y.iter().sum();
            hx.cmp(&hy).then_with(|| y.cmp(x))
        });
        let n_positive = pos.len();
        if 2 * n_positive != roots.len() {
            return Err(Error::NotFiniteType(format!(
                "{}: roots are not split into positive and negative halves",
                datum.label
            )));
        }
        let mut roots_sorted: Vec<Vec<i64>> = pos.iter().map(|(b, _)| b.clone()).collect();
        let mut coroots_sorted: Vec<Vec<i64>> = pos.iter().map(|(_, c)| c.clone()).collect();
        for (b, c) in &pos {
            roots_sorted.push(b.iter().map(|x| -x).collect());
            coroots_sorted.push(c.iter().map(|x| -x).collect());
        }
        let root_index: HashMap<Vec<i64>, usize> = roots_sorted
            .iter()
            .enumerate()
            .map(|(k, b)| (b.clone(), k))
            .collect();
        let highest = n_positive - 1;

        let cartan_t_inverse = invert(&transpose(&a)).ok_or_else(|| {
            Error::NotFiniteType(format!("{}: singular Cartan matrix", datum.label))
        })?;

        let mut rs = RootSystem {
            datum,
            roots: roots_sorted,
            coroots: coroots_sorted,
            root_index,
            n_positive,
            highest,
            norms,
            cartan_t_inverse,
            weyl: Vec::new(),
            weyl_index: HashMap::new(),
            mult: Vec::new(),
            inverse: Vec::new(),
            longest: 0,
            reflection_of_root: Vec::new(),
        };
        rs.build_weyl_group();
        Ok(rs)
    }

    fn build_weyl_group(&mut self) {
        let r = self.rank();
        let a = self.datum.matrix.clone();
        let ident = identity(r);
        let gens_cw: Vec<Vec<i64>> = (0..r).map(|i| reflection_coweight_matrix(&a, i)).collect();
        let gens_rt: Vec<Vec<i64>> = (0..r).map(|i| reflection_root_matrix(&a, i)).collect();

        let mut elems = vec![WeylData {
            word: vec![],
            coweight_matrix: ident.clone(),
            root_matrix: ident,
            length: 0,
        }];
        let mut index: HashMap<Vec<i64>, usize> = HashMap::new();
        index.insert(elems[0].coweight_matrix.clone(), 0);
        let mut head = 0;
        while head < elems.len() {
            for i in 0..r {
                let cw = matmul(&elems[head].coweight_matrix, &gens_cw[i], r);
                if index.contains_key(&cw) {
                    continue;
                }
                let rt = matmul(&elems[head].root_matrix, &gens_rt[i], r);
                let mut word = elems[head].word.clone();
                word.push(i);
                index.insert(cw.clone(), elems.len());
                elems.push(WeylData {
                    length: word.len(),
                    word,
                    coweight_matrix: cw,
                    root_matrix: rt,
                });
            }
            head += 1;
        }
        let n = elems.len();
        let mut mult = vec![0usize; n * n];
        for x in 0..n {
            for y in 0..n {
                let m = matmul(&elems[x].coweight_matrix, &elems[y].coweight_matrix, r);
                mult[x * n + y] = index[&m];
            }
        }
        let inverse: Vec<usize> = (0..n)
            .map(|x| (0..n).find(|&y| mult[x * n + y] == 0).unwrap())
            .collect();
        let longest = (0..n).max_by_key(|&x| elems[x].length).unwrap();
        self.weyl = elems;
        self.weyl_index = index;
        self.mult = mult;
        self.inverse = inverse;
        self.longest = longest;
        let refl: Vec<usize> = (0..self.roots.len())
            .map(|k| {
                let m = self.root_reflection_matrix(k);
                self.weyl_index[&m]
            })
            .collect();
        self.reflection_of_root = refl;
    }

    fn root_reflection_matrix(&self, k: usize) -> Vec<i64> {
        // s_beta(x) = x - <x, beta> beta^vee on coweights.
        let r = self.rank();
        let beta = &self.roots[k];
        let cob = &self.coroots[k];
        let mut m = identity(r);
        for row in 0..r {
            for col in 0..r {
                m[row * r + col] -= cob[row] * beta[col];
            }
        }
        m
    }

    pub fn datum(&self) -> &CartanDatum {
        &self.datum
    }

    pub fn label(&self) -> &str {
        self.datum.label()
    }

    pub fn rank(&self) -> usize {
        self.datum.rank()
    }

    pub fn cartan(&self) -> &[Vec<i64>] {
        self.datum.matrix()
    }

    // ---- roots ----

    pub fn num_roots(&self) -> usize {
        self.roots.len()
    }

    pub fn num_positive_roots(&self) -> usize {
        self.n_positive
    }

    /// Root with index `k`; indices `0..n_positive` are the positive roots.
    pub fn root(&self, k: usize) -> &[i64] {
        &self.roots[k]
    }

    /// The coroot of root `k` as a coweight.
    pub fn coroot(&self, k: usize) -> Coweight {
        Coweight(self.coroots[k].clone())
    }

    pub fn root_index(&self, beta: &[i64]) -> Option<usize> {
        self.root_index.get(beta).copied()
    }

    pub fn is_positive(&self, k: usize) -> bool {
        k < self.n_positive
    }

    pub fn negate_root(&self, k: usize) -> usize {
        if k < self.n_positive {
            k + self.n_positive
        } else {
            k - self.n_positive
        }
    }

    /// Index of the simple root `alpha_i`.
    pub fn simple_root(&self, i: usize) -> usize {
        let mut e = vec![0; self.rank()];
        e[i] = 1;
        self.root_index[&e]
    }

    pub fn highest_root(&self) -> usize {
        self.highest
    }

    pub fn height(&self, k: usize) -> i64 {
        self.roots[k].iter().sum()
    }

    /// Coefficients of the highest root in the simple roots.
    pub fn highest_root_coefficients(&self) -> &[i64] {
        &self.roots[self.highest]
    }

    pub fn pair(&self, x: &[Rat], k: usize) -> Rat {
        x.iter()
            .zip(&self.roots[k])
            .map(|(xi, &c)| *xi * Rat::from_integer(c))
            .sum()
    }

    pub fn pair_int(&self, x: &Coweight, k: usize) -> i64 {
        x.0.iter().zip(&self.roots[k]).map(|(a, b)| a * b).sum()
    }

    /// `2 <x, rho>`, the sum of `<x, beta>` over positive roots.
    pub fn pair_two_rho(&self, x: &Coweight) -> i64 {
        (0..self.n_positive).map(|k| self.pair_int(x, k)).sum()
    }

    /// `rho` expressed in simple-root coordinates (rational).
    pub fn rho(&self) -> Vec<Rat> {
        let r = self.rank();
        let mut v = vec![Rat::zero(); r];
        for k in 0..self.n_positive {
            for (vi, &c) in v.iter_mut().zip(&self.roots[k]) {
                *vi += Rat::new(c, 2);
            }
        }
        v
    }

    /// `rho^vee`, the half-sum of positive coroots, as a coweight.
    pub fn rho_vee(&self) -> Coweight {
        Coweight(vec![1; self.rank()])
    }

    /// Fundamental coweight `Lambda_i^vee`.
    pub fn fundamental_coweight(&self, i: usize) -> Coweight {
        let mut v = vec![0; self.rank()];
        v[i] = 1;
        Coweight(v)
    }

    /// Coordinates of a point in the basis of simple coroots.
    pub fn to_coroot_coords(&self, x: &[Rat]) -> Vec<Rat> {
        self.cartan_t_inverse
            .iter()
            .map(|row| row.iter().zip(x).map(|(a, b)| *a * *b).sum())
            .collect()
    }

    /// Inverse of [`RootSystem::to_coroot_coords`].
    pub fn from_coroot_coords(&self, c: &[Rat]) -> Point {
        let a = self.cartan();
        let r = self.rank();
        (0..r)
            .map(|j| (0..r).map(|i| c[i] * Rat::from_integer(a[i][j])).sum())
            .collect()
    }

    /// Coweight from simple-coroot coordinates, if it lies in the coweight lattice.
    pub fn coweight_from_coroot_coords(&self, c: &[Rat]) -> Option<Coweight> {
        Coweight::from_point(&self.from_coroot_coords(c))
    }

    /// Pairing `<x, w Lambda_i>` with a transported fundamental weight.
    pub fn pair_fundamental_weight(&self, x: &[Rat], w: WeylElement, i: usize) -> Rat {
        let y = self.act_point(self.inverse(w), x);
        self.to_coroot_coords(&y)[i]
    }

    /// W-invariant inner product on the coweight space.
    pub fn inner(&self, x: &[Rat], y: &[Rat]) -> Rat {
        // (alpha_i^vee, alpha_j^vee) = a[i][j] n[j] / 2
        let cx = self.to_coroot_coords(x);
        let cy = self.to_coroot_coords(y);
        let a = self.cartan();
        let r = self.rank();
        let mut s = Rat::zero();
        for i in 0..r {
            for j in 0..r {
                s += cx[i] * cy[j] * Rat::from_integer(a[i][j]) * self.norms[j]
                    / Rat::from_integer(2);
            }
        }
        s
    }

    // ---- Weyl group ----

    pub fn weyl_order(&self) -> usize {
        self.weyl.len()
    }

    pub fn weyl_elements(&self) -> impl Iterator<Item = WeylElement> + '_ {
        (0..self.weyl.len()).map(WeylElement)
    }

    pub fn identity(&self) -> WeylElement {
        WeylElement(0)
    }

    pub fn longest(&self) -> WeylElement {
        WeylElement(self.longest)
    }

    pub fn simple_reflection(&self, i: usize) -> WeylElement {
        WeylElement(self.weyl_index[&reflection_coweight_matrix(self.cartan(), i)])
    }

    /// Reflection `s_beta` for the root with index `k`.
    pub fn reflection(&self, k: usize) -> WeylElement {
        WeylElement(self.reflection_of_root[k])
    }

    pub fn mul(&self, x: WeylElement, y: WeylElement) -> WeylElement {
        WeylElement(self.mult[x.0 * self.weyl.len() + y.0])
    }

    pub fn inverse(&self, x: WeylElement) -> WeylElement {
        WeylElement(self.inverse[x.0])
    }

    pub fn length(&self, x: WeylElement) -> usize {
        self.weyl[x.0].length
    }

    /// The canonical (lexicographically smallest) reduced word.
    pub fn word(&self, x: WeylElement) -> &[usize] {
        &self.weyl[x.0].word
    }

    pub fn from_word(&self, word: &[usize]) -> WeylElement {
        word.iter().fold(self.identity(), |acc, &i| {
            self.mul(acc, self.simple_reflection(i))
        })
    }

    pub fn coweight_matrix(&self, x: WeylElement) -> &[i64] {
        &self.weyl[x.0].coweight_matrix
    }

    pub fn root_matrix(&self, x: WeylElement) -> &[i64] {
        &self.weyl[x.0].root_matrix
    }

    pub fn element_from_coweight_matrix(&self, m: &[i64]) -> Option<WeylElement> {
        self.weyl_index.get(m).copied().map(WeylElement)
    }

    pub fn act_root(&self, x: WeylElement, k: usize) -> usize {
        let r = self.rank();
        let m = &self.weyl[x.0].root_matrix;
        let beta = &self.roots[k];
        let img: Vec<i64> = (0..r)
            .map(|row| (0..r).map(|c| m[row * r + c] * beta[c]).sum())
            .collect();
        self.root_index[&img]
    }

    pub fn act_coweight(&self, x: WeylElement, v: &Coweight) -> Coweight {
        let r = self.rank();
        let m = &self.weyl[x.0].coweight_matrix;
        Coweight(
            (0..r)
                .map(|row| (0..r).map(|c| m[row * r + c] * v.0[c]).sum())
                .collect(),
        )
    }

    pub fn act_point(&self, x: WeylElement, v: &[Rat]) -> Point {
        let r = self.rank();
        let m = &self.weyl[x.0].coweight_matrix;
        (0..r)
            .map(|row| {
                (0..r)
                    .map(|c| Rat::from_integer(m[row * r + c]) * v[c])
                    .sum()
            })
            .collect()
    }

    /// `l(x s_i) < l(x)`.
    pub fn has_right_descent(&self, x: WeylElement, i: usize) -> bool {
        !self.is_positive(self.act_root(x, self.simple_root(i)))
    }

    /// Length computed as the number of positive roots sent to negative ones.
    pub fn inversion_count(&self, x: WeylElement) -> usize {
        (0..self.n_positive)
            .filter(|&k| !self.is_positive(self.act_root(x, k)))
            .count()
    }

    /// Every reduced word of `x`, sorted lexicographically.
    pub fn all_reduced_words(&self, x: WeylElement) -> Vec<Vec<usize>> {
        let mut memo: HashMap<WeylElement, Vec<Vec<usize>>> = HashMap::new();
        let mut out = self.reduced_words_rec(x, &mut memo);
        out.sort();
        out
    }

    fn reduced_words_rec(
        &self,
        x: WeylElement,
        memo: &mut HashMap<WeylElement, Vec<Vec<usize>>>,
    ) -> Vec<Vec<usize>> {
        if let Some(v) = memo.get(&x) {
            return v.clone();
        }
        let out = if self.length(x) == 0 {
            vec![vec![]]
        } else {
            let mut out = Vec::new();
            for i in 0..self.rank() {
                if self.has_right_descent(x, i) {
                    let y = self.mul(x, self.simple_reflection(i));
                    for mut w in self.reduced_words_rec(y, memo) {
                        w.push(i);
                        out.push(w);
                    }
                }
            }
            out
        };
        memo.insert(x, out.clone());
        out
    }

    /// Longest element of the parabolic subgroup generated by `s_j`, `j` in `subset`.
    pub fn parabolic_longest(&self, subset: &[usize]) -> WeylElement {
        self.weyl_elements()
            .filter(|&w| self.word(w).iter().all(|i| subset.contains(i)))
            .max_by_key(|&w| self.length(w))
            .unwrap_or(self.identity())
    }

    /// The dominant element of the W-orbit of `v` and an element sending it there.
    pub fn dominant_conjugate(&self, v: &Coweight) -> (Coweight, WeylElement) {
        let mut cur = v.clone();
        let mut w = self.identity();
        loop {
            match (0..self.rank()).find(|&i| cur.0[i] < 0) {
                None => return (cur, w),
                Some(i) => {
                    let s = self.simple_reflection(i);
                    cur = self.act_coweight(s, &cur);
                    w = self.mul(s, w);
                }
            }
        }
    }

    // ---- oracles ----

    /// Dimension of the irreducible representation of the dual group with
    /// highest weight `lambda`.
    pub fn weyl_dimension(&self, lambda: &Coweight) -> Result<u64> {
        if !lambda.is_dominant() {
            return Err(Error::NotDominant(lambda.to_string()));
        }
        let mut num = Rat::one();
        for k in 0..self.n_positive {
            let ht = self.height(k);
            num *= Rat::new(self.pair_int(lambda, k) + ht, ht);
        }
        debug_assert!(num.is_integer());
        Ok(num.to_integer() as u64)
    }

    /// Multiplicity of `nu` in the representation of highest weight `lambda`,
    /// by Freudenthal's recursion.
    pub fn weight_multiplicity(&self, lambda: &Coweight, nu: &Coweight) -> Result<u64> {
        let table = self.dominant_multiplicities(lambda)?;
        let (dom, _) = self.dominant_conjugate(nu);
        Ok(table.get(&dom).copied().unwrap_or(0))
    }

    /// Multiplicities of all dominant weights of `V(lambda)`.
    pub fn dominant_multiplicities(&self, lambda: &Coweight) -> Result<BTreeMap<Coweight, u64>> {
        if !lambda.is_dominant() {
            return Err(Error::NotDominant(lambda.to_string()));
        }
        let r = self.rank();
        // Dominant weights lambda - sum k_i alpha_i^vee, by breadth-first descent.
        let simple_coroots: Vec<Coweight> =
            (0..r).map(|i| self.coroot(self.simple_root(i))).collect();
        let mut depth: HashMap<Coweight, i64> = HashMap::new();
        depth.insert(lambda.clone(), 0);
        let mut queue = VecDeque::from([lambda.clone()]);
        let mut all = vec![];
        while let Some(mu) = queue.pop_front() {
            all.push(mu.clone());
            let d = depth[&mu];
            for c in &simple_coroots {
                let nu = mu.sub(c);
                // Every weight of V(lambda) lies in the convex hull of W lambda;
                // its dominant conjugate is dominated by lambda.
                let (dom, _) = self.dominant_conjugate(&nu);
                if !self.dominated_by(&dom, lambda) {
                    continue;
                }
                if let std::collections::hash_map::Entry::Vacant(e) = depth.entry(nu.clone()) {
                    e.insert(d + 1);
                    queue.push_back(nu);
                }
            }
        }
        let mut dominant: Vec<Coweight> = all.into_iter().filter(|m| m.is_dominant()).collect();
        dominant.sort_by_key(|m| depth[m]);

        let lam_rho = lambda.add(&self.rho_vee()).to_point();
        let norm_lr = self.inner(&lam_rho, &lam_rho);
        let positive_coroots: Vec<Coweight> =
            (0..self.n_positive).map(|k| self.coroot(k)).collect();
        let mut mult: BTreeMap<Coweight, u64> = BTreeMap::new();
        let lookup = |mult: &BTreeMap<Coweight, u64>, v: &Coweight| -> u64 {
            let (dom, _) = self.dominant_conjugate(v);
            mult.get(&dom).copied().unwrap_or(0)
        };
        for mu in dominant {
            if &mu == lambda {
                mult.insert(mu, 1);
                continue;
            }
            let mr = mu.add(&self.rho_vee()).to_point();
            let denom = norm_lr - self.inner(&mr, &mr);
            let mut acc = Rat::zero();
            for bc in &positive_coroots {
                let bp = bc.to_point();
                let mut k = 1;
                loop {
                    let shifted = mu.add(&bc.scale(k));
                    let (dom, _) = self.dominant_conjugate(&shifted);
                    if !self.dominated_by(&dom, lambda) {
                        break;
                    }
                    let m = lookup(&mult, &shifted);
                    if m > 0 {
                        acc += Rat::from_integer(m as i64) * self.inner(&shifted.to_point(), &bp);
                    }
                    k += 1;
                }
            }
            let val = Rat::from_integer(2) * acc / denom;
            debug_assert!(val.is_integer() && !val.is_negative());
            mult.insert(mu, val.to_integer() as u64);
        }
        Ok(mult.into_iter().filter(|(_, m)| *m > 0).collect())
    }

    /// `mu <= lambda` in the dominance order (difference in the nonnegative coroot cone).
    pub fn dominated_by(&self, mu: &Coweight, lambda: &Coweight) -> bool {
        let diff = lambda.sub(mu).to_point();
        self.to_coroot_coords(&diff)
            .iter()
            .all(|c| c.is_integer() && !c.is_negative())
    }

    /// All weights of `V(lambda)` with their multiplicities.
    pub fn all_weight_multiplicities(&self, lambda: &Coweight) -> Result<BTreeMap<Coweight, u64>> {
        let dom = self.dominant_multiplicities(lambda)?;
        let mut out = BTreeMap::new();
        for (mu, m) in dom {
            for w in self.weyl_elements() {
                out.insert(self.act_coweight(w, &mu), m);
            }
        }
        Ok(out)
    }
}

fn simple_reflect_root(a: &[Vec<i64>], i: usize, beta: &[i64]) -> Vec<i64> {
    let pairing: i64 = (0..beta.len()).map(|j| a[i][j] * beta[j]).sum();
    let mut out = beta.to_vec();
    out[i] -= pairing;
    out
}

fn simple_reflect_coweight(a: &[Vec<i64>], i: usize, x: &[i64]) -> Vec<i64> {
    let xi = x[i];
    x.iter()
        .enumerate()
        .map(|(j, &xj)| xj - xi * a[i][j])
        .collect()
}

fn reflection_coweight_matrix(a: &[Vec<i64>], i: usize) -> Vec<i64> {
    let r = a.len();
    let mut m = identity(r);
    for j in 0..r {
        m[j * r + i] -= a[i][j];
    }
    m
}

fn reflection_root_matrix(a: &[Vec<i64>], i: usize) -> Vec<i64> {
    let r = a.len();
    let mut m = identity(r);
    for j in 0..r {
        m[i * r + j] -= a[i][j];
    }
    m
}

fn identity(r: usize) -> Vec<i64> {
    let mut m = vec![0; r * r];
    for i in 0..r {
        m[i * r + i] = 1;
    }
    m
}

fn matmul(x: &[i64], y: &[i64], r: usize) -> Vec<i64> {
    let mut out = vec![0; r * r];
    for i in 0..r {
        for k in 0..r {
            let xik = x[i * r + k];
            if xik == 0 {
                continue;
            }
            for j in 0..r {
                out[i * r + j] += xik * y[k * r + j];
            }
        }
    }
    out
}

fn transpose(a: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = a.len();
    (0..n).map(|i| (0..n).map(|j| a[j][i]).collect()).collect()
}

fn invert(a: &[Vec<i64>]) -> Option<Vec<Vec<Rat>>> {
    let n = a.len();
    let mut m: Vec<Vec<Rat>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r: Vec<Rat> = row.iter().map(|&x| Rat::from_integer(x)).collect();
            r.extend((0..n).map(|j| if i == j { Rat::one() } else { Rat::zero() }));
            r
        })
        .collect();
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
                let pivot_row = m[col].clone();
                for (x, y) in m[r].iter_mut().zip(pivot_row) {
                    *x -= f * y;
                }
            }
        }
    }
    Some(m.into_iter().map(|row| row[n..].to_vec()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classical_counts() {
        for (label, pos, order) in [
            ("A1", 1, 2),
            ("A2", 3, 6),
            ("A3", 6, 24),
            ("B2", 4, 8),
            ("C2", 4, 8),
            ("G2", 6, 12),
            ("B3", 9, 48),
            ("D4", 12, 192),
        ] {
            let rs = RootSystem::from_label(label).unwrap();
            assert_eq!(rs.num_positive_roots(), pos, "{label}");
            assert_eq!(rs.weyl_order(), order, "{label}");
            assert_eq!(rs.length(rs.longest()), pos, "{label}");
        }
    }

    #[test]
    fn a2_highest_root_and_pairings() {
        let rs = RootSystem::from_label("A2").unwrap();
        assert_eq!(rs.root(rs.highest_root()), &[1, 1]);
        for i in 0..2 {
            for j in 0..2 {
                let lam = rs.fundamental_coweight(i);
                assert_eq!(rs.pair_int(&lam, rs.simple_root(j)), (i == j) as i64);
            }
        }
    }

    #[test]
    fn a1_rho_is_half_alpha() {
        let rs = RootSystem::from_label("A1").unwrap();
        assert_eq!(rs.rho(), vec![Rat::new(1, 2)]);
        assert_eq!(rs.root(rs.highest_root()), &[1]);
    }

    #[test]
    fn rejects_affine_and_malformed() {
        let affine = vec![vec![2, -2], vec![-2, 2]];
        assert!(matches!(
            CartanDatum::new("A1~", affine),
            Err(Error::NotFiniteType(_))
        ));
        assert!(CartanDatum::new("bad", vec![vec![2, 1], vec![1, 2]]).is_err());
        assert!(CartanDatum::new("bad", vec![vec![2, -1], vec![0, 2]]).is_err());
        assert!(CartanDatum::from_label("E8").is_err());
        assert!(CartanDatum::from_label("A5").is_err());
    }

    #[test]
    fn reduced_words_of_longest() {
        let a2 = RootSystem::from_label("A2").unwrap();
        assert_eq!(
            a2.all_reduced_words(a2.longest()),
            vec![vec![0, 1, 0], vec![1, 0, 1]]
        );
        let b2 = RootSystem::from_label("B2").unwrap();
        assert_eq!(
            b2.all_reduced_words(b2.longest()),
            vec![vec![0, 1, 0, 1], vec![1, 0, 1, 0]]
        );
        assert_eq!(
            a2.all_reduced_words(a2.identity()),
            vec![Vec::<usize>::new()]
        );
    }

    #[test]
    fn reduced_words_match_exhaustive_search() {
        for label in ["A2", "B2", "A3"] {
            let rs = RootSystem::from_label(label).unwrap();
            for w in rs.weyl_elements() {
                let l = rs.length(w);
                let mut brute = Vec::new();
                let total = rs.rank().pow(l as u32);
                for code in 0..total {
                    let mut c = code;
                    let word: Vec<usize> = (0..l)
                        .map(|_| {
                            let d = c % rs.rank();
                            c /= rs.rank();
                            d
                        })
                        .collect();
                    if rs.from_word(&word) == w {
                        brute.push(word);
                    }
                }
                brute.sort();
                assert_eq!(rs.all_reduced_words(w), brute, "{label}");
            }
        }
    }

    #[test]
    fn words_reproduce_matrices_and_lengths() {
        for label in ["A3", "B3", "G2", "C2"] {
            let rs = RootSystem::from_label(label).unwrap();
            for w in rs.weyl_elements() {
                assert_eq!(rs.from_word(rs.word(w)), w);
                assert_eq!(rs.inversion_count(w), rs.length(w));
                assert_eq!(rs.mul(w, rs.inverse(w)), rs.identity());
            }
            let w0 = rs.longest();
            for k in 0..rs.num_positive_roots() {
                assert!(!rs.is_positive(rs.act_root(w0, k)));
            }
        }
    }

    #[test]
    fn braid_relations() {
        let rs = RootSystem::from_label("G2").unwrap();
        let s = |i| rs.simple_reflection(i);
        let lhs = rs.from_word(&[0, 1, 0, 1, 0, 1]);
        let rhs = rs.from_word(&[1, 0, 1, 0, 1, 0]);
        assert_eq!(lhs, rhs);
        assert_eq!(rs.mul(s(0), s(0)), rs.identity());
    }

    #[test]
    fn weyl_dimension_examples() {
        let a1 = RootSystem::from_label("A1").unwrap();
        assert_eq!(a1.weyl_dimension(&Coweight(vec![2])).unwrap(), 3);
        let a2 = RootSystem::from_label("A2").unwrap();
        assert_eq!(a2.weyl_dimension(&Coweight(vec![1, 1])).unwrap(), 8);
        assert_eq!(a2.weyl_dimension(&Coweight(vec![0, 0])).unwrap(), 1);
        assert_eq!(a2.weyl_dimension(&Coweight(vec![1, 0])).unwrap(), 3);
        assert!(a2.weyl_dimension(&Coweight(vec![1, -1])).is_err());
    }

    #[test]
    fn freudenthal_examples() {
        let a1 = RootSystem::from_label("A1").unwrap();
        assert_eq!(
            a1.weight_multiplicity(&Coweight(vec![2]), &Coweight(vec![0]))
                .unwrap(),
            1
        );
        let a2 = RootSystem::from_label("A2").unwrap();
        let lam = Coweight(vec![1, 1]);
        assert_eq!(
            a2.weight_multiplicity(&lam, &Coweight(vec![0, 0])).unwrap(),
            2
        );
        assert_eq!(a2.weight_multiplicity(&lam, &lam).unwrap(), 1);
        assert_eq!(
            a2.weight_multiplicity(&lam, &Coweight(vec![3, 0])).unwrap(),
            0
        );
    }

    #[test]
    fn multiplicities_sum_to_dimension() {
        for (label, lam) in [
            ("A2", vec![2, 1]),
            ("B2", vec![1, 1]),
            ("C2", vec![2, 0]),
            ("G2", vec![1, 1]),
            ("A3", vec![1, 0, 1]),
            ("B3", vec![0, 0, 1]),
        ] {
            let rs = RootSystem::from_label(label).unwrap();
            let lam = Coweight(lam);
            let all = rs.all_weight_multiplicities(&lam).unwrap();
            let total: u64 = all.values().sum();
            assert_eq!(total, rs.weyl_dimension(&lam).unwrap(), "{label}");
        }
    }

    #[test]
    fn coroot_coordinates_round_trip() {
        let rs = RootSystem::from_label("B2").unwrap();
        let alpha1v = rs.coroot(rs.simple_root(0));
        let c = rs.to_coroot_coords(&alpha1v.to_point());
        assert_eq!(c, vec![Rat::one(), Rat::zero()]);
        assert_eq!(rs.from_coroot_coords(&c), alpha1v.to_point());
    }

    const LABELS: [&str; 8] = ["A1", "A2", "A3", "B2", "B3", "C2", "C3", "G2"];

    proptest::proptest! {
        #[test]
        fn weyl_action_is_a_group_action(t in 0..LABELS.len(), a in 0usize..10_000, b in 0usize..10_000, v in proptest::collection::vec(-4i64..=4, 3)) {
            let rs = RootSystem::from_label(LABELS[t]).unwrap();
            let x = WeylElement(a % rs.weyl_order());
            let y = WeylElement(b % rs.weyl_order());
            let v = Coweight(v[..rs.rank()].to_vec());
            proptest::prop_assert_eq!(
                rs.act_coweight(rs.mul(x, y), &v),
                rs.act_coweight(x, &rs.act_coweight(y, &v))
            );
            proptest::prop_assert_eq!(rs.mul(x, rs.inverse(x)), rs.identity());
            proptest::prop_assert_eq!(rs.length(x), rs.inversion_count(x));
            proptest::prop_assert_eq!(rs.from_word(rs.word(x)), x);
            let (dom, _) = rs.dominant_conjugate(&v);
            proptest::prop_assert!(dom.is_dominant());
            proptest::prop_assert_eq!(rs.dominant_conjugate(&rs.act_coweight(x, &v)).0, dom);
        }

        #[test]
        fn pairing_is_w_invariant(t in 0..LABELS.len(), a in 0usize..10_000, k in 0usize..100, v in proptest::collection::vec(-4i64..=4, 3)) {
            let rs = RootSystem::from_label(LABELS[t]).unwrap();
            let x = WeylElement(a % rs.weyl_order());
            let k = k % rs.num_roots();
            let v = Coweight(v[..rs.rank()].to_vec());
            proptest::prop_assert_eq!(
                rs.pair_int(&rs.act_coweight(x, &v), rs.act_root(x, k)),
                rs.pair_int(&v, k)
            );
        }
    }
}
