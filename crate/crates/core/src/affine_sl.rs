//! Matrix model of the affine building of `SL_n`, `n <= 4`: Chevalley
//! generators over truncated Laurent series, points of the Bott-Samelson
//! charts, Birkhoff elimination and the retractions at infinity.
//!
//! An apartment point `y` corresponds to `t^{-y}`, so the root group of the
//! affine root `(beta, n)` is `x_beta(a t^{-n})` and the Iwahori subgroup is
//! the preimage of the upper triangular Borel.

use std::collections::{BTreeSet, HashMap};

use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::affine_weyl::{AffineRoot, AffineWeylElement, Apartment};
use crate::error::{Error, Result};
use crate::gallery::{Gallery, GalleryJson, GalleryModel};
use crate::laurent::{big, LaurentMatrix, LaurentSeries, Valuation};
use crate::root_system::{Coweight, Rat, WeylElement};

/// Retries after a precision failure, each doubling the truncation order.
pub const MAX_PRECISION_RETRIES: u32 = 3;
/// Independent resamples allowed per trial before a mismatch counts.
pub const MAX_RESAMPLES: usize = 5;
/// Draws allowed while looking for a parameter set passing the predicates.
pub const GENERIC_DRAW_CAP: usize = 1000;

#[derive(Clone, Debug)]
pub struct AffineSl {
    ap: Apartment,
    n: usize,
    /// Root `k` is `e_a - e_b` for `pairs[k] = (a, b)`.
    pairs: Vec<(usize, usize)>,
    weyl_lifts: Vec<LaurentMatrix>,
    perms: HashMap<Vec<usize>, WeylElement>,
}

/// A point of the chart `U_delta^w`, given by its parameters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChartPoint {
    pub gallery: Gallery,
    /// Chamber at infinity `direction . C_{-f}` whose cell the point lies in.
    pub direction: WeylElement,
    /// `(root index, a_beta)` for the factors of `g_0`.
    pub head: Vec<(usize, Rat)>,
    /// `steps[j-1]` is the parameter of step `j`, absent at steps that are
    /// not load-bearing.
    pub steps: Vec<Option<Rat>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Retraction {
    pub gallery: Gallery,
    /// Truncation order that succeeded.
    pub order: i64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RecordStatus {
    Pass,
    Mismatch,
    PrecisionExhausted,
    ResampleCap,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct RetractionRecord {
    pub gallery: GalleryJson,
    pub w: Vec<usize>,
    pub status: RecordStatus,
    pub order: i64,
    pub trials: usize,
    pub resamples: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct RetractionReport {
    pub type_id: String,
    pub seed: u64,
    pub records: Vec<RetractionRecord>,
}

impl RetractionReport {
    pub fn all_pass(&self) -> bool {
        self.records.iter().all(|r| r.status == RecordStatus::Pass)
    }
}

/// Truncation order `2 <lambda, rho> + 8`.
pub fn default_order(model: &GalleryModel) -> i64 {
    model.root_system().pair_two_rho(model.lambda()) + 8
}

/// Deterministic generator for one verification task.
pub fn task_rng(seed: u64, parts: [u64; 3]) -> ChaCha8Rng {
    let mut bytes = [0u8; 32];
    for (k, x) in [seed, parts[0], parts[1], parts[2]].iter().enumerate() {
        bytes[8 * k..8 * k + 8].copy_from_slice(&x.to_le_bytes());
    }
    ChaCha8Rng::from_seed(bytes)
}

/// A nonzero rational `p/q` with `|p| < 10^4`, `1 <= q <= 9`.
pub fn random_parameter(rng: &mut impl Rng) -> Rat {
    let p: i64 = rng.random_range(1..10_000);
    let sign = if rng.random_bool(0.5) { 1 } else { -1 };
    Rat::new(sign * p, rng.random_range(1..=9))
}

fn q(r: Rat) -> BigRational {
    big(r)
}

impl AffineSl {
    pub fn new(ap: Apartment) -> Result<Self> {
        let rs = ap.root_system();
        if !rs.datum().is_type_a() || rs.rank() > 3 {
            return Err(Error::NotTypeA(rs.label().to_string()));
        }
        let n = rs.rank() + 1;
        let pairs = (0..rs.num_roots())
            .map(|k| {
                let c = rs.root(k);
                let e: Vec<i64> = (0..n)
                    .map(|m| {
                        let cur = if m < n - 1 { c[m] } else { 0 };
                        let prev = if m > 0 { c[m - 1] } else { 0 };
                        cur - prev
                    })
                    .collect();
                let a = e.iter().position(|&x| x == 1).expect("type A root");
                let b = e.iter().position(|&x| x == -1).expect("type A root");
                (a, b)
            })
            .collect();
        let mut sl = AffineSl {
            ap,
            n,
            pairs,
            weyl_lifts: Vec::new(),
            perms: HashMap::new(),
        };
        let rs = sl.ap.root_system();
        let lifts: Vec<LaurentMatrix> = rs
            .weyl_elements()
            .map(|w| {
                let gens: Vec<LaurentMatrix> = rs
                    .word(w)
                    .iter()
                    .map(|&i| sl.generator_lift(i + 1))
                    .collect();
                LaurentMatrix::product(n, &gens)
            })
            .collect();
        let mut perms = HashMap::new();
        for w in rs.weyl_elements() {
            let tau = column_rows(&lifts[w.index()]).expect("signed permutation");
            perms.insert(tau, w);
        }
        sl.weyl_lifts = lifts;
        sl.perms = perms;
        sl.self_test()?;
        Ok(sl)
    }

    pub fn from_label(label: &str) -> Result<Self> {
        Self::new(Apartment::from_label(label)?)
    }

    pub fn apartment(&self) -> &Apartment {
        &self.ap
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `(a, b)` with root `k` equal to `e_a - e_b`.
    pub fn root_pair(&self, k: usize) -> (usize, usize) {
        self.pairs[k]
    }

    /// Coordinates of a coweight in the basis `e_1, ..., e_n`.
    pub fn to_e(&self, c: &Coweight) -> Result<Vec<i64>> {
        let rs = self.ap.root_system();
        let cc = rs.to_coroot_coords(&c.to_point());
        if cc.iter().any(|x| !x.is_integer()) {
            return Err(Error::Invariant(format!(
                "{c} is not in the coroot lattice"
            )));
        }
        let cc: Vec<i64> = cc.iter().map(|x| x.to_integer()).collect();
        Ok((0..self.n)
            .map(|m| {
                let cur = if m < self.n - 1 { cc[m] } else { 0 };
                let prev = if m > 0 { cc[m - 1] } else { 0 };
                cur - prev
            })
            .collect())
    }

    pub fn from_e(&self, mu: &[i64]) -> Coweight {
        Coweight((0..self.n - 1).map(|i| mu[i] - mu[i + 1]).collect())
    }

    /// `x_beta(u) = I + u E_ab` for `beta = e_a - e_b`.
    pub fn x_root(&self, k: usize, u: &LaurentSeries) -> LaurentMatrix {
        let (a, b) = self.pairs[k];
        let mut m = LaurentMatrix::identity(self.n);
        m.set(a, b, u.clone());
        m
    }

    /// Element `x_beta(a t^{-n})` of the root group of `(beta, n)`.
    pub fn x_affine(&self, h: AffineRoot, a: &BigRational) -> LaurentMatrix {
        self.x_root(h.root, &LaurentSeries::monomial(a.clone(), -h.level))
    }

    /// `x_h(1) x_{-h}(-1) x_h(1)`.
    pub fn s_bar_affine(&self, h: AffineRoot) -> LaurentMatrix {
        let rs = self.ap.root_system();
        let one = BigRational::one();
        let a = self.x_affine(h, &one);
        let b = self.x_affine(h.neg(rs), &-one);
        a.mul(&b).mul(&a)
    }

    /// `bar s_beta` for a classical root.
    pub fn s_bar(&self, k: usize) -> LaurentMatrix {
        self.s_bar_affine(AffineRoot::new(k, 0))
    }

    /// Lift of the affine generator `k` (index `0` for `s_0`).
    pub fn generator_lift(&self, k: usize) -> LaurentMatrix {
        self.s_bar_affine(self.ap.simple_affine_root(k))
    }

    /// `bar w` along the stored reduced word.
    pub fn weyl_lift(&self, w: WeylElement) -> &LaurentMatrix {
        &self.weyl_lifts[w.index()]
    }

    /// `diag(t^{mu_1}, ..., t^{mu_n})`.
    pub fn t_power(&self, mu: &[i64]) -> LaurentMatrix {
        let mut m = LaurentMatrix::zero(self.n);
        for (i, &e) in mu.iter().enumerate() {
            m.set(i, i, LaurentSeries::monomial(BigRational::one(), e));
        }
        m
    }

    /// `s^mu` for a coweight `mu` and an invertible series `s`.
    pub fn cocharacter(
        &self,
        mu: &Coweight,
        s: &LaurentSeries,
        order: i64,
    ) -> Result<LaurentMatrix> {
        let e = self.to_e(mu)?;
        let mut m = LaurentMatrix::zero(self.n);
        for (i, &k) in e.iter().enumerate() {
            m.set(i, i, s.pow(k, order)?);
        }
        Ok(m)
    }

    /// `t^{-t} bar w` for `x = (w, t)`.
    pub fn lift(&self, x: &AffineWeylElement) -> Result<LaurentMatrix> {
        let e: Vec<i64> = self.to_e(&x.t)?.iter().map(|v| -v).collect();
        Ok(self.t_power(&e).mul(self.weyl_lift(x.w)))
    }

    /// Affine Weyl group element of a monomial matrix `t^mu pi`.
    pub fn monomial_to_affine(&self, m: &LaurentMatrix) -> Result<AffineWeylElement> {
        let tau =
            column_rows(m).ok_or_else(|| Error::Invariant("matrix is not monomial".into()))?;
        let mut mu = vec![0i64; self.n];
        for (j, &r) in tau.iter().enumerate() {
            match m.get(r, j).valuation() {
                Valuation::Known(v) => mu[r] = v,
                Valuation::AtLeast(n) => return Err(Error::PrecisionExhausted(n)),
                Valuation::Infinite => unreachable!("column_rows picks nonzero entries"),
            }
        }
        let w = *self
            .perms
            .get(&tau)
            .ok_or_else(|| Error::Invariant("permutation outside the Weyl group".into()))?;
        let neg: Vec<i64> = mu.iter().map(|v| -v).collect();
        Ok(AffineWeylElement {
            w,
            t: self.from_e(&neg),
        })
    }

    /// Inverse of a monomial matrix with exact monomial entries.
    pub fn monomial_inverse(&self, m: &LaurentMatrix) -> Result<LaurentMatrix> {
        let tau =
            column_rows(m).ok_or_else(|| Error::Invariant("matrix is not monomial".into()))?;
        let mut out = LaurentMatrix::zero(self.n);
        for (j, &r) in tau.iter().enumerate() {
            out.set(j, r, m.get(r, j).inv(1)?);
        }
        Ok(out)
    }

    /// Reduces `h` to a monomial matrix `L h R` with `L` lower unipotent
    /// over `K` and `R` in the Iwahori subgroup. Rows are processed top down;
    /// the pivot of a row is its leftmost entry of minimal valuation, so
    /// clearing to the right uses `O` multiples and clearing to the left uses
    /// `tO` multiples.
    pub fn eliminate(&self, h: &LaurentMatrix, order: i64) -> Result<LaurentMatrix> {
        let n = self.n;
        let mut h = h.clone();
        let mut active = vec![true; n];
        let mut out = LaurentMatrix::zero(n);
        for r in 0..n {
            let mut best: Option<(i64, usize)> = None;
            let mut unknown = false;
            for c in (0..n).filter(|&c| active[c]) {
                match h.get(r, c).valuation() {
                    Valuation::Known(v) => {
                        if best.is_none_or(|(bv, _)| v < bv) {
                            best = Some((v, c));
                        }
                    }
                    Valuation::AtLeast(_) => unknown = true,
                    Valuation::Infinite => {}
                }
            }
            let Some((vmin, piv)) = best else {
                return Err(if unknown {
                    Error::PrecisionExhausted(order)
                } else {
                    Error::Invariant("singular matrix".into())
                });
            };
            for c in (0..n).filter(|&c| active[c] && c != piv) {
                if let Valuation::AtLeast(b) = h.get(r, c).valuation() {
                    if (c < piv && b <= vmin) || (c > piv && b < vmin) {
                        return Err(Error::PrecisionExhausted(order));
                    }
                }
            }
            let pinv = h.get(r, piv).inv(order)?;
            for c in (0..n).filter(|&c| active[c] && c != piv) {
                if h.get(r, c).is_zero() {
                    continue;
                }
                let f = h.get(r, c).mul(&pinv);
                for k in r + 1..n {
                    let v = h.get(k, c).sub(&f.mul(h.get(k, piv)));
                    h.set(k, c, v);
                }
                h.set(r, c, LaurentSeries::zero());
            }
            let lead = h.get(r, piv).leading().expect("known valuation").clone();
            out.set(r, piv, LaurentSeries::monomial(lead, vmin));
            active[piv] = false;
        }
        Ok(out)
    }

    /// The `x` with `g` in `bar d U^-(K) bar d^{-1} . bar x . I`: the alcove of
    /// `g I` retracted from the chamber at infinity `d C_{-f}`.
    pub fn birkhoff(
        &self,
        g: &LaurentMatrix,
        d: WeylElement,
        order: i64,
    ) -> Result<AffineWeylElement> {
        let rs = self.ap.root_system();
        let h = self.weyl_lift(d).transpose().mul(g);
        let m = self.eliminate(&h, order)?;
        let y = self.monomial_to_affine(&m)?;
        Ok(AffineWeylElement::linear(rs, d).compose(rs, &y))
    }

    /// Recomputes [`Self::birkhoff`] after multiplying `g` on the left by a
    /// random element of `bar d U^-(K) bar d^{-1}` and on the right by a
    /// random Iwahori element; the pivots change but the result may not.
    pub fn check_birkhoff_invariance(
        &self,
        g: &LaurentMatrix,
        d: WeylElement,
        order: i64,
        rng: &mut impl Rng,
    ) -> Result<()> {
        let rs = self.ap.root_system();
        let base = self.birkhoff(g, d, order)?;
        let dbar = self.weyl_lift(d);
        let mut left = LaurentMatrix::identity(self.n);
        let mut right = LaurentMatrix::identity(self.n);
        for k in 0..rs.num_roots() {
            let a = q(random_parameter(rng));
            if rs.is_positive(k) {
                let lo = LaurentSeries::monomial(a.clone(), rng.random_range(-3..=3));
                left = left.mul(&self.x_root(rs.negate_root(k), &lo));
                let up = LaurentSeries::polynomial(0, vec![a.clone(), q(random_parameter(rng))]);
                right = right.mul(&self.x_root(k, &up));
            } else {
                let up = LaurentSeries::monomial(a, rng.random_range(1..=3));
                right = right.mul(&self.x_root(k, &up));
            }
        }
        let moved = dbar.mul(&left).mul(&dbar.transpose()).mul(g).mul(&right);
        let other = self.birkhoff(&moved, d, order)?;
        if other != base {
            return Err(Error::Invariant(format!(
                "Birkhoff cell changed under perturbation: {other:?} vs {base:?}"
            )));
        }
        Ok(())
    }

    /// Retraction of the gallery `[g_0, ..., g_p]` from `d C_{-f}`.
    pub fn retract_matrices(
        &self,
        model: &GalleryModel,
        mats: &[LaurentMatrix],
        d: WeylElement,
        order: i64,
    ) -> Result<Gallery> {
        let mut prefix = LaurentMatrix::identity(self.n);
        let mut alcoves = Vec::with_capacity(mats.len());
        for m in mats {
            prefix = prefix.mul(m);
            alcoves.push(self.birkhoff(&prefix, d, order)?);
        }
        model.from_alcoves(alcoves)
    }

    /// As [`Self::retract_matrices`], doubling the order after a precision
    /// failure up to [`MAX_PRECISION_RETRIES`] times.
    pub fn retract_matrices_escalating(
        &self,
        model: &GalleryModel,
        mats: &[LaurentMatrix],
        d: WeylElement,
        order: i64,
    ) -> Result<Retraction> {
        let mut n = order;
        let mut attempt = 0;
        loop {
            match self.retract_matrices(model, mats, d, n) {
                Ok(gallery) => return Ok(Retraction { gallery, order: n }),
                Err(Error::PrecisionExhausted(_)) if attempt < MAX_PRECISION_RETRIES => {
                    attempt += 1;
                    n *= 2;
                }
                Err(Error::PrecisionExhausted(_)) => return Err(Error::PrecisionExhausted(n)),
                Err(e) => return Err(e),
            }
        }
    }

    /// `r_v` of a chart point: the retraction from the chamber at infinity
    /// `w_0 v C_{-f}`, so that `v = w_0` recovers the gallery of the cell.
    pub fn retract(
        &self,
        model: &GalleryModel,
        point: &ChartPoint,
        v: WeylElement,
        order: i64,
    ) -> Result<Retraction> {
        let rs = model.root_system();
        let mats = self.materialize(model, point)?;
        self.retract_matrices_escalating(model, &mats, rs.mul(rs.longest(), v), order)
    }

    /// Roots of the factors of `g_0` in the cell of `delta` for `d C_{-f}`:
    /// `beta` with `d^{-1} beta < 0` and `delta_0^{-1} beta < 0`.
    pub fn head_roots(&self, model: &GalleryModel, delta: &Gallery, d: WeylElement) -> Vec<usize> {
        let rs = model.root_system();
        let di = rs.inverse(d);
        let hi = rs.inverse(delta.head());
        (0..rs.num_roots())
            .filter(|&b| !rs.is_positive(rs.act_root(di, b)) && !rs.is_positive(rs.act_root(hi, b)))
            .collect()
    }

    /// The matrices `[g_0, ..., g_p]` of a chart point.
    pub fn materialize(
        &self,
        model: &GalleryModel,
        point: &ChartPoint,
    ) -> Result<Vec<LaurentMatrix>> {
        let delta = &point.gallery;
        let d = point.direction;
        let rs = model.root_system();
        let roots = self.head_roots(model, delta, d);
        let given: Vec<usize> = point.head.iter().map(|&(b, _)| b).collect();
        if given != roots {
            return Err(Error::InvalidChart(format!(
                "head parameters on roots {given:?}, expected {roots:?}"
            )));
        }
        if point.steps.len() != model.p() {
            return Err(Error::InvalidChart(
                "wrong number of step parameters".into(),
            ));
        }
        let lb = model.load_bearing(delta, d);
        let mut g0 = LaurentMatrix::identity(self.n);
        for &(b, a) in &point.head {
            g0 = g0.mul(&self.x_root(b, &LaurentSeries::constant(q(a))));
        }
        let mut mats = vec![g0.mul(self.weyl_lift(delta.head()))];
        for j in 1..=model.p() {
            let t = model.step_type(j);
            let alpha = self.ap.simple_affine_root(t);
            let param = point.steps[j - 1];
            let g = if lb.minus.contains(&j) {
                let a = param.ok_or_else(|| {
                    Error::InvalidChart(format!("missing parameter at folding {j}"))
                })?;
                if a.is_zero() {
                    return Err(Error::InvalidChart(format!(
                        "zero parameter at folding {j}"
                    )));
                }
                self.x_affine(alpha.neg(rs), &q(a))
            } else if lb.plus.contains(&j) {
                let a = param.ok_or_else(|| {
                    Error::InvalidChart(format!("missing parameter at crossing {j}"))
                })?;
                self.x_affine(alpha, &q(a)).mul(&self.generator_lift(t))
            } else {
                if param.is_some() {
                    return Err(Error::InvalidChart(format!("step {j} is not load-bearing")));
                }
                if delta.steps()[j - 1] {
                    self.generator_lift(t)
                } else {
                    LaurentMatrix::identity(self.n)
                }
            };
            mats.push(g);
        }
        Ok(mats)
    }

    /// The torus-fixed point of `delta`: its lifted word.
    pub fn lift_gallery(&self, model: &GalleryModel, delta: &Gallery) -> Vec<LaurentMatrix> {
        let mut mats = vec![self.weyl_lift(delta.head()).clone()];
        for j in 1..=model.p() {
            mats.push(if delta.steps()[j - 1] {
                self.generator_lift(model.step_type(j))
            } else {
                LaurentMatrix::identity(self.n)
            });
        }
        mats
    }

    /// Chart point of the cell of `delta` for `d C_{-f}` with parameters
    /// drawn from `rng`.
    pub fn random_point(
        &self,
        model: &GalleryModel,
        delta: &Gallery,
        d: WeylElement,
        rng: &mut impl Rng,
    ) -> ChartPoint {
        let lb = model.load_bearing(delta, d);
        let head = self
            .head_roots(model, delta, d)
            .into_iter()
            .map(|b| (b, random_parameter(rng)))
            .collect();
        let steps = (1..=model.p())
            .map(|j| lb.contains_step(j).then(|| random_parameter(rng)))
            .collect();
        ChartPoint {
            gallery: delta.clone(),
            direction: d,
            head,
            steps,
        }
    }

    /// The explicit genericity predicates: nonzero head and step parameters,
    /// and nonzero sums over every nonempty set of parameters at the
    /// critical indices of one window, for every simple root.
    pub fn is_generic(&self, model: &GalleryModel, point: &ChartPoint) -> Result<bool> {
        if point.head.iter().any(|(_, a)| a.is_zero())
            || point.steps.iter().flatten().any(|a| a.is_zero())
        {
            return Ok(false);
        }
        for i in 0..model.root_system().rank() {
            for window in model.critical_indices(&point.gallery, i)?.windows {
                let params: Vec<Rat> = window
                    .critical
                    .iter()
                    .filter(|&&j| j >= 1)
                    .filter_map(|&j| point.steps.get(j - 1).copied().flatten())
                    .collect();
                if params.len() > 16 {
                    return Err(Error::Invariant("critical window too large".into()));
                }
                for mask in 1u32..1 << params.len() {
                    let s: Rat = (0..params.len())
                        .filter(|k| mask >> k & 1 == 1)
                        .map(|k| params[k])
                        .sum();
                    if s.is_zero() {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }

    /// A point of the cell of `delta` for the anti-dominant chamber passing
    /// [`Self::is_generic`], with the number of rejected draws.
    pub fn sample_generic(
        &self,
        model: &GalleryModel,
        delta: &Gallery,
        rng: &mut impl Rng,
    ) -> Result<(ChartPoint, usize)> {
        let e = model.root_system().identity();
        for rejected in 0..GENERIC_DRAW_CAP {
            let point = self.random_point(model, delta, e, rng);
            if self.is_generic(model, &point)? {
                return Ok((point, rejected));
            }
        }
        Err(Error::ResampleCap(GENERIC_DRAW_CAP))
    }

    /// Checks `r_{w_0}(g) = delta` and `r_{w_0 w}(g) = Xi_w(delta)` on
    /// `trials` independent generic samples.
    pub fn verify_pair(
        &self,
        model: &GalleryModel,
        delta: &Gallery,
        w: WeylElement,
        trials: usize,
        order: i64,
        mut rng_for: impl FnMut(usize, usize) -> ChaCha8Rng,
    ) -> RetractionRecord {
        let rs = model.root_system();
        let xi = model.xi(delta, w);
        let mut record = RetractionRecord {
            gallery: model.to_json(delta),
            w: rs.word(w).iter().map(|i| i + 1).collect(),
            status: RecordStatus::Pass,
            order,
            trials,
            resamples: 0,
            detail: None,
        };
        for trial in 0..trials {
            let mut ok = false;
            for attempt in 0..MAX_RESAMPLES {
                let mut rng = rng_for(trial, attempt);
                let outcome = self
                    .sample_generic(model, delta, &mut rng)
                    .and_then(|(point, _)| {
                        let home = self.retract(model, &point, rs.longest(), order)?;
                        let image = self.retract(model, &point, rs.mul(rs.longest(), w), order)?;
                        Ok((home, image))
                    });
                match outcome {
                    Ok((home, image)) => {
                        record.order = record.order.max(home.order).max(image.order);
                        if home.gallery == *delta && image.gallery == xi {
                            ok = true;
                            break;
                        }
                        record.resamples += 1;
                        record.detail = Some(format!(
                            "trial {trial}: r_w0 gave {:?}, r_w0w gave {:?}",
                            model.to_json(&home.gallery),
                            model.to_json(&image.gallery)
                        ));
                    }
                    Err(Error::PrecisionExhausted(n)) => {
                        record.status = RecordStatus::PrecisionExhausted;
                        record.order = n;
                        record.detail =
                            Some(format!("trial {trial}: precision exhausted at order {n}"));
                        return record;
                    }
                    Err(Error::ResampleCap(n)) => {
                        record.status = RecordStatus::ResampleCap;
                        record.detail =
                            Some(format!("trial {trial}: no generic sample in {n} draws"));
                        return record;
                    }
                    Err(e) => {
                        record.status = RecordStatus::Mismatch;
                        record.detail = Some(format!("trial {trial}: {e}"));
                        return record;
                    }
                }
            }
            if !ok {
                record.status = RecordStatus::Mismatch;
                return record;
            }
        }
        record.detail = None;
        record
    }

    /// Runs [`Self::verify_pair`] for every LS gallery and every `w` in
    /// `directions` (all of `W` when empty), in parallel, with a per-task
    /// generator derived from `seed`.
    pub fn verify_retraction(
        &self,
        model: &GalleryModel,
        seed: u64,
        trials: usize,
        directions: &[WeylElement],
        order: Option<i64>,
    ) -> RetractionReport {
        let rs = model.root_system();
        let ls = model.ls_galleries();
        let ws: Vec<WeylElement> = if directions.is_empty() {
            rs.weyl_elements().collect()
        } else {
            directions.to_vec()
        };
        let order = order.unwrap_or_else(|| default_order(model));
        let tasks: Vec<(usize, WeylElement)> = (0..ls.len())
            .flat_map(|k| ws.iter().map(move |&w| (k, w)))
            .collect();
        let records = tasks
            .par_iter()
            .map(|&(k, w)| {
                self.verify_pair(model, &ls[k], w, trials, order, |trial, attempt| {
                    task_rng(
                        seed,
                        [
                            k as u64,
                            w.index() as u64,
                            (trial * MAX_RESAMPLES + attempt) as u64,
                        ],
                    )
                })
            })
            .collect();
        RetractionReport {
            type_id: model.type_id(),
            seed,
            records,
        }
    }

    /// Conjugating the root group element of `-delta_j alpha_{t_j}` by the
    /// lift of `delta_0 ... delta_{j-1}` lands in the root group of
    /// `affine_root_at_step(delta, j)`, with parameter `+-a`.
    pub fn check_gallery_origin(
        &self,
        model: &GalleryModel,
        delta: &Gallery,
        j: usize,
        a: &BigRational,
    ) -> Result<()> {
        let rs = model.root_system();
        let h = model.affine_root_at_step(delta, j)?;
        let mats = self.lift_gallery(model, delta);
        let pre = LaurentMatrix::product(self.n, &mats[..j]);
        let alpha = self.ap.simple_affine_root(model.step_type(j));
        let local = if delta.steps()[j - 1] {
            alpha
        } else {
            alpha.neg(rs)
        };
        let conj = pre
            .mul(&self.x_affine(local, a))
            .mul(&self.monomial_inverse(&pre)?);
        if conj == self.x_affine(h, a) || conj == self.x_affine(h, &-a.clone()) {
            Ok(())
        } else {
            Err(Error::Invariant(format!(
                "step {j}: conjugate is not in the root group of {}",
                h.display(rs)
            )))
        }
    }

    /// Braid relations among the lifted affine generators, and agreement of
    /// [`Self::lift`] with [`Self::monomial_to_affine`].
    pub fn self_test(&self) -> Result<()> {
        let rs = self.ap.root_system();
        let k = self.ap.num_generators();
        let gens: Vec<LaurentMatrix> = (0..k).map(|i| self.generator_lift(i)).collect();
        for i in 0..k {
            for j in i + 1..k {
                let adjacent = if k == 2 {
                    continue;
                } else {
                    j == i + 1 || (i == 0 && j == k - 1)
                };
                let (l, r) = if adjacent {
                    (
                        gens[i].mul(&gens[j]).mul(&gens[i]),
                        gens[j].mul(&gens[i]).mul(&gens[j]),
                    )
                } else {
                    (gens[i].mul(&gens[j]), gens[j].mul(&gens[i]))
                };
                if l != r {
                    return Err(Error::Invariant(format!(
                        "braid relation fails for s_{i}, s_{j}"
                    )));
                }
            }
        }
        for i in 0..k {
            let x = self.ap.generator(i);
            if &self.monomial_to_affine(&gens[i])? != x
                || self.monomial_to_affine(&self.lift(x)?)? != *x
            {
                return Err(Error::Invariant(format!(
                    "lift of s_{i} has the wrong image"
                )));
            }
        }
        for w in rs.weyl_elements() {
            if self.monomial_to_affine(self.weyl_lift(w))? != AffineWeylElement::linear(rs, w) {
                return Err(Error::Invariant("Weyl lift has the wrong image".into()));
            }
        }
        Ok(())
    }

    /// Checks the torus, rank one, reflection and commutator relations on
    /// `draws` random parameter sets; returns the number of identities
    /// verified.
    pub fn check_relations(&self, rng: &mut impl Rng, draws: usize) -> Result<usize> {
        let rs = self.ap.root_system();
        let order = 12;
        let mut count = 0;
        let fail = |what: &str, k: usize| {
            Err(Error::Invariant(format!(
                "relation {what} fails for root {:?}",
                rs.root(k)
            )))
        };
        for _ in 0..draws {
            let k = rng.random_range(0..rs.num_roots());
            let mk = rs.negate_root(k);
            let u = random_series(rng);
            let u2 = random_series(rng);

            // s^lambda x_alpha(u) = x_alpha(s^<alpha, lambda> u) s^lambda
            let mut mu: Vec<i64> = (0..self.n).map(|_| rng.random_range(-2..=2)).collect();
            let total: i64 = mu.iter().sum();
            mu[self.n - 1] -= total;
            let lam = self.from_e(&mu);
            let s = if rng.random_bool(0.5) {
                LaurentSeries::constant(q(random_parameter(rng)))
            } else {
                LaurentSeries::monomial(q(random_parameter(rng)), rng.random_range(-2..=2))
            };
            let (a, b) = self.pairs[k];
            let tl = self.cocharacter(&lam, &s, order)?;
            let lhs = tl.mul(&self.x_root(k, &u));
            let rhs = self
                .x_root(k, &s.pow(mu[a] - mu[b], order)?.mul(&u))
                .mul(&tl);
            if !lhs.agrees_with(&rhs) {
                return fail("(1)", k);
            }
            count += 1;

            // x_alpha(u) x_-alpha(u') = x_-alpha(u'/c) c^{alpha^vee} x_alpha(u/c), c = 1 + u u'
            let c = LaurentSeries::one().add(&u.mul(&u2));
            if !c.is_zero() {
                let ci = c.inv(order)?;
                let lhs = self.x_root(k, &u).mul(&self.x_root(mk, &u2));
                let rhs = self
                    .x_root(mk, &u2.mul(&ci))
                    .mul(&self.cocharacter(&rs.coroot(k), &c, order)?)
                    .mul(&self.x_root(k, &u.mul(&ci)));
                if !lhs.agrees_with(&rhs) {
                    return fail("(2)", k);
                }
                count += 1;
            }

            // x_a(u) x_-a(-1/u) x_a(u) = x_-a(-1/u) x_a(u) x_-a(-1/u) = u^{a^vee} s_a = s_a u^{-a^vee}
            let kp = if rs.is_positive(k) { k } else { mk };
            let kn = rs.negate_root(kp);
            let ui = u.inv(order)?.neg();
            let xa = self.x_root(kp, &u);
            let xb = self.x_root(kn, &ui);
            let one = xa.mul(&xb).mul(&xa);
            let two = xb.mul(&xa).mul(&xb);
            let cv = rs.coroot(kp);
            let three = self.cocharacter(&cv, &u, order)?.mul(&self.s_bar(kp));
            let four = self
                .s_bar(kp)
                .mul(&self.cocharacter(&cv.scale(-1), &u, order)?);
            if !(one.agrees_with(&two) && two.agrees_with(&three) && three.agrees_with(&four)) {
                return fail("(3)", kp);
            }
            count += 1;

            // x_b(s)^{-1} x_a(u)^{-1} x_b(s) x_a(u) = x_{a+b}(c u s)
            let l = rng.random_range(0..rs.num_roots());
            if l != k && l != mk {
                let lhs = LaurentMatrix::product(
                    self.n,
                    &[
                        self.x_root(l, &u2.neg()),
                        self.x_root(k, &u.neg()),
                        self.x_root(l, &u2),
                        self.x_root(k, &u),
                    ],
                );
                let (a1, b1) = self.pairs[k];
                let (a2, b2) = self.pairs[l];
                let expected = if b1 == a2 {
                    let sum = self.pair_index(a1, b2);
                    self.x_root(sum, &u.mul(&u2).neg())
                } else if b2 == a1 {
                    let sum = self.pair_index(a2, b1);
                    self.x_root(sum, &u.mul(&u2))
                } else {
                    LaurentMatrix::identity(self.n)
                };
                if !lhs.agrees_with(&expected) {
                    return fail("(4)", k);
                }
                count += 1;
            }
        }
        Ok(count)
    }

    fn pair_index(&self, a: usize, b: usize) -> usize {
        self.pairs
            .iter()
            .position(|&p| p == (a, b))
            .expect("e_a - e_b is a root")
    }

    /// Exponents of the invariant factors of a matrix with exact entries,
    /// from the valuations of its minors; they determine the double coset
    /// `G(O) g G(O)`.
    pub fn invariant_factors(&self, m: &LaurentMatrix) -> Result<Vec<i64>> {
        let n = self.n;
        let mut prev = 0;
        let mut out = Vec::with_capacity(n);
        for k in 1..=n {
            let mut best: Option<i64> = None;
            for rows in subsets(n, k) {
                for cols in subsets(n, k) {
                    let mut sub = LaurentMatrix::zero(k);
                    for (i, &r) in rows.iter().enumerate() {
                        for (j, &c) in cols.iter().enumerate() {
                            sub.set(i, j, m.get(r, c).clone());
                        }
                    }
                    match sub.det().valuation() {
                        Valuation::Known(v) => best = Some(best.map_or(v, |b| b.min(v))),
                        Valuation::AtLeast(_) => {
                            return Err(Error::Invariant("inexact matrix".into()))
                        }
                        Valuation::Infinite => {}
                    }
                }
            }
            let d = best.ok_or_else(|| Error::Invariant("singular matrix".into()))?;
            out.push(d - prev);
            prev = d;
        }
        out.sort();
        Ok(out)
    }

    /// Whether `g_0 ... g_p` lies in `G(O) t^{-lambda} G(O)`.
    pub fn in_schubert_cell(&self, model: &GalleryModel, mats: &[LaurentMatrix]) -> Result<bool> {
        let prod = LaurentMatrix::product(self.n, mats);
        let mut expected: Vec<i64> = self.to_e(model.lambda())?.iter().map(|v| -v).collect();
        expected.sort();
        Ok(self.invariant_factors(&prod)? == expected)
    }
}

/// Row of the unique nonzero entry of each column, for a matrix with one
/// nonzero entry per row and column.
fn column_rows(m: &LaurentMatrix) -> Option<Vec<usize>> {
    let n = m.size();
    let mut tau = Vec::with_capacity(n);
    let mut used = BTreeSet::new();
    for j in 0..n {
        let rows: Vec<usize> = (0..n).filter(|&i| !m.get(i, j).is_zero()).collect();
        if rows.len() != 1 || !used.insert(rows[0]) {
            return None;
        }
        tau.push(rows[0]);
    }
    Some(tau)
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0u32..1 << n)
        .filter(|m| m.count_ones() as usize == k)
        .map(|m| (0..n).filter(|&i| m >> i & 1 == 1).collect())
        .collect()
}

/// `a t^e` with `a` a random nonzero rational and `|e| <= 2`.
fn random_series(rng: &mut impl Rng) -> LaurentSeries {
    LaurentSeries::monomial(q(random_parameter(rng)), rng.random_range(-2..=2))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qi(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    fn sl(label: &str) -> AffineSl {
        AffineSl::from_label(label).unwrap()
    }

    #[test]
    fn x_of_zero_is_identity() {
        let s = sl("A2");
        for k in 0..6 {
            assert_eq!(
                s.x_root(k, &LaurentSeries::zero()),
                LaurentMatrix::identity(3)
            );
        }
    }

    #[test]
    fn sl2_reflection_lift() {
        let s = sl("A1");
        let m = s.s_bar(0);
        assert_eq!(m.get(0, 1), &LaurentSeries::one());
        assert_eq!(m.get(1, 0), &LaurentSeries::one().neg());
        assert!(m.get(0, 0).is_zero());
    }

    #[test]
    fn relations_hold() {
        for label in ["A1", "A2", "A3"] {
            let s = sl(label);
            let mut rng = task_rng(3, [0, 0, 0]);
            assert!(s.check_relations(&mut rng, 40).unwrap() >= 80);
        }
    }

    #[test]
    fn elimination_of_lifts() {
        let s = sl("A2");
        let rs = s.apartment().root_system();
        let x = AffineWeylElement {
            w: rs.from_word(&[0, 1]),
            t: Coweight(vec![3, -3]),
        };
        let m = s.lift(&x).unwrap();
        for d in rs.weyl_elements() {
            assert_eq!(s.birkhoff(&m, d, 8).unwrap(), x);
        }
    }

    #[test]
    fn birkhoff_is_coset_invariant() {
        let model = GalleryModel::from_label("A2", &Coweight(vec![2, 1])).unwrap();
        let s = sl("A2");
        let rs = model.root_system();
        let mut rng = task_rng(5, [0, 0, 0]);
        for g in model.ls_galleries().iter().take(6) {
            let (point, _) = s.sample_generic(&model, g, &mut rng).unwrap();
            let mats = s.materialize(&model, &point).unwrap();
            let prod = LaurentMatrix::product(3, &mats);
            for d in rs.weyl_elements() {
                s.check_birkhoff_invariance(&prod, d, 24, &mut rng).unwrap();
            }
        }
    }

    #[test]
    fn a1_folding_retracts() {
        let model = GalleryModel::from_label("A1", &Coweight(vec![2])).unwrap();
        let s = sl("A1");
        let rs = model.root_system();
        let sr = rs.simple_reflection(0);
        let delta = model.gallery(sr, vec![false]).unwrap();
        let point = ChartPoint {
            gallery: delta.clone(),
            direction: rs.identity(),
            head: vec![],
            steps: vec![Some(Rat::from_integer(1))],
        };
        let mats = s.materialize(&model, &point).unwrap();
        let t = model.step_type(1);
        assert_eq!(
            mats[1],
            s.x_affine(s.apartment().simple_affine_root(t).neg(rs), &qi(1))
        );
        let home = s.retract(&model, &point, rs.longest(), 10).unwrap();
        assert_eq!(home.gallery, delta);
        let other = s.retract(&model, &point, rs.identity(), 10).unwrap();
        assert_eq!(other.gallery, model.gallery(sr, vec![true]).unwrap());
        assert_eq!(other.gallery, model.xi(&delta, sr));
    }

    #[test]
    fn zero_folding_parameter_rejected() {
        let model = GalleryModel::from_label("A1", &Coweight(vec![2])).unwrap();
        let s = sl("A1");
        let rs = model.root_system();
        let delta = model.gallery(rs.simple_reflection(0), vec![false]).unwrap();
        let point = ChartPoint {
            gallery: delta,
            direction: rs.identity(),
            head: vec![],
            steps: vec![Some(Rat::zero())],
        };
        assert!(matches!(
            s.materialize(&model, &point),
            Err(Error::InvalidChart(_))
        ));
    }

    #[test]
    fn fixed_points_retract_to_themselves() {
        let model = GalleryModel::from_label("A2", &Coweight(vec![2, 1])).unwrap();
        let s = sl("A2");
        let rs = model.root_system();
        for g in model.enumerate().step_by(7) {
            let mats = s.lift_gallery(&model, &g);
            for d in rs.weyl_elements() {
                assert_eq!(s.retract_matrices(&model, &mats, d, 8).unwrap(), g);
            }
        }
    }

    #[test]
    fn generic_predicates() {
        let model = GalleryModel::from_label("A1", &Coweight(vec![2])).unwrap();
        let s = sl("A1");
        let rs = model.root_system();
        let delta = model.gallery(rs.simple_reflection(0), vec![false]).unwrap();
        let mut rng = task_rng(0, [1, 2, 3]);
        let (point, _) = s.sample_generic(&model, &delta, &mut rng).unwrap();
        assert!(point.steps[0].is_some_and(|a| !a.is_zero()));
        let dominant = model.dominant();
        let (point, rejected) = s.sample_generic(&model, &dominant, &mut rng).unwrap();
        assert_eq!(rejected, 0);
        assert_eq!(point.head.len(), 1);
    }

    #[test]
    fn invariant_factors_of_monomials() {
        let s = sl("A2");
        let m = s.t_power(&[2, -3, 1]).mul(&s.s_bar(0));
        assert_eq!(s.invariant_factors(&m).unwrap(), vec![-3, 1, 2]);
        let u = s.x_root(1, &LaurentSeries::monomial(qi(5), -4));
        assert_eq!(s.invariant_factors(&u).unwrap(), vec![-4, 0, 4]);
    }

    #[test]
    fn not_type_a() {
        assert!(matches!(
            AffineSl::from_label("B2"),
            Err(Error::NotTypeA(_))
        ));
    }
}
