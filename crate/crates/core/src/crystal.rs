//! Root operators on LS galleries and the crystal graph they generate.

use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::affine_weyl::{AffineRoot, AffineWeylElement};
use crate::error::{Error, Result};
use crate::gallery::{Gallery, GalleryJson, GalleryModel};
use crate::root_system::WeylElement;

/// Positions of the minimal `alpha`-level along the faces `0..=p+1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StringData {
    /// Minimal level `m` of a face on an `alpha`-hyperplane.
    pub m: i64,
    /// `t`: first face at level `m`.
    pub t: usize,
    /// `s`: last face before `t` at level `m + 1`.
    pub s: Option<usize>,
    /// `j`: last face at level `m`.
    pub j: usize,
    /// `k`: first face after `j` at level `m + 1`.
    pub k: Option<usize>,
}

impl GalleryModel {
    /// String data of `g` for the simple root `alpha_i`.
    pub fn string_data(&self, g: &Gallery, i: usize) -> StringData {
        let levels = self.face_levels(g, i);
        let m = levels
            .iter()
            .flatten()
            .copied()
            .min()
            .expect("face 0 lies on H_{alpha,0}");
        let at = |lv: i64| -> Vec<usize> {
            (0..levels.len())
                .filter(|&x| levels[x] == Some(lv))
                .collect()
        };
        let low = at(m);
        let t = low[0];
        let j = *low.last().unwrap();
        let up = at(m + 1);
        StringData {
            m,
            t,
            s: up.iter().copied().filter(|&x| x <= t).max(),
            j,
            k: up.iter().copied().find(|&x| x >= j),
        }
    }

    /// Lowering operator `f_alpha_i`, or `None` where it is undefined.
    pub fn f(&self, g: &Gallery, i: usize) -> Option<Gallery> {
        let rs = self.root_system();
        let sd = self.string_data(g, i);
        let alpha = rs.simple_root(i);
        if rs.pair_int(&self.weight(g), alpha) - sd.m < 1 {
            return None;
        }
        let k = sd.k.expect("level m+1 is reached before the end");
        let refl = AffineWeylElement::reflection(rs, AffineRoot::new(alpha, sd.m));
        let shift = AffineWeylElement::translation(rs, rs.coroot(alpha).scale(-1));
        Some(self.transform(g, sd.j, k, &refl, &shift))
    }

    /// Raising operator `e_alpha_i`, or `None` where it is undefined.
    pub fn e(&self, g: &Gallery, i: usize) -> Option<Gallery> {
        let rs = self.root_system();
        let sd = self.string_data(g, i);
        if sd.m > -1 {
            return None;
        }
        let alpha = rs.simple_root(i);
        let s = sd.s.expect("face 0 is at level 0 >= m+1");
        let refl = AffineWeylElement::reflection(rs, AffineRoot::new(alpha, sd.m + 1));
        let shift = AffineWeylElement::translation(rs, rs.coroot(alpha));
        Some(self.transform(g, s, sd.t, &refl, &shift))
    }

    /// Alcoves `a..b` reflected, alcoves `b..` shifted, earlier ones kept.
    fn transform(
        &self,
        g: &Gallery,
        a: usize,
        b: usize,
        refl: &AffineWeylElement,
        shift: &AffineWeylElement,
    ) -> Gallery {
        let rs = self.root_system();
        let alcoves = g
            .alcoves()
            .iter()
            .enumerate()
            .map(|(x, al)| {
                if x < a {
                    al.clone()
                } else if x < b {
                    refl.compose(rs, al)
                } else {
                    shift.compose(rs, al)
                }
            })
            .collect();
        self.from_alcoves(alcoves)
            .expect("root operators preserve the gallery type")
    }

    pub fn epsilon(&self, g: &Gallery, i: usize) -> usize {
        let mut n = 0;
        let mut cur = g.clone();
        while let Some(next) = self.e(&cur, i) {
            cur = next;
            n += 1;
        }
        n
    }

    pub fn phi(&self, g: &Gallery, i: usize) -> usize {
        let mut n = 0;
        let mut cur = g.clone();
        while let Some(next) = self.f(&cur, i) {
            cur = next;
            n += 1;
        }
        n
    }

    pub fn e_max(&self, g: &Gallery, i: usize) -> Gallery {
        let mut cur = g.clone();
        while let Some(next) = self.e(&cur, i) {
            cur = next;
        }
        cur
    }

    pub fn f_max(&self, g: &Gallery, i: usize) -> Gallery {
        let mut cur = g.clone();
        while let Some(next) = self.f(&cur, i) {
            cur = next;
        }
        cur
    }

    /// `e^max` applied along a word, first letter first.
    pub fn e_max_word(&self, g: &Gallery, word: &[usize]) -> Gallery {
        word.iter().fold(g.clone(), |cur, &i| self.e_max(&cur, i))
    }

    /// `e_w^max` using the canonical reduced word of `w`.
    pub fn e_max_w(&self, g: &Gallery, w: WeylElement) -> Gallery {
        self.e_max_word(g, self.root_system().word(w))
    }
}

/// The crystal of LS galleries of a type, generated from the dominant
/// gallery by the lowering operators.
#[derive(Clone, Debug)]
pub struct CrystalGraph {
    pub nodes: Vec<Gallery>,
    /// `(source, i, target)` for `f_i(source) = target`.
    pub edges: Vec<(usize, usize, usize)>,
    pub highest: usize,
    index: HashMap<Gallery, usize>,
}

impl CrystalGraph {
    pub fn node_index(&self, g: &Gallery) -> Option<usize> {
        self.index.get(g).copied()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CrystalJson {
    pub type_id: String,
    pub seed: Option<u64>,
    pub nodes: Vec<GalleryJson>,
    /// `(from, i, to)` for `f_i`, simple roots numbered from 1.
    pub edges: Vec<(usize, usize, usize)>,
    pub highest: usize,
}

impl GalleryModel {
    /// Breadth-first closure of the dominant gallery under all `f_i`.
    pub fn generate_crystal(&self) -> CrystalGraph {
        let rank = self.root_system().rank();
        let start = self.dominant();
        let mut index = HashMap::from([(start.clone(), 0)]);
        let mut nodes = vec![start];
        let mut edges = Vec::new();
        let mut queue = VecDeque::from([0usize]);
        while let Some(u) = queue.pop_front() {
            for i in 0..rank {
                if let Some(g) = self.f(&nodes[u], i) {
                    let v = *index.entry(g.clone()).or_insert_with(|| {
                        nodes.push(g);
                        queue.push_back(nodes.len() - 1);
                        nodes.len() - 1
                    });
                    edges.push((u, i, v));
                }
            }
        }
        CrystalGraph {
            nodes,
            edges,
            highest: 0,
            index,
        }
    }

    /// Generates the crystal and checks its size and weights against the
    /// Weyl dimension formula and Freudenthal multiplicities.
    pub fn checked_crystal(&self) -> Result<CrystalGraph> {
        let rs = self.root_system();
        let crystal = self.generate_crystal();
        let dim = rs.weyl_dimension(self.lambda())?;
        if crystal.len() as u64 != dim {
            return Err(Error::Invariant(format!(
                "crystal has {} nodes, Weyl dimension is {dim}",
                crystal.len()
            )));
        }
        let mut counts: HashMap<_, u64> = HashMap::new();
        for g in &crystal.nodes {
            *counts.entry(self.weight(g)).or_default() += 1;
        }
        for (nu, mult) in rs.all_weight_multiplicities(self.lambda())? {
            let got = counts.get(&nu).copied().unwrap_or(0);
            if got != mult {
                return Err(Error::Invariant(format!(
                    "weight {nu}: {got} galleries, multiplicity {mult}"
                )));
            }
        }
        Ok(crystal)
    }

    pub fn crystal_json(&self, c: &CrystalGraph, seed: Option<u64>) -> CrystalJson {
        CrystalJson {
            type_id: self.type_id(),
            seed,
            nodes: c.nodes.iter().map(|g| self.to_json(g)).collect(),
            edges: c.edges.iter().map(|&(u, i, v)| (u, i + 1, v)).collect(),
            highest: c.highest,
        }
    }

    pub fn crystal_dot(&self, c: &CrystalGraph) -> String {
        let rs = self.root_system();
        let mut out = String::new();
        writeln!(out, "digraph crystal {{").unwrap();
        for (n, g) in c.nodes.iter().enumerate() {
            let wt: Vec<String> = self
                .coroot_coords(&self.weight(g))
                .iter()
                .map(crate::affine_weyl::rat_string)
                .collect();
            let head: Vec<String> = rs
                .word(g.head())
                .iter()
                .map(|i| (i + 1).to_string())
                .collect();
            writeln!(
                out,
                "  n{n} [label=\"({}) {}|{:b}\"];",
                wt.join(","),
                if head.is_empty() {
                    "e".to_string()
                } else {
                    head.join("")
                },
                g.step_mask()
            )
            .unwrap();
        }
        for &(u, i, v) in &c.edges {
            writeln!(out, "  n{u} -> n{v} [label=\"{}\"];", i + 1).unwrap();
        }
        writeln!(out, "}}").unwrap();
        out
    }
}

impl GalleryModel {
    /// Checks the crystal laws at one node: partial inverse, weight shift,
    /// LS images and the string identity, for every simple root.
    pub fn check_crystal_laws(&self, g: &Gallery) -> Result<()> {
        let rs = self.root_system();
        let e = rs.identity();
        let wt = self.weight(g);
        let fail = |what: &str, i: usize| {
            Err(Error::Invariant(format!(
                "{what} fails at {:?} for alpha_{}",
                self.to_json(g),
                i + 1
            )))
        };
        for i in 0..rs.rank() {
            let alpha = rs.simple_root(i);
            let cor = rs.coroot(alpha);
            if let Some(h) = self.f(g, i) {
                if self.e(&h, i).as_ref() != Some(g) {
                    return fail("e(f(g)) = g", i);
                }
                if self.weight(&h) != wt.sub(&cor) {
                    return fail("wt(f(g)) = wt(g) - alpha^vee", i);
                }
                if !self.is_ls(&h, e) {
                    return fail("f(g) is LS", i);
                }
            }
            if let Some(h) = self.e(g, i) {
                if self.f(&h, i).as_ref() != Some(g) {
                    return fail("f(e(g)) = g", i);
                }
                if self.weight(&h) != wt.add(&cor) {
                    return fail("wt(e(g)) = wt(g) + alpha^vee", i);
                }
                if !self.is_ls(&h, e) {
                    return fail("e(g) is LS", i);
                }
            }
            let (phi, eps) = (self.phi(g, i) as i64, self.epsilon(g, i) as i64);
            if phi - eps != rs.pair_int(&wt, alpha) {
                return fail("phi - epsilon = <wt, alpha>", i);
            }
        }
        Ok(())
    }
}
