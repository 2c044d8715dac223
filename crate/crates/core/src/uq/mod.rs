//! `U_q(g)` acting on integrable modules and their tensor products.
//!
//! Irreducible modules are built as quotients by the radical of the
//! Shapovalov form: weight spaces are generated by divided-power monomials in
//! the lowering generators, Gram matrices come from adjunction plus the `EF`
//! commutation relation, and dependent monomials are discarded greedily.
//!
//! The form is normalized by `(v, v) = 1` on the extremal vector and uses the
//! adjoint `ρ(F_i) = q_i K̃_{−i} E_i`, `ρ(E_i) = q_i K̃_i F_i`.

mod tensor;
pub mod udot;

pub use tensor::{Key, ModuleVector, Strand, TensorModule, TricoloreTriple};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::cartan::{CartanDatum, Weight};
use crate::error::{Error, Result};
use crate::laurent::qint_at;
use crate::{Laurent, RMat, Ratio};

/// Generators of `U_q(g)`. `K` carries a root-lattice element in simple-root coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Gen {
    E(usize),
    F(usize),
    K(Vec<i64>),
}

/// `ω`: swaps `E_i` and `F_i`, inverts `K`.
pub fn cartan_involution(g: &Gen) -> Gen {
    match g {
        Gen::E(i) => Gen::F(*i),
        Gen::F(i) => Gen::E(*i),
        Gen::K(mu) => Gen::K(mu.iter().map(|x| -x).collect()),
    }
}

pub(crate) type SparseCol = Vec<(usize, Ratio)>;

/// Irreducible integrable module of highest (dominant) or lowest (antidominant) weight.
#[derive(Clone, Debug)]
pub struct IrrModule {
    pub datum: CartanDatum,
    pub extremal: Weight,
    /// True for a highest-weight module.
    pub highest: bool,
    /// Divided-power monomial producing each basis vector, outermost operator first.
    pub labels: Vec<Vec<(usize, u32)>>,
    pub weights: Vec<Weight>,
    pub levels: Vec<Vec<usize>>,
    /// Position of each basis vector inside its weight space.
    pub local: Vec<usize>,
    pub spaces: BTreeMap<Weight, Vec<usize>>,
    pub grams: BTreeMap<Weight, RMat>,
    e_act: Vec<Vec<Option<SparseCol>>>,
    f_act: Vec<Vec<Option<SparseCol>>>,
    /// False when construction stopped at the depth bound before the module closed.
    pub complete: bool,
}

struct Builder<'a> {
    datum: &'a CartanDatum,
    highest: bool,
    labels: Vec<Vec<(usize, u32)>>,
    weights: Vec<Weight>,
    local: Vec<usize>,
    spaces: BTreeMap<Weight, Vec<usize>>,
    grams: BTreeMap<Weight, RMat>,
    up: Vec<Vec<Option<SparseCol>>>,
    down: Vec<Vec<Option<SparseCol>>>,
}

fn q_pow(e: i64) -> Ratio {
    Ratio::from_poly(Laurent::q_pow(e))
}

fn add_into(acc: &mut BTreeMap<usize, Ratio>, k: usize, v: Ratio) {
    let slot = acc.entry(k).or_insert_with(Ratio::zero);
    *slot = &*slot + &v;
    if slot.is_zero() {
        acc.remove(&k);
    }
}

impl Builder<'_> {
    /// Weight shift of a lowering step.
    fn down_shift(&self, i: usize, w: &Weight) -> Weight {
        let a = self.datum.simple_root(i);
        if self.highest {
            w.sub(&a)
        } else {
            w.add(&a)
        }
    }

    /// `[U_i, D_i]` on a vector of weight `w`.
    fn commutator(&self, i: usize, w: &Weight) -> Ratio {
        let v = Ratio::from_poly(qint_at(w.0[i], self.datum.d[i]));
        if self.highest {
            v
        } else {
            -v
        }
    }

    /// `U_i D_j b` expressed on the weight space of `D_j b` shifted back by `i`.
    fn up_down(&self, i: usize, j: usize, b: usize) -> BTreeMap<usize, Ratio> {
        let mut acc = BTreeMap::new();
        for (c, x) in self.up[i][b].as_ref().expect("up action known") {
            for (e, y) in self.down[j][*c].as_ref().expect("down action known below frontier") {
                add_into(&mut acc, *e, x * y);
            }
        }
        if i == j {
            add_into(&mut acc, b, self.commutator(i, &self.weights[b]));
        }
        acc
    }

    /// `(D_i b, D_j b2)` by adjunction in the first slot.
    fn pair(&self, i: usize, b: usize, j: usize, b2: usize) -> Ratio {
        let wb = &self.weights[b];
        let sigma = if self.highest { -1 } else { 1 };
        let factor = q_pow(self.datum.d[i] + sigma * self.datum.pairing(i, wb));
        let w = self.up_down(i, j, b2);
        let g = &self.grams[wb];
        let lb = self.local[b];
        let mut acc = Ratio::zero();
        for (e, c) in &w {
            debug_assert_eq!(&self.weights[*e], wb);
            acc = &acc + &(g.get(lb, self.local[*e]) * c);
        }
        &acc * &factor
    }
}

/// A generated candidate `scale · D_i b`.
struct Cand {
    i: usize,
    b: usize,
    scale: Ratio,
    label: Vec<(usize, u32)>,
}

/// Build the irreducible module with extremal weight `lambda`, exploring at most `depth` levels.
pub fn build_irreducible(datum: &CartanDatum, lambda: &Weight, depth: usize) -> Result<IrrModule> {
    datum.check_weight(lambda)?;
    let highest = if lambda.is_dominant() {
        true
    } else if lambda.is_antidominant() {
        false
    } else {
        return Err(Error::InvalidWeight(format!("{lambda:?} is neither dominant nor antidominant")));
    };
    let n = datum.rank();
    let mut bd = Builder {
        datum,
        highest,
        labels: vec![vec![]],
        weights: vec![lambda.clone()],
        local: vec![0],
        spaces: BTreeMap::from([(lambda.clone(), vec![0])]),
        grams: BTreeMap::from([(lambda.clone(), RMat::identity(1))]),
        up: vec![vec![Some(vec![])]; n],
        down: vec![vec![None]; n],
    };
    let mut levels = vec![vec![0usize]];
    let mut complete = false;
    for h in 1..=depth + 1 {
        let prev = levels[h - 1].clone();
        let mut by_weight: BTreeMap<Weight, Vec<Cand>> = BTreeMap::new();
        for &b in &prev {
            for i in 0..n {
                let w = bd.down_shift(i, &bd.weights[b]);
                let (scale, label) = match bd.labels[b].first() {
                    Some(&(k, a)) if k == i => {
                        let s = Ratio::from_poly(qint_at(a as i64 + 1, datum.d[i])).inv()?;
                        let mut l = bd.labels[b].clone();
                        l[0].1 += 1;
                        (s, l)
                    }
                    _ => {
                        let mut l = vec![(i, 1)];
                        l.extend_from_slice(&bd.labels[b]);
                        (Ratio::one(), l)
                    }
                };
                by_weight.entry(w).or_default().push(Cand { i, b, scale, label });
            }
        }
        let mut new_level = Vec::new();
        let mut new_spaces = Vec::new();
        for (w, mut cands) in by_weight {
            cands.sort_by(|x, y| x.label.cmp(&y.label));
            let mut kept: Vec<Cand> = Vec::new();
            let mut gram = RMat::zeros(0, 0);
            for c in cands {
                let m = kept.len();
                let mut g = RMat::zeros(m + 1, m + 1);
                for r in 0..m {
                    for s in 0..m {
                        g.set(r, s, gram.get(r, s).clone());
                    }
                }
                for (r, k) in kept.iter().enumerate() {
                    let v = &(&bd.pair(k.i, k.b, c.i, c.b) * &k.scale) * &c.scale;
                    g.set(r, m, v.clone());
                    g.set(m, r, v);
                }
                g.set(m, m, &(&bd.pair(c.i, c.b, c.i, c.b) * &c.scale) * &c.scale);
                if g.rank() == m + 1 {
                    gram = g;
                    kept.push(c);
                }
            }
            if !kept.is_empty() {
                new_spaces.push((w, kept, gram));
            }
        }
        if new_spaces.is_empty() {
            complete = true;
            for &b in &prev {
                for i in 0..n {
                    bd.down[i][b] = Some(vec![]);
                }
            }
            break;
        }
        if h > depth {
            if datum.finite_type {
                return Err(Error::DepthExceeded(depth));
            }
            break;
        }
        // register basis vectors
        let mut cand_of = Vec::new();
        for (w, kept, gram) in new_spaces {
            let mut idxs = Vec::new();
            for (loc, c) in kept.into_iter().enumerate() {
                let id = bd.labels.len();
                bd.labels.push(c.label.clone());
                bd.weights.push(w.clone());
                bd.local.push(loc);
                for k in 0..n {
                    bd.up[k].push(None);
                    bd.down[k].push(None);
                }
                idxs.push(id);
                new_level.push(id);
                cand_of.push((id, c));
            }
            bd.spaces.insert(w.clone(), idxs);
            bd.grams.insert(w, gram);
        }
        // lowering action from the previous level, by solving against the new Gram matrices
        for &b in &prev {
            for i in 0..n {
                let w = bd.down_shift(i, &bd.weights[b]);
                let col = match bd.spaces.get(&w) {
                    None => vec![],
                    Some(ids) => {
                        let rhs = RMat::from_fn(ids.len(), 1, |r, _| {
                            let (_, k) = cand_of.iter().find(|(id, _)| *id == ids[r]).expect("new vector");
                            &bd.pair(k.i, k.b, i, b) * &k.scale
                        });
                        let x = bd.grams[&w].solve(&rhs)?;
                        ids.iter().enumerate().filter(|(r, _)| !x.get(*r, 0).is_zero()).map(|(r, id)| (*id, x.get(r, 0).clone())).collect()
                    }
                };
                bd.down[i][b] = Some(col);
            }
        }
        // raising action on the new level
        for (id, c) in &cand_of {
            for i in 0..n {
                let mut acc = BTreeMap::new();
                for (e, y) in bd.up[i][c.b].as_ref().expect("known") {
                    for (f, z) in bd.down[c.i][*e].as_ref().expect("known") {
                        add_into(&mut acc, *f, y * z);
                    }
                }
                if i == c.i {
                    add_into(&mut acc, c.b, bd.commutator(i, &bd.weights[c.b]));
                }
                bd.up[i][*id] = Some(acc.into_iter().map(|(k, v)| (k, &v * &c.scale)).collect());
            }
        }
        levels.push(new_level);
    }
    let (e_act, f_act) = if highest { (bd.up, bd.down) } else { (bd.down, bd.up) };
    Ok(IrrModule {
        datum: datum.clone(),
        extremal: lambda.clone(),
        highest,
        labels: bd.labels,
        weights: bd.weights,
        levels,
        local: bd.local,
        spaces: bd.spaces,
        grams: bd.grams,
        e_act,
        f_act,
        complete,
    })
}

impl IrrModule {
    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn weight_dim(&self, w: &Weight) -> usize {
        self.spaces.get(w).map_or(0, |v| v.len())
    }

    /// Column of `E_i` (or `F_i`) applied to basis vector `b`.
    pub fn action(&self, g: &Gen, b: usize) -> Result<&[(usize, Ratio)]> {
        let col = match g {
            Gen::E(i) => &self.e_act[*i][b],
            Gen::F(i) => &self.f_act[*i][b],
            Gen::K(_) => return Err(Error::Unsupported("K acts diagonally; use the weight".into())),
        };
        col.as_deref().ok_or(Error::DepthExceeded(self.levels.len() - 1))
    }

    /// Distance from the extremal weight in simple-root coordinates.
    pub fn root_shift(&self, b: usize) -> Vec<i64> {
        let mut m = vec![0; self.datum.rank()];
        for &(i, a) in &self.labels[b] {
            m[i] += a as i64;
        }
        m
    }

    /// Bilinear form on two basis vectors.
    pub fn gram_entry(&self, a: usize, b: usize) -> Ratio {
        if self.weights[a] != self.weights[b] {
            return Ratio::zero();
        }
        self.grams[&self.weights[a]].get(self.local[a], self.local[b]).clone()
    }

    /// Human-readable label like `F1^(2) F0 v`.
    pub fn label_string(&self, b: usize) -> String {
        let op = if self.highest { "F" } else { "E" };
        let mut s = String::new();
        for &(i, a) in &self.labels[b] {
            if a == 1 {
                s.push_str(&format!("{op}{i} "));
            } else {
                s.push_str(&format!("{op}{i}^({a}) "));
            }
        }
        s.push('v');
        s
    }

    /// JSON dump: labels, weights, action matrices and Gram blocks.
    pub fn dump(&self) -> serde_json::Value {
        let act = |tab: &Vec<Vec<Option<SparseCol>>>| {
            tab.iter()
                .map(|cols| {
                    cols.iter()
                        .enumerate()
                        .filter_map(|(b, c)| c.as_ref().map(|c| (b, c)))
                        .flat_map(|(b, c)| c.iter().map(move |(r, v)| json!({"from": b, "to": r, "coeff": v})))
                        .collect::<Vec<_>>()
                })
                .collect::<Vec<_>>()
        };
        let grams: Vec<_> = self
            .grams
            .iter()
            .map(|(w, g)| {
                json!({
                    "weight": w,
                    "basis": self.spaces[w],
                    "gram": (0..g.rows()).map(|r| g.row(r)).collect::<Vec<_>>(),
                })
            })
            .collect();
        json!({
            "extremal_weight": self.extremal,
            "highest": self.highest,
            "labels": (0..self.dim()).map(|b| self.label_string(b)).collect::<Vec<_>>(),
            "weights": self.weights,
            "E": act(&self.e_act),
            "F": act(&self.f_act),
            "gram": grams,
            "complete": self.complete,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laurent::qbinom;

    fn sl2(n: i64) -> IrrModule {
        build_irreducible(&CartanDatum::a1(), &Weight(vec![n]), 32).unwrap()
    }

    #[test]
    fn sl2_dimensions_and_actions() {
        let m = sl2(2);
        assert_eq!(m.dim(), 3);
        assert!(m.complete);
        // E·(Fv) = [2] v
        let col = m.action(&Gen::E(0), 1).unwrap();
        assert_eq!(col, &[(0, Ratio::from_poly(Laurent::from_int_terms(&[(1, 1), (-1, 1)])))]);
        assert_eq!(m.label_string(2), "F0^(2) v");
        let low = build_irreducible(&CartanDatum::a1(), &Weight(vec![-3]), 32).unwrap();
        assert_eq!(low.dim(), 4);
        assert!(low.action(&Gen::F(0), 0).unwrap().is_empty());
        assert!(m.action(&Gen::E(0), 0).unwrap().is_empty());
    }

    #[test]
    fn sl2_norms_match_binomial() {
        for n in 0..=6 {
            let m = sl2(n);
            for k in 0..=n as usize {
                let expect = qbinom(n, k as i64).unwrap().shift(-(k as i64) * (n - k as i64));
                assert_eq!(m.gram_entry(k, k).as_poly().unwrap(), expect, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn weyl_dimensions() {
        let a2 = CartanDatum::a2();
        let dim = |w: Vec<i64>| build_irreducible(&a2, &Weight(w), 32).unwrap().dim();
        assert_eq!(dim(vec![1, 0]), 3);
        assert_eq!(dim(vec![0, 1]), 3);
        assert_eq!(dim(vec![1, 1]), 8);
        assert_eq!(dim(vec![2, 0]), 6);
        assert_eq!(dim(vec![-1, -1]), 8);
        let a3 = CartanDatum::a3();
        assert_eq!(build_irreducible(&a3, &Weight(vec![0, 1, 0]), 32).unwrap().dim(), 6);
        let adj = build_irreducible(&a2, &Weight(vec![1, 1]), 32).unwrap();
        assert_eq!(adj.weight_dim(&Weight(vec![0, 0])), 2);
    }

    #[test]
    fn depth_bound() {
        assert_eq!(build_irreducible(&CartanDatum::a1(), &Weight(vec![5]), 2).unwrap_err(), Error::DepthExceeded(2));
        let aff = build_irreducible(&CartanDatum::affine_a1(), &Weight(vec![1, 0]), 3).unwrap();
        assert!(!aff.complete);
        assert!(build_irreducible(&CartanDatum::a2(), &Weight(vec![1, -1]), 4).is_err());
    }

    #[test]
    fn omega_involution() {
        assert_eq!(cartan_involution(&Gen::E(1)), Gen::F(1));
        assert_eq!(cartan_involution(&Gen::K(vec![1, -2])), Gen::K(vec![-1, 2]));
        for g in [Gen::E(0), Gen::F(2), Gen::K(vec![3])] {
            assert_eq!(cartan_involution(&cartan_involution(&g)), g);
        }
    }
}
