//! Stringy standard bases: word-tuple enumeration, the greedy independence
//! selection in decreasing tuple order, pure-tensor standards, and string-cone
//! oracles for types A1 and A2.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::cartan::{tuple_compare, tuple_partial_cmp, CartanDatum, Weight, WordTuple};
use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::precanon::{canonical, CanonicalBasis, Mode, PrecanonicalStructure};
use crate::uq::{Gen, Key, ModuleVector, Strand, TensorModule, TricoloreTriple};
use crate::{LMat, Laurent, RMat, Ratio};

/// Default enumeration window: the number of positive roots for finite types,
/// otherwise `2·rank·height`.
pub fn default_window(datum: &CartanDatum, height: usize) -> usize {
    match datum.num_positive_roots() {
        Ok(n) => n.max(1),
        Err(_) => (2 * datum.rank() * height).max(1),
    }
}

/// All words over `nodes` whose content (per node) equals `beta`.
fn words_with_content(nodes: &[usize], beta: &[i64]) -> Vec<Vec<u32>> {
    let mut out = vec![vec![0u32; nodes.len()]];
    for (i, &b) in beta.iter().enumerate() {
        let slots: Vec<usize> = (0..nodes.len()).filter(|&j| nodes[j] == i).collect();
        if b > 0 && slots.is_empty() {
            return vec![];
        }
        let mut next = Vec::new();
        for w in &out {
            distribute(b as u32, &slots, 0, &mut w.clone(), &mut next);
        }
        out = next;
    }
    out.into_iter()
        .map(|mut w| {
            while w.last() == Some(&0) {
                w.pop();
            }
            w
        })
        .collect()
}

fn distribute(left: u32, slots: &[usize], k: usize, w: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if k + 1 >= slots.len() {
        if let Some(&s) = slots.get(k) {
            w[s] = left;
            out.push(w.clone());
            w[s] = 0;
        } else if left == 0 {
            out.push(w.clone());
        }
        return;
    }
    for a in 0..=left {
        w[slots[k]] = a;
        distribute(left - a, slots, k + 1, w, out);
    }
    w[slots[k]] = 0;
}

/// Tuples whose associated triple ends at `target`, with words drawn from `nodes`.
pub fn enumerate_tuples(t: &TensorModule, target: &Weight, nodes: &[usize]) -> Vec<WordTuple> {
    // per factor: reachable root shifts
    let shifts: Vec<BTreeSet<Vec<i64>>> = t.factors.iter().map(|f| (0..f.dim()).map(|b| f.root_shift(b)).collect()).collect();
    let mut out = Vec::new();
    let mut chosen: Vec<Vec<i64>> = Vec::new();
    fn rec(
        t: &TensorModule,
        target: &Weight,
        nodes: &[usize],
        shifts: &[BTreeSet<Vec<i64>>],
        chosen: &mut Vec<Vec<i64>>,
        out: &mut Vec<WordTuple>,
    ) {
        let k = chosen.len();
        if k == t.len() {
            let mut w = Weight::zero(t.datum.rank());
            for (j, beta) in chosen.iter().enumerate() {
                let s = -(t.eps[j] as i64);
                w = w.add(&t.weights[j]).sub(&t.datum.root_to_weight(beta).scale(s));
            }
            if &w != target {
                return;
            }
            let per: Vec<Vec<Vec<u32>>> = chosen.iter().map(|b| words_with_content(nodes, b)).collect();
            let mut acc: Vec<Vec<Vec<u32>>> = vec![vec![]];
            for ws in &per {
                let mut next = Vec::new();
                for a in &acc {
                    for w in ws {
                        let mut a2 = a.clone();
                        a2.push(w.clone());
                        next.push(a2);
                    }
                }
                acc = next;
            }
            out.extend(acc.into_iter().map(WordTuple::new));
            return;
        }
        for beta in &shifts[k] {
            chosen.push(beta.clone());
            rec(t, target, nodes, shifts, chosen, out);
            chosen.pop();
        }
    }
    rec(t, target, nodes, &shifts, &mut chosen, &mut out);
    out.sort_by(|a, b| tuple_compare(b, a).expect("same shape"));
    out.dedup();
    out
}

/// The triple `I(a^(1), …, a^(ℓ))`: after red/blue strand `j` comes word `a^(j)`
/// reversed, labelled `ε_j p`.
pub fn tuple_to_triple(t: &TensorModule, tuple: &WordTuple, nodes: &[usize]) -> Result<TricoloreTriple> {
    if tuple.len() != t.len() {
        return Err(Error::IncompatibleTriple(format!("tuple has {} words for {} factors", tuple.len(), t.len())));
    }
    let mut strands = Vec::new();
    let mut kappa = Vec::new();
    for k in 0..t.len() {
        kappa.push(strands.len());
        let pairs = tuple.pairs(k, nodes)?;
        for &(node, mult) in pairs.iter().rev() {
            strands.push(Strand { node, sign: t.eps[k], mult });
        }
    }
    Ok(TricoloreTriple { bla: t.weights.clone(), strands, kappa })
}

/// `s_I = v_{I₁} ⊗ ⋯ ⊗ v_{I_ℓ}`, each factor built from its own word.
pub fn pure_tensor_vector(t: &TensorModule, tuple: &WordTuple, nodes: &[usize]) -> Result<ModuleVector> {
    let mut acc = ModuleVector::basis(vec![]);
    for k in 0..t.len() {
        let single = TensorModule { datum: t.datum.clone(), weights: vec![t.weights[k].clone()], eps: vec![t.eps[k]], factors: vec![t.factors[k].clone()] };
        let one = WordTuple(vec![tuple.0[k].clone()]);
        let v = single.standard_vector(&tuple_to_triple(&single, &one, nodes)?)?;
        let mut next = ModuleVector::zero();
        for (ka, ca) in &acc.terms {
            for (kb, cb) in &v.terms {
                let mut key = ka.clone();
                key.extend_from_slice(kb);
                next.add_term(key, ca * cb);
            }
        }
        acc = next;
    }
    Ok(acc)
}

/// Greedily selected basis of one weight space.
#[derive(Clone, Debug)]
pub struct StandardBasisSelection {
    pub weight: Weight,
    pub nodes: Vec<usize>,
    /// Decreasing in tuple order.
    pub tuples: Vec<WordTuple>,
    pub triples: Vec<TricoloreTriple>,
    pub vectors: Vec<ModuleVector>,
    /// Bilinear form on the selection.
    pub gram: RMat,
    /// Basis keys of the weight space and the coordinate matrix (keys × selection).
    pub keys: Vec<Key>,
    pub coords: RMat,
    /// Number of tuples examined.
    pub examined: usize,
}

fn coord_column(keys: &[Key], v: &ModuleVector) -> Result<Vec<Ratio>> {
    let pos: BTreeMap<&Key, usize> = keys.iter().enumerate().map(|(i, k)| (k, i)).collect();
    let mut col = vec![Ratio::zero(); keys.len()];
    for (k, c) in &v.terms {
        let i = *pos.get(k).ok_or(Error::NotInSpan)?;
        col[i] = c.clone();
    }
    Ok(col)
}

/// Keep `v_{I(a•)}` iff independent of the span of the vectors already kept,
/// processing tuples in decreasing order.
pub fn select_standard_basis(t: &TensorModule, target: &Weight, nodes: &[usize]) -> Result<StandardBasisSelection> {
    let spaces = t.weight_spaces();
    let keys = spaces.get(target).cloned().unwrap_or_default();
    let dim = keys.len();
    let mut sel = StandardBasisSelection {
        weight: target.clone(),
        nodes: nodes.to_vec(),
        tuples: vec![],
        triples: vec![],
        vectors: vec![],
        gram: RMat::zeros(0, 0),
        keys: keys.clone(),
        coords: RMat::zeros(dim, 0),
        examined: 0,
    };
    if dim == 0 {
        return Ok(sel);
    }
    let mut cols: Vec<Vec<Ratio>> = Vec::new();
    for tuple in enumerate_tuples(t, target, nodes) {
        if sel.tuples.len() == dim {
            break;
        }
        sel.examined += 1;
        let triple = tuple_to_triple(t, &tuple, nodes)?;
        let v = t.standard_vector(&triple)?;
        if v.is_zero() {
            continue;
        }
        let col = coord_column(&keys, &v)?;
        let mut trial = cols.clone();
        trial.push(col.clone());
        let m = RMat::from_fn(dim, trial.len(), |r, c| trial[c][r].clone());
        if m.rank() == trial.len() {
            cols = trial;
            sel.tuples.push(tuple);
            sel.triples.push(triple);
            sel.vectors.push(v);
        }
    }
    if cols.len() < dim {
        return Err(Error::SpanDeficiency { weight: target.0.clone(), selected: cols.len(), dim });
    }
    sel.coords = RMat::from_fn(dim, dim, |r, c| cols[c][r].clone());
    let n = sel.vectors.len();
    let mut g = RMat::zeros(n, n);
    for a in 0..n {
        for b in a..n {
            let v = t.bilinear_form(&sel.vectors[a], &sel.vectors[b])?;
            g.set(a, b, v.clone());
            g.set(b, a, v);
        }
    }
    sel.gram = g;
    Ok(sel)
}

/// Selection with the window grown on span deficiency, up to `max_window`.
pub fn select_with_window(t: &TensorModule, target: &Weight, window: usize, max_window: usize) -> Result<StandardBasisSelection> {
    let mut w = window;
    loop {
        let nodes = t.datum.cyclic_nodes(w);
        match select_standard_basis(t, target, &nodes) {
            Err(Error::SpanDeficiency { .. }) if w < max_window => w = (w + t.datum.rank()).min(max_window),
            r => return r,
        }
    }
}

impl StandardBasisSelection {
    pub fn dim(&self) -> usize {
        self.tuples.len()
    }

    /// Coordinates of `v` in the selected basis.
    pub fn coordinates(&self, v: &ModuleVector) -> Result<Vec<Ratio>> {
        if self.dim() == 0 {
            return if v.is_zero() { Ok(vec![]) } else { Err(Error::NotInSpan) };
        }
        let col = coord_column(&self.keys, v)?;
        let b = RMat::from_fn(col.len(), 1, |r, _| col[r].clone());
        Ok(self.coords.solve(&b)?.column(0))
    }

    pub fn vector_from_coords(&self, x: &[Ratio]) -> ModuleVector {
        let mut out = ModuleVector::zero();
        for (c, v) in x.iter().zip(&self.vectors) {
            out = out.add(&v.scale(c));
        }
        out
    }

    /// Bilinear Gram as Laurent polynomials.
    pub fn gram_laurent(&self) -> Result<LMat> {
        self.gram.to_laurent().ok_or_else(|| Error::NotIntegral(format!("Gram matrix at weight {:?}", self.weight)))
    }

    /// Strict partial order on positions: `less[a][b]` iff tuple `a` is greater than tuple `b`.
    pub fn order(&self) -> Result<Vec<Vec<bool>>> {
        let n = self.dim();
        let mut less = vec![vec![false; n]; n];
        for a in 0..n {
            for b in 0..n {
                less[a][b] = tuple_partial_cmp(&self.tuples[a], &self.tuples[b])? == Some(Ordering::Greater);
            }
        }
        Ok(less)
    }
}

/// `⟨u, w⟩ = (Ψu, w)` with `Ψ` the coefficient bar in the stringy basis.
pub fn sesquilinear_pairing(sel: &StandardBasisSelection, u: &[Ratio], w: &[Ratio]) -> Ratio {
    let mut acc = Ratio::zero();
    for (c, f) in u.iter().enumerate() {
        if f.is_zero() {
            continue;
        }
        let fb = f.bar();
        for (d, g) in w.iter().enumerate() {
            if !g.is_zero() {
                acc = &acc + &(&(&fb * g) * sel.gram.get(c, d));
            }
        }
    }
    acc
}

/// `Ψ` in stringy coordinates.
pub fn bar_psi(u: &[Ratio]) -> Vec<Ratio> {
    u.iter().map(|x| x.bar()).collect()
}

/// Pure-tensor standards `s_I` for the selected tuples, in stringy coordinates (columns).
pub fn pure_tensor_coords(t: &TensorModule, sel: &StandardBasisSelection) -> Result<RMat> {
    let n = sel.dim();
    let mut m = RMat::zeros(n, n);
    for (c, tuple) in sel.tuples.iter().enumerate() {
        let v = pure_tensor_vector(t, tuple, &sel.nodes)?;
        for (r, x) in sel.coordinates(&v)?.into_iter().enumerate() {
            m.set(r, c, x);
        }
    }
    Ok(m)
}

/// Exported form of a selection.
#[derive(Serialize)]
pub struct SelectionEntry {
    pub tuple: WordTuple,
    pub vector: Vec<(Key, Ratio)>,
}

pub fn export_selection(sel: &StandardBasisSelection) -> Vec<SelectionEntry> {
    sel.tuples
        .iter()
        .zip(&sel.vectors)
        .map(|(t, v)| SelectionEntry { tuple: t.clone(), vector: v.terms.iter().map(|(k, c)| (k.clone(), c.clone())).collect() })
        .collect()
}

/// Valid single-factor string parametrizations (words against `p = 0,1,0,…` for A2,
/// `0,0,…` for A1). Antidominant weights use the oracle for `−λ`.
pub fn string_cone_oracle(datum: &CartanDatum, lambda: &Weight) -> Result<BTreeSet<Vec<u32>>> {
    let l = if lambda.is_dominant() {
        lambda.clone()
    } else if lambda.is_antidominant() {
        lambda.neg()
    } else {
        return Err(Error::InvalidWeight(format!("{lambda:?}")));
    };
    let trim = |mut w: Vec<u32>| {
        while w.last() == Some(&0) {
            w.pop();
        }
        w
    };
    let mut out = BTreeSet::new();
    if datum.c == CartanDatum::a1().c {
        for k in 0..=l.0[0] {
            out.insert(trim(vec![k as u32]));
        }
    } else if datum.c == CartanDatum::a2().c {
        let (l1, l2) = (l.0[0], l.0[1]);
        for a3 in 0..=l1 {
            for a2 in a3..=(l2 + a3) {
                for a1 in 0..=(l1 - 2 * a3 + a2) {
                    out.insert(trim(vec![a1 as u32, a2 as u32, a3 as u32]));
                }
            }
        }
    } else {
        return Err(Error::Unsupported(format!("string oracle for {}", datum.name)));
    }
    Ok(out)
}

/// Largest total height of a weight in `t`, in simple roots.
pub fn module_height(t: &TensorModule) -> usize {
    t.factors.iter().map(|f| (0..f.dim()).map(|b| f.root_shift(b).iter().map(|x| x.unsigned_abs() as usize).sum::<usize>()).max().unwrap_or(0)).sum()
}

/// Selection with the default window, auto-grown up to `2·rank·height`.
pub fn auto_select(t: &TensorModule, target: &Weight) -> Result<StandardBasisSelection> {
    let h = module_height(t).max(1);
    let w0 = default_window(&t.datum, h);
    select_with_window(t, target, w0, (2 * t.datum.rank() * h).max(w0))
}

/// A weight space with its stringy structure and canonical basis.
#[derive(Clone, Debug)]
pub struct CanonicalBlock {
    pub sel: StandardBasisSelection,
    pub structure: PrecanonicalStructure,
    pub basis: CanonicalBasis,
}

/// Stringy structure at `target` (ψ fixes every standard) and its canonical basis.
/// `nodes = None` uses [`auto_select`].
pub fn canonical_block(t: &TensorModule, target: &Weight, nodes: Option<&[usize]>, mode: Mode) -> Result<CanonicalBlock> {
    let sel = match nodes {
        Some(p) => select_standard_basis(t, target, p)?,
        None => auto_select(t, target)?,
    };
    let labels = sel.tuples.iter().map(|tu| format!("{tu:?}")).collect();
    let structure = PrecanonicalStructure::with_fixed_standards(labels, sel.order()?, sel.gram_laurent()?)?;
    let basis = canonical(&structure, mode)?;
    Ok(CanonicalBlock { sel, structure, basis })
}

impl CanonicalBlock {
    pub fn canonical_vector(&self, c: usize) -> ModuleVector {
        let x: Vec<Ratio> = self.basis.vector(c).into_iter().map(Ratio::from_poly).collect();
        self.sel.vector_from_coords(&x)
    }

    /// Coordinates of `v` in the canonical basis.
    pub fn canonical_coordinates(&self, v: &ModuleVector) -> Result<Vec<Ratio>> {
        let x = self.sel.coordinates(v)?;
        if x.is_empty() {
            return Ok(x);
        }
        let b = RMat::from_fn(x.len(), 1, |r, _| x[r].clone());
        Ok(self.basis.transition.to_ratio().solve(&b)?.column(0))
    }
}

/// Matrix of `g` from `from` to `to` in canonical bases (column `c` is `g·b_c`).
pub fn action_matrix(t: &TensorModule, g: &Gen, from: &CanonicalBlock, to: &CanonicalBlock) -> Result<RMat> {
    let mut m = RMat::zeros(to.sel.dim(), from.sel.dim());
    for c in 0..from.sel.dim() {
        let v = t.act(g, &from.canonical_vector(c))?;
        if v.is_zero() {
            continue;
        }
        for (r, x) in to.canonical_coordinates(&v)?.into_iter().enumerate() {
            m.set(r, c, x);
        }
    }
    Ok(m)
}

/// Canonical vectors in the pure-tensor standards `s_I` (column `c` is `b_c`).
pub fn canonical_in_pure_tensors(t: &TensorModule, block: &CanonicalBlock) -> Result<RMat> {
    let s = pure_tensor_coords(t, &block.sel)?;
    s.solve(&block.basis.transition.to_ratio())
}

/// Convert a Laurent matrix of stringy coordinates for export.
pub fn laurent_or_err(m: &RMat, what: &str) -> Result<LMat> {
    m.to_laurent().ok_or_else(|| Error::NotIntegral(what.into()))
}

/// Laurent identity-shaped helper used by structures with ψ-fixed standards.
pub fn identity_bar(n: usize) -> LMat {
    Mat::<Laurent>::identity(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sl2(ws: &[i64]) -> TensorModule {
        TensorModule::new(&CartanDatum::a1(), &ws.iter().map(|&x| Weight(vec![x])).collect::<Vec<_>>(), 16).unwrap()
    }

    fn wt(ws: &[&[u32]]) -> WordTuple {
        WordTuple::new(ws.iter().map(|w| w.to_vec()).collect())
    }

    #[test]
    fn enumeration_examples() {
        let t = sl2(&[1, 1]);
        let nodes = vec![0];
        assert_eq!(enumerate_tuples(&t, &Weight(vec![2]), &nodes), vec![wt(&[&[], &[]])]);
        let w0 = enumerate_tuples(&t, &Weight(vec![0]), &nodes);
        assert!(w0.contains(&wt(&[&[1], &[]])) && w0.contains(&wt(&[&[], &[1]])));
        assert!(enumerate_tuples(&t, &Weight(vec![-2]), &nodes).contains(&wt(&[&[1], &[1]])));
        let longer = enumerate_tuples(&t, &Weight(vec![0]), &[0, 0]);
        assert!(longer.contains(&wt(&[&[0, 1], &[]])));
    }

    #[test]
    fn selection_examples() {
        let t = sl2(&[1, 1]);
        let nodes = vec![0];
        let s = select_standard_basis(&t, &Weight(vec![0]), &nodes).unwrap();
        assert_eq!(s.tuples, vec![wt(&[&[1], &[]]), wt(&[&[], &[1]])]);
        assert_eq!(select_standard_basis(&t, &Weight(vec![2]), &nodes).unwrap().tuples, vec![wt(&[&[], &[]])]);
        assert_eq!(select_standard_basis(&t, &Weight(vec![-2]), &nodes).unwrap().tuples, vec![wt(&[&[1], &[1]])]);
    }

    #[test]
    fn span_deficiency_reported() {
        let t = TensorModule::new(&CartanDatum::a2(), &[Weight(vec![1, 1])], 16).unwrap();
        let e = select_standard_basis(&t, &Weight(vec![0, 0]), &[0]).unwrap_err();
        assert!(matches!(e, Error::SpanDeficiency { .. }));
    }

    #[test]
    fn oracle_counts() {
        let a2 = CartanDatum::a2();
        assert_eq!(string_cone_oracle(&a2, &Weight(vec![1, 0])).unwrap().len(), 3);
        assert_eq!(string_cone_oracle(&a2, &Weight(vec![0, 1])).unwrap().len(), 3);
        assert_eq!(string_cone_oracle(&a2, &Weight(vec![1, 1])).unwrap().len(), 8);
        assert_eq!(string_cone_oracle(&a2, &Weight(vec![2, 0])).unwrap().len(), 6);
        let v = string_cone_oracle(&a2, &Weight(vec![1, 0])).unwrap();
        assert_eq!(v, BTreeSet::from([vec![], vec![1], vec![0, 1, 1]]));
        assert!(string_cone_oracle(&CartanDatum::a1(), &Weight(vec![3])).unwrap().contains(&vec![]));
        assert!(string_cone_oracle(&CartanDatum::a3(), &Weight(vec![1, 0, 0])).is_err());
    }

    #[test]
    fn sesquilinear_values() {
        let t = sl2(&[1, 1]);
        let s = select_standard_basis(&t, &Weight(vec![0]), &[0]).unwrap();
        let e = |i: usize| (0..2).map(|j| if i == j { Ratio::one() } else { Ratio::zero() }).collect::<Vec<_>>();
        let q = |ts: &[(i64, i64)]| Ratio::from_poly(Laurent::from_int_terms(ts));
        assert_eq!(sesquilinear_pairing(&s, &e(0), &e(0)), Ratio::one());
        assert_eq!(sesquilinear_pairing(&s, &e(0), &e(1)), q(&[(-1, 1)]));
        assert_eq!(sesquilinear_pairing(&s, &e(1), &e(1)), q(&[(0, 1), (-2, 1)]));
        // antilinear in the first slot
        let qa = vec![q(&[(1, 1)]), Ratio::zero()];
        assert_eq!(sesquilinear_pairing(&s, &qa, &e(0)), q(&[(-1, 1)]));
        assert_eq!(bar_psi(&qa), vec![q(&[(-1, 1)]), Ratio::zero()]);
    }
}
