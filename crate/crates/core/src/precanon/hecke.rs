//! Iwahori–Hecke algebra of `S_n` in the balanced normalisation
//! `T_s² = (q − q⁻¹)T_s + 1`, as a pre-canonical structure on `{T_w}`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::precanon::PrecanonicalStructure;
use crate::{LMat, Laurent};

/// Permutation in one-line notation on `0..n`.
pub type Perm = Vec<u8>;

/// Element `Σ c_w T_w`.
pub type HeckeElem = BTreeMap<Perm, Laurent>;

pub const MAX_RANK: usize = 6;

pub fn length(w: &[u8]) -> usize {
    (0..w.len()).map(|i| (i + 1..w.len()).filter(|&j| w[i] > w[j]).count()).sum()
}

/// All of `S_n`, sorted by length then lexicographically.
pub fn elements(n: usize) -> Result<Vec<Perm>> {
    if n == 0 || n > MAX_RANK {
        return Err(Error::OutOfRange(format!("symmetric group S_{n} (supported: 1..={MAX_RANK})")));
    }
    let mut out = Vec::new();
    let mut p: Perm = (0..n as u8).collect();
    permute(&mut p, 0, &mut out);
    out.sort_by(|a, b| length(a).cmp(&length(b)).then(a.cmp(b)));
    Ok(out)
}

fn permute(p: &mut Perm, k: usize, out: &mut Vec<Perm>) {
    if k == p.len() {
        out.push(p.clone());
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permute(p, k + 1, out);
        p.swap(k, i);
    }
}

/// `w = s_{i_1} ⋯ s_{i_k}` with `k = ℓ(w)`; `s_i` swaps positions `i, i+1`.
pub fn reduced_word(w: &[u8]) -> Vec<usize> {
    let mut w = w.to_vec();
    let mut rev = Vec::new();
    while let Some(i) = (0..w.len().saturating_sub(1)).find(|&i| w[i] > w[i + 1]) {
        w.swap(i, i + 1);
        rev.push(i);
    }
    rev.reverse();
    rev
}

/// Tableau criterion for the Bruhat order.
pub fn bruhat_le(x: &[u8], w: &[u8]) -> bool {
    (1..x.len()).all(|k| {
        let mut a = x[..k].to_vec();
        let mut b = w[..k].to_vec();
        a.sort_unstable();
        b.sort_unstable();
        a.iter().zip(&b).all(|(u, v)| u <= v)
    })
}

fn add(h: &mut HeckeElem, w: Perm, c: Laurent) {
    let e = h.entry(w).or_insert_with(Laurent::zero);
    *e += &c;
    if e.is_zero() {
        h.retain(|_, v| !v.is_zero());
    }
}

/// Right multiplication by `T_{s_i}`.
pub fn mul_s(h: &HeckeElem, i: usize) -> HeckeElem {
    let qq = Laurent::from_int_terms(&[(1, 1), (-1, -1)]);
    let mut out = HeckeElem::new();
    for (w, c) in h {
        let mut ws = w.clone();
        ws.swap(i, i + 1);
        add(&mut out, ws, c.clone());
        if w[i] > w[i + 1] {
            add(&mut out, w.clone(), c * &qq);
        }
    }
    out
}

pub fn mul(a: &HeckeElem, b: &HeckeElem) -> HeckeElem {
    let mut out = HeckeElem::new();
    for (w, c) in b {
        let mut part = a.clone();
        for i in reduced_word(w) {
            part = mul_s(&part, i);
        }
        for (x, d) in part {
            add(&mut out, x, &d * c);
        }
    }
    out
}

pub fn basis(w: &[u8]) -> HeckeElem {
    HeckeElem::from([(w.to_vec(), Laurent::one())])
}

/// `bar(T_w) = T_{w⁻¹}⁻¹`, the product of `T_s − (q − q⁻¹)` along a reduced word.
pub fn bar_basis(w: &[u8]) -> HeckeElem {
    let qq = Laurent::from_int_terms(&[(1, 1), (-1, -1)]);
    let id: Perm = (0..w.len() as u8).collect();
    let mut h = basis(&id);
    for i in reduced_word(w) {
        let shifted = mul_s(&h, i);
        let mut next = shifted;
        for (x, c) in &h {
            add(&mut next, x.clone(), -(c * &qq));
        }
        h = next;
    }
    h
}

pub fn bar(h: &HeckeElem) -> HeckeElem {
    let mut out = HeckeElem::new();
    for (w, c) in h {
        for (x, d) in bar_basis(w) {
            add(&mut out, x, &d * &c.bar());
        }
    }
    out
}

pub fn label(w: &[u8]) -> String {
    w.iter().map(|x| (x + 1).to_string()).collect()
}

/// Labels `T_w`, Bruhat order, `ψ(T_w) = bar(T_w)` and the adapter-local form
/// `⟨T_x, T_y⟩ = r_{yx}`, which makes the structure balanced.
pub fn hecke_structure(n: usize) -> Result<(Vec<Perm>, PrecanonicalStructure)> {
    let els = elements(n)?;
    let idx: BTreeMap<&Perm, usize> = els.iter().enumerate().map(|(i, w)| (w, i)).collect();
    let k = els.len();
    let mut r = LMat::zeros(k, k);
    for (c, w) in els.iter().enumerate() {
        for (x, v) in bar_basis(w) {
            r.set(idx[&x], c, v);
        }
    }
    let less = els.iter().map(|x| els.iter().map(|w| x != w && bruhat_le(x, w)).collect()).collect();
    let p = PrecanonicalStructure::new(els.iter().map(|w| label(w)).collect(), less, r.clone(), r.transpose())?;
    Ok((els, p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::precanon::{balanced_positive_report, canonical_triangular, dual_bases, dual_structure, Mode};

    #[test]
    fn quadratic_relation_and_bar() {
        let s: Perm = vec![1, 0];
        let sq = mul(&basis(&s), &basis(&s));
        let mut rhs = basis(&[0, 1]);
        rhs.insert(s.clone(), Laurent::from_int_terms(&[(1, 1), (-1, -1)]));
        assert_eq!(sq, rhs);
        // bar is an involution and a ring map on S3
        let els = elements(3).unwrap();
        for a in &els {
            assert_eq!(bar(&bar(&basis(a))), basis(a));
            for b in &els {
                assert_eq!(bar(&mul(&basis(a), &basis(b))), mul(&bar(&basis(a)), &bar(&basis(b))));
            }
        }
    }

    #[test]
    fn braid_relation() {
        let a = mul(&mul(&basis(&[1, 0, 2]), &basis(&[0, 2, 1])), &basis(&[1, 0, 2]));
        let b = mul(&mul(&basis(&[0, 2, 1]), &basis(&[1, 0, 2])), &basis(&[0, 2, 1]));
        assert_eq!(a, b);
        assert_eq!(a, basis(&[2, 1, 0]));
    }

    #[test]
    fn bruhat_and_words() {
        assert!(bruhat_le(&[0, 1, 2], &[2, 1, 0]));
        assert!(!bruhat_le(&[1, 2, 0], &[2, 0, 1]));
        for w in elements(4).unwrap() {
            assert_eq!(reduced_word(&w).len(), length(&w));
        }
        assert_eq!(elements(4).unwrap().len(), 24);
        assert!(elements(0).is_err());
    }

    #[test]
    fn s2_canonical_basis() {
        let (els, p) = hecke_structure(2).unwrap();
        assert!(p.is_balanced() && p.is_flip_unitary() && p.bar_is_involution());
        let b = canonical_triangular(&p).unwrap();
        assert_eq!(b.mode, Mode::Triangular);
        assert_eq!(els, vec![vec![0, 1], vec![1, 0]]);
        assert_eq!(b.transition.get(0, 1), &Laurent::from_int_terms(&[(-1, 1)]));
    }

    #[test]
    fn dual_canonical_basis_is_the_dual_basis() {
        for n in 2..=4 {
            let (_, p) = hecke_structure(n).unwrap();
            let b = canonical_triangular(&p).unwrap();
            let ds = dual_structure(&p).unwrap();
            assert!(ds.is_balanced() && ds.is_flip_unitary() && ds.bar_is_involution());
            let db = canonical_triangular(&ds).unwrap();
            // b* in twisted coordinates
            assert_eq!(db.transition.to_ratio(), dual_bases(&p, &b).unwrap().b_star.bar());
            let r = balanced_positive_report(&p, &b).unwrap();
            assert!(r.dual.unwrap().confirmed, "S{n}: {:?}", r.witnesses);
        }
    }
}
