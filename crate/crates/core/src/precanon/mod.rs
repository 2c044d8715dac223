//! Pre-canonical structures and the two canonical-basis algorithms, dual
//! bases, balanced positivity, and uniqueness / sign utilities.

pub mod hecke;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::{LMat, Laurent, RMat};

/// Sweep cap for the form-based algorithm.
pub const GS_ITERATION_CAP: usize = 64;

/// Labels, a strict partial order, the bar matrix (column convention
/// `ψ(a_c) = Σ r_{c'c} a_{c'}`) and the sesquilinear Gram matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct PrecanonicalStructure {
    pub labels: Vec<String>,
    /// `less[a][b]` iff `a < b`; transitively closed.
    less: Vec<Vec<bool>>,
    pub bar: LMat,
    pub gram: LMat,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawStructure {
    labels: Vec<String>,
    /// Pairs `[a, b]` meaning `a < b`.
    order: Vec<(usize, usize)>,
    bar: LMat,
    gram: LMat,
}

impl Serialize for PrecanonicalStructure {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RawStructure { labels: self.labels.clone(), order: self.order_edges(), bar: self.bar.clone(), gram: self.gram.clone() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for PrecanonicalStructure {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = RawStructure::deserialize(d)?;
        Self::from_edges(r.labels, &r.order, r.bar, r.gram).map_err(serde::de::Error::custom)
    }
}

impl PrecanonicalStructure {
    /// Validates shapes, acyclicity and unitriangularity of the bar matrix.
    pub fn new(labels: Vec<String>, less: Vec<Vec<bool>>, bar: LMat, gram: LMat) -> Result<Self> {
        let n = labels.len();
        if less.len() != n || less.iter().any(|r| r.len() != n) {
            return Err(Error::Shape("order relation".into()));
        }
        for (m, what) in [(&bar, "bar"), (&gram, "gram")] {
            if m.rows() != n || m.cols() != n {
                return Err(Error::Shape(format!("{what} is {}x{}, expected {n}x{n}", m.rows(), m.cols())));
            }
        }
        let mut less = less;
        // transitive closure
        for k in 0..n {
            for i in 0..n {
                if less[i][k] {
                    for j in 0..n {
                        if less[k][j] {
                            less[i][j] = true;
                        }
                    }
                }
            }
        }
        if (0..n).any(|i| less[i][i]) {
            return Err(Error::Shape("order has a cycle".into()));
        }
        let p = Self { labels, less, bar, gram };
        for c in 0..n {
            if !p.bar.get(c, c).is_one() {
                return Err(Error::Shape(format!("bar matrix diagonal at {}", p.labels[c])));
            }
            for c2 in 0..n {
                if c2 != c && !p.bar.get(c2, c).is_zero() && !p.less[c2][c] {
                    return Err(Error::Shape(format!("bar matrix not unitriangular at ({}, {})", p.labels[c2], p.labels[c])));
                }
            }
        }
        Ok(p)
    }

    pub fn from_edges(labels: Vec<String>, edges: &[(usize, usize)], bar: LMat, gram: LMat) -> Result<Self> {
        let n = labels.len();
        let mut less = vec![vec![false; n]; n];
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::OutOfRange(format!("order edge ({a}, {b})")));
            }
            less[a][b] = true;
        }
        Self::new(labels, less, bar, gram)
    }

    /// Identity bar matrix with the given Gram matrix.
    pub fn with_fixed_standards(labels: Vec<String>, less: Vec<Vec<bool>>, gram: LMat) -> Result<Self> {
        let n = labels.len();
        Self::new(labels, less, Mat::identity(n), gram)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn less(&self, a: usize, b: usize) -> bool {
        self.less[a][b]
    }

    pub fn order_edges(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        (0..n).flat_map(|a| (0..n).filter(move |&b| self.less[a][b]).map(move |b| (a, b))).collect()
    }

    /// `ψ² = 1`, i.e. `R·bar(R) = I`.
    pub fn bar_is_involution(&self) -> bool {
        self.bar.mul(&self.bar.bar()).is_ok_and(|m| m.is_identity())
    }

    /// `⟨u,v⟩ = ⟨ψv, ψu⟩` on basis vectors: `Gᵀ = R̄ᵀ G R`.
    pub fn is_flip_unitary(&self) -> bool {
        self.bar.adjoint().mul(&self.gram).and_then(|m| m.mul(&self.bar)).is_ok_and(|m| m == self.gram.transpose())
    }

    /// `⟨ψ(a_c), a_d⟩ = R̄ᵀG`.
    pub fn psi_pairing(&self) -> LMat {
        self.bar.adjoint().mul(&self.gram).expect("square")
    }

    pub fn is_balanced(&self) -> bool {
        self.psi_pairing().is_identity()
    }

    pub fn is_almost_balanced(&self) -> bool {
        let m = self.psi_pairing();
        let ok = m.entries().all(|(r, c, x)| x.is_almost_delta(r == c));
        ok
    }

    /// Sesquilinear pairing of coordinate vectors (antilinear in the first slot).
    pub fn pair(&self, u: &[Laurent], v: &[Laurent]) -> Laurent {
        let mut acc = Laurent::zero();
        for (x, ux) in u.iter().enumerate() {
            if ux.is_zero() {
                continue;
            }
            let ub = ux.bar();
            for (y, vy) in v.iter().enumerate() {
                if !vy.is_zero() && !self.gram.get(x, y).is_zero() {
                    acc += &(&(&ub * vy) * self.gram.get(x, y));
                }
            }
        }
        acc
    }

    /// `ψ` on a coordinate vector.
    pub fn psi(&self, v: &[Laurent]) -> Vec<Laurent> {
        let vb: Vec<Laurent> = v.iter().map(|x| x.bar()).collect();
        self.bar.mul_vec(&vb).expect("length")
    }

    /// Deterministic linear extension: by number of predecessors, then index.
    pub fn linear_extension(&self) -> Vec<usize> {
        let n = self.len();
        let mut ext: Vec<usize> = (0..n).collect();
        ext.sort_by_key(|&c| ((0..n).filter(|&d| self.less[d][c]).count(), c));
        ext
    }

    /// Uniformly random choice among minimal elements at each step.
    pub fn random_linear_extension<R: Rng>(&self, rng: &mut R) -> Vec<usize> {
        let n = self.len();
        let mut placed = vec![false; n];
        let mut ext = Vec::with_capacity(n);
        while ext.len() < n {
            let ready: Vec<usize> = (0..n).filter(|&c| !placed[c] && (0..n).all(|d| !self.less[d][c] || placed[d])).collect();
            let c = *ready.choose(rng).expect("acyclic");
            placed[c] = true;
            ext.push(c);
        }
        ext
    }

    fn check_extension(&self, ext: &[usize]) -> Result<Vec<usize>> {
        let n = self.len();
        let mut pos = vec![usize::MAX; n];
        for (i, &c) in ext.iter().enumerate() {
            if c >= n || pos[c] != usize::MAX {
                return Err(Error::Shape("linear extension is not a permutation".into()));
            }
            pos[c] = i;
        }
        if ext.len() != n {
            return Err(Error::Shape("linear extension is not a permutation".into()));
        }
        for a in 0..n {
            for b in 0..n {
                if self.less[a][b] && pos[a] > pos[b] {
                    return Err(Error::Shape("sequence is not a linear extension".into()));
                }
            }
        }
        Ok(pos)
    }

    /// Single-label restriction used by weight-block solving.
    pub fn restrict(&self, idx: &[usize]) -> Result<Self> {
        let less = idx.iter().map(|&a| idx.iter().map(|&b| self.less[a][b]).collect()).collect();
        Self::new(idx.iter().map(|&i| self.labels[i].clone()).collect(), less, self.bar.select(idx, idx), self.gram.select(idx, idx))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Gs,
    Triangular,
}

/// `b_c = Σ_{c'} m_{c'c} a_{c'}` (columns of `transition`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CanonicalBasis {
    pub labels: Vec<String>,
    pub transition: LMat,
    pub mode: Mode,
    /// Sweeps used by the form-based algorithm (0 for triangular).
    pub iterations: usize,
    pub linear_extension: Vec<usize>,
}

impl CanonicalBasis {
    pub fn vector(&self, c: usize) -> Vec<Laurent> {
        self.transition.column(c)
    }

    /// `⟨b_c, b_d⟩`.
    pub fn gram(&self, p: &PrecanonicalStructure) -> LMat {
        self.transition.adjoint().mul(&p.gram).and_then(|x| x.mul(&self.transition)).expect("square")
    }
}

/// Bar-fixedness, unitriangularity, almost orthonormality and negativity of
/// the transition, each checked independently.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Audit {
    pub bar_fixed: bool,
    pub unitriangular: bool,
    pub almost_orthonormal: bool,
    pub transition_negative: bool,
    pub witnesses: Vec<String>,
}

impl Audit {
    pub fn passes(&self, mode: Mode) -> bool {
        // almost orthonormality is re-verified whichever path produced the basis
        self.bar_fixed
            && self.unitriangular
            && self.almost_orthonormal
            && match mode {
                Mode::Gs => true,
                Mode::Triangular => self.transition_negative,
            }
    }
}

pub fn audit(p: &PrecanonicalStructure, m: &LMat) -> Audit {
    let n = p.len();
    let mut w = Vec::new();
    let bar_fixed = p.bar.mul(&m.bar()).is_ok_and(|x| &x == m);
    if !bar_fixed {
        w.push("R·bar(M) ≠ M".to_string());
    }
    let mut unitriangular = true;
    let mut transition_negative = true;
    for c in 0..n {
        for c2 in 0..n {
            let x = m.get(c2, c);
            if c == c2 {
                unitriangular &= x.is_one();
            } else if !x.is_zero() {
                if !p.less(c2, c) {
                    unitriangular = false;
                    w.push(format!("m[{}][{}] = {x} outside the order", p.labels[c2], p.labels[c]));
                }
                if !x.in_neg_part() {
                    transition_negative = false;
                    w.push(format!("m[{}][{}] = {x} not in q⁻¹ℤ[q⁻¹]", p.labels[c2], p.labels[c]));
                }
            }
        }
    }
    let g = m.adjoint().mul(&p.gram).and_then(|x| x.mul(m)).expect("square");
    let mut almost_orthonormal = true;
    for (r, c, x) in g.entries() {
        if !x.is_almost_delta(r == c) {
            almost_orthonormal = false;
            w.push(format!("⟨b_{}, b_{}⟩ = {x}", p.labels[r], p.labels[c]));
        }
    }
    Audit { bar_fixed, unitriangular, almost_orthonormal, transition_negative, witnesses: w }
}

/// Form-based (Gram–Schmidt) construction. Needs ψ-fixed standards.
pub fn canonical_gs(p: &PrecanonicalStructure) -> Result<CanonicalBasis> {
    canonical_gs_with(p, &p.linear_extension())
}

pub fn canonical_gs_with(p: &PrecanonicalStructure, ext: &[usize]) -> Result<CanonicalBasis> {
    if !p.bar.is_identity() {
        return Err(Error::Unsupported("form-based solve needs ψ-fixed standards; use the triangular mode".into()));
    }
    let pos = p.check_extension(ext)?;
    let n = p.len();
    let mut m = LMat::identity(n);
    let mut iterations = 0;
    for &c in ext {
        let mut below: Vec<usize> = (0..n).filter(|&d| p.less(d, c)).collect();
        below.sort_by_key(|&d| std::cmp::Reverse(pos[d]));
        let mut sweeps = 0;
        loop {
            if sweeps == GS_ITERATION_CAP {
                return Err(Error::NoFixpoint(GS_ITERATION_CAP));
            }
            sweeps += 1;
            let mut changed = false;
            for &d in &below {
                let bc = m.column(c);
                let bd = m.column(d);
                let head = p.pair(&bc, &bd).bar_invariant_head();
                if head.is_zero() {
                    continue;
                }
                changed = true;
                for r in 0..n {
                    let v = m.get(r, c) - &(&head * &bd[r]);
                    m.set(r, c, v);
                }
            }
            if !changed {
                break;
            }
        }
        iterations = iterations.max(sweeps);
    }
    let a = audit(p, &m);
    if !a.passes(Mode::Gs) {
        return Err(Error::AuditFailed(a.witnesses.join("; ")));
    }
    Ok(CanonicalBasis { labels: p.labels.clone(), transition: m, mode: Mode::Gs, iterations, linear_extension: ext.to_vec() })
}

/// Triangular (Kazhdan–Lusztig style) construction from the bar matrix alone.
pub fn canonical_triangular(p: &PrecanonicalStructure) -> Result<CanonicalBasis> {
    canonical_triangular_with(p, &p.linear_extension())
}

pub fn canonical_triangular_with(p: &PrecanonicalStructure, ext: &[usize]) -> Result<CanonicalBasis> {
    let pos = p.check_extension(ext)?;
    let n = p.len();
    let mut m = LMat::identity(n);
    for &c in ext {
        let mut below: Vec<usize> = (0..n).filter(|&d| p.less(d, c)).collect();
        below.sort_by_key(|&d| std::cmp::Reverse(pos[d]));
        for &d in &below {
            // m_dc − bar(m_dc) = Σ_{d < e ≤ c} r_de · bar(m_ec)
            let mut rhs = Laurent::zero();
            for e in 0..n {
                if (e == c || p.less(e, c)) && p.less(d, e) && !p.bar.get(d, e).is_zero() {
                    rhs += &(p.bar.get(d, e) * &m.get(e, c).bar());
                }
            }
            let x = rhs.antisym_negative_part().map_err(|_| Error::NoCanonicalBasis(format!("right-hand side {rhs} at ({}, {}) is not bar-antisymmetric", p.labels[d], p.labels[c])))?;
            m.set(d, c, x);
        }
    }
    let a = audit(p, &m);
    if !a.passes(Mode::Triangular) {
        return Err(Error::NoCanonicalBasis(a.witnesses.join("; ")));
    }
    Ok(CanonicalBasis { labels: p.labels.clone(), transition: m, mode: Mode::Triangular, iterations: 0, linear_extension: ext.to_vec() })
}

pub fn canonical(p: &PrecanonicalStructure, mode: Mode) -> Result<CanonicalBasis> {
    match mode {
        Mode::Gs => canonical_gs(p),
        Mode::Triangular => canonical_triangular(p),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NegativityEquivalence {
    pub almost_balanced: bool,
    pub transition_negative: bool,
    pub almost_orthonormal: bool,
    /// Whether unitriangular + almost orthonormal ⟺ unitriangular + negative
    /// transition was confirmed; `None` when not almost balanced.
    pub equivalence: Option<bool>,
}

pub fn check_two_prime_equivalence(p: &PrecanonicalStructure, b: &CanonicalBasis) -> NegativityEquivalence {
    let a = audit(p, &b.transition);
    let almost_balanced = p.is_almost_balanced();
    NegativityEquivalence {
        almost_balanced,
        transition_negative: a.transition_negative,
        almost_orthonormal: a.almost_orthonormal,
        equivalence: almost_balanced.then_some((a.unitriangular && a.almost_orthonormal) == (a.unitriangular && a.transition_negative)),
    }
}

/// Dual standard and canonical bases.
#[derive(Clone, Debug, Serialize)]
pub struct DualBases {
    /// `a*_d = Σ_c x_{cd} a_c`.
    pub a_star: RMat,
    /// `b*_d = Σ_c y_{cd} a*_c`.
    pub b_star: RMat,
    pub gram_a_star: RMat,
    pub gram_b: LMat,
    pub gram_b_star: RMat,
    /// `⟨b_c,b_d⟩ᵀ · bar(⟨b*_c,b*_d⟩) = I`.
    pub identity_holds: bool,
}

pub fn dual_bases(p: &PrecanonicalStructure, b: &CanonicalBasis) -> Result<DualBases> {
    let g = p.gram.to_ratio();
    let x = g.inverse()?;
    let gram_a_star = x.adjoint().mul(&g)?.mul(&x)?;
    let y = b.transition.adjoint().to_ratio().inverse()?;
    let gram_b_star = y.adjoint().mul(&gram_a_star)?.mul(&y)?;
    let gram_b = b.gram(p);
    let identity_holds = gram_b.transpose().to_ratio().mul(&gram_b_star.bar())?.is_identity();
    Ok(DualBases { a_star: x, b_star: y, gram_a_star, gram_b, gram_b_star, identity_holds })
}

/// The dual structure `(bar⟨-,-⟩, ψ*, a*)` with the opposite order, in
/// coordinates of the scalar-twisted space: `ψ*` has matrix `bar(R)ᵀ` on `{a*}`.
pub fn dual_structure(p: &PrecanonicalStructure) -> Result<PrecanonicalStructure> {
    let g = p.gram.to_ratio();
    let x = g.inverse()?;
    let gram = x.adjoint().mul(&g)?.mul(&x)?.bar().to_laurent().ok_or_else(|| Error::NotIntegral("dual Gram matrix".into()))?;
    let n = p.len();
    let less = (0..n).map(|a| (0..n).map(|b| p.less(b, a)).collect()).collect();
    let labels = p.labels.iter().map(|l| format!("{l}*")).collect();
    PrecanonicalStructure::new(labels, less, p.bar.transpose().bar(), gram)
}

/// `q^k ↦ (−1)^k p^{−k}`, i.e. rewriting in the variable `p = −q⁻¹`.
pub fn to_p(x: &Laurent) -> Laurent {
    x.negate_q().bar()
}

fn off_diag_positive(m: &LMat, what: &str, w: &mut Vec<String>) -> bool {
    let mut ok = true;
    for (r, c, x) in m.entries() {
        let good = if r == c { x.is_one() } else { x.in_neg_part() && x.all_coeffs_nonneg() };
        if !good {
            ok = false;
            w.push(format!("{what}[{r}][{c}] = {x}"));
        }
    }
    ok
}

#[derive(Clone, Debug, Serialize)]
pub struct DualPositivity {
    pub balanced: bool,
    pub m_positive: bool,
    pub n_positive: bool,
    pub confirmed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct BalancedPositiveReport {
    pub balanced: bool,
    pub m_positive: bool,
    pub n_positive: bool,
    pub balanced_positive: bool,
    /// Present when the primal is balanced positive.
    pub dual: Option<DualPositivity>,
    pub witnesses: Vec<String>,
}

pub fn balanced_positive_report(p: &PrecanonicalStructure, b: &CanonicalBasis) -> Result<BalancedPositiveReport> {
    let mut w = Vec::new();
    let balanced = p.is_balanced();
    let m = &b.transition;
    let m_positive = off_diag_positive(m, "m", &mut w);
    let nmat = m.inverse_laurent()?.map(|x| x.negate_q());
    let n_positive = off_diag_positive(&nmat, "n", &mut w);
    let balanced_positive = balanced && m_positive && n_positive;
    let dual = if balanced_positive {
        let y = b.transition.adjoint().inverse_laurent()?;
        let mp = off_diag_positive(&y.map(to_p), "m*", &mut w);
        let np = off_diag_positive(&b.transition.adjoint().map(|x| to_p(x).negate_q()), "n*", &mut w);
        let ds = dual_structure(p)?;
        let db = ds.is_balanced();
        Some(DualPositivity { balanced: db, m_positive: mp, n_positive: np, confirmed: db && mp && np })
    } else {
        None
    };
    Ok(BalancedPositiveReport { balanced, m_positive, n_positive, balanced_positive, dual, witnesses: w })
}

/// Recompute under `trials` random linear extensions; true iff all agree exactly.
pub fn uniqueness_stress<R: Rng>(p: &PrecanonicalStructure, mode: Mode, trials: usize, rng: &mut R) -> Result<bool> {
    let base = canonical(p, mode)?.transition;
    for _ in 0..trials {
        let ext = p.random_linear_extension(rng);
        let m = match mode {
            Mode::Gs => canonical_gs_with(p, &ext)?,
            Mode::Triangular => canonical_triangular_with(p, &ext)?,
        };
        if m.transition != base {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum SignOutcome {
    Plus { label: usize },
    Minus { label: usize },
    NotSigned { coordinates: Vec<Laurent> },
    PreconditionFailed { bar_fixed: bool, norm: Laurent },
}

/// Decide whether a bar-fixed, almost-unit vector is `±b_c`.
pub fn sign_detect(p: &PrecanonicalStructure, b: &CanonicalBasis, v: &[Laurent]) -> Result<SignOutcome> {
    if v.len() != p.len() {
        return Err(Error::Shape("vector length".into()));
    }
    let bar_fixed = p.psi(v) == v;
    let norm = p.pair(v, v);
    if !bar_fixed || !norm.is_almost_delta(true) {
        return Ok(SignOutcome::PreconditionFailed { bar_fixed, norm });
    }
    let rhs = RMat::from_fn(v.len(), 1, |r, _| crate::Ratio::from_poly(v[r].clone()));
    let x = b.transition.to_ratio().solve(&rhs)?.column(0);
    let coords: Vec<Laurent> = x.iter().map(|r| r.as_poly()).collect::<Option<_>>().ok_or(Error::NotIntegral("coordinates in the canonical basis".into()))?;
    let nz: Vec<usize> = (0..coords.len()).filter(|&i| !coords[i].is_zero()).collect();
    if let [c] = nz[..] {
        if coords[c].is_one() {
            return Ok(SignOutcome::Plus { label: c });
        }
        if (-&coords[c]).is_one() {
            return Ok(SignOutcome::Minus { label: c });
        }
    }
    Ok(SignOutcome::NotSigned { coordinates: coords })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn l(ts: &[(i64, i64)]) -> Laurent {
        Laurent::from_int_terms(ts)
    }

    fn two(gram: [[Laurent; 2]; 2]) -> PrecanonicalStructure {
        let [r0, r1] = gram;
        PrecanonicalStructure::with_fixed_standards(vec!["1".into(), "2".into()], vec![vec![false, true], vec![false, false]], LMat::from_rows(vec![r0.to_vec(), r1.to_vec()]).unwrap()).unwrap()
    }

    #[test]
    fn trivial_structures() {
        let p = PrecanonicalStructure::with_fixed_standards(vec!["c".into()], vec![vec![false]], LMat::identity(1)).unwrap();
        for mode in [Mode::Gs, Mode::Triangular] {
            assert!(canonical(&p, mode).unwrap().transition.is_identity());
        }
        let b = canonical_gs(&p).unwrap();
        assert_eq!(check_two_prime_equivalence(&p, &b).equivalence, Some(true));
        let r = balanced_positive_report(&p, &b).unwrap();
        assert!(r.balanced_positive && r.dual.unwrap().confirmed);
        let d = dual_bases(&p, &b).unwrap();
        assert!(d.identity_holds && d.a_star.is_identity());
    }

    #[test]
    fn stringy_sl2_block_needs_no_correction() {
        let p = two([[l(&[(0, 1)]), l(&[(-1, 1)])], [l(&[(-1, 1)]), l(&[(0, 1), (-2, 1)])]]);
        let b = canonical_gs(&p).unwrap();
        assert!(b.transition.is_identity());
        assert_eq!(b.iterations, 1);
        assert_eq!(canonical_triangular(&p).unwrap().transition, b.transition);
        let r = balanced_positive_report(&p, &b).unwrap();
        assert!(!r.balanced);
        assert!(dual_bases(&p, &b).unwrap().identity_holds);
    }

    /// Brute force over `Σ_{|k|≤2} c_k q^k` bar-invariant corrections with small `c_k`.
    fn brute_force_correction(p: &PrecanonicalStructure) -> Vec<Laurent> {
        let mut found = Vec::new();
        for c0 in -2..=2 {
            for c1 in -2..=2 {
                for c2 in -2..=2 {
                    let x = l(&[(0, c0), (1, c1), (-1, c1), (2, c2), (-2, c2)]);
                    let v = vec![-x.clone(), Laurent::one()];
                    let e1 = vec![Laurent::one(), Laurent::zero()];
                    if p.pair(&v, &e1).is_almost_delta(false) && p.pair(&v, &v).is_almost_delta(true) {
                        found.push(x);
                    }
                }
            }
        }
        found
    }

    #[test]
    fn synthetic_correction_matches_brute_force() {
        let p = two([[l(&[(0, 1)]), l(&[(1, 1)])], [l(&[(1, 1)]), l(&[(2, 1), (0, 1)])]]);
        let b = canonical_gs(&p).unwrap();
        let oracle = brute_force_correction(&p);
        assert_eq!(oracle.len(), 1);
        assert_eq!(-b.transition.get(0, 1), oracle[0]);
        assert_eq!(oracle[0], l(&[(1, 1), (-1, 1)]));
    }

    #[test]
    fn gs_fixpoint_failure_and_refusals() {
        // not almost-orthonormalisable: norm of a_1 has a q term
        let p = PrecanonicalStructure::with_fixed_standards(vec!["c".into()], vec![vec![false]], LMat::from_rows(vec![vec![l(&[(1, 1)])]]).unwrap()).unwrap();
        assert!(matches!(canonical_gs(&p), Err(Error::AuditFailed(_))));
        let bar = LMat::from_rows(vec![vec![Laurent::one(), l(&[(1, 1)])], vec![Laurent::zero(), Laurent::one()]]).unwrap();
        let q = PrecanonicalStructure::new(vec!["a".into(), "b".into()], vec![vec![false, true], vec![false, false]], bar, LMat::identity(2)).unwrap();
        assert!(matches!(canonical_gs(&q), Err(Error::Unsupported(_))));
        // q is not antisymmetric: no triangular solution
        assert!(matches!(canonical_triangular(&q), Err(Error::NoCanonicalBasis(_))));
    }

    #[test]
    fn structure_validation() {
        let bad = LMat::from_rows(vec![vec![Laurent::one(), Laurent::zero()], vec![l(&[(1, 1)]), Laurent::one()]]).unwrap();
        assert!(PrecanonicalStructure::new(vec!["a".into(), "b".into()], vec![vec![false, true], vec![false, false]], bad, LMat::identity(2)).is_err());
        assert!(PrecanonicalStructure::from_edges(vec!["a".into(), "b".into()], &[(0, 1), (1, 0)], LMat::identity(2), LMat::identity(2)).is_err());
    }

    #[test]
    fn sign_detection() {
        let p = two([[l(&[(0, 1)]), l(&[(-1, 1)])], [l(&[(-1, 1)]), l(&[(0, 1), (-2, 1)])]]);
        let b = canonical_gs(&p).unwrap();
        assert_eq!(sign_detect(&p, &b, &b.vector(1)).unwrap(), SignOutcome::Plus { label: 1 });
        let neg: Vec<Laurent> = b.vector(0).iter().map(|x| -x).collect();
        assert_eq!(sign_detect(&p, &b, &neg).unwrap(), SignOutcome::Minus { label: 0 });
        let v = vec![l(&[(1, 1), (-1, 1)]), Laurent::one()];
        assert!(matches!(sign_detect(&p, &b, &v).unwrap(), SignOutcome::PreconditionFailed { bar_fixed: true, .. }));
    }

    #[test]
    fn uniqueness_on_antichain() {
        let p = PrecanonicalStructure::with_fixed_standards((0..4).map(|i| i.to_string()).collect(), vec![vec![false; 4]; 4], LMat::identity(4)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(uniqueness_stress(&p, Mode::Gs, 10, &mut rng).unwrap());
        let ext = p.random_linear_extension(&mut rng);
        assert!(p.check_extension(&ext).is_ok());
    }

    #[test]
    fn json_round_trip() {
        let p = two([[l(&[(0, 1)]), l(&[(1, 1)])], [l(&[(1, 1)]), l(&[(2, 1), (0, 1)])]]);
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(serde_json::from_str::<PrecanonicalStructure>(&s).unwrap(), p);
        let b = canonical_gs(&p).unwrap();
        let s = serde_json::to_string(&b).unwrap();
        assert_eq!(serde_json::from_str::<CanonicalBasis>(&s).unwrap(), b);
    }
}
