//! KLR diagrammatics: degrees, the diagram basis census, and the polynomial
//! representation of the quiver Hecke algebra with relation checks.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cartan::{CartanDatum, Weight};
use crate::error::{Error, Result};
use crate::uq::TricoloreTriple;
use crate::{Laurent, Tail};

// ---------------------------------------------------------------------------
// Polynomials in y_1..y_n

/// Integer polynomial in `n` commuting variables.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Poly {
    pub n: usize,
    pub terms: BTreeMap<Vec<u32>, BigInt>,
}

impl Poly {
    pub fn zero(n: usize) -> Self {
        Self { n, terms: BTreeMap::new() }
    }

    pub fn constant(n: usize, c: i64) -> Self {
        let mut p = Self::zero(n);
        p.add_term(vec![0; n], BigInt::from(c));
        p
    }

    pub fn one(n: usize) -> Self {
        Self::constant(n, 1)
    }

    pub fn var(n: usize, k: usize) -> Self {
        let mut e = vec![0; n];
        e[k] = 1;
        Self::monomial(e, 1)
    }

    pub fn monomial(e: Vec<u32>, c: i64) -> Self {
        let mut p = Self::zero(e.len());
        p.add_term(e, BigInt::from(c));
        p
    }

    /// Two-variable polynomial from `(deg u, deg v, coeff)` triples.
    pub fn bivariate(ts: &[(u32, u32, i64)]) -> Self {
        let mut p = Self::zero(2);
        for &(a, b, c) in ts {
            p.add_term(vec![a, b], BigInt::from(c));
        }
        p
    }

    pub fn add_term(&mut self, e: Vec<u32>, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(e.clone()).or_insert_with(BigInt::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut p = self.clone();
        for (e, c) in &o.terms {
            p.add_term(e.clone(), c.clone());
        }
        p
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(&BigInt::from(-1)))
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        let mut p = Self::zero(self.n);
        for (e, x) in &self.terms {
            p.add_term(e.clone(), x * c);
        }
        p
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut p = Self::zero(self.n);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                p.add_term(e1.iter().zip(e2).map(|(a, b)| a + b).collect(), c1 * c2);
            }
        }
        p
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::one(self.n), |acc, _| acc.mul(self))
    }

    /// Exchange `y_a` and `y_b`.
    pub fn swap(&self, a: usize, b: usize) -> Self {
        let mut p = Self::zero(self.n);
        for (e, c) in &self.terms {
            let mut e = e.clone();
            e.swap(a, b);
            p.add_term(e, c.clone());
        }
        p
    }

    /// `(s_{ab} f − f) / (y_b − y_a)`, exact.
    pub fn divided_difference(&self, a: usize, b: usize) -> Self {
        let mut p = Self::zero(self.n);
        for (e, c) in &self.terms {
            let (x, y) = (e[a], e[b]);
            if x == y {
                continue;
            }
            let (lo, m, sign, hi_var, lo_var) = if x > y { (y, x - y, 1, b, a) } else { (x, y - x, -1, a, b) };
            for t in 0..m {
                let mut f = e.clone();
                f[a] = lo;
                f[b] = lo;
                f[hi_var] += t;
                f[lo_var] += m - 1 - t;
                p.add_term(f, c * sign);
            }
        }
        p
    }

    /// `q(y_a, y_b)` for a bivariate `q`, as a polynomial in `n` variables.
    pub fn substitute2(q: &Poly, n: usize, a: usize, b: usize) -> Self {
        let mut p = Self::zero(n);
        for (e, c) in &q.terms {
            let mut f = vec![0; n];
            f[a] += e[0];
            f[b] += e[1];
            p.add_term(f, c.clone());
        }
        p
    }

    /// Weighted degree if homogeneous (`None` for zero or inhomogeneous).
    pub fn weighted_degree(&self, w: &[i64]) -> Option<i64> {
        let mut degs = self.terms.keys().map(|e| e.iter().zip(w).map(|(&a, &b)| a as i64 * b).sum::<i64>());
        let d = degs.next()?;
        degs.all(|x| x == d).then_some(d)
    }

    pub fn random<R: Rng>(n: usize, max_deg: u32, terms: usize, rng: &mut R) -> Self {
        let mut p = Self::zero(n);
        for _ in 0..terms {
            let e: Vec<u32> = (0..n).map(|_| rng.gen_range(0..=max_deg)).collect();
            p.add_term(e, BigInt::from(rng.gen_range(-3i64..=3)));
        }
        p
    }
}

// ---------------------------------------------------------------------------
// Q_ij and the polynomial representation

/// Arrow multiset and the polynomials `Q_ij(u, v)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QijChoice {
    /// `(i, j)` arrows, with multiplicity.
    pub arrows: Vec<(usize, usize)>,
    /// `Q_ij` for `i ≠ j`, bivariate.
    pub q: BTreeMap<(usize, usize), Poly>,
}

impl QijChoice {
    /// Default orientation: `−c_ij` arrows `i → j` for `i < j`.
    pub fn default_orientation(datum: &CartanDatum) -> Vec<(usize, usize)> {
        let mut arrows = Vec::new();
        for i in 0..datum.rank() {
            for j in i + 1..datum.rank() {
                for _ in 0..(-datum.c[i][j]).max(0) {
                    arrows.push((i, j));
                }
            }
        }
        arrows
    }

    pub fn arrow_count(&self, i: usize, j: usize) -> u32 {
        self.arrows.iter().filter(|&&a| a == (i, j)).count() as u32
    }

    /// `Q_ij(u,v) = (v − u)^{a_ij} (u − v)^{a_ji}`, i.e. `(−1)^{a_ij}(u − v)^{−c_ij}`.
    pub fn geometric(datum: &CartanDatum, arrows: Vec<(usize, usize)>) -> Result<Self> {
        if !datum.is_symmetric() {
            return Err(Error::Unsupported("geometric Q needs a symmetric Cartan matrix".into()));
        }
        let r = datum.rank();
        if arrows.iter().any(|&(i, j)| i >= r || j >= r || i == j) {
            return Err(Error::OutOfRange("arrow endpoints".into()));
        }
        let mut ch = Self { arrows, q: BTreeMap::new() };
        for i in 0..r {
            for j in 0..r {
                if i == j {
                    continue;
                }
                let (aij, aji) = (ch.arrow_count(i, j), ch.arrow_count(j, i));
                if (aij + aji) as i64 != -datum.c[i][j] {
                    return Err(Error::InvalidCartan(format!("{} arrows between {i} and {j}, expected {}", aij + aji, -datum.c[i][j])));
                }
                let vu = Poly::bivariate(&[(0, 1, 1), (1, 0, -1)]);
                let uv = Poly::bivariate(&[(1, 0, 1), (0, 1, -1)]);
                ch.q.insert((i, j), vu.pow(aij).mul(&uv.pow(aji)));
            }
        }
        Ok(ch)
    }

    pub fn geometric_default(datum: &CartanDatum) -> Result<Self> {
        Self::geometric(datum, Self::default_orientation(datum))
    }

    /// Replace `Q_ij` (and `Q_ji(u,v) = Q_ij(v,u)`), keeping the orientation.
    pub fn with_q(mut self, i: usize, j: usize, q: Poly) -> Self {
        self.q.insert((j, i), q.swap(0, 1));
        self.q.insert((i, j), q);
        self
    }

    pub fn get(&self, i: usize, j: usize) -> Result<&Poly> {
        self.q.get(&(i, j)).ok_or_else(|| Error::OutOfRange(format!("Q_{i}{j}")))
    }

    /// Symmetry `Q_ij(u,v) = Q_ji(v,u)` and homogeneity of degree `−2⟨α_i,α_j⟩`.
    pub fn validate(&self, datum: &CartanDatum) -> Vec<String> {
        let mut bad = Vec::new();
        for (&(i, j), q) in &self.q {
            if self.q.get(&(j, i)).map(|p| p.swap(0, 1)) != Some(q.clone()) {
                bad.push(format!("Q_{i}{j}(u,v) ≠ Q_{j}{i}(v,u)"));
            }
            let w = [2 * datum.d[i], 2 * datum.d[j]];
            if q.weighted_degree(&w) != Some(-2 * datum.root_pairing(i, j)) {
                bad.push(format!("Q_{i}{j} not homogeneous of degree {}", -2 * datum.root_pairing(i, j)));
            }
        }
        bad
    }
}

/// How crossings of distinct labels act.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ActionMode {
    /// `ψ = (y_{k+1} − y_k)^{a_ji} s_k` on `e(…i,j…)`, from the orientation.
    Factored,
    /// For `i < j`: `ψ = s_k` on `e(…i,j…)` and `Q_ij(y_k,y_{k+1}) s_k` on `e(…j,i…)`.
    Generic,
}

/// `Σ_i e(i) f_i`, components indexed by label sequences.
#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct PolyElement {
    pub parts: BTreeMap<Vec<usize>, Poly>,
}

impl PolyElement {
    pub fn single(labels: Vec<usize>, p: Poly) -> Self {
        let mut s = Self::default();
        s.add(labels, p);
        s
    }

    pub fn add(&mut self, labels: Vec<usize>, p: Poly) {
        let slot = self.parts.entry(labels.clone()).or_insert_with(|| Poly::zero(p.n));
        *slot = slot.add(&p);
        if slot.is_zero() {
            self.parts.remove(&labels);
        }
    }

    pub fn plus(&self, o: &Self) -> Self {
        let mut s = self.clone();
        for (l, p) in &o.parts {
            s.add(l.clone(), p.clone());
        }
        s
    }

    pub fn minus(&self, o: &Self) -> Self {
        let mut s = self.clone();
        for (l, p) in &o.parts {
            s.add(l.clone(), p.scale(&BigInt::from(-1)));
        }
        s
    }

    pub fn scale(&self, c: i64) -> Self {
        let mut s = Self::default();
        for (l, p) in &self.parts {
            s.add(l.clone(), p.scale(&BigInt::from(c)));
        }
        s
    }

    pub fn is_zero(&self) -> bool {
        self.parts.is_empty()
    }
}

/// Generators of the quiver Hecke algebra (0-based strand positions).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Gen {
    Idem(Vec<usize>),
    Y(usize),
    Psi(usize),
}

/// The polynomial representation for a fixed `Q` and action mode.
#[derive(Clone, Debug)]
pub struct PolyRep {
    pub datum: CartanDatum,
    pub choice: QijChoice,
    pub mode: ActionMode,
}

impl PolyRep {
    pub fn new(datum: &CartanDatum, choice: QijChoice, mode: ActionMode) -> Self {
        Self { datum: datum.clone(), choice, mode }
    }

    pub fn apply(&self, g: &Gen, x: &PolyElement) -> Result<PolyElement> {
        let mut out = PolyElement::default();
        for (labels, f) in &x.parts {
            match g {
                Gen::Idem(l) => {
                    if l == labels {
                        out.add(labels.clone(), f.clone());
                    }
                }
                Gen::Y(k) => {
                    if *k >= labels.len() {
                        return Err(Error::OutOfRange(format!("y_{k} on {} strands", labels.len())));
                    }
                    out.add(labels.clone(), f.mul(&Poly::var(f.n, *k)));
                }
                Gen::Psi(k) => {
                    let (img, g) = self.psi(labels, f, *k)?;
                    out.add(img, g);
                }
            }
        }
        Ok(out)
    }

    fn psi(&self, labels: &[usize], f: &Poly, k: usize) -> Result<(Vec<usize>, Poly)> {
        if k + 1 >= labels.len() {
            return Err(Error::OutOfRange(format!("ψ_{k} on {} strands", labels.len())));
        }
        let (i, j) = (labels[k], labels[k + 1]);
        let mut img = labels.to_vec();
        img.swap(k, k + 1);
        if i == j {
            return Ok((img, f.divided_difference(k, k + 1)));
        }
        let sf = f.swap(k, k + 1);
        let coeff = match self.mode {
            ActionMode::Factored => {
                let d = Poly::var(f.n, k + 1).sub(&Poly::var(f.n, k));
                d.pow(self.choice.arrow_count(j, i))
            }
            ActionMode::Generic => {
                if i < j {
                    Poly::one(f.n)
                } else {
                    // after the crossing, label j sits at k
                    Poly::substitute2(self.choice.get(j, i)?, f.n, k, k + 1)
                }
            }
        };
        Ok((img, coeff.mul(&sf)))
    }

    /// Degree shift of the `e(i)` component making every generator homogeneous:
    /// each pair `i` before `j` contributes `a_ji` (arrows from the later label).
    pub fn component_shift(&self, labels: &[usize]) -> i64 {
        let arrows = |a: usize, b: usize| -> i64 {
            match self.mode {
                ActionMode::Factored => self.choice.arrow_count(a, b) as i64,
                ActionMode::Generic => if a < b { -self.datum.c[a][b] } else { 0 },
            }
        };
        let mut s = 0;
        for x in 0..labels.len() {
            for y in x + 1..labels.len() {
                if labels[x] != labels[y] {
                    s += self.datum.d[labels[x]] * arrows(labels[y], labels[x]);
                }
            }
        }
        s
    }

    /// Degree of a homogeneous element, counting `deg y_k = 2d_{i_k}` plus the component shift.
    pub fn element_degree(&self, x: &PolyElement) -> Option<i64> {
        let mut out = None;
        for (l, p) in &x.parts {
            let w: Vec<i64> = l.iter().map(|&i| 2 * self.datum.d[i]).collect();
            let d = p.weighted_degree(&w)? + self.component_shift(l);
            if out.is_some_and(|o| o != d) {
                return None;
            }
            out = Some(d);
        }
        out
    }

    /// Apply a word, rightmost generator first.
    pub fn apply_word(&self, word: &[Gen], x: &PolyElement) -> Result<PolyElement> {
        word.iter().rev().try_fold(x.clone(), |acc, g| self.apply(g, &acc))
    }
}

// ---------------------------------------------------------------------------
// Relations

#[derive(Clone, Debug, Default, Serialize)]
pub struct RelationOutcome {
    pub checked: usize,
    pub failed: usize,
    pub witness: Option<String>,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct RelationReport {
    pub relations: BTreeMap<String, RelationOutcome>,
}

impl RelationReport {
    pub fn all_pass(&self) -> bool {
        self.relations.values().all(|o| o.failed == 0 && o.checked > 0)
    }

    pub fn failed(&self, name: &str) -> bool {
        self.relations.get(name).is_some_and(|o| o.failed > 0)
    }

    fn record(&mut self, name: &str, ok: bool, witness: impl FnOnce() -> String) {
        let o = self.relations.entry(name.to_string()).or_default();
        o.checked += 1;
        if !ok {
            o.failed += 1;
            if o.witness.is_none() {
                o.witness = Some(witness());
            }
        }
    }
}

pub const RELATIONS: [&str; 8] = ["first-QH", "nilHecke-1", "nilHecke-2", "black-bigon", "triple-dumb", "triple-smart", "far-commute", "dot-commute"];

/// Randomised check of the quiver Hecke relations as operator identities.
pub fn verify_relations<R: Rng>(rep: &PolyRep, trials: usize, rng: &mut R) -> Result<RelationReport> {
    use Gen::*;
    let mut rep_out = RelationReport::default();
    for name in RELATIONS {
        rep_out.relations.insert(name.to_string(), RelationOutcome::default());
    }
    let r = rep.datum.rank();
    for _ in 0..trials {
        let n = rng.gen_range(3..=4);
        let labels: Vec<usize> = (0..n).map(|_| rng.gen_range(0..r)).collect();
        let f = Poly::random(n, 3, 4, rng);
        let x = PolyElement::single(labels.clone(), f.clone());
        let w = |word: &[Gen]| rep.apply_word(word, &x);
        let wit = |k: usize| format!("labels {labels:?}, k = {k}, f = {:?}", f.terms);
        for k in 0..n - 1 {
            let (i, j) = (labels[k], labels[k + 1]);
            if i != j {
                let ok = w(&[Psi(k), Y(k)])? == w(&[Y(k + 1), Psi(k)])? && w(&[Psi(k), Y(k + 1)])? == w(&[Y(k), Psi(k)])?;
                rep_out.record("first-QH", ok, || wit(k));
            } else {
                let ok = w(&[Psi(k), Y(k)])?.minus(&w(&[Y(k + 1), Psi(k)])?) == x;
                rep_out.record("nilHecke-1", ok, || wit(k));
                let ok = w(&[Y(k), Psi(k)])?.minus(&w(&[Psi(k), Y(k + 1)])?) == x;
                rep_out.record("nilHecke-2", ok, || wit(k));
            }
            let expect = if i == j { PolyElement::default() } else { PolyElement::single(labels.clone(), Poly::substitute2(rep.choice.get(i, j)?, n, k, k + 1).mul(&f)) };
            rep_out.record("black-bigon", w(&[Psi(k), Psi(k)])? == expect, || wit(k));
            for l in 0..n {
                if l != k && l != k + 1 {
                    rep_out.record("dot-commute", w(&[Y(l), Psi(k)])? == w(&[Psi(k), Y(l)])?, || wit(k));
                }
            }
            for l in k + 2..n - 1 {
                rep_out.record("far-commute", w(&[Psi(k), Psi(l)])? == w(&[Psi(l), Psi(k)])?, || wit(k));
            }
        }
        for k in 0..n - 2 {
            let (i, j, l) = (labels[k], labels[k + 1], labels[k + 2]);
            // middle strand passing left of the outer crossing, read bottom to top
            let lhs = w(&[Psi(k), Psi(k + 1), Psi(k)])?;
            let rhs = w(&[Psi(k + 1), Psi(k), Psi(k + 1)])?;
            if i == l && i != j {
                // ψ_kψ_{k+1}ψ_k − ψ_{k+1}ψ_kψ_{k+1} = (Q_ij(y_{k+2},y_{k+1}) − Q_ij(y_k,y_{k+1}))/(y_{k+2} − y_k)
                let q = Poly::substitute2(rep.choice.get(i, j)?, n, k, k + 1);
                let corr = q.divided_difference(k, k + 2).mul(&f);
                rep_out.record("triple-smart", lhs.minus(&rhs) == PolyElement::single(labels.clone(), corr), || wit(k));
            } else {
                rep_out.record("triple-dumb", lhs == rhs, || wit(k));
            }
        }
    }
    Ok(rep_out)
}

// ---------------------------------------------------------------------------
// Degrees

/// Strand orientation; `Down` carries `−i` (an `F_i`), `Up` carries `+i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Orient {
    Up,
    Down,
}

impl Orient {
    pub fn from_sign(s: i8) -> Self {
        if s > 0 {
            Orient::Up
        } else {
            Orient::Down
        }
    }

    pub fn sign(self) -> i64 {
        match self {
            Orient::Up => 1,
            Orient::Down => -1,
        }
    }
}

/// A boundary point of a diagram: black (label, orientation) or red/blue (weight).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Item {
    Black { node: usize, orient: Orient },
    Colored { weight: Weight },
}

pub fn dot_degree(datum: &CartanDatum, i: usize) -> i64 {
    2 * datum.d[i]
}

/// Black/black crossing: `−⟨α_i,α_j⟩` for equal orientations, `0` otherwise.
pub fn crossing_degree(datum: &CartanDatum, i: usize, oi: Orient, j: usize, oj: Orient) -> i64 {
    if oi == oj {
        -datum.root_pairing(i, j)
    } else {
        0
    }
}

/// Red (`λ` dominant) or blue (`−λ`) strand against black `i`.
pub fn colored_crossing_degree(datum: &CartanDatum, weight: &Weight, i: usize, o: Orient) -> i64 {
    let red = weight.is_dominant();
    let lam = if red { weight.clone() } else { weight.neg() };
    match (red, o) {
        (true, Orient::Down) | (false, Orient::Up) => datum.pairing(i, &lam),
        _ => 0,
    }
}

/// Cup or cap whose left endpoint has orientation `left`, with `λ` the inside region.
pub fn cup_cap_degree(datum: &CartanDatum, i: usize, left: Orient, inside: &Weight) -> i64 {
    datum.d[i] - left.sign() * datum.pairing(i, inside)
}

fn item_crossing(datum: &CartanDatum, a: (&Item, Orient), b: (&Item, Orient)) -> i64 {
    match (a.0, b.0) {
        (Item::Black { node: i, .. }, Item::Black { node: j, .. }) => crossing_degree(datum, *i, a.1, *j, b.1),
        (Item::Colored { weight }, Item::Black { node, .. }) => colored_crossing_degree(datum, weight, *node, b.1),
        (Item::Black { node, .. }, Item::Colored { weight }) => colored_crossing_degree(datum, weight, *node, a.1),
        _ => 0,
    }
}

/// Degree of a word in `ψ`'s and `y`'s acting on `e(labels)` (rightmost first).
pub fn word_degree(datum: &CartanDatum, labels: &[usize], word: &[Gen]) -> Result<i64> {
    let mut l = labels.to_vec();
    let mut deg = 0;
    for g in word.iter().rev() {
        match g {
            Gen::Idem(_) => {}
            Gen::Y(k) => deg += dot_degree(datum, *l.get(*k).ok_or(Error::OutOfRange(format!("y_{k}")))?),
            Gen::Psi(k) => {
                if k + 1 >= l.len() {
                    return Err(Error::OutOfRange(format!("ψ_{k}")));
                }
                deg += crossing_degree(datum, l[*k], Orient::Down, l[k + 1], Orient::Down);
                l.swap(*k, k + 1);
            }
        }
    }
    Ok(deg)
}

/// Pairing of boundary points of `(bottom, top)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pair {
    Through { bottom: usize, top: usize },
    /// Both ends on the bottom (a cap).
    Cap { left: usize, right: usize },
    /// Both ends on the top (a cup).
    Cup { left: usize, right: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Matching {
    pub pairs: Vec<Pair>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DottedDiagram {
    pub bottom: Vec<Item>,
    pub top: Vec<Item>,
    pub matching: Matching,
    /// One entry per pair; must be 0 on red/blue strands.
    pub dots: Vec<u32>,
}

/// Boundary sequence of a triple; multiplicity-one black strands only.
pub fn boundary(t: &TricoloreTriple) -> Result<Vec<Item>> {
    let mut out = Vec::new();
    let mut col = 0;
    for (pos, s) in t.strands.iter().enumerate() {
        while col < t.kappa.len() && t.kappa[col] == pos {
            out.push(Item::Colored { weight: t.bla[col].clone() });
            col += 1;
        }
        if s.mult != 1 {
            return Err(Error::Unsupported("census with thick (divided power) strands".into()));
        }
        out.push(Item::Black { node: s.node, orient: Orient::from_sign(s.sign) });
    }
    while col < t.kappa.len() {
        out.push(Item::Colored { weight: t.bla[col].clone() });
        col += 1;
    }
    Ok(out)
}

/// Region weights `w[p]` right of boundary point `p`, reading left to right from 0.
fn region_weights(datum: &CartanDatum, items: &[Item]) -> Vec<Weight> {
    let mut w = Weight::zero(datum.rank());
    let mut out = Vec::new();
    for it in items {
        w = match it {
            Item::Colored { weight } => w.add(weight),
            Item::Black { node, orient } => w.add(&datum.simple_root(*node).scale(orient.sign())),
        };
        out.push(w.clone());
    }
    out
}

fn orient_of(items: &[Item], p: usize) -> Orient {
    match &items[p] {
        Item::Black { orient, .. } => *orient,
        Item::Colored { .. } => Orient::Down,
    }
}

/// Degree of the minimal diagram of a matching, in the canonical layout:
/// straight through-strands, caps/cups peaking next to their left endpoint.
pub fn matching_degree(datum: &CartanDatum, bottom: &[Item], top: &[Item], m: &Matching) -> Result<i64> {
    let wb = region_weights(datum, bottom);
    let wt = region_weights(datum, top);
    let mut deg = 0;
    for (x, a) in m.pairs.iter().enumerate() {
        match a {
            Pair::Cap { left, right } | Pair::Cup { left, right } => {
                let (items, w) = if matches!(a, Pair::Cap { .. }) { (bottom, &wb) } else { (top, &wt) };
                let Item::Black { node, orient } = &items[*left] else {
                    return Err(Error::MalformedDiagram("red/blue strand in a cup or cap".into()));
                };
                if !matches!(&items[*right], Item::Black { node: n2, orient: o2 } if n2 == node && o2 != orient) {
                    return Err(Error::MalformedDiagram("cup/cap must join i with −i".into()));
                }
                deg += cup_cap_degree(datum, *node, *orient, &w[*left]);
            }
            Pair::Through { bottom: p, top: t } => {
                if bottom[*p] != top[*t] {
                    return Err(Error::MalformedDiagram("through strand changes label".into()));
                }
            }
        }
        for b in &m.pairs[x + 1..] {
            deg += pair_crossing(datum, bottom, top, a, b) + pair_crossing(datum, bottom, top, b, a);
        }
    }
    Ok(deg)
}

/// Crossing contribution where `a` is crossed "from inside" by `b` (one direction only).
fn pair_crossing(datum: &CartanDatum, bottom: &[Item], top: &[Item], a: &Pair, b: &Pair) -> i64 {
    let inside = |l: usize, r: usize, p: usize| l < p && p < r;
    match (a, b) {
        (Pair::Through { bottom: p1, top: t1 }, Pair::Through { bottom: p2, top: t2 }) => {
            if p1 < p2 && t1 > t2 {
                item_crossing(datum, (&bottom[*p1], orient_of(bottom, *p1)), (&bottom[*p2], orient_of(bottom, *p2)))
            } else {
                0
            }
        }
        (Pair::Cap { left, right }, Pair::Through { bottom: p, .. }) if inside(*left, *right, *p) => {
            item_crossing(datum, (&bottom[*right], orient_of(bottom, *right)), (&bottom[*p], orient_of(bottom, *p)))
        }
        (Pair::Cup { left, right }, Pair::Through { top: t, .. }) if inside(*left, *right, *t) => {
            item_crossing(datum, (&top[*right], orient_of(top, *right)), (&top[*t], orient_of(top, *t)))
        }
        (Pair::Cap { left: a1, right: b1 }, Pair::Cap { left: a2, right: b2 }) if a1 < a2 && a2 < b1 && b1 < b2 => {
            item_crossing(datum, (&bottom[*b1], orient_of(bottom, *b1)), (&bottom[*b2], orient_of(bottom, *b2)))
        }
        (Pair::Cup { left: a1, right: b1 }, Pair::Cup { left: a2, right: b2 }) if a1 < a2 && a2 < b1 && b1 < b2 => {
            item_crossing(datum, (&top[*b1], orient_of(top, *b1)), (&top[*b2], orient_of(top, *b2)))
        }
        _ => 0,
    }
}

pub fn degree(datum: &CartanDatum, d: &DottedDiagram) -> Result<i64> {
    if d.dots.len() != d.matching.pairs.len() {
        return Err(Error::MalformedDiagram("one dot count per strand".into()));
    }
    let mut deg = matching_degree(datum, &d.bottom, &d.top, &d.matching)?;
    for (p, &k) in d.matching.pairs.iter().zip(&d.dots) {
        let item = match p {
            Pair::Through { bottom, .. } => &d.bottom[*bottom],
            Pair::Cap { left, .. } => &d.bottom[*left],
            Pair::Cup { left, .. } => &d.top[*left],
        };
        match item {
            Item::Black { node, .. } => deg += k as i64 * dot_degree(datum, *node),
            Item::Colored { .. } if k > 0 => return Err(Error::MalformedDiagram("dots on a red/blue strand".into())),
            _ => {}
        }
    }
    Ok(deg)
}

/// All matchings between the two boundaries.
pub fn enumerate_matchings(bottom: &[Item], top: &[Item]) -> Vec<Matching> {
    let bc: Vec<usize> = (0..bottom.len()).filter(|&p| matches!(bottom[p], Item::Colored { .. })).collect();
    let tc: Vec<usize> = (0..top.len()).filter(|&p| matches!(top[p], Item::Colored { .. })).collect();
    if bc.len() != tc.len() || bc.iter().zip(&tc).any(|(&a, &b)| bottom[a] != top[b]) {
        return vec![];
    }
    let fixed: Vec<Pair> = bc.iter().zip(&tc).map(|(&a, &b)| Pair::Through { bottom: a, top: b }).collect();
    // endpoints: (is_top, position)
    let mut free: Vec<(bool, usize)> = (0..bottom.len()).filter(|p| !bc.contains(p)).map(|p| (false, p)).collect();
    free.extend((0..top.len()).filter(|p| !tc.contains(p)).map(|p| (true, p)));
    let mut out = Vec::new();
    let mut used = vec![false; free.len()];
    let mut cur = fixed.clone();
    fn label(items: &[Item], p: usize) -> (usize, Orient) {
        match &items[p] {
            Item::Black { node, orient } => (*node, *orient),
            Item::Colored { .. } => unreachable!(),
        }
    }
    fn rec(free: &[(bool, usize)], used: &mut Vec<bool>, bottom: &[Item], top: &[Item], cur: &mut Vec<Pair>, out: &mut Vec<Matching>) {
        let Some(a) = (0..free.len()).find(|&x| !used[x]) else {
            out.push(Matching { pairs: cur.clone() });
            return;
        };
        used[a] = true;
        for b in a + 1..free.len() {
            if used[b] {
                continue;
            }
            let (ta, pa) = free[a];
            let (tb, pb) = free[b];
            let (la, oa) = label(if ta { top } else { bottom }, pa);
            let (lb, ob) = label(if tb { top } else { bottom }, pb);
            if la != lb {
                continue;
            }
            let pair = match (ta, tb) {
                (false, true) if oa == ob => Pair::Through { bottom: pa, top: pb },
                (true, false) if oa == ob => Pair::Through { bottom: pb, top: pa },
                (false, false) if oa != ob => Pair::Cap { left: pa.min(pb), right: pa.max(pb) },
                (true, true) if oa != ob => Pair::Cup { left: pa.min(pb), right: pa.max(pb) },
                _ => continue,
            };
            used[b] = true;
            cur.push(pair);
            rec(free, used, bottom, top, cur, out);
            cur.pop();
            used[b] = false;
        }
        used[a] = false;
    }
    rec(&free, &mut used, bottom, top, &mut cur, &mut out);
    out
}

/// Graded count `Σ_{d∈D} q^{−deg d}` up to the cutoff.
#[derive(Clone, Debug, Serialize)]
pub struct Census {
    pub matching_count: usize,
    pub graded_terms: Tail,
    pub cutoff: i64,
}

fn black_pairs(bottom: &[Item], top: &[Item], m: &Matching) -> Vec<usize> {
    m.pairs
        .iter()
        .filter_map(|p| {
            let it = match p {
                Pair::Through { bottom: b, .. } => &bottom[*b],
                Pair::Cap { left, .. } => &bottom[*left],
                Pair::Cup { left, .. } => &top[*left],
            };
            match it {
                Item::Black { node, .. } => Some(*node),
                Item::Colored { .. } => None,
            }
        })
        .collect()
}

/// Census via geometric series per strand.
pub fn enumerate_basis_d(datum: &CartanDatum, from: &TricoloreTriple, to: &TricoloreTriple, cutoff: i64) -> Result<Census> {
    let (bottom, top) = (boundary(from)?, boundary(to)?);
    let ms = if region_weights(datum, &bottom).last() == region_weights(datum, &top).last() { enumerate_matchings(&bottom, &top) } else { vec![] };
    let mut total = Tail::new(Laurent::zero(), cutoff);
    for m in &ms {
        let d0 = matching_degree(datum, &bottom, &top, m)?;
        // dot budget: −(d0 + dots) ≥ −cutoff
        let budget = cutoff - d0;
        let mut dots = Laurent::one();
        let strands = black_pairs(&bottom, &top, m);
        for &node in &strands {
            let step = dot_degree(datum, node);
            let series = Laurent::from_terms((0..).map(|a| -step * a).take_while(|&e| e >= -budget).map(|e| (e, BigInt::one())));
            dots = &dots * &series;
        }
        let mut t = Tail::new(dots.shift(-d0), cutoff);
        t.truncated |= !strands.is_empty();
        total = total.add(&t);
    }
    Ok(Census { matching_count: ms.len(), graded_terms: total, cutoff })
}

/// Every dotted diagram with `−deg ≥ −cutoff`, by brute force.
pub fn enumerate_diagrams(datum: &CartanDatum, from: &TricoloreTriple, to: &TricoloreTriple, cutoff: i64) -> Result<Vec<DottedDiagram>> {
    let (bottom, top) = (boundary(from)?, boundary(to)?);
    if region_weights(datum, &bottom).last() != region_weights(datum, &top).last() {
        return Ok(vec![]);
    }
    let mut out = Vec::new();
    for m in enumerate_matchings(&bottom, &top) {
        let d0 = matching_degree(datum, &bottom, &top, &m)?;
        let black: Vec<Option<usize>> = m
            .pairs
            .iter()
            .map(|p| {
                let it = match p {
                    Pair::Through { bottom: b, .. } => &bottom[*b],
                    Pair::Cap { left, .. } => &bottom[*left],
                    Pair::Cup { left, .. } => &top[*left],
                };
                match it {
                    Item::Black { node, .. } => Some(*node),
                    _ => None,
                }
            })
            .collect();
        let mut dots = vec![0u32; m.pairs.len()];
        loop {
            let deg = d0 + black.iter().zip(&dots).map(|(n, &k)| n.map_or(0, |n| k as i64 * dot_degree(datum, n))).sum::<i64>();
            let fits = deg <= cutoff;
            if fits {
                out.push(DottedDiagram { bottom: bottom.clone(), top: top.clone(), matching: m.clone(), dots: dots.clone() });
            }
            // odometer over black strands, resetting a digit once the budget is exceeded
            let mut k = 0;
            loop {
                while k < dots.len() && black[k].is_none() {
                    k += 1;
                }
                if k == dots.len() {
                    break;
                }
                dots[k] += 1;
                let deg = d0 + black.iter().zip(&dots).map(|(n, &c)| n.map_or(0, |n| c as i64 * dot_degree(datum, n))).sum::<i64>();
                if deg <= cutoff {
                    break;
                }
                dots[k] = 0;
                k += 1;
            }
            if k == dots.len() {
                break;
            }
        }
    }
    Ok(out)
}

/// Degrees of both sides of every relation, for all label pairs; returns mismatches.
pub fn homogeneity_report(datum: &CartanDatum, choice: &QijChoice) -> Vec<String> {
    let mut bad = Vec::new();
    let cr = |i: usize, j: usize| crossing_degree(datum, i, Orient::Down, j, Orient::Down);
    for i in 0..datum.rank() {
        // nilHecke: ψ·y against the identity
        if cr(i, i) + dot_degree(datum, i) != 0 {
            bad.push(format!("nilHecke on {i}"));
        }
        for j in 0..datum.rank() {
            if i == j {
                continue;
            }
            let Some(q) = choice.q.get(&(i, j)) else {
                bad.push(format!("missing Q_{i}{j}"));
                continue;
            };
            let qd = q.weighted_degree(&[dot_degree(datum, i), dot_degree(datum, j)]);
            if qd != Some(2 * cr(i, j)) {
                bad.push(format!("black-bigon on ({i},{j}): ψ² has degree {}, Q has {qd:?}", 2 * cr(i, j)));
            }
            // (Q(y3,y2) − Q(y1,y2))/(y3 − y1) lowers the degree by one dot on i
            if qd.map(|d| d - dot_degree(datum, i)) != Some(cr(i, i) + 2 * cr(i, j)) {
                bad.push(format!("triple-smart on ({i},{j},{i})"));
            }
        }
    }
    bad
}

// ---------------------------------------------------------------------------
// Affine sl2 example

#[derive(Clone, Debug, Serialize)]
pub struct AffineReport {
    pub degree: i64,
    /// Nonzero `c` with `x² = c·x` on every monomial checked, if one exists.
    pub quasi_idempotent_constant: Option<i64>,
    /// Least `r ≤ bound` with `x^r = 0`, if any.
    pub nilpotency_order: Option<usize>,
    pub checked_degree: u32,
}

/// `x = ψ₂ψ₃ψ₁ψ₂ e(1,0,1,0)` (1-based crossings), checked on all monomials of
/// total degree `≤ max_deg`, which the operator preserves.
pub fn affine_sl2_idempotent_check(rep: &PolyRep, max_deg: u32, bound: usize) -> Result<AffineReport> {
    if rep.datum.c != CartanDatum::affine_a1().c {
        return Err(Error::InvalidCartan("affine sl2 datum expected".into()));
    }
    let labels = vec![1, 0, 1, 0];
    let word = [Gen::Psi(1), Gen::Psi(2), Gen::Psi(0), Gen::Psi(1)];
    let degree = word_degree(&rep.datum, &labels, &word)?;
    let mut monos = Vec::new();
    let mut e = vec![0u32; 4];
    loop {
        if e.iter().sum::<u32>() <= max_deg {
            monos.push(e.clone());
        }
        let mut k = 0;
        while k < 4 {
            e[k] += 1;
            if e[k] <= max_deg {
                break;
            }
            e[k] = 0;
            k += 1;
        }
        if k == 4 {
            break;
        }
    }
    // x² = c·x must hold with one c on every monomial
    let mut constant: Option<i64> = None;
    let mut consistent = true;
    let mut zero_power = vec![true; bound + 1];
    for m in &monos {
        let v = PolyElement::single(labels.clone(), Poly::monomial(m.clone(), 1));
        let x1 = rep.apply_word(&word, &v)?;
        let x2 = rep.apply_word(&word, &x1)?;
        match ratio_multiple(&x2, &x1) {
            None => consistent = false,
            Some(None) => {}
            Some(Some(c)) => match constant {
                None => constant = Some(c),
                Some(c0) if c0 != c => consistent = false,
                _ => {}
            },
        }
        let mut y = v;
        for slot in zero_power.iter_mut().skip(1) {
            y = rep.apply_word(&word, &y)?;
            *slot &= y.is_zero();
        }
    }
    let nil = (1..=bound).find(|&r| zero_power[r]);
    let quasi = if consistent { constant.filter(|&c| c != 0) } else { None };
    Ok(AffineReport { degree, quasi_idempotent_constant: quasi, nilpotency_order: nil, checked_degree: max_deg })
}

/// `Some(Some(c))` if `a = c·b` with `b ≠ 0`; `Some(None)` if `b = 0 = a`
/// (no constraint); `None` if no integer `c` works.
fn ratio_multiple(a: &PolyElement, b: &PolyElement) -> Option<Option<i64>> {
    if b.is_zero() {
        return if a.is_zero() { Some(None) } else { None };
    }
    let (l, p) = b.parts.iter().next()?;
    let (e, c) = p.terms.iter().next()?;
    let ac = a.parts.get(l).and_then(|q| q.terms.get(e)).cloned().unwrap_or_else(BigInt::zero);
    if !(&ac % c).is_zero() {
        return None;
    }
    let k: i64 = (&ac / c).try_into().ok()?;
    (a == &b.scale(k)).then_some(Some(k))
}

/// `Q₀₁ = u² + v²` with the generic action: the non-geometric variant.
pub fn affine_sum_of_squares() -> QijChoice {
    let d = CartanDatum::affine_a1();
    QijChoice::geometric_default(&d).expect("affine sl2").with_q(0, 1, Poly::bivariate(&[(2, 0, 1), (0, 2, 1)]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::uq::Strand;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn triple(nodes: &[(usize, i8)], bla: Vec<Weight>, kappa: Vec<usize>) -> TricoloreTriple {
        TricoloreTriple { bla, strands: nodes.iter().map(|&(node, sign)| Strand { node, sign, mult: 1 }).collect(), kappa }
    }

    #[test]
    fn divided_difference_basics() {
        let y0 = Poly::var(2, 0);
        assert_eq!(y0.divided_difference(0, 1), Poly::one(2));
        let f = Poly::monomial(vec![3, 1], 1);
        let g = f.divided_difference(0, 1);
        // (y0 y1³ − y0³ y1)/(y1 − y0) = y0 y1 (y1 + y0)
        assert_eq!(g, Poly::monomial(vec![1, 2], 1).add(&Poly::monomial(vec![2, 1], 1)));
        let p = Poly::random(3, 4, 6, &mut ChaCha8Rng::seed_from_u64(3));
        let back = p.divided_difference(0, 2).mul(&Poly::var(3, 2).sub(&Poly::var(3, 0)));
        assert_eq!(back, p.swap(0, 2).sub(&p));
    }

    #[test]
    fn elementary_degrees() {
        let a1 = CartanDatum::a1();
        assert_eq!(dot_degree(&a1, 0), 2);
        assert_eq!(crossing_degree(&a1, 0, Orient::Down, 0, Orient::Down), -2);
        assert_eq!(crossing_degree(&a1, 0, Orient::Down, 0, Orient::Up), 0);
        let aff = CartanDatum::affine_a1();
        let x = [Gen::Psi(1), Gen::Psi(2), Gen::Psi(0), Gen::Psi(1)];
        assert_eq!(word_degree(&aff, &[1, 0, 1, 0], &x).unwrap(), 0);
        let a2 = CartanDatum::a2();
        assert_eq!(colored_crossing_degree(&a2, &Weight(vec![1, 0]), 0, Orient::Down), 1);
        assert_eq!(colored_crossing_degree(&a2, &Weight(vec![-1, 0]), 0, Orient::Down), 0);
        assert_eq!(colored_crossing_degree(&a2, &Weight(vec![-1, 0]), 0, Orient::Up), 1);
    }

    #[test]
    fn census_examples() {
        let a1 = CartanDatum::a1();
        let one = triple(&[(0, -1)], vec![Weight(vec![2])], vec![0]);
        let c = enumerate_basis_d(&a1, &one, &one, 6).unwrap();
        assert_eq!(c.matching_count, 1);
        assert_eq!(c.graded_terms.poly_part, Laurent::from_int_terms(&[(0, 1), (-2, 1), (-4, 1), (-6, 1)]));
        let two = triple(&[(0, -1), (0, -1)], vec![Weight(vec![2])], vec![0]);
        assert_eq!(enumerate_basis_d(&a1, &two, &two, 6).unwrap().matching_count, 2);
        let a2 = CartanDatum::a2();
        let x = triple(&[(0, -1)], vec![Weight(vec![1, 1])], vec![0]);
        let y = triple(&[(1, -1)], vec![Weight(vec![1, 1])], vec![0]);
        let c = enumerate_basis_d(&a2, &x, &y, 6).unwrap();
        assert_eq!(c.matching_count, 0);
        assert!(c.graded_terms.poly_part.is_zero());
    }

    #[test]
    fn census_matches_brute_force() {
        let a1 = CartanDatum::a1();
        let cases = [
            (triple(&[(0, -1), (0, -1)], vec![Weight(vec![2])], vec![0]), triple(&[(0, -1), (0, -1)], vec![Weight(vec![2])], vec![0])),
            (triple(&[(0, -1), (0, 1)], vec![Weight(vec![1])], vec![0]), triple(&[(0, -1), (0, 1)], vec![Weight(vec![1])], vec![0])),
            (triple(&[(0, -1)], vec![Weight(vec![1]), Weight(vec![1])], vec![0, 1]), triple(&[(0, -1)], vec![Weight(vec![1]), Weight(vec![1])], vec![0, 0])),
        ];
        for (a, b) in &cases {
            let cutoff = 8;
            let census = enumerate_basis_d(&a1, a, b, cutoff).unwrap();
            let mut brute = Laurent::zero();
            for d in enumerate_diagrams(&a1, a, b, cutoff).unwrap() {
                brute.add_term(-degree(&a1, &d).unwrap(), BigInt::one());
            }
            assert_eq!(census.graded_terms.poly_part, brute);
        }
    }

    #[test]
    fn a2_and_affine_relations_hold() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for d in [CartanDatum::a1(), CartanDatum::a2(), CartanDatum::affine_a1()] {
            let rep = PolyRep::new(&d, QijChoice::geometric_default(&d).unwrap(), ActionMode::Factored);
            assert!(rep.choice.validate(&d).is_empty());
            let r = verify_relations(&rep, 30, &mut rng).unwrap();
            for (name, o) in &r.relations {
                assert_eq!(o.failed, 0, "{} {name}: {:?}", d.name, o.witness);
            }
        }
    }

    #[test]
    fn generic_action_agrees_on_relations() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let d = CartanDatum::a2();
        let rep = PolyRep::new(&d, QijChoice::geometric_default(&d).unwrap(), ActionMode::Generic);
        let r = verify_relations(&rep, 30, &mut rng).unwrap();
        assert!(r.relations.values().all(|o| o.failed == 0));
    }

    #[test]
    fn homogeneity() {
        for d in [CartanDatum::a1(), CartanDatum::a2(), CartanDatum::a3(), CartanDatum::affine_a1()] {
            assert!(homogeneity_report(&d, &QijChoice::geometric_default(&d).unwrap()).is_empty(), "{}", d.name);
        }
        let d = CartanDatum::a2();
        let bad = QijChoice::geometric_default(&d).unwrap().with_q(0, 1, Poly::bivariate(&[(2, 0, 1), (1, 1, 1), (0, 2, 1)]));
        assert!(!homogeneity_report(&d, &bad).is_empty());
    }

    #[test]
    fn corrupted_q_fails() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let d = CartanDatum::a2();
        let bad = QijChoice::geometric_default(&d).unwrap().with_q(0, 1, Poly::bivariate(&[(2, 0, 1), (1, 1, 1), (0, 2, 1)]));
        assert!(!bad.validate(&d).is_empty());
        let r = verify_relations(&PolyRep::new(&d, bad, ActionMode::Factored), 60, &mut rng).unwrap();
        assert!(r.failed("triple-smart"));
    }

    #[test]
    fn affine_idempotent() {
        let d = CartanDatum::affine_a1();
        let rep = PolyRep::new(&d, QijChoice::geometric_default(&d).unwrap(), ActionMode::Factored);
        let r = affine_sl2_idempotent_check(&rep, 3, 4).unwrap();
        assert_eq!(r.degree, 0);
        assert_eq!(r.quasi_idempotent_constant, Some(2));
        assert_eq!(r.nilpotency_order, None);
        let rep = PolyRep::new(&d, affine_sum_of_squares(), ActionMode::Generic);
        let r = affine_sl2_idempotent_check(&rep, 3, 4).unwrap();
        assert_eq!(r.quasi_idempotent_constant, None);
        assert!(r.nilpotency_order.is_some_and(|k| k <= 4));
    }

    #[test]
    fn polyrep_respects_degree() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for d in [CartanDatum::a2(), CartanDatum::affine_a1()] {
            for mode in [ActionMode::Factored, ActionMode::Generic] {
                let rep = PolyRep::new(&d, QijChoice::geometric_default(&d).unwrap(), mode);
                for _ in 0..20 {
                    let labels: Vec<usize> = (0..3).map(|_| rng.gen_range(0..2)).collect();
                    let e: Vec<u32> = (0..3).map(|_| rng.gen_range(0..3)).collect();
                    let x = PolyElement::single(labels.clone(), Poly::monomial(e, 1));
                    let m = rep.element_degree(&x).unwrap();
                    for k in 0..2 {
                        let out = rep.apply(&Gen::Psi(k), &x).unwrap();
                        let dk = word_degree(&d, &labels, &[Gen::Psi(k)]).unwrap();
                        if !out.is_zero() {
                            assert_eq!(rep.element_degree(&out), Some(m + dk), "{} {mode:?} {labels:?}", d.name);
                        }
                    }
                }
            }
        }
    }
}

