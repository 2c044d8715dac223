use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{build_irreducible, Gen, IrrModule};
use crate::cartan::{sign_vector, CartanDatum, Weight};
use crate::error::{Error, Result};
use crate::laurent::qfact_at;
use crate::{Laurent, Ratio};

/// Factor basis indices, one per tensor factor present.
pub type Key = Vec<u32>;

/// Sparse vector in a (partial) tensor product.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct ModuleVector {
    pub terms: BTreeMap<Key, Ratio>,
}

impl ModuleVector {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn basis(key: Key) -> Self {
        Self { terms: BTreeMap::from([(key, Ratio::one())]) }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, k: Key, c: Ratio) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(k.clone()).or_insert_with(Ratio::zero);
        *slot = &*slot + &c;
        if slot.is_zero() {
            self.terms.remove(&k);
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in &o.terms {
            out.add_term(k.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(&Ratio::from_int(-1)))
    }

    pub fn scale(&self, c: &Ratio) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self { terms: self.terms.iter().map(|(k, v)| (k.clone(), v * c)).collect() }
    }

    pub fn coeff(&self, k: &Key) -> Ratio {
        self.terms.get(k).cloned().unwrap_or_else(Ratio::zero)
    }

    /// Coefficients as Laurent polynomials, if integral.
    pub fn integral_coeffs(&self) -> Option<BTreeMap<Key, Laurent>> {
        self.terms.iter().map(|(k, v)| v.as_poly().map(|p| (k.clone(), p))).collect()
    }
}

impl fmt::Debug for ModuleVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(k, v)| format!("({v})·{k:?}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// A black strand: `sign = +1` for `E_node`, `−1` for `F_node`; `mult` gives a thick strand.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Strand {
    pub node: usize,
    pub sign: i8,
    pub mult: u32,
}

/// `(bλ, i, κ)`: red/blue weights, the black sequence, and the positions of
/// the red/blue strands (`κ(j)` black strands precede strand `j`).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TricoloreTriple {
    pub bla: Vec<Weight>,
    pub strands: Vec<Strand>,
    pub kappa: Vec<usize>,
}

impl TricoloreTriple {
    pub fn validate(&self, datum: &CartanDatum) -> Result<()> {
        if self.kappa.len() != self.bla.len() {
            return Err(Error::IncompatibleTriple("κ must have one entry per red/blue strand".into()));
        }
        if self.kappa.windows(2).any(|w| w[0] > w[1]) || self.kappa.iter().any(|&k| k > self.strands.len()) {
            return Err(Error::IncompatibleTriple("κ must be weakly increasing into [0, n]".into()));
        }
        for s in &self.strands {
            if s.node >= datum.rank() || s.sign.abs() != 1 || s.mult == 0 {
                return Err(Error::IncompatibleTriple(format!("bad strand {s:?}")));
            }
        }
        sign_vector(&self.bla)?;
        Ok(())
    }

    /// `E_R = Σ λ_k + Σ ±mult·α_node`.
    pub fn right_weight(&self, datum: &CartanDatum) -> Weight {
        let mut w = Weight::zero(datum.rank());
        for l in &self.bla {
            w = w.add(l);
        }
        for s in &self.strands {
            w = w.add(&datum.simple_root(s.node).scale(s.sign as i64 * s.mult as i64));
        }
        w
    }
}

/// `V_{λ₁} ⊗^{ε₂} V_{λ₂} ⊗ ⋯`; appending a dominant factor uses `Δ`, an antidominant one `Δᵒᵖ`.
#[derive(Clone, Debug)]
pub struct TensorModule {
    pub datum: CartanDatum,
    pub weights: Vec<Weight>,
    pub eps: Vec<i8>,
    pub factors: Vec<Arc<IrrModule>>,
}

impl TensorModule {
    pub fn new(datum: &CartanDatum, weights: &[Weight], depth: usize) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidWeight("no factors".into()));
        }
        let eps = sign_vector(weights)?;
        let mut factors: Vec<Arc<IrrModule>> = Vec::new();
        for w in weights {
            if let Some(f) = factors.iter().find(|f| &f.extremal == w) {
                factors.push(f.clone());
            } else {
                factors.push(Arc::new(build_irreducible(datum, w, depth)?));
            }
        }
        Ok(Self { datum: datum.clone(), weights: weights.to_vec(), eps, factors })
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn key_weight(&self, key: &[u32]) -> Weight {
        let mut w = Weight::zero(self.datum.rank());
        for (k, &b) in key.iter().enumerate() {
            w = w.add(&self.factors[k].weights[b as usize]);
        }
        w
    }

    pub fn vector_weight(&self, v: &ModuleVector) -> Option<Weight> {
        let mut it = v.terms.keys().map(|k| self.key_weight(k));
        let first = it.next()?;
        it.all(|w| w == first).then_some(first)
    }

    /// `v_{λ₁} ⊗ ⋯ ⊗ v_{λ_ℓ}`.
    pub fn extremal_vector(&self) -> ModuleVector {
        ModuleVector::basis(vec![0; self.len()])
    }

    /// All weights of the tensor product with their basis keys.
    pub fn weight_spaces(&self) -> BTreeMap<Weight, Vec<Key>> {
        let mut acc: BTreeMap<Weight, Vec<Key>> = BTreeMap::from([(Weight::zero(self.datum.rank()), vec![vec![]])]);
        for f in &self.factors {
            let mut next: BTreeMap<Weight, Vec<Key>> = BTreeMap::new();
            for (w, keys) in &acc {
                for (fw, ids) in &f.spaces {
                    let slot = next.entry(w.add(fw)).or_default();
                    for k in keys {
                        for &b in ids {
                            let mut k2 = k.clone();
                            k2.push(b as u32);
                            slot.push(k2);
                        }
                    }
                }
            }
            acc = next;
        }
        for keys in acc.values_mut() {
            keys.sort();
        }
        acc
    }

    /// `q`-exponent picked up by the `K̃` factors when `E_i`/`F_i` acts on factor `pos`.
    fn k_exponent(&self, raise: bool, i: usize, pos: usize, key: &[u32]) -> i64 {
        let pw = |j: usize| self.datum.pairing(i, &self.factors[j].weights[key[j] as usize]);
        let mut e = 0;
        if raise {
            if pos > 0 && self.eps[pos] == -1 {
                e += (0..pos).map(pw).sum::<i64>();
            }
            e += (pos + 1..key.len()).filter(|&j| self.eps[j] == 1).map(pw).sum::<i64>();
        } else {
            if pos > 0 && self.eps[pos] == 1 {
                e -= (0..pos).map(pw).sum::<i64>();
            }
            e -= (pos + 1..key.len()).filter(|&j| self.eps[j] == -1).map(pw).sum::<i64>();
        }
        e
    }

    /// Apply a generator to a vector of the (partial) tensor product.
    pub fn act(&self, g: &Gen, v: &ModuleVector) -> Result<ModuleVector> {
        let mut out = ModuleVector::zero();
        for (key, c) in &v.terms {
            match g {
                Gen::K(mu) => {
                    let e = self.datum.inner(mu, &self.key_weight(key));
                    out.add_term(key.clone(), c * &Ratio::from_poly(Laurent::q_pow(e)));
                }
                Gen::E(i) | Gen::F(i) => {
                    if *i >= self.datum.rank() {
                        return Err(Error::OutOfRange(format!("node {i}")));
                    }
                    let raise = matches!(g, Gen::E(_));
                    for pos in 0..key.len() {
                        let col = self.factors[pos].action(g, key[pos] as usize)?;
                        if col.is_empty() {
                            continue;
                        }
                        let kq = Ratio::from_poly(Laurent::q_pow(self.k_exponent(raise, *i, pos, key)));
                        let base = c * &kq;
                        for (b, x) in col {
                            let mut k2 = key.clone();
                            k2[pos] = *b as u32;
                            out.add_term(k2, &base * x);
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// `E_i^{(n)}` or `F_i^{(n)}`.
    pub fn act_divided(&self, g: &Gen, n: u32, v: &ModuleVector) -> Result<ModuleVector> {
        let i = match g {
            Gen::E(i) | Gen::F(i) => *i,
            Gen::K(_) => return Err(Error::Unsupported("divided powers of K".into())),
        };
        let mut w = v.clone();
        for _ in 0..n {
            w = self.act(g, &w)?;
        }
        let f = Ratio::from_poly(qfact_at(n as i64, self.datum.d[i])?);
        Ok(w.scale(&f.inv()?))
    }

    /// Factorwise bilinear form.
    pub fn bilinear_form(&self, u: &ModuleVector, w: &ModuleVector) -> Result<Ratio> {
        let mut acc = Ratio::zero();
        for (k1, c1) in &u.terms {
            for (k2, c2) in &w.terms {
                if k1.len() != k2.len() {
                    return Err(Error::Shape("vectors from different modules".into()));
                }
                let mut prod = c1 * c2;
                for (pos, (a, b)) in k1.iter().zip(k2).enumerate() {
                    if prod.is_zero() {
                        break;
                    }
                    prod = &prod * &self.factors[pos].gram_entry(*a as usize, *b as usize);
                }
                acc = &acc + &prod;
            }
        }
        Ok(acc)
    }

    /// `ρ(F_i) = q_i K̃_{−i} E_i` and `ρ(E_i) = q_i K̃_i F_i` on a single factor; on
    /// tensors this is the operator whose adjunction the factorwise form satisfies.
    pub fn adjoint_action(&self, g: &Gen, v: &ModuleVector) -> Result<ModuleVector> {
        let (other, sign) = match g {
            Gen::E(i) => (Gen::F(*i), 1),
            Gen::F(i) => (Gen::E(*i), -1),
            Gen::K(_) => return Ok(v.clone()),
        };
        let i = match g {
            Gen::E(i) | Gen::F(i) => *i,
            Gen::K(_) => unreachable!(),
        };
        let w = self.act(&other, v)?;
        let mut out = ModuleVector::zero();
        for (k, c) in &w.terms {
            let e = self.datum.d[i] + sign * self.datum.pairing(i, &self.key_weight(k));
            out.add_term(k.clone(), c * &Ratio::from_poly(Laurent::q_pow(e)));
        }
        Ok(out)
    }

    fn append(&self, v: &ModuleVector) -> ModuleVector {
        ModuleVector {
            terms: v
                .terms
                .iter()
                .map(|(k, c)| {
                    let mut k2 = k.clone();
                    k2.push(0);
                    (k2, c.clone())
                })
                .collect(),
        }
    }

    /// `v_I^κ`: red/blue strands append extremal vectors, black strands act by divided powers.
    pub fn standard_vector(&self, t: &TricoloreTriple) -> Result<ModuleVector> {
        t.validate(&self.datum)?;
        if t.bla != self.weights {
            return Err(Error::IncompatibleTriple("red/blue weights differ from the module".into()));
        }
        let mut v = ModuleVector::basis(vec![]);
        let mut appended = 0;
        for (m, s) in t.strands.iter().enumerate() {
            while appended < self.len() && t.kappa[appended] <= m {
                v = self.append(&v);
                appended += 1;
            }
            let g = if s.sign > 0 { Gen::E(s.node) } else { Gen::F(s.node) };
            v = self.act_divided(&g, s.mult, &v)?;
            if v.is_zero() {
                return Ok(ModuleVector::zero());
            }
        }
        while appended < self.len() {
            v = self.append(&v);
            appended += 1;
        }
        Ok(v)
    }

    /// Random vector with small Laurent coefficients in a random weight space.
    pub fn random_vector<R: Rng>(&self, rng: &mut R, spaces: &BTreeMap<Weight, Vec<Key>>) -> (Weight, ModuleVector) {
        let idx = rng.gen_range(0..spaces.len());
        let (w, keys) = spaces.iter().nth(idx).expect("nonempty");
        let mut v = ModuleVector::zero();
        for k in keys {
            let terms: Vec<(i64, i64)> = (0..rng.gen_range(0..3)).map(|_| (rng.gen_range(-2..=2), rng.gen_range(-3..=3))).collect();
            v.add_term(k.clone(), Ratio::from_poly(Laurent::from_int_terms(&terms)));
        }
        (w.clone(), v)
    }

    /// Check relations (i)–(v) and form adjunction on random vectors; returns failures.
    pub fn verify_relations<R: Rng>(&self, rng: &mut R, trials: usize) -> Result<Vec<String>> {
        let n = self.datum.rank();
        let spaces = self.weight_spaces();
        let mut failures = Vec::new();
        for t in 0..trials {
            let (w, v) = self.random_vector(rng, &spaces);
            let (_, u) = self.random_vector(rng, &spaces);
            let mu: Vec<i64> = (0..n).map(|_| rng.gen_range(-2..=2)).collect();
            let nu: Vec<i64> = (0..n).map(|_| rng.gen_range(-2..=2)).collect();
            // (i) K_μ K_ν = K_{μ+ν}
            let lhs = self.act(&Gen::K(mu.clone()), &self.act(&Gen::K(nu.clone()), &v)?)?;
            let sum: Vec<i64> = mu.iter().zip(&nu).map(|(a, b)| a + b).collect();
            if lhs != self.act(&Gen::K(sum), &v)? {
                failures.push(format!("trial {t}: K_mu K_nu"));
            }
            let neg: Vec<i64> = mu.iter().map(|x| -x).collect();
            for i in 0..n {
                let mu_ai: i64 = (0..n).map(|j| mu[j] * self.datum.root_pairing(j, i)).sum();
                // (ii), (iii)
                for (g, s) in [(Gen::E(i), 1), (Gen::F(i), -1)] {
                    let lhs = self.act(&Gen::K(mu.clone()), &self.act(&g, &self.act(&Gen::K(neg.clone()), &v)?)?)?;
                    let rhs = self.act(&g, &v)?.scale(&Ratio::from_poly(Laurent::q_pow(s * mu_ai)));
                    if lhs != rhs {
                        failures.push(format!("trial {t}: K E/F K^-1 for node {i}"));
                    }
                }
                // (iv)
                for j in 0..n {
                    let ef = self.act(&Gen::E(i), &self.act(&Gen::F(j), &v)?)?;
                    let fe = self.act(&Gen::F(j), &self.act(&Gen::E(i), &v)?)?;
                    let lhs = ef.sub(&fe);
                    let rhs = if i == j {
                        let di = self.datum.d[i];
                        let p = self.datum.pairing(i, &w);
                        let num = Laurent::q_pow(p) - Laurent::q_pow(-p);
                        let den = Laurent::q_pow(di) - Laurent::q_pow(-di);
                        v.scale(&Ratio::new(num, den)?)
                    } else {
                        ModuleVector::zero()
                    };
                    if lhs != rhs {
                        failures.push(format!("trial {t}: [E{i},F{j}]"));
                    }
                    // (v) quantum Serre
                    if i != j {
                        let m = 1 - self.datum.c[i][j];
                        for raise in [true, false] {
                            let (gi, gj) = if raise { (Gen::E(i), Gen::E(j)) } else { (Gen::F(i), Gen::F(j)) };
                            let mut acc = ModuleVector::zero();
                            for r in 0..=m {
                                let x = self.act_divided(&gi, (m - r) as u32, &v)?;
                                let x = self.act(&gj, &x)?;
                                let x = self.act_divided(&gi, r as u32, &x)?;
                                acc = if r % 2 == 0 { acc.add(&x) } else { acc.sub(&x) };
                            }
                            if !acc.is_zero() {
                                failures.push(format!("trial {t}: Serre ({i},{j}) raise={raise}"));
                            }
                        }
                    }
                }
                // adjunction (F_i u, w) = (u, ρ(F_i) w) and likewise for E_i
                for g in [Gen::E(i), Gen::F(i)] {
                    let lhs = self.bilinear_form(&self.act(&g, &u)?, &v)?;
                    let rhs = self.bilinear_form(&u, &self.adjoint_action(&g, &v)?)?;
                    if lhs != rhs {
                        failures.push(format!("trial {t}: adjunction for {g:?}"));
                    }
                }
            }
        }
        Ok(failures)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn p(ts: &[(i64, i64)]) -> Ratio {
        Ratio::from_poly(Laurent::from_int_terms(ts))
    }

    fn sl2_pair() -> TensorModule {
        TensorModule::new(&CartanDatum::a1(), &[Weight(vec![1]), Weight(vec![1])], 16).unwrap()
    }

    #[test]
    fn coproduct_example() {
        let t = sl2_pair();
        let v = t.act(&Gen::F(0), &t.extremal_vector()).unwrap();
        let mut expect = ModuleVector::zero();
        expect.add_term(vec![1, 0], p(&[(-1, 1)]));
        expect.add_term(vec![0, 1], Ratio::one());
        assert_eq!(v, expect);
        let k = t.act(&Gen::K(vec![1]), &t.extremal_vector()).unwrap();
        assert_eq!(k, t.extremal_vector().scale(&p(&[(2, 1)])));
    }

    #[test]
    fn mixed_product_uses_opposite_coproduct() {
        let t = TensorModule::new(&CartanDatum::a1(), &[Weight(vec![-1]), Weight(vec![1])], 16).unwrap();
        assert_eq!(t.eps, vec![1, -1]);
        // E(v_low ⊗ v_high): only the first factor moves; Δ puts nothing on the prefix side.
        let v = t.act(&Gen::E(0), &t.extremal_vector()).unwrap();
        let mut expect = ModuleVector::zero();
        expect.add_term(vec![1, 0], Ratio::one());
        assert_eq!(v, expect);
        // F acts on the second factor with K̃₋ on nothing, first factor killed
        let f = t.act(&Gen::F(0), &t.extremal_vector()).unwrap();
        let mut e2 = ModuleVector::zero();
        e2.add_term(vec![0, 1], Ratio::one());
        assert_eq!(f, e2);
    }

    #[test]
    fn standard_vectors() {
        let t = sl2_pair();
        let bla = vec![Weight(vec![1]), Weight(vec![1])];
        let f = Strand { node: 0, sign: -1, mult: 1 };
        let v01 = t.standard_vector(&TricoloreTriple { bla: bla.clone(), strands: vec![f], kappa: vec![0, 1] }).unwrap();
        assert_eq!(v01, ModuleVector::basis(vec![1, 0]));
        let v00 = t.standard_vector(&TricoloreTriple { bla: bla.clone(), strands: vec![f], kappa: vec![0, 0] }).unwrap();
        let mut expect = ModuleVector::zero();
        expect.add_term(vec![1, 0], p(&[(-1, 1)]));
        expect.add_term(vec![0, 1], Ratio::one());
        assert_eq!(v00, expect);
        let v11 = t.standard_vector(&TricoloreTriple { bla: bla.clone(), strands: vec![f], kappa: vec![1, 1] }).unwrap();
        assert!(v11.is_zero());
        let ext = t.standard_vector(&TricoloreTriple { bla, strands: vec![], kappa: vec![0, 0] }).unwrap();
        assert_eq!(ext, t.extremal_vector());
        assert!(t.standard_vector(&TricoloreTriple { bla: vec![Weight(vec![1])], strands: vec![], kappa: vec![0] }).is_err());
    }

    #[test]
    fn form_values() {
        let t = sl2_pair();
        let a1 = ModuleVector::basis(vec![1, 0]);
        let a2 = t.act(&Gen::F(0), &t.extremal_vector()).unwrap();
        assert_eq!(t.bilinear_form(&a1, &a1).unwrap(), Ratio::one());
        assert_eq!(t.bilinear_form(&a1, &a2).unwrap(), p(&[(-1, 1)]));
        assert_eq!(t.bilinear_form(&a2, &a2).unwrap(), p(&[(0, 1), (-2, 1)]));
    }

    #[test]
    fn relations_hold() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for (datum, ws) in [
            (CartanDatum::a1(), vec![Weight(vec![2])]),
            (CartanDatum::a1(), vec![Weight(vec![1]), Weight(vec![-1]), Weight(vec![1])]),
            (CartanDatum::a2(), vec![Weight(vec![1, 0]), Weight(vec![0, -1])]),
            (CartanDatum::a2(), vec![Weight(vec![1, 1])]),
        ] {
            let t = TensorModule::new(&datum, &ws, 32).unwrap();
            let f = t.verify_relations(&mut rng, 6).unwrap();
            assert!(f.is_empty(), "{ws:?}: {f:?}");
        }
    }

    #[test]
    fn empty_factor_list() {
        assert!(TensorModule::new(&CartanDatum::a1(), &[], 4).is_err());
    }
}
