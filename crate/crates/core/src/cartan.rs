//! Cartan data, weights, and the orders on compositions and word tuples.
//!
//! Nodes are 0-based. Weights live in fundamental-weight coordinates.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CartanDatum {
    pub name: String,
    pub c: Vec<Vec<i64>>,
    pub d: Vec<i64>,
    pub finite_type: bool,
}

/// JSON shape `{"cartan": [[2,-1],[-1,2]], "d": [1,1]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CartanSpec {
    pub cartan: Vec<Vec<i64>>,
    pub d: Vec<i64>,
}

impl CartanDatum {
    pub fn new(name: impl Into<String>, c: Vec<Vec<i64>>, d: Vec<i64>) -> Result<Self> {
        let n = c.len();
        if n == 0 || d.len() != n || c.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidCartan("shape".into()));
        }
        for i in 0..n {
            if c[i][i] != 2 {
                return Err(Error::InvalidCartan(format!("c[{i}][{i}] != 2")));
            }
            if d[i] <= 0 {
                return Err(Error::InvalidCartan(format!("d[{i}] must be positive")));
            }
            for j in 0..n {
                if i != j && c[i][j] > 0 {
                    return Err(Error::InvalidCartan(format!("c[{i}][{j}] > 0")));
                }
                if (c[i][j] == 0) != (c[j][i] == 0) || d[i] * c[i][j] != d[j] * c[j][i] {
                    return Err(Error::InvalidCartan(format!("not symmetrizable at ({i},{j})")));
                }
            }
        }
        let finite_type = positive_definite(&(0..n).map(|i| (0..n).map(|j| d[i] * c[i][j]).collect()).collect::<Vec<Vec<i64>>>());
        Ok(Self { name: name.into(), c, d, finite_type })
    }

    pub fn from_spec(spec: &CartanSpec) -> Result<Self> {
        Self::new("custom", spec.cartan.clone(), spec.d.clone())
    }

    pub fn a(n: usize) -> Self {
        let c = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 2 } else if i.abs_diff(j) == 1 { -1 } else { 0 }).collect())
            .collect();
        Self::new(format!("A{n}"), c, vec![1; n]).expect("type A is valid")
    }

    pub fn a1() -> Self {
        Self::a(1)
    }

    pub fn a2() -> Self {
        Self::a(2)
    }

    pub fn a3() -> Self {
        Self::a(3)
    }

    pub fn affine_a1() -> Self {
        Self::new("A1^(1)", vec![vec![2, -2], vec![-2, 2]], vec![1, 1]).expect("affine A1 is valid")
    }

    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "A1" => Ok(Self::a1()),
            "A2" => Ok(Self::a2()),
            "A3" => Ok(Self::a3()),
            "A1^(1)" | "affine-A1" | "A1-affine" => Ok(Self::affine_a1()),
            _ => Err(Error::InvalidCartan(format!("unknown type {name:?}"))),
        }
    }

    pub fn rank(&self) -> usize {
        self.c.len()
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.rank()).all(|i| (0..self.rank()).all(|j| self.c[i][j] == self.c[j][i]))
    }

    /// `α_j` in fundamental-weight coordinates (column `j` of the Cartan matrix).
    pub fn simple_root(&self, j: usize) -> Weight {
        Weight((0..self.rank()).map(|i| self.c[i][j]).collect())
    }

    /// Weight of a root-lattice element given in simple-root coordinates.
    pub fn root_to_weight(&self, m: &[i64]) -> Weight {
        Weight((0..self.rank()).map(|i| (0..self.rank()).map(|j| self.c[i][j] * m[j]).sum()).collect())
    }

    /// `⟨α_i, λ⟩ = d_i λ^i`.
    pub fn pairing(&self, i: usize, lambda: &Weight) -> i64 {
        self.d[i] * lambda.0[i]
    }

    /// `⟨α_i, α_j⟩ = d_i c_ij`.
    pub fn root_pairing(&self, i: usize, j: usize) -> i64 {
        self.d[i] * self.c[i][j]
    }

    /// `⟨μ, ν⟩` for `μ` in simple-root coordinates and `ν` a weight.
    pub fn inner(&self, mu_roots: &[i64], nu: &Weight) -> i64 {
        (0..self.rank()).map(|j| mu_roots[j] * self.pairing(j, nu)).sum()
    }

    pub fn check_weight(&self, w: &Weight) -> Result<()> {
        if w.0.len() != self.rank() {
            return Err(Error::InvalidWeight(format!("expected {} coordinates, got {}", self.rank(), w.0.len())));
        }
        Ok(())
    }

    pub fn reflect(&self, i: usize, w: &Weight) -> Weight {
        let k = w.0[i];
        w.sub(&self.simple_root(i).scale(k))
    }

    /// Reduced word of the longest Weyl element, found by walking `ρ` to `−ρ`.
    pub fn longest_word(&self) -> Result<Vec<usize>> {
        if !self.finite_type {
            return Err(Error::NotFiniteType);
        }
        let mut w = Weight(vec![1; self.rank()]);
        let mut word = Vec::new();
        while let Some(i) = (0..self.rank()).find(|&i| w.0[i] > 0) {
            w = self.reflect(i, &w);
            word.push(i);
        }
        Ok(word)
    }

    pub fn num_positive_roots(&self) -> Result<usize> {
        Ok(self.longest_word()?.len())
    }

    /// `w₀λ`.
    pub fn w0_negate(&self, lambda: &Weight) -> Result<Weight> {
        let word = self.longest_word()?;
        let mut w = lambda.clone();
        for &i in word.iter().rev() {
            w = self.reflect(i, &w);
        }
        Ok(w)
    }

    /// Default node sequence `0,1,…,rank−1,0,1,…` truncated to `len`.
    pub fn cyclic_nodes(&self, len: usize) -> Vec<usize> {
        (0..len).map(|k| k % self.rank()).collect()
    }
}

/// Leading principal minors positive (exact Bareiss elimination).
fn positive_definite(m: &[Vec<i64>]) -> bool {
    let n = m.len();
    let mut a: Vec<Vec<i128>> = m.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut prev = 1i128;
    for k in 0..n {
        if a[k][k] <= 0 {
            return false;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    true
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, Default)]
#[serde(transparent)]
pub struct Weight(pub Vec<i64>);

impl Weight {
    pub fn zero(rank: usize) -> Self {
        Self(vec![0; rank])
    }

    pub fn fundamental(rank: usize, i: usize) -> Self {
        let mut v = vec![0; rank];
        v[i] = 1;
        Self(v)
    }

    pub fn is_dominant(&self) -> bool {
        self.0.iter().all(|&x| x >= 0)
    }

    pub fn is_antidominant(&self) -> bool {
        self.0.iter().all(|&x| x <= 0)
    }

    pub fn add(&self, o: &Self) -> Self {
        Self(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self(self.0.iter().zip(&o.0).map(|(a, b)| a - b).collect())
    }

    pub fn neg(&self) -> Self {
        Self(self.0.iter().map(|a| -a).collect())
    }

    pub fn scale(&self, k: i64) -> Self {
        Self(self.0.iter().map(|a| a * k).collect())
    }
}

impl fmt::Debug for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// `ε_k = −1` exactly when `λ_k` is dominant.
pub fn sign_vector(weights: &[Weight]) -> Result<Vec<i8>> {
    weights
        .iter()
        .map(|w| {
            if w.is_dominant() {
                Ok(-1)
            } else if w.is_antidominant() {
                Ok(1)
            } else {
                Err(Error::InvalidWeight(format!("{w:?} is neither dominant nor antidominant")))
            }
        })
        .collect()
}

/// `ν ≥ ν′` iff every suffix sum of `ν′` is at least that of `ν`.
pub fn reverse_dominance_ge(nu: &[u32], nu2: &[u32]) -> Result<bool> {
    if nu.len() != nu2.len() {
        return Err(Error::Shape(format!("compositions of length {} and {}", nu.len(), nu2.len())));
    }
    let (mut s, mut s2) = (0u64, 0u64);
    for j in (0..nu.len()).rev() {
        s += nu[j] as u64;
        s2 += nu2[j] as u64;
        if s2 < s {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Tuple of exponent words `a^(1), …, a^(ℓ)` read against a node sequence.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct WordTuple(pub Vec<Vec<u32>>);

impl WordTuple {
    /// Normalizes by trimming trailing zeros.
    pub fn new(words: Vec<Vec<u32>>) -> Self {
        Self(
            words
                .into_iter()
                .map(|mut w| {
                    while w.last() == Some(&0) {
                        w.pop();
                    }
                    w
                })
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The composition `|a•|` of word sums.
    pub fn sizes(&self) -> Vec<u32> {
        self.0.iter().map(|w| w.iter().sum()).collect()
    }

    /// Nonzero `(node, multiplicity)` pairs of word `k`.
    pub fn pairs(&self, k: usize, nodes: &[usize]) -> Result<Vec<(usize, u32)>> {
        let w = &self.0[k];
        if w.len() > nodes.len() {
            return Err(Error::Shape(format!("word of length {} exceeds node sequence of length {}", w.len(), nodes.len())));
        }
        Ok(w.iter().enumerate().filter(|(_, &a)| a > 0).map(|(j, &a)| (nodes[j], a)).collect())
    }
}

impl fmt::Debug for WordTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, w) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "(")?;
            for (j, a) in w.iter().enumerate() {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{a}")?;
            }
            write!(f, ")")?;
        }
        write!(f, ")")
    }
}

fn lex_from_last(t: &WordTuple, u: &WordTuple) -> Ordering {
    for k in (0..t.len()).rev() {
        match t.0[k].cmp(&u.0[k]) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    Ordering::Equal
}

fn check_shape(t: &WordTuple, u: &WordTuple) -> Result<()> {
    if t.len() != u.len() {
        return Err(Error::Shape(format!("tuples of length {} and {}", t.len(), u.len())));
    }
    Ok(())
}

/// The partial order: strict reverse dominance on sizes, or equal sizes and
/// lexicographic order from the last word backwards. `None` when incomparable.
pub fn tuple_partial_cmp(t: &WordTuple, u: &WordTuple) -> Result<Option<Ordering>> {
    check_shape(t, u)?;
    let (a, b) = (t.sizes(), u.sizes());
    if a == b {
        return Ok(Some(lex_from_last(t, u)));
    }
    if reverse_dominance_ge(&a, &b)? {
        Ok(Some(Ordering::Greater))
    } else if reverse_dominance_ge(&b, &a)? {
        Ok(Some(Ordering::Less))
    } else {
        Ok(None)
    }
}

/// Total order refining [`tuple_partial_cmp`]. Incomparable size vectors are
/// ordered by their suffix sums, compared from the last entry, smaller first
/// being greater; this is a linear extension of reverse dominance.
pub fn tuple_compare(t: &WordTuple, u: &WordTuple) -> Result<Ordering> {
    if let Some(o) = tuple_partial_cmp(t, u)? {
        return Ok(o);
    }
    let suffix = |v: Vec<u32>| {
        let mut acc = 0u64;
        v.iter().rev().map(|&x| {
            acc += x as u64;
            acc
        }).collect::<Vec<_>>()
    };
    Ok(suffix(u.sizes()).cmp(&suffix(t.sizes())))
}
