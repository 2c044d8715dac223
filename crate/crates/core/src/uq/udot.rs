//! Stabilization of canonical elements of the modified form.
//!
//! An element `u 1_n` of `U̇(sl2)` is probed through its action on
//! `v_{−λ} ⊗ v_μ ∈ V_{−λ} ⊗ V_μ` with `μ − λ = n`, for growing `λ, μ`.
//! Coordinates are read in the stringy basis of the target weight space and
//! keyed by tuple label, so they can be compared across different modules.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::cartan::{CartanDatum, Weight};
use crate::error::{Error, Result};
use crate::precanon::{canonical, sign_detect, Mode, PrecanonicalStructure, SignOutcome};
use crate::strings::{default_window, laurent_or_err, select_with_window};
use crate::uq::{Gen, TensorModule};
use crate::Laurent;

/// A divided power `E^(a)` or `F^(a)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DivPower {
    E(u32),
    F(u32),
}

/// Word in divided powers; the rightmost letter acts first.
pub type UdotWord = Vec<DivPower>;

/// `E^(a) F^(b)`.
pub fn ef_word(a: u32, b: u32) -> UdotWord {
    vec![DivPower::E(a), DivPower::F(b)]
}

pub fn word_label(w: &[DivPower], n: i64) -> String {
    let mut s = String::new();
    for p in w {
        match p {
            DivPower::E(a) => s.push_str(&format!("E^({a})")),
            DivPower::F(a) => s.push_str(&format!("F^({a})")),
        }
    }
    format!("{s}1_{n}")
}

/// Weight of `u 1_n`.
pub fn word_weight(w: &[DivPower], n: i64) -> i64 {
    n + w.iter().map(|p| match p { DivPower::E(a) => 2 * *a as i64, DivPower::F(a) => -2 * *a as i64 }).sum::<i64>()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct UdotSample {
    pub lambda: i64,
    pub mu: i64,
    /// Stringy coordinates keyed by tuple label (zero entries omitted).
    pub coordinates: BTreeMap<String, Laurent>,
    pub iterations: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct UdotReport {
    pub word: String,
    pub n: i64,
    pub bound: i64,
    pub stabilized: bool,
    /// Last sample; equals the stable value when `stabilized`.
    pub coordinates: BTreeMap<String, Laurent>,
    pub samples: Vec<UdotSample>,
    /// Sign detection in the last module, when a sample exists.
    pub sign: Option<SignOutcome>,
    /// Label of the detected canonical vector, if any.
    pub sign_label: Option<String>,
}

struct Probe {
    sample: UdotSample,
    sign: Option<(SignOutcome, Option<String>)>,
}

fn probe(datum: &CartanDatum, word: &[DivPower], lambda: i64, mu: i64, mode: Mode) -> Result<Probe> {
    let depth = (lambda + mu + 2) as usize;
    let t = TensorModule::new(datum, &[Weight(vec![-lambda]), Weight(vec![mu])], depth)?;
    let mut v = t.extremal_vector();
    for p in word.iter().rev() {
        v = match *p {
            DivPower::E(a) => t.act_divided(&Gen::E(0), a, &v)?,
            DivPower::F(a) => t.act_divided(&Gen::F(0), a, &v)?,
        };
    }
    let target = Weight(vec![word_weight(word, mu - lambda)]);
    if v.is_zero() {
        return Ok(Probe { sample: UdotSample { lambda, mu, coordinates: BTreeMap::new(), iterations: 0 }, sign: None });
    }
    let w0 = default_window(datum, 1);
    let sel = select_with_window(&t, &target, w0, (2 * lambda + 2 * mu + 2).max(w0 as i64) as usize)?;
    let raw = sel.coordinates(&v)?;
    let x: Vec<Laurent> = raw.iter().map(|r| r.as_poly()).collect::<Option<_>>().ok_or_else(|| Error::NotIntegral("stringy coordinates".into()))?;
    let labels: Vec<String> = sel.tuples.iter().map(|tu| format!("{tu:?}")).collect();
    let p = PrecanonicalStructure::with_fixed_standards(labels.clone(), sel.order()?, laurent_or_err(&sel.gram, "Gram matrix")?)?;
    let b = canonical(&p, mode)?;
    let sign = sign_detect(&p, &b, &x)?;
    let label = match &sign {
        SignOutcome::Plus { label } | SignOutcome::Minus { label } => Some(labels[*label].clone()),
        _ => None,
    };
    let coordinates = labels.into_iter().zip(x).filter(|(_, c)| !c.is_zero()).collect();
    Ok(Probe { sample: UdotSample { lambda, mu, coordinates, iterations: b.iterations }, sign: Some((sign, label)) })
}

/// Increase `λ`, `μ = λ + n` until the coordinates agree on three consecutive
/// samples or `max(λ, μ)` would exceed `bound`. The first sample has
/// `λ ≥ Σ E-exponents` and `μ ≥ Σ F-exponents`; below that the word kills the
/// extremal tensor for trivial reasons and the zeros would fake stabilization.
pub fn udot_stabilize(datum: &CartanDatum, word: &[DivPower], n: i64, bound: i64, mode: Mode) -> Result<UdotReport> {
    if datum.rank() != 1 || datum.c[0][0] != 2 {
        return Err(Error::Unsupported(format!("stabilization is implemented for sl2 only, got {}", datum.name)));
    }
    let mut samples: Vec<UdotSample> = Vec::new();
    let mut sign = None;
    let mut stabilized = false;
    let (es, fs) = word.iter().fold((0i64, 0i64), |(e, f), p| match p {
        DivPower::E(a) => (e + *a as i64, f),
        DivPower::F(a) => (e, f + *a as i64),
    });
    let start = (-n).max(0).max(es).max(fs - n);
    for t in 0.. {
        let lambda = start + t;
        let mu = lambda + n;
        if lambda.max(mu) > bound {
            break;
        }
        let pr = probe(datum, word, lambda, mu, mode)?;
        samples.push(pr.sample);
        sign = pr.sign;
        let k = samples.len();
        if k >= 3 && samples[k - 3..].windows(2).all(|w| w[0].coordinates == w[1].coordinates) {
            stabilized = true;
            break;
        }
    }
    let coordinates = samples.last().map(|s| s.coordinates.clone()).unwrap_or_default();
    let (sign, sign_label) = match sign {
        Some((s, l)) => (Some(s), l),
        None => (None, None),
    };
    Ok(UdotReport { word: word_label(word, n), n, bound, stabilized, coordinates, samples, sign, sign_label })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_word_is_the_extremal_tensor() {
        let r = udot_stabilize(&CartanDatum::a1(), &[], 2, 8, Mode::Gs).unwrap();
        assert!(r.stabilized);
        assert_eq!(r.samples.len(), 3);
        assert_eq!(r.coordinates.len(), 1);
        assert!(r.coordinates.values().all(|c| c.is_one()));
        assert!(matches!(r.sign, Some(SignOutcome::Plus { .. })));
    }

    #[test]
    fn e_on_minus_one() {
        let r = udot_stabilize(&CartanDatum::a1(), &[DivPower::E(1)], -1, 3, Mode::Gs).unwrap();
        assert!(r.stabilized, "{r:?}");
        assert_eq!(r.samples.last().unwrap().lambda.max(r.samples.last().unwrap().mu), 3);
    }

    #[test]
    fn zero_bound_never_stabilizes() {
        let r = udot_stabilize(&CartanDatum::a1(), &ef_word(1, 1), 0, 0, Mode::Gs).unwrap();
        assert!(!r.stabilized);
        assert!(r.samples.is_empty());
        let r = udot_stabilize(&CartanDatum::a1(), &[], 0, 0, Mode::Gs).unwrap();
        assert!(!r.stabilized);
        assert_eq!(r.samples.len(), 1);
    }

    #[test]
    fn no_fake_stabilization_at_zero() {
        let r = udot_stabilize(&CartanDatum::a1(), &[DivPower::F(3)], -3, 8, Mode::Gs).unwrap();
        assert!(r.stabilized);
        assert_eq!(r.coordinates.len(), 1);
        assert_eq!(r.sign_label.as_deref(), Some("((),(3))"));
    }

    #[test]
    fn rejects_higher_rank() {
        assert!(udot_stabilize(&CartanDatum::a2(), &[], 0, 4, Mode::Gs).is_err());
    }
}
