//! Shared fixtures: the desk-scale suite of tensor products.
#![allow(dead_code)]

use canon_core::cartan::{CartanDatum, Weight};
use canon_core::precanon::Mode;
use canon_core::strings::{canonical_block, CanonicalBlock};
use canon_core::uq::TensorModule;
use canon_core::Laurent;

pub fn l(ts: &[(i64, i64)]) -> Laurent {
    Laurent::from_int_terms(ts)
}

/// `±` fundamental weights of `datum`.
pub fn signed_fundamentals(datum: &CartanDatum) -> Vec<Weight> {
    let r = datum.rank();
    (0..r).flat_map(|i| [Weight::fundamental(r, i), Weight::fundamental(r, i).neg()]).collect()
}

/// Every sequence of at most `max_len` signed fundamental weights.
pub fn weight_sequences(datum: &CartanDatum, max_len: usize) -> Vec<Vec<Weight>> {
    let f = signed_fundamentals(datum);
    let mut out: Vec<Vec<Weight>> = Vec::new();
    let mut layer: Vec<Vec<Weight>> = vec![vec![]];
    for _ in 0..max_len {
        layer = layer.iter().flat_map(|s| f.iter().map(move |w| [s.clone(), vec![w.clone()]].concat())).collect();
        out.extend(layer.iter().cloned());
    }
    out
}

pub struct Built {
    pub module: TensorModule,
    pub blocks: Vec<CanonicalBlock>,
}

pub fn build(datum: &CartanDatum, ws: &[Weight], mode: Mode) -> Built {
    let module = TensorModule::new(datum, ws, 16).unwrap();
    let blocks = module.weight_spaces().keys().map(|w| canonical_block(&module, w, None, mode).unwrap()).collect();
    Built { module, blocks }
}

/// A1 and A2 products of up to three signed fundamental factors.
pub fn suite() -> Vec<Built> {
    let mut out = Vec::new();
    for d in [CartanDatum::a1(), CartanDatum::a2()] {
        for ws in weight_sequences(&d, 3) {
            out.push(build(&d, &ws, Mode::Gs));
        }
    }
    out
}
