//! Acceptance checks for the workbench, one function per criterion.
//!
//! Each check recomputes its expected values independently where it can
//! (hand-built q-integers, exhaustive searches) and reports a one-line verdict.

use std::time::{Duration, Instant};

use canon_core::cartan::{CartanDatum, Weight};
use canon_core::klr::{affine_sl2_idempotent_check, verify_relations, ActionMode, Poly, PolyRep, QijChoice, RelationReport};
use canon_core::laurent::qbinom;
use canon_core::precanon::hecke::{self, bruhat_le, hecke_structure, length, HeckeElem, Perm};
use canon_core::precanon::{audit, balanced_positive_report, canonical, canonical_triangular, dual_bases, uniqueness_stress, Mode, SignOutcome};
use canon_core::strings::{action_matrix, canonical_block, canonical_in_pure_tensors, enumerate_tuples, tuple_to_triple, CanonicalBlock};
use canon_core::uq::udot::{udot_stabilize, DivPower};
use canon_core::uq::{Gen, ModuleVector, Strand, TensorModule, TricoloreTriple};
use canon_core::{LMat, Laurent, Ratio};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub struct Verdict {
    pub pass: bool,
    pub detail: String,
}

impl Verdict {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self { pass, detail: detail.into() }
    }
}

type Check = Result<Verdict, canon_core::Error>;

fn l(ts: &[(i64, i64)]) -> Laurent {
    Laurent::from_int_terms(ts)
}

/// `[m] = q^{m−1} + q^{m−3} + ⋯ + q^{1−m}`, written out term by term.
fn qint_by_hand(m: i64) -> Laurent {
    l(&(0..m).map(|j| (m - 1 - 2 * j, 1)).collect::<Vec<_>>())
}

pub struct Built {
    pub datum: CartanDatum,
    pub module: TensorModule,
    pub blocks: Vec<CanonicalBlock>,
}

fn signed_fundamentals(d: &CartanDatum) -> Vec<Weight> {
    let r = d.rank();
    (0..r).flat_map(|i| [Weight::fundamental(r, i), Weight::fundamental(r, i).neg()]).collect()
}

fn sequences(d: &CartanDatum, max_len: usize) -> Vec<Vec<Weight>> {
    let f = signed_fundamentals(d);
    let mut out = Vec::new();
    let mut layer: Vec<Vec<Weight>> = vec![vec![]];
    for _ in 0..max_len {
        layer = layer.iter().flat_map(|s| f.iter().map(move |w| [s.clone(), vec![w.clone()]].concat())).collect();
        out.extend(layer.iter().cloned());
    }
    out
}

pub fn build(d: &CartanDatum, ws: &[Weight]) -> Result<Built, canon_core::Error> {
    let module = TensorModule::new(d, ws, 16)?;
    let blocks = module.weight_spaces().keys().map(|w| canonical_block(&module, w, None, Mode::Gs)).collect::<Result<_, _>>()?;
    Ok(Built { datum: d.clone(), module, blocks })
}

/// A1 and A2, every sequence of one to three signed fundamental weights.
pub fn suite() -> Result<Vec<Built>, canon_core::Error> {
    let mut out = Vec::new();
    for d in [CartanDatum::a1(), CartanDatum::a2()] {
        for ws in sequences(&d, 3) {
            out.push(build(&d, &ws)?);
        }
    }
    Ok(out)
}

fn blocks(s: &[Built]) -> usize {
    s.iter().map(|b| b.blocks.len()).sum()
}

// 1 ------------------------------------------------------------------------

pub fn calibration() -> Check {
    let mut bad = Vec::new();
    let mut count = 0;
    for n in 0..=6i64 {
        let t = TensorModule::new(&CartanDatum::a1(), &[Weight(vec![n])], 16)?;
        let mut oracle = Ratio::one();
        for k in 0..=n {
            if k > 0 {
                // N_k = N_{k−1} · q^{2k−1−n} [n−k+1] / [k]
                let step = Ratio::new(Laurent::q_pow(2 * k - 1 - n) * qint_by_hand(n - k + 1), qint_by_hand(k))?;
                oracle = &oracle * &step;
            }
            let v = t.act_divided(&Gen::F(0), k as u32, &t.extremal_vector())?;
            let got = t.bilinear_form(&v, &v)?;
            let closed = Laurent::q_pow(-k * (n - k)) * qbinom(n, k)?;
            let ok = got == oracle && got.as_poly().as_ref() == Some(&closed) && closed.is_almost_delta(true);
            if !ok {
                bad.push(format!("n={n} k={k}: {got}"));
            }
            count += 1;
        }
    }
    Ok(Verdict::new(bad.is_empty(), if bad.is_empty() { format!("{count} norms match the recursion and lie in 1 + q⁻¹ℤ[q⁻¹]") } else { bad.join("; ") }))
}

// 2 ------------------------------------------------------------------------

pub fn vlambda_squared() -> Check {
    let start = Instant::now();
    let d = CartanDatum::a1();
    let t = TensorModule::new(&d, &[Weight(vec![1]), Weight(vec![1])], 16)?;
    let blk = canonical_block(&t, &Weight(vec![0]), None, Mode::Gs)?;
    let elapsed = start.elapsed();
    let mut a0 = ModuleVector::zero();
    a0.add_term(vec![1, 0], Ratio::one());
    let mut a1 = ModuleVector::zero();
    a1.add_term(vec![0, 1], Ratio::one());
    a1.add_term(vec![1, 0], Ratio::from_poly(l(&[(-1, 1)])));
    let standards_ok = blk.sel.vectors == vec![a0, a1];
    // 2×2 triangular bar-solve: m₀₁ − bar(m₀₁) = r₀₁·bar(m₁₁), m₀₁ ∈ q⁻¹ℤ[q⁻¹]
    let r01 = blk.structure.bar.get(0, 1).clone();
    let oracle_m01 = if r01.is_zero() { Some(Laurent::zero()) } else { r01.antisym_negative_part().ok() };
    let transition_ok = blk.basis.transition.is_identity() && oracle_m01 == Some(Laurent::zero());
    let g = blk.basis.gram(&blk.structure);
    // entries as a multiset
    let mut got: Vec<String> = [g.get(0, 0), g.get(0, 1), g.get(1, 1)].iter().map(|x| x.to_string()).collect();
    let mut want: Vec<String> = [l(&[(0, 1), (-2, 1)]), l(&[(-1, 1), (-3, 1)]), l(&[(0, 1), (-2, 2), (-4, 1)])].iter().map(|x| x.to_string()).collect();
    got.sort();
    want.sort();
    let gram_ok = got == want;
    let fast = elapsed < Duration::from_secs(1);
    let detail = format!(
        "standards {}, transition identity {}, Gram {{{}, {}, {}}} vs expected {{1+q⁻², q⁻¹+q⁻³, 1+2q⁻²+q⁻⁴}}, {:.0?}",
        yes(standards_ok),
        yes(transition_ok),
        g.get(0, 0),
        g.get(0, 1),
        g.get(1, 1),
        elapsed
    );
    Ok(Verdict::new(standards_ok && transition_ok && gram_ok && fast, detail))
}

fn yes(b: bool) -> &'static str {
    if b {
        "ok"
    } else {
        "WRONG"
    }
}

// 3 ------------------------------------------------------------------------

pub fn almost_orthonormal(s: &[Built]) -> Check {
    let mut bad = Vec::new();
    for b in s {
        for blk in &b.blocks {
            let a = audit(&blk.structure, &blk.basis.transition);
            let g = blk.basis.gram(&blk.structure);
            if !a.passes(Mode::Gs) || !g.entries().all(|(r, c, x)| x.is_almost_delta(r == c)) {
                bad.push(format!("{} {:?} at {:?}", b.datum.name, b.module.weights, blk.sel.weight));
            }
        }
    }
    Ok(Verdict::new(bad.is_empty(), if bad.is_empty() { format!("{} modules, {} weight blocks", s.len(), blocks(s)) } else { bad.join("; ") }))
}

// 4 ------------------------------------------------------------------------

pub fn positivity(s: &[Built]) -> Check {
    let mut bad = Vec::new();
    let mut actions = 0;
    for b in s {
        let t = &b.module;
        for blk in &b.blocks {
            match canonical_in_pure_tensors(t, blk)?.to_laurent() {
                Some(m) if m.entries().all(|(r, c, x)| if r == c { x.is_one() } else { x.in_neg_part() && x.all_coeffs_nonneg() }) => {}
                _ => bad.push(format!("pure tensors {:?} at {:?}", t.weights, blk.sel.weight)),
            }
            for i in 0..t.datum.rank() {
                let a = t.datum.simple_root(i);
                for (g, w) in [(Gen::E(i), blk.sel.weight.add(&a)), (Gen::F(i), blk.sel.weight.sub(&a))] {
                    let Some(dst) = b.blocks.iter().find(|x| x.sel.weight == w) else { continue };
                    actions += 1;
                    match action_matrix(t, &g, blk, dst)?.to_laurent() {
                        Some(m) if m.entries().all(|(_, _, x)| x.all_coeffs_nonneg()) => {}
                        _ => bad.push(format!("{g:?} on {:?} at {:?}", t.weights, blk.sel.weight)),
                    }
                }
            }
        }
    }
    Ok(Verdict::new(bad.is_empty(), if bad.is_empty() { format!("{} transition matrices in ℤ≥0[q⁻¹], {actions} E/F matrices in ℤ≥0[q,q⁻¹]", blocks(s)) } else { bad.join("; ") }))
}

// 5 ------------------------------------------------------------------------

pub fn pairing_positivity() -> Check {
    let mut data: Vec<(CartanDatum, Vec<Weight>)> = sequences(&CartanDatum::a1(), 3).into_iter().map(|w| (CartanDatum::a1(), w)).collect();
    data.extend(sequences(&CartanDatum::a2(), 2).into_iter().map(|w| (CartanDatum::a2(), w)));
    let mut pairs = 0usize;
    let mut bad = Vec::new();
    for (d, ws) in &data {
        let b = build(d, ws)?;
        for blk in &b.blocks {
            let vs = enumerate_tuples(&b.module, &blk.sel.weight, &blk.sel.nodes)
                .iter()
                .map(|tu| b.module.standard_vector(&tuple_to_triple(&b.module, tu, &blk.sel.nodes)?))
                .collect::<Result<Vec<_>, _>>()?;
            for v in &vs {
                for u in &vs {
                    pairs += 1;
                    match b.module.bilinear_form(v, u)?.as_poly() {
                        Some(p) if p.all_coeffs_nonneg() => {}
                        other => bad.push(format!("{ws:?}: {other:?}")),
                    }
                }
            }
        }
    }
    let t = TensorModule::new(&CartanDatum::a1(), &[Weight(vec![1]), Weight(vec![1])], 16)?;
    let triple = |kappa: Vec<usize>| TricoloreTriple { bla: vec![Weight(vec![1]), Weight(vec![1])], strands: vec![Strand { node: 0, sign: -1, mult: 1 }], kappa };
    let x = t.bilinear_form(&t.standard_vector(&triple(vec![0, 1]))?, &t.standard_vector(&triple(vec![0, 0]))?)?;
    let at_one = x.as_poly().map(|p| p.eval_one());
    let value_ok = at_one.as_ref().is_some_and(|v| *v == 2.into());
    let detail = format!(
        "{pairs} pairings nonnegative: {}; ⟨v_I, v_I′⟩ = {x}, at q = 1: {} (expected 2)",
        if bad.is_empty() { "ok".to_string() } else { bad.join("; ") },
        at_one.map(|v| v.to_string()).unwrap_or_else(|| "not a polynomial".into())
    );
    Ok(Verdict::new(bad.is_empty() && value_ok, detail))
}

// 6 ------------------------------------------------------------------------

pub fn affine_idempotent() -> Check {
    let start = Instant::now();
    let d = CartanDatum::affine_a1();
    let q01 = Poly::bivariate(&[(2, 0, 1), (1, 1, -2), (0, 2, 1)]);
    let is_default = QijChoice::geometric_default(&d)?.get(0, 1)? == &q01;
    let geo = QijChoice::geometric_default(&d)?.with_q(0, 1, q01);
    let g = affine_sl2_idempotent_check(&PolyRep::new(&d, geo, ActionMode::Factored), 3, 4)?;
    let s = affine_sl2_idempotent_check(&PolyRep::new(&d, canon_core::klr::affine_sum_of_squares(), ActionMode::Generic), 3, 4)?;
    let elapsed = start.elapsed();
    let pass = g.quasi_idempotent_constant == Some(2) && s.nilpotency_order.is_some() && s.quasi_idempotent_constant.is_none() && elapsed < Duration::from_secs(1);
    Ok(Verdict::new(
        pass,
        format!("u²−2uv+v² (the geometric Q: {is_default}): x² = c·x with c = {:?}; u²+v²: nilpotency order {:?}, quasi-idempotent {:?}; {elapsed:.0?}", g.quasi_idempotent_constant, s.nilpotency_order, s.quasi_idempotent_constant),
    ))
}

// 7 ------------------------------------------------------------------------

fn failures(r: &RelationReport) -> Vec<String> {
    r.relations.iter().filter(|(_, o)| o.failed > 0).map(|(n, o)| format!("{n} {}/{}", o.failed, o.checked)).collect()
}

pub fn klr_relations() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut bad = Vec::new();
    let mut checked = 0;
    for d in [CartanDatum::a1(), CartanDatum::a2(), CartanDatum::affine_a1()] {
        for mode in [ActionMode::Factored, ActionMode::Generic] {
            let r = verify_relations(&PolyRep::new(&d, QijChoice::geometric_default(&d)?, mode), 100, &mut rng)?;
            checked += r.relations.values().map(|o| o.checked).sum::<usize>();
            let f = failures(&r);
            if !f.is_empty() {
                bad.push(format!("{} {mode:?}: {}", d.name, f.join(", ")));
            }
        }
    }
    let d = CartanDatum::a2();
    let corrupt = QijChoice::geometric_default(&d)?.with_q(0, 1, Poly::bivariate(&[(2, 0, 1), (1, 1, 1), (0, 2, 1)]));
    let r = verify_relations(&PolyRep::new(&d, corrupt, ActionMode::Factored), 100, &mut rng)?;
    let control = r.failed("triple-smart");
    Ok(Verdict::new(
        bad.is_empty() && control,
        format!("{checked} relation instances: {}; corrupted Q fails {}", if bad.is_empty() { "all hold".into() } else { bad.join("; ") }, failures(&r).join(", ")),
    ))
}

// 8 ------------------------------------------------------------------------

pub fn uniqueness(s: &[Built]) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut structures = 0;
    let mut bad = Vec::new();
    for b in s {
        for blk in &b.blocks {
            structures += 1;
            if !uniqueness_stress(&blk.structure, Mode::Gs, 10, &mut rng)? {
                bad.push(format!("{:?} at {:?}", b.module.weights, blk.sel.weight));
            }
        }
    }
    for n in 3..=4 {
        let (_, p) = hecke_structure(n)?;
        structures += 1;
        if !uniqueness_stress(&p, Mode::Triangular, 10, &mut rng)? {
            bad.push(format!("Hecke S{n}"));
        }
    }
    Ok(Verdict::new(bad.is_empty(), if bad.is_empty() { format!("{structures} structures × 10 linear extensions, bit-exact") } else { bad.join("; ") }))
}

// 9 ------------------------------------------------------------------------

pub fn dual_bases_check(s: &[Built]) -> Check {
    let mut bad = Vec::new();
    for b in s {
        for blk in &b.blocks {
            if !dual_bases(&blk.structure, &blk.basis)?.identity_holds {
                bad.push(format!("{:?} at {:?}", b.module.weights, blk.sel.weight));
            }
        }
    }
    let (_, p) = hecke_structure(3)?;
    let kl = canonical_triangular(&p)?;
    let id = dual_bases(&p, &kl)?.identity_holds;
    let r = balanced_positive_report(&p, &kl)?;
    let dual_ok = r.balanced_positive && r.dual.as_ref().is_some_and(|d| d.confirmed);
    Ok(Verdict::new(
        bad.is_empty() && id && dual_ok,
        format!(
            "Gram-inverse identity on {} blocks + S₃: {}; S₃ balanced positive {}, dual balanced positive in p = −q⁻¹ {}",
            blocks(s),
            if bad.is_empty() && id { "ok".into() } else { bad.join("; ") },
            yes(r.balanced_positive),
            yes(dual_ok)
        ),
    ))
}

// 10 -----------------------------------------------------------------------

fn column(els: &[Perm], m: &LMat, c: usize) -> HeckeElem {
    els.iter().enumerate().filter(|(r, _)| !m.get(*r, c).is_zero()).map(|(r, x)| (x.clone(), m.get(r, c).clone())).collect()
}

/// Every bar-invariant `T_w + Σ_{y<w} m_y T_y` with each `m_y` a 0/1
/// combination of `q⁻¹, …, q^{−(ℓ(w)−ℓ(y))}`.
pub fn brute_force_kl(w: &Perm, els: &[Perm]) -> Vec<HeckeElem> {
    let below: Vec<&Perm> = els.iter().filter(|y| *y != w && bruhat_le(y, w)).collect();
    let opts: Vec<Vec<Laurent>> = below
        .iter()
        .map(|y| {
            let k = length(w) - length(y);
            (0..1u32 << k).map(|mask| l(&(0..k).filter(|b| mask >> b & 1 == 1).map(|b| (-(b as i64) - 1, 1)).collect::<Vec<_>>())).collect()
        })
        .collect();
    let mut found = Vec::new();
    let mut idx = vec![0usize; below.len()];
    loop {
        let mut h = HeckeElem::from([(w.clone(), Laurent::one())]);
        for (k, y) in below.iter().enumerate() {
            if !opts[k][idx[k]].is_zero() {
                h.insert((*y).clone(), opts[k][idx[k]].clone());
            }
        }
        if hecke::bar(&h) == h {
            found.push(h);
        }
        let mut k = 0;
        while k < idx.len() {
            idx[k] += 1;
            if idx[k] < opts[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
        if k == idx.len() {
            return found;
        }
    }
}

pub fn hecke_adapter() -> Check {
    let (els, p) = hecke_structure(3)?;
    let b = canonical(&p, Mode::Triangular)?;
    let mut bad = Vec::new();
    for (c, w) in els.iter().enumerate() {
        if brute_force_kl(w, &els) != vec![column(&els, &b.transition, c)] {
            bad.push(format!("S₃ {}", hecke::label(w)));
        }
    }
    let (els4, p4) = hecke_structure(4)?;
    let b4 = canonical(&p4, Mode::Triangular)?;
    let expect = |w: &Perm, special: &[(Perm, Laurent)]| -> HeckeElem {
        els4.iter()
            .filter(|y| bruhat_le(y, w))
            .map(|y| (y.clone(), special.iter().find(|(s, _)| s == y).map(|(_, m)| m.clone()).unwrap_or_else(|| Laurent::q_pow(length(y) as i64 - length(w) as i64))))
            .collect()
    };
    let spots: [(Perm, Vec<(Perm, Laurent)>); 3] = [
        (vec![3, 2, 1, 0], vec![]),
        (vec![1, 2, 0, 3], vec![]),
        // 3412: P = 1 + q below e and s₂
        (vec![2, 3, 0, 1], vec![(vec![0, 1, 2, 3], l(&[(-4, 1), (-2, 1)])), (vec![0, 2, 1, 3], l(&[(-3, 1), (-1, 1)]))]),
    ];
    for (w, special) in &spots {
        let c = els4.iter().position(|x| x == w).expect("element of S4");
        if column(&els4, &b4.transition, c) != expect(w, special) {
            bad.push(format!("S₄ {}", hecke::label(w)));
        }
    }
    Ok(Verdict::new(bad.is_empty(), if bad.is_empty() { "S₃: 6/6 match the exhaustive search; S₄: 4321, 2314, 3412 match".to_string() } else { bad.join("; ") }))
}

// 11 -----------------------------------------------------------------------

pub fn udot() -> Check {
    let d = CartanDatum::a1();
    let mut bad = Vec::new();
    let mut words = 0;
    let mut latest = 0;
    let mut confirmed = 0;
    for a in 0..=3u32 {
        for b in 0..=3u32 {
            for n in -3..=3i64 {
                let mut word = Vec::new();
                if a > 0 {
                    word.push(DivPower::E(a));
                }
                if b > 0 {
                    word.push(DivPower::F(b));
                }
                words += 1;
                let r = udot_stabilize(&d, &word, n, 8, Mode::Gs)?;
                // only bar-fixed, almost-unit vectors are candidates for ±b
                match &r.sign {
                    _ if !r.stabilized => bad.push(format!("{} did not stabilize", r.word)),
                    Some(SignOutcome::Plus { .. }) => confirmed += 1,
                    Some(SignOutcome::PreconditionFailed { .. }) => {}
                    other => bad.push(format!("{}: {other:?}", r.word)),
                }
                if let Some(last) = r.samples.last() {
                    latest = latest.max(last.lambda.max(last.mu));
                }
            }
        }
    }
    Ok(Verdict::new(bad.is_empty(), if bad.is_empty() { format!("{words} words stabilize with λ, μ ≤ {latest}; {confirmed} bar-fixed almost-unit vectors detected as +b, the rest are not almost unit") } else { bad.join("; ") }))
}
