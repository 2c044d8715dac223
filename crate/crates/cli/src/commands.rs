//! Subcommand pipelines. Each writes its files into the output directory and
//! returns the list of property violations it found.

use std::collections::BTreeMap;
use std::path::Path;

use canon_core::cartan::{CartanDatum, Weight};
use canon_core::klr::{
    affine_sl2_idempotent_check, affine_sum_of_squares, homogeneity_report, verify_relations, ActionMode, Poly, PolyRep, QijChoice,
    RelationReport,
};
use canon_core::precanon::{
    audit, balanced_positive_report, canonical, canonical_triangular, check_two_prime_equivalence, dual_bases, dual_structure, hecke, Audit,
    BalancedPositiveReport, CanonicalBasis, Mode, PrecanonicalStructure, SignOutcome, NegativityEquivalence,
};
use canon_core::strings::{action_matrix, canonical_block, canonical_in_pure_tensors, CanonicalBlock};
use canon_core::uq::udot::{udot_stabilize, UdotReport};
use canon_core::uq::{Gen, TensorModule};
use canon_core::{LMat, Laurent, RMat};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::{JobConfig, DEFAULT_DEPTH, DEFAULT_TRIALS, HECKE_RANK_CAP};
use crate::output::{config_hash, write_json, CsvTable, Dot};
use crate::CliError;

/// Embedded in every report.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Header {
    pub command: String,
    pub config_hash: String,
    pub config: JobConfig,
    pub truncation: usize,
    pub seed: u64,
}

impl Header {
    /// The output directory is not part of the job, so it is left out of the hash.
    fn new(command: &str, cfg: &JobConfig) -> Self {
        let cfg = &JobConfig { out: None, ..cfg.clone() };
        Self { command: command.into(), config_hash: config_hash(cfg), config: cfg.clone(), truncation: cfg.truncation(), seed: cfg.seed() }
    }
}

pub type Violations = Vec<String>;

/// Evaluate `f` on every item across a scoped worker pool; results keep input order.
fn par_map<T: Sync, U: Send>(items: &[T], f: impl Fn(&T) -> Result<U, CliError> + Sync) -> Result<Vec<U>, CliError> {
    let workers = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1).min(items.len().max(1));
    let chunk = items.len().div_ceil(workers).max(1);
    let f = &f;
    let parts: Vec<Result<Vec<U>, CliError>> = std::thread::scope(|s| {
        let handles: Vec<_> = items.chunks(chunk).map(|c| s.spawn(move || c.iter().map(f).collect())).collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    });
    let mut out = Vec::with_capacity(items.len());
    for p in parts {
        out.extend(p?);
    }
    Ok(out)
}

fn to_laurent(m: &RMat, what: &str) -> Result<LMat, CliError> {
    m.to_laurent().ok_or_else(|| CliError::Core(canon_core::Error::NotIntegral(what.into())))
}

// ---------------------------------------------------------------------------
// tensor

#[derive(Serialize)]
pub struct WeightReport {
    pub weight: Vec<i64>,
    pub dim: usize,
    pub nodes: Vec<usize>,
    pub labels: Vec<String>,
    pub tuples_examined: usize,
    pub iterations: usize,
    pub linear_extension: Vec<usize>,
    pub structure: PrecanonicalStructure,
    pub transition: LMat,
    pub canonical_gram: LMat,
    pub in_pure_tensors: LMat,
    pub audit: Audit,
    pub negativity_equivalence: NegativityEquivalence,
    pub dual_identity_holds: bool,
    pub positivity: BalancedPositiveReport,
    pub pairing_nonnegative: bool,
}

#[derive(Serialize)]
pub struct ActionReport {
    pub generator: String,
    pub from: Vec<i64>,
    pub to: Vec<i64>,
    pub matrix: LMat,
    pub nonnegative: bool,
}

#[derive(Serialize)]
pub struct TensorReport {
    pub header: Header,
    pub cartan: String,
    pub weights: Vec<Vec<i64>>,
    pub eps: Vec<i8>,
    pub mode: Mode,
    pub canonical_vectors: usize,
    pub weight_spaces: Vec<WeightReport>,
    pub actions: Vec<ActionReport>,
    pub violations: Violations,
}

fn build_blocks(cfg: &JobConfig) -> Result<(TensorModule, Vec<CanonicalBlock>), CliError> {
    let datum = cfg.datum_or("A1")?;
    let weights = cfg.weight_list(&datum)?;
    let t = TensorModule::new(&datum, &weights, cfg.depth.unwrap_or(DEFAULT_DEPTH))?;
    let spaces = t.weight_spaces();
    let targets: Vec<Weight> = match &cfg.targets {
        None => spaces.keys().cloned().collect(),
        Some(ts) => ts
            .iter()
            .map(|w| {
                let w = Weight(w.clone());
                if spaces.contains_key(&w) {
                    Ok(w)
                } else {
                    Err(CliError::Config(format!("target weight {:?} is not a weight of the module", w.0)))
                }
            })
            .collect::<Result<_, _>>()?,
    };
    let mode = cfg.mode();
    let nodes = cfg.node_sequence(&datum);
    let blocks = par_map(&targets, |w| Ok(canonical_block(&t, w, nodes.as_deref(), mode)?))?;
    Ok((t, blocks))
}

fn weight_report(t: &TensorModule, b: &CanonicalBlock, mode: Mode, v: &mut Violations) -> Result<WeightReport, CliError> {
    let p = &b.structure;
    let a = audit(p, &b.basis.transition);
    let w = &b.sel.weight.0;
    if !a.passes(mode) {
        v.push(format!("weight {w:?}: audit failed: {}", a.witnesses.join("; ")));
    }
    let pure = to_laurent(&canonical_in_pure_tensors(t, b)?, "pure-tensor coordinates")?;
    for (r, c, x) in pure.entries() {
        let ok = if r == c { x.is_one() } else { x.in_neg_part() && x.all_coeffs_nonneg() };
        if !ok {
            v.push(format!("weight {w:?}: b_{c} has coefficient {x} on s_{r}"));
        }
    }
    let duals = dual_bases(p, &b.basis)?;
    if !duals.identity_holds {
        v.push(format!("weight {w:?}: dual Gram identity fails"));
    }
    let pairing_nonnegative = p.gram.entries().all(|(_, _, x)| x.all_coeffs_nonneg());
    if !pairing_nonnegative {
        v.push(format!("weight {w:?}: negative coefficient in the standard pairing"));
    }
    Ok(WeightReport {
        weight: w.clone(),
        dim: b.sel.dim(),
        nodes: b.sel.nodes.clone(),
        labels: p.labels.clone(),
        tuples_examined: b.sel.examined,
        iterations: b.basis.iterations,
        linear_extension: b.basis.linear_extension.clone(),
        structure: p.clone(),
        transition: b.basis.transition.clone(),
        canonical_gram: b.basis.gram(p),
        in_pure_tensors: pure,
        audit: a,
        negativity_equivalence: check_two_prime_equivalence(p, &b.basis),
        dual_identity_holds: duals.identity_holds,
        positivity: balanced_positive_report(p, &b.basis)?,
        pairing_nonnegative,
    })
}

pub fn tensor(cfg: &JobConfig, out: &Path) -> Result<Violations, CliError> {
    let (t, blocks) = build_blocks(cfg)?;
    let mode = cfg.mode();
    let mut v = Violations::new();
    let mut reports = Vec::new();
    for b in &blocks {
        reports.push(weight_report(&t, b, mode, &mut v)?);
    }
    let by_weight: BTreeMap<&Weight, &CanonicalBlock> = blocks.iter().map(|b| (&b.sel.weight, b)).collect();
    let mut actions = Vec::new();
    for b in &blocks {
        for i in 0..t.datum.rank() {
            let a = t.datum.simple_root(i);
            for (g, name, to) in [(Gen::E(i), format!("E{i}"), b.sel.weight.add(&a)), (Gen::F(i), format!("F{i}"), b.sel.weight.sub(&a))] {
                let Some(dst) = by_weight.get(&to) else { continue };
                let m = to_laurent(&action_matrix(&t, &g, b, dst)?, "action matrix")?;
                let nonnegative = m.entries().all(|(_, _, x)| x.all_coeffs_nonneg());
                if !nonnegative {
                    v.push(format!("{name} from weight {:?} has a negative coefficient", b.sel.weight.0));
                }
                actions.push(ActionReport { generator: name, from: b.sel.weight.0.clone(), to: to.0, matrix: m, nonnegative });
            }
        }
    }
    let mut csv = CsvTable::new();
    let mut grams = CsvTable::new();
    let mut dot = Dot::new();
    for r in &reports {
        let name = format!("{:?}", r.weight);
        csv.push_matrix(&name, &r.labels, &r.transition);
        grams.push_matrix(&name, &r.labels, &r.structure.gram);
        dot.push(&name, &r.structure);
    }
    let report = TensorReport {
        header: Header::new("tensor", cfg),
        cartan: t.datum.name.clone(),
        weights: t.weights.iter().map(|w| w.0.clone()).collect(),
        eps: t.eps.clone(),
        mode,
        canonical_vectors: reports.iter().map(|r| r.dim).sum(),
        weight_spaces: reports,
        actions,
        violations: v.clone(),
    };
    write_json(out, "report.json", &report)?;
    csv.write(out, "transitions.csv")?;
    grams.write(out, "grams.csv")?;
    dot.write(out, "order.dot")?;
    Ok(v)
}

// ---------------------------------------------------------------------------
// dual

#[derive(Serialize)]
pub struct DualBlockReport {
    pub name: String,
    pub labels: Vec<String>,
    pub transition: LMat,
    pub a_star: RMat,
    pub b_star: RMat,
    pub gram_b_star: RMat,
    pub identity_holds: bool,
    pub dual_structure: PrecanonicalStructure,
    pub positivity: BalancedPositiveReport,
}

#[derive(Serialize)]
pub struct DualReport {
    pub header: Header,
    pub mode: Mode,
    pub blocks: Vec<DualBlockReport>,
    pub violations: Violations,
}

fn dual_block(name: String, p: &PrecanonicalStructure, b: &CanonicalBasis, v: &mut Violations) -> Result<DualBlockReport, CliError> {
    let d = dual_bases(p, b)?;
    if !d.identity_holds {
        v.push(format!("{name}: dual Gram identity fails"));
    }
    let positivity = balanced_positive_report(p, b)?;
    if let Some(dp) = &positivity.dual {
        if !dp.confirmed {
            v.push(format!("{name}: primal balanced positive but dual is not: {}", positivity.witnesses.join("; ")));
        }
    }
    Ok(DualBlockReport {
        name,
        labels: p.labels.clone(),
        transition: b.transition.clone(),
        a_star: d.a_star,
        b_star: d.b_star,
        gram_b_star: d.gram_b_star,
        identity_holds: d.identity_holds,
        dual_structure: dual_structure(p)?,
        positivity,
    })
}

pub fn dual(cfg: &JobConfig, out: &Path) -> Result<Violations, CliError> {
    let mode = cfg.mode();
    let mut v = Violations::new();
    let mut blocks = Vec::new();
    if let Some(path) = &cfg.structure {
        if cfg.weights.is_some() {
            return Err(CliError::Config("give either \"structure\" or \"weights\", not both".into()));
        }
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let p: PrecanonicalStructure = serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let b = canonical(&p, mode)?;
        blocks.push(dual_block(path.display().to_string(), &p, &b, &mut v)?);
    } else {
        let (_, bs) = build_blocks(cfg)?;
        for b in &bs {
            blocks.push(dual_block(format!("{:?}", b.sel.weight.0), &b.structure, &b.basis, &mut v)?);
        }
    }
    let mut dot = Dot::new();
    for b in &blocks {
        dot.push(&b.name, &b.dual_structure);
    }
    write_json(out, "dual.json", &DualReport { header: Header::new("dual", cfg), mode, blocks, violations: v.clone() })?;
    dot.write(out, "dual_order.dot")?;
    Ok(v)
}

// ---------------------------------------------------------------------------
// hecke

#[derive(Serialize)]
pub struct KlEntry {
    pub x: String,
    pub w: String,
    /// `P_{x,w}` in its own variable (exponent = power of `q²`).
    pub polynomial: Laurent,
}

#[derive(Serialize)]
pub struct HeckeReport {
    pub header: Header,
    pub rank: usize,
    pub mode: Mode,
    pub labels: Vec<String>,
    pub transition: LMat,
    pub iterations: usize,
    pub kl_polynomials: Vec<KlEntry>,
    pub audit: Audit,
    pub positivity: BalancedPositiveReport,
    pub violations: Violations,
}

/// `m_{x,w} = q^{ℓ(x)−ℓ(w)} P_{x,w}(q²)`.
fn kl_polynomial(m: &Laurent, lx: usize, lw: usize) -> Option<Laurent> {
    let shifted = m.shift(lw as i64 - lx as i64);
    let mut terms = Vec::new();
    for (e, c) in shifted.terms() {
        if e % 2 != 0 {
            return None;
        }
        terms.push((e / 2, c.clone()));
    }
    Some(Laurent::from_terms(terms))
}

pub fn hecke(cfg: &JobConfig, out: &Path) -> Result<Violations, CliError> {
    let rank = cfg.rank.unwrap_or(3);
    if rank == 0 || rank > HECKE_RANK_CAP {
        return Err(CliError::Config(format!("symmetric group rank {rank} outside 1..={HECKE_RANK_CAP}")));
    }
    let (els, p) = hecke::hecke_structure(rank)?;
    let b = canonical_triangular(&p)?;
    let mut v = Violations::new();
    let a = audit(&p, &b.transition);
    if !a.passes(Mode::Triangular) {
        v.push(format!("audit failed: {}", a.witnesses.join("; ")));
    }
    let mut kl = Vec::new();
    for (c, w) in els.iter().enumerate() {
        for (r, x) in els.iter().enumerate() {
            let m = b.transition.get(r, c);
            if m.is_zero() {
                continue;
            }
            match kl_polynomial(m, hecke::length(x), hecke::length(w)) {
                Some(poly) => {
                    if !poly.all_coeffs_nonneg() {
                        v.push(format!("P_{{{},{}}} = {poly} has a negative coefficient", hecke::label(x), hecke::label(w)));
                    }
                    kl.push(KlEntry { x: hecke::label(x), w: hecke::label(w), polynomial: poly });
                }
                None => v.push(format!("m_{{{},{}}} = {m} is not of the form q^(l(x)-l(w)) P(q^2)", hecke::label(x), hecke::label(w))),
            }
        }
    }
    let positivity = balanced_positive_report(&p, &b)?;
    if positivity.dual.as_ref().is_some_and(|d| !d.confirmed) {
        v.push("dual structure is not balanced positive".into());
    }
    let mut csv = CsvTable::new();
    csv.push_matrix(&format!("S{rank}"), &p.labels, &b.transition);
    csv.write(out, "transitions.csv")?;
    let mut dot = Dot::new();
    dot.push(&format!("S{rank}"), &p);
    dot.write(out, "order.dot")?;
    let report = HeckeReport {
        header: Header::new("hecke", cfg),
        rank,
        mode: Mode::Triangular,
        labels: p.labels.clone(),
        transition: b.transition.clone(),
        iterations: b.iterations,
        kl_polynomials: kl,
        audit: a,
        positivity,
        violations: v.clone(),
    };
    write_json(out, "report.json", &report)?;
    Ok(v)
}

// ---------------------------------------------------------------------------
// klr-selftest

#[derive(Serialize)]
pub struct RelationRun {
    pub cartan: String,
    pub action: ActionMode,
    pub corrupted: bool,
    pub relations: serde_json::Value,
    pub homogeneity_failures: Vec<String>,
    pub pass: bool,
}

#[derive(Serialize)]
pub struct KlrReport {
    pub header: Header,
    pub trials: usize,
    pub warnings: Vec<String>,
    pub runs: Vec<RelationRun>,
    pub affine_geometric: serde_json::Value,
    pub affine_sum_of_squares: serde_json::Value,
    pub violations: Violations,
}

fn relation_pass(r: &RelationReport) -> bool {
    r.relations.values().all(|o| o.failed == 0)
}

pub fn klr_selftest(cfg: &JobConfig, out: &Path) -> Result<Violations, CliError> {
    let trials = cfg.trials.unwrap_or(DEFAULT_TRIALS);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed());
    let mut warnings = Vec::new();
    if trials == 0 {
        warnings.push("zero trials: relation checks are vacuous".into());
    }
    let data: Vec<CartanDatum> = match &cfg.cartan {
        Some(c) => vec![c.datum()?],
        None => vec![CartanDatum::a1(), CartanDatum::a2(), CartanDatum::affine_a1()],
    };
    let mut v = Violations::new();
    let mut runs = Vec::new();
    for d in &data {
        let choice = QijChoice::geometric_default(d)?;
        let homog = homogeneity_report(d, &choice);
        for mode in [ActionMode::Factored, ActionMode::Generic] {
            let rep = PolyRep::new(d, choice.clone(), mode);
            let r = verify_relations(&rep, trials, &mut rng)?;
            let pass = relation_pass(&r) && homog.is_empty();
            if !pass {
                v.push(format!("{} ({mode:?}): {}", d.name, witness(&r, &homog)));
            }
            runs.push(RelationRun { cartan: d.name.clone(), action: mode, corrupted: false, relations: json(&r), homogeneity_failures: homog.clone(), pass });
        }
    }
    if cfg.corrupt_q.unwrap_or(false) {
        let d = CartanDatum::a2();
        let bad = QijChoice::geometric_default(&d)?.with_q(0, 1, Poly::bivariate(&[(2, 0, 1), (1, 1, 1), (0, 2, 1)]));
        let homog = homogeneity_report(&d, &bad);
        let r = verify_relations(&PolyRep::new(&d, bad, ActionMode::Factored), trials, &mut rng)?;
        let pass = relation_pass(&r) && homog.is_empty();
        if !pass {
            v.push(format!("corrupted Q on A2: {}", witness(&r, &homog)));
        }
        runs.push(RelationRun { cartan: d.name.clone(), action: ActionMode::Factored, corrupted: true, relations: json(&r), homogeneity_failures: homog, pass });
    }
    let aff = CartanDatum::affine_a1();
    let geo = affine_sl2_idempotent_check(&PolyRep::new(&aff, QijChoice::geometric_default(&aff)?, ActionMode::Factored), 3, 4)?;
    if geo.quasi_idempotent_constant != Some(2) || geo.degree != 0 {
        v.push(format!("affine sl2 with geometric Q: expected x² = 2x in degree 0, got {geo:?}"));
    }
    let sos = affine_sl2_idempotent_check(&PolyRep::new(&aff, affine_sum_of_squares(), ActionMode::Generic), 3, 4)?;
    if sos.nilpotency_order.is_none() || sos.quasi_idempotent_constant.is_some() {
        v.push(format!("affine sl2 with Q = u²+v²: expected nilpotent, got {sos:?}"));
    }
    let report = KlrReport {
        header: Header::new("klr-selftest", cfg),
        trials,
        warnings,
        runs,
        affine_geometric: json(&geo),
        affine_sum_of_squares: json(&sos),
        violations: v.clone(),
    };
    write_json(out, "report.json", &report)?;
    Ok(v)
}

fn json<T: Serialize>(x: &T) -> serde_json::Value {
    serde_json::to_value(x).expect("report serializes")
}

fn witness(r: &RelationReport, homog: &[String]) -> String {
    let mut parts: Vec<String> = r
        .relations
        .iter()
        .filter(|(_, o)| o.failed > 0)
        .map(|(n, o)| format!("{n} failed {}/{}{}", o.failed, o.checked, o.witness.as_ref().map(|w| format!(" ({w})")).unwrap_or_default()))
        .collect();
    parts.extend(homog.iter().map(|h| format!("inhomogeneous: {h}")));
    parts.join("; ")
}

// ---------------------------------------------------------------------------
// udot

#[derive(Serialize)]
pub struct UdotCliReport {
    pub header: Header,
    pub mode: Mode,
    pub n: i64,
    pub bound: i64,
    pub words: Vec<UdotReport>,
    pub violations: Violations,
}

pub fn udot(cfg: &JobConfig, out: &Path) -> Result<Violations, CliError> {
    let datum = cfg.datum_or("A1")?;
    if datum.rank() != 1 || datum.c[0][0] != 2 || !datum.finite_type {
        return Err(CliError::Config(format!("udot requires type A1, got {}", datum.name)));
    }
    let mode = cfg.mode();
    let n = cfg.n.unwrap_or(0);
    let bound = cfg.bound.unwrap_or(8);
    let words = cfg.words.clone().unwrap_or_else(|| vec![vec![]]);
    let reports = par_map(&words, |w| Ok(udot_stabilize(&datum, w, n, bound, mode)?))?;
    let mut v = Violations::new();
    for r in &reports {
        if !r.stabilized {
            v.push(format!("{}: no stabilization with λ, μ ≤ {bound}", r.word));
        }
        if let Some(SignOutcome::Minus { .. } | SignOutcome::NotSigned { .. }) = &r.sign {
            v.push(format!("{}: bar-fixed almost-unit vector is not a (+1)-canonical vector", r.word));
        }
    }
    write_json(out, "report.json", &UdotCliReport { header: Header::new("udot", cfg), mode, n, bound, words: reports, violations: v.clone() })?;
    Ok(v)
}
