//! Acceptance criteria 1–11: one PASS/FAIL line each; exits nonzero if any fails.

use std::process::ExitCode;
use std::time::Instant;

use canon_verify as v;

fn main() -> ExitCode {
    let t = Instant::now();
    let suite = match v::suite() {
        Ok(s) => s,
        Err(e) => {
            println!("suite construction failed: {e}");
            return ExitCode::FAILURE;
        }
    };
    println!("suite: {} modules built in {:.1?}", suite.len(), t.elapsed());
    let checks: Vec<(&str, Box<dyn Fn() -> Result<v::Verdict, canon_core::Error> + '_>)> = vec![
        ("sl2 norm calibration", Box::new(v::calibration)),
        ("V_Λ⊗V_Λ canonical basis", Box::new(v::vlambda_squared)),
        ("almost orthonormality across the suite", Box::new(|| v::almost_orthonormal(&suite))),
        ("positivity of actions and transitions", Box::new(|| v::positivity(&suite))),
        ("pairing positivity", Box::new(v::pairing_positivity)),
        ("affine sl2 idempotent", Box::new(v::affine_idempotent)),
        ("KLR relation suite", Box::new(v::klr_relations)),
        ("uniqueness under linear extensions", Box::new(|| v::uniqueness(&suite))),
        ("dual bases", Box::new(|| v::dual_bases_check(&suite))),
        ("Hecke adapter", Box::new(v::hecke_adapter)),
        ("U̇ stabilization", Box::new(v::udot)),
    ];
    let mut failed = 0;
    for (k, (name, check)) in checks.iter().enumerate() {
        let t = Instant::now();
        let (pass, detail) = match check() {
            Ok(r) => (r.pass, r.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        failed += usize::from(!pass);
        println!("criterion {:>2} {}: {name} — {detail} [{:.1?}]", k + 1, if pass { "PASS" } else { "FAIL" }, t.elapsed());
    }
    println!("acceptance: {} passed, {failed} failed", checks.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
