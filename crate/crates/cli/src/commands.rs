use std::fs;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use rsumset::constructions::{
    construct_fp_function, construct_fp_matching, construct_fp_unbalanced, construct_interval_corner,
    construct_z_gap, pattern_window,
};
use rsumset::rational::parse_rational;
use rsumset::rectify::{certify_rectifiable_pair, find_rectifying_dilation_of_order, green_ruzsa_check, verify_certificate};
use rsumset::search::{min_restricted_sumset, scan_conjectures, Sample, ScanKind, ScanParams, DEFAULT_BUDGET};
use rsumset::sets::parse_elements;
use rsumset::stability::{claim_expectations, constant_ledger, partition_interval, synthesize, Interval};
use rsumset::verify::{candidate_b_set, is_sidon, r_profile, staircase_witness, sum_bound_check};
use rsumset::{AdditiveSet, IntegerSet, Relation, RelationConstraint, ResidueSet};

use crate::args::*;
use crate::CliError;

/// What a subcommand produced.
pub struct Payload {
    /// The full, recorded result.
    pub result: Value,
    /// What gets printed; defaults to `result`.
    pub display: Option<Value>,
    /// Per-instance rows for CSV output and `--out`.
    pub rows: Option<Vec<Value>>,
    /// A check failed (exit code 1).
    pub failed: bool,
}

impl Payload {
    fn new(result: Value, failed: bool) -> Payload {
        Payload {
            result,
            display: None,
            rows: None,
            failed,
        }
    }
}

pub struct Globals {
    pub seed: Option<u64>,
    pub budget: Option<u64>,
}

fn value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn need<T>(v: Option<T>, flag: &str) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::Usage(format!("missing required flag --{flag}")))
}

fn residues(p: u64, text: &str) -> Result<ResidueSet, CliError> {
    Ok(ResidueSet::from_elements(p, parse_elements(text)?)?)
}

fn integers(text: &str) -> Result<IntegerSet, CliError> {
    Ok(IntegerSet::new(parse_elements(text)?))
}

pub fn execute(command: &Command, g: &Globals) -> Result<Payload, CliError> {
    match command {
        Command::Construct(a) => construct(a),
        Command::Minimize(a) => minimize(a, g),
        Command::Scan(a) => scan(a, g),
        Command::Verify(a) => verify(a, g),
        Command::Rectify(a) => rectify(a),
        Command::Stability(a) => stability(a, g),
        Command::Replay(_) => unreachable!("replay is handled by the caller"),
    }
}

fn construct(a: &ConstructArgs) -> Result<Payload, CliError> {
    if a.family == FamilyArg::Pattern {
        let w = pattern_window(need(a.n, "n")?)?;
        let ok = w.validate();
        return Ok(Payload::new(json!({"family": "pattern", "window": value(&w), "valid": ok}), !ok));
    }
    let out = match a.family {
        FamilyArg::Corner => construct_interval_corner(need(a.n, "n")?, need(a.d, "d")?)?,
        FamilyArg::Zgap => construct_z_gap(need(a.n, "n")?, need(a.d, "d")?)?,
        FamilyArg::Fpfun => construct_fp_function(need(a.p, "p")?, need(a.k, "k")?, need(a.ell, "ell")?)?,
        FamilyArg::Fpmatch => construct_fp_matching(need(a.p, "p")?)?,
        FamilyArg::Fpunb => {
            let eps = parse_rational(need(a.eps.as_deref(), "eps")?)?;
            construct_fp_unbalanced(need(a.p, "p")?, eps)?
        }
        FamilyArg::Pattern => unreachable!(),
    };
    Ok(Payload::new(value(&out), !out.audit_report.passed))
}

fn constraint(text: &str, d: Option<usize>) -> Result<RelationConstraint, CliError> {
    let text = match text {
        "degree-b" | "degree-both" => format!("{text}:{}", need(d, "d")?),
        other => other.to_string(),
    };
    Ok(text.parse()?)
}

fn minimize(a: &MinimizeArgs, g: &Globals) -> Result<Payload, CliError> {
    let c = constraint(&a.constraint, a.d)?;
    let budget = g.budget.unwrap_or(DEFAULT_BUDGET);
    let (res, instance) = match a.p {
        Some(p) => {
            let (sa, sb) = (residues(p, &a.a)?, residues(p, &a.b)?);
            let inst = json!({"p": p, "A": sa.elements(), "B": sb.elements()});
            (min_restricted_sumset(&sa, &sb, c, budget)?, inst)
        }
        None => {
            let (sa, sb) = (integers(&a.a)?, integers(&a.b)?);
            let inst = json!({"A": sa.elements(), "B": sb.elements()});
            (min_restricted_sumset(&sa, &sb, c, budget)?, inst)
        }
    };
    let mut v = value(&res);
    v["constraint"] = json!(c.to_string());
    v["instance"] = instance;
    Ok(Payload::new(v, false))
}

fn scan(a: &ScanArgs, g: &Globals) -> Result<Payload, CliError> {
    let kind: ScanKind = a.kind.parse()?;
    let universe = if kind.is_integer() {
        need(a.n.or(a.p), "n")?
    } else {
        need(a.p, "p")?
    };
    let mut params = ScanParams::new(kind, universe);
    if let Some(d) = a.d {
        params.d = d;
    }
    if let Some(k) = a.k {
        params.k = k;
    }
    params.budget = g.budget.unwrap_or(DEFAULT_BUDGET);
    if let Some(count) = a.sample {
        let seed = g
            .seed
            .ok_or_else(|| CliError::Usage("--sample requires --seed".into()))?;
        params.sample = Some(Sample { count, seed });
    }
    let report = scan_conjectures(&params)?;
    let failed = report.violations > 0 || report.sidon_failures > 0;
    let rows: Vec<Value> = report.rows.iter().map(value).collect();
    if let Some(path) = &a.out {
        let mut text = String::new();
        for row in &rows {
            text.push_str(&serde_json::to_string(row).expect("serializable"));
            text.push('\n');
        }
        fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    }
    Ok(Payload {
        result: value(&report),
        display: Some(value(&report.summary())),
        rows: Some(rows),
        failed,
    })
}

fn verify(a: &VerifyArgs, g: &Globals) -> Result<Payload, CliError> {
    match a.what {
        VerifyWhat::Rprofile => {
            let p = need(a.p, "p")?;
            let (sa, sf) = (residues(p, need(a.a.as_deref(), "a")?)?, residues(p, need(a.f.as_deref(), "f")?)?);
            let prof = r_profile(&sa, &sf)?;
            let mut v = value(&prof);
            v["totalHolds"] = json!(prof.total_holds());
            v["weightedHolds"] = json!(prof.weighted_holds(sa.len()));
            Ok(Payload::new(v, false))
        }
        VerifyWhat::Sidon => {
            let p = need(a.p, "p")?;
            let sf = residues(p, need(a.f.as_deref(), "f")?)?;
            Ok(Payload::new(json!({"p": p, "F": sf.elements(), "sidon": is_sidon(&sf)}), false))
        }
        VerifyWhat::Candidates => {
            let p = need(a.p, "p")?;
            let (sa, sf) = (residues(p, need(a.a.as_deref(), "a")?)?, residues(p, need(a.f.as_deref(), "f")?)?);
            let d = need(a.d, "d")?;
            let cands = candidate_b_set(&sa, &sf, d)?;
            let expected = r_profile(&sa, &sf)?.at_most(d);
            let ok = cands.len() == expected;
            Ok(Payload::new(
                json!({"p": p, "D": d, "candidates": cands.elements(), "size": cands.len(), "profileCount": expected, "agrees": ok}),
                !ok,
            ))
        }
        VerifyWhat::SumBound => {
            let p = need(a.p, "p")?;
            let (sa, sb) = (residues(p, need(a.a.as_deref(), "a")?)?, residues(p, need(a.b.as_deref(), "b")?)?);
            let verdict = sum_bound_check(&sa, &sb, a.k.unwrap_or(2), g.budget.unwrap_or(DEFAULT_BUDGET))?;
            let failed = verdict.hypothesis_holds && !verdict.passes;
            Ok(Payload::new(value(&verdict), failed))
        }
        VerifyWhat::Staircase => {
            let (sa, sb) = (integers(need(a.a.as_deref(), "a")?)?, integers(need(a.b.as_deref(), "b")?)?);
            let r = Relation::parse(a.r.as_deref().unwrap_or(""))?;
            let w = staircase_witness(&sa, &sb, &r, a.d)?;
            let failed = (w.elements.len() as i64) < w.guaranteed;
            Ok(Payload::new(value(&w), failed))
        }
    }
}

fn rectify(a: &RectifyArgs) -> Result<Payload, CliError> {
    let x = residues(a.p, &a.set)?;
    let (cert, y) = match &a.set_b {
        Some(text) => {
            let y = residues(a.p, text)?;
            (certify_rectifiable_pair(&x, &y)?, y)
        }
        None => (find_rectifying_dilation_of_order(&x, a.order)?, x.clone()),
    };
    let mut v = match &cert {
        Some(c) => {
            let ok = verify_certificate(&x, &y, c);
            json!({
                "found": true,
                "t": c.t,
                "image": c.image_a,
                "imageB": c.image_b,
                "verified": ok,
                "certificate": value(c),
            })
        }
        None => json!({"found": false}),
    };
    if let Some(k) = a.gr {
        v["greenRuzsa"] = value(&green_ruzsa_check(&x, k)?);
    }
    let failed = v["found"] == json!(true) && v["verified"] != json!(true);
    Ok(Payload::new(v, failed))
}

fn stability(a: &StabilityArgs, g: &Globals) -> Result<Payload, CliError> {
    if a.ledger {
        let eps = parse_rational(a.eps.as_deref().unwrap_or("1/2"))?;
        let gamma = parse_rational(a.gamma.as_deref().unwrap_or("1/1024"))?;
        let ledger = constant_ledger(eps, gamma, a.t.unwrap_or(1024), a.d.unwrap_or(1))?;
        return Ok(Payload::new(value(&ledger), false));
    }
    if a.synthesize {
        let p = a.p.unwrap_or(8209);
        let first = g.seed.unwrap_or(0);
        // Validate once before fanning out.
        synthesize(p, a.b_size, a.r, first)?;
        let results: Vec<Result<Value, CliError>> = (first..first + a.count.max(1))
            .into_par_iter()
            .map(|seed| {
                let inst = synthesize(p, a.b_size, a.r, seed)?;
                let (outcome, report) = inst.evaluate()?;
                let ok = outcome.is_found() && report.all_hold;
                Ok(json!({
                    "seed": seed,
                    "sizeA": inst.a.len(),
                    "I": inst.i,
                    "J": inst.j,
                    "partition": value(&outcome),
                    "claims": value(&report),
                    "ok": ok,
                }))
            })
            .collect();
        let rows = results.into_iter().collect::<Result<Vec<_>, _>>()?;
        let all_ok = rows.iter().all(|r| r["ok"] == json!(true));
        let v = json!({
            "p": p, "bSize": a.b_size, "r": a.r, "count": rows.len(),
            "allOk": all_ok, "instances": rows,
        });
        return Ok(Payload::new(v, !all_ok));
    }
    let p = need(a.p, "p")?;
    let sa = residues(p, need(a.a.as_deref(), "a")?)?;
    let sb = residues(p, need(a.b.as_deref(), "b")?)?;
    let i = Interval::new(need(a.i_start, "i-start")?, need(a.i_len, "i-len")?);
    let j = Interval::new(need(a.j_start, "j-start")?, need(a.j_len, "j-len")?);
    let outcome = partition_interval(&sa, i, j)?;
    let report = claim_expectations(&sa, outcome.partition(), &sb, need(a.ql, "ql")?, need(a.qr, "qr")?, a.r)?;
    let failed = !outcome.is_found() || (report.hypotheses_hold && !report.all_hold);
    Ok(Payload::new(
        json!({"partition": value(&outcome), "claims": value(&report)}),
        failed,
    ))
}
