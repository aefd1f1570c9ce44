//! Acceptance run: drives the `asymod` binary on the fixtures and the
//! random suites and prints one PASS/FAIL line per criterion.

use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use asymod_core::syntax::{parse_problem, render_problem};
use serde_json::Value;

// time limits, in seconds
const FIXTURE_LIMIT: f64 = 1.0;
const EQUIVALENCE_LIMIT: f64 = 60.0;
const NEWMAN_LIMIT: f64 = 120.0;
const FULL_LIMIT: f64 = 5.0;

const SUITE_COUNT: &str = "300";
const SYMMETRIC_COUNT: usize = 100;
const LOOP_STEPS: usize = 50;

const FIXTURES: [&str; 7] = ["arithmetic", "failure", "loop", "remark", "conjunction", "quantifier", "symmetric"];

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(format!("{name}.problem"))
}

struct Run {
    json: Value,
    code: i32,
    elapsed: Duration,
}

#[derive(Default)]
struct Ctx {
    /// Problem files found in reports, to be re-checked.
    emitted: Vec<(String, String)>,
    elapsed: Duration,
}

impl Ctx {
    fn asymod(&mut self, args: &[&str]) -> Run {
        let start = Instant::now();
        let out = Command::new(env!("CARGO_BIN_EXE_asymod"))
            .args(["--format", "json"])
            .args(args)
            .output()
            .expect("binary runs");
        let elapsed = start.elapsed();
        self.elapsed += elapsed;
        let json: Value = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
        for w in json["witnesses"].as_array().into_iter().flatten() {
            if let Some(p) = w["problem"].as_str() {
                self.emitted.push((format!("{} / {}", args.join(" "), w["description"]), p.to_string()));
            }
        }
        Run { json, code: out.status.code().unwrap_or(-1), elapsed }
    }

    fn on(&mut self, name: &str, args: &[&str]) -> Run {
        let path = fixture(name);
        let mut all = args.to_vec();
        let path = path.to_str().expect("utf-8 path").to_string();
        all.extend(["--problem", &path]);
        self.asymod(&all)
    }
}

type Check = Result<String, String>;

fn expect(cond: bool, what: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what.into())
    }
}

fn verdict(r: &Run, v: &str, code: i32) -> Result<(), String> {
    expect(
        r.json["verdict"] == v && r.code == code,
        format!("expected {v} (exit {code}), got {} (exit {})", r.json["verdict"], r.code),
    )
}

fn within(elapsed: Duration, limit: f64) -> Result<(), String> {
    expect(elapsed.as_secs_f64() < limit, format!("took {:.2} s, limit {limit} s", elapsed.as_secs_f64()))
}

fn strs(v: &Value) -> Vec<String> {
    v.as_array().into_iter().flatten().filter_map(|x| x.as_str().map(String::from)).collect()
}

fn descriptions(r: &Run, kind: &str) -> Vec<String> {
    r.json["witnesses"]
        .as_array()
        .into_iter()
        .flatten()
        .filter(|w| w["kind"] == kind)
        .filter_map(|w| w["description"].as_str().map(String::from))
        .collect()
}

fn first_problem(r: &Run) -> String {
    r.json["witnesses"]
        .as_array()
        .into_iter()
        .flatten()
        .find_map(|w| w["problem"].as_str().map(String::from))
        .unwrap_or_default()
}

fn arithmetic(ctx: &mut Ctx) -> Check {
    let text = std::fs::read_to_string(fixture("arithmetic")).expect("fixture");
    let problem = parse_problem(&text).map_err(|e| e.to_string())?;
    expect(problem.system.rules().len() == 4, "four rules")?;
    let r = ctx.on("arithmetic", &["check", "--witnesses"]);
    verdict(&r, "valid", 0)?;
    expect(r.json["details"]["proof"]["nodes"] == 3, "a three-rule proof")?;
    for tag in ["(exists-right", "(forall-left", "(axiom"] {
        expect(text.contains(tag), format!("proof uses {tag}"))?;
    }
    let side = "eq(times(2, 2), 4) ->* eq(4, 4)";
    expect(descriptions(&r, "reduction").iter().any(|d| d.ends_with(side)), format!("witness {side}"))?;
    within(r.elapsed, FIXTURE_LIMIT)?;
    Ok(format!("valid, side condition {side}"))
}

fn failure(ctx: &mut Ctx) -> Check {
    let asym = ctx.on("failure", &["prove-atomic", "--mode", "asym"]);
    verdict(&asym, "provable", 0)?;
    expect(asym.json["details"]["proof"]["cuts"] == 1, "one cut")?;
    expect(first_problem(&asym).contains("(cut {P(a)}"), "cut on P(a)")?;

    let cutfree = ctx.on("failure", &["prove-atomic", "--mode", "cutfree"]);
    verdict(&cutfree, "not-provable", 1)?;
    expect(cutfree.json["complete"] == true, "complete closures")?;
    expect(!descriptions(&cutfree, "certificate").is_empty(), "a certificate")?;

    let newman = ctx.on("failure", &["eliminate", "--engine", "newman"]);
    verdict(&newman, "failed", 1)?;
    let divergence = "P(b) <-1 P(a) ->1 P(b')";
    expect(descriptions(&newman, "divergence") == [divergence], format!("divergence {divergence}"))?;

    let conf = ctx.on("failure", &["analyze", "--check", "confluence"]);
    verdict(&conf, "fails", 1)?;
    let d = &conf.json["details"];
    let mut sides = [d["left"].as_str().unwrap_or(""), d["right"].as_str().unwrap_or("")];
    sides.sort();
    expect(d["seed"] == "a" && sides == ["b", "b'"], format!("witness (a, b, b'), got {d}"))?;

    let total = asym.elapsed + cutfree.elapsed + newman.elapsed + conf.elapsed;
    within(total, FIXTURE_LIMIT)?;
    Ok("one-cut proof, not cut-free provable, stuck, witness (a, b, b')".into())
}

/// Split cut propositions of a trace, in order.
fn split_cuts(trace: &Value) -> Vec<String> {
    trace["steps"]
        .as_array()
        .into_iter()
        .flatten()
        .filter(|s| s["event"]["kind"] == "split")
        .filter_map(|s| s["cut"].as_str().map(String::from))
        .collect()
}

fn alternates(cuts: &[String]) -> bool {
    cuts.len() >= 2
        && cuts.iter().enumerate().all(|(i, c)| c == if i % 2 == 0 { "P(a)" } else { "P(b)" })
}

fn scripted_loop(ctx: &mut Ctx, name: &str) -> Result<Run, String> {
    let steps = LOOP_STEPS.to_string();
    let r = ctx.on(name, &["eliminate", "--engine", "newman", "--policy", "scripted", "--steps", &steps]);
    verdict(&r, "budget-exhausted", 2)?;
    let n = r.json["trace"]["steps"].as_array().map_or(0, Vec::len);
    expect(n == LOOP_STEPS, format!("{n} steps taken"))?;
    let cuts = split_cuts(&r.json["trace"]);
    expect(alternates(&cuts), format!("split cuts alternate P(a)/P(b): {cuts:?}"))?;
    Ok(r)
}

fn looping(ctx: &mut Ctx) -> Check {
    let lc = ctx.on("loop", &["analyze", "--check", "local-confluence"]);
    verdict(&lc, "holds", 0)?;
    let term = ctx.on("loop", &["analyze", "--check", "termination"]);
    verdict(&term, "fails", 1)?;
    let cycle = strs(&term.json["details"]["cycle"]);
    expect(cycle == ["a", "b", "a"], format!("cycle a -> b -> a, got {cycle:?}"))?;
    let conf = ctx.on("loop", &["analyze", "--check", "confluence"]);
    verdict(&conf, "fails", 1)?;
    let d = &conf.json["details"];
    let mut sides = [d["left"].as_str().unwrap_or(""), d["right"].as_str().unwrap_or("")];
    sides.sort();
    expect(sides == ["c", "d"], format!("witness (c, d), got {d}"))?;
    let elim = scripted_loop(ctx, "loop")?;
    within(lc.elapsed + term.elapsed + conf.elapsed + elim.elapsed, FIXTURE_LIMIT)?;
    Ok(format!("cycle a -> b -> a, witness (c, d), {LOOP_STEPS} steps alternating P(a)/P(b)"))
}

fn remark(ctx: &mut Ctx) -> Check {
    let conf = ctx.on("remark", &["analyze", "--check", "confluence"]);
    verdict(&conf, "holds", 0)?;
    let universe = strs(&conf.json["details"]["universe"]);
    expect(universe == ["a", "b", "c", "d", "e"], format!("constant universe, got {universe:?}"))?;
    let cf = ctx.on("remark", &["prove-atomic", "--mode", "cutfree"]);
    verdict(&cf, "provable", 0)?;
    let proof = first_problem(&cf);
    expect(proof.contains("(axiom {P(e)} (P(c) |- P(d)))"), format!("Axiom(P(e)), got {proof}"))?;
    let elim = scripted_loop(ctx, "remark")?;
    within(conf.elapsed + cf.elapsed + elim.elapsed, FIXTURE_LIMIT)?;
    Ok("confluent, P(c) |- P(d) by Axiom(P(e)), scripted policy still exhausts the budget".into())
}

fn suite(ctx: &mut Ctx, name: &str, count: &str) -> Result<(Run, Value), String> {
    let r = ctx.asymod(&["random-test", "--suite", name, "--count", count, "--seed", "0"]);
    let d = r.json["details"].clone();
    let violations = d["violations"].as_array().map_or(usize::MAX, Vec::len);
    expect(violations == 0, format!("{violations} violation(s): {}", d["violations"]))?;
    verdict(&r, "pass", 0)?;
    expect(d["checked"].as_u64().unwrap_or(0) > 0, "no system satisfied the hypotheses")?;
    Ok((r, d))
}

fn equivalence(ctx: &mut Ctx) -> Check {
    let (r, d) = suite(ctx, "main-equivalence", SUITE_COUNT)?;
    within(r.elapsed, EQUIVALENCE_LIMIT)?;
    Ok(format!("{} complete systems agree, {} incomplete skipped", d["checked"], d["incomplete"]))
}

fn newman(ctx: &mut Ctx) -> Check {
    let (r, d) = suite(ctx, "newman", SUITE_COUNT)?;
    expect(d["steps_taken"].as_u64().unwrap_or(0) > 0, "no cut was eliminated")?;
    within(r.elapsed, NEWMAN_LIMIT)?;
    Ok(format!("{} systems, {} proofs, {} steps", d["checked"], d["proofs_checked"], d["steps_taken"]))
}

fn never_stuck(ctx: &mut Ctx) -> Check {
    let (_, d) = suite(ctx, "prop6", SUITE_COUNT)?;
    Ok(format!("{} locally confluent systems, {} proofs, {} steps", d["checked"], d["proofs_checked"], d["steps_taken"]))
}

fn symmetric(ctx: &mut Ctx) -> Check {
    let (_, d) = suite(ctx, "def1", &SYMMETRIC_COUNT.to_string())?;
    expect(d["proofs_checked"] == SYMMETRIC_COUNT, format!("{} proofs", d["proofs_checked"]))?;
    Ok(format!("{SYMMETRIC_COUNT} proofs, {} steps in total", d["steps_taken"]))
}

fn full(ctx: &mut Ctx) -> Check {
    let conj = ctx.on("conjunction", &["eliminate", "--engine", "full"]);
    verdict(&conj, "cut-free", 0)?;
    let steps = conj.json["trace"]["steps"].as_array().cloned().unwrap_or_default();
    let key = &steps.first().ok_or("empty trace")?["event"]["events"][0];
    expect(key["kind"] == "key-case" && key["connective"] == "and", format!("first event is the key case, got {key}"))?;
    let cuts = strs(&key["cuts"]);
    expect(cuts == ["eq(4, 4)", "eq(0, 0)"], format!("two subformula cuts, got {cuts:?}"))?;
    let joins_later = steps[1..]
        .iter()
        .flat_map(|s| s["event"]["events"].as_array().cloned().unwrap_or_default())
        .any(|e| e["kind"] == "atomic-join");
    expect(joins_later, "atomic joins after the key case")?;
    let quant = ctx.on("quantifier", &["eliminate", "--engine", "full"]);
    verdict(&quant, "cut-free", 0)?;
    within(conj.elapsed + quant.elapsed, FULL_LIMIT)?;
    Ok("and key case gives {eq(4, 4), eq(0, 0)}, both fixtures cut-free".into())
}

fn round_trip(ctx: &mut Ctx) -> Check {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("acceptance");
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let emitted = std::mem::take(&mut ctx.emitted);
    expect(!emitted.is_empty(), "no proofs were emitted")?;
    for (i, (origin, text)) in emitted.iter().enumerate() {
        let path = dir.join(format!("emitted-{i}.problem"));
        std::fs::write(&path, text).map_err(|e| e.to_string())?;
        let r = ctx.asymod(&["check", "--problem", path.to_str().expect("utf-8 path")]);
        verdict(&r, "valid", 0).map_err(|e| format!("{origin}: {e}"))?;
    }
    for name in FIXTURES {
        let text = std::fs::read_to_string(fixture(name)).map_err(|e| e.to_string())?;
        let parsed = parse_problem(&text).map_err(|e| format!("{name}: {e}"))?;
        expect(render_problem(&parsed) == text, format!("{name} does not render byte for byte"))?;
    }
    Ok(format!("{} emitted proofs re-check, {} fixtures round-trip", emitted.len(), FIXTURES.len()))
}

fn main() {
    let criteria: [(&str, fn(&mut Ctx) -> Check); 10] = [
        ("arithmetic fixture", arithmetic),
        ("failure example", failure),
        ("loop example", looping),
        ("normalization vs cut elimination", remark),
        ("equivalence suite", equivalence),
        ("newman suite", newman),
        ("local confluence never stuck", never_stuck),
        ("symmetric reduction exactness", symmetric),
        ("full elimination", full),
        ("kernel round-trip", round_trip),
    ];
    let mut ctx = Ctx::default();
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        ctx.elapsed = Duration::ZERO;
        let result = f(&mut ctx);
        let secs = ctx.elapsed.as_secs_f64();
        match result {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} ({secs:.2} s)", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why} ({secs:.2} s)", i + 1);
            }
        }
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
