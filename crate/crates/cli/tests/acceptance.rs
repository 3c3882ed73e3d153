//! One PASS/FAIL line per acceptance criterion. Runs as a plain binary so the
//! lines show up in `cargo test` output; exits non-zero if any criterion fails.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::path::PathBuf;
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use proptest::strategy::{Strategy, ValueTree};
use proptest::test_runner::TestRunner;
use serde_json::Value;
use tight_storage_core::formulations::{build, relax, BuildOptions, Family, InitialState, ReserveProfile};
use tight_storage_core::hull::{replay_derivation, CombinationStatus};
use tight_storage_core::poly::{fm_eliminate, poly_equal};
use tight_storage_core::{Rational, StorageParams};

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

fn fixture(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "fixtures", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn cli(args: &[&str]) -> (Output, Duration) {
    let start = Instant::now();
    let o = Command::new(env!("CARGO_BIN_EXE_tight-storage"))
        .args(args)
        .env_remove("TIGHT_STORAGE_DATA")
        .output()
        .expect("binary runs");
    (o, start.elapsed())
}

fn json(o: &Output) -> Result<Value, String> {
    serde_json::from_slice(&o.stdout).map_err(|e| format!("bad JSON ({e}); stderr: {}", String::from_utf8_lossy(&o.stderr)))
}

fn rational(v: &Value) -> Result<Rational, String> {
    v.as_str().and_then(|s| s.parse().ok()).ok_or_else(|| format!("not a rational: {v}"))
}

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok { Ok(()) } else { Err(msg.into()) }
}

fn certify_random(family: &str, n: usize) -> Result<Duration, String> {
    let (o, took) = cli(&["certify", family, "--random", &n.to_string(), "--seed", "7", "--format", "json"]);
    let v = json(&o)?;
    let passed = v["passed"].as_u64().unwrap_or(0) as usize;
    let all_equal = v["results"].as_array().is_some_and(|r| r.len() == n && r.iter().all(|x| x["equality"] == true));
    ensure(o.status.code() == Some(0) && passed == n && all_equal, format!("{family}: {passed}/{n} certified"))?;
    Ok(took)
}

fn criterion_1() -> Verdict {
    let took = certify_random("bo", 100)?;
    ensure(took < Duration::from_secs(60), format!("took {took:?}, limit 60 s"))?;
    let (o, _) = cli(&["certify", "bo", "--params", &fixture("reference-unit.json"), "--format", "json"]);
    let v = json(&o)?;
    let c = &v["certificate"];
    ensure(
        o.status.code() == Some(0) && c["equality"] == true && c["lp_route_equal"] == true && c["vertex_route_equal"] == true,
        "reference-unit certificate is not equal by both routes",
    )?;
    Ok(format!("BO/TO 100/100 equal (seed 7) in {:.1} s; reference unit equal by LP and vertex routes", took.as_secs_f64()))
}

fn criterion_2() -> Verdict {
    let bor = certify_random("bor", 25)?;
    let bir = certify_random("bir", 25)?;
    let total = bor + bir;
    ensure(total < Duration::from_secs(600), format!("took {total:?}, limit 10 min"))?;
    Ok(format!("BOR/TOR 25/25 in {:.1} s, BIR/TIR 25/25 in {:.1} s", bor.as_secs_f64(), bir.as_secs_f64()))
}

fn criterion_3() -> Verdict {
    let c = common::single_period_cut();
    let x = c.assignment();
    ensure(c.basic_lp().is_feasible(&x, false), "(50, 8, 2, 0.8) infeasible in BO-LP")?;
    let tight = c.tight_lp();
    let violated = tight.violations(&x, false);
    ensure(violated == ["prev_soc_max[t=1]"], format!("TO-LP violations {violated:?}"))?;
    let slack = tight.slack("prev_soc_max[t=1]", &x).ok_or("row missing")?;
    ensure(slack == Rational::from_int(-4), format!("violation {} MWh, expected 4", -slack.clone()))?;
    for p in common::two_period_cuts() {
        let x = p.assignment();
        ensure(p.basic_lp().is_feasible(&x, false), format!("{p:?} infeasible in BO-LP"))?;
        ensure(!p.tight_lp().is_feasible(&x, false), format!("{p:?} feasible in TO-LP"))?;
    }
    Ok("(50, 8, 2, 0.8) in BO-LP, violates the TO-LP state-of-charge row by exactly 4 MWh; 3/3 two-period points cut".into())
}

fn criterion_4() -> Verdict {
    let (o, took) = cli(&["replay", "--params", &fixture("reference-unit.json"), "--format", "json"]);
    let v = json(&o)?;
    ensure(o.status.code() == Some(0) && v["equals_tight"] == true, "replay final rows differ from TO at T=1")?;
    ensure(took < Duration::from_secs(5), format!("took {took:?}, limit 5 s"))?;
    let combos = v["combinations"].as_array().ok_or("no combinations")?;
    let find = |row: &str| combos.iter().find(|c| c["row"] == row);
    let in_ch = find("-e[t=0] + 2 p_d[t=1] <= -5").ok_or("e >= E_min + p_d dt / eta_D combination missing")?;
    ensure(in_ch["status"] == "in_hull", format!("lower-bound combination is {}", in_ch["status"]))?;
    let dom = find("-90 delta[t=1] + p_c[t=1] <= 0").ok_or("eta_C p_c dt <= (E_max - E_min) delta combination missing")?;
    ensure(dom["status"] == "dominated" && dom["verified"] == true, "charge-energy combination lacks a verified certificate")?;
    for c in combos {
        let ok = c["status"] == "in_hull" || (c["status"] == "dominated" && c["verified"] == true);
        ensure(ok, format!("combination {} is {}", c["row"], c["status"]))?;
    }

    // Second route: the tight model with a variable initial state, with the
    // end-of-period state eliminated, against the replay's final rows.
    let p = StorageParams::from_json(&std::fs::read_to_string(fixture("reference-unit.json")).unwrap()).unwrap();
    let t = replay_derivation(&p).map_err(|e| e.to_string())?;
    let dominated_ok = t.combinations.iter().all(|c| match &c.status {
        CombinationStatus::Dominated { verified, .. } => *verified,
        CombinationStatus::InHull { .. } => true,
        _ => false,
    });
    ensure(dominated_ok, "library transcript has an unverified combination")?;
    let opts = BuildOptions { initial_state: InitialState::Variable, ..BuildOptions::default() };
    let to = relax(&build(Family::To, &p, 1, &ReserveProfile::none(), &opts).map_err(|e| e.to_string())?);
    let shadow = fm_eliminate(&to.to_polyhedron().map_err(|e| e.to_string())?, "e[t=1]").map_err(|e| e.to_string())?;
    ensure(
        poly_equal(&t.final_polytope, &shadow).map_err(|e| e.to_string())?.is_equal(),
        "final rows differ from the independently built TO polytope",
    )?;
    Ok(format!("final rows equal TO at T=1 (two routes); {} combinations all in CH or verified-dominated; {:.2} s", combos.len(), took.as_secs_f64()))
}

/// Published costs per column (basic-MIP, basic-LP, tight-MIP, tight-LP)
/// with their printed number of decimals.
const PUBLISHED_COSTS: [(&str, [&str; 4], usize); 3] = [
    ("uc", ["173.2", "130.3", "173.2", "173.2"], 1),
    ("uc-reserves", ["191.0", "184.1", "191.0", "191.0"], 1),
    ("tep", ["5882", "3205", "5882", "5882"], 0),
];

fn ordering(v: &Value) -> Result<[Rational; 4], String> {
    let runs = v["runs"].as_array().ok_or("no runs")?;
    let mut obj = Vec::new();
    for r in runs {
        ensure(r["status"] == "Optimal", format!("{} is {}", r["model"], r["status"]))?;
        obj.push(rational(&r["objective"])?);
    }
    let [bm, bl, tm, tl]: [Rational; 4] = obj.try_into().map_err(|_| "expected four runs")?;
    ensure(bl <= tl && tl <= tm && tm == bm, format!("{}: {bl} <= {tl} <= {tm} = {bm} fails", v["case"]))?;
    for k in [0, 2] {
        ensure(
            runs[k]["simultaneous_periods"] == 0 && runs[k]["simultaneity_sum"] == "0/1",
            format!("{} {} has simultaneity", v["case"], runs[k]["model"]),
        )?;
    }
    Ok([bm, bl, tm, tl])
}

fn criterion_5() -> Verdict {
    for case in ["uc", "uc-reserves", "tep", "multiperiod"] {
        let (o, _) = cli(&["case", case, "--format", "json"]);
        let v = json(&o)?;
        ensure(v["data_provenance"] == "approximated", "bundled data should be flagged approximated")?;
        ordering(&v)?;
    }
    let (probe, _) = cli(&["case", "uc", "--data", "paper-faithful", "--format", "json"]);
    if probe.status.code() == Some(2) {
        return Ok("basic-LP <= tight-LP <= tight-MIP = basic-MIP exactly on 4/4 approximated scenarios; \
                   dollar-exact tables not evaluated (paper-faithful data incomplete)"
            .into());
    }
    for (case, expected, places) in PUBLISHED_COSTS {
        let (o, _) = cli(&["case", case, "--data", "paper-faithful", "--format", "json"]);
        let obj = ordering(&json(&o)?)?;
        let got: Vec<String> = obj.iter().map(|x| x.to_decimal(places)).collect();
        ensure(got == expected, format!("{case}: rendered {got:?}, published {expected:?}"))?;
    }
    let (o, _) = cli(&["case", "multiperiod", "--data", "paper-faithful", "--format", "json"]);
    let [mip, basic_lp, _, tight_lp] = ordering(&json(&o)?)?;
    let got = [basic_lp.to_decimal(0), tight_lp.to_decimal(0), mip.to_decimal(0)];
    ensure(got == ["63053", "63094", "70515"], format!("multiperiod: rendered {got:?}"))?;
    Ok("ordering on 4/4 scenarios; paper-faithful costs match the published tables".into())
}

fn simultaneity(v: &Value, k: usize) -> Result<(u64, Rational), String> {
    let r = &v["runs"][k];
    Ok((r["simultaneous_periods"].as_u64().ok_or("missing count")?, rational(&r["simultaneity_sum"])?))
}

fn criterion_6() -> Verdict {
    let (o, took) = cli(&["case", "multiperiod", "--arithmetic", "float", "--format", "json"]);
    let v = json(&o)?;
    ensure(v["horizon"] == 1460, format!("horizon {}", v["horizon"]))?;
    ensure(took < Duration::from_secs(300), format!("took {took:?}, limit 5 min"))?;
    let (basic, tight) = (simultaneity(&v, 1)?, simultaneity(&v, 3)?);
    ensure(tight.0 < basic.0 && tight.1 < basic.1, format!("TO-LP {tight:?} not below BO-LP {basic:?}"))?;
    for k in [0, 2] {
        ensure(simultaneity(&v, k)? == (0, Rational::zero()), format!("MIP run {k} has simultaneity"))?;
    }
    let (exact, _) = cli(&["case", "multiperiod", "--format", "json"]);
    let e = json(&exact)?;
    for k in 0..4 {
        ensure(simultaneity(&e, k)? == simultaneity(&v, k)?, format!("run {k}: float and exact counts differ"))?;
    }
    Ok(format!(
        "TO-LP ({}, {}) < BO-LP ({}, {}); MIPs (0, 0); float counts equal exact re-solve; {:.1} s",
        tight.0,
        tight.1.to_decimal(1),
        basic.0,
        basic.1.to_decimal(1),
        took.as_secs_f64()
    ))
}

fn sample<S: Strategy>(strategy: S, n: usize) -> Vec<S::Value> {
    let mut runner = TestRunner::deterministic();
    (0..n).map(|_| strategy.new_tree(&mut runner).expect("strategy generates").current()).collect()
}

fn criterion_7() -> Verdict {
    for (p, cost) in sample(common::lp_case(), 200) {
        common::lp_matches_vertex_min(&p, &cost)?;
    }
    for c in sample(common::mip_case(), 100) {
        common::mip_matches_brute_force(&c)?;
    }
    Ok("200/200 LPs equal the vertex minimum with verified duals; 100/100 MIPs equal enumeration".into())
}

fn criterion_8() -> Verdict {
    let polytopes = sample((3usize..=4).prop_flat_map(|n| common::random_polytope(n, 6)), 100);
    for p in &polytopes {
        common::fm_matches_projected_vertices(p)?;
    }
    Ok("100/100 FM projections equal the hull of projected vertices".into())
}

fn criterion_9() -> Verdict {
    let (o, _) = cli(&["build", "bo", "--params", &fixture("uc-original.json")]);
    let err = String::from_utf8_lossy(&o.stderr);
    ensure(o.status.code() == Some(2), format!("exit {:?}", o.status.code()))?;
    ensure(err.contains("P_C_max") && err.contains("12/1 > 80/9"), format!("message: {err}"))?;
    for family in ["bo", "to", "bor", "tor"] {
        let (o, _) = cli(&["build", family, "--params", &fixture("uc-adapted.json")]);
        ensure(o.status.code() == Some(0), format!("adapted values rejected for {family}"))?;
    }
    Ok("P_C_max = 12 rejected (12 > 80/9), adapted values accepted".into())
}

fn criterion_10() -> Verdict {
    let q = |n: i64| Rational::from_int(n);
    let (o, _) = cli(&["flex", "--params", &fixture("flex-discharge.json"), "--soc", "50", "--pd", "8", "--format", "json"]);
    let v = json(&o)?;
    let (bor, bof) = (rational(&v["bor_max_down"])?, rational(&v["bof_max_down"])?);
    ensure(bor == q(8) && bof == q(18), format!("discharge example: BOR {bor}, BOF {bof}"))?;
    let (o, _) = cli(&["flex", "--params", &fixture("flex-efficiency.json"), "--soc", "10", "--pd", "8", "--format", "json"]);
    let v = json(&o)?;
    let (bof, real) = (rational(&v["bof_max_down"])?, rational(&v["realizable_down"])?);
    ensure(bof == q(16) && real == q(8) && v["bof_unrealizable"] == true, format!("efficiency example: BOF {bof}, realizable {real}"))?;
    Ok("BOR r- 8 vs BOF r- 18 at p_d = 8; BOF admits 16 where 8 is realizable".into())
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("1 hull certification BO/TO", criterion_1),
        ("2 hull certification BOR/TOR, BIR/TIR", criterion_2),
        ("3 relaxation cut-off points", criterion_3),
        ("4 elimination replay", criterion_4),
        ("5 bound ordering on bundled scenarios", criterion_5),
        ("6 simultaneity reduction", criterion_6),
        ("7 solver oracles", criterion_7),
        ("8 FM oracle", criterion_8),
        ("9 parameter gate", criterion_9),
        ("10 reserve flexibility", criterion_10),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        match check() {
            Ok(detail) => println!("PASS criterion {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {name}: {why}");
            }
        }
    }
    println!("acceptance: {}/10 criteria passed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
