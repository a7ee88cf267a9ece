//! Acceptance gate: one PASS/FAIL line per criterion, non-zero exit if any fails.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ptcert::algebra::{ExactElement, Measure};
use ptcert::catalog::{cyclic, free_group, heisenberg, s3_perm, s3_table, with_all_nontrivial};
use ptcert::certifier::{
    verify, verify_text, Certificate, CertificateFile, Metadata, OrderUnitTable, Witness,
};
use ptcert::oracle::{positivstellensatz_check, spectral_gap_exact, RegularRep};
use ptcert::rational::{best_approximation, format_rational, int, parse_rational, rat, to_f64};
use ptcert::zuk::{identity_holds, spectral_gap, zuk_certificate, LinkGraph};
use ptcert::{GroupElement, GroupSpec};

const CAP: usize = 20_000;

type Outcome = Result<String, String>;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("examples_data").join(name)
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e2s<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn ptcert(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_ptcert"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stdout).into_owned())
}

fn field<'a>(text: &'a str, name: &str) -> Option<&'a str> {
    text.lines().find_map(|l| l.strip_prefix(name).and_then(|r| r.strip_prefix(' ')))
}

fn test_groups() -> Vec<(&'static str, GroupSpec)> {
    vec![
        ("Z/2", cyclic(2)),
        ("Z/3", cyclic(3)),
        ("Z/4", cyclic(4)),
        ("S3 table", s3_table()),
        ("S3 perm", s3_perm()),
        ("F2", free_group(2)),
        ("Heisenberg", heisenberg()),
    ]
}

fn z2_exact() -> Outcome {
    let z2 = cyclic(2);
    let mu = Measure::uniform_on_generators(&z2).map_err(e2s)?;
    let lap = mu.laplacian(&z2).map_err(e2s)?;
    let square = lap.product(&z2, &lap).map_err(e2s)?;
    ensure(square == lap.scale(&int(2)), || "Δ² ≠ 2Δ".into())?;

    let ball = z2.enumerate_ball(&mu.support(), 1, CAP).map_err(e2s)?;
    let one_minus_s = ExactElement::from_terms([(GroupElement::Table(0), int(1)), (GroupElement::Table(1), int(-1))]);
    let cert = Certificate {
        spec_digest: z2.digest().to_string(),
        mu,
        radius: 1,
        ball_digest: ball.ordering_digest(),
        kappa_input: int(1),
        witnesses: vec![Witness { weight: rat(1, 2), xi: one_minus_s }],
        residual_bound: int(0),
        kappa_certified: int(1),
        metadata: Metadata::new("handcrafted"),
    };
    let report = verify_text(&z2, &cert.to_json(), CAP).map_err(e2s)?;
    ensure(report.verdict.is_accept(), || format!("verdict {}", report.verdict))?;
    ensure(report.recomputed_bound == Some(int(0)), || "recomputed bound is not 0".into())?;
    Ok("Δ² = 2Δ; handcrafted certificate accepted with kappa_certified 1/1".into())
}

fn z3_end_to_end() -> Outcome {
    let z3 = cyclic(3);
    let mu = Measure::uniform_on_generators(&z3).map_err(e2s)?;
    let bracket = spectral_gap_exact(&z3, &mu, CAP).map_err(e2s)?;
    ensure(bracket.contains(&rat(3, 2)), || format!("bracket [{}, {}]", bracket.lower, bracket.upper))?;
    ensure(bracket.width() <= rat(1, 100), || "bracket wider than 1/100".into())?;

    let dir = tempfile::tempdir().map_err(e2s)?;
    let cert = dir.path().join("z3.json");
    let group = data("z3.json");
    let (code, out) = ptcert(&[
        "certify",
        "--group",
        group.to_str().unwrap(),
        "--kappa",
        "max",
        "--out",
        cert.to_str().unwrap(),
    ]);
    ensure(code == 0, || format!("certify exit {code}:\n{out}"))?;
    let kc = field(&out, "kappa_certified").and_then(|s| s.split_whitespace().next()).ok_or("no kappa_certified")?;
    let kc = parse_rational(kc).map_err(e2s)?;
    ensure(to_f64(&kc) >= 1.3, || format!("kappa_certified {kc} < 1.3"))?;
    let (vcode, vout) = ptcert(&["verify", cert.to_str().unwrap(), "--group", group.to_str().unwrap()]);
    ensure(vcode == 0, || format!("verify exit {vcode}:\n{vout}"))?;
    Ok(format!(
        "bracket [{}, {}], kappa_certified {}, verify exit 0",
        format_rational(&bracket.lower),
        format_rational(&bracket.upper),
        format_rational(&kc)
    ))
}

fn zuk_exactness() -> Outcome {
    let mut details = Vec::new();
    for (name, base) in [("Z/3", cyclic(3)), ("Z/4", cyclic(4)), ("S3", s3_table())] {
        let start = Instant::now();
        let spec = with_all_nontrivial(&base).ok_or("not a table group")?;
        let n = spec.generator_elements().len();
        let link = LinkGraph::build(&spec, &spec.generator_elements()).map_err(e2s)?;
        ensure(link.edges().len() == n * (n - 1) && link.is_connected(), || format!("{name}: link is not complete"))?;
        let (_, lambda) = spectral_gap(&link).map_err(e2s)?;
        let expected_lambda = rat(n as i64, n as i64 - 1);
        ensure(lambda == expected_lambda, || format!("{name}: lambda_hat {lambda}"))?;
        let cert = zuk_certificate(&spec, &link, &lambda, CAP).map_err(e2s)?;
        let expected = rat(n as i64 + 1, n as i64);
        ensure(cert.kappa_certified == expected, || format!("{name}: kappa_certified {}", cert.kappa_certified))?;
        let mu = Measure::uniform_on_generators(&spec).map_err(e2s)?;
        ensure(cert.mu == mu, || format!("{name}: link measure is not uniform"))?;
        let bracket = spectral_gap_exact(&spec, &mu, CAP).map_err(e2s)?;
        ensure(bracket.is_exact() && bracket.lower == expected, || {
            format!("{name}: oracle [{}, {}]", bracket.lower, bracket.upper)
        })?;
        ensure(verify_text(&spec, &cert.to_json(), CAP).map_err(e2s)?.verdict.is_accept(), || {
            format!("{name}: certificate not accepted")
        })?;
        ensure(start.elapsed() < Duration::from_secs(5), || format!("{name}: over 5 s"))?;
        details.push(format!("{name} {}", format_rational(&expected)));
    }
    Ok(details.join(", "))
}

/// Symmetric sets with a nonempty link: the generators, and the punctured radius-2 ball.
fn link_sets(spec: &GroupSpec) -> Result<Vec<(&'static str, Vec<GroupElement>)>, String> {
    let gens = spec.generator_elements();
    let ball = spec.enumerate_ball(&gens, 2, CAP).map_err(e2s)?;
    let punctured: Vec<GroupElement> = ball.elements()[1..].to_vec();
    Ok(vec![("generators", gens), ("ball(2)∖{1}", punctured)])
}

fn example_identity() -> Outcome {
    let lambdas = [rat(2, 3), int(1), rat(7, 4)];
    let mut checked = 0;
    let mut skipped = Vec::new();
    for (name, spec) in test_groups() {
        for (label, set) in link_sets(&spec)? {
            let link = match LinkGraph::build(&spec, &set) {
                Ok(l) => l,
                Err(_) => {
                    skipped.push(format!("{name}/{label}"));
                    continue;
                }
            };
            for l in &lambdas {
                ensure(identity_holds(&spec, &link, l).map_err(e2s)?, || {
                    format!("{name}/{label}: identity fails at lambda {l}")
                })?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} identities exact; links without edges: {}", skipped.join(", ")))
}

fn free_group_negative() -> Outcome {
    let start = Instant::now();
    let group = data("f2.json");
    let dir = tempfile::tempdir().map_err(e2s)?;
    let out_path = dir.path().join("f2.json");
    let g = group.to_str().unwrap();
    let o = out_path.to_str().unwrap();
    let (code, out) = ptcert(&["certify", "--group", g, "--radius", "2", "--kappa", "1/10", "--out", o]);
    ensure(code == 1, || format!("kappa 1/10 exit {code}:\n{out}"))?;
    ensure(!out_path.exists(), || "a certificate was written".into())?;
    let (code, out) = ptcert(&["certify", "--group", g, "--radius", "2", "--kappa", "max", "--out", o]);
    let best = field(&out, "kappa_best").ok_or_else(|| format!("no kappa_best (exit {code}):\n{out}"))?;
    let best = parse_rational(best.split_whitespace().next().unwrap_or("")).map_err(e2s)?;
    ensure(to_f64(&best) <= 0.05, || format!("kappa_best {best} > 0.05"))?;
    ensure(start.elapsed() < Duration::from_secs(60), || "over 60 s".into())?;
    Ok(format!("kappa 1/10 rejected (exit 1); kappa_best {} (max exit {code})", format_rational(&best)))
}

fn order_unit_suite() -> Outcome {
    let mut total = 0;
    for (name, spec) in test_groups() {
        let mu = Measure::uniform_on_generators(&spec).map_err(e2s)?;
        let table = OrderUnitTable::build(&spec, &mu, 3, CAP).map_err(e2s)?;
        let ball = spec.enumerate_ball(&mu.support(), 3, CAP).map_err(e2s)?;
        for x in ball.elements() {
            let ok = table.verify_expansion(&spec, x).map_err(e2s)?;
            ensure(ok, || format!("{name}: expansion fails at {}", spec.key(x)))?;
            total += 1;
        }
    }
    Ok(format!("{total} expansions verified across 7 groups"))
}

/// Valid certificates with nonzero witnesses from both sources.
fn tamper_corpus() -> Result<Vec<(GroupSpec, CertificateFile)>, String> {
    use ptcert::certifier::{certify, CertifyOutcome, SolverOutput};
    use ptcert::sos::{build_problem, solve_feasibility, SolveOutcome, SolverOptions};
    let mut out = Vec::new();
    for (spec, kappa) in [(cyclic(3), rat(7, 5)), (cyclic(4), rat(1, 2)), (s3_table(), rat(1, 4))] {
        let mu = Measure::uniform_on_generators(&spec).map_err(e2s)?;
        let ball = spec.enumerate_ball(&mu.support(), 2, CAP).map_err(e2s)?;
        let problem = build_problem(&spec, &ball, &mu, &kappa).map_err(e2s)?;
        let q = match solve_feasibility(&problem, &SolverOptions::default()).map_err(e2s)? {
            SolveOutcome::Feasible { q, .. } => q,
            SolveOutcome::Stalled { reason, .. } => return Err(format!("solver stalled: {reason}")),
        };
        match certify(&spec, &mu, &kappa, SolverOutput { ball: &ball, q: &q, iterations: 0 }, 1_000_000, CAP)
            .map_err(e2s)?
        {
            CertifyOutcome::Accepted(c) => out.push((spec.clone(), c.encode())),
            CertifyOutcome::Rejected(r) => return Err(format!("rejected: {r:?}")),
        }
    }
    let s3 = with_all_nontrivial(&s3_table()).ok_or("table")?;
    let link = LinkGraph::build(&s3, &s3.generator_elements()).map_err(e2s)?;
    let cert = zuk_certificate(&s3, &link, &int(1), CAP).map_err(e2s)?;
    out.push((s3, cert.encode()));
    for (spec, file) in &out {
        ensure(!file.witnesses.is_empty(), || "corpus certificate without witnesses".into())?;
        ensure(verify(spec, file, CAP).map_err(e2s)?.verdict.is_accept(), || "corpus certificate rejected".into())?;
    }
    Ok(out)
}

fn bump(s: &str, rng: &mut ChaCha8Rng) -> String {
    let v = parse_rational(s).unwrap_or_else(|_| int(0));
    let delta = rat(rng.gen_range(1..=20), rng.gen_range(1..=20));
    let sign = if rng.gen_bool(0.5) { int(1) } else { int(-1) };
    format_rational(&(v + sign * delta))
}

fn flip_hex(s: &str, rng: &mut ChaCha8Rng) -> String {
    let mut chars: Vec<char> = s.chars().collect();
    if chars.is_empty() {
        return "0".into();
    }
    let i = rng.gen_range(0..chars.len());
    chars[i] = if chars[i] == '0' { '1' } else { '0' };
    chars.into_iter().collect()
}

fn tamper(file: &CertificateFile, spec: &GroupSpec, rng: &mut ChaCha8Rng) -> (String, CertificateFile) {
    let mut f = file.clone();
    let w = rng.gen_range(0..f.witnesses.len());
    let kind = rng.gen_range(0..12);
    let label = match kind {
        0 => {
            f.kappa_input = bump(&f.kappa_input, rng);
            "kappa_input"
        }
        1 => {
            f.kappa_certified = bump(&f.kappa_certified, rng);
            "kappa_certified"
        }
        2 => {
            f.residual_bound = bump(&f.residual_bound, rng);
            "residual_bound"
        }
        3 => {
            let wt = &mut f.witnesses[w].weight;
            *wt = bump(wt, rng);
            "witness weight"
        }
        4 => {
            let wt = &mut f.witnesses[w].weight;
            *wt = format_rational(&-parse_rational(wt).unwrap());
            "witness weight sign"
        }
        5 => {
            let xi = &mut f.witnesses[w].xi;
            let j = rng.gen_range(0..xi.len());
            let v = bump(&xi[j].1, rng);
            xi[j].1 = v;
            "witness coefficient"
        }
        6 => {
            // move one coefficient onto an unused ball element
            let xi = &mut f.witnesses[w].xi;
            let j = rng.gen_range(0..xi.len());
            let ball = spec.enumerate_ball(&spec.generator_elements(), f.radius, CAP).unwrap();
            let used: Vec<String> = xi.iter().map(|(k, _)| k.clone()).collect();
            let fresh: Vec<String> = ball.elements().iter().map(|g| spec.key(g)).filter(|k| !used.contains(k)).collect();
            if fresh.is_empty() {
                let v = bump(&xi[j].1, rng);
                xi[j].1 = v;
            } else {
                xi[j].0 = fresh[rng.gen_range(0..fresh.len())].clone();
            }
            "witness support"
        }
        7 => {
            let j = rng.gen_range(0..f.mu.len());
            f.mu[j].1 = bump(&f.mu[j].1, rng);
            "measure weight"
        }
        8 => {
            f.radius = if f.radius > 1 && rng.gen_bool(0.5) { f.radius - 1 } else { f.radius + 1 };
            "radius"
        }
        9 => {
            f.ball_digest = flip_hex(&f.ball_digest, rng);
            "ball digest"
        }
        10 => {
            f.spec_digest = flip_hex(&f.spec_digest, rng);
            "spec digest"
        }
        _ => {
            f.witnesses.remove(w);
            "witness removed"
        }
    };
    (label.to_string(), f)
}

fn tamper_suite() -> Outcome {
    let start = Instant::now();
    let corpus = tamper_corpus()?;
    let mut rng = ChaCha8Rng::seed_from_u64(0x7a3d);
    let mut kinds = std::collections::BTreeMap::new();
    for i in 0..100 {
        let (spec, file) = &corpus[i % corpus.len()];
        let (label, bad) = tamper(file, spec, &mut rng);
        ensure(&bad != file, || format!("perturbation {i} ({label}) changed nothing"))?;
        let report = verify_text(spec, &serde_json::to_string(&bad).unwrap(), CAP).map_err(e2s)?;
        ensure(!report.verdict.is_accept(), || format!("perturbation {i} ({label}) accepted"))?;
        *kinds.entry(label).or_insert(0) += 1;
    }
    ensure(start.elapsed() < Duration::from_secs(30), || "over 30 s".into())?;
    Ok(format!("100/100 rejected over {} field kinds", kinds.len()))
}

fn random_hermitian(spec: &GroupSpec, rep: &RegularRep, rng: &mut ChaCha8Rng) -> Result<ExactElement, String> {
    let mut a = ExactElement::zero();
    for g in rep.elements() {
        if rng.gen_bool(0.7) {
            a.add_term(g.clone(), rat(rng.gen_range(-10..=10), rng.gen_range(1..=10)));
        }
    }
    let h = a.add(&a.star(spec).map_err(e2s)?);
    // recentre so that about half the samples are positive
    let m = rep.matrix(&h).map_err(e2s)?;
    let lo = ptcert::linalg::min_eigenvalue(&m.to_float());
    let shift = best_approximation(-lo + rng.gen_range(-0.5..0.5), 1000).map_err(e2s)?;
    Ok(h.add(&ExactElement::one(spec).scale(&shift)))
}

fn positivstellensatz_suite() -> Outcome {
    let eps = rat(1, 100);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut summary = Vec::new();
    for (name, spec) in [("Z/2", cyclic(2)), ("Z/3", cyclic(3)), ("Z/4", cyclic(4))] {
        let rep = RegularRep::new(&spec, CAP).map_err(e2s)?;
        let mut psd = 0;
        for i in 0..50 {
            let xi = random_hermitian(&spec, &rep, &mut rng)?;
            let r = positivstellensatz_check(&spec, &xi, &eps, CAP).map_err(e2s)?;
            ensure(r.agrees, || format!("{name} sample {i}: {r:?}"))?;
            psd += r.regular_psd as usize;
        }
        summary.push(format!("{name} 50 agree ({psd} psd)"));
    }
    Ok(summary.join(", "))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: Vec<Criterion> = vec![
        ("Z/2 exact identity", z2_exact),
        ("Z/3 end-to-end", z3_end_to_end),
        ("link-graph path exactness", zuk_exactness),
        ("link Gram identity regression", example_identity),
        ("free group negative control", free_group_negative),
        ("order-unit expansions", order_unit_suite),
        ("tamper suite", tamper_suite),
        ("positivity desk check", positivstellensatz_suite),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {} {name}: PASS ({detail}) [{secs:.2}s]", i + 1),
            Err(why) => {
                failures += 1;
                println!("criterion {} {name}: FAIL ({why}) [{secs:.2}s]", i + 1);
            }
        }
    }
    println!("acceptance: {} of 8 criteria passed", 8 - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
