//! Acceptance criteria 1–10, each checked at its stated tolerance and
//! runtime limit. Every criterion prints one PASS/FAIL line; the process
//! exits nonzero if any criterion failed. Runs without the libtest harness
//! so the lines are never captured.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use renyicap::capacity::ENTANGLED_RESTARTS;
use renyicap::io::to_pretty;
use renyicap::verify::{self, PropertyReport, Suite};

const SEED: u64 = 7;

struct Check {
    what: String,
    ok: bool,
}

fn within(r: &PropertyReport, tol: f64, samples: usize) -> Check {
    Check {
        what: format!(
            "{}: worst {:.3e} vs {:.0e}, {} samples",
            r.name, r.worst_observed, tol, r.samples
        ),
        ok: r.samples >= samples && r.worst_observed <= tol,
    }
}

struct Outcome {
    id: usize,
    title: &'static str,
    checks: Vec<Check>,
    elapsed: Duration,
    limit: Option<Duration>,
}

impl Outcome {
    fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.ok) && self.limit.is_none_or(|l| self.elapsed < l)
    }

    fn line(&self) -> String {
        let details: Vec<_> = self
            .checks
            .iter()
            .map(|c| format!("{}{}", if c.ok { "" } else { "[x] " }, c.what))
            .collect();
        let time = match self.limit {
            Some(l) => format!("{:.1}s (limit {}s)", self.elapsed.as_secs_f64(), l.as_secs()),
            None => format!("{:.1}s", self.elapsed.as_secs_f64()),
        };
        format!(
            "criterion {:>2} {:<24} {} | {} | {}",
            self.id,
            self.title,
            if self.pass() { "PASS" } else { "FAIL" },
            time,
            details.join("; ")
        )
    }
}

fn timed(
    id: usize,
    title: &'static str,
    limit: Option<u64>,
    f: impl FnOnce() -> Vec<Check>,
) -> Outcome {
    let t = Instant::now();
    let checks = f();
    let out = Outcome {
        id,
        title,
        checks,
        elapsed: t.elapsed(),
        limit: limit.map(Duration::from_secs),
    };
    println!("{}", out.line());
    out
}

fn find<'a>(reports: &'a [PropertyReport], name: &str) -> &'a PropertyReport {
    reports.iter().find(|r| r.name == name).unwrap_or_else(|| panic!("no property {name}"))
}

fn main() -> ExitCode {
    let mut all = Vec::new();

    all.push(timed(1, "monotonicity", Some(30), || {
        vec![within(&verify::monotonicity(SEED), 1e-7, 600)]
    }));

    all.push(timed(2, "ordering", Some(10), || {
        vec![
            within(&verify::ordering(SEED), 1e-8, 600),
            within(&verify::lieb_thirring(SEED), 1e-8, 300),
        ]
    }));

    all.push(timed(3, "limit", Some(10), || {
        let r = verify::limit(SEED);
        vec![
            within(find(&r, "limit_accuracy"), 1e-3, 50),
            // At most 2 of 50 pairs may fail to improve from h = 1e-2 to 1e-4.
            within(find(&r, "limit_strict_improvement"), 2.0, 50),
        ]
    }));

    all.push(timed(4, "lemma equality", Some(300), || {
        let r = verify::lemma_equality(SEED, &[]);
        vec![within(find(&r, "lemma_equality"), 1e-3, 40)]
    }));

    all.push(timed(5, "EB subadditivity", Some(600), || {
        vec![
            Check {
                what: format!("entangled restarts {ENTANGLED_RESTARTS} >= 50"),
                ok: ENTANGLED_RESTARTS >= 50,
            },
            within(&verify::eb_subadditivity(SEED), 1e-4, 20),
        ]
    }));

    all.push(timed(6, "nu multiplicativity", Some(300), || {
        let r = verify::nu_multiplicativity(SEED);
        vec![
            within(find(&r, "nu_multiplicativity_eb"), 1e-3, 5),
            within(find(&r, "nu_multiplicativity_complements"), 1e-3, 5),
        ]
    }));

    all.push(timed(7, "converse chain", None, || {
        let r = verify::eb_chain(SEED);
        vec![
            within(find(&r, "eb_chain_steps"), 0.0, 10),
            within(find(&r, "bound_doubling"), 1e-12, 1),
            within(&verify::sqrt_threshold(SEED), 1e-12, 1),
        ]
    }));

    all.push(timed(8, "simulation dominance", Some(300), || {
        // 2 channels × 3 block lengths × 2 rates × 3 α × 20 codebooks.
        vec![within(&verify::simulation_dominance(SEED), 1e-9, 720)]
    }));

    all.push(timed(9, "equality conditions", None, || {
        vec![
            within(&verify::equality_condition(SEED), 1e-3, verify::EQUALITY_PAIRS),
            within(&verify::ic_povm_distinguishes(SEED), 0.0, 1),
        ]
    }));

    all.push(timed(10, "determinism", Some(1800), || {
        let t = Instant::now();
        let first = verify::run_suite(Suite::All, SEED, &[]).expect("suite runs");
        let first_time = t.elapsed();
        let second = verify::run_suite(Suite::All, SEED, &[]).expect("suite runs");
        let (a, b) = (to_pretty(&first.to_json()), to_pretty(&second.to_json()));
        let failing: Vec<_> = first.failures().map(|p| p.name.clone()).collect();
        vec![
            Check {
                what: format!("reports byte-identical ({} bytes)", a.len()),
                ok: a == b,
            },
            Check {
                what: format!("single full run {:.1}s < 1800s", first_time.as_secs_f64()),
                ok: first_time < Duration::from_secs(1800),
            },
            Check {
                what: format!("all {} properties pass {:?}", first.properties.len(), failing),
                ok: first.passed(),
            },
        ]
    }));

    let failed: Vec<_> = all.iter().filter(|o| !o.pass()).map(|o| o.id).collect();
    println!(
        "acceptance: {}/{} criteria passed",
        all.len() - failed.len(),
        all.len()
    );
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("failed criteria: {failed:?}");
        ExitCode::FAILURE
    }
}
