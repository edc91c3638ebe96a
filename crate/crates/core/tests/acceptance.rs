//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each,
//! and exits non-zero if any criterion fails.

mod common;

use std::time::{Duration, Instant};

use tomocad::cli::run_command;
use tomocad::sim::{cad_decide, cad_encode, classify_block, BlockClass, Decision, Nit};
use tomocad::{
    asymptotic_deficits, cad_threshold_closed, cad_threshold_numeric, distilled_betas,
    min_secure_block_length, qed_threshold, run_cad_experiment, security_margin,
    srm_closed_form, srm_success_probability, ChannelParams, SimConfig,
};

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        ok,
        detail: detail.into(),
    }
}

struct Criterion {
    name: &'static str,
    budget: Option<Duration>,
    run: fn() -> Outcome,
}

fn ch(n: usize, e: f64) -> ChannelParams {
    ChannelParams::from_noise(n, e).unwrap()
}

fn threshold_values() -> Outcome {
    let qed = qed_threshold(2).unwrap();
    let cad = cad_threshold_closed(2).unwrap();
    let dq = (qed - 2.0 / 3.0).abs();
    let dc = (cad - (1.0 - (1.0f64 / 5.0).sqrt())).abs();
    outcome(
        dq < 1e-9 && dc < 1e-9,
        format!("qed(2)={qed:.9} cad(2)={cad:.9} |dq|={dq:.1e} |dc|={dc:.1e}"),
    )
}

fn threshold_table_csv() -> Outcome {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let args = ["tomocad", "thresholds", "--n-min", "2", "--n-max", "30"];
    if run_command(args, &mut out, &mut err) != 0 {
        return outcome(false, String::from_utf8_lossy(&err).into_owned());
    }
    let text = String::from_utf8(out).unwrap();
    let mut lines = text.lines();
    if lines.next() != Some("n,e_qed,e_cad") {
        return outcome(false, "unexpected header");
    }
    let rows: Vec<(usize, f64, f64)> = lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0].parse().unwrap(), f[1].parse().unwrap(), f[2].parse().unwrap())
        })
        .collect();
    let increasing = rows.windows(2).all(|w| w[1].1 > w[0].1 && w[1].2 > w[0].2);
    let ordered = rows.iter().all(|r| r.2 < r.1);
    let ns_ok = rows.iter().map(|r| r.0).eq(2..=30);
    outcome(
        increasing && ordered && ns_ok,
        format!("{} rows, increasing={increasing}, cad<qed={ordered}", rows.len()),
    )
}

fn numeric_threshold() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for n in [2, 3, 5, 10] {
        let numeric = cad_threshold_numeric(n, 200, 1e-6).unwrap();
        let closed = cad_threshold_closed(n).unwrap();
        let gap = (numeric - closed).abs();
        ok &= gap < 1e-3;
        parts.push(format!("n={n}: {numeric:.6} vs {closed:.6} (gap {gap:.2e})"));
    }
    outcome(ok, parts.join("; "))
}

fn srm_oracle() -> Outcome {
    let mut worst: f64 = 0.0;
    for n in 2..=10 {
        for k in 0..50 {
            let overlap = k as f64 / 49.0;
            let diff = (srm_closed_form(n, overlap) - srm_success_probability(n, overlap).unwrap()).abs();
            let naive = (common::eta(n, overlap).0 - srm_success_probability(n, overlap).unwrap()).abs();
            worst = worst.max(diff).max(naive);
        }
    }
    outcome(worst < 1e-10, format!("max |closed - oracle| = {worst:.2e} over 9x50 grid"))
}

fn monte_carlo() -> Outcome {
    let (n, eps, l) = (2, 0.5, 2u32);
    let (beta0l, _, p_accept) = common::distilled(n, eps, l);
    let i_ab = common::i_ab(n, eps, l);
    let i_ae = common::i_ae(n, eps, l);
    let cfg = SimConfig {
        params: ch(n, eps),
        block_length: l as usize,
        n_blocks: 1_000_000,
        seed: 20_031_220,
        simulate_sifting: false,
    };
    let r = run_cad_experiment(&cfg).unwrap();
    let checks = [
        ("beta0L", r.beta0l, beta0l, 0.002),
        ("p_accept", r.p_accept, p_accept, 0.002),
        ("i_ab", r.i_ab_hat, i_ab, 0.01),
        ("i_ae", r.i_ae_hat, i_ae, 0.01),
    ];
    let ok = checks.iter().all(|(_, got, want, tol)| (got - want).abs() <= *tol);
    let detail = checks
        .iter()
        .map(|(name, got, want, _)| format!("{name}={got:.4} (ref {want:.4})"))
        .collect::<Vec<_>>()
        .join(", ");
    outcome(ok, detail)
}

fn security_criterion() -> Outcome {
    let low = min_secure_block_length(&ch(2, 0.50), 64).unwrap();
    let high = min_secure_block_length(&ch(2, 0.60), 64).unwrap();
    outcome(
        low.is_some() && high.is_none(),
        format!("eps=0.50 -> {low:?}, eps=0.60 -> {high:?}"),
    )
}

fn ratio_law() -> Outcome {
    for n in 2..=10 {
        for k in 1..=9 {
            let p = ch(n, k as f64 / 10.0);
            for l in 1..=64 {
                let s = distilled_betas(&p, l).unwrap();
                let want = p.error_odds().powi(l as i32);
                if ((s.beta1 / s.beta0 - want) / want).abs() >= 1e-9 {
                    return outcome(false, format!("n={n} k={k} L={l}"));
                }
            }
        }
    }
    outcome(true, "n=2..10, eps=0.1..0.9, L<=64 within 1e-9 relative")
}

fn all_blocks(n: usize, len: u32) -> impl Iterator<Item = Vec<Nit>> {
    (0..(n as u32).pow(len)).map(move |code| {
        (0..len).map(|i| (code / (n as u32).pow(i)) % n as u32).collect()
    })
}

fn round_trip() -> Outcome {
    let mut count = 0u64;
    for n in 2..=3 {
        for len in 1..=4 {
            for block in all_blocks(n, len) {
                for v in 0..n as Nit {
                    let announced = cad_encode(&block, v, n).unwrap();
                    if cad_decide(&announced, &block, n).unwrap() != Decision::Good(v) {
                        return outcome(false, format!("{block:?} + {v}"));
                    }
                    count += 1;
                }
            }
        }
    }
    outcome(true, format!("{count} block/addend pairs"))
}

fn classification() -> Outcome {
    let mut count = 0u64;
    for n in 2..=3 {
        for len in 1..=4 {
            for alice in all_blocks(n, len) {
                for bob in all_blocks(n, len) {
                    for v in 0..n as Nit {
                        let announced = cad_encode(&alice, v, n).unwrap();
                        let decision = cad_decide(&announced, &bob, n).unwrap();
                        let want = match classify_block(&alice, &bob, n).unwrap() {
                            BlockClass::CaseI => Decision::Good(v),
                            BlockClass::CaseII(d) => {
                                Decision::Good(((v as usize + n - d as usize) % n) as Nit)
                            }
                            BlockClass::Bad => Decision::Bad,
                        };
                        if decision != want {
                            return outcome(false, format!("{alice:?} {bob:?} {v}"));
                        }
                        count += 1;
                    }
                }
            }
        }
    }
    outcome(true, format!("{count} (alice, bob, addend) triples"))
}

fn asymptotic_ratio() -> Outcome {
    let mut parts = Vec::new();
    for (n, eps) in [(2, 0.5), (3, 0.3), (10, 0.8)] {
        let p = ch(n, eps);
        let gaps: Vec<(f64, f64)> = [10, 40, 160]
            .iter()
            .map(|&l| {
                let r = security_margin(&p, l).unwrap();
                let (ab, ae) = asymptotic_deficits(&p, l).unwrap();
                ((r.deficit_ab / ab - 1.0).abs(), (r.deficit_ae / ae - 1.0).abs())
            })
            .collect();
        let shrinking = gaps.windows(2).all(|w| w[1].0 < w[0].0 && w[1].1 < w[0].1);
        if !shrinking {
            return outcome(false, format!("n={n} eps={eps}: {gaps:?}"));
        }
        let last = gaps[2];
        parts.push(format!("n={n}: L=160 gaps {:.1e}/{:.1e}", last.0, last.1));
    }
    outcome(true, parts.join("; "))
}

fn determinism() -> Outcome {
    let cfg = SimConfig {
        params: ch(3, 0.4),
        block_length: 3,
        n_blocks: 50_000,
        seed: 7,
        simulate_sifting: true,
    };
    let a = run_cad_experiment(&cfg).unwrap();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let b = pool.install(|| run_cad_experiment(&cfg).unwrap());
    let mut out1 = Vec::new();
    let mut out2 = Vec::new();
    let args = ["tomocad", "simulate", "--n", "3", "--noise", "0.4", "--blocks", "20000", "--seed", "5"];
    run_command(args, &mut out1, &mut Vec::new());
    run_command(args, &mut out2, &mut Vec::new());
    outcome(
        a == b && out1 == out2 && !out1.is_empty(),
        "identical SimResult across thread counts; identical CLI bytes",
    )
}

fn main() {
    let criteria = [
        Criterion {
            name: "threshold values",
            budget: Some(Duration::from_millis(1)),
            run: threshold_values,
        },
        Criterion {
            name: "threshold table",
            budget: Some(Duration::from_millis(10)),
            run: threshold_table_csv,
        },
        Criterion {
            name: "numeric vs closed-form CAD threshold",
            budget: Some(Duration::from_secs(10)),
            run: numeric_threshold,
        },
        Criterion {
            name: "SRM oracle equivalence",
            budget: Some(Duration::from_secs(5)),
            run: srm_oracle,
        },
        Criterion {
            name: "Monte Carlo convergence",
            budget: Some(Duration::from_secs(60)),
            run: monte_carlo,
        },
        Criterion {
            name: "security-criterion consistency",
            budget: Some(Duration::from_secs(1)),
            run: security_criterion,
        },
        Criterion {
            name: "property: ratio law",
            budget: None,
            run: ratio_law,
        },
        Criterion {
            name: "property: CAD round trip",
            budget: None,
            run: round_trip,
        },
        Criterion {
            name: "property: classification <-> decision",
            budget: None,
            run: classification,
        },
        Criterion {
            name: "property: asymptotic ratio convergence",
            budget: None,
            run: asymptotic_ratio,
        },
        Criterion {
            name: "property: determinism",
            budget: None,
            run: determinism,
        },
    ];

    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let result = (c.run)();
        let elapsed = start.elapsed();
        let in_budget = c.budget.is_none_or(|b| elapsed <= b);
        let ok = result.ok && in_budget;
        failed += usize::from(!ok);
        let budget = c
            .budget
            .map_or(String::new(), |b| format!(" / budget {b:?}"));
        println!(
            "{} {}: {} [{elapsed:.2?}{budget}]",
            if ok { "PASS" } else { "FAIL" },
            c.name,
            result.detail
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
