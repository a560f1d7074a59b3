//! End-to-end acceptance checks. Prints one line per criterion and exits
//! nonzero if any hard gate fails. Criterion 7 is a loose reproduction
//! target: a miss is reported with the measured medians but does not fail
//! the run.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::*;
use irsim::beamforming::{alternating_optimize, objective, optimal_phases, AoOptions};
use irsim::geometry::p0_db;
use irsim::numerics::RngStream;
use irsim::{run_trials, CdfReport, SchemeId, SystemConfig};

struct Outcome {
    id: &'static str,
    pass: bool,
    hard: bool,
    detail: String,
}

fn run(n_users: usize, n_drops: usize) -> CdfReport {
    let cfg = SystemConfig {
        n_users,
        n_drops,
        ..SystemConfig::default()
    };
    run_trials(&cfg).expect("simulation runs")
}

fn rates(r: &CdfReport, s: SchemeId) -> Vec<f64> {
    r.get(s).unwrap().by_drop.iter().map(|&(_, v)| v).collect()
}

fn median(r: &CdfReport, s: SchemeId) -> f64 {
    r.get(s).unwrap().p50
}

fn tdma_equals_fdma() -> Outcome {
    let r = run(2, 500);
    let worst = rates(&r, SchemeId::Tdma)
        .iter()
        .zip(rates(&r, SchemeId::Fdma))
        .map(|(a, b)| (a - b).abs() / b.abs().max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max);
    Outcome {
        id: "1 TDMA == FDMA without IRS",
        pass: worst <= 1e-12,
        hard: true,
        detail: format!("500 drops, max relative difference {worst:.3e} (tol 1e-12)"),
    }
}

fn ao_monotone() -> Outcome {
    let opts = AoOptions {
        max_iterations: 10,
        relative_tolerance: 0.0,
    };
    let mut worst_step = 0.0f64;
    let mut converged = 0;
    let n = 1000;
    for i in 0..n {
        let mut rng = RngStream::new(2024, i);
        let inst = rician_instance(200, 16, &mut rng);
        let res = alternating_optimize(&inst.g, &inst.h, &inst.f, &opts).unwrap();
        for p in res.trace.windows(2) {
            worst_step = worst_step.max(p[0] - p[1]);
        }
        let last = res.trace.len() - 1;
        if res.trace[3.min(last)] >= 0.999 * res.trace[10.min(last)] {
            converged += 1;
        }
    }
    let frac = converged as f64 / n as f64;
    Outcome {
        id: "2 AO monotone, 3 iterations suffice",
        pass: worst_step <= 1e-12 && frac >= 0.99,
        hard: true,
        detail: format!(
            "{n} instances N=200 Nb=16, largest decrease {worst_step:.3e}, trace[3] >= 0.999*trace[10] in {:.1}%",
            100.0 * frac
        ),
    }
}

fn triangle_bound_attained() -> Outcome {
    let mut worst = 0.0f64;
    for i in 0..1000 {
        let mut rng = RngStream::new(2025, i);
        let n = 1 + rng.index(200);
        let nb = 1 + rng.index(16);
        let inst = rayleigh_instance(n, nb, &mut rng);
        let w = random_unit_beamformer(nb, &mut rng);
        let th = optimal_phases(&inst.g, &inst.h, &w, &inst.f).unwrap();
        let got = objective(&inst.g, &th, &inst.h, &inst.f, &w)
            .unwrap()
            .sqrt();
        let bound = triangle_bound(&inst, &w);
        worst = worst.max((got - bound).abs() / bound);
    }
    Outcome {
        id: "3 triangle bound attained",
        pass: worst <= 1e-9,
        hard: true,
        detail: format!("1000 instances, max relative gap {worst:.3e} (tol 1e-9)"),
    }
}

fn grid_oracle() -> Outcome {
    let mut worst = f64::INFINITY;
    for i in 0..100 {
        let mut rng = RngStream::new(2026, i);
        let n = 1 + rng.index(3);
        let nb = 1 + rng.index(2);
        let inst = rayleigh_instance(n, nb, &mut rng);
        let w = random_unit_beamformer(nb, &mut rng);
        let th = optimal_phases(&inst.g, &inst.h, &w, &inst.f).unwrap();
        let margin = objective_direct(&inst, th.phases(), &w) - grid_best(&inst, &w, 16);
        worst = worst.min(margin);
    }
    Outcome {
        id: "4 closed form beats 16-level grid",
        pass: worst >= -1e-9,
        hard: true,
        detail: format!("100 instances N<=3 Nb<=2, smallest margin {worst:.3e} (tol -1e-9)"),
    }
}

fn dominance() -> Outcome {
    let r = run(2, 500);
    let tdma_irs = rates(&r, SchemeId::TdmaIrs);
    let eus = rates(&r, SchemeId::FdmaEus);
    let rp = rates(&r, SchemeId::FdmaRp);
    let others = [SchemeId::FdmaNear, SchemeId::FdmaFar, SchemeId::FdmaRu].map(|s| rates(&r, s));
    let n = eus.len();
    let ok = (0..n)
        .filter(|&i| {
            tdma_irs[i] >= eus[i] && others.iter().all(|o| eus[i] >= o[i]) && eus[i] >= rp[i]
        })
        .count();
    let frac = ok as f64 / n as f64;
    Outcome {
        id: "5 dominance TDMA-IRS >= EUS >= Near/Far/RU, EUS >= RP",
        pass: frac >= 0.99,
        hard: true,
        detail: format!("{ok}/{n} drops ({:.1}%, need 99%)", 100.0 * frac),
    }
}

fn runtime_and_medians() -> (Outcome, Outcome) {
    let start = Instant::now();
    let r = run(2, 1000);
    let took = start.elapsed();
    let rt = Outcome {
        id: "6 runtime K=2, 9 schemes, 1000 drops",
        pass: took < Duration::from_secs(300),
        hard: true,
        detail: format!("{:.2} s (limit 300 s)", took.as_secs_f64()),
    };

    let fdma = median(&r, SchemeId::Fdma);
    let noma = median(&r, SchemeId::Noma);
    let eus = median(&r, SchemeId::FdmaEus);
    let rp = median(&r, SchemeId::FdmaRp);
    let tdma_irs = median(&r, SchemeId::TdmaIrs);
    let gap = tdma_irs - eus;
    let checks = [
        (5.0..=11.0).contains(&fdma),
        noma > fdma,
        eus > rp,
        (1.0..=6.0).contains(&gap),
    ];
    let med = Outcome {
        id: "7 K=2 medians (reported, not gating)",
        pass: checks.iter().all(|&c| c),
        hard: false,
        detail: format!(
            "FDMA {fdma:.3} (target 7.6, band 5-11: {}); NOMA {noma:.3} vs FDMA (target 9.7 > 7.6: {}); \
             EUS {eus:.3} vs RP {rp:.3} (target 22.5 > 18.6: {}); TDMA-IRS {tdma_irs:.3}, gap {gap:.3} (target 3, band 1-6: {})",
            ok(checks[0]),
            ok(checks[1]),
            ok(checks[2]),
            ok(checks[3])
        ),
    };
    (rt, med)
}

fn ok(b: bool) -> &'static str {
    if b {
        "met"
    } else {
        "missed"
    }
}

fn large_k() -> Outcome {
    let r = run(20, 500);
    let eus = median(&r, SchemeId::FdmaEus);
    let ru = median(&r, SchemeId::FdmaRu);
    let rp = median(&r, SchemeId::FdmaRp);
    Outcome {
        id: "8 K=20 random scheduling / reflection near optimal",
        pass: eus - ru < 1.0 && eus - rp < 2.0,
        hard: true,
        detail: format!(
            "EUS {eus:.3}, RU {ru:.3} (gap {:.3} < 1), RP {rp:.3} (gap {:.3} < 2)",
            eus - ru,
            eus - rp
        ),
    }
}

fn p0_reference() -> Outcome {
    let p0 = p0_db(1900.0, 15.0, 1.65).unwrap();
    Outcome {
        id: "9 COST-Hata P0",
        pass: (p0 - 140.72).abs() <= 0.01,
        hard: true,
        detail: format!("{p0:.4} dB (target 140.72 +/- 0.01)"),
    }
}

fn main() -> ExitCode {
    let (rt, med) = runtime_and_medians();
    let outcomes = [
        tdma_equals_fdma(),
        ao_monotone(),
        triangle_bound_attained(),
        grid_oracle(),
        dominance(),
        rt,
        med,
        large_k(),
        p0_reference(),
    ];
    let mut hard_fail = false;
    for o in &outcomes {
        let tag = match (o.pass, o.hard) {
            (true, _) => "PASS",
            (false, true) => "FAIL",
            (false, false) => "MISS",
        };
        println!("[{tag}] {}: {}", o.id, o.detail);
        hard_fail |= o.hard && !o.pass;
    }
    if hard_fail {
        println!("acceptance: hard criteria failed");
        ExitCode::FAILURE
    } else {
        println!("acceptance: all hard criteria passed");
        ExitCode::SUCCESS
    }
}
