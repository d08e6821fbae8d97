//! End-to-end acceptance suite. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any criterion fails.

mod common;

use std::cell::Cell;
use std::time::Instant;

use common::*;
use qwalk_core::analysis::{position_distribution, stats, symmetry_experiment};
use qwalk_core::experiment::{
    csv_string, run, run_serial, save_run, ExperimentConfig, ExperimentKind, GeometryKind, RunRecord, SweepAxis,
    SweepParameter,
};
use qwalk_core::linalg::{partial_trace, tensor, DensityMatrix, Subsystem};
use qwalk_core::noise::{flip_channel, gad_channel, sgad_channel, CoinChannel, FlipKind, SgadParams};
use qwalk_core::quantumness::{pi_projection, qmid};
use qwalk_core::{ChannelSpec, CoinParams, Geometry, InitialState, NoisePlacement, WalkSetup, WalkState};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

/// Smallest Q seen on any walk state, shared with criterion 7.
struct QFloor {
    min: Cell<f64>,
    states: Cell<usize>,
}

impl QFloor {
    fn observe(&self, s: &WalkState) {
        let q = qmid(s.rho()).expect("qmid on a walk state").q;
        self.record(q);
    }

    fn record(&self, q: f64) {
        self.min.set(self.min.get().min(q));
        self.states.set(self.states.get() + 1);
    }
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn standard(r: f64) -> SgadParams {
    SgadParams::standard_bath().with_squeezing(r)
}

fn channel_contract() -> Outcome {
    let mut completeness: f64 = 0.0;
    for temperature in [0.1, 1.0, 2.0, 5.0] {
        for gamma0 in [0.01, 0.025, 0.05] {
            for interaction_time in [0.05, 0.1, 0.2] {
                for squeezing in [0.0, 0.5, 1.0, 1.5, 2.0] {
                    let p = SgadParams { temperature, gamma0, interaction_time, squeezing, squeezing_phase: 0.0 };
                    let ch = sgad_channel(&p).map_err(|e| e.to_string())?;
                    completeness = completeness.max(ch.completeness_error());
                }
            }
        }
    }

    let channels: Vec<CoinChannel> = vec![
        sgad_channel(&SgadParams { temperature: 0.1, gamma0: 0.05, ..standard(0.0) }).unwrap(),
        sgad_channel(&standard(1.0)).unwrap(),
        sgad_channel(&SgadParams { temperature: 5.0, gamma0: 0.05, interaction_time: 0.2, ..standard(2.0) }).unwrap(),
        gad_channel(2.0, 0.05, 0.2).unwrap(),
        flip_channel(FlipKind::BitFlip, 0.2).unwrap(),
        flip_channel(FlipKind::PhaseFlip, 0.4).unwrap(),
    ];
    let (mut trace_err, mut min_eig): (f64, f64) = (0.0, 0.0);
    let mut states = 0;
    for ch in &channels {
        for (geometry, placement) in [
            (Geometry::line(30).unwrap(), NoisePlacement::BeforeCoin),
            (Geometry::cycle(11).unwrap(), NoisePlacement::AfterCoin),
            (Geometry::cycle(11).unwrap(), NoisePlacement::AfterShift),
        ] {
            let setup = WalkSetup {
                coin: CoinParams { xi: 10.0, theta: 40.0, zeta: 25.0 },
                init: InitialState { delta: 50.0, phi: 30.0 },
                channel: Some(ch.clone()),
                placement,
                geometry,
            };
            setup
                .run(30, |s| {
                    trace_err = trace_err.max((s.rho().trace() - 1.0).abs());
                    min_eig = min_eig.min(s.rho().min_eigenvalue()?);
                    states += 1;
                    Ok(())
                })
                .map_err(|e| e.to_string())?;
        }
    }
    check(
        completeness <= 1e-10 && trace_err <= 1e-10 && min_eig >= -1e-10,
        format!(
            "max |ΣE†E − I| = {completeness:.2e} over 180 grid points; {states} evolved states: max |tr − 1| = {trace_err:.2e}, min eigenvalue = {min_eig:.2e}"
        ),
    )
}

fn gad_limit() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    for (temperature, gamma0, dt) in [(2.0, 0.025, 0.1), (0.1, 0.05, 0.1), (5.0, 0.05, 0.2)] {
        let sgad = sgad_channel(&SgadParams { temperature, gamma0, interaction_time: dt, squeezing: 1e-6, squeezing_phase: 0.0 })
            .map_err(|e| e.to_string())?;
        let gad = gad_channel(temperature, gamma0, dt).map_err(|e| e.to_string())?;
        for _ in 0..20 {
            let rho = random_density(2, 2, &mut rng);
            let a = DensityMatrix::single(sgad.apply_to_coin(&rho).unwrap()).unwrap();
            let b = DensityMatrix::single(gad.apply_to_coin(&rho).unwrap()).unwrap();
            worst = worst.max(a.trace_distance(&b).unwrap());
        }
    }
    check(worst <= 1e-5, format!("max trace distance {worst:.2e} over 3 baths x 20 random states"))
}

fn small_oracle() -> Outcome {
    let mut worst: f64 = 0.0;
    let cases = [
        (CoinParams::default(), InitialState::default()),
        (CoinParams { xi: 33.0, theta: 61.0, zeta: -12.0 }, InitialState { delta: 20.0, phi: 300.0 }),
        (CoinParams { xi: -90.0, theta: 15.0, zeta: 45.0 }, InitialState { delta: 180.0, phi: 0.0 }),
    ];
    for (cp, init) in cases {
        for t in 1..=3 {
            let g = Geometry::line(t).unwrap();
            let setup = WalkSetup { coin: cp, init, ..WalkSetup::noiseless(g) };
            let d = position_distribution(&setup.run(t, |_| Ok(())).map_err(|e| e.to_string())?);
            let amps = path_sum(coin(cp.xi, cp.theta, cp.zeta), init_amplitudes(&init), t);
            for (x, p) in d.iter() {
                let want: f64 = (0..2).map(|cn| amps.get(&(cn, x)).map_or(0.0, |a| a.norm_sqr())).sum();
                worst = worst.max((p - want).abs());
            }
        }
    }
    check(worst <= 1e-12, format!("max |p − p_paths| = {worst:.2e} over 3 coins x t = 1..3"))
}

fn sigma_series(setup: &WalkSetup, steps: usize, floor: &QFloor) -> Result<Vec<f64>, String> {
    let mut sigma = Vec::with_capacity(steps);
    setup
        .run(steps, |s| {
            sigma.push(stats(&position_distribution(s)).std_dev);
            floor.observe(s);
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    Ok(sigma)
}

fn log_log_slope(sigma: &[f64], from: usize, to: usize) -> f64 {
    let pts: Vec<(f64, f64)> = (from..=to).map(|t| ((t as f64).ln(), sigma[t - 1].ln())).collect();
    let n = pts.len() as f64;
    let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / n, pts.iter().map(|p| p.1).sum::<f64>() / n);
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

fn ballistic_to_diffusive(floor: &QFloor) -> Outcome {
    let line = Geometry::line(100).unwrap();
    let clean = sigma_series(&WalkSetup::noiseless(line), 100, floor)?;
    let noisy_setup = WalkSetup::noiseless(line)
        .with_channel(&ChannelSpec::Sgad(standard(2.0)))
        .map_err(|e| e.to_string())?;
    let noisy = sigma_series(&noisy_setup, 100, floor)?;

    let ratios: Vec<f64> = (50..=100).map(|t| clean[t - 1] / t as f64).collect();
    let worst = ratios.iter().map(|r| (r - 0.5412).abs()).fold(0.0, f64::max);
    let shrink = noisy[99] / clean[99];
    let (slope_clean, slope_noisy) = (log_log_slope(&clean, 50, 100), log_log_slope(&noisy, 50, 100));
    check(
        worst <= 0.005 && shrink < 0.5 && slope_noisy < 0.75,
        format!(
            "σ/t ∈ [{:.4}, {:.4}] for t ∈ [50,100]; r=2: σ(100)/σ₀(100) = {shrink:.3}; slope {slope_noisy:.3} (noiseless {slope_clean:.3})",
            ratios.iter().copied().fold(f64::INFINITY, f64::min),
            ratios.iter().copied().fold(0.0, f64::max),
        ),
    )
}

fn line_symmetry(floor: &QFloor) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(55);
    let placements = [NoisePlacement::BeforeCoin, NoisePlacement::AfterCoin, NoisePlacement::AfterShift];
    let mut worst: f64 = 0.0;
    for case in 0..20 {
        let channel = match case % 4 {
            0 => None,
            1 => Some(
                sgad_channel(&SgadParams {
                    temperature: rng.gen_range(0.1..5.0),
                    squeezing: rng.gen_range(0.0..2.0),
                    squeezing_phase: rng.gen_range(0.0..std::f64::consts::TAU),
                    ..standard(0.0)
                })
                .unwrap(),
            ),
            2 => Some(flip_channel(FlipKind::BitFlip, rng.gen_range(0.0..1.0)).unwrap()),
            _ => Some(flip_channel(FlipKind::PhaseFlip, rng.gen_range(0.0..1.0)).unwrap()),
        };
        let setup = WalkSetup {
            geometry: Geometry::line(60).unwrap(),
            coin: CoinParams {
                xi: rng.gen_range(-180.0..180.0),
                theta: rng.gen_range(0.0..90.0),
                zeta: rng.gen_range(-180.0..180.0),
            },
            init: InitialState { delta: rng.gen_range(0.0..180.0), phi: rng.gen_range(0.0..360.0) },
            channel,
            placement: placements[case % 3],
        };
        let alpha = rng.gen_range(-180.0..180.0);
        let series = symmetry_experiment(&setup, 60, alpha).map_err(|e| e.to_string())?;
        worst = worst.max(series.kd.iter().copied().fold(0.0, f64::max));
        let last = setup.run(60, |_| Ok(())).map_err(|e| e.to_string())?;
        floor.observe(&last);
    }
    check(worst <= 1e-9, format!("max per-step KD {worst:.2e} over 20 random cases, t ≤ 60"))
}

fn cycle_symmetry(floor: &QFloor) -> Outcome {
    let cycle = Geometry::cycle(51).unwrap();
    let clean = WalkSetup::noiseless(cycle);
    let noisy = clean.clone().with_channel(&ChannelSpec::Sgad(standard(2.0))).map_err(|e| e.to_string())?;
    let kd0 = symmetry_experiment(&clean, 150, 30.0).map_err(|e| e.to_string())?.kd;
    let kd2 = symmetry_experiment(&noisy, 150, 30.0).map_err(|e| e.to_string())?.kd;
    for s in [&clean, &noisy] {
        s.run(150, |st| {
            floor.observe(st);
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    }

    let before = kd0[..50].iter().copied().fold(0.0, f64::max);
    let after = kd0[50..150].iter().copied().fold(0.0, f64::max);
    let mean = |kd: &[f64]| kd[101..150].iter().sum::<f64>() / 49.0;
    let (m0, m2) = (mean(&kd0), mean(&kd2));
    check(
        before <= 1e-9 && after > 1e-3 && m2 <= 0.2 * m0,
        format!(
            "noiseless max KD t<51 = {before:.2e}, max KD t∈[51,150] = {after:.3}; mean KD t∈[102,150]: noiseless {m0:.3e}, r=2 {m2:.3e}"
        ),
    )
}

fn qmid_structure(floor: &QFloor, samples: &[DensityMatrix]) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let product = DensityMatrix::bipartite(
        tensor(&random_density(2, 2, &mut rng), &random_density(5, 5, &mut rng)),
        2,
        5,
    )
    .unwrap();
    let q_product = qmid(&product).map_err(|e| e.to_string())?.q;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let bell = DensityMatrix::pure(&[c(h, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(h, 0.0)], 2, 2).unwrap();
    let q_bell = qmid(&bell).map_err(|e| e.to_string())?.q;

    let mut pi_err: f64 = 0.0;
    let mut extra = vec![DensityMatrix::bipartite(random_density(12, 5, &mut rng), 2, 6).unwrap()];
    extra.extend(samples.iter().cloned());
    for rho in &extra {
        let pi = pi_projection(rho).map_err(|e| e.to_string())?;
        let twice = pi_projection(&pi).map_err(|e| e.to_string())?;
        pi_err = pi_err.max(twice.matrix().max_abs_diff(pi.matrix()));
        for side in [Subsystem::Coin, Subsystem::Position] {
            let a = partial_trace(rho, side).unwrap();
            let b = partial_trace(&pi, side).unwrap();
            pi_err = pi_err.max(a.matrix().max_abs_diff(b.matrix()));
        }
    }
    let min_q = floor.min.get();
    check(
        q_product <= 1e-8 && (q_bell - 1.0).abs() <= 1e-6 && min_q >= -1e-8 && pi_err <= 1e-9,
        format!(
            "Q(product) = {q_product:.1e}, Q(Bell) = {q_bell:.9}; min Q over {} walk states = {min_q:.2e}; Π idempotence/marginal error {pi_err:.2e} on {} states",
            floor.states.get(),
            extra.len()
        ),
    )
}

fn final_states(floor: &QFloor) -> Vec<DensityMatrix> {
    let line = Geometry::line(100).unwrap();
    [0.0, 2.0]
        .iter()
        .map(|&r| {
            let s = WalkSetup::noiseless(line).with_channel(&ChannelSpec::Sgad(standard(r))).unwrap();
            let last = s.run(100, |_| Ok(())).unwrap();
            floor.observe(&last);
            last.rho().clone()
        })
        .collect()
}

fn floats(rec: &RunRecord, column: &str) -> Vec<f64> {
    rec.table.column(column).expect("column").iter().map(|v| v.as_f64()).collect()
}

fn qmid_trends(floor: &QFloor) -> Outcome {
    let squeezings = vec![0.0, 0.5, 1.0, 1.5, 2.0];
    let mut line = ExperimentConfig::new(ExperimentKind::QmidVsTime, GeometryKind::Line, 100);
    line.channel = ChannelSpec::Sgad(standard(0.0));
    line.sweep = vec![SweepAxis { parameter: SweepParameter::Squeezing, values: squeezings.clone() }];
    let rec = run(&line).map_err(|e| e.to_string())?;
    floats(&rec, "Q").iter().for_each(|&q| floor.record(q));
    let (t, q) = (floats(&rec, "t"), floats(&rec, "Q"));
    let at_100: Vec<f64> = t.iter().zip(&q).filter(|(t, _)| **t == 100.0).map(|(_, q)| *q).collect();
    let drops: Vec<f64> = at_100.windows(2).map(|w| w[0] - w[1]).collect();
    let line_ok = at_100.len() == 5 && drops.iter().all(|&d| d > 1e-4);

    let mut cycle = ExperimentConfig::new(ExperimentKind::QmidVsTime, GeometryKind::Cycle, 200);
    cycle.sites = Some(101);
    cycle.channel = ChannelSpec::Sgad(standard(0.5));
    cycle.sweep = vec![SweepAxis { parameter: SweepParameter::Squeezing, values: vec![0.5, 1.5] }];
    let rec = run(&cycle).map_err(|e| e.to_string())?;
    floats(&rec, "Q").iter().for_each(|&q| floor.record(q));
    let q = floats(&rec, "Q");
    let (q_low, q_high) = (q[q.len() - 2], q[q.len() - 1]);

    check(
        line_ok && q_high < q_low,
        format!(
            "line t=100 Q(r) = {}; cycle n=101 τ=4: Q(0.5) = {q_low:.4}, Q(1.5) = {q_high:.4}",
            at_100.iter().map(|q| format!("{q:.4}")).collect::<Vec<_>>().join(" > ")
        ),
    )
}

fn line_vs_cycle() -> Outcome {
    let mut cfg = ExperimentConfig::new(ExperimentKind::LineVsCycle, GeometryKind::Cycle, 100);
    cfg.sites = Some(101);
    cfg.channel = ChannelSpec::Sgad(SgadParams { temperature: 0.1, gamma0: 0.05, interaction_time: 0.1, squeezing: 0.0, squeezing_phase: 0.0 });
    cfg.sweep = vec![SweepAxis { parameter: SweepParameter::Sites, values: vec![101.0, 45.0, 21.0] }];
    let rec = run(&cfg).map_err(|e| e.to_string())?;
    let n = rec.table.rows.len();
    let last = &rec.table.rows[n - 3..];
    let col = |name: &str| rec.table.columns.iter().position(|c| c == name).unwrap();
    let (ci, ti, li) = (col("Q_cycle"), col("tau"), col("Q_line"));
    let q_line = last[0][li].as_f64();
    let q: Vec<f64> = last.iter().map(|r| r[ci].as_f64()).collect();
    let tau: Vec<f64> = last.iter().map(|r| r[ti].as_f64()).collect();
    check(
        tau[2] >= 8.0 && q[2] < q_line && q[0] > q[1] && q[1] > q[2],
        format!(
            "t=100: Q_line = {q_line:.4}; Q_cycle at τ = {:.2}, {:.2}, {:.2}: {:.4}, {:.4}, {:.4}",
            tau[0], tau[1], tau[2], q[0], q[1], q[2]
        ),
    )
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut cfg = ExperimentConfig::new(ExperimentKind::QmidVsTime, GeometryKind::Cycle, 40);
    cfg.sites = Some(21);
    cfg.channel = ChannelSpec::Sgad(standard(0.0));
    cfg.report_distance = true;
    cfg.sweep = vec![SweepAxis { parameter: SweepParameter::Squeezing, values: vec![0.0, 1.0, 2.0] }];
    let mut bytes = Vec::new();
    for name in ["a", "b"] {
        let out = save_run(&cfg, &run(&cfg).map_err(|e| e.to_string())?, dir.path().join(name)).map_err(|e| e.to_string())?;
        bytes.push(std::fs::read(out.join("qmid-vs-time.csv")).map_err(|e| e.to_string())?);
    }
    let serial = csv_string(&run_serial(&cfg).map_err(|e| e.to_string())?.table);
    check(
        bytes[0] == bytes[1] && serial.as_bytes() == bytes[0].as_slice(),
        format!("two parallel runs and one serial run: {} identical bytes", bytes[0].len()),
    )
}

fn main() {
    let floor = QFloor { min: Cell::new(f64::INFINITY), states: Cell::new(0) };
    let mut results: Vec<(usize, &str, Outcome, f64)> = Vec::new();
    let mut record = |n: usize, name: &'static str, f: &dyn Fn() -> Outcome| {
        let started = Instant::now();
        let outcome = f();
        results.push((n, name, outcome, started.elapsed().as_secs_f64()));
    };

    record(1, "channel contract", &channel_contract);
    record(2, "GAD limit", &gad_limit);
    record(3, "path-sum oracle", &small_oracle);
    record(4, "ballistic to diffusive", &|| ballistic_to_diffusive(&floor));
    record(5, "line symmetry", &|| line_symmetry(&floor));
    record(6, "cycle symmetry onset and restoration", &|| cycle_symmetry(&floor));
    let samples = final_states(&floor);
    record(8, "QMID trends vs squeezing", &|| qmid_trends(&floor));
    // needs the Q floor collected by criteria 4-8
    record(7, "QMID structure", &|| qmid_structure(&floor, &samples));
    record(9, "line vs cycle classicalization", &line_vs_cycle);
    record(10, "determinism", &determinism);

    results.sort_by_key(|r| r.0);
    let mut failures = 0;
    for (n, name, outcome, secs) in &results {
        let (tag, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failures += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {n:>2} {tag} {name} ({secs:.1}s): {detail}");
    }
    if failures > 0 {
        println!("{failures} of {} criteria failed", results.len());
        std::process::exit(1);
    }
    println!("all {} criteria passed", results.len());
}
