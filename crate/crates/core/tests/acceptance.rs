//! Acceptance suite. Runs every criterion in sequence, prints one PASS/FAIL
//! line each and exits non-zero if any failed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rimbound::direct_oracle::{GridHamiltonian, OracleRecord};
use rimbound::rayleigh_ritz::{certify, Certificate, DEFAULT_SCHEDULE};
use rimbound::spin_orbit::{assemble_spin_kernel, assemble_with_frame, BandFrame, MatrixSymbol};
use rimbound::surface_operator::{circle_points, circulant_oracle, point_matrix_test};
use rimbound::{Dispersion, DispersionSymbol, GaussianTerm, Potential, SurfaceMesh, SurfaceOperatorMatrix};
use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::time::{Duration, Instant};

type Verdict = Result<String, String>;

fn hat() -> DispersionSymbol {
    DispersionSymbol::mexican_hat(2, 1.0).unwrap()
}

fn well() -> Potential {
    Potential::gaussian_well(2, 1.0, 1.0).unwrap()
}

fn mix() -> Potential {
    Potential::gaussian_mix(
        2,
        vec![
            GaussianTerm { amplitude: -1.0, width: 1.0 },
            GaussianTerm { amplitude: 2.0, width: 0.5 },
        ],
    )
    .unwrap()
}

fn check(ok: bool, detail: String) -> Verdict {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

/// Oracle records keyed by (ℒ, G), with the time each took.
#[derive(Default)]
struct OracleCache {
    records: BTreeMap<(u64, usize), (OracleRecord, Duration)>,
}

impl OracleCache {
    fn well(&mut self, box_edge: f64, grid: usize) -> Result<(OracleRecord, Duration), String> {
        let key = (box_edge.to_bits(), grid);
        if let Some(hit) = self.records.get(&key) {
            return Ok(hit.clone());
        }
        let t = Instant::now();
        let h = GridHamiltonian::new(&hat(), &well(), box_edge, grid, 3.0).map_err(err)?;
        let record = h.record(8).map_err(err)?;
        let entry = (record, t.elapsed());
        self.records.insert(key, entry.clone());
        Ok(entry)
    }
}

fn criterion_1() -> Verdict {
    let v = well();
    let op64 = SurfaceOperatorMatrix::assemble(&SurfaceMesh::circle(1.0, 64).map_err(err)?, &v).map_err(err)?;
    let op128 = SurfaceOperatorMatrix::assemble(&SurfaceMesh::circle(1.0, 128).map_err(err)?, &v).map_err(err)?;
    let top = *op128.eigenvalues().last().unwrap();
    let bound = 1e-10 * op128.norm();
    let below = op128.eigenvalues().iter().filter(|e| **e < -1e-6).count();
    let deltas = [1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8];
    let count = |op: &SurfaceOperatorMatrix, d: f64| op.eigenvalues().iter().filter(|e| **e < -d).count();
    let monotone = deltas.iter().all(|d| count(&op64, *d) <= count(&op128, *d));
    check(
        top <= bound && below >= 12 && monotone,
        format!("max eig {top:.3e} (bound {bound:.3e}), {below} below -1e-6, counts non-decreasing 64->128: {monotone}"),
    )
}

fn criterion_2() -> Verdict {
    let potentials = [
        ("gaussian-well", well()),
        ("ball-well", Potential::ball_well(2, 1.0, 1.0).unwrap()),
        ("gaussian-dimple-mix", mix()),
    ];
    let mut worst = 0.0f64;
    for (_, v) in &potentials {
        for m in [32, 64, 128] {
            let mesh = SurfaceMesh::circle(1.0, m).map_err(err)?;
            let dense = SurfaceOperatorMatrix::assemble(&mesh, v).map_err(err)?;
            let circ = circulant_oracle(&mesh, v).map_err(err)?;
            for (a, b) in dense.eigenvalues().iter().zip(&circ) {
                worst = worst.max((a - b).abs());
            }
        }
    }
    check(worst <= 1e-10, format!("largest entrywise difference {worst:.3e}"))
}

fn certificate_n3() -> Result<Certificate, String> {
    let mesh = SurfaceMesh::circle(1.0, 64).map_err(err)?;
    certify(&hat(), &well(), &mesh, 3, &DEFAULT_SCHEDULE).map_err(err)
}

fn criterion_3(cert: &Certificate) -> Verdict {
    let errors = cert.errors();
    let decreasing = errors.windows(2).all(|w| w[1] < w[0]);
    let ratios = &cert.convergence_ratios;
    let tail_ok = ratios[ratios.len() - 2..].iter().all(|r| *r <= 0.75);
    let last = cert.samples.last().unwrap();
    check(
        decreasing && tail_ok && last.negative_definite && (last.fraction - 0.025).abs() < 1e-15,
        format!(
            "errors {:?}, ratios {:?}, h(0.025 r) eigenvalues {:?}",
            errors.iter().map(|e| format!("{e:.3e}")).collect::<Vec<_>>(),
            ratios.iter().map(|r| format!("{r:.3}")).collect::<Vec<_>>(),
            last.eigenvalues.iter().map(|e| format!("{e:.4}")).collect::<Vec<_>>(),
        ),
    )
}

fn criterion_4(cert: &Certificate, cache: &mut OracleCache) -> Verdict {
    let certified = cert.certified_count;
    let mut parts = vec![format!("certified {certified}")];
    let mut ok = certified == 3;
    for (l, g) in [(40.0, 256), (60.0, 384)] {
        let (rec, _) = cache.well(l, g)?;
        ok &= rec.count >= certified;
        parts.push(format!("L={l} G={g}: count {} (delta {:.4})", rec.count, rec.delta));
    }
    check(ok, parts.join(", "))
}

fn criterion_5() -> Verdict {
    let v = mix();
    if !(v.integral() < 0.0) {
        return Err(format!("mixture integral {} is not negative", v.integral()));
    }
    let test = point_matrix_test(&v, &circle_points(1.0, &[0.0]), 0.0).map_err(err)?;
    let h = GridHamiltonian::new(&hat(), &v, 40.0, 256, 3.0).map_err(err)?;
    let lowest = h.lowest_eigenvalues(1).map_err(err)?.eigenvalues[0];
    let threshold = h.minimum() - h.delta();
    check(
        test.is_negative_definite && lowest < threshold,
        format!(
            "integral {:.4}, point test eigenvalue {:.4e}, oracle lowest {lowest:.5} vs m - delta {threshold:.5}",
            v.integral(),
            test.largest_eigenvalue
        ),
    )
}

fn criterion_6(cache: &mut OracleCache) -> Result<(String, Duration), String> {
    let mut counts = Vec::new();
    let mut spent = Duration::ZERO;
    for (l, g) in [(30.0, 192), (45.0, 288), (60.0, 384)] {
        let (rec, t) = cache.well(l, g)?;
        spent += t;
        counts.push(rec.count);
    }
    let ok = counts.windows(2).all(|w| w[0] <= w[1]);
    let detail = format!("counts at L = 30, 45, 60: {counts:?}");
    if ok {
        Ok((detail, spent))
    } else {
        Err(detail)
    }
}

fn criterion_7() -> Verdict {
    let v = well();
    let scale = v.fourier(&[0.0, 0.0]).map_err(err)?.norm();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = f64::NEG_INFINITY;
    let mut failures = 0;
    for _ in 0..100 {
        let n = rng.random_range(1..=8);
        let angles: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..TAU)).collect();
        let test = point_matrix_test(&v, &circle_points(1.0, &angles), 0.0).map_err(err)?;
        let rel = test.largest_eigenvalue / scale;
        worst = worst.max(rel);
        if !(test.largest_eigenvalue < -1e-12 * scale) {
            failures += 1;
        }
    }
    check(
        failures == 0,
        format!("{failures} of 100 sets failed, largest eigenvalue / scale {worst:.3e}"),
    )
}

fn criterion_8() -> Verdict {
    let symbol = MatrixSymbol::rashba(1.0).map_err(err)?;
    let band = symbol.lower_band();
    let min = band.minimum().map_err(err)?;
    let at_min = band.energy(&[0.5, 0.0, 0.0]);
    let minimum_ok = (min.value + 0.25).abs() <= 1e-12 && (min.radius - 0.5).abs() <= 1e-12 && (at_min + 0.25).abs() <= 1e-12;

    let mesh = SurfaceMesh::circle(0.5, 64).map_err(err)?;
    let v = well();
    let op = assemble_spin_kernel(&mesh, &v, &symbol).map_err(err)?;
    let frame = BandFrame::new(&symbol, &mesh).map_err(err)?;
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut gauge = 0.0f64;
    for _ in 0..20 {
        let phases: Vec<f64> = (0..mesh.len()).map(|_| rng.random_range(0.0..TAU)).collect();
        let rotated = assemble_with_frame(&mesh, &v, &frame.with_phases(&phases).map_err(err)?).map_err(err)?;
        for (a, b) in op.eigenvalues().iter().zip(rotated.eigenvalues()) {
            gauge = gauge.max((a - b).abs());
        }
    }
    let top = *op.eigenvalues().last().unwrap();
    let nonpositive = top <= 1e-10 * op.norm();
    check(
        minimum_ok && gauge <= 1e-10 && nonpositive,
        format!(
            "minimum {:.15} at |p| = {:.15}, gauge spread {gauge:.3e}, top eigenvalue {top:.3e}",
            min.value, min.radius
        ),
    )
}

fn criterion_9() -> Verdict {
    let zero = Potential::zero(2).map_err(err)?;
    let h = GridHamiltonian::new(&hat(), &zero, 30.0, 192, 3.0).map_err(err)?;
    let report = h.lowest_eigenvalues(32).map_err(err)?;
    let mut table = h.symbol_table().to_vec();
    table.sort_by(f64::total_cmp);
    let bitwise = report
        .eigenvalues
        .iter()
        .zip(&table[..32])
        .all(|(a, b)| a.to_bits() == b.to_bits());
    check(
        bitwise && report.eigenvalues.len() == 32,
        format!("32 eigenvalues bitwise equal to the sorted table: {bitwise}"),
    )
}

struct Line {
    id: usize,
    limit: Duration,
    elapsed: Duration,
    verdict: Verdict,
}

fn timed<F: FnOnce() -> Verdict>(id: usize, limit_secs: u64, f: F) -> Line {
    let t = Instant::now();
    let verdict = f();
    Line {
        id,
        limit: Duration::from_secs(limit_secs),
        elapsed: t.elapsed(),
        verdict,
    }
}

fn main() {
    let mut lines = Vec::new();
    lines.push(timed(1, 5, criterion_1));
    lines.push(timed(2, 5, criterion_2));

    let t = Instant::now();
    let cert = certificate_n3();
    let cert_time = t.elapsed();
    let cert = match cert {
        Ok(c) => c,
        Err(e) => {
            eprintln!("certificate for N = 3 failed: {e}");
            std::process::exit(1);
        }
    };
    let mut line3 = timed(3, 60, || criterion_3(&cert));
    line3.elapsed += cert_time;
    lines.push(line3);

    let mut cache = OracleCache::default();
    let mut line4 = timed(4, 600, || criterion_4(&cert, &mut cache));
    line4.elapsed += cert_time;
    lines.push(line4);
    lines.push(timed(5, 180, criterion_5));

    let t = Instant::now();
    let (verdict, spent) = match criterion_6(&mut cache) {
        Ok((d, s)) => (Ok(d), s),
        Err(e) => (Err(e), Duration::ZERO),
    };
    lines.push(Line {
        id: 6,
        limit: Duration::from_secs(900),
        elapsed: spent.max(t.elapsed()),
        verdict,
    });

    lines.push(timed(7, 1, criterion_7));
    lines.push(timed(8, 10, criterion_8));
    lines.push(timed(9, 30, criterion_9));

    let mut failed = 0;
    for line in &lines {
        let within = line.elapsed <= line.limit;
        let (pass, detail) = match &line.verdict {
            Ok(d) => (within, d.as_str()),
            Err(d) => (false, d.as_str()),
        };
        if !pass {
            failed += 1;
        }
        println!(
            "criterion {}: {} [{:.2}s / {}s] {}{}",
            line.id,
            if pass { "PASS" } else { "FAIL" },
            line.elapsed.as_secs_f64(),
            line.limit.as_secs(),
            detail,
            if within { "" } else { " (over time limit)" }
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
