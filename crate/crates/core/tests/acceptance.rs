//! End-to-end acceptance run: one PASS/FAIL line per criterion, non-zero exit if any fails.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use lattice_precoder::bounds::{gram_trace_bound, lower_bound_energy, upper_bound_energy};
use lattice_precoder::codebook::{best_of, optimal_precoder, rational_bound, repro_4d};
use lattice_precoder::exact::{int, ratio};
use lattice_precoder::lattice::known::{a4, d4, hexagonal};
use lattice_precoder::lattice::{brute_force_min, is_isometric, min_distance, successive_minimum_2};
use lattice_precoder::linalg::orthogonality_residual;
use lattice_precoder::perfect::{enumerate_perfect_forms, isometry_classes, root_lattice_form};
use lattice_precoder::precoder::{gmd_precoder, gmd_result, objective, suboptimal_precoder, ChannelSpectrum};
use lattice_precoder::reduction::{is_minkowski_reduced, minkowski_extreme_forms, minkowski_reduce};
use lattice_precoder::{QuadraticForm, Result};
use rand::Rng;

use common::{random_form, random_spectrum, random_unimodular, rng};

struct Outcome {
    pass: bool,
    detail: String,
}

type Check = fn() -> Result<Outcome>;

fn outcome(pass: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { pass, detail })
}

fn secs(d: Duration) -> f64 {
    d.as_secs_f64()
}

fn planar_optimality() -> Result<Outcome> {
    let mut r = rng(1);
    let start = Instant::now();
    let mut hexagonal_wins = 0;
    for _ in 0..200 {
        let s2 = r.gen_range(0.1..10.0);
        let s = ChannelSpectrum::new(vec![s2 * r.gen_range(1.0..=20.0), s2])?;
        let res = optimal_precoder(&s)?;
        let g = res.source_form.expect("enumerated winner");
        if is_isometric(&g, &hexagonal())?.is_some() {
            hexagonal_wins += 1;
        }
    }
    let t = start.elapsed();
    outcome(
        hexagonal_wins == 200 && t < Duration::from_secs(30),
        format!("{hexagonal_wins}/200 hexagonal, {:.2}s (< 30s)", secs(t)),
    )
}

fn four_dimensional_switch() -> Result<Outcome> {
    let start = Instant::now();
    let report = repro_4d()?;
    let t = start.elapsed();
    let (a, b) = (&report.channels[0], &report.channels[1]);
    let pass = a.winner == "A4"
        && b.winner == "D4"
        && a.relative_margin > 1e-6
        && b.relative_margin > 1e-6
        && t < Duration::from_secs(300);
    outcome(
        pass,
        format!(
            "first channel {} (margin {:.3e}), second channel {} (margin {:.3e}), {:.2}s (< 300s)",
            a.winner,
            a.relative_margin,
            b.winner,
            b.relative_margin,
            secs(t)
        ),
    )
}

fn class_counts() -> Result<Outcome> {
    let mut counts = Vec::new();
    let mut pass = true;
    let mut small = Duration::ZERO;
    let mut five = Duration::ZERO;
    for (n, bound, expected) in [(2, 10, 1), (3, 8, 1), (4, 12, 2), (5, 7, 3)] {
        let start = Instant::now();
        let records = enumerate_perfect_forms(&root_lattice_form(n)?, &int(bound))?;
        let forms: Vec<QuadraticForm> = records.into_iter().map(|r| r.form).collect();
        let classes = isometry_classes(&forms)?.len();
        let t = start.elapsed();
        if n == 5 {
            five = t;
        } else {
            small += t;
        }
        pass &= classes == expected;
        counts.push(format!("N={n}: {classes} ({} forms, trace <= {bound})", forms.len()));
    }
    pass &= small < Duration::from_secs(120) && five < Duration::from_secs(1800);
    outcome(pass, format!("{}; N<=4 {:.2}s (< 120s), N=5 {:.2}s (< 1800s)", counts.join(", "), secs(small), secs(five)))
}

fn bound_sandwich() -> Result<Outcome> {
    let mut r = rng(4);
    let mut violations = 0;
    for n in 2..=4 {
        let spectra: Vec<ChannelSpectrum> =
            (0..[34, 33, 33][n - 2]).map(|_| random_spectrum(&mut r, n, 1.0, 1.6)).collect();
        let widest = spectra.iter().map(gram_trace_bound).fold(0.0, f64::max);
        let records = enumerate_perfect_forms(&root_lattice_form(n)?, &rational_bound(widest)?)?;
        let forms: Vec<QuadraticForm> = records.into_iter().map(|r| r.form).collect();
        for s in &spectra {
            let winner = best_of(&forms, s)?;
            let power = objective(&winner, s)?;
            let (reduced, _) = minkowski_reduce(&winner)?;
            let lower = lower_bound_energy(&reduced.generator()?, s);
            let upper = upper_bound_energy(s);
            if !(lower - 1e-9 <= power && power <= upper + 1e-9) {
                violations += 1;
            }
        }
    }
    let l2 = [successive_minimum_2(&d4())?, successive_minimum_2(&a4())?];
    outcome(
        violations == 0 && l2 == [int(2), int(2)],
        format!("{violations} sandwich violations over 100 spectra; lambda2(D4) = {}, lambda2(A4) = {}", l2[0], l2[1]),
    )
}

fn gmd_correctness() -> Result<Outcome> {
    let mut r = rng(5);
    let (mut diag, mut orth) = (0.0f64, 0.0f64);
    for k in 0..100 {
        let s = random_spectrum(&mut r, 2 + k % 5, 0.1, 10.0);
        let d = gmd_precoder(&s)?;
        for i in 0..s.dim() {
            diag = diag.max((d.r[(i, i)] - s.det_root()).abs());
        }
        orth = orth.max(orthogonality_residual(&d.w)).max(orthogonality_residual(&d.f));
    }
    outcome(
        diag < 1e-10 && orth < 1e-10,
        format!("max |r_ii - det^(1/N)| = {diag:.2e}, max orthogonality residual = {orth:.2e} (< 1e-10)"),
    )
}

fn suboptimal_improvement() -> Result<Outcome> {
    let mut r = rng(6);
    let (mut worse, mut strict) = (0, 0);
    for k in 0..100 {
        let n = 2 + k % 3;
        let s = random_spectrum(&mut r, n, 0.2, 5.0);
        let sub = suboptimal_precoder(&s, &minkowski_extreme_forms(n)?)?.power;
        let gmd = gmd_result(&s)?.power;
        if sub > gmd + 1e-9 {
            worse += 1;
        }
        if (gmd - sub) / gmd > 1e-6 {
            strict += 1;
        }
    }
    outcome(worse == 0 && strict >= 90, format!("{worse} worse than GMD, {strict}/100 strictly better (>= 90)"))
}

fn mix(g1: &QuadraticForm, g2: &QuadraticForm, k: i128) -> Result<QuadraticForm> {
    let (a, b) = (ratio(k, 10), ratio(10 - k, 10));
    let packed = g1.packed().iter().zip(g2.packed()).map(|(x, y)| a * x + b * y).collect();
    QuadraticForm::from_packed(g1.dim(), packed)
}

fn concavity() -> Result<Outcome> {
    let mut r = rng(7);
    let mut violations = 0;
    for _ in 0..500 {
        let n = r.gen_range(2..=4);
        let (g1, g2) = (random_form(&mut r, n, 64), random_form(&mut r, n, 64));
        let k = r.gen_range(1..=9);
        let s = random_spectrum(&mut r, n, 0.1, 10.0);
        let gamma = k as f64 / 10.0;
        let lhs = objective(&mix(&g1, &g2, k as i128)?, &s)?;
        let rhs = gamma * objective(&g1, &s)? + (1.0 - gamma) * objective(&g2, &s)?;
        if lhs < rhs - 1e-9 {
            violations += 1;
        }
    }
    outcome(violations == 0, format!("{violations} violations over 500 instances"))
}

fn oracle_equivalence() -> Result<Outcome> {
    let mut r = rng(8);
    let mut mismatches = 0;
    for _ in 0..500 {
        let n = r.gen_range(2..=4);
        let g = random_form(&mut r, n, 4);
        if min_distance(&g)?.form_min != brute_force_min(&g, 4) {
            mismatches += 1;
        }
    }
    outcome(mismatches == 0, format!("{mismatches} mismatches against the box-4 scan over 500 forms"))
}

fn reduction_validity() -> Result<Outcome> {
    let mut r = rng(9);
    let mut failures = 0;
    for _ in 0..200 {
        let n = r.gen_range(2..=5);
        let g = random_form(&mut r, n, 64).transform(&random_unimodular(&mut r, n, 3 * n));
        let (gl, z) = minkowski_reduce(&g)?;
        let exact = gl.transform(&z) == g;
        if !(exact && is_minkowski_reduced(&gl, 3) && gl.get(0, 0) == min_distance(&gl)?.form_min) {
            failures += 1;
        }
    }
    outcome(failures == 0, format!("{failures} failures over 200 reduced forms"))
}

fn main() -> ExitCode {
    let criteria: [(&str, Check); 9] = [
        ("planar optimality of the hexagonal form", planar_optimality),
        ("four-dimensional channel switch", four_dimensional_switch),
        ("perfect-form class counts", class_counts),
        ("energy bound sandwich and second minima", bound_sandwich),
        ("geometric mean decomposition", gmd_correctness),
        ("suboptimal precoder improves on GMD", suboptimal_improvement),
        ("concavity of the objective", concavity),
        ("minimum distance against brute force", oracle_equivalence),
        ("Minkowski reduction validity", reduction_validity),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let (pass, detail) = match check() {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        failed += usize::from(!pass);
        println!("{} criterion {}: {name}: {detail}", if pass { "PASS" } else { "FAIL" }, k + 1);
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
