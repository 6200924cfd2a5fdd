//! Offline codebooks of received-lattice generators, online selection, and the
//! four-dimensional reproduction run.

use std::collections::HashSet;

use itertools::Itertools;
use nalgebra::DMatrix;
use num_traits::One;
use rayon::prelude::*;

use crate::bounds::{gram_trace_bound, upper_bound_energy, z_trace_bound};
use crate::error::{Error, Result};
use crate::exact::{canonical_sign, rationalize, to_f64, Rational};
use crate::lattice::known::{a4, d4};
use crate::lattice::{min_distance, shortest_vectors, signed_permutation_key, QuadraticForm, UnimodularMatrix};
use crate::perfect::{enumerate_perfect_forms, isometry_classes, root_lattice_form};
use crate::precoder::{build_precoder, objective, ChannelSpectrum, PrecoderResult};
use crate::reduction::minkowski_reduce;

/// Largest dimension [`build_codebook`] accepts.
pub const MAX_CODEBOOK_DIM: usize = 5;

/// Slack added to every float bound before it gates an exact comparison.
pub const BOUND_SLACK: f64 = 1e-9;

/// One candidate received lattice: its Gram matrix `Zᵀ G_L Z` and generator `L Z`.
#[derive(Debug, Clone, PartialEq)]
pub struct CodebookEntry {
    pub form: QuadraticForm,
    pub gen: DMatrix<f64>,
    pub source: String,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BuildParams {
    pub trace_bound: f64,
    pub s1_over_detroot_max: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Codebook {
    pub dim: usize,
    pub entries: Vec<CodebookEntry>,
    pub build_params: BuildParams,
}

/// Smallest rational not below `x + BOUND_SLACK·max(1, |x|)`, on a fine grid.
pub fn rational_bound(x: f64) -> Result<Rational> {
    let padded = x + BOUND_SLACK * x.abs().max(1.0);
    let r = rationalize(padded, 1_000_000)?;
    Ok(if to_f64(&r) < padded { r + Rational::new(1, 1_000_000) } else { r })
}

/// All `N`-column selections from `vecset` (taken up to sign) whose determinant is ±1, one per
/// column-permutation and sign class.
pub fn enumerate_unimodular_from(vecset: &[Vec<i64>], n: usize) -> Result<Vec<UnimodularMatrix>> {
    if let Some(v) = vecset.iter().find(|v| v.len() != n) {
        return Err(Error::DimError { expected: n, got: v.len() });
    }
    let mut vs: Vec<Vec<i64>> = vecset
        .iter()
        .filter(|v| v.iter().any(|x| *x != 0))
        .map(|v| {
            let mut v = v.clone();
            canonical_sign(&mut v);
            v
        })
        .collect();
    vs.sort();
    vs.dedup();
    let mut out = Vec::new();
    for cols in vs.iter().cloned().combinations(n) {
        if let Ok(z) = UnimodularMatrix::from_columns(&cols) {
            out.push(z);
        }
    }
    Ok(out)
}

/// All unimodular `Z` with `tr(Zᵀ G_L Z) <= trace_cap`, one per column-permutation and sign
/// class. Columns are drawn from `shortest_vectors(G_L, cap − (N − 1)·λ)` in increasing order
/// with a running trace budget.
pub fn enumerate_unimodular_in_sphere(g_l: &QuadraticForm, trace_cap: f64) -> Result<Vec<UnimodularMatrix>> {
    let n = g_l.dim();
    let lambda = min_distance(g_l)?.form_min;
    let min = to_f64(&lambda) * n as f64;
    if trace_cap + BOUND_SLACK * trace_cap.abs().max(1.0) < min {
        return Err(Error::EmptyBudget { cap: trace_cap, min });
    }
    let cap = rational_bound(trace_cap)?;
    let per_column = cap - lambda * Rational::from_integer(n as i128 - 1);
    let vectors = shortest_vectors(g_l, &per_column)?;
    let mut out = Vec::new();
    let mut chosen: Vec<usize> = Vec::with_capacity(n);
    assemble(&vectors, n, lambda, cap, Rational::from_integer(0), 0, &mut chosen, &mut out)?;
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn assemble(
    vectors: &[(Vec<i64>, Rational)],
    n: usize,
    lambda: Rational,
    cap: Rational,
    used: Rational,
    from: usize,
    chosen: &mut Vec<usize>,
    out: &mut Vec<UnimodularMatrix>,
) -> Result<()> {
    if chosen.len() == n {
        let cols: Vec<Vec<i64>> = chosen.iter().map(|&k| vectors[k].0.clone()).collect();
        if let Ok(z) = UnimodularMatrix::from_columns(&cols) {
            out.push(z);
        }
        return Ok(());
    }
    let remaining = Rational::from_integer((n - chosen.len() - 1) as i128);
    for k in from..vectors.len() {
        let spent = used + vectors[k].1;
        // later columns cost at least λ each, and values only grow along the list
        if spent + remaining * lambda.max(vectors[k].1) > cap {
            break;
        }
        chosen.push(k);
        assemble(vectors, n, lambda, cap, spent, k + 1, chosen, out)?;
        chosen.pop();
    }
    Ok(())
}

/// Codebook for spectra with `s₁ / det(S)^{1/N} <= s1_over_detroot_max`.
///
/// Perfect forms are enumerated up to the Gram trace bound `N · ratio²`, one reduced
/// representative is kept per isometry class, and every unimodular `Z` with
/// `tr(Zᵀ G_L Z)` inside the same bound contributes the entry `Zᵀ G_L Z` with generator `L Z`.
/// Entries are unique up to signed permutation and sorted by trace, then packed entries.
pub fn build_codebook(n: usize, s1_over_detroot_max: f64) -> Result<Codebook> {
    if !(2..=MAX_CODEBOOK_DIM).contains(&n) {
        return Err(Error::InvalidDimension(n));
    }
    if !(s1_over_detroot_max.is_finite() && s1_over_detroot_max >= 1.0) {
        return Err(Error::Input(format!("ratio s1/det(S)^(1/N) must be at least 1, got {s1_over_detroot_max}")));
    }
    let trace_bound = n as f64 * s1_over_detroot_max * s1_over_detroot_max;
    let records = enumerate_perfect_forms(&root_lattice_form(n)?, &rational_bound(trace_bound)?)?;
    let forms: Vec<QuadraticForm> = records.into_iter().map(|r| r.form).collect();
    let classes = isometry_classes(&forms)?;

    let reduced: Vec<QuadraticForm> =
        classes.iter().map(|c| minkowski_reduce(&forms[c[0]]).map(|(g, _)| g)).collect::<Result<_>>()?;
    // worst case over the stored reduced forms: the smallest ω_N
    let ratio_spectrum = worst_case_spectrum(n, s1_over_detroot_max)?;
    let z_cap = reduced
        .iter()
        .map(|g| z_trace_bound(g, &ratio_spectrum))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);

    let per_class: Vec<Vec<(QuadraticForm, DMatrix<f64>)>> = reduced
        .par_iter()
        .map(|g_l| -> Result<_> {
            let l = g_l.generator()?;
            enumerate_unimodular_in_sphere(g_l, trace_bound)?
                .into_iter()
                .map(|z| {
                    if z.frobenius_sq() as f64 > z_cap + BOUND_SLACK * z_cap {
                        return Err(Error::NumericalError(format!(
                            "basis change outside the sphere of radius² {z_cap}"
                        )));
                    }
                    Ok((g_l.transform(&z), l.matrix() * z.to_f64()))
                })
                .collect()
        })
        .collect::<Result<_>>()?;

    let mut seen = HashSet::new();
    let mut entries = Vec::new();
    for (c, found) in per_class.into_iter().enumerate() {
        for (k, (form, gen)) in found.into_iter().enumerate() {
            if seen.insert(signed_permutation_key(&form)) {
                entries.push(CodebookEntry { form, gen, source: format!("class{c}/z{k}") });
            }
        }
    }
    entries.sort_by(|a, b| a.form.trace().cmp(&b.form.trace()).then_with(|| a.form.packed().cmp(b.form.packed())));
    Ok(Codebook { dim: n, entries, build_params: BuildParams { trace_bound, s1_over_detroot_max } })
}

/// A spectrum `(r^{N−1}, 1, …, 1)·c` has `s₁ / det(S)^{1/N}` equal to `r^{(N−1)/N}`; this
/// returns one with the requested ratio, for evaluating the ratio-only bounds.
fn worst_case_spectrum(n: usize, ratio: f64) -> Result<ChannelSpectrum> {
    let top = ratio.powf(n as f64 / (n as f64 - 1.0));
    let mut s = vec![1.0; n];
    s[0] = top;
    ChannelSpectrum::new(s)
}

/// Least-power entry under `S` (first entry in canonical order on ties), assembled as a precoder.
pub fn select_precoder(s: &ChannelSpectrum, cb: &Codebook) -> Result<PrecoderResult> {
    if cb.dim != s.dim() {
        return Err(Error::DimError { expected: cb.dim, got: s.dim() });
    }
    let powers: Vec<f64> = cb.entries.par_iter().map(|e| objective(&e.form, s)).collect::<Result<_>>()?;
    let mut best: Option<(f64, &CodebookEntry)> = None;
    for (p, e) in powers.into_iter().zip(&cb.entries) {
        if best.is_none_or(|(bp, _)| p < bp) {
            best = Some((p, e));
        }
    }
    let (_, e) = best.ok_or_else(|| Error::Input("codebook is empty".into()))?;
    build_precoder(&e.form, s)
}

/// Least objective over the perfect forms with trace inside `gram_trace_bound(S)`, found by
/// full enumeration from `A_N`.
pub fn optimal_precoder(s: &ChannelSpectrum) -> Result<PrecoderResult> {
    let bound = rational_bound(gram_trace_bound(s))?;
    let records = enumerate_perfect_forms(&root_lattice_form(s.dim())?, &bound)?;
    let forms: Vec<QuadraticForm> = records.into_iter().map(|r| r.form).collect();
    best_of(&forms, s).and_then(|g| build_precoder(&g, s))
}

/// The form with least objective (first on ties).
pub fn best_of(forms: &[QuadraticForm], s: &ChannelSpectrum) -> Result<QuadraticForm> {
    let mut best: Option<(f64, &QuadraticForm)> = None;
    for g in forms {
        let p = objective(g, s)?;
        if best.is_none_or(|(bp, _)| p < bp) {
            best = Some((p, g));
        }
    }
    best.map(|(_, g)| g.clone()).ok_or_else(|| Error::Input("no candidate forms".into()))
}

/// Outcome for one channel of the four-dimensional reproduction.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelOutcome {
    pub spectrum: Vec<f64>,
    pub winner: &'static str,
    pub objective_a4: f64,
    pub objective_d4: f64,
    pub relative_margin: f64,
    pub gram_trace_ub: f64,
    pub upper_energy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReproReport {
    pub lambda1: [Rational; 2],
    pub lambda2: [Rational; 2],
    pub min_vector_pairs: [usize; 2],
    pub basis_changes: [usize; 2],
    pub channels: Vec<ChannelOutcome>,
}

/// Spectra of the two four-dimensional example channels.
pub const REPRO_CHANNELS: [[f64; 4]; 2] = [[1.0, 0.95, 0.94, 0.93], [1.0, 0.99, 0.94, 0.93]];

/// Compares `D4` and `A4` on the two example channels. Because the Gram trace bound stays below
/// `(N − 1)λ₁ + λ₂ = 5`, every column of an optimal basis change is a minimal vector, so the
/// candidates are `Zᵀ G Z` for `Z` assembled from `Min(G)`.
pub fn repro_4d() -> Result<ReproReport> {
    let lattices = [a4(), d4()];
    let mut lambda1 = [Rational::one(); 2];
    let mut lambda2 = [Rational::one(); 2];
    let mut pairs = [0; 2];
    let mut counts = [0; 2];
    let mut candidates: Vec<Vec<QuadraticForm>> = Vec::new();
    for (k, g) in lattices.iter().enumerate() {
        let mv = min_distance(g)?;
        lambda1[k] = mv.form_min;
        lambda2[k] = crate::lattice::successive_minimum_2(g)?;
        pairs[k] = mv.len();
        let zs = enumerate_unimodular_from(&mv.vectors, 4)?;
        counts[k] = zs.len();
        candidates.push(zs.iter().map(|z| g.transform(z)).collect());
    }

    let mut channels = Vec::new();
    for (idx, spectrum) in REPRO_CHANNELS.iter().enumerate() {
        let s = ChannelSpectrum::new(spectrum.to_vec())?;
        let ub = gram_trace_bound(&s);
        let pruning_limit = to_f64(&(lambda1[0] * Rational::from_integer(3) + lambda2[0]));
        if ub >= pruning_limit {
            return Err(Error::ReproFailure(format!("trace bound {ub} is not below {pruning_limit}")));
        }
        let best = |forms: &[QuadraticForm]| -> Result<f64> {
            forms.iter().map(|g| objective(g, &s)).try_fold(f64::INFINITY, |m, p| p.map(|p| m.min(p)))
        };
        let (pa, pd) = (best(&candidates[0])?, best(&candidates[1])?);
        let winner = if pa < pd { "A4" } else { "D4" };
        let expected = if idx == 0 { "A4" } else { "D4" };
        let relative_margin = (pa - pd).abs() / pa.min(pd);
        if winner != expected {
            return Err(Error::ReproFailure(format!(
                "{expected} should win for {spectrum:?}, got {winner} ({pa} vs {pd})"
            )));
        }
        channels.push(ChannelOutcome {
            spectrum: spectrum.to_vec(),
            winner,
            objective_a4: pa,
            objective_d4: pd,
            relative_margin,
            gram_trace_ub: ub,
            upper_energy: upper_bound_energy(&s),
        });
    }
    Ok(ReproReport { lambda1, lambda2, min_vector_pairs: pairs, basis_changes: counts, channels })
}
