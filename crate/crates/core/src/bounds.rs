//! Energy and trace bounds for unit-minimum lattices under a channel spectrum.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::lattice::{GeneratorMatrix, QuadraticForm};
use crate::linalg::jacobi_eigen;
use crate::precoder::ChannelSpectrum;

/// All bound quantities for one generator and spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundCertificate {
    pub lower_energy: f64,
    pub upper_energy: f64,
    pub gram_trace_ub: f64,
    pub z_trace_ub: f64,
    pub ratio: f64,
}

/// `N · (det L / det S)^{2/N}` for a generator with unit minimum distance.
pub fn lower_bound_energy(l: &GeneratorMatrix, s: &ChannelSpectrum) -> f64 {
    let n = s.dim() as f64;
    n * (l.volume() / s.det()).powf(2.0 / n)
}

/// `N · (1 / det S)^{2/N}`.
pub fn upper_bound_energy(s: &ChannelSpectrum) -> f64 {
    let n = s.dim() as f64;
    n * (1.0 / s.det()).powf(2.0 / n)
}

/// `N · (s₁ / det(S)^{1/N})²`, the trace bound for the optimal unit-minimum Gram matrix.
pub fn gram_trace_bound(s: &ChannelSpectrum) -> f64 {
    let n = s.dim() as f64;
    n * (s.values()[0] / s.det_root()).powi(2)
}

/// `(N / ω_N(G_L)) · (s₁ / det(S)^{1/N})²`, the bound on `tr(Z Zᵀ)` of the optimal basis change.
pub fn z_trace_bound(g_l: &QuadraticForm, s: &ChannelSpectrum) -> Result<f64> {
    let omega = jacobi_eigen(g_l.as_f64())?.values;
    let smallest = *omega.last().expect("dim >= 1");
    Ok(gram_trace_bound(s) / smallest)
}

/// Assembles every bound for `L` (unit minimum) and `S`.
pub fn certificate(l: &GeneratorMatrix, s: &ChannelSpectrum) -> Result<BoundCertificate> {
    let g = l.gram()?;
    let n = s.dim() as f64;
    Ok(BoundCertificate {
        lower_energy: lower_bound_energy(l, s),
        upper_energy: upper_bound_energy(s),
        gram_trace_ub: gram_trace_bound(s),
        z_trace_ub: z_trace_bound(&g, s)?,
        ratio: (1.0 / l.volume()).powf(2.0 / n),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::known::{fcc, hexagonal};
    use crate::perfect::root_lattice_form;

    fn chan(v: &[f64]) -> ChannelSpectrum {
        ChannelSpectrum::new(v.to_vec()).unwrap()
    }

    #[test]
    fn unit_spectrum_gives_dimension() {
        let s = chan(&[1.0, 1.0, 1.0]);
        assert!((upper_bound_energy(&s) - 3.0).abs() < 1e-12);
        assert!((gram_trace_bound(&s) - 3.0).abs() < 1e-12);
        let i3 = QuadraticForm::identity(3);
        let l = i3.generator().unwrap();
        assert!((lower_bound_energy(&l, &s) - 3.0).abs() < 1e-12);
        let c = certificate(&l, &s).unwrap();
        assert!((c.ratio - 1.0).abs() < 1e-12);
        assert!((c.z_trace_ub - 3.0).abs() < 1e-12);
    }

    #[test]
    fn hexagonal_values() {
        let s = chan(&[1.0, 1.0]);
        let l = hexagonal().generator().unwrap();
        assert!((lower_bound_energy(&l, &s) - 3f64.sqrt()).abs() < 1e-12);
        assert!((z_trace_bound(&hexagonal(), &s).unwrap() - 4.0).abs() < 1e-12);
        assert!((certificate(&l, &s).unwrap().ratio - 2.0 / 3f64.sqrt()).abs() < 1e-12);
        let l = fcc().generator().unwrap();
        let c = certificate(&l, &chan(&[1.0, 1.0, 1.0])).unwrap();
        assert!((c.ratio - 2f64.powf(1.0 / 3.0)).abs() < 1e-12);
    }

    #[test]
    fn direct_formula_values() {
        assert!((upper_bound_energy(&chan(&[4.0, 1.0])) - 0.5).abs() < 1e-12);
        assert!((gram_trace_bound(&chan(&[2.0, 1.0])) - 4.0).abs() < 1e-12);
        let s = chan(&[1.0, 0.95, 0.94, 0.93]);
        let det: f64 = 0.95 * 0.94 * 0.93;
        assert!((upper_bound_energy(&s) - 4.0 / det.sqrt()).abs() < 1e-12);
        assert!((gram_trace_bound(&s) - 4.0 / det.sqrt()).abs() < 1e-12);
        assert!((gram_trace_bound(&s) - 4.3893).abs() < 1e-4);
        let l = root_lattice_form(4).unwrap().generator().unwrap();
        let expected = 4.0 * (5f64.sqrt() / 4.0 / det).sqrt();
        assert!((lower_bound_energy(&l, &s) - expected).abs() < 1e-12);
        assert!((lower_bound_energy(&l, &s) - 3.282).abs() < 1e-3);
    }

    #[test]
    fn trace_bound_is_scale_free() {
        let s = chan(&[3.0, 1.5, 0.2]);
        for c in [0.1, 10.0] {
            let t = chan(&s.values().iter().map(|x| x * c).collect::<Vec<_>>());
            assert!((gram_trace_bound(&t) - gram_trace_bound(&s)).abs() < 1e-9 * gram_trace_bound(&s));
        }
    }
}
