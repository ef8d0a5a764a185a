//! Random matrix generation for both elliptic ensembles.
//!
//! Every Monte Carlo task draws from its own counter-addressed ChaCha
//! stream: identical (seed, stream_id) pairs reproduce the matrix
//! sequence bit for bit, distinct stream ids are independent. Gaussians
//! come from the ziggurat sampler; the choice is recorded in run metadata
//! since bit-reproducibility across versions depends on it.
//!
//! Entry draw order is fixed: the symmetric/Hermitian part first (upper
//! triangle row-major, diagonal included), then the second part.

use ndarray::Array2;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::finite_n::{EnsembleKind, EnsembleSpec};

/// Name of the Gaussian generation scheme, for run metadata.
pub const GAUSSIAN_SCHEME: &str = "ziggurat(rand_distr-0.5)";

/// Addressed randomness: one stream per Monte Carlo task.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeededStream {
    pub seed: u64,
    pub stream_id: u64,
}

impl SeededStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        SeededStream { seed, stream_id }
    }

    /// The ChaCha generator positioned at this stream.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }
}

/// Entries of one sampled matrix.
#[derive(Debug, Clone)]
pub enum MatrixEntries {
    Real(Array2<f64>),
    Complex(Array2<Complex64>),
}

/// One sampled matrix together with its generating spec.
#[derive(Debug, Clone)]
pub struct MatrixSample {
    pub spec: EnsembleSpec,
    pub entries: MatrixEntries,
}

fn normal(rng: &mut ChaCha8Rng, std: f64) -> f64 {
    let g: f64 = StandardNormal.sample(rng);
    g * std
}

/// Draw one eGinUE matrix: X = √(1+τ) H₁ + i √(1-τ) H₂ with H₁, H₂
/// independent Hermitian Gaussians (diagonal variance 1/2, off-diagonal
/// real/imaginary variances 1/4).
pub fn sample_eginue(spec: &EnsembleSpec, stream: SeededStream) -> Result<MatrixSample> {
    if spec.kind != EnsembleKind::ComplexElliptic {
        return Err(Error::domain("sample_eginue expects the eginue ensemble"));
    }
    let n = spec.n as usize;
    let mut rng = stream.rng();
    let hermitian = |rng: &mut ChaCha8Rng| -> Array2<Complex64> {
        let mut h = Array2::from_elem((n, n), Complex64::new(0.0, 0.0));
        for i in 0..n {
            h[(i, i)] = Complex64::new(normal(rng, std::f64::consts::FRAC_1_SQRT_2), 0.0);
            for j in (i + 1)..n {
                let v = Complex64::new(normal(rng, 0.5), normal(rng, 0.5));
                h[(i, j)] = v;
                h[(j, i)] = v.conj();
            }
        }
        h
    };
    let h1 = hermitian(&mut rng);
    let h2 = hermitian(&mut rng);
    let c1 = (1.0 + spec.tau).sqrt();
    let c2 = (1.0 - spec.tau).sqrt();
    let x = Array2::from_shape_fn((n, n), |ij| {
        c1 * h1[ij] + Complex64::new(0.0, c2) * h2[ij]
    });
    Ok(MatrixSample {
        spec: *spec,
        entries: MatrixEntries::Complex(x),
    })
}

/// Draw one eGinOE matrix: X = √(1+τ) H + √(1-τ) A with H real symmetric
/// (diagonal variance 1, off-diagonal 1/2) and A real antisymmetric
/// (off-diagonal variance 1/2, zero diagonal).
pub fn sample_eginoe(spec: &EnsembleSpec, stream: SeededStream) -> Result<MatrixSample> {
    if spec.kind != EnsembleKind::RealElliptic {
        return Err(Error::domain("sample_eginoe expects the eginoe ensemble"));
    }
    let n = spec.n as usize;
    let mut rng = stream.rng();
    let mut h = Array2::zeros((n, n));
    for i in 0..n {
        h[(i, i)] = normal(&mut rng, 1.0);
        for j in (i + 1)..n {
            let v = normal(&mut rng, std::f64::consts::FRAC_1_SQRT_2);
            h[(i, j)] = v;
            h[(j, i)] = v;
        }
    }
    let mut a = Array2::zeros((n, n));
    for i in 0..n {
        for j in (i + 1)..n {
            let v = normal(&mut rng, std::f64::consts::FRAC_1_SQRT_2);
            a[(i, j)] = v;
            a[(j, i)] = -v;
        }
    }
    let c1 = (1.0 + spec.tau).sqrt();
    let c2 = (1.0 - spec.tau).sqrt();
    let x = Array2::from_shape_fn((n, n), |ij| c1 * h[ij] + c2 * a[ij]);
    Ok(MatrixSample {
        spec: *spec,
        entries: MatrixEntries::Real(x),
    })
}

/// Draw one matrix from whichever ensemble the spec names.
pub fn sample(spec: &EnsembleSpec, stream: SeededStream) -> Result<MatrixSample> {
    match spec.kind {
        EnsembleKind::ComplexElliptic => sample_eginue(spec, stream),
        EnsembleKind::RealElliptic => sample_eginoe(spec, stream),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eginue(n: u32, tau: f64) -> EnsembleSpec {
        EnsembleSpec::new(EnsembleKind::ComplexElliptic, n, tau).unwrap()
    }

    fn eginoe(n: u32, tau: f64) -> EnsembleSpec {
        EnsembleSpec::new(EnsembleKind::RealElliptic, n, tau).unwrap()
    }

    fn complex_entries(s: &MatrixSample) -> &Array2<Complex64> {
        match &s.entries {
            MatrixEntries::Complex(m) => m,
            _ => panic!("expected complex entries"),
        }
    }

    fn real_entries(s: &MatrixSample) -> &Array2<f64> {
        match &s.entries {
            MatrixEntries::Real(m) => m,
            _ => panic!("expected real entries"),
        }
    }

    #[test]
    fn identical_streams_reproduce_bits() {
        let spec = eginue(6, 0.37);
        let a = sample_eginue(&spec, SeededStream::new(99, 5)).unwrap();
        let b = sample_eginue(&spec, SeededStream::new(99, 5)).unwrap();
        assert_eq!(complex_entries(&a), complex_entries(&b));
        let c = sample_eginue(&spec, SeededStream::new(99, 6)).unwrap();
        assert_ne!(complex_entries(&a), complex_entries(&c));
    }

    #[test]
    fn tau_one_is_exactly_hermitian() {
        let spec = eginue(8, 1.0);
        let s = sample_eginue(&spec, SeededStream::new(3, 0)).unwrap();
        let x = complex_entries(&s);
        for i in 0..8 {
            for j in 0..8 {
                assert_eq!(x[(i, j)], x[(j, i)].conj());
            }
        }
    }

    #[test]
    fn tau_one_is_exactly_symmetric() {
        let spec = eginoe(8, 1.0);
        let s = sample_eginoe(&spec, SeededStream::new(3, 0)).unwrap();
        let x = real_entries(&s);
        for i in 0..8 {
            for j in 0..8 {
                assert_eq!(x[(i, j)], x[(j, i)]);
            }
        }
    }

    /// Transposed-pair and magnitude moments against their stated values.
    #[test]
    fn eginue_moments() {
        let tau = 0.6;
        let spec = eginue(4, tau);
        let m = 200_000usize;
        let (mut s_pair, mut s_pair2) = (0.0f64, 0.0f64);
        let (mut s_abs, mut s_abs2) = (0.0f64, 0.0f64);
        let (mut s_diag, mut s_diag2) = (0.0f64, 0.0f64);
        for t in 0..m {
            let x = sample_eginue(&spec, SeededStream::new(11, t as u64)).unwrap();
            let x = complex_entries(&x);
            let pair = (x[(0, 1)] * x[(1, 0)]).re;
            let abs = x[(0, 1)].norm_sqr();
            let diag = x[(2, 2)].norm_sqr();
            s_pair += pair;
            s_pair2 += pair * pair;
            s_abs += abs;
            s_abs2 += abs * abs;
            s_diag += diag;
            s_diag2 += diag * diag;
        }
        let check = |sum: f64, sum2: f64, expect: f64, label: &str| {
            let mean = sum / m as f64;
            let var = (sum2 / m as f64 - mean * mean).max(0.0);
            let se = (var / m as f64).sqrt();
            assert!(
                (mean - expect).abs() <= 4.0 * se,
                "{label}: mean={mean} expect={expect} se={se}"
            );
        };
        check(s_pair, s_pair2, tau, "E[X_ij X_ji]");
        check(s_abs, s_abs2, 1.0, "E[|X_ij|^2]");
        check(s_diag, s_diag2, 1.0, "E[|X_ii|^2]");
    }

    #[test]
    fn eginoe_moments() {
        let tau = 0.5;
        let spec = eginoe(4, tau);
        let m = 200_000usize;
        let (mut s_pair, mut s_pair2) = (0.0f64, 0.0f64);
        let (mut s_diag, mut s_diag2) = (0.0f64, 0.0f64);
        let (mut s_off, mut s_off2) = (0.0f64, 0.0f64);
        for t in 0..m {
            let x = sample_eginoe(&spec, SeededStream::new(12, t as u64)).unwrap();
            let x = real_entries(&x);
            let pair = x[(0, 1)] * x[(1, 0)];
            let diag = x[(3, 3)] * x[(3, 3)];
            let off = x[(1, 2)] * x[(1, 2)];
            s_pair += pair;
            s_pair2 += pair * pair;
            s_diag += diag;
            s_diag2 += diag * diag;
            s_off += off;
            s_off2 += off * off;
        }
        let check = |sum: f64, sum2: f64, expect: f64, label: &str| {
            let mean = sum / m as f64;
            let var = (sum2 / m as f64 - mean * mean).max(0.0);
            let se = (var / m as f64).sqrt();
            assert!(
                (mean - expect).abs() <= 4.0 * se,
                "{label}: mean={mean} expect={expect} se={se}"
            );
        };
        check(s_pair, s_pair2, tau, "E[X_ij X_ji]");
        check(s_diag, s_diag2, 1.0 + tau, "E[X_ii^2]");
        check(s_off, s_off2, 1.0, "E[X_ij^2]");
    }

    #[test]
    fn distinct_streams_uncorrelated() {
        let spec = eginoe(4, 0.3);
        let m = 50_000usize;
        let (mut s, mut s2) = (0.0f64, 0.0f64);
        for t in 0..m {
            let a = sample_eginoe(&spec, SeededStream::new(7, 2 * t as u64)).unwrap();
            let b = sample_eginoe(&spec, SeededStream::new(7, 2 * t as u64 + 1)).unwrap();
            let prod = real_entries(&a)[(0, 1)] * real_entries(&b)[(0, 1)];
            s += prod;
            s2 += prod * prod;
        }
        let mean = s / m as f64;
        let var = (s2 / m as f64 - mean * mean).max(0.0);
        let se = (var / m as f64).sqrt();
        assert!(mean.abs() <= 4.0 * se, "cross-stream correlation {mean} vs se {se}");
    }

    /// Importance-weight identity against the analytic matrix densities:
    /// sampling at τ' and reweighting by the τ/τ' density ratio (including
    /// the closed-form normalization constants) must average to one. This
    /// pins the entry variances to the stated joint density, not just the
    /// second moments.
    #[test]
    fn jpdf_importance_weight_eginue() {
        let n = 3u32;
        let (tau_gen, tau_target) = (0.3f64, 0.4f64);
        let spec = eginue(n, tau_gen);
        let q_form = |x: &Array2<Complex64>, tau: f64| -> f64 {
            let mut tr_xxd = 0.0;
            let mut tr_x2 = Complex64::new(0.0, 0.0);
            for i in 0..n as usize {
                for j in 0..n as usize {
                    tr_xxd += x[(i, j)].norm_sqr();
                    tr_x2 += x[(i, j)] * x[(j, i)];
                }
            }
            (tr_xxd - tau * tr_x2.re) / (1.0 - tau * tau)
        };
        // D_{N,τ} ∝ (1-τ²)^{N²/2}; the measure factor cancels in the ratio.
        let nn = (n * n) as f64;
        let ln_const_ratio = 0.5
            * nn
            * ((1.0 - tau_gen * tau_gen).ln() - (1.0 - tau_target * tau_target).ln());
        let m = 200_000usize;
        let (mut s, mut s2) = (0.0f64, 0.0f64);
        for t in 0..m {
            let smp = sample_eginue(&spec, SeededStream::new(21, t as u64)).unwrap();
            let x = complex_entries(&smp);
            let w = (q_form(x, tau_gen) - q_form(x, tau_target) + ln_const_ratio).exp();
            s += w;
            s2 += w * w;
        }
        let mean = s / m as f64;
        let var = (s2 / m as f64 - mean * mean).max(0.0);
        let se = (var / m as f64).sqrt();
        assert!(
            (mean - 1.0).abs() <= 4.0 * se,
            "E[w]={mean} se={se}: sampler does not match the analytic density"
        );
    }

    #[test]
    fn jpdf_importance_weight_eginoe() {
        let n = 3u32;
        let (tau_gen, tau_target) = (0.35f64, 0.45f64);
        let spec = eginoe(n, tau_gen);
        let q_form = |x: &Array2<f64>, tau: f64| -> f64 {
            let mut tr_xxt = 0.0;
            let mut tr_x2 = 0.0;
            for i in 0..n as usize {
                for j in 0..n as usize {
                    tr_xxt += x[(i, j)] * x[(i, j)];
                    tr_x2 += x[(i, j)] * x[(j, i)];
                }
            }
            (tr_xxt - tau * tr_x2) / (2.0 * (1.0 - tau * tau))
        };
        // C_{N,τ} ∝ (1+τ)^{N(N+1)/4} (1-τ)^{N(N-1)/4}.
        let np = (n * (n + 1)) as f64 / 4.0;
        let nm = (n * (n - 1)) as f64 / 4.0;
        let ln_const_ratio = np * ((1.0 + tau_gen).ln() - (1.0 + tau_target).ln())
            + nm * ((1.0 - tau_gen).ln() - (1.0 - tau_target).ln());
        let m = 200_000usize;
        let (mut s, mut s2) = (0.0f64, 0.0f64);
        for t in 0..m {
            let smp = sample_eginoe(&spec, SeededStream::new(22, t as u64)).unwrap();
            let x = real_entries(&smp);
            let w = (q_form(x, tau_gen) - q_form(x, tau_target) + ln_const_ratio).exp();
            s += w;
            s2 += w * w;
        }
        let mean = s / m as f64;
        let var = (s2 / m as f64 - mean * mean).max(0.0);
        let se = (var / m as f64).sqrt();
        assert!(
            (mean - 1.0).abs() <= 4.0 * se,
            "E[w]={mean} se={se}: sampler does not match the analytic density"
        );
    }
}
