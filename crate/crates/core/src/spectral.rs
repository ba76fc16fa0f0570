//! Spectra: exact Cayley eigenvalues via character sums, dense numeric
//! spectra, the nontrivial-eigenvalue extractor, jumbledness certificates,
//! and the exponential-sum audit for the cubic connection set.

use crate::construct::CayleySpec;
use crate::graph::{sample_discrepancy, CertProvenance, Graph, JumbledCert};
use nalgebra::{DMatrix, SymmetricEigen};
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default vertex cap for dense eigendecompositions.
pub const DENSE_CAP: usize = 4096;

const POWER_TOL: f64 = 1e-7;
const POWER_MAX_ITERS: usize = 10_000;

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("graph with {0} vertices exceeds the dense cap {1}")]
    TooLarge(usize, usize),
    #[error("graph is not regular; use a sampled certificate instead")]
    Irregular,
    #[error("bad characteristic {0}: need a prime different from 3")]
    BadCharacteristic(u64),
    #[error("prime {0} exceeds the audit cap 200")]
    PrimeTooLarge(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpectralMethod {
    CharacterSum,
    DenseNumeric,
}

/// Full real spectrum in descending order plus the two summary numbers the
/// certificates need: the top eigenvalue and the largest absolute value among
/// the rest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralSummary {
    pub eigenvalues: Vec<f64>,
    pub lambda1: f64,
    pub lambda: f64,
    pub method: SpectralMethod,
    pub tolerance: f64,
}

fn summarize(mut evs: Vec<f64>, method: SpectralMethod, tolerance: f64) -> SpectralSummary {
    evs.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let lambda1 = evs.first().copied().unwrap_or(0.0);
    let lambda = if evs.len() >= 2 {
        evs[1].abs().max(evs.last().unwrap().abs())
    } else {
        0.0
    };
    SpectralSummary { eigenvalues: evs, lambda1, lambda, method, tolerance }
}

/// Kahan-compensated accumulator.
#[derive(Default)]
struct Compensated {
    sum: f64,
    c: f64,
}

impl Compensated {
    fn add(&mut self, x: f64) {
        let y = x - self.c;
        let t = self.sum + y;
        self.c = (t - self.sum) - y;
        self.sum = t;
    }
}

/// Spectrum of a Cayley graph on an abelian group by direct character sums:
/// one eigenvalue per group element a, the sum over the connection set of the
/// character values. A symmetric connection set forces a real spectrum; the
/// residual imaginary parts are asserted below 1e-9.
pub fn cayley_spectrum(spec: &CayleySpec) -> SpectralSummary {
    let dims = spec.dims();
    let n = spec.order();
    let mut evs = Vec::with_capacity(n as usize);
    let mut max_im = 0.0f64;
    let mut a = vec![0u64; dims.len()];
    for _ in 0..n {
        let mut re = Compensated::default();
        let mut im = Compensated::default();
        for s in spec.set() {
            let mut phase = 0.0f64;
            for ((&ai, &si), &di) in a.iter().zip(s).zip(dims) {
                phase += (ai * si % di) as f64 / di as f64;
            }
            let angle = 2.0 * std::f64::consts::PI * phase.fract();
            re.add(angle.cos());
            im.add(angle.sin());
        }
        max_im = max_im.max(im.sum.abs());
        evs.push(re.sum);
        // Row-major increment of the group tuple.
        for i in (0..dims.len()).rev() {
            a[i] += 1;
            if a[i] < dims[i] {
                break;
            }
            a[i] = 0;
        }
    }
    assert!(max_im < 1e-9, "symmetric connection set must give a real spectrum");
    summarize(evs, SpectralMethod::CharacterSum, 1e-9)
}

pub fn spectrum_dense(g: &Graph) -> Result<SpectralSummary, SpectralError> {
    spectrum_dense_with_cap(g, DENSE_CAP)
}

pub fn spectrum_dense_with_cap(g: &Graph, cap: usize) -> Result<SpectralSummary, SpectralError> {
    let n = g.n();
    if n > cap {
        return Err(SpectralError::TooLarge(n, cap));
    }
    if n == 0 {
        return Ok(summarize(Vec::new(), SpectralMethod::DenseNumeric, 0.0));
    }
    let m = DMatrix::from_fn(n, n, |i, j| if g.has_edge(i, j) { 1.0 } else { 0.0 });
    let eig = SymmetricEigen::new(m);
    let evs: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    Ok(summarize(evs, SpectralMethod::DenseNumeric, 1e-8 * n as f64))
}

/// Largest nontrivial eigenvalue in absolute value.
///
/// Regular graphs use the spectrum directly (dense below the cap, deflated
/// power iteration above it). Irregular graphs get the largest singular value
/// of A - (2e/n^2) J, computed densely; this is the definition every sampled
/// certificate and report quotes for them.
pub fn lambda_nontrivial(g: &Graph) -> Result<f64, SpectralError> {
    lambda_nontrivial_with_cap(g, DENSE_CAP)
}

pub fn lambda_nontrivial_with_cap(g: &Graph, cap: usize) -> Result<f64, SpectralError> {
    let n = g.n();
    if g.regular_degree().is_some() {
        if n <= cap {
            return Ok(spectrum_dense_with_cap(g, cap)?.lambda);
        }
        return Ok(power_lambda_regular(g));
    }
    if n > cap {
        return Err(SpectralError::TooLarge(n, cap));
    }
    let density = 2.0 * g.edge_count() as f64 / (n as f64 * n as f64);
    let m = DMatrix::from_fn(n, n, |i, j| {
        (if g.has_edge(i, j) { 1.0 } else { 0.0 }) - density
    });
    let eig = SymmetricEigen::new(m);
    Ok(eig.eigenvalues.iter().fold(0.0f64, |acc, &ev| acc.max(ev.abs())))
}

/// Power iteration on the orthogonal complement of the all-ones vector.
fn power_lambda_regular(g: &Graph) -> f64 {
    let n = g.n();
    let mut rng = ChaCha8Rng::seed_from_u64(0xC0FFEE);
    let mut x: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
    let mut y = vec![0.0f64; n];
    let mut last = 0.0f64;
    for iter in 0..POWER_MAX_ITERS {
        // Deflate against the all-ones vector (the trivial d-eigenvector).
        let mean: f64 = x.iter().sum::<f64>() / n as f64;
        for xv in x.iter_mut() {
            *xv -= mean;
        }
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return 0.0;
        }
        for xv in x.iter_mut() {
            *xv /= norm;
        }
        for (u, yv) in y.iter_mut().enumerate() {
            let mut acc = 0.0;
            for v in g.neighbors(u) {
                acc += x[v];
            }
            *yv = acc;
        }
        let ymean: f64 = y.iter().sum::<f64>() / n as f64;
        let est = y.iter().map(|v| (v - ymean) * (v - ymean)).sum::<f64>().sqrt();
        std::mem::swap(&mut x, &mut y);
        if iter > 2 && (est - last).abs() <= POWER_TOL * est.max(1.0) {
            return est;
        }
        last = est;
    }
    last
}

/// Eigenvalue-derived discrepancy certificate (d/n, lambda) for a regular
/// graph, with the optimality ratio lambda / sqrt(d).
pub fn jumbled_cert(g: &Graph) -> Result<JumbledCert, SpectralError> {
    let d = g.regular_degree().ok_or(SpectralError::Irregular)?;
    let lambda = lambda_nontrivial(g)?;
    let ratio = (d > 0).then(|| lambda / (d as f64).sqrt());
    Ok(JumbledCert {
        density: Ratio::new(d as i64, g.n() as i64),
        alpha: lambda,
        provenance: CertProvenance::EigenvalueDerived,
        optimality_ratio: ratio,
    })
}

/// Sampled lower-bound certificate for graphs the eigenvalue route cannot
/// serve (irregular ones): alpha is the sampled discrepancy at the graph's
/// own density.
pub fn sampled_cert(g: &Graph, trials: u64, seed: u64) -> JumbledCert {
    let n = g.n() as i64;
    let density = if n == 0 { Ratio::new(0, 1) } else { Ratio::new(2 * g.edge_count() as i64, n * n) };
    let p = if n == 0 { 0.0 } else { 2.0 * g.edge_count() as f64 / (n * n) as f64 };
    let alpha = sample_discrepancy(g, p, trials, seed);
    JumbledCert {
        density,
        alpha,
        provenance: CertProvenance::SampledLowerBound,
        optimality_ratio: None,
    }
}

/// Maximum modulus over nonzero (a1, a2) of the exponential sum
/// sum_x omega_p^(a1 x + a2 x^3), asserted against the 2 sqrt(p) bound the
/// cubic construction's eigenvalue estimate rests on.
pub fn weil_audit(p: u64) -> Result<f64, SpectralError> {
    if p > 200 {
        return Err(SpectralError::PrimeTooLarge(p));
    }
    let prime = p >= 2 && (2..p).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d));
    if !prime || p == 3 {
        return Err(SpectralError::BadCharacteristic(p));
    }
    let pu = p as usize;
    let tau = 2.0 * std::f64::consts::PI / p as f64;
    let cos_t: Vec<f64> = (0..pu).map(|k| (tau * k as f64).cos()).collect();
    let sin_t: Vec<f64> = (0..pu).map(|k| (tau * k as f64).sin()).collect();
    let cube: Vec<u64> = (0..p).map(|x| x * x % p * x % p).collect();
    let mut worst = 0.0f64;
    for a1 in 0..p {
        for a2 in 0..p {
            if a1 == 0 && a2 == 0 {
                continue;
            }
            let mut re = 0.0f64;
            let mut im = 0.0f64;
            for x in 0..pu {
                let idx = ((a1 * x as u64 + a2 * cube[x]) % p) as usize;
                re += cos_t[idx];
                im += sin_t[idx];
            }
            let modulus = (re * re + im * im).sqrt();
            if modulus > worst {
                worst = modulus;
            }
        }
    }
    assert!(
        worst <= 2.0 * (p as f64).sqrt() + 1e-9,
        "exponential-sum bound violated at p={p}: {worst}"
    );
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::{cayley_graph, cubic_cayley, cubic_cayley_spec, CayleySpec};
    use crate::field::FieldSpec;

    fn assert_multiset_close(a: &[f64], b: &[f64], tol: f64) {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() <= tol, "{x} vs {y}");
        }
    }

    #[test]
    fn dense_small_spectra() {
        let s = spectrum_dense(&Graph::complete(3)).unwrap();
        assert_multiset_close(&s.eigenvalues, &[2.0, -1.0, -1.0], 1e-10);
        assert_eq!(s.lambda1, s.eigenvalues[0]);
        assert!((s.lambda - 1.0).abs() < 1e-10);

        let c5 = spectrum_dense(&Graph::cycle(5)).unwrap();
        let phi = 2.0 * (2.0 * std::f64::consts::PI / 5.0).cos();
        let psi = 2.0 * (4.0 * std::f64::consts::PI / 5.0).cos();
        assert_multiset_close(&c5.eigenvalues, &[2.0, phi, phi, psi, psi], 1e-10);
    }

    #[test]
    fn petersen_spectrum_is_strongly_regular() {
        let s = spectrum_dense(&Graph::petersen()).unwrap();
        let mut expect = vec![3.0];
        expect.extend(std::iter::repeat_n(1.0, 5));
        expect.extend(std::iter::repeat_n(-2.0, 4));
        assert_multiset_close(&s.eigenvalues, &expect, 1e-9);
    }

    #[test]
    fn character_sum_matching() {
        let spec = CayleySpec::new(vec![2, 2], vec![vec![1, 1]]).unwrap();
        let s = cayley_spectrum(&spec);
        assert_multiset_close(&s.eigenvalues, &[1.0, 1.0, -1.0, -1.0], 1e-12);
    }

    #[test]
    fn character_sum_matches_dense_on_cubic() {
        for p in [5u64, 13] {
            let spec = cubic_cayley_spec(p).unwrap();
            let g = cayley_graph(&spec).unwrap();
            let cs = cayley_spectrum(&spec);
            let dn = spectrum_dense(&g).unwrap();
            assert_multiset_close(&cs.eigenvalues, &dn.eigenvalues, 1e-8);
            assert!((cs.lambda1 - (p - 1) as f64).abs() < 1e-9);
        }
    }

    #[test]
    fn spectrum_moments() {
        let g = Graph::random_gnp(60, 0.4, 5);
        let s = spectrum_dense(&g).unwrap();
        let trace: f64 = s.eigenvalues.iter().sum();
        let sq: f64 = s.eigenvalues.iter().map(|v| v * v).sum();
        assert!(trace.abs() < 60.0 * 1e-6);
        assert!((sq - 2.0 * g.edge_count() as f64).abs() < 60.0 * 1e-6);
    }

    #[test]
    fn lambda_examples() {
        assert!((lambda_nontrivial(&Graph::complete(8)).unwrap() - 1.0).abs() < 1e-9);

        // Two disjoint triangles: disconnected regular graph, lambda = d = 2.
        let two_k3 =
            Graph::from_edges(6, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]).unwrap();
        assert!((lambda_nontrivial(&two_k3).unwrap() - 2.0).abs() < 1e-9);

        let g = cubic_cayley(13).unwrap();
        let lam = lambda_nontrivial(&g).unwrap();
        assert!(lam <= 2.0 * 13f64.sqrt() + 1.0 + 1e-6);
    }

    #[test]
    fn power_iteration_agrees_with_dense() {
        for g in [Graph::cycle(100), cubic_cayley(7).unwrap(), Graph::petersen()] {
            let dense = lambda_nontrivial(&g).unwrap();
            let iter = lambda_nontrivial_with_cap(&g, 5).unwrap();
            assert!(
                (dense - iter).abs() < 1e-4,
                "power iteration {iter} vs dense {dense}"
            );
        }
    }

    #[test]
    fn jumbled_certs() {
        let g = cubic_cayley(11).unwrap();
        let cert = jumbled_cert(&g).unwrap();
        assert_eq!(cert.density, Ratio::new(10, 121));
        assert!(cert.alpha <= 2.0 * 11f64.sqrt() + 1.0 + 1e-6);
        assert_eq!(cert.provenance, CertProvenance::EigenvalueDerived);
        assert!(cert.optimality_ratio.unwrap() > 0.0);

        let c5 = Graph::cycle(5);
        let cert = jumbled_cert(&c5).unwrap();
        assert_eq!(cert.density, Ratio::new(2, 5));

        // Orthogonality graphs are irregular; the eigenvalue route refuses.
        let f5 = FieldSpec::new(5, 1).unwrap();
        let ak = crate::construct::ak_graph(2, &f5).unwrap();
        let degs = ak.degrees();
        assert!(degs.iter().any(|&d| d != degs[0]), "degree scan: AK(2,5) is irregular");
        assert!(matches!(jumbled_cert(&ak), Err(SpectralError::Irregular)));
        let sc = sampled_cert(&ak, 200, 1);
        assert_eq!(sc.provenance, CertProvenance::SampledLowerBound);
    }

    #[test]
    fn weil_audit_small_primes() {
        let w5 = weil_audit(5).unwrap();
        assert!(w5 <= 2.0 * 5f64.sqrt());
        let w7 = weil_audit(7).unwrap();
        assert!(w7 <= 2.0 * 7f64.sqrt());
        assert!(matches!(weil_audit(3), Err(SpectralError::BadCharacteristic(3))));
        assert!(matches!(weil_audit(9), Err(SpectralError::BadCharacteristic(9))));
        assert!(matches!(weil_audit(211), Err(SpectralError::PrimeTooLarge(211))));
    }

    #[test]
    fn weil_pure_linear_sums_vanish() {
        // a2 = 0, a1 != 0: a full geometric sum over the group is exactly 0.
        let p = 11u64;
        let tau = 2.0 * std::f64::consts::PI / p as f64;
        for a1 in 1..p {
            let (mut re, mut im) = (0.0f64, 0.0f64);
            for x in 0..p {
                let ang = tau * ((a1 * x % p) as f64);
                re += ang.cos();
                im += ang.sin();
            }
            assert!((re * re + im * im).sqrt() < 1e-9);
        }
    }
}
