//! Quantum values of Bell expressions over qubit observables.
//!
//! Party `i` measures `d·σ` with a unit Bloch vector `d` per setting, and
//! qubit `i` is the `i`-th most significant bit of a basis index. The
//! see-saw alternates between the top eigenvector of the Bell operator for
//! fixed observables and, for a fixed state, the optimal direction of each
//! observable in turn. Each half-step maximizes a function the other held
//! fixed, so the objective never decreases.

use crate::error::{BellError, Result};
use crate::polytope::{settings_of, BellInequality};
use nalgebra::{convert, DMatrix, DVector, RealField, Vector3};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

pub use nalgebra::Complex;

/// Unit Bloch vectors indexed `[party][setting]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservableDirection<T: RealField> {
    dirs: Vec<[Vector3<T>; 3]>,
}

fn unit_tolerance<T: RealField + Copy>() -> T {
    let floor: T = convert(1e-12);
    let eps = T::default_epsilon() * convert(64.0);
    if eps > floor {
        eps
    } else {
        floor
    }
}

impl<T: RealField + Copy> ObservableDirection<T> {
    pub fn new(dirs: Vec<[Vector3<T>; 3]>) -> Result<Self> {
        let tol = unit_tolerance::<T>();
        for (i, party) in dirs.iter().enumerate() {
            for (n, d) in party.iter().enumerate() {
                if (d.norm() - T::one()).abs() > tol {
                    return Err(BellError::Parse(format!(
                        "direction for party {i} setting {n} is not a unit vector"
                    )));
                }
            }
        }
        Ok(Self { dirs })
    }

    /// Directions in the x–y plane at the given azimuths.
    pub fn from_azimuths(angles: &[[f64; 3]]) -> Self {
        let dirs = angles
            .iter()
            .map(|a| a.map(|phi| Vector3::new(convert(phi.cos()), convert(phi.sin()), T::zero())))
            .collect();
        Self { dirs }
    }

    pub fn parties(&self) -> usize {
        self.dirs.len()
    }

    pub fn get(&self, party: usize, setting: usize) -> &Vector3<T> {
        &self.dirs[party][setting]
    }

    pub fn as_slice(&self) -> &[[Vector3<T>; 3]] {
        &self.dirs
    }

    fn random(parties: usize, rng: &mut ChaCha8Rng) -> Self {
        let mut sample = || loop {
            let v: [f64; 3] = [0, 1, 2].map(|_| StandardNormal.sample(rng));
            let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
            if norm > 1e-6 {
                break Vector3::new(convert(v[0] / norm), convert(v[1] / norm), convert(v[2] / norm));
            }
        };
        Self { dirs: (0..parties).map(|_| [sample(), sample(), sample()]).collect() }
    }
}

type Op2<T> = [[Complex<T>; 2]; 2];

/// `d·σ = [[z, x - iy], [x + iy, -z]]`.
fn pauli_dot<T: RealField + Copy>(d: &Vector3<T>) -> Op2<T> {
    [
        [Complex::new(d.z, T::zero()), Complex::new(d.x, -d.y)],
        [Complex::new(d.x, d.y), Complex::new(-d.z, T::zero())],
    ]
}

fn pauli<T: RealField + Copy>(k: usize) -> Op2<T> {
    let mut e = Vector3::zeros();
    e[k] = T::one();
    pauli_dot(&e)
}

/// Applies a single-qubit operator to qubit `party` of an `N`-qubit state.
fn apply_local<T: RealField + Copy>(
    state: &DVector<Complex<T>>,
    parties: usize,
    party: usize,
    op: &Op2<T>,
) -> DVector<Complex<T>> {
    let bit = 1usize << (parties - 1 - party);
    let mut out = state.clone();
    for idx in 0..state.len() {
        if idx & bit == 0 {
            let (a, b) = (state[idx], state[idx | bit]);
            out[idx] = op[0][0] * a + op[0][1] * b;
            out[idx | bit] = op[1][0] * a + op[1][1] * b;
        }
    }
    out
}

fn kron<T: RealField + Copy>(a: &DMatrix<Complex<T>>, b: &Op2<T>) -> DMatrix<Complex<T>> {
    let n = a.nrows();
    DMatrix::from_fn(2 * n, 2 * n, |r, c| a[(r / 2, c / 2)] * b[r % 2][c % 2])
}

fn real<T: RealField + Copy>(x: i64) -> T {
    convert(x as f64)
}

/// `Σ_t ĝ(t) ⊗_i (d_{i,t_i}·σ)`, a `2^N × 2^N` Hermitian matrix.
pub fn bell_operator<T: RealField + Copy>(
    ineq: &BellInequality,
    dirs: &ObservableDirection<T>,
) -> DMatrix<Complex<T>> {
    let parties = ineq.parties;
    let dim = 1usize << parties;
    let mut op = DMatrix::zeros(dim, dim);
    for (k, &c) in ineq.coeffs.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let settings = settings_of(parties, k);
        let mut term = DMatrix::from_element(1, 1, Complex::new(real::<T>(c), T::zero()));
        for (i, &n) in settings.iter().enumerate() {
            term = kron(&term, &pauli_dot(dirs.get(i, n as usize)));
        }
        op += term;
    }
    op
}

fn expectation<T: RealField + Copy>(state: &DVector<Complex<T>>, phi: &DVector<Complex<T>>) -> T {
    state.dotc(phi).re
}

/// `⟨ψ| B |ψ⟩`.
pub fn evaluate_state<T: RealField + Copy>(
    ineq: &BellInequality,
    dirs: &ObservableDirection<T>,
    state: &DVector<Complex<T>>,
) -> Result<T> {
    let norm = state.norm();
    if (norm - T::one()).abs() > unit_tolerance::<T>() {
        return Err(BellError::NotNormalized { norm: nalgebra::try_convert(norm).unwrap_or(f64::NAN) });
    }
    Ok(expectation(state, &apply_bell(ineq, dirs, state, None)))
}

/// `B ψ`, or with `skip = Some(i, n)` the partial operator collecting the
/// terms whose party `i` uses setting `n`, with party `i`'s factor omitted.
fn apply_bell<T: RealField + Copy>(
    ineq: &BellInequality,
    dirs: &ObservableDirection<T>,
    state: &DVector<Complex<T>>,
    skip: Option<(usize, usize)>,
) -> DVector<Complex<T>> {
    let parties = ineq.parties;
    let mut acc = DVector::zeros(state.len());
    for (k, &c) in ineq.coeffs.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let settings = settings_of(parties, k);
        if let Some((i, n)) = skip {
            if settings[i] as usize != n {
                continue;
            }
        }
        let mut phi = state.clone();
        for (j, &n) in settings.iter().enumerate() {
            if skip.is_some_and(|(i, _)| i == j) {
                continue;
            }
            phi = apply_local(&phi, parties, j, &pauli_dot(dirs.get(j, n as usize)));
        }
        acc += phi * Complex::new(real::<T>(c), T::zero());
    }
    acc
}

/// Top eigenpair of a Hermitian matrix.
fn top_eigen<T: RealField + Copy>(op: &DMatrix<Complex<T>>) -> (T, DVector<Complex<T>>) {
    let eig = op.clone().symmetric_eigen();
    let (best, value) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .fold((0, eig.eigenvalues[0]), |(bi, bv), (i, &v)| if v > bv { (i, v) } else { (bi, bv) });
    let vec = eig.eigenvectors.column(best).into_owned();
    let norm = vec.norm();
    (value, vec.unscale(norm))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeesawOptions {
    pub restarts: usize,
    pub seed: u64,
    pub max_iterations: usize,
    /// Stop once a full sweep improves the objective by less than this.
    pub tolerance: f64,
    pub workers: usize,
}

impl Default for SeesawOptions {
    fn default() -> Self {
        Self { restarts: 32, seed: 0, max_iterations: 10_000, tolerance: 1e-10, workers: 1 }
    }
}

/// Best value found by the see-saw. It is a lower bound on the true quantum maximum.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumValueReport<T: RealField> {
    /// Best value found, on the same integer scale as the coefficients.
    pub quantum_max: T,
    /// `quantum_max / bound`.
    pub violation_ratio: T,
    pub directions: ObservableDirection<T>,
    pub state: DVector<Complex<T>>,
    pub seed: u64,
    pub restarts: usize,
    /// Restart index that produced the optimum.
    pub best_restart: usize,
    pub iterations: usize,
    pub converged: bool,
    /// Direction updates skipped because the setting's optimal vector vanished.
    pub degenerate_updates: usize,
    /// True iff every restart's objective was non-decreasing at every half-step.
    pub monotone: bool,
    /// Objective after every half-step of the best restart.
    pub trace: Vec<T>,
}

struct Run<T: RealField> {
    value: T,
    dirs: ObservableDirection<T>,
    state: DVector<Complex<T>>,
    iterations: usize,
    converged: bool,
    degenerate: usize,
    monotone: bool,
    trace: Vec<T>,
}

fn seesaw_run<T: RealField + Copy>(
    ineq: &BellInequality,
    mut dirs: ObservableDirection<T>,
    opts: &SeesawOptions,
) -> Run<T> {
    let parties = ineq.parties;
    let tolerance: T = convert(opts.tolerance);
    let slack = unit_tolerance::<T>() * convert(1000.0);
    let mut trace: Vec<T> = Vec::new();
    let mut monotone = true;
    let mut degenerate = 0;
    let mut record = |trace: &mut Vec<T>, v: T| {
        if let Some(&last) = trace.last() {
            if v < last - slack * (T::one() + last.abs()) {
                monotone = false;
            }
        }
        trace.push(v);
    };

    let (mut value, mut state) = top_eigen(&bell_operator(ineq, &dirs));
    record(&mut trace, value);
    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.max_iterations {
        iterations += 1;
        let start = value;
        for i in 0..parties {
            for n in 0..3 {
                let partial = apply_bell(ineq, &dirs, &state, Some((i, n)));
                let grad = Vector3::from_fn(|k, _| {
                    expectation(&state, &apply_local(&partial, parties, i, &pauli::<T>(k)))
                });
                let norm = grad.norm();
                if norm < convert(1e-12) {
                    degenerate += 1;
                    continue;
                }
                dirs.dirs[i][n] = grad.unscale(norm);
            }
        }
        let after_dirs = expectation(&state, &apply_bell(ineq, &dirs, &state, None));
        record(&mut trace, after_dirs);
        let (v, s) = top_eigen(&bell_operator(ineq, &dirs));
        value = v;
        state = s;
        record(&mut trace, value);
        if value - start < tolerance {
            converged = true;
            break;
        }
    }
    debug_assert!(monotone, "see-saw objective decreased");
    Run { value, dirs, state, iterations, converged, degenerate, monotone, trace }
}

/// Best of `restarts` see-saw runs from seeded random directions.
///
/// Restart `r` draws its directions from ChaCha8 stream `r` of `seed`, so
/// results do not depend on the worker count. Ties keep the lowest restart.
pub fn seesaw_maximize<T: RealField + Copy>(
    ineq: &BellInequality,
    opts: &SeesawOptions,
) -> Result<QuantumValueReport<T>> {
    if opts.restarts == 0 {
        return Err(BellError::Parse("see-saw needs at least one restart".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers.max(1))
        .build()
        .map_err(|e| BellError::Io(e.to_string()))?;
    let runs: Vec<Run<T>> = pool.install(|| {
        (0..opts.restarts)
            .into_par_iter()
            .map(|r| {
                let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
                rng.set_stream(r as u64);
                seesaw_run(ineq, ObservableDirection::random(ineq.parties, &mut rng), opts)
            })
            .collect()
    });
    let monotone = runs.iter().all(|r| r.monotone);
    let mut best = 0;
    for (r, run) in runs.iter().enumerate() {
        if run.value > runs[best].value {
            best = r;
        }
    }
    let run = runs.into_iter().nth(best).expect("at least one restart");
    let bound: T = real(ineq.bound);
    let cap: T = real(ineq.algebraic_max());
    let quantum_max = if run.value > cap { cap } else { run.value };
    Ok(QuantumValueReport {
        quantum_max,
        violation_ratio: if bound.is_zero() { T::zero() } else { quantum_max / bound },
        directions: run.dirs,
        state: run.state,
        seed: opts.seed,
        restarts: opts.restarts,
        best_restart: best,
        iterations: run.iterations,
        converged: run.converged,
        degenerate_updates: run.degenerate,
        monotone,
        trace: run.trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

    fn chsh() -> BellInequality {
        BellInequality::new(2, vec![8, 8, 0, 8, -8, 0, 0, 0, 0], 16).unwrap()
    }

    fn z() -> Vector3<f64> {
        Vector3::z()
    }

    #[test]
    fn trivial_operator() {
        let mut coeffs = vec![0; 9];
        coeffs[0] = 16;
        let ineq = BellInequality::new(2, coeffs, 16).unwrap();
        let dirs = ObservableDirection::new(vec![[z(), z(), z()], [z(), z(), z()]]).unwrap();
        let op = bell_operator(&ineq, &dirs);
        let (top, _) = top_eigen(&op);
        assert!((top - 16.0).abs() < 1e-12);
        assert!((op[(0, 0)].re - 16.0).abs() < 1e-12 && (op[(1, 1)].re + 16.0).abs() < 1e-12);
    }

    #[test]
    fn tsirelson_angles() {
        let x = Vector3::x();
        let plus = Vector3::new(FRAC_1_SQRT_2, 0.0, FRAC_1_SQRT_2);
        let minus = Vector3::new(FRAC_1_SQRT_2, 0.0, -FRAC_1_SQRT_2);
        let dirs = ObservableDirection::new(vec![[x, z(), z()], [plus, minus, z()]]).unwrap();
        let (top, state) = top_eigen(&bell_operator(&chsh(), &dirs));
        assert!((top - 16.0 * SQRT_2).abs() < 1e-9);
        assert!((evaluate_state(&chsh(), &dirs, &state).unwrap() - top).abs() < 1e-9);
    }

    #[test]
    fn zero_and_separable() {
        let zero = BellInequality::new(2, vec![0; 9], 16).unwrap();
        let dirs = ObservableDirection::<f64>::from_azimuths(&[[0.0, 1.0, 2.0], [0.5, 1.5, 2.5]]);
        assert!(top_eigen(&bell_operator(&zero, &dirs)).0.abs() < 1e-12);
        let mut product = DVector::zeros(4);
        product[0] = Complex::new(1.0, 0.0);
        assert_eq!(evaluate_state(&zero, &dirs, &product).unwrap(), 0.0);
        let x = Vector3::x();
        let plus = Vector3::new(FRAC_1_SQRT_2, 0.0, FRAC_1_SQRT_2);
        let minus = Vector3::new(FRAC_1_SQRT_2, 0.0, -FRAC_1_SQRT_2);
        let dirs = ObservableDirection::new(vec![[x, z(), z()], [plus, minus, z()]]).unwrap();
        assert!(evaluate_state(&chsh(), &dirs, &product).unwrap() <= 16.0 + 1e-12);
        product[0] = Complex::new(0.5, 0.0);
        assert!(matches!(evaluate_state(&chsh(), &dirs, &product), Err(BellError::NotNormalized { .. })));
    }

    #[test]
    fn rejects_non_unit_directions() {
        assert!(ObservableDirection::new(vec![[z() * 2.0, z(), z()], [z(), z(), z()]]).is_err());
    }

    #[test]
    fn seesaw_reaches_tsirelson() {
        let opts = SeesawOptions { seed: 7, ..Default::default() };
        let report = seesaw_maximize::<f64>(&chsh(), &opts).unwrap();
        assert!((report.quantum_max - 16.0 * SQRT_2).abs() < 1e-6);
        assert!(report.monotone && report.converged);
        assert!(report.trace.windows(2).all(|w| w[1] >= w[0] - 1e-9));
        let value = evaluate_state(&chsh(), &report.directions, &report.state).unwrap();
        assert!((value - report.quantum_max).abs() < 1e-9);
    }

    #[test]
    fn seesaw_single_precision() {
        let opts = SeesawOptions { seed: 1, restarts: 8, tolerance: 1e-5, ..Default::default() };
        let report = seesaw_maximize::<f32>(&chsh(), &opts).unwrap();
        assert!((report.violation_ratio - std::f32::consts::SQRT_2).abs() < 1e-3);
    }

    #[test]
    fn seed_determinism_across_workers() {
        let a = seesaw_maximize::<f64>(&chsh(), &SeesawOptions { seed: 3, restarts: 6, ..Default::default() })
            .unwrap();
        let b = seesaw_maximize::<f64>(
            &chsh(),
            &SeesawOptions { seed: 3, restarts: 6, workers: 3, ..Default::default() },
        )
        .unwrap();
        assert_eq!(a, b);
    }
}
