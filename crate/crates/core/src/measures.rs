//! Gaussian correlation measures on quadrature covariance matrices
//! (vacuum variance ½).

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lyapunov::{physicality_tolerance, symplectic_eigenvalues, CovarianceMatrix};
use crate::params::Mode;
use crate::scalar::{lit, to_f64, Real};

/// Measures below `CLIP` (or `1e3·ε` in lower precision) are rounding noise
/// around an uncorrelated state and reported as exactly 0.
pub const CLIP: f64 = 1e-10;
/// Contangle residuals down to `−RESIDUAL_CLIP` are reported as 0.
pub const RESIDUAL_CLIP: f64 = 1e-8;

pub fn reduce<T: Real>(v: &CovarianceMatrix<T>, modes: &[Mode]) -> Result<DMatrix<T>> {
    v.reduce(modes)
}

fn det2<T: Real>(m: &DMatrix<T>, r: usize, c: usize) -> T {
    m[(r, c)] * m[(r + 1, c + 1)] - m[(r, c + 1)] * m[(r + 1, c)]
}

/// Σ = det A + det B + 2·sign·det C for the blocks of a two-mode covariance;
/// `sign = −1` gives the partially transposed invariant.
fn seralian<T: Real>(v4: &DMatrix<T>, sign: T) -> T {
    det2(v4, 0, 0) + det2(v4, 2, 2) + sign * lit::<T>(2.0) * det2(v4, 0, 2)
}

/// Smaller symplectic eigenvalue of the partial transpose, written as
/// `2 det V / (Σ̃ + √(Σ̃² − 4 det V))` to avoid cancellation.
fn partial_transpose_nu<T: Real>(v4: &DMatrix<T>) -> Result<T> {
    let sigma = seralian(v4, -T::one());
    let det = v4.determinant();
    let four: T = lit(4.0);
    let disc = sigma * sigma - four * det;
    if disc < -physicality_tolerance::<T>() * sigma * sigma {
        return Err(Error::Nonphysical(format!("Σ̃² − 4 det V = {disc} < 0")));
    }
    let denom = sigma + disc.max(T::zero()).sqrt();
    if !(denom > T::zero()) {
        return Err(Error::Nonphysical(format!("Σ̃ = {sigma} is not positive")));
    }
    Ok((lit::<T>(2.0) * det / denom).max(T::zero()).sqrt())
}

/// Two-mode uncertainty principle: V > 0, det V ≥ 1/16 and
/// 16 det V − 4Σ + 1 ≥ 0, i.e. both symplectic eigenvalues ≥ ½.
fn check_physical_two_mode<T: Real>(v4: &DMatrix<T>) -> Result<()> {
    if v4.shape() != (4, 4) {
        return Err(Error::Domain(format!(
            "expected a 4×4 covariance, got {:?}",
            v4.shape()
        )));
    }
    if v4.iter().any(|x| !x.is_finite()) {
        return Err(Error::Nonphysical(
            "covariance has non-finite entries".into(),
        ));
    }
    let tol = physicality_tolerance::<T>();
    let (da, db) = (det2(v4, 0, 0), det2(v4, 2, 2));
    let det = v4.determinant();
    let sigma = seralian(v4, T::one());
    let scale = T::one() + sigma.abs() * lit(4.0);
    if !(da > T::zero() && db > T::zero() && det > T::zero()) {
        return Err(Error::Nonphysical(format!(
            "covariance not positive definite (det V = {det})"
        )));
    }
    let uncertainty = det * lit(16.0) - sigma * lit(4.0) + T::one();
    if uncertainty < -tol * scale {
        return Err(Error::Nonphysical(format!(
            "uncertainty relation violated: 16 det V − 4Σ + 1 = {uncertainty}"
        )));
    }
    if det * lit(16.0) < T::one() - tol * scale {
        return Err(Error::Nonphysical(format!("det V = {det} below 1/16")));
    }
    Ok(())
}

fn clip<T: Real>(x: T) -> T {
    let noise = lit::<T>(CLIP).max(T::default_epsilon() * lit(1e3));
    if x < noise {
        T::zero()
    } else {
        x
    }
}

/// Logarithmic negativity `max(0, −ln 2η⁻)` of a two-mode state.
pub fn log_negativity<T: Real>(v4: &DMatrix<T>) -> Result<T> {
    check_physical_two_mode(v4)?;
    let eta = partial_transpose_nu(v4)?;
    Ok(clip(-(eta * lit(2.0)).ln()))
}

/// Which block of a two-mode covariance does the steering.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    FirstToSecond,
    SecondToFirst,
}

/// Gaussian steering `max(0, ½ ln(det V_s / 4 det V))` with `V_s` the
/// steering party's block.
pub fn gaussian_steering<T: Real>(v4: &DMatrix<T>, direction: Direction) -> Result<T> {
    check_physical_two_mode(v4)?;
    let det = v4.determinant();
    let k = match direction {
        Direction::FirstToSecond => 0,
        Direction::SecondToFirst => 2,
    };
    let det_s = det2(v4, k, k);
    if !(det > T::zero()) || !(det_s > T::zero()) {
        return Err(Error::Nonphysical(format!(
            "nonpositive determinant (det V = {det}, det V_s = {det_s})"
        )));
    }
    let half: T = lit(0.5);
    Ok(clip(half * (det_s / (det * lit(4.0))).ln()))
}

/// Entanglement across `focus | rest`: `max(0, −ln 2ν̃)` where ν̃ is the
/// smallest symplectic eigenvalue after flipping the momentum of `focus`.
pub fn bipartition_negativity<T: Real>(v: &DMatrix<T>, focus: usize) -> Result<T> {
    let mut pv = v.clone();
    let y = 2 * focus + 1;
    for k in 0..pv.nrows() {
        if k != y {
            pv[(y, k)] = -pv[(y, k)];
            pv[(k, y)] = -pv[(k, y)];
        }
    }
    let nu = symplectic_eigenvalues(&pv)?[0];
    Ok(clip(-(nu * lit(2.0)).ln()))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Bipartition {
    /// Position (0, 1, 2) of the singled-out mode.
    pub focus: usize,
    /// C_{i|jk}.
    pub one_vs_two: f64,
    /// C_{i|j} and C_{i|k} in the order of the other two modes.
    pub one_vs_one: [f64; 2],
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Contangle {
    pub bipartitions: [Bipartition; 3],
    /// Minimum residual contangle, unclipped.
    pub min: f64,
}

/// Residual contangles `C_{i|jk} − C_{i|j} − C_{i|k}` of a three-mode
/// state for each choice of `i`, and their minimum.
pub fn residual_contangle<T: Real>(v6: &DMatrix<T>) -> Result<Contangle> {
    if v6.shape() != (6, 6) {
        return Err(Error::Domain(format!(
            "expected a 6×6 covariance, got {:?}",
            v6.shape()
        )));
    }
    let cov = CovarianceMatrix::new(v6.clone())?;
    let nu = cov.symplectic_eigenvalues()?;
    if nu[0] < lit::<T>(0.5) - physicality_tolerance::<T>() {
        return Err(Error::Nonphysical(format!(
            "symplectic eigenvalue {} below ½",
            nu[0]
        )));
    }
    let mut pair = [[0.0f64; 3]; 3];
    #[allow(clippy::needless_range_loop)]
    for i in 0..3 {
        for j in i + 1..3 {
            let e = to_f64(log_negativity(&cov.reduce_indices(&[i, j])?)?);
            pair[i][j] = e * e;
            pair[j][i] = e * e;
        }
    }
    let mut parts = [Bipartition {
        focus: 0,
        one_vs_two: 0.0,
        one_vs_one: [0.0; 2],
        residual: 0.0,
    }; 3];
    for (i, part) in parts.iter_mut().enumerate() {
        let e = to_f64(bipartition_negativity(cov.matrix(), i)?);
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        let (j, k) = (j.min(k), j.max(k));
        let one_vs_two = e * e;
        *part = Bipartition {
            focus: i,
            one_vs_two,
            one_vs_one: [pair[i][j], pair[i][k]],
            residual: one_vs_two - pair[i][j] - pair[i][k],
        };
    }
    let min = parts
        .iter()
        .map(|p| p.residual)
        .fold(f64::INFINITY, f64::min);
    Ok(Contangle {
        bipartitions: parts,
        min,
    })
}

/// Bidirectional contrast `|v₊ − v₋| / (v₊ + v₋)`, 0 when both vanish.
pub fn contrast_ratio(plus: f64, minus: f64) -> Result<f64> {
    if !(plus >= 0.0) || !(minus >= 0.0) {
        return Err(Error::Domain(format!(
            "contrast needs nonnegative values, got {plus}, {minus}"
        )));
    }
    let sum = plus + minus;
    if sum == 0.0 {
        return Ok(0.0);
    }
    Ok(((plus - minus).abs() / sum).min(1.0))
}

/// `(V_xx + V_yy − 1)/2` for one mode.
pub fn effective_phonon_number<T: Real>(v: &CovarianceMatrix<T>, mode: Mode) -> Result<f64> {
    let b = v.reduce(&[mode])?;
    let n = (to_f64(b[(0, 0)] + b[(1, 1)]) - 1.0) / 2.0;
    if n < -1e-8 {
        return Err(Error::Nonphysical(format!(
            "negative occupation {n} for {mode}"
        )));
    }
    Ok(n.max(0.0))
}

/// Groups of measures a caller can ask for.
#[derive(
    Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, serde::Deserialize,
)]
#[serde(rename_all = "lowercase")]
pub enum MeasureKind {
    Entanglement,
    Steering,
    Contangle,
    Phonons,
}

impl MeasureKind {
    pub const ALL: [MeasureKind; 4] = [
        MeasureKind::Entanglement,
        MeasureKind::Steering,
        MeasureKind::Contangle,
        MeasureKind::Phonons,
    ];
}

/// All unordered mode pairs in canonical order.
pub fn pairs() -> Vec<(Mode, Mode)> {
    let m = Mode::ALL;
    (0..5)
        .flat_map(|i| (i + 1..5).map(move |j| (m[i], m[j])))
        .collect()
}

/// All mode triples in canonical order.
pub fn triples() -> Vec<(Mode, Mode, Mode)> {
    let m = Mode::ALL;
    let mut out = Vec::new();
    for i in 0..5 {
        for j in i + 1..5 {
            for k in j + 1..5 {
                out.push((m[i], m[j], m[k]));
            }
        }
    }
    out
}

/// Measures at one stable point. Pair keys are canonical (earlier mode first).
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct MeasureSet {
    #[serde(serialize_with = "named_keys")]
    pub entanglement: BTreeMap<(Mode, Mode), f64>,
    /// Keyed by (steering party, steered party).
    #[serde(serialize_with = "steering_keys")]
    pub steering: BTreeMap<(Mode, Mode), f64>,
    /// Clipped minimum residual contangle per triple.
    #[serde(serialize_with = "named_keys")]
    pub contangle: BTreeMap<(Mode, Mode, Mode), f64>,
    pub phonons: BTreeMap<Mode, f64>,
}

trait ModeKey {
    fn key(&self) -> String;
}

impl ModeKey for (Mode, Mode) {
    fn key(&self) -> String {
        format!("{}_{}", self.0, self.1)
    }
}

impl ModeKey for (Mode, Mode, Mode) {
    fn key(&self) -> String {
        format!("{}_{}_{}", self.0, self.1, self.2)
    }
}

fn steering_keys<S: serde::Serializer>(
    map: &BTreeMap<(Mode, Mode), f64>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_map(map.iter().map(|((a, b), v)| (format!("{a}_to_{b}"), v)))
}

/// Tuple keys become `b1_b2`-style strings so the set serializes to JSON.
fn named_keys<K: ModeKey, S: serde::Serializer>(
    map: &BTreeMap<K, f64>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_map(map.iter().map(|(k, v)| (k.key(), v)))
}

fn canonical(a: Mode, b: Mode) -> (Mode, Mode) {
    (a.min(b), a.max(b))
}

impl MeasureSet {
    pub fn compute<T: Real>(v: &CovarianceMatrix<T>, kinds: &[MeasureKind]) -> Result<Self> {
        let mut out = MeasureSet::default();
        for (a, b) in pairs() {
            let v4 = v.reduce(&[a, b])?;
            if kinds.contains(&MeasureKind::Entanglement) {
                out.entanglement
                    .insert((a, b), to_f64(log_negativity(&v4)?));
            }
            if kinds.contains(&MeasureKind::Steering) {
                out.steering.insert(
                    (a, b),
                    to_f64(gaussian_steering(&v4, Direction::FirstToSecond)?),
                );
                out.steering.insert(
                    (b, a),
                    to_f64(gaussian_steering(&v4, Direction::SecondToFirst)?),
                );
            }
        }
        if kinds.contains(&MeasureKind::Contangle) {
            for (a, b, c) in triples() {
                let r = residual_contangle(&v.reduce(&[a, b, c])?)?.min;
                let r = if (-RESIDUAL_CLIP..0.0).contains(&r) {
                    0.0
                } else {
                    r
                };
                out.contangle.insert((a, b, c), r);
            }
        }
        if kinds.contains(&MeasureKind::Phonons) {
            for m in Mode::MECHANICAL {
                out.phonons.insert(m, effective_phonon_number(v, m)?);
            }
        }
        Ok(out)
    }

    pub fn entanglement(&self, a: Mode, b: Mode) -> Option<f64> {
        self.entanglement.get(&canonical(a, b)).copied()
    }

    pub fn steering(&self, from: Mode, to: Mode) -> Option<f64> {
        self.steering.get(&(from, to)).copied()
    }

    pub fn contangle(&self, a: Mode, b: Mode, c: Mode) -> Option<f64> {
        let mut k = [a, b, c];
        k.sort();
        self.contangle.get(&(k[0], k[1], k[2])).copied()
    }

    pub fn phonons(&self, m: Mode) -> Option<f64> {
        self.phonons.get(&m).copied()
    }

    /// Pairs violating "steerable ⇒ entangled".
    pub fn hierarchy_violations(&self) -> Vec<(Mode, Mode)> {
        self.steering
            .iter()
            .filter(|(&(a, b), &s)| s > 0.0 && self.entanglement(a, b).is_some_and(|e| e <= 0.0))
            .map(|(&k, _)| k)
            .collect()
    }
}

/// Column names for the requested kinds, in emission order.
pub fn column_names(kinds: &[MeasureKind]) -> Vec<String> {
    let mut cols = Vec::new();
    for kind in MeasureKind::ALL {
        if !kinds.contains(&kind) {
            continue;
        }
        match kind {
            MeasureKind::Entanglement => {
                cols.extend(pairs().iter().map(|(a, b)| format!("E_{a}_{b}")))
            }
            MeasureKind::Steering => {
                for (a, b) in pairs() {
                    cols.push(format!("S_{a}_to_{b}"));
                    cols.push(format!("S_{b}_to_{a}"));
                }
            }
            MeasureKind::Contangle => {
                cols.extend(triples().iter().map(|(a, b, c)| format!("R_{a}_{b}_{c}")))
            }
            MeasureKind::Phonons => cols.extend(Mode::MECHANICAL.iter().map(|m| format!("n_{m}"))),
        }
    }
    cols
}

impl MeasureSet {
    /// Values aligned with [`column_names`] for the same kinds.
    pub fn values(&self, kinds: &[MeasureKind]) -> Vec<Option<f64>> {
        let mut vals = Vec::new();
        for kind in MeasureKind::ALL {
            if !kinds.contains(&kind) {
                continue;
            }
            match kind {
                MeasureKind::Entanglement => {
                    vals.extend(pairs().iter().map(|&(a, b)| self.entanglement(a, b)))
                }
                MeasureKind::Steering => {
                    for (a, b) in pairs() {
                        vals.push(self.steering(a, b));
                        vals.push(self.steering(b, a));
                    }
                }
                MeasureKind::Contangle => {
                    vals.extend(triples().iter().map(|&(a, b, c)| self.contangle(a, b, c)))
                }
                MeasureKind::Phonons => {
                    vals.extend(Mode::MECHANICAL.iter().map(|&m| self.phonons(m)))
                }
            }
        }
        vals
    }
}
