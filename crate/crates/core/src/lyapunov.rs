//! Stability gate and steady-state covariance from `A V + V Aᵀ + D = 0`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{self, RealSchur};
use crate::params::Mode;
use crate::scalar::{lit, to_f64, Real};

/// Oracle size limit, in modes.
pub const ORACLE_MAX_MODES: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Stability {
    pub stable: bool,
    /// Largest real part in the drift spectrum.
    pub max_real: f64,
}

/// Stable iff every eigenvalue satisfies `Re λ < −10⁻⁶·max|A_ij|`.
pub fn stability_check<T: Real>(drift: &DMatrix<T>) -> Result<Stability> {
    let eig = linalg::eigenvalues(drift)?;
    let max_real = eig
        .iter()
        .map(|z| to_f64(z.re))
        .fold(f64::NEG_INFINITY, f64::max);
    let margin = 1e-6 * to_f64(linalg::max_abs(drift));
    Ok(Stability {
        stable: max_real < -margin,
        max_real,
    })
}

/// Symmetric steady-state covariance with vacuum variance ½.
#[derive(Clone, Debug, PartialEq)]
pub struct CovarianceMatrix<T: Real = f64> {
    v: DMatrix<T>,
}

impl<T: Real> CovarianceMatrix<T> {
    /// Wraps a matrix after symmetrizing it.
    pub fn new(v: DMatrix<T>) -> Result<Self> {
        if !v.is_square() || !v.nrows().is_multiple_of(2) {
            return Err(Error::Domain(format!(
                "covariance must be square with even size, got {}×{}",
                v.nrows(),
                v.ncols()
            )));
        }
        let half: T = lit(0.5);
        let sym = (&v + v.transpose()) * half;
        Ok(Self { v: sym })
    }

    pub fn matrix(&self) -> &DMatrix<T> {
        &self.v
    }

    pub fn into_matrix(self) -> DMatrix<T> {
        self.v
    }

    pub fn modes(&self) -> usize {
        self.v.nrows() / 2
    }

    /// Quadrature block of the listed modes, in the listed order.
    pub fn reduce_indices(&self, modes: &[usize]) -> Result<DMatrix<T>> {
        for (i, &m) in modes.iter().enumerate() {
            if m >= self.modes() {
                return Err(Error::Domain(format!("mode index {m} out of range")));
            }
            if modes[..i].contains(&m) {
                return Err(Error::Domain(format!("mode index {m} repeated")));
            }
        }
        let rows: Vec<usize> = modes.iter().flat_map(|&m| [2 * m, 2 * m + 1]).collect();
        Ok(self.v.select_rows(&rows).select_columns(&rows))
    }

    pub fn reduce(&self, modes: &[Mode]) -> Result<DMatrix<T>> {
        let idx: Vec<usize> = modes.iter().map(|m| m.index()).collect();
        self.reduce_indices(&idx)
    }

    pub fn symplectic_eigenvalues(&self) -> Result<Vec<T>> {
        symplectic_eigenvalues(&self.v)
    }

    /// All symplectic eigenvalues ≥ ½ − tolerance.
    pub fn is_physical(&self) -> Result<bool> {
        let min = self
            .symplectic_eigenvalues()?
            .into_iter()
            .fold(T::max_value().unwrap(), |a, b| a.min(b));
        Ok(min >= lit::<T>(0.5) - physicality_tolerance::<T>())
    }
}

pub(crate) fn physicality_tolerance<T: Real>() -> T {
    lit::<T>(1e-8).max(T::default_epsilon() * lit(1e3))
}

/// Moduli of the eigenvalues of `J V` with `J = ⊕ [[0, 1], [−1, 0]]`,
/// one per conjugate pair, ascending.
pub fn symplectic_eigenvalues<T: Real>(v: &DMatrix<T>) -> Result<Vec<T>> {
    let n = v.nrows();
    if !v.is_square() || !n.is_multiple_of(2) {
        return Err(Error::Domain(
            "symplectic spectrum needs an even square matrix".into(),
        ));
    }
    let mut jv = DMatrix::<T>::zeros(n, n);
    for k in (0..n).step_by(2) {
        for c in 0..n {
            jv[(k, c)] = v[(k + 1, c)];
            jv[(k + 1, c)] = -v[(k, c)];
        }
    }
    let mut moduli: Vec<T> = linalg::eigenvalues(&jv)?
        .into_iter()
        .map(|z| z.re.hypot(z.im))
        .collect();
    moduli.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let half: T = lit(0.5);
    Ok(moduli.chunks(2).map(|p| (p[0] + p[1]) * half).collect())
}

fn residual_tolerance<T: Real>() -> f64 {
    1e-9f64.max(1e4 * to_f64(T::default_epsilon()))
}

/// ‖A V + V Aᵀ + D‖_F / ‖D‖_F.
pub fn relative_residual<T: Real>(
    drift: &DMatrix<T>,
    diffusion: &DMatrix<T>,
    v: &DMatrix<T>,
) -> f64 {
    let r = drift * v + v * drift.transpose() + diffusion;
    let scale = to_f64(diffusion.norm());
    let r = to_f64(r.norm());
    if scale > 0.0 {
        r / scale
    } else {
        r
    }
}

fn check_shapes<T: Real>(drift: &DMatrix<T>, diffusion: &DMatrix<T>) -> Result<()> {
    let n = drift.nrows();
    if !drift.is_square() || diffusion.shape() != (n, n) || !n.is_multiple_of(2) {
        return Err(Error::Domain(format!(
            "drift {:?} and diffusion {:?} must be equal even square shapes",
            drift.shape(),
            diffusion.shape()
        )));
    }
    Ok(())
}

fn finish<T: Real>(
    drift: &DMatrix<T>,
    diffusion: &DMatrix<T>,
    v: DMatrix<T>,
) -> Result<CovarianceMatrix<T>> {
    let cov = CovarianceMatrix::new(v)?;
    let residual = relative_residual(drift, diffusion, cov.matrix());
    let tolerance = residual_tolerance::<T>();
    if !(residual < tolerance) {
        return Err(Error::Residual {
            residual,
            tolerance,
        });
    }
    Ok(cov)
}

/// Bartels–Stewart solve. Rejects drift matrices failing [`stability_check`].
pub fn solve_lyapunov<T: Real>(
    drift: &DMatrix<T>,
    diffusion: &DMatrix<T>,
) -> Result<CovarianceMatrix<T>> {
    check_shapes(drift, diffusion)?;
    let stability = stability_check(drift)?;
    if !stability.stable {
        return Err(Error::Unstable {
            max_real: stability.max_real,
        });
    }
    let v = bartels_stewart(drift, &(-diffusion))?;
    finish(drift, diffusion, v)
}

/// Solves `A X + X Aᵀ = C` through the real Schur form of `A`.
pub fn bartels_stewart<T: Real>(a: &DMatrix<T>, c: &DMatrix<T>) -> Result<DMatrix<T>> {
    let schur = RealSchur::new(a)?;
    let (q, t) = (&schur.q, &schur.t);
    let f = q.transpose() * c * q;
    let blocks = schur.blocks();
    let n = a.nrows();
    let mut y = DMatrix::<T>::zeros(n, n);

    for bk in blocks.iter().rev() {
        let (k0, p) = (bk.start, bk.size);
        for bl in blocks.iter().rev() {
            let (l0, q_) = (bl.start, bl.size);
            let mut rhs = f.view((k0, l0), (p, q_)).into_owned();
            // rows below block k are solved already
            if k0 + p < n {
                rhs -=
                    t.view((k0, k0 + p), (p, n - k0 - p)) * y.view((k0 + p, l0), (n - k0 - p, q_));
            }
            // columns right of block l in this block row are solved already
            if l0 + q_ < n {
                rhs -= y.view((k0, l0 + q_), (p, n - l0 - q_))
                    * t.view((l0, l0 + q_), (q_, n - l0 - q_)).transpose();
            }
            let tkk = t.view((k0, k0), (p, p)).into_owned();
            let tll = t.view((l0, l0), (q_, q_)).into_owned();
            let block = small_sylvester(&tkk, &tll, &rhs)?;
            y.view_mut((k0, l0), (p, q_)).copy_from(&block);
        }
    }
    Ok(q * y * q.transpose())
}

/// `T_k Y + Y T_lᵀ = R` for blocks of size ≤ 2, as a ≤4×4 dense system.
fn small_sylvester<T: Real>(
    tk: &DMatrix<T>,
    tl: &DMatrix<T>,
    r: &DMatrix<T>,
) -> Result<DMatrix<T>> {
    let (p, q) = (tk.nrows(), tl.nrows());
    let m = p * q;
    // column-major vec: (I_q ⊗ T_k + T_l ⊗ I_p) vec Y = vec R
    let mut k = [[T::zero(); 4]; 4];
    let mut b = [T::zero(); 4];
    for j in 0..q {
        for i in 0..p {
            let row = j * p + i;
            b[row] = r[(i, j)];
            for i2 in 0..p {
                k[row][j * p + i2] += tk[(i, i2)];
            }
            for j2 in 0..q {
                k[row][j2 * p + i] += tl[(j, j2)];
            }
        }
    }
    let x = gauss_solve(&mut k, &mut b, m)?;
    Ok(DMatrix::from_fn(p, q, |i, j| x[j * p + i]))
}

fn gauss_solve<T: Real>(k: &mut [[T; 4]; 4], b: &mut [T; 4], m: usize) -> Result<[T; 4]> {
    let scale = k.iter().flatten().fold(T::zero(), |s, v| s.max(v.abs()));
    let tiny = T::default_epsilon() * scale;
    for col in 0..m {
        let piv = (col..m)
            .max_by(|&x, &y| {
                k[x][col]
                    .abs()
                    .partial_cmp(&k[y][col].abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .unwrap();
        if !(k[piv][col].abs() > tiny) {
            return Err(Error::Singular(
                "Sylvester block (eigenvalues λ_i + λ_j ≈ 0)".into(),
            ));
        }
        k.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..m {
            let f = k[row][col] / k[col][col];
            let pivot_row = k[col];
            for (dst, v) in k[row].iter_mut().zip(pivot_row).skip(col) {
                *dst -= f * v;
            }
            let v = b[col];
            b[row] -= f * v;
        }
    }
    let mut x = [T::zero(); 4];
    for row in (0..m).rev() {
        let mut s = b[row];
        for c in row + 1..m {
            s -= k[row][c] * x[c];
        }
        x[row] = s / k[row][row];
    }
    Ok(x)
}

/// Dense Kronecker solve `(I ⊗ A + A ⊗ I) vec V = −vec D`, independent of
/// the Schur path. Limited to [`ORACLE_MAX_MODES`] modes.
pub fn solve_lyapunov_oracle<T: Real>(
    drift: &DMatrix<T>,
    diffusion: &DMatrix<T>,
) -> Result<CovarianceMatrix<T>> {
    check_shapes(drift, diffusion)?;
    let n = drift.nrows();
    if n > 2 * ORACLE_MAX_MODES {
        return Err(Error::Domain(format!(
            "oracle supports at most {ORACLE_MAX_MODES} modes"
        )));
    }
    let eye = DMatrix::<T>::identity(n, n);
    let big = eye.kronecker(drift) + drift.kronecker(&eye);
    let rhs = DMatrix::from_column_slice(n * n, 1, (-diffusion).as_slice());
    let x = big
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Singular("Kronecker Lyapunov system".into()))?;
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::Singular("Kronecker Lyapunov system".into()));
    }
    finish(
        drift,
        diffusion,
        DMatrix::from_column_slice(n, n, x.as_slice()),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn random_stable(rng: &mut ChaCha8Rng, n: usize) -> (DMatrix<f64>, DMatrix<f64>) {
        let s = DMatrix::<f64>::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
        let b = DMatrix::<f64>::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
        let a =
            (&s - s.transpose()) * 2.0 - (&b * b.transpose()) * 0.5 - DMatrix::identity(n, n) * 0.1;
        let g = DMatrix::<f64>::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
        let d = &g * g.transpose() + DMatrix::identity(n, n) * 0.01;
        (a, d)
    }

    #[test]
    fn gate_examples() {
        let s = stability_check(&DMatrix::<f64>::identity(3, 3).scale(-1.0)).unwrap();
        assert!(s.stable);
        assert_eq!(s.max_real, -1.0);
        let rot = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]);
        let s = stability_check(&rot).unwrap();
        assert!(!s.stable);
        assert!(s.max_real.abs() < 1e-15);
        assert!(matches!(
            solve_lyapunov(&rot, &DMatrix::identity(2, 2)),
            Err(Error::Unstable { .. })
        ));
    }

    #[test]
    fn scalar_balance() {
        for (a, d) in [(1.0, 1.0), (3.0, 0.5), (1e8, 2e7)] {
            let drift = DMatrix::<f64>::identity(4, 4) * -a;
            let diff = DMatrix::<f64>::identity(4, 4) * d;
            for v in [
                solve_lyapunov(&drift, &diff).unwrap(),
                solve_lyapunov_oracle(&drift, &diff).unwrap(),
            ] {
                assert!(
                    (v.matrix() - DMatrix::identity(4, 4) * (d / (2.0 * a))).norm() < 1e-14 * d / a
                );
            }
        }
    }

    #[test]
    fn matches_oracle_on_random_systems() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in (2..=20).step_by(2) {
            let (a, d) = random_stable(&mut rng, n);
            let v = solve_lyapunov(&a, &d).unwrap();
            let w = solve_lyapunov_oracle(&a, &d).unwrap();
            let diff = (v.matrix() - w.matrix()).norm() / w.matrix().norm();
            assert!(diff < 1e-10, "n={n} diff={diff}");
            assert_eq!(v.matrix(), &v.matrix().transpose());
        }
    }

    #[test]
    fn single_precision_solve() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (a, d) = random_stable(&mut rng, 6);
        let v64 = solve_lyapunov(&a, &d).unwrap();
        let v32 = solve_lyapunov(&a.map(|x| x as f32), &d.map(|x| x as f32)).unwrap();
        let diff = (v32.matrix().map(f64::from) - v64.matrix()).norm() / v64.matrix().norm();
        assert!(diff < 1e-4, "{diff}");
    }

    #[test]
    fn reduce_selects_blocks() {
        let v = DMatrix::<f64>::from_fn(6, 6, |i, j| (i.min(j) * 10 + i.max(j)) as f64);
        let cov = CovarianceMatrix::new(v.clone()).unwrap();
        let r = cov.reduce_indices(&[2, 0]).unwrap();
        let idx = [4, 5, 0, 1];
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(r[(i, j)], v[(idx[i], idx[j])]);
            }
        }
        assert!(cov.reduce_indices(&[0, 0]).is_err());
        assert!(cov.reduce_indices(&[3]).is_err());
    }

    #[test]
    fn thermal_state_spectrum() {
        let v = DMatrix::<f64>::from_diagonal(&nalgebra::DVector::from_vec(vec![
            0.5, 0.5, 2.5, 2.5, 1.0, 1.0,
        ]));
        let nu = symplectic_eigenvalues(&v).unwrap();
        assert_eq!(nu.len(), 3);
        for (got, want) in nu.iter().zip([0.5, 1.0, 2.5]) {
            assert!((got - want).abs() < 1e-14);
        }
        assert!(CovarianceMatrix::new(v).unwrap().is_physical().unwrap());
        let squeezed_too_far =
            DMatrix::<f64>::from_diagonal(&nalgebra::DVector::from_vec(vec![0.4, 0.5]));
        assert!(!CovarianceMatrix::new(squeezed_too_far)
            .unwrap()
            .is_physical()
            .unwrap());
    }
}
