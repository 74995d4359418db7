//! Dense real Schur decomposition.
//!
//! `A = Q T Qᵀ` with `Q` orthogonal and `T` quasi-upper-triangular: 1×1 blocks
//! for real eigenvalues and 2×2 blocks for complex-conjugate pairs. Reduction
//! to Hessenberg form uses Householder reflections; the Hessenberg matrix is
//! then driven to Schur form with the Francis implicit double-shift QR
//! iteration (EISPACK `orthes`/`hqr2` lineage). Ad hoc exceptional shifts are
//! applied every 10 iterations without deflation.

use nalgebra::DMatrix;
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

/// Iteration budget per eigenvalue before giving up.
const MAX_SWEEPS_PER_EIGENVALUE: usize = 60;

#[derive(Clone, Debug)]
pub struct RealSchur<T: Real> {
    /// Orthogonal Schur vectors.
    pub q: DMatrix<T>,
    /// Quasi-upper-triangular factor. Entries below the first subdiagonal are
    /// exactly zero, and a subdiagonal entry is nonzero only inside a 2×2 block.
    pub t: DMatrix<T>,
}

/// A diagonal block of the quasi-triangular factor.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Block {
    pub start: usize,
    pub size: usize,
}

impl<T: Real> RealSchur<T> {
    pub fn new(a: &DMatrix<T>) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::Domain(format!(
                "schur: matrix must be square, got {}×{}",
                a.nrows(),
                a.ncols()
            )));
        }
        if a.iter().any(|x| !x.is_finite()) {
            return Err(Error::Domain("schur: matrix has non-finite entries".into()));
        }
        let n = a.nrows();
        if n == 0 {
            return Ok(Self {
                q: DMatrix::zeros(0, 0),
                t: DMatrix::zeros(0, 0),
            });
        }
        let mut h = a.clone();
        let mut q = hessenberg(&mut h);
        francis_qr(&mut h, &mut q)?;
        for j in 0..n {
            for i in (j + 2)..n {
                h[(i, j)] = T::zero();
            }
        }
        Ok(Self { q, t: h })
    }

    pub fn blocks(&self) -> Vec<Block> {
        let n = self.t.nrows();
        let mut out = Vec::with_capacity(n);
        let mut i = 0;
        while i < n {
            if i + 1 < n && self.t[(i + 1, i)] != T::zero() {
                out.push(Block { start: i, size: 2 });
                i += 2;
            } else {
                out.push(Block { start: i, size: 1 });
                i += 1;
            }
        }
        out
    }

    /// Eigenvalues read off the diagonal blocks, in block order.
    pub fn eigenvalues(&self) -> Vec<Complex<T>> {
        let mut out = Vec::with_capacity(self.t.nrows());
        for b in self.blocks() {
            if b.size == 1 {
                out.push(Complex::new(self.t[(b.start, b.start)], T::zero()));
                continue;
            }
            let i = b.start;
            let (a, bb, c, d) = (
                self.t[(i, i)],
                self.t[(i, i + 1)],
                self.t[(i + 1, i)],
                self.t[(i + 1, i + 1)],
            );
            let half_trace = (a + d) * lit(0.5);
            let half_diff = (a - d) * lit(0.5);
            let disc = half_diff * half_diff + bb * c;
            if disc >= T::zero() {
                // Real pair left inside a block; pick the cancellation-free root first.
                let root = disc.sqrt();
                let big = if half_trace >= T::zero() {
                    half_trace + root
                } else {
                    half_trace - root
                };
                let det = a * d - bb * c;
                let small = if big != T::zero() {
                    det / big
                } else {
                    half_trace - root
                };
                out.push(Complex::new(big, T::zero()));
                out.push(Complex::new(small, T::zero()));
            } else {
                let im = (-disc).sqrt();
                out.push(Complex::new(half_trace, im));
                out.push(Complex::new(half_trace, -im));
            }
        }
        out
    }
}

/// Eigenvalues of a general real square matrix.
pub fn eigenvalues<T: Real>(a: &DMatrix<T>) -> Result<Vec<Complex<T>>> {
    Ok(RealSchur::new(a)?.eigenvalues())
}

/// Largest absolute entry, zero for an empty matrix.
pub fn max_abs<T: Real>(a: &DMatrix<T>) -> T {
    a.iter()
        .fold(T::zero(), |m, x| if x.abs() > m { x.abs() } else { m })
}

/// Householder reduction to upper Hessenberg form; returns the accumulated
/// orthogonal transformation and overwrites `h`.
fn hessenberg<T: Real>(h: &mut DMatrix<T>) -> DMatrix<T> {
    let n = h.nrows();
    let mut v = DMatrix::<T>::identity(n, n);
    if n < 3 {
        return v;
    }
    let high = n - 1;
    let mut ort = vec![T::zero(); n];
    // Householder vectors are kept aside so the lower part of `h` can be cleared.
    let mut reflectors: Vec<(usize, Vec<T>, T)> = Vec::new();

    for m in 1..high {
        let scale = (m..=high).fold(T::zero(), |s, i| s + h[(i, m - 1)].abs());
        if scale == T::zero() {
            continue;
        }
        let mut hh = T::zero();
        for i in (m..=high).rev() {
            ort[i] = h[(i, m - 1)] / scale;
            hh += ort[i] * ort[i];
        }
        let mut g = hh.sqrt();
        if ort[m] > T::zero() {
            g = -g;
        }
        hh -= ort[m] * g;
        ort[m] -= g;

        for j in m..n {
            let mut f = T::zero();
            for i in (m..=high).rev() {
                f += ort[i] * h[(i, j)];
            }
            f /= hh;
            for i in m..=high {
                h[(i, j)] -= f * ort[i];
            }
        }
        for i in 0..=high {
            let mut f = T::zero();
            for j in (m..=high).rev() {
                f += ort[j] * h[(i, j)];
            }
            f /= hh;
            for j in m..=high {
                h[(i, j)] -= f * ort[j];
            }
        }
        ort[m] *= scale;
        h[(m, m - 1)] = scale * g;
        let mut u = ort[m..=high].to_vec();
        for (k, i) in ((m + 1)..=high).enumerate() {
            u[k + 1] = h[(i, m - 1)];
            h[(i, m - 1)] = T::zero();
        }
        reflectors.push((m, u, h[(m, m - 1)]));
    }

    for (m, u, sub) in reflectors.into_iter().rev() {
        if sub == T::zero() {
            continue;
        }
        for j in m..=high {
            let mut g = T::zero();
            for (k, i) in (m..=high).enumerate() {
                g += u[k] * v[(i, j)];
            }
            // Double division avoids possible underflow.
            g = (g / u[0]) / sub;
            for (k, i) in (m..=high).enumerate() {
                v[(i, j)] += g * u[k];
            }
        }
    }
    v
}

/// Francis double-shift QR on an upper Hessenberg matrix, accumulating the
/// transformations into `v`.
fn francis_qr<T: Real>(h: &mut DMatrix<T>, v: &mut DMatrix<T>) -> Result<()> {
    let nn = h.nrows();
    let low = 0usize;
    let high = nn - 1;
    let eps = T::default_epsilon();
    let mut exshift = T::zero();

    let mut norm = T::zero();
    for i in 0..nn {
        for j in i.saturating_sub(1)..nn {
            norm += h[(i, j)].abs();
        }
    }

    let mut n = nn as isize - 1;
    let mut iter = 0usize;
    let mut total_iter = 0usize;
    let budget = MAX_SWEEPS_PER_EIGENVALUE * nn;
    let (mut p, mut q, mut r, mut s, mut z);
    let (mut w, mut x, mut y);

    while n >= low as isize {
        let nu = n as usize;
        // Look for a single small subdiagonal element.
        let mut l = nu;
        while l > low {
            s = h[(l - 1, l - 1)].abs() + h[(l, l)].abs();
            if s == T::zero() {
                s = norm;
            }
            if h[(l, l - 1)].abs() <= eps * s {
                h[(l, l - 1)] = T::zero();
                break;
            }
            l -= 1;
        }

        if l == nu {
            // One root.
            h[(nu, nu)] += exshift;
            n -= 1;
            iter = 0;
        } else if l + 1 == nu {
            // Two roots.
            w = h[(nu, nu - 1)] * h[(nu - 1, nu)];
            p = (h[(nu - 1, nu - 1)] - h[(nu, nu)]) * lit(0.5);
            q = p * p + w;
            z = q.abs().sqrt();
            h[(nu, nu)] += exshift;
            h[(nu - 1, nu - 1)] += exshift;

            if q >= T::zero() {
                // Real pair: rotate the block to upper triangular.
                z = if p >= T::zero() { p + z } else { p - z };
                x = h[(nu, nu - 1)];
                s = x.abs() + z.abs();
                p = x / s;
                q = z / s;
                r = (p * p + q * q).sqrt();
                p /= r;
                q /= r;
                for j in (nu - 1)..nn {
                    z = h[(nu - 1, j)];
                    h[(nu - 1, j)] = q * z + p * h[(nu, j)];
                    h[(nu, j)] = q * h[(nu, j)] - p * z;
                }
                for i in 0..=nu {
                    z = h[(i, nu - 1)];
                    h[(i, nu - 1)] = q * z + p * h[(i, nu)];
                    h[(i, nu)] = q * h[(i, nu)] - p * z;
                }
                for i in low..=high {
                    z = v[(i, nu - 1)];
                    v[(i, nu - 1)] = q * z + p * v[(i, nu)];
                    v[(i, nu)] = q * v[(i, nu)] - p * z;
                }
                h[(nu, nu - 1)] = T::zero();
            }
            n -= 2;
            iter = 0;
        } else {
            x = h[(nu, nu)];
            y = T::zero();
            w = T::zero();
            if l < nu {
                y = h[(nu - 1, nu - 1)];
                w = h[(nu, nu - 1)] * h[(nu - 1, nu)];
            }

            // Wilkinson's original ad hoc shift.
            if iter > 0 && iter.is_multiple_of(10) && !iter.is_multiple_of(30) {
                exshift += x;
                for i in low..=nu {
                    h[(i, i)] -= x;
                }
                s = h[(nu, nu - 1)].abs() + h[(nu - 1, nu - 2)].abs();
                x = s * lit(0.75);
                y = x;
                w = s * s * lit(-0.4375);
            }

            // MATLAB's ad hoc shift.
            if iter > 0 && iter.is_multiple_of(30) {
                s = (y - x) * lit(0.5);
                s = s * s + w;
                if s > T::zero() {
                    s = s.sqrt();
                    if y < x {
                        s = -s;
                    }
                    s = x - w / ((y - x) * lit(0.5) + s);
                    for i in low..=nu {
                        h[(i, i)] -= s;
                    }
                    exshift += s;
                    x = lit(0.964);
                    y = x;
                    w = x;
                }
            }

            iter += 1;
            total_iter += 1;
            if total_iter > budget {
                return Err(Error::NoConvergence);
            }

            // Look for two consecutive small subdiagonal elements.
            let mut m = nu - 2;
            loop {
                z = h[(m, m)];
                r = x - z;
                s = y - z;
                p = (r * s - w) / h[(m + 1, m)] + h[(m, m + 1)];
                q = h[(m + 1, m + 1)] - z - r - s;
                r = h[(m + 2, m + 1)];
                s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                if h[(m, m - 1)].abs() * (q.abs() + r.abs())
                    < eps
                        * (p.abs() * (h[(m - 1, m - 1)].abs() + z.abs() + h[(m + 1, m + 1)].abs()))
                {
                    break;
                }
                m -= 1;
            }

            for i in (m + 2)..=nu {
                h[(i, i - 2)] = T::zero();
                if i > m + 2 {
                    h[(i, i - 3)] = T::zero();
                }
            }

            // Double QR step on rows l..=n and columns m..=n.
            let mut k = m;
            while k < nu {
                let notlast = k + 1 != nu;
                if k != m {
                    p = h[(k, k - 1)];
                    q = h[(k + 1, k - 1)];
                    r = if notlast {
                        h[(k + 2, k - 1)]
                    } else {
                        T::zero()
                    };
                    x = p.abs() + q.abs() + r.abs();
                    if x == T::zero() {
                        k += 1;
                        continue;
                    }
                    p /= x;
                    q /= x;
                    r /= x;
                }
                s = (p * p + q * q + r * r).sqrt();
                if p < T::zero() {
                    s = -s;
                }
                if s != T::zero() {
                    if k != m {
                        h[(k, k - 1)] = -s * x;
                    } else if l != m {
                        h[(k, k - 1)] = -h[(k, k - 1)];
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    z = r / s;
                    q /= p;
                    r /= p;

                    for j in k..nn {
                        p = h[(k, j)] + q * h[(k + 1, j)];
                        if notlast {
                            p += r * h[(k + 2, j)];
                            h[(k + 2, j)] -= p * z;
                        }
                        h[(k, j)] -= p * x;
                        h[(k + 1, j)] -= p * y;
                    }
                    for i in 0..=nu.min(k + 3) {
                        p = x * h[(i, k)] + y * h[(i, k + 1)];
                        if notlast {
                            p += z * h[(i, k + 2)];
                            h[(i, k + 2)] -= p * r;
                        }
                        h[(i, k)] -= p;
                        h[(i, k + 1)] -= p * q;
                    }
                    for i in low..=high {
                        p = x * v[(i, k)] + y * v[(i, k + 1)];
                        if notlast {
                            p += z * v[(i, k + 2)];
                            v[(i, k + 2)] -= p * r;
                        }
                        v[(i, k)] -= p;
                        v[(i, k + 1)] -= p * q;
                    }
                }
                k += 1;
            }
        }
    }
    Ok(())
}
