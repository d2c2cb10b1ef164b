//! Eigenvalues of dense complex matrices.
//!
//! Householder reduction to upper Hessenberg form followed by the explicitly
//! shifted complex QR iteration with Wilkinson shifts. Only eigenvalues are
//! produced, so each QR sweep touches the active diagonal block alone.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense square complex matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    /// Builds an `n`×`n` matrix from `f(row, col)`.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.n + j] = v;
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "dimension mismatch");
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let row = &other.data[k * n..(k + 1) * n];
                let dst = &mut out.data[i * n..(i + 1) * n];
                for (d, &b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }

    /// Consumes the matrix and returns its eigenvalues in no particular order.
    pub fn into_eigenvalues(mut self) -> Result<Vec<Complex64>> {
        self.reduce_to_hessenberg();
        self.hessenberg_qr()
    }

    fn reduce_to_hessenberg(&mut self) {
        let n = self.n;
        if n < 3 {
            return;
        }
        let mut v = vec![Complex64::new(0.0, 0.0); n];
        let mut w = vec![Complex64::new(0.0, 0.0); n];
        for k in 0..n - 2 {
            let x0 = self.get(k + 1, k);
            let tail: f64 = (k + 2..n).map(|i| self.get(i, k).norm_sqr()).sum();
            if tail == 0.0 {
                continue;
            }
            let norm = libm::sqrt(x0.norm_sqr() + tail);
            let phase = if x0.norm() == 0.0 {
                Complex64::new(1.0, 0.0)
            } else {
                x0 / x0.norm()
            };
            let alpha = -phase * norm;
            // v = x - alpha e1, then normalised.
            v[k + 1] = x0 - alpha;
            for i in k + 2..n {
                v[i] = self.get(i, k);
            }
            let vnorm = libm::sqrt((k + 1..n).map(|i| v[i].norm_sqr()).sum::<f64>());
            for vi in &mut v[k + 1..n] {
                *vi /= vnorm;
            }

            // A <- (I - 2 v v^H) A on rows k+1.., columns k..
            for wj in &mut w[k..n] {
                *wj = Complex64::new(0.0, 0.0);
            }
            for i in k + 1..n {
                let cv = v[i].conj();
                let row = &self.data[i * n + k..(i + 1) * n];
                for (wj, &a) in w[k..n].iter_mut().zip(row) {
                    *wj += cv * a;
                }
            }
            for i in k + 1..n {
                let s = v[i] * 2.0;
                let row = &mut self.data[i * n + k..(i + 1) * n];
                for (a, &wj) in row.iter_mut().zip(&w[k..n]) {
                    *a -= s * wj;
                }
            }

            // A <- A (I - 2 v v^H) on all rows, columns k+1..
            for i in 0..n {
                let row = &mut self.data[i * n + k + 1..(i + 1) * n];
                let s: Complex64 = row.iter().zip(&v[k + 1..n]).map(|(&a, &vj)| a * vj).sum();
                let s = s * 2.0;
                for (a, &vj) in row.iter_mut().zip(&v[k + 1..n]) {
                    *a -= s * vj.conj();
                }
            }

            self.set(k + 1, k, alpha);
            for i in k + 2..n {
                self.set(i, k, Complex64::new(0.0, 0.0));
            }
        }
    }

    fn hessenberg_qr(mut self) -> Result<Vec<Complex64>> {
        let n = self.n;
        let mut eig = vec![Complex64::new(0.0, 0.0); n];
        if n == 0 {
            return Ok(eig);
        }
        let mut rot: Vec<(f64, Complex64)> = vec![(1.0, Complex64::new(0.0, 0.0)); n];
        let max_iter = 30 * n.max(10);
        let mut total_iter = 0usize;
        let mut iter = 0usize;
        let mut hi = n - 1;
        loop {
            if hi == 0 {
                eig[0] = self.get(0, 0);
                break;
            }
            // Look for a negligible subdiagonal entry.
            let mut lo = hi;
            while lo > 0 {
                let sub = l1(self.get(lo, lo - 1));
                let diag = l1(self.get(lo - 1, lo - 1)) + l1(self.get(lo, lo));
                if sub <= f64::EPSILON * diag || sub < f64::MIN_POSITIVE {
                    self.set(lo, lo - 1, Complex64::new(0.0, 0.0));
                    break;
                }
                lo -= 1;
            }
            if lo == hi {
                eig[hi] = self.get(hi, hi);
                hi -= 1;
                iter = 0;
                continue;
            }
            iter += 1;
            total_iter += 1;
            if total_iter > max_iter {
                return Err(Error::NoConvergence(n));
            }

            let shift = if iter.is_multiple_of(10) {
                // Exceptional shift to break cycles.
                self.get(hi, hi) + Complex64::new(0.75 * l1(self.get(hi, hi - 1)), 0.0)
            } else {
                wilkinson_shift(
                    self.get(hi - 1, hi - 1),
                    self.get(hi - 1, hi),
                    self.get(hi, hi - 1),
                    self.get(hi, hi),
                )
            };

            for i in lo..=hi {
                let d = self.get(i, i) - shift;
                self.set(i, i, d);
            }
            // H - shift = QR via Givens rotations from the left.
            for k in lo..hi {
                let (c, s) = givens(self.get(k, k), self.get(k + 1, k));
                rot[k] = (c, s);
                for j in k..=hi {
                    let a = self.get(k, j);
                    let b = self.get(k + 1, j);
                    self.set(k, j, a * c + s * b);
                    self.set(k + 1, j, b * c - s.conj() * a);
                }
            }
            // RQ from the right.
            for k in lo..hi {
                let (c, s) = rot[k];
                for i in lo..=(k + 1).min(hi) {
                    let a = self.get(i, k);
                    let b = self.get(i, k + 1);
                    self.set(i, k, a * c + b * s.conj());
                    self.set(i, k + 1, b * c - a * s);
                }
            }
            for i in lo..=hi {
                let d = self.get(i, i) + shift;
                self.set(i, i, d);
            }
        }
        Ok(eig)
    }
}

fn l1(z: Complex64) -> f64 {
    z.re.abs() + z.im.abs()
}

/// Rotation `[c s; -conj(s) c]` with real `c` mapping `(f, g)` to `(r, 0)`.
fn givens(f: Complex64, g: Complex64) -> (f64, Complex64) {
    let gn = g.norm();
    if gn == 0.0 {
        return (1.0, Complex64::new(0.0, 0.0));
    }
    let fn_ = f.norm();
    if fn_ == 0.0 {
        return (0.0, g.conj() / gn);
    }
    let norm = libm::hypot(fn_, gn);
    (fn_ / norm, (f / fn_) * g.conj() / norm)
}

/// Eigenvalue of the trailing 2×2 block closest to its bottom-right entry.
fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let m1 = (a + d) * 0.5 + disc;
    let m2 = (a + d) * 0.5 - disc;
    if (m1 - d).norm() <= (m2 - d).norm() {
        m1
    } else {
        m2
    }
}
