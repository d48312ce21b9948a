//! Real trigonometric interpolation on uniform periodic grids.
//!
//! Samples `x_j = x(2πj/N)` (N even) are turned into the interpolant
//!
//! ```text
//! x(θ) = c_0 + Σ_{m=1}^{N/2} (c_m cos mθ + s_m sin mθ)
//! ```
//!
//! with `s_{N/2} = 0`. This gives spectrally accurate derivatives,
//! antiderivatives and resampling for smooth periodic data.

use std::f64::consts::TAU;

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

#[derive(Clone, Debug, PartialEq)]
pub struct TrigSeries {
    /// Cosine coefficients, index = harmonic order `0..=N/2`.
    pub cos: Vec<f64>,
    /// Sine coefficients, index = harmonic order `0..=N/2`.
    pub sin: Vec<f64>,
    /// Number of samples the series was built from.
    n: usize,
}

impl TrigSeries {
    /// Interpolate `samples` taken at `θ_j = 2πj/N`. `N` must be even.
    pub fn from_samples(samples: &[f64]) -> Self {
        let n = samples.len();
        assert!(n >= 2 && n.is_multiple_of(2), "trigonometric interpolation needs an even sample count");
        let mut buf: Vec<Complex64> = samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        FftPlanner::new().plan_fft_forward(n).process(&mut buf);

        let half = n / 2;
        let scale = 1.0 / n as f64;
        let mut cos = vec![0.0; half + 1];
        let mut sin = vec![0.0; half + 1];
        cos[0] = buf[0].re * scale;
        for m in 1..half {
            cos[m] = 2.0 * buf[m].re * scale;
            sin[m] = -2.0 * buf[m].im * scale;
        }
        cos[half] = buf[half].re * scale;
        Self { cos, sin, n }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn mean(&self) -> f64 {
        self.cos[0]
    }

    /// Evaluate at an arbitrary angle.
    pub fn eval(&self, theta: f64) -> f64 {
        let (s1, c1) = theta.sin_cos();
        let (mut s, mut c) = (0.0_f64, 1.0_f64);
        let mut acc = self.cos[0];
        for m in 1..self.cos.len() {
            let (sn, cn) = (s * c1 + c * s1, c * c1 - s * s1);
            s = sn;
            c = cn;
            acc += self.cos[m] * c + self.sin[m] * s;
        }
        acc
    }

    /// Value, first and second derivative at an arbitrary angle.
    pub fn eval_with_derivatives(&self, theta: f64) -> (f64, f64, f64) {
        let (s1, c1) = theta.sin_cos();
        let (mut s, mut c) = (0.0_f64, 1.0_f64);
        let (mut v, mut d1, mut d2) = (self.cos[0], 0.0, 0.0);
        for m in 1..self.cos.len() {
            let (sn, cn) = (s * c1 + c * s1, c * c1 - s * s1);
            s = sn;
            c = cn;
            let mf = m as f64;
            let even = self.cos[m] * c + self.sin[m] * s;
            v += even;
            d1 += mf * (self.sin[m] * c - self.cos[m] * s);
            d2 -= mf * mf * even;
        }
        (v, d1, d2)
    }

    /// `a·self + b·other` for series of equal length.
    pub fn combine(&self, a: f64, other: &Self, b: f64) -> Self {
        assert_eq!(self.n, other.n, "series lengths differ");
        let mix = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(x, y)| a * x + b * y).collect();
        Self {
            cos: mix(&self.cos, &other.cos),
            sin: mix(&self.sin, &other.sin),
            n: self.n,
        }
    }

    /// Derivative series. The Nyquist mode is dropped (its derivative
    /// vanishes at the nodes and is not representable).
    pub fn derivative(&self) -> Self {
        let half = self.cos.len() - 1;
        let mut cos = vec![0.0; half + 1];
        let mut sin = vec![0.0; half + 1];
        for m in 1..half {
            let mf = m as f64;
            cos[m] = mf * self.sin[m];
            sin[m] = -mf * self.cos[m];
        }
        Self { cos, sin, n: self.n }
    }

    /// `∫_0^θ x(σ) dσ` at an arbitrary angle, including the secular term
    /// `c_0 θ` contributed by a nonzero mean.
    pub fn integral_from_zero(&self, theta: f64) -> f64 {
        let (s1, c1) = theta.sin_cos();
        let (mut s, mut c) = (0.0_f64, 1.0_f64);
        let mut acc = self.cos[0] * theta;
        for m in 1..self.cos.len() {
            let (sn, cn) = (s * c1 + c * s1, c * c1 - s * s1);
            s = sn;
            c = cn;
            let mf = m as f64;
            acc += (self.cos[m] * s + self.sin[m] * (1.0 - c)) / mf;
        }
        acc
    }

    /// `∫_0^{θ_j} x dσ` at every node of the original grid.
    pub fn cumulative_at_nodes(&self) -> Vec<f64> {
        let half = self.cos.len() - 1;
        let mut anti = Self {
            cos: vec![0.0; half + 1],
            sin: vec![0.0; half + 1],
            n: self.n,
        };
        // ∫ (c cos mσ + s sin mσ) = (c sin mθ − s cos mθ)/m; the Nyquist sine
        // term vanishes at the nodes.
        let mut constant = 0.0;
        for m in 1..half {
            let mf = m as f64;
            anti.cos[m] = -self.sin[m] / mf;
            anti.sin[m] = self.cos[m] / mf;
            constant += self.sin[m] / mf;
        }
        let h = TAU / self.n as f64;
        anti.samples(self.n)
            .into_iter()
            .enumerate()
            .map(|(j, v)| v + constant + self.cos[0] * h * j as f64)
            .collect()
    }

    /// Evaluate on a uniform grid of `m >= N` nodes (or `m == N` to recover
    /// the original samples).
    pub fn samples(&self, m: usize) -> Vec<f64> {
        let half = self.cos.len() - 1;
        assert!(m >= 2 * half, "resampling below the source resolution would alias");
        let mut buf = vec![Complex64::new(0.0, 0.0); m];
        buf[0] = Complex64::new(self.cos[0], 0.0);
        for k in 1..half {
            let z = Complex64::new(self.cos[k], -self.sin[k]) * 0.5;
            buf[k] = z;
            buf[m - k] = z.conj();
        }
        if half > 0 {
            if m == 2 * half {
                buf[half] += Complex64::new(self.cos[half], 0.0);
            } else {
                buf[half] += Complex64::new(0.5 * self.cos[half], 0.0);
                buf[m - half] += Complex64::new(0.5 * self.cos[half], 0.0);
            }
        }
        FftPlanner::new().plan_fft_inverse(m).process(&mut buf);
        buf.into_iter().map(|z| z.re).collect()
    }
}

/// Spectral derivative of periodic samples.
pub fn derivative_at_nodes(samples: &[f64]) -> Vec<f64> {
    TrigSeries::from_samples(samples).derivative().samples(samples.len())
}

/// Resample periodic data onto a finer uniform grid.
pub fn resample(samples: &[f64], m: usize) -> Vec<f64> {
    TrigSeries::from_samples(samples).samples(m)
}
