//! Frequency-domain view of the steady state for constant `g`, `h`.
//!
//! On a periodic grid the steady state of the explicit scheme is the initial
//! field filtered bin by bin with
//!
//! ```text
//! H(ω₁, ω₂) = 1 / ((g/h)·(4 − 2cos ω₁ − 2cos ω₂)/(dx·dy) + 1)
//! ```
//!
//! which tends to the continuous gain `1 / ((g/h)(ω₁² + ω₂²) + 1)` at low
//! frequencies. Every gain lies in `(0, 1]`, so the steady state never has
//! more energy than the field it was diffused from.

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::field::{GridSpec, ScalarField, VectorField};

/// Which transfer function to evaluate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GainMode {
    /// `1 / (σ(ω₁² + ω₂²) + 1)`.
    Continuous,
    /// Exact gain of the five-point operator on a grid with the given
    /// cell area `dx·dy`.
    Discrete { cell_area: f64 },
}

/// Low-pass gain at `(w1, w2)` radians per sample.
pub fn transfer_gain(w1: f64, w2: f64, g: f64, h: f64, mode: GainMode) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::Parameter(format!("h must be > 0, got {h}")));
    }
    if !(g >= 0.0) {
        return Err(Error::Parameter(format!("g must be >= 0, got {g}")));
    }
    let sigma = g / h;
    let symbol = match mode {
        GainMode::Continuous => w1 * w1 + w2 * w2,
        GainMode::Discrete { cell_area } => (4.0 - 2.0 * w1.cos() - 2.0 * w2.cos()) / cell_area,
    };
    Ok(1.0 / (sigma * symbol + 1.0))
}

/// Two-component complex spectrum, row-major like the fields it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    spec: GridSpec,
    pub first: Vec<Complex64>,
    pub second: Vec<Complex64>,
}

impl Spectrum {
    /// Forward 2D DFT of both components.
    pub fn forward(field: &VectorField) -> Self {
        let spec = *field.spec();
        let to_complex = |f: &ScalarField| -> Vec<Complex64> {
            f.values().iter().map(|&x| Complex64::new(x, 0.0)).collect()
        };
        let mut first = to_complex(&field.u);
        let mut second = to_complex(&field.v);
        let mut planner = FftPlanner::new();
        fft_2d(&mut planner, &mut first, &spec, false);
        fft_2d(&mut planner, &mut second, &spec, false);
        Self {
            spec,
            first,
            second,
        }
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    /// Inverse transform plus the largest imaginary part discarded.
    pub fn inverse(&self) -> (VectorField, f64) {
        let mut planner = FftPlanner::new();
        let mut a = self.first.clone();
        let mut b = self.second.clone();
        fft_2d(&mut planner, &mut a, &self.spec, true);
        fft_2d(&mut planner, &mut b, &self.spec, true);
        let scale = 1.0 / self.spec.len() as f64;
        let imag = a
            .iter()
            .chain(&b)
            .fold(0.0f64, |m, z| m.max((z.im * scale).abs()));
        let u = ScalarField::from_fn(self.spec, |i, j| a[self.spec.index(i, j)].re * scale);
        let v = ScalarField::from_fn(self.spec, |i, j| b[self.spec.index(i, j)].re * scale);
        (VectorField { u, v }, imag)
    }

    /// Multiply bin `(k1, k2)` of both components by `gain(ω₁, ω₂)`, with
    /// `ωₖ = 2π·kₖ/Nₖ`.
    pub fn filter(&mut self, mut gain: impl FnMut(f64, f64) -> f64) {
        let (w, h) = (self.spec.width, self.spec.height);
        for k2 in 0..h {
            let w2 = std::f64::consts::TAU * k2 as f64 / h as f64;
            for k1 in 0..w {
                let w1 = std::f64::consts::TAU * k1 as f64 / w as f64;
                let s = gain(w1, w2);
                let idx = k2 * w + k1;
                self.first[idx] *= s;
                self.second[idx] *= s;
            }
        }
    }
}

fn fft_2d(planner: &mut FftPlanner<f64>, data: &mut [Complex64], spec: &GridSpec, inverse: bool) {
    let (w, h) = (spec.width, spec.height);
    let row_fft = if inverse {
        planner.plan_fft_inverse(w)
    } else {
        planner.plan_fft_forward(w)
    };
    for row in data.chunks_exact_mut(w) {
        row_fft.process(row);
    }
    let col_fft = if inverse {
        planner.plan_fft_inverse(h)
    } else {
        planner.plan_fft_forward(h)
    };
    let mut column = vec![Complex64::new(0.0, 0.0); h];
    for i in 0..w {
        for j in 0..h {
            column[j] = data[j * w + i];
        }
        col_fft.process(&mut column);
        for j in 0..h {
            data[j * w + i] = column[j];
        }
    }
}

/// Steady state of the periodic-boundary scheme, computed by filtering
/// `grad_f` with the discrete gain.
pub fn spectral_steady_state(grad_f: &VectorField, g: f64, h: f64) -> Result<VectorField> {
    let spec = *grad_f.spec();
    let area = spec.cell_area();
    // validates g and h once
    transfer_gain(0.0, 0.0, g, h, GainMode::Discrete { cell_area: area })?;
    let mut spectrum = Spectrum::forward(grad_f);
    let sigma = g / h;
    spectrum.filter(|w1, w2| 1.0 / (sigma * (4.0 - 2.0 * w1.cos() - 2.0 * w2.cos()) / area + 1.0));
    Ok(spectrum.inverse().0)
}

/// `Σ (u² + v²) · dx·dy`.
pub fn parseval_energy(field: &VectorField) -> f64 {
    field.sum_squares() * field.spec().cell_area()
}
