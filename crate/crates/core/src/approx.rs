//! Plaintext numerical kernels: minimax reciprocals, the tanh doubling
//! step and the iterated sign approximation.

/// Constant of the doubling step `z (c - z^2)`; twice the constant term of
/// the linear reciprocal fit.
pub const DOUBLING_CONST: f64 = 1.9142;

/// A polynomial approximation on a closed interval.
#[derive(Debug, Clone, PartialEq)]
pub struct MinimaxPoly {
    /// Coefficients, constant term first.
    pub coeffs: &'static [f64],
    pub domain: (f64, f64),
    /// Claimed accuracy `mu = -log2(max error)`.
    pub accuracy_bits: f64,
}

/// Cubic fit of `1/x` on `[1, 2]`.
pub const RECIP_DEG3: MinimaxPoly = MinimaxPoly {
    coeffs: &[2.871320, -3.029870, 1.392785, -0.235498],
    domain: (1.0, 2.0),
    accuracy_bits: 9.62,
};

/// Linear fit of `1/x` on `[1, 2]`.
pub const RECIP_DEG1: MinimaxPoly = MinimaxPoly {
    coeffs: &[1.4571, -0.5],
    domain: (1.0, 2.0),
    accuracy_bits: 4.5,
};

impl MinimaxPoly {
    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// `f(x) - p(x)` on `points` evenly spaced samples of the domain.
    pub fn errors_on_grid(&self, f: impl Fn(f64) -> f64, points: usize) -> Vec<f64> {
        let (lo, hi) = self.domain;
        let n = points.max(2);
        (0..n)
            .map(|i| {
                let x = lo + (hi - lo) * i as f64 / (n - 1) as f64;
                f(x) - self.eval(x)
            })
            .collect()
    }

    pub fn max_error_on_grid(&self, f: impl Fn(f64) -> f64, points: usize) -> f64 {
        self.errors_on_grid(f, points).into_iter().fold(0.0, |m, e| m.max(e.abs()))
    }
}

pub fn recip_deg3(x: f64) -> f64 {
    RECIP_DEG3.eval(x)
}

pub fn recip_deg1(x: f64) -> f64 {
    RECIP_DEG1.eval(x)
}

/// `1/(1+x)` on `[0, 1]`, i.e. `recip_deg1(x + 1)`.
pub fn recip_unit_shifted(x: f64) -> f64 {
    0.9571 - 0.5 * x
}

/// One argument doubling: `tanh(2z) ~ z (1.9142 - z^2)` with `z = tanh(z)`.
pub fn tanh_double(z: f64) -> f64 {
    z * (DOUBLING_CONST - z * z)
}

/// Step function with `H(0) = 1/2`.
pub fn heaviside_ref(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        0.0
    } else {
        0.5
    }
}

/// `r` doubling steps starting from `z0`, approximating `sgn(z0)`.
pub fn tanh_iterate(z0: f64, r: u32) -> f64 {
    (0..r).fold(z0, |z, _| tanh_double(z))
}
