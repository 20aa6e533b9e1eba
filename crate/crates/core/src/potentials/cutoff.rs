use crate::quadrature::gauss_legendre_composite;

/// Half-width of the mollifier applied to the derivative plateau.
const MOLLIFIER: f64 = 1.0 / 6.0;
const PLATEAU_LO: f64 = 7.0 / 6.0;
const PLATEAU_HI: f64 = 11.0 / 6.0;
const TABLE_POINTS: usize = 4097;

/// Smooth radial cutoff: `ζ = 1` on `[0, 1]`, `ζ = 0` on `[2, ∞)`, values in
/// `[0, 1]` and `|ζ'| ≤ 3/2`.
///
/// `-ζ'` is the indicator of `[7/6, 11/6]` scaled by `3/2` and smoothed
/// with a `C^∞` step of half-width `1/6`, so its support is exactly `[1, 2]`
/// and its integral is 1. The smoothed step has a closed form; its
/// antiderivative over the transition window is tabulated once and read
/// back with cubic Hermite interpolation.
#[derive(Clone, Debug)]
pub struct CutoffProfile {
    table: Vec<f64>,
}

impl Default for CutoffProfile {
    fn default() -> Self {
        Self::new()
    }
}

/// `C^∞` step on `[0, 1]`.
fn smooth_step(s: f64) -> f64 {
    if s <= 0.0 {
        0.0
    } else if s >= 1.0 {
        1.0
    } else {
        let a = (-1.0 / s).exp();
        let b = (-1.0 / (1.0 - s)).exp();
        a / (a + b)
    }
}

/// Mollified Heaviside function with transition on `[-δ, δ]`.
fn ramp(t: f64) -> f64 {
    smooth_step((t + MOLLIFIER) / (2.0 * MOLLIFIER))
}

impl CutoffProfile {
    pub fn new() -> Self {
        let step = 2.0 * MOLLIFIER / (TABLE_POINTS - 1) as f64;
        let mut table = Vec::with_capacity(TABLE_POINTS);
        let mut acc = 0.0;
        table.push(0.0);
        for i in 1..TABLE_POINTS {
            let lo = -MOLLIFIER + (i - 1) as f64 * step;
            acc += gauss_legendre_composite(ramp, lo, lo + step, 12, 1);
            table.push(acc);
        }
        Self { table }
    }

    /// `∫_{-∞}^{s} ramp`.
    fn ramp_integral(&self, s: f64) -> f64 {
        if s <= -MOLLIFIER {
            return 0.0;
        }
        if s >= MOLLIFIER {
            return s;
        }
        let step = 2.0 * MOLLIFIER / (TABLE_POINTS - 1) as f64;
        let u = (s + MOLLIFIER) / step;
        let i = (u.floor() as usize).min(TABLE_POINTS - 2);
        let t = u - i as f64;
        let (p0, p1) = (self.table[i], self.table[i + 1]);
        let x0 = -MOLLIFIER + i as f64 * step;
        let (m0, m1) = (ramp(x0) * step, ramp(x0 + step) * step);
        let t2 = t * t;
        let t3 = t2 * t;
        (2.0 * t3 - 3.0 * t2 + 1.0) * p0 + (t3 - 2.0 * t2 + t) * m0 + (-2.0 * t3 + 3.0 * t2) * p1 + (t3 - t2) * m1
    }

    pub fn value(&self, r: f64) -> f64 {
        if r <= 1.0 {
            return 1.0;
        }
        if r >= 2.0 {
            return 0.0;
        }
        let v = 1.0 - 1.5 * (self.ramp_integral(r - PLATEAU_LO) - self.ramp_integral(r - PLATEAU_HI));
        v.clamp(0.0, 1.0)
    }

    pub fn derivative(&self, r: f64) -> f64 {
        -1.5 * (ramp(r - PLATEAU_LO) - ramp(r - PLATEAU_HI))
    }

    /// Largest `|ζ'|` over `samples` equispaced radii in `[0, 3]`.
    pub fn sampled_max_slope(&self, samples: usize) -> f64 {
        (0..samples)
            .map(|i| self.derivative(3.0 * i as f64 / (samples - 1) as f64).abs())
            .fold(0.0, f64::max)
    }
}
