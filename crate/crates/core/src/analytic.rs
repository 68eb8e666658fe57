//! Closed-form reference values.

use std::f64::consts::PI;

use crate::assemblage::check_weights;
use crate::error::{Error, Result};

/// Semi-axes of a planar steering ellipse.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EllipseAxes {
    semi_major: f64,
    semi_minor: f64,
}

impl EllipseAxes {
    /// Accepts the two semi-axes in any order.
    pub fn new(a: f64, b: f64) -> Result<Self> {
        for (name, v) in [("semi-axis", a), ("semi-axis", b)] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::InvalidParameter {
                    name,
                    value: v,
                    reason: "must be finite and nonnegative",
                });
            }
        }
        Ok(Self {
            semi_major: a.max(b),
            semi_minor: a.min(b),
        })
    }

    pub fn semi_major(&self) -> f64 {
        self.semi_major
    }

    pub fn semi_minor(&self) -> f64 {
        self.semi_minor
    }
}

// 7-point Gauss / 15-point Kronrod nodes and weights on [-1, 1].
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn kronrod15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for i in 0..7 {
        let dx = h * XGK[i];
        let s = f(c - dx) + f(c + dx);
        k += WGK[i] * s;
        if i % 2 == 1 {
            g += WG[i / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Adaptive Gauss-Kronrod quadrature of `f` over `[a, b]` to relative tolerance `rel`.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, rel: f64) -> f64 {
    let mut segments = vec![(a, b, kronrod15(&f, a, b))];
    for _ in 0..10_000 {
        let total: f64 = segments.iter().map(|s| s.2 .0).sum();
        let err: f64 = segments.iter().map(|s| s.2 .1).sum();
        if err <= rel * total.abs() || err < 1e-300 {
            return total;
        }
        let (i, _) = segments
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .2 .1.total_cmp(&y.1 .2 .1))
            .expect("nonempty");
        let (lo, hi, _) = segments.swap_remove(i);
        let mid = 0.5 * (lo + hi);
        segments.push((lo, mid, kronrod15(&f, lo, mid)));
        segments.push((mid, hi, kronrod15(&f, mid, hi)));
    }
    segments.iter().map(|s| s.2 .0).sum()
}

/// Half the circumference of the ellipse: the minimal mass of a g-model for a planar
/// steering ellipse centered at the origin.
pub fn ellipse_half_circumference(ax: EllipseAxes) -> f64 {
    let (a, b) = (ax.semi_major, ax.semi_minor);
    if a == 0.0 {
        return 0.0;
    }
    if b == a {
        return PI * a;
    }
    integrate(
        |t| (a * a * t.sin().powi(2) + b * b * t.cos().powi(2)).sqrt(),
        0.0,
        PI,
        1e-13,
    )
}

/// `sum_i c_i S_i`: the mass of the mixed model for Bell-diagonal components.
pub fn bell_diag_mix_s(weights: &[f64], s_values: &[f64]) -> Result<f64> {
    check_weights(weights, s_values.len())?;
    Ok(weights.iter().zip(s_values).map(|(c, s)| c * s).sum())
}

/// Critical singlet weight for `p |psi><psi| + (1 - p) rho` where `rho` has mass `s`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Threshold {
    /// Largest `p` with `2p + (1 - p)s <= 1`.
    pub p: f64,
    /// False when `s >= 1`, in which case no positive admixture is certified.
    pub positive: bool,
}

pub fn mixture_threshold(s_component: f64) -> Result<Threshold> {
    if !(s_component >= 0.0) || !s_component.is_finite() {
        return Err(Error::InvalidParameter {
            name: "s_component",
            value: s_component,
            reason: "must be finite and nonnegative",
        });
    }
    if s_component >= 1.0 {
        return Ok(Threshold { p: 0.0, positive: false });
    }
    Ok(Threshold {
        p: (1.0 - s_component) / (2.0 - s_component),
        positive: true,
    })
}
