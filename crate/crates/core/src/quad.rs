//! Adaptive Gauss–Kronrod (7, 15) quadrature.

use crate::error::{Error, Result};
use crate::sum::Neumaier;

const GK_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const GK_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const GAUSS_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Kronrod estimate and |Kronrod − Gauss| on `[a, b]`.
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = GK_WEIGHTS[7] * fc;
    let mut gauss = GAUSS_WEIGHTS[3] * fc;
    for i in 0..7 {
        let pair = f(c - h * GK_NODES[i]) + f(c + h * GK_NODES[i]);
        kronrod += GK_WEIGHTS[i] * pair;
        if i % 2 == 1 {
            gauss += GAUSS_WEIGHTS[i / 2] * pair;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

/// Adaptive Gauss–Kronrod quadrature on `[a, b]` to absolute accuracy `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> Result<f64> {
    fn recurse<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: u32, acc: &mut Neumaier) -> Result<()> {
        let (v, err) = gk15(f, a, b);
        if !v.is_finite() {
            return Err(Error::Quadrature(format!("non-finite integrand on [{a}, {b}]")));
        }
        // Below this the Kronrod–Gauss difference is rounding noise.
        let tol = tol.max(64.0 * f64::EPSILON * v.abs());
        if err <= tol || depth == 0 {
            if err > tol {
                return Err(Error::Quadrature(format!("no convergence on [{a}, {b}]: error {err:e}")));
            }
            acc.add(v);
            return Ok(());
        }
        let m = 0.5 * (a + b);
        recurse(f, a, m, 0.5 * tol, depth - 1, acc)?;
        recurse(f, m, b, 0.5 * tol, depth - 1, acc)
    }
    let mut acc = Neumaier::new();
    recurse(f, a, b, tol, 30, &mut acc)?;
    Ok(acc.value())
}

/// [`integrate`] over `[a, a + h]` and then doubling panels up to `b`.
///
/// Adaptive bisection alone cannot see a feature narrower than the spacing
/// of its first nodes; grading the panels from `h` resolves one near `a`.
pub fn integrate_graded<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, h: f64, tol: f64) -> Result<f64> {
    let mut edges = vec![a];
    let mut w = h;
    while a + w < b && h > 0.0 {
        edges.push(a + w);
        w *= 2.0;
    }
    edges.push(b);
    let share = tol / (edges.len() - 1) as f64;
    let mut acc = Neumaier::new();
    for p in edges.windows(2) {
        acc.add(integrate(f, p[0], p[1], share)?);
    }
    Ok(acc.value())
}
