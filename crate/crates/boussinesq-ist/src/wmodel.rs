//! Explicit error-function model matrix m^W(ỹ, w): the local solution used
//! across the collisionless-shock line, analytic off the contour
//! e^{i pi/6} R and with only the (12) and (32) entries nontrivial.

use crate::error::{Error, Result};
use crate::special::faddeeva_w;
use nalgebra::Matrix3;
use num_complex::Complex64;
use std::f64::consts::PI;

fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[derive(Debug, Clone)]
pub struct ErrorFunctionModel {
    pub y_tilde: f64,
    pub s_param: Complex64,
    pub w: Complex64,
    pub value: Matrix3<Complex64>,
}

fn check_y(y_tilde: f64) -> Result<()> {
    if y_tilde <= -1.0 {
        return Err(Error::Domain(format!(
            "the model requires y_tilde > -1, got {y_tilde}"
        )));
    }
    Ok(())
}

/// Common scalar e^{3i w^2 (1+ỹ)} erf-combination entering the (12) and (32)
/// entries; `plus` selects the sector formula.
///
/// With z = e^{i pi/4} w sqrt(3(1+ỹ)) the Gaussian prefactor is exactly
/// e^{z^2}, so the combination is a scaled complementary error function:
/// e^{z^2}(erf z - 1) = -w_F(iz) and e^{z^2}(erf z + 1) = 2e^{z^2} - w_F(iz),
/// with w_F the Faddeeva function. Branching on the sign of Re z keeps every
/// exponential decaying (the naive product overflows as inf * 0 for large w).
fn entry(y_tilde: f64, s: Complex64, w: Complex64, plus: bool) -> Complex64 {
    let z = c64(0.5f64.sqrt(), 0.5f64.sqrt()) * w * (3.0 * (1.0 + y_tilde)).sqrt();
    let i = c64(0.0, 1.0);
    if plus {
        if z.re < 0.0 {
            // 2e^{z^2} - w_F(iz) = w_F(-iz) exactly (Faddeeva reflection).
            s / 2.0 * faddeeva_w(-i * z)
        } else {
            s / 2.0 * (2.0 * (z * z).exp() - faddeeva_w(i * z))
        }
    } else if z.re >= 0.0 {
        -s / 2.0 * faddeeva_w(i * z)
    } else {
        -s / 2.0 * (2.0 * (z * z).exp() - faddeeva_w(-i * z))
    }
}

/// Does w lie in the sector arg w in (pi/6, 7pi/6) (the '+' side of the
/// oriented contour)? The sector wraps through the negative real axis in
/// principal-argument terms. Points exactly on the contour are assigned to
/// the other ('-') side, so `eval_mw` returns the minus boundary value there.
fn on_plus_side(w: Complex64) -> bool {
    let a = w.arg();
    a > PI / 6.0 + 1e-15 || a < -5.0 * PI / 6.0 - 1e-15
}

/// Explicit solution m^W(ỹ, w).
pub fn eval_mw(y_tilde: f64, s: Complex64, w: Complex64) -> Result<ErrorFunctionModel> {
    check_y(y_tilde)?;
    let v = entry(y_tilde, s, w, on_plus_side(w));
    let mut m = Matrix3::identity();
    m[(0, 1)] = v;
    m[(2, 1)] = -v;
    Ok(ErrorFunctionModel { y_tilde, s_param: s, w, value: m })
}

/// Boundary value from a prescribed side of the contour (`plus` = left of
/// the orientation, i.e. the sector arg w in (pi/6, 7pi/6)).
pub fn eval_mw_boundary(
    y_tilde: f64,
    s: Complex64,
    w: Complex64,
    plus: bool,
) -> Result<Matrix3<Complex64>> {
    check_y(y_tilde)?;
    let v = entry(y_tilde, s, w, plus);
    let mut m = Matrix3::identity();
    m[(0, 1)] = v;
    m[(2, 1)] = -v;
    Ok(m)
}

/// Jump matrix v^W(ỹ, w) on e^{i pi/6} R: identity plus (12), (32) entries
/// +- s e^{3i(1+ỹ)w^2}.
pub fn jump_vw(y_tilde: f64, s: Complex64, w: Complex64) -> Result<Matrix3<Complex64>> {
    check_y(y_tilde)?;
    let g = s * (c64(0.0, 3.0 * (1.0 + y_tilde)) * w * w).exp();
    let mut v = Matrix3::identity();
    v[(0, 1)] = g;
    v[(2, 1)] = -g;
    Ok(v)
}

/// Closed-form expansion coefficient m^W_{2j+1}(ỹ): the scalar multiplying
/// the (12) entry (the (32) entry is its negative).
pub fn coeff_m2j1(y_tilde: f64, s: Complex64, j: usize) -> Result<Complex64> {
    check_y(y_tilde)?;
    let mut prod = 1.0;
    for m in 1..=j {
        prod *= 0.5 - m as f64;
    }
    let phase = (c64(0.0, PI / 4.0 * (2 * j + 1) as f64)).exp();
    let denom = phase * (3.0 * (1.0 + y_tilde)).powf(j as f64 + 0.5);
    Ok(-s / (2.0 * PI.sqrt()) * prod / denom)
}
