//! Spectral-plane geometry: the symbols l_j(k), z_j(k), the eigenvector
//! matrix P(k), phase functions Φ_ij(ζ,k), their saddle points, and the
//! rational symbol r̃(k).
//!
//! Everything here is an explicit closed form; the only care needed is branch
//! selection for the saddles and staying away from the singular set
//! {0} ∪ {κ_j} where P(k) degenerates.

use crate::error::{Error, Result};
use nalgebra::Matrix3;
use num_complex::Complex64;

/// ω = e^{2πi/3}.
pub const OMEGA: Complex64 = Complex64::new(-0.5, 0.86602540378443864676);

/// Exclusion radius around the singular set {0} ∪ {κ_j}.
pub const EPS_SING: f64 = 1e-3;

pub fn omega_pow(j: i32) -> Complex64 {
    match j.rem_euclid(3) {
        0 => Complex64::new(1.0, 0.0),
        1 => OMEGA,
        _ => OMEGA.conj(),
    }
}

/// Sixth root of unity κ_j = e^{iπ(j-1)/3}, j = 1..6.
pub fn kappa(j: usize) -> Complex64 {
    assert!((1..=6).contains(&j));
    let th = std::f64::consts::PI * (j as f64 - 1.0) / 3.0;
    Complex64::new(th.cos(), th.sin())
}

/// Cyclic permutation matrix 𝒜 implementing the k ↦ ωk symmetry.
pub fn acal() -> Matrix3<Complex64> {
    let (o, l) = (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0));
    Matrix3::new(o, o, l, l, o, o, o, l, o)
}

/// Transposition matrix ℬ implementing the k ↦ 1/k symmetry.
pub fn bcal() -> Matrix3<Complex64> {
    let (o, l) = (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0));
    Matrix3::new(o, l, o, l, o, o, o, o, l)
}

/// Nearest point of the singular set {0} ∪ {κ_j} and the distance to it.
pub fn nearest_singular(k: Complex64) -> (Complex64, f64) {
    let mut best = (Complex64::new(0.0, 0.0), k.norm());
    for j in 1..=6 {
        let d = (k - kappa(j)).norm();
        if d < best.1 {
            best = (kappa(j), d);
        }
    }
    best
}

/// Refuse evaluation inside the exclusion radius around the singular set.
pub fn check_exclusion(k: Complex64) -> Result<()> {
    let (nearest, dist) = nearest_singular(k);
    if dist < EPS_SING {
        return Err(Error::NearSingularity { k, nearest, dist });
    }
    Ok(())
}

/// A spectral-plane point with its derived symbols.
#[derive(Debug, Clone, Copy)]
pub struct SpectralPoint {
    pub k: Complex64,
    /// l_j(k) = i(ω^j k + (ω^j k)^{-1}) / (2√3), j = 1,2,3.
    pub l: [Complex64; 3],
    /// z_j(k) = i((ω^j k)^2 + (ω^j k)^{-2}) / (4√3), j = 1,2,3.
    pub z: [Complex64; 3],
}

pub fn eval_lz(k: Complex64) -> Result<SpectralPoint> {
    if k == Complex64::new(0.0, 0.0) {
        return Err(Error::Domain("l_j and z_j have a pole at k = 0".into()));
    }
    let sq3 = 3f64.sqrt();
    let i = Complex64::new(0.0, 1.0);
    let mut l = [Complex64::default(); 3];
    let mut z = [Complex64::default(); 3];
    for j in 1..=3usize {
        let w = omega_pow(j as i32) * k;
        l[j - 1] = i * (w + 1.0 / w) / (2.0 * sq3);
        z[j - 1] = i * (w * w + 1.0 / (w * w)) / (4.0 * sq3);
    }
    Ok(SpectralPoint { k, l, z })
}

/// Analytic k-derivatives of l_j and z_j.
pub fn eval_lz_dk(k: Complex64) -> Result<([Complex64; 3], [Complex64; 3])> {
    if k == Complex64::new(0.0, 0.0) {
        return Err(Error::Domain("l_j and z_j have a pole at k = 0".into()));
    }
    let sq3 = 3f64.sqrt();
    let i = Complex64::new(0.0, 1.0);
    let mut dl = [Complex64::default(); 3];
    let mut dz = [Complex64::default(); 3];
    for j in 1..=3usize {
        let oj = omega_pow(j as i32);
        let w = oj * k;
        dl[j - 1] = i * oj * (1.0 - 1.0 / (w * w)) / (2.0 * sq3);
        dz[j - 1] = i * oj * 2.0 * (w - 1.0 / (w * w * w)) / (4.0 * sq3);
    }
    Ok((dl, dz))
}

/// Eigenvector (Vandermonde) matrix P(k) and its determinant from the closed
/// form det P = i(ω²-ω)(1-k⁶)/(8√3 k³).
pub fn eval_p(k: Complex64) -> Result<(Matrix3<Complex64>, Complex64)> {
    check_exclusion(k)?;
    let sp = eval_lz(k)?;
    let one = Complex64::new(1.0, 0.0);
    let p = Matrix3::new(
        one,
        one,
        one,
        sp.l[0],
        sp.l[1],
        sp.l[2],
        sp.l[0] * sp.l[0],
        sp.l[1] * sp.l[1],
        sp.l[2] * sp.l[2],
    );
    let det = Complex64::new(0.0, 1.0) * (OMEGA * OMEGA - OMEGA) * (1.0 - k.powi(6))
        / (8.0 * 3f64.sqrt() * k.powi(3));
    Ok((p, det))
}

/// Third column of P(k)^{-1}, via the Lagrange form a_j = 1/∏_{m≠j}(l_j-l_m).
///
/// This is the only part of P^{-1} the potential assembly needs.
pub fn p_inv_third_column(k: Complex64) -> Result<[Complex64; 3]> {
    check_exclusion(k)?;
    let sp = eval_lz(k)?;
    let mut a = [Complex64::default(); 3];
    for j in 0..3 {
        let mut prod = Complex64::new(1.0, 0.0);
        for m in 0..3 {
            if m != j {
                prod *= sp.l[j] - sp.l[m];
            }
        }
        a[j] = 1.0 / prod;
    }
    Ok(a)
}

/// Index pair of a phase function Φ_ij.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhasePair {
    P21,
    P31,
    P32,
}

#[derive(Debug, Clone, Copy)]
pub struct PhaseValue {
    pub zeta: f64,
    pub pair: PhasePair,
    /// Φ_ij(ζ,k) = (l_i - l_j)ζ + (z_i - z_j).
    pub value: Complex64,
    /// Analytic ∂_k Φ_ij(ζ,k).
    pub dk: Complex64,
}

pub fn eval_phase(zeta: f64, k: Complex64, pair: PhasePair) -> Result<PhaseValue> {
    let sp = eval_lz(k)?;
    let (dl, dz) = eval_lz_dk(k)?;
    let (i, j) = match pair {
        PhasePair::P21 => (1, 0),
        PhasePair::P31 => (2, 0),
        PhasePair::P32 => (2, 1),
    };
    Ok(PhaseValue {
        zeta,
        pair,
        value: (sp.l[i] - sp.l[j]) * zeta + (sp.z[i] - sp.z[j]),
        dk: (dl[i] - dl[j]) * zeta + (dz[i] - dz[j]),
    })
}

/// Velocity-ratio regime of a ray ζ = x/t; thresholds are half-open so
/// dispatch is deterministic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Regime {
    /// ζ < 1/√3
    Subsonic,
    /// 1/√3 ≤ ζ < 1
    Midrange,
    /// ζ = 1 (double saddle)
    Transition,
    /// ζ > 1
    Supersonic,
}

#[derive(Debug, Clone, Copy)]
pub struct SaddleConfig {
    pub zeta: f64,
    pub k1: Complex64,
    pub k2: Complex64,
    pub k3: Complex64,
    pub k4: Complex64,
    pub regime: Regime,
}

/// The four saddle points of Φ21(ζ,·) in closed form.
///
/// k1, k2 = conj(k1) sit on the upper/lower unit circle for every ζ ≥ 0.
/// For ζ > 1, k3 ∈ (1,∞) and k4 = 1/k3 ∈ (0,1) are real; for ζ < 1 the inner
/// radicand turns negative and k3, k4 move onto the unit circle (k3 upper),
/// reached by the principal complex square root, which is the branch
/// continuous with the ζ > 1 expression. At ζ = 1 the merged double saddle
/// k3 = k4 = 1 is returned explicitly.
pub fn saddle_points(zeta: f64) -> Result<SaddleConfig> {
    if zeta < 0.0 {
        return Err(Error::Domain(format!(
            "saddle points require ζ ≥ 0 (use the x ↦ -x symmetry); got {zeta}"
        )));
    }
    let s = (8.0 + zeta * zeta).sqrt();
    let k1 = Complex64::new(
        (zeta - s) / 4.0,
        (2.0f64).sqrt() * (4.0 - zeta * zeta + zeta * s).sqrt() / 4.0,
    );
    let k2 = k1.conj();
    let (k3, k4) = if zeta == 1.0 {
        (Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0))
    } else {
        let inner = Complex64::new(-4.0 + zeta * zeta + zeta * s, 0.0);
        let root = Complex64::new(2.0f64.sqrt(), 0.0) * inner.sqrt();
        (
            (Complex64::new(zeta + s, 0.0) + root) / 4.0,
            (Complex64::new(zeta + s, 0.0) - root) / 4.0,
        )
    };
    let regime = if zeta < 1.0 / 3f64.sqrt() {
        Regime::Subsonic
    } else if zeta < 1.0 {
        Regime::Midrange
    } else if zeta == 1.0 {
        Regime::Transition
    } else {
        Regime::Supersonic
    };
    Ok(SaddleConfig {
        zeta,
        k1,
        k2,
        k3,
        k4,
        regime,
    })
}

/// Rational symbol r̃(k) = (ω² - k²)/(1 - ω²k²); real on the unit circle.
pub fn eval_rtilde(k: Complex64) -> Result<Complex64> {
    let w2 = OMEGA * OMEGA;
    let denom = 1.0 - w2 * k * k;
    if denom.norm() < 1e-12 {
        return Err(Error::Domain(format!(
            "r̃ has poles at k = ±ω²; got k = {k}"
        )));
    }
    Ok((w2 - k * k) / denom)
}
