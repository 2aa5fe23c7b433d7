//! Complex Gamma function and the Taylor series of `log Gamma(1 + x)`.
//!
//! `ln_gamma` uses the Stirling series with rational Bernoulli coefficients after
//! shifting to `|z| >= 10`, and the reflection formula for `Re z < 1/2`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Euler-Mascheroni constant to 40 digits.
pub const EULER_GAMMA: &str = "0.5772156649015328606065120900824024310422";

/// `zeta(2), ..., zeta(12)` to at least 36 digits.
pub const ZETA: [&str; 11] = [
    "1.644934066848226436472415166646025189219",
    "1.202056903159594285399738161511449990765",
    "1.082323233711138191516003696541167902775",
    "1.036927755143369926331365486457034168057",
    "1.017343061984449139714517929790920527902",
    "1.0083492773819228268397975498497967596",
    "1.004077356197944339378685238508652465259",
    "1.002008392826082214417852769232412060486",
    "1.000994575127818085337145958900319017006",
    "1.000494188604119464558702282526469936469",
    "1.00024608655330804829863799804773967096",
];

// B_{2k} as (numerator, denominator), k = 1..12
const BERNOULLI: [(f64, f64); 12] = [
    (1.0, 6.0),
    (-1.0, 30.0),
    (1.0, 42.0),
    (-1.0, 30.0),
    (5.0, 66.0),
    (-691.0, 2730.0),
    (7.0, 6.0),
    (-3617.0, 510.0),
    (43867.0, 798.0),
    (-174611.0, 330.0),
    (854513.0, 138.0),
    (-236364091.0, 2730.0),
];

pub fn euler_gamma() -> f64 {
    EULER_GAMMA.parse().unwrap()
}

/// `zeta(k)` for `k >= 2`.
pub fn zeta(k: usize) -> f64 {
    assert!(k >= 2);
    if k - 2 < ZETA.len() {
        return ZETA[k - 2].parse().unwrap();
    }
    // k >= 13: the tail past n = 40 is below 1e-19
    (2..=40).rev().map(|n| (n as f64).powi(-(k as i32))).sum::<f64>() + 1.0
}

fn stirling(z: Complex64) -> Complex64 {
    let half_ln_2pi = 0.5 * (2.0 * PI).ln();
    let mut s = (z - 0.5) * z.ln() - z + half_ln_2pi;
    let z2 = z * z;
    let mut zp = z;
    for (k, (n, d)) in BERNOULLI.iter().enumerate() {
        let k = (k + 1) as f64;
        s += (n / d) / (2.0 * k * (2.0 * k - 1.0)) / zp;
        zp *= z2;
    }
    s
}

/// `log sin(pi z)` on some branch, stable for large `|Im z|`.
pub fn ln_sin_pi(z: Complex64) -> Complex64 {
    let i = Complex64::i();
    if z.im >= 0.0 {
        // sin(pi z) = (i/2) e^{-i pi z} (1 - e^{2 pi i z})
        -i * PI * z + (1.0 - (2.0 * PI * i * z).exp()).ln() + (0.5 * i).ln()
    } else {
        i * PI * z + (1.0 - (-2.0 * PI * i * z).exp()).ln() + (-0.5 * i).ln()
    }
}

/// `log Gamma(z)` on some branch; only `exp` of it is meaningful.
pub fn ln_gamma(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        return Complex64::new(PI.ln(), 0.0) - ln_sin_pi(z) - ln_gamma(1.0 - z);
    }
    let mut shift = Complex64::new(0.0, 0.0);
    let mut w = z;
    let mut prod = Complex64::new(1.0, 0.0);
    let mut count = 0;
    while w.norm() < 10.0 {
        prod *= w;
        count += 1;
        if count % 8 == 0 {
            shift += prod.ln();
            prod = Complex64::new(1.0, 0.0);
        }
        w += 1.0;
    }
    shift += prod.ln();
    stirling(w) - shift
}

fn is_nonpositive_integer(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round()
}

pub fn gamma(z: Complex64) -> Complex64 {
    if is_nonpositive_integer(z) {
        return Complex64::new(f64::INFINITY, 0.0);
    }
    ln_gamma(z).exp()
}

/// `1 / Gamma(z)`, exactly zero at the poles of Gamma.
pub fn rgamma(z: Complex64) -> Complex64 {
    if is_nonpositive_integer(z) {
        return Complex64::new(0.0, 0.0);
    }
    (-ln_gamma(z)).exp()
}

/// `Gamma(1 + x)` from `log Gamma(1 + x) = -gamma x + sum_{k>=2} zeta(k) (-x)^k / k`.
pub fn gamma_series(x: Complex64) -> Result<Complex64> {
    if x.norm() >= 1.0 {
        return Err(Error::ConvergenceRadius(x.norm()));
    }
    let mut s = -euler_gamma() * x;
    let mut p = -x;
    for k in 2..4000 {
        p *= -x;
        let t = zeta(k) * p / (k as f64);
        s += t;
        if t.norm() < 1e-18 {
            break;
        }
    }
    Ok(s.exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn real_values() {
        assert!((gamma(c(0.5, 0.0)).re - PI.sqrt()).abs() < 1e-13);
        assert!((gamma(c(5.0, 0.0)).re - 24.0).abs() < 1e-12);
        assert!((gamma(c(-0.5, 0.0)).re + 2.0 * PI.sqrt()).abs() < 1e-13);
        assert_eq!(rgamma(c(-3.0, 0.0)), c(0.0, 0.0));
    }

    #[test]
    fn complex_reference() {
        // reference values from an arbitrary-precision evaluation
        let g = gamma(c(1.0, 2.0));
        assert!((g - c(0.15190400267003614, 0.019_804_880_161_854_98)).norm() < 1e-14);
        // via reflection
        let g = gamma(c(-2.5, 0.3));
        assert!((g - c(-0.6138229974377415, -0.2112326149370418)).norm() < 1e-13, "{g}");
    }

    #[test]
    fn large_imaginary_part_is_finite() {
        let g = gamma(c(0.3, 60.0));
        assert!(g.norm() > 0.0 && g.norm() < 1e-30);
        let r = rgamma(c(-0.7, -45.0));
        assert!(r.is_finite());
    }

    #[test]
    fn series_examples() {
        assert_eq!(gamma_series(c(0.0, 0.0)).unwrap(), c(1.0, 0.0));
        assert!((gamma_series(c(0.5, 0.0)).unwrap().re - 0.886_226_925_452_758).abs() < 1e-12);
        assert!(gamma_series(c(1.0, 0.0)).is_err());
    }

    #[test]
    fn recurrence() {
        for z in [c(0.3, 0.4), c(-1.7, 2.2), c(12.5, -3.0)] {
            let lhs = gamma(z + 1.0);
            let rhs = z * gamma(z);
            assert!((lhs - rhs).norm() < 1e-12 * rhs.norm().max(1.0));
        }
    }
}
