//! Bessel functions by the trapezoidal rule on their periodic integral
//! representations, which converges geometrically once the node count
//! exceeds the argument.

use std::f64::consts::PI;

fn nodes_for(x: f64) -> usize {
    64 + 2 * x.abs().ceil() as usize
}

/// J_n(x) = (1/π) ∫₀^π cos(nτ − x sin τ) dτ.
pub fn bessel_j(n: u32, x: f64) -> f64 {
    let m = nodes_for(x);
    let h = 2.0 * PI / m as f64;
    let nf = n as f64;
    let s: f64 = (0..m)
        .map(|j| {
            let tau = j as f64 * h;
            (nf * tau - x * tau.sin()).cos()
        })
        .sum();
    s / m as f64
}

/// J₁(x)/x, with the series near zero.
pub fn bessel_j1_over_x(x: f64) -> f64 {
    if x.abs() < 1e-3 {
        let x2 = x * x;
        0.5 - x2 / 16.0 + x2 * x2 / 384.0
    } else {
        bessel_j(1, x) / x
    }
}

/// Modified Bessel I_n(x) = (1/π) ∫₀^π e^{x cos τ} cos(nτ) dτ.
pub fn bessel_i(n: u32, x: f64) -> f64 {
    let m = nodes_for(x);
    let h = 2.0 * PI / m as f64;
    let nf = n as f64;
    let s: f64 = (0..m)
        .map(|j| {
            let tau = j as f64 * h;
            (x * tau.cos()).exp() * (nf * tau).cos()
        })
        .sum();
    s / m as f64
}

/// (sin x − x cos x)/x³, the radial part of a ball's Fourier transform in 3-D.
pub fn spherical_ball_factor(x: f64) -> f64 {
    if x.abs() < 2e-2 {
        let x2 = x * x;
        1.0 / 3.0 - x2 / 30.0 + x2 * x2 / 840.0 - x2 * x2 * x2 / 45360.0
    } else {
        (x.sin() - x * x.cos()) / (x * x * x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_values() {
        // Abramowitz & Stegun tables.
        assert!((bessel_j(0, 1.0) - 0.765_197_686_557_966_6).abs() < 1e-15);
        assert!((bessel_j(1, 1.0) - 0.440_050_585_744_933_5).abs() < 1e-15);
        assert!((bessel_j(1, 10.0) - 0.043_472_746_168_861_44).abs() < 1e-14);
        assert!((bessel_i(0, 1.0) - 1.266_065_877_752_008_4).abs() < 1e-14);
        assert!((bessel_i(1, 1.0) - 0.565_159_103_992_485_0).abs() < 1e-14);
        assert!((bessel_i(3, 1.0) - 0.022_168_424_924_331_9).abs() < 1e-15);
    }

    #[test]
    fn series_branches_join() {
        let a = bessel_j1_over_x(1.0001e-3);
        let b = bessel_j(1, 1.0001e-3) / 1.0001e-3;
        assert!((a - b).abs() < 1e-12);
        let x = 2.0001e-2;
        assert!((spherical_ball_factor(x) - (x.sin() - x * x.cos()) / x.powi(3)).abs() < 1e-9);
        assert!((spherical_ball_factor(1.99e-2) - spherical_ball_factor(2.01e-2)).abs() < 1e-5);
    }
}
