//! Small quadrature helpers shared by the oracles and the synthesis code.

use std::f64::consts::PI;

/// Gauss–Legendre nodes and weights on `[-1, 1]` (Newton iteration on `P_n`).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { z } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pm) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// Integral of `f` over `[a, b]` with an `n`-point Gauss–Legendre rule.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, rule: &(Vec<f64>, Vec<f64>)) -> f64 {
    let (x, w) = rule;
    let c = 0.5 * (b - a);
    let m = 0.5 * (b + a);
    x.iter().zip(w).map(|(&xi, &wi)| wi * f(m + c * xi)).sum::<f64>() * c
}

/// Average of `|ξ|^{-m}` over the box `[-a/2, a/2] × [-b/2, b/2] × [-c/2, c/2]`, `0 < m < 3`.
///
/// Integrates `R(ω)^{3-m} / (3-m)` over the unit sphere, where `R(ω)` is the
/// distance from the centre to the box boundary along `ω`.
pub fn box_average_inverse_power(half: [f64; 3], m: f64) -> f64 {
    assert!(m > 0.0 && m < 3.0);
    let rule = gauss_legendre(48);
    let e = 3.0 - m;
    // first octant only (×8); R(ω) has kinks, hence the composite rule
    let panels = 8;
    let mut total = 0.0;
    for pu in 0..panels {
        let u0 = pu as f64 / panels as f64;
        let u1 = (pu + 1) as f64 / panels as f64;
        for pp in 0..panels {
            let p0 = pp as f64 / panels as f64 * PI / 2.0;
            let p1 = (pp + 1) as f64 / panels as f64 * PI / 2.0;
            total += integrate(
                |u| {
                    integrate(
                        |phi| {
                            let st = (1.0 - u * u).sqrt();
                            let w = [st * phi.cos(), st * phi.sin(), u];
                            let r = (0..3)
                                .filter(|&k| w[k] > 0.0)
                                .map(|k| half[k] / w[k])
                                .fold(f64::INFINITY, f64::min);
                            r.powf(e) / e
                        },
                        p0,
                        p1,
                        &rule,
                    )
                },
                u0,
                u1,
                &rule,
            );
        }
    }
    8.0 * total / (8.0 * half[0] * half[1] * half[2])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let rule = gauss_legendre(10);
        let v = integrate(|x| x.powi(18) + 3.0 * x.powi(5), -1.0, 1.0, &rule);
        assert!((v - 2.0 / 19.0).abs() < 1e-14);
        let s: f64 = rule.1.iter().sum();
        assert!((s - 2.0).abs() < 1e-14);
        let odd = gauss_legendre(7);
        assert!(integrate(|x| x.cos(), 0.0, 1.0, &odd) - 1f64.sin() < 1e-14);
    }

    fn midpoint_cube_average(q: usize, m: f64) -> f64 {
        // even midpoint grid never samples the integrable singularity at the centre
        let mut sum = 0.0;
        for i in 0..q {
            for j in 0..q {
                for k in 0..q {
                    let p = [i, j, k].map(|n| (n as f64 + 0.5) / q as f64 - 0.5);
                    sum += (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).powf(-m / 2.0);
                }
            }
        }
        sum / (q * q * q) as f64
    }

    #[test]
    fn box_average_matches_midpoint_sums() {
        let half = [0.5, 0.5, 0.5];
        let v = box_average_inverse_power(half, 1.5);
        let brute = midpoint_cube_average(160, 1.5);
        assert!((v - brute).abs() / v < 1e-3, "{v} vs {brute}");
        // m = 2: midpoint error is first order in the cell size, so extrapolate
        let v = box_average_inverse_power(half, 2.0);
        let brute = 2.0 * midpoint_cube_average(160, 2.0) - midpoint_cube_average(80, 2.0);
        assert!((v - brute).abs() / v < 1e-3, "{v} vs {brute}");
    }

    #[test]
    fn box_average_is_homogeneous() {
        let v = box_average_inverse_power([0.5, 0.25, 0.75], 2.5);
        let v2 = box_average_inverse_power([1.0, 0.5, 1.5], 2.5);
        assert!((v2 / v - 2f64.powf(-2.5)).abs() < 1e-10);
    }
}
