//! Shapes for rough strengths and means, direction sets, and support separation.

use std::f64::consts::PI;

use crate::error::Result;
use crate::field::{GridSpec, IndexBox, ScalarField};

pub fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn norm(a: [f64; 3]) -> f64 {
    dot(a, a).sqrt()
}

pub fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub fn neg(a: [f64; 3]) -> [f64; 3] {
    [-a[0], -a[1], -a[2]]
}

pub fn is_unit(a: [f64; 3]) -> bool {
    (norm(a) - 1.0).abs() <= 1e-12
}

/// `amplitude · exp(-|x-c|² / (2 width²))`, set to zero beyond `cutoff`.
pub fn gaussian_bump(
    grid: GridSpec,
    center: [f64; 3],
    amplitude: f64,
    width: f64,
    cutoff: f64,
) -> Result<ScalarField> {
    ScalarField::from_fn(grid, |p| {
        let r2 = dot(sub(p, center), sub(p, center));
        if r2 > cutoff * cutoff {
            0.0
        } else {
            amplitude * (-r2 / (2.0 * width * width)).exp()
        }
    })
}

pub fn ball_indicator(grid: GridSpec, center: [f64; 3], radius: f64, amplitude: f64) -> Result<ScalarField> {
    ScalarField::from_fn(grid, |p| {
        let d = sub(p, center);
        if dot(d, d) <= radius * radius {
            amplitude
        } else {
            0.0
        }
    })
}

/// `n` nearly uniform unit vectors on the sphere (Fibonacci lattice).
pub fn fibonacci_sphere(n: usize) -> Vec<[f64; 3]> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - (2 * i + 1) as f64 / n as f64;
            let r = (1.0 - z * z).sqrt();
            let phi = golden * i as f64;
            let v = [r * phi.cos(), r * phi.sin(), z];
            let s = norm(v);
            [v[0] / s, v[1] / s, v[2] / s]
        })
        .collect()
}

/// Fibonacci directions on the closed hemisphere `x̂·n ≥ 0` together with
/// their antipodes; entry `i + n` is `-entry i`.
pub fn antipodal_fibonacci(n_half: usize) -> Vec<[f64; 3]> {
    let half: Vec<[f64; 3]> = fibonacci_sphere(2 * n_half).into_iter().take(n_half).collect();
    let mut out = half.clone();
    out.extend(half.into_iter().map(neg));
    out
}

/// Physical extent `[lo, hi]` of an index box.
pub fn physical_box(grid: &GridSpec, b: IndexBox) -> ([f64; 3], [f64; 3]) {
    (grid.point(b.0), grid.point(b.1))
}

/// Unit normal of an axis-aligned plane separating the boxes, pointing from the
/// first box into the second, or `None` when the boxes are not separated by a
/// positive gap. The axis with the widest gap wins.
pub fn separating_normal(
    first: ([f64; 3], [f64; 3]),
    second: ([f64; 3], [f64; 3]),
) -> Option<([f64; 3], f64)> {
    let mut best: Option<([f64; 3], f64)> = None;
    for a in 0..3 {
        let (gap, sign) = if second.0[a] > first.1[a] {
            (second.0[a] - first.1[a], 1.0)
        } else if first.0[a] > second.1[a] {
            (first.0[a] - second.1[a], -1.0)
        } else {
            continue;
        };
        if best.is_none_or(|(_, g)| gap > g) {
            let mut n = [0.0; 3];
            n[a] = sign;
            best = Some((n, gap));
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fibonacci_points_are_unit_and_spread() {
        let dirs = fibonacci_sphere(64);
        assert!(dirs.iter().all(|&d| is_unit(d)));
        let mean = dirs.iter().fold([0.0; 3], |acc, d| [acc[0] + d[0], acc[1] + d[1], acc[2] + d[2]]);
        assert!(norm(mean) / 64.0 < 0.02);
    }

    #[test]
    fn antipodal_set_pairs_up() {
        let d = antipodal_fibonacci(10);
        for i in 0..10 {
            assert_eq!(d[i + 10], neg(d[i]));
            assert!(d[i][2] > 0.0);
        }
    }

    #[test]
    fn separation_normal_points_from_first_to_second() {
        let f = ([-0.8, -0.2, -0.2], [-0.2, 0.2, 0.2]);
        let q = ([0.1, -0.3, -0.3], [0.6, 0.3, 0.3]);
        let (n, gap) = separating_normal(f, q).unwrap();
        assert_eq!(n, [1.0, 0.0, 0.0]);
        assert!((gap - 0.3).abs() < 1e-12);
        let (n2, _) = separating_normal(q, f).unwrap();
        assert_eq!(n2, [-1.0, 0.0, 0.0]);
        let overlap = ([-0.5; 3], [0.5; 3]);
        assert!(separating_normal(overlap, ([0.0; 3], [1.0; 3])).is_none());
    }
}
