//! Roots of monic real cubics s³ + c₂s² + c₁s + c₀.
//!
//! [`solve_monic_cubic`] is the working solver: a real root from the
//! trigonometric or hyperbolic closed form (whichever is well conditioned),
//! deflation to a quadratic solved without cancellation, then Newton
//! polishing on the undeflated polynomial. [`cardano`] is the textbook
//! depressed-cubic construction with the y₊, y₋ cube roots kept visible,
//! used to cross-check the solver and to expose y₊ − y₋.

use crate::model::C64;

const SQRT3_2: f64 = 0.866_025_403_784_438_6;

/// Coefficients of s³ + c2·s² + c1·s + c0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonicCubic {
    pub c2: f64,
    pub c1: f64,
    pub c0: f64,
}

impl MonicCubic {
    pub fn new(c2: f64, c1: f64, c0: f64) -> Self {
        Self { c2, c1, c0 }
    }

    pub fn eval(&self, s: C64) -> C64 {
        ((s + self.c2) * s + self.c1) * s + self.c0
    }

    pub fn derivative(&self, s: C64) -> C64 {
        (3.0 * s + 2.0 * self.c2) * s + self.c1
    }
}

/// Orders roots: the most nearly real root first, then the root with positive
/// imaginary part, then its partner. Three real roots come in descending
/// order.
pub fn order_roots(mut roots: [C64; 3]) -> [C64; 3] {
    let imag_scale = roots.iter().map(|r| r.norm()).fold(1.0, f64::max);
    let all_real = roots.iter().all(|r| r.im.abs() <= 1e-14 * imag_scale);
    if all_real {
        roots.sort_by(|a, b| b.re.total_cmp(&a.re));
        return roots;
    }
    roots.sort_by(|a, b| a.im.abs().total_cmp(&b.im.abs()));
    let (first, pair) = roots.split_at_mut(1);
    if pair[0].im < pair[1].im {
        pair.swap(0, 1);
    }
    [first[0], pair[0], pair[1]]
}

/// Three roots of a monic real cubic, ordered by [`order_roots`].
pub fn solve_monic_cubic(p: MonicCubic) -> [C64; 3] {
    let raw = if p.c0 == 0.0 {
        // exact root at the origin; keep it exact
        let [q1, q2] = solve_monic_quadratic(p.c2, p.c1);
        [C64::new(0.0, 0.0), q1, q2]
    } else {
        let r = polish_real(p, real_root(p));
        // synthetic division by (s − r)
        let b1 = p.c2 + r;
        let b0 = p.c1 + r * b1;
        let [q1, q2] = solve_monic_quadratic(b1, b0);
        [C64::new(r, 0.0), polish(p, q1), polish(p, q2)]
    };
    let mut roots = order_roots(raw);
    // conjugate-pair roots come out as exact conjugates
    if roots[1].im > 0.0 && roots[2].im < 0.0 {
        let re = 0.5 * (roots[1].re + roots[2].re);
        let im = 0.5 * (roots[1].im - roots[2].im);
        roots[1] = C64::new(re, im);
        roots[2] = C64::new(re, -im);
    }
    roots
}

/// Roots of s² + b·s + c, computed to avoid cancellation.
pub fn solve_monic_quadratic(b: f64, c: f64) -> [C64; 2] {
    let disc = b * b - 4.0 * c;
    if disc >= 0.0 {
        let sq = disc.sqrt();
        let q = -0.5 * (b + b.signum() * sq);
        if q == 0.0 {
            return [C64::new(0.0, 0.0), C64::new(0.0, 0.0)];
        }
        let r1 = q;
        let r2 = c / q;
        [C64::new(r1, 0.0), C64::new(r2, 0.0)]
    } else {
        let re = -0.5 * b;
        let im = 0.5 * (-disc).sqrt();
        [C64::new(re, im), C64::new(re, -im)]
    }
}

/// One real root from the closed form (depressed-cubic substitution).
fn real_root(p: MonicCubic) -> f64 {
    let a = p.c2;
    let q = (a * a - 3.0 * p.c1) / 9.0;
    let r = (2.0 * a * a * a - 9.0 * a * p.c1 + 27.0 * p.c0) / 54.0;
    if r * r < q * q * q {
        // three real roots: trigonometric form
        let theta = (r / (q * q * q).sqrt()).clamp(-1.0, 1.0).acos();
        -2.0 * q.sqrt() * (theta / 3.0).cos() - a / 3.0
    } else {
        let big_a = -r.signum() * (r.abs() + (r * r - q * q * q).sqrt()).cbrt();
        let big_b = if big_a == 0.0 { 0.0 } else { q / big_a };
        big_a + big_b - a / 3.0
    }
}

fn polish_real(p: MonicCubic, mut x: f64) -> f64 {
    for _ in 0..8 {
        let f = ((x + p.c2) * x + p.c1) * x + p.c0;
        let df = (3.0 * x + 2.0 * p.c2) * x + p.c1;
        if df == 0.0 || !f.is_finite() {
            break;
        }
        let step = f / df;
        let next = x - step;
        if !next.is_finite() {
            break;
        }
        let better = (((next + p.c2) * next + p.c1) * next + p.c0).abs() <= f.abs();
        if !better {
            break;
        }
        x = next;
        if step.abs() <= f64::EPSILON * x.abs() {
            break;
        }
    }
    x
}

fn polish(p: MonicCubic, mut z: C64) -> C64 {
    for _ in 0..8 {
        let f = p.eval(z);
        let df = p.derivative(z);
        if df.norm() == 0.0 {
            break;
        }
        let next = z - f / df;
        if !(next.re.is_finite() && next.im.is_finite()) || p.eval(next).norm() > f.norm() {
            break;
        }
        z = next;
    }
    z
}

/// How the cube roots in [`cardano`] were chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CubeRootBranch {
    /// Non-negative discriminant: both radicands are real and the real cube
    /// root is used. The result is unique.
    RealRadicands,
    /// Negative discriminant: y₊ is the principal complex cube root and y₋
    /// is fixed by the pairing y₊y₋ = −p/3.
    ComplexPaired,
}

/// The depressed-cubic construction s = y − c₂/3, y³ + p·y + q = 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CardanoRoots {
    pub p: f64,
    pub q: f64,
    /// (q/2)² + (p/3)³
    pub discriminant: f64,
    pub y_plus: C64,
    pub y_minus: C64,
    pub branch: CubeRootBranch,
    /// Λ₁ = y₊ + y₋ − c₂/3, Λ₂,₃ = −(y₊+y₋)/2 − c₂/3 ± i(√3/2)(y₊ − y₋)
    pub roots: [C64; 3],
}

/// Cardano's formulas for the depressed cubic with the given p, q and shift
/// c₂/3.
pub fn cardano(p: f64, q: f64, shift: f64) -> CardanoRoots {
    let discriminant = (q / 2.0).powi(2) + (p / 3.0).powi(3);
    let (y_plus, y_minus, branch) = if discriminant >= 0.0 {
        let sq = discriminant.sqrt();
        (
            C64::new((-q / 2.0 + sq).cbrt(), 0.0),
            C64::new((-q / 2.0 - sq).cbrt(), 0.0),
            CubeRootBranch::RealRadicands,
        )
    } else {
        let radicand = C64::new(-q / 2.0, (-discriminant).sqrt());
        let yp = radicand.cbrt();
        let ym = if yp.norm() == 0.0 {
            C64::new(0.0, 0.0)
        } else {
            C64::new(-p / 3.0, 0.0) / yp
        };
        (yp, ym, CubeRootBranch::ComplexPaired)
    };
    let sum = y_plus + y_minus;
    let diff = y_plus - y_minus;
    let i = C64::new(0.0, 1.0);
    let roots = [
        sum - shift,
        -sum / 2.0 - shift + i * SQRT3_2 * diff,
        -sum / 2.0 - shift - i * SQRT3_2 * diff,
    ];
    CardanoRoots {
        p,
        q,
        discriminant,
        y_plus,
        y_minus,
        branch,
        roots,
    }
}

/// Largest distance from each root in `a` to its nearest root in `b`.
pub fn root_set_distance(a: &[C64; 3], b: &[C64; 3]) -> f64 {
    a.iter()
        .map(|x| b.iter().map(|y| (x - y).norm()).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn expand(r: [C64; 3]) -> MonicCubic {
        let c2 = -(r[0] + r[1] + r[2]);
        let c1 = r[0] * r[1] + r[1] * r[2] + r[0] * r[2];
        let c0 = -(r[0] * r[1] * r[2]);
        MonicCubic::new(c2.re, c1.re, c0.re)
    }

    #[test]
    fn factored_cubic_with_double_root() {
        // s(s + 1/2)² = s³ + s² + s/4
        let r = solve_monic_cubic(MonicCubic::new(1.0, 0.25, 0.0));
        assert_eq!(r[0], C64::new(0.0, 0.0));
        assert_eq!(r[1], C64::new(-0.5, 0.0));
        assert_eq!(r[2], C64::new(-0.5, 0.0));
    }

    #[test]
    fn distinct_real_roots_descending() {
        let p = expand([C64::new(-1.0, 0.0), C64::new(-2.0, 0.0), C64::new(-3.0, 0.0)]);
        let r = solve_monic_cubic(p);
        for (got, want) in r.iter().zip([-1.0, -2.0, -3.0]) {
            assert!((got - C64::new(want, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn conjugate_pair_ordering() {
        let p = expand([
            C64::new(-0.3, -2.0),
            C64::new(-0.1, 0.0),
            C64::new(-0.3, 2.0),
        ]);
        let r = solve_monic_cubic(p);
        assert!(r[0].im == 0.0);
        assert!(r[1].im > 0.0);
        assert_eq!(r[2], r[1].conj());
        assert!((r[0] - C64::new(-0.1, 0.0)).norm() < 1e-14);
        assert!((r[1] - C64::new(-0.3, 2.0)).norm() < 1e-14);
    }

    #[test]
    fn cardano_matches_solver_on_real_radicands() {
        let p = MonicCubic::new(1.0, 5.3125, 0.53125);
        let shift = p.c2 / 3.0;
        let dp = p.c1 - p.c2 * p.c2 / 3.0;
        let dq = 2.0 * shift.powi(3) - shift * p.c1 + p.c0;
        let c = cardano(dp, dq, shift);
        assert_eq!(c.branch, CubeRootBranch::RealRadicands);
        assert!(root_set_distance(&c.roots, &solve_monic_cubic(p)) < 1e-12);
    }

    #[test]
    fn cardano_pairing_recovers_three_real_roots() {
        let p = expand([C64::new(-0.2, 0.0), C64::new(-0.5, 0.0), C64::new(-1.1, 0.0)]);
        let shift = p.c2 / 3.0;
        let dp = p.c1 - p.c2 * p.c2 / 3.0;
        let dq = 2.0 * shift.powi(3) - shift * p.c1 + p.c0;
        let c = cardano(dp, dq, shift);
        assert_eq!(c.branch, CubeRootBranch::ComplexPaired);
        assert!((c.y_plus * c.y_minus + dp / 3.0).norm() < 1e-14);
        assert!(root_set_distance(&c.roots, &solve_monic_cubic(p)) < 1e-12);
    }

    #[test]
    fn quadratic_without_cancellation() {
        let [a, b] = solve_monic_quadratic(1e8, 1.0);
        let small = if a.norm() < b.norm() { a } else { b };
        assert!((small.re + 1e-8).abs() < 1e-22);
    }

    proptest! {
        #[test]
        fn residuals_are_tiny(c2 in 0.0f64..20.0, c1 in 0.0f64..50.0, c0 in 0.0f64..30.0) {
            let p = MonicCubic::new(c2, c1, c0);
            let roots = solve_monic_cubic(p);
            let scale = 1.0 + c2.powi(3) + c1.powf(1.5) + c0;
            for r in roots {
                prop_assert!(p.eval(r).norm() <= 1e-12 * scale, "{r} residual {}", p.eval(r).norm());
            }
            let sum = roots[0] + roots[1] + roots[2];
            prop_assert!((sum.re + c2).abs() <= 1e-12 * (1.0 + c2));
            prop_assert!(sum.im.abs() <= 1e-12 * (1.0 + c2));
        }
    }
}
