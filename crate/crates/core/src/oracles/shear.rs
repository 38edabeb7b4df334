//! The real map `q(x1, y1, x2, y2) = (e^x1 cos x2, y1, e^x1 sin x2, y2)` on
//! the strip product `|x1| < 1`, `|x2| < pi + eps`: locally injective
//! everywhere but not injective.

use std::f64::consts::PI;

use nalgebra::Matrix4;

pub type R4 = [f64; 4];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShearMap {
    pub eps: f64,
}

impl ShearMap {
    pub fn new(eps: f64) -> Self {
        Self { eps }
    }

    pub fn contains(&self, w: &R4) -> bool {
        w[0].abs() < 1.0 && w[2].abs() < PI + self.eps
    }

    pub fn eval(&self, w: &R4) -> R4 {
        let [x1, y1, x2, y2] = *w;
        let r = x1.exp();
        [r * x2.cos(), y1, r * x2.sin(), y2]
    }

    /// `e^{2 x1}`.
    pub fn jacobian(&self, w: &R4) -> f64 {
        (2.0 * w[0]).exp()
    }

    /// Determinant of the central-difference real Jacobian.
    pub fn jacobian_fd(&self, w: &R4, step: f64) -> f64 {
        let mut m = Matrix4::<f64>::zeros();
        for col in 0..4 {
            let mut p = *w;
            let mut q = *w;
            p[col] += step;
            q[col] -= step;
            let (fp, fq) = (self.eval(&p), self.eval(&q));
            for row in 0..4 {
                m[(row, col)] = (fp[row] - fq[row]) / (2.0 * step);
            }
        }
        m.determinant()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ShearDemo {
    pub eps: f64,
    pub jacobian_at_origin: f64,
    /// Two distinct domain points with the same image.
    pub collision: (R4, R4, R4),
    pub grid_points: usize,
    pub grid_min_jacobian: f64,
    /// Largest relative gap between `e^{2 x1}` and the finite-difference
    /// determinant over the grid.
    pub grid_max_fd_error: f64,
}

/// Collision report and a 10^3-point scan of the domain.
pub fn shear_demo(eps: f64) -> ShearDemo {
    let q = ShearMap::new(eps);
    let a = [0.0, 0.0, -PI, 0.0];
    let b = [0.0, 0.0, PI, 0.0];
    let qa = q.eval(&a);
    let qb = q.eval(&b);
    debug_assert!(qa.iter().zip(&qb).all(|(x, y)| (x - y).abs() < 1e-15));

    const SIDE: usize = 10;
    let lin = |lo: f64, hi: f64, k: usize| lo + (hi - lo) * (k as f64 + 0.5) / SIDE as f64;
    let x2_max = PI + eps;
    let mut min_j = f64::INFINITY;
    let mut max_err: f64 = 0.0;
    let mut count = 0;
    for i in 0..SIDE {
        for j in 0..SIDE {
            for k in 0..SIDE {
                let w = [lin(-1.0, 1.0, i), lin(-2.0, 2.0, k), lin(-x2_max, x2_max, j), lin(-1.0, 1.0, (k + j) % SIDE)];
                debug_assert!(q.contains(&w));
                let jac = q.jacobian(&w);
                min_j = min_j.min(jac);
                max_err = max_err.max((q.jacobian_fd(&w, 1e-5) - jac).abs() / jac);
                count += 1;
            }
        }
    }
    ShearDemo {
        eps,
        jacobian_at_origin: q.jacobian(&[0.0; 4]),
        collision: (a, b, qa),
        grid_points: count,
        grid_min_jacobian: min_j,
        grid_max_fd_error: max_err,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn collision_and_jacobian() {
        let d = shear_demo(0.1);
        assert_eq!(d.jacobian_at_origin, 1.0);
        let (a, b, v) = d.collision;
        assert_ne!(a, b);
        assert!((v[0] + 1.0).abs() < 1e-15 && v[1] == 0.0 && v[2].abs() < 1e-15 && v[3] == 0.0);
        assert_eq!(d.grid_points, 1000);
        assert!(d.grid_min_jacobian > 0.0);
        assert!(d.grid_max_fd_error < 1e-6);
        let q = ShearMap::new(0.1);
        assert!(q.contains(&a) && q.contains(&b));
    }
}
