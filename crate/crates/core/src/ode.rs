//! Classical fourth-order Runge-Kutta for two-component complex systems.
//!
//! Both oracles in this crate (coherence relaxation in time, channel
//! propagation in z) are 2×2 linear systems, so the state is a fixed pair.

use num_complex::Complex64;

pub type Pair = [Complex64; 2];

#[inline]
fn axpy(y: &Pair, h: f64, k: &Pair) -> Pair {
    [y[0] + k[0] * h, y[1] + k[1] * h]
}

/// One RK4 step of `y' = f(y)` for an autonomous right-hand side.
#[inline]
pub fn rk4_step<F>(f: &F, y: &Pair, h: f64) -> Pair
where
    F: Fn(&Pair) -> Pair,
{
    let k1 = f(y);
    let k2 = f(&axpy(y, 0.5 * h, &k1));
    let k3 = f(&axpy(y, 0.5 * h, &k2));
    let k4 = f(&axpy(y, h, &k3));
    let w = h / 6.0;
    [
        y[0] + (k1[0] + k2[0] * 2.0 + k3[0] * 2.0 + k4[0]) * w,
        y[1] + (k1[1] + k2[1] * 2.0 + k3[1] * 2.0 + k4[1]) * w,
    ]
}

/// Integrates from `y0` over `steps` uniform steps of size `h`.
pub fn rk4_integrate<F>(f: F, y0: Pair, h: f64, steps: usize) -> Pair
where
    F: Fn(&Pair) -> Pair,
{
    (0..steps).fold(y0, |y, _| rk4_step(&f, &y, h))
}

/// Like [`rk4_integrate`] but hands every intermediate state to `observe`,
/// starting with `y0`.
pub fn rk4_trajectory<F, O>(f: F, y0: Pair, h: f64, steps: usize, mut observe: O) -> Pair
where
    F: Fn(&Pair) -> Pair,
    O: FnMut(usize, &Pair),
{
    observe(0, &y0);
    let mut y = y0;
    for i in 1..=steps {
        y = rk4_step(&f, &y, h);
        observe(i, &y);
    }
    y
}
