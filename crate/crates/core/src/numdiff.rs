//! Central differences with one Richardson extrapolation step.

/// First derivative, fourth-order accurate in `h`.
pub fn derivative<T, F>(f: F, x: f64, h: f64) -> T
where
    F: Fn(f64) -> T,
    T: Copy + std::ops::Add<Output = T> + std::ops::Sub<Output = T> + std::ops::Mul<f64, Output = T>,
{
    let d = |step: f64| (f(x + step) - f(x - step)) * (0.5 / step);
    let coarse = d(h);
    let fine = d(0.5 * h);
    (fine - coarse) * (1.0 / 3.0) + fine
}

/// Second derivative, fourth-order accurate in `h`.
pub fn second_derivative<T, F>(f: F, x: f64, h: f64) -> T
where
    F: Fn(f64) -> T,
    T: Copy + std::ops::Add<Output = T> + std::ops::Sub<Output = T> + std::ops::Mul<f64, Output = T>,
{
    let center = f(x);
    let d2 = |step: f64| (f(x + step) + f(x - step) - center * 2.0) * (1.0 / (step * step));
    let coarse = d2(h);
    let fine = d2(0.5 * h);
    (fine - coarse) * (1.0 / 3.0) + fine
}
