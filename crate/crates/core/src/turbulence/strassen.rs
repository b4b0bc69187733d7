use crate::error::{Error, Result};
use crate::turbulence::WienerPath;

/// Y_t = W(t)·∫₀ᵗW ds − ½∫₀ᵗ|W|² ds from the cached functionals.
pub fn strassen_functional(path: &WienerPath<f64>, t: f64) -> Result<f64> {
    Ok(path.functionals_at(t)?.strassen_y())
}

/// h(n) = (2n ln ln n)^{−½}.
pub fn strassen_h(n: f64) -> Result<f64> {
    if !(n >= 3.0) {
        return Err(Error::InvalidArgument(format!("n must be at least 3 so that ln ln n > 0, got {n}")));
    }
    Ok((2.0 * n * n.ln().ln()).powf(-0.5))
}

/// Both sides of h(n)²n⁻¹Y_n(W) = Y₁(Z_n) with Z_n(t) = h(n)W(nt). The left side uses the
/// functionals of W at time n; the right side rebuilds Z_n on [0, 1] from the same grid
/// values and integrates it afresh.
pub fn strassen_scaling_check(path: &WienerPath<f64>, n: usize) -> Result<(f64, f64)> {
    let nf = n as f64;
    let h = strassen_h(nf)?;
    let dt = path.dt();
    let m = (nf / dt).round() as usize;
    if m > path.steps() || ((m as f64) * dt - nf).abs() > 1e-9 * nf {
        return Err(Error::InvalidArgument(format!("n = {n} must be a grid time within the path horizon {}", path.horizon())));
    }
    let lhs = h * h / nf * path.functionals_at_index(m).strassen_y();
    let d = path.dim();
    let z: Vec<f64> = (0..=m).flat_map(|i| path.w(i).iter().map(move |v| h * v).collect::<Vec<_>>()).collect();
    let zp = WienerPath::from_values(d, 1.0, z)?;
    Ok((lhs, zp.functionals_at_index(m).strassen_y()))
}
