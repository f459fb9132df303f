//! Small floating-point helpers shared by the modules.

/// Neumaier-compensated sum.
pub(crate) fn compensated_sum<I: IntoIterator<Item = f64>>(terms: I) -> f64 {
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    for x in terms {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Horner evaluation, coefficients in ascending degree.
pub(crate) fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

/// Coefficients of the `order`-th derivative, ascending degree.
pub(crate) fn derivative_coeffs(coeffs: &[f64], order: usize) -> Vec<f64> {
    let mut out = coeffs.to_vec();
    for _ in 0..order {
        if out.is_empty() {
            break;
        }
        out = out
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| c * i as f64)
            .collect();
    }
    out
}

/// Majorant of |p^{(order)}| on [0, 1]: Σ |c_i| · i!/(i-order)!.
pub(crate) fn derivative_majorant(coeffs: &[f64], order: usize) -> f64 {
    derivative_coeffs(coeffs, order)
        .iter()
        .map(|c| c.abs())
        .sum()
}

/// Equispaced nodes lo = t_0 < ... < t_n = hi with step at most `step`.
pub(crate) fn grid_nodes(lo: f64, hi: f64, step: f64) -> (Vec<f64>, f64) {
    let n = ((hi - lo) / step).ceil().max(1.0) as usize;
    let h = (hi - lo) / n as f64;
    let mut nodes: Vec<f64> = (0..n).map(|j| lo + j as f64 * h).collect();
    nodes.push(hi);
    (nodes, h)
}
