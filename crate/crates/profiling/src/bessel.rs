/// Modified Bessel function of the first kind `I_n(x)` from its power series
/// `sum_m (x/2)^{2m+n} / (m! (m+n)!)`, truncated once a term drops below
/// `1e-16` of the partial sum. `I_{-n} = I_n` for integer order.
pub fn bessel_i(n: i64, x: f64) -> f64 {
    let n = n.unsigned_abs();
    let half = 0.5 * x;
    let mut term = (0..n).fold(1.0, |t, k| t * half / (k + 1) as f64);
    let mut sum = term;
    let q = half * half;
    for m in 1.. {
        term *= q / (m as f64 * (m + n) as f64);
        sum += term;
        if term.abs() < 1e-16 * sum.abs() || m > 10_000 {
            break;
        }
    }
    sum
}
