use crate::C64;

/// `<a|b>`, conjugating the left argument.
pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Normalizes in place and returns the original norm.
pub fn normalize(a: &mut [C64]) -> f64 {
    let n = norm(a);
    if n > 0.0 {
        let inv = 1.0 / n;
        a.iter_mut().for_each(|x| *x *= inv);
    }
    n
}

pub fn normalized(a: &[C64]) -> Vec<C64> {
    let mut v = a.to_vec();
    normalize(&mut v);
    v
}

/// `|<a|b>|^2` for normalized inputs.
pub fn fidelity(a: &[C64], b: &[C64]) -> f64 {
    inner(a, b).norm_sqr()
}
