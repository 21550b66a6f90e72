//! Gamma-function family helpers.

/// `n!` as a float. Exact for `n <= 22`.
pub fn factorial(n: u32) -> f64 {
    if n > 170 {
        return f64::INFINITY;
    }
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

pub fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of |Γ(x)| (Lanczos, g = 7).
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).abs().ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = LANCZOS[0];
    let t = x + LANCZOS_G + 0.5;
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

/// Γ(x); exact factorials at positive integers.
pub fn gamma(x: f64) -> f64 {
    if x > 0.0 && x.fract() == 0.0 && x <= 171.0 {
        return factorial(x as u32 - 1);
    }
    let sign = if x < 0.0 && (x.floor() as i64) % 2 != 0 { -1.0 } else { 1.0 };
    sign * ln_gamma(x).exp()
}

/// Density of the Gamma(shape, rate) law at `x`, evaluated in log space.
pub fn gamma_pdf(shape: u32, rate: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return if shape == 1 && x == 0.0 { rate } else { 0.0 };
    }
    let k = shape as f64;
    (k * rate.ln() + (k - 1.0) * x.ln() - rate * x - ln_gamma(k)).exp()
}

/// Lower and upper regularized incomplete gamma `(P(n, y), Q(n, y))` for
/// integer `n >= 1`. Each member is computed without cancellation.
pub fn gamma_cdf_sf(shape: u32, y: f64) -> (f64, f64) {
    if y <= 0.0 {
        return (0.0, 1.0);
    }
    let n = shape as f64;
    if y < n + 1.0 {
        // P = e^{-y} Σ_{k>=n} y^k / k!
        let mut term = (n * y.ln() - y - ln_gamma(n + 1.0)).exp();
        let mut p = 0.0;
        let mut k = n;
        while term > p * 1e-17 && k < n + 1000.0 {
            p += term;
            k += 1.0;
            term *= y / k;
        }
        (p, 1.0 - p)
    } else {
        // Q = e^{-y} Σ_{k<n} y^k / k!
        let mut term = (-y).exp();
        let mut q = 0.0;
        for k in 0..shape {
            if k > 0 {
                term *= y / k as f64;
            }
            q += term;
        }
        (1.0 - q, q)
    }
}
