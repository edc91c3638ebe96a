//! Textbook evaluation of the distillation formulas with plain `f64`
//! arithmetic. Shares no code with the library, which works through
//! log-domain deficits.

#![allow(dead_code)]

pub struct NaiveChannel {
    pub n: usize,
    pub beta0: f64,
    pub beta1: f64,
    pub lambda: f64,
}

pub fn channel(n: usize, eps: f64) -> NaiveChannel {
    let nf = n as f64;
    let beta0 = 1.0 - (nf - 1.0) * eps / nf;
    let beta1 = eps / nf;
    NaiveChannel {
        n,
        beta0,
        beta1,
        lambda: 1.0 - beta1 / beta0,
    }
}

fn xlog(x: f64, n: usize) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.log(n as f64)
    }
}

/// `(beta0^(L), beta1^(L), p_accept)`.
pub fn distilled(n: usize, eps: f64, l: u32) -> (f64, f64, f64) {
    let c = channel(n, eps);
    let b0 = c.beta0.powi(l as i32);
    let b1 = c.beta1.powi(l as i32);
    let accept = b0 + (n as f64 - 1.0) * b1;
    (b0 / accept, b1 / accept, accept)
}

pub fn i_ab(n: usize, eps: f64, l: u32) -> f64 {
    let (b0, b1, _) = distilled(n, eps, l);
    1.0 + xlog(b0, n) + (1.0 - b0) * if b1 == 0.0 { 0.0 } else { b1.log(n as f64) }
}

/// `(eta0, eta1)` for overlap `mu`.
pub fn eta(n: usize, mu: f64) -> (f64, f64) {
    let nf = n as f64;
    let a = (1.0 + (nf - 1.0) * mu).sqrt();
    let b = (1.0 - mu).sqrt();
    (((a + (nf - 1.0) * b) / nf).powi(2), ((a - b) / nf).powi(2))
}

pub fn i_ae(n: usize, eps: f64, l: u32) -> f64 {
    let c = channel(n, eps);
    let (b0, _, _) = distilled(n, eps, l);
    let (e0, e1) = eta(n, c.lambda.powi(l as i32));
    let wrong = if e1 == 0.0 { 0.0 } else { (1.0 - e0) * e1.log(n as f64) };
    1.0 + b0 * (xlog(e0, n) + wrong)
}
