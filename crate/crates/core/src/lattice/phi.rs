//! `Φ_{a,b,M,J}(w) = Σ_n Σ_{k=1}^{M−1} [(Mn−k)^β e^{−w(Mn−k)^a} − (Mn)^β e^{−w(Mn)^a}]`
//! with `β = b + aJ`.
//!
//! Writing `S_β(w) = Σ_{m≥1} m^β e^{−w m^a}` gives `Φ = S_β(w) − M^{1+β} S_β(M^a w)`.
//! For `w K^a > 1` (`K = 16`) the grouped series is summed directly. For smaller
//! `w` the terms decay too slowly, and each `S_β` is split as
//! `Γ((β+1)/a) / (a w^{(β+1)/a}) + R_β(w)`: the singular parts cancel exactly in
//! `Φ`, and the regular part `R_β` comes from Euler–Maclaurin at `K`.

use super::{LatticeError, PhiParams};
use crate::numerics::{gamma_ref, CompensatedAccumulator, NumericsError, ToleranceConfig};

const EM_CUT: f64 = 16.0;

/// `B_2, B_4, …, B_16`.
const BERNOULLI: [f64; 8] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
];

#[inline]
fn summand(beta: f64, a: f64, w: f64, m: f64) -> f64 {
    (beta * m.ln() - w * m.powf(a)).exp()
}

/// Rough bound on `M Σ_{m≥x} m^β e^{−w m^a}` once `x` is past the peak.
fn tail_estimate(beta: f64, a: f64, w: f64, mf: f64, x: f64) -> f64 {
    mf * summand(beta, a, w, x) * (1.0 + 2.0 * x.powf(1.0 - a) / (a * w))
}

fn peak(beta: f64, a: f64, w: f64) -> f64 {
    if beta > 0.0 {
        (beta / (a * w)).powf(1.0 / a)
    } else {
        0.0
    }
}

/// Grouped series, stopped once the remaining groups are below `rel_tol`
/// of the running sum.
fn phi_direct(beta: f64, a: f64, m: u32, w: f64, tol: &ToleranceConfig) -> Result<f64, NumericsError> {
    let mf = m as f64;
    let top_of_hill = peak(beta, a, w);
    let eps = tol.rel_tol().max(1e-17);
    let mut acc = CompensatedAccumulator::new();
    let mut n = 1u64;
    loop {
        let top = mf * n as f64;
        let top_term = summand(beta, a, w, top);
        let mut group = CompensatedAccumulator::new();
        for k in 1..m {
            group.add(summand(beta, a, w, top - k as f64) - top_term)?;
        }
        acc.add(group.value())?;
        let x = top + 1.0;
        if x >= top_of_hill {
            let t = tail_estimate(beta, a, w, mf, x);
            if t <= eps * acc.value().abs() || t < f64::MIN_POSITIVE {
                break;
            }
        }
        if n >= tol.max_terms() {
            return Err(NumericsError::NonConvergence {
                needed: n + 1,
                max_terms: tol.max_terms(),
            });
        }
        n += 1;
    }
    Ok(acc.value())
}

/// `S_β(w)` summed directly (needs `w` large enough for the terms to decay).
fn s_direct(beta: f64, a: f64, w: f64, tol: &ToleranceConfig) -> Result<f64, NumericsError> {
    let top_of_hill = peak(beta, a, w);
    let eps = tol.rel_tol().max(1e-17);
    let mut acc = CompensatedAccumulator::new();
    let mut m = 1u64;
    loop {
        let mf = m as f64;
        acc.add(summand(beta, a, w, mf))?;
        let x = mf + 1.0;
        if x >= top_of_hill {
            let t = tail_estimate(beta, a, w, 1.0, x);
            if t <= eps * acc.value().abs() || t < f64::MIN_POSITIVE {
                break;
            }
        }
        if m >= tol.max_terms() {
            return Err(NumericsError::NonConvergence {
                needed: m + 1,
                max_terms: tol.max_terms(),
            });
        }
        m += 1;
    }
    Ok(acc.value())
}

/// `Γ((β+1)/a) / (a w^{(β+1)/a})`, the Mellin-singular part of `S_β(w)`.
fn singular_part(beta: f64, a: f64, w: f64) -> Result<f64, NumericsError> {
    let s = (beta + 1.0) / a;
    Ok(gamma_ref(s)? / a * (-s * w.ln()).exp())
}

/// `(x)_r = x (x−1) ⋯ (x−r+1)`.
fn falling(x: f64, r: u32) -> f64 {
    (0..r).fold(1.0, |acc, i| acc * (x - i as f64))
}

/// Regular part `R_β(w) = S_β(w) − Γ((β+1)/a)/(a w^{(β+1)/a})`.
pub(crate) fn regular_part(beta: f64, a: f64, w: f64, tol: &ToleranceConfig) -> Result<f64, NumericsError> {
    let k = EM_CUT;
    let x = w * k.powf(a);
    if x > 1.0 {
        return Ok(s_direct(beta, a, w, tol)? - singular_part(beta, a, w)?);
    }
    let mut head = CompensatedAccumulator::new();
    for m in 1..(k as u64) {
        head.add(summand(beta, a, w, m as f64))?;
    }

    // Power series in x = w K^a; every coefficient is bounded, and x ≤ 1.
    let series = |coef: &dyn Fn(u32) -> f64| -> f64 {
        let mut acc = CompensatedAccumulator::new();
        let mut pw = 1.0; // (−x)^i / i!
        for i in 0..80u32 {
            if i > 0 {
                pw *= -x / i as f64;
            }
            let term = pw * coef(i);
            acc.add_finite(term);
            if i > 20 && term.abs() <= 1e-19 * acc.value().abs().max(1e-300) {
                break;
            }
        }
        acc.value()
    };

    let kb = k.powf(beta);
    // ∫_0^K t^β e^{−w t^a} dt
    let integral = kb * k * series(&|i| 1.0 / (beta + 1.0 + a * i as f64));
    let g_k = summand(beta, a, w, k);
    let mut em = CompensatedAccumulator::new();
    let mut fact = 2.0; // (2j)!
    for (j, b2j) in BERNOULLI.iter().enumerate() {
        let order = 2 * j as u32 + 1;
        if j > 0 {
            fact *= (2 * j + 1) as f64 * (2 * j + 2) as f64;
        }
        // g^{(r)}(K) = K^{β−r} Σ_i (−x)^i/i! (β + a i)_r
        let deriv = kb * k.powi(-(order as i32)) * series(&|i| falling(beta + a * i as f64, order));
        em.add_finite(b2j / fact * deriv);
    }
    Ok(head.value() - integral + 0.5 * g_k - em.value())
}

/// `Φ_{a,b,M,J}(w)` for `w > 0`. Underflow to an exact zero is permitted.
pub fn phi(p: &PhiParams, w: f64, tol: &ToleranceConfig) -> Result<f64, LatticeError> {
    if !(w > 0.0) || !w.is_finite() {
        return Err(LatticeError::InvalidParameter("phi needs w > 0"));
    }
    let beta = p.beta();
    let a = p.a();
    if w * EM_CUT.powf(a) > 1.0 {
        return Ok(phi_direct(beta, a, p.m(), w, tol)?);
    }
    let mf = p.m() as f64;
    let r0 = regular_part(beta, a, w, tol)?;
    let r1 = regular_part(beta, a, w * mf.powf(a), tol)?;
    Ok(r0 - mf.powf(1.0 + beta) * r1)
}

/// The grouped series summed directly, whatever the size of `w`. Exposed so
/// the two evaluation regimes can be compared.
pub fn phi_grouped(p: &PhiParams, w: f64, tol: &ToleranceConfig) -> Result<f64, LatticeError> {
    if !(w > 0.0) || !w.is_finite() {
        return Err(LatticeError::InvalidParameter("phi needs w > 0"));
    }
    Ok(phi_direct(p.beta(), p.a(), p.m(), w, tol)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    #[test]
    fn bose_type_closed_form() {
        for (m, w) in [(2u32, 0.5f64), (3, 1.3), (2, 0.01), (3, 1e-5)] {
            let p = PhiParams::new(1.0, 0.0, m, 0).unwrap();
            let mf = m as f64;
            // The two poles cancel; for small w use the Laurent expansion instead.
            let exact = if w < 1e-3 {
                (1.0 - mf) * (-0.5) + (1.0 - mf * mf) * w / 12.0 - (1.0 - mf.powi(4)) * w.powi(3) / 720.0
            } else {
                1.0 / w.exp_m1() - mf / (mf * w).exp_m1()
            };
            let v = phi(&p, w, &tol()).unwrap();
            assert!((v - exact).abs() < 1e-12 * (1.0 + exact.abs()), "M={m} w={w}: {v} vs {exact}");
        }
    }

    #[test]
    fn regimes_agree_near_the_switch() {
        for (a, b, m, j) in [(1.0, 0.0, 2, 0), (2.0, 0.0, 2, 0), (1.0, 1.0, 3, 1), (2.0, 0.0, 2, 2), (0.5, 0.3, 2, 0)] {
            let p = PhiParams::new(a, b, m, j).unwrap();
            let w_switch = 16f64.powf(-a);
            for f in [0.3, 0.7, 0.99] {
                let w = w_switch * f;
                let em = phi(&p, w, &tol()).unwrap();
                let direct = phi_grouped(&p, w, &tol()).unwrap();
                // Both routes cancel terms of the size of M^{1+β} times the singular
                // part at M^a w, which bounds the attainable absolute accuracy.
                let mf = m as f64;
                let scale = 1.0 + mf.powf(1.0 + p.beta()) * singular_part(p.beta(), a, w * mf.powf(a)).unwrap();
                assert!((em - direct).abs() < 1e-12 * scale, "{a} {b} {m} {j} w={w}: {em} vs {direct}");
            }
        }
    }

    #[test]
    fn zero_limit_is_zeta_at_minus_beta() {
        // Φ(0+) = (1 − M^{1+β}) ζ(−β); ζ(0) = −1/2, ζ(−1) = −1/12.
        let p = PhiParams::new(2.0, 0.0, 2, 0).unwrap();
        assert!((phi(&p, 1e-12, &tol()).unwrap() - 0.5).abs() < 1e-10);
        let p = PhiParams::new(1.0, 1.0, 3, 0).unwrap();
        assert!((phi(&p, 1e-9, &tol()).unwrap() - (1.0 - 9.0) * (-1.0 / 12.0)).abs() < 1e-7);
    }

    #[test]
    fn rejects_non_positive_argument() {
        let p = PhiParams::new(1.0, 0.0, 2, 0).unwrap();
        assert!(phi(&p, 0.0, &tol()).is_err());
        assert!(phi(&p, -1.0, &tol()).is_err());
    }
}
