//! `Ψ(t) = (−1)^J d^{j_1}( ℓ^{l_1} d^{j_2}( ℓ^{l_2} ⋯ D(t)))` with
//! `ℓ = ln t / (a ln(M/N))` and
//! `D(t) = Σ_l c_l A_l^b [Φ_{a,b,M,0} − Φ_{a,b,N,0}](t A_l^a)`,
//! `A_l = M^l N^{L−1−l}`, `c_l = C(L−1,l) (−M)^l N^{L−1−l}`.
//!
//! Expanding the chain gives `Σ C t^p (ln t)^q D^{(r)}(t)`, and
//! `D^{(r)}(t) = Σ_l c_l A_l^b (−A_l^a)^r [Φ_{a,b,M,r} − Φ_{a,b,N,r}](t A_l^a)`,
//! so `Ψ` is available for every `t > 0` from [`phi`](super::phi).

use super::explog::{explog_differentiate, ExpLogTerm};
use super::{check_range, lattice_term, node_sum, pair_params, pair_phi, LatticeError, LatticeSumResult, PhiParams};
use crate::exec::ExecPolicy;
use crate::numerics::{factorial, CompensatedAccumulator, ToleranceConfig};
use crate::quadrature::derivative_coefficients;

/// Parameters of `Ψ`. `j` and `l` interleave as `j_1, l_1, j_2, l_2, …`, so
/// `j` has as many entries as `l` or one more.
#[derive(Debug, Clone, PartialEq)]
pub struct PsiParams {
    a: f64,
    b: f64,
    m: u32,
    n: u32,
    big_l: u32,
    j: Vec<u32>,
    l: Vec<u32>,
}

impl PsiParams {
    pub fn new(a: f64, b: f64, m: u32, n: u32, big_l: u32, j: Vec<u32>, l: Vec<u32>) -> Result<Self, LatticeError> {
        if big_l < 1 || big_l > 12 {
            return Err(LatticeError::InvalidParameter("L must be in 1..=12"));
        }
        if !(j.len() == l.len() || j.len() == l.len() + 1) || j.is_empty() {
            return Err(LatticeError::InvalidParameter("j must have as many entries as l, or one more"));
        }
        if l.iter().sum::<u32>() != big_l - 1 {
            return Err(LatticeError::InvalidParameter("l entries must sum to L-1"));
        }
        let total_j: u32 = j.iter().sum();
        pair_params(a, b, m, n, total_j)?;
        Ok(Self { a, b, m, n, big_l, j, l })
    }

    pub fn total_j(&self) -> u32 {
        self.j.iter().sum()
    }

    pub fn big_l(&self) -> u32 {
        self.big_l
    }

    /// `(L−1)! Γ((1+b)/a+J)/a`.
    pub fn target(&self) -> Result<f64, LatticeError> {
        let p = PhiParams::new(self.a, self.b, self.m, self.total_j())?;
        Ok(factorial(self.big_l - 1) * p.gamma_target()?)
    }

    fn log_scale(&self) -> f64 {
        self.a * (self.m as f64 / self.n as f64).ln()
    }

    /// Chain steps from the outside in: `Ok(j)` differentiates `j` times and
    /// `Err(l)` multiplies by `ℓ^l`.
    fn steps(&self) -> Vec<Result<u32, u32>> {
        let mut out = Vec::new();
        for i in 0..self.j.len() {
            out.push(Ok(self.j[i]));
            if let Some(&li) = self.l.get(i) {
                out.push(Err(li));
            }
        }
        out
    }
}

/// `coeff · t^tpow · (ln t)^logpow · D^{(order)}(t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainTerm {
    pub coeff: f64,
    pub tpow: i32,
    pub logpow: u32,
    pub order: u32,
}

fn push_chain(out: &mut Vec<ChainTerm>, term: ChainTerm) {
    if term.coeff == 0.0 {
        return;
    }
    match out
        .iter_mut()
        .find(|t| t.tpow == term.tpow && t.logpow == term.logpow && t.order == term.order)
    {
        Some(t) => t.coeff += term.coeff,
        None => out.push(term),
    }
}

fn chain_differentiate(terms: &[ChainTerm]) -> Vec<ChainTerm> {
    let mut out = Vec::new();
    for t in terms {
        if t.tpow != 0 {
            push_chain(&mut out, ChainTerm { coeff: t.tpow as f64 * t.coeff, tpow: t.tpow - 1, ..*t });
        }
        if t.logpow > 0 {
            push_chain(
                &mut out,
                ChainTerm { coeff: t.logpow as f64 * t.coeff, tpow: t.tpow - 1, logpow: t.logpow - 1, ..*t },
            );
        }
        push_chain(&mut out, ChainTerm { order: t.order + 1, ..*t });
    }
    out.retain(|t| t.coeff != 0.0);
    out
}

/// Expansion of the chain (including the `(−1)^J` sign) applied to `D`.
pub fn psi_chain(p: &PsiParams) -> Vec<ChainTerm> {
    let scale = p.log_scale();
    let mut terms = vec![ChainTerm { coeff: 1.0, tpow: 0, logpow: 0, order: 0 }];
    for step in p.steps().into_iter().rev() {
        match step {
            Ok(j) => {
                for _ in 0..j {
                    terms = chain_differentiate(&terms);
                }
            }
            Err(l) => {
                for t in &mut terms {
                    t.logpow += l;
                    t.coeff /= scale.powi(l as i32);
                }
            }
        }
    }
    if p.total_j() % 2 == 1 {
        for t in &mut terms {
            t.coeff = -t.coeff;
        }
    }
    terms
}

/// `D^{(r)}(t)`.
fn d_derivative(p: &PsiParams, r: u32, t: f64, tol: &ToleranceConfig) -> Result<f64, LatticeError> {
    let (pm, pn) = pair_params(p.a, p.b, p.m, p.n, r)?;
    let mut acc = CompensatedAccumulator::new();
    for (big_a, c) in derivative_coefficients(p.m, p.n, p.big_l) {
        let scale = big_a.powf(p.a);
        let w = t * scale;
        if !w.is_finite() {
            continue;
        }
        let v = pair_phi(&pm, pn.as_ref(), w, tol)?;
        if v == 0.0 {
            continue;
        }
        let sign = if r % 2 == 1 { -1.0 } else { 1.0 };
        acc.add(c * big_a.powf(p.b) * sign * scale.powi(r as i32) * v)?;
    }
    Ok(acc.value())
}

fn psi_with_chain(p: &PsiParams, chain: &[ChainTerm], t: f64, tol: &ToleranceConfig) -> Result<f64, LatticeError> {
    let max_order = chain.iter().map(|c| c.order).max().unwrap_or(0);
    let mut d = Vec::with_capacity(max_order as usize + 1);
    for r in 0..=max_order {
        d.push(if chain.iter().any(|c| c.order == r) { d_derivative(p, r, t, tol)? } else { 0.0 });
    }
    let ln_t = t.ln();
    let mut acc = CompensatedAccumulator::new();
    for c in chain {
        let dv = d[c.order as usize];
        if dv == 0.0 {
            continue;
        }
        acc.add(c.coeff * t.powi(c.tpow) * ln_t.powi(c.logpow as i32) * dv)?;
    }
    Ok(acc.value())
}

/// `Ψ(t)` for `t > 0`.
pub fn psi(p: &PsiParams, t: f64, tol: &ToleranceConfig) -> Result<f64, LatticeError> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(LatticeError::InvalidParameter("psi needs t > 0"));
    }
    psi_with_chain(p, &psi_chain(p), t, tol)
}

/// `Ψ(t)` with every term `C e^{−λt}` of the double series pushed through
/// the chain in the [`ExpLogTerm`] algebra. Only practical when `t` is not
/// small, since the series is truncated where `λ t` exceeds 80.
pub fn psi_termwise(p: &PsiParams, t: f64, tol: &ToleranceConfig) -> Result<f64, LatticeError> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(LatticeError::InvalidParameter("psi needs t > 0"));
    }
    let steps = p.steps();
    let scale = p.log_scale();
    let sign = if p.total_j() % 2 == 1 { -1.0 } else { 1.0 };
    let through_chain = |coeff: f64, rate: f64| -> f64 {
        let mut terms = vec![ExpLogTerm::exponential(coeff, rate)];
        for step in steps.iter().rev() {
            match *step {
                Ok(j) => {
                    for _ in 0..j {
                        terms = explog_differentiate(&terms);
                    }
                }
                Err(l) => terms = terms.iter().map(|x| x.times_log(l, scale)).collect(),
            }
        }
        terms.iter().map(|x| x.eval(t)).sum::<f64>()
    };

    let mut acc = CompensatedAccumulator::new();
    for (big_a, c) in derivative_coefficients(p.m, p.n, p.big_l) {
        for (base, fam_sign) in [(p.m, 1.0), (p.n, -1.0)] {
            if base < 2 {
                continue;
            }
            let bf = base as f64;
            let mut group = 1u64;
            loop {
                let top = bf * group as f64;
                let mut g = CompensatedAccumulator::new();
                for k in 1..base {
                    let x = big_a * (top - k as f64);
                    g.add(through_chain(c * x.powf(p.b), x.powf(p.a)))?;
                }
                let x = big_a * top;
                g.add(-(bf - 1.0) * through_chain(c * x.powf(p.b), x.powf(p.a)))?;
                acc.add(sign * fam_sign * g.value())?;
                if t * (big_a * (top + 1.0)).powf(p.a) > 80.0 {
                    break;
                }
                if group >= tol.max_terms() {
                    return Err(crate::numerics::NumericsError::NonConvergence {
                        needed: group + 1,
                        max_terms: tol.max_terms(),
                    }
                    .into());
                }
                group += 1;
            }
        }
    }
    Ok(acc.value())
}

/// `Σ_n (M/N)^{(aJ+1+b)(n+z)} Ψ((M/N)^{a(n+z)})`, with target `(L−1)! Γ((1+b)/a+J)/a`.
pub fn psi_lattice_sum(
    p: &PsiParams,
    z: f64,
    range: (i64, i64),
    policy: &ExecPolicy,
    tol: &ToleranceConfig,
) -> Result<LatticeSumResult, LatticeError> {
    check_range(range, z)?;
    let chain = psi_chain(p);
    let beta = p.b + p.a * p.total_j() as f64;
    let ln_base = (p.m as f64 / p.n as f64).ln();
    let value = node_sum(range, policy, |k| {
        lattice_term(ln_base, p.a, beta, k as f64 + z, |t| psi_with_chain(p, &chain, t, tol))
    })?;
    Ok(LatticeSumResult::new(value, p.target()?, range, z))
}
