use super::nodes::{frac, log_frac, log_frac_real, reciprocal_frac};
use super::schemes::{cf_denominator, derivative_coefficients, lattice_denominator, NodeScheme};
use super::QuadratureError;

/// One sampled point of a series: `f(node)` enters the raw sum with `weight`.
/// The paired top term of a group is reported once with `k = 0` and the
/// combined weight `−(M−1)/(Mn)` (times the scheme's factors).
#[derive(Debug, Clone, PartialEq)]
pub struct NodeRow {
    pub group: u64,
    pub k: u32,
    pub node: f64,
    pub weight: f64,
    /// Which sub-series the row belongs to; empty for single-family schemes.
    pub family: String,
    /// Denominator `G` for the weighted schemes.
    pub g_value: Option<f64>,
}

fn push_group<F>(rows: &mut Vec<NodeRow>, group: u64, m: u64, sign: f64, family: &str, sample: F)
where
    F: Fn(u64) -> (f64, f64, Option<f64>),
{
    let top = m * group;
    for k in 1..m {
        let (node, weight, g_value) = sample(top - k);
        rows.push(NodeRow {
            group,
            k: k as u32,
            node,
            weight: sign * weight,
            family: family.to_string(),
            g_value,
        });
    }
    let (node, weight, g_value) = sample(top);
    rows.push(NodeRow {
        group,
        k: 0,
        node,
        weight: -sign * (m - 1) as f64 * weight,
        family: family.to_string(),
        g_value,
    });
}

/// The first `count` rows of the scheme's node/weight sequence, in series order.
pub fn node_stream(scheme: &NodeScheme, count: usize) -> Result<Vec<NodeRow>, QuadratureError> {
    scheme.validate()?;
    let mm = scheme.m() as u64;
    let ln_m = (mm as f64).ln();
    let mut rows = Vec::with_capacity(count + 64);
    let mut group = 0u64;
    while rows.len() < count {
        group += 1;
        match scheme {
            NodeScheme::Plain { .. } => push_group(&mut rows, group, mm, 1.0, "", |j| {
                (log_frac(j, mm, ln_m), 1.0 / j as f64, None)
            }),
            NodeScheme::Transformed { phi, dphi, .. } => push_group(&mut rows, group, mm, 1.0, "", |j| {
                let x = log_frac(j, mm, ln_m);
                (frac(phi(x)), dphi(x) / j as f64, None)
            }),
            NodeScheme::Lattice { l, chi, phi, dphi, g, .. } => push_group(&mut rows, group, mm, 1.0, "", |j| {
                let x = log_frac(j, mm, ln_m);
                let node = frac(chi(x));
                let denom = lattice_denominator(*l, g.as_ref(), phi.as_ref(), dphi.as_ref(), node);
                (node, g(x) / (j as f64 * denom), Some(denom))
            }),
            NodeScheme::ContinuedFraction { l, g, .. } => push_group(&mut rows, group, mm, 1.0, "", |j| {
                let x = log_frac(j, mm, ln_m);
                let node = reciprocal_frac(*l as f64, x);
                let denom = cf_denominator(*l, g.as_ref(), node, 1e-12);
                (node, g(x) / (j as f64 * denom), Some(denom))
            }),
            NodeScheme::RationalBase { m, n } => {
                let ln_base = (*m as f64 / *n as f64).ln();
                let sample = |j: u64| (frac((j as f64).ln() / ln_base), 1.0 / j as f64, None);
                push_group(&mut rows, group, *m as u64, 1.0, "M", sample);
                push_group(&mut rows, group, *n as u64, -1.0, "N", sample);
            }
            NodeScheme::DerivativeForm { m, n, l } => {
                let ln_base = (*m as f64 / *n as f64).ln();
                let power = (*l - 1) as i32;
                for (i, (a, c)) in derivative_coefficients(*m, *n, *l).into_iter().enumerate() {
                    let sample = |j: u64| {
                        let w = a * j as f64;
                        let node = if *n == 1 {
                            log_frac_real(w, *m as u64, ln_base)
                        } else {
                            frac(w.ln() / ln_base)
                        };
                        (node, c * (-w.ln()).powi(power) / w, None)
                    };
                    push_group(&mut rows, group, *m as u64, 1.0, &format!("M{i}"), sample);
                    if *n > 1 {
                        push_group(&mut rows, group, *n as u64, -1.0, &format!("N{i}"), sample);
                    }
                }
            }
        }
    }
    rows.truncate(count);
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plain_first_rows() {
        let rows = node_stream(&NodeScheme::Plain { m: 2 }, 4).unwrap();
        let nodes: Vec<f64> = rows.iter().map(|r| r.node).collect();
        assert_eq!(nodes[0], 0.0);
        assert_eq!(nodes[1], 0.0);
        assert!((nodes[2] - 0.584_962_500_721_156_2).abs() < 1e-15);
        assert_eq!(nodes[3], 0.0);
        assert_eq!(rows[0].weight, 1.0);
        assert_eq!(rows[1].weight, -0.5);
        assert!((rows[2].weight - 1.0 / 3.0).abs() < 1e-17);
        assert_eq!(rows[2].group, 2);
    }

    #[test]
    fn rational_families_alternate_sign() {
        let rows = node_stream(&NodeScheme::RationalBase { m: 3, n: 2 }, 10).unwrap();
        assert!(rows.iter().filter(|r| r.family == "M" && r.k > 0).all(|r| r.weight > 0.0));
        assert!(rows.iter().filter(|r| r.family == "N" && r.k > 0).all(|r| r.weight < 0.0));
        assert_eq!(&rows[3].family, "N");
    }
}
