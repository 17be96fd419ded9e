//! Composite Gauss–Legendre rules.

use crate::error::{Error, Result};

/// Nodes and weights of a quadrature rule on a finite interval.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }

    /// Largest gap between neighbouring nodes.
    pub fn max_spacing(&self) -> f64 {
        let mut sorted = self.nodes.clone();
        sorted.sort_by(f64::total_cmp);
        sorted.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
    }
}

/// `n`-point Gauss–Legendre rule on `[-1, 1]`, nodes in increasing order.
pub fn gauss_legendre(n: usize) -> Result<QuadratureRule> {
    if n == 0 {
        return Err(Error::Config("Gauss–Legendre rule needs at least one node".into()));
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess, then Newton on P_n.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Ok(QuadratureRule { nodes, weights })
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let n = n as f64;
    (p1, n * (x * p1 - p0) / (x * x - 1.0))
}

/// `panels` equal panels on `[a, b]`, each with an `order`-point rule.
pub fn composite_gauss_legendre(a: f64, b: f64, panels: usize, order: usize) -> Result<QuadratureRule> {
    if panels == 0 || !(b > a) {
        return Err(Error::Config(format!("invalid composite rule: {panels} panels on [{a}, {b}]")));
    }
    let base = gauss_legendre(order)?;
    let width = (b - a) / panels as f64;
    let half = 0.5 * width;
    let mut nodes = Vec::with_capacity(panels * order);
    let mut weights = Vec::with_capacity(panels * order);
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * width;
        for (&x, &w) in base.nodes.iter().zip(&base.weights) {
            nodes.push(mid + half * x);
            weights.push(half * w);
        }
    }
    Ok(QuadratureRule { nodes, weights })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_for_polynomials() {
        for n in 1..=20 {
            let rule = gauss_legendre(n).unwrap();
            for deg in 0..(2 * n) {
                let got = rule.integrate(|x| x.powi(deg as i32));
                let want = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                assert!((got - want).abs() < 1e-13, "n={n} deg={deg}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn symmetric_nodes() {
        let rule = composite_gauss_legendre(-3.0, 3.0, 7, 5).unwrap();
        let n = rule.len();
        for i in 0..n {
            assert!((rule.nodes[i] + rule.nodes[n - 1 - i]).abs() < 1e-14);
            assert!((rule.weights[i] - rule.weights[n - 1 - i]).abs() < 1e-15);
        }
    }

    #[test]
    fn composite_gaussian() {
        let rule = composite_gauss_legendre(-8.0, 8.0, 64, 16).unwrap();
        let got = rule.integrate(|x| (-x * x).exp());
        assert!((got - std::f64::consts::PI.sqrt()).abs() < 1e-14);
    }
}
