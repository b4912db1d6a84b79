use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::linalg::{CMat, HermitianOperator, C64};

use super::operators::{build_total_spin, SpinOperatorSet};
use super::symbol::{multinomial, PolynomialSymbol, MAX_DEGREE};

/// `N * Sym P((2/N) S)` on the space carrying `spins`.
///
/// Each monomial `x^a y^b z^c` becomes the average over the distinct orderings
/// of the word with `a` copies of `M_x`, `b` of `M_y`, `c` of `M_z`. The sum
/// over distinct words obeys `W(a,b,c) = X W(a-1,b,c) + Y W(a,b-1,c) + Z W(a,b,c-1)`,
/// evaluated one total degree at a time.
pub fn weyl_matrix(p: &PolynomialSymbol, spins: &SpinOperatorSet, n_sites: usize) -> Result<CMat> {
    if p.degree() > MAX_DEGREE {
        return Err(Error::invalid(format!(
            "degree {} exceeds {MAX_DEGREE}",
            p.degree()
        )));
    }
    if n_sites == 0 {
        return Err(Error::invalid("N must be positive"));
    }
    let dim = spins.dim();
    let scale = 2.0 / n_sites as f64;
    let mut out = CMat::zeros(dim, dim);
    for t in p.monomials() {
        let words = distinct_word_sum(spins, t.powers);
        let d = t.degree();
        let factor = n_sites as f64 * t.coeff * scale.powi(d as i32) / multinomial(d, t.powers);
        out += words * C64::new(factor, 0.0);
    }
    Ok(out)
}

fn distinct_word_sum(spins: &SpinOperatorSet, target: [u32; 3]) -> CMat {
    let dim = spins.dim();
    let mut layer: HashMap<[u32; 3], CMat> = HashMap::new();
    layer.insert([0, 0, 0], CMat::identity(dim, dim));
    let total: u32 = target.iter().sum();
    for k in 1..=total {
        let mut next = HashMap::new();
        for a in 0..=target[0].min(k) {
            for b in 0..=target[1].min(k - a) {
                let c = k - a - b;
                if c > target[2] {
                    continue;
                }
                let key = [a, b, c];
                let mut acc: Option<CMat> = None;
                for axis in 0..3 {
                    if key[axis] == 0 {
                        continue;
                    }
                    let mut prev = key;
                    prev[axis] -= 1;
                    let term = spins.components()[axis].mul_dense(&layer[&prev]);
                    acc = Some(match acc {
                        Some(x) => x + term,
                        None => term,
                    });
                }
                next.insert(key, acc.expect("k >= 1"));
            }
        }
        layer = next;
    }
    layer.remove(&target).expect("target reached")
}

/// Weyl-ordered quantization of `P` on `N` qubits.
pub fn weyl_ordered_operator(p: &PolynomialSymbol, n_sites: usize) -> Result<HermitianOperator> {
    let spins = build_total_spin(n_sites)?;
    Ok(HermitianOperator::hermitize(weyl_matrix(p, &spins, n_sites)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs;
    use crate::spin_algebra::operators::Axis;

    #[test]
    fn mixed_monomial_is_symmetrized_product() {
        let n = 3;
        let p: PolynomialSymbol = "1*x^1*y^1".parse().unwrap();
        let h = weyl_ordered_operator(&p, n).unwrap();
        let s = build_total_spin(n).unwrap();
        let (x, y) = (s.component(Axis::X).to_dense(), s.component(Axis::Y).to_dense());
        let expected = (&x * &y + &y * &x) * C64::new(2.0 / (n * n) as f64 * n as f64, 0.0);
        assert!(max_abs(&(h.matrix() - expected)) < 1e-13);
    }

    #[test]
    fn brute_force_word_average() {
        // x^2 z: words xxz, xzx, zxx
        let n = 2;
        let p: PolynomialSymbol = "1*x^2*z^1".parse().unwrap();
        let h = weyl_ordered_operator(&p, n).unwrap();
        let s = build_total_spin(n).unwrap();
        let m = |a: Axis| s.component(a).to_dense() * C64::new(2.0 / n as f64, 0.0);
        let (x, z) = (m(Axis::X), m(Axis::Z));
        let avg = (&x * &x * &z + &x * &z * &x + &z * &x * &x) * C64::new(n as f64 / 3.0, 0.0);
        assert!(max_abs(&(h.matrix() - avg)) < 1e-13);
    }

    #[test]
    fn mz_squared_at_two_sites() {
        let p: PolynomialSymbol = "1*z^2".parse().unwrap();
        let h = weyl_ordered_operator(&p, 2).unwrap();
        let ev = h.eigenvalues();
        let expected = [0.0, 0.0, 2.0, 2.0];
        for (a, b) in ev.iter().zip(expected) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn rejects_degree_above_limit() {
        let p = PolynomialSymbol::monomial(1.0, [7, 0, 0]);
        assert!(weyl_ordered_operator(&p, 2).is_err());
    }
}
