use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, hermitian_eigenvalues, spectral_norm, CMat, CVec, HermitianOperator, C64};
use crate::spin_algebra::{
    admissible_spins, build_total_spin, spin_irrep, weyl_matrix, Axis, ClassicalSymbol,
    PolynomialSymbol, SpinOperatorSet, TwoJ,
};

use super::sphere::SphereQuadrature;
use super::states::{frame_sum, lower_symbol, resolution_check};

/// Deviation from the identity accepted by the constant-function self-test.
pub const RESOLUTION_TOLERANCE: f64 = 1e-10;

/// Polynomial degree the quadrature resolves beyond what the frame itself needs.
pub const DEFAULT_EXTRA_DEGREE: usize = 16;

/// Smallest `(n, 2n)` rule passing the resolution self-test for `2J`, widened by `extra_degree`.
pub fn quadrature_for_spin(two_j: TwoJ, extra_degree: usize) -> Result<SphereQuadrature> {
    let mut degree = 2 * two_j.0 as usize;
    loop {
        let q = SphereQuadrature::with_exactness(degree);
        if resolution_check(two_j, &q)? <= RESOLUTION_TOLERANCE {
            return Ok(SphereQuadrature::with_exactness(degree + extra_degree));
        }
        degree += 2;
        if degree > 8 * two_j.0 as usize + 64 {
            return Err(Error::QuadratureInadequate(format!("no rule resolves 2J = {}", two_j.0)));
        }
    }
}

/// `((2J+1)/4 pi) int N f((2J/N) e(Omega)) |Omega,J><Omega,J| dOmega`
pub fn upper_symbol_operator(
    f: &dyn ClassicalSymbol,
    two_j: TwoJ,
    n_sites: usize,
    q: &SphereQuadrature,
) -> Result<HermitianOperator> {
    if n_sites == 0 {
        return Err(Error::invalid("N must be positive"));
    }
    let dev = resolution_check(two_j, q)?;
    if dev > RESOLUTION_TOLERANCE {
        return Err(Error::QuadratureInadequate(format!(
            "constant symbol reproduces the identity only to {dev:e}"
        )));
    }
    let nf = n_sites as f64;
    let r = f64::from(two_j.0) / nf;
    let m = frame_sum(two_j, q, |node| nf * f.value(node.direction().map(|x| r * x)));
    Ok(HermitianOperator::hermitize(m))
}

/// Both sides of the Berezin-Lieb sandwich and the trace between them.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BerezinLieb {
    pub lower: f64,
    pub exact: f64,
    pub upper: f64,
}

impl BerezinLieb {
    pub fn holds(&self, rel: f64) -> bool {
        self.lower <= self.exact * (1.0 + rel) && self.exact <= self.upper * (1.0 + rel)
    }
}

/// Builds `G` from its upper symbol `g` on the unit sphere and evaluates
/// `int e^{<Omega|G|Omega>} <= Tr e^G <= int e^g`, each integral with `(2J+1)/4 pi`.
pub fn berezin_lieb_bounds(
    g: &dyn Fn([f64; 3]) -> f64,
    two_j: TwoJ,
    q: &SphereQuadrature,
) -> Result<BerezinLieb> {
    let dev = resolution_check(two_j, q)?;
    if dev > RESOLUTION_TOLERANCE {
        return Err(Error::QuadratureInadequate(format!("frame deviation {dev:e}")));
    }
    let op = frame_sum(two_j, q, |node| g(node.direction()));
    let scale = two_j.dim() as f64 / (4.0 * std::f64::consts::PI);
    let lower = scale
        * q.nodes()
            .iter()
            .map(|n| Ok(n.weight * lower_symbol(&op, two_j, n.theta, n.phi)?.exp()))
            .sum::<Result<f64>>()?;
    let upper = scale * q.integrate(|n| g(n.direction()).exp());
    let exact = hermitian_eigenvalues(&op).iter().map(|e| e.exp()).sum();
    let out = BerezinLieb { lower, exact, upper };
    if !out.holds(1e-8) {
        return Err(Error::ContractViolation(format!("Berezin-Lieb sandwich violated: {out:?}")));
    }
    Ok(out)
}

/// Per-sector gap between Weyl and coherent quantization, without the factor `N`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DuffieldError {
    pub n_sites: usize,
    pub sectors: Vec<(u32, f64)>,
    pub max: f64,
}

/// `sup_J || Sym P((2/N) S)|_J - ((2J+1)/4 pi) int P((2J/N) e) |Omega><Omega| ||`
pub fn duffield_error(p: &PolynomialSymbol, n_sites: usize) -> Result<DuffieldError> {
    if n_sites == 0 {
        return Err(Error::invalid("N must be positive"));
    }
    let nf = n_sites as f64;
    let sectors = admissible_spins(n_sites)
        .into_iter()
        .map(|tj| {
            let spins = spin_irrep(tj);
            let weyl = weyl_matrix(p, &spins, n_sites)?;
            let q = quadrature_for_spin(tj, p.degree() as usize)?;
            let upper = upper_symbol_operator(p, tj, n_sites, &q)?;
            Ok((tj.0, spectral_norm(&(weyl - upper.matrix())) / nf))
        })
        .collect::<Result<Vec<_>>>()?;
    let max = sectors.iter().map(|s| s.1).fold(0.0, f64::max);
    Ok(DuffieldError { n_sites, sectors, max })
}

/// Columns `|J, M, alpha>` (`M = J..-J`) of every spin-`J` copy inside a space
/// whose `S_z` is diagonal, built from highest-weight vectors by lowering.
pub fn sector_isometries(spins: &SpinOperatorSet) -> Result<Vec<(TwoJ, CMat)>> {
    let d = spins.dim();
    let mut diag = vec![0.0; d];
    for (i, j, v) in spins.component(Axis::Z).entries() {
        if i != j {
            if v.norm() > 1e-12 {
                return Err(Error::invalid("S_z must be diagonal in the supplied basis"));
            }
        } else {
            diag[i] += v.re;
        }
    }
    let mut levels: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
    for (i, z) in diag.iter().enumerate() {
        levels.entry((2.0 * z).round() as i64).or_default().push(i);
    }
    let i_unit = C64::new(0.0, 1.0);
    let sx = spins.component(Axis::X);
    let sy = spins.component(Axis::Y);
    let raise = sx.plus(&sy.scaled(i_unit));
    let lower = sx.plus(&sy.scaled(-i_unit));

    let mut out = Vec::new();
    let mut found = 0;
    for (&two_m, idx) in levels.iter().rev() {
        if two_m < 0 {
            break;
        }
        let unit = |i: usize| {
            let mut v = CVec::zeros(d);
            v[i] = C64::new(1.0, 0.0);
            v
        };
        let highest: Vec<CVec> = match levels.get(&(two_m + 2)) {
            None => idx.iter().map(|&i| unit(i)).collect(),
            Some(rows) => {
                let row_pos: BTreeMap<usize, usize> = rows.iter().enumerate().map(|(k, &r)| (r, k)).collect();
                let col_pos: BTreeMap<usize, usize> = idx.iter().enumerate().map(|(k, &c)| (c, k)).collect();
                let mut a = CMat::zeros(rows.len(), idx.len());
                for (i, j, v) in raise.entries() {
                    if let (Some(&r), Some(&c)) = (row_pos.get(&i), col_pos.get(&j)) {
                        a[(r, c)] += v;
                    }
                }
                let (vals, vecs) = hermitian_eigen(&(a.adjoint() * &a));
                vals.iter()
                    .enumerate()
                    .filter(|(_, v)| **v < 1e-9)
                    .map(|(k, _)| {
                        let mut v = CVec::zeros(d);
                        for (c, &i) in idx.iter().enumerate() {
                            v[i] = vecs[(c, k)];
                        }
                        v
                    })
                    .collect()
            }
        };
        let tj = TwoJ(two_m as u32);
        let j = tj.spin();
        for top in highest {
            let mut cols = CMat::zeros(d, tj.dim());
            let mut v = top;
            for k in 0..tj.dim() {
                cols.set_column(k, &v);
                if k + 1 < tj.dim() {
                    let m = j - k as f64;
                    let norm = ((j + m) * (j - m + 1.0)).sqrt();
                    v = lower.apply(&v) / C64::new(norm, 0.0);
                }
            }
            found += tj.dim();
            out.push((tj, cols));
        }
    }
    if found != d {
        return Err(Error::ContractViolation(format!(
            "sector isometries cover {found} of {d} dimensions"
        )));
    }
    Ok(out)
}

/// `sum_{J, alpha} V_{J,alpha} H_J V_{J,alpha}^*` with `H_J` the upper-symbol operator of `f`.
pub fn coherent_matrix_on(
    f: &dyn ClassicalSymbol,
    spins: &SpinOperatorSet,
    n_sites: usize,
    extra_degree: usize,
) -> Result<CMat> {
    let d = spins.dim();
    let mut grouped: BTreeMap<u32, Vec<CMat>> = BTreeMap::new();
    for (tj, v) in sector_isometries(spins)? {
        grouped.entry(tj.0).or_default().push(v);
    }
    let mut h = CMat::zeros(d, d);
    for (two_j, copies) in grouped {
        let tj = TwoJ(two_j);
        let q = quadrature_for_spin(tj, extra_degree)?;
        let hj = upper_symbol_operator(f, tj, n_sites, &q)?.into_matrix();
        let k = tj.dim();
        let mut v_all = CMat::zeros(d, k * copies.len());
        let mut w_all = CMat::zeros(d, k * copies.len());
        for (c, v) in copies.iter().enumerate() {
            v_all.columns_mut(c * k, k).copy_from(v);
            w_all.columns_mut(c * k, k).copy_from(&(v * &hj));
        }
        h += w_all * v_all.adjoint();
    }
    Ok(h)
}

/// Largest `N` for which coherent quantization is assembled on the full product space.
pub const MAX_COHERENT_PRODUCT_SITES: usize = 10;

/// `H_V` on `(C^2)^{⊗N}`, block diagonal in the total-spin decomposition.
pub fn assemble_hv_blocks(f: &dyn ClassicalSymbol, n_sites: usize, extra_degree: usize) -> Result<HermitianOperator> {
    if n_sites > MAX_COHERENT_PRODUCT_SITES {
        return Err(Error::SizeLimit {
            what: "sites for product-space coherent assembly",
            value: n_sites,
            limit: MAX_COHERENT_PRODUCT_SITES,
        });
    }
    let spins = build_total_spin(n_sites)?;
    Ok(HermitianOperator::hermitize(coherent_matrix_on(f, &spins, n_sites, extra_degree)?))
}
