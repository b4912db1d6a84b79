use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CMat, HermitianOperator, SparseOperator, C64, I, ONE};

/// Largest product space materialized densely.
pub const MAX_PRODUCT_SITES: usize = 12;

/// Spin quantum number stored doubled, so `TwoJ(1)` is spin one half.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TwoJ(pub u32);

impl TwoJ {
    pub fn spin(self) -> f64 {
        f64::from(self.0) / 2.0
    }

    pub fn dim(self) -> usize {
        self.0 as usize + 1
    }

    pub fn from_spin(j: f64) -> Result<Self> {
        let twice = 2.0 * j;
        if j.is_nan() || j < 0.0 || (twice - twice.round()).abs() > 1e-12 || twice > f64::from(u32::MAX) {
            return Err(Error::invalid(format!("{j} is not a half-integer spin")));
        }
        Ok(TwoJ(twice.round() as u32))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn unit(self) -> [f64; 3] {
        let mut e = [0.0; 3];
        e[self.index()] = 1.0;
        e
    }
}

/// Hilbert space carrying the generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SpinContext {
    /// `(C^2)^{⊗N}`; site `n` (1-based) is bit `N - n`, bit value 0 is spin up.
    Product { sites: usize },
    Irrep { two_j: TwoJ },
    /// Tensor product of irreps, one per group of sites.
    Collective { two_js: Vec<TwoJ> },
}

/// Three spin generators on a common space.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinOperatorSet {
    context: SpinContext,
    components: [SparseOperator; 3],
}

impl SpinOperatorSet {
    pub(crate) fn from_parts(context: SpinContext, components: [SparseOperator; 3]) -> Self {
        SpinOperatorSet {
            context,
            components,
        }
    }

    pub fn context(&self) -> &SpinContext {
        &self.context
    }

    pub fn dim(&self) -> usize {
        self.components[0].dim()
    }

    pub fn component(&self, axis: Axis) -> &SparseOperator {
        &self.components[axis.index()]
    }

    pub fn components(&self) -> &[SparseOperator; 3] {
        &self.components
    }

    pub fn dense(&self, axis: Axis) -> HermitianOperator {
        HermitianOperator::hermitize(self.component(axis).to_dense())
    }

    /// `sum_xi w_xi S_xi` as a sparse matrix.
    pub fn linear_form(&self, w: [f64; 3]) -> SparseOperator {
        let mut out = SparseOperator::zeros(self.dim());
        for a in Axis::ALL {
            if w[a.index()] != 0.0 {
                out = out.plus(&self.component(a).scaled(C64::new(w[a.index()], 0.0)));
            }
        }
        out
    }

    /// `S_x^2 + S_y^2 + S_z^2`
    pub fn casimir(&self) -> CMat {
        Axis::ALL
            .iter()
            .map(|&a| {
                let d = self.component(a).to_dense();
                &d * &d
            })
            .fold(CMat::zeros(self.dim(), self.dim()), |acc, x| acc + x)
    }

    /// Componentwise sum of two sets on the same space.
    pub(crate) fn plus(&self, other: &SpinOperatorSet, context: SpinContext) -> SpinOperatorSet {
        SpinOperatorSet {
            context,
            components: [
                self.components[0].plus(&other.components[0]),
                self.components[1].plus(&other.components[1]),
                self.components[2].plus(&other.components[2]),
            ],
        }
    }
}

fn check_sites(n_sites: usize) -> Result<()> {
    if n_sites == 0 {
        return Err(Error::invalid("N must be positive"));
    }
    if n_sites > MAX_PRODUCT_SITES {
        return Err(Error::SizeLimit {
            what: "N",
            value: n_sites,
            limit: MAX_PRODUCT_SITES,
        });
    }
    Ok(())
}

/// Spin-1/2 generators of site `site` (1-based) on `N` qubits.
pub fn build_site_spin(n_sites: usize, site: usize) -> Result<SpinOperatorSet> {
    check_sites(n_sites)?;
    if site == 0 || site > n_sites {
        return Err(Error::invalid(format!("site {site} outside 1..={n_sites}")));
    }
    let dim = 1usize << n_sites;
    let bit = 1usize << (n_sites - site);
    let mut sx = SparseOperator::zeros(dim);
    let mut sy = SparseOperator::zeros(dim);
    let mut sz = SparseOperator::zeros(dim);
    for x in 0..dim {
        let flipped = x ^ bit;
        let up = x & bit == 0;
        sx.add_entry(flipped, x, C64::new(0.5, 0.0));
        sy.add_entry(flipped, x, if up { I * 0.5 } else { -I * 0.5 });
        sz.add_entry(x, x, C64::new(if up { 0.5 } else { -0.5 }, 0.0));
    }
    Ok(SpinOperatorSet::from_parts(
        SpinContext::Product { sites: n_sites },
        [sx, sy, sz],
    ))
}

/// Total spin `S = sum_n S(n)` on `N` qubits. The magnetization is `(2/N) S`.
pub fn build_total_spin(n_sites: usize) -> Result<SpinOperatorSet> {
    check_sites(n_sites)?;
    let dim = 1usize << n_sites;
    let mut sx = SparseOperator::zeros(dim);
    let mut sy = SparseOperator::zeros(dim);
    let mut sz = SparseOperator::zeros(dim);
    for x in 0..dim {
        let mut z = 0.0;
        for q in 0..n_sites {
            let bit = 1usize << q;
            let up = x & bit == 0;
            sx.add_entry(x ^ bit, x, C64::new(0.5, 0.0));
            sy.add_entry(x ^ bit, x, if up { I * 0.5 } else { -I * 0.5 });
            z += if up { 0.5 } else { -0.5 };
        }
        sz.add_entry(x, x, C64::new(z, 0.0));
    }
    Ok(SpinOperatorSet::from_parts(
        SpinContext::Product { sites: n_sites },
        [sx, sy, sz],
    ))
}

/// Standard irrep of spin `J` in the basis `m = J, J-1, ..., -J`.
pub fn spin_irrep(two_j: TwoJ) -> SpinOperatorSet {
    let dim = two_j.dim();
    let j = two_j.spin();
    let mut sx = SparseOperator::zeros(dim);
    let mut sy = SparseOperator::zeros(dim);
    let mut sz = SparseOperator::zeros(dim);
    for k in 0..dim {
        let m = j - k as f64;
        sz.add_entry(k, k, C64::new(m, 0.0));
        if k + 1 < dim {
            // <m | S+ | m-1>
            let lowered = m - 1.0;
            let amp = (j * (j + 1.0) - lowered * (lowered + 1.0)).sqrt();
            sx.add_entry(k, k + 1, ONE * (amp / 2.0));
            sx.add_entry(k + 1, k, ONE * (amp / 2.0));
            sy.add_entry(k, k + 1, -I * (amp / 2.0));
            sy.add_entry(k + 1, k, I * (amp / 2.0));
        }
    }
    SpinOperatorSet::from_parts(SpinContext::Irrep { two_j }, [sx, sy, sz])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{commutator, max_abs};

    fn check_algebra(s: &SpinOperatorSet) {
        let [x, y, z] = [Axis::X, Axis::Y, Axis::Z].map(|a| s.component(a).to_dense());
        for (a, b, c) in [(&x, &y, &z), (&y, &z, &x), (&z, &x, &y)] {
            let defect = commutator(a, b) - c * I;
            assert!(max_abs(&defect) < 1e-12);
        }
        let cas = s.casimir();
        for a in [&x, &y, &z] {
            assert!(max_abs(&commutator(&cas, a)) < 1e-11);
        }
    }

    #[test]
    fn site_and_total_satisfy_su2() {
        for n in 1..=4 {
            check_algebra(&build_total_spin(n).unwrap());
            for site in 1..=n {
                check_algebra(&build_site_spin(n, site).unwrap());
            }
        }
    }

    #[test]
    fn irreps_satisfy_su2_and_casimir() {
        for tj in 0..=7 {
            let s = spin_irrep(TwoJ(tj));
            check_algebra(&s);
            let j = TwoJ(tj).spin();
            let cas = s.casimir();
            let target = CMat::identity(s.dim(), s.dim()) * C64::new(j * (j + 1.0), 0.0);
            assert!(max_abs(&(cas - target)) < 1e-11);
        }
    }

    #[test]
    fn site_one_is_most_significant() {
        let s = build_site_spin(3, 1).unwrap().dense(Axis::Z);
        // index 0b100 has site 1 down
        assert_eq!(s.matrix()[(4, 4)].re, -0.5);
        assert_eq!(s.matrix()[(3, 3)].re, 0.5);
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(matches!(build_total_spin(13), Err(Error::SizeLimit { .. })));
        assert!(build_site_spin(3, 4).is_err());
        assert!(build_site_spin(3, 0).is_err());
        assert!(TwoJ::from_spin(0.3).is_err());
        assert_eq!(TwoJ::from_spin(1.5).unwrap(), TwoJ(3));
    }
}
