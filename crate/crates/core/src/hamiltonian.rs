//! Assembly of mean-field Hamiltonians with site fields, tilts and penalties.

use serde::{Deserialize, Serialize};

use crate::coherent::{coherent_matrix_on, CoherentSymbol, DEFAULT_EXTRA_DEGREE, MAX_COHERENT_PRODUCT_SITES};
use crate::disorder::{sample_tilt, FieldRealization};
use crate::error::{Error, Result};
use crate::linalg::{norm3, CMat, HermitianOperator, SparseOperator, Vec3, C64, I};
use crate::spin_algebra::{
    build_total_spin, weyl_matrix, ClassicalSymbol, PolynomialSymbol, SpinOperatorSet, MAX_PRODUCT_SITES,
};

/// `N sum_xi alpha_xi (M_xi - m_xi)^2`
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Penalty {
    pub weights: Vec3,
    pub center: Vec3,
}

/// Gaussian vector `gamma` entering as `sqrt(N) <gamma, M>`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianTilt {
    pub gamma: Vec3,
    pub seed: Option<u64>,
    pub index: Option<u64>,
}

impl GaussianTilt {
    pub fn new(gamma: Vec3) -> Self {
        GaussianTilt {
            gamma,
            seed: None,
            index: None,
        }
    }

    /// Sample `index` of the tilt stream of `seed`.
    pub fn sample(seed: u64, index: u64) -> Self {
        GaussianTilt {
            gamma: sample_tilt(seed, index),
            seed: Some(seed),
            index: Some(index),
        }
    }
}

/// Quantization of the mean-field part.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeanField {
    /// `N Sym P((2/N) S)`
    Weyl(PolynomialSymbol),
    /// Upper-symbol quantization of a continuous symbol in every total-spin sector.
    Coherent(CoherentSymbol),
}

impl MeanField {
    /// Bound on `sup_{|m| <= 1} |V(m)|`.
    pub fn sup_bound(&self) -> f64 {
        match self {
            MeanField::Weyl(p) => p.abs_coeff_sum(),
            MeanField::Coherent(f) => f.sup_bound(),
        }
    }

    pub fn as_symbol(&self) -> &dyn ClassicalSymbol {
        match self {
            MeanField::Weyl(p) => p,
            MeanField::Coherent(f) => f,
        }
    }
}

/// Description of a Hamiltonian, independent of the space it is realized on.
///
/// `H = N Sym P(M) + 2 sum_n <b(n), S(n)> + sqrt(N) <gamma, M> + penalty + 2 <h, S>`
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub mean_field: MeanField,
    pub fields: FieldRealization,
    pub tilt: Option<Vec3>,
    pub penalty: Option<Penalty>,
    /// Uniform extra field `h` entering as `2 <h, S>`.
    pub linear_field: Option<Vec3>,
}

impl ModelSpec {
    pub fn new(symbol: PolynomialSymbol, fields: FieldRealization) -> Self {
        ModelSpec::with_mean_field(MeanField::Weyl(symbol), fields)
    }

    pub fn with_mean_field(mean_field: MeanField, fields: FieldRealization) -> Self {
        ModelSpec {
            mean_field,
            fields,
            tilt: None,
            penalty: None,
            linear_field: None,
        }
    }

    pub fn n_sites(&self) -> usize {
        self.fields.n_sites
    }

    pub fn with_tilt(mut self, gamma: Vec3) -> Self {
        self.tilt = Some(gamma);
        self
    }

    pub fn with_penalty(mut self, penalty: Penalty) -> Self {
        self.penalty = Some(penalty);
        self
    }

    pub fn with_linear_field(mut self, h: Vec3) -> Self {
        self.linear_field = Some(h);
        self
    }

    /// Linearization at `m` with weights `alpha`: constant `N <alpha, m.m>` plus field `-2 alpha.m`.
    pub fn linearized(alpha: Vec3, m: Vec3, fields: FieldRealization) -> Self {
        let c: f64 = (0..3).map(|i| alpha[i] * m[i] * m[i]).sum();
        let h = [0, 1, 2].map(|i| -2.0 * alpha[i] * m[i]);
        ModelSpec::new(PolynomialSymbol::new([(c, [0, 0, 0])]).expect("finite"), fields)
            .with_linear_field(h)
    }

    /// Builds the matrix on a space with total spin `spins` and field operator
    /// `field_term = 2 sum_n <b(n), S(n)>` already expressed there.
    pub fn matrix_on(&self, spins: &SpinOperatorSet, field_term: &SparseOperator) -> Result<CMat> {
        let n = self.n_sites();
        let nf = n as f64;
        let mut h = match &self.mean_field {
            MeanField::Weyl(p) => weyl_matrix(p, spins, n)?,
            MeanField::Coherent(f) => {
                if spins.dim() > 1 << MAX_COHERENT_PRODUCT_SITES {
                    return Err(Error::SizeLimit {
                        what: "dimension for coherent assembly",
                        value: spins.dim(),
                        limit: 1 << MAX_COHERENT_PRODUCT_SITES,
                    });
                }
                coherent_matrix_on(f, spins, n, f.degree().map_or(DEFAULT_EXTRA_DEGREE, |d| d as usize))?
            }
        };
        let mut linear = field_term.clone();
        let mut lin_w = [0.0; 3];
        if let Some(g) = self.tilt {
            for i in 0..3 {
                lin_w[i] += 2.0 * g[i] / nf.sqrt();
            }
        }
        if let Some(hf) = self.linear_field {
            for i in 0..3 {
                lin_w[i] += 2.0 * hf[i];
            }
        }
        if let Some(pen) = self.penalty {
            for (i, w) in lin_w.iter_mut().enumerate() {
                *w -= 4.0 * pen.weights[i] * pen.center[i];
            }
        }
        linear = linear.plus(&spins.linear_form(lin_w));
        h += linear.to_dense();
        if let Some(pen) = self.penalty {
            let dim = spins.dim();
            let mut constant = 0.0;
            for i in 0..3 {
                let a = pen.weights[i];
                if a == 0.0 {
                    continue;
                }
                let s = &spins.components()[i];
                let sq = s.mul_dense(&s.to_dense());
                h += sq * C64::new(4.0 * a / nf, 0.0);
                constant += nf * a * pen.center[i] * pen.center[i];
            }
            h += CMat::identity(dim, dim) * C64::new(constant, 0.0);
        }
        Ok(h)
    }

    /// Dense operator on `(C^2)^{⊗N}`.
    pub fn dense(&self) -> Result<AssembledHamiltonian> {
        let n = self.n_sites();
        let spins = build_total_spin(n)?;
        let field = field_term_sparse(&self.fields)?;
        let m = self.matrix_on(&spins, &field)?;
        Ok(AssembledHamiltonian {
            operator: HermitianOperator::hermitize(m),
            n_sites: n,
            parts: self.clone(),
        })
    }
}

/// A realized operator together with the recipe that produced it.
#[derive(Clone, Debug)]
pub struct AssembledHamiltonian {
    pub operator: HermitianOperator,
    pub n_sites: usize,
    pub parts: ModelSpec,
}

impl AssembledHamiltonian {
    pub fn matrix(&self) -> &CMat {
        self.operator.matrix()
    }

    /// `N sum |coeff| + sum_n |b(n)|`, the a priori norm bound.
    pub fn norm_bound(&self) -> f64 {
        let spec = &self.parts;
        let nf = self.n_sites as f64;
        let mut bound = nf * spec.mean_field.sup_bound() + spec.fields.abs_sum();
        if let Some(g) = spec.tilt {
            bound += nf.sqrt() * norm3(g);
        }
        if let Some(h) = spec.linear_field {
            bound += nf * norm3(h);
        }
        if let Some(p) = spec.penalty {
            bound += nf * (0..3)
                .map(|i| p.weights[i].abs() * (1.0 + p.center[i].abs()).powi(2))
                .sum::<f64>();
        }
        bound
    }
}

fn check_sites(n: usize) -> Result<()> {
    if n > MAX_PRODUCT_SITES {
        return Err(Error::SizeLimit {
            what: "N",
            value: n,
            limit: MAX_PRODUCT_SITES,
        });
    }
    Ok(())
}

fn field_term_sparse(r: &FieldRealization) -> Result<SparseOperator> {
    let n = r.n_sites;
    check_sites(n)?;
    let dim = 1usize << n;
    let mut op = SparseOperator::zeros(dim);
    for x in 0..dim {
        let mut diag = 0.0;
        for (site, b) in r.fields.iter().enumerate() {
            let bit = 1usize << (n - 1 - site);
            let up = x & bit == 0;
            diag += if up { b[2] } else { -b[2] };
            let off = if up {
                C64::new(b[0], 0.0) + I * b[1]
            } else {
                C64::new(b[0], 0.0) - I * b[1]
            };
            op.add_entry(x ^ bit, x, off);
        }
        op.add_entry(x, x, C64::new(diag, 0.0));
    }
    Ok(op)
}

/// `2 sum_n <b(n), S(n)>`
pub fn assemble_field_term(r: &FieldRealization) -> Result<HermitianOperator> {
    Ok(HermitianOperator::hermitize(field_term_sparse(r)?.to_dense()))
}

/// `2 <b(n), S(n)>` for one site (1-based).
pub fn field_site_term(r: &FieldRealization, site: usize) -> Result<HermitianOperator> {
    if site == 0 || site > r.n_sites {
        return Err(Error::invalid(format!("site {site} outside 1..={}", r.n_sites)));
    }
    let mut only = vec![[0.0; 3]; r.n_sites];
    only[site - 1] = r.fields[site - 1];
    assemble_field_term(&FieldRealization::from_fields(only)?)
}

/// `H_{P,b} = N Sym P(M) + 2 sum_n <b(n), S(n)>`
pub fn assemble_full(p: &PolynomialSymbol, r: &FieldRealization) -> Result<AssembledHamiltonian> {
    ModelSpec::new(p.clone(), r.clone()).dense()
}

/// Adds `sqrt(N) <gamma, M> = (2/sqrt N) <gamma, S>`.
pub fn assemble_perturbed(h: &AssembledHamiltonian, tilt: &GaussianTilt) -> Result<AssembledHamiltonian> {
    let n = h.n_sites;
    let spins = build_total_spin(n)?;
    let w = tilt.gamma.map(|g| 2.0 * g / (n as f64).sqrt());
    let extra = spins.linear_form(w).to_dense();
    let mut parts = h.parts.clone();
    let prior = parts.tilt.unwrap_or([0.0; 3]);
    parts.tilt = Some([0, 1, 2].map(|i| prior[i] + tilt.gamma[i]));
    Ok(AssembledHamiltonian {
        operator: HermitianOperator::hermitize(h.matrix() + extra),
        n_sites: n,
        parts,
    })
}

/// `N <alpha, m.m> - 4 sum_xi alpha_xi m_xi S_xi + H_b` for `alpha >= 0`.
pub fn assemble_linearized(alpha: Vec3, m: Vec3, r: &FieldRealization) -> Result<AssembledHamiltonian> {
    if alpha.iter().any(|a| a.is_nan() || *a < 0.0) {
        return Err(Error::invalid("penalty weights must be non-negative"));
    }
    ModelSpec::linearized(alpha, m, r.clone()).dense()
}

/// `Q_m = N sum_xi (M_xi - m_xi)^2`
pub fn assemble_quadratic_penalty(m: Vec3, n_sites: usize) -> Result<HermitianOperator> {
    if n_sites == 0 {
        return Err(Error::invalid("N must be positive"));
    }
    let spec = ModelSpec::new(
        PolynomialSymbol::zero(),
        FieldRealization::uniform(n_sites, [0.0; 3])?,
    )
    .with_penalty(Penalty {
        weights: [1.0; 3],
        center: m,
    });
    Ok(spec.dense()?.operator)
}
