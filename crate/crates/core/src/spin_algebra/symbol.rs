use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{norm3, Vec3};

/// Highest total degree accepted for Weyl quantization.
pub const MAX_DEGREE: u32 = 6;

/// A real function of the magnetization vector `m`.
pub trait ClassicalSymbol: Sync {
    fn value(&self, m: Vec3) -> f64;

    /// Analytic gradient, when available.
    fn gradient(&self, _m: Vec3) -> Option<Vec3> {
        None
    }

    /// Analytic Hessian, when available.
    fn hessian(&self, _m: Vec3) -> Option<[[f64; 3]; 3]> {
        None
    }
}

impl<F: Fn(Vec3) -> f64 + Sync> ClassicalSymbol for F {
    fn value(&self, m: Vec3) -> f64 {
        self(m)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Monomial {
    pub coeff: f64,
    pub powers: [u32; 3],
}

impl Monomial {
    pub fn degree(&self) -> u32 {
        self.powers.iter().sum()
    }

    pub fn eval(&self, m: Vec3) -> f64 {
        self.coeff
            * m[0].powi(self.powers[0] as i32)
            * m[1].powi(self.powers[1] as i32)
            * m[2].powi(self.powers[2] as i32)
    }
}

/// Real polynomial in `(m_x, m_y, m_z)` with one coefficient per exponent triple.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct PolynomialSymbol {
    terms: BTreeMap<[u32; 3], f64>,
}

/// `coeff * <direction, m>^degree`
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DirectionalTerm {
    pub coeff: f64,
    pub direction: Vec3,
    pub degree: u32,
}

impl PolynomialSymbol {
    pub fn zero() -> Self {
        Self::default()
    }

    /// Merges monomials with equal exponents; exact zeros are dropped.
    pub fn new(monomials: impl IntoIterator<Item = (f64, [u32; 3])>) -> Result<Self> {
        let mut terms = BTreeMap::new();
        for (i, (c, p)) in monomials.into_iter().enumerate() {
            if !c.is_finite() {
                return Err(Error::Parse {
                    index: i,
                    message: format!("non-finite coefficient {c}"),
                });
            }
            *terms.entry(p).or_insert(0.0) += c;
        }
        terms.retain(|_, c| *c != 0.0);
        Ok(PolynomialSymbol { terms })
    }

    pub fn monomial(coeff: f64, powers: [u32; 3]) -> Self {
        Self::new([(coeff, powers)]).expect("finite coefficient")
    }

    /// `-sum_xi alpha_xi m_xi^2`
    pub fn negative_quadratic(alpha: Vec3) -> Self {
        Self::new([
            (-alpha[0], [2, 0, 0]),
            (-alpha[1], [0, 2, 0]),
            (-alpha[2], [0, 0, 2]),
        ])
        .expect("finite weights")
    }

    pub fn monomials(&self) -> impl Iterator<Item = Monomial> + '_ {
        self.terms
            .iter()
            .map(|(&powers, &coeff)| Monomial { coeff, powers })
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|p| p.iter().sum()).max().unwrap_or(0)
    }

    pub fn abs_coeff_sum(&self) -> f64 {
        self.terms.values().map(|c| c.abs()).sum()
    }

    /// Evaluates without a domain check.
    pub fn eval(&self, m: Vec3) -> f64 {
        self.monomials().map(|t| t.eval(m)).sum()
    }

    pub fn plus(&self, other: &PolynomialSymbol) -> PolynomialSymbol {
        Self::new(
            self.monomials()
                .chain(other.monomials())
                .map(|t| (t.coeff, t.powers)),
        )
        .expect("finite coefficients")
    }

    pub fn scaled(&self, s: f64) -> PolynomialSymbol {
        Self::new(self.monomials().map(|t| (s * t.coeff, t.powers))).expect("finite")
    }

    /// Writes `P` as a sum of terms `coeff <w, m>^d` with unit `w`.
    ///
    /// Pure powers `x^d`, `y^d`, `z^d` and constants map to coordinate axes.
    /// The mixed monomials of each degree `d` are matched with twice
    /// `(d+1)(d+2)/2` spiral directions, taking the minimum-norm solution.
    pub fn directional_decomposition(&self) -> Vec<DirectionalTerm> {
        let mut out = Vec::new();
        for t in self.monomials() {
            let nonzero: Vec<usize> = (0..3).filter(|&i| t.powers[i] > 0).collect();
            if nonzero.len() <= 1 {
                let mut direction = [0.0, 0.0, 1.0];
                if let Some(&i) = nonzero.first() {
                    direction = [0.0; 3];
                    direction[i] = 1.0;
                }
                out.push(DirectionalTerm {
                    coeff: t.coeff,
                    direction,
                    degree: t.degree(),
                });
            }
        }
        for d in 2..=self.degree() {
            let homogeneous: Vec<Monomial> = self
                .monomials()
                .filter(|t| t.degree() == d && t.powers.iter().filter(|&&p| p > 0).count() > 1)
                .collect();
            if homogeneous.is_empty() {
                continue;
            }
            let keys = exponent_triples(d);
            let dirs = spiral_directions(2 * keys.len());
            let a = DMatrix::from_fn(keys.len(), dirs.len(), |r, k| {
                let p = keys[r];
                multinomial(d, p)
                    * dirs[k][0].powi(p[0] as i32)
                    * dirs[k][1].powi(p[1] as i32)
                    * dirs[k][2].powi(p[2] as i32)
            });
            let rhs = DVector::from_iterator(
                keys.len(),
                keys.iter().map(|p| {
                    homogeneous
                        .iter()
                        .find(|t| t.powers == *p)
                        .map_or(0.0, |t| t.coeff)
                }),
            );
            let pinv = a.pseudo_inverse(1e-13).expect("svd of a small matrix");
            let alpha = pinv * rhs;
            for (k, dir) in dirs.into_iter().enumerate() {
                if alpha[k] != 0.0 {
                    out.push(DirectionalTerm {
                        coeff: alpha[k],
                        direction: dir,
                        degree: d,
                    });
                }
            }
        }
        out
    }
}

impl ClassicalSymbol for PolynomialSymbol {
    fn value(&self, m: Vec3) -> f64 {
        self.eval(m)
    }

    fn gradient(&self, m: Vec3) -> Option<Vec3> {
        let mut g = [0.0; 3];
        for t in self.monomials() {
            for (i, gi) in g.iter_mut().enumerate() {
                *gi += derivative(&t, &[i]).eval(m);
            }
        }
        Some(g)
    }

    fn hessian(&self, m: Vec3) -> Option<[[f64; 3]; 3]> {
        let mut h = [[0.0; 3]; 3];
        for t in self.monomials() {
            for (i, row) in h.iter_mut().enumerate() {
                for (j, hij) in row.iter_mut().enumerate() {
                    *hij += derivative(&t, &[i, j]).eval(m);
                }
            }
        }
        Some(h)
    }
}

fn derivative(t: &Monomial, axes: &[usize]) -> Monomial {
    let mut d = *t;
    for &i in axes {
        if d.powers[i] == 0 {
            return Monomial {
                coeff: 0.0,
                powers: [0; 3],
            };
        }
        d.coeff *= f64::from(d.powers[i]);
        d.powers[i] -= 1;
    }
    d
}

/// Evaluates `P(m)` for `|m| <= 1` (with a 1e-12 allowance).
pub fn symbol_eval(p: &PolynomialSymbol, m: Vec3) -> Result<f64> {
    let r = norm3(m);
    if r.is_nan() || r > 1.0 + 1e-12 {
        return Err(Error::domain(format!("|m| = {r} > 1")));
    }
    Ok(p.eval(m))
}

/// All `(a, b, c)` with `a + b + c = d`, in lexicographic order.
pub fn exponent_triples(d: u32) -> Vec<[u32; 3]> {
    let mut v = Vec::new();
    for a in (0..=d).rev() {
        for b in (0..=(d - a)).rev() {
            v.push([a, b, d - a - b]);
        }
    }
    v
}

/// `d! / (a! b! c!)`
pub fn multinomial(d: u32, p: [u32; 3]) -> f64 {
    let fact = |n: u32| (1..=n).map(f64::from).product::<f64>();
    fact(d) / (fact(p[0]) * fact(p[1]) * fact(p[2]))
}

fn spiral_directions(k: usize) -> Vec<Vec3> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..k)
        .map(|i| {
            let z = 1.0 - 2.0 * (i as f64 + 0.5) / k as f64;
            let r = (1.0 - z * z).sqrt();
            let phi = golden * i as f64;
            [r * phi.cos(), r * phi.sin(), z]
        })
        .collect()
}

impl FromStr for PolynomialSymbol {
    type Err = Error;

    /// Parses `coeff*x^a*y^b*z^c; ...`. Whitespace is ignored, a variable without
    /// `^` has exponent 1, absent variables have exponent 0 and repeated factors
    /// multiply.
    fn from_str(s: &str) -> Result<Self> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let mut monomials = Vec::new();
        for (index, chunk) in compact.split(';').enumerate() {
            if chunk.is_empty() {
                continue;
            }
            let err = |message: String| Error::Parse { index, message };
            let mut coeff = 1.0;
            let mut powers = [0u32; 3];
            for factor in chunk.split('*') {
                let factor = match factor.strip_prefix('-') {
                    Some(rest) => {
                        coeff = -coeff;
                        rest
                    }
                    None => factor,
                };
                let (base, exp) = match factor.split_once('^') {
                    Some((b, e)) => (
                        b,
                        Some(
                            e.parse::<u32>()
                                .map_err(|_| err(format!("bad exponent `{e}`")))?,
                        ),
                    ),
                    None => (factor, None),
                };
                let axis = match base {
                    "x" => Some(0),
                    "y" => Some(1),
                    "z" => Some(2),
                    _ => None,
                };
                match (axis, exp) {
                    (Some(a), e) => powers[a] += e.unwrap_or(1),
                    (None, None) => {
                        let c: f64 = base
                            .parse()
                            .map_err(|_| err(format!("bad factor `{base}`")))?;
                        coeff *= c;
                    }
                    (None, Some(_)) => return Err(err(format!("bad base `{base}`"))),
                }
            }
            monomials.push((coeff, powers));
        }
        if monomials.is_empty() {
            return Err(Error::Parse {
                index: 0,
                message: "empty symbol".into(),
            });
        }
        PolynomialSymbol::new(monomials)
    }
}

impl fmt::Display for PolynomialSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, t) in self.monomials().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{:?}", t.coeff)?;
            for (name, &p) in ["x", "y", "z"].iter().zip(&t.powers) {
                if p > 0 {
                    write!(f, "*{name}^{p}")?;
                }
            }
        }
        Ok(())
    }
}

impl TryFrom<String> for PolynomialSymbol {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<PolynomialSymbol> for String {
    fn from(p: PolynomialSymbol) -> String {
        p.to_string()
    }
}
