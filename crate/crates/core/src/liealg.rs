//! Lie algebra representations and abstract structure constants.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::numkernel::{
    check_finite, check_finite_vec, commutator, least_squares, mat_exp, rank_split, spectral_norm,
    vec_of, Matrix, Subspace, TolerancePolicy, Vector,
};

/// Coefficients `c[i][j][k]` with `[X_i, X_j] = sum_k c[i][j][k] X_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct StructureConstants {
    d: usize,
    c: Vec<f64>,
}

impl StructureConstants {
    pub fn zero(d: usize) -> Self {
        Self {
            d,
            c: vec![0.0; d * d * d],
        }
    }

    /// Builds from a nested `d x d x d` tensor, checking antisymmetry and the
    /// Jacobi identity.
    pub fn from_tensor(tensor: &[Vec<Vec<f64>>]) -> Result<Self> {
        let d = tensor.len();
        let mut sc = Self::zero(d);
        for (i, plane) in tensor.iter().enumerate() {
            if plane.len() != d {
                return Err(Error::DimensionMismatch {
                    context: format!("structure constants slice {i}"),
                    expected: d,
                    found: plane.len(),
                });
            }
            for (j, row) in plane.iter().enumerate() {
                if row.len() != d {
                    return Err(Error::DimensionMismatch {
                        context: format!("structure constants row [{i}][{j}]"),
                        expected: d,
                        found: row.len(),
                    });
                }
                for (k, &v) in row.iter().enumerate() {
                    if !v.is_finite() {
                        return Err(Error::NonFinite {
                            context: format!("structure constants [{i}][{j}][{k}]"),
                        });
                    }
                    sc.set(i, j, k, v);
                }
            }
        }
        let anti = sc.antisymmetry_residual();
        if anti > 1e-10 {
            return Err(Error::Precondition {
                what: "structure constants are not antisymmetric".into(),
                residual: anti,
            });
        }
        let jac = sc.jacobi_residual();
        if jac > 1e-9 {
            return Err(Error::Precondition {
                what: "structure constants violate the Jacobi identity".into(),
                residual: jac,
            });
        }
        Ok(sc)
    }

    pub fn to_tensor(&self) -> Vec<Vec<Vec<f64>>> {
        (0..self.d)
            .map(|i| {
                (0..self.d)
                    .map(|j| (0..self.d).map(|k| self.get(i, j, k)).collect())
                    .collect()
            })
            .collect()
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.c[(i * self.d + j) * self.d + k]
    }

    fn set(&mut self, i: usize, j: usize, k: usize, v: f64) {
        self.c[(i * self.d + j) * self.d + k] = v;
    }

    /// Matrix of `ad_{e_i}` in the basis: column `j` holds `[e_i, e_j]`.
    pub fn ad_basis(&self, i: usize) -> Matrix {
        Matrix::from_fn(self.d, self.d, |k, j| self.get(i, j, k))
    }

    /// Matrix of `ad_x` for a coefficient vector `x`.
    pub fn ad(&self, x: &Vector) -> Matrix {
        let mut m = Matrix::zeros(self.d, self.d);
        for (i, &xi) in x.iter().enumerate() {
            if xi != 0.0 {
                m += self.ad_basis(i) * xi;
            }
        }
        m
    }

    pub fn bracket(&self, x: &Vector, y: &Vector) -> Vector {
        self.ad(x) * y
    }

    pub fn antisymmetry_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.d {
            for j in 0..self.d {
                for k in 0..self.d {
                    worst = worst.max((self.get(i, j, k) + self.get(j, i, k)).abs());
                }
            }
        }
        worst
    }

    /// Largest entry of the cyclic Jacobi sum over basis triples.
    pub fn jacobi_residual(&self) -> f64 {
        let d = self.d;
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    for l in 0..d {
                        let mut s = 0.0;
                        for m in 0..d {
                            s += self.get(i, j, m) * self.get(m, k, l)
                                + self.get(j, k, m) * self.get(m, i, l)
                                + self.get(k, i, m) * self.get(m, j, l);
                        }
                        worst = worst.max(s.abs());
                    }
                }
            }
        }
        worst
    }

    /// Killing form `B(e_i, e_j) = tr(ad_i ad_j)`.
    pub fn killing_form(&self) -> Matrix {
        let ads: Vec<Matrix> = (0..self.d).map(|i| self.ad_basis(i)).collect();
        Matrix::from_fn(self.d, self.d, |i, j| (&ads[i] * &ads[j]).trace())
    }
}

/// Least-squares structure constants of a family of matrices, failing with
/// `NotClosed` if some bracket leaves their span.
pub fn structure_constants_of(generators: &[Matrix], policy: &TolerancePolicy) -> Result<StructureConstants> {
    let d = generators.len();
    let mut sc = StructureConstants::zero(d);
    if d == 0 {
        return Ok(sc);
    }
    let columns: Vec<Vector> = generators.iter().map(vec_of).collect();
    let basis = Matrix::from_columns(&columns);
    for i in 0..d {
        for j in (i + 1)..d {
            let br = vec_of(&commutator(&generators[i], &generators[j])?);
            let coeffs = least_squares(&basis, &br);
            let residual = (&basis * &coeffs - &br).norm();
            let scale = (generators[i].norm() * generators[j].norm()).max(1.0);
            if residual > policy.containment_tol * scale {
                return Err(Error::NotClosed { i, j, residual });
            }
            for k in 0..d {
                sc.set(i, j, k, coeffs[k]);
                sc.set(j, i, k, -coeffs[k]);
            }
        }
    }
    Ok(sc)
}

/// A Lie algebra acting linearly on R^N, optionally with representatives
/// of the non-identity components of the group.
#[derive(Clone, Debug)]
pub struct LieRep {
    ambient_dim: usize,
    generators: Vec<Matrix>,
    discrete_elements: Vec<Matrix>,
    policy: TolerancePolicy,
    orthogonal: bool,
    structure: StructureConstants,
}

impl LieRep {
    /// Validates eagerly: shapes, finiteness, skewness (when `orthogonal`),
    /// linear independence, orthogonality of discrete elements and bracket
    /// closure.
    pub fn new(
        ambient_dim: usize,
        generators: Vec<Matrix>,
        discrete_elements: Vec<Matrix>,
        orthogonal: bool,
        policy: TolerancePolicy,
    ) -> Result<Self> {
        policy.validate()?;
        for (index, g) in generators.iter().enumerate() {
            if g.shape() != (ambient_dim, ambient_dim) {
                return Err(Error::DimensionMismatch {
                    context: format!("generator {index}"),
                    expected: ambient_dim,
                    found: if g.nrows() != ambient_dim { g.nrows() } else { g.ncols() },
                });
            }
            check_finite(g, &format!("generator {index}"))?;
            if orthogonal {
                let residual = (g + g.transpose()).amax();
                if residual >= policy.abs_zero_tol.max(1e-12 * g.amax()) {
                    return Err(Error::NotSkew { index, residual });
                }
            }
        }
        for (index, h) in discrete_elements.iter().enumerate() {
            if h.shape() != (ambient_dim, ambient_dim) {
                return Err(Error::DimensionMismatch {
                    context: format!("discrete element {index}"),
                    expected: ambient_dim,
                    found: h.nrows(),
                });
            }
            check_finite(h, &format!("discrete element {index}"))?;
            let residual = (h.transpose() * h - Matrix::identity(ambient_dim, ambient_dim)).amax();
            if residual > 1e-9 {
                return Err(Error::NotOrthogonal { index, residual });
            }
        }
        if !generators.is_empty() {
            let stack = Matrix::from_columns(&generators.iter().map(vec_of).collect::<Vec<_>>());
            let rank = rank_split(&stack, &policy)?.rank();
            if rank < generators.len() {
                return Err(Error::DependentGenerators {
                    rank,
                    count: generators.len(),
                });
            }
        }
        let structure = structure_constants_of(&generators, &policy)?;
        Ok(Self {
            ambient_dim,
            generators,
            discrete_elements,
            policy,
            orthogonal,
            structure,
        })
    }

    /// The zero algebra acting on R^n.
    pub fn trivial(ambient_dim: usize, policy: TolerancePolicy) -> Self {
        Self {
            ambient_dim,
            generators: Vec::new(),
            discrete_elements: Vec::new(),
            policy,
            orthogonal: true,
            structure: StructureConstants::zero(0),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    /// Dimension of the acting algebra.
    pub fn dim(&self) -> usize {
        self.generators.len()
    }

    pub fn generators(&self) -> &[Matrix] {
        &self.generators
    }

    pub fn discrete_elements(&self) -> &[Matrix] {
        &self.discrete_elements
    }

    pub fn policy(&self) -> &TolerancePolicy {
        &self.policy
    }

    pub fn is_orthogonal(&self) -> bool {
        self.orthogonal
    }

    pub fn structure_constants(&self) -> &StructureConstants {
        &self.structure
    }

    pub fn with_discrete_elements(mut self, elements: Vec<Matrix>) -> Result<Self> {
        self = Self::new(self.ambient_dim, self.generators, elements, self.orthogonal, self.policy)?;
        Ok(self)
    }

    pub fn with_policy(mut self, policy: TolerancePolicy) -> Result<Self> {
        policy.validate()?;
        self.policy = policy;
        Ok(self)
    }

    /// `sum_i coeffs_i X_i`.
    pub fn element(&self, coeffs: &Vector) -> Matrix {
        let mut m = Matrix::zeros(self.ambient_dim, self.ambient_dim);
        for (c, g) in coeffs.iter().zip(&self.generators) {
            if *c != 0.0 {
                m += g * *c;
            }
        }
        m
    }

    /// The N x d matrix `[X_1 p, ..., X_d p]`.
    pub fn orbit_map(&self, p: &Vector) -> Matrix {
        let cols: Vec<Vector> = self.generators.iter().map(|g| g * p).collect();
        if cols.is_empty() {
            Matrix::zeros(self.ambient_dim, 0)
        } else {
            Matrix::from_columns(&cols)
        }
    }

    /// Scale of the one-parameter subgroups used when sampling elements.
    pub fn sampling_radius(&self) -> f64 {
        let smallest = self
            .generators
            .iter()
            .map(spectral_norm)
            .fold(f64::INFINITY, f64::min);
        if smallest.is_finite() && smallest > 0.0 {
            std::f64::consts::PI / smallest
        } else {
            std::f64::consts::PI
        }
    }

    /// Restricts the subalgebra spanned by `coeffs` (a subspace of R^d) to
    /// the invariant subspace `target`, dropping the ineffective kernel.
    /// Returns the restricted representation and the coefficient subspace
    /// whose restrictions became its generators.
    pub fn restrict(
        &self,
        coeffs: &Subspace,
        target: &Subspace,
        discrete: Vec<Matrix>,
    ) -> Result<(LieRep, Subspace)> {
        let k = target.dim();
        let v = target.basis();
        let restricted: Vec<Matrix> = coeffs
            .basis()
            .column_iter()
            .map(|c| v.transpose() * self.element(&c.into_owned()) * v)
            .collect();
        let effective = if restricted.is_empty() {
            Subspace::zero(self.dim())
        } else {
            let stack = Matrix::from_columns(&restricted.iter().map(vec_of).collect::<Vec<_>>());
            let split = rank_split(&stack, &self.policy)?;
            // Complement of the kernel inside the coefficient subspace.
            let local = crate::numkernel::complement(&split.null, &self.policy);
            let global = coeffs.basis() * local.basis();
            Subspace::span(&global, &self.policy)?
        };
        let gens: Vec<Matrix> = effective
            .basis()
            .column_iter()
            .map(|c| {
                let r = v.transpose() * self.element(&c.into_owned()) * v;
                if self.orthogonal {
                    (&r - r.transpose()) * 0.5
                } else {
                    r
                }
            })
            .collect();
        let rep = LieRep::new(k, gens, discrete, self.orthogonal, self.policy)?;
        Ok((rep, effective))
    }
}

/// Structure constants of the representation, re-derived by least squares.
pub fn check_closure(rep: &LieRep) -> Result<StructureConstants> {
    structure_constants_of(rep.generators(), rep.policy())
}

/// Value at `p` of the Killing field generated by `sum_i coeffs_i X_i`.
pub fn killing_value(rep: &LieRep, coeffs: &Vector, p: &Vector) -> Result<Vector> {
    if coeffs.len() != rep.dim() {
        return Err(Error::DimensionMismatch {
            context: "killing_value coefficients".into(),
            expected: rep.dim(),
            found: coeffs.len(),
        });
    }
    if p.len() != rep.ambient_dim() {
        return Err(Error::DimensionMismatch {
            context: "killing_value point".into(),
            expected: rep.ambient_dim(),
            found: p.len(),
        });
    }
    check_finite_vec(p, "killing_value point")?;
    Ok(rep.element(coeffs) * p)
}

/// Deterministic group element `exp(t_1 X_{i_1}) ... exp(t_d X_{i_d})`
/// with a shuffled generator order and `|t_j| <= radius`.
pub fn sample_element(rep: &LieRep, radius: f64, seed: u64) -> Matrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_element_with(rep, radius, &mut rng)
}

pub fn sample_element_with<R: Rng + ?Sized>(rep: &LieRep, radius: f64, rng: &mut R) -> Matrix {
    let n = rep.ambient_dim();
    let mut order: Vec<usize> = (0..rep.dim()).collect();
    order.shuffle(rng);
    let mut g = Matrix::identity(n, n);
    for i in order {
        let t: f64 = rng.random_range(-1.0..=1.0) * radius;
        let factor = mat_exp(&(&rep.generators()[i] * t)).expect("square generator");
        g = factor * g;
    }
    g
}

/// Product of random elements drawn from the subgroup generated by a
/// coefficient subspace of the algebra.
pub fn sample_subgroup_element<R: Rng + ?Sized>(
    rep: &LieRep,
    coeffs: &Subspace,
    radius: f64,
    rng: &mut R,
) -> Matrix {
    let n = rep.ambient_dim();
    let mut g = Matrix::identity(n, n);
    for c in coeffs.basis().column_iter() {
        let t: f64 = rng.random_range(-1.0..=1.0) * radius;
        let x = rep.element(&c.into_owned()) * t;
        g = mat_exp(&x).expect("square generator") * g;
    }
    g
}

/// Seeded generator for the `index`-th independent stream of `seed`.
pub(crate) fn stream_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}
