//! Local minimization over the identity component of a matrix group.
//!
//! All searches minimize `f(g) = 1/2 |R (g x0) - c|^2` with left updates
//! `g <- exp(sum_i s_i X_i) g`, using a saddle-free Newton step with
//! backtracking.

use crate::liealg::{sample_element_with, stream_rng, LieRep};
use crate::numkernel::{mat_exp, sym_eigen_sorted, Matrix, Vector};

const MAX_ITER: usize = 60;
const MAX_STEP: f64 = 1.0;

pub(crate) struct Objective<'a> {
    pub x0: &'a Vector,
    pub proj: Option<&'a Matrix>,
    pub target: &'a Vector,
}

impl Objective<'_> {
    fn apply_proj(&self, v: &Vector) -> Vector {
        match self.proj {
            Some(r) => r * v,
            None => v.clone(),
        }
    }

    fn value(&self, g: &Matrix) -> f64 {
        let r = self.apply_proj(&(g * self.x0)) - self.target;
        0.5 * r.norm_squared()
    }
}

/// Runs the local search from `start`; returns the final element and
/// objective value.
pub(crate) fn descend(rep: &LieRep, obj: &Objective<'_>, start: Matrix) -> (Matrix, f64) {
    let d = rep.dim();
    let mut g = start;
    let mut f = obj.value(&g);
    if d == 0 {
        return (g, f);
    }
    let gens = rep.generators();
    for _ in 0..MAX_ITER {
        if f < 1e-30 {
            break;
        }
        let x = &g * obj.x0;
        let r = obj.apply_proj(&x) - obj.target;
        let xs: Vec<Vector> = gens.iter().map(|xi| xi * &x).collect();
        let jac: Vec<Vector> = xs.iter().map(|v| obj.apply_proj(v)).collect();
        let grad = Vector::from_fn(d, |i, _| jac[i].dot(&r));
        let mut hess = Matrix::zeros(d, d);
        for i in 0..d {
            for j in i..d {
                // Second-order term of exp(s X) uses the symmetrized product.
                let second = 0.5 * (obj.apply_proj(&(&gens[i] * &xs[j])) + obj.apply_proj(&(&gens[j] * &xs[i])));
                let h = jac[i].dot(&jac[j]) + r.dot(&second);
                hess[(i, j)] = h;
                hess[(j, i)] = h;
            }
        }
        let (vals, vecs) = sym_eigen_sorted(&hess);
        let scale = vals.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
        let floor = 1e-10 * scale;
        let coeffs = vecs.transpose() * &grad;
        let mut step = Vector::zeros(d);
        for k in 0..d {
            let lam = vals[k].abs().max(floor);
            step -= vecs.column(k) * (coeffs[k] / lam);
        }
        let norm = step.norm();
        if norm > MAX_STEP {
            step *= MAX_STEP / norm;
        }
        let mut alpha = 1.0;
        let mut improved = false;
        for _ in 0..30 {
            let update = mat_exp(&rep.element(&(&step * alpha))).expect("square");
            let candidate = &update * &g;
            let fc = obj.value(&candidate);
            if fc < f {
                let gain = f - fc;
                g = candidate;
                f = fc;
                improved = true;
                if gain <= 1e-16 * f.max(1e-300) {
                    return (g, f);
                }
                break;
            }
            alpha *= 0.5;
        }
        if !improved {
            break;
        }
    }
    (g, f)
}

/// Identity plus the supplied discrete elements.
pub(crate) fn all_components(rep: &LieRep) -> Vec<Matrix> {
    let n = rep.ambient_dim();
    let mut components = vec![Matrix::identity(n, n)];
    components.extend(rep.discrete_elements().iter().cloned());
    components
}

/// Best local minimum over `restarts` random starts in each component
/// `G° δ`, with δ ranging over `components`.
/// Restart `i` draws from stream `i` of `seed`, so a larger budget only
/// adds starts. Returns the per-restart best values and the overall best
/// element.
pub(crate) fn multistart(
    rep: &LieRep,
    x0: &Vector,
    proj: Option<&Matrix>,
    target: &Vector,
    components: &[Matrix],
    restarts: usize,
    seed: u64,
) -> (Vec<f64>, Matrix) {
    use rayon::prelude::*;
    let n = rep.ambient_dim();
    let radius = rep.sampling_radius();
    let runs: Vec<(f64, Matrix)> = (0..restarts)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, i as u64);
            let mut best = (f64::INFINITY, Matrix::identity(n, n));
            for delta in components {
                let start = if i == 0 {
                    Matrix::identity(n, n)
                } else {
                    sample_element_with(rep, radius, &mut rng)
                };
                let shifted = delta * x0;
                let obj = Objective {
                    x0: &shifted,
                    proj,
                    target,
                };
                let (h, f) = descend(rep, &obj, start);
                if f < best.0 {
                    best = (f, h * delta);
                }
            }
            best
        })
        .collect();
    let mut best = (f64::INFINITY, Matrix::identity(n, n));
    let mut values = Vec::with_capacity(restarts);
    for (f, g) in runs {
        values.push(f);
        if f < best.0 {
            best = (f, g);
        }
    }
    (values, best.1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn finds_rotation_onto_target() {
        let rep = catalog::so_n_copies(3, 1);
        let x0 = Vector::from_vec(vec![1.0, 0.0, 0.0]);
        let target = Vector::from_vec(vec![0.0, 0.6, 0.8]);
        let (values, g) = multistart(&rep, &x0, None, &target, &all_components(&rep), 4, 1);
        let best = values.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(best < 1e-20, "{best}");
        assert!((&g * &x0 - &target).norm() < 1e-10);
    }

    #[test]
    fn distance_between_spheres() {
        let rep = catalog::so_n_copies(3, 1);
        let x0 = Vector::from_vec(vec![1.0, 0.0, 0.0]);
        let target = Vector::from_vec(vec![0.0, 2.0, 0.0]);
        let (values, _) = multistart(&rep, &x0, None, &target, &all_components(&rep), 4, 9);
        let best = values.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(((2.0 * best).sqrt() - 1.0).abs() < 1e-9);
    }
}
