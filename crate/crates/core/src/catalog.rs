//! Standard representations and symmetric-pair data used by tests, benches
//! and the command line.

use crate::liealg::{structure_constants_of, LieRep, StructureConstants};
use crate::numkernel::{least_squares, vec_of, Matrix, TolerancePolicy};

/// `E_ji - E_ij` inside an `n x n` block: sends `e_i` to `e_j`.
fn rotation(n: usize, i: usize, j: usize) -> Matrix {
    let mut m = Matrix::zeros(n, n);
    m[(j, i)] = 1.0;
    m[(i, j)] = -1.0;
    m
}

fn block_diagonal(block: &Matrix, copies: usize) -> Matrix {
    let n = block.nrows();
    let mut m = Matrix::zeros(n * copies, n * copies);
    for c in 0..copies {
        m.view_mut((c * n, c * n), (n, n)).copy_from(block);
    }
    m
}

/// Generators of so(n) acting diagonally on `copies` copies of R^n.
pub fn so_n_generators(n: usize, copies: usize) -> Vec<Matrix> {
    let mut gens = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            gens.push(block_diagonal(&rotation(n, i, j), copies));
        }
    }
    gens
}

/// SO(n) acting diagonally on `copies`·R^n.
pub fn so_n_copies(n: usize, copies: usize) -> LieRep {
    LieRep::new(
        n * copies,
        so_n_generators(n, copies),
        Vec::new(),
        true,
        TolerancePolicy::default(),
    )
    .expect("so(n) is a valid representation")
}

/// O(n) acting diagonally on `copies`·R^n: the identity component plus the
/// reflection `diag(1, ..., 1, -1)` as the representative of the other
/// component.
pub fn o_n_copies(n: usize, copies: usize) -> LieRep {
    let mut refl = Matrix::identity(n, n);
    refl[(n - 1, n - 1)] = -1.0;
    LieRep::new(
        n * copies,
        so_n_generators(n, copies),
        vec![block_diagonal(&refl, copies)],
        true,
        TolerancePolicy::default(),
    )
    .expect("o(n) is a valid representation")
}

/// The zero algebra on R^n.
pub fn trivial(n: usize) -> LieRep {
    LieRep::trivial(n, TolerancePolicy::default())
}

/// The torus T^m rotating each of m coordinate planes of R^{2m}.
pub fn torus_on_planes(m: usize) -> LieRep {
    let n = 2 * m;
    let gens = (0..m).map(|k| rotation(n, 2 * k, 2 * k + 1)).collect();
    LieRep::new(n, gens, Vec::new(), true, TolerancePolicy::default())
        .expect("torus is a valid representation")
}

/// Complex `n x n` matrix stored as real and imaginary parts, mapped to
/// the real `2n x 2n` matrix `[[re, -im], [im, re]]`.
fn realify(re: &Matrix, im: &Matrix) -> Matrix {
    let n = re.nrows();
    let mut m = Matrix::zeros(2 * n, 2 * n);
    m.view_mut((0, 0), (n, n)).copy_from(re);
    m.view_mut((n, n), (n, n)).copy_from(re);
    m.view_mut((0, n), (n, n)).copy_from(&(-im));
    m.view_mut((n, 0), (n, n)).copy_from(im);
    m
}

/// Basis `-(i/2)·λ` of su(n) for Hermitian generators `λ` given as
/// (real, imaginary) pairs, in the real embedding.
fn su_basis(hermitian: &[(Matrix, Matrix)]) -> Vec<Matrix> {
    hermitian
        .iter()
        .map(|(re, im)| {
            // -(i/2)(re + i im) = im/2 - (i/2) re
            realify(&(im * 0.5), &(re * -0.5))
        })
        .collect()
}

fn pauli() -> Vec<(Matrix, Matrix)> {
    let z = Matrix::zeros(2, 2);
    vec![
        (Matrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]), z.clone()),
        (z.clone(), Matrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0])),
        (Matrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]), z),
    ]
}

fn gell_mann() -> Vec<(Matrix, Matrix)> {
    let z = Matrix::zeros(3, 3);
    let sym = |i: usize, j: usize| {
        let mut m = Matrix::zeros(3, 3);
        m[(i, j)] = 1.0;
        m[(j, i)] = 1.0;
        m
    };
    let anti = |i: usize, j: usize| {
        let mut m = Matrix::zeros(3, 3);
        m[(i, j)] = -1.0;
        m[(j, i)] = 1.0;
        m
    };
    let s3 = 1.0 / 3f64.sqrt();
    vec![
        (sym(0, 1), z.clone()),
        (z.clone(), anti(0, 1)),
        (Matrix::from_diagonal(&crate::Vector::from_vec(vec![1.0, -1.0, 0.0])), z.clone()),
        (sym(0, 2), z.clone()),
        (z.clone(), anti(0, 2)),
        (sym(1, 2), z.clone()),
        (z.clone(), anti(1, 2)),
        (
            Matrix::from_diagonal(&crate::Vector::from_vec(vec![s3, s3, -2.0 * s3])),
            z,
        ),
    ]
}

/// A compact Lie algebra with a faithful matrix embedding, an orthonormal
/// Ad-invariant basis and an involution given by conjugation.
#[derive(Clone, Debug)]
pub struct EmbeddedPair {
    pub embedding: Vec<Matrix>,
    pub structure: StructureConstants,
    pub inner: Matrix,
    pub involution: Matrix,
}

fn conjugation_involution(embedding: &[Matrix], conj: &Matrix) -> Matrix {
    let basis = Matrix::from_columns(&embedding.iter().map(vec_of).collect::<Vec<_>>());
    let cols: Vec<crate::Vector> = embedding
        .iter()
        .map(|e| least_squares(&basis, &vec_of(&(conj * e * conj))))
        .collect();
    Matrix::from_columns(&cols)
}

fn embedded_pair(hermitian: Vec<(Matrix, Matrix)>, signs: &[f64]) -> EmbeddedPair {
    let embedding = su_basis(&hermitian);
    let policy = TolerancePolicy::default();
    let structure = structure_constants_of(&embedding, &policy).expect("su(n) closes");
    let n = signs.len();
    let d = Matrix::from_diagonal(&crate::Vector::from_row_slice(signs));
    let conj = realify(&d, &Matrix::zeros(n, n));
    let involution = conjugation_involution(&embedding, &conj);
    let dim = embedding.len();
    EmbeddedPair {
        embedding,
        structure,
        inner: Matrix::identity(dim, dim),
        involution,
    }
}

/// su(2) with the involution `Ad(diag(1, -1))`; k = span{e_3}.
pub fn su2_pair() -> EmbeddedPair {
    embedded_pair(pauli(), &[1.0, -1.0])
}

/// su(3) with the involution `Ad(diag(1, -1, -1))`, whose symmetric space
/// is the complex projective plane.
pub fn su3_pair() -> EmbeddedPair {
    embedded_pair(gell_mann(), &[1.0, -1.0, -1.0])
}

/// so(3) in the basis `rotation(0,1), rotation(0,2), rotation(1,2)`.
pub fn so3_structure() -> StructureConstants {
    structure_constants_of(&so_n_generators(3, 1), &TolerancePolicy::default())
        .expect("so(3) closes")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embeddings_are_skew_and_orthonormal() {
        for pair in [su2_pair(), su3_pair()] {
            for e in &pair.embedding {
                assert!((e + e.transpose()).amax() < 1e-15);
            }
            // tr(e_a e_b) in the real embedding is -delta_ab.
            for (a, ea) in pair.embedding.iter().enumerate() {
                for (b, eb) in pair.embedding.iter().enumerate() {
                    let t = (ea * eb).trace();
                    let expect = if a == b { -1.0 } else { 0.0 };
                    assert!((t - expect).abs() < 1e-12, "{a} {b} {t}");
                }
            }
            let s = &pair.involution;
            let id = Matrix::identity(s.nrows(), s.nrows());
            assert!((s * s - id).amax() < 1e-12);
        }
    }

    #[test]
    fn involution_eigenspace_sizes() {
        let count = |p: &EmbeddedPair| {
            (0..p.involution.nrows())
                .filter(|&i| p.involution[(i, i)] > 0.5)
                .count()
        };
        assert_eq!(count(&su2_pair()), 1);
        assert_eq!(count(&su3_pair()), 4);
    }

    #[test]
    fn torus_is_abelian() {
        let t = torus_on_planes(3);
        assert_eq!(t.dim(), 3);
        assert!(t.structure_constants().to_tensor().iter().flatten().flatten().all(|v| *v == 0.0));
    }
}
