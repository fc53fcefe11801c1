//! Dense complex linear algebra helpers on `nalgebra` matrices.
//!
//! States on `(C^d)^{⊗n}` use the digit convention
//! `index(i₁…iₙ) = Σₖ iₖ d^{n−1−k}`, so site 0 is the most significant digit.
//! A state entangled with an external reference is a `d^n × e` matrix whose
//! column `j` is the component paired with reference basis vector `j`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::perm::Permutation;

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Haar-random element of U(d): QR of a complex Gaussian matrix with the
/// phases of `R`'s diagonal folded back into `Q`.
pub fn haar_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    let z = CMatrix::from_fn(d, d, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        c(re, im) / std::f64::consts::SQRT_2
    });
    let qr = z.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..d {
        let diag = r[(j, j)];
        let phase = if diag.norm() > 0.0 { diag / diag.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Haar-random element of SU(d): a Haar unitary times a global phase fixing det = 1.
pub fn haar_special_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    let u = haar_unitary(d, rng);
    let det = u.determinant();
    let correction = C64::from_polar(1.0, -det.arg() / d as f64);
    u * correction
}

/// Normalized complex Gaussian state of shape `dim × ext`.
pub fn random_state<R: Rng + ?Sized>(dim: usize, ext: usize, rng: &mut R) -> CMatrix {
    let mut psi = CMatrix::from_fn(dim, ext, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        c(re, im)
    });
    let norm = psi.norm();
    psi /= C64::new(norm, 0.0);
    psi
}

pub fn basis_state(dim: usize, index: usize) -> CMatrix {
    let mut psi = CMatrix::zeros(dim, 1);
    psi[(index, 0)] = C64::new(1.0, 0.0);
    psi
}

/// Hilbert-Schmidt inner product `⟨a|b⟩` of two equally shaped states.
pub fn inner(a: &CMatrix, b: &CMatrix) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm_sqr(a: &CMatrix) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum()
}

/// Fidelity `|⟨a|b⟩|² / (‖a‖²‖b‖²)`; insensitive to global phase.
pub fn fidelity(a: &CMatrix, b: &CMatrix) -> f64 {
    let na = norm_sqr(a);
    let nb = norm_sqr(b);
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    inner(a, b).norm_sqr() / (na * nb)
}

/// Applies the single-site operator `u` (d×d) to site `site` of every column.
pub fn apply_local(state: &mut CMatrix, n: usize, d: usize, site: usize, u: &CMatrix) {
    let stride = d.pow((n - 1 - site) as u32);
    let block = stride * d;
    let coeffs: Vec<C64> = (0..d * d).map(|k| u[(k / d, k % d)]).collect();
    let mut buf = vec![C64::new(0.0, 0.0); d * stride];
    for chunk in state.as_mut_slice().chunks_exact_mut(block) {
        if d == 2 {
            let (a, b) = chunk.split_at_mut(stride);
            let [u00, u01, u10, u11] = [coeffs[0], coeffs[1], coeffs[2], coeffs[3]];
            for (x, y) in a.iter_mut().zip(b.iter_mut()) {
                let (p, q) = (*x, *y);
                *x = u00 * p + u01 * q;
                *y = u10 * p + u11 * q;
            }
        } else {
            buf.copy_from_slice(chunk);
            for i in 0..d {
                let out = &mut chunk[i * stride..(i + 1) * stride];
                out.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
                for j in 0..d {
                    let c = coeffs[i * d + j];
                    let src = &buf[j * stride..(j + 1) * stride];
                    for (o, v) in out.iter_mut().zip(src) {
                        *o += c * v;
                    }
                }
            }
        }
    }
}

/// `U^{⊗n}` applied to every column of `state`.
pub fn apply_tensor_power(u: &CMatrix, n: usize, state: &CMatrix) -> CMatrix {
    let d = u.nrows();
    let mut out = state.clone();
    for site in 0..n {
        apply_local(&mut out, n, d, site, u);
    }
    out
}

/// Decomposes an index into its `n` base-`d` digits (site 0 first).
pub fn digits(mut index: usize, n: usize, d: usize) -> Vec<usize> {
    let mut out = vec![0; n];
    for k in (0..n).rev() {
        out[k] = index % d;
        index /= d;
    }
    out
}

pub fn from_digits(digits: &[usize], d: usize) -> usize {
    digits.iter().fold(0, |acc, &x| acc * d + x)
}

/// Index map of the tensor-factor permutation: basis vector `x` is sent to `map[x]`,
/// moving the content of site `k` to site `π(k)`.
pub fn permutation_index_map(pi: &Permutation, d: usize) -> Vec<usize> {
    let n = pi.len();
    let dim = d.pow(n as u32);
    (0..dim)
        .map(|x| {
            let src = digits(x, n, d);
            let mut dst = vec![0; n];
            for (k, &v) in src.iter().enumerate() {
                dst[pi.apply(k)] = v;
            }
            from_digits(&dst, d)
        })
        .collect()
}

/// Applies the tensor-factor permutation to every column.
pub fn apply_permutation(pi: &Permutation, d: usize, state: &CMatrix) -> CMatrix {
    let map = permutation_index_map(pi, d);
    let mut out = CMatrix::zeros(state.nrows(), state.ncols());
    for (x, &y) in map.iter().enumerate() {
        for col in 0..state.ncols() {
            out[(y, col)] = state[(x, col)];
        }
    }
    out
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    CMatrix::from_fn(ar * br, ac * bc, |i, j| a[(i / br, j / bc)] * b[(i % br, j % bc)])
}

pub fn tensor_power_matrix(u: &CMatrix, n: usize) -> CMatrix {
    (0..n).fold(CMatrix::identity(1, 1), |acc, _| kron(&acc, u))
}

/// `max |A†A − I|` over entries.
pub fn unitarity_residual(a: &CMatrix) -> f64 {
    let g = a.adjoint() * a;
    let id = CMatrix::identity(g.nrows(), g.ncols());
    (g - id).iter().map(|x| x.norm()).fold(0.0, f64::max)
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Embeds a square matrix into the top-left corner of an identity of size `pad`.
pub fn pad_with_identity(block: &CMatrix, pad: usize) -> CMatrix {
    let mut out = CMatrix::identity(pad, pad);
    out.view_mut((0, 0), block.shape()).copy_from(block);
    out
}
