//! Dense symmetric/Hermitian eigensolvers for small matrices.
//!
//! Cyclic Jacobi rotations, which are deterministic and reach close to
//! machine precision on the d ≤ 8 matrices this crate works with. The
//! complex Hermitian solver uses phase-adjusted rotations; both solvers
//! return eigenvalues sorted descending with matching eigenvector columns.

use num_complex::Complex64;

const MAX_SWEEPS: usize = 64;

/// Eigendecomposition of a real symmetric matrix (row-major, d×d).
///
/// Returns `(values, vectors)` with `values` descending and `vectors`
/// column-major-by-index: column j (entries `vectors[i*d + j]`) is the
/// eigenvector for `values[j]`.
pub fn sym_eigen(a: &[f64], d: usize) -> (Vec<f64>, Vec<f64>) {
    assert_eq!(a.len(), d * d);
    let mut h = a.to_vec();
    // Symmetrize exactly; callers guarantee near-symmetry.
    for i in 0..d {
        for j in (i + 1)..d {
            let m = 0.5 * (h[i * d + j] + h[j * d + i]);
            h[i * d + j] = m;
            h[j * d + i] = m;
        }
    }
    let mut v = identity(d);
    let scale: f64 = h.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(1.0);
    let tol = f64::EPSILON * scale;

    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0f64;
        for i in 0..d {
            for j in (i + 1)..d {
                off = off.max(h[i * d + j].abs());
            }
        }
        if off <= tol {
            break;
        }
        for p in 0..d {
            for q in (p + 1)..d {
                let hpq = h[p * d + q];
                if hpq.abs() <= 0.1 * tol {
                    continue;
                }
                let (c, s) = jacobi_cs(h[p * d + p], h[q * d + q], hpq);
                rotate_sym(&mut h, d, p, q, c, s);
                rotate_cols(&mut v, d, p, q, c, s);
            }
        }
    }

    let mut vals: Vec<f64> = (0..d).map(|i| h[i * d + i]).collect();
    sort_desc(&mut vals, &mut v, d);
    (vals, v)
}

/// Eigendecomposition of a complex Hermitian matrix.
///
/// Same contract as [`sym_eigen`]; eigenvalues are real, vectors complex.
pub fn herm_eigen(a: &[Complex64], d: usize) -> (Vec<f64>, Vec<Complex64>) {
    assert_eq!(a.len(), d * d);
    let mut h = a.to_vec();
    for i in 0..d {
        h[i * d + i] = Complex64::new(h[i * d + i].re, 0.0);
        for j in (i + 1)..d {
            let m = 0.5 * (h[i * d + j] + h[j * d + i].conj());
            h[i * d + j] = m;
            h[j * d + i] = m.conj();
        }
    }
    let mut v = identity_c(d);
    let scale: f64 = h.iter().fold(0.0f64, |m, x| m.max(x.norm())).max(1.0);
    let tol = f64::EPSILON * scale;

    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0f64;
        for i in 0..d {
            for j in (i + 1)..d {
                off = off.max(h[i * d + j].norm());
            }
        }
        if off <= tol {
            break;
        }
        for p in 0..d {
            for q in (p + 1)..d {
                let hpq = h[p * d + q];
                let m = hpq.norm();
                if m <= 0.1 * tol {
                    continue;
                }
                // Phase e^{iφ} = hpq/|hpq| reduces the pivot block to a real
                // symmetric one; then an ordinary Jacobi rotation applies.
                // Combined unitary on coordinates (p,q):
                //   U = diag(1, conj(phase)) * [[c, s], [-s, c]]
                //     = [[c, s], [-s*conj(phase), c*conj(phase)]].
                let phase = hpq / m;
                let (c, s) = jacobi_cs(h[p * d + p].re, h[q * d + q].re, m);
                let u11 = Complex64::new(c, 0.0);
                let u12 = Complex64::new(s, 0.0);
                let u21 = -Complex64::new(s, 0.0) * phase.conj();
                let u22 = Complex64::new(c, 0.0) * phase.conj();
                // H <- U^H H U, applied as column then row updates.
                for i in 0..d {
                    let hip = h[i * d + p];
                    let hiq = h[i * d + q];
                    h[i * d + p] = hip * u11 + hiq * u21;
                    h[i * d + q] = hip * u12 + hiq * u22;
                }
                for j in 0..d {
                    let hpj = h[p * d + j];
                    let hqj = h[q * d + j];
                    h[p * d + j] = u11.conj() * hpj + u21.conj() * hqj;
                    h[q * d + j] = u12.conj() * hpj + u22.conj() * hqj;
                }
                h[p * d + q] = Complex64::new(0.0, 0.0);
                h[q * d + p] = Complex64::new(0.0, 0.0);
                h[p * d + p] = Complex64::new(h[p * d + p].re, 0.0);
                h[q * d + q] = Complex64::new(h[q * d + q].re, 0.0);
                for i in 0..d {
                    let vip = v[i * d + p];
                    let viq = v[i * d + q];
                    v[i * d + p] = vip * u11 + viq * u21;
                    v[i * d + q] = vip * u12 + viq * u22;
                }
            }
        }
    }

    let mut vals: Vec<f64> = (0..d).map(|i| h[i * d + i].re).collect();
    sort_desc_c(&mut vals, &mut v, d);
    (vals, v)
}

/// Determinant via LU with partial pivoting.
pub fn det_lu(a: &[f64], d: usize) -> f64 {
    assert_eq!(a.len(), d * d);
    let mut m = a.to_vec();
    let mut det = 1.0f64;
    for k in 0..d {
        let mut piv = k;
        let mut best = m[k * d + k].abs();
        for i in (k + 1)..d {
            let x = m[i * d + k].abs();
            if x > best {
                best = x;
                piv = i;
            }
        }
        if best == 0.0 {
            return 0.0;
        }
        if piv != k {
            for j in 0..d {
                m.swap(k * d + j, piv * d + j);
            }
            det = -det;
        }
        det *= m[k * d + k];
        let inv = 1.0 / m[k * d + k];
        for i in (k + 1)..d {
            let f = m[i * d + k] * inv;
            if f != 0.0 {
                for j in (k + 1)..d {
                    m[i * d + j] -= f * m[k * d + j];
                }
            }
        }
    }
    det
}

fn jacobi_cs(app: f64, aqq: f64, apq: f64) -> (f64, f64) {
    let tau = (aqq - app) / (2.0 * apq);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    (c, t * c)
}

fn rotate_sym(h: &mut [f64], d: usize, p: usize, q: usize, c: f64, s: f64) {
    for i in 0..d {
        let hip = h[i * d + p];
        let hiq = h[i * d + q];
        h[i * d + p] = c * hip - s * hiq;
        h[i * d + q] = s * hip + c * hiq;
    }
    for j in 0..d {
        let hpj = h[p * d + j];
        let hqj = h[q * d + j];
        h[p * d + j] = c * hpj - s * hqj;
        h[q * d + j] = s * hpj + c * hqj;
    }
    h[p * d + q] = 0.0;
    h[q * d + p] = 0.0;
}

fn rotate_cols(v: &mut [f64], d: usize, p: usize, q: usize, c: f64, s: f64) {
    for i in 0..d {
        let vip = v[i * d + p];
        let viq = v[i * d + q];
        v[i * d + p] = c * vip - s * viq;
        v[i * d + q] = s * vip + c * viq;
    }
}

fn identity(d: usize) -> Vec<f64> {
    let mut v = vec![0.0; d * d];
    for i in 0..d {
        v[i * d + i] = 1.0;
    }
    v
}

fn identity_c(d: usize) -> Vec<Complex64> {
    let mut v = vec![Complex64::new(0.0, 0.0); d * d];
    for i in 0..d {
        v[i * d + i] = Complex64::new(1.0, 0.0);
    }
    v
}

fn sort_desc(vals: &mut [f64], v: &mut [f64], d: usize) {
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| vals[b].partial_cmp(&vals[a]).unwrap());
    let old_vals = vals.to_vec();
    let old_v = v.to_vec();
    for (new_j, &old_j) in order.iter().enumerate() {
        vals[new_j] = old_vals[old_j];
        for i in 0..d {
            v[i * d + new_j] = old_v[i * d + old_j];
        }
    }
}

fn sort_desc_c(vals: &mut [f64], v: &mut [Complex64], d: usize) {
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| vals[b].partial_cmp(&vals[a]).unwrap());
    let old_vals = vals.to_vec();
    let old_v = v.to_vec();
    for (new_j, &old_j) in order.iter().enumerate() {
        vals[new_j] = old_vals[old_j];
        for i in 0..d {
            v[i * d + new_j] = old_v[i * d + old_j];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reconstruct(vals: &[f64], v: &[f64], d: usize) -> Vec<f64> {
        let mut out = vec![0.0; d * d];
        for i in 0..d {
            for j in 0..d {
                let mut s = 0.0;
                for k in 0..d {
                    s += v[i * d + k] * vals[k] * v[j * d + k];
                }
                out[i * d + j] = s;
            }
        }
        out
    }

    #[test]
    fn sym_diag_matrix() {
        let a = vec![3.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 2.0];
        let (vals, _) = sym_eigen(&a, 3);
        assert!((vals[0] - 3.0).abs() < 1e-14);
        assert!((vals[1] - 2.0).abs() < 1e-14);
        assert!((vals[2] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn sym_known_2x2() {
        // [[3,2],[2,3]] has eigenvalues 5 and 1.
        let a = vec![3.0, 2.0, 2.0, 3.0];
        let (vals, v) = sym_eigen(&a, 2);
        assert!((vals[0] - 5.0).abs() < 1e-13);
        assert!((vals[1] - 1.0).abs() < 1e-13);
        let r = reconstruct(&vals, &v, 2);
        for (x, y) in r.iter().zip(a.iter()) {
            assert!((x - y).abs() < 1e-13);
        }
    }

    #[test]
    fn sym_reconstruction_4x4() {
        let a = vec![
            4.0, 1.0, -2.0, 0.5, 1.0, 3.0, 0.0, -1.0, -2.0, 0.0, 1.0, 0.25, 0.5, -1.0, 0.25, -2.0,
        ];
        let (vals, v) = sym_eigen(&a, 4);
        let r = reconstruct(&vals, &v, 4);
        for (x, y) in r.iter().zip(a.iter()) {
            assert!((x - y).abs() < 1e-12, "{x} vs {y}");
        }
        for w in vals.windows(2) {
            assert!(w[0] >= w[1]);
        }
    }

    #[test]
    fn herm_matches_real_case() {
        let ar = vec![3.0, 2.0, 2.0, 3.0];
        let ac: Vec<Complex64> = ar.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        let (vr, _) = sym_eigen(&ar, 2);
        let (vc, _) = herm_eigen(&ac, 2);
        for (a, b) in vr.iter().zip(vc.iter()) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn herm_complex_known() {
        // [[2, i],[-i, 2]] has eigenvalues 3 and 1.
        let a = vec![
            Complex64::new(2.0, 0.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(0.0, -1.0),
            Complex64::new(2.0, 0.0),
        ];
        let (vals, v) = herm_eigen(&a, 2);
        assert!((vals[0] - 3.0).abs() < 1e-13);
        assert!((vals[1] - 1.0).abs() < 1e-13);
        // Reconstruct.
        for i in 0..2 {
            for j in 0..2 {
                let mut s = Complex64::new(0.0, 0.0);
                for k in 0..2 {
                    s += v[i * 2 + k] * vals[k] * v[j * 2 + k].conj();
                }
                assert!((s - a[i * 2 + j]).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn herm_unitary_columns() {
        let a = vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(0.5, 0.25),
            Complex64::new(-0.5, 1.0),
            Complex64::new(0.5, -0.25),
            Complex64::new(-2.0, 0.0),
            Complex64::new(0.0, 0.75),
            Complex64::new(-0.5, -1.0),
            Complex64::new(0.0, -0.75),
            Complex64::new(0.5, 0.0),
        ];
        let (_, v) = herm_eigen(&a, 3);
        for c1 in 0..3 {
            for c2 in 0..3 {
                let mut s = Complex64::new(0.0, 0.0);
                for i in 0..3 {
                    s += v[i * 3 + c1].conj() * v[i * 3 + c2];
                }
                let want = if c1 == c2 { 1.0 } else { 0.0 };
                assert!((s - want).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn det_simple() {
        let a = vec![2.0, 1.0, 0.0, 1.0];
        assert!((det_lu(&a, 2) - 2.0).abs() < 1e-15);
        let rot = vec![0.0, -1.0, 1.0, 0.0];
        assert!((det_lu(&rot, 2) - 1.0).abs() < 1e-15);
        let sing = vec![1.0, 2.0, 2.0, 4.0];
        assert_eq!(det_lu(&sing, 2), 0.0);
    }
}
