//! Cyclic Jacobi eigenvalue iteration for small real symmetric matrices.
//!
//! Used only as an independent check on the adiabatic elimination, so it
//! favours robustness over speed. Updates use the Rutishauser form
//! `a_pp -= t·a_pq`, which keeps small eigenvalues of graded matrices
//! (tiny shifts next to a huge detuning) accurate relative to their own size.

/// Hard cap on sweeps; convergence is quadratic and typically needs < 10.
const MAX_SWEEPS: usize = 64;

/// Frobenius norm of the strictly off-diagonal part.
fn off_norm<const N: usize>(a: &[[f64; N]; N]) -> f64 {
    let mut s = 0.0;
    for (i, row) in a.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            if i != j {
                s += v * v;
            }
        }
    }
    s.sqrt()
}

fn frobenius<const N: usize>(a: &[[f64; N]; N]) -> f64 {
    a.iter().flatten().map(|v| v * v).sum::<f64>().sqrt()
}

/// Eigenvalues of a real symmetric matrix in ascending order.
///
/// Sweeps until the off-diagonal norm drops below `tol · ‖A‖_F`. Only the
/// upper triangle is trusted; the input is symmetrised first.
pub fn symmetric_eigenvalues<const N: usize>(mut a: [[f64; N]; N], tol: f64) -> [f64; N] {
    for i in 0..N {
        for j in (i + 1)..N {
            a[j][i] = a[i][j];
        }
    }
    let scale = frobenius(&a);
    if scale == 0.0 {
        return [0.0; N];
    }
    for _ in 0..MAX_SWEEPS {
        if off_norm(&a) <= tol * scale {
            break;
        }
        for p in 0..N {
            for q in (p + 1)..N {
                rotate(&mut a, p, q);
            }
        }
    }
    let mut d = [0.0; N];
    for (i, v) in d.iter_mut().enumerate() {
        *v = a[i][i];
    }
    d.sort_by(f64::total_cmp);
    d
}

/// One Jacobi rotation annihilating a[p][q].
fn rotate<const N: usize>(a: &mut [[f64; N]; N], p: usize, q: usize) {
    let apq = a[p][q];
    if apq == 0.0 {
        return;
    }
    let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        theta.signum() / (theta.abs() + (1.0 + theta * theta).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let tau = s / (1.0 + c);

    a[p][p] -= t * apq;
    a[q][q] += t * apq;
    a[p][q] = 0.0;
    a[q][p] = 0.0;
    for r in 0..N {
        if r == p || r == q {
            continue;
        }
        let arp = a[r][p];
        let arq = a[r][q];
        let new_rp = arp - s * (arq + tau * arp);
        let new_rq = arq + s * (arp - tau * arq);
        a[r][p] = new_rp;
        a[p][r] = new_rp;
        a[r][q] = new_rq;
        a[q][r] = new_rq;
    }
}
