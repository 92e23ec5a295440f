//! Minimal 3x3 linear algebra for the quadratic regressions.

pub type Mat3 = [[f64; 3]; 3];

/// Solve A x = b by Gaussian elimination with partial pivoting.
/// Returns None when A is numerically singular.
#[allow(clippy::needless_range_loop)] // elimination reads two rows of `m` at once
pub fn solve3(a: &Mat3, b: &[f64; 3]) -> Option<[f64; 3]> {
    let mut m = [[0.0f64; 4]; 3];
    for i in 0..3 {
        m[i][..3].copy_from_slice(&a[i]);
        m[i][3] = b[i];
    }
    for col in 0..3 {
        let pivot = (col..3).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[pivot][col].abs() < 1e-300 {
            return None;
        }
        m.swap(col, pivot);
        for row in col + 1..3 {
            let f = m[row][col] / m[col][col];
            for k in col..4 {
                m[row][k] -= f * m[col][k];
            }
        }
    }
    let mut x = [0.0f64; 3];
    for i in (0..3).rev() {
        let mut s = m[i][3];
        for k in i + 1..3 {
            s -= m[i][k] * x[k];
        }
        x[i] = s / m[i][i];
        if !x[i].is_finite() {
            return None;
        }
    }
    Some(x)
}

/// Inverse of a 3x3 matrix, computed column by column through `solve3`.
pub fn inv3(a: &Mat3) -> Option<Mat3> {
    let mut out = [[0.0f64; 3]; 3];
    for col in 0..3 {
        let mut e = [0.0f64; 3];
        e[col] = 1.0;
        let x = solve3(a, &e)?;
        for row in 0..3 {
            out[row][col] = x[row];
        }
    }
    Some(out)
}
