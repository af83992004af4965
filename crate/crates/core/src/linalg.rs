//! Fixed-capacity dense linear algebra for chart-sized matrices.

use crate::exprdsl::Jet2;

/// Largest supported chart dimension.
pub const MAX_DIM: usize = 4;

pub type Vector = [f64; MAX_DIM];
pub type Mat = [[f64; MAX_DIM]; MAX_DIM];

pub const ZERO_MAT: Mat = [[0.0; MAX_DIM]; MAX_DIM];

pub fn to_rows(m: &Mat, n: usize) -> Vec<Vec<f64>> {
    (0..n).map(|i| m[i][..n].to_vec()).collect()
}

/// Determinant by LU with partial pivoting.
pub fn det(a: &Mat, n: usize) -> f64 {
    let mut m = *a;
    let mut d = 1.0;
    for k in 0..n {
        let p = (k..n).max_by(|&x, &y| m[x][k].abs().total_cmp(&m[y][k].abs())).unwrap();
        if m[p][k] == 0.0 {
            return 0.0;
        }
        if p != k {
            m.swap(p, k);
            d = -d;
        }
        d *= m[k][k];
        for r in k + 1..n {
            let f = m[r][k] / m[k][k];
            for c in k + 1..n {
                m[r][c] -= f * m[k][c];
            }
        }
    }
    d
}

/// Gauss-Jordan inverse with partial pivoting; `None` when a pivot vanishes.
pub fn inverse(a: &Mat, n: usize) -> Option<Mat> {
    let mut m = *a;
    let mut inv = ZERO_MAT;
    for (i, row) in inv.iter_mut().enumerate().take(n) {
        row[i] = 1.0;
    }
    for k in 0..n {
        let p = (k..n).max_by(|&x, &y| m[x][k].abs().total_cmp(&m[y][k].abs())).unwrap();
        if m[p][k] == 0.0 {
            return None;
        }
        m.swap(p, k);
        inv.swap(p, k);
        let pivot = m[k][k];
        for c in 0..n {
            m[k][c] /= pivot;
            inv[k][c] /= pivot;
        }
        for r in 0..n {
            if r != k {
                let f = m[r][k];
                if f != 0.0 {
                    for c in 0..n {
                        m[r][c] -= f * m[k][c];
                        inv[r][c] -= f * inv[k][c];
                    }
                }
            }
        }
    }
    Some(inv)
}

/// Counts of positive, negative and (numerically) zero eigenvalues of a
/// symmetric matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Inertia {
    pub positive: usize,
    pub negative: usize,
    pub zero: usize,
}

/// Inertia by symmetric (Bunch-Parlett) elimination. Congruence preserves
/// inertia, so no eigenvalues are computed.
pub fn inertia(a: &Mat, n: usize) -> Inertia {
    const ALPHA: f64 = 0.6404; // (1 + sqrt(17)) / 8
    let scale = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).fold(0.0f64, |s, (i, j)| s.max(a[i][j].abs()));
    let tiny = 1e-13 * scale.max(f64::MIN_POSITIVE);
    let mut m = *a;
    let mut active: Vec<usize> = (0..n).collect();
    let mut out = Inertia { positive: 0, negative: 0, zero: 0 };
    while !active.is_empty() {
        let (di, dmax) =
            active.iter().map(|&i| (i, m[i][i].abs())).fold((active[0], -1.0), |b, c| if c.1 > b.1 { c } else { b });
        let mut off = (0, 0, 0.0f64);
        for (x, &i) in active.iter().enumerate() {
            for &j in &active[x + 1..] {
                if m[i][j].abs() > off.2 {
                    off = (i, j, m[i][j].abs());
                }
            }
        }
        if dmax <= tiny && off.2 <= tiny {
            out.zero += active.len();
            break;
        }
        if dmax >= ALPHA * off.2 {
            let p = m[di][di];
            if p > 0.0 {
                out.positive += 1;
            } else {
                out.negative += 1;
            }
            active.retain(|&i| i != di);
            for &r in &active {
                for &c in &active {
                    m[r][c] -= m[r][di] * m[di][c] / p;
                }
            }
        } else {
            // 2x2 pivot with negative determinant: one eigenvalue of each sign.
            let (i, j, _) = off;
            let (a11, a12, a22) = (m[i][i], m[i][j], m[j][j]);
            let d = a11 * a22 - a12 * a12;
            out.positive += 1;
            out.negative += 1;
            active.retain(|&k| k != i && k != j);
            let snapshot = m;
            for &r in &active {
                for &c in &active {
                    let (ri, rj) = (snapshot[r][i], snapshot[r][j]);
                    let (ic, jc) = (snapshot[i][c], snapshot[j][c]);
                    // [ri rj] B^{-1} [ic jc]^T with B^{-1} = [[a22,-a12],[-a12,a11]]/d
                    m[r][c] -= (ri * (a22 * ic - a12 * jc) + rj * (-a12 * ic + a11 * jc)) / d;
                }
            }
        }
    }
    out
}

/// Determinant of a matrix of jets by elimination with partial pivoting on
/// the values; the result carries exact first and second derivatives.
pub fn jet_det(a: &[[Jet2; MAX_DIM]; MAX_DIM], n: usize) -> Jet2 {
    let dim = a[0][0].dim();
    let mut m = *a;
    let mut d = Jet2::constant(dim, 1.0);
    let mut negate = false;
    for k in 0..n {
        let p = (k..n).max_by(|&x, &y| m[x][k].value().abs().total_cmp(&m[y][k].value().abs())).unwrap();
        if m[p][k].value() == 0.0 {
            return Jet2::constant(dim, 0.0);
        }
        if p != k {
            m.swap(p, k);
            negate = !negate;
        }
        d = d * m[k][k];
        let mut inv = None;
        for r in k + 1..n {
            if m[r][k].value() == 0.0 && m[r][k].is_constant() {
                continue;
            }
            let f = m[r][k] * *inv.get_or_insert_with(|| m[k][k].recip());
            for c in k + 1..n {
                m[r][c] = m[r][c] - f * m[k][c];
            }
        }
    }
    if negate {
        -d
    } else {
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: &[&[f64]]) -> Mat {
        let mut m = ZERO_MAT;
        for (i, r) in rows.iter().enumerate() {
            m[i][..r.len()].copy_from_slice(r);
        }
        m
    }

    #[test]
    fn determinant_and_inverse() {
        let a = mat(&[&[0.0, 2.0, 1.0], &[1.0, 1.0, 0.0], &[3.0, 0.0, 1.0]]);
        assert!((det(&a, 3) - (-5.0)).abs() < 1e-14);
        let inv = inverse(&a, 3).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let s: f64 = (0..3).map(|k| inv[i][k] * a[k][j]).sum();
                assert!((s - if i == j { 1.0 } else { 0.0 }).abs() < 1e-14);
            }
        }
        assert!(inverse(&mat(&[&[1.0, 2.0], &[2.0, 4.0]]), 2).is_none());
    }

    #[test]
    fn inertia_of_lorentzian_and_null_forms() {
        let mink = mat(&[&[-1.0, 0.0, 0.0, 0.0], &[0.0, 1.0, 0.0, 0.0], &[0.0, 0.0, 1.0, 0.0], &[0.0, 0.0, 0.0, 1.0]]);
        assert_eq!(inertia(&mink, 4), Inertia { positive: 3, negative: 1, zero: 0 });
        // null coordinates: zero diagonal forces a 2x2 pivot
        let null = mat(&[&[0.0, 1.0, 0.0], &[1.0, 0.0, 0.0], &[0.0, 0.0, 2.0]]);
        assert_eq!(inertia(&null, 3), Inertia { positive: 2, negative: 1, zero: 0 });
        let degenerate = mat(&[&[1.0, 1.0], &[1.0, 1.0]]);
        assert_eq!(inertia(&degenerate, 2), Inertia { positive: 1, negative: 0, zero: 1 });
        let three_negative =
            mat(&[&[-1.0, 0.0, 0.0, 0.0], &[0.0, -2.0, 0.0, 0.0], &[0.0, 0.0, -1.0, 0.0], &[0.0, 0.0, 0.0, 1.0]]);
        assert_eq!(inertia(&three_negative, 4).negative, 3);
    }

    #[test]
    fn jet_determinant_matches_hand_derivative() {
        // det [[x, y], [y, x]] = x^2 - y^2 at (2, 1)
        let x = Jet2::variable(2, 0, 2.0);
        let y = Jet2::variable(2, 1, 1.0);
        let z = Jet2::constant(2, 0.0);
        let mut a = [[z; MAX_DIM]; MAX_DIM];
        a[0][0] = x;
        a[0][1] = y;
        a[1][0] = y;
        a[1][1] = x;
        let d = jet_det(&a, 2);
        assert!((d.value() - 3.0).abs() < 1e-14);
        assert!((d.d(0) - 4.0).abs() < 1e-14 && (d.d(1) + 2.0).abs() < 1e-14);
        assert!((d.dd(0, 0) - 2.0).abs() < 1e-14 && (d.dd(1, 1) + 2.0).abs() < 1e-14);
        assert!(d.dd(0, 1).abs() < 1e-14);
    }
}
