//! Integer and GF(2) linear algebra: kernels, Hermite forms, membership.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type IVec = Vec<BigInt>;

fn ext_gcd(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    let e = a.extended_gcd(b);
    (e.gcd, e.x, e.y)
}

/// Basis of `{x ∈ ℤⁿ : M x = 0}` by unimodular column reduction.
pub fn kernel_basis(rows: &[IVec], n: usize) -> Vec<IVec> {
    let mut m: Vec<IVec> = rows.to_vec();
    // u is n×n, stored column-major as u[col][row].
    let mut u: Vec<IVec> = (0..n)
        .map(|j| (0..n).map(|i| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect();
    let col_op = |m: &mut Vec<IVec>, u: &mut Vec<IVec>, p: usize, j: usize, c: [&BigInt; 4]| {
        // (col_p, col_j) <- (c0 col_p + c1 col_j, c2 col_p + c3 col_j)
        for r in m.iter_mut() {
            let (a, b) = (r[p].clone(), r[j].clone());
            r[p] = c[0] * &a + c[1] * &b;
            r[j] = c[2] * &a + c[3] * &b;
        }
        let (a, b) = (u[p].clone(), u[j].clone());
        u[p] = a.iter().zip(&b).map(|(x, y)| c[0] * x + c[1] * y).collect();
        u[j] = a.iter().zip(&b).map(|(x, y)| c[2] * x + c[3] * y).collect();
    };
    let mut p = 0;
    for i in 0..m.len() {
        if p == n {
            break;
        }
        for j in p + 1..n {
            if m[i][j].is_zero() {
                continue;
            }
            let (a, b) = (m[i][p].clone(), m[i][j].clone());
            let (g, x, y) = ext_gcd(&a, &b);
            let (ag, bg) = (&a / &g, &b / &g);
            let nb = -bg;
            col_op(&mut m, &mut u, p, j, [&x, &y, &nb, &ag]);
        }
        if !m[i][p].is_zero() {
            p += 1;
        }
    }
    u[p..].to_vec()
}

/// Row Hermite normal form of the lattice spanned by `vecs`.
pub fn hnf(vecs: &[IVec]) -> Vec<IVec> {
    let mut rows: Vec<IVec> = vecs.iter().filter(|v| v.iter().any(|x| !x.is_zero())).cloned().collect();
    if rows.is_empty() {
        return rows;
    }
    let d = rows[0].len();
    let mut r = 0;
    for c in 0..d {
        if r == rows.len() {
            break;
        }
        for i in r + 1..rows.len() {
            if rows[i][c].is_zero() {
                continue;
            }
            let (a, b) = (rows[r][c].clone(), rows[i][c].clone());
            let (g, x, y) = ext_gcd(&a, &b);
            let (ag, bg) = (&a / &g, &b / &g);
            let (ra, rb) = (rows[r].clone(), rows[i].clone());
            rows[r] = ra.iter().zip(&rb).map(|(p, q)| &x * p + &y * q).collect();
            rows[i] = ra.iter().zip(&rb).map(|(p, q)| -&bg * p + &ag * q).collect();
        }
        if rows[r][c].is_zero() {
            continue;
        }
        if rows[r][c].is_negative() {
            rows[r] = rows[r].iter().map(|x| -x).collect();
        }
        for i in 0..r {
            let q = rows[i][c].div_floor(&rows[r][c]);
            if !q.is_zero() {
                let rr = rows[r].clone();
                rows[i] = rows[i].iter().zip(&rr).map(|(p, s)| p - &q * s).collect();
            }
        }
        r += 1;
    }
    rows.truncate(r);
    rows.retain(|v| v.iter().any(|x| !x.is_zero()));
    rows
}

/// Membership of `v` in the lattice with Hermite basis `h`.
pub fn in_lattice(h: &[IVec], v: &[BigInt]) -> bool {
    let mut v = v.to_vec();
    for row in h {
        let c = match row.iter().position(|x| !x.is_zero()) {
            Some(c) => c,
            None => continue,
        };
        if v[..c].iter().any(|x| !x.is_zero()) {
            return false;
        }
        let (q, r) = v[c].div_rem(&row[c]);
        if !r.is_zero() {
            return false;
        }
        for (a, b) in v.iter_mut().zip(row) {
            *a -= &q * b;
        }
    }
    v.iter().all(|x| x.is_zero())
}

pub fn to_ivec(v: &[i64]) -> IVec {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

pub fn to_i64(v: &[BigInt]) -> Option<Vec<i64>> {
    v.iter().map(|x| x.to_i64()).collect()
}

/// Determinant by fraction-free elimination.
pub fn det_i64(a: &[Vec<i64>]) -> i64 {
    let n = a.len();
    let mut m: Vec<Vec<BigRational>> =
        a.iter().map(|r| r.iter().map(|&x| BigRational::from_integer(x.into())).collect()).collect();
    let mut det = BigRational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !m[i][c].is_zero()) else {
            return 0;
        };
        if p != c {
            m.swap(p, c);
            det = -det;
        }
        det *= m[c][c].clone();
        for i in c + 1..n {
            let f = &m[i][c] / &m[c][c];
            let pivot_row = m[c].clone();
            for (x, y) in m[i].iter_mut().zip(&pivot_row) {
                *x -= &f * y;
            }
        }
    }
    det.to_integer().to_i64().expect("determinant fits")
}

pub fn is_identity(a: &[Vec<i64>]) -> bool {
    a.iter().enumerate().all(|(i, r)| r.iter().enumerate().all(|(j, &x)| x == i64::from(i == j)))
}

pub fn mat_vec(m: &[Vec<i64>], v: &[i64]) -> Vec<i64> {
    m.iter().map(|r| r.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

pub fn mat_mul(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = b[0].len();
    a.iter()
        .map(|r| (0..n).map(|j| r.iter().enumerate().map(|(k, x)| x * b[k][j]).sum()).collect())
        .collect()
}

/// Inverse of a matrix with determinant ±1.
pub fn unimodular_inverse(a: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = a.len();
    let mut m: Vec<Vec<BigRational>> = a
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row: Vec<BigRational> = r.iter().map(|&x| BigRational::from_integer(x.into())).collect();
            row.extend((0..n).map(|j| BigRational::from_integer(BigInt::from(i64::from(i == j)))));
            row
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&i| !m[i][c].is_zero()).expect("invertible");
        m.swap(p, c);
        let piv = m[c][c].clone();
        for x in m[c].iter_mut() {
            *x /= piv.clone();
        }
        for i in 0..n {
            if i != c && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                let pr = m[c].clone();
                for (x, y) in m[i].iter_mut().zip(&pr) {
                    *x -= &f * y;
                }
            }
        }
    }
    m.iter()
        .map(|r| r[n..].iter().map(|x| x.to_integer().to_i64().expect("integral inverse")).collect())
        .collect()
}

/// `A` has no eigenvalue that is a root of unity, i.e. every nonzero
/// vector has an infinite orbit.
pub fn is_aperiodic(a: &[Vec<i64>]) -> bool {
    let n = a.len();
    // A root of unity of degree ≤ n has order k with φ(k) ≤ n, hence k ≤ 2n².
    let bound = (2 * n * n).max(6);
    let mut p = a.to_vec();
    for _ in 1..=bound {
        let mut q = p.clone();
        for (i, r) in q.iter_mut().enumerate() {
            r[i] -= 1;
        }
        if det_i64(&q) == 0 {
            return false;
        }
        p = mat_mul(&p, a);
    }
    true
}

// ----------------------------------------------------------------- GF(2)

/// Reduced row echelon basis over GF(2) of the span of `vecs`.
pub fn gf2_basis(vecs: &[Vec<bool>]) -> Vec<Vec<bool>> {
    let mut basis: Vec<Vec<bool>> = Vec::new();
    for v in vecs {
        let r = gf2_reduce(&basis, v);
        if let Some(p) = r.iter().position(|&b| b) {
            for b in basis.iter_mut() {
                if b[p] {
                    for (x, y) in b.iter_mut().zip(&r) {
                        *x ^= *y;
                    }
                }
            }
            basis.push(r);
        }
    }
    basis
}

/// Remainder of `v` modulo a reduced echelon basis.
pub fn gf2_reduce(basis: &[Vec<bool>], v: &[bool]) -> Vec<bool> {
    let mut r = v.to_vec();
    for b in basis {
        let p = b.iter().position(|&x| x).expect("nonzero basis row");
        if r[p] {
            for (x, y) in r.iter_mut().zip(b) {
                *x ^= *y;
            }
        }
    }
    r
}

/// Basis of `{x ∈ GF(2)ⁿ : M x = 0}`.
pub fn gf2_kernel(rows: &[Vec<bool>], n: usize) -> Vec<Vec<bool>> {
    let basis = gf2_basis(rows);
    let pivots: Vec<usize> = basis.iter().map(|b| b.iter().position(|&x| x).unwrap()).collect();
    (0..n)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut x = vec![false; n];
            x[free] = true;
            for (b, &p) in basis.iter().zip(&pivots) {
                x[p] = b[free];
            }
            x
        })
        .collect()
}
