//! Exact 3x3 linear algebra over the ground field: products, determinants,
//! ranks, kernels, solves, and the Lorentzian cross product used to
//! intersect reflection lines.

use crate::error::{CoxError, Result};
use crate::field::{FieldElement, FieldSpec, Sign};
use std::sync::Arc;

pub type Vec3 = [FieldElement; 3];
pub type Mat3 = [[FieldElement; 3]; 3];

pub fn zero_vec(spec: &Arc<FieldSpec>) -> Vec3 {
    [
        FieldElement::zero(spec),
        FieldElement::zero(spec),
        FieldElement::zero(spec),
    ]
}

pub fn identity(spec: &Arc<FieldSpec>) -> Mat3 {
    let mut m = [
        [
            FieldElement::zero(spec),
            FieldElement::zero(spec),
            FieldElement::zero(spec),
        ],
        [
            FieldElement::zero(spec),
            FieldElement::zero(spec),
            FieldElement::zero(spec),
        ],
        [
            FieldElement::zero(spec),
            FieldElement::zero(spec),
            FieldElement::zero(spec),
        ],
    ];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = FieldElement::one(spec);
    }
    m
}

pub fn mat_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let spec = a[0][0].spec().clone();
    let mut out = identity(&spec);
    for i in 0..3 {
        for j in 0..3 {
            let mut acc = FieldElement::zero(&spec);
            for (k, bk) in b.iter().enumerate() {
                acc = &acc + &(&a[i][k] * &bk[j]);
            }
            out[i][j] = acc;
        }
    }
    out
}

pub fn mat_vec(a: &Mat3, v: &Vec3) -> Vec3 {
    let spec = v[0].spec().clone();
    let mut out = zero_vec(&spec);
    for i in 0..3 {
        let mut acc = FieldElement::zero(&spec);
        for (k, vk) in v.iter().enumerate() {
            acc = &acc + &(&a[i][k] * vk);
        }
        out[i] = acc;
    }
    out
}

pub fn mat_sub(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut out = a.clone();
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = &a[i][j] - &b[i][j];
        }
    }
    out
}

pub fn transpose(a: &Mat3) -> Mat3 {
    let mut out = a.clone();
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = a[j][i].clone();
        }
    }
    out
}

pub fn det(a: &Mat3) -> FieldElement {
    let m = |i: usize, j: usize| &a[i][j];
    let t1 = &(m(0, 0) * &(&(m(1, 1) * m(2, 2)) - &(m(1, 2) * m(2, 1))));
    let t2 = &(m(0, 1) * &(&(m(1, 0) * m(2, 2)) - &(m(1, 2) * m(2, 0))));
    let t3 = &(m(0, 2) * &(&(m(1, 0) * m(2, 1)) - &(m(1, 1) * m(2, 0))));
    &(t1 - t2) + t3
}

pub fn vec_add(a: &Vec3, b: &Vec3) -> Vec3 {
    [&a[0] + &b[0], &a[1] + &b[1], &a[2] + &b[2]]
}

pub fn vec_sub(a: &Vec3, b: &Vec3) -> Vec3 {
    [&a[0] - &b[0], &a[1] - &b[1], &a[2] - &b[2]]
}

pub fn vec_scale(c: &FieldElement, v: &Vec3) -> Vec3 {
    [c * &v[0], c * &v[1], c * &v[2]]
}

pub fn vec_neg(v: &Vec3) -> Vec3 {
    [-&v[0], -&v[1], -&v[2]]
}

pub fn vec_is_zero(v: &Vec3) -> bool {
    v.iter().all(|c| c.is_zero())
}

/// Rank of a list of row vectors, by minors (division-free).
pub fn rank(rows: &[Vec3]) -> usize {
    let nonzero: Vec<&Vec3> = rows.iter().filter(|r| !vec_is_zero(r)).collect();
    if nonzero.is_empty() {
        return 0;
    }
    // rank >= 2 iff some pair of rows is independent
    let mut witness_pair = None;
    'outer: for i in 0..nonzero.len() {
        for j in (i + 1)..nonzero.len() {
            if !vec_is_zero(&euclid_cross(nonzero[i], nonzero[j])) {
                witness_pair = Some((i, j));
                break 'outer;
            }
        }
    }
    let Some((i, j)) = witness_pair else {
        return 1;
    };
    // rank 3 iff some third row leaves the plane spanned by the pair
    let normal = euclid_cross(nonzero[i], nonzero[j]);
    for (k, row) in nonzero.iter().enumerate() {
        if k == i || k == j {
            continue;
        }
        let mut dot = FieldElement::zero(row[0].spec());
        for c in 0..3 {
            dot = &dot + &(&normal[c] * &row[c]);
        }
        if !dot.is_zero() {
            return 3;
        }
    }
    2
}

pub fn mat_rank(a: &Mat3) -> usize {
    rank(&[a[0].clone(), a[1].clone(), a[2].clone()])
}

/// Spanning vector of the kernel of a rank-two matrix: the cross product of
/// two independent rows (division-free).
pub fn kernel_of_rank_two(a: &Mat3) -> Option<Vec3> {
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        let c = euclid_cross(&a[i], &a[j]);
        if !vec_is_zero(&c) {
            return Some(c);
        }
    }
    None
}

/// Basis of the kernel of a matrix (solutions of a x = 0).
pub fn kernel(a: &Mat3) -> Vec<Vec3> {
    let spec = a[0][0].spec().clone();
    let mut rows: Vec<Vec3> = vec![a[0].clone(), a[1].clone(), a[2].clone()];
    // reduced row echelon
    let mut pivots: Vec<usize> = vec![];
    let mut r = 0;
    for col in 0..3 {
        let pivot = (r..rows.len()).find(|&i| !rows[i][col].is_zero());
        let Some(p) = pivot else { continue };
        rows.swap(r, p);
        let inv = FieldElement::one(&spec).div(&rows[r][col]).unwrap();
        for c in 0..3 {
            rows[r][c] = &rows[r][c] * &inv;
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && !row[col].is_zero() {
                let factor = row[col].clone();
                for c in 0..3 {
                    row[c] = &row[c] - &(&factor * &pivot_row[c]);
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    let mut basis = vec![];
    for free in 0..3 {
        if pivots.contains(&free) {
            continue;
        }
        let mut v = zero_vec(&spec);
        v[free] = FieldElement::one(&spec);
        for (ri, &pc) in pivots.iter().enumerate() {
            v[pc] = -&rows[ri][free];
        }
        basis.push(v);
    }
    basis
}

/// Adjugate matrix: adj(a) * a = det(a) * id, division-free.
pub fn adjugate(a: &Mat3) -> Mat3 {
    let m = |i: usize, j: usize| &a[i][j];
    let cof = |i: usize, j: usize| {
        let (r1, r2) = match i {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        };
        let (c1, c2) = match j {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        };
        let minor = &(m(r1, c1) * m(r2, c2)) - &(m(r1, c2) * m(r2, c1));
        if (i + j) % 2 == 0 {
            minor
        } else {
            -&minor
        }
    };
    let mut out = a.clone();
    for i in 0..3 {
        for j in 0..3 {
            // adjugate = transpose of the cofactor matrix
            out[i][j] = cof(j, i);
        }
    }
    out
}

/// Solve a x = b for invertible a, by Cramer's rule.
pub fn solve(a: &Mat3, b: &Vec3) -> Result<Vec3> {
    let d = det(a);
    if d.is_zero() {
        return Err(CoxError::InvariantViolation(
            "singular system in exact solve".into(),
        ));
    }
    let mut out = zero_vec(&b[0].spec().clone());
    for j in 0..3 {
        let mut aj = a.clone();
        for i in 0..3 {
            aj[i][j] = b[i].clone();
        }
        out[j] = det(&aj).div(&d)?;
    }
    Ok(out)
}

/// Euclidean (coordinate) cross product; a building block for the
/// Lorentzian one below.
pub fn euclid_cross(u: &Vec3, v: &Vec3) -> Vec3 {
    [
        &(&u[1] * &v[2]) - &(&u[2] * &v[1]),
        &(&u[2] * &v[0]) - &(&u[0] * &v[2]),
        &(&u[0] * &v[1]) - &(&u[1] * &v[0]),
    ]
}

/// Cross product adapted to a bilinear form B: the vector x with
/// B(x, z) = det(u, v, z) for all z, i.e. x = B^-1 (u x v).
pub fn cross_b(bform: &Mat3, u: &Vec3, v: &Vec3) -> Result<Vec3> {
    solve(bform, &euclid_cross(u, v))
}

/// Evaluate the bilinear form: u^T B v.
pub fn bilinear(bform: &Mat3, u: &Vec3, v: &Vec3) -> FieldElement {
    let bv = mat_vec(bform, v);
    let spec = u[0].spec().clone();
    let mut acc = FieldElement::zero(&spec);
    for i in 0..3 {
        acc = &acc + &(&u[i] * &bv[i]);
    }
    acc
}

/// Scale a projective vector to a canonical representative: first nonzero
/// coordinate equal to 1. Used to deduplicate projective points exactly.
pub fn projective_normalize(v: &Vec3) -> Vec3 {
    let lead = v.iter().find(|c| !c.is_zero());
    match lead {
        None => v.clone(),
        Some(c) => {
            let inv = FieldElement::one(c.spec()).div(c).unwrap();
            vec_scale(&inv, v)
        }
    }
}

/// True if u and v span the same line (are proportional).
pub fn proportional(u: &Vec3, v: &Vec3) -> bool {
    euclid_cross(u, v).iter().all(|c| c.is_zero())
}

/// Sign of B(v, v).
pub fn norm_sign(bform: &Mat3, v: &Vec3) -> Sign {
    bilinear(bform, v, v).sign()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldSpec;

    fn setup() -> Arc<FieldSpec> {
        FieldSpec::new(4).unwrap()
    }

    fn fe(spec: &Arc<FieldSpec>, v: i64) -> FieldElement {
        FieldElement::from_int(spec, v)
    }

    #[test]
    fn rank_and_kernel() {
        let s = setup();
        let mut m = identity(&s);
        m[2][2] = FieldElement::zero(&s);
        assert_eq!(mat_rank(&m), 2);
        let k = kernel(&m);
        assert_eq!(k.len(), 1);
        assert!(proportional(&k[0], &[fe(&s, 0), fe(&s, 0), fe(&s, 1)]));
    }

    #[test]
    fn solve_roundtrip() {
        let s = setup();
        let g = FieldElement::gamma(&s);
        let m: Mat3 = [
            [fe(&s, 1), g.clone(), fe(&s, 0)],
            [fe(&s, 2), fe(&s, -1), fe(&s, 3)],
            [fe(&s, 0), fe(&s, 1), fe(&s, 1)],
        ];
        let b = [fe(&s, 5), g.clone(), fe(&s, -2)];
        let x = solve(&m, &b).unwrap();
        assert_eq!(mat_vec(&m, &x), b);
    }

    #[test]
    fn cross_b_is_b_orthogonal_to_its_arguments() {
        let s = setup();
        let g = FieldElement::gamma(&s);
        // any symmetric invertible form will do here
        let bform: Mat3 = [
            [fe(&s, 1), g.clone(), fe(&s, 0)],
            [g.clone(), fe(&s, 1), fe(&s, -1)],
            [fe(&s, 0), fe(&s, -1), fe(&s, -2)],
        ];
        let u = [fe(&s, 1), fe(&s, 2), fe(&s, 3)];
        let v = [fe(&s, -1), g.clone(), fe(&s, 0)];
        let x = cross_b(&bform, &u, &v).unwrap();
        assert!(bilinear(&bform, &x, &u).is_zero());
        assert!(bilinear(&bform, &x, &v).is_zero());
    }
}
