//! Integer and rational polynomial helpers backing the ground field:
//! cyclotomic polynomials, the z + 1/z folding that produces minimal
//! polynomials of 2cos(pi/L), and Sturm chains for exact root isolation.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Polynomials are coefficient vectors, lowest degree first, with no
/// trailing zeros (the zero polynomial is the empty vector).
pub type IntPoly = Vec<BigInt>;
pub type RatPoly = Vec<BigRational>;

pub fn trim_int(mut p: IntPoly) -> IntPoly {
    while p.last().map_or(false, |c| c.is_zero()) {
        p.pop();
    }
    p
}

pub fn trim_rat(mut p: RatPoly) -> RatPoly {
    while p.last().map_or(false, |c| c.is_zero()) {
        p.pop();
    }
    p
}

pub fn int_mul(a: &[BigInt], b: &[BigInt]) -> IntPoly {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            out[i + j] += ai * bj;
        }
    }
    trim_int(out)
}

/// Exact division of integer polynomials; panics if the division leaves a
/// remainder (callers only divide known factors out of z^n - 1).
pub fn int_div_exact(num: &[BigInt], den: &[BigInt]) -> IntPoly {
    let mut rem: Vec<BigInt> = num.to_vec();
    let dd = den.len() - 1;
    let lead = den.last().expect("nonzero divisor");
    let mut quot = vec![BigInt::zero(); rem.len().saturating_sub(dd)];
    while rem.len() > dd {
        let k = rem.len() - 1 - dd;
        let c = rem.last().unwrap() / lead;
        assert!(
            (&c * lead) == *rem.last().unwrap(),
            "non-exact polynomial division"
        );
        for (i, d) in den.iter().enumerate() {
            let t = &c * d;
            rem[k + i] -= t;
        }
        quot[k] = c;
        rem = trim_int(rem);
        if rem.is_empty() {
            break;
        }
    }
    assert!(rem.is_empty(), "non-exact polynomial division: remainder left");
    trim_int(quot)
}

/// n-th cyclotomic polynomial, computed by dividing z^n - 1 by the
/// cyclotomic polynomials of all proper divisors of n.
pub fn cyclotomic(n: u32) -> IntPoly {
    let mut cache: Vec<Option<IntPoly>> = vec![None; (n + 1) as usize];
    for m in 1..=n {
        let mut num = vec![BigInt::zero(); (m + 1) as usize];
        num[0] = -BigInt::one();
        num[m as usize] = BigInt::one();
        let mut p = num;
        for d in 1..m {
            if m % d == 0 {
                let phi_d = cache[d as usize].clone().unwrap();
                p = int_div_exact(&p, &phi_d);
            }
        }
        cache[m as usize] = Some(p);
    }
    cache[n as usize].clone().unwrap()
}

pub fn euler_phi(n: u32) -> u32 {
    let mut result = n;
    let mut m = n;
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            while m % p == 0 {
                m /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if m > 1 {
        result -= result / m;
    }
    result
}

/// Given a palindromic polynomial `phi` of even degree 2d, return the unique
/// g of degree d with phi(z) = z^d * g(z + 1/z).
pub fn fold_palindrome(phi: &[BigInt]) -> IntPoly {
    let deg = phi.len() - 1;
    assert!(deg % 2 == 0, "palindrome of odd degree");
    let d = deg / 2;
    for k in 0..=deg {
        assert_eq!(phi[k], phi[deg - k], "polynomial is not palindromic");
    }
    let mut rem: Vec<BigInt> = phi.to_vec();
    let mut g = vec![BigInt::zero(); d + 1];
    for k in (0..=d).rev() {
        let c = rem[d + k].clone();
        g[k] = c.clone();
        if c.is_zero() {
            continue;
        }
        // subtract c * z^(d-k) * (z^2 + 1)^k
        let mut binom = BigInt::one();
        for j in 0..=k {
            // C(k, j) * z^(d - k + 2j)
            rem[d - k + 2 * j] -= &c * &binom;
            binom = &binom * BigInt::from((k - j) as u64) / BigInt::from((j + 1) as u64);
        }
    }
    assert!(
        rem.iter().all(|c| c.is_zero()),
        "palindrome folding left a remainder"
    );
    trim_int(g)
}

pub fn to_rat(p: &[BigInt]) -> RatPoly {
    p.iter()
        .map(|c| BigRational::from_integer(c.clone()))
        .collect()
}

pub fn rat_eval(p: &[BigRational], x: &BigRational) -> BigRational {
    let mut acc = BigRational::zero();
    for c in p.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

pub fn rat_derivative(p: &[BigRational]) -> RatPoly {
    if p.len() <= 1 {
        return vec![];
    }
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * BigRational::from_integer(BigInt::from(i as u64)))
        .collect()
}

fn rat_rem(num: &[BigRational], den: &[BigRational]) -> RatPoly {
    let mut rem: Vec<BigRational> = num.to_vec();
    let dd = den.len() - 1;
    let lead = den.last().unwrap();
    while rem.len() > dd {
        let k = rem.len() - 1 - dd;
        let c = rem.last().unwrap() / lead;
        for (i, d) in den.iter().enumerate() {
            let t = &c * d;
            rem[k + i] -= t;
        }
        rem = trim_rat(rem);
        if rem.is_empty() {
            break;
        }
    }
    rem
}

/// Sturm chain of a squarefree polynomial.
pub fn sturm_chain(p: &[BigRational]) -> Vec<RatPoly> {
    let mut chain = vec![trim_rat(p.to_vec()), rat_derivative(p)];
    loop {
        let n = chain.len();
        if chain[n - 1].is_empty() {
            chain.pop();
            break;
        }
        if chain[n - 1].len() == 1 {
            break;
        }
        let r = rat_rem(&chain[n - 2], &chain[n - 1]);
        let neg: RatPoly = r.iter().map(|c| -c).collect();
        chain.push(neg);
    }
    chain
}

fn sign_variations(chain: &[RatPoly], x: &BigRational) -> usize {
    let mut count = 0;
    let mut last: Option<bool> = None; // sign as is_positive
    for p in chain {
        let v = rat_eval(p, x);
        if v.is_zero() {
            continue;
        }
        let s = v.is_positive();
        if let Some(prev) = last {
            if prev != s {
                count += 1;
            }
        }
        last = Some(s);
    }
    count
}

/// Number of distinct real roots in the half-open interval (a, b].
pub fn count_roots(chain: &[RatPoly], a: &BigRational, b: &BigRational) -> isize {
    sign_variations(chain, a) as isize - sign_variations(chain, b) as isize
}

/// Extended Euclid in Q[x]: returns u with u * f = 1 (mod g), for f coprime
/// to g. Used to invert nonzero field elements modulo the minimal polynomial.
pub fn invert_mod(f: &[BigRational], g: &[BigRational]) -> Option<RatPoly> {
    // Maintain r0 = g, r1 = f with u0 = 0, u1 = 1 so that u_i * f = r_i (mod g).
    let mut r0 = trim_rat(g.to_vec());
    let mut r1 = trim_rat(f.to_vec());
    let mut u0: RatPoly = vec![];
    let mut u1: RatPoly = vec![BigRational::one()];
    while !r1.is_empty() {
        let (q, r) = rat_divmod(&r0, &r1);
        let uq = rat_mul(&q, &u1);
        let u2 = rat_sub(&u0, &uq);
        r0 = r1;
        r1 = r;
        u0 = u1;
        u1 = u2;
    }
    if r0.len() != 1 {
        return None; // gcd not constant: f and g share a factor
    }
    let c = r0[0].clone();
    Some(u0.into_iter().map(|x| x / &c).collect())
}

pub fn rat_mul(a: &[BigRational], b: &[BigRational]) -> RatPoly {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            out[i + j] += ai * bj;
        }
    }
    trim_rat(out)
}

pub fn rat_sub(a: &[BigRational], b: &[BigRational]) -> RatPoly {
    let n = a.len().max(b.len());
    let mut out = vec![BigRational::zero(); n];
    for (i, c) in a.iter().enumerate() {
        out[i] += c;
    }
    for (i, c) in b.iter().enumerate() {
        out[i] -= c;
    }
    trim_rat(out)
}

fn rat_divmod(num: &[BigRational], den: &[BigRational]) -> (RatPoly, RatPoly) {
    let mut rem: Vec<BigRational> = num.to_vec();
    let dd = den.len() - 1;
    let lead = den.last().unwrap();
    let mut quot = vec![BigRational::zero(); rem.len().saturating_sub(dd)];
    while rem.len() > dd {
        let k = rem.len() - 1 - dd;
        let c = rem.last().unwrap() / lead;
        for (i, d) in den.iter().enumerate() {
            let t = &c * d;
            rem[k + i] -= t;
        }
        quot[k] = c;
        rem = trim_rat(rem);
        if rem.is_empty() {
            break;
        }
    }
    (trim_rat(quot), rem)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn cyclotomic_small_cases() {
        assert_eq!(cyclotomic(1), vec![int(-1), int(1)]);
        assert_eq!(cyclotomic(2), vec![int(1), int(1)]);
        assert_eq!(cyclotomic(4), vec![int(1), int(0), int(1)]);
        assert_eq!(cyclotomic(6), vec![int(1), int(-1), int(1)]);
        // Phi_8 = z^4 + 1
        assert_eq!(cyclotomic(8), vec![int(1), int(0), int(0), int(0), int(1)]);
        assert_eq!(cyclotomic(12), vec![int(1), int(0), int(-1), int(0), int(1)]);
    }

    #[test]
    fn fold_produces_minpoly_of_two_cos() {
        // Phi_8 folds to y^2 - 2, the minimal polynomial of 2cos(pi/4).
        assert_eq!(fold_palindrome(&cyclotomic(8)), vec![int(-2), int(0), int(1)]);
        // Phi_12 folds to y^2 - 3 (2cos(pi/6) = sqrt 3).
        assert_eq!(fold_palindrome(&cyclotomic(12)), vec![int(-3), int(0), int(1)]);
        // Phi_24 folds to y^4 - 4y^2 + 1 (2cos(pi/12)).
        assert_eq!(
            fold_palindrome(&cyclotomic(24)),
            vec![int(1), int(0), int(-4), int(0), int(1)]
        );
    }

    #[test]
    fn sturm_counts_roots_of_folded_cyclotomic() {
        // y^4 - 4y^2 + 1 has four real roots, all in (-2, 2).
        let g = to_rat(&fold_palindrome(&cyclotomic(24)));
        let chain = sturm_chain(&g);
        let a = BigRational::from_integer(int(-3));
        let b = BigRational::from_integer(int(3));
        assert_eq!(count_roots(&chain, &a, &b), 4);
        // Exactly one above 3/2 (namely 2cos(pi/12) ~ 1.93).
        let m = BigRational::new(int(3), int(2));
        assert_eq!(count_roots(&chain, &m, &b), 1);
    }

    #[test]
    fn invert_mod_inverts() {
        // In Q[y]/(y^2 - 2): (y - 1)^-1 = y + 1.
        let g = to_rat(&[int(-2), int(0), int(1)]);
        let f = to_rat(&[int(-1), int(1)]);
        let inv = invert_mod(&f, &g).unwrap();
        assert_eq!(inv, to_rat(&[int(1), int(1)]));
    }
}
