//! Exact integer helpers shared across the crate: square roots, gcds,
//! extended gcd, factorization and the arithmetic functions built on it.
//!
//! Everything here is exact. Overflow aborts (the workspace enables
//! overflow checks in every profile) instead of wrapping.

/// Floor of the square root, exact for all `u128` inputs.
pub fn isqrt(n: u128) -> u128 {
    n.isqrt()
}

/// `Some(r)` when `n` is a perfect square with root `r`.
pub fn perfect_sqrt(n: i128) -> Option<i128> {
    if n < 0 {
        return None;
    }
    let r = isqrt(n as u128) as i128;
    (r * r == n).then_some(r)
}

pub fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = b;
        b = a % b;
        a = t;
    }
    a
}

pub fn gcd_i64(a: i64, b: i64) -> u64 {
    gcd_u64(a.unsigned_abs(), b.unsigned_abs())
}

pub fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = b;
        b = a % b;
        a = t;
    }
    a
}

pub fn gcd_i128(a: i128, b: i128) -> u128 {
    gcd_u128(a.unsigned_abs(), b.unsigned_abs())
}

/// gcd of three values, as used for primitivity of integer vectors.
pub fn gcd3_i64(a: i64, b: i64, c: i64) -> u64 {
    gcd_u64(gcd_i64(a, b), c.unsigned_abs())
}

pub fn gcd3_i128(a: i128, b: i128, c: i128) -> u128 {
    gcd_u128(gcd_i128(a, b), c.unsigned_abs())
}

pub fn is_primitive(v: &[i64; 3]) -> bool {
    gcd3_i64(v[0], v[1], v[2]) == 1
}

/// Extended gcd: returns `(g, x, y)` with `a*x + b*y = g = gcd(a,b) >= 0`.
pub fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i128, 0i128);
    let (mut old_t, mut t) = (0i128, 1i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    if old_r < 0 {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

/// Extended gcd for three values: `(g, x, y, z)` with `a*x + b*y + c*z = g`.
pub fn ext_gcd3(a: i128, b: i128, c: i128) -> (i128, i128, i128, i128) {
    let (g1, u, v) = ext_gcd(a, b);
    let (g2, p, q) = ext_gcd(g1, c);
    (g2, p * u, p * v, q)
}

/// Inverse of `a` modulo `n > 0`; requires `gcd(a, n) = 1`.
pub fn mod_inverse(a: i128, n: i128) -> Option<i128> {
    let (g, x, _) = ext_gcd(a.rem_euclid(n), n);
    (g == 1).then(|| x.rem_euclid(n))
}

/// Prime factorization by trial division, as `(prime, exponent)` pairs in
/// increasing prime order. Intended for inputs up to ~10^12 (divisors of
/// discriminants at desk scale).
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// All positive divisors of `n >= 1`, sorted increasing.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut out = vec![1u64];
    for (p, e) in factorize(n) {
        let prev = out.clone();
        let mut pk = 1u64;
        for _ in 0..e {
            pk *= p;
            out.extend(prev.iter().map(|d| d * pk));
        }
    }
    out.sort_unstable();
    out
}

/// Möbius function.
pub fn moebius(n: u64) -> i64 {
    if n == 0 {
        return 0;
    }
    let f = factorize(n);
    if f.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Euler totient.
pub fn euler_phi(n: u64) -> u64 {
    let mut out = n;
    for (p, _) in factorize(n) {
        out = out / p * (p - 1);
    }
    out
}

/// p-adic valuation of `n != 0`.
pub fn valuation(mut n: u64, p: u64) -> u32 {
    assert!(n != 0 && p >= 2);
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn isqrt_exact_near_squares() {
        for n in 0u128..2000 {
            let r = isqrt(n);
            assert!(r * r <= n && (r + 1) * (r + 1) > n, "n = {n}");
        }
        let big = (1u128 << 100) - 1;
        let r = isqrt(big);
        assert!(r * r <= big && (r + 1) * (r + 1) > big);
    }

    #[test]
    fn ext_gcd_bezout() {
        for a in -30i128..=30 {
            for b in -30i128..=30 {
                let (g, x, y) = ext_gcd(a, b);
                assert_eq!(g, gcd_i128(a, b) as i128);
                assert_eq!(a * x + b * y, g);
            }
        }
    }

    #[test]
    fn ext_gcd3_bezout() {
        let cases = [(6, 10, 15), (0, 0, 7), (2, 3, 5), (-4, 6, -9)];
        for (a, b, c) in cases {
            let (g, x, y, z) = ext_gcd3(a, b, c);
            assert_eq!(a * x + b * y + c * z, g);
            assert_eq!(g, gcd_i128(gcd_i128(a, b) as i128, c) as i128);
        }
    }

    #[test]
    fn factorize_and_divisors() {
        assert_eq!(factorize(88), vec![(2, 3), (11, 1)]);
        assert_eq!(divisors(88), vec![1, 2, 4, 8, 11, 22, 44, 88]);
        assert_eq!(divisors(1), vec![1]);
    }

    #[test]
    fn moebius_values() {
        let expect = [0, 1, -1, -1, 0, -1, 1, -1, 0, 0, 1, -1, 0];
        for (n, &m) in expect.iter().enumerate().skip(1) {
            assert_eq!(moebius(n as u64), m, "n = {n}");
        }
    }

    #[test]
    fn mod_inverse_small() {
        for n in 2i128..60 {
            for a in 1..n {
                if gcd_i128(a, n) == 1 {
                    let inv = mod_inverse(a, n).unwrap();
                    assert_eq!((a * inv).rem_euclid(n), 1);
                } else {
                    assert!(mod_inverse(a, n).is_none());
                }
            }
        }
    }

    #[test]
    fn phi_and_valuation() {
        assert_eq!(euler_phi(1), 1);
        assert_eq!(euler_phi(8), 4);
        assert_eq!(euler_phi(11), 10);
        assert_eq!(valuation(88, 2), 3);
        assert_eq!(valuation(88, 11), 1);
    }
}
