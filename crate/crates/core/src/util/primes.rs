//! Prime and Möbius sieves.

/// Primes up to and including `limit`, by Eratosthenes.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut is_comp = vec![false; n + 1];
    let mut out = Vec::new();
    for p in 2..=n {
        if !is_comp[p] {
            out.push(p as u64);
            let mut m = p * p;
            while m <= n {
                is_comp[m] = true;
                m += p;
            }
        }
    }
    out
}

/// Deterministic Miller–Rabin, valid for all u64.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut r = 0;
    while d % 2 == 0 {
        d /= 2;
        r += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..r - 1 {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Möbius function on [0, limit] as an i8 table (μ(0) stored as 0).
pub fn moebius_table(limit: u64) -> Vec<i8> {
    let n = limit as usize;
    let mut mu = vec![1i8; n + 1];
    let mut sieved = vec![false; n + 1];
    if n >= 1 {
        mu[0] = 0;
    }
    for p in 2..=n {
        if sieved[p] {
            continue;
        }
        // p is prime
        let mut m = p;
        while m <= n {
            sieved[m] = true;
            mu[m] = -mu[m];
            m += p;
        }
        if let Some(p2) = p.checked_mul(p) {
            let mut m = p2;
            while m <= n {
                mu[m] = 0;
                m += p2;
            }
        }
    }
    mu
}

/// Squarefree indicator table on [0, limit].
pub fn squarefree_table(limit: u64) -> Vec<bool> {
    let n = limit as usize;
    let mut sf = vec![true; n + 1];
    let mut q = 2usize;
    while q * q <= n {
        let q2 = q * q;
        let mut m = q2;
        while m <= n {
            sf[m] = false;
            m += q2;
        }
        q += 1;
    }
    sf
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_primes() {
        assert_eq!(primes_up_to(30), vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
    }

    #[test]
    fn miller_rabin_agrees_with_sieve() {
        let ps = primes_up_to(2000);
        for n in 2..=2000u64 {
            assert_eq!(is_prime(n), ps.binary_search(&n).is_ok(), "n={n}");
        }
    }

    #[test]
    fn moebius_small_values() {
        let mu = moebius_table(30);
        assert_eq!(mu[1], 1);
        assert_eq!(mu[2], -1);
        assert_eq!(mu[4], 0);
        assert_eq!(mu[6], 1);
        assert_eq!(mu[12], 0);
        assert_eq!(mu[30], -1);
    }

    #[test]
    fn mertens_at_1000() {
        let mu = moebius_table(1000);
        let m: i64 = (1..=1000).map(|i| mu[i] as i64).sum();
        assert_eq!(m, 2); // classical value M(1000) = 2
    }

    #[test]
    fn squarefree_matches_moebius() {
        let mu = moebius_table(500);
        let sf = squarefree_table(500);
        for i in 1..=500 {
            assert_eq!(sf[i], mu[i] != 0, "i={i}");
        }
    }
}
