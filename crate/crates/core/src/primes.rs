//! Primality and small factorizations.

/// Witnesses making Miller–Rabin deterministic below 341 550 071 728 321.
const SMALL_WITNESSES: [u64; 7] = [2, 3, 5, 7, 11, 13, 17];
const SMALL_LIMIT: u64 = 341_550_071_728_321;
/// Deterministic for every 64-bit input.
const FULL_WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
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

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in FULL_WITNESSES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let (mut d, mut s) = (n - 1, 0);
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    let witnesses: &[u64] = if n < SMALL_LIMIT { &SMALL_WITNESSES } else { &FULL_WITNESSES };
    'witness: for &a in witnesses {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Primality of a signed curvature; negatives are never prime.
pub fn is_prime_i128(n: i128) -> bool {
    u64::try_from(n).map(is_prime).unwrap_or(false)
}

/// Primes strictly below `n` by the sieve of Eratosthenes.
pub fn primes_below(n: u64) -> Vec<u64> {
    if n < 3 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n];
    let mut out = Vec::new();
    for i in 2..n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j < n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

/// Number of prime factors of `n` counted with multiplicity (`Ω(n)`);
/// `Ω(0)` and `Ω(1)` are reported as 0.
pub fn big_omega(mut n: u128) -> u32 {
    if n < 2 {
        return 0;
    }
    let mut count = 0;
    while n.is_multiple_of(2) {
        n /= 2;
        count += 1;
    }
    let mut p: u128 = 3;
    while p * p <= n {
        if let Ok(small) = u64::try_from(n) {
            if is_prime(small) {
                break;
            }
        }
        while n.is_multiple_of(p) {
            n /= p;
            count += 1;
        }
        p += 2;
    }
    if n > 1 {
        count += 1;
    }
    count
}

/// Whether `n` is square-free (`n ≥ 1`).
pub fn is_square_free(mut n: u64) -> bool {
    if n == 0 {
        return false;
    }
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return false;
            }
        }
        p += 1;
    }
    true
}

/// Distinct prime factors of `n ≥ 1`, ascending.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}
