//! Integer infrastructure: a linear sieve carrying the Möbius function,
//! primality, primitive roots and discrete-logarithm tables.

use thiserror::Error;

/// Default sieve budget in table entries (2^28).
pub const DEFAULT_SIEVE_BUDGET: usize = 1 << 28;

/// Largest supported modulus.
pub const MAX_MODULUS: u64 = 1 << 31;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("sieve limit {limit} exceeds the budget of {budget} entries")]
    SieveBudget { limit: usize, budget: usize },
    #[error("sieve limit must be at least 2, got {0}")]
    SieveTooSmall(usize),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("modulus {0} outside the supported range 3..2^31")]
    ModulusRange(u64),
}

/// Primality and Möbius values for `0..=limit`.
#[derive(Debug, Clone)]
pub struct SieveTable {
    limit: usize,
    is_prime: Vec<bool>,
    mobius: Vec<i8>,
    primes: Vec<u32>,
}

impl SieveTable {
    pub fn limit(&self) -> usize {
        self.limit
    }

    pub fn is_prime(&self, n: usize) -> bool {
        self.is_prime[n]
    }

    pub fn mobius(&self, n: usize) -> i8 {
        self.mobius[n]
    }

    pub fn mobius_values(&self) -> &[i8] {
        &self.mobius
    }

    /// All primes `≤ limit`, ascending.
    pub fn primes(&self) -> &[u32] {
        &self.primes
    }

    /// Primes `≤ bound`, ascending.
    pub fn primes_up_to(&self, bound: usize) -> &[u32] {
        let end = self.primes.partition_point(|&p| (p as usize) <= bound);
        &self.primes[..end]
    }
}

/// Linear sieve up to `limit` with the default budget.
pub fn sieve(limit: usize) -> Result<SieveTable, ArithError> {
    sieve_with_budget(limit, DEFAULT_SIEVE_BUDGET)
}

pub fn sieve_with_budget(limit: usize, budget: usize) -> Result<SieveTable, ArithError> {
    if limit < 2 {
        return Err(ArithError::SieveTooSmall(limit));
    }
    if limit >= budget {
        return Err(ArithError::SieveBudget { limit, budget });
    }
    let mut is_prime = vec![true; limit + 1];
    let mut mobius = vec![0i8; limit + 1];
    let mut primes: Vec<u32> = Vec::new();
    is_prime[0] = false;
    is_prime[1] = false;
    mobius[1] = 1;
    for i in 2..=limit {
        if is_prime[i] {
            primes.push(i as u32);
            mobius[i] = -1;
        }
        for &p in &primes {
            let m = i * p as usize;
            if m > limit {
                break;
            }
            is_prime[m] = false;
            if i % p as usize == 0 {
                mobius[m] = 0;
                break;
            }
            mobius[m] = -mobius[i];
        }
    }
    Ok(SieveTable {
        limit,
        is_prime,
        mobius,
        primes,
    })
}

/// `base^exp mod modulus` by square-and-multiply in 128-bit intermediates.
pub fn mod_pow(base: u64, mut exp: u64, modulus: u64) -> u64 {
    if modulus == 1 {
        return 0;
    }
    let m = modulus as u128;
    let mut b = base as u128 % m;
    let mut acc: u128 = 1;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        exp >>= 1;
    }
    acc as u64
}

/// Deterministic Miller–Rabin for 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut r = 0;
    while d % 2 == 0 {
        d /= 2;
        r += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = mod_pow(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..r {
            x = ((x as u128 * x as u128) % n as u128) as u64;
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Smallest prime `≥ n`.
pub fn next_prime(n: u64) -> u64 {
    let mut k = n.max(2);
    while !is_prime(k) {
        k += 1;
    }
    k
}

/// Distinct prime factors by trial division.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn check_modulus(q: u64) -> Result<(), ArithError> {
    if !(3..MAX_MODULUS).contains(&q) {
        return Err(ArithError::ModulusRange(q));
    }
    if !is_prime(q) {
        return Err(ArithError::NotPrime(q));
    }
    Ok(())
}

/// Smallest generator of `(Z/qZ)^×` for an odd prime `q`.
pub fn primitive_root(q: u64) -> Result<u64, ArithError> {
    check_modulus(q)?;
    let factors = prime_factors(q - 1);
    let g = (2..q)
        .find(|&g| factors.iter().all(|&p| mod_pow(g, (q - 1) / p, q) != 1))
        .expect("a prime modulus always has a primitive root");
    Ok(g)
}

/// Discrete logarithms to the smallest primitive root modulo a prime.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DlogTable {
    q: u64,
    g: u64,
    /// `dlog[a]` for `a` in `0..q`; `dlog[0]` holds [`DlogTable::SENTINEL`].
    dlog: Vec<u32>,
    /// `power[k] = g^k mod q` for `k` in `0..q-1`.
    power: Vec<u32>,
}

impl DlogTable {
    pub const SENTINEL: u32 = u32::MAX;

    pub fn new(q: u64) -> Result<Self, ArithError> {
        let g = primitive_root(q)?;
        let n = q as usize;
        let mut dlog = vec![Self::SENTINEL; n];
        let mut power = Vec::with_capacity(n - 1);
        let mut x: u64 = 1;
        for k in 0..(n - 1) {
            dlog[x as usize] = k as u32;
            power.push(x as u32);
            x = x * g % q;
        }
        Ok(Self { q, g, dlog, power })
    }

    pub fn modulus(&self) -> u64 {
        self.q
    }

    pub fn generator(&self) -> u64 {
        self.g
    }

    /// `k` with `g^k ≡ a (mod q)`, or `None` when `q | a`.
    pub fn log(&self, a: u64) -> Option<u32> {
        let v = self.dlog[(a % self.q) as usize];
        (v != Self::SENTINEL).then_some(v)
    }

    /// `g^k mod q`.
    pub fn pow(&self, k: u64) -> u64 {
        self.power[(k % (self.q - 1)) as usize] as u64
    }

    pub fn raw(&self) -> &[u32] {
        &self.dlog
    }
}

/// Convenience constructor matching the operation name.
pub fn dlog_table(q: u64) -> Result<DlogTable, ArithError> {
    DlogTable::new(q)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial_division(n: u64) -> bool {
        n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
    }

    fn brute_mobius(mut n: u64) -> i8 {
        let mut sign = 1;
        let mut d = 2;
        while d * d <= n {
            if n % d == 0 {
                n /= d;
                if n % d == 0 {
                    return 0;
                }
                sign = -sign;
            }
            d += 1;
        }
        if n > 1 {
            sign = -sign;
        }
        sign
    }

    #[test]
    fn small_sieve() {
        let t = sieve(10).unwrap();
        assert_eq!(t.primes(), &[2, 3, 5, 7]);
        assert_eq!(t.mobius(6), 1);
        assert_eq!(t.mobius(4), 0);
        assert_eq!(t.mobius(7), -1);
        assert_eq!(t.mobius(1), 1);
    }

    #[test]
    fn sieve_matches_trial_division_and_mobius_oracle() {
        let t = sieve(100_000).unwrap();
        for n in 0..=100_000u64 {
            assert_eq!(t.is_prime(n as usize), trial_division(n), "n={n}");
        }
        for n in 1..=20_000u64 {
            assert_eq!(t.mobius(n as usize), brute_mobius(n), "n={n}");
        }
    }

    #[test]
    fn prime_count_to_a_million() {
        let t = sieve(1_000_000).unwrap();
        assert_eq!(t.primes().len(), 78_498);
        // Miller–Rabin as an independent cross-check on a sampled window.
        for n in 999_000..1_000_000u64 {
            assert_eq!(t.is_prime(n as usize), is_prime(n));
        }
    }

    #[test]
    fn mobius_divisor_sum_is_indicator() {
        let t = sieve(10_000).unwrap();
        for n in 1..=10_000usize {
            let s: i32 = (1..=n).filter(|d| n % d == 0).map(|d| t.mobius(d) as i32).sum();
            assert_eq!(s, (n == 1) as i32, "n={n}");
        }
    }

    #[test]
    fn budget_and_range_errors() {
        assert_eq!(
            sieve_with_budget(1000, 500).unwrap_err(),
            ArithError::SieveBudget { limit: 1000, budget: 500 }
        );
        assert_eq!(sieve(1).unwrap_err(), ArithError::SieveTooSmall(1));
        assert_eq!(primitive_root(12).unwrap_err(), ArithError::NotPrime(12));
        assert_eq!(primitive_root(2).unwrap_err(), ArithError::ModulusRange(2));
    }

    fn exhaustive_primitive_root(q: u64) -> u64 {
        (2..q)
            .find(|&g| {
                let mut x = 1;
                for k in 1..q {
                    x = x * g % q;
                    if x == 1 {
                        return k == q - 1;
                    }
                }
                false
            })
            .unwrap()
    }

    #[test]
    fn primitive_roots() {
        assert_eq!(primitive_root(3).unwrap(), 2);
        assert_eq!(primitive_root(7).unwrap(), 3);
        assert_eq!(primitive_root(101).unwrap(), 2);
        for q in [5u64, 11, 13, 23, 31, 41, 191, 409, 1009] {
            assert_eq!(primitive_root(q).unwrap(), exhaustive_primitive_root(q), "q={q}");
        }
    }

    #[test]
    fn dlog_tables() {
        let t = dlog_table(5).unwrap();
        assert_eq!(t.generator(), 2);
        assert_eq!(
            (1..5).map(|a| t.log(a).unwrap()).collect::<Vec<_>>(),
            vec![0, 1, 3, 2]
        );
        let t = dlog_table(3).unwrap();
        assert_eq!((t.log(1), t.log(2)), (Some(0), Some(1)));
        for q in [3u64, 7, 31, 101, 1009] {
            let t = dlog_table(q).unwrap();
            assert_eq!(t.log(t.generator()), Some(1));
            assert_eq!(t.log(0), None);
            let mut seen = vec![false; q as usize - 1];
            for a in 1..q {
                let k = t.log(a).unwrap();
                assert_eq!(mod_pow(t.generator(), k as u64, q), a);
                assert!(!seen[k as usize]);
                seen[k as usize] = true;
            }
        }
    }

    #[test]
    fn mod_pow_cases() {
        assert_eq!(mod_pow(2, 10, 1000), 24);
        assert_eq!(mod_pow(7, 0, 13), 1);
        for q in [5u64, 7, 101, 2_147_483_647] {
            assert_eq!(mod_pow(3, q - 1, q), 1);
        }
        assert_eq!(mod_pow(2_147_483_000, 3, 2_147_483_647), {
            let b = 2_147_483_000u128;
            (b * b % 2_147_483_647 * b % 2_147_483_647) as u64
        });
    }

    #[test]
    fn next_prime_cases() {
        assert_eq!(next_prime(1000), 1009);
        assert_eq!(next_prime(1009), 1009);
        assert_eq!(next_prime(0), 2);
    }
}
