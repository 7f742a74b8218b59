//! Arithmetic in the prime field `F_Q`.
//!
//! Residues are always kept in canonical form `[0, Q)`. The supported modulus
//! range is `2 <= Q < 2^63`, so every intermediate product fits in a `u128`.
//! Moduli of at least `2^32` use Montgomery reduction for multiplication;
//! smaller ones use native `u64` arithmetic.
//!
//! None of this is constant time.

use std::fmt;

use rand::RngCore;

use crate::error::{Error, Result};

/// Exclusive upper bound on supported moduli.
pub const MAX_MODULUS: u64 = 1 << 63;

/// Miller-Rabin witnesses that are deterministic for every `n < 3.3 * 10^24`,
/// which covers all of `u64`.
const MR_WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// A prime field order `Q`, with precomputed reduction constants.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimeModulus {
    value: u64,
    // -Q^{-1} mod 2^64 and 2^128 mod Q, only used when Q >= 2^32.
    neg_inv: u64,
    r2: u64,
}

impl PrimeModulus {
    /// Validates that `value` is a prime in `[2, 2^63)`.
    pub fn new(value: u64) -> Result<Self> {
        if value < 2 {
            return Err(Error::parameter(format!("modulus {value} is below 2")));
        }
        if value >= MAX_MODULUS {
            return Err(Error::parameter(format!(
                "modulus {value} is not below 2^63"
            )));
        }
        if !is_prime(value)? {
            return Err(Error::parameter(format!("modulus {value} is not prime")));
        }
        let (neg_inv, r2) = if value >> 32 != 0 {
            // Newton iteration for the inverse of an odd number mod 2^64.
            let mut inv: u64 = 1;
            for _ in 0..6 {
                inv = inv.wrapping_mul(2u64.wrapping_sub(value.wrapping_mul(inv)));
            }
            let r = (u128::from(u64::MAX) + 1) % u128::from(value);
            let r2 = (r * r % u128::from(value)) as u64;
            (inv.wrapping_neg(), r2)
        } else {
            (0, 0)
        };
        Ok(Self {
            value,
            neg_inv,
            r2,
        })
    }

    #[inline]
    pub fn value(&self) -> u64 {
        self.value
    }

    /// Number of bits needed to write `Q - 1`.
    pub fn bits(&self) -> u32 {
        64 - (self.value - 1).leading_zeros()
    }

    pub fn element(&self, residue: u64) -> Result<FieldElement> {
        if residue >= self.value {
            return Err(Error::parameter(format!(
                "residue {residue} is not canonical under modulus {}",
                self.value
            )));
        }
        Ok(FieldElement {
            residue,
            modulus: *self,
        })
    }

    /// Builds an element from any integer, reducing it first.
    pub fn reduce(&self, value: u128) -> FieldElement {
        FieldElement {
            residue: self.reduce_wide(value),
            modulus: *self,
        }
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement {
            residue: 0,
            modulus: *self,
        }
    }

    pub fn one(&self) -> FieldElement {
        FieldElement {
            residue: 1,
            modulus: *self,
        }
    }

    #[inline]
    pub(crate) fn reduce_wide(&self, value: u128) -> u64 {
        (value % u128::from(self.value)) as u64
    }

    #[inline]
    pub(crate) fn reduce_u64(&self, value: u64) -> u64 {
        if value < self.value {
            value
        } else {
            value % self.value
        }
    }

    #[inline]
    pub(crate) fn add_raw(&self, a: u64, b: u64) -> u64 {
        // a, b < 2^63 so the sum cannot overflow.
        let s = a + b;
        if s >= self.value {
            s - self.value
        } else {
            s
        }
    }

    #[inline]
    pub(crate) fn sub_raw(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + (self.value - b)
        }
    }

    #[inline]
    pub(crate) fn mul_raw(&self, a: u64, b: u64) -> u64 {
        if self.value >> 32 == 0 {
            a * b % self.value
        } else {
            let t = self.redc(wide_mul(a, b));
            self.redc(wide_mul(t, self.r2))
        }
    }

    // Walk-internal representation: Montgomery form `x * 2^64 mod Q` for
    // Q >= 2^32, plain residues otherwise. Addition and subtraction are the
    // same in both; only multiplication and the boundary conversions differ.

    #[inline]
    #[allow(clippy::wrong_self_convention)]
    pub(crate) fn to_internal(&self, a: u64) -> u64 {
        if self.value >> 32 == 0 {
            a
        } else {
            self.redc(wide_mul(a, self.r2))
        }
    }

    #[inline]
    #[allow(clippy::wrong_self_convention)]
    pub(crate) fn from_internal(&self, a: u64) -> u64 {
        if self.value >> 32 == 0 {
            a
        } else {
            self.redc(u128::from(a))
        }
    }

    #[inline]
    pub(crate) fn mul_internal(&self, a: u64, b: u64) -> u64 {
        if self.value >> 32 == 0 {
            a * b % self.value
        } else {
            self.redc(wide_mul(a, b))
        }
    }

    /// Montgomery reduction, `t * 2^-64 mod Q` for `t < Q * 2^64`.
    #[inline]
    fn redc(&self, t: u128) -> u64 {
        let m = (t as u64).wrapping_mul(self.neg_inv);
        // t + m*Q < 2 * Q * 2^64 < 2^128 because Q < 2^63.
        let u = (t.wrapping_add(wide_mul(m, self.value)) >> 64) as u64;
        if u >= self.value {
            u - self.value
        } else {
            u
        }
    }

    pub(crate) fn pow_raw(&self, base: u64, mut exp: u64) -> u64 {
        let mut acc = 1 % self.value;
        let mut b = base;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul_raw(acc, b);
            }
            b = self.mul_raw(b, b);
            exp >>= 1;
        }
        acc
    }
}

/// Full 128-bit product; never overflows.
#[inline(always)]
fn wide_mul(a: u64, b: u64) -> u128 {
    u128::from(a).wrapping_mul(u128::from(b))
}

impl fmt::Display for PrimeModulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// A canonical residue together with its modulus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FieldElement {
    residue: u64,
    modulus: PrimeModulus,
}

impl FieldElement {
    #[inline]
    pub fn residue(&self) -> u64 {
        self.residue
    }

    #[inline]
    pub fn modulus(&self) -> PrimeModulus {
        self.modulus
    }

    fn same_field(&self, other: &Self) -> Result<()> {
        if self.modulus.value != other.modulus.value {
            return Err(Error::ModulusMismatch(
                self.modulus.value,
                other.modulus.value,
            ));
        }
        Ok(())
    }

    pub fn try_add(self, other: Self) -> Result<Self> {
        self.same_field(&other)?;
        Ok(Self {
            residue: self.modulus.add_raw(self.residue, other.residue),
            ..self
        })
    }

    pub fn try_sub(self, other: Self) -> Result<Self> {
        self.same_field(&other)?;
        Ok(Self {
            residue: self.modulus.sub_raw(self.residue, other.residue),
            ..self
        })
    }

    pub fn try_mul(self, other: Self) -> Result<Self> {
        self.same_field(&other)?;
        Ok(Self {
            residue: self.modulus.mul_raw(self.residue, other.residue),
            ..self
        })
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(self) -> Self {
        Self {
            residue: self.modulus.sub_raw(0, self.residue),
            ..self
        }
    }

    pub fn square(self) -> Self {
        Self {
            residue: self.modulus.mul_raw(self.residue, self.residue),
            ..self
        }
    }

    /// Exponentiation by squaring.
    pub fn pow(self, exp: u64) -> Self {
        Self {
            residue: self.modulus.pow_raw(self.residue, exp),
            ..self
        }
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.residue)
    }
}

fn mul_mod_u64(a: u64, b: u64, m: u64) -> u64 {
    (u128::from(a) * u128::from(b) % u128::from(m)) as u64
}

fn pow_mod_u64(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod_u64(acc, base, m);
        }
        base = mul_mod_u64(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin primality test over the full `u64` range.
pub fn is_prime(candidate: u64) -> Result<bool> {
    if candidate < 2 {
        return Err(Error::parameter(format!(
            "primality candidate {candidate} is below 2"
        )));
    }
    for &p in &MR_WITNESSES {
        if candidate.is_multiple_of(p) {
            return Ok(candidate == p);
        }
    }
    let d_shift = (candidate - 1).trailing_zeros();
    let d = (candidate - 1) >> d_shift;
    'witness: for &a in &MR_WITNESSES {
        let mut x = pow_mod_u64(a, d, candidate);
        if x == 1 || x == candidate - 1 {
            continue;
        }
        for _ in 1..d_shift {
            x = mul_mod_u64(x, x, candidate);
            if x == candidate - 1 {
                continue 'witness;
            }
        }
        return Ok(false);
    }
    Ok(true)
}

/// Smallest prime `>= lower`.
pub fn next_prime_at_least(lower: u64) -> Result<u64> {
    if lower < 2 {
        return Err(Error::parameter(format!("lower bound {lower} is below 2")));
    }
    let mut c = lower;
    loop {
        if is_prime(c)? {
            return Ok(c);
        }
        c = c
            .checked_add(1)
            .ok_or_else(|| Error::parameter(format!("no prime >= {lower} fits in 64 bits")))?;
    }
}

/// Uniform element of `F_Q` by rejection sampling on `bits(Q)`-bit draws.
pub fn sample_uniform<R: RngCore + ?Sized>(
    modulus: PrimeModulus,
    rng: &mut R,
) -> Result<FieldElement> {
    let bits = modulus.bits();
    let mask = if bits == 64 { u64::MAX } else { (1u64 << bits) - 1 };
    let mut buf = [0u8; 8];
    loop {
        rng.try_fill_bytes(&mut buf)
            .map_err(|e| Error::Entropy(e.to_string()))?;
        let x = u64::from_le_bytes(buf) & mask;
        if x < modulus.value() {
            return modulus.element(x);
        }
    }
}
