//! Exact arithmetic in the coefficient fields `F_{p^r}` and in their
//! unramified lifts `W_K(F_{p^r})`, the Galois rings `(Z/p^K)[g]/(f)`.
//!
//! Elements of `F_{p^r}` are stored as reduced polynomials in a fixed
//! generator `g`, with `g` a root of a fixed irreducible (Conway-style)
//! polynomial per `(p, r)`.  The same polynomial, lifted coefficientwise to
//! `Z/p^K`, defines the Galois ring used by the ghost-coordinate algorithms.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Supported primes.
pub const PRIMES: [u8; 4] = [2, 3, 5, 7];
/// Maximum extension degree for which a generator polynomial is shipped.
pub const MAX_R: u8 = 4;
/// Maximum supported Witt length (also bounds the Galois-ring precision).
pub const MAX_M: u8 = 4;

/// Monic irreducible, primitive polynomials over `F_p` of degree `r`,
/// stored as the coefficients of `x^0..x^{r-1}` (the leading `x^r`
/// coefficient 1 is implicit).  Conway polynomials for small `(p, r)`.
fn generator_poly(p: u8, r: u8) -> Option<&'static [u8]> {
    match (p, r) {
        (2, 1) => Some(&[1]),
        (2, 2) => Some(&[1, 1]),
        (2, 3) => Some(&[1, 1, 0]),
        (2, 4) => Some(&[1, 1, 0, 0]),
        (3, 1) => Some(&[1]),
        (3, 2) => Some(&[2, 2]),
        (3, 3) => Some(&[1, 2, 0]),
        (3, 4) => Some(&[2, 0, 0, 2]),
        (5, 1) => Some(&[3]),
        (5, 2) => Some(&[2, 4]),
        (5, 3) => Some(&[3, 3, 0]),
        (5, 4) => Some(&[2, 4, 4, 0]),
        (7, 1) => Some(&[4]),
        (7, 2) => Some(&[3, 6]),
        (7, 3) => Some(&[4, 0, 6]),
        (7, 4) => Some(&[3, 4, 5, 0]),
        _ => None,
    }
}

/// Description of a coefficient field `F_{p^r}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FqCtx {
    pub p: u8,
    pub r: u8,
    /// Coefficients of the reduction polynomial (degree < r part).
    modulus: Vec<u8>,
}

impl FqCtx {
    pub fn new(p: u8, r: u8) -> Result<Self> {
        if !PRIMES.contains(&p) {
            return Err(Error::BadTowerSpec(format!("unsupported prime {p}")));
        }
        if r == 0 || r > MAX_R {
            return Err(Error::BadTowerSpec(format!(
                "extension degree {r} outside 1..={MAX_R}"
            )));
        }
        let modulus = generator_poly(p, r).unwrap().to_vec();
        Ok(FqCtx { p, r, modulus })
    }

    pub fn order(&self) -> u64 {
        (self.p as u64).pow(self.r as u32)
    }

    pub fn zero(&self) -> FieldElem {
        FieldElem(vec![0; self.r as usize])
    }

    pub fn one(&self) -> FieldElem {
        self.from_u64(1)
    }

    /// The fixed generator `g` (class of `x`).  For `r = 1` this is the
    /// distinguished primitive root `p - modulus[0]`.
    pub fn gen(&self) -> FieldElem {
        if self.r == 1 {
            FieldElem(vec![(self.p - self.modulus[0] % self.p) % self.p])
        } else {
            let mut c = vec![0; self.r as usize];
            c[1] = 1;
            FieldElem(c)
        }
    }

    pub fn from_u64(&self, n: u64) -> FieldElem {
        let mut c = vec![0; self.r as usize];
        c[0] = (n % self.p as u64) as u8;
        FieldElem(c)
    }

    pub fn from_coeffs(&self, coeffs: &[u8]) -> Result<FieldElem> {
        if coeffs.len() > self.r as usize {
            return Err(Error::BadTowerSpec(format!(
                "field element with {} coefficients in F_{{{}^{}}}",
                coeffs.len(),
                self.p,
                self.r
            )));
        }
        let mut c = vec![0u8; self.r as usize];
        for (i, &x) in coeffs.iter().enumerate() {
            c[i] = x % self.p;
        }
        Ok(FieldElem(c))
    }

    #[allow(clippy::needless_range_loop)]
    pub fn add(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        let mut c = vec![0u8; self.r as usize];
        for i in 0..self.r as usize {
            c[i] = (a.0[i] + b.0[i]) % self.p;
        }
        FieldElem(c)
    }

    #[allow(clippy::needless_range_loop)]
    pub fn neg(&self, a: &FieldElem) -> FieldElem {
        let mut c = vec![0u8; self.r as usize];
        for i in 0..self.r as usize {
            c[i] = (self.p - a.0[i]) % self.p;
        }
        FieldElem(c)
    }

    pub fn sub(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        let r = self.r as usize;
        let p = self.p as u16;
        // schoolbook product, degree <= 2r-2
        let mut prod = vec![0u16; 2 * r - 1];
        for i in 0..r {
            if a.0[i] == 0 {
                continue;
            }
            for j in 0..r {
                prod[i + j] = (prod[i + j] + a.0[i] as u16 * b.0[j] as u16) % p;
            }
        }
        // reduce by x^r = -modulus
        for k in (r..2 * r - 1).rev() {
            let c = prod[k];
            if c == 0 {
                continue;
            }
            prod[k] = 0;
            for (j, &mj) in self.modulus.iter().enumerate() {
                let idx = k - r + j;
                let sub = (c * mj as u16) % p;
                prod[idx] = (prod[idx] + p - sub) % p;
            }
        }
        FieldElem(prod[..r].iter().map(|&x| x as u8).collect())
    }

    pub fn pow(&self, a: &FieldElem, mut e: u64) -> FieldElem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: &FieldElem) -> Result<FieldElem> {
        if a.is_zero() {
            return Err(Error::NotAUnit);
        }
        Ok(self.pow(a, self.order() - 2))
    }

    /// Frobenius `x -> x^p`.
    pub fn frobenius(&self, a: &FieldElem) -> FieldElem {
        self.pow(a, self.p as u64)
    }

    /// The unique p-th root (inverse Frobenius; `x -> x^{p^{r-1}}`).
    pub fn pth_root(&self, a: &FieldElem) -> FieldElem {
        self.pow(a, (self.p as u64).pow(self.r as u32 - 1))
    }
}

/// An element of `F_{p^r}`: coefficients of `1, g, .., g^{r-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FieldElem(pub Vec<u8>);

impl FieldElem {
    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn is_one(&self) -> bool {
        self.0[0] == 1 && self.0[1..].iter().all(|&c| c == 0)
    }
}

/// Arithmetic context for the Galois ring `GR(p^K, r) = (Z/p^K)[g]/(f)`,
/// with `f` the lift of the `F_{p^r}` generator polynomial.
#[derive(Debug, Clone)]
pub struct GaloisRing {
    pub p: u8,
    pub r: u8,
    /// precision exponent K
    pub k: u32,
    /// p^K
    pub modulus: u64,
    poly: Vec<u64>,
}

impl GaloisRing {
    pub fn new(fq: &FqCtx, k: u32) -> Self {
        let modulus = (fq.p as u64).pow(k);
        GaloisRing {
            p: fq.p,
            r: fq.r,
            k,
            modulus,
            poly: fq.modulus.iter().map(|&c| c as u64).collect(),
        }
    }

    pub fn zero(&self) -> GrElem {
        GrElem(vec![0; self.r as usize])
    }

    /// Coefficientwise lift of a field element.
    pub fn lift(&self, a: &FieldElem) -> GrElem {
        GrElem(a.0.iter().map(|&c| c as u64).collect())
    }

    /// Reduction mod p back into the residue field.
    pub fn reduce(&self, a: &GrElem) -> FieldElem {
        FieldElem(a.0.iter().map(|&c| (c % self.p as u64) as u8).collect())
    }

    pub fn add(&self, a: &GrElem, b: &GrElem) -> GrElem {
        GrElem(
            a.0.iter()
                .zip(&b.0)
                .map(|(&x, &y)| (x + y) % self.modulus)
                .collect(),
        )
    }

    pub fn neg(&self, a: &GrElem) -> GrElem {
        GrElem(a.0.iter().map(|&x| (self.modulus - x) % self.modulus).collect())
    }

    pub fn scalar(&self, n: i64) -> GrElem {
        let m = self.modulus as i128;
        let v = ((n as i128 % m) + m) % m;
        let mut c = vec![0u64; self.r as usize];
        c[0] = v as u64;
        GrElem(c)
    }

    pub fn mul(&self, a: &GrElem, b: &GrElem) -> GrElem {
        let r = self.r as usize;
        let m = self.modulus as u128;
        let mut prod = vec![0u128; 2 * r - 1];
        for i in 0..r {
            if a.0[i] == 0 {
                continue;
            }
            for j in 0..r {
                prod[i + j] = (prod[i + j] + a.0[i] as u128 * b.0[j] as u128) % m;
            }
        }
        for k in (r..2 * r - 1).rev() {
            let c = prod[k];
            if c == 0 {
                continue;
            }
            prod[k] = 0;
            for (j, &pj) in self.poly.iter().enumerate() {
                let idx = k - r + j;
                let sub = (c * pj as u128) % m;
                prod[idx] = (prod[idx] + m - sub) % m;
            }
        }
        GrElem(prod[..r].iter().map(|&x| x as u64).collect())
    }

    /// Exact division by `p^e`; every coefficient must be divisible.
    pub fn div_pow_p(&self, a: &GrElem, e: u32) -> GrElem {
        let d = (self.p as u64).pow(e);
        GrElem(
            a.0.iter()
                .map(|&x| {
                    debug_assert!(x % d == 0, "ghost inversion hit a non-divisible value");
                    x / d
                })
                .collect(),
        )
    }

    pub fn divisible_by_p(&self, a: &GrElem) -> bool {
        a.0.iter().all(|&x| x % self.p as u64 == 0)
    }
}

/// An element of a Galois ring; coefficients of `1, g, .., g^{r-1}` mod p^K.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrElem(pub Vec<u64>);

impl GrElem {
    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }
}
