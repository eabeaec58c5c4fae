//! Prime-power finite fields `F_{p^m}` given by an explicit irreducible modulus.
//!
//! Elements are stored as a single integer `Σ c_t p^t` over the coordinates
//! `c_0..c_{m-1}` in the power basis of the modulus root. Multiplication goes
//! through discrete log tables built from a primitive element found at load.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported field size.
pub const MAX_FIELD_SIZE: u64 = 1 << 16;

/// A field element. Only meaningful together with the [`Field`] that produced it.
#[derive(Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Fe(pub(crate) u32);

impl Fe {
    pub const ZERO: Fe = Fe(0);

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// Integer encoding `Σ c_t p^t`.
    #[inline]
    pub fn index(self) -> u32 {
        self.0
    }
}

impl fmt::Debug for Fe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Field description as it appears in configs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldSpec {
    pub p: u32,
    pub m: u32,
    /// Coefficients low-to-high of the degree-`m` modulus.
    pub modulus: Vec<u32>,
}

#[derive(Clone)]
pub struct Field {
    p: u32,
    m: u32,
    q: u32,
    modulus: Vec<u32>,
    exp: Vec<u32>,
    log: Vec<u32>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}^{} mod {:?}", self.p, self.m, self.modulus)
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.m == other.m && self.modulus == other.modulus
    }
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

// Dense polynomials over F_p, low-to-high, used only at field construction.
fn poly_trim(mut a: Vec<u32>) -> Vec<u32> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn poly_rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let b = poly_trim(b.to_vec());
    let mut r = poly_trim(a.to_vec());
    let lead_inv = mod_inv(*b.last().unwrap(), p);
    while r.len() >= b.len() {
        let shift = r.len() - b.len();
        let factor = (*r.last().unwrap() as u64 * lead_inv as u64 % p as u64) as u32;
        for (i, &c) in b.iter().enumerate() {
            let sub = (c as u64 * factor as u64 % p as u64) as u32;
            r[shift + i] = (r[shift + i] + p - sub) % p;
        }
        r = poly_trim(r);
    }
    r
}

pub(crate) fn mod_inv(a: u32, p: u32) -> u32 {
    mod_pow(a as u64, p as u64 - 2, p as u64) as u32
}

pub(crate) fn mod_pow(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

fn is_irreducible(modulus: &[u32], p: u32) -> bool {
    let m = modulus.len() - 1;
    // Exhaustive search for a monic factor of degree 1..=m/2.
    for deg in 1..=m / 2 {
        let count = (p as u64).pow(deg as u32);
        for code in 0..count {
            let mut f = Vec::with_capacity(deg + 1);
            let mut c = code;
            for _ in 0..deg {
                f.push((c % p as u64) as u32);
                c /= p as u64;
            }
            f.push(1);
            if poly_rem(modulus, &f, p).is_empty() {
                return false;
            }
        }
    }
    true
}

impl Field {
    pub fn prime(p: u32) -> Result<Field> {
        Field::new(&FieldSpec {
            p,
            m: 1,
            modulus: vec![0, 1],
        })
    }

    pub fn new(spec: &FieldSpec) -> Result<Field> {
        let p = spec.p;
        let m = spec.m;
        if !is_prime(p as u64) {
            return Err(Error::Field(format!("p = {p} is not prime")));
        }
        if m == 0 {
            return Err(Error::Field("m must be at least 1".into()));
        }
        let q = (p as u64)
            .checked_pow(m)
            .filter(|&q| q <= MAX_FIELD_SIZE)
            .ok_or_else(|| Error::Field(format!("p^m = {p}^{m} exceeds {MAX_FIELD_SIZE}")))?;
        if spec.modulus.len() != m as usize + 1 {
            return Err(Error::Field(format!(
                "modulus must have {} coefficients, got {}",
                m + 1,
                spec.modulus.len()
            )));
        }
        let mut modulus: Vec<u32> = spec.modulus.iter().map(|&c| c % p).collect();
        let lead = *modulus.last().unwrap();
        if lead == 0 {
            return Err(Error::Field("modulus has zero leading coefficient".into()));
        }
        let li = mod_inv(lead, p);
        for c in modulus.iter_mut() {
            *c = (*c as u64 * li as u64 % p as u64) as u32;
        }
        if m > 1 && !is_irreducible(&modulus, p) {
            return Err(Error::Field(format!("modulus {:?} is reducible over F_{p}", spec.modulus)));
        }
        let q = q as u32;
        let mut field = Field {
            p,
            m,
            q,
            modulus,
            exp: Vec::new(),
            log: Vec::new(),
        };
        field.build_tables()?;
        Ok(field)
    }

    fn slow_mul(&self, a: u32, b: u32) -> u32 {
        let ca = self.coords_raw(a);
        let cb = self.coords_raw(b);
        let p = self.p as u64;
        let mut prod = vec![0u32; 2 * self.m as usize];
        for (i, &x) in ca.iter().enumerate() {
            for (j, &y) in cb.iter().enumerate() {
                prod[i + j] = ((prod[i + j] as u64 + x as u64 * y as u64) % p) as u32;
            }
        }
        let r = poly_rem(&prod, &self.modulus, self.p);
        self.encode_raw(&r)
    }

    fn build_tables(&mut self) -> Result<()> {
        let q = self.q;
        let order = q - 1;
        if q == 2 {
            self.exp = vec![1];
            self.log = vec![0, 0];
            return Ok(());
        }
        for g in 2..q {
            let mut exp = Vec::with_capacity(order as usize);
            let mut x = 1u32;
            let mut ok = true;
            for k in 0..order {
                if k > 0 && x == 1 {
                    ok = false;
                    break;
                }
                exp.push(x);
                x = self.slow_mul(x, g);
            }
            if ok && x == 1 {
                let mut log = vec![0u32; q as usize];
                for (k, &v) in exp.iter().enumerate() {
                    log[v as usize] = k as u32;
                }
                self.exp = exp;
                self.log = log;
                return Ok(());
            }
        }
        Err(Error::Field("no primitive element found".into()))
    }

    fn coords_raw(&self, a: u32) -> Vec<u32> {
        let mut v = Vec::with_capacity(self.m as usize);
        let mut x = a;
        for _ in 0..self.m {
            v.push(x % self.p);
            x /= self.p;
        }
        v
    }

    fn encode_raw(&self, coords: &[u32]) -> u32 {
        coords.iter().rev().fold(0u32, |acc, &c| acc * self.p + c)
    }

    pub fn spec(&self) -> FieldSpec {
        FieldSpec {
            p: self.p,
            m: self.m,
            modulus: self.modulus.clone(),
        }
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.p
    }

    #[inline]
    pub fn m(&self) -> u32 {
        self.m
    }

    #[inline]
    pub fn q(&self) -> u32 {
        self.q
    }

    #[inline]
    pub fn zero(&self) -> Fe {
        Fe(0)
    }

    #[inline]
    pub fn one(&self) -> Fe {
        Fe(1)
    }

    /// Image of an integer under `Z -> F_p ⊂ F_q`.
    pub fn from_int(&self, n: i64) -> Fe {
        Fe(n.rem_euclid(self.p as i64) as u32)
    }

    /// Element from its integer encoding (`Σ c_t p^t`); negative values are
    /// read as prime-field integers.
    pub fn from_index(&self, n: i64) -> Result<Fe> {
        if n < 0 {
            return Ok(self.from_int(n));
        }
        if n >= self.q as i64 {
            return Err(Error::Field(format!("element {n} out of range for q = {}", self.q)));
        }
        Ok(Fe(n as u32))
    }

    pub fn from_coords(&self, coords: &[u32]) -> Fe {
        assert_eq!(coords.len(), self.m as usize);
        let c: Vec<u32> = coords.iter().map(|&c| c % self.p).collect();
        Fe(self.encode_raw(&c))
    }

    pub fn coords(&self, a: Fe) -> Vec<u32> {
        self.coords_raw(a.0)
    }

    pub fn elements(&self) -> impl Iterator<Item = Fe> {
        (0..self.q).map(Fe)
    }

    /// Generator of the multiplicative group.
    pub fn primitive_element(&self) -> Fe {
        Fe(if self.q == 2 { 1 } else { self.exp[1] })
    }

    #[inline]
    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        if self.m == 1 {
            let s = a.0 + b.0;
            return Fe(if s >= self.p { s - self.p } else { s });
        }
        if self.p == 2 {
            return Fe(a.0 ^ b.0);
        }
        let (mut x, mut y) = (a.0, b.0);
        let mut r = 0u32;
        let mut place = 1u32;
        for _ in 0..self.m {
            r += ((x % self.p + y % self.p) % self.p) * place;
            x /= self.p;
            y /= self.p;
            place *= self.p;
        }
        Fe(r)
    }

    #[inline]
    pub fn neg(&self, a: Fe) -> Fe {
        if a.0 == 0 {
            return a;
        }
        if self.m == 1 {
            return Fe(self.p - a.0);
        }
        if self.p == 2 {
            return a;
        }
        let mut x = a.0;
        let mut r = 0u32;
        let mut place = 1u32;
        for _ in 0..self.m {
            r += ((self.p - x % self.p) % self.p) * place;
            x /= self.p;
            place *= self.p;
        }
        Fe(r)
    }

    #[inline]
    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        if a.0 == 0 || b.0 == 0 {
            return Fe(0);
        }
        if self.m == 1 {
            return Fe(((a.0 as u64 * b.0 as u64) % self.p as u64) as u32);
        }
        let order = self.q - 1;
        let s = self.log[a.0 as usize] + self.log[b.0 as usize];
        Fe(self.exp[(if s >= order { s - order } else { s }) as usize])
    }

    pub fn inv(&self, a: Fe) -> Option<Fe> {
        if a.0 == 0 {
            return None;
        }
        let order = self.q - 1;
        let l = self.log[a.0 as usize];
        Some(Fe(self.exp[((order - l) % order) as usize]))
    }

    pub fn div(&self, a: Fe, b: Fe) -> Option<Fe> {
        self.inv(b).map(|bi| self.mul(a, bi))
    }

    pub fn pow(&self, a: Fe, e: u64) -> Fe {
        if e == 0 {
            return Fe(1);
        }
        if a.0 == 0 {
            return Fe(0);
        }
        let order = (self.q - 1) as u64;
        let l = self.log[a.0 as usize] as u64;
        Fe(self.exp[((l * (e % order)) % order) as usize])
    }

    /// `a^(p^e)`.
    pub fn frobenius(&self, a: Fe, e: u32) -> Fe {
        let k = (e % self.m) as u32;
        self.pow(a, (self.p as u64).pow(k))
    }

    /// The unique `b` with `b^(p^e) = c`.
    pub fn inv_frobenius(&self, c: Fe, e: u32) -> Fe {
        let k = (self.m - e % self.m) % self.m;
        self.pow(c, (self.p as u64).pow(k))
    }

    /// Multiplicative order of a nonzero element.
    pub fn order(&self, a: Fe) -> u64 {
        assert!(!a.is_zero());
        let n = (self.q - 1) as u64;
        let l = self.log[a.0 as usize] as u64;
        n / gcd(n, l)
    }
}

pub(crate) fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f4() -> Field {
        Field::new(&FieldSpec {
            p: 2,
            m: 2,
            modulus: vec![1, 1, 1],
        })
        .unwrap()
    }

    #[test]
    fn prime_field_frobenius_is_identity() {
        let f = Field::prime(3).unwrap();
        assert_eq!(f.inv_frobenius(Fe(2), 5), Fe(2));
    }

    #[test]
    fn f4_inverse_frobenius() {
        let f = f4();
        let w = f.from_coords(&[0, 1]);
        let w1 = f.from_coords(&[1, 1]);
        // (ω+1)^2 = ω^2 + 1 = ω in F_4
        assert_eq!(f.mul(w1, w1), w);
        assert_eq!(f.inv_frobenius(w, 1), w1);
    }

    #[test]
    fn zero_is_fixed() {
        let f = f4();
        assert_eq!(f.inv_frobenius(Fe::ZERO, 7), Fe::ZERO);
    }

    #[test]
    fn rejects_reducible_modulus() {
        let err = Field::new(&FieldSpec {
            p: 2,
            m: 2,
            modulus: vec![1, 0, 1],
        });
        assert!(matches!(err, Err(Error::Field(_))));
    }

    #[test]
    fn rejects_oversized_and_composite() {
        assert!(Field::prime(4).is_err());
        assert!(Field::new(&FieldSpec {
            p: 2,
            m: 17,
            modulus: vec![1; 18],
        })
        .is_err());
    }

    #[test]
    fn field_axioms_small() {
        let f = Field::new(&FieldSpec {
            p: 3,
            m: 2,
            modulus: vec![1, 0, 1],
        })
        .unwrap();
        for a in f.elements() {
            assert_eq!(f.add(a, f.neg(a)), Fe::ZERO);
            if !a.is_zero() {
                assert_eq!(f.mul(a, f.inv(a).unwrap()), f.one());
            }
            for b in f.elements() {
                assert_eq!(f.mul(a, b).0, f.slow_mul(a.0, b.0));
            }
        }
    }
}
