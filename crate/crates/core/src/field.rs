//! Small finite fields GF(p^h) with table arithmetic.
//!
//! Elements are encoded as integers in `[0, p^h)`: the base-`p` digits of an
//! element are the coefficients of its polynomial representative, lowest
//! degree first. The modulus for each supported `(p, h)` is the Conway
//! polynomial, so the encoding is stable across runs and machines.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Field element, encoded as described in the module docs.
pub type Fe = u32;

/// Identifies a field by characteristic and degree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, PartialOrd, Ord)]
pub struct FieldSpec {
    pub p: u32,
    pub h: u32,
}

impl FieldSpec {
    pub fn order(&self) -> usize {
        (self.p as usize).pow(self.h)
    }

    /// Splits a prime power into `(p, h)`, restricted to the supported range.
    pub fn from_order(q: usize) -> Result<FieldSpec> {
        for p in [2u32, 3, 5, 7] {
            let mut h = 0;
            let mut n = q;
            while n > 1 && n % p as usize == 0 {
                n /= p as usize;
                h += 1;
            }
            if n == 1 && h > 0 {
                let spec = FieldSpec { p, h };
                if q > 81 {
                    return Err(Error::input(format!("field order {q} exceeds the supported bound 81")));
                }
                return Ok(spec);
            }
        }
        Err(Error::input(format!("{q} is not a supported prime power (p in {{2,3,5,7}}, q <= 81)")))
    }
}

/// Conway polynomials, coefficients lowest degree first, monic leading term included.
fn modulus_for(p: u32, h: u32) -> Option<Vec<u32>> {
    let m: &[u32] = match (p, h) {
        (_, 1) => return Some(vec![0, 1]),
        (2, 2) => &[1, 1, 1],
        (2, 3) => &[1, 1, 0, 1],
        (2, 4) => &[1, 1, 0, 0, 1],
        (2, 5) => &[1, 0, 1, 0, 0, 1],
        (2, 6) => &[1, 1, 0, 1, 1, 0, 1],
        (3, 2) => &[2, 2, 1],
        (3, 3) => &[1, 2, 0, 1],
        (3, 4) => &[2, 0, 0, 2, 1],
        (5, 2) => &[2, 4, 1],
        (7, 2) => &[3, 6, 1],
        _ => return None,
    };
    Some(m.to_vec())
}

/// A finite field with precomputed addition and multiplication tables.
#[derive(Clone, Debug)]
pub struct Field {
    spec: FieldSpec,
    q: usize,
    modulus: Vec<u32>,
    add: Vec<Fe>,
    mul: Vec<Fe>,
    neg: Vec<Fe>,
    inv: Vec<Fe>,
    squares: Vec<bool>,
}

impl Field {
    pub fn new(q: usize) -> Result<Field> {
        Field::from_spec(FieldSpec::from_order(q)?)
    }

    pub fn from_spec(spec: FieldSpec) -> Result<Field> {
        let FieldSpec { p, h } = spec;
        if ![2, 3, 5, 7].contains(&p) || h == 0 {
            return Err(Error::input(format!("unsupported field GF({p}^{h})")));
        }
        let q = spec.order();
        if q > 81 {
            return Err(Error::input(format!("field order {q} exceeds the supported bound 81")));
        }
        let modulus = modulus_for(p, h)
            .ok_or_else(|| Error::input(format!("no modulus table for GF({p}^{h})")))?;

        let digits = |x: usize| -> Vec<u32> {
            let mut v = vec![0; h as usize];
            let mut x = x;
            for d in v.iter_mut() {
                *d = (x % p as usize) as u32;
                x /= p as usize;
            }
            v
        };
        let encode = |v: &[u32]| -> Fe {
            v.iter().rev().fold(0u32, |acc, &d| acc * p + d)
        };

        let mut add = vec![0; q * q];
        let mut mul = vec![0; q * q];
        for a in 0..q {
            let da = digits(a);
            for b in 0..q {
                let db = digits(b);
                let s: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
                add[a * q + b] = encode(&s);

                // schoolbook product, then reduce by the monic modulus
                let mut prod = vec![0u32; 2 * h as usize];
                for (i, x) in da.iter().enumerate() {
                    for (j, y) in db.iter().enumerate() {
                        prod[i + j] = (prod[i + j] + x * y) % p;
                    }
                }
                for deg in (h as usize..prod.len()).rev() {
                    let c = prod[deg];
                    if c != 0 {
                        for (k, m) in modulus.iter().enumerate().take(h as usize) {
                            let idx = deg - h as usize + k;
                            prod[idx] = (prod[idx] + (p - c) * m) % p;
                        }
                        prod[deg] = 0;
                    }
                }
                mul[a * q + b] = encode(&prod[..h as usize]);
            }
        }

        let mut neg = vec![0; q];
        let mut inv = vec![0; q];
        for a in 0..q {
            neg[a] = (0..q).find(|&b| add[a * q + b] == 0).unwrap() as Fe;
            if a != 0 {
                inv[a] = (0..q)
                    .find(|&b| mul[a * q + b] == 1)
                    .ok_or_else(|| Error::input(format!("modulus for GF({p}^{h}) is reducible")))?
                    as Fe;
            }
        }
        let mut squares = vec![false; q];
        for a in 0..q {
            squares[mul[a * q + a] as usize] = true;
        }

        let field = Field { spec, q, modulus, add, mul, neg, inv, squares };
        field.check_axioms()?;
        Ok(field)
    }

    /// Exhaustive axiom check for q <= 16, a deterministic sample of triples otherwise.
    fn check_axioms(&self) -> Result<()> {
        let q = self.q;
        let triples: Box<dyn Iterator<Item = (usize, usize, usize)>> = if q <= 16 {
            Box::new((0..q).flat_map(move |a| (0..q).flat_map(move |b| (0..q).map(move |c| (a, b, c)))))
        } else {
            Box::new((0..4096usize).map(move |i| {
                let x = i.wrapping_mul(2654435761) ^ (i >> 3);
                (x % q, (x / q) % q, (x / (q * q)) % q)
            }))
        };
        for (a, b, c) in triples {
            let (a, b, c) = (a as Fe, b as Fe, c as Fe);
            let ok = self.add(self.add(a, b), c) == self.add(a, self.add(b, c))
                && self.mul(self.mul(a, b), c) == self.mul(a, self.mul(b, c))
                && self.mul(a, self.add(b, c)) == self.add(self.mul(a, b), self.mul(a, c))
                && self.add(a, b) == self.add(b, a)
                && self.mul(a, b) == self.mul(b, a);
            if !ok {
                return Err(Error::input(format!("field axioms fail for GF({}) at ({a},{b},{c})", q)));
            }
        }
        Ok(())
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    pub fn order(&self) -> usize {
        self.q
    }

    pub fn characteristic(&self) -> u32 {
        self.spec.p
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn elements(&self) -> impl Iterator<Item = Fe> {
        0..self.q as Fe
    }

    #[inline]
    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        self.add[a as usize * self.q + b as usize]
    }

    #[inline]
    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        self.add(a, self.neg[b as usize])
    }

    #[inline]
    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        self.mul[a as usize * self.q + b as usize]
    }

    #[inline]
    pub fn neg(&self, a: Fe) -> Fe {
        self.neg[a as usize]
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: Fe) -> Option<Fe> {
        (a != 0).then(|| self.inv[a as usize])
    }

    pub fn pow(&self, a: Fe, e: u64) -> Fe {
        let mut result = 1;
        let mut base = a;
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = self.mul(result, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        result
    }

    pub fn is_square(&self, a: Fe) -> bool {
        self.squares[a as usize]
    }

    /// Smallest-encoded non-square, for odd characteristic.
    pub fn first_nonsquare(&self) -> Option<Fe> {
        self.elements().find(|&a| !self.is_square(a))
    }

    /// The integer `n` mapped into the prime subfield.
    pub fn from_int(&self, n: i64) -> Fe {
        n.rem_euclid(self.spec.p as i64) as Fe
    }

    /// Dot product of two vectors.
    pub fn dot(&self, u: &[Fe], v: &[Fe]) -> Fe {
        u.iter().zip(v).fold(0, |acc, (&a, &b)| self.add(acc, self.mul(a, b)))
    }

    /// Scales `v` so its first nonzero entry is 1. Returns `None` for the zero vector.
    pub fn normalize(&self, v: &[Fe]) -> Option<Vec<Fe>> {
        let lead = *v.iter().find(|&&x| x != 0)?;
        let s = self.inv(lead)?;
        Some(v.iter().map(|&x| self.mul(x, s)).collect())
    }

    /// Rank of a list of vectors by Gaussian elimination.
    pub fn rank(&self, rows: &[Vec<Fe>]) -> usize {
        let mut m: Vec<Vec<Fe>> = rows.to_vec();
        let cols = m.first().map_or(0, |r| r.len());
        let mut rank = 0;
        for c in 0..cols {
            let Some(pivot) = (rank..m.len()).find(|&r| m[r][c] != 0) else {
                continue;
            };
            m.swap(rank, pivot);
            let s = self.inv(m[rank][c]).unwrap();
            let prow: Vec<Fe> = m[rank].iter().map(|&x| self.mul(x, s)).collect();
            for r in 0..m.len() {
                if r != rank && m[r][c] != 0 {
                    let f = m[r][c];
                    for k in 0..cols {
                        m[r][k] = self.sub(m[r][k], self.mul(f, prow[k]));
                    }
                }
            }
            m[rank] = prow;
            rank += 1;
        }
        rank
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_supported_fields_build() {
        for q in [2, 3, 4, 5, 7, 8, 9, 16, 25, 27, 49, 81] {
            let f = Field::new(q).unwrap();
            assert_eq!(f.order(), q);
            // multiplicative group is cyclic of order q-1: some element has full order
            let gen = f.elements().skip(1).find(|&a| {
                (1..q as u64 - 1).all(|e| f.pow(a, e) != 1)
            });
            assert!(gen.is_some() || q == 2, "GF({q}) has no primitive element");
        }
    }

    #[test]
    fn rejects_unsupported_orders() {
        assert!(Field::new(6).is_err());
        assert!(Field::new(121).is_err());
        assert!(Field::new(1).is_err());
    }

    #[test]
    fn squares_in_gf9() {
        let f = Field::new(9).unwrap();
        let count = f.elements().skip(1).filter(|&a| f.is_square(a)).count();
        assert_eq!(count, 4);
        let m = f.first_nonsquare().unwrap();
        assert!(!f.is_square(m));
    }

    #[test]
    fn frobenius_is_additive() {
        let f = Field::new(9).unwrap();
        for a in f.elements() {
            for b in f.elements() {
                assert_eq!(f.pow(f.add(a, b), 3), f.add(f.pow(a, 3), f.pow(b, 3)));
            }
        }
    }

    #[test]
    fn rank_of_dependent_rows() {
        let f = Field::new(3).unwrap();
        let rows = vec![vec![1, 0, 1], vec![0, 1, 1], vec![1, 1, 2]];
        assert_eq!(f.rank(&rows), 2);
    }
}
