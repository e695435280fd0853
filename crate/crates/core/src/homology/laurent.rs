use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

/// A Laurent polynomial in `q` with integer coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    terms: BTreeMap<i64, i64>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(1, 0)
    }

    pub fn monomial(coeff: i64, exp: i64) -> Self {
        let mut p = Self::default();
        p.add_term(coeff, exp);
        p
    }

    /// `q^2 + 1 + q^-2`
    pub fn circle() -> Self {
        Self::from_terms(&[(2, 1), (0, 1), (-2, 1)])
    }

    /// `q + q^-1`
    pub fn digon() -> Self {
        Self::from_terms(&[(1, 1), (-1, 1)])
    }

    pub fn from_terms(terms: &[(i64, i64)]) -> Self {
        let mut p = Self::default();
        for &(e, c) in terms {
            p.add_term(c, e);
        }
        p
    }

    pub fn add_term(&mut self, coeff: i64, exp: i64) {
        if coeff == 0 {
            return;
        }
        let c = self.terms.entry(exp).or_insert(0);
        *c += coeff;
        if *c == 0 {
            self.terms.remove(&exp);
        }
    }

    pub fn coeff(&self, exp: i64) -> i64 {
        self.terms.get(&exp).copied().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        self.terms.iter().map(|(&e, &c)| (e, c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Multiply by `q^k`.
    pub fn shift(&self, k: i64) -> Self {
        LaurentPoly { terms: self.terms.iter().map(|(&e, &c)| (e + k, c)).collect() }
    }

    pub fn scale(&self, k: i64) -> Self {
        if k == 0 {
            return Self::zero();
        }
        LaurentPoly { terms: self.terms.iter().map(|(&e, &c)| (e, c * k)).collect() }
    }

    /// Substitute `q -> q^-1`.
    pub fn bar(&self) -> Self {
        LaurentPoly { terms: self.terms.iter().map(|(&e, &c)| (-e, c)).collect() }
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Self::one(), |acc, _| &acc * self)
    }
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, o: &LaurentPoly) -> LaurentPoly {
        let mut p = self.clone();
        for (e, c) in o.terms() {
            p.add_term(c, e);
        }
        p
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, o: &LaurentPoly) -> LaurentPoly {
        let mut p = self.clone();
        for (e, c) in o.terms() {
            p.add_term(-c, e);
        }
        p
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        self.scale(-1)
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, o: &LaurentPoly) -> LaurentPoly {
        let mut p = LaurentPoly::zero();
        for (e1, c1) in self.terms() {
            for (e2, c2) in o.terms() {
                p.add_term(c1 * c2, e1 + e2);
            }
        }
        p
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&e, &c) in self.terms.iter().rev() {
            let sign = if c < 0 { "-" } else if first { "" } else { "+" };
            let a = c.abs();
            let coeff = if a == 1 && e != 0 { String::new() } else { a.to_string() };
            let mono = match e {
                0 => String::new(),
                1 => "q".into(),
                _ => format!("q^{e}"),
            };
            if first {
                write!(f, "{sign}{coeff}{mono}")?;
            } else {
                write!(f, " {sign} {coeff}{mono}")?;
            }
            first = false;
        }
        Ok(())
    }
}

impl Serialize for LaurentPoly {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(self.terms.len()))?;
        for (e, c) in self.terms() {
            m.serialize_entry(&e.to_string(), &c)?;
        }
        m.end()
    }
}
