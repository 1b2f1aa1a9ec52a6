//! GF(2) Laurent polynomials in the delay operator D.
//!
//! Canonical form: the stored coefficient range starts and ends with a 1
//! unless the polynomial is zero, which is `(low = 0, no coefficients)`.
//! That makes equality structural, which the golden-matrix tests rely on.

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    low: i64,
    coeffs: Vec<bool>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self { low: 0, coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::monomial(0)
    }

    /// D^e
    pub fn monomial(e: i64) -> Self {
        Self { low: e, coeffs: vec![true] }
    }

    /// Polynomial with ones at the given exponents.
    pub fn from_exponents(exps: &[i64]) -> Self {
        let mut p = Self::zero();
        for &e in exps {
            p = p.add(&Self::monomial(e));
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Lowest exponent with a nonzero coefficient.
    pub fn low(&self) -> Option<i64> {
        (!self.is_zero()).then_some(self.low)
    }

    /// Highest exponent with a nonzero coefficient.
    pub fn high(&self) -> Option<i64> {
        (!self.is_zero()).then(|| self.low + self.coeffs.len() as i64 - 1)
    }

    /// Number of exponents spanned (0 for the zero polynomial).
    pub fn span(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeff(&self, e: i64) -> bool {
        if self.is_zero() || e < self.low {
            return false;
        }
        let idx = (e - self.low) as usize;
        self.coeffs.get(idx).copied().unwrap_or(false)
    }

    pub fn exponents(&self) -> Vec<i64> {
        self.coeffs
            .iter()
            .enumerate()
            .filter_map(|(i, &c)| c.then_some(self.low + i as i64))
            .collect()
    }

    /// `Some(e)` if the polynomial is exactly D^e.
    pub fn as_monomial(&self) -> Option<i64> {
        (self.coeffs.len() == 1).then_some(self.low)
    }

    fn normalized(mut low: i64, mut coeffs: Vec<bool>) -> Self {
        while coeffs.last() == Some(&false) {
            coeffs.pop();
        }
        let lead_zeros = coeffs.iter().take_while(|&&c| !c).count();
        if lead_zeros > 0 {
            coeffs.drain(..lead_zeros);
            low += lead_zeros as i64;
        }
        if coeffs.is_empty() {
            Self::zero()
        } else {
            Self { low, coeffs }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let low = self.low.min(other.low);
        let high = self.high().unwrap().max(other.high().unwrap());
        let mut coeffs = vec![false; (high - low + 1) as usize];
        for e in self.exponents() {
            coeffs[(e - low) as usize] ^= true;
        }
        for e in other.exponents() {
            coeffs[(e - low) as usize] ^= true;
        }
        Self::normalized(low, coeffs)
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let low = self.low + other.low;
        let mut coeffs = vec![false; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if !a {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                if b {
                    coeffs[i + j] ^= true;
                }
            }
        }
        Self::normalized(low, coeffs)
    }

    /// Substitutes D -> D^-1, mapping every exponent e to -e.
    pub fn reverse(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs: Vec<bool> = self.coeffs.clone();
        coeffs.reverse();
        Self::normalized(-self.high().unwrap(), coeffs)
    }

    /// Multiplies by D^e.
    pub fn shifted(&self, e: i64) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        Self { low: self.low + e, coeffs: self.coeffs.clone() }
    }

    /// Polynomial division of shift-normalized operands: self = q·div + r
    /// with span(r) < span(div), operating on the coefficient strings (lows
    /// are normalized away, which is legitimate up to recorded shifts).
    pub fn div_rem_spans(&self, div: &Self) -> (Self, Self) {
        assert!(!div.is_zero());
        let mut rem = Self::normalized(0, self.coeffs.clone());
        let d = Self::normalized(0, div.coeffs.clone());
        let mut quot = Self::zero();
        while !rem.is_zero() && rem.span() >= d.span() {
            let shift = (rem.span() - d.span()) as i64;
            quot = quot.add(&Self::monomial(shift));
            rem = rem.add(&d.shifted(shift));
        }
        (quot, rem)
    }

    /// Parses terms like `0`, `1`, `D`, `D^3`, `D^-2+D^-1+1`, `1+D`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::Parse { line: 1, msg: "empty polynomial".into() });
        }
        if s == "0" {
            return Ok(Self::zero());
        }
        let mut p = Self::zero();
        for term in s.split('+') {
            let term = term.trim();
            let e = if term == "1" {
                0
            } else if term == "D" {
                1
            } else if let Some(rest) = term.strip_prefix("D^") {
                rest.parse::<i64>().map_err(|_| Error::Parse {
                    line: 1,
                    msg: format!("bad exponent in {term:?}"),
                })?
            } else {
                return Err(Error::Parse { line: 1, msg: format!("bad term {term:?}") });
            };
            if p.coeff(e) {
                return Err(Error::Parse { line: 1, msg: format!("duplicate exponent {e}") });
            }
            p = p.add(&Self::monomial(e));
        }
        Ok(p)
    }
}

impl std::fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for e in self.exponents() {
            if !first {
                write!(f, "+")?;
            }
            first = false;
            match e {
                0 => write!(f, "1")?,
                1 => write!(f, "D")?,
                _ => write!(f, "D^{e}")?,
            }
        }
        Ok(())
    }
}

impl std::fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> LaurentPoly {
        LaurentPoly::parse(s).unwrap()
    }

    #[test]
    fn characteristic_two_addition() {
        assert!(p("1+D").add(&p("1+D")).is_zero());
        assert_eq!(p("1+D").add(&p("D")), p("1"));
    }

    #[test]
    fn multiplication() {
        assert_eq!(p("1+D").mul(&p("1+D")), p("1+D^2"));
        assert_eq!(p("D^-1+1").mul(&p("D")), p("1+D"));
        assert!(p("0").mul(&p("1+D")).is_zero());
    }

    #[test]
    fn reverse_maps_exponents() {
        assert_eq!(p("D+D^3").reverse(), p("D^-3+D^-1"));
        assert_eq!(p("1").reverse(), p("1"));
        assert_eq!(p("D^-2+1").reverse(), p("1+D^2"));
    }

    #[test]
    fn canonical_form_and_display() {
        assert_eq!(p("D^-2+D^-1+1").to_string(), "D^-2+D^-1+1");
        assert_eq!(p("1+D").to_string(), "1+D");
        assert_eq!(p("0").to_string(), "0");
        assert_eq!(LaurentPoly::from_exponents(&[3, 1]).to_string(), "D+D^3");
        assert_eq!(LaurentPoly::from_exponents(&[1, 1]).to_string(), "0");
        assert!(LaurentPoly::parse("D+Q").is_err());
        assert!(LaurentPoly::parse("D+D").is_err());
    }

    #[test]
    fn monomial_detection() {
        assert_eq!(p("D^-2").as_monomial(), Some(-2));
        assert_eq!(p("1+D").as_monomial(), None);
        assert_eq!(p("0").as_monomial(), None);
    }

    #[test]
    fn division_by_spans() {
        let (q, r) = p("1+D^2").div_rem_spans(&p("1+D"));
        // (1+D^2) = (1+D)(1+D): remainder zero
        assert_eq!(q, p("1+D"));
        assert!(r.is_zero());
        let (_q, r) = p("1+D+D^3").div_rem_spans(&p("1+D"));
        assert!(!r.is_zero());
        assert!(r.span() < 2);
    }
}
