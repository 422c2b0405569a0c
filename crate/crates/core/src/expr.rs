//! Parser for exact value literals such as `1+sqrt(2)`, `(1+sqrt(5))/2`, `3/4 - 2*w` or
//! `sqrt(3)+sqrt(2)`.
//!
//! Atoms: integers, `w` (the ring's basis element ω), `i` (√−1) and `sqrt(expr)`.
//! A value may involve at most one square root that is not already in the fraction field.

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::ring::{RElem, RelQuad, Ring};

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
    ring: &'a Ring,
}

fn perr(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn combine(x: &RelQuad, y: &RelQuad) -> Result<()> {
    if x.in_base().is_none() && y.in_base().is_none() && x.delta() != y.delta() {
        return Err(perr(format!("more than one radicand: {} and {}", x.delta(), y.delta())));
    }
    Ok(())
}

impl<'a> Parser<'a> {
    fn peek(&mut self) -> Option<u8> {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        self.s.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(perr(format!("expected '{}' at offset {}", c as char, self.pos)))
        }
    }

    fn expr(&mut self) -> Result<RelQuad> {
        let mut acc = self.term()?;
        loop {
            if self.eat(b'+') {
                let t = self.term()?;
                combine(&acc, &t)?;
                acc = acc.add(&t);
            } else if self.eat(b'-') {
                let t = self.term()?;
                combine(&acc, &t)?;
                acc = acc.sub(&t);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<RelQuad> {
        let mut acc = self.unary()?;
        loop {
            if self.eat(b'*') {
                let t = self.unary()?;
                combine(&acc, &t)?;
                acc = acc.mul(&t);
            } else if self.eat(b'/') {
                let t = self.unary()?;
                combine(&acc, &t)?;
                acc = acc.div(&t)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<RelQuad> {
        if self.eat(b'-') {
            return Ok(self.unary()?.neg());
        }
        if self.eat(b'+') {
            return self.unary();
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<RelQuad> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let v = self.expr()?;
                self.expect(b')')?;
                Ok(v)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let txt = std::str::from_utf8(&self.s[start..self.pos]).unwrap();
                let n: BigInt = txt.parse().map_err(|_| perr(format!("bad integer {txt}")))?;
                Ok(RelQuad::from_base(RElem::from_bigint(n)))
            }
            Some(b'w') => {
                self.pos += 1;
                if self.ring.is_rational() {
                    return Err(perr(format!("w is undefined over {}", self.ring)));
                }
                Ok(RelQuad::from_base(self.ring.omega()))
            }
            Some(b'i') => {
                self.pos += 1;
                Ok(self.radical(RElem::from_int(-1)))
            }
            Some(b's') => {
                if !self.s[self.pos..].starts_with(b"sqrt") {
                    return Err(perr(format!("unexpected input at offset {}", self.pos)));
                }
                self.pos += 4;
                self.expect(b'(')?;
                let v = self.expr()?;
                self.expect(b')')?;
                let Some(d) = v.in_base() else {
                    return Err(perr("nested square roots are not supported"));
                };
                Ok(self.radical(d.clone()))
            }
            _ => Err(perr(format!("unexpected input at offset {}", self.pos))),
        }
    }

    /// `√δ`, folded into the ring's basis when `δ` is `d` times a rational square.
    fn radical(&self, delta: RElem) -> RelQuad {
        let z = RelQuad::sqrt_of(delta.clone());
        if z.in_base().is_some() || self.ring.is_rational() {
            return z;
        }
        // δ rational with δ/d a rational square: √δ = q·√d
        if let (Some(dq), Some(d)) = (delta.as_rational(), self.ring.d()) {
            let ratio = dq / num_rational::BigRational::from_integer(d.into());
            if let Some(q) = crate::ring::rational_sqrt(&ratio) {
                let w = self.ring.omega();
                let sqrt_d = match self.ring.basis() {
                    crate::ring::Basis::HalfSqrt(_) => &(&w + &w) - &RElem::one(),
                    _ => w,
                };
                return RelQuad::from_base(&sqrt_d * &RElem::from_ratio(&q));
            }
        }
        z
    }
}

/// Parse a value over the fraction field of `ring`, possibly adjoining one square root.
pub fn parse_value(s: &str, ring: &Ring) -> Result<RelQuad> {
    let mut p = Parser { s: s.as_bytes(), pos: 0, ring };
    let v = p.expr()?;
    if p.peek().is_some() {
        return Err(perr(format!("trailing input at offset {} in {s:?}", p.pos)));
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::QuadIrr;

    #[test]
    fn rational_radicals() {
        let z = Ring::integers();
        let v = parse_value("(1+sqrt(5))/2", &z).unwrap();
        assert_eq!(QuadIrr::from_relquad(&v).unwrap(), QuadIrr::from_i64(1, 1, 2, 5).unwrap());
        let v = parse_value("sqrt(8) - 1", &z).unwrap();
        assert_eq!(QuadIrr::from_relquad(&v).unwrap(), QuadIrr::from_i64(-1, 2, 1, 2).unwrap());
        assert!(parse_value("sqrt(2)+sqrt(3)", &z).is_err());
    }

    #[test]
    fn ring_elements() {
        let g = Ring::gaussian();
        assert_eq!(g.parse_elem("2+i").unwrap(), g.elem(2, 1));
        assert_eq!(g.parse_elem("2+w").unwrap(), g.elem(2, 1));
        assert_eq!(g.parse_elem("sqrt(-4)").unwrap(), g.elem(0, 2));
        assert!(g.parse_elem("1/2").is_err());
        let r: Ring = "Z[sqrt(2)]".parse().unwrap();
        assert_eq!(r.parse_elem("1+sqrt(2)").unwrap(), r.elem(1, 1));
        assert_eq!(r.parse_elem("sqrt(8)").unwrap(), r.elem(0, 2));
        let o: Ring = "O(5)".parse().unwrap();
        assert_eq!(o.parse_elem("(1+sqrt(5))/2").unwrap(), o.omega());
        let z2: Ring = "Z[1/2]".parse().unwrap();
        assert_eq!(z2.parse_elem("-7/4").unwrap().height_u64(), 7);
    }

    #[test]
    fn relative_extension() {
        let r: Ring = "Z[sqrt(2)]".parse().unwrap();
        let v = parse_value("sqrt(2)+sqrt(3)", &r).unwrap();
        assert_eq!(v.rel_norm(), RElem::from_int(-1));
        let g = Ring::gaussian();
        let v = parse_value("sqrt(2*i)", &g).unwrap();
        assert_eq!(v.in_base(), Some(&g.elem(1, 1)));
    }
}
