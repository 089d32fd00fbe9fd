//! Parsers for the text and JSON renderings.
//!
//! Text grammar:
//!
//! ```text
//! expr   := factor+
//! factor := 'P(' vars ('|' vars)? ')'
//!         | 'sum_{' vars '}' '[' expr ']'
//!         | '(' expr '/' expr ')'
//! var    := name "'"*
//! ```

use super::{Expr, ExprError, Var};

pub fn parse_text(input: &str) -> Result<Expr, ExprError> {
    let mut p = Parser {
        src: input.as_bytes(),
        pos: 0,
    };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(e)
}

pub fn from_json(input: &str) -> Result<Expr, ExprError> {
    serde_json::from_str(input).map_err(|e| ExprError::Json(e.to_string()))
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> ExprError {
        ExprError::Parse {
            pos: self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek_is(&mut self, token: &str) -> bool {
        self.skip_ws();
        self.src[self.pos..].starts_with(token.as_bytes())
    }

    fn expect(&mut self, token: &str) -> Result<(), ExprError> {
        if self.peek_is(token) {
            self.pos += token.len();
            Ok(())
        } else {
            Err(self.error(&format!("expected `{token}`")))
        }
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut factors = Vec::new();
        loop {
            self.skip_ws();
            if self.peek_is("P(") || self.peek_is("sum_{") || self.peek_is("(") {
                factors.push(self.factor()?);
            } else {
                break;
            }
        }
        match factors.len() {
            0 => Err(self.error("expected an expression")),
            1 => Ok(factors.pop().expect("one factor")),
            _ => Ok(Expr::Product(factors)),
        }
    }

    fn factor(&mut self) -> Result<Expr, ExprError> {
        if self.peek_is("P(") {
            self.expect("P(")?;
            let out = self.vars()?;
            let given = if self.peek_is("|") {
                self.expect("|")?;
                self.vars()?
            } else {
                Vec::new()
            };
            self.expect(")")?;
            Ok(Expr::Atom { out, given })
        } else if self.peek_is("sum_{") {
            self.expect("sum_{")?;
            let bound = self.vars()?;
            self.expect("}")?;
            self.expect("[")?;
            let body = self.expr()?;
            self.expect("]")?;
            Ok(Expr::Sum {
                bound,
                body: Box::new(body),
            })
        } else {
            self.expect("(")?;
            let num = self.expr()?;
            self.expect("/")?;
            let den = self.expr()?;
            self.expect(")")?;
            Ok(Expr::quotient(num, den))
        }
    }

    fn vars(&mut self) -> Result<Vec<Var>, ExprError> {
        let mut vars = vec![self.var()?];
        while self.peek_is(",") {
            self.expect(",")?;
            vars.push(self.var()?);
        }
        Ok(vars)
    }

    fn var(&mut self) -> Result<Var, ExprError> {
        self.skip_ws();
        let start = self.pos;
        let bytes = self.src;
        if self.pos >= bytes.len() || !bytes[self.pos].is_ascii_alphabetic() {
            return Err(self.error("expected a variable name"));
        }
        while self.pos < bytes.len()
            && (bytes[self.pos].is_ascii_alphanumeric() || bytes[self.pos] == b'_')
        {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&bytes[start..self.pos])
            .expect("ascii")
            .to_string();
        let mut primes = 0;
        while self.pos < bytes.len() && bytes[self.pos] == b'\'' {
            primes += 1;
            self.pos += 1;
        }
        Ok(Var { name, primes })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expression::{render, Format};

    #[test]
    fn text_round_trip() {
        let src = "sum_{Z} [ P(Z|X) sum_{X'} [ P(Y|X',Z) P(X') ] ]";
        let e = parse_text(src).unwrap();
        assert_eq!(render(&e, Format::Text), src);
        let q = "( sum_{Z2} [ P(Y|Z2,X) P(Z2) ] / sum_{Z2,Y} [ P(Y|Z2,X) P(Z2) ] ) P(A)";
        assert_eq!(render(&parse_text(q).unwrap(), Format::Text), q);
    }

    #[test]
    fn errors_report_position() {
        assert!(matches!(
            parse_text("P(Y|"),
            Err(ExprError::Parse { pos: 4, .. })
        ));
        assert!(parse_text("P(Y) junk").is_err());
    }
}
