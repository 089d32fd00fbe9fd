//! Text, LaTeX and JSON serialization.

use std::fmt::Write;
use std::str::FromStr;

use super::{Expr, Var};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    /// `sum_{a,b} [ ... ]`, quotients as `( num / den )`, names verbatim.
    Text,
    /// Lowercase values with subscripted digits and `\prime` marks.
    Latex,
    /// Lossless AST encoding.
    Json,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "text" => Ok(Format::Text),
            "latex" => Ok(Format::Latex),
            "json" => Ok(Format::Json),
            other => Err(format!(
                "unknown format `{other}` (expected text, latex or json)"
            )),
        }
    }
}

pub fn render(e: &Expr, format: Format) -> String {
    let mut out = String::new();
    match format {
        Format::Text => text(e, &mut out),
        Format::Latex => latex(e, &mut out),
        Format::Json => out = serde_json::to_string(e).expect("expressions always serialize"),
    }
    out
}

fn join<T>(items: &[T], out: &mut String, mut each: impl FnMut(&T, &mut String)) {
    for (i, item) in items.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        each(item, out);
    }
}

fn text_var(v: &Var, out: &mut String) {
    write!(out, "{v}").expect("write to string");
}

fn text(e: &Expr, out: &mut String) {
    match e {
        Expr::Atom { out: o, given } => {
            out.push_str("P(");
            join(o, out, text_var);
            if !given.is_empty() {
                out.push('|');
                join(given, out, text_var);
            }
            out.push(')');
        }
        Expr::Sum { bound, body } => {
            out.push_str("sum_{");
            join(bound, out, text_var);
            out.push_str("} [ ");
            text(body, out);
            out.push_str(" ]");
        }
        Expr::Product(fs) => {
            for (i, f) in fs.iter().enumerate() {
                if i > 0 {
                    out.push(' ');
                }
                text(f, out);
            }
        }
        Expr::Quotient { num, den } => {
            out.push_str("( ");
            text(num, out);
            out.push_str(" / ");
            text(den, out);
            out.push_str(" )");
        }
    }
}

/// `Z1` becomes `z_1`, `X_12` becomes `x_{12}`, primes become `^{\prime}`.
fn latex_var(v: &Var, out: &mut String) {
    let lower = v.name.to_lowercase();
    let (stem, index) = match lower.split_once('_') {
        Some((stem, index)) => (stem.to_string(), index.to_string()),
        None => {
            let cut = lower.trim_end_matches(|c: char| c.is_ascii_digit()).len();
            (lower[..cut].to_string(), lower[cut..].to_string())
        }
    };
    let stem = if stem.is_empty() { lower.clone() } else { stem };
    out.push_str(&stem);
    if !index.is_empty() && stem != lower {
        if index.chars().count() == 1 {
            write!(out, "_{index}").expect("write to string");
        } else {
            write!(out, "_{{{index}}}").expect("write to string");
        }
    }
    if v.primes > 0 {
        out.push_str("^{");
        for _ in 0..v.primes {
            out.push_str("\\prime");
        }
        out.push('}');
    }
}

fn latex(e: &Expr, out: &mut String) {
    match e {
        Expr::Atom { out: o, given } => {
            out.push_str("P(");
            join(o, out, latex_var);
            if !given.is_empty() {
                out.push('|');
                join(given, out, latex_var);
            }
            out.push(')');
        }
        Expr::Sum { bound, body } => {
            out.push_str("\\sum_{");
            join(bound, out, latex_var);
            out.push('}');
            latex(body, out);
        }
        Expr::Product(fs) => {
            for f in fs {
                if matches!(f, Expr::Sum { .. }) {
                    out.push_str("\\left(");
                    latex(f, out);
                    out.push_str("\\right)");
                } else {
                    latex(f, out);
                }
            }
        }
        Expr::Quotient { num, den } => {
            out.push_str("\\frac{");
            latex(num, out);
            out.push_str("}{");
            latex(den, out);
            out.push('}');
        }
    }
}
