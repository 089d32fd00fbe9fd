//! Line-oriented graph text format.
//!
//! ```text
//! # comment
//! W1 W2 X Z Y        # optional: declare vertices (fixes their order)
//! W1 -> X
//! X <-> Y
//! latent U           # switches to latent-DAG mode
//! ```

use thiserror::Error;

use super::{is_valid_name, GraphError, LatentDag, Smg, SmgBuilder, VarSet};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("no vertices")]
    Empty,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Either kind of graph the text format can describe.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GraphSource {
    Smg(Smg),
    LatentDag(LatentDag),
}

impl GraphSource {
    /// The graph over observed vertices; latent DAGs are projected.
    pub fn into_smg(self) -> Result<Smg, ParseError> {
        match self {
            GraphSource::Smg(g) => Ok(g),
            GraphSource::LatentDag(d) => Ok(d.project(&d.observed())?),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ParsedGraph {
    pub graph: GraphSource,
    /// Non-fatal issues such as repeated edges.
    pub warnings: Vec<String>,
}

pub fn parse_graph(text: &str) -> Result<ParsedGraph, ParseError> {
    let mut builder = SmgBuilder::new();
    let mut latent = VarSet::new();
    let mut saw_bidirected = false;
    let mut warnings = Vec::new();

    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let syntax = |message: String| ParseError::Syntax { line, message };
        let name = |token: &str| -> Result<String, ParseError> {
            let token = token.trim();
            if is_valid_name(token) && token != "latent" {
                Ok(token.to_string())
            } else {
                Err(syntax(format!("invalid vertex name `{token}`")))
            }
        };

        if let Some((a, b)) = content.split_once("<->") {
            let (a, b) = (name(a)?, name(b)?);
            if a == b {
                return Err(syntax(format!("self-loop on `{a}`")));
            }
            if builder.has_bidirected(&a, &b) {
                warnings.push(format!("line {line}: duplicate edge {a} <-> {b}"));
            }
            builder.bidirected(a, b);
            saw_bidirected = true;
        } else if let Some((a, b)) = content.split_once("->") {
            let (a, b) = (name(a)?, name(b)?);
            if a == b {
                return Err(syntax(format!("self-loop on `{a}`")));
            }
            if builder.has_directed(&a, &b) {
                warnings.push(format!("line {line}: duplicate edge {a} -> {b}"));
            }
            builder.directed(a, b);
        } else {
            let mut tokens = content.split_whitespace().peekable();
            let is_latent = tokens.peek() == Some(&"latent");
            if is_latent {
                tokens.next();
            }
            for token in tokens {
                let v = name(token)?;
                builder.vertex(v.clone());
                if is_latent {
                    latent.insert(v);
                }
            }
        }
    }

    let smg = builder.build()?;
    if smg.is_empty() {
        return Err(ParseError::Empty);
    }
    let graph = if latent.is_empty() {
        GraphSource::Smg(smg)
    } else {
        if saw_bidirected {
            return Err(GraphError::BidirectedInDag.into());
        }
        GraphSource::LatentDag(LatentDag::new(smg, latent)?)
    };
    Ok(ParsedGraph { graph, warnings })
}
