//! Causal effect identification over semi-Markovian graphs.
//!
//! The crate provides the classic recursive identification algorithm, a
//! variant that prunes the graph before and during recursion, the symbolic
//! expressions both produce, and a brute-force numeric oracle for checking
//! those expressions on small discrete models.
//!
//! ```
//! use idprune::graph::{set, Smg};
//! use idprune::identify::{Pid, Identifier, Query};
//! use idprune::expression::{render, Format};
//!
//! let g: Smg = "X -> Z\nZ -> Y\nX <-> Y".parse().unwrap();
//! let query = Query::new(g, set(["Y"]), set(["X"])).unwrap();
//! let result = Pid::default().identify(&query).unwrap();
//! let expr = result.expression().unwrap();
//! assert_eq!(render(expr, Format::Text), "sum_{Z} [ P(Z|X) sum_{X'} [ P(Y|X',Z) P(X') ] ]");
//! ```

pub mod components;
pub mod corpus;
pub mod expression;
pub mod graph;
pub mod identify;
pub mod oracle;
pub mod separation;
