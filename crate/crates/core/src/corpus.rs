//! Worked-example graphs bundled with the crate.
//!
//! Each graph lists its vertices on the first line so that topological ties
//! break the same way every time.

use crate::graph::Smg;

macro_rules! corpus {
    ($($name:literal),* $(,)?) => {
        /// `(name, source text)` for every bundled graph.
        pub const GRAPHS: &[(&str, &str)] = &[
            $(($name, include_str!(concat!("../corpus/", $name, ".g")))),*
        ];
    };
}

corpus!(
    "showcase",
    "frontdoor_with_ancestors",
    "double_outcome",
    "projection_guard",
    "projection_guard_latent",
    "detachable_pair",
    "detachable_chain",
    "projectable_mediator",
    "order_sensitive",
    "recursive_interceptor",
    "recursive_connector",
    "recursive_latent",
    "bow",
);

pub fn source(name: &str) -> Option<&'static str> {
    GRAPHS.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

/// Parses a bundled graph.
///
/// # Panics
///
/// If `name` is unknown.
pub fn load(name: &str) -> Smg {
    source(name)
        .unwrap_or_else(|| panic!("no corpus graph `{name}`"))
        .parse()
        .expect("corpus graphs parse")
}
