//! Bound-variable renaming, canonical forms and size metrics.

use std::collections::HashSet;

use itertools::Itertools;
use serde::Serialize;

use super::{render, Expr, Format, Var};

/// Primes every bound variable that would clash with a free variable or an
/// enclosing binder, using the smallest prime count that is still unused.
pub fn rename_bound(e: &Expr) -> Expr {
    let mut taken: HashSet<Var> = e.free_vars().into_iter().collect();
    rename(e, &mut Vec::new(), &mut taken)
}

fn lookup(map: &[(Var, Var)], v: &Var) -> Var {
    map.iter()
        .rev()
        .find(|(from, _)| from == v)
        .map_or_else(|| v.clone(), |(_, to)| to.clone())
}

fn rename(e: &Expr, map: &mut Vec<(Var, Var)>, taken: &mut HashSet<Var>) -> Expr {
    match e {
        Expr::Atom { out, given } => Expr::Atom {
            out: out.iter().map(|v| lookup(map, v)).collect(),
            given: given.iter().map(|v| lookup(map, v)).collect(),
        },
        Expr::Sum { bound, body } => {
            let depth = map.len();
            let mut fresh = Vec::with_capacity(bound.len());
            for b in bound {
                let mut candidate = b.clone();
                while taken.contains(&candidate) {
                    candidate.primes += 1;
                }
                taken.insert(candidate.clone());
                map.push((b.clone(), candidate.clone()));
                fresh.push(candidate);
            }
            let body = rename(body, map, taken);
            for v in &fresh {
                taken.remove(v);
            }
            map.truncate(depth);
            Expr::Sum {
                bound: fresh,
                body: Box::new(body),
            }
        }
        Expr::Product(fs) => Expr::Product(fs.iter().map(|f| rename(f, map, taken)).collect()),
        Expr::Quotient { num, den } => {
            Expr::quotient(rename(num, map, taken), rename(den, map, taken))
        }
    }
}

/// Structural clean-up without renaming: flattens products, merges directly
/// nested sums over disjoint binders, and drops empty binders.
pub fn normalize(e: &Expr) -> Expr {
    match e {
        Expr::Atom { .. } => e.clone(),
        Expr::Sum { bound, body } => {
            let body = normalize(body);
            match body {
                Expr::Sum {
                    bound: inner,
                    body: innermost,
                } if !inner.iter().any(|v| bound.contains(v)) => {
                    let mut merged = bound.clone();
                    merged.extend(inner);
                    Expr::Sum {
                        bound: merged,
                        body: innermost,
                    }
                }
                other => Expr::sum(bound.clone(), other),
            }
        }
        Expr::Product(fs) => Expr::product(fs.iter().map(normalize)),
        Expr::Quotient { num, den } => Expr::quotient(normalize(num), normalize(den)),
    }
}

/// A representative equal for all expressions that differ only in factor
/// order, conditioning-list order, binder order, or bound-variable names.
///
/// Bound variables are renamed `_<depth>_<index>`; among binder orderings
/// consistent with an occurrence signature, the one with the smallest
/// rendering wins.
pub fn canonicalize(e: &Expr) -> Expr {
    canon(&normalize(e), 0, &mut Vec::new())
}

fn key(e: &Expr) -> String {
    render(e, Format::Text)
}

fn canon(e: &Expr, depth: usize, map: &mut Vec<(Var, Var)>) -> Expr {
    match e {
        Expr::Atom { out, given } => {
            let mut out: Vec<Var> = out.iter().map(|v| lookup(map, v)).collect();
            let mut given: Vec<Var> = given.iter().map(|v| lookup(map, v)).collect();
            out.sort();
            given.sort();
            Expr::Atom { out, given }
        }
        Expr::Product(fs) => {
            let mut keyed: Vec<(String, Expr)> = fs
                .iter()
                .map(|f| canon(f, depth, map))
                .flat_map(|f| match f {
                    Expr::Product(inner) => inner,
                    other => vec![other],
                })
                .map(|f| (key(&f), f))
                .collect();
            keyed.sort_by(|a, b| a.0.cmp(&b.0));
            Expr::Product(keyed.into_iter().map(|(_, f)| f).collect())
        }
        Expr::Quotient { num, den } => {
            Expr::quotient(canon(num, depth, map), canon(den, depth, map))
        }
        Expr::Sum { bound, body } => {
            let names: Vec<Var> = (0..bound.len())
                .map(|i| Var::new(format!("_{depth}_{i}")))
                .collect();
            let mut by_signature: Vec<(String, &Var)> = bound
                .iter()
                .map(|b| (signature(body, b, bound, map), b))
                .collect();
            by_signature.sort_by(|a, b| a.0.cmp(&b.0));
            let groups: Vec<Vec<&Var>> = by_signature
                .iter()
                .chunk_by(|(sig, _)| sig.clone())
                .into_iter()
                .map(|(_, g)| g.map(|(_, v)| *v).collect())
                .collect();

            let mut best: Option<(String, Expr)> = None;
            for arrangement in groups
                .iter()
                .map(|g| g.iter().copied().permutations(g.len()))
                .multi_cartesian_product()
            {
                let order: Vec<&Var> = arrangement.into_iter().flatten().collect();
                let mark = map.len();
                for (b, name) in order.iter().zip(&names) {
                    map.push(((*b).clone(), name.clone()));
                }
                let candidate = canon(body, depth + 1, map);
                map.truncate(mark);
                let k = key(&candidate);
                if best.as_ref().is_none_or(|(bk, _)| k < *bk) {
                    best = Some((k, candidate));
                }
            }
            let (_, body) = best.expect("at least one arrangement");
            Expr::Sum {
                bound: names,
                body: Box::new(body),
            }
        }
    }
}

/// Sorted occurrences of `target` inside `body`, with other binders of the
/// same sum and inner binders anonymized. Invariant under renaming and
/// reordering, so it can safely restrict which binder orders are tried.
fn signature(body: &Expr, target: &Var, level: &[Var], map: &[(Var, Var)]) -> String {
    fn walk(
        e: &Expr,
        target: &Var,
        level: &[Var],
        map: &[(Var, Var)],
        inner: &mut Vec<Var>,
        acc: &mut Vec<String>,
    ) {
        match e {
            Expr::Atom { out, given } => {
                let token = |v: &Var| -> String {
                    if inner.contains(v) || (level.contains(v) && v != target) {
                        "~".into()
                    } else if v == target {
                        "*".into()
                    } else {
                        lookup(map, v).to_string()
                    }
                };
                let hit = out
                    .iter()
                    .chain(given)
                    .any(|v| v == target && !inner.contains(v));
                if hit {
                    let mut o: Vec<String> = out.iter().map(token).collect();
                    let mut g: Vec<String> = given.iter().map(token).collect();
                    o.sort();
                    g.sort();
                    acc.push(format!("{}|{}", o.join(","), g.join(",")));
                }
            }
            Expr::Sum { bound, body } => {
                let mark = inner.len();
                inner.extend(bound.iter().cloned());
                walk(body, target, level, map, inner, acc);
                inner.truncate(mark);
            }
            Expr::Product(fs) => fs
                .iter()
                .for_each(|f| walk(f, target, level, map, inner, acc)),
            Expr::Quotient { num, den } => {
                walk(num, target, level, map, inner, acc);
                walk(den, target, level, map, inner, acc);
            }
        }
    }
    let mut acc = Vec::new();
    walk(body, target, level, map, &mut Vec::new(), &mut acc);
    acc.sort();
    acc.join(";")
}

/// Node and variable counts of an expression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Metrics {
    pub sum_nodes: usize,
    pub quotient_nodes: usize,
    pub atom_nodes: usize,
    /// Distinct base names; primed copies do not count separately.
    pub distinct_variables: usize,
}

/// Counts taken on the normalized form, which has the same shape as the
/// canonical form.
pub fn metrics(e: &Expr) -> Metrics {
    let mut m = Metrics {
        sum_nodes: 0,
        quotient_nodes: 0,
        atom_nodes: 0,
        distinct_variables: e.base_names().len(),
    };
    normalize(e).visit(&mut |node| match node {
        Expr::Atom { .. } => m.atom_nodes += 1,
        Expr::Sum { .. } => m.sum_nodes += 1,
        Expr::Quotient { .. } => m.quotient_nodes += 1,
        Expr::Product(_) => {}
    });
    m
}
