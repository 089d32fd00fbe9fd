mod common;

use common::{equivalent, expr, vs, TOL};
use idprune::corpus;
use idprune::expression::{
    canonicalize, from_json, metrics, parse_text, rename_bound, render, Distribution, Expr,
    ExprError, Format, Metrics, Var,
};
use idprune::graph::VarSet;
use idprune::oracle::{
    eval_expression, for_each_config, observational_joint, sample_scm, Assignment,
};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SHOWCASE_PID: &str = "sum_{Z2,Z1} [ sum_{X'} [ P(Y|Z2,Z1,X') P(X'|Z2) P(Z2) ] P(Z1|Z2,X) ]";

#[test]
fn marginal_of_joint_is_joint() {
    let d = Distribution::joint(vs(&["X", "Y", "Z"]));
    let m = d.marginalize(&vs(&["Z"])).unwrap();
    assert!(m.is_atomic());
    assert_eq!(m.expr(), &expr("P(X,Y)"));
    assert_eq!(d.marginalize(&VarSet::new()).unwrap(), d);
    assert_eq!(
        d.marginalize(&vs(&["Q"])),
        Err(ExprError::NotInScope("Q".into()))
    );
}

#[test]
fn marginal_of_derived_distribution_joins_outer_sum() {
    let restricted = Distribution::derived(
        expr("sum_{Z2} [ P(Y|Z3,Z2,Z1,X) P(X|Z3,Z2,Z1) P(Z2|Z3) P(Z3) ]"),
        vs(&["Z3", "X", "Y"]),
    );
    let m = restricted.marginalize(&vs(&["Z3"])).unwrap();
    assert_eq!(m.scope(), &vs(&["X", "Y"]));
    assert!(equivalent(
        m.expr(),
        &expr("sum_{Z2,Z3} [ P(Y|Z3,Z2,Z1,X) P(X|Z3,Z2,Z1) P(Z2|Z3) P(Z3) ]")
    ));
}

#[test]
fn chain_rule_on_joint_gives_atoms() {
    let d = Distribution::joint(vs(&["X", "Y"]));
    let order = ["X".to_string(), "Y".to_string()];
    assert_eq!(
        d.chain_factorize(&vs(&["Y"]), &order).unwrap(),
        expr("P(Y|X)")
    );
    assert_eq!(
        d.chain_factorize(&vs(&["Y"]), &order[..1]),
        Err(ExprError::OrderMismatch)
    );
}

#[test]
fn chain_rule_over_every_vertex_lists_latest_first() {
    let g = corpus::load("showcase");
    let d = Distribution::joint(g.vertices().clone());
    let product = d
        .chain_factorize(g.vertices(), &g.topological_order())
        .unwrap();
    assert_eq!(
        render(&product, Format::Text),
        "P(Y|W1,Z2,Z4,W2,Z3,X,Z1) P(Z1|W1,Z2,Z4,W2,Z3,X) P(X|W1,Z2,Z4,W2,Z3) P(Z3|W1,Z2,Z4,W2) \
         P(W2|W1,Z2,Z4) P(Z4|W1,Z2) P(Z2|W1) P(W1)"
    );
}

#[test]
fn conditional_of_derived_distribution_is_quotient() {
    let d = Distribution::derived(expr("P(Y|Z2,Z1,X) P(X|Z2,Z1) P(Z2)"), vs(&["Z2", "X", "Y"]));
    let q = d.conditional("Y", &vs(&["X"])).unwrap();
    assert!(matches!(q, Expr::Quotient { .. }));
    assert!(equivalent(
        &q,
        &expr(
            "( sum_{Z2} [ P(Y|Z2,Z1,X) P(X|Z2,Z1) P(Z2) ] / sum_{Z2,Y'} [ P(Y'|Z2,Z1,X) P(X|Z2,Z1) P(Z2) ] )"
        )
    ));
    // Without a conditioning set the marginal itself is returned.
    assert!(!matches!(
        d.conditional("Z2", &VarSet::new()).unwrap(),
        Expr::Quotient { .. }
    ));
}

#[test]
fn renaming_examples() {
    let e = expr("sum_{Z} [ P(Z|X) sum_{X} [ P(Y|X,Z) P(X) ] ]");
    assert_eq!(
        rename_bound(&e),
        expr("sum_{Z} [ P(Z|X) sum_{X'} [ P(Y|X',Z) P(X') ] ]")
    );
    let clean = expr("sum_{Z} [ P(Z|X) P(Y|Z) ]");
    assert_eq!(rename_bound(&clean), clean);
    let nested = Expr::product([
        expr("P(X)"),
        Expr::sum(
            vec!["X".into()],
            Expr::product([expr("P(X)"), Expr::sum(vec!["X".into()], expr("P(X)"))]),
        ),
    ]);
    assert_eq!(
        rename_bound(&nested),
        expr("P(X) sum_{X'} [ P(X') sum_{X''} [ P(X'') ] ]")
    );
}

#[test]
fn canonical_examples() {
    assert_eq!(canonicalize(&expr("P(B) P(A)")), expr("P(A) P(B)"));
    assert_eq!(
        canonicalize(&expr("sum_{X} [ P(Y|X) P(X) ]")),
        canonicalize(&expr("sum_{W} [ P(Y|W) P(W) ]"))
    );
    let reordered = "sum_{Z1,Z2} [ P(Z1|X,Z2) sum_{X'} [ P(Z2) P(X'|Z2) P(Y|X',Z1,Z2) ] ]";
    assert_eq!(
        canonicalize(&expr(SHOWCASE_PID)),
        canonicalize(&expr(reordered))
    );
}

#[test]
fn rendering_examples() {
    assert_eq!(render(&expr("P(Y|X)"), Format::Text), "P(Y|X)");
    assert_eq!(
        render(&expr(SHOWCASE_PID), Format::Latex),
        r"\sum_{z_2,z_1}\left(\sum_{x^{\prime}}P(y|z_2,z_1,x^{\prime})P(x^{\prime}|z_2)P(z_2)\right)P(z_1|z_2,x)"
    );
    assert_eq!(
        render(&expr("P(Y|X')"), Format::Json),
        r#"{"atom":{"out":[{"name":"Y","primes":0}],"given":[{"name":"X","primes":1}]}}"#
    );
}

#[test]
fn metrics_examples() {
    let pid = metrics(&expr(SHOWCASE_PID));
    assert_eq!(
        pid,
        Metrics {
            sum_nodes: 2,
            quotient_nodes: 0,
            atom_nodes: 4,
            distinct_variables: 4
        }
    );
    assert_eq!(
        metrics(&expr("P(y|x)")),
        Metrics {
            sum_nodes: 0,
            quotient_nodes: 0,
            atom_nodes: 1,
            distinct_variables: 2
        }
    );
}

#[test]
fn parse_errors_report_position() {
    assert!(matches!(parse_text("P(Y|"), Err(ExprError::Parse { .. })));
    assert!(matches!(
        parse_text("P(Y) extra"),
        Err(ExprError::Parse { .. })
    ));
    assert!(matches!(from_json("{\"atom\":3}"), Err(ExprError::Json(_))));
}

#[test]
fn marginal_and_chain_rule_are_numerically_sound() {
    let g = corpus::load("frontdoor_with_ancestors");
    let model = sample_scm(&g, 11, 2);
    let joint = observational_joint(&model).unwrap();
    let order = g.topological_order();
    // A non-atomic stand-in for P(v): its own chain-rule product.
    let product = Distribution::joint(g.vertices().clone())
        .chain_factorize(g.vertices(), &order)
        .unwrap();
    let d = Distribution::derived(product, g.vertices().clone());

    let summed = vs(&["W1", "Z"]);
    let marginal = d.marginalize(&summed).unwrap();
    let rebuilt = d.chain_factorize(g.vertices(), &order).unwrap();
    let names: Vec<String> = g.vertices().iter().cloned().collect();
    for_each_config(&vec![2; names.len()], |cfg| {
        let a: Assignment = names.iter().cloned().zip(cfg.iter().copied()).collect();
        let direct = eval_expression(d.expr(), &joint, &a).unwrap();
        assert!((direct - joint.get(&a).unwrap()).abs() <= TOL);
        assert!((eval_expression(&rebuilt, &joint, &a).unwrap() - direct).abs() <= TOL);

        let mut by_hand = 0.0;
        for_each_config(&[2, 2], |z| {
            let mut b = a.clone();
            b.insert("W1".into(), z[0]);
            b.insert("Z".into(), z[1]);
            by_hand += eval_expression(d.expr(), &joint, &b).unwrap();
        });
        let m = eval_expression(marginal.expr(), &joint, &a).unwrap();
        assert!((m - by_hand).abs() <= TOL);
    });
}

const NAMES: [&str; 5] = ["A", "B", "C", "D", "E"];

/// A random well-formed expression: binders are nonempty, distinct, and
/// never rebind a name bound further out.
fn random_expr(rng: &mut ChaCha8Rng, depth: usize, bound: &mut Vec<String>) -> Expr {
    let roll: f64 = rng.gen();
    if depth == 0 || roll < 0.3 {
        let mut names = NAMES.to_vec();
        names.shuffle(rng);
        let outs = rng.gen_range(1..=2);
        let givens = rng.gen_range(0..=2);
        return Expr::atom(
            names[..outs].iter().copied(),
            names[outs..outs + givens].iter().copied(),
        );
    }
    if roll < 0.55 {
        let free: Vec<&str> = NAMES
            .iter()
            .copied()
            .filter(|n| !bound.iter().any(|b| b == n))
            .collect();
        if !free.is_empty() {
            let k = rng.gen_range(1..=free.len().min(2));
            let binders: Vec<String> = free
                .choose_multiple(rng, k)
                .map(|s| s.to_string())
                .collect();
            let mark = bound.len();
            bound.extend(binders.iter().cloned());
            let body = random_expr(rng, depth - 1, bound);
            bound.truncate(mark);
            return Expr::sum(binders.into_iter().map(Var::from).collect(), body);
        }
    }
    if roll < 0.85 {
        let k = rng.gen_range(2..=3);
        return Expr::product(
            (0..k)
                .map(|_| random_expr(rng, depth - 1, bound))
                .collect::<Vec<_>>(),
        );
    }
    Expr::quotient(
        random_expr(rng, depth - 1, bound),
        random_expr(rng, depth - 1, bound),
    )
}

fn arb_expr() -> impl Strategy<Value = Expr> {
    (any::<u64>(), 1usize..5).prop_map(|(seed, depth)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        random_expr(&mut rng, depth, &mut Vec::new())
    })
}

/// Shuffles factors, conditioning lists and binder lists throughout.
fn shuffle(e: &Expr, rng: &mut ChaCha8Rng) -> Expr {
    match e {
        Expr::Atom { out, given } => {
            let mut out = out.clone();
            let mut given = given.clone();
            out.shuffle(rng);
            given.shuffle(rng);
            Expr::Atom { out, given }
        }
        Expr::Sum { bound, body } => {
            let mut bound = bound.clone();
            bound.shuffle(rng);
            Expr::Sum {
                bound,
                body: Box::new(shuffle(body, rng)),
            }
        }
        Expr::Product(fs) => {
            let mut fs: Vec<Expr> = fs.iter().map(|f| shuffle(f, rng)).collect();
            fs.shuffle(rng);
            Expr::Product(fs)
        }
        Expr::Quotient { num, den } => Expr::quotient(shuffle(num, rng), shuffle(den, rng)),
    }
}

/// Gives every binder a fresh name that occurs nowhere else.
fn alpha_rename(e: &Expr, map: &mut Vec<(Var, Var)>, counter: &mut usize) -> Expr {
    let look = |map: &[(Var, Var)], v: &Var| {
        map.iter()
            .rev()
            .find(|(from, _)| from == v)
            .map_or_else(|| v.clone(), |(_, to)| to.clone())
    };
    match e {
        Expr::Atom { out, given } => Expr::Atom {
            out: out.iter().map(|v| look(map, v)).collect(),
            given: given.iter().map(|v| look(map, v)).collect(),
        },
        Expr::Sum { bound, body } => {
            let mark = map.len();
            let fresh: Vec<Var> = bound
                .iter()
                .map(|b| {
                    *counter += 1;
                    let to = Var::new(format!("R{counter}"));
                    map.push((b.clone(), to.clone()));
                    to
                })
                .collect();
            let body = alpha_rename(body, map, counter);
            map.truncate(mark);
            Expr::Sum {
                bound: fresh,
                body: Box::new(body),
            }
        }
        Expr::Product(fs) => {
            Expr::Product(fs.iter().map(|f| alpha_rename(f, map, counter)).collect())
        }
        Expr::Quotient { num, den } => Expr::quotient(
            alpha_rename(num, map, counter),
            alpha_rename(den, map, counter),
        ),
    }
}

fn free_names(e: &Expr) -> VarSet {
    e.free_vars().into_iter().map(|v| v.to_string()).collect()
}

proptest! {
    #[test]
    fn canonical_form_is_idempotent(e in arb_expr()) {
        let once = canonicalize(&e);
        prop_assert_eq!(canonicalize(&once), once);
    }

    #[test]
    fn canonical_form_ignores_factor_order(e in arb_expr(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        prop_assert_eq!(canonicalize(&shuffle(&e, &mut rng)), canonicalize(&e));
    }

    #[test]
    fn canonical_form_ignores_bound_names(e in arb_expr()) {
        let renamed = alpha_rename(&e, &mut Vec::new(), &mut 0);
        prop_assert_eq!(canonicalize(&renamed), canonicalize(&e));
    }

    #[test]
    fn json_round_trip_on_canonical_forms(e in arb_expr()) {
        let c = canonicalize(&e);
        prop_assert_eq!(from_json(&render(&c, Format::Json)).unwrap(), c);
    }

    #[test]
    fn text_round_trip(e in arb_expr()) {
        prop_assert_eq!(parse_text(&render(&e, Format::Text)).unwrap(), e);
    }

    #[test]
    fn renaming_preserves_free_variables(e in arb_expr()) {
        prop_assert_eq!(rename_bound(&e).free_vars(), e.free_vars());
    }

    #[test]
    fn marginal_removes_exactly_the_summed_variables(e in arb_expr(), mask in any::<u8>()) {
        let free = free_names(&e);
        let scope: VarSet = free.iter().cloned().collect();
        let z: VarSet = scope.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, v)| v.clone()).collect();
        let d = Distribution::derived(e.clone(), scope);
        let m = d.marginalize(&z).unwrap();
        let expected: VarSet = free.iter().filter(|v| !z.contains(*v)).cloned().collect();
        prop_assert_eq!(free_names(m.expr()), expected);

        let joint = Distribution::joint(free.clone());
        let jm = joint.marginalize(&z).unwrap();
        let expected: VarSet = free.iter().filter(|v| !z.contains(*v)).cloned().collect();
        prop_assert_eq!(free_names(jm.expr()), expected);
    }
}
