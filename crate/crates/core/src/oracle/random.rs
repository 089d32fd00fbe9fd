//! Seeded random graphs for property checks.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{LatentDag, Smg, SmgBuilder, VarSet};

/// An SMG over `V1..Vn`, in that topological order, with each forward
/// directed edge present with probability `directed` and each bidirected
/// edge with probability `bidirected`.
pub fn random_smg(seed: u64, n: usize, directed: f64, bidirected: f64) -> Smg {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let names: Vec<String> = (1..=n).map(|i| format!("V{i}")).collect();
    let mut b = SmgBuilder::new();
    for v in &names {
        b.vertex(v.clone());
    }
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(directed) {
                b.directed(names[i].clone(), names[j].clone());
            }
            if rng.gen_bool(bidirected) {
                b.bidirected(names[i].clone(), names[j].clone());
            }
        }
    }
    b.build().expect("forward edges are acyclic")
}

/// A DAG over `observed` vertices `O1..` and `latent` vertices `L1..`
/// placed at random positions of a random topological order; each forward
/// pair is joined with probability `density`.
pub fn random_latent_dag(seed: u64, observed: usize, latent: usize, density: f64) -> LatentDag {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut names: Vec<String> = (1..=observed)
        .map(|i| format!("O{i}"))
        .chain((1..=latent).map(|i| format!("L{i}")))
        .collect();
    names.shuffle(&mut rng);
    let mut b = SmgBuilder::new();
    for v in &names {
        b.vertex(v.clone());
    }
    for i in 0..names.len() {
        for j in i + 1..names.len() {
            if rng.gen_bool(density) {
                b.directed(names[i].clone(), names[j].clone());
            }
        }
    }
    let dag = b.build().expect("forward edges are acyclic");
    let hidden: VarSet = names
        .iter()
        .filter(|v| v.starts_with('L'))
        .cloned()
        .collect();
    LatentDag::new(dag, hidden).expect("purely directed")
}
