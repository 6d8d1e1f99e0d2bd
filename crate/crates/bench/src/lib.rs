//! Seeded workloads for the benchmarks.

use incidence_core::laf::BoundAssignment;
use incidence_core::{Environment, Formula, Incidence};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_incidence(rng: &mut impl Rng, width: usize) -> Incidence {
    Incidence::from_indices(width, (0..width).filter(|_| rng.random_bool(0.5))).unwrap()
}

pub fn random_env(rng: &mut impl Rng, atoms: usize, width: usize) -> Environment {
    let mut env = Environment::new();
    for k in 0..atoms {
        env.insert(format!("x{k}"), random_incidence(rng, width)).unwrap();
    }
    env
}

/// Random formula over `x0..x{atoms-1}` with exactly `depth` levels of connectives.
pub fn random_formula(rng: &mut impl Rng, atoms: usize, depth: usize) -> Formula {
    if depth == 0 {
        return Formula::atom(format!("x{}", rng.random_range(0..atoms)));
    }
    let a = random_formula(rng, atoms, depth - 1);
    match rng.random_range(0..4) {
        0 => Formula::not(a),
        1 => Formula::and(a, random_formula(rng, atoms, depth - 1)),
        2 => Formula::or(a, random_formula(rng, atoms, depth - 1)),
        _ => Formula::implies(a, random_formula(rng, atoms, depth - 1)),
    }
}

/// `x0` known exactly plus the rules `x{k} -> x{k+1}` held true everywhere.
/// Propagation has to push the lower bound of `x0` along the whole chain.
pub fn implication_chain(width: usize, length: usize, seed: u64) -> BoundAssignment {
    let mut rng = rng(seed);
    let mut fa = BoundAssignment::new(width);
    let full = Incidence::full(width);
    let x0 = fa.register(&Formula::atom("x0"));
    let known = random_incidence(&mut rng, width);
    fa.constrain(x0, &known, &known).unwrap();
    for k in 0..length {
        let rule = Formula::implies(Formula::atom(format!("x{k}")), Formula::atom(format!("x{}", k + 1)));
        let id = fa.register(&rule);
        fa.constrain(id, &full, &full).unwrap();
    }
    fa
}

/// Random sentences with every atom given loose bounds around a hidden model.
pub fn loose_instance(width: usize, atoms: usize, sentences: usize, seed: u64) -> BoundAssignment {
    let mut rng = rng(seed);
    let env = random_env(&mut rng, atoms, width);
    let mut fa = BoundAssignment::new(width);
    for _ in 0..sentences {
        let depth = rng.random_range(1..=3);
        fa.register(&random_formula(&mut rng, atoms, depth));
    }
    for (name, truth) in env.iter() {
        if let Some(id) = fa.id_of(&Formula::atom(name)) {
            let inf = truth.intersection(&random_incidence(&mut rng, width));
            let sup = truth.union(&random_incidence(&mut rng, width));
            fa.constrain(id, &inf, &sup).unwrap();
        }
    }
    fa
}
