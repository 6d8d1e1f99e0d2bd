//! Building incidences.
//!
//! Two constructions are provided. [`incidences_from_probabilities`] lays
//! out synthetic incidences over a uniform space so that each atom hits its
//! target probability and each requested pair hits its target correlation,
//! as closely as integer point counts allow. [`incidences_from_records`]
//! turns a table of observations into a weighted space with one point per
//! distinct observation.

use std::collections::{BTreeMap, HashMap};

use num::BigInt;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::logic::{is_identifier, Environment};
use crate::samplespace::{Incidence, SampleSpace};
use crate::Rational;

/// Target marginals and pairwise correlations for synthetic incidences.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetSpec {
    pub marginals: BTreeMap<String, f64>,
    /// Keyed by the lexically ordered atom pair.
    pub correlations: BTreeMap<(String, String), f64>,
    pub size: usize,
    pub seed: u64,
}

impl TargetSpec {
    pub fn new(size: usize, seed: u64) -> Self {
        TargetSpec {
            marginals: BTreeMap::new(),
            correlations: BTreeMap::new(),
            size,
            seed,
        }
    }

    pub fn marginal(mut self, atom: &str, p: f64) -> Self {
        self.marginals.insert(atom.to_string(), p);
        self
    }

    pub fn correlation(mut self, a: &str, b: &str, c: f64) -> Self {
        self.correlations.insert(pair(a, b), c);
        self
    }

    /// Reads a target file: `prob <atom> <p>` and `corr <atom> <atom> <c>`
    /// lines, `#` comments.
    pub fn parse(text: &str, size: usize, seed: u64) -> Result<TargetSpec> {
        let mut spec = TargetSpec::new(size, seed);
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |msg: String| Error::InvalidTarget(format!("line {}: {msg}", n + 1));
            let fields: Vec<&str> = line.split_whitespace().collect();
            let number = |s: &str| s.parse::<f64>().map_err(|_| bad(format!("`{s}` is not a number")));
            let name = |s: &str| {
                if is_identifier(s) {
                    Ok(s.to_string())
                } else {
                    Err(bad(format!("`{s}` is not a valid atom name")))
                }
            };
            match fields.as_slice() {
                ["prob", atom, p] => {
                    if spec.marginals.insert(name(atom)?, number(p)?).is_some() {
                        return Err(bad(format!("duplicate marginal for `{atom}`")));
                    }
                }
                ["corr", a, b, c] => {
                    let key = pair(&name(a)?, &name(b)?);
                    if key.0 == key.1 {
                        return Err(bad("an atom cannot be correlated with itself".into()));
                    }
                    if spec.correlations.insert(key, number(c)?).is_some() {
                        return Err(bad(format!("duplicate correlation for `{a}`, `{b}`")));
                    }
                }
                _ => {
                    return Err(bad(format!(
                        "expected `prob <atom> <p>` or `corr <a> <b> <c>`, got `{line}`"
                    )))
                }
            }
        }
        Ok(spec)
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidTarget(msg));
        if self.size == 0 {
            return bad("size must be at least 1".into());
        }
        for (atom, &p) in &self.marginals {
            if !(0.0..=1.0).contains(&p) {
                return bad(format!("p({atom}) = {p} is outside [0, 1]"));
            }
        }
        for ((a, b), &c) in &self.correlations {
            if !(-1.0..=1.0).contains(&c) {
                return bad(format!("c({a},{b}) = {c} is outside [-1, 1]"));
            }
            for atom in [a, b] {
                match self.marginals.get(atom) {
                    None => return bad(format!("correlation names `{atom}` without a marginal")),
                    Some(&p) if p <= 0.0 || p >= 1.0 => {
                        return bad(format!("p({atom}) must lie strictly inside (0, 1) to be correlated"))
                    }
                    _ => {}
                }
            }
        }
        Ok(())
    }
}

fn pair(a: &str, b: &str) -> (String, String) {
    if a <= b {
        (a.to_string(), b.to_string())
    } else {
        (b.to_string(), a.to_string())
    }
}

/// Number of points each atom gets: `round(p · size)`.
pub fn quota(p: f64, size: usize) -> usize {
    ((p * size as f64).round() as usize).min(size)
}

/// Overlap count implied by a target correlation between two atoms holding
/// `ka` and `kb` of `size` points, checked against the Fréchet bounds
/// `max(0, ka + kb − size) ≤ overlap ≤ min(ka, kb)`.
pub fn target_overlap(ka: usize, kb: usize, size: usize, c: f64) -> Result<usize> {
    let n = size as f64;
    let (qa, qb) = (ka as f64 / n, kb as f64 / n);
    let spread = qa * (1.0 - qa) * qb * (1.0 - qb);
    if spread <= 0.0 {
        return Err(Error::Infeasible(format!(
            "a marginal quantises to 0 or 1 at size {size}, so the correlation is undefined"
        )));
    }
    let implied = (qa * qb + c * spread.sqrt()) * n;
    let lo = (ka + kb).saturating_sub(size);
    let hi = ka.min(kb);
    let rounded = implied.round();
    if rounded < lo as f64 || rounded > hi as f64 {
        return Err(Error::Infeasible(format!(
            "correlation {c} needs an overlap of {implied:.3} points, outside the feasible range [{lo}, {hi}]"
        )));
    }
    Ok(rounded as usize)
}

/// Synthetic incidences over a uniform space of `spec.size` points.
///
/// Atoms are placed in name order. Each atom starts from a seeded random set
/// of its quota size; then, for every earlier atom it has a correlation
/// target with (again in name order), points are swapped in or out until the
/// overlap count matches. Swaps prefer points that agree on every partner
/// already fixed for this atom, so earlier pairs keep their overlap when
/// possible. Higher-order dependencies are not controlled.
pub fn incidences_from_probabilities(spec: &TargetSpec) -> Result<(SampleSpace, Environment)> {
    spec.validate()?;
    let size = spec.size;
    let atoms: Vec<&String> = spec.marginals.keys().collect();
    let quotas: Vec<usize> = spec.marginals.values().map(|&p| quota(p, size)).collect();

    let mut targets = HashMap::new();
    for ((a, b), &c) in &spec.correlations {
        let ia = atoms.iter().position(|x| *x == a).expect("validated");
        let ib = atoms.iter().position(|x| *x == b).expect("validated");
        targets.insert(
            (ia.min(ib), ia.max(ib)),
            target_overlap(quotas[ia], quotas[ib], size, c)?,
        );
    }

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut placed: Vec<Vec<bool>> = Vec::with_capacity(atoms.len());
    for (i, &k) in quotas.iter().enumerate() {
        let mut order: Vec<usize> = (0..size).collect();
        order.shuffle(&mut rng);
        let mut member = vec![false; size];
        order[..k].iter().for_each(|&p| member[p] = true);

        let mut partners: Vec<usize> = Vec::new();
        for j in 0..i {
            if let Some(&t) = targets.get(&(j, i)) {
                adjust_overlap(&mut member, &placed[j], t, &partners, &placed, &mut rng);
                partners.push(j);
            }
        }
        placed.push(member);
    }

    let space = SampleSpace::uniform(size)?;
    let mut env = Environment::new();
    for (name, member) in atoms.into_iter().zip(&placed) {
        let inc = Incidence::from_indices(size, (0..size).filter(|&p| member[p]))?;
        env.insert(name.clone(), inc)?;
    }
    Ok((space, env))
}

fn adjust_overlap(
    member: &mut [bool],
    other: &[bool],
    target: usize,
    partners: &[usize],
    placed: &[Vec<bool>],
    rng: &mut ChaCha8Rng,
) {
    let overlap = member.iter().zip(other).filter(|(a, b)| **a && **b).count();
    if overlap == target {
        return;
    }
    // Growing the overlap trades a point of a\b for one of b\a; shrinking it
    // trades a point of a∩b for one outside both.
    let grow = overlap < target;
    let mut needed = overlap.abs_diff(target);
    let mut buckets: BTreeMap<Vec<bool>, (Vec<usize>, Vec<usize>)> = BTreeMap::new();
    for p in 0..member.len() {
        let signature: Vec<bool> = partners.iter().map(|&j| placed[j][p]).collect();
        let out = member[p] && (other[p] != grow);
        let into = !member[p] && (other[p] == grow);
        if out {
            buckets.entry(signature).or_default().0.push(p);
        } else if into {
            buckets.entry(signature).or_default().1.push(p);
        }
    }
    let mut leftover_out = Vec::new();
    let mut leftover_in = Vec::new();
    for (_, (mut outs, mut ins)) in buckets {
        outs.shuffle(rng);
        ins.shuffle(rng);
        let swaps = needed.min(outs.len()).min(ins.len());
        for (&x, &y) in outs.iter().zip(&ins).take(swaps) {
            member[x] = false;
            member[y] = true;
        }
        needed -= swaps;
        leftover_out.extend_from_slice(&outs[swaps..]);
        leftover_in.extend_from_slice(&ins[swaps..]);
    }
    leftover_out.shuffle(rng);
    leftover_in.shuffle(rng);
    for (&x, &y) in leftover_out.iter().zip(&leftover_in).take(needed) {
        member[x] = false;
        member[y] = true;
    }
}

/// A rectangular table of boolean observations, one column per atom.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecordTable {
    columns: Vec<String>,
    rows: Vec<Vec<bool>>,
}

impl RecordTable {
    pub fn new(columns: Vec<String>, rows: Vec<Vec<bool>>) -> Result<RecordTable> {
        let bad = |msg: String| Err(Error::InvalidRecords(msg));
        if columns.is_empty() {
            return bad("no columns".into());
        }
        for (i, name) in columns.iter().enumerate() {
            if !is_identifier(name) {
                return bad(format!("`{name}` is not a valid atom name"));
            }
            if columns[..i].contains(name) {
                return bad(format!("duplicate column `{name}`"));
            }
        }
        if rows.is_empty() {
            return bad("no rows".into());
        }
        if let Some(i) = rows.iter().position(|r| r.len() != columns.len()) {
            return bad(format!(
                "row {} has {} values, expected {}",
                i + 1,
                rows[i].len(),
                columns.len()
            ));
        }
        Ok(RecordTable { columns, rows })
    }

    /// Comma-separated text: a header line of column names, then one line per
    /// observation with values in `0 1 T F true false`.
    pub fn parse(text: &str) -> Result<RecordTable> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(n, l)| (n + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let (_, header) = lines.next().ok_or_else(|| Error::InvalidRecords("empty file".into()))?;
        let columns = header.split(',').map(|c| c.trim().to_string()).collect();
        let mut rows = Vec::new();
        for (n, line) in lines {
            let row = line
                .split(',')
                .map(|v| match v.trim() {
                    "1" | "T" | "true" => Ok(true),
                    "0" | "F" | "false" => Ok(false),
                    other => Err(Error::InvalidRecords(format!("line {n}: bad value `{other}`"))),
                })
                .collect::<Result<Vec<bool>>>()?;
            rows.push(row);
        }
        RecordTable::new(columns, rows)
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<bool>] {
        &self.rows
    }
}

/// One point per distinct row, in order of first occurrence, weighted by
/// how often the row occurs. Assumes the distinct rows cover every case.
pub fn incidences_from_records(table: &RecordTable) -> Result<(SampleSpace, Environment)> {
    let mut index: HashMap<&[bool], usize> = HashMap::new();
    let mut distinct: Vec<&[bool]> = Vec::new();
    let mut counts: Vec<usize> = Vec::new();
    for row in &table.rows {
        let k = *index.entry(row).or_insert_with(|| {
            distinct.push(row);
            counts.push(0);
            distinct.len() - 1
        });
        counts[k] += 1;
    }
    let total = BigInt::from(table.rows.len());
    let weights = counts
        .iter()
        .map(|&c| Rational::new(BigInt::from(c), total.clone()))
        .collect();
    let space = SampleSpace::from_weights(weights)?;
    let mut env = Environment::new();
    for (col, name) in table.columns.iter().enumerate() {
        let inc = Incidence::from_indices(distinct.len(), (0..distinct.len()).filter(|&p| distinct[p][col]))?;
        env.insert(name.clone(), inc)?;
    }
    Ok((space, env))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::Formula;
    use crate::probability::{correlation, prob};

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn single_marginal_quota() {
        let spec = TargetSpec::new(10, 1).marginal("a", 0.5);
        let (w, env) = incidences_from_probabilities(&spec).unwrap();
        assert_eq!(w.size(), 10);
        assert_eq!(env.get("a").unwrap().count(), 5);
    }

    #[test]
    fn maximal_overlap() {
        let spec = TargetSpec::new(10, 3)
            .marginal("a", 0.5)
            .marginal("b", 0.4)
            .correlation("a", "b", 0.81650);
        let (_, env) = incidences_from_probabilities(&spec).unwrap();
        let (a, b) = (env.get("a").unwrap(), env.get("b").unwrap());
        assert_eq!((a.count(), b.count()), (5, 4));
        assert!(b.is_subset(a));
    }

    #[test]
    fn perfect_correlation_gives_identical_incidences() {
        let spec = TargetSpec::new(10, 9)
            .marginal("a", 0.5)
            .marginal("b", 0.5)
            .correlation("b", "a", 1.0);
        let (_, env) = incidences_from_probabilities(&spec).unwrap();
        assert_eq!(env.get("a"), env.get("b"));
    }

    #[test]
    fn infeasible_anticorrelation() {
        let spec = TargetSpec::new(10, 0)
            .marginal("a", 0.9)
            .marginal("b", 0.9)
            .correlation("a", "b", -1.0);
        assert!(matches!(
            incidences_from_probabilities(&spec),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn invalid_targets() {
        let cases = [
            TargetSpec::new(0, 0).marginal("a", 0.5),
            TargetSpec::new(10, 0).marginal("a", 1.5),
            TargetSpec::new(10, 0).marginal("a", 0.5).correlation("a", "b", 0.1),
            TargetSpec::new(10, 0)
                .marginal("a", 1.0)
                .marginal("b", 0.5)
                .correlation("a", "b", 0.1),
            TargetSpec::new(10, 0)
                .marginal("a", 0.5)
                .marginal("b", 0.5)
                .correlation("a", "b", 1.5),
        ];
        for spec in cases {
            assert!(
                matches!(incidences_from_probabilities(&spec), Err(Error::InvalidTarget(_))),
                "{spec:?}"
            );
        }
        // quantises to an empty incidence
        let spec = TargetSpec::new(10, 0)
            .marginal("a", 0.01)
            .marginal("b", 0.5)
            .correlation("a", "b", 0.1);
        assert!(matches!(
            incidences_from_probabilities(&spec),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn parse_targets() {
        let spec = TargetSpec::parse("# demo\nprob a 0.5\nprob b 0.4\ncorr b a 0.8165\n", 100, 7).unwrap();
        assert_eq!(spec.marginals.len(), 2);
        assert_eq!(spec.correlations[&("a".to_string(), "b".to_string())], 0.8165);
        assert!(TargetSpec::parse("prob a x", 10, 0).is_err());
        assert!(TargetSpec::parse("prob a 0.1\nprob a 0.2", 10, 0).is_err());
        assert!(TargetSpec::parse("corr a a 0.2", 10, 0).is_err());
        assert!(TargetSpec::parse("mean a 0.2", 10, 0).is_err());
    }

    #[test]
    fn three_atoms_hit_pairwise_targets() {
        let spec = TargetSpec::new(1000, 42)
            .marginal("a", 0.3)
            .marginal("b", 0.6)
            .marginal("c", 0.5)
            .correlation("a", "b", 0.2)
            .correlation("a", "c", -0.3)
            .correlation("b", "c", 0.4);
        let (w, env) = incidences_from_probabilities(&spec).unwrap();
        for ((x, y), c) in &spec.correlations {
            let (ix, iy) = (env.get(x).unwrap(), env.get(y).unwrap());
            let t = target_overlap(ix.count(), iy.count(), 1000, *c).unwrap();
            let got = ix.intersection(iy).count();
            assert!(got.abs_diff(t) <= 1, "{x},{y}: {got} vs {t}");
            let achieved = correlation(&Formula::atom(x.as_str()), &Formula::atom(y.as_str()), &env, &w).unwrap();
            assert!((achieved.value() - c).abs() < 0.01);
        }
    }

    #[test]
    fn deterministic_under_seed() {
        let spec = TargetSpec::new(500, 11)
            .marginal("x", 0.2)
            .marginal("y", 0.7)
            .correlation("x", "y", -0.25);
        let first = incidences_from_probabilities(&spec).unwrap();
        assert_eq!(first, incidences_from_probabilities(&spec).unwrap());
        let other = TargetSpec { seed: 12, ..spec };
        assert_ne!(first.1, incidences_from_probabilities(&other).unwrap().1);
    }

    #[test]
    fn rain_table() {
        let table = RecordTable::parse("rain,wet\nT,T\n1,true\nT,F\nF,0\nfalse,F\n").unwrap();
        let (w, env) = incidences_from_records(&table).unwrap();
        let weights: Vec<Rational> = w.points().iter().map(|p| p.weight.clone()).collect();
        assert_eq!(weights, vec![r(2, 5), r(1, 5), r(2, 5)]);
        assert_eq!(env.get("rain").unwrap().to_bitstring(), "110");
        assert_eq!(env.get("wet").unwrap().to_bitstring(), "100");
        assert_eq!(prob(&Formula::atom("rain"), &env, &w).unwrap(), r(3, 5));
    }

    #[test]
    fn degenerate_tables() {
        let (w, env) = incidences_from_records(&RecordTable::parse("a\nT").unwrap()).unwrap();
        assert_eq!(w.size(), 1);
        assert!(env.get("a").unwrap().is_full());
        let (w, env) = incidences_from_records(&RecordTable::parse("a,b\n1,0\n1,0\n1,0").unwrap()).unwrap();
        assert_eq!(w.size(), 1);
        assert!(env.get("a").unwrap().is_full());
        assert!(env.get("b").unwrap().is_empty());
    }

    #[test]
    fn bad_tables() {
        for text in ["", "a,a\n1,1", "a,b\n1", "a\n", "a\nyes", "a b\n1"] {
            assert!(
                matches!(RecordTable::parse(text), Err(Error::InvalidRecords(_))),
                "{text:?}"
            );
        }
    }
}
