//! Legal assignment finder.
//!
//! A [`BoundAssignment`] gives every registered sentence a lower bound `inf`
//! and an upper bound `sup` on its unknown incidence. Propagation applies
//! connective rules until nothing changes. Every rule only ever grows an `inf`
//! (`∪=`) or shrinks a `sup` (`∩=`), so runs terminate and the fixpoint does
//! not depend on the order in which rules fire.
//!
//! # Rule catalog
//!
//! `w` is the whole space, `C` the compound sentence, `A`/`B` its operands and
//! `i(·)` the true (unknown) incidence. Each rule is sound because the set on
//! its right-hand side contains (for `sup`) or is contained in (for `inf`)
//! the true incidence of the target whenever every input bound is correct.
//!
//! Negation, `C = ~A`, from `i(C) = w \ i(A)`:
//!
//! | rule | update | justification |
//! |------|--------|---------------|
//! | Not1 | `sup(A) ∩= w \ inf(C)` | `i(A) = w \ i(C) ⊆ w \ inf(C)` |
//! | Not2 | `inf(A) ∪= w \ sup(C)` | `w \ sup(C) ⊆ w \ i(C) = i(A)` |
//! | Not3 | `inf(C) ∪= w \ sup(A)` | `w \ sup(A) ⊆ w \ i(A) = i(C)` |
//! | Not4 | `sup(C) ∩= w \ inf(A)` | `i(C) = w \ i(A) ⊆ w \ inf(A)` |
//!
//! Conjunction, `C = A & B`, from `i(C) = i(A) ∩ i(B)`:
//!
//! | rule | update | justification |
//! |------|--------|---------------|
//! | And1 | `sup(A) ∩= sup(C) ∪ (w \ inf(B))` | `i(A) ⊆ i(C) ∪ (w \ i(B))` |
//! | And2 | `sup(B) ∩= sup(C) ∪ (w \ inf(A))` | `i(B) ⊆ i(C) ∪ (w \ i(A))` |
//! | And3 | `inf(A) ∪= inf(C)` | `i(C) ⊆ i(A)` |
//! | And4 | `inf(B) ∪= inf(C)` | `i(C) ⊆ i(B)` |
//! | And5 | `inf(C) ∪= inf(A) ∩ inf(B)` | `inf(A) ∩ inf(B) ⊆ i(A) ∩ i(B)` |
//! | And6 | `sup(C) ∩= sup(A) ∩ sup(B)` | `i(A) ∩ i(B) ⊆ sup(A) ∩ sup(B)` |
//!
//! Disjunction, `C = A | B`, from `i(C) = i(A) ∪ i(B)`:
//!
//! | rule | update | justification |
//! |------|--------|---------------|
//! | Or1 | `inf(A) ∪= inf(C) ∩ (w \ sup(B))` | `i(C) \ i(B) ⊆ i(A)` |
//! | Or2 | `inf(B) ∪= inf(C) ∩ (w \ sup(A))` | `i(C) \ i(A) ⊆ i(B)` |
//! | Or3 | `sup(A) ∩= sup(C)` | `i(A) ⊆ i(C)` |
//! | Or4 | `sup(B) ∩= sup(C)` | `i(B) ⊆ i(C)` |
//! | Or5 | `inf(C) ∪= inf(A) ∪ inf(B)` | `inf(A) ∪ inf(B) ⊆ i(A) ∪ i(B)` |
//! | Or6 | `sup(C) ∩= sup(A) ∪ sup(B)` | `i(A) ∪ i(B) ⊆ sup(A) ∪ sup(B)` |
//!
//! Implication, `C = A -> B`, from `i(C) = (w \ i(A)) ∪ i(B)`:
//!
//! | rule | update | justification |
//! |------|--------|---------------|
//! | Imp1 | `inf(A) ∪= w \ sup(C)` | `w \ i(C) = i(A) \ i(B) ⊆ i(A)` |
//! | Imp2 | `sup(A) ∩= (w \ inf(C)) ∪ sup(B)` | `i(A) ∩ i(C) ⊆ i(B)` |
//! | Imp3 | `inf(B) ∪= inf(C) ∩ inf(A)` | `i(C) ∩ i(A) ⊆ i(B)` (modus ponens) |
//! | Imp4 | `sup(B) ∩= sup(C)` | `i(B) ⊆ i(C)` |
//! | Imp5 | `inf(C) ∪= (w \ sup(A)) ∪ inf(B)` | both parts lie inside `i(C)` |
//! | Imp6 | `sup(C) ∩= (w \ inf(A)) ∪ sup(B)` | `i(C)` lies inside the right side |
//!
//! The constants are seeded directly: `inf(true) = w` and `sup(false) = ∅`.

use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::kb::{Declaration, KnowledgeBase};
use crate::logic::{incidence_of, Environment, Formula};
use crate::probability::format_prob;
use crate::samplespace::{Incidence, SampleSpace};

/// Index of a sentence in registration order.
pub type SentenceId = usize;

/// Largest search accepted by [`enumerate_legal`], in bits (`width · atoms`).
pub const ENUMERATION_LIMIT_BITS: usize = 24;

/// Largest number of atoms accepted by [`Mode::Complete`]; the case split
/// costs up to `2^atoms` propagations per point.
pub const COMPLETE_MAX_ATOMS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Node {
    True,
    False,
    Atom,
    Not(SentenceId),
    And(SentenceId, SentenceId),
    Or(SentenceId, SentenceId),
    Implies(SentenceId, SentenceId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Connective {
    Not,
    And,
    Or,
    Implies,
}

/// Which sentence of a compound a rule updates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    /// The compound itself.
    Compound,
    /// The (first) operand.
    Left,
    /// The second operand.
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bound {
    Inf,
    Sup,
}

/// One entry of the rule catalog.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rule {
    pub name: &'static str,
    pub connective: Connective,
    pub target: Role,
    pub bound: Bound,
}

const fn rule(name: &'static str, connective: Connective, target: Role, bound: Bound) -> Rule {
    Rule {
        name,
        connective,
        target,
        bound,
    }
}

/// The 22 propagation rules, grouped by connective in application order.
pub const RULES: [Rule; 22] = [
    rule("Not1", Connective::Not, Role::Left, Bound::Sup),
    rule("Not2", Connective::Not, Role::Left, Bound::Inf),
    rule("Not3", Connective::Not, Role::Compound, Bound::Inf),
    rule("Not4", Connective::Not, Role::Compound, Bound::Sup),
    rule("And1", Connective::And, Role::Left, Bound::Sup),
    rule("And2", Connective::And, Role::Right, Bound::Sup),
    rule("And3", Connective::And, Role::Left, Bound::Inf),
    rule("And4", Connective::And, Role::Right, Bound::Inf),
    rule("And5", Connective::And, Role::Compound, Bound::Inf),
    rule("And6", Connective::And, Role::Compound, Bound::Sup),
    rule("Or1", Connective::Or, Role::Left, Bound::Inf),
    rule("Or2", Connective::Or, Role::Right, Bound::Inf),
    rule("Or3", Connective::Or, Role::Left, Bound::Sup),
    rule("Or4", Connective::Or, Role::Right, Bound::Sup),
    rule("Or5", Connective::Or, Role::Compound, Bound::Inf),
    rule("Or6", Connective::Or, Role::Compound, Bound::Sup),
    rule("Imp1", Connective::Implies, Role::Left, Bound::Inf),
    rule("Imp2", Connective::Implies, Role::Left, Bound::Sup),
    rule("Imp3", Connective::Implies, Role::Right, Bound::Inf),
    rule("Imp4", Connective::Implies, Role::Right, Bound::Sup),
    rule("Imp5", Connective::Implies, Role::Compound, Bound::Inf),
    rule("Imp6", Connective::Implies, Role::Compound, Bound::Sup),
];

/// `(inf, sup)` of one sentence.
#[derive(Debug, Clone, Copy)]
pub struct Bounds<'a> {
    pub inf: &'a Incidence,
    pub sup: &'a Incidence,
}

impl Rule {
    /// The set this rule merges into its target: united into `inf` for
    /// [`Bound::Inf`] rules, intersected into `sup` for [`Bound::Sup`] rules.
    /// `b` is ignored for negation.
    pub fn candidate(&self, c: Bounds<'_>, a: Bounds<'_>, b: Bounds<'_>) -> Incidence {
        use Bound::*;
        use Connective::*;
        use Role::*;
        match (self.connective, self.target, self.bound) {
            (Not, Left, Sup) => c.inf.complement(),
            (Not, Left, Inf) => c.sup.complement(),
            (Not, Compound, Inf) => a.sup.complement(),
            (Not, Compound, Sup) => a.inf.complement(),

            (And, Left, Sup) => c.sup.union_complement(b.inf),
            (And, Right, Sup) => c.sup.union_complement(a.inf),
            (And, Left, Inf) | (And, Right, Inf) => c.inf.clone(),
            (And, Compound, Inf) => a.inf.intersection(b.inf),
            (And, Compound, Sup) => a.sup.intersection(b.sup),

            (Or, Left, Inf) => c.inf.difference(b.sup),
            (Or, Right, Inf) => c.inf.difference(a.sup),
            (Or, Left, Sup) | (Or, Right, Sup) => c.sup.clone(),
            (Or, Compound, Inf) => a.inf.union(b.inf),
            (Or, Compound, Sup) => a.sup.union(b.sup),

            (Implies, Left, Inf) => c.sup.complement(),
            (Implies, Left, Sup) => b.sup.union_complement(c.inf),
            (Implies, Right, Inf) => c.inf.intersection(a.inf),
            (Implies, Right, Sup) => c.sup.clone(),
            (Implies, Compound, Inf) => b.inf.union_complement(a.sup),
            (Implies, Compound, Sup) => b.sup.union_complement(a.inf),

            (Not, Right, _) => unreachable!("negation has no second operand"),
        }
    }
}

/// Upper and lower incidence bounds for a set of sentences.
///
/// Sentences are keyed by structural identity: `a & b` and `b & a` are
/// distinct entries. Registering a sentence registers its subformulas first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundAssignment {
    width: usize,
    formulas: Vec<Formula>,
    nodes: Vec<Node>,
    parents: Vec<Vec<SentenceId>>,
    index: HashMap<Formula, SentenceId>,
    inf: Vec<Incidence>,
    sup: Vec<Incidence>,
}

impl BoundAssignment {
    pub fn new(width: usize) -> Self {
        BoundAssignment {
            width,
            formulas: Vec::new(),
            nodes: Vec::new(),
            parents: Vec::new(),
            index: HashMap::new(),
            inf: Vec::new(),
            sup: Vec::new(),
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn len(&self) -> usize {
        self.formulas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.formulas.is_empty()
    }

    /// Adds `formula` and all its subformulas with vacuous bounds `(∅, w)`.
    /// Already registered sentences keep their id and bounds.
    pub fn register(&mut self, formula: &Formula) -> SentenceId {
        if let Some(&id) = self.index.get(formula) {
            return id;
        }
        let node = match formula {
            Formula::True => Node::True,
            Formula::False => Node::False,
            Formula::Atom(_) => Node::Atom,
            Formula::Not(a) => Node::Not(self.register(a)),
            Formula::And(a, b) => Node::And(self.register(a), self.register(b)),
            Formula::Or(a, b) => Node::Or(self.register(a), self.register(b)),
            Formula::Implies(a, b) => Node::Implies(self.register(a), self.register(b)),
        };
        let id = self.formulas.len();
        self.formulas.push(formula.clone());
        self.nodes.push(node);
        self.parents.push(Vec::new());
        self.index.insert(formula.clone(), id);
        self.inf.push(Incidence::empty(self.width));
        self.sup.push(Incidence::full(self.width));
        let mut children = operands(node);
        children.dedup();
        for child in children {
            self.parents[child].push(id);
        }
        id
    }

    pub fn id_of(&self, formula: &Formula) -> Option<SentenceId> {
        self.index.get(formula).copied()
    }

    pub fn formula(&self, id: SentenceId) -> &Formula {
        &self.formulas[id]
    }

    pub fn formulas(&self) -> &[Formula] {
        &self.formulas
    }

    pub fn bounds(&self, id: SentenceId) -> (&Incidence, &Incidence) {
        (&self.inf[id], &self.sup[id])
    }

    /// Ids of atom sentences in registration order.
    pub fn atoms(&self) -> Vec<SentenceId> {
        (0..self.len()).filter(|&id| self.nodes[id] == Node::Atom).collect()
    }

    /// Tightens a sentence's bounds: `inf ∪= inf`, `sup ∩= sup`. Several
    /// declarations for the same sentence therefore amalgamate.
    pub fn constrain(&mut self, id: SentenceId, inf: &Incidence, sup: &Incidence) -> Result<()> {
        for inc in [inf, sup] {
            if inc.width() != self.width {
                return Err(Error::WidthMismatch {
                    expected: self.width,
                    found: inc.width(),
                });
            }
        }
        self.inf[id].union_with(inf);
        self.sup[id].intersect_with(sup);
        Ok(())
    }

    /// First sentence, in registration order, whose `inf` is not within its `sup`.
    pub fn first_inconsistency(&self) -> Option<SentenceId> {
        (0..self.len()).find(|&id| !self.inf[id].is_subset(&self.sup[id]))
    }

    /// One line per sentence: `<formula> inf=<bits> sup=<bits> p=[lo, hi]`.
    pub fn dump(&self, space: &SampleSpace) -> Result<String> {
        let mut out = String::new();
        for id in 0..self.len() {
            let lo = space.wp(&self.inf[id])?;
            let hi = space.wp(&self.sup[id])?;
            writeln!(
                out,
                "{} inf={} sup={} p=[{}, {}]",
                self.formulas[id],
                self.inf[id],
                self.sup[id],
                format_prob(&lo),
                format_prob(&hi)
            )
            .expect("writing to a String");
        }
        Ok(out)
    }

    fn bounds_of(&self, id: SentenceId) -> Bounds<'_> {
        Bounds {
            inf: &self.inf[id],
            sup: &self.sup[id],
        }
    }

    /// Applies every rule attached to sentence `c`. Returns the sentences whose
    /// bounds strictly changed; `steps` counts each strict bound change.
    fn fire(&mut self, c: SentenceId, steps: &mut usize) -> Vec<SentenceId> {
        let mut changed = Vec::new();
        let mut note = |id: SentenceId, hit: bool, steps: &mut usize| {
            if hit {
                *steps += 1;
                if !changed.contains(&id) {
                    changed.push(id);
                }
            }
        };
        let (connective, a, b) = match self.nodes[c] {
            Node::Atom => return changed,
            Node::True => {
                let hit = self.inf[c].union_with(&Incidence::full(self.width));
                note(c, hit, steps);
                return changed;
            }
            Node::False => {
                let hit = self.sup[c].intersect_with(&Incidence::empty(self.width));
                note(c, hit, steps);
                return changed;
            }
            Node::Not(a) => (Connective::Not, a, a),
            Node::And(a, b) => (Connective::And, a, b),
            Node::Or(a, b) => (Connective::Or, a, b),
            Node::Implies(a, b) => (Connective::Implies, a, b),
        };
        for rule in RULES.iter().filter(|r| r.connective == connective) {
            let set = rule.candidate(self.bounds_of(c), self.bounds_of(a), self.bounds_of(b));
            let target = match rule.target {
                Role::Compound => c,
                Role::Left => a,
                Role::Right => b,
            };
            let hit = match rule.bound {
                Bound::Inf => self.inf[target].union_with(&set),
                Bound::Sup => self.sup[target].intersect_with(&set),
            };
            note(target, hit, steps);
        }
        changed
    }

    /// Width-one copy holding only the memberships of `point`.
    fn project(&self, point: usize) -> BoundAssignment {
        let bit = |inc: &Incidence| {
            let mut out = Incidence::empty(1);
            if inc.contains(point) {
                out.insert(0);
            }
            out
        };
        BoundAssignment {
            width: 1,
            formulas: self.formulas.clone(),
            nodes: self.nodes.clone(),
            parents: self.parents.clone(),
            index: self.index.clone(),
            inf: self.inf.iter().map(bit).collect(),
            sup: self.sup.iter().map(bit).collect(),
        }
    }
}

fn operands(node: Node) -> Vec<SentenceId> {
    match node {
        Node::True | Node::False | Node::Atom => vec![],
        Node::Not(a) => vec![a],
        Node::And(a, b) | Node::Or(a, b) | Node::Implies(a, b) => vec![a, b],
    }
}

/// Builds the initial assignment of a knowledge base.
///
/// Every sentence mentioned by a declaration or query is registered, together
/// with its subformulas, in file order. Exact incidences set `inf = sup = i`;
/// bound declarations contribute their pair. Malformed input bounds
/// (`inf ⊄ sup`) are left in place for [`check_consistency`] and
/// [`propagate`] to report.
pub fn init_assignment(kb: &KnowledgeBase) -> Result<BoundAssignment> {
    let mut assignment = BoundAssignment::new(kb.space().size());
    for decl in kb.declarations() {
        match decl {
            Declaration::Exact { sentence, incidence } => {
                let id = assignment.register(sentence);
                assignment.constrain(id, incidence, incidence)?;
            }
            Declaration::Bounds { sentence, inf, sup } => {
                let id = assignment.register(sentence);
                assignment.constrain(id, inf, sup)?;
            }
            Declaration::Formula { formula, .. } => {
                assignment.register(formula);
            }
            Declaration::Query(query) => {
                for f in query.formulas() {
                    assignment.register(f);
                }
            }
        }
    }
    Ok(assignment)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Consistency {
    Ok,
    Inconsistent(SentenceId),
}

/// Checks `inf ⊆ sup` for every sentence, reporting the first violation in
/// registration order.
pub fn check_consistency(assignment: &BoundAssignment) -> Consistency {
    match assignment.first_inconsistency() {
        Some(id) => Consistency::Inconsistent(id),
        None => Consistency::Ok,
    }
}

/// Greatest lower bound from several derivations of the same sentence: their union.
pub fn amalgamate_lower_bounds(width: usize, bounds: &[Incidence]) -> Result<Incidence> {
    let mut out = Incidence::empty(width);
    for inc in bounds {
        if inc.width() != width {
            return Err(Error::WidthMismatch {
                expected: width,
                found: inc.width(),
            });
        }
        out.union_with(inc);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Mode {
    /// Rule propagation to a fixpoint.
    #[default]
    Fixpoint,
    /// Fixpoint propagation followed by case splitting on undetermined
    /// memberships, which yields the tightest bounds the input admits.
    Complete,
}

/// Order in which pending sentences leave the worklist.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum WorklistOrder {
    /// FIFO, seeded in registration order.
    #[default]
    Registration,
    /// Uniformly random pending sentence, from a seeded generator.
    Shuffled(u64),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PropagateOptions {
    pub mode: Mode,
    pub order: WorklistOrder,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Fixpoint,
    Inconsistent(SentenceId),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropagationOutcome {
    pub status: Status,
    pub assignment: BoundAssignment,
    /// Number of strict bound changes made.
    pub steps: usize,
}

impl PropagationOutcome {
    pub fn is_consistent(&self) -> bool {
        self.status == Status::Fixpoint
    }
}

struct Worklist {
    queue: VecDeque<SentenceId>,
    queued: Vec<bool>,
    rng: Option<ChaCha8Rng>,
}

impl Worklist {
    fn new(len: usize, order: WorklistOrder) -> Self {
        let mut list = Worklist {
            queue: VecDeque::with_capacity(len),
            queued: vec![false; len],
            rng: match order {
                WorklistOrder::Registration => None,
                WorklistOrder::Shuffled(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
            },
        };
        (0..len).for_each(|id| list.push(id));
        list
    }

    fn push(&mut self, id: SentenceId) {
        if !self.queued[id] {
            self.queued[id] = true;
            self.queue.push_back(id);
        }
    }

    fn pop(&mut self) -> Option<SentenceId> {
        let id = match &mut self.rng {
            None => self.queue.pop_front()?,
            Some(rng) => {
                if self.queue.is_empty() {
                    return None;
                }
                let k = rng.random_range(0..self.queue.len());
                self.queue.swap_remove_back(k)?
            }
        };
        self.queued[id] = false;
        Some(id)
    }
}

/// Propagates in registration order.
pub fn propagate(initial: &BoundAssignment, mode: Mode) -> Result<PropagationOutcome> {
    propagate_with(
        initial,
        PropagateOptions {
            mode,
            order: WorklistOrder::Registration,
        },
    )
}

pub fn propagate_with(initial: &BoundAssignment, options: PropagateOptions) -> Result<PropagationOutcome> {
    if options.mode == Mode::Complete {
        let atoms = initial.atoms().len();
        if atoms > COMPLETE_MAX_ATOMS {
            return Err(Error::TooLarge(format!(
                "complete mode supports at most {COMPLETE_MAX_ATOMS} atoms, got {atoms}"
            )));
        }
    }
    let mut assignment = initial.clone();
    let (status, mut steps) = run_fixpoint(&mut assignment, options.order);
    if status != Status::Fixpoint || options.mode == Mode::Fixpoint {
        return Ok(PropagationOutcome {
            status,
            assignment,
            steps,
        });
    }

    let mut refined = assignment.clone();
    for point in 0..assignment.width {
        match split(assignment.project(point)) {
            Ok(local) => {
                for id in 0..refined.len() {
                    if local.inf[id].contains(0) {
                        refined.inf[id].insert(point);
                    }
                    if !local.sup[id].contains(0) {
                        refined.sup[id].remove(point);
                    }
                }
            }
            Err(id) => {
                return Ok(PropagationOutcome {
                    status: Status::Inconsistent(id),
                    assignment,
                    steps,
                })
            }
        }
    }
    for id in 0..refined.len() {
        steps += usize::from(refined.inf[id] != assignment.inf[id]);
        steps += usize::from(refined.sup[id] != assignment.sup[id]);
    }
    Ok(PropagationOutcome {
        status: Status::Fixpoint,
        assignment: refined,
        steps,
    })
}

fn run_fixpoint(assignment: &mut BoundAssignment, order: WorklistOrder) -> (Status, usize) {
    if let Some(id) = assignment.first_inconsistency() {
        return (Status::Inconsistent(id), 0);
    }
    let mut steps = 0;
    let mut worklist = Worklist::new(assignment.len(), order);
    while let Some(c) = worklist.pop() {
        let changed = assignment.fire(c, &mut steps);
        let broken = changed
            .iter()
            .copied()
            .filter(|&id| !assignment.inf[id].is_subset(&assignment.sup[id]))
            .min();
        if let Some(id) = broken {
            return (Status::Inconsistent(id), steps);
        }
        for id in changed {
            worklist.push(id);
            for k in 0..assignment.parents[id].len() {
                worklist.push(assignment.parents[id][k]);
            }
        }
    }
    (Status::Fixpoint, steps)
}

/// Case split over a single-point assignment. Splitting on atoms first means
/// every leaf fixes all atoms, after which propagation decides every other
/// sentence, so the combined bounds are exactly those of the legal leaves.
/// On failure returns the sentence whose both branches were refuted.
fn split(mut local: BoundAssignment) -> std::result::Result<BoundAssignment, SentenceId> {
    if let (Status::Inconsistent(id), _) = run_fixpoint(&mut local, WorklistOrder::Registration) {
        return Err(id);
    }
    let undetermined = |id: &SentenceId| !local.inf[*id].contains(0) && local.sup[*id].contains(0);
    let pick = local
        .atoms()
        .into_iter()
        .find(undetermined)
        .or_else(|| (0..local.len()).find(undetermined));
    let Some(s) = pick else {
        return Ok(local);
    };
    let mut member = local.clone();
    member.inf[s].insert(0);
    let mut outside = local;
    outside.sup[s].remove(0);
    match (split(member), split(outside)) {
        (Err(_), Err(_)) => Err(s),
        (Ok(one), Err(_)) | (Err(_), Ok(one)) => Ok(one),
        (Ok(mut one), Ok(other)) => {
            for id in 0..one.len() {
                one.inf[id].intersect_with(&other.inf[id]);
                one.sup[id].union_with(&other.sup[id]);
            }
            Ok(one)
        }
    }
}

/// All exact atom assignments whose axiom-evaluated sentence incidences lie
/// within the given bounds, by exhaustive search. Atoms are those registered
/// in `assignment`, in registration order of the search.
pub fn enumerate_legal(assignment: &BoundAssignment) -> Result<Vec<Environment>> {
    let width = assignment.width();
    let atoms: Vec<String> = assignment
        .atoms()
        .into_iter()
        .map(|id| match assignment.formula(id) {
            Formula::Atom(name) => name.clone(),
            _ => unreachable!(),
        })
        .collect();
    let bits = width * atoms.len();
    if bits > ENUMERATION_LIMIT_BITS {
        return Err(Error::TooLarge(format!(
            "enumeration over {bits} bits exceeds the limit of {ENUMERATION_LIMIT_BITS}"
        )));
    }
    let space = SampleSpace::uniform(width)?;
    let row_mask = (1u64 << width) - 1;
    let mut legal = Vec::new();
    'search: for code in 0u64..(1u64 << bits) {
        let mut env = Environment::new();
        for (k, name) in atoms.iter().enumerate() {
            let row = (code >> (k * width)) & row_mask;
            let inc = Incidence::from_indices(width, (0..width).filter(|j| row >> j & 1 == 1))?;
            env.insert(name.clone(), inc)?;
        }
        for id in 0..assignment.len() {
            let inc = incidence_of(assignment.formula(id), &env, &space)?;
            let (inf, sup) = assignment.bounds(id);
            if !inf.is_subset(&inc) || !inc.is_subset(sup) {
                continue 'search;
            }
        }
        legal.push(env);
    }
    Ok(legal)
}

/// Per-sentence tightest bounds over a set of legal assignments: the
/// intersection and the union of each sentence's incidences. With no legal
/// assignment these are `(w, ∅)`.
pub fn legal_bounds(assignment: &BoundAssignment, legal: &[Environment]) -> Result<Vec<(Incidence, Incidence)>> {
    let width = assignment.width();
    let space = SampleSpace::uniform(width)?;
    let mut out = vec![(Incidence::full(width), Incidence::empty(width)); assignment.len()];
    for env in legal {
        for (id, (inf, sup)) in out.iter_mut().enumerate() {
            let inc = incidence_of(assignment.formula(id), env, &space)?;
            inf.intersect_with(&inc);
            sup.union_with(&inc);
        }
    }
    Ok(out)
}
