//! Nondeterministic Buchi automata and their generalized variant.
//!
//! A `Buchi` automaton accepts an omega-word when some run visits an
//! accepting state infinitely often. A `GeneralizedBuchi` automaton carries
//! several acceptance sets of *transitions* and accepts when every set is
//! taken infinitely often; `degeneralize` lowers it to a plain automaton with
//! a level counter, multiplying the state count by one more than the number
//! of sets.
//!
//! Emptiness is decided by an iterative strongly-connected-component
//! decomposition of the reachable transition graph: the language is non-empty
//! exactly when a component containing at least one internal transition also
//! contains an accepting state. Witnesses are assembled from shortest paths
//! with sorted neighbor expansion, so repeated runs yield identical lassos.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use thiserror::Error;

use crate::words::{Alphabet, LassoWord, Letter, Word};

pub type StateId = usize;

#[derive(Debug, Error, PartialEq, Eq, Clone)]
pub enum BuchiError {
    #[error("automaton has no initial state")]
    NoInitialState,
    #[error("transition letter `{0}` is not in the automaton alphabet")]
    ForeignLetter(String),
    #[error("word uses letter `{0}` outside the automaton alphabet")]
    WordLetter(String),
    #[error("operands must share one alphabet")]
    AlphabetMismatch,
    #[error("acceptance set index {0} out of range")]
    BadAcceptSet(usize),
}

/// One labeled transition between state indices.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Transition {
    pub src: StateId,
    pub letter: Letter,
    pub dst: StateId,
}

// --- plain Buchi automata ---------------------------------------------------

/// Builder collecting states by name and transitions before validation.
pub struct BuchiBuilder {
    alphabet: Alphabet,
    names: Vec<String>,
    index: HashMap<String, StateId>,
    initial: Option<StateId>,
    finals: BTreeSet<StateId>,
    transitions: BTreeSet<Transition>,
}

impl BuchiBuilder {
    pub fn new(alphabet: Alphabet) -> BuchiBuilder {
        BuchiBuilder {
            alphabet,
            names: Vec::new(),
            index: HashMap::new(),
            initial: None,
            finals: BTreeSet::new(),
            transitions: BTreeSet::new(),
        }
    }

    /// Returns the state named `name`, creating it on first use.
    pub fn state(&mut self, name: &str) -> StateId {
        if let Some(&id) = self.index.get(name) {
            return id;
        }
        let id = self.names.len();
        self.names.push(name.to_owned());
        self.index.insert(name.to_owned(), id);
        id
    }

    pub fn initial(&mut self, s: StateId) -> &mut Self {
        assert!(s < self.names.len(), "unknown state id");
        self.initial = Some(s);
        self
    }

    pub fn accept(&mut self, s: StateId) -> &mut Self {
        assert!(s < self.names.len(), "unknown state id");
        self.finals.insert(s);
        self
    }

    pub fn transition(&mut self, src: StateId, letter: Letter, dst: StateId) -> &mut Self {
        assert!(src < self.names.len() && dst < self.names.len(), "unknown state id");
        self.transitions.insert(Transition { src, letter, dst });
        self
    }

    pub fn build(self) -> Result<Buchi, BuchiError> {
        let initial = self.initial.ok_or(BuchiError::NoInitialState)?;
        for t in &self.transitions {
            if !self.alphabet.contains(t.letter) {
                return Err(BuchiError::ForeignLetter(t.letter.as_str().to_owned()));
            }
        }
        Ok(Buchi {
            alphabet: self.alphabet,
            names: self.names,
            initial,
            finals: self.finals,
            transitions: self.transitions.into_iter().collect(),
        })
    }
}

/// A nondeterministic Buchi automaton with state-based acceptance.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Buchi {
    alphabet: Alphabet,
    names: Vec<String>,
    initial: StateId,
    finals: BTreeSet<StateId>,
    transitions: Vec<Transition>, // sorted by (src, letter, dst)
}

impl Buchi {
    pub fn builder(alphabet: Alphabet) -> BuchiBuilder {
        BuchiBuilder::new(alphabet)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn state_count(&self) -> usize {
        self.names.len()
    }

    pub fn state_name(&self, s: StateId) -> &str {
        &self.names[s]
    }

    pub fn state_names(&self) -> &[String] {
        &self.names
    }

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.names.iter().position(|n| n == name)
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn finals(&self) -> &BTreeSet<StateId> {
        &self.finals
    }

    pub fn is_accepting_state(&self, s: StateId) -> bool {
        self.finals.contains(&s)
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    fn successors(&self) -> Vec<Vec<(Letter, StateId)>> {
        let mut succ = vec![Vec::new(); self.names.len()];
        for t in &self.transitions {
            succ[t.src].push((t.letter, t.dst));
        }
        succ
    }

    /// States reachable from the initial state, in breadth-first order.
    fn reachable(&self, succ: &[Vec<(Letter, StateId)>]) -> Vec<StateId> {
        let mut seen = vec![false; self.names.len()];
        let mut order = Vec::new();
        let mut queue = VecDeque::new();
        seen[self.initial] = true;
        queue.push_back(self.initial);
        while let Some(q) = queue.pop_front() {
            order.push(q);
            for &(_, d) in &succ[q] {
                if !seen[d] {
                    seen[d] = true;
                    queue.push_back(d);
                }
            }
        }
        order
    }

    /// Decides language emptiness; a non-empty language yields a canonical
    /// accepted lasso.
    pub fn find_accepted_lasso(&self) -> Option<LassoWord> {
        let succ = self.successors();
        let order = self.reachable(&succ);
        let scc = strongly_connected_components(self.names.len(), |q| {
            succ[q].iter().map(|&(_, d)| d).collect()
        });
        // A component supports a cycle exactly when it has an internal edge:
        // always true for components of two or more states, and true for a
        // singleton only with a self-loop.
        let mut has_internal_edge = vec![false; self.names.len() + 1];
        for t in &self.transitions {
            if scc[t.src] == scc[t.dst] {
                has_internal_edge[scc[t.src]] = true;
            }
        }
        let pivot = order
            .iter()
            .copied()
            .find(|&q| self.finals.contains(&q) && has_internal_edge[scc[q]])?;
        let stem = self
            .shortest_path(&succ, self.initial, pivot, None)
            .expect("pivot is reachable");
        // Shortest non-empty cycle through the pivot inside its component.
        let mut cycle: Option<Word> = None;
        for &(l, d) in &succ[pivot] {
            if scc[d] != scc[pivot] {
                continue;
            }
            if let Some(back) = self.shortest_path(&succ, d, pivot, Some((&scc, scc[pivot]))) {
                let mut cand = Word::from_letters([l]);
                cand.extend_from(&back);
                let better = match &cycle {
                    None => true,
                    Some(c) => cand.len() < c.len(),
                };
                if better {
                    cycle = Some(cand);
                }
            }
        }
        let cycle = cycle.expect("pivot component has an internal cycle");
        Some(LassoWord::new(stem, cycle).expect("cycle is non-empty").normalize())
    }

    pub fn is_empty(&self) -> bool {
        self.find_accepted_lasso().is_none()
    }

    /// Shortest letter path `from -> to` by breadth-first search with sorted
    /// neighbor expansion; `within` restricts moves to one component.
    fn shortest_path(
        &self,
        succ: &[Vec<(Letter, StateId)>],
        from: StateId,
        to: StateId,
        within: Option<(&[usize], usize)>,
    ) -> Option<Word> {
        let allowed = |q: StateId| match within {
            None => true,
            Some((scc, id)) => scc[q] == id,
        };
        if !allowed(from) {
            return None;
        }
        let mut parent: Vec<Option<(StateId, Letter)>> = vec![None; self.names.len()];
        let mut seen = vec![false; self.names.len()];
        let mut queue = VecDeque::new();
        seen[from] = true;
        queue.push_back(from);
        if from == to {
            return Some(Word::empty());
        }
        while let Some(q) = queue.pop_front() {
            for &(l, d) in &succ[q] {
                if !allowed(d) || seen[d] {
                    continue;
                }
                seen[d] = true;
                parent[d] = Some((q, l));
                if d == to {
                    let mut letters = Vec::new();
                    let mut cur = to;
                    while cur != from {
                        let (p, l) = parent[cur].unwrap();
                        letters.push(l);
                        cur = p;
                    }
                    letters.reverse();
                    return Some(Word::from_letters(letters));
                }
                queue.push_back(d);
            }
        }
        None
    }

    /// Whether some run over the lasso word visits acceptance infinitely
    /// often, decided on the synchronized product with the word's position
    /// automaton.
    pub fn accepts_lasso(&self, w: &LassoWord) -> Result<bool, BuchiError> {
        for i in 1..=w.size() {
            let l = w.letter_at(i);
            if !self.alphabet.contains(l) {
                return Err(BuchiError::WordLetter(l.as_str().to_owned()));
            }
        }
        let s = w.stem().len();
        let n = w.size();
        let advance = |p: usize| if p + 1 < n { p + 1 } else { s };
        // Product states (state, next position), with positions 0-based into
        // stem then cycle; only final product states matter for acceptance.
        let mut b = Buchi::builder(self.alphabet.clone());
        let mut ids = BTreeMap::new();
        for q in 0..self.names.len() {
            for p in 0..n {
                let id = b.state(&format!("{}@{p}", self.names[q]));
                ids.insert((q, p), id);
            }
        }
        b.initial(ids[&(self.initial, 0)]);
        for q in self.finals.iter() {
            for p in 0..n {
                b.accept(ids[&(*q, p)]);
            }
        }
        for t in &self.transitions {
            for p in 0..n {
                if t.letter == w.letter_at(p + 1) {
                    b.transition(ids[&(t.src, p)], t.letter, ids[&(t.dst, advance(p))]);
                }
            }
        }
        Ok(!b.build()?.is_empty())
    }

    /// Synchronized product with transition-set acceptance: set 0 collects
    /// transitions entering a state whose left component accepts, set 1 those
    /// entering a right-accepting component.
    pub fn product(&self, other: &Buchi) -> Result<GeneralizedBuchi, BuchiError> {
        if self.alphabet != other.alphabet {
            return Err(BuchiError::AlphabetMismatch);
        }
        let mut gb = GeneralizedBuchi::builder(self.alphabet.clone(), 2);
        let mut ids: BTreeMap<(StateId, StateId), StateId> = BTreeMap::new();
        let mut queue = VecDeque::new();
        let start = (self.initial, other.initial);
        let name = |a: StateId, b: StateId| format!("({},{})", self.names[a], other.names[b]);
        ids.insert(start, gb.state(&name(start.0, start.1)));
        gb.initial(ids[&start]);
        queue.push_back(start);
        let succ_a = self.successors();
        let succ_b = other.successors();
        while let Some((qa, qb)) = queue.pop_front() {
            let src = ids[&(qa, qb)];
            let mut edges: Vec<(Letter, StateId, StateId)> = Vec::new();
            for &(la, da) in &succ_a[qa] {
                for &(lb, db) in &succ_b[qb] {
                    if la == lb {
                        edges.push((la, da, db));
                    }
                }
            }
            edges.sort();
            for (l, da, db) in edges {
                let key = (da, db);
                let dst = *ids.entry(key).or_insert_with(|| {
                    queue.push_back(key);
                    gb.state(&name(da, db))
                });
                let t = gb.transition(src, l, dst);
                if self.finals.contains(&da) {
                    gb.mark(0, t).unwrap();
                }
                if other.finals.contains(&db) {
                    gb.mark(1, t).unwrap();
                }
            }
        }
        gb.build()
    }

    /// Intersection through the generalized product and degeneralization.
    pub fn intersection(&self, other: &Buchi) -> Result<Buchi, BuchiError> {
        Ok(self.product(other)?.degeneralize())
    }
}

/// The deterministic automaton accepting exactly the given lasso word, with
/// every state accepting.
pub fn lasso_automaton(w: &LassoWord, alphabet: &Alphabet) -> Result<Buchi, BuchiError> {
    for i in 1..=w.size() {
        let l = w.letter_at(i);
        if !alphabet.contains(l) {
            return Err(BuchiError::WordLetter(l.as_str().to_owned()));
        }
    }
    let n = w.size();
    let s = w.stem().len();
    let mut b = Buchi::builder(alphabet.clone());
    let ids: Vec<StateId> = (0..n).map(|p| b.state(&format!("p{p}"))).collect();
    b.initial(ids[0]);
    for &id in &ids {
        b.accept(id);
    }
    for p in 0..n {
        let next = if p + 1 < n { p + 1 } else { s };
        b.transition(ids[p], w.letter_at(p + 1), ids[next]);
    }
    b.build()
}

// --- generalized Buchi automata ---------------------------------------------

/// Builder for generalized automata; `transition` returns the transition's
/// index so it can be marked into acceptance sets.
pub struct GeneralizedBuchiBuilder {
    alphabet: Alphabet,
    names: Vec<String>,
    index: HashMap<String, StateId>,
    initial: Option<StateId>,
    transitions: Vec<Transition>,
    accept_sets: Vec<BTreeSet<usize>>,
}

impl GeneralizedBuchiBuilder {
    pub fn state(&mut self, name: &str) -> StateId {
        if let Some(&id) = self.index.get(name) {
            return id;
        }
        let id = self.names.len();
        self.names.push(name.to_owned());
        self.index.insert(name.to_owned(), id);
        id
    }

    pub fn initial(&mut self, s: StateId) -> &mut Self {
        assert!(s < self.names.len(), "unknown state id");
        self.initial = Some(s);
        self
    }

    /// Appends a transition and returns its index.
    pub fn transition(&mut self, src: StateId, letter: Letter, dst: StateId) -> usize {
        assert!(src < self.names.len() && dst < self.names.len(), "unknown state id");
        self.transitions.push(Transition { src, letter, dst });
        self.transitions.len() - 1
    }

    /// Puts transition `t` into acceptance set `set`.
    pub fn mark(&mut self, set: usize, t: usize) -> Result<(), BuchiError> {
        if set >= self.accept_sets.len() {
            return Err(BuchiError::BadAcceptSet(set));
        }
        assert!(t < self.transitions.len(), "unknown transition index");
        self.accept_sets[set].insert(t);
        Ok(())
    }

    pub fn build(self) -> Result<GeneralizedBuchi, BuchiError> {
        let initial = self.initial.ok_or(BuchiError::NoInitialState)?;
        for t in &self.transitions {
            if !self.alphabet.contains(t.letter) {
                return Err(BuchiError::ForeignLetter(t.letter.as_str().to_owned()));
            }
        }
        Ok(GeneralizedBuchi {
            alphabet: self.alphabet,
            names: self.names,
            initial,
            transitions: self.transitions,
            accept_sets: self.accept_sets,
        })
    }
}

/// A Buchi automaton whose acceptance asks every one of `k` transition sets
/// to be visited infinitely often.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GeneralizedBuchi {
    alphabet: Alphabet,
    names: Vec<String>,
    initial: StateId,
    transitions: Vec<Transition>,
    accept_sets: Vec<BTreeSet<usize>>,
}

impl GeneralizedBuchi {
    pub fn builder(alphabet: Alphabet, sets: usize) -> GeneralizedBuchiBuilder {
        GeneralizedBuchiBuilder {
            alphabet,
            names: Vec::new(),
            index: HashMap::new(),
            initial: None,
            transitions: Vec::new(),
            accept_sets: vec![BTreeSet::new(); sets],
        }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn state_count(&self) -> usize {
        self.names.len()
    }

    pub fn set_count(&self) -> usize {
        self.accept_sets.len()
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn accept_sets(&self) -> &[BTreeSet<usize>] {
        &self.accept_sets
    }

    /// Lowers to a plain automaton with a level counter. States are pairs of
    /// an original state and a level in `0..=k`; level `i < k` waits for set
    /// `i`, level `k` is accepting and behaves as level 0. Taking a
    /// transition advances past every consecutive set it belongs to, so the
    /// result has at most `(k + 1)` times the original states and visits
    /// level `k` infinitely often exactly when every set recurs.
    pub fn degeneralize(&self) -> Buchi {
        let k = self.accept_sets.len();
        let mut succ: Vec<Vec<usize>> = vec![Vec::new(); self.names.len()];
        for (i, t) in self.transitions.iter().enumerate() {
            succ[t.src].push(i);
        }
        for edges in &mut succ {
            edges.sort_by_key(|&i| {
                let t = self.transitions[i];
                (t.letter, t.dst, i)
            });
        }
        let mut b = Buchi::builder(self.alphabet.clone());
        let mut ids: BTreeMap<(StateId, usize), StateId> = BTreeMap::new();
        let mut queue = VecDeque::new();
        let name = |q: StateId, lvl: usize| format!("{}#{lvl}", self.names[q]);
        let start = (self.initial, 0);
        ids.insert(start, b.state(&name(self.initial, 0)));
        b.initial(ids[&start]);
        queue.push_back(start);
        while let Some((q, lvl)) = queue.pop_front() {
            let src = ids[&(q, lvl)];
            if lvl == k {
                b.accept(src);
            }
            let effective = if lvl == k { 0 } else { lvl };
            for &i in &succ[q] {
                let t = self.transitions[i];
                let mut next = effective;
                while next < k && self.accept_sets[next].contains(&i) {
                    next += 1;
                }
                let key = (t.dst, next);
                let dst = *ids.entry(key).or_insert_with(|| {
                    queue.push_back(key);
                    b.state(&name(t.dst, next))
                });
                b.transition(src, t.letter, dst);
            }
        }
        b.build().expect("initial state is set")
    }

    pub fn is_empty(&self) -> bool {
        self.degeneralize().is_empty()
    }

    pub fn find_accepted_lasso(&self) -> Option<LassoWord> {
        self.degeneralize().find_accepted_lasso()
    }
}

// --- strongly connected components -------------------------------------------

/// Iterative Tarjan decomposition; returns one component id per node, with
/// ids assigned in reverse topological order of the component graph.
pub(crate) fn strongly_connected_components(
    n: usize,
    successors: impl Fn(usize) -> Vec<usize>,
) -> Vec<usize> {
    const UNSET: usize = usize::MAX;
    let adjacency: Vec<Vec<usize>> = (0..n).map(successors).collect();
    let mut index = vec![UNSET; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![UNSET; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut next_index = 0usize;
    let mut comp_count = 0usize;

    for root in 0..n {
        if index[root] != UNSET {
            continue;
        }
        // Explicit DFS frames: (node, next successor slot).
        let mut frames: Vec<(usize, usize)> = Vec::new();
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;
        frames.push((root, 0));
        while let Some(&(v, pos)) = frames.last() {
            if pos < adjacency[v].len() {
                frames.last_mut().unwrap().1 += 1;
                let w = adjacency[v][pos];
                if index[w] == UNSET {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    frames.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                frames.pop();
                if let Some(&(p, _)) = frames.last() {
                    low[p] = low[p].min(low[v]);
                }
                if low[v] == index[v] {
                    loop {
                        let w = stack.pop().unwrap();
                        on_stack[w] = false;
                        comp[w] = comp_count;
                        if w == v {
                            break;
                        }
                    }
                    comp_count += 1;
                }
            }
        }
    }
    comp
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::{Alphabet, LassoWord};

    fn ab() -> Alphabet {
        Alphabet::from_tokens(["a", "b"]).unwrap()
    }

    fn lasso(text: &str) -> LassoWord {
        LassoWord::parse(text).unwrap()
    }

    fn letter(t: &str) -> Letter {
        Letter::new(t)
    }

    /// Accepts words with infinitely many occurrences of `hot`.
    fn infinitely_many(hot: &str) -> Buchi {
        let mut b = Buchi::builder(ab());
        let wait = b.state("wait");
        let hit = b.state("hit");
        b.initial(wait).accept(hit);
        for l in ["a", "b"] {
            let dst = if l == hot { hit } else { wait };
            b.transition(wait, letter(l), dst);
            b.transition(hit, letter(l), dst);
        }
        b.build().unwrap()
    }

    #[test]
    fn membership_on_a_two_state_automaton() {
        let inf_a = infinitely_many("a");
        assert!(inf_a.accepts_lasso(&lasso("(a)")).unwrap());
        assert!(inf_a.accepts_lasso(&lasso("bbb(ab)")).unwrap());
        assert!(!inf_a.accepts_lasso(&lasso("aaa(b)")).unwrap());
        assert!(inf_a.accepts_lasso(&lasso("(ba)")).unwrap());
    }

    #[test]
    fn membership_rejects_foreign_letters() {
        let inf_a = infinitely_many("a");
        assert_eq!(
            inf_a.accepts_lasso(&lasso("(z)")),
            Err(BuchiError::WordLetter("z".to_owned()))
        );
    }

    #[test]
    fn membership_is_invariant_under_normalization() {
        let inf_a = infinitely_many("a");
        for text in ["ab(ba)", "aba(baba)", "abb(ab)", "(abab)", "b(bb)"] {
            let w = lasso(text);
            assert_eq!(
                inf_a.accepts_lasso(&w).unwrap(),
                inf_a.accepts_lasso(&w.normalize()).unwrap(),
                "{text}"
            );
        }
    }

    #[test]
    fn emptiness_needs_a_cycle_through_acceptance() {
        // Final state reachable but not on any cycle: empty.
        let mut b = Buchi::builder(ab());
        let q0 = b.state("q0");
        let q1 = b.state("q1");
        b.initial(q0).accept(q1);
        b.transition(q0, letter("a"), q1);
        b.transition(q1, letter("a"), q0);
        // q1 lies on the q0-q1 cycle, so this one is non-empty.
        let m = b.build().unwrap();
        let w = m.find_accepted_lasso().unwrap();
        assert!(m.accepts_lasso(&w).unwrap());
        assert_eq!(w, lasso("(aa)").normalize());

        let mut b = Buchi::builder(ab());
        let q0 = b.state("q0");
        let q1 = b.state("q1");
        b.initial(q0).accept(q1);
        b.transition(q0, letter("a"), q1);
        b.transition(q0, letter("b"), q0);
        let m = b.build().unwrap();
        assert!(m.is_empty());
    }

    #[test]
    fn emptiness_ignores_unreachable_acceptance() {
        let mut b = Buchi::builder(ab());
        let q0 = b.state("q0");
        let island = b.state("island");
        b.initial(q0).accept(island);
        b.transition(q0, letter("a"), q0);
        b.transition(island, letter("a"), island);
        assert!(b.build().unwrap().is_empty());
    }

    #[test]
    fn witness_is_deterministic_and_accepted() {
        let inf_b = infinitely_many("b");
        let w1 = inf_b.find_accepted_lasso().unwrap();
        let w2 = inf_b.find_accepted_lasso().unwrap();
        assert_eq!(w1, w2);
        assert!(inf_b.accepts_lasso(&w1).unwrap());
        assert_eq!(w1, lasso("(b)"));
    }

    #[test]
    fn intersection_tracks_both_acceptance_conditions() {
        let both = infinitely_many("a").intersection(&infinitely_many("b")).unwrap();
        assert!(both.accepts_lasso(&lasso("(ab)")).unwrap());
        assert!(both.accepts_lasso(&lasso("ab(ba)")).unwrap());
        assert!(!both.accepts_lasso(&lasso("b(a)")).unwrap());
        assert!(!both.accepts_lasso(&lasso("a(b)")).unwrap());
        let w = both.find_accepted_lasso().unwrap();
        assert!(both.accepts_lasso(&w).unwrap());
    }

    #[test]
    fn degeneralization_bound_and_zero_set_case() {
        let product = infinitely_many("a").product(&infinitely_many("b")).unwrap();
        let lowered = product.degeneralize();
        assert!(lowered.state_count() <= product.state_count() * (product.set_count() + 1));

        // Zero acceptance sets: every infinite run accepts, one level only.
        let mut gb = GeneralizedBuchi::builder(ab(), 0);
        let q = gb.state("q");
        gb.initial(q);
        gb.transition(q, letter("a"), q);
        let g = gb.build().unwrap();
        let lowered = g.degeneralize();
        assert_eq!(lowered.state_count(), 1);
        assert_eq!(lowered.finals().len(), 1);
        assert!(lowered.accepts_lasso(&lasso("(a)")).unwrap());
    }

    #[test]
    fn degeneralization_handles_overlapping_sets() {
        // One self-loop sitting in both sets must cascade two levels at once;
        // stopping at one level per step would still accept here, so also
        // check a run that hits only set 0 stays non-accepting.
        let mut gb = GeneralizedBuchi::builder(ab(), 2);
        let q = gb.state("q");
        gb.initial(q);
        let t_both = gb.transition(q, letter("a"), q);
        let t_first = gb.transition(q, letter("b"), q);
        gb.mark(0, t_both).unwrap();
        gb.mark(1, t_both).unwrap();
        gb.mark(0, t_first).unwrap();
        let g = gb.build().unwrap();
        let lowered = g.degeneralize();
        assert!(lowered.accepts_lasso(&lasso("(a)")).unwrap());
        assert!(lowered.accepts_lasso(&lasso("(ab)")).unwrap());
        assert!(!lowered.accepts_lasso(&lasso("(b)")).unwrap());
    }

    #[test]
    fn lasso_automaton_accepts_exactly_its_word() {
        let zero_alpha = Alphabet::from_tokens(["a", "b"]).unwrap();
        let w = lasso("ab(ba)");
        let m = lasso_automaton(&w, &zero_alpha).unwrap();
        assert!(m.accepts_lasso(&w).unwrap());
        assert!(m.accepts_lasso(&lasso("abb(ab)")).unwrap());
        for other in ["(a)", "(b)", "ab(ab)", "ba(ba)", "(ba)"] {
            assert!(!m.accepts_lasso(&lasso(other)).unwrap(), "{other}");
        }
    }

    #[test]
    fn scc_ids_are_reverse_topological() {
        // 0 -> 1 -> 2 with a 1 <-> 2 cycle: component of 0 comes last.
        let adj = vec![vec![1], vec![2], vec![1]];
        let comp = strongly_connected_components(3, |v| adj[v].clone());
        assert_eq!(comp[1], comp[2]);
        assert_ne!(comp[0], comp[1]);
        assert!(comp[0] > comp[1]);
    }
}
