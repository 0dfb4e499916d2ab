//! Real-time one-counter Buchi automata.
//!
//! Transitions carry a zero guard and a counter effect in `-1..=1`; a
//! zero-guarded transition may not decrement. Runs start with counter 0,
//! consume one letter per step, and accept when some accepting control state
//! recurs forever.
//!
//! Emptiness splits by counter behavior. Runs whose counter stays bounded
//! appear as lassos in the configuration graph capped at a ceiling; runs with
//! unbounded counter eventually leave zero behind and reduce to a control
//! cycle of non-negative effect over zero-free transitions that keeps the
//! counter positive and touches acceptance. Both cases produce a lasso-shaped
//! run certificate. The ceiling (and the matching offset window of the cycle
//! search) trades completeness for time; the default grows quadratically with
//! the state count and is cross-checked against `bounded_accept` in tests.

use std::collections::{BTreeSet, HashMap, VecDeque};

use thiserror::Error;

use crate::buchi::{strongly_connected_components, StateId};
use crate::words::{Alphabet, LassoWord, Letter, Word};

#[derive(Debug, Error, PartialEq, Eq, Clone)]
pub enum CounterError {
    #[error("automaton has no initial state")]
    NoInitialState,
    #[error("transition letter `{0}` is not in the automaton alphabet")]
    ForeignLetter(String),
    #[error("word uses letter `{0}` outside the automaton alphabet")]
    WordLetter(String),
    #[error("counter effect {0} is outside -1..=1")]
    BadEffect(i8),
    #[error("a zero-guarded transition may not decrement")]
    DecrementAtZero,
}

/// One transition: guard `at_zero` matches configurations with counter zero,
/// its negation those with a positive counter.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct CounterTransition {
    pub src: StateId,
    pub letter: Letter,
    pub at_zero: bool,
    pub dst: StateId,
    pub effect: i8,
}

/// A configuration: control state plus counter value.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Config {
    pub state: StateId,
    pub counter: u64,
}

// --- construction -------------------------------------------------------------

pub struct OneCounterBuilder {
    alphabet: Alphabet,
    names: Vec<String>,
    index: HashMap<String, StateId>,
    initial: Option<StateId>,
    finals: BTreeSet<StateId>,
    transitions: BTreeSet<CounterTransition>,
}

impl OneCounterBuilder {
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

    pub fn transition(
        &mut self,
        src: StateId,
        letter: Letter,
        at_zero: bool,
        dst: StateId,
        effect: i8,
    ) -> &mut Self {
        assert!(src < self.names.len() && dst < self.names.len(), "unknown state id");
        self.transitions.insert(CounterTransition { src, letter, at_zero, dst, effect });
        self
    }

    pub fn build(self) -> Result<OneCounter, CounterError> {
        let initial = self.initial.ok_or(CounterError::NoInitialState)?;
        for t in &self.transitions {
            if !self.alphabet.contains(t.letter) {
                return Err(CounterError::ForeignLetter(t.letter.as_str().to_owned()));
            }
            if !(-1..=1).contains(&t.effect) {
                return Err(CounterError::BadEffect(t.effect));
            }
            if t.at_zero && t.effect < 0 {
                return Err(CounterError::DecrementAtZero);
            }
        }
        Ok(OneCounter {
            alphabet: self.alphabet,
            names: self.names,
            initial,
            finals: self.finals,
            transitions: self.transitions.into_iter().collect(),
        })
    }
}

/// A real-time one-counter Buchi automaton.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct OneCounter {
    alphabet: Alphabet,
    names: Vec<String>,
    initial: StateId,
    finals: BTreeSet<StateId>,
    transitions: Vec<CounterTransition>, // sorted
}

impl OneCounter {
    pub fn builder(alphabet: Alphabet) -> OneCounterBuilder {
        OneCounterBuilder {
            alphabet,
            names: Vec::new(),
            index: HashMap::new(),
            initial: None,
            finals: BTreeSet::new(),
            transitions: BTreeSet::new(),
        }
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

    pub fn transitions(&self) -> &[CounterTransition] {
        &self.transitions
    }

    /// Whether one transition carries `from` to `to` over `letter`.
    pub fn step_allows(&self, from: Config, letter: Letter, to: Config) -> bool {
        let effect = to.counter as i64 - from.counter as i64;
        if !(-1..=1).contains(&effect) {
            return false;
        }
        let want = CounterTransition {
            src: from.state,
            letter,
            at_zero: from.counter == 0,
            dst: to.state,
            effect: effect as i8,
        };
        self.transitions.binary_search(&want).is_ok()
    }

    /// Default configuration ceiling: quadratic in the state count.
    pub fn default_counter_cap(&self) -> u64 {
        let n = self.names.len() as u64;
        n * n + n + 2
    }

    pub fn is_empty(&self) -> bool {
        self.find_accepted().is_none()
    }

    pub fn find_accepted(&self) -> Option<(LassoWord, LassoRun)> {
        self.find_accepted_with_cap(self.default_counter_cap())
    }

    /// Searches for an accepted lasso word together with a run certificate,
    /// looking first for a repeating configuration under the ceiling, then
    /// for a positive-counter pumping cycle.
    pub fn find_accepted_with_cap(&self, cap: u64) -> Option<(LassoWord, LassoRun)> {
        let flat = FlatReach::explore(self, cap);
        if let Some(found) = self.flat_lasso(&flat) {
            return Some(found);
        }
        self.pumping_lasso(&flat)
    }

    /// Membership of a lasso word, via emptiness of the product with the
    /// word's position automaton; a positive answer carries a run whose
    /// configurations project back onto this automaton.
    pub fn accepts_lasso(&self, w: &LassoWord) -> Result<Option<LassoRun>, CounterError> {
        let product_states = (self.names.len() * w.size()) as u64;
        self.accepts_lasso_with_cap(w, product_states * product_states + product_states + 2)
    }

    pub fn accepts_lasso_with_cap(
        &self,
        w: &LassoWord,
        cap: u64,
    ) -> Result<Option<LassoRun>, CounterError> {
        for i in 1..=w.size() {
            let l = w.letter_at(i);
            if !self.alphabet.contains(l) {
                return Err(CounterError::WordLetter(l.as_str().to_owned()));
            }
        }
        let n = w.size();
        let s = w.stem().len();
        let advance = |p: usize| if p + 1 < n { p + 1 } else { s };
        let mut b = OneCounter::builder(self.alphabet.clone());
        let mut back = Vec::with_capacity(self.names.len() * n);
        let mut ids = vec![0; self.names.len() * n];
        for q in 0..self.names.len() {
            for p in 0..n {
                ids[q * n + p] = b.state(&format!("{}@{p}", self.names[q]));
                back.push(q);
            }
        }
        b.initial(ids[self.initial * n]);
        for &q in &self.finals {
            for p in 0..n {
                b.accept(ids[q * n + p]);
            }
        }
        for t in &self.transitions {
            for p in 0..n {
                if t.letter == w.letter_at(p + 1) {
                    b.transition(
                        ids[t.src * n + p],
                        t.letter,
                        t.at_zero,
                        ids[t.dst * n + advance(p)],
                        t.effect,
                    );
                }
            }
        }
        let product = b.build()?;
        Ok(product.find_accepted_with_cap(cap).map(|(_, run)| LassoRun {
            pre: run.pre.iter().map(|c| Config { state: back[c.state], ..*c }).collect(),
            cyc: run.cyc.iter().map(|c| Config { state: back[c.state], ..*c }).collect(),
            pump: run.pump,
        }))
    }

    // Bounded lasso in the capped configuration graph: a reachable strongly
    // connected component with an internal edge and an accepting control
    // state yields a repeating configuration.
    fn flat_lasso(&self, flat: &FlatReach) -> Option<(LassoWord, LassoRun)> {
        let scc = strongly_connected_components(flat.node_count(), |v| {
            flat.successors(v).into_iter().map(|(n, _)| n).collect()
        });
        let mut internal = vec![false; flat.node_count() + 1];
        for v in 0..flat.node_count() {
            if !flat.discovered(v) {
                continue;
            }
            for (d, _) in flat.successors(v) {
                if scc[v] == scc[d] {
                    internal[scc[v]] = true;
                }
            }
        }
        let pivot = *flat
            .order
            .iter()
            .find(|&&v| internal[scc[v]] && self.finals.contains(&flat.config_of(v).state))?;
        let (pre, stem_letters) = flat.path_to(pivot);
        // Shortest cycle pivot -> pivot inside the component.
        let mut parent: HashMap<usize, (usize, CounterTransition)> = HashMap::new();
        let mut queue = VecDeque::new();
        queue.push_back(pivot);
        let mut closing: Option<(usize, CounterTransition)> = None;
        let mut seen = vec![false; flat.node_count()];
        seen[pivot] = true;
        'bfs: while let Some(v) = queue.pop_front() {
            for (d, t) in flat.successors(v) {
                if scc[d] != scc[pivot] {
                    continue;
                }
                if d == pivot {
                    closing = Some((v, t));
                    break 'bfs;
                }
                if !seen[d] {
                    seen[d] = true;
                    parent.insert(d, (v, t));
                    queue.push_back(d);
                }
            }
        }
        let (mut cur, last_t) = closing.expect("component has an internal cycle");
        let mut rev: Vec<(usize, CounterTransition)> = vec![(cur, last_t)];
        while cur != pivot {
            let (p, t) = parent[&cur];
            rev.push((p, t));
            cur = p;
        }
        rev.reverse();
        let cyc: Vec<Config> = rev.iter().map(|&(v, _)| flat.config_of(v)).collect();
        let cycle_letters: Vec<Letter> = rev.iter().map(|&(_, t)| t.letter).collect();
        let word = LassoWord::new(
            Word::from_letters(stem_letters),
            Word::from_letters(cycle_letters),
        )
        .expect("cycle is non-empty");
        Some((word, LassoRun { pre, cyc, pump: 0 }))
    }

    // Unbounded-counter lasso: a control cycle over zero-free transitions
    // with non-negative total effect that keeps the counter positive and
    // visits acceptance, started from a reachable high-counter configuration.
    fn pumping_lasso(&self, flat: &FlatReach) -> Option<(LassoWord, LassoRun)> {
        let n = self.names.len();
        let mut positive_by_src: Vec<Vec<CounterTransition>> = vec![Vec::new(); n];
        for t in self.transitions.iter().filter(|t| !t.at_zero) {
            positive_by_src[t.src].push(*t);
        }
        let scc = strongly_connected_components(n, |q| {
            positive_by_src[q].iter().map(|t| t.dst).collect()
        });
        // A qualifying component needs acceptance on a cycle of non-negative
        // total effect, so it must hold a final state and some edge that does
        // not decrement.
        let mut comp_final = vec![false; n + 1];
        let mut comp_nonneg_edge = vec![false; n + 1];
        let mut comp_internal = vec![false; n + 1];
        for &q in &self.finals {
            comp_final[scc[q]] = true;
        }
        for t in positive_by_src.iter().flatten() {
            if scc[t.src] == scc[t.dst] {
                comp_internal[scc[t.src]] = true;
                if t.effect >= 0 {
                    comp_nonneg_edge[scc[t.src]] = true;
                }
            }
        }
        for q in 0..n {
            let comp = scc[q];
            if !(comp_final[comp] && comp_internal[comp] && comp_nonneg_edge[comp]) {
                continue;
            }
            let c_max = match flat.max_counter(q) {
                Some(c) if c >= 1 => c,
                _ => continue,
            };
            if let Some(found) = self.pump_cycle_from(flat, &positive_by_src, &scc, q, c_max) {
                return Some(found);
            }
        }
        None
    }

    // Searches one control state for a cycle of non-negative effect over
    // zero-free transitions, tracking the counter offset from the start and
    // whether acceptance was visited. The offset window is the floor imposed
    // by staying positive and a ceiling reusing the configuration cap.
    fn pump_cycle_from(
        &self,
        flat: &FlatReach,
        positive_by_src: &[Vec<CounterTransition>],
        scc: &[usize],
        q: StateId,
        c_max: u64,
    ) -> Option<(LassoWord, LassoRun)> {
        let n = self.names.len();
        let top = flat.cap as i64;
        let floor = 1 - c_max.min(flat.cap) as i64;
        let width = (top - floor + 1) as usize;
        let node = |state: StateId, off: i64, flag: bool| -> usize {
            ((state * width + (off - floor) as usize) << 1) | usize::from(flag)
        };
        let mut seen = vec![false; (n * width) << 1];
        let mut parent: HashMap<usize, (usize, CounterTransition, i64)> = HashMap::new();
        let start_flag = self.finals.contains(&q);
        let start = node(q, 0, start_flag);
        seen[start] = true;
        let mut queue = VecDeque::new();
        queue.push_back((q, 0i64, start_flag));
        let mut closing: Option<(usize, CounterTransition, i64)> = None;
        'bfs: while let Some((p, off, flag)) = queue.pop_front() {
            let v = node(p, off, flag);
            for t in positive_by_src[p].iter().filter(|t| scc[t.dst] == scc[q]) {
                let off2 = off + t.effect as i64;
                if off2 < floor || off2 > top {
                    continue;
                }
                let flag2 = flag || self.finals.contains(&t.dst);
                if t.dst == q && off2 >= 0 && flag2 {
                    closing = Some((v, *t, off2));
                    break 'bfs;
                }
                let d = node(t.dst, off2, flag2);
                if !seen[d] {
                    seen[d] = true;
                    parent.insert(d, (v, *t, off2));
                    queue.push_back((t.dst, off2, flag2));
                }
            }
        }
        let (mut cur, last_t, pump) = closing?;
        let decode_off = |v: usize| ((v >> 1) % width) as i64 + floor;
        let decode_state = |v: usize| (v >> 1) / width;
        let mut rev: Vec<(usize, CounterTransition)> = vec![(cur, last_t)];
        while cur != start {
            let &(p, t, _) = parent.get(&cur).expect("path to start exists");
            rev.push((p, t));
            cur = p;
        }
        rev.reverse();
        // Lowest offset along the cycle dictates how much headroom the start
        // counter needs to keep every configuration positive.
        let min_off = rev.iter().map(|&(v, _)| decode_off(v)).min().unwrap().min(pump);
        let needed = (1 - min_off).max(1) as u64;
        let c0 = flat.min_counter_at_least(q, needed).expect("c_max qualifies");
        let (pre, stem_letters) = flat.path_to(flat.node(q, c0));
        let cyc: Vec<Config> = rev
            .iter()
            .map(|&(v, _)| Config {
                state: decode_state(v),
                counter: (c0 as i64 + decode_off(v)) as u64,
            })
            .collect();
        let cycle_letters: Vec<Letter> = rev.iter().map(|&(_, t)| t.letter).collect();
        let word = LassoWord::new(
            Word::from_letters(stem_letters),
            Word::from_letters(cycle_letters),
        )
        .expect("cycle is non-empty");
        Some((word, LassoRun { pre, cyc, pump: pump as u64 }))
    }

    /// Conservative membership check by exhaustive exploration of
    /// configurations folded over the word's positions, with the counter and
    /// the number of unrolled periods both bounded. `Accepted` and `Rejected`
    /// are exact; hitting either bound downgrades a negative answer to
    /// `Inconclusive`.
    pub fn bounded_accept(
        &self,
        w: &LassoWord,
        params: BoundedParams,
    ) -> Result<BoundedVerdict, CounterError> {
        for i in 1..=w.size() {
            let l = w.letter_at(i);
            if !self.alphabet.contains(l) {
                return Err(CounterError::WordLetter(l.as_str().to_owned()));
            }
        }
        let n = w.size();
        let s = w.stem().len();
        let cbound = params.counter_bound;
        let stride = usize::try_from(cbound + 1).expect("counter bound fits usize");
        let node = |q: StateId, p: usize, c: u64| (q * n + p) * stride + c as usize;
        let advance = |p: usize| if p + 1 < n { p + 1 } else { s };
        let mut overflow = false;
        let step = |q: StateId, p: usize, c: u64, overflow: &mut bool| -> Vec<(StateId, usize, u64)> {
            let mut out = Vec::new();
            for t in &self.transitions {
                if t.src != q || t.at_zero != (c == 0) || t.letter != w.letter_at(p + 1) {
                    continue;
                }
                let c2 = c as i64 + t.effect as i64;
                debug_assert!(c2 >= 0);
                if c2 as u64 > cbound {
                    *overflow = true;
                    continue;
                }
                out.push((t.dst, advance(p), c2 as u64));
            }
            out
        };
        let budget = s + params.period_bound.saturating_mul(n - s);
        let mut discovered = vec![false; self.names.len() * n * stride];
        let mut frontier = vec![(self.initial, 0usize, 0u64)];
        discovered[node(self.initial, 0, 0)] = true;
        let mut depth = 0;
        while !frontier.is_empty() && depth < budget {
            let mut next = Vec::new();
            for &(q, p, c) in &frontier {
                for (q2, p2, c2) in step(q, p, c, &mut overflow) {
                    let v = node(q2, p2, c2);
                    if !discovered[v] {
                        discovered[v] = true;
                        next.push((q2, p2, c2));
                    }
                }
            }
            frontier = next;
            depth += 1;
        }
        let mut sink = false;
        let truncated = !frontier.is_empty()
            && frontier.iter().any(|&(q, p, c)| {
                step(q, p, c, &mut sink)
                    .into_iter()
                    .any(|(q2, p2, c2)| !discovered[node(q2, p2, c2)])
            });
        // A discovered accepting configuration on a discovered cycle is a
        // complete accepting run.
        let mut targets: Vec<(StateId, usize, u64)> = Vec::new();
        for &q in &self.finals {
            for p in 0..n {
                for c in 0..=cbound {
                    if discovered[node(q, p, c)] {
                        targets.push((q, p, c));
                    }
                }
            }
        }
        for &(q, p, c) in &targets {
            let goal = node(q, p, c);
            let mut seen = vec![false; discovered.len()];
            let mut queue = VecDeque::new();
            queue.push_back((q, p, c));
            while let Some((a, b2, d)) = queue.pop_front() {
                let mut quiet = false;
                for (q2, p2, c2) in step(a, b2, d, &mut quiet) {
                    let v = node(q2, p2, c2);
                    if !discovered[v] {
                        continue;
                    }
                    if v == goal {
                        return Ok(BoundedVerdict::Accepted);
                    }
                    if !seen[v] {
                        seen[v] = true;
                        queue.push_back((q2, p2, c2));
                    }
                }
            }
        }
        if overflow || truncated {
            Ok(BoundedVerdict::Inconclusive)
        } else {
            Ok(BoundedVerdict::Rejected)
        }
    }
}

/// Bounds for `bounded_accept`: the highest counter explored and the number
/// of word periods unrolled.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BoundedParams {
    pub counter_bound: u64,
    pub period_bound: usize,
}

impl Default for BoundedParams {
    fn default() -> Self {
        BoundedParams { counter_bound: 16, period_bound: 256 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundedVerdict {
    Accepted,
    Rejected,
    Inconclusive,
}

// --- run certificates ---------------------------------------------------------

/// A lasso-shaped run: the configurations before each stem letter, the
/// configurations of the first cycle iteration, and the counter gain `pump`
/// added by every further iteration.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LassoRun {
    pre: Vec<Config>,
    cyc: Vec<Config>,
    pump: u64,
}

#[derive(Debug, Error, PartialEq, Eq, Clone)]
pub enum RunFault {
    #[error("cycle part of the run is empty")]
    EmptyCycle,
    #[error("run does not start in the initial configuration")]
    WrongStart,
    #[error("run cycle begins before the word's loop does")]
    CycleInStem,
    #[error("run cycle length {0} is not a multiple of the word's loop length {1}")]
    MisalignedCycle(usize, usize),
    #[error("step {0} matches no transition")]
    IllegalStep(usize),
    #[error("a pumping cycle touches counter zero")]
    ZeroDuringPump,
    #[error("cycle never visits an accepting state")]
    NoAcceptingVisit,
}

impl LassoRun {
    pub fn pre(&self) -> &[Config] {
        &self.pre
    }

    pub fn cyc(&self) -> &[Config] {
        &self.cyc
    }

    pub fn pump(&self) -> u64 {
        self.pump
    }

    /// Configuration before the 1-based letter position `i`.
    pub fn config_before(&self, i: usize) -> Config {
        assert!(i >= 1, "letter positions are 1-based");
        self.config_at(i - 1)
    }

    fn config_at(&self, idx: usize) -> Config {
        if idx < self.pre.len() {
            self.pre[idx]
        } else {
            let off = idx - self.pre.len();
            let (k, t) = (off / self.cyc.len(), off % self.cyc.len());
            let base = self.cyc[t];
            Config { state: base.state, counter: base.counter + k as u64 * self.pump }
        }
    }

    /// Checks that this run is a real accepting run of `m` over `w`: correct
    /// start, every step matching a transition on the word's letters, the
    /// cycle aligned with the word's loop, positive counters throughout a
    /// pumping cycle, and acceptance visited in the cycle.
    pub fn validate(&self, m: &OneCounter, w: &LassoWord) -> Result<(), RunFault> {
        if self.cyc.is_empty() {
            return Err(RunFault::EmptyCycle);
        }
        let first = self.config_at(0);
        if first.state != m.initial() || first.counter != 0 {
            return Err(RunFault::WrongStart);
        }
        if self.pre.len() < w.stem().len() {
            return Err(RunFault::CycleInStem);
        }
        if self.cyc.len() % w.cycle().len() != 0 {
            return Err(RunFault::MisalignedCycle(self.cyc.len(), w.cycle().len()));
        }
        if self.pump > 0 && self.cyc.iter().any(|c| c.counter == 0) {
            return Err(RunFault::ZeroDuringPump);
        }
        for i in 0..self.pre.len() + self.cyc.len() {
            let from = self.config_at(i);
            let to = self.config_at(i + 1);
            if !m.step_allows(from, w.letter_at(i + 1), to) {
                return Err(RunFault::IllegalStep(i));
            }
        }
        if !self.cyc.iter().any(|c| m.is_accepting_state(c.state)) {
            return Err(RunFault::NoAcceptingVisit);
        }
        Ok(())
    }
}

// --- capped configuration reachability ----------------------------------------

// Breadth-first reachability over configurations with counter at most `cap`,
// with parent pointers for path extraction and transitions indexed by source.
struct FlatReach {
    cap: u64,
    stride: usize,
    states: usize,
    by_src: Vec<Vec<CounterTransition>>,
    order: Vec<usize>,
    parent: Vec<Option<(usize, CounterTransition)>>,
    reached: Vec<bool>,
}

impl FlatReach {
    fn explore(m: &OneCounter, cap: u64) -> FlatReach {
        let stride = usize::try_from(cap + 1).expect("cap fits usize");
        let states = m.names.len();
        let mut by_src = vec![Vec::new(); states];
        for t in &m.transitions {
            by_src[t.src].push(*t);
        }
        let mut flat = FlatReach {
            cap,
            stride,
            states,
            by_src,
            order: Vec::new(),
            parent: vec![None; states * stride],
            reached: vec![false; states * stride],
        };
        let start = flat.node(m.initial, 0);
        flat.reached[start] = true;
        let mut queue = VecDeque::new();
        queue.push_back(start);
        while let Some(v) = queue.pop_front() {
            flat.order.push(v);
            for (d, t) in flat.successors(v) {
                if !flat.reached[d] {
                    flat.reached[d] = true;
                    flat.parent[d] = Some((v, t));
                    queue.push_back(d);
                }
            }
        }
        flat
    }

    fn node(&self, q: StateId, c: u64) -> usize {
        q * self.stride + c as usize
    }

    fn node_count(&self) -> usize {
        self.states * self.stride
    }

    fn config_of(&self, v: usize) -> Config {
        Config { state: v / self.stride, counter: (v % self.stride) as u64 }
    }

    fn discovered(&self, v: usize) -> bool {
        self.reached[v]
    }

    fn successors(&self, v: usize) -> Vec<(usize, CounterTransition)> {
        if !self.reached[v] {
            return Vec::new();
        }
        let cfg = self.config_of(v);
        let mut out = Vec::new();
        for t in &self.by_src[cfg.state] {
            if t.at_zero != (cfg.counter == 0) {
                continue;
            }
            let c2 = cfg.counter as i64 + t.effect as i64;
            if c2 < 0 || c2 as u64 > self.cap {
                continue;
            }
            out.push((self.node(t.dst, c2 as u64), *t));
        }
        out
    }

    fn max_counter(&self, q: StateId) -> Option<u64> {
        (0..self.stride as u64).rev().find(|&c| self.reached[self.node(q, c)])
    }

    fn min_counter_at_least(&self, q: StateId, bound: u64) -> Option<u64> {
        (bound..self.stride as u64).find(|&c| self.reached[self.node(q, c)])
    }

    /// Configurations strictly before `target` on its discovery path, plus
    /// the letters consumed along it.
    fn path_to(&self, target: usize) -> (Vec<Config>, Vec<Letter>) {
        let mut configs = Vec::new();
        let mut letters = Vec::new();
        let mut cur = target;
        while let Some((p, t)) = self.parent[cur] {
            configs.push(self.config_of(p));
            letters.push(t.letter);
            cur = p;
        }
        configs.reverse();
        letters.reverse();
        (configs, letters)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sigma() -> Alphabet {
        Alphabet::from_tokens(["0", "a", "b", "c"]).unwrap()
    }

    fn lasso(text: &str) -> LassoWord {
        LassoWord::parse(text).unwrap()
    }

    fn letter(t: &str) -> Letter {
        Letter::new(t)
    }

    /// Accepts exactly a^w, forced to pump the counter forever.
    fn pumper() -> OneCounter {
        let mut b = OneCounter::builder(sigma());
        let q0 = b.state("q0");
        b.initial(q0).accept(q0);
        b.transition(q0, letter("a"), true, q0, 1);
        b.transition(q0, letter("a"), false, q0, 1);
        b.build().unwrap()
    }

    /// Accepts a^n b^n c^w for n >= 1.
    fn balanced() -> OneCounter {
        let mut b = OneCounter::builder(sigma());
        let q0 = b.state("q0");
        let q1 = b.state("q1");
        let qf = b.state("qf");
        b.initial(q0).accept(qf);
        b.transition(q0, letter("a"), true, q0, 1);
        b.transition(q0, letter("a"), false, q0, 1);
        b.transition(q0, letter("b"), false, q1, -1);
        b.transition(q1, letter("b"), false, q1, -1);
        b.transition(q1, letter("c"), true, qf, 0);
        b.transition(qf, letter("c"), true, qf, 0);
        b.build().unwrap()
    }

    /// Acceptance is reachable and loops finitely, but no infinite run ever
    /// recurs through it: the language is empty.
    fn moribund() -> OneCounter {
        let mut b = OneCounter::builder(sigma());
        let s0 = b.state("s0");
        let s1 = b.state("s1");
        b.initial(s0).accept(s1);
        b.transition(s0, letter("a"), true, s0, 1);
        b.transition(s0, letter("a"), false, s0, 1);
        b.transition(s0, letter("b"), false, s1, -1);
        b.transition(s1, letter("b"), false, s1, -1);
        b.build().unwrap()
    }

    #[test]
    fn build_rejects_zero_decrement() {
        let mut b = OneCounter::builder(sigma());
        let q = b.state("q");
        b.initial(q);
        b.transition(q, letter("a"), true, q, -1);
        assert_eq!(b.build().unwrap_err(), CounterError::DecrementAtZero);
    }

    #[test]
    fn balanced_membership_with_validated_runs() {
        let m = balanced();
        for good in ["ab(c)", "abc(c)", "aabb(c)", "aaabbbcc(c)"] {
            let w = lasso(good);
            let run = m.accepts_lasso(&w).unwrap().unwrap_or_else(|| panic!("{good}"));
            run.validate(&m, &w).unwrap();
        }
        for bad in ["aab(c)", "abb(c)", "(a)", "(c)", "ab(cb)", "ba(c)", "(ab)"] {
            assert!(m.accepts_lasso(&lasso(bad)).unwrap().is_none(), "{bad}");
        }
    }

    #[test]
    fn membership_rejects_foreign_letters() {
        let m = balanced();
        assert!(matches!(
            m.accepts_lasso(&lasso("(z)")),
            Err(CounterError::WordLetter(_))
        ));
    }

    #[test]
    fn pumper_needs_the_unbounded_case() {
        let m = pumper();
        let w = lasso("(a)");
        let run = m.accepts_lasso(&w).unwrap().expect("accepts a^w");
        run.validate(&m, &w).unwrap();
        assert!(run.pump() > 0, "no bounded run exists over a^w");
        assert!(m.accepts_lasso(&lasso("a(b)")).unwrap().is_none());
        assert!(!m.is_empty());
    }

    #[test]
    fn emptiness_verdicts_and_witnesses() {
        assert!(moribund().is_empty());
        let m = balanced();
        let (word, run) = m.find_accepted().expect("non-empty");
        run.validate(&m, &word).unwrap();
        let p = pumper();
        let (word, run) = p.find_accepted().expect("non-empty");
        run.validate(&p, &word).unwrap();
        assert!(word.same_omega_word(&lasso("(a)")));
    }

    #[test]
    fn run_projection_matches_word_positions() {
        let m = balanced();
        let w = lasso("aabb(c)");
        let run = m.accepts_lasso(&w).unwrap().unwrap();
        let c1 = run.config_before(1);
        assert_eq!((c1.state, c1.counter), (m.state_id("q0").unwrap(), 0));
        let c3 = run.config_before(3);
        assert_eq!(c3.counter, 2);
        let c_late = run.config_before(40);
        assert_eq!(c_late.state, m.state_id("qf").unwrap());
        assert_eq!(c_late.counter, 0);
    }

    #[test]
    fn validation_rejects_corrupted_runs() {
        let m = balanced();
        let w = lasso("ab(c)");
        let run = m.accepts_lasso(&w).unwrap().unwrap();
        let mut bumped = run.clone();
        if let Some(c) = bumped.pre.get_mut(1) {
            c.counter += 1;
        }
        assert!(matches!(bumped.validate(&m, &w), Err(RunFault::IllegalStep(_))));
        let mut shifted = run.clone();
        shifted.pre.remove(0);
        assert!(shifted.validate(&m, &w).is_err());
    }

    #[test]
    fn bounded_check_agrees_where_conclusive() {
        let m = balanced();
        let params = BoundedParams::default();
        for text in ["ab(c)", "aabb(c)", "aab(c)", "(a)", "ab(cb)"] {
            let w = lasso(text);
            let exact = m.accepts_lasso(&w).unwrap().is_some();
            match m.bounded_accept(&w, params).unwrap() {
                BoundedVerdict::Accepted => assert!(exact, "{text}"),
                BoundedVerdict::Rejected => assert!(!exact, "{text}"),
                BoundedVerdict::Inconclusive => {}
            }
        }
    }

    #[test]
    fn bounded_check_reports_counter_overflow_honestly() {
        // The only accepting run pumps beyond any bound, so the bounded
        // check cannot conclude either way.
        let m = pumper();
        let v = m.bounded_accept(&lasso("(a)"), BoundedParams::default()).unwrap();
        assert_eq!(v, BoundedVerdict::Inconclusive);
        // Rejection without overflow stays conclusive.
        let v = m.bounded_accept(&lasso("(b)"), BoundedParams::default()).unwrap();
        assert_eq!(v, BoundedVerdict::Rejected);
    }

    #[test]
    fn moribund_pumping_filter_rejects_negative_cycles() {
        // The accepting state sits on a strictly decreasing self-loop, which
        // can never close a non-negative cycle.
        let m = moribund();
        for text in ["a(b)", "aa(b)", "(a)", "ab(a)"] {
            assert!(m.accepts_lasso(&lasso(text)).unwrap().is_none(), "{text}");
        }
    }
}
