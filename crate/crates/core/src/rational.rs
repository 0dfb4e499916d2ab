//! Two-tape Buchi automata: acceptors of pairs of omega-words, presented as
//! transducers whose transitions consume a finite input word and emit a
//! finite output word.
//!
//! `normalize` splits every macro transition into micro steps that move one
//! letter on one tape at a time (input letters first), through fresh
//! non-accepting states; a fully silent macro becomes a single silent micro
//! step. Pair membership runs on the product of the micro graph with both
//! word positions, under three acceptance obligations: acceptance recurs,
//! tape 1 progresses forever, tape 2 progresses forever. Emptiness over
//! genuinely infinite pairs needs one strongly connected component holding
//! acceptance and progress on both tapes; runs that starve a tape never
//! count. `prefix_run_dag` unrolls the micro graph over finite prefixes of
//! two block words into an acyclic graph for inspection of run structure.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use thiserror::Error;

use crate::buchi::{strongly_connected_components, GeneralizedBuchi, StateId};
use crate::words::{Alphabet, BlockWord, LassoWord, Letter, Word, WordError};

#[derive(Debug, Error, PartialEq, Eq, Clone)]
pub enum TwoTapeError {
    #[error("automaton has no initial state")]
    NoInitialState,
    #[error("transition input uses letter `{0}` outside tape-1 alphabet")]
    InputLetter(String),
    #[error("transition output uses letter `{0}` outside tape-2 alphabet")]
    OutputLetter(String),
    #[error("word pair uses letter `{0}` outside the matching alphabet")]
    PairLetter(String),
    #[error("operands must share both alphabets")]
    AlphabetMismatch,
}

/// One macro transition: consume `input` on tape 1 and `output` on tape 2.
/// Either word may be empty.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct MacroTransition {
    pub src: StateId,
    pub input: Word,
    pub output: Word,
    pub dst: StateId,
}

/// A pair of lasso words, one per tape.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct LassoPair {
    pub input: LassoWord,
    pub output: LassoWord,
}

impl LassoPair {
    pub fn new(input: LassoWord, output: LassoWord) -> LassoPair {
        LassoPair { input, output }
    }

    pub fn parse(input: &str, output: &str) -> Result<LassoPair, WordError> {
        Ok(LassoPair { input: LassoWord::parse(input)?, output: LassoWord::parse(output)? })
    }

    pub fn normalize(&self) -> LassoPair {
        LassoPair { input: self.input.normalize(), output: self.output.normalize() }
    }

    pub fn same_pair(&self, other: &LassoPair) -> bool {
        self.input.same_omega_word(&other.input) && self.output.same_omega_word(&other.output)
    }
}

impl std::fmt::Display for LassoPair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", self.input, self.output)
    }
}

// --- construction -------------------------------------------------------------

pub struct TwoTapeBuilder {
    alphabet1: Alphabet,
    alphabet2: Alphabet,
    names: Vec<String>,
    index: HashMap<String, StateId>,
    initial: Option<StateId>,
    finals: BTreeSet<StateId>,
    transitions: BTreeSet<MacroTransition>,
}

impl TwoTapeBuilder {
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

    pub fn transition(&mut self, src: StateId, input: Word, output: Word, dst: StateId) -> &mut Self {
        assert!(src < self.names.len() && dst < self.names.len(), "unknown state id");
        self.transitions.insert(MacroTransition { src, input, output, dst });
        self
    }

    pub fn build(self) -> Result<TwoTape, TwoTapeError> {
        let initial = self.initial.ok_or(TwoTapeError::NoInitialState)?;
        for t in &self.transitions {
            for &l in t.input.letters() {
                if !self.alphabet1.contains(l) {
                    return Err(TwoTapeError::InputLetter(l.as_str().to_owned()));
                }
            }
            for &l in t.output.letters() {
                if !self.alphabet2.contains(l) {
                    return Err(TwoTapeError::OutputLetter(l.as_str().to_owned()));
                }
            }
        }
        Ok(TwoTape {
            alphabet1: self.alphabet1,
            alphabet2: self.alphabet2,
            names: self.names,
            initial,
            finals: self.finals,
            transitions: self.transitions.into_iter().collect(),
        })
    }
}

/// A two-tape Buchi automaton over `alphabet1 x alphabet2`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TwoTape {
    alphabet1: Alphabet,
    alphabet2: Alphabet,
    names: Vec<String>,
    initial: StateId,
    finals: BTreeSet<StateId>,
    transitions: Vec<MacroTransition>, // sorted
}

impl TwoTape {
    pub fn builder(alphabet1: Alphabet, alphabet2: Alphabet) -> TwoTapeBuilder {
        TwoTapeBuilder {
            alphabet1,
            alphabet2,
            names: Vec::new(),
            index: HashMap::new(),
            initial: None,
            finals: BTreeSet::new(),
            transitions: BTreeSet::new(),
        }
    }

    pub fn alphabet1(&self) -> &Alphabet {
        &self.alphabet1
    }

    pub fn alphabet2(&self) -> &Alphabet {
        &self.alphabet2
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

    pub fn transitions(&self) -> &[MacroTransition] {
        &self.transitions
    }

    /// Splits macro transitions into single-letter micro steps.
    pub fn normalize(&self) -> Normalized {
        let mut names = self.names.clone();
        let mut micro = Vec::new();
        let mut macro_of = Vec::new();
        for (mi, t) in self.transitions.iter().enumerate() {
            let hops = t.input.len() + t.output.len();
            if hops == 0 {
                micro.push(MicroTransition { src: t.src, action: MicroAction::Silent, dst: t.dst });
                macro_of.push(mi);
                continue;
            }
            let mut actions = Vec::with_capacity(hops);
            for &l in t.input.letters() {
                actions.push(MicroAction::Input(l));
            }
            for &l in t.output.letters() {
                actions.push(MicroAction::Output(l));
            }
            let mut cur = t.src;
            for (k, action) in actions.iter().enumerate() {
                let next = if k + 1 == hops {
                    t.dst
                } else {
                    names.push(format!("~{mi}.{k}"));
                    names.len() - 1
                };
                micro.push(MicroTransition { src: cur, action: *action, dst: next });
                macro_of.push(mi);
                cur = next;
            }
        }
        Normalized {
            alphabet1: self.alphabet1.clone(),
            alphabet2: self.alphabet2.clone(),
            names,
            initial: self.initial,
            finals: self.finals.clone(),
            micro,
            macro_of,
        }
    }

    /// Whether the automaton accepts the pair of omega-words.
    pub fn accepts_lasso_pair(&self, pair: &LassoPair) -> Result<bool, TwoTapeError> {
        self.normalize().accepts_pair(pair)
    }

    /// Emptiness over pairs of genuinely infinite words.
    pub fn is_empty_infinite(&self) -> bool {
        self.find_accepted_pair().is_none()
    }

    /// A canonical accepted pair, if one exists.
    pub fn find_accepted_pair(&self) -> Option<LassoPair> {
        self.normalize().find_accepted_pair()
    }

    /// Disjoint union: accepts a pair exactly when either operand does. Both
    /// alphabets must match.
    pub fn union(&self, other: &TwoTape) -> Result<TwoTape, TwoTapeError> {
        if self.alphabet1 != other.alphabet1 || self.alphabet2 != other.alphabet2 {
            return Err(TwoTapeError::AlphabetMismatch);
        }
        let mut b = TwoTape::builder(self.alphabet1.clone(), self.alphabet2.clone());
        let u0 = b.state("u0");
        b.initial(u0);
        for (tag, part) in [("a", self), ("b", other)] {
            let ids: Vec<StateId> = part
                .names
                .iter()
                .map(|n| b.state(&format!("{tag}:{n}")))
                .collect();
            for &f in &part.finals {
                b.accept(ids[f]);
            }
            for t in &part.transitions {
                b.transition(ids[t.src], t.input.clone(), t.output.clone(), ids[t.dst]);
                if t.src == part.initial {
                    b.transition(u0, t.input.clone(), t.output.clone(), ids[t.dst]);
                }
            }
        }
        b.build()
    }
}

// --- normalized form ------------------------------------------------------------

/// One single-letter (or silent) step of a normalized automaton.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum MicroAction {
    Input(Letter),
    Output(Letter),
    Silent,
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct MicroTransition {
    pub src: StateId,
    pub action: MicroAction,
    pub dst: StateId,
}

/// A two-tape automaton in micro-step form. States added by normalization are
/// never accepting; `macro_of` maps each micro step back to the macro
/// transition it came from.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Normalized {
    alphabet1: Alphabet,
    alphabet2: Alphabet,
    names: Vec<String>,
    initial: StateId,
    finals: BTreeSet<StateId>,
    micro: Vec<MicroTransition>,
    macro_of: Vec<usize>,
}

impl Normalized {
    pub fn alphabet1(&self) -> &Alphabet {
        &self.alphabet1
    }

    pub fn alphabet2(&self) -> &Alphabet {
        &self.alphabet2
    }

    pub fn state_count(&self) -> usize {
        self.names.len()
    }

    pub fn state_name(&self, s: StateId) -> &str {
        &self.names[s]
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn is_accepting_state(&self, s: StateId) -> bool {
        self.finals.contains(&s)
    }

    pub fn micro(&self) -> &[MicroTransition] {
        &self.micro
    }

    /// Macro transition index behind micro step `i`.
    pub fn macro_of(&self, i: usize) -> usize {
        self.macro_of[i]
    }

    fn successors(&self) -> Vec<Vec<usize>> {
        let mut succ = vec![Vec::new(); self.names.len()];
        for (i, t) in self.micro.iter().enumerate() {
            succ[t.src].push(i);
        }
        succ
    }

    /// Pair membership on the product of the micro graph with both word
    /// positions, degeneralized from three obligations: enter acceptance,
    /// move tape 1, move tape 2.
    pub fn accepts_pair(&self, pair: &LassoPair) -> Result<bool, TwoTapeError> {
        for i in 1..=pair.input.size() {
            let l = pair.input.letter_at(i);
            if !self.alphabet1.contains(l) {
                return Err(TwoTapeError::PairLetter(l.as_str().to_owned()));
            }
        }
        for i in 1..=pair.output.size() {
            let l = pair.output.letter_at(i);
            if !self.alphabet2.contains(l) {
                return Err(TwoTapeError::PairLetter(l.as_str().to_owned()));
            }
        }
        let n1 = pair.input.size();
        let s1 = pair.input.stem().len();
        let n2 = pair.output.size();
        let s2 = pair.output.stem().len();
        let adv1 = |p: usize| if p + 1 < n1 { p + 1 } else { s1 };
        let adv2 = |p: usize| if p + 1 < n2 { p + 1 } else { s2 };
        let tick1 = Letter::new("1");
        let tick2 = Letter::new("2");
        let tick_e = Letter::new("e");
        let gba_alpha = Alphabet::new([tick1, tick2, tick_e]).expect("non-empty");
        let mut gb = GeneralizedBuchi::builder(gba_alpha, 3);
        let succ = self.successors();
        let mut ids: BTreeMap<(StateId, usize, usize), StateId> = BTreeMap::new();
        let mut queue = VecDeque::new();
        let name = |s: StateId, p1: usize, p2: usize| format!("{s}@{p1},{p2}");
        let start = (self.initial, 0, 0);
        ids.insert(start, gb.state(&name(self.initial, 0, 0)));
        gb.initial(ids[&start]);
        queue.push_back(start);
        while let Some((s, p1, p2)) = queue.pop_front() {
            let src = ids[&(s, p1, p2)];
            for &mi in &succ[s] {
                let t = self.micro[mi];
                let moved = match t.action {
                    MicroAction::Input(l) => {
                        if l != pair.input.letter_at(p1 + 1) {
                            continue;
                        }
                        (tick1, adv1(p1), p2)
                    }
                    MicroAction::Output(l) => {
                        if l != pair.output.letter_at(p2 + 1) {
                            continue;
                        }
                        (tick2, p1, adv2(p2))
                    }
                    MicroAction::Silent => (tick_e, p1, p2),
                };
                let key = (t.dst, moved.1, moved.2);
                let dst = *ids.entry(key).or_insert_with(|| {
                    queue.push_back(key);
                    gb.state(&name(t.dst, moved.1, moved.2))
                });
                let ti = gb.transition(src, moved.0, dst);
                if self.finals.contains(&t.dst) {
                    gb.mark(0, ti).unwrap();
                }
                if moved.0 == tick1 {
                    gb.mark(1, ti).unwrap();
                }
                if moved.0 == tick2 {
                    gb.mark(2, ti).unwrap();
                }
            }
        }
        Ok(!gb.build().expect("initial state is set").is_empty())
    }

    /// A canonical accepted pair of infinite words, or None when the relation
    /// is empty. A qualifying strongly connected component must hold
    /// acceptance and progress on both tapes; the witness splices shortest
    /// paths through one acceptance entry, one tape-1 move, and one tape-2
    /// move.
    pub fn find_accepted_pair(&self) -> Option<LassoPair> {
        let succ = self.successors();
        let n = self.names.len();
        let scc = strongly_connected_components(n, |s| {
            succ[s].iter().map(|&i| self.micro[i].dst).collect()
        });
        // Reachability in breadth-first order for a deterministic choice.
        let mut order = Vec::new();
        let mut seen = vec![false; n];
        seen[self.initial] = true;
        let mut queue = VecDeque::new();
        queue.push_back(self.initial);
        while let Some(s) = queue.pop_front() {
            order.push(s);
            for &i in &succ[s] {
                let d = self.micro[i].dst;
                if !seen[d] {
                    seen[d] = true;
                    queue.push_back(d);
                }
            }
        }
        let mut comp_in = vec![false; n + 1];
        let mut comp_out = vec![false; n + 1];
        for t in &self.micro {
            if scc[t.src] == scc[t.dst] {
                match t.action {
                    MicroAction::Input(_) => comp_in[scc[t.src]] = true,
                    MicroAction::Output(_) => comp_out[scc[t.src]] = true,
                    MicroAction::Silent => {}
                }
            }
        }
        let pivot = order.iter().copied().find(|&s| {
            self.finals.contains(&s) && comp_in[scc[s]] && comp_out[scc[s]]
        })?;
        let comp = scc[pivot];
        let first_edge = |pred: &dyn Fn(&MicroTransition) -> bool| -> usize {
            self.micro
                .iter()
                .position(|t| scc[t.src] == comp && scc[t.dst] == comp && pred(t))
                .expect("component has the required edge")
        };
        let e_in = first_edge(&|t| matches!(t.action, MicroAction::Input(_)));
        let e_out = first_edge(&|t| matches!(t.action, MicroAction::Output(_)));
        let hop = |from: StateId, to: StateId| -> Vec<usize> {
            self.micro_path(&succ, from, to, Some((&scc, comp)))
                .expect("states share one component")
        };
        let mut cycle_steps = hop(pivot, self.micro[e_in].src);
        cycle_steps.push(e_in);
        let mut tail = hop(self.micro[e_in].dst, self.micro[e_out].src);
        cycle_steps.append(&mut tail);
        cycle_steps.push(e_out);
        let mut back = hop(self.micro[e_out].dst, pivot);
        cycle_steps.append(&mut back);
        let stem_steps = self
            .micro_path(&succ, self.initial, pivot, None)
            .expect("pivot is reachable");
        let project = |steps: &[usize]| -> (Vec<Letter>, Vec<Letter>) {
            let mut ins = Vec::new();
            let mut outs = Vec::new();
            for &i in steps {
                match self.micro[i].action {
                    MicroAction::Input(l) => ins.push(l),
                    MicroAction::Output(l) => outs.push(l),
                    MicroAction::Silent => {}
                }
            }
            (ins, outs)
        };
        let (stem_in, stem_out) = project(&stem_steps);
        let (cyc_in, cyc_out) = project(&cycle_steps);
        let pair = LassoPair {
            input: LassoWord::new(Word::from_letters(stem_in), Word::from_letters(cyc_in))
                .expect("cycle moves tape 1"),
            output: LassoWord::new(Word::from_letters(stem_out), Word::from_letters(cyc_out))
                .expect("cycle moves tape 2"),
        };
        Some(pair.normalize())
    }

    /// Shortest micro-step path `from -> to` (empty when equal), breadth
    /// first over sorted steps; `within` restricts to one component.
    fn micro_path(
        &self,
        succ: &[Vec<usize>],
        from: StateId,
        to: StateId,
        within: Option<(&[usize], usize)>,
    ) -> Option<Vec<usize>> {
        let allowed = |s: StateId| match within {
            None => true,
            Some((scc, id)) => scc[s] == id,
        };
        if !allowed(from) {
            return None;
        }
        if from == to {
            return Some(Vec::new());
        }
        let mut parent: Vec<Option<(StateId, usize)>> = vec![None; self.names.len()];
        let mut seen = vec![false; self.names.len()];
        seen[from] = true;
        let mut queue = VecDeque::new();
        queue.push_back(from);
        while let Some(s) = queue.pop_front() {
            for &i in &succ[s] {
                let d = self.micro[i].dst;
                if !allowed(d) || seen[d] {
                    continue;
                }
                seen[d] = true;
                parent[d] = Some((s, i));
                if d == to {
                    let mut steps = Vec::new();
                    let mut cur = to;
                    while cur != from {
                        let (p, i) = parent[cur].unwrap();
                        steps.push(i);
                        cur = p;
                    }
                    steps.reverse();
                    return Some(steps);
                }
                queue.push_back(d);
            }
        }
        None
    }
}

// --- bounded run unrolling -------------------------------------------------------

#[derive(Debug, Error, PartialEq, Eq, Clone)]
pub enum DagError {
    #[error("run graph exceeded the node budget of {0}")]
    NodeBudget(usize),
    #[error("run graph contains a cycle of silent steps")]
    SilentCycle,
}

/// One node of a bounded run graph: a micro state with consumed prefix
/// lengths on both tapes.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct DagNode {
    pub state: StateId,
    pub p1: usize,
    pub p2: usize,
}

/// An edge of the run graph, labeled with the micro step it instantiates.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct DagEdge {
    pub src: usize,
    pub dst: usize,
    pub micro: usize,
}

/// The acyclic graph of all partial runs over fixed finite prefixes of the
/// two tapes. Nodes are sorted by (state, p1, p2); edges by source.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RunDag {
    nodes: Vec<DagNode>,
    edges: Vec<DagEdge>,
    root: usize,
    target1: usize,
    target2: usize,
    max_final_visits: Vec<u64>,
}

impl RunDag {
    pub fn nodes(&self) -> &[DagNode] {
        &self.nodes
    }

    pub fn edges(&self) -> &[DagEdge] {
        &self.edges
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn node_id(&self, node: DagNode) -> Option<usize> {
        self.nodes.binary_search(&node).ok()
    }

    /// Largest number of accepting-state visits over paths from the root to
    /// each node, the root itself included.
    pub fn max_final_visits(&self, node: usize) -> u64 {
        self.max_final_visits[node]
    }

    /// Nodes with no outgoing edge: runs that can go no further.
    pub fn maximal_nodes(&self) -> Vec<usize> {
        let mut has_out = vec![false; self.nodes.len()];
        for e in &self.edges {
            has_out[e.src] = true;
        }
        (0..self.nodes.len()).filter(|&v| !has_out[v]).collect()
    }

    /// Nodes that consumed both prefixes completely.
    pub fn frontier(&self) -> Vec<usize> {
        (0..self.nodes.len())
            .filter(|&v| self.nodes[v].p1 == self.target1 && self.nodes[v].p2 == self.target2)
            .collect()
    }

    pub fn is_frontier(&self, v: usize) -> bool {
        self.nodes[v].p1 == self.target1 && self.nodes[v].p2 == self.target2
    }
}

/// Unrolls the micro graph of `t` over the depth-`n` prefixes of two block
/// words. See `run_dag_over_prefixes` for the general form.
pub fn prefix_run_dag(
    t: &Normalized,
    tape1: &BlockWord,
    tape2: &BlockWord,
    depth: usize,
    node_budget: usize,
) -> Result<RunDag, DagError> {
    run_dag_over_prefixes(t, &tape1.block_prefix(depth), &tape2.block_prefix(depth), node_budget)
}

/// Unrolls the micro graph over two fixed finite words: nodes are micro
/// states with consumed-prefix lengths, edges instantiate micro steps, and
/// silent steps may not cycle.
pub fn run_dag_over_prefixes(
    t: &Normalized,
    tape1: &Word,
    tape2: &Word,
    node_budget: usize,
) -> Result<RunDag, DagError> {
    let succ = t.successors();
    let mut index: HashMap<DagNode, usize> = HashMap::new();
    let mut nodes = Vec::new();
    let mut edges: Vec<(usize, usize, usize)> = Vec::new();
    let root = DagNode { state: t.initial(), p1: 0, p2: 0 };
    index.insert(root, 0);
    nodes.push(root);
    let mut queue = VecDeque::new();
    queue.push_back(root);
    while let Some(node) = queue.pop_front() {
        let src = index[&node];
        for &mi in &succ[node.state] {
            let step = t.micro()[mi];
            let moved = match step.action {
                MicroAction::Input(l) => {
                    if node.p1 >= tape1.len() || tape1.letters()[node.p1] != l {
                        continue;
                    }
                    DagNode { state: step.dst, p1: node.p1 + 1, p2: node.p2 }
                }
                MicroAction::Output(l) => {
                    if node.p2 >= tape2.len() || tape2.letters()[node.p2] != l {
                        continue;
                    }
                    DagNode { state: step.dst, p1: node.p1, p2: node.p2 + 1 }
                }
                MicroAction::Silent => DagNode { state: step.dst, p1: node.p1, p2: node.p2 },
            };
            let dst = *index.entry(moved).or_insert_with(|| {
                nodes.push(moved);
                queue.push_back(moved);
                nodes.len() - 1
            });
            if nodes.len() > node_budget {
                return Err(DagError::NodeBudget(node_budget));
            }
            edges.push((src, dst, mi));
        }
    }
    // Canonical renumbering by node key.
    let mut order: Vec<usize> = (0..nodes.len()).collect();
    order.sort_by_key(|&v| nodes[v]);
    let mut rank = vec![0; nodes.len()];
    for (r, &v) in order.iter().enumerate() {
        rank[v] = r;
    }
    let nodes: Vec<DagNode> = order.iter().map(|&v| nodes[v]).collect();
    let mut dag_edges: Vec<DagEdge> = edges
        .into_iter()
        .map(|(s, d, mi)| DagEdge { src: rank[s], dst: rank[d], micro: mi })
        .collect();
    dag_edges.sort();
    dag_edges.dedup();
    let root = rank[0];
    // Progress edges strictly grow p1 + p2, so any cycle is silent. Kahn
    // elimination leaves exactly the nodes on or past a cycle.
    let n = nodes.len();
    let mut indeg = vec![0usize; n];
    for e in &dag_edges {
        indeg[e.dst] += 1;
    }
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (k, e) in dag_edges.iter().enumerate() {
        adj[e.src].push(k);
    }
    let mut topo = Vec::with_capacity(n);
    let mut ready: VecDeque<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
    while let Some(v) = ready.pop_front() {
        topo.push(v);
        for &k in &adj[v] {
            let d = dag_edges[k].dst;
            indeg[d] -= 1;
            if indeg[d] == 0 {
                ready.push_back(d);
            }
        }
    }
    if topo.len() != n {
        return Err(DagError::SilentCycle);
    }
    // Longest-path count of accepting visits, root visit included.
    let mut visits = vec![0u64; n];
    visits[root] = u64::from(t.is_accepting_state(nodes[root].state));
    for &v in &topo {
        let base = visits[v];
        for &k in &adj[v] {
            let e = dag_edges[k];
            let gain = u64::from(t.is_accepting_state(nodes[e.dst].state));
            if base + gain > visits[e.dst] {
                visits[e.dst] = base + gain;
            }
        }
    }
    Ok(RunDag {
        nodes,
        edges: dag_edges,
        root,
        target1: tape1.len(),
        target2: tape2.len(),
        max_final_visits: visits,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ab() -> Alphabet {
        Alphabet::from_tokens(["a", "b"]).unwrap()
    }

    fn pair(i: &str, o: &str) -> LassoPair {
        LassoPair::parse(i, o).unwrap()
    }

    fn word(text: &str) -> Word {
        Word::from_chars(text)
    }

    /// Copies tape 1 to tape 2 letter by letter.
    fn copier() -> TwoTape {
        let mut b = TwoTape::builder(ab(), ab());
        let q = b.state("q");
        b.initial(q).accept(q);
        b.transition(q, word("a"), word("a"), q);
        b.transition(q, word("b"), word("b"), q);
        b.build().unwrap()
    }

    /// Relates (ab)^w to (ba)^w through multi-letter macro steps, entered
    /// over one fully silent transition.
    fn swapper() -> TwoTape {
        let mut b = TwoTape::builder(ab(), ab());
        let q0 = b.state("q0");
        let q1 = b.state("q1");
        b.initial(q0).accept(q1);
        b.transition(q0, Word::empty(), Word::empty(), q1);
        b.transition(q1, word("ab"), word("ba"), q1);
        b.build().unwrap()
    }

    #[test]
    fn normalization_splits_macros_and_tracks_origin() {
        let t = swapper();
        let n = t.normalize();
        // One silent micro step plus four letter steps.
        assert_eq!(n.micro().len(), 5);
        let silent = n
            .micro()
            .iter()
            .filter(|m| matches!(m.action, MicroAction::Silent))
            .count();
        assert_eq!(silent, 1);
        // Letter steps of one macro share its index; input comes first.
        let of_macro: Vec<&MicroTransition> = n
            .micro()
            .iter()
            .enumerate()
            .filter(|(i, _)| n.macro_of(*i) == 1)
            .map(|(_, m)| m)
            .collect();
        assert_eq!(of_macro.len(), 4);
        assert!(matches!(of_macro[0].action, MicroAction::Input(_)));
        assert!(matches!(of_macro[1].action, MicroAction::Input(_)));
        assert!(matches!(of_macro[2].action, MicroAction::Output(_)));
        assert!(matches!(of_macro[3].action, MicroAction::Output(_)));
        // Fresh intermediate states are not accepting.
        for m in n.micro() {
            if m.dst >= t.state_count() {
                assert!(!n.is_accepting_state(m.dst));
            }
        }
    }

    #[test]
    fn copier_relates_equal_words_only() {
        let t = copier();
        assert!(t.accepts_lasso_pair(&pair("(ab)", "(ab)")).unwrap());
        assert!(t.accepts_lasso_pair(&pair("a(ba)", "(ab)")).unwrap());
        assert!(!t.accepts_lasso_pair(&pair("(ab)", "(ba)")).unwrap());
        assert!(!t.accepts_lasso_pair(&pair("(a)", "(b)")).unwrap());
        assert!(t.accepts_lasso_pair(&pair("ab(a)", "ab(aa)")).unwrap());
    }

    #[test]
    fn swapper_relates_the_shifted_pair() {
        let t = swapper();
        assert!(t.accepts_lasso_pair(&pair("(ab)", "(ba)")).unwrap());
        assert!(!t.accepts_lasso_pair(&pair("(ab)", "(ab)")).unwrap());
        assert!(!t.accepts_lasso_pair(&pair("(ba)", "(ba)")).unwrap());
    }

    #[test]
    fn membership_rejects_foreign_letters() {
        let t = copier();
        assert!(matches!(
            t.accepts_lasso_pair(&pair("(z)", "(a)")),
            Err(TwoTapeError::PairLetter(_))
        ));
    }

    #[test]
    fn emptiness_demands_progress_on_both_tapes() {
        // Only tape 1 moves inside the loop: no infinite pair is accepted.
        let mut b = TwoTape::builder(ab(), ab());
        let q = b.state("q");
        b.initial(q).accept(q);
        b.transition(q, word("a"), Word::empty(), q);
        let starved = b.build().unwrap();
        assert!(starved.is_empty_infinite());
        assert!(!starved.accepts_lasso_pair(&pair("(a)", "(a)")).unwrap());

        // A silent self-loop alone accepts nothing either.
        let mut b = TwoTape::builder(ab(), ab());
        let q = b.state("q");
        b.initial(q).accept(q);
        b.transition(q, Word::empty(), Word::empty(), q);
        assert!(b.build().unwrap().is_empty_infinite());
    }

    #[test]
    fn emptiness_witnesses_are_accepted_and_canonical() {
        for t in [copier(), swapper()] {
            let w = t.find_accepted_pair().expect("non-empty");
            assert!(t.accepts_lasso_pair(&w).unwrap());
            assert_eq!(w, w.normalize());
        }
        let w = swapper().find_accepted_pair().unwrap();
        assert!(w.same_pair(&pair("(ab)", "(ba)")));
    }

    #[test]
    fn union_accepts_either_side() {
        let u = copier().union(&swapper()).unwrap();
        assert!(u.accepts_lasso_pair(&pair("(a)", "(a)")).unwrap());
        assert!(u.accepts_lasso_pair(&pair("(ab)", "(ba)")).unwrap());
        assert!(!u.accepts_lasso_pair(&pair("(a)", "(b)")).unwrap());
        let mut b = TwoTape::builder(ab(), Alphabet::from_tokens(["a"]).unwrap());
        let q = b.state("q");
        b.initial(q);
        let mismatched = b.build().unwrap();
        assert_eq!(copier().union(&mismatched).unwrap_err(), TwoTapeError::AlphabetMismatch);
    }

    #[test]
    fn run_dag_over_copier_prefixes() {
        let t = copier().normalize();
        let dag = run_dag_over_prefixes(&t, &word("ab"), &word("ab"), 1000).unwrap();
        // Runs alternate input and output moves; the frontier is reached.
        let frontier = dag.frontier();
        assert_eq!(frontier.len(), 1);
        let f = frontier[0];
        assert!(dag.is_frontier(f));
        // q is accepting and is visited at start plus after each copied
        // letter pair.
        assert_eq!(dag.max_final_visits(f), 3);
        // Deterministic rebuild.
        let again = run_dag_over_prefixes(&t, &word("ab"), &word("ab"), 1000).unwrap();
        assert_eq!(dag, again);
    }

    #[test]
    fn run_dag_detects_mismatched_prefixes() {
        let t = copier().normalize();
        let dag = run_dag_over_prefixes(&t, &word("ab"), &word("bb"), 1000).unwrap();
        // The copier deadlocks immediately after reading `a`: tape 2 wants
        // to emit `a` but the prefix offers `b`.
        assert!(dag.frontier().is_empty());
        let maximal = dag.maximal_nodes();
        assert!(!maximal.is_empty());
        for &v in &maximal {
            assert!(!dag.is_frontier(v));
        }
    }

    #[test]
    fn run_dag_budget_and_silent_cycles() {
        let t = copier().normalize();
        assert_eq!(
            run_dag_over_prefixes(&t, &word("abab"), &word("abab"), 3),
            Err(DagError::NodeBudget(3))
        );
        let mut b = TwoTape::builder(ab(), ab());
        let q = b.state("q");
        b.initial(q).accept(q);
        b.transition(q, Word::empty(), Word::empty(), q);
        let silent = b.build().unwrap().normalize();
        assert_eq!(
            run_dag_over_prefixes(&silent, &word("a"), &word("a"), 1000),
            Err(DagError::SilentCycle)
        );
    }
}
