//! Toolkit for omega-automata: Buchi automata, real-time one-counter Buchi
//! automata, and two-tape Buchi automata (transducers for infinitary rational
//! relations), with decision procedures on ultimately periodic words and a
//! constructive reduction embedding counter languages into two-tape relations.

pub mod buchi;
pub mod counter;
pub mod rational;
pub mod words;
