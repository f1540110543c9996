//! Bounded-rank elementary equivalence of finite structures.

mod apply;
mod game;
mod structure;
mod subalgebra;
mod theory;

pub use apply::{
    apply_interpretation, build_q, check_equiv, flat_index, from_flat, id_factor, identity_index, is_f_isomorphism,
    product_size,
};
pub use game::{
    ef_winner, partial_iso, replay, DupNode, GameCertificate, SpoilerNode, Strategy, Winner, DEFAULT_GAME_BUDGET,
    STRATEGY_CAP,
};
pub use structure::{Function, RelStructure, Relation};
pub use subalgebra::{closure, find_q_subalgebra, q_elementary, SubalgebraChoice};
pub use theory::{theory_compare, theory_compare_from, Atom, Evaluator, Formulas, Node, TheoryReport, THEORY_MAX_ROUNDS, THEORY_MAX_SIZE};

#[cfg(test)]
mod tests;
