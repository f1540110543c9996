//! Blocked bases, the color relations `C_r`, the layered construction that
//! saturates them, and the algebras generated from them.

mod assemble;
mod blocked;
mod builder;
mod colors;
mod conditions;
mod demand;

pub use assemble::{build_a, build_dilation, generators, lifted_generators, DEFAULT_ATOM_CAP};
pub use blocked::{all_maps, d_predicate, one_u, permutations, BlockedBase};
pub use builder::{build_colored_structure, build_with_budget, BuildOutcome, BuildReport, LayerStats, DEFAULT_POINT_BUDGET};
pub use colors::{all_transversal, eta_neg, eta_pos, p_region, ColorFamily};
pub use conditions::{check_conditions, ConditionCertificate, ConditionResult, Verdict};
pub use demand::{
    allowed_colors, family_admissible, injective_tuples, orbit_key, orbits, requirement_shapes, s_indices, transversal_slots, Demand, Families,
    Polarity, Requirement, SaturationParams,
};

#[cfg(test)]
mod tests;
