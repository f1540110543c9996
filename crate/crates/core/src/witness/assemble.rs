use super::blocked::{permutations, BlockedBase};
use super::colors::{p_region, ColorFamily};
use crate::error::{Error, Result};
use crate::region::Region;
use crate::setca::{generate_subalgebra_capped, SetCA, DEFAULT_CARRIER_CAP};

/// Atom cap for dilations, whose carriers are far too large to enumerate.
pub const DEFAULT_ATOM_CAP: usize = 1024;

/// The nonempty `p(u, r)` for `u` a permutation and `r` a color.
pub fn generators(bb: &BlockedBase, cf: &ColorFamily) -> Result<Vec<Region>> {
    let mut out = Vec::new();
    for u in permutations(bb.n()) {
        for r in 0..cf.rcount() {
            let p = p_region(&u, r, cf, bb)?;
            if !p.is_empty() {
                out.push(p);
            }
        }
    }
    Ok(out)
}

/// `A`: the set algebra generated by the `p(u, r)`, with the carrier capped at `cap`.
pub fn build_a(bb: &BlockedBase, cf: &ColorFamily, cap: usize) -> Result<SetCA> {
    let max_atoms = (usize::BITS - 1 - cap.max(1).leading_zeros()) as usize;
    generate_subalgebra_capped(bb.base(), bb.n(), &generators(bb, cf)?, max_atoms).map_err(|e| match e {
        Error::AtomCap { atoms, .. } => Error::CarrierCap { atoms, cap },
        e => e,
    })
}

/// The cylinders `{ s : s restricted to n lies in p(u, r) }` in dimension `n + k`.
pub fn lifted_generators(bb: &BlockedBase, cf: &ColorFamily, k: usize) -> Result<Vec<Region>> {
    generators(bb, cf)?.iter().map(|g| g.lift(k)).collect()
}

/// The algebra of dimension `n + k` generated by the lifted `p(u, r)`. `k = 0`
/// gives `A` under the default carrier cap; otherwise generation aborts past
/// `atom_cap` atoms.
pub fn build_dilation(bb: &BlockedBase, cf: &ColorFamily, k: usize, atom_cap: usize) -> Result<SetCA> {
    if k == 0 {
        return build_a(bb, cf, DEFAULT_CARRIER_CAP);
    }
    generate_subalgebra_capped(bb.base(), bb.n() + k, &lifted_generators(bb, cf, k)?, atom_cap)
}
