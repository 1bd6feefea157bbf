//! Convention constants that fix the signs left open by the definitions.
//! Each constant is pinned by a test; change one and the guard tests say
//! exactly which identities break.

/// Sign convention for exchange matrices. `Standard` reads triangle triples
/// in their stored cyclic order; `Reversed` negates the pairing, which is
/// what reading the triples in the opposite cyclic order would give.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    Standard,
    Reversed,
}

/// Default orientation: with the builders in `surface::builders`, the
/// pentagon fan triangulation then has pairing matrix [[0,1],[-1,0]] over
/// its sorted arcs, and the scanner's measured pairings match its measured
/// wall-crossing data.
pub const DEFAULT_ORIENTATION: Orientation = Orientation::Standard;

/// Factor ordering of the rank-2 wall-crossing identity, determined by
/// brute-force expansion (see `two_factor_side_oracle` in the wallcrossing
/// tests): when the pairing of the two primitive classes is +1, the side of
/// the wall where the first class has the *higher* phase carries the
/// two-factor product, and the other side carries the three-factor product
/// with the sum class in the middle.
pub const TWO_FACTOR_SIDE_HAS_FIRST_CLASS_PHASE_HIGHER: bool = true;
