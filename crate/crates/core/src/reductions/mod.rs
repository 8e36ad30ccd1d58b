//! Reductions from abduction to weighted satisfiability, a brute-force
//! WSAT solver, and generators of hard instances from graph problems.

mod generators;
mod to_wsat;
mod wsat;

pub use generators::{gen_indset_eq, gen_vertexcover_le, Graph};
pub use to_wsat::{
    essneg_reduction, reduce_essneg_eq_to_wsat, reduce_im_eq_to_wsat, reduce_is10_eq_to_wsat, reduce_iv2_eq_to_wsat,
    EssNegReduction,
};
pub use wsat::{parse_wsat, wsat_bruteforce, Polarity, WsatInstance, WsatMode, MAX_WSAT_VARS};
