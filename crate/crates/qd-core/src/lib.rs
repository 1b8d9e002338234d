//! Quadratic differentials `c·p(z)/z^m dz²` on the plane (m = 0) and on the
//! punctured plane, with their zeros, pole frames and local models.

pub mod poly;
pub mod quad;
mod qd;
mod sqrt;

pub use num_complex::Complex64;
pub use qd::{
    asymptotic_directions, half_plane_count, normalize, principal_arg, FoliationKind, Normalized, Pole, QuadDiff,
    Surface, ZeroPoint, ROOT_CLUSTER_RADIUS,
};
pub use sqrt::{sqrt_near, sqrt_q_continue, SqrtModel};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum QdError {
    #[error("leading coefficient must be nonzero")]
    ZeroLeading,
    #[error("polynomial is not monic (leading coefficient {0})")]
    NotMonic(String),
    #[error("plane differential is not centered (second coefficient {0})")]
    NotCentered(String),
    #[error("degree {found} does not match pole orders (expected {expected})")]
    Degree { expected: usize, found: usize },
    #[error("pole order {0} is below 3")]
    PoleOrder(usize),
    #[error("p(0) = 0: a zero sits on the puncture")]
    ZeroAtPuncture,
    #[error("non-finite coefficient")]
    NonFinite,
    #[error("evaluation at the pole z = 0")]
    Domain,
    #[error("root finder did not converge")]
    RootFinding,
    #[error("branch continuation step too coarse at path index {0}")]
    StepTooCoarse(usize),
    #[error("seed is not a square root of q at the path start")]
    BadSeed,
}
