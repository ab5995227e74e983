//! Lagrangian dynamics on the flat Clifford-Kähler model space `R^{8n}`.
//!
//! * [`structures`]: the six structure tensors `J1..J6` as exact signed block
//!   permutations, their products and fundamental 2-forms.
//! * [`expr`]: Lagrangian expressions, parsing, symbolic derivatives.
//! * [`calculus`]: `d_J L`, `Φ_L = -d d_J L`, Liouville field, energy.
//! * [`dynamics`]: Euler-Lagrange systems and the semispray solve.
//! * [`integrate`]: fixed-step RK4 trajectories with diagnostics.
//! * [`parallel`]: batch entry points (rayon behind the `parallel` feature).

pub mod calculus;
pub mod dynamics;
pub mod expr;
pub mod integrate;
pub mod linalg;
pub mod parallel;
pub mod structures;

pub use calculus::{
    energy, energy_differential, kaehler_form, liouville_field, vertical_differential, OneForm,
    TwoFormField,
};
pub use dynamics::{
    derive_el_system, dynamics_residual, el_residual, solve_semispray, DynamicsError, ElSystem,
    SemisprayField, SemisprayVelocity,
};
pub use expr::{builtin_lagrangian, differentiate, parse, Expr, Lagrangian, LagrangianError};
pub use integrate::{energy_drift, integrate, IntegrateError, IntegrationFailure, Trajectory};
pub use linalg::Matrix;
pub use structures::{
    builtin_structure, composition_table, fundamental_two_form, SignedBlockPermutation,
    StructureId,
};
