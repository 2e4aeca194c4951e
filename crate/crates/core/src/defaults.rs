//! Numerical policy shared across the crate.
//!
//! Every tolerance that decides correctness elsewhere lives here with its
//! rationale, so changing one is a deliberate act rather than a drive-by.

/// Absolute residual `|q(tau) +- tau - x|` accepted by the retarded-time
/// root finders. Bisection brackets the root, Newton polishes it; both
/// characteristic maps have slope bounded away from zero by the subluminal
/// margin, so this residual bounds the time error by the same amount.
pub const ROOT_TOL: f64 = 1e-12;

/// Subluminal margin `delta_v`: trajectories with `sup |qdot| > 1 - delta_v`
/// are rejected by the field layer. The dynamics layer stops integration at
/// the light-speed event well before this margin is reached, so a rejection
/// here means a trajectory was built from data past that event.
pub const SUBLUMINAL_MARGIN: f64 = 1e-6;

/// Light-speed stop margin `delta_theta`: integration terminates when
/// `|theta| = pi/2 - delta_theta`. The blow-up is a finite-time boundary
/// crossing, not an asymptote, so the event time converges as the margin
/// shrinks; at this margin the residual time to `pi/2` is O(1e-8).
pub const LIGHT_SPEED_MARGIN: f64 = 1e-8;

/// Event times are bisected on the dense output to this absolute width.
pub const EVENT_TIME_TOL: f64 = 1e-12;

/// Default local error tolerances for the adaptive integrator.
pub const RTOL: f64 = 1e-10;
pub const ATOL: f64 = 1e-12;

/// Default step-size cap. Keeps the dense output and the cubic Hermite
/// trajectory interpolant honest in regions where the controller would
/// otherwise take steps too long for downstream field evaluation.
pub const MAX_STEP: f64 = 0.25;

/// Spacing of trajectory knots exported to the field layer. Cubic Hermite
/// error scales as the fourth power of this spacing; 0.02 keeps it near
/// 1e-10 for the smooth trajectories produced here.
pub const TRAJECTORY_KNOT_DT: f64 = 0.02;

/// `|theta|` below this counts as rest once both radiation profiles have
/// been passed. Exact zero is preserved by the integrator for the static
/// scenario; this floor only absorbs rounding.
pub const REST_TOL: f64 = 1e-12;
