#pragma once

#include "kdvbench/fourier_field.hpp"
#include "kdvbench/spectral.hpp"

#include <memory>
#include <span>
#include <vector>

namespace kdvbench {

// Truncated KdV in Fourier variables (2*pi dropped):
//   d/dt u(n) = i n^3 u(n) - (i n / 2) (u^2)^(n),   0 < |n| <= N,
// i.e. u_t = -u_xxx - P_N(u u_x). Modes are stored for n = 1..N only.

enum class Integrator { IntegratingFactorRk4 };

struct FlowConfig {
    double dt = 1e-3;
    /// Horizon; negative values run the flow backwards.
    double horizon = 1.0;
    Integrator integrator = Integrator::IntegratingFactorRk4;
    /// Central-difference scale for Jacobian probes.
    double fd_eps = 1e-5;
    /// Steps between stored checkpoints; 0 keeps only the endpoints.
    long checkpoint_every = 0;
    /// Test hook: false drops P_N(u u_x), leaving the Airy flow.
    bool nonlinear = true;

    long step_count() const;
    void validate() const;
};

/// -P_N(u u_x) in Fourier form: mode n gets -(i n / 2) (u^2)^(n).
FourierField nonlinear_term(const FourierField& f);

/// S(t) = exp(-t d^3/dx^3): coefficient(n) -> exp(i n^3 t) coefficient(n).
FourierField airy_propagate(const FourierField& f, double t);

/// Integrating-factor RK4 for the truncated system.
///
/// Classical RK4 is applied to v(t) = S(-t) u(t), whose right-hand side is
/// S(-t) N(S(t) v); the Airy phases are therefore exact and only the
/// nonlinearity limits the step. The stepper caches phase factors for one
/// step size and owns its transform workspace, so use one per thread.
class Stepper {
public:
    Stepper(int cutoff, double dt, bool nonlinear = true);
    ~Stepper();
    Stepper(const Stepper&) = delete;
    Stepper& operator=(const Stepper&) = delete;

    int cutoff() const noexcept { return cutoff_; }
    double dt() const noexcept { return dt_; }

    /// One step in place. Throws IntegratorBlowup on a non-finite state.
    void step(std::span<Complex> state);

    /// d/dt of the state without the Airy part, written to `out`.
    void nonlinear_rhs(std::span<const Complex> state, std::span<Complex> out);

private:
    struct Workspace;
    int cutoff_;
    double dt_;
    bool nonlinear_;
    std::vector<Complex> full_phase_;
    std::vector<Complex> half_phase_;
    std::unique_ptr<Workspace> work_;
};

/// One integrating-factor RK4 step of size dt (dt may be negative).
FourierField step(const FourierField& f, double dt, bool nonlinear = true);

struct TrajectoryPoint {
    double time = 0.0;
    FourierField field;
};

using Trajectory = std::vector<TrajectoryPoint>;

/// Applies step() round(|T| / dt) times, recording the start, every
/// checkpoint_every-th step and the end. `start_time` only labels the points.
Trajectory evolve(const FourierField& f, const FlowConfig& cfg, double start_time = 0.0);

/// Final state of evolve() without storing checkpoints.
FourierField flow_map(const FourierField& f, const FlowConfig& cfg);

struct ConservationReport {
    double mean_drift = 0.0;
    double l2_abs_drift = 0.0;
    double l2_rel_drift = 0.0;
    double hamiltonian_abs_drift = 0.0;
    double hamiltonian_rel_drift = 0.0;
};

/// Largest deviation of mean, l2 mass and Hamiltonian from their initial values.
ConservationReport conservation_report(const Trajectory& trajectory);

struct LiouvilleResult {
    double log_det = 0.0;
    double condition = 1.0;
    int dimension = 0;
};

/// log|det| of the central-difference Jacobian of the time-T flow map in the
/// real coordinates (Re a_1, Im a_1, ..., Re a_N, Im a_N). Requires N <= 12.
/// Throws PreconditionError if the Jacobian is numerically singular.
LiouvilleResult liouville_logdet(const FourierField& f, const FlowConfig& cfg);

/// max_n |d Re F_n / d Re a_n + d Im F_n / d Im a_n| for the full vector field F,
/// by central differences of size eps. Zero for a divergence-free field.
double vector_field_divergence(const FourierField& f, double eps);

/// Halves dt from `initial_dt` until a probe run over `probe_horizon`
/// keeps the relative l2 drift per unit time below `target`.
double choose_time_step(const FourierField& f, double probe_horizon, double target, double initial_dt = 1e-2,
                        int max_halvings = 30);

}  // namespace kdvbench
