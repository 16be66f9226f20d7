#include "kdvbench/kdv_flow.hpp"

#include "kdvbench/error.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <string>

namespace kdvbench {

namespace {

constexpr Complex kI{0.0, 1.0};
// Above this cutoff the transform product beats the direct sum.
constexpr int kDirectProductLimit = 48;

double cube(int n) { return static_cast<double>(n) * n * n; }

std::vector<Complex> airy_phases(int cutoff, double t)
{
    std::vector<Complex> phase(static_cast<std::size_t>(cutoff));
    for (int n = 1; n <= cutoff; ++n) phase[static_cast<std::size_t>(n - 1)] = std::polar(1.0, cube(n) * t);
    return phase;
}

bool all_finite(std::span<const Complex> v)
{
    for (const Complex& c : v) {
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
    }
    return true;
}

double mass(std::span<const Complex> v)
{
    double acc = 0.0;
    for (const Complex& c : v) acc += std::norm(c);
    return 2.0 * acc;
}

}  // namespace

long FlowConfig::step_count() const
{
    return std::lround(std::abs(horizon) / dt);
}

void FlowConfig::validate() const
{
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("flow: dt must be positive and finite");
    if (!std::isfinite(horizon)) throw ConfigError("flow: horizon must be finite");
    if (!(fd_eps > 0.0)) throw ConfigError("flow: fd_eps must be positive");
    if (checkpoint_every < 0) throw ConfigError("flow: checkpoint_every must be >= 0");
}

struct Stepper::Workspace {
    std::unique_ptr<ProductTransform> transform;
    std::vector<Complex> square, k1, k2, k3, k4, stage;
};

Stepper::Stepper(int cutoff, double dt, bool nonlinear)
    : cutoff_(cutoff),
      dt_(dt),
      nonlinear_(nonlinear),
      full_phase_(airy_phases(cutoff, dt)),
      half_phase_(airy_phases(cutoff, 0.5 * dt)),
      work_(std::make_unique<Workspace>())
{
    if (cutoff < 1) throw PreconditionError("stepper: cutoff must be >= 1");
    const auto n = static_cast<std::size_t>(cutoff);
    if (cutoff > kDirectProductLimit) work_->transform = std::make_unique<ProductTransform>(cutoff);
    for (auto* v : {&work_->square, &work_->k1, &work_->k2, &work_->k3, &work_->k4, &work_->stage}) v->resize(n);
}

Stepper::~Stepper() = default;

void Stepper::nonlinear_rhs(std::span<const Complex> state, std::span<Complex> out)
{
    if (!nonlinear_) {
        std::fill(out.begin(), out.end(), Complex{});
        return;
    }
    auto& sq = work_->square;
    if (work_->transform) {
        work_->transform->square(state, sq);
    } else {
        convolve_direct(state, state, sq);
    }
    for (int n = 1; n <= cutoff_; ++n) {
        const auto k = static_cast<std::size_t>(n - 1);
        out[k] = -0.5 * kI * static_cast<double>(n) * sq[k];
    }
}

void Stepper::step(std::span<Complex> u)
{
    Workspace& w = *work_;
    const std::size_t n = static_cast<std::size_t>(cutoff_);
    const double h = dt_;
    const auto& e = full_phase_;
    const auto& e2 = half_phase_;

    nonlinear_rhs(u, w.k1);
    for (std::size_t k = 0; k < n; ++k) w.stage[k] = e2[k] * (u[k] + 0.5 * h * w.k1[k]);
    nonlinear_rhs(w.stage, w.k2);
    for (std::size_t k = 0; k < n; ++k) w.stage[k] = e2[k] * u[k] + 0.5 * h * w.k2[k];
    nonlinear_rhs(w.stage, w.k3);
    for (std::size_t k = 0; k < n; ++k) w.stage[k] = e[k] * u[k] + h * e2[k] * w.k3[k];
    nonlinear_rhs(w.stage, w.k4);
    for (std::size_t k = 0; k < n; ++k) {
        u[k] = e[k] * u[k] + (h / 6.0) * (e[k] * w.k1[k] + 2.0 * e2[k] * (w.k2[k] + w.k3[k]) + w.k4[k]);
    }
    if (!all_finite(u)) throw IntegratorBlowup("non-finite state after step of size " + std::to_string(h));
}

FourierField nonlinear_term(const FourierField& f)
{
    std::vector<Complex> out(static_cast<std::size_t>(f.cutoff()));
    Stepper(f.cutoff(), 0.0).nonlinear_rhs(f.positive(), out);
    return FourierField(std::move(out));
}

FourierField airy_propagate(const FourierField& f, double t)
{
    std::vector<Complex> out(f.positive().begin(), f.positive().end());
    for (int n = 1; n <= f.cutoff(); ++n) out[static_cast<std::size_t>(n - 1)] *= std::polar(1.0, cube(n) * t);
    return FourierField(std::move(out));
}

FourierField step(const FourierField& f, double dt, bool nonlinear)
{
    std::vector<Complex> u(f.positive().begin(), f.positive().end());
    Stepper(f.cutoff(), dt, nonlinear).step(u);
    return FourierField(std::move(u));
}

Trajectory evolve(const FourierField& f, const FlowConfig& cfg, double start_time)
{
    cfg.validate();
    const long steps = cfg.step_count();
    const double h = cfg.horizon < 0 ? -cfg.dt : cfg.dt;
    Trajectory out;
    out.push_back({start_time, f});
    if (steps == 0) return out;

    Stepper stepper(f.cutoff(), h, cfg.nonlinear);
    std::vector<Complex> u(f.positive().begin(), f.positive().end());
    // A blow-up that stays finite still breaks mass conservation by orders of magnitude.
    const double mass_ceiling = 1e6 * (mass(u) + 1.0);
    for (long k = 1; k <= steps; ++k) {
        try {
            stepper.step(u);
        } catch (const IntegratorBlowup& e) {
            throw IntegratorBlowup(std::string(e.what()) + " at step " + std::to_string(k));
        }
        if (mass(u) > mass_ceiling) {
            throw IntegratorBlowup("l2 mass exceeded 1e6 x its initial value at step " + std::to_string(k));
        }
        if (k == steps || (cfg.checkpoint_every > 0 && k % cfg.checkpoint_every == 0)) {
            out.push_back({start_time + static_cast<double>(k) * h, FourierField(u)});
        }
    }
    return out;
}

FourierField flow_map(const FourierField& f, const FlowConfig& cfg)
{
    FlowConfig endpoints = cfg;
    endpoints.checkpoint_every = 0;
    return evolve(f, endpoints).back().field;
}

ConservationReport conservation_report(const Trajectory& trajectory)
{
    ConservationReport r;
    if (trajectory.empty()) return r;
    const double m0 = l2_mass(trajectory.front().field);
    const double h0 = hamiltonian(trajectory.front().field);
    for (const auto& point : trajectory) {
        r.mean_drift = std::max(r.mean_drift, std::abs(point.field[0]));
        r.l2_abs_drift = std::max(r.l2_abs_drift, std::abs(l2_mass(point.field) - m0));
        r.hamiltonian_abs_drift = std::max(r.hamiltonian_abs_drift, std::abs(hamiltonian(point.field) - h0));
    }
    r.l2_rel_drift = m0 > 0 ? r.l2_abs_drift / m0 : r.l2_abs_drift;
    r.hamiltonian_rel_drift = h0 != 0 ? r.hamiltonian_abs_drift / std::abs(h0) : r.hamiltonian_abs_drift;
    return r;
}

namespace {

Eigen::VectorXd to_real(std::span<const Complex> u)
{
    Eigen::VectorXd x(2 * static_cast<Eigen::Index>(u.size()));
    for (std::size_t k = 0; k < u.size(); ++k) {
        x(2 * static_cast<Eigen::Index>(k)) = u[k].real();
        x(2 * static_cast<Eigen::Index>(k) + 1) = u[k].imag();
    }
    return x;
}

std::vector<Complex> to_complex(const Eigen::VectorXd& x)
{
    std::vector<Complex> u(static_cast<std::size_t>(x.size() / 2));
    for (std::size_t k = 0; k < u.size(); ++k) {
        u[k] = Complex(x(2 * static_cast<Eigen::Index>(k)), x(2 * static_cast<Eigen::Index>(k) + 1));
    }
    return u;
}

}  // namespace

LiouvilleResult liouville_logdet(const FourierField& f, const FlowConfig& cfg)
{
    cfg.validate();
    if (f.cutoff() > 12) throw PreconditionError("liouville_logdet: cutoff must be <= 12");
    const Eigen::VectorXd x0 = to_real(f.positive());
    const Eigen::Index dim = x0.size();
    LiouvilleResult out;
    out.dimension = static_cast<int>(dim);
    if (cfg.step_count() == 0) return out;

    auto map = [&](const Eigen::VectorXd& x) { return to_real(flow_map(FourierField(to_complex(x)), cfg).positive()); };

    Eigen::MatrixXd jac(dim, dim);
    for (Eigen::Index j = 0; j < dim; ++j) {
        Eigen::VectorXd plus = x0, minus = x0;
        plus(j) += cfg.fd_eps;
        minus(j) -= cfg.fd_eps;
        jac.col(j) = (map(plus) - map(minus)) / (2.0 * cfg.fd_eps);
    }
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(jac);
    const auto& sv = svd.singularValues();
    if (!(sv(dim - 1) > 0.0)) throw PreconditionError("liouville_logdet: singular finite-difference Jacobian");
    out.condition = sv(0) / sv(dim - 1);
    if (out.condition > 1e12) {
        throw PreconditionError("liouville_logdet: ill-conditioned Jacobian, condition " +
                                std::to_string(out.condition));
    }
    double log_det = 0.0;
    for (Eigen::Index k = 0; k < dim; ++k) log_det += std::log(sv(k));
    out.log_det = log_det;
    return out;
}

double vector_field_divergence(const FourierField& f, double eps)
{
    const int n_max = f.cutoff();
    Stepper rhs(n_max, 0.0);
    std::vector<Complex> u(f.positive().begin(), f.positive().end());
    std::vector<Complex> plus(u.size()), minus(u.size());
    auto field = [&](std::vector<Complex> state, std::vector<Complex>& out) {
        rhs.nonlinear_rhs(state, out);
        for (int n = 1; n <= n_max; ++n) out[static_cast<std::size_t>(n - 1)] += kI * cube(n) * state[static_cast<std::size_t>(n - 1)];
    };
    double worst = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
        double div = 0.0;
        for (const Complex dir : {Complex(1.0, 0.0), Complex(0.0, 1.0)}) {
            auto up = u, down = u;
            up[k] += eps * dir;
            down[k] -= eps * dir;
            field(up, plus);
            field(down, minus);
            const Complex d = (plus[k] - minus[k]) / (2.0 * eps);
            div += dir.real() != 0.0 ? d.real() : d.imag();
        }
        worst = std::max(worst, std::abs(div));
    }
    return worst;
}

double choose_time_step(const FourierField& f, double probe_horizon, double target, double initial_dt,
                        int max_halvings)
{
    if (!(probe_horizon > 0.0) || !(target > 0.0) || !(initial_dt > 0.0)) {
        throw PreconditionError("choose_time_step: horizon, target and initial dt must be positive");
    }
    const double m0 = l2_mass(f);
    double dt = initial_dt;
    for (int i = 0; i <= max_halvings; ++i, dt *= 0.5) {
        FlowConfig cfg;
        cfg.dt = dt;
        cfg.horizon = std::max(probe_horizon, dt);
        try {
            const FourierField end = flow_map(f, cfg);
            const double drift = m0 > 0 ? std::abs(l2_mass(end) - m0) / m0 : 0.0;
            if (drift / cfg.horizon < target) return dt;
        } catch (const IntegratorBlowup&) {
        }
    }
    throw IntegratorBlowup("choose_time_step: no stable step found after " + std::to_string(max_halvings) +
                           " halvings");
}

}  // namespace kdvbench
