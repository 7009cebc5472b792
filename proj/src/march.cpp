#include "bosekin/march.hpp"

#include "bosekin/bounds.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace bosekin {

void SolverConfig::validate() const
{
    if (!(picard_tol > 0.0))
        throw InputError("solver: picard_tol must be positive");
    if (!(t_end >= 0.0) || !std::isfinite(t_end))
        throw InputError("solver: t_end must be finite and >= 0");
    if (!(dt > 0.0))
        throw InputError("solver: dt must be positive");
    if (!(dt_output > 0.0))
        throw InputError("solver: dt_output must be positive");
    if (picard_max_iter < 1)
        throw InputError("solver: picard_max_iter must be >= 1");
    if (substeps_per_interval < 1)
        throw InputError("solver: substeps_per_interval must be >= 1");
}

CollisionModel model_of(const CollisionOperator& op)
{
    return [&op](const Eigen::ArrayXd& f, const CutoffParams& params) {
        return op.evaluate(f, params);
    };
}

double contraction_interval(double K, double n, double f0_mass)
{
    for (double x : {K, n, f0_mass})
        if (!(x > 0.0) || !std::isfinite(x))
            throw InputError("contraction_interval: arguments must be positive and finite");
    return 1.0 / (16.0 * (1.0 + 2.0 * K + std::pow(2.0, 1.5)) * 4.0 * std::numbers::pi * n * f0_mass);
}

namespace {

double l1(const Eigen::ArrayXd& x, double h3)
{
    return x.abs().sum() * h3;
}

void require_finite(const Eigen::ArrayXd& x, const DistributionState& last_good, const char* where)
{
    if (!x.allFinite())
        throw NumericalBreakdownError(std::string(where) + ": non-finite collision term at t = "
                                          + std::to_string(last_good.time()),
                                      last_good);
}

} // namespace

PicardOutcome picard_step(const CollisionModel& model, const DistributionState& f_start,
                          const CutoffParams& params, const SolverConfig& cfg, double interval)
{
    cfg.validate();
    params.validate();
    if (!std::isfinite(params.n))
        throw InputError("picard_step: the cutoff n must be finite");

    const VelocityGrid& grid = f_start.grid();
    const double h3 = grid.cell_volume();
    const double mass = moments(f_start).m0;
    const double T = interval > 0.0 ? interval : contraction_interval(params.K, params.n, mass);
    const int S = cfg.substeps_per_interval;
    const double tau = T / S;
    const double noise_floor = 1e-12 * std::max(mass, std::numeric_limits<double>::min());

    const Eigen::ArrayXd& f0 = f_start.values();
    std::vector<Eigen::ArrayXd> iterate(S + 1, f0);
    std::vector<Eigen::ArrayXd> rhs(S + 1);
    rhs[0] = model(f0, params).net;
    require_finite(rhs[0], f_start, "picard_step");

    PicardOutcome out;
    out.interval = T;
    int violations = 0;
    for (int m = 1; m <= cfg.picard_max_iter; ++m)
    {
        for (int j = 1; j <= S; ++j)
        {
            rhs[j] = model(iterate[j], params).net;
            require_finite(rhs[j], f_start, "picard_step");
        }

        double residual = 0.0;
        double clamped = 0.0;
        Eigen::ArrayXd integral = Eigen::ArrayXd::Zero(f0.size());
        for (int j = 1; j <= S; ++j)
        {
            integral += 0.5 * tau * (rhs[j - 1] + rhs[j]);
            Eigen::ArrayXd next = f0 + integral;
            clamped = (-next).max(0.0).sum() * h3;
            next = next.max(0.0);
            residual = std::max(residual, l1(next - iterate[j], h3));
            iterate[j] = std::move(next);
        }
        out.residuals.push_back(residual);
        out.iterations = m;
        out.clamped_mass = clamped;

        if (m >= 2)
        {
            const double previous = out.residuals[m - 2];
            if (previous > noise_floor && residual > noise_floor)
            {
                const double ratio = residual / previous;
                out.ratios.push_back(ratio);
                violations = ratio > 1.0 ? violations + 1 : 0;
                if (violations >= 2)
                    throw ContractionViolationError(
                        "picard_step: residual grew on two consecutive sweeps (ratio "
                        + std::to_string(ratio) + ")");
            }
        }
        if (residual <= cfg.picard_tol)
        {
            out.state = DistributionState(grid, iterate[S], f_start.time() + T);
            return out;
        }
    }
    throw NonConvergenceError("picard_step: no convergence within " + std::to_string(cfg.picard_max_iter)
                                  + " sweeps",
                              out.residuals.back());
}

Eigen::ArrayXd duhamel_update(const Eigen::ArrayXd& f, const Eigen::ArrayXd& gain,
                              const Eigen::ArrayXd& loss_rate, double dt)
{
    if (!(dt > 0.0))
        throw InputError("duhamel_update: dt must be positive");
    if (f.size() != gain.size() || f.size() != loss_rate.size())
        throw InputError("duhamel_update: size mismatch");
    Eigen::ArrayXd out(f.size());
    for (Eigen::Index p = 0; p < f.size(); ++p)
    {
        const double L = loss_rate[p];
        if (L < 1e-14)
        {
            out[p] = f[p] + dt * gain[p];
            continue;
        }
        const double x = L * dt;
        out[p] = f[p] * std::exp(-x) + (-std::expm1(-x) / L) * gain[p];
    }
    return out;
}

DistributionState duhamel_step(const CollisionModel& model, const DistributionState& f, double K,
                               double dt)
{
    const CollisionResult r = model(f.values(), CutoffParams::intermediate(K));
    require_finite(r.gain, f, "duhamel_step");
    require_finite(r.loss_rate, f, "duhamel_step");
    return DistributionState(f.grid(), duhamel_update(f.values(), r.gain, r.loss_rate, dt),
                             f.time() + dt);
}

EulerOutcome euler_step(const CollisionModel& model, const DistributionState& f,
                        const CutoffParams& params, double dt)
{
    if (!(dt > 0.0))
        throw InputError("euler_step: dt must be positive");
    const CollisionResult r = model(f.values(), params);
    require_finite(r.net, f, "euler_step");
    Eigen::ArrayXd next = f.values() + dt * r.net;
    EulerOutcome out;
    out.clamped_mass = (-next).max(0.0).sum() * f.grid().cell_volume();
    out.state = DistributionState(f.grid(), next.max(0.0), f.time() + dt);
    return out;
}

namespace {

BoundFlag make_flag(double value, double bound, double slack)
{
    BoundFlag flag;
    flag.value = value;
    flag.bound = bound;
    const double limit = bound * slack;
    flag.pass = value <= limit;
    flag.margin = std::isfinite(limit) && limit > 0.0 ? 1.0 - value / limit : (flag.pass ? 1.0 : -1.0);
    return flag;
}

} // namespace

Monitor moment_envelope_monitor(const MomentVector& initial, double b, double K, double slack)
{
    const double l13 = initial.l1s[3];
    const double l12 = initial.l1s[2];
    return {"moment_envelope", [=](const DistributionState& f, const MomentVector& m) {
                return make_flag(m.l1s[3], moment_envelope(l13, l12, b, K, 3.0, f.time()), slack);
            }};
}

Monitor l13_uniform_monitor(const MomentVector& initial, double c1, double slack)
{
    const double bound = std::max(1.0, c1) * initial.l1s[3];
    return {"l13_uniform", [=](const DistributionState&, const MomentVector& m) {
                return make_flag(m.l1s[3], bound, slack);
            }};
}

Monitor linf_ceiling_monitor(double ceiling, double slack)
{
    return {"linf_ceiling", [=](const DistributionState&, const MomentVector& m) {
                return make_flag(m.linf, ceiling, slack);
            }};
}

bool Trajectory::all_monitors_pass() const
{
    for (const auto& r : records)
        for (const auto& [name, flag] : r.flags)
            if (!flag.pass)
                return false;
    return true;
}

std::pair<DistributionState, std::pair<double, double>>
renormalize(const DistributionState& f, double m0_target, double m2_target)
{
    const VelocityGrid& grid = f.grid();
    const Eigen::ArrayXd v2 = sample(grid, [](const Eigen::Vector3d& v) { return v.squaredNorm(); });
    const Eigen::ArrayXd& x = f.values();
    const double h3 = grid.cell_volume();
    const double s0 = x.sum() * h3;
    const double s2 = (x * v2).sum() * h3;
    const double s4 = (x * v2 * v2).sum() * h3;
    const double det = s0 * s4 - s2 * s2;
    if (!(std::abs(det) > 0.0))
        throw RuntimeFailure("renormalize: degenerate moment system");
    const double alpha = (m0_target * s4 - m2_target * s2) / det;
    const double gamma = (s0 * m2_target - s2 * m0_target) / det;
    return {f.with_values((x * (alpha + gamma * v2)).max(0.0)), {alpha, gamma}};
}

namespace {

Drift drift_of(const MomentVector& m, const MomentVector& m_init)
{
    Drift d;
    d.mass = (m.m0 - m_init.m0) / m_init.m0;
    d.energy = m_init.m2 > 0.0 ? (m.m2 - m_init.m2) / m_init.m2 : 0.0;
    const double scale = std::sqrt(m_init.m0 * m_init.m2);
    d.momentum = scale > 0.0 ? (m.m1 - m_init.m1).norm() / scale : (m.m1 - m_init.m1).norm();
    return d;
}

TrajectoryRecord make_record(const DistributionState& f, const MomentVector& m_init,
                             const std::vector<Monitor>& monitors)
{
    TrajectoryRecord r;
    r.time = f.time();
    r.moments = moments(f);
    r.drift = drift_of(r.moments, m_init);
    r.linf = r.moments.linf;
    for (const auto& mon : monitors)
        r.flags[mon.name] = mon.check(f, r.moments);
    return r;
}

bool finite(const Eigen::ArrayXd& x)
{
    return x.allFinite();
}

} // namespace

Trajectory run(const CollisionModel& model, const DistributionState& f0, const CutoffParams& params,
               const SolverConfig& cfg, const std::vector<Monitor>& monitors,
               const SnapshotObserver& observer)
{
    cfg.validate();
    params.validate();
    const MomentVector m_init = moments(f0);
    if (!(m_init.m0 > 0.0))
        throw InputError("run: initial mass must be positive");
    if (cfg.scheme == Scheme::PicardCutoff && !std::isfinite(params.n))
        throw InputError("run: the Picard scheme needs a finite cutoff n");

    Trajectory traj;
    DistributionState f = f0;
    traj.records.push_back(make_record(f, m_init, monitors));
    if (observer)
        observer(f);

    const double t_start = f0.time();
    const double t_final = t_start + cfg.t_end;
    const double eps = 1e-12 * std::max(1.0, cfg.t_end);
    int k = 1;
    while (f.time() < t_final - eps)
    {
        const double next_output = std::min(t_start + k * cfg.dt_output, t_final);
        ++k;
        while (f.time() < next_output - eps)
        {
            const double remaining = next_output - f.time();
            DistributionState next;
            switch (cfg.scheme)
            {
            case Scheme::DuhamelIntermediate:
                next = duhamel_step(model, f, params.K, std::min(cfg.dt, remaining));
                break;
            case Scheme::ExplicitEuler:
            {
                auto e = euler_step(model, f, params, std::min(cfg.dt, remaining));
                traj.clamped_mass += e.clamped_mass;
                next = std::move(e.state);
                break;
            }
            case Scheme::PicardCutoff:
            {
                // The interval is recomputed from the current mass.
                const double tn = contraction_interval(params.K, params.n, moments(f).m0);
                auto p = picard_step(model, f, params, cfg, std::min(tn, remaining));
                traj.clamped_mass += p.clamped_mass;
                traj.picard_ratios.insert(traj.picard_ratios.end(), p.ratios.begin(), p.ratios.end());
                next = std::move(p.state);
                break;
            }
            }
            if (!finite(next.values()))
                throw NumericalBreakdownError("run: non-finite values at t = " + std::to_string(f.time()), f);
            // Land exactly on the output time.
            if (std::abs(next.time() - next_output) <= eps)
                next = next.at_time(next_output);
            if (cfg.renormalize_conservation)
            {
                auto [g, factors] = renormalize(next, m_init.m0, m_init.m2);
                traj.renormalizations.push_back(factors);
                next = std::move(g);
            }
            f = std::move(next);
            ++traj.steps;
        }
        traj.records.push_back(make_record(f, m_init, monitors));
        if (observer)
            observer(f);
    }
    traj.final_state = f;
    return traj;
}

Trajectory run(const CollisionOperator& op, const DistributionState& f0,
               const CutoffParams& params, const SolverConfig& cfg,
               const std::vector<Monitor>& monitors, const SnapshotObserver& observer)
{
    return run(model_of(op), f0, params, cfg, monitors, observer);
}

} // namespace bosekin
