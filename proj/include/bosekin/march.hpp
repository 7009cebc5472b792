#pragma once

#include "bosekin/collide.hpp"
#include "bosekin/grid.hpp"

#include <Eigen/Dense>

#include <functional>
#include <map>
#include <string>
#include <vector>

namespace bosekin {

enum class Scheme { PicardCutoff, DuhamelIntermediate, ExplicitEuler };

struct SolverConfig
{
    Scheme scheme = Scheme::DuhamelIntermediate;
    double dt = 1.0 / 64.0;  ///< step of the Duhamel and Euler schemes
    double dt_output = 0.1;
    double t_end = 1.0;
    double picard_tol = 1e-10;
    int picard_max_iter = 50;
    int substeps_per_interval = 8;
    bool renormalize_conservation = false;

    void validate() const;
};

/// Collision evaluation used by the steppers; lets tests substitute stubs.
using CollisionModel = std::function<CollisionResult(const Eigen::ArrayXd&, const CutoffParams&)>;

CollisionModel model_of(const CollisionOperator& op);

/// Length of the Picard contraction interval 1/(16 (1 + 2K + 2^{3/2}) 4 pi n mass).
double contraction_interval(double K, double n, double f0_mass);

struct PicardOutcome
{
    DistributionState state;        ///< endpoint, clamped to >= 0
    std::vector<double> residuals;  ///< sup-in-time L1 change per sweep
    std::vector<double> ratios;     ///< successive residual ratios above the noise floor
    int iterations = 0;
    double interval = 0.0;
    double clamped_mass = 0.0;  ///< L1 mass removed by clamping on the final iterate
};

/// Fixed-point iteration of f(t) = f_start + int_0^t Q_{n,K}(f) on [0, interval]
/// with trapezoidal time quadrature. interval <= 0 uses contraction_interval.
PicardOutcome picard_step(const CollisionModel& model, const DistributionState& f_start,
                          const CutoffParams& params, const SolverConfig& cfg,
                          double interval = 0.0);

/// Frozen-coefficient exponential Euler update from precomputed gain and loss rate.
Eigen::ArrayXd duhamel_update(const Eigen::ArrayXd& f, const Eigen::ArrayXd& gain,
                              const Eigen::ArrayXd& loss_rate, double dt);

DistributionState duhamel_step(const CollisionModel& model, const DistributionState& f,
                               double K, double dt);

struct EulerOutcome
{
    DistributionState state;
    double clamped_mass = 0.0;
};

/// Forward Euler on Q_{n,K}; negative values are clamped and reported.
EulerOutcome euler_step(const CollisionModel& model, const DistributionState& f,
                        const CutoffParams& params, double dt);

struct Drift
{
    double mass = 0.0;
    double momentum = 0.0;  ///< |M1 - M1(0)| / sqrt(M0(0) M2(0))
    double energy = 0.0;
};

struct BoundFlag
{
    bool pass = true;
    double margin = 0.0;  ///< 1 - value / (bound * slack); negative on failure
    double value = 0.0;
    double bound = 0.0;
};

/// Inequality checked on every record.
struct Monitor
{
    std::string name;
    std::function<BoundFlag(const DistributionState&, const MomentVector&)> check;
};

Monitor moment_envelope_monitor(const MomentVector& initial, double b, double K, double slack);
Monitor l13_uniform_monitor(const MomentVector& initial, double c1, double slack);
Monitor linf_ceiling_monitor(double ceiling, double slack);

struct TrajectoryRecord
{
    double time = 0.0;
    MomentVector moments;
    Drift drift;
    double linf = 0.0;
    std::map<std::string, BoundFlag> flags;
};

struct Trajectory
{
    std::vector<TrajectoryRecord> records;
    DistributionState final_state;
    double clamped_mass = 0.0;
    int steps = 0;
    std::vector<double> picard_ratios;
    std::vector<std::pair<double, double>> renormalizations;  ///< (mass factor, energy factor)

    bool all_monitors_pass() const;
};

class NumericalBreakdownError : public RuntimeFailure
{
public:
    NumericalBreakdownError(const std::string& what, DistributionState last_good)
        : RuntimeFailure(what), last_good_(std::move(last_good))
    {
    }
    const DistributionState& last_good() const { return last_good_; }

private:
    DistributionState last_good_;
};

using SnapshotObserver = std::function<void(const DistributionState&)>;

Trajectory run(const CollisionModel& model, const DistributionState& f0, const CutoffParams& params,
               const SolverConfig& cfg, const std::vector<Monitor>& monitors = {},
               const SnapshotObserver& observer = {});

Trajectory run(const CollisionOperator& op, const DistributionState& f0,
               const CutoffParams& params, const SolverConfig& cfg,
               const std::vector<Monitor>& monitors = {}, const SnapshotObserver& observer = {});

/// Rescale f by (alpha + gamma |v|^2) so that M0 and M2 match the targets.
std::pair<DistributionState, std::pair<double, double>>
renormalize(const DistributionState& f, double m0_target, double m2_target);

} // namespace bosekin
