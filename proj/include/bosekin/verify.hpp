#pragma once

#include "bosekin/collide.hpp"
#include "bosekin/grid.hpp"
#include "bosekin/kernel.hpp"

#include "json.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

namespace bosekin {

enum class CaseStatus { Pass, Fail, Inconclusive };

std::string to_string(CaseStatus status);

/// Outcome of one randomized property suite.
struct PropertyCase
{
    std::string name;
    std::string sampler;
    std::int64_t trials = 0;
    double tolerance = 0.0;
    double worst_margin = 0.0;  ///< relative; pass iff >= -tolerance
    std::int64_t violations = 0;
    std::uint64_t seed = 0;
    CaseStatus status = CaseStatus::Pass;
    std::string note;
};

nlohmann::json to_json(const PropertyCase& c);

struct MinMaxMargins
{
    double lower = 0.0;  ///< (x+y)^k - x^k - y^k - (k-1) min{x^k, y^k}
    double upper = 0.0;  ///< (2^k - 2) max{x^{k-l} y^l, y^{k-l} x^l} - ((x+y)^k - x^k - y^k)
    double scale = 0.0;  ///< (x+y)^k, the rounding scale of both margins
};

/// Both sides of the two-sided bound on (x+y)^k - x^k - y^k.
MinMaxMargins check_lemma_minmax(double x, double y, double k, double lambda);

struct PovznerMargins
{
    double bracket = 0.0;  ///< RHS - LHS of the <v>-weighted form
    double plain = 0.0;    ///< RHS - LHS of the |v| form
    double bracket_scale = 0.0;
    double plain_scale = 0.0;
};

PovznerMargins check_povzner(const Eigen::Vector3d& v, const Eigen::Vector3d& v_star,
                             const Eigen::Vector3d& sigma, double s, double gamma);

/// Margins of |x^z - y^z| <= |x - y|, monotonicity, and (x+y)^z <= x^z + y^z
/// (^ is min).
std::array<double, 3> check_truncation_lemma(double x, double y, double z);

/// (p int_0^inf r^{p-1} phi(r) dr)^{1/p} for the step profile phi = heights[i]
/// on [breaks[i], breaks[i+1]) and 0 beyond the last break; breaks[0] = 0.
double radial_power_mean(const std::vector<double>& breaks, const std::vector<double>& heights,
                         double p);

/// Monte-Carlo comparison of two integrals estimated from the same samples.
struct MonteCarloComparison
{
    double lhs = 0.0;
    double rhs = 0.0;
    double lhs_se = 0.0;
    double rhs_se = 0.0;
    double difference_se = 0.0;
    double z = 0.0;  ///< (lhs - rhs) / difference_se
    std::int64_t samples = 0;
    CaseStatus status = CaseStatus::Inconclusive;
};

nlohmann::json to_json(const MonteCarloComparison& c);

/// W1(|z|, <z/|z|, sigma>, u) for the change-of-variables identities.
using SeparableIntegrand = std::function<double(double, double, const Eigen::Vector3d&)>;

enum class PostVelocity { Prime, StarPrime };

/// Both sides of the identity that trades v' (or v*') for v* with the factor
/// sin^-3(theta/2) (or cos^-3(theta/2)), at a fixed v.
MonteCarloComparison check_change_of_variables(const SeparableIntegrand& w,
                                               const Eigen::Vector3d& v, PostVelocity which,
                                               std::int64_t samples, std::uint64_t seed);

using QuadrupleIntegrand = std::function<double(const Eigen::Vector3d&, const Eigen::Vector3d&,
                                                const Eigen::Vector3d&, const Eigen::Vector3d&)>;

/// int B F(v', v*', v, v*) against int B F(v, v*, v', v*').
MonteCarloComparison check_exchange_prime(const KernelSpec& kernel, const QuadrupleIntegrand& F,
                                          std::int64_t samples, std::uint64_t seed);

/// Value against a bound with multiplicative slack.
struct BoundCheck
{
    std::string name;
    double value = 0.0;
    double bound = 0.0;
    double margin = 0.0;  ///< 1 - value / (bound * slack)
    bool pass = false;
};

BoundCheck make_bound_check(std::string name, double value, double bound, double slack);

/// Weighted gain bound with weights |v - v*|^gamma <v'>^p <v*'>^q, worst node.
BoundCheck check_weighted_gain_bound(const CollisionOperator& op, const DistributionState& f,
                                     const DistributionState& g, double p, double q,
                                     double gamma, double slack = 1.05);

/// Pointwise, L1 and L2 bounds on Q+(f, f).
std::vector<BoundCheck> check_gain_bounds(const CollisionOperator& op, const DistributionState& f,
                                          double slack = 1.05);

/// Q+(f, Q+(g, h)) against its L1/L2 bound, worst node.
BoundCheck check_iterated_bound(const CollisionOperator& op, const DistributionState& f,
                                const DistributionState& g, const DistributionState& h,
                                double slack = 1.05);

/// Q+(Q+(f, Q+(g, g)), Q+(h, h)) against its bound, worst node.
BoundCheck check_fourth_order_bound(const CollisionOperator& op, const DistributionState& f,
                                    const DistributionState& g, const DistributionState& h,
                                    double slack = 1.05);

/// Discrete I_n(f, g) against its Lipschitz bound. Serial over all triples.
BoundCheck check_contraction_estimate(const CollisionOperator& op, const DistributionState& f,
                                      const DistributionState& g, double n, double K,
                                      double slack = 1.05);

struct CoercivityReport
{
    Eigen::ArrayXd ratio;  ///< L_K(f)(v) / (floor <v>)
    double floor = 0.0;
    double min_ratio = 0.0;
    double factor = 0.0;
    bool pass = false;  ///< min_ratio >= factor
};

/// L_K(f) against the coercivity floor. f must be centered to within one cell.
CoercivityReport check_coercivity(const CollisionOperator& op, const DistributionState& f,
                                  double K, double factor = 0.95);

/// Smooth random state: a mixture of one to three Gaussians well inside the grid.
DistributionState random_mixture(const VelocityGrid& grid, std::mt19937_64& rng);

struct SuiteOptions
{
    std::int64_t trials = 1'000'000;
    std::uint64_t seed = 20240601;
    double tolerance = 1e-12;
    int threads = 0;
};

/// Known suite names, in report order.
const std::vector<std::string>& suite_names();

/// Runs one named suite; unknown names raise InputError.
PropertyCase run_suite(const std::string& name, const SuiteOptions& options);

} // namespace bosekin
