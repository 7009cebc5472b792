#include "bosekin/verify.hpp"

#include "bosekin/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace bosekin {

namespace {

constexpr double pi = std::numbers::pi;
constexpr std::int64_t chunk_trials = 4096;

std::mt19937_64 chunk_rng(std::uint64_t seed, std::int64_t chunk)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(chunk), static_cast<std::uint32_t>(chunk >> 32)};
    return std::mt19937_64(seq);
}

double uniform(std::mt19937_64& rng, double lo, double hi)
{
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

double log_uniform(std::mt19937_64& rng, double lo, double hi)
{
    return std::exp(uniform(rng, std::log(lo), std::log(hi)));
}

Eigen::Vector3d normal3(std::mt19937_64& rng)
{
    std::normal_distribution<double> n;
    return {n(rng), n(rng), n(rng)};
}

Eigen::Vector3d random_unit(std::mt19937_64& rng)
{
    Eigen::Vector3d x;
    do
        x = normal3(rng);
    while (x.norm() < 1e-8);
    return x / x.norm();
}

/// Gaussian with log-uniform scale in [1e-2, 1e2].
Eigen::Vector3d random_velocity(std::mt19937_64& rng)
{
    return log_uniform(rng, 1e-2, 1e2) * normal3(rng);
}

double bracket(const Eigen::Vector3d& v)
{
    return std::sqrt(1.0 + v.squaredNorm());
}

int resolve_threads(int requested)
{
#ifdef _OPENMP
    return requested > 0 ? requested : omp_get_max_threads();
#else
    (void)requested;
    return 1;
#endif
}

/// Runs trial(rng) -> relative margin over deterministic chunks; the worst
/// margin and the violation count do not depend on the thread count.
template <typename Trial>
PropertyCase run_chunked(const std::string& name, const std::string& sampler,
                         const SuiteOptions& options, double tolerance, Trial&& trial)
{
    PropertyCase out;
    out.name = name;
    out.sampler = sampler;
    out.trials = std::max<std::int64_t>(options.trials, 0);
    out.tolerance = tolerance;
    out.seed = options.seed;
    if (out.trials == 0)
    {
        out.worst_margin = std::numeric_limits<double>::infinity();
        out.status = CaseStatus::Pass;
        out.note = "no trials run (vacuous pass)";
        return out;
    }
    const std::int64_t chunks = (out.trials + chunk_trials - 1) / chunk_trials;
    std::vector<double> worst(chunks, std::numeric_limits<double>::infinity());
    std::vector<std::int64_t> bad(chunks, 0);

#pragma omp parallel for schedule(dynamic, 1) num_threads(resolve_threads(options.threads))
    for (std::int64_t c = 0; c < chunks; ++c)
    {
        auto rng = chunk_rng(options.seed, c);
        const std::int64_t count = std::min(chunk_trials, out.trials - c * chunk_trials);
        for (std::int64_t t = 0; t < count; ++t)
        {
            const double m = trial(rng);
            if (!(m >= -tolerance))
                ++bad[c];
            worst[c] = std::min(worst[c], std::isnan(m) ? -std::numeric_limits<double>::infinity() : m);
        }
    }
    out.worst_margin = *std::min_element(worst.begin(), worst.end());
    for (auto b : bad)
        out.violations += b;
    out.status = out.worst_margin >= -tolerance ? CaseStatus::Pass : CaseStatus::Fail;
    return out;
}

struct MomentSums
{
    double x = 0.0, xx = 0.0, y = 0.0, yy = 0.0, d = 0.0, dd = 0.0;

    void add(double a, double b)
    {
        x += a;
        xx += a * a;
        y += b;
        yy += b * b;
        d += a - b;
        dd += (a - b) * (a - b);
    }
    void merge(const MomentSums& o)
    {
        x += o.x;
        xx += o.xx;
        y += o.y;
        yy += o.yy;
        d += o.d;
        dd += o.dd;
    }
};

/// Paired Monte-Carlo estimator; draw(rng) returns one (lhs, rhs) sample.
template <typename Draw>
MonteCarloComparison paired_monte_carlo(std::int64_t samples, std::uint64_t seed, Draw&& draw)
{
    MonteCarloComparison out;
    out.samples = std::max<std::int64_t>(samples, 0);
    if (out.samples < 2)
        return out;
    const std::int64_t chunks = (out.samples + chunk_trials - 1) / chunk_trials;
    std::vector<MomentSums> parts(chunks);
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t c = 0; c < chunks; ++c)
    {
        auto rng = chunk_rng(seed, c);
        const std::int64_t count = std::min(chunk_trials, out.samples - c * chunk_trials);
        for (std::int64_t t = 0; t < count; ++t)
        {
            const auto [a, b] = draw(rng);
            parts[c].add(a, b);
        }
    }
    MomentSums s;
    for (const auto& p : parts)
        s.merge(p);
    const double m = static_cast<double>(out.samples);
    const auto se = [m](double sum, double sum2) {
        const double mean = sum / m;
        return std::sqrt(std::max(sum2 / m - mean * mean, 0.0) / (m - 1.0));
    };
    out.lhs = s.x / m;
    out.rhs = s.y / m;
    out.lhs_se = se(s.x, s.xx);
    out.rhs_se = se(s.y, s.yy);
    out.difference_se = se(s.d, s.dd);
    const double diff = out.lhs - out.rhs;
    out.z = out.difference_se > 0.0 ? diff / out.difference_se : (diff == 0.0 ? 0.0 : std::copysign(1e300, diff));
    const double size = std::max(std::abs(out.lhs), std::abs(out.rhs));
    if (std::abs(diff) <= 1e-12 * size)
        out.status = out.samples < 1000 ? CaseStatus::Inconclusive : CaseStatus::Pass;
    else if (out.samples < 1000 || (size > 0.0 && out.difference_se > 0.05 * size))
        out.status = CaseStatus::Inconclusive;
    else
        out.status = std::abs(out.z) <= 3.0 ? CaseStatus::Pass : CaseStatus::Fail;
    return out;
}

double gaussian_density(const Eigen::Vector3d& x, double s)
{
    return std::exp(-0.5 * x.squaredNorm() / (s * s)) / std::pow(2.0 * pi * s * s, 1.5);
}

} // namespace

std::string to_string(CaseStatus status)
{
    switch (status)
    {
    case CaseStatus::Pass:
        return "pass";
    case CaseStatus::Fail:
        return "fail";
    case CaseStatus::Inconclusive:
        return "inconclusive";
    }
    return "unknown";
}

nlohmann::json to_json(const PropertyCase& c)
{
    nlohmann::json j;
    j["name"] = c.name;
    j["sampler"] = c.sampler;
    j["trials"] = c.trials;
    j["tolerance"] = c.tolerance;
    j["worst_margin"] = std::isfinite(c.worst_margin) ? nlohmann::json(c.worst_margin) : nlohmann::json(nullptr);
    j["violations"] = c.violations;
    j["seed"] = c.seed;
    j["status"] = to_string(c.status);
    if (!c.note.empty())
        j["note"] = c.note;
    return j;
}

nlohmann::json to_json(const MonteCarloComparison& c)
{
    return {{"lhs", c.lhs},           {"rhs", c.rhs},         {"lhs_se", c.lhs_se},
            {"rhs_se", c.rhs_se},     {"difference_se", c.difference_se},
            {"z", c.z},               {"samples", c.samples}, {"status", to_string(c.status)}};
}

MinMaxMargins check_lemma_minmax(double x, double y, double k, double lambda)
{
    if (!(k > 1.0) || !std::isfinite(k))
        throw InputError("check_lemma_minmax: k must exceed 1");
    if (!(x >= 0.0 && y >= 0.0))
        throw InputError("check_lemma_minmax: x and y must be nonnegative");
    if (!(lambda >= 0.0 && lambda <= std::min(1.0, 0.5 * k)))
        throw InputError("check_lemma_minmax: lambda must lie in [0, min{1, k/2}]");

    const double big = std::max(x, y);
    const double small = std::min(x, y);
    double middle = 0.0;
    if (big > 0.0)
        middle = std::pow(big, k) * std::expm1(k * std::log1p(small / big)) - std::pow(small, k);
    MinMaxMargins m;
    m.scale = std::pow(x + y, k);
    m.lower = middle - (k - 1.0) * std::pow(small, k);
    const double mixed = std::max(std::pow(x, k - lambda) * std::pow(y, lambda),
                                  std::pow(y, k - lambda) * std::pow(x, lambda));
    m.upper = (std::pow(2.0, k) - 2.0) * mixed - middle;
    return m;
}

PovznerMargins check_povzner(const Eigen::Vector3d& v, const Eigen::Vector3d& v_star,
                             const Eigen::Vector3d& sigma, double s, double gamma)
{
    if (!(s > 2.0) || !std::isfinite(s))
        throw InputError("check_povzner: s must exceed 2");
    if (!(gamma >= 0.0 && gamma <= std::min(2.0, 0.5 * s)))
        throw InputError("check_povzner: gamma must lie in [0, min{2, s/2}]");
    const auto pair = post_collision(v, v_star, sigma);
    const double k = kappa(collision_angle(relative_direction(v, v_star), sigma));
    const double lead = 2.0 * (std::pow(2.0, 0.5 * s) - 2.0);
    const double tail = std::pow(2.0, -s) * (0.5 * s - 1.0) * std::pow(k, 0.5 * s);

    const auto side = [&](double a, double as, double ap, double asp, double& scale) {
        const double lhs_terms[4] = {std::pow(ap, s), std::pow(asp, s), std::pow(a, s), std::pow(as, s)};
        const double lhs = lhs_terms[0] + lhs_terms[1] - lhs_terms[2] - lhs_terms[3];
        const double mix = std::pow(a, s - gamma) * std::pow(as, gamma) + std::pow(a, gamma) * std::pow(as, s - gamma);
        const double rhs = lead * mix - tail * lhs_terms[2];
        scale = lhs_terms[0] + lhs_terms[1] + lhs_terms[2] + lhs_terms[3] + lead * mix;
        return rhs - lhs;
    };
    PovznerMargins out;
    out.bracket = side(bracket(v), bracket(v_star), bracket(pair.v_prime), bracket(pair.v_star_prime),
                       out.bracket_scale);
    out.plain = side(v.norm(), v_star.norm(), pair.v_prime.norm(), pair.v_star_prime.norm(),
                     out.plain_scale);
    return out;
}

std::array<double, 3> check_truncation_lemma(double x, double y, double z)
{
    if (!(x >= 0.0 && y >= 0.0 && z >= 0.0))
        throw InputError("check_truncation_lemma: arguments must be nonnegative");
    const double xz = std::min(x, z);
    const double yz = std::min(y, z);
    const double lo = std::min(x, y);
    const double hi = std::max(x, y);
    return {std::abs(x - y) - std::abs(xz - yz), std::min(hi, z) - std::min(lo, z),
            xz + yz - std::min(x + y, z)};
}

double radial_power_mean(const std::vector<double>& breaks, const std::vector<double>& heights,
                         double p)
{
    if (breaks.size() != heights.size() + 1 || heights.empty())
        throw InputError("radial_power_mean: need one more break than heights");
    if (breaks.front() != 0.0)
        throw InputError("radial_power_mean: first break must be 0");
    if (!(p > 0.0))
        throw InputError("radial_power_mean: p must be positive");
    double sum = 0.0;
    double previous = 0.0;
    for (std::size_t i = 0; i < heights.size(); ++i)
    {
        if (!(breaks[i + 1] > breaks[i]))
            throw InputError("radial_power_mean: breaks must increase");
        if (!(heights[i] >= 0.0 && heights[i] <= 1.0))
            throw InputError("radial_power_mean: heights must lie in [0, 1]");
        const double next = std::pow(breaks[i + 1], p);
        sum += heights[i] * (next - previous);
        previous = next;
    }
    return std::pow(sum, 1.0 / p);
}

MonteCarloComparison check_change_of_variables(const SeparableIntegrand& w,
                                               const Eigen::Vector3d& v, PostVelocity which,
                                               std::int64_t samples, std::uint64_t seed)
{
    // z = v - v* ~ N(0, I), sigma uniform. The right side is written after the
    // substitution v* = v - sin(theta/2) z (cos for v*'), whose Jacobian cancels
    // the sin^-3 (cos^-3) factor.
    return paired_monte_carlo(samples, seed, [&](std::mt19937_64& rng) {
        const Eigen::Vector3d z = normal3(rng);
        const Eigen::Vector3d sigma = random_unit(rng);
        const double r = z.norm();
        const double c = r > 0.0 ? std::clamp(z.dot(sigma) / r, -1.0, 1.0) : 1.0;
        const double inv_density = 4.0 * pi / gaussian_density(z, 1.0);
        const Eigen::Vector3d v_star = v - z;
        const auto pair = post_collision(v, v_star, sigma);
        double lhs = 0.0;
        double rhs = 0.0;
        if (which == PostVelocity::Prime)
        {
            lhs = w(r, c, pair.v_prime);
            rhs = w(r, c, Eigen::Vector3d(v - std::sqrt(0.5 * (1.0 - c)) * z));
        }
        else
        {
            lhs = w(r, c, pair.v_star_prime);
            rhs = w(r, c, Eigen::Vector3d(v - std::sqrt(0.5 * (1.0 + c)) * z));
        }
        return std::pair<double, double>{lhs * inv_density, rhs * inv_density};
    });
}

MonteCarloComparison check_exchange_prime(const KernelSpec& kernel, const QuadrupleIntegrand& F,
                                          std::int64_t samples, std::uint64_t seed)
{
    kernel.validate();
    constexpr double spread = 1.5;
    return paired_monte_carlo(samples, seed, [&](std::mt19937_64& rng) {
        const Eigen::Vector3d v = spread * normal3(rng);
        const Eigen::Vector3d vs = spread * normal3(rng);
        const Eigen::Vector3d sigma = random_unit(rng);
        const double inv_density = 4.0 * pi / (gaussian_density(v, spread) * gaussian_density(vs, spread));
        const auto pair = post_collision(v, vs, sigma);
        const double b = evaluate_kernel(kernel, v, vs, sigma) * inv_density;
        return std::pair<double, double>{b * F(pair.v_prime, pair.v_star_prime, v, vs),
                                         b * F(v, vs, pair.v_prime, pair.v_star_prime)};
    });
}

BoundCheck make_bound_check(std::string name, double value, double bound, double slack)
{
    BoundCheck c;
    c.name = std::move(name);
    c.value = value;
    c.bound = bound;
    const double limit = bound * slack;
    c.pass = value <= limit;
    c.margin = limit > 0.0 ? 1.0 - value / limit : (c.pass ? 0.0 : -1.0);
    return c;
}

namespace {

void require_grid(const CollisionOperator& op, const DistributionState& f, const char* where)
{
    if (!(f.grid() == op.grid()))
        throw InputError(std::string(where) + ": grid mismatch");
}

/// Worst nodewise value/bound ratio reported as a BoundCheck.
BoundCheck worst_node(std::string name, const Eigen::ArrayXd& value, const Eigen::ArrayXd& bound,
                      double slack)
{
    Eigen::Index at = 0;
    (value / bound).maxCoeff(&at);
    return make_bound_check(std::move(name), value[at], bound[at], slack);
}

double l1(const VelocityGrid& grid, const Eigen::ArrayXd& x)
{
    return x.abs().sum() * grid.cell_volume();
}

double l2(const VelocityGrid& grid, const Eigen::ArrayXd& x)
{
    return std::sqrt(x.square().sum() * grid.cell_volume());
}

} // namespace

BoundCheck check_weighted_gain_bound(const CollisionOperator& op, const DistributionState& f,
                                     const DistributionState& g, double p, double q,
                                     double gamma, double slack)
{
    require_grid(op, f, "check_weighted_gain_bound");
    require_grid(op, g, "check_weighted_gain_bound");
    if (!(p >= 0.0 && q >= 0.0 && gamma >= 0.0))
        throw InputError("check_weighted_gain_bound: p, q, gamma must be nonnegative");
    const VelocityGrid& grid = op.grid();
    const Eigen::ArrayXd w = japanese_bracket(grid);
    const Eigen::ArrayXd gw = g.values() * w.pow(p);
    const Eigen::ArrayXd fw = f.values() * w.pow(q);
    const Eigen::ArrayXd lhs =
        op.gain_bilinear(gw, fw, [gamma](double speed, double) { return std::pow(speed, gamma); });
    const double coefficient = std::pow(2.0, 0.5 * (3.0 + gamma)) * 4.0 * pi;
    const double norms = fw.maxCoeff() * weighted_l1(grid, g.values(), p + gamma)
                         + gw.maxCoeff() * weighted_l1(grid, f.values(), q + gamma);
    const Eigen::ArrayXd rhs = coefficient * norms * w.pow(gamma);
    return worst_node("weighted_gain", lhs, rhs.max(std::numeric_limits<double>::min()), slack);
}

std::vector<BoundCheck> check_gain_bounds(const CollisionOperator& op, const DistributionState& f,
                                          double slack)
{
    require_grid(op, f, "check_gain_bounds");
    const VelocityGrid& grid = op.grid();
    const double b = op.kernel().effective_b();
    const MomentVector m = moments(f);
    const Eigen::ArrayXd q = op.gain_bilinear(f.values(), f.values());
    const Eigen::ArrayXd w = japanese_bracket(grid);

    std::vector<BoundCheck> out;
    out.push_back(worst_node("gain_pointwise", q, 32.0 * pi * b * m.linf * m.l1s[1] * w, slack));
    out.push_back(make_bound_check("gain_l1", l1(grid, q), 4.0 * pi * b * m.l1s[1] * m.l1s[1], slack));
    out.push_back(make_bound_check("gain_l2", l2(grid, q),
                                   std::pow(2.0, 3.25) * pi * b * std::sqrt(m.linf * m.m0) * m.l1s[2],
                                   slack));
    return out;
}

BoundCheck check_iterated_bound(const CollisionOperator& op, const DistributionState& f,
                                const DistributionState& g, const DistributionState& h,
                                double slack)
{
    for (const auto* x : {&f, &g, &h})
        require_grid(op, *x, "check_iterated_bound");
    const VelocityGrid& grid = op.grid();
    const double b = op.kernel().effective_b();
    const Eigen::ArrayXd inner = op.gain_bilinear(g.values(), h.values());
    const Eigen::ArrayXd outer = op.gain_bilinear(f.values(), inner);
    const double bound = std::pow(2.0, 5.0 + 2.0 / 3.0) * std::pow(pi, 4.0 / 3.0) * b * b
                         * std::cbrt(l1(grid, f.values())) * std::pow(l2(grid, f.values()), 2.0 / 3.0)
                         * l1(grid, g.values()) * l1(grid, h.values());
    return make_bound_check("gain_iterated", outer.maxCoeff(), bound, slack);
}

BoundCheck check_fourth_order_bound(const CollisionOperator& op, const DistributionState& f,
                                    const DistributionState& g, const DistributionState& h,
                                    double slack)
{
    for (const auto* x : {&f, &g, &h})
        require_grid(op, *x, "check_fourth_order_bound");
    const VelocityGrid& grid = op.grid();
    const double b = op.kernel().effective_b();
    const Eigen::ArrayXd qgg = op.gain_bilinear(g.values(), g.values());
    const Eigen::ArrayXd qhh = op.gain_bilinear(h.values(), h.values());
    const Eigen::ArrayXd left = op.gain_bilinear(f.values(), qgg);
    const Eigen::ArrayXd top = op.gain_bilinear(left, qhh);
    const double hl1 = l1(grid, h.values());
    const double bound = std::pow(2.0, 11.0) * std::pow(pi, 3.0) * std::pow(b, 4.0)
                         * std::pow(l1(grid, f.values()), 2.0 / 3.0)
                         * std::cbrt(weighted_l1(grid, f.values(), 1.0))
                         * std::pow(weighted_l1(grid, g.values(), 0.5), 4.0 / 3.0)
                         * std::pow(weighted_l1(grid, g.values(), 2.0), 2.0 / 3.0) * hl1 * hl1;
    return make_bound_check("gain_fourth_order", top.maxCoeff(), bound, slack);
}

BoundCheck check_contraction_estimate(const CollisionOperator& op, const DistributionState& f,
                                      const DistributionState& g, double n, double K,
                                      double slack)
{
    require_grid(op, f, "check_contraction_estimate");
    require_grid(op, g, "check_contraction_estimate");
    if (!(n > 0.0 && K > 0.0) || !std::isfinite(n) || !std::isfinite(K))
        throw InputError("check_contraction_estimate: n and K must be positive and finite");
    const VelocityGrid& grid = op.grid();
    const double h3 = grid.cell_volume();
    const Eigen::ArrayXd& fv = f.values();
    const Eigen::ArrayXd& gv = g.values();
    double total = 0.0;
    op.for_each_collision([&](const CollisionSample& s) {
        const double fa = std::min(interpolate(grid, fv, s.v_prime), n);
        const double fb = std::min(interpolate(grid, fv, s.v_star_prime), n);
        const double ga = std::min(interpolate(grid, gv, s.v_prime), n);
        const double gb = std::min(interpolate(grid, gv, s.v_star_prime), n);
        const double tf = fa * fb * (1.0 + std::min(fv[s.p], K) + std::min(fv[s.q], K));
        const double tg = ga * gb * (1.0 + std::min(gv[s.p], K) + std::min(gv[s.q], K));
        total += s.weight * h3 * std::min(s.kernel, n) * std::abs(tf - tg);
    });
    const double nf = l1(grid, fv);
    const double ng = l1(grid, gv);
    const double diff = l1(grid, fv - gv);
    const double bound = (1.0 + 2.0 * K) * 4.0 * pi * n * (nf + ng) * diff
                         + std::pow(2.0, 3.5) * 4.0 * pi * n * gv.min(n).maxCoeff() * ng * diff;
    return make_bound_check("contraction_estimate", total, bound, slack);
}

CoercivityReport check_coercivity(const CollisionOperator& op, const DistributionState& f,
                                  double K, double factor)
{
    require_grid(op, f, "check_coercivity");
    const MomentVector m = moments(f);
    if (!(m.m0 > 0.0 && m.m2 > 0.0))
        throw InputError("check_coercivity: M0 and M2 must be positive");
    if (m.m1.norm() / m.m0 > op.grid().spacing())
        throw InputError("check_coercivity: f must have zero mean velocity (within one cell)");
    CoercivityReport r;
    r.factor = factor;
    r.floor = coercivity_floor(m, op.kernel());
    r.ratio = l_k(op, f, K) / (r.floor * japanese_bracket(op.grid()));
    r.min_ratio = r.ratio.minCoeff();
    r.pass = r.min_ratio >= factor;
    return r;
}

DistributionState random_mixture(const VelocityGrid& grid, std::mt19937_64& rng)
{
    const double L = grid.extent();
    const int components = std::uniform_int_distribution<int>(1, 3)(rng);
    Eigen::ArrayXd values = Eigen::ArrayXd::Zero(grid.size());
    for (int c = 0; c < components; ++c)
    {
        const double mass = log_uniform(rng, 0.1, 2.0);
        const double temperature = uniform(rng, 0.02, 0.06) * L * L;
        const Eigen::Vector3d mean(uniform(rng, -0.25, 0.25) * L, uniform(rng, -0.25, 0.25) * L,
                                   uniform(rng, -0.25, 0.25) * L);
        values += isotropic_gaussian(grid, mass, temperature, mean).values();
    }
    return DistributionState(grid, values);
}

const std::vector<std::string>& suite_names()
{
    static const std::vector<std::string> names{"minmax", "povzner", "truncation", "lemma9",
                                                "change_of_variables", "exchange_prime"};
    return names;
}

namespace {

PropertyCase minmax_suite(const SuiteOptions& o)
{
    return run_chunked("minmax", "x, y log-uniform in [1e-6, 1e6]; k uniform in (1, 8]; lambda uniform in [0, min{1, k/2}]",
                       o, o.tolerance, [](std::mt19937_64& rng) {
                           const double x = log_uniform(rng, 1e-6, 1e6);
                           const double y = log_uniform(rng, 1e-6, 1e6);
                           double k = 0.0;
                           do
                               k = uniform(rng, 1.0, 8.0);
                           while (!(k > 1.0));
                           const double lambda = uniform(rng, 0.0, std::min(1.0, 0.5 * k));
                           const auto m = check_lemma_minmax(x, y, k, lambda);
                           return std::min(m.lower, m.upper) / m.scale;
                       });
}

PropertyCase povzner_suite(const SuiteOptions& o)
{
    return run_chunked("povzner", "v, v* Gaussian with log-uniform scale in [1e-2, 1e2] (v* = v in 1%); sigma uniform; s uniform in (2, 8]; gamma uniform in [0, min{2, s/2}]",
                       o, o.tolerance, [](std::mt19937_64& rng) {
                           const Eigen::Vector3d v = random_velocity(rng);
                           const Eigen::Vector3d vs = uniform(rng, 0.0, 1.0) < 0.01 ? v : random_velocity(rng);
                           const Eigen::Vector3d sigma = random_unit(rng);
                           double s = 0.0;
                           do
                               s = uniform(rng, 2.0, 8.0);
                           while (!(s > 2.0));
                           const double gamma = uniform(rng, 0.0, std::min(2.0, 0.5 * s));
                           const auto m = check_povzner(v, vs, sigma, s, gamma);
                           const double a = m.bracket / m.bracket_scale;
                           const double b = m.plain_scale > 0.0 ? m.plain / m.plain_scale : 0.0;
                           return std::min(a, b);
                       });
}

PropertyCase truncation_suite(const SuiteOptions& o)
{
    // Exact in floating point, so the tolerance is zero.
    return run_chunked("truncation", "x, y, z: zero, repeated or log-uniform in [1e-8, 1e8]",
                       o, 0.0, [](std::mt19937_64& rng) {
                           const auto draw = [&rng]() {
                               const double u = uniform(rng, 0.0, 1.0);
                               if (u < 0.1)
                                   return 0.0;
                               return log_uniform(rng, 1e-8, 1e8);
                           };
                           double x = draw();
                           double y = draw();
                           double z = draw();
                           const double u = uniform(rng, 0.0, 1.0);
                           if (u < 0.05)
                               y = x;
                           else if (u < 0.1)
                               z = x;
                           const auto m = check_truncation_lemma(x, y, z);
                           const double scale = std::max({x, y, z, 1e-300});
                           return std::min({m[0], m[1], m[2]}) / scale;
                       });
}

PropertyCase lemma9_suite(const SuiteOptions& o)
{
    return run_chunked("lemma9", "step profiles with 1-6 pieces, breaks log-uniform, heights in [0, 1]; 0 < p < q <= p + 6; indicator equality case per trial",
                       o, o.tolerance, [](std::mt19937_64& rng) {
                           const int pieces = std::uniform_int_distribution<int>(1, 6)(rng);
                           std::vector<double> breaks{0.0};
                           std::vector<double> heights;
                           for (int i = 0; i < pieces; ++i)
                           {
                               breaks.push_back(breaks.back() + log_uniform(rng, 1e-2, 1e1));
                               heights.push_back(uniform(rng, 0.0, 1.0));
                           }
                           heights.back() = std::max(heights.back(), 1e-3);
                           const double p = uniform(rng, 1e-2, 6.0);
                           const double q = p + uniform(rng, 1e-2, 6.0);
                           const double lhs = radial_power_mean(breaks, heights, p);
                           const double rhs = radial_power_mean(breaks, heights, q);
                           const double general = (rhs - lhs) / rhs;
                           const std::vector<double> ind_breaks{0.0, breaks.back()};
                           const std::vector<double> ind_heights{1.0};
                           const double il = radial_power_mean(ind_breaks, ind_heights, p);
                           const double ir = radial_power_mean(ind_breaks, ind_heights, q);
                           const double equality = -std::abs(il - ir) / ir;
                           return std::min(general, equality);
                       });
}

double default_separable(double r, double c, const Eigen::Vector3d& u)
{
    const Eigen::Vector3d a(0.3, -0.2, 0.1);
    return std::exp(-0.5 * r * r) * (1.0 + c + c * c) * std::exp(-0.5 * (u - a).squaredNorm())
           * (1.0 + u.x() * u.x());
}

double default_quadruple(const Eigen::Vector3d& a, const Eigen::Vector3d& b, const Eigen::Vector3d& c,
                         const Eigen::Vector3d& d)
{
    const Eigen::Vector3d e(0.5, 0.0, 0.0);
    const Eigen::Vector3d g(0.0, -0.4, 0.2);
    return std::exp(-0.5 * (a - e).squaredNorm()) * std::exp(-b.squaredNorm())
           * (1.0 + c.x() * c.x()) * std::exp(-0.5 * c.squaredNorm())
           * std::exp(-(d - g).squaredNorm() / 3.0);
}

PropertyCase monte_carlo_case(const std::string& name, const std::string& sampler,
                              const SuiteOptions& o,
                              const std::vector<MonteCarloComparison>& comparisons)
{
    PropertyCase out;
    out.name = name;
    out.sampler = sampler;
    out.trials = std::max<std::int64_t>(o.trials, 0);
    out.tolerance = 0.0;
    out.seed = o.seed;
    out.worst_margin = std::numeric_limits<double>::infinity();
    bool inconclusive = false;
    for (const auto& c : comparisons)
    {
        out.worst_margin = std::min(out.worst_margin, 3.0 - std::abs(c.z));
        if (c.status == CaseStatus::Fail)
            ++out.violations;
        inconclusive = inconclusive || c.status == CaseStatus::Inconclusive;
    }
    out.note = "margin is 3 - |z| in standard errors of the paired difference";
    if (out.violations > 0)
        out.status = CaseStatus::Fail;
    else if (inconclusive)
        out.status = CaseStatus::Inconclusive;
    else
        out.status = CaseStatus::Pass;
    if (out.trials == 0)
    {
        out.status = CaseStatus::Pass;
        out.worst_margin = std::numeric_limits<double>::infinity();
        out.note = "no trials run (vacuous pass)";
    }
    return out;
}

} // namespace

PropertyCase run_suite(const std::string& name, const SuiteOptions& options)
{
    if (name == "minmax")
        return minmax_suite(options);
    if (name == "povzner")
        return povzner_suite(options);
    if (name == "truncation")
        return truncation_suite(options);
    if (name == "lemma9")
        return lemma9_suite(options);
    if (name == "change_of_variables")
    {
        if (options.trials <= 0)
            return monte_carlo_case(name, "", options, {});
        const Eigen::Vector3d v(0.4, 0.1, -0.3);
        const auto restricted = [](double r, double c, const Eigen::Vector3d& u) {
            return c <= 0.5 ? default_separable(r, c, u) : 0.0;
        };
        return monte_carlo_case(
            name, "z ~ N(0, I), sigma uniform; smooth W and W restricted to sin(theta/2) >= 1/2; v' and v*' forms",
            options,
            {check_change_of_variables(default_separable, v, PostVelocity::Prime, options.trials, options.seed),
             check_change_of_variables(default_separable, v, PostVelocity::StarPrime, options.trials, options.seed + 1),
             check_change_of_variables(restricted, v, PostVelocity::Prime, options.trials, options.seed + 2),
             check_change_of_variables(restricted, v, PostVelocity::StarPrime, options.trials, options.seed + 3)});
    }
    if (name == "exchange_prime")
    {
        if (options.trials <= 0)
            return monte_carlo_case(name, "", options, {});
        return monte_carlo_case(
            name, "v, v* ~ N(0, 2.25 I), sigma uniform; hard-sphere and Yukawa kernels", options,
            {check_exchange_prime(KernelSpec::hard_sphere(), default_quadruple, options.trials, options.seed),
             check_exchange_prime(KernelSpec::yukawa(), default_quadruple, options.trials, options.seed + 1)});
    }
    throw InputError("unknown suite: " + name);
}

} // namespace bosekin
