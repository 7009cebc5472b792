#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "bosekin/bounds.hpp"
#include "bosekin/collide.hpp"
#include "bosekin/verify.hpp"

#include <numbers>
#include <random>

using namespace bosekin;
using Eigen::ArrayXd;
using Eigen::Vector3d;

namespace {

const double pi = std::numbers::pi;

CollisionOperator hard_sphere_op(int points, double extent = 4.0, int polar = 4, int azimuthal = 8)
{
    return CollisionOperator(KernelSpec::hard_sphere(), VelocityGrid(extent, points),
                             AngularQuadrature::product(polar, azimuthal));
}

ArrayXd random_field(const VelocityGrid& g, std::mt19937_64& rng, double top = 1.0)
{
    std::uniform_real_distribution<double> u(0.0, top);
    ArrayXd x(g.size());
    for (auto& y : x)
        y = u(rng);
    return x;
}

/// Serial reference for gain, loss and loss rate, one (v, v*, sigma) triple at a time.
CollisionResult brute_force(const CollisionOperator& op, const ArrayXd& f, const CutoffParams& c)
{
    const VelocityGrid& g = op.grid();
    CollisionResult r;
    r.gain = ArrayXd::Zero(g.size());
    r.loss_rate = ArrayXd::Zero(g.size());
    op.for_each_collision([&](const CollisionSample& s) {
        const double a = interpolate(g, f, s.v_prime);
        const double b = interpolate(g, f, s.v_star_prime);
        const double B = std::min(s.kernel, c.n);
        const double fq = std::min(f[s.q], c.n);
        r.gain[s.p] += s.weight * B * std::min(a, c.n) * std::min(b, c.n) * (1 + std::min(f[s.p], c.K) + std::min(f[s.q], c.K));
        r.loss_rate[s.p] += s.weight * B * fq * (1 + std::min(a, c.K) + std::min(b, c.K));
    });
    r.loss = f.min(c.n) * r.loss_rate;
    r.net = r.gain - r.loss;
    return r;
}

double rel_max(const ArrayXd& a, const ArrayXd& b)
{
    return (a - b).abs().maxCoeff() / std::max(1e-300, b.abs().maxCoeff());
}

} // namespace

TEST_CASE("optimized sweep matches the serial triple loop")
{
    std::mt19937_64 rng(1);
    for (const KernelSpec& spec : {KernelSpec::hard_sphere(), KernelSpec::yukawa()})
    {
        for (auto [p, a] : {std::pair{4, 8}, std::pair{3, 5}})
        {
            const CollisionOperator op(spec, VelocityGrid(2.0, 6), AngularQuadrature::product(p, a));
            const ArrayXd f = random_field(op.grid(), rng, 0.8);
            for (const CutoffParams c : {CutoffParams::original(), CutoffParams::intermediate(0.3),
                                         CutoffParams::cutoff(0.5, 0.2)})
            {
                const CollisionResult fast = op.evaluate(f, c);
                const CollisionResult slow = brute_force(op, f, c);
                CHECK(rel_max(fast.gain, slow.gain) < 1e-12);
                CHECK(rel_max(fast.loss_rate, slow.loss_rate) < 1e-12);
                CHECK(rel_max(fast.loss, slow.loss) < 1e-12);
                CHECK((fast.net == fast.gain - fast.loss).all());
                CHECK(fast.velocity_nodes == op.grid().size());
                CHECK(fast.angle_nodes == op.quadrature().size());
            }
        }
    }
}

TEST_CASE("evaluation is independent of the thread count")
{
    CollisionOperator op = hard_sphere_op(8);
    std::mt19937_64 rng(2);
    const ArrayXd f = random_field(op.grid(), rng);
    op.set_threads(1);
    const CollisionResult a = op.evaluate(f, CutoffParams::intermediate(0.2));
    op.set_threads(3);
    const CollisionResult b = op.evaluate(f, CutoffParams::intermediate(0.2));
    CHECK((a.gain == b.gain).all());
    CHECK((a.loss == b.loss).all());
}

TEST_CASE("bilinear gain")
{
    const CollisionOperator op = hard_sphere_op(10);
    const VelocityGrid& g = op.grid();
    SUBCASE("zero inputs")
    {
        const DistributionState z(g, ArrayXd::Zero(g.size()));
        CHECK((q_plus_bilinear(op, z, z) == 0.0).all());
    }
    SUBCASE("symmetry on random pairs")
    {
        std::mt19937_64 rng(3);
        for (int t = 0; t < 5; ++t)
        {
            const DistributionState f(g, random_field(g, rng)), h(g, random_field(g, rng, 3.0));
            const ArrayXd fh = q_plus_bilinear(op, f, h), hf = q_plus_bilinear(op, h, f);
            REQUIRE((fh - hf).abs().maxCoeff() <= 1e-12 * fh.abs().maxCoeff());
        }
    }
    SUBCASE("diagonal matches the gain of Q(f) without enhancement")
    {
        const DistributionState f = isotropic_gaussian(g, 1.0, 0.5);
        const ArrayXd a = q_plus_bilinear(op, f, f);
        const ArrayXd quadratic = op.gain_bilinear(f.values(), f.values(), [](double r, double) { return r; });
        CHECK(rel_max(a, quadratic) < 1e-13);
    }
    SUBCASE("grid mismatch")
    {
        const DistributionState f(VelocityGrid(4.0, 8), ArrayXd::Zero(512));
        CHECK_THROWS_AS(q_plus_bilinear(op, f, f), InputError);
    }
}

TEST_CASE("bilinear gain at the center node against a Monte-Carlo estimate")
{
    // Same discretization (v* on grid nodes, trilinear f(v'), f(v*')) but
    // sigma drawn uniformly on the sphere instead of from the product rule.
    const CollisionOperator op = hard_sphere_op(16, 4.0, 8, 16);
    const VelocityGrid& g = op.grid();
    const DistributionState f = isotropic_gaussian(g, 1.0, 1.0);
    const Eigen::Index p = g.index(8, 8, 8);
    const double value = q_plus_bilinear(op, f, f)[p];

    std::mt19937_64 rng(20240601);
    std::uniform_int_distribution<Eigen::Index> node(0, g.size() - 1);
    std::normal_distribution<double> normal;
    const double scale = g.size() * g.cell_volume() * 4 * pi;
    const Vector3d v = g.node(p);
    const int samples = 2'000'000;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < samples; ++i)
    {
        const Vector3d vs = g.node(node(rng));
        Vector3d s(normal(rng), normal(rng), normal(rng));
        s.normalize();
        const double r = (v - vs).norm();
        const Vector3d c = 0.5 * (v + vs);
        const double x = scale * r * interpolate(g, f.values(), c + 0.5 * r * s) * interpolate(g, f.values(), c - 0.5 * r * s);
        sum += x;
        sum2 += x * x;
    }
    const double mean = sum / samples;
    const double se = std::sqrt((sum2 / samples - mean * mean) / (samples - 1));
    MESSAGE("Q+(f,f)(v0) = " << value << ", Monte Carlo " << mean << " +- " << se);
    CHECK(std::abs(value - mean) <= 3 * se);
    CHECK(se < 2e-3 * mean);
}

TEST_CASE("gain and loss with and without truncation")
{
    const CollisionOperator op = hard_sphere_op(10);
    const VelocityGrid& g = op.grid();
    std::mt19937_64 rng(4);

    SUBCASE("inactive K ceiling leaves the operators unchanged")
    {
        const DistributionState f(g, random_field(g, rng, 1e-2));
        const CollisionResult a = collide(op, f), b = collide(op, f, CutoffParams::intermediate(1e3));
        CHECK((a.gain == b.gain).all());
        CHECK((a.loss == b.loss).all());
        const CollisionResult k = collide(op, f, CutoffParams::intermediate(5e-3));
        const double bound = 2 * f.values().maxCoeff();
        CHECK(((a.gain - k.gain).abs() <= bound * a.gain + 1e-300).all());
        CHECK(((a.loss - k.loss).abs() <= bound * a.loss + 1e-300).all());
    }
    SUBCASE("K ceilings at or above max f give identical fields")
    {
        const DistributionState f(g, random_field(g, rng, 0.4));
        const ArrayXd small = l_k(op, f, 0.4), large = l_k(op, f, 40.0);
        CHECK((small - large).abs().maxCoeff() <= 1e-14 * large.maxCoeff());
    }
    SUBCASE("truncation is monotone")
    {
        for (int t = 0; t < 3; ++t)
        {
            const DistributionState f(g, random_field(g, rng, 2.0));
            const ArrayXd full = q_gain(op, f);
            const ArrayXd k = q_gain(op, f, CutoffParams::intermediate(0.5));
            const ArrayXd nk = q_gain(op, f, CutoffParams::cutoff(1.0, 0.5));
            REQUIRE((nk <= k * (1 + 1e-14)).all());
            REQUIRE((k <= full * (1 + 1e-14)).all());
            REQUIRE((nk >= 0.0).all());
        }
    }
    SUBCASE("loss is f times L_K")
    {
        const DistributionState f(g, random_field(g, rng));
        const double K = 0.3;
        const ArrayXd loss = q_loss(op, f, CutoffParams::intermediate(K));
        CHECK((loss == f.values() * l_k(op, f, K)).all());
    }
    SUBCASE("zero state")
    {
        const DistributionState z(g, ArrayXd::Zero(g.size()));
        CHECK((l_k(op, z, 0.1) == 0.0).all());
        const CollisionResult r = collide(op, z);
        CHECK((r.gain == 0.0).all());
        CHECK((r.loss == 0.0).all());
    }
    SUBCASE("negative values are rejected")
    {
        ArrayXd x = ArrayXd::Zero(g.size());
        x[5] = -1.0;
        CHECK_THROWS_AS(op.evaluate(x, {}), InputError);
    }
    SUBCASE("invalid ceilings")
    {
        const DistributionState z(g, ArrayXd::Zero(g.size()));
        CHECK_THROWS_AS(collide(op, z, CutoffParams::cutoff(-1.0, 1.0)), InputError);
        CHECK_THROWS_AS(l_k(op, z, 0.0), InputError);
    }
    SUBCASE("cutoff family labels")
    {
        CHECK(CutoffParams::original().family() == CutoffParams::Family::Original);
        CHECK(CutoffParams::intermediate(1).family() == CutoffParams::Family::Intermediate);
        CHECK(CutoffParams::cutoff(1, 1).family() == CutoffParams::Family::Cutoff);
    }
}

TEST_CASE("single occupied cell")
{
    const CollisionOperator op = hard_sphere_op(12);
    const VelocityGrid& g = op.grid();
    ArrayXd x = ArrayXd::Zero(g.size());
    const Eigen::Index c = g.index(5, 6, 7);
    x[c] = 1.0;
    const CollisionResult r = collide(op, DistributionState(g, x));
    // Interpolation spreads the cell over its neighbours, so the gain is small
    // and local rather than zero.
    const double far_gain = [&] {
        double m = 0.0;
        for (Eigen::Index p = 0; p < g.size(); ++p)
            if ((g.node(p) - g.node(c)).norm() > 2.0 * g.spacing())
                m = std::max(m, r.gain[p]);
        return m;
    }();
    CHECK(far_gain <= 1e-14);
    const double l11 = weighted_l1(g, x, 1.0);
    const double bound = 4 * pi * op.kernel().effective_b() * l11 * l11;
    MESSAGE("single-cell gain mass " << r.gain.sum() * g.cell_volume() << " against " << bound);
    CHECK(r.gain.sum() * g.cell_volume() <= bound);
    CHECK((r.gain >= 0.0).all());
}

TEST_CASE("weak form")
{
    const CollisionOperator op = hard_sphere_op(8);
    const VelocityGrid& g = op.grid();
    const DistributionState f = isotropic_gaussian(g, 1.0, 0.6, {0.2, -0.1, 0.0});
    const CutoffParams c = CutoffParams::intermediate(k_star(3.0));
    CHECK(weak_form_pairing(op, f, [](const Vector3d&) { return 1.0; }, c) == 0.0);

    const double energy = weak_form_pairing(op, f, [](const Vector3d& v) { return v.squaredNorm(); }, c);
    const double loss_scale = (q_loss(op, f, c) * sample(g, [](const Vector3d& v) { return v.squaredNorm(); })).sum() * g.cell_volume();
    MESSAGE("energy pairing " << energy << ", loss-side scale " << loss_scale);
    CHECK(std::abs(energy) <= 1e-12 * loss_scale);

    const double third = weak_form_pairing(op, f, [](const Vector3d& v) { return std::pow(1 + v.squaredNorm(), 1.5); }, c);
    const MomentVector m = moments(f);
    const double povzner = (1 + 2 * c.K) * std::pow(2.0, 3.5) * 4 * pi * op.kernel().effective_b() * m.l1s[2] * m.l1s[2];
    MESSAGE("<v>^3 pairing " << third << " against " << povzner);
    CHECK(std::isfinite(third));
    CHECK(third <= povzner);
}

TEST_CASE("bilinear form agrees with the discrete weak form of the gain")
{
    const CollisionOperator op = hard_sphere_op(8);
    const VelocityGrid& g = op.grid();
    const DistributionState f = isotropic_gaussian(g, 1.0, 0.5);
    const ArrayXd phi = sample(g, [](const Vector3d& v) { return 1.0 + v.squaredNorm(); });
    const double direct = (q_plus_bilinear(op, f, f) * phi).sum();
    double triple = 0.0;
    op.for_each_collision([&](const CollisionSample& s) {
        triple += s.weight * s.kernel * interpolate(g, f.values(), s.v_prime) * interpolate(g, f.values(), s.v_star_prime) * phi[s.p];
    });
    CHECK(direct == doctest::Approx(triple).epsilon(1e-11));
}

TEST_CASE("gain bounds on random mixtures")
{
    const CollisionOperator op = hard_sphere_op(10);
    std::mt19937_64 rng(5);
    for (int t = 0; t < 4; ++t)
    {
        const DistributionState f = random_mixture(op.grid(), rng);
        for (const BoundCheck& b : check_gain_bounds(op, f))
        {
            INFO(b.name << " margin " << b.margin);
            CHECK(b.pass);
        }
        const DistributionState h = random_mixture(op.grid(), rng);
        const BoundCheck w0 = check_weighted_gain_bound(op, f, h, 0, 0, 1);
        const BoundCheck w2 = check_weighted_gain_bound(op, f, h, 2, 0, 1);
        CHECK(w0.pass);
        CHECK(w2.pass);
        const DistributionState z(op.grid(), ArrayXd::Zero(op.grid().size()));
        const BoundCheck wz = check_weighted_gain_bound(op, f, z, 0, 0, 1);
        CHECK(wz.value == 0.0);
        CHECK(wz.margin == 1.0);
    }
}

TEST_CASE("iterated and fourth-order bounds")
{
    const CollisionOperator op = hard_sphere_op(8);
    std::mt19937_64 rng(6);
    const DistributionState f = random_mixture(op.grid(), rng);
    const DistributionState g = random_mixture(op.grid(), rng);
    const DistributionState h = random_mixture(op.grid(), rng);
    const BoundCheck it = check_iterated_bound(op, f, g, h);
    const BoundCheck four = check_fourth_order_bound(op, f, g, h);
    INFO("iterated margin " << it.margin << ", fourth-order margin " << four.margin);
    CHECK(it.pass);
    CHECK(four.pass);
}

TEST_CASE("contraction estimate")
{
    const CollisionOperator op = hard_sphere_op(6, 3.0, 2, 4);
    std::mt19937_64 rng(7);
    for (int t = 0; t < 3; ++t)
    {
        const DistributionState f(op.grid(), random_field(op.grid(), rng, 2.0));
        const DistributionState g(op.grid(), random_field(op.grid(), rng, 2.0));
        const BoundCheck b = check_contraction_estimate(op, f, g, 1.0, k_star(3.0));
        INFO("margin " << b.margin);
        CHECK(b.pass);
    }
}

TEST_CASE("coercivity floor on centered Gaussians")
{
    const CollisionOperator op = hard_sphere_op(12);
    for (double T : {0.3, 0.6, 1.0})
    {
        const DistributionState f = isotropic_gaussian(op.grid(), 0.5, T);
        const CoercivityReport r = check_coercivity(op, f, k_star(3.0));
        INFO("T = " << T << ", min ratio " << r.min_ratio);
        CHECK(r.pass);
        const CoercivityReport tiny = check_coercivity(op, f, 1e-9);
        CHECK(tiny.floor == r.floor);
        CHECK(tiny.pass);
    }
    const DistributionState shifted = isotropic_gaussian(op.grid(), 0.5, 0.5, {1.0, 0.0, 0.0});
    CHECK_THROWS_AS(check_coercivity(op, shifted, 0.1), InputError);
}
