#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "bosekin/bounds.hpp"
#include "bosekin/march.hpp"

#include <numbers>

using namespace bosekin;
using Eigen::ArrayXd;

namespace {

const double pi = std::numbers::pi;

CollisionResult result_of(ArrayXd gain, ArrayXd loss_rate, const ArrayXd& f)
{
    CollisionResult r;
    r.gain = std::move(gain);
    r.loss_rate = std::move(loss_rate);
    r.loss = f * r.loss_rate;
    r.net = r.gain - r.loss;
    return r;
}

CollisionModel stub(std::function<CollisionResult(const ArrayXd&)> fn)
{
    return [fn](const ArrayXd& f, const CutoffParams&) { return fn(f); };
}

double rel_l1(const ArrayXd& a, const ArrayXd& b)
{
    return (a - b).abs().sum() / b.abs().sum();
}

} // namespace

TEST_CASE("contraction interval")
{
    const double expected = 1.0 / (16.0 * (1.0 + 1.0 / 9.0 + std::pow(2.0, 1.5)) * 4.0 * pi);
    CHECK(contraction_interval(1.0 / 18.0, 1.0, 1.0) == doctest::Approx(expected).epsilon(1e-15));
    CHECK(expected == doctest::Approx(1.2624809492525214e-3).epsilon(1e-14));
    CHECK(contraction_interval(0.2, 2.0, 0.7) == doctest::Approx(0.5 * contraction_interval(0.2, 1.0, 0.7)).epsilon(1e-15));
    double previous = contraction_interval(1.0, 1.0, 1.0);
    for (double K : {1e2, 1e4, 1e8})
    {
        const double t = contraction_interval(K, 1.0, 1.0);
        CHECK(t < previous);
        previous = t;
    }
    CHECK(previous < 1e-10);
    CHECK_THROWS_AS(contraction_interval(0.0, 1.0, 1.0), InputError);
    CHECK_THROWS_AS(contraction_interval(1.0, -1.0, 1.0), InputError);
    CHECK_THROWS_AS(contraction_interval(1.0, 1.0, unbounded), InputError);
}

TEST_CASE("Picard stubs")
{
    const VelocityGrid g(2.0, 6);
    const DistributionState f = isotropic_gaussian(g, 1.0, 0.4);
    const SolverConfig cfg;
    SUBCASE("zero collision term is a fixed point after one sweep")
    {
        const auto zero = stub([](const ArrayXd& x) { return result_of(ArrayXd::Zero(x.size()), ArrayXd::Zero(x.size()), x); });
        const PicardOutcome o = picard_step(zero, f, CutoffParams::cutoff(1.0, 0.1), cfg);
        CHECK(o.iterations == 1);
        CHECK((o.state.values() == f.values()).all());
        CHECK(o.state.time() == doctest::Approx(contraction_interval(0.1, 1.0, 1.0)));
    }
    SUBCASE("budget exhausted")
    {
        const auto growth = stub([](const ArrayXd& x) { return result_of(x, ArrayXd::Zero(x.size()), x); });
        SolverConfig one = cfg;
        one.picard_max_iter = 2;
        CHECK_THROWS_AS(picard_step(growth, f, CutoffParams::cutoff(1.0, 0.1), one, 0.5), NonConvergenceError);
    }
    SUBCASE("expanding map is rejected")
    {
        const auto blowup = stub([](const ArrayXd& x) { return result_of(50.0 * x * x.maxCoeff(), ArrayXd::Zero(x.size()), x); });
        CHECK_THROWS_AS(picard_step(blowup, f, CutoffParams::cutoff(1.0, 0.1), cfg, 1.0), ContractionViolationError);
    }
    SUBCASE("infinite n is rejected")
    {
        const auto zero = stub([](const ArrayXd& x) { return result_of(ArrayXd::Zero(x.size()), ArrayXd::Zero(x.size()), x); });
        CHECK_THROWS_AS(picard_step(zero, f, CutoffParams::intermediate(0.1), cfg), InputError);
    }
}

TEST_CASE("Picard on the collision operator")
{
    const CollisionOperator op(KernelSpec::hard_sphere(), VelocityGrid(3.0, 8), AngularQuadrature::product(4, 8));
    const DistributionState f = isotropic_gaussian(op.grid(), 0.05, 0.4);
    const CutoffParams params = CutoffParams::cutoff(1.0, k_star(3.0));
    SolverConfig cfg;
    cfg.scheme = Scheme::PicardCutoff;
    const PicardOutcome o = picard_step(model_of(op), f, params, cfg);
    CHECK(o.iterations >= 2);
    for (double r : o.ratios)
        CHECK(r <= 0.5);
    CHECK(o.interval == doctest::Approx(contraction_interval(params.K, 1.0, moments(f).m0)));

    SUBCASE("endpoint matches a fine explicit Euler reference")
    {
        const int steps = 64;
        DistributionState e = f;
        for (int i = 0; i < steps; ++i)
            e = euler_step(model_of(op), e, params, o.interval / steps).state;
        const double diff = rel_l1(o.state.values(), e.values());
        MESSAGE("Picard vs Euler(T_n/64): " << diff);
        CHECK(diff <= 1e-6);
    }
}

TEST_CASE("Duhamel update formula")
{
    const ArrayXd f = ArrayXd::LinSpaced(7, 0.1, 0.7);
    SUBCASE("pure decay")
    {
        const ArrayXd out = duhamel_update(f, ArrayXd::Zero(7), ArrayXd::Constant(7, 2.5), 0.3);
        CHECK(((out - f * std::exp(-0.75)).abs() <= 1e-15).all());
    }
    SUBCASE("vanishing loss rate gives a forward gain step")
    {
        const ArrayXd gain = ArrayXd::LinSpaced(7, 1.0, 2.0);
        const ArrayXd out = duhamel_update(f, gain, ArrayXd::Constant(7, 1e-16), 0.1);
        CHECK(((out - (f + 0.1 * gain)).abs() <= 1e-15).all());
        const ArrayXd near = duhamel_update(f, gain, ArrayXd::Constant(7, 1e-9), 0.1);
        CHECK(((near - (f + 0.1 * gain)).abs() <= 1e-9).all());
    }
    SUBCASE("equilibrium is a fixed point")
    {
        const ArrayXd L = ArrayXd::LinSpaced(7, 0.5, 4.0);
        const ArrayXd out = duhamel_update(f, f * L, L, 0.37);
        CHECK(((out - f).abs() <= 1e-13 * f).all());
    }
    SUBCASE("bad input")
    {
        CHECK_THROWS_AS(duhamel_update(f, f, f, 0.0), InputError);
        CHECK_THROWS_AS(duhamel_update(f, ArrayXd::Zero(3), f, 0.1), InputError);
    }
    SUBCASE("step through a stub model")
    {
        const VelocityGrid g(1.0, 4);
        const DistributionState s(g, ArrayXd::Constant(g.size(), 0.2), 0.5);
        const auto decay = stub([](const ArrayXd& x) { return result_of(ArrayXd::Zero(x.size()), ArrayXd::Constant(x.size(), 3.0), x); });
        const DistributionState n = duhamel_step(decay, s, 0.1, 0.25);
        CHECK(n.time() == 0.75);
        CHECK(n.values()[0] == doctest::Approx(0.2 * std::exp(-0.75)).epsilon(1e-15));
    }
}

TEST_CASE("run bookkeeping")
{
    const CollisionOperator op(KernelSpec::hard_sphere(), VelocityGrid(3.0, 8), AngularQuadrature::product(4, 8));
    const DistributionState f = isotropic_gaussian(op.grid(), 0.2, 0.4);
    const CutoffParams params = CutoffParams::intermediate(k_star(3.0));

    SUBCASE("t_end = 0 gives the initial record only")
    {
        SolverConfig cfg;
        cfg.t_end = 0.0;
        const Trajectory t = run(op, f, params, cfg);
        REQUIRE(t.records.size() == 1);
        CHECK(t.records[0].time == 0.0);
        CHECK(t.records[0].drift.mass == 0.0);
        CHECK(t.steps == 0);
    }
    SUBCASE("records land on output times and monitors are evaluated")
    {
        SolverConfig cfg;
        cfg.t_end = 0.25;
        cfg.dt = 1.0 / 32.0;
        cfg.dt_output = 0.1;
        const MomentVector m0 = moments(f);
        const std::vector<Monitor> monitors{moment_envelope_monitor(m0, 1.0, params.K, 1.05),
                                            l13_uniform_monitor(m0, c1_constant(m0, op.kernel(), params.K), 1.05)};
        int snapshots = 0;
        const Trajectory t = run(op, f, params, cfg, monitors, [&](const DistributionState&) { ++snapshots; });
        REQUIRE(t.records.size() == 4);
        CHECK(t.records[1].time == 0.1);
        CHECK(t.records[2].time == 0.2);
        CHECK(t.records[3].time == 0.25);
        for (std::size_t i = 1; i < t.records.size(); ++i)
            CHECK(t.records[i].time > t.records[i - 1].time);
        CHECK(snapshots == 4);
        CHECK(t.clamped_mass == 0.0);
        CHECK(t.all_monitors_pass());
        CHECK(t.records.back().flags.size() == 2);
        CHECK((t.final_state.values() >= 0.0).all());
    }
    SUBCASE("non-finite collision terms abort with the last good state")
    {
        SolverConfig cfg;
        cfg.t_end = 0.1;
        cfg.dt = 0.05;
        int calls = 0;
        const CollisionModel bad = [&](const ArrayXd& x, const CutoffParams&) {
            ++calls;
            ArrayXd gain = ArrayXd::Zero(x.size());
            if (calls > 1)
                gain[0] = std::numeric_limits<double>::quiet_NaN();
            return result_of(gain, ArrayXd::Zero(x.size()), x);
        };
        try
        {
            run(bad, f, params, cfg);
            FAIL("expected a breakdown");
        }
        catch (const NumericalBreakdownError& e)
        {
            CHECK(e.last_good().time() == doctest::Approx(0.05));
        }
    }
    SUBCASE("renormalization restores mass and energy")
    {
        SolverConfig cfg;
        cfg.t_end = 0.1;
        cfg.dt = 0.05;
        cfg.renormalize_conservation = true;
        const Trajectory t = run(op, f, params, cfg);
        CHECK(std::abs(t.records.back().drift.mass) < 1e-10);
        CHECK(std::abs(t.records.back().drift.energy) < 1e-10);
        CHECK(t.renormalizations.size() == 2);
    }
    SUBCASE("invalid configuration")
    {
        SolverConfig cfg;
        cfg.picard_tol = 0.0;
        CHECK_THROWS_AS(run(op, f, params, cfg), InputError);
        SolverConfig picard;
        picard.scheme = Scheme::PicardCutoff;
        CHECK_THROWS_AS(run(op, f, params, picard), InputError);
    }
}

TEST_CASE("Duhamel self-convergence is first order")
{
    const CollisionOperator op(KernelSpec::hard_sphere(), VelocityGrid(3.0, 8), AngularQuadrature::product(4, 8));
    const DistributionState f = anisotropic_gaussian(op.grid(), 0.1, {0.3, 0.5, 0.4});
    const CutoffParams params = CutoffParams::intermediate(k_star(3.0));
    std::vector<ArrayXd> ends;
    for (double dt : {1.0 / 16, 1.0 / 32, 1.0 / 64, 1.0 / 128})
    {
        SolverConfig cfg;
        cfg.t_end = 0.5;
        cfg.dt_output = 0.5;
        cfg.dt = dt;
        const Trajectory t = run(op, f, params, cfg);
        CHECK(t.clamped_mass == 0.0);
        ends.push_back(t.final_state.values());
    }
    const double d1 = rel_l1(ends[0], ends[1]);
    const double d2 = rel_l1(ends[1], ends[2]);
    const double d3 = rel_l1(ends[2], ends[3]);
    MESSAGE("successive differences " << d1 << " " << d2 << " " << d3);
    CHECK(d1 / d2 == doctest::Approx(2.0).epsilon(0.15));
    CHECK(d2 / d3 == doctest::Approx(2.0).epsilon(0.15));
}

TEST_CASE("Picard and Duhamel agree when truncations are inactive")
{
    const CollisionOperator op(KernelSpec::hard_sphere(), VelocityGrid(3.0, 8), AngularQuadrature::product(4, 8));
    const DistributionState f = isotropic_gaussian(op.grid(), 0.05, 0.4);
    const double K = k_star(3.0);
    // n above 10 max f and above the largest relative speed, so B ^ n = B.
    const double n = std::max(10.0 * f.values().maxCoeff(), 2.0 * std::sqrt(3.0) * op.grid().extent());
    SolverConfig cfg;
    cfg.t_end = 0.1;
    cfg.dt_output = 0.1;
    cfg.dt = 1.0 / 512.0;
    const Trajectory duhamel = run(op, f, CutoffParams::intermediate(K), cfg);
    cfg.scheme = Scheme::PicardCutoff;
    const Trajectory picard = run(op, f, CutoffParams::cutoff(n, K), cfg);
    const double diff = rel_l1(picard.final_state.values(), duhamel.final_state.values());
    MESSAGE("Picard vs Duhamel at t = 0.1: " << diff << " (Picard steps " << picard.steps << ")");
    CHECK(diff <= 1e-3);
    for (double r : picard.picard_ratios)
        CHECK(r <= 0.5);
}

TEST_CASE("renormalize")
{
    const VelocityGrid g(3.0, 10);
    const DistributionState f = isotropic_gaussian(g, 1.0, 0.5);
    const auto [h, factors] = renormalize(f, 1.1, 1.6);
    const MomentVector m = moments(h);
    CHECK(m.m0 == doctest::Approx(1.1).epsilon(1e-12));
    CHECK(m.m2 == doctest::Approx(1.6).epsilon(1e-12));
    CHECK(factors.first > 0.0);
}
