#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "bosekin/bounds.hpp"
#include "bosekin/march.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <numbers>
#include <random>

using namespace bosekin;
using big = boost::multiprecision::cpp_bin_float_50;

namespace {

MomentVector moment_vector(double m0, double m2, double l13, double linf)
{
    MomentVector m;
    m.m0 = m0;
    m.m2 = m2;
    m.l1s = {m0, 0.5 * (m0 + l13), std::max(m2, 0.5 * (m0 + l13)), l13};
    m.linf = linf;
    return m;
}

MomentVector scaled(MomentVector m, double lambda)
{
    m.m0 *= lambda;
    m.m2 *= lambda;
    m.m1 *= lambda;
    for (double& x : m.l1s)
        x *= lambda;
    m.linf *= lambda;
    m.l2 *= lambda;
    return m;
}

big predicted_sup_50(const MomentVector& m, double beta, double a, double b)
{
    const big B = beta;
    const big ratio = big(m.l1s[3]) / std::min(big(m.l1s[0]), big(m.m2));
    return pow(big(2), 35 * B) * pow(big(b) / big(a), 2 * (B + 1)) * pow((2 * B + 2) / (2 * B + 3), 2 * B - 2)
           * pow(ratio, 4 * B) * (big(m.l1s[0]) + big(m.linf));
}

} // namespace

TEST_CASE("condition right-hand side for beta = 3, a = b")
{
    const double expected = std::exp(-94 * std::log(2.0) + 7 * std::log(14.0) - 8 * std::log(16.0));
    CHECK(std::exp(log_condition_rhs(3.0, 1.0)) == doctest::Approx(expected).epsilon(1e-13));
    CHECK(expected == doctest::Approx(1.2391297845238261e-30).epsilon(1e-14));
    const big exact = pow(big(2), -94) * pow(big(14), 7) / pow(big(16), 8);
    CHECK(std::abs(static_cast<double>(exact) / expected - 1) < 1e-14);
}

TEST_CASE("Yukawa constants move the right-hand side by 32^(2(beta+1))")
{
    for (double beta : {3.0, 4.0, 7.5})
        CHECK(log_condition_rhs(beta, 1.0) - log_condition_rhs(beta, 1.0 / 32.0)
              == doctest::Approx(2 * (beta + 1) * std::log(32.0)).epsilon(1e-13));
}

TEST_CASE("condition left-hand side")
{
    const MomentVector m = moment_vector(1.3, 0.9, 4.0, 0.2);
    const double expected = (1.3 + 0.2) * std::pow(4.0 / 0.9, 12.0);
    CHECK(std::exp(log_condition_lhs(m, 3.0)) == doctest::Approx(expected).epsilon(1e-13));

    SUBCASE("linear in lambda, so a threshold exists")
    {
        const KernelSpec spec = KernelSpec::hard_sphere();
        for (double lambda : {1e-20, 1e-5, 3.0})
            CHECK(log_condition_lhs(scaled(m, lambda), 3.0) - log_condition_lhs(m, 3.0)
                  == doctest::Approx(std::log(lambda)).epsilon(1e-12));
        const double threshold = std::exp(log_condition_rhs(3.0, 1.0) - log_condition_lhs(m, 3.0));
        CHECK(evaluate_condition(scaled(m, 0.99 * threshold), spec).condition_holds);
        CHECK(!evaluate_condition(scaled(m, 1.01 * threshold), spec).condition_holds);
    }
    SUBCASE("monotone in each argument")
    {
        const double base = log_condition_lhs(m, 4.0);
        CHECK(log_condition_lhs(moment_vector(1.3, 0.9, 4.0, 0.3), 4.0) > base);
        CHECK(log_condition_lhs(moment_vector(1.3, 0.9, 4.5, 0.2), 4.0) > base);
        CHECK(log_condition_lhs(moment_vector(1.4, 0.9, 4.0, 0.2), 4.0) > base);
        CHECK(log_condition_lhs(moment_vector(1.3, 1.0, 4.0, 0.2), 4.0) < base);
    }
    SUBCASE("M2 = 0 is rejected")
    {
        CHECK_THROWS_AS(log_condition_lhs(moment_vector(1.0, 0.0, 2.0, 0.1), 3.0), InputError);
        CHECK_THROWS_AS(evaluate_condition(moment_vector(1.0, 0.0, 2.0, 0.1), KernelSpec::hard_sphere()), InputError);
    }
}

TEST_CASE("predicted ceiling")
{
    SUBCASE("beta = 4 Yukawa with unit moments against 50-digit arithmetic")
    {
        const MomentVector m = moment_vector(1.0, 1.0, 1.0, 1.0);
        const KernelSpec spec = KernelSpec::yukawa();
        const big exact = predicted_sup_50(m, 4.0, 1.0 / 8.0, 4.0);
        CHECK(exact == pow(big(2), 191) * pow(big(10) / big(11), 6));
        CHECK(std::abs(predicted_sup(m, spec) / static_cast<double>(exact) - 1) < 1e-12);
    }
    SUBCASE("random moment vectors against 50-digit arithmetic")
    {
        std::mt19937_64 rng(12);
        std::uniform_real_distribution<double> u(-3.0, 3.0);
        for (int i = 0; i < 200; ++i)
        {
            const double m0 = std::exp(u(rng)), m2 = std::exp(u(rng));
            const MomentVector m = moment_vector(m0, m2, std::max(m0, m2) * std::exp(std::abs(u(rng))), std::exp(u(rng)));
            const double beta = 3.0 + std::abs(u(rng));
            const KernelSpec spec = KernelSpec::hard_sphere(beta);
            const big exact = predicted_sup_50(m, beta, 1.0, 1.0);
            const double log_exact = static_cast<double>(log(exact));
            REQUIRE(std::abs(log_predicted_sup(m, spec) - log_exact) <= 1e-12 * std::abs(log_exact));
            if (log_exact < 700)
                REQUIRE(std::abs(predicted_sup(m, spec) / static_cast<double>(exact) - 1) < 1e-12);
        }
    }
    SUBCASE("dominates the initial sup norm and scales linearly")
    {
        const KernelSpec spec = KernelSpec::hard_sphere();
        const MomentVector m = moment_vector(0.7, 0.4, 1.9, 0.05);
        CHECK(predicted_sup(m, spec) >= m.linf);
        CHECK(predicted_sup(scaled(m, 1e-3), spec) == doctest::Approx(1e-3 * predicted_sup(m, spec)).epsilon(1e-12));
    }
    SUBCASE("large beta stays finite in log space")
    {
        const MomentVector m = moment_vector(1.0, 1.0, 2.0, 1.0);
        const KernelSpec spec = KernelSpec::hard_sphere(40.0);
        CHECK(std::isfinite(log_predicted_sup(m, spec)));
        CHECK(log_predicted_sup(m, spec) > 700);
        CHECK(std::isfinite(log_condition_rhs(40.0, 1.0)));
    }
}

TEST_CASE("enhancement ceiling K*")
{
    CHECK(k_star(4.0) == doctest::Approx(1.0 / 18.0).epsilon(1e-16));
    CHECK(k_star(3.0) == doctest::Approx(1.0 / 14.0).epsilon(1e-16));
    for (double beta : {3.0, 4.0, 6.5})
    {
        const auto objective = [beta](double K) { return std::log(K) - 2 * (beta + 1) * std::log1p(2 * K); };
        double lo = 1e-4, hi = 1.0;
        for (int round = 0; round < 8; ++round)
        {
            const int n = 1000;
            double best = lo, best_value = -1e300;
            for (int i = 0; i <= n; ++i)
            {
                const double K = lo + (hi - lo) * i / n;
                if (objective(K) > best_value)
                {
                    best_value = objective(K);
                    best = K;
                }
            }
            const double width = (hi - lo) / n;
            lo = std::max(1e-6, best - 2 * width);
            hi = best + 2 * width;
        }
        CHECK(std::abs(0.5 * (lo + hi) - k_star(beta)) < 1e-8);
    }
}

TEST_CASE("C1 and its derivation from the differential inequality")
{
    const MomentVector m = moment_vector(1.2, 0.8, 3.0, 0.1);
    const KernelSpec spec = KernelSpec::yukawa();
    const double K = k_star(4.0);
    const double a = 1.0 / 8.0, b = 4.0;
    const double c0 = 22.0 * std::sqrt(2.0) / 5.0 - 31.0 / 5.0;
    const double l12 = m.l1s[2];
    const double displayed = (128 * (std::sqrt(2.0) - 1) * (1 + 2 * K) * b + 2 * c0 * a) * l12 * l12 / (a * c0 * m.m0 * m.l1s[3]);
    CHECK(c1_constant(m, spec, K) == doctest::Approx(displayed).epsilon(1e-14));

    const double pi = std::numbers::pi;
    const double c1 = c0 * pi * a * m.m0 / (32 * l12);
    const double c2 = (4 * (std::sqrt(2.0) - 1) * (1 + 2 * K) * b * 4 * pi + c0 * pi * a / 16) * l12;
    const TheoremReport r = constants_chain(m, spec, K);
    CHECK(r.C1 == doctest::Approx(displayed).epsilon(1e-14));
    CHECK(r.C1_derived == doctest::Approx(c2 / (c1 * m.l1s[3])).epsilon(1e-14));
    const double with_512 = (512 * (std::sqrt(2.0) - 1) * (1 + 2 * K) * b + 2 * c0 * a) * l12 * l12 / (a * c0 * m.m0 * m.l1s[3]);
    CHECK(r.C1_derived == doctest::Approx(with_512).epsilon(1e-14));
}

TEST_CASE("constants chain")
{
    const KernelSpec spec = KernelSpec::hard_sphere();
    SUBCASE("C2 and C3")
    {
        const MomentVector m = moment_vector(1.0, 0.5, 2.0, 0.3);
        const TheoremReport r = constants_chain(m, spec, k_star(3.0));
        CHECK(r.C0 == doctest::Approx(c0_closed_form()));
        CHECK(r.C2 == doctest::Approx(std::max(1.0, r.C1) * 2.0).epsilon(1e-14));
        CHECK(r.C2 >= 2.0 * std::min(1.0, r.C1));
        CHECK(r.C3 == doctest::Approx(8.0 * r.C2 / std::pow(0.5, 2.0)).epsilon(1e-13));
        CHECK(r.Tn == doctest::Approx(contraction_interval(k_star(3.0), 1.0, 1.0)).epsilon(1e-14));
        CHECK(r.K_star == k_star(3.0));
        CHECK(r.condition_holds == (r.condition_lhs <= r.condition_rhs));
    }
    SUBCASE("case selection, with rho0 = 1 going to the rho0 >= 1 branch")
    {
        const TheoremReport tie = constants_chain(moment_vector(1.0, 1.0, 2.0, 0.1), spec, 0.1);
        CHECK(tie.rho0 == 1.0);
        CHECK((tie.case_id == TheoremCase::Case1 || tie.case_id == TheoremCase::Case3));
        const TheoremReport low = constants_chain(moment_vector(1.0, 0.5, 2.0, 0.1), spec, 0.1);
        CHECK((low.case_id == TheoremCase::Case2 || low.case_id == TheoremCase::Case4));
        CHECK((static_cast<int>(tie.case_id) + 1 == static_cast<int>(low.case_id)));
    }
    SUBCASE("invalid K")
    {
        CHECK_THROWS_AS(constants_chain(moment_vector(1.0, 1.0, 2.0, 0.1), spec, 0.0), InputError);
    }
    SUBCASE("JSON report")
    {
        const nlohmann::json j = to_json(theorem_report(moment_vector(1.0, 1.0, 2.0, 0.1), spec));
        CHECK(j.contains("condition_holds"));
        CHECK(j["K_star"].get<double>() == k_star(3.0));
        CHECK(j.contains("C1_derived"));
    }
}

TEST_CASE("condition implies the temperature floor on realizable data")
{
    const VelocityGrid g(3.0, 16);
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (const KernelSpec& spec : {KernelSpec::hard_sphere(), KernelSpec::yukawa()})
    {
        const double floor = log_temperature_floor(spec);
        for (int i = 0; i < 30; ++i)
        {
            const DistributionState f = i % 3 == 0 ? ball_indicator(g, 0.5 + 2.0 * u(rng), 1.0)
                                                   : isotropic_gaussian(g, 1.0, 0.05 + u(rng), {0.5 * u(rng), 0.0, 0.0});
            const MomentVector m = moments(f);
            // Largest lambda at which the condition still holds.
            const double log_lambda = log_condition_rhs(spec.beta, spec.effective_a() / spec.effective_b()) - log_condition_lhs(m, spec.beta);
            const double lambda = std::exp(log_lambda);
            REQUIRE(lambda > 0.0);
            const TheoremReport r = evaluate_condition(scaled(m, 0.999 * lambda), spec);
            REQUIRE(r.condition_holds);
            REQUIRE(std::log(r.temp_ratio) >= floor);
        }
    }
}

TEST_CASE("moment envelope and coercivity floor")
{
    CHECK(moment_envelope(2.0, 1.5, 1.0, 0.1, 3.0, 0.0) == doctest::Approx(2.0));
    const double rate = 1.2 * std::pow(2.0, 3.5) * 4 * std::numbers::pi * 1.5 * 1.5;
    CHECK(moment_envelope(2.0, 1.5, 1.0, 0.1, 3.0, 0.5) == doctest::Approx(2.0 + rate * 0.5).epsilon(1e-14));
    CHECK_THROWS_AS(moment_envelope(2.0, 1.5, 1.0, 0.1, 2.0, 0.5), InputError);

    const MomentVector m = moment_vector(1.0, 0.6, 2.5, 0.1);
    const double expected = 1.0 * std::pow(0.6, 2.0) / (8.0 * 2.5);
    CHECK(coercivity_floor(m, KernelSpec::hard_sphere()) == doctest::Approx(expected).epsilon(1e-14));
    CHECK(coercivity_floor(scaled(m, 3.0), KernelSpec::hard_sphere()) == doctest::Approx(3.0 * expected).epsilon(1e-14));
}
