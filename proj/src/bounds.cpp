#include "bosekin/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace bosekin {

namespace {

constexpr double pi = std::numbers::pi;
const double ln2 = std::log(2.0);
const double log_s1 = std::log(2.0 * pi);
const double log_s2 = std::log(4.0 * pi);

void require_admissible(const MomentVector& m)
{
    if (!(m.m0 > 0.0))
        throw InputError("bounds: M0 must be positive");
    if (!(m.m2 > 0.0))
        throw InputError("bounds: M2 must be positive");
}

double log_sum_exp(std::initializer_list<double> terms)
{
    double top = -std::numeric_limits<double>::infinity();
    for (double t : terms)
        top = std::max(top, t);
    if (!std::isfinite(top))
        return top;
    double sum = 0.0;
    for (double t : terms)
        sum += std::exp(t - top);
    return top + std::log(sum);
}

double min_moment(const MomentVector& m)
{
    return std::min(m.l1s[0], m.m2);
}

} // namespace

double k_star(double beta)
{
    return 1.0 / (4.0 * beta + 2.0);
}

double c0_reduced()
{
    return 22.0 * std::sqrt(2.0) / 5.0 - 31.0 / 5.0;
}

double log_condition_lhs(const MomentVector& m, double beta)
{
    require_admissible(m);
    return std::log(m.l1s[0] + m.linf) + 4.0 * beta * std::log(m.l1s[3] / min_moment(m));
}

double log_condition_rhs(double beta, double a_over_b)
{
    return -(35.0 * beta - 11.0) * ln2 + (2.0 * beta + 1.0) * std::log(4.0 * beta + 2.0)
           - (2.0 * beta + 2.0) * std::log(4.0 * beta + 4.0)
           + 2.0 * (beta + 1.0) * std::log(a_over_b);
}

double log_predicted_sup(const MomentVector& m, const KernelSpec& spec)
{
    require_admissible(m);
    const double beta = spec.beta;
    const double b_over_a = spec.effective_b() / spec.effective_a();
    return 35.0 * beta * ln2 + 2.0 * (beta + 1.0) * std::log(b_over_a)
           + (2.0 * beta - 2.0) * std::log((2.0 * beta + 2.0) / (2.0 * beta + 3.0))
           + 4.0 * beta * std::log(m.l1s[3] / min_moment(m)) + std::log(m.l1s[0] + m.linf);
}

double predicted_sup(const MomentVector& m, const KernelSpec& spec)
{
    return std::exp(log_predicted_sup(m, spec));
}

double log_temperature_floor(const KernelSpec& spec)
{
    const double beta = spec.beta;
    const double b_over_a = spec.effective_b() / spec.effective_a();
    return (70.0 * beta / 3.0 - 19.0 / 3.0) * ln2
           + (4.0 * beta + 4.0) / 3.0 * std::log(4.0 * beta + 4.0)
           - (4.0 * beta + 2.0) / 3.0 * std::log(4.0 * beta + 2.0)
           + (4.0 * beta + 4.0) / 3.0 * std::log(b_over_a);
}

TheoremReport evaluate_condition(const MomentVector& m, const KernelSpec& spec)
{
    spec.validate();
    require_admissible(m);
    TheoremReport r;
    r.beta = spec.beta;
    r.a = spec.effective_a();
    r.b = spec.effective_b();
    r.K_star = k_star(spec.beta);
    r.log_condition_lhs = log_condition_lhs(m, spec.beta);
    r.log_condition_rhs = log_condition_rhs(spec.beta, r.a / r.b);
    r.condition_lhs = std::exp(r.log_condition_lhs);
    r.condition_rhs = std::exp(r.log_condition_rhs);
    r.condition_holds = r.log_condition_lhs <= r.log_condition_rhs;
    r.log_predicted_sup = log_predicted_sup(m, spec);
    r.predicted_sup = std::exp(r.log_predicted_sup);
    r.temp_ratio = temperature_ratio(m);
    r.log_temp_ratio_floor = log_temperature_floor(spec);
    r.temp_ratio_floor = std::exp(r.log_temp_ratio_floor);
    return r;
}

double c1_constant(const MomentVector& m, const KernelSpec& spec, double K)
{
    require_admissible(m);
    const double a = spec.effective_a();
    const double b = spec.effective_b();
    const double c0 = c0_reduced();
    const double l12 = m.l1s[2];
    return (128.0 * (std::sqrt(2.0) - 1.0) * (1.0 + 2.0 * K) * b + 2.0 * c0 * a) * l12 * l12
           / (a * c0 * m.l1s[0] * m.l1s[3]);
}

namespace {

double c1_from_rates(const MomentVector& m, const KernelSpec& spec, double K)
{
    const double a = spec.effective_a();
    const double b = spec.effective_b();
    const double c0 = c0_reduced();
    const double l12 = m.l1s[2];
    const double c1 = c0 * pi * a * m.l1s[0] / (32.0 * l12);
    const double c2 = (4.0 * (std::sqrt(2.0) - 1.0) * (1.0 + 2.0 * K) * b * 4.0 * pi
                       + c0 * pi * a / 16.0)
                      * l12;
    return c2 / (c1 * m.l1s[3]);
}

} // namespace

TheoremReport constants_chain(const MomentVector& m, const KernelSpec& spec, double K)
{
    if (!(K > 0.0) || !std::isfinite(K))
        throw InputError("constants_chain: K must be positive and finite");
    TheoremReport r = evaluate_condition(m, spec);
    r.K = K;
    const double beta = spec.beta;
    const double a = r.a;
    const double b = r.b;
    const double m0 = m.l1s[0];
    const double m2 = m.m2;
    const double linf = m.linf;
    const double l13 = m.l1s[3];

    r.C0 = c0_closed_form();
    r.C1 = c1_constant(m, spec, K);
    r.C1_derived = c1_from_rates(m, spec, K);
    r.C2 = std::max(1.0, r.C1) * l13;
    const double log_c3 = beta * ln2 + 0.5 * (beta - 1.0) * std::log(r.C2) - std::log(a)
                          - 0.5 * (beta + 1.0) * std::log(std::min(m0, m2));
    r.C3 = std::exp(log_c3);

    const double x = std::log(b) + log_c3;  // log(b C3)
    const double lm0 = std::log(m0);
    const double lsum = std::log(m0 + m2);
    const double lli = linf > 0.0 ? std::log(linf) : -std::numeric_limits<double>::infinity();
    r.log_C4 = log_sum_exp({x + lsum + lli, 2.0 * x + 8.0 / 3.0 * lm0 + lli / 3.0,
                            3.0 * x + 7.0 / 3.0 * lm0 + 4.0 / 3.0 * lsum + lli / 3.0,
                            4.0 * x + 23.0 / 6.0 * lm0 + 7.0 / 6.0 * lsum});
    r.C4 = std::exp(r.log_C4);
    const double log_factor = 8.0 * ln2 + 2.0 * log_s1 + log_s2 + 4.0 * std::log(1.0 + 2.0 * K);
    r.log_raw_sup_bound = log_sum_exp({lli, log_factor + r.log_C4});
    r.raw_sup_bound = std::exp(r.log_raw_sup_bound);
    r.raw_bound_below_K = r.log_raw_sup_bound <= std::log(K);

    r.Tn = 1.0 / (16.0 * (1.0 + 2.0 * K + std::pow(2.0, 1.5)) * 4.0 * pi * 1.0 * m0);

    r.rho0 = m2 / m0;
    const bool big_c1 = r.C1 >= 1.0;
    const bool big_rho = r.rho0 >= 1.0;
    const double l_mass = std::log(m0 + linf);
    const double l_ab = std::log(a / b);
    if (big_c1)
    {
        r.case_id = big_rho ? TheoremCase::Case1 : TheoremCase::Case2;
        r.log_case_lhs = l_mass + (big_rho ? (4.0 * beta - 3.0) * std::log(r.rho0)
                                           : -4.0 * beta * std::log(r.rho0));
        r.log_case_rhs = 2.0 * (beta - 1.0) * std::log(r.C0) + std::log(K)
                         - (20.0 * beta - 6.0) * ln2 - 2.0 * log_s1 - (2.0 * beta - 1.0) * log_s2
                         - 2.0 * (beta + 1.0) * std::log(1.0 + 2.0 * K) + (2.0 * beta + 2.0) * l_ab;
    }
    else
    {
        r.case_id = big_rho ? TheoremCase::Case3 : TheoremCase::Case4;
        r.log_case_lhs = l_mass + (big_rho ? (2.0 * beta - 1.0) * std::log(l13 / m0)
                                           : 2.0 * (beta + 1.0) * std::log(l13 / m2));
        r.log_case_rhs = std::log(K) - (4.0 * beta + 10.0) * ln2 - 2.0 * log_s1 - log_s2
                         - 4.0 * std::log(1.0 + 2.0 * K) + 4.0 * l_ab;
    }
    r.case_lhs = std::exp(r.log_case_lhs);
    r.case_rhs = std::exp(r.log_case_rhs);
    r.case_holds = r.log_case_lhs <= r.log_case_rhs;
    return r;
}

TheoremReport theorem_report(const MomentVector& m, const KernelSpec& spec)
{
    return constants_chain(m, spec, k_star(spec.beta));
}

double moment_envelope(double l1s_initial, double l12_initial, double b, double K, double s,
                       double t)
{
    if (!(s > 2.0))
        throw InputError("moment_envelope: s must exceed 2");
    const double rate = (1.0 + 2.0 * K) * std::pow(2.0, 0.5 * s + 2.0) * 4.0 * pi * b
                        * std::pow(l12_initial, (s - 1.0) / (s - 2.0));
    return std::pow(std::pow(l1s_initial, 1.0 / (s - 2.0)) + rate * t / (s - 2.0), s - 2.0);
}

double coercivity_floor(const MomentVector& m, const KernelSpec& spec)
{
    require_admissible(m);
    const double beta = spec.beta;
    return spec.effective_a() * std::pow(std::min(m.m0, m.m2), 0.5 * (beta + 1.0))
           / (std::pow(2.0, beta) * std::pow(m.l1s[3], 0.5 * (beta - 1.0)));
}

namespace {

nlohmann::json number(double x)
{
    if (std::isfinite(x))
        return x;
    return nullptr;
}

} // namespace

nlohmann::json to_json(const TheoremReport& r)
{
    nlohmann::json j;
    j["schema"] = 1;
    j["beta"] = number(r.beta);
    j["a"] = number(r.a);
    j["b"] = number(r.b);
    j["K"] = number(r.K);
    j["K_star"] = number(r.K_star);
    j["C0"] = number(r.C0);
    j["C1"] = number(r.C1);
    j["C1_derived"] = number(r.C1_derived);
    j["C2"] = number(r.C2);
    j["C3"] = number(r.C3);
    j["C4"] = number(r.C4);
    j["log_C4"] = number(r.log_C4);
    j["Tn"] = number(r.Tn);
    j["raw_sup_bound"] = number(r.raw_sup_bound);
    j["log_raw_sup_bound"] = number(r.log_raw_sup_bound);
    j["raw_bound_below_K"] = r.raw_bound_below_K;
    j["condition_lhs"] = number(r.condition_lhs);
    j["condition_rhs"] = number(r.condition_rhs);
    j["log_condition_lhs"] = number(r.log_condition_lhs);
    j["log_condition_rhs"] = number(r.log_condition_rhs);
    j["condition_holds"] = r.condition_holds;
    j["predicted_sup"] = number(r.predicted_sup);
    j["log_predicted_sup"] = number(r.log_predicted_sup);
    j["temp_ratio"] = number(r.temp_ratio);
    j["temp_ratio_floor"] = number(r.temp_ratio_floor);
    j["log_temp_ratio_floor"] = number(r.log_temp_ratio_floor);
    j["rho0"] = number(r.rho0);
    j["case_id"] = static_cast<int>(r.case_id);
    j["case_lhs"] = number(r.case_lhs);
    j["case_rhs"] = number(r.case_rhs);
    j["log_case_lhs"] = number(r.log_case_lhs);
    j["log_case_rhs"] = number(r.log_case_rhs);
    j["case_holds"] = r.case_holds;
    return j;
}

} // namespace bosekin
