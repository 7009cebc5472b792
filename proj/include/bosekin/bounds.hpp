#pragma once

#include "bosekin/grid.hpp"
#include "bosekin/kernel.hpp"

#include "json.hpp"

namespace bosekin {

enum class TheoremCase { Case1 = 1, Case2 = 2, Case3 = 3, Case4 = 4 };

/// Constants of the main theorem for one initial datum. Products of powers
/// are kept as logarithms; the plain fields are their exponentials (which may
/// over- or underflow for extreme inputs).
struct TheoremReport
{
    double beta = 0.0;
    double a = 0.0;  ///< effective lower constant a0 / hbar^4
    double b = 0.0;
    double K = 0.0;  ///< enhancement ceiling used for the chain
    double K_star = 0.0;

    double C0 = 0.0;  ///< integral of kappa^{3/2} over the sphere
    double C1 = 0.0;
    double C1_derived = 0.0;  ///< c2 / (c1 ||f0||_{L1_3}) from the differential inequality
    double C2 = 0.0;
    double C3 = 0.0;
    double C4 = 0.0;
    double log_C4 = 0.0;
    double Tn = 0.0;  ///< contraction interval at n = 1
    double raw_sup_bound = 0.0;  ///< ||f0||_inf + 2^8 |S1|^2 |S2| (1+2K)^4 C4
    double log_raw_sup_bound = 0.0;
    bool raw_bound_below_K = false;

    double condition_lhs = 0.0;
    double condition_rhs = 0.0;
    double log_condition_lhs = 0.0;
    double log_condition_rhs = 0.0;
    bool condition_holds = false;

    double predicted_sup = 0.0;
    double log_predicted_sup = 0.0;

    double temp_ratio = 0.0;
    double temp_ratio_floor = 0.0;
    double log_temp_ratio_floor = 0.0;

    double rho0 = 0.0;
    TheoremCase case_id = TheoremCase::Case1;
    double case_lhs = 0.0;
    double case_rhs = 0.0;
    double log_case_lhs = 0.0;
    double log_case_rhs = 0.0;
    bool case_holds = false;
};

/// 1 / (4 beta + 2).
double k_star(double beta);

/// (22 sqrt 2 / 5 - 31 / 5), the closed-form C0 without its factor pi.
double c0_reduced();

double log_condition_lhs(const MomentVector& m, double beta);
double log_condition_rhs(double beta, double a_over_b);
double log_predicted_sup(const MomentVector& m, const KernelSpec& spec);
double predicted_sup(const MomentVector& m, const KernelSpec& spec);
double log_temperature_floor(const KernelSpec& spec);

/// Condition LHS/RHS, predicted ceiling and temperature data.
TheoremReport evaluate_condition(const MomentVector& m, const KernelSpec& spec);

/// Full report at a given K (the theorem's choice is k_star(beta)).
TheoremReport constants_chain(const MomentVector& m, const KernelSpec& spec, double K);

/// constants_chain at K = k_star(beta).
TheoremReport theorem_report(const MomentVector& m, const KernelSpec& spec);

/// C1 of the uniform L1_3 bound.
double c1_constant(const MomentVector& m, const KernelSpec& spec, double K);

/// Upper envelope for ||f(t)||_{L1_s}, s > 2, from ||f0||_{L1_s} and ||f0||_{L1_2}.
double moment_envelope(double l1s_initial, double l12_initial, double b, double K, double s,
                       double t);

/// a (min{M0, M2})^{(beta+1)/2} / (2^beta ||f||_{L1_3}^{(beta-1)/2}); multiply by <v>.
double coercivity_floor(const MomentVector& m, const KernelSpec& spec);

nlohmann::json to_json(const TheoremReport& report);

} // namespace bosekin
