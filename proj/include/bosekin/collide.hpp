#pragma once

#include "bosekin/grid.hpp"
#include "bosekin/kernel.hpp"
#include "bosekin/quadrature.hpp"

#include <Eigen/Dense>

#include <functional>
#include <limits>

namespace bosekin {

inline constexpr double unbounded = std::numeric_limits<double>::infinity();

/// Ceilings (n, K). n caps the kernel and the quadratic factors, K the
/// enhancement factors of the cubic bracket.
struct CutoffParams
{
    double n = unbounded;
    double K = unbounded;

    enum class Family { Original, Intermediate, Cutoff };

    static CutoffParams original() { return {}; }
    static CutoffParams intermediate(double K) { return {unbounded, K}; }
    static CutoffParams cutoff(double n, double K) { return {n, K}; }

    Family family() const;
    void validate() const;
};

struct CollisionResult
{
    Eigen::ArrayXd gain;
    Eigen::ArrayXd loss;
    Eigen::ArrayXd net;
    Eigen::ArrayXd loss_rate;  ///< loss = (f ^ n) * loss_rate nodewise
    Eigen::Index velocity_nodes = 0;
    std::size_t angle_nodes = 0;
};

/// One (v, v*, sigma) triple as seen by the generic visitor.
struct CollisionSample
{
    Eigen::Index p;  ///< node of v
    Eigen::Index q;  ///< node of v*
    Eigen::Vector3d v_prime;
    Eigen::Vector3d v_star_prime;
    double kernel;  ///< B(v - v*, sigma)
    double weight;  ///< angular weight times cell volume
};

/// Kernel value as a function of |v - v*| and cos theta.
using KernelFunction = std::function<double(double, double)>;

/// Discrete collision integrals on a fixed grid and angular rule.
///
/// v* runs over grid nodes, sigma over the angular rule, and off-grid values
/// f(v'), f(v*') come from trilinear interpolation with zero extension.
class CollisionOperator
{
public:
    CollisionOperator(KernelSpec kernel, VelocityGrid grid, AngularQuadrature quadrature);

    const KernelSpec& kernel() const { return kernel_; }
    const VelocityGrid& grid() const { return grid_; }
    const AngularQuadrature& quadrature() const { return quadrature_; }

    /// Worker cap for the data-parallel loops; 0 uses the OpenMP default.
    void set_threads(int threads) { threads_ = threads; }
    int threads() const { return threads_; }

    /// True when sigma nodes are visited in antipodal pairs.
    bool paired() const { return paired_; }

    /// Gain, loss and loss rate of Q_{n,K}(f) (n = inf and/or K = inf select the
    /// intermediate or original operators).
    CollisionResult evaluate(const Eigen::ArrayXd& f, const CutoffParams& params) const;

    /// Bilinear gain Q+(f, g), with B ^ n when n is finite.
    Eigen::ArrayXd gain_bilinear(const Eigen::ArrayXd& f, const Eigen::ArrayXd& g,
                                 double n = unbounded) const;

    /// Bilinear gain with an arbitrary kernel in place of B. The kernel must be
    /// even in cos theta.
    Eigen::ArrayXd gain_bilinear(const Eigen::ArrayXd& f, const Eigen::ArrayXd& g,
                                 const KernelFunction& kernel) const;

    /// Calls fn(const CollisionSample&) for every ordered node pair p != q and
    /// every sigma node. Serial and slow; meant for diagnostics.
    template <typename Fn>
    void for_each_collision(Fn&& fn) const;

private:
    void check_field(const Eigen::ArrayXd& f, const char* where) const;

    KernelSpec kernel_;
    VelocityGrid grid_;
    AngularQuadrature quadrature_;
    std::vector<Eigen::Vector3d> sweep_sigma_;
    std::vector<double> sweep_weight_;
    bool paired_ = false;
    int threads_ = 0;
};

template <typename Fn>
void CollisionOperator::for_each_collision(Fn&& fn) const
{
    const double h3 = grid_.cell_volume();
    const auto& nodes = quadrature_.nodes();
    const auto& weights = quadrature_.weights();
    CollisionSample s{};
    for (Eigen::Index p = 0; p < grid_.size(); ++p)
    {
        const Eigen::Vector3d v = grid_.node(p);
        for (Eigen::Index q = 0; q < grid_.size(); ++q)
        {
            if (q == p)
                continue;
            const Eigen::Vector3d vs = grid_.node(q);
            const Eigen::Vector3d u = v - vs;
            const double r = u.norm();
            const Eigen::Vector3d center = 0.5 * (v + vs);
            s.p = p;
            s.q = q;
            for (std::size_t a = 0; a < nodes.size(); ++a)
            {
                s.v_prime = center + 0.5 * r * nodes[a];
                s.v_star_prime = center - 0.5 * r * nodes[a];
                s.kernel = kernel_.evaluate(r, u.dot(nodes[a]) / r);
                s.weight = weights[a] * h3;
                fn(s);
            }
        }
    }
}

Eigen::ArrayXd q_plus_bilinear(const CollisionOperator& op, const DistributionState& f,
                               const DistributionState& g, const CutoffParams& params = {});
Eigen::ArrayXd q_gain(const CollisionOperator& op, const DistributionState& f,
                      const CutoffParams& params = {});
Eigen::ArrayXd q_loss(const CollisionOperator& op, const DistributionState& f,
                      const CutoffParams& params = {});
Eigen::ArrayXd l_k(const CollisionOperator& op, const DistributionState& f, double K);
CollisionResult collide(const CollisionOperator& op, const DistributionState& f,
                        const CutoffParams& params = {});

/// Symmetrized weak form: sum of B_n (f^n)(f*^n)(1 + f'^K + f*'^K)
/// (phi' + phi*' - phi - phi*)/2 over all collisions.
template <typename Phi>
double weak_form_pairing(const CollisionOperator& op, const DistributionState& f, Phi&& phi,
                         const CutoffParams& params = {})
{
    if (!(f.grid() == op.grid()))
        throw InputError("weak_form_pairing: grid mismatch");
    params.validate();
    const auto& values = f.values();
    const VelocityGrid& grid = op.grid();
    const Eigen::ArrayXd phi_nodes = sample(grid, phi);
    const double h3 = grid.cell_volume();
    double total = 0.0;
    op.for_each_collision([&](const CollisionSample& s) {
        const double fp = std::min(values[s.p], params.n);
        const double fq = std::min(values[s.q], params.n);
        if (fp == 0.0 || fq == 0.0)
            return;
        const double a = interpolate(grid, values, s.v_prime);
        const double b = interpolate(grid, values, s.v_star_prime);
        const double bracket = 1.0 + std::min(a, params.K) + std::min(b, params.K);
        const double dphi = 0.5 * (phi(s.v_prime) + phi(s.v_star_prime) - phi_nodes[s.p] - phi_nodes[s.q]);
        total += s.weight * h3 * std::min(s.kernel, params.n) * fp * fq * bracket * dphi;
    });
    return total;
}

} // namespace bosekin
