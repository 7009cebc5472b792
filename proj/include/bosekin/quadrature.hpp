#pragma once

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace bosekin {

/// Gauss-Legendre nodes and weights on [-1, 1], ascending nodes.
struct GaussLegendreRule
{
    std::vector<double> nodes;
    std::vector<double> weights;
};

GaussLegendreRule gauss_legendre(int order);

/// Node set on the unit sphere with positive weights summing to 4*pi.
class AngularQuadrature
{
public:
    AngularQuadrature() = default;
    AngularQuadrature(std::vector<Eigen::Vector3d> nodes, std::vector<double> weights);

    /// Tensor rule: Gauss-Legendre in cos(theta) times uniform trapezoid in phi.
    /// With even orders the rule is antipodally symmetric.
    static AngularQuadrature product(int polar_order, int azimuthal_order);

    std::size_t size() const { return nodes_.size(); }
    const std::vector<Eigen::Vector3d>& nodes() const { return nodes_; }
    const std::vector<double>& weights() const { return weights_; }
    double total_weight() const;

    /// Index of the antipodal node with identical weight for every node, or an
    /// empty vector when the rule has no such pairing.
    std::vector<std::size_t> antipodal_partners() const;

private:
    std::vector<Eigen::Vector3d> nodes_;
    std::vector<double> weights_;
};

/// Adaptive Gauss-Kronrod integral of a smooth 1D function on [a, b].
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double tolerance = 1e-13);

} // namespace bosekin
