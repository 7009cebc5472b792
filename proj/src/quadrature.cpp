#include "bosekin/quadrature.hpp"

#include "bosekin/error.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <numbers>

namespace bosekin {

GaussLegendreRule gauss_legendre(int order)
{
    if (order < 1)
        throw InputError("gauss_legendre: order must be >= 1");

    GaussLegendreRule rule;
    rule.nodes.resize(order);
    rule.weights.resize(order);
    const int half = (order + 1) / 2;
    for (int i = 0; i < half; ++i)
    {
        // Chebyshev-like initial guess, then Newton on P_n.
        double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it)
        {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= order; ++k)
            {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (order == 1)
                p0 = 1.0;
            dp = order * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16)
                break;
        }
        if (order == 1)
        {
            x = 0.0;
            dp = 1.0;
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[order - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[order - 1 - i] = w;
    }
    if (order == 1)
        rule.weights[0] = 2.0;
    if (order % 2 == 1)
        rule.nodes[order / 2] = 0.0;
    return rule;
}

AngularQuadrature::AngularQuadrature(std::vector<Eigen::Vector3d> nodes,
                                     std::vector<double> weights)
    : nodes_(std::move(nodes)), weights_(std::move(weights))
{
    if (nodes_.size() != weights_.size() || nodes_.empty())
        throw InputError("AngularQuadrature: node/weight count mismatch or empty rule");
    for (std::size_t i = 0; i < nodes_.size(); ++i)
    {
        if (std::abs(nodes_[i].norm() - 1.0) > 1e-12)
            throw InputError("AngularQuadrature: nodes must be unit vectors");
        if (!(weights_[i] > 0.0))
            throw InputError("AngularQuadrature: weights must be positive");
    }
}

AngularQuadrature AngularQuadrature::product(int polar_order, int azimuthal_order)
{
    if (polar_order < 1 || azimuthal_order < 1)
        throw InputError("AngularQuadrature::product: orders must be positive");

    const auto gl = gauss_legendre(polar_order);
    std::vector<Eigen::Vector3d> nodes;
    std::vector<double> weights;
    nodes.reserve(static_cast<std::size_t>(polar_order) * azimuthal_order);
    const double dphi = 2.0 * std::numbers::pi / azimuthal_order;
    for (int i = 0; i < polar_order; ++i)
    {
        const double c = gl.nodes[i];
        const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
        for (int j = 0; j < azimuthal_order; ++j)
        {
            // Half-step offset keeps nodes off the coordinate planes.
            const double phi = (j + 0.5) * dphi;
            nodes.emplace_back(s * std::cos(phi), s * std::sin(phi), c);
            weights.push_back(gl.weights[i] * dphi);
        }
    }
    return AngularQuadrature(std::move(nodes), std::move(weights));
}

double AngularQuadrature::total_weight() const
{
    double sum = 0.0;
    for (double w : weights_)
        sum += w;
    return sum;
}

std::vector<std::size_t> AngularQuadrature::antipodal_partners() const
{
    std::vector<std::size_t> partner(nodes_.size(), nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i)
    {
        for (std::size_t j = 0; j < nodes_.size(); ++j)
        {
            if ((nodes_[i] + nodes_[j]).norm() < 1e-12
                && std::abs(weights_[i] - weights_[j]) <= 1e-14 * weights_[i])
            {
                partner[i] = j;
                break;
            }
        }
        if (partner[i] == nodes_.size())
            return {};
    }
    return partner;
}

double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double tolerance)
{
    double error = 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 20, tolerance,
                                                                          &error);
}

} // namespace bosekin
