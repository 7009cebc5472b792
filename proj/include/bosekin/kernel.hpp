#pragma once

#include "bosekin/error.hpp"
#include "bosekin/grid.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <memory>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

namespace bosekin {

template <typename Scalar>
using Vector3 = Eigen::Matrix<Scalar, 3, 1>;

/// Pre- and post-collision velocities of one binary collision.
template <typename Scalar>
struct CollisionPair
{
    Vector3<Scalar> v;
    Vector3<Scalar> v_star;
    Vector3<Scalar> sigma;
    Vector3<Scalar> v_prime;
    Vector3<Scalar> v_star_prime;
    Scalar theta;
};

/// Unit direction of v - v_star, e1 when the velocities coincide.
template <typename Scalar>
Vector3<Scalar> relative_direction(const Vector3<Scalar>& v, const Vector3<Scalar>& v_star)
{
    const Vector3<Scalar> u = v - v_star;
    const Scalar r = u.norm();
    if (r == Scalar(0))
        return Vector3<Scalar>::UnitX();
    return u / r;
}

/// Angle between n and sigma in [0, pi].
template <typename Scalar>
Scalar collision_angle(const Vector3<Scalar>& n, const Vector3<Scalar>& sigma)
{
    using std::atan2;
    return atan2(n.cross(sigma).norm(), n.dot(sigma));
}

template <typename Scalar>
void require_unit(const Vector3<Scalar>& sigma, const char* where)
{
    using std::abs;
    if (!(abs(sigma.norm() - Scalar(1)) <= Scalar(1e-12)))
        throw InputError(std::string(where) + ": sigma must be a unit vector");
}

/// Sigma-representation of the post-collision velocities.
template <typename Scalar>
CollisionPair<Scalar> post_collision(const Vector3<Scalar>& v, const Vector3<Scalar>& v_star,
                                     const Vector3<Scalar>& sigma)
{
    require_unit(sigma, "post_collision");
    const Vector3<Scalar> center = (v + v_star) / Scalar(2);
    const Scalar half = (v - v_star).norm() / Scalar(2);
    CollisionPair<Scalar> pair;
    pair.v = v;
    pair.v_star = v_star;
    pair.sigma = sigma;
    pair.v_prime = center + half * sigma;
    pair.v_star_prime = center - half * sigma;
    pair.theta = collision_angle(relative_direction(v, v_star), sigma);
    return pair;
}

/// Impact direction omega with sigma = n - 2<n,omega>omega.
template <typename Scalar>
Vector3<Scalar> sigma_to_omega(const Vector3<Scalar>& v, const Vector3<Scalar>& v_star,
                               const Vector3<Scalar>& sigma)
{
    require_unit(sigma, "sigma_to_omega");
    const Vector3<Scalar> u = v - v_star;
    if (u.norm() == Scalar(0))
        throw DegenerateDirectionError("sigma_to_omega: v == v_star");
    const Vector3<Scalar> n = u / u.norm();
    const Vector3<Scalar> d = n - sigma;
    const Scalar dn = d.norm();
    if (dn > Scalar(1e-8))
        return d / dn;

    // sigma == n: any omega orthogonal to n; take the one built from the
    // coordinate axis least aligned with n.
    Eigen::Index axis = 0;
    n.cwiseAbs().minCoeff(&axis);
    Vector3<Scalar> e = Vector3<Scalar>::Unit(axis);
    Vector3<Scalar> w = e - n.dot(e) * n;
    return w / w.norm();
}

/// Angular coercivity weight min{(1 - sin(theta/2))^2, (1 - cos(theta/2))^2}.
template <typename Scalar>
Scalar kappa(Scalar theta)
{
    using std::cos;
    using std::sin;
    const Scalar pi = Scalar(std::numbers::pi);
    if (!(theta >= Scalar(0) && theta <= pi))
        throw InputError("kappa: theta must lie in [0, pi]");
    const Scalar s = Scalar(1) - sin(theta / Scalar(2));
    const Scalar c = Scalar(1) - cos(theta / Scalar(2));
    return std::min(s * s, c * c);
}

/// Radial Fourier profile xi -> Phi_hat(xi) on xi >= 0.
class RadialProfile
{
public:
    RadialProfile() = default;
    RadialProfile(std::string name, std::function<double(double)> fn)
        : name_(std::move(name)), fn_(std::make_shared<std::function<double(double)>>(std::move(fn)))
    {
    }

    /// 1 - 1/(1 + xi^2).
    static RadialProfile yukawa();

    /// Monotone cubic (PCHIP) interpolation of a sample table, held constant past the last node.
    static RadialProfile table(std::vector<double> xi, std::vector<double> value);

    /// Two-column CSV (xi, value); lines starting with '#' and a non-numeric header are skipped.
    static RadialProfile load_csv(const std::string& path);

    double operator()(double xi) const { return (*fn_)(xi); }
    bool empty() const { return !fn_; }
    const std::string& name() const { return name_; }

private:
    std::string name_;
    std::shared_ptr<const std::function<double(double)>> fn_;
};

enum class KernelFamily { HardSphere, ScreenedDelta };

/// Collision kernel description. a and b are the hbar-free constants a0, b0;
/// effective_a/effective_b divide by hbar^4.
struct KernelSpec
{
    KernelFamily family = KernelFamily::HardSphere;
    double a = 1.0;
    double b = 1.0;
    double beta = 3.0;
    double hbar = 1.0;
    RadialProfile profile;
    double normalized_from = 1.0;

    static KernelSpec hard_sphere(double beta = 3.0, double hbar = 1.0);
    static KernelSpec yukawa(double hbar = 1.0);
    static KernelSpec screened(RadialProfile profile, double a, double b, double beta,
                               double hbar = 1.0);

    void validate() const;
    double effective_a() const { return a / std::pow(hbar, 4); }
    double effective_b() const { return b / std::pow(hbar, 4); }

    /// Psi_hat(xi) = hbar^-2 Phi_hat(xi / hbar).
    double psi_hat(double xi) const;

    /// B as a function of |u| and cos(theta) = <n, sigma>.
    double evaluate(double relative_speed, double cos_theta) const;
};

double evaluate_kernel(const KernelSpec& spec, const Eigen::Vector3d& v,
                       const Eigen::Vector3d& v_star, const Eigen::Vector3d& sigma);

enum class RescaleDirection { Normalize, Denormalize };

/// Scaling f~(t,v) = hbar^3 f(hbar^3 t, v) together with Psi(|x|) = hbar Phi(|hbar x|).
std::pair<KernelSpec, DistributionState> hbar_rescale(const KernelSpec& spec,
                                                      const DistributionState& f,
                                                      RescaleDirection direction);

/// Closed form of the integral of kappa^{3/2} over the sphere.
double c0_closed_form();

/// Same integral by adaptive quadrature in theta.
double c0_quadrature(double tolerance = 1e-13);

} // namespace bosekin
