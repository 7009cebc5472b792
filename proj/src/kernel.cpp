#include "bosekin/kernel.hpp"

#include "bosekin/quadrature.hpp"

// pchip.hpp calls isnan unqualified; <math.h> puts it in the global namespace.
#include <math.h>

#include <boost/math/interpolators/pchip.hpp>

#include <fstream>
#include <sstream>

namespace bosekin {

RadialProfile RadialProfile::yukawa()
{
    return RadialProfile("yukawa", [](double xi) { return 1.0 - 1.0 / (1.0 + xi * xi); });
}

RadialProfile RadialProfile::table(std::vector<double> xi, std::vector<double> value)
{
    if (xi.size() != value.size())
        throw InputError("psi table: column length mismatch");
    if (xi.size() < 4)
        throw InputError("psi table: at least 4 rows are required");
    if (xi.front() != 0.0)
        throw InputError("psi table: first xi must be 0");
    for (std::size_t i = 1; i < xi.size(); ++i)
        if (!(xi[i] > xi[i - 1]))
            throw InputError("psi table: xi must be strictly increasing");
    for (double y : value)
        if (!std::isfinite(y))
            throw InputError("psi table: non-finite value");

    const double x_last = xi.back();
    const double y_last = value.back();
    auto spline = std::make_shared<boost::math::interpolators::pchip<std::vector<double>>>(
        std::move(xi), std::move(value));
    return RadialProfile("table", [spline, x_last, y_last](double x) {
        if (x >= x_last)
            return y_last;
        return (*spline)(std::max(x, 0.0));
    });
}

RadialProfile RadialProfile::load_csv(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw InputError("psi table: cannot open " + path);
    std::vector<double> xs, ys;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line))
    {
        ++line_no;
        if (line.empty() || line[0] == '#')
            continue;
        for (char& c : line)
            if (c == ',' || c == ';' || c == '\t')
                c = ' ';
        std::istringstream row(line);
        double x = 0.0, y = 0.0;
        if (!(row >> x >> y))
        {
            if (xs.empty())
                continue;  // header
            throw InputError("psi table: malformed row " + std::to_string(line_no) + " in " + path);
        }
        xs.push_back(x);
        ys.push_back(y);
    }
    return table(std::move(xs), std::move(ys));
}

KernelSpec KernelSpec::hard_sphere(double beta, double hbar)
{
    KernelSpec spec;
    spec.family = KernelFamily::HardSphere;
    spec.beta = beta;
    spec.hbar = hbar;
    spec.validate();
    return spec;
}

KernelSpec KernelSpec::yukawa(double hbar)
{
    return screened(RadialProfile::yukawa(), 1.0 / 8.0, 4.0, 4.0, hbar);
}

KernelSpec KernelSpec::screened(RadialProfile profile, double a, double b, double beta,
                                double hbar)
{
    KernelSpec spec;
    spec.family = KernelFamily::ScreenedDelta;
    spec.profile = std::move(profile);
    spec.a = a;
    spec.b = b;
    spec.beta = beta;
    spec.hbar = hbar;
    spec.validate();
    return spec;
}

void KernelSpec::validate() const
{
    if (!(a > 0.0 && a <= b && std::isfinite(b)))
        throw InputError("kernel: require 0 < a <= b < inf");
    if (!(beta >= 3.0 && std::isfinite(beta)))
        throw InputError("kernel: beta must be >= 3");
    if (!(hbar > 0.0 && hbar <= 1.0))
        throw InputError("kernel: hbar must lie in (0, 1]");
    if (family == KernelFamily::ScreenedDelta && profile.empty())
        throw InputError("kernel: screened-delta family needs a radial profile");
}

double KernelSpec::psi_hat(double xi) const
{
    if (family == KernelFamily::HardSphere)
        return 1.0 / (hbar * hbar);
    return profile(xi / hbar) / (hbar * hbar);
}

double KernelSpec::evaluate(double relative_speed, double cos_theta) const
{
    if (family == KernelFamily::HardSphere)
    {
        if (hbar == 1.0)
            return relative_speed;
        return relative_speed / std::pow(hbar, 4);
    }
    const double c = std::clamp(cos_theta, -1.0, 1.0);
    const double d1 = relative_speed * std::sqrt(0.5 * (1.0 - c));  // |v - v'|
    const double d2 = relative_speed * std::sqrt(0.5 * (1.0 + c));  // |v - v*'|
    const double s = psi_hat(d1) + psi_hat(d2);
    return relative_speed * s * s;
}

double evaluate_kernel(const KernelSpec& spec, const Eigen::Vector3d& v,
                       const Eigen::Vector3d& v_star, const Eigen::Vector3d& sigma)
{
    require_unit(sigma, "evaluate_kernel");
    const Eigen::Vector3d u = v - v_star;
    const double r = u.norm();
    if (r == 0.0)
        return 0.0;
    return spec.evaluate(r, u.dot(sigma) / r);
}

std::pair<KernelSpec, DistributionState> hbar_rescale(const KernelSpec& spec,
                                                      const DistributionState& f,
                                                      RescaleDirection direction)
{
    if (!(spec.hbar > 0.0 && spec.hbar <= 1.0) || !(spec.normalized_from > 0.0 && spec.normalized_from <= 1.0))
        throw InputError("hbar_rescale: hbar must lie in (0, 1]");

    if (direction == RescaleDirection::Normalize)
    {
        const double h = spec.hbar;
        const double h3 = h * h * h;
        KernelSpec out = spec;
        out.hbar = 1.0;
        out.normalized_from = h;
        out.a = spec.effective_a();
        out.b = spec.effective_b();
        if (spec.family == KernelFamily::ScreenedDelta && h != 1.0)
        {
            const RadialProfile phi = spec.profile;
            out.profile = RadialProfile(phi.name() + "/rescaled",
                                        [phi, h](double xi) { return phi(xi / h) / (h * h); });
        }
        // The normalized hard-sphere kernel is |u| / hbar^4: keep the family and
        // carry the factor through a constant profile.
        if (spec.family == KernelFamily::HardSphere && h != 1.0)
        {
            out.family = KernelFamily::ScreenedDelta;
            out.profile = RadialProfile("hard-sphere/rescaled", [h](double) { return 0.5 / (h * h); });
        }
        return {out, DistributionState(f.grid(), f.values() * h3, f.time() / h3)};
    }

    // Denormalize: a normalized spec remembers its source hbar; a physical spec
    // carries it directly.
    const bool normalized = spec.hbar == 1.0 && spec.normalized_from != 1.0;
    const double h = normalized ? spec.normalized_from : spec.hbar;
    const double h3 = h * h * h;
    KernelSpec out = spec;
    if (normalized)
    {
        out.hbar = h;
        out.normalized_from = 1.0;
        out.a = spec.a * std::pow(h, 4);
        out.b = spec.b * std::pow(h, 4);
        const RadialProfile psi = spec.profile;
        if (psi.name() == "hard-sphere/rescaled")
        {
            out.family = KernelFamily::HardSphere;
            out.profile = RadialProfile();
        }
        else
        {
            out.profile = RadialProfile(psi.name() + "/restored",
                                        [psi, h](double xi) { return h * h * psi(xi * h); });
        }
    }
    return {out, DistributionState(f.grid(), f.values() / h3, f.time() * h3)};
}

double c0_closed_form()
{
    return (22.0 * std::sqrt(2.0) - 31.0) * std::numbers::pi / 5.0;
}

double c0_quadrature(double tolerance)
{
    const auto integrand = [](double theta) {
        const double k = kappa(theta);
        return k * std::sqrt(k) * std::sin(theta);
    };
    const double pi = std::numbers::pi;
    // kappa switches branch at pi/2; integrate each smooth piece separately.
    const double lower = integrate_adaptive(integrand, 0.0, pi / 2.0, tolerance);
    const double upper = integrate_adaptive(integrand, pi / 2.0, pi, tolerance);
    return 2.0 * pi * (lower + upper);
}

} // namespace bosekin
