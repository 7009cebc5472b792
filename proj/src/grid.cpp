#include "bosekin/grid.hpp"

#include "bosekin/error.hpp"

#include <boost/math/special_functions/zeta.hpp>

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <numbers>

namespace bosekin {

VelocityGrid::VelocityGrid(double extent, int points_per_axis)
    : extent_(extent), n_(points_per_axis)
{
    if (!(extent > 0.0 && std::isfinite(extent)))
        throw InputError("VelocityGrid: extent must be positive");
    if (points_per_axis < 4)
        throw InputError("VelocityGrid: need at least 4 points per axis");
}

std::array<int, 3> VelocityGrid::multi_index(Eigen::Index flat) const
{
    const int k = static_cast<int>(flat % n_);
    const int j = static_cast<int>((flat / n_) % n_);
    const int i = static_cast<int>(flat / (static_cast<Eigen::Index>(n_) * n_));
    return {i, j, k};
}

Eigen::Vector3d VelocityGrid::node(Eigen::Index flat) const
{
    const auto [i, j, k] = multi_index(flat);
    return node(i, j, k);
}

DistributionState::DistributionState(VelocityGrid grid, Eigen::ArrayXd values, double time)
    : grid_(grid), values_(std::move(values)), time_(time)
{
    if (values_.size() != grid_.size())
        throw InputError("DistributionState: value count does not match grid");
    if (!(time_ >= 0.0))
        throw InputError("DistributionState: time must be >= 0");
    for (Eigen::Index p = 0; p < values_.size(); ++p)
        if (!(values_[p] >= 0.0) || !std::isfinite(values_[p]))
            throw InputError("DistributionState: values must be finite and nonnegative");
}

MomentVector moments(const VelocityGrid& grid, const Eigen::ArrayXd& values)
{
    if (values.size() != grid.size())
        throw InputError("moments: value count does not match grid");
    const double h3 = grid.cell_volume();
    MomentVector m;
    double l2 = 0.0;
    for (Eigen::Index p = 0; p < values.size(); ++p)
    {
        const double f = values[p];
        const double af = std::abs(f);
        const Eigen::Vector3d v = grid.node(p);
        const double v2 = v.squaredNorm();
        const double bracket = std::sqrt(1.0 + v2);
        m.m0 += f;
        m.m1 += f * v;
        m.m2 += f * v2;
        m.l1s[0] += af;
        m.l1s[1] += af * bracket;
        m.l1s[2] += af * (1.0 + v2);
        m.l1s[3] += af * (1.0 + v2) * bracket;
        m.linf = std::max(m.linf, af);
        l2 += f * f;
    }
    m.m0 *= h3;
    m.m1 *= h3;
    m.m2 *= h3;
    for (double& s : m.l1s)
        s *= h3;
    m.l2 = std::sqrt(l2 * h3);
    return m;
}

MomentVector moments(const DistributionState& f)
{
    return moments(f.grid(), f.values());
}

double weighted_l1(const VelocityGrid& grid, const Eigen::ArrayXd& values, double s)
{
    double sum = 0.0;
    for (Eigen::Index p = 0; p < values.size(); ++p)
        sum += std::abs(values[p]) * std::pow(1.0 + grid.node(p).squaredNorm(), 0.5 * s);
    return sum * grid.cell_volume();
}

Eigen::ArrayXd japanese_bracket(const VelocityGrid& grid)
{
    return sample(grid, [](const Eigen::Vector3d& v) { return std::sqrt(1.0 + v.squaredNorm()); });
}

double temperature_coefficient()
{
    const double z32 = boost::math::zeta(1.5);
    const double z52 = boost::math::zeta(2.5);
    return 2.0 * std::numbers::pi * std::pow(z32, 5.0 / 3.0) / (3.0 * z52);
}

double temperature_ratio(const MomentVector& m)
{
    if (!(m.m0 > 0.0))
        throw InputError("temperature_ratio: M0 must be positive");
    return temperature_coefficient() * m.m2 / std::pow(m.m0, 5.0 / 3.0);
}

double interpolate(const VelocityGrid& grid, const Eigen::ArrayXd& values,
                   const Eigen::Vector3d& point)
{
    const int n = grid.points_per_axis();
    const double h = grid.spacing();
    // Continuous index coordinate: node i sits at s = i.
    std::array<int, 3> base{};
    std::array<double, 3> frac{};
    for (int d = 0; d < 3; ++d)
    {
        const double s = (point[d] + grid.extent()) / h - 0.5;
        if (!(s > -1.0 && s < n))
            return 0.0;
        const double fl = std::floor(s);
        base[d] = static_cast<int>(fl);
        frac[d] = s - fl;
    }
    double sum = 0.0;
    for (int di = 0; di < 2; ++di)
    {
        const int i = base[0] + di;
        if (i < 0 || i >= n)
            continue;
        const double wi = di ? frac[0] : 1.0 - frac[0];
        for (int dj = 0; dj < 2; ++dj)
        {
            const int j = base[1] + dj;
            if (j < 0 || j >= n)
                continue;
            const double wj = dj ? frac[1] : 1.0 - frac[1];
            for (int dk = 0; dk < 2; ++dk)
            {
                const int k = base[2] + dk;
                if (k < 0 || k >= n)
                    continue;
                const double wk = dk ? frac[2] : 1.0 - frac[2];
                sum += wi * wj * wk * values[grid.index(i, j, k)];
            }
        }
    }
    return sum;
}

ShiftResult zero_mean_shift(const DistributionState& f)
{
    const MomentVector m = moments(f);
    if (!(m.m0 > 0.0))
        throw InputError("zero_mean_shift: M0 must be positive");
    const Eigen::Vector3d v0 = m.m1 / m.m0;
    const VelocityGrid& grid = f.grid();
    Eigen::ArrayXd out(grid.size());
    for (Eigen::Index p = 0; p < grid.size(); ++p)
        out[p] = std::max(0.0, interpolate(grid, f.values(), grid.node(p) + v0));

    ShiftResult result{f.with_values(std::move(out)), v0, 0.0, false};
    const double mass_after = moments(result.state).m0;
    result.mass_loss = std::max(0.0, m.m0 - mass_after);
    result.truncated = result.mass_loss > 1e-12 * m.m0;
    return result;
}

namespace {

DistributionState normalized_field(const VelocityGrid& grid, Eigen::ArrayXd values, double mass)
{
    const double raw = values.sum() * grid.cell_volume();
    if (!(raw > 0.0))
        throw InputError("initial datum has no mass on this grid");
    values *= mass / raw;
    return DistributionState(grid, std::move(values));
}

Eigen::ArrayXd gaussian_field(const VelocityGrid& grid, const Eigen::Vector3d& variances,
                              const Eigen::Vector3d& mean)
{
    return sample(grid, [&](const Eigen::Vector3d& v) {
        const Eigen::Vector3d d = v - mean;
        return std::exp(-0.5 * (d.array().square() / variances.array()).sum());
    });
}

} // namespace

DistributionState isotropic_gaussian(const VelocityGrid& grid, double mass, double temperature,
                                     const Eigen::Vector3d& mean)
{
    return anisotropic_gaussian(grid, mass, Eigen::Vector3d::Constant(temperature), mean);
}

DistributionState anisotropic_gaussian(const VelocityGrid& grid, double mass,
                                       const Eigen::Vector3d& variances,
                                       const Eigen::Vector3d& mean)
{
    if (!(mass > 0.0) || !(variances.array() > 0.0).all())
        throw InputError("gaussian: mass and variances must be positive");
    return normalized_field(grid, gaussian_field(grid, variances, mean), mass);
}

DistributionState ball_indicator(const VelocityGrid& grid, double radius, double height)
{
    if (!(radius > 0.0) || !(height >= 0.0))
        throw InputError("ball_indicator: radius must be positive and height nonnegative");
    return DistributionState(grid, sample(grid, [&](const Eigen::Vector3d& v) {
                                 return v.norm() <= radius ? height : 0.0;
                             }));
}

DistributionState two_maxwellian(const VelocityGrid& grid, double mass1, double temperature1,
                                 const Eigen::Vector3d& mean1, double mass2,
                                 double temperature2, const Eigen::Vector3d& mean2)
{
    const auto a = isotropic_gaussian(grid, mass1, temperature1, mean1);
    const auto b = isotropic_gaussian(grid, mass2, temperature2, mean2);
    return a.with_values(a.values() + b.values());
}

namespace {

template <typename T>
void write_le(std::ostream& out, T value)
{
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big)
        std::reverse(bytes, bytes + sizeof(T));
    out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T read_le(std::istream& in)
{
    unsigned char bytes[sizeof(T)];
    in.read(reinterpret_cast<char*>(bytes), sizeof(T));
    if (!in)
        throw InputError("raw state: unexpected end of file");
    if constexpr (std::endian::native == std::endian::big)
        std::reverse(bytes, bytes + sizeof(T));
    T value;
    std::memcpy(&value, bytes, sizeof(T));
    return value;
}

} // namespace

void save_raw(const DistributionState& f, const std::string& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw RuntimeFailure("cannot open " + path + " for writing");
    write_le<std::uint32_t>(out, static_cast<std::uint32_t>(f.grid().points_per_axis()));
    write_le<double>(out, f.grid().extent());
    write_le<std::uint32_t>(out, 0u);
    for (Eigen::Index p = 0; p < f.values().size(); ++p)
        write_le<double>(out, f.values()[p]);
}

DistributionState load_raw(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw InputError("raw state: cannot open " + path);
    const auto n = read_le<std::uint32_t>(in);
    const auto extent = read_le<double>(in);
    read_le<std::uint32_t>(in);
    if (n < 4 || n > 4096)
        throw InputError("raw state: implausible N in header");
    VelocityGrid grid(extent, static_cast<int>(n));
    Eigen::ArrayXd values(grid.size());
    for (Eigen::Index p = 0; p < values.size(); ++p)
        values[p] = read_le<double>(in);
    return DistributionState(grid, std::move(values));
}

} // namespace bosekin
