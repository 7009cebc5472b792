#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <cstdint>
#include <string>

namespace bosekin {

/// Cell-centered uniform lattice on [-L, L]^3 with N points per axis.
/// Node (i, j, k) sits at (-L + (i + 1/2) h, ...) and has flat index (i N + j) N + k.
class VelocityGrid
{
public:
    VelocityGrid() = default;
    VelocityGrid(double extent, int points_per_axis);

    double extent() const { return extent_; }
    int points_per_axis() const { return n_; }
    double spacing() const { return 2.0 * extent_ / n_; }
    double cell_volume() const { return std::pow(spacing(), 3); }
    Eigen::Index size() const { return static_cast<Eigen::Index>(n_) * n_ * n_; }

    double coordinate(int i) const { return -extent_ + (i + 0.5) * spacing(); }
    Eigen::Index index(int i, int j, int k) const
    {
        return (static_cast<Eigen::Index>(i) * n_ + j) * n_ + k;
    }
    std::array<int, 3> multi_index(Eigen::Index flat) const;
    Eigen::Vector3d node(Eigen::Index flat) const;
    Eigen::Vector3d node(int i, int j, int k) const
    {
        return {coordinate(i), coordinate(j), coordinate(k)};
    }

    bool operator==(const VelocityGrid& other) const
    {
        return extent_ == other.extent_ && n_ == other.n_;
    }

private:
    double extent_ = 1.0;
    int n_ = 4;
};

/// Nonnegative samples of f(t, .) on a grid.
class DistributionState
{
public:
    DistributionState() = default;
    DistributionState(VelocityGrid grid, Eigen::ArrayXd values, double time = 0.0);

    const VelocityGrid& grid() const { return grid_; }
    const Eigen::ArrayXd& values() const { return values_; }
    double time() const { return time_; }

    DistributionState with_values(Eigen::ArrayXd values) const
    {
        return DistributionState(grid_, std::move(values), time_);
    }
    DistributionState at_time(double t) const { return DistributionState(grid_, values_, t); }

private:
    VelocityGrid grid_;
    Eigen::ArrayXd values_;
    double time_ = 0.0;
};

/// Moments M_k and weighted norms of a distribution.
struct MomentVector
{
    double m0 = 0.0;
    Eigen::Vector3d m1 = Eigen::Vector3d::Zero();
    double m2 = 0.0;
    std::array<double, 4> l1s{};  ///< ||f||_{L^1_s}, s = 0..3, weight <v>^s
    double linf = 0.0;
    double l2 = 0.0;
};

MomentVector moments(const VelocityGrid& grid, const Eigen::ArrayXd& values);
MomentVector moments(const DistributionState& f);

/// Sum of <v>^s |f| h^3 for any real s.
double weighted_l1(const VelocityGrid& grid, const Eigen::ArrayXd& values, double s);

/// <v> = sqrt(1 + |v|^2) at every node.
Eigen::ArrayXd japanese_bracket(const VelocityGrid& grid);

/// Field phi(v) sampled at every node.
template <typename Fn>
Eigen::ArrayXd sample(const VelocityGrid& grid, Fn&& phi)
{
    Eigen::ArrayXd out(grid.size());
    for (Eigen::Index p = 0; p < grid.size(); ++p)
        out[p] = phi(grid.node(p));
    return out;
}

/// 2 pi zeta(3/2)^{5/3} / (3 zeta(5/2)).
double temperature_coefficient();

/// Kinetic temperature over the critical temperature.
double temperature_ratio(const MomentVector& m);

struct ShiftResult
{
    DistributionState state;
    Eigen::Vector3d shift;   ///< mean velocity v0 that was removed
    double mass_loss = 0.0;  ///< mass pushed outside the grid
    bool truncated = false;
};

/// Translate f by -v0 with v0 = M1/M0 so the result has (near) zero mean velocity.
ShiftResult zero_mean_shift(const DistributionState& f);

/// Trilinear interpolation of nodal values. Ghost nodes one cell outside the
/// lattice hold zero, so the interpolant vanishes beyond them.
double interpolate(const VelocityGrid& grid, const Eigen::ArrayXd& values,
                   const Eigen::Vector3d& point);

// Initial data builders.
DistributionState isotropic_gaussian(const VelocityGrid& grid, double mass, double temperature,
                                     const Eigen::Vector3d& mean = Eigen::Vector3d::Zero());
DistributionState anisotropic_gaussian(const VelocityGrid& grid, double mass,
                                       const Eigen::Vector3d& variances,
                                       const Eigen::Vector3d& mean = Eigen::Vector3d::Zero());
DistributionState ball_indicator(const VelocityGrid& grid, double radius, double height);
DistributionState two_maxwellian(const VelocityGrid& grid, double mass1, double temperature1,
                                 const Eigen::Vector3d& mean1, double mass2,
                                 double temperature2, const Eigen::Vector3d& mean2);

/// Raw state file: u32 N, f64 L, u32 pad, then N^3 little-endian f64.
void save_raw(const DistributionState& f, const std::string& path);
DistributionState load_raw(const std::string& path);

} // namespace bosekin
