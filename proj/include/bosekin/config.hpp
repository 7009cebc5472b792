#pragma once

#include "bosekin/collide.hpp"
#include "bosekin/grid.hpp"
#include "bosekin/kernel.hpp"
#include "bosekin/march.hpp"
#include "bosekin/quadrature.hpp"

#include <optional>
#include <string>
#include <vector>

namespace bosekin {

/// Malformed or inconsistent configuration document.
class ConfigError : public InputError
{
public:
    explicit ConfigError(const std::string& what) : InputError(what) {}
};

enum class DatumKind { IsotropicGaussian, AnisotropicGaussian, Ball, TwoMaxwellian, Raw };

struct InitialConfig
{
    DatumKind kind = DatumKind::IsotropicGaussian;
    double mass = 1.0;
    double temperature = 1.0;
    Eigen::Vector3d variances = Eigen::Vector3d::Ones();
    Eigen::Vector3d mean = Eigen::Vector3d::Zero();
    double radius = 1.0;
    double height = 1.0;
    double mass2 = 1.0;
    double temperature2 = 1.0;
    Eigen::Vector3d mean2 = Eigen::Vector3d::Zero();
    std::string path;
    double scale = 1.0;  ///< multiplies the datum (lambda)
    bool center = false;  ///< apply zero_mean_shift
};

/// Parsed run configuration. Sections: kernel, grid, initial, solver, checks, output.
struct RunConfig
{
    KernelSpec kernel;
    std::string psi_table;

    double extent = 4.0;
    int points = 16;
    int polar_order = 4;
    int azimuthal_order = 8;

    InitialConfig initial;

    SolverConfig solver;
    double n = unbounded;
    std::optional<double> K;  ///< defaults to 1/(4 beta + 2)

    std::vector<std::string> monitors;
    double slack = 1.05;

    std::string output_dir = "out";
    bool snapshots = false;

    VelocityGrid grid() const { return VelocityGrid(extent, points); }
    AngularQuadrature quadrature() const { return AngularQuadrature::product(polar_order, azimuthal_order); }
    CutoffParams params() const;
    double enhancement_ceiling() const;
};

/// Reads an INI-style document ([section] then key = value). Relative paths
/// resolve against the document's directory. Unknown keys are rejected.
RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& text, const std::string& base_dir = ".");

DistributionState build_initial(const RunConfig& cfg);

} // namespace bosekin
