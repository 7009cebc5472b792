#include "bosekin/config.hpp"

#include "bosekin/bounds.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace bosekin {

namespace {

namespace pt = boost::property_tree;

std::string trim(std::string s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r");
    s = s.substr(first, last - first + 1);
    if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') || (s.front() == '\'' && s.back() == '\'')))
        s = s.substr(1, s.size() - 2);
    return s;
}

/// Section reader that remembers which keys were consumed.
class Section
{
public:
    Section(const pt::ptree& tree, std::string name) : name_(std::move(name))
    {
        if (auto child = tree.get_child_optional(name_))
            node_ = &*child;
    }

    std::optional<std::string> text(const std::string& key)
    {
        used_.insert(key);
        if (!node_)
            return std::nullopt;
        auto v = node_->get_optional<std::string>(key);
        if (!v)
            return std::nullopt;
        return trim(*v);
    }

    double number(const std::string& key, double fallback)
    {
        auto t = text(key);
        if (!t)
            return fallback;
        return parse_number(key, *t);
    }

    std::optional<double> optional_number(const std::string& key)
    {
        auto t = text(key);
        if (!t)
            return std::nullopt;
        return parse_number(key, *t);
    }

    int integer(const std::string& key, int fallback)
    {
        const double x = number(key, fallback);
        if (x != std::floor(x) || std::abs(x) > 1e9)
            throw ConfigError(name_ + "." + key + ": expected an integer");
        return static_cast<int>(x);
    }

    bool flag(const std::string& key, bool fallback)
    {
        auto t = text(key);
        if (!t)
            return fallback;
        std::string v = *t;
        std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
        if (v == "true" || v == "1" || v == "yes")
            return true;
        if (v == "false" || v == "0" || v == "no")
            return false;
        throw ConfigError(name_ + "." + key + ": expected true or false");
    }

    Eigen::Vector3d vector(const std::string& key, const Eigen::Vector3d& fallback)
    {
        auto t = text(key);
        if (!t)
            return fallback;
        std::string s = *t;
        std::replace(s.begin(), s.end(), ',', ' ');
        std::istringstream in(s);
        Eigen::Vector3d out;
        if (!(in >> out[0] >> out[1] >> out[2]))
            throw ConfigError(name_ + "." + key + ": expected three numbers");
        std::string rest;
        if (in >> rest)
            throw ConfigError(name_ + "." + key + ": expected three numbers");
        return out;
    }

    void reject_unknown() const
    {
        if (!node_)
            return;
        for (const auto& [key, value] : *node_)
            if (!used_.count(key))
                throw ConfigError("unknown key " + name_ + "." + key);
    }

private:
    double parse_number(const std::string& key, const std::string& t) const
    {
        std::string v = t;
        std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
        if (v == "inf" || v == "infinity")
            return unbounded;
        try
        {
            std::size_t used = 0;
            const double x = std::stod(t, &used);
            if (used != t.size())
                throw std::invalid_argument(t);
            return x;
        }
        catch (const std::exception&)
        {
            throw ConfigError(name_ + "." + key + ": expected a number, got '" + t + "'");
        }
    }

    std::string name_;
    const pt::ptree* node_ = nullptr;
    std::set<std::string> used_;
};

std::string resolve(const std::string& base_dir, const std::string& p)
{
    if (p.empty())
        return p;
    std::filesystem::path path(p);
    if (path.is_absolute())
        return p;
    return (std::filesystem::path(base_dir) / path).lexically_normal().string();
}

std::vector<std::string> split_list(const std::string& s)
{
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, ','))
    {
        item = trim(item);
        if (!item.empty())
            out.push_back(item);
    }
    return out;
}

} // namespace

CutoffParams RunConfig::params() const
{
    return {n, enhancement_ceiling()};
}

double RunConfig::enhancement_ceiling() const
{
    return K ? *K : k_star(kernel.beta);
}

RunConfig parse_config(const std::string& text, const std::string& base_dir)
{
    pt::ptree tree;
    try
    {
        std::istringstream in(text);
        pt::read_ini(in, tree);
    }
    catch (const pt::ini_parser_error& e)
    {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    static const std::set<std::string> sections{"kernel", "grid", "initial", "solver", "checks", "output"};
    for (const auto& [name, child] : tree)
    {
        if (!sections.count(name))
            throw ConfigError("unknown section [" + name + "]");
        if (child.empty() && !child.data().empty())
            throw ConfigError("key outside a section: " + name);
    }

    RunConfig cfg;

    Section kernel(tree, "kernel");
    const std::string family = kernel.text("family").value_or("hard_sphere");
    const double beta = kernel.number("beta", family == "yukawa" ? 4.0 : 3.0);
    const double hbar = kernel.number("hbar", 1.0);
    if (family == "hard_sphere")
    {
        cfg.kernel = KernelSpec::hard_sphere(beta, hbar);
        cfg.kernel.a = kernel.number("a", 1.0);
        cfg.kernel.b = kernel.number("b", 1.0);
    }
    else if (family == "yukawa")
    {
        cfg.kernel = KernelSpec::yukawa(hbar);
        cfg.kernel.a = kernel.number("a", cfg.kernel.a);
        cfg.kernel.b = kernel.number("b", cfg.kernel.b);
        cfg.kernel.beta = beta;
    }
    else if (family == "screened")
    {
        const auto table = kernel.text("psi_table");
        if (!table)
            throw ConfigError("kernel.psi_table is required for the screened family");
        cfg.psi_table = resolve(base_dir, *table);
        if (!std::filesystem::exists(cfg.psi_table))
            throw ConfigError("kernel.psi_table: file not found: " + cfg.psi_table);
        cfg.kernel = KernelSpec::screened(RadialProfile::load_csv(cfg.psi_table), kernel.number("a", 1.0),
                                          kernel.number("b", 1.0), beta, hbar);
    }
    else
        throw ConfigError("kernel.family must be hard_sphere, yukawa or screened");
    if (family != "screened" && kernel.text("psi_table"))
        throw ConfigError("kernel.psi_table only applies to the screened family");
    kernel.reject_unknown();
    cfg.kernel.validate();

    Section grid(tree, "grid");
    cfg.extent = grid.number("L", cfg.extent);
    cfg.points = grid.integer("N", cfg.points);
    cfg.polar_order = grid.integer("polar_order", cfg.polar_order);
    cfg.azimuthal_order = grid.integer("azimuthal_order", cfg.azimuthal_order);
    grid.reject_unknown();
    if (!(cfg.extent > 0.0) || cfg.points < 4)
        throw ConfigError("grid: need L > 0 and N >= 4");
    if (cfg.polar_order < 1 || cfg.azimuthal_order < 1)
        throw ConfigError("grid: angular orders must be >= 1");

    Section init(tree, "initial");
    InitialConfig& ic = cfg.initial;
    const std::string kind = init.text("kind").value_or("isotropic_gaussian");
    if (kind == "isotropic_gaussian")
        ic.kind = DatumKind::IsotropicGaussian;
    else if (kind == "anisotropic_gaussian")
        ic.kind = DatumKind::AnisotropicGaussian;
    else if (kind == "ball")
        ic.kind = DatumKind::Ball;
    else if (kind == "two_maxwellian")
        ic.kind = DatumKind::TwoMaxwellian;
    else if (kind == "raw")
        ic.kind = DatumKind::Raw;
    else
        throw ConfigError("initial.kind: unknown datum '" + kind + "'");
    ic.mass = init.number("mass", ic.mass);
    ic.temperature = init.number("temperature", ic.temperature);
    ic.variances = init.vector("variances", ic.variances);
    ic.mean = init.vector("mean", ic.mean);
    ic.radius = init.number("radius", ic.radius);
    ic.height = init.number("height", ic.height);
    ic.mass2 = init.number("mass2", ic.mass2);
    ic.temperature2 = init.number("temperature2", ic.temperature2);
    ic.mean2 = init.vector("mean2", ic.mean2);
    ic.scale = init.number("scale", ic.scale);
    ic.center = init.flag("center", ic.center);
    if (auto p = init.text("path"))
        ic.path = resolve(base_dir, *p);
    init.reject_unknown();
    if (ic.kind == DatumKind::Raw && !std::filesystem::exists(ic.path))
        throw ConfigError("initial.path: file not found: " + ic.path);
    if (!(ic.scale >= 0.0) || !std::isfinite(ic.scale))
        throw ConfigError("initial.scale must be finite and >= 0");

    Section solver(tree, "solver");
    const std::string scheme = solver.text("scheme").value_or("duhamel");
    if (scheme == "duhamel")
        cfg.solver.scheme = Scheme::DuhamelIntermediate;
    else if (scheme == "picard")
        cfg.solver.scheme = Scheme::PicardCutoff;
    else if (scheme == "euler")
        cfg.solver.scheme = Scheme::ExplicitEuler;
    else
        throw ConfigError("solver.scheme must be duhamel, picard or euler");
    cfg.solver.dt = solver.number("dt", cfg.solver.dt);
    cfg.solver.dt_output = solver.number("dt_output", cfg.solver.dt_output);
    cfg.solver.t_end = solver.number("t_end", cfg.solver.t_end);
    cfg.solver.picard_tol = solver.number("picard_tol", cfg.solver.picard_tol);
    cfg.solver.picard_max_iter = solver.integer("picard_max_iter", cfg.solver.picard_max_iter);
    cfg.solver.substeps_per_interval = solver.integer("substeps", cfg.solver.substeps_per_interval);
    cfg.solver.renormalize_conservation = solver.flag("renormalize", cfg.solver.renormalize_conservation);
    cfg.n = solver.number("n", cfg.n);
    cfg.K = solver.optional_number("K");
    solver.reject_unknown();
    try
    {
        cfg.solver.validate();
        cfg.params().validate();
    }
    catch (const InputError& e)
    {
        throw ConfigError(e.what());
    }
    if (cfg.solver.scheme == Scheme::PicardCutoff && !std::isfinite(cfg.n))
        throw ConfigError("solver.n must be finite for the picard scheme");

    Section checks(tree, "checks");
    cfg.monitors = split_list(checks.text("monitors").value_or("moment_envelope, l13_uniform, linf_ceiling"));
    for (const auto& m : cfg.monitors)
        if (m != "moment_envelope" && m != "l13_uniform" && m != "linf_ceiling")
            throw ConfigError("checks.monitors: unknown monitor '" + m + "'");
    cfg.slack = checks.number("slack", cfg.slack);
    checks.reject_unknown();
    if (!(cfg.slack > 0.0))
        throw ConfigError("checks.slack must be positive");

    Section output(tree, "output");
    cfg.output_dir = resolve(base_dir, output.text("directory").value_or(cfg.output_dir));
    cfg.snapshots = output.flag("snapshots", cfg.snapshots);
    output.reject_unknown();
    return cfg;
}

RunConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    const auto dir = std::filesystem::path(path).parent_path();
    return parse_config(buffer.str(), dir.empty() ? "." : dir.string());
}

DistributionState build_initial(const RunConfig& cfg)
{
    const VelocityGrid grid = cfg.grid();
    const InitialConfig& ic = cfg.initial;
    DistributionState f;
    switch (ic.kind)
    {
    case DatumKind::IsotropicGaussian:
        f = isotropic_gaussian(grid, ic.mass, ic.temperature, ic.mean);
        break;
    case DatumKind::AnisotropicGaussian:
        f = anisotropic_gaussian(grid, ic.mass, ic.variances, ic.mean);
        break;
    case DatumKind::Ball:
        f = ball_indicator(grid, ic.radius, ic.height);
        break;
    case DatumKind::TwoMaxwellian:
        f = two_maxwellian(grid, ic.mass, ic.temperature, ic.mean, ic.mass2, ic.temperature2, ic.mean2);
        break;
    case DatumKind::Raw:
        f = load_raw(ic.path);
        if (!(f.grid() == grid))
            throw ConfigError("initial.path: raw file grid does not match [grid] L and N");
        break;
    }
    if (ic.scale != 1.0)
        f = f.with_values(f.values() * ic.scale);
    if (ic.center)
        f = zero_mean_shift(f).state;
    return f;
}

} // namespace bosekin
