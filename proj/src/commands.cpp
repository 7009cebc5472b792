#include "bosekin/commands.hpp"

#include "bosekin/bounds.hpp"
#include "bosekin/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace bosekin {

namespace {

std::string format17(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void apply_threads(int threads)
{
#ifdef _OPENMP
    if (threads > 0)
        omp_set_num_threads(threads);
#else
    (void)threads;
#endif
}

std::string output_dir(const CommandOptions& o, const RunConfig& cfg)
{
    return o.out.empty() ? cfg.output_dir : o.out;
}

void write_text(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw RuntimeFailure("cannot write " + path.string());
    out << text;
}

/// Checks the datum against the theorem's standing assumptions.
void require_datum(const MomentVector& m)
{
    if (!(m.m2 > 0.0))
        throw InputError("initial datum violates M2(f0) > 0");
    if (!(m.m0 > 0.0))
        throw InputError("initial datum violates M0(f0) > 0");
}

std::vector<Monitor> build_monitors(const RunConfig& cfg, const MomentVector& m0,
                                    const TheoremReport& report, double slack)
{
    std::vector<Monitor> monitors;
    for (const auto& name : cfg.monitors)
    {
        if (name == "moment_envelope")
            monitors.push_back(moment_envelope_monitor(m0, cfg.kernel.effective_b(), cfg.enhancement_ceiling(), slack));
        else if (name == "l13_uniform")
            monitors.push_back(l13_uniform_monitor(m0, report.C1, slack));
        else if (name == "linf_ceiling")
            monitors.push_back(linf_ceiling_monitor(report.predicted_sup, slack));
    }
    return monitors;
}

template <typename Body>
int guarded(std::ostream& err, Body&& body)
{
    try
    {
        return body();
    }
    catch (const InputError& e)
    {
        err << "error: " << e.what() << "\n";
        return exit_config;
    }
    catch (const std::exception& e)
    {
        err << "runtime failure: " << e.what() << "\n";
        return exit_runtime;
    }
}

} // namespace

std::string trajectory_csv(const Trajectory& trajectory, const std::vector<std::string>& monitors)
{
    std::string s = "t,M0,M1x,M1y,M1z,M2,L13,Linf,drift_mass,drift_momentum,drift_energy";
    for (const auto& m : monitors)
        s += ",margin_" + m;
    s += "\n";
    for (const auto& r : trajectory.records)
    {
        const MomentVector& m = r.moments;
        for (double x : {r.time, m.m0, m.m1.x(), m.m1.y(), m.m1.z(), m.m2, m.l1s[3], r.linf,
                         r.drift.mass, r.drift.momentum})
            s += format17(x) + ",";
        s += format17(r.drift.energy);
        for (const auto& name : monitors)
        {
            const auto it = r.flags.find(name);
            s += "," + (it == r.flags.end() ? std::string() : format17(it->second.margin));
        }
        s += "\n";
    }
    return s;
}

int cmd_run(const CommandOptions& o, std::ostream& out, std::ostream& err)
{
    return guarded(err, [&]() -> int {
        const RunConfig cfg = load_config(o.config);
        apply_threads(o.threads);
        const DistributionState f0 = build_initial(cfg);
        const MomentVector m0 = moments(f0);
        require_datum(m0);
        const double slack = o.slack.value_or(cfg.slack);
        const TheoremReport report = constants_chain(m0, cfg.kernel, cfg.enhancement_ceiling());

        const std::filesystem::path dir = output_dir(o, cfg);
        std::filesystem::create_directories(dir);
        write_text(dir / "theorem.json", to_json(report).dump(2) + "\n");

        CollisionOperator op(cfg.kernel, cfg.grid(), cfg.quadrature());
        op.set_threads(o.threads);
        const auto monitors = build_monitors(cfg, m0, report, slack);
        int snapshot = 0;
        SnapshotObserver observer;
        if (cfg.snapshots)
            observer = [&](const DistributionState& f) {
                char name[32];
                std::snprintf(name, sizeof name, "snapshot_%04d.bin", snapshot++);
                save_raw(f, (dir / name).string());
            };

        Trajectory traj;
        try
        {
            traj = run(op, f0, cfg.params(), cfg.solver, monitors, observer);
        }
        catch (const NumericalBreakdownError& e)
        {
            save_raw(e.last_good(), (dir / "breakdown_state.bin").string());
            err << "runtime failure: " << e.what() << " (last good state in "
                << (dir / "breakdown_state.bin").string() << ")\n";
            return exit_runtime;
        }
        write_text(dir / "trajectory.csv", trajectory_csv(traj, cfg.monitors));
        const bool ok = traj.all_monitors_pass();
        out << "records: " << traj.records.size() << ", steps: " << traj.steps
            << ", clamped mass: " << format17(traj.clamped_mass) << "\n";
        out << "monitors: " << (ok ? "pass" : "FAIL") << "\n";
        return ok ? exit_ok : exit_check_failed;
    });
}

int cmd_check_theorem(const CommandOptions& o, std::ostream& out, std::ostream& err)
{
    return guarded(err, [&]() -> int {
        const RunConfig cfg = load_config(o.config);
        const DistributionState f0 = build_initial(cfg);
        const MomentVector m0 = moments(f0);
        require_datum(m0);
        const double K = o.K ? *o.K : cfg.enhancement_ceiling();
        const TheoremReport report = constants_chain(m0, cfg.kernel, K);
        const std::string text = to_json(report).dump(2) + "\n";
        out << text;
        if (!o.out.empty())
        {
            std::filesystem::create_directories(o.out);
            write_text(std::filesystem::path(o.out) / "theorem.json", text);
        }
        return report.condition_holds ? exit_ok : exit_check_failed;
    });
}

int cmd_verify(const CommandOptions& o, std::ostream& out, std::ostream& err)
{
    return guarded(err, [&]() -> int {
        std::vector<std::string> selected;
        for (const auto& s : o.suites)
        {
            if (s == "all")
            {
                selected = suite_names();
                break;
            }
            selected.push_back(s);
        }
        if (selected.empty())
            selected = suite_names();
        for (const auto& s : selected)
            if (std::find(suite_names().begin(), suite_names().end(), s) == suite_names().end())
                throw InputError("unknown suite: " + s);
        if (o.trials == 0)
            err << "warning: trials = 0, every suite passes vacuously\n";

        SuiteOptions so;
        so.trials = o.trials;
        so.seed = o.seed;
        so.threads = o.threads;
        nlohmann::json report;
        report["schema"] = 1;
        report["suites"] = nlohmann::json::array();
        bool ok = true;
        for (const auto& s : selected)
        {
            const PropertyCase c = run_suite(s, so);
            ok = ok && c.status == CaseStatus::Pass;
            report["suites"].push_back(to_json(c));
        }
        report["pass"] = ok;
        const std::string text = report.dump(2) + "\n";
        out << text;
        if (!o.out.empty())
        {
            std::filesystem::create_directories(o.out);
            write_text(std::filesystem::path(o.out) / "verify.json", text);
        }
        return ok ? exit_ok : exit_check_failed;
    });
}

BenchResult bench_collision(int points, int polar_order, int azimuthal_order, int threads)
{
    const VelocityGrid grid(4.0, points);
    const DistributionState f = isotropic_gaussian(grid, 1.0, 1.0);
    CollisionOperator op(KernelSpec::hard_sphere(), grid, AngularQuadrature::product(polar_order, azimuthal_order));
    const CutoffParams params = CutoffParams::intermediate(k_star(3.0));
    const auto time = [&](int t) {
        op.set_threads(t);
        const auto start = std::chrono::steady_clock::now();
        const CollisionResult r = op.evaluate(f.values(), params);
        const auto stop = std::chrono::steady_clock::now();
        if (!r.net.allFinite())
            throw RuntimeFailure("bench: non-finite collision result");
        return std::chrono::duration<double>(stop - start).count();
    };
    BenchResult b;
    b.points = points;
    b.angles = op.quadrature().size();
    b.threads = threads;
    b.seconds_single = time(1);
    b.seconds_parallel = time(threads);
    b.speedup = b.seconds_single / b.seconds_parallel;
    return b;
}

int cmd_bench(const CommandOptions& o, std::ostream& out, std::ostream& err)
{
    return guarded(err, [&]() -> int {
        int polar = 4;
        int azimuthal = 8;
        int points = o.bench_points;
        if (!o.config.empty())
        {
            const RunConfig cfg = load_config(o.config);
            polar = cfg.polar_order;
            azimuthal = cfg.azimuthal_order;
            points = cfg.points;
        }
#ifdef _OPENMP
        const int threads = o.threads > 0 ? o.threads : omp_get_max_threads();
#else
        const int threads = 1;
#endif
        const BenchResult b = bench_collision(points, polar, azimuthal, threads);
        nlohmann::json j{{"schema", 1},
                         {"points_per_axis", b.points},
                         {"angles", b.angles},
                         {"threads", b.threads},
                         {"seconds_single", b.seconds_single},
                         {"seconds_parallel", b.seconds_parallel},
                         {"speedup", b.speedup}};
        out << j.dump(2) << "\n";
        return exit_ok;
    });
}

} // namespace bosekin
