#include "bosekin/commands.hpp"

#include "CLI11.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    using namespace bosekin;
    CLI::App app{"Bose-Einstein homogeneous Boltzmann solver and bound checker"};
    app.require_subcommand(1);

    CommandOptions o;
    double slack = 0.0;
    double K = 0.0;
    app.add_option("--config", o.config, "Run configuration (INI)");
    app.add_option("--out", o.out, "Output directory");
    app.add_option("--threads", o.threads, "Worker threads (0 = OpenMP default)")->check(CLI::NonNegativeNumber);
    app.add_option("--seed", o.seed, "RNG seed for verification suites");
    auto* slack_opt = app.add_option("--slack", slack, "Multiplicative slack of monitored bounds")->check(CLI::PositiveNumber);

    auto* run = app.add_subcommand("run", "March the initial datum and monitor the bounds");
    auto* check = app.add_subcommand("check-theorem", "Evaluate the theorem's condition and constants");
    auto* K_opt = check->add_option("--K", K, "Enhancement ceiling override")->check(CLI::PositiveNumber);
    auto* verify = app.add_subcommand("verify", "Run randomized inequality suites");
    verify->add_option("--suite", o.suites, "Suite name (repeatable, or 'all')");
    verify->add_option("--trials", o.trials, "Trials per suite")->check(CLI::NonNegativeNumber);
    auto* bench = app.add_subcommand("bench", "Collision operator throughput");
    bench->add_option("--N", o.bench_points, "Points per axis")->check(CLI::Range(4, 256));

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e)
    {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_config;
    }
    if (slack_opt->count() > 0)
        o.slack = slack;
    if (K_opt->count() > 0)
        o.K = K;

    if ((run->parsed() || check->parsed()) && o.config.empty())
    {
        std::cerr << "error: --config is required\n";
        return exit_config;
    }

    if (run->parsed())
        return cmd_run(o, std::cout, std::cerr);
    if (check->parsed())
        return cmd_check_theorem(o, std::cout, std::cerr);
    if (verify->parsed())
        return cmd_verify(o, std::cout, std::cerr);
    return cmd_bench(o, std::cout, std::cerr);
}
