// qfcover: coverage, class number and moment experiments for x^2 + d y^2.
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "qfcover/cli.hpp"

#ifndef QFCOVER_GIT_HASH
#define QFCOVER_GIT_HASH "unknown"
#endif

namespace {

struct Flag
{
    char const *name;
    char const *help;
};

constexpr Flag kFlags[] = {
    {"n", "upper limit N (scientific notation accepted)"},
    {"delta", "form cutoff Delta"},
    {"alpha", "comma-separated alpha values"},
    {"k", "comma-separated Omega values"},
    {"w", "small-prime cutoff W"},
    {"j", "2-adic class j (0 or 1)"},
    {"d", "comma-separated d values (discriminants for lvalues)"},
    {"dmin", "first discriminant of a range"},
    {"dmax", "last discriminant of a range"},
    {"prop", "moments: 5.2, 5.3, 5.4, 5.5, variance or all"},
    {"tol", "tail tolerance for L(1, chi)"},
    {"output", "output file (CSV gets a .json mirror)"},
    {"format", "stdout format: csv or json"},
    {"segment", "sieve segment size in entries"},
    {"workers", "worker threads"},
};

} // namespace

int main(int argc, char **argv)
{
    namespace qc = qfcover::cli;
    CLI::App app{"Experiments on integers of the form x^2 + d y^2"};
    app.require_subcommand(1);
    std::string config_path;
    app.add_option("--config", config_path, "key=value file; flags override it");
    std::map<std::string, std::string> values;
    std::map<std::string, CLI::Option *> opts;
    for (auto const &f : kFlags)
        opts[f.name] = app.add_option(std::string("--") + f.name, values[f.name], f.help)
                           ->allow_extra_args(false);
    for (char const *sub : {"phase", "perk", "selberg", "classnum", "lvalues", "moments", "verify"})
        app.add_subcommand(sub)->fallthrough();
    app.get_subcommand("phase")->description("coverage fraction against Phi(alpha)");
    app.get_subcommand("perk")->description("covered and uncovered counts per Omega(n) = k");
    app.get_subcommand("selberg")->description("|A(N,k)| against the Sathe-Selberg prediction");
    app.get_subcommand("classnum")->description("enumerated class numbers against the analytic formula");
    app.get_subcommand("lvalues")->description("certified L(1, chi_D) table");
    app.get_subcommand("moments")->description("weighted moment sums and their main terms");
    app.get_subcommand("verify")->description("small oracle cross-checks");

    try {
        app.parse(argc, argv);
    } catch (CLI::CallForHelp const &e) {
        return app.exit(e);
    } catch (CLI::ParseError const &e) {
        app.exit(e);
        return qc::kConfigError;
    }

    qc::RunConfig cfg;
    cfg.command = app.get_subcommands().front()->get_name();
    try {
        if (!config_path.empty())
            for (auto const &[k, v] : qc::read_config_file(config_path))
                if (!opts.contains(k) || opts[k]->count() == 0)
                    qc::apply_option(cfg, k, v);
        for (auto const &[k, opt] : opts)
            if (opt->count())
                qc::apply_option(cfg, k, values[k]);
    } catch (qc::ConfigError const &e) {
        std::cerr << "error: " << e.what() << '\n';
        return qc::kConfigError;
    }
    return qc::run(cfg, std::cout, std::cerr, QFCOVER_GIT_HASH);
}
