#include "cli/commands.hpp"
#include "cli/config.hpp"
#include "ccrystal/errors.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <iostream>

using namespace ccrystal;

int main(int argc, char** argv)
{
    cli::RunConfig cfg;
    double lambda_re = cfg.synthesis.lambda.real();
    double lambda_im = cfg.synthesis.lambda.imag();

    CLI::App app{"Invisible defects in complex crystals: band structure, Darboux synthesis, wave-packet runs"};
    app.set_version_flag("--version", std::string(cli::kVersion));
    app.set_config("--config", "", "flat key = value file; command-line flags override it");
    app.fallthrough();
    app.require_subcommand(1);

    app.add_option("--v0", cfg.lattice.amplitude, "Mathieu amplitude")->capture_default_str();
    app.add_option("--period", cfg.lattice.period, "lattice period a")->capture_default_str();
    app.add_option("--harmonics", cfg.harmonics, "plane-wave truncation |n| <= harmonics")->capture_default_str();
    app.add_option("--gamma", cfg.synthesis.gamma, "defect strength of V2")->capture_default_str();
    app.add_option("--lambda-re", lambda_re, "Re lambda of V3")->capture_default_str();
    app.add_option("--lambda-im", lambda_im, "Im lambda of V3")->capture_default_str();
    app.add_option("--x0", cfg.x0, "initial packet centre")->capture_default_str();
    app.add_option("--w", cfg.w, "initial packet width")->capture_default_str();
    app.add_option("--k0", cfg.k0, "initial mean momentum")->capture_default_str();
    app.add_option("--dt", cfg.propagation.dt, "time step")->capture_default_str();
    app.add_option("--steps", cfg.propagation.steps, "number of time steps")->capture_default_str();
    app.add_option("--stride", cfg.propagation.snapshot_stride, "steps between snapshots")->capture_default_str();
    app.add_option("--boundary-guard", cfg.propagation.boundary_guard, "largest edge |psi| relative to the peak")
        ->capture_default_str();
    app.add_option("--grid-points", cfg.grid_points, "grid points (power of two)")->capture_default_str();
    app.add_option("--domain-periods", cfg.domain_periods, "domain length in periods")->capture_default_str();
    app.add_option("--band", cfg.band, "band compared in invisibility reports")->capture_default_str();
    app.add_option("--cut", cfg.cut, "packets at x < cut count as reflected")->capture_default_str();
    app.add_option("--window", cfg.window, "half-width of written potential profiles, in periods")
        ->capture_default_str();
    app.add_option("--columns", cfg.max_columns, "x samples per snapshot row")->capture_default_str();
    app.add_option("--out", cfg.out, "output directory")->capture_default_str();
    app.add_option("--preset", cfg.preset, "fig2, fig3 or fig4")->check(CLI::IsMember({"fig2", "fig3", "fig4"}));

    auto* band = app.add_subcommand("band", "band edges, dispersion and band-edge functions");
    auto* synth = app.add_subcommand("synth", "V1, V2, V3 and their bound states");
    auto* prop = app.add_subcommand("propagate", "wave-packet snapshots; a report when several potentials are given");
    auto* cmp = app.add_subcommand("compare", "invisibility reports of test potentials against a reference");
    for (auto* sub : {prop, cmp})
        sub->add_option("--potential,-p", cfg.potentials, "v0, v1, v2, v3 or re_v2; the first is the reference")
            ->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    std::set<std::string> explicit_keys;
    for (const CLI::Option* opt : app.get_options())
        if (opt->count() > 0 && !opt->get_lnames().empty())
            explicit_keys.insert(opt->get_lnames().front());
    cfg.synthesis.lambda = {lambda_re, lambda_im};

    try {
        if (!cfg.preset.empty())
            cli::apply_preset(cfg, cfg.preset, explicit_keys);
        if (band->parsed())
            cli::cmd_band(cfg, std::cout);
        else if (synth->parsed())
            cli::cmd_synth(cfg, std::cout);
        else if (prop->parsed())
            cli::cmd_propagate(cfg, true, std::cout);
        else
            cli::cmd_propagate(cfg, false, std::cout);
    } catch (const ValidationError& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return 2;
    } catch (const NumericalGuardError& e) {
        fmt::print(stderr, "numerical guard: {}\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return 1;
    }
    return 0;
}
