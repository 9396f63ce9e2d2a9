#include "cli/config.hpp"
#include "ccrystal/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <map>

namespace ccrystal::cli {

namespace {

void require(bool ok, const std::string& key, const std::string& message)
{
    if (!ok)
        throw ValidationError(fmt::format("config: {}: {}", key, message));
}

} // namespace

const std::vector<std::string>& potential_selectors()
{
    static const std::vector<std::string> names{"v0", "v1", "v2", "v3", "re_v2"};
    return names;
}

void RunConfig::validate() const
{
    require(std::isfinite(lattice.amplitude), "v0", "must be finite");
    require(std::isfinite(lattice.period) && lattice.period > 0.0, "period", "must be positive");
    require(harmonics >= 8 && harmonics <= 512, "harmonics", "must lie in [8, 512]");
    require(std::isfinite(synthesis.gamma), "gamma", "must be finite");
    require(std::isfinite(synthesis.lambda.real()), "lambda-re", "must be finite");
    require(std::isfinite(synthesis.lambda.imag()), "lambda-im", "must be finite");
    require(std::isfinite(x0), "x0", "must be finite");
    require(std::isfinite(w) && w > 0.0, "w", "must be positive");
    require(std::isfinite(k0), "k0", "must be finite");
    require(std::isfinite(propagation.dt) && propagation.dt > 0.0, "dt", "must be positive");
    require(propagation.steps > 0, "steps", "must be positive");
    require(propagation.snapshot_stride > 0, "stride", "must be positive");
    require(domain_periods >= 1, "domain-periods", "must be at least 1");
    require(grid_points >= 16 && (grid_points & (grid_points - 1)) == 0, "grid-points", "must be a power of two >= 16");
    require(grid_points % static_cast<std::size_t>(domain_periods) == 0 &&
                grid_points / static_cast<std::size_t>(domain_periods) >= 8,
            "grid-points", "must be a multiple of domain-periods with at least 8 points per period");
    require(std::abs(x0) + 3.0 * w < 0.5 * lattice.period * domain_periods, "x0",
            "packet (|x0| + 3 w) does not fit inside the domain; raise domain-periods");
    require(band >= 0 && band < 8, "band", "must lie in [0, 8)");
    require(std::isfinite(cut), "cut", "must be finite");
    require(std::isfinite(window) && window > 0.0, "window", "must be positive");
    require(max_columns >= 2, "columns", "must be at least 2");
    require(potentials.size() <= 3, "potential", "at most three potentials per run");
    for (const std::string& p : potentials)
        require(std::ranges::find(potential_selectors(), p) != potential_selectors().end(), "potential",
                fmt::format("unknown selector '{}' (expected v0, v1, v2, v3 or re_v2)", p));
    require(preset.empty() || preset == "fig2" || preset == "fig3" || preset == "fig4", "preset",
            "expected fig2, fig3 or fig4");
    lattice.validate();
    propagation.validate();
}

Grid1D RunConfig::grid() const
{
    return Grid1D(lattice.period, domain_periods, grid_points);
}

std::string RunConfig::canonical() const
{
    std::map<std::string, std::string> kv;
    auto num = [&](const char* key, double v) { kv[key] = fmt::format("{:.17g}", v); };
    num("v0", lattice.amplitude);
    num("period", lattice.period);
    num("harmonics", harmonics);
    num("gamma", synthesis.gamma);
    num("lambda-re", synthesis.lambda.real());
    num("lambda-im", synthesis.lambda.imag());
    num("x0", x0);
    num("w", w);
    num("k0", k0);
    num("dt", propagation.dt);
    num("steps", propagation.steps);
    num("stride", propagation.snapshot_stride);
    num("boundary-guard", propagation.boundary_guard);
    num("domain-periods", domain_periods);
    num("grid-points", static_cast<double>(grid_points));
    num("band", band);
    num("cut", cut);
    num("window", window);
    num("columns", max_columns);
    kv["potential"] = fmt::format("{}", fmt::join(potentials, ","));
    std::string text;
    for (const auto& [k, v] : kv)
        text += k + "=" + v + "\n";
    return text;
}

std::uint64_t fnv1a(const std::string& text)
{
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::uint64_t RunConfig::hash() const
{
    return fnv1a(canonical());
}

void apply_preset(RunConfig& config, const std::string& name, const std::set<std::string>& explicit_keys)
{
    auto set = [&](const char* key, auto& field, auto value) {
        if (!explicit_keys.contains(key))
            field = value;
    };
    set("v0", config.lattice.amplitude, 0.2);
    set("period", config.lattice.period, 2.0 * std::numbers::pi);
    if (name == "fig2") {
        set("gamma", config.synthesis.gamma, 2.0);
        if (!explicit_keys.contains("lambda-re"))
            config.synthesis.lambda.real(10.0);
        if (!explicit_keys.contains("lambda-im"))
            config.synthesis.lambda.imag(10.0);
    } else if (name == "fig3" || name == "fig4") {
        const bool fig3 = name == "fig3";
        set("gamma", config.synthesis.gamma, 2.0);
        set("x0", config.x0, fig3 ? -100.0 : -200.0);
        set("w", config.w, 40.0);
        set("k0", config.k0, fig3 ? 0.25 : 0.75);
        set("dt", config.propagation.dt, 0.01);
        set("steps", config.propagation.steps, 45000);
        set("band", config.band, fig3 ? 0 : 1);
        set("cut", config.cut, -50.0);
    } else {
        throw ValidationError(fmt::format("config: preset: unknown preset '{}' (expected fig2, fig3 or fig4)", name));
    }
}

} // namespace ccrystal::cli
