#pragma once

// Run configuration shared by the ccrystal subcommands.

#include "ccrystal/darboux.hpp"
#include "ccrystal/hill.hpp"
#include "ccrystal/tdse.hpp"

#include <cstdint>
#include <set>
#include <string>
#include <vector>

namespace ccrystal::cli {

struct RunConfig {
    LatticeSpec lattice;  // shift is recomputed so that E0 = 0
    int harmonics = kDefaultHarmonics;
    SynthesisParams synthesis;

    double x0 = -100.0;
    double w = 40.0;
    double k0 = 0.25;
    PropagationConfig propagation;
    int domain_periods = 2048;
    std::size_t grid_points = std::size_t{1} << 16;

    int band = 0;
    double cut = -50.0;
    double window = 16.0;   // half-width of written potential profiles, in periods
    int max_columns = 2048; // x samples per snapshot row
    std::vector<std::string> potentials;

    std::string out = "out";
    std::string preset;

    void validate() const;
    Grid1D grid() const;
    // Every numeric field as sorted key=value lines; the hash covers this text.
    std::string canonical() const;
    std::uint64_t hash() const;
};

// Presets bundle the published parameters. Keys listed in `explicit_keys` keep
// the value the user gave.
void apply_preset(RunConfig& config, const std::string& name, const std::set<std::string>& explicit_keys);

std::uint64_t fnv1a(const std::string& text);

// Potential selectors accepted by `propagate` and `compare`.
const std::vector<std::string>& potential_selectors();

} // namespace ccrystal::cli
