#pragma once

// Invisibility metrics comparing wave packets propagated in two potentials.

#include "ccrystal/field.hpp"
#include "ccrystal/hill.hpp"
#include "ccrystal/tdse.hpp"

#include <Eigen/Core>

#include <utility>
#include <vector>

namespace ccrystal {

// |<a, b>| / (||a|| ||b||). Packets must share grid and time stamp.
double fidelity(const WavePacket& a, const WavePacket& b);

// Fraction of |psi|^2 lying at x < cut.
double reflected_fraction(const WavePacket& psi, double cut);

double centroid(const WavePacket& psi);

// Fraction of |psi|^2 within half a standard deviation of the centroid: about 0.38
// for a single Gaussian, near zero for two well separated lumps.
double core_mass(const WavePacket& psi);

// (centroid(reference) - centroid(test)) / group_velocity; positive when the test
// packet lags. Rejects packets whose core_mass is below 0.25 (several lumps): filter
// them to one band with BlochBasis::project first.
double transit_delay(const WavePacket& reference, const WavePacket& test, double group_velocity);

// Exact Bloch eigenbasis of the pseudospectral Hamiltonian -d^2/dx^2 + V on a
// grid, for a lattice potential V that is periodic with the grid's period.
// Quasimomenta are the L-periodic ones, k_j = 2 pi j / L; each carries one
// state per plane wave of the period (points_per_period bands).
class BlochBasis {
public:
    explicit BlochBasis(const ComplexField& lattice_potential);

    const Grid1D& grid() const { return grid_; }
    int bands() const { return static_cast<int>(per_period_); }
    std::size_t kpoints() const { return kpoints_; }
    double energy(std::size_t kpoint, int band) const;

    // Norm fraction carried by each band (all bands; they sum to 1).
    std::vector<double> band_weights(const WavePacket& psi) const;
    // Component of psi in one band.
    WavePacket project(const WavePacket& psi, int band) const;

private:
    Grid1D grid_;
    std::size_t kpoints_;
    std::size_t per_period_;
    std::vector<Eigen::MatrixXcd> vectors_;
    std::vector<Eigen::VectorXd> energies_;
};

// First n_bands entries of BlochBasis::band_weights, as (band, weight).
std::vector<std::pair<int, double>> band_weights(const WavePacket& psi, const BlochBasis& basis, int n_bands);
// Convenience overload projecting onto the bands of a reference lattice.
std::vector<std::pair<int, double>> band_weights(const WavePacket& psi, const LatticeSpec& spec, int n_bands);

// Acceptance-grade proxies for "no reflection, no delay, no distortion".
struct InvisibilityThresholds {
    double min_fidelity = 0.999;
    double max_reflected_fraction = 1e-3;
    double max_delay = 1.0;
};

struct InvisibilityReport {
    int band = 0;
    double cut = 0.0;
    double fidelity = 0.0;            // band-filtered, test vs reference
    double raw_fidelity = 0.0;        // unfiltered
    double reflected_fraction = 0.0;  // band-filtered test packet
    double reference_reflected_fraction = 0.0;
    double raw_reflected_fraction = 0.0;
    double transit_delay = 0.0;       // NaN when a band component split into several lumps
    double group_velocity = 0.0;
    std::vector<std::pair<int, double>> band_weights;  // initial packet
    std::vector<std::pair<double, double>> norms_over_time;  // test run, ||psi(t)|| / ||psi(0)||
    InvisibilityThresholds thresholds;

    bool fidelity_ok() const { return fidelity >= thresholds.min_fidelity; }
    bool reflection_ok() const { return reflected_fraction < thresholds.max_reflected_fraction; }
    bool delay_ok() const { return std::abs(transit_delay) < thresholds.max_delay; }
    int violations() const { return !fidelity_ok() + !reflection_ok() + !delay_ok(); }
    bool invisible() const { return violations() == 0; }
};

// Compares the `band` components of test and reference packets taken at the same time.
InvisibilityReport assess_invisibility(const WavePacket& reference, const WavePacket& test, const BlochBasis& basis,
                                       int band, double cut, double group_velocity,
                                       InvisibilityThresholds thresholds = {});

} // namespace ccrystal
