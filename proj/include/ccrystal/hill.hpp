#pragma once

// Band structure of the reference Hill (Mathieu) lattice and the band-edge
// functions that seed the Darboux transformations. Units: hbar = 2m = 1, so
// H = -d^2/dx^2 + V(x).

#include "ccrystal/field.hpp"
#include "ccrystal/grid.hpp"
#include "ccrystal/series.hpp"

#include <Eigen/Core>

#include <complex>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

namespace ccrystal {

inline constexpr int kDefaultHarmonics = 32;

// V(x) = amplitude * cos(2 pi x / period) + sum_n higher_harmonics[n-2] cos(2 pi n x / period) - shift
struct LatticeSpec {
    double amplitude = 0.2;
    double period = 2.0 * std::numbers::pi;
    double shift = 0.0;
    std::vector<double> higher_harmonics{};

    void validate() const;
    PeriodicSeries potential() const;
    double operator()(double x) const;
};

// Returns the spec with `shift` set so that its lowest band edge sits at zero.
LatticeSpec with_lowest_edge_at_zero(LatticeSpec spec, int harmonics = kDefaultHarmonics);

// Central-equation (plane-wave) Hamiltonian at quasimomentum k on the basis
// exp(i (k + 2 pi n / a) x), n = -harmonics..harmonics.
Eigen::MatrixXcd central_equation(const PeriodicSeries& potential, double k, int harmonics);

// All eigenvalues of central_equation, ascending.
std::vector<double> bloch_energies(const PeriodicSeries& potential, double k, int harmonics);

// First five band edges (eigenvalues at k = 0 and k = pi/a, merged and sorted).
// Throws ConvergenceError when doubling the truncation moves any edge by more than 1e-8.
std::vector<double> band_edge_energies(const LatticeSpec& spec, int harmonics = kDefaultHarmonics);

// Trace of the one-period monodromy matrix of -psi'' + V psi = E psi, fixed-step RK4.
// The result is compared against the half-step count; a disagreement larger than
// 1e-8 * max(1, |Delta|) raises ConvergenceError.
double hill_discriminant(const LatticeSpec& spec, double energy, int steps = 2048);

// Energies where |Delta(E)| = 2, found by scanning Delta -/+ 2 for sign changes and bisecting.
// Touching (degenerate) edges are not detected, so the V0 = 0 lattice yields only E0.
std::vector<double> discriminant_band_edges(const LatticeSpec& spec, std::size_t count = 5,
                                            int steps = 2048);

// Band-edge solutions at the lowest edge E0, both as periodic series (for pointwise
// evaluation) and sampled on a grid.
//
//   psi1 = u1,   psi2 = u2 + (x / a) u1
//
// u1 is nodeless, positive and scaled to max u1 = 1; psi2 comes from reduction of
// order, psi2 = u1 * int_0^x dxi / u1^2 divided by m a with m = mean(1 / u1^2).
struct BandEdgeData {
    LatticeSpec lattice;
    std::vector<double> edge_energies;   // edges of `lattice` as given, before removing E0
    double factorization_energy = 0.0;  // E0, subtracted to form the reference potential
    double mean_inverse_u1_squared = 1.0;
    double mean_u1_squared = 1.0;

    PeriodicSeries u1_series;
    PeriodicSeries u2_series;
    PeriodicSeries reference_series;        // V0(x) = lattice(x) - E0
    PeriodicSeries u1_squared_antiderivative;  // Q with int_0^x u1^2 = mean_u1_squared * x + Q(x)

    Grid1D grid{1.0, 1, 2};
    Eigen::ArrayXd u1, u1_d1, u1_d2;
    Eigen::ArrayXd u2, u2_d1, u2_d2;
    Eigen::ArrayXd reference_potential;

    double period() const { return lattice.period; }
    ComplexField reference_field() const;
};

BandEdgeData band_edge_solutions(const LatticeSpec& spec, const Grid1D& grid,
                                 int harmonics = kDefaultHarmonics);

// Bloch eigenstate psi = u(x) exp(i k x) with u given by a periodic series,
// normalized to mean |u|^2 = 1 and phase fixed by its largest coefficient.
struct BlochState {
    double k = 0.0;
    int band = 0;
    double energy = 0.0;
    PeriodicSeries periodic_part;

    // order-th derivative of psi at x.
    std::complex<double> operator()(double x, int order = 0) const;
    // psi sampled with both derivative caches.
    ComplexField field(const Grid1D& grid) const;
};

BlochState bloch_state(const PeriodicSeries& potential, double k, int band,
                       int harmonics = kDefaultHarmonics);
BlochState bloch_state(const LatticeSpec& spec, double k, int band, int harmonics = kDefaultHarmonics);

// Maps k into the first Brillouin zone (-pi/a, pi/a].
double fold_to_zone(double k, double period);

std::vector<std::pair<double, double>> dispersion(const LatticeSpec& spec, int band,
                                                  std::span<const double> k_samples,
                                                  int harmonics = kDefaultHarmonics);

// dE/dk of `band` at k (folded into the zone), by centered difference.
double group_velocity(const LatticeSpec& spec, int band, double k, int harmonics = kDefaultHarmonics);

} // namespace ccrystal
