#pragma once

// Wave-packet propagation for i d/dt psi = -d^2/dx^2 psi + V(x) psi on a periodic grid.

#include "ccrystal/field.hpp"
#include "ccrystal/grid.hpp"

#include <Eigen/Core>

#include <functional>
#include <vector>

namespace ccrystal {

struct WavePacket {
    Grid1D grid;
    Eigen::ArrayXcd amplitudes;
    double time = 0.0;
    double initial_norm = 0.0;

    // L2 norm by grid quadrature.
    double norm() const;
};

struct PropagationConfig {
    double dt = 0.01;
    int steps = 45000;
    int snapshot_stride = 250;
    // Largest |psi| tolerated in the edge bands, relative to the peak.
    double boundary_guard = 1e-6;
    // Width of each edge band as a fraction of the grid.
    double edge_fraction = 1.0 / 64.0;

    double total_time() const { return dt * steps; }
    void validate() const;
};

// psi(x, 0) = exp(-(x - x0)^2 / w^2) exp(i k0 x), not unit-normalized.
// Requires |x0| + 3 w < L/2 and the sampled tail at the domain edges below edge_tolerance.
WavePacket gaussian_packet(const Grid1D& grid, double x0, double w, double k0, double edge_tolerance = 1e-6);

// Largest |psi| within the edge bands, relative to max |psi|.
double edge_ratio(const WavePacket& psi, double edge_fraction);

using SnapshotObserver = std::function<void(const WavePacket&)>;

// Strang split-step Fourier: half potential step, exact kinetic step in momentum
// space, half potential step. The observer sees t = 0, every snapshot_stride steps
// and the final state. Returns the final state.
// Throws BoundaryGuardError when the packet reaches the edge bands and
// NumericalGuardError when gain regions overflow.
WavePacket propagate(const WavePacket& psi, const ComplexField& potential, const PropagationConfig& config,
                     const SnapshotObserver& observer);

// Collects every snapshot.
std::vector<WavePacket> propagate(const WavePacket& psi, const ComplexField& potential,
                                  const PropagationConfig& config);

// Crank-Nicolson with the centered three-point Laplacian and zero Dirichlet ends.
// Independent of the FFT path; meant for cross-validation on resolved grids.
WavePacket propagate_reference(const WavePacket& psi, const ComplexField& potential,
                               const PropagationConfig& config);

// Relative L2 distance ||a - b|| / ||b||.
double relative_l2(const WavePacket& a, const WavePacket& b);

// <p> = <psi| -i d/dx |psi> / <psi|psi>, evaluated spectrally.
double momentum_expectation(const WavePacket& psi);

} // namespace ccrystal
