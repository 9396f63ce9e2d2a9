#include "ccrystal/tdse.hpp"
#include "ccrystal/errors.hpp"
#include "ccrystal/fft.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace ccrystal {

using cd = std::complex<double>;
using Eigen::ArrayXcd;

double WavePacket::norm() const { return std::sqrt(amplitudes.abs2().sum() * grid.spacing()); }

void PropagationConfig::validate() const
{
    if (!(dt > 0.0) || !std::isfinite(dt))
        throw ValidationError("propagation: dt must be positive");
    if (steps < 1)
        throw ValidationError("propagation: steps must be positive");
    if (snapshot_stride < 1)
        throw ValidationError("propagation: snapshot_stride must be positive");
    if (!(boundary_guard > 0.0 && boundary_guard < 1.0))
        throw ValidationError("propagation: boundary_guard must lie in (0, 1)");
    if (!(edge_fraction > 0.0 && edge_fraction < 0.5))
        throw ValidationError("propagation: edge_fraction must lie in (0, 1/2)");
}

WavePacket gaussian_packet(const Grid1D& grid, double x0, double w, double k0, double edge_tolerance)
{
    if (!(w > 0.0))
        throw ValidationError("gaussian_packet: width must be positive");
    const double half = 0.5 * grid.length();
    if (!(std::abs(x0) + 3.0 * w < half))
        throw ValidationError(fmt::format("gaussian_packet: packet at x0 = {} with w = {} does not fit in "
                                          "[-{}, {})",
                                          x0, w, half, half));
    const Eigen::ArrayXd xs = grid.coordinates();
    const Eigen::ArrayXd envelope = (-(xs - x0).square() / (w * w)).exp();
    WavePacket psi{grid, envelope.cast<cd>() * (cd{0.0, k0} * xs.cast<cd>()).exp(), 0.0, 0.0};
    const double tail = std::max(envelope(0), envelope(envelope.size() - 1));
    if (tail > edge_tolerance)
        throw ValidationError(fmt::format("gaussian_packet: tail amplitude {:.3g} at the domain edge exceeds {:.3g}",
                                          tail, edge_tolerance));
    psi.initial_norm = psi.norm();
    return psi;
}

double edge_ratio(const WavePacket& psi, double edge_fraction)
{
    const Eigen::Index n = psi.amplitudes.size();
    const auto band = std::max<Eigen::Index>(1, static_cast<Eigen::Index>(edge_fraction * static_cast<double>(n)));
    const double peak = psi.amplitudes.abs().maxCoeff();
    const double edge = std::max(psi.amplitudes.head(band).abs().maxCoeff(), psi.amplitudes.tail(band).abs().maxCoeff());
    return peak > 0.0 ? edge / peak : 0.0;
}

namespace {

void check_inputs(const WavePacket& psi, const ComplexField& potential, const PropagationConfig& config)
{
    config.validate();
    if (!(psi.grid == potential.grid))
        throw ValidationError("propagate: wave packet and potential live on different grids");
    if (!psi.amplitudes.isFinite().all())
        throw ValidationError("propagate: initial amplitudes are not finite");
    if (!potential.finite())
        throw ValidationError("propagate: potential has non-finite samples");
}

void guard(const WavePacket& psi, const ComplexField& potential, const PropagationConfig& config)
{
    const double peak = psi.amplitudes.abs().maxCoeff();
    if (!std::isfinite(peak) || peak > 1e150)
        throw NumericalGuardError(fmt::format("propagate: amplitude overflow at t = {} (max Im V = {:.4g})", psi.time,
                                              potential.values.imag().maxCoeff()));
    const double ratio = edge_ratio(psi, config.edge_fraction);
    if (ratio > config.boundary_guard)
        throw BoundaryGuardError(fmt::format("propagate: |psi| at the domain edge reached {:.3g} of the peak at t = {} "
                                             "(guard {:.3g}); enlarge the domain",
                                             ratio, psi.time, config.boundary_guard));
}

} // namespace

WavePacket propagate(const WavePacket& psi, const ComplexField& potential, const PropagationConfig& config,
                     const SnapshotObserver& observer)
{
    check_inputs(psi, potential, config);
    const std::size_t n = psi.grid.points();
    const double dt = config.dt;

    const ArrayXcd half_potential = (cd{0.0, -0.5 * dt} * potential.values).exp();
    const ArrayXcd kinetic = (cd{0.0, -dt} * psi.grid.wavenumbers().square().cast<cd>()).exp() / static_cast<double>(n);

    Fft fft(n);
    auto data = fft.data();
    Eigen::Map<ArrayXcd> state(data.data(), static_cast<Eigen::Index>(n));
    state = psi.amplitudes;

    WavePacket snapshot = psi;
    guard(snapshot, potential, config);
    if (observer)
        observer(snapshot);

    for (int step = 1; step <= config.steps; ++step) {
        state *= half_potential;
        fft.forward();
        state *= kinetic;
        fft.backward();
        state *= half_potential;

        if (step % config.snapshot_stride == 0 || step == config.steps) {
            snapshot.amplitudes = state;
            snapshot.time = psi.time + dt * step;
            guard(snapshot, potential, config);
            if (observer)
                observer(snapshot);
        }
    }
    return snapshot;
}

std::vector<WavePacket> propagate(const WavePacket& psi, const ComplexField& potential, const PropagationConfig& config)
{
    std::vector<WavePacket> snapshots;
    propagate(psi, potential, config, [&](const WavePacket& s) { snapshots.push_back(s); });
    return snapshots;
}

WavePacket propagate_reference(const WavePacket& psi, const ComplexField& potential, const PropagationConfig& config)
{
    check_inputs(psi, potential, config);
    const Eigen::Index n = psi.amplitudes.size();
    const double dx = psi.grid.spacing();
    const double dt = config.dt;
    const cd off = cd{0.0, 0.5 * dt} * (-1.0 / (dx * dx));  // i dt/2 * H off-diagonal
    const ArrayXcd diag = cd{0.0, 0.5 * dt} * (2.0 / (dx * dx) + potential.values);

    // Thomas factorization of (1 + i dt/2 H), constant over time.
    ArrayXcd c_prime(n), inv_denominator(n);
    {
        cd denom = 1.0 + diag(0);
        if (std::abs(denom) == 0.0)
            throw NumericalGuardError("propagate_reference: singular tridiagonal system");
        inv_denominator(0) = 1.0 / denom;
        c_prime(0) = off * inv_denominator(0);
        for (Eigen::Index j = 1; j < n; ++j) {
            denom = 1.0 + diag(j) - off * c_prime(j - 1);
            if (std::abs(denom) < 1e-300)
                throw NumericalGuardError("propagate_reference: tridiagonal solve broke down");
            inv_denominator(j) = 1.0 / denom;
            c_prime(j) = off * inv_denominator(j);
        }
    }

    WavePacket out = psi;
    ArrayXcd& u = out.amplitudes;
    ArrayXcd rhs(n);
    for (int step = 1; step <= config.steps; ++step) {
        for (Eigen::Index j = 0; j < n; ++j) {
            cd r = (1.0 - diag(j)) * u(j);
            if (j > 0)
                r -= off * u(j - 1);
            if (j + 1 < n)
                r -= off * u(j + 1);
            rhs(j) = r;
        }
        u(0) = rhs(0) * inv_denominator(0);
        for (Eigen::Index j = 1; j < n; ++j)
            u(j) = (rhs(j) - off * u(j - 1)) * inv_denominator(j);
        for (Eigen::Index j = n - 2; j >= 0; --j)
            u(j) -= c_prime(j) * u(j + 1);
        if (step % config.snapshot_stride == 0 || step == config.steps) {
            out.time = psi.time + dt * step;
            guard(out, potential, config);
        }
    }
    return out;
}

double relative_l2(const WavePacket& a, const WavePacket& b)
{
    if (!(a.grid == b.grid))
        throw ValidationError("relative_l2: packets live on different grids");
    return std::sqrt((a.amplitudes - b.amplitudes).abs2().sum() / b.amplitudes.abs2().sum());
}

double momentum_expectation(const WavePacket& psi)
{
    const Eigen::ArrayXcd dpsi = spectral_derivative(psi.grid, psi.amplitudes, 1);
    const cd num = (psi.amplitudes.conjugate() * cd{0.0, -1.0} * dpsi).sum();
    return num.real() / psi.amplitudes.abs2().sum();
}

} // namespace ccrystal
