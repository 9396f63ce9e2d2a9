#include "ccrystal/analysis.hpp"
#include "ccrystal/errors.hpp"
#include "ccrystal/fft.hpp"

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace ccrystal {

using cd = std::complex<double>;
using Eigen::ArrayXcd;

namespace {

void same_frame(const WavePacket& a, const WavePacket& b, const char* who)
{
    if (!(a.grid == b.grid))
        throw ValidationError(fmt::format("{}: packets live on different grids", who));
    if (std::abs(a.time - b.time) > 1e-9 * std::max(1.0, std::abs(a.time)))
        throw ValidationError(fmt::format("{}: packets have different time stamps ({} vs {})", who, a.time, b.time));
}

double mass(const WavePacket& psi) { return psi.amplitudes.abs2().sum(); }

} // namespace

double fidelity(const WavePacket& a, const WavePacket& b)
{
    same_frame(a, b, "fidelity");
    const double na = mass(a), nb = mass(b);
    if (na == 0.0 || nb == 0.0)
        throw ValidationError("fidelity: zero-norm packet");
    const cd overlap = (a.amplitudes.conjugate() * b.amplitudes).sum();
    return std::min(1.0, std::abs(overlap) / std::sqrt(na * nb));
}

double reflected_fraction(const WavePacket& psi, double cut)
{
    const double total = mass(psi);
    if (total == 0.0)
        throw ValidationError("reflected_fraction: zero-norm packet");
    double left = 0.0;
    for (Eigen::Index j = 0; j < psi.amplitudes.size(); ++j)
        if (psi.grid.x(static_cast<std::size_t>(j)) < cut)
            left += std::norm(psi.amplitudes(j));
    return left / total;
}

double centroid(const WavePacket& psi)
{
    const Eigen::ArrayXd density = psi.amplitudes.abs2();
    return (density * psi.grid.coordinates()).sum() / density.sum();
}

double core_mass(const WavePacket& psi)
{
    const Eigen::ArrayXd density = psi.amplitudes.abs2();
    const Eigen::ArrayXd xs = psi.grid.coordinates();
    const double total = density.sum();
    const double c = (density * xs).sum() / total;
    const double sigma = std::sqrt((density * (xs - c).square()).sum() / total);
    return ((xs - c).abs() <= 0.5 * sigma).select(density, 0.0).sum() / total;
}

double transit_delay(const WavePacket& reference, const WavePacket& test, double group_velocity)
{
    same_frame(reference, test, "transit_delay");
    if (group_velocity == 0.0)
        throw ValidationError("transit_delay: zero group velocity");
    for (const WavePacket* p : {&reference, &test}) {
        if (core_mass(*p) < 0.25)
            throw ValidationError("transit_delay: packet is not a single lump (core mass below 0.25); "
                                  "filter it to one band with BlochBasis::project");
    }
    return (centroid(reference) - centroid(test)) / group_velocity;
}

BlochBasis::BlochBasis(const ComplexField& lattice_potential)
    : grid_(lattice_potential.grid),
      kpoints_(static_cast<std::size_t>(grid_.periods())),
      per_period_(grid_.points_per_period())
{
    if (per_period_ < 4)
        throw ValidationError("BlochBasis: the grid must resolve each period with the same (>= 4) samples");
    const auto m = static_cast<Eigen::Index>(per_period_);
    const ArrayXcd& v = lattice_potential.values;
    const double scale = std::max(1.0, v.abs().maxCoeff());
    for (std::size_t p = 1; p < kpoints_; ++p) {
        if ((v.segment(static_cast<Eigen::Index>(p) * m, m) - v.head(m)).abs().maxCoeff() > 1e-9 * scale)
            throw ValidationError("BlochBasis: lattice potential is not periodic on the grid");
    }
    if (v.imag().abs().maxCoeff() > 1e-12 * scale)
        throw ValidationError("BlochBasis: lattice potential must be real");

    // DFT of one period of samples: coupling between plane waves n and n' is vhat[(n - n') mod M].
    Fft fft(per_period_);
    auto data = fft.data();
    for (Eigen::Index s = 0; s < m; ++s)
        data[static_cast<std::size_t>(s)] = v(s).real();
    fft.forward();
    std::vector<cd> vhat(data.begin(), data.end());
    for (auto& c : vhat)
        c /= static_cast<double>(per_period_);

    const std::size_t n = grid_.points();
    const double dk = 2.0 * std::numbers::pi / grid_.length();
    vectors_.reserve(kpoints_);
    energies_.reserve(kpoints_);
    Eigen::MatrixXcd h(m, m);
    for (std::size_t j = 0; j < kpoints_; ++j) {
        for (Eigen::Index r = 0; r < m; ++r) {
            for (Eigen::Index c = 0; c < m; ++c)
                h(r, c) = vhat[static_cast<std::size_t>(((r - c) % m + m) % m)];
            const std::size_t l = j + kpoints_ * static_cast<std::size_t>(r);
            const double q = dk * (l < n / 2 ? static_cast<double>(l) : static_cast<double>(l) - static_cast<double>(n));
            h(r, r) += q * q;
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h);
        vectors_.push_back(solver.eigenvectors());
        energies_.push_back(solver.eigenvalues());
    }
}

double BlochBasis::energy(std::size_t kpoint, int band) const
{
    return energies_.at(kpoint)(band);
}

namespace {

void spectrum(const WavePacket& psi, Fft& fft)
{
    auto data = fft.data();
    std::copy(psi.amplitudes.begin(), psi.amplitudes.end(), data.begin());
    fft.forward();
}

} // namespace

std::vector<double> BlochBasis::band_weights(const WavePacket& psi) const
{
    if (!(psi.grid == grid_))
        throw ValidationError("band_weights: packet and basis live on different grids");
    Fft fft(grid_.points());
    spectrum(psi, fft);
    auto data = fft.data();
    const auto m = static_cast<Eigen::Index>(per_period_);
    std::vector<double> weights(per_period_, 0.0);
    double total = 0.0;
    Eigen::VectorXcd block(m);
    for (std::size_t j = 0; j < kpoints_; ++j) {
        for (Eigen::Index r = 0; r < m; ++r)
            block(r) = data[j + kpoints_ * static_cast<std::size_t>(r)];
        total += block.squaredNorm();
        const Eigen::VectorXcd c = vectors_[j].adjoint() * block;
        for (Eigen::Index b = 0; b < m; ++b)
            weights[static_cast<std::size_t>(b)] += std::norm(c(b));
    }
    if (total == 0.0)
        throw ValidationError("band_weights: zero-norm packet");
    for (auto& w : weights)
        w /= total;
    return weights;
}

WavePacket BlochBasis::project(const WavePacket& psi, int band) const
{
    if (!(psi.grid == grid_))
        throw ValidationError("project: packet and basis live on different grids");
    if (band < 0 || band >= bands())
        throw ValidationError(fmt::format("project: band {} outside the {} available", band, bands()));
    Fft fft(grid_.points());
    spectrum(psi, fft);
    auto data = fft.data();
    const auto m = static_cast<Eigen::Index>(per_period_);
    Eigen::VectorXcd block(m);
    for (std::size_t j = 0; j < kpoints_; ++j) {
        for (Eigen::Index r = 0; r < m; ++r)
            block(r) = data[j + kpoints_ * static_cast<std::size_t>(r)];
        const auto vec = vectors_[j].col(band);
        const cd c = vec.dot(block);
        for (Eigen::Index r = 0; r < m; ++r)
            data[j + kpoints_ * static_cast<std::size_t>(r)] = c * vec(r) / static_cast<double>(grid_.points());
    }
    fft.backward();
    WavePacket out = psi;
    std::copy(data.begin(), data.end(), out.amplitudes.begin());
    return out;
}

std::vector<std::pair<int, double>> band_weights(const WavePacket& psi, const BlochBasis& basis, int n_bands)
{
    if (n_bands < 1 || n_bands > basis.bands())
        throw ValidationError(fmt::format("band_weights: {} bands requested, {} computed", n_bands, basis.bands()));
    const std::vector<double> all = basis.band_weights(psi);
    std::vector<std::pair<int, double>> out;
    for (int b = 0; b < n_bands; ++b)
        out.emplace_back(b, all[static_cast<std::size_t>(b)]);
    return out;
}

std::vector<std::pair<int, double>> band_weights(const WavePacket& psi, const LatticeSpec& spec, int n_bands)
{
    const ComplexField v{psi.grid, spec.potential().sample(psi.grid).real().cast<cd>()};
    return band_weights(psi, BlochBasis(v), n_bands);
}

InvisibilityReport assess_invisibility(const WavePacket& reference, const WavePacket& test, const BlochBasis& basis,
                                       int band, double cut, double group_velocity, InvisibilityThresholds thresholds)
{
    same_frame(reference, test, "assess_invisibility");
    const WavePacket ref_band = basis.project(reference, band);
    const WavePacket test_band = basis.project(test, band);
    InvisibilityReport r;
    r.band = band;
    r.cut = cut;
    r.thresholds = thresholds;
    r.group_velocity = group_velocity;
    r.fidelity = fidelity(ref_band, test_band);
    r.raw_fidelity = fidelity(reference, test);
    r.reflected_fraction = reflected_fraction(test_band, cut);
    r.reference_reflected_fraction = reflected_fraction(ref_band, cut);
    r.raw_reflected_fraction = reflected_fraction(test, cut);
    if (core_mass(ref_band) >= 0.25 && core_mass(test_band) >= 0.25)
        r.transit_delay = transit_delay(ref_band, test_band, group_velocity);
    else
        r.transit_delay = std::numeric_limits<double>::quiet_NaN();
    return r;
}

} // namespace ccrystal
