#include "ccrystal/series.hpp"
#include "ccrystal/errors.hpp"
#include "ccrystal/fft.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace ccrystal {

using cd = std::complex<double>;

PeriodicSeries::PeriodicSeries(double period, std::vector<cd> coefficients)
    : period_(period), coefficients_(std::move(coefficients))
{
    if (!(period > 0.0))
        throw ValidationError("series: period must be positive");
    if (coefficients_.size() % 2 == 0)
        throw ValidationError("series: coefficient vector must have odd length");
}

PeriodicSeries PeriodicSeries::from_samples(double period, std::span<const cd> samples, double origin)
{
    const std::size_t n = samples.size();
    if (n < 4)
        throw ValidationError("series: need at least four samples");
    Fft fft(n);
    std::copy(samples.begin(), samples.end(), fft.data().begin());
    fft.forward();
    auto spectrum = fft.data();

    const int k_max = static_cast<int>((n - 1) / 2);
    std::vector<cd> coefficients(static_cast<std::size_t>(2 * k_max + 1));
    const double inv_n = 1.0 / static_cast<double>(n);
    const double omega = 2.0 * std::numbers::pi / period;
    for (int h = -k_max; h <= k_max; ++h) {
        const std::size_t idx = h >= 0 ? static_cast<std::size_t>(h) : n - static_cast<std::size_t>(-h);
        // Shift the phase reference from `origin` back to x = 0.
        coefficients[static_cast<std::size_t>(h + k_max)] =
            spectrum[idx] * inv_n * std::polar(1.0, -omega * h * origin);
    }
    return PeriodicSeries(period, std::move(coefficients)).trimmed();
}

cd PeriodicSeries::coefficient(int n) const
{
    const int k = max_harmonic();
    if (n < -k || n > k)
        return {};
    return coefficients_[static_cast<std::size_t>(n + k)];
}

cd PeriodicSeries::operator()(double x, int order) const
{
    const int k = max_harmonic();
    const double omega = 2.0 * std::numbers::pi / period_;
    const cd z = std::polar(1.0, omega * x);
    cd zp{1.0, 0.0};
    cd sum = coefficient(0) * (order == 0 ? 1.0 : 0.0);
    for (int n = 1; n <= k; ++n) {
        zp *= z;
        const cd ikp = std::pow(cd{0.0, omega * n}, order);
        const cd ikm = std::pow(cd{0.0, -omega * n}, order);
        sum += coefficient(n) * ikp * zp + coefficient(-n) * ikm * std::conj(zp);
    }
    return sum;
}

Eigen::ArrayXcd PeriodicSeries::sample(const Grid1D& grid, int order) const
{
    const int k = max_harmonic();
    const double omega = 2.0 * std::numbers::pi / period_;
    std::vector<cd> plus(static_cast<std::size_t>(k + 1)), minus(static_cast<std::size_t>(k + 1));
    for (int n = 0; n <= k; ++n) {
        plus[static_cast<std::size_t>(n)] = coefficient(n) * std::pow(cd{0.0, omega * n}, order);
        minus[static_cast<std::size_t>(n)] = coefficient(-n) * std::pow(cd{0.0, -omega * n}, order);
    }
    if (order > 0) {
        plus[0] = 0.0;
        minus[0] = 0.0;
    }

    Eigen::ArrayXcd out(static_cast<Eigen::Index>(grid.points()));
    for (std::size_t j = 0; j < grid.points(); ++j) {
        const double x = grid.x(j);
        const cd z = std::polar(1.0, omega * std::fmod(x, period_));
        cd zp{1.0, 0.0};
        cd sum = plus[0];
        for (int n = 1; n <= k; ++n) {
            // Re-anchor the power every 16 terms to bound rounding drift.
            zp = (n % 16 == 0) ? std::polar(1.0, omega * n * std::fmod(x, period_)) : zp * z;
            sum += plus[static_cast<std::size_t>(n)] * zp + minus[static_cast<std::size_t>(n)] * std::conj(zp);
        }
        out(static_cast<Eigen::Index>(j)) = sum;
    }
    return out;
}

PeriodicSeries PeriodicSeries::derivative() const
{
    const int k = max_harmonic();
    const double omega = 2.0 * std::numbers::pi / period_;
    std::vector<cd> c(coefficients_.size());
    for (int n = -k; n <= k; ++n)
        c[static_cast<std::size_t>(n + k)] = cd{0.0, omega * n} * coefficient(n);
    return {period_, std::move(c)};
}

PeriodicSeries PeriodicSeries::zero_mean_antiderivative() const
{
    const int k = max_harmonic();
    const double omega = 2.0 * std::numbers::pi / period_;
    std::vector<cd> c(coefficients_.size());
    cd at_zero{};
    for (int n = -k; n <= k; ++n) {
        if (n == 0)
            continue;
        const cd value = coefficient(n) / cd{0.0, omega * n};
        c[static_cast<std::size_t>(n + k)] = value;
        at_zero += value;
    }
    c[static_cast<std::size_t>(k)] = -at_zero;
    return {period_, std::move(c)};
}

PeriodicSeries PeriodicSeries::trimmed(double rel_tol) const
{
    const int k = max_harmonic();
    double biggest = 0.0;
    for (const auto& c : coefficients_)
        biggest = std::max(biggest, std::abs(c));
    int keep = k;
    while (keep > 0 && std::abs(coefficient(keep)) <= rel_tol * biggest &&
           std::abs(coefficient(-keep)) <= rel_tol * biggest)
        --keep;
    std::vector<cd> c(static_cast<std::size_t>(2 * keep + 1));
    for (int n = -keep; n <= keep; ++n)
        c[static_cast<std::size_t>(n + keep)] = coefficient(n);
    return {period_, std::move(c)};
}

} // namespace ccrystal
