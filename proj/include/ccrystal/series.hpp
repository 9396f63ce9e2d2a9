#pragma once

#include "ccrystal/grid.hpp"

#include <Eigen/Core>

#include <complex>
#include <span>
#include <vector>

namespace ccrystal {

// Truncated Fourier series f(x) = sum_{n=-K..K} c_n exp(2 pi i n x / period).
class PeriodicSeries {
public:
    PeriodicSeries() = default;
    // coefficients[K + n] holds c_n; the vector length must be odd.
    PeriodicSeries(double period, std::vector<std::complex<double>> coefficients);

    // Interpolating series through S equispaced samples at x_s = origin + s * period / S.
    // The Nyquist mode is dropped, so S should oversample the function.
    static PeriodicSeries from_samples(double period, std::span<const std::complex<double>> samples,
                                       double origin = 0.0);

    // Samples f on a fine uniform mesh of one period and refits; used to build
    // series of nonlinear expressions (1/u^2, products) of other series.
    template <class F>
    static PeriodicSeries fit(double period, std::size_t samples, F&& f)
    {
        std::vector<std::complex<double>> values(samples);
        for (std::size_t s = 0; s < samples; ++s)
            values[s] = f(period * static_cast<double>(s) / static_cast<double>(samples));
        return from_samples(period, values);
    }

    double period() const { return period_; }
    int max_harmonic() const { return static_cast<int>(coefficients_.size() / 2); }
    std::complex<double> coefficient(int n) const;
    const std::vector<std::complex<double>>& coefficients() const { return coefficients_; }
    std::complex<double> mean() const { return coefficient(0); }

    // order-th derivative at x.
    std::complex<double> operator()(double x, int order = 0) const;
    Eigen::ArrayXcd sample(const Grid1D& grid, int order = 0) const;

    PeriodicSeries derivative() const;
    // Antiderivative of f - mean(f), normalized to vanish at x = 0.
    PeriodicSeries zero_mean_antiderivative() const;
    // Drops the outermost coefficients whose magnitude is below rel_tol * max|c_n|.
    PeriodicSeries trimmed(double rel_tol = 1e-17) const;

private:
    double period_ = 1.0;
    std::vector<std::complex<double>> coefficients_{std::complex<double>{}};
};

} // namespace ccrystal
