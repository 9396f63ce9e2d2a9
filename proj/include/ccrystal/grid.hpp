#pragma once

#include <Eigen/Core>

#include <cstddef>

namespace ccrystal {

// Uniform periodic grid on [-L/2, L/2) where L is an integer number of
// lattice periods. The point count is a power of two.
class Grid1D {
public:
    Grid1D(double period, int periods, std::size_t points);

    double period() const { return period_; }
    int periods() const { return periods_; }
    double length() const { return period_ * periods_; }
    std::size_t points() const { return points_; }
    double spacing() const { return length() / static_cast<double>(points_); }

    double x(std::size_t j) const { return -0.5 * length() + static_cast<double>(j) * spacing(); }
    Eigen::ArrayXd coordinates() const;

    // Angular wavenumbers in FFT storage order.
    Eigen::ArrayXd wavenumbers() const;

    // Index of the sample at -x_j (periodic wrap for j = 0).
    std::size_t mirror(std::size_t j) const { return j == 0 ? 0 : points_ - j; }

    // Points per lattice period, or 0 when the period is not resolved by an
    // integer number of samples.
    std::size_t points_per_period() const;

    bool operator==(const Grid1D& other) const = default;

private:
    double period_;
    int periods_;
    std::size_t points_;
};

} // namespace ccrystal
