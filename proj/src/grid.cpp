#include "ccrystal/grid.hpp"
#include "ccrystal/errors.hpp"

#include <numbers>

namespace ccrystal {

Grid1D::Grid1D(double period, int periods, std::size_t points)
    : period_(period), periods_(periods), points_(points)
{
    if (!(period > 0.0))
        throw ValidationError("grid: period must be positive");
    if (periods < 1)
        throw ValidationError("grid: domain must hold at least one period");
    if (points < 2 || (points & (points - 1)) != 0)
        throw ValidationError("grid: point count must be a power of two");
}

Eigen::ArrayXd Grid1D::coordinates() const
{
    Eigen::ArrayXd xs(static_cast<Eigen::Index>(points_));
    for (std::size_t j = 0; j < points_; ++j)
        xs(static_cast<Eigen::Index>(j)) = x(j);
    return xs;
}

Eigen::ArrayXd Grid1D::wavenumbers() const
{
    const auto n = static_cast<Eigen::Index>(points_);
    const double dk = 2.0 * std::numbers::pi / length();
    Eigen::ArrayXd k(n);
    for (Eigen::Index j = 0; j < n; ++j)
        k(j) = dk * static_cast<double>(j < n / 2 ? j : j - n);
    return k;
}

std::size_t Grid1D::points_per_period() const
{
    const auto p = static_cast<std::size_t>(periods_);
    return points_ % p == 0 ? points_ / p : 0;
}

} // namespace ccrystal
