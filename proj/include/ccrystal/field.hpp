#pragma once

#include "ccrystal/grid.hpp"

#include <Eigen/Core>

#include <optional>

namespace ccrystal {

// Complex samples on a Grid1D with optional first/second derivative caches.
struct ComplexField {
    Grid1D grid;
    Eigen::ArrayXcd values;
    std::optional<Eigen::ArrayXcd> first;
    std::optional<Eigen::ArrayXcd> second;

    ComplexField(Grid1D g, Eigen::ArrayXcd v);
    ComplexField(Grid1D g, Eigen::ArrayXcd v, Eigen::ArrayXcd d1);
    ComplexField(Grid1D g, Eigen::ArrayXcd v, Eigen::ArrayXcd d1, Eigen::ArrayXcd d2);

    std::complex<double> operator[](std::size_t j) const { return values(static_cast<Eigen::Index>(j)); }
    std::size_t size() const { return static_cast<std::size_t>(values.size()); }
    bool finite() const;
};

// Spectral derivative of a field that is periodic on the grid domain.
Eigen::ArrayXcd spectral_derivative(const Grid1D& grid, const Eigen::ArrayXcd& values, int order);

// Returns the field with both derivative caches filled by spectral differentiation.
ComplexField with_spectral_derivatives(ComplexField field);

// Eighth-order centered second difference; the four samples at each end are
// left at zero (no stencil).
Eigen::ArrayXcd finite_difference_second(const Eigen::ArrayXcd& values, double spacing);

// Sup-norm of (-f'' + V f - E f) / sup|f| over the interior. Uses the field's
// second-derivative cache when present, else finite_difference_second. The
// `margin` outermost samples on each side are excluded.
double eigen_residual(const ComplexField& f, const ComplexField& potential, std::complex<double> energy,
                      std::size_t margin = 4);

// Same, as an L2 ratio ||r|| / ||f||.
double eigen_residual_l2(const ComplexField& f, const ComplexField& potential,
                         std::complex<double> energy, std::size_t margin = 4);

// Sup of |f| over x in [d, d + period) and (-d - period, -d].
double sup_at_distance(const ComplexField& f, double distance);

} // namespace ccrystal
