#include "ccrystal/field.hpp"
#include "ccrystal/errors.hpp"
#include "ccrystal/fft.hpp"

#include <algorithm>
#include <cmath>

namespace ccrystal {

namespace {

void check_size(const Grid1D& grid, const Eigen::ArrayXcd& a, const char* what)
{
    if (static_cast<std::size_t>(a.size()) != grid.points())
        throw ValidationError(std::string("field: ") + what + " size does not match grid");
}

} // namespace

ComplexField::ComplexField(Grid1D g, Eigen::ArrayXcd v) : grid(g), values(std::move(v))
{
    check_size(grid, values, "values");
}

ComplexField::ComplexField(Grid1D g, Eigen::ArrayXcd v, Eigen::ArrayXcd d1)
    : grid(g), values(std::move(v)), first(std::move(d1))
{
    check_size(grid, values, "values");
    check_size(grid, *first, "first derivative");
}

ComplexField::ComplexField(Grid1D g, Eigen::ArrayXcd v, Eigen::ArrayXcd d1, Eigen::ArrayXcd d2)
    : grid(g), values(std::move(v)), first(std::move(d1)), second(std::move(d2))
{
    check_size(grid, values, "values");
    check_size(grid, *first, "first derivative");
    check_size(grid, *second, "second derivative");
}

bool ComplexField::finite() const { return values.isFinite().all(); }

Eigen::ArrayXcd spectral_derivative(const Grid1D& grid, const Eigen::ArrayXcd& values, int order)
{
    check_size(grid, values, "values");
    const auto n = static_cast<Eigen::Index>(grid.points());
    Fft fft(grid.points());
    auto data = fft.data();
    std::copy(values.begin(), values.end(), data.begin());
    fft.forward();
    const Eigen::ArrayXd k = grid.wavenumbers();
    for (Eigen::Index j = 0; j < n; ++j) {
        std::complex<double> factor = std::pow(std::complex<double>{0.0, k(j)}, order);
        // The Nyquist mode has no well-defined sign for odd orders.
        if (j == n / 2 && order % 2 == 1)
            factor = 0.0;
        data[static_cast<std::size_t>(j)] *= factor / static_cast<double>(n);
    }
    fft.backward();
    Eigen::ArrayXcd out(n);
    std::copy(data.begin(), data.end(), out.begin());
    return out;
}

ComplexField with_spectral_derivatives(ComplexField field)
{
    field.first = spectral_derivative(field.grid, field.values, 1);
    field.second = spectral_derivative(field.grid, field.values, 2);
    return field;
}

Eigen::ArrayXcd finite_difference_second(const Eigen::ArrayXcd& values, double spacing)
{
    static constexpr double c[5] = {-205.0 / 72.0, 8.0 / 5.0, -1.0 / 5.0, 8.0 / 315.0, -1.0 / 560.0};
    const Eigen::Index n = values.size();
    Eigen::ArrayXcd out = Eigen::ArrayXcd::Zero(n);
    const double inv_h2 = 1.0 / (spacing * spacing);
    for (Eigen::Index j = 4; j + 4 < n; ++j) {
        std::complex<double> acc = c[0] * values(j);
        for (int m = 1; m <= 4; ++m)
            acc += c[m] * (values(j + m) + values(j - m));
        out(j) = acc * inv_h2;
    }
    return out;
}

namespace {

Eigen::ArrayXcd residual_vector(const ComplexField& f, const ComplexField& potential,
                                std::complex<double> energy)
{
    if (!(f.grid == potential.grid))
        throw ValidationError("eigen_residual: field and potential live on different grids");
    const Eigen::ArrayXcd d2 = f.second ? *f.second : finite_difference_second(f.values, f.grid.spacing());
    return -d2 + (potential.values - energy) * f.values;
}

} // namespace

double eigen_residual(const ComplexField& f, const ComplexField& potential, std::complex<double> energy,
                      std::size_t margin)
{
    margin = std::max<std::size_t>(margin, f.second ? 0 : 4);
    const Eigen::ArrayXcd r = residual_vector(f, potential, energy);
    const auto m = static_cast<Eigen::Index>(margin);
    const Eigen::Index len = r.size() - 2 * m;
    if (len <= 0)
        throw ValidationError("eigen_residual: margin exceeds grid");
    const double scale = f.values.segment(m, len).abs().maxCoeff();
    return r.segment(m, len).abs().maxCoeff() / scale;
}

double eigen_residual_l2(const ComplexField& f, const ComplexField& potential,
                         std::complex<double> energy, std::size_t margin)
{
    margin = std::max<std::size_t>(margin, f.second ? 0 : 4);
    const Eigen::ArrayXcd r = residual_vector(f, potential, energy);
    const auto m = static_cast<Eigen::Index>(margin);
    const Eigen::Index len = r.size() - 2 * m;
    if (len <= 0)
        throw ValidationError("eigen_residual: margin exceeds grid");
    return std::sqrt(r.segment(m, len).abs2().sum() / f.values.segment(m, len).abs2().sum());
}

double sup_at_distance(const ComplexField& f, double distance)
{
    const double a = f.grid.period();
    if (distance + a > 0.5 * f.grid.length())
        throw ValidationError("sup_at_distance: window extends past the grid");
    double best = 0.0;
    for (std::size_t j = 0; j < f.size(); ++j) {
        const double x = f.grid.x(j);
        const bool right = x >= distance && x < distance + a;
        const bool left = x <= -distance && x > -distance - a;
        if (right || left)
            best = std::max(best, std::abs(f[j]));
    }
    return best;
}

} // namespace ccrystal
