#include "ccrystal/hill.hpp"
#include "ccrystal/errors.hpp"

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace ccrystal {

using cd = std::complex<double>;

void LatticeSpec::validate() const
{
    if (!(period > 0.0) || !std::isfinite(period))
        throw ValidationError("lattice: period must be positive and finite");
    if (!std::isfinite(amplitude) || !std::isfinite(shift))
        throw ValidationError("lattice: amplitude and shift must be finite");
    for (double h : higher_harmonics)
        if (!std::isfinite(h))
            throw ValidationError("lattice: harmonic amplitudes must be finite");
}

PeriodicSeries LatticeSpec::potential() const
{
    validate();
    const int k = 1 + static_cast<int>(higher_harmonics.size());
    std::vector<cd> c(static_cast<std::size_t>(2 * k + 1));
    c[static_cast<std::size_t>(k)] = -shift;
    c[static_cast<std::size_t>(k + 1)] = c[static_cast<std::size_t>(k - 1)] = 0.5 * amplitude;
    for (int n = 2; n <= k; ++n) {
        const double h = 0.5 * higher_harmonics[static_cast<std::size_t>(n - 2)];
        c[static_cast<std::size_t>(k + n)] = c[static_cast<std::size_t>(k - n)] = h;
    }
    return {period, std::move(c)};
}

double LatticeSpec::operator()(double x) const
{
    const double g = 2.0 * std::numbers::pi / period;
    double v = amplitude * std::cos(g * x) - shift;
    for (std::size_t i = 0; i < higher_harmonics.size(); ++i)
        v += higher_harmonics[i] * std::cos(g * static_cast<double>(i + 2) * x);
    return v;
}

Eigen::MatrixXcd central_equation(const PeriodicSeries& potential, double k, int harmonics)
{
    if (harmonics < 1)
        throw ValidationError("central_equation: need at least one harmonic");
    const int size = 2 * harmonics + 1;
    const double g = 2.0 * std::numbers::pi / potential.period();
    Eigen::MatrixXcd h(size, size);
    for (int r = 0; r < size; ++r) {
        for (int c = 0; c < size; ++c)
            h(r, c) = potential.coefficient(r - c);
        const double q = k + g * (r - harmonics);
        h(r, r) += q * q;
    }
    return h;
}

namespace {

Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solve_central(const PeriodicSeries& potential, double k,
                                                              int harmonics, bool vectors)
{
    return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(
        central_equation(potential, k, harmonics), vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
}

std::vector<double> edges_at(const PeriodicSeries& potential, int harmonics)
{
    const double zone_edge = std::numbers::pi / potential.period();
    std::vector<double> all = bloch_energies(potential, 0.0, harmonics);
    const std::vector<double> edge = bloch_energies(potential, zone_edge, harmonics);
    all.insert(all.end(), edge.begin(), edge.end());
    std::sort(all.begin(), all.end());
    all.resize(5);
    return all;
}

} // namespace

std::vector<double> bloch_energies(const PeriodicSeries& potential, double k, int harmonics)
{
    const auto solver = solve_central(potential, k, harmonics, false);
    const Eigen::VectorXd& ev = solver.eigenvalues();
    return {ev.data(), ev.data() + ev.size()};
}

std::vector<double> band_edge_energies(const LatticeSpec& spec, int harmonics)
{
    if (harmonics < 8)
        throw ValidationError("band_edge_energies: harmonics must be at least 8");
    const PeriodicSeries potential = spec.potential();
    std::vector<double> coarse = edges_at(potential, harmonics);
    const std::vector<double> fine = edges_at(potential, 2 * harmonics);
    for (std::size_t i = 0; i < coarse.size(); ++i) {
        if (std::abs(coarse[i] - fine[i]) > 1e-8)
            throw ConvergenceError(fmt::format("band edge E{} not converged: {:.12g} ({} harmonics) vs "
                                               "{:.12g} ({} harmonics)",
                                               i, coarse[i], harmonics, fine[i], 2 * harmonics),
                                   coarse[i], fine[i]);
    }
    return coarse;
}

LatticeSpec with_lowest_edge_at_zero(LatticeSpec spec, int harmonics)
{
    spec.shift += band_edge_energies(spec, harmonics).front();
    return spec;
}

namespace {

// Potential at the nodes and midpoints needed by RK4 over one period.
std::vector<double> rk4_potential(const LatticeSpec& spec, int steps)
{
    const double h = spec.period / steps;
    std::vector<double> v(static_cast<std::size_t>(2 * steps + 1));
    for (std::size_t i = 0; i < v.size(); ++i)
        v[i] = spec(0.5 * h * static_cast<double>(i));
    return v;
}

double monodromy_trace(const std::vector<double>& v, double period, double energy, int steps)
{
    const double h = period / steps;
    // Columns: solutions with (psi, psi') = (1, 0) and (0, 1).
    double y[2][2] = {{1.0, 0.0}, {0.0, 1.0}};
    for (int s = 0; s < steps; ++s) {
        const double q0 = v[static_cast<std::size_t>(2 * s)] - energy;
        const double qm = v[static_cast<std::size_t>(2 * s + 1)] - energy;
        const double q1 = v[static_cast<std::size_t>(2 * s + 2)] - energy;
        for (auto& col : y) {
            const double p = col[0], d = col[1];
            const double k1p = d, k1d = q0 * p;
            const double k2p = d + 0.5 * h * k1d, k2d = qm * (p + 0.5 * h * k1p);
            const double k3p = d + 0.5 * h * k2d, k3d = qm * (p + 0.5 * h * k2p);
            const double k4p = d + h * k3d, k4d = q1 * (p + h * k3p);
            col[0] = p + h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
            col[1] = d + h / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d);
        }
    }
    return y[0][0] + y[1][1];
}

} // namespace

double hill_discriminant(const LatticeSpec& spec, double energy, int steps)
{
    spec.validate();
    if (steps < 16 || steps % 2 != 0)
        throw ValidationError("hill_discriminant: step count must be even and at least 16");
    const double fine = monodromy_trace(rk4_potential(spec, steps), spec.period, energy, steps);
    const double coarse = monodromy_trace(rk4_potential(spec, steps / 2), spec.period, energy, steps / 2);
    if (std::abs(fine - coarse) > 1e-8 * std::max(1.0, std::abs(fine)))
        throw ConvergenceError(fmt::format("hill_discriminant: step-size refinement changed Delta({}) from "
                                           "{:.12g} to {:.12g}",
                                           energy, coarse, fine),
                               coarse, fine);
    return fine;
}

std::vector<double> discriminant_band_edges(const LatticeSpec& spec, std::size_t count, int steps)
{
    spec.validate();
    const std::vector<double> v = rk4_potential(spec, steps);
    auto delta = [&](double e) { return monodromy_trace(v, spec.period, e, steps); };

    const double g = 2.0 * std::numbers::pi / spec.period;
    const double v_min = *std::min_element(v.begin(), v.end());
    const double v_max = *std::max_element(v.begin(), v.end());
    const double de = 1e-3 * g * g;
    // Enough room for `count` edges of the free lattice, plus the potential swing.
    const double top = v_max + std::pow(0.5 * g * static_cast<double>(count + 2), 2);

    std::vector<double> roots;
    double e_lo = v_min - 0.05 * g * g;
    double d_lo = delta(e_lo);
    while (roots.size() < count && e_lo < top) {
        const double e_hi = e_lo + de;
        const double d_hi = delta(e_hi);
        for (double target : {2.0, -2.0}) {
            if ((d_lo - target) * (d_hi - target) > 0.0)
                continue;
            double a = e_lo, b = e_hi, fa = d_lo - target;
            while (b - a > 1e-14 * std::max(1.0, std::abs(a))) {
                const double mid = 0.5 * (a + b);
                const double fm = delta(mid) - target;
                if (fa * fm <= 0.0) {
                    b = mid;
                } else {
                    a = mid;
                    fa = fm;
                }
            }
            roots.push_back(0.5 * (a + b));
        }
        e_lo = e_hi;
        d_lo = d_hi;
    }
    std::sort(roots.begin(), roots.end());
    if (roots.size() < count)
        throw NumericalGuardError(fmt::format("discriminant_band_edges: found {} of {} edges below E = {}",
                                              roots.size(), count, top));
    roots.resize(count);
    // Confirms step-size convergence at every root.
    for (double r : roots)
        (void)hill_discriminant(spec, r, steps);
    return roots;
}

namespace {

PeriodicSeries series_from_vector(double period, const Eigen::VectorXcd& v)
{
    return {period, std::vector<cd>(v.data(), v.data() + v.size())};
}

// Location of the maximum of a smooth real periodic function.
double argmax(const PeriodicSeries& f)
{
    const int samples = 4096;
    double best_x = 0.0, best = -1e300;
    for (int s = 0; s < samples; ++s) {
        const double x = f.period() * s / samples;
        const double v = f(x).real();
        if (v > best) {
            best = v;
            best_x = x;
        }
    }
    for (int it = 0; it < 20; ++it) {
        const double d2 = f(best_x, 2).real();
        if (d2 >= 0.0)
            break;
        const double step = f(best_x, 1).real() / d2;
        best_x -= step;
        if (std::abs(step) < 1e-15 * f.period())
            break;
    }
    return best_x;
}

Eigen::ArrayXd real_samples(const PeriodicSeries& s, const Grid1D& grid, int order)
{
    return s.sample(grid, order).real();
}

} // namespace

ComplexField BandEdgeData::reference_field() const
{
    return {grid, reference_potential.cast<cd>(), real_samples(reference_series, grid, 1).cast<cd>(),
            real_samples(reference_series, grid, 2).cast<cd>()};
}

BandEdgeData band_edge_solutions(const LatticeSpec& spec, const Grid1D& grid, int harmonics)
{
    spec.validate();
    if (std::abs(grid.period() - spec.period) > 1e-12 * spec.period)
        throw ValidationError("band_edge_solutions: grid period differs from lattice period");

    BandEdgeData out;
    out.grid = grid;
    out.lattice = spec;
    out.edge_energies = band_edge_energies(spec, harmonics);
    const double e0 = out.edge_energies.front();
    out.factorization_energy = e0;

    const double a = spec.period;
    PeriodicSeries v = spec.potential();
    {
        std::vector<cd> c = v.coefficients();
        c[static_cast<std::size_t>(v.max_harmonic())] -= e0;
        out.reference_series = PeriodicSeries(a, std::move(c));
    }

    // u1: lowest k = 0 eigenvector, phase fixed so that its mean (c_0) is real positive.
    const auto solver = solve_central(v, 0.0, harmonics, true);
    Eigen::VectorXcd c = solver.eigenvectors().col(0);
    const cd c0 = c(harmonics);
    if (std::abs(c0) == 0.0)
        throw NumericalGuardError("band_edge_solutions: lowest band-edge state has zero mean");
    c *= std::conj(c0) / std::abs(c0);
    PeriodicSeries u1 = series_from_vector(a, c);
    const double peak = u1(argmax(u1)).real();
    c /= peak;
    out.u1_series = series_from_vector(a, c).trimmed();
    const PeriodicSeries& s1 = out.u1_series;

    // Reduction of order.
    const std::size_t fine = static_cast<std::size_t>(std::max(512, 16 * harmonics));
    const PeriodicSeries inv_sq = PeriodicSeries::fit(a, fine, [&](double x) {
        const double u = s1(x).real();
        return cd{1.0 / (u * u), 0.0};
    });
    const double m = inv_sq.mean().real();
    out.mean_inverse_u1_squared = m;
    const PeriodicSeries p = inv_sq.zero_mean_antiderivative();
    out.u2_series = PeriodicSeries::fit(a, fine, [&](double x) { return s1(x) * p(x) / (m * a); });

    const PeriodicSeries sq = PeriodicSeries::fit(a, fine, [&](double x) { return s1(x) * s1(x); });
    out.mean_u1_squared = sq.mean().real();
    out.u1_squared_antiderivative = sq.zero_mean_antiderivative();

    out.u1 = real_samples(s1, grid, 0);
    out.u1_d1 = real_samples(s1, grid, 1);
    out.u1_d2 = real_samples(s1, grid, 2);
    out.u2 = real_samples(out.u2_series, grid, 0);
    out.u2_d1 = real_samples(out.u2_series, grid, 1);
    out.u2_d2 = real_samples(out.u2_series, grid, 2);
    out.reference_potential = real_samples(out.reference_series, grid, 0);

    for (std::size_t j = 0; j < grid.points(); ++j) {
        if (!(out.u1(static_cast<Eigen::Index>(j)) > 0.0))
            throw SingularityError(fmt::format("band_edge_solutions: u1 has a node at x = {} (solver failure)",
                                               grid.x(j)),
                                   j, grid.x(j));
    }
    return out;
}

double fold_to_zone(double k, double period)
{
    const double g = 2.0 * std::numbers::pi / period;
    double folded = k - g * std::floor(k / g);  // [0, g)
    if (folded > 0.5 * g)
        folded -= g;
    return folded;
}

cd BlochState::operator()(double x, int order) const
{
    const int kmax = periodic_part.max_harmonic();
    const double g = 2.0 * std::numbers::pi / periodic_part.period();
    cd sum{};
    for (int n = -kmax; n <= kmax; ++n) {
        const double q = k + g * n;
        sum += periodic_part.coefficient(n) * std::pow(cd{0.0, q}, order) * std::polar(1.0, q * x);
    }
    return sum;
}

ComplexField BlochState::field(const Grid1D& grid) const
{
    const int kmax = periodic_part.max_harmonic();
    const double g = 2.0 * std::numbers::pi / periodic_part.period();
    const Eigen::ArrayXd xs = grid.coordinates();
    const Eigen::ArrayXcd carrier = (cd{0.0, k} * xs.cast<cd>()).exp();
    Eigen::ArrayXcd out[3];
    for (int order = 0; order < 3; ++order) {
        std::vector<cd> c(static_cast<std::size_t>(2 * kmax + 1));
        for (int n = -kmax; n <= kmax; ++n)
            c[static_cast<std::size_t>(n + kmax)] =
                periodic_part.coefficient(n) * std::pow(cd{0.0, k + g * n}, order);
        out[order] = PeriodicSeries(periodic_part.period(), std::move(c)).sample(grid) * carrier;
    }
    return {grid, std::move(out[0]), std::move(out[1]), std::move(out[2])};
}

BlochState bloch_state(const PeriodicSeries& potential, double k, int band, int harmonics)
{
    const double edge = std::numbers::pi / potential.period();
    if (!(k > -edge * (1.0 + 1e-12) && k <= edge * (1.0 + 1e-12)))
        throw ValidationError(fmt::format("bloch_state: k = {} outside the first Brillouin zone", k));
    if (band < 0 || band >= 2 * harmonics + 1)
        throw ValidationError(fmt::format("bloch_state: band {} beyond the {}-wave basis", band, 2 * harmonics + 1));
    const auto solver = solve_central(potential, k, harmonics, true);
    Eigen::VectorXcd c = solver.eigenvectors().col(band);
    Eigen::Index big = 0;
    c.cwiseAbs().maxCoeff(&big);
    c *= std::conj(c(big)) / std::abs(c(big));
    c /= c.norm();
    return {k, band, solver.eigenvalues()(band), series_from_vector(potential.period(), c)};
}

BlochState bloch_state(const LatticeSpec& spec, double k, int band, int harmonics)
{
    return bloch_state(spec.potential(), k, band, harmonics);
}

std::vector<std::pair<double, double>> dispersion(const LatticeSpec& spec, int band,
                                                  std::span<const double> k_samples, int harmonics)
{
    const PeriodicSeries v = spec.potential();
    if (band < 0 || band >= 2 * harmonics + 1)
        throw ValidationError(fmt::format("dispersion: band {} beyond the {}-wave basis", band, 2 * harmonics + 1));
    std::vector<std::pair<double, double>> out;
    out.reserve(k_samples.size());
    for (double k : k_samples)
        out.emplace_back(k, bloch_energies(v, fold_to_zone(k, spec.period), harmonics)[static_cast<std::size_t>(band)]);
    return out;
}

double group_velocity(const LatticeSpec& spec, int band, double k, int harmonics)
{
    const PeriodicSeries v = spec.potential();
    const double h = 1e-5 * 2.0 * std::numbers::pi / spec.period;
    auto energy = [&](double q) {
        return bloch_energies(v, fold_to_zone(q, spec.period), harmonics).at(static_cast<std::size_t>(band));
    };
    return (energy(k + h) - energy(k - h)) / (2.0 * h);
}

} // namespace ccrystal
