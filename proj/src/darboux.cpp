#include "ccrystal/darboux.hpp"
#include "ccrystal/errors.hpp"

#include <fmt/format.h>

#include <cmath>

namespace ccrystal {

using cd = std::complex<double>;
using Eigen::ArrayXcd;

void SynthesisParams::validate() const
{
    if (!std::isfinite(gamma))
        throw ValidationError("synthesis: gamma must be finite");
    if (!std::isfinite(lambda.real()) || !std::isfinite(lambda.imag()))
        throw ValidationError("synthesis: lambda must be finite");
    if (lambda.imag() == 0.0)
        throw ValidationError("synthesis: lambda must have a nonzero imaginary part; for real lambda "
                              "the denominator lambda + int_0^x u1^2 vanishes at some real x and V3 is singular");
}

ComplexField superpotential(const ComplexField& seed)
{
    const ArrayXcd d1 = seed.first ? *seed.first : spectral_derivative(seed.grid, seed.values, 1);
    const ArrayXcd d2 = seed.second ? *seed.second : spectral_derivative(seed.grid, seed.values, 2);
    const double threshold = 1e-12 * seed.values.abs().maxCoeff();
    for (std::size_t j = 0; j < seed.size(); ++j) {
        if (!(std::abs(seed[j]) >= threshold) || threshold == 0.0)
            throw SingularityError(fmt::format("superpotential: seed vanishes at x = {} (grid index {})",
                                               seed.grid.x(j), j),
                                   j, seed.grid.x(j));
    }
    ArrayXcd w = d1 / seed.values;
    ArrayXcd dw = d2 / seed.values - w.square();
    return {seed.grid, std::move(w), std::move(dw)};
}

namespace {

const ArrayXcd& require_first(const ComplexField& f, const char* who)
{
    if (!f.first)
        throw ValidationError(fmt::format("{}: field needs a first-derivative cache", who));
    return *f.first;
}

} // namespace

ComplexField partner_potential(const ComplexField& w)
{
    return {w.grid, w.values.square() - require_first(w, "partner_potential")};
}

ComplexField riccati_potential(const ComplexField& w)
{
    return {w.grid, w.values.square() + require_first(w, "riccati_potential")};
}

ComplexField band_edge_seed(const BandEdgeData& bands, cd alpha, cd beta)
{
    const double a = bands.period();
    const ArrayXcd envelope = alpha + beta * bands.grid.coordinates().cast<cd>() / a;
    const ArrayXcd u1 = bands.u1.cast<cd>(), u1p = bands.u1_d1.cast<cd>(), u1pp = bands.u1_d2.cast<cd>();
    const ArrayXcd u2 = bands.u2.cast<cd>(), u2p = bands.u2_d1.cast<cd>(), u2pp = bands.u2_d2.cast<cd>();
    ArrayXcd phi = envelope * u1 + beta * u2;
    ArrayXcd dphi = (beta / a) * u1 + envelope * u1p + beta * u2p;
    ArrayXcd d2phi = (2.0 * beta / a) * u1p + envelope * u1pp + beta * u2pp;
    return {bands.grid, std::move(phi), std::move(dphi), std::move(d2phi)};
}

double V1Forms::max_disagreement() const
{
    return std::max({(band_edge - superpotential).abs().maxCoeff(), (band_edge - log_derivative).abs().maxCoeff(),
                     (superpotential - log_derivative).abs().maxCoeff()});
}

V1Forms v1_forms(const BandEdgeData& bands)
{
    const Eigen::ArrayXd ratio = bands.u1_d1 / bands.u1;
    const Eigen::ArrayXd curvature = bands.u1_d2 / bands.u1;
    const ComplexField w = superpotential(band_edge_seed(bands, 1.0, 0.0));
    return {.band_edge = (2.0 * ratio.square() - curvature).cast<cd>(),
            .superpotential = partner_potential(w).values,
            .log_derivative = (bands.reference_potential - 2.0 * (curvature - ratio.square())).cast<cd>()};
}

ComplexField synth_v1(const BandEdgeData& bands)
{
    V1Forms forms = v1_forms(bands);
    const double spread = forms.max_disagreement();
    if (!(spread < 1e-8))
        throw NumericalGuardError(fmt::format("synth_v1: equivalent V1 expressions disagree by {:.3g}", spread));
    // Real by construction; drop rounding residue in the imaginary part.
    return {bands.grid, forms.band_edge.real().cast<cd>()};
}

ComplexField build_phi_tilde(const BandEdgeData& bands, double gamma)
{
    if (!std::isfinite(gamma))
        throw ValidationError("build_phi_tilde: gamma must be finite");
    return band_edge_seed(bands, 1.0, cd{0.0, gamma});
}

ComplexField synth_v2(const BandEdgeData& bands, double gamma)
{
    const ComplexField phi = build_phi_tilde(bands, gamma);
    const ArrayXcd w = *phi.first / phi.values;
    return {bands.grid, 2.0 * w.square() - *phi.second / phi.values};
}

ComplexField bound_state_v2(const BandEdgeData& bands, double gamma)
{
    if (gamma == 0.0)
        throw ValidationError("bound_state_v2: gamma = 0 gives a periodic, non-normalizable zero mode "
                              "(E0 stays in the continuous spectrum)");
    const ComplexField phi = build_phi_tilde(bands, gamma);
    ArrayXcd f = phi.values.inverse();
    ArrayXcd df = -*phi.first * f.square();
    return {bands.grid, std::move(f), std::move(df)};
}

ArrayXcd v3_denominator(const BandEdgeData& bands, cd lambda)
{
    const ArrayXcd integral = bands.mean_u1_squared * bands.grid.coordinates().cast<cd>() +
                              bands.u1_squared_antiderivative.sample(bands.grid).real().cast<cd>();
    return lambda + integral;
}

ComplexField synth_v3(const BandEdgeData& bands, cd lambda)
{
    SynthesisParams{.gamma = 0.0, .lambda = lambda}.validate();
    const ArrayXcd d = v3_denominator(bands, lambda);
    const ArrayXcd u1 = bands.u1.cast<cd>();
    ArrayXcd v = bands.reference_potential.cast<cd>() - 4.0 * u1 * bands.u1_d1.cast<cd>() / d +
                 2.0 * u1.square().square() / d.square();
    return {bands.grid, std::move(v)};
}

ComplexField bound_state_v3(const BandEdgeData& bands, cd lambda)
{
    SynthesisParams{.gamma = 0.0, .lambda = lambda}.validate();
    const ArrayXcd d = v3_denominator(bands, lambda);
    const ArrayXcd u1 = bands.u1.cast<cd>();
    ArrayXcd f = u1 / d;
    ArrayXcd df = bands.u1_d1.cast<cd>() / d - u1.cube() / d.square();
    return {bands.grid, std::move(f), std::move(df)};
}

std::pair<ComplexField, ComplexField> v1_zero_modes(const BandEdgeData& bands)
{
    const ArrayXcd u1 = bands.u1.cast<cd>(), u1p = bands.u1_d1.cast<cd>();
    const ArrayXcd integral = v3_denominator(bands, 0.0);
    ComplexField f{bands.grid, u1.inverse(), -u1p / u1.square()};
    ComplexField g{bands.grid, integral / u1, u1 - integral * u1p / u1.square()};
    return {std::move(f), std::move(g)};
}

namespace {

void require_nonzero_energy(double energy, const char* who)
{
    if (energy == 0.0)
        throw ValidationError(fmt::format("{}: E = 0 is the factorization energy; the map is not invertible there",
                                          who));
}

ArrayXcd second_or_eigen(const Eigenfunction& f, const ArrayXcd& potential)
{
    return f.field.second ? *f.field.second : ((potential - f.energy) * f.field.values).eval();
}

// g = sign f' + s f (scaled), g' = sign f'' + s' f + s f' (scaled).
Eigenfunction first_order_map(const Eigenfunction& f, const ArrayXcd& f2, const ComplexField& s, double sign,
                              double scale)
{
    const ArrayXcd& f1 = *f.field.first;
    ArrayXcd g = scale * (sign * f1 + s.values * f.field.values);
    ArrayXcd dg = scale * (sign * f2 + *s.first * f.field.values + s.values * f1);
    return {ComplexField{f.field.grid, std::move(g), std::move(dg)}, f.energy};
}

ComplexField u1_superpotential(const BandEdgeData& bands)
{
    return superpotential(band_edge_seed(bands, 1.0, 0.0));
}

void check_grid(const Eigenfunction& f, const BandEdgeData& bands, const char* who)
{
    if (!(f.field.grid == bands.grid))
        throw ValidationError(fmt::format("{}: eigenfunction and band-edge data live on different grids", who));
    require_first(f.field, who);
}

} // namespace

Eigenfunction intertwine_h0_to_h1(const Eigenfunction& f0, const BandEdgeData& bands)
{
    check_grid(f0, bands, "intertwine_h0_to_h1");
    require_nonzero_energy(f0.energy, "intertwine_h0_to_h1");
    const ArrayXcd f0pp = second_or_eigen(f0, bands.reference_potential.cast<cd>());
    return first_order_map(f0, f0pp, u1_superpotential(bands), -1.0, 1.0);
}

Eigenfunction intertwine_h1_to_h0(const Eigenfunction& f1, const BandEdgeData& bands)
{
    check_grid(f1, bands, "intertwine_h1_to_h0");
    require_nonzero_energy(f1.energy, "intertwine_h1_to_h0");
    const ArrayXcd f1pp = second_or_eigen(f1, synth_v1(bands).values);
    return first_order_map(f1, f1pp, u1_superpotential(bands), 1.0, 1.0 / f1.energy);
}

Eigenfunction intertwine_h0_to_h2(const Eigenfunction& f0, const ComplexField& phi_tilde, const BandEdgeData& bands)
{
    check_grid(f0, bands, "intertwine_h0_to_h2");
    require_nonzero_energy(f0.energy, "intertwine_h0_to_h2");
    const ArrayXcd f0pp = second_or_eigen(f0, bands.reference_potential.cast<cd>());
    return first_order_map(f0, f0pp, superpotential(phi_tilde), -1.0, 1.0);
}

Eigenfunction intertwine_h1_to_h2(const Eigenfunction& f1, const ComplexField& phi_tilde, const BandEdgeData& bands)
{
    check_grid(f1, bands, "intertwine_h1_to_h2");
    require_nonzero_energy(f1.energy, "intertwine_h1_to_h2");
    const ComplexField w = u1_superpotential(bands);
    const ComplexField wt = superpotential(phi_tilde);
    const ArrayXcd& f = f1.field.values;
    const ArrayXcd& fp = *f1.field.first;
    const ArrayXcd fpp = second_or_eigen(f1, synth_v1(bands).values);
    const ArrayXcd inner = fp + w.values * f;
    const ArrayXcd inner_p = fpp + *w.first * f + w.values * fp;
    return {ComplexField{f1.field.grid, (-inner_p + wt.values * inner) / f1.energy}, f1.energy};
}

} // namespace ccrystal
