#pragma once

// Darboux (supersymmetric) synthesis of complex crystals from the band-edge
// functions of a reference lattice V0:
//
//   V1 = W^2 - W'          with W = u1'/u1                  (periodic, real)
//   V2 = 2 (phi'/phi)^2 - phi''/phi,  phi = psi1 + i gamma psi2   (V1 plus a PT-symmetric defect)
//   V3 = V0 - 2 (ln(lambda + int_0^x u1^2))''                (V0 plus a defect)
//
// Derivatives of the seed functions are assembled from the band-edge series and
// the exact secular terms; sampled non-periodic fields are never differentiated
// on the periodic grid.

#include "ccrystal/field.hpp"
#include "ccrystal/hill.hpp"

#include <complex>

namespace ccrystal {

struct SynthesisParams {
    double gamma = 2.0;
    std::complex<double> lambda{10.0, 10.0};

    void validate() const;
};

// W = seed'/seed, with W' in the first-derivative cache. Missing seed derivative
// caches are filled spectrally (valid only for grid-periodic seeds).
// Throws SingularityError where |seed| < 1e-12 max|seed|.
ComplexField superpotential(const ComplexField& seed);

// Darboux partner W^2 - W' and Riccati potential W^2 + W' of a superpotential.
ComplexField partner_potential(const ComplexField& w);
ComplexField riccati_potential(const ComplexField& w);

// phi = alpha psi1 + beta psi2 = (alpha + beta x / a) u1 + beta u2, with both derivative caches.
ComplexField band_edge_seed(const BandEdgeData& bands, std::complex<double> alpha, std::complex<double> beta);

// The three algebraically equivalent expressions for V1.
struct V1Forms {
    Eigen::ArrayXcd band_edge;       // 2 (u1'/u1)^2 - u1''/u1
    Eigen::ArrayXcd superpotential;  // W^2 - W'
    Eigen::ArrayXcd log_derivative;  // V0 - 2 (ln u1)''

    double max_disagreement() const;
};

V1Forms v1_forms(const BandEdgeData& bands);

// Throws NumericalGuardError when the three forms disagree by more than 1e-8.
ComplexField synth_v1(const BandEdgeData& bands);

// phi~ = (1 + i gamma x / a) u1 + i gamma u2. Re phi~ = u1 > 0, so it never vanishes.
ComplexField build_phi_tilde(const BandEdgeData& bands, double gamma);

ComplexField synth_v2(const BandEdgeData& bands, double gamma);

// f_b = 1/phi~, the zero-energy bound state of V2 (first-derivative cache only).
// gamma = 0 is rejected: f_b is then periodic and not normalizable.
ComplexField bound_state_v2(const BandEdgeData& bands, double gamma);

// lambda + int_0^x u1^2 on the grid.
Eigen::ArrayXcd v3_denominator(const BandEdgeData& bands, std::complex<double> lambda);

// Rejects real lambda, for which lambda + int_0^x u1^2 has a real zero.
ComplexField synth_v3(const BandEdgeData& bands, std::complex<double> lambda);

// f_b = u1 / (lambda + int_0^x u1^2) (first-derivative cache only).
ComplexField bound_state_v3(const BandEdgeData& bands, std::complex<double> lambda);

// Zero-energy solutions of H1: f = 1/u1 and g = (1/u1) int_0^x u1^2 (first-derivative caches).
std::pair<ComplexField, ComplexField> v1_zero_modes(const BandEdgeData& bands);

struct Eigenfunction {
    ComplexField field;
    double energy = 0.0;
};

// Intertwining maps between H0, H1 and H2 eigenfunctions at the same energy E != 0.
// Inputs need values and a first-derivative cache; a missing second derivative is
// taken from the source eigen-equation. Outputs carry values and first derivatives
// (h1_to_h2 carries values only), so eigen-residuals of the outputs are evaluated
// independently by finite differences.
Eigenfunction intertwine_h0_to_h1(const Eigenfunction& f0, const BandEdgeData& bands);
Eigenfunction intertwine_h1_to_h0(const Eigenfunction& f1, const BandEdgeData& bands);
Eigenfunction intertwine_h0_to_h2(const Eigenfunction& f0, const ComplexField& phi_tilde,
                                  const BandEdgeData& bands);
// Composition (1/E)(-d/dx + phi~'/phi~)(d/dx + u1'/u1) applied to f1 in one pass.
Eigenfunction intertwine_h1_to_h2(const Eigenfunction& f1, const ComplexField& phi_tilde,
                                  const BandEdgeData& bands);

} // namespace ccrystal
