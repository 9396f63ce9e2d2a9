#include "ccrystal/analysis.hpp"
#include "ccrystal/errors.hpp"
#include "ccrystal/hill.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace ccrystal;
using cd = std::complex<double>;
using Eigen::ArrayXcd;
constexpr double pi = std::numbers::pi;

namespace {

const LatticeSpec& lattice()
{
    static const LatticeSpec spec = with_lowest_edge_at_zero(LatticeSpec{});
    return spec;
}

ComplexField lattice_field(const Grid1D& g)
{
    return ComplexField(g, lattice().potential().sample(g).real().cast<cd>());
}

WavePacket packet_from(const Grid1D& g, const ArrayXcd& a, double t = 0.0)
{
    WavePacket p{g, a, t, 0.0};
    p.initial_norm = p.norm();
    return p;
}

} // namespace

TEST_CASE("fidelity")
{
    const Grid1D g(2.0 * pi, 64, 4096);
    const WavePacket a = gaussian_packet(g, -30.0, 10.0, 0.25);
    const WavePacket b = gaussian_packet(g, -28.0, 12.0, 0.3);
    CHECK(fidelity(a, a) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(fidelity(a, b) == doctest::Approx(fidelity(b, a)).epsilon(1e-14));
    CHECK(fidelity(a, b) < 1.0);
    WavePacket phased = a;
    phased.amplitudes *= cd{0.0, 3.0};
    CHECK(fidelity(a, phased) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(fidelity(a, gaussian_packet(g, 100.0, 10.0, 0.25)) < 1e-20);

    // overlap of two real Gaussians of equal width w separated by d: exp(-d^2 / (2 w^2))
    const WavePacket c = gaussian_packet(g, 0.0, 10.0, 0.0);
    const WavePacket d = gaussian_packet(g, 5.0, 10.0, 0.0);
    CHECK(fidelity(c, d) == doctest::Approx(std::exp(-25.0 / 200.0)).epsilon(1e-12));

    WavePacket later = b;
    later.time = 1.0;
    CHECK_THROWS_AS(fidelity(a, later), ValidationError);
    CHECK_THROWS_AS(fidelity(a, packet_from(g, ArrayXcd::Zero(4096))), ValidationError);
    CHECK_THROWS_AS(fidelity(a, gaussian_packet(Grid1D(2.0 * pi, 32, 4096), 0.0, 10.0, 0.0)), ValidationError);
}

TEST_CASE("reflected and transmitted fractions")
{
    const Grid1D g(2.0 * pi, 64, 4096);
    const WavePacket c = gaussian_packet(g, 0.0, 10.0, 0.0);
    // |psi|^2 is a Gaussian of rms w / 2; the fraction below x is Phi(2 x / w)
    // the sample at x = 0 itself is not counted
    const double half_sample = 0.5 * g.spacing() / (c.norm() * c.norm());
    CHECK(reflected_fraction(c, 0.0) == doctest::Approx(0.5 - half_sample).epsilon(1e-12));
    const double below = reflected_fraction(c, -5.0);
    CHECK(below == doctest::Approx(0.5 * std::erfc(1.0 / std::sqrt(2.0))).epsilon(2e-2));
    CHECK(below + reflected_fraction(gaussian_packet(g, 0.0, 10.0, 0.0), 5.0) == doctest::Approx(1.0).epsilon(2e-2));
    CHECK(reflected_fraction(c, -200.0) == 0.0);

    // a free packet launched at -100 with k0 = 0.25 has left x < -50 by t = 450
    const WavePacket late = oracle::free_gaussian(Grid1D(2.0 * pi, 2048, 1 << 16), 450.0, -100.0, 40.0, 0.25);
    CHECK(reflected_fraction(late, -50.0) < 1e-6);
}

TEST_CASE("centroid, core mass and transit delay")
{
    const Grid1D g(2.0 * pi, 64, 4096);
    const WavePacket a = gaussian_packet(g, -10.0, 10.0, 0.25);
    const WavePacket b = gaussian_packet(g, -13.0, 10.0, 0.25);
    CHECK(centroid(a) == doctest::Approx(-10.0).epsilon(1e-12));
    // single Gaussian: erf(1/2 / sqrt 2)
    CHECK(core_mass(a) == doctest::Approx(std::erf(0.5 / std::sqrt(2.0))).epsilon(1e-3));
    CHECK(transit_delay(a, a, 0.5) == 0.0);
    CHECK(transit_delay(a, b, 0.5) == doctest::Approx(6.0).epsilon(1e-10));
    CHECK(transit_delay(b, a, 0.5) == doctest::Approx(-6.0).epsilon(1e-10));
    CHECK_THROWS_AS(transit_delay(a, b, 0.0), ValidationError);

    const WavePacket twin = packet_from(g, gaussian_packet(g, -80.0, 5.0, 0.0).amplitudes +
                                               gaussian_packet(g, 80.0, 5.0, 0.0).amplitudes);
    CHECK(core_mass(twin) < 0.01);
    CHECK_THROWS_AS(transit_delay(twin, twin, 1.0), ValidationError);
}

TEST_CASE("Bloch basis energies match the band structure")
{
    const Grid1D g(2.0 * pi, 16, 1024);
    const BlochBasis basis(lattice_field(g));
    CHECK(basis.kpoints() == 16);
    CHECK(basis.bands() == 64);
    for (std::size_t j : {0u, 3u, 8u, 13u}) {
        const double k = fold_to_zone(static_cast<double>(j) / 16.0, 2.0 * pi);
        for (int band = 0; band < 4; ++band)
            CHECK(basis.energy(j, band) == doctest::Approx(bloch_state(lattice(), k, band).energy).epsilon(1e-10));
    }
    CHECK(basis.energy(0, 0) == doctest::Approx(0.0).scale(1.0).epsilon(1e-10));
}

TEST_CASE("Bloch basis projection")
{
    const Grid1D g(2.0 * pi, 16, 1024);
    const BlochBasis basis(lattice_field(g));

    const WavePacket pure = packet_from(g, bloch_state(lattice(), 0.25, 1).field(g).values);
    const std::vector<double> w = basis.band_weights(pure);
    CHECK(w[1] == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(w[0] < 1e-10);

    const WavePacket p = gaussian_packet(g, 0.0, 8.0, 0.4);
    const std::vector<double> all = basis.band_weights(p);
    double sum = 0.0;
    for (double x : all)
        sum += x;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));

    const WavePacket p1 = basis.project(p, 1);
    CHECK(relative_l2(basis.project(p1, 1), p1) < 1e-12);
    CHECK(p1.norm() * p1.norm() == doctest::Approx(all[1] * p.norm() * p.norm()).epsilon(1e-10));
    CHECK(basis.band_weights(basis.project(p, 0))[1] < 1e-20);

    WavePacket rebuilt = p;
    rebuilt.amplitudes.setZero();
    for (int b = 0; b < basis.bands(); ++b)
        rebuilt.amplitudes += basis.project(p, b).amplitudes;
    CHECK(relative_l2(rebuilt, p) < 1e-12);

    CHECK_THROWS_AS(basis.project(p, 64), ValidationError);
    CHECK_THROWS_AS(basis.project(p, -1), ValidationError);
    CHECK_THROWS_AS(basis.band_weights(gaussian_packet(Grid1D(2.0 * pi, 16, 512), 0.0, 8.0, 0.4)), ValidationError);
    CHECK_THROWS_AS(band_weights(p, basis, 65), ValidationError);
}

TEST_CASE("Bloch basis rejects unsuitable potentials")
{
    const Grid1D g(2.0 * pi, 16, 1024);
    ComplexField v = lattice_field(g);
    v.values(700) += 0.01;
    CHECK_THROWS_AS(BlochBasis{v}, ValidationError);
    ComplexField complex_v = lattice_field(g);
    complex_v.values += cd{0.0, 0.1};
    CHECK_THROWS_AS(BlochBasis{complex_v}, ValidationError);
    CHECK_THROWS_AS(BlochBasis{ComplexField(Grid1D(2.0, 3, 64), ArrayXcd::Zero(64))}, ValidationError);
}

TEST_CASE("band weights of the launched packets")
{
    const Grid1D g(2.0 * pi, 256, 8192);
    const BlochBasis basis(lattice_field(g));
    const auto fig3 = band_weights(gaussian_packet(g, -100.0, 40.0, 0.25), basis, 3);
    CHECK(fig3[0].second > 0.9);
    CHECK(fig3[0].second + fig3[1].second + fig3[2].second > 0.999);
    const auto fig4 = band_weights(gaussian_packet(g, -200.0, 40.0, 0.75), basis, 3);
    CHECK(fig4[1].second > 0.9);
    CHECK(fig4[0].second < 0.1);

    // the spec overload projects onto the same lattice
    const auto again = band_weights(gaussian_packet(g, -100.0, 40.0, 0.25), lattice(), 3);
    CHECK(again[0].second == doctest::Approx(fig3[0].second).epsilon(1e-8));

    // free lattice: a packet with |k| below 1/2 sits in band 0
    LatticeSpec free;
    free.amplitude = 0.0;
    const auto flat = band_weights(gaussian_packet(g, 0.0, 40.0, 0.25), free, 2);
    CHECK(flat[0].second > 1.0 - 1e-12);
}

TEST_CASE("invisibility report predicates")
{
    InvisibilityReport r;
    r.fidelity = 0.9995;
    r.reflected_fraction = 1e-5;
    r.transit_delay = 0.5;
    CHECK(r.invisible());
    r.transit_delay = -1.2;
    CHECK(r.violations() == 1);
    r.transit_delay = std::nan("");
    CHECK_FALSE(r.delay_ok());
    r.fidelity = 0.5;
    r.reflected_fraction = 0.2;
    CHECK(r.violations() == 3);
}

TEST_CASE("assess invisibility of identical runs")
{
    const Grid1D g(2.0 * pi, 64, 2048);
    const BlochBasis basis(lattice_field(g));
    const WavePacket p = gaussian_packet(g, -40.0, 15.0, 0.25);
    const InvisibilityReport r = assess_invisibility(p, p, basis, 0, -100.0, 0.44);
    CHECK(r.fidelity == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.raw_fidelity == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.transit_delay == 0.0);
    CHECK(r.reflected_fraction < 1e-3);
    CHECK(r.invisible());

    // a packet split into two lumps yields a NaN delay rather than an error
    const WavePacket twin = packet_from(g, gaussian_packet(g, -80.0, 5.0, 0.0).amplitudes +
                                               gaussian_packet(g, 80.0, 5.0, 0.0).amplitudes);
    const InvisibilityReport s = assess_invisibility(twin, twin, basis, 0, -60.0, 0.44);
    CHECK(std::isnan(s.transit_delay));
    CHECK_FALSE(s.invisible());
}
