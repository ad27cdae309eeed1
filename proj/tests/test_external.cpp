#include "spindeco/evolution.hpp"
#include "spindeco/external.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace spindeco;
using namespace spindeco::external;
using su2::HalfInt;

namespace {

constexpr double pi = std::numbers::pi;
using gk = boost::math::quadrature::gauss_kronrod<double, 61>;

// M(t, z) = sum_k z^k (k+1)^2 J_{k+1}(2t)^2 / t^2
double m_bessel(double t, double z) {
    if (t == 0.0) return 1.0;
    double s = 0.0, zk = 1.0;
    for (int k = 0; k < 2000; ++k) {
        const double jv = boost::math::cyl_bessel_j(k + 1, 2 * t);
        s += zk * (k + 1.0) * (k + 1.0) * jv * jv;
        if (k > 2 * t + 30 && zk * jv * jv < 1e-30) break;
        zk *= z;
    }
    return s / (t * t);
}

coupling::CouplingSpec make(int two_j, std::map<int, double> bars) {
    coupling::CouplingSpec s;
    s.j = HalfInt(two_j);
    s.delta_bar = std::move(bars);
    return s;
}

// Complex int nu(E)/(w-E) by adaptive quadrature of real and imaginary parts.
Complex hilbert_quadrature(const Density& nu, Complex w) {
    auto re = [&](double E) { return (nu(E) / (w - E)).real(); };
    auto im = [&](double E) { return (nu(E) / (w - E)).imag(); };
    return {gk::integrate(re, nu.lo(), nu.hi(), 15, 1e-13), gk::integrate(im, nu.lo(), nu.hi(), 15, 1e-13)};
}

}  // namespace

TEST_SUITE("external") {

TEST_CASE("densities: normalization and Hilbert transforms") {
    const auto sc = Density::semicircle(1.7);
    CHECK(gk::integrate([&](double E) { return sc(E); }, -1.7, 1.7, 15, 1e-14) == doctest::Approx(1.0).epsilon(1e-10));
    const auto tab = Density::tabulated({-1.0, -0.2, 0.5, 2.0}, {0.0, 3.0, 1.0, 0.0});
    CHECK(tab.mass() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(tab(-0.6) == doctest::Approx(0.5 * tab(-0.2)));
    CHECK(tab(2.5) == 0.0);
    for (Complex w : {Complex(0.3, 0.4), Complex(-2.5, 0.0), Complex(1.0, -0.05), Complex(5.0, 3.0)}) {
        CHECK(std::abs(sc.hilbert(w) - hilbert_quadrature(sc, w)) < 1e-9);
        CHECK(std::abs(tab.hilbert(w) - hilbert_quadrature(tab, w)) < 1e-9);
    }
    // large |w|: int nu/(w-E) ~ 1/w
    CHECK(std::abs(sc.hilbert(Complex(1e6, 0.0)) * 1e6 - 1.0) < 1e-9);
    CHECK_THROWS(Density::tabulated({0.0, 0.0}, {1.0, 1.0}));
    CHECK_THROWS(Density::tabulated({0.0, 1.0}, {1.0, -1.0}));
}

TEST_CASE("self-consistent resolvent") {
    // no l >= 1 coupling: C~(x, E) = 1/(x - E)
    {
        const auto bath = semicircle_bath(make(4, {{0, 1.0}}));
        const Complex x(0.4, 0.7);
        const auto r = self_consistent_resolvent(bath, x);
        CHECK(std::abs(r.at(0.3) - 1.0 / (x - 0.3)) < 1e-14);
        CHECK(std::abs(r.c - bath.nu.hilbert(x)) < 1e-14);
    }
    // semicircle plus interaction: dressed resolvent is the semicircle of total variance Delta-hat(0)
    const auto bath = semicircle_bath(make(6, {{0, 2.0}, {1, 0.3}, {2, 0.1}}));
    const double d0 = bath.coupling.hat_delta0;
    for (Complex x : {Complex(0.5, 1.0), Complex(-3.0, 0.2), Complex(6.0, 0.0), Complex(0.0, 0.3)}) {
        const auto r = self_consistent_resolvent(bath, x);
        const Complex s = std::sqrt(x - 2 * std::sqrt(d0)) * std::sqrt(x + 2 * std::sqrt(d0));
        CHECK(std::abs(r.c - (x - s) / (2 * d0)) < 1e-10);
        // C~(X(w)) is the Hilbert transform of nu at w = W(x)
        CHECK(std::abs(r.c - bath.nu.hilbert(r.w)) < 1e-11);
        CHECK(r.residual < 1e-11);
    }
    const auto far = self_consistent_resolvent(bath, Complex(1e5, 0.0));
    CHECK(std::abs(far.c * 1e5 - 1.0) < 1e-8);
    // tabulated density also converges
    BathSpec tb = bath;
    tb.nu = Density::tabulated({-2.0, 0.0, 1.0, 3.0}, {0.0, 1.0, 1.0, 0.0});
    const auto rt = self_consistent_resolvent(tb, Complex(0.2, 0.5));
    CHECK(std::abs(rt.c - tb.nu.hilbert(rt.w)) < 1e-11);
    ResolventOptions strict;
    strict.max_iterations = 2;
    CHECK_THROWS_AS(self_consistent_resolvent(bath, Complex(0.1, 0.01), strict), ConvergenceError);
}

TEST_CASE("m_external: normalization and degeneracy chain") {
    for (auto [E, z, zav] : {std::tuple{0.0, 0.5, 0.0}, {0.7, 0.8, 0.5}, {-1.2, 0.3, 0.9}, {1.98, 0.99, 0.99}})
        CHECK(m_external(0.0, E, z, zav).value == doctest::Approx(1.0).epsilon(1e-12));
    double worst1 = 0.0, worst2 = 0.0;
    for (double t = 0.0; t <= 10.0 + 1e-12; t += 0.25) {
        for (double z : {-0.9, -0.3, 0.0, 0.4, 0.95})
            worst1 = std::max(worst1, std::abs(m_external(t, 0.0, z, 0.0).value - m_bessel(t, z)));
        for (double zav : {0.1, 0.5, 0.9, 0.99}) {
            const double n = n_function(t, zav);
            worst2 = std::max(worst2, std::abs(m_external(t, 0.0, zav, zav).value - n * n));
        }
    }
    MESSAGE("degeneracy errors " << worst1 << " " << worst2);
    CHECK(worst1 < 1e-10);
    CHECK(worst2 < 1e-10);
    // small-t behaviour N = 1 - (1 - Z) t^2 / 2 + O(t^4)
    CHECK(n_function(1e-3, 0.4) == doctest::Approx(1.0 - 0.3e-6).epsilon(1e-11));
    CHECK(m_external(3.0, 0.4, 0.7, 0.5).imag_residue < 1e-12);
}

TEST_CASE("m_external: domain checks") {
    CHECK_THROWS_AS(m_external(1.0, 1.5, 0.5, 0.5), std::domain_error);  // |E| > 2 sqrt(Z_av)
    CHECK_THROWS_AS(m_external(1.0, 0.0, 1.2, 0.5), std::domain_error);
    CHECK_THROWS_AS(m_external(1.0, 0.0, 0.5, 1.0), std::domain_error);
    CHECK_THROWS_AS(m_external(1.0, 0.0, 0.5, 0.99999), std::domain_error);  // node budget
    CHECK(external_nodes(10.0, 0.0, 0.999) == 1 << 18);
}

TEST_CASE("m_external approaches the scaling function as Z -> 1") {
    for (double tp : {0.5, 1.0, 2.0, 5.0}) {
        const double m = m_external(tp / 1e-3, 0.3, 0.999, 0.5).value;
        CHECK(m == doctest::Approx(m_scaling(tp, 0.3, 0.5)).epsilon(0.01));
    }
}

TEST_CASE("large-t tail: t^-3 envelope with the squared-denominator coefficient") {
    const double E = 0.3, z = 0.99, zav = 0.5, T = 20000.0;
    double mean = 0.0;
    for (int i = 0; i < 8; ++i) {
        const double t = T + i * (pi / 2) / 8;  // one sin(4t) period
        mean += m_external(t, E, z, zav).value * t * t * t / 8;
    }
    const double A = tail_coefficient(E, z, zav);
    CHECK(mean / A == doctest::Approx(1.0).epsilon(0.05));
    // the coefficient without the square on ((1+Z_av)^2 - E^2) misses by that factor
    const double a2 = (1 + zav) * (1 + zav);
    CHECK(std::abs(mean / (A * (a2 - E * E)) - 1.0) > 0.4);
}

TEST_CASE("M_scaling: normalization, exponential regime, algebraic tail") {
    // t' = 0 against a periodic trapezoid oracle of the Lorentzian weight
    for (auto [E, zav] : {std::pair{0.0, 0.5}, {0.6, 0.3}, {-1.0, 0.9}}) {
        const double a = 1 + zav, b = 1 - zav;
        const int n = 20000;
        double s = 0.0;
        for (int k = 0; k < n; ++k) {
            const double th = 2 * pi * k / n, c = std::cos(th), sn = std::sin(th);
            s += 2 * sn * sn * b / ((a * c - E) * (a * c - E) + b * b * sn * sn);
        }
        CHECK(m_scaling(0.0, E, zav) == doctest::Approx(s / n).epsilon(1e-10));
    }
    CHECK(m_scaling(0.0, 0.0, 0.999) == doctest::Approx(1.0).epsilon(2e-3));
    // exponential regime: log-slope -sqrt(4 - E^2)
    for (double E : {0.0, 1.0}) {
        const double slope = (std::log(m_scaling(5.0, E, 0.999)) - std::log(m_scaling(1.0, E, 0.999))) / 4.0;
        CHECK(slope == doctest::Approx(-std::sqrt(4 - E * E)).epsilon(0.05));
    }
    // algebraic tail
    CHECK(m_scaling(40.0, 0.3, 0.5) / m_scaling_tail(40.0, 0.3, 0.5) == doctest::Approx(1.0).epsilon(0.02));
    CHECK(m_scaling(60.0, 0.0, 0.999) / m_scaling_tail(60.0, 0.0, 0.999) == doctest::Approx(1.0).epsilon(0.1));
    // crossover: exponential form holds below log(1/(1-Z_av)) and has collapsed well beyond it
    const double tc = crossover_time(0.999);
    CHECK(tc == doctest::Approx(std::log(1000.0)));
    CHECK(m_scaling(0.5 * tc, 0.0, 0.999) / m_scaling_exponential(0.5 * tc, 0.0) == doctest::Approx(1.0).epsilon(0.1));
    CHECK(m_scaling(3 * tc, 0.0, 0.999) > 100 * m_scaling_exponential(3 * tc, 0.0));
}

TEST_CASE("diffusion coefficient") {
    const auto spec = make(40, {{0, 50.0}, {1, 1.0}, {2, 0.5}});
    const auto bath = semicircle_bath(spec);
    const double e0 = bath.e0(), jj = 20.0 * 21.0, D0 = bath.coupling.d0;
    CHECK(e0 == doctest::Approx(2 * std::sqrt(50.0)));
    CHECK(diffusion_coefficient(bath, e0) == 0.0);
    CHECK(diffusion_coefficient(bath, -e0) == 0.0);
    CHECK(diffusion_coefficient(bath, 0.0) == doctest::Approx(D0 * e0 / (4 * jj)));
    double prev = diffusion_coefficient(bath, -e0);
    for (double E = -e0; E <= e0; E += e0 / 500) {
        const double d = diffusion_coefficient(bath, E);
        CHECK(d >= 0.0);
        CHECK(std::abs(d - prev) < 0.1 * diffusion_coefficient(bath, 0.0));
        prev = d;
    }
    // golden-rule trace formula with the exact ensemble norm ||C||^2 = D0 Delta-hat(0)
    CHECK(commutator_norm2(spec) == doctest::Approx(D0 * bath.coupling.hat_delta0).epsilon(1e-12));
    for (double E : {0.0, 0.3 * e0, -0.8 * e0}) {
        const double ratio = golden_rule_diffusion(bath, E, commutator_norm2(spec)) / diffusion_coefficient(bath, E);
        CHECK(ratio == doctest::Approx(4 * jj * bath.coupling.hat_delta0 / (41 * 50.0)).epsilon(1e-10));
    }
    // a finely tabulated semicircle reproduces the analytic D through the golden-rule shape
    std::vector<double> es, vs;
    for (int k = 0; k <= 4000; ++k) {
        const double E = -e0 + 2 * e0 * k / 4000;
        es.push_back(E);
        vs.push_back(bath.nu(E));
    }
    BathSpec tb = bath;
    tb.nu = Density::tabulated(es, vs);
    CHECK(diffusion_coefficient(tb, 0.37 * e0) == doctest::Approx(diffusion_coefficient(bath, 0.37 * e0)).epsilon(1e-4));
    CHECK(markov_breakdown_u2(bath, 0.0, 2.0) ==
          doctest::Approx(8 * diffusion_coefficient(bath, 0.0) * std::log(1 / (1 - bath.z_av()))));
}

TEST_CASE("fast-bath harmonics: frozen at the band edge, Gaussian diffusion with <u^2> = 4 D t") {
    const HalfInt j(80);
    const auto bath = semicircle_bath(make(80, {{0, 100.0}, {1, 1.0}}));
    const auto frozen = fast_bath_harmonics(j, bath, bath.e0(), 1e6);
    const auto W0 = states::coherent(j, 0.0, 0.0).harmonics();
    for (int l = 0; l <= j.twice; ++l) CHECK(std::abs(frozen(l, 0) - W0(l, 0)) < 1e-12);
    const double D = diffusion_coefficient(bath, 0.0);
    // Fourier oracle: the planar transform of exp(-D t k^2) is the Gaussian profile
    const double dt = 0.37;
    for (double u : {0.0, 0.5, 1.5}) {
        auto f = [&](double k) { return k * boost::math::cyl_bessel_j(0, k * u) * std::exp(-dt * k * k); };
        double h = 0.0;
        for (double lo = 0.0; lo < 20.0; lo += 2.0) h += gk::integrate(f, lo, lo + 2.0, 10, 1e-14);
        CHECK(h / (2 * pi) == doctest::Approx(gaussian_profile(u, dt)).epsilon(1e-9));
    }
    // mean square angle grows linearly with slope 4D (small angles)
    const double w0 = evolution::width(fast_bath_harmonics(j, bath, 0.0, 0.0)).delta_theta;
    for (double u2 : {0.01, 0.02, 0.04}) {
        const double t = u2 / (4 * D);
        const double w = evolution::width(fast_bath_harmonics(j, bath, 0.0, t)).delta_theta;
        const double msq = 2 * (w * w - w0 * w0);
        CHECK(msq == doctest::Approx(4 * D * t).epsilon(0.03));
    }
}

TEST_CASE("randomized profile") {
    const auto bath = semicircle_bath(make(60, {{0, 30.0}, {1, 1.0}, {3, 0.2}}));
    const double t = 50.0;
    // normalization over the plane
    auto radial = [&](double u) { return 2 * pi * u * randomized_profile(bath, u, t); };
    const double tp = profile_time(bath, t);
    double norm = 0.0;
    for (double lo = 0.0; lo < 12 * std::sqrt(tp); lo += std::sqrt(tp)) norm += gk::integrate(radial, lo, lo + std::sqrt(tp), 8, 1e-12);
    CHECK(norm == doctest::Approx(1.0).epsilon(1e-7));
    // semicircle weight reproduces the quantum profile
    double worst = 0.0;
    for (double r = 0.0; r <= 4.0; r += 0.05) {
        const double u = r * std::sqrt(tp);
        worst = std::max(worst, std::abs(tp * randomized_profile(bath, u, t) - evolution::diffusion_profile_quantum(r)));
    }
    CHECK(worst < 1e-9);
    // a narrow weight gives one Gaussian
    const double es = 0.4 * bath.e0(), w = 1e-6 * bath.e0();
    auto delta = [&](double E) { return std::max(0.0, 1 - std::abs(E - es) / w) / w; };
    for (double u : {0.0, 0.2, 0.6}) {
        const double single = gaussian_profile(u, diffusion_coefficient(bath, es) * t);
        CHECK(randomized_profile(bath, u, t, delta, es - w, es + w) == doctest::Approx(single).epsilon(1e-6));
    }
}

TEST_CASE("absolute-unit kernel uses tau0 scaling") {
    const auto bath = semicircle_bath(make(10, {{0, 4.0}, {1, 1.0}}));
    const double tau0 = bath.tau0(), E = 0.5;
    CHECK(m_hat_external(bath, 2, 3.0, E) ==
          doctest::Approx(m_external(3.0 / tau0, E * tau0, bath.z(2), bath.z_av()).value));
    CHECK(m_hat_external(bath, 0, 3.0, E) == doctest::Approx(1.0).epsilon(1e-10));
}

}  // TEST_SUITE
