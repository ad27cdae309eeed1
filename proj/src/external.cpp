#include "spindeco/external.hpp"

#include "spindeco/states.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace spindeco::external {

namespace {

constexpr double pi = std::numbers::pi;
using gk = boost::math::quadrature::gauss_kronrod<double, 61>;

// Adaptive quadrature over [a, b] split at the given interior points.
template <class F>
double integrate_split(F f, double a, double b, std::vector<double> cuts, double tol = 1e-13) {
    cuts.push_back(a);
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double lo = std::max(a, cuts[i]), hi = std::min(b, cuts[i + 1]);
        if (hi > lo) s += gk::integrate(f, lo, hi, 15, tol);
    }
    return s;
}

}  // namespace

// ---- density of states ----

Density Density::semicircle(double e0) {
    if (!(e0 > 0.0) || !std::isfinite(e0)) throw std::invalid_argument("semicircle: E0 must be positive");
    Density d;
    d.kind_ = Kind::semicircle;
    d.e0_ = e0;
    return d;
}

Density Density::tabulated(std::vector<double> energy, std::vector<double> value) {
    if (energy.size() < 2 || energy.size() != value.size())
        throw std::invalid_argument("tabulated density: need matching energy/value lists of length >= 2");
    for (std::size_t i = 0; i < energy.size(); ++i) {
        if (!(value[i] >= 0.0) || !std::isfinite(value[i])) throw std::invalid_argument("tabulated density: nu < 0");
        if (i > 0 && !(energy[i] > energy[i - 1]))
            throw std::invalid_argument("tabulated density: energies must increase");
    }
    Density d;
    d.kind_ = Kind::tabulated;
    d.energy_ = std::move(energy);
    d.value_ = std::move(value);
    const double m = d.mass();
    if (!(m > 0.0)) throw std::invalid_argument("tabulated density: zero mass");
    for (double& v : d.value_) v /= m;
    d.e0_ = 0.5 * (d.energy_.back() - d.energy_.front());
    return d;
}

double Density::lo() const { return kind_ == Kind::semicircle ? -e0_ : energy_.front(); }
double Density::hi() const { return kind_ == Kind::semicircle ? e0_ : energy_.back(); }

double Density::operator()(double E) const {
    if (kind_ == Kind::semicircle) {
        const double s = e0_ * e0_ - E * E;
        return s > 0.0 ? 2.0 * std::sqrt(s) / (pi * e0_ * e0_) : 0.0;
    }
    if (E < energy_.front() || E > energy_.back()) return 0.0;
    const auto it = std::upper_bound(energy_.begin(), energy_.end(), E);
    if (it == energy_.end()) return value_.back();
    const std::size_t i = static_cast<std::size_t>(it - energy_.begin()) - 1;
    const double f = (E - energy_[i]) / (energy_[i + 1] - energy_[i]);
    return value_[i] + f * (value_[i + 1] - value_[i]);
}

double Density::mass() const {
    if (kind_ == Kind::semicircle) return 1.0;
    double m = 0.0;
    for (std::size_t i = 0; i + 1 < energy_.size(); ++i)
        m += 0.5 * (value_[i] + value_[i + 1]) * (energy_[i + 1] - energy_[i]);
    return m;
}

Complex Density::hilbert(Complex w) const {
    if (kind_ == Kind::semicircle) {
        // (2/E0^2)(w - s) = 2/(w + s), branch s = sqrt(w^2 - E0^2) ~ w, cut on [-E0, E0]
        const Complex s = std::sqrt(w - e0_) * std::sqrt(w + e0_);
        return 2.0 / (w + s);
    }
    // exact for piecewise-linear nu: int p(E)/(w-E) = p(w) log((w-a)/(w-b)) - s (b-a)
    Complex h = 0.0;
    for (std::size_t i = 0; i + 1 < energy_.size(); ++i) {
        const double a = energy_[i], b = energy_[i + 1];
        const double slope = (value_[i + 1] - value_[i]) / (b - a);
        const Complex pw = value_[i] + slope * (w - a);
        h += pw * std::log((w - a) / (w - b)) - slope * (b - a);
    }
    return h;
}

BathSpec semicircle_bath(const coupling::CouplingSpec& spec) {
    spec.validate();
    if (!(spec.bar(0) > 0.0)) throw coupling::SpecError("delta_bar", "the environment needs Delta-bar(0) > 0");
    BathSpec b;
    b.coupling = coupling::derive(spec);
    b.nu = Density::semicircle(2.0 * std::sqrt(spec.bar(0)));
    return b;
}

// ---- resolvent ----

Resolvent self_consistent_resolvent(const BathSpec& bath, Complex x, const ResolventOptions& opt) {
    const double dp = bath.hat_delta_prime();
    Resolvent r;
    Complex c = 1.0 / x;
    double res = std::numeric_limits<double>::infinity();
    for (int it = 1; it <= opt.max_iterations; ++it) {
        const Complex target = bath.nu.hilbert(x - dp * c);
        res = std::abs(target - c);
        if (res <= opt.tolerance * std::max(1.0, std::abs(c))) {
            r.c = target;
            r.w = x - dp * target;
            r.iterations = it;
            r.residual = res;
            return r;
        }
        c = (1.0 - opt.relaxation) * c + opt.relaxation * target;
    }
    throw ConvergenceError("self_consistent_resolvent: no convergence, residual " + std::to_string(res), res);
}

// ---- the semicircle kernel M(t, E, Z, Z_av) ----

int external_nodes(double t, double E, double z_av, const ExternalOptions& opt) {
    if (!(z_av >= 0.0 && z_av < 1.0)) return -1;
    if (std::abs(E) > 2.0 * std::sqrt(z_av) + 1e-14) return -1;
    // Fourier coefficients a_k decay like J_k(2t) beyond k = 2t; the sum uses k < K/2
    double need = 2.0 * (2.0 * t + 12.0 * std::cbrt(t) + 40.0);
    // poles W(g) = E sit on |g| = 1/sqrt(Z_av); aliasing ~ Z_av^(K/4)
    if (z_av > 0.0) need = std::max(need, 4.0 * opt.pole_margin / std::log(1.0 / z_av));
    need = std::max<double>(need, opt.k_min);
    if (need > opt.k_max) return -1;
    int K = 1;
    while (K < need) K <<= 1;
    return K;
}

ExternalResult m_external(double t, double E, double z, double z_av, const ExternalOptions& opt) {
    if (t < 0) throw std::domain_error("m_external: t < 0");
    if (!(std::abs(z) <= 1.0)) throw std::domain_error("m_external: |Z| > 1");
    if (!(z_av >= 0.0 && z_av < 1.0)) throw std::domain_error("m_external: Z_av outside [0, 1)");
    if (std::abs(E) > 2.0 * std::sqrt(z_av) + 1e-14) throw std::domain_error("m_external: |E| > 2 sqrt(Z_av)");
    const int K = external_nodes(t, E, z_av, opt);
    if (K < 0) throw std::domain_error("m_external: node budget exceeded");

    // X = g + 1/g with g on the unit circle; W = Z_av g + 1/g.
    // a_k = (1/2pi) int (1/g - g) g^k e^{-itX} / (W - E) dtheta, b_k with e^{+itX};
    // M = a_0 b_0 + (Z - Z_av) sum_{k>=1} Z^(k-1) a_k b_k.
    std::vector<Complex> f(K), h(K);
    for (int p = 0; p < K; ++p) {
        const double th = 2 * pi * p / K;
        const Complex g = std::polar(1.0, th);
        const double X = 2 * std::cos(th);
        const Complex common = (std::conj(g) - g) / (z_av * g + std::conj(g) - E);
        f[p] = common * std::polar(1.0, -t * X);
        h[p] = common * std::polar(1.0, t * X);
    }
    thread_local Eigen::FFT<double> fft;
    std::vector<Complex> a, b;
    fft.inv(a, f);
    fft.inv(b, h);
    Complex s = 0.0;
    for (int k = K / 2 - 1; k >= 1; --k) s = s * z + a[k] * b[k];  // Horner in Z
    const Complex m = a[0] * b[0] + (z - z_av) * s;
    ExternalResult r;
    r.value = m.real();
    r.imag_residue = std::abs(m.imag());
    r.nodes = K;
    return r;
}

double n_function(double t, double z) {
    if (t < 0) throw std::domain_error("n_function: t < 0");
    if (t == 0.0) return 1.0;
    double s = 0.0, zn = 1.0;
    for (int n = 0; n < 1000000; ++n) {
        const double term = zn * (2 * n + 1) * boost::math::cyl_bessel_j(2 * n + 1, 2 * t);
        s += term;
        if (2 * n + 1 > 2 * t + 20 && std::abs(term) < 1e-18 * std::max(std::abs(s), 1e-300)) break;
        zn *= z;
        if (zn == 0.0) break;
    }
    return s / t;
}

double m_hat_external(const BathSpec& bath, int l, double t, double E, const ExternalOptions& opt) {
    const double tau0 = bath.tau0();
    return m_external(t / tau0, E * tau0, bath.z(l), bath.z_av(), opt).value;
}

// ---- Z -> 1 scaling ----

double m_scaling(double tp, double E, double z_av) {
    if (tp < 0) throw std::domain_error("m_scaling: t' < 0");
    if (!(z_av >= 0.0 && z_av < 1.0)) throw std::domain_error("m_scaling: Z_av outside [0, 1)");
    const double a = 1.0 + z_av, b = 1.0 - z_av;
    auto f = [=](double th) {
        const double s = std::sin(th), c = std::cos(th);
        const double den = (a * c - E) * (a * c - E) + b * b * s * s;
        return 2 * s * s * b / den * std::exp(-2 * tp * s);
    };
    std::vector<double> cuts;
    if (std::abs(E) < a) {
        // Lorentzian peak of width ~ (1 - Z_av)/(1 + Z_av) at (1 + Z_av) cos(theta_c) = E
        const double tc = std::acos(E / a), w = std::max(b / a, 1e-12);
        for (double k : {-100.0, -10.0, -1.0, 0.0, 1.0, 10.0, 100.0}) {
            const double c = tc + k * w;
            if (c > 0.0 && c < pi) cuts.push_back(c);
        }
    }
    return integrate_split(f, 0.0, pi, cuts) / pi;
}

double m_scaling_tail(double tp, double E, double z_av) {
    const double a2 = (1 + z_av) * (1 + z_av);
    return (a2 + E * E) * (1 - z_av) / (pi * (a2 - E * E) * (a2 - E * E) * tp * tp * tp);
}

double m_scaling_exponential(double tp, double E) { return std::exp(-tp * std::sqrt(4.0 - E * E)); }

double crossover_time(double z_av) { return std::log(1.0 / (1.0 - z_av)); }

double tail_coefficient(double E, double z, double z_av) {
    const double b = 1.0 - z;
    return m_scaling_tail(1.0, E, z_av) / (b * b * b);
}

// ---- diffusion ----

double diffusion_coefficient(const BathSpec& bath, double E) {
    const double jj = bath.coupling.spec.j.value() * (bath.coupling.spec.j.value() + 1);
    if (jj == 0.0) return 0.0;
    const double D0 = bath.coupling.d0;
    if (bath.nu.kind() == Density::Kind::semicircle) {
        const double e0 = bath.e0(), s = e0 * e0 - E * E;
        return s > 0.0 ? D0 * std::sqrt(s) / (4 * jj) : 0.0;
    }
    // golden-rule shape 2 pi nu(E) D0 Delta-bar(0) / (4 j(j+1)); equals the form above for the semicircle
    return 2 * pi * bath.nu(E) * D0 * bath.coupling.spec.bar(0) / (4 * jj);
}

double commutator_norm2(const coupling::CouplingSpec& spec) {
    double s = 0.0;
    for (const auto& [l, v] : spec.delta_bar)
        if (l >= 1) s += l * (l + 1.0) * (2 * l + 1) * v;
    return s;
}

double golden_rule_diffusion(const BathSpec& bath, double E, double c_norm2) {
    return 2 * pi * bath.nu(E) * c_norm2 / bath.coupling.spec.j.multiplicity();
}

wigner::HarmonicSpectrum fast_bath_harmonics(su2::HalfInt j, const BathSpec& bath, double E, double t) {
    if (t < 0) throw std::domain_error("fast_bath_harmonics: t < 0");
    const double D = diffusion_coefficient(bath, E);
    wigner::HarmonicSpectrum W(j);
    for (int l = 0; l <= j.twice; ++l) W(l, 0) = states::wlm_coherent(j, l) * std::exp(-l * (l + 1.0) * D * t);
    return W;
}

double gaussian_profile(double u, double dt) {
    if (!(dt > 0.0)) return 0.0;
    return std::exp(-u * u / (4 * dt)) / (4 * pi * dt);
}

double randomized_profile(const BathSpec& bath, double u, double t) {
    if (bath.nu.kind() != Density::Kind::semicircle)
        return randomized_profile(bath, u, t, [&bath](double E) { return bath.nu(E); });
    // E = E0 cos(theta) removes the square-root edges
    const double e0 = bath.e0();
    auto f = [&](double th) {
        const double E = e0 * std::cos(th);
        return bath.nu(E) * e0 * std::sin(th) * gaussian_profile(u, diffusion_coefficient(bath, E) * t);
    };
    return integrate_split(f, 0.0, pi, {pi / 2});
}

double randomized_profile(const BathSpec& bath, double u, double t, const std::function<double(double)>& weight) {
    return randomized_profile(bath, u, t, weight, bath.nu.lo(), bath.nu.hi());
}

double randomized_profile(const BathSpec& bath, double u, double t, const std::function<double(double)>& weight,
                          double lo, double hi) {
    auto f = [&](double E) { return weight(E) * gaussian_profile(u, diffusion_coefficient(bath, E) * t); };
    return integrate_split(f, lo, hi, {0.5 * (lo + hi)});
}

double profile_time(const BathSpec& bath, double t) { return 3 * pi * diffusion_coefficient(bath, 0.0) * t / 4; }

double markov_breakdown_u2(const BathSpec& bath, double E, double t) {
    return 4 * diffusion_coefficient(bath, E) * t * crossover_time(bath.z_av());
}

}  // namespace spindeco::external
