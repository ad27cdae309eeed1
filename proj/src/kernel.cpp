#include "spindeco/kernel.hpp"

#include "spindeco/parallel.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <unsupported/Eigen/FFT>

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace spindeco::kernel {

namespace {

using quad = boost::multiprecision::cpp_bin_float_quad;
constexpr double pi = std::numbers::pi;

}  // namespace

std::string to_string(Method m) {
    switch (m) {
        case Method::series: return "series";
        case Method::quadrature: return "quadrature";
        case Method::psi_scaling: return "psi_scaling";
        case Method::asymptotic: return "asymptotic";
    }
    return "unknown";
}

double m_series_coefficient(int m, int n) {
    if (m < 0 || n < 0 || n > m) return 0.0;
    // 2 (2m+1) (n+1)^2 (2m)! / (m! (m+1)! (m-n)! (m+n+2)!)
    const double lg = std::lgamma(2.0 * m + 1) - std::lgamma(m + 1.0) - std::lgamma(m + 2.0) -
                      std::lgamma(m - n + 1.0) - std::lgamma(m + n + 3.0);
    const double sign = ((m + n) % 2) ? -1.0 : 1.0;
    return sign * 2.0 * (2 * m + 1) * (n + 1.0) * (n + 1.0) * std::exp(lg);
}

SeriesResult m_series(double t, double z, const KernelOptions& opt) {
    if (std::abs(z) > 1.0) throw std::domain_error("m_series: |z| > 1");
    SeriesResult out;
    t = std::abs(t);
    if (t > opt.series_radius) {
        out.value = std::numeric_limits<double>::quiet_NaN();
        out.residual = std::numeric_limits<double>::infinity();
        return out;
    }
    const int m_max = std::max(40, static_cast<int>(std::ceil(4 * t * t)));
    const quad t2 = quad(t) * quad(t), qz = z;
    quad T = 1, sum = 0, biggest = 0, last = 0;
    int m = 0;
    int small_run = 0;
    for (; m <= m_max; ++m) {
        // inner sum over n, normalized to its n = 0 term
        quad r = 1, s = 1;
        for (int n = 0; n < m; ++n) {
            r *= -qz * quad((n + 2) * (n + 2)) / quad((n + 1) * (n + 1)) * quad(m - n) / quad(m + n + 3);
            s += r;
        }
        const quad term = T * s;
        sum += term;
        last = abs(term);
        biggest = std::max(biggest, abs(T) * (m + 1));
        if (m > 2 * t + 4 && abs(T) * (m + 1) < 1e-36 * std::max(quad(1), abs(sum))) {
            if (++small_run >= 2) break;
        } else {
            small_run = 0;
        }
        T *= -2 * t2 * quad(2 * m + 3) / (quad(m + 2) * quad(m + 1) * quad(m + 3));
    }
    out.value = static_cast<double>(sum);
    out.terms = m;
    const double loss = static_cast<double>(biggest) * std::ldexp(1.0, -110);
    out.residual = static_cast<double>(last) + loss;
    out.converged = out.residual <= 1e-12;
    return out;
}

int quadrature_nodes(double t, double z, const KernelOptions& opt) {
    const double gap = 1.0 - std::abs(z);
    double k = std::max<double>(opt.k_min, std::ceil(16.0 * std::abs(t)));
    k = gap > 0 ? std::max(k, std::ceil(opt.pole_margin / gap)) : std::numeric_limits<double>::infinity();
    if (k > opt.k_max) return -1;
    // round up to a power of two for the FFT
    int K = 1;
    while (K < k) K <<= 1;
    return K;
}

QuadratureResult m_quadrature_nodes(double t, double z, int K) {
    if (K < 4) throw std::invalid_argument("m_quadrature: K too small");
    if (std::abs(z) > 1.0 - 10.0 / K)
        throw std::domain_error("m_quadrature: |z| too close to 1 for K nodes; use the psi route");
    using cd = std::complex<double>;
    std::vector<cd> f(K), g(K);
    for (int p = 0; p < K; ++p) {
        const double th = 2.0 * pi * p / K;
        const cd w = std::polar(1.0, th);
        const cd jac = w * cd(0.0, 2.0 * std::sin(th));  // w (w - 1/w)
        const double phase = 2.0 * t * std::cos(th);
        f[p] = jac * std::polar(1.0, -phase);
        g[p] = jac * std::polar(1.0, phase);
    }
    thread_local Eigen::FFT<double> fft;
    std::vector<cd> F, G;
    fft.fwd(F, f);
    fft.fwd(G, g);
    // sum_{p,q} f_p g_q / (1 - z w_{p+q}) = (1/K) sum_k F_k G_k * K z^((K-k) mod K) / (1 - z^K)
    const double zK = std::pow(z, K);
    cd acc = F[0] * G[0];
    double zp = z;  // z^(K-k) for k = K-1 downwards
    for (int k = K - 1; k >= 1; --k) {
        acc += F[k] * G[k] * zp;
        zp *= z;
    }
    QuadratureResult out;
    out.value = acc / (static_cast<double>(K) * K * (1.0 - zK));
    out.nodes = K;
    return out;
}

QuadratureResult m_quadrature(double t, double z, const KernelOptions& opt) {
    const int K = quadrature_nodes(t, z, opt);
    if (K < 0)
        throw std::domain_error("m_quadrature: 1-|z| = " + std::to_string(1.0 - std::abs(z)) + " below " +
                                std::to_string(opt.pole_margin / opt.k_max) + "; use the psi route");
    return m_quadrature_nodes(t, z, K);
}

double m_asymptotic(double t, double z) {
    return (1.0 / (2 * pi)) / (t * t * t) *
           ((1 + z) / std::pow(1 - z, 3) - (1 - z) / std::pow(1 + z, 3) * std::sin(4 * t));
}

double psi(double tp) {
    if (tp < 0) throw std::domain_error("psi: t' < 0");
    // (4/pi) int_0^{pi/2} exp(-2 t' sin u) sin^2 u du
    auto f = [tp](double u) {
        const double s = std::sin(u);
        return std::exp(-2 * tp * s) * s * s;
    };
    using gk = boost::math::quadrature::gauss_kronrod<double, 61>;
    if (tp <= 25.0) return 4.0 / pi * gk::integrate(f, 0.0, pi / 2, 12, 1e-13);
    // x = 2 t' u keeps the integrand O(1); beyond x = 80 it is below exp(-70)
    const double s = 2 * tp;
    auto g = [s](double x) {
        const double y = s * std::sin(x / s);
        return std::exp(-y) * y * y;
    };
    return 4.0 / pi / (s * s * s) * gk::integrate(g, 0.0, 80.0, 12, 1e-13);
}

double psi_series(double tp) {
    // (2/sqrt(pi)) sum_k (-2t')^k Gamma((3+k)/2) / (k! Gamma(2+k/2))
    double sum = 0.0;
    for (int k = 0; k < 200; ++k) {
        const double lg = std::lgamma((3.0 + k) / 2) - std::lgamma(k + 1.0) - std::lgamma(2.0 + k / 2.0);
        const double mag = std::exp(lg + k * std::log(2 * tp));
        const double term = (k % 2 ? -1.0 : 1.0) * (k == 0 ? std::exp(lg) : mag);
        sum += term;
        if (k > 4 && std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return 2.0 / std::sqrt(pi) * sum;
}

double phi_series(double t) {
    // -sum_{k>=1} (-1/2)_k (-4t^2)^k / (k! (k+1)! k!)
    const quad x = -4 * quad(t) * quad(t);
    quad a = 1, sum = 0;
    for (int k = 0; k < 2000; ++k) {
        a *= (quad(k) - quad(0.5)) / (quad(k + 1) * quad(k + 2) * quad(k + 1)) * x;
        sum += a;
        if (k > 4 * t + 4 && abs(a) < 1e-36 * std::max(quad(1), abs(sum))) break;
    }
    return -static_cast<double>(sum);
}

double phi_bessel(double t) {
    // -(1/t^2) sum_{n>=1} (n-1) n^2 J_n(2t)^2
    if (t == 0.0) return 0.0;
    const int n_max = static_cast<int>(2 * t + 12 * std::cbrt(2 * t + 1) + 40);
    double s = 0.0;
    for (int n = 2; n <= n_max; ++n) {
        const double jn = boost::math::cyl_bessel_j(n, 2 * t);
        s += (n - 1.0) * n * n * jn * jn;
    }
    return -s / (t * t);
}

double phi(double t) {
    t = std::abs(t);
    return t <= 10.0 ? phi_series(t) : phi_bessel(t);
}

Evaluation m_auto(double t, double z, const KernelOptions& opt) {
    if (std::abs(z) > 1.0) throw std::domain_error("m_auto: |z| > 1");
    Evaluation e;
    t = std::abs(t);
    if (t == 0.0 || z == 1.0) return e;
    const int K = quadrature_nodes(t, z, opt);
    if (K > 0) {
        const auto q = m_quadrature_nodes(t, z, K);
        e.value = q.value.real();
        e.imag_residue = std::abs(q.value.imag());
        e.method = Method::quadrature;
        return e;
    }
    const double gap = 1.0 - std::abs(z);
    if (gap >= opt.pole_margin / opt.k_max) {
        // only t pushes K past the cap: far into the algebraic tail
        e.value = m_asymptotic(t, z);
        e.method = Method::asymptotic;
        return e;
    }
    if (t <= opt.series_radius) {
        const auto s = m_series(t, z, opt);
        e.value = s.value;
        e.method = Method::series;
        return e;
    }
    if (z > 0) {
        e.value = psi(t * (1 - z));
        e.method = Method::psi_scaling;
        return e;
    }
    // z close to -1 at large t: trapezoid at the node cap
    const auto q = m_quadrature_nodes(t, z, opt.k_max);
    e.value = q.value.real();
    e.imag_residue = std::abs(q.value.imag());
    e.method = Method::quadrature;
    return e;
}

Evaluation m_hat(const coupling::CouplingDerived& d, int l, double t, const KernelOptions& opt) {
    if (l < 0 || l >= static_cast<int>(d.z.size())) throw std::out_of_range("m_hat: channel outside [0, 2j]");
    return m_auto(t, d.z[l], opt);
}

KernelTable kernel_table(const coupling::CouplingDerived& d, const std::vector<double>& times,
                         const KernelOptions& opt) {
    KernelTable tab;
    tab.times = times;
    const int nl = static_cast<int>(d.z.size());
    tab.values.assign(nl, std::vector<double>(times.size(), 1.0));
    tab.methods.assign(nl, std::vector<Method>(times.size(), Method::series));
    std::vector<double> imag(nl, 0.0);
    parallel_for(static_cast<std::size_t>(nl), [&](std::size_t l) {
        for (std::size_t i = 0; i < times.size(); ++i) {
            const Evaluation e = m_auto(times[i], d.z[l], opt);
            tab.values[l][i] = e.value;
            tab.methods[l][i] = e.method;
            imag[l] = std::max(imag[l], e.imag_residue);
        }
    });
    for (double v : imag) tab.max_imag_residue = std::max(tab.max_imag_residue, v);
    return tab;
}

}  // namespace spindeco::kernel
