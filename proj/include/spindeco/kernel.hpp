// kernel.hpp - the decoherence function M(t,z) and its scaling limits Psi and Phi
#pragma once

#include "spindeco/coupling.hpp"

#include <complex>
#include <string>
#include <vector>

namespace spindeco::kernel {

enum class Method { series, quadrature, psi_scaling, asymptotic };

std::string to_string(Method m);

struct KernelOptions {
    double series_radius = 12.0;  // quad-precision series keeps >= 12 digits up to here
    int k_min = 256;
    int k_max = 1 << 18;
    double pole_margin = 35.0;  // K >= pole_margin / (1 - |z|), aliasing error ~ exp(-pole_margin)
};

struct SeriesResult {
    double value = 0.0;
    double residual = 0.0;  // last retained term plus precision-loss estimate
    int terms = 0;
    bool converged = false;
};

// Double power series in t^2 and z, summed in 113-bit floating point.
SeriesResult m_series(double t, double z, const KernelOptions& opt = {});
// Coefficient of t^(2m) z^n.
double m_series_coefficient(int m, int n);

struct QuadratureResult {
    std::complex<double> value;
    int nodes = 0;  // K per torus axis
};

// Trapezoid rule on the unit torus. Throws std::domain_error when |z| > 1 - pole_margin/k_max.
QuadratureResult m_quadrature(double t, double z, const KernelOptions& opt = {});
// Same with an explicit node count K (margin check |z| <= 1 - 10/K).
QuadratureResult m_quadrature_nodes(double t, double z, int K);
int quadrature_nodes(double t, double z, const KernelOptions& opt = {});

// Leading large-t behaviour with the sin(4t) term.
double m_asymptotic(double t, double z);

// Psi(t') scaling function (Gauss-Kronrod), its power series, and its asymptote 1/(pi t'^3).
double psi(double tp);
double psi_series(double tp);

// Phi(t) = 1 - 1F2(-1/2; 1, 2; -4t^2): series for t <= 10, Bessel sum beyond.
double phi(double t);
double phi_series(double t);
double phi_bessel(double t);

struct Evaluation {
    double value = 1.0;
    Method method = Method::series;
    double imag_residue = 0.0;
};

// Route selection for M(t,z).
Evaluation m_auto(double t, double z, const KernelOptions& opt = {});

// M-hat^(l)(t) = M(t/tau0, Z(l)); t in tau0 units.
Evaluation m_hat(const coupling::CouplingDerived& d, int l, double t, const KernelOptions& opt = {});

struct KernelTable {
    std::vector<double> times;                 // tau0 units
    std::vector<std::vector<double>> values;   // [l][i]
    std::vector<std::vector<Method>> methods;  // [l][i]
    double max_imag_residue = 0.0;

    int channels() const { return static_cast<int>(values.size()); }
    const std::vector<double>& channel(int l) const { return values.at(l); }
};

KernelTable kernel_table(const coupling::CouplingDerived& d, const std::vector<double>& times,
                         const KernelOptions& opt = {});

}  // namespace spindeco::kernel
