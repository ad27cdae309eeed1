// external.hpp - environment with its own spectrum, initial energy eigenstate |E>, fast-bath limit
#pragma once

#include "spindeco/coupling.hpp"
#include "spindeco/wigner.hpp"

#include <complex>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace spindeco::external {

using Complex = std::complex<double>;

// Normalized density of states nu(E) of the environment Hamiltonian.
class Density {
public:
    enum class Kind { semicircle, tabulated };

    // nu(E) = 2 sqrt(E0^2 - E^2) / (pi E0^2)
    static Density semicircle(double e0);
    // Piecewise-linear nu through (energy, value) nodes; renormalized to unit mass.
    static Density tabulated(std::vector<double> energy, std::vector<double> value);

    Kind kind() const { return kind_; }
    double e0() const { return e0_; }
    double lo() const;
    double hi() const;
    double operator()(double E) const;
    // int nu(E) / (w - E) dE for w off the support.
    Complex hilbert(Complex w) const;
    double mass() const;

private:
    Kind kind_ = Kind::semicircle;
    double e0_ = 1.0;
    std::vector<double> energy_, value_;
};

struct BathSpec {
    coupling::CouplingDerived coupling;
    Density nu;

    double e0() const { return nu.e0(); }
    // Delta-hat' = Delta-hat'(0), the l >= 1 share of Delta-hat(0).
    double hat_delta_prime() const { return coupling.hat_delta_prime.at(0); }
    double tau0() const { return coupling.tau.tau0; }
    double z(int l) const { return coupling.z.at(l); }
    double z_av() const { return coupling.z_av; }
};

// Semicircle environment with E0 = 2 sqrt(Delta-bar(0)); requires Delta-bar(0) > 0.
BathSpec semicircle_bath(const coupling::CouplingSpec& spec);

class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double residual)
        : std::runtime_error(what), residual_(residual) {}
    double residual() const { return residual_; }

private:
    double residual_;
};

struct ResolventOptions {
    double relaxation = 0.5;
    double tolerance = 1e-12;
    int max_iterations = 10000;
};

struct Resolvent {
    Complex c;          // C~(x)
    Complex w;          // W(x) = x - Delta-hat' C~(x)
    int iterations = 0;
    double residual = 0.0;

    // C~(x, E) = 1 / (W(x) - E)
    Complex at(double E) const { return 1.0 / (w - E); }
};

// Damped fixed point of C~(x) = int nu(E) / (x - E - Delta-hat' C~(x)); absolute energy units.
Resolvent self_consistent_resolvent(const BathSpec& bath, Complex x, const ResolventOptions& opt = {});

struct ExternalOptions {
    int k_min = 256;
    int k_max = 1 << 18;
    double pole_margin = 37.0;  // aliasing from the W(X) = E poles ~ exp(-pole_margin)
};

struct ExternalResult {
    double value = 0.0;
    double imag_residue = 0.0;
    int nodes = 0;
};

// M(t, E, Z, Z_av) for the semicircle environment; t, E in tau0 units, |E| <= 2 sqrt(Z_av).
// Throws std::domain_error outside that range or when the node budget is exceeded.
ExternalResult m_external(double t, double E, double z, double z_av, const ExternalOptions& opt = {});
int external_nodes(double t, double E, double z_av, const ExternalOptions& opt = {});

// N(t, Z) = (1/t) sum_n Z^n (2n+1) J_{2n+1}(2t).
double n_function(double t, double z);

// M-hat^(l)(t, E) = M(t/tau0, E tau0, Z(l), Z_av) in absolute units.
double m_hat_external(const BathSpec& bath, int l, double t, double E, const ExternalOptions& opt = {});

// Z -> 1 scaling function of t' = t (1 - Z).
double m_scaling(double tp, double E, double z_av);
// Endpoint asymptote (1/pi) ((1+Z_av)^2 + E^2) (1 - Z_av) / (((1+Z_av)^2 - E^2)^2 t'^3).
double m_scaling_tail(double tp, double E, double z_av);
// Lorentzian regime exp(-t' sqrt(4 - E^2)).
double m_scaling_exponential(double tp, double E);
// t'_cross ~ log(1 / (1 - Z_av)).
double crossover_time(double z_av);
// Large-t coefficient A of t^-3 (A - B sin 4t) for Z near 1.
double tail_coefficient(double E, double z, double z_av);

// D(E) = D0 sqrt(E0^2 - E^2) / (4 j (j+1)); zero outside the band.
double diffusion_coefficient(const BathSpec& bath, double E);
// Ensemble mean of ||i[S, H_SE]||_2^2 = sum_l l(l+1)(2l+1) Delta-bar(l).
double commutator_norm2(const coupling::CouplingSpec& spec);
// 2 pi nu(E) ||C||_2^2 / (2j+1) for a given commutator norm (exact or sampled).
double golden_rule_diffusion(const BathSpec& bath, double E, double c_norm2);

// Coherent |j> harmonics damped by exp(-l(l+1) D(E) t); t absolute.
wigner::HarmonicSpectrum fast_bath_harmonics(su2::HalfInt j, const BathSpec& bath, double E, double t);

// Planar Gaussian exp(-u^2 / (4 D t)) / (4 pi D t).
double gaussian_profile(double u, double dt);
// int dE weight(E) G(u; D(E) t) over the band; weight defaults to nu.
double randomized_profile(const BathSpec& bath, double u, double t);
double randomized_profile(const BathSpec& bath, double u, double t, const std::function<double(double)>& weight);
// Same with the weight's support [lo, hi] given explicitly.
double randomized_profile(const BathSpec& bath, double u, double t, const std::function<double(double)>& weight,
                          double lo, double hi);
// t' with randomized_profile(u, t) = W_quantum(u / sqrt(t')) / t' for the semicircle: t' = 3 pi D(0) t / 4.
double profile_time(const BathSpec& bath, double t);

// |u|^2 beyond which Markovian behaviour is expected to fail: 4 D t log(tau1 / tau0).
double markov_breakdown_u2(const BathSpec& bath, double E, double t);

}  // namespace spindeco::external
