// montecarlo.hpp - finite-N sampling of the SU(2) x U(N) ensemble and exact evolution
#pragma once

#include "spindeco/coupling.hpp"
#include "spindeco/io.hpp"
#include "spindeco/wigner.hpp"

#include <cstdint>
#include <vector>

namespace spindeco::montecarlo {

using wigner::Complex;
using wigner::Matrix;

struct SamplerOptions {
    int max_dim = 4096;  // (2j+1) N cap
};

// Row/column index of |r, alpha> is r N + alpha with r = m + j.
struct EnsembleSample {
    coupling::CouplingSpec spec;
    int N = 0;
    std::uint64_t seed = 0;
    Matrix H;

    int dim() const { return static_cast<int>(H.rows()); }
};

// H = sum_{l,m} T^(l,m) (x) W^(l,m), E|W^(l,m)_ab|^2 = Delta(l) = (2j+1) Delta-bar(l) / N,
// W^(l,m)_ab = (-1)^m conj(W^(l,-m)_ba). Throws std::length_error beyond max_dim.
EnsembleSample sample_hamiltonian(const coupling::CouplingSpec& spec, int N, std::uint64_t seed,
                                  const SamplerOptions& opt = {});

// H_(0) = tr_S(H) / (2j+1), the environment Hamiltonian.
Matrix environment_hamiltonian(const EnsembleSample& s);
// H' = H - 1_S (x) H_(0).
Matrix interaction_part(const EnsembleSample& s);

Eigen::VectorXd spectrum(const EnsembleSample& s);

// Semicircle on [-R, R].
double semicircle_cdf(double x, double radius);
// Sup-norm distance between the empirical CDF of the values and the semicircle CDF.
double cdf_distance(std::vector<double> values, double radius);

struct EnvInit {
    enum class Kind { maximally_mixed, eigenstate };
    Kind kind = Kind::maximally_mixed;
    int index = 0;  // eigenvector of H_(0), ascending eigenvalue order

    static EnvInit mixed() { return {}; }
    static EnvInit eigenstate(int i) { return {Kind::eigenstate, i}; }
};

// rho_S(t) = tr_E(U (rho_S (x) rho_E) U^dagger), U = exp(-i t H); t absolute.
std::vector<Matrix> evolve_exact(const Matrix& rho_s, const EnvInit& env, const EnsembleSample& s,
                                 const std::vector<double>& times);

// tau0 = Delta-hat(0)^(-1/2) of the spec.
double tau0(const coupling::CouplingSpec& spec);

struct EnsembleOptions {
    int N = 64;
    int samples = 10;
    std::uint64_t seed = 1;
    EnvInit env;
    SamplerOptions sampler;
};

struct EnsembleRun {
    coupling::CouplingSpec spec;
    std::vector<double> times;                // tau0 units
    std::vector<std::uint64_t> seeds;         // per-sample stream seeds, in sample order
    std::vector<std::vector<Matrix>> rho;     // [sample][time]
};

// Samples are independent tasks; sample i uses stream_seed(seed, i).
EnsembleRun run_ensemble(const Matrix& rho0, const coupling::CouplingSpec& spec, const std::vector<double>& times,
                         const EnsembleOptions& opt);

struct ChannelPoint {
    int l = 0, m = 0;
    double t = 0.0;        // tau0 units
    Complex ratio;         // ensemble mean of W^(l,m)(t) / W^(l,m)(0)
    double sigma = 0.0;    // bootstrap 1-sigma of the real part
    double planar = 0.0;   // M(t, Z(l))
};

// Channels with |W^(l,m)(0)| > min_amplitude; bootstrap with a fixed seed.
std::vector<ChannelPoint> empirical_kernel(const EnsembleRun& run, const Matrix& rho0, int bootstrap = 1000,
                                           std::uint64_t seed = 12345, double min_amplitude = 1e-6);

// Mean of per-sample purities and purity of the ensemble-mean state at time index i.
struct Factorization {
    double mean_purity = 0.0;
    double purity_of_mean = 0.0;
};
Factorization factorization(const EnsembleRun& run, std::size_t i);

struct CommutatorReport {
    bool defined = true;       // false when H' vanishes
    double mc_ratio = 0.0;     // ||[S,H']||^2 / (||S||^2 ||H'||^2), ratio of sample means
    double sigma = 0.0;        // bootstrap 1-sigma
    double exact_ratio = 0.0;  // sum l(l+1)(2l+1) Delta-bar / (j(j+1) sum (2l+1) Delta-bar), l >= 1
    double tau_ratio = 0.0;    // tau1 / tau2 from the timescales
    double s_norm2 = 0.0;      // ||S||_2^2, numerically
    double c_norm2 = 0.0;      // mean ||[S,H']||_2^2
    double c_norm2_sigma = 0.0;
};

CommutatorReport commutator_norm_check(const coupling::CouplingSpec& spec, int N, int samples, std::uint64_t seed,
                                       int bootstrap = 1000);

// JSON report {l, m, t, empirical, planar, sigma, pass} with pass = |empirical - planar| <= max(3 sigma, floor).
io::json validation_report(const std::vector<ChannelPoint>& points, double floor = 0.02);

}  // namespace spindeco::montecarlo
