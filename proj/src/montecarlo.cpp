#include "spindeco/montecarlo.hpp"

#include "spindeco/kernel.hpp"
#include "spindeco/parallel.hpp"
#include "spindeco/rng.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace spindeco::montecarlo {

namespace {

// Complex Gaussian N x N block with E|W_ab|^2 = var; Hermitian when hermitian is set.
Matrix gaussian_block(Rng& rng, int N, double var, bool hermitian) {
    Matrix W(N, N);
    const double s = std::sqrt(var / 2.0);
    if (hermitian) {
        for (int a = 0; a < N; ++a) {
            W(a, a) = std::sqrt(var) * rng.normal();
            for (int b = a + 1; b < N; ++b) {
                const double re = s * rng.normal();
                const double im = s * rng.normal();
                W(a, b) = Complex(re, im);
                W(b, a) = Complex(re, -im);
            }
        }
    } else {
        for (int a = 0; a < N; ++a)
            for (int b = 0; b < N; ++b) {
                const double re = s * rng.normal();
                const double im = s * rng.normal();
                W(a, b) = Complex(re, im);
            }
    }
    return W;
}

void add_tensor(Matrix& H, const Matrix& U, const Matrix& W, int N) {
    for (int r = 0; r < U.rows(); ++r)
        for (int s = 0; s < U.cols(); ++s)
            if (U(r, s) != Complex(0.0)) H.block(r * N, s * N, N, N) += U(r, s) * W;
}

double purity(const Matrix& rho) { return (rho * rho).trace().real(); }

// Bootstrap standard deviation of the mean of x.
double bootstrap_sigma(const std::vector<double>& x, int resamples, Rng& rng) {
    const std::size_t n = x.size();
    if (n < 2 || resamples < 2) return 0.0;
    double s1 = 0.0, s2 = 0.0;
    for (int b = 0; b < resamples; ++b) {
        double m = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const auto k = static_cast<std::size_t>(rng.uniform() * static_cast<double>(n));
            m += x[std::min(k, n - 1)];
        }
        m /= static_cast<double>(n);
        s1 += m;
        s2 += m * m;
    }
    const double mean = s1 / resamples;
    return std::sqrt(std::max(0.0, s2 / resamples - mean * mean) * resamples / (resamples - 1.0));
}

}  // namespace

EnsembleSample sample_hamiltonian(const coupling::CouplingSpec& spec, int N, std::uint64_t seed,
                                  const SamplerOptions& opt) {
    spec.validate();
    if (N < 1) throw std::invalid_argument("sample_hamiltonian: N must be positive");
    const int n = spec.j.multiplicity();
    if (static_cast<long long>(n) * N > opt.max_dim)
        throw std::length_error("sample_hamiltonian: dimension (2j+1) N exceeds " + std::to_string(opt.max_dim));

    EnsembleSample out;
    out.spec = spec;
    out.N = N;
    out.seed = seed;
    out.H = Matrix::Zero(n * N, n * N);
    Rng rng(seed);
    for (const auto& [l, bar] : spec.delta_bar) {
        if (!(bar > 0.0) || l > spec.j.twice) continue;
        const double var = spec.delta(l, N);
        add_tensor(out.H, wigner::unit_tensor(spec.j, l, 0), gaussian_block(rng, N, var, true), N);
        for (int m = 1; m <= l; ++m) {
            const Matrix W = gaussian_block(rng, N, var, false);
            const double sign = (m % 2 == 0) ? 1.0 : -1.0;
            add_tensor(out.H, wigner::unit_tensor(spec.j, l, m), W, N);
            add_tensor(out.H, wigner::unit_tensor(spec.j, l, -m), sign * W.adjoint(), N);
        }
    }
    return out;
}

Matrix environment_hamiltonian(const EnsembleSample& s) {
    const int n = s.spec.j.multiplicity();
    Matrix H0 = Matrix::Zero(s.N, s.N);
    for (int r = 0; r < n; ++r) H0 += s.H.block(r * s.N, r * s.N, s.N, s.N);
    return H0 / static_cast<double>(n);
}

Matrix interaction_part(const EnsembleSample& s) {
    const int n = s.spec.j.multiplicity();
    const Matrix H0 = environment_hamiltonian(s);
    Matrix Hp = s.H;
    for (int r = 0; r < n; ++r) Hp.block(r * s.N, r * s.N, s.N, s.N) -= H0;
    return Hp;
}

Eigen::VectorXd spectrum(const EnsembleSample& s) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(s.H, Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

double semicircle_cdf(double x, double radius) {
    if (x <= -radius) return 0.0;
    if (x >= radius) return 1.0;
    const double R2 = radius * radius;
    return 0.5 + x * std::sqrt(R2 - x * x) / (std::numbers::pi * R2) + std::asin(x / radius) / std::numbers::pi;
}

double cdf_distance(std::vector<double> values, double radius) {
    std::sort(values.begin(), values.end());
    const double n = static_cast<double>(values.size());
    double d = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double F = semicircle_cdf(values[i], radius);
        d = std::max({d, std::abs(F - i / n), std::abs(F - (i + 1) / n)});
    }
    return d;
}

std::vector<Matrix> evolve_exact(const Matrix& rho_s, const EnvInit& env, const EnsembleSample& s,
                                 const std::vector<double>& times) {
    const int n = s.spec.j.multiplicity();
    const int N = s.N;
    const int dim = s.dim();
    if (rho_s.rows() != n || rho_s.cols() != n) throw std::invalid_argument("evolve_exact: rho_s has wrong size");

    Eigen::SelfAdjointEigenSolver<Matrix> es(s.H);
    if (es.info() != Eigen::Success) throw std::runtime_error("evolve_exact: eigensolver failed");
    const Matrix& V = es.eigenvectors();
    const Eigen::VectorXd& lambda = es.eigenvalues();

    std::vector<Matrix> out;
    out.reserve(times.size());

    if (env.kind == EnvInit::Kind::eigenstate) {
        Eigen::SelfAdjointEigenSolver<Matrix> e0(environment_hamiltonian(s));
        if (env.index < 0 || env.index >= N) throw std::invalid_argument("evolve_exact: eigenstate index out of range");
        const Eigen::VectorXcd e = e0.eigenvectors().col(env.index);
        // c_r = V^dagger |r, e>
        std::vector<Eigen::VectorXcd> c(n);
        for (int r = 0; r < n; ++r) c[r] = V.middleRows(r * N, N).adjoint() * e;
        for (double t : times) {
            Eigen::VectorXcd phase(dim);
            for (int k = 0; k < dim; ++k) phase[k] = std::exp(Complex(0.0, -lambda[k] * t));
            std::vector<Eigen::VectorXcd> y(n);
            for (int r = 0; r < n; ++r) y[r] = V * phase.cwiseProduct(c[r]);
            Matrix rho = Matrix::Zero(n, n);
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b) {
                    Complex acc = 0.0;
                    for (int r1 = 0; r1 < n; ++r1)
                        for (int s1 = 0; s1 < n; ++s1) {
                            if (rho_s(r1, s1) == Complex(0.0)) continue;
                            acc += rho_s(r1, s1) * y[s1].segment(b * N, N).dot(y[r1].segment(a * N, N));
                        }
                    rho(a, b) = acc;
                }
            out.push_back(rho);
        }
        return out;
    }

    // P^(rs)_kk' = sum_a V_(ra,k) conj(V_(sa,k')); rho(t)_rs = (1/N) phi^T (P^(rs) o Q) conj(phi)
    // with Q = sum_(r's') rho_(r's') conj(P^(r's')) and phi_k = exp(-i lambda_k t).
    std::vector<Matrix> P(static_cast<std::size_t>(n) * n);
    for (int r = 0; r < n; ++r)
        for (int q = 0; q < n; ++q)
            P[r * n + q] = V.middleRows(r * N, N).transpose() * V.middleRows(q * N, N).conjugate();
    Matrix Q = Matrix::Zero(dim, dim);
    for (int r = 0; r < n; ++r)
        for (int q = 0; q < n; ++q)
            if (rho_s(r, q) != Complex(0.0)) Q += rho_s(r, q) * P[r * n + q].conjugate();
    for (auto& p : P) p = p.cwiseProduct(Q);

    for (double t : times) {
        Eigen::VectorXcd phase(dim);
        for (int k = 0; k < dim; ++k) phase[k] = std::exp(Complex(0.0, -lambda[k] * t));
        Matrix rho(n, n);
        for (int r = 0; r < n; ++r)
            for (int q = 0; q < n; ++q)
                rho(r, q) = (phase.transpose() * P[r * n + q] * phase.conjugate()).value() / static_cast<double>(N);
        out.push_back(rho);
    }
    return out;
}

double tau0(const coupling::CouplingSpec& spec) { return 1.0 / std::sqrt(coupling::hat_delta0(spec)); }

EnsembleRun run_ensemble(const Matrix& rho0, const coupling::CouplingSpec& spec, const std::vector<double>& times,
                         const EnsembleOptions& opt) {
    if (opt.samples < 1) throw std::invalid_argument("run_ensemble: samples must be positive");
    EnsembleRun run;
    run.spec = spec;
    run.times = times;
    const double t0 = tau0(spec);
    std::vector<double> abs_times(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) abs_times[i] = times[i] * t0;
    run.seeds.resize(opt.samples);
    run.rho.resize(opt.samples);
    for (int i = 0; i < opt.samples; ++i) run.seeds[i] = stream_seed(opt.seed, static_cast<std::uint64_t>(i));
    parallel_for(static_cast<std::size_t>(opt.samples), [&](std::size_t i) {
        const EnsembleSample s = sample_hamiltonian(spec, opt.N, run.seeds[i], opt.sampler);
        run.rho[i] = evolve_exact(rho0, opt.env, s, abs_times);
    });
    return run;
}

std::vector<ChannelPoint> empirical_kernel(const EnsembleRun& run, const Matrix& rho0, int bootstrap,
                                           std::uint64_t seed, double min_amplitude) {
    const auto j = run.spec.j;
    const auto derived = coupling::derive(run.spec);
    const auto W0 = wigner::to_harmonics(rho0, j);
    const std::size_t S = run.rho.size();

    std::vector<std::vector<wigner::HarmonicSpectrum>> W(S);
    for (std::size_t s = 0; s < S; ++s)
        for (const auto& r : run.rho[s]) W[s].push_back(wigner::to_harmonics(r, j));

    Rng rng(seed);
    std::vector<ChannelPoint> out;
    for (int l = 0; l <= j.twice; ++l)
        for (int m = -l; m <= l; ++m) {
            const Complex w0 = W0(l, m);
            if (std::abs(w0) <= min_amplitude) continue;
            for (std::size_t i = 0; i < run.times.size(); ++i) {
                ChannelPoint p;
                p.l = l;
                p.m = m;
                p.t = run.times[i];
                std::vector<double> re(S);
                Complex mean = 0.0;
                for (std::size_t s = 0; s < S; ++s) {
                    const Complex r = W[s][i](l, m) / w0;
                    mean += r;
                    re[s] = r.real();
                }
                p.ratio = mean / static_cast<double>(S);
                p.sigma = bootstrap_sigma(re, bootstrap, rng);
                p.planar = kernel::m_hat(derived, l, p.t).value;
                out.push_back(p);
            }
        }
    return out;
}

Factorization factorization(const EnsembleRun& run, std::size_t i) {
    if (run.rho.empty()) throw std::invalid_argument("factorization: empty run");
    Factorization f;
    Matrix mean = Matrix::Zero(run.rho[0].at(i).rows(), run.rho[0].at(i).cols());
    for (const auto& r : run.rho) {
        f.mean_purity += purity(r.at(i));
        mean += r.at(i);
    }
    const double S = static_cast<double>(run.rho.size());
    f.mean_purity /= S;
    f.purity_of_mean = purity(mean / S);
    return f;
}

CommutatorReport commutator_norm_check(const coupling::CouplingSpec& spec, int N, int samples, std::uint64_t seed,
                                       int bootstrap) {
    if (samples < 1) throw std::invalid_argument("commutator_norm_check: samples must be positive");
    const auto j = spec.j;
    const int n = j.multiplicity();
    const Matrix S[3] = {wigner::spin_x(j), wigner::spin_y(j), wigner::spin_z(j)};

    CommutatorReport rep;
    for (const auto& Sa : S) rep.s_norm2 += (Sa * Sa).trace().real() / n;

    double num = 0.0, den = 0.0;
    for (const auto& [l, v] : spec.delta_bar)
        if (l >= 1 && l <= j.twice) {
            num += l * (l + 1.0) * (2 * l + 1) * v;
            den += (2 * l + 1) * v;
        }
    const auto tau = coupling::timescales(spec);
    rep.tau_ratio = tau.tau1 / tau.tau2;
    if (!(den > 0.0)) {
        rep.defined = false;
        return rep;
    }
    rep.exact_ratio = num / (j.value() * (j.value() + 1.0) * den);

    std::vector<double> c(samples), h(samples);
    parallel_for(static_cast<std::size_t>(samples), [&](std::size_t i) {
        const auto s = sample_hamiltonian(spec, N, stream_seed(seed, i));
        const Matrix Hp = interaction_part(s);
        const double dim = static_cast<double>(s.dim());
        double cn = 0.0;
        for (const auto& Sa : S) {
            // [S_a (x) 1, H'] assembled block-wise
            Matrix C = Matrix::Zero(s.dim(), s.dim());
            for (int r = 0; r < n; ++r)
                for (int q = 0; q < n; ++q) {
                    if (Sa(r, q) == Complex(0.0)) continue;
                    C.middleRows(r * N, N) += Sa(r, q) * Hp.middleRows(q * N, N);
                    C.middleCols(q * N, N) -= Sa(r, q) * Hp.middleCols(r * N, N);
                }
            cn += C.squaredNorm() / dim;
        }
        c[i] = cn;
        h[i] = Hp.squaredNorm() / dim;
    });

    double cm = 0.0, hm = 0.0;
    for (int i = 0; i < samples; ++i) {
        cm += c[i];
        hm += h[i];
    }
    cm /= samples;
    hm /= samples;
    rep.c_norm2 = cm;
    rep.mc_ratio = cm / (rep.s_norm2 * hm);

    Rng rng(seed ^ 0x5bd1e995ULL);
    if (samples >= 2 && bootstrap >= 2) {
        double s1 = 0.0, s2 = 0.0, t1 = 0.0, t2 = 0.0;
        for (int b = 0; b < bootstrap; ++b) {
            double cb = 0.0, hb = 0.0;
            for (int i = 0; i < samples; ++i) {
                const auto k = std::min(static_cast<int>(rng.uniform() * samples), samples - 1);
                cb += c[k];
                hb += h[k];
            }
            const double ratio = cb / (rep.s_norm2 * hb);
            s1 += ratio;
            s2 += ratio * ratio;
            cb /= samples;
            t1 += cb;
            t2 += cb * cb;
        }
        const double B = bootstrap;
        rep.sigma = std::sqrt(std::max(0.0, s2 / B - (s1 / B) * (s1 / B)) * B / (B - 1.0));
        rep.c_norm2_sigma = std::sqrt(std::max(0.0, t2 / B - (t1 / B) * (t1 / B)) * B / (B - 1.0));
    }
    return rep;
}

io::json validation_report(const std::vector<ChannelPoint>& points, double floor) {
    io::json arr = io::json::array();
    for (const auto& p : points) {
        const double emp = p.ratio.real();
        const bool pass = std::abs(emp - p.planar) <= std::max(3.0 * p.sigma, floor);
        arr.push_back({{"l", p.l}, {"m", p.m}, {"t", p.t}, {"empirical", emp}, {"empirical_imag", p.ratio.imag()},
                       {"planar", p.planar}, {"sigma", p.sigma}, {"pass", pass}});
    }
    return arr;
}

}  // namespace spindeco::montecarlo
