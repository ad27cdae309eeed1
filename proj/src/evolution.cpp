#include "spindeco/evolution.hpp"

#include "spindeco/parallel.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace spindeco::evolution {

namespace {

constexpr double pi = std::numbers::pi;

void check_spin(const HarmonicSpectrum& W, const coupling::CouplingDerived& d) {
    if (W.j != d.spec.j) throw std::invalid_argument("evolve: spectrum and coupling spin differ");
}

}  // namespace

HarmonicSpectrum evolve(const HarmonicSpectrum& W0, const coupling::CouplingDerived& d, double t,
                        const kernel::KernelOptions& opt) {
    check_spin(W0, d);
    if (t < 0) throw std::domain_error("evolve: t < 0");
    HarmonicSpectrum W = W0;
    for (int l = 1; l <= W.lmax(); ++l) {
        const double f = kernel::m_hat(d, l, t, opt).value;
        for (int m = -l; m <= l; ++m) W(l, m) *= f;
    }
    return W;
}

HarmonicSpectrum evolve(const HarmonicSpectrum& W0, const kernel::KernelTable& table, std::size_t i) {
    if (table.channels() != W0.lmax() + 1) throw std::invalid_argument("evolve: table channel count differs");
    HarmonicSpectrum W = W0;
    for (int l = 1; l <= W.lmax(); ++l) {
        const double f = table.values[l].at(i);
        for (int m = -l; m <= l; ++m) W(l, m) *= f;
    }
    return W;
}

double purity(const HarmonicSpectrum& W) { return W.norm2(); }

namespace {

Eigen::VectorXd spectrum_eigenvalues(const HarmonicSpectrum& W) {
    Eigen::SelfAdjointEigenSolver<wigner::Matrix> es(wigner::from_harmonics(W), Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

}  // namespace

double entropy(const HarmonicSpectrum& W) {
    double s = 0.0;
    for (double lam : spectrum_eigenvalues(W))
        if (lam > 1e-300) s -= lam * std::log(lam);
    return s;
}

double min_eigenvalue(const HarmonicSpectrum& W) { return spectrum_eigenvalues(W).minCoeff(); }

std::vector<wigner::PhaseSpaceField> frames(const states::SpinState& state, const coupling::CouplingDerived& d,
                                            const std::vector<double>& times, const wigner::Grid& grid,
                                            const FrameOptions& opt) {
    const HarmonicSpectrum W0 = state.harmonics();
    check_spin(W0, d);
    const kernel::KernelTable table = kernel::kernel_table(d, times, opt.kernel);
    std::vector<wigner::PhaseSpaceField> out(times.size());
    parallel_for(times.size(), [&](std::size_t i) {
        out[i] = wigner::field(evolve(W0, table, i), grid, opt.kind, opt.bold);
        out[i].time = times[i];
    });
    return out;
}

io::json write_frames(const std::filesystem::path& dir, const std::vector<wigner::PhaseSpaceField>& fields,
                      const states::SpinState& state, const coupling::CouplingSpec& spec) {
    io::json manifest;
    manifest["state"] = states::to_json(state);
    manifest["spec"] = coupling::to_json(spec);
    manifest["time_unit"] = "tau0";
    io::json list = io::json::array();
    for (std::size_t i = 0; i < fields.size(); ++i) {
        char stem[32];
        std::snprintf(stem, sizeof stem, "frame_%04zu", i);
        const std::string hash = fields[i].write(dir / stem);
        list.push_back({{"index", i},
                        {"time", fields[i].time},
                        {"csv", std::string(stem) + ".csv"},
                        {"sidecar", std::string(stem) + ".json"},
                        {"csv_hash", hash}});
    }
    manifest["frames"] = list;
    if (!fields.empty()) {
        manifest["grid"] = fields.front().grid.spec();
        manifest["kind"] = wigner::to_string(fields.front().kind);
    }
    io::write_file(dir / "manifest.json", manifest.dump(2) + "\n");
    return manifest;
}

double diffusion_profile_quantum(double r) {
    // (3/8pi) int_{-pi/2}^{pi/2} cos(th) exp(-r^2 (3 pi/16) / cos(th)) dth
    const double a = r * r * 3 * pi / 16;
    auto f = [a](double th) {
        const double c = std::cos(th);
        return c <= 0 ? 0.0 : c * std::exp(-a / c);
    };
    using gk = boost::math::quadrature::gauss_kronrod<double, 61>;
    return 2 * 3 / (8 * pi) * gk::integrate(f, 0.0, pi / 2, 12, 1e-13);
}

double quantum_profile_variance() { return 128.0 / (9 * pi * pi); }

double quantum_profile_kurtosis() { return 27 * pi * pi / 128; }

double diffusion_profile_classical(double r, double variance) {
    return std::exp(-r * r / variance) / (pi * variance);
}

double radial_moment(double (*profile)(double), int k) {
    auto f = [profile, k](double r) { return 2 * pi * std::pow(r, 1 + k) * profile(r); };
    using gk = boost::math::quadrature::gauss_kronrod<double, 61>;
    // the profile decays like exp(-3 pi r^2 / 16)
    double s = 0.0;
    for (double lo = 0.0; lo < 16.0; lo += 2.0) s += gk::integrate(f, lo, lo + 2.0, 10, 1e-13);
    return s;
}

Width width(const HarmonicSpectrum& W, const wigner::Grid& grid) {
    if (grid.kind != wigner::Grid::Kind::sphere) throw std::invalid_argument("width: needs a sphere grid");
    const auto Q = wigner::field(W, grid, wigner::FieldKind::husimi, true);
    double mass = 0.0;
    Eigen::Vector3d c = Eigen::Vector3d::Zero();
    std::vector<Eigen::Vector3d> n(grid.size());
    for (std::size_t p = 0; p < grid.size(); ++p) {
        const double st = std::sin(grid.theta[p]);
        n[p] = {st * std::cos(grid.phi[p]), st * std::sin(grid.phi[p]), std::cos(grid.theta[p])};
        const double w = grid.weight[p] * std::max(Q.value[p], 0.0);
        mass += w;
        c += w * n[p];
    }
    Width out;
    if (c.norm() == 0.0) {
        out.delta_theta = std::numeric_limits<double>::quiet_NaN();
        return out;
    }
    c.normalize();
    double m2 = 0.0;
    for (std::size_t p = 0; p < grid.size(); ++p) {
        const double w = grid.weight[p] * std::max(Q.value[p], 0.0);
        const double ang = std::acos(std::clamp(n[p].dot(c), -1.0, 1.0));
        m2 += w * ang * ang;
    }
    out.delta_theta = std::sqrt(m2 / (2 * mass));
    out.theta_c = std::acos(std::clamp(c.z(), -1.0, 1.0));
    out.phi_c = std::atan2(c.y(), c.x());
    return out;
}

Width width(const HarmonicSpectrum& W) {
    // the Husimi field is a degree-2j polynomial; oversample for the non-polynomial theta^2 weight
    const int n = std::max(64, 2 * W.lmax() + 16);
    return width(W, wigner::sphere_grid(n, 2 * n));
}

double sz0(const states::SpinState& state) {
    const auto psi = state.amp;
    double s = 0.0;
    for (int i = 0; i < psi.size(); ++i) s += (i - state.j.value()) * std::norm(psi[i]);
    return s;
}

double magnetization(const states::SpinState& state, const coupling::CouplingDerived& d, double t,
                     const kernel::KernelOptions& opt) {
    if (state.j != d.spec.j) throw std::invalid_argument("magnetization: spin mismatch");
    const double s0 = sz0(state);
    if (s0 == 0.0 || state.j.twice == 0) return 0.0;
    return kernel::m_hat(d, 1, t, opt).value * s0;
}

}  // namespace spindeco::evolution
