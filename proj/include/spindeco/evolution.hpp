// evolution.hpp - channel-wise evolution of harmonic spectra and diffusion observables
#pragma once

#include "spindeco/coupling.hpp"
#include "spindeco/kernel.hpp"
#include "spindeco/states.hpp"
#include "spindeco/wigner.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace spindeco::evolution {

using wigner::HarmonicSpectrum;

// W^(l,m)(t) = M-hat^(l)(t) W^(l,m)(0); t in tau0 units.
HarmonicSpectrum evolve(const HarmonicSpectrum& W0, const coupling::CouplingDerived& d, double t,
                        const kernel::KernelOptions& opt = {});
// Same with precomputed channel factors at table.times[i].
HarmonicSpectrum evolve(const HarmonicSpectrum& W0, const kernel::KernelTable& table, std::size_t i);

double purity(const HarmonicSpectrum& W);
// Von Neumann entropy of from_harmonics(W) (natural log).
double entropy(const HarmonicSpectrum& W);
double min_eigenvalue(const HarmonicSpectrum& W);

struct FrameOptions {
    wigner::FieldKind kind = wigner::FieldKind::wigner;
    bool bold = false;
    kernel::KernelOptions kernel;
};

std::vector<wigner::PhaseSpaceField> frames(const states::SpinState& state, const coupling::CouplingDerived& d,
                                            const std::vector<double>& times, const wigner::Grid& grid,
                                            const FrameOptions& opt = {});

// Writes frame_NNNN.csv/.json and manifest.json under dir; returns the manifest.
io::json write_frames(const std::filesystem::path& dir, const std::vector<wigner::PhaseSpaceField>& fields,
                      const states::SpinState& state, const coupling::CouplingSpec& spec);

// Self-similar quantum diffusion profile W_quantum(r), r = |z|/sqrt(t'), normalized over the plane.
double diffusion_profile_quantum(double r);
// Exact radial moments <r^2> = 128/(9 pi^2) and <r^4>/<r^2>^2 = 27 pi^2/128 of that profile.
double quantum_profile_variance();
double quantum_profile_kurtosis();
// Planar Gaussian with the same <r^2>.
double diffusion_profile_classical(double r, double variance);
// Integral of 2 pi r^(1+k) f(r) dr over [0, inf) by adaptive quadrature.
double radial_moment(double (*profile)(double), int k);

struct Width {
    double delta_theta = 0.0;  // per-axis rms geodesic angle about the centroid
    double theta_c = 0.0, phi_c = 0.0;
};

// Angular spread of the Husimi field (non-negative weight) on a sphere grid.
Width width(const HarmonicSpectrum& W, const wigner::Grid& grid);
Width width(const HarmonicSpectrum& W);  // grid sized for the spin

// S_z(t) = M-hat^(1)(t) S_z(0).
double sz0(const states::SpinState& state);
double magnetization(const states::SpinState& state, const coupling::CouplingDerived& d, double t,
                     const kernel::KernelOptions& opt = {});

}  // namespace spindeco::evolution
