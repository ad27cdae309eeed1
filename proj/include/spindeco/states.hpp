// states.hpp - coherent, cat and random pure spin states
#pragma once

#include "spindeco/io.hpp"
#include "spindeco/wigner.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace spindeco::states {

using su2::HalfInt;
using wigner::Complex;

// Amplitudes over |m>, m = -j..j (index i <-> m = i - j).
struct SpinState {
    HalfInt j;
    Eigen::VectorXcd amp;
    std::string kind = "custom";
    std::optional<std::uint64_t> seed;

    double norm() const { return amp.norm(); }
    wigner::Matrix density() const { return amp * amp.adjoint(); }
    wigner::HarmonicSpectrum harmonics() const;
};

struct Direction {
    double theta = 0.0;
    double phi = 0.0;
};

SpinState coherent(HalfInt j, double theta, double phi);

// Normalized c1 |n1> + c2 |n2>.
SpinState cat2(HalfInt j, Direction n1, Direction n2, Complex c1 = 1.0, Complex c2 = 1.0);
SpinState cat3(HalfInt j, Direction n1, Direction n2, Direction n3, Complex c1 = 1.0, Complex c2 = 1.0,
               Complex c3 = 1.0);

// Complex-normal amplitudes, normalized.
SpinState random_state(HalfInt j, std::uint64_t seed);

// The two- and three-state cats of the movie figures.
SpinState movie_cat2(HalfInt j);
SpinState movie_cat3(HalfInt j);

// Closed forms for |j><j| and the antipodal cat (|j> + |-j>)/sqrt(2).
double wlm_coherent(HalfInt j, int l);
double wlm_coherent_stirling(HalfInt j, int l);
Complex wlm_cat(HalfInt j, int l, int m);

// <n|S|n> and the overlap |<a|b>|^2.
Eigen::Vector3d spin_expectation(const SpinState& s);
double overlap2(const SpinState& a, const SpinState& b);

io::json to_json(const SpinState& s);
SpinState state_from_json(const io::json& js);

}  // namespace spindeco::states
