#include "spindeco/states.hpp"

#include "spindeco/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace spindeco::states {

wigner::HarmonicSpectrum SpinState::harmonics() const { return wigner::to_harmonics(density(), j); }

SpinState coherent(HalfInt j, double theta, double phi) {
    if (!(theta >= 0.0 && theta <= std::numbers::pi)) throw std::domain_error("coherent: theta outside [0, pi]");
    const int n = j.multiplicity();
    const double c = std::cos(theta / 2), s = std::sin(theta / 2);
    const double lc = std::log(c), ls = std::log(s);
    SpinState st;
    st.j = j;
    st.kind = "coherent";
    st.amp = Eigen::VectorXcd::Zero(n);
    const int tj = j.twice;
    for (int i = 0; i < n; ++i) {
        // i = j + m, 2j - i = j - m
        const int up = i, down = tj - i;
        if ((up > 0 && c == 0.0) || (down > 0 && s == 0.0)) continue;
        double lg = 0.5 * (std::lgamma(tj + 1.0) - std::lgamma(up + 1.0) - std::lgamma(down + 1.0));
        if (up > 0) lg += up * lc;
        if (down > 0) lg += down * ls;
        const double m = i - j.value();
        st.amp[i] = std::exp(lg) * std::polar(1.0, -m * phi);
    }
    return st;
}

namespace {

SpinState superpose(HalfInt j, const std::vector<std::pair<Direction, Complex>>& terms, std::string kind) {
    SpinState st;
    st.j = j;
    st.kind = std::move(kind);
    st.amp = Eigen::VectorXcd::Zero(j.multiplicity());
    for (const auto& [d, c] : terms) st.amp += c * coherent(j, d.theta, d.phi).amp;
    const double nrm = st.amp.norm();
    if (nrm == 0.0) throw std::domain_error("superposition has zero norm");
    st.amp /= nrm;
    return st;
}

}  // namespace

SpinState cat2(HalfInt j, Direction n1, Direction n2, Complex c1, Complex c2) {
    return superpose(j, {{n1, c1}, {n2, c2}}, "cat2");
}

SpinState cat3(HalfInt j, Direction n1, Direction n2, Direction n3, Complex c1, Complex c2, Complex c3) {
    return superpose(j, {{n1, c1}, {n2, c2}, {n3, c3}}, "cat3");
}

SpinState movie_cat2(HalfInt j) { return cat2(j, {std::numbers::pi / 2, 0.0}, {std::numbers::pi / 2, std::numbers::pi}); }

SpinState movie_cat3(HalfInt j) {
    return cat3(j, {std::numbers::pi / 2, 0.0}, {std::numbers::pi / 2, 3 * std::numbers::pi / 4}, {std::numbers::pi / 2, 5 * std::numbers::pi / 4});
}

SpinState random_state(HalfInt j, std::uint64_t seed) {
    Rng rng(seed);
    SpinState st;
    st.j = j;
    st.kind = "random";
    st.seed = seed;
    st.amp.resize(j.multiplicity());
    for (int i = 0; i < st.amp.size(); ++i) {
        const double re = rng.normal();
        const double im = rng.normal();
        st.amp[i] = Complex(re, im);
    }
    st.amp /= st.amp.norm();
    return st;
}

double wlm_coherent(HalfInt j, int l) {
    const int tj = j.twice;
    if (l < 0 || l > tj) return 0.0;
    const double lg = 2 * std::lgamma(tj + 1.0) - std::lgamma(tj + l + 2.0) - std::lgamma(tj - l + 1.0);
    return std::sqrt((2 * l + 1) * std::exp(lg));
}

double wlm_coherent_stirling(HalfInt j, int l) {
    return std::sqrt((2 * l + 1.0) / j.multiplicity()) * std::exp(-l * (l + 1.0) / (4 * j.value()));
}

Complex wlm_cat(HalfInt j, int l, int m) {
    const int tj = j.twice;
    Complex w = 0.0;
    if (m == 0 && l % 2 == 0) w += wlm_coherent(j, l);
    if (l == tj && tj > 0) {
        const double off = 0.5;
        if (m == tj) w += (tj % 2 ? -1.0 : 1.0) * off;
        if (m == -tj) w += off;
    }
    return w;
}

Eigen::Vector3d spin_expectation(const SpinState& s) {
    const auto psi = s.amp;
    const Complex ex = psi.dot(wigner::spin_x(s.j) * psi);
    const Complex ey = psi.dot(wigner::spin_y(s.j) * psi);
    const Complex ez = psi.dot(wigner::spin_z(s.j) * psi);
    return {ex.real(), ey.real(), ez.real()};
}

double overlap2(const SpinState& a, const SpinState& b) { return std::norm(a.amp.dot(b.amp)); }

io::json to_json(const SpinState& s) {
    io::json js;
    js["two_j"] = s.j.twice;
    js["kind"] = s.kind;
    if (s.seed) js["seed"] = *s.seed;
    io::json amps = io::json::array();
    for (int i = 0; i < s.amp.size(); ++i) amps.push_back({s.amp[i].real(), s.amp[i].imag()});
    js["amplitudes"] = amps;
    return js;
}

SpinState state_from_json(const io::json& js) {
    if (!js.is_object() || !js.contains("two_j") || !js["two_j"].is_number_integer())
        throw std::invalid_argument("state: missing integer two_j");
    SpinState s;
    s.j = HalfInt(js["two_j"].get<int>());
    if (s.j.twice < 0) throw std::invalid_argument("state: two_j must be >= 0");
    if (js.contains("kind")) s.kind = js["kind"].get<std::string>();
    if (js.contains("seed")) s.seed = js["seed"].get<std::uint64_t>();
    const auto& a = js.at("amplitudes");
    if (!a.is_array() || static_cast<int>(a.size()) != s.j.multiplicity())
        throw std::invalid_argument("state: amplitudes must list 2j+1 [re, im] pairs");
    s.amp.resize(s.j.multiplicity());
    for (int i = 0; i < s.amp.size(); ++i) {
        if (!a[i].is_array() || a[i].size() != 2) throw std::invalid_argument("state: amplitude is not [re, im]");
        s.amp[i] = Complex(a[i][0].get<double>(), a[i][1].get<double>());
    }
    if (std::abs(s.amp.norm() - 1.0) > 1e-12) throw std::invalid_argument("state: amplitudes not normalized");
    return s;
}

}  // namespace spindeco::states
