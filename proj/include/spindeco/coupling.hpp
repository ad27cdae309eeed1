// coupling.hpp - coupling spectra: Delta-hat(l), Z(l), Y(x), D0, norms and timescales
#pragma once

#include "spindeco/io.hpp"
#include "spindeco/su2.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace spindeco::coupling {

using su2::HalfInt;

// Validation failure; field() names the offending JSON field.
class SpecError : public std::invalid_argument {
public:
    SpecError(std::string field, const std::string& message)
        : std::invalid_argument(field + ": " + message), field_(std::move(field)) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

struct CouplingSpec {
    HalfInt j;
    std::map<int, double> delta_bar;  // sparse Delta-bar(l); unset channels are zero
    std::optional<int> N;

    double bar(int l) const;
    // Delta-tilde(l) = N Delta(l) = (2j+1) Delta-bar(l)
    double tilde(int l) const { return j.multiplicity() * bar(l); }
    // Delta(l) = (2j+1) Delta-bar(l) / N
    double delta(int l, int n_env) const { return tilde(l) / n_env; }
    // Largest channel with positive weight.
    int l0() const;

    void validate() const;
};

CouplingSpec spec_from_json(const io::json& j);
io::json to_json(const CouplingSpec& spec);
CouplingSpec load_spec(const std::filesystem::path& path);

// Racah-sum evaluation in long double with a rounding-error bound.
struct RacahValue {
    double value = 0.0;
    double error_bound = 0.0;
};

RacahValue hat_delta_racah(const CouplingSpec& spec, int l, bool include_l0 = true);
// Exact 6j route: sum_l' tilde(l') (2l'+1) (-1)^(2j+l'+l) {j j l'; j j l}.
double hat_delta_6j(const CouplingSpec& spec, int l, bool include_l0 = true);
// Racah route when its error bound is below 1e-13 Delta-hat(0), exact 6j otherwise.
double hat_delta(const CouplingSpec& spec, int l, bool include_l0 = true);

std::vector<double> hat_delta_all(const CouplingSpec& spec, bool include_l0 = true);
std::vector<double> z_of_l(const CouplingSpec& spec);

// F_l(x) = 2F1(1+l, -l; 1; x^2)
double f_poly(int l, double x);
// Limit scaling function Y(x), x = l/2j.
double y_scaling(const CouplingSpec& spec, double x);

double d0(const CouplingSpec& spec);
double hat_delta0(const CouplingSpec& spec);  // sum (2l+1) Delta-bar(l)
double z_av(const CouplingSpec& spec);        // Delta-bar(0) / Delta-hat(0)

struct Timescales {
    double tau0 = 1.0, tau1 = 1.0, tau2 = 1.0, tau3 = 1.0;
};

// In units of tau0 unless absolute is set.
Timescales timescales(const CouplingSpec& spec, bool absolute = false);

// ||H||_2 = sqrt(Delta-hat(0)) and the interaction share ||H'||^2/||H||^2 = 1 - Z_av.
double hamiltonian_norm(const CouplingSpec& spec);
double interaction_norm_fraction(const CouplingSpec& spec);

struct CouplingDerived {
    CouplingSpec spec;
    std::vector<double> hat_delta;        // Delta-hat(l), l = 0..2j
    std::vector<double> z;                // Z(l)
    double hat_delta0 = 0.0;
    double d0 = 0.0;
    double z_av = 0.0;
    double hat_delta_av = 0.0;            // equals Delta-bar(0)
    std::vector<double> hat_delta_prime;  // l = 0 channel excluded
    std::vector<double> z_prime;          // NaN when no l >= 1 coupling
    Timescales tau;                       // absolute units
};

CouplingDerived derive(const CouplingSpec& spec);

io::json timescale_report(const CouplingDerived& d);

// Coupling families behind the appendix Z(l) plots.
struct Family {
    std::string name;
    std::string description;
    std::vector<std::pair<std::string, CouplingSpec>> panels;
};

std::vector<Family> appendix_families();

}  // namespace spindeco::coupling
