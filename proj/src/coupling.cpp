#include "spindeco/coupling.hpp"

#include <cmath>
#include <limits>
#include <random>

namespace spindeco::coupling {

double CouplingSpec::bar(int l) const {
    auto it = delta_bar.find(l);
    return it == delta_bar.end() ? 0.0 : it->second;
}

int CouplingSpec::l0() const {
    int best = -1;
    for (const auto& [l, v] : delta_bar)
        if (v > 0.0) best = std::max(best, l);
    return best;
}

void CouplingSpec::validate() const {
    if (j.twice < 0) throw SpecError("two_j", "must be >= 0, got " + std::to_string(j.twice));
    bool any = false;
    for (const auto& [l, v] : delta_bar) {
        const std::string field = "delta_bar." + std::to_string(l);
        if (l < 0 || l > j.twice)
            throw SpecError(field, "channel outside [0, 2j] = [0, " + std::to_string(j.twice) + "]");
        if (!std::isfinite(v) || v < 0.0) throw SpecError(field, "variance must be finite and >= 0");
        any = any || v > 0.0;
    }
    if (!any) throw SpecError("delta_bar", "at least one channel variance must be positive");
    if (N && *N < 1) throw SpecError("N", "must be a positive integer");
}

CouplingSpec spec_from_json(const io::json& js) {
    if (!js.is_object()) throw SpecError("spec", "expected a JSON object");
    CouplingSpec spec;
    if (!js.contains("two_j")) throw SpecError("two_j", "missing");
    if (!js["two_j"].is_number_integer()) throw SpecError("two_j", "must be an integer");
    spec.j = HalfInt(js["two_j"].get<int>());
    if (!js.contains("delta_bar")) throw SpecError("delta_bar", "missing");
    const auto& db = js["delta_bar"];
    if (!db.is_object()) throw SpecError("delta_bar", "must be an object {\"l\": value}");
    for (auto it = db.begin(); it != db.end(); ++it) {
        const std::string field = "delta_bar." + it.key();
        int l = 0;
        std::size_t used = 0;
        try {
            l = std::stoi(it.key(), &used);
        } catch (const std::exception&) {
            throw SpecError(field, "key is not an integer channel index");
        }
        if (used != it.key().size()) throw SpecError(field, "key is not an integer channel index");
        if (!it.value().is_number()) throw SpecError(field, "value must be a number");
        spec.delta_bar[l] = it.value().get<double>();
    }
    if (js.contains("N") && !js["N"].is_null()) {
        if (!js["N"].is_number_integer()) throw SpecError("N", "must be an integer");
        spec.N = js["N"].get<int>();
    }
    for (auto it = js.begin(); it != js.end(); ++it)
        if (it.key() != "two_j" && it.key() != "delta_bar" && it.key() != "N")
            throw SpecError(it.key(), "unknown field");
    spec.validate();
    return spec;
}

io::json to_json(const CouplingSpec& spec) {
    io::json js;
    js["two_j"] = spec.j.twice;
    io::json db = io::json::object();
    for (const auto& [l, v] : spec.delta_bar) db[std::to_string(l)] = v;
    js["delta_bar"] = db;
    if (spec.N) js["N"] = *spec.N;
    return js;
}

CouplingSpec load_spec(const std::filesystem::path& path) {
    io::json js;
    try {
        js = io::json::parse(io::read_file(path));
    } catch (const io::json::parse_error& e) {
        throw SpecError("spec", std::string("invalid JSON: ") + e.what());
    }
    return spec_from_json(js);
}

RacahValue hat_delta_racah(const CouplingSpec& spec, int l, bool include_l0) {
    const int tj = spec.j.twice;
    if (l < 0 || l > tj) throw std::out_of_range("hat_delta: l outside [0, 2j]");
    long double total = 0.0L, magnitude = 0.0L;
    int max_terms = 1;
    for (const auto& [lp, v] : spec.delta_bar) {
        if (v == 0.0 || (!include_l0 && lp == 0)) continue;
        long double term = 1.0L / (tj + 1);
        long double s = term, a = std::abs(term);
        const int kmax = std::min(l, lp);
        for (int k = 0; k < kmax; ++k) {
            const long double num = static_cast<long double>(lp + k + 1) * (lp - k) * (l + k + 1) * (l - k);
            const long double den = static_cast<long double>(k + 1) * (k + 1) * (tj - k) * (tj + k + 2);
            term *= -num / den;
            s += term;
            a += std::abs(term);
        }
        max_terms = std::max(max_terms, kmax + 1);
        total += static_cast<long double>(v) * (2 * lp + 1) * s;
        magnitude += static_cast<long double>(v) * (2 * lp + 1) * a;
    }
    RacahValue out;
    out.value = static_cast<double>((tj + 1) * total);
    const long double eps = std::numeric_limits<long double>::epsilon();
    out.error_bound = static_cast<double>((tj + 1) * magnitude * eps * (4 * max_terms + 8)) +
                      std::abs(out.value) * std::numeric_limits<double>::epsilon();
    return out;
}

double hat_delta_6j(const CouplingSpec& spec, int l, bool include_l0) {
    const int tj = spec.j.twice;
    if (l < 0 || l > tj) throw std::out_of_range("hat_delta: l outside [0, 2j]");
    const HalfInt j = spec.j;
    double total = 0.0;
    for (const auto& [lp, v] : spec.delta_bar) {
        if (v == 0.0 || (!include_l0 && lp == 0)) continue;
        const double six = su2::wigner6j(j, j, HalfInt(2 * lp), j, j, HalfInt(2 * l)).value();
        const double sign = ((tj + lp + l) % 2) ? -1.0 : 1.0;
        total += spec.tilde(lp) * (2 * lp + 1) * sign * six;
    }
    return total;
}

double hat_delta0(const CouplingSpec& spec) {
    double s = 0.0;
    for (const auto& [l, v] : spec.delta_bar) s += (2 * l + 1) * v;
    return s;
}

double hat_delta(const CouplingSpec& spec, int l, bool include_l0) {
    const RacahValue r = hat_delta_racah(spec, l, include_l0);
    if (r.error_bound <= 1e-13 * hat_delta0(spec)) return r.value;
    return hat_delta_6j(spec, l, include_l0);
}

std::vector<double> hat_delta_all(const CouplingSpec& spec, bool include_l0) {
    std::vector<double> out(spec.j.twice + 1);
    for (int l = 0; l <= spec.j.twice; ++l) out[l] = hat_delta(spec, l, include_l0);
    return out;
}

std::vector<double> z_of_l(const CouplingSpec& spec) {
    std::vector<double> h = hat_delta_all(spec);
    const double h0 = hat_delta0(spec);
    std::vector<double> z(h.size());
    for (std::size_t l = 0; l < h.size(); ++l) z[l] = h[l] / h0;
    z[0] = 1.0;
    return z;
}

double f_poly(int l, double x) {
    const double x2 = x * x;
    double term = 1.0, s = 1.0;
    for (int k = 0; k < l; ++k) {
        term *= -static_cast<double>(l + k + 1) * (l - k) / ((k + 1.0) * (k + 1.0)) * x2;
        s += term;
    }
    return s;
}

double y_scaling(const CouplingSpec& spec, double x) {
    double num = 0.0, den = 0.0;
    for (const auto& [l, v] : spec.delta_bar) {
        num += v * (2 * l + 1) * f_poly(l, x);
        den += v * (2 * l + 1);
    }
    return num / den;
}

double d0(const CouplingSpec& spec) {
    double num = 0.0;
    for (const auto& [l, v] : spec.delta_bar)
        if (l >= 1) num += v * (2 * l + 1) * l * (l + 1.0);
    return num / hat_delta0(spec);
}

double z_av(const CouplingSpec& spec) { return spec.bar(0) / hat_delta0(spec); }

Timescales timescales(const CouplingSpec& spec, bool absolute) {
    const double inf = std::numeric_limits<double>::infinity();
    Timescales t;
    t.tau0 = 1.0;
    const double one_minus = 1.0 - z_av(spec);
    t.tau1 = one_minus > 0.0 ? 1.0 / one_minus : inf;
    const double D0 = d0(spec);
    t.tau2 = D0 > 0.0 ? spec.j.value() / D0 : inf;
    t.tau3 = spec.j.value() * t.tau2;
    if (absolute) {
        const double tau0 = 1.0 / std::sqrt(hat_delta0(spec));
        t.tau0 *= tau0;
        t.tau1 *= tau0;
        t.tau2 *= tau0;
        t.tau3 *= tau0;
    }
    return t;
}

double hamiltonian_norm(const CouplingSpec& spec) { return std::sqrt(hat_delta0(spec)); }

double interaction_norm_fraction(const CouplingSpec& spec) {
    double s = 0.0;
    for (const auto& [l, v] : spec.delta_bar)
        if (l >= 1) s += (2 * l + 1) * v;
    return s / hat_delta0(spec);
}

CouplingDerived derive(const CouplingSpec& spec) {
    spec.validate();
    CouplingDerived d;
    d.spec = spec;
    d.hat_delta = hat_delta_all(spec);
    d.hat_delta0 = hat_delta0(spec);
    d.z = z_of_l(spec);
    d.d0 = coupling::d0(spec);
    d.z_av = coupling::z_av(spec);
    d.hat_delta_av = spec.bar(0);
    d.hat_delta_prime.resize(d.hat_delta.size());
    for (std::size_t l = 0; l < d.hat_delta.size(); ++l)
        d.hat_delta_prime[l] = l == 0 ? d.hat_delta0 - spec.bar(0) : d.hat_delta[l] - spec.bar(0);
    d.z_prime.resize(d.hat_delta.size());
    const double hp0 = d.hat_delta_prime[0];
    for (std::size_t l = 0; l < d.z_prime.size(); ++l)
        d.z_prime[l] = hp0 > 0.0 ? d.hat_delta_prime[l] / hp0 : std::numeric_limits<double>::quiet_NaN();
    d.tau = timescales(spec, true);
    return d;
}

io::json timescale_report(const CouplingDerived& d) {
    auto finite = [](double v) -> io::json {
        if (std::isfinite(v)) return v;
        return "inf";
    };
    const Timescales rel = timescales(d.spec, false);
    io::json r;
    r["spec"] = to_json(d.spec);
    r["hat_delta0"] = d.hat_delta0;
    r["D0"] = d.d0;
    r["Z_av"] = d.z_av;
    r["norm_H"] = std::sqrt(d.hat_delta0);
    r["tau_units"] = {{"tau0", rel.tau0}, {"tau1", finite(rel.tau1)}, {"tau2", finite(rel.tau2)},
                      {"tau3", finite(rel.tau3)}};
    r["absolute"] = {{"tau0", d.tau.tau0}, {"tau1", finite(d.tau.tau1)}, {"tau2", finite(d.tau.tau2)},
                     {"tau3", finite(d.tau.tau3)}};
    return r;
}

std::vector<Family> appendix_families() {
    auto make = [](int two_j, std::map<int, double> db) {
        CouplingSpec s;
        s.j = HalfInt(two_j);
        s.delta_bar = std::move(db);
        s.validate();
        return s;
    };
    auto label = [](int two_j, const std::string& rest) {
        return "twoj" + std::to_string(two_j) + "_" + rest;
    };
    std::vector<Family> out;

    Family equal{"equal", "all Delta(l) equal for 0 <= l <= l0", {}};
    Family no_zero{"delta0-zero", "Delta(0) = 0, Delta(l) equal for 1 <= l <= l0", {}};
    for (int two_j : {20, 80})
        for (int l0 : {1, 3, 10}) {
            std::map<int, double> a, b;
            for (int l = 0; l <= l0; ++l) a[l] = 1.0;
            for (int l = 1; l <= l0; ++l) b[l] = 1.0;
            equal.panels.emplace_back(label(two_j, "l0_" + std::to_string(l0)), make(two_j, a));
            no_zero.panels.emplace_back(label(two_j, "l0_" + std::to_string(l0)), make(two_j, b));
        }
    out.push_back(equal);
    out.push_back(no_zero);

    Family single_odd{"single-odd", "a single odd channel l1", {}};
    Family all_odd{"all-odd", "all odd l <= l0, equal", {}};
    Family all_even{"all-even", "all even l <= l0 (including l=0), equal", {}};
    for (int two_j : {20, 80}) {
        for (int l1 : {1, 3}) single_odd.panels.emplace_back(label(two_j, "l_" + std::to_string(l1)), make(two_j, {{l1, 1.0}}));
        for (int l0 : {3, 7}) {
            std::map<int, double> odd, even;
            for (int l = 1; l <= l0; l += 2) odd[l] = 1.0;
            for (int l = 0; l <= l0 - 1; l += 2) even[l] = 1.0;
            all_odd.panels.emplace_back(label(two_j, "l0_" + std::to_string(l0)), make(two_j, odd));
            all_even.panels.emplace_back(label(two_j, "l0_" + std::to_string(l0 - 1)), make(two_j, even));
        }
    }
    out.push_back(single_odd);
    out.push_back(all_odd);
    out.push_back(all_even);

    Family large0{"large-delta0", "Delta(1..3) = 1 fixed, Delta(0) growing", {}};
    for (double d0v : {1.0, 10.0, 100.0, 1000.0})
        large0.panels.emplace_back(label(80, "delta0_" + std::to_string(static_cast<int>(d0v))),
                                   make(80, {{0, d0v}, {1, 1.0}, {2, 1.0}, {3, 1.0}}));
    out.push_back(large0);

    Family random{"random", "random Delta(l) on l <= 5 (fixed seeds)", {}};
    for (unsigned seed : {1u, 2u}) {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        std::map<int, double> db;
        for (int l = 0; l <= 5; ++l) db[l] = u(rng);
        random.panels.emplace_back(label(80, "seed_" + std::to_string(seed)), make(80, db));
    }
    out.push_back(random);
    return out;
}

}  // namespace spindeco::coupling
