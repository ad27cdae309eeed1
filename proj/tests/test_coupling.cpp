#include "spindeco/coupling.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace spindeco;
using namespace spindeco::coupling;
using su2::HalfInt;

namespace {

CouplingSpec make_spec(int two_j, std::map<int, double> db) {
    CouplingSpec s;
    s.j = HalfInt(two_j);
    s.delta_bar = std::move(db);
    return s;
}

CouplingSpec random_spec(std::mt19937_64& rng, int max_two_j, int max_l0) {
    std::uniform_int_distribution<int> tj(1, max_two_j);
    CouplingSpec s;
    s.j = HalfInt(tj(rng));
    const int l0 = std::uniform_int_distribution<int>(1, std::min(max_l0, s.j.twice))(rng);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int l = 0; l <= l0; ++l)
        if (u(rng) < 0.7) s.delta_bar[l] = u(rng);
    s.delta_bar[std::uniform_int_distribution<int>(1, l0)(rng)] = 0.1 + u(rng);
    return s;
}

}  // namespace

TEST_SUITE("coupling") {

TEST_CASE("equal couplings reproduce the GUE") {
    for (int tj : {1, 2, 5, 12, 20}) {
        std::map<int, double> db;
        for (int l = 0; l <= tj; ++l) db[l] = 0.25;
        auto s = make_spec(tj, db);
        const int N = 7;
        const double Delta = s.delta(0, N);
        CHECK(hat_delta0(s) == doctest::Approx((tj + 1) * N * Delta).epsilon(1e-13));
        auto z = z_of_l(s);
        CHECK(z[0] == 1.0);
        for (int l = 1; l <= tj; ++l) {
            CHECK(std::abs(z[l]) < 1e-12);
            CHECK(std::abs(hat_delta_6j(s, l)) < 1e-12 * hat_delta0(s));
        }
    }
}

TEST_CASE("Delta-hat(0) is the weighted channel sum") {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 50; ++trial) {
        auto s = random_spec(rng, 40, 8);
        double expected = 0.0;
        for (const auto& [l, v] : s.delta_bar) expected += (2 * l + 1.0) / s.j.multiplicity() * s.tilde(l);
        CHECK(hat_delta(s, 0) == doctest::Approx(expected).epsilon(1e-12));
        CHECK(hat_delta_6j(s, 0) == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("spin one half with a single l=1 channel") {
    auto s = make_spec(1, {{1, 0.8}});
    CHECK(hat_delta(s, 0) == doctest::Approx(s.tilde(1) * 1.5).epsilon(1e-14));
    const double racah = hat_delta_racah(s, 1).value;
    const double six = hat_delta_6j(s, 1);
    CHECK(std::abs(racah - six) < 1e-12);
    CHECK(six == doctest::Approx(-0.8).epsilon(1e-14));  // -Delta-tilde/2
    CHECK(z_of_l(s)[1] == doctest::Approx(-1.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("Racah fast path equals the exact 6j path for j <= 40") {
    std::mt19937_64 rng(7);
    for (int tj = 1; tj <= 80; tj += (tj < 10 ? 1 : 7)) {
        CouplingSpec s;
        s.j = HalfInt(tj);
        std::uniform_real_distribution<double> u(0.05, 1.0);
        for (int l = 0; l <= std::min(tj, 4); ++l) s.delta_bar[l] = u(rng);
        const double h0 = hat_delta0(s);
        for (int l = 0; l <= tj; ++l) {
            const double a = hat_delta_racah(s, l).value, b = hat_delta_6j(s, l);
            CHECK(std::abs(a - b) <= 1e-10 * std::max(std::abs(b), 1e-3 * h0));
        }
    }
}

TEST_CASE("Z(l) parity limits at large j") {
    auto even = make_spec(400, {{0, 1.0}, {2, 1.0}});
    auto odd = make_spec(400, {{1, 1.0}, {3, 1.0}});
    CHECK(z_of_l(even).back() > 0.97);
    CHECK(z_of_l(odd).back() < -0.97);
    CHECK(z_of_l(even).back() < 1.0);
    CHECK(z_of_l(odd).back() > -1.0);
}

TEST_CASE("Y scaling function") {
    auto s = make_spec(40, {{0, 0.3}, {2, 1.1}, {3, 0.4}});
    CHECK(y_scaling(s, 0.0) == doctest::Approx(1.0));
    auto one = make_spec(40, {{1, 2.0}});
    for (double x : {0.0, 0.2, 0.5, 0.9, 1.0}) CHECK(y_scaling(one, x) == doctest::Approx(1 - 2 * x * x).epsilon(1e-14));
    // F_l(1) = (-1)^l
    for (int l = 0; l <= 8; ++l) CHECK(f_poly(l, 1.0) == doctest::Approx((l % 2) ? -1.0 : 1.0));
    // j = 400: Z(l) approaches Y(l/2j)
    auto big = make_spec(800, {{0, 0.5}, {1, 1.0}, {2, 0.7}, {3, 0.2}});
    auto z = z_of_l(big);
    double sup = 0.0;
    for (int l = 0; l <= 800; ++l) sup = std::max(sup, std::abs(z[l] - y_scaling(big, l / 800.0)));
    CHECK(sup < 0.01);
}

TEST_CASE("D0 values") {
    CHECK(d0(make_spec(10, {{1, 3.0}})) == doctest::Approx(2.0).epsilon(1e-15));
    // equal weights on 0..l0: D0 = l0 (l0 + 2) / 2 ~ l0^2 / 2
    for (int l0 : {2, 5, 20, 60}) {
        std::map<int, double> db;
        for (int l = 0; l <= l0; ++l) db[l] = 1.0;
        const double D0 = d0(make_spec(200, db));
        CHECK(D0 == doctest::Approx(l0 * (l0 + 2) / 2.0).epsilon(1e-13));
        if (l0 >= 20) CHECK(D0 / (l0 * l0 / 2.0) == doctest::Approx(1.0).epsilon(2.0 / l0 + 1e-12));
    }
    // a dominant l=0 channel suppresses D0 like l0^4 Delta / Delta(0)
    for (double big : {1e3, 1e5}) {
        auto s = make_spec(40, {{0, big}, {1, 1.0}, {2, 1.0}, {3, 1.0}});
        const double D0 = d0(s);
        CHECK(D0 < 9.0 * 0.1);
        // sum_{l=1}^{3} (2l+1) l (l+1) = 120; prefactor check against the exact sum
        CHECK(D0 * (big + 15.0) == doctest::Approx(120.0).epsilon(1e-13));
    }
}

TEST_CASE("worked configuration: j=20 with only l=1") {
    for (double v : {1.0, 0.37, 5.5}) {
        auto t = timescales(make_spec(40, {{1, v}}));
        CHECK(t.tau0 == 1.0);
        CHECK(t.tau1 == 1.0);
        CHECK(t.tau2 == 10.0);
        CHECK(t.tau3 == 200.0);
    }
    auto abs_t = timescales(make_spec(40, {{1, 4.0}}), true);
    CHECK(abs_t.tau0 == doctest::Approx(1.0 / std::sqrt(12.0)));
    CHECK(abs_t.tau2 == doctest::Approx(10.0 / std::sqrt(12.0)));
}

TEST_CASE("timescale limits and the tau1/tau2 bounds") {
    auto only0 = make_spec(20, {{0, 1.0}});
    auto t = timescales(only0);
    CHECK(std::isinf(t.tau1));
    CHECK(std::isinf(t.tau2));
    CHECK(interaction_norm_fraction(only0) == 0.0);
    // Z_av -> 1 pushes tau1 up
    double prev = 0.0;
    for (double d : {1.0, 10.0, 100.0, 1000.0}) {
        const double tau1 = timescales(make_spec(20, {{0, d}, {1, 1.0}})).tau1;
        CHECK(tau1 > prev);
        prev = tau1;
    }
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 200; ++trial) {
        auto s = random_spec(rng, 120, 10);
        auto ts = timescales(s);
        const int l0 = s.l0();
        const double j = s.j.value();
        CHECK(ts.tau0 <= ts.tau1);
        CHECK(ts.tau2 >= j / (l0 * (l0 + 1.0)) * ts.tau1 * (1 - 1e-12));
        CHECK(ts.tau2 <= j / 2.0 * ts.tau1 * (1 + 1e-12));
    }
}

TEST_CASE("norms") {
    auto s = make_spec(6, {{0, 2.0}, {1, 1.0}, {3, 0.5}});
    CHECK(hamiltonian_norm(s) == doctest::Approx(std::sqrt(2.0 + 3.0 + 3.5)));
    CHECK(interaction_norm_fraction(s) == doctest::Approx(1.0 - z_av(s)));
    // GUE normalization: mean tr(H^2) = (2j+1)^2 N^2 Delta  <=>  ||H||^2 = (2j+1) N Delta
    std::map<int, double> db;
    for (int l = 0; l <= 6; ++l) db[l] = 1.0;
    auto gue = make_spec(6, db);
    const int N = 11;
    CHECK(hamiltonian_norm(gue) * hamiltonian_norm(gue) == doctest::Approx(7.0 * N * gue.delta(0, N)));
}

TEST_CASE("derived quantities and the mode average") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 30; ++trial) {
        auto s = random_spec(rng, 30, 6);
        auto d = derive(s);
        CHECK(d.z[0] == 1.0);
        CHECK(d.z_av == doctest::Approx(s.bar(0) / d.hat_delta0));
        double avg = 0.0, avg_h = 0.0;
        const int dim = s.j.multiplicity();
        for (int l = 0; l <= s.j.twice; ++l) {
            avg += (2 * l + 1) * d.z[l];
            avg_h += (2 * l + 1) * d.hat_delta[l];
        }
        CHECK(avg / (dim * dim) == doctest::Approx(d.z_av).epsilon(1e-10).scale(1.0));
        CHECK(avg_h / (dim * dim) == doctest::Approx(s.bar(0)).epsilon(1e-10).scale(1.0));
        // Z(l) = (Delta_av + Delta'(l)) / (Delta_av + Delta'(0))
        for (int l = 0; l <= s.j.twice; ++l) {
            const double alt = (d.hat_delta_av + d.hat_delta_prime[l]) / (d.hat_delta_av + d.hat_delta_prime[0]);
            CHECK(alt == doctest::Approx(d.z[l]).epsilon(1e-12).scale(1.0));
            CHECK(d.hat_delta_prime[l] == doctest::Approx(hat_delta(s, l, false)).epsilon(1e-12).scale(d.hat_delta0));
        }
        CHECK(d.z_prime[0] == doctest::Approx(1.0));
    }
}

TEST_CASE("|Z(l)| < 1 away from l = 0 over random specs") {
    std::mt19937_64 rng(2025);
    for (int trial = 0; trial < 150; ++trial) {
        auto s = random_spec(rng, 120, trial % 10 == 0 ? 120 : 8);
        auto z = z_of_l(s);
        for (int l = 1; l <= s.j.twice; ++l) {
            CHECK(z[l] < 1.0);
            CHECK(z[l] > -1.0);
        }
    }
}

TEST_CASE("small-l expansion residual is quartic") {
    auto s = make_spec(400, {{0, 0.4}, {1, 1.0}, {2, 0.6}, {3, 0.3}});
    auto z = z_of_l(s);
    const double D0 = d0(s), j = 200.0;
    std::vector<double> xs, ys;
    for (int l = 4; l <= 20; ++l) {
        const double r = z[l] - (1.0 - l * (l + 1.0) * D0 / (4 * j * (j + 1)));
        xs.push_back(std::log(l / j));
        ys.push_back(std::log(std::abs(r)));
    }
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) { mx += xs[i]; my += ys[i]; }
    mx /= xs.size(); my /= ys.size();
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) { sxy += (xs[i] - mx) * (ys[i] - my); sxx += (xs[i] - mx) * (xs[i] - mx); }
    const double slope = sxy / sxx;
    CHECK(slope >= 3.5);
    // and the expansion is within 1% for l <= 4 at j = 40 (acceptance regime)
    auto s40 = make_spec(80, {{0, 1.0}, {1, 1.0}, {2, 1.0}, {3, 1.0}});
    auto z40 = z_of_l(s40);
    const double D40 = d0(s40);
    for (int l = 1; l <= 4; ++l) {
        const double approx = 1.0 - l * (l + 1.0) * D40 / (4 * 40.0 * 41.0);
        CHECK(std::abs(z40[l] - approx) <= 0.01 * std::abs(z40[l]));
    }
}

TEST_CASE("appendix families show the documented features") {
    auto fams = appendix_families();
    CHECK(fams.size() == 7);
    for (const auto& f : fams) {
        CHECK(!f.panels.empty());
        for (const auto& [name, s] : f.panels) {
            auto z = z_of_l(s);
            CHECK(z[0] == 1.0);
            for (int l = 1; l <= s.j.twice; ++l) CHECK(std::abs(z[l]) < 1.0);
            const double zend = z.back();
            if (f.name == "single-odd" || f.name == "all-odd") CHECK(zend < 0.0);
            if (f.name == "all-even") CHECK(zend > 0.0);
            if (f.name == "equal") CHECK(zend * ((s.l0() % 2) ? -1.0 : 1.0) > 0.0);
            if (f.name == "delta0-zero") {
                // Z_av = 0: the mode average of Z vanishes
                double avg = 0.0;
                for (int l = 0; l <= s.j.twice; ++l) avg += (2 * l + 1) * z[l];
                CHECK(std::abs(avg) < 1e-9 * s.j.multiplicity() * s.j.multiplicity());
            }
        }
        if (f.name == "large-delta0") {
            // 1 - Z(l) shrinks uniformly as Delta(0) grows
            double prev_min = -2.0;
            for (const auto& [name, s] : f.panels) {
                auto z = z_of_l(s);
                const double zmin = *std::min_element(z.begin(), z.end());
                CHECK(zmin > prev_min);
                prev_min = zmin;
            }
            CHECK(prev_min > 0.9);
        }
    }
}

TEST_CASE("spec JSON round trip and validation errors") {
    auto s = make_spec(5, {{0, 0.5}, {3, 1.25}});
    s.N = 64;
    auto back = spec_from_json(to_json(s));
    CHECK(back.j.twice == 5);
    CHECK(back.bar(3) == 1.25);
    CHECK(back.N.value() == 64);

    auto field_of = [](const char* text) {
        try {
            spec_from_json(io::json::parse(text));
        } catch (const SpecError& e) {
            return e.field();
        }
        return std::string("<none>");
    };
    CHECK(field_of(R"({"delta_bar": {"1": 1}})") == "two_j");
    CHECK(field_of(R"({"two_j": -1, "delta_bar": {"0": 1}})") == "two_j");
    CHECK(field_of(R"({"two_j": 2, "delta_bar": {"3": 1}})") == "delta_bar.3");
    CHECK(field_of(R"({"two_j": 2, "delta_bar": {"1": -0.5}})") == "delta_bar.1");
    CHECK(field_of(R"({"two_j": 2, "delta_bar": {"x": 1}})") == "delta_bar.x");
    CHECK(field_of(R"({"two_j": 2, "delta_bar": {"1": 0}})") == "delta_bar");
    CHECK(field_of(R"({"two_j": 2, "delta_bar": {"1": 1}, "N": 0})") == "N");
    CHECK(field_of(R"({"two_j": 2, "delta_bar": {"1": 1}, "bogus": 0})") == "bogus");
    CHECK(field_of(R"({"two_j": 2, "delta_bar": {"1": 1}})") == "<none>");
}

}  // TEST_SUITE
