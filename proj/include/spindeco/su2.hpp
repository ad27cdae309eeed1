// su2.hpp - exact Clebsch-Gordan and 6j coefficients on twice-integer spins
#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <memory>
#include <string>
#include <vector>

namespace spindeco::su2 {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// Angular momentum label stored as 2j, so half-integers stay exact.
struct HalfInt {
    int twice = 0;

    constexpr HalfInt() = default;
    constexpr explicit HalfInt(int twice_value) : twice(twice_value) {}

    static constexpr HalfInt from_twice(int t) { return HalfInt(t); }
    static constexpr HalfInt integer(int v) { return HalfInt(2 * v); }

    constexpr bool is_integer() const { return twice % 2 == 0; }
    constexpr double value() const { return 0.5 * twice; }
    // 2j+1 for a spin label.
    constexpr int multiplicity() const { return twice + 1; }

    constexpr HalfInt operator-() const { return HalfInt(-twice); }
    constexpr HalfInt operator+(HalfInt o) const { return HalfInt(twice + o.twice); }
    constexpr HalfInt operator-(HalfInt o) const { return HalfInt(twice - o.twice); }
    constexpr auto operator<=>(const HalfInt&) const = default;

    std::string str() const;
};

// sign * sqrt(radicand), radicand an exact nonnegative rational in lowest terms.
struct SignedSqrtRational {
    int sign = 0;
    Rational radicand = 0;

    static SignedSqrtRational zero() { return {}; }
    static SignedSqrtRational from_signed_square(const Rational& signed_square);

    double value() const;
    // sign * radicand, i.e. the coefficient times its absolute value.
    Rational signed_square() const;
    bool operator==(const SignedSqrtRational& o) const {
        return sign == o.sign && (sign == 0 || radicand == o.radicand);
    }
};

// Nearest double to a (possibly huge) rational.
double to_double(const Rational& q);

class FactorialTable {
public:
    // Hard ceiling on table size; requests beyond it raise std::length_error.
    static constexpr int kMaxCapacity = 20000;

    explicit FactorialTable(int n_max);

    int capacity() const { return static_cast<int>(exact_.size()) - 1; }
    const BigInt& exact(int n) const;
    double log(int n) const;

private:
    std::vector<BigInt> exact_;
    std::vector<double> log_;
};

FactorialTable log_factorial_table(int n_max);

// Process-wide table holding at least n_max; grows by replacement, never mutates
// a table that callers may still hold.
std::shared_ptr<const FactorialTable> shared_factorials(int n_max);

bool triangle(HalfInt a, HalfInt b, HalfInt c);

SignedSqrtRational clebsch_gordan(HalfInt j1, HalfInt m1, HalfInt j2, HalfInt m2,
                                  HalfInt j3, HalfInt m3);

// {j1 j2 j3; j4 j5 j6}
SignedSqrtRational wigner6j(HalfInt j1, HalfInt j2, HalfInt j3,
                            HalfInt j4, HalfInt j5, HalfInt j6);

}  // namespace spindeco::su2
