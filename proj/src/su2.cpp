#include "spindeco/su2.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <mutex>
#include <stdexcept>

namespace spindeco::su2 {

namespace mp = boost::multiprecision;

std::string HalfInt::str() const {
    if (twice % 2 == 0) return std::to_string(twice / 2);
    return std::to_string(twice) + "/2";
}

double to_double(const Rational& q) {
    BigInt num = mp::numerator(q);
    BigInt den = mp::denominator(q);
    if (num == 0) return 0.0;
    const bool negative = num < 0;
    if (negative) num = -num;
    constexpr long keep = 62;
    long shift = 0;
    const long num_bits = static_cast<long>(mp::msb(num));
    const long den_bits = static_cast<long>(mp::msb(den));
    if (num_bits > keep) {
        num >>= (num_bits - keep);
        shift += num_bits - keep;
    }
    if (den_bits > keep) {
        den >>= (den_bits - keep);
        shift -= den_bits - keep;
    }
    const double v = std::ldexp(num.convert_to<double>() / den.convert_to<double>(),
                                static_cast<int>(shift));
    return negative ? -v : v;
}

SignedSqrtRational SignedSqrtRational::from_signed_square(const Rational& signed_square) {
    SignedSqrtRational out;
    if (signed_square > 0) {
        out.sign = 1;
        out.radicand = signed_square;
    } else if (signed_square < 0) {
        out.sign = -1;
        out.radicand = -signed_square;
    }
    return out;
}

double SignedSqrtRational::value() const {
    if (sign == 0) return 0.0;
    return sign * std::sqrt(to_double(radicand));
}

Rational SignedSqrtRational::signed_square() const {
    return sign >= 0 ? Rational(sign == 0 ? Rational(0) : radicand) : Rational(-radicand);
}

FactorialTable::FactorialTable(int n_max) {
    if (n_max < 0) throw std::invalid_argument("factorial table: n_max must be >= 0");
    if (n_max > kMaxCapacity)
        throw std::length_error("factorial table: n_max " + std::to_string(n_max) +
                                " exceeds capacity " + std::to_string(kMaxCapacity));
    exact_.resize(n_max + 1);
    log_.resize(n_max + 1);
    exact_[0] = 1;
    log_[0] = 0.0;
    for (int n = 1; n <= n_max; ++n) {
        exact_[n] = exact_[n - 1] * n;
        log_[n] = std::lgamma(n + 1.0);
    }
}

const BigInt& FactorialTable::exact(int n) const {
    if (n < 0 || n > capacity())
        throw std::out_of_range("factorial table: index " + std::to_string(n) +
                                " outside [0, " + std::to_string(capacity()) + "]");
    return exact_[n];
}

double FactorialTable::log(int n) const {
    if (n < 0 || n > capacity())
        throw std::out_of_range("factorial table: index " + std::to_string(n) +
                                " outside [0, " + std::to_string(capacity()) + "]");
    return log_[n];
}

FactorialTable log_factorial_table(int n_max) { return FactorialTable(n_max); }

std::shared_ptr<const FactorialTable> shared_factorials(int n_max) {
    static std::mutex mutex;
    static std::shared_ptr<const FactorialTable> table;
    std::lock_guard<std::mutex> lock(mutex);
    if (!table || table->capacity() < n_max) {
        int cap = table ? table->capacity() : 64;
        while (cap < n_max) cap *= 2;
        cap = std::min(std::max(cap, n_max), FactorialTable::kMaxCapacity);
        table = std::make_shared<const FactorialTable>(std::max(cap, n_max));
    }
    return table;
}

bool triangle(HalfInt a, HalfInt b, HalfInt c) {
    if (a.twice < 0 || b.twice < 0 || c.twice < 0) return false;
    if ((a.twice + b.twice + c.twice) % 2 != 0) return false;
    return c.twice <= a.twice + b.twice && c.twice >= std::abs(a.twice - b.twice);
}

namespace {

// Sum_{k} prod of term ratios, evaluated as a Horner-nested rational.
// ratio(k) gives T(k+1)/T(k) as (p, q) with p possibly negative.
template <class RatioFn>
Rational nested_sum(int k_lo, int k_hi, RatioFn ratio) {
    BigInt num = 1;
    BigInt den = 1;
    for (int k = k_hi - 1; k >= k_lo; --k) {
        auto [p, q] = ratio(k);
        // acc <- 1 + (p/q) * acc
        num = den * q + num * p;
        den *= q;
    }
    return Rational(num, den);
}

}  // namespace

SignedSqrtRational clebsch_gordan(HalfInt j1, HalfInt m1, HalfInt j2, HalfInt m2,
                                  HalfInt j3, HalfInt m3) {
    if (m1.twice + m2.twice != m3.twice) return {};
    if (!triangle(j1, j2, j3)) return {};
    if (std::abs(m1.twice) > j1.twice || std::abs(m2.twice) > j2.twice ||
        std::abs(m3.twice) > j3.twice)
        return {};
    if ((j1.twice + m1.twice) % 2 || (j2.twice + m2.twice) % 2 || (j3.twice + m3.twice) % 2)
        return {};

    // Integer combinations (all exact after the parity checks above).
    const int a1 = (j1.twice + j2.twice - j3.twice) / 2;
    const int a2 = (j1.twice - j2.twice + j3.twice) / 2;
    const int a3 = (-j1.twice + j2.twice + j3.twice) / 2;
    const int a4 = (j1.twice + j2.twice + j3.twice) / 2 + 1;
    const int j1pm = (j1.twice + m1.twice) / 2, j1mm = (j1.twice - m1.twice) / 2;
    const int j2pm = (j2.twice + m2.twice) / 2, j2mm = (j2.twice - m2.twice) / 2;
    const int j3pm = (j3.twice + m3.twice) / 2, j3mm = (j3.twice - m3.twice) / 2;
    const int e5 = (j3.twice - j2.twice + m1.twice) / 2;  // d5 = e5 + k
    const int e6 = (j3.twice - j1.twice - m2.twice) / 2;  // d6 = e6 + k

    const int k_lo = std::max({0, -e5, -e6});
    const int k_hi = std::min({a1, j1mm, j2pm});
    if (k_lo > k_hi) return {};

    auto fact = shared_factorials(a4 + 1);
    const auto& F = *fact;

    Rational pref2 = Rational(BigInt((j3.twice + 1) * F.exact(a1) * F.exact(a2) * F.exact(a3)),
                              F.exact(a4));
    pref2 *= Rational(F.exact(j1pm) * F.exact(j1mm) * F.exact(j2pm) * F.exact(j2mm) *
                      F.exact(j3pm) * F.exact(j3mm));

    const int k = k_lo;
    BigInt lead_den = F.exact(k) * F.exact(a1 - k) * F.exact(j1mm - k) * F.exact(j2pm - k) *
                      F.exact(e5 + k) * F.exact(e6 + k);
    Rational sum = nested_sum(k_lo, k_hi, [&](int kk) {
        const long long p = -static_cast<long long>(a1 - kk) * (j1mm - kk) * (j2pm - kk);
        const long long q = static_cast<long long>(kk + 1) * (e5 + kk + 1) * (e6 + kk + 1);
        return std::pair<BigInt, BigInt>(BigInt(p), BigInt(q));
    });
    sum /= Rational(lead_den);
    if (k_lo % 2) sum = -sum;

    if (sum == 0) return {};
    SignedSqrtRational out;
    out.sign = sum > 0 ? 1 : -1;
    out.radicand = pref2 * sum * sum;
    return out;
}

SignedSqrtRational wigner6j(HalfInt a, HalfInt b, HalfInt c, HalfInt d, HalfInt e, HalfInt f) {
    if (!triangle(a, b, c) || !triangle(a, e, f) || !triangle(d, b, f) || !triangle(d, e, c))
        return {};

    auto delta2_args = [](HalfInt x, HalfInt y, HalfInt z) {
        return std::array<int, 4>{(x.twice + y.twice - z.twice) / 2,
                                  (x.twice - y.twice + z.twice) / 2,
                                  (-x.twice + y.twice + z.twice) / 2,
                                  (x.twice + y.twice + z.twice) / 2 + 1};
    };
    const std::array<std::array<int, 4>, 4> tri = {delta2_args(a, b, c), delta2_args(a, e, f),
                                                   delta2_args(d, b, f), delta2_args(d, e, c)};

    const int al1 = (a.twice + b.twice + c.twice) / 2;
    const int al2 = (a.twice + e.twice + f.twice) / 2;
    const int al3 = (d.twice + b.twice + f.twice) / 2;
    const int al4 = (d.twice + e.twice + c.twice) / 2;
    const int be1 = (a.twice + b.twice + d.twice + e.twice) / 2;
    const int be2 = (a.twice + c.twice + d.twice + f.twice) / 2;
    const int be3 = (b.twice + c.twice + e.twice + f.twice) / 2;

    const int t_lo = std::max({al1, al2, al3, al4});
    const int t_hi = std::min({be1, be2, be3});
    if (t_lo > t_hi) return {};

    auto fact = shared_factorials(t_hi + 2);
    const auto& F = *fact;

    BigInt tri_num = 1, tri_den = 1;
    for (const auto& t : tri) {
        tri_num *= F.exact(t[0]) * F.exact(t[1]) * F.exact(t[2]);
        tri_den *= F.exact(t[3]);
    }

    const int t = t_lo;
    BigInt lead_den = F.exact(t - al1) * F.exact(t - al2) * F.exact(t - al3) * F.exact(t - al4) *
                      F.exact(be1 - t) * F.exact(be2 - t) * F.exact(be3 - t);
    Rational sum = nested_sum(t_lo, t_hi, [&](int tt) {
        BigInt p = BigInt(-(tt + 2)) * (be1 - tt) * (be2 - tt) * (be3 - tt);
        BigInt q = BigInt(tt + 1 - al1) * (tt + 1 - al2) * (tt + 1 - al3) * (tt + 1 - al4);
        return std::pair<BigInt, BigInt>(p, q);
    });
    sum *= Rational(F.exact(t + 1), lead_den);
    if (t_lo % 2) sum = -sum;

    if (sum == 0) return {};
    SignedSqrtRational out;
    out.sign = sum > 0 ? 1 : -1;
    out.radicand = Rational(tri_num, tri_den) * sum * sum;
    return out;
}

}  // namespace spindeco::su2
