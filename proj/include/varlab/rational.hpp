#pragma once

#include <compare>
#include <cstdint>
#include <string>

namespace varlab {

/// Exact rational with 64-bit reduced terms; arithmetic widens to 128 bits and throws on overflow.
class Rational {
public:
    constexpr Rational() = default;
    Rational(std::int64_t n) : num_(n), den_(1) {}  // NOLINT(google-explicit-constructor)
    Rational(std::int64_t n, std::int64_t d);

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }

    /// 2^k for any integer k with |k| <= 62
    static Rational pow2(int k);
    /// Best approximation with denominator <= max_den (exact for such values).
    static Rational from_double(double x, std::int64_t max_den = 1'000'000);

    double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }
    std::int64_t floor() const;
    int sign() const { return (num_ > 0) - (num_ < 0); }
    Rational abs() const { return num_ < 0 ? Rational(-num_, den_) : *this; }
    std::string str() const;

    friend Rational operator+(const Rational& a, const Rational& b);
    friend Rational operator-(const Rational& a, const Rational& b);
    friend Rational operator*(const Rational& a, const Rational& b);
    friend Rational operator/(const Rational& a, const Rational& b);
    Rational operator-() const { return Rational(-num_, den_); }
    Rational& operator+=(const Rational& b) { return *this = *this + b; }

    friend bool operator==(const Rational& a, const Rational& b) = default;
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

private:
    static Rational make(__int128 n, __int128 d);
    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

inline Rational min(const Rational& a, const Rational& b) { return b < a ? b : a; }
inline Rational max(const Rational& a, const Rational& b) { return a < b ? b : a; }

/// Half-open interval [lo, hi) with exact endpoints.
struct RInterval {
    Rational lo;
    Rational hi;

    Rational length() const { return hi - lo; }
    Rational center() const { return (lo + hi) * Rational(1, 2); }
    bool empty() const { return !(lo < hi); }
    /// Same centre, c times the length.
    RInterval dilate(const Rational& c) const;
    bool subset_of(const RInterval& o) const { return o.lo <= lo && hi <= o.hi; }
    bool proper_subset_of(const RInterval& o) const { return subset_of(o) && !(*this == o); }
    bool intersects(const RInterval& o) const { return max(lo, o.lo) < min(hi, o.hi); }
    std::string str() const;

    friend bool operator==(const RInterval&, const RInterval&) = default;
    friend auto operator<=>(const RInterval&, const RInterval&) = default;
};

}  // namespace varlab
