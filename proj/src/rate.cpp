#include "growth/rate.hpp"

#include <cstdio>
#include <numeric>
#include <stdexcept>

namespace growth {

namespace {

using int128 = __int128;

std::int64_t checked_narrow(int128 v) {
    if (v > INT64_MAX || v < 0)
        throw std::overflow_error("rate arithmetic overflow");
    return static_cast<std::int64_t>(v);
}

} // namespace

Rate::Rate(std::int64_t num, std::int64_t den) {
    if (den <= 0)
        throw std::invalid_argument("rate denominator must be positive");
    if (num < 0)
        throw std::invalid_argument("rate numerator must be non-negative");
    const std::int64_t g = std::gcd(num, den);
    num_ = num / g;
    den_ = den / g;
}

double Rate::value() const {
    return static_cast<double>(num_) / static_cast<double>(den_);
}

int Rate::percent() const {
    const int128 scaled = int128{num_} * 100;
    const int128 q = scaled / den_;
    const int128 r = scaled % den_;
    return static_cast<int>(q + (2 * r >= den_ ? 1 : 0));
}

std::string Rate::str() const {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", value());
    // trim to the shortest representation that still round-trips
    for (int prec = 1; prec < 17; ++prec) {
        char shorter[32];
        std::snprintf(shorter, sizeof shorter, "%.*g", prec, value());
        double back = 0.0;
        std::sscanf(shorter, "%lf", &back);
        if (back == value())
            return shorter;
    }
    return buf;
}

Rate operator+(const Rate& a, const Rate& b) {
    const int128 num = int128{a.num_} * b.den_ + int128{b.num_} * a.den_;
    const int128 den = int128{a.den_} * b.den_;
    // reduce in 128-bit space before narrowing
    int128 x = num, y = den;
    while (y != 0) {
        const int128 t = x % y;
        x = y;
        y = t;
    }
    const int128 g = x == 0 ? 1 : x;
    return Rate(checked_narrow(num / g), checked_narrow(den / g));
}

Rate operator*(const Rate& a, const Rate& b) {
    const std::int64_t g1 = std::gcd(a.num_, b.den_);
    const std::int64_t g2 = std::gcd(b.num_, a.den_);
    const int128 num = int128{a.num_ / g1} * (b.num_ / g2);
    const int128 den = int128{a.den_ / g2} * (b.den_ / g1);
    return Rate(checked_narrow(num), checked_narrow(den));
}

std::strong_ordering operator<=>(const Rate& a, const Rate& b) {
    const int128 lhs = int128{a.num_} * b.den_;
    const int128 rhs = int128{b.num_} * a.den_;
    if (lhs < rhs) return std::strong_ordering::less;
    if (lhs > rhs) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
}

} // namespace growth
