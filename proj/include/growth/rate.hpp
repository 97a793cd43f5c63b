#pragma once
/**
 * @file rate.hpp
 * @brief Exact non-negative rational used for every growth coefficient.
 *
 * All coefficients in this library are ratios of integer event counts.
 * Keeping them as reduced num/den pairs (instead of doubles) makes the
 * algebraic identities between coefficients hold exactly:
 *
 *   - the retention/viral decomposition sums to the growth flow ratio,
 *   - the pure-viral ratio form equals the flow form when new == invited,
 *   - scaling every count by a positive integer leaves all ratios unchanged.
 *
 * Conversion to double happens only at the presentation boundary.
 */

#include <compare>
#include <cstdint>
#include <string>

namespace growth {

class Rate {
public:
    /// Zero (0/1).
    constexpr Rate() = default;

    /// Reduced rational num/den. Requires num >= 0 and den > 0;
    /// throws std::invalid_argument otherwise.
    Rate(std::int64_t num, std::int64_t den);

    [[nodiscard]] std::int64_t num() const { return num_; }
    [[nodiscard]] std::int64_t den() const { return den_; }

    /// Nearest-double value; presentation only.
    [[nodiscard]] double value() const;

    /// Integer percent, round-half-away-from-zero (2.5% -> 3).
    /// Computed in integer arithmetic, so ties are exact.
    [[nodiscard]] int percent() const;

    /// Shortest decimal string that round-trips through double.
    [[nodiscard]] std::string str() const;

    friend Rate operator+(const Rate& a, const Rate& b);
    friend Rate operator*(const Rate& a, const Rate& b);

    /// Exact value equality (both sides are kept in reduced form).
    friend bool operator==(const Rate& a, const Rate& b) = default;
    friend std::strong_ordering operator<=>(const Rate& a, const Rate& b);

private:
    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

} // namespace growth
