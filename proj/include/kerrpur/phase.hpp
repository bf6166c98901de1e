#pragma once

#include <compare>
#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>

namespace kerrpur {

/// Exact phase (numerator/denominator)·π, kept reduced and wrapped into [0, 2π).
///
/// Equality is structural: two tags compare equal iff they denote the same
/// point on the circle. No floating-point value ever decides it.
class PhaseTag {
public:
    constexpr PhaseTag() = default;
    PhaseTag(std::int64_t numerator, std::int64_t denominator);

    static PhaseTag zero() { return {}; }
    static PhaseTag pi() { return {1, 1}; }
    static PhaseTag fraction_of_pi(std::int64_t numerator, std::int64_t denominator) {
        return {numerator, denominator};
    }

    std::int64_t numerator() const { return num_; }
    std::int64_t denominator() const { return den_; }
    bool is_zero() const { return num_ == 0; }

    double radians() const;

    /// Sign-blind class representative: min(φ, 2π − φ), in [0, π].
    PhaseTag folded() const;

    PhaseTag operator+(const PhaseTag& rhs) const;
    PhaseTag operator-(const PhaseTag& rhs) const;
    PhaseTag operator-() const;
    PhaseTag operator*(std::int64_t times) const;
    PhaseTag& operator+=(const PhaseTag& rhs) { return *this = *this + rhs; }

    friend bool operator==(const PhaseTag&, const PhaseTag&) = default;
    friend std::strong_ordering operator<=>(const PhaseTag&, const PhaseTag&) = default;

    /// "0", "π/4", "3π/4", "π"; ASCII variant writes "pi".
    std::string to_string(bool ascii = false) const;

    /// Accepts "0", "pi", "pi/4", "3pi/4", "3*pi/4", "-pi/4", "3/4" (units of π).
    /// Throws std::invalid_argument on anything else.
    static PhaseTag parse(std::string_view text);

private:
    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

std::ostream& operator<<(std::ostream& os, const PhaseTag& phase);

}  // namespace kerrpur
