#include "kerrpur/phase.hpp"

#include <charconv>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace kerrpur {

namespace {

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
    std::int64_t out = 0;
    if (__builtin_mul_overflow(a, b, &out)) {
        throw std::overflow_error("PhaseTag arithmetic overflow");
    }
    return out;
}

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
    std::int64_t out = 0;
    if (__builtin_add_overflow(a, b, &out)) {
        throw std::overflow_error("PhaseTag arithmetic overflow");
    }
    return out;
}

std::int64_t parse_int(std::string_view text) {
    std::int64_t value = 0;
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    if (!text.empty() && text.front() == '+') {
        ++first;
    }
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || first == last) {
        throw std::invalid_argument("bad integer in phase: '" + std::string(text) + "'");
    }
    return value;
}

}  // namespace

PhaseTag::PhaseTag(std::int64_t numerator, std::int64_t denominator) {
    if (denominator == 0) {
        throw std::invalid_argument("PhaseTag denominator must be non-zero");
    }
    if (denominator < 0) {
        numerator = -numerator;
        denominator = -denominator;
    }
    const std::int64_t g = std::gcd(numerator, denominator);
    numerator /= g;
    denominator /= g;
    // Period is 2π, i.e. 2·denominator in units of π/denominator.
    const std::int64_t period = checked_mul(2, denominator);
    numerator %= period;
    if (numerator < 0) {
        numerator += period;
    }
    num_ = numerator;
    den_ = denominator;
}

double PhaseTag::radians() const {
    return std::numbers::pi * static_cast<double>(num_) / static_cast<double>(den_);
}

PhaseTag PhaseTag::folded() const {
    // num/den > 1 means φ > π.
    if (num_ > den_) {
        return -*this;
    }
    return *this;
}

PhaseTag PhaseTag::operator+(const PhaseTag& rhs) const {
    const std::int64_t l = checked_mul(den_ / std::gcd(den_, rhs.den_), rhs.den_);
    const std::int64_t lhs_num = checked_mul(num_, l / den_);
    const std::int64_t rhs_num = checked_mul(rhs.num_, l / rhs.den_);
    return {checked_add(lhs_num, rhs_num), l};
}

PhaseTag PhaseTag::operator-() const { return {-num_, den_}; }

PhaseTag PhaseTag::operator-(const PhaseTag& rhs) const { return *this + (-rhs); }

PhaseTag PhaseTag::operator*(std::int64_t times) const { return {checked_mul(num_, times), den_}; }

std::string PhaseTag::to_string(bool ascii) const {
    if (num_ == 0) {
        return "0";
    }
    const std::string pi = ascii ? "pi" : "π";
    std::string out = num_ == 1 ? pi : std::to_string(num_) + pi;
    if (den_ != 1) {
        out += "/" + std::to_string(den_);
    }
    return out;
}

PhaseTag PhaseTag::parse(std::string_view text) {
    while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
    while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
    if (text.empty()) {
        throw std::invalid_argument("empty phase");
    }

    std::string_view numer = text;
    std::string_view denom;
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        numer = text.substr(0, slash);
        denom = text.substr(slash + 1);
        if (denom.empty()) throw std::invalid_argument("missing phase denominator: '" + std::string(text) + "'");
    }

    std::int64_t num = 0;
    if (auto at = numer.find("pi"); at != std::string_view::npos) {
        if (at + 2 != numer.size()) {
            throw std::invalid_argument("bad phase: '" + std::string(text) + "'");
        }
        std::string_view coeff = numer.substr(0, at);
        if (!coeff.empty() && coeff.back() == '*') coeff.remove_suffix(1);
        if (coeff.empty() || coeff == "+") {
            num = 1;
        } else if (coeff == "-") {
            num = -1;
        } else {
            num = parse_int(coeff);
        }
    } else {
        num = parse_int(numer);
    }
    const std::int64_t den = denom.empty() ? 1 : parse_int(denom);
    if (den <= 0) {
        throw std::invalid_argument("bad phase denominator: '" + std::string(text) + "'");
    }
    return {num, den};
}

std::ostream& operator<<(std::ostream& os, const PhaseTag& phase) { return os << phase.to_string(); }

}  // namespace kerrpur
