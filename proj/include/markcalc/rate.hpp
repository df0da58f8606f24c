#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace markcalc {

/// Exact nonnegative rational used for exponential rates and rate sums.
///
/// Values are kept in lowest terms so that equality is plain field
/// comparison. Arithmetic is checked; an intermediate that does not fit in
/// 64 bits raises std::overflow_error instead of silently wrapping.
class Rate {
public:
    constexpr Rate() = default;

    Rate(std::uint64_t numerator, std::uint64_t denominator = 1)
        : num_(numerator), den_(denominator) {
        if (den_ == 0)
            throw std::invalid_argument("rate denominator must be positive");
        normalize();
    }

    static Rate zero() { return Rate{}; }

    std::uint64_t numerator() const { return num_; }
    std::uint64_t denominator() const { return den_; }

    bool is_zero() const { return num_ == 0; }
    bool is_positive() const { return num_ != 0; }

    double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

    friend Rate operator+(const Rate& a, const Rate& b) {
        const std::uint64_t g = std::gcd(a.den_, b.den_);
        const std::uint64_t lhs_scale = b.den_ / g;
        const std::uint64_t rhs_scale = a.den_ / g;
        return from_parts(add(mul(a.num_, lhs_scale), mul(b.num_, rhs_scale)),
                          mul(a.den_, lhs_scale));
    }

    friend Rate operator*(const Rate& a, const Rate& b) {
        if (a.is_zero() || b.is_zero())
            return Rate{};
        // Cross-reduce first to keep intermediates small.
        const std::uint64_t g1 = std::gcd(a.num_, b.den_);
        const std::uint64_t g2 = std::gcd(b.num_, a.den_);
        return from_parts(mul(a.num_ / g1, b.num_ / g2), mul(a.den_ / g2, b.den_ / g1));
    }

    /// Exact a - b; requires a >= b.
    friend Rate operator-(const Rate& a, const Rate& b) {
        if (a < b)
            throw std::domain_error("rate subtraction would go negative");
        const std::uint64_t g = std::gcd(a.den_, b.den_);
        const std::uint64_t lhs_scale = b.den_ / g;
        const std::uint64_t rhs_scale = a.den_ / g;
        return from_parts(mul(a.num_, lhs_scale) - mul(b.num_, rhs_scale), mul(a.den_, lhs_scale));
    }

    Rate& operator+=(const Rate& other) { return *this = *this + other; }

    friend Rate scale(const Rate& r, std::uint64_t k) { return r * Rate(k); }

    friend bool operator==(const Rate&, const Rate&) = default;

    friend std::strong_ordering operator<=>(const Rate& a, const Rate& b) {
        const unsigned __int128 lhs = static_cast<unsigned __int128>(a.num_) * b.den_;
        const unsigned __int128 rhs = static_cast<unsigned __int128>(b.num_) * a.den_;
        if (lhs < rhs) return std::strong_ordering::less;
        if (lhs > rhs) return std::strong_ordering::greater;
        return std::strong_ordering::equal;
    }

    /// "3", "3/2".
    std::string to_string() const {
        if (den_ == 1)
            return std::to_string(num_);
        return std::to_string(num_) + "/" + std::to_string(den_);
    }

    /// Accepts "12", "1.25", "3/4". Returns false on anything else.
    static bool parse(std::string_view text, Rate& out);

    std::size_t hash() const {
        return std::hash<std::uint64_t>{}(num_) * 1000003u ^ std::hash<std::uint64_t>{}(den_);
    }

private:
    static std::uint64_t mul(std::uint64_t a, std::uint64_t b) {
        std::uint64_t r;
        if (__builtin_mul_overflow(a, b, &r))
            throw std::overflow_error("rate arithmetic overflow");
        return r;
    }
    static std::uint64_t add(std::uint64_t a, std::uint64_t b) {
        std::uint64_t r;
        if (__builtin_add_overflow(a, b, &r))
            throw std::overflow_error("rate arithmetic overflow");
        return r;
    }
    static Rate from_parts(std::uint64_t n, std::uint64_t d) {
        Rate r;
        r.num_ = n;
        r.den_ = d;
        r.normalize();
        return r;
    }
    void normalize() {
        if (num_ == 0) {
            den_ = 1;
            return;
        }
        const std::uint64_t g = std::gcd(num_, den_);
        num_ /= g;
        den_ /= g;
    }

    std::uint64_t num_ = 0;
    std::uint64_t den_ = 1;
};

inline bool Rate::parse(std::string_view text, Rate& out) {
    auto all_digits = [](std::string_view s) {
        if (s.empty())
            return false;
        for (char c : s)
            if (c < '0' || c > '9')
                return false;
        return true;
    };
    auto to_u64 = [](std::string_view s, std::uint64_t& v) {
        v = 0;
        for (char c : s) {
            if (__builtin_mul_overflow(v, 10u, &v) || __builtin_add_overflow(v, static_cast<std::uint64_t>(c - '0'), &v))
                return false;
        }
        return true;
    };
    try {
        if (auto slash = text.find('/'); slash != std::string_view::npos) {
            const auto n = text.substr(0, slash);
            const auto d = text.substr(slash + 1);
            std::uint64_t nv, dv;
            if (!all_digits(n) || !all_digits(d) || !to_u64(n, nv) || !to_u64(d, dv) || dv == 0)
                return false;
            out = Rate(nv, dv);
            return true;
        }
        if (auto dot = text.find('.'); dot != std::string_view::npos) {
            const auto whole = text.substr(0, dot);
            const auto frac = text.substr(dot + 1);
            if (!all_digits(whole) || !all_digits(frac) || frac.size() > 18)
                return false;
            std::uint64_t wv, fv, scale = 1;
            if (!to_u64(whole, wv) || !to_u64(frac, fv))
                return false;
            for (std::size_t i = 0; i < frac.size(); ++i)
                scale *= 10;
            out = Rate(wv) + Rate(fv, scale);
            return true;
        }
        std::uint64_t v;
        if (!all_digits(text) || !to_u64(text, v))
            return false;
        out = Rate(v);
        return true;
    } catch (const std::overflow_error&) {
        return false;
    }
}

inline std::ostream& operator<<(std::ostream& os, const Rate& r) { return os << r.to_string(); }

} // namespace markcalc

template <>
struct std::hash<markcalc::Rate> {
    std::size_t operator()(const markcalc::Rate& r) const noexcept { return r.hash(); }
};
