#pragma once

#include <compare>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

#include "engel/bigint.hpp"

namespace engel {

// Exact rational in canonical form: gcd(|num|, den) = 1, den > 0, and zero is
// always 0/1. Values are immutable once constructed.
class Rational {
public:
    Rational() : num_(0), den_(1) {}
    Rational(const BigInt& n) : num_(n), den_(1) {}  // NOLINT: implicit by design
    Rational(long n) : num_(n), den_(1) {}           // NOLINT
    Rational(int n) : num_(n), den_(1) {}            // NOLINT

    Rational(BigInt num, BigInt den) : num_(std::move(num)), den_(std::move(den)) {
        if (sgn(den_) == 0) throw std::invalid_argument("Rational: zero denominator");
        normalize();
    }

    const BigInt& num() const { return num_; }
    const BigInt& den() const { return den_; }

    bool is_zero() const { return sgn(num_) == 0; }
    bool is_integer() const { return den_ == 1; }
    int sign() const { return sgn(num_); }

    Rational operator-() const { return Rational(Canonical{}, -num_, den_); }

    Rational abs() const {
        return sign() < 0 ? Rational(Canonical{}, -num_, den_) : *this;
    }

    friend Rational operator+(const Rational& a, const Rational& b) {
        return Rational(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
    }
    friend Rational operator-(const Rational& a, const Rational& b) {
        return Rational(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
    }
    friend Rational operator*(const Rational& a, const Rational& b) {
        return Rational(a.num_ * b.num_, a.den_ * b.den_);
    }
    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.is_zero()) throw std::domain_error("Rational: division by zero");
        return Rational(a.num_ * b.den_, a.den_ * b.num_);
    }

    Rational& operator+=(const Rational& o) { return *this = *this + o; }
    Rational& operator-=(const Rational& o) { return *this = *this - o; }
    Rational& operator*=(const Rational& o) { return *this = *this * o; }
    Rational& operator/=(const Rational& o) { return *this = *this / o; }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
        // Denominators are positive, so cross-multiplication preserves order.
        const int c = cmp(a.num_ * b.den_, b.num_ * a.den_);
        if (c < 0) return std::strong_ordering::less;
        if (c > 0) return std::strong_ordering::greater;
        return std::strong_ordering::equal;
    }

    // "num/den", with the denominator omitted when it is 1 ("9/7", "3").
    std::string str() const {
        if (den_ == 1) return num_.get_str();
        return num_.get_str() + "/" + den_.get_str();
    }

    // Display-only approximation; no computation path consumes this.
    double to_double() const {
        mpq_class q(num_, den_);
        return q.get_d();
    }

    friend std::ostream& operator<<(std::ostream& os, const Rational& r) {
        return os << r.str();
    }

private:
    struct Canonical {};  // tag: inputs already satisfy the invariants
    Rational(Canonical, BigInt num, BigInt den) : num_(std::move(num)), den_(std::move(den)) {}

    void normalize() {
        if (sgn(den_) < 0) {
            num_ = -num_;
            den_ = -den_;
        }
        if (sgn(num_) == 0) {
            den_ = 1;
            return;
        }
        BigInt g = engel::gcd(num_ < 0 ? BigInt(-num_) : num_, den_);
        if (g != 1) {
            num_ /= g;
            den_ /= g;
        }
    }

    BigInt num_;
    BigInt den_;
};

// Parses "p/q" or a bare integer ("3/7", "-1/3", "42"). Strict: no
// whitespace, no locale dependence.
inline Rational parse_rational(std::string_view text) {
    const std::size_t slash = text.find('/');
    if (slash == std::string_view::npos) return Rational(parse_bigint(text));
    if (text.find('/', slash + 1) != std::string_view::npos)
        throw std::invalid_argument("bad rational literal: '" + std::string(text) + "'");
    return Rational(parse_bigint(text.substr(0, slash)), parse_bigint(text.substr(slash + 1)));
}

}  // namespace engel
