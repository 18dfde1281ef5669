// polynomial.cpp - exact integer polynomial arithmetic.
#include "dlyap/polynomial.hpp"

#include "dlyap/error.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

namespace dlyap {

BigInt binomial(long n, long k) {
    if (k < 0 || n < 0 || k > n) return 0;
    k = std::min(k, n - k);
    BigInt r = 1;
    for (long i = 1; i <= k; ++i) {
        r *= (n - k + i);
        r /= i;
    }
    return r;
}

IntPoly::IntPoly(std::vector<BigInt> coefficients) : c_(std::move(coefficients)) { trim(); }

IntPoly IntPoly::constant(const BigInt& c) { return IntPoly(std::vector<BigInt>{c}); }

IntPoly IntPoly::monomial(const BigInt& c, int k) {
    if (k < 0) throw InvalidArgument("negative monomial degree");
    std::vector<BigInt> v(static_cast<std::size_t>(k) + 1, 0);
    v.back() = c;
    return IntPoly(std::move(v));
}

void IntPoly::trim() {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

BigInt IntPoly::coefficient(int k) const {
    if (k < 0 || k >= static_cast<int>(c_.size())) return 0;
    return c_[static_cast<std::size_t>(k)];
}

IntPoly IntPoly::operator+(const IntPoly& o) const {
    std::vector<BigInt> v(std::max(c_.size(), o.c_.size()), 0);
    for (std::size_t k = 0; k < c_.size(); ++k) v[k] += c_[k];
    for (std::size_t k = 0; k < o.c_.size(); ++k) v[k] += o.c_[k];
    return IntPoly(std::move(v));
}

IntPoly IntPoly::operator-(const IntPoly& o) const { return *this + o * BigInt(-1); }

IntPoly IntPoly::operator*(const IntPoly& o) const {
    if (is_zero() || o.is_zero()) return IntPoly();
    std::vector<BigInt> v(c_.size() + o.c_.size() - 1, 0);
    for (std::size_t a = 0; a < c_.size(); ++a)
        for (std::size_t b = 0; b < o.c_.size(); ++b) v[a + b] += c_[a] * o.c_[b];
    return IntPoly(std::move(v));
}

IntPoly IntPoly::operator*(const BigInt& s) const {
    std::vector<BigInt> v = c_;
    for (BigInt& x : v) x *= s;
    return IntPoly(std::move(v));
}

double IntPoly::evaluate(double u) const {
    double r = 0.0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) r = r * u + it->convert_to<double>();
    return r;
}

Rational IntPoly::evaluate(const Rational& u) const {
    Rational r = 0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) r = r * u + Rational(*it);
    return r;
}

std::vector<double> IntPoly::to_doubles() const {
    std::vector<double> out;
    out.reserve(c_.size());
    const BigInt limit = BigInt(1) << 53;
    for (const BigInt& x : c_) {
        if (abs(x) > limit) throw InvalidArgument("coefficient exceeds double precision");
        out.push_back(x.convert_to<double>());
    }
    return out;
}

std::string IntPoly::to_string(const std::string& var) const {
    if (c_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (std::size_t k = 0; k < c_.size(); ++k) {
        if (c_[k] == 0) continue;
        BigInt mag = abs(c_[k]);
        if (!first) os << (c_[k] < 0 ? " - " : " + ");
        else if (c_[k] < 0) os << "-";
        first = false;
        if (k == 0 || mag != 1) os << mag;
        if (k >= 1) os << var;
        if (k >= 2) os << "^" << k;
    }
    return os.str();
}

} // namespace dlyap
