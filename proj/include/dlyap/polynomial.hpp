// polynomial.hpp - univariate polynomials with arbitrary-precision integer coefficients.
#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>
#include <vector>

namespace dlyap {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Binomial coefficient; zero when k < 0 or k > n.
BigInt binomial(long n, long k);

/// Polynomial c₀ + c₁u + c₂u² + ... with exact integer coefficients.
class IntPoly {
public:
    IntPoly() = default;
    explicit IntPoly(std::vector<BigInt> coefficients);
    static IntPoly constant(const BigInt& c);
    /// The monomial c·u^k.
    static IntPoly monomial(const BigInt& c, int k);

    /// Coefficients with trailing zeros removed; the zero polynomial is empty.
    const std::vector<BigInt>& coefficients() const noexcept { return c_; }
    /// Coefficient of u^k, zero beyond the degree.
    BigInt coefficient(int k) const;
    /// Degree; -1 for the zero polynomial.
    int degree() const noexcept { return static_cast<int>(c_.size()) - 1; }
    bool is_zero() const noexcept { return c_.empty(); }

    IntPoly operator+(const IntPoly& o) const;
    IntPoly operator-(const IntPoly& o) const;
    IntPoly operator*(const IntPoly& o) const;
    IntPoly operator*(const BigInt& s) const;
    bool operator==(const IntPoly& o) const { return c_ == o.c_; }
    bool operator!=(const IntPoly& o) const { return !(*this == o); }

    double evaluate(double u) const;
    Rational evaluate(const Rational& u) const;
    /// Coefficients as doubles; throws InvalidArgument if one does not fit.
    std::vector<double> to_doubles() const;
    /// Coefficients as a string such as "3 + 6u + u^2" with the given variable name.
    std::string to_string(const std::string& var = "u") const;

private:
    void trim();
    std::vector<BigInt> c_;
};

} // namespace dlyap
