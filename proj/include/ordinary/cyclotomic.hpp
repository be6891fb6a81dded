#pragma once

// Exact elements of Q(z), z = exp(2 pi i / n), stored as sum_k c_k z^k with
// k in [0, n). The stored form is what the catalog text says; zero tests and
// equality of values reduce modulo the n-th cyclotomic polynomial.

#include <boost/multiprecision/cpp_int.hpp>

#include <complex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ordinary {

using Rational = boost::multiprecision::cpp_rational;

class Cyclotomic {
public:
    explicit Cyclotomic(int order = 1);
    Cyclotomic(int order, const Rational& value);

    /// coef * z^k
    static Cyclotomic monomial(int order, long k, const Rational& coef = 1);

    int order() const noexcept { return order_; }
    const std::vector<Rational>& coeffs() const noexcept { return coeffs_; }

    Cyclotomic operator+(const Cyclotomic& o) const;
    Cyclotomic operator-(const Cyclotomic& o) const;
    Cyclotomic operator*(const Cyclotomic& o) const;
    Cyclotomic operator-() const;
    Cyclotomic& operator+=(const Cyclotomic& o) { return *this = *this + o; }

    /// Remainder modulo the cyclotomic polynomial, degree < phi(n).
    std::vector<Rational> reduced() const;

    bool is_zero() const;

    /// The rational value, when the element lies in Q.
    std::optional<Rational> as_rational() const;

    std::complex<double> to_complex() const;

    /// Same stored representation (not merely the same value).
    friend bool operator==(const Cyclotomic& a, const Cyclotomic& b) {
        return a.order_ == b.order_ && a.coeffs_ == b.coeffs_;
    }

private:
    int order_;
    std::vector<Rational> coeffs_;
};

/// Integer coefficients of the n-th cyclotomic polynomial, low degree first.
std::vector<Rational> cyclotomic_polynomial(int n);

/// Grammar: term (('+' | '-') term)*, term = ['-'] rational ['*z^' k],
/// rational = digits ['/' digits]. Whitespace is ignored.
Cyclotomic parse_cyclotomic(std::string_view text, int order);

/// Canonical text: terms by ascending exponent, "0" for the zero element.
std::string format_cyclotomic(const Cyclotomic& value);

std::string format_rational(const Rational& q);

}  // namespace ordinary
