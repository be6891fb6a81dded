#include "ordinary/cyclotomic.hpp"

#include <cctype>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include "ordinary/errors.hpp"

namespace ordinary {

namespace {

using Poly = std::vector<Rational>;

void trim(Poly& p) {
    while (!p.empty() && p.back() == 0) p.pop_back();
}

// Remainder of a by monic b.
Poly poly_mod(Poly a, const Poly& b) {
    trim(a);
    const std::size_t db = b.size() - 1;
    while (a.size() > db) {
        const Rational lead = a.back();
        const std::size_t shift = a.size() - 1 - db;
        for (std::size_t i = 0; i <= db; ++i) a[shift + i] -= lead * b[i];
        a.pop_back();
        trim(a);
    }
    return a;
}

// Quotient of a by monic b, assuming exact division.
Poly poly_div(Poly a, const Poly& b) {
    trim(a);
    const std::size_t db = b.size() - 1;
    if (a.size() <= db) return {};
    Poly q(a.size() - db, 0);
    while (a.size() > db) {
        const Rational lead = a.back();
        const std::size_t shift = a.size() - 1 - db;
        q[shift] = lead;
        for (std::size_t i = 0; i <= db; ++i) a[shift + i] -= lead * b[i];
        a.pop_back();
    }
    return q;
}

}  // namespace

std::vector<Rational> cyclotomic_polynomial(int n) {
    static std::mutex mutex;
    static std::map<int, Poly> cache;
    {
        std::lock_guard lock(mutex);
        if (auto it = cache.find(n); it != cache.end()) return it->second;
    }
    // x^n - 1 = prod_{d | n} Phi_d
    Poly p(static_cast<std::size_t>(n) + 1, 0);
    p[0] = -1;
    p[n] = 1;
    for (int d = 1; d < n; ++d) {
        if (n % d == 0) p = poly_div(p, cyclotomic_polynomial(d));
    }
    std::lock_guard lock(mutex);
    cache[n] = p;
    return p;
}

Cyclotomic::Cyclotomic(int order) : order_(order), coeffs_(static_cast<std::size_t>(order), 0) {
    if (order < 1) throw std::invalid_argument("root of unity order must be positive");
}

Cyclotomic::Cyclotomic(int order, const Rational& value) : Cyclotomic(order) { coeffs_[0] = value; }

Cyclotomic Cyclotomic::monomial(int order, long k, const Rational& coef) {
    Cyclotomic c(order);
    long r = k % order;
    if (r < 0) r += order;
    c.coeffs_[static_cast<std::size_t>(r)] = coef;
    return c;
}

Cyclotomic Cyclotomic::operator+(const Cyclotomic& o) const {
    if (o.order_ != order_) throw std::invalid_argument("mixed root-of-unity orders");
    Cyclotomic r = *this;
    for (std::size_t i = 0; i < coeffs_.size(); ++i) r.coeffs_[i] += o.coeffs_[i];
    return r;
}

Cyclotomic Cyclotomic::operator-() const {
    Cyclotomic r = *this;
    for (auto& c : r.coeffs_) c = -c;
    return r;
}

Cyclotomic Cyclotomic::operator-(const Cyclotomic& o) const { return *this + (-o); }

Cyclotomic Cyclotomic::operator*(const Cyclotomic& o) const {
    if (o.order_ != order_) throw std::invalid_argument("mixed root-of-unity orders");
    Cyclotomic r(order_);
    const std::size_t n = coeffs_.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (coeffs_[i] == 0) continue;
        for (std::size_t j = 0; j < n; ++j) {
            if (o.coeffs_[j] == 0) continue;
            r.coeffs_[(i + j) % n] += coeffs_[i] * o.coeffs_[j];
        }
    }
    return r;
}

std::vector<Rational> Cyclotomic::reduced() const { return poly_mod(coeffs_, cyclotomic_polynomial(order_)); }

bool Cyclotomic::is_zero() const { return reduced().empty(); }

std::optional<Rational> Cyclotomic::as_rational() const {
    auto r = reduced();
    if (r.empty()) return Rational(0);
    if (r.size() == 1) return r[0];
    return std::nullopt;
}

std::complex<double> Cyclotomic::to_complex() const {
    std::complex<double> acc = 0.0;
    for (std::size_t k = 0; k < coeffs_.size(); ++k) {
        if (coeffs_[k] == 0) continue;
        const double angle = 2.0 * std::numbers::pi * static_cast<double>(k) / order_;
        acc += static_cast<double>(coeffs_[k]) * std::polar(1.0, angle);
    }
    return acc;
}

std::string format_rational(const Rational& q) {
    const auto num = boost::multiprecision::numerator(q);
    const auto den = boost::multiprecision::denominator(q);
    if (den == 1) return num.str();
    return num.str() + "/" + den.str();
}

std::string format_cyclotomic(const Cyclotomic& value) {
    std::string out;
    for (std::size_t k = 0; k < value.coeffs().size(); ++k) {
        const Rational& c = value.coeffs()[k];
        if (c == 0) continue;
        std::string term = format_rational(c);
        if (k != 0) term += "*z^" + std::to_string(k);
        if (!out.empty() && c > 0) out += '+';
        out += term;
    }
    return out.empty() ? "0" : out;
}

Cyclotomic parse_cyclotomic(std::string_view raw, int order) {
    std::string text;
    for (char c : raw) {
        if (!std::isspace(static_cast<unsigned char>(c))) text.push_back(c);
    }
    if (text.empty()) throw ParseError("empty matrix entry", std::string(raw));

    Cyclotomic result(order);
    std::size_t i = 0;
    auto digits = [&](std::size_t& pos) {
        const std::size_t start = pos;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
        if (pos == start) throw ParseError("expected digits", text.substr(start));
        return text.substr(start, pos - start);
    };
    bool first = true;
    while (i < text.size()) {
        const std::size_t term_start = i;
        bool negative = false;
        if (text[i] == '+' || text[i] == '-') {
            negative = text[i] == '-';
            ++i;
        } else if (!first) {
            throw ParseError("expected '+' or '-' between terms", text.substr(i));
        }
        // allow "+-q" written by hand
        if (i < text.size() && text[i] == '-' && text[i - 1] == '+') {
            negative = true;
            ++i;
        }
        Rational q{boost::multiprecision::cpp_int(digits(i))};
        if (i < text.size() && text[i] == '/') {
            ++i;
            boost::multiprecision::cpp_int den(digits(i));
            if (den == 0) throw ParseError("zero denominator", text.substr(term_start, i - term_start));
            q /= den;
        }
        long k = 0;
        if (i < text.size() && text[i] == '*') {
            if (text.compare(i, 3, "*z^") != 0) throw ParseError("expected '*z^<k>'", text.substr(i));
            i += 3;
            const std::string exponent = digits(i);
            if (exponent.size() > 9) throw ParseError("exponent too large", exponent);
            k = std::stol(exponent);
        }
        if (negative) q = -q;
        result += Cyclotomic::monomial(order, k, q);
        first = false;
    }
    return result;
}

}  // namespace ordinary
