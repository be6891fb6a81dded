#include "ordinary/surfaces.hpp"

#include <cctype>
#include <charconv>
#include <sstream>

#include "ordinary/errors.hpp"

namespace ordinary {

namespace {

// Fraction-free Gaussian elimination (Bareiss); exact over the integers.
BigInt bareiss_determinant(std::vector<std::vector<BigInt>> m) {
    const std::size_t n = m.size();
    BigInt sign = 1;
    BigInt prev = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (m[k][k] == 0) {
            std::size_t swap = k + 1;
            while (swap < n && m[swap][k] == 0) ++swap;
            if (swap == n) return 0;
            std::swap(m[k], m[swap]);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            for (std::size_t j = k + 1; j < n; ++j) {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
        }
        prev = m[k][k];
    }
    return sign * m[n - 1][n - 1];
}

// Sylvester resultant of a (degree da) and b (degree db), coefficients low to high.
BigInt resultant(const std::vector<BigInt>& a, const std::vector<BigInt>& b) {
    const std::size_t da = a.size() - 1;
    const std::size_t db = b.size() - 1;
    const std::size_t n = da + db;
    std::vector<std::vector<BigInt>> s(n, std::vector<BigInt>(n, 0));
    for (std::size_t row = 0; row < db; ++row) {
        for (std::size_t k = 0; k <= da; ++k) s[row][row + k] = a[da - k];
    }
    for (std::size_t row = 0; row < da; ++row) {
        for (std::size_t k = 0; k <= db; ++k) s[db + row][row + k] = b[db - k];
    }
    return bareiss_determinant(std::move(s));
}

std::string strip_whitespace(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        if (!std::isspace(static_cast<unsigned char>(c))) out.push_back(c);
    }
    return out;
}

i64 parse_integer(std::string_view token) {
    i64 value = 0;
    if (token.empty()) throw ParseError("empty integer", std::string(token));
    const char* begin = token.data();
    const char* end = token.data() + token.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec == std::errc::result_out_of_range) throw ParseError("integer out of range", std::string(token));
    if (ec != std::errc() || ptr != end) throw ParseError("malformed integer", std::string(token));
    return value;
}

// Parses "[i,j,...]" starting at text; returns the integers.
std::vector<i64> parse_list(std::string_view text) {
    if (text.size() < 2 || text.front() != '[' || text.back() != ']') {
        throw ParseError("expected a bracketed integer list", std::string(text));
    }
    std::vector<i64> values;
    std::string_view body = text.substr(1, text.size() - 2);
    if (body.empty()) return values;
    std::size_t start = 0;
    while (true) {
        std::size_t comma = body.find(',', start);
        values.push_back(parse_integer(body.substr(start, comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return values;
}

std::string join(const std::vector<i64>& values) {
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) os << ',';
        os << values[i];
    }
    os << ']';
    return os.str();
}

bool divides(u64 p, const BigInt& n) { return n % p == 0; }

}  // namespace

std::string_view to_string(ReductionStatus s) noexcept {
    switch (s) {
        case ReductionStatus::Good: return "GOOD";
        case ReductionStatus::BadDisc: return "BAD_DISC";
        case ReductionStatus::BadModel: return "BAD_MODEL";
        case ReductionStatus::Excluded: return "EXCLUDED";
    }
    return "?";
}

BigInt EllipticCurve::discriminant() const {
    BigInt A = a;
    BigInt B = b;
    return -4 * A * A * A - 27 * B * B;
}

BigInt polynomial_discriminant(const std::vector<i64>& coeffs) {
    const std::size_t d = coeffs.size() - 1;
    std::vector<BigInt> f(coeffs.begin(), coeffs.end());
    std::vector<BigInt> df(d);
    for (std::size_t i = 1; i <= d; ++i) df[i - 1] = f[i] * static_cast<long long>(i);
    BigInt res = resultant(f, df);
    if ((d * (d - 1) / 2) % 2 == 1) res = -res;
    return res / f[d];
}

SurfaceModel::SurfaceModel(Genus2Curve curve) {
    const int deg = curve.degree();
    if (deg != 5 && deg != 6) {
        throw ParseError("genus-2 model needs degree 5 or 6, got " + std::to_string(deg), join(curve.coeffs));
    }
    if (curve.leading() == 0) throw ParseError("leading coefficient is zero", join(curve.coeffs));
    discriminant_ = polynomial_discriminant(curve.coeffs);
    if (discriminant_ == 0) throw ParseError("f is not squarefree (zero discriminant)", join(curve.coeffs));
    data_ = std::move(curve);
}

SurfaceModel::SurfaceModel(EllipticProduct product) {
    for (const EllipticCurve* e : {&product.first, &product.second}) {
        if (e->discriminant() == 0) throw ParseError("singular elliptic factor", join({e->a, e->b}));
    }
    discriminant_ = product.first.discriminant() * product.second.discriminant();
    data_ = std::move(product);
}

const std::string& SurfaceModel::label() const noexcept {
    return std::visit([](const auto& m) -> const std::string& { return m.label; }, data_);
}

i64 SurfaceModel::leading_coefficient() const noexcept {
    return is_genus2() ? genus2().leading() : 1;
}

BigInt discriminant(const SurfaceModel& model) { return model.discriminant(); }

ReductionStatus reduction_status(const SurfaceModel& model, u64 p) {
    if (p == 2) return ReductionStatus::Excluded;
    if (reduce(model.leading_coefficient(), p) == 0) return ReductionStatus::BadModel;
    if (divides(p, model.discriminant())) return ReductionStatus::BadDisc;
    return ReductionStatus::Good;
}

SurfaceModel parse_surface(std::string_view raw) {
    const std::string text = strip_whitespace(raw);
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw ParseError("missing kind prefix", text);
    const std::string kind = text.substr(0, colon);
    const std::string_view rest = std::string_view(text).substr(colon + 1);

    if (kind == "genus2") {
        Genus2Curve curve{parse_list(rest), {}};
        curve.label = "genus2:" + join(curve.coeffs);
        return SurfaceModel(std::move(curve));
    }
    if (kind == "product") {
        const auto semi = rest.find(';');
        if (semi == std::string_view::npos) throw ParseError("product needs two factors separated by ';'", std::string(rest));
        EllipticCurve factors[2];
        std::string_view parts[2] = {rest.substr(0, semi), rest.substr(semi + 1)};
        for (int i = 0; i < 2; ++i) {
            auto ab = parse_list(parts[i]);
            if (ab.size() != 2) throw ParseError("elliptic factor needs exactly [a,b]", std::string(parts[i]));
            factors[i] = {ab[0], ab[1]};
        }
        EllipticProduct product{factors[0], factors[1], {}};
        product.label = "product:" + join({factors[0].a, factors[0].b}) + ";" + join({factors[1].a, factors[1].b});
        return SurfaceModel(std::move(product));
    }
    throw ParseError("unknown surface kind", kind);
}

std::string serialize(const SurfaceModel& model) {
    if (model.is_genus2()) return "genus2:" + join(model.genus2().coeffs);
    const auto& pr = model.product();
    return "product:" + join({pr.first.a, pr.first.b}) + ";" + join({pr.second.a, pr.second.b});
}

}  // namespace ordinary
