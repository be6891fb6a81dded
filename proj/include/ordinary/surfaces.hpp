#pragma once

// Abelian surfaces over Q in the two shapes the engine can count: Jacobians of
// y^2 = f(x) with deg f in {5, 6}, and products of two short-Weierstrass
// elliptic curves.

#include <boost/multiprecision/cpp_int.hpp>

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ordinary/arith.hpp"

namespace ordinary {

using BigInt = boost::multiprecision::cpp_int;

struct Genus2Curve {
    std::vector<i64> coeffs;  // f0, f1, ..., fd (constant term first)
    std::string label;

    int degree() const noexcept { return static_cast<int>(coeffs.size()) - 1; }
    i64 leading() const noexcept { return coeffs.back(); }
};

/// y^2 = x^3 + a x + b
struct EllipticCurve {
    i64 a = 0;
    i64 b = 0;

    /// -4a^3 - 27b^2
    BigInt discriminant() const;
    friend bool operator==(const EllipticCurve&, const EllipticCurve&) = default;
};

struct EllipticProduct {
    EllipticCurve first;
    EllipticCurve second;
    std::string label;
};

enum class ReductionStatus { Good, BadDisc, BadModel, Excluded };

std::string_view to_string(ReductionStatus s) noexcept;

/// A validated surface. Construction rejects zero discriminants and bad degrees.
class SurfaceModel {
public:
    explicit SurfaceModel(Genus2Curve curve);
    explicit SurfaceModel(EllipticProduct product);

    bool is_genus2() const noexcept { return std::holds_alternative<Genus2Curve>(data_); }
    const Genus2Curve& genus2() const { return std::get<Genus2Curve>(data_); }
    const EllipticProduct& product() const { return std::get<EllipticProduct>(data_); }

    const std::string& label() const noexcept;

    /// Genus 2: disc(f) = (-1)^(d(d-1)/2) Res(f, f') / lc(f).
    /// Product: the product of the two factors' -4a^3 - 27b^2.
    const BigInt& discriminant() const noexcept { return discriminant_; }

    /// Leading coefficient of f, or 1 for products.
    i64 leading_coefficient() const noexcept;

private:
    std::variant<Genus2Curve, EllipticProduct> data_;
    BigInt discriminant_;
};

/// Polynomial discriminant with the normalization documented on SurfaceModel.
BigInt polynomial_discriminant(const std::vector<i64>& coeffs);

BigInt discriminant(const SurfaceModel& model);

/// Priority EXCLUDED > BAD_MODEL > BAD_DISC > GOOD.
ReductionStatus reduction_status(const SurfaceModel& model, u64 p);

/// Grammar: `genus2:[f0,...,fd]` (d in {5,6}) or `product:[a1,b1];[a2,b2]`.
/// Whitespace is ignored. Throws ParseError naming the offending token.
SurfaceModel parse_surface(std::string_view text);

/// Canonical text form accepted by parse_surface.
std::string serialize(const SurfaceModel& model);

}  // namespace ordinary
