#pragma once

// Per-prime Frobenius data for the surfaces of surfaces.hpp: point counts,
// the coefficients a1, a2 of x^4 - a1 x^3 + a2 x^2 - p a1 x + p^2, the
// Cartier-Manin (Hasse-Witt) matrix, and the ordinariness verdict.

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "ordinary/arith.hpp"
#include "ordinary/surfaces.hpp"

namespace ordinary {

struct FrobeniusConfig {
    u64 naive_max_fp2 = 499;    // O(p^2) count over F_{p^2}
    u64 naive_max_fp = 20000;   // O(p) count over F_p, genus-2 only
    bool check_roots = true;    // root-modulus audit whenever a1 and a2 are both known
};

struct FrobeniusRecord {
    u64 p = 0;
    ReductionStatus status = ReductionStatus::Good;
    std::optional<i64> n1;
    std::optional<i64> n2;
    std::optional<i64> a1;
    std::optional<i64> a2;
    std::optional<u64> a2_mod_p;
    std::optional<u64> hw_trace;
    std::optional<u64> hw_det;
    std::optional<u64> shift;
    std::optional<i64> ap1;  // traces of Frobenius of the elliptic factors
    std::optional<i64> ap2;
    std::optional<bool> ordinary;
    bool roots_checked = false;

    friend bool operator==(const FrobeniusRecord&, const FrobeniusRecord&) = default;
};

/// A[i][j] = coefficient of x^(i p - j) in f^((p-1)/2), i, j in {1, 2}.
struct HasseWittMatrix {
    std::array<std::array<u64, 2>, 2> entries{};
    u64 p = 0;

    u64 trace() const noexcept { return add_mod(entries[0][0], entries[1][1], p); }
    u64 det() const noexcept {
        return sub_mod(mul_mod(entries[0][0], entries[1][1], p), mul_mod(entries[0][1], entries[1][0], p), p);
    }
};

struct CartierManinResult {
    HasseWittMatrix matrix;
    u64 shift = 0;  // f was replaced by f(x + shift) before the recurrence
};

/// Sum over x in F_p of the Legendre symbol of f(x). `squares` is square_table(p).
i64 character_sum_fp(std::span<const i64> f, u64 p, std::span<const std::uint8_t> squares);

/// #C(F_p) for y^2 = f(x), including the points at infinity of the smooth model.
/// Refuses unless the model has good reduction at p.
i64 naive_count_fp(const Genus2Curve& curve, Prime p);

/// #C(F_{p^2}). Refuses above naive_max (default 499): the cost is O(p^2).
i64 naive_count_fp2(const Genus2Curve& curve, Prime p, u64 naive_max = 499);

/// Trace of Frobenius of y^2 = x^3 + a x + b at p.
i64 elliptic_trace(const EllipticCurve& e, Prime p, std::span<const std::uint8_t> squares);

struct CharPoly {
    i64 a1 = 0;
    i64 a2 = 0;
    friend bool operator==(const CharPoly&, const CharPoly&) = default;
};

/// Inverts N_k = p^k + 1 - s_k through the power sums s1 = a1, s2 = a1^2 - 2 a2.
/// Throws IntegrityError on odd parity or a Weil-bound violation.
CharPoly char_poly_from_counts(Prime p, i64 n1, i64 n2);

/// (x^2 - b1 x + p)(x^2 - b2 x + p).
CharPoly product_char_poly(i64 b1, i64 b2, Prime p);

/// |a1| <= 4 sqrt(p) and -6p <= a2 <= 6p, in exact integer arithmetic.
bool within_weil_bounds(i64 a1, i64 a2, u64 p) noexcept;

/// Every complex root of x^4 - a1 x^3 + a2 x^2 - p a1 x + p^2 has modulus
/// within rel_tol * sqrt(p) of sqrt(p). Companion-matrix eigenvalues.
bool roots_on_weil_circle(i64 a1, i64 a2, u64 p, double rel_tol = 1e-6);

/// Cartier-Manin matrix in O(p deg f) from the recurrence f h' = m f' h,
/// run upward from the constant term for the low coefficients and downward
/// from the leading term for the high ones.
CartierManinResult cartier_manin(std::span<const i64> f, Prime p);

/// Coefficients H_0..H_count-1 of g^m mod p by the recurrence; needs
/// g[0] != 0 mod p and count <= p.
std::vector<u64> power_coefficients(std::span<const u64> g, u64 m, u64 count, Prime p);

/// Full per-prime analysis. Non-GOOD primes return a record with only p and status.
FrobeniusRecord ordinary_test(const SurfaceModel& model, Prime p, const FrobeniusConfig& config = {});

}  // namespace ordinary
