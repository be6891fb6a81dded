#include "ordinary/frobenius.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <complex>

#include "ordinary/errors.hpp"

namespace ordinary {

namespace {

u64 eval_mod(std::span<const u64> f, u64 x, u64 p) {
    u64 acc = 0;
    for (std::size_t i = f.size(); i-- > 0;) acc = add_mod(mul_mod(acc, x, p), f[i], p);
    return acc;
}

std::vector<u64> reduce_all(std::span<const i64> f, u64 p) {
    std::vector<u64> out(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) out[i] = reduce(f[i], p);
    return out;
}

// f(x + c) mod p by synthetic division (Taylor shift).
std::vector<u64> taylor_shift(std::vector<u64> f, u64 c, u64 p) {
    const std::size_t n = f.size();
    for (std::size_t i = 0; i + 1 < n; ++i) {
        for (std::size_t j = n - 1; j-- > i;) f[j] = add_mod(f[j], mul_mod(c, f[j + 1], p), p);
    }
    return f;
}

// Forward-difference walk of f(0), f(1), ..., f(p-1); calls visit(value) for each.
template <class Visit>
void walk_values(std::span<const u64> f, u64 p, Visit&& visit) {
    const std::size_t d = f.size() - 1;
    std::array<u64, 8> diff{};
    for (std::size_t i = 0; i <= d; ++i) diff[i] = eval_mod(f, i % p, p);
    for (std::size_t k = 1; k <= d; ++k) {
        for (std::size_t i = d; i >= k; --i) diff[i] = sub_mod(diff[i], diff[i - 1], p);
    }
    for (u64 x = 0; x < p; ++x) {
        visit(diff[0]);
        for (std::size_t i = 0; i < d; ++i) diff[i] = add_mod(diff[i], diff[i + 1], p);
    }
}

void require_good(const SurfaceModel& model, u64 p, const char* what) {
    auto status = reduction_status(model, p);
    if (status != ReductionStatus::Good) {
        throw RefusedError(std::string(what) + " needs good reduction; p = " + std::to_string(p) + " is " +
                           std::string(to_string(status)));
    }
}

// Modular inverses of 1..n-1 modulo p, n <= p.
std::vector<u64> inverse_table(u64 n, u64 p) {
    std::vector<u64> inv(std::max<u64>(n, 2));
    inv[1] = 1;
    if (p <= 0xffffffffu) {
        // 32-bit division is several times cheaper than 64-bit
        const auto p32 = static_cast<std::uint32_t>(p);
        const Barrett bar(p);
        for (std::uint32_t i = 2; i < n; ++i) inv[i] = bar.reduce(u64{p32 - p32 / i} * inv[p32 % i]);
        return inv;
    }
    for (u64 i = 2; i < n; ++i) inv[i] = mul_mod(p - p / i, inv[p % i], p);
    return inv;
}

// One run of g0 (k+1) H_{k+1} = sum_{j>=1} ((m+1) j - 1 - k) g_j H_{k+1-j},
// with g0 divided out. weight[j] tracks ((m+1) j - 1 - k) g_j / g0 and drops
// by g_j / g0 each step.
struct PowerRun {
    std::vector<u64> weight;
    std::vector<u64> decrement;
    std::vector<u64> h;
};

PowerRun make_run(std::span<const u64> g, u64 m, u64 count, u64 p) {
    if (g.empty() || g[0] % p == 0) throw std::invalid_argument("power_coefficients needs g(0) != 0 mod p");
    if (count > p) throw std::invalid_argument("power_coefficients: count must not exceed p");
    PowerRun run;
    run.h.assign(count, 0);
    if (count > 0) run.h[0] = pow_mod(g[0] % p, m, p);
    const u64 g0_inv = inv_mod(g[0], p);
    const u64 mp1 = (m + 1) % p;
    run.weight.assign(g.size(), 0);
    run.decrement.assign(g.size(), 0);
    for (std::size_t j = 1; j < g.size(); ++j) {
        run.decrement[j] = mul_mod(g[j] % p, g0_inv, p);
        const u64 cj = sub_mod(mul_mod(mp1, j % p, p), 1, p);
        run.weight[j] = mul_mod(cj, run.decrement[j], p);
    }
    return run;
}

// Steps several independent runs in lockstep so their dependency chains overlap.
// Requires p < 2^29: up to six products below 2^58 then sum without overflow.
void advance_small(std::span<PowerRun* const> runs, std::span<const u64> inv, u64 p) {
    const Barrett bar(p);
    std::size_t longest = 0;
    for (const PowerRun* r : runs) longest = std::max(longest, r->h.size());
    for (u64 k = 0; k + 1 < longest; ++k) {
        for (PowerRun* r : runs) {
            if (k + 1 >= r->h.size()) continue;
            const std::size_t e = r->weight.size() - 1;
            const std::size_t jmax = std::min<std::size_t>(e, k + 1);
            const u64* h = r->h.data() + (k + 1);
            u64 sum = 0;
            for (std::size_t j = 1; j <= jmax; ++j) sum += r->weight[j] * *(h - j);
            for (std::size_t j = 1; j <= e; ++j) r->weight[j] = sub_mod(r->weight[j], r->decrement[j], p);
            r->h[k + 1] = bar.reduce(bar.reduce(sum) * inv[k + 1]);
        }
    }
}

void advance_wide(PowerRun& r, std::span<const u64> inv, u64 p) {
    const std::size_t e = r.weight.size() - 1;
    for (u64 k = 0; k + 1 < r.h.size(); ++k) {
        const std::size_t jmax = std::min<std::size_t>(e, k + 1);
        u64 sum = 0;
        for (std::size_t j = 1; j <= jmax; ++j) sum = add_mod(sum, mul_mod(r.weight[j], r.h[k + 1 - j], p), p);
        for (std::size_t j = 1; j <= e; ++j) r.weight[j] = sub_mod(r.weight[j], r.decrement[j], p);
        r.h[k + 1] = mul_mod(sum, inv[k + 1], p);
    }
}

void advance(std::span<PowerRun* const> runs, u64 p) {
    std::size_t longest = 0;
    for (const PowerRun* r : runs) longest = std::max(longest, r->h.size());
    const auto inv = inverse_table(longest, p);
    if (p < (u64{1} << 29)) {
        advance_small(runs, inv, p);
    } else {
        for (PowerRun* r : runs) advance_wide(*r, inv, p);
    }
}

}  // namespace

std::vector<u64> power_coefficients(std::span<const u64> g, u64 m, u64 count, Prime p) {
    PowerRun run = make_run(g, m, count, p);
    PowerRun* const runs[] = {&run};
    advance(runs, p);
    return std::move(run.h);
}

CartierManinResult cartier_manin(std::span<const i64> f_int, Prime p) {
    const std::size_t d = f_int.size() - 1;
    const u64 m = (p - 1) / 2;
    std::vector<u64> f = reduce_all(f_int, p);
    if (f[d] == 0) throw RefusedError("Cartier-Manin needs p not dividing the leading coefficient");

    CartierManinResult result;
    result.matrix.p = p;

    // Smallest c with f(c) != 0; shifting x leaves the curve's zeta function unchanged.
    u64 shift = 0;
    while (shift < p && eval_mod(f, shift, p) == 0) ++shift;
    std::size_t valuation = 0;
    if (shift == p) {
        // Every element of F_p is a root (only possible for p <= deg f): keep
        // f = x * g with g(0) != 0 and h = x^m g^m.
        shift = 0;
        valuation = 1;
        if (f[1] == 0) throw std::logic_error("squarefree f has a double root at 0");
    } else if (shift != 0) {
        f = taylor_shift(std::move(f), shift, p);
    }
    result.shift = shift;

    // Low coefficients x^(p-2), x^(p-1) come from the bottom of h; the high
    // ones x^(2p-2), x^(2p-1) from the top, through the reversed polynomial.
    const u64 low_offset = valuation * m;
    const std::vector<u64> g(f.begin() + static_cast<std::ptrdiff_t>(valuation), f.end());
    const u64 low_count = p - 1 >= low_offset ? p - low_offset : 0;

    const u64 top = m * d;
    const std::vector<u64> rev(f.rbegin(), f.rend());
    auto high_index = [&](u64 k) -> std::optional<u64> {
        if (k > top) return std::nullopt;
        return top - k;
    };
    u64 high_count = 0;
    for (u64 k : {2 * p - 1, 2 * p - 2}) {
        if (auto i = high_index(k)) high_count = std::max(high_count, *i + 1);
    }

    PowerRun low = make_run(g, m, low_count, p);
    PowerRun high = make_run(rev, m, high_count, p);
    PowerRun* const runs[] = {&low, &high};
    advance(runs, p);

    auto low_coef = [&](u64 k) -> u64 {
        if (k < low_offset) return 0;
        return k - low_offset < low.h.size() ? low.h[k - low_offset] : 0;
    };
    auto high_coef = [&](u64 k) -> u64 {
        auto i = high_index(k);
        return i ? high.h[*i] : 0;
    };

    result.matrix.entries[0][0] = low_coef(p - 1);
    result.matrix.entries[0][1] = low_coef(p - 2);
    result.matrix.entries[1][0] = high_coef(2 * p - 1);
    result.matrix.entries[1][1] = high_coef(2 * p - 2);
    return result;
}

i64 character_sum_fp(std::span<const i64> f_int, u64 p, std::span<const std::uint8_t> squares) {
    const std::vector<u64> f = reduce_all(f_int, p);
    i64 sum = 0;
    walk_values(f, p, [&](u64 v) {
        if (v != 0) sum += squares[v] ? 1 : -1;
    });
    return sum;
}

namespace {

i64 count_fp_unchecked(const Genus2Curve& curve, Prime p) {
    const auto squares = square_table(p);
    i64 n = static_cast<i64>(p.value()) + character_sum_fp(curve.coeffs, p, squares);
    if (curve.degree() == 5) {
        n += 1;
    } else {
        n += 1 + (squares[reduce(curve.leading(), p)] ? 1 : -1);
    }
    return n;
}

void refuse_above(u64 p, u64 naive_max) {
    if (p > naive_max) {
        throw RefusedError("F_p2 point count at p = " + std::to_string(p) + " costs O(p^2) = " +
                           std::to_string(p * p) + " evaluations; above naive_max = " +
                           std::to_string(naive_max));
    }
}

i64 count_fp2_unchecked(const Genus2Curve& curve, Prime p) {
    const Fp2Field field(p);
    const auto squares = square_table(p);
    const std::vector<u64> f = reduce_all(curve.coeffs, p);
    const std::size_t d = f.size() - 1;

    // chi_{p^2}(z) = chi_p(N(z)) since z^((p^2-1)/2) = (z^(p+1))^((p-1)/2).
    i64 sum = 0;
    for (u64 c1 = 0; c1 < p; ++c1) {
        // forward differences in c0 over F_{p^2} with c1 fixed
        std::array<Fp2Elem, 8> diff{};
        for (std::size_t i = 0; i <= d; ++i) {
            const Fp2Elem x{i % p, c1};
            Fp2Elem acc = field.zero();
            for (std::size_t k = d + 1; k-- > 0;) acc = field.add(field.mul(acc, x), Fp2Elem{f[k], 0});
            diff[i] = acc;
        }
        for (std::size_t k = 1; k <= d; ++k) {
            for (std::size_t i = d; i >= k; --i) diff[i] = field.sub(diff[i], diff[i - 1]);
        }
        for (u64 c0 = 0; c0 < p; ++c0) {
            const Fp2Elem v = diff[0];
            if (!(v == field.zero())) sum += squares[field.norm(v)] ? 1 : -1;
            for (std::size_t i = 0; i < d; ++i) diff[i] = field.add(diff[i], diff[i + 1]);
        }
    }
    const i64 q = static_cast<i64>(p.value() * p.value());
    // every element of F_p is a square in F_{p^2}: two points at infinity for degree 6
    return q + sum + (d == 5 ? 1 : 2);
}

}  // namespace

i64 naive_count_fp(const Genus2Curve& curve, Prime p) {
    require_good(SurfaceModel(curve), p, "naive_count_fp");
    return count_fp_unchecked(curve, p);
}

i64 naive_count_fp2(const Genus2Curve& curve, Prime p, u64 naive_max) {
    refuse_above(p, naive_max);
    require_good(SurfaceModel(curve), p, "naive_count_fp2");
    return count_fp2_unchecked(curve, p);
}

i64 elliptic_trace(const EllipticCurve& e, Prime p, std::span<const std::uint8_t> squares) {
    const std::array<i64, 4> f = {e.b, e.a, 0, 1};
    return -character_sum_fp(f, p, squares);
}

bool within_weil_bounds(i64 a1, i64 a2, u64 p) noexcept {
    const i64 pp = static_cast<i64>(p);
    const u128 a1sq = static_cast<u128>(static_cast<__int128>(a1) * a1);
    return a1sq <= static_cast<u128>(16) * p && a2 >= -6 * pp && a2 <= 6 * pp;
}

CharPoly char_poly_from_counts(Prime p, i64 n1, i64 n2) {
    const __int128 pp = p.value();
    const __int128 a1 = pp + 1 - n1;
    const __int128 twice_a2 = a1 * a1 - (pp * pp + 1 - n2);
    if (twice_a2 % 2 != 0) throw IntegrityError("point counts give odd a1^2 - s2 (inconsistent N1, N2)", p);
    const CharPoly cp{static_cast<i64>(a1), static_cast<i64>(twice_a2 / 2)};
    if (!within_weil_bounds(cp.a1, cp.a2, p)) {
        throw IntegrityError("Weil bound violated: a1 = " + std::to_string(cp.a1) + ", a2 = " + std::to_string(cp.a2), p);
    }
    return cp;
}

CharPoly product_char_poly(i64 b1, i64 b2, Prime p) {
    for (i64 b : {b1, b2}) {
        if (static_cast<u128>(static_cast<__int128>(b) * b) > static_cast<u128>(4) * p) {
            throw IntegrityError("elliptic trace " + std::to_string(b) + " exceeds 2 sqrt(p)", p);
        }
    }
    return {b1 + b2, b1 * b2 + 2 * static_cast<i64>(p.value())};
}

bool roots_on_weil_circle(i64 a1, i64 a2, u64 p, double rel_tol) {
    const double pd = static_cast<double>(p);
    // Monic companion matrix of x^4 + c3 x^3 + c2 x^2 + c1 x + c0.
    const double c3 = -static_cast<double>(a1);
    const double c2 = static_cast<double>(a2);
    const double c1 = -pd * static_cast<double>(a1);
    const double c0 = pd * pd;
    Eigen::Matrix4d companion = Eigen::Matrix4d::Zero();
    companion(1, 0) = companion(2, 1) = companion(3, 2) = 1.0;
    companion(0, 3) = -c0;
    companion(1, 3) = -c1;
    companion(2, 3) = -c2;
    companion(3, 3) = -c3;
    Eigen::EigenSolver<Eigen::Matrix4d> solver(companion, false);
    if (solver.info() != Eigen::Success) return false;
    const double r = std::sqrt(pd);
    for (const std::complex<double>& root : solver.eigenvalues()) {
        if (std::abs(std::abs(root) - r) > rel_tol * r) return false;
    }
    return true;
}

FrobeniusRecord ordinary_test(const SurfaceModel& model, Prime p, const FrobeniusConfig& config) {
    FrobeniusRecord rec;
    rec.p = p;
    rec.status = reduction_status(model, p);
    if (rec.status != ReductionStatus::Good) return rec;

    if (model.is_genus2()) {
        const Genus2Curve& curve = model.genus2();
        const auto cm = cartier_manin(curve.coeffs, p);
        rec.hw_trace = cm.matrix.trace();
        rec.hw_det = cm.matrix.det();
        rec.shift = cm.shift;
        rec.a2_mod_p = rec.hw_det;
        rec.ordinary = *rec.hw_det != 0;

        if (p <= config.naive_max_fp) {
            rec.n1 = count_fp_unchecked(curve, p);
            rec.a1 = static_cast<i64>(p.value()) + 1 - *rec.n1;
            if (static_cast<u128>(static_cast<__int128>(*rec.a1) * *rec.a1) > static_cast<u128>(16) * p) {
                throw IntegrityError("Weil bound violated: a1 = " + std::to_string(*rec.a1), p);
            }
            if (reduce(*rec.a1, p) != *rec.hw_trace) {
                throw IntegrityError("Hasse-Witt trace disagrees with a1 mod p", p);
            }
        }
        if (p <= config.naive_max_fp2 && p <= config.naive_max_fp) {
            rec.n2 = count_fp2_unchecked(curve, p);
            const CharPoly cp = char_poly_from_counts(p, *rec.n1, *rec.n2);
            rec.a2 = cp.a2;
            if (reduce(cp.a2, p) != *rec.hw_det) {
                throw IntegrityError("Hasse-Witt determinant disagrees with a2 mod p", p);
            }
        }
    } else {
        const EllipticProduct& pr = model.product();
        const auto squares = square_table(p);
        rec.ap1 = elliptic_trace(pr.first, p, squares);
        rec.ap2 = elliptic_trace(pr.second, p, squares);
        const CharPoly cp = product_char_poly(*rec.ap1, *rec.ap2, p);
        rec.a1 = cp.a1;
        rec.a2 = cp.a2;
        if (!within_weil_bounds(cp.a1, cp.a2, p)) throw IntegrityError("Weil bound violated for product", p);
        rec.a2_mod_p = reduce(cp.a2, p);
        rec.ordinary = *rec.a2_mod_p != 0;
    }

    if (config.check_roots && rec.a1 && rec.a2 && p <= config.naive_max_fp2) {
        if (!roots_on_weil_circle(*rec.a1, *rec.a2, p)) {
            throw IntegrityError("Frobenius root off the circle |alpha| = sqrt(p)", p);
        }
        rec.roots_checked = true;
    }
    return rec;
}

}  // namespace ordinary
