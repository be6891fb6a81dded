#include <doctest.h>

#include <random>

#include "ordinary/errors.hpp"
#include "ordinary/frobenius.hpp"
#include "support/oracles.hpp"

using namespace ordinary;

namespace {

const std::vector<std::vector<i64>> kCorpusGenus2 = {
    {1, 0, 0, 0, 0, 1}, {1, 0, 0, 0, 0, 0, 1}, {1, -1, 0, 0, 0, 1}, {1, 1, 0, 0, 0, 1}};

SurfaceModel g2(std::vector<i64> c) { return SurfaceModel(Genus2Curve{std::move(c), "test"}); }

struct Frozen {
    std::vector<i64> f;
    u64 p;
    i64 n1, n2, a1, a2;
};

// Brute-force enumeration, frozen.
const std::vector<Frozen> kFrozen = {
    {{1, 0, 0, 0, 0, 1}, 3, 4, 10, 0, 0},
    {{1, 0, 0, 0, 0, 1}, 7, 8, 50, 0, 0},
    {{1, 0, 0, 0, 0, 1}, 11, 8, 118, 4, 6},
    {{1, 0, 0, 0, 0, 1}, 13, 14, 170, 0, 0},
    {{1, 0, 0, 0, 0, 0, 1}, 5, 6, 46, 0, 10},
    {{1, 0, 0, 0, 0, 0, 1}, 7, 16, 46, -8, 30},
    {{1, 0, 0, 0, 0, 0, 1}, 11, 12, 166, 0, 22},
    {{1, 0, 0, 0, 0, 0, 1}, 13, 10, 214, 4, 30},
    {{1, -1, 0, 0, 0, 1}, 3, 7, 15, -3, 7},
    {{1, -1, 0, 0, 0, 1}, 5, 11, 31, -5, 15},
    {{1, -1, 0, 0, 0, 1}, 7, 7, 49, 1, 0},
    {{1, -1, 0, 0, 0, 1}, 11, 19, 135, -7, 31},
    {{1, -1, 0, 0, 0, 1}, 13, 15, 187, -1, 9},
    {{1, 1, 0, 0, 0, 1}, 5, 6, 46, 0, 10},
    {{1, 1, 0, 0, 0, 1}, 11, 8, 134, 4, 14},
    {{1, 1, 0, 0, 0, 1}, 13, 15, 177, -1, 4},
};

}  // namespace

TEST_CASE("frozen point counts and characteristic polynomials") {
    for (const auto& z : kFrozen) {
        CAPTURE(z.p);
        const Genus2Curve c{z.f, "t"};
        CHECK(naive_count_fp(c, Prime(z.p)) == z.n1);
        CHECK(naive_count_fp2(c, Prime(z.p)) == z.n2);
        CHECK(char_poly_from_counts(Prime(z.p), z.n1, z.n2) == CharPoly{z.a1, z.a2});
        const FrobeniusRecord r = ordinary_test(g2(z.f), Prime(z.p));
        CHECK(r.a1 == z.a1);
        CHECK(r.a2 == z.a2);
        CHECK(r.ordinary == (z.a2 % static_cast<i64>(z.p) != 0));
    }
}

TEST_CASE("frozen Hasse-Witt matrices") {
    using M = std::array<std::array<u64, 2>, 2>;
    const i64 x5p1[] = {1, 0, 0, 0, 0, 1};
    CHECK(cartier_manin(x5p1, Prime(3)).matrix.entries == M{{{0, 0}, {1, 0}}});
    CHECK(cartier_manin(x5p1, Prime(7)).matrix.entries == M{{{0, 3}, {0, 0}}});
    const auto hw11 = cartier_manin(x5p1, Prime(11)).matrix;
    CHECK(hw11.entries == M{{{10, 0}, {0, 5}}});
    CHECK(hw11.det() == 6);
    const i64 x6p1[] = {1, 0, 0, 0, 0, 0, 1};
    CHECK(cartier_manin(x6p1, Prime(5)).matrix.entries == M{{{0, 0}, {0, 0}}});
    CHECK(cartier_manin(x6p1, Prime(7)).matrix.entries == M{{{3, 0}, {0, 3}}});
    CHECK(cartier_manin(x6p1, Prime(7)).matrix.det() == 2);
}

TEST_CASE("ordinary verdict examples") {
    CHECK(ordinary_test(g2({1, 0, 0, 0, 0, 1}), Prime(11)).ordinary == true);
    CHECK(ordinary_test(g2({1, 0, 0, 0, 0, 1}), Prime(7)).ordinary == false);
    const SurfaceModel prod = parse_surface("product:[-1,0];[0,1]");
    CHECK(ordinary_test(prod, Prime(13)).ordinary == true);
    CHECK(ordinary_test(prod, Prime(7)).ordinary == false);  // 7 inert in Q(i)
    const auto bad = ordinary_test(g2({1, 0, 0, 0, 0, 1}), Prime(5));
    CHECK(bad.status == ReductionStatus::BadDisc);
    CHECK_FALSE(bad.ordinary.has_value());
}

TEST_CASE("elliptic traces") {
    const auto sq5 = square_table(5);
    CHECK(elliptic_trace({-1, 0}, Prime(5), sq5) == -2);  // y^2 = x^3 - x has 8 points over F_5
    CHECK(oracle::elliptic_trace(-1, 0, 5) == -2);
    for (u64 p = 5; p < 400; p += 2) {
        if (!is_prime(p)) continue;
        const auto sq = square_table(p);
        CHECK(elliptic_trace({-1, 0}, Prime(p), sq) == oracle::elliptic_trace(-1, 0, p));
        CHECK(elliptic_trace({1, 1}, Prime(p), sq) == oracle::elliptic_trace(1, 1, p));
        if (p % 4 == 3) CHECK(elliptic_trace({-1, 0}, Prime(p), sq) == 0);
        if (p % 3 == 2) CHECK(elliptic_trace({0, 1}, Prime(p), sq) == 0);
    }
}

TEST_CASE("product characteristic polynomial") {
    CHECK(product_char_poly(2, -2, Prime(5)) == CharPoly{0, 6});
    CHECK_THROWS_AS(product_char_poly(5, 0, Prime(5)), IntegrityError);
    for (u64 p = 5; p < 200; p += 2) {
        if (!is_prime(p) || p == 31) continue;
        const auto r = ordinary_test(parse_surface("product:[-1,0];[1,1]"), Prime(p));
        REQUIRE(r.ap1);
        CHECK(r.a1 == *r.ap1 + *r.ap2);
        CHECK(r.a2 == *r.ap1 * *r.ap2 + 2 * static_cast<i64>(p));
        CHECK(r.ordinary == (*r.ap1 % static_cast<i64>(p) != 0 && *r.ap2 % static_cast<i64>(p) != 0));
    }
}

TEST_CASE("counts refuse bad reduction and the O(p^2) limit") {
    const Genus2Curve c{{1, 0, 0, 0, 0, 1}, "t"};
    CHECK_THROWS_AS(naive_count_fp(c, Prime(5)), RefusedError);
    CHECK_THROWS_AS(naive_count_fp2(c, Prime(503)), RefusedError);
    CHECK_NOTHROW(naive_count_fp2(c, Prime(503), 1000));
}

TEST_CASE("char_poly_from_counts rejects impossible counts") {
    CHECK_THROWS_AS(char_poly_from_counts(Prime(11), 8, 119), IntegrityError);   // odd parity
    CHECK_THROWS_AS(char_poly_from_counts(Prime(11), 40, 118), IntegrityError);  // |a1| > 4 sqrt(p)
    CHECK(within_weil_bounds(0, 6 * 11, 11));
    CHECK_FALSE(within_weil_bounds(0, 6 * 11 + 1, 11));
    CHECK(within_weil_bounds(13, 0, 11));   // 13 <= 4 sqrt(11) = 13.26
    CHECK_FALSE(within_weil_bounds(14, 0, 11));
}

TEST_CASE("roots_on_weil_circle") {
    CHECK(roots_on_weil_circle(4, 6, 11));
    CHECK(roots_on_weil_circle(0, 0, 7));
    CHECK_FALSE(roots_on_weil_circle(0, 30, 7));  // a1 = 0, a2 > 2p: x^2 has two distinct negative values, neither -p
}

TEST_CASE("Hasse-Witt recurrence equals repeated squaring on the corpus, p <= 50") {
    for (const auto& f : kCorpusGenus2) {
        for (u64 p = 3; p <= 50; p += 2) {
            if (!is_prime(p)) continue;
            CAPTURE(p);
            const auto got = cartier_manin(f, Prime(p)).matrix.entries;
            CHECK(got == oracle::hasse_witt(f, p));
        }
    }
}

TEST_CASE("property: random curves agree with every oracle") {
    std::mt19937_64 rng(21);
    std::uniform_int_distribution<i64> coef(-30, 30);
    const auto primes = primes_up_to(60);
    int tested = 0;
    while (tested < 400) {
        std::vector<i64> f(6 + rng() % 2);
        for (auto& x : f) x = coef(rng);
        if (f.back() == 0) continue;
        const Prime p = primes[rng() % primes.size()];
        CAPTURE(p.value());
        std::optional<SurfaceModel> m;
        try {
            m.emplace(g2(f));
        } catch (const ParseError&) {
            continue;
        }
        if (reduction_status(*m, p) != ReductionStatus::Good) continue;
        // Entries are basis-dependent under x -> x + shift; trace and determinant are not.
        const auto cm = cartier_manin(f, p);
        const auto hw = oracle::hasse_witt(f, p);
        if (cm.shift == 0) CHECK(cm.matrix.entries == hw);
        CHECK(cm.matrix.trace() == (hw[0][0] + hw[1][1]) % p);
        CHECK(cm.matrix.det() == (hw[0][0] * hw[1][1] % p + p - hw[0][1] * hw[1][0] % p) % p);
        const auto r = ordinary_test(*m, p);
        const i64 n1 = oracle::count_fp(f, p);
        const i64 n2 = oracle::count_fp2(f, p);
        const auto [a1, a2] = oracle::char_poly(n1, n2, static_cast<i64>(p.value()));
        CHECK(r.n1 == n1);
        CHECK(r.n2 == n2);
        CHECK(r.a1 == a1);
        CHECK(r.a2 == a2);
        CHECK(within_weil_bounds(a1, a2, p));
        CHECK(roots_on_weil_circle(a1, a2, p));
        CHECK(r.hw_trace == reduce(a1, p));
        CHECK(r.hw_det == reduce(a2, p));
        CHECK(r.ordinary == (reduce(a2, p) != 0));
        ++tested;
    }
}

TEST_CASE("property: power_coefficients equals repeated squaring") {
    std::mt19937_64 rng(23);
    const auto primes = primes_up_to(200);
    for (int t = 0; t < 200; ++t) {
        const Prime p = primes[rng() % primes.size()];
        std::vector<i64> g(2 + rng() % 6);
        for (auto& x : g) x = static_cast<i64>(rng() % p);
        if (g[0] == 0) g[0] = 1;
        const u64 m = 1 + rng() % ((p - 1) / 2 + 1);
        const u64 count = 1 + rng() % p;
        std::vector<u64> gu(g.begin(), g.end());
        const auto got = power_coefficients(gu, m, count, p);
        auto want = oracle::power_mod(g, m, p);
        want.resize(std::max<std::size_t>(want.size(), count), 0);
        want.resize(count);
        CHECK(got == want);
    }
}

TEST_CASE("between the naive limits only a1 is counted") {
    const auto r = ordinary_test(g2({1, -1, 0, 0, 0, 1}), Prime(10007));
    REQUIRE(r.a1);
    CHECK(r.hw_trace == reduce(*r.a1, 10007));
    CHECK_FALSE(r.a2.has_value());
    CHECK(r.a2_mod_p == r.hw_det);
}

TEST_CASE("every root of f in F_p: the valuation fallback") {
    // f = x^5 - x vanishes on all of F_5; no shift makes f(c) != 0.
    const std::vector<i64> f = {0, -1, 0, 0, 0, 1};
    CHECK(cartier_manin(f, Prime(5)).matrix.entries == oracle::hasse_witt(f, 5));
    const std::vector<i64> g = {0, -1, 1, 1, -2, 0, 1};  // (x^3 - x)(x^3 - x + 1), squarefree mod 3
    CHECK(cartier_manin(g, Prime(3)).matrix.entries == oracle::hasse_witt(g, 3));
}

TEST_CASE("arithmetic near 2^62 in the recurrence") {
    // Only the bottom coefficients are needed from f^m; compare a short prefix.
    const u64 p = 4611686018427387847ull;
    const std::vector<u64> g = {3, 1, 4, 1, 5};
    const auto got = power_coefficients(g, (p - 1) / 2, 4, Prime(p));
    // Binomial expansion of (3 + x + ...)^m for the first two coefficients.
    const u64 m = (p - 1) / 2;
    CHECK(got[0] == pow_mod(3, m, p));
    CHECK(got[1] == mul_mod(m % p, pow_mod(3, m - 1, p), p));
}
