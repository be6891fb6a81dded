#include "ordinary/arith.hpp"

#include <array>

namespace ordinary {

u64 pow_mod(u64 base, u64 exp, u64 m) noexcept {
    u64 result = 1 % m;
    base %= m;
    while (exp > 0) {
        if (exp & 1) result = mul_mod(result, base, m);
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    return result;
}

u64 inv_mod(u64 a, u64 p) {
    a %= p;
    if (a == 0) throw std::domain_error("inverse of zero modulo " + std::to_string(p));
    return pow_mod(a, p - 2, p);
}

bool is_prime(u64 n) {
    if (n < 2) return false;
    static constexpr std::array<u64, 12> kBases = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
    for (u64 q : kBases) {
        if (n % q == 0) return n == q;
    }
    u64 d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    for (u64 a : kBases) {
        u64 x = pow_mod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int i = 1; i < s; ++i) {
            x = mul_mod(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

Prime::Prime(u64 value) : value_(value) {
    if (value == 2) throw std::invalid_argument("p = 2 is excluded");
    if (value >= kMaxPrime) throw std::invalid_argument("prime must be below 2^62: " + std::to_string(value));
    if (!is_prime(value)) throw std::invalid_argument("not a prime: " + std::to_string(value));
}

int quadratic_character(i64 a, Prime p) {
    u64 r = reduce(a, p);
    if (r == 0) return 0;
    return pow_mod(r, (p - 1) / 2, p) == 1 ? 1 : -1;
}

u64 smallest_nonresidue(Prime p) {
    for (u64 r = 2;; ++r) {
        if (quadratic_character(static_cast<i64>(r), p) == -1) return r;
    }
}

std::vector<Prime> primes_up_to(u64 bound) {
    std::vector<Prime> out;
    if (bound < 3) return out;
    // sieve over odd numbers: index i stands for 2i + 1
    const u64 half = (bound - 1) / 2 + 1;
    std::vector<std::uint8_t> composite(half, 0);
    for (u64 i = 1; i < half; ++i) {
        if (composite[i]) continue;
        const u64 q = 2 * i + 1;
        out.push_back(Prime::trusted(q));
        for (u64 j = (q * q) / 2; j < half && q * q <= bound; j += q) composite[j] = 1;
    }
    return out;
}

std::vector<std::uint8_t> square_table(u64 p) {
    std::vector<std::uint8_t> table(p, 0);
    // (x+1)^2 = x^2 + 2x + 1, walked with additions only
    u64 sq = 0;
    u64 step = 1;
    for (u64 x = 0; x <= p / 2; ++x) {
        table[sq] = 1;
        sq = add_mod(sq, step, p);
        step = add_mod(step, 2 % p, p);
    }
    return table;
}

Fp2Field::Fp2Field(Prime p) : p_(p), r_(smallest_nonresidue(p)) {}

Fp2Field::Fp2Field(Prime p, u64 nonresidue) : p_(p), r_(nonresidue % p) {
    if (ordinary::quadratic_character(static_cast<i64>(r_), p) != -1) {
        throw std::invalid_argument("F_p2 needs a quadratic non-residue, got " + std::to_string(nonresidue));
    }
}

Fp2Elem Fp2Field::mul(Fp2Elem a, Fp2Elem b) const noexcept {
    const u64 p = p_;
    u64 c0 = add_mod(mul_mod(a.c0, b.c0, p), mul_mod(r_, mul_mod(a.c1, b.c1, p), p), p);
    u64 c1 = add_mod(mul_mod(a.c0, b.c1, p), mul_mod(a.c1, b.c0, p), p);
    return {c0, c1};
}

Fp2Elem Fp2Field::pow(Fp2Elem z, u128 e) const noexcept {
    Fp2Elem result = one();
    while (e > 0) {
        if (e & 1) result = mul(result, z);
        z = mul(z, z);
        e >>= 1;
    }
    return result;
}

u64 Fp2Field::norm(Fp2Elem z) const noexcept {
    return sub_mod(mul_mod(z.c0, z.c0, p_), mul_mod(r_, mul_mod(z.c1, z.c1, p_), p_), p_);
}

int Fp2Field::quadratic_character(Fp2Elem z) const {
    if (z == zero()) return 0;
    const u128 q = static_cast<u128>(p_.value()) * p_.value();
    Fp2Elem e = pow(z, (q - 1) / 2);
    if (e == one()) return 1;
    if (e == Fp2Elem{p_ - 1, 0}) return -1;
    throw std::logic_error("Euler criterion in F_p2 returned neither 1 nor -1");
}

}  // namespace ordinary
