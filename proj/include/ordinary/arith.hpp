#pragma once

// Exact arithmetic modulo odd primes below 2^62, the quadratic extension
// F_{p^2} = F_p[t]/(t^2 - r), and prime enumeration.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ordinary {

using u64 = std::uint64_t;
using i64 = std::int64_t;
using u128 = unsigned __int128;

inline constexpr u64 kMaxPrime = u64{1} << 62;

/// Deterministic Miller-Rabin, valid for every n < 2^64.
bool is_prime(u64 n);

/// An odd prime 2 < p < 2^62. Construction verifies primality.
class Prime {
public:
    explicit Prime(u64 value);

    /// Skips the primality check; for values produced by the sieve.
    static Prime trusted(u64 value) noexcept { return Prime(value, 0); }

    constexpr u64 value() const noexcept { return value_; }
    constexpr operator u64() const noexcept { return value_; }

private:
    constexpr Prime(u64 value, int) noexcept : value_(value) {}
    u64 value_;
};

/// Exact a*b mod m for a, b < m < 2^63.
inline u64 mul_mod(u64 a, u64 b, u64 m) noexcept {
    if (m <= 0xffffffffu) return a * b % m;
    return static_cast<u64>(static_cast<u128>(a) * b % m);
}

/// Barrett reduction by a fixed modulus; exact for every 64-bit input.
class Barrett {
public:
    explicit Barrett(u64 m) noexcept : m_(m), mu_(~u64{0} / m) {}

    u64 modulus() const noexcept { return m_; }

    u64 reduce(u64 a) const noexcept {
        const u64 q = static_cast<u64>((static_cast<u128>(a) * mu_) >> 64);
        u64 r = a - q * m_;
        while (r >= m_) r -= m_;
        return r;
    }

private:
    u64 m_;
    u64 mu_;
};

inline u64 add_mod(u64 a, u64 b, u64 m) noexcept {
    u64 s = a + b;
    return s >= m ? s - m : s;
}

inline u64 sub_mod(u64 a, u64 b, u64 m) noexcept {
    return a >= b ? a - b : a + m - b;
}

/// Reduces a signed integer into [0, m).
inline u64 reduce(i64 a, u64 m) noexcept {
    if (a >= 0) return static_cast<u64>(a) % m;
    u64 r = static_cast<u64>(-(a + 1)) % m;  // avoids overflow at INT64_MIN
    return m - 1 - r;
}

u64 pow_mod(u64 base, u64 exp, u64 m) noexcept;

/// Inverse modulo a prime; a must be nonzero mod p.
u64 inv_mod(u64 a, u64 p);

/// Legendre symbol (a/p) in {-1, 0, +1} by Euler's criterion.
int quadratic_character(i64 a, Prime p);

/// Smallest positive quadratic non-residue modulo p.
u64 smallest_nonresidue(Prime p);

/// Odd primes in [3, bound], ascending. Empty when bound < 3.
std::vector<Prime> primes_up_to(u64 bound);

/// Table of squares mod p: is_square[x] for x in [0, p). Costs O(p) additions.
std::vector<std::uint8_t> square_table(u64 p);

/// Element c0 + c1*t of F_p[t]/(t^2 - r).
struct Fp2Elem {
    u64 c0 = 0;
    u64 c1 = 0;
    friend bool operator==(const Fp2Elem&, const Fp2Elem&) = default;
};

/// The field F_{p^2}, built with r the smallest non-residue mod p.
class Fp2Field {
public:
    explicit Fp2Field(Prime p);

    /// Builds the field with an explicit r; throws unless r is a non-residue.
    Fp2Field(Prime p, u64 nonresidue);

    Prime prime() const noexcept { return p_; }
    u64 nonresidue() const noexcept { return r_; }

    Fp2Elem zero() const noexcept { return {0, 0}; }
    Fp2Elem one() const noexcept { return {1, 0}; }
    Fp2Elem t() const noexcept { return {0, 1}; }
    Fp2Elem from_int(i64 a) const noexcept { return {reduce(a, p_), 0}; }

    Fp2Elem add(Fp2Elem a, Fp2Elem b) const noexcept {
        return {add_mod(a.c0, b.c0, p_), add_mod(a.c1, b.c1, p_)};
    }
    Fp2Elem sub(Fp2Elem a, Fp2Elem b) const noexcept {
        return {sub_mod(a.c0, b.c0, p_), sub_mod(a.c1, b.c1, p_)};
    }
    Fp2Elem mul(Fp2Elem a, Fp2Elem b) const noexcept;

    /// Square-and-multiply; exponent may exceed 2^64 (p^2 - 1 for large p).
    Fp2Elem pow(Fp2Elem z, u128 e) const noexcept;

    /// Field norm c0^2 - r*c1^2 = z^(p+1), an element of F_p.
    u64 norm(Fp2Elem z) const noexcept;

    /// Quadratic character of F_{p^2}: z^((p^2-1)/2) mapped to {-1, 0, +1}.
    int quadratic_character(Fp2Elem z) const;

private:
    Prime p_;
    u64 r_;
};

inline Fp2Elem fp2_pow(const Fp2Field& field, Fp2Elem z, u128 e) { return field.pow(z, e); }

}  // namespace ordinary
