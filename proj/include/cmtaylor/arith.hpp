#pragma once

// Exact arithmetic foundations: big rationals, real quadratic fields Q(sqrt d),
// p-adic valuations, and residue rings Z[sqrt d]/(p^A).
//
// All values are immutable; every operation is a pure function.  Residues are
// stored componentwise in the basis {1, sqrt(d)} of Z[sqrt d]/(p^A); no square
// root of d modulo p is ever chosen.

#include <boost/multiprecision/cpp_int.hpp>

#include <array>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cmtaylor::arith {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline Int num(const Rat& x) { return boost::multiprecision::numerator(x); }
inline Int den(const Rat& x) { return boost::multiprecision::denominator(x); }

// ---------------------------------------------------------------------------
// Q(sqrt d) elements: value = a + b*sqrt(d), d > 0 squarefree (d = 0 marks a
// plain rational, the canonical form whenever b vanishes).
// ---------------------------------------------------------------------------

class QuadRat {
public:
    QuadRat() : d_(0), a_(0), b_(0) {}
    QuadRat(const Rat& a) : d_(0), a_(a), b_(0) {}          // NOLINT(google-explicit-constructor)
    QuadRat(long long a) : d_(0), a_(a), b_(0) {}           // NOLINT(google-explicit-constructor)
    QuadRat(const Rat& a, const Rat& b, long long d) : d_(d), a_(a), b_(b) {
        if (d < 0) throw std::domain_error("QuadRat: discriminant marker d must be nonnegative");
        if (b_ == 0) d_ = 0;
        else if (d_ <= 1) throw std::domain_error("QuadRat: irrational part requires squarefree d > 1");
    }

    const Rat& a() const { return a_; }
    const Rat& b() const { return b_; }
    long long d() const { return d_; }
    bool is_rational() const { return b_ == 0; }
    bool is_zero() const { return a_ == 0 && b_ == 0; }

    friend bool operator==(const QuadRat& x, const QuadRat& y) {
        return x.a_ == y.a_ && x.b_ == y.b_ && x.d_ == y.d_;
    }
    friend bool operator!=(const QuadRat& x, const QuadRat& y) { return !(x == y); }

    friend QuadRat operator+(const QuadRat& x, const QuadRat& y) {
        long long d = merged_d(x, y);
        return QuadRat(x.a_ + y.a_, x.b_ + y.b_, d);
    }
    friend QuadRat operator-(const QuadRat& x, const QuadRat& y) {
        long long d = merged_d(x, y);
        return QuadRat(x.a_ - y.a_, x.b_ - y.b_, d);
    }
    friend QuadRat operator-(const QuadRat& x) { return QuadRat(-x.a_, -x.b_, x.d_); }
    friend QuadRat operator*(const QuadRat& x, const QuadRat& y) {
        long long d = merged_d(x, y);
        return QuadRat(x.a_ * y.a_ + Rat(d) * x.b_ * y.b_, x.a_ * y.b_ + x.b_ * y.a_, d);
    }
    friend QuadRat operator/(const QuadRat& x, const QuadRat& y) { return x * y.inverse(); }

    QuadRat conj() const { return QuadRat(a_, -b_, d_); }
    Rat norm() const { return a_ * a_ - Rat(d_) * b_ * b_; }
    Rat trace() const { return 2 * a_; }

    QuadRat inverse() const {
        Rat n = norm();
        if (n == 0) throw std::domain_error("QuadRat: division by zero");
        return QuadRat(a_ / n, -b_ / n, d_);
    }

    QuadRat pow(long long e) const {
        if (e < 0) return inverse().pow(-e);
        QuadRat acc(Rat(1)), base = *this;
        while (e > 0) {
            if (e & 1) acc = acc * base;
            base = base * base;
            e >>= 1;
        }
        return acc;
    }

private:
    static long long merged_d(const QuadRat& x, const QuadRat& y) {
        if (x.d_ == 0) return y.d_;
        if (y.d_ == 0 || x.d_ == y.d_) return x.d_;
        throw std::domain_error("QuadRat: mixed-field operands (different d)");
    }

    long long d_;
    Rat a_, b_;
};

// ---------------------------------------------------------------------------
// p-adic valuation of a nonzero rational.
// ---------------------------------------------------------------------------

inline long vp(const Int& n, const Int& p) {
    if (n == 0) throw std::domain_error("vp: valuation of zero is undefined");
    long v = 0;
    Int m = boost::multiprecision::abs(n);
    while (m % p == 0) { m /= p; ++v; }
    return v;
}

inline long vp(const Rat& x, const Int& p) {
    if (x == 0) throw std::domain_error("vp: valuation of zero is undefined");
    return vp(num(x), p) - vp(den(x), p);
}

// ---------------------------------------------------------------------------
// Residue rings Z[sqrt d]/(p^A), elements stored componentwise.
// The scalar ring Z/(p^A) is the special case b = 0 (any d).
// ---------------------------------------------------------------------------

inline std::int64_t pow_i64(std::int64_t base, int exp) {
    std::int64_t r = 1;
    for (int i = 0; i < exp; ++i) {
        if (r > (std::int64_t{1} << 62) / (base > 0 ? base : 1))
            throw std::overflow_error("pow_i64: modulus exceeds int64 range");
        r *= base;
    }
    return r;
}

inline std::int64_t mod_i64(std::int64_t x, std::int64_t m) {
    std::int64_t r = x % m;
    return r < 0 ? r + m : r;
}

inline std::int64_t mulmod_i64(std::int64_t x, std::int64_t y, std::int64_t m) {
    return static_cast<std::int64_t>(static_cast<__int128>(x) * y % m);
}

inline std::int64_t powmod_i64(std::int64_t base, std::int64_t e, std::int64_t m) {
    std::int64_t r = 1 % m;
    base = mod_i64(base, m);
    for (; e > 0; e >>= 1) {
        if (e & 1) r = mulmod_i64(r, base, m);
        base = mulmod_i64(base, base, m);
    }
    return r;
}

// Inverse modulo m for gcd(x, m) = 1 (extended Euclid).
inline std::int64_t invmod_i64(std::int64_t x, std::int64_t m) {
    std::int64_t a = mod_i64(x, m), b = m, u = 1, v = 0;
    while (b != 0) {
        std::int64_t q = a / b;
        a -= q * b; std::swap(a, b);
        u -= q * v; std::swap(u, v);
    }
    if (a != 1) throw std::domain_error("invmod: argument is not a unit");
    return mod_i64(u, m);
}

inline std::int64_t reduce_int(const Int& n, std::int64_t m) {
    Int r = n % m;
    if (r < 0) r += m;
    return static_cast<std::int64_t>(r);
}

// Reduce a rational with denominator coprime to m.
inline std::int64_t reduce_rat(const Rat& x, std::int64_t m) {
    std::int64_t dn = reduce_int(den(x), m);
    if (std::gcd(dn, m) != 1)
        throw std::domain_error("reduce_rat: denominator shares a factor with the modulus");
    return mulmod_i64(reduce_int(num(x), m), invmod_i64(dn, m), m);
}

struct ResidueQuad {
    std::int64_t p = 0;   // odd prime
    int A = 0;            // exponent
    std::int64_t m = 0;   // p^A
    std::int64_t d = 0;   // field marker (0 = scalar context)
    std::int64_t a = 0;   // component of 1
    std::int64_t b = 0;   // component of sqrt(d)

    ResidueQuad() = default;
    ResidueQuad(std::int64_t p_, int A_, std::int64_t d_, std::int64_t a_, std::int64_t b_)
        : p(p_), A(A_), m(pow_i64(p_, A_)), d(d_), a(mod_i64(a_, m)), b(mod_i64(b_, m)) {}

    bool is_zero() const { return a == 0 && b == 0; }
    bool is_scalar() const { return b == 0; }

    // norm residue a^2 - d b^2; the element is a unit iff this is a unit mod p.
    std::int64_t norm() const {
        return mod_i64(mulmod_i64(a, a, m) - mulmod_i64(d % m, mulmod_i64(b, b, m), m), m);
    }
    bool is_unit() const { return std::gcd(norm(), m) == 1; }

    friend bool operator==(const ResidueQuad& x, const ResidueQuad& y) {
        return x.m == y.m && x.a == y.a && x.b == y.b && (x.d == y.d || (x.b == 0 && y.b == 0));
    }
    friend bool operator!=(const ResidueQuad& x, const ResidueQuad& y) { return !(x == y); }

    friend ResidueQuad operator+(const ResidueQuad& x, const ResidueQuad& y) {
        std::int64_t d = merged_d(x, y);
        return ResidueQuad(x.p, x.A, d, x.a + y.a, x.b + y.b);
    }
    friend ResidueQuad operator-(const ResidueQuad& x, const ResidueQuad& y) {
        std::int64_t d = merged_d(x, y);
        return ResidueQuad(x.p, x.A, d, x.a - y.a, x.b - y.b);
    }
    friend ResidueQuad operator*(const ResidueQuad& x, const ResidueQuad& y) {
        std::int64_t d = merged_d(x, y);
        std::int64_t m = x.m;
        std::int64_t a = mod_i64(mulmod_i64(x.a, y.a, m) + mulmod_i64(d % m, mulmod_i64(x.b, y.b, m), m), m);
        std::int64_t b = mod_i64(mulmod_i64(x.a, y.b, m) + mulmod_i64(x.b, y.a, m), m);
        return ResidueQuad(x.p, x.A, d, a, b);
    }

    ResidueQuad inverse() const {
        std::int64_t ninv = invmod_i64(norm(), m);   // throws when not a unit
        return ResidueQuad(p, A, d, mulmod_i64(a, ninv, m), mod_i64(-mulmod_i64(b, ninv, m), m));
    }
    friend ResidueQuad operator/(const ResidueQuad& x, const ResidueQuad& y) { return x * y.inverse(); }

    ResidueQuad pow(std::int64_t e) const {
        if (e < 0) return inverse().pow(-e);
        ResidueQuad acc(p, A, d, 1, 0), base = *this;
        for (; e > 0; e >>= 1) {
            if (e & 1) acc = acc * base;
            base = base * base;
        }
        return acc;
    }

private:
    // Scalars (b = 0) embed in every ring, so their marker coerces freely.
    static std::int64_t merged_d(const ResidueQuad& x, const ResidueQuad& y) {
        if (x.m != y.m)
            throw std::domain_error("ResidueQuad: incompatible moduli");
        if (x.d == y.d) return x.d;
        if (x.b == 0 && (x.d == 0 || y.b != 0)) return y.d;
        if (y.b == 0) return x.d;
        throw std::domain_error("ResidueQuad: incompatible field markers");
    }
};

// Componentwise reduction of a p-integral element of Q(sqrt d).
inline ResidueQuad reduce_mod(const QuadRat& x, std::int64_t p, int A, std::int64_t d_hint = 0) {
    std::int64_t m = pow_i64(p, A);
    std::int64_t d = x.d() != 0 ? x.d() : d_hint;
    return ResidueQuad(p, A, d, reduce_rat(x.a(), m), reduce_rat(x.b(), m));
}

// Multiplicative order of a unit residue (bounded search; the unit group of
// Z[sqrt d]/(p^A) has order dividing (p^2 - 1) * p^(2A-2)).
inline std::int64_t mult_order(const ResidueQuad& u) {
    if (!u.is_unit()) throw std::domain_error("mult_order: not a unit");
    ResidueQuad one(u.p, u.A, u.d, 1, 0), acc = u;
    std::int64_t bound = (u.p * u.p - 1) * pow_i64(u.p, 2 * (u.A - 1));
    for (std::int64_t k = 1; k <= bound; ++k) {
        if (acc == one) return k;
        acc = acc * u;
    }
    throw std::logic_error("mult_order: order not found within group bound");
}

// ---------------------------------------------------------------------------
// Splitting behaviour of an odd prime in Q(sqrt D) (D any nonsquare integer,
// negative for the imaginary CM fields classified here).
// ---------------------------------------------------------------------------

enum class SplitType { split, inert, ramified };

inline int legendre_symbol(std::int64_t a, std::int64_t p) {
    a = mod_i64(a, p);
    if (a == 0) return 0;
    std::int64_t s = powmod_i64(a, (p - 1) / 2, p);
    return s == 1 ? 1 : -1;
}

// Kronecker symbol (a|n), the Jacobi symbol extended to all integers.
inline int kronecker_symbol(std::int64_t a, std::int64_t n) {
    if (n == 0) return (a == 1 || a == -1) ? 1 : 0;
    if ((a & 1) == 0 && (n & 1) == 0) return 0;
    int v = 0;
    while ((n & 1) == 0) {
        n >>= 1;
        ++v;
    }
    int k = 1;
    if (v & 1) {
        std::int64_t r = a & 7; // a mod 8, valid for negative a in two's complement
        if (r == 3 || r == 5) k = -1;
    }
    if (n < 0) {
        n = -n;
        if (a < 0) k = -k;
    }
    a = mod_i64(a, n);
    while (a != 0) {
        v = 0;
        while ((a & 1) == 0) {
            a >>= 1;
            ++v;
        }
        if (v & 1) {
            std::int64_t r = n & 7;
            if (r == 3 || r == 5) k = -k;
        }
        if (a & n & 2) k = -k; // both ≡ 3 (mod 4)
        std::int64_t t = n % a;
        n = a;
        a = t;
    }
    return n == 1 ? k : 0;
}

inline SplitType is_split(std::int64_t D, std::int64_t p) {
    if (p <= 2 || p % 2 == 0) throw std::domain_error("is_split: p must be an odd prime");
    int chi = legendre_symbol(D, p);
    if (chi == 0) return SplitType::ramified;
    return chi == 1 ? SplitType::split : SplitType::inert;
}

inline std::string to_string(SplitType s) {
    switch (s) {
        case SplitType::split: return "split";
        case SplitType::inert: return "inert";
        default: return "ramified";
    }
}

// ---------------------------------------------------------------------------
// Serialization grammar:  INT  |  INT "/" POSINT  |  "(" RAT ")+(" RAT ")sqrt(" INT ")"
// Printing and parsing are exact inverses.
// ---------------------------------------------------------------------------

inline std::string to_string(const Rat& x) {
    std::string s = num(x).str();
    if (den(x) != 1) s += "/" + den(x).str();
    return s;
}

inline std::string to_string(const QuadRat& x) {
    if (x.is_rational()) return to_string(x.a());
    return "(" + to_string(x.a()) + ")+(" + to_string(x.b()) + ")sqrt(" + std::to_string(x.d()) + ")";
}

inline std::string to_string(const ResidueQuad& r) {
    if (r.is_scalar()) return std::to_string(r.a);
    return "(" + std::to_string(r.a) + ")+(" + std::to_string(r.b) + ")sqrt(" + std::to_string(r.d) + ")";
}

namespace detail {

inline Int parse_int(std::string_view s, std::size_t& pos) {
    std::size_t start = pos;
    if (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) ++pos;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
    if (pos == start || (pos == start + 1 && !std::isdigit(static_cast<unsigned char>(s[start]))))
        throw std::invalid_argument("parse: expected integer at position " + std::to_string(start));
    return Int(std::string(s.substr(start, pos - start)));
}

inline Rat parse_rat(std::string_view s, std::size_t& pos) {
    Int n = parse_int(s, pos);
    if (pos < s.size() && s[pos] == '/') {
        ++pos;
        Int d = parse_int(s, pos);
        if (d <= 0) throw std::invalid_argument("parse: denominator must be positive");
        return Rat(n) / Rat(d);
    }
    return Rat(n);
}

inline void expect(std::string_view s, std::size_t& pos, std::string_view lit) {
    if (s.substr(pos, lit.size()) != lit)
        throw std::invalid_argument("parse: expected '" + std::string(lit) + "' at position " + std::to_string(pos));
    pos += lit.size();
}

} // namespace detail

inline QuadRat parse_quadrat(std::string_view s) {
    std::size_t pos = 0;
    QuadRat result;
    if (!s.empty() && s[0] == '(') {
        detail::expect(s, pos, "(");
        Rat a = detail::parse_rat(s, pos);
        detail::expect(s, pos, ")+(");
        Rat b = detail::parse_rat(s, pos);
        detail::expect(s, pos, ")sqrt(");
        Int d = detail::parse_int(s, pos);
        detail::expect(s, pos, ")");
        result = QuadRat(a, b, static_cast<long long>(d));
    } else {
        result = QuadRat(detail::parse_rat(s, pos));
    }
    if (pos != s.size()) throw std::invalid_argument("parse: trailing characters after value");
    return result;
}

inline Rat parse_rat(std::string_view s) {
    std::size_t pos = 0;
    Rat r = detail::parse_rat(s, pos);
    if (pos != s.size()) throw std::invalid_argument("parse: trailing characters after rational");
    return r;
}

// ---------------------------------------------------------------------------
// Factorization by trial division (adequate for norms of the reference data;
// cofactors below bound^2 left after the scan are certified prime).
// ---------------------------------------------------------------------------

struct Factorization {
    int sign = 1;
    std::vector<std::pair<Int, int>> factors;   // (prime, exponent), ascending
    bool complete = true;                        // false if a composite cofactor remained

    std::string str() const {
        std::string s = sign < 0 ? "-" : "";
        if (factors.empty()) return s + "1";
        for (std::size_t i = 0; i < factors.size(); ++i) {
            if (i) s += "*";
            s += factors[i].first.str();
            if (factors[i].second > 1) s += "^" + std::to_string(factors[i].second);
        }
        if (!complete) s += "*(composite)";
        return s;
    }
};

inline Factorization factorize(Int n, std::int64_t trial_bound = 100000000) {
    if (n == 0) throw std::domain_error("factorize: zero has no factorization");
    Factorization f;
    if (n < 0) { f.sign = -1; n = -n; }
    auto strip = [&](const Int& p) {
        int e = 0;
        while (n % p == 0) { n /= p; ++e; }
        if (e) f.factors.emplace_back(p, e);
    };
    strip(2); strip(3);
    for (std::int64_t q = 5; q <= trial_bound && Int(q) * q <= n; q += 6) {
        strip(q);
        strip(q + 2);
    }
    if (n > 1) {
        // Any residual cofactor has no factor <= trial_bound, hence is prime
        // whenever it is below trial_bound^2.
        f.factors.emplace_back(n, 1);
        f.complete = n <= Int(trial_bound) * trial_bound;
    }
    return f;
}

} // namespace cmtaylor::arith
