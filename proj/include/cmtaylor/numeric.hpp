#pragma once

// Arbitrary-precision floating oracle: Gamma, Chowla-Selberg periods,
// q-expansion evaluation at CM points, iterated raising operators, and
// recognition of floats as exact rationals or quadratic irrationals.
//
// Working precision is a fixed 264 decimal digits; `prec` parameters state
// the accuracy the caller relies on (at most 200, leaving > 60 guard digits
// for roundoff and for the ~47 digits the Spouge sum cancels away).
// Stability under precision/truncation doubling -- not interval arithmetic --
// is the accepted correctness evidence.

#include "cmtaylor/arith.hpp"
#include "cmtaylor/qseries.hpp"
#include "cmtaylor/quasimod.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_complex.hpp>

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

namespace cmtaylor::numeric {

using arith::Int;
using arith::QuadRat;
using arith::Rat;
using qseries::QSeries;

constexpr unsigned kWorkDigits = 264;
constexpr long kMaxPrec = 200;

using BigFloat = boost::multiprecision::number<boost::multiprecision::backends::cpp_bin_float<kWorkDigits>>;
using BigComplex = boost::multiprecision::cpp_complex<kWorkDigits>;

inline const BigFloat& pi_const() {
    static const BigFloat v = 4 * atan(BigFloat(1));
    return v;
}

inline BigFloat bf(const Rat& x) { return BigFloat(arith::num(x)) / BigFloat(arith::den(x)); }
inline BigFloat bf(const Int& x) { return BigFloat(x); }

inline BigFloat cabs(const BigComplex& z) { return sqrt(z.real() * z.real() + z.imag() * z.imag()); }

inline void check_prec(long prec) {
    if (prec < 1 || prec > kMaxPrec)
        throw std::domain_error("numeric: requested precision must be in [1, " +
                                std::to_string(kMaxPrec) + "]");
}

inline std::string to_digits(const BigFloat& x, long digits) {
    std::ostringstream os;
    os.precision(digits);
    os << x;
    return os.str();
}
inline std::string to_digits(const BigComplex& z, long digits) {
    std::ostringstream os;
    os.precision(digits);
    os << z.real();
    if (z.imag() != 0) {
        os << (z.imag() < 0 ? " - " : " + ");
        BigFloat im = z.imag() < 0 ? BigFloat(-z.imag()) : BigFloat(z.imag());
        os << im << "*i";
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// Gamma via the Spouge series (a = 320 keeps the method error below the
// 240-digit working precision), with reflection for x < 1/2.
// ---------------------------------------------------------------------------

namespace detail {
constexpr int kSpougeA = 320;

inline const std::vector<BigFloat>& spouge_coeffs() {
    static const std::vector<BigFloat> cs = [] {
        std::vector<BigFloat> c(kSpougeA);
        c[0] = sqrt(2 * pi_const());
        BigFloat factorial(1);
        for (int k = 1; k < kSpougeA; ++k) {
            if (k > 1) factorial *= (k - 1);
            BigFloat ak(kSpougeA - k);
            BigFloat term = exp((BigFloat(k) - BigFloat(1) / 2) * log(ak) + ak) / factorial;
            c[static_cast<std::size_t>(k)] = (k % 2 == 1) ? term : -term;
        }
        return c;
    }();
    return cs;
}

inline BigFloat gamma_spouge(const BigFloat& x) { // requires x >= 1/2
    const auto& c = spouge_coeffs();
    BigFloat z = x - 1;
    BigFloat acc = c[0];
    for (int k = 1; k < kSpougeA; ++k) acc += c[static_cast<std::size_t>(k)] / (z + k);
    return exp((z + BigFloat(1) / 2) * log(z + kSpougeA) - (z + kSpougeA)) * acc;
}
} // namespace detail

inline BigFloat gamma(const BigFloat& x, long prec = kMaxPrec) {
    check_prec(prec);
    if (x <= 0 && x == floor(x)) throw std::domain_error("gamma: pole at non-positive integer");
    if (x >= BigFloat(1) / 2) return detail::gamma_spouge(x);
    // reflection: Gamma(x) = pi / (sin(pi x) Gamma(1-x))
    return pi_const() / (sin(pi_const() * x) * detail::gamma_spouge(1 - x));
}

inline BigFloat agm(BigFloat a, BigFloat b) {
    const BigFloat eps = pow(BigFloat(10), -static_cast<int>(kWorkDigits) + 4);
    while (abs(a - b) > eps * abs(a)) {
        BigFloat m = (a + b) / 2;
        b = sqrt(a * b);
        a = m;
    }
    return a;
}

// ---------------------------------------------------------------------------
// Chowla-Selberg periods.
// ---------------------------------------------------------------------------

struct PeriodValue {
    int D = 0;
    BigFloat omega;
    Rat h_prime;
    std::string formula;
};

inline PeriodValue omega_D(int D, long prec = kMaxPrec) {
    check_prec(prec);
    Rat h_prime;
    if (D == -4) h_prime = Rat(1, 2);
    else if (D == -7) h_prime = Rat(1);
    else throw std::domain_error("omega_D: unsupported discriminant (extendable set {-4, -7})");

    long ad = -D;
    // Omega_D = (2 pi |D|)^{-1/2} (prod_j Gamma(j/|D|)^{chi_D(j)})^{1/(2 h')}
    BigFloat log_prod(0);
    for (long j = 1; j < ad; ++j) {
        int chi = arith::kronecker_symbol(D, j);
        if (chi == 0) continue;
        log_prod += chi * log(gamma(BigFloat(j) / ad, prec));
    }
    PeriodValue out;
    out.D = D;
    out.h_prime = h_prime;
    out.omega = exp(log_prod * bf(Rat(1) / (2 * h_prime))) / sqrt(2 * pi_const() * ad);
    out.formula = "(2*pi*" + std::to_string(ad) + ")^(-1/2) * (prod Gamma(j/" + std::to_string(ad) +
                  ")^chi(j))^(1/(2*" + arith::to_string(h_prime) + "))";
    return out;
}

// ---------------------------------------------------------------------------
// CM points and q-series evaluation.
// ---------------------------------------------------------------------------

inline BigComplex cm_point(const std::string& name) {
    if (name == "i") return BigComplex(0, 1);
    if (name == "i/2") return BigComplex(0, BigFloat(1) / 2);
    if (name == "z7") return BigComplex(BigFloat(1) / 2, sqrt(BigFloat(7)) / 2);
    throw std::domain_error("cm_point: unknown point '" + name + "'");
}

// Truncation order sufficient for `prec` digits at height y, assuming
// coefficients of at most moderate polynomial growth.
inline long suggested_order(double y, long prec) {
    double needed = (static_cast<double>(prec) + 30.0) * std::log(10.0) / (2 * 3.14159265358979 * y);
    return static_cast<long>(needed) + 24;
}

inline BigComplex eval_qseries(const QSeries<Rat>& f, const BigComplex& tau0, long prec = kMaxPrec) {
    check_prec(prec);
    if (tau0.imag() <= BigFloat(1) / 1000)
        throw std::domain_error("eval_qseries: Im(tau0) must exceed 1e-3");
    if (f.order() == 0) return BigComplex(0);

    // Heuristic tail bound: |c_n| <= K n^g with g fitted on the known window
    // (floored at 12); requires tail < 10^{-prec-5}.
    {
        double y = tau0.imag().convert_to<double>();
        double r_log10 = -2 * 3.14159265358979 * y / std::log(10.0);
        long n_next = f.off24() / 24 + f.order();
        double g = 12.0, logK = 0.0;
        long j1 = -1, j2 = -1;
        for (long j = f.order() - 1; j >= 0; --j)
            if (f[j] != 0) {
                if (j2 < 0) j2 = j;
                else if (j < (3 * f.order()) / 4) {
                    j1 = j;
                    break;
                }
            }
        auto log10abs = [](const Rat& v) {
            return (std::log10(std::max(1.0, std::abs(arith::num(v).convert_to<double>()))) -
                    std::log10(std::max(1.0, arith::den(v).convert_to<double>())));
        };
        if (j1 > 0 && j2 > j1) {
            double e1 = static_cast<double>(f.off24()) / 24 + j1, e2 = static_cast<double>(f.off24()) / 24 + j2;
            if (e1 > 1 && e2 > e1) {
                double slope = (log10abs(f[j2]) - log10abs(f[j1])) / (std::log10(e2) - std::log10(e1));
                g = std::max(g, slope + 3.0);
            }
        }
        for (long j = 0; j < f.order(); ++j)
            if (f[j] != 0) {
                double e = std::max(1.0, static_cast<double>(f.off24()) / 24 + j);
                logK = std::max(logK, log10abs(f[j]) - g * std::log10(e));
            }
        double ratio_log = g * std::log10(static_cast<double>(n_next) + 1.0) / std::max<double>(n_next, 1) +
                           r_log10; // log10 of per-term ratio bound near n_next
        if (ratio_log > -0.05)
            throw std::domain_error("eval_qseries: truncation insufficient for requested precision");
        double tail_log = logK + g * std::log10(static_cast<double>(n_next)) + n_next * r_log10 -
                          std::log10(-ratio_log * std::log(10.0));
        if (tail_log > -(static_cast<double>(prec) + 5))
            throw std::domain_error("eval_qseries: truncation insufficient for requested precision");
    }

    // q^alpha = exp(-2 pi alpha y) * (cos(2 pi alpha x) + i sin(2 pi alpha x));
    // walk the integer-exponent grid by one complex multiplication per step.
    const BigFloat two_pi = 2 * pi_const();
    BigFloat x = tau0.real(), y = tau0.imag();
    auto q_power = [&](const Rat& alpha) {
        BigFloat a = bf(alpha);
        BigFloat mod = exp(-two_pi * a * y), arg = two_pi * a * x;
        return BigComplex(mod * cos(arg), mod * sin(arg));
    };
    BigComplex q1 = q_power(Rat(1));
    BigComplex qcur = q_power(Rat(f.off24(), 24));
    BigComplex acc(0);
    for (long j = 0; j < f.order(); ++j) {
        if (f[j] != 0) acc += BigComplex(bf(f[j])) * qcur;
        qcur *= q1;
    }
    return acc;
}

// ---------------------------------------------------------------------------
// Raising operator: partial_w g = Dg + w Y g with Y = -1/(4 pi y), DY = -Y^2.
// g is carried as a polynomial in Y with q-series coefficients.
// ---------------------------------------------------------------------------

inline BigComplex raising(const QSeries<Rat>& f, int k2, int n, const BigComplex& tau0,
                          long prec = kMaxPrec) {
    check_prec(prec);
    if (n < 0) throw std::domain_error("raising: n must be >= 0");
    std::vector<QSeries<Rat>> g{f};
    for (int m = 0; m < n; ++m) {
        Rat w = Rat(k2, 2) + 2 * m;
        std::vector<QSeries<Rat>> next(g.size() + 1, f.scaled(Rat(0)));
        for (std::size_t r = 0; r < g.size(); ++r) {
            next[r] = next[r] + D(g[r]);
            next[r + 1] = next[r + 1] + g[r].scaled(w - static_cast<long>(r));
        }
        g = std::move(next);
    }
    BigFloat y0 = tau0.imag();
    BigFloat Y = -1 / (4 * pi_const() * y0);
    BigComplex acc(0);
    BigFloat ypow(1);
    for (std::size_t r = 0; r < g.size(); ++r) {
        acc += eval_qseries(g[r], tau0, prec) * BigComplex(ypow);
        ypow *= Y;
    }
    return acc;
}

// Almost holomorphic value of P(X, Y, Z): substitutes Theta(tau0), F2(tau0),
// E2*(tau0) = E2(tau0) - 3/(pi y0).
inline BigComplex almost_holo_value(const quasimod::WeightedPoly& P, const BigComplex& tau0,
                                    long prec = kMaxPrec) {
    check_prec(prec);
    long order = suggested_order(tau0.imag().convert_to<double>(), prec);
    BigComplex th = eval_qseries(qseries::theta(order), tau0, prec);
    BigComplex f2 = eval_qseries(qseries::F2(order), tau0, prec);
    BigComplex e2s = eval_qseries(qseries::E2(order), tau0, prec) -
                     BigComplex(3 / (pi_const() * tau0.imag()));
    BigComplex acc(0);
    for (const auto& [k, c] : P.terms()) {
        BigComplex term(bf(c));
        for (int i = 0; i < k[0]; ++i) term *= th;
        for (int i = 0; i < k[1]; ++i) term *= f2;
        for (int i = 0; i < k[2]; ++i) term *= e2s;
        acc += term;
    }
    return acc;
}

// ---------------------------------------------------------------------------
// Recognition: LLL-based integer relations and continued fractions.
// ---------------------------------------------------------------------------

namespace detail {

// Lattice reduction (LLL, delta = 3/4) on row vectors with exact arithmetic.
inline void lll_reduce(std::vector<std::vector<Int>>& basis) {
    const std::size_t n = basis.size();
    auto dot = [](const std::vector<Int>& u, const std::vector<Int>& v) {
        Int s = 0;
        for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * v[i];
        return s;
    };
    auto gs = [&](std::vector<std::vector<Rat>>& mu, std::vector<Rat>& B) {
        std::vector<std::vector<Rat>> star(n, std::vector<Rat>(basis[0].size()));
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t c = 0; c < basis[i].size(); ++c) star[i][c] = Rat(basis[i][c]);
            for (std::size_t j = 0; j < i; ++j) {
                Rat num(0);
                for (std::size_t c = 0; c < basis[i].size(); ++c) num += Rat(basis[i][c]) * star[j][c];
                mu[i][j] = B[j] == 0 ? Rat(0) : num / B[j];
                for (std::size_t c = 0; c < star[i].size(); ++c) star[i][c] -= mu[i][j] * star[j][c];
            }
            B[i] = Rat(0);
            for (std::size_t c = 0; c < star[i].size(); ++c) B[i] += star[i][c] * star[i][c];
        }
    };
    std::vector<std::vector<Rat>> mu(n, std::vector<Rat>(n, Rat(0)));
    std::vector<Rat> B(n, Rat(0));
    gs(mu, B);
    auto round_rat = [](const Rat& x) {
        Int two_num = 2 * arith::num(x) + arith::den(x);
        Int den2 = 2 * arith::den(x);
        Int q = two_num / den2;
        if (two_num < 0 && q * den2 != two_num) --q; // floor for negatives
        return q;
    };
    std::size_t k = 1;
    while (k < n) {
        for (std::size_t j = k; j-- > 0;) {
            Int r = round_rat(mu[k][j]);
            if (r != 0) {
                for (std::size_t c = 0; c < basis[k].size(); ++c) basis[k][c] -= r * basis[j][c];
                gs(mu, B);
            }
        }
        if (B[k] >= (Rat(3, 4) - mu[k][k - 1] * mu[k][k - 1]) * B[k - 1]) {
            ++k;
        } else {
            std::swap(basis[k], basis[k - 1]);
            gs(mu, B);
            k = k > 1 ? k - 1 : 1;
        }
    }
    (void)dot;
}

inline Int round_to_int(const BigFloat& x) {
    BigFloat r = floor(x + BigFloat(1) / 2);
    return r.convert_to<Int>();
}

} // namespace detail

// Recognize x as a + b sqrt(d) with denominators <= denom_bound.  d = 0 or 1
// degenerates to rational recognition.
inline QuadRat recognize_quad(const BigFloat& x, long long d, const Int& denom_bound,
                              long prec = 100) {
    check_prec(prec);
    if (d < 0) throw std::domain_error("recognize_quad: d must be a nonnegative square-free integer");

    const BigFloat scale_tol = std::max(BigFloat(abs(x)), BigFloat(1));
    auto residual_ok = [&](const QuadRat& cand) {
        BigFloat approx = bf(cand.a());
        if (cand.b() != 0) approx += bf(cand.b()) * sqrt(BigFloat(cand.d() == 0 ? 1 : cand.d()));
        return abs(x - approx) < pow(BigFloat(10), -static_cast<int>((3 * prec) / 4)) * scale_tol;
    };

    if (d == 0 || d == 1) {
        // continued-fraction path
        BigFloat cur = x;
        Int p0 = 1, p1 = detail::round_to_int(floor(cur)), q0 = 0, q1 = 1;
        cur -= floor(cur);
        QuadRat best{Rat(p1)};
        for (int iter = 0; iter < 400 && q1 <= denom_bound; ++iter) {
            best = QuadRat(Rat(p1, q1));
            if (residual_ok(best)) return best;
            if (cur < pow(BigFloat(10), -static_cast<int>(kWorkDigits) + 8)) break;
            cur = 1 / cur;
            Int a = detail::round_to_int(floor(cur));
            cur -= floor(cur);
            Int p2 = a * p1 + p0, q2 = a * q1 + q0;
            p0 = p1;
            p1 = p2;
            q0 = q1;
            q1 = q2;
        }
        throw std::domain_error("recognize_quad: no rational with denominator <= bound matches");
    }

    // Integer relation P + Q sqrt(d) + R x ~ 0 via LLL on a 3x4 lattice.
    Int S = 1;
    for (long i = 0; i < prec; ++i) S *= 10;
    BigFloat sd = sqrt(BigFloat(d));
    std::vector<std::vector<Int>> basis{
        {1, 0, 0, S},
        {0, 1, 0, detail::round_to_int(BigFloat(S) * sd)},
        {0, 0, 1, detail::round_to_int(BigFloat(S) * x)},
    };
    detail::lll_reduce(basis);
    for (const auto& row : basis) {
        if (row[2] == 0) continue;
        // x ~ -(P + Q sqrt d)/R; keep the constructed denominator positive
        // (boost::rational rejects negative denominators for unbounded types).
        const Int sign = row[2] < 0 ? -1 : 1;
        Int P = -sign * row[0], Q = -sign * row[1], R = sign * row[2];
        QuadRat cand(Rat(P, R), Rat(Q, R), d);
        if (arith::den(cand.a()) > denom_bound || arith::den(cand.b()) > denom_bound) continue;
        if (residual_ok(cand)) return cand;
    }
    throw std::domain_error("recognize_quad: no relation within bounds");
}

// Continued-fraction rational reconstruction with a denominator bound.
inline Rat rational_reconstruct(const BigFloat& x, const Int& den_bound) {
    QuadRat r = recognize_quad(x, 0, den_bound, 80);
    return r.a();
}

} // namespace cmtaylor::numeric
