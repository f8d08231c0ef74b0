#pragma once

// Truncated q-expansions over a generic exact coefficient ring, on the
// exponent grid (offset/24) + Z>=0.  The 1/24 granularity exists solely for
// the Dedekind eta function; every assembled modular form used downstream
// lands back on the integer grid, which callers may assert.

#include "cmtaylor/arith.hpp"

#include <algorithm>
#include <vector>

namespace cmtaylor::qseries {

using arith::Int;
using arith::Rat;
using arith::QuadRat;
using arith::ResidueQuad;

// Ring adaptors: build a scalar of ring R (using `model` for ring context)
// from an exact rational, and invert a unit.
inline Rat ring_scalar(const Rat&, const Rat& v) { return v; }
inline QuadRat ring_scalar(const QuadRat&, const Rat& v) { return QuadRat(v); }
inline ResidueQuad ring_scalar(const ResidueQuad& model, const Rat& v) {
    return ResidueQuad(model.p, model.A, model.d, arith::reduce_rat(v, model.m), 0);
}
inline Rat ring_inverse(const Rat& x) {
    if (x == 0) throw std::domain_error("QSeries: leading coefficient not invertible");
    return 1 / x;
}
inline QuadRat ring_inverse(const QuadRat& x) { return x.inverse(); }
inline ResidueQuad ring_inverse(const ResidueQuad& x) { return x.inverse(); }

template <class R>
class QSeries {
public:
    QSeries() : off24_(0) {}
    QSeries(long off24, std::vector<R> coeffs) : off24_(off24), c_(std::move(coeffs)) {}

    long off24() const { return off24_; }
    long order() const { return static_cast<long>(c_.size()); }
    const std::vector<R>& coeffs() const { return c_; }
    const R& operator[](long j) const { return c_.at(static_cast<std::size_t>(j)); }

    bool integer_grid() const { return off24_ % 24 == 0; }

    // Coefficient of q^n (integer exponent); zero off the known window is an
    // error only beyond the truncation order.
    const R& at_exponent(long n) const {
        if (!integer_grid()) throw std::domain_error("QSeries: fractional grid has no integer exponents");
        long j = n - off24_ / 24;
        if (j < 0 || j >= order()) throw std::out_of_range("QSeries: exponent beyond truncation");
        return c_[static_cast<std::size_t>(j)];
    }

    friend QSeries operator+(const QSeries& x, const QSeries& y) { return combine(x, y, false); }
    friend QSeries operator-(const QSeries& x, const QSeries& y) { return combine(x, y, true); }

    friend QSeries operator*(const QSeries& x, const QSeries& y) {
        long n = std::min(x.order(), y.order());
        std::vector<R> c;
        if (n > 0) {
            c.assign(static_cast<std::size_t>(n), ring_scalar(x.c_[0], Rat(0)));
            for (long i = 0; i < n; ++i) {
                if (is_zero_coeff(x.c_[i])) continue;
                for (long j = 0; i + j < n; ++j)
                    c[static_cast<std::size_t>(i + j)] = c[static_cast<std::size_t>(i + j)] +
                        x.c_[static_cast<std::size_t>(i)] * y.c_[static_cast<std::size_t>(j)];
            }
        }
        return QSeries(x.off24_ + y.off24_, std::move(c));
    }

    QSeries scaled(const R& s) const {
        std::vector<R> c = c_;
        for (R& v : c) v = v * s;
        return QSeries(off24_, std::move(c));
    }
    QSeries scaled(const Rat& s) const
        requires(!std::is_same_v<R, Rat>)
    {
        if (c_.empty()) return *this;
        return scaled(ring_scalar(c_[0], s));
    }

    QSeries operator-() const {
        if (c_.empty()) return *this;
        return scaled(ring_scalar(c_[0], Rat(-1)));
    }

    QSeries pow(long e) const {
        if (e < 0) return inverse().pow(-e);
        if (c_.empty()) return *this;
        QSeries acc = one_like(*this);
        QSeries base = *this;
        for (; e > 0; e >>= 1) {
            if (e & 1) acc = acc * base;
            if (e > 1) base = base * base;
        }
        return acc;
    }

    // Power-series inversion of the unit part after factoring the leading
    // monomial: throws when the leading coefficient is not a unit.
    QSeries inverse() const {
        if (c_.empty()) throw std::domain_error("QSeries: cannot invert empty series");
        long n = order();
        std::vector<R> b(static_cast<std::size_t>(n), ring_scalar(c_[0], Rat(0)));
        R lead_inv = ring_inverse(c_[0]);
        b[0] = lead_inv;
        for (long k = 1; k < n; ++k) {
            R acc = ring_scalar(c_[0], Rat(0));
            for (long j = 1; j <= k; ++j)
                acc = acc + c_[static_cast<std::size_t>(j)] * b[static_cast<std::size_t>(k - j)];
            b[static_cast<std::size_t>(k)] = ring_scalar(c_[0], Rat(0)) - acc * lead_inv;
        }
        return QSeries(-off24_, std::move(b));
    }

    friend QSeries operator/(const QSeries& x, const QSeries& y) { return x * y.inverse(); }

    // Substitute q -> q^m.
    QSeries rescale(long m) const {
        if (m < 1) throw std::domain_error("QSeries: rescale factor must be positive");
        if (m == 1 || c_.empty()) return QSeries(off24_ * m, c_);
        std::vector<R> c(static_cast<std::size_t>((order() - 1) * m + 1), ring_scalar(c_[0], Rat(0)));
        for (long j = 0; j < order(); ++j) c[static_cast<std::size_t>(j * m)] = c_[static_cast<std::size_t>(j)];
        return QSeries(off24_ * m, std::move(c));
    }

    QSeries truncated(long n) const {
        std::vector<R> c(c_.begin(), c_.begin() + std::min<long>(n, order()));
        return QSeries(off24_, std::move(c));
    }

    // Two series agree on the overlap of their known windows.
    friend bool agree(const QSeries& x, const QSeries& y) {
        if ((x.off24_ - y.off24_) % 24 != 0) return false;
        long lo = std::max(x.off24_, y.off24_);
        long hi = std::min(x.off24_ + 24 * x.order(), y.off24_ + 24 * y.order());
        for (long e = lo; e < hi; e += 24) {
            const R& xv = x.c_[static_cast<std::size_t>((e - x.off24_) / 24)];
            const R& yv = y.c_[static_cast<std::size_t>((e - y.off24_) / 24)];
            if (!(xv == yv)) return false;
        }
        // Leading coefficients outside the overlap must vanish.
        for (long e = x.off24_; e < std::min(lo, x.off24_ + 24 * x.order()); e += 24)
            if (!is_zero_coeff(x.c_[static_cast<std::size_t>((e - x.off24_) / 24)])) return false;
        for (long e = y.off24_; e < std::min(lo, y.off24_ + 24 * y.order()); e += 24)
            if (!is_zero_coeff(y.c_[static_cast<std::size_t>((e - y.off24_) / 24)])) return false;
        return true;
    }

private:
    static bool is_zero_coeff(const R& v) {
        if constexpr (std::is_same_v<R, Rat>) return v == 0;
        else return v.is_zero();
    }

    static QSeries one_like(const QSeries& model) {
        std::vector<R> c(static_cast<std::size_t>(model.order()), ring_scalar(model.c_[0], Rat(0)));
        c[0] = ring_scalar(model.c_[0], Rat(1));
        return QSeries(0, std::move(c));
    }

    static QSeries combine(const QSeries& x, const QSeries& y, bool subtract) {
        if ((x.off24_ - y.off24_) % 24 != 0)
            throw std::domain_error("QSeries: addition requires a common fractional grid");
        if (x.c_.empty()) return subtract ? -y : y;
        if (y.c_.empty()) return x;
        long off = std::min(x.off24_, y.off24_);
        long hi = std::min(x.off24_ + 24 * x.order(), y.off24_ + 24 * y.order());
        long n = (hi - off) / 24;
        std::vector<R> c(static_cast<std::size_t>(std::max<long>(n, 0)), ring_scalar(x.c_[0], Rat(0)));
        for (long j = 0; j < n; ++j) {
            long e = off + 24 * j;
            R v = ring_scalar(x.c_[0], Rat(0));
            long jx = (e - x.off24_) / 24;
            long jy = (e - y.off24_) / 24;
            if (jx >= 0 && jx < x.order()) v = v + x.c_[static_cast<std::size_t>(jx)];
            if (jy >= 0 && jy < y.order()) {
                if (subtract) v = v - y.c_[static_cast<std::size_t>(jy)];
                else v = v + y.c_[static_cast<std::size_t>(jy)];
            }
            c[static_cast<std::size_t>(j)] = v;
        }
        return QSeries(off, std::move(c));
    }

    long off24_;
    std::vector<R> c_;
};

// D = q d/dq: multiplies the coefficient of q^alpha by alpha (offset-aware).
template <class R>
QSeries<R> D(const QSeries<R>& f) {
    std::vector<R> c(f.coeffs());
    for (long j = 0; j < f.order(); ++j) {
        Rat alpha = Rat(f.off24() + 24 * j) / 24;
        c[static_cast<std::size_t>(j)] = c[static_cast<std::size_t>(j)] * ring_scalar(c[static_cast<std::size_t>(j)], alpha);
    }
    return QSeries<R>(f.off24(), std::move(c));
}

// ---------------------------------------------------------------------------
// Standard series over Rat.
// ---------------------------------------------------------------------------

inline Rat bernoulli(int k) {
    static std::vector<Rat> cache{Rat(1)};
    while (static_cast<int>(cache.size()) <= k) {
        int n = static_cast<int>(cache.size());
        // sum_{j=0}^{n} C(n+1, j) B_j = 0
        Rat acc(0);
        Int binom = 1;                     // C(n+1, 0)
        for (int j = 0; j < n; ++j) {
            acc += Rat(binom) * cache[static_cast<std::size_t>(j)];
            binom = binom * (n + 1 - j) / (j + 1);
        }
        cache.push_back(-acc / Rat(binom));   // binom = C(n+1, n) = n+1
    }
    return cache[static_cast<std::size_t>(k)];
}

// Divisor power sums sigma_e(1..N-1) by sieve.
inline std::vector<Int> sigma_table(int e, long n) {
    std::vector<Int> s(static_cast<std::size_t>(std::max<long>(n, 1)), Int(0));
    for (long d = 1; d < n; ++d) {
        Int dpow = 1;
        for (int i = 0; i < e; ++i) dpow *= d;
        for (long m = d; m < n; m += d) s[static_cast<std::size_t>(m)] += dpow;
    }
    return s;
}

inline QSeries<Rat> theta(long n) {
    std::vector<Rat> c(static_cast<std::size_t>(n), Rat(0));
    c[0] = 1;
    for (long k = 1; k * k < n; ++k) c[static_cast<std::size_t>(k * k)] = 2;
    return QSeries<Rat>(0, std::move(c));
}

// Euler product prod (1 - q^m) via the pentagonal number theorem.
inline QSeries<Rat> euler_product(long n) {
    std::vector<Rat> c(static_cast<std::size_t>(n), Rat(0));
    for (long k = 0;; ++k) {
        long e1 = k * (3 * k - 1) / 2, e2 = k * (3 * k + 1) / 2;
        if (e1 >= n && e2 >= n) break;
        Rat s = (k % 2 == 0) ? 1 : -1;
        if (e1 < n) c[static_cast<std::size_t>(e1)] += s;
        if (k > 0 && e2 < n) c[static_cast<std::size_t>(e2)] += s;
    }
    return QSeries<Rat>(0, std::move(c));
}

// eta(m tau) as a series in q = e^{2 pi i tau}; offset m/24.
inline QSeries<Rat> eta(long m, long n) {
    if (m < 1) throw std::domain_error("eta: level must be positive");
    QSeries<Rat> e = euler_product(n).rescale(m).truncated(n);
    return QSeries<Rat>(m + e.off24(), e.coeffs());
}

inline QSeries<Rat> F2(long n) {
    auto s1 = sigma_table(1, n);
    std::vector<Rat> c(static_cast<std::size_t>(n), Rat(0));
    for (long m = 1; m < n; m += 2) c[static_cast<std::size_t>(m)] = Rat(s1[static_cast<std::size_t>(m)]);
    return QSeries<Rat>(0, std::move(c));
}

inline QSeries<Rat> E2(long n) {
    auto s1 = sigma_table(1, n);
    std::vector<Rat> c(static_cast<std::size_t>(n), Rat(0));
    c[0] = 1;
    for (long m = 1; m < n; ++m) c[static_cast<std::size_t>(m)] = Rat(-24) * Rat(s1[static_cast<std::size_t>(m)]);
    return QSeries<Rat>(0, std::move(c));
}

inline QSeries<Rat> Ek(int k, long n) {
    if (k < 4 || k % 2 != 0) throw std::domain_error("Ek: weight must be even and >= 4");
    Rat factor = Rat(-2 * k) / bernoulli(k);
    auto s = sigma_table(k - 1, n);
    std::vector<Rat> c(static_cast<std::size_t>(n), Rat(0));
    c[0] = 1;
    for (long m = 1; m < n; ++m) c[static_cast<std::size_t>(m)] = factor * Rat(s[static_cast<std::size_t>(m)]);
    return QSeries<Rat>(0, std::move(c));
}

inline QSeries<Rat> delta(long n) {
    QSeries<Rat> d = eta(1, n).pow(24);
    if (!d.integer_grid()) throw std::logic_error("delta: expected integer grid");
    return d;
}

// Cohen-Eisenstein series of weight 5/2: (Theta^5 - 20 Theta F2)/120.
inline QSeries<Rat> H52(long n) {
    QSeries<Rat> th = theta(n);
    return (th.pow(5) - (th * F2(n)).scaled(Rat(20))).scaled(Rat(1) / 120);
}

} // namespace cmtaylor::qseries
