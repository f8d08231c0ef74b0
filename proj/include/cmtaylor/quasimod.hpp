#pragma once

// Quasimodular polynomial algebra for level 4: Q[X, Y, Z] with
//   X = Theta   (weight 1/2),
//   Y = F_2     (weight 2),
//   Z = E_2     (quasi-weight 2, depth 1),
// the Ramanujan-style derivation D = q d/dq on generators, and the twisted
// Serre derivation attached to a weight-2 twist phi = Z/12 + a4 X^4 + aY Y.

#include "cmtaylor/arith.hpp"
#include "cmtaylor/qseries.hpp"

#include <array>
#include <map>
#include <optional>
#include <sstream>
#include <vector>

namespace cmtaylor::quasimod {

using arith::Rat;
using qseries::QSeries;

class WeightedPoly {
public:
    using Key = std::array<int, 3>; // exponents of (X, Y, Z)

    WeightedPoly() = default;

    static WeightedPoly monomial(int ex, int ey, int ez, const Rat& c) {
        WeightedPoly p;
        if (c != 0) p.terms_[{ex, ey, ez}] = c;
        return p;
    }
    static WeightedPoly X() { return monomial(1, 0, 0, 1); }
    static WeightedPoly Y() { return monomial(0, 1, 0, 1); }
    static WeightedPoly Z() { return monomial(0, 0, 1, 1); }

    const std::map<Key, Rat>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    Rat coeff(int ex, int ey, int ez) const {
        auto it = terms_.find({ex, ey, ez});
        return it == terms_.end() ? Rat(0) : it->second;
    }

    // Z-degree (quasimodular depth).
    int depth() const {
        int d = 0;
        for (const auto& [k, c] : terms_) d = std::max(d, k[2]);
        return d;
    }
    bool z_free() const { return depth() == 0; }

    // Weight of a monomial: ex/2 + 2 ey + 2 ez.
    static Rat monomial_weight(const Key& k) { return Rat(k[0], 2) + 2 * k[1] + 2 * k[2]; }

    bool is_isobaric() const {
        std::optional<Rat> w;
        for (const auto& [k, c] : terms_) {
            Rat mw = monomial_weight(k);
            if (!w) w = mw;
            else if (*w != mw) return false;
        }
        return true;
    }

    // Weight of an isobaric polynomial (throws otherwise; zero has weight 0).
    Rat weight() const {
        if (!is_isobaric()) throw std::domain_error("WeightedPoly: not isobaric");
        return terms_.empty() ? Rat(0) : monomial_weight(terms_.begin()->first);
    }

    friend WeightedPoly operator+(const WeightedPoly& x, const WeightedPoly& y) {
        WeightedPoly r = x;
        for (const auto& [k, c] : y.terms_) r.add_term(k, c);
        return r;
    }
    friend WeightedPoly operator-(const WeightedPoly& x, const WeightedPoly& y) {
        WeightedPoly r = x;
        for (const auto& [k, c] : y.terms_) r.add_term(k, -c);
        return r;
    }
    friend WeightedPoly operator*(const WeightedPoly& x, const WeightedPoly& y) {
        WeightedPoly r;
        for (const auto& [kx, cx] : x.terms_)
            for (const auto& [ky, cy] : y.terms_)
                r.add_term({kx[0] + ky[0], kx[1] + ky[1], kx[2] + ky[2]}, cx * cy);
        return r;
    }
    WeightedPoly scaled(const Rat& s) const {
        WeightedPoly r;
        if (s == 0) return r;
        for (const auto& [k, c] : terms_) r.terms_[k] = c * s;
        return r;
    }
    WeightedPoly operator-() const { return scaled(-1); }

    WeightedPoly pow(int e) const {
        if (e < 0) throw std::domain_error("WeightedPoly: negative power");
        WeightedPoly acc = monomial(0, 0, 0, 1);
        WeightedPoly base = *this;
        for (; e > 0; e >>= 1) {
            if (e & 1) acc = acc * base;
            if (e > 1) base = base * base;
        }
        return acc;
    }

    // Partial derivative with respect to variable v (0 = X, 1 = Y, 2 = Z).
    WeightedPoly partial(int v) const {
        WeightedPoly r;
        for (const auto& [k, c] : terms_) {
            if (k[static_cast<std::size_t>(v)] == 0) continue;
            Key nk = k;
            --nk[static_cast<std::size_t>(v)];
            r.add_term(nk, c * k[static_cast<std::size_t>(v)]);
        }
        return r;
    }

    friend bool operator==(const WeightedPoly& x, const WeightedPoly& y) { return x.terms_ == y.terms_; }

private:
    void add_term(const Key& k, const Rat& c) {
        if (c == 0) return;
        auto [it, inserted] = terms_.try_emplace(k, c);
        if (!inserted) {
            it->second += c;
            if (it->second == 0) terms_.erase(it);
        }
    }

    std::map<Key, Rat> terms_;
};

// Canonical rendering: terms sorted by (weight, lexicographic exponents).
inline std::string to_string(const WeightedPoly& f) {
    if (f.is_zero()) return "0";
    std::vector<std::pair<std::pair<Rat, WeightedPoly::Key>, Rat>> rows;
    for (const auto& [k, c] : f.terms()) rows.push_back({{WeightedPoly::monomial_weight(k), k}, c});
    std::sort(rows.begin(), rows.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::ostringstream os;
    bool first = true;
    for (const auto& [wk, c] : rows) {
        if (!first) os << " + ";
        first = false;
        os << "(" << arith::to_string(c) << ")";
        const auto& k = wk.second;
        static const char* names[3] = {"X", "Y", "Z"};
        for (int v = 0; v < 3; ++v) {
            if (k[static_cast<std::size_t>(v)] == 0) continue;
            os << "*" << names[v];
            if (k[static_cast<std::size_t>(v)] > 1) os << "^" << k[static_cast<std::size_t>(v)];
        }
    }
    return os.str();
}

// The weight-2 twist phi = Z/12 + a4 X^4 + aY Y.
struct PhiSpec {
    Rat a4;
    Rat aY;

    WeightedPoly phi() const {
        return WeightedPoly::monomial(0, 0, 1, Rat(1, 12)) + WeightedPoly::monomial(4, 0, 0, a4) +
               WeightedPoly::monomial(0, 1, 0, aY);
    }
};

// D on generators:
//   D X = (80 X Y - X^5)/24 + X Z / 24
//   D Y = (5 X^4 Y - 16 Y^2)/6 + Y Z / 6
//   D Z = (Z^2 - E4)/12,   E4 = X^8 + 224 X^4 Y + 256 Y^2.
inline const WeightedPoly& DX_table() {
    static const WeightedPoly t = WeightedPoly::monomial(1, 1, 0, Rat(80, 24)) +
                                  WeightedPoly::monomial(5, 0, 0, Rat(-1, 24)) +
                                  WeightedPoly::monomial(1, 0, 1, Rat(1, 24));
    return t;
}
inline const WeightedPoly& DY_table() {
    static const WeightedPoly t = WeightedPoly::monomial(4, 1, 0, Rat(5, 6)) +
                                  WeightedPoly::monomial(0, 2, 0, Rat(-16, 6)) +
                                  WeightedPoly::monomial(0, 1, 1, Rat(1, 6));
    return t;
}
inline WeightedPoly E4_poly() {
    return WeightedPoly::monomial(8, 0, 0, 1) + WeightedPoly::monomial(4, 1, 0, 224) +
           WeightedPoly::monomial(0, 2, 0, 256);
}
inline const WeightedPoly& DZ_table() {
    static const WeightedPoly t =
        (WeightedPoly::Z() * WeightedPoly::Z() - E4_poly()).scaled(Rat(1, 12));
    return t;
}

// D f = f_X DX + f_Y DY + f_Z DZ.
inline WeightedPoly D_poly(const WeightedPoly& f) {
    return f.partial(0) * DX_table() + f.partial(1) * DY_table() + f.partial(2) * DZ_table();
}

// Twisted Serre derivation on isobaric f of weight k: theta_phi f = D f - k phi f.
// Maps weight k to weight k + 2 and preserves Z-freeness.
inline WeightedPoly serre_apply(const WeightedPoly& f, const PhiSpec& spec) {
    Rat k = f.weight();
    return D_poly(f) - spec.phi().scaled(k) * f;
}

// psi = D phi - phi^2 (always Z-free; the inhomogeneous term of the
// second-order iteration).
inline WeightedPoly psi_poly(const PhiSpec& spec) {
    WeightedPoly phi = spec.phi();
    return D_poly(phi) - phi * phi;
}

// theta^[n] f via  theta^[m+1] f = theta(theta^[m] f) + m (k + m - 1) psi theta^[m-1] f.
// Returns the whole ladder theta^[0] f, ..., theta^[n] f.
inline std::vector<WeightedPoly> iterate_serre_all(const WeightedPoly& f, const PhiSpec& spec, int n) {
    Rat k = f.weight();
    WeightedPoly psi = psi_poly(spec);
    std::vector<WeightedPoly> out{f};
    for (int m = 0; m < n; ++m) {
        WeightedPoly next = serre_apply(out.back(), spec);
        if (m >= 1) next = next + psi.scaled(Rat(m) * (k + m - 1)) * out[static_cast<std::size_t>(m - 1)];
        out.push_back(std::move(next));
    }
    return out;
}

inline WeightedPoly iterate_serre(const WeightedPoly& f, const PhiSpec& spec, int n) {
    return iterate_serre_all(f, spec, n).back();
}

// q-expansion of f(Theta, F2, E2) to order n.
inline QSeries<Rat> to_qseries(const WeightedPoly& f, long n) {
    QSeries<Rat> th = qseries::theta(n), f2 = qseries::F2(n), e2 = qseries::E2(n);
    std::vector<Rat> one(static_cast<std::size_t>(n), Rat(0));
    one[0] = 1;
    const QSeries<Rat> unit(0, std::move(one));
    QSeries<Rat> acc = unit.scaled(Rat(0));
    for (const auto& [k, c] : f.terms()) {
        QSeries<Rat> term = unit;
        if (k[0] > 0) term = term * th.pow(k[0]);
        if (k[1] > 0) term = term * f2.pow(k[1]);
        if (k[2] > 0) term = term * e2.pow(k[2]);
        acc = acc + term.scaled(c);
    }
    return acc;
}

// Write a weight-w holomorphic form (w a nonnegative multiple of 1/2) as an
// isobaric polynomial in X, Y.  The basis X^{2w-4b} Y^b is triangular against
// leading exponents: X^{2w-4b} Y^b = q^b + O(q^{b+1}).
inline WeightedPoly express_in_basis(const QSeries<Rat>& f, const Rat& w) {
    Rat two_w = 2 * w;
    if (arith::den(two_w) != 1 || two_w < 0)
        throw std::domain_error("express_in_basis: weight must be a nonnegative multiple of 1/2");
    int k2 = static_cast<int>(arith::num(two_w));
    if (!f.integer_grid() || f.off24() < 0)
        throw std::domain_error("express_in_basis: series must live on q^0, q^1, ...");
    long n = f.off24() / 24 + f.order();
    long need = k2 / 4 + 2;
    if (n < need) throw std::domain_error("express_in_basis: truncation order too small");

    QSeries<Rat> th = qseries::theta(n), f2 = qseries::F2(n);
    std::vector<Rat> resid(static_cast<std::size_t>(n), Rat(0));
    for (long j = 0; j < f.order(); ++j) resid[static_cast<std::size_t>(f.off24() / 24 + j)] = f[j];

    WeightedPoly out;
    for (int b = 0; 4 * b <= k2; ++b) {
        Rat c = resid[static_cast<std::size_t>(b)];
        if (c == 0) continue;
        out = out + WeightedPoly::monomial(k2 - 4 * b, b, 0, c);
        QSeries<Rat> basis = th.pow(k2 - 4 * b) * f2.pow(b);
        for (long j = 0; j < n; ++j) resid[static_cast<std::size_t>(j)] -= c * basis.at_exponent(j);
    }
    for (long j = 0; j < n; ++j)
        if (resid[static_cast<std::size_t>(j)] != 0)
            throw std::domain_error("express_in_basis: series is not modular of weight " +
                                    arith::to_string(w) + " on this algebra");
    return out;
}

// The three generating images of the twisted derivation, dehomogenization-
// ready.  Built symbolically and re-derived from q-expansions; a mismatch or
// a surviving Z term indicates an implementation fault, hence logic_error.
struct DerivationTable {
    PhiSpec spec;
    WeightedPoly thetaX; // weight 5/2, in span{X^5, XY}
    WeightedPoly thetaY; // weight 4,   in span{X^4 Y, Y^2}
    WeightedPoly psi;    // weight 4,   in span{X^8, X^4 Y, Y^2}
};

inline DerivationTable serre_derivation(const PhiSpec& spec) {
    DerivationTable t{spec, serre_apply(WeightedPoly::X(), spec), serre_apply(WeightedPoly::Y(), spec),
                      psi_poly(spec)};
    if (!t.thetaX.z_free() || !t.thetaY.z_free() || !t.psi.z_free())
        throw std::logic_error("serre_derivation: Z part failed to cancel");
    for (const auto& [k, c] : t.thetaX.terms())
        if (!(k == WeightedPoly::Key{5, 0, 0} || k == WeightedPoly::Key{1, 1, 0}))
            throw std::logic_error("serre_derivation: thetaX outside span{X^5, XY}");

    // Independent re-derivation on q-expansions.
    const long n = 16;
    auto phi_q = to_qseries(spec.phi(), n);
    auto th = qseries::theta(n);
    auto f2 = qseries::F2(n);
    if (!(express_in_basis(D(th) - (phi_q * th).scaled(Rat(1, 2)), Rat(5, 2)) == t.thetaX))
        throw std::logic_error("serre_derivation: thetaX disagrees with its q-expansion");
    if (!(express_in_basis(D(f2) - (phi_q * f2).scaled(Rat(2)), Rat(4)) == t.thetaY))
        throw std::logic_error("serre_derivation: thetaY disagrees with its q-expansion");
    if (!(express_in_basis(D(phi_q) - phi_q * phi_q, Rat(4)) == t.psi))
        throw std::logic_error("serre_derivation: psi disagrees with its q-expansion");
    return t;
}

} // namespace cmtaylor::quasimod
