#pragma once

// Single-variable recursion engine: dehomogenization of isobaric forms to
// p_0(t), derivation of the coefficient polynomials A, B, C from a twist, and
// the second-order recursion
//
//   p_{n+1} = (2k + 4n) A p_n - B p_n' + n (n + k - 1) C p_{n-1},   p_{-1} = 0,
//
// whose values at singular moduli are normalized Taylor coefficients.  Three
// evaluation modes: small-n exact polynomials over Rat, a gcd-free
// integer-scaled exact engine for long sequences, and per-step reduction mod
// p^A for very long congruence scans.

#include "cmtaylor/arith.hpp"
#include "cmtaylor/quasimod.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace cmtaylor::taylor {

using arith::Int;
using arith::QuadRat;
using arith::Rat;
using arith::ResidueQuad;

// Dense univariate polynomials in t, constant term first.
using UPoly = std::vector<Rat>;

inline UPoly trimmed(UPoly p) {
    while (!p.empty() && p.back() == 0) p.pop_back();
    return p;
}

inline UPoly upoly_add(const UPoly& x, const UPoly& y) {
    UPoly r(std::max(x.size(), y.size()), Rat(0));
    for (std::size_t i = 0; i < x.size(); ++i) r[i] += x[i];
    for (std::size_t i = 0; i < y.size(); ++i) r[i] += y[i];
    return trimmed(std::move(r));
}

inline UPoly upoly_scale(UPoly x, const Rat& s) {
    if (s == 0) return {};
    for (Rat& c : x) c *= s;
    return x;
}

inline UPoly upoly_mul(const UPoly& x, const UPoly& y) {
    if (x.empty() || y.empty()) return {};
    UPoly r(x.size() + y.size() - 1, Rat(0));
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] == 0) continue;
        for (std::size_t j = 0; j < y.size(); ++j) r[i + j] += x[i] * y[j];
    }
    return trimmed(std::move(r));
}

inline UPoly upoly_deriv(const UPoly& x) {
    if (x.size() <= 1) return {};
    UPoly r(x.size() - 1);
    for (std::size_t i = 1; i < x.size(); ++i) r[i - 1] = x[i] * Rat(static_cast<long>(i));
    return r;
}

template <class V>
V upoly_eval(const UPoly& p, const V& t) {
    V acc = t - t; // zero of the right ring
    for (std::size_t i = p.size(); i-- > 0;) acc = acc * t + V(p[i]);
    return acc;
}

inline std::string to_string(const UPoly& p) {
    if (p.empty()) return "0";
    std::string s;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] == 0 && p.size() > 1) continue;
        if (!s.empty()) s += " + ";
        s += "(" + arith::to_string(p[i]) + ")";
        if (i == 1) s += "*t";
        else if (i > 1) s += "*t^" + std::to_string(i);
    }
    return s.empty() ? "0" : s;
}

// ---------------------------------------------------------------------------
// Dehomogenization and recursion coefficients.
// ---------------------------------------------------------------------------

// P(X, Y) isobaric of weight k2/2, Z-free  ->  (k2, p0) with
// P = X^{k2} p0(Y/X^4).
inline std::pair<int, UPoly> dehomogenize(const quasimod::WeightedPoly& P) {
    if (!P.z_free()) throw std::domain_error("dehomogenize: input involves Z");
    Rat w = P.weight(); // throws when not isobaric
    Rat two_w = 2 * w;
    if (arith::den(two_w) != 1) throw std::domain_error("dehomogenize: weight is not a multiple of 1/2");
    int k2 = static_cast<int>(arith::num(two_w));
    UPoly p0;
    for (const auto& [key, c] : P.terms()) {
        int ex = key[0], ey = key[1];
        if (ex != k2 - 4 * ey || ex < 0)
            throw std::domain_error("dehomogenize: monomial exponent mismatch");
        if (p0.size() <= static_cast<std::size_t>(ey)) p0.resize(static_cast<std::size_t>(ey) + 1, Rat(0));
        p0[static_cast<std::size_t>(ey)] = c;
    }
    return {k2, trimmed(std::move(p0))};
}

struct RecursionCoeffs {
    UPoly A; // degree <= 1
    UPoly B; // always 16t^2 - t
    UPoly C; // degree <= 2
};

// Distill the univariate coefficients from a derivation table; the derivative
// term -B p' comes from theta(t) = -X^4 B(t) and its shape is forced:
// B(t) = -((c-4a) t + (e-4b) t^2) = 16 t^2 - t for every twist.
inline RecursionCoeffs derive_recursion(const quasimod::DerivationTable& table) {
    Rat a = table.thetaX.coeff(5, 0, 0), b = table.thetaX.coeff(1, 1, 0);
    Rat g = table.thetaY.coeff(8, 0, 0);
    Rat c = table.thetaY.coeff(4, 1, 0), e = table.thetaY.coeff(0, 2, 0);
    if (g != 0 || c - 4 * a != 1 || e - 4 * b != -16)
        throw std::logic_error("derive_recursion: B-shape invariant violated");
    RecursionCoeffs r;
    r.A = trimmed({a, b});
    r.B = {Rat(0), -(c - 4 * a), -(e - 4 * b)};
    r.C = trimmed({table.psi.coeff(8, 0, 0), table.psi.coeff(4, 1, 0), table.psi.coeff(0, 2, 0)});
    return r;
}

// ---------------------------------------------------------------------------
// Presets.
// ---------------------------------------------------------------------------

struct TaylorPreset {
    std::string label;
    quasimod::PhiSpec phi;
    int k2 = 1; // doubled weight of the canonical form
    UPoly A, B, C;
    QuadRat t_eval;
    QuadRat kappa;
    QuadRat prefactor;
    long stride = 1;
    std::string prefactor_note;
    std::string default_form;

    // Discriminant of the quadratic field the evaluation data lives in.
    long long disc() const {
        if (t_eval.d() != 0) return t_eval.d();
        if (kappa.d() != 0) return kappa.d();
        return prefactor.d();
    }
};

inline TaylorPreset preset(const std::string& name) {
    quasimod::PhiSpec phi;
    TaylorPreset ps;
    ps.label = name;
    if (name == "i") {
        phi = {Rat(0), Rat(0)};
        ps.k2 = 1;
        ps.t_eval = QuadRat(Rat(17, 16), Rat(-3, 4), 2);
        ps.kappa = QuadRat(Rat(6), Rat(4), 2); // 2(3 + 2 sqrt(2))
        ps.prefactor = QuadRat(Rat(1));
        ps.stride = 1;
        ps.prefactor_note = "expansion point tau0 = i; t0 = (17-12*sqrt(2))/16; kappa = 2(3+2*sqrt(2))";
        ps.default_form = "theta";
    } else if (name == "i-printed") {
        phi = {Rat(0), Rat(0)};
        ps.k2 = 1;
        ps.t_eval = QuadRat(Rat(17, 16), Rat(3, 4), 2);
        ps.kappa = QuadRat(Rat(6), Rat(-4), 2); // 2(3 - 2 sqrt(2))
        ps.prefactor = QuadRat(Rat(1));
        ps.stride = 1;
        ps.prefactor_note = "Galois-conjugate convention matching the published c(n) table";
        ps.default_form = "theta";
    } else if (name == "z7") {
        phi = {Rat(-1, 42), Rat(-8, 21)};
        ps.k2 = 5;
        ps.t_eval = QuadRat(Rat(-127, 16), Rat(3), 7);
        ps.kappa = QuadRat(Rat(8), Rat(3), 7); // fundamental unit of Q(sqrt(7)); configurable
        ps.prefactor = QuadRat(Rat(3840), Rat(1440), 7); // 480 * (8 + 3 sqrt(7))
        ps.stride = 1;
        ps.prefactor_note = "480*(8+3*sqrt(7)); kappa convention for n >= 1 unresolved in the source table";
        ps.default_form = "h52";
    } else if (name == "romik") {
        phi = {Rat(1, 8), Rat(0)};
        ps.k2 = 1;
        ps.t_eval = QuadRat(Rat(1, 32));
        ps.kappa = QuadRat(Rat(32));
        ps.prefactor = QuadRat(Rat(1));
        ps.stride = 2;
        ps.prefactor_note = "expansion point tau0 = i/2; d(n) = 32^n p_{2n}(1/32)";
        ps.default_form = "theta";
    } else {
        throw std::domain_error("preset: unknown name '" + name + "'");
    }
    ps.phi = phi;
    RecursionCoeffs rc = derive_recursion(quasimod::serre_derivation(phi));
    ps.A = rc.A;
    ps.B = rc.B;
    ps.C = rc.C;
    return ps;
}

inline quasimod::WeightedPoly form_by_name(const std::string& name) {
    using quasimod::WeightedPoly;
    if (name == "theta") return WeightedPoly::X();
    if (name == "f2") return WeightedPoly::Y();
    if (name == "h52")
        return WeightedPoly::monomial(5, 0, 0, Rat(1, 120)) + WeightedPoly::monomial(1, 1, 0, Rat(-1, 6));
    throw std::domain_error("form_by_name: unknown form '" + name + "'");
}

// ---------------------------------------------------------------------------
// Exact engine.
//
// With M = 2 lcm(den A, den C) and D0 = common denominator of p_0, the scaled
// polynomials r_n = D0 M^n p_n satisfy an integer recursion (M A and M^2 C / 2
// are integral; B already is), so no rational normalization ever runs.
// ---------------------------------------------------------------------------

class ScaledRecursion {
public:
    ScaledRecursion(const TaylorPreset& ps, int k2, const UPoly& p0) : k2_(k2) {
        Int m = 2 * lcm_den(ps.A, lcm_den(ps.C, 1));
        d0_ = lcm_den(p0, 1);
        m_ = m;
        ai_ = int_scaled(ps.A, m);
        bi_ = int_scaled(ps.B, m);
        Int m2c_den = 2; // M^2 C / 2
        ci2_ = int_scaled(ps.C, m * m / m2c_den);
        prev_.clear();
        cur_ = int_scaled(p0, d0_);
        scale_ = d0_;
        n_ = 0;
    }

    long n() const { return n_; }
    const std::vector<Int>& raw() const { return cur_; }
    const Int& scale() const { return scale_; } // D0 * M^n

    void step() {
        // r_{n+1} = (k2+4n)(M A) r_n - (M B) r_n' + n(2n+k2-2) (M^2 C / 2) r_{n-1}
        std::vector<Int> next(std::max(cur_.size(), prev_.size()) + 2, Int(0));
        long f1 = k2_ + 4 * n_;
        for (std::size_t i = 0; i < cur_.size(); ++i) {
            if (cur_[i] == 0) continue;
            for (std::size_t j = 0; j < ai_.size(); ++j) next[i + j] += f1 * ai_[j] * cur_[i];
            // -B r' with B = {0, b1, b2}: contribution -(b1 t + b2 t^2) * i t^{i-1}
            if (i >= 1) {
                Int di = cur_[i] * static_cast<long>(i);
                for (std::size_t j = 1; j < bi_.size(); ++j) next[i - 1 + j] -= bi_[j] * di;
            }
        }
        if (n_ >= 1) {
            Int f2 = Int(n_) * (2 * n_ + k2_ - 2);
            for (std::size_t i = 0; i < prev_.size(); ++i) {
                if (prev_[i] == 0) continue;
                for (std::size_t j = 0; j < ci2_.size(); ++j) next[i + j] += f2 * ci2_[j] * prev_[i];
            }
        }
        while (!next.empty() && next.back() == 0) next.pop_back();
        prev_ = std::move(cur_);
        cur_ = std::move(next);
        scale_ *= m_;
        ++n_;
    }

    UPoly current_poly() const {
        Rat s = Rat(1) / Rat(scale());
        UPoly p(cur_.size());
        for (std::size_t i = 0; i < cur_.size(); ++i) p[i] = Rat(cur_[i]) * s;
        return p;
    }

    QuadRat value_at(const QuadRat& t) const {
        QuadRat acc{Rat(0)};
        for (std::size_t i = cur_.size(); i-- > 0;) acc = acc * t + QuadRat(Rat(cur_[i]));
        return acc / QuadRat(Rat(scale()));
    }

private:
    static Int lcm_den(const UPoly& p, Int seed) {
        Int l = seed;
        for (const Rat& c : p) l = boost::multiprecision::lcm(l, arith::den(c));
        return l == 0 ? Int(1) : l;
    }
    static std::vector<Int> int_scaled(const UPoly& p, const Int& s) {
        std::vector<Int> r(p.size());
        for (std::size_t i = 0; i < p.size(); ++i) {
            Rat v = p[i] * Rat(s);
            if (arith::den(v) != 1) throw std::logic_error("ScaledRecursion: scaling failed to clear denominators");
            r[i] = arith::num(v);
        }
        return r;
    }

    int k2_;
    long n_ = 0;
    Int m_, d0_, scale_;
    std::vector<Int> ai_, bi_, ci2_;
    std::vector<Int> prev_, cur_;
};

// All p_0, ..., p_n as exact rational polynomials.
inline std::vector<UPoly> run_recursion(const TaylorPreset& ps, int k2, const UPoly& p0, long n) {
    ScaledRecursion rec(ps, k2, p0);
    std::vector<UPoly> out{rec.current_poly()};
    for (long m = 0; m < n; ++m) {
        rec.step();
        out.push_back(rec.current_poly());
    }
    return out;
}

inline std::vector<UPoly> run_recursion(const TaylorPreset& ps, const quasimod::WeightedPoly& f, long n) {
    auto [k2, p0] = dehomogenize(f);
    return run_recursion(ps, k2, p0, n);
}

// p_n(t_eval), exact.
inline QuadRat taylor_value(const TaylorPreset& ps, const quasimod::WeightedPoly& f, long n) {
    auto [k2, p0] = dehomogenize(f);
    ScaledRecursion rec(ps, k2, p0);
    for (long m = 0; m < n; ++m) rec.step();
    return rec.value_at(ps.t_eval);
}

struct CoeffSeq {
    std::string preset_label;
    std::string form_label;
    long n_start = 0;
    std::vector<QuadRat> values; // values[i] is coefficient n_start + i
};

// value(n) = prefactor * kappa^n * p_{stride n}(t_eval).
inline CoeffSeq normalized_sequence(const TaylorPreset& ps, const quasimod::WeightedPoly& f, long count,
                                    const std::string& form_label = "") {
    auto [k2, p0] = dehomogenize(f);
    ScaledRecursion rec(ps, k2, p0);
    CoeffSeq seq;
    seq.preset_label = ps.label;
    seq.form_label = form_label;
    QuadRat kpow{Rat(1)};
    for (long n = 0; n < count; ++n) {
        while (rec.n() < ps.stride * n) rec.step();
        seq.values.push_back(ps.prefactor * kpow * rec.value_at(ps.t_eval));
        kpow = kpow * ps.kappa;
    }
    return seq;
}

// ---------------------------------------------------------------------------
// Modular engine: the same recursion with coefficients reduced mod p^A each
// step.  Requires p coprime to every denominator of A, C, and p_0.
// ---------------------------------------------------------------------------

class ModRecursion {
public:
    ModRecursion(const TaylorPreset& ps, int k2, const UPoly& p0, std::int64_t p, int a)
        : k2_(k2), m_(arith::pow_i64(p, a)) {
        ai_ = reduce_poly(ps.A);
        bi_ = reduce_poly(ps.B);
        ci_ = reduce_poly(ps.C);
        inv2_ = arith::invmod_i64(2, m_);
        cur_ = reduce_poly(p0);
        n_ = 0;
    }

    std::int64_t modulus() const { return m_; }
    long n() const { return n_; }
    const std::vector<std::int64_t>& poly() const { return cur_; }

    void step() {
        using arith::mod_i64;
        using arith::mulmod_i64;
        std::vector<std::int64_t> next(std::max(cur_.size(), prev_.size()) + 2, 0);
        std::int64_t f1 = mod_i64(k2_ + 4 * n_, m_);
        for (std::size_t i = 0; i < cur_.size(); ++i) {
            if (cur_[i] == 0) continue;
            std::int64_t fc = mulmod_i64(f1, cur_[i], m_);
            for (std::size_t j = 0; j < ai_.size(); ++j)
                next[i + j] = mod_i64(next[i + j] + mulmod_i64(fc, ai_[j], m_), m_);
            if (i >= 1) {
                std::int64_t di = mulmod_i64(mod_i64(static_cast<std::int64_t>(i), m_), cur_[i], m_);
                for (std::size_t j = 1; j < bi_.size(); ++j)
                    next[i - 1 + j] = mod_i64(next[i - 1 + j] - mulmod_i64(bi_[j], di, m_), m_);
            }
        }
        if (n_ >= 1) {
            std::int64_t f2 = mulmod_i64(mod_i64(n_, m_), mod_i64(2 * n_ + k2_ - 2, m_), m_);
            f2 = mulmod_i64(f2, inv2_, m_);
            for (std::size_t i = 0; i < prev_.size(); ++i) {
                if (prev_[i] == 0) continue;
                std::int64_t fc = mulmod_i64(f2, prev_[i], m_);
                for (std::size_t j = 0; j < ci_.size(); ++j)
                    next[i + j] = mod_i64(next[i + j] + mulmod_i64(fc, ci_[j], m_), m_);
            }
        }
        while (!next.empty() && next.back() == 0) next.pop_back();
        prev_ = std::move(cur_);
        cur_ = std::move(next);
        ++n_;
    }

    // Evaluate the current polynomial at a quadratic residue point.
    ResidueQuad value_at(const ResidueQuad& t) const {
        ResidueQuad acc(t.p, t.A, t.d, 0, 0);
        for (std::size_t i = cur_.size(); i-- > 0;)
            acc = acc * t + ResidueQuad(t.p, t.A, t.d, cur_[i], 0);
        return acc;
    }

private:
    std::vector<std::int64_t> reduce_poly(const UPoly& p) const {
        std::vector<std::int64_t> r(p.size());
        for (std::size_t i = 0; i < p.size(); ++i) r[i] = arith::reduce_rat(p[i], m_);
        while (!r.empty() && r.back() == 0) r.pop_back();
        return r;
    }

    int k2_;
    std::int64_t m_;
    long n_ = 0;
    std::vector<std::int64_t> ai_, bi_, ci_;
    std::int64_t inv2_ = 1;
    std::vector<std::int64_t> prev_, cur_;
};

} // namespace cmtaylor::taylor
