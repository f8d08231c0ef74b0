#pragma once

// Reduction of exact coefficient sequences modulo prime powers and detection /
// verification of eventual quasi-periodicity with a unit multiplier:
// s(n + ell) = b * s(n) mod p^A for all n >= mu.

#include "cmtaylor/arith.hpp"
#include "cmtaylor/taylor.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace cmtaylor::congruence {

using arith::Int;
using arith::QuadRat;
using arith::Rat;
using arith::ResidueQuad;

struct PeriodicityReport {
    std::int64_t p = 0;
    int A = 0;
    long preperiod = 0; // mu
    long period = 1;    // ell
    ResidueQuad multiplier;
    std::vector<ResidueQuad> cycle; // s(mu), ..., s(mu + ell - 1)
    long horizon = 0;               // number of residues examined
    bool vanishing = false;         // all residues zero from mu on
    long unrolled_period = 1;       // ell * mult_order(multiplier)
};

// Componentwise reduction; throws when p divides a denominator.
inline std::vector<ResidueQuad> reduce_sequence(const taylor::CoeffSeq& seq, std::int64_t p,
                                                int A) {
    std::int64_t d_hint = 0;
    for (const QuadRat& v : seq.values)
        if (v.d() != 0) {
            d_hint = v.d();
            break;
        }
    std::vector<ResidueQuad> out;
    out.reserve(seq.values.size());
    for (const QuadRat& v : seq.values) out.push_back(arith::reduce_mod(v, p, A, d_hint));
    return out;
}

// Smallest index from which every residue vanishes (= size when s back is
// nonzero).
inline long zero_tail_start(const std::vector<ResidueQuad>& s) {
    long mu = static_cast<long>(s.size());
    while (mu > 0 && s[static_cast<std::size_t>(mu - 1)].is_zero()) --mu;
    return mu;
}

// Exhaustive minimal-(mu, ell) search.  For each candidate period the
// multiplier is anchored on the last unit ratio of the tail and the tail is
// scanned backwards, so rejected periods cost near-constant time.
//
// Sequences whose tail contains no units but is componentwise divisible by p
// (e.g. a p-divisible scalar multiple of a unit sequence) are handled by a
// content-reduction pass: the common power p^c is divided out of the maximal
// divisible suffix and the search reruns in Z[sqrt d]/(p^(A-c)).  The
// invariant s(n+ell) = b s(n) (mod p^A) transfers verbatim; b is then only
// determined modulo p^(A-c) and the minimal lift is reported (so the
// unrolled period uses that lift's order).  Returns nothing when no
// quasi-period (and no vanishing tail) covers at least `min_repeats`
// repetitions.
inline std::optional<PeriodicityReport> detect_quasiperiod(const std::vector<ResidueQuad>& s,
                                                           int min_repeats = 3) {
    const long N = static_cast<long>(s.size());
    if (N < 8) throw std::domain_error("detect_quasiperiod: need at least 8 residues");
    if (min_repeats < 1) throw std::domain_error("detect_quasiperiod: min_repeats must be >= 1");
    auto at = [&](long i) -> const ResidueQuad& { return s[static_cast<std::size_t>(i)]; };

    PeriodicityReport rep;
    rep.p = at(0).p;
    rep.A = at(0).A;
    rep.horizon = N;

    // Distinct outcome: an all-zero tail (cf. the inert-prime congruences,
    // where entire sequences die mod p).
    long mu_v = zero_tail_start(s);
    if (N - mu_v >= min_repeats && mu_v < N) {
        rep.preperiod = mu_v;
        rep.period = 1;
        rep.multiplier = ResidueQuad(rep.p, rep.A, at(0).d, 1, 0);
        rep.cycle = {ResidueQuad(rep.p, rep.A, at(0).d, 0, 0)};
        rep.vanishing = true;
        rep.unrolled_period = 1;
        return rep;
    }

    bool found = false;
    long best_mu = 0, best_ell = 0;
    ResidueQuad best_b;
    for (long ell = 1; ell <= N / min_repeats; ++ell) {
        if (found && best_mu == 0) break; // lexicographic optimum reached
        // anchor the multiplier on the last unit entry of the shifted range
        long anchor = -1;
        for (long n = N - 1 - ell; n >= 0; --n)
            if (at(n).is_unit()) {
                anchor = n;
                break;
            }
        if (anchor < 0) continue;
        ResidueQuad b = at(anchor + ell) * at(anchor).inverse();
        if (!b.is_unit()) continue;
        long mu = 0;
        for (long n = N - 1 - ell; n >= 0; --n)
            if (!(at(n + ell) == b * at(n))) {
                mu = n + 1;
                break;
            }
        if (mu > N - min_repeats * static_cast<long>(ell)) continue;
        if (!found || mu < best_mu) {
            found = true;
            best_mu = mu;
            best_ell = ell;
            best_b = b;
        }
    }

    // Content-reduction pass over the maximal suffix with no unit entries.
    // Runs alongside the anchored pass; the lexicographically smaller
    // (mu, ell) wins, with the anchored pass preferred on ties because its
    // multiplier is fully determined.
    const int A = at(0).A;
    auto content = [&](const ResidueQuad& r) -> int {
        if (r.is_zero()) return r.A;
        int v = 0;
        std::int64_t a = r.a, b = r.b;
        while (v < r.A && a % r.p == 0 && b % r.p == 0) {
            a /= r.p;
            b /= r.p;
            ++v;
        }
        return v;
    };
    long k0 = N;
    while (k0 > 0 && !at(k0 - 1).is_unit() && content(at(k0 - 1)) >= 1) --k0;
    if (k0 < N && N - k0 >= 8) {
        int c = A;
        for (long n = k0; n < N; ++n) c = std::min(c, content(at(n)));
        if (c >= 1 && c < A) {
            std::int64_t pc = arith::pow_i64(rep.p, c);
            std::vector<ResidueQuad> t;
            t.reserve(static_cast<std::size_t>(N - k0));
            for (long n = k0; n < N; ++n)
                t.push_back(ResidueQuad(rep.p, A - c, at(n).d, at(n).a / pc, at(n).b / pc));
            auto sub = detect_quasiperiod(t, min_repeats);
            if (sub && !sub->vanishing) {
                long mu = k0 + sub->preperiod;
                if (!found || mu < best_mu || (mu == best_mu && sub->period < best_ell)) {
                    found = true;
                    best_mu = mu;
                    best_ell = sub->period;
                    best_b = ResidueQuad(rep.p, A, at(0).d, sub->multiplier.a, sub->multiplier.b);
                }
            }
        }
    }
    if (!found) return std::nullopt;

    rep.preperiod = best_mu;
    rep.period = best_ell;
    rep.multiplier = best_b;
    rep.cycle.assign(s.begin() + best_mu, s.begin() + best_mu + best_ell);
    rep.unrolled_period = best_ell * arith::mult_order(best_b);
    return rep;
}

struct VerifyResult {
    bool ok = true;
    long counterexample = -1; // first violating index n, -1 when ok
};

// Brute-force re-check of the report invariant over the full residue list.
inline VerifyResult verify_report(const std::vector<ResidueQuad>& s,
                                  const PeriodicityReport& rep) {
    const long N = static_cast<long>(s.size());
    auto at = [&](long i) -> const ResidueQuad& { return s[static_cast<std::size_t>(i)]; };
    if (rep.vanishing) {
        for (long n = rep.preperiod; n < N; ++n)
            if (!at(n).is_zero()) return {false, n};
        return {};
    }
    if (N - rep.preperiod < 3 * rep.period) return {false, rep.preperiod};
    for (long n = rep.preperiod; n + rep.period < N; ++n)
        if (!(at(n + rep.period) == rep.multiplier * at(n))) return {false, n};
    for (long j = 0; j < rep.period; ++j)
        if (!(rep.cycle[static_cast<std::size_t>(j)] == at(rep.preperiod + j)))
            return {false, rep.preperiod + j};
    return {};
}

// Predicted period divisor (p-1) p^{A-1} * extra_order, the Fermat bound.
inline std::int64_t fermat_hint(std::int64_t p, int A, std::int64_t extra_order = 1) {
    return (p - 1) * arith::pow_i64(p, A - 1) * extra_order;
}

// Render "{s0, ..., \overline{a1, ..., a_ell}^b} (mod p^A)".
inline std::string notation(const std::vector<ResidueQuad>& s, const PeriodicityReport& rep) {
    std::string out = "{";
    for (long n = 0; n < rep.preperiod; ++n) {
        if (n) out += ", ";
        out += arith::to_string(s[static_cast<std::size_t>(n)]);
    }
    if (rep.preperiod) out += ", ";
    out += "\\overline{";
    for (std::size_t j = 0; j < rep.cycle.size(); ++j) {
        if (j) out += ", ";
        out += arith::to_string(rep.cycle[j]);
    }
    out += "}";
    if (!rep.vanishing) {
        std::string b = arith::to_string(rep.multiplier);
        out += rep.multiplier.is_scalar() ? "^" + b : "^{" + b + "}";
    }
    out += "} (mod " + std::to_string(rep.p);
    if (rep.A > 1) out += "^" + std::to_string(rep.A);
    out += ")";
    return out;
}

// ---------------------------------------------------------------------------
// Modular sequence builders mirroring taylor::normalized_sequence.
// ---------------------------------------------------------------------------

// value(n) = prefactor * kappa^n * p_{stride n}(t0), computed mod p^A.
inline std::vector<ResidueQuad> modular_sequence(const taylor::TaylorPreset& ps,
                                                 const quasimod::WeightedPoly& f, long count,
                                                 std::int64_t p, int A) {
    auto [k2, p0] = taylor::dehomogenize(f);
    taylor::ModRecursion rec(ps, k2, p0, p, A);
    std::int64_t d_hint = ps.t_eval.d() != 0 ? ps.t_eval.d() : ps.kappa.d();
    ResidueQuad t0 = arith::reduce_mod(ps.t_eval, p, A, d_hint);
    ResidueQuad kap = arith::reduce_mod(ps.kappa, p, A, d_hint);
    ResidueQuad acc = arith::reduce_mod(ps.prefactor, p, A, d_hint);
    std::vector<ResidueQuad> out;
    out.reserve(static_cast<std::size_t>(count));
    for (long n = 0; n < count; ++n) {
        while (rec.n() < ps.stride * n) rec.step();
        out.push_back(acc * rec.value_at(t0));
        acc = acc * kap;
    }
    return out;
}

// Norm sequence Nm(value(n)) mod p^A as scalar residues; the conjugation-
// invariant companion used when value(n) itself lives in a quadratic field.
inline std::vector<ResidueQuad> modular_norm_sequence(const taylor::TaylorPreset& ps,
                                                      const quasimod::WeightedPoly& f, long count,
                                                      std::int64_t p, int A) {
    std::vector<ResidueQuad> vals = modular_sequence(ps, f, count, p, A);
    for (ResidueQuad& v : vals) v = ResidueQuad(v.p, v.A, 0, v.norm(), 0);
    return vals;
}

} // namespace cmtaylor::congruence
