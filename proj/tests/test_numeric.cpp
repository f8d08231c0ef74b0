// Floating-point oracle tests.  Reference digit strings come from published
// closed forms (Chowla-Selberg periods, lemniscatic theta values) and were
// cross-checked with an independent arbitrary-precision computation before
// being frozen here.
#include <catch2/catch_amalgamated.hpp>

#include "cmtaylor/numeric.hpp"
#include "cmtaylor/taylor.hpp"

#include <string>

using namespace cmtaylor;
using arith::Int;
using arith::QuadRat;
using arith::Rat;
using numeric::BigComplex;
using numeric::BigFloat;

namespace {

BigFloat bfs(const std::string& s) { return BigFloat(s); }

BigFloat quad_to_float(const QuadRat& q) {
    BigFloat v = numeric::bf(q.a());
    if (q.b() != 0) v += numeric::bf(q.b()) * sqrt(BigFloat(q.d()));
    return v;
}

BigFloat cdist(const BigComplex& z, const BigComplex& w) { return numeric::cabs(z - w); }

const BigFloat& PI = numeric::pi_const();

} // namespace

TEST_CASE("gamma matches classical values", "[numeric][gamma]") {
    BigFloat tol = pow(BigFloat(10), -195);

    CHECK(abs(numeric::gamma(BigFloat(1) / 2) - sqrt(PI)) < tol);
    CHECK(abs(numeric::gamma(BigFloat(5)) - 24) < tol);
    CHECK(abs(numeric::gamma(BigFloat(1)) - 1) < tol);

    // Reflection: Gamma(1/4) Gamma(3/4) = pi / sin(pi/4) = pi sqrt2.
    BigFloat lhs = numeric::gamma(BigFloat(1) / 4) * numeric::gamma(BigFloat(3) / 4);
    CHECK(abs(lhs - PI * sqrt(BigFloat(2))) < tol);

    // Duplication at x = 3/10: Gamma(2x) = Gamma(x) Gamma(x+1/2) 2^{2x-1} / sqrt(pi).
    BigFloat x = BigFloat(3) / 10;
    BigFloat dup = numeric::gamma(x) * numeric::gamma(x + BigFloat(1) / 2) *
                   pow(BigFloat(2), 2 * x - 1) / sqrt(PI);
    CHECK(abs(numeric::gamma(2 * x) - dup) < tol * 10);

    // Negative non-integer via reflection: Gamma(-1/2) = -2 sqrt(pi).
    CHECK(abs(numeric::gamma(BigFloat(-1) / 2) + 2 * sqrt(PI)) < tol);

    CHECK_THROWS_AS(numeric::gamma(BigFloat(0)), std::domain_error);
    CHECK_THROWS_AS(numeric::gamma(BigFloat(-3)), std::domain_error);
    CHECK_THROWS_AS(numeric::gamma(BigFloat(1), 0), std::domain_error);
    CHECK_THROWS_AS(numeric::gamma(BigFloat(1), 500), std::domain_error);
}

TEST_CASE("gamma cross-checked against the lemniscatic AGM", "[numeric][gamma]") {
    // Gauss: Gamma(1/4)^2 AGM(1, sqrt 2) = 2 sqrt2 pi^{3/2}.
    BigFloat g14 = numeric::gamma(BigFloat(1) / 4);
    BigFloat lhs = g14 * g14 * numeric::agm(BigFloat(1), sqrt(BigFloat(2)));
    BigFloat rhs = 2 * sqrt(BigFloat(2)) * pow(PI, BigFloat(3) / 2);
    CHECK(abs(lhs - rhs) < pow(BigFloat(10), -195));
}

TEST_CASE("Chowla-Selberg periods", "[numeric][omega]") {
    BigFloat tol = pow(BigFloat(10), -55);

    auto om4 = numeric::omega_D(-4);
    CHECK(om4.D == -4);
    CHECK(om4.h_prime == Rat(1, 2));
    CHECK(abs(om4.omega -
              bfs("0.590170299508048113022668970279244293616858317440723649757932")) < tol);
    // closed form Gamma(1/4)^2 / (4 pi^{3/2})
    BigFloat g14 = numeric::gamma(BigFloat(1) / 4);
    CHECK(abs(om4.omega - g14 * g14 / (4 * pow(PI, BigFloat(3) / 2))) < pow(BigFloat(10), -190));

    auto om7 = numeric::omega_D(-7);
    CHECK(om7.h_prime == Rat(1));
    CHECK(abs(om7.omega -
              bfs("0.500491287948957127216306776750753291533145237684420437365728")) < tol);
    BigFloat closed7 = numeric::gamma(BigFloat(1) / 7) * numeric::gamma(BigFloat(2) / 7) *
                       numeric::gamma(BigFloat(4) / 7) /
                       (4 * pow(BigFloat(7), BigFloat(1) / 4) * PI * PI);
    CHECK(abs(om7.omega - closed7) < pow(BigFloat(10), -190));

    CHECK_THROWS_AS(numeric::omega_D(-3), std::domain_error);
    CHECK_THROWS_AS(numeric::omega_D(-8), std::domain_error);
    CHECK_THROWS_AS(numeric::omega_D(5), std::domain_error);
}

TEST_CASE("cm_point", "[numeric]") {
    CHECK(numeric::cm_point("i").imag() == 1);
    CHECK(numeric::cm_point("i").real() == 0);
    CHECK(numeric::cm_point("i/2").imag() == BigFloat(1) / 2);
    CHECK(numeric::cabs(numeric::cm_point("z7") -
                        BigComplex(BigFloat(1) / 2, sqrt(BigFloat(7)) / 2)) == 0);
    CHECK_THROWS_AS(numeric::cm_point("rho"), std::domain_error);
}

TEST_CASE("eval_qseries reproduces CM values", "[numeric][eval]") {
    long ord = numeric::suggested_order(1.0, 150);
    BigComplex i0 = numeric::cm_point("i");
    BigFloat tol = pow(BigFloat(10), -58);

    BigComplex th_i = numeric::eval_qseries(qseries::theta(ord), i0, 150);
    CHECK(cdist(th_i, BigComplex(bfs(
              "1.00373488548773909104767959506695386620799433244451940825496"))) < tol);

    BigComplex f2_i = numeric::eval_qseries(qseries::F2(ord), i0, 150);
    CHECK(cdist(f2_i, BigComplex(bfs(
              "0.00186746878149279983174471810538516052827253852096870079672375"))) < tol);

    // t(i) = F2/Theta^4 = (17 - 12 sqrt 2)/16
    BigComplex t_i = f2_i / (th_i * th_i * th_i * th_i);
    BigFloat t_exact = (BigFloat(17) - 12 * sqrt(BigFloat(2))) / 16;
    CHECK(cdist(t_i, BigComplex(t_exact)) < tol);

    BigComplex z7 = numeric::cm_point("z7");
    long ord7 = numeric::suggested_order(1.3228, 150);
    BigComplex th_z = numeric::eval_qseries(qseries::theta(ord7), z7, 150);
    CHECK(abs(th_z.real() - bfs(
              "0.999508832673728628043078077565597469077911286342015664177749")) < tol);
    CHECK(abs(th_z.imag()) < tol);

    // E12 at z7 (normalized Eisenstein q-expansion evaluated directly).
    BigComplex e12_z = numeric::eval_qseries(qseries::Ek(12, ord7), z7, 150);
    CHECK(abs(e12_z.real() - bfs(
              "0.988184180109427591832639093169931642473686237583591245240484")) < tol);

    // Half-integer grid: F2(i/2)/Theta(i/2)^4 = 1/32.
    BigComplex ih = numeric::cm_point("i/2");
    long ordh = numeric::suggested_order(0.5, 120);
    BigComplex th_h = numeric::eval_qseries(qseries::theta(ordh), ih, 120);
    BigComplex f2_h = numeric::eval_qseries(qseries::F2(ordh), ih, 120);
    CHECK(cdist(f2_h / (th_h * th_h * th_h * th_h), BigComplex(BigFloat(1) / 32)) <
          pow(BigFloat(10), -100));

    // Fractional grid (eta quotient with off24 = 24) evaluates consistently:
    // F2 = eta(4)^8 / eta(2)^4.
    auto f2q = qseries::eta(4, ordh).pow(8) / qseries::eta(2, ordh).pow(4);
    CHECK(cdist(numeric::eval_qseries(f2q, ih, 100), f2_h) < pow(BigFloat(10), -95));

    CHECK_THROWS_AS(numeric::eval_qseries(qseries::theta(16), i0, 128), std::domain_error);
    CHECK_THROWS_AS(numeric::eval_qseries(qseries::theta(64), BigComplex(0, BigFloat(1) / 10000), 40),
                    std::domain_error);
}

TEST_CASE("period anchors at the three CM points", "[numeric][anchor]") {
    BigFloat tol = pow(BigFloat(10), -150);
    auto om4 = numeric::omega_D(-4);
    auto om7 = numeric::omega_D(-7);

    long ord = numeric::suggested_order(1.0, 170);
    BigComplex th_i = numeric::eval_qseries(qseries::theta(ord), numeric::cm_point("i"), 170);
    BigComplex a1 = 2 * th_i * th_i * th_i * th_i / BigComplex(om4.omega * om4.omega);
    CHECK(cdist(a1, BigComplex(3 + 2 * sqrt(BigFloat(2)))) < tol);

    long ord7 = numeric::suggested_order(1.3228, 170);
    BigComplex th_z = numeric::eval_qseries(qseries::theta(ord7), numeric::cm_point("z7"), 170);
    BigComplex a2 = 4 * th_z * th_z * th_z * th_z / BigComplex(om7.omega * om7.omega);
    CHECK(cdist(a2, BigComplex(8 + 3 * sqrt(BigFloat(7)))) < tol);

    // Theta(i/2)^8 * 4 pi^2 / (Gamma(1/4)^8 / (128 pi^4)) = 32.
    long ordh = numeric::suggested_order(0.5, 170);
    BigComplex th_h = numeric::eval_qseries(qseries::theta(ordh), numeric::cm_point("i/2"), 170);
    BigFloat g14 = numeric::gamma(BigFloat(1) / 4);
    BigFloat phiR = pow(g14, 8) / (128 * pow(PI, 4));
    BigComplex th8 = th_h * th_h;
    th8 = th8 * th8;
    th8 = th8 * th8;
    CHECK(cdist(th8 * BigComplex(4 * PI * PI / phiR), BigComplex(BigFloat(32))) < tol);
}

TEST_CASE("almost holomorphic values", "[numeric][almostholo]") {
    using quasimod::WeightedPoly;

    // E2*(i) = 0.
    BigComplex z_i = numeric::almost_holo_value(WeightedPoly::Z(), numeric::cm_point("i"), 120);
    CHECK(numeric::cabs(z_i) < pow(BigFloat(10), -100));

    // E2*(i/2) / Theta(i/2)^4 = -3/2.
    BigComplex ih = numeric::cm_point("i/2");
    BigComplex z_h = numeric::almost_holo_value(WeightedPoly::Z(), ih, 110);
    BigComplex x4_h = numeric::almost_holo_value(WeightedPoly::monomial(4, 0, 0, Rat(1)), ih, 110);
    CHECK(cdist(z_h / x4_h, BigComplex(BigFloat(-3) / 2)) < pow(BigFloat(10), -90));

    // E2*(z7) / Theta(z7)^4 = (96 sqrt 7 - 252)/7.
    BigComplex z7 = numeric::cm_point("z7");
    BigComplex z_z = numeric::almost_holo_value(WeightedPoly::Z(), z7, 120);
    BigComplex x4_z = numeric::almost_holo_value(WeightedPoly::monomial(4, 0, 0, Rat(1)), z7, 120);
    BigFloat expect = (96 * sqrt(BigFloat(7)) - 252) / 7;
    CHECK(cdist(z_z / x4_z, BigComplex(expect)) < pow(BigFloat(10), -90));
    CHECK(abs(expect - bfs("0.284589408885813812593587478481285838312125939416459616480015")) <
          pow(BigFloat(10), -58));

    // The twist polynomial phi of the weight-1/2 system vanishes at its own
    // CM point: phi = Z/12 + X^4/8 at i/2, and Z/12 - X^4/42 - 8Y/21 at z7.
    quasimod::PhiSpec phiR{Rat(1, 8), Rat(0)};
    CHECK(numeric::cabs(numeric::almost_holo_value(phiR.phi(), ih, 100)) < pow(BigFloat(10), -80));
    quasimod::PhiSpec phi7{Rat(-1, 42), Rat(-8, 21)};
    CHECK(numeric::cabs(numeric::almost_holo_value(phi7.phi(), z7, 100)) < pow(BigFloat(10), -80));
}

TEST_CASE("raising operator matches closed forms", "[numeric][raising]") {
    BigComplex i0 = numeric::cm_point("i");
    long ord = numeric::suggested_order(1.0, 120);
    auto th = qseries::theta(ord);

    // n = 0 is plain evaluation.
    CHECK(cdist(numeric::raising(th, 1, 0, i0, 100), numeric::eval_qseries(th, i0, 100)) == 0);

    // partial_{1/2} Theta at i equals (7 - 5 sqrt2)/2 * Theta(i)^5.
    BigComplex th_i = numeric::eval_qseries(th, i0, 120);
    BigComplex th5 = th_i * th_i * th_i * th_i * th_i;
    BigFloat c = (BigFloat(7) - 5 * sqrt(BigFloat(2))) / 2;
    CHECK(cdist(numeric::raising(th, 1, 1, i0, 100), BigComplex(c) * th5) < pow(BigFloat(10), -80));

    CHECK_THROWS_AS(numeric::raising(th, 1, -1, i0, 100), std::domain_error);
}

TEST_CASE("raising agrees with the exact Taylor recursion", "[numeric][raising][oracle]") {
    // partial^n f (tau0) = p_n(t0) Theta(tau0)^{4n+k2} for each preset at its
    // own CM point; tolerance 1e-40 on the absolute difference.
    const BigFloat tol = pow(BigFloat(10), -40);

    struct Case {
        const char* preset_name;
        const char* form_name;
        const char* point;
        double y;
        int k2;
    };
    for (const Case& cs : {Case{"i", "theta", "i", 1.0, 1},
                           Case{"z7", "h52", "z7", 1.3228, 5},
                           Case{"romik", "theta", "i/2", 0.5, 1}}) {
        INFO("preset " << cs.preset_name);
        auto ps = taylor::preset(cs.preset_name);
        auto form = taylor::form_by_name(cs.form_name);
        BigComplex tau0 = numeric::cm_point(cs.point);
        long ord = numeric::suggested_order(cs.y, 120);
        auto fq = cs.k2 == 1 ? qseries::theta(ord) : qseries::H52(ord);
        BigComplex th = numeric::eval_qseries(qseries::theta(ord), tau0, 110);
        for (int n = 0; n <= 4; ++n) {
            INFO("derivative order " << n);
            BigComplex lhs = numeric::raising(fq, cs.k2, n, tau0, 100);
            BigFloat pn = quad_to_float(taylor::taylor_value(ps, form, n));
            BigComplex rhs = BigComplex(pn);
            for (int e = 0; e < 4 * n + cs.k2; ++e) rhs *= th;
            CHECK(cdist(lhs, rhs) < tol);
        }
    }
}

TEST_CASE("raising matches symbolic Serre-derivative values", "[numeric][raising]") {
    // Corollary-style check: X * D_poly^n(H) evaluated almost-holomorphically
    // equals Theta(tau0) * partial^n H(tau0).
    using quasimod::WeightedPoly;
    BigComplex z7 = numeric::cm_point("z7");
    long ord = numeric::suggested_order(1.3228, 110);
    auto h = qseries::H52(ord);
    BigComplex th = numeric::eval_qseries(qseries::theta(ord), z7, 100);

    WeightedPoly hp = taylor::form_by_name("h52");
    for (int n = 0; n <= 3; ++n) {
        INFO("n = " << n);
        WeightedPoly cur = hp;
        for (int m = 0; m < n; ++m) cur = quasimod::D_poly(cur);
        WeightedPoly xcur = WeightedPoly::X() * cur;
        BigComplex lhs = numeric::almost_holo_value(xcur, z7, 100);
        BigComplex rhs = th * numeric::raising(h, 5, n, z7, 100);
        CHECK(cdist(lhs, rhs) < pow(BigFloat(10), -60));
    }
}

TEST_CASE("recognize_quad", "[numeric][recognize]") {
    BigFloat t_i = (BigFloat(17) - 12 * sqrt(BigFloat(2))) / 16;
    QuadRat r = numeric::recognize_quad(t_i, 2, Int(1000), 100);
    CHECK(r == QuadRat(Rat(17, 16), Rat(-3, 4), 2));

    BigFloat t_z = -(BigFloat(127) - 48 * sqrt(BigFloat(7))) / 16;
    QuadRat rz = numeric::recognize_quad(t_z, 7, Int(1000), 100);
    CHECK(rz == QuadRat(Rat(-127, 16), Rat(3), 7));

    // Rational path (d = 0 or 1).
    CHECK(numeric::recognize_quad(BigFloat(1) / 32, 0, Int(100), 80) == QuadRat(Rat(1, 32)));
    CHECK(numeric::recognize_quad(BigFloat(-3) / 2, 1, Int(100), 80) == QuadRat(Rat(-3, 2)));
    CHECK(numeric::recognize_quad(BigFloat(7), 0, Int(100), 80) == QuadRat(Rat(7)));

    CHECK_THROWS_AS(numeric::recognize_quad(sqrt(BigFloat(3)), 2, Int(50), 60), std::domain_error);
    CHECK_THROWS_AS(numeric::recognize_quad(BigFloat(1) / 32, 0, Int(5), 80), std::domain_error);
    CHECK_THROWS_AS(numeric::recognize_quad(BigFloat(1), -2, Int(10), 80), std::domain_error);
}

TEST_CASE("rational_reconstruct", "[numeric][recognize]") {
    CHECK(numeric::rational_reconstruct(BigFloat(1) / 2, Int(10)) == Rat(1, 2));
    CHECK(numeric::rational_reconstruct(BigFloat(211934) / 212625, Int(1000000)) ==
          Rat(211934, 212625));
    CHECK(numeric::rational_reconstruct(BigFloat(-691) / 2764125, Int(10000000)) ==
          Rat(-691, 2764125));
    CHECK_THROWS_AS(numeric::rational_reconstruct(sqrt(BigFloat(2)), Int(1000)), std::domain_error);
}

TEST_CASE("suggested_order scales with precision and height", "[numeric]") {
    CHECK(numeric::suggested_order(1.0, 128) < numeric::suggested_order(1.0, 200));
    CHECK(numeric::suggested_order(0.5, 128) > numeric::suggested_order(1.0, 128));
    CHECK(numeric::suggested_order(1.0, 40) >= 24);
}
