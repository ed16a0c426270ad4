#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pentasing/multipoly.hpp"
#include "pentasing/polyroots.hpp"
#include "pentasing/rng.hpp"
#include "pentasing/unipoly.hpp"

using namespace pentasing;
using namespace pentasing::poly;

using MP = MultiPoly<Rat>;

namespace {

MP rand_poly(CounterRng& rng, const std::vector<std::string>& vars, int terms) {
    MP p(vars);
    for (int t = 0; t < terms; ++t) {
        ExpVec e(vars.size());
        for (auto& x : e) x = static_cast<unsigned>(rng.next_u64() % 3);
        p.add_term(e, Rat(static_cast<long>(rng.next_u64() % 19) - 9));
    }
    return p;
}

}  // namespace

TEST_CASE("arithmetic and evaluation") {
    std::vector<std::string> vars{"x", "y", "z"};
    MP x = MP::variable("x", vars), y = MP::variable("y", vars), z = MP::variable("z", vars);
    MP f = Rat(2) * x * x * y - Rat(3) * z + MP::constant(Rat(1), vars);

    CHECK(f.num_terms() == 3);
    CHECK(f.total_degree() == 3);
    CHECK(f.degree_in("z") == 1);

    std::map<std::string, Rat> pt{{"x", Rat(2)}, {"y", Rat(-1)}, {"z", Rat(5)}};
    CHECK(f.eval(pt) == Rat(-22));

    auto [val, mag] = f.eval_with_magnitude(pt);
    CHECK(val == Rat(-22));
    CHECK(mag == Rat(24));

    // substitution leaves a polynomial on the remaining variables
    MP g = f.substitute({{"x", Rat(2)}});
    CHECK(g.vars() == std::vector<std::string>{"y", "z"});
    CHECK(g.eval({{"y", Rat(-1)}, {"z", Rat(5)}}) == Rat(-22));

    CHECK(f.derivative("x") == Rat(4) * x * y);
    CHECK(f.derivative("y") == Rat(2) * x * x);
}

TEST_CASE("variable alignment merges operand domains") {
    MP a = MP::variable("x", {"x"});
    MP b = MP::variable("y", {"y"});
    MP s = a + b;
    CHECK(s.vars() == std::vector<std::string>{"x", "y"});
    CHECK(s.eval({{"x", Rat(3)}, {"y", Rat(4)}}) == Rat(7));

    // canonical ranking puts pose variables before everything else
    MP u = MP::variable("u", {"u"});
    MP t = MP::variable("t", {"t"});
    CHECK((u + t).vars() == std::vector<std::string>{"u", "t"});
}

TEST_CASE("ring laws on random polynomials") {
    CounterRng rng(7, 0);
    std::vector<std::string> vars{"x", "y", "z"};
    for (int i = 0; i < 20; ++i) {
        MP a = rand_poly(rng, vars, 5), b = rand_poly(rng, vars, 5), c = rand_poly(rng, vars, 4);
        CHECK((a + b) * c == a * c + b * c);
        CHECK((a * b) * c == a * (b * c));
        MP prod = a * b;
        CHECK(prod.derivative("x") == a.derivative("x") * b + a * b.derivative("x"));
    }
}

TEST_CASE("poly_matrix_det") {
    std::vector<std::string> vars{"x"};
    MP x = MP::variable("x", vars), one = MP::constant(Rat(1), vars);
    CHECK(poly_matrix_det<Rat>({{x, one}, {one, x}}) == x * x - one);

    // singular matrix of polynomials
    CHECK(poly_matrix_det<Rat>({{x, x}, {x, x}}).is_zero());
}

TEST_CASE("sylvester resultant against closed forms") {
    std::vector<std::string> tx{"t", "x"};
    MP x = MP::variable("x", tx), t = MP::variable("t", tx);
    MP one = MP::constant(Rat(1), tx);

    // Res_x(x^2 - t, x - 1) = 1 - t  (evaluate the first at the root x = 1)
    MP r = sylvester_resultant(x * x - t, x - one, "x");
    CHECK(r == one - t);

    // Res_x(x^2 + 1, x^2 - 1) = (1^2+1)((-1)^2+1) = 4
    std::vector<std::string> xonly{"x"};
    MP X = MP::variable("x", xonly);
    MP I1 = MP::constant(Rat(1), xonly);
    MP r2 = sylvester_resultant(X * X + I1, X * X - I1, "x");
    CHECK(r2 == MP::constant(Rat(4), xonly));

    CHECK_THROWS_AS(sylvester_resultant(I1, X, "x"), std::invalid_argument);
}

TEST_CASE("resultant vanishes iff a common factor exists") {
    std::vector<std::string> vars{"x", "y"};
    MP x = MP::variable("x", vars), y = MP::variable("y", vars);
    MP one = MP::constant(Rat(1), vars), three = MP::constant(Rat(3), vars);

    MP common = x + y;
    MP p = common * (x - Rat(2) * y + one);
    MP q = common * (x * x + three);
    CHECK(sylvester_resultant(p, q, "x").is_zero());

    // drop the common factor and the resultant is a nonzero poly in y
    MP q2 = x * x + three;
    MP res = sylvester_resultant(p, q2, "x");
    CHECK_FALSE(res.is_zero());
    CHECK(res.degree_in("x") == 0);

    CounterRng rng(11, 1);
    for (int i = 0; i < 6; ++i) {
        MP g = rand_poly(rng, vars, 3) + x;  // ensure positive degree in x
        MP a = g * (rand_poly(rng, vars, 3) + x * x);
        MP b = g * (rand_poly(rng, vars, 2) + x * x * x);
        if (a.degree_in("x") < 1 || b.degree_in("x") < 1) continue;
        CHECK(sylvester_resultant(a, b, "x").is_zero());
    }
}

TEST_CASE("poly_divide_exact recovers a planted factor") {
    std::vector<std::string> vars{"x", "y"};
    MP x = MP::variable("x", vars), y = MP::variable("y", vars);
    MP one = MP::constant(Rat(1), vars);

    MP d = x + Rat(2) * y;
    MP q = x * x - y + Rat(3) * one;
    CHECK(poly_divide_exact(d * q, d) == q);

    CHECK_THROWS_AS(poly_divide_exact(x * x + one, x + one), std::domain_error);

    CounterRng rng(13, 2);
    for (int i = 0; i < 10; ++i) {
        MP a = rand_poly(rng, vars, 4), b = rand_poly(rng, vars, 4);
        if (a.is_zero() || b.is_zero()) continue;
        CHECK(poly_divide_exact(a * b, b) == a);
    }
}

TEST_CASE("uni_divmod and exact gcd") {
    using UP = UniPoly<Rat>;
    UP cubic({Rat(-1), Rat(0), Rat(0), Rat(1)});  // x^3 - 1
    UP lin({Rat(-1), Rat(1)});                    // x - 1
    auto [q, r] = uni_divmod(cubic, lin);
    CHECK(q == UP({Rat(1), Rat(1), Rat(1)}));
    CHECK(r.is_zero());

    // gcd((x^2-1)(x+2), (x^2-1)(x-3)) = x^2 - 1
    UP a({Rat(-2), Rat(-1), Rat(2), Rat(1)});
    UP b({Rat(3), Rat(-1), Rat(-3), Rat(1)});
    CHECK(uni_gcd(a, b) == UP({Rat(-1), Rat(0), Rat(1)}));

    // coprime inputs give a unit
    CHECK(uni_gcd(UP({Rat(1), Rat(0), Rat(1)}), lin) == UP({Rat(1)}));
}

TEST_CASE("interpolation reproduces exact coefficients") {
    using UP = UniPoly<Rat>;
    UP f({Rat(1), Rat(-2), Rat(0), Rat(1)});  // x^3 - 2x + 1
    std::vector<Rat> xs, ys;
    for (int i = 0; i <= 3; ++i) {
        xs.emplace_back(i);
        ys.push_back(f.eval(Rat(i)));
    }
    CHECK(interpolate_uni(xs, ys) == f);

    // fractional nodes, degree < node count: leading zeros trim away
    std::vector<Rat> xs2{Rat(1, 2), Rat(-1, 3), Rat(2), Rat(5, 7), Rat(-4)};
    std::vector<Rat> ys2;
    UP g({Rat(2, 3), Rat(0), Rat(-1, 5)});
    for (const auto& x : xs2) ys2.push_back(g.eval(x));
    CHECK(interpolate_uni(xs2, ys2) == g);

    CHECK_THROWS_AS(interpolate_uni(std::vector<Rat>{Rat(1), Rat(1)}, std::vector<Rat>{Rat(0), Rat(0)}),
                    std::invalid_argument);
}

TEST_CASE("approximate gcd decides degree via Sylvester rank") {
    hp::init_precision();
    using UPB = UniPoly<BigFloat>;
    auto conv = [](const UniPoly<Rat>& p) { return uni_convert<BigFloat, Rat>(p); };

    UniPoly<Rat> a({Rat(-2), Rat(-1), Rat(2), Rat(1)});
    UniPoly<Rat> b({Rat(3), Rat(-1), Rat(-3), Rat(1)});
    BigFloat tol("1e-30");
    UPB g = uni_gcd_approx(conv(a), conv(b), tol);
    REQUIRE(g.degree() == 2);
    CHECK(abs(g.c[0] - BigFloat(-1)) < BigFloat("1e-40"));
    CHECK(abs(g.c[1]) < BigFloat("1e-40"));
    CHECK(g.c[2] == 1);

    UPB cop = uni_gcd_approx(conv(UniPoly<Rat>({Rat(1), Rat(0), Rat(1)})),
                             conv(UniPoly<Rat>({Rat(-1), Rat(1)})), tol);
    CHECK(cop.degree() == 0);
}

TEST_CASE("root finder on known spectra") {
    hp::init_precision();
    using UPB = UniPoly<BigFloat>;

    auto roots = uni_roots(UPB({BigFloat(-1), BigFloat(0), BigFloat(1)}));  // w^2 - 1
    REQUIRE(roots.size() == 2);
    CHECK(abs(roots[0].re - BigFloat(-1)) < BigFloat("1e-60"));
    CHECK(abs(roots[1].re - BigFloat(1)) < BigFloat("1e-60"));
    CHECK(abs(roots[0].im) < BigFloat("1e-60"));

    // x^3 - 2x + 1 = (x-1)(x^2+x-1): golden-ratio pair plus 1
    auto r3 = uni_roots(UPB({BigFloat(1), BigFloat(-2), BigFloat(0), BigFloat(1)}));
    REQUIRE(r3.size() == 3);
    BigFloat s5 = sqrt(BigFloat(5));
    CHECK(abs(r3[0].re - (BigFloat(-1) - s5) / 2) < BigFloat("1e-60"));
    CHECK(abs(r3[1].re - (BigFloat(-1) + s5) / 2) < BigFloat("1e-60"));
    CHECK(abs(r3[2].re - BigFloat(1)) < BigFloat("1e-60"));

    // x^2 + 1: conjugate pair ordered by imaginary part
    auto ri = uni_roots(UPB({BigFloat(1), BigFloat(0), BigFloat(1)}));
    REQUIRE(ri.size() == 2);
    CHECK(abs(ri[0].im + 1) < BigFloat("1e-60"));
    CHECK(abs(ri[1].im - 1) < BigFloat("1e-60"));

    auto rr = real_roots(ri, BigFloat("1e-40"));
    CHECK(rr.empty());
}

TEST_CASE("root finder reconstructs planted rational roots") {
    hp::init_precision();
    CounterRng rng(5, 9);
    for (int trial = 0; trial < 3; ++trial) {
        std::vector<Rat> planted;
        UniPoly<Rat> p({Rat(1)});
        while (planted.size() < 6) {
            Rat r(static_cast<long>(rng.next_u64() % 41) - 20, 1 + static_cast<long>(rng.next_u64() % 7));
            if (std::find(planted.begin(), planted.end(), r) != planted.end()) continue;
            planted.push_back(r);
            p = p * UniPoly<Rat>({-r, Rat(1)});
        }
        std::sort(planted.begin(), planted.end());
        auto roots = uni_roots(uni_convert<BigFloat, Rat>(p));
        REQUIRE(roots.size() == 6);
        for (std::size_t i = 0; i < 6; ++i) {
            CHECK(abs(roots[i].re - BigFloat(planted[i])) < BigFloat("1e-55"));
            CHECK(abs(roots[i].im) < BigFloat("1e-55"));
        }
    }
}

TEST_CASE("roots at the origin are peeled before the companion step") {
    hp::init_precision();
    using UPB = UniPoly<BigFloat>;
    // x^2 (x - 3)
    auto roots = uni_roots(UPB({BigFloat(0), BigFloat(0), BigFloat(-3), BigFloat(1)}));
    REQUIRE(roots.size() == 3);
    CHECK(roots[0].re == 0);
    CHECK(roots[1].re == 0);
    CHECK(abs(roots[2].re - 3) < BigFloat("1e-60"));
}
