#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "pentasing/pentapod.hpp"
#include "pentasing/rng.hpp"

using namespace pentasing;
using namespace pentasing::pentapod;

namespace {

// the instance behind the reference tables (frame scaled so x2 = 1)
Architecture reference_arch() {
    Architecture a;
    a.base[0] = {0, 0, 0};
    a.base[1] = {1, 0, 0};
    a.base[2] = {-4, -3, 0};
    a.base[3] = {3, 7, -6};
    a.base[4] = {9, -5, 4};
    a.r = {0, 2, 4, 5, 10};
    return a;
}

// same design as drawn, with a longer base edge
Architecture caption_arch() {
    Architecture a = reference_arch();
    a.base[1] = {5, 0, 0};
    return a;
}

Configuration home_pose() { return {{0.6, 0.8, 0.0}, {2, 3, 4}}; }

const SingularityModel& reference_model() {
    static const SingularityModel m = extract_F(reference_arch());
    return m;
}

const std::array<poly::MultiPoly<Rat>, 6>& reference_minors() {
    static const auto m = minors_sym(reference_arch());
    return m;
}

Eigen::Vector3d random_dir(CounterRng& rng) {
    auto d = rng.unit_vector();
    return {d[0], d[1], d[2]};
}

Configuration random_pose(CounterRng& rng, double box = 5.0) {
    return {random_dir(rng),
            {rng.uniform(-box, box), rng.uniform(-box, box), rng.uniform(-box, box)}};
}

// closest singular positions at the home orientation
const double kFixedOrientation[4][3] = {
    {2.551763090, 2.637467970, 0.1144666998},
    {0.4205946500, -10.11287492, 3.678294530},
    {-6.106365796, -8.333480392, 0.7825158446},
    {-39.77559922, -14.40064789, -6.535304462},
};

// closest singular orientations at the home position
const double kFixedPosition[2][3] = {
    {0.3701933149, 0.5523718708, 0.7468883632},
    {-0.3265950579, -0.5850572044, -0.7423232012},
};

// nearest singular configuration, full metric
const double kGeneralPose[6] = {0.5559273038, 0.7274604486, 0.4021767380,
                                2.296688437,  3.479406728,  1.835729103};

// nearest equiform point; the direction carries the scale factor
const double kEquiformPose[6] = {0.5055836745, 0.6656442614, 0.3718172932,
                                 2.5031164070, 3.7266491740, 1.9989579769};

}  // namespace

TEST_CASE("frame normalization maps the caption architecture onto the zero pattern") {
    auto [norm, tr] = normalize_frame(caption_arch());

    CHECK(tr.scale == doctest::Approx(0.2).epsilon(1e-14));
    CHECK(norm.base[0].norm() < 1e-14);
    CHECK((norm.base[1] - Eigen::Vector3d(1, 0, 0)).norm() < 1e-14);
    // a3 already sits in the xy-plane, so its y keeps its sign
    CHECK((norm.base[2] - Eigen::Vector3d(-0.8, -0.6, 0)).norm() < 1e-14);
    CHECK(std::abs(norm.base[2].z()) < 1e-14);
    for (int j = 0; j < 5; ++j) {
        CHECK(norm.r[std::size_t(j)] == doctest::Approx(0.2 * caption_arch().r[std::size_t(j)]));
        CHECK((tr.apply_point(caption_arch().base[std::size_t(j)]) - norm.base[std::size_t(j)]).norm() <
              1e-13);
    }

    // proper rotation, and the inverse transform restores the anchors
    CHECK((tr.rot * tr.rot.transpose() - Eigen::Matrix3d::Identity()).norm() < 1e-13);
    CHECK(tr.rot.determinant() == doctest::Approx(1.0).epsilon(1e-12));
    auto inv = tr.inverse();
    for (int j = 0; j < 5; ++j)
        CHECK((inv.apply_point(norm.base[std::size_t(j)]) - caption_arch().base[std::size_t(j)]).norm() <
              1e-12);

    // normalizing an already-normalized frame is the identity
    auto [again, tr2] = normalize_frame(norm);
    CHECK(tr2.scale == doctest::Approx(1.0).epsilon(1e-13));
    CHECK((tr2.rot - Eigen::Matrix3d::Identity()).norm() < 1e-12);
    CHECK(tr2.offset.norm() < 1e-12);
    CHECK((again.base[4] - norm.base[4]).norm() < 1e-12);
}

TEST_CASE("frame normalization tie-breaks") {
    // a1,a2,a3 collinear: the roll is fixed by a4 with positive y
    Architecture a;
    a.base[0] = {1, 1, 1};
    a.base[1] = {3, 1, 1};
    a.base[2] = {2, 1, 1};
    a.base[3] = {1, -2, -7};
    a.base[4] = {0, 4, 2};
    a.r = {0, 1, 2, 3, 4};
    auto [norm, tr] = normalize_frame(a);
    CHECK(std::abs(norm.base[2].y()) < 1e-14);
    CHECK(norm.base[3].y() > 0);
    CHECK(std::abs(norm.base[3].z()) < 1e-13);

    // antiparallel a2 - a1 flips onto +x
    Architecture b = reference_arch();
    b.base[1] = {-5, 0, 0};
    auto [nb, trb] = normalize_frame(b);
    CHECK((nb.base[1] - Eigen::Vector3d(1, 0, 0)).norm() < 1e-13);
    CHECK(trb.rot.determinant() == doctest::Approx(1.0).epsilon(1e-12));

    Architecture c = a;
    c.base[1] = c.base[0];
    CHECK_THROWS_AS(normalize_frame(c), std::invalid_argument);
}

TEST_CASE("validate rejects degenerate architectures") {
    CHECK_NOTHROW(validate(reference_arch()));

    Architecture a = reference_arch();
    a.base[3] = a.base[1];
    a.r[3] = a.r[1];
    CHECK_THROWS_AS(validate(a), degenerate_error);

    Architecture b = reference_arch();
    b.r = {3, 3, 3, 3, 3};
    CHECK_THROWS_AS(validate(b), degenerate_error);

    Architecture c = reference_arch();
    for (auto& p : c.base) p = {1, 2, 3};
    CHECK_THROWS_AS(validate(c), degenerate_error);
}

TEST_CASE("numeric Jacobian agrees with its symbolic form") {
    auto arch = reference_arch();
    auto jsym = jacobian_sym(arch);
    CounterRng rng(7, 0);
    for (int trial = 0; trial < 20; ++trial) {
        Configuration c = random_pose(rng);
        std::map<std::string, Rat> pt{{"u", rat_from_double(c.dir.x())},  {"v", rat_from_double(c.dir.y())},
                                      {"w", rat_from_double(c.dir.z())},  {"px", rat_from_double(c.pos.x())},
                                      {"py", rat_from_double(c.pos.y())}, {"pz", rat_from_double(c.pos.z())}};
        auto j = jacobian(arch, c);
        for (int row = 0; row < 5; ++row)
            for (int col = 0; col < 6; ++col) {
                double exact = to_double(jsym[std::size_t(row)][std::size_t(col)].eval(pt));
                CHECK(j(row, col) == doctest::Approx(exact).epsilon(1e-12));
            }
    }
}

TEST_CASE("symbolic minors match numeric minors") {
    auto arch = reference_arch();
    const auto& msym = reference_minors();
    CounterRng rng(8, 0);
    for (int trial = 0; trial < 100; ++trial) {
        Configuration c = random_pose(rng);
        std::map<std::string, Rat> pt{{"u", rat_from_double(c.dir.x())},  {"v", rat_from_double(c.dir.y())},
                                      {"w", rat_from_double(c.dir.z())},  {"px", rat_from_double(c.pos.x())},
                                      {"py", rat_from_double(c.pos.y())}, {"pz", rat_from_double(c.pos.z())}};
        auto mnum = minors_at(arch, c);
        for (int j = 0; j < 6; ++j) {
            double exact = to_double(msym[std::size_t(j)].eval(pt));
            double scale = std::max(1.0, std::abs(exact));
            CHECK(std::abs(mnum[std::size_t(j)] - exact) / scale < 1e-9);
        }
    }
}

TEST_CASE("Jacobian rank drops exactly at tabulated singular poses") {
    auto arch = reference_arch();
    Configuration g = home_pose();
    auto [sing_g, ratio_g] = is_singular(arch, g);
    CHECK_FALSE(sing_g);
    CHECK(ratio_g > 1e-4);

    for (const auto& row : kFixedOrientation) {
        Configuration c{g.dir, {row[0], row[1], row[2]}};
        auto [sing, ratio] = is_singular(arch, c);
        CHECK(sing);
        CHECK(ratio < 1e-8);
    }
    for (const auto& row : kFixedPosition) {
        Configuration c{{row[0], row[1], row[2]}, g.pos};
        auto [sing, ratio] = is_singular(arch, c);
        CHECK(sing);
        CHECK(ratio < 1e-8);
    }
}

TEST_CASE("singularity polynomial: cubic, normalized, within the support template") {
    const auto& model = reference_model();
    CHECK(model.F().total_degree() == 3);
    CHECK(model.F().max_abs_coeff() == Rat(1));
    CHECK(model.F().terms().begin()->second > 0);
    CHECK(model.normalization() != 0);
    REQUIRE(model.coeffsA().has_value());
    CHECK(model.F().num_terms() <= 43);

    // fast evaluators agree with the exact polynomial
    CounterRng rng(9, 0);
    for (int trial = 0; trial < 20; ++trial) {
        Configuration c = random_pose(rng);
        std::map<std::string, Rat> pt{{"u", rat_from_double(c.dir.x())},  {"v", rat_from_double(c.dir.y())},
                                      {"w", rat_from_double(c.dir.z())},  {"px", rat_from_double(c.pos.x())},
                                      {"py", rat_from_double(c.pos.y())}, {"pz", rat_from_double(c.pos.z())}};
        double exact = to_double(model.F().eval(pt));
        CHECK(model.eval(c) == doctest::Approx(exact).epsilon(1e-10));
        BigFloat x[6] = {BigFloat(c.dir.x()), BigFloat(c.dir.y()), BigFloat(c.dir.z()),
                         BigFloat(c.pos.x()), BigFloat(c.pos.y()), BigFloat(c.pos.z())};
        CHECK(std::abs(static_cast<double>(model.eval_hp(x)) - exact) < 1e-10 * (1 + std::abs(exact)));
    }
}

TEST_CASE("singularity polynomial divides every minor exactly") {
    const auto& model = reference_model();
    const auto& msym = reference_minors();
    for (int j = 0; j < 6; ++j) {
        auto q = poly::poly_divide_exact(msym[std::size_t(j)], model.F());
        CHECK(q * model.F() == msym[std::size_t(j)]);
        // minors are degree 5 generically but individual ones may drop
        CHECK(q.total_degree() == msym[std::size_t(j)].total_degree() - 3);
    }
}

TEST_CASE("F vanishes at the tabulated singular poses and nowhere generic") {
    const auto& model = reference_model();
    Configuration g = home_pose();
    CHECK(model.eval_normalized(g) > 1e-6);

    for (const auto& row : kFixedOrientation)
        CHECK(model.eval_normalized({g.dir, {row[0], row[1], row[2]}}) < 1e-6);
    for (const auto& row : kFixedPosition)
        CHECK(model.eval_normalized({{row[0], row[1], row[2]}, g.pos}) < 1e-6);
    CHECK(model.eval_normalized({{kGeneralPose[0], kGeneralPose[1], kGeneralPose[2]},
                                 {kGeneralPose[3], kGeneralPose[4], kGeneralPose[5]}}) < 1e-6);
    // the equiform minimizer has a non-unit direction but still lies on F = 0
    CHECK(model.eval_normalized({{kEquiformPose[0], kEquiformPose[1], kEquiformPose[2]},
                                 {kEquiformPose[3], kEquiformPose[4], kEquiformPose[5]}}) < 1e-6);
}

TEST_CASE("F = 0 coincides with rank deficiency on constructed variety points") {
    auto arch = reference_arch();
    const auto& model = reference_model();
    CounterRng rng(10, 0);
    int hits = 0;
    for (int trial = 0; trial < 200 && hits < 40; ++trial) {
        Eigen::Vector3d dir = random_dir(rng);
        Quadric q = orientation_quadric(model, dir);
        double px = rng.uniform(-5, 5), py = rng.uniform(-5, 5);
        // restrict the quadric to the vertical line through (px, py)
        double c0 = q.value({px, py, 0});
        double cp = q.value({px, py, 1}), cm = q.value({px, py, -1});
        double c1 = (cp - cm) / 2, c2 = (cp + cm) / 2 - c0;
        if (std::abs(c2) < 1e-9) continue;
        double disc = c1 * c1 - 4 * c2 * c0;
        if (disc < 0) continue;
        for (double sgn : {1.0, -1.0}) {
            double z = (-c1 + sgn * std::sqrt(disc)) / (2 * c2);
            Configuration c{dir, {px, py, z}};
            CHECK(model.eval_normalized(c) < 1e-9);
            auto [sing, ratio] = is_singular(arch, c, 1e-6);
            CHECK(sing);
            ++hits;
        }
    }
    CHECK(hits >= 40);

    // generic poses are neither on the variety nor rank-deficient
    for (int trial = 0; trial < 200; ++trial) {
        Configuration c = random_pose(rng);
        if (model.eval_normalized(c) > 1e-4) {
            auto [sing, ratio] = is_singular(arch, c, 1e-10);
            CHECK_FALSE(sing);
        }
    }
}

TEST_CASE("orientation quadric and position cone restrict F") {
    const auto& model = reference_model();
    CounterRng rng(11, 0);
    for (int trial = 0; trial < 25; ++trial) {
        Configuration c = random_pose(rng);
        Quadric q = orientation_quadric(model, c.dir);
        double f = model.eval(c);
        CHECK(std::abs(q.value(c.pos) - f) < 1e-9 * (1 + std::abs(f)));
        Eigen::Vector4d ph(c.pos.x(), c.pos.y(), c.pos.z(), 1.0);
        CHECK(ph.dot(q.sym() * ph) == doctest::Approx(q.value(c.pos)).epsilon(1e-10));

        PositionCone cone = position_cone(model, c.pos);
        CHECK(std::abs(cone.value(c.dir) - f) < 1e-9 * (1 + std::abs(f)));
        CHECK((cone.A - cone.A.transpose()).norm() < 1e-14);
    }
}

TEST_CASE("tabulated minimizers satisfy their restricted equations") {
    const auto& model = reference_model();
    Configuration g = home_pose();

    Quadric q = orientation_quadric(model, g.dir);
    double qscale = 1 + q.Q.norm() + q.b.norm() + std::abs(q.c);
    for (const auto& row : kFixedOrientation) {
        Eigen::Vector3d p{row[0], row[1], row[2]};
        CHECK(std::abs(q.value(p)) / (qscale * (1 + p.squaredNorm())) < 1e-7);
    }

    PositionCone cone = position_cone(model, g.pos);
    double cscale = 1 + cone.A.norm() + cone.b.norm();
    for (const auto& row : kFixedPosition) {
        Eigen::Vector3d i{row[0], row[1], row[2]};
        CHECK(std::abs(i.norm() - 1.0) < 1e-9);
        CHECK(std::abs(cone.value(i)) / cscale < 1e-8);
    }
}

TEST_CASE("extraction commutes with similarity transforms of the frame") {
    SimilarityTransform s;
    s.scale = 2.0;
    s.rot << 0, -1, 0, 1, 0, 0, 0, 0, 1;
    s.offset = {1, -2, 3};

    Architecture moved = s.apply(reference_arch());
    SingularityModel model2 = extract_F(moved);
    CHECK(model2.F().total_degree() == 3);

    const auto& model1 = reference_model();
    auto inv = s.inverse();
    CounterRng rng(12, 0);
    double ratio0 = 0;
    for (int trial = 0; trial < 30; ++trial) {
        Configuration c = random_pose(rng, 8.0);
        double f2 = model2.eval(c);
        double f1 = model1.eval(inv.apply(c));
        if (std::abs(f1) < 1e-6) continue;
        double ratio = f2 / f1;
        if (ratio0 == 0)
            ratio0 = ratio;
        else
            CHECK(ratio == doctest::Approx(ratio0).epsilon(1e-8));
    }
    CHECK(ratio0 != 0);
}

TEST_CASE("gradient and Hessian evaluators match finite differences") {
    const auto& model = reference_model();
    CounterRng rng(13, 0);
    const double h = 1e-5;
    for (int trial = 0; trial < 20; ++trial) {
        Configuration c = random_pose(rng);
        double x[6] = {c.dir.x(), c.dir.y(), c.dir.z(), c.pos.x(), c.pos.y(), c.pos.z()};
        auto g = model.gradient(x);
        auto hess = model.hessian(x);
        CHECK((hess - hess.transpose()).norm() < 1e-12 * (1 + hess.norm()));
        for (int i = 0; i < 6; ++i) {
            double xp[6], xm[6];
            std::copy(x, x + 6, xp);
            std::copy(x, x + 6, xm);
            xp[i] += h;
            xm[i] -= h;
            double fd = (model.eval(xp) - model.eval(xm)) / (2 * h);
            CHECK(std::abs(g(i) - fd) < 1e-6 * (1 + std::abs(fd)));
            auto gp = model.gradient(xp);
            auto gm = model.gradient(xm);
            for (int j = 0; j < 6; ++j) {
                double fd2 = (gp(j) - gm(j)) / (2 * h);
                CHECK(std::abs(hess(i, j) - fd2) < 1e-5 * (1 + std::abs(fd2)));
            }
        }
    }
}

TEST_CASE("architectures with identically vanishing minors are rejected") {
    Architecture a;
    for (auto& p : a.base) p = {0, 0, 0};
    a.r = {0, 1, 2, 3, 4};
    CHECK_THROWS_AS(extract_F(a), degenerate_error);
}
