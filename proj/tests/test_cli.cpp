// Config parsing, command output contracts, determinism, and exit codes.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "pentasing/cli.hpp"

using namespace pentasing;
using cli::JobConfig;

namespace {

const char* kReference = R"({
  "architecture": {
    "base": [[0,0,0],[1,0,0],[-4,-3,0],[3,7,-6],[9,-5,4]],
    "r": [0, 2, 4, 5, 10]
  },
  "pose": {
    "orientation": ["3/5", "4/5", 0],
    "position": [2, 3, 4]
  },
  "mode": "fixed-orientation",
  "seed": 1,
  "starts": 2000,
  "tol": 1e-10
})";

std::vector<std::string> split(const std::string& line, char sep = ',') {
    std::vector<std::string> f;
    std::string cur;
    for (char c : line) {
        if (c == sep) { f.push_back(cur); cur.clear(); }
        else cur += c;
    }
    f.push_back(cur);
    return f;
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string ln;
    while (std::getline(in, ln)) out.push_back(ln);
    return out;
}

struct Run {
    int code;
    std::string out, err;
};

Run run(int (*cmd)(const JobConfig&, std::ostream&, std::ostream&), const JobConfig& cfg) {
    std::ostringstream out, err;
    int code = cmd(cfg, out, err);
    return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("parse_config reads the reference instance") {
    JobConfig cfg = cli::parse_config(kReference);

    CHECK(cfg.arch.base[0] == Eigen::Vector3d(0, 0, 0));
    CHECK(cfg.arch.base[1] == Eigen::Vector3d(1, 0, 0));
    CHECK(cfg.arch.base[4] == Eigen::Vector3d(9, -5, 4));
    CHECK(cfg.arch.r[3] == doctest::Approx(5.0));

    // rational strings parse exactly
    CHECK(cfg.pose.dir(0) == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(cfg.pose.dir(1) == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(cfg.pose.dir(2) == 0.0);
    CHECK(cfg.pose.pos == Eigen::Vector3d(2, 3, 4));

    CHECK(cfg.mode == distance::Mode::fixed_orientation);
    CHECK(cfg.seed == 1);
    CHECK(cfg.starts == 2000);
    CHECK(cfg.tol == doctest::Approx(1e-10));
    CHECK(cfg.format == "csv");
    CHECK(cfg.warnings.empty());
}

TEST_CASE("parse_config defaults") {
    JobConfig cfg = cli::parse_config(R"({
      "architecture": {"base": [[0,0,0],[1,0,0],[-4,-3,0],[3,7,-6],[9,-5,4]],
                       "r": [0,2,4,5,10]},
      "pose": {"orientation": [0,0,1], "position": [0,0,0]}
    })");
    CHECK(cfg.mode == distance::Mode::general);
    CHECK(cfg.tol == doctest::Approx(1e-10));
    CHECK(cfg.seed == 0);
    CHECK(cfg.starts == 5000);
    CHECK(cfg.box == 0.0);
    CHECK(cfg.format == "csv");
    CHECK(cfg.param_count == 100);
    CHECK(cfg.mesh_grid == 40);
}

TEST_CASE("parse_config number forms") {
    JobConfig cfg = cli::parse_config(R"({
      "architecture": {"base": [[0,0,0],["-7/2",0,0],[-4,-3,0],[3,7,-6],[9,-5,4]],
                       "r": [0,"2",4,5,"0.25"]},
      "pose": {"orientation": [0,0,1], "position": ["1/4",0.5,-3]}
    })");
    CHECK(cfg.arch.base[1](0) == doctest::Approx(-3.5).epsilon(1e-15));
    CHECK(cfg.arch.r[1] == doctest::Approx(2.0));
    CHECK(cfg.arch.r[4] == doctest::Approx(0.25));
    CHECK(cfg.pose.pos(0) == doctest::Approx(0.25));
}

TEST_CASE("parse_config rejects malformed input") {
    auto bad = [](const std::string& text) {
        CHECK_THROWS_AS(cli::parse_config(text), config_error);
    };

    bad("{not json");
    bad("[1,2,3]");
    bad(R"({"pose": {"orientation": [0,0,1], "position": [0,0,0]}})");  // no architecture
    bad(R"({"architecture": {"base": [[0,0,0],[1,0,0],[-4,-3,0],[3,7,-6],[9,-5,4]], "r": [0,2,4,5,10]}})");  // no pose

    // four base points / four leg offsets
    bad(R"({"architecture": {"base": [[0,0,0],[1,0,0],[-4,-3,0],[3,7,-6]], "r": [0,2,4,5,10]},
            "pose": {"orientation": [0,0,1], "position": [0,0,0]}})");
    bad(R"({"architecture": {"base": [[0,0,0],[1,0,0],[-4,-3,0],[3,7,-6],[9,-5,4]], "r": [0,2,4,5]},
            "pose": {"orientation": [0,0,1], "position": [0,0,0]}})");

    // unknown keys, anywhere
    bad(R"({"architecture": {"base": [[0,0,0],[1,0,0],[-4,-3,0],[3,7,-6],[9,-5,4]], "r": [0,2,4,5,10]},
            "pose": {"orientation": [0,0,1], "position": [0,0,0]}, "bogus": 1})");
    bad(R"({"architecture": {"base": [[0,0,0],[1,0,0],[-4,-3,0],[3,7,-6],[9,-5,4]], "r": [0,2,4,5,10], "extra": 2},
            "pose": {"orientation": [0,0,1], "position": [0,0,0]}})");

    // bad enum values, bad numerics
    bad(R"({"architecture": {"base": [[0,0,0],[1,0,0],[-4,-3,0],[3,7,-6],[9,-5,4]], "r": [0,2,4,5,10]},
            "pose": {"orientation": [0,0,1], "position": [0,0,0]}, "mode": "sideways"})");
    bad(R"({"architecture": {"base": [[0,0,0],[1,0,0],[-4,-3,0],[3,7,-6],[9,-5,4]], "r": [0,2,4,5,10]},
            "pose": {"orientation": [0,0,1], "position": [0,0,0]}, "format": "xml"})");
    bad(R"({"architecture": {"base": [[0,0,0],[1,0,0],[-4,-3,0],[3,7,-6],[9,-5,4]], "r": [0,2,4,5,10]},
            "pose": {"orientation": [0,0,1], "position": [0,0,0]}, "tol": 0})");
    bad(R"({"architecture": {"base": [[0,0,0],[1,0,0],[-4,-3,0],[3,7,-6],[9,-5,4]], "r": [0,2,4,5,10]},
            "pose": {"orientation": [0,0,1], "position": [0,0,0]}, "starts": -3})");
    bad(R"({"architecture": {"base": [[0,0,0],[1,0,0],[-4,-3,0],[3,7,-6],[9,-5,4]], "r": [0,2,4,5,10]},
            "pose": {"orientation": [0,0,1], "position": [0,0,0]}, "seed": -1})");
    bad(R"({"architecture": {"base": [[0,0,0],[1,0,0],[-4,-3,0],[3,7,-6],[9,-5,4]], "r": [0,2,4,5,10]},
            "pose": {"orientation": [0,0,1], "position": [0,"1/0",0]}})");

    // orientation must be unit length up to 1e-6
    bad(R"({"architecture": {"base": [[0,0,0],[1,0,0],[-4,-3,0],[3,7,-6],[9,-5,4]], "r": [0,2,4,5,10]},
            "pose": {"orientation": [0.7,0.8,0], "position": [0,0,0]}})");
    bad(R"({"architecture": {"base": [[0,0,0],[1,0,0],[-4,-3,0],[3,7,-6],[9,-5,4]], "r": [0,2,4,5,10]},
            "pose": {"orientation": [0,0,0], "position": [0,0,0]}})");
}

TEST_CASE("parse_config normalizes a near-unit orientation with a warning") {
    JobConfig cfg = cli::parse_config(R"({
      "architecture": {"base": [[0,0,0],[1,0,0],[-4,-3,0],[3,7,-6],[9,-5,4]],
                       "r": [0,2,4,5,10]},
      "pose": {"orientation": [0.6000000001, 0.8, 0], "position": [2,3,4]}
    })");
    CHECK(cfg.pose.dir.norm() == doctest::Approx(1.0).epsilon(1e-15));
    REQUIRE(cfg.warnings.size() == 1);
    CHECK(cfg.warnings[0].find("normalized") != std::string::npos);
}

TEST_CASE("mode names round-trip") {
    for (const char* name : {"fixed-orientation", "fixed-position", "general", "equiform"}) {
        auto m = cli::mode_from(name);
        REQUIRE(m.has_value());
        CHECK(std::string(cli::mode_name(*m)) == name);
    }
    CHECK(!cli::mode_from("diagonal").has_value());
}

TEST_CASE("check reports a regular pose and a singular pose") {
    JobConfig cfg = cli::parse_config(kReference);

    Run reg = run(cli::cmd_check, cfg);
    REQUIRE(reg.code == 0);
    auto ls = lines(reg.out);
    REQUIRE(ls.size() == 2);
    CHECK(ls[0] == "F,sigma_min,sigma_ratio,singular");
    auto f = split(ls[1]);
    REQUIRE(f.size() == 4);
    CHECK(std::stod(f[0]) == doctest::Approx(6.605672727).epsilon(1e-8));
    CHECK(std::stod(f[1]) > 1.0);
    CHECK(f[3] == "false");

    // closest singular pose at the reference orientation: F vanishes there
    JobConfig sing = cfg;
    sing.pose.pos = Eigen::Vector3d(2.551763090, 2.637467970, 0.1144666998);
    Run hit = run(cli::cmd_check, sing);
    REQUIRE(hit.code == 0);
    auto fs = split(lines(hit.out)[1]);
    CHECK(std::abs(std::stod(fs[0])) < 1e-6);
    CHECK(fs[3] == "true");

    // json carries the same verdicts
    sing.format = "json";
    Run js = run(cli::cmd_check, sing);
    CHECK(js.code == 0);
    CHECK(js.out.find("\"singular\": true") != std::string::npos);
    cfg.format = "json";
    Run jr = run(cli::cmd_check, cfg);
    CHECK(jr.out.find("\"singular\": false") != std::string::npos);
}

TEST_CASE("param emits the requested sample count and is deterministic") {
    JobConfig cfg = cli::parse_config(kReference);
    cfg.param_count = 37;

    Run a = run(cli::cmd_param, cfg);
    Run b = run(cli::cmd_param, cfg);
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);

    auto ls = lines(a.out);
    REQUIRE(ls.size() == 38);
    CHECK(ls[0] == "index,t1,t2,t3,t4,a,u,v,w,px,py,pz,status");
    for (std::size_t i = 1; i < ls.size(); ++i) {
        auto f = split(ls[i]);
        REQUIRE(f.size() == 13);
        CHECK(std::stoi(f[0]) == int(i) - 1);
        if (f[12] != "ok") continue;
        double u = std::stod(f[6]), v = std::stod(f[7]), w = std::stod(f[8]);
        CHECK(std::abs(u * u + v * v + w * w - 1) < 1e-9);
    }
}

TEST_CASE("param accepts explicit parameter rows") {
    JobConfig cfg = cli::parse_config(kReference);
    cfg.param_t = {{0.0, -3.0, -6.0, -7.0}, {1.0, 2.0, 3.0, 4.0}};

    Run r = run(cli::cmd_param, cfg);
    REQUIRE(r.code == 0);
    auto ls = lines(r.out);
    REQUIRE(ls.size() == 3);
    auto f = split(ls[1]);
    CHECK(std::stod(f[1]) == doctest::Approx(0.0));
    CHECK(std::stod(f[4]) == doctest::Approx(-7.0));
}

TEST_CASE("param config section is honored") {
    JobConfig cfg = cli::parse_config(R"({
      "architecture": {"base": [[0,0,0],[1,0,0],[-4,-3,0],[3,7,-6],[9,-5,4]],
                       "r": [0,2,4,5,10]},
      "pose": {"orientation": [0,0,1], "position": [0,0,0]},
      "param": {"count": 5, "range": 2, "t": [[1,1,1,1]]}
    })");
    CHECK(cfg.param_count == 5);
    CHECK(cfg.param_range == doctest::Approx(2.0));
    REQUIRE(cfg.param_t.size() == 1);
    CHECK(cfg.param_t[0][2] == doctest::Approx(1.0));
}

TEST_CASE("dist fixed-orientation reproduces the pedal table over csv") {
    JobConfig cfg = cli::parse_config(kReference);

    Run a = run(cli::cmd_dist, cfg);
    Run b = run(cli::cmd_dist, cfg);
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);  // identical bytes on rerun

    auto ls = lines(a.out);
    REQUIRE(ls.size() == 5);
    CHECK(ls[0] == "index,u,v,w,px,py,pz,lambda1,lambda2,mu,distance,residual");

    const double want[4] = {3.941223289, 13.21156706, 14.30080937, 46.46478105};
    for (int i = 0; i < 4; ++i) {
        auto f = split(ls[std::size_t(i) + 1]);
        REQUIRE(f.size() == 12);
        CHECK(std::stod(f[1]) == doctest::Approx(0.6).epsilon(1e-12));
        CHECK(std::stod(f[2]) == doctest::Approx(0.8).epsilon(1e-12));
        CHECK(f[8].empty());  // lambda2 absent in this regime
        CHECK(f[9].empty());  // mu absent outside equiform
        CHECK(std::stod(f[10]) == doctest::Approx(want[i]).epsilon(1e-8));
        CHECK(std::stod(f[11]) < 1e-10);
    }
}

TEST_CASE("dist json carries nulls and the complex count") {
    JobConfig cfg = cli::parse_config(kReference);
    cfg.format = "json";

    Run r = run(cli::cmd_dist, cfg);
    REQUIRE(r.code == 0);
    CHECK(r.out.find("\"mode\": \"fixed-orientation\"") != std::string::npos);
    CHECK(r.out.find("\"complex_count\": 2") != std::string::npos);
    CHECK(r.out.find("\"lambda2\": null") != std::string::npos);
    CHECK(r.out.find("\"mu\": null") != std::string::npos);

    cfg.mode = distance::Mode::fixed_position;
    Run p = run(cli::cmd_dist, cfg);
    REQUIRE(p.code == 0);
    CHECK(p.out.find("\"complex_count\": 6") != std::string::npos);

    cfg.mode = distance::Mode::general;
    cfg.starts = 400;
    Run g = run(cli::cmd_dist, cfg);
    REQUIRE(g.code == 0);
    CHECK(g.out.find("\"complex_count\": null") != std::string::npos);
}

TEST_CASE("dist reports solver failure with exit code 3") {
    JobConfig cfg = cli::parse_config(kReference);
    cfg.mode = distance::Mode::general;
    cfg.starts = 0;

    Run r = run(cli::cmd_dist, cfg);
    CHECK(r.code == 3);
    CHECK(r.out.empty());
    CHECK(!r.err.empty());
}

TEST_CASE("mesh emits a watertight record stream") {
    JobConfig cfg = cli::parse_config(kReference);
    cfg.mesh_grid = 24;
    cfg.mesh_slices = 48;

    Run a = run(cli::cmd_mesh, cfg);
    Run b = run(cli::cmd_mesh, cfg);
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);

    auto ls = lines(a.out);
    REQUIRE(ls.size() > 1);
    CHECK(ls[0] == "record,index,a,b,c");

    int vertices = 0, triangles = 0, curve = 0;
    for (std::size_t i = 1; i < ls.size(); ++i) {
        auto f = split(ls[i]);
        REQUIRE(f.size() == 5);
        if (f[0] == "vertex") ++vertices;
        else if (f[0] == "curve") ++curve;
        else if (f[0] == "triangle") {
            ++triangles;
            // indices must reference emitted vertices
            CHECK(std::stoi(f[2]) >= 0);
            CHECK(std::stoi(f[3]) >= 0);
            CHECK(std::stoi(f[4]) >= 0);
        } else FAIL("unknown record kind: ", f[0]);
    }
    CHECK(vertices > 50);
    CHECK(triangles > 50);
    CHECK(curve > 10);

    // triangle indices bounded by vertex count
    for (std::size_t i = 1; i < ls.size(); ++i) {
        auto f = split(ls[i]);
        if (f[0] != "triangle") continue;
        CHECK(std::stoi(f[2]) < vertices);
        CHECK(std::stoi(f[3]) < vertices);
        CHECK(std::stoi(f[4]) < vertices);
    }

    // every curve sample is a unit orientation on the singularity surface
    for (std::size_t i = 1; i < ls.size(); ++i) {
        auto f = split(ls[i]);
        if (f[0] != "curve") continue;
        double u = std::stod(f[2]), v = std::stod(f[3]), w = std::stod(f[4]);
        CHECK(std::abs(u * u + v * v + w * w - 1) < 1e-8);
    }
}
