#include <Eigen/SVD>
#include <ostream>
#include <string>
#include <vector>

#include "pentasing/cli.hpp"
#include "pentasing/errors.hpp"
#include "pentasing/ratparam.hpp"
#include "pentasing/rng.hpp"

namespace pentasing::cli {

namespace {

using distance::Mode;
using distance::PedalPoint;
using distance::PedalSet;

std::string opt_field(const std::optional<double>& v) { return v ? fmt(*v) : std::string(); }

std::string json_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') {
            out += '\\';
            out += c;
        } else if (c == '\n') {
            out += "\\n";
        } else {
            out += c;
        }
    }
    return out;
}

std::string opt_json(const std::optional<double>& v) { return v ? fmt(*v) : std::string("null"); }

void emit_warnings(const JobConfig& cfg, const std::vector<std::string>& extra,
                   std::ostream& err) {
    for (const std::string& w : cfg.warnings) err << "warning: " << w << "\n";
    for (const std::string& w : extra) err << "warning: " << w << "\n";
}

}  // namespace

int cmd_check(const JobConfig& cfg, std::ostream& out, std::ostream& err) {
    emit_warnings(cfg, {}, err);
    pentapod::SingularityModel model = pentapod::extract_F(cfg.arch);
    double f = model.eval(cfg.pose);

    Eigen::Matrix<double, 5, 6> j = pentapod::jacobian(cfg.arch, cfg.pose);
    Eigen::JacobiSVD<Eigen::Matrix<double, 5, 6>> svd(j);
    double sigma_min = svd.singularValues()(4);
    auto [singular, ratio] = pentapod::is_singular(cfg.arch, cfg.pose);

    if (cfg.format == "json") {
        out << "{\"F\": " << fmt(f) << ", \"sigma_min\": " << fmt(sigma_min)
            << ", \"sigma_ratio\": " << fmt(ratio)
            << ", \"singular\": " << (singular ? "true" : "false") << "}\n";
    } else {
        out << "F,sigma_min,sigma_ratio,singular\n";
        out << fmt(f) << ',' << fmt(sigma_min) << ',' << fmt(ratio) << ','
            << (singular ? "true" : "false") << '\n';
    }
    return 0;
}

int cmd_param(const JobConfig& cfg, std::ostream& out, std::ostream& err) {
    emit_warnings(cfg, {}, err);
    pentapod::SingularityModel model = pentapod::extract_F(cfg.arch);
    ratparam::Parametrization<double> par(model);

    std::vector<std::array<double, 4>> ts = cfg.param_t;
    if (ts.empty()) {
        constexpr unsigned bases[4] = {2, 3, 5, 7};
        for (int i = 0; i < cfg.param_count; ++i) {
            std::array<double, 4> t{};
            for (int k = 0; k < 4; ++k)
                t[std::size_t(k)] =
                    cfg.param_range * (2 * halton(std::uint64_t(i) + 1, bases[k]) - 1);
            ts.push_back(t);
        }
    }

    const bool json = cfg.format == "json";
    if (json)
        out << "{\"records\": [";
    else
        out << "index,t1,t2,t3,t4,a,u,v,w,px,py,pz,status\n";

    for (std::size_t i = 0; i < ts.size(); ++i) {
        const auto& t = ts[i];
        std::string status = "ok", reason;
        ratparam::ParamPoint<double> pp;
        try {
            pp = par.param_point(t);
        } catch (const exclusion_error& e) {
            status = "excluded";
            reason = e.what();
        }
        if (json) {
            out << (i ? ", " : "") << "{\"index\": " << i << ", \"t\": [" << fmt(t[0]) << ", "
                << fmt(t[1]) << ", " << fmt(t[2]) << ", " << fmt(t[3]) << "]";
            if (status == "ok") {
                out << ", \"a\": " << fmt(pp.a) << ", \"pose\": [";
                for (int k = 0; k < 6; ++k) out << (k ? ", " : "") << fmt(pp.xi[std::size_t(k)]);
                out << "], \"status\": \"ok\"}";
            } else {
                out << ", \"status\": \"excluded\", \"reason\": \"" << json_escape(reason)
                    << "\"}";
            }
        } else {
            out << i;
            for (int k = 0; k < 4; ++k) out << ',' << fmt(t[std::size_t(k)]);
            if (status == "ok") {
                out << ',' << fmt(pp.a);
                for (int k = 0; k < 6; ++k) out << ',' << fmt(pp.xi[std::size_t(k)]);
            } else {
                out << ",,,,,,,";
            }
            out << ',' << status << '\n';
        }
    }
    if (json) out << "]}\n";
    return 0;
}

int cmd_dist(const JobConfig& cfg, std::ostream& out, std::ostream& err) {
    emit_warnings(cfg, {}, err);
    pentapod::SingularityModel model = pentapod::extract_F(cfg.arch);

    PedalSet set;
    try {
        distance::SolveOptions opts;
        opts.seed = cfg.seed;
        opts.starts = cfg.starts;
        opts.box = cfg.box;
        opts.tol = cfg.tol;
        switch (cfg.mode) {
            case Mode::fixed_orientation:
                set = distance::closest_fixed_orientation(model, cfg.arch, cfg.pose);
                break;
            case Mode::fixed_position:
                set = distance::closest_fixed_position(model, cfg.arch, cfg.pose);
                break;
            case Mode::general:
                set = distance::closest_general(model, cfg.arch, cfg.pose, opts);
                break;
            case Mode::equiform:
                set = distance::closest_equiform(model, cfg.arch, cfg.pose, opts);
                break;
        }
    } catch (const solver_error& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    } catch (const degenerate_error& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    }
    for (const std::string& w : set.warnings) err << "warning: " << w << "\n";

    if (cfg.format == "json") {
        out << "{\"mode\": \"" << mode_name(set.mode) << "\", \"complex_count\": "
            << (set.complex_count ? std::to_string(*set.complex_count) : std::string("null"))
            << ", \"points\": [";
        for (std::size_t i = 0; i < set.points.size(); ++i) {
            const PedalPoint& p = set.points[i];
            out << (i ? ", " : "") << "{\"index\": " << i << ", \"u\": " << fmt(p.pose.dir[0])
                << ", \"v\": " << fmt(p.pose.dir[1]) << ", \"w\": " << fmt(p.pose.dir[2])
                << ", \"px\": " << fmt(p.pose.pos[0]) << ", \"py\": " << fmt(p.pose.pos[1])
                << ", \"pz\": " << fmt(p.pose.pos[2]) << ", \"lambda1\": " << opt_json(p.lambda1)
                << ", \"lambda2\": " << opt_json(p.lambda2) << ", \"mu\": " << opt_json(p.mu)
                << ", \"distance\": " << fmt(p.distance) << ", \"residual\": " << fmt(p.residual)
                << "}";
        }
        out << "], \"warnings\": [";
        for (std::size_t i = 0; i < set.warnings.size(); ++i)
            out << (i ? ", " : "") << '"' << json_escape(set.warnings[i]) << '"';
        out << "]}\n";
    } else {
        out << "index,u,v,w,px,py,pz,lambda1,lambda2,mu,distance,residual\n";
        for (std::size_t i = 0; i < set.points.size(); ++i) {
            const PedalPoint& p = set.points[i];
            out << i << ',' << fmt(p.pose.dir[0]) << ',' << fmt(p.pose.dir[1]) << ','
                << fmt(p.pose.dir[2]) << ',' << fmt(p.pose.pos[0]) << ',' << fmt(p.pose.pos[1])
                << ',' << fmt(p.pose.pos[2]) << ',' << opt_field(p.lambda1) << ','
                << opt_field(p.lambda2) << ',' << opt_field(p.mu) << ',' << fmt(p.distance) << ','
                << fmt(p.residual) << '\n';
        }
    }
    return 0;
}

}  // namespace pentasing::cli
