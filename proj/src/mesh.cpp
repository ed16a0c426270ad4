#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <vector>

#include "pentasing/cli.hpp"
#include "pentasing/errors.hpp"

namespace pentasing::cli {

namespace {

struct V3 {
    double x, y, z;
};

// quadric sampled as two z-sheets over an (x,y) grid; cells whose four
// corners exist on one sheet become two triangles
struct QuadricMesh {
    std::vector<V3> vertices;
    std::vector<std::array<int, 3>> triangles;
};

QuadricMesh mesh_quadric(const pentapod::Quadric& q, const Eigen::Vector3d& center, double half,
                         int n) {
    QuadricMesh m;
    std::map<std::array<int, 3>, int> index;  // (i, j, sheet) -> vertex id
    auto solve_z = [&](double x, double y, int sheet, double& z) {
        double a = q.Q(2, 2);
        double b = (q.Q(0, 2) + q.Q(2, 0)) * x + (q.Q(1, 2) + q.Q(2, 1)) * y + q.b(2);
        double c = q.Q(0, 0) * x * x + (q.Q(0, 1) + q.Q(1, 0)) * x * y + q.Q(1, 1) * y * y +
                   q.b(0) * x + q.b(1) * y + q.c;
        const double tiny = 1e-12 * (1 + q.Q.cwiseAbs().maxCoeff());
        if (std::abs(a) > tiny) {
            double disc = b * b - 4 * a * c;
            if (disc < 0) return false;
            double s = std::sqrt(disc);
            z = sheet == 0 ? (-b - s) / (2 * a) : (-b + s) / (2 * a);
            return true;
        }
        if (sheet != 0 || std::abs(b) <= tiny) return false;
        z = -c / b;
        return true;
    };
    auto vertex_at = [&](int i, int j, int sheet) {
        auto key = std::array<int, 3>{i, j, sheet};
        auto it = index.find(key);
        if (it != index.end()) return it->second;
        double x = center.x() + half * (2.0 * i / (n - 1) - 1);
        double y = center.y() + half * (2.0 * j / (n - 1) - 1);
        double z;
        if (!solve_z(x, y, sheet, z) || std::abs(z - center.z()) > half) {
            index[key] = -1;
            return -1;
        }
        int id = static_cast<int>(m.vertices.size());
        m.vertices.push_back({x, y, z});
        index[key] = id;
        return id;
    };
    for (int i = 0; i + 1 < n; ++i)
        for (int j = 0; j + 1 < n; ++j)
            for (int sheet = 0; sheet < 2; ++sheet) {
                int a = vertex_at(i, j, sheet), b = vertex_at(i + 1, j, sheet);
                int c = vertex_at(i, j + 1, sheet), d = vertex_at(i + 1, j + 1, sheet);
                if (a < 0 || b < 0 || c < 0 || d < 0) continue;
                double zs[4] = {m.vertices[std::size_t(a)].z, m.vertices[std::size_t(b)].z,
                                m.vertices[std::size_t(c)].z, m.vertices[std::size_t(d)].z};
                auto [lo, hi] = std::minmax_element(zs, zs + 4);
                if (*hi - *lo > half) continue;  // fold of the sheet, not a facet
                m.triangles.push_back({a, b, d});
                m.triangles.push_back({a, d, c});
            }
    return m;
}

// the spherical curve sampled on latitude slices, then chained greedily into
// polylines; deterministic given the slice count
std::vector<std::vector<V3>> sample_curve(const pentapod::PositionCone& cone, int slices) {
    std::vector<V3> pts;
    auto value = [&](double a, double s, double w) {
        Eigen::Vector3d i{s * std::cos(a), s * std::sin(a), w};
        return cone.value(i);
    };
    const double two_pi = 2 * M_PI;
    for (int k = 1; k < slices; ++k) {
        double w = -1 + 2.0 * k / slices;
        double s = std::sqrt(std::max(0.0, 1 - w * w));
        int steps = 2 * slices;
        double prev = value(0, s, w);
        for (int t = 1; t <= steps; ++t) {
            double a1 = two_pi * t / steps;
            double cur = value(a1, s, w);
            if ((prev < 0) != (cur < 0)) {
                double lo = two_pi * (t - 1) / steps, hi = a1;
                for (int it = 0; it < 80; ++it) {
                    double mid = (lo + hi) / 2;
                    if ((value(lo, s, w) < 0) != (value(mid, s, w) < 0))
                        hi = mid;
                    else
                        lo = mid;
                }
                double a = (lo + hi) / 2;
                pts.push_back({s * std::cos(a), s * std::sin(a), w});
            }
            prev = cur;
        }
    }

    std::vector<std::vector<V3>> chains;
    std::vector<bool> used(pts.size(), false);
    const double tau = 8.0 / slices;
    auto dist2 = [](const V3& a, const V3& b) {
        return (a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y) + (a.z - b.z) * (a.z - b.z);
    };
    auto nearest = [&](const V3& p) {
        int best = -1;
        double bd = tau * tau;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (used[i]) continue;
            double d = dist2(p, pts[i]);
            if (d < bd) {
                bd = d;
                best = static_cast<int>(i);
            }
        }
        return best;
    };
    for (std::size_t start = 0; start < pts.size(); ++start) {
        if (used[start]) continue;
        used[start] = true;
        std::vector<V3> chain{pts[start]};
        for (int end = 0; end < 2; ++end) {
            while (true) {
                int nx = nearest(end == 0 ? chain.back() : chain.front());
                if (nx < 0) break;
                used[std::size_t(nx)] = true;
                if (end == 0)
                    chain.push_back(pts[std::size_t(nx)]);
                else
                    chain.insert(chain.begin(), pts[std::size_t(nx)]);
            }
        }
        if (chain.size() >= 2) chains.push_back(std::move(chain));
    }
    return chains;
}

}  // namespace

int cmd_mesh(const JobConfig& cfg, std::ostream& out, std::ostream& err) {
    for (const std::string& w : cfg.warnings) err << "warning: " << w << "\n";
    pentapod::SingularityModel model = pentapod::extract_F(cfg.arch);

    pentapod::Quadric q = pentapod::orientation_quadric(model, cfg.pose.dir);
    double scale = std::max(q.Q.cwiseAbs().maxCoeff(), q.b.cwiseAbs().maxCoeff());
    if (scale < 1e-14 * (1 + std::abs(q.c))) {
        err << "error: orientation quadric is constant; nothing to mesh\n";
        return 3;
    }

    QuadricMesh mesh = mesh_quadric(q, cfg.pose.pos, cfg.mesh_box, cfg.mesh_grid);
    pentapod::PositionCone cone = pentapod::position_cone(model, cfg.pose.pos);
    std::vector<std::vector<V3>> curves = sample_curve(cone, cfg.mesh_slices);

    if (cfg.format == "json") {
        out << "{\"vertices\": [";
        for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
            const V3& v = mesh.vertices[i];
            out << (i ? ", " : "") << '[' << fmt(v.x) << ", " << fmt(v.y) << ", " << fmt(v.z)
                << ']';
        }
        out << "], \"triangles\": [";
        for (std::size_t i = 0; i < mesh.triangles.size(); ++i) {
            const auto& t = mesh.triangles[i];
            out << (i ? ", " : "") << '[' << t[0] << ", " << t[1] << ", " << t[2] << ']';
        }
        out << "], \"curves\": [";
        for (std::size_t c = 0; c < curves.size(); ++c) {
            out << (c ? ", " : "") << '[';
            for (std::size_t i = 0; i < curves[c].size(); ++i) {
                const V3& v = curves[c][i];
                out << (i ? ", " : "") << '[' << fmt(v.x) << ", " << fmt(v.y) << ", " << fmt(v.z)
                    << ']';
            }
            out << ']';
        }
        out << "]}\n";
    } else {
        out << "record,index,a,b,c\n";
        for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
            const V3& v = mesh.vertices[i];
            out << "vertex," << i << ',' << fmt(v.x) << ',' << fmt(v.y) << ',' << fmt(v.z) << '\n';
        }
        for (std::size_t i = 0; i < mesh.triangles.size(); ++i) {
            const auto& t = mesh.triangles[i];
            out << "triangle," << i << ',' << t[0] << ',' << t[1] << ',' << t[2] << '\n';
        }
        for (std::size_t c = 0; c < curves.size(); ++c)
            for (const V3& v : curves[c])
                out << "curve," << c << ',' << fmt(v.x) << ',' << fmt(v.y) << ',' << fmt(v.z)
                    << '\n';
    }
    return 0;
}

}  // namespace pentasing::cli
