#include "pentasing/distance.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "pentasing/errors.hpp"
#include "pentasing/polyroots.hpp"
#include "pentasing/rng.hpp"
#include "pentasing/unipoly.hpp"

namespace pentasing::distance {

using poly::MultiPoly;
using poly::UniPoly;
using boost::multiprecision::abs;
using boost::multiprecision::sqrt;

namespace {

constexpr double kRadToDeg = 180.0 / std::numbers::pi;

void require_unit(const Eigen::Vector3d& dir) {
    if (std::abs(dir.squaredNorm() - 1.0) > 1e-9)
        throw std::invalid_argument("orientation must be unit length");
}

std::array<double, 6> flat(const Configuration& c) {
    return {c.dir.x(), c.dir.y(), c.dir.z(), c.pos.x(), c.pos.y(), c.pos.z()};
}

bool pose_less(const Configuration& a, const Configuration& b) {
    auto xa = flat(a), xb = flat(b);
    return std::lexicographical_compare(xa.begin(), xa.end(), xb.begin(), xb.end());
}

void sort_points(std::vector<PedalPoint>& pts) {
    std::sort(pts.begin(), pts.end(), [](const PedalPoint& a, const PedalPoint& b) {
        if (a.distance != b.distance) return a.distance < b.distance;
        return pose_less(a.pose, b.pose);
    });
}

double pose_gap(const Configuration& a, const Configuration& b) {
    auto xa = flat(a), xb = flat(b);
    double s = 0;
    for (int k = 0; k < 6; ++k) s += (xa[std::size_t(k)] - xb[std::size_t(k)]) * (xa[std::size_t(k)] - xb[std::size_t(k)]);
    return std::sqrt(s);
}

// ---------------------------------------------------------------------------
// exact 3x3 rational linear algebra for the fixed-orientation multiplier poly

using RatMat3 = std::array<std::array<Rat, 3>, 3>;
using RatVec3 = std::array<Rat, 3>;

Rat det3(const RatMat3& m) {
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
           m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

RatVec3 adj_mul(const RatMat3& m, const RatVec3& v) {
    RatMat3 a;
    a[0][0] = m[1][1] * m[2][2] - m[1][2] * m[2][1];
    a[0][1] = m[0][2] * m[2][1] - m[0][1] * m[2][2];
    a[0][2] = m[0][1] * m[1][2] - m[0][2] * m[1][1];
    a[1][0] = m[1][2] * m[2][0] - m[1][0] * m[2][2];
    a[1][1] = m[0][0] * m[2][2] - m[0][2] * m[2][0];
    a[1][2] = m[0][2] * m[1][0] - m[0][0] * m[1][2];
    a[2][0] = m[1][0] * m[2][1] - m[1][1] * m[2][0];
    a[2][1] = m[0][1] * m[2][0] - m[0][0] * m[2][1];
    a[2][2] = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    RatVec3 r{Rat(0), Rat(0), Rat(0)};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r[std::size_t(i)] += a[std::size_t(i)][std::size_t(j)] * v[std::size_t(j)];
    return r;
}

struct RatQuadric {
    RatMat3 A;
    RatVec3 b;
    Rat c;
    RatVec3 g;

    RatMat3 system(const Rat& lam) const {
        RatMat3 m;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                m[std::size_t(i)][std::size_t(j)] = Rat(2) * lam * A[std::size_t(i)][std::size_t(j)] + (i == j ? Rat(2) : Rat(0));
        return m;
    }

    RatVec3 rhs(const Rat& lam) const {
        RatVec3 r;
        for (int i = 0; i < 3; ++i) r[std::size_t(i)] = Rat(2) * g[std::size_t(i)] - lam * b[std::size_t(i)];
        return r;
    }

    // F(p(lam)) * det(M)^2 with M p = rhs solved by the adjugate, all exact
    Rat cleared_value(const Rat& lam) const {
        RatMat3 m = system(lam);
        Rat d = det3(m);
        RatVec3 p = adj_mul(m, rhs(lam));
        Rat quad(0), lin(0);
        for (int i = 0; i < 3; ++i) {
            lin += b[std::size_t(i)] * p[std::size_t(i)];
            for (int j = 0; j < 3; ++j) quad += p[std::size_t(i)] * A[std::size_t(i)][std::size_t(j)] * p[std::size_t(j)];
        }
        return quad + d * lin + c * d * d;
    }
};

// ---------------------------------------------------------------------------
// dense BigFloat Newton with partial pivoting, shared by the polish stages

bool lin_solve_hp(std::vector<BigFloat>& a, std::vector<BigFloat>& rhs, int n) {
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (abs(a[std::size_t(r * n + col)]) > abs(a[std::size_t(piv * n + col)])) piv = r;
        if (a[std::size_t(piv * n + col)] == 0) return false;
        if (piv != col) {
            for (int j = 0; j < n; ++j) std::swap(a[std::size_t(col * n + j)], a[std::size_t(piv * n + j)]);
            std::swap(rhs[std::size_t(col)], rhs[std::size_t(piv)]);
        }
        for (int r = col + 1; r < n; ++r) {
            BigFloat f = a[std::size_t(r * n + col)] / a[std::size_t(col * n + col)];
            if (f == 0) continue;
            for (int j = col; j < n; ++j) a[std::size_t(r * n + j)] -= f * a[std::size_t(col * n + j)];
            rhs[std::size_t(r)] -= f * rhs[std::size_t(col)];
        }
    }
    for (int r = n - 1; r >= 0; --r) {
        BigFloat s = rhs[std::size_t(r)];
        for (int j = r + 1; j < n; ++j) s -= a[std::size_t(r * n + j)] * rhs[std::size_t(j)];
        rhs[std::size_t(r)] = s / a[std::size_t(r * n + r)];
    }
    return true;
}

// fn(x, e, mag) fills residuals and their magnitude scales; jac(x, J) the
// row-major n x n Jacobian. Plain steps: callers start near a solution.
struct HpSystem {
    int n;
    std::function<void(const BigFloat*, BigFloat*, BigFloat*)> fn;
    std::function<void(const BigFloat*, BigFloat*)> jac;
};

double normalized_residual_hp(const HpSystem& sys, const BigFloat* x) {
    std::vector<BigFloat> e(std::size_t(sys.n)), mag(std::size_t(sys.n));
    sys.fn(x, e.data(), mag.data());
    BigFloat worst(0);
    for (int k = 0; k < sys.n; ++k) {
        BigFloat r = abs(e[std::size_t(k)]) / (1 + mag[std::size_t(k)]);
        if (r > worst) worst = r;
    }
    return to_double(worst);
}

bool newton_polish_hp(const HpSystem& sys, BigFloat* x, int iters = 8) {
    std::vector<BigFloat> e(std::size_t(sys.n)), mag(std::size_t(sys.n)), J(std::size_t(sys.n * sys.n));
    for (int it = 0; it < iters; ++it) {
        sys.fn(x, e.data(), mag.data());
        sys.jac(x, J.data());
        std::vector<BigFloat> rhs(std::size_t(sys.n));
        for (int k = 0; k < sys.n; ++k) rhs[std::size_t(k)] = -e[std::size_t(k)];
        std::vector<BigFloat> a = J;
        if (!lin_solve_hp(a, rhs, sys.n)) return false;
        for (int k = 0; k < sys.n; ++k) x[std::size_t(k)] += rhs[std::size_t(k)];
    }
    return true;
}

// ---------------------------------------------------------------------------
// the general / equiform KKT system (x = u,v,w,px,py,pz,[lambda1],lambda2)

struct KktSystem {
    const SingularityModel* model;
    MetricContext mc;
    Eigen::Vector3d gi, gp;
    bool equiform;

    int dim() const { return equiform ? 7 : 8; }

    template <typename K>
    void eval_t(const K* x, K* e, K* mag, const std::array<std::pair<K, K>, 6>& gf,
                const std::pair<K, K>& f) const {
        using std::abs;
        using boost::multiprecision::abs;
        const K mr(mc.mean_r), mr2(mc.mean_r2);
        K di[3], dp[3];
        for (int k = 0; k < 3; ++k) {
            di[k] = x[k] - K(gi[k]);
            dp[k] = x[k + 3] - K(gp[k]);
        }
        const K l1 = equiform ? K(0) : x[6];
        const K l2 = equiform ? x[6] : x[7];
        for (int k = 0; k < 6; ++k) {
            K gd, gdm;
            if (k < 3) {
                gd = 2 * mr2 * di[k] + 2 * mr * dp[k];
                gdm = abs(K(2 * mr2 * di[k])) + abs(K(2 * mr * dp[k]));
            } else {
                gd = 2 * dp[k - 3] + 2 * mr * di[k - 3];
                gdm = abs(K(2 * dp[k - 3])) + abs(K(2 * mr * di[k - 3]));
            }
            e[k] = gd + l2 * gf[std::size_t(k)].first;
            mag[k] = gdm + abs(K(l2)) * gf[std::size_t(k)].second;
            if (!equiform && k < 3) {
                e[k] += l1 * 2 * x[k];
                mag[k] += abs(K(l1 * 2 * x[k]));
            }
        }
        int row = 6;
        if (!equiform) {
            K n2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
            e[row] = n2 - 1;
            mag[row] = n2 + 1;
            ++row;
        }
        e[row] = f.first;
        mag[row] = f.second;
    }

    void eval(const double* x, double* e, double* mag) const {
        std::array<std::pair<double, double>, 6> gf;
        Eigen::Matrix<double, 6, 1> g = model->gradient(x);
        for (int k = 0; k < 6; ++k) gf[std::size_t(k)] = {g(k), std::abs(g(k))};
        eval_t(x, e, mag, gf, model->eval_mag(x));
    }

    void eval_hp(const BigFloat* x, BigFloat* e, BigFloat* mag) const {
        std::array<BigFloat, 6> g;
        model->gradient_hp(x, g.data());
        std::array<std::pair<BigFloat, BigFloat>, 6> gf;
        for (int k = 0; k < 6; ++k) gf[std::size_t(k)] = {g[std::size_t(k)], abs(g[std::size_t(k)])};
        eval_t(x, e, mag, gf, model->eval_mag_hp(x));
    }

    void jac(const double* x, Eigen::MatrixXd& J) const {
        const int n = dim();
        J.setZero(n, n);
        const double l1 = equiform ? 0.0 : x[6];
        const double l2 = equiform ? x[6] : x[7];
        Eigen::Matrix<double, 6, 6> h = model->hessian(x);
        Eigen::Matrix<double, 6, 1> g = model->gradient(x);
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j) J(i, j) = l2 * h(i, j);
        for (int k = 0; k < 3; ++k) {
            J(k, k) += 2 * mc.mean_r2;
            J(k, k + 3) += 2 * mc.mean_r;
            J(k + 3, k) += 2 * mc.mean_r;
            J(k + 3, k + 3) += 2;
        }
        const int fcol = equiform ? 6 : 7;
        for (int k = 0; k < 6; ++k) {
            J(k, fcol) = g(k);
            J(fcol, k) = g(k);
        }
        if (!equiform) {
            for (int k = 0; k < 3; ++k) {
                J(k, k) += 2 * l1;
                J(k, 6) = 2 * x[k];
                J(6, k) = 2 * x[k];
            }
        }
    }

    void jac_hp(const BigFloat* x, BigFloat* J) const {
        const int n = dim();
        for (int k = 0; k < n * n; ++k) J[k] = 0;
        const BigFloat l1 = equiform ? BigFloat(0) : x[6];
        const BigFloat l2 = equiform ? x[6] : x[7];
        std::array<BigFloat, 36> h;
        std::array<BigFloat, 6> g;
        model->hessian_hp(x, h.data());
        model->gradient_hp(x, g.data());
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j) J[i * n + j] = l2 * h[std::size_t(i * 6 + j)];
        const BigFloat mr(mc.mean_r), mr2(mc.mean_r2);
        for (int k = 0; k < 3; ++k) {
            J[k * n + k] += 2 * mr2;
            J[k * n + k + 3] += 2 * mr;
            J[(k + 3) * n + k] += 2 * mr;
            J[(k + 3) * n + k + 3] += 2;
        }
        const int fcol = equiform ? 6 : 7;
        for (int k = 0; k < 6; ++k) {
            J[k * n + fcol] = g[std::size_t(k)];
            J[fcol * n + k] = g[std::size_t(k)];
        }
        if (!equiform) {
            for (int k = 0; k < 3; ++k) {
                J[k * n + k] += 2 * l1;
                J[k * n + 6] = 2 * x[k];
                J[6 * n + k] = 2 * x[k];
            }
        }
    }

    double normalized_residual(const double* x) const {
        const int n = dim();
        std::array<double, 8> e{}, mag{};
        eval(x, e.data(), mag.data());
        double worst = 0;
        for (int k = 0; k < n; ++k) worst = std::max(worst, std::abs(e[std::size_t(k)]) / (1 + mag[std::size_t(k)]));
        return worst;
    }

    HpSystem hp() const {
        return {dim(), [this](const BigFloat* x, BigFloat* e, BigFloat* m) { eval_hp(x, e, m); },
                [this](const BigFloat* x, BigFloat* J) { jac_hp(x, J); }};
    }
};

// damped Newton in double from a sampled start with a Levenberg fallback
// when the full step stalls; true once the normalized residual < 1e-12
// row/column equilibration before the QR solve: KKT systems mix multiplier
// scales of 1e4+ with constraint rows of 1e-3, and the raw condition number
// can exceed 1/eps even at well-separated roots
Eigen::VectorXd eq_solve(Eigen::MatrixXd J, Eigen::VectorXd e) {
    const int n = int(J.rows());
    Eigen::VectorXd dc(n);
    for (int k = 0; k < n; ++k) {
        double m = J.row(k).cwiseAbs().maxCoeff();
        double s = m > 0 ? 1 / m : 1;
        J.row(k) *= s;
        e(k) *= s;
    }
    for (int k = 0; k < n; ++k) {
        double m = J.col(k).cwiseAbs().maxCoeff();
        dc(k) = m > 0 ? 1 / m : 1;
        J.col(k) *= dc(k);
    }
    Eigen::VectorXd y = J.colPivHouseholderQr().solve(e);
    return dc.asDiagonal() * y;
}

// full Newton steps, no damping: wild iterates, but the only way to traverse
// from in-box starts to distant roots and large-multiplier roots
bool newton_pure(const KktSystem& sys, double* x, int max_iters = 150) {
    const int n = sys.dim();
    Eigen::VectorXd e(n);
    std::array<double, 8> ebuf{}, mbuf{};
    Eigen::MatrixXd J(n, n);
    for (int it = 0; it < max_iters; ++it) {
        if (sys.normalized_residual(x) < 1e-12) return true;
        sys.eval(x, ebuf.data(), mbuf.data());
        for (int k = 0; k < n; ++k) e(k) = ebuf[std::size_t(k)];
        sys.jac(x, J);
        Eigen::VectorXd step = eq_solve(J, -e);
        if (!step.allFinite()) return false;
        double snorm = 0, xnorm = 0;
        for (int k = 0; k < n; ++k) {
            x[k] += step(k);
            snorm = std::max(snorm, std::abs(step(k)));
            xnorm = std::max(xnorm, std::abs(x[k]));
        }
        if (!std::isfinite(xnorm) || xnorm > 1e10) return false;
        // double-precision stall at an ill-conditioned root: hand off to the
        // high-precision polish once the step noise floor is reached
        if (snorm < 1e-13 * (1 + xnorm)) break;
    }
    return sys.normalized_residual(x) < 1e-9;
}

bool newton_multistart(const KktSystem& sys, double* x, int max_iters = 200) {
    const int n = sys.dim();
    Eigen::VectorXd e(n);
    std::array<double, 8> ebuf{}, mbuf{};
    Eigen::MatrixXd J(n, n);
    auto sumsq = [&](const double* p) {
        sys.eval(p, ebuf.data(), mbuf.data());
        double s = 0;
        for (int k = 0; k < n; ++k) s += ebuf[std::size_t(k)] * ebuf[std::size_t(k)];
        return s;
    };
    double phi = sumsq(x);
    double mu = 0;
    for (int it = 0; it < max_iters; ++it) {
        if (sys.normalized_residual(x) < 1e-12) return true;
        sys.eval(x, ebuf.data(), mbuf.data());
        for (int k = 0; k < n; ++k) e(k) = ebuf[std::size_t(k)];
        sys.jac(x, J);
        std::array<double, 8> xt{};
        bool moved = false;
        if (mu == 0) {
            Eigen::VectorXd step = eq_solve(J, -e);
            if (step.allFinite()) {
                double t = 1;
                for (int half = 0; half < 10; ++half, t /= 2) {
                    for (int k = 0; k < n; ++k) xt[std::size_t(k)] = x[k] + t * step(k);
                    double pt = sumsq(xt.data());
                    if (std::isfinite(pt) && pt <= (1 - 1e-4 * t) * phi) {
                        for (int k = 0; k < n; ++k) x[k] = xt[std::size_t(k)];
                        phi = pt;
                        moved = true;
                        break;
                    }
                }
            }
            if (!moved) mu = 1e-3;  // switch to Levenberg steps in scaled units
        }
        if (mu > 0) {
            // Levenberg on the equilibrated system: damping acts in scaled units
            Eigen::MatrixXd js = J;
            Eigen::VectorXd es = e, dc(n);
            for (int k = 0; k < n; ++k) {
                double m = js.row(k).cwiseAbs().maxCoeff();
                double s = m > 0 ? 1 / m : 1;
                js.row(k) *= s;
                es(k) *= s;
            }
            for (int k = 0; k < n; ++k) {
                double m = js.col(k).cwiseAbs().maxCoeff();
                dc(k) = m > 0 ? 1 / m : 1;
                js.col(k) *= dc(k);
            }
            Eigen::MatrixXd jtj = js.transpose() * js;
            Eigen::VectorXd jte = js.transpose() * es;
            for (int tries = 0; tries < 20; ++tries) {
                Eigen::MatrixXd m = jtj;
                for (int k = 0; k < n; ++k) m(k, k) += mu;
                Eigen::VectorXd step = dc.asDiagonal() * m.ldlt().solve(-jte).eval();
                if (!step.allFinite()) break;
                for (int k = 0; k < n; ++k) xt[std::size_t(k)] = x[k] + step(k);
                double pt = sumsq(xt.data());
                if (std::isfinite(pt) && pt < phi) {
                    for (int k = 0; k < n; ++k) x[k] = xt[std::size_t(k)];
                    phi = pt;
                    mu = std::max(mu / 4, 1e-14);
                    moved = true;
                    break;
                }
                mu *= 10;
            }
            if (moved && mu < 1e-12) mu = 0;  // back to plain Newton near a root
        }
        if (!moved) return sys.normalized_residual(x) < 1e-12;
        double norm = 0;
        for (int k = 0; k < 6; ++k) norm = std::max(norm, std::abs(x[k]));
        if (norm > 1e8) return false;
    }
    return sys.normalized_residual(x) < 1e-12;
}

struct Accepted {
    std::array<double, 8> x;
    double residual;
};

PedalSet run_multistart(const SingularityModel& model, const Architecture& arch,
                        const Configuration& g, const SolveOptions& opts, bool equiform) {
    hp::init_precision();
    require_unit(g.dir);
    MetricContext mc = MetricContext::from(arch);
    PedalSet out;
    out.mode = equiform ? Mode::equiform : Mode::general;

    double box = opts.box;
    if (box <= 0) {
        PedalSet fo = closest_fixed_orientation(model, arch, g);
        if (fo.points.empty()) {
            box = 3 * (1 + g.pos.norm());
            out.warnings.push_back("fixed-orientation sizing failed; falling back to box " +
                                   std::to_string(box));
        } else {
            box = 3 * fo.points.front().distance;
        }
    }

    KktSystem sys{&model, mc, g.dir, g.pos, equiform};
    const int n = sys.dim();
    std::vector<Accepted> found;
    constexpr std::size_t kMaxDistinct = 512;
    bool overflow = false;

    for (int start = 0; start < opts.starts; ++start) {
        CounterRng rng(opts.seed, std::uint64_t(start) + 1);
        std::array<double, 8> x{};
        auto dir = rng.unit_vector();
        for (int k = 0; k < 3; ++k) {
            x[std::size_t(k)] = dir[std::size_t(k)];
            x[std::size_t(k + 3)] = g.pos[k] + box * rng.uniform(-1, 1);
        }
        // least-squares multipliers from the six gradient equations
        {
            Eigen::Matrix<double, 6, 1> gf = model.gradient(x.data());
            Eigen::Matrix<double, 6, 1> gd;
            for (int k = 0; k < 3; ++k) {
                double di = x[std::size_t(k)] - g.dir[k], dp = x[std::size_t(k + 3)] - g.pos[k];
                gd(k) = 2 * mc.mean_r2 * di + 2 * mc.mean_r * dp;
                gd(k + 3) = 2 * dp + 2 * mc.mean_r * di;
            }
            if (equiform) {
                double den = gf.squaredNorm();
                x[6] = den > 1e-280 ? -gf.dot(gd) / den : 0.0;
            } else {
                Eigen::Matrix<double, 6, 2> a;
                for (int k = 0; k < 6; ++k) {
                    a(k, 0) = k < 3 ? 2 * x[std::size_t(k)] : 0.0;
                    a(k, 1) = gf(k);
                }
                Eigen::Vector2d l = a.colPivHouseholderQr().solve(-gd);
                x[6] = std::isfinite(l(0)) ? l(0) : 0.0;
                x[7] = std::isfinite(l(1)) ? l(1) : 0.0;
            }
        }
        std::array<double, 8> x0 = x;
        if (!newton_pure(sys, x.data())) {
            x = x0;
            if (!newton_multistart(sys, x.data())) continue;
        }

        // double Newton already places the pose within ~1e-10, so duplicates
        // can be recognized before the expensive high-precision polish
        {
            bool seen = false;
            for (const Accepted& acc : found) {
                double s = 0;
                for (int k = 0; k < 6; ++k)
                    s += (acc.x[std::size_t(k)] - x[std::size_t(k)]) * (acc.x[std::size_t(k)] - x[std::size_t(k)]);
                if (std::sqrt(s) < 1e-8) {
                    seen = true;
                    break;
                }
            }
            if (seen) continue;
        }

        std::array<BigFloat, 8> xh;
        for (int k = 0; k < n; ++k) xh[std::size_t(k)] = x[std::size_t(k)];
        HpSystem hs = sys.hp();
        if (!newton_polish_hp(hs, xh.data())) continue;
        double residual = normalized_residual_hp(hs, xh.data());
        if (!(residual < opts.tol)) continue;
        for (int k = 0; k < n; ++k) x[std::size_t(k)] = to_double(xh[std::size_t(k)]);

        bool dup = false;
        for (Accepted& a : found) {
            double s = 0;
            for (int k = 0; k < 6; ++k) s += (a.x[std::size_t(k)] - x[std::size_t(k)]) * (a.x[std::size_t(k)] - x[std::size_t(k)]);
            if (std::sqrt(s) < 1e-7) {
                dup = true;
                if (residual < a.residual) a = {x, residual};
                break;
            }
        }
        if (dup) continue;
        if (found.size() >= kMaxDistinct) {
            overflow = true;
            continue;
        }
        found.push_back({x, residual});
    }

    if (overflow) out.warnings.push_back("duplicate limit exceeded; distinct point cap reached");
    if (found.empty()) throw solver_error("no pedal point found -- enlarge box/starts");

    for (const Accepted& a : found) {
        PedalPoint pt;
        pt.pose.dir = {a.x[0], a.x[1], a.x[2]};
        pt.pose.pos = {a.x[3], a.x[4], a.x[5]};
        if (equiform) {
            pt.lambda2 = a.x[6];
            pt.mu = pt.pose.dir.norm();
        } else {
            pt.lambda1 = a.x[6];
            pt.lambda2 = a.x[7];
        }
        pt.distance = metric_d(arch, g, pt.pose);
        pt.residual = a.residual;
        out.points.push_back(pt);
    }
    sort_points(out.points);
    return out;
}

// ---------------------------------------------------------------------------
// fixed position: KKT in (u,v,w,lambda1,lambda2) with lambda1 on the cone

struct SphereKkt {
    Eigen::Matrix3d A;
    Eigen::Vector3d b, ghat;

    void eval_hp(const BigFloat* x, BigFloat* e, BigFloat* mag) const {
        BigFloat Ai[3], n2(0);
        for (int i = 0; i < 3; ++i) {
            Ai[i] = BigFloat(b(i));
            for (int j = 0; j < 3; ++j) Ai[i] += 2 * BigFloat(A(i, j)) * x[j];
            n2 += x[i] * x[i];
        }
        const BigFloat l1 = x[3], l2 = x[4];
        for (int i = 0; i < 3; ++i) {
            e[i] = 2 * (x[i] - BigFloat(ghat(i))) + l1 * Ai[i] + 2 * l2 * x[i];
            mag[i] = 2 * (abs(x[i]) + abs(BigFloat(ghat(i)))) + abs(l1 * Ai[i]) + abs(2 * l2 * x[i]);
        }
        BigFloat cval(0), cmag(0);
        for (int i = 0; i < 3; ++i) {
            BigFloat bi = BigFloat(b(i)) * x[i];
            cval += bi;
            cmag += abs(bi);
            for (int j = 0; j < 3; ++j) {
                BigFloat t = BigFloat(A(i, j)) * x[i] * x[j];
                cval += t;
                cmag += abs(t);
            }
        }
        e[3] = cval;
        mag[3] = cmag;
        e[4] = n2 - 1;
        mag[4] = n2 + 1;
    }

    void jac_hp(const BigFloat* x, BigFloat* J) const {
        for (int k = 0; k < 25; ++k) J[k] = 0;
        BigFloat Ai[3];
        for (int i = 0; i < 3; ++i) {
            Ai[i] = BigFloat(b(i));
            for (int j = 0; j < 3; ++j) Ai[i] += 2 * BigFloat(A(i, j)) * x[j];
        }
        const BigFloat l1 = x[3], l2 = x[4];
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) J[i * 5 + j] = l1 * 2 * BigFloat(A(i, j));
            J[i * 5 + i] += 2 + 2 * l2;
            J[i * 5 + 3] = Ai[i];
            J[i * 5 + 4] = 2 * x[i];
            J[3 * 5 + i] = Ai[i];
            J[4 * 5 + i] = 2 * x[i];
        }
    }

    HpSystem hp() const {
        return {5, [this](const BigFloat* x, BigFloat* e, BigFloat* m) { eval_hp(x, e, m); },
                [this](const BigFloat* x, BigFloat* J) { jac_hp(x, J); }};
    }
};

// evaluate a bivariate (v,w) rational polynomial as univariate in v at w = w0
UniPoly<BigFloat> at_w(const MultiPoly<Rat>& p, const BigFloat& w0) {
    auto cv = p.coeffs_in("v");
    std::vector<BigFloat> out;
    out.reserve(cv.size());
    for (const auto& ci : cv)
        out.push_back(poly::uni_convert<BigFloat>(poly::to_unipoly(ci, "w")).eval(w0));
    return UniPoly<BigFloat>(std::move(out));
}

void collect_sphere_point(const SphereKkt& kkt, const Eigen::Vector3d& seed,
                          const Eigen::Vector3d& ghat, double tol,
                          std::vector<PedalPoint>& pts) {
    std::array<BigFloat, 5> x{BigFloat(seed.x()), BigFloat(seed.y()), BigFloat(seed.z()),
                              BigFloat(0), BigFloat(0)};
    {
        // least-squares multipliers from the three gradient rows
        Eigen::Matrix<double, 3, 2> a;
        Eigen::Vector3d r;
        for (int i = 0; i < 3; ++i) {
            double Ai = kkt.b(i);
            for (int j = 0; j < 3; ++j) Ai += 2 * kkt.A(i, j) * seed(j);
            a(i, 0) = Ai;
            a(i, 1) = 2 * seed(i);
            r(i) = 2 * (seed(i) - ghat(i));
        }
        Eigen::Vector2d l = a.colPivHouseholderQr().solve(-r);
        if (l.allFinite()) {
            x[3] = l(0);
            x[4] = l(1);
        }
    }
    HpSystem hs = kkt.hp();
    if (!newton_polish_hp(hs, x.data(), 40)) return;
    double residual = normalized_residual_hp(hs, x.data());
    if (!(residual < tol)) return;

    PedalPoint pt;
    pt.pose.dir = {to_double(x[0]), to_double(x[1]), to_double(x[2])};
    if (std::abs(pt.pose.dir.squaredNorm() - 1.0) > 1e-8) return;
    pt.lambda1 = to_double(x[3]);
    pt.lambda2 = to_double(x[4]);
    pt.residual = residual;
    double dot = std::clamp(pt.pose.dir.dot(ghat), -1.0, 1.0);
    pt.distance = std::acos(dot) * kRadToDeg;
    for (const PedalPoint& q : pts)
        if ((q.pose.dir - pt.pose.dir).norm() < 1e-7) return;
    pts.push_back(pt);
}

}  // namespace

// ---------------------------------------------------------------------------

MetricContext MetricContext::from(const Architecture& arch) {
    MetricContext m;
    for (double rj : arch.r) {
        m.mean_r += rj / 5;
        m.mean_r2 += rj * rj / 5;
    }
    if (!(m.mean_r2 > m.mean_r * m.mean_r))
        throw degenerate_error("metric is not positive definite: anchor offsets all equal");
    return m;
}

double metric_d(const Architecture& arch, const Configuration& c1, const Configuration& c2) {
    double s = 0;
    for (int j = 0; j < 5; ++j) {
        Eigen::Vector3d d = (c1.pos + arch.r[std::size_t(j)] * c1.dir) -
                            (c2.pos + arch.r[std::size_t(j)] * c2.dir);
        s += d.squaredNorm();
    }
    return std::sqrt(s / 5);
}

PedalSet closest_fixed_orientation(const SingularityModel& model, const Architecture& arch,
                                   const Configuration& g) {
    (void)arch;
    hp::init_precision();
    require_unit(g.dir);
    pentapod::Quadric q = pentapod::orientation_quadric(model, g.dir);

    RatQuadric rq;
    for (int i = 0; i < 3; ++i) {
        rq.b[std::size_t(i)] = rat_from_double(q.b(i));
        rq.g[std::size_t(i)] = rat_from_double(g.pos(i));
        for (int j = 0; j < 3; ++j) rq.A[std::size_t(i)][std::size_t(j)] = rat_from_double(q.Q(i, j));
    }
    rq.c = rat_from_double(q.c);

    // Chebyshev-spaced rational nodes, rescaled until none hits det(M) = 0
    std::vector<Rat> xs;
    double radius = 1.0;
    for (int attempt = 0; attempt < 60 && xs.empty(); ++attempt, radius *= 1.5) {
        std::vector<Rat> cand;
        for (int k = 0; k < 9; ++k) {
            Rat lam = rat_from_double(radius * std::cos(std::numbers::pi * (2 * k + 1) / 18.0));
            if (det3(rq.system(lam)) == 0) break;
            cand.push_back(lam);
        }
        if (cand.size() == 9) xs = std::move(cand);
    }
    if (xs.empty()) throw solver_error("fixed orientation: no admissible interpolation nodes");

    std::vector<Rat> ys;
    ys.reserve(xs.size());
    for (const Rat& lam : xs) ys.push_back(rq.cleared_value(lam));
    UniPoly<Rat> K = poly::interpolate_uni(xs, ys);
    if (K.is_zero()) throw degenerate_error("degenerate orientation: multiplier polynomial vanishes");
    if (K.degree() > 6) throw solver_error("fixed orientation: multiplier polynomial degree > 6");

    PedalSet out;
    out.mode = Mode::fixed_orientation;
    if (K.degree() == 0) {
        out.complex_count = 0;
        return out;
    }

    UniPoly<BigFloat> Kh = poly::uni_convert<BigFloat>(K * (Rat(1) / K.max_abs_coeff()));
    auto roots = poly::uni_roots(Kh);
    int real_count = 0;
    for (const auto& root : roots) {
        if (to_double(abs(root.im)) > 1e-8) continue;
        ++real_count;
        const BigFloat lam = root.re;

        // Cramer solve of (2I + 2 lam A) p = 2g - lam b in BigFloat
        BigFloat m[3][3], rhs[3];
        for (int i = 0; i < 3; ++i) {
            rhs[i] = 2 * BigFloat(g.pos(i)) - lam * BigFloat(q.b(i));
            for (int j = 0; j < 3; ++j) m[i][j] = 2 * lam * BigFloat(q.Q(i, j)) + (i == j ? 2 : 0);
        }
        BigFloat det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                       m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                       m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
        BigFloat mscale(0);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) mscale += abs(m[i][j]);
        if (abs(det) <= 1e-12 * (1 + mscale * mscale * mscale)) {
            out.warnings.push_back("multiplier at infinity (det = 0); candidate excluded");
            continue;
        }
        BigFloat p[3];
        for (int i = 0; i < 3; ++i) {
            BigFloat mm[3][3];
            for (int r = 0; r < 3; ++r)
                for (int cc = 0; cc < 3; ++cc) mm[r][cc] = cc == i ? rhs[r] : m[r][cc];
            BigFloat di = mm[0][0] * (mm[1][1] * mm[2][2] - mm[1][2] * mm[2][1]) -
                          mm[0][1] * (mm[1][0] * mm[2][2] - mm[1][2] * mm[2][0]) +
                          mm[0][2] * (mm[1][0] * mm[2][1] - mm[1][1] * mm[2][0]);
            p[i] = di / det;
        }

        // KKT residual: three gradient rows plus the quadric itself
        BigFloat worst(0);
        {
            BigFloat Ap[3];
            for (int i = 0; i < 3; ++i) {
                Ap[i] = 0;
                for (int j = 0; j < 3; ++j) Ap[i] += BigFloat(q.Q(i, j)) * p[j];
            }
            for (int i = 0; i < 3; ++i) {
                BigFloat e = 2 * (p[i] - BigFloat(g.pos(i))) + lam * (2 * Ap[i] + BigFloat(q.b(i)));
                BigFloat mg = 2 * (abs(p[i]) + abs(BigFloat(g.pos(i)))) +
                              abs(lam) * (2 * abs(Ap[i]) + abs(BigFloat(q.b(i))));
                BigFloat r = abs(e) / (1 + mg);
                if (r > worst) worst = r;
            }
            BigFloat omega(0), omag(0);
            for (int i = 0; i < 3; ++i) {
                BigFloat bi = BigFloat(q.b(i)) * p[i];
                omega += bi;
                omag += abs(bi);
                for (int j = 0; j < 3; ++j) {
                    BigFloat t = BigFloat(q.Q(i, j)) * p[i] * p[j];
                    omega += t;
                    omag += abs(t);
                }
            }
            omega += BigFloat(q.c);
            omag += abs(BigFloat(q.c));
            BigFloat r = abs(omega) / (1 + omag);
            if (r > worst) worst = r;
        }
        double residual = to_double(worst);
        if (!(residual < 1e-10)) {
            out.warnings.push_back("fixed orientation: candidate rejected by residual check");
            continue;
        }

        PedalPoint pt;
        pt.pose.dir = g.dir;
        pt.pose.pos = {to_double(p[0]), to_double(p[1]), to_double(p[2])};
        pt.lambda1 = to_double(lam);
        pt.residual = residual;
        pt.distance = (pt.pose.pos - g.pos).norm();
        out.points.push_back(pt);
    }
    out.complex_count = static_cast<int>(roots.size()) - real_count;
    sort_points(out.points);
    return out;
}

PedalSet closest_fixed_position(const SingularityModel& model, const Architecture& arch,
                                const Configuration& g) {
    hp::init_precision();
    require_unit(g.dir);
    pentapod::PositionCone cone = pentapod::position_cone(model, g.pos);

    const std::vector<std::string> uvw = {"u", "v", "w"};
    auto var = [&](const char* n) { return MultiPoly<Rat>::variable(n, uvw); };
    auto con = [&](const Rat& c) { return MultiPoly<Rat>::constant(c, uvw); };
    const MultiPoly<Rat> U = var("u"), V = var("v"), W = var("w");

    MultiPoly<Rat> C(uvw);
    for (int i = 0; i < 3; ++i) {
        const MultiPoly<Rat>& Xi = i == 0 ? U : i == 1 ? V : W;
        C += con(rat_from_double(cone.b(i))) * Xi;
        for (int j = 0; j < 3; ++j) {
            const MultiPoly<Rat>& Xj = j == 0 ? U : j == 1 ? V : W;
            C += con(rat_from_double(cone.A(i, j))) * Xi * Xj;
        }
    }
    const Rat g1 = rat_from_double(g.dir.x()), g2 = rat_from_double(g.dir.y()),
              g3 = rat_from_double(g.dir.z());
    MultiPoly<Rat> Cu = C.derivative("u"), Cv = C.derivative("v"), Cw = C.derivative("w");

    // Cramer elimination of the multipliers from the u,v gradient rows
    MultiPoly<Rat> N1 = con(Rat(4)) * (con(g1) * V - con(g2) * U);
    MultiPoly<Rat> N2 = con(Rat(2)) * (Cv * (U - con(g1)) - Cu * (V - con(g2)));
    MultiPoly<Rat> Delta = con(Rat(2)) * (Cu * V - Cv * U);
    MultiPoly<Rat> F1 = con(Rat(2)) * (W - con(g3)) * Delta + N1 * Cw + con(Rat(2)) * W * N2;
    if (F1.total_degree() > 2)
        throw solver_error("fixed position: multiplier elimination left a cubic");
    MultiPoly<Rat> F2 = C;
    MultiPoly<Rat> F3 = U * U + V * V + W * W - con(Rat(1));

    PedalSet out;
    out.mode = Mode::fixed_position;
    SphereKkt kkt{cone.A, cone.b, g.dir};

    bool fallback = false;
    UniPoly<Rat> gw;
    MultiPoly<Rat> R1(uvw), R2(uvw), R3(uvw);
    try {
        R1 = poly::sylvester_resultant(F2, F3, "u");
        R2 = poly::sylvester_resultant(F1, F3, "u");
        R3 = poly::sylvester_resultant(F1, F2, "u");
        MultiPoly<Rat> G1 = poly::sylvester_resultant(R2, R3, "v");
        MultiPoly<Rat> G2 = poly::sylvester_resultant(R1, R3, "v");
        MultiPoly<Rat> G3 = poly::sylvester_resultant(R1, R2, "v");
        gw = poly::uni_gcd(poly::uni_gcd(poly::to_unipoly<Rat>(G1, "w"), poly::to_unipoly<Rat>(G2, "w")),
                           poly::to_unipoly<Rat>(G3, "w"));
    } catch (const std::invalid_argument&) {
        fallback = true;
    }
    if (!fallback && gw.degree() != 8) {
        out.warnings.push_back("non-generic instance: elimination degree " +
                               std::to_string(gw.degree()) + " instead of 8; using multistart");
        fallback = true;
    }

    if (!fallback) {
        auto roots = poly::uni_roots(poly::uni_convert<BigFloat>(gw));
        for (const auto& root : roots) {
            if (to_double(abs(root.im)) > 1e-8) continue;
            const BigFloat w0 = root.re;
            UniPoly<BigFloat> rv = at_w(R1, w0);
            if (rv.degree() < 1) continue;
            for (const auto& vr : poly::uni_roots(rv)) {
                if (to_double(abs(vr.im)) > 1e-6) continue;
                double v0 = to_double(vr.re), w0d = to_double(w0);
                double u2 = 1 - v0 * v0 - w0d * w0d;
                if (u2 < -1e-8) continue;
                double u0 = std::sqrt(std::max(u2, 0.0));
                for (double su : {u0, -u0}) {
                    collect_sphere_point(kkt, {su, v0, w0d}, g.dir, 1e-10, out.points);
                    if (u0 == 0.0) break;
                }
            }
        }
        out.complex_count = 8 - static_cast<int>(out.points.size());
    } else {
        for (int start = 0; start < 2000; ++start) {
            CounterRng rng(7, std::uint64_t(start) + 1);
            auto d = rng.unit_vector();
            collect_sphere_point(kkt, {d[0], d[1], d[2]}, g.dir, 1e-10, out.points);
        }
    }

    for (PedalPoint& pt : out.points) pt.pose.pos = g.pos;
    sort_points(out.points);
    return out;
}

PedalSet closest_general(const SingularityModel& model, const Architecture& arch,
                         const Configuration& g, const SolveOptions& opts) {
    return run_multistart(model, arch, g, opts, /*equiform=*/false);
}

PedalSet closest_equiform(const SingularityModel& model, const Architecture& arch,
                          const Configuration& g, const SolveOptions& opts) {
    return run_multistart(model, arch, g, opts, /*equiform=*/true);
}

double singularity_free_radius(const SingularityModel& model, const Architecture& arch,
                               const Configuration& g, Mode mode, const SolveOptions& opts) {
    PedalSet set;
    switch (mode) {
        case Mode::fixed_orientation: set = closest_fixed_orientation(model, arch, g); break;
        case Mode::fixed_position: set = closest_fixed_position(model, arch, g); break;
        case Mode::general: set = closest_general(model, arch, g, opts); break;
        case Mode::equiform: set = closest_equiform(model, arch, g, opts); break;
    }
    if (set.points.empty()) throw solver_error("no pedal point found for the requested mode");
    return set.points.front().distance;
}

bool is_local_min(const SingularityModel& model, const Architecture& arch, const Configuration& g,
                  const PedalPoint& point, Mode mode, std::uint64_t seed, int samples, double step) {
    hp::init_precision();
    // constraint residuals c(x) and their Jacobian rows over the free block
    const bool position_only = mode == Mode::fixed_orientation;
    const bool orientation_only = mode == Mode::fixed_position;
    const int nfree = (position_only || orientation_only) ? 3 : 6;

    pentapod::Quadric quad{Eigen::Matrix3d::Zero(), Eigen::Vector3d::Zero(), 0};
    pentapod::PositionCone cone{Eigen::Matrix3d::Zero(), Eigen::Vector3d::Zero()};
    if (position_only) quad = pentapod::orientation_quadric(model, g.dir);
    if (orientation_only) cone = pentapod::position_cone(model, g.pos);

    auto constraints = [&](const Configuration& c, Eigen::VectorXd& val, Eigen::MatrixXd& J) {
        if (position_only) {
            val.resize(1);
            J.resize(1, 3);
            val(0) = quad.value(c.pos);
            J.row(0) = (2 * quad.Q * c.pos + quad.b).transpose();
            return;
        }
        if (orientation_only) {
            val.resize(2);
            J.resize(2, 3);
            val(0) = cone.value(c.dir);
            val(1) = c.dir.squaredNorm() - 1;
            J.row(0) = (2 * cone.A * c.dir + cone.b).transpose();
            J.row(1) = 2 * c.dir.transpose();
            return;
        }
        auto x = flat(c);
        Eigen::Matrix<double, 6, 1> gf = model.gradient(x.data());
        if (mode == Mode::general) {
            val.resize(2);
            J.resize(2, 6);
            val(0) = model.eval(x.data());
            val(1) = c.dir.squaredNorm() - 1;
            J.row(0) = gf.transpose();
            J.row(1) << 2 * c.dir.x(), 2 * c.dir.y(), 2 * c.dir.z(), 0, 0, 0;
        } else {
            val.resize(1);
            J.resize(1, 6);
            val(0) = model.eval(x.data());
            J.row(0) = gf.transpose();
        }
    };

    auto apply_step = [&](Configuration& c, const Eigen::VectorXd& dx) {
        if (position_only) {
            c.pos += dx;
        } else if (orientation_only) {
            c.dir += dx;
        } else {
            c.dir += dx.head<3>();
            c.pos += dx.tail<3>();
        }
    };

    auto trial_distance = [&](const Configuration& c) {
        switch (mode) {
            case Mode::fixed_orientation: return (c.pos - g.pos).norm();
            case Mode::fixed_position:
                return std::acos(std::clamp(c.dir.dot(g.dir), -1.0, 1.0)) * kRadToDeg;
            default: return metric_d(arch, g, c);
        }
    };

    Eigen::VectorXd val;
    Eigen::MatrixXd J;
    for (int k = 0; k < samples; ++k) {
        CounterRng rng(seed, std::uint64_t(k) + 1);
        Configuration c = point.pose;
        Eigen::VectorXd dx(nfree);
        for (int i = 0; i < nfree; ++i) dx(i) = rng.uniform(-1, 1);
        if (dx.norm() < 1e-12) continue;
        dx *= step / dx.norm();
        apply_step(c, dx);

        // Gauss-Newton projection back onto the constraint set
        bool feasible = false;
        for (int it = 0; it < 50; ++it) {
            constraints(c, val, J);
            if (val.cwiseAbs().maxCoeff() < 1e-12) {
                feasible = true;
                break;
            }
            Eigen::MatrixXd jj = J * J.transpose();
            Eigen::VectorXd corr = -J.transpose() * jj.ldlt().solve(val);
            if (!corr.allFinite()) break;
            apply_step(c, corr);
        }
        if (!feasible) continue;
        if (trial_distance(c) < point.distance - 1e-9 * (1 + point.distance)) return false;
    }
    return true;
}

}  // namespace pentasing::distance
