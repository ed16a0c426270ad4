#include "pentasing/pentapod.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "pentasing/rng.hpp"

namespace pentasing::pentapod {

namespace {

const std::vector<std::string> kVars = {"u", "v", "w", "px", "py", "pz"};

Rat rat(double x) { return rat_from_double(x); }

}  // namespace

void validate(const Architecture& arch) {
    for (int i = 0; i < 5; ++i)
        for (int j = i + 1; j < 5; ++j)
            if (arch.base[std::size_t(i)] == arch.base[std::size_t(j)] &&
                arch.r[std::size_t(i)] == arch.r[std::size_t(j)])
                throw degenerate_error("legs " + std::to_string(i + 1) + " and " +
                                       std::to_string(j + 1) + " coincide");
    bool all_r_equal = true, all_base_equal = true;
    for (int j = 1; j < 5; ++j) {
        all_r_equal &= arch.r[std::size_t(j)] == arch.r[0];
        all_base_equal &= arch.base[std::size_t(j)] == arch.base[0];
    }
    if (all_r_equal) throw degenerate_error("all platform offsets equal: metric is degenerate");
    if (all_base_equal) throw degenerate_error("all base anchor points coincide");
}

Architecture SimilarityTransform::apply(const Architecture& a) const {
    Architecture out;
    for (int j = 0; j < 5; ++j) {
        out.base[std::size_t(j)] = apply_point(a.base[std::size_t(j)]);
        out.r[std::size_t(j)] = scale * a.r[std::size_t(j)];
    }
    return out;
}

Configuration SimilarityTransform::apply(const Configuration& c) const {
    return {rot * c.dir, apply_point(c.pos)};
}

SimilarityTransform SimilarityTransform::inverse() const {
    SimilarityTransform inv;
    inv.scale = 1.0 / scale;
    inv.rot = rot.transpose();
    inv.offset = -(inv.rot * offset) / scale;
    return inv;
}

namespace {

// Rotation taking unit vector a onto unit vector b (Rodrigues).
Eigen::Matrix3d rotation_between(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
    double c = a.dot(b);
    if (c < -1.0 + 1e-12) {
        // antiparallel: any half-turn about an axis orthogonal to a
        Eigen::Vector3d axis = a.unitOrthogonal();
        return 2.0 * axis * axis.transpose() - Eigen::Matrix3d::Identity();
    }
    Eigen::Vector3d v = a.cross(b);
    Eigen::Matrix3d vx;
    vx << 0, -v.z(), v.y(), v.z(), 0, -v.x(), -v.y(), v.x(), 0;
    return Eigen::Matrix3d::Identity() + vx + vx * vx / (1.0 + c);
}

// Rotation about x clearing the z-component of t; the new y picks up the
// sign sigma (identity when z = 0 and sigma matches the sign of y).
Eigen::Matrix3d roll_to_xy(const Eigen::Vector3d& t, double sigma) {
    double h = std::hypot(t.y(), t.z());
    double c = sigma * t.y() / h, s = sigma * t.z() / h;
    Eigen::Matrix3d rx;
    rx << 1, 0, 0, 0, c, s, 0, -s, c;
    return rx;
}

}  // namespace

std::pair<Architecture, SimilarityTransform> normalize_frame(const Architecture& arch) {
    Eigen::Vector3d d = arch.base[1] - arch.base[0];
    double len = d.norm();
    if (len == 0) throw std::invalid_argument("normalize_frame: a1 = a2");

    Eigen::Matrix3d r1 = rotation_between(d / len, Eigen::Vector3d::UnitX());

    Eigen::Matrix3d rx = Eigen::Matrix3d::Identity();
    for (int j = 2; j < 5; ++j) {
        Eigen::Vector3d t = r1 * (arch.base[std::size_t(j)] - arch.base[0]);
        if (std::hypot(t.y(), t.z()) > 1e-12 * (1.0 + t.norm())) {
            // a3 keeps the sign of its y; a later anchor breaking a collinear
            // a1,a2,a3 gets y >= 0
            rx = roll_to_xy(t, j == 2 && t.y() < 0 ? -1.0 : 1.0);
            break;
        }
    }

    SimilarityTransform tr;
    tr.scale = 1.0 / len;
    tr.rot = rx * r1;
    tr.offset = -tr.scale * (tr.rot * arch.base[0]);
    return {tr.apply(arch), tr};
}

Eigen::Matrix<double, 5, 6> jacobian(const Architecture& arch, const Configuration& c) {
    Eigen::Matrix<double, 5, 6> j;
    for (int k = 0; k < 5; ++k) {
        const Eigen::Vector3d& a = arch.base[std::size_t(k)];
        Eigen::Vector3d b = c.pos + arch.r[std::size_t(k)] * c.dir;
        j(k, 0) = b.x() - a.x();
        j(k, 1) = b.y() - a.y();
        j(k, 2) = b.z() - a.z();
        j(k, 3) = a.z() * b.y() - a.y() * b.z();
        j(k, 4) = a.x() * b.z() - a.z() * b.x();
        j(k, 5) = a.y() * b.x() - a.x() * b.y();
    }
    return j;
}

std::array<std::array<MultiPoly<Rat>, 6>, 5> jacobian_sym(const Architecture& arch) {
    using MP = MultiPoly<Rat>;
    MP u = MP::variable("u", kVars), v = MP::variable("v", kVars), w = MP::variable("w", kVars);
    MP px = MP::variable("px", kVars), py = MP::variable("py", kVars), pz = MP::variable("pz", kVars);

    std::array<std::array<MP, 6>, 5> j;
    for (std::size_t k = 0; k < 5; ++k) {
        Rat x = rat(arch.base[k].x()), y = rat(arch.base[k].y()), z = rat(arch.base[k].z());
        Rat rj = rat(arch.r[k]);
        MP bx = px + rj * u, by = py + rj * v, bz = pz + rj * w;
        j[k][0] = bx - MP::constant(x, kVars);
        j[k][1] = by - MP::constant(y, kVars);
        j[k][2] = bz - MP::constant(z, kVars);
        j[k][3] = z * by - y * bz;
        j[k][4] = x * bz - z * bx;
        j[k][5] = y * bx - x * by;
    }
    return j;
}

std::array<MultiPoly<Rat>, 6> minors_sym(const Architecture& arch) {
    auto j = jacobian_sym(arch);
    std::array<MultiPoly<Rat>, 6> out;
    for (int drop = 0; drop < 6; ++drop) {
        std::vector<std::vector<MultiPoly<Rat>>> m(5, std::vector<MultiPoly<Rat>>());
        for (std::size_t row = 0; row < 5; ++row)
            for (int col = 0; col < 6; ++col)
                if (col != drop) m[row].push_back(j[row][std::size_t(col)]);
        out[std::size_t(drop)] = poly_matrix_det(m);
    }
    return out;
}

std::array<double, 6> minors_at(const Architecture& arch, const Configuration& c) {
    Eigen::Matrix<double, 5, 6> j = jacobian(arch, c);
    std::array<double, 6> out;
    for (int drop = 0; drop < 6; ++drop) {
        Eigen::Matrix<double, 5, 5> m;
        int cc = 0;
        for (int col = 0; col < 6; ++col) {
            if (col == drop) continue;
            m.col(cc++) = j.col(col);
        }
        out[std::size_t(drop)] = m.determinant();
    }
    return out;
}

std::array<double, 6> minors_at_normalized(const Architecture& arch, const Configuration& c) {
    Eigen::Matrix<double, 5, 6> j = jacobian(arch, c);
    double scale = 1.0;
    for (int row = 0; row < 5; ++row) scale *= std::max(j.row(row).norm(), 1e-300);
    auto m = minors_at(arch, c);
    for (double& x : m) x /= scale;
    return m;
}

std::pair<bool, double> is_singular(const Architecture& arch, const Configuration& c, double tol) {
    Eigen::JacobiSVD<Eigen::Matrix<double, 5, 6>> svd(jacobian(arch, c));
    double smax = svd.singularValues()(0), smin = svd.singularValues()(4);
    double ratio = smax == 0 ? 0.0 : smin / smax;
    return {ratio < tol, ratio};
}

const std::array<std::array<unsigned, 6>, 43> kSupportTemplate = {{
    {2, 0, 0, 0, 1, 0}, {2, 0, 0, 0, 0, 1},                                          // A1, A2
    {1, 1, 0, 1, 0, 0}, {1, 1, 0, 0, 1, 0}, {1, 1, 0, 0, 0, 1}, {1, 1, 0, 0, 0, 0},  // A3..A6
    {1, 0, 1, 1, 0, 0}, {1, 0, 1, 0, 1, 0}, {1, 0, 1, 0, 0, 1}, {1, 0, 1, 0, 0, 0},  // A7..A10
    {1, 0, 0, 1, 1, 0}, {1, 0, 0, 1, 0, 1}, {1, 0, 0, 0, 2, 0}, {1, 0, 0, 0, 1, 1},  // A11..A14
    {1, 0, 0, 0, 1, 0}, {1, 0, 0, 0, 0, 2}, {1, 0, 0, 0, 0, 1},                      // A15..A17
    {0, 2, 0, 1, 0, 0}, {0, 2, 0, 0, 0, 1}, {0, 2, 0, 0, 0, 0},                      // A18..A20
    {0, 1, 1, 1, 0, 0}, {0, 1, 1, 0, 1, 0}, {0, 1, 1, 0, 0, 1}, {0, 1, 1, 0, 0, 0},  // A21..A24
    {0, 1, 0, 2, 0, 0}, {0, 1, 0, 1, 1, 0}, {0, 1, 0, 1, 0, 1}, {0, 1, 0, 1, 0, 0},  // A25..A28
    {0, 1, 0, 0, 1, 1}, {0, 1, 0, 0, 1, 0}, {0, 1, 0, 0, 0, 2}, {0, 1, 0, 0, 0, 1},  // A29..A32
    {0, 0, 2, 1, 0, 0}, {0, 0, 2, 0, 1, 0}, {0, 0, 2, 0, 0, 0},                      // A33..A35
    {0, 0, 1, 2, 0, 0}, {0, 0, 1, 1, 1, 0}, {0, 0, 1, 1, 0, 1}, {0, 0, 1, 1, 0, 0},  // A36..A39
    {0, 0, 1, 0, 2, 0}, {0, 0, 1, 0, 1, 1}, {0, 0, 1, 0, 1, 0}, {0, 0, 1, 0, 0, 1},  // A40..A43
}};

namespace {

// Kernel (nullspace) of an exact rational matrix via row reduction.
std::vector<std::vector<Rat>> nullspace(std::vector<std::vector<Rat>> m, std::size_t cols) {
    std::vector<int> pivot_of_col(cols, -1);
    std::size_t row = 0;
    for (std::size_t col = 0; col < cols && row < m.size(); ++col) {
        std::size_t sel = row;
        while (sel < m.size() && m[sel][col] == 0) ++sel;
        if (sel == m.size()) continue;
        std::swap(m[row], m[sel]);
        Rat inv = Rat(1) / m[row][col];
        for (std::size_t j = col; j < cols; ++j) m[row][j] *= inv;
        for (std::size_t i = 0; i < m.size(); ++i) {
            if (i == row || m[i][col] == 0) continue;
            Rat f = m[i][col];
            for (std::size_t j = col; j < cols; ++j) m[i][j] -= f * m[row][j];
        }
        pivot_of_col[col] = static_cast<int>(row);
        ++row;
    }
    std::vector<std::vector<Rat>> basis;
    for (std::size_t free_col = 0; free_col < cols; ++free_col) {
        if (pivot_of_col[free_col] >= 0) continue;
        std::vector<Rat> q(cols, Rat(0));
        q[free_col] = 1;
        for (std::size_t col = 0; col < cols; ++col)
            if (pivot_of_col[col] >= 0) q[col] = -m[std::size_t(pivot_of_col[col])][free_col];
        basis.push_back(std::move(q));
    }
    return basis;
}

std::vector<poly::ExpVec> quadric_monomials() {
    std::vector<poly::ExpVec> out;
    for (unsigned a = 0; a <= 2; ++a)
        for (unsigned b = 0; a + b <= 2; ++b)
            for (unsigned c = 0; a + b + c <= 2; ++c)
                for (unsigned d = 0; a + b + c + d <= 2; ++d)
                    for (unsigned e = 0; a + b + c + d + e <= 2; ++e)
                        for (unsigned f = 0; a + b + c + d + e + f <= 2; ++f)
                            out.push_back({a, b, c, d, e, f});
    return out;  // 28 monomials of degree <= 2
}

Rat eval_monomial(const poly::ExpVec& e, const std::vector<Rat>& x) {
    Rat m(1);
    for (std::size_t i = 0; i < e.size(); ++i)
        for (unsigned k = 0; k < e[i]; ++k) m *= x[i];
    return m;
}

std::map<std::string, Rat> to_point(const std::vector<Rat>& x) {
    std::map<std::string, Rat> pt;
    for (std::size_t i = 0; i < kVars.size(); ++i) pt[kVars[i]] = x[i];
    return pt;
}

// One kernel attempt for the minor pair (fi, fj): find quadrics (qi, qj)
// with fi*qj = fj*qi from exact evaluations at random rational points.
// Returns qi, or nullopt when the sampled kernel is not one-dimensional.
std::optional<MultiPoly<Rat>> cofactor_kernel(const MultiPoly<Rat>& fi, const MultiPoly<Rat>& fj,
                                              std::uint64_t stream) {
    const auto mons = quadric_monomials();
    const std::size_t nm = mons.size(), cols = 2 * nm;
    CounterRng rng(2024, stream);
    std::vector<std::vector<Rat>> rows;
    rows.reserve(cols + 16);
    for (std::size_t s = 0; s < cols + 16; ++s) {
        std::vector<Rat> x;
        x.reserve(6);
        for (int i = 0; i < 6; ++i) {
            long num = static_cast<long>(rng.next_u64() % 61) - 30;
            long den = 1 + static_cast<long>(rng.next_u64() % 7);
            x.emplace_back(num, den);
        }
        auto pt = to_point(x);
        Rat vi = fi.eval(pt), vj = fj.eval(pt);
        std::vector<Rat> row(cols);
        for (std::size_t k = 0; k < nm; ++k) {
            Rat mk = eval_monomial(mons[k], x);
            row[k] = -vj * mk;       // coefficient of qi's k-th monomial
            row[nm + k] = vi * mk;   // coefficient of qj's k-th monomial
        }
        rows.push_back(std::move(row));
    }
    auto basis = nullspace(std::move(rows), cols);
    if (basis.size() != 1) return std::nullopt;
    MultiPoly<Rat> qi(kVars);
    for (std::size_t k = 0; k < nm; ++k) qi.add_term(mons[k], basis[0][k]);
    if (qi.is_zero()) return std::nullopt;
    return qi;
}

bool satisfies_zero_pattern(const Architecture& arch) {
    return arch.base[0] == Eigen::Vector3d::Zero() && arch.base[1].y() == 0 &&
           arch.base[1].z() == 0 && arch.base[2].z() == 0;
}

}  // namespace

SingularityModel extract_F(const Architecture& arch) {
    hp::init_precision();
    auto minors = minors_sym(arch);
    std::vector<std::size_t> live;
    for (std::size_t j = 0; j < 6; ++j)
        if (!minors[j].is_zero()) live.push_back(j);
    if (live.empty()) throw degenerate_error("all six minors vanish identically");

    MultiPoly<Rat> f;
    bool found = false;
    for (std::size_t pi = 0; pi < live.size() && !found; ++pi) {
        for (std::size_t pj = pi + 1; pj < live.size() && !found; ++pj) {
            for (std::uint64_t attempt = 0; attempt < 2 && !found; ++attempt) {
                auto qi = cofactor_kernel(minors[live[pi]], minors[live[pj]],
                                          (pi * 8 + pj) * 4 + attempt);
                if (!qi) continue;
                MultiPoly<Rat> cand;
                try {
                    cand = poly_divide_exact(minors[live[pi]], *qi);
                } catch (const std::domain_error&) {
                    continue;  // sampled kernel was spurious
                }
                bool divides_all = true;
                for (std::size_t j : live) {
                    try {
                        poly_divide_exact(minors[j], cand);
                    } catch (const std::domain_error&) {
                        divides_all = false;
                        break;
                    }
                }
                if (!divides_all) continue;
                f = std::move(cand);
                found = true;
            }
        }
    }
    if (!found) throw degenerate_error("minor gcd extraction failed: no cofactor pair admits a 1-dimensional kernel");
    if (f.total_degree() != 3)
        throw degenerate_error("minor gcd has total degree " + std::to_string(f.total_degree()) +
                               ", architecture is degenerate");

    // scale so max |coeff| = 1 and the first canonical-order coefficient is positive
    Rat mult = Rat(1) / f.max_abs_coeff();
    if (f.terms().begin()->second < 0) mult = -mult;
    f = f * mult;

    SingularityModel model;
    model.F_ = f.extended_to(kVars);
    model.normalization_ = mult;

    if (satisfies_zero_pattern(arch)) {
        std::map<poly::ExpVec, std::size_t, poly::GrlexLess> index;
        for (std::size_t k = 0; k < kSupportTemplate.size(); ++k) {
            poly::ExpVec e(kSupportTemplate[k].begin(), kSupportTemplate[k].end());
            index[e] = k;
        }
        std::array<double, 43> a{};
        for (const auto& [e, c] : model.F_.terms()) {
            auto it = index.find(e);
            if (it == index.end())
                throw solver_error("singularity polynomial leaves the 43-monomial support template");
            a[it->second] = to_double(c);
        }
        model.coeffsA_ = a;
    }

    model.compile();
    return model;
}

void SingularityModel::compile() {
    fd_ = TermList<double>::compile(F_);
    fh_ = TermList<BigFloat>::compile(F_);
    for (std::size_t i = 0; i < 6; ++i) {
        MultiPoly<Rat> di = F_.derivative(kVars[i]);
        gd_[i] = TermList<double>::compile(di);
        gh_[i] = TermList<BigFloat>::compile(di);
        for (std::size_t j = 0; j < 6; ++j) {
            MultiPoly<Rat> dij = di.derivative(kVars[j]);
            hd_[i * 6 + j] = TermList<double>::compile(dij);
            hh_[i * 6 + j] = TermList<BigFloat>::compile(dij);
        }
    }
}

double SingularityModel::eval(const Configuration& c) const {
    double x[6] = {c.dir.x(), c.dir.y(), c.dir.z(), c.pos.x(), c.pos.y(), c.pos.z()};
    return fd_.eval(x);
}

double SingularityModel::eval_normalized(const Configuration& c) const {
    double x[6] = {c.dir.x(), c.dir.y(), c.dir.z(), c.pos.x(), c.pos.y(), c.pos.z()};
    auto [val, mag] = fd_.eval_mag(x);
    return std::abs(val) / (1.0 + mag);
}

Eigen::Matrix<double, 6, 1> SingularityModel::gradient(const double* x) const {
    Eigen::Matrix<double, 6, 1> g;
    for (std::size_t i = 0; i < 6; ++i) g(static_cast<int>(i)) = gd_[i].eval(x);
    return g;
}

Eigen::Matrix<double, 6, 6> SingularityModel::hessian(const double* x) const {
    Eigen::Matrix<double, 6, 6> h;
    for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t j = 0; j < 6; ++j) h(static_cast<int>(i), static_cast<int>(j)) = hd_[i * 6 + j].eval(x);
    return h;
}

void SingularityModel::gradient_hp(const BigFloat* x, BigFloat* g6) const {
    for (std::size_t i = 0; i < 6; ++i) g6[i] = gh_[i].eval(x);
}

SingularityModel SingularityModel::rescaled(const Rat& s) const {
    if (!(s > 0)) throw std::invalid_argument("rescaled: factor must be positive");
    SingularityModel m;
    m.F_ = F_ * MultiPoly<Rat>::constant(s, F_.vars());
    m.normalization_ = normalization_ * s;
    if (coeffsA_) {
        std::array<double, 43> a = *coeffsA_;
        for (double& v : a) v *= to_double(s);
        m.coeffsA_ = a;
    }
    m.compile();
    return m;
}

void SingularityModel::hessian_hp(const BigFloat* x, BigFloat* h36) const {
    for (std::size_t i = 0; i < 36; ++i) h36[i] = hh_[i].eval(x);
}

Eigen::Matrix4d Quadric::sym() const {
    Eigen::Matrix4d s;
    s.topLeftCorner<3, 3>() = Q;
    s.topRightCorner<3, 1>() = b / 2;
    s.bottomLeftCorner<1, 3>() = b.transpose() / 2;
    s(3, 3) = c;
    return s;
}

namespace {

// Splits a polynomial of degree <= 2 in three named variables into
// (symmetric matrix, linear vector, constant).
void split_quadratic(const MultiPoly<Rat>& p, Eigen::Matrix3d& q, Eigen::Vector3d& b, double& c) {
    q.setZero();
    b.setZero();
    c = 0;
    for (const auto& [e, coeff] : p.terms()) {
        double v = to_double(coeff);
        int idx[3] = {-1, -1, -1}, n = 0, deg = 0;
        for (int i = 0; i < 3; ++i) {
            deg += static_cast<int>(e[std::size_t(i)]);
            for (unsigned k = 0; k < e[std::size_t(i)]; ++k) idx[n++] = i;
        }
        if (deg == 0) {
            c = v;
        } else if (deg == 1) {
            b(idx[0]) = v;
        } else if (deg == 2) {
            if (idx[0] == idx[1]) {
                q(idx[0], idx[0]) = v;
            } else {
                q(idx[0], idx[1]) = v / 2;
                q(idx[1], idx[0]) = v / 2;
            }
        } else {
            throw solver_error("specialization has degree > 2");
        }
    }
}

}  // namespace

Quadric orientation_quadric(const SingularityModel& model, const Eigen::Vector3d& i) {
    std::map<std::string, Rat> fix{{"u", rat(i.x())}, {"v", rat(i.y())}, {"w", rat(i.z())}};
    MultiPoly<Rat> p = model.F().substitute(fix);
    if (p.is_zero()) throw degenerate_error("orientation-degenerate: quadric vanishes identically");
    Quadric out;
    split_quadratic(p, out.Q, out.b, out.c);
    return out;
}

PositionCone position_cone(const SingularityModel& model, const Eigen::Vector3d& p) {
    std::map<std::string, Rat> fix{{"px", rat(p.x())}, {"py", rat(p.y())}, {"pz", rat(p.z())}};
    MultiPoly<Rat> q = model.F().substitute(fix);
    if (q.is_zero()) throw degenerate_error("position-degenerate: cone vanishes identically");
    PositionCone out;
    double c = 0;
    split_quadratic(q, out.A, out.b, c);
    if (c != 0) throw solver_error("position specialization has a constant term");
    return out;
}

}  // namespace pentasing::pentapod
