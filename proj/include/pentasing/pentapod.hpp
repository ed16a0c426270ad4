// Manipulator model: architecture, poses, Jacobian, minors, and the
// singularity polynomial F (gcd of the six 5x5 minors) with fast evaluators.
//
// Coordinates follow the usual linear-pentapod setup: the platform is a line
// with direction i = (u,v,w) on the unit sphere, anchor points
// b_j = p + r_j i, and the 5x6 Jacobian row j is (l_j, l_hat_j).

#ifndef PENTASING_PENTAPOD_HPP
#define PENTASING_PENTAPOD_HPP

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <optional>
#include <type_traits>
#include <utility>
#include <vector>

#include "pentasing/errors.hpp"
#include "pentasing/multipoly.hpp"
#include "pentasing/scalar.hpp"

namespace pentasing::pentapod {

using poly::MultiPoly;

struct Architecture {
    std::array<Eigen::Vector3d, 5> base;
    std::array<double, 5> r;
};

// Throws degenerate_error on: coincident (a_j, r_j) pairs, all r_j equal
// (kills the configuration-space metric), or all base points coincident.
void validate(const Architecture& arch);

struct Configuration {
    Eigen::Vector3d dir;  // (u,v,w), unit length outside the equiform solver
    Eigen::Vector3d pos;  // (p_x,p_y,p_z)
};

// x maps to scale * rot * x + offset; orientations map by rot alone, so
// platform offsets r_j pick up the scale factor.
struct SimilarityTransform {
    double scale = 1.0;
    Eigen::Matrix3d rot = Eigen::Matrix3d::Identity();
    Eigen::Vector3d offset = Eigen::Vector3d::Zero();

    Eigen::Vector3d apply_point(const Eigen::Vector3d& x) const { return scale * (rot * x) + offset; }
    Architecture apply(const Architecture& a) const;
    Configuration apply(const Configuration& c) const;
    SimilarityTransform inverse() const;
};

// Rigid-plus-scale change of frame achieving x1=y1=z1=y2=z2=z3=0, x2=1.
// Deterministic tie-breaks: the rotation about the x-axis that clears z3
// keeps the sign of y3 (identity when z3 is already 0); if a1,a2,a3 are
// collinear the first non-collinear of a4,a5 fixes the roll with y >= 0.
std::pair<Architecture, SimilarityTransform> normalize_frame(const Architecture& arch);

Eigen::Matrix<double, 5, 6> jacobian(const Architecture& arch, const Configuration& c);

// Entries as exact polynomials in (u,v,w,px,py,pz); base coordinates are
// taken dyadically (double -> rational is exact).
std::array<std::array<MultiPoly<Rat>, 6>, 5> jacobian_sym(const Architecture& arch);

// F_j = det of J with column j removed (j = 1..6 in index order 0..5).
std::array<MultiPoly<Rat>, 6> minors_sym(const Architecture& arch);

std::array<double, 6> minors_at(const Architecture& arch, const Configuration& c);

// Minors divided by the product of Jacobian row norms (Hadamard scale), the
// residual normalization used by the sampling suites.
std::array<double, 6> minors_at_normalized(const Architecture& arch, const Configuration& c);

// (verdict, sigma_min/sigma_max) of the Jacobian.
std::pair<bool, double> is_singular(const Architecture& arch, const Configuration& c,
                                    double tol = 1e-8);

// Dense term list compiled from a MultiPoly for fast repeated evaluation.
template <typename K>
struct TermList {
    struct Term {
        K c;
        std::array<std::uint8_t, 6> e;
    };
    std::vector<Term> terms;

    static TermList compile(const MultiPoly<Rat>& p) {
        static const std::vector<std::string> canon = {"u", "v", "w", "px", "py", "pz"};
        MultiPoly<Rat> q = p.extended_to(canon);
        TermList out;
        out.terms.reserve(q.num_terms());
        for (const auto& [e, c] : q.terms()) {
            Term t;
            if constexpr (std::is_same_v<K, double>)
                t.c = to_double(c);
            else
                t.c = K(c);
            for (int i = 0; i < 6; ++i) t.e[std::size_t(i)] = static_cast<std::uint8_t>(e[std::size_t(i)]);
            out.terms.push_back(std::move(t));
        }
        return out;
    }

    K eval(const K* x) const {
        K acc(0);
        for (const auto& t : terms) {
            K m = t.c;
            for (int i = 0; i < 6; ++i)
                for (std::uint8_t k = 0; k < t.e[std::size_t(i)]; ++k) m *= x[i];
            acc += m;
        }
        return acc;
    }

    // (value, sum of |term|): the denominator scale for relative residuals.
    std::pair<K, K> eval_mag(const K* x) const {
        using std::abs;
        using boost::multiprecision::abs;
        K acc(0), mag(0);
        for (const auto& t : terms) {
            K m = t.c;
            for (int i = 0; i < 6; ++i)
                for (std::uint8_t k = 0; k < t.e[std::size_t(i)]; ++k) m *= x[i];
            acc += m;
            mag += abs(m);
        }
        return {acc, mag};
    }
};

// F at a fixed orientation: p^T Q p + b.p + c.
struct Quadric {
    Eigen::Matrix3d Q;
    Eigen::Vector3d b;
    double c;

    double value(const Eigen::Vector3d& p) const { return p.dot(Q * p) + b.dot(p) + c; }
    Eigen::Matrix4d sym() const;  // homogeneous symmetric form
};

// F at a fixed position: i^T A i + b.i (no constant term).
struct PositionCone {
    Eigen::Matrix3d A;
    Eigen::Vector3d b;

    double value(const Eigen::Vector3d& i) const { return i.dot(A * i) + b.dot(i); }
};

// The 43-monomial support template of the singularity polynomial for frames
// satisfying the zero pattern x1=y1=z1=y2=z2=z3=0; exponent order
// (u,v,w,px,py,pz), index k holds the monomial of coefficient A_{k+1}.
extern const std::array<std::array<unsigned, 6>, 43> kSupportTemplate;

class SingularityModel {
public:
    const MultiPoly<Rat>& F() const { return F_; }
    const Rat& normalization() const { return normalization_; }

    // Populated only when the architecture satisfies the zero pattern, in
    // which case the support containment is asserted at build time.
    const std::optional<std::array<double, 43>>& coeffsA() const { return coeffsA_; }

    double eval(const Configuration& c) const;
    double eval(const double* x) const { return fd_.eval(x); }
    std::pair<double, double> eval_mag(const double* x) const { return fd_.eval_mag(x); }
    double eval_normalized(const Configuration& c) const;  // |F| / (1 + term scale)

    Eigen::Matrix<double, 6, 1> gradient(const double* x) const;
    Eigen::Matrix<double, 6, 6> hessian(const double* x) const;

    BigFloat eval_hp(const BigFloat* x) const { return fh_.eval(x); }
    std::pair<BigFloat, BigFloat> eval_mag_hp(const BigFloat* x) const { return fh_.eval_mag(x); }
    void gradient_hp(const BigFloat* x, BigFloat* g6) const;
    void hessian_hp(const BigFloat* x, BigFloat* h36) const;  // row-major 6x6

    // Same variety, defining polynomial multiplied by s > 0. Lagrange
    // multipliers of F scale by 1/s; useful to match foreign conventions.
    SingularityModel rescaled(const Rat& s) const;

private:
    friend SingularityModel extract_F(const Architecture&);

    MultiPoly<Rat> F_;
    Rat normalization_{1};
    std::optional<std::array<double, 43>> coeffsA_;

    TermList<double> fd_;
    std::array<TermList<double>, 6> gd_;
    std::array<TermList<double>, 36> hd_;
    TermList<BigFloat> fh_;
    std::array<TermList<BigFloat>, 6> gh_;
    std::array<TermList<BigFloat>, 36> hh_;

    void compile();
};

// Exact-rational gcd extraction via the quadric-cofactor kernel method;
// certified by exact division against all six minors.
SingularityModel extract_F(const Architecture& arch);

Quadric orientation_quadric(const SingularityModel& model, const Eigen::Vector3d& i);
PositionCone position_cone(const SingularityModel& model, const Eigen::Vector3d& p);

}  // namespace pentasing::pentapod

#endif
