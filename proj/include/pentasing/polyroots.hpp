// All complex roots of a univariate polynomial in high precision:
// companion-matrix eigenvalues in double for the initial guesses, then
// Aberth-Ehrlich simultaneous iteration and a per-root Newton polish.

#ifndef PENTASING_POLYROOTS_HPP
#define PENTASING_POLYROOTS_HPP

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <complex>
#include <stdexcept>
#include <vector>

#include "pentasing/scalar.hpp"
#include "pentasing/unipoly.hpp"

namespace pentasing::poly {

namespace detail {

template <typename K>
Cplx<K> horner(const std::vector<K>& c, const Cplx<K>& x) {
    Cplx<K> acc(K(0), K(0));
    for (auto it = c.rbegin(); it != c.rend(); ++it) {
        acc = acc * x;
        acc.re += *it;
    }
    return acc;
}

inline std::vector<std::complex<double>> companion_guesses(const std::vector<double>& c) {
    const int n = static_cast<int>(c.size()) - 1;
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (int i = 1; i < n; ++i) a(i, i - 1) = 1.0;
    for (int i = 0; i < n; ++i) a(i, n - 1) = -c[static_cast<std::size_t>(i)] / c[static_cast<std::size_t>(n)];
    Eigen::EigenSolver<Eigen::MatrixXd> es(a, /*computeEigenvectors=*/false);
    std::vector<std::complex<double>> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = es.eigenvalues()(i);
    return out;
}

}  // namespace detail

// Roots of p (all of them, complex), sorted by (Re, Im).
// Requires deg p >= 1.
template <typename K>
std::vector<Cplx<K>> uni_roots(const UniPoly<K>& p) {
    using std::abs;
    using boost::multiprecision::abs;
    if (p.degree() < 1) throw std::invalid_argument("uni_roots: degree must be positive");

    // peel off roots at the origin so the companion matrix stays well posed
    std::vector<K> c = p.c;
    std::size_t zeros = 0;
    while (zeros < c.size() - 1 && c[zeros] == 0) ++zeros;
    c.erase(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(zeros));

    std::vector<Cplx<K>> roots(zeros, Cplx<K>(K(0), K(0)));
    const int n = static_cast<int>(c.size()) - 1;
    if (n >= 1) {
        std::vector<double> cd(c.size());
        K scale = UniPoly<K>(std::vector<K>(c)).max_abs_coeff();
        for (std::size_t i = 0; i < c.size(); ++i) cd[i] = to_double(c[i] / scale);
        auto guess = detail::companion_guesses(cd);

        std::vector<Cplx<K>> z(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            auto g = guess[static_cast<std::size_t>(i)];
            // nudge coincident guesses apart; Aberth needs distinct iterates
            z[static_cast<std::size_t>(i)] =
                Cplx<K>(K(g.real()) + K(i) * K(1e-12), K(g.imag()) + K(1e-12));
        }

        std::vector<K> dc(c.size() - 1);
        for (std::size_t i = 1; i < c.size(); ++i) dc[i - 1] = c[i] * K(static_cast<int>(i));

        const K target = hp::epsilon<K>() * K(1000);
        for (int iter = 0; iter < 300; ++iter) {
            K worst(0);
            for (int i = 0; i < n; ++i) {
                Cplx<K>& zi = z[static_cast<std::size_t>(i)];
                Cplx<K> pv = detail::horner(c, zi);
                Cplx<K> dv = detail::horner(dc, zi);
                if (dv.abs() == 0) { zi.re += K(1e-8); continue; }
                Cplx<K> newton = pv / dv;
                Cplx<K> s(K(0), K(0));
                for (int j = 0; j < n; ++j) {
                    if (j == i) continue;
                    Cplx<K> d = zi - z[static_cast<std::size_t>(j)];
                    if (d.abs() == 0) d.re = K(1e-20);
                    s = s + Cplx<K>(K(1), K(0)) / d;
                }
                Cplx<K> denom = Cplx<K>(K(1), K(0)) - newton * s;
                Cplx<K> step = denom.abs() == 0 ? newton : newton / denom;
                zi = zi - step;
                K mag = step.abs() / (K(1) + zi.abs());
                if (mag > worst) worst = mag;
            }
            if (worst < target) break;
        }

        for (int i = 0; i < n; ++i) {  // independent Newton polish
            Cplx<K>& zi = z[static_cast<std::size_t>(i)];
            for (int it2 = 0; it2 < 8; ++it2) {
                Cplx<K> pv = detail::horner(c, zi);
                Cplx<K> dv = detail::horner(dc, zi);
                if (dv.abs() == 0) break;
                Cplx<K> step = pv / dv;
                zi = zi - step;
                if (step.abs() <= hp::epsilon<K>() * (K(1) + zi.abs())) break;
            }
        }
        roots.insert(roots.end(), z.begin(), z.end());
    }

    std::sort(roots.begin(), roots.end(), [](const Cplx<K>& a, const Cplx<K>& b) {
        if (a.re != b.re) return a.re < b.re;
        return a.im < b.im;
    });
    return roots;
}

// Real roots only: imaginary part below tol relative to the root magnitude.
template <typename K>
std::vector<K> real_roots(const std::vector<Cplx<K>>& roots, const K& tol) {
    using std::abs;
    using boost::multiprecision::abs;
    std::vector<K> out;
    for (const auto& r : roots)
        if (abs(r.im) <= tol * (K(1) + abs(r.re))) out.push_back(r.re);
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace pentasing::poly

#endif
