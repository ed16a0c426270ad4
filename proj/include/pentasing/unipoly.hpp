// Dense univariate polynomials: arithmetic, division, gcd (exact and
// approximate), Newton interpolation. Coefficients ascending, trailing
// zeros trimmed, so degree() == coeffs.size() - 1.

#ifndef PENTASING_UNIPOLY_HPP
#define PENTASING_UNIPOLY_HPP

#include <stdexcept>
#include <utility>
#include <vector>

#include "pentasing/multipoly.hpp"
#include "pentasing/scalar.hpp"

namespace pentasing::poly {

template <typename K>
struct UniPoly {
    std::vector<K> c;  // c[i] multiplies x^i

    UniPoly() = default;
    explicit UniPoly(std::vector<K> coeffs) : c(std::move(coeffs)) { trim(); }

    static UniPoly zero() { return UniPoly{}; }
    static UniPoly constant(const K& v) { return UniPoly(std::vector<K>{v}); }

    void trim() {
        while (!c.empty() && c.back() == 0) c.pop_back();
    }

    bool is_zero() const { return c.empty(); }
    int degree() const { return static_cast<int>(c.size()) - 1; }

    K eval(const K& x) const {
        K acc(0);
        for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
        return acc;
    }

    // Value plus the sum of |c_i x^i|, the scale for relative residuals.
    std::pair<K, K> eval_with_magnitude(const K& x) const {
        using std::abs;
        using boost::multiprecision::abs;
        K acc(0), mag(0), p(1);
        for (const K& ci : c) {
            acc += ci * p;
            mag += abs(ci * p);
            p *= x;
        }
        return {acc, mag};
    }

    UniPoly derivative() const {
        if (c.size() <= 1) return zero();
        std::vector<K> d(c.size() - 1);
        for (std::size_t i = 1; i < c.size(); ++i) d[i - 1] = c[i] * K(static_cast<int>(i));
        return UniPoly(std::move(d));
    }

    K max_abs_coeff() const {
        using std::abs;
        using boost::multiprecision::abs;
        K m(0);
        for (const K& ci : c)
            if (abs(ci) > m) m = abs(ci);
        return m;
    }

    UniPoly monic() const {
        if (is_zero()) throw std::invalid_argument("monic: zero polynomial");
        UniPoly r = *this;
        K lead = r.c.back();
        for (K& ci : r.c) ci /= lead;
        return r;
    }

    friend UniPoly operator+(const UniPoly& a, const UniPoly& b) {
        std::vector<K> r(std::max(a.c.size(), b.c.size()), K(0));
        for (std::size_t i = 0; i < a.c.size(); ++i) r[i] += a.c[i];
        for (std::size_t i = 0; i < b.c.size(); ++i) r[i] += b.c[i];
        return UniPoly(std::move(r));
    }

    friend UniPoly operator-(const UniPoly& a, const UniPoly& b) {
        std::vector<K> r(std::max(a.c.size(), b.c.size()), K(0));
        for (std::size_t i = 0; i < a.c.size(); ++i) r[i] += a.c[i];
        for (std::size_t i = 0; i < b.c.size(); ++i) r[i] -= b.c[i];
        return UniPoly(std::move(r));
    }

    friend UniPoly operator*(const UniPoly& a, const UniPoly& b) {
        if (a.is_zero() || b.is_zero()) return zero();
        std::vector<K> r(a.c.size() + b.c.size() - 1, K(0));
        for (std::size_t i = 0; i < a.c.size(); ++i)
            for (std::size_t j = 0; j < b.c.size(); ++j) r[i + j] += a.c[i] * b.c[j];
        return UniPoly(std::move(r));
    }

    friend UniPoly operator*(const UniPoly& a, const K& s) {
        UniPoly r = a;
        for (K& ci : r.c) ci *= s;
        r.trim();
        return r;
    }

    friend bool operator==(const UniPoly& a, const UniPoly& b) { return a.c == b.c; }
};

// Quotient and remainder over a field.
template <typename K>
std::pair<UniPoly<K>, UniPoly<K>> uni_divmod(const UniPoly<K>& n, const UniPoly<K>& d) {
    if (d.is_zero()) throw std::invalid_argument("uni_divmod: division by zero");
    UniPoly<K> r = n;
    if (r.degree() < d.degree()) return {UniPoly<K>::zero(), r};
    std::vector<K> q(static_cast<std::size_t>(r.degree() - d.degree()) + 1, K(0));
    const K lead = d.c.back();
    while (!r.is_zero() && r.degree() >= d.degree()) {
        const std::size_t shift = static_cast<std::size_t>(r.degree() - d.degree());
        K f = r.c.back() / lead;
        q[shift] = f;
        for (std::size_t i = 0; i < d.c.size(); ++i) r.c[shift + i] -= f * d.c[i];
        r.c.pop_back();  // leading term cancels exactly by construction
        r.trim();
    }
    return {UniPoly<K>(std::move(q)), r};
}

// Exact gcd over the rationals: monic Euclid. Result is monic (or zero).
inline UniPoly<Rat> uni_gcd(UniPoly<Rat> a, UniPoly<Rat> b) {
    while (!b.is_zero()) {
        auto [q, r] = uni_divmod(a, b);
        a = std::move(b);
        b = std::move(r);
    }
    if (a.is_zero()) return a;
    return a.monic();
}

namespace detail {

// Rank of a dense matrix by full-pivot Gaussian elimination; a pivot counts
// while its magnitude exceeds tol times the largest initial entry.
template <typename K>
int matrix_rank(std::vector<std::vector<K>> m, const K& tol) {
    using std::abs;
    using boost::multiprecision::abs;
    const std::size_t rows = m.size();
    if (rows == 0) return 0;
    const std::size_t cols = m[0].size();
    K scale(0);
    for (const auto& row : m)
        for (const K& x : row)
            if (abs(x) > scale) scale = abs(x);
    if (scale == 0) return 0;
    const K cut = scale * tol;
    int rank = 0;
    std::vector<bool> row_used(rows, false), col_used(cols, false);
    for (std::size_t step = 0; step < std::min(rows, cols); ++step) {
        std::size_t pr = rows, pc = cols;
        K best(0);
        for (std::size_t i = 0; i < rows; ++i) {
            if (row_used[i]) continue;
            for (std::size_t j = 0; j < cols; ++j) {
                if (col_used[j]) continue;
                if (abs(m[i][j]) > best) { best = abs(m[i][j]); pr = i; pc = j; }
            }
        }
        if (pr == rows || best <= cut) break;
        ++rank;
        row_used[pr] = true;
        col_used[pc] = true;
        for (std::size_t i = 0; i < rows; ++i) {
            if (row_used[i] || m[i][pc] == 0) continue;
            K f = m[i][pc] / m[pr][pc];
            for (std::size_t j = 0; j < cols; ++j)
                if (!col_used[j]) m[i][j] -= f * m[pr][j];
            m[i][pc] = K(0);
        }
    }
    return rank;
}

}  // namespace detail

// Approximate gcd for floating scalars. The gcd degree is decided first from
// the numerical rank of the Sylvester matrix (deg gcd = m + n - rank), then a
// Euclidean remainder sequence is truncated at that degree. tol is relative.
template <typename K>
UniPoly<K> uni_gcd_approx(const UniPoly<K>& p, const UniPoly<K>& q, const K& tol) {
    using std::abs;
    using boost::multiprecision::abs;
    if (p.is_zero()) return q.is_zero() ? q : q.monic();
    if (q.is_zero()) return p.monic();
    const int m = p.degree(), n = q.degree();
    if (m == 0 || n == 0) return UniPoly<K>::constant(K(1));

    UniPoly<K> a = p * (K(1) / p.max_abs_coeff());
    UniPoly<K> b = q * (K(1) / q.max_abs_coeff());

    std::vector<std::vector<K>> s(static_cast<std::size_t>(m + n),
                                  std::vector<K>(static_cast<std::size_t>(m + n), K(0)));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= m; ++j) s[i][i + j] = a.c[static_cast<std::size_t>(m - j)];
    for (int i = 0; i < m; ++i)
        for (int j = 0; j <= n; ++j) s[n + i][i + j] = b.c[static_cast<std::size_t>(n - j)];
    const int rank = detail::matrix_rank(std::move(s), tol);
    const int gdeg = m + n - rank;
    if (gdeg <= 0) return UniPoly<K>::constant(K(1));

    if (b.degree() > a.degree()) std::swap(a, b);
    while (b.degree() > gdeg) {
        auto [quot, r] = uni_divmod(a, b);
        // drop numerical noise relative to the remainder's own scale
        K cut = r.max_abs_coeff() * tol;
        for (K& ci : r.c)
            if (abs(ci) <= cut) ci = K(0);
        r.trim();
        if (r.is_zero() || r.degree() < gdeg)
            return b.monic();  // b already is the gcd-degree survivor
        a = std::move(b);
        b = std::move(r);
    }
    return b.monic();
}

// Newton interpolation through all (x_i, y_i); nodes must be pairwise
// distinct. Exact for exact K.
template <typename K>
UniPoly<K> interpolate_uni(const std::vector<K>& xs, const std::vector<K>& ys) {
    if (xs.size() != ys.size() || xs.empty())
        throw std::invalid_argument("interpolate_uni: need matching nonempty nodes");
    const std::size_t n = xs.size();
    std::vector<K> dd = ys;  // divided differences, updated in place
    for (std::size_t level = 1; level < n; ++level)
        for (std::size_t i = n - 1; i >= level; --i) {
            K dx = xs[i] - xs[i - level];
            if (dx == 0) throw std::invalid_argument("interpolate_uni: repeated node");
            dd[i] = (dd[i] - dd[i - 1]) / dx;
        }
    UniPoly<K> acc = UniPoly<K>::constant(dd[n - 1]);
    for (std::size_t i = n - 1; i-- > 0;) {
        // acc = acc * (x - xs[i]) + dd[i]
        UniPoly<K> shift(std::vector<K>{-xs[i], K(1)});
        acc = acc * shift + UniPoly<K>::constant(dd[i]);
    }
    return acc;
}

// A MultiPoly that involves at most the single variable `var` becomes dense
// univariate coefficients.
template <typename K>
UniPoly<K> to_unipoly(const MultiPoly<K>& p, const std::string& var) {
    auto cs = p.coeffs_in(var);
    std::vector<K> out;
    out.reserve(cs.size());
    for (const auto& ci : cs) {
        if (ci.is_zero()) {
            out.push_back(K(0));
        } else if (ci.total_degree() == 0) {
            out.push_back(ci.terms().begin()->second);
        } else {
            throw std::invalid_argument("to_unipoly: polynomial involves more than " + var);
        }
    }
    return UniPoly<K>(std::move(out));
}

template <typename To, typename From>
UniPoly<To> uni_convert(const UniPoly<From>& p) {
    std::vector<To> out;
    out.reserve(p.c.size());
    for (const auto& ci : p.c) out.push_back(static_cast<To>(ci));
    return UniPoly<To>(std::move(out));
}

}  // namespace pentasing::poly

#endif
