// Sparse multivariate polynomials over an exact or floating scalar K.
//
// Terms live in a map keyed by exponent vectors under graded lexicographic
// order, so iteration order (and hence every derived computation) is
// deterministic. Variable lists are ordered by a fixed canonical ranking
// (u, v, w, px, py, pz, lambda1, lambda2, then lexicographic) and binary
// operations align their operands' variable lists automatically.

#ifndef PENTASING_MULTIPOLY_HPP
#define PENTASING_MULTIPOLY_HPP

#include <algorithm>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "pentasing/scalar.hpp"

namespace pentasing::poly {

using ExpVec = std::vector<unsigned>;

inline int var_rank(const std::string& v) {
    static const char* order[] = {"u", "v", "w", "px", "py", "pz", "lambda1", "lambda2"};
    for (int i = 0; i < 8; ++i)
        if (v == order[i]) return i;
    return 8;
}

inline bool var_less(const std::string& a, const std::string& b) {
    int ra = var_rank(a), rb = var_rank(b);
    if (ra != rb) return ra < rb;
    return a < b;
}

struct GrlexLess {
    bool operator()(const ExpVec& a, const ExpVec& b) const {
        unsigned da = 0, db = 0;
        for (unsigned e : a) da += e;
        for (unsigned e : b) db += e;
        if (da != db) return da < db;
        return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
    }
};

template <typename K>
class MultiPoly {
public:
    using TermMap = std::map<ExpVec, K, GrlexLess>;

    MultiPoly() = default;

    explicit MultiPoly(std::vector<std::string> vars) : vars_(std::move(vars)) {
        check_vars_sorted();
    }

    static MultiPoly constant(const K& c, std::vector<std::string> vars = {}) {
        MultiPoly p(std::move(vars));
        if (!(c == 0)) p.terms_[ExpVec(p.vars_.size(), 0)] = c;
        return p;
    }

    static MultiPoly variable(const std::string& name, std::vector<std::string> vars) {
        MultiPoly p(std::move(vars));
        ExpVec e(p.vars_.size(), 0);
        e[p.index_of(name)] = 1;
        p.terms_[e] = K(1);
        return p;
    }

    void add_term(const ExpVec& exps, const K& c) {
        if (exps.size() != vars_.size()) throw std::invalid_argument("add_term: exponent arity");
        auto it = terms_.find(exps);
        if (it == terms_.end()) {
            if (!(c == 0)) terms_[exps] = c;
        } else {
            it->second += c;
            if (it->second == 0) terms_.erase(it);
        }
    }

    const std::vector<std::string>& vars() const { return vars_; }
    const TermMap& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t num_terms() const { return terms_.size(); }

    int total_degree() const {
        int d = -1;
        for (const auto& [e, c] : terms_) {
            int s = 0;
            for (unsigned x : e) s += static_cast<int>(x);
            d = std::max(d, s);
        }
        return d;  // -1 for the zero polynomial
    }

    int degree_in(const std::string& name) const {
        auto pos = find_var(name);
        if (pos < 0) return is_zero() ? -1 : 0;
        int d = is_zero() ? -1 : 0;
        for (const auto& [e, c] : terms_) d = std::max(d, static_cast<int>(e[pos]));
        return d;
    }

    MultiPoly operator-() const {
        MultiPoly r(vars_);
        for (const auto& [e, c] : terms_) r.terms_[e] = -c;
        return r;
    }

    friend MultiPoly operator+(const MultiPoly& a, const MultiPoly& b) {
        auto [x, y] = aligned(a, b);
        for (const auto& [e, c] : y.terms_) x.add_term(e, c);
        return x;
    }

    friend MultiPoly operator-(const MultiPoly& a, const MultiPoly& b) {
        auto [x, y] = aligned(a, b);
        for (const auto& [e, c] : y.terms_) x.add_term(e, -c);
        return x;
    }

    friend MultiPoly operator*(const MultiPoly& a, const MultiPoly& b) {
        auto [x, y] = aligned(a, b);
        MultiPoly r(x.vars_);
        ExpVec e(x.vars_.size());
        for (const auto& [ea, ca] : x.terms_) {
            for (const auto& [eb, cb] : y.terms_) {
                for (std::size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
                r.add_term(e, ca * cb);
            }
        }
        return r;
    }

    friend MultiPoly operator*(const MultiPoly& a, const K& s) {
        MultiPoly r(a.vars_);
        if (s == 0) return r;
        for (const auto& [e, c] : a.terms_) r.terms_[e] = c * s;
        return r;
    }
    friend MultiPoly operator*(const K& s, const MultiPoly& a) { return a * s; }

    MultiPoly& operator+=(const MultiPoly& o) { *this = *this + o; return *this; }
    MultiPoly& operator-=(const MultiPoly& o) { *this = *this - o; return *this; }
    MultiPoly& operator*=(const MultiPoly& o) { *this = *this * o; return *this; }

    friend bool operator==(const MultiPoly& a, const MultiPoly& b) {
        auto [x, y] = aligned(a, b);
        return x.terms_ == y.terms_;
    }

    // Every variable of the polynomial must be assigned.
    K eval(const std::map<std::string, K>& point) const {
        std::vector<K> vals = assignment_vector(point);
        K acc(0);
        for (const auto& [e, c] : terms_) acc += c * monomial_value(e, vals);
        return acc;
    }

    // Value together with the sum of absolute term magnitudes (the natural
    // scale for relative residual tests).
    std::pair<K, K> eval_with_magnitude(const std::map<std::string, K>& point) const {
        std::vector<K> vals = assignment_vector(point);
        K acc(0), mag(0);
        using std::abs;
        using boost::multiprecision::abs;
        for (const auto& [e, c] : terms_) {
            K t = c * monomial_value(e, vals);
            acc += t;
            mag += abs(t);
        }
        return {acc, mag};
    }

    // Fixes a subset of variables; the result lives on the remaining ones.
    MultiPoly substitute(const std::map<std::string, K>& partial) const {
        std::vector<std::string> rest;
        std::vector<int> keep;  // index into old exponent vector
        for (std::size_t i = 0; i < vars_.size(); ++i) {
            if (!partial.count(vars_[i])) {
                rest.push_back(vars_[i]);
                keep.push_back(static_cast<int>(i));
            }
        }
        MultiPoly r(rest);
        ExpVec e(rest.size());
        for (const auto& [exps, c] : terms_) {
            K coeff = c;
            for (std::size_t i = 0; i < vars_.size(); ++i) {
                if (auto it = partial.find(vars_[i]); it != partial.end() && exps[i] > 0)
                    coeff = coeff * pow_k(it->second, exps[i]);
            }
            for (std::size_t j = 0; j < keep.size(); ++j) e[j] = exps[keep[j]];
            r.add_term(e, coeff);
        }
        return r;
    }

    MultiPoly derivative(const std::string& name) const {
        int pos = find_var(name);
        MultiPoly r(vars_);
        if (pos < 0) return r;
        for (const auto& [e, c] : terms_) {
            if (e[pos] == 0) continue;
            ExpVec d = e;
            d[pos] -= 1;
            r.add_term(d, c * K(static_cast<int>(e[pos])));
        }
        return r;
    }

    // Coefficients as a univariate in `name`, ascending; each coefficient is
    // a polynomial in the remaining variables.
    std::vector<MultiPoly> coeffs_in(const std::string& name) const {
        int pos = find_var(name);
        std::vector<std::string> rest;
        std::vector<int> keep;
        for (std::size_t i = 0; i < vars_.size(); ++i) {
            if (static_cast<int>(i) != pos) {
                rest.push_back(vars_[i]);
                keep.push_back(static_cast<int>(i));
            }
        }
        int d = pos < 0 ? 0 : degree_in(name);
        if (d < 0) d = 0;
        std::vector<MultiPoly> out(static_cast<std::size_t>(d) + 1, MultiPoly(rest));
        ExpVec e(rest.size());
        for (const auto& [exps, c] : terms_) {
            unsigned k = pos < 0 ? 0u : exps[pos];
            for (std::size_t j = 0; j < keep.size(); ++j) e[j] = exps[keep[j]];
            out[k].add_term(e, c);
        }
        return out;
    }

    K max_abs_coeff() const {
        using std::abs;
        using boost::multiprecision::abs;
        K m(0);
        for (const auto& [e, c] : terms_)
            if (abs(c) > m) m = abs(c);
        return m;
    }

    // Drops coefficients below rel_tol * max |coeff|; float-mode cleanup.
    MultiPoly pruned(const K& rel_tol) const {
        using std::abs;
        using boost::multiprecision::abs;
        K cut = max_abs_coeff() * rel_tol;
        MultiPoly r(vars_);
        for (const auto& [e, c] : terms_)
            if (abs(c) > cut) r.terms_[e] = c;
        return r;
    }

    std::string to_string() const {
        if (terms_.empty()) return "0";
        std::ostringstream os;
        bool first = true;
        for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
            if (!first) os << " + ";
            first = false;
            os << it->second;
            for (std::size_t i = 0; i < vars_.size(); ++i) {
                if (it->first[i] == 0) continue;
                os << "*" << vars_[i];
                if (it->first[i] > 1) os << "^" << it->first[i];
            }
        }
        return os.str();
    }

    // Extends the variable list (a superset, canonically ordered).
    MultiPoly extended_to(const std::vector<std::string>& vars) const {
        MultiPoly r(vars);
        std::vector<int> where(vars_.size());
        for (std::size_t i = 0; i < vars_.size(); ++i) {
            auto it = std::find(vars.begin(), vars.end(), vars_[i]);
            if (it == vars.end()) throw std::invalid_argument("extended_to: not a superset");
            where[i] = static_cast<int>(it - vars.begin());
        }
        ExpVec e(vars.size());
        for (const auto& [exps, c] : terms_) {
            std::fill(e.begin(), e.end(), 0u);
            for (std::size_t i = 0; i < exps.size(); ++i) e[where[i]] = exps[i];
            r.terms_[e] = c;
        }
        return r;
    }

    static std::pair<MultiPoly, MultiPoly> aligned(const MultiPoly& a, const MultiPoly& b) {
        if (a.vars_ == b.vars_) return {a, b};
        std::vector<std::string> merged = a.vars_;
        for (const auto& v : b.vars_)
            if (std::find(merged.begin(), merged.end(), v) == merged.end()) merged.push_back(v);
        std::sort(merged.begin(), merged.end(), var_less);
        return {a.extended_to(merged), b.extended_to(merged)};
    }

private:
    std::vector<std::string> vars_;
    TermMap terms_;

    void check_vars_sorted() const {
        for (std::size_t i = 1; i < vars_.size(); ++i)
            if (!var_less(vars_[i - 1], vars_[i]))
                throw std::invalid_argument("MultiPoly: variables must be canonically ordered and distinct");
    }

    int find_var(const std::string& name) const {
        auto it = std::find(vars_.begin(), vars_.end(), name);
        return it == vars_.end() ? -1 : static_cast<int>(it - vars_.begin());
    }

    std::size_t index_of(const std::string& name) const {
        int pos = find_var(name);
        if (pos < 0) throw std::invalid_argument("MultiPoly: unknown variable " + name);
        return static_cast<std::size_t>(pos);
    }

    std::vector<K> assignment_vector(const std::map<std::string, K>& point) const {
        std::vector<K> vals;
        vals.reserve(vars_.size());
        for (const auto& v : vars_) {
            auto it = point.find(v);
            if (it == point.end()) throw std::invalid_argument("eval: missing assignment for " + v);
            vals.push_back(it->second);
        }
        return vals;
    }

    static K pow_k(const K& x, unsigned e) {
        K acc(1), base = x;
        while (e) {
            if (e & 1u) acc *= base;
            base *= base;
            e >>= 1u;
        }
        return acc;
    }

    static K monomial_value(const ExpVec& e, const std::vector<K>& vals) {
        K m(1);
        for (std::size_t i = 0; i < e.size(); ++i)
            if (e[i]) m *= pow_k(vals[i], e[i]);
        return m;
    }
};

inline int row_position(std::uint32_t mask, std::size_t r) {
    int pos = 0;
    for (std::size_t i = 0; i < r; ++i)
        if (mask & (1u << i)) ++pos;
    return pos;
}

// Determinant of a square matrix of polynomials by column-wise Laplace
// expansion with subset memoization: O(n * 2^n) polynomial multiplies.
// All entries must share one variable list.
template <typename K>
MultiPoly<K> poly_matrix_det(const std::vector<std::vector<MultiPoly<K>>>& m) {
    const std::size_t n = m.size();
    if (n == 0 || n > 20) throw std::invalid_argument("poly_matrix_det: bad dimension");
    for (const auto& row : m)
        if (row.size() != n) throw std::invalid_argument("poly_matrix_det: not square");
    const auto& vars = m[0][0].vars();

    std::unordered_map<std::uint32_t, MultiPoly<K>> cur;
    cur[0] = MultiPoly<K>::constant(K(1), vars);
    for (std::size_t k = 0; k < n; ++k) {
        std::unordered_map<std::uint32_t, MultiPoly<K>> next;
        for (const auto& [mask, det] : cur) {
            for (std::size_t r = 0; r < n; ++r) {
                if (mask & (1u << r)) continue;
                if (m[r][k].is_zero()) continue;
                std::uint32_t nm = mask | (1u << r);
                MultiPoly<K> contrib = m[r][k] * det;
                bool negate = ((static_cast<int>(k) + row_position(nm, r)) % 2) != 0;
                auto it = next.find(nm);
                if (it == next.end())
                    next.emplace(nm, negate ? -contrib : contrib);
                else
                    it->second = negate ? it->second - contrib : it->second + contrib;
            }
        }
        cur = std::move(next);
        if (cur.empty()) return MultiPoly<K>(vars);  // a zero column kills every minor
    }
    return cur.begin()->second;
}

// Sylvester resultant of p and q with respect to `var`. Both arguments must
// have positive degree in var; the result does not involve var and vanishes
// exactly where p and q share a root in var.
template <typename K>
MultiPoly<K> sylvester_resultant(const MultiPoly<K>& p, const MultiPoly<K>& q, const std::string& var) {
    auto [a, b] = MultiPoly<K>::aligned(p, q);
    int m = a.degree_in(var), n = b.degree_in(var);
    if (m < 1 || n < 1)
        throw std::invalid_argument("sylvester_resultant: both arguments need positive degree in " + var);
    auto pc = a.coeffs_in(var);  // ascending, size m+1
    auto qc = b.coeffs_in(var);
    const auto& vars = pc[0].vars();
    const std::size_t N = static_cast<std::size_t>(m + n);
    std::vector<std::vector<MultiPoly<K>>> s(N, std::vector<MultiPoly<K>>(N, MultiPoly<K>(vars)));
    for (int i = 0; i < n; ++i)  // rows of p coefficients, descending
        for (int j = 0; j <= m; ++j) s[i][i + j] = pc[static_cast<std::size_t>(m - j)];
    for (int i = 0; i < m; ++i)
        for (int j = 0; j <= n; ++j) s[n + i][i + j] = qc[static_cast<std::size_t>(n - j)];
    return poly_matrix_det(s);
}

// Exact quotient n / d; throws if the division leaves a remainder (the
// message carries the remainder's largest coefficient magnitude).
template <typename K>
MultiPoly<K> poly_divide_exact(const MultiPoly<K>& n, const MultiPoly<K>& d) {
    auto [num, den] = MultiPoly<K>::aligned(n, d);
    if (den.is_zero()) throw std::invalid_argument("poly_divide_exact: division by zero polynomial");
    MultiPoly<K> q(num.vars());
    MultiPoly<K> r = num;
    const auto& dlead = *den.terms().rbegin();  // graded-lex leading term
    while (!r.is_zero()) {
        const auto& rlead = *r.terms().rbegin();
        ExpVec diff(rlead.first.size());
        bool divisible = true;
        for (std::size_t i = 0; i < diff.size(); ++i) {
            if (rlead.first[i] < dlead.first[i]) { divisible = false; break; }
            diff[i] = rlead.first[i] - dlead.first[i];
        }
        if (!divisible) {
            std::ostringstream os;
            os << "poly_divide_exact: nonzero remainder, max |coeff| = " << r.max_abs_coeff();
            throw std::domain_error(os.str());
        }
        MultiPoly<K> t(num.vars());
        t.add_term(diff, rlead.second / dlead.second);
        q += t;
        r -= t * den;
    }
    return q;
}

}  // namespace pentasing::poly

#endif
