#pragma once

// Patterns: r-uniform hypergraphs whose edges are r-multisets of vertices.
// Ordinary r-graphs are the repeat-free special case. This header covers the
// value types, the text file format, canonical relabeling, blowups, and the
// blowup polynomial with its derivatives.

#include <algorithm>
#include <array>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "patlag/rational.hpp"

namespace patlag {

/// An edge is a sorted r-multiset of 1-based vertex labels.
using Edge = std::vector<int>;

/// Copy counts for a blowup, one entry per vertex. Entries of 0 delete the
/// vertex (every edge through it disappears).
using BlowupVector = std::vector<int>;

struct Pattern {
    int r = 3;
    int n = 0;
    std::vector<Edge> edges;  // sorted lexicographically, no duplicates

    Pattern() = default;
    Pattern(int r_, int n_, std::vector<Edge> edges_) : r(r_), n(n_), edges(std::move(edges_)) {
        normalize();
    }

    int edge_count() const { return static_cast<int>(edges.size()); }

    bool operator==(const Pattern& o) const {
        return r == o.r && n == o.n && edges == o.edges;
    }

    /// True when no edge repeats a vertex, i.e. the pattern is an r-graph.
    bool is_graph() const {
        for (const Edge& e : edges)
            for (std::size_t i = 1; i < e.size(); ++i)
                if (e[i] == e[i - 1]) return false;
        return true;
    }

  private:
    void normalize() {
        if (r < 1) throw std::invalid_argument("pattern: uniformity must be >= 1");
        if (n < 1) throw std::invalid_argument("pattern: vertex count must be >= 1");
        for (Edge& e : edges) {
            if (static_cast<int>(e.size()) != r)
                throw std::invalid_argument("pattern: edge arity != r");
            std::sort(e.begin(), e.end());
            if (e.front() < 1 || e.back() > n)
                throw std::invalid_argument("pattern: vertex label out of range");
        }
        std::sort(edges.begin(), edges.end());
        edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    }
};

/// Multiplicity of vertex v in edge e.
inline int multiplicity(const Edge& e, int v) {
    return static_cast<int>(std::count(e.begin(), e.end(), v));
}

/// Distinct vertices of an edge with their multiplicities, ascending.
inline std::vector<std::pair<int, int>> edge_support(const Edge& e) {
    std::vector<std::pair<int, int>> out;
    for (std::size_t i = 0; i < e.size();) {
        std::size_t j = i;
        while (j < e.size() && e[j] == e[i]) ++j;
        out.emplace_back(e[i], static_cast<int>(j - i));
        i = j;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Pattern file format
//
//   # comment
//   r 3
//   n 2
//   edge 1 1 2
//   edge 1 2 2
//
// One directive per line; `r` and `n` must precede the first `edge`. Vertices
// are 1-based and may appear in any order within an `edge` line. Duplicate
// edges are dropped with a warning. Serialization writes edges sorted
// lexicographically, so serialize(parse(.)) is idempotent.
// ---------------------------------------------------------------------------

class PatternParseError : public std::runtime_error {
  public:
    PatternParseError(int line, int column, const std::string& message)
        : std::runtime_error("line " + std::to_string(line) + ", column " +
                             std::to_string(column) + ": " + message),
          line_(line),
          column_(column) {}
    int line() const { return line_; }
    int column() const { return column_; }

  private:
    int line_;
    int column_;
};

inline Pattern parse_pattern(std::string_view text, std::vector<std::string>* warnings = nullptr) {
    std::optional<int> r, n;
    std::vector<Edge> edges;
    int line_no = 0;

    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);

        std::istringstream ls(line);
        std::string directive;
        if (!(ls >> directive)) continue;  // blank/comment line

        auto column_of = [&](const std::string& token) {
            auto pos = line.find(token);
            return static_cast<int>(pos == std::string::npos ? 1 : pos + 1);
        };
        auto parse_int = [](const std::string& token, int& out) {
            std::istringstream ts(token);
            return static_cast<bool>(ts >> out) && ts.eof();
        };

        if (directive == "r" || directive == "n") {
            int value = 0;
            std::string token;
            if (!(ls >> token) || !parse_int(token, value) || value < 1)
                throw PatternParseError(line_no, column_of(directive),
                                        "expected positive integer after '" + directive + "'");
            if (directive == "r") {
                if (r) throw PatternParseError(line_no, 1, "duplicate 'r' directive");
                r = value;
            } else {
                if (n) throw PatternParseError(line_no, 1, "duplicate 'n' directive");
                n = value;
            }
        } else if (directive == "edge") {
            if (!r || !n)
                throw PatternParseError(line_no, 1, "'edge' before 'r' and 'n' directives");
            Edge e;
            std::string token;
            while (ls >> token) {
                int v = 0;
                if (!parse_int(token, v))
                    throw PatternParseError(line_no, column_of(token),
                                            "bad vertex token '" + token + "'");
                if (v < 1 || v > *n)
                    throw PatternParseError(line_no, column_of(token),
                                            "vertex " + std::to_string(v) + " out of range 1.." +
                                                std::to_string(*n));
                e.push_back(v);
            }
            if (static_cast<int>(e.size()) != *r)
                throw PatternParseError(line_no, 1,
                                        "edge has " + std::to_string(e.size()) + " vertices, expected " +
                                            std::to_string(*r));
            std::sort(e.begin(), e.end());
            if (std::find(edges.begin(), edges.end(), e) != edges.end()) {
                if (warnings) {
                    std::string repr;
                    for (int v : e) repr += (repr.empty() ? "" : " ") + std::to_string(v);
                    warnings->push_back("line " + std::to_string(line_no) + ": duplicate edge '" +
                                        repr + "' dropped");
                }
            } else {
                edges.push_back(std::move(e));
            }
        } else {
            throw PatternParseError(line_no, column_of(directive),
                                    "unknown directive '" + directive + "'");
        }
    }
    if (!r || !n) throw PatternParseError(line_no, 1, "missing 'r' or 'n' directive");
    return Pattern(*r, *n, std::move(edges));
}

inline std::string serialize_pattern(const Pattern& p) {
    std::string out = "r " + std::to_string(p.r) + "\nn " + std::to_string(p.n) + "\n";
    for (const Edge& e : p.edges) {
        out += "edge";
        for (int v : e) out += " " + std::to_string(v);
        out += "\n";
    }
    return out;
}

/// Compact one-line rendering, e.g. "112 122". Only for display.
inline std::string edge_list_string(const Pattern& p) {
    std::string out;
    for (const Edge& e : p.edges) {
        if (!out.empty()) out += " ";
        for (int v : e) out += std::to_string(v);
    }
    return out.empty() ? "(no edges)" : out;
}

// ---------------------------------------------------------------------------
// Relabeling and canonical form
// ---------------------------------------------------------------------------

/// Applies the relabeling perm (old label v -> perm[v-1]) to all edges.
inline Pattern apply_permutation(const Pattern& p, const std::vector<int>& perm) {
    if (static_cast<int>(perm.size()) != p.n)
        throw std::invalid_argument("apply_permutation: size mismatch");
    std::vector<Edge> edges = p.edges;
    for (Edge& e : edges)
        for (int& v : e) v = perm[v - 1];
    return Pattern(p.r, p.n, std::move(edges));
}

namespace detail {

constexpr int kCanonicalMaxVertices = 9;  // n! scan; enough for every catalog/search size

template <typename PermFilter>
Pattern canonical_min_over(const Pattern& p, PermFilter&& keep) {
    if (p.n > kCanonicalMaxVertices)
        throw std::invalid_argument("canonical_form: vertex count too large for exhaustive scan");
    std::vector<int> perm(p.n);
    std::iota(perm.begin(), perm.end(), 1);
    std::optional<std::vector<Edge>> best;
    do {
        if (!keep(perm)) continue;
        std::vector<Edge> relabeled = p.edges;
        for (Edge& e : relabeled) {
            for (int& v : e) v = perm[v - 1];
            std::sort(e.begin(), e.end());
        }
        std::sort(relabeled.begin(), relabeled.end());
        if (!best || relabeled < *best) best = std::move(relabeled);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return Pattern(p.r, p.n, std::move(*best));
}

}  // namespace detail

/// Relabeling of p whose sorted edge list is lexicographically minimal over
/// all n! vertex permutations. Idempotent; constant on isomorphism classes.
inline Pattern canonical_form(const Pattern& p) {
    return detail::canonical_min_over(p, [](const std::vector<int>&) { return true; });
}

/// Canonical form over permutations that fix the given vertex (used to dedup
/// search candidates without disturbing the pivot's role).
inline Pattern canonical_form_fixing(const Pattern& p, int fixed_vertex) {
    if (fixed_vertex < 1 || fixed_vertex > p.n)
        throw std::invalid_argument("canonical_form_fixing: vertex out of range");
    return detail::canonical_min_over(p, [&](const std::vector<int>& perm) {
        return perm[fixed_vertex - 1] == fixed_vertex;
    });
}

inline bool isomorphic(const Pattern& a, const Pattern& b) {
    if (a.r != b.r || a.n != b.n || a.edges.size() != b.edges.size()) return false;
    return canonical_form(a) == canonical_form(b);
}

// ---------------------------------------------------------------------------
// Blowups
// ---------------------------------------------------------------------------

struct BlowupResult {
    Pattern pattern;
    /// 1-based label -> (source vertex, copy index), both 1-based.
    std::vector<std::pair<int, int>> label_origin;
    /// source vertex (1-based) -> its copy labels, in copy order.
    std::vector<std::vector<int>> copies;
};

namespace detail {

inline void check_blowup_vector(const Pattern& p, const BlowupVector& t) {
    if (static_cast<int>(t.size()) != p.n)
        throw std::invalid_argument("blowup: t has wrong length");
    for (int ti : t)
        if (ti < 0) throw std::invalid_argument("blowup: negative copy count");
}

inline BlowupResult make_blowup_frame(const Pattern& p, const BlowupVector& t) {
    BlowupResult out;
    out.copies.resize(p.n);
    int next = 1;
    for (int i = 0; i < p.n; ++i)
        for (int c = 1; c <= t[i]; ++c) {
            out.copies[i].push_back(next++);
            out.label_origin.emplace_back(i + 1, c);
        }
    return out;
}

/// All size-m multisets (repeat allowed) or subsets (repeat forbidden) of pool.
inline void choose_labels(const std::vector<int>& pool, int m, bool allow_repeat,
                          std::vector<std::vector<int>>& out) {
    out.clear();
    std::vector<int> cur;
    auto rec = [&](auto&& self, int start) -> void {
        if (static_cast<int>(cur.size()) == m) {
            out.push_back(cur);
            return;
        }
        for (int idx = start; idx < static_cast<int>(pool.size()); ++idx) {
            cur.push_back(pool[idx]);
            self(self, allow_repeat ? idx : idx + 1);
            cur.pop_back();
        }
    };
    rec(rec, 0);
}

inline BlowupResult blowup_impl(const Pattern& p, const BlowupVector& t, bool simple) {
    check_blowup_vector(p, t);
    BlowupResult out = make_blowup_frame(p, t);
    const int total = static_cast<int>(out.label_origin.size());

    std::vector<Edge> edges;
    std::vector<std::vector<int>> options;
    std::vector<std::vector<std::vector<int>>> per_vertex;
    for (const Edge& e : p.edges) {
        per_vertex.clear();
        bool dead = false;
        for (auto [v, m] : edge_support(e)) {
            per_vertex.emplace_back();
            choose_labels(out.copies[v - 1], m, /*allow_repeat=*/!simple, per_vertex.back());
            if (per_vertex.back().empty()) {
                dead = true;
                break;
            }
        }
        if (dead) continue;
        // Cartesian product over the distinct vertices of the edge.
        std::vector<std::size_t> idx(per_vertex.size(), 0);
        while (true) {
            Edge ne;
            for (std::size_t k = 0; k < per_vertex.size(); ++k)
                ne.insert(ne.end(), per_vertex[k][idx[k]].begin(), per_vertex[k][idx[k]].end());
            std::sort(ne.begin(), ne.end());
            edges.push_back(std::move(ne));
            std::size_t k = 0;
            for (; k < idx.size(); ++k) {
                if (++idx[k] < per_vertex[k].size()) break;
                idx[k] = 0;
            }
            if (k == idx.size()) break;
        }
    }
    // An all-zero t leaves no vertices; fall back to one isolated vertex.
    out.pattern = Pattern(p.r, std::max(total, 1), std::move(edges));
    return out;
}

inline long long binomial_ll(long long a, long long b) {
    if (b < 0 || b > a) return 0;
    b = std::min(b, a - b);
    long long out = 1;
    for (long long i = 1; i <= b; ++i) out = out * (a - b + i) / i;
    return out;
}

}  // namespace detail

/// The blowup P(t): vertex i becomes t_i copies; an r-multiset of copies is an
/// edge iff its projection back to source vertices is an edge of P.
inline BlowupResult blowup(const Pattern& p, const BlowupVector& t) {
    return detail::blowup_impl(p, t, /*simple=*/false);
}

/// The simple blowup P[t]: the blowup with every edge that repeats a vertex
/// removed. Always a genuine r-graph.
inline BlowupResult simple_blowup(const Pattern& p, const BlowupVector& t) {
    return detail::blowup_impl(p, t, /*simple=*/true);
}

/// |E(P[t])| = sum over edges e of prod over vertices i of C(t_i, m_e(i)),
/// without constructing the blowup.
inline long long simple_blowup_edge_count(const Pattern& p, const BlowupVector& t) {
    detail::check_blowup_vector(p, t);
    long long total = 0;
    for (const Edge& e : p.edges) {
        long long prod = 1;
        for (auto [v, m] : edge_support(e)) prod *= detail::binomial_ll(t[v - 1], m);
        total += prod;
    }
    return total;
}

// ---------------------------------------------------------------------------
// Blowup polynomial p_P(x) = sum_e prod_i x_i^{m_e(i)} / m_e(i)!
//
// Homogeneous of degree r with nonnegative coefficients; for repeat-free
// patterns it reduces to sum_e prod_{i in e} x_i. Works over any commutative
// ring-with-division scalar (double, Rational, QuadExt).
// ---------------------------------------------------------------------------

namespace detail {

template <typename T>
T scalar_pow(const T& x, int e) {
    T out(1);
    for (int i = 0; i < e; ++i) out = out * x;
    return out;
}

inline long factorial_long(int m) {
    long out = 1;
    for (int i = 2; i <= m; ++i) out *= i;
    return out;
}

template <typename T>
void check_dim(const Pattern& p, std::span<const T> x) {
    if (static_cast<int>(x.size()) != p.n)
        throw std::invalid_argument("weighting length != pattern vertex count");
}

}  // namespace detail

template <typename T>
T eval_poly(const Pattern& p, std::span<const T> x) {
    detail::check_dim(p, x);
    T total(0);
    for (const Edge& e : p.edges) {
        T term(1);
        long denom = 1;
        for (auto [v, m] : edge_support(e)) {
            term = term * detail::scalar_pow(x[v - 1], m);
            denom *= detail::factorial_long(m);
        }
        total = total + term / T(denom);
    }
    return total;
}

template <typename T>
std::vector<T> grad_poly(const Pattern& p, std::span<const T> x) {
    detail::check_dim(p, x);
    std::vector<T> g(p.n, T(0));
    for (const Edge& e : p.edges) {
        const auto support = edge_support(e);
        long denom = 1;
        for (auto [v, m] : support) denom *= detail::factorial_long(m);
        for (auto [v, m] : support) {
            // d/dx_v of the edge term: m * x_v^{m-1} * prod_{u != v} x_u^{m_u}, / prod m!
            T part(static_cast<long>(m));
            part = part * detail::scalar_pow(x[v - 1], m - 1);
            for (auto [u, mu] : support)
                if (u != v) part = part * detail::scalar_pow(x[u - 1], mu);
            g[v - 1] = g[v - 1] + part / T(denom);
        }
    }
    return g;
}

/// Dense Hessian of the blowup polynomial, row-major n x n.
inline std::vector<double> hess_poly(const Pattern& p, std::span<const double> x) {
    detail::check_dim(p, x);
    std::vector<double> h(static_cast<std::size_t>(p.n) * p.n, 0.0);
    for (const Edge& e : p.edges) {
        const auto support = edge_support(e);
        double coef = 1.0;
        for (auto [v, m] : support) coef /= detail::factorial_long(m);
        for (std::size_t a = 0; a < support.size(); ++a) {
            auto [va, ma] = support[a];
            // diagonal: m(m-1) x^{m-2} * rest
            if (ma >= 2) {
                double part = coef * ma * (ma - 1) * detail::scalar_pow(x[va - 1], ma - 2);
                for (std::size_t c = 0; c < support.size(); ++c)
                    if (c != a) part *= detail::scalar_pow(x[support[c].first - 1], support[c].second);
                h[(va - 1) * p.n + (va - 1)] += part;
            }
            for (std::size_t b = a + 1; b < support.size(); ++b) {
                auto [vb, mb] = support[b];
                double part = coef * ma * mb * detail::scalar_pow(x[va - 1], ma - 1) *
                              detail::scalar_pow(x[vb - 1], mb - 1);
                for (std::size_t c = 0; c < support.size(); ++c)
                    if (c != a && c != b)
                        part *= detail::scalar_pow(x[support[c].first - 1], support[c].second);
                h[(va - 1) * p.n + (vb - 1)] += part;
                h[(vb - 1) * p.n + (va - 1)] += part;
            }
        }
    }
    return h;
}

/// Edge density e(G)/C(n,r) of a repeat-free pattern. Throws for true
/// patterns, where the notion is undefined.
inline double density(const Pattern& p) {
    if (!p.is_graph())
        throw std::invalid_argument("density: pattern has a multiset edge");
    const long long total = detail::binomial_ll(p.n, p.r);
    if (total == 0) return 0.0;
    return static_cast<double>(p.edge_count()) / static_cast<double>(total);
}

}  // namespace patlag
