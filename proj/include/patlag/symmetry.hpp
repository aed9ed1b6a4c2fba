#pragma once

// Equivalent-vertex detection and the symmetry-reduced objective. Two
// vertices are equivalent when transposing them maps the edge multiset onto
// itself; the relation is closed transitively. At an optimum, members of one
// class can be given equal weight (or dropped to a face, which the optimizer
// explores separately), so the simplex optimization can run over one variable
// per class.

#include <algorithm>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "patlag/pattern.hpp"

namespace patlag {

struct EquivalencePartition {
    /// Disjoint, sorted vertex classes covering 1..n, ordered by least member.
    std::vector<std::vector<int>> classes;

    int class_of(int vertex) const {
        for (std::size_t j = 0; j < classes.size(); ++j)
            if (std::binary_search(classes[j].begin(), classes[j].end(), vertex))
                return static_cast<int>(j);
        throw std::invalid_argument("partition: vertex not covered");
    }

    int size() const { return static_cast<int>(classes.size()); }
};

/// True when swapping vertices i and j maps the edge multiset onto itself.
inline bool transposition_fixes(const Pattern& p, int i, int j) {
    std::vector<int> perm(p.n);
    std::iota(perm.begin(), perm.end(), 1);
    std::swap(perm[i - 1], perm[j - 1]);
    return apply_permutation(p, perm).edges == p.edges;
}

inline EquivalencePartition equivalence_classes(const Pattern& p) {
    std::vector<int> parent(p.n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int a) {
        while (parent[a] != a) a = parent[a] = parent[parent[a]];
        return a;
    };
    for (int i = 1; i <= p.n; ++i)
        for (int j = i + 1; j <= p.n; ++j)
            if (transposition_fixes(p, i, j)) parent[find(j - 1)] = find(i - 1);

    std::vector<std::vector<int>> classes(p.n);
    for (int v = 1; v <= p.n; ++v) classes[find(v - 1)].push_back(v);
    EquivalencePartition out;
    for (auto& c : classes)
        if (!c.empty()) out.classes.push_back(std::move(c));
    std::sort(out.classes.begin(), out.classes.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
    return out;
}

inline void validate_partition(const Pattern& p, const EquivalencePartition& part) {
    std::vector<int> seen(p.n, 0);
    for (const auto& cls : part.classes) {
        if (cls.empty()) throw std::invalid_argument("partition: empty class");
        for (int v : cls) {
            if (v < 1 || v > p.n) throw std::invalid_argument("partition: vertex out of range");
            if (seen[v - 1]++) throw std::invalid_argument("partition: vertex repeated");
        }
        for (std::size_t a = 0; a < cls.size(); ++a)
            for (std::size_t b = a + 1; b < cls.size(); ++b)
                if (!transposition_fixes(p, cls[a], cls[b]))
                    throw std::invalid_argument("partition: class members not exchangeable");
    }
    for (int v = 0; v < p.n; ++v)
        if (!seen[v]) throw std::invalid_argument("partition: vertex not covered");
}

/// Expands class weights y to a full weighting: x_i = y_j / |class j|.
template <typename T>
std::vector<T> lift_weights(const EquivalencePartition& part, int n, std::span<const T> y) {
    if (y.size() != part.classes.size())
        throw std::invalid_argument("lift_weights: class weight length mismatch");
    std::vector<T> x(n, T(0));
    for (std::size_t j = 0; j < part.classes.size(); ++j) {
        const T share = y[j] / T(static_cast<long>(part.classes[j].size()));
        for (int v : part.classes[j]) x[v - 1] = share;
    }
    return x;
}

/// The blowup polynomial pushed down to one variable per equivalence class,
/// with class weight split uniformly among members. Evaluation agrees exactly
/// with eval_poly at the lifted weighting (in any scalar).
class ReducedObjective {
  public:
    ReducedObjective(Pattern base, EquivalencePartition part)
        : base_(std::move(base)), part_(std::move(part)) {
        validate_partition(base_, part_);
    }

    const Pattern& base() const { return base_; }
    const EquivalencePartition& partition() const { return part_; }
    int dim() const { return part_.size(); }

    template <typename T>
    T value_in(std::span<const T> y) const {
        const auto x = lift_weights<T>(part_, base_.n, y);
        return eval_poly<T>(base_, x);
    }

    double value(std::span<const double> y) const { return value_in<double>(y); }

    std::vector<double> gradient(std::span<const double> y) const {
        const auto x = lift_weights<double>(part_, base_.n, y);
        const auto g = grad_poly<double>(base_, x);
        std::vector<double> out(part_.size(), 0.0);
        for (std::size_t j = 0; j < part_.classes.size(); ++j) {
            const double inv = 1.0 / static_cast<double>(part_.classes[j].size());
            for (int v : part_.classes[j]) out[j] += g[v - 1] * inv;
        }
        return out;
    }

    std::vector<double> hessian(std::span<const double> y) const {
        const auto x = lift_weights<double>(part_, base_.n, y);
        const auto h = hess_poly(base_, x);
        const int k = dim();
        std::vector<double> out(static_cast<std::size_t>(k) * k, 0.0);
        for (int aj = 0; aj < k; ++aj)
            for (int bj = 0; bj < k; ++bj) {
                const double inv = 1.0 / (static_cast<double>(part_.classes[aj].size()) *
                                          static_cast<double>(part_.classes[bj].size()));
                double sum = 0.0;
                for (int va : part_.classes[aj])
                    for (int vb : part_.classes[bj]) sum += h[(va - 1) * base_.n + (vb - 1)];
                out[aj * k + bj] = sum * inv;
            }
        return out;
    }

    std::vector<double> lift(std::span<const double> y) const {
        return lift_weights<double>(part_, base_.n, y);
    }

  private:
    Pattern base_;
    EquivalencePartition part_;
};

inline ReducedObjective reduce(const Pattern& p, const EquivalencePartition& part) {
    return ReducedObjective(p, part);
}

}  // namespace patlag
