#pragma once

// Maximization of the blowup polynomial over the standard simplex.
//
// Strategy per solve: multistart projected gradient ascent (uniform simplex
// samples plus all vertices and the barycenter), each run finished by a
// damped Newton solve of the active-support stationarity system
//   d/dx_i p = mu  (i in support),  sum x_i = 1.
// Faces obtained by zeroing coordinates are explored separately because
// optima routinely sit on them. Everything is deterministic for a fixed
// seed: the start list is fixed, runs are independent, and results combine
// through a total order (value, then lexicographic witness).
//
// Global optimality is NOT certified; `restarts_agreeing` reports how many
// starts reached the returned value. Exact mode reconstructs the witness as
// small rationals and verifies first-order criticality in exact arithmetic,
// which certifies the value as an exact lower bound.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "patlag/pattern.hpp"
#include "patlag/rational.hpp"
#include "patlag/symmetry.hpp"

namespace patlag {

struct OptConfig {
    int restarts = 200;
    int max_iters = 5000;
    double kkt_tol = 1e-10;
    double value_tol = 1e-9;
    std::uint64_t seed = 0;
    std::uint64_t rational_max_denominator = 1000000;
    bool exact_mode = false;
    double support_threshold = 1e-7;

    void validate() const {
        if (restarts < 1) throw std::invalid_argument("OptConfig: restarts must be >= 1");
        if (max_iters < 1) throw std::invalid_argument("OptConfig: max_iters must be >= 1");
        if (kkt_tol <= 0 || value_tol <= 0 || support_threshold <= 0)
            throw std::invalid_argument("OptConfig: tolerances must be > 0");
    }
};

struct ExactCertificate {
    Rational value;
    std::vector<Rational> weights;
    bool exact_kkt_verified = false;
};

struct LagrangianRecord {
    double value = 0.0;
    std::vector<double> witness;
    std::vector<int> support;  // 1-based vertices with weight > support_threshold
    double kkt_residual = 0.0;
    std::optional<ExactCertificate> certified;
    int restarts_agreeing = 0;
    bool converged = true;
    double reduction_gap = 0.0;  // |full-simplex max - symmetry-reduced max|
};

struct BlowupDensityRecord {
    LagrangianRecord lagrangian;
    double density = 0.0;  // r! * lambda
};

namespace detail {

struct SplitMix64 {
    std::uint64_t state;
    explicit SplitMix64(std::uint64_t seed) : state(seed) {}
    std::uint64_t next() {
        state += 0x9E3779B97F4A7C15ull;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    SplitMix64 s(seed ^ (0xA0761D6478BD642Full * (stream + 1)));
    s.next();
    return s.next();
}

/// Euclidean projection onto {x >= 0, sum x = 1} (sort-based).
inline void project_to_simplex(std::vector<double>& v) {
    const int n = static_cast<int>(v.size());
    std::vector<double> u = v;
    std::sort(u.begin(), u.end(), std::greater<>());
    double cumulative = 0.0, theta = 0.0;
    for (int j = 0; j < n; ++j) {
        cumulative += u[j];
        const double candidate = (1.0 - cumulative) / (j + 1);
        if (u[j] + candidate > 0) theta = candidate;
    }
    for (double& xi : v) xi = std::max(xi + theta, 0.0);
}

inline std::vector<double> dirichlet_uniform(SplitMix64& rng, int dim) {
    std::vector<double> x(dim);
    double sum = 0.0;
    for (double& xi : x) {
        xi = -std::log(std::max(1.0 - rng.uniform01(), 1e-300));
        sum += xi;
    }
    if (sum <= 0.0) return std::vector<double>(dim, 1.0 / dim);
    for (double& xi : x) xi /= sum;
    return x;
}

/// Gaussian elimination with partial pivoting; solves A d = b in place.
inline bool solve_linear(std::vector<double>& a, std::vector<double>& b, int m) {
    for (int col = 0; col < m; ++col) {
        int pivot = col;
        for (int row = col + 1; row < m; ++row)
            if (std::fabs(a[row * m + col]) > std::fabs(a[pivot * m + col])) pivot = row;
        if (std::fabs(a[pivot * m + col]) < 1e-30) return false;
        if (pivot != col) {
            for (int k = col; k < m; ++k) std::swap(a[pivot * m + k], a[col * m + k]);
            std::swap(b[pivot], b[col]);
        }
        const double inv = 1.0 / a[col * m + col];
        for (int row = col + 1; row < m; ++row) {
            const double factor = a[row * m + col] * inv;
            if (factor == 0.0) continue;
            for (int k = col; k < m; ++k) a[row * m + k] -= factor * a[col * m + k];
            b[row] -= factor * b[col];
        }
    }
    for (int row = m - 1; row >= 0; --row) {
        double acc = b[row];
        for (int k = row + 1; k < m; ++k) acc -= a[row * m + k] * b[k];
        b[row] = acc / a[row * m + row];
    }
    return true;
}

}  // namespace detail

/// Flattened evaluator for a pattern's blowup polynomial (double scalar).
class PatternObjective {
  public:
    explicit PatternObjective(const Pattern& p) : n_(p.n) {
        for (const Edge& e : p.edges) {
            Term t;
            t.coef = 1.0;
            for (auto [v, m] : edge_support(e)) {
                t.coef /= detail::factorial_long(m);
                t.vars.emplace_back(v - 1, m);
            }
            terms_.push_back(std::move(t));
        }
    }

    int dim() const { return n_; }

    double value(std::span<const double> x) const {
        double total = 0.0;
        for (const Term& t : terms_) {
            double prod = t.coef;
            for (auto [i, m] : t.vars) prod *= detail::scalar_pow(x[i], m);
            total += prod;
        }
        return total;
    }

    std::vector<double> gradient(std::span<const double> x) const {
        std::vector<double> g(n_, 0.0);
        for (const Term& t : terms_)
            for (std::size_t a = 0; a < t.vars.size(); ++a) {
                auto [i, m] = t.vars[a];
                double part = t.coef * m * detail::scalar_pow(x[i], m - 1);
                for (std::size_t b = 0; b < t.vars.size(); ++b)
                    if (b != a) part *= detail::scalar_pow(x[t.vars[b].first], t.vars[b].second);
                g[i] += part;
            }
        return g;
    }

    std::vector<double> hessian(std::span<const double> x) const {
        std::vector<double> h(static_cast<std::size_t>(n_) * n_, 0.0);
        for (const Term& t : terms_)
            for (std::size_t a = 0; a < t.vars.size(); ++a) {
                auto [ia, ma] = t.vars[a];
                if (ma >= 2) {
                    double part = t.coef * ma * (ma - 1) * detail::scalar_pow(x[ia], ma - 2);
                    for (std::size_t c = 0; c < t.vars.size(); ++c)
                        if (c != a) part *= detail::scalar_pow(x[t.vars[c].first], t.vars[c].second);
                    h[ia * n_ + ia] += part;
                }
                for (std::size_t b = a + 1; b < t.vars.size(); ++b) {
                    auto [ib, mb] = t.vars[b];
                    double part = t.coef * ma * mb * detail::scalar_pow(x[ia], ma - 1) *
                                  detail::scalar_pow(x[ib], mb - 1);
                    for (std::size_t c = 0; c < t.vars.size(); ++c)
                        if (c != a && c != b)
                            part *= detail::scalar_pow(x[t.vars[c].first], t.vars[c].second);
                    h[ia * n_ + ib] += part;
                    h[ib * n_ + ia] += part;
                }
            }
        return h;
    }

  private:
    struct Term {
        double coef;
        std::vector<std::pair<int, int>> vars;  // (0-based index, multiplicity)
    };
    int n_;
    std::vector<Term> terms_;
};

namespace detail {

/// Symmetry-reduced objective with a chosen number of kept members per
/// class: class j contributes counts[j] vertices (its first ones, by
/// symmetry it does not matter which), each carrying y_j / counts[j]. For
/// 3-patterns some optimum gives equivalent vertices equal or zero weight,
/// so enumerating kept-counts (maximize_reduced) reaches the true maximum.
class CountedReducedObjective {
  public:
    CountedReducedObjective(const PatternObjective& obj, const EquivalencePartition& part,
                            std::vector<int> counts)
        : obj_(&obj), part_(&part), counts_(std::move(counts)) {
        for (std::size_t j = 0; j < counts_.size(); ++j)
            if (counts_[j] > 0) active_.push_back(static_cast<int>(j));
    }

    int dim() const { return static_cast<int>(active_.size()); }

    std::vector<double> lift(std::span<const double> y) const {
        std::vector<double> x(obj_->dim(), 0.0);
        for (std::size_t a = 0; a < active_.size(); ++a) {
            const int j = active_[a];
            const int kept = counts_[j];
            const double share = y[a] / kept;
            for (int m = 0; m < kept; ++m) x[part_->classes[j][m] - 1] = share;
        }
        return x;
    }

    double value(std::span<const double> y) const { return obj_->value(lift(y)); }

    std::vector<double> gradient(std::span<const double> y) const {
        const auto g = obj_->gradient(lift(y));
        std::vector<double> out(active_.size(), 0.0);
        for (std::size_t a = 0; a < active_.size(); ++a) {
            const int j = active_[a];
            for (int m = 0; m < counts_[j]; ++m)
                out[a] += g[part_->classes[j][m] - 1];
            out[a] /= counts_[j];
        }
        return out;
    }

    std::vector<double> hessian(std::span<const double> y) const {
        const auto h = obj_->hessian(lift(y));
        const int k = dim();
        const int n = obj_->dim();
        std::vector<double> out(static_cast<std::size_t>(k) * k, 0.0);
        for (int a = 0; a < k; ++a)
            for (int b = 0; b < k; ++b) {
                const int ja = active_[a], jb = active_[b];
                double sum = 0.0;
                for (int ma = 0; ma < counts_[ja]; ++ma)
                    for (int mb = 0; mb < counts_[jb]; ++mb)
                        sum += h[(part_->classes[ja][ma] - 1) * n +
                                 (part_->classes[jb][mb] - 1)];
                out[a * k + b] =
                    sum / (static_cast<double>(counts_[ja]) * counts_[jb]);
            }
        return out;
    }

  private:
    const PatternObjective* obj_;
    const EquivalencePartition* part_;
    std::vector<int> counts_;
    std::vector<int> active_;
};

/// Restriction of an objective to a coordinate face (the kept indices).
template <class Obj>
class FaceObjective {
  public:
    FaceObjective(const Obj& base, std::vector<int> keep, int full_dim)
        : base_(&base), keep_(std::move(keep)), full_dim_(full_dim) {}

    int dim() const { return static_cast<int>(keep_.size()); }

    std::vector<double> embed(std::span<const double> y) const {
        std::vector<double> x(full_dim_, 0.0);
        for (std::size_t j = 0; j < keep_.size(); ++j) x[keep_[j]] = y[j];
        return x;
    }

    double value(std::span<const double> y) const { return base_->value(embed(y)); }

    std::vector<double> gradient(std::span<const double> y) const {
        const auto g = base_->gradient(embed(y));
        std::vector<double> out(keep_.size());
        for (std::size_t j = 0; j < keep_.size(); ++j) out[j] = g[keep_[j]];
        return out;
    }

    std::vector<double> hessian(std::span<const double> y) const {
        const auto h = base_->hessian(embed(y));
        const int k = dim();
        std::vector<double> out(static_cast<std::size_t>(k) * k);
        for (int a = 0; a < k; ++a)
            for (int b = 0; b < k; ++b) out[a * k + b] = h[keep_[a] * full_dim_ + keep_[b]];
        return out;
    }

  private:
    const Obj* base_;
    std::vector<int> keep_;
    int full_dim_;
};

struct StartOutcome {
    std::vector<double> x;
    double value = 0.0;
    bool converged = true;
};

template <class Obj>
double objective_kkt_residual(const Obj& obj, std::span<const double> x, double threshold) {
    const auto g = obj.gradient(x);
    double mu = 0.0, lo = std::numeric_limits<double>::infinity(), hi = -lo;
    int members = 0;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i] > threshold) {
            mu += g[i];
            lo = std::min(lo, g[i]);
            hi = std::max(hi, g[i]);
            ++members;
        }
    if (members == 0) {
        double worst = 0.0;
        for (double gi : g) worst = std::max(worst, gi);
        return std::max(worst, 0.0);
    }
    mu /= members;
    double off = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i] <= threshold) off = std::max(off, g[i] - mu);
    return std::max(hi - lo, std::max(off, 0.0));
}

/// Newton iteration on the stationarity system over a fixed support.
/// Returns the refined full-dimensional point, or nullopt when the system is
/// singular or no damped step reduces the residual.
template <class Obj>
std::optional<std::vector<double>> newton_on_support(const Obj& obj, std::span<const double> x0,
                                                     const std::vector<int>& support) {
    const int s = static_cast<int>(support.size());
    const int n = static_cast<int>(x0.size());
    std::vector<double> y(s);
    double sum = 0.0;
    for (int j = 0; j < s; ++j) {
        y[j] = std::max(x0[support[j]], 0.0);
        sum += y[j];
    }
    if (sum <= 0.0) return std::nullopt;
    for (double& yj : y) yj /= sum;

    auto embed = [&](const std::vector<double>& yv) {
        std::vector<double> x(n, 0.0);
        for (int j = 0; j < s; ++j) x[support[j]] = yv[j];
        return x;
    };
    auto residual = [&](const std::vector<double>& yv, double mu, std::vector<double>& f) {
        const auto g = obj.gradient(embed(yv));
        double linf = 0.0, total = -1.0;
        for (int j = 0; j < s; ++j) {
            f[j] = g[support[j]] - mu;
            linf = std::max(linf, std::fabs(f[j]));
            total += yv[j];
        }
        f[s] = total;
        return std::max(linf, std::fabs(total));
    };

    double mu = 0.0;
    {
        const auto g = obj.gradient(embed(y));
        for (int j = 0; j < s; ++j) mu += g[support[j]];
        mu /= s;
    }
    std::vector<double> f(s + 1), f_next(s + 1);
    double res = residual(y, mu, f);
    bool improved = false;
    for (int it = 0; it < 60 && res > 1e-15; ++it) {
        const auto h = obj.hessian(embed(y));
        const int m = s + 1;
        std::vector<double> a(static_cast<std::size_t>(m) * m, 0.0), rhs(m);
        for (int p = 0; p < s; ++p) {
            for (int q = 0; q < s; ++q) a[p * m + q] = h[support[p] * n + support[q]];
            a[p * m + s] = -1.0;
            a[s * m + p] = 1.0;
        }
        for (int p = 0; p < m; ++p) rhs[p] = -f[p];
        if (!solve_linear(a, rhs, m)) break;

        double step = 1.0;
        bool accepted = false;
        for (int bt = 0; bt < 40; ++bt, step *= 0.5) {
            std::vector<double> y_next = y;
            bool feasible = true;
            for (int j = 0; j < s; ++j) {
                y_next[j] += step * rhs[j];
                if (y_next[j] < -1e-9) feasible = false;
            }
            if (!feasible) continue;
            const double mu_next = mu + step * rhs[s];
            const double res_next = residual(y_next, mu_next, f_next);
            if (res_next < res) {
                y = std::move(y_next);
                mu = mu_next;
                res = res_next;
                f = f_next;
                accepted = true;
                improved = true;
                break;
            }
        }
        if (!accepted) break;
    }
    if (!improved && res > 1e-12) return std::nullopt;

    sum = 0.0;
    for (double& yj : y) {
        yj = std::max(yj, 0.0);
        sum += yj;
    }
    if (sum <= 0.0) return std::nullopt;
    for (double& yj : y) yj /= sum;
    return embed(y);
}

/// Projected gradient ascent with backtracking, then Newton polish on the
/// active support (retried on shrinking supports while members hit zero).
template <class Obj>
StartOutcome ascend(const Obj& obj, std::vector<double> x, const OptConfig& cfg) {
    project_to_simplex(x);
    double fx = obj.value(x);
    bool converged = false;
    const int n = static_cast<int>(x.size());

    std::vector<double> z(n);
    int stalled = 0;
    for (int iter = 0; iter < cfg.max_iters; ++iter) {
        const auto g = obj.gradient(x);
        double alpha = 1.0;
        bool moved = false;
        double fz = fx, step_norm = 0.0;
        for (int bt = 0; bt < 60; ++bt, alpha *= 0.5) {
            for (int i = 0; i < n; ++i) z[i] = x[i] + alpha * g[i];
            project_to_simplex(z);
            double ascent = 0.0;
            step_norm = 0.0;
            for (int i = 0; i < n; ++i) {
                const double d = z[i] - x[i];
                ascent += g[i] * d;
                step_norm += std::fabs(d);
            }
            if (step_norm == 0.0) break;  // projection fixed point
            fz = obj.value(z);
            if (fz >= fx + 1e-4 * ascent) {
                moved = true;
                break;
            }
        }
        if (!moved) {
            converged = true;
            break;
        }
        stalled = (fz - fx <= 1e-13 * (1.0 + std::fabs(fx))) ? stalled + 1 : 0;
        x.swap(z);
        fx = fz;
        if (step_norm <= 1e-14) {
            converged = true;
            break;
        }
        // Progress below working precision for a stretch: a degenerate
        // direction is creeping. Stop and let the Newton polish decide.
        if (stalled >= 10) break;
    }

    // Newton polish. The plain active support can carry creeping
    // coordinates that belong at zero, so coarser support guesses are tried
    // too; a candidate is kept only when it does not lose value.
    double best_res = objective_kkt_residual(obj, x, cfg.support_threshold);
    const double ladder[] = {cfg.support_threshold, 1e-4, 1e-2};
    for (double threshold : ladder) {
        std::vector<int> support;
        for (int i = 0; i < n; ++i)
            if (x[i] > threshold) support.push_back(i);
        for (int attempt = 0; attempt < n && !support.empty(); ++attempt) {
            auto polished = newton_on_support(obj, x, support);
            if (!polished) break;
            const double fp = obj.value(*polished);
            if (fp < fx - 1e-12) break;
            const double rp = objective_kkt_residual(obj, *polished, cfg.support_threshold);
            std::vector<int> kept;
            for (int i : support)
                if ((*polished)[i] > cfg.support_threshold) kept.push_back(i);
            if (fp > fx + 1e-15 || rp < best_res) {
                x = std::move(*polished);
                fx = obj.value(x);
                best_res = rp;
            }
            if (kept.size() == support.size() || kept.empty()) break;
            support = std::move(kept);  // a member died; re-solve on the smaller face
        }
    }
    if (best_res <= std::max(cfg.kkt_tol, 1e-12)) converged = true;
    return {std::move(x), fx, converged};
}

inline bool outcome_better(const StartOutcome& a, const StartOutcome& b) {
    if (a.value != b.value) return a.value > b.value;
    return a.x < b.x;  // deterministic tie-break: lexicographically smallest witness
}

}  // namespace detail

namespace detail {

template <class Obj>
LagrangianRecord maximize_impl(const Obj& obj, int dim, const OptConfig& cfg,
                               bool explore_faces) {
    cfg.validate();
    if (dim < 1) throw std::invalid_argument("maximize_on_simplex: dim must be >= 1");
    if (obj.dim() != dim) throw std::invalid_argument("maximize_on_simplex: dimension mismatch");

    std::vector<detail::StartOutcome> outcomes;
    outcomes.reserve(static_cast<std::size_t>(cfg.restarts) + dim + 1);

    outcomes.push_back(detail::ascend(obj, std::vector<double>(dim, 1.0 / dim), cfg));
    for (int i = 0; i < dim; ++i) {
        std::vector<double> vertex(dim, 0.0);
        vertex[i] = 1.0;
        outcomes.push_back(detail::ascend(obj, std::move(vertex), cfg));
    }
    for (int k = 0; k < cfg.restarts; ++k) {
        detail::SplitMix64 rng(detail::mix_seed(cfg.seed, static_cast<std::uint64_t>(k)));
        outcomes.push_back(detail::ascend(obj, detail::dirichlet_uniform(rng, dim), cfg));
    }

    if (explore_faces && dim >= 3) {
        // Faces with >= 2 coordinates (vertex starts already cover singletons).
        std::vector<std::vector<int>> faces;
        if (dim <= 6) {
            for (std::uint32_t mask = 1; mask + 1 < (1u << dim); ++mask) {
                if (std::popcount(mask) < 2) continue;
                std::vector<int> keep;
                for (int i = 0; i < dim; ++i)
                    if (mask & (1u << i)) keep.push_back(i);
                faces.push_back(std::move(keep));
            }
        } else {
            std::vector<int> all(dim);
            std::iota(all.begin(), all.end(), 0);
            for (int drop = 0; drop < dim; ++drop) {
                std::vector<int> keep = all;
                keep.erase(keep.begin() + drop);
                faces.push_back(keep);
                for (int drop2 = drop + 1; drop2 < dim; ++drop2) {
                    std::vector<int> keep2 = keep;
                    keep2.erase(keep2.begin() + (drop2 - 1));
                    faces.push_back(std::move(keep2));
                }
            }
        }
        const int face_restarts = std::max(2, cfg.restarts / 25);
        std::uint64_t face_stream = 1u << 20;
        for (const auto& keep : faces) {
            detail::FaceObjective<Obj> face(obj, keep, dim);
            const int fdim = face.dim();
            auto lift_outcome = [&](detail::StartOutcome o) {
                detail::StartOutcome full_o;
                full_o.x = face.embed(o.x);
                full_o.value = o.value;
                full_o.converged = o.converged;
                outcomes.push_back(std::move(full_o));
            };
            lift_outcome(detail::ascend(face, std::vector<double>(fdim, 1.0 / fdim), cfg));
            for (int k = 0; k < face_restarts; ++k) {
                detail::SplitMix64 rng(detail::mix_seed(cfg.seed, face_stream + k));
                lift_outcome(detail::ascend(face, detail::dirichlet_uniform(rng, fdim), cfg));
            }
            face_stream += 1u << 20;
        }
    }

    const detail::StartOutcome* best = &outcomes.front();
    for (const auto& o : outcomes)
        if (detail::outcome_better(o, *best)) best = &o;

    LagrangianRecord rec;
    rec.value = best->value;
    rec.witness = best->x;
    rec.converged = best->converged;
    for (int i = 0; i < dim; ++i)
        if (rec.witness[i] > cfg.support_threshold) rec.support.push_back(i + 1);
    rec.kkt_residual = detail::objective_kkt_residual(obj, rec.witness, cfg.support_threshold);
    for (const auto& o : outcomes)
        if (o.value >= best->value - cfg.value_tol) ++rec.restarts_agreeing;
    return rec;
}

}  // namespace detail

/// Best first-order point found over cfg.restarts uniform starts plus all
/// coordinate vertices, the barycenter, and every coordinate face (all of
/// them for dim <= 6, those missing one or two coordinates otherwise).
template <class Obj>
LagrangianRecord maximize_on_simplex(const Obj& obj, int dim, const OptConfig& cfg) {
    return detail::maximize_impl(obj, dim, cfg, /*explore_faces=*/true);
}

/// First-order optimality measure at x: the spread of partial derivatives
/// over the support combined with how far any off-support partial exceeds
/// their mean. Zero exactly at simplex-constrained critical points.
inline double kkt_residual(const Pattern& p, std::span<const double> x,
                           double support_threshold = 1e-7) {
    detail::check_dim(p, x);
    PatternObjective obj(p);
    return detail::objective_kkt_residual(obj, x, support_threshold);
}

/// Reconstructs the witness as small rationals (continued fractions), fixes
/// the simplex sum exactly, and verifies first-order criticality in exact
/// arithmetic. The certified value is an exact lower bound for lambda(P);
/// global maximality remains numerical evidence.
inline std::optional<ExactCertificate> rational_certify(const Pattern& p,
                                                        std::span<const double> x,
                                                        const OptConfig& cfg) {
    detail::check_dim(p, x);
    std::vector<Rational> q(p.n, Rational(0));
    for (int i = 0; i < p.n; ++i) {
        if (x[i] <= cfg.support_threshold) continue;
        auto r = rational_reconstruct(x[i], cfg.rational_max_denominator,
                                      1e-12 * std::max(1.0, std::fabs(x[i])));
        if (!r || *r <= 0) return std::nullopt;
        q[i] = *r;
    }
    Rational total(0);
    for (const Rational& qi : q) total += qi;
    if (total <= 0) return std::nullopt;
    for (Rational& qi : q) qi /= total;

    const auto g = grad_poly<Rational>(p, std::span<const Rational>(q));
    std::optional<Rational> common;
    for (int i = 0; i < p.n; ++i) {
        if (q[i] == 0) continue;
        if (!common)
            common = g[i];
        else if (g[i] != *common)
            return std::nullopt;
    }
    if (!common) return std::nullopt;
    for (int i = 0; i < p.n; ++i)
        if (q[i] == 0 && g[i] > *common) return std::nullopt;

    ExactCertificate cert;
    cert.weights = q;
    cert.value = eval_poly<Rational>(p, std::span<const Rational>(q));
    cert.exact_kkt_verified = true;
    return cert;
}

/// Maximum over all weightings that are uniform-or-zero on each equivalence
/// class: every per-class kept-count configuration is solved separately and
/// the best lifted witness wins. For 3-patterns this attains lambda(P).
inline LagrangianRecord maximize_reduced(const Pattern& p, const EquivalencePartition& part,
                                         const OptConfig& cfg) {
    cfg.validate();
    const PatternObjective obj(p);
    const int k = part.size();

    std::vector<std::vector<int>> configurations;
    {
        long long total = 1;
        for (const auto& cls : part.classes) total *= static_cast<long long>(cls.size()) + 1;
        if (total <= 512) {
            std::vector<int> counts(k, 0);
            while (true) {
                if (std::any_of(counts.begin(), counts.end(), [](int c) { return c > 0; }))
                    configurations.push_back(counts);
                int pos = 0;
                while (pos < k && ++counts[pos] > static_cast<int>(part.classes[pos].size()))
                    counts[pos++] = 0;
                if (pos == k) break;
            }
        } else {
            // too many sub-support shapes; fall back to the plain uniform split
            std::vector<int> counts(k);
            for (int j = 0; j < k; ++j) counts[j] = static_cast<int>(part.classes[j].size());
            configurations.push_back(std::move(counts));
        }
    }

    // Count configurations already enumerate the class-level faces, so the
    // per-configuration solves skip face exploration and run lighter.
    OptConfig config_cfg = cfg;
    config_cfg.restarts = std::max(16, cfg.restarts / 8);

    std::optional<LagrangianRecord> best;
    std::vector<double> config_values;
    std::vector<int> config_agreeing;
    for (const auto& counts : configurations) {
        const detail::CountedReducedObjective cro(obj, part, counts);
        LagrangianRecord rec =
            detail::maximize_impl(cro, cro.dim(), config_cfg, /*explore_faces=*/false);
        rec.witness = cro.lift(rec.witness);
        config_values.push_back(rec.value);
        config_agreeing.push_back(rec.restarts_agreeing);
        if (!best || rec.value > best->value ||
            (rec.value == best->value && rec.witness < best->witness))
            best = std::move(rec);
    }
    best->restarts_agreeing = 0;
    for (std::size_t i = 0; i < config_values.size(); ++i)
        if (config_values[i] >= best->value - cfg.value_tol)
            best->restarts_agreeing += config_agreeing[i];
    return *best;
}

/// lambda(P) = max of the blowup polynomial over the simplex. Solves both the
/// full problem and the symmetry-reduced one; for 3-patterns the two agree,
/// and the better witness is returned.
inline LagrangianRecord lagrangian(const Pattern& p, const OptConfig& cfg = {}) {
    cfg.validate();
    const PatternObjective obj(p);
    LagrangianRecord full = maximize_on_simplex(obj, p.n, cfg);

    LagrangianRecord rec = full;
    const EquivalencePartition part = equivalence_classes(p);
    if (part.size() < p.n) {
        LagrangianRecord reduced = maximize_reduced(p, part, cfg);
        const double gap = std::fabs(full.value - reduced.value);
        // Whenever the two maxima agree, the class-shaped witness is
        // reported: on optimum ridges the full solve lands on an arbitrary
        // noise-selected point while the lifted witness is the
        // reconstructible one.
        const bool reduced_wins = reduced.value >= full.value - cfg.value_tol;
        rec = reduced_wins ? reduced : full;
        rec.reduction_gap = gap;
        rec.restarts_agreeing = (gap <= cfg.value_tol)
                                    ? full.restarts_agreeing + reduced.restarts_agreeing
                                    : (reduced_wins ? reduced.restarts_agreeing
                                                    : full.restarts_agreeing);
    }

    rec.value = eval_poly<double>(p, std::span<const double>(rec.witness));
    rec.support.clear();
    for (int i = 0; i < p.n; ++i)
        if (rec.witness[i] > cfg.support_threshold) rec.support.push_back(i + 1);
    rec.kkt_residual = kkt_residual(p, rec.witness, cfg.support_threshold);

    if (cfg.exact_mode) {
        auto cert = rational_certify(p, rec.witness, cfg);
        if (cert && std::fabs(to_double(cert->value) - rec.value) <= cfg.value_tol)
            rec.certified = std::move(cert);
    }
    return rec;
}

/// b(P) = r! * lambda(P), the limiting edge density of optimal simple blowups.
inline BlowupDensityRecord blowup_density(const Pattern& p, const OptConfig& cfg = {}) {
    BlowupDensityRecord out;
    out.lagrangian = lagrangian(p, cfg);
    out.density = static_cast<double>(detail::factorial_long(p.r)) * out.lagrangian.value;
    return out;
}

}  // namespace patlag
