#pragma once

// Enumeration of small 3-patterns that contain the structural pivot core
// ({v,u,u} plus every {v,v,i}), bulk certification, and a deduplicated table
// of the candidate non-jump densities they produce.

#include <algorithm>
#include <atomic>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "patlag/fr.hpp"
#include "patlag/optimizer.hpp"
#include "patlag/pattern.hpp"

namespace patlag {

struct SearchSpec {
    int n = 3;                 // vertex count
    int pivot = 1;             // the distinguished vertex of the core
    int max_extra_edges = 7;   // cap on edges beyond the mandatory core
    std::optional<std::pair<double, double>> density_window;
    OptConfig cfg;

    void validate() const {
        if (n < 2) throw std::invalid_argument("search: need at least 2 vertices");
        if (pivot < 1 || pivot > n) throw std::invalid_argument("search: pivot out of range");
        if (max_extra_edges < 0) throw std::invalid_argument("search: negative edge cap");
        cfg.validate();
    }
};

struct SearchRow {
    Pattern pattern;  // canonical representative (pivot fixed)
    double lambda = 0.0;
    double density = 0.0;
    double gap = 0.0;  // |lambda(FR) - lambda(P)|
    std::string status;
    std::optional<Rational> lambda_exact;
    std::optional<Rational> density_exact;
    int patterns_merged = 1;
    bool conditions_ok = false;
    bool converged = true;
};

struct SearchResult {
    std::vector<SearchRow> rows;  // sorted by density ascending
    int candidates_enumerated = 0;
    int candidates_kept = 0;
};

namespace detail {

inline std::vector<Edge> all_triple_multisets(int n) {
    std::vector<Edge> out;
    for (int a = 1; a <= n; ++a)
        for (int b = a; b <= n; ++b)
            for (int c = b; c <= n; ++c) out.push_back({a, b, c});
    return out;
}

inline std::vector<Edge> pivot_core_edges(int n, int pivot) {
    const int u = pivot == 1 ? 2 : 1;
    std::vector<Edge> core;
    Edge e{pivot, u, u};
    std::sort(e.begin(), e.end());
    core.push_back(std::move(e));
    for (int i = 1; i <= n; ++i) {
        if (i == pivot) continue;
        Edge f{pivot, pivot, i};
        std::sort(f.begin(), f.end());
        core.push_back(std::move(f));
    }
    std::sort(core.begin(), core.end());
    core.erase(std::unique(core.begin(), core.end()), core.end());
    return core;
}

}  // namespace detail

/// Every pattern on spec.n vertices containing the mandatory pivot core,
/// extended by at most max_extra_edges of the remaining 3-multisets, one
/// representative per isomorphism class that fixes the pivot.
inline std::vector<Pattern> enumerate_candidates(const SearchSpec& spec) {
    spec.validate();
    const auto core = detail::pivot_core_edges(spec.n, spec.pivot);
    std::vector<Edge> extras;
    for (const Edge& e : detail::all_triple_multisets(spec.n))
        if (!std::binary_search(core.begin(), core.end(), e)) extras.push_back(e);

    std::set<std::vector<Edge>> seen;
    std::vector<Pattern> result;
    std::vector<int> pick;
    auto emit = [&]() {
        std::vector<Edge> edges = core;
        for (int idx : pick) edges.push_back(extras[idx]);
        Pattern candidate =
            canonical_form_fixing(Pattern(3, spec.n, std::move(edges)), spec.pivot);
        if (seen.insert(candidate.edges).second) result.push_back(std::move(candidate));
    };
    const int cap = std::min<int>(spec.max_extra_edges, static_cast<int>(extras.size()));
    auto rec = [&](auto&& self, int start, int remaining) -> void {
        emit();
        if (remaining == 0) return;
        for (int idx = start; idx < static_cast<int>(extras.size()); ++idx) {
            pick.push_back(idx);
            self(self, idx + 1, remaining - 1);
            pick.pop_back();
        }
    };
    rec(rec, 0, cap);
    return result;
}

/// Certifies every candidate and tabulates the distinct densities. Rows keep
/// only candidates whose hypothesis fully holds (structural core, positive
/// pivot weight, lambda < 1); isomorphic candidates were already merged, and
/// rows whose densities agree within 1e-9 (exactly, for certified rows) are
/// merged keeping the lexicographically smallest pattern.
inline SearchResult run_search(const SearchSpec& spec, int jobs = 1) {
    spec.validate();
    if (jobs < 1) jobs = 1;
    OptConfig cfg = spec.cfg;
    cfg.exact_mode = true;  // rows report exact rationals whenever they reconstruct

    const std::vector<Pattern> candidates = enumerate_candidates(spec);
    std::vector<std::optional<SearchRow>> slots(candidates.size());

    std::atomic<std::size_t> cursor{0};
    auto worker = [&]() {
        while (true) {
            const std::size_t idx = cursor.fetch_add(1);
            if (idx >= candidates.size()) break;
            const Pattern& p = candidates[idx];
            const NonJumpCertificate cert = certify_nonjump(p, spec.pivot, cfg);
            if (!cert.structural_condition || !cert.pivot_weight_positive ||
                !cert.lambda_below_one)
                continue;
            // Density 1 (the complete multiset pattern) makes the non-jump
            // claim vacuous; reported densities stay inside (0, 1).
            if (cert.claimed_density >= 1.0 - 1e-12) continue;
            SearchRow row;
            row.pattern = p;
            row.lambda = cert.lambda_p.value;
            row.density = cert.claimed_density;
            row.gap = cert.equality_gap;
            row.status = to_string(cert.status);
            row.conditions_ok = cert.all_conditions();
            row.converged = cert.lambda_p.converged && cert.lambda_fr.converged;
            if (!row.converged) row.status = "optimizer-flagged";
            if (cert.status == NonJumpCertificate::Status::exact_certified) {
                row.lambda_exact = cert.lambda_p.certified->value;
                row.density_exact = cert.claimed_density_exact;
            }
            slots[idx] = std::move(row);
        }
    };
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    std::vector<SearchRow> rows;
    for (auto& slot : slots)
        if (slot) {
            if (spec.density_window) {
                const auto [lo, hi] = *spec.density_window;
                if (slot->density < lo || slot->density > hi) continue;
            }
            rows.push_back(std::move(*slot));
        }

    SearchResult result;
    result.candidates_enumerated = static_cast<int>(candidates.size());
    result.candidates_kept = static_cast<int>(rows.size());

    std::sort(rows.begin(), rows.end(), [](const SearchRow& a, const SearchRow& b) {
        if (a.density != b.density) return a.density < b.density;
        return a.pattern.edges < b.pattern.edges;
    });
    for (SearchRow& row : rows) {
        if (!result.rows.empty()) {
            SearchRow& last = result.rows.back();
            const bool same_exact = last.density_exact && row.density_exact &&
                                    *last.density_exact == *row.density_exact;
            const bool same_float = std::fabs(last.density - row.density) <= 1e-9 &&
                                    !(last.density_exact && row.density_exact);
            if (same_exact || same_float) {
                last.patterns_merged += row.patterns_merged;
                last.gap = std::max(last.gap, row.gap);
                if (row.pattern.edges < last.pattern.edges) last.pattern = row.pattern;
                continue;
            }
        }
        result.rows.push_back(std::move(row));
    }
    return result;
}

}  // namespace patlag
