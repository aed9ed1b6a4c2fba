#pragma once

// Built-in pattern instances with exact expected values, used to validate the
// whole pipeline end to end. Three entries:
//
//   lemma44    {112,122}: lambda 1/8, density 3/4
//   thm16      {123,122,112,113,223}: lambda 32/243, density 64/81
//   family:<n> n+1 vertices, all 3-subsets plus {1,i,i} and {1,1,i};
//              with k = sqrt(3n-2): lambda = 1/6 - (3n^2-2n+k^3)/(6(n+k)^3),
//              weights k/(n+k) on the pivot and 1/(n+k) elsewhere.
//
// Expected values live in Q(sqrt(3n-2)), so perfect-square cases (n = 1, 2,
// 6, 17, ...) collapse to exact rationals and certify exactly; the rest stay
// numeric. family:1 is the lemma44 pattern.

#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "patlag/fr.hpp"
#include "patlag/optimizer.hpp"
#include "patlag/pattern.hpp"
#include "patlag/rational.hpp"
#include "patlag/symmetry.hpp"

namespace patlag {

struct CatalogEntry {
    std::string name;
    Pattern pattern;
    int pivot = 1;
    QR expected_lambda;
    QR expected_density;               // r! * expected_lambda
    std::vector<QR> expected_weights;  // one per vertex
    std::string reference;
};

inline CatalogEntry entry_lemma44() {
    CatalogEntry e;
    e.name = "lemma44";
    e.pattern = Pattern(3, 2, {{1, 1, 2}, {1, 2, 2}});
    e.pivot = 1;
    e.expected_lambda = QR(make_rational(1, 8));
    e.expected_density = QR(make_rational(3, 4));
    e.expected_weights = {QR(make_rational(1, 2)), QR(make_rational(1, 2))};
    e.reference = "two-vertex pattern certifying density 3/4";
    return e;
}

inline CatalogEntry entry_thm16() {
    CatalogEntry e;
    e.name = "thm16";
    e.pattern = Pattern(3, 3, {{1, 2, 3}, {1, 2, 2}, {1, 1, 2}, {1, 1, 3}, {2, 2, 3}});
    e.pivot = 1;
    e.expected_lambda = QR(make_rational(32, 243));
    e.expected_density = QR(make_rational(64, 81));
    e.expected_weights = {QR(make_rational(4, 9)), QR(make_rational(4, 9)),
                          QR(make_rational(1, 9))};
    e.reference = "three-vertex pattern certifying density 64/81";
    return e;
}

/// Edge set of the family member: every 3-subset of [n+1] plus {1,i,i} and
/// {1,1,i} for all i >= 2. The {1,1,i} edges are what make the structural
/// pivot condition hold and the n = 1 member coincide with lemma44.
inline Pattern family_member_pattern(int n) {
    if (n < 1) throw std::invalid_argument("family pattern: n must be >= 1");
    const int vertices = n + 1;
    std::vector<Edge> edges;
    for (int a = 1; a <= vertices; ++a)
        for (int b = a + 1; b <= vertices; ++b)
            for (int c = b + 1; c <= vertices; ++c) edges.push_back({a, b, c});
    for (int i = 2; i <= vertices; ++i) {
        edges.push_back({1, i, i});
        edges.push_back({1, 1, i});
    }
    return Pattern(3, vertices, std::move(edges));
}

/// Variant without the {1,1,i} edges (the structural condition fails on it).
inline Pattern family_member_pattern_strict(int n) {
    if (n < 1) throw std::invalid_argument("family pattern: n must be >= 1");
    const int vertices = n + 1;
    std::vector<Edge> edges;
    for (int a = 1; a <= vertices; ++a)
        for (int b = a + 1; b <= vertices; ++b)
            for (int c = b + 1; c <= vertices; ++c) edges.push_back({a, b, c});
    for (int i = 2; i <= vertices; ++i) edges.push_back({1, i, i});
    return Pattern(3, vertices, std::move(edges));
}

inline CatalogEntry entry_family(int n) {
    if (n < 1) throw std::invalid_argument("family entry: n must be >= 1");
    const long d = 3L * n - 2;
    const QR k(Rational(0), Rational(1), d);
    const QR nn(Rational(static_cast<long>(n)));
    const QR one(Rational(1));
    const QR six(Rational(6));
    const QR n_plus_k = nn + k;
    const QR cube = n_plus_k * n_plus_k * n_plus_k;
    const QR numerator = QR(Rational(3L * n * n - 2L * n)) + k * k * k;

    CatalogEntry e;
    e.name = "family:" + std::to_string(n);
    e.pattern = family_member_pattern(n);
    e.pivot = 1;
    e.expected_lambda = one / six - numerator / (six * cube);
    e.expected_density = six * e.expected_lambda;
    e.expected_weights.assign(n + 1, one / n_plus_k);
    e.expected_weights[0] = k / n_plus_k;
    e.reference = "sqrt(3n-2) family member, n = " + std::to_string(n);
    return e;
}

/// Closed-form density 1 - (3n^2 - 2n + k^3)/(n + k)^3, k = sqrt(3n - 2).
inline double family_density(int n) {
    if (n < 1) throw std::invalid_argument("family_density: n must be >= 1");
    const double k = std::sqrt(3.0 * n - 2.0);
    const double nk = n + k;
    return 1.0 - (3.0 * n * n - 2.0 * n + k * k * k) / (nk * nk * nk);
}

inline std::optional<CatalogEntry> catalog_entry(const std::string& id) {
    if (id == "lemma44") return entry_lemma44();
    if (id == "thm16") return entry_thm16();
    if (id.rfind("family:", 0) == 0) {
        try {
            const int n = std::stoi(id.substr(7));
            if (n >= 1) return entry_family(n);
        } catch (const std::exception&) {
        }
    }
    return std::nullopt;
}

inline std::vector<std::string> catalog_ids() { return {"lemma44", "thm16", "family:<n>"}; }

// ---------------------------------------------------------------------------
// Entry verification
// ---------------------------------------------------------------------------

struct VerifyCheck {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct VerifyReport {
    std::string entry_name;
    std::vector<VerifyCheck> checks;
    NonJumpCertificate certificate;

    bool all_pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }
};

/// Runs the non-jump certification on the entry and compares everything
/// against the stored closed forms: exact rational equality where the
/// expectation is rational, 1e-8 otherwise; witnesses compared as symmetry
/// class totals since equivalent vertices may be permuted.
inline VerifyReport verify_entry(const CatalogEntry& entry, const OptConfig& cfg = {}) {
    OptConfig exact_cfg = cfg;
    exact_cfg.exact_mode = true;

    VerifyReport report;
    report.entry_name = entry.name;
    report.certificate = certify_nonjump(entry.pattern, entry.pivot, exact_cfg);
    const NonJumpCertificate& cert = report.certificate;

    auto add = [&](std::string name, bool pass, std::string detail = {}) {
        report.checks.push_back({std::move(name), pass, std::move(detail)});
    };

    {
        const QR value = eval_poly<QR>(entry.pattern,
                                       std::span<const QR>(entry.expected_weights));
        add("closed-form value identity", value == entry.expected_lambda,
            "exact evaluation at expected weights");
        add("density is r! * lambda", entry.expected_density == QR(Rational(6)) * entry.expected_lambda);
    }
    {
        std::vector<double> w(entry.expected_weights.size());
        for (std::size_t i = 0; i < w.size(); ++i) w[i] = entry.expected_weights[i].value();
        const double res = kkt_residual(entry.pattern, w, exact_cfg.support_threshold);
        add("closed-form weights critical", res <= 1e-10, "kkt residual " + std::to_string(res));
    }
    if (entry.expected_lambda.is_rational()) {
        const bool pass = cert.lambda_p.certified &&
                          cert.lambda_p.certified->value == entry.expected_lambda.a;
        add("lambda matches expected (exact)", pass,
            cert.lambda_p.certified
                ? fraction_string(cert.lambda_p.certified->value) + " vs " +
                      fraction_string(entry.expected_lambda.a)
                : "no exact certification");
    } else {
        const double gap = std::fabs(cert.lambda_p.value - entry.expected_lambda.value());
        add("lambda matches expected (1e-8)", gap <= 1e-8, "gap " + std::to_string(gap));
    }
    {
        const EquivalencePartition part = equivalence_classes(entry.pattern);
        bool pass = true;
        for (const auto& cls : part.classes) {
            double got = 0.0, want = 0.0;
            for (int v : cls) {
                got += cert.lambda_p.witness[v - 1];
                want += entry.expected_weights[v - 1].value();
            }
            if (std::fabs(got - want) > 1e-8) pass = false;
        }
        add("witness matches expected class totals", pass);
    }
    add("structural pivot condition", cert.structural_condition);
    add("pivot weight positive", cert.pivot_weight_positive);
    add("lambda(FR) = lambda(P)", cert.equality, "gap " + std::to_string(cert.equality_gap));
    add("lambda below one", cert.lambda_below_one);
    return report;
}

}  // namespace patlag
