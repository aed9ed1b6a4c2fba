#pragma once

// The Frankl-Rodl construction FR_v(P) and non-jump certificates.
//
// FR_v(P): blow vertex v into r copies, drop every blowup edge in which a
// copy other than the first repeats, then add the edge made of all r copies.
// When lambda(FR_v(P)) = lambda(P) < 1 and some maximal weighting of P puts
// positive weight on v, the density r!*lambda(P) is not a jump for r-graphs;
// the certificate records exactly that hypothesis, with exact rational
// backing where the witness reconstructs.

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "patlag/optimizer.hpp"
#include "patlag/pattern.hpp"
#include "patlag/rational.hpp"

namespace patlag {

struct FRPattern {
    Pattern pattern;              // the constructed FR_v(P)
    Pattern source;
    int pivot = 0;                // v, 1-based in the source
    std::vector<int> copy_labels;  // labels of (v,1), ..., (v,r) in `pattern`
};

inline FRPattern fr_construct(const Pattern& p, int v) {
    if (v < 1 || v > p.n) throw std::invalid_argument("fr_construct: vertex out of range");
    BlowupVector t(p.n, 1);
    t[v - 1] = p.r;
    const BlowupResult blown = blowup(p, t);
    const std::vector<int>& copies = blown.copies[v - 1];

    std::vector<Edge> edges;
    for (const Edge& e : blown.pattern.edges) {
        bool keep = true;
        for (std::size_t c = 1; c < copies.size(); ++c)  // copy 1 may repeat
            if (multiplicity(e, copies[c]) >= 2) {
                keep = false;
                break;
            }
        if (keep) edges.push_back(e);
    }
    Edge all_copies = Edge(copies.begin(), copies.end());
    std::sort(all_copies.begin(), all_copies.end());
    edges.push_back(std::move(all_copies));

    FRPattern out;
    out.pattern = Pattern(p.r, blown.pattern.n, std::move(edges));
    out.source = p;
    out.pivot = v;
    out.copy_labels = copies;
    return out;
}

/// Structural sufficient condition at pivot v: some u != v with {v,u,u} an
/// edge, and {v,v,i} an edge for every i != v. Returns the smallest such u.
/// Patterns passing this check automatically satisfy the equal-Lagrangian
/// hypothesis of the FR method (for r = 3).
inline std::optional<int> pivot_core_witness(const Pattern& p, int v) {
    if (v < 1 || v > p.n) throw std::invalid_argument("pivot_core_witness: vertex out of range");
    if (p.r != 3) return std::nullopt;  // the structural condition is a 3-pattern statement
    auto has_edge = [&](Edge e) {
        std::sort(e.begin(), e.end());
        return std::binary_search(p.edges.begin(), p.edges.end(), e);
    };
    for (int i = 1; i <= p.n; ++i)
        if (i != v && !has_edge({v, v, i})) return std::nullopt;
    for (int u = 1; u <= p.n; ++u)
        if (u != v && has_edge({v, u, u})) return u;
    return std::nullopt;
}

struct NonJumpCertificate {
    enum class Status { exact_certified, numeric_evidence };

    Pattern source;
    int pivot = 0;
    LagrangianRecord lambda_p;
    LagrangianRecord lambda_fr;
    bool pivot_weight_positive = false;
    bool lambda_below_one = false;
    bool equality = false;
    double equality_gap = 0.0;
    bool structural_condition = false;
    std::optional<int> structural_witness;
    double claimed_density = 0.0;  // r! * lambda(P)
    std::optional<Rational> claimed_density_exact;
    Status status = Status::numeric_evidence;

    bool all_conditions() const {
        return pivot_weight_positive && lambda_below_one && equality && structural_condition;
    }
};

inline const char* to_string(NonJumpCertificate::Status s) {
    return s == NonJumpCertificate::Status::exact_certified ? "exact-certified"
                                                            : "numeric-evidence";
}

/// Evaluates the full FR-method hypothesis for (P, v). The certificate is a
/// report: failed conditions are recorded, never thrown.
inline NonJumpCertificate certify_nonjump(const Pattern& p, int v, const OptConfig& cfg = {}) {
    if (v < 1 || v > p.n) throw std::invalid_argument("certify_nonjump: vertex out of range");
    const FRPattern fr = fr_construct(p, v);

    NonJumpCertificate cert;
    cert.source = p;
    cert.pivot = v;
    cert.lambda_p = lagrangian(p, cfg);
    cert.lambda_fr = lagrangian(fr.pattern, cfg);

    const LagrangianRecord& lp = cert.lambda_p;
    const LagrangianRecord& lf = cert.lambda_fr;

    if (lp.certified)
        cert.pivot_weight_positive = lp.certified->weights[v - 1] > 0;
    else
        cert.pivot_weight_positive = lp.witness[v - 1] > cfg.support_threshold;

    cert.lambda_below_one =
        lp.certified ? lp.certified->value < 1 : lp.value < 1.0 - 1e-12;

    cert.equality_gap = std::fabs(lf.value - lp.value);
    cert.equality = cert.equality_gap <= 1e-8;

    if (auto u = pivot_core_witness(p, v)) {
        cert.structural_condition = true;
        cert.structural_witness = u;
    }

    const double r_factorial = static_cast<double>(detail::factorial_long(p.r));
    cert.claimed_density = r_factorial * lp.value;
    if (lp.certified)
        cert.claimed_density_exact = Rational(detail::factorial_long(p.r)) * lp.certified->value;

    const bool exact = lp.certified && lf.certified &&
                       lp.certified->value == lf.certified->value &&
                       lp.certified->weights[v - 1] > 0;
    cert.status = exact ? NonJumpCertificate::Status::exact_certified
                        : NonJumpCertificate::Status::numeric_evidence;
    return cert;
}

}  // namespace patlag
