#pragma once

// JSON views of the library records. All floating-point fields are emitted
// as strings with 17 significant digits so identical inputs produce
// byte-identical documents on any platform; exact rationals are "num/den"
// strings. schema_version bumps on breaking change.

#include <cstdio>
#include <string>

#include <json.hpp>

#include "patlag/catalog.hpp"
#include "patlag/fr.hpp"
#include "patlag/optimizer.hpp"
#include "patlag/pattern.hpp"
#include "patlag/search.hpp"

namespace patlag {

inline constexpr int kSchemaVersion = 1;

inline std::string format_double17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline nlohmann::json pattern_to_json(const Pattern& p) {
    nlohmann::json edges = nlohmann::json::array();
    for (const Edge& e : p.edges) edges.push_back(e);
    return {{"r", p.r}, {"n", p.n}, {"edges", edges}};
}

inline nlohmann::json lagrangian_to_json(const LagrangianRecord& rec) {
    nlohmann::json j;
    j["value"] = format_double17(rec.value);
    nlohmann::json witness = nlohmann::json::array();
    for (double w : rec.witness) witness.push_back(format_double17(w));
    j["witness"] = witness;
    j["support"] = rec.support;
    j["kkt_residual"] = format_double17(rec.kkt_residual);
    j["restarts_agreeing"] = rec.restarts_agreeing;
    j["converged"] = rec.converged;
    j["reduction_gap"] = format_double17(rec.reduction_gap);
    if (rec.certified) {
        nlohmann::json weights = nlohmann::json::array();
        for (const Rational& q : rec.certified->weights) weights.push_back(fraction_string(q));
        j["certified"] = {{"value", fraction_string(rec.certified->value)},
                          {"weights", weights},
                          {"exact_kkt_verified", rec.certified->exact_kkt_verified}};
    } else {
        j["certified"] = nullptr;
    }
    return j;
}

inline nlohmann::json certificate_to_json(const NonJumpCertificate& cert) {
    nlohmann::json j;
    j["schema_version"] = kSchemaVersion;
    j["source"] = pattern_to_json(cert.source);
    j["pivot"] = cert.pivot;
    j["lambda_p"] = lagrangian_to_json(cert.lambda_p);
    j["lambda_fr"] = lagrangian_to_json(cert.lambda_fr);
    j["pivot_weight_positive"] = cert.pivot_weight_positive;
    j["lambda_below_one"] = cert.lambda_below_one;
    j["equality"] = cert.equality;
    j["equality_gap"] = format_double17(cert.equality_gap);
    j["structural_condition"] = cert.structural_condition;
    if (cert.structural_witness)
        j["structural_witness"] = *cert.structural_witness;
    else
        j["structural_witness"] = nullptr;
    j["claimed_density"] = cert.claimed_density_exact
                               ? fraction_string(*cert.claimed_density_exact)
                               : format_double17(cert.claimed_density);
    j["claimed_density_float"] = format_double17(cert.claimed_density);
    j["status"] = to_string(cert.status);
    j["caveats"] =
        "exact-certified verifies the equal-Lagrangian hypothesis with exact critical "
        "values; global maximality of those values is numerical evidence "
        "(restarts_agreeing).";
    return j;
}

inline nlohmann::json search_to_json(const SearchSpec& spec, const SearchResult& result) {
    nlohmann::json j;
    j["schema_version"] = kSchemaVersion;
    j["spec"] = {{"vertices", spec.n},
                 {"pivot", spec.pivot},
                 {"max_extra_edges", spec.max_extra_edges},
                 {"seed", spec.cfg.seed},
                 {"restarts", spec.cfg.restarts}};
    if (spec.density_window)
        j["spec"]["window"] = {format_double17(spec.density_window->first),
                               format_double17(spec.density_window->second)};
    j["candidates_enumerated"] = result.candidates_enumerated;
    j["candidates_kept"] = result.candidates_kept;
    nlohmann::json rows = nlohmann::json::array();
    for (const SearchRow& row : result.rows) {
        nlohmann::json r;
        r["pattern"] = edge_list_string(row.pattern);
        r["edges"] = pattern_to_json(row.pattern)["edges"];
        r["lambda"] = format_double17(row.lambda);
        r["density"] = format_double17(row.density);
        r["gap"] = format_double17(row.gap);
        r["status"] = row.status;
        r["patterns_merged"] = row.patterns_merged;
        if (row.lambda_exact) r["lambda_exact"] = fraction_string(*row.lambda_exact);
        if (row.density_exact) r["density_exact"] = fraction_string(*row.density_exact);
        rows.push_back(std::move(r));
    }
    j["rows"] = rows;
    return j;
}

inline nlohmann::json verify_report_to_json(const VerifyReport& report) {
    nlohmann::json j;
    j["schema_version"] = kSchemaVersion;
    j["entry"] = report.entry_name;
    nlohmann::json checks = nlohmann::json::array();
    for (const VerifyCheck& c : report.checks)
        checks.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    j["checks"] = checks;
    j["all_pass"] = report.all_pass();
    j["certificate"] = certificate_to_json(report.certificate);
    return j;
}

}  // namespace patlag
