// patlag: Lagrangians of 3-uniform hypergraph patterns, the Frankl-Rodl
// construction, and non-jump density certificates.
//
// Exit codes: 0 success, 1 validation failure, 2 computation failure,
// 3 a certificate/verification condition failed.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "patlag/catalog.hpp"
#include "patlag/fr.hpp"
#include "patlag/json_io.hpp"
#include "patlag/optimizer.hpp"
#include "patlag/pattern.hpp"
#include "patlag/search.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitComputation = 2;
constexpr int kExitConditionFailed = 3;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << content;
}

patlag::Pattern load_pattern(const std::string& path) {
    std::vector<std::string> warnings;
    patlag::Pattern p = patlag::parse_pattern(read_file(path), &warnings);
    for (const auto& w : warnings) std::cerr << "warning: " << path << ": " << w << "\n";
    return p;
}

std::uint64_t default_seed() {
    if (const char* env = std::getenv("PATTERN_LAGRANGIAN_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            std::cerr << "warning: ignoring malformed PATTERN_LAGRANGIAN_SEED\n";
        }
    }
    return 0;
}

std::vector<int> parse_counts(const std::string& csv) {
    std::vector<int> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        size_t pos = 0;
        const int v = std::stoi(item, &pos);
        if (pos != item.size() || v < 0)
            throw std::invalid_argument("bad copy count '" + item + "'");
        out.push_back(v);
    }
    if (out.empty()) throw std::invalid_argument("empty copy-count list");
    return out;
}

void emit_json(const nlohmann::json& j, const std::string& dest) {
    if (dest.empty() || dest == "-")
        std::cout << j.dump(2) << "\n";
    else
        write_file(dest, j.dump(2) + "\n");
}

void print_lagrangian(const patlag::LagrangianRecord& rec) {
    std::cout << "lambda      " << patlag::format_double17(rec.value) << "\n";
    std::cout << "density     " << patlag::format_double17(6.0 * rec.value) << "\n";
    std::cout << "witness    ";
    for (double w : rec.witness) std::cout << " " << patlag::format_double17(w);
    std::cout << "\nsupport    ";
    for (int v : rec.support) std::cout << " " << v;
    std::cout << "\nkkt residual " << patlag::format_double17(rec.kkt_residual) << "\n";
    std::cout << "restarts agreeing " << rec.restarts_agreeing << "\n";
    if (!rec.converged) std::cout << "warning: optimizer flagged non-convergence\n";
    if (rec.certified) {
        std::cout << "exact lambda  " << patlag::fraction_string(rec.certified->value)
                  << "  (weights";
        for (const auto& q : rec.certified->weights)
            std::cout << " " << patlag::fraction_string(q);
        std::cout << ")\n";
    }
}

struct CommonOpts {
    std::uint64_t seed = default_seed();
    int restarts = 200;
    bool exact = false;

    patlag::OptConfig config() const {
        patlag::OptConfig cfg;
        cfg.seed = seed;
        cfg.restarts = restarts;
        cfg.exact_mode = exact;
        return cfg;
    }
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--seed", opts.seed, "optimizer seed (default: env PATTERN_LAGRANGIAN_SEED or 0)");
    cmd->add_option("--restarts", opts.restarts, "random restarts per solve")->check(CLI::PositiveNumber);
    cmd->add_flag("--exact", opts.exact, "attempt exact rational certification of the witness");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pattern Lagrangians and non-jump certificates"};
    app.require_subcommand(1);

    // --- lagrangian ---
    auto* lag_cmd = app.add_subcommand("lagrangian", "maximize the blowup polynomial of a pattern");
    std::string lag_file;
    CommonOpts lag_opts;
    bool lag_show_symmetry = false, lag_json = false;
    lag_cmd->add_option("file", lag_file, "pattern file")->required();
    add_common(lag_cmd, lag_opts);
    lag_cmd->add_flag("--show-symmetry", lag_show_symmetry, "print equivalence classes");
    lag_cmd->add_flag("--json", lag_json, "JSON to stdout");

    // --- blowup ---
    auto* blow_cmd = app.add_subcommand("blowup", "blow up a pattern by per-vertex copy counts");
    std::string blow_file, blow_t, blow_out;
    bool blow_simple = false, blow_count_only = false;
    blow_cmd->add_option("file", blow_file, "pattern file")->required();
    blow_cmd->add_option("--t", blow_t, "comma-separated copy counts, one per vertex")->required();
    blow_cmd->add_flag("--simple", blow_simple, "drop edges with repeated vertices");
    blow_cmd->add_flag("--count-only", blow_count_only, "print only the edge count");
    blow_cmd->add_option("-o,--out", blow_out, "write the blowup pattern to a file");

    // --- fr ---
    auto* fr_cmd = app.add_subcommand("fr", "construct the Frankl-Rodl pattern FR_v(P)");
    std::string fr_file, fr_out;
    int fr_vertex = 1;
    fr_cmd->add_option("file", fr_file, "pattern file")->required();
    fr_cmd->add_option("--vertex", fr_vertex, "pivot vertex v")->required();
    fr_cmd->add_option("-o,--out", fr_out, "output pattern file (default stdout)");

    // --- certify ---
    auto* cert_cmd = app.add_subcommand("certify", "check the non-jump hypothesis for (P, v)");
    std::string cert_file;
    int cert_vertex = 1;
    CommonOpts cert_opts;
    std::string cert_json;
    bool cert_json_given = false;
    cert_cmd->add_option("file", cert_file, "pattern file")->required();
    cert_cmd->add_option("--vertex", cert_vertex, "pivot vertex v")->required();
    add_common(cert_cmd, cert_opts);
    auto* cert_json_opt =
        cert_cmd->add_option("--json", cert_json, "JSON output (stdout, or to the given file)")
            ->expected(0, 1);

    // --- catalog ---
    auto* cat_cmd = app.add_subcommand("catalog", "built-in patterns with exact expected values");
    bool cat_list = false, cat_verify = false, cat_json = false, cat_strict = false;
    std::string cat_entry, cat_emit;
    CommonOpts cat_opts;
    cat_cmd->add_flag("--list", cat_list, "list catalog entries");
    cat_cmd->add_option("--entry", cat_entry, "entry id: lemma44 | thm16 | family:<n>");
    cat_cmd->add_option("--emit", cat_emit, "write the entry's pattern file");
    cat_cmd->add_flag("--verify", cat_verify, "run the full verification suite on the entry");
    cat_cmd->add_flag("--json", cat_json, "JSON to stdout");
    cat_cmd->add_flag("--strict-paper-edges", cat_strict,
                      "family:<n> only: emit the variant without the {1,1,i} edges");
    add_common(cat_cmd, cat_opts);

    // --- search ---
    auto* search_cmd = app.add_subcommand("search", "enumerate pivot-core patterns and tabulate densities");
    int search_n = 3, search_max_extra = 7, search_jobs = 1;
    std::string search_window, search_json;
    CommonOpts search_opts;
    search_cmd->add_option("--vertices", search_n, "vertex count")->required()->check(CLI::Range(2, 6));
    search_cmd->add_option("--max-extra-edges", search_max_extra, "cap on edges beyond the core");
    search_cmd->add_option("--window", search_window, "density filter lo,hi");
    search_cmd->add_option("--json", search_json, "write the result table as JSON ('-' for stdout)");
    search_cmd->add_option("--jobs", search_jobs, "parallel workers")->check(CLI::PositiveNumber);
    add_common(search_cmd, search_opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitValidation;
    }
    cert_json_given = cert_json_opt->count() > 0;

    try {
        using namespace patlag;

        if (*lag_cmd) {
            const Pattern p = load_pattern(lag_file);
            const LagrangianRecord rec = lagrangian(p, lag_opts.config());
            const EquivalencePartition part = equivalence_classes(p);
            if (lag_json) {
                nlohmann::json j = lagrangian_to_json(rec);
                j["schema_version"] = kSchemaVersion;
                j["pattern"] = pattern_to_json(p);
                if (lag_show_symmetry) j["symmetry_classes"] = part.classes;
                emit_json(j, "-");
            } else {
                print_lagrangian(rec);
                if (lag_show_symmetry) {
                    std::cout << "symmetry classes:";
                    for (const auto& cls : part.classes) {
                        std::cout << " {";
                        for (std::size_t i = 0; i < cls.size(); ++i)
                            std::cout << (i ? "," : "") << cls[i];
                        std::cout << "}";
                    }
                    std::cout << "\n";
                }
            }
            return kExitOk;
        }

        if (*blow_cmd) {
            const Pattern p = load_pattern(blow_file);
            const std::vector<int> t = parse_counts(blow_t);
            if (static_cast<int>(t.size()) != p.n)
                throw std::invalid_argument("--t needs exactly " + std::to_string(p.n) + " counts");
            if (blow_count_only) {
                if (blow_simple)
                    std::cout << simple_blowup_edge_count(p, t) << "\n";
                else
                    std::cout << blowup(p, t).pattern.edge_count() << "\n";
                return kExitOk;
            }
            const BlowupResult result = blow_simple ? simple_blowup(p, t) : blowup(p, t);
            std::string text = serialize_pattern(result.pattern);
            if (blow_out.empty())
                std::cout << text;
            else
                write_file(blow_out, text);
            return kExitOk;
        }

        if (*fr_cmd) {
            const Pattern p = load_pattern(fr_file);
            const FRPattern fr = fr_construct(p, fr_vertex);
            std::string text = "# FR_" + std::to_string(fr_vertex) + " of: " + edge_list_string(p) +
                               "\n# pivot copies:";
            for (int label : fr.copy_labels) text += " " + std::to_string(label);
            text += "\n" + serialize_pattern(fr.pattern);
            if (fr_out.empty())
                std::cout << text;
            else
                write_file(fr_out, text);
            return kExitOk;
        }

        if (*cert_cmd) {
            const Pattern p = load_pattern(cert_file);
            const NonJumpCertificate cert = certify_nonjump(p, cert_vertex, cert_opts.config());
            if (cert_json_given) {
                emit_json(certificate_to_json(cert), cert_json);
            } else {
                std::cout << "pattern            " << edge_list_string(p) << "\n";
                std::cout << "pivot              " << cert.pivot << "\n";
                std::cout << "lambda(P)          " << format_double17(cert.lambda_p.value) << "\n";
                std::cout << "lambda(FR_v(P))    " << format_double17(cert.lambda_fr.value) << "\n";
                std::cout << "equality gap       " << format_double17(cert.equality_gap) << "\n";
                std::cout << "claimed density    "
                          << (cert.claimed_density_exact
                                  ? fraction_string(*cert.claimed_density_exact)
                                  : format_double17(cert.claimed_density))
                          << "\n";
                auto flag = [](bool b) { return b ? "yes" : "NO"; };
                std::cout << "pivot weight > 0   " << flag(cert.pivot_weight_positive) << "\n";
                std::cout << "lambda < 1         " << flag(cert.lambda_below_one) << "\n";
                std::cout << "lambda equality    " << flag(cert.equality) << "\n";
                std::cout << "structural core    " << flag(cert.structural_condition);
                if (cert.structural_witness) std::cout << "  (u = " << *cert.structural_witness << ")";
                std::cout << "\nstatus             " << to_string(cert.status) << "\n";
            }
            return cert.all_conditions() ? kExitOk : kExitConditionFailed;
        }

        if (*cat_cmd) {
            if (cat_list) {
                for (const auto& id : catalog_ids()) std::cout << id << "\n";
                return kExitOk;
            }
            if (cat_entry.empty()) throw std::invalid_argument("catalog: need --list or --entry");
            auto entry = catalog_entry(cat_entry);
            if (!entry) throw std::invalid_argument("catalog: unknown entry '" + cat_entry + "'");
            if (cat_strict) {
                if (cat_entry.rfind("family:", 0) != 0)
                    throw std::invalid_argument("--strict-paper-edges applies to family:<n> only");
                entry->pattern = family_member_pattern_strict(std::stoi(cat_entry.substr(7)));
                entry->name += " (strict variant)";
            }
            if (!cat_emit.empty()) write_file(cat_emit, serialize_pattern(entry->pattern));
            if (cat_verify) {
                const VerifyReport report = verify_entry(*entry, cat_opts.config());
                if (cat_json) {
                    emit_json(verify_report_to_json(report), "-");
                } else {
                    std::cout << "entry " << report.entry_name << "\n";
                    for (const auto& check : report.checks)
                        std::cout << "  " << check.name
                                  << (check.detail.empty() ? "" : " [" + check.detail + "]") << ": "
                                  << (check.pass ? "PASS" : "FAIL") << "\n";
                }
                return report.all_pass() ? kExitOk : kExitConditionFailed;
            }
            if (cat_json) {
                nlohmann::json j;
                j["schema_version"] = kSchemaVersion;
                j["name"] = entry->name;
                j["pattern"] = pattern_to_json(entry->pattern);
                j["pivot"] = entry->pivot;
                j["expected_lambda"] = format_double17(entry->expected_lambda.value());
                if (entry->expected_lambda.is_rational())
                    j["expected_lambda_exact"] = fraction_string(entry->expected_lambda.a);
                j["expected_density"] = format_double17(entry->expected_density.value());
                if (entry->expected_density.is_rational())
                    j["expected_density_exact"] = fraction_string(entry->expected_density.a);
                j["reference"] = entry->reference;
                emit_json(j, "-");
            } else {
                std::cout << "name     " << entry->name << "\n";
                std::cout << "pattern  " << edge_list_string(entry->pattern) << "\n";
                std::cout << "pivot    " << entry->pivot << "\n";
                std::cout << "lambda   " << format_double17(entry->expected_lambda.value());
                if (entry->expected_lambda.is_rational())
                    std::cout << " = " << fraction_string(entry->expected_lambda.a);
                std::cout << "\ndensity  " << format_double17(entry->expected_density.value());
                if (entry->expected_density.is_rational())
                    std::cout << " = " << fraction_string(entry->expected_density.a);
                std::cout << "\n";
            }
            return kExitOk;
        }

        if (*search_cmd) {
            SearchSpec spec;
            spec.n = search_n;
            spec.max_extra_edges = search_max_extra;
            spec.cfg = search_opts.config();
            if (!search_window.empty()) {
                const auto comma = search_window.find(',');
                if (comma == std::string::npos)
                    throw std::invalid_argument("--window expects lo,hi");
                spec.density_window = {std::stod(search_window.substr(0, comma)),
                                       std::stod(search_window.substr(comma + 1))};
            }
            const SearchResult result = run_search(spec, search_jobs);
            if (!search_json.empty()) {
                emit_json(search_to_json(spec, result), search_json);
            }
            if (search_json.empty() || search_json != "-") {
                std::cout << "candidates " << result.candidates_enumerated << ", rows "
                          << result.rows.size() << "\n";
                for (const auto& row : result.rows) {
                    std::cout << format_double17(row.density);
                    if (row.density_exact)
                        std::cout << " = " << fraction_string(*row.density_exact);
                    std::cout << "  gap " << format_double17(row.gap) << "  " << row.status << "  x"
                              << row.patterns_merged << "  [" << edge_list_string(row.pattern)
                              << "]\n";
                }
            }
            return kExitOk;
        }
    } catch (const patlag::PatternParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitComputation;
    }
    return kExitValidation;
}
