// Acceptance suite: end-to-end checks of the headline results, the exhaustive
// counting oracle, the property battery, and the CLI surface. One line per
// criterion; exit 0 only when every criterion passes.
//
// Usage: acceptance <path-to-patlag-cli> <path-to-data-dir>

#include <array>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "patlag/catalog.hpp"
#include "patlag/fr.hpp"
#include "patlag/json_io.hpp"
#include "patlag/optimizer.hpp"
#include "patlag/pattern.hpp"
#include "patlag/search.hpp"
#include "testutil.hpp"

namespace {

std::string g_cli;
std::string g_data;
int g_failures = 0;

struct CliResult {
    int exit_code = -1;
    std::string out;
};

CliResult run_cli(const std::string& args) {
    const std::string cmd = g_cli + " " + args + " 2>/dev/null";
    CliResult result;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return result;
    std::array<char, 4096> buf{};
    std::size_t got = 0;
    while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) result.out.append(buf.data(), got);
    const int status = pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

void criterion(const std::string& label, double budget_seconds,
               const std::function<bool(std::string&)>& body) {
    std::string detail;
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = false;
    try {
        ok = body(detail);
    } catch (const std::exception& e) {
        detail = std::string("exception: ") + e.what();
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (seconds > budget_seconds) {
        ok = false;
        detail += (detail.empty() ? "" : "; ") + std::string("over time budget");
    }
    if (!ok) ++g_failures;
    std::printf("%s %s (%.1fs)%s%s\n", label.c_str(), ok ? "PASS" : "FAIL", seconds,
                detail.empty() ? "" : " -- ", detail.c_str());
    std::fflush(stdout);
}

patlag::OptConfig standard_config() {
    patlag::OptConfig cfg;
    cfg.restarts = 200;
    cfg.exact_mode = true;
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 3) {
        std::cerr << "usage: acceptance <patlag-cli> <data-dir>\n";
        return 2;
    }
    g_cli = argv[1];
    g_data = argv[2];

    using namespace patlag;

    criterion("[1] density 3/4: exact certification of the two-vertex pattern", 5.0,
              [&](std::string& detail) {
                  const Pattern p(3, 2, {{1, 1, 2}, {1, 2, 2}});
                  const NonJumpCertificate cert = certify_nonjump(p, 1, standard_config());
                  if (!cert.lambda_p.certified || !cert.lambda_fr.certified) {
                      detail = "missing exact certification";
                      return false;
                  }
                  bool ok = cert.lambda_p.certified->value == make_rational(1, 8) &&
                            cert.lambda_fr.certified->value == make_rational(1, 8) &&
                            cert.claimed_density_exact &&
                            *cert.claimed_density_exact == make_rational(3, 4) &&
                            cert.all_conditions() &&
                            cert.status == NonJumpCertificate::Status::exact_certified;

                  const CliResult cli =
                      run_cli("certify " + g_data + "/lemma44.pat --vertex 1 --exact --json");
                  if (cli.exit_code != 0) {
                      detail = "cli exit " + std::to_string(cli.exit_code);
                      return false;
                  }
                  const auto j = nlohmann::json::parse(cli.out);
                  ok = ok && j.at("claimed_density") == "3/4" &&
                       j.at("status") == "exact-certified";
                  return ok;
              });

    criterion("[2] density 64/81: exact lambda 32/243 with matching FR construction", 30.0,
              [&](std::string& detail) {
                  const Pattern p(3, 3,
                                  {{1, 2, 3}, {1, 2, 2}, {1, 1, 2}, {1, 1, 3}, {2, 2, 3}});
                  const NonJumpCertificate cert = certify_nonjump(p, 1, standard_config());
                  if (!cert.lambda_p.certified) {
                      detail = "lambda(P) did not certify";
                      return false;
                  }
                  if (cert.lambda_p.certified->value != make_rational(32, 243)) {
                      detail = "lambda != 32/243";
                      return false;
                  }
                  const auto& w = cert.lambda_p.witness;
                  const bool classes_ok = std::fabs(w[0] + w[1] - 8.0 / 9.0) <= 1e-9 &&
                                          std::fabs(w[2] - 1.0 / 9.0) <= 1e-9;
                  if (!classes_ok) {
                      detail = "witness class totals off";
                      return false;
                  }
                  if (!(cert.claimed_density_exact &&
                        *cert.claimed_density_exact == make_rational(64, 81))) {
                      detail = "claimed density != 64/81";
                      return false;
                  }
                  if (cert.equality_gap > 1e-8) {
                      detail = "FR gap " + std::to_string(cert.equality_gap);
                      return false;
                  }
                  return cert.all_conditions();
              });

    criterion("[3] sqrt(3n-2) family, n = 1..8: optimizer matches the closed form", 120.0,
              [&](std::string& detail) {
                  OptConfig cfg = standard_config();
                  for (int n = 1; n <= 8; ++n) {
                      const CatalogEntry e = entry_family(n);
                      const LagrangianRecord rec = lagrangian(e.pattern, cfg);
                      if (std::fabs(rec.value - e.expected_lambda.value()) > 1e-8) {
                          detail = "lambda mismatch at n=" + std::to_string(n);
                          return false;
                      }
                      std::vector<double> w(e.expected_weights.size());
                      for (std::size_t i = 0; i < w.size(); ++i)
                          w[i] = e.expected_weights[i].value();
                      if (kkt_residual(e.pattern, w) > 1e-10) {
                          detail = "closed-form kkt residual at n=" + std::to_string(n);
                          return false;
                      }
                      const bool square = (n == 1 || n == 2 || n == 6);
                      if (square) {
                          const Rational want =
                              n == 6 ? make_rational(7, 50) : make_rational(1, 8);
                          if (!rec.certified || rec.certified->value != want) {
                              detail = "exact certification missing at n=" + std::to_string(n);
                              return false;
                          }
                      }
                  }
                  if (!isomorphic(entry_family(1).pattern, entry_lemma44().pattern)) {
                      detail = "family:1 not isomorphic to lemma44";
                      return false;
                  }
                  return true;
              });

    criterion("[4] blowup-count formula vs brute force, exhaustive n <= 3, t in {0..3}", 60.0,
              [&](std::string& detail) {
                  long long checked = 0;
                  for (int n = 1; n <= 3; ++n) {
                      const auto patterns = testutil::all_patterns(n, 6);
                      std::vector<BlowupVector> ts;
                      BlowupVector t(n, 0);
                      while (true) {
                          ts.push_back(t);
                          int pos = 0;
                          while (pos < n && ++t[pos] > 3) t[pos++] = 0;
                          if (pos == n) break;
                      }
                      for (const Pattern& p : patterns)
                          for (const BlowupVector& tv : ts) {
                              const auto oracle =
                                  testutil::brute_force_blowup_edges(p, tv, true);
                              const long long formula = simple_blowup_edge_count(p, tv);
                              if (formula != static_cast<long long>(oracle.size())) {
                                  detail = "formula vs oracle mismatch";
                                  return false;
                              }
                              if (simple_blowup(p, tv).pattern.edge_count() != formula) {
                                  detail = "constructed blowup vs formula mismatch";
                                  return false;
                              }
                              ++checked;
                          }
                  }
                  detail = std::to_string(checked) + " pairs";
                  return checked > 50000;
              });

    criterion("[5] FR construction fidelity on the two-vertex pattern", 5.0,
              [&](std::string& detail) {
                  const FRPattern fr = fr_construct(Pattern(3, 2, {{1, 1, 2}, {1, 2, 2}}), 1);
                  std::vector<Edge> want = {{1, 1, 4}, {1, 2, 4}, {1, 3, 4}, {2, 3, 4},
                                            {1, 4, 4}, {2, 4, 4}, {3, 4, 4}, {1, 2, 3}};
                  std::sort(want.begin(), want.end());
                  if (fr.pattern.edges != want) {
                      detail = "edge set differs";
                      return false;
                  }
                  const std::vector<std::array<long, 3>> points = {
                      {1, 1, 1}, {1, 2, 3}, {2, 1, 5}, {3, 5, 7}, {10, 1, 4}};
                  for (const auto& [pa, pb, pc] : points) {
                      const Rational a(pa), b(pb), c(pc);
                      const Rational expected = a * b * b / 4 + a * a * c / 2 +
                                                b * b * c / 4 + a * b * c +
                                                (a + b) * c * c / 2;
                      const std::vector<Rational> weights = {a, b / 2, b / 2, c};
                      if (eval_poly<Rational>(fr.pattern,
                                              std::span<const Rational>(weights)) != expected) {
                          detail = "polynomial identity failed";
                          return false;
                      }
                  }
                  return true;
              });

    criterion("[6] property suite on the catalog plus 50 random patterns", 200.0,
              [&](std::string& detail) {
                  OptConfig cfg;
                  cfg.restarts = 60;
                  std::mt19937_64 rng(424242);

                  std::vector<Pattern> pool = {entry_lemma44().pattern, entry_thm16().pattern,
                                               entry_family(2).pattern, entry_family(3).pattern};
                  for (int i = 0; i < 50; ++i)
                      pool.push_back(testutil::random_pattern(rng, 2 + static_cast<int>(rng() % 3)));

                  for (std::size_t pi = 0; pi < pool.size(); ++pi) {
                      const Pattern& p = pool[pi];
                      // homogeneity + Euler at a random point
                      const auto x = testutil::random_simplex_point(rng, p.n);
                      const double value = eval_poly<double>(p, x);
                      std::vector<double> scaled(x);
                      for (double& xi : scaled) xi *= 1.7;
                      if (testutil::rel_err(eval_poly<double>(p, scaled),
                                            1.7 * 1.7 * 1.7 * value) > 1e-12) {
                          detail = "homogeneity";
                          return false;
                      }
                      const auto g = grad_poly<double>(p, x);
                      double euler = 0.0;
                      for (int i = 0; i < p.n; ++i) euler += x[i] * g[i];
                      if (std::fabs(euler - 3.0 * value) > 1e-12 * (1.0 + std::fabs(value))) {
                          detail = "euler";
                          return false;
                      }
                      // lambda(FR) >= lambda(P), isomorphism invariance
                      const double lam = lagrangian(p, cfg).value;
                      if (lagrangian(fr_construct(p, 1).pattern, cfg).value < lam - 1e-9) {
                          detail = "lambda(FR) < lambda(P)";
                          return false;
                      }
                      std::vector<int> perm(p.n);
                      std::iota(perm.begin(), perm.end(), 1);
                      std::shuffle(perm.begin(), perm.end(), rng);
                      if (std::fabs(lagrangian(apply_permutation(p, perm), cfg).value - lam) >
                          1e-9) {
                          detail = "isomorphism invariance";
                          return false;
                      }
                      // monotone under a random edge addition
                      auto pool_edges = testutil::all_triple_multisets(p.n);
                      std::shuffle(pool_edges.begin(), pool_edges.end(), rng);
                      for (const Edge& extra : pool_edges) {
                          if (std::binary_search(p.edges.begin(), p.edges.end(), extra)) continue;
                          std::vector<Edge> bigger = p.edges;
                          bigger.push_back(extra);
                          if (lagrangian(Pattern(3, p.n, bigger), cfg).value < lam - 1e-9) {
                              detail = "monotonicity";
                              return false;
                          }
                          break;
                      }
                  }
                  // gradient vs central differences, 100 random points
                  for (int trial = 0; trial < 100; ++trial) {
                      const Pattern& p = pool[trial % pool.size()];
                      const auto x = testutil::random_simplex_point(rng, p.n);
                      const auto g = grad_poly<double>(p, x);
                      const auto fd = testutil::finite_difference_gradient(p, x, 1e-5);
                      for (int i = 0; i < p.n; ++i) {
                          const double err = std::fabs(g[i] - fd[i]);
                          if (err > 1e-9 && err / std::max(std::fabs(fd[i]), 1e-12) > 1e-6) {
                              detail = "finite differences";
                              return false;
                          }
                      }
                  }
                  return true;
              });

    criterion("[7] three-vertex search recovers 3/4 and 64/81 with tight gaps", 600.0,
              [&](std::string& detail) {
                  SearchSpec spec;
                  spec.n = 3;
                  spec.max_extra_edges = 7;
                  spec.cfg.restarts = 200;
                  const SearchResult result = run_search(spec, 2);
                  bool has34 = false, has6481 = false;
                  for (const auto& row : result.rows) {
                      if (row.gap > 1e-8) {
                          detail = "gap " + std::to_string(row.gap) + " at density " +
                                   std::to_string(row.density);
                          return false;
                      }
                      if (row.density_exact && *row.density_exact == make_rational(3, 4))
                          has34 = true;
                      if (row.density_exact && *row.density_exact == make_rational(64, 81))
                          has6481 = true;
                  }
                  detail = std::to_string(result.candidates_enumerated) + " candidates, " +
                           std::to_string(result.rows.size()) + " densities";
                  if (!has34) detail += "; missing exact 3/4";
                  if (!has6481) detail += "; missing exact 64/81";
                  return has34 && has6481;
              });

    // CLI surface checks (part of the same gate)
    criterion("[cli] pattern files round-trip and blowup counts match", 30.0,
              [&](std::string& detail) {
                  for (const std::string name :
                       {"lemma44.pat", "thm16.pat", "mixed.pat", "triple.pat"}) {
                      std::ifstream in(g_data + "/" + name);
                      if (!in) {
                          detail = "missing fixture " + name;
                          return false;
                      }
                      std::stringstream buf;
                      buf << in.rdbuf();
                      const Pattern p = parse_pattern(buf.str());
                      const std::string once = serialize_pattern(p);
                      if (serialize_pattern(parse_pattern(once)) != once) {
                          detail = "round-trip failed for " + name;
                          return false;
                      }
                  }
                  const CliResult count =
                      run_cli("blowup " + g_data + "/mixed.pat --t 2,2,1 --simple --count-only");
                  if (count.exit_code != 0 || count.out != "7\n") {
                      detail = "blowup count: got '" + count.out + "'";
                      return false;
                  }
                  return true;
              });

    criterion("[cli] catalog verify, JSON determinism, exit codes", 120.0,
              [&](std::string& detail) {
                  const CliResult verify = run_cli("catalog --entry thm16 --verify");
                  if (verify.exit_code != 0 || verify.out.find("32/243") == std::string::npos ||
                      verify.out.find("FAIL") != std::string::npos) {
                      detail = "catalog verify (exit " + std::to_string(verify.exit_code) + ")";
                      return false;
                  }
                  const std::string lag_cmd =
                      "lagrangian " + g_data + "/thm16.pat --exact --seed 7 --json";
                  const CliResult a = run_cli(lag_cmd);
                  const CliResult b = run_cli(lag_cmd);
                  if (a.exit_code != 0 || a.out != b.out) {
                      detail = "JSON output not byte-identical";
                      return false;
                  }
                  // a pattern failing the hypothesis exits 3; a bad file exits 1
                  const CliResult fail3 =
                      run_cli("certify " + g_data + "/triple.pat --vertex 1");
                  if (fail3.exit_code != 3) {
                      detail = "expected exit 3, got " + std::to_string(fail3.exit_code);
                      return false;
                  }
                  const CliResult fail1 = run_cli("certify /nonexistent.pat --vertex 1");
                  if (fail1.exit_code != 1) {
                      detail = "expected exit 1, got " + std::to_string(fail1.exit_code);
                      return false;
                  }
                  const CliResult usage = run_cli("frobnicate");
                  if (usage.exit_code != 1) {
                      detail = "unknown subcommand should exit 1";
                      return false;
                  }
                  return true;
              });

    if (g_failures == 0) {
        std::printf("all acceptance criteria passed\n");
        return 0;
    }
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
}
