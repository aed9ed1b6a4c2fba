#include <doctest.h>

#include "patlag/catalog.hpp"
#include "patlag/fr.hpp"
#include "testutil.hpp"

using namespace patlag;

namespace {
OptConfig quick(int restarts = 80) {
    OptConfig cfg;
    cfg.restarts = restarts;
    return cfg;
}
}  // namespace

TEST_CASE("entry lookup") {
    CHECK(catalog_entry("lemma44"));
    CHECK(catalog_entry("thm16"));
    CHECK(catalog_entry("family:5"));
    CHECK(!catalog_entry("family:0"));
    CHECK(!catalog_entry("family:x"));
    CHECK(!catalog_entry("unknown"));
}

TEST_CASE("lemma44 entry fields") {
    const CatalogEntry e = entry_lemma44();
    CHECK(e.pattern == Pattern(3, 2, {{1, 1, 2}, {1, 2, 2}}));
    CHECK(e.expected_lambda == QR(make_rational(1, 8)));
    CHECK(e.expected_density == QR(make_rational(3, 4)));
    CHECK(e.expected_density.value() == 0.75);
    CHECK(eval_poly<QR>(e.pattern, std::span<const QR>(e.expected_weights)) ==
          e.expected_lambda);
    CHECK(pivot_core_witness(e.pattern, 1) == 2);
}

TEST_CASE("thm16 entry fields and the corrected zero-pivot face value") {
    const CatalogEntry e = entry_thm16();
    CHECK(e.expected_lambda == QR(make_rational(32, 243)));
    CHECK(e.expected_density == QR(make_rational(64, 81)));
    CHECK(eval_poly<QR>(e.pattern, std::span<const QR>(e.expected_weights)) ==
          e.expected_lambda);

    // zero-pivot face: only {223} survives, max of x2^2*x3/2 is 2/27 at (2/3, 1/3)
    OptConfig cfg = quick();
    cfg.exact_mode = true;
    const LagrangianRecord face = lagrangian(Pattern(3, 3, {{2, 2, 3}}), cfg);
    REQUIRE(face.certified);
    CHECK(face.certified->value == make_rational(2, 27));
    CHECK(face.witness[1] == doctest::Approx(2.0 / 3.0).epsilon(1e-10));
    CHECK(face.witness[2] == doctest::Approx(1.0 / 3.0).epsilon(1e-10));
    CHECK(face.value < 32.0 / 243.0);
}

TEST_CASE("family entries: structure") {
    const CatalogEntry e2 = entry_family(2);
    std::vector<Edge> want = {{1, 2, 3}, {1, 2, 2}, {1, 3, 3}, {1, 1, 2}, {1, 1, 3}};
    std::sort(want.begin(), want.end());
    CHECK(e2.pattern.edges == want);

    // n = 1: no 3-subsets, identical to the lemma44 pattern
    CHECK(isomorphic(entry_family(1).pattern, entry_lemma44().pattern));
    CHECK(entry_family(1).expected_lambda == QR(make_rational(1, 8)));

    CHECK_THROWS_AS(entry_family(0), std::invalid_argument);
}

TEST_CASE("family entries: closed forms at perfect squares") {
    CHECK(entry_family(2).expected_lambda == QR(make_rational(1, 8)));
    CHECK(entry_family(2).expected_weights[0] == QR(make_rational(1, 2)));
    CHECK(entry_family(2).expected_weights[1] == QR(make_rational(1, 4)));

    const CatalogEntry e6 = entry_family(6);  // k = 4
    CHECK(e6.expected_lambda == QR(make_rational(7, 50)));
    CHECK(e6.expected_density == QR(make_rational(21, 25)));
    CHECK(e6.expected_density.value() == doctest::Approx(0.84).epsilon(1e-15));
}

TEST_CASE("family_density closed form") {
    CHECK(family_density(1) == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(family_density(2) == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(family_density(6) == doctest::Approx(0.84).epsilon(1e-15));
    for (int n = 1; n <= 12; ++n)
        CHECK(family_density(n) ==
              doctest::Approx(6.0 * entry_family(n).expected_lambda.value()).epsilon(1e-15));
    CHECK_THROWS_AS(family_density(0), std::invalid_argument);
}

TEST_CASE("weight/value consistency is exact for n = 1..12") {
    for (int n = 1; n <= 12; ++n) {
        const CatalogEntry e = entry_family(n);
        CHECK(eval_poly<QR>(e.pattern, std::span<const QR>(e.expected_weights)) ==
              e.expected_lambda);
        CHECK(e.expected_density == QR(Rational(6)) * e.expected_lambda);
    }
}

TEST_CASE("closed-form weights are critical points: kkt <= 1e-10 for n = 1..12") {
    for (int n = 1; n <= 12; ++n) {
        const CatalogEntry e = entry_family(n);
        std::vector<double> w(e.expected_weights.size());
        for (std::size_t i = 0; i < w.size(); ++i) w[i] = e.expected_weights[i].value();
        CHECK(kkt_residual(e.pattern, w) <= 1e-10);
    }
}

TEST_CASE("structural condition holds on every family member") {
    for (int n = 1; n <= 12; ++n)
        CHECK(pivot_core_witness(entry_family(n).pattern, 1) == 2);
}

TEST_CASE("zero-pivot face is strictly dominated for n = 1..12") {
    for (int n = 1; n <= 12; ++n) {
        // with the pivot at zero only the 3-subsets of the other n vertices
        // survive: value C(n,3)/n^3 at the uniform point
        const double face = (n >= 3)
                                ? static_cast<double>(n) * (n - 1) * (n - 2) / 6.0 /
                                      (static_cast<double>(n) * n * n)
                                : 0.0;
        CHECK(face < entry_family(n).expected_lambda.value());
    }
}

TEST_CASE("strict family variant misses the structural core") {
    for (int n = 1; n <= 4; ++n) {
        const Pattern strict = family_member_pattern_strict(n);
        CHECK(!pivot_core_witness(strict, 1));
        CHECK(strict.edge_count() < entry_family(n).pattern.edge_count());
    }
}

TEST_CASE("verify_entry passes on the rational-valued entries") {
    for (const CatalogEntry& e : {entry_lemma44(), entry_thm16()}) {
        const VerifyReport report = verify_entry(e, quick());
        for (const auto& check : report.checks) {
            INFO(report.entry_name, ": ", check.name, " ", check.detail);
            CHECK(check.pass);
        }
        CHECK(report.all_pass());
        CHECK(report.certificate.status == NonJumpCertificate::Status::exact_certified);
    }
}

TEST_CASE("verify_entry passes on an irrational family member") {
    const VerifyReport report = verify_entry(entry_family(3), quick());  // k = sqrt(7)
    for (const auto& check : report.checks) {
        INFO(check.name, " ", check.detail);
        CHECK(check.pass);
    }
    CHECK(report.certificate.status == NonJumpCertificate::Status::numeric_evidence);
}
