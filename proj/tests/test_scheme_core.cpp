#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "fixtures.hpp"
#include "pensionlab/config.hpp"
#include "pensionlab/errors.hpp"
#include "pensionlab/scheme_core.hpp"

using namespace pensionlab;
using doctest::Approx;

TEST_CASE("annual_devaluation examples") {
    CHECK(annual_devaluation(0.025, 0.005, 0.025) == Approx(0.004878).epsilon(1e-4));
    CHECK(annual_devaluation(0.025, 0.0059, 0.028) == Approx(0.008658).epsilon(1e-4));
    CHECK(annual_devaluation(0.025, 0.005, 0.028) == Approx(0.007782).epsilon(1e-4));
    CHECK(std::abs(annual_devaluation(0.025, 0.025 - 0.03, 0.03)) < 1e-15);
    CHECK(annual_devaluation(0.025, 0.0, 0.02) < 0);  // unclamped
    CHECK_THROWS_AS(annual_devaluation(NAN, 0, 0.02), ValidationError);
    CHECK_THROWS_AS(annual_devaluation(0.025, 0, -1.0), ValidationError);
}

TEST_CASE("implied_adjustment examples and round trip") {
    CHECK(implied_adjustment(0.025, 0.0058, 0.025) == Approx(0.005945).epsilon(1e-4));
    CHECK(implied_adjustment(0.025, 0, 0.025) == Approx(0.0).epsilon(1e-15));
    CHECK(implied_adjustment(0.025, annual_devaluation(0.025, 0.005, 0.03), 0.03) == Approx(0.005).epsilon(1e-12));
    CHECK_THROWS_AS(implied_adjustment(0.025, 1.0, 0.025), ValidationError);

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0, 0.05);
    for (int i = 0; i < 1000; ++i) {
        double h = u(rng), a = u(rng) * 0.2, c = u(rng);
        CHECK(std::abs(implied_adjustment(h, annual_devaluation(h, a, c), c) - a) < 1e-12);
    }
}

TEST_CASE("annual_devaluation monotonicity on a grid") {
    for (int i = 0; i < 100; ++i) {
        double x = 0.001 + 0.0004 * i, dx = 1e-4;
        CHECK(annual_devaluation(0.025, 0.005, x + dx) > annual_devaluation(0.025, 0.005, x));
        CHECK(annual_devaluation(x + dx, 0.005, 0.028) < annual_devaluation(x, 0.005, 0.028));
        CHECK(annual_devaluation(0.025, x + dx, 0.028) > annual_devaluation(0.025, x, 0.028));
    }
}

TEST_CASE("capped_uplift") {
    CapRule soft = CapRule::soft();
    CapRule hard = CapRule::hard(0.025);
    CHECK(capped_uplift(0.03, soft) == Approx(0.03));
    CHECK(capped_uplift(0.08, soft) == Approx(0.065));
    CHECK(capped_uplift(0.20, soft) == Approx(0.10));
    CHECK(capped_uplift(0.15, soft) == Approx(0.10));
    CHECK(capped_uplift(0.03, hard) == Approx(0.025));
    CHECK(capped_uplift(0.01, hard) == Approx(0.01));
    CHECK(capped_uplift(-0.02, soft) == 0.0);
    CHECK(capped_uplift(-0.02, hard) == 0.0);
    CHECK_THROWS_AS(capped_uplift(-1.5, soft), ValidationError);

    SUBCASE("bounded, monotone and continuous") {
        for (const CapRule& r : {soft, hard}) {
            double prev = capped_uplift(0, r);
            for (int i = 1; i <= 3000; ++i) {
                double cpi = i * 1e-4;
                double u = capped_uplift(cpi, r);
                CHECK(u >= prev);
                CHECK(u - prev < 1e-3);
                if (r.kind == CapRule::Kind::Soft) CHECK(u <= std::min(cpi, 0.10) + 1e-15);
                prev = u;
            }
        }
    }
}

TEST_CASE("erosion_factor and average_retirement_erosion") {
    CHECK(erosion_factor(0.005, 40) == Approx(0.8183).epsilon(1e-4));
    CHECK(erosion_factor(0.008, 60) == Approx(0.61759).epsilon(1e-4));
    CHECK(erosion_factor(0.3, 0) == 1.0);
    CHECK_THROWS_AS(erosion_factor(1.0, 3), ValidationError);
    CHECK_THROWS_AS(erosion_factor(0.01, -1), ValidationError);
    for (int m = 0; m < 30; ++m)
        for (int n = 0; n < 30; n += 7)
            CHECK(std::abs(erosion_factor(0.0087, m + n) - erosion_factor(0.0087, m) * erosion_factor(0.0087, n)) < 1e-12);

    CHECK(average_retirement_erosion(0.005) == Approx(0.2214).epsilon(1e-3));
    CHECK(std::round(100 * average_retirement_erosion(0.0087)) == 35);
    CHECK(average_retirement_erosion(0) == 0.0);
    // hand sum: (1 + 0.9 + 0.81) / 3
    CHECK(average_retirement_erosion(0.1, 0, 2) == Approx(1 - 2.71 / 3));
}

TEST_CASE("accrual_only_reduction") {
    CHECK(accrual_only_reduction(75, 85) == Approx(0.117647).epsilon(1e-5));
    CHECK(accrual_only_reduction(75, 75) == 0.0);
    CHECK(accrual_only_reduction(85, 75) == Approx(-0.133333).epsilon(1e-5));
    CHECK_THROWS_AS(accrual_only_reduction(0, 85), ValidationError);
}

TEST_CASE("monte_carlo_devaluation") {
    for (double c : {0.0, 0.01, 0.02, 0.025, 0.03, 0.045})
        CHECK(std::abs(monte_carlo_devaluation(0.025, c, 0, 10, 10, 1) - std::max(0.0, 1 - 1.025 / (1 + c))) < 1e-12);
    CHECK(monte_carlo_devaluation(0.025, 0.03, 0, 5, 5, 9) == Approx(0.004854).epsilon(1e-3));

    double a = monte_carlo_devaluation(0.025, 0.025, 0.01, 40, 500, 42);
    double b = monte_carlo_devaluation(0.025, 0.025, 0.01, 40, 500, 42);
    CHECK(a == b);

    // frozen sigma* reproduces d = 0.5%
    double d = monte_carlo_devaluation(0.025, 0.025, fixtures::kSigmaStarSeeded, 40, 5000, fixtures::kMcSeed);
    CHECK(d == Approx(0.005).epsilon(2e-3));
    double dq = monte_carlo_devaluation(0.025, 0.025, fixtures::kSigmaStarQuadrature, 40, 5000, fixtures::kMcSeed);
    CHECK(std::abs(dq - 0.005) < 1e-4);

    CHECK_THROWS_AS(monte_carlo_devaluation(0.025, 0.025, -1, 1, 1, 1), ValidationError);
    CHECK_THROWS_AS(monte_carlo_devaluation(0.025, 0.025, 0.01, 0, 1, 1), ValidationError);
    CHECK_THROWS_AS(monte_carlo_devaluation(0.025, 0.025, 0.01, 1, 0, 1), ValidationError);
}

TEST_CASE("devaluation bases") {
    EconomicAssumptions a;
    a.cpi_mean = 0.025;
    a.devaluation_basis = DevaluationBasis::UukPublished;
    CHECK(a.devaluation(0.025) == 0.005);
    a.cpi_mean = 0.028;
    CHECK(a.devaluation(0.025) == 0.008);
    a.cpi_mean = 0.03;
    CHECK(a.devaluation(0.025) == Approx(annual_devaluation(0.025, 0.005, 0.03)));
    a.devaluation_basis = DevaluationBasis::UssImplied;
    a.cpi_mean = 0.025;
    CHECK(a.devaluation(0.025) == Approx(0.00576).epsilon(1e-3));
    a.devaluation_basis = DevaluationBasis::Formula;
    a.cpi_mean = 0.02;
    CHECK(a.devaluation(0.025) == 0.0);  // clamped
    a.devaluation_basis = DevaluationBasis::Fixed;
    a.fixed_devaluation = 0.011;
    CHECK(a.devaluation(0.025) == 0.011);

    SchemeRules soft = PresetRegistry::bundled().get("uss2021");
    a.devaluation_basis = DevaluationBasis::Formula;
    a.cpi_mean = 0.05;
    CHECK(tranche_devaluation(soft, a) == 0.0);
    CHECK(threshold_devaluation(soft, a) == 0.0);
}

TEST_CASE("validation") {
    CapRule bad = CapRule::soft(0.2, 0.1, 0.3);
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    CHECK_THROWS_AS(CapRule::hard(-0.01).validate(), ValidationError);
    CHECK_THROWS_AS(CapRule::hard(0.025, -1).validate(), ValidationError);

    SchemeRules r = PresetRegistry::bundled().get("uuk2021");
    r.accrual_denominator = 0;
    CHECK_THROWS_AS(r.validate(), ValidationError);
    r = PresetRegistry::bundled().get("uuk2021");
    r.employer_rate = 1.2;
    CHECK_THROWS_AS(r.validate(), ValidationError);

    EconomicAssumptions a;
    a.cpi_mean = 0.09;
    CHECK_THROWS_AS(a.validate(), ValidationError);
    a.cpi_mean = 0.025;
    a.annuity_factor = 10;
    CHECK_THROWS_AS(a.validate(), ValidationError);
}

TEST_CASE("bundled presets") {
    const auto& reg = PresetRegistry::bundled();
    REQUIRE(reg.all().size() == 4);
    const auto& uss = reg.get("uss2021");
    CHECK(uss.accrual_denominator == 75);
    CHECK(uss.db_dc_threshold == 60000);
    CHECK(uss.cap_rule.kind == CapRule::Kind::Soft);
    CHECK(uss.threshold_indexation == ThresholdIndexation::FullCPI);
    CHECK(uss.employer_rate == Approx(0.211));
    CHECK(uss.member_rate == Approx(0.091));
    const auto& acas = reg.get("acas2018");
    CHECK(acas.accrual_denominator == 85);
    CHECK(acas.db_dc_threshold == 42000);
    CHECK(acas.cap_rule.cap == Approx(0.025));
    CHECK(acas.employer_rate == Approx(0.193));
    CHECK(acas.member_rate == Approx(0.087));
    const auto& uuk = reg.get("uuk2021");
    CHECK(uuk.db_dc_threshold == 40000);
    CHECK(uuk.cap_rule.delay_years == 0);
    const auto& adj = reg.get("uuk2022_adjusted");
    CHECK(adj.cap_rule.kind == CapRule::Kind::Hard);
    CHECK(adj.cap_rule.delay_years == 2);
    CHECK(adj.employer_rate == Approx(0.213));
    CHECK_THROWS_AS(reg.get("nope"), ValidationError);
}

TEST_CASE("assumption profiles") {
    const auto& p = AssumptionProfiles::bundled();
    auto pub = p.get(kPublishedProfile, 0.028);
    CHECK(pub.cpi_mean == 0.028);
    CHECK(pub.annuity_factor == 40);
    CHECK(pub.salary_growth == Approx(0.04));
    CHECK(pub.dc_growth == Approx(0.0477));
    CHECK(pub.pre_reform_years == 0);
    auto mod = p.get(kModellerProfile, 0.025);
    CHECK(mod.annuity_factor == fixtures::kCalibratedAnnuityFactor);
    CHECK(mod.pre_reform_years == 1);
    CHECK(mod.devaluation_basis == DevaluationBasis::UukPublished);
}

TEST_CASE("config parser errors") {
    std::istringstream missing("[x]\naccrual_denominator = 75\n");
    CHECK_THROWS_AS(PresetRegistry::from_config(parse_config(missing)), ParseError);
    std::istringstream orphan("key = 1\n");
    CHECK_THROWS_AS(parse_config(orphan), ParseError);
    std::istringstream badnum(
        "[x]\naccrual_denominator = seventy\ndb_dc_threshold = 1\nthreshold_indexation = full_cpi\ncap = soft\n");
    CHECK_THROWS_AS(PresetRegistry::from_config(parse_config(badnum)), ParseError);
}
