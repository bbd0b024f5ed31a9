#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "aoi/studies.hpp"
#include "test_models.hpp"

using aoi::EpidemicModel;
using aoi::SolverConfig;
using Catch::Approx;
namespace studies = aoi::studies;

TEST_CASE("experimental orders") {
    SECTION("synthetic first-order data gives exactly one") {
        const std::vector<std::pair<double, double>> pairs{
            {0.2, 0.2 * 3.0}, {0.1, 0.1 * 3.0}, {0.05, 0.05 * 3.0}};
        const auto orders = studies::experimental_order(pairs);
        REQUIRE(orders.size() == 2);
        REQUIRE(*orders[0] == Approx(1.0).epsilon(1e-12));
        REQUIRE(*orders[1] == Approx(1.0).epsilon(1e-12));
    }
    SECTION("published error magnitudes give the published orders") {
        const std::vector<std::pair<double, double>> pairs{
            {1e-1, 1.17e-1}, {1e-2, 1.46e-2}, {1e-3, 1.49e-3}};
        const auto orders = studies::experimental_order(pairs);
        REQUIRE(*orders[0] == Approx(0.90).margin(0.005));
        REQUIRE(*orders[1] == Approx(0.99).margin(0.005));
    }
    SECTION("zero errors flag the order as undefined") {
        const auto orders =
            studies::experimental_order({{0.1, 0.0}, {0.01, 0.0}});
        REQUIRE_FALSE(orders[0].has_value());
    }
    SECTION("input validation") {
        REQUIRE_THROWS_AS(studies::experimental_order({{0.1, 1.0}}),
                          std::invalid_argument);
        REQUIRE_THROWS_AS(studies::experimental_order({{0.1, 1.0}, {0.2, 0.5}}),
                          std::invalid_argument);
    }
}

TEST_CASE("errors against a nested reference") {
    SECTION("constant problem has zero error") {
        EpidemicModel m = testmodels::test1();
        m.S0 = m.N;
        const auto err = studies::error_vs_reference(m, 0.1, 0.01, 1.0);
        REQUIRE(err.err_s == 0.0);
        REQUIRE(err.err_phi == 0.0);
    }
    SECTION("non-nested meshes are rejected") {
        REQUIRE_THROWS_AS(
            studies::error_vs_reference(testmodels::test1(), 0.1, 0.03, 1.0),
            std::invalid_argument);
        REQUIRE_THROWS_AS(
            studies::error_vs_reference(testmodels::test1(), 0.1, 0.2, 1.0),
            std::invalid_argument);
    }
    SECTION("error magnitudes at h = 0.01 against frozen measurements") {
        const auto err =
            studies::error_vs_reference(testmodels::test1(), 1e-2, 1e-4, 1.0);
        REQUIRE(err.err_s == Approx(5.026e-2).epsilon(0.01));
        REQUIRE(err.err_phi == Approx(3.908e-2).epsilon(0.01));
    }
}

TEST_CASE("convergence table on the power-law problem") {
    const auto rows = studies::convergence_table(testmodels::test1(),
                                                 {1e-1, 1e-2}, 1e-4, 1.0);
    REQUIRE(rows.size() == 2);
    REQUIRE(rows[0].h == 0.1);
    REQUIRE_FALSE(rows[0].ord_s.has_value());
    REQUIRE(rows[1].ord_s.has_value());
    REQUIRE(*rows[1].ord_s == Approx(0.90).margin(0.05));
    REQUIRE(*rows[1].ord_phi == Approx(0.91).margin(0.05));
    REQUIRE(rows[0].err_s_rel > 0.0);
    REQUIRE(rows[0].err_s_rel < rows[0].err_s_abs); // S scale is about 9

    // the published magnitudes are matched within a factor of two under
    // the pointwise-relative norm
    REQUIRE(rows[0].err_s_rel > 1.17e-1 / 2.0);
    REQUIRE(rows[0].err_s_rel < 1.17e-1 * 2.0);
    REQUIRE(rows[1].err_s_rel > 1.46e-2 / 2.0);
    REQUIRE(rows[1].err_s_rel < 1.46e-2 * 2.0);
}

TEST_CASE("final size sweep") {
    SECTION("disease-free sweep returns N for every h") {
        EpidemicModel m = testmodels::test2();
        m.S0 = m.N;
        SolverConfig base;
        base.t_max = 40.0;
        const auto sweep = studies::final_size_sweep(m, {0.5, 0.1}, base);
        for (const auto& row : sweep.rows) {
            REQUIRE(row.s_inf_h.has_value());
            REQUIRE(*row.s_inf_h == m.N);
        }
    }
    SECTION("gaussian problem reproduces the published final sizes") {
        SolverConfig base;
        base.t_max = 40.0;
        const auto sweep =
            studies::final_size_sweep(testmodels::test2(), {0.1, 0.01}, base);
        REQUIRE(sweep.rows[0].s_inf_h.has_value());
        REQUIRE(*sweep.rows[0].s_inf_h == Approx(2.3211e4).epsilon(0.01));
        REQUIRE(*sweep.rows[1].s_inf_h == Approx(1.8852e4).epsilon(0.01));
        REQUIRE(sweep.s_inf_relation.has_value());
        REQUIRE(*sweep.s_inf_relation == Approx(18388.676349184693).margin(0.01));
    }
    SECTION("horizon doubling rescues a short initial horizon") {
        SolverConfig base;
        base.t_max = 6.0; // detection fails here, succeeds after doubling
        const auto sweep = studies::final_size_sweep(testmodels::test2(), {0.1}, base);
        REQUIRE(sweep.rows[0].s_inf_h.has_value());
        REQUIRE(sweep.rows[0].t_max_used > 6.0);
    }
}

TEST_CASE("scheme comparison") {
    SECTION("large-step gaussian problem separates the schemes") {
        SolverConfig c;
        c.h = 0.5;
        c.t_max = 40.0;
        const auto cmp = studies::scheme_comparison(testmodels::test2(6e-5), c);
        REQUIRE(cmp.nsfd_violations.empty());
        REQUIRE_FALSE(cmp.trapezoidal_violations.empty());
    }
    SECTION("disease-free problem is clean under both schemes") {
        EpidemicModel m = testmodels::test1();
        m.S0 = m.N;
        SolverConfig c;
        c.h = 0.5;
        c.t_max = 20.0;
        const auto cmp = studies::scheme_comparison(m, c);
        REQUIRE(cmp.nsfd_violations.empty());
        REQUIRE(cmp.trapezoidal_violations.empty());
    }
    SECTION("fine meshes agree across schemes") {
        SolverConfig c;
        c.h = 1e-3;
        c.t_max = 1.0;
        c.detect_steady_state = false;
        const auto cmp = studies::scheme_comparison(testmodels::test1(), c);
        REQUIRE(cmp.nsfd_violations.empty());
        REQUIRE(cmp.trapezoidal_violations.empty());
        double max_diff = 0.0;
        for (std::size_t i = 0; i < cmp.nsfd.times.size(); ++i) {
            max_diff = std::max(max_diff,
                                std::abs(cmp.nsfd.S[i] - cmp.trapezoidal.S[i]));
            max_diff = std::max(max_diff,
                                std::abs(cmp.nsfd.phi[i] - cmp.trapezoidal.phi[i]));
        }
        REQUIRE(max_diff <= 1e-2);
    }
}
