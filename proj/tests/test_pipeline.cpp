#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "entsim/csv.hpp"
#include "entsim/pipeline.hpp"

using namespace entsim;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const char* tag) {
    const fs::path p = fs::temp_directory_path() / (std::string("entsim_test_") + tag);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

} // namespace

TEST_CASE("the default prediction is frozen") {
    const auto ps = predict_state(default_config());
    CHECK(ps.metrics.fidelity == doctest::Approx(0.9877846905).epsilon(1e-6));
    CHECK(ps.target == Bell::PsiMinus);
    CHECK(ps.heralding_transmission < 0.1); // narrowband filters are lossy
}

TEST_CASE("removing the filters drops the predicted fidelity to the raw overlap") {
    SourceConfig cfg = default_config();
    cfg.filters.reset();
    const auto ps = predict_state(cfg);
    CHECK(std::abs(ps.metrics.fidelity - 0.71) < 0.03);
    CHECK(ps.heralding_transmission == 1.0);

    const auto filtered = predict_state(default_config());
    CHECK(filtered.coherence_factor >= ps.coherence_factor);
    CHECK(filtered.spectral_exchange_overlap >= ps.spectral_exchange_overlap);
}

TEST_CASE("prediction metrics are internally consistent") {
    for (const bool with_filters : {true, false}) {
        SourceConfig cfg = default_config();
        if (!with_filters) cfg.filters.reset();
        const auto ps = predict_state(cfg);

        CHECK(std::abs(ps.metrics.werner_s - werner_s_from_fidelity(ps.metrics.fidelity)) < 1e-12);
        const auto& m = ps.rho.elements();
        CHECK(std::abs(ps.metrics.visibility - 2.0 * std::abs(m(1, 2))) < 1e-12);
        CHECK(ps.metrics.s_optimal >= ps.metrics.s_fixed - 1e-9);

        const double product =
            ps.spectral_exchange_overlap * ps.interguide_overlap * ps.residual_factor;
        CHECK(std::abs(ps.coherence_factor - std::clamp(product, 0.0, 1.0)) < 1e-12);
        CHECK(ps.residual_factor == 1.0); // derived fiber cancels the walk-off exactly
        CHECK_NOTHROW(ps.rho.validate());
    }
}

TEST_CASE("an ideal symmetric cw source predicts a pure bell state") {
    SourceConfig cfg = default_config();
    cfg.splitter = SplitterParams{1.0, 0.0};
    cfg.pm_wg2 = cfg.pm_wg1;
    cfg.pump.regime = PumpConfig::Regime::Cw;
    cfg.pump.bandwidth_fwhm = 0.0;
    cfg.filters.reset();
    const auto ps = predict_state(cfg);
    CHECK(ps.target == Bell::PsiMinus);
    CHECK(ps.metrics.fidelity >= 1.0 - 1e-5);
    CHECK(ps.interguide_overlap == doctest::Approx(1.0).epsilon(1e-12));

    cfg.pump.phase = M_PI;
    const auto flipped = predict_state(cfg);
    CHECK(flipped.target == Bell::PsiPlus);
    CHECK(flipped.metrics.fidelity >= 1.0 - 1e-5);
}

TEST_CASE("scenario catalog exposes ten runnable entries") {
    const auto& names = scenario_names();
    REQUIRE(names.size() == 10);
    CHECK(names.back() == "full_paper_table");
    CHECK_THROWS_AS(run_scenario("no_such_scenario", default_config(), RunOptions{}),
                    std::invalid_argument);
}

TEST_CASE("the walkoff scenario passes without touching the filesystem") {
    const auto res = run_scenario("walkoff_budget", default_config(), RunOptions{});
    CHECK(res.passed());
    CHECK(!res.checks.empty());
    CHECK(res.elapsed_seconds >= 0.0);
    for (const auto& row : res.checks) {
        CHECK(!row.id.empty());
        CHECK(!row.description.empty());
    }
}

TEST_CASE("the reference manifest matches the checked-in copy") {
    std::ifstream in(std::string(ENTSIM_REPO_DIR) + "/configs/paper_values.json");
    REQUIRE(in.good());
    nlohmann::json checked_in;
    in >> checked_in;
    CHECK(reference_manifest() == checked_in);
}

TEST_CASE("scenario artifacts are byte-deterministic") {
    const auto d1 = fresh_dir("det1");
    const auto d2 = fresh_dir("det2");
    RunOptions o1, o2;
    o1.out_dir = d1.string();
    o2.out_dir = d2.string();
    const auto r1 = run_scenario("splitter_sweep", default_config(), o1);
    const auto r2 = run_scenario("splitter_sweep", default_config(), o2);
    CHECK(r1.passed());
    CHECK(r2.passed());
    for (const char* name : {"surface_phi0.csv", "surface_phipi.csv", "summary.csv"}) {
        const auto a = csv::read_text_file((d1 / "splitter_sweep" / name).string());
        const auto b = csv::read_text_file((d2 / "splitter_sweep" / name).string());
        CHECK(a == b);
        CHECK(!a.empty());
    }
    fs::remove_all(d1);
    fs::remove_all(d2);
}

TEST_CASE("csv round trips preserve records and matrices exactly") {
    const auto dir = fresh_dir("csvrt");

    const auto truth = DensityMatrix2Q::werner(0.93);
    const auto records = simulate_counts(truth, tomography_settings_16(), 1e5, 31337);
    const auto rpath = (dir / "records.csv").string();
    csv::write_records(rpath, records);
    const auto back = csv::read_records(rpath);
    REQUIRE(back.size() == records.size());
    for (std::size_t k = 0; k < records.size(); ++k) {
        CHECK(back[k].counts == records[k].counts);
        CHECK(back[k].integration_seconds == records[k].integration_seconds);
        CHECK(back[k].setting.label_a == records[k].setting.label_a);
        CHECK(back[k].setting.label_b == records[k].setting.label_b);
        CHECK(back[k].setting.hwp_a_deg == records[k].setting.hwp_a_deg);
        CHECK(back[k].setting.qwp_b_deg == records[k].setting.qwp_b_deg);
    }

    const auto mpath = (dir / "rho.csv").string();
    csv::write_density_matrix(mpath, truth);
    const Mat4c m = csv::read_density_matrix_elements(mpath);
    CHECK((m - truth.elements()).cwiseAbs().maxCoeff() == 0.0);

    const auto jsa = build_jsa(default_config().pm_wg1, default_config().pump,
                               GridSpec{1554.44, 2.0, 128});
    const auto jpath = (dir / "jsa.csv").string();
    csv::write_jsa(jpath, jsa);
    const auto jback = csv::read_jsa(jpath);
    REQUIRE(jback.n() == jsa.n());
    double max_diff = 0.0;
    for (int i = 0; i < jsa.n(); ++i)
        for (int j = 0; j < jsa.n(); ++j)
            max_diff = std::max(max_diff, std::abs(jback.at(i, j) - jsa.at(i, j)));
    CHECK(max_diff < 1e-8);

    fs::remove_all(dir);
}

TEST_CASE("scenario json reports every check with its verdict") {
    const auto res = run_scenario("shg_overlap", default_config(), RunOptions{});
    const auto doc = scenario_to_json(res);
    CHECK(doc.at("scenario") == "shg_overlap");
    CHECK(doc.at("passed") == res.passed());
    REQUIRE(doc.at("checks").size() == res.checks.size());
    for (const auto& row : doc.at("checks")) {
        CHECK(row.contains("id"));
        CHECK(row.contains("computed"));
        CHECK(row.contains("pass"));
    }
}
