#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "orbitlab/experiments.hpp"

using namespace orbitlab;

namespace {

json torus_cfg() {
    return json{{"primes", {2, 3}}, {"N", 4}};
}

} // namespace

TEST_CASE("config validation: unknown experiment, missing keys, bad hypothesis") {
    RunOptions opts;
    CHECK_THROWS_AS(run_experiment("no-such-thing", json::object(), opts), ConfigError);
    CHECK_THROWS_AS(run_experiment("torus-nondensity", json::object(), opts), ConfigError);
    json bad = torus_cfg();
    bad["N"] = 3;
    bad["eps"] = "1e-3";
    CHECK_THROWS_WITH_AS(run_experiment("torus-nondensity", bad, opts),
                         doctest::Contains("smallest admissible N is 4"), ConfigError);
    json one_prime{{"primes", {2}}, {"N", 4}, {"eps", "1e-3"}};
    CHECK_THROWS_AS(run_experiment("torus-nondensity", one_prime, opts), ConfigError);
}

TEST_CASE("sampling experiments demand a seed") {
    RunOptions opts;
    CHECK_THROWS_WITH_AS(run_experiment("su-verify", json{{"n", 4}, {"samples", 2}}, opts),
                         doctest::Contains("seed"), ConfigError);
    CHECK_THROWS_AS(run_experiment("density-probe", json{{"targets", 1}}, opts), ConfigError);
}

TEST_CASE("torus experiments run end to end with small parameters") {
    RunOptions opts;
    opts.workers = 2;
    json cfg = torus_cfg();
    cfg["eps"] = "1e-3";
    cfg["window"] = 1;
    RunResult res = run_experiment("torus-nondensity", cfg, opts);
    CHECK(res.exit_code == 0);
    CHECK(res.record["status"] == "certified");
    CHECK(res.record["payload"]["L"] == "51");
    CHECK(res.record["payload"]["checked_count"] == 105);

    json icfg = torus_cfg();
    icfg["H"] = 2;
    RunResult ires = run_experiment("torus-independence", icfg, opts);
    CHECK(ires.exit_code == 0);
    CHECK(ires.record["payload"]["checked_count"] == 3124);

    icfg["plant"] = {{"coordinate", 0}, {"value", "1/2"}};
    RunResult planted = run_experiment("torus-independence", icfg, opts);
    CHECK(planted.exit_code == 1);
    CHECK(planted.record["status"] == "failed");
    CHECK(planted.record["payload"].contains("counterexample"));
}

TEST_CASE("row emission produces a header and one row per sample") {
    RunOptions opts;
    opts.emit_rows = true;
    json cfg = torus_cfg();
    cfg["eps"] = "1e-3";
    cfg["window"] = 0;
    RunResult res = run_experiment("torus-nondensity", cfg, opts);
    REQUIRE_FALSE(res.csv_rows.empty());
    CHECK(res.csv_rows[0] == "experiment,label,params,value_lo,value_hi,status");
    CHECK(res.csv_rows.size() == 1 + 52);

    json icfg = torus_cfg();
    icfg["H"] = 1;
    RunResult ires = run_experiment("torus-independence", icfg, opts);
    CHECK(ires.csv_rows.size() == 1 + 242); // 3^5 - 1 candidates
}

TEST_CASE("su experiments: deterministic reports modulo timing") {
    RunOptions opts;
    json cfg{{"n", 4}, {"samples", 5}, {"word_length", 4}, {"seed", 12345}};
    RunResult a = run_experiment("su-verify", cfg, opts);
    RunResult b = run_experiment("su-verify", cfg, opts);
    CHECK(a.exit_code == 0);
    CHECK(a.record["status"] == "certified");
    ojson ra = a.record, rb = b.record;
    ra.erase("timing");
    rb.erase("timing");
    CHECK(ra.dump() == rb.dump());

    json icfg{{"n1", 3}, {"n2", 3}, {"samples", 4}, {"seed", 99}};
    RunResult inc = run_experiment("su-inclusion", icfg, opts);
    CHECK(inc.exit_code == 0);
    CHECK(inc.record["payload"]["passed"] == 4);
}

TEST_CASE("systole experiment over the text interface") {
    RunOptions opts;
    json cfg{{"lattice", {{2, 0}, {"1/3", "1/2"}}}};
    RunResult res = run_experiment("systole", cfg, opts);
    CHECK(res.exit_code == 0);
    CHECK(res.record["payload"]["length_lo"] == "0.5");
    CHECK(res.record["payload"]["length_hi"] == "0.5");
    CHECK_THROWS_AS(run_experiment("systole", json::object(), opts), ConfigError);
}

TEST_CASE("compact orbit experiment certifies a positive minimum") {
    RunOptions opts;
    opts.workers = 2;
    json cfg{{"field", "sqrt2"}, {"grid", {6}}};
    RunResult res = run_experiment("compact-orbit", cfg, opts);
    CHECK(res.exit_code == 0);
    CHECK(res.record["status"] == "certified");
    CHECK(parse_rational(res.record["payload"]["min_systole_lower"].get<std::string>()) >
          BigRational(0));
}

TEST_CASE("density probe is reported statistical with decreasing series") {
    RunOptions opts;
    opts.workers = 2;
    json cfg{{"field", "cubic-disc81"}, {"targets", 2}, {"seed", 7},
             {"levels", {3, 5}}, {"log_range", "1"}};
    RunResult res = run_experiment("density-probe", cfg, opts);
    CHECK(res.exit_code == 0);
    CHECK(res.record["status"] == "statistical");
    CHECK(res.record["payload"]["weakly_decreasing"] == true);
}

TEST_CASE("catalog round-trips through the file format") {
    for (const auto& spec : builtin_catalog()) {
        FieldSpec back = field_spec_from_json(field_spec_to_json(spec));
        CHECK(back.label == spec.label);
        CHECK(back.poly == spec.poly);
        CHECK(back.units == spec.units);
    }
    CHECK_THROWS_AS(resolve_field("nonexistent", {}), ConfigError);
    CHECK(resolve_field("cubic-disc81", {}).poly.size() == 4);
}
