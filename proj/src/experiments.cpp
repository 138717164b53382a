#include "orbitlab/experiments.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <functional>
#include <sstream>

#include "orbitlab/homogeneous.hpp"
#include "orbitlab/torus.hpp"

namespace orbitlab {

namespace {

std::string now_iso8601() {
    auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

const json& require(const json& cfg, const char* key) {
    if (!cfg.contains(key))
        throw ConfigError(std::string("config: missing required key '") + key + "'");
    return cfg.at(key);
}

BigRational rational_from(const json& j, const char* key) {
    if (j.is_number_integer()) return BigRational(static_cast<long>(j.get<long long>()));
    if (j.is_string()) return parse_rational(j.get<std::string>());
    throw ConfigError(std::string("config: '") + key + "' must be an integer or rational string");
}

BigInt bigint_from(const json& j, const char* key) {
    if (j.is_number_integer()) return BigInt(static_cast<long>(j.get<long long>()));
    if (j.is_string()) return BigInt(j.get<std::string>());
    throw ConfigError(std::string("config: '") + key + "' must be an integer");
}

long long_from(const json& cfg, const char* key, long fallback) {
    if (!cfg.contains(key)) return fallback;
    if (!cfg.at(key).is_number_integer())
        throw ConfigError(std::string("config: '") + key + "' must be an integer");
    return static_cast<long>(cfg.at(key).get<long long>());
}

unsigned long long seed_from(const json& cfg) {
    if (!cfg.contains("seed"))
        throw ConfigError("config: sampling experiments require a 'seed'");
    return cfg.at("seed").get<unsigned long long>();
}

TorusParams torus_params_from(const json& cfg) {
    TorusParams p;
    const json& primes = require(cfg, "primes");
    if (!primes.is_array() || primes.size() < 2)
        throw ConfigError("config: 'primes' must be an array of >= 2 integers");
    for (const auto& v : primes) p.primes.push_back(bigint_from(v, "primes"));
    p.q = static_cast<int>(p.primes.size());
    p.N = bigint_from(require(cfg, "N"), "N");
    try {
        p.validate();
    } catch (const PreconditionViolated& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return p;
}

std::vector<FieldSpec> extra_catalog_from(const json& cfg) {
    if (!cfg.contains("catalog_file")) return {};
    return load_catalog_file(cfg.at("catalog_file").get<std::string>());
}

std::string csv_quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out += "\"";
    return out;
}

void push_row(std::vector<std::string>& rows, const std::string& experiment,
              const std::string& label, const std::string& params, const std::string& lo,
              const std::string& hi, const std::string& status) {
    if (rows.empty()) rows.push_back("experiment,label,params,value_lo,value_hi,status");
    rows.push_back(experiment + "," + csv_quote(label) + "," + csv_quote(params) + "," + lo + "," +
                   hi + "," + status);
}

std::string elem_label(const SemigroupElement& e) {
    std::string s = "(";
    for (size_t i = 0; i < e.exponents.size(); ++i) {
        if (i) s += ";";
        s += e.exponents[i].to_string();
    }
    return s + ")";
}

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    long long ms() const {
        return std::chrono::duration_cast<std::chrono::milliseconds>(
                   std::chrono::steady_clock::now() - start)
            .count();
    }
};

ojson make_record(const std::string& name, const json& params_echo, const std::string& status,
                  ojson payload, const Timer& timer) {
    ojson rec;
    rec["experiment"] = name;
    rec["params"] = params_echo;
    rec["status"] = status;
    rec["payload"] = std::move(payload);
    rec["prng"] = "mt19937_64";
    rec["version"] = kVersion;
    rec["timing"] = {{"wall_ms", timer.ms()}, {"timestamp_utc", now_iso8601()}};
    return rec;
}

RunResult run_torus_nondensity(const json& cfg, const RunOptions& opts) {
    Timer timer;
    TorusParams params = torus_params_from(cfg);
    BigRational eps = rational_from(require(cfg, "eps"), "eps");
    long window = long_from(cfg, "window", 10);
    NondensityReport rep =
        verify_nondensity(params, eps, window, opts.emit_rows, opts.workers);

    RunResult out;
    if (opts.emit_rows) {
        for (const auto& row : rep.rows) {
            std::ostringstream ps;
            ps << "j=" << row.j << ";bound=" << decimal_string(row.bound, 6)
               << ";K=" << row.K_used;
            push_row(out.csv_rows, "torus-nondensity", elem_label(row.elem), ps.str(), "0",
                     decimal_string(row.frac_plus_tail, 17), "certified");
        }
    }
    ojson payload;
    payload["eps"] = decimal_string(eps, 17);
    payload["L"] = rep.L.to_string();
    payload["window"] = window;
    payload["checked_count"] = rep.checked_count;
    payload["worst_margin"] = decimal_string(rep.worst_margin, 17);
    payload["escalated_count"] = rep.escalated.size();
    ojson esc = ojson::array();
    for (const auto& e : rep.escalated) esc.push_back(elem_label(e));
    payload["escalated"] = esc;
    payload["status"] = rep.all_pass ? "certified" : "failed";
    out.exit_code = rep.all_pass ? 0 : 1;
    out.record = make_record("torus-nondensity", cfg, rep.all_pass ? "certified" : "failed",
                             std::move(payload), timer);
    return out;
}

RunResult run_torus_independence(const json& cfg, const RunOptions& opts) {
    Timer timer;
    TorusParams params = torus_params_from(cfg);
    long H = long_from(cfg, "H", 10);
    long K = long_from(cfg, "K", 0);
    std::map<int, BigRational> overrides;
    if (cfg.contains("plant")) {
        const json& plant = cfg.at("plant");
        overrides[static_cast<int>(require(plant, "coordinate").get<long long>())] =
            rational_from(require(plant, "value"), "plant.value");
    }
    IndependenceResult res = certify_no_relation(params, H, K, overrides, opts.workers);

    RunResult out;
    ojson payload;
    payload["H"] = H;
    payload["K"] = res.K_used;
    payload["checked_count"] = res.checked_count;
    payload["escalated_count"] = res.escalated_count;
    if (res.certified) {
        payload["min_abs_lower_bound"] = decimal_string(res.min_abs_lower_bound, 17);
        payload["status"] = "certified";
    } else {
        ojson cand;
        ojson a = ojson::array(), b = ojson::array();
        for (const auto& v : res.counterexample->a) a.push_back(v.to_string());
        for (const auto& v : res.counterexample->b) b.push_back(v.to_string());
        cand["a"] = a;
        cand["b"] = b;
        cand["c"] = res.counterexample->c.to_string();
        payload["counterexample"] = cand;
        payload["status"] = "failed";
    }

    if (opts.emit_rows) {
        // A separate streaming pass: the certification path batches candidates
        // and keeps no per-candidate data.
        RelationTable table = relation_table(params, res.K_used, overrides);
        const int len = 2 * params.q + 1;
        for (long m = 1; m <= H; ++m) {
            long side = 2 * m + 1;
            unsigned long long count = 1;
            for (int i = 0; i < len; ++i) count *= static_cast<unsigned long long>(side);
            for (unsigned long long idx = 0; idx < count; ++idx) {
                unsigned long long rem = idx;
                std::vector<long> coef(static_cast<size_t>(len));
                bool on_shell = false;
                for (int i = 0; i < len; ++i) {
                    long v = static_cast<long>(rem % static_cast<unsigned long long>(side)) - m;
                    coef[static_cast<size_t>(i)] = v;
                    if (v == m || v == -m) on_shell = true;
                    rem /= static_cast<unsigned long long>(side);
                }
                if (!on_shell) continue;
                BigRational v(0), tail(0);
                for (int j = 0; j < 2 * params.q; ++j) {
                    long cj = coef[static_cast<size_t>(j)];
                    if (cj == 0) continue;
                    v += BigRational(cj) * table.values[static_cast<size_t>(j)];
                    tail += BigRational(std::labs(cj)) * table.tails[static_cast<size_t>(j)];
                }
                v -= BigRational(coef[static_cast<size_t>(len - 1)]);
                std::string label = "(";
                for (int i = 0; i < len; ++i) {
                    if (i) label += ";";
                    label += std::to_string(coef[static_cast<size_t>(i)]);
                }
                label += ")";
                bool nonzero = (v.abs() > tail);
                push_row(out.csv_rows, "torus-independence", label, "",
                         decimal_string(v - tail, 9), decimal_string(v + tail, 9),
                         nonzero ? "certified" : "violation");
            }
        }
    }
    out.exit_code = res.certified ? 0 : 1;
    out.record = make_record("torus-independence", cfg, res.certified ? "certified" : "failed",
                             std::move(payload), timer);
    return out;
}

RunResult run_su_verify(const json& cfg, const RunOptions& opts) {
    Timer timer;
    int n = static_cast<int>(long_from(cfg, "n", 6));
    long samples = long_from(cfg, "samples", 100);
    long word_length = long_from(cfg, "word_length", 8);
    bool twin = !cfg.contains("twin_check") || cfg.at("twin_check").get<bool>();
    std::mt19937_64 rng(seed_from(cfg));

    RunResult out;
    long pass = 0;
    BigRational max_mod(0);
    for (long i = 0; i < samples; ++i) {
        QuarticMatrix g = random_gamma(n, rng, static_cast<int>(word_length));
        SuMembership m = su_membership(g);
        bool ok = m.member;
        if (ok && twin) {
            TwinReport tw = compact_twin_check(pair_form(g));
            ok = tw.relations_ok && tw.bounded;
            BigRational u = tw.max_modulus.upper();
            if (u > max_mod) max_mod = u;
        }
        if (ok) ++pass;
        if (opts.emit_rows)
            push_row(out.csv_rows, "su-verify", "sample" + std::to_string(i),
                     "det=" + m.det.to_string(), ok ? "1" : "0", ok ? "1" : "0",
                     ok ? "certified" : "failed");
    }
    bool all = pass == samples;
    ojson payload;
    payload["n"] = n;
    payload["samples"] = samples;
    payload["passed"] = pass;
    if (twin) payload["max_twin_modulus"] = decimal_string(max_mod, 17);
    out.exit_code = all ? 0 : 1;
    out.record = make_record("su-verify", cfg, all ? "certified" : "failed", std::move(payload), timer);
    return out;
}

RunResult run_su_inclusion(const json& cfg, const RunOptions& opts) {
    Timer timer;
    int n1 = static_cast<int>(long_from(cfg, "n1", 3));
    int n2 = static_cast<int>(long_from(cfg, "n2", 3));
    long samples = long_from(cfg, "samples", 20);
    long k_range = long_from(cfg, "k_range", 3);
    long word_length = long_from(cfg, "word_length", 4);
    std::mt19937_64 rng(seed_from(cfg));
    std::uniform_int_distribution<long> kd(-k_range, k_range);

    RunResult out;
    long pass = 0;
    std::string failure;
    for (long i = 0; i < samples; ++i) {
        QuarticMatrix m1 = random_gamma(n1, rng, static_cast<int>(word_length));
        QuarticMatrix m2 = random_gamma(n2, rng, static_cast<int>(word_length));
        BigInt k(kd(rng));
        bool ok = true;
        try {
            inclusion_check(m1, m2, k);
        } catch (const MembershipFailure& e) {
            ok = false;
            failure = e.what();
        }
        if (ok) ++pass;
        if (opts.emit_rows)
            push_row(out.csv_rows, "su-inclusion", "sample" + std::to_string(i),
                     "k=" + k.to_string(), ok ? "1" : "0", ok ? "1" : "0",
                     ok ? "certified" : "failed");
    }
    bool all = pass == samples;
    ojson payload;
    payload["n1"] = n1;
    payload["n2"] = n2;
    payload["samples"] = samples;
    payload["passed"] = pass;
    if (!failure.empty()) payload["failure"] = failure;
    out.exit_code = all ? 0 : 1;
    out.record =
        make_record("su-inclusion", cfg, all ? "certified" : "failed", std::move(payload), timer);
    return out;
}

RunResult run_avoidance(const json& cfg, const RunOptions& opts) {
    Timer timer;
    auto extra = extra_catalog_from(cfg);
    FieldInstance inst1 = instantiate(resolve_field(
        cfg.contains("field1") ? cfg.at("field1").get<std::string>() : "cubic-disc81", extra));
    FieldInstance inst2 = instantiate(resolve_field(
        cfg.contains("field2") ? cfg.at("field2").get<std::string>() : "cubic-disc81", extra));
    AvoidanceSpec spec;
    if (cfg.contains("s_min")) spec.s_min = rational_from(cfg.at("s_min"), "s_min");
    if (cfg.contains("s_max")) spec.s_max = rational_from(cfg.at("s_max"), "s_max");
    if (cfg.contains("s_step")) spec.s_step = rational_from(cfg.at("s_step"), "s_step");
    spec.d_points = static_cast<int>(long_from(cfg, "d_points", 5));
    if (cfg.contains("d_log_range")) spec.d_log_range = rational_from(cfg.at("d_log_range"), "d_log_range");
    spec.net_t_points = static_cast<int>(long_from(cfg, "net_t_points", 3));
    spec.net_torus_points = static_cast<int>(long_from(cfg, "net_torus_points", 3));
    spec.quotient_radius = static_cast<int>(long_from(cfg, "quotient_radius", 1));

    AvoidanceReport rep = avoidance_experiment(inst1, inst2, spec, opts.workers);
    bool all = rep.decomposed == rep.samples;

    RunResult out;
    if (opts.emit_rows) {
        for (const auto& row : rep.rows) {
            std::ostringstream ps;
            ps << "s=" << row.s.to_string() << ";coord=" << row.contracted;
            push_row(out.csv_rows, "avoidance", "decomposition", ps.str(), "0",
                     decimal_string(row.residual_hi, 6), row.decomposed ? "certified" : "failed");
        }
        for (const auto& row : rep.control) {
            std::ostringstream ps;
            ps << "s=" << row.s.to_string() << ";coord=0";
            std::ostringstream val;
            val << row.net_distance_margin;
            push_row(out.csv_rows, "avoidance", "control-net-distance", ps.str(), val.str(),
                     val.str(), "statistical");
        }
    }
    ojson payload;
    payload["field1"] = inst1.spec.label;
    payload["field2"] = inst2.spec.label;
    payload["samples"] = rep.samples;
    payload["decomposed"] = rep.decomposed;
    ojson controls = ojson::array();
    for (const auto& row : rep.control) {
        ojson c;
        c["s"] = row.s.to_string();
        c["net_distance_margin"] = row.net_distance_margin;
        c["status"] = "statistical";
        controls.push_back(std::move(c));
    }
    payload["control"] = controls;
    out.exit_code = all ? 0 : 1;
    out.record =
        make_record("avoidance", cfg, all ? "certified" : "failed", std::move(payload), timer);
    return out;
}

RunResult run_density_probe(const json& cfg, const RunOptions& opts) {
    Timer timer;
    auto extra = extra_catalog_from(cfg);
    FieldInstance inst = instantiate(resolve_field(
        cfg.contains("field") ? cfg.at("field").get<std::string>() : "cubic-disc81", extra));
    long target_count = long_from(cfg, "targets", 3);
    std::mt19937_64 rng(seed_from(cfg));
    DensitySpec spec;
    if (cfg.contains("log_range")) spec.log_range = rational_from(cfg.at("log_range"), "log_range");
    if (cfg.contains("levels")) {
        spec.levels.clear();
        for (const auto& v : cfg.at("levels")) spec.levels.push_back(static_cast<int>(v.get<long long>()));
    }
    spec.quotient_radius = static_cast<int>(long_from(cfg, "quotient_radius", 1));

    std::vector<UnimodularLattice> targets;
    for (long i = 0; i < target_count; ++i)
        targets.push_back(random_unimodular_lattice(inst.field.degree(), rng));
    auto series = density_probe(inst, targets, spec, opts.workers);

    bool monotone = true;
    RunResult out;
    ojson payload;
    payload["field"] = inst.spec.label;
    ojson all = ojson::array();
    for (const auto& s : series) {
        ojson levels = ojson::array();
        for (size_t i = 0; i < s.levels.size(); ++i) {
            const auto& lvl = s.levels[i];
            if (i > 0 && lvl.min_distance > s.levels[i - 1].min_distance + 1e-12) monotone = false;
            ojson o;
            o["grid_per_dim"] = lvl.grid_per_dim;
            o["min_distance"] = lvl.min_distance;
            levels.push_back(std::move(o));
            if (opts.emit_rows) {
                std::ostringstream val;
                val << lvl.min_distance;
                push_row(out.csv_rows, "density-probe",
                         "target" + std::to_string(s.target_index),
                         "grid=" + std::to_string(lvl.grid_per_dim), val.str(), val.str(),
                         "statistical");
            }
        }
        ojson t;
        t["target"] = s.target_index;
        t["levels"] = std::move(levels);
        all.push_back(std::move(t));
    }
    payload["series"] = all;
    payload["weakly_decreasing"] = monotone;
    out.exit_code = 0;
    out.record = make_record("density-probe", cfg, "statistical", std::move(payload), timer);
    return out;
}

RunResult run_compact_orbit(const json& cfg, const RunOptions& opts) {
    Timer timer;
    auto extra = extra_catalog_from(cfg);
    FieldInstance inst = instantiate(resolve_field(
        cfg.contains("field") ? cfg.at("field").get<std::string>() : "cubic-disc81", extra));
    std::vector<int> grid;
    if (cfg.contains("grid"))
        for (const auto& v : cfg.at("grid")) grid.push_back(static_cast<int>(v.get<long long>()));
    else
        grid.assign(inst.units.size(), 8);

    CompactOrbitStats stats = compact_orbit_probe(inst.field, inst.units, grid, opts.workers);
    bool positive = stats.min_systole_lower.sign() > 0;

    RunResult out;
    if (opts.emit_rows) {
        push_row(out.csv_rows, "compact-orbit", "min_systole", "field=" + inst.spec.label,
                 decimal_string(stats.min_systole_lower, 9), decimal_string(stats.max_systole_upper, 9),
                 positive ? "certified" : "failed");
    }
    ojson payload;
    payload["field"] = inst.spec.label;
    payload["samples"] = stats.samples;
    payload["min_systole_lower"] = decimal_string(stats.min_systole_lower, 17);
    payload["max_systole_upper"] = decimal_string(stats.max_systole_upper, 17);
    out.exit_code = positive ? 0 : 1;
    out.record = make_record("compact-orbit", cfg, positive ? "certified" : "failed",
                             std::move(payload), timer);
    return out;
}

RunResult run_systole(const json& cfg, const RunOptions& opts) {
    Timer timer;
    RatMatrix M;
    if (cfg.contains("lattice_file")) {
        std::ifstream in(cfg.at("lattice_file").get<std::string>());
        if (!in) throw ConfigError("config: cannot open lattice_file");
        M = read_lattice_text(in);
    } else if (cfg.contains("lattice")) {
        const json& rows = cfg.at("lattice");
        int n = static_cast<int>(rows.size());
        M = RatMatrix(n, n);
        for (int i = 0; i < n; ++i) {
            if (static_cast<int>(rows.at(i).size()) != n)
                throw ConfigError("config: 'lattice' must be a square matrix");
            for (int j = 0; j < n; ++j) M(i, j) = rational_from(rows.at(i).at(j), "lattice");
        }
    } else {
        throw ConfigError("config: systole needs 'lattice_file' or 'lattice'");
    }
    UnimodularLattice L = UnimodularLattice::from_exact(std::move(M));
    SystoleResult s = systole(L);

    RunResult out;
    ojson payload;
    payload["length_lo"] = decimal_string(s.length.lower(), 17);
    payload["length_hi"] = decimal_string(s.length.upper(), 17);
    ojson vec = ojson::array();
    for (Eigen::Index i = 0; i < s.achieving_vector.size(); ++i)
        vec.push_back(s.achieving_vector(i).to_string());
    payload["vector"] = vec;
    if (opts.emit_rows)
        push_row(out.csv_rows, "systole", "length", "", decimal_string(s.length.lower(), 17),
                 decimal_string(s.length.upper(), 17), "certified");
    out.exit_code = 0;
    out.record = make_record("systole", cfg, "certified", std::move(payload), timer);
    return out;
}

} // namespace

const std::vector<std::string>& experiment_names() {
    static const std::vector<std::string> names = {
        "torus-nondensity", "torus-independence", "su-verify", "su-inclusion",
        "avoidance",        "density-probe",      "compact-orbit", "systole"};
    return names;
}

RunResult run_experiment(const std::string& name, const json& config, const RunOptions& opts) {
    if (!config.is_object()) throw ConfigError("config: top-level JSON object required");
    if (name == "torus-nondensity") return run_torus_nondensity(config, opts);
    if (name == "torus-independence") return run_torus_independence(config, opts);
    if (name == "su-verify") return run_su_verify(config, opts);
    if (name == "su-inclusion") return run_su_inclusion(config, opts);
    if (name == "avoidance") return run_avoidance(config, opts);
    if (name == "density-probe") return run_density_probe(config, opts);
    if (name == "compact-orbit") return run_compact_orbit(config, opts);
    if (name == "systole") return run_systole(config, opts);
    throw ConfigError("unknown experiment '" + name + "'");
}

json field_spec_to_json(const FieldSpec& spec) {
    json j;
    j["label"] = spec.label;
    json poly = json::array();
    for (const auto& c : spec.poly) poly.push_back(c.to_string());
    j["poly"] = poly;
    json units = json::array();
    for (const auto& u : spec.units) {
        json uu = json::array();
        for (const auto& c : u) uu.push_back(c.to_string());
        units.push_back(uu);
    }
    j["units"] = units;
    return j;
}

FieldSpec field_spec_from_json(const json& j) {
    FieldSpec spec;
    spec.label = require(j, "label").get<std::string>();
    for (const auto& c : require(j, "poly")) spec.poly.push_back(bigint_from(c, "poly"));
    for (const auto& u : require(j, "units")) {
        std::vector<BigInt> coords;
        for (const auto& c : u) coords.push_back(bigint_from(c, "units"));
        spec.units.push_back(std::move(coords));
    }
    return spec;
}

std::vector<FieldSpec> load_catalog_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open catalog file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("catalog file: ") + e.what());
    }
    if (!j.is_array()) throw ConfigError("catalog file must be a JSON array");
    std::vector<FieldSpec> out;
    for (const auto& e : j) out.push_back(field_spec_from_json(e));
    return out;
}

FieldSpec resolve_field(const std::string& label, const std::vector<FieldSpec>& extra) {
    for (const auto& s : extra)
        if (s.label == label) return s;
    for (const auto& s : builtin_catalog())
        if (s.label == label) return s;
    throw ConfigError("unknown field label '" + label + "'");
}

} // namespace orbitlab
