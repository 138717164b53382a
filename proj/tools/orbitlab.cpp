#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "orbitlab/experiments.hpp"

namespace {

int run_named(const std::string& name, const std::string& config_path, bool emit_rows,
              int workers_flag, const std::string& out_flag, const std::string& rows_flag) {
    using namespace orbitlab;
    json config;
    {
        std::ifstream in(config_path);
        if (!in) {
            std::cerr << "orbitlab: cannot open config '" << config_path << "'\n";
            return 2;
        }
        try {
            in >> config;
        } catch (const json::exception& e) {
            std::cerr << "orbitlab: config parse error: " << e.what() << "\n";
            return 2;
        }
    }

    RunOptions opts;
    opts.emit_rows = emit_rows;
    opts.workers = workers_flag > 0 ? workers_flag
                   : config.contains("workers") ? static_cast<int>(config["workers"].get<long long>())
                                                : 1;
    opts.report_path =
        !out_flag.empty() ? out_flag
        : config.contains("report") ? config["report"].get<std::string>() : std::string();
    opts.rows_path = !rows_flag.empty() ? rows_flag
                     : config.contains("rows") ? config["rows"].get<std::string>() : std::string();

    RunResult result;
    try {
        result = run_experiment(name, config, opts);
    } catch (const ConfigError& e) {
        std::cerr << "orbitlab: " << e.what() << "\n";
        return 2;
    } catch (const PreconditionViolated& e) {
        std::cerr << "orbitlab: " << e.what() << "\n";
        return 2;
    } catch (const OrbitlabError& e) {
        std::cerr << "orbitlab: certified check failed: " << e.what() << "\n";
        return 1;
    }

    std::string doc = result.record.dump(2);
    std::cout << doc << "\n";
    if (!opts.report_path.empty()) {
        std::ofstream out(opts.report_path);
        if (!out) {
            std::cerr << "orbitlab: cannot write report '" << opts.report_path << "'\n";
            return 2;
        }
        out << doc << "\n";
    }
    if (opts.emit_rows) {
        std::string path = opts.rows_path;
        if (path.empty())
            path = opts.report_path.empty() ? "rows.csv" : opts.report_path + ".rows.csv";
        std::ofstream rows(path);
        if (!rows) {
            std::cerr << "orbitlab: cannot write rows '" << path << "'\n";
            return 2;
        }
        for (const auto& r : result.csv_rows) rows << r << "\n";
    }
    return result.exit_code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"orbitlab: certified and statistical experiments on orbit closures"};
    app.require_subcommand(1);

    std::string config_path, out_path, rows_path;
    bool emit_rows = false;
    int workers = 0;

    std::vector<CLI::App*> subs;
    for (const auto& name : orbitlab::experiment_names()) {
        CLI::App* sub = app.add_subcommand(name, "run the " + name + " experiment");
        sub->add_option("--config", config_path, "JSON config path")->required();
        sub->add_flag("--emit-rows", emit_rows, "also write per-sample CSV rows");
        sub->add_option("--workers", workers, "worker thread count");
        sub->add_option("--out", out_path, "write the JSON report here as well");
        sub->add_option("--rows", rows_path, "CSV rows output path");
        subs.push_back(sub);
    }

    CLI::App* catalog = app.add_subcommand("catalog", "list built-in number fields and defaults");
    bool catalog_json_flag = false;
    catalog->add_flag("--json", catalog_json_flag, "machine-readable dump");

    CLI11_PARSE(app, argc, argv);

    if (catalog->parsed()) {
        using namespace orbitlab;
        if (catalog_json_flag) {
            json j = json::array();
            for (const auto& spec : builtin_catalog()) j.push_back(field_spec_to_json(spec));
            std::cout << j.dump(2) << "\n";
        } else {
            for (const auto& spec : builtin_catalog()) {
                std::cout << spec.label << ": poly coefficients (low to high)";
                for (const auto& c : spec.poly) std::cout << " " << c;
                std::cout << "; units";
                for (const auto& u : spec.units) {
                    std::cout << " (";
                    for (size_t i = 0; i < u.size(); ++i) std::cout << (i ? "," : "") << u[i];
                    std::cout << ")";
                }
                std::cout << "\n";
            }
            std::cout << "defaults: n1 = n2 = 3, eps = 1e-3, H = 10, delta = 99/100\n";
        }
        return 0;
    }

    for (size_t i = 0; i < subs.size(); ++i) {
        if (subs[i]->parsed())
            return run_named(orbitlab::experiment_names()[i], config_path, emit_rows, workers,
                             out_path, rows_path);
    }
    return 2;
}
