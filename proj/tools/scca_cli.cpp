// Command-line front end: latent correlation estimation, sparse CCA
// fitting, and simulation studies, all with machine-readable outputs.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "scca/io.hpp"
#include "scca/kendall.hpp"
#include "scca/latent_corr.hpp"
#include "scca/scca_opt.hpp"
#include "scca/sim.hpp"
#include "scca/types.hpp"
#include "scca/version.hpp"

using nlohmann::json;

namespace {

constexpr int kExitBadInput = 2;
constexpr int kExitNumeric = 3;

// Thrown for malformed input / validation problems (exit 2); anything
// else escaping a command is a numeric failure (exit 3).
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CommonOpts {
    std::string input, input2;
    std::string types, types2;
    double nu = 0.01;
    std::string criterion = "bic2";
    int grid_count = 20;
    double grid_eps = 0.01;
    int pairs = 1;
    std::uint64_t seed = 0;
    std::string out;
    std::string format = "json";
    std::string method = "kendall";
};

scca::MixedDataMatrix load_data(const std::string& path, const std::string& type_spec) {
    scca::io::CsvTable table;
    try {
        table = scca::io::read_csv(path);
    } catch (const std::exception& e) {
        throw InputError(e.what());
    }
    try {
        auto types = scca::io::parse_types(type_spec, table.header);
        return scca::MixedDataMatrix(table.values, types, table.header);
    } catch (const std::exception& e) {
        throw InputError(std::string(path) + ": " + e.what());
    }
}

json config_echo(const CommonOpts& o, const std::string& command) {
    json j;
    j["tool_version"] = scca::kVersion;
    j["command"] = command;
    j["nu"] = o.nu;
    j["criterion"] = o.criterion;
    j["grid_count"] = o.grid_count;
    j["grid_eps"] = o.grid_eps;
    j["pairs"] = o.pairs;
    j["seed"] = o.seed;
    j["method"] = o.method;
    if (!o.input.empty()) j["input"] = o.input;
    if (!o.input2.empty()) j["input2"] = o.input2;
    if (!o.types.empty()) j["types"] = o.types;
    if (!o.types2.empty()) j["types2"] = o.types2;
    return j;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(row);
    }
    return rows;
}

json vector_to_json(const Eigen::VectorXd& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

scca::latent_corr::CorrelationMethod parse_method(const std::string& s) {
    if (s == "kendall") return scca::latent_corr::CorrelationMethod::kendall;
    if (s == "pearson") return scca::latent_corr::CorrelationMethod::pearson;
    throw InputError("unknown correlation method: " + s);
}

int cmd_latentcor(const CommonOpts& o, bool full) {
    auto data = load_data(o.input, o.types);
    if (!(o.nu >= 0 && o.nu < 1)) throw InputError("--nu must lie in [0,1)");
    auto method = parse_method(o.method);
    auto lc = scca::latent_corr::estimate_latent_correlation(data, o.nu, method);
    if (o.format == "csv") {
        std::string body = "# tool_version=" + std::string(scca::kVersion) +
                           " command=latentcor nu=" + scca::io::format_double(o.nu) +
                           " method=" + o.method + " seed=" + std::to_string(o.seed) +
                           "\n" + scca::io::matrix_to_csv(lc.r_tilde, data.column_names);
        scca::io::atomic_write(o.out, body);
    } else {
        json j;
        j["config"] = config_echo(o, "latentcor");
        j["columns"] = data.column_names;
        j["r_tilde"] = matrix_to_json(lc.r_tilde);
        if (full) {
            j["r_hat"] = matrix_to_json(lc.r_hat);
            j["r_psd"] = matrix_to_json(lc.r_psd);
            if (method == scca::latent_corr::CorrelationMethod::kendall) {
                j["tau"] = matrix_to_json(scca::kendall::tau_matrix(data));
                j["thresholds"] = scca::latent_corr::estimate_thresholds(data);
            }
        }
        scca::io::atomic_write(o.out, j.dump(2) + "\n");
    }
    return 0;
}

int cmd_cca(const CommonOpts& o) {
    auto x1 = load_data(o.input, o.types);
    auto x2 = load_data(o.input2, o.types2);
    if (x1.rows() != x2.rows())
        throw InputError("row count mismatch: " + std::to_string(x1.rows()) + " vs " +
                         std::to_string(x2.rows()));
    if (!(o.nu >= 0 && o.nu < 1)) throw InputError("--nu must lie in [0,1)");
    scca::opt::BicCriterion criterion;
    try {
        criterion = scca::opt::criterion_from_string(o.criterion);
    } catch (const std::exception& e) {
        throw InputError(e.what());
    }
    const auto p1 = x1.cols(), p2 = x2.cols();
    Eigen::MatrixXd joined(x1.rows(), p1 + p2);
    joined.leftCols(p1) = x1.values;
    joined.rightCols(p2) = x2.values;
    std::vector<scca::VariableType> types(x1.types);
    types.insert(types.end(), x2.types.begin(), x2.types.end());
    scca::MixedDataMatrix all(joined, types);
    auto lc = scca::latent_corr::estimate_latent_correlation(all, o.nu, parse_method(o.method));
    Eigen::MatrixXd r1 = lc.r_tilde.topLeftCorner(p1, p1);
    Eigen::MatrixXd r2 = lc.r_tilde.bottomRightCorner(p2, p2);
    Eigen::MatrixXd r12 = lc.r_tilde.topRightCorner(p1, p2);
    auto fitted = scca::opt::fit_sequence(r1, r2, r12, criterion,
                                          static_cast<int>(x1.rows()), o.pairs,
                                          o.grid_count, o.grid_eps);
    json j;
    j["config"] = config_echo(o, "cca");
    j["n"] = x1.rows();
    j["pairs"] = json::array();
    for (const auto& pair : fitted) {
        json pj;
        pj["w1"] = vector_to_json(pair.w1);
        pj["w2"] = vector_to_json(pair.w2);
        pj["objective"] = pair.objective;
        pj["lambda1"] = pair.lambda1;
        pj["lambda2"] = pair.lambda2;
        pj["support1"] = pair.support1;
        pj["support2"] = pair.support2;
        pj["iterations"] = pair.iterations;
        pj["converged"] = pair.converged;
        j["pairs"].push_back(pj);
    }
    scca::io::atomic_write(o.out, j.dump(2) + "\n");
    return 0;
}

scca::sim::SimScenario scenario_from_json(const json& j) {
    scca::sim::SimScenario sc;
    try {
        if (j.contains("n")) sc.n = j.at("n").get<int>();
        if (j.contains("p1")) sc.p1 = j.at("p1").get<int>();
        if (j.contains("p2")) sc.p2 = j.at("p2").get<int>();
        if (j.contains("gamma")) sc.gamma = j.at("gamma").get<double>();
        if (j.contains("rho")) sc.rho = j.at("rho").get<double>();
        if (j.contains("copula")) sc.copula_id = j.at("copula").get<int>();
        if (j.contains("block_sizes"))
            sc.block_sizes = j.at("block_sizes").get<std::vector<int>>();
        if (j.contains("support")) {
            // 1-based coordinates in the file.
            for (int v : j.at("support").get<std::vector<int>>())
                sc.true_support.push_back(v - 1);
        }
        if (j.contains("type1"))
            sc.type1 = scca::variable_type_from_string(j.at("type1").get<std::string>());
        if (j.contains("type2"))
            sc.type2 = scca::variable_type_from_string(j.at("type2").get<std::string>());
        if (j.contains("trunc_const1")) sc.trunc_const1 = j.at("trunc_const1").get<double>();
        if (j.contains("trunc_const2")) sc.trunc_const2 = j.at("trunc_const2").get<double>();
    } catch (const json::exception& e) {
        throw InputError(std::string("scenario: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw InputError(std::string("scenario: ") + e.what());
    }
    try {
        sc.validate();
    } catch (const std::invalid_argument& e) {
        throw InputError(e.what());
    }
    return sc;
}

int cmd_simulate(const CommonOpts& o, const std::string& scenario_path,
                 const std::vector<std::string>& method_names, int replications,
                 int sweep_count) {
    json sj;
    try {
        auto table = std::ifstream(scenario_path);
        if (!table) throw InputError("cannot open " + scenario_path);
        sj = json::parse(table);
    } catch (const json::exception& e) {
        throw InputError(scenario_path + ": " + e.what());
    }
    scca::sim::SimScenario sc = scenario_from_json(sj);
    std::vector<scca::sim::Method> methods;
    for (const auto& name : method_names) {
        try {
            methods.push_back(scca::sim::method_from_string(name));
        } catch (const std::exception& e) {
            throw InputError(e.what());
        }
    }
    if (replications < 1) throw InputError("--replications must be >= 1");

    auto result = scca::sim::run_study(sc, methods, replications, o.seed, sweep_count);

    std::string csv = "# tool_version=" + std::string(scca::kVersion) +
                      " command=simulate seed=" + std::to_string(o.seed) + "\n";
    csv += "replication,method,seed,rho_hat,loss1,loss2,tpr1,tpr2,tnr1,tnr2,size1,size2,"
           "lambda1,lambda2,converged\n";
    for (const auto& r : result.rows) {
        csv += std::to_string(r.replication) + ',' + scca::sim::to_string(r.method) + ',' +
               std::to_string(r.seed) + ',' + scca::io::format_double(r.rho_hat) + ',' +
               scca::io::format_double(r.loss1) + ',' + scca::io::format_double(r.loss2) +
               ',' + scca::io::format_double(r.tpr1) + ',' +
               scca::io::format_double(r.tpr2) + ',' + scca::io::format_double(r.tnr1) +
               ',' + scca::io::format_double(r.tnr2) + ',' + std::to_string(r.size1) +
               ',' + std::to_string(r.size2) + ',' + scca::io::format_double(r.lambda1) +
               ',' + scca::io::format_double(r.lambda2) + ',' +
               (r.converged ? "1" : "0") + '\n';
    }
    if (!result.sweep.empty()) {
        csv += "# lambda sweep\n";
        csv += "replication,method,lambda_index,lambda,tpr1,fpr1,tpr2,fpr2\n";
        for (const auto& s : result.sweep)
            csv += std::to_string(s.replication) + ',' + scca::sim::to_string(s.method) +
                   ',' + std::to_string(s.lambda_index) + ',' +
                   scca::io::format_double(s.lambda) + ',' +
                   scca::io::format_double(s.tpr1) + ',' + scca::io::format_double(s.fpr1) +
                   ',' + scca::io::format_double(s.tpr2) + ',' +
                   scca::io::format_double(s.fpr2) + '\n';
    }
    scca::io::atomic_write(o.out + "_results.csv", csv);

    json summary;
    summary["config"] = config_echo(o, "simulate");
    summary["config"]["scenario"] = sj;
    summary["config"]["replications"] = replications;
    {
        json ms = json::array();
        for (auto m : methods) ms.push_back(scca::sim::to_string(m));
        summary["config"]["methods"] = ms;
    }
    for (const auto& [method, metrics] : scca::sim::summarize(result)) {
        for (const auto& [metric, stat] : metrics) {
            summary["summary"][method][metric] = {
                {"median", stat.median}, {"q25", stat.q25}, {"q75", stat.q75}};
        }
    }
    scca::io::atomic_write(o.out + "_summary.json", summary.dump(2) + "\n");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Semiparametric sparse CCA for mixed continuous/binary/zero-inflated data"};
    app.require_subcommand(1);

    CommonOpts o;
    std::string scenario_path;
    std::vector<std::string> method_names = {"kendall_bic2"};
    int replications = 50;
    int sweep_count = 0;
    bool full = false;

    auto* lat = app.add_subcommand("latentcor", "Estimate the latent correlation matrix");
    lat->add_option("--input", o.input, "Data CSV")->required();
    lat->add_option("--types", o.types, "Inline type list or sidecar CSV")->required();
    lat->add_option("--nu", o.nu, "Shrinkage weight");
    lat->add_option("--method", o.method, "kendall or pearson");
    lat->add_option("--out", o.out, "Output path")->required();
    lat->add_option("--format", o.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    lat->add_flag("--full", full, "Also emit tau, thresholds, r_hat, r_psd (json only)");

    auto* cca = app.add_subcommand("cca", "Fit sparse canonical pairs");
    cca->add_option("--input", o.input, "First data CSV")->required();
    cca->add_option("--input2", o.input2, "Second data CSV")->required();
    cca->add_option("--types", o.types, "Types for the first dataset")->required();
    cca->add_option("--types2", o.types2, "Types for the second dataset")->required();
    cca->add_option("--nu", o.nu, "Shrinkage weight");
    cca->add_option("--method", o.method, "kendall or pearson");
    cca->add_option("--criterion", o.criterion, "bic1 or bic2");
    cca->add_option("--grid-count", o.grid_count, "Lambda grid size");
    cca->add_option("--grid-eps", o.grid_eps, "Lambda grid lower fraction");
    cca->add_option("--pairs", o.pairs, "Number of canonical pairs (deflation depth)");
    cca->add_option("--out", o.out, "Output JSON path")->required();

    auto* simc = app.add_subcommand("simulate", "Run a seeded simulation study");
    simc->add_option("--scenario", scenario_path, "Scenario JSON")->required();
    simc->add_option("--methods", method_names, "Methods to evaluate");
    simc->add_option("--replications", replications, "Replication count");
    simc->add_option("--seed", o.seed, "Master seed");
    simc->add_option("--sweep", sweep_count, "Lambda sweep length (0 = off)");
    simc->add_option("--out", o.out, "Output path prefix")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (lat->parsed()) return cmd_latentcor(o, full);
        if (cca->parsed()) return cmd_cca(o);
        return cmd_simulate(o, scenario_path, method_names, replications, sweep_count);
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumeric;
    }
}
