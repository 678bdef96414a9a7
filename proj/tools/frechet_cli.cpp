// frechet: simulate curve datasets, train Frechet trees and forests, and
// report predictions, OOB error, variable importance and benchmarks.
//
// Exit status: 0 on success, 2 on bad input or arguments, 3 when an internal
// invariant is violated. FRECHET_WORKERS overrides the worker count.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "frechet/benchmark.hpp"
#include "frechet/error.hpp"
#include "frechet/forest.hpp"
#include "frechet/io.hpp"
#include "frechet/parallel.hpp"
#include "frechet/simgen.hpp"
#include "frechet/tree.hpp"

namespace {

using namespace frechet;

constexpr int exit_input = 2;
constexpr int exit_internal = 3;

// Writes to the named file, or to stdout for "" and "-".
class Output {
public:
    explicit Output(const std::string& path) {
        if (path.empty() || path == "-") return;
        file_.open(path);
        if (!file_) throw Error(ErrorCode::ParseError, "cannot write " + path);
    }
    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

private:
    std::ofstream file_;
};

std::vector<std::string> split_names(const std::string& list) {
    std::vector<std::string> names;
    std::string cur;
    for (char c : list) {
        if (c == ',') {
            if (!cur.empty()) names.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) names.push_back(cur);
    return names;
}

const std::map<std::string, SelectMode> select_modes{{"cv", SelectMode::Cv}, {"hubert", SelectMode::Hubert}};
const std::map<std::string, PruneMode> prune_modes{
    {"none", PruneMode::None}, {"cv", PruneMode::Cv}, {"hubert", PruneMode::Hubert}};

struct SimulateArgs {
    sim::SimConfig config;
    std::string out;
    std::string truth;
};

void run_simulate(const SimulateArgs& a) {
    const auto [data, truth] = sim::simulate_dataset(a.config);
    Output out(a.out);
    io::write_dataset(out.stream(), data);
    if (!a.truth.empty()) {
        Output t(a.truth);
        io::write_truth(t.stream(), data, truth);
    }
}

struct GrowArgs {
    std::string data;
    std::string variables;
    std::size_t trees = 100;
    std::size_t mtry = 1;
    std::size_t min_node_size = 1;
    std::uint64_t seed = 0;
    std::string mode = "forest";
    std::string select = "cv";
    std::string prune = "none";
    std::size_t folds = 5;
};

Dataset load_training(const std::string& path, const std::string& variables) {
    io::LoadOptions opt;
    opt.variables = split_names(variables);
    return io::load_dataset(std::filesystem::path(path), opt);
}

struct TrainArgs : GrowArgs {
    std::string out;
};

void run_train(const TrainArgs& a) {
    const auto data = load_training(a.data, a.variables);
    const std::size_t workers = default_workers();
    const auto metrics = DatasetMetrics::compute(data, workers);
    const TrainingData td{data, metrics};

    io::Model model;
    model.variable_names = data.variable_names;
    model.n_train = data.n();
    if (a.mode == "tree") {
        SelectOptions opt;
        opt.mode = select_modes.at(a.select);
        opt.folds = a.folds;
        opt.grow.min_node_size = a.min_node_size;
        if (opt.grow.min_node_size < 1) throw Error(ErrorCode::InvalidParams, "min_node_size must be >= 1");
        auto rng = derive_stream(a.seed, StreamDomain::Tree, {0});
        const auto obs = iota_positions(data.n());
        const auto fitted = fit_tree(td, obs, opt, rng);
        model.kind = io::ModelKind::Tree;
        model.forest.trees = {fitted.selection.tree};
        model.forest.training_obs = obs;
        model.forest.params.trees = 1;
        model.forest.params.mtry = data.p();
        model.forest.params.min_node_size = a.min_node_size;
        model.forest.params.seed = a.seed;
        model.forest.params.folds = a.folds;
        model.select_mode = a.select;
        model.selected_step = fitted.selection.step;
        std::cerr << "tree: " << fitted.tree.leaf_count() << " maximal leaves, selected "
                  << fitted.selection.tree.leaf_count() << " (step " << fitted.selection.step << " of "
                  << fitted.sequence.size() << (fitted.selection.fallback ? ", fallback" : "") << ")\n";
    } else {
        ForestParams p;
        p.trees = a.trees;
        p.mtry = a.mtry;
        p.min_node_size = a.min_node_size;
        p.seed = a.seed;
        p.prune_mode = prune_modes.at(a.prune);
        p.folds = a.folds;
        model.kind = io::ModelKind::Forest;
        model.forest = train_forest(td, p, workers);
        std::cerr << "forest: " << model.forest.trees.size() << " trees\n";
    }
    io::save_model(a.out, model);
}

struct PredictArgs {
    std::string model;
    std::string data;
    std::string out;
};

void run_predict(const PredictArgs& a) {
    const auto model = io::load_model(a.model);
    const auto set = io::load_observations(std::filesystem::path(a.data), model.variable_names);
    std::vector<Curve> preds(set.rows.size());
    parallel_for(set.rows.size(), default_workers(),
                 [&](std::size_t i) { preds[i] = predict_forest(model.forest, set.rows[i]); });
    Output out(a.out);
    out.stream() << "obs_id,time,value\n";
    for (std::size_t i = 0; i < preds.size(); ++i) io::write_curve_rows(out.stream(), set.obs_ids[i], preds[i]);
}

// Reloads the training data of a forest model and checks that it matches.
struct Reloaded {
    io::Model model;
    Dataset data;
    DatasetMetrics metrics;
};

Reloaded reload(const std::string& model_path, const std::string& data_path) {
    Reloaded r;
    r.model = io::load_model(model_path);
    if (r.model.kind != io::ModelKind::Forest) {
        throw Error(ErrorCode::NotApplicable, "out-of-bag quantities need a forest model");
    }
    io::LoadOptions opt;
    opt.variables = r.model.variable_names;
    r.data = io::load_dataset(std::filesystem::path(data_path), opt);
    if (r.data.n() != r.model.n_train) {
        throw Error(ErrorCode::InvalidParams, "dataset has " + std::to_string(r.data.n()) +
                                                  " observations, the model was trained on " +
                                                  std::to_string(r.model.n_train));
    }
    r.metrics = DatasetMetrics::compute(r.data, default_workers());
    return r;
}

struct OobArgs {
    std::string model;
    std::string data;
    std::size_t tree_limit = 0;
};

void run_oob(const OobArgs& a) {
    const auto r = reload(a.model, a.data);
    const auto res = oob_error(r.model.forest, TrainingData{r.data, r.metrics}, a.tree_limit);
    std::cout << "oob_error," << io::format_double(res.error) << '\n'
              << "covered," << res.covered << '\n'
              << "excluded," << res.excluded << '\n';
}

struct ImportanceArgs {
    std::string model;
    std::string data;
    std::uint64_t permutation_seed = 0;
    std::string out;
};

void run_importance(const ImportanceArgs& a) {
    const auto r = reload(a.model, a.data);
    const auto rep = variable_importance(r.model.forest, TrainingData{r.data, r.metrics}, a.permutation_seed,
                                         default_workers());
    std::vector<std::size_t> order(rep.importance.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return rep.importance[x] > rep.importance[y]; });
    std::vector<std::size_t> rank(order.size());
    for (std::size_t k = 0; k < order.size(); ++k) rank[order[k]] = k + 1;

    Output out(a.out);
    out.stream() << "variable_name,importance,rank\n";
    for (std::size_t j = 0; j < rep.importance.size(); ++j) {
        out.stream() << r.data.variable_names[j] << ',' << io::format_double(rep.importance[j]) << ',' << rank[j]
                     << '\n';
    }
    if (rep.skipped_trees > 0) std::cerr << rep.skipped_trees << " trees with empty OOB sets skipped\n";
}

struct BenchmarkArgs : GrowArgs {
    std::size_t reps = 100;
    double test_fraction = 0.2;
    std::string out;
};

void run_benchmark_cmd(const BenchmarkArgs& a) {
    const auto data = load_training(a.data, a.variables);
    const std::size_t workers = default_workers();
    const auto metrics = DatasetMetrics::compute(data, workers);
    BenchmarkOptions opt;
    opt.reps = a.reps;
    opt.test_fraction = a.test_fraction;
    opt.seed = a.seed;
    opt.workers = workers;
    opt.forest.trees = a.trees;
    opt.forest.mtry = a.mtry;
    opt.forest.min_node_size = a.min_node_size;
    opt.forest.prune_mode = prune_modes.at(a.prune);
    opt.forest.folds = a.folds;
    opt.tree.mode = select_modes.at(a.select);
    opt.tree.folds = a.folds;
    opt.tree.grow.min_node_size = a.min_node_size;
    const auto report = run_benchmark(TrainingData{data, metrics}, opt);
    if (!a.out.empty()) {
        Output out(a.out);
        write_benchmark_csv(out.stream(), report);
    }
    print_benchmark_summary(std::cout, report);
}

struct PruneInfoArgs : GrowArgs {
    std::string out;
};

void run_prune_info(const PruneInfoArgs& a) {
    const auto data = load_training(a.data, a.variables);
    const auto metrics = DatasetMetrics::compute(data, default_workers());
    const TrainingData td{data, metrics};
    const auto obs = iota_positions(data.n());

    SelectOptions opt;
    opt.folds = a.folds;
    opt.grow.min_node_size = a.min_node_size;
    opt.mode = select_modes.at(a.select);
    auto rng = derive_stream(a.seed, StreamDomain::Tree, {0});
    auto fitted = fit_tree(td, obs, opt, rng);

    // Fill in the column of the other rule too, on the same sequence.
    auto other = opt;
    other.mode = opt.mode == SelectMode::Cv ? SelectMode::Hubert : SelectMode::Cv;
    auto other_rng = derive_stream(a.seed, StreamDomain::Folds, {1});
    try {
        select_subtree(td, obs, fitted.sequence, other, other_rng);
    } catch (const Error& e) {
        std::cerr << "note: " << e.what() << '\n';
    }

    Output out(a.out);
    out.stream() << "step,alpha,leaves,cost,gamma,cv_error,selected\n";
    for (std::size_t k = 0; k < fitted.sequence.size(); ++k) {
        const auto& s = fitted.sequence[k];
        out.stream() << k << ',' << io::format_double(s.alpha) << ',' << s.leaf_count << ','
                     << io::format_double(s.cost) << ','
                     << (s.hubert_gamma ? io::format_double(*s.hubert_gamma) : "") << ','
                     << (s.cv_error ? io::format_double(*s.cv_error) : "") << ','
                     << (k == fitted.selection.step ? 1 : 0) << '\n';
    }
}

void add_grow_options(CLI::App* cmd, GrowArgs& a, bool forest_flags) {
    cmd->add_option("--data", a.data, "Dataset CSV")->required()->check(CLI::ExistingFile);
    cmd->add_option("--variables", a.variables, "Comma-separated input variables (default: all, file order)");
    cmd->add_option("--seed", a.seed, "Master seed")->required();
    cmd->add_option("--min-node-size", a.min_node_size, "Minimum leaf size")->capture_default_str();
    cmd->add_option("--select", a.select, "Subtree selection for single trees")
        ->check(CLI::IsMember({"cv", "hubert"}))
        ->capture_default_str();
    cmd->add_option("--folds", a.folds, "Cross-validation folds")->capture_default_str();
    if (!forest_flags) return;
    cmd->add_option("--trees", a.trees, "Number of trees")->capture_default_str();
    cmd->add_option("--mtry", a.mtry, "Variables tried per node")->capture_default_str();
    cmd->add_option("--prune", a.prune, "Pruning of forest trees")
        ->check(CLI::IsMember({"none", "cv", "hubert"}))
        ->capture_default_str();
}

int dispatch(int argc, char** argv) {
    CLI::App app{"Frechet trees and random forests for curve regression"};
    app.require_subcommand(1);

    SimulateArgs sim_args;
    auto* sim_cmd = app.add_subcommand("simulate", "Generate a simulated dataset");
    sim_cmd->add_option("--n", sim_args.config.n, "Observations")->capture_default_str();
    sim_cmd->add_option("--noise-vars", sim_args.config.noise_vars, "Brownian noise inputs")->capture_default_str();
    sim_cmd->add_option("--x-grid", sim_args.config.x_grid_size, "Input grid size")->capture_default_str();
    sim_cmd->add_option("--y-grid", sim_args.config.y_grid_size, "Output grid size")->capture_default_str();
    sim_cmd->add_option("--input-noise-sd", sim_args.config.input_noise_sd)->capture_default_str();
    sim_cmd->add_option("--output-noise-sd", sim_args.config.output_noise_sd)->capture_default_str();
    sim_cmd->add_option("--beta-sd", sim_args.config.beta_sd)->capture_default_str();
    sim_cmd->add_option("--seed", sim_args.config.seed, "Seed")->required();
    sim_cmd->add_option("--out", sim_args.out, "Dataset CSV (default stdout)");
    sim_cmd->add_option("--truth", sim_args.truth, "Truth CSV (obs_id,G1,G2,beta)");

    TrainArgs train_args;
    auto* train_cmd = app.add_subcommand("train", "Train a tree or forest model");
    add_grow_options(train_cmd, train_args, true);
    train_cmd->add_option("--mode", train_args.mode, "Model type")
        ->check(CLI::IsMember({"tree", "forest"}))
        ->capture_default_str();
    train_cmd->add_option("--out", train_args.out, "Model JSON")->required();

    PredictArgs predict_args;
    auto* predict_cmd = app.add_subcommand("predict", "Predict output curves");
    predict_cmd->add_option("--model", predict_args.model)->required()->check(CLI::ExistingFile);
    predict_cmd->add_option("--data", predict_args.data, "Inputs CSV")->required()->check(CLI::ExistingFile);
    predict_cmd->add_option("--out", predict_args.out, "Predictions CSV (default stdout)");

    OobArgs oob_args;
    auto* oob_cmd = app.add_subcommand("oob", "Out-of-bag error of a forest on its training data");
    oob_cmd->add_option("--model", oob_args.model)->required()->check(CLI::ExistingFile);
    oob_cmd->add_option("--data", oob_args.data, "Training CSV")->required()->check(CLI::ExistingFile);
    oob_cmd->add_option("--trees", oob_args.tree_limit, "Use only the first trees (0: all)")->capture_default_str();

    ImportanceArgs vi_args;
    auto* vi_cmd = app.add_subcommand("importance", "Permutation variable importance");
    vi_cmd->add_option("--model", vi_args.model)->required()->check(CLI::ExistingFile);
    vi_cmd->add_option("--data", vi_args.data, "Training CSV")->required()->check(CLI::ExistingFile);
    vi_cmd->add_option("--permutation-seed", vi_args.permutation_seed)->required();
    vi_cmd->add_option("--out", vi_args.out, "Importance CSV (default stdout)");

    BenchmarkArgs bench_args;
    auto* bench_cmd = app.add_subcommand("benchmark", "Tree vs forest on repeated train/test splits");
    add_grow_options(bench_cmd, bench_args, true);
    bench_cmd->add_option("--reps", bench_args.reps)->capture_default_str();
    bench_cmd->add_option("--test-fraction", bench_args.test_fraction)->capture_default_str();
    bench_cmd->add_option("--out", bench_args.out, "Per-repetition CSV");

    PruneInfoArgs prune_args;
    auto* prune_cmd = app.add_subcommand("prune-info", "Cost-complexity sequence of a single tree");
    add_grow_options(prune_cmd, prune_args, false);
    prune_cmd->add_option("--out", prune_args.out, "CSV (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_input;
    }

    if (*sim_cmd) run_simulate(sim_args);
    if (*train_cmd) run_train(train_args);
    if (*predict_cmd) run_predict(predict_args);
    if (*oob_cmd) run_oob(oob_args);
    if (*vi_cmd) run_importance(vi_args);
    if (*bench_cmd) run_benchmark_cmd(bench_args);
    if (*prune_cmd) run_prune_info(prune_args);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return dispatch(argc, argv);
    } catch (const frechet::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.code() == frechet::ErrorCode::Internal ? exit_internal : exit_input;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: malformed model: " << e.what() << '\n';
        return exit_input;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return exit_internal;
    }
}
