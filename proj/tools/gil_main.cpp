// gil: geometric graph learning toolkit CLI.
//
// Subcommands: train, eval, hyperbolicity, generate, gradcheck.
// Exit codes: 0 success, 1 verification failure, 2 usage error, 3 I/O or
// parse error.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gil/datasets.hpp"
#include "gil/error.hpp"
#include "gil/graph.hpp"
#include "gil/hyperbolicity.hpp"
#include "gil/trainer.hpp"

namespace {

using gil::graphcore::Graph;
using gil::graphcore::Task;

constexpr int kExitOk = 0;
constexpr int kExitVerifyFail = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

struct DatasetFlags {
    std::string edges, features, labels;
    std::string synthetic;  // "", "tree" or "grid"
    int tree_branching = 2;
    int tree_depth = 5;
    int grid_rows = 8;
    int grid_cols = 8;
    int feature_dim = 8;
    std::uint64_t data_seed = 1;

    void attach(CLI::App* cmd) {
        cmd->add_option("--edges", edges, "edge list file");
        cmd->add_option("--features", features, "feature matrix file");
        cmd->add_option("--labels", labels, "label file");
        cmd->add_option("--synthetic", synthetic, "generate a dataset instead: tree|grid")
            ->check(CLI::IsMember({"tree", "grid"}));
        cmd->add_option("--tree-branching", tree_branching, "synthetic tree branching factor");
        cmd->add_option("--tree-depth", tree_depth, "synthetic tree depth");
        cmd->add_option("--grid-rows", grid_rows, "synthetic grid rows");
        cmd->add_option("--grid-cols", grid_cols, "synthetic grid cols");
        cmd->add_option("--feature-dim", feature_dim, "synthetic feature dimension");
        cmd->add_option("--data-seed", data_seed, "synthetic data seed");
    }

    Graph resolve() const {
        if (!synthetic.empty()) {
            if (synthetic == "tree") {
                gil::graphcore::TreeOptions opt;
                opt.branching = tree_branching;
                opt.depth = tree_depth;
                opt.feature_dim = feature_dim;
                opt.seed = data_seed;
                return gil::graphcore::generate_tree_dataset(opt);
            }
            gil::graphcore::GridOptions opt;
            opt.rows = grid_rows;
            opt.cols = grid_cols;
            opt.feature_dim = feature_dim;
            opt.seed = data_seed;
            return gil::graphcore::generate_grid_dataset(opt);
        }
        if (edges.empty() || features.empty())
            throw gil::ValidationError("either --synthetic or both --edges and --features required");
        std::optional<std::string> lbl;
        if (!labels.empty()) lbl = labels;
        return gil::graphcore::load_graph(edges, features, lbl);
    }
};

/// Applies "key=value" pairs from repeated --variant flags onto the config.
void apply_variant(gil::train::TrainConfig& cfg, const std::vector<std::string>& kvs) {
    for (const auto& kv : kvs) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw gil::ValidationError("--variant expects key=value, got '" + kv + "'");
        const std::string key = kv.substr(0, eq);
        const std::string value = kv.substr(eq + 1);
        if (key == "fusion")
            cfg.variant.fusion = gil::model::fusion_from_string(value);
        else if (key == "distance_attention")
            cfg.variant.distance_attention = value == "on";
        else if (key == "head")
            cfg.variant.head = gil::model::head_from_string(value);
        else if (key == "self_distance_one")
            cfg.self_distance_one = value == "on";
        else if (key == "euclidean_distance_attention")
            cfg.euclidean_distance_attention = value == "on";
        else
            throw gil::ValidationError("unknown --variant key '" + key + "'");
    }
}

struct SplitFlags {
    std::optional<double> train_frac, val_frac, test_frac;
    std::uint64_t seed = 12345;
};

int cmd_train(const DatasetFlags& data_flags, const std::string& config_path,
              const std::vector<std::string>& variant_kvs, const std::string& task_flag,
              std::optional<std::uint64_t> seed_flag, std::optional<int> epochs_flag,
              const SplitFlags& split, const std::string& out_path) {
    gil::train::TrainConfig cfg;
    if (!config_path.empty()) cfg = gil::train::load_config_file(config_path);
    if (!task_flag.empty())
        cfg.task = task_flag == "lp" ? Task::link_prediction : Task::node_classification;
    if (seed_flag) cfg.seed = *seed_flag;
    if (epochs_flag) cfg.max_epochs = *epochs_flag;
    apply_variant(cfg, variant_kvs);
    cfg.validate();

    Graph g = data_flags.resolve();
    const bool nc = cfg.task == Task::node_classification;
    const double tf = split.train_frac.value_or(nc ? 0.30 : 0.85);
    const double vf = split.val_frac.value_or(nc ? 0.10 : 0.05);
    const double sf = split.test_frac.value_or(nc ? 0.60 : 0.10);
    gil::train::ExperimentData data =
        gil::train::make_experiment_data(std::move(g), cfg.task, tf, vf, sf, split.seed);

    gil::train::RunReport report = gil::train::run_experiment(cfg, data);
    gil::train::write_report(report, out_path);

    std::cout << "best_epoch " << report.best_epoch << "\n";
    for (const auto& [k, v] : report.val_metrics) std::cout << "val_" << k << " " << v << "\n";
    for (const auto& [k, v] : report.test_metrics) std::cout << "test_" << k << " " << v << "\n";
    return kExitOk;
}

int cmd_eval(const std::string& report_path) {
    std::ifstream in(report_path);
    if (!in) throw gil::ValidationError("cannot open report: " + report_path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw gil::ValidationError("malformed report " + report_path + ": " + e.what());
    }
    std::cout << "task " << j.at("task").get<std::string>() << "\n";
    std::cout << "seed " << j.at("seed") << "\n";
    std::cout << "best_epoch " << j.at("best_epoch") << "\n";
    for (const auto& [k, v] : j.at("val").items()) std::cout << "val_" << k << " " << v << "\n";
    for (const auto& [k, v] : j.at("test").items()) std::cout << "test_" << k << " " << v << "\n";
    return kExitOk;
}

int cmd_hyperbolicity(const std::string& edges_path, const std::string& mode, long long samples,
                      std::uint64_t seed, const std::string& out_path) {
    // topology only; no feature file needed for this analysis
    std::vector<std::pair<int, int>> raw;
    int n = 0;
    {
        std::ifstream in(edges_path);
        if (!in) throw gil::ValidationError("cannot open file: " + edges_path);
        std::string line;
        long lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty() || line[0] == '#') continue;
            std::istringstream ss(line);
            long long u, v;
            if (!(ss >> u >> v)) throw gil::ParseError(edges_path, lineno, "expected two node ids");
            if (u < 0 || v < 0) throw gil::ParseError(edges_path, lineno, "negative node id");
            if (u == v) {
                std::cerr << "warning: " << edges_path << ":" << lineno << ": dropping self-loop\n";
                continue;
            }
            raw.emplace_back(static_cast<int>(u), static_cast<int>(v));
            n = std::max({n, static_cast<int>(u) + 1, static_cast<int>(v) + 1});
        }
    }
    Graph g = gil::graphcore::make_graph(n, raw, gil::Tensor(n, 0));
    Graph comp = gil::graphcore::max_connected_subgraph(g);

    gil::graphcore::DeltaHistogram hist;
    if (mode == "exact")
        hist = gil::graphcore::hyperbolicity_distribution_exact(comp);
    else
        hist = gil::graphcore::hyperbolicity_distribution_sampled(comp, samples, seed);

    const std::string doc = gil::graphcore::format_delta_histogram(hist, comp.n);
    if (out_path.empty()) {
        std::cout << doc;
    } else {
        std::ofstream out(out_path);
        if (!out) throw gil::ValidationError("cannot write file: " + out_path);
        out << doc;
    }
    return kExitOk;
}

int cmd_generate(const std::string& kind, const DatasetFlags& flags, std::uint64_t seed,
                 const std::string& prefix) {
    DatasetFlags gen = flags;
    gen.synthetic = kind;
    gen.data_seed = seed;
    Graph g = gen.resolve();
    gil::graphcore::save_edges(g, prefix + ".edges");
    gil::graphcore::save_features(g, prefix + ".features");
    gil::graphcore::save_labels(g, prefix + ".labels");
    std::cout << "nodes " << g.n << "\n";
    std::cout << "edges " << g.edges.size() << "\n";
    std::cout << "files " << prefix << ".edges " << prefix << ".features " << prefix << ".labels\n";
    return kExitOk;
}

/// Random-attachment tree on n nodes: parent of i drawn from [0, i).
Graph small_gradcheck_tree(int n, int feature_dim, std::uint64_t seed) {
    gil::Rng rng(seed);
    std::vector<std::pair<int, int>> edges;
    for (int i = 1; i < n; ++i) edges.emplace_back(rng.uniform_int(0, i - 1), i);
    gil::Tensor features = rng.normal_tensor(n, feature_dim, 0.0, 1.0);
    std::vector<int> labels(static_cast<size_t>(n));
    for (auto& l : labels) l = rng.uniform_int(0, 1);
    return gil::graphcore::make_graph(n, edges, std::move(features), std::move(labels));
}

int cmd_gradcheck(const std::string& config_path, std::optional<std::uint64_t> seed_flag,
                  bool sabotage) {
    gil::train::TrainConfig cfg;
    cfg.hidden_dim = 8;
    if (!config_path.empty()) cfg = gil::train::load_config_file(config_path);
    if (seed_flag) cfg.seed = *seed_flag;
    cfg.validate();

    Graph g = small_gradcheck_tree(20, 6, cfg.seed);
    gil::train::ExperimentData data;
    if (cfg.task == Task::node_classification) {
        gil::graphcore::NodeSplit split;
        for (int i = 0; i < g.n; ++i) split.train.push_back(i);
        split.val = split.train;
        split.test = split.train;
        data.node_split = split;
    } else {
        // the graph is below the split_edges minimum; use all edges as
        // positives and sample one negative per positive
        gil::graphcore::EdgeSplit split;
        split.train_pos = g.edges;
        gil::Rng rng(cfg.seed + 1);
        std::set<std::pair<int, int>> taken(g.edges.begin(), g.edges.end());
        while (split.train_neg.size() < split.train_pos.size()) {
            int u = rng.uniform_int(0, g.n - 1);
            int v = rng.uniform_int(0, g.n - 1);
            if (u == v) continue;
            auto e = std::minmax(u, v);
            if (taken.insert({e.first, e.second}).second)
                split.train_neg.push_back({e.first, e.second});
        }
        split.val_pos = split.test_pos = split.train_pos;
        split.val_neg = split.test_neg = split.train_neg;
        split.train_graph = g;
        data.edge_split = split;
    }
    data.graph = std::move(g);

    gil::ad::LossBuilder builder = gil::train::make_loss_builder(cfg, data);
    gil::model::GilParams params = gil::train::init_params_for(cfg, data);
    // checked at a generic point; the symmetric init sits on activation kinks
    gil::train::perturb_params(params, 0.05, cfg.seed + 17);
    const std::vector<gil::Tensor> flat = params.flatten();

    gil::ad::Tape tape;
    gil::ad::Var loss = builder(tape, flat);
    tape.backward(loss);
    std::vector<gil::Tensor> analytic;
    for (int id : tape.leaf_ids()) analytic.push_back(tape.grad(id));
    if (sabotage && !analytic.empty() && analytic[0].size() > 0)
        analytic[0].v[0] += 0.5;  // negative control: corrupt one analytic entry

    gil::ad::GradCheckResult res =
        gil::ad::compare_against_finite_diff_multi(builder, flat, analytic, {1e-6, 1e-5, 1e-4});

    auto refs = params.param_refs();
    std::printf("max_rel_error %.6e\n", res.max_rel_error);
    if (res.worst_param >= 0)
        std::printf("worst %s[%d] analytic %.9e numeric %.9e\n",
                    refs[static_cast<size_t>(res.worst_param)].name.c_str(), res.worst_coord,
                    res.analytic, res.numeric);
    return res.max_rel_error < 1e-4 ? kExitOk : kExitVerifyFail;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"geometric graph learning toolkit"};
    app.require_subcommand(1);

    // train
    auto* train = app.add_subcommand("train", "train a model and write a run report");
    DatasetFlags train_data;
    train_data.attach(train);
    std::string train_config, train_task, train_out;
    std::vector<std::string> train_variant;
    std::optional<std::uint64_t> train_seed;
    std::optional<int> train_epochs;
    SplitFlags split_flags;
    train->add_option("--config", train_config, "key-value config file");
    train->add_option("--task", train_task, "nc|lp")->check(CLI::IsMember({"nc", "lp"}));
    train->add_option("--seed", train_seed, "parameter init / run seed");
    train->add_option("--max-epochs", train_epochs, "epoch cap override");
    train->add_option("--split-seed", split_flags.seed, "dataset split seed");
    train->add_option("--train-frac", split_flags.train_frac, "train split fraction");
    train->add_option("--val-frac", split_flags.val_frac, "validation split fraction");
    train->add_option("--test-frac", split_flags.test_frac, "test split fraction");
    train->add_option("--variant", train_variant, "model variant overrides, e.g. fusion=none");
    train->add_option("--out", train_out, "report output path")->required();

    // eval
    auto* eval = app.add_subcommand("eval", "print metrics from a run report");
    std::string eval_report;
    eval->add_option("--report", eval_report, "report file to inspect")->required();

    // hyperbolicity
    auto* hyp = app.add_subcommand("hyperbolicity",
                                   "delta-hyperbolicity distribution of the largest component");
    std::string hyp_edges, hyp_mode = "sampled", hyp_out;
    long long hyp_samples = 100000;
    std::uint64_t hyp_seed = 1;
    hyp->add_option("--edges", hyp_edges, "edge list file")->required();
    hyp->add_option("--mode", hyp_mode, "exact|sampled")->check(CLI::IsMember({"exact", "sampled"}));
    hyp->add_option("--samples", hyp_samples, "sample count for sampled mode");
    hyp->add_option("--seed", hyp_seed, "sampling seed");
    hyp->add_option("--out", hyp_out, "output path (stdout when omitted)");

    // generate
    auto* gen = app.add_subcommand("generate", "write a synthetic dataset to files");
    DatasetFlags gen_flags;
    std::string gen_kind, gen_prefix;
    std::uint64_t gen_seed = 1;
    gen->add_option("--kind", gen_kind, "tree|grid")
        ->required()
        ->check(CLI::IsMember({"tree", "grid"}));
    gen->add_option("--tree-branching", gen_flags.tree_branching, "tree branching factor");
    gen->add_option("--tree-depth", gen_flags.tree_depth, "tree depth");
    gen->add_option("--grid-rows", gen_flags.grid_rows, "grid rows");
    gen->add_option("--grid-cols", gen_flags.grid_cols, "grid cols");
    gen->add_option("--feature-dim", gen_flags.feature_dim, "feature dimension");
    gen->add_option("--seed", gen_seed, "generation seed");
    gen->add_option("--out-prefix", gen_prefix, "output file prefix")->required();

    // gradcheck
    auto* gc = app.add_subcommand("gradcheck",
                                  "finite-difference check of the full configured loss");
    std::string gc_config;
    std::optional<std::uint64_t> gc_seed;
    bool gc_sabotage = false;
    gc->add_option("--config", gc_config, "key-value config file");
    gc->add_option("--seed", gc_seed, "dataset/init seed");
    gc->add_flag("--sabotage", gc_sabotage, "perturb one analytic gradient (negative control)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int cli_code = app.exit(e);
        return cli_code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*train)
            return cmd_train(train_data, train_config, train_variant, train_task, train_seed,
                             train_epochs, split_flags, train_out);
        if (*eval) return cmd_eval(eval_report);
        if (*hyp) return cmd_hyperbolicity(hyp_edges, hyp_mode, hyp_samples, hyp_seed, hyp_out);
        if (*gen) return cmd_generate(gen_kind, gen_flags, gen_seed, gen_prefix);
        if (*gc) return cmd_gradcheck(gc_config, gc_seed, gc_sabotage);
    } catch (const gil::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const gil::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const gil::TrainingDiverged& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitVerifyFail;
    } catch (const gil::ContractViolation& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
