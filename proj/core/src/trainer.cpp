#include "gil/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include "gil/error.hpp"
#include "gil/metrics.hpp"

namespace gil::train {

using ad::Tape;
using ad::Var;
using graphcore::Graph;
using model::GilParams;
using model::GilVars;

void TrainConfig::validate() const {
    require(layers >= 1 && layers <= 3, "TrainConfig: layers must be in {1,2,3}");
    require(hidden_dim >= 2, "TrainConfig: hidden_dim must be >= 2");
    require(lr > 0.0, "TrainConfig: lr must be positive");
    require(weight_decay >= 0.0, "TrainConfig: weight_decay must be nonnegative");
    require(dropout >= 0.0 && dropout <= 0.6, "TrainConfig: dropout must be in [0, 0.6]");
    require(patience >= 0, "TrainConfig: patience must be nonnegative");
    require(max_epochs >= 1, "TrainConfig: max_epochs must be >= 1");
    require(fermi_t > 0.0, "TrainConfig: fermi_t must be positive");
    require(curvature > 0.0, "TrainConfig: curvature must be positive");
}

model::GilConfig TrainConfig::gil_config() const {
    model::GilConfig g;
    g.layers = layers;
    g.hidden_dim = hidden_dim;
    g.curvature = curvature;
    g.dropout = dropout;
    g.fermi_r = fermi_r;
    g.fermi_t = fermi_t;
    g.variant = variant;
    g.self_distance_one = self_distance_one;
    g.euclidean_distance_attention = euclidean_distance_attention;
    return g;
}

namespace {

bool parse_on_off(const std::string& v, const std::string& key) {
    if (v == "on" || v == "true" || v == "1") return true;
    if (v == "off" || v == "false" || v == "0") return false;
    throw ValidationError("config key '" + key + "': expected on/off, got '" + v + "'");
}

}  // namespace

TrainConfig parse_config(const std::string& text) {
    TrainConfig cfg;
    std::istringstream in(text);
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::istringstream ss(line);
        std::string key, value;
        if (!(ss >> key)) continue;
        if (!(ss >> value)) throw ParseError("<config>", lineno, "key '" + key + "' has no value");
        std::string extra;
        if (ss >> extra) throw ParseError("<config>", lineno, "trailing tokens after value");
        try {
            if (key == "task")
                cfg.task = value == "nc"   ? Task::node_classification
                           : value == "lp" ? Task::link_prediction
                                           : throw ValidationError("task must be nc or lp");
            else if (key == "layers")
                cfg.layers = std::stoi(value);
            else if (key == "hidden_dim")
                cfg.hidden_dim = std::stoi(value);
            else if (key == "lr")
                cfg.lr = std::stod(value);
            else if (key == "weight_decay")
                cfg.weight_decay = std::stod(value);
            else if (key == "dropout")
                cfg.dropout = std::stod(value);
            else if (key == "patience")
                cfg.patience = std::stoi(value);
            else if (key == "max_epochs")
                cfg.max_epochs = std::stoi(value);
            else if (key == "seed")
                cfg.seed = std::stoull(value);
            else if (key == "curvature")
                cfg.curvature = std::stod(value);
            else if (key == "fermi_r")
                cfg.fermi_r = std::stod(value);
            else if (key == "fermi_t")
                cfg.fermi_t = std::stod(value);
            else if (key == "fusion")
                cfg.variant.fusion = model::fusion_from_string(value);
            else if (key == "distance_attention")
                cfg.variant.distance_attention = parse_on_off(value, key);
            else if (key == "head")
                cfg.variant.head = model::head_from_string(value);
            else if (key == "self_distance_one")
                cfg.self_distance_one = parse_on_off(value, key);
            else if (key == "euclidean_distance_attention")
                cfg.euclidean_distance_attention = parse_on_off(value, key);
            else
                throw ValidationError("unknown config key '" + key + "'");
        } catch (const std::invalid_argument&) {
            throw ParseError("<config>", lineno, "bad value for key '" + key + "': " + value);
        } catch (const std::out_of_range&) {
            throw ParseError("<config>", lineno, "value out of range for key '" + key + "'");
        }
    }
    cfg.validate();
    return cfg;
}

TrainConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_config(buf.str());
    } catch (const ParseError& e) {
        throw ParseError(path, e.line_number, e.what());
    }
}

std::string format_config(const TrainConfig& cfg) {
    std::ostringstream out;
    out << "task " << (cfg.task == Task::node_classification ? "nc" : "lp") << "\n";
    out << "layers " << cfg.layers << "\n";
    out << "hidden_dim " << cfg.hidden_dim << "\n";
    out << "lr " << cfg.lr << "\n";
    out << "weight_decay " << cfg.weight_decay << "\n";
    out << "dropout " << cfg.dropout << "\n";
    out << "patience " << cfg.patience << "\n";
    out << "max_epochs " << cfg.max_epochs << "\n";
    out << "seed " << cfg.seed << "\n";
    out << "curvature " << cfg.curvature << "\n";
    out << "fermi_r " << cfg.fermi_r << "\n";
    out << "fermi_t " << cfg.fermi_t << "\n";
    out << "fusion " << model::to_string(cfg.variant.fusion) << "\n";
    out << "distance_attention " << (cfg.variant.distance_attention ? "on" : "off") << "\n";
    out << "head " << model::to_string(cfg.variant.head) << "\n";
    out << "self_distance_one " << (cfg.self_distance_one ? "on" : "off") << "\n";
    out << "euclidean_distance_attention " << (cfg.euclidean_distance_attention ? "on" : "off")
        << "\n";
    return out.str();
}

const Graph& ExperimentData::message_graph(Task task) const {
    if (task == Task::link_prediction) {
        require(edge_split.has_value(), "ExperimentData: edge split missing for link prediction");
        return edge_split->train_graph;
    }
    return graph;
}

ExperimentData make_experiment_data(Graph g, Task task, double train_frac, double val_frac,
                                    double test_frac, std::uint64_t split_seed) {
    graphcore::SplitSpec spec;
    spec.task = task;
    spec.train_frac = train_frac;
    spec.val_frac = val_frac;
    spec.test_frac = test_frac;
    spec.seed = split_seed;

    ExperimentData data;
    if (task == Task::node_classification)
        data.node_split = graphcore::split_nodes(g, spec);
    else
        data.edge_split = graphcore::split_edges(g, spec);
    data.graph = std::move(g);
    return data;
}

Var nc_loss(Tape& t, Var probs, const std::vector<int>& labels, const std::vector<int>& mask) {
    require(!mask.empty(), "nc_loss: empty mask");
    const int m = probs.cols();
    Tensor onehot(static_cast<int>(mask.size()), m);
    for (size_t k = 0; k < mask.size(); ++k) {
        const int node = mask[k];
        require(node >= 0 && node < probs.rows(), "nc_loss: mask index out of range");
        const int label = labels[static_cast<size_t>(node)];
        require(label >= 0 && label < m, "nc_loss: masked node lacks a valid label");
        onehot.at(static_cast<int>(k), label) = 1.0;
    }
    Var picked = t.gather_rows(probs, mask);
    Var true_prob = t.row_sum(t.mul(picked, t.constant(onehot)));
    return t.mul_const(t.mean(t.log(t.clamp_min(true_prob, 1e-300))), -1.0);
}

Var lp_loss(Tape& t, Var pos_probs, Var neg_probs) {
    Var pos_term = t.mean(t.log(pos_probs));
    Var neg_term = t.mean(t.log(t.add_const(t.mul_const(neg_probs, -1.0), 1.0)));
    return t.mul_const(t.add(pos_term, neg_term), -1.0);
}

double weight_decay_term(GilParams& params, double weight_decay) {
    double acc = 0.0;
    for (const auto& ref : params.param_refs()) {
        if (!ref.decay) continue;
        for (double x : ref.tensor->v) acc += x * x;
    }
    return 0.5 * weight_decay * acc;
}

void adam_step(std::vector<GilParams::Ref>& params, const std::vector<Tensor>& grads,
               AdamState& state, double lr, double weight_decay) {
    require(params.size() == grads.size(), "adam_step: gradient count mismatch");
    constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    if (state.m.empty()) {
        for (const auto& ref : params) {
            state.m.emplace_back(ref.tensor->rows, ref.tensor->cols);
            state.v.emplace_back(ref.tensor->rows, ref.tensor->cols);
        }
    }
    require(state.m.size() == params.size(), "adam_step: state shape mismatch");
    ++state.step;
    const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(state.step));
    for (size_t p = 0; p < params.size(); ++p) {
        Tensor& theta = *params[p].tensor;
        require(theta.same_shape(grads[p]), "adam_step: gradient shape mismatch");
        for (size_t k = 0; k < theta.size(); ++k) {
            const double g = grads[p].v[k];
            double& m = state.m[p].v[k];
            double& v = state.v[p].v[k];
            m = beta1 * m + (1.0 - beta1) * g;
            v = beta2 * v + (1.0 - beta2) * g * g;
            const double mhat = m / bc1;
            const double vhat = v / bc2;
            theta.v[k] -= lr * mhat / (std::sqrt(vhat) + eps);
            if (params[p].decay) theta.v[k] -= lr * weight_decay * theta.v[k];
        }
    }
}

namespace {

std::vector<int> argmax_rows(const Tensor& probs) {
    std::vector<int> pred(static_cast<size_t>(probs.rows), 0);
    for (int i = 0; i < probs.rows; ++i) {
        int best = 0;
        for (int j = 1; j < probs.cols; ++j)
            if (probs.at(i, j) > probs.at(i, best)) best = j;  // ties stay at lowest id
        pred[static_cast<size_t>(i)] = best;
    }
    return pred;
}

std::vector<double> column_values(const Tensor& t) {
    return t.v;
}

struct EvalOutcome {
    std::map<std::string, double> val, test;
    double selection = 0.0;  // early-stopping metric (validation)
};

/// Dropout-free forward pass and metric computation for both eval splits.
EvalOutcome evaluate(const TrainConfig& cfg, const ExperimentData& data,
                     const model::AttentionIndex& idx, GilParams& params,
                     model::ForwardAudit* audit, bool want_test) {
    Tape tape;
    const model::GilConfig gcfg = cfg.gil_config();
    GilVars vars = model::register_params(tape, params, cfg.task, gcfg);
    const Graph& g = data.message_graph(cfg.task);
    model::ForwardResult fw = model::forward(tape, vars, g, idx, gcfg, cfg.task, nullptr, audit);

    EvalOutcome out;
    if (cfg.task == Task::node_classification) {
        const auto& split = *data.node_split;
        const auto pred = argmax_rows(fw.probs.value());
        const bool binary = data.graph.num_classes() == 2;
        out.val["accuracy"] = accuracy(pred, data.graph.labels, split.val);
        if (binary) out.val["f1"] = f1_binary(pred, data.graph.labels, split.val);
        if (want_test) {
            out.test["accuracy"] = accuracy(pred, data.graph.labels, split.test);
            if (binary) out.test["f1"] = f1_binary(pred, data.graph.labels, split.test);
        }
        out.selection = binary ? out.val["f1"] : out.val["accuracy"];
    } else {
        const auto& split = *data.edge_split;
        auto scores = [&](const std::vector<std::pair<int, int>>& pairs) {
            return column_values(
                model::link_probabilities(tape, vars, fw.embedding, pairs, gcfg, audit).value());
        };
        out.val["auc"] = roc_auc(scores(split.val_pos), scores(split.val_neg));
        if (want_test) out.test["auc"] = roc_auc(scores(split.test_pos), scores(split.test_neg));
        out.selection = out.val["auc"];
    }
    return out;
}

}  // namespace

GilParams init_params_for(const TrainConfig& cfg, const ExperimentData& data) {
    const int classes = data.graph.num_classes();
    return model::init_gil_params(data.graph.feature_dim(), classes, cfg.task, cfg.gil_config(),
                                  cfg.seed);
}

void perturb_params(GilParams& params, double scale, std::uint64_t seed) {
    Rng rng(seed);
    for (auto& ref : params.param_refs())
        for (double& x : ref.tensor->v) x += rng.uniform(-scale, scale);
}

ad::LossBuilder make_loss_builder(const TrainConfig& cfg, const ExperimentData& data) {
    cfg.validate();
    const model::GilConfig gcfg = cfg.gil_config();
    const GilParams shapes = init_params_for(cfg, data);
    const Graph& g = data.message_graph(cfg.task);
    const model::AttentionIndex idx = model::build_attention_index(g);
    // masks frozen from the experiment seed so the closure is a fixed function
    Rng mask_rng(cfg.seed);
    const model::DropoutMasks masks =
        model::make_dropout_masks(g.n, g.feature_dim(), gcfg, mask_rng);

    // data captured by value: the closure must outlive the caller's dataset
    return [cfg, gcfg, shapes, data, idx, masks](Tape& tape,
                                                 const std::vector<Tensor>& flat) -> Var {
        GilVars vars = model::register_params_from(tape, shapes, cfg.task, gcfg, flat);
        const Graph& graph = data.message_graph(cfg.task);
        model::ForwardResult fw = model::forward(tape, vars, graph, idx, gcfg, cfg.task,
                                                 masks.empty() ? nullptr : &masks, nullptr);
        if (cfg.task == Task::node_classification) {
            return nc_loss(tape, fw.probs, data.graph.labels, data.node_split->train);
        }
        const auto& split = *data.edge_split;
        Var pos = model::link_probabilities(tape, vars, fw.embedding, split.train_pos, gcfg);
        Var neg = model::link_probabilities(tape, vars, fw.embedding, split.train_neg, gcfg);
        return lp_loss(tape, pos, neg);
    };
}

RunReport run_experiment(const TrainConfig& cfg, const ExperimentData& data) {
    cfg.validate();
    const auto t0 = std::chrono::steady_clock::now();
    const model::GilConfig gcfg = cfg.gil_config();
    const Graph& g = data.message_graph(cfg.task);
    require(g.n > 0, "run_experiment: empty graph");
    if (cfg.task == Task::node_classification)
        require(data.node_split.has_value(), "run_experiment: node split missing");

    if (cfg.task == Task::node_classification) {
        const auto& s = *data.node_split;
        if (s.train.empty() || s.val.empty() || s.test.empty())
            throw ValidationError(
                "run_experiment: a node split is empty (train " + std::to_string(s.train.size()) +
                ", val " + std::to_string(s.val.size()) + ", test " + std::to_string(s.test.size()) +
                "); use a larger dataset or different fractions");
    } else {
        const auto& s = *data.edge_split;
        if (s.train_pos.empty() || s.val_pos.empty() || s.test_pos.empty())
            throw ValidationError("run_experiment: an edge split is empty; use a larger dataset");
    }

    const model::AttentionIndex idx = model::build_attention_index(g);
    GilParams params = init_params_for(cfg, data);
    auto refs = params.param_refs();
    AdamState adam;
    Rng dropout_rng(cfg.seed ^ 0x9e3779b97f4a7c15ull);

    RunReport report;
    report.config = cfg;
    double best_val = -1.0;
    GilParams best_params = params;

    int bad_epochs = 0;
    for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        // training step
        {
            Tape tape;
            GilVars vars = model::register_params(tape, params, cfg.task, gcfg);
            const model::DropoutMasks masks =
                model::make_dropout_masks(g.n, g.feature_dim(), gcfg, dropout_rng);
            model::ForwardResult fw = model::forward(tape, vars, g, idx, gcfg, cfg.task,
                                                     masks.empty() ? nullptr : &masks, &report.audit);
            Var objective;
            if (cfg.task == Task::node_classification) {
                objective = nc_loss(tape, fw.probs, data.graph.labels, data.node_split->train);
            } else {
                const auto& split = *data.edge_split;
                Var pos = model::link_probabilities(tape, vars, fw.embedding, split.train_pos, gcfg,
                                                    &report.audit);
                Var neg = model::link_probabilities(tape, vars, fw.embedding, split.train_neg, gcfg,
                                                    &report.audit);
                objective = lp_loss(tape, pos, neg);
            }
            const double obj_value = objective.value().v[0];
            if (!std::isfinite(obj_value))
                throw TrainingDiverged("epoch " + std::to_string(epoch) +
                                       ": non-finite training loss");
            report.loss_curve.push_back(obj_value + weight_decay_term(params, cfg.weight_decay));

            tape.backward(objective);
            const std::vector<int> leaves = tape.leaf_ids();
            std::vector<Tensor> grads;
            grads.reserve(leaves.size());
            for (int id : leaves) grads.push_back(tape.grad(id));
            adam_step(refs, grads, adam, cfg.lr, cfg.weight_decay);
        }

        // validation (dropout off); audit keeps accumulating
        EvalOutcome ev = evaluate(cfg, data, idx, params, &report.audit, false);
        report.epochs_run = epoch;
        if (ev.selection > best_val) {
            best_val = ev.selection;
            report.best_epoch = epoch;
            report.val_metrics = ev.val;
            best_params = params;
            bad_epochs = 0;
        } else {
            ++bad_epochs;
            if (bad_epochs > cfg.patience) break;
        }
    }

    // test metrics only from the best-validation snapshot
    EvalOutcome final_ev = evaluate(cfg, data, idx, best_params, &report.audit, true);
    report.test_metrics = final_ev.test;

    report.wall_clock_sec =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

namespace {

Aggregate aggregate_of(std::vector<double> xs) {
    Aggregate a;
    const double n = static_cast<double>(xs.size());
    for (double x : xs) a.mean += x;
    a.mean /= n;
    for (double x : xs) a.stddev += (x - a.mean) * (x - a.mean);
    a.stddev = std::sqrt(a.stddev / n);
    std::sort(xs.begin(), xs.end());
    const size_t mid = xs.size() / 2;
    a.median = xs.size() % 2 == 1 ? xs[mid] : 0.5 * (xs[mid - 1] + xs[mid]);
    return a;
}

}  // namespace

SweepResult seed_sweep(const TrainConfig& cfg, const ExperimentData& data,
                       const std::vector<std::uint64_t>& seeds) {
    require(!seeds.empty(), "seed_sweep: need at least one seed");
    SweepResult sweep;
    for (std::uint64_t s : seeds) {
        TrainConfig run_cfg = cfg;
        run_cfg.seed = s;
        sweep.runs.push_back(run_experiment(run_cfg, data));
    }
    auto collect = [&](auto metric_of) {
        std::map<std::string, Aggregate> out;
        for (const auto& [name, _] : metric_of(sweep.runs.front())) {
            std::vector<double> xs;
            for (const auto& run : sweep.runs) xs.push_back(metric_of(run).at(name));
            out[name] = aggregate_of(std::move(xs));
        }
        return out;
    };
    sweep.val_metrics = collect([](const RunReport& r) { return r.val_metrics; });
    sweep.test_metrics = collect([](const RunReport& r) { return r.test_metrics; });
    return sweep;
}

}  // namespace gil::train
