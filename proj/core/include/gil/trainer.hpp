#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gil/model.hpp"
#include "gil/splits.hpp"

namespace gil::train {

using graphcore::Task;

struct TrainConfig {
    Task task = Task::node_classification;
    int layers = 2;
    int hidden_dim = 16;
    double lr = 0.01;
    double weight_decay = 5e-4;
    double dropout = 0.0;
    int patience = 100;
    int max_epochs = 1000;
    std::uint64_t seed = 1;
    model::ModelVariant variant;
    double fermi_r = 2.0;
    double fermi_t = 1.0;
    double curvature = 1.0;
    bool self_distance_one = false;
    bool euclidean_distance_attention = false;

    void validate() const;
    model::GilConfig gil_config() const;
};

/// Flat key-value config file (one "key value" pair per line, '#' comments).
TrainConfig parse_config(const std::string& text);
TrainConfig load_config_file(const std::string& path);
std::string format_config(const TrainConfig& cfg);

/// Dataset plus resolved splits for one task. For link prediction, message
/// passing runs on edge_split->train_graph.
struct ExperimentData {
    graphcore::Graph graph;
    std::optional<graphcore::NodeSplit> node_split;
    std::optional<graphcore::EdgeSplit> edge_split;

    const graphcore::Graph& message_graph(Task task) const;
};
ExperimentData make_experiment_data(graphcore::Graph g, Task task, double train_frac,
                                    double val_frac, double test_frac, std::uint64_t split_seed);

/// Mean negative log probability of the true class over the masked nodes.
/// probs must hold strictly positive renormalized rows.
ad::Var nc_loss(ad::Tape& tape, ad::Var probs, const std::vector<int>& labels,
                const std::vector<int>& mask);

/// -mean log p over positives - mean log(1-p) over negatives.
ad::Var lp_loss(ad::Tape& tape, ad::Var pos_probs, ad::Var neg_probs);

/// Reported weight-decay term (wd/2)*sum||W||^2 over decay-flagged tensors.
/// Parameter updates apply the decay decoupled inside adam_step instead, so
/// the term is never double-counted in gradients.
double weight_decay_term(model::GilParams& params, double weight_decay);

struct AdamState {
    std::vector<Tensor> m, v;
    long long step = 0;
};

/// AdamW step: bias-corrected moments (beta1=0.9, beta2=0.999, eps=1e-8) plus
/// decoupled weight decay on decay-flagged tensors only.
void adam_step(std::vector<model::GilParams::Ref>& params, const std::vector<Tensor>& grads,
               AdamState& state, double lr, double weight_decay);

struct RunReport {
    TrainConfig config;
    int epochs_run = 0;
    int best_epoch = 0;
    std::map<std::string, double> val_metrics;
    std::map<std::string, double> test_metrics;
    std::vector<double> loss_curve;
    double wall_clock_sec = 0.0;
    model::ForwardAudit audit;
};

std::string format_report(const RunReport& report);
void write_report(const RunReport& report, const std::string& path);

/// Full-batch training with early stopping on the validation metric
/// (accuracy / binary F1 for NC, AUC for LP). The test metric is computed
/// once, from the parameter snapshot taken at the best validation epoch.
RunReport run_experiment(const TrainConfig& cfg, const ExperimentData& data);

struct Aggregate {
    double mean = 0.0;
    double stddev = 0.0;  // population
    double median = 0.0;
};
struct SweepResult {
    std::vector<RunReport> runs;
    std::map<std::string, Aggregate> val_metrics;
    std::map<std::string, Aggregate> test_metrics;
};
SweepResult seed_sweep(const TrainConfig& cfg, const ExperimentData& data,
                       const std::vector<std::uint64_t>& seeds);

/// Loss builder over a flat parameter vector for finite-difference checks.
/// Dropout masks are pregenerated from cfg.seed and held fixed inside.
ad::LossBuilder make_loss_builder(const TrainConfig& cfg, const ExperimentData& data);

/// Template parameters (shapes + deterministic init) for the configured model.
model::GilParams init_params_for(const TrainConfig& cfg, const ExperimentData& data);

/// Add seeded uniform noise in [-scale, scale] to every coordinate. Gradient
/// checks run at such a generic point: the zero-initialized one sits exactly
/// on ReLU/attention kinks (dead rows brought to life by the fusion weights),
/// where one-sided slopes differ and central differences measure neither.
void perturb_params(model::GilParams& params, double scale, std::uint64_t seed);

}  // namespace gil::train
