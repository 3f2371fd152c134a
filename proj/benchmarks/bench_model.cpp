#include <benchmark/benchmark.h>

#include "gil/datasets.hpp"
#include "gil/model.hpp"
#include "gil/trainer.hpp"

using namespace gil;
using graphcore::Task;

namespace {

graphcore::Graph bench_tree(int depth) {
    graphcore::TreeOptions opt;
    opt.branching = 3;
    opt.depth = depth;
    opt.seed = 1;
    return graphcore::generate_tree_dataset(opt);
}

}  // namespace

static void BM_ForwardNC(benchmark::State& state) {
    graphcore::Graph g = bench_tree(static_cast<int>(state.range(0)));
    model::GilConfig cfg;
    cfg.layers = 2;
    cfg.hidden_dim = 16;
    model::GilParams params =
        model::init_gil_params(g.feature_dim(), 2, Task::node_classification, cfg, 7);
    auto idx = model::build_attention_index(g);
    for (auto _ : state) {
        ad::Tape tape;
        auto vars = model::register_params(tape, params, Task::node_classification, cfg);
        auto res = model::forward(tape, vars, g, idx, cfg, Task::node_classification);
        benchmark::DoNotOptimize(res.probs.value().v.data());
    }
    state.SetItemsProcessed(state.iterations() * g.n);
}
BENCHMARK(BM_ForwardNC)->Arg(4)->Arg(5)->Arg(6);

static void BM_TrainEpochLP(benchmark::State& state) {
    graphcore::Graph g = bench_tree(static_cast<int>(state.range(0)));
    train::TrainConfig cfg;
    cfg.task = Task::link_prediction;
    cfg.layers = 2;
    cfg.hidden_dim = 16;
    cfg.fermi_r = 0.5;
    train::ExperimentData data =
        train::make_experiment_data(g, Task::link_prediction, 0.85, 0.05, 0.10, 3);
    model::GilParams params = train::init_params_for(cfg, data);
    auto refs = params.param_refs();
    train::AdamState adam;
    auto idx = model::build_attention_index(data.message_graph(cfg.task));
    const model::GilConfig gcfg = cfg.gil_config();
    for (auto _ : state) {
        ad::Tape tape;
        auto vars = model::register_params(tape, params, cfg.task, gcfg);
        auto fw = model::forward(tape, vars, data.message_graph(cfg.task), idx, gcfg, cfg.task);
        auto pos = model::link_probabilities(tape, vars, fw.embedding, data.edge_split->train_pos,
                                             gcfg);
        auto neg = model::link_probabilities(tape, vars, fw.embedding, data.edge_split->train_neg,
                                             gcfg);
        auto loss = train::lp_loss(tape, pos, neg);
        tape.backward(loss);
        std::vector<Tensor> grads;
        for (int id : tape.leaf_ids()) grads.push_back(tape.grad(id));
        train::adam_step(refs, grads, adam, cfg.lr, cfg.weight_decay);
        benchmark::DoNotOptimize(loss.value().v[0]);
    }
}
BENCHMARK(BM_TrainEpochLP)->Arg(5)->Arg(6)->Unit(benchmark::kMillisecond);
