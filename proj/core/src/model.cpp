#include "gil/model.hpp"

#include <algorithm>
#include <cmath>

#include "gil/error.hpp"
#include "gil/manifold.hpp"

namespace gil::model {

using ad::Tape;
using ad::Var;
using graphcore::Graph;
using graphcore::Task;

std::string to_string(Fusion f) {
    switch (f) {
        case Fusion::full: return "full";
        case Fusion::none: return "none";
        case Fusion::hyp_to_euc: return "hyp_to_euc";
        case Fusion::euc_to_hyp: return "euc_to_hyp";
    }
    return "full";
}

std::string to_string(Head h) {
    switch (h) {
        case Head::assembled: return "assembled";
        case Head::concat_euclidean: return "concat_euclidean";
        case Head::concat_hyperbolic: return "concat_hyperbolic";
        case Head::euclidean_only: return "euclidean_only";
        case Head::hyperbolic_only: return "hyperbolic_only";
    }
    return "assembled";
}

Fusion fusion_from_string(const std::string& s) {
    if (s == "full") return Fusion::full;
    if (s == "none") return Fusion::none;
    if (s == "hyp_to_euc") return Fusion::hyp_to_euc;
    if (s == "euc_to_hyp") return Fusion::euc_to_hyp;
    throw ValidationError("unknown fusion variant: " + s);
}

Head head_from_string(const std::string& s) {
    if (s == "assembled") return Head::assembled;
    if (s == "concat_euclidean") return Head::concat_euclidean;
    if (s == "concat_hyperbolic") return Head::concat_hyperbolic;
    if (s == "euclidean_only") return Head::euclidean_only;
    if (s == "hyperbolic_only") return Head::hyperbolic_only;
    throw ValidationError("unknown head variant: " + s);
}

namespace {

bool needs_hyp_head(Task task, Head head) {
    return task == Task::node_classification &&
           (head == Head::assembled || head == Head::concat_hyperbolic ||
            head == Head::hyperbolic_only);
}
bool needs_euc_head(Task task, Head head) {
    return task == Task::node_classification &&
           (head == Head::assembled || head == Head::euclidean_only);
}
bool needs_lambda_heads(Head head) { return head == Head::assembled; }
bool needs_concat_f(Task task, Head head) {
    return task == Task::node_classification && head == Head::concat_euclidean;
}
bool needs_concat_g(Task task, Head head) {
    return task == Task::node_classification && head == Head::concat_hyperbolic;
}

}  // namespace

GilParams init_gil_params(int input_dim, int num_classes, Task task, const GilConfig& cfg,
                          std::uint64_t seed) {
    require(input_dim >= 1, "init_gil_params: input_dim must be positive");
    require(cfg.layers >= 1 && cfg.layers <= 3, "init_gil_params: layer count must be in {1,2,3}");
    require(task == Task::link_prediction || num_classes >= 2,
            "init_gil_params: node classification needs at least two classes");
    const int hid = cfg.hidden_dim;
    Rng rng(seed);

    GilParams p;
    for (int k = 0; k < cfg.layers; ++k) {
        const int in = k == 0 ? input_dim : hid;
        GilParams::Layer layer;
        layer.w_e = rng.fan_uniform(in, hid, in);
        layer.a_e = rng.fan_uniform(2 * hid, 1, 2 * hid);
        layer.w_h = rng.fan_uniform(in, hid, in);
        layer.b_h = Tensor(1, hid);
        layer.a_h = rng.fan_uniform(2 * hid, 1, 2 * hid);
        layer.beta = Tensor::scalar(0.0);
        layer.beta_p = Tensor::scalar(0.0);
        p.layers.push_back(std::move(layer));
    }
    const Head head = cfg.variant.head;
    const int m = std::max(num_classes, 2);
    if (needs_hyp_head(task, head)) {
        p.hyp_p_tan = Tensor(m, hid);
        p.hyp_u = rng.fan_uniform(m, hid, hid);
    }
    if (needs_euc_head(task, head)) {
        p.euc_w = rng.fan_uniform(hid, m, hid);
        p.euc_b = Tensor(1, m);
    }
    if (needs_lambda_heads(head)) {
        p.fc0_w = Tensor(hid, 1);
        p.fc0_b = Tensor(1, 1);
        p.fc1_w = Tensor(hid, 1);
        p.fc1_b = Tensor(1, 1);
    }
    if (needs_concat_f(task, head)) p.concat_f = rng.fan_uniform(2 * hid, m, 2 * hid);
    if (needs_concat_g(task, head)) p.concat_g = rng.fan_uniform(2 * hid, hid, 2 * hid);
    return p;
}

std::vector<GilParams::Ref> GilParams::param_refs() {
    std::vector<Ref> refs;
    for (size_t k = 0; k < layers.size(); ++k) {
        const std::string tag = "layer" + std::to_string(k) + ".";
        refs.push_back({tag + "w_e", &layers[k].w_e, true});
        refs.push_back({tag + "a_e", &layers[k].a_e, true});
        refs.push_back({tag + "w_h", &layers[k].w_h, true});
        refs.push_back({tag + "b_h", &layers[k].b_h, false});
        refs.push_back({tag + "a_h", &layers[k].a_h, true});
        refs.push_back({tag + "beta", &layers[k].beta, false});
        refs.push_back({tag + "beta_p", &layers[k].beta_p, false});
    }
    auto maybe = [&](const char* name, Tensor& t, bool decay) {
        if (t.size() > 0) refs.push_back({name, &t, decay});
    };
    maybe("head.hyp_p_tan", hyp_p_tan, false);
    maybe("head.hyp_u", hyp_u, true);
    maybe("head.euc_w", euc_w, true);
    maybe("head.euc_b", euc_b, false);
    maybe("head.fc0_w", fc0_w, true);
    maybe("head.fc0_b", fc0_b, false);
    maybe("head.fc1_w", fc1_w, true);
    maybe("head.fc1_b", fc1_b, false);
    maybe("head.concat_f", concat_f, true);
    maybe("head.concat_g", concat_g, true);
    return refs;
}

std::vector<Tensor> GilParams::flatten() const {
    auto refs = const_cast<GilParams*>(this)->param_refs();
    std::vector<Tensor> out;
    out.reserve(refs.size());
    for (const auto& r : refs) out.push_back(*r.tensor);
    return out;
}

size_t GilParams::coord_count() const {
    size_t n = 0;
    for (const auto& t : flatten()) n += t.size();
    return n;
}

namespace {

GilVars register_impl(Tape& tape, const GilParams& shapes, Task task, const GilConfig& cfg,
                      const std::vector<Tensor>* values) {
    size_t next = 0;
    auto reg = [&](const Tensor& t) -> Var {
        if (!values) return tape.leaf(t);
        require(next < values->size(), "register_params_from: too few tensors");
        require(values->at(next).same_shape(t), "register_params_from: tensor shape mismatch");
        return tape.leaf(values->at(next++));
    };

    GilVars vars;
    for (const auto& layer : shapes.layers) {
        GilVars::Layer lv;
        lv.w_e = reg(layer.w_e);
        lv.a_e = reg(layer.a_e);
        lv.w_h = reg(layer.w_h);
        lv.b_h = reg(layer.b_h);
        lv.a_h = reg(layer.a_h);
        lv.beta = reg(layer.beta);
        lv.beta_p = reg(layer.beta_p);
        vars.layers.push_back(lv);
    }
    const Head head = cfg.variant.head;
    if (needs_hyp_head(task, head)) {
        vars.hyp_p_tan = reg(shapes.hyp_p_tan);
        vars.hyp_u = reg(shapes.hyp_u);
        vars.has_mlr_heads = true;
    }
    if (needs_euc_head(task, head)) {
        vars.euc_w = reg(shapes.euc_w);
        vars.euc_b = reg(shapes.euc_b);
    }
    if (needs_lambda_heads(head)) {
        vars.fc0_w = reg(shapes.fc0_w);
        vars.fc0_b = reg(shapes.fc0_b);
        vars.fc1_w = reg(shapes.fc1_w);
        vars.fc1_b = reg(shapes.fc1_b);
        vars.has_lambda_heads = true;
    }
    if (needs_concat_f(task, head)) {
        vars.concat_f = reg(shapes.concat_f);
        vars.has_concat_f = true;
    }
    if (needs_concat_g(task, head)) {
        vars.concat_g = reg(shapes.concat_g);
        vars.has_concat_g = true;
    }
    if (values)
        require(next == values->size(), "register_params_from: too many tensors");
    return vars;
}

}  // namespace

GilVars register_params(Tape& tape, GilParams& params, Task task, const GilConfig& cfg) {
    return register_impl(tape, params, task, cfg, nullptr);
}

GilVars register_params_from(Tape& tape, const GilParams& shapes, Task task, const GilConfig& cfg,
                             const std::vector<Tensor>& values) {
    return register_impl(tape, shapes, task, cfg, &values);
}

AttentionIndex build_attention_index(const Graph& g) {
    AttentionIndex idx;
    for (int i = 0; i < g.n; ++i) {
        idx.src.push_back(i);
        idx.dst.push_back(i);
        idx.group.push_back(i);
        idx.self_mask.push_back(1.0);
        for (int j : g.neighbors[static_cast<size_t>(i)]) {
            idx.src.push_back(i);
            idx.dst.push_back(j);
            idx.group.push_back(i);
            idx.self_mask.push_back(0.0);
        }
    }
    return idx;
}

DropoutMasks make_dropout_masks(int n, int input_dim, const GilConfig& cfg, Rng& rng) {
    DropoutMasks masks;
    if (cfg.dropout <= 0.0) return masks;
    const double keep = 1.0 - cfg.dropout;
    auto draw = [&](int rows, int cols) {
        Tensor m(rows, cols);
        for (auto& x : m.v) x = rng.bernoulli(keep) ? 1.0 / keep : 0.0;
        return m;
    };
    for (int k = 0; k < cfg.layers; ++k) {
        masks.euclidean.push_back(draw(n, k == 0 ? input_dim : cfg.hidden_dim));
        masks.hyperbolic.push_back(draw(n, cfg.hidden_dim));
    }
    return masks;
}

void audit_ball_rows(ForwardAudit* audit, const Tensor& values, double c) {
    if (!audit) return;
    const double sc = std::sqrt(c);
    const double bound = 1.0 - manifold::kBallEps + 1e-12;  // double-rounding slack
    for (int r = 0; r < values.rows; ++r) {
        const double sn = sc * row_norm2(values, r);
        ++audit->ball_checks;
        audit->max_scaled_norm = std::max(audit->max_scaled_norm, sn);
        if (!(sn <= bound)) ++audit->ball_violations;  // NaN counts as a violation
    }
}

namespace {

void audit_lambda_pair(ForwardAudit* audit, const Tensor& l0, const Tensor& l1) {
    if (!audit) return;
    for (int r = 0; r < l0.rows; ++r) {
        const double norm = std::hypot(l0.at(r, 0), l1.at(r, 0));
        const double dev = std::abs(norm - 1.0);
        ++audit->lambda_checks;
        audit->max_lambda_dev = std::max(audit->max_lambda_dev, dev);
        if (!(dev <= 1e-9)) ++audit->lambda_violations;
    }
}

/// Distance factor for attention entries. Self pairs are pinned to their
/// exact value (0, or 1 under self_distance_one): the computed self distance
/// carries ~1e-17 rounding noise whose row_norm backward would otherwise
/// inject garbage-direction gradients.
Var attention_distance(Tape& t, Var d, const AttentionIndex& idx, const GilConfig& cfg) {
    Tensor self(idx.entries(), 1);
    Tensor nonself(idx.entries(), 1);
    for (int i = 0; i < idx.entries(); ++i) {
        self.at(i, 0) = idx.self_mask[static_cast<size_t>(i)];
        nonself.at(i, 0) = 1.0 - idx.self_mask[static_cast<size_t>(i)];
    }
    Var masked = t.mul(d, t.constant(nonself));
    if (!cfg.self_distance_one) return masked;
    return t.add(masked, t.constant(self));
}

}  // namespace

Tensor normalize_features(const Tensor& features) {
    double maxn = 0.0;
    for (int r = 0; r < features.rows; ++r) maxn = std::max(maxn, row_norm2(features, r));
    if (maxn == 0.0) return features;
    Tensor out = features;
    for (auto& x : out.v) x /= maxn;
    return out;
}

DualEmbedding init_embeddings(Tape& tape, const Tensor& features, double curvature,
                              ForwardAudit* audit) {
    require(features.all_finite(), "init_embeddings: non-finite features");
    Var h_euc = tape.constant(features);
    Var h_hyp = ball::exp0_rows(h_euc, curvature);
    audit_ball_rows(audit, h_hyp.value(), curvature);
    return {h_hyp, h_euc};
}

Var euclidean_layer(Tape& t, Var h, const AttentionIndex& idx, const GilVars::Layer& layer,
                    const GilConfig& cfg, bool final_layer, const Tensor* mask) {
    Var hd = mask ? t.dropout(h, *mask) : h;
    Var z = t.matmul(hd, layer.w_e);
    Var zs = t.gather_rows(z, idx.src);
    Var zd = t.gather_rows(z, idx.dst);
    Var logit = t.matmul(t.concat_cols(zs, zd), layer.a_e);
    if (cfg.euclidean_distance_attention) {
        Var d = t.row_norm(t.sub(t.gather_rows(h, idx.src), t.gather_rows(h, idx.dst)));
        logit = t.mul(logit, attention_distance(t, d, idx, cfg));
    }
    Var alpha = t.softmax_over_index_groups(t.leaky_relu(logit, cfg.leaky_slope), idx.group);
    Var out = t.scatter_sum_rows(t.scale_rows(zd, alpha), idx.src, h.rows());
    return final_layer ? out : t.relu(out);
}

Var hyperbolic_layer(Tape& t, Var h, const AttentionIndex& idx, const GilVars::Layer& layer,
                     const GilConfig& cfg, bool final_layer, const Tensor* mask) {
    const double c = cfg.curvature;
    Var wh = ball::mobius_matvec_rows(h, layer.w_h, c);
    Var bias_point = ball::exp0_rows(layer.b_h, c);
    Var bias_rep = t.gather_rows(bias_point, std::vector<int>(static_cast<size_t>(h.rows()), 0));
    Var hhat = ball::log0_rows(ball::mobius_add_rows(wh, bias_rep, c), c);
    if (mask) hhat = t.dropout(hhat, *mask);

    Var hs = t.gather_rows(hhat, idx.src);
    Var hd = t.gather_rows(hhat, idx.dst);
    Var logit = t.matmul(t.concat_cols(hs, hd), layer.a_h);
    if (cfg.variant.distance_attention) {
        // distance between the untransformed ball points, self term included
        Var d = ball::distance_rows(t.gather_rows(h, idx.src), t.gather_rows(h, idx.dst), c);
        logit = t.mul(logit, attention_distance(t, d, idx, cfg));
    }
    Var alpha = t.softmax_over_index_groups(t.leaky_relu(logit, cfg.leaky_slope), idx.group);
    Var msg = t.scatter_sum_rows(t.scale_rows(hd, alpha), idx.src, h.rows());
    Var act = final_layer ? msg : t.relu(msg);
    return ball::exp0_rows(act, c);
}

DualEmbedding dual_interaction(Tape& t, Var h_hyp, Var h_euc, const GilVars::Layer& layer,
                               Fusion fusion, double c) {
    if (fusion == Fusion::none) return {h_hyp, h_euc};

    Var new_hyp = h_hyp;
    Var new_euc = h_euc;
    if (fusion == Fusion::full || fusion == Fusion::euc_to_hyp) {
        Var e2h = ball::exp0_rows(h_euc, c);
        Var scale = t.scalar_mul(layer.beta, ball::distance_rows(h_hyp, e2h, c));
        new_hyp = ball::mobius_add_rows(h_hyp, ball::mobius_scalar_mul_rows(scale, e2h, c), c);
    }
    if (fusion == Fusion::full || fusion == Fusion::hyp_to_euc) {
        Var h2e = ball::log0_rows(h_hyp, c);
        Var scale = t.scalar_mul(layer.beta_p, t.row_norm(t.sub(h_euc, h2e)));
        new_euc = t.add(h_euc, t.scale_rows(h2e, scale));
    }
    return {new_hyp, new_euc};
}

Var hyperbolic_mlr_logits(Tape& t, Var x, Var p_tan, Var u, double c) {
    const int m = p_tan.rows();
    require(m >= 2, "hyperbolic_mlr_logits: need at least two classes");
    Var logits{};
    for (int cls = 0; cls < m; ++cls) {
        Var p_cls = ball::exp0_rows(t.gather_rows(p_tan, {cls}), c);
        Var u_cls = t.gather_rows(u, {cls});
        Var col = ball::hyperplane_logit_rows(x, p_cls, u_cls, c);
        logits = cls == 0 ? col : t.concat_cols(logits, col);
    }
    return logits;
}

Var euclidean_mlr_logits(Tape& t, Var x, Var w, Var b) {
    return t.add_row_vec(t.matmul(x, w), b);
}

AssembledProbs assemble_probabilities(Tape& t, Var p_hyp, Var p_euc, Var x_hyp, Var x_euc,
                                      const GilVars& vars, double c, ForwardAudit* audit) {
    require(vars.has_lambda_heads, "assemble_probabilities: lambda heads not allocated");
    Var z0 = t.add_row_vec(t.matmul(ball::log0_rows(x_hyp, c), vars.fc0_w), vars.fc0_b);
    Var z1 = t.add_row_vec(t.matmul(x_euc, vars.fc1_w), vars.fc1_b);
    Var pair = t.l2_normalize_rows(t.concat_cols(t.sigmoid(z0), t.sigmoid(z1)), 1e-12);
    Var l0 = t.slice_cols(pair, 0, 1);
    Var l1 = t.slice_cols(pair, 1, 2);
    audit_lambda_pair(audit, l0.value(), l1.value());

    Var combined = t.add(t.scale_rows(p_hyp, l0), t.scale_rows(p_euc, l1));
    Var rowsum = t.clamp_min(t.row_sum(combined), 1e-12);
    Var inv = t.div(t.constant(Tensor::full(combined.rows(), 1, 1.0)), rowsum);
    Var renorm = t.scale_rows(combined, inv);
    return {l0, l1, p_hyp, p_euc, combined, renorm};
}

ForwardResult forward(Tape& t, const GilVars& vars, const Graph& g, const AttentionIndex& idx,
                      const GilConfig& cfg, Task task, const DropoutMasks* masks,
                      ForwardAudit* audit) {
    require(static_cast<int>(vars.layers.size()) == cfg.layers, "forward: layer count mismatch");
    const double c = cfg.curvature;
    DualEmbedding emb = init_embeddings(t, normalize_features(g.features), c, audit);

    for (int k = 0; k < cfg.layers; ++k) {
        const bool final_layer = k == cfg.layers - 1;
        const Tensor* em = masks && !masks->empty() ? &masks->euclidean[static_cast<size_t>(k)] : nullptr;
        const Tensor* hm = masks && !masks->empty() ? &masks->hyperbolic[static_cast<size_t>(k)] : nullptr;
        Var h_euc = euclidean_layer(t, emb.h_euc, idx, vars.layers[static_cast<size_t>(k)], cfg,
                                    final_layer, em);
        Var h_hyp = hyperbolic_layer(t, emb.h_hyp, idx, vars.layers[static_cast<size_t>(k)], cfg,
                                     final_layer, hm);
        audit_ball_rows(audit, h_hyp.value(), c);
        emb = dual_interaction(t, h_hyp, h_euc, vars.layers[static_cast<size_t>(k)],
                               cfg.variant.fusion, c);
        audit_ball_rows(audit, emb.h_hyp.value(), c);
    }

    ForwardResult res;
    res.embedding = emb;
    if (task != Task::node_classification) return res;

    switch (cfg.variant.head) {
        case Head::assembled: {
            Var ph = t.softmax_rows(hyperbolic_mlr_logits(t, emb.h_hyp, vars.hyp_p_tan, vars.hyp_u, c));
            Var pe = t.softmax_rows(euclidean_mlr_logits(t, emb.h_euc, vars.euc_w, vars.euc_b));
            res.assembled = assemble_probabilities(t, ph, pe, emb.h_hyp, emb.h_euc, vars, c, audit);
            res.probs = res.assembled->renormalized;
            break;
        }
        case Head::concat_euclidean: {
            Var feat = t.concat_cols(ball::log0_rows(emb.h_hyp, c), emb.h_euc);
            res.probs = t.softmax_rows(t.matmul(feat, vars.concat_f));
            break;
        }
        case Head::concat_hyperbolic: {
            Var point = ball::project_rows(t.concat_cols(emb.h_hyp, ball::exp0_rows(emb.h_euc, c)), c);
            Var mapped = ball::mobius_matvec_rows(point, vars.concat_g, c);
            audit_ball_rows(audit, mapped.value(), c);
            res.probs = t.softmax_rows(hyperbolic_mlr_logits(t, mapped, vars.hyp_p_tan, vars.hyp_u, c));
            break;
        }
        case Head::euclidean_only:
            res.probs = t.softmax_rows(euclidean_mlr_logits(t, emb.h_euc, vars.euc_w, vars.euc_b));
            break;
        case Head::hyperbolic_only:
            res.probs = t.softmax_rows(hyperbolic_mlr_logits(t, emb.h_hyp, vars.hyp_p_tan, vars.hyp_u, c));
            break;
    }
    res.has_probs = true;
    return res;
}

Var link_probabilities(Tape& t, const GilVars& vars, const DualEmbedding& emb,
                       const std::vector<std::pair<int, int>>& pairs, const GilConfig& cfg,
                       ForwardAudit* audit) {
    const double c = cfg.curvature;
    std::vector<int> src, dst;
    src.reserve(pairs.size());
    dst.reserve(pairs.size());
    for (auto [u, v] : pairs) {
        src.push_back(u);
        dst.push_back(v);
    }
    auto clip = [&](Var p) { return t.clamp_max(t.clamp_min(p, 1e-12), 1.0 - 1e-12); };

    switch (cfg.variant.head) {
        case Head::concat_euclidean: {
            Var feat = t.concat_cols(ball::log0_rows(emb.h_hyp, c), emb.h_euc);
            Var d = t.row_norm(t.sub(t.gather_rows(feat, src), t.gather_rows(feat, dst)));
            return clip(ball::fermi_dirac(d, cfg.fermi_r, cfg.fermi_t));
        }
        case Head::concat_hyperbolic: {
            Var point = ball::project_rows(t.concat_cols(emb.h_hyp, ball::exp0_rows(emb.h_euc, c)), c);
            Var d = ball::distance_rows(t.gather_rows(point, src), t.gather_rows(point, dst), c);
            return clip(ball::fermi_dirac(d, cfg.fermi_r, cfg.fermi_t));
        }
        default:
            break;
    }

    Var xi_h = t.gather_rows(emb.h_hyp, src);
    Var xj_h = t.gather_rows(emb.h_hyp, dst);
    Var xi_e = t.gather_rows(emb.h_euc, src);
    Var xj_e = t.gather_rows(emb.h_euc, dst);
    Var p_hyp = ball::fermi_dirac(ball::distance_rows(xi_h, xj_h, c), cfg.fermi_r, cfg.fermi_t);
    Var p_euc = ball::fermi_dirac(t.row_norm(t.sub(xj_e, xi_e)), cfg.fermi_r, cfg.fermi_t);
    if (cfg.variant.head == Head::euclidean_only) return clip(p_euc);
    if (cfg.variant.head == Head::hyperbolic_only) return clip(p_hyp);

    require(vars.has_lambda_heads, "link_probabilities: lambda heads not allocated");
    // lambda weights from the per-edge difference embeddings
    Var diff_h = ball::log0_rows(ball::mobius_add_rows(t.neg(xi_h), xj_h, c), c);
    Var diff_e = t.sub(xj_e, xi_e);
    Var z0 = t.add_row_vec(t.matmul(diff_h, vars.fc0_w), vars.fc0_b);
    Var z1 = t.add_row_vec(t.matmul(diff_e, vars.fc1_w), vars.fc1_b);
    Var pair = t.l2_normalize_rows(t.concat_cols(t.sigmoid(z0), t.sigmoid(z1)), 1e-12);
    Var l0 = t.slice_cols(pair, 0, 1);
    Var l1 = t.slice_cols(pair, 1, 2);
    audit_lambda_pair(audit, l0.value(), l1.value());
    return clip(t.add(t.mul(l0, p_hyp), t.mul(l1, p_euc)));
}

double fermi_dirac_value(double dist, double r, double t) {
    require(t > 0.0, "fermi_dirac: temperature must be positive");
    return 1.0 / (std::exp((dist - r) / t) + 1.0);
}

}  // namespace gil::model
