#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gil/autodiff.hpp"
#include "gil/ball_ops.hpp"
#include "gil/graph.hpp"
#include "gil/rng.hpp"
#include "gil/splits.hpp"

namespace gil::model {

enum class Fusion { full, none, hyp_to_euc, euc_to_hyp };
enum class Head { assembled, concat_euclidean, concat_hyperbolic, euclidean_only, hyperbolic_only };

struct ModelVariant {
    Fusion fusion = Fusion::full;
    bool distance_attention = true;
    Head head = Head::assembled;
};

std::string to_string(Fusion f);
std::string to_string(Head h);
Fusion fusion_from_string(const std::string& s);
Head head_from_string(const std::string& s);

/// Model-side configuration (the trainer holds the superset).
struct GilConfig {
    int layers = 2;
    int hidden_dim = 16;
    double curvature = 1.0;
    double dropout = 0.0;
    double fermi_r = 2.0;
    double fermi_t = 1.0;
    double leaky_slope = 0.2;
    ModelVariant variant;
    bool self_distance_one = false;          // substitute distance factor 1 for j = i
    bool euclidean_distance_attention = false;
};

/// All trainable tensors of a GIL model. The hyperbolic bias b_h and the
/// classifier points hyp_p live in flat space as tangent vectors at the
/// origin and are materialized through exp_0 where used, so a standard
/// optimizer applies to every tensor here.
struct GilParams {
    struct Layer {
        Tensor w_e;     // in x hidden
        Tensor a_e;     // 2*hidden x 1
        Tensor w_h;     // in x hidden
        Tensor b_h;     // 1 x hidden (tangent at origin)
        Tensor a_h;     // 2*hidden x 1
        Tensor beta;    // 1x1 fusion weight into the ball
        Tensor beta_p;  // 1x1 fusion weight into flat space
    };
    std::vector<Layer> layers;

    // classification heads (allocated per task/head variant)
    Tensor hyp_p_tan;  // M x hidden (tangent pre-images of class points)
    Tensor hyp_u;      // M x hidden (hyperplane normals)
    Tensor euc_w;      // hidden x M
    Tensor euc_b;      // 1 x M
    Tensor fc0_w, fc0_b;  // hidden x 1, 1x1 (hyperbolic lambda head)
    Tensor fc1_w, fc1_b;  // hidden x 1, 1x1 (Euclidean lambda head)
    Tensor concat_f;   // 2*hidden x M
    Tensor concat_g;   // 2*hidden x hidden

    struct Ref {
        std::string name;
        Tensor* tensor;
        bool decay;  // participates in weight decay
    };
    std::vector<Ref> param_refs();
    std::vector<Tensor> flatten() const;
    size_t coord_count() const;
};

/// Trainable tensors registered on a tape, mirroring GilParams.
struct GilVars {
    struct Layer {
        ad::Var w_e, a_e, w_h, b_h, a_h, beta, beta_p;
    };
    std::vector<Layer> layers;
    ad::Var hyp_p_tan, hyp_u, euc_w, euc_b, fc0_w, fc0_b, fc1_w, fc1_b, concat_f, concat_g;
    bool has_mlr_heads = false;
    bool has_lambda_heads = false;
    bool has_concat_f = false;
    bool has_concat_g = false;
};

/// Fan-scaled uniform init for weights and attention vectors; zero biases,
/// zero fusion weights, classifier points at the origin, zero lambda heads.
GilParams init_gil_params(int input_dim, int num_classes, graphcore::Task task,
                          const GilConfig& cfg, std::uint64_t seed);

/// Register every parameter as a tape leaf (creation order = param_refs order).
GilVars register_params(ad::Tape& tape, GilParams& params, graphcore::Task task,
                        const GilConfig& cfg);
/// Same layout, values taken from a flat tensor vector (for gradient checks).
GilVars register_params_from(ad::Tape& tape, const GilParams& shapes, graphcore::Task task,
                             const GilConfig& cfg, const std::vector<Tensor>& values);

/// Precomputed attention wiring: one entry per (i, i) self pair followed by
/// (i, j) for each sorted neighbor j; group id is i.
struct AttentionIndex {
    std::vector<int> src, dst, group;
    std::vector<double> self_mask;  // 1.0 on self entries
    int entries() const { return static_cast<int>(src.size()); }
};
AttentionIndex build_attention_index(const graphcore::Graph& g);

/// Per-layer dropout masks (inverted-dropout scaling baked in), pregenerated
/// from a seeded stream so a loss closure can hold them fixed.
struct DropoutMasks {
    std::vector<Tensor> euclidean;  // per layer, shaped like the layer input
    std::vector<Tensor> hyperbolic; // per layer, n x hidden (tangent features)
    bool empty() const { return euclidean.empty(); }
};
DropoutMasks make_dropout_masks(int n, int input_dim, const GilConfig& cfg, Rng& rng);

/// Running invariant audit; checks are tolerant to double rounding only
/// (1e-12 slack on the ball shell, 1e-9 on the lambda norm).
struct ForwardAudit {
    long long ball_checks = 0;
    long long ball_violations = 0;
    double max_scaled_norm = 0.0;  // max sqrt(c)*||h|| observed
    long long lambda_checks = 0;
    long long lambda_violations = 0;
    double max_lambda_dev = 0.0;
};
void audit_ball_rows(ForwardAudit* audit, const Tensor& values, double c);

/// Divide all rows by the largest row norm so the max-norm row is unit length.
Tensor normalize_features(const Tensor& features);

/// h_E = features, h_H = exp_0(features) row-wise.
struct DualEmbedding {
    ad::Var h_hyp;
    ad::Var h_euc;
};
DualEmbedding init_embeddings(ad::Tape& tape, const Tensor& features, double curvature,
                              ForwardAudit* audit = nullptr);

ad::Var euclidean_layer(ad::Tape& tape, ad::Var h, const AttentionIndex& idx,
                        const GilVars::Layer& layer, const GilConfig& cfg, bool final_layer,
                        const Tensor* mask);
ad::Var hyperbolic_layer(ad::Tape& tape, ad::Var h, const AttentionIndex& idx,
                         const GilVars::Layer& layer, const GilConfig& cfg, bool final_layer,
                         const Tensor* mask);
DualEmbedding dual_interaction(ad::Tape& tape, ad::Var h_hyp, ad::Var h_euc,
                               const GilVars::Layer& layer, Fusion fusion, double curvature);

/// Per-class signed-distance logits over hyperbolic hyperplanes (n x M).
ad::Var hyperbolic_mlr_logits(ad::Tape& tape, ad::Var x, ad::Var p_tan, ad::Var u, double curvature);
/// Affine logits x * W + b (n x M).
ad::Var euclidean_mlr_logits(ad::Tape& tape, ad::Var x, ad::Var w, ad::Var b);

struct AssembledProbs {
    ad::Var lambda_hyp, lambda_euc;  // n x 1 each, L2-normalized as a pair
    ad::Var p_hyp, p_euc;            // branch probabilities
    ad::Var combined;                // lambda-weighted sum (rows need not sum to 1)
    ad::Var renormalized;            // rows rescaled to sum 1 (loss/prediction input)
};
AssembledProbs assemble_probabilities(ad::Tape& tape, ad::Var p_hyp, ad::Var p_euc, ad::Var x_hyp,
                                      ad::Var x_euc, const GilVars& vars, double curvature,
                                      ForwardAudit* audit = nullptr);

struct ForwardResult {
    DualEmbedding embedding;                 // final-layer dual embeddings
    std::optional<AssembledProbs> assembled; // present for the assembled head
    ad::Var probs;                           // n x M class probabilities (NC heads)
    bool has_probs = false;
};

/// K repetitions of (euclidean_layer, hyperbolic_layer, dual_interaction),
/// then the configured classification head when the task is NC.
ForwardResult forward(ad::Tape& tape, const GilVars& vars, const graphcore::Graph& g,
                      const AttentionIndex& idx, const GilConfig& cfg, graphcore::Task task,
                      const DropoutMasks* masks = nullptr, ForwardAudit* audit = nullptr);

/// Assembled edge probabilities for the given pairs (m x 1, clipped into
/// [1e-12, 1-1e-12]).
ad::Var link_probabilities(ad::Tape& tape, const GilVars& vars, const DualEmbedding& emb,
                           const std::vector<std::pair<int, int>>& pairs, const GilConfig& cfg,
                           ForwardAudit* audit = nullptr);

/// Scalar convenience form of the Fermi-Dirac decoder.
double fermi_dirac_value(double dist, double r, double t);

}  // namespace gil::model
