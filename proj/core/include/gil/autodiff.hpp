#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "gil/tensor.hpp"

namespace gil::ad {

enum class Op : std::uint8_t {
    Leaf,
    Constant,
    Add,
    Sub,
    Mul,
    Div,
    MatMul,
    ConcatCols,
    SliceCols,
    GatherRows,
    ScatterSumRows,
    ScaleRows,
    ScalarMul,
    AddRowVec,
    RowNorm,
    RowDot,
    RowSum,
    Dot,
    Tanh,
    Artanh,
    Asinh,
    Sigmoid,
    Exp,
    Log,
    LeakyRelu,
    ClampMin,
    ClampMax,
    AddConst,
    MulConst,
    SoftmaxRows,
    SoftmaxGroups,
    Sum,
    Mean,
    L2NormalizeRows,
};

class Tape;

/// Handle to a node on a tape. Cheap to copy; valid while the tape lives.
struct Var {
    Tape* tape = nullptr;
    int id = -1;

    const Tensor& value() const;
    const Tensor& grad() const;
    int rows() const;
    int cols() const;
};

/// Append-only reverse-mode tape over dense tensors. Nodes are created in
/// topological order by construction; backward() runs the reverse sweep.
/// Single-threaded; distinct tapes may run concurrently.
class Tape {
public:
    struct Node {
        Op op;
        Tensor data;
        Tensor grad;            // allocated by backward()
        int a = -1;
        int b = -1;
        double k0 = 0.0;        // op-specific scalar attribute
        double k1 = 0.0;
        std::vector<int> idx;   // gather/scatter indices or softmax group ids
        bool requires_grad = false;
    };

    Var leaf(Tensor t);      // trainable parameter (participates in gradients)
    Var constant(Tensor t);  // fixed input

    Var add(Var a, Var b);
    Var sub(Var a, Var b);
    Var mul(Var a, Var b);  // elementwise
    Var div(Var a, Var b);  // elementwise
    Var matmul(Var a, Var b);
    Var concat_cols(Var a, Var b);
    Var slice_cols(Var a, int from, int to);
    Var gather_rows(Var a, std::vector<int> idx);
    /// Sum row r of `a` into output row targets[r]; output has `out_rows` rows.
    Var scatter_sum_rows(Var a, std::vector<int> targets, int out_rows);
    /// Multiply row i of `a` (n x d) by s_i (s is n x 1).
    Var scale_rows(Var a, Var s);
    /// Multiply every entry of `a` by the 1x1 node `s`.
    Var scalar_mul(Var s, Var a);
    /// Add the 1 x d row vector `b` to every row of `a`.
    Var add_row_vec(Var a, Var b);
    Var row_norm(Var a);  // n x d -> n x 1 Euclidean row norms
    Var row_dot(Var a, Var b);
    Var row_sum(Var a);
    Var dot(Var a, Var b);  // full inner product -> 1x1

    Var tanh(Var a);
    Var artanh(Var a);  // input clamped to +/-(1 - 1e-10)
    Var asinh(Var a);
    Var sigmoid(Var a);
    Var exp(Var a);
    Var log(Var a);
    Var leaky_relu(Var a, double slope);
    Var relu(Var a) { return leaky_relu(a, 0.0); }
    Var clamp_min(Var a, double lo);
    Var clamp_max(Var a, double hi);
    Var add_const(Var a, double c);
    Var mul_const(Var a, double c);
    Var neg(Var a) { return mul_const(a, -1.0); }

    Var softmax_rows(Var a);
    /// Softmax over entries sharing a group id; `a` is m x 1, groups has m ids.
    Var softmax_over_index_groups(Var a, std::vector<int> groups);
    /// Elementwise multiply by a fixed (pregenerated) dropout mask.
    Var dropout(Var a, const Tensor& mask);

    Var sum(Var a);
    Var mean(Var a);
    /// Divide each row by max(||row||_2, eps).
    Var l2_normalize_rows(Var a, double eps = 1e-12);

    /// Reverse accumulation from a scalar (1x1) root into every leaf.
    void backward(Var root);

    const Tensor& value(int id) const { return nodes_[static_cast<size_t>(id)].data; }
    const Tensor& grad(int id) const { return nodes_[static_cast<size_t>(id)].grad; }
    Op op(int id) const { return nodes_[static_cast<size_t>(id)].op; }
    /// Ids of leaf (parameter) nodes in creation order.
    std::vector<int> leaf_ids() const;
    size_t size() const { return nodes_.size(); }
    void clear() { nodes_.clear(); }

private:
    Var push(Node n);
    std::vector<Node> nodes_;
};

inline Var operator+(Var a, Var b) { return a.tape->add(a, b); }
inline Var operator-(Var a, Var b) { return a.tape->sub(a, b); }
inline Var operator*(Var a, Var b) { return a.tape->mul(a, b); }

/// Builds the loss for a given flat parameter vector on a fresh tape.
using LossBuilder = std::function<Var(Tape&, const std::vector<Tensor>&)>;

struct GradCheckResult {
    double max_rel_error = 0.0;
    int worst_param = -1;  // index into the parameter vector
    int worst_coord = -1;
    double analytic = 0.0;
    double numeric = 0.0;
};

/// Central-difference check of `analytic` against (f(p+h)-f(p-h))/(2h), one
/// coordinate at a time. Relative error uses max(|analytic|,|numeric|,1e-8).
GradCheckResult compare_against_finite_diff(const LossBuilder& build_loss,
                                            const std::vector<Tensor>& params,
                                            const std::vector<Tensor>& analytic,
                                            double h);

/// Multi-scale comparison: per coordinate, the best agreement over the step
/// ladder counts. Roundoff noise pollutes small steps on near-zero gradients,
/// a nearby activation kink pollutes large steps that straddle it; a wrong
/// backward rule disagrees at every step.
GradCheckResult compare_against_finite_diff_multi(const LossBuilder& build_loss,
                                                  const std::vector<Tensor>& params,
                                                  const std::vector<Tensor>& analytic,
                                                  const std::vector<double>& steps);

/// Runs forward+backward once for the analytic gradient, then the comparison.
GradCheckResult finite_diff_check(const LossBuilder& build_loss,
                                  const std::vector<Tensor>& params,
                                  double h = 1e-6);

/// finite_diff_check over the default step ladder {1e-6, 1e-5, 1e-4}.
GradCheckResult finite_diff_check_multi(const LossBuilder& build_loss,
                                        const std::vector<Tensor>& params);

}  // namespace gil::ad
