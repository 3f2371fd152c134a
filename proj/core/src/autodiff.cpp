#include "gil/autodiff.hpp"

#include <algorithm>
#include <cmath>

#include "gil/error.hpp"

namespace gil::ad {

namespace {
constexpr double kArtanhLim = 1.0 - 1e-10;
constexpr double kNormFloor = 1e-30;  // below this a row norm gets a zero subgradient
}  // namespace

const Tensor& Var::value() const { return tape->value(id); }
const Tensor& Var::grad() const { return tape->grad(id); }
int Var::rows() const { return tape->value(id).rows; }
int Var::cols() const { return tape->value(id).cols; }

Var Tape::push(Node n) {
    nodes_.push_back(std::move(n));
    return Var{this, static_cast<int>(nodes_.size()) - 1};
}

Var Tape::leaf(Tensor t) {
    Node n;
    n.op = Op::Leaf;
    n.data = std::move(t);
    n.requires_grad = true;
    return push(std::move(n));
}

Var Tape::constant(Tensor t) {
    Node n;
    n.op = Op::Constant;
    n.data = std::move(t);
    return push(std::move(n));
}

namespace {
void check_same_tape(const Var& a, const Var& b, const char* op) {
    require(a.tape == b.tape, std::string(op) + ": operands from different tapes");
}
}  // namespace

#define GIL_BINARY_SAME_SHAPE(NAME, OPTAG, EXPR)                                         \
    Var Tape::NAME(Var a, Var b) {                                                       \
        check_same_tape(a, b, #NAME);                                                    \
        const Tensor& A = value(a.id);                                                   \
        const Tensor& B = value(b.id);                                                   \
        require(A.same_shape(B), #NAME ": shape mismatch");                              \
        Node n;                                                                          \
        n.op = OPTAG;                                                                    \
        n.a = a.id;                                                                      \
        n.b = b.id;                                                                      \
        n.requires_grad = nodes_[a.id].requires_grad || nodes_[b.id].requires_grad;      \
        n.data = Tensor(A.rows, A.cols);                                                 \
        for (size_t i = 0; i < A.size(); ++i) {                                          \
            const double x = A.v[i], y = B.v[i];                                         \
            (void)x;                                                                     \
            (void)y;                                                                     \
            n.data.v[i] = (EXPR);                                                        \
        }                                                                                \
        return push(std::move(n));                                                       \
    }

GIL_BINARY_SAME_SHAPE(add, Op::Add, x + y)
GIL_BINARY_SAME_SHAPE(sub, Op::Sub, x - y)
GIL_BINARY_SAME_SHAPE(mul, Op::Mul, x * y)
GIL_BINARY_SAME_SHAPE(div, Op::Div, x / y)
#undef GIL_BINARY_SAME_SHAPE

Var Tape::matmul(Var a, Var b) {
    check_same_tape(a, b, "matmul");
    const Tensor& A = value(a.id);
    const Tensor& B = value(b.id);
    require(A.cols == B.rows, "matmul: inner dimension mismatch");
    Node n;
    n.op = Op::MatMul;
    n.a = a.id;
    n.b = b.id;
    n.requires_grad = nodes_[a.id].requires_grad || nodes_[b.id].requires_grad;
    n.data = Tensor(A.rows, B.cols);
    for (int i = 0; i < A.rows; ++i)
        for (int k = 0; k < A.cols; ++k) {
            const double aik = A.at(i, k);
            if (aik == 0.0) continue;
            for (int j = 0; j < B.cols; ++j) n.data.at(i, j) += aik * B.at(k, j);
        }
    return push(std::move(n));
}

Var Tape::concat_cols(Var a, Var b) {
    check_same_tape(a, b, "concat_cols");
    const Tensor& A = value(a.id);
    const Tensor& B = value(b.id);
    require(A.rows == B.rows, "concat_cols: row count mismatch");
    Node n;
    n.op = Op::ConcatCols;
    n.a = a.id;
    n.b = b.id;
    n.requires_grad = nodes_[a.id].requires_grad || nodes_[b.id].requires_grad;
    n.data = Tensor(A.rows, A.cols + B.cols);
    for (int i = 0; i < A.rows; ++i) {
        for (int j = 0; j < A.cols; ++j) n.data.at(i, j) = A.at(i, j);
        for (int j = 0; j < B.cols; ++j) n.data.at(i, A.cols + j) = B.at(i, j);
    }
    return push(std::move(n));
}

Var Tape::slice_cols(Var a, int from, int to) {
    const Tensor& A = value(a.id);
    require(0 <= from && from < to && to <= A.cols, "slice_cols: bad column range");
    Node n;
    n.op = Op::SliceCols;
    n.a = a.id;
    n.k0 = from;
    n.k1 = to;
    n.requires_grad = nodes_[a.id].requires_grad;
    n.data = Tensor(A.rows, to - from);
    for (int i = 0; i < A.rows; ++i)
        for (int j = from; j < to; ++j) n.data.at(i, j - from) = A.at(i, j);
    return push(std::move(n));
}

Var Tape::gather_rows(Var a, std::vector<int> idx) {
    const Tensor& A = value(a.id);
    for (int r : idx) require(0 <= r && r < A.rows, "gather_rows: row index out of range");
    Node n;
    n.op = Op::GatherRows;
    n.a = a.id;
    n.requires_grad = nodes_[a.id].requires_grad;
    n.data = Tensor(static_cast<int>(idx.size()), A.cols);
    for (size_t i = 0; i < idx.size(); ++i)
        for (int j = 0; j < A.cols; ++j) n.data.at(static_cast<int>(i), j) = A.at(idx[i], j);
    n.idx = std::move(idx);
    return push(std::move(n));
}

Var Tape::scatter_sum_rows(Var a, std::vector<int> targets, int out_rows) {
    const Tensor& A = value(a.id);
    require(static_cast<int>(targets.size()) == A.rows, "scatter_sum_rows: one target per row required");
    for (int r : targets) require(0 <= r && r < out_rows, "scatter_sum_rows: target out of range");
    Node n;
    n.op = Op::ScatterSumRows;
    n.a = a.id;
    n.requires_grad = nodes_[a.id].requires_grad;
    n.data = Tensor(out_rows, A.cols);
    for (int i = 0; i < A.rows; ++i)
        for (int j = 0; j < A.cols; ++j) n.data.at(targets[static_cast<size_t>(i)], j) += A.at(i, j);
    n.idx = std::move(targets);
    return push(std::move(n));
}

Var Tape::scale_rows(Var a, Var s) {
    check_same_tape(a, s, "scale_rows");
    const Tensor& A = value(a.id);
    const Tensor& S = value(s.id);
    require(S.rows == A.rows && S.cols == 1, "scale_rows: scale must be n x 1");
    Node n;
    n.op = Op::ScaleRows;
    n.a = a.id;
    n.b = s.id;
    n.requires_grad = nodes_[a.id].requires_grad || nodes_[s.id].requires_grad;
    n.data = Tensor(A.rows, A.cols);
    for (int i = 0; i < A.rows; ++i)
        for (int j = 0; j < A.cols; ++j) n.data.at(i, j) = A.at(i, j) * S.at(i, 0);
    return push(std::move(n));
}

Var Tape::scalar_mul(Var s, Var a) {
    check_same_tape(s, a, "scalar_mul");
    const Tensor& S = value(s.id);
    require(S.rows == 1 && S.cols == 1, "scalar_mul: scale must be 1x1");
    const Tensor& A = value(a.id);
    Node n;
    n.op = Op::ScalarMul;
    n.a = s.id;
    n.b = a.id;
    n.requires_grad = nodes_[s.id].requires_grad || nodes_[a.id].requires_grad;
    n.data = Tensor(A.rows, A.cols);
    for (size_t i = 0; i < A.size(); ++i) n.data.v[i] = S.v[0] * A.v[i];
    return push(std::move(n));
}

Var Tape::add_row_vec(Var a, Var b) {
    check_same_tape(a, b, "add_row_vec");
    const Tensor& A = value(a.id);
    const Tensor& B = value(b.id);
    require(B.rows == 1 && B.cols == A.cols, "add_row_vec: bias must be 1 x cols");
    Node n;
    n.op = Op::AddRowVec;
    n.a = a.id;
    n.b = b.id;
    n.requires_grad = nodes_[a.id].requires_grad || nodes_[b.id].requires_grad;
    n.data = Tensor(A.rows, A.cols);
    for (int i = 0; i < A.rows; ++i)
        for (int j = 0; j < A.cols; ++j) n.data.at(i, j) = A.at(i, j) + B.at(0, j);
    return push(std::move(n));
}

Var Tape::row_norm(Var a) {
    const Tensor& A = value(a.id);
    Node n;
    n.op = Op::RowNorm;
    n.a = a.id;
    n.requires_grad = nodes_[a.id].requires_grad;
    n.data = Tensor(A.rows, 1);
    for (int i = 0; i < A.rows; ++i) n.data.at(i, 0) = row_norm2(A, i);
    return push(std::move(n));
}

Var Tape::row_dot(Var a, Var b) {
    check_same_tape(a, b, "row_dot");
    const Tensor& A = value(a.id);
    const Tensor& B = value(b.id);
    require(A.same_shape(B), "row_dot: shape mismatch");
    Node n;
    n.op = Op::RowDot;
    n.a = a.id;
    n.b = b.id;
    n.requires_grad = nodes_[a.id].requires_grad || nodes_[b.id].requires_grad;
    n.data = Tensor(A.rows, 1);
    for (int i = 0; i < A.rows; ++i) {
        double s = 0.0;
        for (int j = 0; j < A.cols; ++j) s += A.at(i, j) * B.at(i, j);
        n.data.at(i, 0) = s;
    }
    return push(std::move(n));
}

Var Tape::row_sum(Var a) {
    const Tensor& A = value(a.id);
    Node n;
    n.op = Op::RowSum;
    n.a = a.id;
    n.requires_grad = nodes_[a.id].requires_grad;
    n.data = Tensor(A.rows, 1);
    for (int i = 0; i < A.rows; ++i) {
        double s = 0.0;
        for (int j = 0; j < A.cols; ++j) s += A.at(i, j);
        n.data.at(i, 0) = s;
    }
    return push(std::move(n));
}

Var Tape::dot(Var a, Var b) {
    check_same_tape(a, b, "dot");
    const Tensor& A = value(a.id);
    const Tensor& B = value(b.id);
    require(A.same_shape(B), "dot: shape mismatch");
    Node n;
    n.op = Op::Dot;
    n.a = a.id;
    n.b = b.id;
    n.requires_grad = nodes_[a.id].requires_grad || nodes_[b.id].requires_grad;
    double s = 0.0;
    for (size_t i = 0; i < A.size(); ++i) s += A.v[i] * B.v[i];
    n.data = Tensor::scalar(s);
    return push(std::move(n));
}

#define GIL_UNARY(NAME, OPTAG, EXPR)                           \
    Var Tape::NAME(Var a) {                                    \
        const Tensor& A = value(a.id);                         \
        Node n;                                                \
        n.op = OPTAG;                                          \
        n.a = a.id;                                            \
        n.requires_grad = nodes_[a.id].requires_grad;          \
        n.data = Tensor(A.rows, A.cols);                       \
        for (size_t i = 0; i < A.size(); ++i) {                \
            const double x = A.v[i];                           \
            n.data.v[i] = (EXPR);                              \
        }                                                      \
        return push(std::move(n));                             \
    }

GIL_UNARY(tanh, Op::Tanh, std::tanh(x))
GIL_UNARY(artanh, Op::Artanh, std::atanh(std::clamp(x, -kArtanhLim, kArtanhLim)))
GIL_UNARY(asinh, Op::Asinh, std::asinh(x))
GIL_UNARY(sigmoid, Op::Sigmoid, 1.0 / (1.0 + std::exp(-x)))
GIL_UNARY(exp, Op::Exp, std::exp(x))
GIL_UNARY(log, Op::Log, std::log(x))
#undef GIL_UNARY

Var Tape::leaky_relu(Var a, double slope) {
    const Tensor& A = value(a.id);
    Node n;
    n.op = Op::LeakyRelu;
    n.a = a.id;
    n.k0 = slope;
    n.requires_grad = nodes_[a.id].requires_grad;
    n.data = Tensor(A.rows, A.cols);
    for (size_t i = 0; i < A.size(); ++i) {
        const double x = A.v[i];
        n.data.v[i] = x >= 0.0 ? x : slope * x;
    }
    return push(std::move(n));
}

Var Tape::clamp_min(Var a, double lo) {
    const Tensor& A = value(a.id);
    Node n;
    n.op = Op::ClampMin;
    n.a = a.id;
    n.k0 = lo;
    n.requires_grad = nodes_[a.id].requires_grad;
    n.data = Tensor(A.rows, A.cols);
    for (size_t i = 0; i < A.size(); ++i) n.data.v[i] = std::max(A.v[i], lo);
    return push(std::move(n));
}

Var Tape::clamp_max(Var a, double hi) {
    const Tensor& A = value(a.id);
    Node n;
    n.op = Op::ClampMax;
    n.a = a.id;
    n.k0 = hi;
    n.requires_grad = nodes_[a.id].requires_grad;
    n.data = Tensor(A.rows, A.cols);
    for (size_t i = 0; i < A.size(); ++i) n.data.v[i] = std::min(A.v[i], hi);
    return push(std::move(n));
}

Var Tape::add_const(Var a, double c) {
    const Tensor& A = value(a.id);
    Node n;
    n.op = Op::AddConst;
    n.a = a.id;
    n.k0 = c;
    n.requires_grad = nodes_[a.id].requires_grad;
    n.data = Tensor(A.rows, A.cols);
    for (size_t i = 0; i < A.size(); ++i) n.data.v[i] = A.v[i] + c;
    return push(std::move(n));
}

Var Tape::mul_const(Var a, double c) {
    const Tensor& A = value(a.id);
    Node n;
    n.op = Op::MulConst;
    n.a = a.id;
    n.k0 = c;
    n.requires_grad = nodes_[a.id].requires_grad;
    n.data = Tensor(A.rows, A.cols);
    for (size_t i = 0; i < A.size(); ++i) n.data.v[i] = A.v[i] * c;
    return push(std::move(n));
}

Var Tape::softmax_rows(Var a) {
    const Tensor& A = value(a.id);
    Node n;
    n.op = Op::SoftmaxRows;
    n.a = a.id;
    n.requires_grad = nodes_[a.id].requires_grad;
    n.data = Tensor(A.rows, A.cols);
    for (int i = 0; i < A.rows; ++i) {
        double m = A.at(i, 0);
        for (int j = 1; j < A.cols; ++j) m = std::max(m, A.at(i, j));
        double z = 0.0;
        for (int j = 0; j < A.cols; ++j) {
            const double e = std::exp(A.at(i, j) - m);
            n.data.at(i, j) = e;
            z += e;
        }
        for (int j = 0; j < A.cols; ++j) n.data.at(i, j) /= z;
    }
    return push(std::move(n));
}

Var Tape::softmax_over_index_groups(Var a, std::vector<int> groups) {
    const Tensor& A = value(a.id);
    require(A.cols == 1, "softmax_over_index_groups: input must be m x 1");
    require(static_cast<int>(groups.size()) == A.rows,
            "softmax_over_index_groups: one group id per entry required");
    int ngroups = 0;
    for (int g : groups) {
        require(g >= 0, "softmax_over_index_groups: negative group id");
        ngroups = std::max(ngroups, g + 1);
    }
    require(ngroups > 0, "softmax_over_index_groups: empty group set");
    Node n;
    n.op = Op::SoftmaxGroups;
    n.a = a.id;
    n.requires_grad = nodes_[a.id].requires_grad;
    n.data = Tensor(A.rows, 1);

    std::vector<double> gmax(static_cast<size_t>(ngroups), -1e300);
    std::vector<double> gsum(static_cast<size_t>(ngroups), 0.0);
    std::vector<int> seen(static_cast<size_t>(ngroups), 0);
    for (int i = 0; i < A.rows; ++i) {
        gmax[groups[static_cast<size_t>(i)]] = std::max(gmax[groups[static_cast<size_t>(i)]], A.at(i, 0));
        seen[groups[static_cast<size_t>(i)]] = 1;
    }
    for (int g = 0; g < ngroups; ++g)
        require(seen[static_cast<size_t>(g)] == 1, "softmax_over_index_groups: group with no members");
    for (int i = 0; i < A.rows; ++i) {
        const double e = std::exp(A.at(i, 0) - gmax[groups[static_cast<size_t>(i)]]);
        n.data.at(i, 0) = e;
        gsum[groups[static_cast<size_t>(i)]] += e;
    }
    for (int i = 0; i < A.rows; ++i) n.data.at(i, 0) /= gsum[groups[static_cast<size_t>(i)]];
    n.idx = std::move(groups);
    return push(std::move(n));
}

Var Tape::dropout(Var a, const Tensor& mask) {
    require(value(a.id).same_shape(mask), "dropout: mask shape mismatch");
    return mul(a, constant(mask));
}

Var Tape::sum(Var a) {
    const Tensor& A = value(a.id);
    Node n;
    n.op = Op::Sum;
    n.a = a.id;
    n.requires_grad = nodes_[a.id].requires_grad;
    double s = 0.0;
    for (double x : A.v) s += x;
    n.data = Tensor::scalar(s);
    return push(std::move(n));
}

Var Tape::mean(Var a) {
    const Tensor& A = value(a.id);
    require(A.size() > 0, "mean: empty tensor");
    Node n;
    n.op = Op::Mean;
    n.a = a.id;
    n.requires_grad = nodes_[a.id].requires_grad;
    double s = 0.0;
    for (double x : A.v) s += x;
    n.data = Tensor::scalar(s / static_cast<double>(A.size()));
    return push(std::move(n));
}

Var Tape::l2_normalize_rows(Var a, double eps) {
    const Tensor& A = value(a.id);
    Node n;
    n.op = Op::L2NormalizeRows;
    n.a = a.id;
    n.k0 = eps;
    n.requires_grad = nodes_[a.id].requires_grad;
    n.data = Tensor(A.rows, A.cols);
    for (int i = 0; i < A.rows; ++i) {
        const double d = std::max(row_norm2(A, i), eps);
        for (int j = 0; j < A.cols; ++j) n.data.at(i, j) = A.at(i, j) / d;
    }
    return push(std::move(n));
}

void Tape::backward(Var root) {
    require(root.tape == this, "backward: root from another tape");
    const Tensor& rv = value(root.id);
    require(rv.rows == 1 && rv.cols == 1, "backward: root must be scalar");

    for (auto& n : nodes_) n.grad = Tensor(n.data.rows, n.data.cols);
    nodes_[static_cast<size_t>(root.id)].grad.v[0] = 1.0;

    for (int i = root.id; i >= 0; --i) {
        Node& n = nodes_[static_cast<size_t>(i)];
        if (!n.requires_grad) continue;
        const Tensor& g = n.grad;
        Tensor* ga = n.a >= 0 ? &nodes_[static_cast<size_t>(n.a)].grad : nullptr;
        Tensor* gb = n.b >= 0 ? &nodes_[static_cast<size_t>(n.b)].grad : nullptr;
        const Tensor* va = n.a >= 0 ? &nodes_[static_cast<size_t>(n.a)].data : nullptr;
        const Tensor* vb = n.b >= 0 ? &nodes_[static_cast<size_t>(n.b)].data : nullptr;

        switch (n.op) {
            case Op::Leaf:
            case Op::Constant:
                break;
            case Op::Add:
                for (size_t k = 0; k < g.size(); ++k) {
                    ga->v[k] += g.v[k];
                    gb->v[k] += g.v[k];
                }
                break;
            case Op::Sub:
                for (size_t k = 0; k < g.size(); ++k) {
                    ga->v[k] += g.v[k];
                    gb->v[k] -= g.v[k];
                }
                break;
            case Op::Mul:
                for (size_t k = 0; k < g.size(); ++k) {
                    ga->v[k] += g.v[k] * vb->v[k];
                    gb->v[k] += g.v[k] * va->v[k];
                }
                break;
            case Op::Div:
                for (size_t k = 0; k < g.size(); ++k) {
                    ga->v[k] += g.v[k] / vb->v[k];
                    gb->v[k] -= g.v[k] * n.data.v[k] / vb->v[k];
                }
                break;
            case Op::MatMul:
                // dA += dC * B^T; dB += A^T * dC
                for (int r = 0; r < va->rows; ++r)
                    for (int j = 0; j < vb->cols; ++j) {
                        const double gij = g.at(r, j);
                        if (gij == 0.0) continue;
                        for (int k = 0; k < va->cols; ++k) {
                            ga->at(r, k) += gij * vb->at(k, j);
                            gb->at(k, j) += va->at(r, k) * gij;
                        }
                    }
                break;
            case Op::ConcatCols:
                for (int r = 0; r < va->rows; ++r) {
                    for (int j = 0; j < va->cols; ++j) ga->at(r, j) += g.at(r, j);
                    for (int j = 0; j < vb->cols; ++j) gb->at(r, j) += g.at(r, va->cols + j);
                }
                break;
            case Op::SliceCols: {
                const int from = static_cast<int>(n.k0);
                for (int r = 0; r < g.rows; ++r)
                    for (int j = 0; j < g.cols; ++j) ga->at(r, from + j) += g.at(r, j);
                break;
            }
            case Op::GatherRows:
                for (int r = 0; r < g.rows; ++r)
                    for (int j = 0; j < g.cols; ++j) ga->at(n.idx[static_cast<size_t>(r)], j) += g.at(r, j);
                break;
            case Op::ScatterSumRows:
                for (int r = 0; r < va->rows; ++r)
                    for (int j = 0; j < g.cols; ++j) ga->at(r, j) += g.at(n.idx[static_cast<size_t>(r)], j);
                break;
            case Op::ScaleRows:
                for (int r = 0; r < va->rows; ++r) {
                    const double s = vb->at(r, 0);
                    double acc = 0.0;
                    for (int j = 0; j < va->cols; ++j) {
                        ga->at(r, j) += g.at(r, j) * s;
                        acc += g.at(r, j) * va->at(r, j);
                    }
                    gb->at(r, 0) += acc;
                }
                break;
            case Op::ScalarMul: {
                const double s = va->v[0];
                double acc = 0.0;
                for (size_t k = 0; k < g.size(); ++k) {
                    gb->v[k] += g.v[k] * s;
                    acc += g.v[k] * vb->v[k];
                }
                ga->v[0] += acc;
                break;
            }
            case Op::AddRowVec:
                for (int r = 0; r < g.rows; ++r)
                    for (int j = 0; j < g.cols; ++j) {
                        ga->at(r, j) += g.at(r, j);
                        gb->at(0, j) += g.at(r, j);
                    }
                break;
            case Op::RowNorm:
                for (int r = 0; r < va->rows; ++r) {
                    const double nr = n.data.at(r, 0);
                    if (nr < kNormFloor) continue;  // zero subgradient at the origin
                    const double gr = g.at(r, 0) / nr;
                    for (int j = 0; j < va->cols; ++j) ga->at(r, j) += gr * va->at(r, j);
                }
                break;
            case Op::RowDot:
                for (int r = 0; r < va->rows; ++r) {
                    const double gr = g.at(r, 0);
                    for (int j = 0; j < va->cols; ++j) {
                        ga->at(r, j) += gr * vb->at(r, j);
                        gb->at(r, j) += gr * va->at(r, j);
                    }
                }
                break;
            case Op::RowSum:
                for (int r = 0; r < va->rows; ++r) {
                    const double gr = g.at(r, 0);
                    for (int j = 0; j < va->cols; ++j) ga->at(r, j) += gr;
                }
                break;
            case Op::Dot:
                for (size_t k = 0; k < va->size(); ++k) {
                    ga->v[k] += g.v[0] * vb->v[k];
                    gb->v[k] += g.v[0] * va->v[k];
                }
                break;
            case Op::Tanh:
                for (size_t k = 0; k < g.size(); ++k)
                    ga->v[k] += g.v[k] * (1.0 - n.data.v[k] * n.data.v[k]);
                break;
            case Op::Artanh:
                for (size_t k = 0; k < g.size(); ++k) {
                    const double x = va->v[k];
                    if (std::abs(x) >= kArtanhLim) continue;  // clamped: output flat
                    ga->v[k] += g.v[k] / (1.0 - x * x);
                }
                break;
            case Op::Asinh:
                for (size_t k = 0; k < g.size(); ++k) {
                    const double x = va->v[k];
                    ga->v[k] += g.v[k] / std::sqrt(1.0 + x * x);
                }
                break;
            case Op::Sigmoid:
                for (size_t k = 0; k < g.size(); ++k) {
                    const double y = n.data.v[k];
                    ga->v[k] += g.v[k] * y * (1.0 - y);
                }
                break;
            case Op::Exp:
                for (size_t k = 0; k < g.size(); ++k) ga->v[k] += g.v[k] * n.data.v[k];
                break;
            case Op::Log:
                for (size_t k = 0; k < g.size(); ++k) ga->v[k] += g.v[k] / va->v[k];
                break;
            case Op::LeakyRelu:
                for (size_t k = 0; k < g.size(); ++k)
                    ga->v[k] += g.v[k] * (va->v[k] >= 0.0 ? 1.0 : n.k0);
                break;
            case Op::ClampMin:
                for (size_t k = 0; k < g.size(); ++k)
                    if (va->v[k] > n.k0) ga->v[k] += g.v[k];
                break;
            case Op::ClampMax:
                for (size_t k = 0; k < g.size(); ++k)
                    if (va->v[k] < n.k0) ga->v[k] += g.v[k];
                break;
            case Op::AddConst:
                for (size_t k = 0; k < g.size(); ++k) ga->v[k] += g.v[k];
                break;
            case Op::MulConst:
                for (size_t k = 0; k < g.size(); ++k) ga->v[k] += g.v[k] * n.k0;
                break;
            case Op::SoftmaxRows:
                for (int r = 0; r < g.rows; ++r) {
                    double inner = 0.0;
                    for (int j = 0; j < g.cols; ++j) inner += g.at(r, j) * n.data.at(r, j);
                    for (int j = 0; j < g.cols; ++j)
                        ga->at(r, j) += n.data.at(r, j) * (g.at(r, j) - inner);
                }
                break;
            case Op::SoftmaxGroups: {
                int ngroups = 0;
                for (int gi : n.idx) ngroups = std::max(ngroups, gi + 1);
                std::vector<double> inner(static_cast<size_t>(ngroups), 0.0);
                for (int r = 0; r < g.rows; ++r)
                    inner[n.idx[static_cast<size_t>(r)]] += g.at(r, 0) * n.data.at(r, 0);
                for (int r = 0; r < g.rows; ++r)
                    ga->at(r, 0) += n.data.at(r, 0) * (g.at(r, 0) - inner[n.idx[static_cast<size_t>(r)]]);
                break;
            }
            case Op::Sum:
                for (size_t k = 0; k < va->size(); ++k) ga->v[k] += g.v[0];
                break;
            case Op::Mean: {
                const double f = g.v[0] / static_cast<double>(va->size());
                for (size_t k = 0; k < va->size(); ++k) ga->v[k] += f;
                break;
            }
            case Op::L2NormalizeRows:
                for (int r = 0; r < va->rows; ++r) {
                    const double nr = row_norm2(*va, r);
                    if (nr > n.k0) {
                        double inner = 0.0;
                        for (int j = 0; j < va->cols; ++j) inner += g.at(r, j) * va->at(r, j);
                        const double n3 = nr * nr * nr;
                        for (int j = 0; j < va->cols; ++j)
                            ga->at(r, j) += g.at(r, j) / nr - va->at(r, j) * inner / n3;
                    } else {
                        for (int j = 0; j < va->cols; ++j) ga->at(r, j) += g.at(r, j) / n.k0;
                    }
                }
                break;
        }
    }
}

std::vector<int> Tape::leaf_ids() const {
    std::vector<int> ids;
    for (size_t i = 0; i < nodes_.size(); ++i)
        if (nodes_[i].op == Op::Leaf) ids.push_back(static_cast<int>(i));
    return ids;
}

GradCheckResult compare_against_finite_diff(const LossBuilder& build_loss,
                                            const std::vector<Tensor>& params,
                                            const std::vector<Tensor>& analytic,
                                            double h) {
    require(h > 0.0, "compare_against_finite_diff: step must be positive");
    require(analytic.size() == params.size(), "compare_against_finite_diff: gradient count mismatch");
    std::vector<Tensor> probe = params;
    GradCheckResult res;
    for (size_t p = 0; p < params.size(); ++p) {
        for (size_t k = 0; k < params[p].size(); ++k) {
            const double orig = probe[p].v[k];
            probe[p].v[k] = orig + h;
            Tape tp;
            const double fp = build_loss(tp, probe).value().v[0];
            probe[p].v[k] = orig - h;
            Tape tm;
            const double fm = build_loss(tm, probe).value().v[0];
            probe[p].v[k] = orig;
            const double numeric = (fp - fm) / (2.0 * h);
            const double an = analytic[p].v[k];
            const double denom = std::max({std::abs(an), std::abs(numeric), 1e-8});
            const double rel = std::abs(an - numeric) / denom;
            if (rel > res.max_rel_error) {
                res.max_rel_error = rel;
                res.worst_param = static_cast<int>(p);
                res.worst_coord = static_cast<int>(k);
                res.analytic = an;
                res.numeric = numeric;
            }
        }
    }
    return res;
}

GradCheckResult compare_against_finite_diff_multi(const LossBuilder& build_loss,
                                                  const std::vector<Tensor>& params,
                                                  const std::vector<Tensor>& analytic,
                                                  const std::vector<double>& steps) {
    require(!steps.empty(), "compare_against_finite_diff_multi: need at least one step");
    require(analytic.size() == params.size(),
            "compare_against_finite_diff_multi: gradient count mismatch");
    std::vector<Tensor> probe = params;
    GradCheckResult res;
    for (size_t p = 0; p < params.size(); ++p) {
        for (size_t k = 0; k < params[p].size(); ++k) {
            const double orig = probe[p].v[k];
            const double an = analytic[p].v[k];
            double best_rel = -1.0, best_numeric = 0.0;
            for (double h : steps) {
                probe[p].v[k] = orig + h;
                Tape tp;
                const double fp = build_loss(tp, probe).value().v[0];
                probe[p].v[k] = orig - h;
                Tape tm;
                const double fm = build_loss(tm, probe).value().v[0];
                probe[p].v[k] = orig;
                const double numeric = (fp - fm) / (2.0 * h);
                const double denom = std::max({std::abs(an), std::abs(numeric), 1e-8});
                const double rel = std::abs(an - numeric) / denom;
                if (best_rel < 0.0 || rel < best_rel) {
                    best_rel = rel;
                    best_numeric = numeric;
                }
            }
            if (best_rel > res.max_rel_error) {
                res.max_rel_error = best_rel;
                res.worst_param = static_cast<int>(p);
                res.worst_coord = static_cast<int>(k);
                res.analytic = an;
                res.numeric = best_numeric;
            }
        }
    }
    return res;
}

namespace {

std::vector<Tensor> analytic_leaf_grads(const LossBuilder& build_loss,
                                        const std::vector<Tensor>& params) {
    Tape tape;
    Var loss = build_loss(tape, params);
    tape.backward(loss);
    // Leaves appear on the tape in the order build_loss registers them, which
    // must match the order of `params`.
    const std::vector<int> leaves = tape.leaf_ids();
    require(leaves.size() == params.size(),
            "finite_diff_check: build_loss must register one leaf per parameter");
    std::vector<Tensor> analytic;
    analytic.reserve(leaves.size());
    for (int id : leaves) analytic.push_back(tape.grad(id));
    return analytic;
}

}  // namespace

GradCheckResult finite_diff_check(const LossBuilder& build_loss,
                                  const std::vector<Tensor>& params,
                                  double h) {
    return compare_against_finite_diff(build_loss, params,
                                       analytic_leaf_grads(build_loss, params), h);
}

GradCheckResult finite_diff_check_multi(const LossBuilder& build_loss,
                                        const std::vector<Tensor>& params) {
    return compare_against_finite_diff_multi(build_loss, params,
                                             analytic_leaf_grads(build_loss, params),
                                             {1e-6, 1e-5, 1e-4});
}

}  // namespace gil::ad
