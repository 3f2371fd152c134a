#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "gil/error.hpp"

namespace gil {

/// Dense row-major matrix of doubles. Scalars are 1x1, column vectors n x 1.
struct Tensor {
    int rows = 0;
    int cols = 0;
    std::vector<double> v;

    Tensor() = default;
    Tensor(int r, int c) : rows(r), cols(c), v(static_cast<size_t>(r) * c, 0.0) {
        require(r >= 0 && c >= 0, "Tensor: negative shape");
    }
    Tensor(int r, int c, std::vector<double> data) : rows(r), cols(c), v(std::move(data)) {
        require(v.size() == static_cast<size_t>(r) * c, "Tensor: data size does not match shape");
    }

    static Tensor zeros(int r, int c) { return Tensor(r, c); }
    static Tensor full(int r, int c, double x) {
        Tensor t(r, c);
        for (auto& e : t.v) e = x;
        return t;
    }
    static Tensor scalar(double x) { return Tensor(1, 1, {x}); }
    static Tensor row(std::vector<double> data) {
        int n = static_cast<int>(data.size());
        return Tensor(1, n, std::move(data));
    }
    static Tensor column(std::vector<double> data) {
        int n = static_cast<int>(data.size());
        return Tensor(n, 1, std::move(data));
    }

    double& at(int r, int c) { return v[static_cast<size_t>(r) * cols + c]; }
    double at(int r, int c) const { return v[static_cast<size_t>(r) * cols + c]; }

    size_t size() const { return v.size(); }
    bool same_shape(const Tensor& o) const { return rows == o.rows && cols == o.cols; }

    bool all_finite() const {
        for (double x : v)
            if (!std::isfinite(x)) return false;
        return true;
    }
};

inline double row_norm2(const Tensor& t, int r) {
    double s = 0.0;
    for (int c = 0; c < t.cols; ++c) s += t.at(r, c) * t.at(r, c);
    return std::sqrt(s);
}

}  // namespace gil
