#pragma once

#include <chrono>
#include <cmath>
#include <cstddef>

#include "mapmrf/model.hpp"
#include "mapmrf/projection.hpp"
#include "mapmrf/tensor.hpp"

namespace mapmrf::detail {

using Clock = std::chrono::steady_clock;

inline double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

inline void axpy(BlockVector& y, double alpha, const BlockVector& x) {
    auto dst = y.flat();
    auto src = x.flat();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += alpha * src[i];
}

inline BlockVector difference(const BlockVector& a, const BlockVector& b) {
    BlockVector out = a;
    auto dst = out.flat();
    auto src = b.flat();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] -= src[i];
    return out;
}

inline double squared_distance(const BlockVector& a, const BlockVector& b) {
    auto fa = a.flat();
    auto fb = b.flat();
    double acc = 0.0;
    for (std::size_t i = 0; i < fa.size(); ++i) {
        const double d = fa[i] - fb[i];
        acc += d * d;
    }
    return acc;
}

/// Frank-Wolfe gap of x given the gradient: sum_i (g_i . x_i - min g_i).
inline double fw_gap(const GradientVector& grad, const ContinuousAssignment& x) {
    double gap = 0.0;
    for (std::size_t i = 0; i < x.num_blocks(); ++i) {
        auto g = grad.block(i);
        auto xi = x.block(i);
        double dot = 0.0;
        double lo = g[0];
        for (std::size_t s = 0; s < g.size(); ++s) {
            dot += g[s] * xi[s];
            if (g[s] < lo) lo = g[s];
        }
        gap += dot - lo;
    }
    return gap < 0.0 ? 0.0 : gap;
}

/// Label of an exactly one-hot block, or -1.
inline int one_hot_label(std::span<const double> block) {
    int hot = -1;
    for (std::size_t s = 0; s < block.size(); ++s) {
        if (block[s] == 1.0) {
            if (hot >= 0) return -1;
            hot = static_cast<int>(s);
        } else if (block[s] != 0.0) {
            return -1;
        }
    }
    return hot;
}

inline DiscreteLabeling labels_from_vertices(const ContinuousAssignment& x) {
    DiscreteLabeling labels(x.num_blocks());
    for (std::size_t i = 0; i < x.num_blocks(); ++i) {
        auto block = x.block(i);
        std::size_t best = 0;
        for (std::size_t s = 1; s < block.size(); ++s) {
            if (block[s] > block[best]) best = s;
        }
        labels[i] = static_cast<int>(best);
    }
    return labels;
}

}  // namespace mapmrf::detail
