#include "mapmrf/linesearch.hpp"

#include <algorithm>
#include <cmath>

#include "mapmrf/errors.hpp"

namespace mapmrf {

namespace {

ContinuousAssignment displaced(const ContinuousAssignment& x, const BlockVector& r,
                               double alpha) {
    ContinuousAssignment out = x;
    auto dst = out.flat();
    auto step = r.flat();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += alpha * step[i];
    return out;
}

/// Solves the dense square system M a = b in place; partial pivoting.
std::vector<double> solve_dense(std::vector<std::vector<double>> m, std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t row = col + 1; row < n; ++row) {
            if (std::fabs(m[row][col]) > std::fabs(m[pivot][col])) pivot = row;
        }
        if (m[pivot][col] == 0.0) {
            throw Error("singular probe system in line-search coefficient recovery");
        }
        std::swap(m[col], m[pivot]);
        std::swap(b[col], b[pivot]);
        for (std::size_t row = col + 1; row < n; ++row) {
            const double f = m[row][col] / m[col][col];
            if (f == 0.0) continue;
            for (std::size_t k = col; k < n; ++k) m[row][k] -= f * m[col][k];
            b[row] -= f * b[col];
        }
    }
    std::vector<double> a(n, 0.0);
    for (std::size_t row = n; row-- > 0;) {
        double acc = b[row];
        for (std::size_t k = row + 1; k < n; ++k) acc -= m[row][k] * a[k];
        a[row] = acc / m[row][row];
    }
    return a;
}

}  // namespace

std::vector<double> poly_coeffs_probed(const MrfModel& model, const ContinuousAssignment& x,
                                       const BlockVector& r) {
    const int degree = model.degree();
    std::vector<double> coeffs(static_cast<std::size_t>(degree) + 1, 0.0);
    coeffs[0] = energy_continuous(model, x);

    // Probe at the fixed points k/D; subtracting the exact constant term
    // leaves a D x D system in the remaining coefficients.
    std::vector<std::vector<double>> m(static_cast<std::size_t>(degree),
                                       std::vector<double>(static_cast<std::size_t>(degree)));
    std::vector<double> rhs(static_cast<std::size_t>(degree));
    for (int k = 1; k <= degree; ++k) {
        const double alpha = static_cast<double>(k) / static_cast<double>(degree);
        double power = alpha;
        for (int j = 0; j < degree; ++j) {
            m[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(j)] = power;
            power *= alpha;
        }
        rhs[static_cast<std::size_t>(k - 1)] =
            energy_continuous(model, displaced(x, r, alpha)) - coeffs[0];
    }
    const std::vector<double> solved = solve_dense(std::move(m), std::move(rhs));
    for (int j = 0; j < degree; ++j) {
        coeffs[static_cast<std::size_t>(j) + 1] = solved[static_cast<std::size_t>(j)];
    }
    return coeffs;
}

std::vector<double> poly_coeffs_pairwise(const MrfModel& model, const ContinuousAssignment& x,
                                         const BlockVector& r) {
    const int degree = model.degree();
    if (degree > 2) throw NotPairwise("closed-form coefficients need degree <= 2");
    double quad = 0.0;
    double lin = 0.0;
    for (const Clique& c : model.cliques) {
        if (c.arity() == 1) {
            auto ri = r.block(static_cast<std::size_t>(c.nodes[0]));
            for (std::size_t s = 0; s < ri.size(); ++s) lin += c.potential.values[s] * ri[s];
        } else {
            auto xi = x.block(static_cast<std::size_t>(c.nodes[0]));
            auto xj = x.block(static_cast<std::size_t>(c.nodes[1]));
            auto ri = r.block(static_cast<std::size_t>(c.nodes[0]));
            auto rj = r.block(static_cast<std::size_t>(c.nodes[1]));
            const std::size_t cols = xj.size();
            for (std::size_t s = 0; s < xi.size(); ++s) {
                const double* row = c.potential.values.data() + s * cols;
                double row_rj = 0.0;
                double row_xj = 0.0;
                for (std::size_t t = 0; t < cols; ++t) {
                    row_rj += row[t] * rj[t];
                    row_xj += row[t] * xj[t];
                }
                quad += ri[s] * row_rj;
                lin += xi[s] * row_rj + ri[s] * row_xj;
            }
        }
    }
    std::vector<double> coeffs{energy_continuous(model, x), lin};
    if (degree == 2) coeffs.push_back(quad);
    return coeffs;
}

std::vector<double> poly_coeffs(const MrfModel& model, const ContinuousAssignment& x,
                                const BlockVector& r) {
    if (model.degree() <= 2) return poly_coeffs_pairwise(model, x, r);
    return poly_coeffs_probed(model, x, r);
}

double eval_poly(const std::vector<double>& coeffs, double alpha) {
    double acc = 0.0;
    for (std::size_t j = coeffs.size(); j-- > 0;) acc = acc * alpha + coeffs[j];
    return acc;
}

double minimize_poly(const std::vector<double>& coeffs, double scan_delta) {
    std::size_t degree = coeffs.size() - 1;
    while (degree > 0 && coeffs[degree] == 0.0) --degree;

    double best_alpha = 0.0;
    double best_value = eval_poly(coeffs, 0.0);
    const auto consider = [&](double alpha) {
        const double value = eval_poly(coeffs, alpha);
        if (value < best_value) {
            best_value = value;
            best_alpha = alpha;
        }
    };

    if (degree <= 3) {
        // Interior candidates are the real roots of the derivative.
        const double c1 = degree >= 1 ? coeffs[1] : 0.0;
        const double c2 = degree >= 2 ? coeffs[2] : 0.0;
        const double c3 = degree >= 3 ? coeffs[3] : 0.0;
        if (c3 != 0.0) {
            const double a = 3.0 * c3, b = 2.0 * c2, c = c1;
            const double disc = b * b - 4.0 * a * c;
            if (disc >= 0.0) {
                const double sq = std::sqrt(disc);
                for (double root : {(-b - sq) / (2.0 * a), (-b + sq) / (2.0 * a)}) {
                    if (root > 0.0 && root < 1.0) consider(root);
                }
            }
        } else if (c2 != 0.0) {
            const double root = -c1 / (2.0 * c2);
            if (root > 0.0 && root < 1.0) consider(root);
        }
        consider(1.0);
    } else {
        const int steps = static_cast<int>(std::lround(1.0 / scan_delta));
        for (int k = 1; k <= steps; ++k) {
            consider(std::min(1.0, static_cast<double>(k) * scan_delta));
        }
        consider(1.0);
    }
    return best_alpha;
}

double line_search(const MrfModel& model, const ContinuousAssignment& x, const BlockVector& r,
                   double scan_delta) {
    return minimize_poly(poly_coeffs(model, x, r), scan_delta);
}

}  // namespace mapmrf
