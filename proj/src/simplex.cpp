#include "hdm/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hdm {

namespace {

// Inverse of the basis matrix by Gauss-Jordan with partial pivoting.
bool invert(Matrix& B) {
    const std::size_t m = B.rows;
    Matrix inv(m, m);
    for (std::size_t i = 0; i < m; ++i) inv(i, i) = 1.0;
    for (std::size_t col = 0; col < m; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < m; ++r)
            if (std::abs(B(r, col)) > std::abs(B(piv, col))) piv = r;
        if (std::abs(B(piv, col)) < 1e-300) return false;
        if (piv != col) {
            for (std::size_t k = 0; k < m; ++k) {
                std::swap(B(piv, k), B(col, k));
                std::swap(inv(piv, k), inv(col, k));
            }
        }
        const double d = 1.0 / B(col, col);
        for (std::size_t k = 0; k < m; ++k) {
            B(col, k) *= d;
            inv(col, k) *= d;
        }
        for (std::size_t r = 0; r < m; ++r) {
            if (r == col) continue;
            const double f = B(r, col);
            if (f == 0.0) continue;
            double* br = B.row(r);
            double* ir = inv.row(r);
            const double* bc = B.row(col);
            const double* ic = inv.row(col);
            for (std::size_t k = 0; k < m; ++k) {
                br[k] -= f * bc[k];
                ir[k] -= f * ic[k];
            }
        }
    }
    B = std::move(inv);
    return true;
}

}  // namespace

LPResult simplex_max(const Matrix& A, const Vec& b, const Vec& c, const SimplexOptions& opt) {
    const std::size_t m = A.rows, N = A.cols;
    if (b.size() != m || c.size() != N) throw ConfigError("simplex: dimension mismatch");
    for (double v : b)
        if (v < 0) throw ConfigError("simplex: right-hand side must be nonnegative");

    auto column = [&](std::size_t j, Vec& out) {
        out.assign(m, 0.0);
        if (j < N)
            for (std::size_t i = 0; i < m; ++i) out[i] = A(i, j);
        else
            out[j - N] = 1.0;
    };
    auto cost = [&](std::size_t j) { return j < N ? c[j] : 0.0; };
    auto at_times = [&](const Vec& v, Vec& out) {
        if (opt.transpose_times) {
            opt.transpose_times(v, out);
            return;
        }
        out.assign(N, 0.0);
        for (std::size_t i = 0; i < m; ++i) {
            const double vi = v[i];
            if (vi == 0.0) continue;
            const double* r = A.row(i);
            for (std::size_t j = 0; j < N; ++j) out[j] += vi * r[j];
        }
    };

    std::vector<std::size_t> basis(m);
    std::vector<char> in_basis(N + m, 0);
    for (std::size_t i = 0; i < m; ++i) {
        basis[i] = N + i;
        in_basis[N + i] = 1;
    }
    Matrix Binv(m, m);
    for (std::size_t i = 0; i < m; ++i) Binv(i, i) = 1.0;
    Vec xB = b, y(m), aty(N), col(m), tmp, rho(m), alpha_r(N);
    Vec weight(N + m, 1.0);  // devex reference weights
    const bool devex = opt.pricing == Pricing::devex;

    auto refactor = [&]() {
        Matrix B(m, m);
        for (std::size_t k = 0; k < m; ++k) {
            column(basis[k], tmp);
            for (std::size_t i = 0; i < m; ++i) B(i, k) = tmp[i];
        }
        if (!invert(B)) throw NumericalError("simplex: singular basis");
        Binv = std::move(B);
        for (std::size_t i = 0; i < m; ++i) {
            double s = 0.0;
            const double* r = Binv.row(i);
            for (std::size_t k = 0; k < m; ++k) s += r[k] * b[k];
            xB[i] = std::max(s, 0.0);
        }
    };
    auto duals = [&]() {
        std::fill(y.begin(), y.end(), 0.0);
        for (std::size_t k = 0; k < m; ++k) {
            const double ck = cost(basis[k]);
            if (ck == 0.0) continue;
            const double* r = Binv.row(k);
            for (std::size_t i = 0; i < m; ++i) y[i] += ck * r[i];
        }
    };
    auto reduced = [&](std::size_t j) { return j < N ? c[j] - aty[j] : -y[j - N]; };

    const int refactor_every =
        opt.refactor_every > 0 ? opt.refactor_every : std::max<int>(100, 2 * static_cast<int>(m));
    LPResult res;
    duals();
    bool bland = false;
    int degenerate = 0, since_refactor = 0;
    for (int it = 0;; ++it) {
        if (it >= opt.max_iter) {
            res.status = LPStatus::iteration_limit;
            break;
        }
        at_times(y, aty);
        std::size_t enter = N + m;
        double best = 0.0;
        for (std::size_t j = 0; j < N + m; ++j) {
            if (in_basis[j]) continue;
            const double dj = reduced(j);
            if (dj <= opt.opt_tol) continue;
            if (bland) {
                enter = j;
                break;
            }
            const double score = devex ? dj * dj / weight[j] : dj;
            if (enter == N + m || score > best) {
                enter = j;
                best = score;
            }
        }
        if (enter == N + m) {
            res.status = LPStatus::optimal;
            break;
        }
        const double d_enter = reduced(enter);
        column(enter, tmp);
        for (std::size_t i = 0; i < m; ++i) {
            double s = 0.0;
            const double* r = Binv.row(i);
            for (std::size_t k = 0; k < m; ++k) s += r[k] * tmp[k];
            col[i] = s;
        }
        double cmax = 0.0;
        for (double v : col) cmax = std::max(cmax, std::abs(v));
        const double ptol = opt.piv_tol * std::max(1.0, cmax);
        std::size_t leave = m;
        double ratio = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < m; ++i) {
            if (col[i] <= ptol) continue;
            const double r = xB[i] / col[i];
            bool take = false;
            if (leave == m || r < ratio - 1e-12 * (1.0 + ratio)) {
                take = true;
            } else if (r <= ratio + 1e-12 * (1.0 + ratio)) {
                // Ties: Bland picks the lowest variable index, otherwise the larger pivot.
                take = bland ? basis[i] < basis[leave] : col[i] > col[leave];
            }
            if (take) {
                leave = i;
                ratio = std::min(r, ratio);
            }
        }
        if (leave == m) {
            // Confirm on a fresh factorization before reporting unboundedness.
            if (since_refactor > 0) {
                refactor();
                duals();
                since_refactor = 0;
                continue;
            }
            res.status = LPStatus::unbounded;
            break;
        }
        const double step = xB[leave] / col[leave];
        if (step <= 1e-13) {
            if (++degenerate >= opt.degenerate_switch) bland = true;
        } else {
            degenerate = 0;
            bland = false;
        }
        if (bland) ++res.bland_pivots;

        const double pv = col[leave];
        if (devex) {
            // Pivot row alpha_r = (row r of the old inverse) * A.
            const double* lr = Binv.row(leave);
            std::copy(lr, lr + m, rho.begin());
            at_times(rho, alpha_r);
            const double wq = weight[enter];
            for (std::size_t j = 0; j < N + m; ++j) {
                if (in_basis[j] || j == enter) continue;
                const double a = (j < N ? alpha_r[j] : rho[j - N]) / pv;
                weight[j] = std::max(weight[j], a * a * wq);
            }
            weight[basis[leave]] = std::max(wq / (pv * pv), 1.0);
            // Reset the reference framework when the weights degenerate.
            if (!(weight[basis[leave]] < 1e30)) std::fill(weight.begin(), weight.end(), 1.0);
        }

        for (std::size_t i = 0; i < m; ++i) xB[i] = std::max(xB[i] - step * col[i], 0.0);
        xB[leave] = step;
        double* lr = Binv.row(leave);
        for (std::size_t k = 0; k < m; ++k) lr[k] /= pv;
        for (std::size_t i = 0; i < m; ++i) {
            if (i == leave || col[i] == 0.0) continue;
            const double f = col[i];
            double* r = Binv.row(i);
            for (std::size_t k = 0; k < m; ++k) r[k] -= f * lr[k];
        }
        // Rank-one dual update: y += d_q * (new row of the basis inverse).
        for (std::size_t k = 0; k < m; ++k) y[k] += d_enter * lr[k];
        in_basis[basis[leave]] = 0;
        basis[leave] = enter;
        in_basis[enter] = 1;
        res.iterations = it + 1;
        if (++since_refactor >= refactor_every) {
            refactor();
            duals();
            since_refactor = 0;
        }
    }
    refactor();
    duals();
    res.x.assign(N, 0.0);
    res.value = 0.0;
    for (std::size_t k = 0; k < m; ++k)
        if (basis[k] < N) {
            res.x[basis[k]] = xB[k];
            res.value += c[basis[k]] * xB[k];
        }
    res.y = y;
    return res;
}

}  // namespace hdm
