#include "qsvd/dense.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qsvd/error.hpp"
#include "qsvd/tolerances.hpp"

namespace qsvd {

namespace {

constexpr int max_jacobi_sweeps = 100;

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

// One-sided Jacobi on the columns of a tall matrix (rows >= cols). Returns the
// rotated columns W = A V and the accumulated rotations V (both column lists).
void jacobi_columns(std::vector<std::vector<double>>& w, std::vector<std::vector<double>>& v) {
    const std::size_t n = w.size();
    for (int sweep = 0; sweep < max_jacobi_sweeps; ++sweep) {
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double alpha = dot(w[p], w[p]);
                const double beta = dot(w[q], w[q]);
                const double gamma = dot(w[p], w[q]);
                if (gamma == 0.0 || std::abs(gamma) <= Tolerances::eps * std::sqrt(alpha * beta)) continue;
                rotated = true;
                const double zeta = (beta - alpha) / (2.0 * gamma);
                const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (std::size_t i = 0; i < w[p].size(); ++i) {
                    const double wp = w[p][i], wq = w[q][i];
                    w[p][i] = c * wp - s * wq;
                    w[q][i] = s * wp + c * wq;
                }
                for (std::size_t i = 0; i < v[p].size(); ++i) {
                    const double vp = v[p][i], vq = v[q][i];
                    v[p][i] = c * vp - s * vq;
                    v[q][i] = s * vp + c * vq;
                }
            }
        }
        if (!rotated) return;
    }
}

// Thin SVD of a tall matrix as column lists.
struct TallSvd {
    std::vector<std::vector<double>> u;
    std::vector<double> sigma;
    std::vector<std::vector<double>> v;
};

TallSvd tall_svd(const DenseMatrix& a) {
    const std::size_t m = a.rows();
    const std::size_t n = a.cols();
    TallSvd out;
    out.u.assign(n, std::vector<double>(m));
    out.v.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < m; ++i) out.u[j][i] = a(i, j);
        out.v[j][j] = 1.0;
    }
    jacobi_columns(out.u, out.v);

    out.sigma.resize(n);
    for (std::size_t j = 0; j < n; ++j) out.sigma[j] = norm2(out.u[j]);

    // Descending order; a later column only overtakes an earlier one when it is
    // larger by more than the tie tolerance.
    const double smax = n ? *std::max_element(out.sigma.begin(), out.sigma.end()) : 0.0;
    const double tie = Tolerances::sigma_tie * smax;
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t i = 1; i < n; ++i) {
        std::size_t j = i;
        while (j > 0 && out.sigma[order[j]] > out.sigma[order[j - 1]] + tie) {
            std::swap(order[j], order[j - 1]);
            --j;
        }
    }
    TallSvd sorted;
    for (std::size_t idx : order) {
        sorted.u.push_back(std::move(out.u[idx]));
        sorted.v.push_back(std::move(out.v[idx]));
        sorted.sigma.push_back(out.sigma[idx]);
    }

    // Normalize left vectors; those of (numerically) zero singular values are
    // replaced by an orthonormal completion built from unit vectors.
    const double zero_cut = static_cast<double>(std::max(m, n)) * Tolerances::eps * smax;
    std::vector<bool> valid(n, false);
    for (std::size_t j = 0; j < n; ++j) {
        if (sorted.sigma[j] > zero_cut && sorted.sigma[j] > 0.0) {
            for (double& x : sorted.u[j]) x /= sorted.sigma[j];
            valid[j] = true;
        }
    }
    std::size_t next_unit = 0;
    for (std::size_t j = 0; j < n; ++j) {
        if (valid[j]) continue;
        while (next_unit < m) {
            std::vector<double> cand(m, 0.0);
            cand[next_unit++] = 1.0;
            for (int pass = 0; pass < 2; ++pass)
                for (std::size_t l = 0; l < n; ++l) {
                    if (!valid[l]) continue;
                    const double h = dot(sorted.u[l], cand);
                    for (std::size_t i = 0; i < m; ++i) cand[i] -= h * sorted.u[l][i];
                }
            const double nrm = norm2(cand);
            if (nrm > 0.5) {
                for (double& x : cand) x /= nrm;
                sorted.u[j] = std::move(cand);
                valid[j] = true;
                break;
            }
        }
    }
    return sorted;
}

DenseMatrix from_columns(const std::vector<std::vector<double>>& cols, std::size_t rows) {
    DenseMatrix out(rows, cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j)
        for (std::size_t i = 0; i < rows; ++i) out(i, j) = cols[j][i];
    return out;
}

}  // namespace

SvdResult dense_svd(const DenseMatrix& a) {
    if (!a.all_finite()) throw NonFiniteError("dense_svd: non-finite input");
    const bool wide = a.rows() < a.cols();
    const DenseMatrix tall = wide ? a.transpose() : a;
    TallSvd s = tall_svd(tall);

    SvdResult r;
    r.sigmas = s.sigma;
    if (wide) {
        r.U = from_columns(s.v, tall.cols());
        r.V = from_columns(s.u, tall.rows());
    } else {
        r.U = from_columns(s.u, tall.rows());
        r.V = from_columns(s.v, tall.cols());
    }

    // First significant entry of each left vector is positive.
    for (std::size_t j = 0; j < r.sigmas.size(); ++j) {
        for (std::size_t i = 0; i < r.U.rows(); ++i) {
            const double u = r.U(i, j);
            if (std::abs(u) <= Tolerances::sign_cutoff) continue;
            if (u < 0.0) {
                for (std::size_t l = 0; l < r.U.rows(); ++l) r.U(l, j) = -r.U(l, j);
                for (std::size_t l = 0; l < r.V.rows(); ++l) r.V(l, j) = -r.V(l, j);
            }
            break;
        }
    }
    return r;
}

QrResult qr_factor(const DenseMatrix& c) {
    const std::size_t m = c.rows();
    const std::size_t n = c.cols();
    if (m < n) throw DimensionError("qr_factor: needs rows >= cols");
    const double scale = c.frobenius_norm();

    DenseMatrix r = c;
    std::vector<std::vector<double>> reflectors(n);
    for (std::size_t j = 0; j < n; ++j) {
        double tail = 0.0;
        for (std::size_t i = j + 1; i < m; ++i) tail += r(i, j) * r(i, j);
        if (tail == 0.0) continue;  // already upper triangular in this column
        const double x0 = r(j, j);
        const double alpha = -std::copysign(std::sqrt(x0 * x0 + tail), x0);
        std::vector<double> v(m - j);
        v[0] = x0 - alpha;
        for (std::size_t i = j + 1; i < m; ++i) v[i - j] = r(i, j);
        const double vv = v[0] * v[0] + tail;
        for (std::size_t col = j; col < n; ++col) {
            double s = 0.0;
            for (std::size_t i = j; i < m; ++i) s += v[i - j] * r(i, col);
            s *= 2.0 / vv;
            for (std::size_t i = j; i < m; ++i) r(i, col) -= s * v[i - j];
        }
        for (std::size_t i = j + 1; i < m; ++i) r(i, j) = 0.0;
        reflectors[j] = std::move(v);
    }

    // Thin Q = H_0 ... H_{n-1} [I_n; 0]
    DenseMatrix q(m, n);
    for (std::size_t j = 0; j < n; ++j) q(j, j) = 1.0;
    for (std::size_t jj = n; jj-- > 0;) {
        const auto& v = reflectors[jj];
        if (v.empty()) continue;
        double vv = 0.0;
        for (double x : v) vv += x * x;
        for (std::size_t col = 0; col < n; ++col) {
            double s = 0.0;
            for (std::size_t i = jj; i < m; ++i) s += v[i - jj] * q(i, col);
            s *= 2.0 / vv;
            for (std::size_t i = jj; i < m; ++i) q(i, col) -= s * v[i - jj];
        }
    }

    DenseMatrix rr = r.block(0, 0, n, n);
    for (std::size_t j = 0; j < n; ++j) {
        if (rr(j, j) < 0.0) {
            for (std::size_t col = j; col < n; ++col) rr(j, col) = -rr(j, col);
            for (std::size_t i = 0; i < m; ++i) q(i, j) = -q(i, j);
        }
        if (rr(j, j) <= Tolerances::qr_rank * scale)
            throw SingularMatrixError("qr_factor: rank-deficient input");
    }
    return {std::move(q), std::move(rr)};
}

std::vector<double> bidiag_solve(std::span<const double> alphas, std::span<const double> betas,
                                 std::span<const double> b) {
    const std::size_t k = alphas.size();
    if (b.size() != k || (k > 0 && betas.size() + 1 != k)) throw DimensionError("bidiag_solve: size mismatch");
    double amax = 0.0;
    for (double a : alphas) amax = std::max(amax, std::abs(a));
    for (double a : alphas)
        if (!(std::abs(a) > Tolerances::bidiag_pivot * amax))
            throw SingularMatrixError("bidiag_solve: near-singular bidiagonal matrix");
    std::vector<double> x(k);
    for (std::size_t j = k; j-- > 0;) {
        double s = b[j];
        if (j + 1 < k) s -= betas[j] * x[j + 1];
        x[j] = s / alphas[j];
    }
    return x;
}

std::vector<double> upper_solve(const DenseMatrix& r, std::span<const double> b) {
    const std::size_t n = r.rows();
    if (r.cols() != n || b.size() != n) throw DimensionError("upper_solve: size mismatch");
    double dmax = 0.0;
    for (std::size_t i = 0; i < n; ++i) dmax = std::max(dmax, std::abs(r(i, i)));
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        if (!(std::abs(r(i, i)) > Tolerances::bidiag_pivot * dmax))
            throw SingularMatrixError("upper_solve: near-singular triangular matrix");
        double s = b[i];
        for (std::size_t j = i + 1; j < n; ++j) s -= r(i, j) * x[j];
        x[i] = s / r(i, i);
    }
    return x;
}

DenseMatrix tri_solve_upper(const DenseMatrix& r, const DenseMatrix& b) {
    const std::size_t n = r.rows();
    if (r.cols() != n || b.cols() != n) throw DimensionError("tri_solve_upper: size mismatch");
    double dmax = 0.0;
    for (std::size_t i = 0; i < n; ++i) dmax = std::max(dmax, std::abs(r(i, i)));
    for (std::size_t i = 0; i < n; ++i)
        if (!(std::abs(r(i, i)) > Tolerances::bidiag_pivot * dmax))
            throw SingularMatrixError("tri_solve_upper: singular triangular matrix");
    DenseMatrix x(b.rows(), n);
    // each row solves x R = b, i.e. R^T x^T = b^T by forward substitution
    for (std::size_t row = 0; row < b.rows(); ++row)
        for (std::size_t j = 0; j < n; ++j) {
            double s = b(row, j);
            for (std::size_t i = 0; i < j; ++i) s -= x(row, i) * r(i, j);
            x(row, j) = s / r(j, j);
        }
    return x;
}

}  // namespace qsvd
