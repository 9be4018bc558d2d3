#include "qsvd/bidiag.hpp"

#include <algorithm>
#include <cmath>

#include "qsvd/error.hpp"
#include "qsvd/tolerances.hpp"

namespace qsvd {

DenseMatrix BidiagFactorization::bidiagonal() const {
    DenseMatrix b(steps, steps);
    for (std::size_t j = 0; j < steps; ++j) {
        b(j, j) = alphas[j];
        if (j + 1 < steps) b(j, j + 1) = betas[j];
    }
    return b;
}

CycleState make_start_state(const CompactVector& p1, std::uint64_t seed) {
    CycleState s;
    s.f = p1;
    s.rng = Rng(seed);
    return s;
}

void lanczos_extend(const QuatMatrix& m, CycleState& state, std::size_t to_step) {
    const std::size_t n = m.cols();
    const std::size_t rows = m.rows();
    if (state.f.size() != n || state.P.size() != state.Q.size() || state.B.rows() != state.P.size() ||
        state.B.cols() != state.P.size())
        throw DimensionError("lanczos_extend: inconsistent state");
    if (to_step > std::min(rows, n)) throw InvalidArgument("lanczos_extend: too many steps");

    double scale = state.B.max_abs();
    while (state.steps() < to_step) {
        const std::size_t j = state.steps();
        CompactVector p;
        double beta = vec_norm(state.f);
        if (j == 0 && beta > 0.0) {
            p = state.f * (1.0 / beta);
            beta = 0.0;
        } else if (j > 0 && beta > Tolerances::breakdown * scale) {
            p = state.f * (1.0 / beta);
        } else {
            p = random_orthogonal_unit(n, state.P, state.rng);
            beta = 0.0;
            state.trace.events.push_back({state.cycle, j, TraceEventKind::Deflation});
        }
        scale = std::max(scale, beta);

        CompactVector q = structured_matvec(m, p);
        ++state.matvecs;
        if (j > 0) q.add_scaled(state.Q.back(), -beta);
        const double raw = vec_norm(q);
        q = orthogonalize_against_basis(q, state.Q);
        double alpha = vec_norm(q);
        if (alpha > Tolerances::breakdown * std::max(scale, raw)) {
            q *= 1.0 / alpha;
        } else {
            q = random_orthogonal_unit(rows, state.Q, state.rng);
            alpha = 0.0;
            state.trace.events.push_back({state.cycle, j, TraceEventKind::Deflation});
        }
        scale = std::max(scale, alpha);

        state.B.resize(j + 1, j + 1);
        if (j > 0) state.B(j - 1, j) = beta;
        state.B(j, j) = alpha;
        state.P.push_back(std::move(p));
        state.Q.push_back(std::move(q));

        CompactVector f = structured_matvec(m, state.Q.back(), true);
        ++state.matvecs;
        f.add_scaled(state.P.back(), -alpha);
        state.f = orthogonalize_against_basis(f, state.P);
    }
}

BidiagFactorization lanczos_bidiag(const QuatMatrix& m, const CompactVector& p1, std::size_t k,
                                   Rng& rng) {
    if (k < 1 || k > std::min(m.rows(), m.cols()))
        throw InvalidArgument("lanczos_bidiag: k must lie in [1, min(m, n)]");
    if (p1.size() != m.cols()) throw DimensionError("lanczos_bidiag: start vector length");
    if (std::abs(vec_norm(p1) - 1.0) > 1e-14) throw InvalidArgument("lanczos_bidiag: start vector not unit");

    CycleState s;
    s.f = p1;
    s.rng = rng;
    lanczos_extend(m, s, k);
    rng = s.rng;

    BidiagFactorization out;
    out.steps = k;
    for (std::size_t j = 0; j < k; ++j) {
        out.alphas.push_back(s.B(j, j));
        if (j + 1 < k) out.betas.push_back(s.B(j, j + 1));
    }
    out.betas.push_back(vec_norm(s.f));
    out.residual = std::move(s.f);
    out.P = std::move(s.P);
    out.Q = std::move(s.Q);
    out.deflations = s.trace.events.size();
    return out;
}

FactorizationResiduals factorization_residuals(const QuatMatrix& m, const CompactBasis& p,
                                               const CompactBasis& q, const DenseMatrix& b,
                                               const CompactVector& f) {
    const std::size_t k = p.size();
    if (q.size() != k || b.rows() != k || b.cols() != k) throw DimensionError("factorization_residuals: sizes");
    FactorizationResiduals r;
    if (k == 0) return r;
    double right = 0.0, left = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
        CompactVector d = structured_matvec(m, p[j]);
        for (std::size_t i = 0; i < k; ++i)
            if (b(i, j) != 0.0) d.add_scaled(q[i], -b(i, j));
        right += std::pow(vec_norm(d), 2);

        CompactVector e = structured_matvec(m, q[j], true);
        for (std::size_t i = 0; i < k; ++i)
            if (b(j, i) != 0.0) e.add_scaled(p[i], -b(j, i));
        if (j + 1 == k) e -= f;
        left += std::pow(vec_norm(e), 2);
    }
    r.right = std::sqrt(right);
    r.left = std::sqrt(left);
    r.p_orthogonality = orthogonality_error(p);
    r.q_orthogonality = orthogonality_error(q);
    for (const auto& v : p) r.residual_vs_p = std::max(r.residual_vs_p, quat_dot(v, f).norm());
    return r;
}

}  // namespace qsvd
