#include "qsvd/restart.hpp"

#include <algorithm>
#include <cmath>

#include "qsvd/error.hpp"
#include "qsvd/tolerances.hpp"

namespace qsvd {

namespace {

// Continuation direction p_{k+1} = f / beta_k; a seeded unit vector orthogonal
// to `against` when f has vanished (beta reported as 0), or zero when `against`
// already spans the space.
struct NextDirection {
    CompactVector p;
    double beta = 0.0;
    bool deflated = false;
};

NextDirection next_direction(const CycleState& s, const CompactBasis& against, Rng& rng) {
    NextDirection d;
    d.beta = vec_norm(s.f);
    if (d.beta > Tolerances::breakdown * s.B.max_abs()) {
        d.p = s.f * (1.0 / d.beta);
        return d;
    }
    d.beta = 0.0;
    d.deflated = true;
    d.p = against.size() < s.f.size() ? random_orthogonal_unit(s.f.size(), against, rng) : CompactVector(s.f.size());
    return d;
}

bool is_bidiagonal(const DenseMatrix& b) {
    for (std::size_t i = 0; i < b.rows(); ++i)
        for (std::size_t j = i + 2; j < b.cols(); ++j)
            if (b(i, j) != 0.0) return false;
    return true;
}

// x with B_k x = rhs, B_k the (upper triangular) projected matrix.
std::vector<double> projected_solve(const DenseMatrix& b, std::span<const double> rhs) {
    if (!is_bidiagonal(b)) return upper_solve(b, rhs);
    const std::size_t k = b.rows();
    std::vector<double> alphas(k), betas(k ? k - 1 : 0);
    for (std::size_t j = 0; j < k; ++j) {
        alphas[j] = b(j, j);
        if (j + 1 < k) betas[j] = b(j, j + 1);
    }
    return bidiag_solve(alphas, betas, rhs);
}

DenseMatrix augmented(const DenseMatrix& b, double beta) {
    const std::size_t k = b.rows();
    DenseMatrix a(k, k + 1);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) a(i, j) = b(i, j);
    if (k > 0) a(k - 1, k) = beta;
    return a;
}

// ||M p_{k+1} - beta_k q_k||, the right-residual scale of every harmonic triplet.
double harmonic_residual_norm(const QuatMatrix& m, const CycleState& s, const NextDirection& d) {
    if (d.deflated) return 0.0;
    CompactVector w = structured_matvec(m, d.p);
    w.add_scaled(s.Q.back(), -d.beta);
    return vec_norm(w);
}

}  // namespace

std::size_t SolverOptions::effective_mb(std::size_t rows, std::size_t cols) const {
    const std::size_t want = mb ? mb : std::max<std::size_t>(2 * k, 40);
    return std::min(want, std::min(rows, cols));
}

void SolverOptions::validate(std::size_t rows, std::size_t cols) const {
    const std::size_t lim = std::min(rows, cols);
    if (lim == 0) throw InvalidArgument("solver: empty matrix");
    if (k < 1 || k > lim) throw InvalidArgument("solver: k must lie in [1, min(m, n)]");
    if (mb != 0 && (mb < k || mb > lim)) throw InvalidArgument("solver: mb must lie in [k, min(m, n)]");
    if (mb != 0 && mb == k && k < lim) throw InvalidArgument("solver: mb must exceed k");
    if (!(delta > 0.0) || !std::isfinite(delta)) throw InvalidArgument("solver: delta must be positive");
}

bool TripletSet::all_converged() const {
    return std::all_of(converged.begin(), converged.end(), [](bool c) { return c; });
}

ConvergenceCheck check_convergence(const SvdResult& projected, double beta_k, double delta,
                                   std::size_t count, Which which, NormEstimate& norm) {
    ConvergenceCheck c;
    const std::size_t p = projected.sigmas.size();
    if (p == 0) return c;
    norm.observe(projected.sigmas.front());
    const double tol = delta * norm.value();
    const std::size_t last = projected.U.rows() - 1;
    count = std::min(count, p);
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t col = which == Which::Largest ? i : p - 1 - i;
        const double bound = beta_k * std::abs(projected.U(last, col));
        c.index.push_back(col);
        c.bounds.push_back(bound);
        c.converged.push_back(bound <= tol);
        c.count_converged += bound <= tol;
    }
    return c;
}

ConvergenceCheck check_harmonic_convergence(const SvdResult& augmented_svd, double residual_norm,
                                            double delta, std::size_t count, NormEstimate& norm) {
    ConvergenceCheck c;
    const std::size_t p = augmented_svd.sigmas.size();
    if (p == 0) return c;
    norm.observe(augmented_svd.sigmas.front());
    const double tol = delta * norm.value();
    const std::size_t last = augmented_svd.V.rows() - 1;
    count = std::min(count, p);
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t col = p - 1 - i;
        const double bound = residual_norm * std::abs(augmented_svd.V(last, col));
        c.index.push_back(col);
        c.bounds.push_back(bound);
        c.converged.push_back(bound <= tol);
        c.count_converged += bound <= tol;
    }
    return c;
}

void ritz_augment_cycle(const QuatMatrix& m, CycleState& state, std::size_t t, std::size_t mb) {
    const std::size_t k = state.steps();
    if (k == 0 || t >= k || mb > std::min(m.rows(), m.cols()) || mb < t + 1)
        throw InvalidArgument("ritz_augment_cycle: bad retained count");

    const SvdResult svd = dense_svd(state.B);
    CompactBasis p = combine(state.P, svd.V.block(0, 0, k, t));
    CompactBasis q = combine(state.Q, svd.U.block(0, 0, k, t));
    const NextDirection d = next_direction(state, p, state.rng);
    if (d.deflated) state.trace.events.push_back({state.cycle, k, TraceEventKind::Deflation});
    std::vector<double> rho(t);
    for (std::size_t j = 0; j < t; ++j) rho[j] = d.beta * svd.U(k - 1, j);

    CompactVector r = structured_matvec(m, d.p);
    ++state.matvecs;
    for (std::size_t j = 0; j < t; ++j) r.add_scaled(q[j], -rho[j]);
    const double raw = vec_norm(r);
    r = orthogonalize_against_basis(r, q);
    double alpha = vec_norm(r);
    const double scale = std::max({state.B.max_abs(), d.beta, raw});
    if (alpha > Tolerances::breakdown * scale) {
        r *= 1.0 / alpha;
    } else {
        r = random_orthogonal_unit(m.rows(), q, state.rng);
        alpha = 0.0;
        state.trace.events.push_back({state.cycle, t, TraceEventKind::RitzTerminated});
    }

    DenseMatrix b(t + 1, t + 1);
    for (std::size_t j = 0; j < t; ++j) {
        b(j, j) = svd.sigmas[j];
        b(j, t) = rho[j];
    }
    b(t, t) = alpha;

    p.push_back(d.p);
    q.push_back(std::move(r));
    CompactVector f = structured_matvec(m, q.back(), true);
    ++state.matvecs;
    f.add_scaled(p.back(), -alpha);

    state.f = orthogonalize_against_basis(f, p);
    state.P = std::move(p);
    state.Q = std::move(q);
    state.B = std::move(b);
    state.lead = t + 1;
    lanczos_extend(m, state, mb);
}

void harmonic_augment_cycle(const QuatMatrix& m, CycleState& state, std::size_t t, std::size_t mb) {
    const std::size_t k = state.steps();
    if (k == 0 || t >= k || mb > std::min(m.rows(), m.cols()) || mb < t + 1)
        throw InvalidArgument("harmonic_augment_cycle: bad retained count");
    if (k >= m.cols()) throw InvalidArgument("harmonic_augment_cycle: basis already spans the space");

    // Work on a copy of the generator so a rejected cycle leaves the state as is.
    Rng rng = state.rng;
    const NextDirection d = next_direction(state, state.P, rng);
    const SvdResult aug = dense_svd(augmented(state.B, d.beta));
    const double smax = aug.sigmas.front();
    for (std::size_t i = 0; i < k; ++i)
        if (!(std::abs(state.B(i, i)) > Tolerances::harmonic_guard * smax))
            throw SingularMatrixError("harmonic_augment_cycle: near-singular projected matrix");

    // Columns of C: B_k^{-1} u_j sigma_j for the t smallest triplets (ascending),
    // then the scaled residual direction [-beta_k B_k^{-1} e_k; 1].
    std::vector<std::size_t> cols(t);
    for (std::size_t j = 0; j < t; ++j) cols[j] = k - 1 - j;
    DenseMatrix c(k + 1, t + 1);
    DenseMatrix ut(k, t);
    for (std::size_t j = 0; j < t; ++j) {
        std::vector<double> rhs(k);
        for (std::size_t i = 0; i < k; ++i) {
            ut(i, j) = aug.U(i, cols[j]);
            rhs[i] = aug.U(i, cols[j]) * aug.sigmas[cols[j]];
        }
        const auto x = projected_solve(state.B, rhs);
        for (std::size_t i = 0; i < k; ++i) c(i, j) = x[i];
    }
    std::vector<double> ek(k, 0.0);
    ek[k - 1] = 1.0;
    const auto y = projected_solve(state.B, ek);
    for (std::size_t i = 0; i < k; ++i) c(i, t) = -d.beta * y[i];
    c(k, t) = 1.0;
    const QrResult qr = qr_factor(c);

    if (d.deflated) state.trace.events.push_back({state.cycle, k, TraceEventKind::Deflation});
    CompactBasis pext = state.P;
    pext.push_back(d.p);
    CompactBasis p = combine(pext, qr.Q);
    CompactBasis q = combine(state.Q, ut);

    CompactVector w = structured_matvec(m, d.p);
    ++state.matvecs;
    w.add_scaled(state.Q.back(), -d.beta);
    const double raw = vec_norm(w);
    std::vector<Quaternion> gamma;
    w = orthogonalize_against_basis(w, q, &gamma);
    double alpha = vec_norm(w);
    const double scale = std::max({state.B.max_abs(), d.beta, raw});
    if (alpha > Tolerances::breakdown * scale) {
        w *= 1.0 / alpha;
    } else {
        w = random_orthogonal_unit(m.rows(), q, rng);
        alpha = 0.0;
        state.trace.events.push_back({state.cycle, t, TraceEventKind::Deflation});
    }

    DenseMatrix dh(t + 1, t + 1);
    for (std::size_t j = 0; j < t; ++j) {
        dh(j, j) = aug.sigmas[cols[j]];
        dh(j, t) = gamma[j].w;
    }
    dh(t, t) = alpha;
    DenseMatrix b = tri_solve_upper(qr.R, dh);

    q.push_back(std::move(w));
    CompactVector f = structured_matvec(m, q.back(), true);
    ++state.matvecs;
    f.add_scaled(p.back(), -b(t, t));

    state.rng = rng;
    state.f = orthogonalize_against_basis(f, p);
    state.P = std::move(p);
    state.Q = std::move(q);
    state.B = std::move(b);
    state.lead = t + 1;
    lanczos_extend(m, state, mb);
}

std::size_t retained_pairs(std::size_t k, std::size_t mb) {
    if (mb < 2) return 0;
    const std::size_t buffer = mb > k + 1 ? std::min<std::size_t>(5, mb - k - 1) : 0;
    const std::size_t capped = mb > 3 ? std::min(k + buffer, mb - 3) : 0;
    return std::max(capped, std::min(k, mb - 1));
}

namespace {

TripletSet largest_triplets(const CycleState& s, const SvdResult& svd, const ConvergenceCheck& chk) {
    TripletSet out;
    for (std::size_t i = 0; i < chk.index.size(); ++i) {
        const std::size_t col = chk.index[i];
        out.sigmas.push_back(svd.sigmas[col]);
        out.U.push_back(combine(s.Q, svd.U.col(col)));
        out.V.push_back(combine(s.P, svd.V.col(col)));
        out.bounds.push_back(chk.bounds[i]);
        out.converged.push_back(chk.converged[i]);
    }
    return out;
}

TripletSet harmonic_triplets(const CycleState& s, const CompactVector& p_next, const SvdResult& aug,
                             const ConvergenceCheck& chk) {
    TripletSet out;
    CompactBasis pext = s.P;
    pext.push_back(p_next);
    for (std::size_t i = 0; i < chk.index.size(); ++i) {
        const std::size_t col = chk.index[i];
        out.sigmas.push_back(aug.sigmas[col]);
        out.U.push_back(combine(s.Q, aug.U.col(col)));
        CompactVector v = combine(pext, aug.V.col(col));
        v *= 1.0 / vec_norm(v);
        out.V.push_back(std::move(v));
        out.bounds.push_back(chk.bounds[i]);
        out.converged.push_back(chk.converged[i]);
    }
    return out;
}

SolveResult solve_tall(const QuatMatrix& m, const SolverOptions& opts) {
    const std::size_t mb = opts.effective_mb(m.rows(), m.cols());
    const std::size_t t = std::min(retained_pairs(opts.k, mb), mb - 1);

    Rng rng(opts.seed);
    const CompactVector p1 = CompactVector::random_unit(m.cols(), rng);
    CycleState s;
    s.f = p1;
    s.rng = rng;
    lanczos_extend(m, s, mb);

    NormEstimate norm;
    SolveResult res;
    for (;;) {
        ConvergenceCheck chk;
        TripletSet current;
        if (opts.which == Which::Largest) {
            const SvdResult svd = dense_svd(s.B);
            chk = check_convergence(svd, vec_norm(s.f), opts.delta, opts.k, Which::Largest, norm);
            current = largest_triplets(s, svd, chk);
        } else {
            Rng probe = s.rng;
            const NextDirection d = next_direction(s, s.P, probe);
            const SvdResult aug = dense_svd(augmented(s.B, d.beta));
            const double rn = harmonic_residual_norm(m, s, d);
            ++s.matvecs;
            chk = check_harmonic_convergence(aug, rn, opts.delta, opts.k, norm);
            current = harmonic_triplets(s, d.p, aug, chk);
        }
        s.trace.cycles.push_back({s.cycle, chk.bounds, s.matvecs});

        if (chk.all() || s.cycle >= opts.maxit) {
            res.triplets = std::move(current);
            break;
        }

        if (opts.which == Which::Largest) {
            ritz_augment_cycle(m, s, t, mb);
        } else {
            try {
                harmonic_augment_cycle(m, s, t, mb);
            } catch (const SingularMatrixError&) {
                // Restart the bidiagonalization from a perturbed copy of the
                // current best approximation.
                CompactVector p = current.V.front();
                p.add_scaled(CompactVector::random_unit(m.cols(), s.rng), 1e-3);
                p *= 1.0 / vec_norm(p);
                s.trace.events.push_back({s.cycle, s.steps(), TraceEventKind::GuardRestart});
                s.P.clear();
                s.Q.clear();
                s.B = DenseMatrix();
                s.f = std::move(p);
                s.lead = 0;
                lanczos_extend(m, s, mb);
            }
        }
        ++s.cycle;
    }

    res.trace = std::move(s.trace);
    res.cycles = s.cycle;
    res.matvecs = s.matvecs;
    res.norm_estimate = norm.value();
    res.converged = res.triplets.all_converged();
    return res;
}

// A zero column (or, for square input, a zero row) forces sigma_min = 0.
bool structurally_singular(const QuatMatrix& m) {
    std::vector<bool> row_used(m.rows(), false), col_used(m.cols(), false);
    for (int c = 0; c < 4; ++c) {
        const auto b = m.block(c);
        for (std::size_t i = 0; i < m.rows(); ++i)
            for (std::size_t j = 0; j < m.cols(); ++j)
                if (b[i * m.cols() + j] != 0.0) row_used[i] = col_used[j] = true;
    }
    const auto all = [](const std::vector<bool>& v) { return std::all_of(v.begin(), v.end(), [](bool x) { return x; }); };
    if (m.rows() >= m.cols()) return !all(col_used) || (m.rows() == m.cols() && !all(row_used));
    return !all(row_used);
}

}  // namespace

SolveResult solve_partial_svd(const QuatMatrix& m, const SolverOptions& opts) {
    opts.validate(m.rows(), m.cols());
    if (opts.which == Which::Smallest && structurally_singular(m))
        throw SingularMatrixError("solve_partial_svd: matrix is structurally singular");
    if (m.rows() >= m.cols()) return solve_tall(m, opts);
    // Wide input: solve for M^* and swap the singular vectors.
    SolveResult r = solve_tall(m.adjoint(), opts);
    std::swap(r.triplets.U, r.triplets.V);
    return r;
}

double verify_residual(const QuatMatrix& m, const TripletSet& t) {
    double s = 0.0;
    for (std::size_t j = 0; j < t.size(); ++j) s += std::pow(right_residual(m, t, j), 2);
    return std::sqrt(s);
}

double left_residual(const QuatMatrix& m, const TripletSet& t, std::size_t j) {
    CompactVector r = structured_matvec(m, t.U.at(j), true);
    r.add_scaled(t.V.at(j), -t.sigmas.at(j));
    return vec_norm(r);
}

double right_residual(const QuatMatrix& m, const TripletSet& t, std::size_t j) {
    CompactVector r = structured_matvec(m, t.V.at(j));
    r.add_scaled(t.U.at(j), -t.sigmas.at(j));
    return vec_norm(r);
}

}  // namespace qsvd
