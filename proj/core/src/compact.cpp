#include "qsvd/compact.hpp"

#include <algorithm>
#include <cmath>

#include "qsvd/error.hpp"

namespace qsvd {

CompactVector::CompactVector(std::span<const Quaternion> values) : CompactVector(values.size()) {
    for (std::size_t i = 0; i < values.size(); ++i) set(i, values[i]);
}

Quaternion CompactVector::at(std::size_t i) const {
    return {component(0)[i], component(1)[i], component(2)[i], component(3)[i]};
}

void CompactVector::set(std::size_t i, const Quaternion& q) {
    component(0)[i] = q.w;
    component(1)[i] = q.x;
    component(2)[i] = q.y;
    component(3)[i] = q.z;
}

CompactVector& CompactVector::operator*=(double s) {
    for (double& v : data_) v *= s;
    return *this;
}

CompactVector& CompactVector::operator+=(const CompactVector& o) {
    if (o.n_ != n_) throw DimensionError("CompactVector: length mismatch");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
}

CompactVector& CompactVector::operator-=(const CompactVector& o) {
    if (o.n_ != n_) throw DimensionError("CompactVector: length mismatch");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
}

void CompactVector::add_scaled(const CompactVector& x, double a) {
    if (x.n_ != n_) throw DimensionError("CompactVector: length mismatch");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += a * x.data_[i];
}

void CompactVector::add_scaled(const CompactVector& x, const Quaternion& q) {
    if (x.n_ != n_) throw DimensionError("CompactVector: length mismatch");
    const auto x0 = x.component(0), x1 = x.component(1), x2 = x.component(2), x3 = x.component(3);
    auto y0 = component(0), y1 = component(1), y2 = component(2), y3 = component(3);
    // y_i += x_i * q
    for (std::size_t i = 0; i < n_; ++i) {
        y0[i] += x0[i] * q.w - x1[i] * q.x - x2[i] * q.y - x3[i] * q.z;
        y1[i] += x0[i] * q.x + x1[i] * q.w + x2[i] * q.z - x3[i] * q.y;
        y2[i] += x0[i] * q.y - x1[i] * q.z + x2[i] * q.w + x3[i] * q.x;
        y3[i] += x0[i] * q.z + x1[i] * q.y - x2[i] * q.x + x3[i] * q.w;
    }
}

CompactVector CompactVector::random_unit(std::size_t n, Rng& rng) {
    CompactVector v(n);
    for (double& x : v.data_) x = rng.normal();
    const double nrm = vec_norm(v);
    if (nrm > 0.0) v *= 1.0 / nrm;
    return v;
}

double vec_norm(const CompactVector& x) {
    // scaled accumulation guards against overflow for huge entries
    double scale = 0.0;
    for (double v : x.raw()) scale = std::max(scale, std::abs(v));
    if (scale == 0.0 || !std::isfinite(scale)) return scale;
    double s = 0.0;
    for (double v : x.raw()) {
        const double t = v / scale;
        s += t * t;
    }
    return scale * std::sqrt(s);
}

Quaternion quat_dot(const CompactVector& a, const CompactVector& b) {
    if (a.size() != b.size()) throw DimensionError("quat_dot: length mismatch");
    const auto a0 = a.component(0), a1 = a.component(1), a2 = a.component(2), a3 = a.component(3);
    const auto b0 = b.component(0), b1 = b.component(1), b2 = b.component(2), b3 = b.component(3);
    Quaternion s;
    // sum_i conj(a_i) b_i
    for (std::size_t i = 0; i < a.size(); ++i) {
        s.w += a0[i] * b0[i] + a1[i] * b1[i] + a2[i] * b2[i] + a3[i] * b3[i];
        s.x += a0[i] * b1[i] - a1[i] * b0[i] - a2[i] * b3[i] + a3[i] * b2[i];
        s.y += a0[i] * b2[i] + a1[i] * b3[i] - a2[i] * b0[i] - a3[i] * b1[i];
        s.z += a0[i] * b3[i] - a1[i] * b2[i] + a2[i] * b1[i] - a3[i] * b0[i];
    }
    return s;
}

CompactVector structured_matvec(const QuatMatrix& m, const CompactVector& x, bool adjoint) {
    const std::size_t in = adjoint ? m.rows() : m.cols();
    const std::size_t out = adjoint ? m.cols() : m.rows();
    if (x.size() != in) throw DimensionError("structured_matvec: dimension mismatch");
    CompactVector y(out);
    m.apply({x.component(0), x.component(1), x.component(2), x.component(3)},
            {y.component(0), y.component(1), y.component(2), y.component(3)}, adjoint);
    return y;
}

CompactVector orthogonalize_against_basis(const CompactVector& r, const CompactBasis& basis,
                                          std::vector<Quaternion>* coeffs) {
    CompactVector out = r;
    if (coeffs) coeffs->assign(basis.size(), Quaternion{});
    std::vector<Quaternion> h(basis.size());
    for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t i = 0; i < basis.size(); ++i) h[i] = quat_dot(basis[i], out);
        for (std::size_t i = 0; i < basis.size(); ++i) out.add_scaled(basis[i], -h[i]);
        if (coeffs)
            for (std::size_t i = 0; i < basis.size(); ++i) (*coeffs)[i] += h[i];
    }
    return out;
}

CompactVector random_orthogonal_unit(std::size_t n, const CompactBasis& basis, Rng& rng) {
    for (int attempt = 0; attempt < 8; ++attempt) {
        CompactVector v = orthogonalize_against_basis(CompactVector::random_unit(n, rng), basis);
        const double nrm = vec_norm(v);
        if (nrm > 1e-8) {
            v *= 1.0 / nrm;
            return v;
        }
    }
    throw DimensionError("random_orthogonal_unit: basis already spans the space");
}

CompactVector combine(const CompactBasis& basis, std::span<const double> coeffs) {
    if (basis.empty() || basis.size() != coeffs.size()) throw DimensionError("combine: size mismatch");
    CompactVector out(basis.front().size());
    for (std::size_t j = 0; j < basis.size(); ++j) out.add_scaled(basis[j], coeffs[j]);
    return out;
}

CompactBasis combine(const CompactBasis& basis, const DenseMatrix& w) {
    if (basis.size() != w.rows()) throw DimensionError("combine: size mismatch");
    CompactBasis out;
    out.reserve(w.cols());
    for (std::size_t c = 0; c < w.cols(); ++c) out.push_back(combine(basis, w.col(c)));
    return out;
}

DenseMatrix expand_quaternion(const Quaternion& q) {
    QuatMatrix m(1, 1);
    m.set(0, 0, q);
    return expand_real_counterpart(m);
}

DenseMatrix expand_vector(const CompactVector& x) {
    QuatMatrix m(x.size(), 1);
    for (std::size_t i = 0; i < x.size(); ++i) m.set(i, 0, x.at(i));
    return expand_real_counterpart(m);
}

double orthogonality_error(const CompactBasis& basis) {
    double err = 0.0;
    for (std::size_t i = 0; i < basis.size(); ++i)
        for (std::size_t j = i; j < basis.size(); ++j) {
            Quaternion g = quat_dot(basis[i], basis[j]);
            if (i == j) g.w -= 1.0;
            err = std::max(err, g.norm());
        }
    return err;
}

}  // namespace qsvd
