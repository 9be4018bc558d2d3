#include "qsvd/lowrank.hpp"

#include <algorithm>
#include <cmath>

#include "qsvd/error.hpp"

namespace qsvd {

namespace {

void require_same_size(const RgbImage& a, const RgbImage& b, const char* what) {
    if (a.width != b.width || a.height != b.height) throw DimensionError(std::string(what) + ": image sizes differ");
}

double clamp_channel(double v) { return std::clamp(v, 0.0, 255.0); }

}  // namespace

QuatMatrix image_to_quat(const RgbImage& img) {
    const std::size_t n = img.pixels();
    return QuatMatrix::from_blocks(img.height, img.width,
                                   {std::vector<double>(n, 0.0), img.r, img.g, img.b});
}

RgbImage quat_to_image(const QuatMatrix& m) {
    RgbImage img(m.cols(), m.rows());
    const auto r = m.block(1), g = m.block(2), b = m.block(3);
    for (std::size_t i = 0; i < img.pixels(); ++i) {
        img.r[i] = clamp_channel(r[i]);
        img.g[i] = clamp_channel(g[i]);
        img.b[i] = clamp_channel(b[i]);
    }
    return img;
}

QuatMatrix low_rank_approx(const TripletSet& t, std::size_t k) {
    if (k > t.size()) throw InvalidArgument("low_rank_approx: k exceeds the number of triplets");
    if (t.size() == 0) throw InvalidArgument("low_rank_approx: empty triplet set");
    const std::size_t m = t.U.front().size();
    const std::size_t n = t.V.front().size();
    std::array<std::vector<double>, 4> blocks;
    for (auto& b : blocks) b.assign(m * n, 0.0);
    for (std::size_t j = 0; j < k; ++j) {
        std::vector<Quaternion> vc(n);
        for (std::size_t l = 0; l < n; ++l) vc[l] = t.V[j].at(l).conj();
        for (std::size_t i = 0; i < m; ++i) {
            const Quaternion us = t.U[j].at(i) * t.sigmas[j];
            for (std::size_t l = 0; l < n; ++l) {
                const Quaternion p = us * vc[l];
                for (int c = 0; c < 4; ++c) blocks[c][i * n + l] += p[c];
            }
        }
    }
    return QuatMatrix::from_blocks(m, n, std::move(blocks));
}

double psnr(const RgbImage& f, const RgbImage& fk) {
    require_same_size(f, fk, "psnr");
    double err = 0.0;
    for (std::size_t i = 0; i < f.pixels(); ++i) {
        const double dr = fk.r[i] - f.r[i], dg = fk.g[i] - f.g[i], db = fk.b[i] - f.b[i];
        err += dr * dr + dg * dg + db * db;
    }
    if (err == 0.0) return psnr_identical;
    return 10.0 * std::log10(255.0 * 255.0 * static_cast<double>(f.pixels()) / err);
}

double ssim(const RgbImage& f, const RgbImage& fk, SsimNumerator numerator) {
    require_same_size(f, fk, "ssim");
    const std::size_t n = f.pixels();
    if (n == 0) throw DimensionError("ssim: empty images");
    const std::array<const std::vector<double>*, 3> xs{&f.r, &f.g, &f.b};
    const std::array<const std::vector<double>*, 3> ys{&fk.r, &fk.g, &fk.b};
    const double count = 3.0 * static_cast<double>(n);

    double mx = 0.0, my = 0.0;
    for (int c = 0; c < 3; ++c)
        for (std::size_t i = 0; i < n; ++i) {
            mx += (*xs[c])[i];
            my += (*ys[c])[i];
        }
    mx /= count;
    my /= count;
    double vx = 0.0, vy = 0.0, cxy = 0.0;
    for (int c = 0; c < 3; ++c)
        for (std::size_t i = 0; i < n; ++i) {
            const double dx = (*xs[c])[i] - mx, dy = (*ys[c])[i] - my;
            vx += dx * dx;
            vy += dy * dy;
            cxy += dx * dy;
        }
    vx /= count;
    vy /= count;
    cxy /= count;

    const double c1 = std::pow(0.01 * 255.0, 2);
    const double c2 = std::pow(0.03 * 255.0, 2);
    const double mean_term = (numerator == SsimNumerator::Standard ? 2.0 : 4.0) * mx * my;
    return (mean_term + c1) * (2.0 * cxy + c2) / ((mx * mx + my * my + c1) * (vx + vy + c2));
}

RelativeDistances relative_distances(std::span<const double> sigmas_full, std::size_t k,
                                     double norm_a2, double norm_af) {
    if (k > sigmas_full.size()) throw InvalidArgument("relative_distances: k exceeds the spectrum length");
    double tail = 0.0;
    for (std::size_t j = k; j < sigmas_full.size(); ++j) tail += sigmas_full[j] * sigmas_full[j];
    const double next = k < sigmas_full.size() ? sigmas_full[k] : 0.0;
    RelativeDistances d;
    d.rel2 = norm_a2 > 0.0 ? next / norm_a2 : 0.0;
    d.relF = norm_af > 0.0 ? std::sqrt(tail) / norm_af : 0.0;
    return d;
}

QuatMatrix stack_frames(std::span<const RgbImage> frames) {
    if (frames.empty()) throw InvalidArgument("stack_frames: no frames");
    const std::size_t w = frames.front().width, h = frames.front().height;
    std::array<std::vector<double>, 4> blocks;
    blocks[0].assign(frames.size() * w * h, 0.0);
    for (const RgbImage& fr : frames) {
        if (fr.width != w || fr.height != h) throw DimensionError("stack_frames: frame sizes differ");
        blocks[1].insert(blocks[1].end(), fr.r.begin(), fr.r.end());
        blocks[2].insert(blocks[2].end(), fr.g.begin(), fr.g.end());
        blocks[3].insert(blocks[3].end(), fr.b.begin(), fr.b.end());
    }
    return QuatMatrix::from_blocks(frames.size() * h, w, std::move(blocks));
}

std::vector<RgbImage> unstack_frames(const QuatMatrix& m, std::size_t count) {
    if (count == 0 || m.rows() % count != 0) throw DimensionError("unstack_frames: rows not divisible by count");
    const std::size_t h = m.rows() / count, w = m.cols();
    const auto r = m.block(1), g = m.block(2), b = m.block(3);
    std::vector<RgbImage> out;
    for (std::size_t f = 0; f < count; ++f) {
        RgbImage img(w, h);
        const std::size_t off = f * h * w;
        for (std::size_t i = 0; i < h * w; ++i) {
            img.r[i] = clamp_channel(r[off + i]);
            img.g[i] = clamp_channel(g[off + i]);
            img.b[i] = clamp_channel(b[off + i]);
        }
        out.push_back(std::move(img));
    }
    return out;
}

QuatMatrix mean_center_samples(std::span<const QuatMatrix> samples) {
    if (samples.empty()) throw InvalidArgument("mean_center_samples: no samples");
    const std::size_t p = samples.front().rows(), q = samples.front().cols();
    const std::size_t len = p * q, l = samples.size();
    std::array<std::vector<double>, 4> blocks;
    for (auto& b : blocks) b.assign(len * l, 0.0);
    for (int c = 0; c < 4; ++c) {
        std::vector<double> mean(len, 0.0);
        std::vector<std::vector<double>> comps;
        for (const QuatMatrix& s : samples) {
            if (s.rows() != p || s.cols() != q) throw DimensionError("mean_center_samples: sample sizes differ");
            comps.push_back(s.block(c));
        }
        // vec() stacks columns: entry (row, col) lands at col * p + row
        for (const auto& comp : comps)
            for (std::size_t row = 0; row < p; ++row)
                for (std::size_t col = 0; col < q; ++col) mean[col * p + row] += comp[row * q + col];
        for (double& v : mean) v /= static_cast<double>(l);
        for (std::size_t s = 0; s < l; ++s)
            for (std::size_t row = 0; row < p; ++row)
                for (std::size_t col = 0; col < q; ++col) {
                    const std::size_t idx = col * p + row;
                    blocks[c][idx * l + s] = comps[s][row * q + col] - mean[idx];
                }
    }
    return QuatMatrix::from_blocks(len, l, std::move(blocks));
}

}  // namespace qsvd
