#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "qsvd/quat_matrix.hpp"
#include "qsvd/restart.hpp"

namespace qsvd {

/// Color image with real channels (nominally in [0, 255]), row-major.
struct RgbImage {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<double> r, g, b;

    RgbImage() = default;
    RgbImage(std::size_t w, std::size_t h)
        : width(w), height(h), r(w * h, 0.0), g(w * h, 0.0), b(w * h, 0.0) {}

    std::size_t pixels() const noexcept { return width * height; }
    friend bool operator==(const RgbImage&, const RgbImage&) = default;
};

/// Pure quaternion matrix R i + G j + B k (height x width).
QuatMatrix image_to_quat(const RgbImage& img);

/// Channels from the i, j, k components, clamped to [0, 255]; the real part is dropped.
RgbImage quat_to_image(const QuatMatrix& m);

/// A_k = U_k diag(sigma_1..sigma_k) V_k^* from the first k triplets.
QuatMatrix low_rank_approx(const TripletSet& t, std::size_t k);

/// Returned by psnr() for identical images.
inline constexpr double psnr_identical = std::numeric_limits<double>::infinity();

/// 10 log10(255^2 m n / ||Fk - F||_F^2), norm over all three channels.
double psnr(const RgbImage& f, const RgbImage& fk);

/// Which mean term the SSIM numerator uses.
enum class SsimNumerator {
    Standard,   ///< 2 mu_x mu_y
    AsPrinted,  ///< 4 mu_x mu_y
};

/// Global single-window SSIM on the channel-concatenated vectors with
/// c1 = (0.01*255)^2, c2 = (0.03*255)^2.
double ssim(const RgbImage& f, const RgbImage& fk,
            SsimNumerator numerator = SsimNumerator::Standard);

struct RelativeDistances {
    double rel2 = 0.0;
    double relF = 0.0;
};

/// rel2 = sigma_{k+1} / ||A||_2, relF = sqrt(sum_{j>k} sigma_j^2) / ||A||_F.
/// `sigmas_full` is the full descending spectrum; sigma_{k+1} is 0 when k equals
/// its length.
RelativeDistances relative_distances(std::span<const double> sigmas_full, std::size_t k,
                                     double norm_a2, double norm_af);

struct ApproxReport {
    double psnr = 0.0;
    double ssim = 0.0;
    double ssim_printed = 0.0;
    double rel2 = 0.0;
    double relF = 0.0;
};

/// Stack frames vertically: frame f occupies rows [f*h, (f+1)*h).
QuatMatrix stack_frames(std::span<const RgbImage> frames);
/// Inverse of stack_frames for `count` frames of equal height.
std::vector<RgbImage> unstack_frames(const QuatMatrix& m, std::size_t count);

/// Columns vec(F_s) - vec(mean), vec stacking columns.
QuatMatrix mean_center_samples(std::span<const QuatMatrix> samples);

}  // namespace qsvd
