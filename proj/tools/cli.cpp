#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "qsvd/qsvd.hpp"

namespace qsvd::cli {

namespace {

namespace fs = std::filesystem;

struct SolverFlags {
    std::size_t k = 10;
    std::string which = "largest";
    std::size_t mb = 0;
    std::size_t maxit = 2000;
    double delta = 1e-10;
    std::uint64_t seed = 1;

    void attach(CLI::App& app) {
        app.add_option("--k", k, "Number of singular triplets")->capture_default_str();
        app.add_option("--which", which, "largest or smallest")
            ->check(CLI::IsMember({"largest", "smallest"}))
            ->capture_default_str();
        app.add_option("--mb", mb, "Projected size (default max(2k, 40))");
        app.add_option("--maxit", maxit, "Maximum number of restarts")->capture_default_str();
        app.add_option("--delta", delta, "Convergence tolerance")->capture_default_str();
        app.add_option("--seed", seed, "Start-vector seed (QSVD_SEED overrides)")->capture_default_str();
    }

    SolverOptions options() const {
        SolverOptions o;
        o.k = k;
        o.which = which == "smallest" ? Which::Smallest : Which::Largest;
        o.mb = mb;
        o.maxit = maxit;
        o.delta = delta;
        o.seed = seed;
        if (const char* env = std::getenv("QSVD_SEED"); env && *env) {
            char* end = nullptr;
            const unsigned long long v = std::strtoull(env, &end, 10);
            if (*end != '\0') throw InvalidArgument("QSVD_SEED must be a non-negative integer");
            o.seed = v;
        }
        return o;
    }
};

QuatMatrix load_matrix(const std::vector<std::string>& inputs, std::size_t n) {
    if (inputs.size() == 1 && fs::path(inputs[0]).extension() == ".qmx") return read_qmx(inputs[0]);
    if (inputs.size() == 4) {
        std::array<SparseBlock, 4> b;
        for (int c = 0; c < 4; ++c) b[c] = read_matrix_market(inputs[c]);
        if (n == 0) {
            n = b[0].rows;
            for (const auto& blk : b) n = std::min({n, blk.rows, blk.cols});
        }
        return assemble_jrs_blocks(b[0], b[1], b[2], b[3], n);
    }
    throw InvalidArgument("--input takes one .qmx file or four Matrix Market files");
}

std::string fmt(double v) { return format_double(v); }

void print_solve(std::ostream& out, const SolveResult& r) {
    out << "cycles " << r.cycles << " matvecs " << r.matvecs << " converged " << (r.converged ? "yes" : "no")
        << "\n";
    for (std::size_t j = 0; j < r.triplets.size(); ++j)
        out << "sigma[" << j + 1 << "] = " << fmt(r.triplets.sigmas[j]) << "  bound " << fmt(r.triplets.bounds[j])
            << (r.triplets.converged[j] ? "" : "  (not converged)") << "\n";
}

int run_svd(const SolverFlags& flags, const std::vector<std::string>& inputs, std::size_t n,
            const std::string& out_path, const std::string& trace_path, std::ostream& out) {
    const QuatMatrix m = load_matrix(inputs, n);
    const SolveResult r = solve_partial_svd(m, flags.options());
    write_triplets(r.triplets, out_path);
    if (!trace_path.empty()) write_trace(r.trace, trace_path);
    print_solve(out, r);
    out << "residual " << fmt(verify_residual(m, r.triplets)) << "\n";
    return r.converged ? exit_ok : exit_not_converged;
}

double relative_difference(const QuatMatrix& a, const QuatMatrix& b) {
    double diff = 0.0;
    for (int c = 0; c < 4; ++c) {
        const auto x = a.block(c), y = b.block(c);
        for (std::size_t i = 0; i < x.size(); ++i) diff += (x[i] - y[i]) * (x[i] - y[i]);
    }
    const double na = a.frobenius_norm();
    return na > 0.0 ? std::sqrt(diff) / na : 0.0;
}

// Rank-k reconstruction of `a`; also returns the solve for rel2 and exit status.
struct Reconstruction {
    QuatMatrix ak;
    double rel2 = 0.0;
    double relF = 0.0;
    bool converged = true;
};

Reconstruction reconstruct(const QuatMatrix& a, SolverFlags flags, std::ostream& out) {
    const std::size_t full = std::min(a.rows(), a.cols());
    if (flags.k < 1 || flags.k > full) throw InvalidArgument("--k must lie in [1, min(m, n)]");
    const std::size_t keep = flags.k;
    SolverFlags solve = flags;
    solve.which = "largest";
    solve.k = std::min(keep + 1, full);
    const SolveResult r = solve_partial_svd(a, solve.options());
    print_solve(out, r);

    Reconstruction rec;
    rec.ak = low_rank_approx(r.triplets, keep);
    rec.relF = relative_difference(a, rec.ak);
    if (keep < r.triplets.size() && r.triplets.sigmas.front() > 0.0)
        rec.rel2 = r.triplets.sigmas[keep] / r.triplets.sigmas.front();
    rec.converged = r.converged;
    return rec;
}

int run_approx(const SolverFlags& flags, const std::string& image_path, const std::string& out_path,
               const std::string& report_path, std::ostream& out) {
    const RgbImage img = read_image_ppm(image_path);
    const Reconstruction rec = reconstruct(image_to_quat(img), flags, out);
    const std::string encoded = encode_image_ppm(quat_to_image(rec.ak));
    if (!out_path.empty()) {
        std::ofstream f(out_path, std::ios::binary);
        if (!f) throw IoError("cannot write " + out_path);
        f << encoded;
    }
    // metrics refer to the quantized image exactly as written
    const RgbImage written = parse_image_ppm(encoded);
    ApproxReport rep;
    rep.psnr = psnr(img, written);
    rep.ssim = ssim(img, written);
    rep.ssim_printed = ssim(img, written, SsimNumerator::AsPrinted);
    rep.rel2 = rec.rel2;
    rep.relF = rec.relF;
    out << "psnr " << fmt(rep.psnr) << " ssim " << fmt(rep.ssim) << " rel2 " << fmt(rep.rel2) << " relF "
        << fmt(rep.relF) << "\n";
    if (!report_path.empty()) {
        std::ofstream f(report_path, std::ios::binary);
        if (!f) throw IoError("cannot write " + report_path);
        f << "k,psnr,ssim,ssim_printed,rel2,relF\n"
          << flags.k << "," << fmt(rep.psnr) << "," << fmt(rep.ssim) << "," << fmt(rep.ssim_printed) << ","
          << fmt(rep.rel2) << "," << fmt(rep.relF) << "\n";
    }
    return rec.converged ? exit_ok : exit_not_converged;
}

std::vector<std::string> frame_files(const std::vector<std::string>& frames, const std::string& dir) {
    std::vector<std::string> files = frames;
    if (!dir.empty()) {
        for (const auto& entry : fs::directory_iterator(dir))
            if (entry.is_regular_file() && entry.path().extension() == ".ppm") files.push_back(entry.path().string());
        std::sort(files.begin(), files.end());
    }
    if (files.empty()) throw InvalidArgument("video: no frames given");
    return files;
}

int run_video(const SolverFlags& flags, const std::vector<std::string>& files, const std::string& out_dir,
              const std::string& report_path, std::ostream& out) {
    std::vector<RgbImage> frames;
    for (const auto& f : files) frames.push_back(read_image_ppm(f));
    const Reconstruction rec = reconstruct(stack_frames(frames), flags, out);
    const auto recon = unstack_frames(rec.ak, frames.size());

    std::ostringstream report;
    report << "frame,psnr,ssim,ssim_printed\n";
    for (std::size_t f = 0; f < frames.size(); ++f) {
        const std::string encoded = encode_image_ppm(recon[f]);
        if (!out_dir.empty()) {
            char name[32];
            std::snprintf(name, sizeof name, "frame_%04zu.ppm", f);
            std::ofstream o(fs::path(out_dir) / name, std::ios::binary);
            if (!o) throw IoError("cannot write into " + out_dir);
            o << encoded;
        }
        const RgbImage written = parse_image_ppm(encoded);
        report << f << "," << fmt(psnr(frames[f], written)) << "," << fmt(ssim(frames[f], written)) << ","
               << fmt(ssim(frames[f], written, SsimNumerator::AsPrinted)) << "\n";
    }
    out << report.str() << "rel2 " << fmt(rec.rel2) << " relF " << fmt(rec.relF) << "\n";
    if (!report_path.empty()) {
        std::ofstream o(report_path, std::ios::binary);
        if (!o) throw IoError("cannot write " + report_path);
        o << report.str();
    }
    return rec.converged ? exit_ok : exit_not_converged;
}

int run_gen(const std::string& kind, std::size_t m, std::size_t n, std::uint64_t seed,
            const std::vector<std::string>& outs, std::ostream& out) {
    if (kind == "dense") {
        if (outs.size() != 1) throw InvalidArgument("gen dense: one --out .qmx path");
        write_qmx(random_dense_quat(m, n, seed), outs[0]);
    } else if (kind == "sparse") {
        if (m != n) throw InvalidArgument("gen sparse: matrix must be square (--m = --n)");
        if (outs.size() == 1) {
            write_qmx(synthetic_sparse_quat(n, seed).to_dense(), outs[0]);
        } else if (outs.size() == 4) {
            const auto blocks = synthetic_sparse_blocks(n, seed);
            for (int c = 0; c < 4; ++c) write_matrix_market(blocks[c], outs[c]);
        } else {
            throw InvalidArgument("gen sparse: --out takes one .qmx or four .mtx paths");
        }
    } else if (kind == "image") {
        if (outs.size() != 1) throw InvalidArgument("gen image: one --out .ppm path");
        write_image_ppm(synthetic_image(n, m, seed), outs[0]);
    } else {
        throw InvalidArgument("gen: unknown kind " + kind);
    }
    out << "wrote " << kind << "\n";
    return exit_ok;
}

int run_verify(const std::vector<std::string>& inputs, std::size_t n, std::size_t steps, std::uint64_t seed,
               std::ostream& out) {
    const QuatMatrix m = load_matrix(inputs, n);
    bool ok = true;
    auto report = [&](const std::string& name, double value, double limit) {
        const bool pass = value <= limit;
        ok = ok && pass;
        out << (pass ? "PASS " : "FAIL ") << name << " " << fmt(value) << " (limit " << fmt(limit) << ")\n";
    };

    if (16 * m.rows() * m.cols() <= 4'000'000) {
        const DenseMatrix e = expand_real_counterpart(m);
        out << (is_jrs_symmetric(e) ? "PASS" : "FAIL") << " jrs_structure\n";
        ok = ok && is_jrs_symmetric(e);
        Rng rng(seed);
        const CompactVector x = CompactVector::random_unit(m.cols(), rng);
        const DenseMatrix xe = expand_vector(x);
        const DenseMatrix ye = e * xe;
        const DenseMatrix yc = expand_vector(structured_matvec(m, x));
        report("matvec_vs_expansion", (ye - yc).frobenius_norm() / std::max(ye.frobenius_norm(), 1e-300), 1e-13);
    }

    const std::size_t k = std::min(steps, std::min(m.rows(), m.cols()));
    Rng rng(seed);
    const CompactVector p1 = CompactVector::random_unit(m.cols(), rng);
    const BidiagFactorization f = lanczos_bidiag(m, p1, k, rng);
    const DenseMatrix b = f.bidiagonal();
    const double s1 = dense_svd(b).sigmas.front();
    const auto res = factorization_residuals(m, f.P, f.Q, b, f.residual);
    report("p_orthogonality", res.p_orthogonality, 1e-12);
    report("q_orthogonality", res.q_orthogonality, 1e-12);
    report("right_relation", res.right, 1e-12 * s1);
    report("left_relation", res.left, 1e-12 * s1);
    report("residual_vs_p", res.residual_vs_p, 1e-12);
    return ok ? exit_ok : exit_not_converged;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Quaternion partial SVD via multi-symplectic Lanczos bidiagonalization", "qsvd"};
    app.require_subcommand(1);

    SolverFlags svd_flags, approx_flags, video_flags;
    std::vector<std::string> inputs;
    std::size_t n_principal = 0;
    std::string out_path, trace_path, image_path, report_path, frame_dir, out_dir;
    std::vector<std::string> frames, gen_outs;

    auto* svd = app.add_subcommand("svd", "Partial SVD of a quaternion matrix");
    svd_flags.attach(*svd);
    svd->add_option("--input", inputs, "One .qmx file or four .mtx component blocks")->required()->expected(1, 4);
    svd->add_option("--n", n_principal, "Principal submatrix order for .mtx input");
    svd->add_option("--out", out_path, "Triplet CSV")->required();
    svd->add_option("--trace", trace_path, "Convergence trace CSV");

    auto* approx = app.add_subcommand("approx", "Rank-k color image approximation");
    approx_flags.attach(*approx);
    approx->add_option("--image", image_path, "Input PPM")->required();
    approx->add_option("--out", out_path, "Reconstructed PPM");
    approx->add_option("--report", report_path, "Report CSV");

    auto* video = app.add_subcommand("video", "Rank-k approximation of stacked frames");
    video_flags.attach(*video);
    video->add_option("--frames", frames, "Frame PPM files, in order");
    video->add_option("--frame-dir", frame_dir, "Directory of .ppm frames (name order)");
    video->add_option("--out-dir", out_dir, "Directory for reconstructed frames");
    video->add_option("--report", report_path, "Per-frame report CSV");

    std::string kind = "dense";
    std::size_t gen_m = 100, gen_n = 80;
    std::uint64_t gen_seed = 1;
    auto* gen = app.add_subcommand("gen", "Generate synthetic inputs");
    gen->add_option("--kind", kind, "dense, sparse or image")
        ->check(CLI::IsMember({"dense", "sparse", "image"}))
        ->capture_default_str();
    gen->add_option("--m", gen_m, "Rows (image height)")->capture_default_str();
    gen->add_option("--n", gen_n, "Columns (image width)")->capture_default_str();
    gen->add_option("--seed", gen_seed, "Generator seed")->capture_default_str();
    gen->add_option("--out", gen_outs, "Output path(s)")->required()->expected(1, 4);

    std::size_t verify_steps = 20;
    std::uint64_t verify_seed = 1;
    auto* verify = app.add_subcommand("verify", "Check structure and factorization invariants on an input");
    verify->add_option("--input", inputs, "One .qmx file or four .mtx component blocks")->required()->expected(1, 4);
    verify->add_option("--n", n_principal, "Principal submatrix order for .mtx input");
    verify->add_option("--steps", verify_steps, "Lanczos steps")->capture_default_str();
    verify->add_option("--seed", verify_seed, "Start-vector seed")->capture_default_str();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_error;
    }

    try {
        if (svd->parsed()) return run_svd(svd_flags, inputs, n_principal, out_path, trace_path, out);
        if (approx->parsed()) return run_approx(approx_flags, image_path, out_path, report_path, out);
        if (video->parsed()) return run_video(video_flags, frame_files(frames, frame_dir), out_dir, report_path, out);
        if (gen->parsed()) return run_gen(kind, gen_m, gen_n, gen_seed, gen_outs, out);
        if (verify->parsed()) return run_verify(inputs, n_principal, verify_steps, verify_seed, out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_error;
    }
    return exit_error;
}

}  // namespace qsvd::cli
