#include "photofx/vision.hpp"

#include "photofx/error.hpp"
#include "photofx/rng.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <random>

namespace photofx {

int hamming(const Descriptor& a, const Descriptor& b) noexcept {
    int d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) d += std::popcount(a[i] ^ b[i]);
    return d;
}

namespace {

// Bresenham circle of radius 3, clockwise from 12 o'clock.
constexpr std::array<std::array<int, 2>, 16> kRing{{
    {0, -3}, {1, -3}, {2, -2}, {3, -1}, {3, 0}, {3, 1}, {2, 2}, {1, 3},
    {0, 3}, {-1, 3}, {-2, 2}, {-3, 1}, {-3, 0}, {-3, -1}, {-2, -2}, {-1, -3},
}};
constexpr int kArc = 9;
constexpr int kHarrisHalfWindow = 3;
constexpr double kHarrisK = 0.04;
constexpr int kPatternRadius = 13;
constexpr std::uint32_t kPatternSeed = 0x0b1e5eedu;

bool is_fast_corner(const Raster& img, int x, int y, double threshold) {
    const double centre = img.at(x, y);
    std::array<int, 16> state{};
    for (std::size_t k = 0; k < kRing.size(); ++k) {
        const double v = img.at(x + kRing[k][0], y + kRing[k][1]);
        state[k] = v > centre + threshold ? 1 : (v < centre - threshold ? -1 : 0);
    }
    for (int sign : {1, -1}) {
        int run = 0;
        for (int k = 0; k < 32; ++k) {
            if (state[static_cast<std::size_t>(k % 16)] == sign) {
                if (++run >= kArc) return true;
            } else {
                run = 0;
            }
        }
    }
    return false;
}

Raster smooth(const Raster& img) {
    constexpr double kernel[5] = {1.0 / 16, 4.0 / 16, 6.0 / 16, 4.0 / 16, 1.0 / 16};
    const int w = img.width();
    const int h = img.height();
    Raster tmp(w, h);
    Raster out(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double s = 0.0;
            for (int k = -2; k <= 2; ++k) s += kernel[k + 2] * img.at(std::clamp(x + k, 0, w - 1), y);
            tmp.at(x, y) = static_cast<float>(s);
        }
    }
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double s = 0.0;
            for (int k = -2; k <= 2; ++k) s += kernel[k + 2] * tmp.at(x, std::clamp(y + k, 0, h - 1));
            out.at(x, y) = static_cast<float>(s);
        }
    }
    return out;
}

std::vector<double> harris_response(const Raster& img) {
    const int w = img.width();
    const int h = img.height();
    std::vector<double> gxx(static_cast<std::size_t>(w) * h, 0.0);
    std::vector<double> gyy(gxx.size(), 0.0);
    std::vector<double> gxy(gxx.size(), 0.0);
    auto at = [&](int x, int y) -> double { return img.at(std::clamp(x, 0, w - 1), std::clamp(y, 0, h - 1)); };
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double ix = (at(x + 1, y - 1) + 2 * at(x + 1, y) + at(x + 1, y + 1)) -
                              (at(x - 1, y - 1) + 2 * at(x - 1, y) + at(x - 1, y + 1));
            const double iy = (at(x - 1, y + 1) + 2 * at(x, y + 1) + at(x + 1, y + 1)) -
                              (at(x - 1, y - 1) + 2 * at(x, y - 1) + at(x + 1, y - 1));
            const std::size_t i = static_cast<std::size_t>(y) * w + x;
            gxx[i] = ix * ix;
            gyy[i] = iy * iy;
            gxy[i] = ix * iy;
        }
    }
    std::vector<double> response(gxx.size(), 0.0);
    for (int y = kHarrisHalfWindow; y < h - kHarrisHalfWindow; ++y) {
        for (int x = kHarrisHalfWindow; x < w - kHarrisHalfWindow; ++x) {
            double a = 0.0, b = 0.0, c = 0.0;
            for (int dy = -kHarrisHalfWindow; dy <= kHarrisHalfWindow; ++dy) {
                for (int dx = -kHarrisHalfWindow; dx <= kHarrisHalfWindow; ++dx) {
                    const std::size_t j = static_cast<std::size_t>(y + dy) * w + (x + dx);
                    a += gxx[j];
                    b += gyy[j];
                    c += gxy[j];
                }
            }
            response[static_cast<std::size_t>(y) * w + x] = a * b - c * c - kHarrisK * (a + b) * (a + b);
        }
    }
    return response;
}

// Vertex of the parabola through three samples. Only meaningful at a true
// peak; a candidate that is merely the best among FAST pixels stays put.
double parabolic_offset(double left, double centre, double right) {
    if (left > centre || right > centre) return 0.0;
    const double denom = left - 2.0 * centre + right;
    if (denom >= 0.0) return 0.0;
    return std::clamp(0.5 * (left - right) / denom, -0.5, 0.5);
}

double centroid_angle(const Raster& img, int x, int y) {
    double m10 = 0.0, m01 = 0.0;
    const int r2 = kPatchRadius * kPatchRadius;
    for (int dy = -kPatchRadius; dy <= kPatchRadius; ++dy) {
        for (int dx = -kPatchRadius; dx <= kPatchRadius; ++dx) {
            if (dx * dx + dy * dy > r2) continue;
            const double v = img.at(x + dx, y + dy);
            m10 += dx * v;
            m01 += dy * v;
        }
    }
    return std::atan2(m01, m10);
}

Descriptor describe(const Raster& img, int x, int y, double angle) {
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    Descriptor d{};
    const auto& pattern = descriptor_pattern();
    for (std::size_t k = 0; k < pattern.size(); ++k) {
        const auto& p = pattern[k];
        const int ax = static_cast<int>(std::lround(c * p[0] - s * p[1]));
        const int ay = static_cast<int>(std::lround(s * p[0] + c * p[1]));
        const int bx = static_cast<int>(std::lround(c * p[2] - s * p[3]));
        const int by = static_cast<int>(std::lround(s * p[2] + c * p[3]));
        if (img.at(x + ax, y + ay) < img.at(x + bx, y + by)) d[k / 64] |= (1ULL << (k % 64));
    }
    return d;
}

}  // namespace

const std::vector<std::array<int, 4>>& descriptor_pattern() {
    static const std::vector<std::array<int, 4>> pattern = [] {
        std::mt19937 gen(kPatternSeed);
        const auto span = static_cast<std::uint32_t>(2 * kPatternRadius + 1);
        auto draw_point = [&](int& px, int& py) {
            do {
                px = static_cast<int>(gen() % span) - kPatternRadius;
                py = static_cast<int>(gen() % span) - kPatternRadius;
            } while (px * px + py * py > kPatternRadius * kPatternRadius);
        };
        std::vector<std::array<int, 4>> out;
        out.reserve(256);
        while (out.size() < 256) {
            int ax, ay, bx, by;
            draw_point(ax, ay);
            draw_point(bx, by);
            if (ax == bx && ay == by) continue;
            out.push_back({ax, ay, bx, by});
        }
        return out;
    }();
    return pattern;
}

Features detect_and_describe(const Raster& gray, int max_features, double fast_threshold) {
    const int w = gray.width();
    const int h = gray.height();
    if (max_features < 1) throw Error(ErrorKind::InvalidArgument, "features: max_features must be >= 1");
    // No interior left once the patch border is excluded.
    if (w < 2 * kPatchRadius + 2 || h < 2 * kPatchRadius + 2) return {};

    const int lo = kPatchRadius;
    const int hi_x = w - 1 - kPatchRadius;
    const int hi_y = h - 1 - kPatchRadius;

    std::vector<char> candidate(static_cast<std::size_t>(w) * h, 0);
    for (int y = lo; y <= hi_y; ++y) {
        for (int x = lo; x <= hi_x; ++x) {
            candidate[static_cast<std::size_t>(y) * w + x] = is_fast_corner(gray, x, y, fast_threshold) ? 1 : 0;
        }
    }
    const std::vector<double> response = harris_response(gray);
    auto R = [&](int x, int y) { return response[static_cast<std::size_t>(y) * w + x]; };

    struct Candidate {
        int x, y;
        double r;
    };
    std::vector<Candidate> kept;
    for (int y = lo; y <= hi_y; ++y) {
        for (int x = lo; x <= hi_x; ++x) {
            if (!candidate[static_cast<std::size_t>(y) * w + x]) continue;
            const double r = R(x, y);
            if (!(r > 0.0)) continue;
            bool is_max = true;
            for (int dy = -1; dy <= 1 && is_max; ++dy) {
                for (int dx = -1; dx <= 1; ++dx) {
                    if (dx == 0 && dy == 0) continue;
                    const int nx = x + dx;
                    const int ny = y + dy;
                    if (!candidate[static_cast<std::size_t>(ny) * w + nx]) continue;
                    const double rn = R(nx, ny);
                    const bool earlier = dy < 0 || (dy == 0 && dx < 0);
                    // Equal responses: the earlier pixel in raster order survives.
                    if (rn > r || (rn == r && earlier)) {
                        is_max = false;
                        break;
                    }
                }
            }
            if (is_max) kept.push_back({x, y, r});
        }
    }
    std::stable_sort(kept.begin(), kept.end(), [](const Candidate& a, const Candidate& b) { return a.r > b.r; });
    if (kept.size() > static_cast<std::size_t>(max_features)) kept.resize(static_cast<std::size_t>(max_features));

    const Raster smoothed = smooth(gray);
    Features out;
    out.keypoints.reserve(kept.size());
    out.descriptors.reserve(kept.size());
    for (const Candidate& c : kept) {
        Keypoint kp;
        kp.x = c.x + parabolic_offset(R(c.x - 1, c.y), c.r, R(c.x + 1, c.y));
        kp.y = c.y + parabolic_offset(R(c.x, c.y - 1), c.r, R(c.x, c.y + 1));
        kp.response = c.r;
        kp.orientation = centroid_angle(smoothed, c.x, c.y);
        out.descriptors.push_back(describe(smoothed, c.x, c.y, kp.orientation));
        out.keypoints.push_back(kp);
    }
    return out;
}

std::vector<Match> match_ratio(const std::vector<Descriptor>& a, const std::vector<Descriptor>& b, double ratio) {
    std::vector<Match> matches;
    if (b.size() < 2) return matches;
    for (std::size_t i = 0; i < a.size(); ++i) {
        int best = std::numeric_limits<int>::max();
        int second = std::numeric_limits<int>::max();
        std::size_t best_j = 0;
        for (std::size_t j = 0; j < b.size(); ++j) {
            const int d = hamming(a[i], b[j]);
            if (d < best) {
                second = best;
                best = d;
                best_j = j;
            } else if (d < second) {
                second = d;
            }
        }
        if (static_cast<double>(best) < ratio * static_cast<double>(second)) {
            matches.push_back({i, best_j, best, second});
        }
    }
    return matches;
}

std::optional<AffineTransform> affine_from_three(const PointPair& p, const PointPair& q, const PointPair& r) {
    const double det = (q.x0 - p.x0) * (r.y0 - p.y0) - (r.x0 - p.x0) * (q.y0 - p.y0);
    if (std::abs(det) < 1e-6) return std::nullopt;
    Eigen::Matrix3d A;
    A << p.x0, p.y0, 1.0, q.x0, q.y0, 1.0, r.x0, r.y0, 1.0;
    const Eigen::PartialPivLU<Eigen::Matrix3d> lu(A);
    const Eigen::Vector3d top = lu.solve(Eigen::Vector3d(p.x1, q.x1, r.x1));
    const Eigen::Vector3d bottom = lu.solve(Eigen::Vector3d(p.y1, q.y1, r.y1));
    AffineTransform t;
    t.m = {top[0], top[1], top[2], bottom[0], bottom[1], bottom[2]};
    for (double v : t.m) {
        if (!std::isfinite(v)) return std::nullopt;
    }
    return t;
}

std::optional<AffineTransform> affine_least_squares(const std::vector<PointPair>& pairs) {
    if (pairs.size() < 3) return std::nullopt;
    const auto n = static_cast<Eigen::Index>(pairs.size());
    Eigen::MatrixXd A(n, 3);
    Eigen::VectorXd bx(n), by(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const PointPair& p = pairs[static_cast<std::size_t>(i)];
        A(i, 0) = p.x0;
        A(i, 1) = p.y0;
        A(i, 2) = 1.0;
        bx[i] = p.x1;
        by[i] = p.y1;
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
    qr.setThreshold(1e-10);
    if (qr.rank() < 3) return std::nullopt;
    const Eigen::Vector3d top = qr.solve(bx);
    const Eigen::Vector3d bottom = qr.solve(by);
    AffineTransform t;
    t.m = {top[0], top[1], top[2], bottom[0], bottom[1], bottom[2]};
    for (double v : t.m) {
        if (!std::isfinite(v)) return std::nullopt;
    }
    return t;
}

namespace {

std::size_t count_inliers(const AffineTransform& t, const std::vector<PointPair>& pairs, double tol,
                          std::vector<bool>* mask) {
    std::size_t count = 0;
    if (mask) mask->assign(pairs.size(), false);
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const PointPair& p = pairs[i];
        const double ex = t.apply_x(p.x0, p.y0) - p.x1;
        const double ey = t.apply_y(p.x0, p.y0) - p.y1;
        if (std::sqrt(ex * ex + ey * ey) < tol) {
            ++count;
            if (mask) (*mask)[i] = true;
        }
    }
    return count;
}

}  // namespace

RansacResult estimate_affine_ransac(const std::vector<PointPair>& pairs, int iterations, double inlier_tolerance,
                                    std::uint64_t seed) {
    if (pairs.size() < 3) {
        throw Error(ErrorKind::Estimation, "ransac: need at least 3 correspondences, got " +
                                               std::to_string(pairs.size()));
    }
    if (iterations < 1) throw Error(ErrorKind::InvalidArgument, "ransac: iterations must be >= 1");

    std::optional<AffineTransform> best;
    std::size_t best_count = 0;
    const auto n = static_cast<std::uint64_t>(pairs.size());
    for (int it = 0; it < iterations; ++it) {
        SplitMix64 gen(stream_key(seed, {static_cast<std::uint64_t>(it)}));
        const std::uint64_t i0 = uniform_index(gen, n);
        std::uint64_t i1 = uniform_index(gen, n - 1);
        if (i1 >= i0) ++i1;
        std::uint64_t lo = std::min(i0, i1), hi = std::max(i0, i1);
        std::uint64_t i2 = uniform_index(gen, n - 2);
        if (i2 >= lo) ++i2;
        if (i2 >= hi) ++i2;
        const auto model = affine_from_three(pairs[i0], pairs[i1], pairs[i2]);
        if (!model) continue;
        const std::size_t count = count_inliers(*model, pairs, inlier_tolerance, nullptr);
        if (!best || count > best_count) {
            best = model;
            best_count = count;
        }
    }
    if (!best) throw Error(ErrorKind::Estimation, "ransac: every sampled triple was collinear");

    RansacResult result;
    result.best_sample_inliers = best_count;
    std::vector<bool> mask;
    count_inliers(*best, pairs, inlier_tolerance, &mask);
    std::vector<PointPair> inlier_pairs;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        if (mask[i]) inlier_pairs.push_back(pairs[i]);
    }
    result.model = *best;
    result.inliers = mask;
    result.inlier_count = best_count;
    if (const auto refit = affine_least_squares(inlier_pairs)) {
        std::vector<bool> refit_mask;
        const std::size_t refit_count = count_inliers(*refit, pairs, inlier_tolerance, &refit_mask);
        if (refit_count >= best_count) {
            result.model = *refit;
            result.inliers = std::move(refit_mask);
            result.inlier_count = refit_count;
        }
    }
    return result;
}

double affine_displacement(const AffineTransform& model, int width, int height, DisplacementAggregation aggregation) {
    std::vector<std::array<double, 2>> points;
    const double xm = width - 1.0;
    const double ym = height - 1.0;
    if (aggregation == DisplacementAggregation::ProbePoints) {
        points = {{0.0, 0.0}, {xm, 0.0}, {0.0, ym}, {xm, ym}, {0.5 * xm, 0.5 * ym}};
    } else {
        constexpr int kGrid = 8;
        for (int j = 0; j < kGrid; ++j) {
            for (int i = 0; i < kGrid; ++i) points.push_back({xm * i / (kGrid - 1), ym * j / (kGrid - 1)});
        }
    }
    double sum = 0.0;
    for (const auto& [x, y] : points) sum += std::hypot(model.apply_x(x, y) - x, model.apply_y(x, y) - y);
    return sum / static_cast<double>(points.size());
}

namespace {

double mean_abs_diff(const Raster& a, const Raster& b) {
    double s = 0.0;
    const auto va = a.values();
    const auto vb = b.values();
    for (std::size_t i = 0; i < va.size(); ++i) s += std::abs(static_cast<double>(va[i]) - vb[i]);
    return va.empty() ? 0.0 : s / static_cast<double>(va.size());
}

}  // namespace

std::optional<double> displacement_score(const Raster& first, const Features& first_features, const Raster& second,
                                         const Features& second_features, const VisionConfig& cfg) {
    if (first.width() != second.width() || first.height() != second.height()) {
        throw Error(ErrorKind::InvalidArgument, "displacement: images differ in size");
    }
    // Bit-identical frames have no motion; skip the fit and its roundoff.
    if (first == second) return 0.0;
    const auto matches = match_ratio(first_features.descriptors, second_features.descriptors, cfg.ratio);
    if (matches.size() >= 3) {
        std::vector<PointPair> pairs;
        pairs.reserve(matches.size());
        for (const Match& m : matches) {
            const Keypoint& a = first_features.keypoints[m.index_a];
            const Keypoint& b = second_features.keypoints[m.index_b];
            pairs.push_back({a.x, a.y, b.x, b.y});
        }
        try {
            const RansacResult fit = estimate_affine_ransac(pairs, cfg.ransac_iterations, cfg.inlier_tolerance, cfg.seed);
            return affine_displacement(fit.model, first.width(), first.height(), cfg.aggregation);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::Estimation) throw;
        }
    }
    if (mean_abs_diff(first, second) < 1.0 / 255.0) return 0.0;
    return std::nullopt;
}

std::optional<double> displacement_score(const Raster& first, const Raster& second, const VisionConfig& cfg) {
    if (first.width() != second.width() || first.height() != second.height()) {
        throw Error(ErrorKind::InvalidArgument, "displacement: images differ in size");
    }
    const Features fa = detect_and_describe(first, cfg.max_features, cfg.fast_threshold);
    const Features fb = detect_and_describe(second, cfg.max_features, cfg.fast_threshold);
    return displacement_score(first, fa, second, fb, cfg);
}

}  // namespace photofx
