#include "photofx/bokeh.hpp"

#include "photofx/error.hpp"
#include "photofx/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace photofx {

namespace {

void check_unit(const char* name, double v) {
    if (!(v >= 0.0 && v <= 1.0)) {
        throw Error(ErrorKind::InvalidArgument, std::string("bokeh: ") + name + " = " + std::to_string(v) +
                                                    " outside [0, 1]");
    }
}

// Largest h >= 0 with h^2 + dy^2 <= r^2, evaluated with the same integer
// test the area count uses so the two always agree.
int half_width(int dy, double r2) {
    const double rem = r2 - static_cast<double>(dy) * dy;
    if (rem < 0.0) return -1;
    int h = static_cast<int>(std::floor(std::sqrt(rem)));
    while (static_cast<double>(h + 1) * (h + 1) + static_cast<double>(dy) * dy <= r2) ++h;
    while (h >= 0 && static_cast<double>(h) * h + static_cast<double>(dy) * dy > r2) --h;
    return h;
}

}  // namespace

CocMap coc_map(const DisparityMap& disparity, double K, double d_f) {
    check_unit("K", K);
    check_unit("d_f", d_f);
    validate(disparity);
    CocMap map;
    map.width = disparity.width();
    map.height = disparity.height();
    map.radius.resize(disparity.values.size());
    const double k_phys = kMaxCocRadius * K;
    const auto d = disparity.values.values();
    for (std::size_t i = 0; i < d.size(); ++i) map.radius[i] = k_phys * std::abs(static_cast<double>(d[i]) - d_f);
    return map;
}

int bokeh_layer(double disparity, int layers) noexcept {
    const int l = static_cast<int>(std::floor(disparity * layers));
    return std::clamp(l, 0, layers - 1);
}

long disk_area(double radius) noexcept {
    if (radius < 0.5) return 1;
    const double r2 = radius * radius;
    const int reach = static_cast<int>(std::floor(radius));
    long area = 0;
    for (int dy = -reach; dy <= reach; ++dy) {
        const int h = half_width(dy, r2);
        if (h >= 0) area += 2L * h + 1;
    }
    return area;
}

Frame render_bokeh(const Frame& frame, const DisparityMap& disparity, double K, double d_f, const BokehConfig& cfg) {
    if (frame.width() != disparity.width() || frame.height() != disparity.height()) {
        throw Error(ErrorKind::InvalidArgument,
                    "bokeh: disparity is " + std::to_string(disparity.width()) + "x" +
                        std::to_string(disparity.height()) + " but frame is " + std::to_string(frame.width()) +
                        "x" + std::to_string(frame.height()));
    }
    if (cfg.layers < 1) throw Error(ErrorKind::InvalidArgument, "bokeh: layer count must be >= 1");
    const CocMap coc = coc_map(disparity, K, d_f);
    if (K == 0.0) return frame;

    const int w = frame.width();
    const int h = frame.height();
    const std::size_t stride = static_cast<std::size_t>(w) + 1;
    const std::size_t pixels = frame.pixel_count();

    // Bucket pixels by layer, far (low disparity) first.
    std::vector<std::vector<std::size_t>> layer_pixels(static_cast<std::size_t>(cfg.layers));
    const auto d = disparity.values.values();
    for (std::size_t i = 0; i < pixels; ++i) {
        layer_pixels[static_cast<std::size_t>(bokeh_layer(d[i], cfg.layers))].push_back(i);
    }

    std::vector<double> acc_color(pixels * 3, 0.0);
    std::vector<double> acc_weight(pixels, 0.0);
    // Row-wise difference buffers: one extra column per row for span ends.
    std::vector<double> diff_color(stride * static_cast<std::size_t>(h) * 3);
    std::vector<double> diff_weight(stride * static_cast<std::size_t>(h));
    const auto rgb = frame.data();

    for (const auto& members : layer_pixels) {
        if (members.empty()) continue;
        std::fill(diff_color.begin(), diff_color.end(), 0.0);
        std::fill(diff_weight.begin(), diff_weight.end(), 0.0);

        for (std::size_t i : members) {
            const int sx = static_cast<int>(i % static_cast<std::size_t>(w));
            const int sy = static_cast<int>(i / static_cast<std::size_t>(w));
            const double r = coc.radius[i];
            const double r2 = r < 0.5 ? 0.0 : r * r;
            const int reach = r < 0.5 ? 0 : static_cast<int>(std::floor(r));
            const double weight = 1.0 / static_cast<double>(disk_area(r));
            const double c0 = weight * rgb[3 * i];
            const double c1 = weight * rgb[3 * i + 1];
            const double c2 = weight * rgb[3 * i + 2];
            for (int dy = -reach; dy <= reach; ++dy) {
                const int y = sy + dy;
                if (y < 0 || y >= h) continue;
                const int hw = half_width(dy, r2);
                if (hw < 0) continue;
                const int x0 = std::max(0, sx - hw);
                const int x1 = std::min(w - 1, sx + hw);
                if (x0 > x1) continue;
                const std::size_t row = static_cast<std::size_t>(y) * stride;
                const std::size_t a = row + static_cast<std::size_t>(x0);
                const std::size_t b = row + static_cast<std::size_t>(x1) + 1;
                diff_weight[a] += weight;
                diff_weight[b] -= weight;
                diff_color[3 * a] += c0;
                diff_color[3 * a + 1] += c1;
                diff_color[3 * a + 2] += c2;
                diff_color[3 * b] -= c0;
                diff_color[3 * b + 1] -= c1;
                diff_color[3 * b + 2] -= c2;
            }
        }

        for (int y = 0; y < h; ++y) {
            const std::size_t row = static_cast<std::size_t>(y) * stride;
            double wsum = 0.0;
            double csum[3] = {0.0, 0.0, 0.0};
            for (int x = 0; x < w; ++x) {
                const std::size_t k = row + static_cast<std::size_t>(x);
                wsum += diff_weight[k];
                for (int c = 0; c < 3; ++c) csum[c] += diff_color[3 * k + static_cast<std::size_t>(c)];
                const std::size_t p = static_cast<std::size_t>(y) * static_cast<std::size_t>(w) + static_cast<std::size_t>(x);
                const double layer_w = std::max(wsum, 0.0);
                const double alpha = std::min(1.0, layer_w);
                const double keep = 1.0 - alpha;
                acc_weight[p] = acc_weight[p] * keep + layer_w;
                for (int c = 0; c < 3; ++c) {
                    const std::size_t q = 3 * p + static_cast<std::size_t>(c);
                    acc_color[q] = acc_color[q] * keep + std::max(csum[c], 0.0);
                }
            }
        }
    }

    Frame out(w, h);
    auto dst = out.data();
    for (std::size_t p = 0; p < pixels; ++p) {
        for (std::size_t c = 0; c < 3; ++c) {
            const double v = acc_weight[p] > 0.0 ? acc_color[3 * p + c] / acc_weight[p] : rgb[3 * p + c];
            dst[3 * p + c] = static_cast<float>(std::clamp(v, 0.0, 1.0));
        }
    }
    return out;
}

VideoClip render_bokeh_clip(const VideoClip& clip, const std::vector<DisparityMap>& disparities,
                            const PhotoSignal& signal, const BokehConfig& cfg, unsigned workers) {
    if (signal.size() != clip.size()) {
        throw Error(ErrorKind::InvalidArgument, "bokeh: signal has " + std::to_string(signal.size()) +
                                                    " frames, clip has " + std::to_string(clip.size()));
    }
    validate(signal);
    bool needs_disparity = false;
    for (const auto& p : signal.per_frame) needs_disparity = needs_disparity || p.K > 0.0;
    if (needs_disparity && disparities.size() != clip.size()) {
        throw Error(ErrorKind::MissingInput, "bokeh: need one disparity map per frame, got " +
                                                 std::to_string(disparities.size()) + " for " +
                                                 std::to_string(clip.size()) + " frames");
    }
    VideoClip out;
    out.fps = clip.fps;
    out.frames.resize(clip.size());
    parallel_for(clip.size(), workers, [&](std::size_t i) {
        const PhotoParams& p = signal[i];
        out.frames[i] = p.K == 0.0 ? clip.frames[i] : render_bokeh(clip.frames[i], disparities[i], p.K, p.d_f, cfg);
    });
    return out;
}

}  // namespace photofx
