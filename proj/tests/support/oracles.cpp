#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

namespace oracle {

using photofx::DisparityMap;
using photofx::Frame;

Frame bokeh(const Frame& frame, const DisparityMap& disparity, double K, double d_f, int layers) {
    const int w = frame.width(), h = frame.height();
    const auto n = static_cast<std::size_t>(w * h);
    std::vector<double> radius(n);
    std::vector<int> layer(n);
    std::vector<double> area(n);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const std::size_t i = static_cast<std::size_t>(y * w + x);
            const double d = disparity.at(x, y);
            radius[i] = 60.0 * K * std::abs(d - d_f);
            layer[i] = std::min(static_cast<int>(std::floor(d * layers)), layers - 1);
            // Area of the unclipped disk, by counting.
            const double r = radius[i];
            if (r < 0.5) {
                area[i] = 1;
            } else {
                const int reach = static_cast<int>(r) + 1;
                int count = 0;
                for (int dy = -reach; dy <= reach; ++dy) {
                    for (int dx = -reach; dx <= reach; ++dx) count += (dx * dx + dy * dy <= r * r) ? 1 : 0;
                }
                area[i] = count;
            }
        }
    }

    std::vector<double> acc_w(n, 0.0), acc_c(3 * n, 0.0);
    for (int l = 0; l < layers; ++l) {
        std::vector<double> lw(n, 0.0), lc(3 * n, 0.0);
        for (int sy = 0; sy < h; ++sy) {
            for (int sx = 0; sx < w; ++sx) {
                const std::size_t s = static_cast<std::size_t>(sy * w + sx);
                if (layer[s] != l) continue;
                const double r = radius[s];
                for (int ty = 0; ty < h; ++ty) {
                    for (int tx = 0; tx < w; ++tx) {
                        const int dx = tx - sx, dy = ty - sy;
                        const bool covered = r < 0.5 ? (dx == 0 && dy == 0) : (dx * dx + dy * dy <= r * r);
                        if (!covered) continue;
                        const std::size_t t = static_cast<std::size_t>(ty * w + tx);
                        lw[t] += 1.0 / area[s];
                        for (int c = 0; c < 3; ++c) lc[3 * t + c] += frame.at(sx, sy, c) / area[s];
                    }
                }
            }
        }
        for (std::size_t t = 0; t < n; ++t) {
            const double alpha = std::min(1.0, lw[t]);
            acc_w[t] = acc_w[t] * (1 - alpha) + lw[t];
            for (int c = 0; c < 3; ++c) acc_c[3 * t + c] = acc_c[3 * t + c] * (1 - alpha) + lc[3 * t + c];
        }
    }
    Frame out(w, h);
    for (std::size_t t = 0; t < n; ++t) {
        for (int c = 0; c < 3; ++c) out.data()[3 * t + c] = static_cast<float>(acc_c[3 * t + c] / acc_w[t]);
    }
    return out;
}

Frame bilinear(const Frame& frame, int width, int height) {
    Frame out(width, height);
    const double sx = static_cast<double>(frame.width()) / width;
    const double sy = static_cast<double>(frame.height()) / height;
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, frame.width() - 1.0);
            double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, frame.height() - 1.0);
            const int x0 = static_cast<int>(std::floor(fx)), y0 = static_cast<int>(std::floor(fy));
            const int x1 = std::min(x0 + 1, frame.width() - 1), y1 = std::min(y0 + 1, frame.height() - 1);
            const double ax = fx - x0, ay = fy - y0;
            for (int c = 0; c < 3; ++c) {
                const double top = frame.at(x0, y0, c) * (1 - ax) + frame.at(x1, y0, c) * ax;
                const double bottom = frame.at(x0, y1, c) * (1 - ax) + frame.at(x1, y1, c) * ax;
                out.at(x, y, c) = static_cast<float>(top * (1 - ay) + bottom * ay);
            }
        }
    }
    return out;
}

double pearson(const Frame& a, const Frame& b) {
    const auto n = static_cast<double>(a.data().size());
    double ma = 0, mb = 0;
    for (std::size_t i = 0; i < a.data().size(); ++i) {
        ma += a.data()[i];
        mb += b.data()[i];
    }
    ma /= n;
    mb /= n;
    double cov = 0, va = 0, vb = 0;
    for (std::size_t i = 0; i < a.data().size(); ++i) {
        cov += (a.data()[i] - ma) * (b.data()[i] - mb);
        va += (a.data()[i] - ma) * (a.data()[i] - ma);
        vb += (b.data()[i] - mb) * (b.data()[i] - mb);
    }
    return cov / std::sqrt(va * vb);
}

Mat matmul(const Mat& a, const Mat& b) {
    Mat out(a.size(), std::vector<double>(b[0].size(), 0.0));
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t k = 0; k < b.size(); ++k) {
            for (std::size_t j = 0; j < b[0].size(); ++j) out[i][j] += a[i][k] * b[k][j];
        }
    }
    return out;
}

Mat rope(const Mat& x, const std::vector<double>& positions, double base) {
    Mat out = x;
    const std::size_t dim = x[0].size();
    for (std::size_t i = 0; i < x.size(); ++i) {
        for (std::size_t j = 0; j < dim / 2; ++j) {
            const double theta = positions[i] * std::pow(base, -static_cast<double>(2 * j) / static_cast<double>(dim));
            const std::complex<double> z = std::complex<double>(x[i][2 * j], x[i][2 * j + 1]) * std::polar(1.0, theta);
            out[i][2 * j] = z.real();
            out[i][2 * j + 1] = z.imag();
        }
    }
    return out;
}

namespace {

Mat branch(const Mat& q, const Mat& ctrl, const Mat& wk, const Mat& wv, int heads) {
    std::vector<double> ctrl_pos;
    for (std::size_t i = 0; i < ctrl.size(); ++i) ctrl_pos.push_back(static_cast<double>(i));
    const Mat k = rope(matmul(ctrl, wk), ctrl_pos);
    const Mat v = matmul(ctrl, wv);
    const std::size_t dim = q[0].size(), dk = dim / static_cast<std::size_t>(heads);
    Mat out(q.size(), std::vector<double>(dim, 0.0));
    for (int h = 0; h < heads; ++h) {
        const std::size_t off = static_cast<std::size_t>(h) * dk;
        for (std::size_t i = 0; i < q.size(); ++i) {
            std::vector<double> score(k.size());
            for (std::size_t j = 0; j < k.size(); ++j) {
                double s = 0;
                for (std::size_t c = 0; c < dk; ++c) s += q[i][off + c] * k[j][off + c];
                score[j] = s / std::sqrt(static_cast<double>(dk));
            }
            const double mx = *std::max_element(score.begin(), score.end());
            double z = 0;
            for (double& s : score) z += (s = std::exp(s - mx));
            for (std::size_t j = 0; j < k.size(); ++j) {
                for (std::size_t c = 0; c < dk; ++c) out[i][off + c] += score[j] / z * v[j][off + c];
            }
        }
    }
    return out;
}

}  // namespace

Mat decoupled_attention(const Mat& tokens, const std::vector<double>& positions, const Mat& traj, const Mat& pho,
                        const AttnWeights& w) {
    const Mat q = rope(matmul(tokens, w.wq), positions);
    const Mat ot = branch(q, traj, w.wk_traj, w.wv_traj, w.heads);
    const Mat op = branch(q, pho, w.wk_pho, w.wv_pho, w.heads);
    Mat sum = ot;
    for (std::size_t i = 0; i < sum.size(); ++i) {
        for (std::size_t j = 0; j < sum[i].size(); ++j) sum[i][j] += op[i][j];
    }
    const Mat update = matmul(sum, w.wo);
    Mat out = tokens;
    for (std::size_t i = 0; i < out.size(); ++i) {
        for (std::size_t j = 0; j < out[i].size(); ++j) out[i][j] += update[i][j];
    }
    return out;
}

}  // namespace oracle
