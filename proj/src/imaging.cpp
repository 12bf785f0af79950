#include "photofx/imaging.hpp"

#include "photofx/error.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <limits>
#include <map>
#include <memory>
#include <regex>
#include <string>

namespace photofx {

namespace fs = std::filesystem;

Raster::Raster(int width, int height, float fill)
    : width_(width), height_(height),
      values_(static_cast<std::size_t>(std::max(width, 0)) * static_cast<std::size_t>(std::max(height, 0)), fill) {}

Raster::Raster(int width, int height, std::vector<float> values)
    : width_(width), height_(height), values_(std::move(values)) {
    if (width < 0 || height < 0 ||
        values_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
        throw Error(ErrorKind::InvalidArgument, "raster: value count does not match dimensions");
    }
}

Frame::Frame(int width, int height, float fill)
    : width_(width), height_(height),
      data_(static_cast<std::size_t>(std::max(width, 0)) * static_cast<std::size_t>(std::max(height, 0)) * 3, fill) {}

Frame::Frame(int width, int height, std::vector<float> rgb)
    : width_(width), height_(height), data_(std::move(rgb)) {
    if (width < 0 || height < 0 ||
        data_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * 3) {
        throw Error(ErrorKind::InvalidArgument, "frame: sample count does not match width*height*3");
    }
}

namespace {

bool in_unit(float v) { return v >= 0.0f && v <= 1.0f; }

}  // namespace

void validate(const Frame& frame) {
    if (frame.width() < 2 || frame.height() < 2) {
        throw Error(ErrorKind::Validation, "frame: dimensions must be at least 2x2, got " +
                                               std::to_string(frame.width()) + "x" +
                                               std::to_string(frame.height()));
    }
    const auto data = frame.data();
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (!in_unit(data[i])) {
            throw Error(ErrorKind::Validation, "frame: channel value " + std::to_string(data[i]) +
                                                   " at sample " + std::to_string(i) + " outside [0, 1]");
        }
    }
}

void validate(const VideoClip& clip) {
    if (clip.empty()) throw Error(ErrorKind::Validation, "clip: no frames");
    for (std::size_t i = 0; i < clip.size(); ++i) {
        const Frame& f = clip.frames[i];
        if (f.width() != clip.width() || f.height() != clip.height()) {
            throw Error(ErrorKind::Validation, "clip: frame " + std::to_string(i) + " is " +
                                                   std::to_string(f.width()) + "x" + std::to_string(f.height()) +
                                                   ", expected " + std::to_string(clip.width()) + "x" +
                                                   std::to_string(clip.height()));
        }
        validate(f);
    }
}

void validate(const DisparityMap& disparity) {
    if (disparity.width() < 2 || disparity.height() < 2) {
        throw Error(ErrorKind::Validation, "disparity: dimensions must be at least 2x2");
    }
    for (float v : disparity.values.values()) {
        if (!in_unit(v)) {
            throw Error(ErrorKind::Validation, "disparity: value " + std::to_string(v) + " outside [0, 1]");
        }
    }
}

VideoClip slice(const VideoClip& clip, std::size_t begin, std::size_t end) {
    if (begin > end || end > clip.size()) {
        throw Error(ErrorKind::InvalidArgument, "slice: range [" + std::to_string(begin) + ", " +
                                                    std::to_string(end) + ") outside clip of length " +
                                                    std::to_string(clip.size()));
    }
    VideoClip out;
    out.fps = clip.fps;
    out.frames.assign(clip.frames.begin() + static_cast<std::ptrdiff_t>(begin),
                      clip.frames.begin() + static_cast<std::ptrdiff_t>(end));
    return out;
}

Raster to_grayscale(const Frame& frame) {
    Raster gray(frame.width(), frame.height());
    const auto rgb = frame.data();
    auto out = gray.values();
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double v = 0.299 * rgb[3 * i] + 0.587 * rgb[3 * i + 1] + 0.114 * rgb[3 * i + 2];
        out[i] = static_cast<float>(std::clamp(v, 0.0, 1.0));
    }
    return gray;
}

namespace {

struct Tap {
    int i0;
    int i1;
    double w1;  // weight of i1; i0 gets 1 - w1
};

std::vector<Tap> bilinear_taps(int src, int dst) {
    std::vector<Tap> taps(static_cast<std::size_t>(dst));
    const double scale = static_cast<double>(src) / static_cast<double>(dst);
    for (int i = 0; i < dst; ++i) {
        double s = (i + 0.5) * scale - 0.5;
        s = std::clamp(s, 0.0, static_cast<double>(src - 1));
        const int i0 = static_cast<int>(std::floor(s));
        const int i1 = std::min(i0 + 1, src - 1);
        taps[static_cast<std::size_t>(i)] = {i0, i1, s - i0};
    }
    return taps;
}

int nearest_index(int i, int src, int dst) {
    const double s = (i + 0.5) * static_cast<double>(src) / static_cast<double>(dst);
    return std::clamp(static_cast<int>(std::floor(s)), 0, src - 1);
}

void check_target_dims(const char* op, int w, int h) {
    if (w < 2 || h < 2) {
        throw Error(ErrorKind::InvalidArgument, std::string(op) + ": target dimensions must be at least 2x2, got " +
                                                    std::to_string(w) + "x" + std::to_string(h));
    }
}

}  // namespace

Frame resize_bilinear(const Frame& frame, int new_width, int new_height) {
    check_target_dims("resize_bilinear", new_width, new_height);
    if (new_width == frame.width() && new_height == frame.height()) return frame;
    const auto xs = bilinear_taps(frame.width(), new_width);
    const auto ys = bilinear_taps(frame.height(), new_height);
    Frame out(new_width, new_height);
    for (int y = 0; y < new_height; ++y) {
        const Tap& ty = ys[static_cast<std::size_t>(y)];
        for (int x = 0; x < new_width; ++x) {
            const Tap& tx = xs[static_cast<std::size_t>(x)];
            for (int c = 0; c < 3; ++c) {
                const double top = (1.0 - tx.w1) * frame.at(tx.i0, ty.i0, c) + tx.w1 * frame.at(tx.i1, ty.i0, c);
                const double bot = (1.0 - tx.w1) * frame.at(tx.i0, ty.i1, c) + tx.w1 * frame.at(tx.i1, ty.i1, c);
                out.at(x, y, c) = static_cast<float>((1.0 - ty.w1) * top + ty.w1 * bot);
            }
        }
    }
    return out;
}

Raster resize_nearest(const Raster& raster, int new_width, int new_height) {
    check_target_dims("resize_nearest", new_width, new_height);
    if (new_width == raster.width() && new_height == raster.height()) return raster;
    Raster out(new_width, new_height);
    for (int y = 0; y < new_height; ++y) {
        const int sy = nearest_index(y, raster.height(), new_height);
        for (int x = 0; x < new_width; ++x) {
            out.at(x, y) = raster.at(nearest_index(x, raster.width(), new_width), sy);
        }
    }
    return out;
}

namespace {

void check_crop(int w, int h, int cw, int ch) {
    if (cw < 2 || ch < 2 || cw > w || ch > h) {
        throw Error(ErrorKind::InvalidArgument, "center_crop: crop " + std::to_string(cw) + "x" +
                                                    std::to_string(ch) + " invalid for " + std::to_string(w) +
                                                    "x" + std::to_string(h) + " input");
    }
}

}  // namespace

Frame center_crop(const Frame& frame, int crop_width, int crop_height) {
    check_crop(frame.width(), frame.height(), crop_width, crop_height);
    const int ox = (frame.width() - crop_width) / 2;
    const int oy = (frame.height() - crop_height) / 2;
    Frame out(crop_width, crop_height);
    for (int y = 0; y < crop_height; ++y) {
        for (int x = 0; x < crop_width; ++x) {
            for (int c = 0; c < 3; ++c) out.at(x, y, c) = frame.at(x + ox, y + oy, c);
        }
    }
    return out;
}

Raster center_crop(const Raster& raster, int crop_width, int crop_height) {
    check_crop(raster.width(), raster.height(), crop_width, crop_height);
    const int ox = (raster.width() - crop_width) / 2;
    const int oy = (raster.height() - crop_height) / 2;
    Raster out(crop_width, crop_height);
    for (int y = 0; y < crop_height; ++y) {
        for (int x = 0; x < crop_width; ++x) out.at(x, y) = raster.at(x + ox, y + oy);
    }
    return out;
}

std::uint8_t quantize_u8(float value) noexcept {
    const double q = std::floor(static_cast<double>(value) * 255.0 + 0.5);
    return static_cast<std::uint8_t>(std::clamp(q, 0.0, 255.0));
}

Frame quantize_u8(const Frame& frame) {
    Frame out = frame;
    for (float& v : out.data()) v = static_cast<float>(quantize_u8(v)) / 255.0f;
    return out;
}

VideoClip quantize_u8(const VideoClip& clip) {
    VideoClip out;
    out.fps = clip.fps;
    out.frames.reserve(clip.size());
    for (const Frame& f : clip.frames) out.frames.push_back(quantize_u8(f));
    return out;
}

// --- PNG I/O -------------------------------------------------------------

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const noexcept {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

struct PngPixels {
    int width = 0;
    int height = 0;
    int channels = 0;   // 1 (gray) or 3 (rgb) after transforms
    int bit_depth = 0;  // 8 or 16
    std::vector<std::uint16_t> samples;
};

void png_error_to_jmp(png_structp png, png_const_charp) {
    std::longjmp(png_jmpbuf(png), 1);
}

void png_warning_ignore(png_structp, png_const_charp) {}

PngPixels read_png(const fs::path& file) {
    FilePtr fp(std::fopen(file.c_str(), "rb"));
    if (!fp) throw Error(ErrorKind::Io, "cannot open " + file.string());

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, png_error_to_jmp, png_warning_ignore);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw Error(ErrorKind::Io, "libpng allocation failed for " + file.string());
    }

    PngPixels out;
    std::vector<png_bytep> rows;
    std::vector<std::uint8_t> buffer;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw Error(ErrorKind::Io, "malformed PNG " + file.string());
    }

    png_init_io(png, fp.get());
    png_read_info(png, info);

    const png_byte color_type = png_get_color_type(png, info);
    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color_type == PNG_COLOR_TYPE_GRAY && png_get_bit_depth(png, info) < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (color_type & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
    png_read_update_info(png, info);

    out.width = static_cast<int>(png_get_image_width(png, info));
    out.height = static_cast<int>(png_get_image_height(png, info));
    out.bit_depth = png_get_bit_depth(png, info);
    out.channels = png_get_channels(png, info);

    const std::size_t rowbytes = png_get_rowbytes(png, info);
    buffer.resize(rowbytes * static_cast<std::size_t>(out.height));
    rows.resize(static_cast<std::size_t>(out.height));
    for (int y = 0; y < out.height; ++y) rows[static_cast<std::size_t>(y)] = buffer.data() + rowbytes * static_cast<std::size_t>(y);
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    if (out.channels != 1 && out.channels != 3) {
        throw Error(ErrorKind::Io, "unsupported channel layout in " + file.string());
    }
    const std::size_t n = static_cast<std::size_t>(out.width) * static_cast<std::size_t>(out.height) *
                          static_cast<std::size_t>(out.channels);
    out.samples.resize(n);
    if (out.bit_depth == 16) {
        for (std::size_t i = 0; i < n; ++i) {
            out.samples[i] = static_cast<std::uint16_t>((buffer[2 * i] << 8) | buffer[2 * i + 1]);
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) out.samples[i] = buffer[i];
    }
    return out;
}

void write_png(const fs::path& file, int width, int height, int channels, int bit_depth,
               const std::vector<std::uint8_t>& bytes) {
    FilePtr fp(std::fopen(file.c_str(), "wb"));
    if (!fp) throw Error(ErrorKind::Io, "cannot write " + file.string());

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, png_error_to_jmp, png_warning_ignore);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, &info);
        throw Error(ErrorKind::Io, "libpng allocation failed for " + file.string());
    }
    std::vector<png_bytep> rows(static_cast<std::size_t>(height));
    const std::size_t rowbytes = static_cast<std::size_t>(width) * static_cast<std::size_t>(channels) *
                                 static_cast<std::size_t>(bit_depth / 8);
    for (int y = 0; y < height; ++y) {
        rows[static_cast<std::size_t>(y)] = const_cast<png_bytep>(bytes.data()) + rowbytes * static_cast<std::size_t>(y);
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw Error(ErrorKind::Io, "failed writing PNG " + file.string());
    }
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), bit_depth,
                 channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    if (std::fflush(fp.get()) != 0) throw Error(ErrorKind::Io, "failed flushing " + file.string());
}

std::map<std::size_t, fs::path> indexed_pngs(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw Error(ErrorKind::Io, "not a directory: " + dir.string());
    static const std::regex pattern(R"(^(\d{6})\.png$)");
    std::map<std::size_t, fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        const std::string name = entry.path().filename().string();
        std::smatch m;
        if (std::regex_match(name, m, pattern)) files.emplace(std::stoul(m[1].str()), entry.path());
    }
    std::size_t expected = 0;
    for (const auto& [index, path] : files) {
        if (index != expected) {
            throw Error(ErrorKind::Io, "frame sequence " + dir.string() + " has a gap: missing index " +
                                           std::to_string(expected));
        }
        ++expected;
    }
    return files;
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw Error(ErrorKind::Io, "cannot create directory " + dir.string());
}

}  // namespace

fs::path frame_path(const fs::path& dir, std::size_t index) {
    char name[32];
    std::snprintf(name, sizeof(name), "%06zu.png", index);
    return dir / name;
}

Frame load_frame(const fs::path& file) {
    const PngPixels px = read_png(file);
    Frame frame(px.width, px.height);
    const double scale = px.bit_depth == 16 ? 65535.0 : 255.0;
    auto data = frame.data();
    const std::size_t pixels = frame.pixel_count();
    for (std::size_t i = 0; i < pixels; ++i) {
        for (std::size_t c = 0; c < 3; ++c) {
            const std::uint16_t s = px.channels == 3 ? px.samples[3 * i + c] : px.samples[i];
            data[3 * i + c] = static_cast<float>(s / scale);
        }
    }
    validate(frame);
    return frame;
}

void save_frame(const Frame& frame, const fs::path& file) {
    std::vector<std::uint8_t> bytes(frame.data().size());
    std::transform(frame.data().begin(), frame.data().end(), bytes.begin(),
                   [](float v) { return quantize_u8(v); });
    write_png(file, frame.width(), frame.height(), 3, 8, bytes);
}

VideoClip load_clip(const fs::path& dir) {
    const auto files = indexed_pngs(dir);
    if (files.empty()) throw Error(ErrorKind::Io, "no frames (NNNNNN.png) in " + dir.string());
    VideoClip clip;
    clip.frames.reserve(files.size());
    for (const auto& [index, path] : files) {
        Frame f = load_frame(path);
        if (!clip.frames.empty() && (f.width() != clip.width() || f.height() != clip.height())) {
            throw Error(ErrorKind::Io, "frame " + path.filename().string() + " is " + std::to_string(f.width()) +
                                           "x" + std::to_string(f.height()) + ", expected " +
                                           std::to_string(clip.width()) + "x" + std::to_string(clip.height()));
        }
        clip.frames.push_back(std::move(f));
    }
    return clip;
}

void save_clip(const VideoClip& clip, const fs::path& dir) {
    if (clip.empty()) throw Error(ErrorKind::InvalidArgument, "save_clip: clip is empty");
    ensure_dir(dir);
    for (std::size_t i = 0; i < clip.size(); ++i) save_frame(clip.frames[i], frame_path(dir, i));
}

DisparityMap load_disparity(const fs::path& file) {
    const PngPixels px = read_png(file);
    if (px.channels != 1) throw Error(ErrorKind::Io, "disparity map must be single-channel: " + file.string());
    const double scale = px.bit_depth == 16 ? 65535.0 : 255.0;
    std::vector<float> values(px.samples.size());
    for (std::size_t i = 0; i < values.size(); ++i) values[i] = static_cast<float>(px.samples[i] / scale);
    return DisparityMap{Raster(px.width, px.height, std::move(values))};
}

void save_disparity(const DisparityMap& map, const fs::path& file) {
    const auto values = map.values.values();
    std::vector<std::uint8_t> bytes(values.size() * 2);
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double q = std::clamp(std::floor(static_cast<double>(values[i]) * 65535.0 + 0.5), 0.0, 65535.0);
        const auto s = static_cast<std::uint16_t>(q);
        bytes[2 * i] = static_cast<std::uint8_t>(s >> 8);
        bytes[2 * i + 1] = static_cast<std::uint8_t>(s & 0xff);
    }
    write_png(file, map.width(), map.height(), 1, 16, bytes);
}

std::vector<DisparityMap> load_disparities(const fs::path& dir, bool normalize) {
    const auto files = indexed_pngs(dir);
    if (files.empty()) throw Error(ErrorKind::Io, "no disparity maps (NNNNNN.png) in " + dir.string());
    std::vector<DisparityMap> maps;
    maps.reserve(files.size());
    for (const auto& [index, path] : files) maps.push_back(load_disparity(path));
    if (normalize) {
        float lo = std::numeric_limits<float>::max();
        float hi = std::numeric_limits<float>::lowest();
        for (const auto& m : maps) {
            const auto [mn, mx] = std::minmax_element(m.values.values().begin(), m.values.values().end());
            lo = std::min(lo, *mn);
            hi = std::max(hi, *mx);
        }
        if (hi > lo) {
            const double span = static_cast<double>(hi) - lo;
            for (auto& m : maps) {
                for (float& v : m.values.values()) v = static_cast<float>((v - lo) / span);
            }
        }
    }
    return maps;
}

void save_disparities(const std::vector<DisparityMap>& maps, const fs::path& dir) {
    ensure_dir(dir);
    for (std::size_t i = 0; i < maps.size(); ++i) save_disparity(maps[i], frame_path(dir, i));
}

}  // namespace photofx
