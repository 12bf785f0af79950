#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace photofx {

/// Single-channel float raster, row-major. Used for grayscale frames and
/// disparity maps.
class Raster {
public:
    Raster() = default;
    Raster(int width, int height, float fill = 0.0f);
    Raster(int width, int height, std::vector<float> values);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::size_t size() const noexcept { return values_.size(); }

    float at(int x, int y) const noexcept { return values_[index(x, y)]; }
    float& at(int x, int y) noexcept { return values_[index(x, y)]; }

    std::span<const float> values() const noexcept { return values_; }
    std::span<float> values() noexcept { return values_; }

    bool operator==(const Raster&) const = default;

private:
    std::size_t index(int x, int y) const noexcept {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
               static_cast<std::size_t>(x);
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<float> values_;
};

/// Per-pixel disparity in [0, 1]; larger is nearer.
struct DisparityMap {
    Raster values;

    int width() const noexcept { return values.width(); }
    int height() const noexcept { return values.height(); }
    float at(int x, int y) const noexcept { return values.at(x, y); }

    bool operator==(const DisparityMap&) const = default;
};

/// RGB frame with channels normalized to [0, 1], stored row-major as
/// interleaved triples.
class Frame {
public:
    Frame() = default;
    Frame(int width, int height, float fill = 0.0f);
    Frame(int width, int height, std::vector<float> rgb);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::size_t pixel_count() const noexcept {
        return static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_);
    }

    float at(int x, int y, int c) const noexcept { return data_[index(x, y, c)]; }
    float& at(int x, int y, int c) noexcept { return data_[index(x, y, c)]; }

    std::span<const float> data() const noexcept { return data_; }
    std::span<float> data() noexcept { return data_; }

    bool operator==(const Frame&) const = default;

private:
    std::size_t index(int x, int y, int c) const noexcept {
        return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
                static_cast<std::size_t>(x)) * 3 + static_cast<std::size_t>(c);
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<float> data_;
};

struct VideoClip {
    std::vector<Frame> frames;
    double fps = 24.0;

    std::size_t size() const noexcept { return frames.size(); }
    bool empty() const noexcept { return frames.empty(); }
    int width() const noexcept { return frames.empty() ? 0 : frames.front().width(); }
    int height() const noexcept { return frames.empty() ? 0 : frames.front().height(); }

    bool operator==(const VideoClip&) const = default;
};

/// Throws Validation if dimensions are too small, values fall outside
/// [0, 1], or frames disagree in size.
void validate(const Frame& frame);
void validate(const VideoClip& clip);
void validate(const DisparityMap& disparity);

/// Sub-range [begin, end) of a clip, copied.
VideoClip slice(const VideoClip& clip, std::size_t begin, std::size_t end);

// Rec.601 luma.
Raster to_grayscale(const Frame& frame);

/// Bilinear resampling with half-pixel-centre alignment (sample centres at
/// (i + 0.5) * src / dst - 0.5, clamped to the source edge).
Frame resize_bilinear(const Frame& frame, int new_width, int new_height);

/// Nearest-neighbour resampling with the same centre alignment. Used for
/// disparity so that depth edges stay hard.
Raster resize_nearest(const Raster& raster, int new_width, int new_height);

/// Centred crop. With an odd margin the extra pixel is left on the
/// right/bottom, i.e. the offset is floor((size - crop) / 2).
Frame center_crop(const Frame& frame, int crop_width, int crop_height);
Raster center_crop(const Raster& raster, int crop_width, int crop_height);

// 8-bit quantization used at every file boundary: round half up, clamped.
std::uint8_t quantize_u8(float value) noexcept;
Frame quantize_u8(const Frame& frame);
VideoClip quantize_u8(const VideoClip& clip);

// Frame-sequence directories hold NNNNNN.png files (6-digit zero-padded
// index starting at 000000). Disparity directories use the same naming with
// 16-bit grayscale PNGs, value / 65535.
std::filesystem::path frame_path(const std::filesystem::path& dir, std::size_t index);

Frame load_frame(const std::filesystem::path& file);
void save_frame(const Frame& frame, const std::filesystem::path& file);

VideoClip load_clip(const std::filesystem::path& dir);
void save_clip(const VideoClip& clip, const std::filesystem::path& dir);

DisparityMap load_disparity(const std::filesystem::path& file);
void save_disparity(const DisparityMap& map, const std::filesystem::path& file);

/// Loads a disparity sequence. With `normalize`, values are min-max scaled
/// to [0, 1] across the whole clip (left untouched when the clip is flat).
std::vector<DisparityMap> load_disparities(const std::filesystem::path& dir, bool normalize = true);
void save_disparities(const std::vector<DisparityMap>& maps, const std::filesystem::path& dir);

}  // namespace photofx
