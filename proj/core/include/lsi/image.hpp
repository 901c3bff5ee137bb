#ifndef LSI_IMAGE_HPP
#define LSI_IMAGE_HPP

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace lsi {

/// 2-D 8-bit grayscale intensity field, row-major, origin at the top-left
/// pixel. Coordinate convention used everywhere in this library:
/// at(x, y) == pixels[y * width + x], with x growing rightwards and y
/// growing downwards.
class GrayImage {
public:
    GrayImage(int width, int height, std::uint8_t fill = 0);
    GrayImage(int width, int height, std::vector<std::uint8_t> pixels);

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t pixel_count() const { return pixels_.size(); }

    std::uint8_t at(int x, int y) const {
        return pixels_[static_cast<std::size_t>(y) * width_ + x];
    }
    std::uint8_t& at(int x, int y) {
        return pixels_[static_cast<std::size_t>(y) * width_ + x];
    }

    std::span<const std::uint8_t> pixels() const { return pixels_; }
    std::span<std::uint8_t> pixels() { return pixels_; }

    bool operator==(const GrayImage&) const = default;

private:
    int width_;
    int height_;
    std::vector<std::uint8_t> pixels_;
};

/// Rectangular region of interest. (x, y) is the top-left corner, 0-based.
/// The label is free-form; the sampling convention uses "A", "B", "C" for
/// the laser diffusion bands. An empty label means unlabeled.
struct Roi {
    int x = 0;
    int y = 0;
    int w = 0;
    int h = 0;
    std::string label;

    bool fits_within(const GrayImage& img) const {
        return x >= 0 && y >= 0 && w >= 1 && h >= 1 &&
               x + w <= img.width() && y + h <= img.height();
    }
    bool operator==(const Roi&) const = default;
};

/// Parses "x,y,w,h" or "x,y,w,h:label". Throws std::invalid_argument on
/// malformed input.
Roi parse_roi(const std::string& spec);

/// Errors raised by the image readers. `kind` identifies the failing field,
/// `offset` the byte position in the file where parsing stopped.
class ImageIoError : public std::runtime_error {
public:
    enum class Kind {
        OpenFailed,
        BadMagic,
        MalformedHeader,
        BadMaxval,
        TruncatedPayload,
        UnsupportedPng,
        WriteFailed,
    };

    ImageIoError(Kind kind, std::size_t offset, const std::string& message)
        : std::runtime_error(message), kind(kind), offset(offset) {}

    Kind kind;
    std::size_t offset;
};

/// Reads a binary PGM (P5, maxval 255) image. 8-bit grayscale non-interlaced
/// PNG is accepted as a convenience; PGM is the canonical format.
GrayImage load_image(const std::filesystem::path& path);

/// Writes the canonical byte-exact P5 encoding: "P5\n<w> <h>\n255\n" followed
/// by the row-major payload. load_image(save_image(img)) == img.
void save_image(const GrayImage& img, const std::filesystem::path& path);

/// In-memory counterparts of load_image/save_image (PGM only).
GrayImage decode_pgm(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode_pgm(const GrayImage& img);

/// Copies the w×h sub-image under `roi`. Throws std::out_of_range when the
/// roi does not fit inside the image.
GrayImage extract_window(const GrayImage& img, const Roi& roi);

/// Best-effort automated sampling. Splits the pixel intensity histogram into
/// `band_count` equal-frequency bands, drops the brightest band (specular
/// core), and for each remaining band picks the roi_size×roi_size window
/// whose mean intensity is closest to the band's centre intensity (midpoint
/// of the band's observed value range). Candidate windows containing the
/// image's brightest pixel (first in row-major order on ties) are skipped.
///
/// Returned rois are ordered brightest band first and labeled "A", "B", ...
/// A constant image, or band_count == 1, yields an empty list. Manual roi
/// placement remains the primary sampling path.
std::vector<Roi> suggest_rois(const GrayImage& img, int band_count, int roi_size);

} // namespace lsi

#endif // LSI_IMAGE_HPP
