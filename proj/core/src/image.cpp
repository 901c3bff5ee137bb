#include "lsi/image.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

#include <zlib.h>

namespace lsi {

namespace {

std::string invalid_dims_msg(int w, int h) {
    return "invalid image dimensions " + std::to_string(w) + "x" + std::to_string(h);
}

} // namespace

GrayImage::GrayImage(int width, int height, std::uint8_t fill)
    : width_(width), height_(height) {
    if (width < 1 || height < 1) {
        throw std::invalid_argument(invalid_dims_msg(width, height));
    }
    pixels_.assign(static_cast<std::size_t>(width) * height, fill);
}

GrayImage::GrayImage(int width, int height, std::vector<std::uint8_t> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
    if (width < 1 || height < 1) {
        throw std::invalid_argument(invalid_dims_msg(width, height));
    }
    if (pixels_.size() != static_cast<std::size_t>(width) * height) {
        throw std::invalid_argument(
            "pixel buffer size " + std::to_string(pixels_.size()) +
            " does not match " + std::to_string(width) + "x" + std::to_string(height));
    }
}

Roi parse_roi(const std::string& spec) {
    std::string geometry = spec;
    std::string label;
    if (auto colon = spec.find(':'); colon != std::string::npos) {
        geometry = spec.substr(0, colon);
        label = spec.substr(colon + 1);
        if (label.empty()) {
            throw std::invalid_argument("roi \"" + spec + "\": empty label after ':'");
        }
    }
    int fields[4];
    const char* p = geometry.data();
    const char* end = geometry.data() + geometry.size();
    for (int i = 0; i < 4; ++i) {
        auto [next, ec] = std::from_chars(p, end, fields[i]);
        if (ec != std::errc()) {
            throw std::invalid_argument("roi \"" + spec + "\": expected integer at field " +
                                        std::to_string(i + 1));
        }
        p = next;
        if (i < 3) {
            if (p == end || *p != ',') {
                throw std::invalid_argument("roi \"" + spec + "\": expected ',' after field " +
                                            std::to_string(i + 1));
            }
            ++p;
        }
    }
    if (p != end) {
        throw std::invalid_argument("roi \"" + spec + "\": trailing characters");
    }
    return Roi{fields[0], fields[1], fields[2], fields[3], label};
}

// ---------------------------------------------------------------------------
// PGM (P5)
// ---------------------------------------------------------------------------

namespace {

// Whitespace/comment-skipping integer scanner over the PGM header.
struct PgmScanner {
    std::span<const std::uint8_t> bytes;
    std::size_t pos = 0;

    void skip_space_and_comments() {
        while (pos < bytes.size()) {
            const std::uint8_t c = bytes[pos];
            if (c == '#') {
                while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
            } else if (std::isspace(c)) {
                ++pos;
            } else {
                break;
            }
        }
    }

    int read_int(const char* field) {
        skip_space_and_comments();
        const std::size_t start = pos;
        long value = 0;
        while (pos < bytes.size() && std::isdigit(bytes[pos])) {
            value = value * 10 + (bytes[pos] - '0');
            if (value > std::numeric_limits<int>::max()) {
                throw ImageIoError(ImageIoError::Kind::MalformedHeader, start,
                                   std::string("PGM header field '") + field + "' out of range");
            }
            ++pos;
        }
        if (pos == start) {
            throw ImageIoError(ImageIoError::Kind::MalformedHeader, pos,
                               std::string("PGM header: expected integer for field '") + field +
                                   "' at byte offset " + std::to_string(pos));
        }
        return static_cast<int>(value);
    }
};

} // namespace

GrayImage decode_pgm(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') {
        throw ImageIoError(ImageIoError::Kind::BadMagic, 0,
                           "not a binary PGM: missing 'P5' magic at offset 0");
    }
    PgmScanner scan{bytes, 2};
    const int width = scan.read_int("width");
    const int height = scan.read_int("height");
    const std::size_t maxval_offset = scan.pos;
    const int maxval = scan.read_int("maxval");
    if (maxval != 255) {
        throw ImageIoError(ImageIoError::Kind::BadMaxval, maxval_offset,
                           "PGM maxval must be 255, got " + std::to_string(maxval));
    }
    if (width < 1 || height < 1) {
        throw ImageIoError(ImageIoError::Kind::MalformedHeader, 2,
                           "PGM header: " + invalid_dims_msg(width, height));
    }
    if (scan.pos >= bytes.size() || !std::isspace(bytes[scan.pos])) {
        throw ImageIoError(ImageIoError::Kind::MalformedHeader, scan.pos,
                           "PGM header: expected single whitespace before payload at byte offset " +
                               std::to_string(scan.pos));
    }
    const std::size_t payload_start = scan.pos + 1;
    const std::size_t expected = static_cast<std::size_t>(width) * height;
    const std::size_t available = bytes.size() - payload_start;
    if (available < expected) {
        throw ImageIoError(ImageIoError::Kind::TruncatedPayload, payload_start + available,
                           "PGM payload truncated: expected " + std::to_string(expected) +
                               " bytes, got " + std::to_string(available));
    }
    std::vector<std::uint8_t> pixels(bytes.begin() + payload_start,
                                     bytes.begin() + payload_start + expected);
    return GrayImage(width, height, std::move(pixels));
}

std::vector<std::uint8_t> encode_pgm(const GrayImage& img) {
    std::string header = "P5\n" + std::to_string(img.width()) + " " +
                         std::to_string(img.height()) + "\n255\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    out.insert(out.end(), img.pixels().begin(), img.pixels().end());
    return out;
}

// ---------------------------------------------------------------------------
// PNG (8-bit grayscale, non-interlaced) convenience reader
// ---------------------------------------------------------------------------

namespace {

constexpr std::uint8_t kPngSignature[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};

std::uint32_t read_be32(const std::uint8_t* p) {
    return (std::uint32_t(p[0]) << 24) | (std::uint32_t(p[1]) << 16) |
           (std::uint32_t(p[2]) << 8) | std::uint32_t(p[3]);
}

std::vector<std::uint8_t> zlib_inflate(std::span<const std::uint8_t> in,
                                       std::size_t expected_size) {
    std::vector<std::uint8_t> out(expected_size);
    z_stream zs{};
    if (inflateInit(&zs) != Z_OK) {
        throw ImageIoError(ImageIoError::Kind::UnsupportedPng, 0, "zlib init failed");
    }
    zs.next_in = const_cast<Bytef*>(in.data());
    zs.avail_in = static_cast<uInt>(in.size());
    zs.next_out = out.data();
    zs.avail_out = static_cast<uInt>(out.size());
    const int rc = inflate(&zs, Z_FINISH);
    inflateEnd(&zs);
    if (rc != Z_STREAM_END || zs.total_out != expected_size) {
        throw ImageIoError(ImageIoError::Kind::TruncatedPayload, 0,
                           "PNG image data truncated or corrupt: inflated " +
                               std::to_string(zs.total_out) + " of " +
                               std::to_string(expected_size) + " bytes");
    }
    return out;
}

// Scanline unfiltering for one byte per pixel. CRC fields are not verified.
GrayImage decode_png(std::span<const std::uint8_t> bytes) {
    std::size_t pos = 8;
    int width = 0, height = 0;
    bool seen_ihdr = false;
    std::vector<std::uint8_t> idat;

    while (pos + 8 <= bytes.size()) {
        const std::uint32_t length = read_be32(&bytes[pos]);
        if (pos + 12 + length > bytes.size()) {
            throw ImageIoError(ImageIoError::Kind::TruncatedPayload, pos,
                               "PNG chunk at offset " + std::to_string(pos) +
                                   " extends past end of file");
        }
        const char* type = reinterpret_cast<const char*>(&bytes[pos + 4]);
        const std::uint8_t* data = &bytes[pos + 8];
        if (std::memcmp(type, "IHDR", 4) == 0) {
            if (length != 13) {
                throw ImageIoError(ImageIoError::Kind::MalformedHeader, pos,
                                   "PNG IHDR chunk has wrong length");
            }
            width = static_cast<int>(read_be32(data));
            height = static_cast<int>(read_be32(data + 4));
            const int bit_depth = data[8];
            const int colour_type = data[9];
            const int interlace = data[12];
            if (bit_depth != 8 || colour_type != 0 || interlace != 0) {
                throw ImageIoError(ImageIoError::Kind::UnsupportedPng, pos,
                                   "PNG must be 8-bit grayscale non-interlaced (bit depth " +
                                       std::to_string(bit_depth) + ", colour type " +
                                       std::to_string(colour_type) + ")");
            }
            seen_ihdr = true;
        } else if (std::memcmp(type, "IDAT", 4) == 0) {
            idat.insert(idat.end(), data, data + length);
        } else if (std::memcmp(type, "IEND", 4) == 0) {
            break;
        }
        pos += 12 + length;
    }
    if (!seen_ihdr) {
        throw ImageIoError(ImageIoError::Kind::MalformedHeader, 8, "PNG is missing IHDR");
    }
    if (width < 1 || height < 1) {
        throw ImageIoError(ImageIoError::Kind::MalformedHeader, 8,
                           "PNG header: " + invalid_dims_msg(width, height));
    }

    const std::size_t stride = static_cast<std::size_t>(width) + 1;
    const std::vector<std::uint8_t> raw = zlib_inflate(idat, stride * height);

    std::vector<std::uint8_t> pixels(static_cast<std::size_t>(width) * height);
    for (int y = 0; y < height; ++y) {
        const std::uint8_t filter = raw[y * stride];
        const std::uint8_t* src = &raw[y * stride + 1];
        std::uint8_t* dst = &pixels[static_cast<std::size_t>(y) * width];
        const std::uint8_t* up = y > 0 ? dst - width : nullptr;
        for (int x = 0; x < width; ++x) {
            const int left = x > 0 ? dst[x - 1] : 0;
            const int above = up ? up[x] : 0;
            const int upleft = (up && x > 0) ? up[x - 1] : 0;
            int value = src[x];
            switch (filter) {
                case 0: break;
                case 1: value += left; break;
                case 2: value += above; break;
                case 3: value += (left + above) / 2; break;
                case 4: {
                    const int p = left + above - upleft;
                    const int pa = std::abs(p - left);
                    const int pb = std::abs(p - above);
                    const int pc = std::abs(p - upleft);
                    value += (pa <= pb && pa <= pc) ? left : (pb <= pc ? above : upleft);
                    break;
                }
                default:
                    throw ImageIoError(ImageIoError::Kind::UnsupportedPng, 0,
                                       "PNG scanline " + std::to_string(y) +
                                           " uses unknown filter " + std::to_string(filter));
            }
            dst[x] = static_cast<std::uint8_t>(value & 0xff);
        }
    }
    return GrayImage(width, height, std::move(pixels));
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ImageIoError(ImageIoError::Kind::OpenFailed, 0,
                           "cannot open image file: " + path.string());
    }
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return bytes;
}

} // namespace

GrayImage load_image(const std::filesystem::path& path) {
    const std::vector<std::uint8_t> bytes = read_file(path);
    if (bytes.size() >= 8 && std::memcmp(bytes.data(), kPngSignature, 8) == 0) {
        return decode_png(bytes);
    }
    return decode_pgm(bytes);
}

void save_image(const GrayImage& img, const std::filesystem::path& path) {
    const std::vector<std::uint8_t> bytes = encode_pgm(img);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw ImageIoError(ImageIoError::Kind::WriteFailed, 0,
                           "cannot open for writing: " + path.string());
    }
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw ImageIoError(ImageIoError::Kind::WriteFailed, 0,
                           "write failed: " + path.string());
    }
}

GrayImage extract_window(const GrayImage& img, const Roi& roi) {
    if (!roi.fits_within(img)) {
        throw std::out_of_range("roi " + std::to_string(roi.x) + "," + std::to_string(roi.y) +
                                "," + std::to_string(roi.w) + "," + std::to_string(roi.h) +
                                " does not fit inside " + std::to_string(img.width()) + "x" +
                                std::to_string(img.height()) + " image");
    }
    std::vector<std::uint8_t> pixels(static_cast<std::size_t>(roi.w) * roi.h);
    for (int y = 0; y < roi.h; ++y) {
        const std::uint8_t* src = &img.pixels()[static_cast<std::size_t>(roi.y + y) * img.width() + roi.x];
        std::copy(src, src + roi.w, &pixels[static_cast<std::size_t>(y) * roi.w]);
    }
    return GrayImage(roi.w, roi.h, std::move(pixels));
}

// ---------------------------------------------------------------------------
// suggest_rois
// ---------------------------------------------------------------------------

namespace {

// Equal-frequency cut-points over the pixel intensity multiset, computed from
// the 256-bin histogram. Cut j sits midway between the values straddling rank
// n*j/band_count; duplicate cuts collapse.
std::vector<double> intensity_band_cuts(const std::array<std::size_t, 256>& hist,
                                        std::size_t n, int band_count) {
    std::vector<double> cuts;
    auto value_at_rank = [&](std::size_t rank) {
        std::size_t cum = 0;
        for (int v = 0; v < 256; ++v) {
            cum += hist[v];
            if (cum > rank) return v;
        }
        return 255;
    };
    for (int j = 1; j < band_count; ++j) {
        const std::size_t r = n * static_cast<std::size_t>(j) / band_count;
        if (r < 1 || r > n - 1) continue;
        const double c = 0.5 * (value_at_rank(r - 1) + value_at_rank(r));
        if (cuts.empty() || c > cuts.back()) cuts.push_back(c);
    }
    return cuts;
}

} // namespace

std::vector<Roi> suggest_rois(const GrayImage& img, int band_count, int roi_size) {
    if (band_count < 1) {
        throw std::invalid_argument("band_count must be >= 1, got " + std::to_string(band_count));
    }
    if (roi_size < 1 || roi_size > img.width() || roi_size > img.height()) {
        throw std::invalid_argument("image " + std::to_string(img.width()) + "x" +
                                    std::to_string(img.height()) + " too small for roi size " +
                                    std::to_string(roi_size));
    }

    std::array<std::size_t, 256> hist{};
    for (std::uint8_t p : img.pixels()) ++hist[p];
    const std::size_t n = img.pixel_count();

    int min_value = 0, max_value = 255;
    while (hist[min_value] == 0) ++min_value;
    while (hist[max_value] == 0) --max_value;
    if (min_value == max_value) return {}; // degenerate histogram

    const std::vector<double> cuts = intensity_band_cuts(hist, n, band_count);
    const int n_bands = static_cast<int>(cuts.size()) + 1;
    if (n_bands < 2) return {}; // only the (excluded) brightest band exists

    auto band_of = [&](int value) {
        int b = 0;
        for (double c : cuts) {
            if (c <= value) ++b;
        }
        return b;
    };

    // Observed value range per band; its midpoint is the band centre.
    std::vector<int> lo(n_bands, 256), hi(n_bands, -1);
    for (int v = min_value; v <= max_value; ++v) {
        if (hist[v] == 0) continue;
        const int b = band_of(v);
        lo[b] = std::min(lo[b], v);
        hi[b] = std::max(hi[b], v);
    }

    // First brightest pixel in row-major order; no returned roi may cover it.
    int apex_x = 0, apex_y = 0;
    {
        const auto px = img.pixels();
        const std::size_t idx = static_cast<std::size_t>(
            std::find(px.begin(), px.end(), static_cast<std::uint8_t>(max_value)) - px.begin());
        apex_x = static_cast<int>(idx % img.width());
        apex_y = static_cast<int>(idx / img.width());
    }

    // Summed-area table for O(1) window means.
    const int w = img.width(), h = img.height();
    std::vector<std::uint64_t> sat(static_cast<std::size_t>(w + 1) * (h + 1), 0);
    for (int y = 0; y < h; ++y) {
        std::uint64_t row = 0;
        for (int x = 0; x < w; ++x) {
            row += img.at(x, y);
            sat[static_cast<std::size_t>(y + 1) * (w + 1) + (x + 1)] =
                sat[static_cast<std::size_t>(y) * (w + 1) + (x + 1)] + row;
        }
    }
    const double area = static_cast<double>(roi_size) * roi_size;
    auto window_mean = [&](int x, int y) {
        const std::size_t x0 = x, y0 = y, x1 = x + roi_size, y1 = y + roi_size;
        const std::uint64_t s = sat[y1 * (w + 1) + x1] - sat[y0 * (w + 1) + x1] -
                                sat[y1 * (w + 1) + x0] + sat[y0 * (w + 1) + x0];
        return static_cast<double>(s) / area;
    };

    std::vector<Roi> rois;
    for (int b = n_bands - 2; b >= 0; --b) { // brightest remaining band first
        if (hi[b] < 0) continue;             // band emptied by cut collapsing
        const double centre = 0.5 * (lo[b] + hi[b]);
        double best = std::numeric_limits<double>::infinity();
        int best_x = -1, best_y = -1;
        for (int y = 0; y + roi_size <= h; ++y) {
            const bool covers_apex_row = apex_y >= y && apex_y < y + roi_size;
            for (int x = 0; x + roi_size <= w; ++x) {
                if (covers_apex_row && apex_x >= x && apex_x < x + roi_size) continue;
                const double d = std::abs(window_mean(x, y) - centre);
                if (d < best) {
                    best = d;
                    best_x = x;
                    best_y = y;
                }
            }
        }
        if (best_x >= 0) {
            const char label = static_cast<char>('A' + static_cast<int>(rois.size()));
            rois.push_back(Roi{best_x, best_y, roi_size, roi_size, std::string(1, label)});
        }
    }
    return rois;
}

} // namespace lsi
