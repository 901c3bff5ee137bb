#include "lsi/speckle.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace lsi {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t pixel_index) {
    return splitmix64(seed + (pixel_index + 1) * 0x9e3779b97f4a7c15ULL);
}

// Fixed 53-bit mapping to [0,1). std::uniform_real_distribution is
// implementation-defined, which would break pinned regression values.
double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

void validate(const PhasorFieldConfig& cfg) {
    if (cfg.width < 1 || cfg.height < 1) {
        throw std::invalid_argument("speckle field dimensions must be >= 1");
    }
    if (cfg.n_phasors < 1) {
        throw std::invalid_argument("n_phasors must be >= 1, got " +
                                    std::to_string(cfg.n_phasors));
    }
    if (cfg.amplitude < 0.0) {
        throw std::invalid_argument("amplitude must be non-negative");
    }
    if (cfg.correlation_radius < 0) {
        throw std::invalid_argument("correlation_radius must be non-negative");
    }
}

// Box filter with clamped borders, separable running-sum passes.
void box_smooth(std::vector<double>& plane, int w, int h, int radius) {
    std::vector<double> tmp(plane.size());
    for (int y = 0; y < h; ++y) {
        const double* row = &plane[static_cast<std::size_t>(y) * w];
        double* out = &tmp[static_cast<std::size_t>(y) * w];
        for (int x = 0; x < w; ++x) {
            const int x0 = std::max(0, x - radius);
            const int x1 = std::min(w - 1, x + radius);
            double s = 0.0;
            for (int i = x0; i <= x1; ++i) s += row[i];
            out[x] = s / (x1 - x0 + 1);
        }
    }
    for (int x = 0; x < w; ++x) {
        for (int y = 0; y < h; ++y) {
            const int y0 = std::max(0, y - radius);
            const int y1 = std::min(h - 1, y + radius);
            double s = 0.0;
            for (int i = y0; i <= y1; ++i) s += tmp[static_cast<std::size_t>(i) * w + x];
            plane[static_cast<std::size_t>(y) * w + x] = s / (y1 - y0 + 1);
        }
    }
}

} // namespace

ComplexAmplitude phasor_sum(std::span<const double> amplitudes,
                            std::span<const double> phases) {
    if (amplitudes.empty()) {
        throw std::invalid_argument("phasor_sum: empty input");
    }
    if (amplitudes.size() != phases.size()) {
        throw std::invalid_argument("phasor_sum: " + std::to_string(amplitudes.size()) +
                                    " amplitudes vs " + std::to_string(phases.size()) +
                                    " phases");
    }
    double re = 0.0, im = 0.0;
    for (std::size_t j = 0; j < amplitudes.size(); ++j) {
        re += amplitudes[j] * std::cos(phases[j]);
        im += amplitudes[j] * std::sin(phases[j]);
    }
    const double norm = 1.0 / std::sqrt(static_cast<double>(amplitudes.size()));
    return ComplexAmplitude{re * norm, im * norm};
}

SpeckleField simulate_speckle_field(const PhasorFieldConfig& cfg) {
    validate(cfg);
    const std::size_t n_pixels = static_cast<std::size_t>(cfg.width) * cfg.height;
    const int n = cfg.n_phasors;
    const double two_pi = 2.0 * std::numbers::pi;
    const double norm = 1.0 / static_cast<double>(n);

    SpeckleField field{cfg.width, cfg.height, std::vector<double>(n_pixels)};

    if (cfg.correlation_radius == 0) {
        for (std::size_t p = 0; p < n_pixels; ++p) {
            std::mt19937_64 rng(substream_seed(cfg.seed, p));
            double re = 0.0, im = 0.0;
            for (int j = 0; j < n; ++j) {
                const double phi = two_pi * uniform01(rng);
                re += std::cos(phi);
                im += std::sin(phi);
            }
            field.intensity[p] = cfg.amplitude * cfg.amplitude * (re * re + im * im) * norm;
        }
        return field;
    }

    // Correlated variant: the j-th phase plane is the j-th draw of every
    // pixel's substream, box-smoothed before summation. Memory is
    // n_phasors * pixels doubles, intended for fixture-scale images.
    std::vector<double> planes(static_cast<std::size_t>(n) * n_pixels);
    for (std::size_t p = 0; p < n_pixels; ++p) {
        std::mt19937_64 rng(substream_seed(cfg.seed, p));
        for (int j = 0; j < n; ++j) {
            planes[static_cast<std::size_t>(j) * n_pixels + p] = two_pi * uniform01(rng);
        }
    }
    std::vector<double> re(n_pixels, 0.0), im(n_pixels, 0.0);
    std::vector<double> plane(n_pixels);
    for (int j = 0; j < n; ++j) {
        std::copy(planes.begin() + static_cast<std::size_t>(j) * n_pixels,
                  planes.begin() + static_cast<std::size_t>(j + 1) * n_pixels, plane.begin());
        box_smooth(plane, cfg.width, cfg.height, cfg.correlation_radius);
        for (std::size_t p = 0; p < n_pixels; ++p) {
            re[p] += std::cos(plane[p]);
            im[p] += std::sin(plane[p]);
        }
    }
    for (std::size_t p = 0; p < n_pixels; ++p) {
        field.intensity[p] = cfg.amplitude * cfg.amplitude * (re[p] * re[p] + im[p] * im[p]) * norm;
    }
    return field;
}

GrayImage quantize_field(const SpeckleField& field) {
    double peak = 0.0;
    for (double v : field.intensity) peak = std::max(peak, v);
    GrayImage img(field.width, field.height);
    if (peak <= 0.0) return img;
    auto out = img.pixels();
    for (std::size_t p = 0; p < field.intensity.size(); ++p) {
        out[p] = static_cast<std::uint8_t>(std::lround(255.0 * field.intensity[p] / peak));
    }
    return img;
}

GrayImage simulate_speckle(const PhasorFieldConfig& cfg) {
    return quantize_field(simulate_speckle_field(cfg));
}

double speckle_contrast(std::span<const double> values) {
    if (values.size() < 2) {
        throw std::invalid_argument("speckle_contrast: region must have >= 2 pixels, got " +
                                    std::to_string(values.size()));
    }
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    if (mean == 0.0) return 0.0;
    double ss = 0.0;
    for (double v : values) {
        const double d = v - mean;
        ss += d * d;
    }
    const double sigma = std::sqrt(ss / static_cast<double>(values.size()));
    return sigma / mean;
}

double speckle_contrast(const SpeckleField& field) {
    return speckle_contrast(std::span<const double>(field.intensity));
}

double speckle_contrast(const GrayImage& img, std::optional<Roi> roi) {
    std::vector<double> values;
    if (roi) {
        const GrayImage window = extract_window(img, *roi);
        values.assign(window.pixels().begin(), window.pixels().end());
    } else {
        values.assign(img.pixels().begin(), img.pixels().end());
    }
    return speckle_contrast(std::span<const double>(values));
}

} // namespace lsi
