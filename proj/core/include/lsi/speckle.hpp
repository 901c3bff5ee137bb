#ifndef LSI_SPECKLE_HPP
#define LSI_SPECKLE_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "lsi/image.hpp"

namespace lsi {

/// Configuration for random-phasor-sum speckle synthesis. Each pixel sums
/// n_phasors unit contributions with independent uniform phases; a
/// correlation_radius > 0 box-smooths the per-phasor phase fields before
/// summation, which grows speckle grains of roughly that scale (an artifact
/// extension for visually structured fixtures, not part of the physical
/// model).
struct PhasorFieldConfig {
    int width = 256;
    int height = 256;
    int n_phasors = 100;
    double amplitude = 1.0;
    std::uint64_t seed = 0;
    int correlation_radius = 0;
};

/// Complex field amplitude at one pixel.
struct ComplexAmplitude {
    double re = 0.0;
    double im = 0.0;
    double intensity() const { return re * re + im * im; }
};

/// (1/sqrt(N)) * sum of |I_j| * e^(i*phi_j). Throws std::invalid_argument on
/// empty or mismatched inputs.
ComplexAmplitude phasor_sum(std::span<const double> amplitudes,
                            std::span<const double> phases);

/// Real-valued intensity field prior to 8-bit quantisation.
struct SpeckleField {
    int width = 0;
    int height = 0;
    std::vector<double> intensity; // row-major, same convention as GrayImage
};

/// Synthesizes the intensity field |I_com|^2. Deterministic in (seed, cfg):
/// every pixel draws its phases from a substream derived from (seed, pixel
/// index), so the result is independent of evaluation order.
SpeckleField simulate_speckle_field(const PhasorFieldConfig& cfg);

/// Linear 8-bit quantisation: value = round(255 * I / max(I)). An all-zero
/// field maps to an all-zero image.
GrayImage quantize_field(const SpeckleField& field);

/// quantize_field(simulate_speckle_field(cfg)).
GrayImage simulate_speckle(const PhasorFieldConfig& cfg);

/// Speckle contrast sigma / mean over the region (population standard
/// deviation). Returns 0 when the mean is 0. Throws std::invalid_argument on
/// regions of fewer than 2 pixels. The quantity is reported unclamped;
/// fully developed speckle approaches 1.
double speckle_contrast(const GrayImage& img, std::optional<Roi> roi = std::nullopt);
double speckle_contrast(const SpeckleField& field);
double speckle_contrast(std::span<const double> values);

} // namespace lsi

#endif // LSI_SPECKLE_HPP
