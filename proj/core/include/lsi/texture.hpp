#ifndef LSI_TEXTURE_HPP
#define LSI_TEXTURE_HPP

#include <array>
#include <string_view>

#include "lsi/image.hpp"

namespace lsi {

/// Odd square kernel edge length, k >= 3. The standard attribute layout uses
/// 3 and 5.
class KernelSize {
public:
    explicit KernelSize(int k);
    int k() const { return k_; }
    int margin() const { return k_ / 2; }

private:
    int k_;
};

// Every operator scans all centre positions whose k×k neighbourhood lies
// fully inside the window (a margin of k/2 pixels is excluded) and returns
// the arithmetic mean of the per-centre responses, accumulated in row-major
// centre order. Statistics use population denominators (divide by n).

/// Per centre: sqrt of the summed squared differences between the centre
/// pixel and its k²−1 neighbours.
double russ(const GrayImage& window, KernelSize kernel);

/// Per centre: population variance of the k² neighbourhood pixels.
double levine(const GrayImage& window, KernelSize kernel);

/// Per centre: sqrt of the levine response (mean of roots, not root of
/// the mean).
double sigma(const GrayImage& window, KernelSize kernel);

/// Per centre: third standardized moment of the neighbourhood; centres with
/// zero spread contribute 0.
double skewness(const GrayImage& window, KernelSize kernel);

/// Per centre: population standard deviation of the k² neighbourhood pixels.
double std_dev(const GrayImage& window, KernelSize kernel);

/// Attribute layout shared by the feature pipeline and the sample dataset.
inline constexpr std::array<std::string_view, 9> kMeasureNames = {
    "Russ_3x3",  "Levine_3x3", "Sigma_3x3", "Skewness_3x3", "Russ_5x5",
    "Levine_5x5", "Sigma_5x5", "Skewness_5x5", "StdDev_3x3",
};

/// The nine measures in kMeasureNames order. Window must be at least 5×5.
std::array<double, 9> measure_window(const GrayImage& window);

} // namespace lsi

#endif // LSI_TEXTURE_HPP
