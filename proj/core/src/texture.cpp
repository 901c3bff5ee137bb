#include "lsi/texture.hpp"

#include <cmath>
#include <stdexcept>

namespace lsi {

KernelSize::KernelSize(int k) : k_(k) {
    if (k < 3 || k % 2 == 0) {
        throw std::invalid_argument("kernel size must be odd and >= 3, got " +
                                    std::to_string(k));
    }
}

namespace {

void require_fits(const GrayImage& window, KernelSize kernel) {
    if (window.width() < kernel.k() || window.height() < kernel.k()) {
        throw std::invalid_argument("window " + std::to_string(window.width()) + "x" +
                                    std::to_string(window.height()) + " smaller than " +
                                    std::to_string(kernel.k()) + "x" +
                                    std::to_string(kernel.k()) + " kernel");
    }
}

struct NeighbourhoodMoments {
    double mean;
    double variance; // population
    double m3;       // third central moment
};

// Raw power sums over the k×k block; central moments via the moment
// identities. Pixel values are small integers, so the sums are exact.
NeighbourhoodMoments moments_at(const GrayImage& w, int cx, int cy, int margin) {
    double s1 = 0.0, s2 = 0.0, s3 = 0.0;
    for (int dy = -margin; dy <= margin; ++dy) {
        for (int dx = -margin; dx <= margin; ++dx) {
            const double v = w.at(cx + dx, cy + dy);
            s1 += v;
            s2 += v * v;
            s3 += v * v * v;
        }
    }
    const int k = 2 * margin + 1;
    const double area = static_cast<double>(k) * k;
    const double mean = s1 / area;
    const double variance = std::max(0.0, s2 / area - mean * mean);
    const double m3 = s3 / area - 3.0 * mean * (s2 / area) + 2.0 * mean * mean * mean;
    return {mean, variance, m3};
}

template <typename Response>
double scan_mean(const GrayImage& window, KernelSize kernel, Response&& response) {
    require_fits(window, kernel);
    const int margin = kernel.margin();
    double acc = 0.0;
    std::size_t centres = 0;
    for (int cy = margin; cy < window.height() - margin; ++cy) {
        for (int cx = margin; cx < window.width() - margin; ++cx) {
            acc += response(cx, cy);
            ++centres;
        }
    }
    return acc / static_cast<double>(centres);
}

} // namespace

double russ(const GrayImage& window, KernelSize kernel) {
    const int margin = kernel.margin();
    return scan_mean(window, kernel, [&](int cx, int cy) {
        const double centre = window.at(cx, cy);
        double ss = 0.0;
        for (int dy = -margin; dy <= margin; ++dy) {
            for (int dx = -margin; dx <= margin; ++dx) {
                if (dx == 0 && dy == 0) continue;
                const double d = centre - window.at(cx + dx, cy + dy);
                ss += d * d;
            }
        }
        return std::sqrt(ss);
    });
}

double levine(const GrayImage& window, KernelSize kernel) {
    const int margin = kernel.margin();
    return scan_mean(window, kernel, [&](int cx, int cy) {
        return moments_at(window, cx, cy, margin).variance;
    });
}

double sigma(const GrayImage& window, KernelSize kernel) {
    const int margin = kernel.margin();
    return scan_mean(window, kernel, [&](int cx, int cy) {
        return std::sqrt(moments_at(window, cx, cy, margin).variance);
    });
}

double skewness(const GrayImage& window, KernelSize kernel) {
    const int margin = kernel.margin();
    return scan_mean(window, kernel, [&](int cx, int cy) {
        const NeighbourhoodMoments m = moments_at(window, cx, cy, margin);
        if (m.variance <= 0.0) return 0.0; // flat patch carries no texture signal
        const double sd = std::sqrt(m.variance);
        return m.m3 / (sd * sd * sd);
    });
}

double std_dev(const GrayImage& window, KernelSize kernel) {
    const int margin = kernel.margin();
    return scan_mean(window, kernel, [&](int cx, int cy) {
        return std::sqrt(moments_at(window, cx, cy, margin).variance);
    });
}

std::array<double, 9> measure_window(const GrayImage& window) {
    const KernelSize k3(3), k5(5);
    if (window.width() < 5 || window.height() < 5) {
        throw std::invalid_argument("measure_window needs at least a 5x5 window, got " +
                                    std::to_string(window.width()) + "x" +
                                    std::to_string(window.height()));
    }
    return {
        russ(window, k3),  levine(window, k3), sigma(window, k3), skewness(window, k3),
        russ(window, k5),  levine(window, k5), sigma(window, k5), skewness(window, k5),
        std_dev(window, k3),
    };
}

} // namespace lsi
