#include "lsi/monitor.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lsi {

double TrendModel::evaluate(double t) const {
    double acc = 0.0;
    for (std::size_t k = coefficients.size(); k-- > 0;) acc = acc * t + coefficients[k];
    return acc;
}

// ---------------------------------------------------------------------------
// Polynomial trend fit
// ---------------------------------------------------------------------------

namespace {

// Solves the symmetric positive-definite system in place by Gaussian
// elimination with partial pivoting; m is small (degree + 1).
std::vector<double> solve_dense(std::vector<double> a, std::vector<double> b, std::size_t m) {
    for (std::size_t col = 0; col < m; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < m; ++r) {
            if (std::abs(a[r * m + col]) > std::abs(a[pivot * m + col])) pivot = r;
        }
        if (a[pivot * m + col] == 0.0) {
            throw std::runtime_error("polynomial fit: singular normal equations");
        }
        if (pivot != col) {
            for (std::size_t c = 0; c < m; ++c) std::swap(a[col * m + c], a[pivot * m + c]);
            std::swap(b[col], b[pivot]);
        }
        for (std::size_t r = col + 1; r < m; ++r) {
            const double f = a[r * m + col] / a[col * m + col];
            if (f == 0.0) continue;
            for (std::size_t c = col; c < m; ++c) a[r * m + c] -= f * a[col * m + c];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(m);
    for (std::size_t row = m; row-- > 0;) {
        double acc = b[row];
        for (std::size_t c = row + 1; c < m; ++c) acc -= a[row * m + c] * x[c];
        x[row] = acc / a[row * m + row];
    }
    return x;
}

} // namespace

TrendModel fit_polynomial_trend(std::span<const std::pair<double, double>> series, int degree,
                                std::string attribute) {
    if (degree < 0) {
        throw std::invalid_argument("polynomial degree must be >= 0, got " +
                                    std::to_string(degree));
    }
    const std::size_t m = static_cast<std::size_t>(degree) + 1;
    if (series.size() < m) {
        throw std::invalid_argument("degree-" + std::to_string(degree) + " fit needs >= " +
                                    std::to_string(m) + " points, got " +
                                    std::to_string(series.size()));
    }
    std::vector<std::pair<double, double>> pts(series.begin(), series.end());
    std::sort(pts.begin(), pts.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t i = 1; i < pts.size(); ++i) {
        if (pts[i].first == pts[i - 1].first) {
            throw std::invalid_argument("duplicate timestamp " + std::to_string(pts[i].first) +
                                        " in trend series");
        }
    }

    TrendModel model;
    model.degree = degree;
    model.attribute = std::move(attribute);
    model.t_min = pts.front().first;
    model.t_max = pts.back().first;

    // Rescale timestamps to u = alpha*t + beta in [-1, 1] before forming the
    // normal equations; a raw Vandermonde over wide timestamp ranges is too
    // ill-conditioned at degree 6.
    const double span_t = model.t_max - model.t_min;
    const double alpha = span_t > 0.0 ? 2.0 / span_t : 1.0;
    const double beta = span_t > 0.0 ? -(model.t_min + model.t_max) / span_t : -model.t_min;

    std::vector<double> ata(m * m, 0.0);
    std::vector<double> aty(m, 0.0);
    std::vector<double> powers(m);
    for (const auto& [t, y] : pts) {
        const double u = alpha * t + beta;
        powers[0] = 1.0;
        for (std::size_t k = 1; k < m; ++k) powers[k] = powers[k - 1] * u;
        for (std::size_t r = 0; r < m; ++r) {
            for (std::size_t c = 0; c < m; ++c) ata[r * m + c] += powers[r] * powers[c];
            aty[r] += powers[r] * y;
        }
    }
    const std::vector<double> coeff_u = solve_dense(std::move(ata), std::move(aty), m);

    double ss = 0.0;
    for (const auto& [t, y] : pts) {
        const double u = alpha * t + beta;
        double p = 0.0;
        for (std::size_t k = m; k-- > 0;) p = p * u + coeff_u[k];
        const double r = p - y;
        ss += r * r;
    }
    model.residual_rms = std::sqrt(ss / static_cast<double>(pts.size()));

    // Expand a_k (alpha*t + beta)^k back to original-coordinate coefficients.
    std::vector<std::vector<double>> binom(m, std::vector<double>(m, 0.0));
    for (std::size_t k = 0; k < m; ++k) {
        binom[k][0] = 1.0;
        for (std::size_t j = 1; j <= k; ++j) {
            binom[k][j] = binom[k - 1][j - 1] + (j < k ? binom[k - 1][j] : 0.0);
        }
    }
    model.coefficients.assign(m, 0.0);
    for (std::size_t k = 0; k < m; ++k) {
        double beta_pow = 1.0; // beta^(k-j), built from j = k downwards
        for (std::size_t j = k + 1; j-- > 0;) {
            model.coefficients[j] += coeff_u[k] * binom[k][j] * std::pow(alpha, static_cast<double>(j)) * beta_pow;
            beta_pow *= beta;
        }
    }
    return model;
}

// ---------------------------------------------------------------------------
// Detection loop
// ---------------------------------------------------------------------------

DetectionLoopResult run_detection_loop(const std::vector<FrameSample>& stream,
                                       const AnyModel& classifier, const std::vector<Roi>& rois,
                                       int debounce) {
    if (stream.empty()) {
        throw std::invalid_argument("detection loop: empty stream");
    }
    if (debounce < 1) {
        throw std::invalid_argument("debounce must be >= 1, got " + std::to_string(debounce));
    }
    for (std::size_t i = 1; i < stream.size(); ++i) {
        if (stream[i].index <= stream[i - 1].index) {
            throw std::invalid_argument("frame indices must be strictly increasing (position " +
                                        std::to_string(i) + ")");
        }
        if (stream[i].timestamp < stream[i - 1].timestamp) {
            throw std::invalid_argument("frame timestamps must be non-decreasing (position " +
                                        std::to_string(i) + ")");
        }
    }

    const std::vector<std::string>& schema = model_schema(classifier);
    const std::size_t n = stream.size();
    DetectionLoopResult out;
    out.labels.reserve(n);
    std::vector<double> confidence(n);

    for (std::size_t i = 0; i < n; ++i) {
        FeatureVector v;
        if (const auto* path = std::get_if<std::filesystem::path>(&stream[i].source)) {
            if (rois.empty()) {
                throw std::invalid_argument("frame " + std::to_string(stream[i].index) +
                                            " is image-sourced but no rois were given");
            }
            v = build_feature_vector(load_image(*path), rois);
        } else {
            v = std::get<FeatureVector>(stream[i].source);
        }
        if (v.attribute_names != schema) {
            throw std::invalid_argument("frame " + std::to_string(stream[i].index) +
                                        ": feature schema does not match the model");
        }
        const Prediction p = predict(classifier, v);
        out.labels.push_back(p.label);
        confidence[i] = p.confidence;
    }

    const std::size_t m = static_cast<std::size_t>(debounce);
    std::string committed = out.labels[0];
    for (std::size_t i = 1; i + m <= n; ++i) {
        bool confirmed = true;
        for (std::size_t j = i; j < i + m; ++j) {
            if (label_equal(out.labels[j], committed)) {
                confirmed = false;
                break;
            }
        }
        if (confirmed) {
            out.events.push_back({stream[i].index, stream[i].timestamp, committed, out.labels[i],
                                  confidence[i]});
            committed = out.labels[i];
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Trend threshold crossing
// ---------------------------------------------------------------------------

std::optional<double> locate_transition_from_trend(const TrendModel& t, double threshold) {
    if (t.coefficients.empty()) {
        throw std::invalid_argument("locate_transition_from_trend: unfitted model");
    }
    if (!(t.t_max > t.t_min)) return std::nullopt;

    constexpr int kGrid = 4096;
    double prev_t = t.t_min;
    double prev_v = t.evaluate(prev_t);
    for (int j = 1; j <= kGrid; ++j) {
        const double cur_t = t.t_min + (t.t_max - t.t_min) * j / kGrid;
        const double cur_v = t.evaluate(cur_t);
        if (prev_v > threshold && cur_v <= threshold) {
            double lo = prev_t; // stays above the threshold
            double hi = cur_t;  // stays at or below it
            for (int it = 0; it < 100; ++it) {
                const double mid = 0.5 * (lo + hi);
                (t.evaluate(mid) > threshold ? lo : hi) = mid;
            }
            return 0.5 * (lo + hi);
        }
        prev_t = cur_t;
        prev_v = cur_v;
    }
    return std::nullopt;
}

double class_mean_midpoint(const Dataset& ds, std::string_view attribute) {
    const std::size_t a = ds.attribute_index(attribute);
    std::vector<std::string> folded;
    std::vector<double> sum;
    std::vector<std::size_t> count;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const std::string f = label_fold(ds.labels[i]);
        std::size_t c = 0;
        while (c < folded.size() && folded[c] != f) ++c;
        if (c == folded.size()) {
            folded.push_back(f);
            sum.push_back(0.0);
            count.push_back(0);
        }
        sum[c] += ds.rows[i][a];
        ++count[c];
    }
    if (folded.size() != 2) {
        throw std::invalid_argument("class_mean_midpoint needs exactly 2 classes, got " +
                                    std::to_string(folded.size()));
    }
    return 0.5 * (sum[0] / count[0] + sum[1] / count[1]);
}

} // namespace lsi
