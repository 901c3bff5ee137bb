#ifndef LSI_MONITOR_HPP
#define LSI_MONITOR_HPP

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "lsi/classify.hpp"
#include "lsi/features.hpp"
#include "lsi/image.hpp"

namespace lsi {

/// One frame of an ordered acquisition stream. The source is either an image
/// on disk (features are extracted inside the loop) or a pre-extracted
/// feature vector (lets the loop run without any image corpus).
struct FrameSample {
    std::size_t index = 0;  // strictly increasing across a stream
    double timestamp = 0.0; // seconds since run start, non-decreasing
    std::variant<std::filesystem::path, FeatureVector> source;
};

/// A committed state change found by the debounced detection loop.
struct DetectionEvent {
    std::size_t frame = 0; // FrameSample::index of the first confirming frame
    double timestamp = 0.0;
    std::string from_state;
    std::string to_state;
    double confidence = 0.0; // posterior / vote fraction at the event frame

    bool operator==(const DetectionEvent&) const = default;
};

/// Least-squares polynomial over a (timestamp, value) series. Coefficients
/// are in original timestamp coordinates, ascending degree; the fit itself
/// runs on timestamps rescaled to [-1, 1] for conditioning, and
/// `residual_rms` is the root-mean-square residual of that fit.
struct TrendModel {
    std::vector<double> coefficients; // size degree + 1
    int degree = 0;
    std::string attribute; // name of the fitted texture measure, may be empty
    double residual_rms = 0.0;
    double t_min = 0.0; // fitted timestamp range
    double t_max = 0.0;

    double evaluate(double t) const;
};

/// Fits a degree-d polynomial by least squares (normal equations on the
/// rescaled axis). Exact interpolation when the series has exactly d + 1
/// points. Throws std::invalid_argument on fewer than d + 1 points or
/// duplicate timestamps.
TrendModel fit_polynomial_trend(std::span<const std::pair<double, double>> series, int degree,
                                std::string attribute = {});

struct DetectionLoopResult {
    std::vector<std::string> labels; // exactly one per input frame
    std::vector<DetectionEvent> events;
};

/// Classifies every frame in index order and emits a DetectionEvent at frame
/// position i when frames i..i+m-1 all carry a label different from the
/// committed state; the committed state then becomes the label of frame i.
/// The initial committed state is the label of frame 0, so the first m
/// frames of a run can confirm at most one change starting at position 1.
///
/// `rois` feeds feature extraction for image-sourced frames and is ignored
/// for vector-sourced ones. Throws std::invalid_argument on an empty stream,
/// debounce < 1, out-of-order frames, or a frame whose feature schema does
/// not match the model.
DetectionLoopResult run_detection_loop(const std::vector<FrameSample>& stream,
                                       const AnyModel& classifier, const std::vector<Roi>& rois,
                                       int debounce);

/// Earliest timestamp in [t_min, t_max] where the fitted polynomial crosses
/// `threshold` coming from above (grid scan plus bisection); std::nullopt
/// when no such crossing exists. Throws std::invalid_argument on an
/// unfitted model.
std::optional<double> locate_transition_from_trend(const TrendModel& t, double threshold);

/// Midpoint of the two per-class means of one attribute — the default trend
/// threshold. Throws std::invalid_argument unless the dataset holds exactly
/// two classes.
double class_mean_midpoint(const Dataset& ds, std::string_view attribute);

} // namespace lsi

#endif // LSI_MONITOR_HPP
