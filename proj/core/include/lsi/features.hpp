#ifndef LSI_FEATURES_HPP
#define LSI_FEATURES_HPP

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "lsi/image.hpp"

namespace lsi {

/// Class labels are compared case-insensitively throughout; the canonical
/// set is "normal", "micro-collapse", "dry-layer-A", "dry-layer-B", but the
/// set is open.
bool label_equal(std::string_view a, std::string_view b);
std::string label_fold(std::string_view label);

/// One value per attribute; attribute names follow the
/// "<Measure>_<k>x<k>_<Area>" convention when produced by the pipeline.
struct FeatureVector {
    std::vector<std::string> attribute_names;
    std::vector<double> values;

    bool operator==(const FeatureVector&) const = default;
};

/// Labelled rows over a shared attribute schema.
struct Dataset {
    std::vector<std::string> attribute_names;
    std::vector<std::vector<double>> rows;
    std::vector<std::string> labels; // one per row

    std::size_t size() const { return rows.size(); }
    FeatureVector row(std::size_t i) const { return {attribute_names, rows[i]}; }

    /// Index of an attribute by exact name; throws std::invalid_argument if
    /// absent.
    std::size_t attribute_index(std::string_view name) const;

    bool operator==(const Dataset&) const = default;
};

/// Per-column centre/scale parameters (population standard deviation).
struct StandardizationParams {
    std::vector<std::string> attribute_names;
    std::vector<double> mean;
    std::vector<double> stddev;

    bool operator==(const StandardizationParams&) const = default;
};

/// Concatenates measure_window over the rois, in roi order. Attribute names
/// use the roi label, or "R<i>" (1-based) for unlabeled rois.
FeatureVector build_feature_vector(const GrayImage& img, const std::vector<Roi>& rois);

/// Column means and population stds of the dataset rows. Needs >= 2 rows.
StandardizationParams fit_standardization(const Dataset& ds);

/// (value - mean) / std per column; columns with std == 0 map to 0. Throws
/// std::invalid_argument on schema mismatch.
FeatureVector apply_standardization(const FeatureVector& v, const StandardizationParams& p);
Dataset apply_standardization(const Dataset& ds, const StandardizationParams& p);

/// CSV parse failure; `line` is 1-based.
class CsvError : public std::runtime_error {
public:
    CsvError(std::size_t line, const std::string& message)
        : std::runtime_error("line " + std::to_string(line) + ": " + message), line(line) {}
    std::size_t line;
};

/// Shortest decimal form that round-trips to the same double — the number
/// format used in every CSV this library writes.
std::string format_double(double v);

/// Comma-separated, '.' decimal point, header "label,<attr>,...". Values are
/// written in shortest round-trip form, so write/read is lossless.
Dataset read_csv(const std::filesystem::path& path);
void write_csv(const Dataset& ds, const std::filesystem::path& path);
std::string to_csv(const Dataset& ds);
Dataset parse_csv(std::string_view text);

/// The embedded 20-row sample dataset: 9 texture attributes, 10 "normal"
/// rows followed by 10 "micro-collapse" rows. The sampling area of the
/// published values is unspecified, so attribute names carry no area suffix.
Dataset sample_dataset();

} // namespace lsi

#endif // LSI_FEATURES_HPP
