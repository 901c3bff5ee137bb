#ifndef LSI_CLASSIFY_HPP
#define LSI_CLASSIFY_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "lsi/features.hpp"

namespace lsi {

/// Per-attribute strictly increasing cut-points. An attribute with c cuts has
/// c+1 bins; duplicate candidate cut-points collapse, so c <= bin_count - 1.
struct DiscretizationModel {
    std::vector<std::string> attribute_names;
    int bin_count = 0;
    std::vector<std::vector<double>> cuts;

    int bins_of(std::size_t attribute) const {
        return static_cast<int>(cuts[attribute].size()) + 1;
    }
    bool operator==(const DiscretizationModel&) const = default;
};

/// Equal-frequency discretization: per attribute, cut-points sit midway
/// between the sorted values straddling each rank boundary n*j/b
/// (j = 1..b-1). Needs b >= 2 and a non-empty dataset.
DiscretizationModel fit_equal_frequency(const Dataset& ds, int bins);

/// Bin index per attribute. A value equal to a cut-point goes to the upper
/// bin; values below all cuts map to bin 0, above all cuts to the last bin.
std::vector<int> discretize(const FeatureVector& v, const DiscretizationModel& m);

/// Feature-selected naive Bayes over discretized attributes. The joint
/// model is the product of per-attribute conditionals with the class as the
/// sole parent; attributes are kept when their normalized mutual information
/// with the class, MI(attribute; class)/H(class), reaches the threshold.
struct NaiveBayesModel {
    std::vector<std::string> classes; // order of first appearance in training data
    std::vector<double> priors;
    DiscretizationModel discretization;
    /// conditionals[class][attribute][bin], Laplace alpha = 1 smoothed; each
    /// (class, attribute) table sums to 1.
    std::vector<std::vector<std::vector<double>>> conditionals;
    std::vector<std::size_t> selected; // ascending attribute indices
    std::vector<double> mi_scores;     // normalized MI per attribute
    double threshold = 0.1;
    /// Set when no attribute met the threshold and the single best was kept.
    bool fallback_selection = false;

    bool operator==(const NaiveBayesModel&) const = default;
};

NaiveBayesModel nb_train(const Dataset& ds, int bins, double threshold);

/// A prediction with its per-class posterior (naive Bayes) or vote fractions
/// (k-NN, ensemble). `confidence` is the winning entry, in [0, 1].
struct Prediction {
    std::string label;
    std::vector<std::pair<std::string, double>> posterior;
    double confidence = 0.0;
};

/// Posterior ∝ prior × Π over selected attributes of the smoothed
/// conditional, normalised to sum 1. Ties go to the earlier class in
/// training order.
Prediction nb_predict(const NaiveBayesModel& m, const FeatureVector& v);

/// Instance store for k-nearest-neighbour prediction. When standardized,
/// rows are kept in z-score space and queries are transformed on entry.
struct KnnModel {
    std::vector<std::string> attribute_names;
    std::vector<std::vector<double>> rows;
    std::vector<std::string> labels;
    int k = 1;
    bool standardized = true;
    StandardizationParams standardization; // empty when standardized == false

    bool operator==(const KnnModel&) const = default;
};

KnnModel knn_train(const Dataset& ds, int k, bool standardized);

/// Euclidean distance, plurality vote over the k nearest. Distance ties
/// resolve by training-row order; vote ties by the single nearest
/// neighbour's label.
Prediction knn_predict(const KnnModel& m, const FeatureVector& v);

using EnsembleMember = std::variant<NaiveBayesModel, KnnModel>;

/// Majority-vote combination of at least 3 member classifiers.
struct EnsembleModel {
    std::vector<EnsembleMember> members;
};

/// Plurality vote over member predictions. When the top vote is tied, the
/// earliest-listed member whose prediction is among the tied classes decides.
Prediction ensemble_predict(const EnsembleModel& e, const FeatureVector& v);

using AnyModel = std::variant<NaiveBayesModel, KnnModel, EnsembleModel>;

Prediction predict(const AnyModel& m, const FeatureVector& v);
const std::vector<std::string>& model_schema(const AnyModel& m);

/// Confusion matrix (rows = true, cols = predicted) plus the derived
/// metrics. `labels` fixes the matrix index order: first appearance in the
/// truth sequence, then in the predictions. Metrics that are undefined on
/// the given data (positive class absent from truth) are NaN.
struct EvalReport {
    std::vector<std::string> labels;
    std::vector<std::vector<std::size_t>> matrix;
    double accuracy = 0.0;
    double sensitivity = 0.0;
    double specificity = 0.0;
    std::string positive;
};

EvalReport evaluate(const std::vector<std::string>& predictions,
                    const std::vector<std::string>& truth,
                    const std::string& positive = "micro-collapse");

/// Seeded stratified split: per class, `fraction` of the rows (rounded,
/// but always leaving at least one row on each side) go to the training
/// set. Row order within each part follows the input dataset. Every class
/// needs >= 2 rows.
std::pair<Dataset, Dataset> split_holdout(const Dataset& ds, double fraction,
                                          std::uint64_t seed);

/// Versioned JSON model document; values round-trip exactly, so a reloaded
/// model predicts bit-identically.
void save_model(const AnyModel& m, const std::filesystem::path& path);
AnyModel load_model(const std::filesystem::path& path);
std::string model_to_json(const AnyModel& m);
AnyModel model_from_json(const std::string& text);

} // namespace lsi

#endif // LSI_CLASSIFY_HPP
