#include "lsi/classify.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include <json.hpp>

namespace lsi {

namespace {

// Class labels in order of first appearance, case-insensitive.
struct ClassIndex {
    std::vector<std::string> names; // first-seen spelling
    std::vector<std::string> folded;

    std::size_t insert(const std::string& label) {
        const std::string f = label_fold(label);
        for (std::size_t i = 0; i < folded.size(); ++i) {
            if (folded[i] == f) return i;
        }
        names.push_back(label);
        folded.push_back(f);
        return names.size() - 1;
    }
    std::optional<std::size_t> find(std::string_view label) const {
        const std::string f = label_fold(label);
        for (std::size_t i = 0; i < folded.size(); ++i) {
            if (folded[i] == f) return i;
        }
        return std::nullopt;
    }
};

void require_schema(const std::vector<std::string>& got, const std::vector<std::string>& want,
                    const char* what) {
    if (got != want) {
        throw std::invalid_argument(std::string(what) + ": attribute schema mismatch");
    }
}

} // namespace

// ---------------------------------------------------------------------------
// Equal-frequency discretization
// ---------------------------------------------------------------------------

DiscretizationModel fit_equal_frequency(const Dataset& ds, int bins) {
    if (bins < 2) {
        throw std::invalid_argument("bin count must be >= 2, got " + std::to_string(bins));
    }
    if (ds.size() == 0) {
        throw std::invalid_argument("cannot discretize an empty dataset");
    }
    DiscretizationModel m;
    m.attribute_names = ds.attribute_names;
    m.bin_count = bins;
    m.cuts.resize(ds.attribute_names.size());

    const std::size_t n = ds.size();
    std::vector<double> sorted(n);
    for (std::size_t a = 0; a < ds.attribute_names.size(); ++a) {
        for (std::size_t i = 0; i < n; ++i) sorted[i] = ds.rows[i][a];
        std::sort(sorted.begin(), sorted.end());
        std::vector<double>& cuts = m.cuts[a];
        for (int j = 1; j < bins; ++j) {
            const std::size_t r = n * static_cast<std::size_t>(j) / bins;
            if (r < 1 || r > n - 1) continue;
            const double c = 0.5 * (sorted[r - 1] + sorted[r]);
            if (cuts.empty() || c > cuts.back()) cuts.push_back(c);
        }
    }
    return m;
}

std::vector<int> discretize(const FeatureVector& v, const DiscretizationModel& m) {
    require_schema(v.attribute_names, m.attribute_names, "discretize");
    std::vector<int> bins(v.values.size());
    for (std::size_t a = 0; a < v.values.size(); ++a) {
        const std::vector<double>& cuts = m.cuts[a];
        // boundary goes up: a value equal to a cut lands in the upper bin
        bins[a] = static_cast<int>(
            std::upper_bound(cuts.begin(), cuts.end(), v.values[a]) - cuts.begin());
        // values above the last cut are already in the top bin; nothing to clamp
    }
    return bins;
}

// ---------------------------------------------------------------------------
// Naive Bayes
// ---------------------------------------------------------------------------

NaiveBayesModel nb_train(const Dataset& ds, int bins, double threshold) {
    if (ds.size() == 0) {
        throw std::invalid_argument("cannot train on an empty dataset");
    }
    ClassIndex classes;
    std::vector<std::size_t> row_class(ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) row_class[i] = classes.insert(ds.labels[i]);
    const std::size_t n_classes = classes.names.size();
    if (n_classes < 2) {
        throw std::invalid_argument("naive Bayes training needs >= 2 classes, got " +
                                    std::to_string(n_classes));
    }
    std::vector<std::size_t> class_count(n_classes, 0);
    for (std::size_t c : row_class) ++class_count[c];
    for (std::size_t c = 0; c < n_classes; ++c) {
        if (class_count[c] < 2) {
            throw std::invalid_argument("class '" + classes.names[c] +
                                        "' has fewer than 2 training rows");
        }
    }

    NaiveBayesModel m;
    m.classes = classes.names;
    m.threshold = threshold;
    m.discretization = fit_equal_frequency(ds, bins);

    const std::size_t n_attrs = ds.attribute_names.size();
    const std::size_t n = ds.size();

    std::vector<std::vector<int>> binned(n);
    for (std::size_t i = 0; i < n; ++i) binned[i] = discretize(ds.row(i), m.discretization);

    m.priors.resize(n_classes);
    for (std::size_t c = 0; c < n_classes; ++c) {
        m.priors[c] = static_cast<double>(class_count[c]) / static_cast<double>(n);
    }

    // Laplace-smoothed conditional bin frequencies.
    m.conditionals.assign(n_classes, std::vector<std::vector<double>>(n_attrs));
    for (std::size_t a = 0; a < n_attrs; ++a) {
        const int n_bins = m.discretization.bins_of(a);
        std::vector<std::vector<double>> counts(n_classes, std::vector<double>(n_bins, 0.0));
        for (std::size_t i = 0; i < n; ++i) counts[row_class[i]][binned[i][a]] += 1.0;
        for (std::size_t c = 0; c < n_classes; ++c) {
            std::vector<double> table(n_bins);
            const double denom = static_cast<double>(class_count[c]) + n_bins;
            for (int b = 0; b < n_bins; ++b) table[b] = (counts[c][b] + 1.0) / denom;
            m.conditionals[c][a] = std::move(table);
        }
    }

    // Normalized mutual information MI(attribute; class) / H(class) on the
    // unsmoothed training counts.
    double h_class = 0.0;
    for (std::size_t c = 0; c < n_classes; ++c) {
        const double p = m.priors[c];
        h_class -= p * std::log(p);
    }
    m.mi_scores.resize(n_attrs);
    for (std::size_t a = 0; a < n_attrs; ++a) {
        const int n_bins = m.discretization.bins_of(a);
        std::vector<double> joint(n_classes * static_cast<std::size_t>(n_bins), 0.0);
        std::vector<double> p_bin(n_bins, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            joint[row_class[i] * n_bins + binned[i][a]] += 1.0;
            p_bin[binned[i][a]] += 1.0;
        }
        double mi = 0.0;
        for (std::size_t c = 0; c < n_classes; ++c) {
            for (int b = 0; b < n_bins; ++b) {
                const double pvy = joint[c * n_bins + b] / static_cast<double>(n);
                if (pvy <= 0.0) continue;
                const double pv = p_bin[b] / static_cast<double>(n);
                mi += pvy * std::log(pvy / (pv * m.priors[c]));
            }
        }
        m.mi_scores[a] = mi / h_class;
    }

    for (std::size_t a = 0; a < n_attrs; ++a) {
        if (m.mi_scores[a] >= threshold) m.selected.push_back(a);
    }
    if (m.selected.empty()) {
        const std::size_t best = static_cast<std::size_t>(
            std::max_element(m.mi_scores.begin(), m.mi_scores.end()) - m.mi_scores.begin());
        m.selected.push_back(best);
        m.fallback_selection = true;
    }
    return m;
}

Prediction nb_predict(const NaiveBayesModel& m, const FeatureVector& v) {
    const std::vector<int> bins = discretize(v, m.discretization);
    const std::size_t n_classes = m.classes.size();
    // log space to keep long products of small conditionals away from 0
    std::vector<double> log_post(n_classes);
    for (std::size_t c = 0; c < n_classes; ++c) {
        double lp = std::log(m.priors[c]);
        for (std::size_t a : m.selected) lp += std::log(m.conditionals[c][a][bins[a]]);
        log_post[c] = lp;
    }
    const double peak = *std::max_element(log_post.begin(), log_post.end());
    double total = 0.0;
    std::vector<double> post(n_classes);
    for (std::size_t c = 0; c < n_classes; ++c) {
        post[c] = std::exp(log_post[c] - peak);
        total += post[c];
    }
    Prediction out;
    std::size_t argmax = 0;
    for (std::size_t c = 0; c < n_classes; ++c) {
        post[c] /= total;
        out.posterior.emplace_back(m.classes[c], post[c]);
        if (post[c] > post[argmax]) argmax = c; // strict: ties keep the earlier class
    }
    out.label = m.classes[argmax];
    out.confidence = post[argmax];
    return out;
}

// ---------------------------------------------------------------------------
// k-NN
// ---------------------------------------------------------------------------

KnnModel knn_train(const Dataset& ds, int k, bool standardized) {
    if (ds.size() == 0) {
        throw std::invalid_argument("cannot train on an empty dataset");
    }
    if (k < 1 || static_cast<std::size_t>(k) > ds.size()) {
        throw std::invalid_argument("k must be in [1, " + std::to_string(ds.size()) +
                                    "], got " + std::to_string(k));
    }
    KnnModel m;
    m.attribute_names = ds.attribute_names;
    m.labels = ds.labels;
    m.k = k;
    m.standardized = standardized;
    if (standardized) {
        m.standardization = fit_standardization(ds);
        m.rows = apply_standardization(ds, m.standardization).rows;
    } else {
        m.rows = ds.rows;
    }
    return m;
}

Prediction knn_predict(const KnnModel& m, const FeatureVector& v) {
    require_schema(v.attribute_names, m.attribute_names, "knn_predict");
    const std::vector<double>& q =
        m.standardized ? apply_standardization(v, m.standardization).values : v.values;

    std::vector<std::pair<double, std::size_t>> dist(m.rows.size());
    for (std::size_t i = 0; i < m.rows.size(); ++i) {
        double d2 = 0.0;
        for (std::size_t a = 0; a < q.size(); ++a) {
            const double d = m.rows[i][a] - q[a];
            d2 += d * d;
        }
        dist[i] = {d2, i};
    }
    // (distance, row index) sort: equal distances resolve by training-row order
    std::sort(dist.begin(), dist.end());

    ClassIndex classes;
    std::vector<std::size_t> votes;
    for (int j = 0; j < m.k; ++j) {
        const std::size_t c = classes.insert(m.labels[dist[j].second]);
        if (c >= votes.size()) votes.push_back(0);
        ++votes[c];
    }
    std::size_t best = 0;
    bool tied = false;
    for (std::size_t c = 1; c < votes.size(); ++c) {
        if (votes[c] > votes[best]) {
            best = c;
            tied = false;
        } else if (votes[c] == votes[best]) {
            tied = true;
        }
    }
    if (tied) {
        best = *classes.find(m.labels[dist[0].second]); // nearest neighbour decides
    }
    Prediction out;
    out.label = classes.names[best];
    out.confidence = static_cast<double>(votes[best]) / static_cast<double>(m.k);
    for (std::size_t c = 0; c < votes.size(); ++c) {
        out.posterior.emplace_back(classes.names[c],
                                   static_cast<double>(votes[c]) / static_cast<double>(m.k));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Ensemble
// ---------------------------------------------------------------------------

Prediction ensemble_predict(const EnsembleModel& e, const FeatureVector& v) {
    if (e.members.size() < 3) {
        throw std::invalid_argument("ensemble needs >= 3 members, got " +
                                    std::to_string(e.members.size()));
    }
    ClassIndex classes;
    std::vector<std::size_t> votes;
    std::vector<std::size_t> member_vote(e.members.size());
    for (std::size_t i = 0; i < e.members.size(); ++i) {
        const Prediction p = std::visit(
            [&](const auto& m) {
                if constexpr (std::is_same_v<std::decay_t<decltype(m)>, NaiveBayesModel>) {
                    return nb_predict(m, v);
                } else {
                    return knn_predict(m, v);
                }
            },
            e.members[i]);
        const std::size_t c = classes.insert(p.label);
        if (c >= votes.size()) votes.push_back(0);
        ++votes[c];
        member_vote[i] = c;
    }
    const std::size_t top = *std::max_element(votes.begin(), votes.end());
    std::size_t winner = member_vote[0];
    if (votes[winner] != top) {
        // earliest member whose prediction is among the tied leaders
        for (std::size_t i = 1; i < e.members.size(); ++i) {
            if (votes[member_vote[i]] == top) {
                winner = member_vote[i];
                break;
            }
        }
    }
    Prediction out;
    out.label = classes.names[winner];
    out.confidence =
        static_cast<double>(votes[winner]) / static_cast<double>(e.members.size());
    for (std::size_t c = 0; c < votes.size(); ++c) {
        out.posterior.emplace_back(classes.names[c], static_cast<double>(votes[c]) /
                                                         static_cast<double>(e.members.size()));
    }
    return out;
}

Prediction predict(const AnyModel& m, const FeatureVector& v) {
    return std::visit(
        [&](const auto& model) -> Prediction {
            using T = std::decay_t<decltype(model)>;
            if constexpr (std::is_same_v<T, NaiveBayesModel>) {
                return nb_predict(model, v);
            } else if constexpr (std::is_same_v<T, KnnModel>) {
                return knn_predict(model, v);
            } else {
                return ensemble_predict(model, v);
            }
        },
        m);
}

const std::vector<std::string>& model_schema(const AnyModel& m) {
    return std::visit(
        [](const auto& model) -> const std::vector<std::string>& {
            using T = std::decay_t<decltype(model)>;
            if constexpr (std::is_same_v<T, NaiveBayesModel>) {
                return model.discretization.attribute_names;
            } else if constexpr (std::is_same_v<T, KnnModel>) {
                return model.attribute_names;
            } else {
                if (model.members.empty()) {
                    throw std::invalid_argument("ensemble has no members");
                }
                return std::visit(
                    [](const auto& member) -> const std::vector<std::string>& {
                        using M = std::decay_t<decltype(member)>;
                        if constexpr (std::is_same_v<M, NaiveBayesModel>) {
                            return member.discretization.attribute_names;
                        } else {
                            return member.attribute_names;
                        }
                    },
                    model.members.front());
            }
        },
        m);
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

EvalReport evaluate(const std::vector<std::string>& predictions,
                    const std::vector<std::string>& truth, const std::string& positive) {
    if (predictions.size() != truth.size()) {
        throw std::invalid_argument("evaluate: " + std::to_string(predictions.size()) +
                                    " predictions vs " + std::to_string(truth.size()) +
                                    " truth labels");
    }
    if (truth.empty()) {
        throw std::invalid_argument("evaluate: empty input");
    }
    ClassIndex classes;
    for (const auto& l : truth) classes.insert(l);
    for (const auto& l : predictions) classes.insert(l);

    const std::size_t n_classes = classes.names.size();
    EvalReport r;
    r.labels = classes.names;
    r.positive = positive;
    r.matrix.assign(n_classes, std::vector<std::size_t>(n_classes, 0));
    for (std::size_t i = 0; i < truth.size(); ++i) {
        ++r.matrix[*classes.find(truth[i])][*classes.find(predictions[i])];
    }

    std::size_t correct = 0;
    for (std::size_t c = 0; c < n_classes; ++c) correct += r.matrix[c][c];
    const double total = static_cast<double>(truth.size());
    r.accuracy = static_cast<double>(correct) / total;

    const double nan = std::numeric_limits<double>::quiet_NaN();
    const auto pos = classes.find(positive);
    std::size_t tp = 0, fn = 0, fp = 0;
    if (pos) {
        tp = r.matrix[*pos][*pos];
        for (std::size_t c = 0; c < n_classes; ++c) {
            if (c == *pos) continue;
            fn += r.matrix[*pos][c];
            fp += r.matrix[c][*pos];
        }
    }
    const std::size_t tn = truth.size() - tp - fn - fp;
    r.sensitivity = (tp + fn) == 0 ? nan : static_cast<double>(tp) / static_cast<double>(tp + fn);
    r.specificity = (tn + fp) == 0 ? nan : static_cast<double>(tn) / static_cast<double>(tn + fp);
    return r;
}

// ---------------------------------------------------------------------------
// Holdout split
// ---------------------------------------------------------------------------

std::pair<Dataset, Dataset> split_holdout(const Dataset& ds, double fraction,
                                          std::uint64_t seed) {
    if (!(fraction > 0.0 && fraction < 1.0)) {
        throw std::invalid_argument("holdout fraction must be in (0, 1)");
    }
    ClassIndex classes;
    std::vector<std::vector<std::size_t>> members;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const std::size_t c = classes.insert(ds.labels[i]);
        if (c >= members.size()) members.emplace_back();
        members[c].push_back(i);
    }
    std::mt19937_64 rng(seed);
    std::vector<bool> in_train(ds.size(), false);
    for (std::size_t c = 0; c < members.size(); ++c) {
        auto& idx = members[c];
        if (idx.size() < 2) {
            throw std::invalid_argument("class '" + classes.names[c] +
                                        "' has fewer than 2 rows; cannot split");
        }
        std::shuffle(idx.begin(), idx.end(), rng);
        std::size_t take = static_cast<std::size_t>(
            std::llround(fraction * static_cast<double>(idx.size())));
        take = std::clamp<std::size_t>(take, 1, idx.size() - 1);
        for (std::size_t j = 0; j < take; ++j) in_train[idx[j]] = true;
    }
    Dataset train, test;
    train.attribute_names = ds.attribute_names;
    test.attribute_names = ds.attribute_names;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        Dataset& part = in_train[i] ? train : test;
        part.rows.push_back(ds.rows[i]);
        part.labels.push_back(ds.labels[i]);
    }
    return {std::move(train), std::move(test)};
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

namespace {

using nlohmann::json;

constexpr const char* kFormatName = "lsikit-model";
constexpr int kFormatVersion = 1;

json disc_to_json(const DiscretizationModel& m) {
    return json{{"attribute_names", m.attribute_names},
                {"bin_count", m.bin_count},
                {"cuts", m.cuts}};
}

DiscretizationModel disc_from_json(const json& j) {
    DiscretizationModel m;
    j.at("attribute_names").get_to(m.attribute_names);
    j.at("bin_count").get_to(m.bin_count);
    j.at("cuts").get_to(m.cuts);
    return m;
}

json nb_to_json(const NaiveBayesModel& m) {
    return json{{"classes", m.classes},
                {"priors", m.priors},
                {"discretization", disc_to_json(m.discretization)},
                {"conditionals", m.conditionals},
                {"selected", m.selected},
                {"mi_scores", m.mi_scores},
                {"threshold", m.threshold},
                {"fallback_selection", m.fallback_selection}};
}

NaiveBayesModel nb_from_json(const json& j) {
    NaiveBayesModel m;
    j.at("classes").get_to(m.classes);
    j.at("priors").get_to(m.priors);
    m.discretization = disc_from_json(j.at("discretization"));
    j.at("conditionals").get_to(m.conditionals);
    j.at("selected").get_to(m.selected);
    j.at("mi_scores").get_to(m.mi_scores);
    j.at("threshold").get_to(m.threshold);
    j.at("fallback_selection").get_to(m.fallback_selection);
    return m;
}

json knn_to_json(const KnnModel& m) {
    return json{{"attribute_names", m.attribute_names},
                {"rows", m.rows},
                {"labels", m.labels},
                {"k", m.k},
                {"standardized", m.standardized},
                {"standardization",
                 json{{"attribute_names", m.standardization.attribute_names},
                      {"mean", m.standardization.mean},
                      {"stddev", m.standardization.stddev}}}};
}

KnnModel knn_from_json(const json& j) {
    KnnModel m;
    j.at("attribute_names").get_to(m.attribute_names);
    j.at("rows").get_to(m.rows);
    j.at("labels").get_to(m.labels);
    j.at("k").get_to(m.k);
    j.at("standardized").get_to(m.standardized);
    const json& s = j.at("standardization");
    s.at("attribute_names").get_to(m.standardization.attribute_names);
    s.at("mean").get_to(m.standardization.mean);
    s.at("stddev").get_to(m.standardization.stddev);
    return m;
}

} // namespace

std::string model_to_json(const AnyModel& m) {
    json j;
    j["format"] = kFormatName;
    j["version"] = kFormatVersion;
    std::visit(
        [&](const auto& model) {
            using T = std::decay_t<decltype(model)>;
            if constexpr (std::is_same_v<T, NaiveBayesModel>) {
                j["type"] = "nb";
                j["model"] = nb_to_json(model);
            } else if constexpr (std::is_same_v<T, KnnModel>) {
                j["type"] = "knn";
                j["model"] = knn_to_json(model);
            } else {
                j["type"] = "ensemble";
                json members = json::array();
                for (const auto& member : model.members) {
                    std::visit(
                        [&](const auto& mm) {
                            using M = std::decay_t<decltype(mm)>;
                            if constexpr (std::is_same_v<M, NaiveBayesModel>) {
                                members.push_back(json{{"type", "nb"}, {"model", nb_to_json(mm)}});
                            } else {
                                members.push_back(
                                    json{{"type", "knn"}, {"model", knn_to_json(mm)}});
                            }
                        },
                        member);
                }
                j["model"] = json{{"members", members}};
            }
        },
        m);
    return j.dump(2) + "\n";
}

AnyModel model_from_json(const std::string& text) {
    const json j = json::parse(text);
    if (j.value("format", "") != kFormatName) {
        throw std::runtime_error("not a lsikit model document (bad 'format' field)");
    }
    if (j.value("version", 0) != kFormatVersion) {
        throw std::runtime_error("unsupported model version " +
                                 std::to_string(j.value("version", 0)));
    }
    const std::string type = j.at("type");
    if (type == "nb") return nb_from_json(j.at("model"));
    if (type == "knn") return knn_from_json(j.at("model"));
    if (type == "ensemble") {
        EnsembleModel e;
        for (const json& member : j.at("model").at("members")) {
            const std::string mt = member.at("type");
            if (mt == "nb") {
                e.members.emplace_back(nb_from_json(member.at("model")));
            } else if (mt == "knn") {
                e.members.emplace_back(knn_from_json(member.at("model")));
            } else {
                throw std::runtime_error("unknown ensemble member type '" + mt + "'");
            }
        }
        return e;
    }
    throw std::runtime_error("unknown model type '" + type + "'");
}

void save_model(const AnyModel& m, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot open for writing: " + path.string());
    }
    out << model_to_json(m);
    if (!out) {
        throw std::runtime_error("write failed: " + path.string());
    }
}

AnyModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open model file: " + path.string());
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return model_from_json(buffer.str());
}

} // namespace lsi
