// lsi — laser speckle imaging toolkit command-line front end.
//
// Exit codes: 0 success, 1 usage error (bad flags / flag combinations),
// 2 data or format error (unreadable files, malformed content, mismatched
// schemas).

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lsi/classify.hpp"
#include "lsi/features.hpp"
#include "lsi/image.hpp"
#include "lsi/monitor.hpp"
#include "lsi/speckle.hpp"
#include "lsi/texture.hpp"

namespace fs = std::filesystem;

namespace {

/// Thrown by subcommand bodies for problems that are flag misuse rather than
/// bad data; mapped to exit code 1.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Context-adding wrappers: every failure names the offending file.
// ---------------------------------------------------------------------------

lsi::GrayImage load_image_ctx(const std::string& path) {
    try {
        return lsi::load_image(path);
    } catch (const std::exception& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

lsi::Dataset read_csv_ctx(const std::string& path) {
    try {
        return lsi::read_csv(path);
    } catch (const lsi::CsvError& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

lsi::AnyModel load_model_ctx(const std::string& path) {
    try {
        return lsi::load_model(path);
    } catch (const std::exception& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

std::vector<lsi::Roi> parse_rois(const std::vector<std::string>& specs) {
    std::vector<lsi::Roi> rois;
    rois.reserve(specs.size());
    for (const std::string& s : specs) {
        try {
            rois.push_back(lsi::parse_roi(s));
        } catch (const std::exception& e) {
            throw UsageError("--roi '" + s + "': " + e.what());
        }
    }
    return rois;
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path);
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

struct SimulateCfg {
    int width = 256;
    int height = 256;
    int phasors = 100;
    int radius = 0;
    std::uint64_t seed = 0;
    std::string out;
};

void run_simulate(const SimulateCfg& c) {
    lsi::PhasorFieldConfig cfg;
    cfg.width = c.width;
    cfg.height = c.height;
    cfg.n_phasors = c.phasors;
    cfg.correlation_radius = c.radius;
    cfg.seed = c.seed;
    const lsi::SpeckleField field = lsi::simulate_speckle_field(cfg);
    lsi::save_image(lsi::quantize_field(field), c.out);
    std::cout << "wrote " << c.out << ": " << c.width << "x" << c.height << " speckle, N="
              << c.phasors << ", seed=" << c.seed << ", field contrast " << std::fixed
              << std::setprecision(4) << lsi::speckle_contrast(field) << "\n";
}

// ---------------------------------------------------------------------------
// features
// ---------------------------------------------------------------------------

struct FeaturesCfg {
    std::string image;
    std::vector<std::string> roi_specs;
    std::string label;
    std::string out;
};

void run_features(const FeaturesCfg& c) {
    const std::vector<lsi::Roi> rois = parse_rois(c.roi_specs);
    const lsi::GrayImage img = load_image_ctx(c.image);
    for (const lsi::Roi& r : rois) {
        if (!r.fits_within(img)) {
            throw std::runtime_error(c.image + ": roi " + std::to_string(r.x) + "," +
                                     std::to_string(r.y) + "," + std::to_string(r.w) + "," +
                                     std::to_string(r.h) + " does not fit the " +
                                     std::to_string(img.width()) + "x" +
                                     std::to_string(img.height()) + " image");
        }
    }
    const lsi::FeatureVector v = lsi::build_feature_vector(img, rois);
    lsi::Dataset ds;
    ds.attribute_names = v.attribute_names;
    ds.rows.push_back(v.values);
    ds.labels.push_back(c.label);
    lsi::write_csv(ds, c.out);
    std::cout << "wrote " << c.out << ": 1 row, " << v.values.size() << " attributes from "
              << rois.size() << " roi(s)\n";
}

// ---------------------------------------------------------------------------
// fixture
// ---------------------------------------------------------------------------

void run_fixture(const std::string& out) {
    const lsi::Dataset ds = lsi::sample_dataset();
    lsi::write_csv(ds, out);
    std::cout << "wrote " << out << ": " << ds.size() << " rows, " << ds.attribute_names.size()
              << " attributes (10 normal, 10 micro-collapse)\n";
}

// ---------------------------------------------------------------------------
// train / predict / evaluate
// ---------------------------------------------------------------------------

struct TrainSpec {
    std::string algo = "knn";
    int bins = 5;
    double threshold = 0.1;
    int k = 1;
    bool standardized = true;
};

lsi::AnyModel build_model(const lsi::Dataset& ds, const TrainSpec& s) {
    if (s.algo == "nb") return lsi::nb_train(ds, s.bins, s.threshold);
    if (s.algo == "knn") return lsi::knn_train(ds, s.k, s.standardized);
    // ensemble: the nb configuration plus two k-NN members, so three voters
    // are always present even when --k selects one of the defaults
    lsi::EnsembleModel e;
    e.members.emplace_back(lsi::nb_train(ds, s.bins, s.threshold));
    e.members.emplace_back(lsi::knn_train(ds, s.k, s.standardized));
    e.members.emplace_back(lsi::knn_train(ds, s.k == 3 ? 1 : 3, s.standardized));
    return e;
}

std::string describe_model(const lsi::AnyModel& m, const TrainSpec& s) {
    std::ostringstream os;
    if (const auto* nb = std::get_if<lsi::NaiveBayesModel>(&m)) {
        os << "naive Bayes (" << s.bins << " bins): selected " << nb->selected.size() << "/"
           << nb->mi_scores.size() << " attributes at threshold " << nb->threshold;
        if (nb->fallback_selection) {
            os << " (none met the threshold; kept the single best)";
        }
    } else if (const auto* knn = std::get_if<lsi::KnnModel>(&m)) {
        os << knn->k << "-NN, " << (knn->standardized ? "standardized" : "raw") << " attributes";
    } else {
        const auto& e = std::get<lsi::EnsembleModel>(m);
        os << "ensemble of " << e.members.size() << " (nb + " << s.k << "-NN + "
           << (s.k == 3 ? 1 : 3) << "-NN)";
    }
    return os.str();
}

struct TrainCfg {
    TrainSpec spec;
    std::string in;
    std::string out;
};

void run_train(const TrainCfg& c) {
    const lsi::Dataset ds = read_csv_ctx(c.in);
    const lsi::AnyModel model = build_model(ds, c.spec);
    lsi::save_model(model, c.out);
    std::cout << "trained " << describe_model(model, c.spec) << " on " << ds.size() << " rows\n";
    std::cout << "wrote " << c.out << "\n";
}

void require_matching_schema(const lsi::Dataset& ds, const lsi::AnyModel& model,
                             const std::string& source) {
    const std::vector<std::string>& want = lsi::model_schema(model);
    const std::vector<std::string>& got = ds.attribute_names;
    if (got == want) return;
    std::string detail;
    if (got.size() != want.size()) {
        detail = "model has " + std::to_string(want.size()) + " attributes, input has " +
                 std::to_string(got.size());
    } else {
        for (std::size_t i = 0; i < got.size(); ++i) {
            if (got[i] != want[i]) {
                detail = "attribute " + std::to_string(i + 1) + " is '" + got[i] +
                         "', model expects '" + want[i] + "'";
                break;
            }
        }
    }
    throw std::runtime_error(source + ": attribute schema does not match the model (" + detail +
                             ")");
}

struct PredictCfg {
    std::string model;
    std::string in;
    std::string out;
};

void run_predict(const PredictCfg& c) {
    const lsi::AnyModel model = load_model_ctx(c.model);
    const lsi::Dataset ds = read_csv_ctx(c.in);
    require_matching_schema(ds, model, c.in);
    std::string csv = "row,predicted,confidence\n";
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const lsi::Prediction p = lsi::predict(model, ds.row(i));
        csv += std::to_string(i) + "," + p.label + "," + lsi::format_double(p.confidence) + "\n";
    }
    std::cout << csv;
    if (!c.out.empty()) {
        write_text_file(c.out, csv);
        std::cout << "wrote " << c.out << ": " << ds.size() << " prediction(s)\n";
    }
}

struct EvaluateCfg {
    TrainSpec spec;
    std::string model;
    std::string in;
    bool loo = false;
    double holdout = 0.5;
    std::uint64_t seed = 0;
    std::string positive = "micro-collapse";
};

lsi::Dataset without_row(const lsi::Dataset& ds, std::size_t skip) {
    lsi::Dataset out;
    out.attribute_names = ds.attribute_names;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        if (i == skip) continue;
        out.rows.push_back(ds.rows[i]);
        out.labels.push_back(ds.labels[i]);
    }
    return out;
}

void print_report(const lsi::EvalReport& r) {
    std::size_t w = 6;
    for (const auto& l : r.labels) w = std::max(w, l.size());
    const int col = static_cast<int>(w) + 2;

    std::cout << "confusion matrix (rows = truth, columns = predicted):\n";
    std::cout << std::string(static_cast<std::size_t>(col), ' ');
    for (const auto& l : r.labels) std::cout << std::setw(col) << l;
    std::cout << "\n";
    std::size_t total = 0;
    std::size_t correct = 0;
    for (std::size_t i = 0; i < r.labels.size(); ++i) {
        std::cout << std::left << std::setw(col) << r.labels[i] << std::right;
        for (std::size_t j = 0; j < r.labels.size(); ++j) {
            std::cout << std::setw(col) << r.matrix[i][j];
            total += r.matrix[i][j];
        }
        correct += r.matrix[i][i];
        std::cout << "\n";
    }

    const auto pct = [](double v) {
        if (std::isnan(v)) return std::string("n/a");
        std::ostringstream os;
        os << std::fixed << std::setprecision(1) << 100.0 * v << "%";
        return os.str();
    };
    std::cout << "accuracy     " << pct(r.accuracy) << " (" << correct << "/" << total << ")\n";
    std::cout << "sensitivity  " << pct(r.sensitivity) << " (positive: " << r.positive << ")\n";
    std::cout << "specificity  " << pct(r.specificity) << "\n";
}

void run_evaluate(const EvaluateCfg& c) {
    const lsi::Dataset ds = read_csv_ctx(c.in);
    std::vector<std::string> preds;
    std::vector<std::string> truth;

    if (!c.model.empty()) {
        const lsi::AnyModel model = load_model_ctx(c.model);
        require_matching_schema(ds, model, c.in);
        for (std::size_t i = 0; i < ds.size(); ++i) {
            preds.push_back(lsi::predict(model, ds.row(i)).label);
        }
        truth = ds.labels;
        std::cout << "evaluating saved model on " << ds.size() << " rows\n";
    } else if (c.loo) {
        for (std::size_t i = 0; i < ds.size(); ++i) {
            const lsi::AnyModel model = build_model(without_row(ds, i), c.spec);
            preds.push_back(lsi::predict(model, ds.row(i)).label);
        }
        truth = ds.labels;
        std::cout << "leave-one-out over " << ds.size() << " rows (" << c.spec.algo << ")\n";
    } else {
        if (!(c.holdout > 0.0 && c.holdout < 1.0)) {
            throw UsageError("--holdout must lie strictly between 0 and 1");
        }
        const auto [train, test] = lsi::split_holdout(ds, c.holdout, c.seed);
        const lsi::AnyModel model = build_model(train, c.spec);
        for (std::size_t i = 0; i < test.size(); ++i) {
            preds.push_back(lsi::predict(model, test.row(i)).label);
        }
        truth = test.labels;
        std::cout << "holdout " << c.holdout << " (seed " << c.seed << "): " << train.size()
                  << " train / " << test.size() << " test rows (" << c.spec.algo << ")\n";
    }
    print_report(lsi::evaluate(preds, truth, c.positive));
}

// ---------------------------------------------------------------------------
// monitor
// ---------------------------------------------------------------------------

struct MonitorCfg {
    std::string model;
    std::string frames;
    std::vector<std::string> roi_specs;
    double interval = 72.0;
    int debounce = 3;
    std::string events_out;
    std::string trend_attr;
    int trend_degree = 6;
    double trend_threshold = 0.0;
    bool verbose = false;
};

bool glob_match(std::string_view pattern, std::string_view name) {
    std::size_t p = 0;
    std::size_t i = 0;
    std::size_t star = std::string_view::npos;
    std::size_t mark = 0;
    while (i < name.size()) {
        if (p < pattern.size() && (pattern[p] == '?' || pattern[p] == name[i])) {
            ++p;
            ++i;
        } else if (p < pattern.size() && pattern[p] == '*') {
            star = p++;
            mark = i;
        } else if (star != std::string_view::npos) {
            p = star + 1;
            i = ++mark;
        } else {
            return false;
        }
    }
    while (p < pattern.size() && pattern[p] == '*') ++p;
    return p == pattern.size();
}

bool is_image_file(const fs::path& p) {
    std::string ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
    return ext == ".pgm" || ext == ".png";
}

std::vector<fs::path> resolve_frame_paths(const std::string& arg) {
    std::vector<fs::path> paths;
    std::error_code ec;
    if (fs::is_directory(arg, ec)) {
        for (const auto& entry : fs::directory_iterator(arg)) {
            if (entry.is_regular_file() && is_image_file(entry.path())) {
                paths.push_back(entry.path());
            }
        }
    } else if (arg.find('*') != std::string::npos || arg.find('?') != std::string::npos) {
        const fs::path pattern_path(arg);
        const fs::path dir =
            pattern_path.parent_path().empty() ? fs::path(".") : pattern_path.parent_path();
        const std::string pattern = pattern_path.filename().string();
        if (!fs::is_directory(dir, ec)) {
            throw std::runtime_error("--frames: no such directory: " + dir.string());
        }
        for (const auto& entry : fs::directory_iterator(dir)) {
            if (entry.is_regular_file() && glob_match(pattern, entry.path().filename().string())) {
                paths.push_back(entry.path());
            }
        }
    } else if (fs::is_regular_file(arg, ec)) {
        paths.emplace_back(arg);
    } else {
        throw std::runtime_error("--frames: no such file or directory: " + arg);
    }
    if (paths.empty()) {
        throw std::runtime_error("--frames: no image files matched: " + arg);
    }
    std::sort(paths.begin(), paths.end());
    return paths;
}

void run_monitor(const MonitorCfg& c, bool trend_requested) {
    const lsi::AnyModel model = load_model_ctx(c.model);
    const std::vector<lsi::Roi> rois = parse_rois(c.roi_specs);

    // Resolve the stream into feature vectors up front; the loop then runs
    // in vector mode and the trend can reuse the same extraction.
    std::vector<lsi::FeatureVector> feats;
    std::error_code ec;
    const bool csv_mode =
        fs::is_regular_file(c.frames, ec) && fs::path(c.frames).extension() == ".csv";
    if (csv_mode) {
        const lsi::Dataset ds = read_csv_ctx(c.frames);
        if (ds.size() == 0) throw std::runtime_error(c.frames + ": no frame rows");
        for (std::size_t i = 0; i < ds.size(); ++i) {
            feats.push_back(ds.row(i));
        }
    } else {
        const std::vector<fs::path> paths = resolve_frame_paths(c.frames);
        if (rois.empty()) {
            throw UsageError("--roi is required when --frames points at image files");
        }
        for (const fs::path& p : paths) {
            const lsi::GrayImage img = load_image_ctx(p.string());
            for (const lsi::Roi& r : rois) {
                if (!r.fits_within(img)) {
                    throw std::runtime_error(p.string() + ": roi does not fit the " +
                                             std::to_string(img.width()) + "x" +
                                             std::to_string(img.height()) + " frame");
                }
            }
            feats.push_back(lsi::build_feature_vector(img, rois));
        }
    }
    require_matching_schema(
        lsi::Dataset{feats.front().attribute_names, {}, {}}, model,
        c.frames);

    std::vector<lsi::FrameSample> stream;
    stream.reserve(feats.size());
    for (std::size_t i = 0; i < feats.size(); ++i) {
        stream.push_back({i, static_cast<double>(i) * c.interval, feats[i]});
    }
    const lsi::DetectionLoopResult res = lsi::run_detection_loop(stream, model, {}, c.debounce);

    std::cout << "processed " << stream.size() << " frames (debounce " << c.debounce << ")\n";
    if (c.verbose) {
        for (std::size_t i = 0; i < stream.size(); ++i) {
            std::cout << "frame " << i << " t=" << stream[i].timestamp
                      << "s label=" << res.labels[i] << "\n";
        }
    }
    if (res.events.empty()) {
        std::cout << "no state changes detected\n";
    }
    for (const lsi::DetectionEvent& e : res.events) {
        std::cout << "event: frame " << e.frame << " at t=" << e.timestamp << "s: " << e.from_state
                  << " -> " << e.to_state << " (confidence " << e.confidence << ")\n";
    }
    if (!c.events_out.empty()) {
        std::string csv = "frame,timestamp,from,to,confidence\n";
        for (const lsi::DetectionEvent& e : res.events) {
            csv += std::to_string(e.frame) + "," + lsi::format_double(e.timestamp) + "," +
                   e.from_state + "," + e.to_state + "," + lsi::format_double(e.confidence) + "\n";
        }
        write_text_file(c.events_out, csv);
        std::cout << "wrote " << c.events_out << ": " << res.events.size() << " event(s)\n";
    }

    if (trend_requested) {
        const auto& names = feats.front().attribute_names;
        const auto it = std::find(names.begin(), names.end(), c.trend_attr);
        if (it == names.end()) {
            throw std::runtime_error("--trend-attribute: no attribute named '" + c.trend_attr +
                                     "' in the frame features");
        }
        const std::size_t a = static_cast<std::size_t>(it - names.begin());
        std::vector<std::pair<double, double>> series;
        series.reserve(feats.size());
        for (std::size_t i = 0; i < feats.size(); ++i) {
            series.emplace_back(stream[i].timestamp, feats[i].values[a]);
        }
        const lsi::TrendModel trend =
            lsi::fit_polynomial_trend(series, c.trend_degree, c.trend_attr);
        std::cout << "trend " << c.trend_attr << " (degree " << trend.degree << ", residual rms "
                  << trend.residual_rms << ")";
        const std::optional<double> t = lsi::locate_transition_from_trend(trend, c.trend_threshold);
        if (t) {
            std::cout << ": crosses " << c.trend_threshold << " from above at t=" << *t
                      << "s (~frame " << *t / c.interval << ")\n";
        } else {
            std::cout << ": no crossing of " << c.trend_threshold << " from above\n";
        }
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"laser speckle imaging toolkit: speckle simulation, windowed texture features,\n"
                 "classification, and debounced process monitoring",
                 "lsi"};
    app.require_subcommand(1);
    app.failure_message(CLI::FailureMessage::help);

    // simulate ---------------------------------------------------------------
    SimulateCfg sim;
    CLI::App* s = app.add_subcommand("simulate", "synthesize a speckle pattern and write a PGM");
    s->add_option("--width", sim.width, "image width in pixels")
        ->capture_default_str()
        ->check(CLI::Range(1, 65536));
    s->add_option("--height", sim.height, "image height in pixels")
        ->capture_default_str()
        ->check(CLI::Range(1, 65536));
    s->add_option("--phasors", sim.phasors, "phasors summed per pixel")
        ->capture_default_str()
        ->check(CLI::Range(1, 1000000));
    s->add_option("--radius", sim.radius, "phase-field smoothing radius (grows speckle grains)")
        ->capture_default_str()
        ->check(CLI::Range(0, 4096));
    s->add_option("--seed", sim.seed, "RNG seed")->capture_default_str();
    s->add_option("--out", sim.out, "output PGM path")->required();
    s->callback([&] { run_simulate(sim); });

    // features ---------------------------------------------------------------
    FeaturesCfg feat;
    CLI::App* f =
        app.add_subcommand("features", "extract texture features from image rois into a CSV");
    f->add_option("--image", feat.image, "input PGM or 8-bit grayscale PNG")
        ->required()
        ->check(CLI::ExistingFile);
    f->add_option("--roi", feat.roi_specs, "sampling window x,y,w,h[:label] (repeatable)")
        ->required();
    f->add_option("--label", feat.label, "class label for the output row")->capture_default_str();
    f->add_option("--out", feat.out, "output CSV path")->required();
    f->callback([&] { run_features(feat); });

    // fixture ----------------------------------------------------------------
    std::string fixture_out;
    CLI::App* x = app.add_subcommand("fixture", "write the embedded 20-row sample dataset");
    x->add_option("--out", fixture_out, "output CSV path")->required();
    x->callback([&] { run_fixture(fixture_out); });

    // shared training flags ----------------------------------------------------
    const auto add_train_spec = [](CLI::App* cmd, TrainSpec& spec) {
        std::map<std::string, CLI::Option*> opts;
        opts["algo"] = cmd->add_option("--algo", spec.algo, "classifier: nb, knn, or ensemble")
                           ->capture_default_str()
                           ->check(CLI::IsMember({"nb", "knn", "ensemble"}));
        opts["bins"] = cmd->add_option("--bins", spec.bins, "equal-frequency bins (nb)")
                           ->capture_default_str()
                           ->check(CLI::Range(2, 1000));
        opts["threshold"] =
            cmd->add_option("--threshold", spec.threshold,
                            "normalized mutual-information selection threshold (nb)")
                ->capture_default_str()
                ->check(CLI::Range(0.0, 1.0));
        opts["k"] = cmd->add_option("--k", spec.k, "neighbour count (knn)")
                        ->capture_default_str()
                        ->check(CLI::PositiveNumber);
        opts["standardized"] =
            cmd->add_flag("--standardized,!--no-standardized", spec.standardized,
                          "z-score attributes before distance computation (knn)")
                ->capture_default_str();
        return opts;
    };

    // train --------------------------------------------------------------------
    TrainCfg train;
    CLI::App* t = app.add_subcommand("train", "fit a classifier on a labelled CSV");
    auto t_opts = add_train_spec(t, train.spec);
    t_opts["algo"]->required();
    t->add_option("--in", train.in, "training CSV")->required()->check(CLI::ExistingFile);
    t->add_option("--out", train.out, "output model path")->required();
    t->callback([&] { run_train(train); });

    // predict --------------------------------------------------------------------
    PredictCfg pred;
    CLI::App* p = app.add_subcommand("predict", "classify CSV rows with a saved model");
    p->add_option("--model", pred.model, "model file from 'train'")
        ->required()
        ->check(CLI::ExistingFile);
    p->add_option("--in", pred.in, "input CSV (label column is ignored)")
        ->required()
        ->check(CLI::ExistingFile);
    p->add_option("--out", pred.out, "also write predictions to this CSV");
    p->callback([&] { run_predict(pred); });

    // evaluate -------------------------------------------------------------------
    EvaluateCfg ev;
    CLI::App* e = app.add_subcommand(
        "evaluate", "score a classifier: leave-one-out, stratified holdout, or a saved model");
    auto ev_opts = add_train_spec(e, ev.spec);
    CLI::Option* e_model =
        e->add_option("--model", ev.model, "evaluate this saved model on every input row")
            ->check(CLI::ExistingFile);
    e->add_option("--in", ev.in, "labelled CSV")->required()->check(CLI::ExistingFile);
    CLI::Option* e_loo = e->add_flag("--loo", ev.loo, "leave-one-out cross-validation (refits per fold)");
    CLI::Option* e_hold =
        e->add_option("--holdout", ev.holdout, "stratified training fraction (the default mode)")
            ->capture_default_str();
    e->add_option("--seed", ev.seed, "holdout shuffle seed")->capture_default_str();
    e->add_option("--positive", ev.positive, "positive class for sensitivity/specificity")
        ->capture_default_str();
    e_loo->excludes(e_hold);
    for (auto& kv : ev_opts) e_model->excludes(kv.second);
    e_model->excludes(e_loo);
    e_model->excludes(e_hold);
    e->callback([&] { run_evaluate(ev); });

    // monitor ---------------------------------------------------------------------
    MonitorCfg mon;
    CLI::App* m = app.add_subcommand(
        "monitor", "classify an ordered frame stream, debounce, and report state changes");
    m->add_option("--model", mon.model, "model file from 'train'")
        ->required()
        ->check(CLI::ExistingFile);
    m->add_option("--frames", mon.frames,
                  "frame source: a CSV of feature vectors, a directory of PGM/PNG frames, or a\n"
                  "glob like run/*.pgm (frames are ordered by filename)")
        ->required();
    m->add_option("--roi", mon.roi_specs, "sampling window x,y,w,h[:label] (image frames only)");
    m->add_option("--interval", mon.interval, "seconds between frames (synthesized timestamps)")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    m->add_option("--debounce", mon.debounce,
                  "consecutive differing frames required to commit a state change")
        ->capture_default_str()
        ->check(CLI::Range(1, 1000000));
    m->add_option("--events-out", mon.events_out, "write events CSV: frame,timestamp,from,to,confidence");
    CLI::Option* m_attr = m->add_option("--trend-attribute", mon.trend_attr,
                                        "fit a polynomial trend over this attribute");
    CLI::Option* m_thresh =
        m->add_option("--trend-threshold", mon.trend_threshold,
                      "report where the trend crosses this value from above");
    m->add_option("--trend-degree", mon.trend_degree, "trend polynomial degree")
        ->capture_default_str()
        ->check(CLI::Range(1, 32))
        ->needs(m_attr);
    m_attr->needs(m_thresh);
    m_thresh->needs(m_attr);
    m->add_flag("--verbose", mon.verbose, "print every frame's label");
    m->callback([&] { run_monitor(mon, m_attr->count() > 0); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& err) {
        return app.exit(err);
    } catch (const CLI::CallForAllHelp& err) {
        return app.exit(err);
    } catch (const CLI::CallForVersion& err) {
        return app.exit(err);
    } catch (const CLI::ParseError& err) {
        app.exit(err);
        return 1;
    } catch (const UsageError& err) {
        std::cerr << "usage error: " << err.what() << "\n";
        return 1;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 2;
    }
    return 0;
}
