#include "lsi/features.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "lsi/texture.hpp"

namespace lsi {

std::string label_fold(std::string_view label) {
    std::string out(label);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

bool label_equal(std::string_view a, std::string_view b) {
    return a.size() == b.size() &&
           std::equal(a.begin(), a.end(), b.begin(), [](unsigned char x, unsigned char y) {
               return std::tolower(x) == std::tolower(y);
           });
}

std::size_t Dataset::attribute_index(std::string_view name) const {
    const auto it = std::find(attribute_names.begin(), attribute_names.end(), name);
    if (it == attribute_names.end()) {
        throw std::invalid_argument("no attribute named '" + std::string(name) + "'");
    }
    return static_cast<std::size_t>(it - attribute_names.begin());
}

FeatureVector build_feature_vector(const GrayImage& img, const std::vector<Roi>& rois) {
    FeatureVector v;
    v.attribute_names.reserve(rois.size() * kMeasureNames.size());
    v.values.reserve(rois.size() * kMeasureNames.size());
    for (std::size_t i = 0; i < rois.size(); ++i) {
        const std::string area =
            rois[i].label.empty() ? "R" + std::to_string(i + 1) : rois[i].label;
        const GrayImage window = extract_window(img, rois[i]);
        const std::array<double, 9> measures = measure_window(window);
        for (std::size_t m = 0; m < measures.size(); ++m) {
            v.attribute_names.push_back(std::string(kMeasureNames[m]) + "_" + area);
            v.values.push_back(measures[m]);
        }
    }
    return v;
}

StandardizationParams fit_standardization(const Dataset& ds) {
    if (ds.size() < 2) {
        throw std::invalid_argument("standardization needs >= 2 rows, got " +
                                    std::to_string(ds.size()));
    }
    const std::size_t n_attrs = ds.attribute_names.size();
    StandardizationParams p;
    p.attribute_names = ds.attribute_names;
    p.mean.assign(n_attrs, 0.0);
    p.stddev.assign(n_attrs, 0.0);
    const double n = static_cast<double>(ds.size());
    for (const auto& row : ds.rows) {
        for (std::size_t a = 0; a < n_attrs; ++a) p.mean[a] += row[a];
    }
    for (std::size_t a = 0; a < n_attrs; ++a) p.mean[a] /= n;
    for (const auto& row : ds.rows) {
        for (std::size_t a = 0; a < n_attrs; ++a) {
            const double d = row[a] - p.mean[a];
            p.stddev[a] += d * d;
        }
    }
    for (std::size_t a = 0; a < n_attrs; ++a) p.stddev[a] = std::sqrt(p.stddev[a] / n);
    return p;
}

namespace {

void require_schema(const std::vector<std::string>& got, const std::vector<std::string>& want,
                    const char* what) {
    if (got != want) {
        throw std::invalid_argument(std::string(what) + ": attribute schema mismatch (" +
                                    std::to_string(got.size()) + " vs " +
                                    std::to_string(want.size()) + " attributes)");
    }
}

} // namespace

FeatureVector apply_standardization(const FeatureVector& v, const StandardizationParams& p) {
    require_schema(v.attribute_names, p.attribute_names, "apply_standardization");
    FeatureVector out{v.attribute_names, std::vector<double>(v.values.size())};
    for (std::size_t a = 0; a < v.values.size(); ++a) {
        out.values[a] = p.stddev[a] == 0.0 ? 0.0 : (v.values[a] - p.mean[a]) / p.stddev[a];
    }
    return out;
}

Dataset apply_standardization(const Dataset& ds, const StandardizationParams& p) {
    require_schema(ds.attribute_names, p.attribute_names, "apply_standardization");
    Dataset out = ds;
    for (auto& row : out.rows) {
        for (std::size_t a = 0; a < row.size(); ++a) {
            row[a] = p.stddev[a] == 0.0 ? 0.0 : (row[a] - p.mean[a]) / p.stddev[a];
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

std::string format_double(double v) {
    char buf[32];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

namespace {

std::vector<std::string> split_line(std::string_view line) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            cells.emplace_back(line.substr(start));
            break;
        }
        cells.emplace_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return cells;
}

} // namespace

std::string to_csv(const Dataset& ds) {
    std::string out = "label";
    for (const auto& name : ds.attribute_names) {
        out += ',';
        out += name;
    }
    out += '\n';
    for (std::size_t i = 0; i < ds.rows.size(); ++i) {
        out += ds.labels[i];
        for (double v : ds.rows[i]) {
            out += ',';
            out += format_double(v);
        }
        out += '\n';
    }
    return out;
}

Dataset parse_csv(std::string_view text) {
    Dataset ds;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    bool header_seen = false;
    while (pos < text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        std::string_view line = text.substr(pos, eol - pos);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        pos = eol + 1;
        ++line_no;
        if (line.empty()) continue;

        const std::vector<std::string> cells = split_line(line);
        if (!header_seen) {
            if (cells[0] != "label") {
                throw CsvError(line_no, "missing header: first column must be 'label', got '" +
                                           cells[0] + "'");
            }
            ds.attribute_names.assign(cells.begin() + 1, cells.end());
            header_seen = true;
            continue;
        }
        if (cells.size() != ds.attribute_names.size() + 1) {
            throw CsvError(line_no, "expected " + std::to_string(ds.attribute_names.size() + 1) +
                                        " cells, got " + std::to_string(cells.size()));
        }
        std::vector<double> row(ds.attribute_names.size());
        for (std::size_t c = 1; c < cells.size(); ++c) {
            const std::string& cell = cells[c];
            double value = 0.0;
            const auto [end, ec] =
                std::from_chars(cell.data(), cell.data() + cell.size(), value);
            if (ec != std::errc() || end != cell.data() + cell.size()) {
                throw CsvError(line_no, "column " + std::to_string(c + 1) +
                                            ": not a number: '" + cell + "'");
            }
            row[c - 1] = value;
        }
        ds.labels.push_back(cells[0]);
        ds.rows.push_back(std::move(row));
    }
    if (!header_seen) {
        throw CsvError(1, "missing header row");
    }
    return ds;
}

Dataset read_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open csv file: " + path.string());
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_csv(buffer.str());
}

void write_csv(const Dataset& ds, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot open for writing: " + path.string());
    }
    out << to_csv(ds);
    if (!out) {
        throw std::runtime_error("write failed: " + path.string());
    }
}

// ---------------------------------------------------------------------------
// Embedded sample dataset
// ---------------------------------------------------------------------------

Dataset sample_dataset() {
    static const double kNormal[10][9] = {
        {378, 6002, 77.47, 0.5,  883, 7621, 87.3,  0.47, 69.95},
        {385, 5233, 72.34, 0.5,  612, 6580, 81.12, 0.48, 65.29},
        {247, 5215, 72.21, 0.46, 491, 6526, 80.78, 0.44, 65.31},
        {337, 5726, 75.67, 0.5,  606, 7273, 85.28, 0.49, 68.62},
        {370, 5634, 75.06, 0.55, 727, 7110, 84.32, 0.53, 67.79},
        {398, 5445, 73.79, 0.51, 607, 6841, 82.71, 0.49, 67.07},
        {340, 5800, 76.16, 0.46, 646, 7379, 85.9,  0.44, 68.61},
        {386, 5390, 73.42, 0.48, 670, 6865, 82.86, 0.47, 66.72},
        {329, 3788, 61.55, 0.59, 532, 4861, 69.72, 0.57, 55.88},
        {397, 6344, 79.65, 0.46, 655, 8005, 89.47, 0.44, 71.88},
    };
    static const double kMicroCollapse[10][9] = {
        {343, 3266, 57.15, 0.56, 511, 4138, 64.33, 0.53, 51.3},
        {334, 3499, 59.15, 0.58, 498, 4392, 66.27, 0.56, 52.88},
        {362, 4194, 64.76, 0.4,  501, 5226, 72.29, 0.36, 57.98},
        {327, 3112, 55.79, 0.51, 471, 3888, 62.35, 0.48, 49.88},
        {316, 4201, 64.82, 0.5,  537, 5288, 72.72, 0.47, 58.2},
        {294, 2977, 54.56, 0.54, 511, 3755, 61.28, 0.52, 48.9},
        {325, 3770, 61.4,  0.53, 530, 4723, 68.72, 0.49, 55.04},
        {346, 3442, 58.67, 0.42, 512, 4273, 65.37, 0.38, 52.54},
        {275, 2884, 53.7,  0.38, 438, 3593, 59.94, 0.35, 47.95},
        {346, 3629, 60.24, 0.32, 495, 4542, 67.39, 0.28, 53.95},
    };

    Dataset ds;
    ds.attribute_names.assign(kMeasureNames.begin(), kMeasureNames.end());
    ds.rows.reserve(20);
    ds.labels.reserve(20);
    for (const auto& r : kNormal) {
        ds.rows.emplace_back(r, r + 9);
        ds.labels.emplace_back("normal");
    }
    for (const auto& r : kMicroCollapse) {
        ds.rows.emplace_back(r, r + 9);
        ds.labels.emplace_back("micro-collapse");
    }
    return ds;
}

} // namespace lsi
