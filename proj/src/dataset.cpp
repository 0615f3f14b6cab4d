#include "pwfn/dataset.hpp"
#include "pwfn/errors.hpp"
#include "pwfn/rng.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace pwfn {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

} // namespace

TrainTest make_blobs(const SyntheticSpec& spec) {
    if (spec.n_classes == 0 || spec.n_features == 0) {
        throw ConfigError("blobs: n_classes and n_features must be positive");
    }
    if (spec.n_train == 0 || spec.n_test == 0) {
        throw ConfigError("blobs: n_train and n_test must be positive");
    }
    const std::size_t total = spec.n_train + spec.n_test;
    RngState rng = RngState::seeded(spec.seed);
    std::vector<double> noise = rng.gaussian(total * spec.n_features);

    std::vector<double> cx(spec.n_classes), cy(spec.n_classes);
    for (std::size_t c = 0; c < spec.n_classes; ++c) {
        const double ang = kTwoPi * static_cast<double>(c) / static_cast<double>(spec.n_classes);
        cx[c] = spec.class_separation * std::cos(ang);
        cy[c] = spec.class_separation * std::sin(ang);
    }

    TrainTest tt;
    tt.train.x = Matrix(spec.n_train, spec.n_features);
    tt.test.x = Matrix(spec.n_test, spec.n_features);
    tt.train.classes = tt.test.classes = spec.n_classes;
    for (std::size_t i = 0; i < total; ++i) {
        const int label = static_cast<int>(i % spec.n_classes);
        Dataset& d = i < spec.n_train ? tt.train : tt.test;
        const std::size_t row = i < spec.n_train ? i : i - spec.n_train;
        for (std::size_t f = 0; f < spec.n_features; ++f) {
            double v = noise[i * spec.n_features + f];
            if (f == 0) v += cx[label];
            else if (f == 1) v += cy[label];
            d.x(row, f) = v;
        }
        d.y.push_back(label);
    }
    return tt;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        // trim ascii whitespace
        const auto b = cell.find_first_not_of(" \t\r");
        const auto e = cell.find_last_not_of(" \t\r");
        out.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

} // namespace

TrainTest load_csv(const CsvSpec& spec) {
    if (spec.test_fraction <= 0.0 || spec.test_fraction >= 1.0) {
        throw ConfigError("csv: test_fraction must be in (0,1)");
    }
    std::ifstream in(spec.path);
    if (!in) throw IoError("csv: cannot open " + spec.path);

    std::string line;
    if (!std::getline(in, line)) throw IoError("csv: empty file " + spec.path);
    const std::vector<std::string> header = split_csv_line(line);
    std::size_t label_col = header.size();
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == spec.label_column) label_col = i;
    }
    if (label_col == header.size()) {
        throw ConfigError("csv: label column '" + spec.label_column + "' not in header");
    }
    const std::size_t n_features = header.size() - 1;
    if (n_features == 0) throw ConfigError("csv: no feature columns");

    std::vector<std::vector<double>> rows;
    std::vector<std::string> labels;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const std::vector<std::string> cells = split_csv_line(line);
        if (cells.size() != header.size()) {
            throw ConfigError("csv: line " + std::to_string(line_no) + " has " +
                              std::to_string(cells.size()) + " cells, header has " +
                              std::to_string(header.size()));
        }
        std::vector<double> feat;
        feat.reserve(n_features);
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i == label_col) {
                labels.push_back(cells[i]);
            } else {
                try {
                    feat.push_back(std::stod(cells[i]));
                } catch (const std::exception&) {
                    throw ConfigError("csv: line " + std::to_string(line_no) +
                                      ": cannot parse '" + cells[i] + "' as a number");
                }
            }
        }
        rows.push_back(std::move(feat));
    }
    if (rows.size() < 2) throw ConfigError("csv: need at least 2 data rows");

    std::map<std::string, int> label_ids;
    for (const auto& l : labels) label_ids.emplace(l, 0);
    int next = 0;
    for (auto& [key, id] : label_ids) id = next++;

    // Seeded shuffle; first chunk becomes the test split.
    std::vector<std::size_t> idx(rows.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    RngState rng = RngState::seeded(spec.seed);
    for (std::size_t i = idx.size() - 1; i > 0; --i) {
        const std::size_t j = static_cast<std::size_t>(rng.next_u64() % (i + 1));
        std::swap(idx[i], idx[j]);
    }
    std::size_t n_test = static_cast<std::size_t>(
        std::llround(spec.test_fraction * static_cast<double>(rows.size())));
    n_test = std::clamp<std::size_t>(n_test, 1, rows.size() - 1);
    const std::size_t n_train = rows.size() - n_test;

    TrainTest tt;
    tt.train.x = Matrix(n_train, n_features);
    tt.test.x = Matrix(n_test, n_features);
    tt.train.classes = tt.test.classes = label_ids.size();
    for (std::size_t i = 0; i < idx.size(); ++i) {
        const bool is_test = i < n_test;
        Dataset& d = is_test ? tt.test : tt.train;
        const std::size_t row = is_test ? i : i - n_test;
        for (std::size_t f = 0; f < n_features; ++f) d.x(row, f) = rows[idx[i]][f];
        d.y.push_back(label_ids.at(labels[idx[i]]));
    }

    if (spec.standardize) {
        for (std::size_t f = 0; f < n_features; ++f) {
            double mean = 0.0;
            for (std::size_t r = 0; r < n_train; ++r) mean += tt.train.x(r, f);
            mean /= static_cast<double>(n_train);
            double ss = 0.0;
            for (std::size_t r = 0; r < n_train; ++r) {
                const double d = tt.train.x(r, f) - mean;
                ss += d * d;
            }
            double sd = std::sqrt(ss / static_cast<double>(n_train));
            if (sd == 0.0) sd = 1.0;
            for (std::size_t r = 0; r < n_train; ++r) {
                tt.train.x(r, f) = (tt.train.x(r, f) - mean) / sd;
            }
            for (std::size_t r = 0; r < n_test; ++r) {
                tt.test.x(r, f) = (tt.test.x(r, f) - mean) / sd;
            }
        }
    }
    return tt;
}

} // namespace pwfn
