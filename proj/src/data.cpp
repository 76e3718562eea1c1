#include "tfed/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "tfed/errors.hpp"

namespace tfed::data {

namespace {

std::vector<std::string> split_line(const std::string& line, char delim) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, delim)) cells.push_back(cell);
    if (!line.empty() && line.back() == delim) cells.emplace_back();
    return cells;
}

double parse_double(const std::string& cell, std::size_t line_no) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(cell, &pos);
        if (pos != cell.size()) throw std::invalid_argument("trailing junk");
        return v;
    } catch (const std::exception&) {
        throw ParseError("line " + std::to_string(line_no) + ": non-numeric cell '" + cell + "'");
    }
}

int parse_int(const std::string& cell, std::size_t line_no) {
    const double v = parse_double(cell, line_no);
    if (v != std::floor(v))
        throw ParseError("line " + std::to_string(line_no) + ": expected integer, got '" + cell + "'");
    return static_cast<int>(v);
}

struct SegmentKey {
    int cls;
    int run;
    bool operator<(const SegmentKey& o) const {
        return cls != o.cls ? cls < o.cls : run < o.run;
    }
};

// Appends rows of one simulation segment to a dataset under construction.
void append_segment(TabularDataset& ds, const std::vector<const SimulationRecord*>& rows,
                    int label, int cls, int run) {
    const int seg_id = static_cast<int>(ds.segment_keys.size());
    ds.segment_keys.emplace_back(cls, run);
    for (const SimulationRecord* r : rows) {
        ds.values.insert(ds.values.end(), r->features.begin(), r->features.end());
        ds.labels.push_back(label);
        ds.segment_ids.push_back(seg_id);
        ++ds.rows;
    }
}

}  // namespace

std::vector<SimulationRecord> ingest_csv(const std::string& path, const CsvFormatSpec& spec) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);

    std::string line;
    if (!std::getline(in, line)) throw ParseError(path + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto header = split_line(line, spec.delimiter);

    auto find_col = [&](const std::string& name) -> std::size_t {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) throw ParseError(path + ": missing column '" + name + "'");
        return static_cast<std::size_t>(it - header.begin());
    };
    const std::size_t fault_col = find_col(spec.fault_column);
    const std::size_t run_col = find_col(spec.run_column);
    const std::size_t sample_col = find_col(spec.sample_column);

    std::vector<std::size_t> feature_cols;
    for (std::size_t i = 0; i < header.size(); ++i)
        if (i != fault_col && i != run_col && i != sample_col) feature_cols.push_back(i);
    if (feature_cols.empty()) throw ParseError(path + ": no feature columns");

    std::vector<SimulationRecord> records;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto cells = split_line(line, spec.delimiter);
        if (cells.size() != header.size())
            throw ParseError("line " + std::to_string(line_no) + ": expected " +
                             std::to_string(header.size()) + " cells, got " +
                             std::to_string(cells.size()));
        SimulationRecord rec;
        rec.fault_class = parse_int(cells[fault_col], line_no);
        rec.simulation_run = parse_int(cells[run_col], line_no);
        rec.sample_index = parse_int(cells[sample_col], line_no);
        rec.features.reserve(feature_cols.size());
        for (std::size_t c : feature_cols) rec.features.push_back(parse_double(cells[c], line_no));
        records.push_back(std::move(rec));
    }
    std::stable_sort(records.begin(), records.end(),
                     [](const SimulationRecord& a, const SimulationRecord& b) {
                         if (a.fault_class != b.fault_class) return a.fault_class < b.fault_class;
                         if (a.simulation_run != b.simulation_run)
                             return a.simulation_run < b.simulation_run;
                         return a.sample_index < b.sample_index;
                     });
    return records;
}

void write_csv(const std::string& path, const std::vector<SimulationRecord>& records,
               const CsvFormatSpec& spec) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open " + path + " for writing");
    const std::size_t n = records.empty() ? 0 : records.front().features.size();
    out << spec.fault_column << spec.delimiter << spec.run_column << spec.delimiter
        << spec.sample_column;
    for (std::size_t i = 0; i < n; ++i) out << spec.delimiter << "x" << (i + 1);
    out << "\n";
    out.precision(17);
    for (const auto& r : records) {
        out << r.fault_class << spec.delimiter << r.simulation_run << spec.delimiter
            << r.sample_index;
        for (double v : r.features) out << spec.delimiter << v;
        out << "\n";
    }
}

SplitResult apply_split_recipe(const std::vector<SimulationRecord>& records,
                               const SplitRecipe& recipe) {
    if (records.empty()) throw std::invalid_argument("no records");
    const std::size_t n_features = records.front().features.size();

    // Group rows by (class, run), keeping sample order.
    std::map<SegmentKey, std::vector<const SimulationRecord*>> segments;
    for (const auto& r : records) {
        if (r.features.size() != n_features)
            throw ParseError("inconsistent feature arity across records");
        segments[{r.fault_class, r.simulation_run}].push_back(&r);
    }

    // Dense re-indexing of the retained classes.
    std::map<int, int> class_map;
    for (const auto& [key, rows] : segments)
        if (!recipe.removed_classes.count(key.cls)) class_map.emplace(key.cls, 0);
    int next = 0;
    for (auto& [cls, dense] : class_map) dense = next++;
    if (class_map.empty()) throw std::invalid_argument("recipe removed every class");

    // Runs of each class go to train, then validation, then test pools in
    // ascending run-id order.
    std::map<int, std::vector<int>> runs_by_class;
    for (const auto& [key, rows] : segments)
        if (class_map.count(key.cls)) runs_by_class[key.cls].push_back(key.run);

    SplitResult out;
    out.class_map = class_map;
    auto& tr = out.train;
    auto& va = out.validation;
    auto& te = out.test;
    tr.cols = va.cols = te.cols = n_features;

    for (const auto& [cls, runs] : runs_by_class) {
        const std::size_t want =
            recipe.train_runs_per_class + recipe.val_runs_per_class + recipe.test_runs_per_class;
        if (runs.size() < want)
            throw ConfigError("class " + std::to_string(cls) + " has " +
                              std::to_string(runs.size()) + " runs, recipe needs " +
                              std::to_string(want));
        const int label = class_map.at(cls);
        for (std::size_t i = 0; i < want; ++i) {
            const int run = runs[i];
            const auto& rows = segments.at({cls, run});
            std::vector<const SimulationRecord*> kept;
            if (i < recipe.train_runs_per_class + recipe.val_runs_per_class) {
                if (rows.size() <= recipe.drop_first)
                    throw ConfigError("run (" + std::to_string(cls) + "," + std::to_string(run) +
                                      ") shorter than drop_first");
                kept.assign(rows.begin() + static_cast<long>(recipe.drop_first), rows.end());
            } else {
                if (rows.size() < recipe.test_keep_to)
                    throw ConfigError("run (" + std::to_string(cls) + "," + std::to_string(run) +
                                      ") shorter than test_keep_to");
                kept.assign(rows.begin() + static_cast<long>(recipe.test_keep_from - 1),
                            rows.begin() + static_cast<long>(recipe.test_keep_to));
            }
            TabularDataset& dst = (i < recipe.train_runs_per_class)
                                      ? tr
                                      : (i < recipe.train_runs_per_class + recipe.val_runs_per_class
                                             ? va
                                             : te);
            append_segment(dst, kept, label, cls, run);
        }
    }
    return out;
}

Scaler fit_scaler(const TabularDataset& train) {
    train.validate();
    Scaler s;
    s.mean.assign(train.cols, 0.0);
    s.stddev.assign(train.cols, 0.0);
    const double m = static_cast<double>(train.rows);
    for (std::size_t r = 0; r < train.rows; ++r)
        for (std::size_t c = 0; c < train.cols; ++c) s.mean[c] += train.at(r, c);
    for (std::size_t c = 0; c < train.cols; ++c) s.mean[c] /= m;
    for (std::size_t r = 0; r < train.rows; ++r)
        for (std::size_t c = 0; c < train.cols; ++c) {
            const double d = train.at(r, c) - s.mean[c];
            s.stddev[c] += d * d;
        }
    for (std::size_t c = 0; c < train.cols; ++c) {
        s.stddev[c] = std::sqrt(s.stddev[c] / m);  // population convention
        if (s.stddev[c] < 1e-12) s.stddev[c] = 1.0;
    }
    return s;
}

TabularDataset scale(const TabularDataset& dataset, const Scaler& scaler) {
    if (scaler.mean.size() != dataset.cols)
        throw std::invalid_argument("scaler column count does not match dataset");
    TabularDataset out = dataset;
    for (std::size_t r = 0; r < out.rows; ++r)
        for (std::size_t c = 0; c < out.cols; ++c)
            out.at(r, c) = (out.at(r, c) - scaler.mean[c]) / scaler.stddev[c];
    return out;
}

std::string Scaler::to_json() const {
    nlohmann::ordered_json j;
    j["mean"] = mean;
    j["stddev"] = stddev;
    return j.dump(2);
}

namespace {

// Extracts the segments of `src` assigned to one participant, in source order.
TabularDataset take_segments(const TabularDataset& src,
                             const std::vector<std::pair<int, int>>& keys) {
    TabularDataset out;
    out.cols = src.cols;
    out.feature_names = src.feature_names;
    std::set<std::pair<int, int>> wanted(keys.begin(), keys.end());
    int seg_out = -1;
    int last_src_seg = -1;
    for (std::size_t r = 0; r < src.rows; ++r) {
        const int seg = src.segment_ids[r];
        if (!wanted.count(src.segment_keys[seg])) continue;
        if (seg != last_src_seg) {
            last_src_seg = seg;
            ++seg_out;
            out.segment_keys.push_back(src.segment_keys[seg]);
        }
        out.values.insert(out.values.end(), src.values.begin() + r * src.cols,
                          src.values.begin() + (r + 1) * src.cols);
        out.labels.push_back(src.labels[r]);
        out.segment_ids.push_back(seg_out);
        ++out.rows;
    }
    return out;
}

void assign_round_robin(const TabularDataset& src, std::size_t n_participants,
                        std::vector<std::vector<std::pair<int, int>>>& out) {
    // Per class, runs in ascending run-id order, dealt round-robin.
    std::map<int, std::vector<int>> runs_by_class;
    for (const auto& [cls, run] : src.segment_keys) runs_by_class[cls].push_back(run);
    for (auto& [cls, runs] : runs_by_class) {
        std::sort(runs.begin(), runs.end());
        for (std::size_t i = 0; i < runs.size(); ++i)
            out[i % n_participants].emplace_back(cls, runs[i]);
    }
}

}  // namespace

PartitionResult partition(const SplitResult& splits, std::size_t n_participants) {
    if (n_participants < 1) throw std::invalid_argument("need at least one participant");

    // Every class must contribute at least one run per participant and split.
    for (const auto* ds : {&splits.train, &splits.validation, &splits.test}) {
        std::map<int, std::size_t> count;
        for (const auto& [cls, run] : ds->segment_keys) ++count[cls];
        for (const auto& [cls, c] : count)
            if (c < n_participants)
                throw ConfigError("class " + std::to_string(cls) + " has only " +
                                  std::to_string(c) + " runs for " +
                                  std::to_string(n_participants) + " participants");
    }

    PartitionResult result;
    result.plan.participants.resize(n_participants);
    std::vector<std::vector<std::pair<int, int>>> train_keys(n_participants),
        val_keys(n_participants), test_keys(n_participants);
    assign_round_robin(splits.train, n_participants, train_keys);
    assign_round_robin(splits.validation, n_participants, val_keys);
    assign_round_robin(splits.test, n_participants, test_keys);

    for (std::size_t p = 0; p < n_participants; ++p) {
        result.plan.participants[p].train = train_keys[p];
        result.plan.participants[p].validation = val_keys[p];
        result.plan.participants[p].test = test_keys[p];
        ParticipantData pd;
        pd.train = take_segments(splits.train, train_keys[p]);
        pd.validation = take_segments(splits.validation, val_keys[p]);
        pd.test = take_segments(splits.test, test_keys[p]);
        result.participants.push_back(std::move(pd));
    }
    return result;
}

std::vector<SimulationRecord> synthesize(const SynthSpec& spec) {
    if (spec.n_features < 1 || spec.n_classes < 1 || spec.runs_per_class < 1 ||
        spec.samples_per_run < 2)
        throw std::invalid_argument("invalid synthetic spec");

    // Class-specific fault signatures: a sign/strength pattern over features
    // and an oscillation period, all derived from the spec seed.
    std::vector<std::vector<double>> shift_pattern(spec.n_classes,
                                                   std::vector<double>(spec.n_features, 0.0));
    std::vector<std::size_t> osc_period(spec.n_classes, 0);
    for (std::size_t cls = 1; cls < spec.n_classes; ++cls) {
        std::mt19937_64 rng(spec.seed * 7919 + cls);
        std::uniform_int_distribution<int> sign(0, 2);
        for (std::size_t f = 0; f < spec.n_features; ++f)
            shift_pattern[cls][f] = static_cast<double>(sign(rng) - 1);  // -1, 0, +1
        // A class whose pattern came out all-zero still needs a signature.
        bool all_zero = true;
        for (double v : shift_pattern[cls]) all_zero = all_zero && v == 0.0;
        if (all_zero) shift_pattern[cls][cls % spec.n_features] = 1.0;
        osc_period[cls] = 4 + (cls * 3) % 13;
    }

    std::vector<SimulationRecord> records;
    records.reserve(spec.n_classes * spec.runs_per_class * spec.samples_per_run);
    const double stat_sigma =
        spec.noise_sigma / std::sqrt(1.0 - spec.ar_coeff * spec.ar_coeff);

    for (std::size_t cls = 0; cls < spec.n_classes; ++cls) {
        for (std::size_t run = 1; run <= spec.runs_per_class; ++run) {
            std::mt19937_64 rng(spec.seed ^ (cls * 1000003ULL + run * 9176ULL + 17ULL));
            std::normal_distribution<double> noise(0.0, spec.noise_sigma);
            std::vector<double> state(spec.n_features, 0.0);
            std::vector<double> walk(spec.n_features, 0.0);
            for (std::size_t t = 0; t < spec.samples_per_run; ++t) {
                SimulationRecord rec;
                rec.fault_class = static_cast<int>(cls);
                rec.simulation_run = static_cast<int>(run);
                rec.sample_index = static_cast<int>(t + 1);
                rec.features.resize(spec.n_features);
                for (std::size_t f = 0; f < spec.n_features; ++f) {
                    state[f] = spec.ar_coeff * state[f] + noise(rng);
                    double v = state[f];
                    if (spec.seasonal_amplitude > 0.0)
                        v += spec.seasonal_amplitude *
                             std::sin(2.0 * std::numbers::pi * static_cast<double>(t) /
                                      static_cast<double>(spec.seasonal_period));
                    if (spec.random_walk_trend) {
                        walk[f] += 0.25 * noise(rng);
                        v += walk[f];
                    }
                    if (cls > 0 && t >= spec.onset_sample) {
                        v += spec.fault_shift_sigma * stat_sigma * shift_pattern[cls][f];
                        if (spec.fault_osc_amplitude > 0.0)
                            v += spec.fault_osc_amplitude * stat_sigma *
                                 std::sin(2.0 * std::numbers::pi * static_cast<double>(t) /
                                          static_cast<double>(osc_period[cls]));
                    }
                    rec.features[f] = v;
                }
                records.push_back(std::move(rec));
            }
        }
    }
    return records;
}

}  // namespace tfed::data
