#include "tfed/experiment.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "tfed/errors.hpp"
#include "tfed/features.hpp"
#include "tfed/timeseries.hpp"

namespace tfed::experiment {

using nlohmann::json;
using nlohmann::ordered_json;

std::uint64_t fnv1a(const void* bytes, std::size_t len, std::uint64_t h) {
    const auto* p = static_cast<const std::uint8_t*>(bytes);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 1099511628211ULL;
    }
    return h;
}

std::string to_string(Pipeline p) {
    switch (p) {
        case Pipeline::Base: return "base";
        case Pipeline::FeatureEngineering: return "feature_engineering";
        case Pipeline::Stationary: return "stationary";
        case Pipeline::All: return "all";
    }
    return "base";
}

std::string to_string(federation::Paradigm p) {
    switch (p) {
        case federation::Paradigm::DFL: return "DFL";
        case federation::Paradigm::SDFL: return "SDFL";
        case federation::Paradigm::CFL: return "CFL";
    }
    return "DFL";
}

std::string to_string(federation::TopologyKind k) {
    switch (k) {
        case federation::TopologyKind::Fully: return "fully";
        case federation::TopologyKind::Ring: return "ring";
        case federation::TopologyKind::Star: return "star";
    }
    return "fully";
}

namespace {

Pipeline pipeline_from_string(const std::string& s) {
    if (s == "base") return Pipeline::Base;
    if (s == "feature_engineering") return Pipeline::FeatureEngineering;
    if (s == "stationary") return Pipeline::Stationary;
    if (s == "all") return Pipeline::All;
    throw ConfigError("pipeline: unknown value '" + s + "'");
}

federation::Paradigm paradigm_from_string(const std::string& s) {
    if (s == "DFL") return federation::Paradigm::DFL;
    if (s == "SDFL") return federation::Paradigm::SDFL;
    if (s == "CFL") return federation::Paradigm::CFL;
    throw ConfigError("paradigm: unknown value '" + s + "'");
}

federation::TopologyKind topology_from_string(const std::string& s) {
    if (s == "fully") return federation::TopologyKind::Fully;
    if (s == "ring") return federation::TopologyKind::Ring;
    if (s == "star") return federation::TopologyKind::Star;
    throw ConfigError("topology: unknown value '" + s + "'");
}

ordered_json prf_json(const metrics::Prf& p) {
    return ordered_json{{"precision", p.precision}, {"recall", p.recall}, {"f1", p.f1}};
}

}  // namespace

void ExperimentConfig::validate() const {
    if (participants < 2) throw ConfigError("participants: need at least 2");
    if (paradigm == federation::Paradigm::CFL) {
        if (topology != federation::TopologyKind::Star)
            throw ConfigError("topology: CFL requires star topology");
    } else {
        if (topology == federation::TopologyKind::Star)
            throw ConfigError("topology: DFL/SDFL require fully or ring topology");
        if (topology == federation::TopologyKind::Ring && participants < 3)
            throw ConfigError("participants: ring topology needs at least 3");
    }
    if (model.ts < 1) throw ConfigError("model.ts: must be >= 1");
    if ((pipeline == Pipeline::FeatureEngineering || pipeline == Pipeline::All) && model.ts < 4)
        throw ConfigError("model.ts: feature engineering requires ts >= 4");
    if (model.hidden1 < 1 || model.hidden2 < 1)
        throw ConfigError("model.hidden: layer sizes must be positive");
    if (train.batch_size < 1) throw ConfigError("train.batch_size: must be >= 1");
    if (source.kind == DataSourceConfig::Kind::Csv && source.csv_path.empty())
        throw ConfigError("data.path: csv source needs a path");
}

std::string ExperimentConfig::to_json() const {
    ordered_json j;
    ordered_json jd;
    if (source.kind == DataSourceConfig::Kind::Synthetic) {
        jd["kind"] = "synthetic";
        const auto& s = source.synth;
        jd["synth"] = ordered_json{{"n_features", s.n_features},
                                   {"n_classes", s.n_classes},
                                   {"runs_per_class", s.runs_per_class},
                                   {"samples_per_run", s.samples_per_run},
                                   {"seed", s.seed},
                                   {"ar_coeff", s.ar_coeff},
                                   {"noise_sigma", s.noise_sigma},
                                   {"seasonal_amplitude", s.seasonal_amplitude},
                                   {"seasonal_period", s.seasonal_period},
                                   {"random_walk_trend", s.random_walk_trend},
                                   {"fault_shift_sigma", s.fault_shift_sigma},
                                   {"fault_osc_amplitude", s.fault_osc_amplitude},
                                   {"onset_sample", s.onset_sample}};
    } else {
        jd["kind"] = "csv";
        jd["path"] = source.csv_path;
        jd["format"] = ordered_json{{"delimiter", std::string(1, source.csv_format.delimiter)},
                                    {"fault_column", source.csv_format.fault_column},
                                    {"run_column", source.csv_format.run_column},
                                    {"sample_column", source.csv_format.sample_column}};
    }
    j["data"] = jd;
    j["recipe"] = ordered_json{
        {"train_runs_per_class", recipe.train_runs_per_class},
        {"val_runs_per_class", recipe.val_runs_per_class},
        {"test_runs_per_class", recipe.test_runs_per_class},
        {"drop_first", recipe.drop_first},
        {"test_keep_from", recipe.test_keep_from},
        {"test_keep_to", recipe.test_keep_to},
        {"removed_classes", std::vector<int>(recipe.removed_classes.begin(),
                                             recipe.removed_classes.end())}};
    j["pipeline"] = to_string(pipeline);
    j["paradigm"] = to_string(paradigm);
    j["topology"] = to_string(topology);
    j["participants"] = participants;
    j["rounds"] = rounds;
    j["model"] = ordered_json{{"hidden1", model.hidden1},
                              {"hidden2", model.hidden2},
                              {"ts", model.ts},
                              {"num_classes", model.num_classes}};
    j["train"] = ordered_json{{"batch_size", train.batch_size},
                              {"epochs", train.epochs},
                              {"learning_rate", train.learning_rate},
                              {"beta1", train.adam_beta1},
                              {"beta2", train.adam_beta2},
                              {"epsilon", train.adam_epsilon},
                              {"clip_norm", train.clip_norm}};
    ordered_json js{{"alpha", stationary.adf.alpha},
                    {"ma_window", stationary.ma_window},
                    {"period_min_lag", stationary.period_min_lag},
                    {"period_max_lag", stationary.period_max_lag},
                    {"ac_threshold", stationary.ac_threshold}};
    if (stationary.adf.max_lag) js["max_adf_lag"] = *stationary.adf.max_lag;
    else js["max_adf_lag"] = nullptr;
    j["stationary"] = js;
    j["seed"] = seed;
    j["output_dir"] = output_dir;
    return j.dump(2);
}

ExperimentConfig ExperimentConfig::from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    ExperimentConfig c;
    // Defaults that only make sense for synthetic data: the model comes in
    // small and num_classes auto-derives from the data.
    c.model.num_classes = 0;
    c.model.hidden1 = 16;
    c.model.hidden2 = 8;

    if (j.contains("data")) {
        const auto& jd = j["data"];
        const std::string kind = jd.value("kind", "synthetic");
        if (kind == "synthetic") {
            c.source.kind = DataSourceConfig::Kind::Synthetic;
            if (jd.contains("synth")) {
                const auto& js = jd["synth"];
                auto& s = c.source.synth;
                s.n_features = js.value("n_features", s.n_features);
                s.n_classes = js.value("n_classes", s.n_classes);
                s.runs_per_class = js.value("runs_per_class", s.runs_per_class);
                s.samples_per_run = js.value("samples_per_run", s.samples_per_run);
                s.seed = js.value("seed", s.seed);
                s.ar_coeff = js.value("ar_coeff", s.ar_coeff);
                s.noise_sigma = js.value("noise_sigma", s.noise_sigma);
                s.seasonal_amplitude = js.value("seasonal_amplitude", s.seasonal_amplitude);
                s.seasonal_period = js.value("seasonal_period", s.seasonal_period);
                s.random_walk_trend = js.value("random_walk_trend", s.random_walk_trend);
                s.fault_shift_sigma = js.value("fault_shift_sigma", s.fault_shift_sigma);
                s.fault_osc_amplitude = js.value("fault_osc_amplitude", s.fault_osc_amplitude);
                s.onset_sample = js.value("onset_sample", s.onset_sample);
            }
        } else if (kind == "csv") {
            c.source.kind = DataSourceConfig::Kind::Csv;
            c.source.csv_path = jd.value("path", "");
            if (jd.contains("format")) {
                const auto& jf = jd["format"];
                const std::string d = jf.value("delimiter", ",");
                if (d.size() != 1) throw ConfigError("data.format.delimiter: one character");
                c.source.csv_format.delimiter = d[0];
                c.source.csv_format.fault_column =
                    jf.value("fault_column", c.source.csv_format.fault_column);
                c.source.csv_format.run_column =
                    jf.value("run_column", c.source.csv_format.run_column);
                c.source.csv_format.sample_column =
                    jf.value("sample_column", c.source.csv_format.sample_column);
            }
        } else {
            throw ConfigError("data.kind: unknown value '" + kind + "'");
        }
    }

    if (j.contains("recipe")) {
        const auto& jr = j["recipe"];
        c.recipe.train_runs_per_class = jr.value("train_runs_per_class", c.recipe.train_runs_per_class);
        c.recipe.val_runs_per_class = jr.value("val_runs_per_class", c.recipe.val_runs_per_class);
        c.recipe.test_runs_per_class = jr.value("test_runs_per_class", c.recipe.test_runs_per_class);
        c.recipe.drop_first = jr.value("drop_first", c.recipe.drop_first);
        c.recipe.test_keep_from = jr.value("test_keep_from", c.recipe.test_keep_from);
        c.recipe.test_keep_to = jr.value("test_keep_to", c.recipe.test_keep_to);
        if (jr.contains("removed_classes")) {
            c.recipe.removed_classes.clear();
            for (int cls : jr["removed_classes"]) c.recipe.removed_classes.insert(cls);
        }
    } else if (c.source.kind == DataSourceConfig::Kind::Synthetic) {
        // Scale the recipe to the synthetic run shape: split runs 50/25/25 and
        // trim the fault-onset prefix on every split.
        const auto& s = c.source.synth;
        c.recipe.train_runs_per_class = s.runs_per_class / 2;
        c.recipe.val_runs_per_class = s.runs_per_class / 4;
        c.recipe.test_runs_per_class = s.runs_per_class / 4;
        c.recipe.drop_first = s.onset_sample;
        c.recipe.test_keep_from = s.onset_sample + 1;
        c.recipe.test_keep_to = s.samples_per_run;
        c.recipe.removed_classes.clear();
    }

    if (j.contains("pipeline")) c.pipeline = pipeline_from_string(j["pipeline"].get<std::string>());
    if (j.contains("paradigm")) c.paradigm = paradigm_from_string(j["paradigm"].get<std::string>());
    if (j.contains("topology")) c.topology = topology_from_string(j["topology"].get<std::string>());
    c.participants = j.value("participants", c.participants);
    c.rounds = j.value("rounds", c.rounds);
    if (j.contains("model")) {
        const auto& jm = j["model"];
        c.model.hidden1 = jm.value("hidden1", c.model.hidden1);
        c.model.hidden2 = jm.value("hidden2", c.model.hidden2);
        c.model.ts = jm.value("ts", c.model.ts);
        c.model.num_classes = jm.value("num_classes", c.model.num_classes);
    }
    if (j.contains("train")) {
        const auto& jt = j["train"];
        c.train.batch_size = jt.value("batch_size", c.train.batch_size);
        c.train.epochs = jt.value("epochs", c.train.epochs);
        c.train.learning_rate = jt.value("learning_rate", c.train.learning_rate);
        c.train.adam_beta1 = jt.value("beta1", c.train.adam_beta1);
        c.train.adam_beta2 = jt.value("beta2", c.train.adam_beta2);
        c.train.adam_epsilon = jt.value("epsilon", c.train.adam_epsilon);
        c.train.clip_norm = jt.value("clip_norm", c.train.clip_norm);
    }
    if (j.contains("stationary")) {
        const auto& js = j["stationary"];
        c.stationary.adf.alpha = js.value("alpha", c.stationary.adf.alpha);
        c.stationary.ma_window = js.value("ma_window", c.stationary.ma_window);
        c.stationary.period_min_lag = js.value("period_min_lag", c.stationary.period_min_lag);
        c.stationary.period_max_lag = js.value("period_max_lag", c.stationary.period_max_lag);
        c.stationary.ac_threshold = js.value("ac_threshold", c.stationary.ac_threshold);
        if (js.contains("max_adf_lag") && !js["max_adf_lag"].is_null())
            c.stationary.adf.max_lag = js["max_adf_lag"].get<std::size_t>();
    }
    c.seed = j.value("seed", c.seed);
    c.output_dir = j.value("output_dir", c.output_dir);
    return c;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_json(buf.str());
}

std::uint64_t ExperimentConfig::digest() const {
    const std::string text = to_json();
    return fnv1a(text.data(), text.size());
}

namespace {

TabularDataset normal_rows(const TabularDataset& src) {
    TabularDataset out;
    out.cols = src.cols;
    int seg_out = -1, last_seg = -1;
    for (std::size_t r = 0; r < src.rows; ++r) {
        if (src.labels[r] != 0) continue;
        const int seg = src.segment_ids.empty() ? 0 : src.segment_ids[r];
        if (seg != last_seg) {
            last_seg = seg;
            ++seg_out;
            out.segment_keys.push_back(
                src.segment_keys.empty() ? std::pair<int, int>{0, seg}
                                         : src.segment_keys[static_cast<std::size_t>(seg)]);
        }
        out.values.insert(out.values.end(), src.values.begin() + r * src.cols,
                          src.values.begin() + (r + 1) * src.cols);
        out.labels.push_back(0);
        out.segment_ids.push_back(seg_out);
        ++out.rows;
    }
    return out;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    std::uint64_t fields[3] = {seed, a, b};
    return fnv1a(fields, sizeof(fields));
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& config) {
    config.validate();

    std::vector<data::SimulationRecord> records =
        config.source.kind == DataSourceConfig::Kind::Synthetic
            ? data::synthesize(config.source.synth)
            : data::ingest_csv(config.source.csv_path, config.source.csv_format);

    data::SplitResult splits = data::apply_split_recipe(records, config.recipe);
    records.clear();
    records.shrink_to_fit();

    // Scaler fit on the training split only; validation/test reuse it.
    const data::Scaler scaler = data::fit_scaler(splits.train);
    splits.train = data::scale(splits.train, scaler);
    splits.validation = data::scale(splits.validation, scaler);
    splits.test = data::scale(splits.test, scaler);

    // Stationary plan fit on normal-class training rows, applied everywhere.
    stationary::StationaryPlan plan;
    plan.columns.resize(splits.train.cols);
    const bool use_stationary =
        config.pipeline == Pipeline::Stationary || config.pipeline == Pipeline::All;
    if (use_stationary) {
        plan = stationary::fit_plan(normal_rows(splits.train), config.stationary);
        splits.train = stationary::apply_plan(splits.train, plan);
        splits.validation = stationary::apply_plan(splits.validation, plan);
        splits.test = stationary::apply_plan(splits.test, plan);
    }

    const data::PartitionResult parts = data::partition(splits, config.participants);
    const bool use_features =
        config.pipeline == Pipeline::FeatureEngineering || config.pipeline == Pipeline::All;

    model::ModelConfig mc = config.model;
    mc.input_dim = use_features ? 5 * splits.train.cols : splits.train.cols;
    const std::size_t derived_classes = splits.class_map.size();
    if (mc.num_classes == 0) mc.num_classes = derived_classes;
    if (mc.num_classes < derived_classes)
        throw ConfigError("model.num_classes: smaller than the class count in the data");

    // Common initial weights for every participant.
    const model::ModelParameters initial = model::ModelParameters::init(mc, config.seed);

    federation::FederationState state;
    state.paradigm = config.paradigm;
    state.train_config = config.train;
    const bool cfl = config.paradigm == federation::Paradigm::CFL;
    const std::size_t nodes = cfl ? config.participants + 1 : config.participants;
    state.topology = federation::build_topology(config.topology, nodes, 0);

    auto prepare = [&](const TabularDataset& t) {
        WindowedDataset w = window(t, mc.ts, BoundaryPolicy::PerSegment);
        if (use_features) w = features::engineer_features(w);
        return w;
    };

    for (std::size_t node = 0; node < nodes; ++node) {
        federation::Participant p;
        p.id = node;
        p.params = initial;
        if (cfl && node == 0) {
            p.trains = false;  // pure aggregation server
        } else {
            const std::size_t trainer = cfl ? node - 1 : node;
            const auto& pd = parts.participants[trainer];
            p.train = prepare(pd.train);
            p.validation = prepare(pd.validation);
            p.test = prepare(pd.test);
        }
        state.participants.push_back(std::move(p));
    }

    ExperimentReport report;
    report.class_map = splits.class_map;
    report.scaler = scaler;
    report.plan = plan;

    std::vector<std::size_t> trainer_nodes;
    for (const auto& p : state.participants)
        if (p.trains) trainer_nodes.push_back(p.id);

    for (std::size_t round = 0; round < config.rounds; ++round) {
        for (std::size_t i = 0; i < trainer_nodes.size(); ++i)
            state.participants[trainer_nodes[i]].seed = mix_seed(config.seed, i, round);
        federation::run_round(state, round);
        for (std::size_t i = 0; i < trainer_nodes.size(); ++i) {
            const auto& p = state.participants[trainer_nodes[i]];
            const std::vector<int> preds = model::predict(p.params, p.validation);
            const auto cm = metrics::confusion(preds, p.validation.labels, mc.num_classes);
            ParticipantRoundMetrics m;
            m.round = round;
            m.participant = i;
            m.train_loss = p.last_log.epoch_loss.empty() ? 0.0 : p.last_log.epoch_loss.back();
            m.val_macro = metrics::precision_recall_f1(cm, metrics::Averaging::Macro);
            m.val_weighted = metrics::precision_recall_f1(cm, metrics::Averaging::Weighted);
            report.rounds.push_back(m);
        }
    }

    metrics::Prf macro_sum, weighted_sum;
    for (std::size_t i = 0; i < trainer_nodes.size(); ++i) {
        const auto& p = state.participants[trainer_nodes[i]];
        const std::vector<int> preds = model::predict(p.params, p.test);
        ParticipantFinal f;
        f.participant = i;
        f.test_confusion = metrics::confusion(preds, p.test.labels, mc.num_classes);
        f.test_macro = metrics::precision_recall_f1(f.test_confusion, metrics::Averaging::Macro);
        f.test_weighted =
            metrics::precision_recall_f1(f.test_confusion, metrics::Averaging::Weighted);
        f.train_windows = p.train.windows;
        f.val_windows = p.validation.windows;
        f.test_windows = p.test.windows;
        f.bytes_sent = state.ledger.total_sent(p.id);
        f.bytes_received = state.ledger.total_received(p.id);
        macro_sum.precision += f.test_macro.precision;
        macro_sum.recall += f.test_macro.recall;
        macro_sum.f1 += f.test_macro.f1;
        weighted_sum.precision += f.test_weighted.precision;
        weighted_sum.recall += f.test_weighted.recall;
        weighted_sum.f1 += f.test_weighted.f1;
        report.finals.push_back(std::move(f));
    }
    const double k = static_cast<double>(trainer_nodes.size());
    report.test_macro_mean = {macro_sum.precision / k, macro_sum.recall / k, macro_sum.f1 / k};
    report.test_weighted_mean = {weighted_sum.precision / k, weighted_sum.recall / k,
                                 weighted_sum.f1 / k};
    report.ledger = std::move(state.ledger);
    report.total_bytes = report.ledger.total_bytes();

    ExperimentConfig resolved = config;
    resolved.model = mc;
    resolved.output_dir.clear();  // where a run lands is not part of its identity
    report.config_json = resolved.to_json();
    report.config_digest = fnv1a(report.config_json.data(), report.config_json.size());
    return report;
}

std::string ExperimentReport::to_json() const {
    ordered_json j;
    std::ostringstream digest;
    digest << std::hex << config_digest;
    j["config_digest"] = digest.str();
    j["averaging_note"] =
        "macro and weighted averages are both reported; summary values are macro";
    ordered_json jmap = ordered_json::object();
    for (const auto& [orig, dense] : class_map) jmap[std::to_string(orig)] = dense;
    j["class_map"] = jmap;

    j["rounds"] = ordered_json::array();
    for (const auto& r : rounds) {
        j["rounds"].push_back(ordered_json{{"round", r.round},
                                           {"participant", r.participant},
                                           {"train_loss", r.train_loss},
                                           {"val_macro", prf_json(r.val_macro)},
                                           {"val_weighted", prf_json(r.val_weighted)}});
    }
    j["final"] = ordered_json::array();
    for (const auto& f : finals) {
        ordered_json jf;
        jf["participant"] = f.participant;
        jf["test_macro"] = prf_json(f.test_macro);
        jf["test_weighted"] = prf_json(f.test_weighted);
        jf["train_windows"] = f.train_windows;
        jf["val_windows"] = f.val_windows;
        jf["test_windows"] = f.test_windows;
        jf["bytes_sent"] = f.bytes_sent;
        jf["bytes_received"] = f.bytes_received;
        jf["bytes_transmitted"] = f.bytes_sent + f.bytes_received;
        jf["confusion"] = f.test_confusion.counts;
        jf["confusion_classes"] = f.test_confusion.num_classes;
        j["final"].push_back(jf);
    }
    j["test_macro_mean"] = prf_json(test_macro_mean);
    j["test_weighted_mean"] = prf_json(test_weighted_mean);
    j["total_bytes"] = total_bytes;
    j["payload_records"] = ledger.records.size();
    j["resolved_config"] = json::parse(config_json);
    return j.dump(2);
}

void write_run_directory(const std::string& dir, const ExperimentReport& report) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    auto write_file = [&](const std::string& name, const std::string& text) {
        std::ofstream out(fs::path(dir) / name);
        if (!out) throw std::runtime_error("cannot write " + name + " in " + dir);
        out << text;
    };

    write_file("report.json", report.to_json());
    write_file("resolved-config.json", report.config_json);

    std::ostringstream ledger;
    ledger << "round,sender,receiver,bytes,checksum\n";
    for (const auto& r : report.ledger.records) {
        std::ostringstream row;
        row << r.round << "," << r.sender << "," << r.receiver << "," << r.bytes;
        const std::string body = row.str();
        ledger << body << "," << std::hex << fnv1a(body.data(), body.size()) << std::dec << "\n";
    }
    write_file("ledger.csv", ledger.str());

    std::ostringstream rounds;
    rounds.precision(17);
    rounds << "round,participant,train_loss,val_precision_macro,val_recall_macro,val_f1_macro,"
              "val_precision_weighted,val_recall_weighted,val_f1_weighted\n";
    for (const auto& r : report.rounds) {
        rounds << r.round << "," << r.participant << "," << r.train_loss << ","
               << r.val_macro.precision << "," << r.val_macro.recall << "," << r.val_macro.f1
               << "," << r.val_weighted.precision << "," << r.val_weighted.recall << ","
               << r.val_weighted.f1 << "\n";
    }
    write_file("rounds.csv", rounds.str());

    ordered_json jmap = ordered_json::object();
    for (const auto& [orig, dense] : report.class_map) jmap[std::to_string(orig)] = dense;
    write_file("class-map.json", jmap.dump(2));
    write_file("scaler.json", report.scaler.to_json());
    write_file("stationary-plan.json", report.plan.to_json());
}

}  // namespace tfed::experiment
