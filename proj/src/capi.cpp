#include "tempopfn.h"

#include <atomic>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "aug/augment.hpp"
#include "core/dataset.hpp"
#include "core/frequency.hpp"
#include "core/rng.hpp"
#include "eval/eval.hpp"
#include "gen/generator.hpp"
#include "nn/model.hpp"
#include "train/train.hpp"

using json = nlohmann::json;
using namespace tempo;

namespace {

thread_local std::string g_error;

struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

tempo_status fail(tempo_status code, const std::string& msg) {
    g_error = msg;
    return code;
}

template <typename F>
tempo_status wrap(F&& fn) {
    try {
        fn();
        return TEMPO_OK;
    } catch (const io_error& e) {
        return fail(TEMPO_ERR_IO, e.what());
    } catch (const std::invalid_argument& e) {
        return fail(TEMPO_ERR_INVALID_ARGUMENT, e.what());
    } catch (const json::exception& e) {
        return fail(TEMPO_ERR_INVALID_ARGUMENT, e.what());
    } catch (const std::exception& e) {
        const std::string msg = e.what();
        if (msg.find("cannot open") != std::string::npos ||
            msg.find("truncated") != std::string::npos ||
            msg.find("bad magic") != std::string::npos)
            return fail(TEMPO_ERR_IO, msg);
        return fail(TEMPO_ERR_RUNTIME, msg);
    }
}

void require_keys(const json& j, const std::vector<std::string>& allowed,
                  const std::string& section) {
    if (!j.is_object())
        throw std::invalid_argument(section + ": expected a JSON object");
    for (const auto& [key, value] : j.items()) {
        (void)value;
        bool ok = false;
        for (const auto& a : allowed) ok = ok || a == key;
        if (!ok)
            throw std::invalid_argument(section + ": unknown key \"" + key +
                                        "\"");
    }
}

json parse_json(const char* text, const std::string& what) {
    if (!text) throw std::invalid_argument(what + ": null config");
    return json::parse(text);
}

struct GenerationConfig {
    std::vector<gen::GeneratorKind> kinds;
    size_t length = 512;
    Frequency freq = {FreqUnit::Hours, 1};
};

GenerationConfig parse_generation(const json& j) {
    require_keys(j, {"generators", "length", "freq"}, "generation");
    GenerationConfig cfg;
    if (j.contains("generators")) {
        if (j["generators"].is_string() && j["generators"] == "all") {
            cfg.kinds = gen::all_generator_kinds();
        } else {
            for (const auto& name : j["generators"])
                cfg.kinds.push_back(
                    gen::generator_from_name(name.get<std::string>()));
        }
    } else {
        cfg.kinds = gen::all_generator_kinds();
    }
    if (cfg.kinds.empty())
        throw std::invalid_argument("generation: empty generator list");
    if (j.contains("length")) cfg.length = j["length"].get<size_t>();
    if (cfg.length < 2) throw std::invalid_argument("generation: length < 2");
    if (j.contains("freq"))
        cfg.freq = Frequency::parse(j["freq"].get<std::string>());
    return cfg;
}

aug::AugmentationConfig parse_augmentation(const json& j) {
    require_keys(j,
                 {"normalize_prob", "early_mixup_prob", "late_mixup_prob",
                  "category_weights", "categories_min", "categories_max",
                  "conv_filter_prob", "finishing_noise_frac",
                  "selection_threshold", "max_retries", "dirichlet_alpha",
                  "time_varying_mixup_prob"},
                 "augmentation");
    aug::AugmentationConfig cfg;
    auto get = [&](const char* key, auto& field) {
        if (j.contains(key)) field = j[key].template get<std::decay_t<decltype(field)>>();
    };
    get("normalize_prob", cfg.normalize_prob);
    get("early_mixup_prob", cfg.early_mixup_prob);
    get("late_mixup_prob", cfg.late_mixup_prob);
    get("categories_min", cfg.categories_min);
    get("categories_max", cfg.categories_max);
    get("conv_filter_prob", cfg.conv_filter_prob);
    get("finishing_noise_frac", cfg.finishing_noise_frac);
    get("selection_threshold", cfg.selection_threshold);
    get("max_retries", cfg.max_retries);
    get("dirichlet_alpha", cfg.dirichlet_alpha);
    get("time_varying_mixup_prob", cfg.time_varying_mixup_prob);
    if (j.contains("category_weights")) {
        for (const auto& [name, weight] : j["category_weights"].items()) {
            bool found = false;
            for (auto& [kind, w] : cfg.category_weights) {
                if (aug::category_name(kind) == name) {
                    w = weight.get<double>();
                    found = true;
                }
            }
            if (!found)
                throw std::invalid_argument("augmentation: unknown category \"" +
                                            name + "\"");
        }
    }
    cfg.validate();
    return cfg;
}

nn::ModelConfig parse_model(const json& j) {
    require_keys(j,
                 {"embed_dim", "layers", "heads", "householders", "conv_kernel",
                  "mlp_hidden", "time_features", "allow_negative_eigenvalues",
                  "state_weaving", "quantiles"},
                 "model");
    nn::ModelConfig cfg;
    auto get = [&](const char* key, auto& field) {
        if (j.contains(key)) field = j[key].template get<std::decay_t<decltype(field)>>();
    };
    get("embed_dim", cfg.embed_dim);
    get("layers", cfg.layers);
    get("heads", cfg.heads);
    get("householders", cfg.householders);
    get("conv_kernel", cfg.conv_kernel);
    get("mlp_hidden", cfg.mlp_hidden);
    get("time_features", cfg.time_features);
    get("allow_negative_eigenvalues", cfg.allow_negative_eigenvalues);
    get("state_weaving", cfg.state_weaving);
    if (j.contains("quantiles"))
        cfg.quantiles = j["quantiles"].get<std::vector<double>>();
    cfg.validate();
    return cfg;
}

struct SourceWeights {
    double generator_weight = 1.0;
    double cauker_weight = 2.0;
    double augmented_weight = 3.0;
    size_t augment_pool = 64;
};

train::TrainConfig parse_training(const json& j, SourceWeights& sw) {
    require_keys(j,
                 {"peak_lr", "min_lr_ratio", "warmup_ratio", "beta1", "beta2",
                  "weight_decay", "adam_eps", "grad_clip", "iterations",
                  "batch_size", "accumulation", "length_distribution",
                  "cut_vs_subsample", "horizon_min", "horizon_max",
                  "scaler_aug_prob", "nan_aug", "seed", "generator_weight",
                  "cauker_weight", "augmented_weight", "augment_pool"},
                 "training");
    train::TrainConfig cfg;
    auto get = [&](const char* key, auto& field) {
        if (j.contains(key)) field = j[key].template get<std::decay_t<decltype(field)>>();
    };
    get("peak_lr", cfg.peak_lr);
    get("min_lr_ratio", cfg.min_lr_ratio);
    get("warmup_ratio", cfg.warmup_ratio);
    get("beta1", cfg.beta1);
    get("beta2", cfg.beta2);
    get("weight_decay", cfg.weight_decay);
    get("adam_eps", cfg.adam_eps);
    get("grad_clip", cfg.grad_clip);
    get("iterations", cfg.iterations);
    get("batch_size", cfg.batch_size);
    get("accumulation", cfg.accumulation);
    get("cut_vs_subsample", cfg.cut_vs_subsample);
    get("horizon_min", cfg.horizon_min);
    get("horizon_max", cfg.horizon_max);
    get("scaler_aug_prob", cfg.scaler_aug_prob);
    get("seed", cfg.seed);
    if (j.contains("length_distribution")) {
        cfg.length_distribution.clear();
        for (const auto& [len, p] : j["length_distribution"].items())
            cfg.length_distribution.emplace_back(std::stoul(len),
                                                 p.get<double>());
    }
    if (j.contains("nan_aug")) {
        const json& n = j["nan_aug"];
        require_keys(n, {"prob", "point_rate", "block_rate", "block_mean_len"},
                     "training.nan_aug");
        auto getn = [&](const char* key, double& field) {
            if (n.contains(key)) field = n[key].get<double>();
        };
        getn("prob", cfg.nan_aug.prob);
        getn("point_rate", cfg.nan_aug.point_rate);
        getn("block_rate", cfg.nan_aug.block_rate);
        getn("block_mean_len", cfg.nan_aug.block_mean_len);
    }
    get("generator_weight", sw.generator_weight);
    get("cauker_weight", sw.cauker_weight);
    get("augmented_weight", sw.augmented_weight);
    get("augment_pool", sw.augment_pool);
    cfg.validate();
    return cfg;
}

json section(const json& root, const char* name) {
    return root.contains(name) ? root[name] : json::object();
}

std::vector<TimeSeries> run_generation(const GenerationConfig& cfg,
                                       uint64_t seed, uint64_t count,
                                       int workers) {
    std::vector<std::vector<TimeSeries>> slots(count);
    auto fill = [&](uint64_t i) {
        Rng rng(derive_seed(seed, 0x67656Eu, i));
        const auto kind = cfg.kinds[size_t(i % cfg.kinds.size())];
        slots[i] = gen::generate(kind, rng, cfg.length, cfg.freq);
        for (auto& s : slots[i])
            if (s.id.empty()) s.id = gen::generator_name(kind) + "_" + std::to_string(i);
    };
    if (workers <= 1) {
        for (uint64_t i = 0; i < count; ++i) fill(i);
    } else {
        std::atomic<uint64_t> next{0};
        std::vector<std::thread> threads;
        std::vector<std::string> errors(size_t(workers), std::string{});
        for (int w = 0; w < workers; ++w) {
            threads.emplace_back([&, w] {
                for (uint64_t i = next.fetch_add(1); i < count;
                     i = next.fetch_add(1)) {
                    try {
                        fill(i);
                    } catch (const std::exception& e) {
                        errors[size_t(w)] = e.what();
                        return;
                    }
                }
            });
        }
        for (auto& t : threads) t.join();
        for (const auto& e : errors)
            if (!e.empty()) throw std::runtime_error("generate: " + e);
    }
    std::vector<TimeSeries> out;
    for (auto& slot : slots)
        for (auto& s : slot) out.push_back(std::move(s));
    return out;
}

std::vector<train::BatchSource> build_sources(const GenerationConfig& gcfg,
                                              const aug::AugmentationConfig& acfg,
                                              const SourceWeights& sw,
                                              uint64_t seed) {
    std::vector<train::BatchSource> sources;
    for (const auto kind : gcfg.kinds) {
        const double weight = kind == gen::GeneratorKind::CauKer
                                  ? sw.cauker_weight
                                  : sw.generator_weight;
        if (weight <= 0.0) continue;
        sources.push_back({gen::generator_name(kind), weight,
                           [kind, len = gcfg.length, freq = gcfg.freq](Rng& rng) {
                               auto v = gen::generate(kind, rng, len, freq);
                               const size_t pick = v.size() == 1
                                                       ? 0
                                                       : size_t(rng.uniform_int(
                                                             0, int64_t(v.size()) - 1));
                               return v[pick];
                           }});
    }
    if (sw.augmented_weight > 0.0 && sw.augment_pool > 0) {
        auto pool = std::make_shared<std::vector<TimeSeries>>(
            run_generation(gcfg, derive_seed(seed, 0x706F6Fu, 0),
                           sw.augment_pool, 1));
        sources.push_back({"augmented", sw.augmented_weight,
                           [pool, acfg](Rng& rng) {
                               return aug::augment_pipeline(*pool, rng, acfg);
                           }});
    }
    return sources;
}

std::vector<eval::EvalTask> split_tasks(const std::vector<TimeSeries>& series,
                                        uint64_t horizon) {
    if (horizon < 1) throw std::invalid_argument("tasks: horizon < 1");
    std::vector<eval::EvalTask> tasks;
    for (size_t i = 0; i < series.size(); ++i) {
        const TimeSeries& s = series[i];
        if (s.size() < horizon + 2)
            throw std::invalid_argument("tasks: series " + s.id +
                                        " shorter than horizon + 2");
        eval::EvalTask t;
        t.history = s;
        t.history.values.assign(s.values.begin(),
                                s.values.end() - long(horizon));
        t.history.mask.assign(s.mask.begin(), s.mask.end() - long(horizon));
        t.target.assign(s.values.end() - long(horizon), s.values.end());
        t.season = seasonal_period(s.freq);
        t.id = s.id.empty() ? "task" + std::to_string(i) : s.id;
        tasks.push_back(std::move(t));
    }
    return tasks;
}

const std::vector<TimeSeries>& as_series(const tempo_dataset* ds);
const nn::Model& as_model(const tempo_model* m);

} // namespace

struct tempo_dataset {
    std::vector<TimeSeries> series;
};

struct tempo_model {
    nn::Model model;
};

namespace {
const std::vector<TimeSeries>& as_series(const tempo_dataset* ds) {
    if (!ds) throw std::invalid_argument("null dataset handle");
    return ds->series;
}
const nn::Model& as_model(const tempo_model* m) {
    if (!m) throw std::invalid_argument("null model handle");
    return m->model;
}
} // namespace

const char* tempo_last_error(void) { return g_error.c_str(); }

tempo_status tempo_generate(const char* config_json, uint64_t seed,
                            uint64_t count, int workers, tempo_dataset** out) {
    return wrap([&] {
        if (!out) throw std::invalid_argument("null output pointer");
        const auto cfg =
            parse_generation(parse_json(config_json, "generation"));
        auto ds = std::make_unique<tempo_dataset>();
        ds->series = run_generation(cfg, seed, count, workers);
        *out = ds.release();
    });
}

tempo_status tempo_dataset_read(const char* path, tempo_dataset** out) {
    return wrap([&] {
        if (!path || !out) throw std::invalid_argument("null argument");
        auto ds = std::make_unique<tempo_dataset>();
        ds->series = read_dataset(path);
        *out = ds.release();
    });
}

tempo_status tempo_dataset_write(const tempo_dataset* ds, const char* path,
                                 const char* format) {
    return wrap([&] {
        if (!path) throw std::invalid_argument("null path");
        const DatasetFormat f =
            format_from_name(format ? format : "jsonl");
        write_dataset(as_series(ds), path, f);
    });
}

tempo_status tempo_dataset_size(const tempo_dataset* ds, uint64_t* out) {
    return wrap([&] {
        if (!out) throw std::invalid_argument("null output pointer");
        *out = as_series(ds).size();
    });
}

tempo_status tempo_dataset_summary(const tempo_dataset* ds, char** json_out) {
    return wrap([&] {
        if (!json_out) throw std::invalid_argument("null output pointer");
        const auto& series = as_series(ds);
        size_t values = 0, missing = 0;
        size_t min_len = SIZE_MAX, max_len = 0;
        std::map<std::string, size_t> origins;
        for (const auto& s : series) {
            values += s.size();
            missing += s.size() - s.observed_count();
            min_len = std::min(min_len, s.size());
            max_len = std::max(max_len, s.size());
            std::string origin = s.provenance;
            const size_t cut = origin.find_first_of("|:");
            if (cut != std::string::npos) origin = origin.substr(0, cut);
            if (origin.empty()) origin = "unknown";
            origins[origin]++;
        }
        json j;
        j["count"] = series.size();
        j["total_values"] = values;
        j["missing_fraction"] =
            values == 0 ? 0.0 : double(missing) / double(values);
        j["min_length"] = series.empty() ? 0 : min_len;
        j["max_length"] = max_len;
        j["origins"] = origins;
        const std::string text = j.dump(2);
        char* buf = new char[text.size() + 1];
        std::memcpy(buf, text.c_str(), text.size() + 1);
        *json_out = buf;
    });
}

tempo_status tempo_augment(const tempo_dataset* in, const char* config_json,
                           uint64_t seed, tempo_dataset** out) {
    return wrap([&] {
        if (!out) throw std::invalid_argument("null output pointer");
        const auto cfg =
            parse_augmentation(parse_json(config_json, "augmentation"));
        const auto& pool = as_series(in);
        if (pool.empty()) throw std::invalid_argument("augment: empty dataset");
        auto ds = std::make_unique<tempo_dataset>();
        for (size_t i = 0; i < pool.size(); ++i) {
            Rng rng(derive_seed(seed, 0x617567u, i));
            TimeSeries s = aug::augment_pipeline(pool, rng, cfg);
            if (s.id.empty()) s.id = "aug_" + std::to_string(i);
            ds->series.push_back(std::move(s));
        }
        *out = ds.release();
    });
}

void tempo_dataset_free(tempo_dataset* ds) { delete ds; }
void tempo_string_free(char* s) { delete[] s; }

tempo_status tempo_model_create(const char* config_json, uint64_t seed,
                                tempo_model** out) {
    return wrap([&] {
        if (!out) throw std::invalid_argument("null output pointer");
        const auto cfg = parse_model(parse_json(config_json, "model"));
        Rng rng(seed);
        auto m = std::make_unique<tempo_model>();
        m->model = nn::Model::init(cfg, rng);
        *out = m.release();
    });
}

tempo_status tempo_model_load(const char* path, tempo_model** out) {
    return wrap([&] {
        if (!path || !out) throw std::invalid_argument("null argument");
        auto m = std::make_unique<tempo_model>();
        m->model = nn::load_checkpoint(path);
        *out = m.release();
    });
}

tempo_status tempo_model_save(const tempo_model* m, const char* path) {
    return wrap([&] {
        if (!path) throw std::invalid_argument("null path");
        nn::save_checkpoint(as_model(m), path);
    });
}

tempo_status tempo_model_param_count(const tempo_model* m, uint64_t* out) {
    return wrap([&] {
        if (!out) throw std::invalid_argument("null output pointer");
        *out = as_model(m).param_count();
    });
}

void tempo_model_free(tempo_model* m) { delete m; }

tempo_status tempo_train(tempo_model* m, const char* config_json,
                         const char* loss_csv_path,
                         const char* checkpoint_path,
                         const char* optimizer_path) {
    return wrap([&] {
        if (!m) throw std::invalid_argument("null model handle");
        const json root = parse_json(config_json, "run config");
        require_keys(root,
                     {"master_seed", "generation", "augmentation", "model",
                      "training", "evaluation"},
                     "run config");
        SourceWeights sw;
        train::TrainConfig cfg = parse_training(section(root, "training"), sw);
        if (root.contains("master_seed") && !section(root, "training").contains("seed"))
            cfg.seed = root["master_seed"].get<uint64_t>();
        const auto gcfg = parse_generation(section(root, "generation"));
        const auto acfg = parse_augmentation(section(root, "augmentation"));
        auto sources = build_sources(gcfg, acfg, sw, cfg.seed);
        if (sources.empty())
            throw std::invalid_argument("training: no batch sources");
        train::OptimizerState state = train::OptimizerState::init(m->model);
        train::TrainOptions opts;
        if (loss_csv_path) opts.loss_csv_path = loss_csv_path;
        if (checkpoint_path) opts.checkpoint_path = checkpoint_path;
        if (optimizer_path) opts.optimizer_path = optimizer_path;
        train::train(m->model, state, sources, cfg, opts);
    });
}

tempo_status tempo_forecast(const tempo_model* m, const tempo_dataset* ds,
                            uint64_t horizon, const char* out_jsonl) {
    return wrap([&] {
        if (!out_jsonl) throw std::invalid_argument("null output path");
        const nn::Model& model = as_model(m);
        const auto tasks = split_tasks(as_series(ds), horizon);
        const auto fc = eval::model_forecaster(model);
        std::ofstream f(out_jsonl);
        if (!f) throw io_error("forecast: cannot open " + std::string(out_jsonl));
        for (const auto& task : tasks) {
            const nn::Mat pred = fc(task, model.config.quantiles);
            json j;
            j["task_id"] = task.id;
            j["horizon"] = task.target.size();
            j["quantiles"] = model.config.quantiles;
            std::vector<std::vector<double>> rows;
            for (Eigen::Index r = 0; r < pred.rows(); ++r) {
                std::vector<double> row;
                for (Eigen::Index c = 0; c < pred.cols(); ++c)
                    row.push_back(pred(r, c));
                rows.push_back(std::move(row));
            }
            j["predictions"] = rows;
            f << j.dump() << "\n";
        }
    });
}

tempo_status tempo_evaluate(const tempo_model* m, const tempo_dataset* ds,
                            uint64_t horizon, const char* report_csv,
                            const char* normalized_csv) {
    return wrap([&] {
        const auto tasks = split_tasks(as_series(ds), horizon);
        const std::vector<double> quantiles =
            m ? as_model(m).config.quantiles
              : std::vector<double>{0.1, 0.2, 0.3, 0.4, 0.5,
                                    0.6, 0.7, 0.8, 0.9};
        const eval::Forecaster fc = m ? eval::model_forecaster(as_model(m))
                                      : eval::seasonal_naive_forecaster();
        const auto rep = eval::evaluate(fc, tasks, quantiles);
        if (report_csv) eval::write_report_csv(rep, report_csv);
        if (normalized_csv)
            eval::write_normalized_csv(rep, "dataset", normalized_csv);
    });
}

tempo_status tempo_nan_sweep(const tempo_model* m, const tempo_dataset* ds,
                             uint64_t horizon, const double* fractions,
                             uint64_t n_fractions, uint64_t seed,
                             const char* out_csv) {
    return wrap([&] {
        if (!fractions || n_fractions == 0)
            throw std::invalid_argument("nan sweep: no fractions");
        if (!out_csv) throw std::invalid_argument("null output path");
        for (uint64_t i = 0; i < n_fractions; ++i)
            if (fractions[i] < 0.0 || fractions[i] >= 1.0)
                throw std::invalid_argument("nan sweep: fraction out of [0, 1)");
        const auto tasks = split_tasks(as_series(ds), horizon);
        const std::vector<double> quantiles =
            m ? as_model(m).config.quantiles
              : std::vector<double>{0.1, 0.2, 0.3, 0.4, 0.5,
                                    0.6, 0.7, 0.8, 0.9};
        const eval::Forecaster fc = m ? eval::model_forecaster(as_model(m))
                                      : eval::seasonal_naive_forecaster();
        const auto curve = eval::nan_robustness_curve(
            fc, tasks, std::vector<double>(fractions, fractions + n_fractions),
            quantiles, seed);
        eval::write_curve_csv(curve, out_csv);
    });
}
