#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tempopfn.h"

using json = nlohmann::json;

namespace {

struct Common {
    std::string config_path;
    uint64_t seed = 0;
    bool seed_set = false;
};

json load_config(const Common& c) {
    json root = json::object();
    if (!c.config_path.empty()) {
        std::ifstream f(c.config_path);
        if (!f) throw CLI::ValidationError("--config",
                                           "cannot open " + c.config_path);
        root = json::parse(f);
    }
    if (c.seed_set) root["master_seed"] = c.seed;
    return root;
}

uint64_t master_seed(const json& root) {
    return root.contains("master_seed") ? root["master_seed"].get<uint64_t>()
                                        : 0;
}

std::string section_str(const json& root, const char* name) {
    return root.contains(name) ? root[name].dump() : "{}";
}

int status_exit(tempo_status st) {
    if (st == TEMPO_OK) return 0;
    std::cerr << "error: " << tempo_last_error() << "\n";
    return st == TEMPO_ERR_INVALID_ARGUMENT ? 1 : 2;
}

struct DatasetHandle {
    tempo_dataset* ds = nullptr;
    ~DatasetHandle() { tempo_dataset_free(ds); }
};

struct ModelHandle {
    tempo_model* m = nullptr;
    ~ModelHandle() { tempo_model_free(m); }
};

void add_common(CLI::App* app, Common& c) {
    app->add_option("--config", c.config_path, "run config file (JSON)");
    app->add_option("--seed", c.seed, "master seed (overrides the config)")
        ->each([&c](const std::string&) { c.seed_set = true; });
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"tempopfn: synthetic time-series pretraining toolkit"};
    app.require_subcommand(1);

    Common common;

    // generate
    auto* gen = app.add_subcommand("generate", "render a synthetic corpus");
    add_common(gen, common);
    std::string gen_out, gen_format = "jsonl";
    uint64_t gen_count = 100;
    int gen_workers = 1;
    gen->add_option("--out", gen_out, "output dataset path")->required();
    gen->add_option("--count", gen_count, "number of generator draws");
    gen->add_option("--workers", gen_workers, "parallel workers");
    gen->add_option("--format", gen_format, "jsonl or bin")
        ->check(CLI::IsMember({"jsonl", "bin"}));

    // augment
    auto* aug = app.add_subcommand("augment", "augment a dataset");
    add_common(aug, common);
    std::string aug_in, aug_out, aug_format = "jsonl";
    aug->add_option("--in", aug_in, "input dataset path")->required();
    aug->add_option("--out", aug_out, "output dataset path")->required();
    aug->add_option("--format", aug_format, "jsonl or bin")
        ->check(CLI::IsMember({"jsonl", "bin"}));

    // inspect
    auto* ins = app.add_subcommand("inspect", "dataset summary statistics");
    std::string ins_in;
    ins->add_option("--in", ins_in, "dataset path")->required();

    // train
    auto* trn = app.add_subcommand("train", "train a forecaster");
    add_common(trn, common);
    std::string trn_out, trn_loss, trn_opt, trn_resume, trn_resume_opt;
    trn->add_option("--out", trn_out, "checkpoint output path")->required();
    trn->add_option("--loss-csv", trn_loss, "loss trace CSV path");
    trn->add_option("--optimizer-out", trn_opt, "optimizer state path");
    trn->add_option("--resume-from", trn_resume, "checkpoint to resume from");

    // forecast
    auto* fct = app.add_subcommand("forecast", "predict future quantiles");
    std::string fct_model, fct_in, fct_out;
    uint64_t fct_horizon = 48;
    fct->add_option("--model", fct_model, "model checkpoint")->required();
    fct->add_option("--in", fct_in, "dataset path")->required();
    fct->add_option("--out", fct_out, "predictions JSONL path")->required();
    fct->add_option("--horizon", fct_horizon, "forecast horizon");

    // evaluate
    auto* evl = app.add_subcommand("evaluate", "CRPS/MASE report");
    std::string evl_model, evl_in, evl_report, evl_norm;
    uint64_t evl_horizon = 48;
    evl->add_option("--model", evl_model,
                    "model checkpoint (omit for the seasonal-naive baseline)");
    evl->add_option("--in", evl_in, "dataset path")->required();
    evl->add_option("--horizon", evl_horizon, "forecast horizon");
    evl->add_option("--report-out", evl_report, "per-task report CSV");
    evl->add_option("--normalized-out", evl_norm, "normalized report CSV");

    // nan-sweep
    auto* nsw = app.add_subcommand("nan-sweep", "missing-data robustness curve");
    add_common(nsw, common);
    std::string nsw_model, nsw_in, nsw_out;
    uint64_t nsw_horizon = 48;
    std::vector<double> nsw_fracs = {0.0, 0.3, 0.6, 0.9};
    nsw->add_option("--model", nsw_model,
                    "model checkpoint (omit for the baseline)");
    nsw->add_option("--in", nsw_in, "dataset path")->required();
    nsw->add_option("--horizon", nsw_horizon, "forecast horizon");
    nsw->add_option("--fractions", nsw_fracs, "missing fractions to sweep");
    nsw->add_option("--out", nsw_out, "curve CSV path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (gen->parsed()) {
            const json root = load_config(common);
            DatasetHandle ds;
            tempo_status st =
                tempo_generate(section_str(root, "generation").c_str(),
                               master_seed(root), gen_count, gen_workers, &ds.ds);
            if (st != TEMPO_OK) return status_exit(st);
            return status_exit(
                tempo_dataset_write(ds.ds, gen_out.c_str(), gen_format.c_str()));
        }
        if (aug->parsed()) {
            const json root = load_config(common);
            DatasetHandle in, out;
            tempo_status st = tempo_dataset_read(aug_in.c_str(), &in.ds);
            if (st != TEMPO_OK) return status_exit(st);
            st = tempo_augment(in.ds, section_str(root, "augmentation").c_str(),
                               master_seed(root), &out.ds);
            if (st != TEMPO_OK) return status_exit(st);
            return status_exit(
                tempo_dataset_write(out.ds, aug_out.c_str(), aug_format.c_str()));
        }
        if (ins->parsed()) {
            DatasetHandle ds;
            tempo_status st = tempo_dataset_read(ins_in.c_str(), &ds.ds);
            if (st != TEMPO_OK) return status_exit(st);
            char* text = nullptr;
            st = tempo_dataset_summary(ds.ds, &text);
            if (st != TEMPO_OK) return status_exit(st);
            std::cout << text << "\n";
            tempo_string_free(text);
            return 0;
        }
        if (trn->parsed()) {
            const json root = load_config(common);
            ModelHandle m;
            tempo_status st;
            if (!trn_resume.empty()) {
                st = tempo_model_load(trn_resume.c_str(), &m.m);
            } else {
                st = tempo_model_create(section_str(root, "model").c_str(),
                                        master_seed(root), &m.m);
            }
            if (st != TEMPO_OK) return status_exit(st);
            st = tempo_train(m.m, root.dump().c_str(),
                             trn_loss.empty() ? nullptr : trn_loss.c_str(),
                             trn_out.c_str(),
                             trn_opt.empty() ? nullptr : trn_opt.c_str());
            return status_exit(st);
        }
        if (fct->parsed()) {
            ModelHandle m;
            DatasetHandle ds;
            tempo_status st = tempo_model_load(fct_model.c_str(), &m.m);
            if (st != TEMPO_OK) return status_exit(st);
            st = tempo_dataset_read(fct_in.c_str(), &ds.ds);
            if (st != TEMPO_OK) return status_exit(st);
            return status_exit(
                tempo_forecast(m.m, ds.ds, fct_horizon, fct_out.c_str()));
        }
        if (evl->parsed()) {
            ModelHandle m;
            if (!evl_model.empty()) {
                tempo_status st = tempo_model_load(evl_model.c_str(), &m.m);
                if (st != TEMPO_OK) return status_exit(st);
            }
            DatasetHandle ds;
            tempo_status st = tempo_dataset_read(evl_in.c_str(), &ds.ds);
            if (st != TEMPO_OK) return status_exit(st);
            return status_exit(tempo_evaluate(
                m.m, ds.ds, evl_horizon,
                evl_report.empty() ? nullptr : evl_report.c_str(),
                evl_norm.empty() ? nullptr : evl_norm.c_str()));
        }
        if (nsw->parsed()) {
            const json root = load_config(common);
            ModelHandle m;
            if (!nsw_model.empty()) {
                tempo_status st = tempo_model_load(nsw_model.c_str(), &m.m);
                if (st != TEMPO_OK) return status_exit(st);
            }
            DatasetHandle ds;
            tempo_status st = tempo_dataset_read(nsw_in.c_str(), &ds.ds);
            if (st != TEMPO_OK) return status_exit(st);
            return status_exit(tempo_nan_sweep(
                m.m, ds.ds, nsw_horizon, nsw_fracs.data(), nsw_fracs.size(),
                master_seed(root), nsw_out.c_str()));
        }
    } catch (const json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const CLI::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
