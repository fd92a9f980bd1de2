#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "tempopfn.h"

namespace {

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    REQUIRE(f.good());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

struct Tmp {
    std::string path;
    explicit Tmp(std::string p) : path(std::move(p)) {}
    ~Tmp() { std::remove(path.c_str()); }
};

tempo_dataset* make_dataset(uint64_t seed = 7, uint64_t count = 6) {
    tempo_dataset* ds = nullptr;
    REQUIRE(tempo_generate(R"({"generators": ["sine_wave", "sde"], "length": 96})",
                           seed, count, 1, &ds) == TEMPO_OK);
    REQUIRE(ds != nullptr);
    return ds;
}

} // namespace

TEST_CASE("generate is deterministic and worker independent") {
    tempo_dataset* a = nullptr;
    tempo_dataset* b = nullptr;
    REQUIRE(tempo_generate("{}", 42, 8, 1, &a) == TEMPO_OK);
    REQUIRE(tempo_generate("{}", 42, 8, 4, &b) == TEMPO_OK);
    Tmp fa("capi_gen_a.jsonl"), fb("capi_gen_b.jsonl");
    REQUIRE(tempo_dataset_write(a, fa.path.c_str(), "jsonl") == TEMPO_OK);
    REQUIRE(tempo_dataset_write(b, fb.path.c_str(), "jsonl") == TEMPO_OK);
    CHECK(slurp(fa.path) == slurp(fb.path));
    tempo_dataset_free(a);
    tempo_dataset_free(b);
}

TEST_CASE("dataset round trips through both formats") {
    tempo_dataset* ds = make_dataset();
    uint64_t n = 0;
    REQUIRE(tempo_dataset_size(ds, &n) == TEMPO_OK);
    CHECK(n >= 6);

    for (const char* fmt : {"jsonl", "bin"}) {
        Tmp f(std::string("capi_rt.") + fmt);
        REQUIRE(tempo_dataset_write(ds, f.path.c_str(), fmt) == TEMPO_OK);
        tempo_dataset* back = nullptr;
        REQUIRE(tempo_dataset_read(f.path.c_str(), &back) == TEMPO_OK);
        Tmp g(std::string("capi_rt2.") + fmt);
        REQUIRE(tempo_dataset_write(back, g.path.c_str(), fmt) == TEMPO_OK);
        CHECK(slurp(f.path) == slurp(g.path));
        tempo_dataset_free(back);
    }
    tempo_dataset_free(ds);
}

TEST_CASE("dataset summary is json with a count") {
    tempo_dataset* ds = make_dataset();
    char* text = nullptr;
    REQUIRE(tempo_dataset_summary(ds, &text) == TEMPO_OK);
    REQUIRE(text != nullptr);
    std::string s(text);
    CHECK(s.find("count") != std::string::npos);
    tempo_string_free(text);
    tempo_dataset_free(ds);
}

TEST_CASE("augment is deterministic and size preserving") {
    tempo_dataset* ds = make_dataset();
    tempo_dataset* a = nullptr;
    tempo_dataset* b = nullptr;
    REQUIRE(tempo_augment(ds, "{}", 5, &a) == TEMPO_OK);
    REQUIRE(tempo_augment(ds, "{}", 5, &b) == TEMPO_OK);
    uint64_t n0 = 0, n1 = 0;
    REQUIRE(tempo_dataset_size(ds, &n0) == TEMPO_OK);
    REQUIRE(tempo_dataset_size(a, &n1) == TEMPO_OK);
    CHECK(n0 == n1);
    Tmp fa("capi_aug_a.jsonl"), fb("capi_aug_b.jsonl");
    REQUIRE(tempo_dataset_write(a, fa.path.c_str(), "jsonl") == TEMPO_OK);
    REQUIRE(tempo_dataset_write(b, fb.path.c_str(), "jsonl") == TEMPO_OK);
    CHECK(slurp(fa.path) == slurp(fb.path));
    tempo_dataset_free(a);
    tempo_dataset_free(b);
    tempo_dataset_free(ds);
}

TEST_CASE("model create save load and param count") {
    tempo_model* m = nullptr;
    const char* cfg = R"({"embed_dim": 32, "layers": 2, "heads": 2,
                          "householders": 2, "conv_kernel": 4,
                          "mlp_hidden": 48})";
    REQUIRE(tempo_model_create(cfg, 3, &m) == TEMPO_OK);
    uint64_t n = 0;
    REQUIRE(tempo_model_param_count(m, &n) == TEMPO_OK);
    CHECK(n > 10000);

    Tmp f("capi_model.ckpt");
    REQUIRE(tempo_model_save(m, f.path.c_str()) == TEMPO_OK);
    tempo_model* back = nullptr;
    REQUIRE(tempo_model_load(f.path.c_str(), &back) == TEMPO_OK);
    uint64_t n2 = 0;
    REQUIRE(tempo_model_param_count(back, &n2) == TEMPO_OK);
    CHECK(n == n2);
    Tmp g("capi_model2.ckpt");
    REQUIRE(tempo_model_save(back, g.path.c_str()) == TEMPO_OK);
    CHECK(slurp(f.path) == slurp(g.path));
    tempo_model_free(back);
    tempo_model_free(m);
}

TEST_CASE("train forecast evaluate nan sweep through the api") {
    tempo_model* m = nullptr;
    const char* mcfg = R"({"embed_dim": 32, "layers": 2, "heads": 2,
                           "householders": 2, "conv_kernel": 4,
                           "mlp_hidden": 48})";
    REQUIRE(tempo_model_create(mcfg, 11, &m) == TEMPO_OK);

    const char* run = R"({
        "master_seed": 11,
        "generation": {"generators": ["sine_wave"], "length": 64},
        "model": {"embed_dim": 32, "layers": 2, "heads": 2,
                  "householders": 2, "conv_kernel": 4, "mlp_hidden": 48},
        "training": {"iterations": 2, "batch_size": 2, "accumulation": 1,
                     "peak_lr": 1e-4,
                     "length_distribution": {"32": 1.0},
                     "horizon_min": 4, "horizon_max": 8}
    })";
    Tmp loss("capi_loss.csv"), ckpt("capi_train.ckpt");
    REQUIRE(tempo_train(m, run, loss.path.c_str(), ckpt.path.c_str(),
                        nullptr) == TEMPO_OK);
    const std::string trace = slurp(loss.path);
    CHECK(trace.rfind("step,lr,loss", 0) == 0);

    tempo_dataset* ds = make_dataset(21, 4);
    Tmp fc("capi_forecast.jsonl");
    REQUIRE(tempo_forecast(m, ds, 8, fc.path.c_str()) == TEMPO_OK);
    CHECK(slurp(fc.path).find("\"quantiles\"") != std::string::npos);

    Tmp rep("capi_report.csv"), norm("capi_norm.csv");
    REQUIRE(tempo_evaluate(m, ds, 8, rep.path.c_str(), norm.path.c_str()) ==
            TEMPO_OK);
    CHECK(slurp(rep.path).rfind("task_id", 0) == 0);
    REQUIRE(tempo_evaluate(nullptr, ds, 8, nullptr, norm.path.c_str()) ==
            TEMPO_OK);
    CHECK(slurp(norm.path).find(",1,1") != std::string::npos);

    const double fracs[] = {0.0, 0.5};
    Tmp curve("capi_curve.csv");
    REQUIRE(tempo_nan_sweep(m, ds, 8, fracs, 2, 9, curve.path.c_str()) ==
            TEMPO_OK);
    CHECK(slurp(curve.path).rfind("fraction,", 0) == 0);

    tempo_dataset_free(ds);
    tempo_model_free(m);
}

TEST_CASE("error codes") {
    tempo_dataset* ds = nullptr;
    CHECK(tempo_dataset_read("no_such_file.jsonl", &ds) == TEMPO_ERR_IO);
    CHECK(std::string(tempo_last_error()).size() > 0);

    CHECK(tempo_generate("{not json", 0, 1, 1, &ds) ==
          TEMPO_ERR_INVALID_ARGUMENT);
    CHECK(tempo_generate(R"({"bogus_key": 1})", 0, 1, 1, &ds) ==
          TEMPO_ERR_INVALID_ARGUMENT);
    CHECK(tempo_generate(R"({"generators": ["nope"]})", 0, 1, 1, &ds) ==
          TEMPO_ERR_INVALID_ARGUMENT);
    CHECK(tempo_generate("{}", 0, 1, 1, nullptr) ==
          TEMPO_ERR_INVALID_ARGUMENT);

    tempo_model* m = nullptr;
    CHECK(tempo_model_create(R"({"embed_dim": -4})", 0, &m) ==
          TEMPO_ERR_INVALID_ARGUMENT);
    CHECK(tempo_model_load("no_such_model.ckpt", &m) == TEMPO_ERR_IO);
}
