// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mlpinit/harness.hpp"

using namespace mlpinit;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

constexpr InitScheme kSchemes[] = {{InitFamily::Xavier, InitDist::Normal},
                                   {InitFamily::Xavier, InitDist::Uniform},
                                   {InitFamily::Kaiming, InitDist::Normal},
                                   {InitFamily::Kaiming, InitDist::Uniform}};

std::string scheme_name(InitScheme s) {
  return std::string(to_string(s.family)) + "-" + std::string(to_string(s.dist));
}

Outcome ac1_initializer_variance() {
  Outcome out;
  Rng rng(1);
  double worst = 0.0;
  for (const auto& s : kSchemes) {
    for (std::size_t d : {20u, 50u, 85u, 256u}) {
      std::vector<double> xs;
      while (xs.size() < 100000) {
        const Matrix w = initialize(rng, s, d, 64, d);
        xs.insert(xs.end(), w.data().begin(), w.data().end());
      }
      xs.resize(100000);
      const double target = target_variance(s, d);
      const double rel = std::abs(variance(xs) - target) / target;
      worst = std::max(worst, rel);
      out.require(rel <= 0.03, scheme_name(s) + " d=" + std::to_string(d) + " off by " +
                                   fmt("%.4f", rel));
      if (s.dist == InitDist::Uniform) {
        const double b = std::sqrt((s.family == InitFamily::Xavier ? 3.0 : 6.0) / double(d));
        for (double x : xs) {
          if (std::abs(x) > b) {
            out.require(false, scheme_name(s) + " d=" + std::to_string(d) + " exceeds bound");
            break;
          }
        }
      }
    }
  }
  if (out.pass) out.detail = "worst relative variance error " + fmt("%.4f", worst);
  return out;
}

Outcome ac2_variance_propagation() {
  Outcome out;
  double kaiming = 0.0, xavier = 0.0;
  for (std::uint64_t s = 0; s < 5; ++s) {
    Rng rk(derive_seed(2, s)), rx(derive_seed(3, s));
    kaiming += propagate_variance(rk, {InitFamily::Kaiming, InitDist::Normal}, 256, 10, 10000).back() / 5;
    xavier += propagate_variance(rx, {InitFamily::Xavier, InitDist::Normal}, 256, 10, 10000).back() / 5;
  }
  out.require(kaiming >= 0.5 && kaiming <= 2.0, "kaiming layer-10 ratio " + fmt("%.4f", kaiming));
  out.require(xavier < 0.25, "xavier layer-10 ratio " + fmt("%.5f", xavier));
  if (out.pass) {
    out.detail = "layer-10 variance ratio kaiming " + fmt("%.3f", kaiming) + ", xavier " +
                 fmt("%.5f", xavier);
  }
  return out;
}

Outcome ac3_gradient_check() {
  Outcome out;
  Rng rng(3);
  double worst = 0.0;
  for (auto t : {Topology::OneLayer, Topology::TwoLayer, Topology::ThreeLayer}) {
    for (auto f : {InitFamily::Xavier, InitFamily::Kaiming}) {
      const MlpModel m = build_model(rng, t, {f, InitDist::Normal});
      const Matrix x(8, kFeatureCount, sample(rng, NormalDist{0.0, 1.0}, 8 * kFeatureCount));
      std::vector<int> labels(8);
      for (auto& l : labels) l = static_cast<int>(rng.below(kClassCount));
      const double err = grad_check(m, x, labels, 1e-5);
      worst = std::max(worst, err);
      out.require(err < 1e-4, std::string(to_string(t)) + "+" + std::string(to_string(f)) +
                                  " error " + fmt("%.3g", err));
    }
  }
  if (out.pass) out.detail = "max relative error " + fmt("%.3g", worst);
  return out;
}

Outcome ac4_metrics_oracle() {
  Outcome out;
  Rng rng(4);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + rng.below(80);
    std::vector<int> preds(n), labels(n);
    for (std::size_t i = 0; i < n; ++i) {
      preds[i] = static_cast<int>(rng.below(kClassCount));
      labels[i] = static_cast<int>(rng.below(kClassCount));
    }
    const Report r = summarize(accumulate_confusion(preds, labels));
    std::size_t correct = 0;
    for (std::size_t i = 0; i < n; ++i) correct += preds[i] == labels[i];
    worst = std::max(worst, std::abs(r.accuracy - double(correct) / double(n)));
    double mp = 0, mr = 0, mf = 0;
    for (int c = 0; c < int(kClassCount); ++c) {
      std::size_t tp = 0, pc = 0, lc = 0;
      for (std::size_t i = 0; i < n; ++i) {
        tp += preds[i] == c && labels[i] == c;
        pc += preds[i] == c;
        lc += labels[i] == c;
      }
      const double p = pc ? double(tp) / double(pc) : 0.0;
      const double rc = lc ? double(tp) / double(lc) : 0.0;
      const double f = p + rc > 0 ? 2 * p * rc / (p + rc) : 0.0;
      worst = std::max({worst, std::abs(r.per_class[c].precision - p),
                        std::abs(r.per_class[c].recall - rc), std::abs(r.per_class[c].f1 - f)});
      mp += p / 4;
      mr += rc / 4;
      mf += f / 4;
    }
    worst = std::max({worst, std::abs(r.macro_precision - mp), std::abs(r.macro_recall - mr),
                      std::abs(r.macro_f1 - mf)});
  }
  out.require(worst <= 1e-12, "oracle mismatch " + fmt("%.3g", worst));
  const double f1 = f1_score(0.89, 0.30);
  out.require(std::abs(f1 - 0.45) <= 0.005, "F1(0.89, 0.30) = " + fmt("%.4f", f1));
  const double macro = (0.89 + 0.08 + 0.0 + 0.38) / 4.0;
  out.require(std::abs(macro - 0.34) <= 0.005, "macro precision " + fmt("%.4f", macro));
  if (out.pass) {
    out.detail = "1000 cases, max deviation " + fmt("%.3g", worst) + "; F1 " + fmt("%.4f", f1) +
                 ", macro " + fmt("%.4f", macro);
  }
  return out;
}

Outcome ac5_presets() {
  Outcome out;
  struct Row {
    Topology t;
    InitFamily f;
    Hyperparams hp;
  };
  const Row rows[] = {
      {Topology::OneLayer, InitFamily::Xavier, {24, 0.0001, 0.6}},
      {Topology::OneLayer, InitFamily::Kaiming, {36, 0.0001, 0.6}},
      {Topology::TwoLayer, InitFamily::Xavier, {24, 0.006, 0.7}},
      {Topology::TwoLayer, InitFamily::Kaiming, {36, 0.003, 0.7}},
      {Topology::ThreeLayer, InitFamily::Xavier, {36, 0.006, 0.7}},
      {Topology::ThreeLayer, InitFamily::Kaiming, {36, 0.0002, 0.6}},
  };
  int matched = 0;
  for (const auto& r : rows) {
    const Hyperparams got = preset_hyperparams(r.t, r.f);
    const std::string cell = std::string(to_string(r.t)) + "+" + std::string(to_string(r.f));
    out.require(got.batch_size == r.hp.batch_size, cell + " batch size");
    out.require(got.learning_rate == r.hp.learning_rate, cell + " learning rate");
    out.require(got.momentum == r.hp.momentum, cell + " momentum");
    matched += (got.batch_size == r.hp.batch_size) + (got.learning_rate == r.hp.learning_rate) +
               (got.momentum == r.hp.momentum);
  }
  if (out.pass) out.detail = std::to_string(matched) + "/18 values exact";
  return out;
}

Outcome ac6_protocol() {
  Outcome out;
  const Dataset data = synthesize_dataset({6});
  const auto split = holdout_split(data, 0.2, 6);
  const auto total = data.class_counts();
  const auto test = split.test.class_counts();
  for (std::size_t c = 0; c < kClassCount; ++c) {
    const auto want = static_cast<std::size_t>(std::floor(0.2 * double(total[c]) + 1e-9));
    out.require(test[c] == want, "class " + std::to_string(c) + " test count " +
                                     std::to_string(test[c]) + " != " + std::to_string(want));
  }
  std::set<std::size_t> ids;
  for (const auto& s : split.test.samples) ids.insert(s.index);
  for (const auto& s : split.trainval.samples) out.require(ids.insert(s.index).second, "overlap");
  out.require(ids.size() == data.size(), "partition does not cover the dataset");

  const auto folds = loo_splits(split.trainval);
  out.require(folds.size() == split.trainval.size(), "fold count");
  std::multiset<std::size_t> held;
  for (const auto& f : folds) {
    held.insert(f.validation.index);
    out.require(f.train.size() + 1 == split.trainval.size(), "fold train size");
    for (const auto& s : f.train.samples) {
      if (s.index == f.validation.index) out.require(false, "held-out sample in its own fold");
    }
  }
  for (const auto& s : split.trainval.samples) out.require(held.count(s.index) == 1, "coverage");
  if (out.pass) {
    out.detail = "test " + std::to_string(split.test.size()) + " / trainval " +
                 std::to_string(split.trainval.size()) + ", " + std::to_string(folds.size()) +
                 " folds";
  }
  return out;
}

Outcome ac7_end_to_end() {
  Outcome out;
  auto run = [](double separation) {
    ExperimentConfig cfg;
    cfg.topology = Topology::ThreeLayer;
    cfg.init = {InitFamily::Kaiming, InitDist::Normal};
    cfg.epochs = 200;
    cfg.seed = 7;
    cfg.split_seed = 7;
    cfg.loo_enabled = false;
    cfg.data.synthetic = {7, 16, 12, separation};
    return run_experiment(cfg);
  };
  const auto separable = run(2.0);
  const auto noise = run(0.0);
  const double a = separable.holdout.accuracy, b = noise.holdout.accuracy;
  out.require(separable.trainval_size + separable.test_size == 192, "dataset size");
  out.require(a >= 0.90, "separation 2.0 holdout accuracy " + fmt("%.3f", a));
  out.require(b >= 0.10 && b <= 0.40, "separation 0 holdout accuracy " + fmt("%.3f", b));
  if (out.pass) {
    out.detail = "holdout accuracy " + fmt("%.3f", a) + " (separation 2.0), " + fmt("%.3f", b) +
                 " (separation 0)";
  }
  return out;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + MLPINIT_CLI_PATH + "\" " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome ac8_determinism() {
  Outcome out;
  const fs::path root = fs::temp_directory_path() / "mlpinit_acceptance_ac8";
  fs::remove_all(root);
  const int a = run_cli("suite --synthetic --seed 7 --out \"" + (root / "a").string() + "\"");
  const int b = run_cli("suite --synthetic --seed 7 --out \"" + (root / "b").string() + "\"");
  out.require(a == 0 && b == 0,
              "suite exit codes " + std::to_string(a) + ", " + std::to_string(b));
  const std::string ja = slurp(root / "a" / "result.json");
  const std::string jb = slurp(root / "b" / "result.json");
  out.require(!ja.empty(), "result.json missing");
  out.require(ja == jb, "result.json differs between runs");
  if (out.pass) out.detail = "result.json identical (" + std::to_string(ja.size()) + " bytes)";
  fs::remove_all(root);
  return out;
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"AC1 initializer variance", ac1_initializer_variance},
      {"AC2 variance propagation", ac2_variance_propagation},
      {"AC3 gradient check", ac3_gradient_check},
      {"AC4 metrics oracle", ac4_metrics_oracle},
      {"AC5 hyperparameter presets", ac5_presets},
      {"AC6 holdout and LOO protocol", ac6_protocol},
      {"AC7 end-to-end synthetic run", ac7_end_to_end},
      {"AC8 suite determinism", ac8_determinism},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s %-30s %7.2fs  %s\n", o.pass ? "PASS" : "FAIL", name, secs, o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  std::printf("%d of %zu criteria passed\n", int(std::size(criteria)) - failed, std::size(criteria));
  return failed == 0 ? 0 : 1;
}
