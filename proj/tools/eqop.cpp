#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "eqop/binary_io.hpp"
#include "eqop/dataset.hpp"
#include "eqop/errors.hpp"
#include "eqop/eval.hpp"
#include "eqop/idx.hpp"
#include "eqop/imaging.hpp"
#include "eqop/models.hpp"
#include "eqop/runtime.hpp"
#include "eqop/verify.hpp"

#ifndef EQOP_VERSION
#define EQOP_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace eqop;

namespace {

enum Exit { kOk = 0, kIo = 1, kUsage = 2, kVerify = 3 };

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string file_hash(const fs::path& p) {
  const auto bytes = io::read_file(p);
  return io::hex64(io::fnv1a(bytes.data(), bytes.size()));
}

fs::path dataset_file(const fs::path& p) { return fs::is_directory(p) ? p / "dataset.eqds" : p; }

void write_json(const fs::path& p, const json& j) { io::write_atomic(p, j.dump(2) + "\n"); }

// ---------------------------------------------------------------- gen-data

struct GenArgs {
  std::string kind = "shapes";
  int count = 200;
  int rot = 1, tx = 1, ty = 1;
  std::uint64_t seed = 0;
  std::string out;
  std::string idx_images, idx_labels;
  std::string anchors = "orbit";
  std::optional<std::size_t> train_pairs, val_pairs, test_pairs;
  double test_ratio = 0.5, val_ratio = 0.2;
};

int cmd_gen_data(const GenArgs& a) {
  const auto t0 = Clock::now();
  if (a.count < 1) throw ValidationError("--count must be >= 1");
  if (a.anchors != "orbit" && a.anchors != "base") throw ValidationError("--anchors must be 'orbit' or 'base'");
  const TransformSpec transforms = TransformSpec::make(a.rot, a.tx, a.ty);

  std::vector<ImageGrid> base;
  if (a.kind == "shapes") {
    base = gen_shapes(a.count, a.seed);
  } else if (a.kind == "mnist") {
    if (a.idx_images.empty()) throw ValidationError("--kind mnist needs --idx-images");
    std::optional<fs::path> labels;
    if (!a.idx_labels.empty()) labels = a.idx_labels;
    IdxData idx = load_idx(a.idx_images, labels);
    if (static_cast<std::size_t>(a.count) < idx.images.size()) idx.images.resize(static_cast<std::size_t>(a.count));
    base = std::move(idx.images);
  } else {
    throw ValidationError("--kind must be 'shapes' or 'mnist'");
  }

  const PairAnchors anchors = a.anchors == "orbit" ? PairAnchors::Orbit : PairAnchors::Base;
  DatasetBundle data = build_dataset(base, transforms, {a.test_ratio, a.val_ratio}, anchors,
                                     {a.train_pairs, a.val_pairs, a.test_pairs}, a.seed);
  data.generator = json{{"kind", a.kind},
                        {"count", a.count},
                        {"rotations", a.rot},
                        {"tx", a.tx},
                        {"ty", a.ty},
                        {"rotation_method", to_string(transforms.method)},
                        {"anchors", a.anchors},
                        {"test_ratio", a.test_ratio},
                        {"val_ratio", a.val_ratio},
                        {"seed", a.seed}};
  const fs::path out = a.out;
  const fs::path file = out / "dataset.eqds";
  write_dataset(data, file);
  json manifest{{"tool_version", EQOP_VERSION},
                {"command", "gen-data"},
                {"generator", data.generator},
                {"dataset", file.filename().string()},
                {"dataset_hash", file_hash(file)},
                {"counts", {{"train", data.train.size()}, {"val", data.val.size()}, {"test", data.test.size()}}},
                {"image", {{"height", data.height()}, {"width", data.width()}}},
                {"wall_clock_seconds", seconds_since(t0)}};
  write_json(out / "manifest.json", manifest);
  std::cout << "wrote " << file.string() << " (" << data.train.size() << " train, " << data.val.size() << " val, "
            << data.test.size() << " test pairs)\n";
  return kOk;
}

// ---------------------------------------------------------------- train

struct TrainArgs {
  std::string config, data, out;
  std::optional<std::string> variant, op;
  std::optional<int> latent_dim, batch, epochs, k_latent;
  std::optional<double> lr, temperature;
  std::optional<std::uint64_t> seed;
};

TrainConfig load_config(const TrainArgs& a) {
  json j = json::object();
  if (!a.config.empty()) {
    const std::string text = io::read_text(a.config);
    try {
      j = json::parse(text);
    } catch (const json::exception& e) {
      throw ValidationError("config " + a.config + " is not valid JSON: " + e.what());
    }
    if (!j.is_object()) throw ValidationError("config " + a.config + " must hold a JSON object");
  }
  // Flags override the file.
  if (a.variant) {
    j["variant"] = *a.variant;
    if (!a.op) j.erase("operator");
  }
  if (a.op) j["operator"] = *a.op;
  if (a.latent_dim) j["latent_dim"] = *a.latent_dim;
  if (a.lr) j["lr"] = *a.lr;
  if (a.batch) j["batch"] = *a.batch;
  if (a.epochs) j["epochs"] = *a.epochs;
  if (a.seed) j["seed"] = *a.seed;
  if (a.k_latent) j["weak"]["k_latent"] = *a.k_latent;
  if (a.temperature) j["weak"]["temperature"] = *a.temperature;
  return TrainConfig::from_json(j);
}

int cmd_train(const TrainArgs& a) {
  const auto t0 = Clock::now();
  const TrainConfig cfg = load_config(a);
  const fs::path data_path = dataset_file(a.data);
  const DatasetBundle data = read_dataset(data_path);
  const TrainResult result = train(data, cfg);

  const fs::path out = a.out;
  const fs::path ckpt = out / "model.eqck";
  write_checkpoint(result.model, ckpt);
  write_json(out / "model.json", checkpoint_sidecar(result));
  std::string lines;
  for (const auto& h : result.history) lines += h.to_json().dump() + "\n";
  io::write_atomic(out / "history.jsonl", lines);

  const auto& best = result.history.at(static_cast<std::size_t>(result.best_epoch - 1));
  json manifest{{"tool_version", EQOP_VERSION},
                {"command", "train"},
                {"config", cfg.to_json()},
                {"config_hash", io::hex64(cfg.hash())},
                {"dataset", fs::absolute(data_path).string()},
                {"dataset_hash", file_hash(data_path)},
                {"checkpoint", ckpt.filename().string()},
                {"checkpoint_hash", file_hash(ckpt)},
                {"best_epoch", result.best_epoch},
                {"best_val_loss", best.val_loss},
                {"wall_clock_seconds", seconds_since(t0)}};
  write_json(out / "manifest.json", manifest);
  std::cout << "best epoch " << result.best_epoch << ", val loss " << best.val_loss << "\n";
  return kOk;
}

// ---------------------------------------------------------------- eval

struct EvalArgs {
  std::string checkpoint, data, out;
  int grids = 0;
};

int cmd_eval(const EvalArgs& a) {
  const auto t0 = Clock::now();
  const Model model = read_checkpoint(a.checkpoint);
  const fs::path data_path = dataset_file(a.data);
  const DatasetBundle data = read_dataset(data_path);
  if (!data.test.empty() && data.test.front().x1.size() != model.params.pixel_dim()) {
    throw ValidationError("checkpoint expects " + std::to_string(model.params.pixel_dim()) +
                          " pixels, dataset images have " + std::to_string(data.test.front().x1.size()));
  }
  const std::string dhash = file_hash(data_path);
  const EvalReport report = evaluate(model, data, dhash);

  const fs::path out = a.out;
  write_json(out / "report.json", report.to_json());
  if (a.grids > 0) {
    const OperatorBank bank(model.config);
    const GroupSpec latent_group = model.config.variant == Variant::Weak
                                       ? GroupSpec::cyclic(model.config.weak.k_latent)
                                       : data.transforms.group();
    const auto elements = latent_group.elements();
    std::uint32_t last = 0;
    int written = 0;
    for (std::size_t i = 0; i < data.test.size() && written < a.grids; ++i) {
      if (i > 0 && data.test[i].base_id == last) continue;
      last = data.test[i].base_id;
      std::vector<ImageGrid> strip;
      for (const auto& g : elements) strip.push_back(apply_latent_transform(model, bank, data.test[i].x1, g));
      export_grid(strip, 1, static_cast<int>(strip.size()), out / ("grid_" + std::to_string(written) + ".pgm"));
      ++written;
    }
  }
  json manifest{{"tool_version", EQOP_VERSION},
                {"command", "eval"},
                {"config", model.config.to_json()},
                {"checkpoint", fs::absolute(a.checkpoint).string()},
                {"checkpoint_hash", file_hash(a.checkpoint)},
                {"dataset", fs::absolute(data_path).string()},
                {"dataset_hash", dhash},
                {"report", "report.json"},
                {"wall_clock_seconds", seconds_since(t0)}};
  write_json(out / "manifest.json", manifest);
  std::cout << "test mse " << report.test_mse << ", equivariance residual " << report.equivariance_residual << "\n";
  return kOk;
}

// ---------------------------------------------------------------- verify

struct VerifyArgs {
  int max_order = 60;
  bool inject_fault = false;
  std::string out;
};

int cmd_verify(const VerifyArgs& a) {
  if (a.max_order < 1) throw ValidationError("--max-order must be >= 1");
  const auto checks = run_theory_checks({a.max_order, a.inject_fault});
  std::string text = format_checks(checks);
  text += "\n" + topology_demo().text;
  std::cout << text;
  if (!a.out.empty()) io::write_atomic(a.out, text);
  int failed = 0;
  for (const auto& c : checks) failed += c.pass ? 0 : 1;
  if (failed > 0) {
    std::cerr << failed << " check(s) failed:\n";
    for (const auto& c : checks) {
      if (!c.pass) std::cerr << "  " << c.name << ": deviation " << c.max_deviation << "\n";
    }
    return kVerify;
  }
  std::cout << checks.size() << " checks passed\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributed latent operators: data generation, training, evaluation and theory checks"};
  app.require_subcommand(1);
  app.set_version_flag("--version", EQOP_VERSION);

  GenArgs gen;
  auto* g = app.add_subcommand("gen-data", "Generate a paired dataset");
  g->add_option("--kind", gen.kind, "shapes or mnist")->check(CLI::IsMember({"shapes", "mnist"}));
  g->add_option("--count", gen.count, "Number of base images");
  g->add_option("--rot", gen.rot, "Number of rotations");
  g->add_option("--tx", gen.tx, "Number of x-translations");
  g->add_option("--ty", gen.ty, "Number of y-translations");
  g->add_option("--seed", gen.seed, "Random seed");
  g->add_option("--out", gen.out, "Output directory")->required();
  g->add_option("--idx-images", gen.idx_images, "IDX image file (mnist)");
  g->add_option("--idx-labels", gen.idx_labels, "IDX label file (mnist)");
  g->add_option("--anchors", gen.anchors, "orbit: pairs start from every transformed image; base: from the original");
  g->add_option("--train-pairs", gen.train_pairs, "Cap on training pairs");
  g->add_option("--val-pairs", gen.val_pairs, "Cap on validation pairs");
  g->add_option("--test-pairs", gen.test_pairs, "Cap on test pairs");
  g->add_option("--test-ratio", gen.test_ratio, "Fraction of base images held out for test");
  g->add_option("--val-ratio", gen.val_ratio, "Fraction of the remainder used for validation");

  TrainArgs tr;
  auto* t = app.add_subcommand("train", "Train a model");
  t->add_option("--config", tr.config, "Training config JSON");
  t->add_option("--data", tr.data, "Dataset file or directory")->required();
  t->add_option("--out", tr.out, "Output directory")->required();
  t->add_option("--variant", tr.variant, "shift, disentangled, weak or stacked");
  t->add_option("--operator", tr.op, "perm, complex or disentangled");
  t->add_option("--latent-dim", tr.latent_dim);
  t->add_option("--lr", tr.lr);
  t->add_option("--batch", tr.batch);
  t->add_option("--epochs", tr.epochs);
  t->add_option("--seed", tr.seed);
  t->add_option("--k-latent", tr.k_latent, "Weak supervision: number of latent transformations");
  t->add_option("--temperature", tr.temperature, "Weak supervision: soft-max temperature");

  EvalArgs ev;
  auto* e = app.add_subcommand("eval", "Evaluate a checkpoint");
  e->add_option("--checkpoint", ev.checkpoint)->required();
  e->add_option("--data", ev.data, "Dataset file or directory")->required();
  e->add_option("--out", ev.out, "Output directory")->required();
  e->add_option("--grids", ev.grids, "Number of test images to render as orbit strips");

  VerifyArgs ve;
  auto* v = app.add_subcommand("verify", "Run the representation theory checks");
  v->add_option("--max-order", ve.max_order, "Largest group order to check");
  v->add_option("--out", ve.out, "Also write the report to this file");
  v->add_flag("--inject-fault", ve.inject_fault, "Negate one operator to exercise the failure path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    configure_threads();
    if (*g) return cmd_gen_data(gen);
    if (*t) return cmd_train(tr);
    if (*e) return cmd_eval(ev);
    if (*v) return cmd_verify(ve);
  } catch (const IoError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kIo;
  } catch (const ParseError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kIo;
  } catch (const Error& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kUsage;
  } catch (const std::filesystem::filesystem_error& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kIo;
  }
  return kUsage;
}
