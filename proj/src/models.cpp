#include "eqop/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <set>
#include <utility>

#include "eqop/binary_io.hpp"
#include "eqop/errors.hpp"

namespace eqop {

using numkit::Complex;
using numkit::ComplexMatrix;
using json = nlohmann::json;

namespace {

constexpr std::uint16_t kCheckpointVersion = 1;
constexpr Eigen::Index kEvalChunk = 256;

std::string list(const std::vector<int>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s + "]";
}

}  // namespace

std::string to_string(OperatorKind k) {
  switch (k) {
    case OperatorKind::Permutation: return "perm";
    case OperatorKind::Complex: return "complex";
    case OperatorKind::Disentangled: return "disentangled";
  }
  return "unknown";
}

OperatorKind operator_kind_from_string(const std::string& name) {
  if (name == "perm") return OperatorKind::Permutation;
  if (name == "complex") return OperatorKind::Complex;
  if (name == "disentangled") return OperatorKind::Disentangled;
  throw ValidationError("unknown operator kind '" + name + "'");
}

// ---------------------------------------------------------------- config

int TrainConfig::stages() const { return variant == Variant::Stacked ? static_cast<int>(orders.size()) : 1; }

void TrainConfig::validate() const {
  if (orders.empty()) throw ValidationError("group.orders must not be empty");
  for (int k : orders) {
    if (k < 1) throw ValidationError("group order must be >= 1, got " + std::to_string(k));
  }
  if (latent_dim < 1) throw ValidationError("latent_dim must be >= 1");
  if (!(lr > 0.0) || !std::isfinite(lr)) throw ValidationError("lr must be positive");
  if (batch < 1) throw ValidationError("batch must be >= 1");
  if (epochs < 1) throw ValidationError("epochs must be >= 1");

  switch (group_kind) {
    case GroupKind::Cyclic:
      if (orders.size() != 1) throw ValidationError("cyclic group needs exactly one order");
      break;
    case GroupKind::DirectProduct:
      if (orders.size() < 2) throw ValidationError("direct product needs at least two orders");
      break;
    case GroupKind::SemiDirect: {
      // Orders are listed in data order (rotation, x, y).
      if (orders.size() != 3) throw ValidationError("semi-direct group needs orders [rotations, K, K']");
      if (action.empty()) {
        if (orders[1] != orders[2]) {
          throw ValidationError("semi-direct group with K != K' needs an explicit action table");
        }
        (void)GroupSpec::quarter_turn(orders[1], orders[0]);
      } else {
        (void)GroupSpec::semi_direct(orders[1], orders[2], orders[0], action);
      }
      break;
    }
  }
  if (group_kind != GroupKind::SemiDirect && !action.empty()) {
    throw ValidationError("group.action is only valid for a semi-direct group");
  }

  const bool disentangled_op = op == OperatorKind::Disentangled;
  if ((variant == Variant::Disentangled) != disentangled_op) {
    throw ValidationError("the disentangled operator goes with the disentangled variant only");
  }
  switch (variant) {
    case Variant::Shift:
    case Variant::Disentangled:
      if (orders.size() != 1) {
        throw UnsupportedError(to_string(variant) + " model takes a single transformation factor, got " +
                               std::to_string(orders.size()) + " (use the stacked variant)");
      }
      if (variant == Variant::Disentangled && latent_dim < 2) {
        throw DimensionError("disentangled operator needs latent_dim >= 2");
      }
      break;
    case Variant::Weak:
      if (orders.size() != 1) {
        throw UnsupportedError("weak supervision handles a single transformation factor, got " +
                               std::to_string(orders.size()));
      }
      if (op != OperatorKind::Complex) throw ValidationError("weak variant uses the complex operator family");
      if (weak.k_latent < 1) throw ValidationError("weak.k_latent must be >= 1");
      if (!(weak.temperature > 0.0) || !std::isfinite(weak.temperature)) {
        throw ValidationError("weak.temperature must be positive");
      }
      break;
    case Variant::Stacked:
      if (orders.size() != 2 && orders.size() != 3) {
        throw UnsupportedError("stacked model needs 2 or 3 factors, got " + std::to_string(orders.size()));
      }
      break;
  }
  if (op == OperatorKind::Permutation) {
    for (int k : orders) {
      if (latent_dim % k != 0) {
        throw DimensionError("permutation shift needs K | latent_dim: K=" + std::to_string(k) +
                             ", latent_dim=" + std::to_string(latent_dim));
      }
    }
  }
}

json TrainConfig::to_json() const {
  json group{{"kind", eqop::to_string(group_kind)}, {"orders", orders}};
  if (!action.empty()) group["action"] = action;
  return json{{"variant", eqop::to_string(variant)},
              {"operator", eqop::to_string(op)},
              {"group", group},
              {"latent_dim", latent_dim},
              {"lr", lr},
              {"batch", batch},
              {"epochs", epochs},
              {"seed", seed},
              {"weak", {{"k_latent", weak.k_latent}, {"temperature", weak.temperature}}}};
}

TrainConfig TrainConfig::from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("training config must be a JSON object");
  static const std::set<std::string> known{"variant", "operator", "group", "latent_dim", "lr",
                                           "batch",   "epochs",   "seed",  "weak"};
  for (const auto& [key, _] : j.items()) {
    if (!known.count(key)) throw ValidationError("unknown config key '" + key + "'");
  }
  TrainConfig c;
  try {
    if (j.contains("variant")) c.variant = variant_from_string(j.at("variant").get<std::string>());
    switch (c.variant) {
      case Variant::Shift: c.op = OperatorKind::Permutation; break;
      case Variant::Disentangled: c.op = OperatorKind::Disentangled; break;
      case Variant::Weak:
      case Variant::Stacked: c.op = OperatorKind::Complex; break;
    }
    if (j.contains("operator")) c.op = operator_kind_from_string(j.at("operator").get<std::string>());
    if (j.contains("group")) {
      const auto& g = j.at("group");
      if (!g.is_object()) throw ValidationError("config.group must be an object");
      for (const auto& [key, _] : g.items()) {
        if (key != "kind" && key != "orders" && key != "action") {
          throw ValidationError("unknown config key 'group." + key + "'");
        }
      }
      if (g.contains("orders")) c.orders = g.at("orders").get<std::vector<int>>();
      if (g.contains("kind")) {
        c.group_kind = group_kind_from_string(g.at("kind").get<std::string>());
      } else {
        c.group_kind = c.orders.size() == 1 ? GroupKind::Cyclic : GroupKind::DirectProduct;
      }
      if (g.contains("action")) c.action = g.at("action").get<GroupSpec::ActionTable>();
    }
    if (j.contains("latent_dim")) c.latent_dim = j.at("latent_dim").get<int>();
    if (j.contains("lr")) c.lr = j.at("lr").get<double>();
    if (j.contains("batch")) c.batch = j.at("batch").get<int>();
    if (j.contains("epochs")) c.epochs = j.at("epochs").get<int>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("weak")) {
      const auto& w = j.at("weak");
      if (!w.is_object()) throw ValidationError("config.weak must be an object");
      for (const auto& [key, _] : w.items()) {
        if (key != "k_latent" && key != "temperature") throw ValidationError("unknown config key 'weak." + key + "'");
      }
      if (w.contains("k_latent")) c.weak.k_latent = w.at("k_latent").get<int>();
      if (w.contains("temperature")) c.weak.temperature = w.at("temperature").get<double>();
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed training config: ") + e.what());
  }
  c.validate();
  return c;
}

std::uint64_t TrainConfig::hash() const { return io::fnv1a(to_json().dump()); }

json HistoryEntry::to_json() const {
  return json{{"epoch", epoch},
              {"train_loss", train_loss},
              {"val_loss", val_loss},
              {"equivariance_residual", equivariance_residual}};
}

// ---------------------------------------------------------------- operators

OperatorBank::OperatorBank(const TrainConfig& cfg) {
  cfg.validate();
  const int N = cfg.latent_dim;
  auto family = [&](int K, OperatorKind kind) {
    std::vector<LatentOperator> ops;
    ops.reserve(K);
    for (int k = 0; k < K; ++k) {
      switch (kind) {
        case OperatorKind::Permutation: ops.push_back(shift_operator_perm(K, N, k)); break;
        case OperatorKind::Complex: ops.push_back(shift_operator_complex(K, N, k)); break;
        case OperatorKind::Disentangled: ops.push_back(disentangled_operator(K, N, k)); break;
      }
    }
    return ops;
  };
  if (cfg.variant == Variant::Weak) {
    ops_.push_back(family(cfg.weak.k_latent, cfg.op));
  } else {
    for (int s = 0; s < cfg.stages(); ++s) ops_.push_back(family(cfg.orders[s], cfg.op));
  }
}

numkit::OperatorChain OperatorBank::chain(const GroupElement& g) const {
  if (static_cast<int>(g.size()) != stages()) {
    throw ValidationError("element " + to_string(g) + " does not match the " + std::to_string(stages()) +
                          "-stage operator chain");
  }
  numkit::OperatorChain c;
  for (int s = 0; s < stages(); ++s) {
    if (g[s] < 0 || g[s] >= order(s)) throw ValidationError("element " + to_string(g) + " out of range");
    c.push_back(&ops_[s][g[s]]);
  }
  return c;
}

// ---------------------------------------------------------------- helpers

ModelParams init_params(const TrainConfig& cfg, int pixel_dim) {
  if (pixel_dim < 1) throw DimensionError("pixel_dim must be >= 1");
  std::mt19937_64 rng(cfg.seed);
  auto fill = [&](Eigen::Index rows, Eigen::Index cols, int fan_in) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    std::uniform_real_distribution<double> u(-bound, bound);
    ComplexMatrix m(rows, cols);
    for (Eigen::Index c = 0; c < cols; ++c) {
      for (Eigen::Index r = 0; r < rows; ++r) {
        const double re = u(rng);
        const double im = u(rng);
        m(r, c) = {re, im};
      }
    }
    return m;
  };
  ModelParams p;
  p.variant = cfg.variant;
  p.encoder = fill(cfg.latent_dim, pixel_dim, pixel_dim);
  p.decoder = fill(pixel_dim, cfg.latent_dim, cfg.latent_dim);
  for (int s = 1; s < cfg.stages(); ++s) p.intermediates.push_back(fill(cfg.latent_dim, cfg.latent_dim, cfg.latent_dim));
  return p;
}

void check_compatible(const TrainConfig& cfg, const DatasetBundle& data) {
  cfg.validate();
  if (data.train.empty()) throw ValidationError("dataset has no training pairs");
  if (data.val.empty()) throw ValidationError("dataset has no validation pairs");
  const auto data_orders = data.transforms.orders();
  if (cfg.variant == Variant::Weak && data_orders.size() != 1) {
    throw UnsupportedError("weak supervision handles a single transformation factor, dataset has " +
                           std::to_string(data_orders.size()));
  }
  if (cfg.orders != data_orders) {
    throw ValidationError("config group orders " + list(cfg.orders) + " do not match dataset transform orders " +
                          list(data_orders));
  }
}

Eigen::MatrixXd pixel_matrix(const std::vector<ImageGrid>& images) {
  if (images.empty()) return {};
  Eigen::MatrixXd x(images.front().size(), static_cast<Eigen::Index>(images.size()));
  for (std::size_t i = 0; i < images.size(); ++i) {
    if (images[i].size() != images.front().size()) throw DimensionError("images differ in size");
    x.col(static_cast<Eigen::Index>(i)) = images[i].vector();
  }
  return x;
}

Eigen::MatrixXd pair_matrix(const std::vector<PairSample>& pairs, bool second) {
  if (pairs.empty()) return {};
  const auto P = pairs.front().x1.size();
  Eigen::MatrixXd x(P, static_cast<Eigen::Index>(pairs.size()));
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const ImageGrid& img = second ? pairs[i].x2 : pairs[i].x1;
    if (img.size() != P) throw DimensionError("pair images differ in size");
    x.col(static_cast<Eigen::Index>(i)) = img.vector();
  }
  return x;
}

ComplexMatrix encode(const ModelParams& params, const Eigen::MatrixXd& x) {
  return numkit::mul_real(params.encoder, x);
}

Eigen::VectorXd infer_shift_scores(const Eigen::VectorXcd& z1, const Eigen::VectorXcd& z2, int k_latent) {
  if (z1.size() != z2.size()) throw DimensionError("infer_shift_scores: code lengths differ");
  if (k_latent < 1) throw ValidationError("infer_shift_scores: K_L must be >= 1");
  const Eigen::Index N = z1.size();
  // Sum the normalized spectrum per residue class n mod K_L, then one K_L-point DFT.
  Eigen::VectorXcd per_class = Eigen::VectorXcd::Zero(k_latent);
  for (Eigen::Index n = 0; n < N; ++n) {
    const Complex c = z1[n] * std::conj(z2[n]);
    const double mag = std::abs(c);
    if (mag < 1e-12) continue;
    per_class[n % k_latent] += c / mag;
  }
  Eigen::VectorXd score(k_latent);
  for (int kappa = 0; kappa < k_latent; ++kappa) {
    double s = 0.0;
    for (int r = 0; r < k_latent; ++r) {
      const double angle = 2.0 * std::numbers::pi * static_cast<double>((static_cast<long>(kappa) * r) % k_latent) /
                           k_latent;
      s += (per_class[r] * Complex(std::cos(angle), std::sin(angle))).real();
    }
    score[kappa] = N > 0 ? s / static_cast<double>(N) : 0.0;
  }
  return score;
}

namespace {

int argmax(const Eigen::VectorXd& v) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return static_cast<int>(best);
}

std::vector<GroupElement> weak_elements(const ModelParams& params, int k_latent, const Eigen::MatrixXd& x1,
                                        const Eigen::MatrixXd& x2) {
  std::vector<GroupElement> out;
  out.reserve(x1.cols());
  for (Eigen::Index c0 = 0; c0 < x1.cols(); c0 += kEvalChunk) {
    const Eigen::Index n = std::min(kEvalChunk, x1.cols() - c0);
    const ComplexMatrix z1 = encode(params, x1.middleCols(c0, n));
    const ComplexMatrix z2 = encode(params, x2.middleCols(c0, n));
    for (Eigen::Index b = 0; b < n; ++b) out.push_back(GroupElement{argmax(infer_shift_scores(z1.col(b), z2.col(b), k_latent))});
  }
  return out;
}

std::vector<numkit::OperatorChain> chains_for(const OperatorBank& bank, const std::vector<GroupElement>& elems,
                                              std::size_t begin, std::size_t count) {
  std::vector<numkit::OperatorChain> out;
  out.reserve(count);
  for (std::size_t i = begin; i < begin + count; ++i) out.push_back(bank.chain(elems[i]));
  return out;
}

struct Split {
  Eigen::MatrixXd x1, x2;
  std::vector<GroupElement> elems;  // ground truth, unused by the weak objective
};

Split gather(const std::vector<PairSample>& pairs) {
  Split s{pair_matrix(pairs, false), pair_matrix(pairs, true), {}};
  for (const auto& p : pairs) s.elems.push_back(p.param);
  return s;
}

}  // namespace

double supervised_objective(const ModelParams& params, const Eigen::MatrixXd& x1, const Eigen::MatrixXd& x2,
                            std::vector<numkit::OperatorChain> chains, numkit::Gradients* grads) {
  const numkit::Tape tape = numkit::forward_chain(x1, params, std::move(chains));
  const numkit::PairLoss loss = numkit::l2_pair_loss(tape.recon_plain, tape.recon_transformed, x1, x2);
  if (grads) *grads = numkit::backward(tape, params, loss.grad_plain, loss.grad_transformed);
  return loss.value;
}

Eigen::MatrixXd weak_weights(const ComplexMatrix& z1, const ComplexMatrix& z2, int k_latent, double tau) {
  if (z1.rows() != z2.rows() || z1.cols() != z2.cols()) throw DimensionError("weak_weights: code shapes differ");
  Eigen::MatrixXd alpha(k_latent, z1.cols());
  for (Eigen::Index b = 0; b < z1.cols(); ++b) {
    const Eigen::VectorXd s = infer_shift_scores(z1.col(b), z2.col(b), k_latent) / tau;
    const Eigen::VectorXd e = (s.array() - s.maxCoeff()).exp();
    alpha.col(b) = e / e.sum();
  }
  return alpha;
}

double weak_objective(const ModelParams& params, const OperatorBank& bank, const Eigen::MatrixXd& x1,
                      const Eigen::MatrixXd& x2, const Eigen::MatrixXd& alpha, numkit::Gradients* grads) {
  const Eigen::Index B = x1.cols();
  const Eigen::Index P = x1.rows();
  const int KL = bank.order(0);
  if (alpha.rows() != KL || alpha.cols() != B || x2.cols() != B || x2.rows() != P) {
    throw DimensionError("weak_objective: batch shapes differ");
  }
  const ComplexMatrix z1 = encode(params, x1);

  // Columns: B plain codes, then for each kappa the B transformed codes.
  ComplexMatrix codes(z1.rows(), B * (1 + KL));
  codes.leftCols(B) = z1;
  for (int k = 0; k < KL; ++k) {
    auto block = codes.middleCols(B * (1 + k), B);
    block = z1;
    bank.at(0, k).apply_inplace(block);
  }
  const ComplexMatrix recon = params.decoder * codes;
  const double scale = 1.0 / (static_cast<double>(P) * static_cast<double>(B));

  ComplexMatrix grad(P, codes.cols());
  grad.leftCols(B) = recon.leftCols(B) - x1.cast<Complex>();
  double value = grad.leftCols(B).squaredNorm();
  for (int k = 0; k < KL; ++k) {
    auto r = grad.middleCols(B * (1 + k), B);
    r = recon.middleCols(B * (1 + k), B) - x2.cast<Complex>();
    const Eigen::VectorXd err = r.colwise().squaredNorm().transpose();
    value += alpha.row(k).dot(err);
    r = r * alpha.row(k).transpose().cast<Complex>().asDiagonal();
  }
  value *= scale;
  if (!grads) return value;

  grad *= 2.0 * scale;
  *grads = numkit::zero_gradients(params);
  grads->decoder.noalias() = grad * codes.adjoint();
  ComplexMatrix g_codes = params.decoder.adjoint() * grad;
  ComplexMatrix g_z1 = g_codes.leftCols(B);
  for (int k = 0; k < KL; ++k) {
    auto block = g_codes.middleCols(B * (1 + k), B);
    bank.at(0, k).apply_adjoint_inplace(block);
    g_z1 += block;
  }
  grads->encoder = numkit::mul_real_transpose(g_z1, x1);
  return value;
}

double batch_objective(const Model& model, const OperatorBank& bank, const Eigen::MatrixXd& x1,
                       const Eigen::MatrixXd& x2, const std::vector<GroupElement>& elements,
                       numkit::Gradients* grads) {
  if (model.config.variant == Variant::Weak) {
    const Eigen::MatrixXd alpha = weak_weights(encode(model.params, x1), encode(model.params, x2), bank.order(0),
                                               model.config.weak.temperature);
    return weak_objective(model.params, bank, x1, x2, alpha, grads);
  }
  if (static_cast<Eigen::Index>(elements.size()) != x1.cols()) {
    throw DimensionError("batch_objective: one element per pair required");
  }
  return supervised_objective(model.params, x1, x2, chains_for(bank, elements, 0, elements.size()), grads);
}

namespace {

double evaluate_loss(const Model& model, const OperatorBank& bank, const Split& s) {
  double total = 0.0;
  const Eigen::Index n = s.x1.cols();
  for (Eigen::Index c0 = 0; c0 < n; c0 += kEvalChunk) {
    const Eigen::Index m = std::min(kEvalChunk, n - c0);
    const std::vector<GroupElement> elems(s.elems.begin() + c0, s.elems.begin() + c0 + m);
    total += batch_objective(model, bank, s.x1.middleCols(c0, m), s.x2.middleCols(c0, m), elems, nullptr) *
             static_cast<double>(m);
  }
  return total / static_cast<double>(n);
}

double residual(const Model& model, const OperatorBank& bank, const Split& s,
                const std::vector<GroupElement>& elems) {
  double num = 0.0, den = 0.0;
  const Eigen::Index n = s.x1.cols();
  for (Eigen::Index c0 = 0; c0 < n; c0 += kEvalChunk) {
    const Eigen::Index m = std::min(kEvalChunk, n - c0);
    const ComplexMatrix z1 = encode(model.params, s.x1.middleCols(c0, m));
    const ComplexMatrix z2 = encode(model.params, s.x2.middleCols(c0, m));
    const ComplexMatrix moved = numkit::apply_chains(
        model.params, chains_for(bank, elems, static_cast<std::size_t>(c0), static_cast<std::size_t>(m)), z1);
    num += (z2 - moved).squaredNorm();
    den += z2.squaredNorm();
  }
  return den > 0.0 ? num / den : 0.0;
}

TrainResult run_training(const DatasetBundle& data, const TrainConfig& cfg) {
  check_compatible(cfg, data);
  const OperatorBank bank(cfg);
  const Split train = gather(data.train);
  const Split val = gather(data.val);
  const int P = static_cast<int>(train.x1.rows());

  TrainResult result;
  Model current{cfg, init_params(cfg, P)};
  result.model = current;
  result.optimizer = numkit::make_adam(std::as_const(current.params).tensors(), cfg.lr);
  std::seed_seq shuffle_seed{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32), 1u};
  std::mt19937_64 rng(shuffle_seed);

  const auto n = static_cast<std::size_t>(train.x1.cols());
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  double best_val = std::numeric_limits<double>::infinity();
  Eigen::MatrixXd b1(P, cfg.batch), b2(P, cfg.batch);
  std::vector<GroupElement> belems;

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double acc = 0.0;
    for (std::size_t start = 0; start < n; start += static_cast<std::size_t>(cfg.batch)) {
      const std::size_t m = std::min<std::size_t>(static_cast<std::size_t>(cfg.batch), n - start);
      b1.resize(P, static_cast<Eigen::Index>(m));
      b2.resize(P, static_cast<Eigen::Index>(m));
      belems.clear();
      for (std::size_t i = 0; i < m; ++i) {
        const std::size_t src = order[start + i];
        b1.col(static_cast<Eigen::Index>(i)) = train.x1.col(static_cast<Eigen::Index>(src));
        b2.col(static_cast<Eigen::Index>(i)) = train.x2.col(static_cast<Eigen::Index>(src));
        belems.push_back(train.elems[src]);
      }
      numkit::Gradients grads;
      const double loss = batch_objective(current, bank, b1, b2, belems, &grads);
      numkit::adam_step(current.params.tensors(), grads.tensors(), result.optimizer, cfg.lr);
      acc += loss * static_cast<double>(m);
    }
    for (const auto* t : std::as_const(current.params).tensors()) {
      if (!numkit::all_finite(*t)) {
        throw InconsistencyError("training diverged at epoch " + std::to_string(epoch) + " (non-finite weights)");
      }
    }

    HistoryEntry h;
    h.epoch = epoch;
    h.train_loss = acc / static_cast<double>(n);
    h.val_loss = evaluate_loss(current, bank, val);
    const auto elems = cfg.variant == Variant::Weak ? weak_elements(current.params, cfg.weak.k_latent, val.x1, val.x2)
                                                    : val.elems;
    h.equivariance_residual = residual(current, bank, val, elems);
    result.history.push_back(h);
    if (h.val_loss < best_val) {
      best_val = h.val_loss;
      result.best_epoch = epoch;
      result.model = current;
    }
  }
  return result;
}

}  // namespace

TrainResult train_supervised(const DatasetBundle& data, const TrainConfig& cfg) {
  if (cfg.variant != Variant::Shift && cfg.variant != Variant::Disentangled) {
    throw ValidationError("train_supervised needs the shift or disentangled variant");
  }
  return run_training(data, cfg);
}

TrainResult train_weak(const DatasetBundle& data, const TrainConfig& cfg) {
  if (cfg.variant != Variant::Weak) throw ValidationError("train_weak needs the weak variant");
  return run_training(data, cfg);
}

TrainResult train_stacked(const DatasetBundle& data, const TrainConfig& cfg) {
  if (cfg.variant != Variant::Stacked) throw ValidationError("train_stacked needs the stacked variant");
  return run_training(data, cfg);
}

TrainResult train(const DatasetBundle& data, const TrainConfig& cfg) {
  switch (cfg.variant) {
    case Variant::Shift:
    case Variant::Disentangled: return train_supervised(data, cfg);
    case Variant::Weak: return train_weak(data, cfg);
    case Variant::Stacked: return train_stacked(data, cfg);
  }
  throw ValidationError("unknown variant");
}

std::vector<GroupElement> latent_elements(const Model& model, const OperatorBank& bank,
                                          const std::vector<PairSample>& pairs) {
  if (model.config.variant == Variant::Weak) {
    return weak_elements(model.params, bank.order(0), pair_matrix(pairs, false), pair_matrix(pairs, true));
  }
  std::vector<GroupElement> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) out.push_back(p.param);
  return out;
}

ComplexMatrix transformed_reconstructions(const Model& model, const OperatorBank& bank,
                                          const std::vector<PairSample>& pairs,
                                          const std::vector<GroupElement>& elements) {
  if (elements.size() != pairs.size()) throw DimensionError("one element per pair required");
  if (pairs.empty()) return {};
  const Eigen::MatrixXd x1 = pair_matrix(pairs, false);
  if (x1.rows() != model.params.pixel_dim()) throw DimensionError("image size does not match the model");
  ComplexMatrix out(x1.rows(), x1.cols());
  for (Eigen::Index c0 = 0; c0 < x1.cols(); c0 += kEvalChunk) {
    const Eigen::Index m = std::min(kEvalChunk, x1.cols() - c0);
    const ComplexMatrix z = encode(model.params, x1.middleCols(c0, m));
    const ComplexMatrix moved = numkit::apply_chains(
        model.params, chains_for(bank, elements, static_cast<std::size_t>(c0), static_cast<std::size_t>(m)), z);
    out.middleCols(c0, m) = model.params.decoder * moved;
  }
  return out;
}

ImageGrid apply_latent_transform(const Model& model, const OperatorBank& bank, const ImageGrid& x,
                                 const GroupElement& g) {
  if (x.size() != model.params.pixel_dim()) throw DimensionError("image size does not match the model");
  const Eigen::MatrixXd col = x.vector();
  const ComplexMatrix z = encode(model.params, col);
  const ComplexMatrix moved = numkit::apply_chains(model.params, {bank.chain(g)}, z);
  const Eigen::VectorXd out = (model.params.decoder * moved).real().col(0).cwiseMax(0.0).cwiseMin(1.0);
  return ImageGrid::from_vector(x.height(), x.width(), out);
}

ImageGrid apply_latent_transform(const Model& model, const ImageGrid& x, const GroupElement& g) {
  return apply_latent_transform(model, OperatorBank(model.config), x, g);
}

// ---------------------------------------------------------------- checkpoints

std::vector<std::uint8_t> encode_checkpoint(const Model& model) {
  const auto& p = model.params;
  io::ByteWriter out;
  out.tag("EQCK");
  out.u16(kCheckpointVersion);
  out.u8(static_cast<std::uint8_t>(p.variant));
  out.u32(static_cast<std::uint32_t>(p.latent_dim()));
  out.u32(static_cast<std::uint32_t>(p.pixel_dim()));
  out.u32(static_cast<std::uint32_t>(p.intermediates.size()));
  out.str(model.config.to_json().dump());
  for (const auto* t : p.tensors()) {
    for (Eigen::Index r = 0; r < t->rows(); ++r) {
      for (Eigen::Index c = 0; c < t->cols(); ++c) {
        out.f64((*t)(r, c).real());
        out.f64((*t)(r, c).imag());
      }
    }
  }
  return out.data();
}

Model decode_checkpoint(const std::vector<std::uint8_t>& bytes) {
  io::ByteReader in(bytes);
  in.expect_tag("EQCK", "checkpoint");
  const std::size_t version_at = in.offset();
  if (in.u16() != kCheckpointVersion) throw ParseError("unsupported EQCK version", version_at);
  const std::size_t variant_at = in.offset();
  const auto variant = in.u8();
  if (variant > 3) throw ParseError("unknown model variant", variant_at);
  const std::size_t dims_at = in.offset();
  const auto N = static_cast<Eigen::Index>(in.u32());
  const auto P = static_cast<Eigen::Index>(in.u32());
  const auto n_inter = in.u32();
  const std::size_t config_at = in.offset();
  Model m;
  try {
    m.config = TrainConfig::from_json(json::parse(in.str()));
  } catch (const json::exception& e) {
    throw ParseError(std::string("checkpoint config is not valid JSON: ") + e.what(), config_at);
  } catch (const ValidationError& e) {
    throw ParseError(std::string("checkpoint config is invalid: ") + e.what(), config_at);
  }
  if (static_cast<std::uint8_t>(m.config.variant) != variant || m.config.latent_dim != N ||
      static_cast<int>(n_inter) != m.config.stages() - 1 || P < 1) {
    throw ParseError("checkpoint dimensions disagree with its config", dims_at);
  }
  const std::size_t need = static_cast<std::size_t>(2 * N * P + n_inter * N * N) * 16;
  if (in.remaining() != need) throw ParseError("checkpoint payload size mismatch", in.offset());
  m.params.variant = static_cast<Variant>(variant);
  m.params.encoder.resize(N, P);
  m.params.decoder.resize(P, N);
  m.params.intermediates.assign(n_inter, ComplexMatrix(N, N));
  for (auto* t : m.params.tensors()) {
    for (Eigen::Index r = 0; r < t->rows(); ++r) {
      for (Eigen::Index c = 0; c < t->cols(); ++c) {
        const double re = in.f64();
        const double im = in.f64();
        (*t)(r, c) = {re, im};
      }
    }
  }
  return m;
}

void write_checkpoint(const Model& model, const std::filesystem::path& path) {
  io::write_atomic(path, encode_checkpoint(model));
}

Model read_checkpoint(const std::filesystem::path& path) { return decode_checkpoint(io::read_file(path)); }

json checkpoint_sidecar(const TrainResult& result) {
  double m_norm = 0.0, v_norm = 0.0;
  for (const auto& m : result.optimizer.m) m_norm += m.squaredNorm();
  for (const auto& v : result.optimizer.v) v_norm += v.squaredNorm();
  json history = json::array();
  for (const auto& h : result.history) history.push_back(h.to_json());
  return json{{"format", "EQCK"},
              {"version", kCheckpointVersion},
              {"config", result.model.config.to_json()},
              {"config_hash", io::hex64(result.model.config.hash())},
              {"best_epoch", result.best_epoch},
              {"epochs_run", static_cast<int>(result.history.size())},
              {"optimizer",
               {{"name", "adam"},
                {"step", result.optimizer.step},
                {"beta1", result.optimizer.beta1},
                {"beta2", result.optimizer.beta2},
                {"eps", result.optimizer.eps},
                {"lr", result.optimizer.lr},
                {"first_moment_norm", std::sqrt(m_norm)},
                {"second_moment_norm", std::sqrt(v_norm)}}}};
}

}  // namespace eqop
