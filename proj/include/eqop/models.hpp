#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "eqop/adam.hpp"
#include "eqop/chain.hpp"
#include "eqop/dataset.hpp"
#include "eqop/group.hpp"
#include "eqop/image.hpp"
#include "eqop/operators.hpp"
#include "eqop/params.hpp"

namespace eqop {

/// Latent operator family: permutation shift, complex-diagonal shift, or the
/// 2x2 rotation-block baseline.
enum class OperatorKind : std::uint8_t { Permutation = 0, Complex = 1, Disentangled = 2 };

std::string to_string(OperatorKind k);
OperatorKind operator_kind_from_string(const std::string& name);

struct WeakConfig {
  int k_latent = 10;         // size of the latent operator family
  double temperature = 0.1;  // soft-max temperature on the scores
};

struct TrainConfig {
  Variant variant = Variant::Shift;
  OperatorKind op = OperatorKind::Permutation;
  GroupKind group_kind = GroupKind::Cyclic;
  std::vector<int> orders{10};
  GroupSpec::ActionTable action;  // semi-direct only, empty otherwise
  int latent_dim = 800;
  double lr = 1e-3;
  int batch = 16;
  int epochs = 20;
  std::uint64_t seed = 0;
  WeakConfig weak;

  /// Throws ValidationError on an inconsistent configuration.
  void validate() const;
  /// Number of operators applied in sequence (1 unless stacked).
  int stages() const;

  nlohmann::json to_json() const;
  static TrainConfig from_json(const nlohmann::json& j);
  /// FNV-1a of the canonical JSON dump.
  std::uint64_t hash() const;
};

/// Fixed operators for every stage and index, built once per model.
class OperatorBank {
 public:
  explicit OperatorBank(const TrainConfig& cfg);

  int stages() const { return static_cast<int>(ops_.size()); }
  int order(int stage) const { return static_cast<int>(ops_.at(stage).size()); }
  const LatentOperator& at(int stage, int k) const { return ops_.at(stage).at(k); }
  /// Operators for the transformation g, one index per stage.
  numkit::OperatorChain chain(const GroupElement& g) const;

 private:
  std::vector<std::vector<LatentOperator>> ops_;
};

struct Model {
  TrainConfig config;
  ModelParams params;
};

struct HistoryEntry {
  int epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
  double equivariance_residual = 0.0;

  nlohmann::json to_json() const;
};

struct TrainResult {
  Model model;  // parameters with the lowest validation loss
  std::vector<HistoryEntry> history;
  int best_epoch = 0;
  numkit::AdamState optimizer;  // state after the last epoch
};

/// Random complex weights, re and im ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in)).
ModelParams init_params(const TrainConfig& cfg, int pixel_dim);

/// Throws ValidationError naming the mismatch when cfg cannot train on data.
void check_compatible(const TrainConfig& cfg, const DatasetBundle& data);

TrainResult train_supervised(const DatasetBundle& data, const TrainConfig& cfg);
TrainResult train_weak(const DatasetBundle& data, const TrainConfig& cfg);
TrainResult train_stacked(const DatasetBundle& data, const TrainConfig& cfg);
/// Dispatches on cfg.variant.
TrainResult train(const DatasetBundle& data, const TrainConfig& cfg);

/// Per-block inverse DFT of the normalized cross-power spectrum, averaged
/// over the N latents: score(kappa) for kappa = 0 .. K_L - 1.
Eigen::VectorXd infer_shift_scores(const Eigen::VectorXcd& z1, const Eigen::VectorXcd& z2, int k_latent);

/// Paired reconstruction loss of one batch (one pair per column of x1, x2) with the given
/// operator chains; fills grads when non-null.
double supervised_objective(const ModelParams& params, const Eigen::MatrixXd& x1, const Eigen::MatrixXd& x2,
                            std::vector<numkit::OperatorChain> chains, numkit::Gradients* grads);

/// Soft-max of the shift scores / tau for each column pair (K_L x batch).
Eigen::MatrixXd weak_weights(const numkit::ComplexMatrix& z1, const numkit::ComplexMatrix& z2, int k_latent,
                             double tau);

/// Plain reconstruction error plus the alpha-weighted errors of every latent
/// transformation. alpha is a constant: no gradient flows through the scores.
double weak_objective(const ModelParams& params, const OperatorBank& bank, const Eigen::MatrixXd& x1,
                      const Eigen::MatrixXd& x2, const Eigen::MatrixXd& alpha, numkit::Gradients* grads);

/// The training objective of model's variant on one batch. `elements` holds
/// the pair labels (ignored by the weak variant).
double batch_objective(const Model& model, const OperatorBank& bank, const Eigen::MatrixXd& x1,
                       const Eigen::MatrixXd& x2, const std::vector<GroupElement>& elements,
                       numkit::Gradients* grads);

/// Pixel matrix (one image per column) of a set of images.
Eigen::MatrixXd pixel_matrix(const std::vector<ImageGrid>& images);
/// x1 and x2 columns of a pair list.
Eigen::MatrixXd pair_matrix(const std::vector<PairSample>& pairs, bool second);

numkit::ComplexMatrix encode(const ModelParams& params, const Eigen::MatrixXd& x);

/// The transformation used for each pair: the label for supervised variants,
/// the argmax-score index for the weak variant.
std::vector<GroupElement> latent_elements(const Model& model, const OperatorBank& bank,
                                          const std::vector<PairSample>& pairs);

/// decode(chain(g) encode(x)), real part clamped to [0, 1].
ImageGrid apply_latent_transform(const Model& model, const ImageGrid& x, const GroupElement& g);
ImageGrid apply_latent_transform(const Model& model, const OperatorBank& bank, const ImageGrid& x,
                                 const GroupElement& g);

/// Transformed reconstructions decode(chain(g_i) encode(x1_i)) without clamping.
numkit::ComplexMatrix transformed_reconstructions(const Model& model, const OperatorBank& bank,
                                                  const std::vector<PairSample>& pairs,
                                                  const std::vector<GroupElement>& elements);

/// EQCK checkpoint: magic, version, variant, dims, config JSON, f64 entries.
std::vector<std::uint8_t> encode_checkpoint(const Model& model);
Model decode_checkpoint(const std::vector<std::uint8_t>& bytes);
void write_checkpoint(const Model& model, const std::filesystem::path& path);
Model read_checkpoint(const std::filesystem::path& path);

/// Optimizer summary and config hash stored next to a checkpoint.
nlohmann::json checkpoint_sidecar(const TrainResult& result);

}  // namespace eqop
