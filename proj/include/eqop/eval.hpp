#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "eqop/dataset.hpp"
#include "eqop/image.hpp"
#include "eqop/imaging.hpp"
#include "eqop/models.hpp"

namespace eqop {

/// Mean over pairs of |x2 - decode(chain(g) encode(x1))|^2 / pixels, where g
/// is the label (supervised) or the argmax-score index (weak).
double test_mse(const Model& model, const std::vector<PairSample>& pairs);

/// sum |encode(x2) - chain(g) encode(x1)|^2 / sum |encode(x2)|^2 over pairs.
double equivariance_residual(const Model& model, const std::vector<PairSample>& pairs);

/// Variance of each latent over the orbit {g . x}, averaged over images.
Eigen::VectorXd latent_variance_profile(const Model& model, const std::vector<ImageGrid>& images,
                                        const TransformSpec& transforms);

/// Ranked eigenvalues of each orbit's latent covariance normalized by their
/// sum, averaged over images (length |G|). Orbits without variance add zeros.
Eigen::VectorXd latent_pca_spectrum(const Model& model, const std::vector<ImageGrid>& images,
                                    const TransformSpec& transforms);
/// Same on explicit latent orbits (one orbit per matrix, one code per column).
Eigen::VectorXd latent_pca_spectrum(const std::vector<numkit::ComplexMatrix>& orbits);

struct WeakAgreement {
  double accuracy = 0.0;    // inferred index == best-reconstruction index
  bool bijective = false;   // ground truth -> most frequent inferred index is one-to-one
  std::vector<int> mapping; // most frequent inferred index per ground-truth index
};

/// Compares argmax-score inference with the brute-force index minimizing the
/// transformed reconstruction error. Needs a weak model.
WeakAgreement weak_agreement(const Model& model, const std::vector<PairSample>& pairs);

struct CheckResult {
  std::string name;
  bool pass = false;
  double max_deviation = 0.0;
  double tolerance = 0.0;

  nlohmann::json to_json() const;
};

/// Character table of the model's operator family against the regular
/// character (a pass means the family is isomorphic to the regular representation).
std::vector<CheckResult> operator_character_checks(const TrainConfig& cfg);

struct EvalReport {
  double test_mse = 0.0;
  double equivariance_residual = 0.0;
  std::optional<double> weak_inference_accuracy;
  std::optional<bool> weak_bijective;
  std::vector<CheckResult> character_checks;
  double condition_number_encoder = 0.0;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string dataset_hash;

  nlohmann::json to_json() const;
};

EvalReport evaluate(const Model& model, const DatasetBundle& data, const std::string& dataset_hash);

/// rows x cols tiles separated by 2-pixel lines, 8-bit P5 PGM. Pixels are
/// quantized as round(255 * clamp(v, 0, 1)) with halves rounded away from zero.
std::vector<std::uint8_t> encode_grid(const std::vector<ImageGrid>& images, int rows, int cols);
void export_grid(const std::vector<ImageGrid>& images, int rows, int cols, const std::filesystem::path& path);

struct TopologyReport {
  std::vector<int> orbit_sizes;  // [0,0,0], [1,1,1], [1,0,0]
  bool pass = false;
  std::string text;
};

/// Orbits of three 3-pixel images under the cyclic translation group Z_3.
TopologyReport topology_demo();

}  // namespace eqop
