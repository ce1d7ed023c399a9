#include "eqop/eval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "eqop/binary_io.hpp"
#include "eqop/characters.hpp"
#include "eqop/errors.hpp"
#include "eqop/orbit.hpp"

namespace eqop {

using numkit::Complex;
using numkit::ComplexMatrix;
using json = nlohmann::json;

namespace {

constexpr Eigen::Index kChunk = 64;

void require_pairs(const std::vector<PairSample>& pairs, const Model& model, const char* what) {
  if (pairs.empty()) throw ValidationError(std::string(what) + ": no pairs to evaluate");
  if (pairs.front().x1.size() != model.params.pixel_dim()) {
    throw DimensionError(std::string(what) + ": images have " + std::to_string(pairs.front().x1.size()) +
                         " pixels, model expects " + std::to_string(model.params.pixel_dim()));
  }
}

ComplexMatrix orbit_codes(const Model& model, const ImageGrid& x, const TransformSpec& transforms) {
  std::vector<ImageGrid> imgs;
  for (const auto& g : transforms.group().elements()) imgs.push_back(transforms.apply(x, g));
  return encode(model.params, pixel_matrix(imgs));
}

int argmax(const Eigen::VectorXd& v) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return static_cast<int>(best);
}

}  // namespace

double test_mse(const Model& model, const std::vector<PairSample>& pairs) {
  require_pairs(pairs, model, "test_mse");
  const OperatorBank bank(model.config);
  const ComplexMatrix recon = transformed_reconstructions(model, bank, pairs, latent_elements(model, bank, pairs));
  const Eigen::VectorXd err = numkit::squared_error(recon, pair_matrix(pairs, true));
  return err.sum() / (static_cast<double>(recon.rows()) * static_cast<double>(recon.cols()));
}

double equivariance_residual(const Model& model, const std::vector<PairSample>& pairs) {
  require_pairs(pairs, model, "equivariance_residual");
  const OperatorBank bank(model.config);
  const auto elems = latent_elements(model, bank, pairs);
  const Eigen::MatrixXd x1 = pair_matrix(pairs, false), x2 = pair_matrix(pairs, true);
  double num = 0.0, den = 0.0;
  for (Eigen::Index c0 = 0; c0 < x1.cols(); c0 += kChunk) {
    const Eigen::Index m = std::min(kChunk, x1.cols() - c0);
    const ComplexMatrix z1 = encode(model.params, x1.middleCols(c0, m));
    const ComplexMatrix z2 = encode(model.params, x2.middleCols(c0, m));
    std::vector<numkit::OperatorChain> chains;
    for (Eigen::Index i = 0; i < m; ++i) chains.push_back(bank.chain(elems[static_cast<std::size_t>(c0 + i)]));
    num += (z2 - numkit::apply_chains(model.params, chains, z1)).squaredNorm();
    den += z2.squaredNorm();
  }
  return den > 0.0 ? num / den : 0.0;
}

Eigen::VectorXd latent_variance_profile(const Model& model, const std::vector<ImageGrid>& images,
                                        const TransformSpec& transforms) {
  Eigen::VectorXd total = Eigen::VectorXd::Zero(model.params.latent_dim());
  if (images.empty()) return total;
  for (const auto& x : images) {
    const ComplexMatrix z = orbit_codes(model, x, transforms);
    const Eigen::VectorXcd mean = z.rowwise().mean();
    total += (z.colwise() - mean).cwiseAbs2().rowwise().mean();
  }
  return total / static_cast<double>(images.size());
}

Eigen::VectorXd latent_pca_spectrum(const std::vector<ComplexMatrix>& orbits) {
  Eigen::Index len = 0;
  for (const auto& z : orbits) len = std::max(len, z.cols());
  Eigen::VectorXd total = Eigen::VectorXd::Zero(len);
  if (orbits.empty()) return total;
  for (const auto& z : orbits) {
    if (z.cols() == 0) continue;
    const ComplexMatrix centered = z.colwise() - z.rowwise().mean();
    // The orbit is small: the Gram matrix shares the covariance's nonzero spectrum.
    const ComplexMatrix gram = centered.adjoint() * centered / static_cast<double>(z.cols());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(gram, Eigen::EigenvaluesOnly);
    Eigen::VectorXd ev = eig.eigenvalues().reverse().cwiseMax(0.0);
    const double sum = ev.sum();
    if (sum <= 0.0) continue;
    total.head(ev.size()) += ev / sum;
  }
  return total / static_cast<double>(orbits.size());
}

Eigen::VectorXd latent_pca_spectrum(const Model& model, const std::vector<ImageGrid>& images,
                                    const TransformSpec& transforms) {
  std::vector<ComplexMatrix> orbits;
  orbits.reserve(images.size());
  for (const auto& x : images) orbits.push_back(orbit_codes(model, x, transforms));
  if (orbits.empty()) return Eigen::VectorXd::Zero(transforms.group().order());
  return latent_pca_spectrum(orbits);
}

WeakAgreement weak_agreement(const Model& model, const std::vector<PairSample>& pairs) {
  if (model.config.variant != Variant::Weak) throw ValidationError("weak_agreement needs a weak model");
  require_pairs(pairs, model, "weak_agreement");
  const OperatorBank bank(model.config);
  const int KL = bank.order(0);
  const Eigen::MatrixXd x1 = pair_matrix(pairs, false), x2 = pair_matrix(pairs, true);

  std::size_t agree = 0;
  std::map<int, std::vector<int>> counts;  // ground truth -> histogram of inferred indices
  for (Eigen::Index c0 = 0; c0 < x1.cols(); c0 += kChunk) {
    const Eigen::Index m = std::min(kChunk, x1.cols() - c0);
    const ComplexMatrix z1 = encode(model.params, x1.middleCols(c0, m));
    const ComplexMatrix z2 = encode(model.params, x2.middleCols(c0, m));
    ComplexMatrix codes(z1.rows(), m * KL);
    for (int k = 0; k < KL; ++k) {
      auto block = codes.middleCols(m * k, m);
      block = z1;
      bank.at(0, k).apply_inplace(block);
    }
    const ComplexMatrix recon = model.params.decoder * codes;
    for (Eigen::Index b = 0; b < m; ++b) {
      const int inferred = argmax(infer_shift_scores(z1.col(b), z2.col(b), KL));
      Eigen::VectorXd err(KL);
      for (int k = 0; k < KL; ++k) {
        err[k] = (recon.col(m * k + b) - x2.col(c0 + b).cast<Complex>()).squaredNorm();
      }
      Eigen::Index best = 0;
      err.minCoeff(&best);
      if (inferred == static_cast<int>(best)) ++agree;
      auto& hist = counts[pairs[static_cast<std::size_t>(c0 + b)].param[0]];
      hist.resize(KL, 0);
      ++hist[inferred];
    }
  }
  WeakAgreement out;
  out.accuracy = static_cast<double>(agree) / static_cast<double>(pairs.size());
  std::set<int> images;
  for (const auto& [k, hist] : counts) {
    const int mode = static_cast<int>(std::max_element(hist.begin(), hist.end()) - hist.begin());
    if (k >= static_cast<int>(out.mapping.size())) out.mapping.resize(k + 1, -1);
    out.mapping[k] = mode;
    images.insert(mode);
  }
  out.bijective = images.size() == counts.size() && static_cast<int>(counts.size()) == KL &&
                  static_cast<int>(out.mapping.size()) == KL;
  return out;
}

json CheckResult::to_json() const {
  return json{{"name", name}, {"pass", pass}, {"max_deviation", max_deviation}, {"tolerance", tolerance}};
}

std::vector<CheckResult> operator_character_checks(const TrainConfig& cfg) {
  const OperatorBank bank(cfg);
  std::vector<CheckResult> out;
  for (int s = 0; s < bank.stages(); ++s) {
    const int K = bank.order(s);
    const GroupSpec spec = GroupSpec::cyclic(K);
    const OperatorBuilder builder = [&](const GroupElement& g, int) { return bank.at(s, g[0]); };
    const auto report =
        verify_isomorphic(character_table(builder, spec, cfg.latent_dim), regular_character(spec, cfg.latent_dim), 1e-9);
    CheckResult c;
    c.name = to_string(cfg.op) + " operator stage " + std::to_string(s) + " (K=" + std::to_string(K) +
             ") character vs regular";
    c.pass = report.isomorphic;
    c.max_deviation = report.max_deviation;
    c.tolerance = 1e-9;
    out.push_back(c);
  }
  return out;
}

json EvalReport::to_json() const {
  json checks = json::array();
  for (const auto& c : character_checks) checks.push_back(c.to_json());
  return json{{"test_mse", test_mse},
              {"equivariance_residual", equivariance_residual},
              {"weak_inference_accuracy", weak_inference_accuracy ? json(*weak_inference_accuracy) : json(nullptr)},
              {"weak_bijective", weak_bijective ? json(*weak_bijective) : json(nullptr)},
              {"character_checks", checks},
              {"condition_number_encoder", condition_number_encoder},
              {"provenance", {{"config_hash", config_hash}, {"seed", seed}, {"dataset_hash", dataset_hash}}}};
}

EvalReport evaluate(const Model& model, const DatasetBundle& data, const std::string& dataset_hash) {
  if (data.test.empty()) throw ValidationError("dataset has no test pairs");
  if (data.transforms.orders() != model.config.orders) {
    throw ValidationError("checkpoint was trained for a different transformation group than the dataset");
  }
  EvalReport r;
  r.test_mse = test_mse(model, data.test);
  r.equivariance_residual = equivariance_residual(model, data.test);
  if (model.config.variant == Variant::Weak) {
    const auto w = weak_agreement(model, data.test);
    r.weak_inference_accuracy = w.accuracy;
    r.weak_bijective = w.bijective;
  }
  r.character_checks = operator_character_checks(model.config);
  r.condition_number_encoder = numkit::condition_number(model.params.encoder);
  r.config_hash = io::hex64(model.config.hash());
  r.seed = model.config.seed;
  r.dataset_hash = dataset_hash;
  return r;
}

std::vector<std::uint8_t> encode_grid(const std::vector<ImageGrid>& images, int rows, int cols) {
  if (images.empty()) throw ValidationError("export_grid: no images");
  if (rows < 1 || cols < 1 || static_cast<std::size_t>(rows) * cols < images.size()) {
    throw ValidationError("export_grid: layout " + std::to_string(rows) + "x" + std::to_string(cols) +
                          " cannot hold " + std::to_string(images.size()) + " images");
  }
  constexpr int kSep = 2;
  constexpr std::uint8_t kSepValue = 128;
  const int H = images.front().height(), W = images.front().width();
  for (const auto& img : images) {
    if (img.height() != H || img.width() != W) throw DimensionError("export_grid: images differ in shape");
  }
  const int total_w = cols * W + (cols - 1) * kSep;
  const int total_h = rows * H + (rows - 1) * kSep;
  std::vector<std::uint8_t> px(static_cast<std::size_t>(total_w) * total_h, kSepValue);
  for (std::size_t i = 0; i < images.size(); ++i) {
    const int r0 = static_cast<int>(i) / cols * (H + kSep);
    const int c0 = static_cast<int>(i) % cols * (W + kSep);
    for (int r = 0; r < H; ++r) {
      for (int c = 0; c < W; ++c) {
        const double v = std::clamp(images[i](r, c), 0.0, 1.0);
        px[static_cast<std::size_t>(r0 + r) * total_w + c0 + c] = static_cast<std::uint8_t>(std::lround(255.0 * v));
      }
    }
  }
  // Unused tile slots are black.
  for (std::size_t i = images.size(); i < static_cast<std::size_t>(rows) * cols; ++i) {
    const int r0 = static_cast<int>(i) / cols * (H + kSep);
    const int c0 = static_cast<int>(i) % cols * (W + kSep);
    for (int r = 0; r < H; ++r) {
      for (int c = 0; c < W; ++c) px[static_cast<std::size_t>(r0 + r) * total_w + c0 + c] = 0;
    }
  }
  const std::string header = "P5\n" + std::to_string(total_w) + " " + std::to_string(total_h) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), px.begin(), px.end());
  return out;
}

void export_grid(const std::vector<ImageGrid>& images, int rows, int cols, const std::filesystem::path& path) {
  io::write_atomic(path, encode_grid(images, rows, cols));
}

TopologyReport topology_demo() {
  const GroupSpec spec = GroupSpec::cyclic(3);
  const ImageAction shift = [](const ImageGrid& x, const GroupElement& g) { return translate_periodic(x, g[0], 0); };
  const std::vector<std::pair<std::string, ImageGrid>> inputs{
      {"[0,0,0]", ImageGrid(1, 3, {0, 0, 0})},
      {"[1,1,1]", ImageGrid(1, 3, {1, 1, 1})},
      {"[1,0,0]", ImageGrid(1, 3, {1, 0, 0})},
  };
  TopologyReport r;
  std::ostringstream os;
  os << "Cyclic translations of a 3-pixel image (|G| = 3)\n";
  bool divides = true;
  for (const auto& [name, img] : inputs) {
    const auto o = orbit(img, shift, spec, 0.0);
    const int n = static_cast<int>(o.size());
    r.orbit_sizes.push_back(n);
    divides = divides && spec.order() % n == 0;
    os << "  orbit of " << name << ": " << n << " image" << (n == 1 ? "" : "s") << "\n";
  }
  r.pass = r.orbit_sizes == std::vector<int>{1, 1, 3} && divides;
  os << "Orbit sizes differ between images (1 for uniform images, 3 for [1,0,0]).\n"
     << "An encoder mapping every orbit onto a copy of the group with a disentangled\n"
     << "subspace would need equal orbit sizes, so for a finite group such a\n"
     << "continuous disentangled encoder is impossible on the full image space.\n"
     << "result: " << (r.pass ? "PASS" : "FAIL") << "\n";
  r.text = os.str();
  return r;
}

}  // namespace eqop
