#include "eqop/chain.hpp"

#include "eqop/errors.hpp"

namespace eqop::numkit {

namespace {

std::size_t chain_length(const std::vector<OperatorChain>& chains) {
  if (chains.empty()) return 0;
  const std::size_t n = chains.front().size();
  for (const auto& c : chains) {
    if (c.size() != n) throw DimensionError("all operator chains in a batch must have the same length");
  }
  return n;
}

void check_model(const ModelParams& params, std::size_t stages) {
  const auto N = params.encoder.rows();
  const auto P = params.encoder.cols();
  if (params.decoder.rows() != P || params.decoder.cols() != N) {
    throw DimensionError("decoder must be " + std::to_string(P) + "x" + std::to_string(N));
  }
  if (stages > 1 && params.intermediates.size() < stages - 1) {
    throw DimensionError("chain of " + std::to_string(stages) + " operators needs " + std::to_string(stages - 1) +
                         " intermediate layers, model has " + std::to_string(params.intermediates.size()));
  }
  for (const auto& m : params.intermediates) {
    if (m.rows() != N || m.cols() != N) throw DimensionError("intermediate layers must be latent x latent");
  }
}

void apply_stage(const std::vector<OperatorChain>& chains, std::size_t s, ComplexMatrix& u, bool adjoint) {
  for (Eigen::Index b = 0; b < u.cols(); ++b) {
    const LatentOperator* op = chains[b][s];
    if (op->dim() != u.rows()) throw DimensionError("operator dimension does not match the latent dimension");
    if (adjoint) {
      op->apply_adjoint_inplace(u.col(b));
    } else {
      op->apply_inplace(u.col(b));
    }
  }
}

}  // namespace

ComplexMatrix apply_chains(const ModelParams& params, const std::vector<OperatorChain>& chains,
                           const ComplexMatrix& latent, std::vector<ComplexMatrix>* stages) {
  if (static_cast<Eigen::Index>(chains.size()) != latent.cols()) {
    throw DimensionError("one operator chain per batch column required");
  }
  const std::size_t n = chain_length(chains);
  check_model(params, n);
  if (stages) stages->clear();
  ComplexMatrix u = latent;
  for (std::size_t s = 0; s < n; ++s) {
    if (s > 0) u = params.intermediates[s - 1] * u;
    apply_stage(chains, s, u, false);
    if (stages) stages->push_back(u);
  }
  return u;
}

Tape forward_chain(const Eigen::MatrixXd& input, const ModelParams& params, std::vector<OperatorChain> chains) {
  if (input.rows() != params.pixel_dim()) {
    throw DimensionError("input has " + std::to_string(input.rows()) + " pixels, encoder expects " +
                         std::to_string(params.pixel_dim()));
  }
  Tape t;
  t.input = input;
  t.latent = mul_real(params.encoder, input);
  const ComplexMatrix out = apply_chains(params, chains, t.latent, &t.stage_out);
  const auto B = input.cols();
  ComplexMatrix both(t.latent.rows(), 2 * B);
  both << t.latent, out;
  const ComplexMatrix recon = params.decoder * both;
  t.recon_plain = recon.leftCols(B);
  t.recon_transformed = recon.rightCols(B);
  t.chains = std::move(chains);
  return t;
}

Gradients zero_gradients(const ModelParams& params) {
  Gradients g;
  g.encoder = ComplexMatrix::Zero(params.encoder.rows(), params.encoder.cols());
  g.decoder = ComplexMatrix::Zero(params.decoder.rows(), params.decoder.cols());
  for (const auto& m : params.intermediates) g.intermediates.push_back(ComplexMatrix::Zero(m.rows(), m.cols()));
  return g;
}

std::vector<const ComplexMatrix*> Gradients::tensors() const {
  std::vector<const ComplexMatrix*> out{&encoder, &decoder};
  for (const auto& m : intermediates) out.push_back(&m);
  return out;
}

ComplexMatrix backward_chains(const ModelParams& params, const std::vector<OperatorChain>& chains,
                              const std::vector<ComplexMatrix>& stages, ComplexMatrix grad_out, Gradients& grads) {
  const std::size_t n = chain_length(chains);
  if (stages.size() != n) throw DimensionError("stage record does not match the chain length");
  for (std::size_t s = n; s-- > 0;) {
    apply_stage(chains, s, grad_out, true);
    if (s > 0) {
      grads.intermediates[s - 1].noalias() += grad_out * stages[s - 1].adjoint();
      grad_out = params.intermediates[s - 1].adjoint() * grad_out;
    }
  }
  return grad_out;
}

Gradients backward(const Tape& tape, const ModelParams& params, const ComplexMatrix& grad_plain,
                   const ComplexMatrix& grad_transformed) {
  const auto P = params.pixel_dim();
  const auto B = tape.input.cols();
  if (grad_plain.rows() != P || grad_plain.cols() != B || grad_transformed.rows() != P ||
      grad_transformed.cols() != B) {
    throw DimensionError("loss gradient shape does not match the tape");
  }
  Gradients g = zero_gradients(params);
  const ComplexMatrix& out = tape.stage_out.empty() ? tape.latent : tape.stage_out.back();
  ComplexMatrix grad(P, 2 * B), latents(tape.latent.rows(), 2 * B);
  grad << grad_plain, grad_transformed;
  latents << tape.latent, out;
  g.decoder.noalias() = grad * latents.adjoint();
  const ComplexMatrix g_recon = params.decoder.adjoint() * grad;

  ComplexMatrix g_latent = backward_chains(params, tape.chains, tape.stage_out, g_recon.rightCols(B), g);
  g_latent += g_recon.leftCols(B);
  g.encoder = mul_real_transpose(g_latent, tape.input);
  return g;
}

PairLoss l2_pair_loss(const ComplexMatrix& recon_plain, const ComplexMatrix& recon_transformed,
                      const Eigen::MatrixXd& target_plain, const Eigen::MatrixXd& target_transformed) {
  if (recon_plain.rows() != target_plain.rows() || recon_plain.cols() != target_plain.cols() ||
      recon_transformed.rows() != target_transformed.rows() ||
      recon_transformed.cols() != target_transformed.cols() || recon_plain.cols() != recon_transformed.cols()) {
    throw DimensionError("reconstruction and target shapes differ");
  }
  PairLoss out;
  const double scale = 1.0 / (static_cast<double>(recon_plain.rows()) * static_cast<double>(recon_plain.cols()));
  out.grad_plain = recon_plain - target_plain.cast<Complex>();
  out.grad_transformed = recon_transformed - target_transformed.cast<Complex>();
  out.value = (out.grad_plain.squaredNorm() + out.grad_transformed.squaredNorm()) * scale;
  out.grad_plain *= 2.0 * scale;
  out.grad_transformed *= 2.0 * scale;
  return out;
}

Eigen::VectorXd squared_error(const ComplexMatrix& recon, const Eigen::MatrixXd& target) {
  if (recon.rows() != target.rows() || recon.cols() != target.cols()) {
    throw DimensionError("reconstruction and target shapes differ");
  }
  return (recon - target.cast<Complex>()).colwise().squaredNorm().transpose();
}

}  // namespace eqop::numkit
