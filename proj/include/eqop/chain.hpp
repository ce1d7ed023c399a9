#pragma once

#include <vector>

#include <Eigen/Dense>

#include "eqop/linalg.hpp"
#include "eqop/operators.hpp"
#include "eqop/params.hpp"

namespace eqop::numkit {

/// Operators for one sample, applied as z' = psi_n L_{n-1} ... psi_2 L_1 psi_1 z
/// where L_i are the model's intermediate layers. Empty means z' = z.
using OperatorChain = std::vector<const LatentOperator*>;

/// Intermediates of a batched forward pass, one column per sample.
struct Tape {
  Eigen::MatrixXd input;                 // pixel x batch
  ComplexMatrix latent;                  // encoder * input
  std::vector<ComplexMatrix> stage_out;  // after each operator psi_s
  ComplexMatrix recon_plain;             // decoder * latent
  ComplexMatrix recon_transformed;       // decoder * chain(latent)
  std::vector<OperatorChain> chains;
};

struct Gradients {
  ComplexMatrix encoder;
  ComplexMatrix decoder;
  std::vector<ComplexMatrix> intermediates;

  std::vector<const ComplexMatrix*> tensors() const;
};

/// Applies one chain per column of `latent` and records each stage.
/// All chains in a batch must have the same length.
ComplexMatrix apply_chains(const ModelParams& params, const std::vector<OperatorChain>& chains,
                           const ComplexMatrix& latent, std::vector<ComplexMatrix>* stages = nullptr);

Tape forward_chain(const Eigen::MatrixXd& input, const ModelParams& params, std::vector<OperatorChain> chains);

/// Packed gradients (d/dRe + i d/dIm) of a real loss with respect to every
/// trainable parameter, given the loss gradients at both reconstructions.
/// Fixed operators are back-propagated through with their adjoint.
Gradients backward(const Tape& tape, const ModelParams& params, const ComplexMatrix& grad_plain,
                   const ComplexMatrix& grad_transformed);

/// Back-propagates a latent gradient through the chains into `grads`
/// (intermediates) and returns the gradient at the chain input.
ComplexMatrix backward_chains(const ModelParams& params, const std::vector<OperatorChain>& chains,
                              const std::vector<ComplexMatrix>& stages, ComplexMatrix grad_out, Gradients& grads);

Gradients zero_gradients(const ModelParams& params);

struct PairLoss {
  double value = 0.0;
  ComplexMatrix grad_plain;
  ComplexMatrix grad_transformed;
};

/// Sum over both reconstructions of the per-pixel mean squared error, averaged
/// over the batch columns. The imaginary part of a reconstruction counts as
/// error against the real target.
PairLoss l2_pair_loss(const ComplexMatrix& recon_plain, const ComplexMatrix& recon_transformed,
                      const Eigen::MatrixXd& target_plain, const Eigen::MatrixXd& target_transformed);

/// Per-column squared error sum(|recon - target|^2).
Eigen::VectorXd squared_error(const ComplexMatrix& recon, const Eigen::MatrixXd& target);

}  // namespace eqop::numkit
