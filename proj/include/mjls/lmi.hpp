#pragma once

#include <optional>
#include <vector>

#include "mjls/embedding.hpp"

namespace mjls {

/// Scalar-variable layout of the synthesis LMI: the upper triangle of one
/// symmetric n-by-n R per extended state, then one general n-by-n G and one
/// m-by-n F per (gamma, delta). Symmetry of R is structural: only its upper
/// triangle is a variable.
class LmiVariableLayout {
public:
  LmiVariableLayout(ExtendedDims dims, int state_dim, int input_dim);

  int total() const { return total_; }
  int state_dim() const { return state_dim_; }
  int input_dim() const { return input_dim_; }
  const ExtendedDims& dims() const { return dims_; }

  int r_offset(int chi_flat) const;
  int g_offset(int gamma, int delta) const;
  int f_offset(int gamma, int delta) const;

  /// Index of the scalar carrying R entry (i, j), i <= j zero-based.
  int r_entry(int chi_flat, int i, int j) const;

  Eigen::MatrixXd r_matrix(const Eigen::VectorXd& v, int chi_flat) const;
  Eigen::MatrixXd g_matrix(const Eigen::VectorXd& v, int gamma, int delta) const;
  Eigen::MatrixXd f_matrix(const Eigen::VectorXd& v, int gamma, int delta) const;

private:
  ExtendedDims dims_;
  int state_dim_;
  int input_dim_;
  int r_block_;  // scalars per R
  int g_base_;
  int f_base_;
  int total_;
};

/// One affine term of a block: coefficient matrix of a single scalar variable.
struct BlockTerm {
  int var;
  Eigen::MatrixXd coeff;  // symmetric, 2n x 2n
};

/// Affine-in-variables symmetric constraint Block(v) = sum_k v[terms[k].var] * coeff_k,
/// required positive definite. One per retained extended state.
struct LmiBlock {
  int chi_flat;
  std::vector<BlockTerm> terms;
};

Eigen::MatrixXd evaluate_block(const LmiBlock& block, const Eigen::VectorXd& v);

class LmiProblem {
public:
  LmiProblem(LmiVariableLayout layout, std::vector<LmiBlock> blocks, int block_dim)
      : layout_(std::move(layout)), blocks_(std::move(blocks)), block_dim_(block_dim) {}

  const LmiVariableLayout& layout() const { return layout_; }
  const std::vector<LmiBlock>& blocks() const { return blocks_; }
  int block_dim() const { return block_dim_; }

private:
  LmiVariableLayout layout_;
  std::vector<LmiBlock> blocks_;
  int block_dim_;
};

/// Transition-weighted mixture D_chi(R) = sum_{chi'} pbar(chi, chi') R_{chi'},
/// the conditional expectation of R one step ahead of chi. R is indexed by
/// flat state, R[flat-1].
Eigen::MatrixXd d_operator(const ExtendedChain& chain, const std::vector<Eigen::MatrixXd>& R,
                           const ExtendedState& chi);

/// Builds the block [[R_chi, A G + B F], [(.)^T, G + G^T - D_chi(R)]] for every
/// extended state (or only those in `prune`, one-based flat indices). Pruning
/// drops constraints; the variable layout always spans the full space.
LmiProblem assemble(const MjlsModel& model, const ExtendedChain& chain,
                    const std::vector<int>* prune = nullptr);

}  // namespace mjls
