#include "mjls/lmi.hpp"

#include <algorithm>

namespace mjls {

LmiVariableLayout::LmiVariableLayout(ExtendedDims dims, int state_dim, int input_dim)
    : dims_(dims), state_dim_(state_dim), input_dim_(input_dim) {
  if (state_dim_ < 1 || input_dim_ < 1) {
    throw DimensionMismatchError("layout needs positive state and input dimensions");
  }
  r_block_ = state_dim_ * (state_dim_ + 1) / 2;
  const int pairs = dims_.num_modes * dims_.clock_modulus;
  g_base_ = dims_.size() * r_block_;
  f_base_ = g_base_ + pairs * state_dim_ * state_dim_;
  total_ = f_base_ + pairs * input_dim_ * state_dim_;
}

int LmiVariableLayout::r_offset(int chi_flat) const { return (chi_flat - 1) * r_block_; }

int LmiVariableLayout::g_offset(int gamma, int delta) const {
  const int pair = (gamma - 1) * dims_.clock_modulus + (delta - 1);
  return g_base_ + pair * state_dim_ * state_dim_;
}

int LmiVariableLayout::f_offset(int gamma, int delta) const {
  const int pair = (gamma - 1) * dims_.clock_modulus + (delta - 1);
  return f_base_ + pair * input_dim_ * state_dim_;
}

int LmiVariableLayout::r_entry(int chi_flat, int i, int j) const {
  // Row-major upper triangle: row i starts after n + (n-1) + ... + (n-i+1) entries.
  const int row_start = i * state_dim_ - i * (i - 1) / 2;
  return r_offset(chi_flat) + row_start + (j - i);
}

Eigen::MatrixXd LmiVariableLayout::r_matrix(const Eigen::VectorXd& v, int chi_flat) const {
  Eigen::MatrixXd r(state_dim_, state_dim_);
  for (int i = 0; i < state_dim_; ++i) {
    for (int j = i; j < state_dim_; ++j) {
      r(i, j) = r(j, i) = v[r_entry(chi_flat, i, j)];
    }
  }
  return r;
}

Eigen::MatrixXd LmiVariableLayout::g_matrix(const Eigen::VectorXd& v, int gamma, int delta) const {
  Eigen::MatrixXd g(state_dim_, state_dim_);
  int k = g_offset(gamma, delta);
  for (int i = 0; i < state_dim_; ++i) {
    for (int j = 0; j < state_dim_; ++j) g(i, j) = v[k++];
  }
  return g;
}

Eigen::MatrixXd LmiVariableLayout::f_matrix(const Eigen::VectorXd& v, int gamma, int delta) const {
  Eigen::MatrixXd f(input_dim_, state_dim_);
  int k = f_offset(gamma, delta);
  for (int i = 0; i < input_dim_; ++i) {
    for (int j = 0; j < state_dim_; ++j) f(i, j) = v[k++];
  }
  return f;
}

Eigen::MatrixXd evaluate_block(const LmiBlock& block, const Eigen::VectorXd& v) {
  if (block.terms.empty()) return Eigen::MatrixXd();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(block.terms.front().coeff.rows(),
                                              block.terms.front().coeff.cols());
  for (const auto& term : block.terms) out += v[term.var] * term.coeff;
  return out;
}

Eigen::MatrixXd d_operator(const ExtendedChain& chain, const std::vector<Eigen::MatrixXd>& R,
                           const ExtendedState& chi) {
  if (static_cast<int>(R.size()) != chain.size()) {
    throw DimensionMismatchError("R must assign a matrix to every extended state");
  }
  const int row = flat_index(chi, chain.dims()) - 1;
  const Eigen::MatrixXd& p = chain.pbar().entries();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(R.front().rows(), R.front().cols());
  for (int col = 0; col < chain.size(); ++col) {
    const double w = p(row, col);
    if (w != 0.0) out += w * R[static_cast<std::size_t>(col)];
  }
  return out;
}

namespace {

// Basis matrix of the upper-triangle parameterization of a symmetric matrix:
// e_i e_j^T + e_j e_i^T off the diagonal, e_i e_i^T on it.
Eigen::MatrixXd sym_unit(int n, int i, int j) {
  Eigen::MatrixXd e = Eigen::MatrixXd::Zero(n, n);
  e(i, j) += 1.0;
  e(j, i) += (i == j) ? 0.0 : 1.0;
  return e;
}

// Derivative of G + G^T with respect to the full-matrix entry g_ij; the
// diagonal carries a factor 2, unlike the triangle parameterization above.
Eigen::MatrixXd sym_deriv(int n, int i, int j) {
  Eigen::MatrixXd e = Eigen::MatrixXd::Zero(n, n);
  e(i, j) += 1.0;
  e(j, i) += 1.0;
  return e;
}

}  // namespace

LmiProblem assemble(const MjlsModel& model, const ExtendedChain& chain,
                    const std::vector<int>* prune) {
  const ExtendedDims& dims = chain.dims();
  if (dims.num_modes != model.num_modes()) {
    throw DimensionMismatchError("chain and model disagree on the number of modes");
  }
  const int n = model.state_dim();
  const int m = model.input_dim();
  const int bd = 2 * n;
  LmiVariableLayout layout(dims, n, m);

  std::vector<int> retained;
  if (prune != nullptr) {
    retained = *prune;
    std::sort(retained.begin(), retained.end());
    retained.erase(std::unique(retained.begin(), retained.end()), retained.end());
    if (!retained.empty() && (retained.front() < 1 || retained.back() > chain.size())) {
      throw std::out_of_range("prune set contains a flat index outside the extended space");
    }
  } else {
    retained.resize(static_cast<std::size_t>(chain.size()));
    for (int i = 0; i < chain.size(); ++i) retained[static_cast<std::size_t>(i)] = i + 1;
  }

  const Eigen::MatrixXd& p = chain.pbar().entries();
  std::vector<LmiBlock> blocks;
  blocks.reserve(retained.size());

  for (int flat : retained) {
    const ExtendedState chi = chain.states()[static_cast<std::size_t>(flat - 1)];
    const Eigen::MatrixXd& a = model.A(chi.alpha);
    const Eigen::MatrixXd& b = model.B(chi.alpha);

    LmiBlock block;
    block.chi_flat = flat;

    // Own R_chi in the (1,1) corner, plus its -pbar(chi,chi) share of D in (2,2).
    const double self_weight = p(flat - 1, flat - 1);
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        Eigen::MatrixXd coeff = Eigen::MatrixXd::Zero(bd, bd);
        coeff.topLeftCorner(n, n) = sym_unit(n, i, j);
        if (self_weight != 0.0) {
          coeff.bottomRightCorner(n, n) = -self_weight * sym_unit(n, i, j);
        }
        block.terms.push_back({layout.r_entry(flat, i, j), std::move(coeff)});
      }
    }

    // G_{gamma,delta}: A*G in (1,2) (mirrored) and G + G^T in (2,2).
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        Eigen::MatrixXd coeff = Eigen::MatrixXd::Zero(bd, bd);
        Eigen::MatrixXd top = Eigen::MatrixXd::Zero(n, n);
        top.col(j) = a.col(i);
        coeff.topRightCorner(n, n) = top;
        coeff.bottomLeftCorner(n, n) = top.transpose();
        coeff.bottomRightCorner(n, n) = sym_deriv(n, i, j);
        block.terms.push_back({layout.g_offset(chi.gamma, chi.delta) + i * n + j,
                               std::move(coeff)});
      }
    }

    // F_{gamma,delta}: B*F in (1,2) (mirrored).
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < n; ++j) {
        Eigen::MatrixXd coeff = Eigen::MatrixXd::Zero(bd, bd);
        Eigen::MatrixXd top = Eigen::MatrixXd::Zero(n, n);
        top.col(j) = b.col(i);
        coeff.topRightCorner(n, n) = top;
        coeff.bottomLeftCorner(n, n) = top.transpose();
        block.terms.push_back({layout.f_offset(chi.gamma, chi.delta) + i * n + j,
                               std::move(coeff)});
      }
    }

    // Successor R's enter (2,2) through -D_chi(R), the next-step expectation.
    for (int col = 0; col < chain.size(); ++col) {
      const double w = p(flat - 1, col);
      if (w == 0.0 || col == flat - 1) continue;  // self handled above
      for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
          Eigen::MatrixXd coeff = Eigen::MatrixXd::Zero(bd, bd);
          coeff.bottomRightCorner(n, n) = -w * sym_unit(n, i, j);
          block.terms.push_back({layout.r_entry(col + 1, i, j), std::move(coeff)});
        }
      }
    }

    blocks.push_back(std::move(block));
  }

  return LmiProblem(std::move(layout), std::move(blocks), bd);
}

}  // namespace mjls
