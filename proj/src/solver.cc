// Copyright 2026 The ecoplan Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     https://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ecoplan/solver.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ecoplan {
namespace {

using Block = Eigen::Matrix4d;
using BlockVector = Eigen::Vector4d;

constexpr int kBlockSize = 4;
// Slots of the free variables inside block j: [P_j, v_{j+1}, K_{j+1}, E_{j+1}].
constexpr int kSlotP = 0;
constexpr int kSlotV = 1;
constexpr int kSlotK = 2;
constexpr int kSlotE = 3;

// A step may shrink any slack by at most this factor.
constexpr double kBoundaryFraction = 0.01;
constexpr int kMaxPolishSteps = 10;
// Full phase I stops once the slack is known to this relative accuracy.
constexpr double kPhase1RelativeGap = 1e-3;
// Smallest barrier multiplier used after a centering runs out of steps.
constexpr double kMinMultiplier = 1.2;
// Margin at which phase I hands over without running to optimality.
constexpr double kComfortableSlack = 1e-3;
// Phase I optimality target when the full margin is requested.
constexpr double kPhase1GapTolerance = 1e-9;
// K must stay above this fraction of the kinetic scale.
constexpr double kKineticFloorFraction = 1e-9;

// Symmetric positive definite block-tridiagonal matrix with a block
// Cholesky factorization.
class BlockTridiagonal {
 public:
  explicit BlockTridiagonal(int blocks)
      : diag(blocks), sub(blocks), factor_(blocks), coupling_(blocks) {}

  void SetZero() {
    for (auto& b : diag) b.setZero();
    for (auto& b : sub) b.setZero();
  }

  int blocks() const { return static_cast<int>(diag.size()); }

  // Factors B + shift I. Returns false when a pivot block is not positive
  // definite.
  bool Factor(double shift) {
    for (int j = 0; j < blocks(); ++j) {
      Block d = diag[j];
      d.diagonal().array() += shift;
      if (j > 0) {
        // W_j = sub_j L_{j-1}^{-T}
        const Block x = factor_[j - 1].triangularView<Eigen::Lower>().solve(
            sub[j].transpose());
        coupling_[j] = x.transpose();
        d.noalias() -= coupling_[j] * coupling_[j].transpose();
      }
      Eigen::LLT<Block> llt(d);
      if (llt.info() != Eigen::Success) return false;
      factor_[j] = llt.matrixL();
      const auto pivots = factor_[j].diagonal();
      if (!pivots.allFinite() || pivots.minCoeff() <= 0.0) return false;
    }
    return true;
  }

  void SolveInPlace(Eigen::VectorXd& b) const {
    const int n = blocks();
    for (int j = 0; j < n; ++j) {
      BlockVector r = b.segment<kBlockSize>(kBlockSize * j);
      if (j > 0) {
        r.noalias() -=
            coupling_[j] * b.segment<kBlockSize>(kBlockSize * (j - 1));
      }
      b.segment<kBlockSize>(kBlockSize * j) =
          factor_[j].triangularView<Eigen::Lower>().solve(r);
    }
    for (int j = n - 1; j >= 0; --j) {
      BlockVector r = b.segment<kBlockSize>(kBlockSize * j);
      if (j + 1 < n) {
        r.noalias() -= coupling_[j + 1].transpose() *
                       b.segment<kBlockSize>(kBlockSize * (j + 1));
      }
      b.segment<kBlockSize>(kBlockSize * j) =
          factor_[j].transpose().triangularView<Eigen::Upper>().solve(r);
    }
  }

  // B x with the stored (unshifted) blocks.
  Eigen::VectorXd Multiply(const Eigen::VectorXd& x) const {
    const int n = blocks();
    Eigen::VectorXd y(x.size());
    for (int j = 0; j < n; ++j) {
      BlockVector r = diag[j] * x.segment<kBlockSize>(kBlockSize * j);
      if (j > 0) {
        r.noalias() += sub[j] * x.segment<kBlockSize>(kBlockSize * (j - 1));
      }
      if (j + 1 < n) {
        r.noalias() +=
            sub[j + 1].transpose() *
            x.segment<kBlockSize>(kBlockSize * (j + 1));
      }
      y.segment<kBlockSize>(kBlockSize * j) = r;
    }
    return y;
  }

  std::vector<Block> diag;
  std::vector<Block> sub;  // sub[j]: rows of block j, columns of block j-1

 private:
  std::vector<Block> factor_;
  std::vector<Block> coupling_;
};

struct RowMap {
  std::array<int, 3> free{-1, -1, -1};
  std::array<double, 3> sigma{0.0, 0.0, 0.0};
  bool terminal = false;
  bool hard = false;  // no slack allowance, excluded from the phase I slack
  bool constant = false;  // touches only the fixed initial state
};

// Rows over the fixed initial state only (x_0, v_0, K_0, E_0) are constants;
// scenario validation guarantees they hold.
bool OnlyInitialState(const VariableLayout& L, const Inequality& row) {
  for (int a = 0; a < row.num_vars; ++a) {
    const int var = row.vars[a];
    if (var != L.x(0) && var != L.v(0) && var != L.K(0) && var != L.E(0)) {
      return false;
    }
  }
  return true;
}

enum class Phase { kFeasibility, kOptimality };


struct NewtonDirection {
  Eigen::VectorXd dy;
  double ds = 0.0;
  double decrement = 0.0;  // lambda^2
};

// Owns the mutable state of one solve: row maps, the assembled Newton
// system and its factorization.
class BarrierWorkspace {
 public:
  BarrierWorkspace(const DiscretizedProblem& problem,
                   const SolverSettings& settings)
      : problem_(problem),
        N_(problem.grid().N),
        n_(kBlockSize * N_),
        allowance_(settings.EffectiveRelaxation()),
        kinetic_floor_(kKineticFloorFraction * problem.scales().kinetic),
        matrix_(N_) {
    const Scales& S = problem.scales();
    sigma_ = {S.power, S.speed, S.kinetic, S.energy};
    const VariableLayout& L = problem.layout();
    const auto& rows = problem.inequalities();
    num_rows_ = static_cast<int>(rows.size());
    maps_.resize(rows.size());
    const double h = problem.grid().h;
    terminal_gradient_ = Eigen::VectorXd::Zero(n_);
    for (size_t i = 0; i < rows.size(); ++i) {
      RowMap& map = maps_[i];
      map.hard = rows[i].tag == ConstraintTag::kKineticRelaxed;
      map.constant = OnlyInitialState(L, rows[i]);
      if (!map.constant) ++num_active_;
      for (int a = 0; a < rows[i].num_vars; ++a) {
        const int var = rows[i].vars[a];
        if (var == L.x(N_)) {
          map.terminal = true;
          continue;
        }
        const auto [slot, index] = FreeSlot(var);
        if (slot >= 0) {
          map.free[a] = index;
          map.sigma[a] = sigma_[slot];
        }
      }
      if (map.terminal) {
        // d x_N / d v_k = h w_k with trapezoid weights.
        const double dfdx = -1.0 / rows[i].scale;
        for (int k = 1; k <= N_; ++k) {
          const double w = (k == N_) ? 0.5 * h : h;
          terminal_gradient_[Index(k - 1, kSlotV)] =
              dfdx * w * sigma_[kSlotV];
        }
      }
    }
  }

  int n() const { return n_; }
  // Rows entering the barrier.
  int num_rows() const { return num_active_; }
  int num_all_rows() const { return num_rows_; }
  int objective_slot() const { return Index(N_ - 1, kSlotE); }
  double energy_scale() const { return sigma_[kSlotE]; }
  double allowance() const { return allowance_; }

  static int Index(int block, int slot) { return kBlockSize * block + slot; }

  Eigen::VectorXd Compress(const Eigen::VectorXd& z) const {
    const VariableLayout& L = problem_.layout();
    Eigen::VectorXd y(n_);
    for (int j = 0; j < N_; ++j) {
      y[Index(j, kSlotP)] = z[L.P(j)] / sigma_[kSlotP];
      y[Index(j, kSlotV)] = z[L.v(j + 1)] / sigma_[kSlotV];
      y[Index(j, kSlotK)] = z[L.K(j + 1)] / sigma_[kSlotK];
      y[Index(j, kSlotE)] = z[L.E(j + 1)] / sigma_[kSlotE];
    }
    return y;
  }

  Eigen::VectorXd Expand(const Eigen::VectorXd& y) const {
    const VariableLayout& L = problem_.layout();
    const double h = problem_.grid().h;
    Eigen::VectorXd z(L.size());
    z[L.x(0)] = problem_.x0();
    z[L.v(0)] = problem_.v0();
    z[L.K(0)] = problem_.K0();
    z[L.E(0)] = problem_.E0();
    for (int j = 0; j < N_; ++j) {
      z[L.P(j)] = y[Index(j, kSlotP)] * sigma_[kSlotP];
      z[L.v(j + 1)] = y[Index(j, kSlotV)] * sigma_[kSlotV];
      z[L.K(j + 1)] = y[Index(j, kSlotK)] * sigma_[kSlotK];
      z[L.E(j + 1)] = y[Index(j, kSlotE)] * sigma_[kSlotE];
    }
    for (int k = 0; k < N_; ++k) {
      z[L.x(k + 1)] = z[L.x(k)] + 0.5 * h * (z[L.v(k)] + z[L.v(k + 1)]);
    }
    return z;
  }

  bool InDomain(const Eigen::VectorXd& y) const {
    if (!y.allFinite()) return false;
    for (int j = 0; j < N_; ++j) {
      if (!(y[Index(j, kSlotK)] * sigma_[kSlotK] >= kinetic_floor_)) {
        return false;
      }
    }
    return true;
  }

  double Objective(const Eigen::VectorXd& y, double s, Phase phase) const {
    return phase == Phase::kFeasibility ? s : -y[objective_slot()];
  }

  // Barrier function t * objective - sum log(slack); nullopt outside the
  // strict interior or the domain. `magnitude` receives the sum of absolute
  // terms, the scale of rounding in the value.
  // Barrier value, or nullopt outside the interior. With `floor`, a row
  // whose slack falls below its floor entry also counts as outside.
  std::optional<double> Value(const Eigen::VectorXd& y, double s, Phase phase,
                              double t, double* magnitude,
                              const Eigen::VectorXd* floor = nullptr,
                              Eigen::VectorXd* slacks = nullptr) const {
    if (!InDomain(y) || !std::isfinite(s)) return std::nullopt;
    const Eigen::VectorXd z = Expand(y);
    const auto& rows = problem_.inequalities();
    double sum = 0.0;
    double abs_sum = 0.0;
    for (int i = 0; i < num_rows_; ++i) {
      if (maps_[i].constant) continue;
      const LocalEvaluation e = EvaluateInequality(problem_, rows[i], z);
      if (!e.in_domain) return std::nullopt;
      const double r = Slack(i, e.value, s, phase);
      if (!(r > 0.0)) return std::nullopt;
      if (floor && !(r >= (*floor)[i])) return std::nullopt;
      if (slacks) (*slacks)[i] = r;
      const double term = -std::log(r);
      sum += term;
      abs_sum += std::abs(term);
    }
    const double objective = t * Objective(y, s, phase);
    if (magnitude) *magnitude = abs_sum + std::abs(objective);
    return sum + objective;
  }

  // Largest normalized residual less its allowance over the rows that carry
  // the phase I slack.
  double MaxShiftedResidual(const Eigen::VectorXd& y) const {
    const Eigen::VectorXd z = Expand(y);
    const auto& rows = problem_.inequalities();
    double worst = -kInfinity;
    for (int i = 0; i < num_rows_; ++i) {
      if (maps_[i].hard || maps_[i].constant) continue;
      const LocalEvaluation e = EvaluateInequality(problem_, rows[i], z);
      worst = std::max(worst, e.value - allowance_);
    }
    return worst;
  }

  bool HardRowsStrict(const Eigen::VectorXd& y) const {
    const Eigen::VectorXd z = Expand(y);
    const auto& rows = problem_.inequalities();
    for (int i = 0; i < num_rows_; ++i) {
      if (!maps_[i].hard || maps_[i].constant) continue;
      if (!(EvaluateInequality(problem_, rows[i], z).value < 0.0)) {
        return false;
      }
    }
    return true;
  }

  // Builds gradient and Hessian of the barrier function at (y, s) and
  // factors the Hessian. Returns false on factorization failure.
  bool Assemble(const Eigen::VectorXd& y, double s, Phase phase, double t) {
    feasibility_ = phase == Phase::kFeasibility;
    const Eigen::VectorXd z = Expand(y);
    const auto& rows = problem_.inequalities();
    matrix_.SetZero();
    grad_ = Eigen::VectorXd::Zero(n_);
    grad_terms_ = Eigen::VectorXd::Zero(n_);
    border_ = Eigen::VectorXd::Zero(n_);
    grad_s_ = 0.0;
    corner_ = 0.0;
    rank_one_ = Eigen::VectorXd::Zero(n_);
    have_rank_one_ = false;

    for (int i = 0; i < num_rows_; ++i) {
      const RowMap& map = maps_[i];
      if (map.constant) continue;
      const LocalEvaluation e = EvaluateInequality(problem_, rows[i], z);
      const double r = Slack(i, e.value, s, phase);
      const double w1 = 1.0 / r;
      const double w2 = w1 * w1;
      const bool slack_row = feasibility_ && !map.hard;
      if (slack_row) {
        grad_s_ -= w1;
        corner_ += w2;
      }
      if (map.terminal) {
        grad_.noalias() += w1 * terminal_gradient_;
        grad_terms_.noalias() += w1 * terminal_gradient_.cwiseAbs();
        rank_one_ = w1 * terminal_gradient_;
        have_rank_one_ = true;
        if (slack_row) border_.noalias() -= w2 * terminal_gradient_;
        continue;
      }
      const int nv = rows[i].num_vars;
      std::array<double, 3> gs{0.0, 0.0, 0.0};
      for (int a = 0; a < nv; ++a) {
        if (map.free[a] < 0) continue;
        gs[a] = e.gradient[a] * map.sigma[a];
        grad_[map.free[a]] += w1 * gs[a];
        grad_terms_[map.free[a]] += std::abs(w1 * gs[a]);
        if (slack_row) border_[map.free[a]] -= w2 * gs[a];
      }
      for (int a = 0; a < nv; ++a) {
        const int ia = map.free[a];
        if (ia < 0) continue;
        for (int b = 0; b < nv; ++b) {
          const int ib = map.free[b];
          if (ib < 0) continue;
          const int ba = ia / kBlockSize;
          const int bb = ib / kBlockSize;
          if (bb > ba) continue;
          double value = w2 * gs[a] * gs[b];
          if (e.hessian(a, b) != 0.0) {
            value += w1 * e.hessian(a, b) * map.sigma[a] * map.sigma[b];
          }
          if (ba == bb) {
            matrix_.diag[ba](ia % kBlockSize, ib % kBlockSize) += value;
          } else {
            matrix_.sub[ba](ia % kBlockSize, ib % kBlockSize) += value;
          }
        }
      }
    }
    if (feasibility_) {
      grad_s_ += t;
    } else {
      grad_[objective_slot()] -= t;
      grad_terms_[objective_slot()] += t;
    }
    if (!FactorWithShift()) return false;
    if (have_rank_one_) {
      rank_one_solved_ = rank_one_;
      matrix_.SolveInPlace(rank_one_solved_);
      rank_one_denominator_ = 1.0 + rank_one_.dot(rank_one_solved_);
    }
    return true;
  }

  // (B + u u^T)^{-1} rhs for the assembled system, by Sherman-Morrison.
  Eigen::VectorXd SolveHessian(Eigen::VectorXd rhs) const {
    matrix_.SolveInPlace(rhs);
    if (have_rank_one_) {
      rhs -= rank_one_solved_ *
             (rank_one_.dot(rhs) / rank_one_denominator_);
    }
    return rhs;
  }

  // Newton step for the optimality phase with a few rounds of iterative
  // refinement against the assembled Hessian.
  Eigen::VectorXd RefinedStep(int rounds) const {
    Eigen::VectorXd dy = -SolveHessian(grad_);
    for (int r = 0; r < rounds; ++r) {
      Eigen::VectorXd residual = -grad_ - matrix_.Multiply(dy);
      if (have_rank_one_) residual -= rank_one_ * rank_one_.dot(dy);
      dy += SolveHessian(residual);
    }
    return dy;
  }

  const Eigen::VectorXd& gradient() const { return grad_; }
  // Sum of the magnitudes of the terms adding up to each gradient entry.
  const Eigen::VectorXd& gradient_terms() const { return grad_terms_; }
  double gradient_s() const { return grad_s_; }

  // Newton direction for the last assembled system.
  std::optional<NewtonDirection> Direction() const {
    NewtonDirection dir;
    const Eigen::VectorXd p = SolveHessian(grad_);
    if (feasibility_) {
      const Eigen::VectorXd q = SolveHessian(border_);
      const double schur = corner_ - border_.dot(q);
      if (!(schur > 0.0) || !std::isfinite(schur)) return std::nullopt;
      dir.ds = (-grad_s_ + border_.dot(p)) / schur;
      dir.dy = -p - q * dir.ds;
      dir.decrement = -(grad_.dot(dir.dy) + grad_s_ * dir.ds);
    } else {
      dir.dy = -p;
      dir.decrement = grad_.dot(p);
    }
    if (!dir.dy.allFinite() || !std::isfinite(dir.decrement)) {
      return std::nullopt;
    }
    return dir;
  }

  // The t minimizing the H^{-1} norm of t grad(objective) + grad(barrier),
  // i.e. the barrier parameter at which y is best centered.
  std::optional<double> CenteringParameter(const Eigen::VectorXd& y) {
    if (!Assemble(y, 0.0, Phase::kOptimality, 0.0)) return std::nullopt;
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n_);
    e[objective_slot()] = 1.0;
    const Eigen::VectorXd he = SolveHessian(e);
    const double den = e.dot(he);
    if (!(den > 0.0)) return std::nullopt;
    return he.dot(grad_) / den;
  }

 private:
  std::pair<int, int> FreeSlot(int var) const {
    const VariableLayout& L = problem_.layout();
    if (var >= L.P(0)) return {kSlotP, Index(var - L.P(0), kSlotP)};
    int slot = -1;
    int k = 0;
    if (var >= L.E(0)) {
      slot = kSlotE;
      k = var - L.E(0);
    } else if (var >= L.K(0)) {
      slot = kSlotK;
      k = var - L.K(0);
    } else if (var >= L.v(0)) {
      slot = kSlotV;
      k = var - L.v(0);
    }
    if (slot < 0 || k == 0) return {-1, -1};
    return {slot, Index(k - 1, slot)};
  }

  double Slack(int i, double value, double s, Phase phase) const {
    if (maps_[i].hard) return -value;
    const double target =
        phase == Phase::kFeasibility ? s + allowance_ : allowance_;
    return target - value;
  }

  bool FactorWithShift() {
    if (matrix_.Factor(0.0)) return true;
    double scale = 0.0;
    for (const auto& b : matrix_.diag) {
      scale = std::max(scale, b.diagonal().cwiseAbs().maxCoeff());
    }
    if (!(scale > 0.0) || !std::isfinite(scale)) return false;
    for (double shift = 1e-14 * scale; shift < 1e-4 * scale; shift *= 100.0) {
      if (matrix_.Factor(shift)) return true;
    }
    return false;
  }

  const DiscretizedProblem& problem_;
  int N_;
  int n_;
  int num_rows_ = 0;
  int num_active_ = 0;
  double allowance_;
  double kinetic_floor_;
  std::array<double, 4> sigma_{};
  std::vector<RowMap> maps_;
  Eigen::VectorXd terminal_gradient_;

  BlockTridiagonal matrix_;
  bool feasibility_ = false;
  Eigen::VectorXd grad_;
  Eigen::VectorXd grad_terms_;
  Eigen::VectorXd border_;
  double grad_s_ = 0.0;
  double corner_ = 0.0;
  Eigen::VectorXd rank_one_;
  Eigen::VectorXd rank_one_solved_;
  double rank_one_denominator_ = 1.0;
  bool have_rank_one_ = false;
};

enum class CenterOutcome { kConverged, kStalled, kIterationCap, kBudget,
                           kEarlyExit, kFailure };

// Iterate state shared between phases.
struct Iterate {
  Eigen::VectorXd y;
  double s = 0.0;
};

class BarrierMethod {
 public:
  BarrierMethod(const DiscretizedProblem& problem,
                const SolverSettings& settings)
      : problem_(problem), settings_(settings), ws_(problem, settings) {}

  BarrierWorkspace& workspace() { return ws_; }
  int total_iterations() const { return total_iterations_; }

  // Damped Newton centering at fixed t. `early_exit` is checked after every
  // step.
  template <typename EarlyExit>
  CenterOutcome Center(Iterate& it, Phase phase, double t,
                       EarlyExit early_exit, int* steps_out) {
    int steps = 0;
    CenterOutcome outcome = CenterOutcome::kIterationCap;
    for (int iter = 0; iter < settings_.max_newton; ++iter) {
      if (total_iterations_ >= settings_.max_total_iterations) {
        outcome = CenterOutcome::kBudget;
        break;
      }
      if (!ws_.Assemble(it.y, it.s, phase, t)) {
        outcome = CenterOutcome::kFailure;
        break;
      }
      const auto dir = ws_.Direction();
      if (!dir) {
        outcome = CenterOutcome::kFailure;
        break;
      }
      double magnitude = 0.0;
      Eigen::VectorXd floor = Eigen::VectorXd::Zero(ws_.num_all_rows());
      const auto f0 = ws_.Value(it.y, it.s, phase, t, &magnitude, nullptr,
                                &floor);
      floor *= kBoundaryFraction;
      if (!f0) {
        outcome = CenterOutcome::kFailure;
        break;
      }
      // Rounding floor of the barrier value.
      const double noise = 64.0 * std::numeric_limits<double>::epsilon() *
                           std::max(magnitude, 1.0);
      if (dir->decrement * 0.5 <=
          std::max(settings_.newton_tolerance, noise)) {
        outcome = CenterOutcome::kConverged;
        break;
      }
      const double slope = -dir->decrement;
      double alpha = 1.0;
      bool accepted = false;
      while (alpha > 1e-14) {
        const Eigen::VectorXd y_trial = it.y + alpha * dir->dy;
        const double s_trial = it.s + alpha * dir->ds;
        const auto f = ws_.Value(y_trial, s_trial, phase, t, nullptr, &floor);
        if (f && *f <= *f0 + settings_.slope_fraction * alpha * slope + noise) {
          it.y = y_trial;
          it.s = s_trial;
          accepted = true;
          break;
        }
        alpha *= settings_.shrink;
      }
      ++total_iterations_;
      ++steps;
      if (!accepted) {
        // The decrement is below what the barrier value can resolve.
        outcome = dir->decrement < 1e-4 ? CenterOutcome::kStalled
                                        : CenterOutcome::kFailure;
        break;
      }
      if (early_exit(it)) {
        outcome = CenterOutcome::kEarlyExit;
        break;
      }
    }
    if (steps_out) *steps_out = steps;
    return outcome;
  }

  // Full Newton steps at fixed t once the barrier value can no longer
  // resolve progress; a step is kept only if it lowers the largest
  // gradient entry.
  // Returns the number of steps taken.
  int Polish(Iterate& it, double t, int max_steps) {
    int taken = 0;
    if (!ws_.Assemble(it.y, it.s, Phase::kOptimality, t)) return taken;
    double norm = ws_.gradient().cwiseAbs().maxCoeff();
    for (int step = 0; step < max_steps; ++step) {
      const Eigen::VectorXd dy = ws_.RefinedStep(3);
      if (!dy.allFinite()) break;
      Eigen::VectorXd floor = Eigen::VectorXd::Zero(ws_.num_all_rows());
      if (!ws_.Value(it.y, it.s, Phase::kOptimality, t, nullptr, nullptr,
                     &floor)) {
        break;
      }
      floor *= kBoundaryFraction;
      double alpha = 1.0;
      while (alpha > 1e-6 && !ws_.Value(it.y + alpha * dy, it.s,
                                        Phase::kOptimality, t, nullptr,
                                        &floor)) {
        alpha *= settings_.shrink;
      }
      const Eigen::VectorXd trial = it.y + alpha * dy;
      if (!ws_.Assemble(trial, it.s, Phase::kOptimality, t)) break;
      const double trial_norm = ws_.gradient().cwiseAbs().maxCoeff();
      if (!(trial_norm < norm)) break;
      it.y = trial;
      norm = trial_norm;
      ++taken;
    }
    ws_.Assemble(it.y, it.s, Phase::kOptimality, t);
    return taken;
  }

  struct Phase1Result {
    SolveStatus status = SolveStatus::kOptimal;
    bool feasible = false;
    double slack = 0.0;  // best known upper bound on the optimal slack
  };

  // Minimizes the common slack from `it` (which must satisfy the hard rows
  // strictly). With `sign_only`, stops once the sign is decided or the
  // point has a comfortable margin.
  Phase1Result RunPhase1(Iterate& it, bool sign_only) {
    Phase1Result result;
    const double m = ws_.num_rows();
    const double start = ws_.MaxShiftedResidual(it.y);
    it.s = start + std::max(1e-2, 0.1 * std::abs(start));
    double t = 1.0;
    auto comfortable = [&](const Iterate& x) {
      return sign_only && x.s <= -kComfortableSlack;
    };
    Iterate last_center = it;
    double last_t = t;
    double factor = settings_.mu;
    for (;;) {
      int steps = 0;
      const CenterOutcome outcome =
          Center(it, Phase::kFeasibility, t, comfortable, &steps);
      result.slack = it.s;
      if (outcome == CenterOutcome::kFailure) {
        result.status = SolveStatus::kNumericalFailure;
        return result;
      }
      if (outcome == CenterOutcome::kBudget) {
        result.status = SolveStatus::kMaxIterations;
        result.feasible = it.s < 0.0;
        return result;
      }
      if (outcome == CenterOutcome::kEarlyExit) {
        result.feasible = true;
        return result;
      }
      if (outcome == CenterOutcome::kIterationCap) {
        // No certificate from a cut-short centering. Retry the increase
        // from the last center with a smaller multiplier.
        if (factor > kMinMultiplier && t > last_t) {
          factor = std::max(std::sqrt(factor), kMinMultiplier);
          it = last_center;
          t = last_t * factor;
        }
        continue;
      }
      last_center = it;
      last_t = t;
      const double gap = m / t;
      if (sign_only) {
        if (it.s < 0.0 && gap < std::abs(it.s)) {
          result.feasible = true;
          return result;
        }
      }
      if (it.s - gap > 0.0) {
        result.feasible = false;
        return result;
      }
      if (gap <= std::max(kPhase1GapTolerance,
                          kPhase1RelativeGap * std::abs(it.s))) {
        result.feasible = it.s < 0.0;
        return result;
      }
      t *= factor;
      factor = std::min(settings_.mu, factor * factor);
    }
  }

 private:
  const DiscretizedProblem& problem_;
  const SolverSettings& settings_;
  BarrierWorkspace ws_;
  int total_iterations_ = 0;
};

double Seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start)
      .count();
}

bool KineticInDomain(const DiscretizedProblem& problem,
                     const Eigen::VectorXd& z) {
  const VariableLayout& L = problem.layout();
  const double floor = kKineticFloorFraction * problem.scales().kinetic;
  for (int k = 1; k <= L.N; ++k) {
    if (!(z[L.K(k)] >= floor)) return false;
  }
  return z.allFinite();
}

void FillPositions(const DiscretizedProblem& problem, Eigen::VectorXd& z) {
  const VariableLayout& L = problem.layout();
  const double h = problem.grid().h;
  z[L.x(0)] = problem.x0();
  for (int k = 0; k < L.N; ++k) {
    z[L.x(k + 1)] = z[L.x(k)] + 0.5 * h * (z[L.v(k)] + z[L.v(k + 1)]);
  }
}

void FillInitialConditions(const DiscretizedProblem& problem,
                           Eigen::VectorXd& z) {
  const VariableLayout& L = problem.layout();
  z[L.v(0)] = problem.v0();
  z[L.K(0)] = problem.K0();
  z[L.E(0)] = problem.E0();
  FillPositions(problem, z);
}

}  // namespace

void SolverSettings::Validate() const {
  if (!(eps_gap > 0.0)) throw std::invalid_argument("eps_gap must be > 0");
  if (!(eps_feas > 0.0)) throw std::invalid_argument("eps_feas must be > 0");
  if (!(mu > 1.0)) throw std::invalid_argument("mu must exceed 1");
  if (max_newton < 1) throw std::invalid_argument("max_newton must be >= 1");
  if (!(slope_fraction > 0.0 && slope_fraction < 0.5)) {
    throw std::invalid_argument("slope_fraction must be in (0, 0.5)");
  }
  if (!(shrink > 0.0 && shrink < 1.0)) {
    throw std::invalid_argument("shrink must be in (0, 1)");
  }
  if (max_total_iterations < 1) {
    throw std::invalid_argument("max_total_iterations must be >= 1");
  }
  if (!(newton_tolerance > 0.0)) {
    throw std::invalid_argument("newton_tolerance must be > 0");
  }
}

std::string StatusName(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal:
      return "optimal";
    case SolveStatus::kInfeasible:
      return "infeasible";
    case SolveStatus::kMaxIterations:
      return "max-iterations";
    case SolveStatus::kNumericalFailure:
      return "numerical-failure";
  }
  return "unknown";
}

Eigen::VectorXd ColdStart(const DiscretizedProblem& problem) {
  const Scenario& sc = problem.scenario();
  const Grid& grid = problem.grid();
  const VariableLayout& L = problem.layout();
  const Scales& S = problem.scales();
  const double m = sc.vehicle.mass;
  const EngineModel& engine = sc.engine;

  Eigen::VectorXd z(L.size());
  const double p_idle =
      std::clamp(0.0, engine.p_min(), engine.p_max());
  const double E_target =
      std::max(sc.E_min, sc.E_init - grid.T * EngineRate(engine, p_idle));
  for (int k = 1; k <= grid.N; ++k) {
    const double t = grid.Time(k);
    const double v = 0.5 * (Sample(sc.v_min, t) + Sample(sc.v_max, t));
    z[L.v(k)] = v;
    z[L.K(k)] = std::max(0.5 * m * v * v * 1.1, 1e-6 * S.kinetic);
    z[L.E(k)] = sc.E_init + (E_target - sc.E_init) * k / grid.N;
  }
  const double headroom =
      engine.bounded_above() ? engine.p_max() - p_idle : S.power;
  for (int j = 0; j < grid.N; ++j) {
    z[L.P(j)] = p_idle + 0.01 * std::min(headroom, S.power);
  }
  FillInitialConditions(problem, z);
  return z;
}

Eigen::VectorXd WarmStart(const DiscretizedProblem& problem,
                          const Trajectory& previous) {
  const Scenario& sc = problem.scenario();
  const Grid& grid = problem.grid();
  const VariableLayout& L = problem.layout();
  const double m = sc.vehicle.mass;
  const Grid& pg = previous.grid;
  if (pg.N < 1 || previous.v.size() != pg.N + 1 ||
      previous.P_drv.size() != pg.N) {
    return ColdStart(problem);
  }

  // Linear interpolation of node data at normalized time tau in [0, 1].
  auto node_value = [&](const Eigen::VectorXd& data, double tau) {
    const double pos = std::clamp(tau, 0.0, 1.0) * pg.N;
    const int k = std::min(static_cast<int>(pos), pg.N - 1);
    const double w = pos - k;
    return (1.0 - w) * data[k] + w * data[k + 1];
  };
  Eigen::VectorXd z(L.size());
  for (int k = 1; k <= grid.N; ++k) {
    const double tau = static_cast<double>(k) / grid.N;
    z[L.v(k)] = node_value(previous.v, tau);
    z[L.K(k)] = node_value(previous.K, tau);
    z[L.E(k)] = node_value(previous.E, tau);
  }
  for (int j = 0; j < grid.N; ++j) {
    const double tau = (j + 0.5) / grid.N;
    const int pj = std::min(static_cast<int>(tau * pg.N), pg.N - 1);
    z[L.P(j)] = previous.P_drv[pj];
  }
  FillInitialConditions(problem, z);

  // Interior projection: K strictly above 1/2 m v^2, E strictly inside its
  // box.
  constexpr double kPush = 1e-3;
  const double e_center = 0.5 * (sc.E_min + sc.E_max);
  for (int k = 1; k <= grid.N; ++k) {
    const double v = z[L.v(k)];
    const double floor = 0.5 * m * v * v;
    if (!(z[L.K(k)] > floor * (1.0 + 1e-9))) {
      z[L.K(k)] = floor * (1.0 + kPush) + 1e-9 * problem.scales().kinetic;
    }
    double& E = z[L.E(k)];
    if (!(E > sc.E_min && E < sc.E_max)) E += kPush * (e_center - E);
  }
  if (!KineticInDomain(problem, z)) return ColdStart(problem);
  return z;
}

bool IsStrictlyInterior(const DiscretizedProblem& problem,
                        const Eigen::VectorXd& point, double allowance) {
  if (point.size() != problem.num_variables()) return false;
  if (!KineticInDomain(problem, point)) return false;
  for (const auto& row : problem.inequalities()) {
    if (OnlyInitialState(problem.layout(), row)) continue;
    const LocalEvaluation e = EvaluateInequality(problem, row, point);
    if (!e.in_domain) return false;
    const double limit =
        row.tag == ConstraintTag::kKineticRelaxed ? 0.0 : allowance;
    if (!(e.value < limit)) return false;
  }
  return true;
}

Trajectory ToTrajectory(const DiscretizedProblem& problem,
                        const Eigen::VectorXd& z) {
  const Grid& grid = problem.grid();
  const VariableLayout& L = problem.layout();
  const Scenario& sc = problem.scenario();
  Trajectory traj = MakeTrajectory(grid, TrajectoryKind::kRelaxed);
  for (int k = 0; k <= grid.N; ++k) {
    traj.x[k] = z[L.x(k)];
    traj.v[k] = z[L.v(k)];
    traj.K[k] = z[L.K(k)];
    traj.E[k] = z[L.E(k)];
  }
  for (int j = 0; j < grid.N; ++j) {
    traj.P_drv[j] = z[L.P(j)];
    const double loss = 0.5 * (ResistiveLoss(sc.vehicle, traj.K[j]).value +
                               ResistiveLoss(sc.vehicle, traj.K[j + 1]).value);
    traj.P_brk[j] = traj.P_drv[j] - loss + sc.TerrainAt(grid.Midpoint(j)) -
                    (traj.K[j + 1] - traj.K[j]) / grid.h;
  }
  return traj;
}

FeasibilityAssessment AssessFeasibility(const DiscretizedProblem& problem,
                                        const SolverSettings& settings,
                                        bool sign_only) {
  settings.Validate();
  BarrierMethod method(problem, settings);
  BarrierWorkspace& ws = method.workspace();
  Iterate it;
  it.y = ws.Compress(ColdStart(problem));
  const auto phase1 = method.RunPhase1(it, sign_only);
  FeasibilityAssessment out;
  out.status = phase1.status;
  out.feasible = phase1.feasible;
  out.margin = -phase1.slack;
  out.iterations = method.total_iterations();
  if (out.status == SolveStatus::kOptimal && !out.feasible) {
    out.status = SolveStatus::kInfeasible;
  }
  return out;
}

SolveResult Solve(const DiscretizedProblem& problem,
                  const SolverSettings& settings,
                  const std::optional<Eigen::VectorXd>& initial) {
  settings.Validate();
  const auto clock_start = std::chrono::steady_clock::now();
  BarrierMethod method(problem, settings);
  BarrierWorkspace& ws = method.workspace();

  SolveReport report;
  report.settings = settings;
  report.num_variables = problem.num_variables();
  report.num_inequalities = ws.num_rows();

  Eigen::VectorXd z0;
  if (initial && initial->size() == problem.num_variables()) {
    z0 = *initial;
    FillInitialConditions(problem, z0);
    report.warm_started = KineticInDomain(problem, z0);
  }
  if (!report.warm_started) z0 = ColdStart(problem);

  Iterate it;
  it.y = ws.Compress(z0);
  if (!ws.HardRowsStrict(it.y)) {
    // Restore K > 1/2 m v^2 before phase I, which keeps that row hard.
    const VariableLayout& L = problem.layout();
    const double m = problem.scenario().vehicle.mass;
    for (int k = 1; k <= L.N; ++k) {
      const double floor = 0.5 * m * z0[L.v(k)] * z0[L.v(k)];
      if (!(z0[L.K(k)] > floor)) z0[L.K(k)] = floor * 1.001 + 1e-9;
    }
    it.y = ws.Compress(z0);
  }

  const bool interior =
      IsStrictlyInterior(problem, ws.Expand(it.y), ws.allowance());
  if (!interior) {
    report.used_phase1 = true;
    const auto phase1 = method.RunPhase1(it, /*sign_only=*/true);
    report.phase1_iterations = method.total_iterations();
    report.phase1_slack = phase1.slack;
    if (phase1.status != SolveStatus::kOptimal || !phase1.feasible) {
      report.status = phase1.status == SolveStatus::kOptimal
                          ? SolveStatus::kInfeasible
                          : phase1.status;
      if (phase1.status == SolveStatus::kMaxIterations && phase1.feasible) {
        report.status = SolveStatus::kMaxIterations;
      }
      report.newton_iterations = method.total_iterations();
      report.message = report.status == SolveStatus::kInfeasible
                           ? "phase I certificate: minimized slack positive"
                           : "phase I did not converge";
      const Eigen::VectorXd z = ws.Expand(it.y);
      report.objective = z[problem.objective_index()];
      report.wall_time_s = Seconds(clock_start);
      return {ToTrajectory(problem, z), report, z};
    }
  } else {
    report.phase1_slack = ws.MaxShiftedResidual(it.y);
  }

  const double m = ws.num_rows();
  auto target_t = [&](const Iterate& x) {
    const double objective = std::abs(ws.Objective(x.y, 0.0,
                                                   Phase::kOptimality));
    return m / (settings.eps_gap * std::max(1.0, objective));
  };
  double t = 1.0;
  if (interior && report.warm_started) {
    const auto estimate = ws.CenteringParameter(it.y);
    if (estimate && *estimate > 1.0) t = std::min(*estimate, target_t(it));
  }

  SolveStatus status = SolveStatus::kMaxIterations;
  bool centered = false;
  Iterate last_center = it;
  double last_t = 0.0;
  double factor = settings.mu;
  for (;;) {
    int steps = 0;
    const CenterOutcome outcome = method.Center(
        it, Phase::kOptimality, t, [](const Iterate&) { return false; },
        &steps);
    const double objective_j =
        -ws.Objective(it.y, 0.0, Phase::kOptimality) * ws.energy_scale();
    const double gap_j = m / t * ws.energy_scale();
    report.history.push_back({t, objective_j, gap_j, objective_j + gap_j,
                              steps});
    if (outcome == CenterOutcome::kFailure) {
      status = SolveStatus::kNumericalFailure;
      report.message = "Newton system could not be factored";
      break;
    }
    if (outcome == CenterOutcome::kBudget) {
      status = SolveStatus::kMaxIterations;
      report.message = "total Newton iteration cap reached";
      break;
    }
    centered = outcome == CenterOutcome::kConverged ||
               outcome == CenterOutcome::kStalled;
    if (!centered && last_t > 0.0 && factor > kMinMultiplier) {
      factor = std::max(std::sqrt(factor), kMinMultiplier);
      it = last_center;
      t = last_t * factor;
      report.history.pop_back();
      continue;
    }
    if (centered) {
      last_center = it;
      last_t = t;
    }
    if (m / t <= settings.eps_gap *
                     std::max(1.0, std::abs(ws.Objective(
                                       it.y, 0.0, Phase::kOptimality)))) {
      if (centered) {
        status = SolveStatus::kOptimal;
        break;
      }
      continue;  // finish centering at the final t
    }
    t = std::min(t * factor, std::max(target_t(it), t));
    factor = std::min(settings.mu, factor * factor);
  }

  if (status == SolveStatus::kOptimal) {
    report.polish_iterations = method.Polish(it, t, kMaxPolishSteps);
  }
  const Eigen::VectorXd z = ws.Expand(it.y);
  const ProblemEvaluation eval = Evaluate(problem, z);
  report.status = status;
  report.objective = z[problem.objective_index()];
  report.duality_gap = m / t * ws.energy_scale();
  report.max_equality_residual = eval.MaxEqualityResidual();
  report.max_inequality_violation = eval.MaxInequalityViolation();
  if (ws.Assemble(it.y, 0.0, Phase::kOptimality, t)) {
    report.stationarity_residual = ws.gradient().cwiseAbs().maxCoeff() / t;
    report.relative_stationarity =
        (ws.gradient().cwiseAbs().array() /
         ws.gradient_terms().array().max(1e-300))
            .maxCoeff();
  }
  report.newton_iterations = method.total_iterations();
  report.wall_time_s = Seconds(clock_start);
  return {ToTrajectory(problem, z), report, z};
}

}  // namespace ecoplan
