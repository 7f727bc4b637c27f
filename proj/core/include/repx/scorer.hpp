#pragma once

#include "repx/motion_series.hpp"

#include <cstdint>
#include <filesystem>
#include <memory>

namespace repx {

/// Differentiable comparison of a signal repetition against an anchor.
/// Implementations must be immutable after construction and safe to share
/// across threads.
class ComparativeScorer {
 public:
  virtual ~ComparativeScorer() = default;

  /// Similarity in [-1, 1].
  virtual double score(const MotionSeries& signal, const MotionSeries& anchor) const = 0;

  /// d score / d signal, shaped like signal.samples().
  virtual Samples grad_signal(const MotionSeries& signal, const MotionSeries& anchor) const = 0;
};

enum class Nonlinearity { Tanh, Identity };

struct SurrogateParams {
  /// Number of adaptive mean-pooling bins along time.
  int pool_bins = 10;
  int hidden = 32;
  int embed = 16;
  Nonlinearity nonlinearity = Nonlinearity::Tanh;
  bool bias = false;
  std::uint64_t seed = 7;
};

/// Fixed-weight stand-in for a learned Siamese comparator:
///   pooled = adaptive mean pool (pool_bins x axes), flattened row-major
///   e(x)   = W2 * act(W1 * pooled + b1) + b2
///   score  = cos(e(signal), e(anchor))
/// Weights are drawn from N(0, 1/fan_in) with the given seed. If either
/// embedding has zero norm the score is 0 and the gradient is 0.
class SurrogateScorer final : public ComparativeScorer {
 public:
  explicit SurrogateScorer(SurrogateParams params = {}, std::size_t axes = kImuAxes);

  /// Takes explicit weights, e.g. the linearization of an external model.
  SurrogateScorer(SurrogateParams params, Eigen::MatrixXd w1, Eigen::VectorXd b1, Eigen::MatrixXd w2,
                  Eigen::VectorXd b2);

  double score(const MotionSeries& signal, const MotionSeries& anchor) const override;
  Samples grad_signal(const MotionSeries& signal, const MotionSeries& anchor) const override;

  Eigen::VectorXd pool(const Samples& x) const;
  Eigen::VectorXd embed(const Samples& x) const;

  const SurrogateParams& params() const noexcept { return params_; }
  std::size_t axes() const noexcept { return axes_; }
  const Eigen::MatrixXd& w1() const noexcept { return w1_; }
  const Eigen::MatrixXd& w2() const noexcept { return w2_; }
  const Eigen::VectorXd& b1() const noexcept { return b1_; }
  const Eigen::VectorXd& b2() const noexcept { return b2_; }

  /// JSON weight file: {"pool_bins", "axes", "nonlinearity": "tanh"|"identity",
  /// "W1": [[...]], "b1": [...], "W2": [[...]], "b2": [...]}.
  static SurrogateScorer load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

 private:
  void check_input(const Samples& x, const char* which) const;

  SurrogateParams params_;
  std::size_t axes_;
  Eigen::MatrixXd w1_;
  Eigen::VectorXd b1_;
  Eigen::MatrixXd w2_;
  Eigen::VectorXd b2_;
};

/// Cosine similarity; 0 when either vector is zero.
double cosine_similarity(const Eigen::VectorXd& u, const Eigen::VectorXd& v);

}  // namespace repx
