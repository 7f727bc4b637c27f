#include "repx/scorer.hpp"

#include "repx/error.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <random>
#include <string>

namespace repx {
namespace {

using nlohmann::json;

Eigen::MatrixXd gaussian_matrix(std::mt19937_64& rng, int rows, int cols) {
  std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(static_cast<double>(cols)));
  Eigen::MatrixXd m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = normal(rng);
  return m;
}

std::size_t bin_begin(std::size_t b, std::size_t n, std::size_t bins) { return b * n / bins; }

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j, const char* name) {
  if (!j.is_array() || j.empty() || !j.front().is_array()) {
    throw ConfigError(std::string("weight file: ") + name + " must be a non-empty array of rows");
  }
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j.front().size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    if (static_cast<Eigen::Index>(j[r].size()) != cols) {
      throw ConfigError(std::string("weight file: ragged rows in ") + name);
    }
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = j[r][c].get<double>();
  }
  return m;
}

Eigen::VectorXd vector_from_json(const json& j, Eigen::Index expected, const char* name) {
  if (j.is_null()) return Eigen::VectorXd::Zero(expected);
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != expected) {
    throw ConfigError(std::string("weight file: ") + name + " must have " + std::to_string(expected) + " entries");
  }
  Eigen::VectorXd v(expected);
  for (Eigen::Index i = 0; i < expected; ++i) v(i) = j[i].get<double>();
  return v;
}

}  // namespace

double cosine_similarity(const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
  const double nu = u.norm();
  const double nv = v.norm();
  if (nu == 0.0 || nv == 0.0) return 0.0;
  return u.dot(v) / (nu * nv);
}

SurrogateScorer::SurrogateScorer(SurrogateParams params, std::size_t axes) : params_(params), axes_(axes) {
  if (params_.pool_bins < 1 || params_.hidden < 1 || params_.embed < 2 || axes_ < 1) {
    throw ConfigError("surrogate scorer: pool_bins, hidden >= 1 and embed >= 2 required");
  }
  std::mt19937_64 rng(params_.seed);
  const int in = params_.pool_bins * static_cast<int>(axes_);
  w1_ = gaussian_matrix(rng, params_.hidden, in);
  w2_ = gaussian_matrix(rng, params_.embed, params_.hidden);
  if (params_.bias) {
    b1_ = gaussian_matrix(rng, params_.hidden, 1).col(0);
    b2_ = gaussian_matrix(rng, params_.embed, 1).col(0);
  } else {
    b1_ = Eigen::VectorXd::Zero(params_.hidden);
    b2_ = Eigen::VectorXd::Zero(params_.embed);
  }
}

SurrogateScorer::SurrogateScorer(SurrogateParams params, Eigen::MatrixXd w1, Eigen::VectorXd b1,
                                 Eigen::MatrixXd w2, Eigen::VectorXd b2)
    : params_(params), w1_(std::move(w1)), b1_(std::move(b1)), w2_(std::move(w2)), b2_(std::move(b2)) {
  if (params_.pool_bins < 1 || w1_.cols() % params_.pool_bins != 0) {
    throw ConfigError("surrogate scorer: W1 columns must be a multiple of pool_bins");
  }
  axes_ = static_cast<std::size_t>(w1_.cols() / params_.pool_bins);
  if (b1_.size() != w1_.rows() || w2_.cols() != w1_.rows() || b2_.size() != w2_.rows() || w2_.rows() < 2) {
    throw ConfigError("surrogate scorer: inconsistent weight shapes");
  }
  params_.hidden = static_cast<int>(w1_.rows());
  params_.embed = static_cast<int>(w2_.rows());
  params_.bias = !b1_.isZero(0.0) || !b2_.isZero(0.0);
}

void SurrogateScorer::check_input(const Samples& x, const char* which) const {
  if (x.rows() < params_.pool_bins) {
    throw DataError(std::string("surrogate scorer: ") + which + " has " + std::to_string(x.rows()) +
                    " samples, fewer than pool_bins = " + std::to_string(params_.pool_bins));
  }
  if (static_cast<std::size_t>(x.cols()) != axes_) {
    throw DataError(std::string("surrogate scorer: ") + which + " has " + std::to_string(x.cols()) +
                    " axes, expected " + std::to_string(axes_));
  }
}

Eigen::VectorXd SurrogateScorer::pool(const Samples& x) const {
  const auto n = static_cast<std::size_t>(x.rows());
  const auto bins = static_cast<std::size_t>(params_.pool_bins);
  Eigen::VectorXd pooled(static_cast<Eigen::Index>(bins * axes_));
  for (std::size_t b = 0; b < bins; ++b) {
    const auto lo = static_cast<Eigen::Index>(bin_begin(b, n, bins));
    const auto hi = static_cast<Eigen::Index>(bin_begin(b + 1, n, bins));
    const Eigen::RowVectorXd mean = x.middleRows(lo, hi - lo).colwise().mean();
    pooled.segment(static_cast<Eigen::Index>(b * axes_), static_cast<Eigen::Index>(axes_)) = mean.transpose();
  }
  return pooled;
}

Eigen::VectorXd SurrogateScorer::embed(const Samples& x) const {
  check_input(x, "input");
  Eigen::VectorXd z = w1_ * pool(x) + b1_;
  if (params_.nonlinearity == Nonlinearity::Tanh) z = z.array().tanh().matrix();
  return w2_ * z + b2_;
}

double SurrogateScorer::score(const MotionSeries& signal, const MotionSeries& anchor) const {
  check_input(signal.samples(), "signal");
  check_input(anchor.samples(), "anchor");
  return cosine_similarity(embed(signal.samples()), embed(anchor.samples()));
}

Samples SurrogateScorer::grad_signal(const MotionSeries& signal, const MotionSeries& anchor) const {
  const Samples& x = signal.samples();
  check_input(x, "signal");
  check_input(anchor.samples(), "anchor");

  const Eigen::VectorXd pre = w1_ * pool(x) + b1_;
  const Eigen::VectorXd act =
      params_.nonlinearity == Nonlinearity::Tanh ? Eigen::VectorXd(pre.array().tanh()) : pre;
  const Eigen::VectorXd u = w2_ * act + b2_;
  const Eigen::VectorXd v = embed(anchor.samples());

  Samples grad = Samples::Zero(x.rows(), x.cols());
  const double nu = u.norm();
  const double nv = v.norm();
  if (nu == 0.0 || nv == 0.0) return grad;

  const double cos = u.dot(v) / (nu * nv);
  const Eigen::VectorXd d_u = v / (nu * nv) - cos * u / (nu * nu);
  Eigen::VectorXd d_pre = w2_.transpose() * d_u;
  if (params_.nonlinearity == Nonlinearity::Tanh) d_pre.array() *= 1.0 - act.array().square();
  const Eigen::VectorXd d_pool = w1_.transpose() * d_pre;

  const auto n = static_cast<std::size_t>(x.rows());
  const auto bins = static_cast<std::size_t>(params_.pool_bins);
  for (std::size_t b = 0; b < bins; ++b) {
    const std::size_t lo = bin_begin(b, n, bins);
    const std::size_t hi = bin_begin(b + 1, n, bins);
    const double inv = 1.0 / static_cast<double>(hi - lo);
    for (std::size_t t = lo; t < hi; ++t) {
      for (std::size_t k = 0; k < axes_; ++k) {
        grad(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(k)) =
            d_pool(static_cast<Eigen::Index>(b * axes_ + k)) * inv;
      }
    }
  }
  return grad;
}

SurrogateScorer SurrogateScorer::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open scorer weights: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("scorer weights " + path.string() + ": " + e.what());
  }
  SurrogateParams params;
  params.pool_bins = j.value("pool_bins", 10);
  const std::string nl = j.value("nonlinearity", std::string("tanh"));
  if (nl == "tanh") {
    params.nonlinearity = Nonlinearity::Tanh;
  } else if (nl == "identity") {
    params.nonlinearity = Nonlinearity::Identity;
  } else {
    throw ConfigError("scorer weights " + path.string() + ": unknown nonlinearity '" + nl + "'");
  }
  Eigen::MatrixXd w1 = matrix_from_json(j.at("W1"), "W1");
  Eigen::MatrixXd w2 = matrix_from_json(j.at("W2"), "W2");
  Eigen::VectorXd b1 = vector_from_json(j.value("b1", json()), w1.rows(), "b1");
  Eigen::VectorXd b2 = vector_from_json(j.value("b2", json()), w2.rows(), "b2");
  SurrogateScorer scorer(params, std::move(w1), std::move(b1), std::move(w2), std::move(b2));
  if (j.contains("axes") && j["axes"].get<std::size_t>() != scorer.axes()) {
    throw ConfigError("scorer weights " + path.string() + ": axes does not match W1 shape");
  }
  return scorer;
}

void SurrogateScorer::save(const std::filesystem::path& path) const {
  json j;
  j["pool_bins"] = params_.pool_bins;
  j["axes"] = axes_;
  j["nonlinearity"] = params_.nonlinearity == Nonlinearity::Tanh ? "tanh" : "identity";
  j["W1"] = matrix_to_json(w1_);
  j["b1"] = std::vector<double>(b1_.data(), b1_.data() + b1_.size());
  j["W2"] = matrix_to_json(w2_);
  j["b2"] = std::vector<double>(b2_.data(), b2_.data() + b2_.size());
  std::ofstream out(path);
  if (!out) throw IoError("cannot write scorer weights: " + path.string());
  out << j.dump(1) << '\n';
}

}  // namespace repx
