#include "mst/transform.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "mst/errors.hpp"
#include "mst/simd/kernels.hpp"

namespace mst {

TransformMode parse_transform_mode(std::string_view name) {
  if (name == "wct") return TransformMode::kWct;
  if (name == "adain") return TransformMode::kAdain;
  throw ArgumentError("unknown transform mode '" + std::string(name) + "' (expected wct|adain)");
}

double TransformParams::alpha_for(std::int32_t label) const {
  if (alpha.size() == 1) return alpha.front();
  if (label < 0 || static_cast<std::size_t>(label) >= alpha.size()) {
    throw ArgumentError("no alpha given for cluster " + std::to_string(label));
  }
  return alpha[static_cast<std::size_t>(label)];
}

void TransformParams::validate(std::size_t k) const {
  if (alpha.empty()) throw ArgumentError("alpha list is empty");
  if (alpha.size() != 1 && alpha.size() != k) {
    throw ArgumentError("alpha list has " + std::to_string(alpha.size()) + " entries, expected 1 or K=" +
                        std::to_string(k));
  }
  for (double a : alpha) {
    if (!(a >= 0.0 && a <= 1.0)) throw ArgumentError("alpha must lie in [0, 1], got " + std::to_string(a));
  }
  if (!(eig_floor > 0.0)) throw ArgumentError("eig_floor must be positive");
}

Centered mean_center(const Eigen::MatrixXd& features) {
  if (features.cols() < 1) throw DimensionError("mean_center: need at least one column");
  Centered out;
  out.mean = features.rowwise().mean();
  out.centered = features.colwise() - out.mean;
  return out;
}

Eigen::MatrixXd covariance(const Eigen::MatrixXd& centered) {
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(centered.rows(), centered.rows());
  cov.selfadjointView<Eigen::Lower>().rankUpdate(centered, 1.0 / static_cast<double>(centered.cols()));
  cov.triangularView<Eigen::StrictlyUpper>() = cov.transpose();
  return cov;
}

namespace {

// E f(max(D, floor)) E^T for a symmetric matrix.
template <typename F>
Eigen::MatrixXd spectral_map(const Eigen::MatrixXd& sym, double floor, F&& f) {
  const Eigen::MatrixXd s = 0.5 * (sym + sym.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s);
  if (eig.info() != Eigen::Success) throw Error("symmetric eigendecomposition failed to converge");
  const Eigen::VectorXd d = eig.eigenvalues().unaryExpr([&](double v) { return f(std::max(v, floor)); });
  return eig.eigenvectors() * d.asDiagonal() * eig.eigenvectors().transpose();
}

}  // namespace

Whitened whiten(const Eigen::MatrixXd& centered, double eig_floor) {
  Whitened out;
  out.whitening = spectral_map(covariance(centered), eig_floor, [](double v) { return 1.0 / std::sqrt(v); });
  out.whitened.noalias() = out.whitening * centered;
  return out;
}

Eigen::MatrixXd coloring_matrix(const Eigen::MatrixXd& style_centered, double eig_floor) {
  return spectral_map(covariance(style_centered), eig_floor, [](double v) { return std::sqrt(v); });
}

Eigen::MatrixXd color(const Eigen::MatrixXd& whitened, const Eigen::MatrixXd& style_centered, double eig_floor) {
  if (whitened.rows() != style_centered.rows()) throw DimensionError("color: channel counts differ");
  Eigen::MatrixXd out;
  out.noalias() = coloring_matrix(style_centered, eig_floor) * whitened;
  return out;
}

Eigen::MatrixXd wct_group(const GroupPair& pair, double eig_floor) {
  if (pair.content.rows() != pair.style.rows()) throw DimensionError("wct_group: channel counts differ");
  if (pair.content.cols() < 1 || pair.style.cols() < 1) throw DimensionError("wct_group: empty group");
  const Centered c = mean_center(pair.content);
  const Centered s = mean_center(pair.style);
  if (pair.content.cols() < 2 || pair.style.cols() < 2) return c.centered.colwise() + s.mean;
  const Whitened w = whiten(c.centered, eig_floor);
  Eigen::MatrixXd out = color(w.whitened, s.centered, eig_floor);
  out.colwise() += s.mean;
  return out;
}

Eigen::MatrixXd adain_group(const GroupPair& pair) {
  if (pair.content.rows() != pair.style.rows()) throw DimensionError("adain_group: channel counts differ");
  if (pair.content.cols() < 1 || pair.style.cols() < 1) throw DimensionError("adain_group: empty group");
  const Centered c = mean_center(pair.content);
  const Centered s = mean_center(pair.style);
  const Eigen::VectorXd sigma_c =
      (c.centered.array().square().rowwise().sum() / static_cast<double>(c.centered.cols())).sqrt().max(1e-8);
  const Eigen::VectorXd sigma_s =
      (s.centered.array().square().rowwise().sum() / static_cast<double>(s.centered.cols())).sqrt();
  const Eigen::VectorXd gain = sigma_s.cwiseQuotient(sigma_c);
  Eigen::MatrixXd out = gain.asDiagonal() * c.centered;
  out.colwise() += s.mean;
  return out;
}

Eigen::MatrixXd blend(const Eigen::MatrixXd& transferred, const Eigen::MatrixXd& content, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ArgumentError("blend: alpha must lie in [0, 1]");
  if (transferred.rows() != content.rows() || transferred.cols() != content.cols()) {
    throw DimensionError("blend: shapes differ");
  }
  if (alpha == 0.0) return content;
  if (alpha == 1.0) return transferred;
  Eigen::MatrixXd out(content.rows(), content.cols());
  simd::active().blend(out.data(), transferred.data(), content.data(), alpha, static_cast<std::size_t>(out.size()));
  return out;
}

FeatureMap assemble(const std::vector<PlacedGroup>& groups, std::size_t height, std::size_t width) {
  const std::size_t n = height * width;
  if (groups.empty()) {
    if (n == 0) return {};
    throw PartitionError("assemble: no groups for a non-empty grid");
  }
  const auto channels = static_cast<std::size_t>(groups.front().features.rows());
  FeatureMatrix out(channels, n);
  std::vector<bool> written(n, false);
  for (const auto& g : groups) {
    if (static_cast<std::size_t>(g.features.rows()) != channels ||
        static_cast<std::size_t>(g.features.cols()) != g.positions.size()) {
      throw DimensionError("assemble: group matrix does not match its position list");
    }
    for (std::size_t j = 0; j < g.positions.size(); ++j) {
      const std::size_t p = g.positions[j];
      if (p >= n) throw PartitionError("assemble: position " + std::to_string(p) + " outside the grid");
      if (written[p]) throw PartitionError("assemble: position " + std::to_string(p) + " written twice");
      written[p] = true;
      auto col = out.column(p);
      for (std::size_t c = 0; c < channels; ++c) {
        col[c] = static_cast<float>(g.features(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(j)));
      }
    }
  }
  for (std::size_t p = 0; p < n; ++p) {
    if (!written[p]) throw PartitionError("assemble: position " + std::to_string(p) + " missing");
  }
  return from_matrix(out, height, width);
}

}  // namespace mst
