#include "couplekit/core/json_util.hpp"

#include "couplekit/core/errors.hpp"

namespace couplekit::core {

Eigen::VectorXd vector_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw IoError("expected a JSON array of numbers");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  Eigen::Index i = 0;
  for (const auto& e : j) v[i++] = e.get<double>();
  return v;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw IoError("expected a JSON array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  if (rows == 0) return Eigen::MatrixXd(0, 0);
  const auto cols = static_cast<Eigen::Index>(j.front().size());
  Eigen::MatrixXd m(rows, cols);
  Eigen::Index r = 0;
  for (const auto& row : j) {
    if (static_cast<Eigen::Index>(row.size()) != cols) {
      throw IoError("ragged JSON matrix");
    }
    Eigen::Index c = 0;
    for (const auto& e : row) m(r, c++) = e.get<double>();
    ++r;
  }
  return m;
}

}  // namespace couplekit::core
