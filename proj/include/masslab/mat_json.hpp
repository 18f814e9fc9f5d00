// Matrix exchange format: row-major [re, im] pairs in JSON arrays.
#pragma once

#include <Eigen/Dense>

#include <nlohmann/json_fwd.hpp>

namespace masslab {

// {"rows": r, "cols": c, "data": [[re, im], ...]} with data row-major.
nlohmann::json matrix_to_json(const Eigen::MatrixXcd& m);
Eigen::MatrixXcd matrix_from_json(const nlohmann::json& j);

nlohmann::json vector_to_json(const Eigen::VectorXcd& v);
Eigen::VectorXcd vector_from_json(const nlohmann::json& j);

}  // namespace masslab
