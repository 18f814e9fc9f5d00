#include "masslab/mat_json.hpp"

#include <nlohmann/json.hpp>

#include <stdexcept>

namespace masslab {

nlohmann::json matrix_to_json(const Eigen::MatrixXcd& m) {
    nlohmann::json data = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            data.push_back({m(i, j).real(), m(i, j).imag()});
        }
    }
    return nlohmann::json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

Eigen::MatrixXcd matrix_from_json(const nlohmann::json& j) {
    const auto rows = j.at("rows").get<Eigen::Index>();
    const auto cols = j.at("cols").get<Eigen::Index>();
    const auto& data = j.at("data");
    if (rows < 0 || cols < 0 || data.size() != static_cast<std::size_t>(rows * cols)) {
        throw std::invalid_argument("matrix_from_json: shape mismatch");
    }
    Eigen::MatrixXcd m(rows, cols);
    std::size_t k = 0;
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index c = 0; c < cols; ++c, ++k) {
            const auto& pair = data.at(k);
            if (pair.size() != 2) throw std::invalid_argument("matrix_from_json: bad entry");
            m(i, c) = std::complex<double>(pair.at(0).get<double>(), pair.at(1).get<double>());
        }
    }
    return m;
}

nlohmann::json vector_to_json(const Eigen::VectorXcd& v) {
    nlohmann::json data = nlohmann::json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) data.push_back({v(i).real(), v(i).imag()});
    return data;
}

Eigen::VectorXcd vector_from_json(const nlohmann::json& j) {
    Eigen::VectorXcd v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        const auto& pair = j.at(i);
        if (pair.size() != 2) throw std::invalid_argument("vector_from_json: bad entry");
        v(static_cast<Eigen::Index>(i)) =
            std::complex<double>(pair.at(0).get<double>(), pair.at(1).get<double>());
    }
    return v;
}

}  // namespace masslab
