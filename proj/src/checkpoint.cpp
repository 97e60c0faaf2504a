#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "rewire/gnn.hpp"

namespace rewire {

namespace {

constexpr const char* kFormat = "rewire-qnet";
constexpr int kVersion = 1;

nlohmann::json tensor_to_json(const Eigen::MatrixXd& m) {
  nlohmann::json data = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

void tensor_from_json(const nlohmann::json& j, const std::string& name, Eigen::MatrixXd& m) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  if (rows != m.rows() || cols != m.cols()) {
    throw std::runtime_error("checkpoint: tensor '" + name + "' has shape " + std::to_string(rows) + "x" +
                             std::to_string(cols) + ", expected " + std::to_string(m.rows()) + "x" +
                             std::to_string(m.cols()));
  }
  const auto& data = j.at("data");
  if (static_cast<Eigen::Index>(data.size()) != rows * cols) {
    throw std::runtime_error("checkpoint: tensor '" + name + "' has wrong element count");
  }
  std::size_t k = 0;
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = data[k++].get<double>();
  }
}

}  // namespace

void save_checkpoint(const ModelParams& p, std::ostream& out) {
  nlohmann::json j;
  j["format"] = kFormat;
  j["version"] = kVersion;
  j["embedding_dim"] = p.embedding_dim;
  j["rounds"] = p.rounds;
  j["feature_dim"] = kFeatureDim;
  j["hidden_dim"] = kHiddenDim;
  for (const auto& [name, m] : p.learnables()) j["tensors"][name] = tensor_to_json(*m);
  for (const auto& [name, m] : p.buffers()) j["buffers"][name] = tensor_to_json(*m);
  out << j.dump() << '\n';
  if (!out) throw std::runtime_error("checkpoint: write failed");
}

ModelParams load_checkpoint(std::istream& in) {
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("checkpoint: malformed JSON: ") + e.what());
  }
  if (j.value("format", std::string()) != kFormat) throw std::runtime_error("checkpoint: unrecognised format");
  if (j.value("version", 0) != kVersion) throw std::runtime_error("checkpoint: unsupported version");
  if (j.value("feature_dim", 0) != kFeatureDim || j.value("hidden_dim", 0) != kHiddenDim) {
    throw std::runtime_error("checkpoint: feature/hidden width mismatch");
  }
  ModelParams p = init_params(j.at("embedding_dim").get<int>(), j.at("rounds").get<int>(), 0);
  for (auto& [name, m] : p.learnables()) tensor_from_json(j.at("tensors").at(name), name, *m);
  for (auto& [name, m] : p.buffers()) tensor_from_json(j.at("buffers").at(name), name, *m);
  return p;
}

void save_checkpoint_file(const ModelParams& p, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  save_checkpoint(p, out);
}

ModelParams load_checkpoint_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("missing checkpoint " + path);
  return load_checkpoint(in);
}

}  // namespace rewire
