#include "mbtl/io.hpp"

#include <json.hpp>

#include <fstream>
#include <stdexcept>

namespace mbtl {

using nlohmann::json;

TransferMatrix load_transfer_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
  if (!doc.is_object()) throw std::runtime_error(path + ": expected a JSON object");
  if (doc.value("schema_version", 0) != 1)
    throw std::runtime_error(path + ": unsupported schema_version");

  TransferMatrix m;
  m.name = doc.value("name", "");
  m.normalized = doc.value("normalized", false);
  m.grid.dims = doc.at("dims").get<std::vector<int>>();
  m.grid.contexts = doc.at("contexts").get<std::vector<std::vector<double>>>();
  m.grid.validate();

  const auto& trials = doc.at("trials");
  if (!trials.is_array() || trials.empty())
    throw std::runtime_error(path + ": trials must be a non-empty array");
  const int n = m.grid.num_tasks();
  for (std::size_t t = 0; t < trials.size(); ++t) {
    const auto& rows = trials[t];
    if (static_cast<int>(rows.size()) != n)
      throw std::runtime_error(path + ": trial " + std::to_string(t) + " has wrong row count");
    Matrix mat(n, n);
    for (int i = 0; i < n; ++i) {
      const auto& row = rows[static_cast<std::size_t>(i)];
      if (static_cast<int>(row.size()) != n)
        throw std::runtime_error(path + ": trial " + std::to_string(t) + ", row " +
                                 std::to_string(i) + " has wrong length");
      for (int j = 0; j < n; ++j) mat(i, j) = row[static_cast<std::size_t>(j)].get<double>();
    }
    m.trials.push_back(std::move(mat));
  }
  m.validate();
  return m;
}

void save_transfer_matrix(const TransferMatrix& matrix, const std::string& path) {
  matrix.validate();
  json doc;
  doc["schema_version"] = 1;
  doc["name"] = matrix.name;
  doc["dims"] = matrix.grid.dims;
  doc["contexts"] = matrix.grid.contexts;
  doc["normalized"] = matrix.normalized;
  json trials = json::array();
  const int n = matrix.grid.num_tasks();
  for (const Matrix& t : matrix.trials) {
    json rows = json::array();
    for (int i = 0; i < n; ++i) {
      json row = json::array();
      for (int j = 0; j < n; ++j) row.push_back(t(i, j));
      rows.push_back(std::move(row));
    }
    trials.push_back(std::move(rows));
  }
  doc["trials"] = std::move(trials);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << doc.dump() << "\n";
}

}  // namespace mbtl
