#include "flexnac/io.hpp"

#include <charconv>
#include <fstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

namespace flexnac {

namespace {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& s, const std::string& where) {
  double v = 0.0;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  const auto res = std::from_chars(begin, end, v);
  if (res.ec != std::errc{} || res.ptr != end) {
    throw std::runtime_error(where + ": bad number '" + s + "'");
  }
  return v;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  return in;
}

void write_table(std::ofstream& out, const std::vector<std::string>& columns,
                 const Matrix& data) {
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (c > 0) out << ',';
    out << columns[c];
  }
  out << '\n';
  for (Index r = 0; r < data.rows(); ++r) {
    for (Index c = 0; c < data.cols(); ++c) {
      if (c > 0) out << ',';
      out << format_double(data(r, c));
    }
    out << '\n';
  }
}

struct Table {
  std::vector<std::string> columns;
  Matrix data;
};

Table read_table(const std::string& path) {
  std::ifstream in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("empty csv: " + path);
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  Table table;
  table.columns = split_csv_line(line);
  const std::size_t cols = table.columns.size();

  std::vector<double> values;
  Index rows = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != cols) {
      throw std::runtime_error("csv row width mismatch: " + path);
    }
    for (const auto& f : fields) values.push_back(parse_double(f, path));
    ++rows;
  }
  table.data.resize(rows, static_cast<Index>(cols));
  for (Index r = 0; r < rows; ++r) {
    for (Index c = 0; c < static_cast<Index>(cols); ++c) {
      table.data(r, c) =
          values[static_cast<std::size_t>(r) * cols + static_cast<std::size_t>(c)];
    }
  }
  return table;
}

bool is_indexed_name(const std::string& name, const std::string& base) {
  if (name.size() <= base.size() + 1 || name.compare(0, base.size(), base) != 0 ||
      name[base.size()] != '_') {
    return false;
  }
  for (std::size_t i = base.size() + 1; i < name.size(); ++i) {
    if (name[i] < '0' || name[i] > '9') return false;
  }
  return true;
}

} // namespace

void export_csv(const SimLog& log, const std::string& path) {
  if (static_cast<Index>(log.columns.size()) != log.data.cols()) {
    throw std::invalid_argument("export_csv: column name/count mismatch");
  }
  std::ofstream out = open_out(path);
  write_table(out, log.columns, log.data);
  if (!out) throw std::runtime_error("write failed: " + path);
}

SimLog import_csv(const std::string& path) {
  Table table = read_table(path);
  SimLog log;
  log.columns = std::move(table.columns);
  log.data = std::move(table.data);
  log.n_joints = 0;
  for (const auto& name : log.columns) {
    if (is_indexed_name(name, "e")) ++log.n_joints;
  }
  return log;
}

void save_batch_csv(const TrainBatch& batch, const std::string& path) {
  std::vector<std::string> columns;
  for (Index c = 0; c < batch.inputs.cols(); ++c) {
    columns.push_back("x_" + std::to_string(c));
  }
  for (Index c = 0; c < batch.targets.cols(); ++c) {
    columns.push_back("y_" + std::to_string(c));
  }
  Matrix joined(batch.inputs.rows(),
                batch.inputs.cols() + batch.targets.cols());
  joined << batch.inputs, batch.targets;
  std::ofstream out = open_out(path);
  write_table(out, columns, joined);
  if (!out) throw std::runtime_error("write failed: " + path);
}

TrainBatch load_batch_csv(const std::string& path) {
  Table table = read_table(path);
  std::vector<Index> x_cols, y_cols;
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    if (is_indexed_name(table.columns[c], "x")) {
      x_cols.push_back(static_cast<Index>(c));
    } else if (is_indexed_name(table.columns[c], "y")) {
      y_cols.push_back(static_cast<Index>(c));
    }
  }
  if (x_cols.empty() || y_cols.empty()) {
    throw std::runtime_error("dataset csv needs x_* and y_* columns: " + path);
  }
  TrainBatch batch;
  batch.inputs.resize(table.data.rows(), static_cast<Index>(x_cols.size()));
  batch.targets.resize(table.data.rows(), static_cast<Index>(y_cols.size()));
  for (std::size_t c = 0; c < x_cols.size(); ++c) {
    batch.inputs.col(static_cast<Index>(c)) = table.data.col(x_cols[c]);
  }
  for (std::size_t c = 0; c < y_cols.size(); ++c) {
    batch.targets.col(static_cast<Index>(c)) = table.data.col(y_cols[c]);
  }
  return batch;
}

namespace {

void write_vector(std::ofstream& out, const char* label, const Vector& v) {
  out << label;
  for (Index i = 0; i < v.size(); ++i) out << ' ' << format_double(v[i]);
  out << '\n';
}

std::string expect_token(std::ifstream& in, const std::string& path) {
  std::string tok;
  if (!(in >> tok)) throw std::runtime_error("truncated network file: " + path);
  return tok;
}

void expect_label(std::ifstream& in, const std::string& label,
                  const std::string& path) {
  const std::string tok = expect_token(in, path);
  if (tok != label) {
    throw std::runtime_error("network file: expected '" + label + "', got '" +
                             tok + "' in " + path);
  }
}

double read_double(std::ifstream& in, const std::string& path) {
  return parse_double(expect_token(in, path), path);
}

Index read_index(std::ifstream& in, const std::string& path) {
  const auto v = static_cast<Index>(read_double(in, path));
  if (v < 0) throw std::runtime_error("network file: negative size in " + path);
  return v;
}

Vector read_vector(std::ifstream& in, Index size, const std::string& path) {
  Vector v(size);
  for (Index i = 0; i < size; ++i) v[i] = read_double(in, path);
  return v;
}

} // namespace

void save_network(const RegressorNet& net, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "flexnac-net 1\n";
  out << "dims " << net.n_joints << ' ' << net.input_dim << ' '
      << net.basis_dim << '\n';
  out << "layers " << net.layers.size() << '\n';
  for (const auto& layer : net.layers) {
    out << "layer " << layer.weight.rows() << ' ' << layer.weight.cols()
        << '\n';
    for (Index r = 0; r < layer.weight.rows(); ++r) {
      for (Index c = 0; c < layer.weight.cols(); ++c) {
        if (c > 0) out << ' ';
        out << format_double(layer.weight(r, c));
      }
      out << '\n';
    }
    write_vector(out, "bias", layer.bias);
  }
  write_vector(out, "input_mean", net.input_mean);
  write_vector(out, "input_std", net.input_std);
  write_vector(out, "a_hat", net.out.a_hat);
  if (!out) throw std::runtime_error("write failed: " + path);
}

RegressorNet load_network(const std::string& path) {
  std::ifstream in = open_in(path);
  expect_label(in, "flexnac-net", path);
  expect_label(in, "1", path);
  RegressorNet net;
  expect_label(in, "dims", path);
  net.n_joints = read_index(in, path);
  net.input_dim = read_index(in, path);
  net.basis_dim = read_index(in, path);
  expect_label(in, "layers", path);
  const Index layers = read_index(in, path);
  for (Index k = 0; k < layers; ++k) {
    expect_label(in, "layer", path);
    const Index rows = read_index(in, path);
    const Index cols = read_index(in, path);
    DenseLayer layer;
    layer.weight.resize(rows, cols);
    for (Index r = 0; r < rows; ++r) {
      for (Index c = 0; c < cols; ++c) {
        layer.weight(r, c) = read_double(in, path);
      }
    }
    expect_label(in, "bias", path);
    layer.bias = read_vector(in, rows, path);
    net.layers.push_back(std::move(layer));
  }
  expect_label(in, "input_mean", path);
  net.input_mean = read_vector(in, net.input_dim, path);
  expect_label(in, "input_std", path);
  net.input_std = read_vector(in, net.input_dim, path);
  expect_label(in, "a_hat", path);
  net.out.a_hat = read_vector(in, net.basis_dim, path);
  return net;
}

} // namespace flexnac
