#include "core/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace spinn {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> tokens;
  std::string token;
  std::istringstream stream(line);
  while (std::getline(stream, token, ',')) tokens.push_back(trim(token));
  if (!line.empty() && line.back() == ',') tokens.push_back("");
  return tokens;
}

bool parse_double(const std::string& token, double& out) {
  if (token.empty()) return false;
  char* end = nullptr;
  out = std::strtod(token.c_str(), &end);
  return end == token.c_str() + token.size();
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open " + path);

  std::vector<std::vector<double>> rows;
  CsvTable table;
  std::string line;
  long line_no = 0;
  long n_cols = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::vector<std::string> tokens = split_line(line);
    std::vector<double> row(tokens.size());
    bool numeric = true;
    for (std::size_t j = 0; j < tokens.size(); ++j) {
      if (!parse_double(tokens[j], row[j])) {
        numeric = false;
        break;
      }
    }
    if (!numeric) {
      if (line_no == 1) {
        table.header = tokens;
        continue;
      }
      std::ostringstream msg;
      msg << path << ": non-numeric value on line " << line_no;
      throw Error(ErrorKind::format, msg.str());
    }
    if (n_cols < 0) {
      n_cols = static_cast<long>(row.size());
    } else if (static_cast<long>(row.size()) != n_cols) {
      std::ostringstream msg;
      msg << path << ": line " << line_no << " has " << row.size()
          << " columns, expected " << n_cols;
      throw Error(ErrorKind::format, msg.str());
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error(ErrorKind::format, path + ": no data rows");

  table.values.resize(static_cast<long>(rows.size()), n_cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (long j = 0; j < n_cols; ++j) {
      table.values(static_cast<long>(i), j) = rows[i][static_cast<std::size_t>(j)];
    }
  }
  return table;
}

void write_csv(const std::string& path, const Eigen::Ref<const Eigen::MatrixXd>& values,
               const std::vector<std::string>& header) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::io, "cannot write " + path);
  if (!header.empty()) {
    if (static_cast<long>(header.size()) != values.cols()) {
      throw Error(ErrorKind::argument, "header size does not match column count");
    }
    for (std::size_t j = 0; j < header.size(); ++j) {
      if (j) out << ',';
      out << header[j];
    }
    out << '\n';
  }
  for (long i = 0; i < values.rows(); ++i) {
    for (long j = 0; j < values.cols(); ++j) {
      if (j) out << ',';
      out << format_double(values(i, j));
    }
    out << '\n';
  }
  if (!out) throw Error(ErrorKind::io, "failed while writing " + path);
}

Dataset dataset_from_table(const CsvTable& table, bool with_response, Task task) {
  Dataset data;
  data.task = task;
  const long n = table.values.rows();
  const long cols = table.values.cols();
  if (with_response) {
    if (cols < 2) {
      throw Error(ErrorKind::format, "expected at least one feature column plus a response");
    }
    data.features = table.values.leftCols(cols - 1);
    data.responses = table.values.col(cols - 1);
  } else {
    data.features = table.values;
    data.responses = Eigen::VectorXd::Zero(n);
  }
  if (with_response) {
    data.validate();
  } else {
    // feature-only input still has to be finite
    for (long i = 0; i < data.features.rows(); ++i) {
      for (long j = 0; j < data.features.cols(); ++j) {
        if (!std::isfinite(data.features(i, j))) {
          std::ostringstream msg;
          msg << "non-finite feature value at row " << i << " column " << j;
          throw Error(ErrorKind::argument, msg.str());
        }
      }
    }
  }
  return data;
}

void write_dataset_csv(const std::string& path, const Dataset& data,
                       bool with_response) {
  std::vector<std::string> header;
  const long p = data.p();
  for (long j = 0; j < p; ++j) header.push_back("x" + std::to_string(j + 1));
  if (with_response) {
    header.push_back("y");
    Eigen::MatrixXd values(data.n(), p + 1);
    values.leftCols(p) = data.features;
    values.col(p) = data.responses;
    write_csv(path, values, header);
  } else {
    write_csv(path, data.features, header);
  }
}

}  // namespace spinn
