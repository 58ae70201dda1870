#pragma once

#include <string>
#include <vector>

#include "core/network.hpp"

namespace spinn {

struct CsvTable {
  std::vector<std::string> header;  // empty when the file had no header line
  Eigen::MatrixXd values;
};

/// Parses a comma-separated numeric table. A header line is auto-detected:
/// if any token of the first line fails to parse as a number, it is treated
/// as the header.
CsvTable read_csv(const std::string& path);

/// Writes values with 17 significant digits so doubles round-trip exactly.
void write_csv(const std::string& path, const Eigen::Ref<const Eigen::MatrixXd>& values,
               const std::vector<std::string>& header = {});

std::string format_double(double v);

/// Last column is the response when with_response is set; otherwise every
/// column is a feature.
Dataset dataset_from_table(const CsvTable& table, bool with_response, Task task);

void write_dataset_csv(const std::string& path, const Dataset& data,
                       bool with_response);

}  // namespace spinn
