#pragma once

#include <string>

#include "flexnac/network.hpp"
#include "flexnac/scenario.hpp"

namespace flexnac {

/// Writes the log as CSV: header row of column names, then one row per tick.
/// Values use shortest round-trip formatting, so re-importing is bitwise
/// exact and equal runs produce byte-identical files.
void export_csv(const SimLog& log, const std::string& path);

/// Inverse of export_csv; n_joints is recovered from the e_<j> columns.
SimLog import_csv(const std::string& path);

/// Dataset CSV with columns x_0..x_{d-1}, y_0..y_{m-1}.
void save_batch_csv(const TrainBatch& batch, const std::string& path);
TrainBatch load_batch_csv(const std::string& path);

/// Network weights as a labelled text file, 17 significant digits
/// (bitwise round trip).
void save_network(const RegressorNet& net, const std::string& path);
RegressorNet load_network(const std::string& path);

} // namespace flexnac
