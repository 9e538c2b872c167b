#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "fpls/cgpls.hpp"
#include "fpls/fspace.hpp"

namespace fpls {

struct CsvError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Dataset file: header row with column `y` and columns x_000..x_{T-1};
// one observation per row. The grid is inferred as uniform with T columns.
Dataset read_dataset_csv(const std::filesystem::path& path);
void write_dataset_csv(const std::filesystem::path& path, const Dataset& dataset);

// Function file: header `t,value`, one grid point per row.
FunctionVec read_function_csv(const std::filesystem::path& path, const Grid& grid);
void write_function_csv(const std::filesystem::path& path, const FunctionVec& f);

void write_fit_trace_csv(const std::filesystem::path& path, const PlsFit& fit);

// key=value file; '#' starts a comment, blank lines ignored.
std::map<std::string, std::string> read_config_file(const std::filesystem::path& path);

}  // namespace fpls
