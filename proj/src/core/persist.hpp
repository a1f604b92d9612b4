#pragma once

#include <string>
#include <vector>

#include "core/experiments.hpp"
#include "core/json_io.hpp"

namespace magweyl {

// Shortest decimal string that reads back to the same double.
std::string format_double(double v);

inline constexpr const char* kRecordsHeader =
    "h,mu,n,N,method,numeric,principal,R,relative,quad_error,mu1_star,mu2_star,condition_margin,condition_met,"
    "quad_flag,note";

std::string records_csv(const std::vector<RemainderRecord>& records);
void write_records_csv(const std::vector<RemainderRecord>& records, const std::string& path);

// 16 hex digits of FNV-1a over the canonical spec dump.
std::string run_id(const SweepSpec& spec);

struct SweepOutput {
  SweepSpec spec;
  std::vector<RemainderRecord> records;
  std::optional<FitResult> fit;
  std::string fit_error;  // why no fit was produced
  std::vector<double> wall_seconds;
  double total_wall_seconds = 0.0;
};

Json run_json(const SweepOutput& out);

// records.csv, fits.json, run.json and plotdata/<curve>.dat under `dir`
// (created if missing).
void persist_sweep(const SweepOutput& out, const std::string& dir);

void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

// Records from a run.json written by persist_sweep.
std::vector<RemainderRecord> read_records_json(const std::string& path);

}  // namespace magweyl
