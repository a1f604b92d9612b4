#include "core/persist.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "core/errors.hpp"

namespace magweyl {

namespace fs = std::filesystem;

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string plot_curve(const std::vector<RemainderRecord>& records, double RemainderRecord::*y) {
  std::string out = "# h value\n";
  for (const auto& r : records) out += format_double(r.h) + " " + format_double(r.*y) + "\n";
  return out;
}

}  // namespace

std::string records_csv(const std::vector<RemainderRecord>& records) {
  std::ostringstream os;
  os << kRecordsHeader << "\n";
  for (const auto& r : records) {
    os << format_double(r.h) << ',' << format_double(r.mu) << ',' << r.n << ',' << r.N << ','
       << csv_field(r.method) << ',' << format_double(r.numeric) << ',' << format_double(r.principal) << ','
       << format_double(r.R) << ',' << format_double(r.relative) << ',' << format_double(r.quad_error) << ','
       << format_double(r.mu1_star) << ',' << format_double(r.mu2_star) << ','
       << format_double(r.condition_margin) << ',' << (r.condition_met ? "true" : "false") << ','
       << (r.quad_flag ? "true" : "false") << ',' << csv_field(r.note) << "\n";
  }
  return os.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open for writing: " + path, path);
  f << text;
  f.flush();
  if (!f) throw IoError("write failed: " + path, path);
}

std::string read_text(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open for reading: " + path, path);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

void write_records_csv(const std::vector<RemainderRecord>& records, const std::string& path) {
  write_text(path, records_csv(records));
}

std::string run_id(const SweepSpec& spec) {
  std::uint64_t hash = 14695981039346656037ull;
  for (unsigned char c : to_json(spec).dump()) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

Json run_json(const SweepOutput& out) {
  Json records = Json::array();
  for (const auto& r : out.records) records.push_back(to_json(r));
  Json j{{"run_id", run_id(out.spec)},
         {"scenario", out.spec.scenario},
         {"spec", to_json(out.spec)},
         {"records", records},
         {"wall_seconds", out.wall_seconds},
         {"total_wall_seconds", out.total_wall_seconds}};
  j["fit"] = out.fit ? to_json(*out.fit) : Json(nullptr);
  if (!out.fit_error.empty()) j["fit_error"] = out.fit_error;
  return j;
}

void persist_sweep(const SweepOutput& out, const std::string& dir) {
  std::error_code ec;
  fs::create_directories(fs::path(dir) / "plotdata", ec);
  if (ec) throw IoError("cannot create directory " + dir + ": " + ec.message(), dir);
  const fs::path root(dir);
  write_records_csv(out.records, (root / "records.csv").string());

  Json fits{{"run_id", run_id(out.spec)}, {"scenario", out.spec.scenario},
            {"regime", regime_name(out.spec.regime)}, {"kappa", out.spec.effective_kappa()}};
  fits["fit"] = out.fit ? to_json(*out.fit) : Json(nullptr);
  if (!out.fit_error.empty()) fits["fit_error"] = out.fit_error;
  write_text((root / "fits.json").string(), fits.dump(2) + "\n");
  write_text((root / "run.json").string(), run_json(out).dump(2) + "\n");

  const fs::path plot = root / "plotdata";
  write_text((plot / "remainder.dat").string(), plot_curve(out.records, &RemainderRecord::R));
  write_text((plot / "relative.dat").string(), plot_curve(out.records, &RemainderRecord::relative));
  write_text((plot / "numeric.dat").string(), plot_curve(out.records, &RemainderRecord::numeric));
  write_text((plot / "principal.dat").string(), plot_curve(out.records, &RemainderRecord::principal));
  if (out.fit) {
    std::string fit = "# h fitted_R\n";
    for (const auto& r : out.records)
      fit += format_double(r.h) + " " +
             format_double(std::exp(out.fit->intercept + out.fit->slope * std::log(1.0 / r.h))) + "\n";
    write_text((plot / "fit.dat").string(), fit);
  }
}

std::vector<RemainderRecord> read_records_json(const std::string& path) {
  Json j;
  try {
    j = Json::parse(read_text(path));
  } catch (const Json::parse_error& e) {
    throw IoError("malformed JSON in " + path + ": " + e.what(), path);
  }
  if (!j.is_object() || !j.contains("records") || !j["records"].is_array())
    throw IoError("no records array in " + path, path);
  std::vector<RemainderRecord> out;
  for (std::size_t i = 0; i < j["records"].size(); ++i)
    out.push_back(record_from_json(j["records"][i], "records[" + std::to_string(i) + "]"));
  return out;
}

}  // namespace magweyl
