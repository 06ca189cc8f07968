#include "report.hpp"

#include <cmath>
#include <cstdio>

#include "tricloud/errors.hpp"

namespace tricloud::cli {
namespace {

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string cell_text(const Cell& c) {
  if (std::holds_alternative<double>(c)) return format_number(std::get<double>(c));
  if (std::holds_alternative<std::int64_t>(c)) return std::to_string(std::get<std::int64_t>(c));
  if (std::holds_alternative<std::string>(c)) return csv_escape(std::get<std::string>(c));
  return "";
}

nlohmann::json cell_json(const Cell& c) {
  if (std::holds_alternative<double>(c)) {
    const double v = std::get<double>(c);
    if (std::isfinite(v)) return v;
    return format_number(v);
  }
  if (std::holds_alternative<std::int64_t>(c)) return std::get<std::int64_t>(c);
  if (std::holds_alternative<std::string>(c)) return std::get<std::string>(c);
  return nullptr;
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

void Table::add_row(std::vector<Cell> row) {
  if (row.size() != columns.size()) throw ParameterError("report row has wrong number of cells");
  rows.push_back(std::move(row));
}

std::string Table::to_csv() const {
  std::string out;
  for (std::size_t i = 0; i < columns.size(); ++i) out += (i ? "," : "") + csv_escape(columns[i]);
  out += '\n';
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) out += (i ? "," : "") + cell_text(r[i]);
    out += '\n';
  }
  return out;
}

nlohmann::json Table::to_json() const {
  auto arr = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json obj = nlohmann::json::object();
    for (std::size_t i = 0; i < r.size(); ++i) obj[columns[i]] = cell_json(r[i]);
    arr.push_back(std::move(obj));
  }
  return arr;
}

const std::vector<std::string>& eval_columns() {
  static const std::vector<std::string> cols{
      "sequence",          "frames",           "step_motion",      "step_color_intra", "step_color_inter",
      "tri_psnr_g",        "tri_psnr_y",       "tri_psnr_u",       "tri_psnr_v",       "proj_psnr_y",
      "proj_psnr_u",       "proj_psnr_v",      "match_psnr_g",     "match_psnr_y",     "transform_psnr_g",
      "transform_psnr_y",  "transform_psnr_u", "transform_psnr_v", "bits",             "mbps",
      "bpv"};
  return cols;
}

const std::vector<std::string>& encode_frame_columns() {
  static const std::vector<std::string> cols{"gof",          "frame",       "type",
                                              "geometry_bits", "color_bits", "voxels",
                                              "transform_psnr_g", "transform_psnr_y"};
  return cols;
}

}  // namespace tricloud::cli
