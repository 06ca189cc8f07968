#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

namespace tricloud::cli {

// Empty, real, integer or text cell. Reals print with 6 decimals and
// infinities as "inf".
using Cell = std::variant<std::monostate, double, std::int64_t, std::string>;

std::string format_number(double v);

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add_row(std::vector<Cell> row);
  std::string to_csv() const;
  nlohmann::json to_json() const;  // array of objects; infinities become "inf"
};

// One row per (sequence, step_motion, step_color_intra, step_color_inter).
const std::vector<std::string>& eval_columns();
// One row per coded frame.
const std::vector<std::string>& encode_frame_columns();

}  // namespace tricloud::cli
