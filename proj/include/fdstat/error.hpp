#pragma once

#include <stdexcept>
#include <string>

namespace fdstat {

enum class Errc {
  invalid_argument,
  invalid_grid,
  incompatible_grid,
  empty_sample,
  insufficient_sample,
  rank_deficient,
  invalid_basis,
  degenerate_scaling,
  degenerate_data,
  rank,
  selection,
  divergent_series,
  parse,
  usage,
};

const char* to_string(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace fdstat
