#pragma once

// Plain-text problem instance format.
//
//   # ampcs-instance 1
//   M <rows>
//   N <cols>
//   sigma_x2 <value>
//   gamma0 <value> | <value_1> ... <value_N>
//   sigma_w2 <value>
//   seed <unsigned>
//   A
//   <N comma-separated entries>        (M lines)
//   x
//   <re>,<im>                           (N lines)
//   w
//   <re>,<im>                           (M lines)
//   y
//   <re>,<im>                           (M lines)
//
// Blank lines and lines starting with '#' are ignored. Numbers are written in
// shortest round-trip form so a write/read cycle is exact.

#include <iosfwd>
#include <stdexcept>
#include <string>

#include "ampcs/model.hpp"

namespace ampcs {

class InstanceFormatError : public std::runtime_error {
 public:
  InstanceFormatError(int line, const std::string& message);
  int line() const { return line_; }

 private:
  int line_;
};

void write_instance(const ProblemInstance& instance, std::ostream& out);

/// Throws InstanceFormatError carrying the 1-based offending line.
ProblemInstance read_instance(std::istream& in);

ProblemInstance load_instance(const std::string& path);
void save_instance(const ProblemInstance& instance, const std::string& path);

}  // namespace ampcs
