#pragma once

#include <string>

#include "tbsim/dynamics.hpp"
#include "tbsim/franson.hpp"

namespace tbsim {

// Fixed 12-significant-digit formatting used in all CSV output.
std::string format_number(double v);

// Writes via a temp file + rename so readers never see partial output.
void write_file_atomic(const std::string& path, const std::string& content);

std::string trace_to_csv(const DynamicsTrace& trace);
std::string franson_to_csv(const FransonResult& result);

} // namespace tbsim
