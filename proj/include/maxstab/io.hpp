#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "maxstab/samplers.hpp"

namespace maxstab {

/// Shortest decimal representation that parses back to the same double.
std::string format_double(double value);
double parse_double(std::string_view text);

/// Splits one CSV line, honouring double-quoted fields.
std::vector<std::string> split_csv_line(std::string_view line);
/// Quotes a field if it contains a comma or a quote.
std::string csv_field(std::string_view text);

/// Dataset file layout:
///
///   d,n,model,alpha_true
///   6,100,logistic,0.7
///   obs,partition,x1,...,xd
///   0,"1,2|3|4|5|6",0.81,...
///
/// Maxima are written in shortest round-trip form, so read(write(ds)) == ds.
void write_dataset_csv(std::ostream& out, const Dataset& ds);
Dataset read_dataset_csv(std::istream& in);

void save_dataset(const std::string& path, const Dataset& ds);
Dataset load_dataset(const std::string& path);

}  // namespace maxstab
