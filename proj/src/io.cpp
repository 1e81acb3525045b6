#include "maxstab/io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>

#include "maxstab/errors.hpp"

namespace maxstab {

namespace {

bool read_line(std::istream& in, std::string& line) {
  if (!std::getline(in, line)) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

std::int64_t parse_int(std::string_view text) {
  std::int64_t value = 0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    throw ValidationError("expected an integer, got '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view text) {
  double value = 0.0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    throw ValidationError("expected a number, got '" + std::string(text) + "'");
  }
  return value;
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back().push_back('"');
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back().push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else {
      fields.back().push_back(c);
    }
  }
  if (quoted) throw ValidationError("unterminated quote in CSV line");
  return fields;
}

std::string csv_field(std::string_view text) {
  if (text.find_first_of(",\"") == std::string_view::npos) return std::string(text);
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

void write_dataset_csv(std::ostream& out, const Dataset& ds) {
  out << "d,n,model,alpha_true\n";
  out << ds.d << ',' << ds.n << ',' << to_string(ds.model) << ',' << format_double(ds.alpha_true) << '\n';
  out << "obs,partition";
  for (int j = 1; j <= ds.d; ++j) out << ",x" << j;
  out << '\n';
  for (std::size_t i = 0; i < ds.observations.size(); ++i) {
    const auto& obs = ds.observations[i];
    out << i << ',' << csv_field(obs.partition.to_string());
    for (double v : obs.maxima) out << ',' << format_double(v);
    out << '\n';
  }
}

Dataset read_dataset_csv(std::istream& in) {
  std::string line;
  if (!read_line(in, line) || split_csv_line(line) != std::vector<std::string>{"d", "n", "model", "alpha_true"}) {
    throw ValidationError("dataset CSV must start with header d,n,model,alpha_true");
  }
  if (!read_line(in, line)) throw ValidationError("dataset CSV is missing its metadata row");
  const auto meta = split_csv_line(line);
  if (meta.size() != 4) throw ValidationError("dataset metadata row needs 4 fields");
  Dataset ds;
  ds.d = static_cast<int>(parse_int(meta[0]));
  ds.n = parse_int(meta[1]);
  ds.model = parse_model_tag(meta[2]);
  ds.alpha_true = parse_double(meta[3]);
  if (ds.d < 1 || ds.d > kMaxDim) throw ValidationError("dataset dimension must lie in [1, 64]");

  if (!read_line(in, line)) throw ValidationError("dataset CSV is missing its observation header");
  const auto header = split_csv_line(line);
  if (header.size() != static_cast<std::size_t>(ds.d) + 2 || header[0] != "obs" || header[1] != "partition") {
    throw ValidationError("observation header must be obs,partition,x1..xd");
  }
  while (read_line(in, line)) {
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      throw ValidationError("observation row has " + std::to_string(fields.size()) + " fields, expected " +
                            std::to_string(header.size()));
    }
    MaxBlockObservation obs{{}, Partition::parse(fields[1]), ds.n};
    for (std::size_t j = 2; j < fields.size(); ++j) obs.maxima.push_back(parse_double(fields[j]));
    ds.observations.push_back(std::move(obs));
  }
  ds.validate();
  return ds;
}

void save_dataset(const std::string& path, const Dataset& ds) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open '" + path + "' for writing");
  write_dataset_csv(out, ds);
  if (!out) throw ValidationError("failed writing '" + path + "'");
}

Dataset load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  return read_dataset_csv(in);
}

}  // namespace maxstab
