#pragma once

// File formats: field dumps (JSON metadata sidecar + raw little-endian
// float64 binary, row-major), CSV tables, and JSON summaries.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "csvortex/field.hpp"

namespace csvortex {

/// Write <stem>.json and <stem>.f64 next to each other.
inline void dump_field(const Field& f, const std::filesystem::path& stem,
                       const std::string& label, double epsilon) {
  nlohmann::json meta;
  meta["n"] = f.n();
  meta["label"] = label;
  meta["epsilon"] = epsilon;
  {
    std::ofstream js(stem.string() + ".json");
    js << meta.dump(2) << "\n";
  }
  std::ofstream bin(stem.string() + ".f64", std::ios::binary);
  static_assert(sizeof(double) == 8);
  bin.write(reinterpret_cast<const char*>(f.values().data()),
            static_cast<std::streamsize>(f.values().size() * sizeof(double)));
}

struct LoadedField {
  Field field;
  std::string label;
  double epsilon = 0.0;
};

inline LoadedField load_field(const std::filesystem::path& stem) {
  std::ifstream js(stem.string() + ".json");
  if (!js) throw std::runtime_error("load_field: missing " + stem.string() + ".json");
  nlohmann::json meta = nlohmann::json::parse(js);
  LoadedField out;
  out.label = meta.at("label").get<std::string>();
  out.epsilon = meta.at("epsilon").get<double>();
  const int n = meta.at("n").get<int>();
  out.field = Field(Grid(n));
  std::ifstream bin(stem.string() + ".f64", std::ios::binary);
  if (!bin) throw std::runtime_error("load_field: missing " + stem.string() + ".f64");
  bin.read(reinterpret_cast<char*>(out.field.values().data()),
           static_cast<std::streamsize>(out.field.values().size() * sizeof(double)));
  if (!bin) throw std::runtime_error("load_field: short read on " + stem.string());
  return out;
}

/// Minimal CSV writer; numbers are printed with %.17g so identical inputs
/// give byte-identical files.
class CsvWriter {
 public:
  explicit CsvWriter(const std::filesystem::path& path,
                     const std::vector<std::string>& header)
      : out_(path) {
    for (std::size_t i = 0; i < header.size(); ++i)
      out_ << (i ? "," : "") << header[i];
    out_ << "\n";
  }

  void row(const std::vector<double>& vals) {
    for (std::size_t i = 0; i < vals.size(); ++i)
      out_ << (i ? "," : "") << num(vals[i]);
    out_ << "\n";
  }

  void text_row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i)
      out_ << (i ? "," : "") << cells[i];
    out_ << "\n";
  }

  static std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
  }

 private:
  std::ofstream out_;
};

}  // namespace csvortex
