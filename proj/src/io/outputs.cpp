// Copyright 2026 The ZMS Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "outputs.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <openssl/evp.h>

namespace zms {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  return out;
}

void header(std::ostream& out, const std::vector<std::string>& columns) {
  for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << columns[i];
  out << '\n';
}

void finish(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw IoError("write failed for '" + path + "'");
}

void check_finite(double v, const std::string& path) {
  if (!std::isfinite(v)) throw NumericalError("refusing to write a non-finite value to '" + path + "'");
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

struct CsvTable {
  std::vector<std::vector<std::string>> rows;
};

CsvTable read_table(const std::string& path, const std::vector<std::string>& columns) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw IoError(path + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto head = split(line);
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i >= head.size()) throw IoError(path + ": missing column '" + columns[i] + "'");
    if (head[i] != columns[i])
      throw IoError(path + ": column " + std::to_string(i + 1) + " is '" + head[i] + "', expected '" + columns[i] + "'");
  }
  if (head.size() > columns.size()) throw IoError(path + ": unexpected column '" + head[columns.size()] + "'");
  CsvTable table;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = split(line);
    if (cells.size() != columns.size())
      throw IoError(path + ": line " + std::to_string(lineno) + " has " + std::to_string(cells.size()) +
                    " fields, expected " + std::to_string(columns.size()));
    table.rows.push_back(std::move(cells));
  }
  return table;
}

double parse_double(const std::string& cell, const std::string& path, const std::string& column) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(cell, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != cell.size() || cell.empty()) throw IoError(path + ": bad number '" + cell + "' in column '" + column + "'");
  return v;
}

}  // namespace

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

double intensity_normalization(const std::vector<RetrievedTrace>& traces) {
  if (traces.empty()) return 1.0;
  double m = 0.0;
  for (double v : traces.front().intensity) m = std::max(m, v);
  return m > 0.0 ? 1.0 / m : 1.0;
}

std::vector<RetrievedTrace> normalized(std::vector<RetrievedTrace> traces, double scale) {
  const double amp_scale = std::sqrt(scale);
  for (auto& tr : traces) {
    for (auto& a : tr.amplitude) a *= amp_scale;
    for (auto& v : tr.intensity) v *= scale;
  }
  return traces;
}

void write_traces_csv(const std::string& path, const std::vector<RetrievedTrace>& traces) {
  auto out = open_out(path);
  header(out, kTracesColumns);
  for (const auto& tr : traces) {
    const std::string ts = format_number(tr.storage_time * 1e6);
    for (std::size_t k = 0; k < tr.times.size(); ++k) {
      check_finite(tr.amplitude[k].real(), path);
      check_finite(tr.amplitude[k].imag(), path);
      check_finite(tr.intensity[k], path);
      out << ts << ',' << format_number(tr.times[k] * 1e6) << ',' << format_number(tr.amplitude[k].real()) << ','
          << format_number(tr.amplitude[k].imag()) << ',' << format_number(tr.intensity[k]) << '\n';
    }
  }
  finish(out, path);
}

void write_peaks_csv(const std::string& path, const PeakSeries& peaks) {
  auto out = open_out(path);
  header(out, kPeaksColumns);
  for (std::size_t i = 0; i < peaks.size(); ++i) {
    check_finite(peaks.peak_intensity[i], path);
    out << format_number(peaks.storage_times[i] * 1e6) << ',' << format_number(peaks.peak_time[i] * 1e6) << ','
        << format_number(peaks.peak_intensity[i]) << '\n';
  }
  finish(out, path);
}

void write_classical_csv(const std::string& path, const MomentTrajectory& trajectory) {
  auto out = open_out(path);
  header(out, kClassicalColumns);
  for (std::size_t i = 0; i < trajectory.times.size(); ++i) {
    const auto& m = trajectory.moment[i];
    for (int k = 0; k < 3; ++k) check_finite(m(k), path);
    out << format_number(trajectory.times[i] * 1e6) << ',' << format_number(m.x()) << ',' << format_number(m.y())
        << ',' << format_number(m.z()) << '\n';
  }
  finish(out, path);
}

void write_sweep_csv(const std::string& path, const std::vector<SweepRow>& rows) {
  auto out = open_out(path);
  header(out, kSweepColumns);
  for (const auto& r : rows)
    out << format_number(r.b_gauss) << ',' << format_number(r.freq_hz) << ',' << format_number(r.freq2_hz) << ','
        << format_number(r.tau_us) << ',' << r.model << '\n';
  finish(out, path);
}

std::vector<RetrievedTrace> read_traces_csv(const std::string& path) {
  const auto table = read_table(path, kTracesColumns);
  std::vector<RetrievedTrace> out;
  for (const auto& row : table.rows) {
    const double ts = parse_double(row[0], path, kTracesColumns[0]) * 1e-6;
    if (out.empty() || out.back().storage_time != ts) {
      out.emplace_back();
      out.back().storage_time = ts;
    }
    auto& tr = out.back();
    tr.times.push_back(parse_double(row[1], path, kTracesColumns[1]) * 1e-6);
    tr.amplitude.emplace_back(parse_double(row[2], path, kTracesColumns[2]), parse_double(row[3], path, kTracesColumns[3]));
    tr.intensity.push_back(parse_double(row[4], path, kTracesColumns[4]));
  }
  return out;
}

PeakSeries read_peaks_csv(const std::string& path) {
  const auto table = read_table(path, kPeaksColumns);
  PeakSeries out;
  for (const auto& row : table.rows) {
    out.storage_times.push_back(parse_double(row[0], path, kPeaksColumns[0]) * 1e-6);
    out.peak_time.push_back(parse_double(row[1], path, kPeaksColumns[1]) * 1e-6);
    out.peak_intensity.push_back(parse_double(row[2], path, kPeaksColumns[2]));
  }
  return out;
}

MomentTrajectory read_classical_csv(const std::string& path) {
  const auto table = read_table(path, kClassicalColumns);
  MomentTrajectory out;
  for (const auto& row : table.rows) {
    out.times.push_back(parse_double(row[0], path, kClassicalColumns[0]) * 1e-6);
    out.moment.emplace_back(parse_double(row[1], path, kClassicalColumns[1]),
                            parse_double(row[2], path, kClassicalColumns[2]),
                            parse_double(row[3], path, kClassicalColumns[3]));
  }
  return out;
}

std::vector<SweepRow> read_sweep_csv(const std::string& path) {
  const auto table = read_table(path, kSweepColumns);
  std::vector<SweepRow> out;
  for (const auto& row : table.rows)
    out.push_back({parse_double(row[0], path, kSweepColumns[0]), parse_double(row[1], path, kSweepColumns[1]),
                   parse_double(row[2], path, kSweepColumns[2]), parse_double(row[3], path, kSweepColumns[3]), row[4]});
  return out;
}

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for hashing");
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx) throw IoError("hash context allocation failed");
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  char buf[65536];
  while (in) {
    in.read(buf, sizeof buf);
    if (in.gcount() > 0) EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, digest, &len);
  EVP_MD_CTX_free(ctx);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return hex.str();
}

}  // namespace zms
