#include "mcdiv/text_io.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace mcdiv {

std::string format_g(double value, int digits) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.*g", digits, value);
  return buffer;
}

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

// Parses "# key=value key=value ..." into a map.
std::map<std::string, std::string> parse_header(const std::string& line) {
  if (line.empty() || line[0] != '#') throw IoError("missing '#' header line");
  std::map<std::string, std::string> fields;
  std::istringstream words(line.substr(1));
  std::string word;
  while (words >> word) {
    const auto eq = word.find('=');
    if (eq == std::string::npos) continue;
    fields[word.substr(0, eq)] = word.substr(eq + 1);
  }
  return fields;
}

const std::string& field(const std::map<std::string, std::string>& fields,
                         const std::string& key) {
  const auto it = fields.find(key);
  if (it == fields.end()) throw IoError("header is missing '" + key + "'");
  return it->second;
}

double to_double(const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw IoError("not a number: '" + text + "'");
  }
  if (used != text.size()) throw IoError("not a number: '" + text + "'");
  return v;
}

std::vector<std::vector<double>> read_rows(std::istream& in, std::size_t columns) {
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    std::istringstream cells(line);
    std::vector<double> row;
    std::string cell;
    while (cells >> cell) row.push_back(to_double(cell));
    if (row.size() != columns) {
      throw IoError("expected " + std::to_string(columns) + " columns in '" + line + "'");
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

void write_taps(std::ostream& out, const ChannelTaps& taps) {
  taps.validate();
  out << "# Ts=" << format_g(taps.Ts) << " L=" << taps.memory()
      << " links=" << to_string(taps.layout) << " source=" << to_string(taps.source)
      << '\n';
  for (std::size_t l = 0; l < taps.own.size(); ++l) {
    out << l << ' ' << format_g(taps.own[l]);
    if (taps.layout == LinkLayout::mimo2x2) out << ' ' << format_g(taps.cross[l]);
    out << '\n';
  }
}

ChannelTaps read_taps(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty tap table");
  const auto header = parse_header(trim(line));
  ChannelTaps taps;
  taps.Ts = to_double(field(header, "Ts"));
  const int L = static_cast<int>(to_double(field(header, "L")));
  taps.layout = parse_link_layout(field(header, "links"));
  taps.source = parse_tap_source(field(header, "source"));
  const std::size_t columns = taps.layout == LinkLayout::siso ? 2 : 3;
  const auto rows = read_rows(in, columns);
  if (rows.size() != static_cast<std::size_t>(L) + 1) {
    throw IoError("tap table has " + std::to_string(rows.size()) + " rows, expected L+1");
  }
  for (std::size_t l = 0; l < rows.size(); ++l) {
    if (rows[l][0] != static_cast<double>(l)) throw IoError("tap rows out of order");
    taps.own.push_back(rows[l][1]);
    if (columns == 3) taps.cross.push_back(rows[l][2]);
  }
  taps.validate();
  return taps;
}

void write_curve(std::ostream& out, const HittingCurve& curve) {
  curve.validate();
  out << "# emitted=" << curve.emitted << " dt=" << format_g(curve.dt)
      << " mode=" << to_string(curve.layout()) << '\n';
  for (std::size_t n = 0; n < curve.times.size(); ++n) {
    out << format_g(curve.times[n], 10) << ' ' << format_g(curve.own[n], 10);
    if (!curve.cross.empty()) out << ' ' << format_g(curve.cross[n], 10);
    out << '\n';
  }
}

HittingCurve read_curve(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty hitting curve");
  const auto header = parse_header(trim(line));
  HittingCurve curve;
  curve.emitted = static_cast<std::uint64_t>(to_double(field(header, "emitted")));
  curve.dt = to_double(field(header, "dt"));
  const auto layout = parse_link_layout(field(header, "mode"));
  const std::size_t columns = layout == LinkLayout::siso ? 2 : 3;
  for (const auto& row : read_rows(in, columns)) {
    curve.times.push_back(row[0]);
    curve.own.push_back(row[1]);
    if (columns == 3) curve.cross.push_back(row[2]);
  }
  curve.validate();
  return curve;
}

void write_fit(std::ostream& out, const FitParams& params) {
  out << "b1=" << format_g(params.own.scale, 17) << '\n'
      << "b2=" << format_g(params.own.diffusion_exponent, 17) << '\n'
      << "b3=" << format_g(params.own.time_exponent, 17) << '\n';
  if (params.cross) {
    out << "b4=" << format_g(params.cross->scale, 17) << '\n'
        << "b5=" << format_g(params.cross->diffusion_exponent, 17) << '\n'
        << "b6=" << format_g(params.cross->time_exponent, 17) << '\n';
  }
  out << "residual=" << format_g(params.residual, 17) << '\n'
      << "window_begin=" << format_g(params.window_begin, 17) << '\n'
      << "window_end=" << format_g(params.window_end, 17) << '\n';
}

FitParams read_fit(std::istream& in) {
  const auto kv = read_key_values(in);
  auto number = [&](const std::string& key) { return to_double(field(kv, key)); };
  FitParams p;
  p.own = {number("b1"), number("b2"), number("b3")};
  if (kv.count("b4")) p.cross = ResponseParams{number("b4"), number("b5"), number("b6")};
  p.residual = kv.count("residual") ? number("residual") : 0.0;
  p.window_begin = kv.count("window_begin") ? number("window_begin") : 0.0;
  p.window_end = kv.count("window_end") ? number("window_end") : 0.0;
  return p;
}

std::string csv_row(const BerRecord& record, bool with_timing) {
  std::ostringstream row;
  row << record.param << ',' << format_g(record.value) << ','
      << to_string(record.config.scheme) << ',' << to_string(record.config.combiner)
      << ',' << to_string(record.config.detector) << ',';
  if (record.failed()) {
    row << "-1," << record.bits << ",," << format_g(record.molecules_per_bit) << ','
        << format_g(with_timing ? record.seconds : 0.0);
  } else {
    row << record.errors << ',' << record.bits << ',' << format_g(record.ber) << ','
        << format_g(record.molecules_per_bit) << ','
        << format_g(with_timing ? record.seconds : 0.0);
  }
  return row.str();
}

void write_results(const std::vector<BerRecord>& records,
                   const std::filesystem::path& path, bool with_timing) {
  if (records.empty()) throw InvalidArgument("no records to write");
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << kCsvHeader << '\n';
  for (const auto& r : records) out << csv_row(r, with_timing) << '\n';
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

std::map<std::string, std::string> read_key_values(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw IoError("line " + std::to_string(number) + ": expected key=value");
    }
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

}  // namespace mcdiv
