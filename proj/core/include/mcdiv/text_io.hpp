#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "mcdiv/channel_model.hpp"
#include "mcdiv/experiment.hpp"

namespace mcdiv {

/// Failure to read or write a results or data file.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Tap table:
//   # Ts=<s> L=<n> links=<siso|mimo2x2> source=<analytic|walked|fitted>
//   <l> <h11> [<h21>]          (6 significant digits)
void write_taps(std::ostream& out, const ChannelTaps& taps);
ChannelTaps read_taps(std::istream& in);

// Hitting curve:
//   # emitted=<n> dt=<s> mode=<siso|mimo2x2>
//   <t> <F11> [<F21>]
void write_curve(std::ostream& out, const HittingCurve& curve);
HittingCurve read_curve(std::istream& in);

// Fit parameters as key=value lines b1..b6, residual, window.
void write_fit(std::ostream& out, const FitParams& params);
FitParams read_fit(std::istream& in);

inline constexpr const char* kCsvHeader =
    "param,value,scheme,combiner,detector,errors,bits,ber,mol_per_bit,seconds";

/// One CSV row; failed cells carry errors=-1 and an empty ber.
std::string csv_row(const BerRecord& record, bool with_timing);

/// Writes header and rows, replacing `path`.
void write_results(const std::vector<BerRecord>& records,
                   const std::filesystem::path& path, bool with_timing = false);

/// Flat key=value file; '#' starts a comment, blank lines are skipped.
std::map<std::string, std::string> read_key_values(std::istream& in);

/// "%.6g"-style formatting.
std::string format_g(double value, int digits = 6);

}  // namespace mcdiv
