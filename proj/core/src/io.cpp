#include "chl/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace chl {

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

std::string format_scale(std::int32_t scale) {
  if (scale == kScaleMin) return "min";
  if (scale == kScaleOver) return "over";
  return std::to_string(scale);
}

std::int32_t parse_scale(std::string_view field) {
  if (field == "min") return kScaleMin;
  if (field == "over") return kScaleOver;
  std::int32_t value = 0;
  const auto res = std::from_chars(field.data(), field.data() + field.size(), value);
  if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
    throw std::runtime_error("trace CSV: bad scale field '" + std::string(field) + "'");
  }
  return value;
}

double parse_double(std::string_view field, const char* what) {
  double value = 0.0;
  const auto res = std::from_chars(field.data(), field.data() + field.size(), value);
  if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
    throw std::runtime_error(std::string("trace CSV: bad ") + what + " field '" +
                             std::string(field) + "'");
  }
  return value;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

}  // namespace

std::string trace_to_csv(const Trace& trace) {
  std::string out = "k,x,L,R,scale,push_R,push_L\n";
  for (std::size_t i = 0; i < trace.ks.size(); ++i) {
    const std::uint64_t k = trace.ks[i];
    out += std::to_string(k);
    out += ',';
    out += format_double(trace.attachments[k - 1]);
    out += ',';
    out += format_double(trace.left[i]);
    out += ',';
    out += format_double(trace.right[i]);
    out += ',';
    out += format_scale(trace.scales[i]);
    out += ',';
    out += format_double(trace.push_right[i]);
    out += ',';
    out += format_double(trace.push_left[i]);
    out += '\n';
  }
  return out;
}

Trace trace_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "k,x,L,R,scale,push_R,push_L") {
    throw std::runtime_error("trace CSV: missing or unexpected header");
  }
  Trace trace;
  trace.stride = 1;
  std::uint64_t expected_k = 1;
  bool n_known = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != 7) {
      throw std::runtime_error("trace CSV: expected 7 fields per row");
    }
    const auto k = static_cast<std::uint64_t>(parse_double(fields[0], "k"));
    if (k != expected_k) {
      throw std::runtime_error(
          "trace CSV: rows must cover every step (k = 1, 2, ...); "
          "thinned traces cannot be replayed");
    }
    ++expected_k;
    trace.ks.push_back(k);
    trace.attachments.push_back(parse_double(fields[1], "x"));
    trace.left.push_back(parse_double(fields[2], "L"));
    trace.right.push_back(parse_double(fields[3], "R"));
    trace.scales.push_back(parse_scale(fields[4]));
    trace.push_right.push_back(parse_double(fields[5], "push_R"));
    trace.push_left.push_back(parse_double(fields[6], "push_L"));
    if (!n_known) {
      // Step 1 has L = 1/sqrt(n) exactly; recover n from it.
      const double h = trace.left[0];
      trace.n = static_cast<std::uint64_t>(std::llround(1.0 / (h * h)));
      n_known = true;
    }
  }
  if (trace.attachments.empty()) throw std::runtime_error("trace CSV: no rows");
  return trace;
}

std::string envelope_to_csv(const EnvelopePolyline& env) {
  std::string out = "s,re,im\n";
  for (std::size_t i = 0; i < env.points.size(); ++i) {
    out += format_double(env.s[i]);
    out += ',';
    out += format_double(env.points[i].real());
    out += ',';
    out += format_double(env.points[i].imag());
    out += '\n';
  }
  return out;
}

std::string scales_to_csv(std::span<const ScalePushStat> stats) {
  std::string out = "j,count,mean,predicted_lo,predicted_hi,predicted_var_bound\n";
  for (const auto& s : stats) {
    out += std::to_string(s.j);
    out += ',';
    out += std::to_string(s.count);
    out += ',';
    out += format_double(s.mean);
    out += ',';
    out += format_double(s.predicted_lo);
    out += ',';
    out += format_double(s.predicted_hi);
    out += ',';
    out += format_double(s.predicted_var_bound);
    out += '\n';
  }
  return out;
}

std::string discrepancy_to_csv(std::span<const DiscrepancyRow> rows) {
  std::string out = "z_re,z_im,phi_minus_f,f_minus_id\n";
  for (const auto& row : rows) {
    out += format_double(row.z.real());
    out += ',';
    out += format_double(row.z.imag());
    out += ',';
    out += format_double(row.phi_minus_f);
    out += ',';
    out += format_double(row.f_minus_id);
    out += '\n';
  }
  return out;
}

std::string disc_trace_to_csv(std::span<const DiscTraceRow> rows) {
  std::string out = "k,theta,arc_lo,arc_hi\n";
  for (const auto& row : rows) {
    out += std::to_string(row.k);
    out += ',';
    out += format_double(row.theta);
    out += ',';
    out += format_double(row.arc_lo);
    out += ',';
    out += format_double(row.arc_hi);
    out += '\n';
  }
  return out;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace chl
