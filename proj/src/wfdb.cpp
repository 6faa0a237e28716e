#include "heartid/wfdb.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "heartid/errors.hpp"
#include "heartid/textio.hpp"

namespace heartid {

namespace {

int to_signed12(int raw) { return raw >= 2048 ? raw - 4096 : raw; }
int to_unsigned12(int s) {
  if (s < -2048 || s > 2047) throw DataError("format 212 sample out of 12-bit range");
  return s < 0 ? s + 4096 : s;
}

std::vector<std::uint8_t> read_binary_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("missing signal file: " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return bytes;
}

}  // namespace

void EcgRecord::validate() const {
  if (sampling_rate_hz <= 0) throw std::invalid_argument("sampling_rate_hz must be > 0");
  if (samples_mv.empty()) throw std::invalid_argument("record has no samples");
  for (double v : samples_mv)
    if (!std::isfinite(v)) throw std::invalid_argument("record contains non-finite sample");
}

std::vector<std::uint8_t> pack212(std::span<const int> samples) {
  std::vector<std::uint8_t> out;
  out.reserve((samples.size() + 1) / 2 * 3);
  for (std::size_t i = 0; i < samples.size(); i += 2) {
    int a = to_unsigned12(samples[i]);
    int b = (i + 1 < samples.size()) ? to_unsigned12(samples[i + 1]) : 0;
    out.push_back(static_cast<std::uint8_t>(a & 0xff));
    out.push_back(static_cast<std::uint8_t>(((b >> 8) << 4) | (a >> 8)));
    out.push_back(static_cast<std::uint8_t>(b & 0xff));
  }
  return out;
}

std::vector<int> unpack212(std::span<const std::uint8_t> bytes, std::size_t count) {
  if (bytes.size() < (count + 1) / 2 * 3)
    throw DataError("truncated format 212 signal file");
  std::vector<int> out;
  out.reserve(count);
  for (std::size_t i = 0; out.size() < count; i += 3) {
    int a = ((bytes[i + 1] & 0x0f) << 8) | bytes[i];
    out.push_back(to_signed12(a));
    if (out.size() < count) {
      int b = ((bytes[i + 1] & 0xf0) << 4) | bytes[i + 2];
      out.push_back(to_signed12(b));
    }
  }
  return out;
}

std::vector<std::uint8_t> pack16(std::span<const int> samples) {
  std::vector<std::uint8_t> out;
  out.reserve(samples.size() * 2);
  for (int s : samples) {
    if (s < -32768 || s > 32767) throw DataError("format 16 sample out of range");
    std::uint16_t u = static_cast<std::uint16_t>(s);
    out.push_back(static_cast<std::uint8_t>(u & 0xff));
    out.push_back(static_cast<std::uint8_t>(u >> 8));
  }
  return out;
}

std::vector<int> unpack16(std::span<const std::uint8_t> bytes, std::size_t count) {
  if (bytes.size() < count * 2) throw DataError("truncated format 16 signal file");
  std::vector<int> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::uint16_t u = static_cast<std::uint16_t>(bytes[2 * i]) |
                      (static_cast<std::uint16_t>(bytes[2 * i + 1]) << 8);
    out.push_back(static_cast<std::int16_t>(u));
  }
  return out;
}

WfdbHeader parse_wfdb_header(const std::string& header_text) {
  WfdbHeader h;
  std::istringstream in(header_text);
  std::string line;
  bool have_record_line = false;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    if (!have_record_line) {
      ls >> h.record_name >> h.n_signals >> h.sampling_rate_hz;
      std::size_t nsamp = 0;
      if (ls >> nsamp) h.n_samples = nsamp;
      if (h.record_name.empty() || h.n_signals == 0)
        throw DataError("malformed WFDB record line: " + line);
      // record name may carry a segment suffix like name/seg; keep the stem
      auto slash = h.record_name.find('/');
      if (slash != std::string::npos) h.record_name.resize(slash);
      if (h.sampling_rate_hz <= 0) h.sampling_rate_hz = 250.0;  // WFDB default
      have_record_line = true;
      continue;
    }
    if (h.signals.size() == h.n_signals) break;  // trailing info lines
    WfdbSignalSpec s;
    std::string fmt_tok, gain_tok;
    ls >> s.file_name >> fmt_tok >> gain_tok;
    if (s.file_name.empty() || fmt_tok.empty())
      throw DataError("malformed WFDB signal line: " + line);
    // format may carry xN/:N/+N modifiers; only the plain code is supported
    std::size_t pos = 0;
    s.format = std::stoi(fmt_tok, &pos);
    if (pos != fmt_tok.size())
      throw DataError("unsupported WFDB format modifier: " + fmt_tok);
    if (!gain_tok.empty()) {
      // gain(baseline)/units
      auto slash2 = gain_tok.find('/');
      if (slash2 != std::string::npos) gain_tok.resize(slash2);
      auto open = gain_tok.find('(');
      if (open != std::string::npos) {
        auto close = gain_tok.find(')', open);
        if (close == std::string::npos)
          throw DataError("malformed gain field: " + gain_tok);
        s.baseline = std::stoi(gain_tok.substr(open + 1, close - open - 1));
        gain_tok.resize(open);
      }
      if (!gain_tok.empty()) s.gain = std::stod(gain_tok);
      if (s.gain == 0) s.gain = 200.0;  // WFDB: 0 means "use default"
    }
    // skip adc_res adc_zero init_value checksum block_size; the rest of the
    // line, if any, is the signal description
    std::string tok;
    std::vector<std::string> rest;
    while (ls >> tok) rest.push_back(tok);
    if (rest.size() > 5) {
      std::string desc;
      for (std::size_t i = 5; i < rest.size(); ++i) {
        if (!desc.empty()) desc += ' ';
        desc += rest[i];
      }
      s.description = desc;
    }
    h.signals.push_back(std::move(s));
  }
  if (!have_record_line) throw DataError("empty WFDB header");
  if (h.signals.size() != h.n_signals)
    throw DataError("WFDB header declares " + std::to_string(h.n_signals) +
                    " signals but lists " + std::to_string(h.signals.size()));
  return h;
}

EcgRecord read_wfdb_record(const std::string& header_path, const std::string& lead,
                           const std::string& subject_override,
                           const std::string& session_override) {
  if (!file_exists(header_path)) throw DataError("missing header file: " + header_path);
  WfdbHeader h = parse_wfdb_header(read_text_file(header_path));

  std::size_t lead_idx = 0;
  if (!lead.empty()) {
    bool found = false;
    for (std::size_t i = 0; i < h.signals.size(); ++i) {
      std::string name = h.signals[i].description.empty()
                             ? "ch" + std::to_string(i)
                             : h.signals[i].description;
      if (name == lead) {
        lead_idx = i;
        found = true;
        break;
      }
    }
    if (!found) throw DataError("requested lead absent: " + lead);
  }
  const WfdbSignalSpec& sig = h.signals[lead_idx];
  if (sig.format != kWfdbFormat16 && sig.format != kWfdbFormat212)
    throw DataError("unsupported WFDB format code: " + std::to_string(sig.format));
  for (const auto& s : h.signals)
    if (s.file_name != sig.file_name)
      throw DataError("multi-file WFDB records are not supported");

  std::filesystem::path dat_path =
      std::filesystem::path(header_path).parent_path() / sig.file_name;
  std::vector<std::uint8_t> bytes = read_binary_file(dat_path.string());

  std::size_t frames = h.n_samples;
  if (frames == 0) {
    frames = (sig.format == kWfdbFormat16) ? bytes.size() / (2 * h.n_signals)
                                           : bytes.size() * 2 / (3 * h.n_signals);
  }
  std::vector<int> raw = (sig.format == kWfdbFormat16)
                             ? unpack16(bytes, frames * h.n_signals)
                             : unpack212(bytes, frames * h.n_signals);

  EcgRecord rec;
  rec.subject_id = subject_override.empty() ? h.record_name : subject_override;
  rec.session_id = session_override;
  rec.lead_name = sig.description.empty() ? "ch" + std::to_string(lead_idx)
                                          : sig.description;
  rec.sampling_rate_hz = h.sampling_rate_hz;
  rec.samples_mv.reserve(frames);
  for (std::size_t f = 0; f < frames; ++f) {
    int v = raw[f * h.n_signals + lead_idx];
    rec.samples_mv.push_back((v - sig.baseline) / sig.gain);
  }
  rec.validate();
  return rec;
}

void write_wfdb_record(const std::string& dir, const std::string& name,
                       const EcgRecord& record, int format, double gain,
                       int baseline) {
  record.validate();
  if (format != kWfdbFormat16 && format != kWfdbFormat212)
    throw DataError("unsupported WFDB format code: " + std::to_string(format));
  make_dirs(dir);

  std::vector<int> raw;
  raw.reserve(record.samples_mv.size());
  const int lo = format == kWfdbFormat212 ? -2048 : -32768;
  const int hi = format == kWfdbFormat212 ? 2047 : 32767;
  for (double mv : record.samples_mv) {
    int q = static_cast<int>(std::llround(mv * gain)) + baseline;
    raw.push_back(std::clamp(q, lo, hi));
  }
  std::vector<std::uint8_t> bytes =
      format == kWfdbFormat16 ? pack16(raw) : pack212(raw);

  std::filesystem::path base(dir);
  std::ofstream dat(base / (name + ".dat"), std::ios::binary);
  if (!dat) throw DataError("cannot write signal file for " + name);
  dat.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));

  std::ostringstream hea;
  hea << name << " 1 " << fmt_double(record.sampling_rate_hz, 6) << ' '
      << record.samples_mv.size() << '\n';
  hea << name << ".dat " << format << ' ' << fmt_double(gain, 6) << '('
      << baseline << ")/mV 12 0 " << (raw.empty() ? 0 : raw[0]) << " 0 0 "
      << (record.lead_name.empty() ? "ch0" : record.lead_name) << '\n';
  write_text_file((base / (name + ".hea")).string(), hea.str());
}

}  // namespace heartid
