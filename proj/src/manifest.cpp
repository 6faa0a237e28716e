#include "heartid/manifest.hpp"

#include <algorithm>
#include <filesystem>
#include <set>
#include <sstream>

#include "heartid/errors.hpp"
#include "heartid/synth_ecg.hpp"
#include "heartid/textio.hpp"
#include "heartid/wfdb.hpp"

namespace heartid {

std::vector<std::string> DatasetManifest::subjects() const {
  std::vector<std::string> out;
  for (const auto& e : entries)
    if (std::find(out.begin(), out.end(), e.subject_id) == out.end())
      out.push_back(e.subject_id);
  return out;
}

std::vector<std::string> DatasetManifest::sessions() const {
  std::vector<std::string> out;
  for (const auto& e : entries)
    if (std::find(out.begin(), out.end(), e.session_id) == out.end())
      out.push_back(e.session_id);
  return out;
}

DatasetManifest load_manifest(const std::string& path) {
  if (!file_exists(path)) throw DataError("missing manifest: " + path);
  DatasetManifest m;
  std::istringstream in(read_text_file(path));
  std::string line;
  std::size_t line_no = 0;
  std::set<std::string> seen;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (t.rfind("fs=", 0) == 0) {
      m.declared_fs_hz = std::stod(t.substr(3));
      if (m.declared_fs_hz <= 0)
        throw DataError("manifest line " + std::to_string(line_no) + ": fs must be > 0");
      continue;
    }
    std::vector<std::string> f = split(t, ',');
    if (f.size() < 4)
      throw DataError("manifest line " + std::to_string(line_no) + ": expected kind,source,subject,session");
    ManifestEntry e;
    std::string kind = trim(f[0]);
    if (kind == "wfdb") e.kind = ManifestEntry::Kind::Wfdb;
    else if (kind == "synth") e.kind = ManifestEntry::Kind::Synth;
    else throw DataError("manifest line " + std::to_string(line_no) + ": unknown kind '" + kind + "'");
    e.source = trim(f[1]);
    e.subject_id = trim(f[2]);
    e.session_id = trim(f[3]);
    if (f.size() > 4) e.lead = trim(f[4]);
    if (e.source.empty() || e.subject_id.empty())
      throw DataError("manifest line " + std::to_string(line_no) + ": empty source or subject");
    std::string key = e.subject_id + "\x1f" + e.session_id + "\x1f" + e.source;
    if (!seen.insert(key).second)
      throw DataError("manifest line " + std::to_string(line_no) +
                      ": duplicate (subject, session, source) entry");
    if (e.kind == ManifestEntry::Kind::Synth)
      parse_synth_spec(e.source);  // validate early
    m.entries.push_back(std::move(e));
  }
  if (m.subjects().size() < 2)
    throw DataError("manifest needs at least 2 distinct subjects for identification");
  return m;
}

void save_manifest(const std::string& path, const DatasetManifest& manifest) {
  std::ostringstream out;
  if (manifest.declared_fs_hz > 0)
    out << "fs=" << fmt_double_exact(manifest.declared_fs_hz) << '\n';
  for (const auto& e : manifest.entries) {
    out << (e.kind == ManifestEntry::Kind::Wfdb ? "wfdb" : "synth") << ','
        << e.source << ',' << e.subject_id << ',' << e.session_id;
    if (!e.lead.empty()) out << ',' << e.lead;
    out << '\n';
  }
  write_text_file(path, out.str());
}

EcgRecord materialize_entry(const ManifestEntry& entry, const std::string& base_dir,
                            double synth_fs_hz, double max_duration_s,
                            std::string* truncation_note) {
  EcgRecord rec;
  if (entry.kind == ManifestEntry::Kind::Wfdb) {
    std::filesystem::path p(entry.source);
    if (p.is_relative() && !base_dir.empty())
      p = std::filesystem::path(base_dir) / p;
    rec = read_wfdb_record(p.string(), entry.lead, entry.subject_id, entry.session_id);
  } else {
    SynthSpecEntry se = parse_synth_spec(entry.source);
    double fs = synth_fs_hz > 0 ? synth_fs_hz : 250.0;
    rec = synth_ecg(se.spec, se.duration_s, fs, entry.subject_id, entry.session_id).record;
  }
  if (max_duration_s > 0) {
    std::size_t want = static_cast<std::size_t>(max_duration_s * rec.sampling_rate_hz);
    if (rec.samples_mv.size() > want) {
      rec.samples_mv.resize(want);
    } else if (truncation_note && rec.samples_mv.size() < want) {
      *truncation_note = "record " + entry.subject_id + "/" + entry.session_id +
                         " shorter than requested window; kept full length";
    }
  }
  return rec;
}

}  // namespace heartid
