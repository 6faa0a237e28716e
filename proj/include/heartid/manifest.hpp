#pragma once

#include <string>
#include <vector>

#include "heartid/ecg_record.hpp"

namespace heartid {

// One dataset entry: a WFDB record on disk or an inline synthetic spec.
struct ManifestEntry {
  enum class Kind { Wfdb, Synth };
  Kind kind = Kind::Wfdb;
  std::string source;  // header path (Wfdb) or compact spec string (Synth)
  std::string subject_id;
  std::string session_id;
  std::string lead;  // optional, Wfdb only
};

// Manifest file format: one entry per line, comma-separated, '#' comments.
//   fs=<hz>                         (optional directive line)
//   wfdb,<header_path>,<subject>,<session>[,<lead>]
//   synth,<spec>,<subject>,<session>
struct DatasetManifest {
  double declared_fs_hz = 0.0;  // 0 = take each record's own rate
  std::vector<ManifestEntry> entries;

  std::vector<std::string> subjects() const;
  std::vector<std::string> sessions() const;
};

DatasetManifest load_manifest(const std::string& path);
void save_manifest(const std::string& path, const DatasetManifest& manifest);

// Resolves one entry to a record: reads the WFDB pair (relative paths are
// resolved against base_dir) or synthesizes the signal at synth_fs_hz
// (falling back to 250 Hz when zero). Records longer than max_duration_s are
// truncated; shorter ones are kept whole and noted in *truncation_note when
// provided.
EcgRecord materialize_entry(const ManifestEntry& entry, const std::string& base_dir,
                            double synth_fs_hz = 0.0, double max_duration_s = 0.0,
                            std::string* truncation_note = nullptr);

}  // namespace heartid
