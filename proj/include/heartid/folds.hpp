#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace heartid {

// Subject-stratified fold assignment: every subject's instances spread as
// evenly as possible across folds, so each subject appears in every training
// split (closed-set identification). Subjects with fewer than k instances
// are dropped with a warning entry (fold index = k marks dropped instances).
struct FoldAssignment {
  std::size_t k = 0;
  std::vector<std::size_t> fold_of;  // per instance; == k when dropped
  std::vector<std::string> dropped_subjects;

  std::vector<std::size_t> fold_indices(std::size_t fold) const;
  std::vector<std::size_t> rest_indices(std::size_t fold) const;  // all other folds
};

FoldAssignment make_folds(const std::vector<std::string>& subject_of_instance,
                          std::size_t k, std::uint64_t seed);

}  // namespace heartid
