#include "heartid/folds.hpp"

#include <map>
#include <stdexcept>

#include "heartid/rng.hpp"

namespace heartid {

std::vector<std::size_t> FoldAssignment::fold_indices(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold_of.size(); ++i)
    if (fold_of[i] == fold) out.push_back(i);
  return out;
}

std::vector<std::size_t> FoldAssignment::rest_indices(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold_of.size(); ++i)
    if (fold_of[i] != fold && fold_of[i] < k) out.push_back(i);
  return out;
}

FoldAssignment make_folds(const std::vector<std::string>& subject_of_instance,
                          std::size_t k, std::uint64_t seed) {
  if (k < 2) throw std::invalid_argument("make_folds: k must be >= 2");
  if (subject_of_instance.empty())
    throw std::invalid_argument("make_folds: no instances");

  // std::map keeps subject iteration order deterministic
  std::map<std::string, std::vector<std::size_t>> by_subject;
  for (std::size_t i = 0; i < subject_of_instance.size(); ++i)
    by_subject[subject_of_instance[i]].push_back(i);

  FoldAssignment fa;
  fa.k = k;
  fa.fold_of.assign(subject_of_instance.size(), k);

  Rng rng(seed);
  std::size_t subject_rank = 0;
  for (auto& [subject, indices] : by_subject) {
    if (indices.size() < k) {
      fa.dropped_subjects.push_back(subject);
      ++subject_rank;
      continue;
    }
    rng.shuffle(indices);
    // rotate the starting fold per subject so fold sizes stay balanced when
    // per-subject counts are not multiples of k
    std::size_t start = subject_rank % k;
    for (std::size_t j = 0; j < indices.size(); ++j)
      fa.fold_of[indices[j]] = (start + j) % k;
    ++subject_rank;
  }
  return fa;
}

}  // namespace heartid
