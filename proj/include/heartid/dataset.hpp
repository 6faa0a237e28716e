#pragma once

#include <string>
#include <vector>

#include "heartid/tensor.hpp"

namespace heartid {

// One training instance: the temporal view x1 [1, L], the time-frequency
// view x2 [1, H, W] (either may be empty for unimodal fixtures), and the
// subject label.
struct Instance {
  Tensor x1;
  Tensor x2;
  int label = -1;
  std::string subject_id;
  std::string session_id;
};

struct Dataset {
  std::vector<Instance> items;
  std::vector<std::string> classes;  // label -> subject_id

  std::size_t size() const { return items.size(); }
  std::size_t num_classes() const { return classes.size(); }
  Dataset subset(const std::vector<std::size_t>& indices) const;
  std::vector<int> labels() const;
  std::vector<std::string> subjects_of_instances() const;
};

// Batched views assembled from instances: x1 [N,1,L], x2 [N,1,H,W].
struct Batch {
  Tensor x1;
  Tensor x2;
  std::vector<int> labels;
};

Batch make_batch(const Dataset& data, const std::vector<std::size_t>& indices);

// Rebuilds the dataset keeping only the given subjects, with labels
// remapped to a contiguous range (sorted subject order).
Dataset remap_to_subjects(const Dataset& data, const std::vector<std::string>& subjects);

}  // namespace heartid
