#ifndef ARRAYSYNTH_DATASET_HPP
#define ARRAYSYNTH_DATASET_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "arraysynth/coupling.hpp"
#include "arraysynth/farfield.hpp"
#include "arraysynth/manifold.hpp"
#include "arraysynth/toy_em.hpp"

namespace arraysynth {

// On-disk dataset: a directory holding a `manifest` (JSON) plus raw arrays of
// little-endian float64 pairs (re, im), row-major. Base far-field patterns are
// stored per mode; per-element samples are reproduced through the position
// phase factors. Writes are atomic (temp directory + rename).

struct Dataset {
  ArrayModel model;
  CouplingMatrix coupling;
  ModalFarFieldSet fields;
};

struct ImportReport {
  std::vector<std::string> warnings;
  double reciprocity_defect = 0.0;
};

void export_dataset(const ArrayModel& model, const CouplingMatrix& coupling,
                    const ModalFarFieldSet& fields, const std::filesystem::path& path);

// Validates shapes and finiteness (hard errors) and the structural coupling
// invariants (warnings). Invariant violations abort the import unless
// `override_validation` is set; warnings are reported either way.
Dataset import_dataset(const std::filesystem::path& path,
                       bool override_validation = false,
                       ImportReport* report = nullptr);

// Design-point checkpoints share the dataset container format.
void save_checkpoint(const DesignPoint& point, const std::string& strategy,
                     const std::filesystem::path& path);

struct Checkpoint {
  DesignPoint point;
  std::string strategy;
};

Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace arraysynth

#endif
