#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <limits>

#include "arraysynth/dataset.hpp"
#include "arraysynth/errors.hpp"
#include "arraysynth/manifold.hpp"

using namespace arraysynth;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name)
      : path(fs::temp_directory_path() / ("arraysynth_test_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

Dataset make_toy_dataset(int rows, int cols) {
  ArrayModel model;
  model.rows = rows;
  model.cols = cols;
  return Dataset{model, coupling_matrix(model), build_far_field_set(model)};
}

}  // namespace

TEST_SUITE("dataset") {

TEST_CASE("export and import round-trip bit-exactly") {
  TempDir tmp("roundtrip");
  const Dataset d = make_toy_dataset(2, 2);
  const fs::path target = tmp.path / "dataset";
  export_dataset(d.model, d.coupling, d.fields, target);
  const Dataset back = import_dataset(target);

  CHECK(back.model.rows == 2);
  CHECK(back.model.cols == 2);
  CHECK((back.coupling.full() - d.coupling.full()).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.fields.cut_theta_base() - d.fields.cut_theta_base()).cwiseAbs().maxCoeff() ==
        0.0);
  CHECK((back.fields.sphere_phi_base() - d.fields.sphere_phi_base()).cwiseAbs().maxCoeff() ==
        0.0);
  CHECK(back.fields.cut_grid() == d.fields.cut_grid());
  CHECK(back.fields.sphere_grid() == d.fields.sphere_grid());
}

TEST_CASE("export writes byte-identical datasets for identical inputs") {
  TempDir tmp("determinism");
  const Dataset d = make_toy_dataset(2, 3);
  export_dataset(d.model, d.coupling, d.fields, tmp.path / "a");
  export_dataset(d.model, d.coupling, d.fields, tmp.path / "b");
  for (const auto& entry : fs::directory_iterator(tmp.path / "a")) {
    const fs::path other = tmp.path / "b" / entry.path().filename();
    REQUIRE(fs::exists(other));
    std::ifstream fa(entry.path(), std::ios::binary);
    std::ifstream fb(other, std::ios::binary);
    const std::string ca((std::istreambuf_iterator<char>(fa)),
                         std::istreambuf_iterator<char>());
    const std::string cb((std::istreambuf_iterator<char>(fb)),
                         std::istreambuf_iterator<char>());
    CHECK(ca == cb);
  }
}

TEST_CASE("shape mismatch between manifest and binary is an error") {
  TempDir tmp("shape");
  const Dataset d = make_toy_dataset(2, 2);
  const fs::path target = tmp.path / "dataset";
  export_dataset(d.model, d.coupling, d.fields, target);
  // Truncate the coupling array: manifest says 8x8.
  fs::resize_file(target / "coupling.bin", 8 * 7 * 16);
  CHECK_THROWS_AS(import_dataset(target), io_error);
}

TEST_CASE("missing manifest is an io error") {
  TempDir tmp("nomanifest");
  CHECK_THROWS_AS(import_dataset(tmp.path), io_error);
}

TEST_CASE("reciprocity perturbation warns and requires the override") {
  TempDir tmp("recip");
  Dataset d = make_toy_dataset(2, 2);
  Matrix g = d.coupling.full();
  g(0, 2) += Complex(1e-3, 0.0);  // breaks G^(l,k) = G^(k,l)^T
  const CouplingMatrix perturbed(g, 4, 2, /*validate_reciprocity=*/false);
  const fs::path target = tmp.path / "dataset";
  export_dataset(d.model, perturbed, d.fields, target);

  CHECK_THROWS_AS(import_dataset(target), validation_error);

  ImportReport report;
  const Dataset back = import_dataset(target, /*override_validation=*/true, &report);
  CHECK(report.warnings.size() == 1);
  CHECK(report.reciprocity_defect == doctest::Approx(1e-3).epsilon(1e-6));
  CHECK((back.coupling.full() - g).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("non-finite data is rejected outright") {
  TempDir tmp("nan");
  Dataset d = make_toy_dataset(2, 2);
  Matrix g = d.coupling.full();
  const fs::path target = tmp.path / "dataset";
  export_dataset(d.model, d.coupling, d.fields, target);
  // Poison one value in the binary directly.
  std::fstream f(target / "coupling.bin",
                 std::ios::binary | std::ios::in | std::ios::out);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  f.seekp(16 * 3);
  f.write(reinterpret_cast<const char*>(&nan), sizeof(double));
  f.close();
  CHECK_THROWS_AS(import_dataset(target, true), io_error);
}

TEST_CASE("checkpoints round-trip the design point") {
  TempDir tmp("checkpoint");
  const DesignPoint x = random_design_point(3, 2, 1, 4, 4, 5, 17);
  save_checkpoint(x, "EdgeCornerInternal", tmp.path / "ck");
  const Checkpoint back = load_checkpoint(tmp.path / "ck");
  CHECK(back.strategy == "EdgeCornerInternal");
  REQUIRE(back.point.n_classes() == 3);
  for (int d = 0; d < 3; ++d) {
    CHECK((back.point.class_gsms[std::size_t(d)].entries() -
           x.class_gsms[std::size_t(d)].entries())
              .cwiseAbs()
              .maxCoeff() == 0.0);
  }
  CHECK((back.point.excitation.static_part() - x.excitation.static_part())
            .cwiseAbs()
            .maxCoeff() == 0.0);
  CHECK((back.point.excitation.dynamic_part() - x.excitation.dynamic_part())
            .cwiseAbs()
            .maxCoeff() == 0.0);
}

}  // TEST_SUITE
