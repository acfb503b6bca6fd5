#include "arraysynth/dataset.hpp"

#include <bit>
#include <fstream>
#include <nlohmann/json.hpp>

#include "arraysynth/errors.hpp"

namespace arraysynth {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

static_assert(std::endian::native == std::endian::little,
              "dataset format is little-endian; big-endian hosts need byte swaps");

void write_complex_matrix(const fs::path& file, const Matrix& m) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw io_error("cannot open " + file.string() + " for writing");
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      const double re = m(r, c).real(), im = m(r, c).imag();
      out.write(reinterpret_cast<const char*>(&re), sizeof(double));
      out.write(reinterpret_cast<const char*>(&im), sizeof(double));
    }
  }
  if (!out) throw io_error("write failed for " + file.string());
}

Matrix read_complex_matrix(const fs::path& file, Eigen::Index rows, Eigen::Index cols) {
  std::ifstream in(file, std::ios::binary | std::ios::ate);
  if (!in) throw io_error("cannot open " + file.string());
  const auto size = in.tellg();
  const auto expected =
      static_cast<std::streamoff>(rows) * cols * 2 * static_cast<std::streamoff>(sizeof(double));
  if (size != expected) {
    throw io_error("shape mismatch for " + file.string() + ": expected " +
                   std::to_string(expected) + " bytes, found " + std::to_string(size));
  }
  in.seekg(0);
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      double re = 0.0, im = 0.0;
      in.read(reinterpret_cast<char*>(&re), sizeof(double));
      in.read(reinterpret_cast<char*>(&im), sizeof(double));
      m(r, c) = Complex(re, im);
    }
  }
  if (!in) throw io_error("read failed for " + file.string());
  return m;
}

json grid_to_json(const RegularAngleGrid& g) {
  return json{{"theta0_deg", g.theta0}, {"dtheta_deg", g.dtheta}, {"ntheta", g.n_theta},
              {"phi0_deg", g.phi0},     {"dphi_deg", g.dphi},     {"nphi", g.n_phi}};
}

RegularAngleGrid grid_from_json(const json& j) {
  RegularAngleGrid g;
  g.theta0 = j.at("theta0_deg").get<double>();
  g.dtheta = j.at("dtheta_deg").get<double>();
  g.n_theta = j.at("ntheta").get<int>();
  g.phi0 = j.at("phi0_deg").get<double>();
  g.dphi = j.at("dphi_deg").get<double>();
  g.n_phi = j.at("nphi").get<int>();
  if (g.n_theta < 1 || g.n_phi < 1) throw io_error("manifest: invalid grid sizes");
  return g;
}

json array_entry(const std::string& file, Eigen::Index rows, Eigen::Index cols) {
  return json{{"file", file}, {"rows", rows}, {"cols", cols}};
}

Matrix read_declared_matrix(const fs::path& dir, const json& manifest,
                            const std::string& key) {
  const auto& entry = manifest.at("arrays").at(key);
  return read_complex_matrix(dir / entry.at("file").get<std::string>(),
                             entry.at("rows").get<Eigen::Index>(),
                             entry.at("cols").get<Eigen::Index>());
}

void write_manifest(const fs::path& dir, const json& manifest) {
  std::ofstream out(dir / "manifest");
  if (!out) throw io_error("cannot write manifest in " + dir.string());
  out << manifest.dump(2) << "\n";
  if (!out) throw io_error("manifest write failed in " + dir.string());
}

json read_manifest(const fs::path& dir, const std::string& expected_format) {
  const fs::path file = dir / "manifest";
  std::ifstream in(file);
  if (!in) throw io_error("cannot open " + file.string());
  json manifest;
  try {
    in >> manifest;
  } catch (const json::exception& e) {
    throw io_error("malformed manifest " + file.string() + ": " + e.what());
  }
  if (manifest.value("format", "") != expected_format) {
    throw io_error("manifest format mismatch in " + file.string() + " (expected " +
                   expected_format + ")");
  }
  if (manifest.value("byte_order", "little") != "little") {
    throw io_error("unsupported byte order in " + file.string());
  }
  return manifest;
}

// Writes through a temp directory and renames into place.
class AtomicDir {
public:
  explicit AtomicDir(const fs::path& target)
      : target_(target), temp_(target.string() + ".tmp") {
    std::error_code ec;
    fs::remove_all(temp_, ec);
    if (!fs::create_directories(temp_)) {
      throw io_error("cannot create directory " + temp_.string());
    }
  }
  ~AtomicDir() {
    if (!committed_) {
      std::error_code ec;
      fs::remove_all(temp_, ec);
    }
  }
  const fs::path& path() const { return temp_; }
  void commit() {
    std::error_code ec;
    fs::remove_all(target_, ec);
    fs::rename(temp_, target_, ec);
    if (ec) throw io_error("cannot move dataset into " + target_.string());
    committed_ = true;
  }

private:
  fs::path target_;
  fs::path temp_;
  bool committed_ = false;
};

}  // namespace

void export_dataset(const ArrayModel& model, const CouplingMatrix& coupling,
                    const ModalFarFieldSet& fields, const fs::path& path) {
  model.validate();
  if (coupling.n_elements() != model.n_elements() ||
      fields.n_elements() != model.n_elements() ||
      coupling.n_modes() != model.n_modes() || fields.n_modes() != model.n_modes()) {
    throw dimension_error("export_dataset: inconsistent shapes");
  }
  AtomicDir dir(path);

  json manifest{
      {"format", "arraysynth-dataset"},
      {"version", 1},
      {"byte_order", "little"},
      {"scalar", "float64"},
      {"K", model.n_elements()},
      {"N", model.n_modes()},
      {"P", model.n_ports},
      {"R", model.rows},
      {"C", model.cols},
      {"dx_wavelengths", model.dx_wavelengths},
      {"dy_wavelengths", model.dy_wavelengths},
      {"grids", json{{"cut", grid_to_json(fields.cut_grid())},
                     {"sphere", grid_to_json(fields.sphere_grid())}}},
  };
  manifest["arrays"] = json{
      {"coupling", array_entry("coupling.bin", coupling.full().rows(),
                               coupling.full().cols())},
      {"farfield_cut_theta", array_entry("farfield_cut_theta.bin",
                                         fields.cut_theta_base().rows(),
                                         fields.cut_theta_base().cols())},
      {"farfield_cut_phi", array_entry("farfield_cut_phi.bin",
                                       fields.cut_phi_base().rows(),
                                       fields.cut_phi_base().cols())},
      {"farfield_sphere_theta", array_entry("farfield_sphere_theta.bin",
                                            fields.sphere_theta_base().rows(),
                                            fields.sphere_theta_base().cols())},
      {"farfield_sphere_phi", array_entry("farfield_sphere_phi.bin",
                                          fields.sphere_phi_base().rows(),
                                          fields.sphere_phi_base().cols())},
  };
  write_manifest(dir.path(), manifest);
  write_complex_matrix(dir.path() / "coupling.bin", coupling.full());
  write_complex_matrix(dir.path() / "farfield_cut_theta.bin", fields.cut_theta_base());
  write_complex_matrix(dir.path() / "farfield_cut_phi.bin", fields.cut_phi_base());
  write_complex_matrix(dir.path() / "farfield_sphere_theta.bin",
                       fields.sphere_theta_base());
  write_complex_matrix(dir.path() / "farfield_sphere_phi.bin", fields.sphere_phi_base());
  dir.commit();
}

Dataset import_dataset(const fs::path& path, bool override_validation,
                       ImportReport* report) {
  const json manifest = read_manifest(path, "arraysynth-dataset");

  ArrayModel model;
  try {
    model.rows = manifest.at("R").get<int>();
    model.cols = manifest.at("C").get<int>();
    model.n_ports = manifest.at("P").get<int>();
    model.dx_wavelengths = manifest.at("dx_wavelengths").get<double>();
    model.dy_wavelengths = manifest.at("dy_wavelengths").get<double>();
  } catch (const json::exception& e) {
    throw io_error("malformed manifest: " + std::string(e.what()));
  }
  model.validate();
  const int k = manifest.at("K").get<int>();
  const int n = manifest.at("N").get<int>();
  if (k != model.n_elements()) throw io_error("manifest: K does not match R*C");
  if (n != model.n_modes()) throw io_error("manifest: unsupported mode count");

  const RegularAngleGrid cut = grid_from_json(manifest.at("grids").at("cut"));
  const RegularAngleGrid sphere = grid_from_json(manifest.at("grids").at("sphere"));

  Matrix g = read_declared_matrix(path, manifest, "coupling");
  if (g.rows() != Eigen::Index(k) * n || g.cols() != Eigen::Index(k) * n) {
    throw io_error("manifest: coupling shape does not match K*N");
  }
  Matrix cut_theta = read_declared_matrix(path, manifest, "farfield_cut_theta");
  Matrix cut_phi = read_declared_matrix(path, manifest, "farfield_cut_phi");
  Matrix sph_theta = read_declared_matrix(path, manifest, "farfield_sphere_theta");
  Matrix sph_phi = read_declared_matrix(path, manifest, "farfield_sphere_phi");

  if (!g.allFinite() || !cut_theta.allFinite() || !cut_phi.allFinite() ||
      !sph_theta.allFinite() || !sph_phi.allFinite()) {
    throw io_error("dataset contains non-finite values");
  }

  ImportReport local;
  // Structural validation: zero diagonal blocks and reciprocity.
  double diag_defect = 0.0;
  for (int kk = 0; kk < k; ++kk) {
    diag_defect = std::max(
        diag_defect, g.block(kk * n, kk * n, n, n).cwiseAbs().maxCoeff());
  }
  if (diag_defect > 0.0) {
    local.warnings.push_back("coupling diagonal blocks are not exactly zero (max |" +
                             std::to_string(diag_defect) + "|)");
    for (int kk = 0; kk < k; ++kk) {
      g.block(kk * n, kk * n, n, n).setZero();
    }
  }
  double recip = 0.0;
  for (int a = 0; a < k; ++a) {
    for (int b = a + 1; b < k; ++b) {
      recip = std::max(recip, (g.block(b * n, a * n, n, n) -
                               g.block(a * n, b * n, n, n).transpose())
                                  .cwiseAbs()
                                  .maxCoeff());
    }
  }
  local.reciprocity_defect = recip;
  if (recip > 1e-9) {
    local.warnings.push_back("coupling reciprocity violated by " + std::to_string(recip));
  }
  if (report != nullptr) *report = local;
  if (!local.warnings.empty() && !override_validation) {
    throw validation_error("import_dataset: validation warnings present (" +
                           local.warnings.front() +
                           "); pass the override flag to import anyway");
  }

  CouplingMatrix coupling(std::move(g), k, n, /*validate_reciprocity=*/false);
  ModalFarFieldSet fields(cut, std::move(cut_theta), std::move(cut_phi), sphere,
                          std::move(sph_theta), std::move(sph_phi), model.positions());
  return Dataset{model, std::move(coupling), std::move(fields)};
}

void save_checkpoint(const DesignPoint& point, const std::string& strategy,
                     const fs::path& path) {
  if (point.class_gsms.empty()) throw validation_error("save_checkpoint: empty point");
  const int n = point.class_gsms.front().n_modes();
  const int p = point.class_gsms.front().n_ports();
  const int dim = n + p;
  const int d = point.n_classes();
  AtomicDir dir(path);

  Matrix stacked(Eigen::Index(d) * dim, dim);
  for (int i = 0; i < d; ++i) {
    stacked.block(Eigen::Index(i) * dim, 0, dim, dim) =
        point.class_gsms[static_cast<std::size_t>(i)].entries();
  }
  json manifest{
      {"format", "arraysynth-checkpoint"},
      {"version", 1},
      {"byte_order", "little"},
      {"scalar", "float64"},
      {"D", d},
      {"N", n},
      {"P", p},
      {"R", point.excitation.n_rows()},
      {"C", point.excitation.n_cols()},
      {"S", point.excitation.n_states()},
      {"strategy", strategy},
  };
  manifest["arrays"] = json{
      {"class_gsms", array_entry("class_gsms.bin", stacked.rows(), stacked.cols())},
      {"v_static", array_entry("v_static.bin", point.excitation.static_part().rows(),
                               point.excitation.static_part().cols())},
      {"v_dyn", array_entry("v_dyn.bin", point.excitation.dynamic_part().rows(),
                            point.excitation.dynamic_part().cols())},
  };
  write_manifest(dir.path(), manifest);
  write_complex_matrix(dir.path() / "class_gsms.bin", stacked);
  write_complex_matrix(dir.path() / "v_static.bin", point.excitation.static_part());
  write_complex_matrix(dir.path() / "v_dyn.bin", point.excitation.dynamic_part());
  dir.commit();
}

Checkpoint load_checkpoint(const fs::path& path) {
  const json manifest = read_manifest(path, "arraysynth-checkpoint");
  int d = 0, n = 0, p = 0, r = 0, c = 0, s = 0;
  try {
    d = manifest.at("D").get<int>();
    n = manifest.at("N").get<int>();
    p = manifest.at("P").get<int>();
    r = manifest.at("R").get<int>();
    c = manifest.at("C").get<int>();
    s = manifest.at("S").get<int>();
  } catch (const json::exception& e) {
    throw io_error("malformed checkpoint manifest: " + std::string(e.what()));
  }
  if (d < 1 || n < 1 || p < 0 || r < 1 || c < 1 || s < 1) {
    throw io_error("checkpoint manifest: invalid dimensions");
  }
  const int dim = n + p;
  Matrix stacked = read_declared_matrix(path, manifest, "class_gsms");
  if (stacked.rows() != Eigen::Index(d) * dim || stacked.cols() != dim) {
    throw io_error("checkpoint: class GSM shape mismatch");
  }
  Matrix v_static = read_declared_matrix(path, manifest, "v_static");
  Matrix v_dyn = read_declared_matrix(path, manifest, "v_dyn");
  if (v_static.rows() != r || v_static.cols() != c || v_dyn.rows() != c ||
      v_dyn.cols() != s) {
    throw io_error("checkpoint: excitation shape mismatch");
  }
  Checkpoint out{DesignPoint{{}, ExcitationSet(std::move(v_static), std::move(v_dyn))},
                 manifest.value("strategy", "")};
  out.point.class_gsms.reserve(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) {
    out.point.class_gsms.emplace_back(
        stacked.block(Eigen::Index(i) * dim, 0, dim, dim), n, p);
  }
  return out;
}

}  // namespace arraysynth
