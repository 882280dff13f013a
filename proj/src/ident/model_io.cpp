#include "ident/model_io.hpp"

#include <array>
#include <cstdint>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "core/error.hpp"

namespace koopflow::io {
namespace {

constexpr std::array<char, 8> kMagic = {'K', 'F', 'M', 'O', 'D', 'E', 'L', '\0'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::ifstream& in, const std::filesystem::path& path) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  require(in.good(), "truncated model file " + path.string(), ErrorCode::Io);
  return v;
}

void put_matrix(std::ofstream& out, const Eigen::MatrixXd& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) put(out, m(i, j));
}

Eigen::MatrixXd get_matrix(std::ifstream& in, int rows, int cols,
                           const std::filesystem::path& path) {
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = get<double>(in, path);
  return m;
}

nlohmann::json sidecar_json(const SurrogateModel& model) {
  char tag[19];
  std::snprintf(tag, sizeof tag, "0x%016llx",
                static_cast<unsigned long long>(model.data_tag));
  return {
      {"format", {{"magic", "KFMODEL"}, {"version", kVersion}}},
      {"kind", to_string(model.kind)},
      {"hybrid_base",
       model.kind == SurrogateKind::HybridB ? nlohmann::json(to_string(model.hybrid_base))
                                            : nlohmann::json(nullptr)},
      {"variable", to_string(model.variable)},
      {"cells", model.cells()},
      {"actuator_dim", model.m()},
      {"kinematics",
       {{"mode", model.kin.mode == WellMode::Rate ? "rate" : "bhp"},
        {"dt", model.kin.dt},
        {"lambda", model.kin.lambda}}},
      {"scaling", {{"mean", model.scaling.mean}, {"stddev", model.scaling.stddev}}},
      {"data_tag", tag},
      {"fit", {{"rank", model.fit_rank},
               {"sigma_max", model.sigma_max},
               {"sigma_min_kept", model.sigma_min_kept}}},
      {"block_norms", {{"A_pp", model.A_pp.norm()},
                       {"A_px", model.A_px.norm()},
                       {"A_xp", model.A_xp.norm()},
                       {"A_xx", model.A_xx.norm()},
                       {"B_p", model.B_p.norm()},
                       {"B_x", model.B_x.norm()},
                       {"b_x", model.b_x.norm()}}},
  };
}

}  // namespace

void save_model(const std::filesystem::path& path, const SurrogateModel& model) {
  model.validate();
  std::ofstream out(path, std::ios::binary);
  require(out.good(), "cannot open " + path.string() + " for writing", ErrorCode::Io);

  out.write(kMagic.data(), kMagic.size());
  put(out, kVersion);
  put(out, static_cast<std::uint32_t>(model.kind));
  put(out, static_cast<std::uint32_t>(model.hybrid_base));
  put(out, static_cast<std::uint32_t>(model.variable));
  put(out, static_cast<std::uint32_t>(model.kin.mode));
  put(out, static_cast<std::uint32_t>(model.kin.m));
  put(out, model.kin.dt);
  put(out, model.kin.lambda);
  put(out, model.scaling.mean);
  put(out, model.scaling.stddev);
  put(out, model.data_tag);
  put(out, static_cast<std::uint32_t>(model.cells()));
  put(out, static_cast<std::int32_t>(model.fit_rank));
  put(out, model.sigma_max);
  put(out, model.sigma_min_kept);
  put_matrix(out, model.A_pp);
  put_matrix(out, model.A_px);
  put_matrix(out, model.A_xp);
  put_matrix(out, model.A_xx);
  put_matrix(out, model.B_p);
  put_matrix(out, model.B_x);
  put_matrix(out, model.b_x);
  require(out.good(), "write failed for " + path.string(), ErrorCode::Io);
  out.close();

  std::ofstream side(path.string() + ".json", std::ios::binary);
  require(side.good(), "cannot open sidecar for " + path.string(), ErrorCode::Io);
  side << sidecar_json(model).dump(2) << "\n";
  require(side.good(), "sidecar write failed for " + path.string(), ErrorCode::Io);
}

SurrogateModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), "cannot open " + path.string(), ErrorCode::Io);

  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  require(in.good() && magic == kMagic, "not a model file: " + path.string(), ErrorCode::Io);
  const auto version = get<std::uint32_t>(in, path);
  require(version == kVersion,
          "unsupported model file version " + std::to_string(version) + " in " + path.string(),
          ErrorCode::Io);

  SurrogateModel model;
  const auto kind = get<std::uint32_t>(in, path);
  require(kind <= static_cast<std::uint32_t>(SurrogateKind::HybridB),
          "corrupt model kind in " + path.string(), ErrorCode::Io);
  model.kind = static_cast<SurrogateKind>(kind);
  const auto base = get<std::uint32_t>(in, path);
  require(base <= static_cast<std::uint32_t>(SurrogateKind::HybridB),
          "corrupt hybrid base in " + path.string(), ErrorCode::Io);
  model.hybrid_base = static_cast<SurrogateKind>(base);
  const auto variable = get<std::uint32_t>(in, path);
  require(variable <= 1u, "corrupt variable in " + path.string(), ErrorCode::Io);
  model.variable = static_cast<Variable>(variable);
  const auto mode = get<std::uint32_t>(in, path);
  require(mode <= 1u, "corrupt well mode in " + path.string(), ErrorCode::Io);
  model.kin.mode = static_cast<WellMode>(mode);
  model.kin.m = static_cast<int>(get<std::uint32_t>(in, path));
  model.kin.dt = get<double>(in, path);
  model.kin.lambda = get<double>(in, path);
  model.scaling.mean = get<double>(in, path);
  model.scaling.stddev = get<double>(in, path);
  model.data_tag = get<std::uint64_t>(in, path);
  const int n = static_cast<int>(get<std::uint32_t>(in, path));
  require(n > 0 && model.kin.m > 0, "corrupt dimensions in " + path.string(), ErrorCode::Io);
  model.fit_rank = get<std::int32_t>(in, path);
  model.sigma_max = get<double>(in, path);
  model.sigma_min_kept = get<double>(in, path);

  const int m = model.kin.m;
  model.A_pp = get_matrix(in, m, m, path);
  model.A_px = get_matrix(in, m, n, path);
  model.A_xp = get_matrix(in, n, m, path);
  model.A_xx = get_matrix(in, n, n, path);
  model.B_p = get_matrix(in, m, m, path);
  model.B_x = get_matrix(in, n, m, path);
  model.b_x = get_matrix(in, n, 1, path);

  in.peek();
  require(in.eof(), "trailing bytes in model file " + path.string(), ErrorCode::Io);
  model.validate();
  return model;
}

}  // namespace koopflow::io
