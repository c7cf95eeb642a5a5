#include <json.hpp>

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "sgm/cli_io.hpp"
#include "sgm/errors.hpp"

namespace sgm {

namespace {

constexpr char kMagic[4] = {'S', 'G', 'T', '1'};

std::uint64_t to_le(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    std::uint64_t out = 0;
    for (int b = 0; b < 8; ++b) out |= ((v >> (8 * b)) & 0xffu) << (8 * (7 - b));
    return out;
  }
}

bool times_match(const Sgt1Header& h, const Trajectory& traj) {
  for (std::size_t k = 0; k < traj.size(); ++k) {
    if (std::abs(traj.frame(k).t - h.frame_time(k)) > 1e-9 * h.tau) return false;
  }
  return true;
}

}  // namespace

double Sgt1Header::frame_time(std::size_t k) const {
  if (t_end && k + 1 == n_frames && k > 0) return *t_end;
  return t0 + static_cast<double>(k) * tau;
}

void write_sgt1(std::ostream& os, const Trajectory& traj) {
  Sgt1Header h;
  h.n_grid = traj.n_grid();
  h.n_frames = traj.size();
  h.t0 = traj.t_begin();
  if (traj.size() > 1) {
    bool ok = false;
    for (double tau : {traj.config().tau, traj.frame(1).t - traj.frame(0).t}) {
      h.tau = tau;
      h.t_end.reset();
      if (times_match(h, traj)) {
        ok = true;
        break;
      }
      h.t_end = traj.t_end();
      if (times_match(h, traj)) {
        ok = true;
        break;
      }
    }
    if (!ok) throw BadInput("frame times are not t0 + k tau; SGT1 cannot store them");
  }
  nlohmann::ordered_json j;
  j["version"] = h.version;
  j["n_grid"] = h.n_grid;
  j["tau"] = h.tau;
  j["n_frames"] = h.n_frames;
  j["t0"] = h.t0;
  j["storage"] = h.storage;
  if (h.t_end) j["t_end"] = *h.t_end;
  os.write(kMagic, 4);
  os << j.dump() << '\n';
  std::vector<std::uint64_t> buf(h.n_grid);
  for (const auto& fr : traj.frames()) {
    const auto s = fr.u.samples();
    for (std::size_t i = 0; i < s.size(); ++i) buf[i] = to_le(std::bit_cast<std::uint64_t>(s[i]));
    os.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size() * 8));
  }
  if (!os) throw BadInput("failed writing SGT1 data");
}

void write_sgt1_file(const std::filesystem::path& path, const Trajectory& traj) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw BadInput("cannot open " + path.string() + " for writing");
  write_sgt1(os, traj);
}

Sgt1Header read_sgt1_header(std::istream& is) {
  char magic[4] = {};
  if (!is.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) throw BadInput("not an SGT1 file (bad magic)");
  std::string line;
  if (!std::getline(is, line)) throw BadInput("SGT1 header line missing");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw BadInput(std::string("SGT1 header is not JSON: ") + e.what());
  }
  Sgt1Header h;
  try {
    h.version = j.at("version").get<int>();
    h.n_grid = j.at("n_grid").get<std::size_t>();
    h.tau = j.at("tau").get<double>();
    h.n_frames = j.at("n_frames").get<std::size_t>();
    h.t0 = j.at("t0").get<double>();
    h.storage = j.at("storage").get<std::string>();
    if (j.contains("t_end")) h.t_end = j.at("t_end").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw BadInput(std::string("SGT1 header: ") + e.what());
  }
  if (h.version != 1) throw BadInput("unsupported SGT1 version " + std::to_string(h.version));
  if (h.storage != "real") throw BadInput("unsupported SGT1 storage '" + h.storage + "'");
  if (!valid_grid_size(h.n_grid)) throw BadInput("SGT1 n_grid must be a power of two >= 16");
  if (h.n_frames == 0) throw BadInput("SGT1 file holds no frames");
  if (h.n_frames > 1 && !(h.tau > 0.0 && std::isfinite(h.tau))) throw BadInput("SGT1 tau must be positive");
  if (h.t_end && !(h.n_frames > 1 && *h.t_end > h.frame_time(h.n_frames - 2) &&
                   *h.t_end < h.t0 + static_cast<double>(h.n_frames - 1) * h.tau)) {
    throw BadInput("SGT1 t_end does not shorten the last step");
  }
  return h;
}

Trajectory read_sgt1(std::istream& is, SolverConfig base) {
  const auto h = read_sgt1_header(is);
  std::vector<Frame> frames;
  frames.reserve(h.n_frames);
  std::vector<std::uint64_t> buf(h.n_grid);
  for (std::size_t k = 0; k < h.n_frames; ++k) {
    if (!is.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size() * 8))) {
      throw BadInput("SGT1 file truncated in frame " + std::to_string(k));
    }
    std::vector<double> v(h.n_grid);
    for (std::size_t i = 0; i < v.size(); ++i) {
      v[i] = std::bit_cast<double>(to_le(buf[i]));
      if (!std::isfinite(v[i])) throw BadInput("SGT1 frame " + std::to_string(k) + " holds a non-finite sample");
    }
    frames.push_back({h.frame_time(k), SpectralField::from_samples(std::move(v))});
  }
  if (is.peek() != std::char_traits<char>::eof()) throw BadInput("trailing bytes after the last SGT1 frame");
  if (h.n_frames > 1) {
    base.tau = h.tau;
    base.t_end = frames.back().t;
  }
  try {
    return Trajectory(base, std::move(frames));
  } catch (const std::invalid_argument& e) {
    throw BadInput(std::string("SGT1: ") + e.what());
  }
}

Trajectory read_sgt1_file(const std::filesystem::path& path, SolverConfig base) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw BadInput("cannot open " + path.string());
  return read_sgt1(is, base);
}

bool is_sgt1_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  char magic[4] = {};
  return is.read(magic, 4) && std::memcmp(magic, kMagic, 4) == 0;
}

}  // namespace sgm
