//==============================================================================
// checkpoint.cpp — explicit little-endian binary state I/O.
//==============================================================================
#include "beam/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "beam/spectral.hpp"

namespace beam {

namespace {

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
void put_f64(std::string& out, double d) {
  const std::uint64_t v = std::bit_cast<std::uint64_t>(d);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

struct Reader {
  const std::string& buf;
  std::size_t pos = 0;
  std::uint32_t u32() {
    if (pos + 4 > buf.size()) throw std::runtime_error("truncated checkpoint");
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
      v |= static_cast<std::uint32_t>(static_cast<unsigned char>(buf[pos + i])) << (8 * i);
    pos += 4;
    return v;
  }
  double f64() {
    if (pos + 8 > buf.size()) throw std::runtime_error("truncated checkpoint");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[pos + i])) << (8 * i);
    pos += 8;
    return std::bit_cast<double>(v);
  }
};

}  // namespace

void write_checkpoint(const std::string& path, const EnergyState& s,
                      const Params& prm, double t) {
  const Grid& g = s.grid();
  const Field u = ensure_physical(s.u);
  const Field v = ensure_physical(s.v);
  std::string out;
  out.reserve(64 + 16 * g.size());
  out += "BEAM";
  put_u32(out, kCheckpointVersion);
  put_u32(out, static_cast<std::uint32_t>(g.dim()));
  for (int a = 0; a < g.dim(); ++a) put_u32(out, static_cast<std::uint32_t>(g.points(a)));
  for (int a = 0; a < g.dim(); ++a) put_f64(out, g.length(a));
  put_f64(out, prm.m);
  put_f64(out, prm.lambda);
  put_f64(out, prm.p);
  put_f64(out, t);
  for (double x : u.samples()) put_f64(out, x);
  for (double x : v.samples()) put_f64(out, x);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open checkpoint for writing: " + path);
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw std::runtime_error("checkpoint write failed: " + path);
}

LoadedCheckpoint read_checkpoint(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open checkpoint: " + path);
  std::string buf((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  if (buf.size() < 8 || buf.compare(0, 4, "BEAM") != 0)
    throw std::runtime_error("not a checkpoint file: " + path);
  Reader r{buf, 4};
  const std::uint32_t version = r.u32();
  if (version != kCheckpointVersion)
    throw std::runtime_error("unsupported checkpoint version");
  const std::uint32_t n = r.u32();
  if (n < 1 || n > kMaxDim) throw std::runtime_error("bad checkpoint dimension");
  std::vector<int> points(n);
  std::vector<double> lengths(n);
  for (auto& p : points) p = static_cast<int>(r.u32());
  for (auto& L : lengths) L = r.f64();
  Params prm;
  prm.m = r.f64();
  prm.lambda = r.f64();
  prm.p = r.f64();
  const double t = r.f64();
  Grid g(points, lengths);
  std::vector<double> us(g.size()), vs(g.size());
  for (auto& x : us) x = r.f64();
  for (auto& x : vs) x = r.f64();
  return LoadedCheckpoint{
      EnergyState(Field::from_samples(g, std::move(us)),
                  Field::from_samples(g, std::move(vs))),
      prm, t};
}

}  // namespace beam
