#include "ymflow/snapshot.hpp"

#include <cstring>
#include <fstream>

namespace ymflow {

namespace {

constexpr char kConnMagic[8] = {'Y', 'M', 'F', 'S', 'N', 'P', '0', '1'};
constexpr char kSectMagic[8] = {'Y', 'M', 'F', 'S', 'E', 'C', '0', '1'};

struct Header {
  uint32_t N = 0;
  uint32_t n = 0;
  uint8_t kind = 0;
  uint8_t reserved[3] = {0, 0, 0};
};

void write_field(std::ofstream& f, const MatField& m) {
  const int N = m.N(), n = m.n();
  std::vector<double> buf;
  buf.reserve(static_cast<size_t>(N) * N * n * n * 2);
  for (int j = 0; j < N; ++j)
    for (int i = 0; i < N; ++i) {
      auto mm = m.at(i, j);
      for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
          buf.push_back(mm(r, c).real());
          buf.push_back(mm(r, c).imag());
        }
    }
  f.write(reinterpret_cast<const char*>(buf.data()),
          static_cast<std::streamsize>(buf.size() * sizeof(double)));
}

void read_field(std::ifstream& f, MatField& m) {
  const int N = m.N(), n = m.n();
  std::vector<double> buf(static_cast<size_t>(N) * N * n * n * 2);
  f.read(reinterpret_cast<char*>(buf.data()),
         static_cast<std::streamsize>(buf.size() * sizeof(double)));
  if (!f) throw SnapshotError("snapshot: truncated field data");
  size_t k = 0;
  for (int j = 0; j < N; ++j)
    for (int i = 0; i < N; ++i) {
      auto mm = m.at(i, j);
      for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
          mm(r, c) = Complex(buf[k], buf[k + 1]);
          k += 2;
        }
    }
}

void write_header(std::ofstream& f, const char magic[8], int N, int n, GroupKind kind,
                  const std::vector<long long>& degrees) {
  f.write(magic, 8);
  Header h{static_cast<uint32_t>(N), static_cast<uint32_t>(n),
           static_cast<uint8_t>(kind == GroupKind::SU ? 1 : 0)};
  f.write(reinterpret_cast<const char*>(&h), sizeof(Header));
  std::vector<int64_t> degs(degrees.begin(), degrees.end());
  f.write(reinterpret_cast<const char*>(degs.data()),
          static_cast<std::streamsize>(degs.size() * sizeof(int64_t)));
}

Header read_header(std::ifstream& f, const char magic[8], std::vector<long long>& degrees) {
  char got[8];
  f.read(got, 8);
  if (!f) throw SnapshotError("snapshot: file too short for header");
  if (std::memcmp(got, magic, 8) != 0)
    throw SnapshotError("snapshot: magic/version mismatch (expected " +
                        std::string(magic, 8) + ", found " + std::string(got, 8) + ")");
  Header h;
  f.read(reinterpret_cast<char*>(&h), sizeof(Header));
  if (!f) throw SnapshotError("snapshot: truncated header");
  if (h.N < 4 || h.n < 1 || h.n > kMaxFiber)
    throw SnapshotError("snapshot: implausible header dimensions");
  std::vector<int64_t> degs(h.n);
  f.read(reinterpret_cast<char*>(degs.data()),
         static_cast<std::streamsize>(degs.size() * sizeof(int64_t)));
  if (!f) throw SnapshotError("snapshot: truncated degree table");
  degrees.assign(degs.begin(), degs.end());
  return h;
}

}  // namespace

void save_connection(const UnitaryConnection& a, const std::string& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw SnapshotError("snapshot: cannot open " + path + " for writing");
  write_header(f, kConnMagic, a.N(), a.n(), a.group.kind, a.twist.degrees);
  write_field(f, a.ax);
  write_field(f, a.ay);
  if (!f) throw SnapshotError("snapshot: write failure on " + path);
}

UnitaryConnection load_connection(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw SnapshotError("snapshot: cannot open " + path);
  std::vector<long long> degrees;
  const Header h = read_header(f, kConnMagic, degrees);
  UnitaryConnection a{GridGeometry{static_cast<int>(h.N)},
                      MatrixGroupSpec{static_cast<int>(h.n),
                                      h.kind ? GroupKind::SU : GroupKind::U},
                      TwistData{degrees},
                      MatField(h.N, h.n),
                      MatField(h.N, h.n)};
  read_field(f, a.ax);
  read_field(f, a.ay);
  f.peek();
  if (!f.eof()) throw SnapshotError("snapshot: trailing bytes in " + path);
  return a;
}

void save_section(const LieSection& s, GroupKind kind, const std::string& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw SnapshotError("snapshot: cannot open " + path + " for writing");
  write_header(f, kSectMagic, s.N(), s.n(), kind, s.twist.degrees);
  write_field(f, s.v);
  if (!f) throw SnapshotError("snapshot: write failure on " + path);
}

LieSection load_section(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw SnapshotError("snapshot: cannot open " + path);
  std::vector<long long> degrees;
  const Header h = read_header(f, kSectMagic, degrees);
  LieSection s{GridGeometry{static_cast<int>(h.N)}, TwistData{degrees},
               MatField(h.N, h.n), false};
  read_field(f, s.v);
  f.peek();
  if (!f.eof()) throw SnapshotError("snapshot: trailing bytes in " + path);
  return s;
}

}  // namespace ymflow
