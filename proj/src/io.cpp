#include "mfvdm/io.hpp"

#include <array>
#include <bit>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

namespace mfvdm {

namespace {

static_assert(std::endian::native == std::endian::little, "stack files are written in host byte order");

constexpr std::array<char, 4> kMagic = {'M', 'F', 'V', 'S'};

std::ofstream open_out(const std::string& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot open " + path + " for writing");
  return out;
}

std::ifstream open_in(const std::string& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream in(path, mode);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  return in;
}

template <typename T>
void put(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get(const unsigned char* p) {
  T value;
  std::memcpy(&value, p, sizeof(T));
  return value;
}

std::string number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_number(const std::string& field, const std::string& path) {
  if (field == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (field == "inf") return std::numeric_limits<double>::infinity();
  try {
    std::size_t used = 0;
    const double v = std::stod(field, &used);
    if (used == field.size()) return v;
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::kIo, path + ": malformed number '" + field + "'");
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

/// Rows of a CSV file after checking the header.
std::vector<std::vector<std::string>> read_csv(const std::string& path, const std::string& header) {
  std::ifstream in = open_in(path);
  std::string line;
  if (!std::getline(in, line) || line != header)
    throw Error(ErrorCode::kIo, path + ": expected header '" + header + "'");
  const std::size_t columns = split(header).size();
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    rows.push_back(split(line));
    if (rows.back().size() != columns)
      throw Error(ErrorCode::kIo, path + ": row " + std::to_string(rows.size()) + " has the wrong column count");
  }
  return rows;
}

const char* kManifestHeader =
    "index,group,defocus_um,wavelength_a,cs_mm,pixel_size_a,amplitude_contrast,"
    "r00,r01,r02,r10,r11,r12,r20,r21,r22,shift_x,shift_y,size,support_radius,seed";

}  // namespace

void write_stack(const std::string& path, const ImageStack& stack) {
  const std::uint32_t size = stack.empty() ? 0 : static_cast<std::uint32_t>(stack.front().rows());
  for (const Image& img : stack)
    if (img.rows() != size || img.cols() != size)
      throw Error(ErrorCode::kDimensionMismatch, "write_stack: images must be square and equal-sized");
  std::ofstream out = open_out(path, std::ios::binary);
  out.write(kMagic.data(), 4);
  put<std::uint16_t>(out, 1);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(stack.size()));
  put<std::uint32_t>(out, size);
  put<std::uint16_t>(out, 1);
  const std::array<char, 8> reserved{};
  out.write(reserved.data(), reserved.size());
  std::vector<float> buffer(static_cast<std::size_t>(size) * size);
  for (const Image& img : stack) {
    for (Eigen::Index p = 0; p < img.size(); ++p) buffer[static_cast<std::size_t>(p)] = static_cast<float>(img.data()[p]);
    out.write(reinterpret_cast<const char*>(buffer.data()), static_cast<std::streamsize>(buffer.size() * sizeof(float)));
  }
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path);
}

StackHeader read_stack_header(const std::string& path) {
  std::ifstream in = open_in(path, std::ios::binary);
  std::array<unsigned char, kStackHeaderBytes> raw{};
  if (!in.read(reinterpret_cast<char*>(raw.data()), raw.size()))
    throw Error(ErrorCode::kIo, path + ": truncated header");
  if (std::memcmp(raw.data(), kMagic.data(), 4) != 0) throw Error(ErrorCode::kIo, path + ": not an MFVS stack");
  StackHeader h;
  h.version = get<std::uint16_t>(raw.data() + 4);
  h.count = get<std::uint32_t>(raw.data() + 6);
  h.size = get<std::uint32_t>(raw.data() + 10);
  h.dtype = get<std::uint16_t>(raw.data() + 14);
  if (h.version != 1) throw Error(ErrorCode::kIo, path + ": unsupported version " + std::to_string(h.version));
  if (h.dtype != 1) throw Error(ErrorCode::kIo, path + ": unsupported dtype " + std::to_string(h.dtype));
  return h;
}

ImageStack read_stack(const std::string& path) {
  const StackHeader h = read_stack_header(path);
  std::ifstream in = open_in(path, std::ios::binary);
  in.seekg(static_cast<std::streamoff>(kStackHeaderBytes));
  const std::size_t pixels = static_cast<std::size_t>(h.size) * h.size;
  std::vector<float> buffer(pixels);
  ImageStack stack(h.count, Image(h.size, h.size));
  for (Image& img : stack) {
    if (!in.read(reinterpret_cast<char*>(buffer.data()), static_cast<std::streamsize>(pixels * sizeof(float))))
      throw Error(ErrorCode::kIo, path + ": truncated image data");
    for (std::size_t p = 0; p < pixels; ++p) img.data()[p] = buffer[p];
  }
  if (in.peek() != std::char_traits<char>::eof()) throw Error(ErrorCode::kIo, path + ": trailing bytes after images");
  return stack;
}

void write_manifest(const std::string& path, const DatasetManifest& m) {
  if (m.group_of.size() != m.rotations.size() || m.shifts.size() != m.rotations.size())
    throw Error(ErrorCode::kDimensionMismatch, "write_manifest: per-image fields differ in length");
  std::ofstream out = open_out(path);
  out << kManifestHeader << '\n';
  for (int i = 0; i < m.count(); ++i) {
    const CTFProfile& p = m.groups.at(static_cast<std::size_t>(m.group_of[i]));
    out << i << ',' << m.group_of[i] << ',' << number(p.defocus_um) << ',' << number(p.wavelength_a) << ','
        << number(p.cs_mm) << ',' << number(p.pixel_size_a) << ',' << number(p.amplitude_contrast);
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) out << ',' << number(m.rotations[i](a, b));
    out << ',' << number(m.shifts[i].x()) << ',' << number(m.shifts[i].y()) << ',' << m.size << ','
        << number(m.support_radius) << ',' << m.seed << '\n';
  }
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path);
}

DatasetManifest read_manifest(const std::string& path) {
  const auto rows = read_csv(path, kManifestHeader);
  DatasetManifest m;
  m.snr = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& f = rows[r];
    auto num = [&](std::size_t c) { return parse_number(f[c], path); };
    if (static_cast<std::size_t>(num(0)) != r) throw Error(ErrorCode::kIo, path + ": indices must run 0..n-1 in order");
    const int g = static_cast<int>(num(1));
    if (g < 0) throw Error(ErrorCode::kIo, path + ": negative group");
    CTFProfile p{num(2), num(3), num(4), num(5), num(6)};
    if (static_cast<std::size_t>(g) >= m.groups.size()) m.groups.resize(static_cast<std::size_t>(g) + 1);
    m.groups[static_cast<std::size_t>(g)] = p;
    Rotation3 rot;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) rot(a, b) = num(7 + static_cast<std::size_t>(3 * a + b));
    m.rotations.push_back(rot);
    m.group_of.push_back(g);
    m.shifts.emplace_back(num(16), num(17));
    m.size = static_cast<int>(num(18));
    m.support_radius = num(19);
    m.seed = std::stoull(f[20]);
  }
  return m;
}

void write_graph(const std::string& path, const ViewGraph& graph) {
  std::ofstream out = open_out(path);
  out << "i,j,alpha_ij_radians,d_rid\n";
  for (int i = 0; i < graph.size(); ++i)
    for (const GraphEdge& e : graph.neighbors(i))
      out << i << ',' << e.j << ',' << number(e.alpha) << ',' << number(e.distance) << '\n';
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path);
}

ViewGraph read_graph(const std::string& path, int n) {
  const auto rows = read_csv(path, "i,j,alpha_ij_radians,d_rid");
  ViewGraph g(n);
  for (const auto& f : rows) {
    const double i = parse_number(f[0], path), j = parse_number(f[1], path);
    if (!(i >= 0 && i < n && j >= 0 && j < n))
      throw Error(ErrorCode::kIo, path + ": node index outside [0, " + std::to_string(n) + ")");
    try {
      g.add_edge(static_cast<int>(i), static_cast<int>(j), parse_number(f[2], path), parse_number(f[3], path));
    } catch (const Error& e) {
      throw Error(ErrorCode::kIo, path + ": " + e.what());
    }
  }
  return g;
}

void write_scores(const std::string& path, const EvalReport& report) {
  std::ofstream out = open_out(path);
  out << "index,mse,psnr,ssim\n";
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    const ImageScores& s = report.rows[i];
    out << i << ',' << number(s.mse) << ',' << (std::isinf(s.psnr) ? "inf" : number(s.psnr)) << ','
        << number(s.ssim) << '\n';
  }
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path);
}

void write_histogram(const std::string& path, const Histogram& h) {
  std::ofstream out = open_out(path);
  out << "lower_deg,upper_deg,count\n";
  for (std::size_t b = 0; b < h.counts.size(); ++b)
    out << number(h.lower + b * h.bin_width) << ',' << number(h.lower + (b + 1) * h.bin_width) << ',' << h.counts[b]
        << '\n';
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out = open_out(path);
  out << text;
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path);
}

void ensure_directory(const std::string& path) {
  std::error_code ec;
  std::filesystem::create_directories(path, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create directory " + path + ": " + ec.message());
}

}  // namespace mfvdm
