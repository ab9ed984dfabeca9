#pragma once

#include "mfvdm/common.hpp"
#include "mfvdm/initial_graph.hpp"
#include "mfvdm/metrics.hpp"
#include "mfvdm/simulation.hpp"

#include <cstdint>
#include <string>

namespace mfvdm {

/// Stack files: a 24-byte little-endian header followed by n L x L images as
/// row-major f32.
///
///   offset 0   char[4]  "MFVS"
///   offset 4   u16      version (1)
///   offset 6   u32      n
///   offset 10  u32      L
///   offset 14  u16      dtype (1 = f32)
///   offset 16  u8[8]    reserved, zero
struct StackHeader {
  std::uint16_t version = 1;
  std::uint32_t count = 0;
  std::uint32_t size = 0;
  std::uint16_t dtype = 1;
};

inline constexpr std::size_t kStackHeaderBytes = 24;

/// Values are rounded to f32. Throws Error(kIo) on write failure and
/// Error(kDimensionMismatch) if the images are not square and equal-sized.
void write_stack(const std::string& path, const ImageStack& stack);
/// Throws Error(kIo) on a bad magic, version, dtype or truncated file.
ImageStack read_stack(const std::string& path);
StackHeader read_stack_header(const std::string& path);

/// Manifest CSV, one row per image:
///   index,group,defocus_um,wavelength_a,cs_mm,pixel_size_a,amplitude_contrast,
///   r00,r01,r02,r10,r11,r12,r20,r21,r22,shift_x,shift_y,size,support_radius,seed
/// Rotation entries r_ab are the rows of the orientation matrix. Noise fields
/// and the SNR are not stored.
void write_manifest(const std::string& path, const DatasetManifest& manifest);
DatasetManifest read_manifest(const std::string& path);

/// Graph CSV with header i,j,alpha_ij_radians,d_rid, one row per stored
/// (directed) edge. The last column holds the edge distance, or the affinity
/// for refined graphs; "nan" when absent.
void write_graph(const std::string& path, const ViewGraph& graph);
/// n is the node count; a row naming a node outside [0, n) throws Error(kIo).
ViewGraph read_graph(const std::string& path, int n);

/// index,mse,psnr,ssim per image.
void write_scores(const std::string& path, const EvalReport& report);
/// lower_deg,upper_deg,count per bin.
void write_histogram(const std::string& path, const Histogram& histogram);

void write_text(const std::string& path, const std::string& text);

/// Creates the directory and its parents; Error(kIo) on failure.
void ensure_directory(const std::string& path);

}  // namespace mfvdm
