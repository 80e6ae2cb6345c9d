#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cbf_surrogate/matrix.hpp"

namespace cbf_surrogate {

enum class Group { NC, MCI };
enum class Sex { F, M };
enum class Lobe { frontal, temporal, parietal, occipital, other };

std::string_view to_string(Group g);
std::string_view to_string(Sex s);
std::string_view to_string(Lobe l);
std::optional<Lobe> parse_lobe(std::string_view s);

inline constexpr Lobe kLobes[] = {Lobe::frontal, Lobe::temporal, Lobe::parietal,
                                  Lobe::occipital};

struct SubjectRecord {
  std::string subject_id;
  Group group = Group::NC;
  double age = 0.0;
  Sex sex = Sex::F;
  double education = 0.0;
  int mmse = 30;
  double tr = 0.0;
  std::filesystem::path timeseries_path;
  std::filesystem::path cbf_path;

  friend bool operator==(const SubjectRecord&, const SubjectRecord&) = default;
};

struct AtlasEntry {
  std::string roi;
  Lobe lobe = Lobe::other;
  bool in_lobar_gm = false;

  friend bool operator==(const AtlasEntry&, const AtlasEntry&) = default;
};

class RoiAtlas {
 public:
  RoiAtlas() = default;
  // Validates uniqueness, lobe labels and that some entry is lobar gray matter.
  explicit RoiAtlas(std::vector<AtlasEntry> entries);

  const std::vector<AtlasEntry>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  std::optional<std::size_t> find(std::string_view roi) const;
  const AtlasEntry& at(std::string_view roi) const;

  friend bool operator==(const RoiAtlas&, const RoiAtlas&) = default;

 private:
  std::vector<AtlasEntry> entries_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

struct RoiTimeSeries {
  std::vector<std::string> roi_names;
  Matrix samples;  // rows = timepoints, cols = ROIs
  double tr = 0.0;

  std::optional<std::size_t> column_of(std::string_view roi) const;
  friend bool operator==(const RoiTimeSeries&, const RoiTimeSeries&) = default;
};

// Minimum timepoints accepted at load.
inline constexpr std::size_t kMinTimepoints = 64;

struct CbfTable {
  std::map<std::string, double, std::less<>> cbf;  // ml/100g/min

  double at(std::string_view roi) const;
  friend bool operator==(const CbfTable&, const CbfTable&) = default;
};

enum class RegionKind { roi, lobe, total_lobar_gm };

struct RegionKey {
  RegionKind kind = RegionKind::total_lobar_gm;
  std::string name = "lobar_gm";

  static RegionKey roi(std::string name) { return {RegionKind::roi, std::move(name)}; }
  static RegionKey lobe(Lobe l);
  static RegionKey total() { return {RegionKind::total_lobar_gm, "lobar_gm"}; }

  // "roi:<name>", "lobe:<frontal|temporal|parietal|occipital>" or "total".
  static RegionKey parse(std::string_view text);

  std::string_view kind_name() const;
  std::string label() const;  // kind_name + ":" + name

  friend auto operator<=>(const RegionKey&, const RegionKey&) = default;
};

// One subject with its validated, atlas-harmonized data.
struct SubjectData {
  SubjectRecord record;
  RoiTimeSeries timeseries;  // columns in atlas order
  CbfTable cbf;

  friend bool operator==(const SubjectData&, const SubjectData&) = default;
};

struct Cohort {
  std::vector<SubjectData> subjects;
  RoiAtlas atlas;

  std::size_t size() const noexcept { return subjects.size(); }
  friend bool operator==(const Cohort&, const Cohort&) = default;
};

RoiAtlas load_atlas(const std::filesystem::path& path);
// Paths inside the manifest are resolved relative to the manifest's directory.
std::vector<SubjectRecord> load_manifest(const std::filesystem::path& path);
RoiTimeSeries load_timeseries(const std::filesystem::path& path, double tr);
CbfTable load_cbf(const std::filesystem::path& path);

// Loads everything and reorders every time series into atlas column order.
// Throws ValidationError on missing files, duplicate subjects, out-of-range
// fields or any ROI mismatch between time series, CBF table and atlas.
Cohort load_cohort(const std::filesystem::path& manifest_path,
                   const std::filesystem::path& atlas_path);

// Atlas ROIs that make up a region (lobar gray matter only for lobe/total keys).
std::vector<std::string> region_members(const RoiAtlas& atlas, const RegionKey& key);

struct RegionSignal {
  std::vector<double> series;
  double cbf = 0.0;
};

// Unweighted mean over member ROIs of both the time series and CBF. A roi key
// passes its column and value through unchanged.
RegionSignal aggregate_region(const RoiTimeSeries& ts, const CbfTable& cbf,
                              const RoiAtlas& atlas, const RegionKey& key);

}  // namespace cbf_surrogate
