#include "cbf_surrogate/datamodel.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "cbf_surrogate/csv.hpp"
#include "cbf_surrogate/error.hpp"

namespace cbf_surrogate {

std::string_view to_string(Group g) { return g == Group::NC ? "NC" : "MCI"; }
std::string_view to_string(Sex s) { return s == Sex::F ? "F" : "M"; }

std::string_view to_string(Lobe l) {
  switch (l) {
    case Lobe::frontal: return "frontal";
    case Lobe::temporal: return "temporal";
    case Lobe::parietal: return "parietal";
    case Lobe::occipital: return "occipital";
    case Lobe::other: return "other";
  }
  return "other";
}

std::optional<Lobe> parse_lobe(std::string_view s) {
  for (Lobe l : {Lobe::frontal, Lobe::temporal, Lobe::parietal, Lobe::occipital, Lobe::other}) {
    if (s == to_string(l)) return l;
  }
  return std::nullopt;
}

RoiAtlas::RoiAtlas(std::vector<AtlasEntry> entries) : entries_(std::move(entries)) {
  bool any_lobar = false;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto& e = entries_[i];
    if (e.roi.empty()) throw ValidationError("atlas: empty roi name");
    if (!index_.emplace(e.roi, i).second) {
      throw ValidationError("atlas: duplicate roi '" + e.roi + "'");
    }
    if (e.in_lobar_gm && e.lobe == Lobe::other) {
      throw ValidationError("atlas: roi '" + e.roi + "' is lobar gray matter but has lobe 'other'");
    }
    any_lobar = any_lobar || e.in_lobar_gm;
  }
  if (!any_lobar) throw ValidationError("atlas: no roi has in_lobar_gm = 1");
}

std::optional<std::size_t> RoiAtlas::find(std::string_view roi) const {
  auto it = index_.find(roi);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

const AtlasEntry& RoiAtlas::at(std::string_view roi) const {
  auto idx = find(roi);
  if (!idx) throw ValidationError("roi not in atlas: '" + std::string(roi) + "'");
  return entries_[*idx];
}

std::optional<std::size_t> RoiTimeSeries::column_of(std::string_view roi) const {
  for (std::size_t i = 0; i < roi_names.size(); ++i) {
    if (roi_names[i] == roi) return i;
  }
  return std::nullopt;
}

double CbfTable::at(std::string_view roi) const {
  auto it = cbf.find(roi);
  if (it == cbf.end()) throw ValidationError("CBF table lacks roi '" + std::string(roi) + "'");
  return it->second;
}

RegionKey RegionKey::lobe(Lobe l) {
  if (l == Lobe::other) throw ValidationError("region key: 'other' is not a lobe region");
  return {RegionKind::lobe, std::string(to_string(l))};
}

RegionKey RegionKey::parse(std::string_view text) {
  const std::string t = csv::trim(text);
  if (t == "total" || t == "total:lobar_gm" || t == "total_lobar_gm:lobar_gm") return total();
  const auto colon = t.find(':');
  if (colon == std::string::npos) {
    throw ValidationError("region '" + t + "': expected roi:<name>, lobe:<name> or total");
  }
  const std::string kind = t.substr(0, colon);
  const std::string name = csv::trim(t.substr(colon + 1));
  if (kind == "roi") {
    if (name.empty()) throw ValidationError("region '" + t + "': empty roi name");
    return roi(name);
  }
  if (kind == "lobe") {
    auto l = parse_lobe(name);
    if (!l || *l == Lobe::other) throw ValidationError("region '" + t + "': unknown lobe");
    return lobe(*l);
  }
  throw ValidationError("region '" + t + "': unknown kind '" + kind + "'");
}

std::string_view RegionKey::kind_name() const {
  switch (kind) {
    case RegionKind::roi: return "roi";
    case RegionKind::lobe: return "lobe";
    case RegionKind::total_lobar_gm: return "total_lobar_gm";
  }
  return "roi";
}

std::string RegionKey::label() const { return std::string(kind_name()) + ":" + name; }

RoiAtlas load_atlas(const std::filesystem::path& path) {
  auto table = csv::read(path);
  csv::require_header(table, {"roi", "lobe", "in_lobar_gm"});
  std::vector<AtlasEntry> entries;
  entries.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    auto lobe = parse_lobe(row[1]);
    if (!lobe) {
      throw ValidationError(path.string() + ": row " + std::to_string(r + 1) +
                            ": invalid lobe '" + row[1] + "'");
    }
    if (row[2] != "0" && row[2] != "1") {
      throw ValidationError(path.string() + ": row " + std::to_string(r + 1) +
                            ": in_lobar_gm must be 0 or 1");
    }
    entries.push_back({row[0], *lobe, row[2] == "1"});
  }
  try {
    return RoiAtlas(std::move(entries));
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

std::vector<SubjectRecord> load_manifest(const std::filesystem::path& path) {
  auto table = csv::read(path);
  csv::require_header(table, {"subject_id", "group", "age", "sex", "education", "mmse", "tr",
                              "timeseries_path", "cbf_path"});
  const auto base = path.parent_path();
  std::vector<SubjectRecord> out;
  std::set<std::string> seen;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const auto where = path.string() + ": row " + std::to_string(r + 1) + ": ";
    SubjectRecord s;
    s.subject_id = row[0];
    if (s.subject_id.empty()) throw ValidationError(where + "empty subject_id");
    if (!seen.insert(s.subject_id).second) {
      throw ValidationError(where + "duplicate subject '" + s.subject_id + "'");
    }
    if (row[1] == "NC") {
      s.group = Group::NC;
    } else if (row[1] == "MCI") {
      s.group = Group::MCI;
    } else {
      throw ValidationError(where + "group must be NC or MCI");
    }
    s.age = csv::parse_double(row[2], table, r);
    if (!(s.age > 0)) throw ValidationError(where + "age must be > 0");
    if (row[3] == "F") {
      s.sex = Sex::F;
    } else if (row[3] == "M") {
      s.sex = Sex::M;
    } else {
      throw ValidationError(where + "sex must be F or M");
    }
    s.education = csv::parse_double(row[4], table, r);
    if (s.education < 0) throw ValidationError(where + "education must be >= 0");
    const long mmse = csv::parse_int(row[5], table, r);
    if (mmse < 0 || mmse > 30) {
      throw ValidationError(where + "mmse out of range [0,30]: " + row[5]);
    }
    s.mmse = static_cast<int>(mmse);
    s.tr = csv::parse_double(row[6], table, r);
    if (!(s.tr > 0)) throw ValidationError(where + "tr must be > 0");
    const std::filesystem::path ts = row[7];
    const std::filesystem::path cbf = row[8];
    s.timeseries_path = ts.is_absolute() ? ts : base / ts;
    s.cbf_path = cbf.is_absolute() ? cbf : base / cbf;
    for (const auto& p : {s.timeseries_path, s.cbf_path}) {
      if (!std::filesystem::exists(p)) throw ValidationError(where + "missing file " + p.string());
    }
    out.push_back(std::move(s));
  }
  if (out.empty()) throw ValidationError(path.string() + ": no subjects");
  return out;
}

RoiTimeSeries load_timeseries(const std::filesystem::path& path, double tr) {
  auto table = csv::read(path);
  RoiTimeSeries ts;
  ts.tr = tr;
  ts.roi_names = table.header;
  std::set<std::string> names;
  for (const auto& n : ts.roi_names) {
    if (n.empty()) throw ValidationError(path.string() + ": empty roi name in header");
    if (!names.insert(n).second) {
      throw ValidationError(path.string() + ": duplicate roi column '" + n + "'");
    }
  }
  if (table.rows.size() < kMinTimepoints) {
    throw ValidationError(path.string() + ": " + std::to_string(table.rows.size()) +
                          " timepoints, need at least " + std::to_string(kMinTimepoints));
  }
  ts.samples = Matrix(table.rows.size(), ts.roi_names.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    for (std::size_t c = 0; c < ts.roi_names.size(); ++c) {
      ts.samples(r, c) = csv::parse_double(table.rows[r][c], table, r);
    }
  }
  return ts;
}

CbfTable load_cbf(const std::filesystem::path& path) {
  auto table = csv::read(path);
  csv::require_header(table, {"roi", "cbf"});
  CbfTable out;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const double v = csv::parse_double(table.rows[r][1], table, r);
    if (!out.cbf.emplace(table.rows[r][0], v).second) {
      throw ValidationError(path.string() + ": duplicate roi '" + table.rows[r][0] + "'");
    }
  }
  return out;
}

namespace {

RoiTimeSeries harmonize(const RoiTimeSeries& ts, const RoiAtlas& atlas,
                        const std::filesystem::path& source) {
  RoiTimeSeries out;
  out.tr = ts.tr;
  out.samples = Matrix(ts.samples.rows(), atlas.size());
  for (std::size_t a = 0; a < atlas.size(); ++a) {
    const auto& roi = atlas.entries()[a].roi;
    auto col = ts.column_of(roi);
    if (!col) {
      throw ValidationError(source.string() + ": time series lacks atlas roi '" + roi + "'");
    }
    out.roi_names.push_back(roi);
    for (std::size_t t = 0; t < ts.samples.rows(); ++t) out.samples(t, a) = ts.samples(t, *col);
  }
  for (const auto& name : ts.roi_names) {
    if (!atlas.find(name)) {
      throw ValidationError(source.string() + ": time series roi '" + name + "' not in atlas");
    }
  }
  return out;
}

}  // namespace

Cohort load_cohort(const std::filesystem::path& manifest_path,
                   const std::filesystem::path& atlas_path) {
  Cohort cohort;
  cohort.atlas = load_atlas(atlas_path);
  for (auto& rec : load_manifest(manifest_path)) {
    SubjectData s;
    s.timeseries = harmonize(load_timeseries(rec.timeseries_path, rec.tr), cohort.atlas,
                             rec.timeseries_path);
    s.cbf = load_cbf(rec.cbf_path);
    for (const auto& e : cohort.atlas.entries()) {
      if (!s.cbf.cbf.contains(e.roi)) {
        throw ValidationError(rec.cbf_path.string() + ": CBF table lacks atlas roi '" + e.roi +
                              "'");
      }
    }
    for (const auto& [roi, value] : s.cbf.cbf) {
      if (!cohort.atlas.find(roi)) {
        throw ValidationError(rec.cbf_path.string() + ": CBF roi '" + roi + "' not in atlas");
      }
    }
    s.record = std::move(rec);
    cohort.subjects.push_back(std::move(s));
  }
  return cohort;
}

std::vector<std::string> region_members(const RoiAtlas& atlas, const RegionKey& key) {
  std::vector<std::string> members;
  switch (key.kind) {
    case RegionKind::roi:
      atlas.at(key.name);
      members.push_back(key.name);
      break;
    case RegionKind::lobe: {
      auto lobe = parse_lobe(key.name);
      if (!lobe || *lobe == Lobe::other) {
        throw ValidationError("region " + key.label() + ": not one of the four lobes");
      }
      for (const auto& e : atlas.entries()) {
        if (e.in_lobar_gm && e.lobe == *lobe) members.push_back(e.roi);
      }
      break;
    }
    case RegionKind::total_lobar_gm:
      for (const auto& e : atlas.entries()) {
        if (e.in_lobar_gm) members.push_back(e.roi);
      }
      break;
  }
  if (members.empty()) throw ValidationError("region " + key.label() + ": no member rois");
  return members;
}

RegionSignal aggregate_region(const RoiTimeSeries& ts, const CbfTable& cbf,
                              const RoiAtlas& atlas, const RegionKey& key) {
  const auto members = region_members(atlas, key);
  std::vector<std::size_t> cols;
  cols.reserve(members.size());
  for (const auto& m : members) {
    auto c = ts.column_of(m);
    if (!c) throw ValidationError("time series lacks roi '" + m + "'");
    cols.push_back(*c);
  }

  RegionSignal out;
  const std::size_t n = ts.samples.rows();
  out.series.assign(n, 0.0);
  if (cols.size() == 1) {
    for (std::size_t t = 0; t < n; ++t) out.series[t] = ts.samples(t, cols[0]);
    out.cbf = cbf.at(members[0]);
    return out;
  }
  const double inv = 1.0 / static_cast<double>(cols.size());
  for (std::size_t t = 0; t < n; ++t) {
    double sum = 0.0;
    for (auto c : cols) sum += ts.samples(t, c);
    out.series[t] = sum * inv;
  }
  double sum = 0.0;
  for (const auto& m : members) sum += cbf.at(m);
  out.cbf = sum * inv;
  return out;
}

}  // namespace cbf_surrogate
