#include "ovtrack/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <set>
#include <tuple>

#include <json.hpp>

#include "ovtrack/error.hpp"
#include "ovtrack/vecmath.hpp"
#include "png_io.hpp"

namespace ovtrack {

namespace {

using nlohmann::json;

json box_to_json(const BoundingBox& box) {
  return json::array({box.x, box.y, box.w, box.h});
}

BoundingBox box_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 4) {
    throw ParseError(where + ": bbox must be an array [x, y, w, h]");
  }
  BoundingBox box{j[0].get<double>(), j[1].get<double>(), j[2].get<double>(),
                  j[3].get<double>()};
  if (!box.valid()) {
    throw InputError(where + ": bbox extents must be positive and finite");
  }
  return box;
}

std::vector<double> vector_from_json(const json& j, const std::string& where) {
  if (!j.is_array()) throw ParseError(where + ": expected an array of numbers");
  std::vector<double> v;
  v.reserve(j.size());
  for (const auto& x : j) v.push_back(x.get<double>());
  return v;
}

json parse_line(const std::string& line, const std::string& path, int lineno) {
  try {
    return json::parse(line);
  } catch (const json::exception& e) {
    throw ParseError(path + ": line " + std::to_string(lineno) + ": " +
                     e.what());
  }
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ParseError("cannot open " + path + " for writing");
  return out;
}

}  // namespace

std::vector<DetectionFrame> read_detections(const std::string& path) {
  std::ifstream in = open_input(path);
  std::vector<DetectionFrame> frames;
  std::map<std::string, int> last_frame;
  std::size_t appearance_dim = 0;
  std::size_t text_dim = 0;

  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const json j = parse_line(line, path, lineno);
    const std::string where = path + ": line " + std::to_string(lineno);
    if (!j.contains("video") || !j.contains("frame") || !j.contains("detections")) {
      throw ParseError(where + ": frame object needs video/frame/detections");
    }

    DetectionFrame frame;
    frame.video = j["video"].get<std::string>();
    frame.frame = j["frame"].get<int>();

    if (auto it = last_frame.find(frame.video);
        it != last_frame.end() && frame.frame <= it->second) {
      throw InputError(where + ": frames of video '" + frame.video +
                       "' must be strictly increasing");
    }
    last_frame[frame.video] = frame.frame;

    for (const auto& dj : j["detections"]) {
      Detection det;
      det.video = frame.video;
      det.frame = frame.frame;
      det.box = box_from_json(dj.at("bbox"), where);
      det.score = dj.at("score").get<double>();
      if (!(det.score >= 0.0 && det.score <= 1.0)) {
        throw InputError(where + ": score must lie in [0, 1]");
      }
      det.appearance = normalized(vector_from_json(dj.at("embed"), where));
      if (appearance_dim == 0) appearance_dim = det.appearance.size();
      if (det.appearance.size() != appearance_dim) {
        throw InputError(where + ": appearance embedding dimension changed");
      }
      if (dj.contains("text_embed")) {
        det.text_embed = normalized(vector_from_json(dj["text_embed"], where));
        if (text_dim == 0) text_dim = det.text_embed->size();
        if (det.text_embed->size() != text_dim) {
          throw InputError(where + ": text embedding dimension changed");
        }
      }
      frame.detections.push_back(std::move(det));
    }
    frames.push_back(std::move(frame));
  }
  return frames;
}

void write_detections(const std::string& path,
                      const std::vector<DetectionFrame>& frames) {
  std::ofstream out = open_output(path);
  for (const auto& frame : frames) {
    json dets = json::array();
    for (const auto& det : frame.detections) {
      json dj{{"bbox", box_to_json(det.box)},
              {"score", det.score},
              {"embed", det.appearance}};
      if (det.text_embed) dj["text_embed"] = *det.text_embed;
      dets.push_back(std::move(dj));
    }
    const json j{{"video", frame.video},
                 {"frame", frame.frame},
                 {"detections", std::move(dets)}};
    out << j.dump() << '\n';
  }
}

ClassVocabulary read_vocabulary(const std::string& path) {
  std::ifstream in = open_input(path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  ClassVocabulary vocab;
  vocab.background_embed =
      normalized(vector_from_json(j.at("background_embed"), path));
  for (const auto& cj : j.at("classes")) {
    VocabEntry entry;
    entry.class_id = cj.at("id").get<int>();
    entry.name = cj.at("name").get<std::string>();
    entry.embed = normalized(vector_from_json(cj.at("embed"), path));
    const std::string split = cj.at("split").get<std::string>();
    if (split == "base") {
      entry.split = ClassSplit::kBase;
    } else if (split == "novel") {
      entry.split = ClassSplit::kNovel;
    } else {
      throw InputError(path + ": split must be 'base' or 'novel', got '" +
                       split + "'");
    }
    vocab.classes.push_back(std::move(entry));
  }
  vocab.validate();
  return vocab;
}

void write_vocabulary(const std::string& path, const ClassVocabulary& vocab) {
  json classes = json::array();
  for (const auto& entry : vocab.classes) {
    classes.push_back(
        {{"id", entry.class_id},
         {"name", entry.name},
         {"embed", entry.embed},
         {"split", entry.split == ClassSplit::kBase ? "base" : "novel"}});
  }
  const json j{{"background_embed", vocab.background_embed},
               {"classes", std::move(classes)}};
  std::ofstream out = open_output(path);
  out << j.dump(2) << '\n';
}

GroundTruthData read_ground_truth(const std::string& path) {
  std::ifstream in = open_input(path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  GroundTruthData gt;
  std::set<std::pair<int, std::pair<std::string, int>>> seen;
  for (const auto& aj : j.at("annotations")) {
    Annotation anno;
    anno.track_id = aj.at("track_id").get<int>();
    anno.video = aj.at("video").get<std::string>();
    anno.frame = aj.at("frame").get<int>();
    anno.box = box_from_json(aj.at("bbox"), path);
    anno.class_id = aj.at("category_id").get<int>();
    if (!seen.insert({anno.track_id, {anno.video, anno.frame}}).second) {
      throw InputError(path + ": duplicate annotation for track " +
                       std::to_string(anno.track_id) + " in frame " +
                       std::to_string(anno.frame));
    }
    gt.annotations.push_back(std::move(anno));
  }
  for (const auto& cj : j.at("categories")) {
    gt.categories.push_back(
        {cj.at("id").get<int>(), cj.at("name").get<std::string>()});
  }
  return gt;
}

void write_ground_truth(const std::string& path, const GroundTruthData& gt) {
  json annos = json::array();
  for (const auto& anno : gt.annotations) {
    annos.push_back({{"track_id", anno.track_id},
                     {"video", anno.video},
                     {"frame", anno.frame},
                     {"bbox", box_to_json(anno.box)},
                     {"category_id", anno.class_id}});
  }
  json cats = json::array();
  for (const auto& cat : gt.categories) {
    cats.push_back({{"id", cat.id}, {"name", cat.name}});
  }
  const json j{{"annotations", std::move(annos)},
               {"categories", std::move(cats)}};
  std::ofstream out = open_output(path);
  out << j.dump(2) << '\n';
}

std::vector<TrackRecord> read_tracks(const std::string& path) {
  std::ifstream in = open_input(path);
  std::vector<TrackRecord> records;
  std::set<std::tuple<std::string, int, int>> seen;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const json j = parse_line(line, path, lineno);
    const std::string where = path + ": line " + std::to_string(lineno);
    TrackRecord rec;
    rec.video = j.at("video").get<std::string>();
    rec.frame = j.at("frame").get<int>();
    rec.track_id = j.at("track_id").get<int>();
    rec.box = box_from_json(j.at("bbox"), where);
    rec.score = j.at("score").get<double>();
    rec.class_id = j.at("category_id").get<int>();
    if (!seen.insert({rec.video, rec.frame, rec.track_id}).second) {
      throw InputError(where + ": duplicate (video, frame, track_id) row");
    }
    records.push_back(std::move(rec));
  }
  return records;
}

void write_tracks(const std::string& path,
                  const std::vector<TrackRecord>& records) {
  std::ofstream out = open_output(path);
  for (const auto& rec : records) {
    const json j{{"video", rec.video},     {"frame", rec.frame},
                 {"track_id", rec.track_id}, {"bbox", box_to_json(rec.box)},
                 {"score", rec.score},     {"category_id", rec.class_id}};
    out << j.dump() << '\n';
  }
}

std::vector<std::pair<std::string, std::vector<std::vector<Detection>>>>
group_by_video(const std::vector<DetectionFrame>& frames) {
  std::vector<std::pair<std::string, std::vector<std::vector<Detection>>>> out;
  std::map<std::string, std::size_t> index;
  std::map<std::string, int> last_frame;
  for (const auto& frame : frames) {
    auto it = index.find(frame.video);
    if (it == index.end()) {
      index[frame.video] = out.size();
      out.push_back({frame.video, {}});
      it = index.find(frame.video);
    }
    if (auto lf = last_frame.find(frame.video);
        lf != last_frame.end() && frame.frame <= lf->second) {
      throw InputError("detections: frames of video '" + frame.video +
                       "' must be strictly increasing");
    }
    last_frame[frame.video] = frame.frame;
    out[it->second].second.push_back(frame.detections);
  }
  return out;
}

namespace {

constexpr char kGridMagic[4] = {'O', 'V', 'T', 'G'};

void put_u32(std::ofstream& out, std::uint32_t v) {
  char bytes[4] = {static_cast<char>(v & 0xff),
                   static_cast<char>((v >> 8) & 0xff),
                   static_cast<char>((v >> 16) & 0xff),
                   static_cast<char>((v >> 24) & 0xff)};
  out.write(bytes, 4);
}

std::uint32_t get_u32(std::ifstream& in, const std::string& path) {
  unsigned char bytes[4];
  if (!in.read(reinterpret_cast<char*>(bytes), 4)) {
    throw ParseError(path + ": truncated grid header");
  }
  return static_cast<std::uint32_t>(bytes[0]) |
         (static_cast<std::uint32_t>(bytes[1]) << 8) |
         (static_cast<std::uint32_t>(bytes[2]) << 16) |
         (static_cast<std::uint32_t>(bytes[3]) << 24);
}

bool has_png_extension(const std::string& path) {
  if (path.size() < 4) return false;
  std::string ext = path.substr(path.size() - 4);
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext == ".png";
}

LatentGrid read_raw_grid(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kGridMagic, 4) != 0) {
    throw ParseError(path + ": missing OVTG magic");
  }
  LatentGrid grid;
  grid.width = static_cast<int>(get_u32(in, path));
  grid.height = static_cast<int>(get_u32(in, path));
  grid.channels = static_cast<int>(get_u32(in, path));
  if (grid.width <= 0 || grid.height <= 0 || grid.channels <= 0) {
    throw InputError(path + ": grid dimensions must be positive");
  }
  const std::size_t count =
      static_cast<std::size_t>(grid.width) * grid.height * grid.channels;
  grid.values.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    unsigned char bytes[4];
    if (!in.read(reinterpret_cast<char*>(bytes), 4)) {
      throw ParseError(path + ": truncated grid payload");
    }
    std::uint32_t bits = static_cast<std::uint32_t>(bytes[0]) |
                         (static_cast<std::uint32_t>(bytes[1]) << 8) |
                         (static_cast<std::uint32_t>(bytes[2]) << 16) |
                         (static_cast<std::uint32_t>(bytes[3]) << 24);
    float f;
    std::memcpy(&f, &bits, sizeof(f));
    grid.values[i] = static_cast<double>(f);
  }
  grid.validate();
  return grid;
}

void write_raw_grid(const std::string& path, const LatentGrid& grid) {
  grid.validate();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ParseError("cannot open " + path + " for writing");
  out.write(kGridMagic, 4);
  put_u32(out, static_cast<std::uint32_t>(grid.width));
  put_u32(out, static_cast<std::uint32_t>(grid.height));
  put_u32(out, static_cast<std::uint32_t>(grid.channels));
  for (double v : grid.values) {
    const float f = static_cast<float>(v);
    std::uint32_t bits;
    std::memcpy(&bits, &f, sizeof(bits));
    char bytes[4] = {static_cast<char>(bits & 0xff),
                     static_cast<char>((bits >> 8) & 0xff),
                     static_cast<char>((bits >> 16) & 0xff),
                     static_cast<char>((bits >> 24) & 0xff)};
    out.write(bytes, 4);
  }
}

}  // namespace

LatentGrid read_grid(const std::string& path) {
  return has_png_extension(path) ? read_png_grid(path) : read_raw_grid(path);
}

void write_grid(const std::string& path, const LatentGrid& grid) {
  if (has_png_extension(path)) {
    write_png_grid(path, grid);
  } else {
    write_raw_grid(path, grid);
  }
}

ForegroundMask read_mask(const std::string& path) {
  ForegroundMask mask;
  if (has_png_extension(path)) {
    // 8-bit PNG masks are binary: bright pixels are foreground.
    int w = 0, h = 0, c = 0;
    const std::vector<unsigned char> bytes =
        detail::read_png_bytes(path, &w, &h, &c);
    if (c != 1) throw InputError(path + ": mask must be single-channel");
    mask.width = w;
    mask.height = h;
    mask.values.reserve(bytes.size());
    for (unsigned char b : bytes) mask.values.push_back(b >= 128 ? 1.0 : 0.0);
    return mask;
  }
  const LatentGrid grid = read_raw_grid(path);
  if (grid.channels != 1) {
    throw InputError(path + ": mask must be single-channel");
  }
  mask.width = grid.width;
  mask.height = grid.height;
  mask.values.reserve(grid.values.size());
  for (double v : grid.values) {
    mask.values.push_back(std::clamp(v, 0.0, 1.0));
  }
  return mask;
}

void write_mask(const std::string& path, const ForegroundMask& mask) {
  if (has_png_extension(path)) {
    std::vector<unsigned char> bytes;
    bytes.reserve(mask.values.size());
    for (double v : mask.values) {
      bytes.push_back(static_cast<unsigned char>(
          std::lround(std::clamp(v, 0.0, 1.0) * 255.0)));
    }
    detail::write_png_bytes(path, mask.width, mask.height, 1, bytes.data());
    return;
  }
  LatentGrid grid;
  grid.width = mask.width;
  grid.height = mask.height;
  grid.channels = 1;
  grid.values = mask.values;
  write_raw_grid(path, grid);
}

}  // namespace ovtrack
