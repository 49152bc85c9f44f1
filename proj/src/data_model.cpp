#include "touchauth/data_model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <tuple>

#include "touchauth/rng.hpp"
#include "touchauth/text_util.hpp"

namespace touchauth {

std::string to_string(Gender g) {
  switch (g) {
    case Gender::male: return "male";
    case Gender::female: return "female";
    case Gender::unspecified: return "unspecified";
  }
  return "unspecified";
}

Gender gender_from_string(const std::string& s) {
  if (s == "male") return Gender::male;
  if (s == "female") return Gender::female;
  if (s == "unspecified") return Gender::unspecified;
  throw DataError("unknown gender value '" + s + "'");
}

std::vector<std::string> Corpus::user_ids() const {
  std::vector<std::string> ids;
  for (const auto& s : swipes) {
    if (std::find(ids.begin(), ids.end(), s.user_id) == ids.end()) ids.push_back(s.user_id);
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& s, std::size_t line_no) {
  double v = 0.0;
  const char* begin = s.data();
  const char* end = begin + s.size();
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc{} || ptr != end || !std::isfinite(v)) {
    throw MalformedRowError(line_no, "cannot parse number '" + s + "'");
  }
  return v;
}

long parse_long(const std::string& s, std::size_t line_no) {
  long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw MalformedRowError(line_no, "cannot parse integer '" + s + "'");
  }
  return v;
}

void sort_corpus(Corpus& corpus) {
  std::sort(corpus.swipes.begin(), corpus.swipes.end(), [](const SwipeGesture& a, const SwipeGesture& b) {
    return std::tie(a.user_id, a.events.front().t_ms, a.swipe_id) <
           std::tie(b.user_id, b.events.front().t_ms, b.swipe_id);
  });
}

}  // namespace

Corpus parse_swipe_csv(const std::filesystem::path& path, ParseStats* stats) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");

  std::string line;
  if (!std::getline(in, line)) throw DataError("'" + path.string() + "' is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();

  bool has_axes;
  if (line == kSwipeCsvHeader) {
    has_axes = true;
  } else if (line == kSwipeCsvHeaderNoAxes) {
    has_axes = false;
  } else {
    throw DataError("'" + path.string() + "': unrecognized header '" + line + "'");
  }
  const std::size_t n_cols = has_axes ? 9 : 7;

  struct Row {
    long event_index;
    TouchEvent event;
  };
  // keyed by (user_id, swipe_id); insertion order is irrelevant, swipes get
  // re-sorted below.
  std::map<std::pair<std::string, std::string>, std::vector<Row>> groups;
  std::string dataset_id;
  ParseStats local;

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_line(line);
    if (fields.size() != n_cols) {
      throw MalformedRowError(line_no, "expected " + std::to_string(n_cols) + " fields, got " +
                                           std::to_string(fields.size()));
    }
    if (dataset_id.empty()) {
      dataset_id = fields[0];
    } else if (fields[0] != dataset_id) {
      throw MalformedRowError(line_no, "dataset_id '" + fields[0] + "' differs from '" + dataset_id + "'");
    }
    Row row;
    row.event_index = parse_long(fields[3], line_no);
    row.event.t_ms = parse_double(fields[4], line_no);
    row.event.x = parse_double(fields[5], line_no);
    row.event.y = parse_double(fields[6], line_no);
    if (has_axes) {
      row.event.major_axis = parse_double(fields[7], line_no);
      row.event.minor_axis = parse_double(fields[8], line_no);
      if (row.event.major_axis < row.event.minor_axis || row.event.minor_axis < 0.0) {
        throw MalformedRowError(line_no, "fingertip axes must satisfy major >= minor >= 0");
      }
    }
    groups[{fields[1], fields[2]}].push_back(row);
    ++local.rows;
  }

  Corpus corpus;
  corpus.dataset_id = dataset_id;
  for (auto& [key, rows] : groups) {
    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
      return a.event_index < b.event_index;
    });
    bool monotone = true;
    for (std::size_t i = 1; i < rows.size(); ++i) {
      if (rows[i].event.t_ms < rows[i - 1].event.t_ms) {
        monotone = false;
        break;
      }
    }
    if (!monotone) {
      ++local.swipes_dropped_nonmonotone;
      continue;
    }
    SwipeGesture swipe;
    swipe.dataset_id = dataset_id;
    swipe.user_id = key.first;
    swipe.swipe_id = key.second;
    swipe.events.reserve(rows.size());
    for (const auto& r : rows) swipe.events.push_back(r.event);
    corpus.swipes.push_back(std::move(swipe));
    ++local.swipes_parsed;
  }
  sort_corpus(corpus);
  if (stats) *stats = local;
  return corpus;
}

void write_swipe_csv(const Corpus& corpus, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << kSwipeCsvHeader << '\n';
  for (const auto& swipe : corpus.swipes) {
    for (std::size_t i = 0; i < swipe.events.size(); ++i) {
      const auto& e = swipe.events[i];
      out << corpus.dataset_id << ',' << swipe.user_id << ',' << swipe.swipe_id << ',' << i << ','
          << format_double(e.t_ms) << ',' << format_double(e.x) << ',' << format_double(e.y) << ','
          << format_double(e.major_axis) << ',' << format_double(e.minor_axis) << '\n';
    }
  }
}

std::map<std::string, Gender> parse_gender_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line)) throw DataError("'" + path.string() + "' is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kGenderCsvHeader) {
    throw DataError("'" + path.string() + "': unrecognized header '" + line + "'");
  }
  std::map<std::string, Gender> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_line(line);
    if (fields.size() != 2) throw MalformedRowError(line_no, "expected 2 fields");
    out[fields[0]] = gender_from_string(fields[1]);
  }
  return out;
}

void write_gender_csv(const Corpus& corpus, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << kGenderCsvHeader << '\n';
  for (const auto& [user, meta] : corpus.user_metadata) {
    out << user << ',' << to_string(meta.gender) << '\n';
  }
}

Corpus filter_short_swipes(const Corpus& corpus) {
  Corpus out;
  out.dataset_id = corpus.dataset_id;
  out.user_metadata = corpus.user_metadata;
  for (const auto& s : corpus.swipes) {
    if (s.size() >= 6) out.swipes.push_back(s);
  }
  return out;
}

SplitPlan split_train_test(const Corpus& corpus, double train_fraction, std::uint64_t /*seed*/) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw ConfigError("train_fraction must lie in (0,1)");
  }
  std::map<std::string, std::vector<const SwipeGesture*>> by_user;
  for (const auto& s : corpus.swipes) by_user[s.user_id].push_back(&s);

  SplitPlan plan;
  plan.train_fraction = train_fraction;
  for (auto& [user, swipes] : by_user) {
    if (swipes.size() < 2) throw UserTooSmallError(user);
    std::sort(swipes.begin(), swipes.end(), [](const SwipeGesture* a, const SwipeGesture* b) {
      return std::tie(a->events.front().t_ms, a->swipe_id) < std::tie(b->events.front().t_ms, b->swipe_id);
    });
    const auto n_train = static_cast<std::size_t>(
        std::floor(train_fraction * static_cast<double>(swipes.size())));
    UserSplit split;
    for (std::size_t i = 0; i < swipes.size(); ++i) {
      (i < n_train ? split.train_ids : split.test_ids).push_back(swipes[i]->swipe_id);
    }
    plan.per_user[user] = std::move(split);
  }
  return plan;
}

namespace {

struct UserProfile {
  double start_x, start_y;
  double end_x, end_y;
  double duration_ms;
  double curvature;  // signed offset of the Bezier control point, px
  double tip_major;
  double tip_minor;
};

UserProfile draw_profile(Rng& rng, double spread) {
  UserProfile p;
  p.start_x = 180.0 + spread * rng.normal(0.0, 70.0);
  p.start_y = 950.0 + spread * rng.normal(0.0, 160.0);
  p.end_x = 540.0 + spread * rng.normal(0.0, 70.0);
  p.end_y = 420.0 + spread * rng.normal(0.0, 160.0);
  p.duration_ms = std::max(120.0, 300.0 + spread * rng.normal(0.0, 70.0));
  p.curvature = spread * rng.normal(0.0, 45.0);
  p.tip_major = std::max(3.0, 9.0 + spread * rng.normal(0.0, 1.6));
  p.tip_minor = std::clamp(p.tip_major * (0.65 + 0.08 * rng.normal()), 0.15 * p.tip_major, p.tip_major);
  return p;
}

}  // namespace

Corpus synth_generate_corpus(int num_users, int swipes_per_user, double profile_spread,
                             std::uint64_t seed, const std::string& dataset_id) {
  if (num_users < 2) throw ConfigError("num_users must be >= 2");
  if (swipes_per_user < 10) throw ConfigError("swipes_per_user must be >= 10");

  Corpus corpus;
  corpus.dataset_id = dataset_id.empty() ? "synth-" + std::to_string(seed) : dataset_id;

  for (int u = 0; u < num_users; ++u) {
    Rng rng(mix_seed(seed, hash_tag("synth-user"), static_cast<std::uint64_t>(u)));
    const UserProfile prof = draw_profile(rng, profile_spread);

    char user_buf[16];
    std::snprintf(user_buf, sizeof(user_buf), "u%03d", u);
    const std::string user_id = user_buf;
    corpus.user_metadata[user_id].gender = (u % 2 == 0) ? Gender::male : Gender::female;

    for (int s = 0; s < swipes_per_user; ++s) {
      SwipeGesture swipe;
      swipe.dataset_id = corpus.dataset_id;
      swipe.user_id = user_id;
      char swipe_buf[16];
      std::snprintf(swipe_buf, sizeof(swipe_buf), "s%05d", s);
      swipe.swipe_id = swipe_buf;

      const int n = 8 + static_cast<int>(rng.uniform_index(33));  // 8..40 events
      const double sx = prof.start_x + rng.normal(0.0, 14.0);
      const double sy = prof.start_y + rng.normal(0.0, 14.0);
      const double ex = prof.end_x + rng.normal(0.0, 14.0);
      const double ey = prof.end_y + rng.normal(0.0, 14.0);

      // Control point offset perpendicular to the chord gives the swipe its arc.
      const double mx = 0.5 * (sx + ex);
      const double my = 0.5 * (sy + ey);
      const double dx = ex - sx;
      const double dy = ey - sy;
      const double chord = std::max(1.0, std::hypot(dx, dy));
      const double bend = prof.curvature + rng.normal(0.0, 8.0);
      const double cx = mx - dy / chord * bend;
      const double cy = my + dx / chord * bend;

      const double duration = std::max(80.0, prof.duration_ms + rng.normal(0.0, 30.0));
      const double t0 = static_cast<double>(s) * 5000.0 + rng.uniform(0.0, 800.0);

      // Strictly increasing timestamps from positive jittered increments.
      std::vector<double> increments(static_cast<std::size_t>(n) - 1);
      double total = 0.0;
      for (auto& inc : increments) {
        inc = 0.5 + rng.uniform();
        total += inc;
      }

      double t = t0;
      double acc = 0.0;
      for (int k = 0; k < n; ++k) {
        const double tau = static_cast<double>(k) / static_cast<double>(n - 1);
        const double omt = 1.0 - tau;
        TouchEvent e;
        e.x = omt * omt * sx + 2.0 * omt * tau * cx + tau * tau * ex + rng.normal(0.0, 1.6);
        e.y = omt * omt * sy + 2.0 * omt * tau * cy + tau * tau * ey + rng.normal(0.0, 1.6);
        e.x = std::clamp(e.x, 0.0, 720.0);
        e.y = std::clamp(e.y, 0.0, 1440.0);
        if (k > 0) {
          acc += increments[static_cast<std::size_t>(k) - 1];
          t = t0 + duration * acc / total;
        }
        e.t_ms = t;
        e.major_axis = std::max(0.1, prof.tip_major + rng.normal(0.0, 0.45));
        e.minor_axis = std::clamp(prof.tip_minor + rng.normal(0.0, 0.3), 0.05, e.major_axis);
        swipe.events.push_back(e);
      }
      corpus.swipes.push_back(std::move(swipe));
    }
  }
  return corpus;
}

}  // namespace touchauth
