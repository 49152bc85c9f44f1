#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "touchauth/errors.hpp"

namespace touchauth {

enum class Gender { male, female, unspecified };

std::string to_string(Gender g);
Gender gender_from_string(const std::string& s);

// One raw touch sample: screen position, timestamp (ms) and the fingertip
// ellipse axes in pixels (major >= minor >= 0).
struct TouchEvent {
  double x = 0.0;
  double y = 0.0;
  double t_ms = 0.0;
  double major_axis = 0.0;
  double minor_axis = 0.0;

  bool operator==(const TouchEvent&) const = default;
};

// Ordered touch events between finger-down and finger-up. Events are kept
// sorted by time; a structurally valid swipe has at least 2 events.
struct SwipeGesture {
  std::string dataset_id;
  std::string user_id;
  std::string swipe_id;
  std::vector<TouchEvent> events;

  std::size_t size() const { return events.size(); }
  double start_time() const { return events.empty() ? 0.0 : events.front().t_ms; }
  double end_time() const { return events.empty() ? 0.0 : events.back().t_ms; }

  bool operator==(const SwipeGesture&) const = default;
};

struct UserMeta {
  Gender gender = Gender::unspecified;

  bool operator==(const UserMeta&) const = default;
};

struct Corpus {
  std::string dataset_id;
  std::vector<SwipeGesture> swipes;
  std::map<std::string, UserMeta> user_metadata;

  std::vector<std::string> user_ids() const;
  bool operator==(const Corpus&) const = default;
};

// Per-user chronological train/test assignment of swipe ids.
struct UserSplit {
  std::vector<std::string> train_ids;
  std::vector<std::string> test_ids;
};

struct SplitPlan {
  double train_fraction = 0.6;
  std::map<std::string, UserSplit> per_user;
};

struct ParseStats {
  std::size_t rows = 0;
  std::size_t swipes_parsed = 0;
  std::size_t swipes_dropped_nonmonotone = 0;
};

// Canonical swipe CSV header (full form; the two fingertip-axis columns may
// be absent, in which case both axes read as 0).
inline constexpr const char* kSwipeCsvHeader =
    "dataset_id,user_id,swipe_id,event_index,t_ms,x,y,major_axis,minor_axis";
inline constexpr const char* kSwipeCsvHeaderNoAxes = "dataset_id,user_id,swipe_id,event_index,t_ms,x,y";
inline constexpr const char* kGenderCsvHeader = "user_id,gender";

// Reads the canonical swipe CSV. Rows are grouped by (user_id, swipe_id) and
// ordered by event_index; a swipe whose timestamps decrease in that order is
// dropped and counted in stats. Swipes in the returned corpus are ordered by
// (user_id, start time, swipe_id). Throws MalformedRowError with the
// offending line number, DataError if the file mixes dataset ids.
Corpus parse_swipe_csv(const std::filesystem::path& path, ParseStats* stats = nullptr);

void write_swipe_csv(const Corpus& corpus, const std::filesystem::path& path);

std::map<std::string, Gender> parse_gender_csv(const std::filesystem::path& path);

void write_gender_csv(const Corpus& corpus, const std::filesystem::path& path);

// Applies the gesture-level preprocessing rule: swipes with five or fewer
// touch points are discarded.
Corpus filter_short_swipes(const Corpus& corpus);

// Chronological per-user split: the earliest floor(train_fraction * n_u)
// swipes of each user go to train, the rest to test. train_fraction must lie
// in (0,1). The seed is accepted for interface stability; the assignment is
// fully determined by the corpus ordering.
SplitPlan split_train_test(const Corpus& corpus, double train_fraction, std::uint64_t seed);

// Seeded synthetic corpus for desk-scale experiments. Each user gets a
// behavioral profile (start/end regions, duration, curvature, fingertip
// size) whose inter-user variability scales with profile_spread. Generated
// swipes always have 8..40 events and strictly increasing timestamps, so they
// survive filter_short_swipes. Identical arguments give a bit-identical
// corpus.
Corpus synth_generate_corpus(int num_users, int swipes_per_user, double profile_spread,
                             std::uint64_t seed, const std::string& dataset_id = "");

}  // namespace touchauth
