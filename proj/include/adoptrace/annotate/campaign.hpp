#pragma once

// Annotation campaign state: which samples each annotator may still label,
// per-sample caps, and an append-only log from which the state is rebuilt
// on startup.

#include <fcntl.h>
#include <unistd.h>

#include <chrono>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "adoptrace/error.hpp"
#include "adoptrace/evalkit.hpp"
#include "adoptrace/period.hpp"
#include "adoptrace/util/text.hpp"
#include "json.hpp"

namespace adoptrace::annotate {

struct AnnotationTask {
  std::string sample_id;
  std::string text;
  std::string aspect;
  std::array<Polarity, 3> choices = kPolarities;

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json c = nlohmann::ordered_json::array();
    for (Polarity p : choices) c.push_back(std::string(to_string(p)));
    return {{"sample_id", sample_id}, {"text", text}, {"aspect", aspect}, {"choices", c}};
  }
};

inline nlohmann::ordered_json annotation_to_json(const AnnotationRecord& a) {
  return {{"sample_id", a.sample_id},
          {"annotator_id", a.annotator_id},
          {"label", std::string(to_string(a.label))},
          {"submitted_at", a.submitted_at}};
}

// Newline-delimited JSON, one AnnotationRecord per line. Each record is
// written with a single write(2) on an O_APPEND descriptor and synced.
class AnnotationLog {
 public:
  explicit AnnotationLog(std::filesystem::path path, bool sync = true)
      : path_(std::move(path)), sync_(sync) {
    if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
    drop_torn_tail();
    fd_ = ::open(path_.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
    if (fd_ < 0) throw IoError("cannot open annotation log '" + path_.string() + "'");
  }
  AnnotationLog(const AnnotationLog&) = delete;
  AnnotationLog& operator=(const AnnotationLog&) = delete;
  ~AnnotationLog() {
    if (fd_ >= 0) ::close(fd_);
  }

  void append(const AnnotationRecord& a) {
    const std::string line = annotation_to_json(a).dump() + "\n";
    const auto n = ::write(fd_, line.data(), line.size());
    if (n != static_cast<ssize_t>(line.size()))
      throw IoError("short write to annotation log '" + path_.string() + "'");
    if (sync_ && ::fdatasync(fd_) != 0) throw IoError("fdatasync failed on annotation log");
  }

  static std::vector<AnnotationRecord> read(const std::filesystem::path& path) {
    std::vector<AnnotationRecord> out;
    if (!std::filesystem::exists(path)) return out;
    const std::string content = text::read_file(path.string());
    std::size_t n = 0;
    for (auto l : text::lines(content)) {
      ++n;
      if (text::trim(l).empty()) continue;
      const auto j = nlohmann::json::parse(l, nullptr, false);
      if (j.is_discarded() || !j.is_object()) throw ParseError(n, "corrupt annotation log entry");
      const auto label = parse_polarity(j.value("label", ""));
      if (!label) throw ParseError(n, "invalid label in annotation log");
      out.push_back({j.value("sample_id", ""), j.value("annotator_id", ""), *label,
                     j.value("submitted_at", "")});
    }
    return out;
  }

  const std::filesystem::path& path() const { return path_; }

 private:
  // A crash mid-append can leave a final line without its newline; it was
  // never acknowledged, so it is cut off.
  void drop_torn_tail() {
    if (!std::filesystem::exists(path_)) return;
    const std::string content = text::read_file(path_.string());
    if (content.empty() || content.back() == '\n') return;
    const auto keep = content.rfind('\n');
    std::filesystem::resize_file(path_, keep == std::string::npos ? 0 : keep + 1);
  }

  std::filesystem::path path_;
  bool sync_;
  int fd_ = -1;
};

struct CampaignConfig {
  std::string id = "default";
  std::size_t cap = 5;
  std::uint64_t seed = 0;
};

enum class SubmitStatus { kAccepted, kDuplicate, kCapReached, kInvalidLabel, kUnknownSample };

struct SubmitResult {
  SubmitStatus status;
  std::size_t total_annotations = 0;
};

struct Progress {
  std::size_t samples = 0;
  std::size_t cap = 0;
  std::size_t annotations = 0;
  std::size_t annotators = 0;
  std::size_t completed_samples = 0;
  bool complete = false;
  std::map<std::string, std::size_t> per_sample;
  std::optional<AgreementReport> agreement;  // when some sample has two labels

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["samples"] = samples;
    j["cap"] = cap;
    j["annotations"] = annotations;
    j["annotators"] = annotators;
    j["completed_samples"] = completed_samples;
    j["complete"] = complete;
    j["per_sample"] = per_sample;
    if (agreement) {
      j["alpha"] = agreement->alpha;
      j["full_agreement"] = agreement->full_agreement_count;
      j["pairable_units"] = agreement->n_pairable_units;
    } else {
      j["alpha"] = nullptr;
    }
    return j;
  }
};

inline std::string utc_now_iso() {
  const auto now = std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now());
  return Timestamp{now.time_since_epoch().count()}.iso();
}

// Thread-safe campaign. Every mutation happens under one lock, and the log
// append happens inside it, so log order equals acceptance order.
class Campaign {
 public:
  Campaign(std::vector<ScoredRecord> samples, CampaignConfig config,
           std::optional<std::filesystem::path> log_path = {}, bool sync_log = true)
      : config_(std::move(config)), rng_(config_.seed) {
    if (config_.cap == 0) throw std::invalid_argument("annotation cap must be at least 1");
    for (auto& s : samples) {
      if (s.terms.empty())
        throw DataError("sample '" + s.id + "' has no extracted aspect to show");
      if (!index_.emplace(s.id, samples_.size()).second)
        throw DataError("duplicate sample id '" + s.id + "'");
      samples_.push_back({std::move(s), {}});
    }
    if (log_path) {
      log_.emplace(*log_path, sync_log);  // drops a torn tail before the replay
      for (const auto& a : AnnotationLog::read(*log_path)) replay(a);
    }
  }

  const CampaignConfig& config() const { return config_; }

  // A uniformly random open sample the annotator has not labelled, preferring
  // samples not already handed to them; none once nothing is left.
  std::optional<AnnotationTask> next_task(const std::string& annotator) {
    std::lock_guard lock(mu_);
    auto& served = served_[annotator];
    std::vector<std::size_t> fresh, pending;
    for (std::size_t i = 0; i < samples_.size(); ++i) {
      const auto& s = samples_[i];
      if (s.labels.size() >= config_.cap || s.labels.count(annotator)) continue;
      (served.count(i) ? pending : fresh).push_back(i);
    }
    auto& pool = fresh.empty() ? pending : fresh;
    if (pool.empty()) return std::nullopt;
    const std::size_t pick = pool[uniform_below(rng_, pool.size())];
    served.insert(pick);
    const auto& rec = samples_[pick].record;
    return AnnotationTask{rec.id, rec.text, rec.terms.front()};
  }

  SubmitResult submit(const std::string& annotator, const std::string& sample_id,
                      std::string_view label, std::string submitted_at = {}) {
    const auto pol = parse_polarity(label);
    std::lock_guard lock(mu_);
    if (!pol) return {SubmitStatus::kInvalidLabel, total_};
    const auto it = index_.find(sample_id);
    if (it == index_.end()) return {SubmitStatus::kUnknownSample, total_};
    auto& s = samples_[it->second];
    if (s.labels.count(annotator)) return {SubmitStatus::kDuplicate, total_};
    if (s.labels.size() >= config_.cap) return {SubmitStatus::kCapReached, total_};
    AnnotationRecord rec{sample_id, annotator, *pol,
                         submitted_at.empty() ? utc_now_iso() : std::move(submitted_at)};
    if (log_) log_->append(rec);
    apply(it->second, std::move(rec));
    return {SubmitStatus::kAccepted, total_};
  }

  Progress progress() const {
    std::lock_guard lock(mu_);
    Progress p;
    p.samples = samples_.size();
    p.cap = config_.cap;
    p.annotations = total_;
    p.annotators = annotators_.size();
    bool any_pair = false;
    for (const auto& s : samples_) {
      p.per_sample[s.record.id] = s.labels.size();
      if (s.labels.size() >= config_.cap) ++p.completed_samples;
      any_pair = any_pair || s.labels.size() >= 2;
    }
    p.complete = !samples_.empty() && p.completed_samples == samples_.size();
    if (any_pair) p.agreement = krippendorff_alpha(records_);
    return p;
  }

  // Accepted annotations in acceptance order.
  std::vector<AnnotationRecord> annotations() const {
    std::lock_guard lock(mu_);
    return records_;
  }

  std::vector<ScoredRecord> samples() const {
    std::lock_guard lock(mu_);
    std::vector<ScoredRecord> out;
    for (const auto& s : samples_) out.push_back(s.record);
    return out;
  }

 private:
  struct Sample {
    ScoredRecord record;
    std::map<std::string, Polarity> labels;  // by annotator
  };

  void apply(std::size_t i, AnnotationRecord rec) {
    samples_[i].labels.emplace(rec.annotator_id, rec.label);
    annotators_.insert(rec.annotator_id);
    ++total_;
    records_.push_back(std::move(rec));
  }

  void replay(const AnnotationRecord& a) {
    const auto it = index_.find(a.sample_id);
    if (it == index_.end())
      throw DataError("annotation log refers to unknown sample '" + a.sample_id + "'");
    if (samples_[it->second].labels.count(a.annotator_id) ||
        samples_[it->second].labels.size() >= config_.cap)
      throw DataError("annotation log violates campaign invariants at sample '" + a.sample_id +
                      "'");
    apply(it->second, a);
  }

  CampaignConfig config_;
  mutable std::mutex mu_;
  std::mt19937_64 rng_;
  std::vector<Sample> samples_;
  std::unordered_map<std::string, std::size_t> index_;
  std::unordered_map<std::string, std::set<std::size_t>> served_;
  std::set<std::string> annotators_;
  std::vector<AnnotationRecord> records_;
  std::size_t total_ = 0;
  std::optional<AnnotationLog> log_;
};

// Campaign file: one ScoredRecord JSON object per line.
inline std::vector<ScoredRecord> load_campaign_samples(const std::filesystem::path& path) {
  const std::string content = text::read_file(path.string());
  std::vector<ScoredRecord> out;
  std::size_t n = 0;
  for (auto l : text::lines(content)) {
    ++n;
    if (text::trim(l).empty()) continue;
    const auto j = nlohmann::json::parse(l, nullptr, false);
    if (j.is_discarded()) throw ParseError(n, "malformed campaign entry");
    try {
      out.push_back(ScoredRecord::from_json(j));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(n, e.what());
    }
  }
  return out;
}

inline std::string format_campaign_samples(const std::vector<ScoredRecord>& samples) {
  std::string out;
  for (const auto& s : samples) out += s.to_json().dump() + "\n";
  return out;
}

}  // namespace adoptrace::annotate
