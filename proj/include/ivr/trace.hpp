#pragma once

#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"

#include "ivr/martingale.hpp"

namespace ivr {

using Json = nlohmann::ordered_json;

inline constexpr int kTraceSchemaVersion = 1;

// Json helper: big integers that fit in int64 stay numbers, larger ones
// become decimal strings.
Json int_json(const Int& v);

// One appended record per case fired, wager placed, enumeration made.
struct TraceEvent {
  Stage stage = 0;
  std::string event;
  std::string req;  // "R_e" / "Q_e" / "N_e_k" / "" for engine-global events
  Json payload = Json::object();

  Json to_json() const;
  std::string line() const { return to_json().dump(); }
};

class TraceSink {
 public:
  virtual ~TraceSink() = default;
  virtual void header(const Json& config) = 0;
  virtual void emit(const TraceEvent& ev) = 0;
  virtual void flush() {}
};

class NullSink : public TraceSink {
 public:
  void header(const Json&) override {}
  void emit(const TraceEvent&) override {}
};

// Collects serialized lines; used by replay and the golden-trace tests.
class VectorSink : public TraceSink {
 public:
  void header(const Json& config) override { lines_.push_back(config.dump()); }
  void emit(const TraceEvent& ev) override { lines_.push_back(ev.line()); }
  const std::vector<std::string>& lines() const { return lines_; }

 private:
  std::vector<std::string> lines_;
};

// Line-buffered JSONL writer: by default every line is flushed as written so
// a killed run leaves a prefix-valid trace. IVR_TRACE_BUFFER=<bytes> batches
// writes up to that many bytes, still at line boundaries.
class JsonlWriter : public TraceSink {
 public:
  explicit JsonlWriter(const std::string& path);
  ~JsonlWriter() override;
  void header(const Json& config) override;
  void emit(const TraceEvent& ev) override;
  void flush() override;

 private:
  void write_line(const std::string& line);
  FILE* out_;
  std::string pending_;
  size_t buffer_bytes_ = 0;
};

// Fan-out to several sinks.
class TeeSink : public TraceSink {
 public:
  void add(TraceSink* s) { sinks_.push_back(s); }
  void header(const Json& config) override {
    for (auto* s : sinks_) s->header(config);
  }
  void emit(const TraceEvent& ev) override {
    for (auto* s : sinks_) s->emit(ev);
  }
  void flush() override {
    for (auto* s : sinks_) s->flush();
  }

 private:
  std::vector<TraceSink*> sinks_;
};

}  // namespace ivr
