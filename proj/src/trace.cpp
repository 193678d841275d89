#include "ivr/trace.hpp"

#include <cstdlib>
#include <stdexcept>

namespace ivr {

Json int_json(const Int& v) {
  if (v.fits_slong_p()) return static_cast<int64_t>(v.get_si());
  return v.get_str();
}

Json TraceEvent::to_json() const {
  Json j;
  j["stage"] = stage;
  j["event"] = event;
  if (!req.empty()) j["req"] = req;
  j["payload"] = payload;
  return j;
}

JsonlWriter::JsonlWriter(const std::string& path) {
  out_ = std::fopen(path.c_str(), "wb");
  if (!out_) throw std::runtime_error("cannot open trace output: " + path);
  if (const char* env = std::getenv("IVR_TRACE_BUFFER")) {
    buffer_bytes_ = static_cast<size_t>(std::strtoull(env, nullptr, 10));
  }
}

JsonlWriter::~JsonlWriter() {
  flush();
  if (out_) std::fclose(out_);
}

void JsonlWriter::header(const Json& config) { write_line(config.dump()); }

void JsonlWriter::emit(const TraceEvent& ev) { write_line(ev.line()); }

void JsonlWriter::write_line(const std::string& line) {
  pending_ += line;
  pending_ += '\n';
  if (pending_.size() >= buffer_bytes_) flush();
}

void JsonlWriter::flush() {
  if (!pending_.empty()) {
    std::fwrite(pending_.data(), 1, pending_.size(), out_);
    pending_.clear();
  }
  std::fflush(out_);
}

}  // namespace ivr
