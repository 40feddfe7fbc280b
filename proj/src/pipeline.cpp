#include "cgi/pipeline.hpp"

#include "cgi/errors.hpp"

namespace cgi {

void StreamReader::feed(const BitString& msg) {
  if (ended_) throw ContractViolation("data after end of stream");
  buf_.append(msg);
  while (!ended_) {
    const std::size_t avail = buf_.size() - pos_;
    if (framed_) {
      if (avail < 1) break;
      if (!buf_.bit(pos_)) {
        ended_ = true;
        ++pos_;
        break;
      }
      if (avail < 1 + width_) break;
      items_.push_back(buf_.slice(pos_ + 1, width_));
      pos_ += 1 + width_;
    } else {
      if (avail < width_ || width_ == 0) break;
      items_.push_back(buf_.slice(pos_, width_));
      pos_ += width_;
    }
    ++received_;
  }
  if (ended_ && pos_ != buf_.size())
    throw ContractViolation("data after end of stream");
  if (pos_ >= 4096) {
    buf_ = buf_.slice(pos_, buf_.size() - pos_);
    pos_ = 0;
  }
}

BitString StreamReader::pop() {
  BitString b = std::move(items_.front());
  items_.pop_front();
  return b;
}

}  // namespace cgi
