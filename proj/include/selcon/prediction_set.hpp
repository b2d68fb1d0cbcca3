#pragma once

#include <limits>

#include "selcon/errors.hpp"

namespace selcon {

// Tagged union of the prediction-set forms that actually occur: the empty
// set, the full outcome space, a single real point, a closed interval, a
// closed lower ray [lo, +inf), and a single class label. Keeping the forms
// explicit makes containment and length exact.
class PredictionSet {
 public:
  enum class Kind { Empty, Full, Point, Interval, LowerRay, Label };

  static PredictionSet empty() { return PredictionSet(Kind::Empty); }
  static PredictionSet full() { return PredictionSet(Kind::Full); }
  static PredictionSet point(double y) {
    PredictionSet s(Kind::Point);
    s.lo_ = s.hi_ = y;
    return s;
  }
  static PredictionSet interval(double lo, double hi) {
    require(lo <= hi, "PredictionSet::interval: lo must be <= hi");
    PredictionSet s(Kind::Interval);
    s.lo_ = lo;
    s.hi_ = hi;
    return s;
  }
  static PredictionSet lower_ray(double lo) {
    PredictionSet s(Kind::LowerRay);
    s.lo_ = lo;
    s.hi_ = std::numeric_limits<double>::infinity();
    return s;
  }
  static PredictionSet label(int k) {
    PredictionSet s(Kind::Label);
    s.label_ = k;
    return s;
  }

  Kind kind() const { return kind_; }
  double lower() const { return lo_; }
  double upper() const { return hi_; }
  int label_value() const { return label_; }

  bool contains(double y) const {
    switch (kind_) {
      case Kind::Empty: return false;
      case Kind::Full: return true;
      case Kind::Point: return y == lo_;
      case Kind::Interval: return lo_ <= y && y <= hi_;
      case Kind::LowerRay: return y >= lo_;
      case Kind::Label: return false;  // a real outcome never hits a label set
    }
    return false;
  }

  bool contains_label(int k) const {
    switch (kind_) {
      case Kind::Empty: return false;
      case Kind::Full: return true;
      case Kind::Label: return k == label_;
      default: return false;
    }
  }

  double length() const {
    switch (kind_) {
      case Kind::Empty:
      case Kind::Point:
      case Kind::Label: return 0.0;
      case Kind::Interval: return hi_ - lo_;
      case Kind::Full:
      case Kind::LowerRay: return std::numeric_limits<double>::infinity();
    }
    return 0.0;
  }

 private:
  explicit PredictionSet(Kind kind) : kind_(kind) {}

  Kind kind_;
  double lo_ = 0.0;
  double hi_ = 0.0;
  int label_ = 0;
};

}  // namespace selcon
