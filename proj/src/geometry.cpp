#include "ar2can/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "ar2can/error.hpp"

namespace ar2can {

namespace {

std::string describe(const BBox& b) {
  std::ostringstream os;
  os << "(" << b.x << ", " << b.y << ", " << b.w << ", " << b.h << ")";
  return os.str();
}

}  // namespace

bool is_valid_box(const BBox& b) {
  const bool finite = std::isfinite(b.x) && std::isfinite(b.y) && std::isfinite(b.w) &&
                      std::isfinite(b.h);
  return finite && b.w > 0.0 && b.h > 0.0 && b.x >= 0.0 && b.y >= 0.0 &&
         b.right() <= 1.0 + kBoxTolerance && b.bottom() <= 1.0 + kBoxTolerance;
}

void validate_box(const BBox& b) {
  if (!std::isfinite(b.x) || !std::isfinite(b.y) || !std::isfinite(b.w) || !std::isfinite(b.h))
    throw DomainError("box has non-finite coordinates: " + describe(b));
  if (b.w <= 0.0 || b.h <= 0.0) throw DomainError("degenerate (zero-area) box: " + describe(b));
  if (b.x < 0.0 || b.y < 0.0) throw DomainError("box starts outside the image: " + describe(b));
  if (b.right() > 1.0 + kBoxTolerance || b.bottom() > 1.0 + kBoxTolerance)
    throw DomainError("box extends past the image: " + describe(b));
}

void validate_layout(const Layout& l, std::size_t max_people) {
  if (l.boxes.empty()) throw DomainError("layout has no boxes");
  if (l.boxes.size() > max_people)
    throw DomainError("layout has " + std::to_string(l.boxes.size()) + " boxes, cap is " +
                      std::to_string(max_people));
  for (const auto& b : l.boxes) validate_box(b);
}

Point centroid(const BBox& b) { return {b.x + b.w / 2.0, b.y + b.h / 2.0}; }

double euclidean(const Point& a, const Point& b) { return std::hypot(a.cx - b.cx, a.cy - b.cy); }

double intersection_area(const BBox& a, const BBox& b) {
  const double iw = std::min(a.right(), b.right()) - std::max(a.x, b.x);
  const double ih = std::min(a.bottom(), b.bottom()) - std::max(a.y, b.y);
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  return iw * ih;
}

double iou(const BBox& a, const BBox& b) {
  validate_box(a);
  validate_box(b);
  const double inter = intersection_area(a, b);
  return inter / (a.area() + b.area() - inter);
}

double giou(const BBox& a, const BBox& b) {
  validate_box(a);
  validate_box(b);
  if (a == b) return 1.0;
  const double inter = intersection_area(a, b);
  const double uni = a.area() + b.area() - inter;
  const double cw = std::max(a.right(), b.right()) - std::min(a.x, b.x);
  const double ch = std::max(a.bottom(), b.bottom()) - std::min(a.y, b.y);
  const double enclosing = cw * ch;
  // Summing the two terms in a fixed operand order keeps giou(a, b) == giou(b, a)
  // bit-for-bit: every intermediate above is symmetric under min/max.
  return inter / uni - (enclosing - uni) / enclosing;
}

double l1_box(const BBox& a, const BBox& b) {
  return std::abs(a.x - b.x) + std::abs(a.y - b.y) + std::abs(a.w - b.w) + std::abs(a.h - b.h);
}

Layout sort_layout(const Layout& l) {
  std::vector<std::size_t> order(l.boxes.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    const auto& a = l.boxes[i];
    const auto& b = l.boxes[j];
    if (a.x != b.x) return a.x < b.x;
    return a.y < b.y;
  });
  Layout out;
  out.boxes.reserve(order.size());
  for (auto i : order) out.boxes.push_back(l.boxes[i]);
  return out;
}

double coord_loss_term(const BBox& pred, const BBox& gt) {
  return (1.0 - giou(pred, gt)) + l1_box(pred, gt);
}

double architect_a_coord_loss(const Layout& pred, const Layout& gt, double lambda_coord) {
  if (pred.count() != gt.count())
    throw DomainError("coordinate loss needs equal box counts (pred " +
                      std::to_string(pred.count()) + ", gt " + std::to_string(gt.count()) + ")");
  if (pred.boxes.empty()) throw DomainError("coordinate loss on empty layouts");
  double total = 0.0;
  for (std::size_t i = 0; i < pred.count(); ++i) total += coord_loss_term(pred.boxes[i], gt.boxes[i]);
  return lambda_coord * (total / static_cast<double>(pred.count()));
}

double architect_a_loss(double ce_loss, const Layout& pred, const Layout& gt,
                        double lambda_coord) {
  return ce_loss + architect_a_coord_loss(pred, gt, lambda_coord);
}

}  // namespace ar2can
