#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ar2can {

// Boundary slack for boxes that overflow [0, 1] after float round-trips.
inline constexpr double kBoxTolerance = 1e-6;
inline constexpr std::size_t kDefaultMaxPeople = 8;

// Axis-aligned box in normalized image coordinates; (x, y) is the top-left.
struct BBox {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;

  double right() const { return x + w; }
  double bottom() const { return y + h; }
  double area() const { return w * h; }

  friend bool operator==(const BBox&, const BBox&) = default;
};

struct Point {
  double cx = 0.0;
  double cy = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

struct Layout {
  std::vector<BBox> boxes;

  std::size_t count() const { return boxes.size(); }
  friend bool operator==(const Layout&, const Layout&) = default;
};

bool is_valid_box(const BBox& b);
// Throws DomainError describing the first violated box invariant.
void validate_box(const BBox& b);
// Checks every box plus 1 <= N <= max_people.
void validate_layout(const Layout& l, std::size_t max_people = kDefaultMaxPeople);

Point centroid(const BBox& b);
double euclidean(const Point& a, const Point& b);

double intersection_area(const BBox& a, const BBox& b);
double iou(const BBox& a, const BBox& b);
double giou(const BBox& a, const BBox& b);
double l1_box(const BBox& a, const BBox& b);

// Ascending x, then ascending y, then original index.
Layout sort_layout(const Layout& l);

// Per-pair regression term (1 - GIoU) + L1.
double coord_loss_term(const BBox& pred, const BBox& gt);

// lambda_coord * mean over pairs of coord_loss_term. Both layouts must be
// canonically sorted and of equal size; the token cross-entropy is added by
// the caller.
double architect_a_coord_loss(const Layout& pred, const Layout& gt, double lambda_coord);

// Full Architect-A objective: ce_loss + lambda_coord * coordinate loss.
double architect_a_loss(double ce_loss, const Layout& pred, const Layout& gt,
                        double lambda_coord);

}  // namespace ar2can
