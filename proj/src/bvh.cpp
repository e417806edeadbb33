#include <algorithm>
#include <numeric>

#include "artic/collision.hpp"

namespace artic {

namespace {

constexpr int kLeafSize = 4;

Aabb triangle_box(const TriMesh& mesh, int tri) {
  Aabb box = Aabb::empty();
  for (int k = 0; k < 3; ++k) box.expand(mesh.tri_vertex(tri, k));
  return box;
}

}  // namespace

Bvh Bvh::build(const TriMesh& mesh) {
  Bvh bvh;
  bvh.tri_boxes_.resize(mesh.triangles.size());
  for (size_t t = 0; t < mesh.triangles.size(); ++t) {
    bvh.tri_boxes_[t] = triangle_box(mesh, static_cast<int>(t));
    const auto& tri = mesh.triangles[t];
    if (triangle_area(mesh.vertices[tri[0]], mesh.vertices[tri[1]], mesh.vertices[tri[2]]) >
        0.0) {
      bvh.tri_order_.push_back(static_cast<int>(t));
    }
  }
  if (bvh.tri_order_.empty()) return bvh;

  std::vector<Vec3> centroids(mesh.triangles.size());
  for (int t : bvh.tri_order_) {
    centroids[t] = bvh.tri_boxes_[t].center();
  }

  struct Range {
    int node;
    int first, count;
  };
  bvh.nodes_.push_back({});
  std::vector<Range> stack{{0, 0, static_cast<int>(bvh.tri_order_.size())}};
  while (!stack.empty()) {
    const Range range = stack.back();
    stack.pop_back();
    Node& node = bvh.nodes_[range.node];
    node.box = Aabb::empty();
    for (int i = range.first; i < range.first + range.count; ++i) {
      node.box.expand(bvh.tri_boxes_[bvh.tri_order_[i]]);
    }
    if (range.count <= kLeafSize) {
      node.first = range.first;
      node.count = range.count;
      continue;
    }
    const Vec3 extent = node.box.extent();
    int axis = 0;
    if (extent.y > extent.x) axis = 1;
    if (extent.z > extent[axis]) axis = 2;
    const int mid = range.first + range.count / 2;
    std::nth_element(bvh.tri_order_.begin() + range.first, bvh.tri_order_.begin() + mid,
                     bvh.tri_order_.begin() + range.first + range.count,
                     [&](int a, int b) {
                       if (centroids[a][axis] != centroids[b][axis]) {
                         return centroids[a][axis] < centroids[b][axis];
                       }
                       return a < b;
                     });
    const int left = static_cast<int>(bvh.nodes_.size());
    bvh.nodes_.push_back({});
    bvh.nodes_.push_back({});
    bvh.nodes_[range.node].left = left;
    bvh.nodes_[range.node].right = left + 1;
    stack.push_back({left, range.first, mid - range.first});
    stack.push_back({left + 1, mid, range.first + range.count - mid});
  }
  return bvh;
}

}  // namespace artic
