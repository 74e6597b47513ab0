#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include <gmpxx.h>

#include "usc/cell_grid.hpp"
#include "usc/geometry.hpp"
#include "usc/network.hpp"

namespace oracle {

struct RationalEdge {
  int u = 0;
  int v = 0;
  mpq_class c;
};

/// R(a, b) by eliminating every other vertex (star-mesh) in exact arithmetic.
mpq_class exact_resistance(int n, const std::vector<RationalEdge>& edges, int a, int b);

usc::Network to_network(int n, const std::vector<RationalEdge>& edges);

/// Random connected graph: a random spanning tree plus extra edges, integer
/// conductances 1..5.
std::vector<RationalEdge> random_connected(int n, int extra, std::mt19937_64& rng);

/// Expected steps to hit target from a uniform start vertex, by a dense solve.
double expected_hitting_time(const usc::Network& net, const std::vector<std::uint32_t>& start,
                             const std::vector<std::uint32_t>& target);

/// All touching cell pairs by comparing every pair of squares.
std::vector<usc::GridContact> brute_contacts(const usc::CellGrid& g);

usc::USCSpec standard_carpet();
/// Boundary ring of k plus the given extra offsets, built without validation.
usc::USCSpec ring_plus(int k, const std::vector<usc::Point>& extra, const std::vector<usc::Point>& removed = {});
/// K(z) offsets for any z, built without closure checks.
usc::USCSpec kz_unchecked(const usc::Rational& z);

usc::Rational q(long p, long d = 1);

/// Geodesic distances among the given points inside the union of level-1
/// squares, by Dijkstra on the visibility graph of the points and square corners.
std::vector<std::vector<double>> square_union_distances(const usc::USCSpec& spec,
                                                        const std::vector<usc::PointD>& points);

}  // namespace oracle
