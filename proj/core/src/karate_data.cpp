#include <array>
#include <cstdint>

#include "gossipdet/errors.hpp"
#include "gossipdet/sbm.hpp"

namespace gossipdet {

namespace {

// Zachary's karate club, original 1-based node ids. 34 members, 78 edges.
constexpr std::array<std::pair<int, int>, 78> kKarateEdges = {{
    {1, 2},   {1, 3},   {1, 4},   {1, 5},   {1, 6},   {1, 7},   {1, 8},   {1, 9},
    {1, 11},  {1, 12},  {1, 13},  {1, 14},  {1, 18},  {1, 20},  {1, 22},  {1, 32},
    {2, 3},   {2, 4},   {2, 8},   {2, 14},  {2, 18},  {2, 20},  {2, 22},  {2, 31},
    {3, 4},   {3, 8},   {3, 9},   {3, 10},  {3, 14},  {3, 28},  {3, 29},  {3, 33},
    {4, 8},   {4, 13},  {4, 14},  {5, 7},   {5, 11},  {6, 7},   {6, 11},  {6, 17},
    {7, 17},  {9, 31},  {9, 33},  {9, 34},  {10, 34}, {14, 34}, {15, 33}, {15, 34},
    {16, 33}, {16, 34}, {19, 33}, {19, 34}, {20, 34}, {21, 33}, {21, 34}, {23, 33},
    {23, 34}, {24, 26}, {24, 28}, {24, 30}, {24, 33}, {24, 34}, {25, 26}, {25, 28},
    {25, 32}, {26, 32}, {27, 30}, {27, 34}, {28, 34}, {29, 32}, {29, 34}, {30, 33},
    {30, 34}, {31, 33}, {31, 34}, {32, 33}, {32, 34}, {33, 34},
}};

// Rolling checksum of the edge list above, frozen at embedding time.
constexpr std::uint64_t kKarateChecksum = 14382092858495367661ull;

// Members of the instructor's faction (community 1) excluding the two
// leaders; everyone else sides with the administrator (community 2). Node 9
// follows the administrator here, the convention of the faction split rather
// than the club he joined after the fission.
constexpr std::array<int, 15> kInstructorFaction = {2,  3,  4,  5,  6,  7,  8, 11,
                                                    12, 13, 14, 17, 18, 20, 22};

std::uint64_t edge_checksum() {
    std::uint64_t h = 0;
    for (const auto& [a, b] : kKarateEdges)
        h = h * 1000003ull + static_cast<std::uint64_t>(a) * 37ull + static_cast<std::uint64_t>(b);
    return h;
}

}  // namespace

KarateClub karate_club() {
    if (edge_checksum() != kKarateChecksum)
        throw Error("embedded karate club edge list is corrupted");

    constexpr int kMembers = 34;
    constexpr int kRegular = 32;
    // Leaders (original 1 and 34) become the stubborn agents and move to the
    // end; the remaining members keep their relative order.
    auto internal_index = [](int original) {
        if (original == 1) return kRegular;
        if (original == 34) return kRegular + 1;
        return original - 2;
    };

    std::vector<Edge> edges;
    edges.reserve(kKarateEdges.size());
    for (const auto& [a, b] : kKarateEdges) {
        const int ia = internal_index(a);
        const int ib = internal_index(b);
        edges.emplace_back(std::min(ia, ib), std::max(ia, ib));
    }

    KarateClub club{
        .graph = SampledGraph(kRegular, kMembers - kRegular, std::move(edges)),
        .stubborn_opinions = Eigen::Vector2d(1.0, -1.0),
        .truth = {},
        .original_ids = {},
    };

    club.truth.labels.assign(kRegular, 2);
    for (int member : kInstructorFaction) club.truth.labels[static_cast<std::size_t>(member - 2)] = 1;

    club.original_ids.resize(kMembers);
    for (int original = 1; original <= kMembers; ++original)
        club.original_ids[static_cast<std::size_t>(internal_index(original))] = original;

    return club;
}

}  // namespace gossipdet
