#pragma once

#include <vector>

namespace gossipdet {

/// Two-community label assignment over the regular agents. Labels are 1 or 2;
/// ground truth and detector estimates share this type.
struct CommunityStructure {
    std::vector<int> labels;

    /// Canonical ground truth: the first ceil(n/2) agents carry label 1,
    /// the rest label 2.
    static CommunityStructure canonical(int n_regular);

    int size() const noexcept { return static_cast<int>(labels.size()); }
    bool valid() const noexcept;

    bool operator==(const CommunityStructure&) const = default;
};

}  // namespace gossipdet
