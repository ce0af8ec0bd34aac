#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rclab/lattice.hpp"
#include "rclab/rcmodel.hpp"

namespace rclab {

class InvalidArmSpec : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Arm colours: an open primal path, or a dual path crossing only closed edges.
enum class Colour : std::uint8_t { Open, DualClosed };

using Sigma = std::vector<Colour>;

/// "OOC" -> {Open, Open, DualClosed}. Accepts O/C (case-insensitive).
Sigma parse_sigma(const std::string& text);
std::string to_string(const Sigma& sigma);
Sigma rotate(const Sigma& sigma, std::size_t by);
/// Smallest inner radius with |boundary of B(n)| >= k: 0 for k = 1, else 1.
int n0(int k);

struct ArmSpec {
    std::shared_ptr<const AnnulusDomain> annulus;
    Sigma sigma;

    /// Throws InvalidArmSpec for an empty sigma or an inner radius below n0(k).
    void validate() const;
};

/// One arm. Open arms list primal vertices, dual arms list dual vertices; in
/// both cases from the inner boundary outwards.
struct ArmPath {
    Colour colour = Colour::Open;
    std::vector<Vertex> primal;
    std::vector<HalfPoint> dual;
};

struct ArmResult {
    bool occurs = false;
    std::optional<std::vector<ArmPath>> witness;
};

/// Arm-event detector bound to one annulus; keeps scratch between calls.
///
/// Arms are minimal: a primal arm meets the inner ring only at its first
/// vertex and the outer ring only at its last. Dual arms run from dual
/// vertices at sup-distance n1 - 1/2 to n2 + 1/2 along duals of annulus edges.
/// Arms of one colour are vertex-disjoint; open and dual-closed paths never
/// cross. For k >= 2 the search runs on the universal cover of the annulus:
/// starting from a half-plane of blocked sheets it extracts the clockwise-most
/// arm of each colour in turn and grows the blocked region by the translate of
/// the last arm's left side until the region is stable (event occurs) or
/// repeats up to a deck shift (it does not).
class ArmDetector {
public:
    explicit ArmDetector(std::shared_ptr<const AnnulusDomain> annulus);
    ~ArmDetector();
    ArmDetector(ArmDetector&&) noexcept;
    ArmDetector& operator=(ArmDetector&&) noexcept;

    const AnnulusDomain& annulus() const;
    /// `open[e]` is the state of annulus edge e.
    ArmResult detect(const std::vector<std::uint8_t>& open, const Sigma& sigma);
    ArmResult detect(const Configuration& config, const Sigma& sigma);

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Config must live on spec.annulus.
ArmResult detect_arm_event(const Configuration& config, const ArmSpec& spec);

/// Maximum number of vertex-disjoint open inner-to-outer crossings (max-flow
/// with unit vertex capacities).
int count_disjoint_open_crossings(const Configuration& config, const AnnulusDomain& annulus);

/// j - 1 disjoint open arms and one dual-closed arm (j >= 3).
bool detect_poly_arm(const Configuration& config, const AnnulusDomain& annulus, int j);

/// Exhaustive search over families of minimal arms; annuli up to kOracleMaxEdges edges.
inline constexpr int kOracleMaxEdges = 128;
bool brute_force_arm_oracle(const Configuration& config, const ArmSpec& spec);

/// Independent re-check of a witness: colours, endpoints, disjointness and
/// cyclic order. On failure writes the reason to `why` when given.
bool validate_witness(const Configuration& config, const ArmSpec& spec, const std::vector<ArmPath>& witness,
                      std::string* why = nullptr);

}  // namespace rclab
