#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

namespace symdecomp {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline constexpr double kTau = 2.0 * kPi;

// Map an angle into [0, 2*pi).
double wrap_angle(double a);

// Exact for all n <= 50 (values stay below 2^53).
double binomial(int n, int k);

// Box-Muller on raw mt19937_64 draws; std::normal_distribution is not
// reproducible across standard libraries, this is.
double gaussian(std::mt19937_64& rng);

// A point on the Riemann sphere: a finite complex number or infinity.
class ExtComplex {
public:
  ExtComplex() = default;
  ExtComplex(cplx v) : v_(v) {}
  ExtComplex(double v) : v_(v, 0.0) {}

  static ExtComplex infinity() {
    ExtComplex z;
    z.inf_ = true;
    return z;
  }

  bool is_inf() const { return inf_; }
  cplx value() const; // throws std::logic_error when infinite

private:
  cplx v_{0.0, 0.0};
  bool inf_ = false;
};

// Chordal metric on the sphere of diameter 2 (equals the Euclidean distance
// between the corresponding Bloch vectors). Range [0, 2].
double chordal(const ExtComplex& a, const ExtComplex& b);

// z -> -1/conj(z), the diametrically opposite point.
ExtComplex antipode(const ExtComplex& z);

// Direction on the Bloch sphere, stored as polar angles. theta = pi is kept
// as an explicit "infinite stereographic coordinate" flag with azimuth 0,
// since the azimuth carries no information at the pole.
class NodeState {
public:
  NodeState() = default;

  static NodeState from_angles(double theta, double phi);
  static NodeState from_beta(const ExtComplex& beta);
  // Canonicalize a nonzero spinor (v0, v1): returns the direction, and if
  // phase/rho are non-null the factors with (v0,v1) = rho*e^{i*phase}*unit().
  static NodeState from_vector(cplx v0, cplx v1, double* phase = nullptr,
                               double* rho = nullptr);

  double theta() const { return theta_; }
  double phi() const { return phi_; }
  bool at_infinity() const { return inf_; }

  // Stereographic coordinate e^{i*phi} * tan(theta/2).
  ExtComplex beta() const;

  // Canonical unit spinor: (cos(theta/2), e^{i*phi} sin(theta/2)),
  // i.e. (0, 1) at the south pole.
  cplx amp0() const;
  cplx amp1() const;

private:
  double theta_ = 0.0;
  double phi_ = 0.0;
  bool inf_ = false;
};

cplx node_overlap(const NodeState& a, const NodeState& b); // <a|b>, single qubit
double chordal(const NodeState& a, const NodeState& b);
std::array<double, 3> bloch_vector(const NodeState& n);

enum class MapKind { Unitary, UnitDeterminant, GeneralInvertible };

// 2x2 matrix [[a, b], [d, f]] acting identically on every qubit.
class CollectiveMap {
public:
  CollectiveMap(cplx a, cplx b, cplx d, cplx f, MapKind kind);

  static CollectiveMap identity(MapKind kind = MapKind::Unitary);

  cplx a() const { return a_; }
  cplx b() const { return b_; }
  cplx d() const { return d_; }
  cplx f() const { return f_; }
  MapKind kind() const { return kind_; }

  cplx det() const { return a_ * f_ - b_ * d_; }
  CollectiveMap inverse() const;
  CollectiveMap compose(const CollectiveMap& rhs) const; // this * rhs

private:
  cplx a_, b_, d_, f_;
  MapKind kind_;
};

// Image of a direction under the map: g * unit(n) = rho * e^{i*delta} * unit(node).
struct MappedNode {
  NodeState node;
  double rho;
  double delta;
};
MappedNode map_node(const CollectiveMap& g, const NodeState& n);

struct DickeWeights {
  int n_qubits;
  std::vector<double> values; // sqrt(binomial(n, k)), k = 0..n
};
DickeWeights dicke_weights(int n);

// Permutation-symmetric pure state of n >= 1 qubits, stored as the n+1
// amplitudes over the symmetric (excitation-number) basis.
class SymmetricState {
public:
  SymmetricState(int n_qubits, std::vector<cplx> dicke);

  int n_qubits() const { return n_; }
  const std::vector<cplx>& dicke() const { return c_; }
  cplx operator[](int k) const { return c_[static_cast<size_t>(k)]; }

  double norm() const;
  // Unit norm, first coefficient above threshold made real positive.
  SymmetricState normalized() const;

private:
  int n_;
  std::vector<cplx> c_;
};

// Product of identical single-qubit states along the given direction;
// amplitudes sqrt(binom(n,k)) cos^{n-k}(theta/2) (e^{i phi} sin(theta/2))^k.
SymmetricState coherent_state(int n, const NodeState& node);

cplx overlap(const SymmetricState& s1, const SymmetricState& s2); // <s1|s2>

struct CollectiveImage {
  SymmetricState state;
  double scale; // norm of the exact image; state holds the exact image itself
                // when renormalize=false, and the unit-norm version otherwise
};
// Apply g to every qubit. Exact O(n^2) coefficient transform.
CollectiveImage apply_collective(const CollectiveMap& g, const SymmetricState& s,
                                 bool renormalize = true);

SymmetricState random_state(int n, std::mt19937_64& rng);
CollectiveMap random_unitary(std::mt19937_64& rng);
// Entries of the returned matrix are bounded by entry_bound (resampled until
// that holds), determinant exactly renormalized to 1.
CollectiveMap random_unit_determinant(std::mt19937_64& rng, double entry_bound = 2.0);

} // namespace symdecomp
