#pragma once

#include <string>
#include <vector>

#include "imexglm/linalg.hpp"

namespace imexglm {

enum class TableauKind { explicit_type1, implicit_type2 };

/// One general linear method: stage coupling A (s x s, lower triangular),
/// input map U (s x r), output maps B (r x s) and V (r x r), abscissae c.
/// Cataloged methods have p = q = r = s, U = I and rank-one stochastic V.
struct GlmTableau {
  std::string name;
  Mat A, U, B, V;
  Vec c;
  int p = 0, q = 0, r = 0, s = 0;
  TableauKind kind = TableauKind::explicit_type1;
  double lambda = 0.0;  // constant implicit diagonal; 0 for type 1
};

/// Columns q_0..q_p of the external-stage representation
/// y_i ~ sum_k q_{i,k} h^k y^(k).
struct WeightMatrix {
  Mat W;  // r x (p+1)
};

/// Endpoint recovery weights shared by an explicit/implicit pair:
/// beta0 weights the nonstiff stage derivatives f(Y_i), beta0_hat the
/// stiff ones g(Y_i), and the single gamma0 weights the external stages
/// (the pair satisfies gamma0 = gamma0_hat by construction).
struct TerminationCoefficients {
  Vec beta0;
  Vec beta0_hat;
  Vec gamma0;
};

struct ImexGlmPair {
  std::string name;
  GlmTableau explicit_method;  // type 1
  GlmTableau implicit_method;  // type 2
  TerminationCoefficients termination;
};

struct InterpolationMatrices {
  Mat B0, B1, B2;
};

/// Lagrange-basis matrices used by the order-p construction of B.
/// phi_j(x) = prod_{k != j} (x - c_k); entries are exact polynomial
/// integrals/evaluations divided by phi_j(c_j).
/// Throws std::invalid_argument("degenerate abscissae") on duplicate c.
InterpolationMatrices interpolation_matrices(const Vec& c);

/// B = B0 - A*B1 - V*B2 + V*A; yields order p = stage order q = s for a
/// p = q = r = s method with U = I.
Mat build_b_matrix(const Mat& A, const Mat& V, const Vec& c);

/// q_0 = 1, q_k = c^k/k! - A c^(k-1)/(k-1)!  (elementwise powers of c).
WeightMatrix weight_vectors(const Mat& A, const Vec& c, int p);

/// The shipped method pairs: IMEX-DIMSIM-2A, -2B, -3A, -3B.
const std::vector<ImexGlmPair>& catalog();

/// Lookup by pair name ("2A", "2B", "3A", "3B"); throws std::out_of_range
/// with the available names listed.
const ImexGlmPair& find_pair(const std::string& name);

/// Structural diagnostics; empty means all invariants hold within 1e-12.
std::vector<std::string> validate(const GlmTableau& t);
std::vector<std::string> validate(const ImexGlmPair& pair);

/// JSON export/import of a pair; numbers carry 17 significant digits so a
/// round trip is bit exact.
std::string pair_to_json(const ImexGlmPair& pair);
ImexGlmPair pair_from_json(const std::string& text);
std::string catalog_to_json();

/// "%.17g" formatting used by every machine-readable emitter.
std::string format_double(double x);

}  // namespace imexglm
