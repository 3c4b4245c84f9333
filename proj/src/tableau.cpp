#include "imexglm/tableau.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "json.hpp"

namespace imexglm {

namespace {

constexpr double kStructTol = 1e-12;

// Polynomial helpers on monomial coefficient vectors (ascending powers).
Vec poly_mul(const Vec& a, const Vec& b) {
  Vec out(a.size() + b.size() - 1, 0.0);
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

double poly_eval(const Vec& p, double x) {
  double acc = 0.0;
  for (size_t i = p.size(); i-- > 0;) acc = acc * x + p[i];
  return acc;
}

// Definite integral of p from 0 to x, evaluated term-wise (exact for
// polynomials).
double poly_integral(const Vec& p, double x) {
  double acc = 0.0;
  for (size_t i = p.size(); i-- > 0;) acc = (acc + p[i] / static_cast<double>(i + 1)) * x;
  return acc;
}

}  // namespace

InterpolationMatrices interpolation_matrices(const Vec& c) {
  const int s = static_cast<int>(c.size());
  InterpolationMatrices out{Mat(s, s), Mat(s, s), Mat(s, s)};
  for (int j = 0; j < s; ++j) {
    Vec phi{1.0};
    for (int k = 0; k < s; ++k)
      if (k != j) phi = poly_mul(phi, Vec{-c[k], 1.0});
    const double denom = poly_eval(phi, c[j]);
    if (std::abs(denom) < 1e-14) throw std::invalid_argument("degenerate abscissae");
    for (int i = 0; i < s; ++i) {
      out.B0(i, j) = poly_integral(phi, 1.0 + c[i]) / denom;
      out.B1(i, j) = poly_eval(phi, 1.0 + c[i]) / denom;
      out.B2(i, j) = poly_integral(phi, c[i]) / denom;
    }
  }
  return out;
}

Mat build_b_matrix(const Mat& A, const Mat& V, const Vec& c) {
  const int s = static_cast<int>(c.size());
  if (A.rows != s || A.cols != s || V.rows != s || V.cols != s)
    throw std::invalid_argument("build_b_matrix: dimension mismatch");
  const auto m = interpolation_matrices(c);
  return m.B0 - A * m.B1 - V * m.B2 + V * A;
}

WeightMatrix weight_vectors(const Mat& A, const Vec& c, int p) {
  const int s = static_cast<int>(c.size());
  if (A.rows != s || A.cols != s)
    throw std::invalid_argument("weight_vectors: dimension mismatch");
  Mat W(s, p + 1);
  for (int i = 0; i < s; ++i) W(i, 0) = 1.0;
  Vec ck(s, 1.0);  // c^(k-1), elementwise
  double fact = 1.0;
  for (int k = 1; k <= p; ++k) {
    const Vec Ac = A * ck;
    fact *= k;
    for (int i = 0; i < s; ++i) W(i, k) = std::pow(c[i], k) / fact - Ac[i] * k / fact;
    for (int i = 0; i < s; ++i) ck[i] *= c[i];
  }
  return {W};
}

namespace {

GlmTableau make_tableau(std::string name, TableauKind kind, double lambda, Vec c,
                        Mat A, Mat B, Mat V) {
  GlmTableau t;
  t.name = std::move(name);
  t.kind = kind;
  t.lambda = lambda;
  t.s = static_cast<int>(c.size());
  t.r = t.s;
  t.p = t.s;
  t.q = t.s;
  t.c = std::move(c);
  t.A = std::move(A);
  t.U = Mat::identity(t.s);
  t.B = std::move(B);
  t.V = std::move(V);
  return t;
}

Mat rank_one_v(const Vec& v) {
  const int r = static_cast<int>(v.size());
  Mat V(r, r);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) V(i, j) = v[j];
  return V;
}

// Second-order pairs: coefficients are surds, computed here rather than
// stored as rounded decimals.
ImexGlmPair make_pair_2(bool variant_b) {
  const double s2 = std::sqrt(2.0);
  const double lambda = (2.0 - s2) / 2.0;
  const Vec c{0.0, 1.0};
  const Vec v{(3.0 - s2) / 2.0, (s2 - 1.0) / 2.0};

  Mat Ai{{lambda, 0.0}, {(2.0 * s2 + 6.0) / 7.0, lambda}};
  Mat Bi{{(73.0 - 34.0 * s2) / 28.0, (4.0 * s2 - 5.0) / 4.0},
         {(87.0 - 48.0 * s2) / 28.0, (-45.0 + 34.0 * s2) / 28.0}};

  Mat Ae = variant_b ? Mat{{0.0, 0.0}, {1.5, 0.0}} : Mat{{0.0, 0.0}, {2.0, 0.0}};
  Mat Be = variant_b
               ? Mat{{s2 / 2.0, (3.0 - s2) / 4.0}, {(s2 - 1.0) / 2.0, (3.0 - s2) / 4.0}}
               : Mat{{(3.0 * s2 - 1.0) / 4.0, (3.0 - s2) / 4.0},
                     {(3.0 * s2 - 3.0) / 4.0, (1.0 - s2) / 4.0}};

  ImexGlmPair pair;
  pair.name = variant_b ? "2B" : "2A";
  pair.explicit_method = make_tableau(pair.name + " explicit", TableauKind::explicit_type1,
                                      0.0, c, Ae, Be, rank_one_v(v));
  pair.implicit_method = make_tableau(pair.name + " implicit", TableauKind::implicit_type2,
                                      lambda, c, Ai, Bi, rank_one_v(v));
  // Endpoint weights: beta0 is the first row of the explicit B (valid since
  // c1 = 0 makes the first explicit output component the solution itself);
  // beta0_hat solves the k = 0 dense-output condition against the implicit
  // stage representation with gamma0 fixed to v. Both pairs share the
  // implicit member and therefore the same beta0_hat.
  pair.termination.beta0 = pair.explicit_method.B.row(0);
  pair.termination.beta0_hat = {(73.0 - 34.0 * s2) / 28.0, (-1.0 + 2.0 * s2) / 4.0};
  pair.termination.gamma0 = v;
  return pair;
}

ImexGlmPair make_pair_3(bool variant_b) {
  const Vec c{0.0, 0.5, 1.0};
  ImexGlmPair pair;
  if (!variant_b) {
    pair.name = "3A";
    const double lambda = 0.5;
    Mat Ai{{0.5, 0.0, 0.0},
           {0.200835027145109, 0.5, 0.0},
           {-1.30998408899641, 1.01685248853025, 0.5}};
    Mat Bi{{1.01640094894605, 0.632229903531054, -0.408057475882764},
           {0.724734282279383, 1.46556323686439, -0.6505591694540},
           {-0.333784872917534, 4.34945403578847, -1.481964185810437}};
    Mat Ae{{0.0, 0.0, 0.0},
           {0.773142038041842, 0.0, 0.0},
           {-0.574721803854933, 1.40234019763932, 0.0}};
    Mat Be{{0.568615416356845, 0.349254080830621, 0.226439028444830},
           {0.776948749690179, -0.317412585836046, 0.411630323736322},
           {0.332941885384188, 1.22294134041526, -0.239193093951542}};
    const Vec v{0.910428360600012, 0.358564648055175, -0.268993008655188};
    pair.explicit_method = make_tableau("3A explicit", TableauKind::explicit_type1, 0.0, c,
                                        Ae, Be, rank_one_v(v));
    pair.implicit_method = make_tableau("3A implicit", TableauKind::implicit_type2, lambda,
                                        c, Ai, Bi, rank_one_v(v));
    pair.termination.beta0 = pair.explicit_method.B.row(0);
    pair.termination.beta0_hat = {1.01640094894605, 0.632229903531054, 0.0919425241172364};
    pair.termination.gamma0 = v;
  } else {
    pair.name = "3B";
    const double lambda = 0.435866521508459;
    Mat Ai{{lambda, 0.0, 0.0},
           {0.250514880897719, lambda, 0.0},
           {-1.211594287777006, 1.00127459988119, lambda}};
    Mat Bi{{0.833790728250125, 0.645998912146314, -0.315827085512970},
           {0.606257540075000, 1.28693181000502, -0.479741676094274},
           {-0.308416769489771, 3.80342155052421, -1.12072253825515}};
    Mat Ae{{0.0, 0.0, 0.0},
           {0.753076872681821, 0.0, 0.0},
           {-0.4897243738259477, 1.28728279647947, 0.0}};
    Mat Be{{0.755324932592235, 0.24363012413977, 0.245110297813246},
           {0.963658265925568, -0.423036542526896, 0.450366758464759},
           {0.634708802779431, 0.772145180244847, 0.0396529488674508}};
    const Vec v{0.552090962040363, 0.734856659871292, -0.286947621911655};
    pair.explicit_method = make_tableau("3B explicit", TableauKind::explicit_type1, 0.0, c,
                                        Ae, Be, rank_one_v(v));
    pair.implicit_method = make_tableau("3B implicit", TableauKind::implicit_type2, lambda,
                                        c, Ai, Bi, rank_one_v(v));
    pair.termination.beta0 = pair.explicit_method.B.row(0);
    pair.termination.beta0_hat = {0.833790728250125, 0.645998912146314, 0.120039435995489};
    pair.termination.gamma0 = v;
  }
  return pair;
}

}  // namespace

const std::vector<ImexGlmPair>& catalog() {
  static const std::vector<ImexGlmPair> pairs = {
      make_pair_2(false), make_pair_2(true), make_pair_3(false), make_pair_3(true)};
  return pairs;
}

const ImexGlmPair& find_pair(const std::string& name) {
  for (const auto& p : catalog())
    if (p.name == name) return p;
  std::string msg = "unknown method '" + name + "'; available:";
  for (const auto& p : catalog()) msg += " " + p.name;
  throw std::out_of_range(msg);
}

std::vector<std::string> validate(const GlmTableau& t) {
  std::vector<std::string> diags;
  const int s = t.s, r = t.r;
  if (static_cast<int>(t.c.size()) != s || t.A.rows != s || t.A.cols != s ||
      t.U.rows != s || t.U.cols != r || t.B.rows != r || t.B.cols != s ||
      t.V.rows != r || t.V.cols != r) {
    diags.push_back("inconsistent dimensions");
    return diags;
  }
  for (int i = 0; i < s; ++i)
    for (int j = i + 1; j < s; ++j)
      if (std::abs(t.A(i, j)) > kStructTol) {
        diags.push_back("A not lower triangular");
        goto tri_done;
      }
tri_done:
  if (t.kind == TableauKind::explicit_type1) {
    for (int i = 0; i < s; ++i)
      if (std::abs(t.A(i, i)) > kStructTol) {
        diags.push_back("nonzero explicit diagonal");
        break;
      }
  } else {
    for (int i = 0; i < s; ++i)
      if (std::abs(t.A(i, i) - t.lambda) > kStructTol) {
        diags.push_back("non-constant implicit diagonal");
        break;
      }
  }
  for (int i = 0; i < r; ++i) {
    double sum = 0.0;
    for (int j = 0; j < r; ++j) sum += t.V(i, j);
    if (std::abs(sum - 1.0) > kStructTol) {
      diags.push_back("V rows not stochastic");
      break;
    }
  }
  for (int i = 1; i < r; ++i)
    for (int j = 0; j < r; ++j)
      if (std::abs(t.V(i, j) - t.V(0, j)) > kStructTol) {
        diags.push_back("V rows not identical");
        goto rows_done;
      }
rows_done:
  if (t.p == t.s && t.q == t.s && t.r == t.s &&
      max_abs_diff(t.U, Mat::identity(s)) > kStructTol)
    diags.push_back("U not identity");
  for (int i = 0; i + 1 < s; ++i)
    if (!(t.c[i] < t.c[i + 1])) {
      diags.push_back("abscissae not strictly increasing");
      break;
    }
  return diags;
}

std::vector<std::string> validate(const ImexGlmPair& pair) {
  std::vector<std::string> diags;
  for (auto& d : validate(pair.explicit_method)) diags.push_back("explicit: " + d);
  for (auto& d : validate(pair.implicit_method)) diags.push_back("implicit: " + d);
  if (pair.explicit_method.kind != TableauKind::explicit_type1)
    diags.push_back("explicit member not type 1");
  if (pair.implicit_method.kind != TableauKind::implicit_type2)
    diags.push_back("implicit member not type 2");
  if (pair.explicit_method.c != pair.implicit_method.c)
    diags.push_back("abscissae differ between members");
  if (!(pair.explicit_method.U == pair.implicit_method.U))
    diags.push_back("U differs between members");
  if (!(pair.explicit_method.V == pair.implicit_method.V))
    diags.push_back("V differs between members");
  const size_t s = pair.explicit_method.c.size();
  if (pair.termination.beta0.size() != s || pair.termination.beta0_hat.size() != s ||
      pair.termination.gamma0.size() != static_cast<size_t>(pair.explicit_method.r))
    diags.push_back("termination coefficient dimensions");
  return diags;
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

namespace {

void emit_vec(std::ostream& os, const Vec& v) {
  os << "[";
  for (size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << format_double(v[i]);
  os << "]";
}

void emit_mat(std::ostream& os, const Mat& m) {
  os << "[";
  for (int i = 0; i < m.rows; ++i) {
    if (i) os << ",";
    emit_vec(os, m.row(i));
  }
  os << "]";
}

Mat mat_from_json(const nlohmann::json& j) {
  Mat m(static_cast<int>(j.size()), j.empty() ? 0 : static_cast<int>(j[0].size()));
  for (int i = 0; i < m.rows; ++i)
    for (int jj = 0; jj < m.cols; ++jj) m(i, jj) = j[i][jj].get<double>();
  return m;
}

}  // namespace

std::string pair_to_json(const ImexGlmPair& pair) {
  const GlmTableau& e = pair.explicit_method;
  const GlmTableau& i = pair.implicit_method;
  std::ostringstream os;
  os << "{\"name\":\"" << pair.name << "\",\"c\":";
  emit_vec(os, e.c);
  os << ",\"A\":";
  emit_mat(os, e.A);
  os << ",\"Ahat\":";
  emit_mat(os, i.A);
  os << ",\"U\":";
  emit_mat(os, e.U);
  os << ",\"B\":";
  emit_mat(os, e.B);
  os << ",\"Bhat\":";
  emit_mat(os, i.B);
  os << ",\"V\":";
  emit_mat(os, e.V);
  os << ",\"p\":" << e.p << ",\"q\":" << e.q << ",\"r\":" << e.r << ",\"s\":" << e.s;
  os << ",\"lambda\":" << format_double(i.lambda);
  os << ",\"termination\":{\"beta0\":";
  emit_vec(os, pair.termination.beta0);
  os << ",\"beta0_hat\":";
  emit_vec(os, pair.termination.beta0_hat);
  os << ",\"gamma0\":";
  emit_vec(os, pair.termination.gamma0);
  os << "}}";
  return os.str();
}

ImexGlmPair pair_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  ImexGlmPair pair;
  pair.name = j.at("name").get<std::string>();
  const Vec c = j.at("c").get<Vec>();
  const double lambda = j.at("lambda").get<double>();

  auto fill = [&](GlmTableau& t, const Mat& A, const Mat& B, TableauKind kind, double lam) {
    t.A = A;
    t.B = B;
    t.U = mat_from_json(j.at("U"));
    t.V = mat_from_json(j.at("V"));
    t.c = c;
    t.p = j.at("p").get<int>();
    t.q = j.at("q").get<int>();
    t.r = j.at("r").get<int>();
    t.s = j.at("s").get<int>();
    t.kind = kind;
    t.lambda = lam;
  };
  fill(pair.explicit_method, mat_from_json(j.at("A")), mat_from_json(j.at("B")),
       TableauKind::explicit_type1, 0.0);
  fill(pair.implicit_method, mat_from_json(j.at("Ahat")), mat_from_json(j.at("Bhat")),
       TableauKind::implicit_type2, lambda);
  pair.explicit_method.name = pair.name + " explicit";
  pair.implicit_method.name = pair.name + " implicit";
  const auto& t = j.at("termination");
  pair.termination.beta0 = t.at("beta0").get<Vec>();
  pair.termination.beta0_hat = t.at("beta0_hat").get<Vec>();
  pair.termination.gamma0 = t.at("gamma0").get<Vec>();
  return pair;
}

std::string catalog_to_json() {
  std::string out = "[";
  bool first = true;
  for (const auto& p : catalog()) {
    if (!first) out += ",";
    first = false;
    out += pair_to_json(p);
  }
  out += "]";
  return out;
}

}  // namespace imexglm
