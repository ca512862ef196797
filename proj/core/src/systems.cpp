#include "lma/systems.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "json.hpp"
#include "lma/spectral.hpp"

namespace lma {

namespace {

MatrixXd oscillator_block(double alpha, double omega) {
  MatrixXd b(2, 2);
  b << -alpha, omega, -omega, -alpha;
  return b;
}

std::vector<Complex> sorted_eigs(const MatrixXd& m) {
  Eigen::EigenSolver<MatrixXd> es(m, false);
  std::vector<Complex> v(es.eigenvalues().data(),
                         es.eigenvalues().data() + es.eigenvalues().size());
  std::sort(v.begin(), v.end(), [](Complex a, Complex b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  return v;
}

}  // namespace

MatrixFamily two_oscillator_family(double alpha1, double alpha2,
                                   double omega1,
                                   std::function<double(double)> omega2,
                                   double coupling) {
  return [=](double gamma) {
    double w2 = omega2(gamma);
    if (alpha1 + alpha2 >= 0.2 * (omega1 + w2))
      throw AssumptionViolated(
          "damping not small against the eigenfrequencies");
    MatrixXd a = MatrixXd::Zero(4, 4);
    a.block(0, 0, 2, 2) = oscillator_block(alpha1, omega1);
    a.block(2, 2, 2, 2) = oscillator_block(alpha2, w2);
    a(0, 2) = coupling;
    a(2, 0) = coupling;

    // Coupling must perturb the block eigenvalues by < 10%.
    MatrixXd uncoupled = a;
    uncoupled(0, 2) = uncoupled(2, 0) = 0.0;
    auto pert = sorted_eigs(a);
    auto base = sorted_eigs(uncoupled);
    for (std::size_t i = 0; i < pert.size(); ++i)
      if (std::abs(pert[i] - base[i]) > 0.1 * std::abs(base[i]))
        throw AssumptionViolated("coupling too strong for the block model");
    return StateMatrix(a);
  };
}

MatrixFamily merge_family(double a, double b) {
  return [=](double gamma) {
    MatrixXd m(2, 2);
    m << 0.0, 1.0, -(a * a + (gamma - b)), -2.0 * a;
    return StateMatrix(m);
  };
}

MatrixFamily instability_family(const StateMatrix& a0,
                                const MatrixXd& direction) {
  MatrixXd dir = direction.size() ? direction
                                  : MatrixXd::Identity(a0.n(), a0.n());
  if (dir.rows() != a0.n() || dir.cols() != a0.n())
    throw DimensionMismatch("direction dimension mismatch");
  return [a0, dir](double gamma) {
    return StateMatrix(a0.a + gamma * dir);
  };
}

std::vector<Complex> table1_reference_spectrum() {
  return {
      {-0.096, 0.0},  {-0.117, 0.0},          {-0.111, 3.43},
      {-0.111, -3.43}, {-0.265, 0.0},         {-0.276, 0.0},
      {-0.492, 6.82}, {-0.492, -6.82},        {-0.506, 7.02},
      {-0.506, -7.02},
  };
}

StateMatrix matrix_with_spectrum(const std::vector<Complex>& spectrum,
                                 unsigned seed) {
  const int n = static_cast<int>(spectrum.size());
  MatrixXd d = MatrixXd::Zero(n, n);
  int i = 0;
  while (i < n) {
    const Complex& l = spectrum[i];
    if (l.imag() == 0.0) {
      d(i, i) = l.real();
      ++i;
    } else {
      if (i + 1 >= n || spectrum[i + 1] != std::conj(l))
        throw Error("complex spectrum entries must come in conjugate pairs");
      d.block(i, i, 2, 2) = oscillator_block(-l.real(), std::abs(l.imag()));
      i += 2;
    }
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> norm(0.0, 1.0);
  MatrixXd t(n, n);
  for (;;) {
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c)
        t(r, c) = (r == c ? 1.0 : 0.0) + 0.3 * norm(rng) / std::sqrt(n);
    Eigen::PartialPivLU<MatrixXd> lu(t);
    if (lu.rcond() > 1e-3) return StateMatrix(t * d * lu.inverse());
  }
}

namespace {

StateMatrix matrix_from_json(const nlohmann::json& j) {
  if (!j.contains("n") || !j.contains("data"))
    throw ParseError("matrix JSON requires fields n and data");
  int n = j.at("n").get<int>();
  auto data = j.at("data").get<std::vector<double>>();
  if (static_cast<int>(data.size()) != n * n)
    throw ParseError("matrix JSON data length must be n^2");
  MatrixXd a(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) a(r, c) = data[r * n + c];
  VectorXd scale;
  if (j.contains("scale")) {
    auto s = j.at("scale").get<std::vector<double>>();
    if (static_cast<int>(s.size()) != n)
      throw ParseError("matrix JSON scale length must be n");
    scale = Eigen::Map<VectorXd>(s.data(), n);
  }
  return scale.size() ? StateMatrix(a, scale) : StateMatrix(a);
}

StateMatrix matrix_from_csv(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::vector<double> row;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) {
      try {
        std::size_t pos = 0;
        double v = std::stod(cell, &pos);
        while (pos < cell.size() && std::isspace(
                   static_cast<unsigned char>(cell[pos])))
          ++pos;
        if (pos != cell.size()) throw std::invalid_argument(cell);
        row.push_back(v);
      } catch (const std::exception&) {
        throw ParseError("bad number '" + cell + "' at row " +
                         std::to_string(lineno));
      }
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError("empty matrix input");
  const std::size_t n = rows.size();
  MatrixXd a(n, n);
  for (std::size_t r = 0; r < n; ++r) {
    if (rows[r].size() != n)
      throw ParseError("row " + std::to_string(r + 1) + " has " +
                       std::to_string(rows[r].size()) + " entries, expected " +
                       std::to_string(n));
    for (std::size_t c = 0; c < n; ++c) a(r, c) = rows[r][c];
  }
  return StateMatrix(a);
}

}  // namespace

StateMatrix load_matrix(const std::string& text) {
  auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
    if (j.is_discarded()) throw ParseError("malformed matrix JSON");
    return matrix_from_json(j);
  }
  return matrix_from_csv(text);
}

StateMatrix load_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open matrix file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_matrix(buf.str());
}

StateMatrix random_stable(int n, unsigned seed, double margin) {
  if (n < 1 || margin <= 0.0)
    throw Error("random_stable requires n >= 1 and margin > 0");
  for (int attempt = 0; attempt < 64; ++attempt) {
    std::mt19937_64 rng(seed + 0x9e3779b97f4a7c15ull * attempt);
    std::normal_distribution<double> norm(0.0, 1.0);
    MatrixXd a(n, n);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) a(r, c) = norm(rng) / std::sqrt(n);
    Eigen::EigenSolver<MatrixXd> es(a, false);
    double abscissa = es.eigenvalues().real().maxCoeff();
    a -= (abscissa + margin) * MatrixXd::Identity(n, n);
    try {
      StateMatrix sm(a);
      eigendecompose(sm);
      return sm;
    } catch (const NonSimpleSpectrum&) {
    } catch (const SingularEigenbasis&) {
    }
  }
  throw GenerationFailed("no simple-spectrum stable matrix after 64 tries");
}

}  // namespace lma
