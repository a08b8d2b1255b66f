#include "stratlasso/glinternet.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "stratlasso/csv.hpp"
#include "stratlasso/errors.hpp"
#include "stratlasso/kernels.hpp"
#include "stratlasso/lasso.hpp"

namespace stratlasso::glinternet {

namespace {

int block_width(const FeatureMeta& f) {
  return f.kind == FeatureKind::Continuous ? 1 : f.n_levels();
}

int cross_width(const FeatureMeta& a, const FeatureMeta& b) {
  return block_width(a) * block_width(b);
}

}  // namespace

InteractionGroupStructure build_groups(const std::vector<FeatureMeta>& features) {
  std::vector<int> candidates;
  for (std::size_t i = 0; i < features.size(); ++i)
    if (features[i].interaction_candidate) candidates.push_back(static_cast<int>(i));
  if (candidates.empty()) throw NoCandidates();

  InteractionGroupStructure st;
  st.n_features = static_cast<int>(features.size());

  int col = 0;
  for (std::size_t i = 0; i < features.size(); ++i) {
    Group g;
    g.is_interaction = false;
    g.feature_i = static_cast<int>(i);
    const int w = block_width(features[i]);
    for (int c = 0; c < w; ++c) g.cols.push_back(col++);
    g.interaction_offset = w;
    g.weight = std::sqrt(static_cast<double>(w));
    st.groups.push_back(std::move(g));
  }

  std::set<std::pair<int, int>> seen;  // unordered pair, stored (min, max)
  for (int c : candidates) {
    for (int j = 0; j < st.n_features; ++j) {
      if (j == c) continue;
      const auto key = std::minmax(c, j);
      if (!seen.insert(key).second) continue;
      Group g;
      g.is_interaction = true;
      g.feature_i = c;
      g.feature_j = j;
      const int wi = block_width(features[static_cast<std::size_t>(c)]);
      const int wj = block_width(features[static_cast<std::size_t>(j)]);
      const int wx = cross_width(features[static_cast<std::size_t>(c)],
                                 features[static_cast<std::size_t>(j)]);
      for (int k = 0; k < wi + wj + wx; ++k) g.cols.push_back(col++);
      g.interaction_offset = wi + wj;
      g.weight = std::sqrt(static_cast<double>(wi + wj + wx));
      st.pairs.emplace_back(c, j);
      st.groups.push_back(std::move(g));
    }
  }
  st.n_columns = col;
  return st;
}

Eigen::VectorXd group_soft_threshold(const Eigen::VectorXd& v, double t) {
  const double norm = v.norm();
  if (norm <= t) return Eigen::VectorXd::Zero(v.size());
  return v * (1.0 - t / norm);
}

namespace {

// Raw main block of feature f into Z columns [col0, col0+width).
void emit_main_block(const Dataset& d, int f, Eigen::MatrixXd& Z, int col0) {
  const auto& meta = d.features[static_cast<std::size_t>(f)];
  if (meta.kind == FeatureKind::Continuous) {
    Z.col(col0) = d.X.col(f);
    return;
  }
  for (int l = 0; l < meta.n_levels(); ++l)
    Z.col(col0 + l) =
        (d.X.col(f).array() == static_cast<double>(l)).cast<double>();
}

void fit_or_apply(Eigen::MatrixXd& Z, int col, bool standardize_col,
                  DesignTransform& tr, bool fit_transform, const std::string& name) {
  if (fit_transform) {
    double mean = 0.0, scale = 1.0;
    if (standardize_col) {
      const double n = static_cast<double>(Z.rows());
      mean = Z.col(col).sum() / n;
      const double var = (Z.col(col).array() - mean).square().sum() / n;
      const double sd = std::sqrt(var);
      if (sd < 1e-12) {
        if (!name.empty()) throw ZeroVarianceColumn(name);
        mean = 0.0;  // degenerate crossed column: leave raw
        scale = 1.0;
      } else {
        scale = sd;
      }
    }
    tr.mean(col) = mean;
    tr.scale(col) = scale;
  }
  if (tr.mean(col) != 0.0 || tr.scale(col) != 1.0)
    Z.col(col) = (Z.col(col).array() - tr.mean(col)) / tr.scale(col);
}

}  // namespace

Eigen::MatrixXd build_design(const Dataset& dataset,
                             const InteractionGroupStructure& structure,
                             DesignTransform& transform, bool fit_transform) {
  if (static_cast<int>(dataset.features.size()) != structure.n_features)
    throw DimensionMismatch("dataset features vs group structure");
  const Eigen::Index n = dataset.n_rows();
  Eigen::MatrixXd Z(n, structure.n_columns);
  if (fit_transform) {
    transform.mean = Eigen::VectorXd::Zero(structure.n_columns);
    transform.scale = Eigen::VectorXd::Ones(structure.n_columns);
  } else if (transform.mean.size() != structure.n_columns) {
    throw DimensionMismatch("design transform vs group structure");
  }

  for (const auto& g : structure.groups) {
    const auto& fi = dataset.features[static_cast<std::size_t>(g.feature_i)];
    const int wi = block_width(fi);
    emit_main_block(dataset, g.feature_i, Z, g.cols.front());
    for (int k = 0; k < wi; ++k)
      fit_or_apply(Z, g.cols[static_cast<std::size_t>(k)],
                   fi.kind == FeatureKind::Continuous, transform, fit_transform,
                   fi.name);
    if (!g.is_interaction) continue;

    const auto& fj = dataset.features[static_cast<std::size_t>(g.feature_j)];
    const int wj = block_width(fj);
    emit_main_block(dataset, g.feature_j, Z, g.cols[static_cast<std::size_t>(wi)]);
    for (int k = 0; k < wj; ++k)
      fit_or_apply(Z, g.cols[static_cast<std::size_t>(wi + k)],
                   fj.kind == FeatureKind::Continuous, transform, fit_transform,
                   fj.name);

    // crossed columns from this group's own (already transformed) parents
    const bool both_cont = fi.kind == FeatureKind::Continuous &&
                           fj.kind == FeatureKind::Continuous;
    int q = g.interaction_offset;
    for (int a = 0; a < wi; ++a) {
      for (int b = 0; b < wj; ++b) {
        const int dst = g.cols[static_cast<std::size_t>(q++)];
        Z.col(dst) = Z.col(g.cols[static_cast<std::size_t>(a)]).array() *
                     Z.col(g.cols[static_cast<std::size_t>(wi + b)]).array();
        fit_or_apply(Z, dst, both_cont, transform, fit_transform, "");
      }
    }
  }
  return Z;
}

double group_lambda_max(const Eigen::MatrixXd& Z, const Eigen::VectorXd& y,
                        const InteractionGroupStructure& structure) {
  const double n = static_cast<double>(Z.rows());
  const double mu0 = lasso::intercept_only_fit(y, nullptr);
  Eigen::VectorXd resid(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i)
    resid(i) = kernels::sigmoid(mu0) - y(i);
  Eigen::VectorXd dots;
  kernels::column_dots(Z, resid, dots);
  dots /= n;
  double lmax = 0.0;
  for (const auto& g : structure.groups) {
    double sq = 0.0;
    for (int c : g.cols) sq += dots(c) * dots(c);
    lmax = std::max(lmax, std::sqrt(sq) / g.weight);
  }
  return lmax;
}

namespace {

struct GroupKkt {
  bool pass = false;
  double worst = 0.0;
};

GroupKkt group_kkt(const InteractionGroupStructure& st, const Eigen::VectorXd& grad,
                   const Eigen::VectorXd& theta, double mean_score_abs,
                   double lambda, double tol) {
  GroupKkt rep;
  if (mean_score_abs > tol) return rep;
  for (const auto& g : st.groups) {
    const auto m = static_cast<Eigen::Index>(g.cols.size());
    Eigen::VectorXd gg(m), tg(m);
    for (Eigen::Index k = 0; k < m; ++k) {
      gg(k) = grad(g.cols[static_cast<std::size_t>(k)]);
      tg(k) = theta(g.cols[static_cast<std::size_t>(k)]);
    }
    const double tnorm = tg.norm();
    if (tnorm > 0.0) {
      const double resid = (gg + (lambda * g.weight / tnorm) * tg).norm();
      rep.worst = std::max(rep.worst, resid);
      if (resid > tol) return rep;
    } else {
      const double bound = lambda * g.weight;
      if (gg.norm() > bound * (1.0 + tol)) return rep;
    }
  }
  rep.pass = true;
  return rep;
}

}  // namespace

GlinternetModel fit_glinternet(const Dataset& dataset,
                               const InteractionGroupStructure& structure,
                               std::vector<double> lambda_path, double tol,
                               int max_iter, int n_lambda) {
  GlinternetModel model;
  model.structure = structure;
  model.features = dataset.features;

  const Eigen::VectorXd& y = dataset.y;
  for (Eigen::Index i = 0; i < y.size(); ++i)
    if (y(i) != 0.0 && y(i) != 1.0)
      throw NonBinaryOutcome("row " + std::to_string(i));

  const Eigen::MatrixXd Z =
      build_design(dataset, structure, model.transform, true);
  const Eigen::Index n = Z.rows();
  const Eigen::Index P = Z.cols();
  const double dn = static_cast<double>(n);

  const double lmax = group_lambda_max(Z, y, structure);
  model.lambda_max = lmax;
  if (lambda_path.empty()) {
    const double eps = (n < P) ? 1e-2 : 1e-4;
    lambda_path = lasso::default_lambda_path(std::max(lmax, 1e-300), n_lambda, eps);
  } else {
    for (std::size_t t = 1; t < lambda_path.size(); ++t)
      if (!(lambda_path[t] < lambda_path[t - 1]))
        throw InvalidConfig("lambda path must be strictly descending");
  }

  Eigen::VectorXd theta = Eigen::VectorXd::Zero(P);
  Eigen::VectorXd theta_prev = theta;
  double mu = lasso::intercept_only_fit(y, nullptr);
  double mu_prev = mu;

  Eigen::VectorXd eta = Eigen::VectorXd::Constant(n, mu);
  Eigen::VectorXd eta_prev = eta;
  Eigen::VectorXd probs, grad, resid;

  double step_l = 1.0;  // backtracked Lipschitz estimate, adapts both ways
  double momentum_t = 1.0;

  auto loss_at = [&](const Eigen::VectorXd& e) {
    return kernels::logistic_loss(y, e);
  };
  auto penalty_at = [&](const Eigen::VectorXd& th, double lambda) {
    double acc = 0.0;
    for (const auto& g : structure.groups) {
      double sq = 0.0;
      for (int c : g.cols) sq += th(c) * th(c);
      acc += g.weight * std::sqrt(sq);
    }
    return lambda * acc;
  };
  auto gradient_at = [&](const Eigen::VectorXd& e, Eigen::VectorXd& out,
                         double& score) {
    kernels::sigmoid_probs(e, probs);
    resid = probs - y;
    score = std::abs(resid.sum() / dn);
    kernels::column_dots(Z, resid, out);
    out /= dn;
  };
  // exact eta from (mu, theta): combats drift from incremental updates
  auto refresh_eta = [&](double m, const Eigen::VectorXd& th, Eigen::VectorXd& e) {
    kernels::linear_predictor(Z, th, m, nullptr, e);
  };

  model.entries.reserve(lambda_path.size());
  for (std::size_t t = 0; t < lambda_path.size(); ++t) {
    const double lambda = lambda_path[t];
    double objective = loss_at(eta) + penalty_at(theta, lambda);
    momentum_t = 1.0;
    theta_prev = theta;
    eta_prev = eta;
    mu_prev = mu;

    bool converged = false;
    for (int iter = 0; iter < max_iter && !converged; ++iter) {
      const bool plain_step = momentum_t <= 1.0;

      // True-gradient stationarity check, every few iterations and always
      // before the first step so an already-optimal warm start (all groups
      // zero at lambda_max) is returned exactly untouched.
      if (plain_step || iter % 4 == 0) {
        double score;
        gradient_at(eta, grad, score);
        if (group_kkt(structure, grad, theta, score, lambda, tol).pass) {
          refresh_eta(mu, theta, eta);
          gradient_at(eta, grad, score);
          if (group_kkt(structure, grad, theta, score, lambda, tol).pass) {
            converged = true;
            break;
          }
        }
      }

      // momentum point (v == x when restarting or on the first step)
      const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum_t * momentum_t));
      const double mom = plain_step ? 0.0 : (momentum_t - 1.0) / t_next;
      Eigen::VectorXd theta_v = mom == 0.0 ? theta : theta + mom * (theta - theta_prev);
      Eigen::VectorXd eta_v = mom == 0.0 ? eta : eta + mom * (eta - eta_prev);
      const double mu_v = mom == 0.0 ? mu : mu + mom * (mu - mu_prev);

      double score_v;
      Eigen::VectorXd grad_v;
      gradient_at(eta_v, grad_v, score_v);
      const double loss_v = loss_at(eta_v);

      // backtracked proximal step from the momentum point
      Eigen::VectorXd theta_c(P), eta_c;
      for (int bt = 0; bt < 60; ++bt) {
        for (const auto& g : structure.groups) {
          const auto m = static_cast<Eigen::Index>(g.cols.size());
          Eigen::VectorXd v(m);
          for (Eigen::Index k = 0; k < m; ++k) {
            const int c = g.cols[static_cast<std::size_t>(k)];
            v(k) = theta_v(c) - grad_v(c) / step_l;
          }
          const Eigen::VectorXd upd =
              group_soft_threshold(v, lambda * g.weight / step_l);
          for (Eigen::Index k = 0; k < m; ++k)
            theta_c(g.cols[static_cast<std::size_t>(k)]) = upd(k);
        }
        // eta update restricted to columns whose coefficient moved
        eta_c = eta_v;
        double quad = 0.0, lin = 0.0;
        for (Eigen::Index c = 0; c < P; ++c) {
          const double d = theta_c(c) - theta_v(c);
          if (d != 0.0) {
            eta_c += Z.col(c) * d;
            quad += d * d;
            lin += grad_v(c) * d;
          }
        }
        const double loss_c = loss_at(eta_c);
        if (loss_c <= loss_v + lin + 0.5 * step_l * quad + 1e-12 * std::abs(loss_v))
          break;
        step_l *= 2.0;
      }

      // intercept refinement: damped Newton on mu
      double mu_c = mu_v;
      for (int it = 0; it < 2; ++it) {
        kernels::sigmoid_probs(eta_c, probs);
        const double gmu = (probs - y).sum() / dn;
        double h = (probs.array() * (1.0 - probs.array())).sum() / dn;
        h = std::max(h, 1e-10);
        const double dmu = gmu / h;
        if (std::abs(dmu) < 1e-16) break;
        mu_c -= dmu;
        eta_c.array() -= dmu;
      }

      const double objective_c = loss_at(eta_c) + penalty_at(theta_c, lambda);
      if (objective_c > objective + 1e-14) {
        if (plain_step) {
          // a backtracked plain step cannot rise; we are at numeric floor
          refresh_eta(mu, theta, eta);
          objective = loss_at(eta) + penalty_at(theta, lambda);
          continue;
        }
        momentum_t = 1.0;  // monotone restart: retry from x without momentum
        continue;
      }

      theta_prev = theta;
      eta_prev = eta;
      mu_prev = mu;
      theta = theta_c;
      eta = eta_c;
      mu = mu_c;
      objective = objective_c;
      momentum_t = t_next;
      step_l *= 0.97;  // let the step length re-adapt downward
    }

    if (!converged)
      throw Diverged("group KKT not reached within " + std::to_string(max_iter) +
                     " iterations at lambda " + std::to_string(lambda));

    GlinternetEntry entry;
    entry.lambda = lambda;
    entry.intercept = mu;
    entry.theta = theta;
    entry.deviance = 2.0 * loss_at(eta);
    model.entries.push_back(std::move(entry));
  }

  return model;
}

std::vector<Eigen::VectorXd> composite_main_effects(const GlinternetModel& model,
                                                    int lambda_index) {
  const auto& st = model.structure;
  const auto& theta = model.entries.at(static_cast<std::size_t>(lambda_index)).theta;
  std::vector<Eigen::VectorXd> out(static_cast<std::size_t>(st.n_features));
  for (int f = 0; f < st.n_features; ++f)
    out[static_cast<std::size_t>(f)] =
        Eigen::VectorXd::Zero(block_width(model.features[static_cast<std::size_t>(f)]));

  for (const auto& g : st.groups) {
    const int wi = block_width(model.features[static_cast<std::size_t>(g.feature_i)]);
    for (int k = 0; k < wi; ++k)
      out[static_cast<std::size_t>(g.feature_i)](k) +=
          theta(g.cols[static_cast<std::size_t>(k)]);
    if (!g.is_interaction) continue;
    const int wj = block_width(model.features[static_cast<std::size_t>(g.feature_j)]);
    for (int k = 0; k < wj; ++k)
      out[static_cast<std::size_t>(g.feature_j)](k) +=
          theta(g.cols[static_cast<std::size_t>(wi + k)]);
  }
  return out;
}

std::vector<InteractionTerm> extract_interactions(const GlinternetModel& model,
                                                  int lambda_index) {
  const auto& st = model.structure;
  const auto& theta = model.entries.at(static_cast<std::size_t>(lambda_index)).theta;
  std::vector<InteractionTerm> out;
  for (const auto& g : st.groups) {
    if (!g.is_interaction) continue;
    double sq = 0.0;
    for (std::size_t k = static_cast<std::size_t>(g.interaction_offset);
         k < g.cols.size(); ++k) {
      const double v = theta(g.cols[k]);
      sq += v * v;
    }
    const double strength = std::sqrt(sq);
    if (strength > 0.0)
      out.push_back(InteractionTerm{g.feature_i, g.feature_j, strength});
  }
  return out;
}

std::vector<PathStats> path_statistics(const GlinternetModel& model,
                                       const std::vector<double>* cv_error) {
  std::vector<PathStats> out;
  out.reserve(model.entries.size());
  for (std::size_t t = 0; t < model.entries.size(); ++t) {
    PathStats s;
    s.lambda = model.entries[t].lambda;
    const auto mains = composite_main_effects(model, static_cast<int>(t));
    for (const auto& m : mains)
      if (m.norm() > 0.0) ++s.n_main_effects;
    s.n_interactions =
        static_cast<int>(extract_interactions(model, static_cast<int>(t)).size());
    if (cv_error != nullptr && t < cv_error->size()) {
      s.cv_error = (*cv_error)[t];
      s.has_cv = true;
    }
    out.push_back(s);
  }
  return out;
}

void write_path_stats_csv(const std::vector<PathStats>& stats,
                          const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open for writing: " + path);
  out << "lambda,n_main_effects,n_interactions,cv_error\n";
  for (const auto& s : stats) {
    out << format_double(s.lambda) << ',' << s.n_main_effects << ','
        << s.n_interactions << ',';
    if (s.has_cv) out << format_double(s.cv_error);
    out << '\n';
  }
}

void export_network(const GlinternetModel& model, int lambda_index,
                    const std::string& path) {
  auto terms = extract_interactions(model, lambda_index);
  std::sort(terms.begin(), terms.end(), [](const auto& a, const auto& b) {
    if (a.strength != b.strength) return a.strength > b.strength;
    if (a.feature_i != b.feature_i) return a.feature_i < b.feature_i;
    return a.feature_j < b.feature_j;
  });
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open for writing: " + path);
  out << "candidate,partner,strength\n";
  for (const auto& term : terms) {
    out << model.features[static_cast<std::size_t>(term.feature_i)].name << ','
        << model.features[static_cast<std::size_t>(term.feature_j)].name << ','
        << format_double(term.strength) << '\n';
  }
}

Eigen::VectorXd predict_proba(const GlinternetModel& model, int lambda_index,
                              const Dataset& rows) {
  DesignTransform tr = model.transform;
  const Eigen::MatrixXd Z = build_design(rows, model.structure, tr, false);
  const auto& entry = model.entries.at(static_cast<std::size_t>(lambda_index));
  Eigen::VectorXd eta, probs;
  kernels::linear_predictor(Z, entry.theta, entry.intercept, nullptr, eta);
  kernels::sigmoid_probs(eta, probs);
  return probs;
}

}  // namespace stratlasso::glinternet
