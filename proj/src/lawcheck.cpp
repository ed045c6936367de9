#include "paravect/lawcheck.hpp"

#include "paravect/attention.hpp"
#include "paravect/circuits.hpp"
#include "paravect/equivariance.hpp"
#include "paravect/freemonad.hpp"
#include "paravect/rng.hpp"
#include "paravect/weights_io.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

namespace paravect::lawcheck {

namespace {

using Clock = std::chrono::steady_clock;

struct CheckOutcome {
    double statistic = 0.0;
    std::string witness;
};

enum class Direction { ResidualBelow, StatisticAbove };

class Suite {
  public:
    Suite(Report& report, const RunConfig& cfg) : report_(report), cfg_(cfg) {}

    double tolerance(const std::string& name, double fallback) const {
        auto it = cfg_.tolerances.find(name);
        return it == cfg_.tolerances.end() ? fallback : it->second;
    }

    void run(const std::string& name, double default_tol, Direction dir,
             const std::function<CheckOutcome(double)>& body) {
        const double tol = tolerance(name, default_tol);
        const auto start = Clock::now();
        CheckOutcome outcome = body(tol);
        const auto stop = Clock::now();

        CheckResult result;
        result.name = name;
        result.residual = outcome.statistic;
        result.tolerance = tol;
        result.witness = std::move(outcome.witness);
        result.pass = dir == Direction::ResidualBelow ? outcome.statistic <= tol
                                                      : outcome.statistic > tol;
        result.elapsed_ms =
            std::chrono::duration<double, std::milli>(stop - start).count();
        report_.checks.push_back(std::move(result));
    }

    /// For results computed as a bundle: record an already-judged check.
    void record(const std::string& name, bool pass, double statistic, double tol,
                std::string witness, double elapsed_ms) {
        report_.checks.push_back(
            {name, pass, statistic, tol, std::move(witness), elapsed_ms});
    }

  private:
    Report& report_;
    const RunConfig& cfg_;
};

std::string pairWitness(Index a, Index b) {
    return "(" + std::to_string(a) + "," + std::to_string(b) + ")";
}

} // namespace

circuits::ToyModel randomToyModel(Index n_layers, Index heads, Index d_model, Index d_vocab,
                                  Index d_head, Index n, Rng& rng) {
    circuits::ToyModel m;
    m.d_model = d_model;
    m.d_vocab = d_vocab;
    m.n = n;
    m.W_E = rng.matrix(d_model, d_vocab);
    m.W_U = rng.matrix(d_vocab, d_model);
    for (Index l = 0; l < n_layers; ++l) {
        std::vector<circuits::AttachedHead> layer;
        for (Index h = 0; h < heads; ++h) {
            circuits::AttachedHead ah;
            ah.head = circuits::makeHead(rng.matrix(d_head, d_model), rng.matrix(d_head, d_model),
                                         rng.matrix(d_head, d_model), rng.matrix(d_model, d_head));
            ah.mixer = rng.matrix(n, n);
            layer.push_back(std::move(ah));
        }
        m.layers.push_back(std::move(layer));
    }
    return m;
}

namespace {

double relDiff(const Matrix& a, const Matrix& b) { return vect::relativeResidual(a, b); }

void addVectChecks(Suite& suite, const RunConfig& cfg) {
    suite.run("vect.compose_assoc", 1e-12, Direction::ResidualBelow, [&](double) {
        Rng rng(cfg.seed, "vect.compose_assoc");
        CheckOutcome out;
        for (int t = 0; t < cfg.trials; ++t) {
            const Index a = rng.integer(1, 8), b = rng.integer(1, 8), c = rng.integer(1, 8),
                        d = rng.integer(1, 8);
            const Matrix f = rng.matrix(c, d), g = rng.matrix(b, c), h = rng.matrix(a, b);
            out.statistic = std::max(
                out.statistic, relDiff(vect::compose(vect::compose(h, g), f),
                                       vect::compose(h, vect::compose(g, f))));
        }
        return out;
    });

    suite.run("vect.kron_mixed_product", 1e-12, Direction::ResidualBelow, [&](double) {
        Rng rng(cfg.seed, "vect.kron_mixed_product");
        CheckOutcome out;
        for (int t = 0; t < cfg.trials; ++t) {
            const Index p = rng.integer(1, 4), q = rng.integer(1, 4), r = rng.integer(1, 4);
            const Index s = rng.integer(1, 4), u = rng.integer(1, 4), v = rng.integer(1, 4);
            const Matrix a = rng.matrix(p, q), c = rng.matrix(q, r);
            const Matrix b = rng.matrix(s, u), d = rng.matrix(u, v);
            out.statistic = std::max(
                out.statistic, relDiff(vect::kron(a, b) * vect::kron(c, d),
                                       vect::kron(Matrix(a * c), Matrix(b * d))));
        }
        return out;
    });

    suite.run("vect.perm_homomorphism", 0.0, Direction::ResidualBelow, [&](double) {
        Rng rng(cfg.seed, "vect.perm_homomorphism");
        CheckOutcome out;
        for (int t = 0; t < cfg.trials; ++t) {
            const Index n = rng.integer(2, 6), block = rng.integer(1, 3);
            const auto p = rng.permutation(n), q = rng.permutation(n);
            const Matrix lhs = vect::permMatrix(vect::compose(p, q), block);
            const Matrix rhs = vect::permMatrix(p, block) * vect::permMatrix(q, block);
            out.statistic = std::max(out.statistic, (lhs - rhs).cwiseAbs().maxCoeff());
        }
        return out;
    });

    suite.run("vect.perm_orthogonal", 0.0, Direction::ResidualBelow, [&](double) {
        Rng rng(cfg.seed, "vect.perm_orthogonal");
        CheckOutcome out;
        for (int t = 0; t < cfg.trials; ++t) {
            const Index n = rng.integer(2, 6), block = rng.integer(1, 3);
            const Matrix rep = vect::permMatrix(rng.permutation(n), block);
            out.statistic = std::max(
                out.statistic,
                (rep * rep.transpose() - Matrix::Identity(n * block, n * block))
                    .cwiseAbs()
                    .maxCoeff());
        }
        return out;
    });

    suite.run("vect.unit_laws", 0.0, Direction::ResidualBelow, [&](double) {
        Rng rng(cfg.seed, "vect.unit_laws");
        CheckOutcome out;
        const Matrix zero_map(0, 0);
        for (int t = 0; t < 10; ++t) {
            const Matrix f = rng.matrix(rng.integer(1, 5), rng.integer(1, 5));
            const double sum_unit =
                std::max((vect::directSum(f, zero_map) - f).cwiseAbs().maxCoeff(),
                         (vect::directSum(zero_map, f) - f).cwiseAbs().maxCoeff());
            const double kron_unit =
                std::max((vect::kron(vect::identity(1), f) - f).cwiseAbs().maxCoeff(),
                         (vect::kron(f, vect::identity(1)) - f).cwiseAbs().maxCoeff());
            out.statistic = std::max({out.statistic, sum_unit, kron_unit});
        }
        return out;
    });
}

para::ParaMorphism randomPara(Rng& rng, Index max_dim = 6, Index max_param = 4) {
    const Index p = rng.integer(1, max_param);
    const Index in = rng.integer(1, max_dim);
    const Index out = rng.integer(1, max_dim);
    return para::makePara(p, in, rng.matrix(out, p * in));
}

void addParaChecks(Suite& suite, const RunConfig& cfg) {
    suite.run("para.bilinearity", 1e-11, Direction::ResidualBelow, [&](double) {
        Rng rng(cfg.seed, "para.bilinearity");
        CheckOutcome out;
        for (int t = 0; t < cfg.trials; ++t) {
            const auto m = randomPara(rng);
            const Vector t1 = rng.vector(m.param_dim), t2 = rng.vector(m.param_dim);
            const Vector x1 = rng.vector(m.in_dim), x2 = rng.vector(m.in_dim);
            const double alpha = rng.uniform(-2.0, 2.0);

            const Vector lhs_p = para::evaluate(m, t1 + alpha * t2, x1);
            const Vector rhs_p =
                para::evaluate(m, t1, x1) + alpha * para::evaluate(m, t2, x1);
            const Vector lhs_x = para::evaluate(m, t1, x1 + alpha * x2);
            const Vector rhs_x =
                para::evaluate(m, t1, x1) + alpha * para::evaluate(m, t1, x2);
            out.statistic = std::max(
                {out.statistic, (lhs_p - rhs_p).norm() / std::max(1.0, rhs_p.norm()),
                 (lhs_x - rhs_x).norm() / std::max(1.0, rhs_x.norm())});
        }
        return out;
    });

    suite.run("para.compose_assoc", 1e-11, Direction::ResidualBelow, [&](double) {
        Rng rng(cfg.seed, "para.compose_assoc");
        CheckOutcome out;
        for (int t = 0; t < cfg.trials; ++t) {
            const Index d0 = rng.integer(1, 6), d1 = rng.integer(1, 6), d2 = rng.integer(1, 6),
                        d3 = rng.integer(1, 6);
            const Index pf = rng.integer(1, 3), pg = rng.integer(1, 3), ph = rng.integer(1, 3);
            const auto mf = para::makePara(pf, d0, rng.matrix(d1, pf * d0));
            const auto mg = para::makePara(pg, d1, rng.matrix(d2, pg * d1));
            const auto mh = para::makePara(ph, d2, rng.matrix(d3, ph * d2));
            const auto left = para::composePara(para::composePara(mh, mg), mf);
            const auto right = para::composePara(mh, para::composePara(mg, mf));
            out.statistic = std::max(out.statistic, relDiff(left.map, right.map));
        }
        return out;
    });

    suite.run("para.flatten_functorial", 1e-11, Direction::ResidualBelow, [&](double) {
        Rng rng(cfg.seed, "para.flatten_functorial");
        CheckOutcome out;
        for (int t = 0; t < cfg.trials; ++t) {
            const Index d0 = rng.integer(1, 6), d1 = rng.integer(1, 6), d2 = rng.integer(1, 6);
            const Index pf = rng.integer(1, 4), pg = rng.integer(1, 4);
            const auto mf = para::makePara(pf, d0, rng.matrix(d1, pf * d0));
            const auto mg = para::makePara(pg, d1, rng.matrix(d2, pg * d1));
            const Vector tf = rng.vector(pf), tg = rng.vector(pg);
            const Matrix whole =
                para::flatten(para::composePara(mg, mf), vect::kronVec(tg, tf));
            const Matrix factored = para::flatten(mg, tg) * para::flatten(mf, tf);
            out.statistic = std::max(out.statistic, relDiff(whole, factored));
        }
        return out;
    });

    suite.run("para.reparam_square", 1e-10, Direction::ResidualBelow, [&](double tol) {
        Rng rng(cfg.seed, "para.reparam_square");
        CheckOutcome out;
        for (int t = 0; t < cfg.trials; ++t) {
            const auto source = randomPara(rng);
            const Matrix rho = rng.matrix(source.param_dim, rng.integer(1, 4));
            // Weight tying: target defined by the square itself.
            const auto target = para::makePara(
                rho.cols(), source.in_dim,
                source.map *
                    vect::kron(rho, Matrix::Identity(source.in_dim, source.in_dim)));
            const auto report =
                para::checkReparam(para::makeReparam(source, target, rho), tol);
            out.statistic = std::max(out.statistic, report.residual);
        }
        return out;
    });

    suite.run("para.reparam_vertical", 1e-10, Direction::ResidualBelow, [&](double tol) {
        Rng rng(cfg.seed, "para.reparam_vertical");
        CheckOutcome out;
        for (int t = 0; t < cfg.trials; ++t) {
            const auto f = randomPara(rng);
            const Matrix rho1 = rng.matrix(f.param_dim, rng.integer(1, 4));
            const auto g = para::makePara(
                rho1.cols(), f.in_dim,
                f.map * vect::kron(rho1, Matrix::Identity(f.in_dim, f.in_dim)));
            const Matrix rho2 = rng.matrix(g.param_dim, rng.integer(1, 4));
            const auto h = para::makePara(
                rho2.cols(), g.in_dim,
                g.map * vect::kron(rho2, Matrix::Identity(g.in_dim, g.in_dim)));
            const auto r1 = para::makeReparam(f, g, rho1);
            const auto r2 = para::makeReparam(g, h, rho2);
            const auto report = para::checkReparam(para::verticalCompose(r2, r1), tol);
            out.statistic = std::max(out.statistic, report.residual);
        }
        return out;
    });

    suite.run("para.reparam_horizontal", 1e-10, Direction::ResidualBelow, [&](double tol) {
        Rng rng(cfg.seed, "para.reparam_horizontal");
        CheckOutcome out;
        for (int t = 0; t < cfg.trials; ++t) {
            const Index d0 = rng.integer(1, 4), d1 = rng.integer(1, 4), d2 = rng.integer(1, 4);
            const Index pf = rng.integer(1, 3), pg = rng.integer(1, 3);
            const auto f = para::makePara(pf, d0, rng.matrix(d1, pf * d0));
            const auto g = para::makePara(pg, d1, rng.matrix(d2, pg * d1));
            const Matrix rho_f = rng.matrix(pf, rng.integer(1, 3));
            const Matrix rho_g = rng.matrix(pg, rng.integer(1, 3));
            const auto f2 = para::makePara(
                rho_f.cols(), d0, f.map * vect::kron(rho_f, Matrix::Identity(d0, d0)));
            const auto g2 = para::makePara(
                rho_g.cols(), d1, g.map * vect::kron(rho_g, Matrix::Identity(d1, d1)));
            const auto horizontal = para::horizontalCompose(para::makeReparam(g, g2, rho_g),
                                                            para::makeReparam(f, f2, rho_f));
            const auto report = para::checkReparam(horizontal, tol);
            out.statistic = std::max(out.statistic, report.residual);
        }
        return out;
    });
}

void addAttentionChecks(Suite& suite, const RunConfig& cfg) {
    const auto dims = attention::makeDims(cfg.d, cfg.d_k, cfg.d_v, cfg.n);

    suite.run("attention.functor_laws", 1e-12, Direction::ResidualBelow, [&](double tol) {
        Rng rng(cfg.seed, "attention.functor_laws.params");
        attention::AttnParams params{rng.matrix(dims.d_k, dims.d), rng.matrix(dims.d_k, dims.d),
                                     rng.matrix(dims.d_v, dims.d)};
        const auto report =
            attention::checkFunctorLaws(dims, params, cfg.trials, cfg.seed, tol);
        CheckOutcome out;
        out.statistic = std::max({report.identity_residual, report.composition_residual,
                                  report.naturality_residual});
        std::ostringstream w;
        w << "identity=" << report.identity_residual
          << " composition=" << report.composition_residual
          << " naturality=" << report.naturality_residual;
        out.witness = w.str();
        return out;
    });

    suite.run("attention.composition_stability", 1e-10, Direction::ResidualBelow,
              [&](double tol) {
                  const auto report = attention::checkCompositionStability(
                      dims, cfg.trials, cfg.seed, tol);
                  return CheckOutcome{report.residual, ""};
              });

    suite.run("attention.endomap_product", 1e-11, Direction::ResidualBelow, [&](double tol) {
        const auto report = attention::checkEndomapProduct(dims, cfg.trials, cfg.seed, tol);
        return CheckOutcome{report.residual, ""};
    });
}

void addFreemonadChecks(Suite& suite, const RunConfig& cfg) {
    const auto space = freemonad::GradedSpace::make(2, 2, cfg.depth);

    const auto start = Clock::now();
    const auto laws = freemonad::checkMonadLaws(space, cfg.trials, cfg.seed);
    const double elapsed =
        std::chrono::duration<double, std::milli>(Clock::now() - start).count();
    suite.record("freemonad.unit_left", laws.unit_left == 0.0, laws.unit_left, 0.0, "",
                 elapsed);
    suite.record("freemonad.unit_right", laws.unit_right == 0.0, laws.unit_right, 0.0, "",
                 elapsed);
    suite.record("freemonad.assoc", laws.assoc == 0.0, laws.assoc, 0.0, "", elapsed);

    suite.run("freemonad.grade_additivity", 0.0, Direction::ResidualBelow, [&](double) {
        const auto report = freemonad::checkGradeAdditivity(space);
        return CheckOutcome{report.residual, ""};
    });

    suite.run("freemonad.factorization", 1e-11, Direction::ResidualBelow, [&](double tol) {
        const auto report = freemonad::checkFactorization(space, cfg.trials, cfg.seed, tol);
        return CheckOutcome{std::max(report.unit_residual, report.mult_residual), ""};
    });
}

void addPositionalChecks(Suite& suite, const RunConfig& cfg) {
    suite.run("positional.additive_action", 1e-12, Direction::ResidualBelow, [&](double tol) {
        Rng rng(cfg.seed, "positional.additive_action");
        CheckOutcome out;
        for (int t = 0; t < 10; ++t) {
            const auto enc = positional::makeAdditive(rng.vector(rng.integer(1, 8)));
            const auto report =
                positional::checkActionLaws(positional::Encoding{enc}, 64, tol);
            out.statistic = std::max(
                {out.statistic, report.origin_residual, report.max_defect});
        }
        return out;
    });

    suite.run("positional.sinusoidal_nonadditive", 0.1, Direction::StatisticAbove,
              [&](double) {
                  CheckOutcome out;
                  out.statistic = std::numeric_limits<double>::infinity();
                  std::ostringstream w;
                  for (Index d : {Index{4}, Index{8}, Index{64}}) {
                      const auto witness = positional::nonadditivityWitness(
                          positional::Encoding{positional::makeSinusoidal(d)}, 16);
                      const double defect = witness ? witness->defect : 0.0;
                      out.statistic = std::min(out.statistic, defect);
                      w << "d=" << d << ": defect " << defect << " at "
                        << (witness ? pairWitness(witness->m, witness->m2) : "none") << "; ";
                  }
                  out.witness = w.str();
                  return out;
              });

    suite.run("positional.sinusoidal_injective", 1e-8, Direction::StatisticAbove,
              [&](double tol) {
                  const auto report = positional::checkInjectivity(
                      positional::Encoding{positional::makeSinusoidal(64)}, 256, tol);
                  return CheckOutcome{report.min_distance,
                                      "argmin " + pairWitness(report.argmin.first,
                                                              report.argmin.second)};
              });

    suite.run("positional.factor_recovery", 1e-8, Direction::ResidualBelow, [&](double) {
        Rng rng(cfg.seed, "positional.factor_recovery");
        const auto source = positional::makeSinusoidal(8);
        const Matrix planted = rng.matrix(6, 8);
        std::vector<Vector> table;
        for (Index m = 0; m < 64; ++m)
            table.push_back(planted * positional::encode(positional::Encoding{source}, m));
        const auto target = positional::makeExternal(std::move(table));
        const auto result = positional::factorThrough(positional::Encoding{source},
                                                      positional::Encoding{target}, 64);
        CheckOutcome out;
        out.statistic = (result.f - planted).cwiseAbs().maxCoeff();
        out.witness = "rank=" + std::to_string(result.rank) +
                      " unique=" + (result.unique ? "true" : "false");
        return out;
    });
}

void addEquivarianceChecks(Suite& suite, const RunConfig& cfg) {
    suite.run("equivariance.commute", 0.0, Direction::ResidualBelow, [&](double) {
        Rng rng(cfg.seed, "equivariance.commute");
        CheckOutcome out;
        bool exact = true;
        for (int t = 0; t < cfg.trials; ++t) {
            const Index n = rng.integer(2, 6);
            const Matrix per_token = rng.matrix(rng.integer(1, 4), rng.integer(1, 4));
            const auto report =
                equivariance::checkEquivariance(per_token, rng.permutation(n));
            out.statistic = std::max(out.statistic, report.max_abs_diff);
            exact = exact && std::string(report.mode) == "exact";
        }
        out.witness = exact ? "mode=exact" : "mode=tolerance";
        return out;
    });

    suite.run("equivariance.symmetry_breaking", 1e-9, Direction::StatisticAbove,
              [&](double) {
                  // Causal mixer couples token 0 to token 1; swapping tokens
                  // must not commute with it.
                  const Index d = cfg.d;
                  Matrix causal(2, 2);
                  causal << 1, 1, 0, 1;
                  const Matrix coupled = vect::kron(causal, Matrix::Identity(d, d));
                  const auto sigma = vect::Permutation::make({1, 0});
                  const auto report =
                      equivariance::symmetryBreakingWitness(coupled, sigma);
                  return CheckOutcome{report.commutator_norm, "causal mixer vs swap"};
              });
}

void addCircuitChecks(Suite& suite, const RunConfig& cfg) {
    suite.run("circuits.path_sum", 1e-10, Direction::ResidualBelow, [&](double tol) {
        Rng rng(cfg.seed, "circuits.path_sum");
        const auto model = randomToyModel(2, 2, 4, 3, 2, 3, rng);
        const auto report = circuits::checkPathSum(model, 3, tol);
        return CheckOutcome{report.residual,
                            "paths=" + std::to_string(report.path_count)};
    });

    suite.run("circuits.rank_bounds", 0.0, Direction::ResidualBelow, [&](double) {
        Rng rng(cfg.seed, "circuits.rank_bounds");
        CheckOutcome out;
        double max_excess = -static_cast<double>(cfg.d);
        for (int t = 0; t < cfg.trials; ++t) {
            const Index d_model = rng.integer(2, 6);
            const Index d_head = rng.integer(1, d_model - 1);
            const auto head = circuits::makeHead(
                rng.matrix(d_head, d_model), rng.matrix(d_head, d_model),
                rng.matrix(d_head, d_model), rng.matrix(d_model, d_head));
            const Index qk = vect::numericalRank(circuits::qkCircuit(head));
            const Index ov = vect::numericalRank(circuits::ovCircuit(head));
            max_excess = std::max(
                {max_excess, static_cast<double>(qk - d_head), static_cast<double>(ov - d_head)});
        }
        out.statistic = std::max(0.0, max_excess);
        return out;
    });

    suite.run("circuits.para_coherence", 1e-10, Direction::ResidualBelow, [&](double tol) {
        Rng rng(cfg.seed, "circuits.para_coherence");
        const auto model = randomToyModel(2, 2, 3, 3, 2, 2, rng);
        const auto report = circuits::circuitsAsPara(model, 2, tol);
        return CheckOutcome{report.residual,
                            "composite_param_dim=" +
                                std::to_string(report.composite_param_dim)};
    });

    suite.run("circuits.scores_factorization", 1e-11, Direction::ResidualBelow,
              [&](double) {
                  Rng rng(cfg.seed, "circuits.scores_factorization");
                  CheckOutcome out;
                  for (int t = 0; t < cfg.trials; ++t) {
                      const Index d_model = rng.integer(2, 6);
                      const Index d_head = rng.integer(1, d_model);
                      const Index n = rng.integer(1, 4);
                      const auto head = circuits::makeHead(
                          rng.matrix(d_head, d_model), rng.matrix(d_head, d_model),
                          rng.matrix(d_head, d_model), rng.matrix(d_model, d_head));
                      const Vector X = rng.vector(n * d_model);
                      const Matrix via_projections = circuits::attentionScores(head, X, n);
                      const Matrix qk = circuits::qkCircuit(head);
                      Matrix via_bilinear(n, n);
                      for (Index dst = 0; dst < n; ++dst)
                          for (Index src = 0; src < n; ++src)
                              via_bilinear(dst, src) =
                                  X.segment(dst * d_model, d_model).transpose() * qk *
                                  X.segment(src * d_model, d_model);
                      out.statistic =
                          std::max(out.statistic, relDiff(via_projections, via_bilinear));
                  }
                  return out;
              });
}

} // namespace

Report runLawcheck(const RunConfig& config) {
    Report report;
    report.config = config;
    Suite suite(report, config);
    addVectChecks(suite, config);
    addParaChecks(suite, config);
    addAttentionChecks(suite, config);
    addFreemonadChecks(suite, config);
    addPositionalChecks(suite, config);
    addEquivarianceChecks(suite, config);
    addCircuitChecks(suite, config);
    return report;
}

Report runStack(const RunConfig& config) {
    Report report;
    report.config = config;
    Suite suite(report, config);
    for (Index depth = 0; depth <= config.depth; ++depth) {
        const auto space = freemonad::GradedSpace::make(2, 2, depth);
        const std::string prefix = "stack.depth" + std::to_string(depth) + ".";

        const auto start = Clock::now();
        const auto laws = freemonad::checkMonadLaws(space, config.trials, config.seed);
        const double elapsed =
            std::chrono::duration<double, std::milli>(Clock::now() - start).count();
        suite.record(prefix + "unit_left", laws.unit_left == 0.0, laws.unit_left, 0.0, "",
                     elapsed);
        suite.record(prefix + "unit_right", laws.unit_right == 0.0, laws.unit_right, 0.0, "",
                     elapsed);
        suite.record(prefix + "assoc", laws.assoc == 0.0, laws.assoc, 0.0, "", elapsed);

        suite.run(prefix + "factorization", 1e-11, Direction::ResidualBelow,
                  [&](double tol) {
                      const auto fr =
                          freemonad::checkFactorization(space, config.trials, config.seed, tol);
                      return CheckOutcome{std::max(fr.unit_residual, fr.mult_residual), ""};
                  });
    }
    return report;
}

Report runCircuitsFile(const RunConfig& config, const std::string& weights_path) {
    const auto model = io::readToyModel(weights_path);
    Report report;
    report.config = config;
    Suite suite(report, config);

    std::size_t route_count = 1;
    for (const auto& layer : model.layers) route_count *= layer.size() + 1;
    const bool enumerable = route_count <= 4096;

    if (enumerable) {
        suite.run("circuits.path_norms", 0.0, Direction::ResidualBelow, [&](double) {
            const auto terms = circuits::expandPaths(model, model.n);
            std::ostringstream w;
            for (const auto& term : terms) {
                if (term.heads.empty()) {
                    w << "direct";
                } else {
                    for (std::size_t i = 0; i < term.heads.size(); ++i) {
                        if (i) w << "->";
                        w << "L" << term.heads[i].first << "H" << term.heads[i].second;
                    }
                }
                w << ": " << term.flat_map.norm() << "; ";
            }
            CheckOutcome out;
            out.statistic = 0.0;
            out.witness = w.str();
            return out;
        });
    } else {
        suite.record("circuits.path_norms", true, 0.0, 0.0,
                     "skipped: " + std::to_string(route_count) +
                         " routes exceed the enumeration limit of 4096",
                     0.0);
    }

    suite.run("circuits.rank_bounds", 0.0, Direction::ResidualBelow, [&](double) {
        CheckOutcome out;
        std::ostringstream w;
        double max_excess = 0.0;
        for (std::size_t l = 0; l < model.layers.size(); ++l)
            for (std::size_t h = 0; h < model.layers[l].size(); ++h) {
                const auto& head = model.layers[l][h].head;
                const Index qk = vect::numericalRank(circuits::qkCircuit(head));
                const Index ov = vect::numericalRank(circuits::ovCircuit(head));
                const Index d_head = circuits::dHead(head);
                w << "L" << l << "H" << h << ": qk_rank=" << qk << " ov_rank=" << ov
                  << " d_head=" << d_head << "; ";
                max_excess = std::max({max_excess, static_cast<double>(qk - d_head),
                                       static_cast<double>(ov - d_head)});
            }
        out.statistic = std::max(0.0, max_excess);
        out.witness = w.str();
        return out;
    });

    if (enumerable) {
        suite.run("circuits.path_sum", 1e-10, Direction::ResidualBelow, [&](double tol) {
            const auto r = circuits::checkPathSum(model, model.n, tol);
            return CheckOutcome{r.residual, "paths=" + std::to_string(r.path_count)};
        });
    } else {
        suite.record("circuits.path_sum", true, 0.0, 0.0,
                     "skipped: route count exceeds the enumeration limit; the monolithic "
                     "forward map is still exercised by circuits.para_coherence",
                     0.0);
    }

    // Composite parameter dims grow multiplicatively with depth; report the
    // coherence check as skipped when it cannot be materialized within the
    // element budget rather than failing a valid deep model.
    bool feasible = true;
    {
        const double nd = static_cast<double>(model.n) * static_cast<double>(model.d_model);
        double params = 1.0;
        for (const auto& layer : model.layers)
            params *= 1.0 + static_cast<double>(layer.size()) * nd * nd;
        feasible = params * nd * nd <= static_cast<double>(elementBudget());
    }
    if (feasible) {
        suite.run("circuits.para_coherence", 1e-10, Direction::ResidualBelow,
                  [&](double tol) {
                      const auto r = circuits::circuitsAsPara(model, model.n, tol);
                      return CheckOutcome{r.residual,
                                          "composite_param_dim=" +
                                              std::to_string(r.composite_param_dim)};
                  });
    } else {
        suite.record("circuits.para_coherence", true, 0.0, 0.0,
                     "skipped: composite parameter space exceeds the element budget", 0.0);
    }
    return report;
}

positional::Encoding buildEncoding(const EncodingSpec& spec) {
    if (spec.kind == "sinusoidal")
        return positional::makeSinusoidal(spec.d, spec.base_freq);
    if (spec.kind == "additive") {
        if (spec.base.size() == 0)
            throw ParseError("additive encoding requires --base");
        return positional::makeAdditive(spec.base);
    }
    if (spec.kind == "table") {
        auto rows = io::readEncodingTable(spec.table);
        return positional::makeExternal(std::move(rows));
    }
    throw ParseError("kind: expected sinusoidal, additive or table, got '" + spec.kind + "'");
}

Report runEncode(const RunConfig& config, const EncodingSpec& spec, Index N,
                 const std::string& table_out) {
    if (N < 1) throw ParseError("count: must be positive");
    const auto encoding = buildEncoding(spec);

    if (!table_out.empty()) {
        std::vector<Vector> rows;
        rows.reserve(static_cast<std::size_t>(N));
        for (Index m = 0; m < N; ++m) rows.push_back(positional::encode(encoding, m));
        io::writeEncodingTable(table_out, rows);
    }

    Report report;
    report.config = config;
    Suite suite(report, config);

    suite.run("encode.injectivity", 1e-8, Direction::StatisticAbove, [&](double tol) {
        const auto r = positional::checkInjectivity(encoding, N, tol);
        return CheckOutcome{r.min_distance,
                            "argmin " + pairWitness(r.argmin.first, r.argmin.second)};
    });

    if (std::holds_alternative<positional::SinusoidalEncoding>(encoding)) {
        suite.run("encode.nonadditivity_witness", 0.1, Direction::StatisticAbove,
                  [&](double) {
                      const auto w = positional::nonadditivityWitness(
                          encoding, std::min<Index>(N - 1, 64));
                      CheckOutcome out;
                      out.statistic = w ? w->defect : 0.0;
                      out.witness = w ? pairWitness(w->m, w->m2) : "none";
                      return out;
                  });
    } else {
        suite.run("encode.additive_action", 1e-12, Direction::ResidualBelow, [&](double tol) {
            const auto r =
                positional::checkActionLaws(encoding, std::min<Index>(N - 1, 64), tol);
            CheckOutcome out;
            out.statistic = std::max(r.origin_residual, r.max_defect);
            if (r.witness) out.witness = "first failure at " +
                                         pairWitness(r.witness->first, r.witness->second);
            return out;
        });
    }
    return report;
}

Report runFactor(const RunConfig& config, const EncodingSpec& source,
                 const std::string& target_table, Index N) {
    if (N < 1) throw ParseError("count: must be positive");
    const auto p = buildEncoding(source);
    const auto q = positional::makeExternal(io::readEncodingTable(target_table));

    Report report;
    report.config = config;
    Suite suite(report, config);
    suite.run("factor.residual", 1e-8, Direction::ResidualBelow, [&](double) {
        const auto result = positional::factorThrough(p, positional::Encoding{q}, N);
        CheckOutcome out;
        out.statistic = result.max_residual;
        std::ostringstream w;
        w << "rank=" << result.rank << " unique=" << (result.unique ? "true" : "false")
          << " f={\"rows\": " << result.f.rows() << ", \"cols\": " << result.f.cols()
          << ", \"data\": [";
        for (Index i = 0; i < result.f.size(); ++i) {
            if (i) w << ", ";
            w << io::formatDouble(result.f.data()[i]);
        }
        w << "]}";
        out.witness = w.str();
        return out;
    });
    return report;
}

} // namespace paravect::lawcheck
