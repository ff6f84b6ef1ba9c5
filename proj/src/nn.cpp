#include "sqlaug/nn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "sqlaug/common.hpp"

namespace sqlaug::nn {

// ----------------------------------------------------------- parameters

Parameter& ParameterSet::add(const std::string& name, int rows, int cols, double scale, Rng& rng) {
  if (index_.count(name)) throw ModelError("duplicate parameter " + name);
  auto p = std::make_unique<Parameter>();
  p->name = name;
  p->value = Matrix::Zero(rows, cols);
  if (scale > 0.0) {
    std::uniform_real_distribution<double> dist(-scale, scale);
    for (int c = 0; c < cols; ++c) {
      for (int r = 0; r < rows; ++r) p->value(r, c) = dist(rng);
    }
  }
  p->grad = Matrix::Zero(rows, cols);
  p->m = Matrix::Zero(rows, cols);
  p->v = Matrix::Zero(rows, cols);
  Parameter& ref = *p;
  index_[name] = p.get();
  params_.push_back(std::move(p));
  return ref;
}

Parameter& ParameterSet::get(const std::string& name) {
  auto it = index_.find(name);
  if (it == index_.end()) throw ModelError("unknown parameter " + name);
  return *it->second;
}

const Parameter& ParameterSet::get(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw ModelError("unknown parameter " + name);
  return *it->second;
}

void ParameterSet::zero_grad() {
  for (auto& p : params_) p->grad.setZero();
}

double ParameterSet::grad_norm() const {
  double sq = 0.0;
  for (const auto& p : params_) sq += p->grad.squaredNorm();
  return std::sqrt(sq);
}

std::size_t ParameterSet::num_values() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += static_cast<std::size_t>(p->value.size());
  return n;
}

nlohmann::json ParameterSet::to_json() const {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& p : params_) {
    std::vector<double> data(p->value.data(), p->value.data() + p->value.size());
    out.push_back({{"name", p->name},
                   {"rows", p->value.rows()},
                   {"cols", p->value.cols()},
                   {"data", std::move(data)}});
  }
  return out;
}

void ParameterSet::load_json(const nlohmann::json& j) {
  for (const auto& rec : j) {
    Parameter& p = get(rec.at("name").get<std::string>());
    const auto rows = rec.at("rows").get<Eigen::Index>();
    const auto cols = rec.at("cols").get<Eigen::Index>();
    if (rows != p.value.rows() || cols != p.value.cols()) {
      throw ModelError("shape mismatch for parameter " + p.name);
    }
    const auto data = rec.at("data").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(data.size()) != rows * cols) {
      throw ModelError("size mismatch for parameter " + p.name);
    }
    p.value = Eigen::Map<const Matrix>(data.data(), rows, cols);
  }
}

void Adam::step(ParameterSet& params) {
  ++t_;
  double scale = 1.0;
  if (cfg_.clip_norm > 0.0) {
    const double norm = params.grad_norm();
    if (norm > cfg_.clip_norm) scale = cfg_.clip_norm / norm;
  }
  double lr = cfg_.learning_rate;
  if (cfg_.warmup_steps > 0 && t_ <= cfg_.warmup_steps) {
    lr *= static_cast<double>(t_) / cfg_.warmup_steps;
  }
  const double bc1 = 1.0 - std::pow(cfg_.beta1, t_);
  const double bc2 = 1.0 - std::pow(cfg_.beta2, t_);
  for (const auto& p : params.all()) {
    const Matrix g = p->grad * scale;
    p->m = cfg_.beta1 * p->m + (1.0 - cfg_.beta1) * g;
    p->v = cfg_.beta2 * p->v + (1.0 - cfg_.beta2) * g.cwiseProduct(g);
    p->value.array() -= lr * (p->m.array() / bc1) /
                        ((p->v.array() / bc2).sqrt() + cfg_.epsilon);
  }
}

// ---------------------------------------------------------------- graph

Graph::Var Graph::push(Node n) {
  nodes_.push_back(std::move(n));
  return static_cast<Var>(nodes_.size() - 1);
}

Graph::Var Graph::param(Parameter& p) {
  auto it = param_cache_.find(&p);
  if (it != param_cache_.end()) return it->second;
  Node n;
  n.op = Op::kParam;
  n.param = &p;
  n.needs_grad = true;
  n.value = p.value;
  const Var v = push(std::move(n));
  param_cache_[&p] = v;
  return v;
}

Graph::Var Graph::column(Parameter& p, int col) {
  Node n;
  n.op = Op::kColumn;
  n.param = &p;
  n.index = col;
  n.needs_grad = true;
  n.value = p.value.col(col);
  return push(std::move(n));
}

Graph::Var Graph::constant(Matrix m) {
  Node n;
  n.op = Op::kConst;
  n.value = std::move(m);
  return push(std::move(n));
}

Graph::Var Graph::matmul(Var a, Var b) {
  Node n;
  n.op = Op::kMatMul;
  n.a = a;
  n.b = b;
  n.needs_grad = at(a).needs_grad || at(b).needs_grad;
  n.value = value(a) * value(b);
  return push(std::move(n));
}

Graph::Var Graph::matmul_tn(Var a, Var b) {
  Node n;
  n.op = Op::kMatMulTN;
  n.a = a;
  n.b = b;
  n.needs_grad = at(a).needs_grad || at(b).needs_grad;
  n.value = value(a).transpose() * value(b);
  return push(std::move(n));
}

Graph::Var Graph::add(Var a, Var b) {
  Node n;
  n.op = Op::kAdd;
  n.a = a;
  n.b = b;
  n.needs_grad = at(a).needs_grad || at(b).needs_grad;
  n.value = value(a) + value(b);
  return push(std::move(n));
}

Graph::Var Graph::sub(Var a, Var b) {
  Node n;
  n.op = Op::kSub;
  n.a = a;
  n.b = b;
  n.needs_grad = at(a).needs_grad || at(b).needs_grad;
  n.value = value(a) - value(b);
  return push(std::move(n));
}

Graph::Var Graph::mul(Var a, Var b) {
  Node n;
  n.op = Op::kMul;
  n.a = a;
  n.b = b;
  n.needs_grad = at(a).needs_grad || at(b).needs_grad;
  n.value = value(a).cwiseProduct(value(b));
  return push(std::move(n));
}

Graph::Var Graph::scale(Var a, double s) {
  Node n;
  n.op = Op::kScale;
  n.a = a;
  n.s = s;
  n.needs_grad = at(a).needs_grad;
  n.value = value(a) * s;
  return push(std::move(n));
}

Graph::Var Graph::tanh(Var a) {
  Node n;
  n.op = Op::kTanh;
  n.a = a;
  n.needs_grad = at(a).needs_grad;
  n.value = value(a).array().tanh().matrix();
  return push(std::move(n));
}

Graph::Var Graph::sigmoid(Var a) {
  Node n;
  n.op = Op::kSigmoid;
  n.a = a;
  n.needs_grad = at(a).needs_grad;
  n.value = (1.0 / (1.0 + (-value(a).array()).exp())).matrix();
  return push(std::move(n));
}

Graph::Var Graph::rows(Var a, int start, int count) {
  Node n;
  n.op = Op::kRows;
  n.a = a;
  n.index = start;
  n.needs_grad = at(a).needs_grad;
  n.value = value(a).middleRows(start, count);
  return push(std::move(n));
}

Graph::Var Graph::vcat(const std::vector<Var>& parts) {
  Node n;
  n.op = Op::kVcat;
  n.args = parts;
  Eigen::Index total = 0;
  const Eigen::Index cols = value(parts.front()).cols();
  for (Var p : parts) {
    total += value(p).rows();
    n.needs_grad = n.needs_grad || at(p).needs_grad;
  }
  n.value.resize(total, cols);
  Eigen::Index r = 0;
  for (Var p : parts) {
    n.value.middleRows(r, value(p).rows()) = value(p);
    r += value(p).rows();
  }
  return push(std::move(n));
}

Graph::Var Graph::hcat(const std::vector<Var>& parts) {
  Node n;
  n.op = Op::kHcat;
  n.args = parts;
  Eigen::Index total = 0;
  const Eigen::Index rows_ = value(parts.front()).rows();
  for (Var p : parts) {
    total += value(p).cols();
    n.needs_grad = n.needs_grad || at(p).needs_grad;
  }
  n.value.resize(rows_, total);
  Eigen::Index c = 0;
  for (Var p : parts) {
    n.value.middleCols(c, value(p).cols()) = value(p);
    c += value(p).cols();
  }
  return push(std::move(n));
}

Graph::Var Graph::mean(const std::vector<Var>& parts) {
  Node n;
  n.op = Op::kMean;
  n.args = parts;
  n.value = Matrix::Zero(value(parts.front()).rows(), value(parts.front()).cols());
  for (Var p : parts) {
    n.value += value(p);
    n.needs_grad = n.needs_grad || at(p).needs_grad;
  }
  n.value /= static_cast<double>(parts.size());
  return push(std::move(n));
}

Graph::Var Graph::softmax(Var a) {
  Node n;
  n.op = Op::kSoftmax;
  n.a = a;
  n.needs_grad = at(a).needs_grad;
  const Matrix& x = value(a);
  const double mx = x.maxCoeff();
  Matrix e = (x.array() - mx).exp().matrix();
  n.value = e / e.sum();
  return push(std::move(n));
}

Eigen::VectorXd masked_log_softmax(const Eigen::VectorXd& logits, const std::vector<char>& allowed) {
  const double neg_inf = -std::numeric_limits<double>::infinity();
  Eigen::VectorXd out(logits.size());
  double mx = neg_inf;
  for (Eigen::Index i = 0; i < logits.size(); ++i) {
    if (allowed.empty() || allowed[static_cast<std::size_t>(i)]) mx = std::max(mx, logits(i));
  }
  double z = 0.0;
  for (Eigen::Index i = 0; i < logits.size(); ++i) {
    if (allowed.empty() || allowed[static_cast<std::size_t>(i)]) z += std::exp(logits(i) - mx);
  }
  const double log_z = mx + std::log(z);
  for (Eigen::Index i = 0; i < logits.size(); ++i) {
    out(i) = (allowed.empty() || allowed[static_cast<std::size_t>(i)]) ? logits(i) - log_z : neg_inf;
  }
  return out;
}

Graph::Var Graph::nll(Var logits, const std::vector<int>& targets, const std::vector<char>& allowed) {
  if (targets.empty()) throw ModelError("nll with no target");
  Node n;
  n.op = Op::kNll;
  n.a = logits;
  n.needs_grad = at(logits).needs_grad;
  const Eigen::VectorXd logp = masked_log_softmax(value(logits).col(0), allowed);
  double mx = -std::numeric_limits<double>::infinity();
  for (int t : targets) mx = std::max(mx, logp(t));
  if (!std::isfinite(mx)) throw ModelError("nll target is masked out");
  double s = 0.0;
  for (int t : targets) s += std::exp(logp(t) - mx);
  const double log_target = mx + std::log(s);
  // aux column 0: allowed probabilities p; column 1: target posterior q.
  n.aux = Matrix::Zero(logp.size(), 2);
  for (Eigen::Index i = 0; i < logp.size(); ++i) {
    n.aux(i, 0) = std::isfinite(logp(i)) ? std::exp(logp(i)) : 0.0;
  }
  for (int t : targets) n.aux(t, 1) = std::exp(logp(t) - log_target);
  n.value = Matrix::Constant(1, 1, -log_target);
  return push(std::move(n));
}

void Graph::accumulate(Var v, const Matrix& g) {
  Node& n = at(v);
  if (!n.needs_grad) return;
  if (n.grad.size() == 0) {
    n.grad = g;
  } else {
    n.grad += g;
  }
}

void Graph::backward(Var loss, double seed) {
  accumulate(loss, Matrix::Constant(1, 1, seed));
  for (Var i = loss; i >= 0; --i) {
    Node& n = at(i);
    if (!n.needs_grad || n.grad.size() == 0) continue;
    const Matrix g = std::move(n.grad);
    n.grad = Matrix();
    switch (n.op) {
      case Op::kParam:
        n.param->grad += g;
        break;
      case Op::kColumn:
        n.param->grad.col(n.index) += g;
        break;
      case Op::kConst:
        break;
      case Op::kMatMul:
        if (at(n.a).needs_grad) accumulate(n.a, g * value(n.b).transpose());
        if (at(n.b).needs_grad) accumulate(n.b, value(n.a).transpose() * g);
        break;
      case Op::kMatMulTN:
        if (at(n.a).needs_grad) accumulate(n.a, value(n.b) * g.transpose());
        if (at(n.b).needs_grad) accumulate(n.b, value(n.a) * g);
        break;
      case Op::kAdd:
        accumulate(n.a, g);
        accumulate(n.b, g);
        break;
      case Op::kSub:
        accumulate(n.a, g);
        accumulate(n.b, -g);
        break;
      case Op::kMul:
        if (at(n.a).needs_grad) accumulate(n.a, g.cwiseProduct(value(n.b)));
        if (at(n.b).needs_grad) accumulate(n.b, g.cwiseProduct(value(n.a)));
        break;
      case Op::kScale:
        accumulate(n.a, g * n.s);
        break;
      case Op::kTanh:
        accumulate(n.a, g.cwiseProduct((1.0 - n.value.array().square()).matrix()));
        break;
      case Op::kSigmoid:
        accumulate(n.a, g.cwiseProduct((n.value.array() * (1.0 - n.value.array())).matrix()));
        break;
      case Op::kRows: {
        Matrix full = Matrix::Zero(value(n.a).rows(), value(n.a).cols());
        full.middleRows(n.index, g.rows()) = g;
        accumulate(n.a, full);
        break;
      }
      case Op::kVcat: {
        Eigen::Index r = 0;
        for (Var p : n.args) {
          const Eigen::Index h = value(p).rows();
          accumulate(p, g.middleRows(r, h));
          r += h;
        }
        break;
      }
      case Op::kHcat: {
        Eigen::Index c = 0;
        for (Var p : n.args) {
          const Eigen::Index w = value(p).cols();
          accumulate(p, g.middleCols(c, w));
          c += w;
        }
        break;
      }
      case Op::kMean: {
        const Matrix share = g / static_cast<double>(n.args.size());
        for (Var p : n.args) accumulate(p, share);
        break;
      }
      case Op::kSoftmax: {
        const double dot = (n.value.array() * g.array()).sum();
        accumulate(n.a, (n.value.array() * (g.array() - dot)).matrix());
        break;
      }
      case Op::kNll:
        accumulate(n.a, (n.aux.col(0) - n.aux.col(1)) * g(0, 0));
        break;
    }
  }
}

// --------------------------------------------------------------- layers

Linear Linear::create(ParameterSet& ps, const std::string& name, int in, int out, Rng& rng) {
  Linear l;
  l.weight = &ps.add(name + ".w", out, in, 1.0 / std::sqrt(static_cast<double>(in)), rng);
  l.bias = &ps.add(name + ".b", out, 1, 0.0, rng);
  return l;
}

Graph::Var Linear::operator()(Graph& g, Graph::Var x) const {
  return g.add(g.matmul(g.param(*weight), x), g.param(*bias));
}

Lstm Lstm::create(ParameterSet& ps, const std::string& name, int in, int hidden, Rng& rng) {
  Lstm l;
  l.input = in;
  l.hidden = hidden;
  l.weight = &ps.add(name + ".w", 4 * hidden, in + hidden,
                     1.0 / std::sqrt(static_cast<double>(in + hidden)), rng);
  l.bias = &ps.add(name + ".b", 4 * hidden, 1, 0.0, rng);
  l.bias->value.middleRows(hidden, hidden).setOnes();  // forget gate
  return l;
}

Lstm::State Lstm::zero_state(Graph& g) const {
  const Graph::Var z = g.constant(Matrix::Zero(hidden, 1));
  return {z, z};
}

Lstm::State Lstm::step(Graph& g, Graph::Var x, const State& s) const {
  const Graph::Var gates =
      g.add(g.matmul(g.param(*weight), g.vcat({x, s.h})), g.param(*bias));
  const Graph::Var i = g.sigmoid(g.rows(gates, 0, hidden));
  const Graph::Var f = g.sigmoid(g.rows(gates, hidden, hidden));
  const Graph::Var o = g.sigmoid(g.rows(gates, 2 * hidden, hidden));
  const Graph::Var u = g.tanh(g.rows(gates, 3 * hidden, hidden));
  const Graph::Var c = g.add(g.mul(f, s.c), g.mul(i, u));
  const Graph::Var h = g.mul(o, g.tanh(c));
  return {h, c};
}

BiLstmOutput run_bilstm(Graph& g, const Lstm& fwd, const Lstm& bwd,
                        const std::vector<Graph::Var>& inputs) {
  const std::size_t n = inputs.size();
  std::vector<Graph::Var> f(n), b(n);
  Lstm::State s = fwd.zero_state(g);
  for (std::size_t i = 0; i < n; ++i) {
    s = fwd.step(g, inputs[i], s);
    f[i] = s.h;
  }
  Lstm::State r = bwd.zero_state(g);
  for (std::size_t i = n; i-- > 0;) {
    r = bwd.step(g, inputs[i], r);
    b[i] = r.h;
  }
  BiLstmOutput out;
  out.states.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.states.push_back(g.vcat({f[i], b[i]}));
  out.last_forward = n ? f[n - 1] : fwd.zero_state(g).h;
  out.first_backward = n ? b[0] : bwd.zero_state(g).h;
  return out;
}

// ------------------------------------------------------------- training

std::vector<double> train_weighted(
    ParameterSet& params, const std::vector<double>& weights, const TrainLoopConfig& cfg,
    const std::function<Graph::Var(Graph&, std::size_t)>& loss_fn) {
  const std::size_t n = weights.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(cfg.seed);
  Adam adam(cfg.adam);
  std::vector<double> history;
  const std::size_t batch = static_cast<std::size_t>(std::max(1, cfg.batch_size));
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    if (cfg.shuffle) {
      for (std::size_t i = n; i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng() % i);
        std::swap(order[i - 1], order[j]);
      }
    }
    double epoch_loss = 0.0;
    double epoch_weight = 0.0;
    for (std::size_t start = 0; start < n; start += batch) {
      const std::size_t end = std::min(n, start + batch);
      std::size_t count = 0;
      for (std::size_t k = start; k < end; ++k) count += weights[order[k]] > 0.0 ? 1 : 0;
      if (count == 0) continue;
      params.zero_grad();
      for (std::size_t k = start; k < end; ++k) {
        const double w = weights[order[k]];
        if (w <= 0.0) continue;
        Graph g;
        const Graph::Var loss = loss_fn(g, order[k]);
        epoch_loss += w * g.scalar(loss);
        epoch_weight += w;
        g.backward(loss, w / static_cast<double>(count));
      }
      adam.step(params);
    }
    history.push_back(epoch_weight > 0.0 ? epoch_loss / epoch_weight : 0.0);
  }
  return history;
}

double evaluate_weighted(const std::vector<double>& weights,
                         const std::function<Graph::Var(Graph&, std::size_t)>& loss_fn) {
  double total = 0.0;
  double wsum = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    Graph g;
    total += weights[i] * g.scalar(loss_fn(g, i));
    wsum += weights[i];
  }
  return wsum > 0.0 ? total / wsum : 0.0;
}

}  // namespace sqlaug::nn
