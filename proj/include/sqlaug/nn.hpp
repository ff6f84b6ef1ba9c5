#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "json.hpp"

/// Minimal reverse-mode automatic differentiation over dense Eigen matrices,
/// plus the layers and optimizer the models are built from. Everything is
/// single-threaded and deterministic for a given seed.
namespace sqlaug::nn {

using Matrix = Eigen::MatrixXd;
using Rng = std::mt19937_64;

struct Parameter {
  std::string name;
  Matrix value;
  Matrix grad;
  Matrix m;  // Adam first moment
  Matrix v;  // Adam second moment
};

class ParameterSet {
 public:
  ParameterSet() = default;
  ParameterSet(const ParameterSet&) = delete;
  ParameterSet& operator=(const ParameterSet&) = delete;
  ParameterSet(ParameterSet&&) = default;
  ParameterSet& operator=(ParameterSet&&) = default;

  /// Uniform(-scale, scale) initialization; scale 0 gives zeros.
  Parameter& add(const std::string& name, int rows, int cols, double scale, Rng& rng);
  Parameter& get(const std::string& name);
  const Parameter& get(const std::string& name) const;
  bool contains(const std::string& name) const { return index_.count(name) > 0; }

  const std::vector<std::unique_ptr<Parameter>>& all() const { return params_; }
  void zero_grad();
  double grad_norm() const;
  std::size_t num_values() const;

  nlohmann::json to_json() const;
  /// Overwrites values from a checkpoint; names and shapes must match.
  void load_json(const nlohmann::json& j);

 private:
  std::vector<std::unique_ptr<Parameter>> params_;
  std::map<std::string, Parameter*> index_;
};

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double clip_norm = 1.0;  // global gradient-norm threshold; <= 0 disables
  int warmup_steps = 0;    // linear warm-up of the learning rate
};

class Adam {
 public:
  explicit Adam(AdamConfig cfg) : cfg_(cfg) {}
  void step(ParameterSet& params);
  int steps() const { return t_; }

 private:
  AdamConfig cfg_;
  int t_ = 0;
};

/// A tape of operations. Nodes are appended in evaluation order, so a reverse
/// sweep is a valid topological order for backpropagation.
class Graph {
 public:
  using Var = int;

  Var param(Parameter& p);
  Var column(Parameter& p, int col);
  Var constant(Matrix m);

  Var matmul(Var a, Var b);
  Var matmul_tn(Var a, Var b);  // a^T * b
  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var mul(Var a, Var b);  // elementwise
  Var scale(Var a, double s);
  Var tanh(Var a);
  Var sigmoid(Var a);
  Var rows(Var a, int start, int count);
  Var vcat(const std::vector<Var>& parts);
  Var hcat(const std::vector<Var>& parts);
  Var mean(const std::vector<Var>& parts);
  Var softmax(Var a);

  /// -log of the total softmax probability of `targets` among the entries
  /// allowed by `allowed` (all entries when empty). Returns a 1x1 node.
  Var nll(Var logits, const std::vector<int>& targets, const std::vector<char>& allowed = {});

  const Matrix& value(Var v) const { return nodes_[static_cast<std::size_t>(v)].value; }
  double scalar(Var v) const { return value(v)(0, 0); }
  std::size_t size() const { return nodes_.size(); }

  /// Accumulates d(seed * loss)/d(param) into every reachable Parameter::grad.
  void backward(Var loss, double seed = 1.0);

 private:
  enum class Op {
    kParam, kColumn, kConst, kMatMul, kMatMulTN, kAdd, kSub, kMul, kScale, kTanh,
    kSigmoid, kRows, kVcat, kHcat, kMean, kSoftmax, kNll
  };

  struct Node {
    Op op = Op::kConst;
    Var a = -1;
    Var b = -1;
    std::vector<Var> args;
    Parameter* param = nullptr;
    int index = 0;
    double s = 0.0;
    bool needs_grad = false;
    Matrix value;
    Matrix grad;
    Matrix aux;  // softmax/nll bookkeeping
  };

  Var push(Node n);
  Node& at(Var v) { return nodes_[static_cast<std::size_t>(v)]; }
  void accumulate(Var v, const Matrix& g);

  std::vector<Node> nodes_;
  std::unordered_map<const Parameter*, Var> param_cache_;
};

struct Linear {
  Parameter* weight = nullptr;
  Parameter* bias = nullptr;

  static Linear create(ParameterSet& ps, const std::string& name, int in, int out, Rng& rng);
  Graph::Var operator()(Graph& g, Graph::Var x) const;
};

struct Lstm {
  Parameter* weight = nullptr;  // 4H x (in + H)
  Parameter* bias = nullptr;    // 4H x 1
  int input = 0;
  int hidden = 0;

  static Lstm create(ParameterSet& ps, const std::string& name, int in, int hidden, Rng& rng);

  struct State {
    Graph::Var h;
    Graph::Var c;
  };
  State zero_state(Graph& g) const;
  State step(Graph& g, Graph::Var x, const State& s) const;
};

/// Runs a bidirectional LSTM and returns per-position [forward; backward]
/// states plus the final forward and first backward hidden states.
struct BiLstmOutput {
  std::vector<Graph::Var> states;
  Graph::Var last_forward;
  Graph::Var first_backward;
};
BiLstmOutput run_bilstm(Graph& g, const Lstm& fwd, const Lstm& bwd,
                        const std::vector<Graph::Var>& inputs);

struct TrainLoopConfig {
  int epochs = 10;
  int batch_size = 8;
  std::uint64_t seed = 0;
  AdamConfig adam;
  bool shuffle = true;
};

/// Weighted minibatch training. Each batch minimizes sum_i w_i * loss_i / n,
/// n being the number of examples with w_i > 0, so a weight keeps its absolute
/// size (a batch of weight-0.1 examples takes a tenth of the gradient).
/// Batches without positive weights are skipped. Returns the weighted mean
/// loss of each epoch (measured during the epoch).
std::vector<double> train_weighted(
    ParameterSet& params, const std::vector<double>& weights, const TrainLoopConfig& cfg,
    const std::function<Graph::Var(Graph&, std::size_t)>& loss_fn);

/// Weighted mean loss over a dataset without updating anything.
double evaluate_weighted(const std::vector<double>& weights,
                         const std::function<Graph::Var(Graph&, std::size_t)>& loss_fn);

/// Log-softmax restricted to `allowed` entries (others get -inf).
Eigen::VectorXd masked_log_softmax(const Eigen::VectorXd& logits,
                                   const std::vector<char>& allowed = {});

}  // namespace sqlaug::nn
