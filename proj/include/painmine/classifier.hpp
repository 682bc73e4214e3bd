#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace painmine {

enum class Optimizer { Sgd, AdaptiveMoment };

struct TrainConfig {
    double learning_rate = 1e-2;
    int epochs = 10;
    int batch_size = 64;
    Optimizer optimizer = Optimizer::AdaptiveMoment;
    uint64_t seed = 0;
    int embed_dim = 64;
    // 0 keeps the linear softmax head; >0 inserts one tanh hidden layer.
    int hidden_dim = 0;
};

// Token-embedding classifier: mean pooling over token embeddings feeding a
// softmax head, optionally through one tanh hidden layer. Small enough that
// every gradient used for attribution has a closed form.
struct TextClassifier {
    int vocab_size = 0;
    int embed_dim = 0;
    int num_classes = 0;
    int hidden_dim = 0;
    uint64_t seed = 0;
    std::string vocab_hash;

    Eigen::MatrixXd embeddings;     // V x embed_dim
    Eigen::MatrixXd hidden_weights; // embed_dim x hidden_dim
    Eigen::VectorXd hidden_bias;    // hidden_dim
    Eigen::MatrixXd output_weights; // (embed_dim or hidden_dim) x K
    Eigen::VectorXd output_bias;    // K
};

// Embeddings from normal(0, 0.1), output weights and biases zero.
TextClassifier init_classifier(int vocab_size, int num_classes, const TrainConfig& config);

struct EpochStats {
    double loss = 0.0;
    double accuracy = 0.0;
    std::vector<double> class_recall;
};

// Owns the model plus optimizer state so iterative loops can warm-start
// additional epochs without resetting moments.
class Trainer {
public:
    Trainer(TextClassifier model, TrainConfig config);
    ~Trainer();
    Trainer(Trainer&&) noexcept;
    Trainer& operator=(Trainer&&) noexcept;

    // Cross-entropy minimization over minibatches; docs are vocabulary
    // indices. Stats are measured after each epoch's updates.
    std::vector<EpochStats> run(const std::vector<std::vector<int>>& docs,
                                const std::vector<int>& labels, int epochs);

    const TextClassifier& model() const;
    TextClassifier& model();

private:
    struct State;
    std::unique_ptr<State> state_;
};

TextClassifier train(const std::vector<std::vector<int>>& docs, const std::vector<int>& labels,
                     int num_classes, int vocab_size, const TrainConfig& config,
                     std::vector<EpochStats>* history = nullptr);

// Softmax probabilities; throws UnattributableDocument on an empty doc.
std::vector<double> predict_proba(const TextClassifier& model, const std::vector<int>& doc);
int predict_class(const TextClassifier& model, const std::vector<int>& doc);

enum class AttributionTask { Sentiment, Topic };
enum class AttributionMethod { GradInput, IntegratedGradients };

std::string attribution_method_name(AttributionMethod method);

struct AttributionVector {
    std::vector<double> scores; // nonnegative, sum to 1 (or all zero for empty docs)
    AttributionTask task = AttributionTask::Sentiment;
    AttributionMethod method = AttributionMethod::GradInput;
    // True when every gradient-input product vanished and the scores fell
    // back to uniform.
    bool uniform_fallback = false;
};

// a_i = |grad_{e_i} L . e_i| / sum_j |...|, L = cross-entropy against
// target_class.
AttributionVector grad_input_attribution(const TextClassifier& model, const std::vector<int>& doc,
                                         int target_class,
                                         AttributionTask task = AttributionTask::Sentiment);

// Midpoint-rule path integral from the zero-embedding baseline of the
// target-class logit; folded by absolute value and normalized like the
// gradient-input scores.
AttributionVector integrated_gradients(const TextClassifier& model, const std::vector<int>& doc,
                                       int target_class,
                                       AttributionTask task = AttributionTask::Sentiment,
                                       int steps = 64);

// Signed per-token path-integral terms, before folding; their sum
// approximates class_score(x) - class_score(baseline).
std::vector<double> integrated_gradients_raw(const TextClassifier& model,
                                             const std::vector<int>& doc, int target_class,
                                             int steps);

// Target-class logit.
double class_score(const TextClassifier& model, const std::vector<int>& doc, int target_class);

// Positional-embedding entry points, used by the attribution code and by
// finite-difference oracles: the document is a free list of embedding
// vectors rather than vocabulary rows.
std::vector<Eigen::VectorXd> doc_embeddings(const TextClassifier& model,
                                            const std::vector<int>& doc);
double loss_from_embeddings(const TextClassifier& model,
                            const std::vector<Eigen::VectorXd>& embeddings, int target_class);
double score_from_embeddings(const TextClassifier& model,
                             const std::vector<Eigen::VectorXd>& embeddings, int target_class);
std::vector<Eigen::VectorXd> loss_grad_embeddings(const TextClassifier& model,
                                                  const std::vector<Eigen::VectorXd>& embeddings,
                                                  int target_class);
std::vector<Eigen::VectorXd> score_grad_embeddings(const TextClassifier& model,
                                                   const std::vector<Eigen::VectorXd>& embeddings,
                                                   int target_class);

// Versioned JSON with parameters as decimal strings that round-trip
// exactly; vocab hash travels with the model for compatibility checks.
std::string save_classifier(const TextClassifier& model);
TextClassifier load_classifier(const std::string& serialized);

} // namespace painmine
