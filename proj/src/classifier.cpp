#include "painmine/classifier.hpp"

#include "painmine/errors.hpp"
#include "painmine/util.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <random>

namespace painmine {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

VectorXd mean_pool(const std::vector<VectorXd>& embeddings) {
    VectorXd pooled = VectorXd::Zero(embeddings[0].size());
    for (const auto& e : embeddings) pooled += e;
    return pooled / static_cast<double>(embeddings.size());
}

VectorXd logits_from_pooled(const TextClassifier& model, const VectorXd& pooled,
                            VectorXd* hidden_out = nullptr) {
    if (model.hidden_dim > 0) {
        VectorXd activation =
            (model.hidden_weights.transpose() * pooled + model.hidden_bias).array().tanh();
        if (hidden_out) *hidden_out = activation;
        return model.output_weights.transpose() * activation + model.output_bias;
    }
    return model.output_weights.transpose() * pooled + model.output_bias;
}

VectorXd softmax(const VectorXd& logits) {
    VectorXd shifted = logits.array() - logits.maxCoeff();
    VectorXd exps = shifted.array().exp();
    return exps / exps.sum();
}

double log_sum_exp(const VectorXd& logits) {
    const double m = logits.maxCoeff();
    return m + std::log((logits.array() - m).exp().sum());
}

void check_target(const TextClassifier& model, int target_class) {
    if (target_class < 0 || target_class >= model.num_classes) {
        throw DataError("target class " + std::to_string(target_class) + " out of range [0, " +
                        std::to_string(model.num_classes) + ")");
    }
}

void check_nonempty(const std::vector<int>& doc) {
    if (doc.empty()) {
        throw UnattributableDocument("document has no in-vocabulary tokens");
    }
}

// Gradient of the pooled representation for either the cross-entropy loss
// (dz = p - onehot) or the raw target logit (dz = onehot).
VectorXd pooled_gradient(const TextClassifier& model, const VectorXd& pooled,
                         const VectorXd& dz) {
    if (model.hidden_dim > 0) {
        VectorXd activation =
            (model.hidden_weights.transpose() * pooled + model.hidden_bias).array().tanh();
        VectorXd du = model.output_weights * dz;
        VectorXd da = (1.0 - activation.array().square()) * du.array();
        return model.hidden_weights * da;
    }
    return model.output_weights * dz;
}

std::vector<VectorXd> per_position(const VectorXd& pooled_grad, size_t n) {
    std::vector<VectorXd> grads(n, pooled_grad / static_cast<double>(n));
    return grads;
}

AttributionVector fold_and_normalize(std::vector<double> products, AttributionTask task,
                                     AttributionMethod method) {
    AttributionVector attribution;
    attribution.task = task;
    attribution.method = method;
    double total = 0.0;
    for (double& p : products) {
        p = std::abs(p);
        total += p;
    }
    if (total == 0.0) {
        attribution.uniform_fallback = true;
        attribution.scores.assign(products.size(), 1.0 / static_cast<double>(products.size()));
        return attribution;
    }
    for (double& p : products) p /= total;
    attribution.scores = std::move(products);
    return attribution;
}

struct AdamMoments {
    MatrixXd m;
    MatrixXd v;
    void init(Eigen::Index rows, Eigen::Index cols) {
        m = MatrixXd::Zero(rows, cols);
        v = MatrixXd::Zero(rows, cols);
    }
};

} // namespace

TextClassifier init_classifier(int vocab_size, int num_classes, const TrainConfig& config) {
    if (vocab_size < 1) throw ConfigError("init_classifier: vocab_size must be positive");
    if (num_classes < 2) throw ConfigError("init_classifier: need at least 2 classes");
    TextClassifier model;
    model.vocab_size = vocab_size;
    model.embed_dim = config.embed_dim;
    model.num_classes = num_classes;
    model.hidden_dim = config.hidden_dim;
    model.seed = config.seed;
    std::mt19937_64 rng(config.seed);
    std::normal_distribution<double> dist(0.0, 0.1);
    model.embeddings = MatrixXd(vocab_size, config.embed_dim);
    for (int v = 0; v < vocab_size; ++v) {
        for (int j = 0; j < config.embed_dim; ++j) model.embeddings(v, j) = dist(rng);
    }
    const int head_in = config.hidden_dim > 0 ? config.hidden_dim : config.embed_dim;
    if (config.hidden_dim > 0) {
        model.hidden_weights = MatrixXd(config.embed_dim, config.hidden_dim);
        for (int i = 0; i < config.embed_dim; ++i) {
            for (int j = 0; j < config.hidden_dim; ++j) model.hidden_weights(i, j) = dist(rng);
        }
        model.hidden_bias = VectorXd::Zero(config.hidden_dim);
    }
    model.output_weights = MatrixXd::Zero(head_in, num_classes);
    model.output_bias = VectorXd::Zero(num_classes);
    return model;
}

struct Trainer::State {
    TextClassifier model;
    TrainConfig config;
    std::mt19937_64 rng;
    long long step = 0;
    AdamMoments adam_embeddings;
    AdamMoments adam_hidden_w;
    AdamMoments adam_hidden_b;
    AdamMoments adam_output_w;
    AdamMoments adam_output_b;
};

Trainer::Trainer(TextClassifier model, TrainConfig config) : state_(std::make_unique<State>()) {
    state_->model = std::move(model);
    state_->config = config;
    state_->rng.seed(config.seed ^ 0x9e3779b97f4a7c15ULL);
    const auto& m = state_->model;
    state_->adam_embeddings.init(m.embeddings.rows(), m.embeddings.cols());
    if (m.hidden_dim > 0) {
        state_->adam_hidden_w.init(m.hidden_weights.rows(), m.hidden_weights.cols());
        state_->adam_hidden_b.init(m.hidden_bias.size(), 1);
    }
    state_->adam_output_w.init(m.output_weights.rows(), m.output_weights.cols());
    state_->adam_output_b.init(m.output_bias.size(), 1);
}

Trainer::~Trainer() = default;
Trainer::Trainer(Trainer&&) noexcept = default;
Trainer& Trainer::operator=(Trainer&&) noexcept = default;

const TextClassifier& Trainer::model() const { return state_->model; }
TextClassifier& Trainer::model() { return state_->model; }

namespace {

void apply_update(MatrixXd& param, const MatrixXd& grad, AdamMoments& moments,
                  const TrainConfig& config, long long step) {
    if (config.optimizer == Optimizer::Sgd) {
        param -= config.learning_rate * grad;
        return;
    }
    constexpr double beta1 = 0.9;
    constexpr double beta2 = 0.999;
    constexpr double eps = 1e-8;
    moments.m = beta1 * moments.m + (1.0 - beta1) * grad;
    moments.v = beta2 * moments.v.array().matrix() + (1.0 - beta2) * grad.array().square().matrix();
    const double correction1 = 1.0 - std::pow(beta1, static_cast<double>(step));
    const double correction2 = 1.0 - std::pow(beta2, static_cast<double>(step));
    MatrixXd m_hat = moments.m / correction1;
    MatrixXd v_hat = moments.v / correction2;
    param.array() -= config.learning_rate * m_hat.array() / (v_hat.array().sqrt() + eps);
}

} // namespace

std::vector<EpochStats> Trainer::run(const std::vector<std::vector<int>>& docs,
                                     const std::vector<int>& labels, int epochs) {
    auto& st = *state_;
    auto& model = st.model;
    if (docs.empty()) throw DataError("train: empty training set");
    if (docs.size() != labels.size()) throw DataError("train: docs and labels are not aligned");
    for (size_t i = 0; i < docs.size(); ++i) {
        if (labels[i] < 0 || labels[i] >= model.num_classes) {
            throw DataError("train: label " + std::to_string(labels[i]) + " out of range [0, " +
                            std::to_string(model.num_classes) + ") at doc " + std::to_string(i));
        }
        if (docs[i].empty()) {
            throw DataError("train: doc " + std::to_string(i) + " has no in-vocabulary tokens");
        }
    }

    std::vector<EpochStats> history;
    std::vector<size_t> order(docs.size());
    std::iota(order.begin(), order.end(), 0);

    const int batch_size = std::max(1, st.config.batch_size);
    for (int epoch = 0; epoch < epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), st.rng);
        for (size_t start = 0; start < order.size(); start += batch_size) {
            const size_t end = std::min(order.size(), start + batch_size);
            const double scale = 1.0 / static_cast<double>(end - start);

            MatrixXd grad_embeddings = MatrixXd::Zero(model.embeddings.rows(), model.embeddings.cols());
            MatrixXd grad_hidden_w, grad_output_w;
            VectorXd grad_hidden_b, grad_output_b;
            if (model.hidden_dim > 0) {
                grad_hidden_w = MatrixXd::Zero(model.hidden_weights.rows(), model.hidden_weights.cols());
                grad_hidden_b = VectorXd::Zero(model.hidden_bias.size());
            }
            grad_output_w = MatrixXd::Zero(model.output_weights.rows(), model.output_weights.cols());
            grad_output_b = VectorXd::Zero(model.output_bias.size());

            for (size_t k = start; k < end; ++k) {
                const auto& doc = docs[order[k]];
                const int label = labels[order[k]];
                VectorXd pooled = VectorXd::Zero(model.embed_dim);
                for (int token : doc) pooled += model.embeddings.row(token);
                pooled /= static_cast<double>(doc.size());

                VectorXd hidden;
                VectorXd logits = logits_from_pooled(model, pooled, &hidden);
                VectorXd probs = softmax(logits);
                VectorXd dz = probs;
                dz(label) -= 1.0;

                VectorXd dh;
                if (model.hidden_dim > 0) {
                    VectorXd du = model.output_weights * dz;
                    VectorXd da = ((1.0 - hidden.array().square()) * du.array()).matrix();
                    grad_output_w += scale * (hidden * dz.transpose());
                    grad_output_b += scale * dz;
                    grad_hidden_w += scale * (pooled * da.transpose());
                    grad_hidden_b += scale * da;
                    dh = model.hidden_weights * da;
                } else {
                    grad_output_w += scale * (pooled * dz.transpose());
                    grad_output_b += scale * dz;
                    dh = model.output_weights * dz;
                }
                const double token_scale = scale / static_cast<double>(doc.size());
                for (int token : doc) {
                    grad_embeddings.row(token) += token_scale * dh.transpose();
                }
            }

            st.step += 1;
            apply_update(model.embeddings, grad_embeddings, st.adam_embeddings, st.config, st.step);
            if (model.hidden_dim > 0) {
                apply_update(model.hidden_weights, grad_hidden_w, st.adam_hidden_w, st.config, st.step);
                MatrixXd hb = model.hidden_bias, ghb = grad_hidden_b;
                apply_update(hb, ghb, st.adam_hidden_b, st.config, st.step);
                model.hidden_bias = hb;
            }
            apply_update(model.output_weights, grad_output_w, st.adam_output_w, st.config, st.step);
            MatrixXd ob = model.output_bias, gob = grad_output_b;
            apply_update(ob, gob, st.adam_output_b, st.config, st.step);
            model.output_bias = ob;
        }

        // Post-update evaluation pass.
        EpochStats stats;
        std::vector<long long> class_total(model.num_classes, 0);
        std::vector<long long> class_hit(model.num_classes, 0);
        long long correct = 0;
        for (size_t i = 0; i < docs.size(); ++i) {
            VectorXd pooled = VectorXd::Zero(model.embed_dim);
            for (int token : docs[i]) pooled += model.embeddings.row(token);
            pooled /= static_cast<double>(docs[i].size());
            VectorXd logits = logits_from_pooled(model, pooled);
            stats.loss += log_sum_exp(logits) - logits(labels[i]);
            Eigen::Index argmax = 0;
            logits.maxCoeff(&argmax);
            class_total[labels[i]] += 1;
            if (static_cast<int>(argmax) == labels[i]) {
                ++correct;
                class_hit[labels[i]] += 1;
            }
        }
        stats.loss /= static_cast<double>(docs.size());
        stats.accuracy = static_cast<double>(correct) / static_cast<double>(docs.size());
        stats.class_recall.resize(model.num_classes, 0.0);
        for (int c = 0; c < model.num_classes; ++c) {
            if (class_total[c] > 0) {
                stats.class_recall[c] =
                    static_cast<double>(class_hit[c]) / static_cast<double>(class_total[c]);
            }
        }
        history.push_back(std::move(stats));
    }
    return history;
}

TextClassifier train(const std::vector<std::vector<int>>& docs, const std::vector<int>& labels,
                     int num_classes, int vocab_size, const TrainConfig& config,
                     std::vector<EpochStats>* history) {
    Trainer trainer(init_classifier(vocab_size, num_classes, config), config);
    auto stats = trainer.run(docs, labels, config.epochs);
    if (history) *history = std::move(stats);
    return std::move(trainer.model());
}

std::vector<double> predict_proba(const TextClassifier& model, const std::vector<int>& doc) {
    check_nonempty(doc);
    auto embeddings = doc_embeddings(model, doc);
    VectorXd probs = softmax(logits_from_pooled(model, mean_pool(embeddings)));
    return std::vector<double>(probs.data(), probs.data() + probs.size());
}

int predict_class(const TextClassifier& model, const std::vector<int>& doc) {
    const auto probs = predict_proba(model, doc);
    return static_cast<int>(std::max_element(probs.begin(), probs.end()) - probs.begin());
}

std::string attribution_method_name(AttributionMethod method) {
    return method == AttributionMethod::GradInput ? "grad_input" : "integrated_gradients";
}

std::vector<VectorXd> doc_embeddings(const TextClassifier& model, const std::vector<int>& doc) {
    std::vector<VectorXd> embeddings;
    embeddings.reserve(doc.size());
    for (int token : doc) {
        if (token < 0 || token >= model.vocab_size) {
            throw DataError("token index " + std::to_string(token) + " out of range");
        }
        embeddings.push_back(model.embeddings.row(token).transpose());
    }
    return embeddings;
}

double loss_from_embeddings(const TextClassifier& model,
                            const std::vector<VectorXd>& embeddings, int target_class) {
    check_target(model, target_class);
    VectorXd logits = logits_from_pooled(model, mean_pool(embeddings));
    return log_sum_exp(logits) - logits(target_class);
}

double score_from_embeddings(const TextClassifier& model,
                             const std::vector<VectorXd>& embeddings, int target_class) {
    check_target(model, target_class);
    return logits_from_pooled(model, mean_pool(embeddings))(target_class);
}

std::vector<VectorXd> loss_grad_embeddings(const TextClassifier& model,
                                           const std::vector<VectorXd>& embeddings,
                                           int target_class) {
    check_target(model, target_class);
    VectorXd pooled = mean_pool(embeddings);
    VectorXd dz = softmax(logits_from_pooled(model, pooled));
    dz(target_class) -= 1.0;
    return per_position(pooled_gradient(model, pooled, dz), embeddings.size());
}

std::vector<VectorXd> score_grad_embeddings(const TextClassifier& model,
                                            const std::vector<VectorXd>& embeddings,
                                            int target_class) {
    check_target(model, target_class);
    VectorXd pooled = mean_pool(embeddings);
    VectorXd dz = VectorXd::Zero(model.num_classes);
    dz(target_class) = 1.0;
    return per_position(pooled_gradient(model, pooled, dz), embeddings.size());
}

AttributionVector grad_input_attribution(const TextClassifier& model, const std::vector<int>& doc,
                                         int target_class, AttributionTask task) {
    check_nonempty(doc);
    check_target(model, target_class);
    auto embeddings = doc_embeddings(model, doc);
    auto grads = loss_grad_embeddings(model, embeddings, target_class);
    std::vector<double> products(doc.size());
    for (size_t i = 0; i < doc.size(); ++i) {
        products[i] = grads[i].dot(embeddings[i]);
    }
    return fold_and_normalize(std::move(products), task, AttributionMethod::GradInput);
}

std::vector<double> integrated_gradients_raw(const TextClassifier& model,
                                             const std::vector<int>& doc, int target_class,
                                             int steps) {
    check_nonempty(doc);
    check_target(model, target_class);
    if (steps < 1) throw ConfigError("integrated_gradients: steps must be >= 1");
    auto embeddings = doc_embeddings(model, doc);
    std::vector<VectorXd> mean_grads(doc.size(), VectorXd::Zero(model.embed_dim));
    std::vector<VectorXd> scaled(doc.size(), VectorXd::Zero(model.embed_dim));
    for (int s = 0; s < steps; ++s) {
        const double alpha = (s + 0.5) / static_cast<double>(steps);
        for (size_t i = 0; i < doc.size(); ++i) scaled[i] = alpha * embeddings[i];
        auto grads = score_grad_embeddings(model, scaled, target_class);
        for (size_t i = 0; i < doc.size(); ++i) mean_grads[i] += grads[i];
    }
    std::vector<double> raw(doc.size());
    for (size_t i = 0; i < doc.size(); ++i) {
        raw[i] = embeddings[i].dot(mean_grads[i]) / static_cast<double>(steps);
    }
    return raw;
}

AttributionVector integrated_gradients(const TextClassifier& model, const std::vector<int>& doc,
                                       int target_class, AttributionTask task, int steps) {
    auto raw = integrated_gradients_raw(model, doc, target_class, steps);
    return fold_and_normalize(std::move(raw), task, AttributionMethod::IntegratedGradients);
}

double class_score(const TextClassifier& model, const std::vector<int>& doc, int target_class) {
    check_nonempty(doc);
    return score_from_embeddings(model, doc_embeddings(model, doc), target_class);
}

namespace {

using nlohmann::json;

json matrix_to_json(const MatrixXd& m) {
    json values = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            values.push_back(format_double(m(i, j)));
        }
    }
    return values;
}

MatrixXd matrix_from_json(const json& values, Eigen::Index rows, Eigen::Index cols,
                          const std::string& name) {
    if (!values.is_array() || values.size() != static_cast<size_t>(rows * cols)) {
        throw DataError("classifier file: field '" + name + "' has wrong size");
    }
    MatrixXd m(rows, cols);
    size_t k = 0;
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) {
            m(i, j) = std::strtod(values[k++].get<std::string>().c_str(), nullptr);
        }
    }
    return m;
}

} // namespace

std::string save_classifier(const TextClassifier& model) {
    json out;
    out["format_version"] = 1;
    out["kind"] = "text_classifier";
    out["vocab_size"] = model.vocab_size;
    out["embed_dim"] = model.embed_dim;
    out["num_classes"] = model.num_classes;
    out["hidden_dim"] = model.hidden_dim;
    out["seed"] = model.seed;
    out["vocab_hash"] = model.vocab_hash;
    out["embeddings"] = matrix_to_json(model.embeddings);
    if (model.hidden_dim > 0) {
        out["hidden_weights"] = matrix_to_json(model.hidden_weights);
        out["hidden_bias"] = matrix_to_json(model.hidden_bias);
    }
    out["output_weights"] = matrix_to_json(model.output_weights);
    out["output_bias"] = matrix_to_json(model.output_bias);
    return out.dump(2) + "\n";
}

TextClassifier load_classifier(const std::string& serialized) {
    json in;
    try {
        in = json::parse(serialized);
    } catch (const json::parse_error& e) {
        throw DataError(std::string("classifier file: ") + e.what());
    }
    if (!in.is_object() || in.value("kind", "") != "text_classifier") {
        throw DataError("classifier file: not a text_classifier document");
    }
    if (in.value("format_version", 0) != 1) {
        throw DataError("classifier file: unsupported format_version");
    }
    TextClassifier model;
    model.vocab_size = in.at("vocab_size").get<int>();
    model.embed_dim = in.at("embed_dim").get<int>();
    model.num_classes = in.at("num_classes").get<int>();
    model.hidden_dim = in.value("hidden_dim", 0);
    model.seed = in.value("seed", 0ULL);
    model.vocab_hash = in.value("vocab_hash", "");
    model.embeddings =
        matrix_from_json(in.at("embeddings"), model.vocab_size, model.embed_dim, "embeddings");
    const int head_in = model.hidden_dim > 0 ? model.hidden_dim : model.embed_dim;
    if (model.hidden_dim > 0) {
        model.hidden_weights = matrix_from_json(in.at("hidden_weights"), model.embed_dim,
                                                model.hidden_dim, "hidden_weights");
        model.hidden_bias =
            matrix_from_json(in.at("hidden_bias"), model.hidden_dim, 1, "hidden_bias");
    }
    model.output_weights =
        matrix_from_json(in.at("output_weights"), head_in, model.num_classes, "output_weights");
    model.output_bias =
        matrix_from_json(in.at("output_bias"), model.num_classes, 1, "output_bias");
    return model;
}

} // namespace painmine
