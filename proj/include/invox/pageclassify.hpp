#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "invox/document.hpp"

namespace invox {

enum class FeatureStage { LayoutOnly, WithAnnotations };

/// Ordered feature names plus numeric flags. The schema hash binds models
/// to the exact feature layout they were trained on.
struct FeatureSchema {
    FeatureStage stage = FeatureStage::LayoutOnly;
    std::vector<std::string> names;
    std::vector<bool> numeric;

    std::size_t size() const { return names.size(); }
    std::uint64_t hash() const;
};

/// Frequent-word vocabulary + title/page-number features; the annotation
/// stage appends K_* keyword, D_* data/entity and block-type booleans.
FeatureSchema make_feature_schema(const std::vector<std::string>& vocab, FeatureStage stage);

struct FeatureVector {
    std::vector<double> values;
    std::uint64_t schema_hash = 0;
};

/// Fills the feature vector for one analyzed page. Throws StageError when
/// the schema requires annotations but annotations_available is false.
FeatureVector extract_features(const Page& page, const FeatureSchema& schema,
                               bool annotations_available = true);

enum class ModelKind { NaiveBayes, LogisticRegression };
std::string to_string(ModelKind k);
ModelKind model_kind_from_string(const std::string& s);

struct Dataset {
    FeatureSchema schema;
    std::vector<std::vector<double>> X;
    std::vector<int> y; // 1 = invoice first page
};

/// Per-feature preprocessing learned at training time: quartile bins for
/// naive Bayes, standardization for logistic regression.
struct FeatureTransform {
    bool is_numeric = false;
    std::array<double, 3> bin_edges{0.0, 0.0, 0.0};
    double mean = 0.0;
    double stddev = 0.0;
};

struct ClassifierModel {
    ModelKind kind = ModelKind::NaiveBayes;
    std::uint64_t schema_hash = 0;
    std::vector<FeatureTransform> transforms;
    // Bernoulli naive Bayes over the bin-expanded feature space
    std::array<double, 2> log_prior{0.0, 0.0};
    std::vector<std::array<double, 2>> log_p_one;
    std::vector<std::array<double, 2>> log_p_zero;
    // logistic regression over standardized features
    std::vector<double> weights;
    double bias = 0.0;

    std::string to_json_text() const;
    static ClassifierModel from_json_text(const std::string& json_text);
    static ClassifierModel from_json_file(const std::string& path);
};

/// Bernoulli NB with Laplace smoothing, or L2 logistic regression trained
/// by gradient descent with backtracking until the gradient norm drops
/// below 1e-6 (at most 10000 iterations). Throws DegenerateDataError when
/// the dataset holds a single class.
ClassifierModel train(const Dataset& dataset, ModelKind kind);

struct Prediction {
    int label = 0;
    double probability = 0.0; // of label 1
};

Prediction predict(const ClassifierModel& model, const FeatureVector& fv);

struct CvMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

/// Stratified k-fold cross validation with a seeded shuffle; metrics are
/// for label 1, averaged over folds.
CvMetrics cross_validate(const Dataset& dataset, ModelKind kind, int k, std::uint64_t seed);

/// Regularized logistic loss and its analytic gradient at the given
/// parameter point (weights followed by the bias). X rows are transformed
/// features; exposed so the gradient can be checked against finite
/// differences.
std::pair<double, std::vector<double>> lr_loss_and_gradient(
    const std::vector<std::vector<double>>& X, const std::vector<int>& y,
    const std::vector<double>& params, double l2);

} // namespace invox
