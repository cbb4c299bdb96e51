#include "invox/pageclassify.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <regex>
#include <sstream>

#include <json.hpp>

#include "invox/errors.hpp"
#include "invox/text.hpp"
#include "invox/textannot.hpp"

namespace invox {

using nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Feature schema

std::uint64_t FeatureSchema::hash() const {
    std::uint64_t h = 1469598103934665603ull; // FNV-1a 64
    auto mix = [&](const std::string& s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 1099511628211ull;
        }
        h ^= '\n';
        h *= 1099511628211ull;
    };
    mix(stage == FeatureStage::LayoutOnly ? "layout" : "annotations");
    for (const std::string& n : names) mix(n);
    return h;
}

namespace {

const std::vector<std::string>& data_feature_labels() {
    static const std::vector<std::string> labels = {
        "DATE",       "PRICE", "NUMBER",       "VAT NUMBER",  "IBAN",
        "SWIFT",      "EMAIL", "PHONE",        "URL",         "ACCOUNT NUMBER",
        "PAGE NUMBER", "COMPANY ID",
        "PERSON",     "ORGANIZATION", "LOCATION", "CITY",     "COUNTRY",
    };
    return labels;
}

const std::vector<std::string>& block_type_feature_names() {
    static const std::vector<std::string> names = {
        "general info", "seller info", "buyer info", "delivery info",
        "bank info",    "title",       "page number",
    };
    return names;
}

} // namespace

FeatureSchema make_feature_schema(const std::vector<std::string>& vocab, FeatureStage stage) {
    FeatureSchema schema;
    schema.stage = stage;
    auto add = [&](const std::string& name, bool numeric) {
        schema.names.push_back(name);
        schema.numeric.push_back(numeric);
    };
    for (const std::string& w : vocab) add("u_" + text::fold_utf8(w), false);
    add("title_present", false);
    add("title_top", true);
    add("title_height", true);
    add("page_number_present", false);
    add("page_number", true);
    if (stage == FeatureStage::WithAnnotations) {
        for (const std::string& label : keyword_labels()) add("K_" + label, false);
        for (const std::string& label : data_feature_labels()) add("D_" + label, false);
        for (const std::string& name : block_type_feature_names()) add("B_" + name, false);
    }
    return schema;
}

// ---------------------------------------------------------------------------
// Feature extraction

namespace {

struct TitleInfo {
    bool present = false;
    int top = 0;
    int height = 0;
};

/// The largest-font single-line block in the header or top zone, provided
/// it stands out against the page's median font height.
TitleInfo detect_title(const Page& page) {
    std::vector<int> fonts;
    for (const Block& b : page.blocks)
        for (const Line& l : b.lines) fonts.push_back(l.font_height());
    TitleInfo info;
    if (fonts.empty()) return info;
    std::sort(fonts.begin(), fonts.end());
    int median = fonts[fonts.size() / 2];
    const Block* best = nullptr;
    for (const Block& b : page.blocks) {
        if (b.num_lines() != 1) continue;
        if (b.zone_v != ZoneV::Header && b.zone_v != ZoneV::Top) continue;
        int font = b.lines[0].font_height();
        if (font < 1.2 * median) continue;
        if (!best || font > best->lines[0].font_height() ||
            (font == best->lines[0].font_height() && b.bbox.top < best->bbox.top))
            best = &b;
    }
    if (best) {
        info.present = true;
        info.top = best->bbox.top;
        info.height = best->bbox.height;
    }
    return info;
}

struct PageNumberInfo {
    bool present = false;
    int value = 0;
};

PageNumberInfo detect_page_number(const Page& page, bool annotations_available) {
    PageNumberInfo info;
    if (annotations_available) {
        for (const Block& b : page.blocks) {
            for (const Annotation& a : b.annotations) {
                if (a.kind != AnnotationKind::DataType || a.label != "PAGE NUMBER") continue;
                for (char c : a.matched_text) {
                    if (std::isdigit(static_cast<unsigned char>(c))) {
                        info.present = true;
                        info.value = info.value * 10 + (c - '0');
                    } else if (info.present) {
                        return info;
                    }
                }
                if (info.present) return info;
            }
        }
    }
    static const std::regex re("(^|[^0-9])(\\d{1,3})\\s*/\\s*\\d{1,3}($|[^0-9])");
    for (const Block& b : page.blocks) {
        for (const Line& l : b.lines) {
            std::smatch m;
            if (std::regex_search(l.text, m, re)) {
                info.present = true;
                info.value = std::stoi(m[2].str());
                return info;
            }
        }
    }
    return info;
}

} // namespace

FeatureVector extract_features(const Page& page, const FeatureSchema& schema,
                               bool annotations_available) {
    if (schema.stage == FeatureStage::WithAnnotations && !annotations_available)
        throw StageError("feature extraction: annotation features requested before annotation");

    std::set<std::string> words;
    for (const Block& b : page.blocks)
        for (const Line& l : b.lines)
            for (const std::string& tok : text::split_words(l.text)) {
                std::u32string u = text::fold(text::decode_utf8(tok));
                std::u32string stripped;
                for (char32_t c : u)
                    if (!text::is_punct(c)) stripped.push_back(c);
                if (!stripped.empty()) words.insert(text::encode_utf8(stripped));
            }

    TitleInfo title = detect_title(page);
    PageNumberInfo pageno = detect_page_number(page, annotations_available &&
                                                         schema.stage ==
                                                             FeatureStage::WithAnnotations);

    std::set<std::string> kw_labels, data_labels, type_names;
    if (schema.stage == FeatureStage::WithAnnotations) {
        for (const Block& b : page.blocks) {
            for (const Annotation& a : b.annotations) {
                if (a.kind == AnnotationKind::Keyword) kw_labels.insert(a.label);
                else data_labels.insert(a.label);
            }
            for (BlockType t : b.block_types)
                if (t != BlockType::Empty) type_names.insert(to_string(t));
        }
    }

    FeatureVector fv;
    fv.schema_hash = schema.hash();
    fv.values.reserve(schema.size());
    for (const std::string& name : schema.names) {
        double v = 0.0;
        if (name.rfind("u_", 0) == 0) {
            v = words.count(name.substr(2)) ? 1.0 : 0.0;
        } else if (name == "title_present") {
            v = title.present ? 1.0 : 0.0;
        } else if (name == "title_top") {
            v = title.top;
        } else if (name == "title_height") {
            v = title.height;
        } else if (name == "page_number_present") {
            v = pageno.present ? 1.0 : 0.0;
        } else if (name == "page_number") {
            v = pageno.value;
        } else if (name.rfind("K_", 0) == 0) {
            v = kw_labels.count(name.substr(2)) ? 1.0 : 0.0;
        } else if (name.rfind("D_", 0) == 0) {
            v = data_labels.count(name.substr(2)) ? 1.0 : 0.0;
        } else if (name.rfind("B_", 0) == 0) {
            v = type_names.count(name.substr(2)) ? 1.0 : 0.0;
        }
        fv.values.push_back(v);
    }
    return fv;
}

// ---------------------------------------------------------------------------
// Models

std::string to_string(ModelKind k) {
    return k == ModelKind::NaiveBayes ? "nb" : "lr";
}

ModelKind model_kind_from_string(const std::string& s) {
    if (s == "nb") return ModelKind::NaiveBayes;
    if (s == "lr") return ModelKind::LogisticRegression;
    throw SchemaError("unknown model kind: '" + s + "'");
}

namespace {

constexpr double kL2 = 1e-3;
constexpr double kGradTol = 1e-6;
constexpr int kMaxIterations = 10000;

void check_two_classes(const std::vector<int>& y) {
    bool has0 = false, has1 = false;
    for (int v : y) (v == 1 ? has1 : has0) = true;
    if (!has0 || !has1)
        throw DegenerateDataError("training data must contain both classes");
}

std::vector<FeatureTransform> learn_transforms(const Dataset& dataset) {
    std::vector<FeatureTransform> transforms(dataset.schema.size());
    for (std::size_t f = 0; f < dataset.schema.size(); ++f) {
        FeatureTransform& t = transforms[f];
        t.is_numeric = dataset.schema.numeric[f];
        if (!t.is_numeric) continue;
        std::vector<double> vals;
        vals.reserve(dataset.X.size());
        for (const auto& row : dataset.X) vals.push_back(row[f]);
        std::sort(vals.begin(), vals.end());
        auto quantile = [&](double q) {
            double idx = q * (vals.size() - 1);
            std::size_t lo = static_cast<std::size_t>(idx);
            std::size_t hi = std::min(lo + 1, vals.size() - 1);
            double frac = idx - lo;
            return vals[lo] * (1.0 - frac) + vals[hi] * frac;
        };
        t.bin_edges = {quantile(0.25), quantile(0.5), quantile(0.75)};
        double sum = std::accumulate(vals.begin(), vals.end(), 0.0);
        t.mean = sum / vals.size();
        double ss = 0.0;
        for (double v : vals) ss += (v - t.mean) * (v - t.mean);
        t.stddev = std::sqrt(ss / vals.size());
    }
    return transforms;
}

int bin_of(const FeatureTransform& t, double v) {
    if (v <= t.bin_edges[0]) return 0;
    if (v <= t.bin_edges[1]) return 1;
    if (v <= t.bin_edges[2]) return 2;
    return 3;
}

/// Numeric features expand to a quartile one-hot; binaries pass through.
std::vector<double> expand_for_nb(const std::vector<FeatureTransform>& transforms,
                                  const std::vector<double>& row) {
    std::vector<double> out;
    for (std::size_t f = 0; f < transforms.size(); ++f) {
        if (!transforms[f].is_numeric) {
            out.push_back(row[f] != 0.0 ? 1.0 : 0.0);
        } else {
            int bin = bin_of(transforms[f], row[f]);
            for (int k = 0; k < 4; ++k) out.push_back(k == bin ? 1.0 : 0.0);
        }
    }
    return out;
}

std::vector<double> standardize_for_lr(const std::vector<FeatureTransform>& transforms,
                                       const std::vector<double>& row) {
    std::vector<double> out(row.size());
    for (std::size_t f = 0; f < transforms.size(); ++f) {
        if (!transforms[f].is_numeric) {
            out[f] = row[f];
        } else if (transforms[f].stddev > 0.0) {
            out[f] = (row[f] - transforms[f].mean) / transforms[f].stddev;
        } else {
            out[f] = 0.0;
        }
    }
    return out;
}

ClassifierModel train_nb(const Dataset& dataset) {
    ClassifierModel model;
    model.kind = ModelKind::NaiveBayes;
    model.schema_hash = dataset.schema.hash();
    model.transforms = learn_transforms(dataset);

    std::vector<std::vector<double>> expanded;
    expanded.reserve(dataset.X.size());
    for (const auto& row : dataset.X) expanded.push_back(expand_for_nb(model.transforms, row));

    std::array<int, 2> class_count{0, 0};
    for (int v : dataset.y) ++class_count[v == 1 ? 1 : 0];
    const double n = static_cast<double>(dataset.y.size());
    model.log_prior = {std::log(class_count[0] / n), std::log(class_count[1] / n)};

    const std::size_t d = expanded.front().size();
    model.log_p_one.assign(d, {0.0, 0.0});
    model.log_p_zero.assign(d, {0.0, 0.0});
    for (std::size_t f = 0; f < d; ++f) {
        std::array<int, 2> ones{0, 0};
        for (std::size_t i = 0; i < expanded.size(); ++i)
            if (expanded[i][f] != 0.0) ++ones[dataset.y[i] == 1 ? 1 : 0];
        for (int c = 0; c < 2; ++c) {
            double p = (ones[c] + 1.0) / (class_count[c] + 2.0); // Laplace alpha = 1
            model.log_p_one[f][c] = std::log(p);
            model.log_p_zero[f][c] = std::log(1.0 - p);
        }
    }
    return model;
}

double dot_with_bias(const std::vector<double>& params, const std::vector<double>& x) {
    double z = params.back();
    for (std::size_t f = 0; f < x.size(); ++f) z += params[f] * x[f];
    return z;
}

double sigmoid(double z) {
    return z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
}

ClassifierModel train_lr(const Dataset& dataset) {
    ClassifierModel model;
    model.kind = ModelKind::LogisticRegression;
    model.schema_hash = dataset.schema.hash();
    model.transforms = learn_transforms(dataset);

    std::vector<std::vector<double>> X;
    X.reserve(dataset.X.size());
    for (const auto& row : dataset.X) X.push_back(standardize_for_lr(model.transforms, row));

    const std::size_t d = X.front().size();
    std::vector<double> params(d + 1, 0.0);
    auto [loss, grad] = lr_loss_and_gradient(X, dataset.y, params, kL2);
    double step = 1.0;
    for (int iter = 0; iter < kMaxIterations; ++iter) {
        double gnorm = 0.0;
        for (double g : grad) gnorm += g * g;
        if (std::sqrt(gnorm) < kGradTol) break;
        // backtracking keeps the loss non-increasing
        while (true) {
            std::vector<double> trial(params.size());
            for (std::size_t f = 0; f < params.size(); ++f) trial[f] = params[f] - step * grad[f];
            auto [trial_loss, trial_grad] = lr_loss_and_gradient(X, dataset.y, trial, kL2);
            if (trial_loss <= loss || step < 1e-12) {
                params = std::move(trial);
                loss = trial_loss;
                grad = std::move(trial_grad);
                step *= 1.2;
                break;
            }
            step *= 0.5;
        }
    }
    model.weights.assign(params.begin(), params.end() - 1);
    model.bias = params.back();
    return model;
}

} // namespace

std::pair<double, std::vector<double>> lr_loss_and_gradient(
    const std::vector<std::vector<double>>& X, const std::vector<int>& y,
    const std::vector<double>& params, double l2) {
    const std::size_t n = X.size();
    const std::size_t d = params.size() - 1;
    double loss = 0.0;
    std::vector<double> grad(params.size(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double z = dot_with_bias(params, X[i]);
        double p = sigmoid(z);
        double yi = y[i] == 1 ? 1.0 : 0.0;
        // numerically stable -[y log p + (1-y) log(1-p)]
        loss += (z >= 0.0 ? std::log1p(std::exp(-z)) + (1.0 - yi) * z
                          : std::log1p(std::exp(z)) - yi * z);
        double diff = p - yi;
        for (std::size_t f = 0; f < d; ++f) grad[f] += diff * X[i][f];
        grad[d] += diff;
    }
    loss /= n;
    for (double& g : grad) g /= n;
    for (std::size_t f = 0; f < d; ++f) {
        loss += 0.5 * l2 * params[f] * params[f];
        grad[f] += l2 * params[f];
    }
    return {loss, grad};
}

ClassifierModel train(const Dataset& dataset, ModelKind kind) {
    if (dataset.X.empty()) throw DegenerateDataError("training data is empty");
    for (const auto& row : dataset.X)
        if (row.size() != dataset.schema.size())
            throw SchemaMismatchError("training row width does not match the schema");
    check_two_classes(dataset.y);
    return kind == ModelKind::NaiveBayes ? train_nb(dataset) : train_lr(dataset);
}

Prediction predict(const ClassifierModel& model, const FeatureVector& fv) {
    if (fv.schema_hash != model.schema_hash)
        throw SchemaMismatchError("feature vector schema does not match the model");
    Prediction pred;
    if (model.kind == ModelKind::NaiveBayes) {
        std::vector<double> x = expand_for_nb(model.transforms, fv.values);
        std::array<double, 2> log_post = model.log_prior;
        for (std::size_t f = 0; f < x.size(); ++f)
            for (int c = 0; c < 2; ++c)
                log_post[c] += x[f] != 0.0 ? model.log_p_one[f][c] : model.log_p_zero[f][c];
        double mx = std::max(log_post[0], log_post[1]);
        double e0 = std::exp(log_post[0] - mx), e1 = std::exp(log_post[1] - mx);
        pred.probability = e1 / (e0 + e1);
    } else {
        std::vector<double> x = standardize_for_lr(model.transforms, fv.values);
        std::vector<double> params = model.weights;
        params.push_back(model.bias);
        pred.probability = sigmoid(dot_with_bias(params, x));
    }
    pred.label = pred.probability >= 0.5 ? 1 : 0;
    return pred;
}

CvMetrics cross_validate(const Dataset& dataset, ModelKind kind, int k, std::uint64_t seed) {
    if (k < 2) throw ConfigError("cross validation: k must be at least 2");
    if (static_cast<std::size_t>(k) > dataset.X.size())
        throw ConfigError("cross validation: k exceeds the dataset size");
    check_two_classes(dataset.y);

    // stratified fold assignment from a seeded shuffle
    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < dataset.y.size(); ++i)
        (dataset.y[i] == 1 ? pos : neg).push_back(i);
    std::mt19937_64 rng(seed);
    std::shuffle(pos.begin(), pos.end(), rng);
    std::shuffle(neg.begin(), neg.end(), rng);
    std::vector<int> fold_of(dataset.y.size(), 0);
    int next = 0;
    for (std::size_t i : pos) fold_of[i] = next++ % k;
    for (std::size_t i : neg) fold_of[i] = next++ % k;

    double sum_p = 0.0, sum_r = 0.0, sum_f1 = 0.0;
    int folds_used = 0;
    for (int fold = 0; fold < k; ++fold) {
        Dataset train_set;
        train_set.schema = dataset.schema;
        std::vector<std::size_t> test_idx;
        for (std::size_t i = 0; i < dataset.X.size(); ++i) {
            if (fold_of[i] == fold) {
                test_idx.push_back(i);
            } else {
                train_set.X.push_back(dataset.X[i]);
                train_set.y.push_back(dataset.y[i]);
            }
        }
        if (test_idx.empty()) continue;
        ClassifierModel model = train(train_set, kind);
        int tp = 0, fp = 0, fn = 0;
        for (std::size_t i : test_idx) {
            FeatureVector fv{dataset.X[i], dataset.schema.hash()};
            Prediction p = predict(model, fv);
            if (p.label == 1 && dataset.y[i] == 1) ++tp;
            else if (p.label == 1 && dataset.y[i] != 1) ++fp;
            else if (p.label == 0 && dataset.y[i] == 1) ++fn;
        }
        double precision = tp + fp > 0 ? static_cast<double>(tp) / (tp + fp)
                                       : (fn == 0 ? 1.0 : 0.0);
        double recall = tp + fn > 0 ? static_cast<double>(tp) / (tp + fn) : 1.0;
        double f1 = precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall)
                                             : 0.0;
        sum_p += precision;
        sum_r += recall;
        sum_f1 += f1;
        ++folds_used;
    }
    CvMetrics m;
    m.precision = sum_p / folds_used;
    m.recall = sum_r / folds_used;
    m.f1 = sum_f1 / folds_used;
    return m;
}

// ---------------------------------------------------------------------------
// Model files

std::string ClassifierModel::to_json_text() const {
    ordered_json j;
    j["kind"] = to_string(kind);
    j["schema_hash"] = std::to_string(schema_hash);
    ordered_json transforms_j = ordered_json::array();
    for (const FeatureTransform& t : transforms) {
        ordered_json tj;
        tj["numeric"] = t.is_numeric;
        if (t.is_numeric) {
            tj["bin_edges"] = t.bin_edges;
            tj["mean"] = t.mean;
            tj["stddev"] = t.stddev;
        }
        transforms_j.push_back(tj);
    }
    j["transforms"] = transforms_j;
    if (kind == ModelKind::NaiveBayes) {
        j["log_prior"] = log_prior;
        ordered_json ones = ordered_json::array(), zeros = ordered_json::array();
        for (const auto& v : log_p_one) ones.push_back(v);
        for (const auto& v : log_p_zero) zeros.push_back(v);
        j["log_p_one"] = ones;
        j["log_p_zero"] = zeros;
    } else {
        j["weights"] = weights;
        j["bias"] = bias;
    }
    return j.dump(2);
}

ClassifierModel ClassifierModel::from_json_text(const std::string& json_text) {
    ordered_json j;
    try {
        j = ordered_json::parse(json_text);
    } catch (const ordered_json::exception& e) {
        throw SchemaError(std::string("model: ") + e.what());
    }
    ClassifierModel model;
    try {
        model.kind = model_kind_from_string(j.at("kind").get<std::string>());
        model.schema_hash = std::stoull(j.at("schema_hash").get<std::string>());
        for (const auto& tj : j.at("transforms")) {
            FeatureTransform t;
            t.is_numeric = tj.at("numeric").get<bool>();
            if (t.is_numeric) {
                t.bin_edges = tj.at("bin_edges").get<std::array<double, 3>>();
                t.mean = tj.at("mean").get<double>();
                t.stddev = tj.at("stddev").get<double>();
            }
            model.transforms.push_back(t);
        }
        if (model.kind == ModelKind::NaiveBayes) {
            model.log_prior = j.at("log_prior").get<std::array<double, 2>>();
            for (const auto& v : j.at("log_p_one"))
                model.log_p_one.push_back(v.get<std::array<double, 2>>());
            for (const auto& v : j.at("log_p_zero"))
                model.log_p_zero.push_back(v.get<std::array<double, 2>>());
        } else {
            model.weights = j.at("weights").get<std::vector<double>>();
            model.bias = j.at("bias").get<double>();
        }
    } catch (const ordered_json::exception& e) {
        throw SchemaError(std::string("model: ") + e.what());
    }
    return model;
}

ClassifierModel ClassifierModel::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open model file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str());
}

} // namespace invox
