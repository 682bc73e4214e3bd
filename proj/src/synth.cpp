#include "painmine/synth.hpp"

#include "painmine/errors.hpp"
#include "painmine/features.hpp"
#include "painmine/util.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

namespace painmine {

GeneratorSpec GeneratorSpec::defaults() {
    GeneratorSpec spec;
    // Filler banks are deliberately shared across topics so the planted
    // keywords stay the only topic-bearing axis of the document vectors.
    const std::vector<std::string> fillers = {
        "i bought this for my kitchen last month",
        "we have been using it every day",
        "my sister ordered the same model",
        "it came in a plain brown box",
        "the manual was short and clear",
        "delivery took about one week",
        "this replaced an older model we had",
        "i registered the warranty online",
    };
    spec.topics = {
        {"heater", {"heater", "thermostat", "coil"}, fillers},
        {"vacuum", {"vacuum", "suction", "hose"}, fillers},
        {"blender", {"blender", "blade", "jar"}, fillers},
        {"headset", {"headset", "earcup", "jack"}, fillers},
        {"mattress", {"mattress", "foam", "spring"}, fillers},
    };
    // The second carrier phrases the pair as one compound noun chunk, so a
    // highly attributed keyword drags its partner into the expanded set.
    spec.carriers = {
        "the {kw} and the {kw2} came together",
        "the {kw} {kw2} arrived together",
        "we checked the {kw} and the {kw2} first",
        "the {kw} goes beside the {kw2}",
        "you can see the {kw} and the {kw2}",
    };
    // Each of the five global pain nouns (battery, filter, noise, stain,
    // odor) appears in exactly two negative templates.
    spec.negative_templates = {
        "the battery drains too fast",
        "the battery died after a week",
        "the filter smells terrible",
        "the filter leaks every week",
        "the noise is unbearable",
        "the noise wakes us at night",
        "a big stain appeared on the cover",
        "the stain ruined the whole look",
        "a strange odor comes from the unit",
        "the odor gets worse every day",
    };
    spec.positive_templates = {
        "it works great and we love it",
        "excellent quality for the price",
        "my family is very happy with it",
        "arrived quickly and looks lovely",
        "five stars from everyone at home",
        "truly the best purchase this year",
        "super easy to set up and use",
        "quiet sturdy and reliable so far",
        "would happily buy this again",
        "exceeded every expectation we had",
    };
    spec.negative_slots = {
        "the {kw} stopped working",
        "the {kw} is broken",
        "the {kw} makes a loud sound",
    };
    spec.positive_slots = {
        "the {kw} works well",
        "the {kw} is great",
        "the {kw} runs fine",
    };
    // Keywords outside the sampled pair still get one neutral mention, so
    // every document carries the whole bank and sub-clusters of a topic
    // always share keywords.
    spec.mentions = {
        "the {kw} seems fine so far",
        "the {kw} looks normal",
    };
    return spec;
}

namespace {

std::string replace_all(std::string text, const std::string& from, const std::string& to) {
    size_t pos = 0;
    while ((pos = text.find(from, pos)) != std::string::npos) {
        text.replace(pos, from.size(), to);
        pos += to.size();
    }
    return text;
}

void validate_spec(const GeneratorSpec& spec) {
    if (spec.topics.empty()) throw ConfigError("generator needs at least one topic");
    if (spec.docs_per_topic < 1) throw ConfigError("docs_per_topic must be >= 1");
    if (spec.negative_fraction < 0.0 || spec.negative_fraction > 1.0)
        throw ConfigError("negative_fraction must be in [0, 1]");
    if (spec.noise_rate < 0.0 || spec.noise_rate > 1.0)
        throw ConfigError("noise_rate must be in [0, 1]");
    if (spec.positive_templates.empty() || spec.negative_templates.empty() ||
        spec.positive_slots.empty() || spec.negative_slots.empty() || spec.carriers.empty()) {
        throw ConfigError("generator phrase banks must be non-empty");
    }
    std::set<std::string> seen;
    for (const auto& topic : spec.topics) {
        if (topic.keywords.size() < 2)
            throw ConfigError("topic '" + topic.name + "' needs at least 2 keywords");
        if (topic.keywords.size() > 2 && spec.mentions.empty())
            throw ConfigError("topic '" + topic.name +
                              "' has more than 2 keywords but the mention bank is empty");
        if (topic.fillers.empty())
            throw ConfigError("topic '" + topic.name + "' has no filler phrases");
        for (const auto& kw : topic.keywords) {
            if (!seen.insert(kw).second)
                throw ConfigError("keyword '" + kw + "' appears in more than one topic bank");
        }
    }
}

template <typename T>
const T& pick(const std::vector<T>& bank, std::mt19937_64& rng) {
    return bank[rng() % bank.size()];
}

} // namespace

SynthResult generate(const GeneratorSpec& spec) {
    validate_spec(spec);
    std::mt19937_64 rng(spec.seed);
    SynthResult result;
    std::set<std::string> seen_texts;
    const int n_neg = static_cast<int>(
        std::llround(spec.negative_fraction * static_cast<double>(spec.docs_per_topic)));

    int doc_counter = 0;
    for (size_t t = 0; t < spec.topics.size(); ++t) {
        const TopicSpec& topic = spec.topics[t];
        for (int j = 0; j < spec.docs_per_topic; ++j) {
            const bool negative = j < n_neg;
            std::string text;
            std::string kw1, kw2;
            for (int attempt = 0; attempt < 256; ++attempt) {
                size_t a = rng() % topic.keywords.size();
                size_t b = rng() % (topic.keywords.size() - 1);
                if (b >= a) ++b;
                kw1 = topic.keywords[a];
                kw2 = topic.keywords[b];
                // Two carrier sentences with the pair in both orders keep the
                // topic keywords the dominant axis of the document vector.
                size_t c1 = rng() % spec.carriers.size();
                size_t c2 = spec.carriers.size() > 1 ? rng() % (spec.carriers.size() - 1) : 0;
                if (spec.carriers.size() > 1 && c2 >= c1) ++c2;
                std::string carrier = replace_all(
                    replace_all(spec.carriers[c1], "{kw2}", kw2), "{kw}", kw1);
                std::string carrier2 = replace_all(
                    replace_all(spec.carriers[c2], "{kw2}", kw1), "{kw}", kw2);
                const auto& templ =
                    negative ? pick(spec.negative_templates, rng) : pick(spec.positive_templates, rng);
                std::string slot = replace_all(
                    negative ? pick(spec.negative_slots, rng) : pick(spec.positive_slots, rng),
                    "{kw}", kw1);
                std::vector<std::string> parts = {carrier, carrier2, templ, slot};
                for (const auto& kw : topic.keywords) {
                    if (kw == kw1 || kw == kw2) continue;
                    parts.push_back(replace_all(pick(spec.mentions, rng), "{kw}", kw));
                }
                parts.push_back(pick(topic.fillers, rng));

                std::vector<std::string> words;
                for (const std::string& part : parts) {
                    for (const auto& token : tokenize(part)) words.push_back(token);
                }
                const uint64_t threshold =
                    static_cast<uint64_t>(spec.noise_rate * 1000000.0);
                std::vector<std::string> with_noise;
                for (const auto& word : words) {
                    with_noise.push_back(word);
                    if (rng() % 1000000 < threshold)
                        with_noise.push_back("zz" + std::to_string(100 + rng() % 900));
                }
                std::string candidate;
                for (size_t w = 0; w < with_noise.size(); ++w) {
                    if (w > 0) candidate += ' ';
                    candidate += with_noise[w];
                }
                if (seen_texts.insert(candidate).second) {
                    text = std::move(candidate);
                    break;
                }
            }
            if (text.empty()) throw DataError("could not generate a unique review text");

            char id[16];
            std::snprintf(id, sizeof(id), "r%05d", doc_counter++);
            RawReview review;
            review.id = id;
            review.text = text;
            review.sentiment = negative ? Sentiment::Negative : Sentiment::Positive;
            result.reviews.push_back(std::move(review));

            DocTruth truth;
            truth.doc_id = id;
            truth.topic = static_cast<int>(t) + 1;
            truth.topic_name = topic.name;
            truth.sentiment = negative ? Sentiment::Negative : Sentiment::Positive;
            truth.planted = {kw1, kw2};
            std::sort(truth.planted.begin(), truth.planted.end());
            result.truth.push_back(std::move(truth));
        }
    }
    return result;
}

TopicAssignment truth_assignment(const SynthResult& result) {
    TopicAssignment assignment;
    for (const auto& truth : result.truth) {
        assignment.doc_ids.push_back(truth.doc_id);
        assignment.labels.push_back(truth.topic);
    }
    return assignment;
}

TopicAssignment corrupt_assignment(const TopicAssignment& truth, double outlier_rate,
                                   double flip_rate, uint64_t seed) {
    if (outlier_rate < 0.0 || flip_rate < 0.0 || outlier_rate + flip_rate > 1.0 + 1e-12)
        throw ConfigError("corruption rates must be non-negative and sum to at most 1");
    const size_t n = truth.labels.size();
    const size_t k_out = static_cast<size_t>(
        std::llround(outlier_rate * static_cast<double>(n)));
    size_t k_flip = static_cast<size_t>(std::llround(flip_rate * static_cast<double>(n)));
    if (k_out + k_flip > n) k_flip = n - k_out;
    const int m = truth.num_topics();
    if (k_flip > 0 && m < 2)
        throw ConfigError("flipping labels requires at least 2 topics");

    std::mt19937_64 rng(seed);
    std::vector<size_t> order(n);
    for (size_t i = 0; i < n; ++i) order[i] = i;
    for (size_t i = n; i > 1; --i) { // Fisher-Yates
        size_t j = rng() % i;
        std::swap(order[i - 1], order[j]);
    }

    TopicAssignment out = truth;
    for (size_t r = 0; r < k_out; ++r) out.labels[order[r]] = kOutlierTopic;
    for (size_t r = k_out; r < k_out + k_flip; ++r) {
        const size_t i = order[r];
        const int prev = truth.labels[i];
        int wrong;
        if (prev >= 1 && prev <= m) {
            wrong = 1 + static_cast<int>(rng() % static_cast<uint64_t>(m - 1));
            if (wrong >= prev) ++wrong;
        } else {
            wrong = 1 + static_cast<int>(rng() % static_cast<uint64_t>(m));
        }
        out.labels[i] = wrong;
    }
    return out;
}

std::string truth_to_jsonl(const std::vector<DocTruth>& truth) {
    std::string out;
    for (const auto& t : truth) {
        nlohmann::ordered_json record{{"id", t.doc_id},
                                      {"topic", t.topic},
                                      {"topic_name", t.topic_name},
                                      {"sentiment", sentiment_name(t.sentiment)},
                                      {"planted", t.planted}};
        out += record.dump();
        out += '\n';
    }
    return out;
}

std::vector<DocTruth> truth_from_jsonl(const std::string& text) {
    std::vector<DocTruth> out;
    for (const auto& line : split_lines(text)) {
        if (line.empty()) continue;
        nlohmann::json record;
        try {
            record = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw DataError(std::string("bad ground-truth JSONL: ") + e.what());
        }
        DocTruth t;
        t.doc_id = record.at("id").get<std::string>();
        t.topic = record.at("topic").get<int>();
        t.topic_name = record.value("topic_name", std::string());
        auto sentiment = parse_sentiment(record.at("sentiment").get<std::string>());
        if (!sentiment) throw DataError("bad sentiment in ground truth for doc " + t.doc_id);
        t.sentiment = *sentiment;
        if (record.contains("planted"))
            for (const auto& kw : record["planted"]) t.planted.push_back(kw.get<std::string>());
        out.push_back(std::move(t));
    }
    return out;
}

std::string reviews_to_jsonl(const std::vector<RawReview>& reviews) {
    std::string out;
    for (const auto& review : reviews) {
        nlohmann::ordered_json record{{"id", review.id}, {"text", review.text}};
        if (review.sentiment) record["sentiment"] = sentiment_name(*review.sentiment);
        if (review.product_group) record["product_group"] = *review.product_group;
        if (review.source_type) record["source_type"] = *review.source_type;
        if (review.timestamp) record["timestamp"] = *review.timestamp;
        out += record.dump();
        out += '\n';
    }
    return out;
}

} // namespace painmine
