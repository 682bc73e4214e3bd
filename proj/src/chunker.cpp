#include "painmine/chunker.hpp"

#include "painmine/errors.hpp"
#include "painmine/util.hpp"

#include <algorithm>
#include <charconv>

namespace painmine {

std::string pos_tag_name(PosTag tag) {
    switch (tag) {
    case PosTag::Noun: return "NOUN";
    case PosTag::Verb: return "VERB";
    case PosTag::Adj: return "ADJ";
    case PosTag::Adv: return "ADV";
    case PosTag::Det: return "DET";
    case PosTag::Pron: return "PRON";
    case PosTag::Adp: return "ADP";
    case PosTag::Other: return "OTHER";
    }
    return "OTHER";
}

std::optional<PosTag> parse_pos_tag(const std::string& name) {
    if (name == "NOUN") return PosTag::Noun;
    if (name == "VERB") return PosTag::Verb;
    if (name == "ADJ") return PosTag::Adj;
    if (name == "ADV") return PosTag::Adv;
    if (name == "DET") return PosTag::Det;
    if (name == "PRON") return PosTag::Pron;
    if (name == "ADP") return PosTag::Adp;
    if (name == "OTHER") return PosTag::Other;
    return std::nullopt;
}

TaggerConfig TaggerConfig::english_defaults() {
    TaggerConfig config;
    auto add = [&](std::initializer_list<const char*> words, PosTag tag) {
        for (const char* w : words) config.lexicon.emplace(w, tag);
    };
    add({"the", "a", "an", "this", "that", "these", "those", "my", "your", "our",
         "their", "its", "his", "her", "some", "any", "no", "each", "every", "another",
         "all", "both"},
        PosTag::Det);
    add({"i", "you", "he", "she", "it", "we", "they", "me", "him", "them", "us",
         "myself", "itself", "something", "anything", "nothing", "everything", "who", "which"},
        PosTag::Pron);
    add({"in", "on", "at", "of", "to", "for", "with", "from", "by", "about", "into",
         "over", "under", "after", "before", "between", "during", "without", "through",
         "against", "within", "across", "around", "beside"},
        PosTag::Adp);
    add({"is", "are", "was", "were", "be", "been", "being", "am", "do", "does", "did",
         "have", "has", "had", "can", "could", "will", "would", "should", "may", "might",
         "must", "break", "breaks", "broke", "work", "works", "stop", "stops", "drain",
         "drains", "leak", "leaks", "smell", "smells", "keep", "keeps", "make", "makes",
         "made", "get", "gets", "got", "go", "goes", "went", "come", "comes", "came",
         "run", "runs", "ran", "buy", "buys", "bought", "use", "uses", "try", "tries",
         "return", "returns", "send", "sends", "sent", "feel", "feels", "felt", "fail",
         "fails", "die", "dies", "burn", "burns", "crack", "cracks", "rip", "rips",
         "overheat", "overheats", "wobble", "wobbles", "flicker", "flickers", "refuse",
         "refuses", "arrive", "arrives", "take", "takes", "took", "want", "wants",
         "need", "needs", "know", "knows", "knew", "think", "thinks", "thought", "see",
         "sees", "saw", "say", "says", "said", "give", "gives", "gave", "find", "finds",
         "found", "lose", "loses", "lost", "charge", "charges", "fit", "fits", "last",
         "lasts", "hold", "holds", "held", "turn", "turns", "switch", "switches",
         "wake", "wakes", "woke", "looks", "clog", "clogs", "glows", "picks", "seem", "seems",
         "rolls", "crushes", "rinses", "pairs", "stays", "sleep", "sleeps", "order",
         "ordered", "register", "registered", "replace", "replaced", "love", "loves"},
        PosTag::Verb);
    add({"good", "bad", "great", "terrible", "awful", "poor", "nice", "fast", "slow",
         "loud", "quiet", "cheap", "flimsy", "sturdy", "broken", "noisy", "weak",
         "strong", "big", "small", "new", "old", "hot", "cold", "dirty", "clean",
         "easy", "hard", "heavy", "light", "fine", "best", "worst", "better", "worse",
         "wrong", "right", "long", "short", "full", "empty", "stuck", "dead", "loose",
         "tight", "uneven", "crooked", "blurry", "dim", "bright", "sour", "stale",
         "happy", "unhappy", "same", "other", "first", "second", "third", "few",
         "many", "several", "whole", "entire", "strange", "weird", "warm", "cool",
         "soft", "low", "ready", "crisp", "fresh", "plain", "lovely", "excellent",
         "reliable", "super", "brown", "older", "nicer", "deeper", "normal"},
        PosTag::Adj);
    add({"very", "too", "really", "quite", "always", "never", "often", "barely",
         "almost", "again", "soon", "already", "still", "constantly", "completely",
         "extremely", "immediately", "here", "there", "now", "then", "once", "twice",
         "well", "away", "together", "far", "off", "out", "up", "down", "not"},
        PosTag::Adv);
    add({"and", "or", "but", "if", "than", "so", "because", "also", "just", "only",
         "even", "yet", "while", "when", "as", "though", "although", "unless",
         "1", "2", "3", "4", "5", "one", "two", "three", "four", "five", "ten"},
        PosTag::Other);

    add({"spring", "springs", "morning", "mornings", "evening", "ceiling",
         "building", "thing", "things", "king", "ring", "rings", "string",
         "strings", "wing", "wings"},
        PosTag::Noun);
    config.suffix_rules = {
        {"ly", PosTag::Adv},   {"ing", PosTag::Verb}, {"ed", PosTag::Verb},
        {"tion", PosTag::Noun}, {"ness", PosTag::Noun}, {"ment", PosTag::Noun},
        {"ity", PosTag::Noun},  {"ous", PosTag::Adj},  {"ful", PosTag::Adj},
        {"ive", PosTag::Adj},   {"able", PosTag::Adj}, {"ible", PosTag::Adj},
        {"est", PosTag::Adj},
    };
    return config;
}

namespace {

PosTag tag_single(const std::string& token, const TaggerConfig& config) {
    auto it = config.lexicon.find(token);
    if (it != config.lexicon.end()) return it->second;
    for (const auto& [suffix, tag] : config.suffix_rules) {
        if (token.size() >= suffix.size() + 2 &&
            token.compare(token.size() - suffix.size(), suffix.size(), suffix) == 0) {
            return tag;
        }
    }
    return PosTag::Noun;
}

} // namespace

std::vector<PosTaggedToken> pos_tag(const std::vector<std::string>& tokens,
                                    const TaggerConfig& config) {
    std::vector<PosTaggedToken> out;
    out.reserve(tokens.size());
    for (const auto& token : tokens) out.push_back({token, tag_single(token, config)});
    return out;
}

std::string chunk_kind_name(ChunkKind kind) {
    return kind == ChunkKind::NP ? "NP" : "VP";
}

std::vector<PhraseChunk> chunk(const std::vector<PosTaggedToken>& tagged) {
    std::vector<PhraseChunk> chunks;
    const size_t n = tagged.size();
    size_t i = 0;
    while (i < n) {
        // NP: DET? ADJ* NOUN+
        {
            size_t j = i;
            if (j < n && tagged[j].tag == PosTag::Det) ++j;
            while (j < n && tagged[j].tag == PosTag::Adj) ++j;
            size_t first_noun = j;
            while (j < n && tagged[j].tag == PosTag::Noun) ++j;
            if (j > first_noun) {
                chunks.push_back({ChunkKind::NP, i, j, j - 1});
                i = j;
                continue;
            }
        }
        // VP: ADV* VERB+ ADJ*
        {
            size_t j = i;
            while (j < n && tagged[j].tag == PosTag::Adv) ++j;
            size_t first_verb = j;
            while (j < n && tagged[j].tag == PosTag::Verb) ++j;
            if (j > first_verb) {
                while (j < n && tagged[j].tag == PosTag::Adj) ++j;
                chunks.push_back({ChunkKind::VP, i, j, first_verb});
                i = j;
                continue;
            }
        }
        ++i;
    }
    return chunks;
}

int chunk_at(const std::vector<PhraseChunk>& chunks, size_t token_index) {
    for (size_t c = 0; c < chunks.size(); ++c) {
        if (token_index >= chunks[c].start && token_index < chunks[c].end)
            return static_cast<int>(c);
    }
    return -1;
}

int related_np(const std::vector<PhraseChunk>& chunks, size_t chunk_index) {
    if (chunk_index >= chunks.size()) return -1;
    for (size_t c = chunk_index; c-- > 0;) {
        if (chunks[c].kind == ChunkKind::NP) return static_cast<int>(c);
    }
    for (size_t c = chunk_index + 1; c < chunks.size(); ++c) {
        if (chunks[c].kind == ChunkKind::NP) return static_cast<int>(c);
    }
    return -1;
}

namespace {

size_t parse_index(const std::string& field, const std::string& what, size_t line_no) {
    size_t value = 0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size()) {
        throw DataError("annotations line " + std::to_string(line_no) + ": bad " + what +
                        " '" + field + "'");
    }
    return value;
}

struct AnnotationRow {
    std::string token;
    PosTag tag;
    std::string chunk_kind; // "NP", "VP", or "O"
    long chunk_id;          // -1 outside chunks
    long head_index;        // -1 outside chunks
    size_t line_no;
};

} // namespace

AnnotationStore load_annotations(const std::string& path,
                                 const std::vector<CleanReview>& corpus) {
    std::map<std::string, size_t> doc_sizes;
    for (const auto& review : corpus) doc_sizes[review.id] = review.tokens.size();

    std::map<std::string, std::vector<AnnotationRow>> rows_by_doc;
    const auto lines = split_lines(read_file(path));
    for (size_t li = 0; li < lines.size(); ++li) {
        const std::string& line = lines[li];
        if (line.empty()) continue;
        const size_t line_no = li + 1;
        std::vector<std::string> fields;
        size_t pos = 0;
        while (true) {
            size_t tab = line.find('\t', pos);
            if (tab == std::string::npos) {
                fields.push_back(line.substr(pos));
                break;
            }
            fields.push_back(line.substr(pos, tab - pos));
            pos = tab + 1;
        }
        if (fields.size() != 7) {
            throw DataError("annotations line " + std::to_string(line_no) + ": expected 7 " +
                            "tab-separated fields, got " + std::to_string(fields.size()));
        }
        if (li == 0 && fields[0] == "doc_id") continue; // optional header
        const std::string& doc_id = fields[0];
        size_t token_index = parse_index(fields[1], "token_index", line_no);
        auto tag = parse_pos_tag(fields[3]);
        if (!tag) {
            throw DataError("annotations line " + std::to_string(line_no) + ": unknown tag '" +
                            fields[3] + "'");
        }
        if (fields[4] != "NP" && fields[4] != "VP" && fields[4] != "O") {
            throw DataError("annotations line " + std::to_string(line_no) +
                            ": chunk_kind must be NP, VP, or O, got '" + fields[4] + "'");
        }
        AnnotationRow row;
        row.token = fields[2];
        row.tag = *tag;
        row.chunk_kind = fields[4];
        row.chunk_id = fields[5].empty() ? -1 : static_cast<long>(parse_index(fields[5], "chunk_id", line_no));
        row.head_index = fields[6].empty() ? -1 : static_cast<long>(parse_index(fields[6], "head_index", line_no));
        row.line_no = line_no;
        auto& rows = rows_by_doc[doc_id];
        if (token_index != rows.size()) {
            throw DataError("annotations line " + std::to_string(line_no) + ": doc '" + doc_id +
                            "' token_index " + std::to_string(token_index) + " out of order (expected " +
                            std::to_string(rows.size()) + ")");
        }
        rows.push_back(std::move(row));
    }

    AnnotationStore store;
    for (auto& [doc_id, rows] : rows_by_doc) {
        auto size_it = doc_sizes.find(doc_id);
        if (size_it == doc_sizes.end())
            throw DataError("annotations reference unknown doc '" + doc_id + "'");
        if (rows.size() != size_it->second) {
            throw DataError("annotations for doc '" + doc_id + "' cover " +
                            std::to_string(rows.size()) + " tokens but the doc has " +
                            std::to_string(size_it->second));
        }
        DocAnnotation ann;
        ann.tags.reserve(rows.size());
        for (const auto& row : rows) ann.tags.push_back({row.token, row.tag});
        size_t i = 0;
        while (i < rows.size()) {
            if (rows[i].chunk_kind == "O") {
                ++i;
                continue;
            }
            size_t j = i + 1;
            while (j < rows.size() && rows[j].chunk_kind == rows[i].chunk_kind &&
                   rows[j].chunk_id == rows[i].chunk_id) {
                ++j;
            }
            if (rows[i].head_index < 0 || static_cast<size_t>(rows[i].head_index) < i ||
                static_cast<size_t>(rows[i].head_index) >= j) {
                throw DataError("annotations line " + std::to_string(rows[i].line_no) +
                                ": head_index outside its chunk in doc '" + doc_id + "'");
            }
            PhraseChunk pc;
            pc.kind = rows[i].chunk_kind == "NP" ? ChunkKind::NP : ChunkKind::VP;
            pc.start = i;
            pc.end = j;
            pc.head = static_cast<size_t>(rows[i].head_index);
            ann.chunks.push_back(pc);
            i = j;
        }
        store.docs.emplace(doc_id, std::move(ann));
    }
    return store;
}

DocAnnotation annotate(const std::vector<std::string>& tokens, const TaggerConfig& tagger,
                       const AnnotationStore* store, const std::string& doc_id) {
    if (store != nullptr) {
        auto it = store->docs.find(doc_id);
        if (it != store->docs.end()) return it->second;
    }
    DocAnnotation ann;
    ann.tags = pos_tag(tokens, tagger);
    ann.chunks = chunk(ann.tags);
    return ann;
}

} // namespace painmine
