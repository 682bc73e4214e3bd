#pragma once

#include "painmine/corpus.hpp"

#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace painmine {

enum class PosTag { Noun, Verb, Adj, Adv, Det, Pron, Adp, Other };

std::string pos_tag_name(PosTag tag);
std::optional<PosTag> parse_pos_tag(const std::string& name);

struct PosTaggedToken {
    std::string token;
    PosTag tag = PosTag::Noun;
};

// Lexicon entries win over suffix rules; suffix rules are tried in order
// and only fire when the token is at least two characters longer than the
// suffix; everything else defaults to NOUN.
struct TaggerConfig {
    std::unordered_map<std::string, PosTag> lexicon;
    std::vector<std::pair<std::string, PosTag>> suffix_rules;

    static TaggerConfig english_defaults();
};

std::vector<PosTaggedToken> pos_tag(const std::vector<std::string>& tokens,
                                    const TaggerConfig& config);

enum class ChunkKind { NP, VP };

std::string chunk_kind_name(ChunkKind kind);

struct PhraseChunk {
    ChunkKind kind = ChunkKind::NP;
    size_t start = 0; // [start, end) token indices
    size_t end = 0;
    size_t head = 0; // token index within the span
};

// Left-to-right greedy, non-overlapping maximal matches of
//   NP: DET? ADJ* NOUN+   (head = last NOUN)
//   VP: ADV* VERB+ ADJ*   (head = first VERB)
std::vector<PhraseChunk> chunk(const std::vector<PosTaggedToken>& tagged);

// Index into `chunks` of the chunk covering token_index, or -1.
int chunk_at(const std::vector<PhraseChunk>& chunks, size_t token_index);

// Nearest NP to the left of chunks[chunk_index], else nearest to the
// right, else -1. The review is treated as a single sentence.
int related_np(const std::vector<PhraseChunk>& chunks, size_t chunk_index);

struct DocAnnotation {
    std::vector<PosTaggedToken> tags;
    std::vector<PhraseChunk> chunks;
};

struct AnnotationStore {
    std::map<std::string, DocAnnotation> docs;

    bool has(const std::string& doc_id) const { return docs.count(doc_id) > 0; }
};

// Tab-separated rows: doc_id, token_index, token, tag, chunk_kind (NP /
// VP / O), chunk_id, head_index. Token counts must match the corpus doc;
// mismatches are rejected with the doc id and line number.
AnnotationStore load_annotations(const std::string& path,
                                 const std::vector<CleanReview>& corpus);

// External annotation when the store covers the doc, built-in tagger +
// chunker otherwise. No mixing within a doc.
DocAnnotation annotate(const std::vector<std::string>& tokens, const TaggerConfig& tagger,
                       const AnnotationStore* store, const std::string& doc_id);

} // namespace painmine
