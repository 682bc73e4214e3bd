#include "painmine/pipeline.hpp"

#include "painmine/errors.hpp"
#include "painmine/util.hpp"

#include <charconv>
#include <cstdint>

namespace painmine {

namespace {

std::string trim(const std::string& text) {
    size_t begin = text.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    size_t end = text.find_last_not_of(" \t\r");
    return text.substr(begin, end - begin + 1);
}

[[noreturn]] void bad_value(size_t line, const std::string& key, const char* expected) {
    throw ConfigError("config line " + std::to_string(line) + ": value for '" + key +
                      "' must be " + expected);
}

long long parse_int(const std::string& value, size_t line, const std::string& key,
                    long long min_value) {
    long long out = 0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc() || ptr != value.data() + value.size() || out < min_value)
        bad_value(line, key, "an integer");
    return out;
}

uint64_t parse_u64(const std::string& value, size_t line, const std::string& key) {
    uint64_t out = 0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc() || ptr != value.data() + value.size())
        bad_value(line, key, "an unsigned integer");
    return out;
}

double parse_real(const std::string& value, size_t line, const std::string& key) {
    double out = 0.0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc() || ptr != value.data() + value.size())
        bad_value(line, key, "a number");
    return out;
}

bool parse_flag(const std::string& value, size_t line, const std::string& key) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    bad_value(line, key, "true or false");
}

Optimizer parse_optimizer(const std::string& value, size_t line, const std::string& key) {
    if (value == "adam") return Optimizer::AdaptiveMoment;
    if (value == "sgd") return Optimizer::Sgd;
    bad_value(line, key, "adam or sgd");
}

void apply_train_key(TrainConfig& train, const std::string& key, const std::string& value,
                     size_t line, bool& handled) {
    handled = true;
    if (key == "learning_rate") {
        train.learning_rate = parse_real(value, line, key);
        if (train.learning_rate <= 0.0) bad_value(line, key, "a positive number");
    } else if (key == "epochs") {
        train.epochs = static_cast<int>(parse_int(value, line, key, 1));
    } else if (key == "batch_size") {
        train.batch_size = static_cast<int>(parse_int(value, line, key, 1));
    } else if (key == "optimizer") {
        train.optimizer = parse_optimizer(value, line, key);
    } else if (key == "embed_dim") {
        train.embed_dim = static_cast<int>(parse_int(value, line, key, 1));
    } else if (key == "hidden_dim") {
        train.hidden_dim = static_cast<int>(parse_int(value, line, key, 0));
    } else {
        handled = false;
    }
}

} // namespace

PipelineConfig parse_pipeline_config(const std::string& text) {
    PipelineConfig config;
    std::string section;
    const auto lines = split_lines(text);
    for (size_t i = 0; i < lines.size(); ++i) {
        const size_t line_no = i + 1;
        std::string line = trim(lines[i]);
        if (line.empty() || line[0] == '#' || line[0] == ';') continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("config line " + std::to_string(line_no) +
                                  ": unterminated section header");
            section = line.substr(1, line.size() - 2);
            static const std::vector<std::string> known = {
                "paths", "filter", "sentiment", "topics", "itm", "extract", "run"};
            if (std::find(known.begin(), known.end(), section) == known.end())
                throw ConfigError("config line " + std::to_string(line_no) +
                                  ": unknown section [" + section + "]");
            continue;
        }
        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(line_no) +
                              ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
        if (section.empty())
            throw ConfigError("config line " + std::to_string(line_no) +
                              ": key '" + key + "' appears before any [section]");

        bool known_key = true;
        if (section == "paths") {
            if (key == "input") config.input = value;
            else if (key == "format") {
                if (value != "jsonl" && value != "csv" && value != "auto")
                    bad_value(line_no, key, "jsonl, csv, or auto");
                config.format = value;
            }
            else if (key == "stopwords") config.stopwords_path = value;
            else if (key == "normalization") config.normalization_path = value;
            else if (key == "annotations") config.annotations_path = value;
            else if (key == "output_dir") config.output_dir = value;
            else known_key = false;
        } else if (section == "filter") {
            if (key == "min_tokens")
                config.filter.min_tokens = static_cast<int>(parse_int(value, line_no, key, 0));
            else if (key == "dedupe") config.filter.dedupe = parse_flag(value, line_no, key);
            else if (key == "require_keyword")
                config.filter.require_keyword = parse_flag(value, line_no, key);
            else if (key == "min_negative_freq")
                config.min_negative_freq = static_cast<int>(parse_int(value, line_no, key, 1));
            else known_key = false;
        } else if (section == "sentiment") {
            apply_train_key(config.sentiment, key, value, line_no, known_key);
        } else if (section == "topics") {
            if (key == "k") config.k = static_cast<int>(parse_int(value, line_no, key, 0));
            else if (key == "outlier_quantile") {
                config.outlier_quantile = parse_real(value, line_no, key);
                if (config.outlier_quantile < 0.0 || config.outlier_quantile >= 1.0)
                    bad_value(line_no, key, "in [0, 1)");
            } else if (key == "svd_dim")
                config.svd_dim = static_cast<int>(parse_int(value, line_no, key, 1));
            else if (key == "s") config.merge.s = parse_real(value, line_no, key);
            else if (key == "top_r")
                config.merge.top_r = static_cast<int>(parse_int(value, line_no, key, 1));
            else if (key == "min_topic_size")
                config.merge.min_topic_size = static_cast<int>(parse_int(value, line_no, key, 1));
            else if (key == "noun_filter")
                config.merge.noun_filter = parse_flag(value, line_no, key);
            else known_key = false;
        } else if (section == "itm") {
            if (key == "tau") {
                config.itm.tau = parse_real(value, line_no, key);
                if (config.itm.tau <= 0.0 || config.itm.tau > 1.0)
                    bad_value(line_no, key, "in (0, 1]");
            } else if (key == "max_steps")
                config.itm.max_steps = static_cast<int>(parse_int(value, line_no, key, 1));
            else if (key == "patience")
                config.itm.patience = static_cast<int>(parse_int(value, line_no, key, 1));
            else if (key == "epochs_per_step")
                config.itm.epochs_per_step = static_cast<int>(parse_int(value, line_no, key, 1));
            else if (key == "cold_start")
                config.itm.cold_start = parse_flag(value, line_no, key);
            else
                apply_train_key(config.itm.train, key, value, line_no, known_key);
        } else if (section == "extract") {
            if (key == "g")
                config.extract.g = static_cast<int>(parse_int(value, line_no, key, 1));
            else if (key == "n_sentiment")
                config.extract.n_sentiment = static_cast<int>(parse_int(value, line_no, key, 1));
            else if (key == "n_per_topic")
                config.extract.n_per_topic = static_cast<int>(parse_int(value, line_no, key, 1));
            else if (key == "attribution") {
                if (value == "grad_input") config.extract.method = AttributionMethod::GradInput;
                else if (value == "integrated_gradients")
                    config.extract.method = AttributionMethod::IntegratedGradients;
                else bad_value(line_no, key, "grad_input or integrated_gradients");
            } else if (key == "ig_steps")
                config.extract.ig_steps = static_cast<int>(parse_int(value, line_no, key, 1));
            else known_key = false;
        } else if (section == "run") {
            if (key == "seed") config.seed = parse_u64(value, line_no, key);
            else known_key = false;
        }
        if (!known_key)
            throw ConfigError("config line " + std::to_string(line_no) + ": unknown key '" +
                              key + "' in section [" + section + "]");
    }

    // One run seed feeds every random component, each with its own offset so
    // the streams stay independent.
    config.sentiment.seed = config.seed;
    config.itm.train.seed = config.seed + 1;
    config.itm.coherence_top_r = config.merge.top_r;
    config.config_text = text;
    return config;
}

PipelineConfig load_pipeline_config(const std::string& path) {
    return parse_pipeline_config(read_file(path));
}

std::string default_config_text() {
    return R"(# painmine pipeline configuration
# key = value entries grouped into [sections]; full-line comments start
# with '#' or ';'. Unknown sections or keys are errors.

[paths]
# review corpus: .jsonl (one object per line) or .csv
input = reviews.jsonl
# jsonl | csv | auto (auto decides by file extension)
format = auto
# one stopword per line
stopwords = stopwords.txt
# optional: text normalization rules, pattern<TAB>replacement per line
normalization =
# optional: token-level part-of-speech / chunk overrides (TSV)
annotations =
output_dir = out

[filter]
# drop reviews with fewer tokens than this
min_tokens = 10
# drop exact duplicates (smallest id wins)
dedupe = true
# drop reviews that contain no dissatisfaction keyword
require_keyword = true
# a token must appear in at least this many negative reviews to become
# a dissatisfaction keyword
min_negative_freq = 5

[sentiment]
learning_rate = 0.01
epochs = 10
batch_size = 64
# adam | sgd
optimizer = adam
embed_dim = 64
# 0 = linear model (no hidden layer)
hidden_dim = 0

[topics]
# number of clusters; 0 = pick by silhouette over 8, 12, 16, 20, 24
k = 0
# fraction of least-similar documents sent to the outlier bucket
outlier_quantile = 0.2
# embedding dimension for the document vectors fed to clustering
svd_dim = 64
# minimum class-weighted term score for a representative word to become
# a topic keyword (keywords drive merging)
s = 0.1
# representative words kept per topic
top_r = 10
# topics smaller than this are folded into the outlier bucket
min_topic_size = 5
# keep only nouns as representative words
noun_filter = true

[itm]
# confidence scale: a document moves to class c only when the predicted
# probability exceeds relative_recall(c) * tau
tau = 0.6
max_steps = 100
# stop after this many consecutive steps where at least two of the three
# progress metrics (coherence, outlier ratio, label changes) get worse
patience = 2
epochs_per_step = 1
# retrain from fresh weights each step instead of continuing
cold_start = false
learning_rate = 0.01
batch_size = 64
optimizer = adam
embed_dim = 64
hidden_dim = 0

[extract]
# attribution tokens taken per document
g = 3
# pain points reported from the sentiment model
n_sentiment = 30
# pain points reported per topic
n_per_topic = 10
# grad_input | integrated_gradients
attribution = grad_input
ig_steps = 64

[run]
seed = 0
)";
}

std::string default_stopwords_text() {
    return R"(a
about
above
after
again
against
all
am
an
and
any
are
as
at
be
because
been
before
being
below
between
both
but
by
can
could
did
do
does
doing
down
during
each
few
for
from
further
had
has
have
having
he
her
here
hers
herself
him
himself
his
how
i
if
in
into
is
it
its
itself
just
me
more
most
my
myself
no
nor
not
now
of
off
on
once
only
or
other
our
ours
ourselves
out
over
own
same
she
should
so
some
such
than
that
the
their
theirs
them
themselves
then
there
these
they
this
those
through
to
too
under
until
up
very
was
we
were
what
when
where
which
while
who
whom
why
will
with
would
you
your
yours
yourself
yourselves
)";
}

} // namespace painmine
