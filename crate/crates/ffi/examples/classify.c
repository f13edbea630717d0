/* Build: cargo build -p sarckit-ffi
 *        cc -std=c11 -Icrates/ffi/include crates/ffi/examples/classify.c \
 *           target/debug/libsarckit_ffi.a -lpthread -ldl -lm -o classify
 */
#include <stdio.h>

#include "sarckit.h"

static int fail(const char *what) {
    fprintf(stderr, "%s: %s\n", what, sarckit_last_error_message());
    return 1;
}

int main(void) {
    const char *data =
        "{\"id\":\"s1\",\"parent_id\":\"q\",\"text\":\"thanks for the idea .\",\"label\":\"sarc\"}\n"
        "{\"id\":\"s2\",\"parent_id\":\"q\",\"text\":\"thanks for that .\",\"label\":\"sarc\"}\n"
        "{\"id\":\"n1\",\"parent_id\":\"q\",\"text\":\"i read your post .\",\"label\":\"notsarc\"}\n";
    SarckitAnalyzer *a = NULL;
    SarckitCorpus *c = NULL;
    SarckitPatternStats *s = NULL;
    SarckitDetector *d = NULL;

    if (sarckit_analyzer_new(&a) != SARCKIT_STATUS_OK) return fail("analyzer");
    if (sarckit_corpus_from_jsonl(data, &c) != SARCKIT_STATUS_OK) return fail("corpus");
    if (sarckit_count_patterns(c, a, true, &s) != SARCKIT_STATUS_OK) return fail("count");
    if (sarckit_detector_new(s, SARCKIT_LABEL_SARCASTIC, 2, 0.75, 1, &d) != SARCKIT_STATUS_OK)
        return fail("detector");

    bool hit = false;
    size_t sites = 0;
    if (sarckit_detector_classify(d, a, "well thanks for nothing .", &hit, &sites) != SARCKIT_STATUS_OK)
        return fail("classify");
    printf("sarckit %s: %zu posts, %zu patterns, hit=%d sites=%zu\n", sarckit_version(),
           sarckit_corpus_len(c), sarckit_pattern_stats_len(s), hit, sites);

    sarckit_detector_free(d);
    sarckit_pattern_stats_free(s);
    sarckit_corpus_free(c);
    sarckit_analyzer_free(a);
    return 0;
}
