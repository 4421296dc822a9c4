#include <stdio.h>
#include <string.h>
#include "polyreason.h"

int main(void) {
    PrPipeline *p = NULL;
    if (pr_pipeline_new(&p) != PR_STATUS_OK) return 10;
    const char *text =
        "STATEMENT:\nBob is red.\n\nQUESTION:\nBob is red.\n\nA) True\nB) False";
    char *out = NULL;
    PrStatus s = pr_solve(p, text, 0, &out);
    if (s != PR_STATUS_OK) {
        fprintf(stderr, "solve: %d %s\n", s, pr_last_error());
        return 11;
    }
    printf("%s\n", out);
    pr_string_free(out);
    if (pr_check(PR_LANGUAGE_SMT, "(assert", NULL) != PR_STATUS_DIAGNOSTICS) return 12;
    if (pr_last_error() == NULL) return 13;
    if (pr_solve(NULL, text, 0, &out) != PR_STATUS_NULL_ARGUMENT) return 14;
    pr_pipeline_free(p);
    printf("version %s\n", pr_version());
    return 0;
}
