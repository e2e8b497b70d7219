#!/usr/bin/env python3
# Copyright 2026 The qsynth Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Reference BLEU-4, qml-upweighted BLEU and ROUGE-L on stdlib tokens.

Written independently of the C++ code: n-gram counting with Counter, the
LCS by full dynamic-programming table. Prints one JSON object per pair.
"""

import io
import json
import math
import sys
import tokenize
from collections import Counter

KEEP = {tokenize.NAME, tokenize.NUMBER, tokenize.STRING, tokenize.OP}


def tokens(path):
    with open(path, encoding="utf-8") as f:
        src = f.read()
    return [t.string for t in tokenize.generate_tokens(io.StringIO(src).readline) if t.type in KEEP]


def ngrams(toks, n):
    return Counter(tuple(toks[i:i + n]) for i in range(len(toks) - n + 1))


def bleu(h, r):
    logs = []
    for n in range(1, 5):
        hc, rc = ngrams(h, n), ngrams(r, n)
        total = sum(hc.values())
        match = sum(min(c, rc[g]) for g, c in hc.items())
        if match == 0:
            if n == 1:
                return 0.0
            logs.append(math.log(1.0 / (total + 1)))
        else:
            logs.append(math.log(match / total))
    bp = 1.0 if len(h) >= len(r) else math.exp(1 - len(r) / len(h))
    return bp * math.exp(sum(logs) / 4)


def ident(t):
    return t.isidentifier()


def upweight(toks):
    out, i = [], 0
    while i < len(toks):
        if toks[i] == "qml" and i + 2 < len(toks) and toks[i + 1] == "." and ident(toks[i + 2]):
            j = i + 3
            while j + 1 < len(toks) and toks[j] == "." and ident(toks[j + 1]):
                j += 2
            out.extend(toks[i:j] * 3)
            i = j
        else:
            out.append(toks[i])
            i += 1
    return out


def rouge_l(h, r):
    table = [[0] * (len(r) + 1) for _ in range(len(h) + 1)]
    for i in range(len(h)):
        for j in range(len(r)):
            table[i + 1][j + 1] = table[i][j] + 1 if h[i] == r[j] else max(table[i][j + 1], table[i + 1][j])
    lcs = table[len(h)][len(r)]
    if lcs == 0:
        return 0.0
    p, rc = lcs / len(h), lcs / len(r)
    return 2 * p * rc / (p + rc)


def main(argv):
    for hyp, ref in zip(argv[1::2], argv[2::2]):
        h, r = tokens(hyp), tokens(ref)
        print(json.dumps({"hyp": hyp, "ref": ref, "h_tokens": len(h), "r_tokens": len(r),
                          "token_bleu": round(bleu(h, r), 12),
                          "weighted_bleu": round(bleu(upweight(h), upweight(r)), 12),
                          "rouge_l": round(rouge_l(h, r), 12)}))


if __name__ == "__main__":
    main(sys.argv)
