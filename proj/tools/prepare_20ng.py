#!/usr/bin/env python3
# Copyright 2026 The KATE Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#    http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Writes 20 Newsgroups (bydate split) as kate corpus JSONL.

Needs scikit-learn (downloads the data on first use). Stopwords are removed
with scikit-learn's English list; tokens are Porter-stemmed when nltk is
installed.

    python3 tools/prepare_20ng.py --out-dir data
    export KATE_20NG_TRAIN=data/20ng_train.jsonl KATE_20NG_TEST=data/20ng_test.jsonl
"""

import argparse
import collections
import json
import os
import re

from sklearn.datasets import fetch_20newsgroups
from sklearn.feature_extraction.text import ENGLISH_STOP_WORDS

try:
    from nltk.stem.porter import PorterStemmer
    _stem = PorterStemmer().stem
except ImportError:  # plain tokens still work, just a different vocabulary
    _stem = None

TOKEN = re.compile(r"[a-z][a-z0-9]+")


def tokens(text):
    for tok in TOKEN.findall(text.lower()):
        if tok in ENGLISH_STOP_WORDS:
            continue
        yield _stem(tok) if _stem else tok


def write(subset, path):
    data = fetch_20newsgroups(subset=subset, remove=("headers", "footers", "quotes"))
    with open(path, "w", encoding="utf-8") as out:
        for i, (text, target) in enumerate(zip(data.data, data.target)):
            counts = collections.Counter(tokens(text))
            record = {"id": f"{subset}-{i}", "counts": counts, "label": data.target_names[target]}
            out.write(json.dumps(record) + "\n")
    print(f"{path}: {len(data.data)} documents")


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out-dir", default=".")
    args = parser.parse_args()
    os.makedirs(args.out_dir, exist_ok=True)
    write("train", os.path.join(args.out_dir, "20ng_train.jsonl"))
    write("test", os.path.join(args.out_dir, "20ng_test.jsonl"))


if __name__ == "__main__":
    main()
