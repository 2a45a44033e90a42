#!/usr/bin/env python3
# Copyright 2026 The GCE Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#   http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Materialize MovieLens-100k as native u.data plus a genre side-info file.

Tries, in order: an existing ml-100k.zip / u.data under --from, the GroupLens
download URL, and finally the copy bundled inside the pytorch-widedeep wheel
(fetched with `pip download`, no install).
"""
import argparse
import glob
import io
import os
import subprocess
import sys
import tempfile
import urllib.request
import zipfile

GENRES = ["unknown", "Action", "Adventure", "Animation", "Children's", "Comedy",
          "Crime", "Documentary", "Drama", "Fantasy", "Film-Noir", "Horror",
          "Musical", "Mystery", "Romance", "Sci-Fi", "Thriller", "War", "Western"]
URL = "https://files.grouplens.org/datasets/movielens/ml-100k.zip"


def write_from_grouplens_zip(zf, out):
    with open(os.path.join(out, "u.data"), "wb") as f:
        f.write(zf.read("ml-100k/u.data"))
    items = zf.read("ml-100k/u.item").decode("latin-1").splitlines()
    with open(os.path.join(out, "u.genre_pairs"), "w") as f:
        for line in items:
            cols = line.split("|")
            flags = cols[5:5 + len(GENRES)]
            for g, flag in zip(GENRES, flags):
                if flag == "1":
                    f.write(f"{cols[0]}\t{g.replace(' ', '_')}\n")


def write_from_wheel(out):
    import pandas as pd
    with tempfile.TemporaryDirectory() as tmp:
        subprocess.run([sys.executable, "-m", "pip", "download", "--no-deps",
                        "-d", tmp, "pytorch-widedeep==1.7.0"], check=True)
        wheel = glob.glob(os.path.join(tmp, "pytorch_widedeep-*.whl"))[0]
        zf = zipfile.ZipFile(wheel)
        base = "pytorch_widedeep/datasets/data/"
        data = pd.read_parquet(io.BytesIO(zf.read(base + "MovieLens100k_data.parquet.brotli")))
        items = pd.read_parquet(io.BytesIO(zf.read(base + "MovieLens100k_items.parquet.brotli")))
    with open(os.path.join(out, "u.data"), "w") as f:
        for row in data.itertuples(index=False):
            f.write(f"{row.user_id}\t{row.movie_id}\t{row.rating}\t{row.timestamp}\n")
    with open(os.path.join(out, "u.genre_pairs"), "w") as f:
        for _, row in items.iterrows():
            for g in GENRES:
                if int(row[g]) == 1:
                    f.write(f"{row['movie_id']}\t{g}\n")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=os.path.join(os.path.dirname(__file__), "..", "data", "ml-100k"))
    ap.add_argument("--from", dest="src", default=None, help="local ml-100k.zip")
    args = ap.parse_args()
    os.makedirs(args.out, exist_ok=True)
    if args.src:
        write_from_grouplens_zip(zipfile.ZipFile(args.src), args.out)
    else:
        try:
            with urllib.request.urlopen(URL, timeout=20) as r:
                write_from_grouplens_zip(zipfile.ZipFile(io.BytesIO(r.read())), args.out)
        except Exception as e:  # noqa: BLE001
            print(f"download failed ({e}); falling back to the pytorch-widedeep wheel", file=sys.stderr)
            write_from_wheel(args.out)
    n = sum(1 for _ in open(os.path.join(args.out, "u.data")))
    print(f"wrote {n} interactions to {os.path.abspath(args.out)}")


if __name__ == "__main__":
    main()
