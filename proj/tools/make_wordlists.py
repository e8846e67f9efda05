"""Regenerate data/words_train.txt and data/words_eval.txt.

Takes the most frequent English words of 4-7 ASCII letters (wordfreq's
"en" list) and deals them alternately into two disjoint 1,000-word lists.
"""
import argparse
import pathlib
import re

from wordfreq import top_n_list

BLOCKLIST = {
    "fuck", "fucking", "fucked", "shit", "bitch", "damn", "porn", "sexy", "dick",
    "pussy", "nigga", "nigger", "cunt", "whore", "slut", "rape", "penis", "vagina",
    "boobs", "asshole", "bitches", "fucks", "shitty", "horny", "nude", "naked",
}


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--out", default=pathlib.Path(__file__).resolve().parent.parent / "data")
    parser.add_argument("--per-list", type=int, default=1000)
    args = parser.parse_args()

    pattern = re.compile(r"^[a-z]{4,7}$")
    words = [w for w in top_n_list("en", 50000) if pattern.match(w) and w not in BLOCKLIST]
    need = 2 * args.per_list
    if len(words) < need:
        raise SystemExit(f"only {len(words)} candidate words")
    words = words[:need]
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "words_train.txt").write_text("\n".join(words[0::2]) + "\n")
    (out / "words_eval.txt").write_text("\n".join(words[1::2]) + "\n")


if __name__ == "__main__":
    main()
